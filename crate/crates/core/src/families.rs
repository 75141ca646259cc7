//! Builders for the standard example structures.
//!
//! Each builder attaches the analytic facts it knows (depths, cycle-freeness,
//! generation windows) as [`FamilyMeta`]; the test suite checks every such
//! claim against budgeted search.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::algebra::{BasisTransform, Element};
use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, rational, Scalar, ScalarMode};
use crate::structure::{
    Depth, DepthOracle, Entry, EvolutionStructure, FamilyMeta, Row, RowFn, TailFn, Universe, VertexId,
};

/// Exponents above this are clamped when evaluating geometric tail bounds.
/// For ratios in (0, 1) the clamped value is still an upper bound.
const MAX_TAIL_EXPONENT: u64 = 4096;

mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let v = Value::deserialize(d)?;
        value_to_rational(&v).map_err(D::Error::custom)
    }
}

mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(rs: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(rs.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigRational>, D::Error> {
        let vs = Vec::<Value>::deserialize(d)?;
        vs.iter().map(value_to_rational).collect::<Result<_>>().map_err(D::Error::custom)
    }
}

/// Accepts `"p/q"` strings and JSON integers.
fn value_to_rational(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => Ok(BigRational::from_integer(BigInt::from(n.as_i64().unwrap()))),
        other => Err(Error::Parse(format!("expected a rational \"p/q\", got {other}"))),
    }
}

fn half() -> BigRational {
    rational(1, 2)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeWeights {
    #[default]
    Unit,
    /// Child `j` (1-based) gets weight `ratio^j`.
    Geometric {
        #[serde(with = "rational_str")]
        ratio: BigRational,
    },
    /// One weight per child position.
    Custom {
        #[serde(with = "rational_vec")]
        weights: Vec<BigRational>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MarkovWeights {
    /// `c_1j = (1 - ratio) ratio^(j-2)`, so the row sums to 1.
    Geometric {
        #[serde(with = "rational_str")]
        ratio: BigRational,
    },
    /// `c_12, c_13, ...` from `head`, then `c_1j = last * tail_ratio^t`
    /// for the `t`-th index past the head.
    Custom {
        #[serde(with = "rational_vec")]
        head: Vec<BigRational>,
        #[serde(with = "rational_str")]
        tail_ratio: BigRational,
    },
}

impl Default for MarkovWeights {
    fn default() -> Self {
        MarkovWeights::Geometric { ratio: half() }
    }
}

/// The hub row `e_1² = Σ_{ℓ≥2} α_ℓ e_ℓ` of `hub_line`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HubAlpha {
    /// `α_ℓ = ratio^(ℓ-1)`.
    Geometric {
        #[serde(with = "rational_str")]
        ratio: BigRational,
    },
    /// `α_2ℓ = α_2ℓ+1 = ratio^ℓ`.
    Paired {
        #[serde(with = "rational_str")]
        ratio: BigRational,
    },
    /// `α_2ℓ = ratio^ℓ`, `α_2ℓ+1 = -ratio^ℓ`.
    Antipaired {
        #[serde(with = "rational_str")]
        ratio: BigRational,
    },
}

impl Default for HubAlpha {
    fn default() -> Self {
        HubAlpha::Geometric { ratio: half() }
    }
}

/// Rows of a finite structure, as given by the user.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplicitRows {
    pub mode: ScalarMode,
    pub n: u64,
    pub rows: BTreeMap<u64, Vec<(u64, Scalar)>>,
}

impl Serialize for ExplicitRows {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExplicitRows {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        ExplicitRows::from_json(&v).map_err(D::Error::custom)
    }
}

impl ExplicitRows {
    pub fn to_json(&self) -> Value {
        let rows: serde_json::Map<String, Value> = self
            .rows
            .iter()
            .map(|(i, es)| {
                let list: Vec<Value> = es.iter().map(|(k, w)| json!([k, weight_to_json(w)])).collect();
                (i.to_string(), Value::Array(list))
            })
            .collect();
        json!({
            "mode": self.mode,
            "universe": format!("finite:{}", self.n),
            "rows": rows,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("structure must be a JSON object".into()))?;
        let mode: ScalarMode = match obj.get("mode") {
            None => ScalarMode::Exact,
            Some(m) => serde_json::from_value(m.clone())
                .map_err(|_| Error::Parse(format!("field \"mode\": expected \"exact\" or \"float\", got {m}")))?,
        };
        let universe = obj
            .get("universe")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("field \"universe\": expected a string \"finite:N\"".into()))?;
        let n = match universe.strip_prefix("finite:") {
            Some(n) => n
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("field \"universe\": bad size in {universe:?}")))?,
            None if universe == "infinite" => {
                return Err(Error::Validation("explicit rows need a finite universe; use a family".into()))
            }
            None => return Err(Error::Parse(format!("field \"universe\": expected \"finite:N\", got {universe:?}"))),
        };
        let mut rows = BTreeMap::new();
        if let Some(r) = obj.get("rows") {
            let r = r.as_object().ok_or_else(|| Error::Parse("field \"rows\": expected an object".into()))?;
            for (key, list) in r {
                let i: u64 = key
                    .parse()
                    .map_err(|_| Error::Parse(format!("field \"rows\": bad vertex key {key:?}")))?;
                let list = list
                    .as_array()
                    .ok_or_else(|| Error::Parse(format!("rows.{key}: expected a list of [target, weight]")))?;
                let mut entries = Vec::with_capacity(list.len());
                for (pos, pair) in list.iter().enumerate() {
                    let ctx = format!("rows.{key}[{pos}]");
                    let pair = pair
                        .as_array()
                        .filter(|p| p.len() == 2)
                        .ok_or_else(|| Error::Parse(format!("{ctx}: expected [target, weight]")))?;
                    let k = pair[0]
                        .as_u64()
                        .ok_or_else(|| Error::Parse(format!("{ctx}: target must be a positive integer")))?;
                    let w = weight_from_json(&pair[1], mode).map_err(|e| match e {
                        Error::Parse(m) => Error::Parse(format!("{ctx}: {m}")),
                        other => other,
                    })?;
                    entries.push((k, w));
                }
                rows.insert(i, entries);
            }
        }
        Ok(ExplicitRows { mode, n, rows })
    }
}

/// Exact weights render as `"p/q"` (or `["re","im"]`), float weights as
/// numbers (or `[re, im]`).
pub fn weight_to_json(w: &Scalar) -> Value {
    match w {
        Scalar::Exact(c) if c.im.is_zero() => Value::String(format_rational(&c.re)),
        Scalar::Exact(c) => json!([format_rational(&c.re), format_rational(&c.im)]),
        Scalar::Float(c) if c.im == 0.0 => json!(c.re),
        Scalar::Float(c) => json!([c.re, c.im]),
    }
}

pub fn weight_from_json(v: &Value, mode: ScalarMode) -> Result<Scalar> {
    match mode {
        ScalarMode::Exact => match v {
            Value::Array(parts) if parts.len() == 2 => {
                Ok(Scalar::complex_rational(value_to_rational(&parts[0])?, value_to_rational(&parts[1])?))
            }
            other => Ok(Scalar::from_rational(value_to_rational(other)?)),
        },
        ScalarMode::Float => {
            let num = |x: &Value| x.as_f64().ok_or_else(|| Error::Parse(format!("expected a number, got {x}")));
            match v {
                Value::Array(parts) if parts.len() == 2 => Ok(Scalar::complex_f64(num(&parts[0])?, num(&parts[1])?)),
                other => Ok(Scalar::from_f64(num(other)?)),
            }
        }
    }
}

/// A named family plus its parameters. Serializes as
/// `{"family": name, "params": {...}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum FamilySpec {
    RaryTree {
        r: u64,
        #[serde(default)]
        weights: TreeWeights,
        #[serde(default)]
        mode: ScalarMode,
    },
    MarkovLine {
        #[serde(default)]
        weights: MarkovWeights,
        #[serde(default)]
        mode: ScalarMode,
    },
    #[serde(rename = "alt_line_B", alias = "alt_line_b")]
    AltLineB {
        #[serde(default)]
        mode: ScalarMode,
    },
    /// The normalized rebasing of `alt_line_B`; its weights are `±1/√2`,
    /// so it is float-only.
    #[serde(rename = "alt_line_C0", alias = "alt_line_c0")]
    AltLineC0 {},
    HubLine {
        #[serde(default)]
        alpha: HubAlpha,
        #[serde(default)]
        mode: ScalarMode,
    },
    Comb {
        #[serde(default)]
        mode: ScalarMode,
    },
    GrowingTeeth {
        #[serde(default)]
        mode: ScalarMode,
    },
    FiniteExplicit(ExplicitRows),
}

pub const FAMILY_NAMES: [&str; 8] = [
    "rary_tree",
    "markov_line",
    "alt_line_B",
    "alt_line_C0",
    "hub_line",
    "comb",
    "growing_teeth",
    "finite_explicit",
];

/// One-line descriptions for `families list`.
pub fn family_catalog() -> Vec<(&'static str, &'static str)> {
    vec![
        ("rary_tree", "rooted r-ary tree, level-order ids; params: r >= 2, weights {unit|geometric|custom}"),
        ("markov_line", "hub 1 feeds every j >= 2, then e_i^2 = e_(i+1); params: weights {geometric|custom}"),
        ("alt_line_B", "e_i^2 = e_(i+1) + e_(i+2) (odd i), e_i + e_(i+1) (even i)"),
        ("alt_line_C0", "alt_line_B in its normalized rebased basis, weights +-1/sqrt(2) (float only)"),
        ("hub_line", "hub row sum alpha_l e_l, then paired self-loops; params: alpha {geometric|paired|antipaired}"),
        ("comb", "line of spacers with teeth of height 2; nil and nilpotent of index 4"),
        ("growing_teeth", "line of spacers with k-th tooth of height k; nil but not nilpotent"),
        ("finite_explicit", "explicit rows on a finite universe"),
    ]
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::RaryTree { .. } => "rary_tree",
            FamilySpec::MarkovLine { .. } => "markov_line",
            FamilySpec::AltLineB { .. } => "alt_line_B",
            FamilySpec::AltLineC0 {} => "alt_line_C0",
            FamilySpec::HubLine { .. } => "hub_line",
            FamilySpec::Comb { .. } => "comb",
            FamilySpec::GrowingTeeth { .. } => "growing_teeth",
            FamilySpec::FiniteExplicit(_) => "finite_explicit",
        }
    }

    pub fn mode(&self) -> ScalarMode {
        match self {
            FamilySpec::RaryTree { mode, .. }
            | FamilySpec::MarkovLine { mode, .. }
            | FamilySpec::AltLineB { mode }
            | FamilySpec::HubLine { mode, .. }
            | FamilySpec::Comb { mode }
            | FamilySpec::GrowingTeeth { mode } => *mode,
            FamilySpec::AltLineC0 {} => ScalarMode::Float,
            FamilySpec::FiniteExplicit(rows) => rows.mode,
        }
    }

    pub fn rary_tree(r: u64) -> Self {
        FamilySpec::RaryTree { r, weights: TreeWeights::Unit, mode: ScalarMode::Exact }
    }

    pub fn markov_line() -> Self {
        FamilySpec::MarkovLine { weights: MarkovWeights::default(), mode: ScalarMode::Exact }
    }

    pub fn alt_line_b() -> Self {
        FamilySpec::AltLineB { mode: ScalarMode::Exact }
    }

    pub fn alt_line_c0() -> Self {
        FamilySpec::AltLineC0 {}
    }

    pub fn hub_line(alpha: HubAlpha) -> Self {
        FamilySpec::HubLine { alpha, mode: ScalarMode::Exact }
    }

    pub fn comb() -> Self {
        FamilySpec::Comb { mode: ScalarMode::Exact }
    }

    pub fn growing_teeth() -> Self {
        FamilySpec::GrowingTeeth { mode: ScalarMode::Exact }
    }

    /// Same family in another scalar mode (no-op for float-only families).
    pub fn with_mode(mut self, new: ScalarMode) -> Self {
        match &mut self {
            FamilySpec::RaryTree { mode, .. }
            | FamilySpec::MarkovLine { mode, .. }
            | FamilySpec::AltLineB { mode }
            | FamilySpec::HubLine { mode, .. }
            | FamilySpec::Comb { mode }
            | FamilySpec::GrowingTeeth { mode } => *mode = new,
            FamilySpec::AltLineC0 {} => {}
            FamilySpec::FiniteExplicit(rows) => {
                rows.mode = new;
                for es in rows.rows.values_mut() {
                    for (_, w) in es.iter_mut() {
                        *w = w.to_mode(new);
                    }
                }
            }
        }
        self
    }

    /// Parses `{"family": name, "params": {...}}`; `params` may be omitted.
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("spec must be a JSON object".into()))?;
        let name = obj
            .get("family")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("field \"family\": expected a string".into()))?;
        if !FAMILY_NAMES.iter().any(|f| f.eq_ignore_ascii_case(name)) {
            return Err(Error::Parse(format!(
                "field \"family\": unknown family {name:?} (known: {})",
                FAMILY_NAMES.join(", ")
            )));
        }
        let params = obj.get("params").cloned().unwrap_or_else(|| json!({}));
        let tagged = json!({ "family": name, "params": params });
        serde_json::from_value(tagged).map_err(|e| Error::Parse(format!("params for {name}: {e}")))
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("family specs serialize")
    }
}

fn check_ratio(what: &str, ratio: &BigRational) -> Result<()> {
    if ratio.is_positive() && ratio < &BigRational::one() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{what}: ratio must lie in (0, 1), got {}", format_rational(ratio))))
    }
}

fn check_nonzero(what: &str, ws: &[BigRational]) -> Result<()> {
    match ws.iter().position(Zero::is_zero) {
        Some(p) => Err(Error::InvalidParams(format!("{what}: weight #{} is zero", p + 1))),
        None => Ok(()),
    }
}

/// `ratio^e`, with `e` clamped at [`MAX_TAIL_EXPONENT`]; an upper bound for
/// ratios in `(0, 1)`.
fn pow_capped(ratio: &BigRational, e: u64) -> BigRational {
    num_traits::pow(ratio.clone(), e.min(MAX_TAIL_EXPONENT) as usize)
}

fn v(i: u64) -> VertexId {
    VertexId::new(i)
}

fn exact_entry(k: u64, w: BigRational, mode: ScalarMode) -> Entry {
    (v(k), Scalar::from_rational(w).to_mode(mode))
}

fn unit_entries(ks: &[u64], mode: ScalarMode) -> Row {
    Row::Finite(ks.iter().map(|&k| (v(k), Scalar::one(mode))).collect())
}

fn constant_depth(d: Depth) -> DepthOracle {
    Arc::new(move |_| d)
}

pub fn build_family(spec: &FamilySpec) -> Result<EvolutionStructure> {
    let s = match spec {
        FamilySpec::RaryTree { r, weights, mode } => rary_tree(*r, weights, *mode)?,
        FamilySpec::MarkovLine { weights, mode } => markov_line(weights, *mode)?,
        FamilySpec::AltLineB { mode } => alt_line_b(*mode),
        FamilySpec::AltLineC0 {} => alt_line_c0(),
        FamilySpec::HubLine { alpha, mode } => hub_line(alpha, *mode)?,
        FamilySpec::Comb { mode } => comb(*mode),
        FamilySpec::GrowingTeeth { mode } => growing_teeth(*mode),
        FamilySpec::FiniteExplicit(rows) => return EvolutionStructure::finite(rows.clone()),
    };
    Ok(s.with_spec(spec.clone()))
}

/// Closed-form depth of vertex `i`.
pub fn family_depth_oracle(spec: &FamilySpec, i: VertexId) -> Result<Depth> {
    match spec {
        FamilySpec::Comb { .. } => Ok(comb_depth(i)),
        FamilySpec::GrowingTeeth { .. } => Ok(teeth_depth(i)),
        FamilySpec::FiniteExplicit(_) => Err(Error::OracleUnavailable),
        FamilySpec::RaryTree { r, .. } if *r < 2 => Err(Error::OracleUnavailable),
        _ => Ok(Depth::Infinite),
    }
}

// ---------------------------------------------------------------- r-ary tree

fn tree_children(r: u64, i: u64) -> Vec<u64> {
    let Some(first) = r.checked_mul(i - 1).and_then(|x| x.checked_add(2)) else { return Vec::new() };
    (0..r).filter_map(|j| first.checked_add(j)).collect()
}

/// `(parent, child position j in 1..=r)` of a non-root vertex.
fn tree_parent(r: u64, child: u64) -> Option<(u64, u64)> {
    (child >= 2).then(|| ((child - 2) / r + 1, (child - 2) % r + 1))
}

fn tree_weight(weights: &TreeWeights, j: u64) -> BigRational {
    match weights {
        TreeWeights::Unit => BigRational::one(),
        TreeWeights::Geometric { ratio } => num_traits::pow(ratio.clone(), j as usize),
        TreeWeights::Custom { weights } => weights[(j - 1) as usize].clone(),
    }
}

fn rary_tree(r: u64, weights: &TreeWeights, mode: ScalarMode) -> Result<EvolutionStructure> {
    if r < 2 {
        return Err(Error::InvalidParams(format!("rary_tree: r must be at least 2, got {r}")));
    }
    match weights {
        TreeWeights::Unit => {}
        TreeWeights::Geometric { ratio } => check_ratio("rary_tree", ratio)?,
        TreeWeights::Custom { weights } => {
            if weights.len() as u64 != r {
                return Err(Error::InvalidParams(format!(
                    "rary_tree: custom weights need exactly r = {r} entries, got {}",
                    weights.len()
                )));
            }
            check_nonzero("rary_tree", weights)?;
        }
    }
    let w_row = weights.clone();
    let rows: RowFn = Arc::new(move |i: VertexId| {
        Row::Finite(
            tree_children(r, i.get())
                .into_iter()
                .zip(1..)
                .map(|(k, j)| exact_entry(k, tree_weight(&w_row, j), mode))
                .collect(),
        )
    });
    let w_col = weights.clone();
    let cols: RowFn = Arc::new(move |k: VertexId| match tree_parent(r, k.get()) {
        Some((p, j)) => Row::Finite(vec![exact_entry(p, tree_weight(&w_col, j), mode)]),
        None => Row::empty(),
    });
    let meta = FamilyMeta {
        cycle_free: Some(true),
        depth_oracle: Some(constant_depth(Depth::Infinite)),
        sup_depth: Some(Depth::Infinite),
        locally_finite: Some(true),
        all_depths_finite: Some(false),
        ..FamilyMeta::default()
    };
    Ok(EvolutionStructure::new(mode, Universe::Infinite, rows).with_columns(cols).with_meta(meta))
}

/// Digit-string label of a tree vertex (`"1"`, `"11"`, `"12"`, ...); only
/// for `r <= 9`.
pub fn tree_label(r: u64, id: VertexId) -> Option<String> {
    if !(2..=9).contains(&r) {
        return None;
    }
    let mut digits = Vec::new();
    let mut cur = id.get();
    while let Some((p, j)) = tree_parent(r, cur) {
        digits.push(char::from_digit(j as u32, 10)?);
        cur = p;
    }
    digits.push('1');
    digits.reverse();
    Some(digits.into_iter().collect())
}

/// Inverse of [`tree_label`].
pub fn tree_vertex(r: u64, label: &str) -> Option<VertexId> {
    if !(2..=9).contains(&r) {
        return None;
    }
    let mut chars = label.chars();
    if chars.next()? != '1' {
        return None;
    }
    let mut id = 1u64;
    for c in chars {
        let j = c.to_digit(10)? as u64;
        if j == 0 || j > r {
            return None;
        }
        id = r.checked_mul(id - 1)?.checked_add(1 + j)?;
    }
    VertexId::try_new(id)
}

// --------------------------------------------------------------- markov line

/// Closed form for `c_1j`, `j >= 2`, plus row tail bounds.
#[derive(Clone)]
struct HubRow {
    coeff: Arc<dyn Fn(u64) -> BigRational + Send + Sync>,
    tail_sq: TailFn,
    tail_abs: TailFn,
}

impl HubRow {
    fn row(&self, mode: ScalarMode) -> Row {
        let coeff = self.coeff.clone();
        Row::Lazy {
            entries: Box::new((2u64..).filter_map(move |j| {
                let c = coeff(j);
                (!c.is_zero()).then(|| exact_entry(j, c, mode))
            })),
            tail_sq: Some(self.tail_sq.clone()),
            tail_abs: Some(self.tail_abs.clone()),
        }
    }
}

fn markov_hub(weights: &MarkovWeights) -> Result<HubRow> {
    match weights {
        MarkovWeights::Geometric { ratio } => {
            check_ratio("markov_line", ratio)?;
            let rho = ratio.clone();
            let one_minus = BigRational::one() - &rho;
            let (r1, r2, r3) = (rho.clone(), rho.clone(), rho.clone());
            let (m1, m2) = (one_minus.clone(), one_minus);
            Ok(HubRow {
                coeff: Arc::new(move |j| &m1 * num_traits::pow(r1.clone(), (j - 2) as usize)),
                tail_sq: Arc::new(move |n| {
                    let m = (n + 1).max(2);
                    let denom = BigRational::one() - &r2 * &r2;
                    &m2 * &m2 * pow_capped(&r2, 2 * (m - 2)) / denom
                }),
                tail_abs: Arc::new(move |n| pow_capped(&r3, (n + 1).max(2) - 2)),
            })
        }
        MarkovWeights::Custom { head, tail_ratio } => {
            if head.is_empty() {
                return Err(Error::InvalidParams("markov_line: custom head must be nonempty".into()));
            }
            check_nonzero("markov_line", head)?;
            check_ratio("markov_line tail", tail_ratio)?;
            let len = head.len() as u64;
            let last = head.last().unwrap().abs();
            let head = Arc::new(head.clone());
            let tau = tail_ratio.clone();
            let coeff = {
                let (head, tau) = (head.clone(), tau.clone());
                move |j: u64| -> BigRational {
                    if j - 2 < len {
                        head[(j - 2) as usize].clone()
                    } else {
                        head[(len - 1) as usize].clone() * num_traits::pow(tau.clone(), (j - 1 - len) as usize)
                    }
                }
            };
            // Beyond the head, index j = len + 1 + t carries |last| tau^t.
            let (h2, t2, l2) = (head.clone(), tau.clone(), last.clone());
            let tail_sq: TailFn = Arc::new(move |n| {
                let m = (n + 1).max(2);
                let head_part: BigRational =
                    h2.iter().zip(2u64..).filter(|(_, j)| *j >= m).map(|(c, _)| c * c).sum();
                let t0 = (m.saturating_sub(len + 1)).max(1);
                head_part + &l2 * &l2 * pow_capped(&t2, 2 * t0) / (BigRational::one() - &t2 * &t2)
            });
            let (h3, t3, l3) = (head, tau, last);
            let tail_abs: TailFn = Arc::new(move |n| {
                let m = (n + 1).max(2);
                let head_part: BigRational = h3.iter().zip(2u64..).filter(|(_, j)| *j >= m).map(|(c, _)| c.abs()).sum();
                let t0 = (m.saturating_sub(len + 1)).max(1);
                head_part + &l3 * pow_capped(&t3, t0) / (BigRational::one() - &t3)
            });
            Ok(HubRow { coeff: Arc::new(coeff), tail_sq, tail_abs })
        }
    }
}

fn markov_line(weights: &MarkovWeights, mode: ScalarMode) -> Result<EvolutionStructure> {
    let hub = markov_hub(weights)?;
    let row_hub = hub.clone();
    let rows: RowFn = Arc::new(move |i: VertexId| match i.get() {
        1 => row_hub.row(mode),
        i => unit_entries(&[i + 1], mode),
    });
    let coeff = hub.coeff.clone();
    let cols: RowFn = Arc::new(move |k: VertexId| match k.get() {
        1 => Row::empty(),
        2 => Row::Finite(vec![exact_entry(1, coeff(2), mode)]),
        k => {
            let mut col = Vec::new();
            let c = coeff(k);
            if !c.is_zero() {
                col.push(exact_entry(1, c, mode));
            }
            col.push((v(k - 1), Scalar::one(mode)));
            Row::Finite(col)
        }
    });
    let meta = FamilyMeta {
        cycle_free: Some(true),
        depth_oracle: Some(constant_depth(Depth::Infinite)),
        sup_depth: Some(Depth::Infinite),
        locally_finite: Some(false),
        all_depths_finite: Some(false),
        ..FamilyMeta::default()
    };
    Ok(EvolutionStructure::new(mode, Universe::Infinite, rows).with_columns(cols).with_meta(meta))
}

// ------------------------------------------------------------ alternating lines

/// Column access for structures whose in-edges to `k` can only come from a
/// known finite candidate set.
fn columns_from_candidates(
    rows: RowFn,
    candidates: impl Fn(u64) -> Vec<u64> + Send + Sync + 'static,
) -> RowFn {
    Arc::new(move |k: VertexId| {
        let mut col: Vec<Entry> = Vec::new();
        let mut cands = candidates(k.get());
        cands.sort_unstable();
        cands.dedup();
        for i in cands.into_iter().filter(|&i| i >= 1) {
            if let Some((_, w)) = rows(v(i)).into_entries().take_while(|(t, _)| *t <= k).find(|(t, _)| *t == k) {
                col.push((v(i), w));
            }
        }
        Row::Finite(col)
    })
}

fn near(k: u64, below: u64, above: u64) -> Vec<u64> {
    (k.saturating_sub(below)..=k.saturating_add(above)).collect()
}

fn alt_line_b(mode: ScalarMode) -> EvolutionStructure {
    let rows: RowFn = Arc::new(move |i: VertexId| {
        let i = i.get();
        if i % 2 == 1 {
            unit_entries(&[i + 1, i + 2], mode)
        } else {
            unit_entries(&[i, i + 1], mode)
        }
    });
    let cols = columns_from_candidates(rows.clone(), |k| near(k, 2, 0));
    let meta = FamilyMeta {
        cycle_free: Some(false),
        depth_oracle: Some(constant_depth(Depth::Infinite)),
        sup_depth: Some(Depth::Infinite),
        locally_finite: Some(true),
        all_depths_finite: Some(false),
        ..FamilyMeta::default()
    };
    EvolutionStructure::new(mode, Universe::Infinite, rows).with_columns(cols).with_meta(meta)
}

/// `(target, sign)` pattern of `f̃_i²` in the rebased alternating line; every
/// coefficient has magnitude `1/√2`.
fn alt_line_c0_pattern(i: u64) -> [(u64, i64); 4] {
    if i % 2 == 1 {
        [(i, 1), (i + 1, 1), (i + 2, 1), (i + 3, -1)]
    } else {
        [(i - 1, 1), (i, 1), (i + 1, 1), (i + 2, -1)]
    }
}

/// Exact signed-square form of the rebased alternating-line constants:
/// `±1/2` at `k` stands for the coefficient `±1/√2` of `f̃_k` in `f̃_i²`.
pub fn alt_line_c0_signed_squares(i: VertexId) -> BTreeMap<VertexId, BigRational> {
    alt_line_c0_pattern(i.get()).iter().map(|&(k, s)| (v(k), rational(s, 2))).collect()
}

fn alt_line_c0() -> EvolutionStructure {
    let w = std::f64::consts::FRAC_1_SQRT_2;
    let rows: RowFn = Arc::new(move |i: VertexId| {
        Row::Finite(
            alt_line_c0_pattern(i.get()).iter().map(|&(k, s)| (v(k), Scalar::from_f64(s as f64 * w))).collect(),
        )
    });
    let cols = columns_from_candidates(rows.clone(), |k| near(k, 3, 1));
    let meta = FamilyMeta {
        cycle_free: Some(false),
        depth_oracle: Some(constant_depth(Depth::Infinite)),
        sup_depth: Some(Depth::Infinite),
        locally_finite: Some(true),
        all_depths_finite: Some(false),
        ..FamilyMeta::default()
    };
    EvolutionStructure::new(ScalarMode::Float, Universe::Infinite, rows).with_columns(cols).with_meta(meta)
}

/// `f_i = e_i + e_{i+1}` (odd), `f_i = e_i − e_{i−1}` (even), with inverse
/// `e_i = (f_i − f_{i+1})/2` (odd), `e_i = (f_i + f_{i−1})/2` (even).
pub fn alt_line_transform(mode: ScalarMode) -> BasisTransform {
    let forward = Arc::new(move |i: VertexId| {
        let i = i.get();
        let e = if i % 2 == 1 {
            Element::rational(&[(i, (1, 1)), (i + 1, (1, 1))])
        } else {
            Element::rational(&[(i, (1, 1)), (i - 1, (-1, 1))])
        };
        e.to_mode(mode)
    });
    let inverse = Arc::new(move |i: VertexId| {
        let i = i.get();
        let e = if i % 2 == 1 {
            Element::rational(&[(i, (1, 2)), (i + 1, (-1, 2))])
        } else {
            Element::rational(&[(i, (1, 2)), (i - 1, (1, 2))])
        };
        e.to_mode(mode)
    });
    BasisTransform::new(forward, inverse, 1)
}

// ------------------------------------------------------------------ hub line

fn hub_alpha(alpha: &HubAlpha) -> Result<HubRow> {
    let (HubAlpha::Geometric { ratio } | HubAlpha::Paired { ratio } | HubAlpha::Antipaired { ratio }) = alpha;
    check_ratio("hub_line", ratio)?;
    let rho = ratio.clone();
    let one = BigRational::one();
    match alpha {
        HubAlpha::Geometric { .. } => {
            let (r1, r2, r3) = (rho.clone(), rho.clone(), rho);
            Ok(HubRow {
                coeff: Arc::new(move |j| num_traits::pow(r1.clone(), (j - 1) as usize)),
                tail_sq: Arc::new({
                    let one = one.clone();
                    move |n| {
                        let m = (n + 1).max(2);
                        pow_capped(&r2, 2 * (m - 1)) / (&one - &r2 * &r2)
                    }
                }),
                tail_abs: Arc::new(move |n| {
                    let m = (n + 1).max(2);
                    pow_capped(&r3, m - 1) / (&one - &r3)
                }),
            })
        }
        HubAlpha::Paired { .. } | HubAlpha::Antipaired { .. } => {
            let flip = matches!(alpha, HubAlpha::Antipaired { .. });
            let (r1, r2, r3) = (rho.clone(), rho.clone(), rho);
            let two = BigRational::from_integer(2.into());
            let two2 = two.clone();
            Ok(HubRow {
                coeff: Arc::new(move |j| {
                    let c = num_traits::pow(r1.clone(), (j / 2) as usize);
                    if flip && j % 2 == 1 {
                        -c
                    } else {
                        c
                    }
                }),
                // each power ratio^l appears at most twice from index m on
                tail_sq: Arc::new({
                    let one = one.clone();
                    move |n| {
                        let m = (n + 1).max(2);
                        &two * pow_capped(&r2, 2 * (m / 2)) / (&one - &r2 * &r2)
                    }
                }),
                tail_abs: Arc::new(move |n| {
                    let m = (n + 1).max(2);
                    &two2 * pow_capped(&r3, m / 2) / (&one - &r3)
                }),
            })
        }
    }
}

fn hub_line(alpha: &HubAlpha, mode: ScalarMode) -> Result<EvolutionStructure> {
    let hub = hub_alpha(alpha)?;
    let rows: RowFn = Arc::new(move |i: VertexId| match i.get() {
        1 => hub.row(mode),
        i if i % 2 == 1 => unit_entries(&[i - 1, i], mode),
        i => unit_entries(&[i, i + 1], mode),
    });
    let cols = columns_from_candidates(rows.clone(), |k| {
        let mut c = near(k, 1, 1);
        c.push(1);
        c
    });
    let meta = FamilyMeta {
        cycle_free: Some(false),
        depth_oracle: Some(constant_depth(Depth::Infinite)),
        sup_depth: Some(Depth::Infinite),
        locally_finite: Some(false),
        all_depths_finite: Some(false),
        ..FamilyMeta::default()
    };
    Ok(EvolutionStructure::new(mode, Universe::Infinite, rows).with_columns(cols).with_meta(meta))
}

/// `f_1 = e_1`, `f_i = e_i + e_{i−1}` (odd `i >= 3`), `f_i = e_i − e_{i+1}`
/// (even), with inverse `e_i = (f_i − f_{i−1})/2` (odd `i >= 3`),
/// `e_i = (f_i + f_{i+1})/2` (even).
pub fn hub_line_transform(mode: ScalarMode) -> BasisTransform {
    let forward = Arc::new(move |i: VertexId| {
        let e = match i.get() {
            1 => Element::rational(&[(1, (1, 1))]),
            i if i % 2 == 1 => Element::rational(&[(i, (1, 1)), (i - 1, (1, 1))]),
            i => Element::rational(&[(i, (1, 1)), (i + 1, (-1, 1))]),
        };
        e.to_mode(mode)
    });
    let inverse = Arc::new(move |i: VertexId| {
        let e = match i.get() {
            1 => Element::rational(&[(1, (1, 1))]),
            i if i % 2 == 1 => Element::rational(&[(i, (1, 2)), (i - 1, (-1, 2))]),
            i => Element::rational(&[(i, (1, 2)), (i + 1, (1, 2))]),
        };
        e.to_mode(mode)
    });
    BasisTransform::new(forward, inverse, 1)
}

// ---------------------------------------------------------------------- comb

/// Comb layout: vertex 1 is the leftmost spacer; block `b >= 0` has hub
/// `2+4b`, tooth middle `3+4b`, tooth top `4+4b` and right spacer `5+4b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombVertex {
    Spacer,
    Hub,
    Middle,
    Top,
}

pub fn comb_vertex(i: VertexId) -> CombVertex {
    match i.get() % 4 {
        1 => CombVertex::Spacer,
        2 => CombVertex::Hub,
        3 => CombVertex::Middle,
        _ => CombVertex::Top,
    }
}

fn comb_depth(i: VertexId) -> Depth {
    Depth::Finite(match comb_vertex(i) {
        CombVertex::Hub => 2,
        CombVertex::Middle => 1,
        CombVertex::Spacer | CombVertex::Top => 0,
    })
}

fn comb(mode: ScalarMode) -> EvolutionStructure {
    let rows: RowFn = Arc::new(move |i: VertexId| {
        let i = i.get();
        match comb_vertex(v(i)) {
            CombVertex::Hub => unit_entries(&[i - 1, i + 1, i + 3], mode),
            CombVertex::Middle => unit_entries(&[i + 1], mode),
            CombVertex::Spacer | CombVertex::Top => Row::empty(),
        }
    });
    let cols = columns_from_candidates(rows.clone(), |k| near(k, 3, 1));
    let meta = FamilyMeta {
        cycle_free: Some(true),
        depth_oracle: Some(Arc::new(comb_depth)),
        sup_depth: Some(Depth::Finite(2)),
        locally_finite: Some(true),
        all_depths_finite: Some(true),
        generation_window: Some(5),
        ..FamilyMeta::default()
    };
    EvolutionStructure::new(mode, Universe::Infinite, rows).with_columns(cols).with_meta(meta)
}

// ------------------------------------------------------------- growing teeth

/// Growing-teeth layout: vertex 1 is the leftmost spacer; block `k >= 1`
/// starts at hub `s_k`, followed by its tooth `s_k+1 ..= s_k+k` (a chain
/// ending in a sink) and the right spacer `s_k+k+1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TeethVertex {
    Spacer,
    Hub { k: u64 },
    /// `j`-th tooth vertex above hub `k`, `1 <= j <= k`.
    Tooth { k: u64, j: u64 },
}

/// First vertex (the hub) of block `k`.
pub fn teeth_hub(k: u64) -> VertexId {
    v(2 + (k - 1) * k / 2 + 2 * (k - 1))
}

pub fn teeth_vertex(i: VertexId) -> TeethVertex {
    let i = i.get();
    if i == 1 {
        return TeethVertex::Spacer;
    }
    // blocks have size k + 2; solve s_k <= i by a float guess and correct
    let mut k = ((((2 * i) as f64 + 6.25).sqrt() - 2.5).floor() as u64).max(1);
    while k > 1 && teeth_hub(k).get() > i {
        k -= 1;
    }
    while teeth_hub(k + 1).get() <= i {
        k += 1;
    }
    let off = i - teeth_hub(k).get();
    match off {
        0 => TeethVertex::Hub { k },
        j if j <= k => TeethVertex::Tooth { k, j },
        _ => TeethVertex::Spacer,
    }
}

fn teeth_depth(i: VertexId) -> Depth {
    Depth::Finite(match teeth_vertex(i) {
        TeethVertex::Spacer => 0,
        TeethVertex::Hub { k } => k,
        TeethVertex::Tooth { k, j } => k - j,
    })
}

fn growing_teeth(mode: ScalarMode) -> EvolutionStructure {
    let rows: RowFn = Arc::new(move |i: VertexId| {
        let n = i.get();
        match teeth_vertex(i) {
            TeethVertex::Hub { k } => unit_entries(&[n - 1, n + 1, n + k + 1], mode),
            TeethVertex::Tooth { k, j } if j < k => unit_entries(&[n + 1], mode),
            _ => Row::empty(),
        }
    });
    let cols: RowFn = Arc::new(move |c: VertexId| {
        let n = c.get();
        let sources: Vec<u64> = match teeth_vertex(c) {
            TeethVertex::Hub { .. } => vec![],
            TeethVertex::Tooth { k, j } => vec![if j == 1 { teeth_hub(k).get() } else { n - 1 }],
            TeethVertex::Spacer if n == 1 => vec![2],
            TeethVertex::Spacer => match teeth_vertex(v(n - 1)) {
                TeethVertex::Tooth { k, .. } => vec![teeth_hub(k).get(), n + 1],
                _ => vec![n + 1],
            },
        };
        unit_entries(&sources, mode)
    });
    let meta = FamilyMeta {
        cycle_free: Some(true),
        depth_oracle: Some(Arc::new(teeth_depth)),
        sup_depth: Some(Depth::Infinite),
        locally_finite: Some(true),
        all_depths_finite: Some(true),
        ..FamilyMeta::default()
    };
    EvolutionStructure::new(mode, Universe::Infinite, rows).with_columns(cols).with_meta(meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{enumerate_row, Direction, DegreeCount, degree};

    fn targets(s: &EvolutionStructure, i: u64) -> Vec<u64> {
        enumerate_row(s, v(i), 16).0.into_iter().map(|(k, _)| k.get()).collect()
    }

    #[test]
    fn tree_root_has_r_children() {
        let s = build_family(&FamilySpec::rary_tree(2)).unwrap();
        assert_eq!(targets(&s, 1), vec![2, 3]);
        assert_eq!(targets(&s, 3), vec![6, 7]);
        let s3 = build_family(&FamilySpec::rary_tree(3)).unwrap();
        assert_eq!(targets(&s3, 2), vec![5, 6, 7]);
        assert_eq!(degree(&s3, v(40), Direction::Out, 10).unwrap(), DegreeCount::Exact(3));
    }

    #[test]
    fn tree_labels_round_trip() {
        assert_eq!(tree_label(2, v(1)).as_deref(), Some("1"));
        assert_eq!(tree_label(2, v(2)).as_deref(), Some("11"));
        assert_eq!(tree_label(2, v(3)).as_deref(), Some("12"));
        assert_eq!(tree_label(2, v(6)).as_deref(), Some("121"));
        for r in 2..=4 {
            for i in 1..200 {
                let label = tree_label(r, v(i)).unwrap();
                assert_eq!(tree_vertex(r, &label), Some(v(i)));
            }
        }
        assert_eq!(tree_vertex(2, "13"), None);
    }

    #[test]
    fn geometric_tree_weights() {
        let spec = FamilySpec::RaryTree { r: 2, weights: TreeWeights::Geometric { ratio: half() }, mode: ScalarMode::Exact };
        let s = build_family(&spec).unwrap();
        let row = enumerate_row(&s, v(1), 4).0;
        assert_eq!(row, vec![(v(2), Scalar::ratio(1, 2)), (v(3), Scalar::ratio(1, 4))]);
    }

    #[test]
    fn parameter_validation() {
        assert!(matches!(build_family(&FamilySpec::rary_tree(1)), Err(Error::InvalidParams(_))));
        let bad = FamilySpec::MarkovLine { weights: MarkovWeights::Geometric { ratio: rational(3, 2) }, mode: ScalarMode::Exact };
        assert!(matches!(build_family(&bad), Err(Error::InvalidParams(_))));
        let zero = FamilySpec::MarkovLine {
            weights: MarkovWeights::Custom { head: vec![half(), BigRational::zero()], tail_ratio: half() },
            mode: ScalarMode::Exact,
        };
        assert!(matches!(build_family(&zero), Err(Error::InvalidParams(_))));
        let short = FamilySpec::RaryTree { r: 3, weights: TreeWeights::Custom { weights: vec![half()] }, mode: ScalarMode::Exact };
        assert!(matches!(build_family(&short), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn markov_hub_row_prefix() {
        let s = build_family(&FamilySpec::markov_line()).unwrap();
        let (row, exhausted) = enumerate_row(&s, v(1), 3);
        assert_eq!(row, vec![(v(2), Scalar::ratio(1, 2)), (v(3), Scalar::ratio(1, 4)), (v(4), Scalar::ratio(1, 8))]);
        assert!(!exhausted);
        assert_eq!(targets(&s, 7), vec![8]);
    }

    #[test]
    fn markov_custom_head_and_tail() {
        let spec = FamilySpec::MarkovLine {
            weights: MarkovWeights::Custom { head: vec![rational(1, 3), rational(1, 3)], tail_ratio: half() },
            mode: ScalarMode::Exact,
        };
        let s = build_family(&spec).unwrap();
        let row: Vec<_> = enumerate_row(&s, v(1), 4).0.into_iter().map(|(_, w)| w).collect();
        assert_eq!(row, vec![Scalar::ratio(1, 3), Scalar::ratio(1, 3), Scalar::ratio(1, 6), Scalar::ratio(1, 12)]);
        // brute-force the square tail past index 3 to high precision
        let tail = s.row_of(v(1)).tail_sq_at(3).unwrap();
        let brute: BigRational = (4..200).map(|j| {
            let c = rational(1, 3) * num_traits::pow(half(), (j - 3) as usize);
            &c * &c
        }).sum();
        assert!(tail >= brute);
        assert!(&tail - &brute < rational(1, 1_000_000));
    }

    #[test]
    fn geometric_tail_bounds_dominate_partial_sums() {
        for spec in [
            FamilySpec::markov_line(),
            FamilySpec::hub_line(HubAlpha::Geometric { ratio: rational(2, 3) }),
            FamilySpec::hub_line(HubAlpha::Paired { ratio: half() }),
            FamilySpec::hub_line(HubAlpha::Antipaired { ratio: rational(1, 3) }),
        ] {
            let s = build_family(&spec).unwrap();
            for n in [1u64, 2, 3, 6, 11] {
                let row = s.row_of(v(1));
                let tsq = row.tail_sq().unwrap()(n);
                let tabs = row.tail_abs().unwrap()(n);
                let (entries, _) = enumerate_row(&s, v(1), 120);
                let mut sq = BigRational::zero();
                let mut ab = BigRational::zero();
                for (k, w) in entries.iter().filter(|(k, _)| k.get() > n) {
                    let _ = k;
                    let c = w.as_exact_real().unwrap();
                    sq += c * c;
                    ab += c.abs();
                }
                assert!(tsq >= sq, "{} square tail at {n}", spec.name());
                assert!(tabs >= ab, "{} abs tail at {n}", spec.name());
            }
        }
    }

    #[test]
    fn alt_line_rows() {
        let s = build_family(&FamilySpec::alt_line_b()).unwrap();
        assert_eq!(targets(&s, 1), vec![2, 3]);
        assert_eq!(targets(&s, 2), vec![2, 3]);
        assert_eq!(targets(&s, 5), vec![6, 7]);
        let c0 = build_family(&FamilySpec::alt_line_c0()).unwrap();
        assert_eq!(targets(&c0, 1), vec![1, 2, 3, 4]);
        assert_eq!(targets(&c0, 4), vec![3, 4, 5, 6]);
    }

    #[test]
    fn comb_hub_edges() {
        let s = build_family(&FamilySpec::comb()).unwrap();
        assert_eq!(targets(&s, 2), vec![1, 3, 5]);
        assert_eq!(targets(&s, 6), vec![5, 7, 9]);
        assert_eq!(targets(&s, 3), vec![4]);
        assert!(targets(&s, 4).is_empty());
        assert!(targets(&s, 5).is_empty());
    }

    #[test]
    fn teeth_layout() {
        assert_eq!(teeth_hub(1), v(2));
        assert_eq!(teeth_hub(2), v(5));
        assert_eq!(teeth_hub(3), v(9));
        let s = build_family(&FamilySpec::growing_teeth()).unwrap();
        assert_eq!(targets(&s, 2), vec![1, 3, 4]);
        assert_eq!(targets(&s, 5), vec![4, 6, 8]);
        assert_eq!(targets(&s, 6), vec![7]);
        assert!(targets(&s, 7).is_empty());
        for k in 1..40 {
            let h = teeth_hub(k);
            assert_eq!(teeth_vertex(h), TeethVertex::Hub { k });
            assert_eq!(teeth_vertex(v(h.get() + k)), TeethVertex::Tooth { k, j: k });
            assert_eq!(teeth_vertex(v(h.get() + k + 1)), TeethVertex::Spacer);
        }
    }

    #[test]
    fn depth_oracles() {
        assert_eq!(family_depth_oracle(&FamilySpec::growing_teeth(), teeth_hub(3)), Ok(Depth::Finite(3)));
        assert_eq!(family_depth_oracle(&FamilySpec::comb(), v(4)), Ok(Depth::Finite(0)));
        assert_eq!(family_depth_oracle(&FamilySpec::markov_line(), v(2)), Ok(Depth::Infinite));
        let finite = EvolutionStructure::finite_rational(1, &[]).unwrap();
        assert_eq!(family_depth_oracle(finite.spec().unwrap(), v(1)), Err(Error::OracleUnavailable));
    }

    #[test]
    fn spec_json_round_trip() {
        for spec in [
            FamilySpec::comb(),
            FamilySpec::markov_line(),
            FamilySpec::rary_tree(3),
            FamilySpec::alt_line_b(),
            FamilySpec::alt_line_c0(),
            FamilySpec::hub_line(HubAlpha::Paired { ratio: half() }),
            FamilySpec::growing_teeth().with_mode(ScalarMode::Float),
        ] {
            let json = spec.to_json();
            assert_eq!(FamilySpec::from_json(&json).unwrap(), spec, "{json}");
        }
        assert_eq!(FamilySpec::from_json(&json!({"family": "comb"})).unwrap(), FamilySpec::comb());
        assert_eq!(
            FamilySpec::from_json(&json!({"family": "alt_line_B"})).unwrap(),
            FamilySpec::alt_line_b()
        );
        assert!(FamilySpec::from_json(&json!({"family": "nope"})).is_err());
    }

    #[test]
    fn explicit_rows_json() {
        let v = json!({"mode": "exact", "universe": "finite:2", "rows": {"1": [[2, "1/1"]]}});
        let rows = ExplicitRows::from_json(&v).unwrap();
        assert_eq!(rows.n, 2);
        assert_eq!(rows.rows[&1], vec![(2, Scalar::integer(1))]);
        assert_eq!(ExplicitRows::from_json(&rows.to_json()).unwrap(), rows);
        let f = json!({"mode": "float", "universe": "finite:2", "rows": {"2": [[1, 0.5], [2, [1.0, -2.0]]]}});
        let rows = ExplicitRows::from_json(&f).unwrap();
        assert_eq!(rows.rows[&2][1].1, Scalar::complex_f64(1.0, -2.0));
        assert!(ExplicitRows::from_json(&json!({"universe": "infinite"})).is_err());
    }
}
