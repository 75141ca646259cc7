//! Lazy, possibly infinite weighted digraphs of structural constants.
//!
//! A structure is a universe of vertices `1..=n` (or all of ℕ) plus a pure
//! row accessor: `row_of(i)` lists the nonzero constants `ω_ik` of `e_i²` in
//! strictly increasing `k`. Infinite rows are lazy iterators and may carry
//! analytic tail bounds. Structures are immutable and cheap to clone.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{ExplicitRows, FamilySpec};
use crate::scalar::{Scalar, ScalarMode};

/// A basis index / vertex of the associated digraph. Always `>= 1`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct VertexId(u64);

impl VertexId {
    /// Panics when `index == 0`.
    pub fn new(index: u64) -> Self {
        assert!(index >= 1, "vertex ids are 1-based");
        VertexId(index)
    }

    pub fn try_new(index: u64) -> Option<Self> {
        (index >= 1).then_some(VertexId(index))
    }

    pub const fn get(self) -> u64 {
        self.0
    }
}

impl TryFrom<u64> for VertexId {
    type Error = String;
    fn try_from(value: u64) -> std::result::Result<Self, String> {
        VertexId::try_new(value).ok_or_else(|| "vertex ids start at 1".to_string())
    }
}

impl From<VertexId> for u64 {
    fn from(v: VertexId) -> u64 {
        v.0
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type Entry = (VertexId, Scalar);

/// Exact upper bound on a tail sum, as a function of the cutoff `N`
/// (the sum runs over indices `> N`). Must be nonincreasing in `N`.
pub type TailFn = Arc<dyn Fn(u64) -> BigRational + Send + Sync>;

pub type RowFn = Arc<dyn Fn(VertexId) -> Row + Send + Sync>;

/// `(source, [(target, (num, den))])`.
pub type RationalRow<'a> = (u64, &'a [(u64, (i64, i64))]);

pub type DepthOracle = Arc<dyn Fn(VertexId) -> Depth + Send + Sync>;

/// One row (or column) of the weighted adjacency matrix.
pub enum Row {
    Finite(Vec<Entry>),
    Lazy {
        entries: Box<dyn Iterator<Item = Entry> + Send>,
        /// Bound on `Σ_{k>N} |ω_ik|²`.
        tail_sq: Option<TailFn>,
        /// Bound on `Σ_{k>N} |ω_ik|`.
        tail_abs: Option<TailFn>,
    },
}

impl Row {
    pub fn empty() -> Self {
        Row::Finite(Vec::new())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Row::Finite(_))
    }

    pub fn tail_sq(&self) -> Option<&TailFn> {
        match self {
            Row::Finite(_) => None,
            Row::Lazy { tail_sq, .. } => tail_sq.as_ref(),
        }
    }

    pub fn tail_abs(&self) -> Option<&TailFn> {
        match self {
            Row::Finite(_) => None,
            Row::Lazy { tail_abs, .. } => tail_abs.as_ref(),
        }
    }

    /// Square-tail bound at `cutoff`; zero for finite rows.
    pub fn tail_sq_at(&self, cutoff: u64) -> Option<BigRational> {
        match self {
            Row::Finite(_) => Some(BigRational::zero()),
            Row::Lazy { tail_sq, .. } => tail_sq.as_ref().map(|f| f(cutoff)),
        }
    }

    pub fn into_entries(self) -> Box<dyn Iterator<Item = Entry> + Send> {
        match self {
            Row::Finite(v) => Box::new(v.into_iter()),
            Row::Lazy { entries, .. } => entries,
        }
    }

    /// Splits off the entries with index `<= cutoff`, keeping the tail
    /// bounds. Relies on the strictly increasing order of the enumeration.
    pub fn split_at_cutoff(self, cutoff: u64) -> (Vec<Entry>, Option<TailFn>, Option<TailFn>) {
        match self {
            Row::Finite(v) => (v.into_iter().filter(|(k, _)| k.get() <= cutoff).collect(), None, None),
            Row::Lazy { entries, tail_sq, tail_abs } => (
                entries.take_while(|(k, _)| k.get() <= cutoff).collect(),
                tail_sq,
                tail_abs,
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "n")]
pub enum Universe {
    Finite(u64),
    Infinite,
}

impl Universe {
    pub fn contains(self, v: VertexId) -> bool {
        match self {
            Universe::Finite(n) => v.get() <= n,
            Universe::Infinite => true,
        }
    }

    /// Clamps a window to the universe.
    pub fn clamp(self, window: u64) -> u64 {
        match self {
            Universe::Finite(n) => window.min(n),
            Universe::Infinite => window,
        }
    }
}

/// A depth value, `∞` included.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Depth {
    Finite(u64),
    Infinite,
}

/// Analytic facts a family builder knows about its structure. Every claim
/// here is checked against budgeted search in the test suite.
#[derive(Clone, Default)]
pub struct FamilyMeta {
    pub cycle_free: Option<bool>,
    pub depth_oracle: Option<DepthOracle>,
    pub sup_depth: Option<Depth>,
    pub locally_finite: Option<bool>,
    /// Every vertex has finite depth (needed when `sup_depth` is infinite).
    pub all_depths_finite: Option<bool>,
    /// `W` such that `D^m(ℕ) ≠ ∅` iff `D^m({1..W}) ≠ ∅` for every `m`.
    pub generation_window: Option<u64>,
    /// Bound on `Σ_{i>N} Σ_k |ω_ik|²`.
    pub frobenius_tail_sq: Option<TailFn>,
}

impl FamilyMeta {
    pub fn depth_of(&self, v: VertexId) -> Option<Depth> {
        self.depth_oracle.as_ref().map(|f| f(v))
    }
}

impl fmt::Debug for FamilyMeta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FamilyMeta")
            .field("cycle_free", &self.cycle_free)
            .field("depth_oracle", &self.depth_oracle.is_some())
            .field("sup_depth", &self.sup_depth)
            .field("locally_finite", &self.locally_finite)
            .field("all_depths_finite", &self.all_depths_finite)
            .field("generation_window", &self.generation_window)
            .finish()
    }
}

/// The weighted digraph `G(A, B)` of an evolution algebra in its natural
/// orthonormal basis.
#[derive(Clone)]
pub struct EvolutionStructure {
    mode: ScalarMode,
    universe: Universe,
    rows: RowFn,
    columns: Option<RowFn>,
    meta: Option<FamilyMeta>,
    spec: Option<FamilySpec>,
}

impl fmt::Debug for EvolutionStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EvolutionStructure")
            .field("mode", &self.mode)
            .field("universe", &self.universe)
            .field("columns", &self.columns.is_some())
            .field("meta", &self.meta)
            .field("spec", &self.spec.as_ref().map(FamilySpec::name))
            .finish()
    }
}

impl EvolutionStructure {
    pub fn new(mode: ScalarMode, universe: Universe, rows: RowFn) -> Self {
        EvolutionStructure { mode, universe, rows, columns: None, meta: None, spec: None }
    }

    pub fn with_columns(mut self, columns: RowFn) -> Self {
        self.columns = Some(columns);
        self
    }

    pub fn with_meta(mut self, meta: FamilyMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn with_spec(mut self, spec: FamilySpec) -> Self {
        self.spec = Some(spec);
        self
    }

    /// Finite structure from explicit rows; validates and derives columns.
    pub fn finite(explicit: ExplicitRows) -> Result<Self> {
        let n = explicit.n;
        let mode = explicit.mode;
        let mut rows: BTreeMap<u64, Vec<Entry>> = BTreeMap::new();
        let mut cols: BTreeMap<u64, Vec<Entry>> = BTreeMap::new();
        for (&i, entries) in &explicit.rows {
            if i == 0 || i > n {
                return Err(Error::Validation(format!("row {i} outside universe 1..={n}")));
            }
            let mut row: Vec<Entry> = Vec::with_capacity(entries.len());
            for (k, w) in entries {
                if *k == 0 || *k > n {
                    return Err(Error::Validation(format!(
                        "row {i} references vertex {k} outside universe 1..={n}"
                    )));
                }
                if w.is_zero() {
                    return Err(Error::Validation(format!("zero weight on edge ({i}, {k})")));
                }
                row.push((VertexId::new(*k), w.to_mode(mode)));
            }
            row.sort_by_key(|(k, _)| *k);
            if let Some(w) = row.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::Validation(format!("duplicate target {} in row {i}", w[0].0)));
            }
            for (k, w) in &row {
                cols.entry(k.get()).or_default().push((VertexId::new(i), w.clone()));
            }
            rows.insert(i, row);
        }
        let rows = Arc::new(rows);
        let cols = Arc::new(cols);
        let row_fn: RowFn = Arc::new(move |i: VertexId| {
            Row::Finite(rows.get(&i.get()).cloned().unwrap_or_default())
        });
        let col_fn: RowFn = Arc::new(move |k: VertexId| {
            Row::Finite(cols.get(&k.get()).cloned().unwrap_or_default())
        });
        let meta = FamilyMeta { locally_finite: Some(true), ..FamilyMeta::default() };
        Ok(EvolutionStructure::new(mode, Universe::Finite(n), row_fn)
            .with_columns(col_fn)
            .with_meta(meta)
            .with_spec(FamilySpec::FiniteExplicit(explicit)))
    }

    /// Convenience for tests and examples: exact rows given as
    /// `(source, [(target, (num, den))])`.
    pub fn finite_rational(n: u64, rows: &[RationalRow]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|(i, es)| (*i, es.iter().map(|(k, (p, q))| (*k, Scalar::ratio(*p, *q))).collect()))
            .collect();
        EvolutionStructure::finite(ExplicitRows { mode: ScalarMode::Exact, n, rows })
    }

    pub fn mode(&self) -> ScalarMode {
        self.mode
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn meta(&self) -> Option<&FamilyMeta> {
        self.meta.as_ref()
    }

    pub fn spec(&self) -> Option<&FamilySpec> {
        self.spec.as_ref()
    }

    pub fn has_columns(&self) -> bool {
        self.columns.is_some()
    }

    /// Row `i`; vertices outside the universe have empty rows.
    pub fn row_of(&self, i: VertexId) -> Row {
        if !self.universe.contains(i) {
            return Row::empty();
        }
        (self.rows)(i)
    }

    /// In-edges of `k` as `(source, ω_source,k)`, sorted by source.
    pub fn column_of(&self, k: VertexId) -> Result<Row> {
        let cols = self.columns.as_ref().ok_or(Error::NoColumnAccess)?;
        if !self.universe.contains(k) {
            return Ok(Row::empty());
        }
        Ok(cols(k))
    }

    /// Looks up `ω_ik` by scanning row `i` up to `k`.
    pub fn weight(&self, i: VertexId, k: VertexId) -> Option<Scalar> {
        self.row_of(i)
            .into_entries()
            .take_while(|(t, _)| *t <= k)
            .find(|(t, _)| *t == k)
            .map(|(_, w)| w)
    }

    pub fn depth_oracle(&self, v: VertexId) -> Option<Depth> {
        self.meta.as_ref().and_then(|m| m.depth_of(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_ids_are_one_based() {
        assert!(VertexId::try_new(0).is_none());
        assert_eq!(VertexId::new(3).get(), 3);
        let parsed: std::result::Result<VertexId, _> = serde_json::from_str("0");
        assert!(parsed.is_err());
    }

    #[test]
    fn finite_rows_are_validated() {
        let zero = EvolutionStructure::finite_rational(2, &[(1, &[(2, (0, 1))])]);
        assert!(matches!(zero, Err(Error::Validation(_))));
        let dup = EvolutionStructure::finite_rational(2, &[(1, &[(2, (1, 1)), (2, (2, 1))])]);
        assert!(matches!(dup, Err(Error::Validation(_))));
        let outside = EvolutionStructure::finite_rational(2, &[(1, &[(3, (1, 1))])]);
        assert!(matches!(outside, Err(Error::Validation(_))));
        let row_outside = EvolutionStructure::finite_rational(2, &[(5, &[(1, (1, 1))])]);
        assert!(matches!(row_outside, Err(Error::Validation(_))));
    }

    #[test]
    fn finite_rows_sort_and_derive_columns() {
        let s = EvolutionStructure::finite_rational(3, &[(1, &[(3, (1, 2)), (2, (1, 1))]), (2, &[(3, (5, 1))])])
            .unwrap();
        let row: Vec<_> = s.row_of(VertexId::new(1)).into_entries().map(|(k, _)| k.get()).collect();
        assert_eq!(row, vec![2, 3]);
        let col: Vec<_> = s
            .column_of(VertexId::new(3))
            .unwrap()
            .into_entries()
            .map(|(i, w)| (i.get(), w))
            .collect();
        assert_eq!(col, vec![(1, Scalar::ratio(1, 2)), (2, Scalar::integer(5))]);
        assert_eq!(s.weight(VertexId::new(2), VertexId::new(3)), Some(Scalar::integer(5)));
        assert_eq!(s.weight(VertexId::new(2), VertexId::new(1)), None);
        assert!(s.row_of(VertexId::new(9)).into_entries().next().is_none());
    }
}
