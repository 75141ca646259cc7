//! The ℓ² operators attached to a structure.
//!
//! `Ω δ_i` is row `i`; `Γ δ_i` is the conjugated column `i`; `A` and `B`
//! are the unweighted versions (`a_ik = 1` iff `ω_ik ≠ 0`). Norm bounds are
//! only ever certified from analytic tail information, never from partial
//! sums alone.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{line_combination, Element, Expansion};
use crate::error::{Error, Result};
use crate::scalar::{rational_to_f64, sqrt_upper, Real, Scalar, ScalarMode};
use crate::structure::{EvolutionStructure, Row, Universe, VertexId};

/// Entries scanned from an infinite row before falling back on its tail
/// bound in norm estimates.
const NORM_SCAN: u64 = 64;

/// Relative slack applied to float magnitudes when bracketing them.
const FLOAT_SLACK: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    /// `Ω`
    WeightedAdjacency,
    /// `Γ`, the formal adjoint of `Ω`
    WeightedAdjoint,
    /// `A`
    Adjacency,
    /// `B`, the transpose of `A`
    AdjacencyAdjoint,
}

impl OperatorKind {
    fn uses_columns(self) -> bool {
        matches!(self, OperatorKind::WeightedAdjoint | OperatorKind::AdjacencyAdjoint)
    }

    fn unweighted(self) -> bool {
        matches!(self, OperatorKind::Adjacency | OperatorKind::AdjacencyAdjoint)
    }
}

impl FromStr for OperatorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omega" | "weighted_adjacency" => Ok(OperatorKind::WeightedAdjacency),
            "gamma" | "weighted_adjoint" => Ok(OperatorKind::WeightedAdjoint),
            "adj" | "adjacency" => Ok(OperatorKind::Adjacency),
            "adjT" | "adjacency_adjoint" => Ok(OperatorKind::AdjacencyAdjoint),
            other => Err(Error::InvalidArgument(format!("unknown operator {other:?} (omega|gamma|adj|adjT)"))),
        }
    }
}

/// Applies an operator to a finite-support vector.
pub fn apply_operator(s: &EvolutionStructure, kind: OperatorKind, v: &Element, cutoff: Option<u64>) -> Result<Expansion> {
    let mode = s.mode();
    let fetch = |i: VertexId| -> Result<Row> {
        let line = if kind.uses_columns() { s.column_of(i)? } else { s.row_of(i) };
        // an infinite line of ones is never square-summable
        if kind.unweighted() && !line.is_finite() {
            return Err(Error::NoTailBound(i));
        }
        Ok(line)
    };
    let map = move |w: Scalar| -> Scalar {
        if kind.unweighted() {
            Scalar::one(mode)
        } else if kind.uses_columns() {
            w.conj()
        } else {
            w
        }
    };
    line_combination(v, cutoff, fetch, map)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Row,
    Column,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Row => "row",
            Axis::Column => "column",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Summability {
    /// `Σ|ω|²` over the scanned entries, plus an analytic bound on the rest.
    FiniteCertified { sum: Real, tail: Real },
    /// Monotone lower evidence only.
    PartialSum { sum: Real, scanned_to: u64 },
}

fn line(s: &EvolutionStructure, axis: Axis, index: VertexId) -> Result<Row> {
    match axis {
        Axis::Row => Ok(s.row_of(index)),
        Axis::Column => s.column_of(index),
    }
}

fn sum_sq<'a>(mode: ScalarMode, ws: impl Iterator<Item = &'a Scalar>) -> Real {
    ws.fold(Real::zero(mode), |acc, w| &acc + &w.norm_sqr())
}

/// Square-summability of one row or column.
pub fn summability_check(s: &EvolutionStructure, axis: Axis, index: VertexId, window: u64) -> Result<Summability> {
    let mode = s.mode();
    match line(s, axis, index)? {
        Row::Finite(entries) => Ok(Summability::FiniteCertified {
            sum: sum_sq(mode, entries.iter().map(|(_, w)| w)),
            tail: Real::zero(mode),
        }),
        lazy => {
            let tail = lazy.tail_sq().cloned();
            let (entries, _, _) = lazy.split_at_cutoff(window);
            let sum = sum_sq(mode, entries.iter().map(|(_, w)| w));
            Ok(match tail {
                Some(t) => Summability::FiniteCertified { sum, tail: real_in_mode(t(window), mode) },
                None => Summability::PartialSum { sum, scanned_to: window },
            })
        }
    }
}

fn real_in_mode(r: BigRational, mode: ScalarMode) -> Real {
    match mode {
        ScalarMode::Exact => Real::Exact(r),
        ScalarMode::Float => Real::Float(rational_to_f64(&r)),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum CertificateStatus {
    CertifiedOnWindowWithTails,
    RefutedAt { axis: Axis, index: VertexId },
    InconclusiveBudget,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CertificateKind {
    Frobenius,
    Schur { m1: BigRational, m2: BigRational },
}

/// A norm bound with the evidence behind it.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCertificate {
    pub kind: CertificateKind,
    /// Upper bound on `‖Ω‖` when certified; the candidate `sqrt(M1·M2)` for
    /// Schur certificates in any status.
    pub bound: Option<f64>,
    pub window: u64,
    pub status: CertificateStatus,
    /// Sum of all analytic tail bounds used.
    pub tail_used: f64,
    /// Squared Frobenius mass seen on the window (lower evidence).
    pub window_mass: Option<f64>,
}

impl BoundCertificate {
    pub fn is_certified(&self) -> bool {
        self.status == CertificateStatus::CertifiedOnWindowWithTails
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "kind": match self.kind { CertificateKind::Frobenius => "frobenius", CertificateKind::Schur { .. } => "schur" },
            "bound": self.bound,
            "window": self.window,
            "status": match &self.status {
                CertificateStatus::CertifiedOnWindowWithTails => "certified_on_window_with_tails",
                CertificateStatus::RefutedAt { .. } => "refuted_at",
                CertificateStatus::InconclusiveBudget => "inconclusive_budget",
            },
            "tail_used": self.tail_used,
        });
        if let CertificateKind::Schur { m1, m2 } = &self.kind {
            v["m1"] = json!(crate::scalar::format_rational(m1));
            v["m2"] = json!(crate::scalar::format_rational(m2));
        }
        if let CertificateStatus::RefutedAt { axis, index } = &self.status {
            v["refutation_index"] = json!(index.get());
            v["refutation_axis"] = json!(axis.to_string());
        }
        if let Some(m) = self.window_mass {
            v["window_mass"] = json!(m);
        }
        v
    }

    /// Human-readable summary.
    pub fn describe(&self) -> String {
        match (&self.kind, &self.status) {
            (_, CertificateStatus::CertifiedOnWindowWithTails) => {
                format!("norm bound {:.17} certified on window {}", self.bound.unwrap_or(f64::NAN), self.window)
            }
            (CertificateKind::Schur { .. }, CertificateStatus::RefutedAt { axis, index }) => format!(
                "Schur inequality fails at {axis} {index}: this refutes the supplied (alpha, beta, M1, M2) only; \
                 boundedness of the operator is undecided"
            ),
            (_, CertificateStatus::RefutedAt { axis, index }) => format!("refuted at {axis} {index}"),
            (_, CertificateStatus::InconclusiveBudget) => {
                format!("inconclusive on window {}: no analytic tail bound available", self.window)
            }
        }
    }
}

/// Frobenius bound `M = (Σ_i Σ_k |ω_ik|²)^{1/2}`.
pub fn frobenius_certificate(s: &EvolutionStructure, window: u64) -> BoundCertificate {
    let window = s.universe().clamp(window);
    let mut mass = BigRational::zero();
    let mut tails = BigRational::zero();
    let mut missing_tail = false;
    for i in 1..=window {
        match s.row_of(VertexId::new(i)) {
            Row::Finite(entries) => mass += exact_sq_upper(entries.iter().map(|(_, w)| w)),
            lazy => {
                let t = lazy.tail_sq().cloned();
                let (entries, _, _) = lazy.split_at_cutoff(window);
                mass += exact_sq_upper(entries.iter().map(|(_, w)| w));
                match t {
                    Some(t) => tails += t(window),
                    None => missing_tail = true,
                }
            }
        }
    }
    let rest = match (s.universe(), s.meta().and_then(|m| m.frobenius_tail_sq.clone())) {
        (Universe::Finite(_), _) => Some(BigRational::zero()),
        (Universe::Infinite, Some(t)) => Some(t(window)),
        (Universe::Infinite, None) => None,
    };
    let window_mass = Some(rational_to_f64(&mass));
    match rest {
        Some(rest) if !missing_tail => {
            let tail_total = &tails + &rest;
            BoundCertificate {
                kind: CertificateKind::Frobenius,
                bound: Some(sqrt_upper(&(&mass + &tail_total))),
                window,
                status: CertificateStatus::CertifiedOnWindowWithTails,
                tail_used: rational_to_f64(&tail_total),
                window_mass,
            }
        }
        _ => BoundCertificate {
            kind: CertificateKind::Frobenius,
            bound: None,
            window,
            status: CertificateStatus::InconclusiveBudget,
            tail_used: rational_to_f64(&tails),
            window_mass,
        },
    }
}

/// Exact `Σ|w|²` for exact weights; an inflated binary64 value otherwise.
fn exact_sq_upper<'a>(ws: impl Iterator<Item = &'a Scalar>) -> BigRational {
    ws.map(|w| match w.norm_sqr() {
        Real::Exact(r) => r,
        Real::Float(f) => BigRational::from_float(f * (1.0 + FLOAT_SLACK)).unwrap_or_else(BigRational::zero),
    })
    .sum()
}

/// Positive weight sequence for the Schur test.
#[derive(Clone)]
pub enum PositiveWeights {
    Constant(BigRational),
    /// `f(i)` together with a bound on `sup_i f(i)` when one is known.
    Sequence { f: Arc<dyn Fn(VertexId) -> BigRational + Send + Sync>, sup: Option<BigRational> },
}

impl fmt::Debug for PositiveWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PositiveWeights::Constant(c) => write!(f, "Constant({c})"),
            PositiveWeights::Sequence { sup, .. } => write!(f, "Sequence(sup = {sup:?})"),
        }
    }
}

impl PositiveWeights {
    pub fn at(&self, i: VertexId) -> BigRational {
        match self {
            PositiveWeights::Constant(c) => c.clone(),
            PositiveWeights::Sequence { f, .. } => f(i),
        }
    }

    pub fn sup(&self) -> Option<BigRational> {
        match self {
            PositiveWeights::Constant(c) => Some(c.clone()),
            PositiveWeights::Sequence { sup, .. } => sup.clone(),
        }
    }
}

/// Bracket `[lo, hi]` around `|w|`.
fn abs_bracket(w: &Scalar) -> (BigRational, BigRational) {
    if let Some(r) = w.as_exact_real() {
        let a = r.abs();
        return (a.clone(), a);
    }
    let f = w.to_complex_f64().norm();
    let lo = BigRational::from_float(f * (1.0 - FLOAT_SLACK)).unwrap_or_else(BigRational::zero);
    let hi = BigRational::from_float(f * (1.0 + FLOAT_SLACK)).unwrap_or_else(BigRational::zero);
    (lo, hi)
}

enum LineCheck {
    Holds,
    Violated,
    Unknown,
}

/// Checks `Σ_k |w_k| weight_k <= rhs` for one line, using the line's `|w|`
/// tail bound past `window` when the line is infinite.
fn check_line(line: Row, weights: &PositiveWeights, rhs: &BigRational, window: u64, tail_used: &mut BigRational) -> LineCheck {
    let (lazy_tail, entries) = match line {
        Row::Finite(entries) => (None, entries),
        lazy => {
            let t = lazy.tail_abs().cloned();
            let (entries, _, _) = lazy.split_at_cutoff(window);
            (Some(t), entries)
        }
    };
    let mut lo = BigRational::zero();
    let mut hi = BigRational::zero();
    for (k, w) in &entries {
        let (a, b) = abs_bracket(w);
        let wk = weights.at(*k);
        lo += &a * &wk;
        hi += &b * &wk;
    }
    if &lo > rhs {
        return LineCheck::Violated;
    }
    match lazy_tail {
        None => {}
        Some(None) => return LineCheck::Unknown,
        Some(Some(t)) => match weights.sup() {
            Some(sup) => {
                let extra = t(window) * sup;
                hi += &extra;
                *tail_used += extra;
            }
            None => return LineCheck::Unknown,
        },
    }
    if &hi <= rhs {
        LineCheck::Holds
    } else {
        LineCheck::Unknown
    }
}

/// Schur test: `Σ_k |ω_ik| α_k <= M1 β_i` for rows `i <= window` and
/// `Σ_i |ω_ik| β_i <= M2 α_k` for columns `k <= window` give
/// `‖Ω‖ <= sqrt(M1 M2)`. A refutation refutes the supplied certificate only.
pub fn schur_certificate(
    s: &EvolutionStructure,
    alpha: &PositiveWeights,
    beta: &PositiveWeights,
    m1: &BigRational,
    m2: &BigRational,
    window: u64,
) -> BoundCertificate {
    let window = s.universe().clamp(window);
    let mut tail_used = BigRational::zero();
    let mut status = CertificateStatus::CertifiedOnWindowWithTails;
    let note_unknown = |st: &mut CertificateStatus| {
        if *st == CertificateStatus::CertifiedOnWindowWithTails {
            *st = CertificateStatus::InconclusiveBudget;
        }
    };
    'scan: for axis in [Axis::Row, Axis::Column] {
        for i in 1..=window {
            let i = VertexId::new(i);
            let (weights, rhs) = match axis {
                Axis::Row => (alpha, m1 * beta.at(i)),
                Axis::Column => (beta, m2 * alpha.at(i)),
            };
            let Ok(l) = line(s, axis, i) else {
                note_unknown(&mut status);
                break;
            };
            match check_line(l, weights, &rhs, window, &mut tail_used) {
                LineCheck::Holds => {}
                LineCheck::Violated => {
                    status = CertificateStatus::RefutedAt { axis, index: i };
                    break 'scan;
                }
                LineCheck::Unknown => note_unknown(&mut status),
            }
        }
    }
    let product = m1 * m2;
    BoundCertificate {
        kind: CertificateKind::Schur { m1: m1.clone(), m2: m2.clone() },
        bound: (!product.is_negative()).then(|| sqrt_upper(&product)),
        window,
        status,
        tail_used: rational_to_f64(&tail_used),
        window_mass: None,
    }
}

/// `⟨Ω δ_i, v⟩ − ⟨δ_i, Γ v⟩`, with `Ω δ_i` read from row `i` and `Γ v` from
/// the columns of `supp(v)`.
pub fn adjoint_pairing_residual(s: &EvolutionStructure, i: VertexId, v: &Element) -> Result<Scalar> {
    let mode = s.mode();
    let mut lhs = Scalar::zero(mode);
    if let Some(max) = v.max_vertex() {
        for (k, w) in s.row_of(i).into_entries().take_while(|(k, _)| *k <= max) {
            if let Some(c) = v.get(k) {
                lhs = lhs + &w * &c.conj();
            }
        }
    }
    // (Γ v)_i = Σ_k v_k conj(ω_ik); ⟨δ_i, Γ v⟩ = conj((Γ v)_i)
    let mut gamma_i = Scalar::zero(mode);
    for (k, c) in v.iter() {
        let col = s.column_of(k)?;
        if let Some((_, w)) = col.into_entries().take_while(|(src, _)| *src <= i).find(|(src, _)| *src == i) {
            gamma_i = gamma_i + c * &w.conj();
        }
    }
    Ok(lhs - gamma_i.conj())
}

/// `‖e_i²‖²` as an exact upper bound.
fn row_norm_sq_upper(s: &EvolutionStructure, i: VertexId) -> Result<BigRational> {
    match s.row_of(i) {
        Row::Finite(entries) => Ok(exact_sq_upper(entries.iter().map(|(_, w)| w))),
        lazy => {
            let t = lazy.tail_sq().cloned().ok_or(Error::NoTailBound(i))?;
            let (entries, _, _) = lazy.split_at_cutoff(NORM_SCAN);
            Ok(exact_sq_upper(entries.iter().map(|(_, w)| w)) + t(NORM_SCAN))
        }
    }
}

/// Continuity constant `M_v = (Σ_i |v_i|² ‖e_i²‖²)^{1/2}` of `w ↦ v · w`.
pub fn left_mult_bound(s: &EvolutionStructure, v: &Element) -> Result<f64> {
    let mut total = BigRational::zero();
    for (i, c) in v.iter() {
        let cv = exact_sq_upper(std::iter::once(c));
        total += cv * row_norm_sq_upper(s, i)?;
    }
    Ok(sqrt_upper(&total))
}

/// Dense `n × n` window of an operator's matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowMatrix {
    pub n: usize,
    pub entries: Vec<Vec<Scalar>>,
}

impl WindowMatrix {
    pub fn get(&self, i: usize, k: usize) -> &Scalar {
        &self.entries[i - 1][k - 1]
    }

    pub fn conj_transpose(&self) -> WindowMatrix {
        let entries = (0..self.n).map(|i| (0..self.n).map(|k| self.entries[k][i].conj()).collect()).collect();
        WindowMatrix { n: self.n, entries }
    }

    /// Reorders rows and columns by `order` (1-based vertex ids).
    pub fn permuted(&self, order: &[VertexId]) -> WindowMatrix {
        let idx: Vec<usize> = order.iter().map(|v| v.get() as usize - 1).collect();
        let entries = idx.iter().map(|&i| idx.iter().map(|&k| self.entries[i][k].clone()).collect()).collect();
        WindowMatrix { n: order.len(), entries }
    }

    /// Every entry on or above the diagonal is exactly zero.
    pub fn is_strictly_lower_triangular(&self) -> bool {
        (0..self.n).all(|i| (i..self.n).all(|k| self.entries[i][k].is_zero()))
    }
}

pub fn matrix_window(s: &EvolutionStructure, kind: OperatorKind, n: u64) -> WindowMatrix {
    let mode = s.mode();
    let size = n as usize;
    let mut entries = vec![vec![Scalar::zero(mode); size]; size];
    for i in 1..=n {
        for (k, w) in s.row_of(VertexId::new(i)).into_entries().take_while(|(k, _)| k.get() <= n) {
            let (r, c) = (i as usize - 1, k.get() as usize - 1);
            let value = if kind.unweighted() { Scalar::one(mode) } else { w };
            if kind.uses_columns() {
                entries[c][r] = value.conj();
            } else {
                entries[r][c] = value;
            }
        }
    }
    WindowMatrix { n: size, entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::square_basis;
    use crate::families::{build_family, FamilySpec};
    use crate::scalar::rational;

    fn v(i: u64) -> VertexId {
        VertexId::new(i)
    }

    fn markov() -> EvolutionStructure {
        build_family(&FamilySpec::markov_line()).unwrap()
    }

    fn ones() -> PositiveWeights {
        PositiveWeights::Constant(rational(1, 1))
    }

    #[test]
    fn omega_of_basis_vector_is_its_square() {
        let s = build_family(&FamilySpec::comb()).unwrap();
        for i in 1..20 {
            let d = Element::basis(v(i), ScalarMode::Exact);
            assert_eq!(
                apply_operator(&s, OperatorKind::WeightedAdjacency, &d, None).unwrap(),
                square_basis(&s, v(i), None).unwrap()
            );
        }
    }

    #[test]
    fn markov_shift_and_adjoint() {
        let s = markov();
        let x = Element::rational(&[(2, (1, 1)), (3, (1, 1))]);
        assert_eq!(
            apply_operator(&s, OperatorKind::WeightedAdjacency, &x, None).unwrap(),
            Expansion::Exact(Element::rational(&[(3, (1, 1)), (4, (1, 1))]))
        );
        let g = apply_operator(&s, OperatorKind::WeightedAdjoint, &Element::rational(&[(3, (1, 1))]), None).unwrap();
        assert_eq!(g, Expansion::Exact(Element::rational(&[(1, (1, 4)), (2, (1, 1))])));
        assert!(matches!(
            apply_operator(&s, OperatorKind::Adjacency, &Element::rational(&[(1, (1, 1))]), Some(10)),
            Err(Error::NoTailBound(_))
        ));
    }

    #[test]
    fn adjoint_needs_columns() {
        let s = EvolutionStructure::new(ScalarMode::Exact, Universe::Infinite, Arc::new(|_| Row::empty()));
        let x = Element::rational(&[(1, (1, 1))]);
        assert_eq!(apply_operator(&s, OperatorKind::WeightedAdjoint, &x, None), Err(Error::NoColumnAccess));
    }

    #[test]
    fn summability_examples() {
        let s = markov();
        match summability_check(&s, Axis::Row, v(1), 10).unwrap() {
            Summability::FiniteCertified { sum, tail } => {
                let total = &sum + &tail;
                assert_eq!(total, Real::Exact(rational(1, 3)));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            summability_check(&s, Axis::Column, v(5), 10).unwrap(),
            Summability::FiniteCertified { sum: Real::Exact(rational(257, 256)), tail: Real::Exact(rational(0, 1)) }
        );
        assert_eq!(
            summability_check(&s, Axis::Row, v(7), 10).unwrap(),
            Summability::FiniteCertified { sum: Real::Exact(rational(1, 1)), tail: Real::Exact(rational(0, 1)) }
        );
    }

    #[test]
    fn frobenius_examples() {
        let zero = EvolutionStructure::finite_rational(3, &[]).unwrap();
        let c = frobenius_certificate(&zero, 3);
        assert!(c.is_certified());
        assert_eq!(c.bound, Some(0.0));
        let single = EvolutionStructure::finite_rational(2, &[(1, &[(2, (3, 1))])]).unwrap();
        assert_eq!(frobenius_certificate(&single, 2).bound, Some(3.0));
        let m = frobenius_certificate(&markov(), 50);
        assert_eq!(m.status, CertificateStatus::InconclusiveBudget);
        assert!(m.window_mass.unwrap() >= 48.0);
    }

    #[test]
    fn schur_examples() {
        let s = markov();
        let c = schur_certificate(&s, &ones(), &ones(), &rational(1, 1), &rational(2, 1), 40);
        assert!(c.is_certified(), "{c:?}");
        let b = c.bound.unwrap();
        assert!(b >= std::f64::consts::SQRT_2 && b - std::f64::consts::SQRT_2 < 1e-15);
        let tree = build_family(&FamilySpec::rary_tree(2)).unwrap();
        let c = schur_certificate(&tree, &ones(), &ones(), &rational(2, 1), &rational(1, 1), 40);
        assert!(c.is_certified());
        let c = schur_certificate(&s, &ones(), &ones(), &rational(1, 2), &rational(2, 1), 40);
        assert_eq!(c.status, CertificateStatus::RefutedAt { axis: Axis::Row, index: v(1) });
        assert!(c.describe().contains("undecided"));
    }

    #[test]
    fn pairing_residuals_vanish() {
        let s = markov();
        let x = Element::rational(&[(5, (1, 1))]);
        assert!(adjoint_pairing_residual(&s, v(4), &x).unwrap().is_zero());
        let y = Element::rational(&[(2, (3, 1)), (3, (-1, 2)), (9, (5, 7))]);
        for i in 1..12 {
            assert!(adjoint_pairing_residual(&s, v(i), &y).unwrap().is_zero());
        }
    }

    #[test]
    fn left_mult_examples() {
        let s = markov();
        let m = left_mult_bound(&s, &Element::rational(&[(1, (1, 1))])).unwrap();
        assert!(m >= (1.0f64 / 3.0).sqrt() && m - (1.0f64 / 3.0).sqrt() < 1e-15);
        assert_eq!(left_mult_bound(&s, &Element::rational(&[(4, (1, 1))])).unwrap(), 1.0);
        assert_eq!(left_mult_bound(&s, &Element::zero()).unwrap(), 0.0);
    }

    #[test]
    fn window_matrices() {
        let s = EvolutionStructure::finite_rational(2, &[(1, &[(2, (3, 5))])]).unwrap();
        let w = Scalar::ratio(3, 5);
        let z = Scalar::integer(0);
        let m = matrix_window(&s, OperatorKind::WeightedAdjacency, 2);
        assert_eq!(m.entries, vec![vec![z.clone(), w.clone()], vec![z.clone(), z.clone()]]);
        let a = matrix_window(&s, OperatorKind::Adjacency, 2);
        assert_eq!(a.entries, vec![vec![z.clone(), Scalar::integer(1)], vec![z.clone(), z.clone()]]);
        let g = matrix_window(&s, OperatorKind::WeightedAdjoint, 2);
        assert_eq!(g.entries, vec![vec![z.clone(), z.clone()], vec![w.conj(), z]]);
        assert_eq!(g, m.conj_transpose());
        assert!(g.is_strictly_lower_triangular());
    }
}
