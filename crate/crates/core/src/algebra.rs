//! Element arithmetic in the natural basis.
//!
//! The product is determined by `e_i · e_i = Σ_k ω_ik e_k` and `e_i · e_j = 0`
//! for `i ≠ j`, so `u · v = Σ_i u_i v_i e_i²`. Elements have finite support;
//! products touching infinite rows are truncated at a cutoff and carry an
//! ℓ² bound on what was dropped.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{sqrt_upper, Real, Scalar, ScalarMode};
use crate::structure::{EvolutionStructure, Row, VertexId};

/// Finite-support vector `Σ α_k e_k`. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Element {
    coeffs: BTreeMap<VertexId, Scalar>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn basis(i: VertexId, mode: ScalarMode) -> Self {
        Element::from_terms([(i, Scalar::one(mode))])
    }

    /// Sums repeated vertices and drops zeros.
    pub fn from_terms<I: IntoIterator<Item = (VertexId, Scalar)>>(terms: I) -> Self {
        let mut e = Element::zero();
        for (k, c) in terms {
            e.add_term(k, &c);
        }
        e
    }

    /// Convenience: exact rational coefficients `(vertex, (num, den))`.
    pub fn rational(terms: &[(u64, (i64, i64))]) -> Self {
        Element::from_terms(terms.iter().map(|(k, (p, q))| (VertexId::new(*k), Scalar::ratio(*p, *q))))
    }

    pub fn add_term(&mut self, k: VertexId, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.remove(&k) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.coeffs.insert(k, sum);
                }
            }
            None => {
                self.coeffs.insert(k, c.clone());
            }
        }
    }

    pub fn get(&self, k: VertexId) -> Option<&Scalar> {
        self.coeffs.get(&k)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn support(&self) -> BTreeSet<VertexId> {
        self.coeffs.keys().copied().collect()
    }

    pub fn max_vertex(&self) -> Option<VertexId> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, &Scalar)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn scale(&self, a: &Scalar) -> Element {
        Element::from_terms(self.iter().map(|(k, c)| (k, a * c)))
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (k, c) in other.iter() {
            out.add_term(k, c);
        }
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (k, c) in other.iter() {
            out.add_term(k, &-c);
        }
        out
    }

    /// `⟨self, other⟩ = Σ self_k conj(other_k)`.
    pub fn inner(&self, other: &Element) -> Option<Scalar> {
        let mut acc: Option<Scalar> = None;
        for (k, a) in self.iter() {
            if let Some(b) = other.get(k) {
                let t = a * &b.conj();
                acc = Some(match acc {
                    Some(s) => s + t,
                    None => t,
                });
            }
        }
        acc
    }

    pub fn norm_sqr(&self) -> Real {
        let mut acc: Option<Real> = None;
        for (_, c) in self.iter() {
            let t = c.norm_sqr();
            acc = Some(match acc {
                Some(s) => &s + &t,
                None => t,
            });
        }
        acc.unwrap_or(Real::Exact(BigRational::zero()))
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().to_f64().sqrt()
    }

    /// Coefficients restricted to indices `<= cutoff`.
    pub fn truncate(&self, cutoff: u64) -> Element {
        Element { coeffs: self.coeffs.range(..=VertexId::new(cutoff.max(1))).filter(|(k, _)| k.get() <= cutoff).map(|(k, c)| (*k, c.clone())).collect() }
    }

    pub fn to_mode(&self, mode: ScalarMode) -> Element {
        Element::from_terms(self.iter().map(|(k, c)| (k, c.to_mode(mode))))
    }

    /// Random element with `terms` nonzero coefficients drawn from `pool`,
    /// each a rational `±p/q` with `1 <= p, q <= 7`.
    pub fn random_rational<R: Rng>(rng: &mut R, pool: &[VertexId], terms: usize) -> Element {
        let mut e = Element::zero();
        if pool.is_empty() {
            return e;
        }
        for _ in 0..terms {
            let k = pool[rng.gen_range(0..pool.len())];
            e.add_term(k, &random_weight(rng));
        }
        e
    }
}

/// Uniform nonzero rational `±p/q`, `1 <= p, q <= 7`.
pub fn random_weight<R: Rng>(rng: &mut R) -> Scalar {
    let p: i64 = rng.gen_range(1..=7);
    let q: i64 = rng.gen_range(1..=7);
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    Scalar::ratio(sign * p, q)
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.iter().map(|(k, c)| format!("({c})e_{k}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A truncated infinite-support vector: exact coordinates up to `cutoff`
/// and an ℓ² bound on everything beyond.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxElement {
    pub prefix: Element,
    pub cutoff: u64,
    pub tail_norm_bound: f64,
}

/// Result of a product or operator application.
#[derive(Clone, Debug, PartialEq)]
pub enum Expansion {
    Exact(Element),
    Approx(ApproxElement),
}

impl Expansion {
    pub fn prefix(&self) -> &Element {
        match self {
            Expansion::Exact(e) => e,
            Expansion::Approx(a) => &a.prefix,
        }
    }

    pub fn tail_bound(&self) -> f64 {
        match self {
            Expansion::Exact(_) => 0.0,
            Expansion::Approx(a) => a.tail_norm_bound,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Expansion::Exact(_))
    }

    pub fn into_exact(self) -> Option<Element> {
        match self {
            Expansion::Exact(e) => Some(e),
            Expansion::Approx(_) => None,
        }
    }

    /// Certainly zero: exact and empty.
    pub fn is_zero(&self) -> bool {
        matches!(self, Expansion::Exact(e) if e.is_zero())
    }
}

impl From<Element> for Expansion {
    fn from(e: Element) -> Self {
        Expansion::Exact(e)
    }
}

/// Accumulates `Σ c_i e_i²` with tail bookkeeping.
struct SquareAccumulator {
    prefix: Element,
    cutoff: Option<u64>,
    tail: f64,
    truncated: bool,
}

impl SquareAccumulator {
    fn new(cutoff: Option<u64>) -> Self {
        SquareAccumulator { prefix: Element::zero(), cutoff, tail: 0.0, truncated: false }
    }

    fn add_scaled_row(&mut self, i: VertexId, row: Row, coeff: &Scalar) -> Result<()> {
        self.add_mapped_row(i, row, coeff, |w| w)
    }

    /// Adds `coeff · map(w)` for every entry `w` of the row.
    fn add_mapped_row(&mut self, i: VertexId, row: Row, coeff: &Scalar, map: impl Fn(Scalar) -> Scalar) -> Result<()> {
        match row {
            Row::Finite(entries) => {
                for (k, w) in entries {
                    self.prefix.add_term(k, &(coeff * &map(w)));
                }
            }
            lazy => {
                let cutoff = self.cutoff.ok_or(Error::CutoffRequired(i))?;
                let tail_sq = lazy.tail_sq().cloned().ok_or(Error::NoTailBound(i))?;
                let (entries, _, _) = lazy.split_at_cutoff(cutoff);
                for (k, w) in entries {
                    self.prefix.add_term(k, &(coeff * &map(w)));
                }
                let row_tail = sqrt_upper(&tail_sq(cutoff));
                self.tail = (self.tail + (coeff.abs_upper() * row_tail).next_up()).next_up();
                self.truncated = true;
            }
        }
        Ok(())
    }

    fn finish(self) -> Expansion {
        if self.truncated {
            let cutoff = self.cutoff.expect("truncation implies a cutoff");
            Expansion::Approx(ApproxElement { prefix: self.prefix, cutoff, tail_norm_bound: self.tail })
        } else {
            Expansion::Exact(self.prefix)
        }
    }
}

/// `Σ_i c_i · map(line_i)` where `line_i` is produced by `fetch` (a row or a
/// column); infinite lines are truncated at `cutoff`.
pub(crate) fn line_combination(
    coeffs: &Element,
    cutoff: Option<u64>,
    fetch: impl Fn(VertexId) -> Result<Row>,
    map: impl Fn(Scalar) -> Scalar,
) -> Result<Expansion> {
    let mut acc = SquareAccumulator::new(cutoff);
    for (i, c) in coeffs.iter() {
        acc.add_mapped_row(i, fetch(i)?, c, &map)?;
    }
    Ok(acc.finish())
}

/// `e_i²`.
pub fn square_basis(s: &EvolutionStructure, i: VertexId, cutoff: Option<u64>) -> Result<Expansion> {
    let mut acc = SquareAccumulator::new(cutoff);
    acc.add_scaled_row(i, s.row_of(i), &Scalar::one(s.mode()))?;
    Ok(acc.finish())
}

/// `u · v = Σ_{i ∈ supp u ∩ supp v} u_i v_i e_i²`.
pub fn multiply(s: &EvolutionStructure, u: &Element, v: &Element, cutoff: Option<u64>) -> Result<Expansion> {
    let mut acc = SquareAccumulator::new(cutoff);
    for (i, a) in u.iter() {
        if let Some(b) = v.get(i) {
            acc.add_scaled_row(i, s.row_of(i), &(a * b))?;
        }
    }
    Ok(acc.finish())
}

/// Product of a possibly truncated left factor with an exact right factor.
///
/// The dropped tail of `a` lives on indices above its cutoff; when `v` is
/// supported at or below that cutoff the tail contributes nothing.
pub fn multiply_expansion(
    s: &EvolutionStructure,
    a: &Expansion,
    v: &Element,
    cutoff: Option<u64>,
) -> Result<Expansion> {
    if let Expansion::Approx(approx) = a {
        if let Some(max) = v.max_vertex() {
            if max.get() > approx.cutoff {
                return Err(Error::CutoffTooSmall { cutoff: approx.cutoff, vertex: max });
            }
        }
    }
    multiply(s, a.prefix(), v, cutoff)
}

/// `v^1 = v`, `v^{k+1} = v^k · v`.
pub fn principal_power(s: &EvolutionStructure, v: &Element, n: u64, cutoff: Option<u64>) -> Result<Expansion> {
    if n == 0 {
        return Err(Error::InvalidArgument("principal powers start at n = 1".into()));
    }
    let mut p = Expansion::Exact(v.clone());
    for _ in 1..n {
        if p.is_zero() {
            break;
        }
        p = multiply_expansion(s, &p, v, cutoff)?;
    }
    Ok(p)
}

/// All principal powers `v^1..=v^n`.
pub fn principal_powers(s: &EvolutionStructure, v: &Element, n: u64, cutoff: Option<u64>) -> Result<Vec<Expansion>> {
    let mut out = Vec::with_capacity(n as usize);
    let mut p = Expansion::Exact(v.clone());
    for k in 1..=n {
        if k > 1 {
            p = multiply_expansion(s, &p, v, cutoff)?;
        }
        out.push(p.clone());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "n")]
pub enum NilSearch {
    NilAt(u64),
    NotNilUpTo(u64),
}

/// Minimal `n <= n_max` with `v^n = 0`, computed exactly on finite rows.
pub fn nil_witness_search(s: &EvolutionStructure, v: &Element, n_max: u64) -> Result<NilSearch> {
    if n_max < 2 {
        return Err(Error::InvalidArgument("n_max must be at least 2".into()));
    }
    if v.is_zero() {
        return Ok(NilSearch::NilAt(1));
    }
    let mut p = v.clone();
    for n in 2..=n_max {
        p = strict_product(s, &p, v)?;
        if p.is_zero() {
            return Ok(NilSearch::NilAt(n));
        }
    }
    Ok(NilSearch::NotNilUpTo(n_max))
}

/// Exact product that refuses to touch infinite rows.
pub(crate) fn strict_product(s: &EvolutionStructure, u: &Element, v: &Element) -> Result<Element> {
    let mut out = Element::zero();
    for (i, a) in u.iter() {
        if let Some(b) = v.get(i) {
            let c = a * b;
            match s.row_of(i) {
                Row::Finite(entries) => {
                    for (k, w) in entries {
                        out.add_term(k, &(&c * &w));
                    }
                }
                Row::Lazy { .. } => return Err(Error::InfiniteRowReached(i)),
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct InnerProduct {
    pub value: Scalar,
    /// Bound on `|⟨u,v⟩ − value|` from the truncated tail of `u`.
    pub error_bound: f64,
}

pub fn inner_product(u: &Expansion, v: &Element) -> InnerProduct {
    let mode = v.iter().next().map(|(_, c)| c.mode()).unwrap_or(ScalarMode::Exact);
    let value = u.prefix().inner(v).unwrap_or_else(|| Scalar::zero(mode));
    let error_bound = match u {
        Expansion::Exact(_) => 0.0,
        Expansion::Approx(a) => {
            let beyond: Element = Element::from_terms(v.iter().filter(|(k, _)| k.get() > a.cutoff).map(|(k, c)| (k, c.clone())));
            if beyond.is_zero() {
                0.0
            } else {
                (a.tail_norm_bound * beyond.norm_sqr().sqrt_upper()).next_up()
            }
        }
    };
    InnerProduct { value, error_bound }
}

pub type BasisMap = Arc<dyn Fn(VertexId) -> Element + Send + Sync>;

/// A banded change of natural basis: `forward(i)` is `f_i` in the `e`
/// basis, `inverse(i)` is `e_i` in the `f` basis.
#[derive(Clone)]
pub struct BasisTransform {
    forward: BasisMap,
    inverse: BasisMap,
    band: u64,
}

impl fmt::Debug for BasisTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BasisTransform").field("band", &self.band).finish()
    }
}

impl BasisTransform {
    pub fn new(forward: BasisMap, inverse: BasisMap, band: u64) -> Self {
        BasisTransform { forward, inverse, band }
    }

    pub fn identity(mode: ScalarMode) -> Self {
        BasisTransform::new(
            Arc::new(move |i| Element::basis(i, mode)),
            Arc::new(move |i| Element::basis(i, mode)),
            0,
        )
    }

    pub fn forward(&self, i: VertexId) -> Element {
        (self.forward)(i)
    }

    pub fn inverse(&self, i: VertexId) -> Element {
        (self.inverse)(i)
    }

    pub fn band(&self) -> u64 {
        self.band
    }

    /// Rewrites an `e`-coordinate element in the `f` basis.
    pub fn to_new_basis(&self, x: &Element) -> Element {
        let mut out = Element::zero();
        for (m, c) in x.iter() {
            for (k, d) in self.inverse(m).iter() {
                out.add_term(k, &(c * d));
            }
        }
        out
    }

    /// Rewrites an `f`-coordinate element in the `e` basis.
    pub fn to_old_basis(&self, y: &Element) -> Element {
        let mut out = Element::zero();
        for (k, c) in y.iter() {
            for (m, d) in self.forward(k).iter() {
                out.add_term(m, &(c * d));
            }
        }
        out
    }

    /// First `i <= window` where substituting `inverse` into `forward` fails
    /// to give back `e_i`.
    pub fn roundtrip_defect(&self, window: u64, mode: ScalarMode) -> Option<VertexId> {
        (1..=window).map(VertexId::new).find(|&i| {
            let e_i = self.to_old_basis(&self.inverse(i));
            e_i != Element::basis(i, mode)
        })
    }

    /// `f_i²` expressed in the `f` basis.
    pub fn rebased_square(&self, s: &EvolutionStructure, i: VertexId, cutoff: Option<u64>) -> Result<Expansion> {
        let f = self.forward(i);
        Ok(match multiply(s, &f, &f, cutoff)? {
            Expansion::Exact(e) => Expansion::Exact(self.to_new_basis(&e)),
            Expansion::Approx(a) => Expansion::Approx(ApproxElement {
                prefix: self.to_new_basis(&a.prefix),
                cutoff: a.cutoff,
                tail_norm_bound: a.tail_norm_bound,
            }),
        })
    }

    /// Structural constants of the normalized basis `f̃_i = f_i / ‖f_i‖`,
    /// in signed-square form: the entry `s` at `k` stands for the real
    /// coefficient `sign(s)·sqrt(|s|)` of `f̃_k` in `f̃_i²`. Exact whenever
    /// the transform and structure are exact and real, even though the
    /// coefficients themselves may be irrational.
    pub fn normalized_square_signed(&self, s: &EvolutionStructure, i: VertexId) -> Result<BTreeMap<VertexId, BigRational>> {
        let norm_sq = |k: VertexId| -> Result<BigRational> {
            self.forward(k)
                .norm_sqr()
                .as_exact()
                .cloned()
                .ok_or_else(|| Error::InvalidArgument("signed-square form needs exact coefficients".into()))
        };
        let sq = self
            .rebased_square(s, i, None)?
            .into_exact()
            .ok_or_else(|| Error::InvalidArgument("signed-square form needs finite rows".into()))?;
        let ni = norm_sq(i)?;
        let mut out = BTreeMap::new();
        for (k, c) in sq.iter() {
            let c = c
                .as_exact_real()
                .ok_or_else(|| Error::InvalidArgument("signed-square form needs real coefficients".into()))?;
            let magnitude = c * c * norm_sq(k)? / (&ni * &ni);
            out.insert(k, if c.is_negative() { -magnitude } else { magnitude });
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NaturalCheck {
    NaturalOnWindow,
    Violation { i: VertexId, j: VertexId, product: Element, inner: Scalar },
}

/// Checks `f_i · f_j = 0` and `⟨f_i, f_j⟩ = 0` for `i < j <= window` within
/// the transform's band.
pub fn verify_natural_basis(s: &EvolutionStructure, t: &BasisTransform, window: u64) -> Result<NaturalCheck> {
    let zero = Scalar::zero(s.mode());
    for i in 1..=window {
        let fi = t.forward(VertexId::new(i));
        for j in (i + 1)..=window.min(i.saturating_add(t.band())) {
            let fj = t.forward(VertexId::new(j));
            let product = multiply(s, &fi, &fj, None)?;
            let inner = fi.inner(&fj).unwrap_or_else(|| zero.clone());
            if !product.is_zero() || !inner.is_zero() {
                return Ok(NaturalCheck::Violation {
                    i: VertexId::new(i),
                    j: VertexId::new(j),
                    product: product.prefix().clone(),
                    inner,
                });
            }
        }
    }
    Ok(NaturalCheck::NaturalOnWindow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_family, FamilySpec};

    fn v(i: u64) -> VertexId {
        VertexId::new(i)
    }

    fn markov() -> EvolutionStructure {
        build_family(&FamilySpec::markov_line()).unwrap()
    }

    #[test]
    fn zero_coefficients_are_never_stored() {
        let x = Element::rational(&[(1, (1, 2)), (1, (-1, 2)), (2, (0, 1))]);
        assert!(x.is_zero());
        assert_eq!(x, Element::zero());
        let y = Element::rational(&[(3, (1, 1))]).sub(&Element::rational(&[(3, (1, 1))]));
        assert!(y.is_empty());
    }

    #[test]
    fn square_of_tree_root() {
        let s = build_family(&FamilySpec::rary_tree(2)).unwrap();
        let sq = square_basis(&s, v(1), None).unwrap();
        assert_eq!(sq, Expansion::Exact(Element::rational(&[(2, (1, 1)), (3, (1, 1))])));
    }

    #[test]
    fn markov_shift_rows() {
        let s = markov();
        assert_eq!(square_basis(&s, v(4), None).unwrap(), Expansion::Exact(Element::rational(&[(5, (1, 1))])));
    }

    #[test]
    fn markov_hub_square_is_truncated_with_geometric_tail() {
        let s = markov();
        assert_eq!(square_basis(&s, v(1), None), Err(Error::CutoffRequired(v(1))));
        let Expansion::Approx(a) = square_basis(&s, v(1), Some(4)).unwrap() else { panic!("expected truncation") };
        assert_eq!(a.prefix, Element::rational(&[(2, (1, 2)), (3, (1, 4)), (4, (1, 8))]));
        // Σ_{j≥5} 4^{-(j-1)} = 4^{-4} / (1 - 1/4) = 1/192
        let expected = (1.0f64 / 192.0).sqrt();
        assert!(a.tail_norm_bound >= expected);
        assert!(a.tail_norm_bound - expected < 1e-15);
    }

    #[test]
    fn distinct_basis_elements_annihilate() {
        let s = markov();
        let p = multiply(&s, &Element::basis(v(2), ScalarMode::Exact), &Element::basis(v(3), ScalarMode::Exact), None);
        assert!(p.unwrap().is_zero());
    }

    #[test]
    fn alt_line_pair_product_vanishes() {
        let s = build_family(&FamilySpec::AltLineB { mode: ScalarMode::Exact }).unwrap();
        for i in (1..20).step_by(2) {
            let a = Element::rational(&[(i, (1, 1)), (i + 1, (1, 1))]);
            let b = Element::rational(&[(i + 1, (1, 1)), (i, (-1, 1))]);
            assert!(multiply(&s, &a, &b, None).unwrap().is_zero());
        }
    }

    #[test]
    fn markov_powers() {
        let s = markov();
        let x = Element::rational(&[(2, (1, 1)), (3, (1, 1))]);
        let sq = multiply(&s, &x, &x, None).unwrap();
        assert_eq!(sq, Expansion::Exact(Element::rational(&[(3, (1, 1)), (4, (1, 1))])));
        let pows = principal_powers(&s, &x, 4, None).unwrap();
        assert_eq!(pows[0], Expansion::Exact(x.clone()));
        assert_eq!(pows[2], Expansion::Exact(Element::rational(&[(4, (1, 1))])));
        assert!(pows[3].is_zero());
        assert_eq!(principal_power(&s, &x, 1, None).unwrap(), Expansion::Exact(x));
    }

    #[test]
    fn power_zero_is_rejected() {
        let s = markov();
        assert!(principal_power(&s, &Element::zero(), 0, None).is_err());
    }

    #[test]
    fn truncated_power_needs_cutoff_above_support() {
        let s = markov();
        let x = Element::rational(&[(1, (1, 1)), (3, (1, 1))]);
        let p = principal_power(&s, &x, 3, Some(8)).unwrap();
        // v² = e_1² + e_4 (approx), v³ = v²·v = (1/4)e_3² = (1/4)e_4
        assert_eq!(p, Expansion::Exact(Element::rational(&[(4, (1, 4))])));
        assert!(matches!(
            principal_power(&s, &Element::rational(&[(1, (1, 1)), (9, (1, 1))]), 3, Some(4)),
            Err(Error::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn nil_search_on_two_cycle() {
        let s = EvolutionStructure::finite_rational(2, &[(1, &[(2, (1, 1))]), (2, &[(1, (1, 1))])]).unwrap();
        let x = Element::rational(&[(1, (1, 1)), (2, (1, 1))]);
        assert_eq!(nil_witness_search(&s, &x, 20), Ok(NilSearch::NotNilUpTo(20)));
        let p = EvolutionStructure::finite_rational(2, &[(1, &[(2, (1, 1))])]).unwrap();
        assert_eq!(nil_witness_search(&p, &Element::rational(&[(1, (1, 1))]), 5), Ok(NilSearch::NilAt(3)));
        assert!(matches!(
            nil_witness_search(&markov(), &Element::rational(&[(1, (1, 1))]), 5),
            Err(Error::InfiniteRowReached(_))
        ));
    }

    #[test]
    fn inner_products() {
        let e1 = Element::basis(v(1), ScalarMode::Exact);
        let e2 = Element::basis(v(2), ScalarMode::Exact);
        assert_eq!(inner_product(&e1.clone().into(), &e2).value, Scalar::integer(0));
        assert_eq!(inner_product(&e1.clone().into(), &e1).value, Scalar::integer(1));
        let a = Element::rational(&[(1, (1, 2)), (2, (1, 2))]);
        let b = Element::rational(&[(1, (1, 1)), (2, (-1, 1))]);
        assert_eq!(inner_product(&a.into(), &b).value, Scalar::integer(0));
    }

    #[test]
    fn inner_product_with_truncated_left_factor() {
        let s = markov();
        let sq = square_basis(&s, v(1), Some(4)).unwrap();
        let ip = inner_product(&sq, &Element::rational(&[(2, (1, 1))]));
        assert_eq!(ip.value, Scalar::ratio(1, 2));
        assert_eq!(ip.error_bound, 0.0);
        let ip = inner_product(&sq, &Element::rational(&[(6, (1, 1))]));
        assert!(ip.error_bound > 0.0);
    }

    #[test]
    fn identity_transform_is_natural() {
        let s = markov();
        let t = BasisTransform::identity(ScalarMode::Exact);
        assert_eq!(verify_natural_basis(&s, &t, 10), Ok(NaturalCheck::NaturalOnWindow));
        assert_eq!(t.roundtrip_defect(10, ScalarMode::Exact), None);
    }

    #[test]
    fn non_natural_pair_is_reported() {
        let s = markov();
        let fwd: BasisMap = Arc::new(|i: VertexId| match i.get() {
            1 => Element::rational(&[(1, (1, 1)), (2, (1, 1))]),
            _ => Element::basis(i, ScalarMode::Exact),
        });
        let inv: BasisMap = Arc::new(|i: VertexId| match i.get() {
            1 => Element::rational(&[(1, (1, 1)), (2, (-1, 1))]),
            _ => Element::basis(i, ScalarMode::Exact),
        });
        let t = BasisTransform::new(fwd, inv, 1);
        assert_eq!(t.roundtrip_defect(5, ScalarMode::Exact), None);
        match verify_natural_basis(&s, &t, 5).unwrap() {
            NaturalCheck::Violation { i, j, product, .. } => {
                assert_eq!((i, j), (v(1), v(2)));
                assert_eq!(product, Element::rational(&[(3, (1, 1))]));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
