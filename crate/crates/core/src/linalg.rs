//! Exact row reduction and the brute-force subspace chain `A^{<k>}`.

use std::collections::BTreeMap;

use crate::algebra::{strict_product, Element};
use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarMode, DEFAULT_TOLERANCE};
use crate::structure::{EvolutionStructure, Universe, VertexId};

/// Largest dimension the brute-force oracle accepts.
pub const ORACLE_MAX_DIM: u64 = 12;

/// Incrementally maintained echelon basis of a span of elements.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    /// pivot vertex -> reduced vector with coefficient 1 at the pivot
    rows: BTreeMap<VertexId, Element>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        EchelonBasis::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, x: &Element) -> Element {
        let mut r = x.clone();
        for (p, row) in &self.rows {
            if let Some(c) = r.get(*p).cloned() {
                r = r.sub(&row.scale(&c));
            }
        }
        r
    }

    /// Inserts `x`; returns whether the span grew.
    pub fn insert(&mut self, x: &Element) -> bool {
        let r = cleanup(self.reduce(x));
        let Some((pivot, lead)) = r.iter().next().map(|(k, c)| (k, c.clone())) else { return false };
        let inv = lead.inv().expect("nonzero pivot");
        let r = r.scale(&inv);
        // keep existing rows reduced against the new pivot
        for row in self.rows.values_mut() {
            if let Some(c) = row.get(pivot).cloned() {
                *row = cleanup(row.sub(&r.scale(&c)));
            }
        }
        self.rows.insert(pivot, r);
        true
    }

    pub fn contains(&self, x: &Element) -> bool {
        cleanup(self.reduce(x)).is_zero()
    }

    pub fn basis(&self) -> impl Iterator<Item = &Element> {
        self.rows.values()
    }
}

/// Drops float coefficients below the default tolerance; exact values pass
/// through untouched.
fn cleanup(x: Element) -> Element {
    Element::from_terms(x.iter().filter(|(_, c)| match c {
        Scalar::Exact(_) => true,
        Scalar::Float(z) => z.norm() > DEFAULT_TOLERANCE,
    }).map(|(k, c)| (k, c.clone())))
}

pub fn rank(vectors: &[Element]) -> usize {
    let mut b = EchelonBasis::new();
    for v in vectors {
        b.insert(v);
    }
    b.dim()
}

fn finite_dim(s: &EvolutionStructure) -> Result<u64> {
    match s.universe() {
        Universe::Finite(n) if n > ORACLE_MAX_DIM => Err(Error::OracleScale { dim: n, max: ORACLE_MAX_DIM }),
        Universe::Finite(n) => Ok(n),
        Universe::Infinite => Err(Error::UniverseNotFinite),
    }
}

/// Dimensions of `A^{<1>}, ..., A^{<n_max>}`, where `A^{<1>} = A` and
/// `A^{<k+1>} = span{x · e_i : x ∈ A^{<k>}, i <= n}`.
pub fn subspace_chain(s: &EvolutionStructure, n_max: u64) -> Result<Vec<usize>> {
    let n = finite_dim(s)?;
    let mode: ScalarMode = s.mode();
    let mut current = EchelonBasis::new();
    for i in 1..=n {
        current.insert(&Element::basis(VertexId::new(i), mode));
    }
    let mut dims = Vec::with_capacity(n_max as usize);
    for k in 1..=n_max {
        dims.push(current.dim());
        if k == n_max {
            break;
        }
        let mut next = EchelonBasis::new();
        for x in current.basis() {
            for i in 1..=n {
                let p = strict_product(s, x, &Element::basis(VertexId::new(i), mode))?;
                next.insert(&p);
            }
        }
        current = next;
    }
    Ok(dims)
}
