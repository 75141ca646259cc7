//! Nil / nilpotency decisions with witnesses.
//!
//! For finite structures everything is decided exactly: oriented cycles
//! refute nil and nilpotent, and acyclic structures are nilpotent with index
//! `L + 2` for a longest path of length `L`. Infinite structures are refuted
//! by search (a cycle) or decided from family metadata; otherwise the
//! verdict is inconclusive with the best evidence found.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{nil_witness_search, random_weight, strict_product, Element, NilSearch};
use crate::error::{Error, Result};
use crate::graph::{
    depth, descendants_generation, dfs_cycle, validate_path, windowed_cycle_search, BfsTree, CycleSearch, DepthVerdict,
    ENTRIES_PER_LEVEL,
};
use crate::linalg::{subspace_chain, ORACLE_MAX_DIM};
use crate::scalar::{Scalar, ScalarMode};
use crate::structure::{Depth, EvolutionStructure, Universe, VertexId};

/// Longest ray prefix reported as a witness.
const RAY_PREFIX_LEN: u64 = 64;

/// Depth records collected for an unbounded-depth witness.
const DEPTH_RECORDS: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Witness {
    Cycle { path: Vec<VertexId> },
    LongPath { path: Vec<VertexId>, length: u64 },
    /// Vertices with strictly increasing exact depths.
    UnboundedDepthSequence { records: Vec<(VertexId, u64)> },
    RayPrefix { path: Vec<VertexId> },
    FamilyOracleFact { fact: String },
}

impl Witness {
    /// Re-checks the witness against the structure edge by edge.
    pub fn validate(&self, s: &EvolutionStructure) -> bool {
        match self {
            Witness::Cycle { path } => path.len() >= 2 && path.first() == path.last() && validate_path(s, path),
            Witness::LongPath { path, length } => {
                !path.is_empty() && path.len() as u64 == length + 1 && validate_path(s, path)
            }
            Witness::RayPrefix { path } => !path.is_empty() && validate_path(s, path),
            Witness::UnboundedDepthSequence { records } => {
                records.windows(2).all(|w| w[0].1 < w[1].1)
                    && records.iter().all(|&(v, d)| depth(s, v, d + 1) == DepthVerdict::Exact(d))
            }
            Witness::FamilyOracleFact { .. } => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum NilVerdict {
    CertifiedYes,
    CertifiedNo { witness: Witness },
    Inconclusive { budget: u64, evidence: Option<Witness> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum NilpotentVerdict {
    CertifiedYes { index: u64 },
    CertifiedNo { witness: Witness },
    Inconclusive { budget: u64, evidence: Option<Witness> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NilpotencyReport {
    pub nil: NilVerdict,
    pub nilpotent: NilpotentVerdict,
    /// Sink-first ordering making the window matrix strictly lower
    /// triangular, when one was computed.
    pub basis_order: Option<Vec<VertexId>>,
}

impl NilpotencyReport {
    pub fn is_decided(&self) -> bool {
        !matches!(self.nil, NilVerdict::Inconclusive { .. })
            && !matches!(self.nilpotent, NilpotentVerdict::Inconclusive { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "n")]
pub enum IndexVerdict {
    Exact(u64),
    UpperBound(u64),
    Unbounded,
    Inconclusive,
}

fn cycle_in_window(s: &EvolutionStructure, budget: u64) -> Option<Vec<VertexId>> {
    let window = match s.universe() {
        Universe::Finite(n) => n,
        Universe::Infinite => budget,
    };
    match windowed_cycle_search(s, window, u64::MAX) {
        CycleSearch::Found(c) => Some(c),
        _ => None,
    }
}

pub fn classify(s: &EvolutionStructure, budget: u64) -> NilpotencyReport {
    let budget = budget.max(1);
    if let Some(path) = cycle_in_window(s, budget) {
        let w = Witness::Cycle { path };
        return NilpotencyReport {
            nil: NilVerdict::CertifiedNo { witness: w.clone() },
            nilpotent: NilpotentVerdict::CertifiedNo { witness: w },
            basis_order: None,
        };
    }
    if let Universe::Finite(n) = s.universe() {
        let nilpotent = match nilpotency_index(s, budget) {
            IndexVerdict::Exact(index) => NilpotentVerdict::CertifiedYes { index },
            _ => NilpotentVerdict::Inconclusive { budget, evidence: None },
        };
        let basis_order = match triangularize_window(s, n) {
            Triangularization::Permutation { order } => Some(order),
            _ => None,
        };
        return NilpotencyReport { nil: NilVerdict::CertifiedYes, nilpotent, basis_order };
    }
    let meta = s.meta().cloned().unwrap_or_default();
    let cycle_free = meta.cycle_free == Some(true);

    if cycle_free && matches!(meta.sup_depth, Some(Depth::Finite(_))) {
        let nilpotent = match nilpotency_index(s, budget) {
            IndexVerdict::Exact(index) => NilpotentVerdict::CertifiedYes { index },
            _ => NilpotentVerdict::Inconclusive { budget, evidence: longest_path_evidence(s, budget) },
        };
        return NilpotencyReport { nil: NilVerdict::CertifiedYes, nilpotent, basis_order: None };
    }

    if cycle_free && meta.all_depths_finite == Some(true) && meta.sup_depth == Some(Depth::Infinite) {
        let records = depth_records(s, budget);
        let witness = if records.is_empty() {
            Witness::FamilyOracleFact { fact: "depths are finite but unbounded".into() }
        } else {
            Witness::UnboundedDepthSequence { records }
        };
        return NilpotencyReport {
            nil: NilVerdict::CertifiedYes,
            nilpotent: NilpotentVerdict::CertifiedNo { witness },
            basis_order: None,
        };
    }

    if let Some(start) = (1..=budget).map(VertexId::new).find(|&v| s.depth_oracle(v) == Some(Depth::Infinite)) {
        let witness = ray_prefix(s, budget).unwrap_or_else(|| Witness::FamilyOracleFact {
            fact: format!("depth oracle reports infinite depth at vertex {start}"),
        });
        return NilpotencyReport {
            nil: NilVerdict::CertifiedNo { witness: witness.clone() },
            nilpotent: NilpotentVerdict::CertifiedNo { witness },
            basis_order: None,
        };
    }

    let evidence = longest_path_evidence(s, budget);
    NilpotencyReport {
        nil: NilVerdict::Inconclusive { budget, evidence: evidence.clone() },
        nilpotent: NilpotentVerdict::Inconclusive { budget, evidence },
        basis_order: None,
    }
}

/// Strictly increasing depth records among vertices `1..=16·budget`.
fn depth_records(s: &EvolutionStructure, budget: u64) -> Vec<(VertexId, u64)> {
    let mut records = Vec::new();
    let mut best = 0u64;
    for i in 1..=budget.saturating_mul(16) {
        let v = VertexId::new(i);
        if let DepthVerdict::Exact(d) = depth(s, v, budget) {
            if d > best {
                best = d;
                records.push((v, d));
                if records.len() >= DEPTH_RECORDS {
                    break;
                }
            }
        }
    }
    records
}

/// Follows successors the depth oracle marks infinite, preferring start
/// vertices whose rows are finite.
fn ray_prefix(s: &EvolutionStructure, budget: u64) -> Option<Witness> {
    let infinite = |v: VertexId| s.depth_oracle(v) == Some(Depth::Infinite);
    let candidates: Vec<VertexId> = (1..=budget).map(VertexId::new).filter(|&v| infinite(v)).collect();
    let start = candidates
        .iter()
        .copied()
        .find(|&v| s.row_of(v).is_finite())
        .or_else(|| candidates.first().copied())?;
    let mut path = vec![start];
    let mut cur = start;
    let len = budget.min(RAY_PREFIX_LEN);
    while (path.len() as u64) <= len {
        let next = s
            .row_of(cur)
            .into_entries()
            .take(ENTRIES_PER_LEVEL as usize)
            .map(|(k, _)| k)
            .find(|&k| infinite(k) && !path.contains(&k))?;
        path.push(next);
        cur = next;
    }
    Some(Witness::RayPrefix { path })
}

/// Deepest BFS path from the first few vertices.
fn longest_path_evidence(s: &EvolutionStructure, budget: u64) -> Option<Witness> {
    let mut best: Option<Vec<VertexId>> = None;
    for i in 1..=budget.min(32) {
        let tree = BfsTree::explore(s, VertexId::new(i), budget, budget.saturating_mul(ENTRIES_PER_LEVEL));
        if let Some((&far, _)) = tree.dist.iter().max_by_key(|(v, d)| (**d, std::cmp::Reverse(**v))) {
            let path = tree.path_to(far);
            if best.as_ref().is_none_or(|b| path.len() > b.len()) {
                best = Some(path);
            }
        }
    }
    best.filter(|p| p.len() > 1).map(|path| Witness::LongPath { length: path.len() as u64 - 1, path })
}

/// Generations `D^0(U), D^1(U), ...` until empty; `None` if a row budget
/// truncated a generation or `max_gen` was reached.
fn generations_until_empty(
    s: &EvolutionStructure,
    sources: BTreeSet<VertexId>,
    max_gen: u64,
    budget_per_generation: u64,
) -> Option<Vec<BTreeSet<VertexId>>> {
    let mut layers = vec![sources];
    while let Some(last) = layers.last().filter(|l| !l.is_empty()) {
        if layers.len() as u64 > max_gen {
            return None;
        }
        let g = descendants_generation(s, last, 1, budget_per_generation).ok()?;
        if g.truncated {
            return None;
        }
        layers.push(g.members);
    }
    Some(layers)
}

/// Backtracks a path `v_0 → … → v_L` through consecutive nonempty layers.
fn path_through_layers(s: &EvolutionStructure, layers: &[BTreeSet<VertexId>]) -> Vec<VertexId> {
    let last = layers.iter().rposition(|l| !l.is_empty()).expect("first layer nonempty");
    let mut path = vec![*layers[last].iter().next().unwrap()];
    for m in (0..last).rev() {
        let target = path[0];
        let u = layers[m]
            .iter()
            .copied()
            .find(|&u| s.row_of(u).into_entries().take_while(|(k, _)| *k <= target).any(|(k, _)| k == target))
            .expect("every member has a predecessor in the previous layer");
        path.insert(0, u);
    }
    path
}

/// `x = e_{v_0}`, then `x ← x · e_{v_k}` for each `k < L`; lands in
/// `A^{<L+1>}` and is nonzero along a genuine path.
pub fn path_product(s: &EvolutionStructure, path: &[VertexId]) -> Result<Element> {
    let mode = s.mode();
    let mut x = Element::basis(path[0], mode);
    for &v in &path[..path.len() - 1] {
        x = strict_product(s, &x, &Element::basis(v, mode))?;
    }
    Ok(x)
}

/// Right-nilpotency index `min{n : A^{<n>} = 0}`.
pub fn nilpotency_index(s: &EvolutionStructure, budget: u64) -> IndexVerdict {
    let budget = budget.max(1);
    if cycle_in_window(s, budget).is_some() {
        return IndexVerdict::Unbounded;
    }
    let meta = s.meta().cloned().unwrap_or_default();
    let (sources, max_gen): (BTreeSet<VertexId>, u64) = match s.universe() {
        Universe::Finite(0) => return IndexVerdict::Exact(1),
        Universe::Finite(n) => ((1..=n).map(VertexId::new).collect(), n + 1),
        Universe::Infinite => match (meta.cycle_free, meta.generation_window) {
            (Some(true), Some(w)) => ((1..=w).map(VertexId::new).collect(), budget.max(w + 1)),
            _ => {
                let refuted = (meta.cycle_free == Some(true)
                    && meta.all_depths_finite == Some(true)
                    && meta.sup_depth == Some(Depth::Infinite))
                    || (1..=budget).any(|i| s.depth_oracle(VertexId::new(i)) == Some(Depth::Infinite));
                return if refuted { IndexVerdict::Unbounded } else { IndexVerdict::Inconclusive };
            }
        },
    };
    let Some(layers) =
        generations_until_empty(s, sources, max_gen, budget.saturating_mul(ENTRIES_PER_LEVEL).max(1 << 16))
    else {
        return IndexVerdict::Inconclusive;
    };
    // layers[m] = D^m(U); the last one is empty
    let first_empty = layers.len() as u64 - 1;
    let n = first_empty + 1;
    let path = path_through_layers(s, &layers);
    match path_product(s, &path) {
        Ok(x) if !x.is_zero() => IndexVerdict::Exact(n),
        _ => IndexVerdict::UpperBound(n),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Triangularization {
    /// Sink-first order of the whole window.
    Permutation { order: Vec<VertexId> },
    /// Elimination stalled on vertices whose out-edges leave the window.
    Blocked { order: Vec<VertexId>, blocked: Vec<VertexId> },
    CycleFound { path: Vec<VertexId> },
}

/// Iterated sink removal on the subgraph induced by `1..=window`.
///
/// Edges leaving the window are ignored only when the structure is known to
/// be cycle-free (or the window covers a finite universe); otherwise
/// vertices with such edges never count as sinks.
pub fn triangularize_window(s: &EvolutionStructure, window: u64) -> Triangularization {
    let window = s.universe().clamp(window);
    let covers_universe = matches!(s.universe(), Universe::Finite(n) if window >= n);
    let ignore_external = covers_universe || s.meta().is_some_and(|m| m.cycle_free == Some(true));
    let mut out: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
    let mut preds: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    let mut pinned: BTreeSet<VertexId> = BTreeSet::new();
    for i in 1..=window {
        let v = VertexId::new(i);
        let mut succ = BTreeSet::new();
        for (k, _) in s.row_of(v).into_entries() {
            if k.get() > window {
                if !ignore_external {
                    pinned.insert(v);
                }
                break;
            }
            succ.insert(k);
            preds.entry(k).or_default().push(v);
        }
        out.insert(v, succ);
    }
    let mut ready: BTreeSet<VertexId> =
        out.iter().filter(|(v, succ)| succ.is_empty() && !pinned.contains(v)).map(|(v, _)| *v).collect();
    let mut order = Vec::with_capacity(window as usize);
    let mut removed: BTreeSet<VertexId> = BTreeSet::new();
    while let Some(v) = ready.pop_first() {
        order.push(v);
        removed.insert(v);
        for &p in preds.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            if removed.contains(&p) {
                continue;
            }
            let succ = out.get_mut(&p).unwrap();
            succ.remove(&v);
            if succ.is_empty() && !pinned.contains(&p) {
                ready.insert(p);
            }
        }
    }
    if order.len() as u64 == window {
        return Triangularization::Permutation { order };
    }
    let rest: Vec<VertexId> = out.keys().copied().filter(|v| !removed.contains(v)).collect();
    let succ = |v: VertexId| Some(out.get(&v).map(|s| s.iter().copied().collect()).unwrap_or_default());
    match dfs_cycle(rest.iter().copied(), succ) {
        CycleSearch::Found(path) => Triangularization::CycleFound { path },
        _ => Triangularization::Blocked { order, blocked: rest },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BruteForce {
    pub nilpotent: bool,
    /// `min{k : A^{<k>} = 0}` when nilpotent.
    pub index: Option<u64>,
    /// Every sampled element had a vanishing principal power.
    pub nil_sampled: bool,
    pub dims: Vec<usize>,
}

/// Elements sampled by [`brute_force_nilpotent`].
pub const ORACLE_SAMPLES: usize = 100;

/// Exact linear-algebra oracle for finite structures with `n <= 12`.
pub fn brute_force_nilpotent(s: &EvolutionStructure, seed: u64) -> Result<BruteForce> {
    let n = match s.universe() {
        Universe::Finite(n) if n > ORACLE_MAX_DIM => return Err(Error::OracleScale { dim: n, max: ORACLE_MAX_DIM }),
        Universe::Finite(n) => n,
        Universe::Infinite => return Err(Error::UniverseNotFinite),
    };
    let dims = subspace_chain(s, n + 2)?;
    let index = dims.iter().position(|&d| d == 0).map(|p| p as u64 + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<VertexId> = (1..=n).map(VertexId::new).collect();
    let mut nil_sampled = true;
    for _ in 0..ORACLE_SAMPLES {
        let mut terms = Vec::new();
        for &k in &pool {
            if rng.gen_bool(0.8) {
                terms.push((k, random_weight(&mut rng)));
            }
        }
        let v = Element::from_terms(terms);
        let v = v.to_mode(s.mode());
        if let NilSearch::NotNilUpTo(_) = nil_witness_search(s, &v, 2 * n + 2)? {
            nil_sampled = false;
            break;
        }
    }
    Ok(BruteForce { nilpotent: index.is_some(), index, nil_sampled, dims })
}

/// Random finite structure: each ordered pair (self-loops included) is an
/// edge with probability `p`, weights `±a/b` with `1 <= a, b <= 7`.
pub fn random_finite_structure<R: Rng>(rng: &mut R, n: u64, p: f64) -> EvolutionStructure {
    let mut rows: BTreeMap<u64, Vec<(u64, Scalar)>> = BTreeMap::new();
    for i in 1..=n {
        let mut row: Vec<(u64, Scalar)> = Vec::new();
        for k in 1..=n {
            if rng.gen_bool(p) {
                row.push((k, random_weight(rng)));
            }
        }
        if !row.is_empty() {
            rows.insert(i, row);
        }
    }
    EvolutionStructure::finite(crate::families::ExplicitRows { mode: ScalarMode::Exact, n, rows })
        .expect("generated rows are valid")
}
