//! Budgeted graph queries over [`EvolutionStructure`]s.
//!
//! Budgets count row entries enumerated, so rows with infinitely many
//! entries still terminate predictably. Absence of a result is never a
//! certificate unless the whole (finite) structure was explored.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::structure::{Entry, EvolutionStructure, Universe, VertexId};

/// Entries allowed per unit of distance in [`depth`].
pub const ENTRIES_PER_LEVEL: u64 = 1024;

/// First `limit` entries of row `i`, and whether the row ended within them.
pub fn enumerate_row(s: &EvolutionStructure, i: VertexId, limit: usize) -> (Vec<Entry>, bool) {
    let mut it = s.row_of(i).into_entries();
    let entries: Vec<Entry> = it.by_ref().take(limit).collect();
    let exhausted = entries.len() < limit || it.next().is_none();
    (entries, exhausted)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenerationResult {
    pub generation: u64,
    pub members: BTreeSet<VertexId>,
    pub truncated: bool,
    /// Minimal generation (≤ `generation`) at which each vertex appeared.
    pub first_hit: BTreeMap<VertexId, u64>,
}

/// `D^m(U)`, with `D^0(U) = U`.
///
/// When a row is cut short by the budget the result is flagged `truncated`
/// and `members` is a subset of the true generation.
pub fn descendants_generation(
    s: &EvolutionStructure,
    sources: &BTreeSet<VertexId>,
    m: u64,
    budget: u64,
) -> Result<GenerationResult> {
    if budget == 0 && !sources.is_empty() && m > 0 {
        return Err(Error::BudgetZero);
    }
    let mut first_hit: BTreeMap<VertexId, u64> = sources.iter().map(|&u| (u, 0)).collect();
    let mut current = sources.clone();
    let mut remaining = budget;
    let mut truncated = false;
    for generation in 1..=m {
        let mut next = BTreeSet::new();
        'rows: for &v in &current {
            for (k, _) in s.row_of(v).into_entries() {
                if remaining == 0 {
                    truncated = true;
                    break 'rows;
                }
                remaining -= 1;
                next.insert(k);
                first_hit.entry(k).or_insert(generation);
            }
        }
        current = next;
        if current.is_empty() {
            break;
        }
    }
    Ok(GenerationResult { generation: m, members: current, truncated, first_hit })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "reason", content = "path")]
pub enum InfiniteReason {
    CycleReachable(Vec<VertexId>),
    FamilyOracle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum DepthVerdict {
    Exact(u64),
    AtLeast(u64),
    InfiniteCertified(InfiniteReason),
}

/// Depth `δ(G_i)` with a distance horizon of `budget` levels.
///
/// A reachable oriented cycle counts as infinite depth (generations from `i`
/// never die out). A sink has depth 0.
pub fn depth(s: &EvolutionStructure, i: VertexId, budget: u64) -> DepthVerdict {
    depth_within(s, i, budget, budget.saturating_mul(ENTRIES_PER_LEVEL))
}

/// [`depth`] with explicit distance and entry limits.
pub fn depth_within(s: &EvolutionStructure, i: VertexId, max_distance: u64, max_entries: u64) -> DepthVerdict {
    if s.depth_oracle(i) == Some(crate::structure::Depth::Infinite) {
        return DepthVerdict::InfiniteCertified(InfiniteReason::FamilyOracle);
    }
    let bfs = BfsTree::explore(s, i, max_distance, max_entries);
    if !bfs.complete {
        return DepthVerdict::AtLeast(bfs.max_distance);
    }
    let succ = |v: VertexId| Some(bfs.edges.get(&v).cloned().unwrap_or_default());
    if let CycleSearch::Found(path) = dfs_cycle(bfs.dist.keys().copied(), succ) {
        return DepthVerdict::InfiniteCertified(InfiniteReason::CycleReachable(path));
    }
    DepthVerdict::Exact(bfs.max_distance)
}

/// Shortest-path BFS tree from one vertex.
pub(crate) struct BfsTree {
    pub dist: BTreeMap<VertexId, u64>,
    pub parent: BTreeMap<VertexId, VertexId>,
    pub edges: BTreeMap<VertexId, Vec<VertexId>>,
    pub max_distance: u64,
    /// All of `D(i)` was explored with every row fully enumerated.
    pub complete: bool,
}

impl BfsTree {
    pub fn explore(s: &EvolutionStructure, root: VertexId, max_distance: u64, max_entries: u64) -> Self {
        let mut dist = BTreeMap::from([(root, 0u64)]);
        let mut parent = BTreeMap::new();
        let mut edges: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        let mut frontier = vec![root];
        let mut d = 0u64;
        let mut max_seen = 0u64;
        let mut entries = 0u64;
        while !frontier.is_empty() {
            if d >= max_distance {
                return BfsTree { dist, parent, edges, max_distance: max_seen, complete: false };
            }
            let mut next = Vec::new();
            for &v in &frontier {
                let out = edges.entry(v).or_default();
                for (k, _) in s.row_of(v).into_entries() {
                    if entries >= max_entries {
                        return BfsTree { dist, parent, edges, max_distance: max_seen, complete: false };
                    }
                    entries += 1;
                    out.push(k);
                    if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(k) {
                        e.insert(d + 1);
                        parent.insert(k, v);
                        max_seen = max_seen.max(d + 1);
                        next.push(k);
                    }
                }
            }
            frontier = next;
            d += 1;
        }
        BfsTree { dist, parent, edges, max_distance: max_seen, complete: true }
    }

    /// Root-to-`v` shortest path.
    pub fn path_to(&self, v: VertexId) -> Vec<VertexId> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(&p) = self.parent.get(&cur) {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }
}

pub(crate) enum CycleSearch {
    Found(Vec<VertexId>),
    NoneFound,
    BudgetExhausted,
}

/// Iterative three-colour DFS. `succ` returns `None` when the budget runs out.
/// A returned cycle starts and ends at the same vertex and repeats nothing else.
pub(crate) fn dfs_cycle<I, F>(roots: I, mut succ: F) -> CycleSearch
where
    I: IntoIterator<Item = VertexId>,
    F: FnMut(VertexId) -> Option<Vec<VertexId>>,
{
    #[derive(Clone, Copy, PartialEq)]
    enum Colour {
        Grey,
        Black,
    }
    let mut colour: HashMap<VertexId, Colour> = HashMap::new();
    for root in roots {
        if colour.contains_key(&root) {
            continue;
        }
        let Some(out) = succ(root) else { return CycleSearch::BudgetExhausted };
        colour.insert(root, Colour::Grey);
        let mut stack: Vec<(VertexId, Vec<VertexId>, usize)> = vec![(root, out, 0)];
        while let Some((v, out, pos)) = stack.last_mut() {
            if *pos == out.len() {
                colour.insert(*v, Colour::Black);
                stack.pop();
                continue;
            }
            let w = out[*pos];
            *pos += 1;
            match colour.get(&w) {
                Some(Colour::Grey) => {
                    let start = stack.iter().position(|(u, _, _)| *u == w).expect("grey vertex is on the stack");
                    let mut cycle: Vec<VertexId> = stack[start..].iter().map(|(u, _, _)| *u).collect();
                    cycle.push(w);
                    return CycleSearch::Found(cycle);
                }
                Some(Colour::Black) => {}
                None => {
                    let Some(next) = succ(w) else { return CycleSearch::BudgetExhausted };
                    colour.insert(w, Colour::Grey);
                    stack.push((w, next, 0));
                }
            }
        }
    }
    CycleSearch::NoneFound
}

/// Out-neighbours of `v` inside `1..=window`; `None` if the entry budget ran
/// out. Relies on rows being sorted to stop at the window edge.
pub(crate) fn window_successors(
    s: &EvolutionStructure,
    v: VertexId,
    window: u64,
    remaining: &mut u64,
) -> Option<Vec<VertexId>> {
    let mut out = Vec::new();
    for (k, _) in s.row_of(v).into_entries() {
        if *remaining == 0 {
            return None;
        }
        *remaining -= 1;
        if k.get() > window {
            break;
        }
        out.push(k);
    }
    Some(out)
}

/// Searches the subgraph induced on `1..=window` for an oriented cycle.
///
/// Sound but not complete: `None` means "none found within window and
/// budget", except for finite universes fully covered by the window with the
/// budget left unexhausted (see [`cycle_search_complete`]).
pub fn find_oriented_cycle(s: &EvolutionStructure, window: u64, budget: u64) -> Option<Vec<VertexId>> {
    match windowed_cycle_search(s, window, budget) {
        CycleSearch::Found(c) => Some(c),
        _ => None,
    }
}

pub(crate) fn windowed_cycle_search(s: &EvolutionStructure, window: u64, budget: u64) -> CycleSearch {
    let window = s.universe().clamp(window);
    let mut remaining = budget;
    dfs_cycle((1..=window).map(VertexId::new), |v| window_successors(s, v, window, &mut remaining))
}

/// True when a cycle search with this window and budget decides acyclicity
/// of the whole structure.
pub fn cycle_search_complete(s: &EvolutionStructure, window: u64, budget: u64) -> bool {
    match s.universe() {
        Universe::Finite(n) if window >= n => {
            !matches!(windowed_cycle_search(s, window, budget), CycleSearch::BudgetExhausted)
        }
        _ => false,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Out,
    In,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum DegreeCount {
    Exact(u64),
    AtLeastCap,
}

pub fn degree(s: &EvolutionStructure, i: VertexId, direction: Direction, cap: u64) -> Result<DegreeCount> {
    let row = match direction {
        Direction::Out => s.row_of(i),
        Direction::In => s.column_of(i)?,
    };
    let mut it = row.into_entries();
    let seen = it.by_ref().take(cap as usize).count() as u64;
    if seen == cap && it.next().is_some() {
        Ok(DegreeCount::AtLeastCap)
    } else {
        Ok(DegreeCount::Exact(seen))
    }
}

/// DOT text for the subgraph induced on `1..=window`.
pub fn export_window_dot(s: &EvolutionStructure, window: u64) -> String {
    let window = s.universe().clamp(window);
    let mut out = String::from("digraph G {\n");
    for v in 1..=window {
        let _ = writeln!(out, "  {v};");
    }
    for v in 1..=window {
        for (k, w) in s.row_of(VertexId::new(v)).into_entries() {
            if k.get() > window {
                break;
            }
            let _ = writeln!(out, "  {v} -> {k} [label=\"{}\"];", edge_label(&w));
        }
    }
    out.push_str("}\n");
    out
}

fn edge_label(w: &Scalar) -> String {
    w.to_string()
}

/// Checks that consecutive vertices of `path` are joined by nonzero-weight
/// edges.
pub fn validate_path(s: &EvolutionStructure, path: &[VertexId]) -> bool {
    path.windows(2).all(|e| s.weight(e[0], e[1]).is_some_and(|w| !w.is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_family, FamilySpec};

    fn v(i: u64) -> VertexId {
        VertexId::new(i)
    }

    fn set(ids: &[u64]) -> BTreeSet<VertexId> {
        ids.iter().map(|&i| v(i)).collect()
    }

    #[test]
    fn path_generation_two_is_empty() {
        let s = EvolutionStructure::finite_rational(2, &[(1, &[(2, (1, 1))])]).unwrap();
        let g = descendants_generation(&s, &set(&[1]), 2, 100).unwrap();
        assert!(g.members.is_empty());
        assert!(!g.truncated);
        assert_eq!(g.first_hit[&v(2)], 1);
    }

    #[test]
    fn generation_zero_is_the_source_set() {
        let s = build_family(&FamilySpec::comb()).unwrap();
        let g = descendants_generation(&s, &set(&[2, 6]), 0, 0).unwrap();
        assert_eq!(g.members, set(&[2, 6]));
    }

    #[test]
    fn zero_budget_is_rejected() {
        let s = build_family(&FamilySpec::comb()).unwrap();
        assert_eq!(descendants_generation(&s, &set(&[2]), 1, 0), Err(Error::BudgetZero));
        assert!(descendants_generation(&s, &BTreeSet::new(), 1, 0).is_ok());
    }

    #[test]
    fn self_loop_and_two_cycle_found() {
        let s = EvolutionStructure::finite_rational(1, &[(1, &[(1, (1, 1))])]).unwrap();
        assert_eq!(find_oriented_cycle(&s, 1, 10), Some(vec![v(1), v(1)]));
        let s = EvolutionStructure::finite_rational(2, &[(1, &[(2, (1, 1))]), (2, &[(1, (1, 1))])]).unwrap();
        assert_eq!(find_oriented_cycle(&s, 2, 10), Some(vec![v(1), v(2), v(1)]));
        assert!(cycle_search_complete(&s, 2, 10));
    }

    #[test]
    fn cycle_search_budget_exhaustion_is_not_a_certificate() {
        let s = EvolutionStructure::finite_rational(3, &[(1, &[(2, (1, 1))]), (2, &[(3, (1, 1))]), (3, &[(1, (1, 1))])])
            .unwrap();
        assert_eq!(find_oriented_cycle(&s, 3, 2), None);
        assert!(!cycle_search_complete(&s, 3, 2));
        assert_eq!(find_oriented_cycle(&s, 3, 3), Some(vec![v(1), v(2), v(3), v(1)]));
    }

    #[test]
    fn sink_depth_is_zero_and_cycles_are_infinite() {
        let s = EvolutionStructure::finite_rational(2, &[(1, &[(2, (1, 1))])]).unwrap();
        assert_eq!(depth(&s, v(2), 5), DepthVerdict::Exact(0));
        assert_eq!(depth(&s, v(1), 5), DepthVerdict::Exact(1));
        let c = EvolutionStructure::finite_rational(3, &[(1, &[(2, (1, 1))]), (2, &[(3, (1, 1))]), (3, &[(2, (1, 1))])])
            .unwrap();
        assert_eq!(
            depth(&c, v(1), 10),
            DepthVerdict::InfiniteCertified(InfiniteReason::CycleReachable(vec![v(2), v(3), v(2)]))
        );
    }

    #[test]
    fn shortcut_edges_use_shortest_distance() {
        // 1 -> 2 -> 3 and 1 -> 3: depth 1
        let s = EvolutionStructure::finite_rational(3, &[(1, &[(2, (1, 1)), (3, (1, 1))]), (2, &[(3, (1, 1))])])
            .unwrap();
        assert_eq!(depth(&s, v(1), 10), DepthVerdict::Exact(1));
    }

    #[test]
    fn dot_export_shapes() {
        let empty = EvolutionStructure::finite_rational(3, &[]).unwrap();
        assert_eq!(export_window_dot(&empty, 3), "digraph G {\n  1;\n  2;\n  3;\n}\n");
        let path = EvolutionStructure::finite_rational(2, &[(1, &[(2, (3, 4))])]).unwrap();
        let dot = export_window_dot(&path, 2);
        assert_eq!(dot.matches("->").count(), 1);
        assert!(dot.contains("1 -> 2 [label=\"3/4\"];"));
    }

    #[test]
    fn degrees() {
        let s = EvolutionStructure::finite_rational(3, &[(1, &[(2, (1, 1)), (3, (1, 1))]), (2, &[(3, (1, 1))])])
            .unwrap();
        assert_eq!(degree(&s, v(1), Direction::Out, 10), Ok(DegreeCount::Exact(2)));
        assert_eq!(degree(&s, v(1), Direction::Out, 1), Ok(DegreeCount::AtLeastCap));
        assert_eq!(degree(&s, v(1), Direction::Out, 2), Ok(DegreeCount::Exact(2)));
        assert_eq!(degree(&s, v(3), Direction::In, 10), Ok(DegreeCount::Exact(2)));
    }

    #[test]
    fn path_validation() {
        let s = EvolutionStructure::finite_rational(3, &[(1, &[(2, (1, 1))]), (2, &[(3, (1, 1))])]).unwrap();
        assert!(validate_path(&s, &[v(1), v(2), v(3)]));
        assert!(!validate_path(&s, &[v(1), v(3)]));
    }
}
