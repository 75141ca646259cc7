use std::collections::BTreeSet;

use hevo_core::families::{family_depth_oracle, HubAlpha};
use hevo_core::graph::{depth, enumerate_row, find_oriented_cycle, DepthVerdict};
use hevo_core::scalar::rational;
use hevo_core::{build_family, Depth, EvolutionStructure, FamilySpec, VertexId};

const WINDOW: u64 = 50;

fn v(i: u64) -> VertexId {
    VertexId::new(i)
}

fn catalogue() -> Vec<FamilySpec> {
    vec![
        FamilySpec::rary_tree(2),
        FamilySpec::rary_tree(3),
        FamilySpec::markov_line(),
        FamilySpec::alt_line_b(),
        FamilySpec::alt_line_c0(),
        FamilySpec::hub_line(HubAlpha::Geometric { ratio: rational(1, 2) }),
        FamilySpec::hub_line(HubAlpha::Paired { ratio: rational(1, 3) }),
        FamilySpec::comb(),
        FamilySpec::growing_teeth(),
    ]
}

/// Edges `i -> k` with both ends in the window, read off the rows.
fn window_edges(s: &EvolutionStructure) -> BTreeSet<(VertexId, VertexId)> {
    let mut edges = BTreeSet::new();
    for i in 1..=WINDOW {
        for (k, w) in s.row_of(v(i)).into_entries().take_while(|(k, _)| k.get() <= WINDOW) {
            assert!(!w.is_zero(), "zero weight stored at ({i}, {k:?})");
            edges.insert((v(i), k));
        }
    }
    edges
}

#[test]
fn columns_agree_with_rows() {
    for spec in catalogue() {
        let s = build_family(&spec).unwrap();
        let rows = window_edges(&s);
        let mut cols = BTreeSet::new();
        for k in 1..=WINDOW {
            for (i, w) in s.column_of(v(k)).unwrap().into_entries().take_while(|(i, _)| i.get() <= WINDOW) {
                assert_eq!(s.weight(i, v(k)), Some(w), "{}: column {k} entry {i:?}", spec.name());
                cols.insert((i, v(k)));
            }
        }
        assert_eq!(rows, cols, "{}", spec.name());
    }
}

#[test]
fn cycle_metadata_matches_search() {
    for spec in catalogue() {
        let s = build_family(&spec).unwrap();
        let cycle_free = s.meta().and_then(|m| m.cycle_free).unwrap();
        let found = find_oriented_cycle(&s, WINDOW, 1 << 20);
        assert_eq!(found.is_none(), cycle_free, "{}", spec.name());
    }
}

#[test]
fn local_finiteness_metadata() {
    for spec in catalogue() {
        let s = build_family(&spec).unwrap();
        let all_rows_finite = (1..=WINDOW).all(|i| s.row_of(v(i)).is_finite());
        let claimed = s.meta().and_then(|m| m.locally_finite).unwrap();
        if claimed {
            assert!(all_rows_finite, "{}", spec.name());
        } else {
            assert!((1..=WINDOW).any(|i| !enumerate_row(&s, v(i), 200).1), "{}: no row longer than 200", spec.name());
        }
    }
}

#[test]
fn depth_oracles_match_exploration() {
    for spec in catalogue() {
        let s = build_family(&spec).unwrap();
        for i in 1..=WINDOW {
            let claimed = family_depth_oracle(&spec, v(i)).unwrap();
            let explored = depth(&s, v(i), 64);
            match claimed {
                Depth::Finite(d) => assert_eq!(explored, DepthVerdict::Exact(d), "{} at {i}", spec.name()),
                Depth::Infinite => {
                    assert!(!matches!(explored, DepthVerdict::Exact(_)), "{} at {i}: {explored:?}", spec.name())
                }
            }
        }
    }
}

#[test]
fn sup_depth_metadata() {
    for spec in catalogue() {
        let s = build_family(&spec).unwrap();
        let meta = s.meta().unwrap();
        let depths: Vec<Depth> = (1..=WINDOW).map(|i| family_depth_oracle(&spec, v(i)).unwrap()).collect();
        match meta.sup_depth.unwrap() {
            Depth::Finite(bound) => {
                assert!(depths.iter().all(|d| matches!(d, Depth::Finite(x) if *x <= bound)), "{}", spec.name());
                assert!(depths.contains(&Depth::Finite(bound)), "{}", spec.name());
            }
            Depth::Infinite => {
                if meta.all_depths_finite == Some(true) {
                    let max = depths.iter().filter_map(|d| if let Depth::Finite(x) = d { Some(*x) } else { None }).max();
                    assert!(max.unwrap() >= 5, "{}", spec.name());
                }
            }
        }
    }
}

#[test]
fn explicit_structures_have_no_depth_oracle() {
    let spec = hevo_core::io::spec_from_value(&serde_json::json!({
        "mode": "exact", "universe": "finite:2", "rows": {"1": [[2, "1/1"]]}
    }))
    .unwrap();
    assert!(family_depth_oracle(&spec, v(1)).is_err());
}
