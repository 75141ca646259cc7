use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hevo_core::algebra::{multiply, square_basis};
use hevo_core::graph::{depth, descendants_generation, DepthVerdict};
use hevo_core::nilpotency::{brute_force_nilpotent, nilpotency_index, random_finite_structure, IndexVerdict};
use hevo_core::operator::{apply_operator, frobenius_certificate, matrix_window, OperatorKind};
use hevo_core::{build_family, Element, EvolutionStructure, FamilySpec, Scalar, VertexId};

fn v(i: u64) -> VertexId {
    VertexId::new(i)
}

fn setup(seed: u64, n: u64, p: f64) -> (EvolutionStructure, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = random_finite_structure(&mut rng, n, p);
    (s, rng)
}

fn exact_product(s: &EvolutionStructure, x: &Element, y: &Element) -> Element {
    multiply(s, x, y, None).unwrap().into_exact().unwrap()
}

fn all(n: u64) -> Vec<VertexId> {
    (1..=n).map(v).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_commutative(seed: u64, n in 1u64..=7, p in 0.1f64..0.7) {
        let (s, mut rng) = setup(seed, n, p);
        let x = Element::random_rational(&mut rng, &all(n), 4);
        let y = Element::random_rational(&mut rng, &all(n), 4);
        prop_assert_eq!(exact_product(&s, &x, &y), exact_product(&s, &y, &x));
    }

    #[test]
    fn product_is_bilinear(seed: u64, n in 1u64..=7, p in 0.1f64..0.7, a in -5i64..=5) {
        let (s, mut rng) = setup(seed, n, p);
        let x = Element::random_rational(&mut rng, &all(n), 4);
        let y = Element::random_rational(&mut rng, &all(n), 4);
        let z = Element::random_rational(&mut rng, &all(n), 4);
        let a = Scalar::integer(a);
        let lhs = exact_product(&s, &x.scale(&a).add(&y), &z);
        let rhs = exact_product(&s, &x, &z).scale(&a).add(&exact_product(&s, &y, &z));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn basis_products_follow_the_table(seed: u64, n in 1u64..=7, p in 0.1f64..0.7) {
        let (s, _) = setup(seed, n, p);
        for i in 1..=n {
            for j in 1..=n {
                let prod = exact_product(&s, &Element::basis(v(i), s.mode()), &Element::basis(v(j), s.mode()));
                if i != j {
                    prop_assert!(prod.is_zero());
                } else {
                    let row = Element::from_terms(s.row_of(v(i)).into_entries());
                    prop_assert_eq!(prod, row);
                }
            }
        }
    }

    #[test]
    fn generations_compose(seed: u64, n in 1u64..=8, p in 0.1f64..0.5, m in 0u64..=4, mask in 1u32..256) {
        let (s, _) = setup(seed, n, p);
        let u: BTreeSet<VertexId> = (1..=n).filter(|i| mask & (1 << (i - 1)) != 0).map(v).collect();
        let direct = descendants_generation(&s, &u, m + 1, u64::MAX).unwrap();
        let step = descendants_generation(&s, &u, m, u64::MAX).unwrap();
        let again = descendants_generation(&s, &step.members, 1, u64::MAX).unwrap();
        prop_assert!(!direct.truncated);
        prop_assert_eq!(direct.members, again.members);
    }

    #[test]
    fn index_matches_subspace_chain(seed: u64, n in 1u64..=6, p in 0.05f64..0.4) {
        let (s, _) = setup(seed, n, p);
        let brute = brute_force_nilpotent(&s, seed).unwrap();
        match nilpotency_index(&s, n) {
            IndexVerdict::Exact(k) => prop_assert_eq!(brute.index, Some(k)),
            IndexVerdict::Unbounded => prop_assert!(!brute.nilpotent),
            other => prop_assert!(false, "unexpected {:?}", other),
        }
    }

    #[test]
    fn frobenius_bound_dominates(seed: u64, n in 1u64..=8, p in 0.1f64..0.7) {
        let (s, mut rng) = setup(seed, n, p);
        let cert = frobenius_certificate(&s, n);
        let m = cert.bound.unwrap();
        for _ in 0..10 {
            let x = Element::random_rational(&mut rng, &all(n), 5);
            let y = apply_operator(&s, OperatorKind::WeightedAdjacency, &x, None).unwrap();
            prop_assert!(y.prefix().norm() <= m * x.norm() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn depth_drops_along_edges(i in 1u64..300) {
        let s = build_family(&FamilySpec::growing_teeth()).unwrap();
        let DepthVerdict::Exact(d) = depth(&s, v(i), 64) else { panic!("no exact depth at {i}") };
        let children: Vec<u64> = s
            .row_of(v(i))
            .into_entries()
            .map(|(k, _)| match depth(&s, k, 64) {
                DepthVerdict::Exact(dk) => dk,
                other => panic!("child {k:?}: {other:?}"),
            })
            .collect();
        match children.iter().max() {
            Some(&top) => prop_assert_eq!(d, top + 1),
            None => prop_assert_eq!(d, 0),
        }
    }

    #[test]
    fn truncated_square_brackets_the_tail(cutoff in 2u64..200) {
        // markov hub row: e_1² = Σ_{j≥2} (1/2)^{j−1} e_j
        let s = build_family(&FamilySpec::markov_line()).unwrap();
        let sq = square_basis(&s, v(1), Some(cutoff)).unwrap();
        prop_assert!(!sq.is_exact());
        prop_assert!(sq.prefix().max_vertex().is_none_or(|k| k.get() <= cutoff));
        prop_assert_eq!(sq.prefix().len() as u64, cutoff - 1);
        // Σ_{j>cutoff} 4^{-(j−1)} = 4^{-cutoff} / (1 − 1/4)
        let true_tail = (0.25f64.powi(cutoff as i32) / 0.75).sqrt();
        prop_assert!(sq.tail_bound() >= true_tail * (1.0 - 1e-12));
        let wider = square_basis(&s, v(1), Some(cutoff + 1)).unwrap();
        prop_assert!(wider.tail_bound() <= sq.tail_bound());
    }
}

#[test]
fn gamma_window_is_the_conjugate_transpose() {
    for spec in [FamilySpec::comb(), FamilySpec::markov_line(), FamilySpec::alt_line_b()] {
        let s = build_family(&spec).unwrap();
        let omega = matrix_window(&s, OperatorKind::WeightedAdjacency, 20);
        let gamma = matrix_window(&s, OperatorKind::WeightedAdjoint, 20);
        assert_eq!(gamma.entries, omega.conj_transpose().entries, "{}", spec.name());
    }
}
