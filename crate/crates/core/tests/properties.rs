use proptest::prelude::*;

use ncmoment::corrlab::{
    chsh_win_probability, classical_membership, factorize, gram_of_synchronous,
    gram_to_realization, projector_realization, random_projector_family,
    synchronous_from_projectors, Realization, Verdict,
};
use ncmoment::entdim::{xi_q, Correlation, EntDimConfig, Scenario};
use ncmoment::graphs::Graph;
use ncmoment::qgraph::{self, GammaKind, GraphBounds, Strengthening};

fn random_graph(n: usize, mask: u32) -> Graph {
    let mut edges = Vec::new();
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if mask >> bit & 1 == 1 {
                edges.push((i, j));
            }
            bit += 1;
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Convex combination of deterministic CHSH strategies.
fn local_mixture(weights: &[f64]) -> Correlation {
    let total: f64 = weights.iter().sum();
    let sc = Scenario::chsh();
    let mut table = vec![0.0; sc.size()];
    for (k, w) in weights.iter().enumerate() {
        let d = Correlation::deterministic(sc, &[k & 1, k >> 1 & 1], &[k >> 2 & 1, k >> 3 & 1])
            .unwrap();
        for (t, x) in table.iter_mut().zip(d.table()) {
            *t += w / total * x;
        }
    }
    Correlation::new(sc, table).unwrap()
}

fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut s = seed;
    for i in (1..n).rev() {
        s = s
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        p.swap(i, (s >> 33) as usize % (i + 1));
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn entdim_levels_are_monotone_and_at_least_one(seed in any::<u64>(), d in 1usize..=2) {
        let p = Realization::random(Scenario::chsh(), d, seed).unwrap().realize().unwrap();
        let cfg = EntDimConfig::default();
        let v1 = xi_q(&p, 1, &cfg).unwrap().value;
        let v2 = xi_q(&p, 2, &cfg).unwrap().value;
        prop_assert!(v1 >= 1.0 - 1e-6);
        prop_assert!(v2 >= v1 - 1e-6, "{v1} {v2}");
        prop_assert!(v2 <= (d * d) as f64 + 1e-4);
    }

    #[test]
    fn entdim_is_invariant_under_relabeling(seed in any::<u64>()) {
        let sc = Scenario::new(3, 2, 2, 2).unwrap();
        let p = Realization::random(sc, 2, seed).unwrap().realize().unwrap();
        let q = p
            .relabeled(&permutation(3, seed), &permutation(2, seed >> 8), &permutation(2, seed >> 16), &permutation(2, seed >> 24))
            .unwrap();
        let cfg = EntDimConfig::default();
        let a = xi_q(&p, 2, &cfg).unwrap().value;
        let b = xi_q(&q, 2, &cfg).unwrap().value;
        prop_assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn classical_certificates_imply_trivial_entdim(weights in prop::collection::vec(0.01f64..1.0, 16)) {
        let p = local_mixture(&weights);
        let cert = classical_membership(&p).unwrap();
        prop_assert_eq!(cert.verdict, Verdict::Classical);
        for r in 1..=2 {
            let v = xi_q(&p, r, &EntDimConfig::default()).unwrap().value;
            prop_assert!((v - 1.0).abs() < 1e-4, "r={} {}", r, v);
        }
    }

    #[test]
    fn gamma_feasibility_is_monotone_in_k(n in 2usize..=4, mask in any::<u32>()) {
        let g = random_graph(n, mask);
        let b = GraphBounds::default();
        let col: Vec<bool> = (1..=n).map(|k| b.gamma_feasible(&g, GammaKind::Col, k, 1).unwrap().0).collect();
        prop_assert!(col.windows(2).all(|w| !w[0] || w[1]), "{:?}", col);
        prop_assert!(col[n - 1]);
        let stab: Vec<bool> = (1..=n).map(|k| b.gamma_feasible(&g, GammaKind::Stab, k, 1).unwrap().0).collect();
        prop_assert!(stab.windows(2).all(|w| w[0] || !w[1]), "{:?}", stab);
        prop_assert!(stab[0]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn classical_chsh_never_beats_three_quarters(weights in prop::collection::vec(0.0f64..1.0, 16)) {
        prop_assume!(weights.iter().sum::<f64>() > 1e-3);
        let p = local_mixture(&weights);
        prop_assert_eq!(classical_membership(&p).unwrap().verdict, Verdict::Classical);
        prop_assert!(chsh_win_probability(&p).unwrap() <= 0.75 + 1e-9);
    }

    #[test]
    fn synchronous_gram_is_psd(seed in any::<u64>(), d in 1usize..=3, q in 1usize..=3, a in 2usize..=3) {
        let fam = random_projector_family(d, q, a, seed).unwrap();
        let p = synchronous_from_projectors(&fam, d).unwrap();
        prop_assert!(p.is_synchronous(1e-10));
        let g = gram_of_synchronous(&p).unwrap();
        prop_assert!(g.min_eigenvalue() >= -1e-9, "{}", g.min_eigenvalue());
        prop_assert!(g.asymmetry() < 1e-12);
    }

    #[test]
    fn appendix_round_trip_reproduces_p(seed in any::<u64>(), d in 1usize..=3, q in 1usize..=3, a in 2usize..=3) {
        let fam = random_projector_family(d, q, a, seed).unwrap();
        let p = synchronous_from_projectors(&fam, d).unwrap();
        let gram = factorize(&projector_realization(&fam, d).unwrap()).unwrap();
        let back = gram_to_realization(gram.factors.as_ref().unwrap()).unwrap().realize().unwrap();
        for (x, y) in p.table().iter().zip(back.table()) {
            prop_assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn realization_and_correlation_json_round_trip(seed in any::<u64>(), d in 1usize..=3) {
        let r = Realization::random(Scenario::new(2, 3, 2, 1).unwrap(), d, seed).unwrap();
        prop_assert_eq!(Realization::from_json(&r.to_json().unwrap()).unwrap(), r.clone());
        let p = r.realize().unwrap();
        prop_assert_eq!(Correlation::from_json(&p.to_json().unwrap()).unwrap(), p);
    }

    #[test]
    fn graph_bounds_sandwich_the_integer_parameters(n in 2usize..=6, mask in any::<u32>()) {
        let g = random_graph(n, mask);
        let theta = qgraph::theta(&g).unwrap().value;
        let xs = qgraph::xi_stab(&g, 1).unwrap().value;
        prop_assert!((theta - xs).abs() < 1e-4, "{theta} vs {xs}");
        prop_assert!(xs >= g.stability_number() as f64 - 1e-5);
        let xc = qgraph::xi_col(&g, 1, Strengthening::None).unwrap().value;
        prop_assert!(xc <= g.chromatic_number() as f64 + 1e-5);
        prop_assert!(xs * xc >= n as f64 - 1e-3);
    }
}
