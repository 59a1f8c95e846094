use num_complex::Complex64;

use super::*;
use crate::entdim::{Correlation, Scenario};

fn pr_box() -> Correlation {
    Correlation::from_fn(
        Scenario::chsh(),
        |a, b, s, t| if (a ^ b) == (s & t) { 0.5 } else { 0.0 },
    )
    .unwrap()
}

fn rank_one(v: [f64; 2]) -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| Complex64::new(v[i] * v[j], 0.0))
}

fn angle_family(theta: f64) -> Vec<Vec<CMatrix>> {
    let (c, s) = (theta.cos(), theta.sin());
    vec![
        vec![rank_one([1.0, 0.0]), rank_one([0.0, 1.0])],
        vec![rank_one([c, s]), rank_one([-s, c])],
    ]
}

#[test]
fn tsirelson_reaches_two_root_two() {
    let p = Realization::tsirelson_chsh().realize().unwrap();
    let v = chsh_value(&p).unwrap();
    assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-9, "{v}");
    let w = chsh_win_probability(&p).unwrap();
    assert!((w - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-9);
}

#[test]
fn random_realizations_are_normalized() {
    for seed in 0..5 {
        let r = Realization::random(Scenario::new(3, 2, 2, 3).unwrap(), 2, seed).unwrap();
        let p = r.realize().unwrap();
        let sc = p.scenario();
        for s in 0..sc.s {
            for t in 0..sc.t {
                let sum: f64 = (0..sc.a)
                    .flat_map(|a| (0..sc.b).map(move |b| (a, b)))
                    .map(|(a, b)| p.get(a, b, s, t))
                    .sum();
                assert!((sum - 1.0).abs() < 1e-12);
            }
        }
        assert!(p.signalling() < 1e-12);
    }
}

#[test]
fn scalar_realizations_are_classical() {
    let r = Realization::random(Scenario::chsh(), 1, 7).unwrap();
    let cert = classical_membership(&r.realize().unwrap()).unwrap();
    assert_eq!(cert.verdict, Verdict::Classical);
    let det = Realization::deterministic(Scenario::chsh(), &[1, 0], &[0, 0]).unwrap();
    let p = det.realize().unwrap();
    assert_eq!(
        p,
        Correlation::deterministic(Scenario::chsh(), &[1, 0], &[0, 0]).unwrap()
    );
}

#[test]
fn invalid_realizations_name_the_failing_part() {
    let r = Realization::tsirelson_chsh();
    let mut e = r.alice().to_vec();
    e[1][0] = e[1][0].map(|z| z * 1.1);
    let err = Realization::new(2, r.state().clone(), e, r.bob().to_vec()).unwrap_err();
    assert!(err.to_string().contains("E[1]"), "{err}");
    let err = Realization::new(
        2,
        r.state() * Complex64::new(2.0, 0.0),
        r.alice().to_vec(),
        r.bob().to_vec(),
    )
    .unwrap_err();
    assert!(err.to_string().contains("norm"), "{err}");
}

#[test]
fn realization_json_round_trip() {
    let r = Realization::random(Scenario::chsh(), 2, 3).unwrap();
    let back = Realization::from_json(&r.to_json().unwrap()).unwrap();
    assert_eq!(back, r);
}

#[test]
fn angle_projectors_give_sine_squared_entries() {
    for theta in [0.0, 0.3, 1.0, std::f64::consts::FRAC_PI_2] {
        let p = synchronous_from_projectors(&angle_family(theta), 2).unwrap();
        let s2 = theta.sin().powi(2);
        assert!((p.get(0, 1, 0, 1) - s2 / 2.0).abs() < 1e-12);
        assert!((p.get(0, 0, 0, 1) - (1.0 - s2) / 2.0).abs() < 1e-12);
        assert!(p.is_synchronous(1e-10));
    }
}

#[test]
fn diagonal_projectors_are_classical() {
    let d = |a: f64, b: f64, c: f64| {
        CMatrix::from_diagonal(
            &nalgebra::DVector::from_vec(vec![a, b, c]).map(|x| Complex64::new(x, 0.0)),
        )
    };
    let fam = vec![
        vec![d(1.0, 1.0, 0.0), d(0.0, 0.0, 1.0)],
        vec![d(1.0, 0.0, 0.0), d(0.0, 1.0, 1.0)],
    ];
    let p = synchronous_from_projectors(&fam, 3).unwrap();
    assert_eq!(
        classical_membership(&p).unwrap().verdict,
        Verdict::Classical
    );
}

#[test]
fn projector_realization_matches_trace_formula() {
    let fam = random_projector_family(3, 2, 3, 11).unwrap();
    let direct = synchronous_from_projectors(&fam, 3).unwrap();
    let via = projector_realization(&fam, 3).unwrap().realize().unwrap();
    for (x, y) in direct.table().iter().zip(via.table()) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn random_synchronous_gram_is_psd_and_round_trips() {
    for seed in 0..6 {
        let fam = random_projector_family(2, 3, 2, seed).unwrap();
        let p = synchronous_from_projectors(&fam, 2).unwrap();
        let g = gram_of_synchronous(&p).unwrap();
        assert!(g.min_eigenvalue() >= -1e-10, "{}", g.min_eigenvalue());

        let f = factorize(&projector_realization(&fam, 2).unwrap()).unwrap();
        assert!(f.factorization_error().unwrap() < 1e-10);
        let back = gram_to_realization(f.factors.as_ref().unwrap())
            .unwrap()
            .realize()
            .unwrap();
        for (x, y) in p.table().iter().zip(back.table()) {
            assert!((x - y).abs() < 1e-8);
        }
    }
}

#[test]
fn nonsynchronous_input_is_rejected() {
    assert!(gram_of_synchronous(&Realization::tsirelson_chsh().realize().unwrap()).is_err());
}

#[test]
fn singular_row_sum_is_reported_with_its_eigenvalue() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let pad = |m: CMatrix| {
        let mut big = CMatrix::zeros(3, 3);
        big.view_mut((0, 0), (2, 2)).copy_from(&m.map(|z| z * h));
        big
    };
    let fam: Vec<Vec<CMatrix>> = angle_family(0.4)
        .into_iter()
        .map(|xs| xs.into_iter().map(pad).collect())
        .collect();
    let err = gram_to_realization(&fam).unwrap_err();
    assert!(err.to_string().contains("smallest eigenvalue"), "{err}");
}

#[test]
fn deterministic_factors_round_trip() {
    let one = |on: bool| CMatrix::from_element(1, 1, Complex64::new(f64::from(u8::from(on)), 0.0));
    let fam = vec![vec![one(true), one(false)], vec![one(false), one(true)]];
    let p = synchronous_from_projectors(&fam, 1).unwrap();
    let back = gram_to_realization(&fam).unwrap().realize().unwrap();
    assert_eq!(p, back);
}

#[test]
fn uniform_is_classical() {
    let p = Correlation::uniform(Scenario::new(3, 2, 2, 2).unwrap()).unwrap();
    let cert = classical_membership(&p).unwrap();
    assert_eq!(cert.verdict, Verdict::Classical);
    assert!(cert.residual <= WEIGHT_TOL);
    assert!(cert.verify(&p));
}

#[test]
fn pr_box_violates_the_chsh_game_by_a_quarter() {
    let p = pr_box();
    let cert = classical_membership(&p).unwrap();
    assert_eq!(cert.verdict, Verdict::Nonclassical);
    assert!(cert.verify(&p));
    let chsh = BellFunctional::chsh_game();
    // Exhaustive check over all 16 deterministic strategies.
    let mut best: f64 = 0.0;
    for k in 0..16usize {
        let q = Correlation::deterministic(
            Scenario::chsh(),
            &[k & 1, (k >> 1) & 1],
            &[(k >> 2) & 1, (k >> 3) & 1],
        )
        .unwrap();
        best = best.max(chsh.value(&q));
    }
    assert!((best - 0.75).abs() < 1e-12);
    assert!((chsh.deterministic_max() - 0.75).abs() < 1e-12);
    assert!(chsh.value(&p) - best >= 0.25 - 1e-12);
}

#[test]
fn tsirelson_is_nonclassical() {
    let p = Realization::tsirelson_chsh().realize().unwrap();
    let cert = classical_membership(&p).unwrap();
    assert_eq!(cert.verdict, Verdict::Nonclassical);
    assert!(cert.margin > 1e-3);
    assert!(cert.verify(&p));
}

#[test]
fn column_generation_agrees_with_full_enumeration() {
    let forced = ClassicalConfig {
        enumeration_limit: 0,
        ..ClassicalConfig::default()
    };
    let sc = Scenario::new(3, 3, 3, 3).unwrap();
    let cases = [
        pr_box(),
        Realization::tsirelson_chsh().realize().unwrap(),
        Correlation::uniform(Scenario::chsh()).unwrap(),
        Realization::random(sc, 1, 5).unwrap().realize().unwrap(),
        Realization::random(sc, 2, 5).unwrap().realize().unwrap(),
    ];
    for p in cases {
        let full = classical_membership(&p).unwrap();
        let cg = classical_membership_with(&p, &forced).unwrap();
        assert!(cg.column_generation);
        assert_eq!(full.verdict, cg.verdict);
        assert!(cg.verify(&p));
        assert!(
            (full.margin - cg.margin).abs() < 1e-7,
            "{} vs {}",
            full.margin,
            cg.margin
        );
    }
}

#[test]
fn oversized_scenarios_are_a_resource_error() {
    let cfg = ClassicalConfig {
        enumeration_limit: 10,
        party_cap: 10,
        ..ClassicalConfig::default()
    };
    let p = Correlation::uniform(Scenario::new(2, 2, 4, 4).unwrap()).unwrap();
    assert!(matches!(
        classical_membership_with(&p, &cfg),
        Err(crate::Error::Resource { .. })
    ));
}

#[test]
fn factor_json_round_trip() {
    let fam = random_projector_family(2, 2, 3, 4).unwrap();
    assert_eq!(
        factors_from_json(&factors_to_json(&fam).unwrap()).unwrap(),
        fam
    );
}
