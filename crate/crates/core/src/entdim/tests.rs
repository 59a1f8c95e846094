use super::*;

fn tsirelson() -> Correlation {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Correlation::from_fn(Scenario::chsh(), |a, b, s, t| {
        let sign = if (a ^ b) == (s & t) { 1.0 } else { -1.0 };
        (1.0 + sign * h) / 4.0
    })
    .unwrap()
}

#[test]
fn chsh_sets_have_the_expected_sizes() {
    let sets = build_entdim_sets(Scenario::chsh(), 1).unwrap();
    assert_eq!(sets.generators.len(), 9);
    assert_eq!(sets.ideal_families, [1, 2, 2, 16]);
    assert_eq!(sets.ideal.len(), 21);
}

#[test]
fn chsh_level_two_has_no_state_commutators() {
    let sets = build_entdim_sets(Scenario::chsh(), 2).unwrap();
    let mut ctx = sets.context(20_000, true).unwrap();
    assert!(sets.commutator_constraints(&mut ctx).unwrap().is_empty());
}

#[test]
fn level_one_is_trivial() {
    for p in [tsirelson(), Correlation::uniform(Scenario::chsh()).unwrap()] {
        let v = xi_q(&p, 1, &EntDimConfig::default()).unwrap().value;
        assert!((v - 1.0).abs() < 1e-6, "{v}");
    }
}

#[test]
fn deterministic_correlation_at_level_two_is_one() {
    let p = Correlation::deterministic(Scenario::chsh(), &[0, 1], &[1, 1]).unwrap();
    let res = xi_q(&p, 2, &EntDimConfig::default()).unwrap();
    assert!((res.value - 1.0).abs() < 1e-5, "{}", res.value);
}

#[test]
fn tsirelson_level_two_matches_the_external_oracle() {
    // A plain-word cvxpy model of the same relaxation (no rewriting, no row
    // reduction) solved with CLARABEL gives 1.0000000012.
    let res = xi_q(&tsirelson(), 2, &EntDimConfig::default()).unwrap();
    assert!((res.value - 1.0).abs() < 1e-5, "{}", res.value);
}

#[test]
fn level_three_assembles_within_the_default_caps() {
    let p = entdim_problem(&tsirelson(), 3, &EntDimConfig::default()).unwrap();
    assert!(p.n_vars <= 20_000);
    assert_eq!(p.blocks.len(), 10);
}

#[test]
fn level_above_cap_is_a_resource_error() {
    let p = Correlation::uniform(Scenario::chsh()).unwrap();
    assert!(matches!(
        xi_q(&p, 4, &EntDimConfig::default()),
        Err(Error::Resource { .. })
    ));
}

#[test]
fn signalling_tables_are_infeasible() {
    // Alice's marginal depends on Bob's question.
    let p = Correlation::from_fn(
        Scenario::chsh(),
        |a, b, _s, t| if a == t && b == 0 { 1.0 } else { 0.0 },
    )
    .unwrap();
    assert!(p.signalling() > 0.5);
    assert!(matches!(
        xi_q(&p, 2, &EntDimConfig::default()),
        Err(Error::Infeasible { .. })
    ));
}

#[test]
fn correlation_validation() {
    let sc = Scenario::chsh();
    assert!(Correlation::new(sc, vec![0.25; 15]).is_err());
    let mut t = vec![0.25; 16];
    t[0] = 0.3;
    assert!(Correlation::new(sc, t.clone()).is_err());
    t[0] = 0.25 - 1e-13;
    t[sc.index(0, 1, 0, 0)] = 0.25 + 1e-13;
    assert!(Correlation::new(sc, t.clone()).is_ok());
    let mut neg = vec![0.25; 16];
    neg[0] = -0.01;
    neg[sc.index(0, 1, 0, 0)] = 0.26;
    assert!(Correlation::new(sc, neg).is_err());
    assert!(Scenario::new(0, 2, 2, 2).is_err());
}

#[test]
fn small_negatives_are_clamped() {
    let sc = Scenario::chsh();
    let mut t = vec![0.25; 16];
    t[0] = -5e-13;
    t[sc.index(0, 1, 0, 0)] = 0.5 + 5e-13;
    let p = Correlation::new(sc, t).unwrap();
    assert_eq!(p.table()[0], 0.0);
}

#[test]
fn json_round_trip() {
    let p = tsirelson();
    let back = Correlation::from_json(&p.to_json().unwrap()).unwrap();
    assert_eq!(back, p);
    let err = Correlation::from_json(r#"{"A":2,"B":2,"S":2,"T":2,"P":[[[[1]]]]}"#).unwrap_err();
    assert!(err.to_string().contains("shape"), "{err}");
}
