use super::*;
use crate::momentize::{
    assemble, LinearConstraint, LinearForm, Objective, ProblemMetadata, SdpProblem, SymbolicBlock,
};
use crate::ncwords::Word;

fn one_by_one(constraints: Vec<LinearConstraint>, objective: Objective) -> SdpProblem {
    let b = SymbolicBlock {
        label: "moment".into(),
        rows: vec![Word::identity()],
        entries: vec![LinearForm::from([(0, 1.0)])],
    };
    assemble(
        1,
        vec![],
        objective,
        &[b],
        constraints,
        ProblemMetadata::default(),
    )
    .unwrap()
}

/// Lovász theta of the cycle C_n: max <J, X>, tr X = 1, X_ij = 0 on edges.
fn theta_cycle(n: usize) -> SdpProblem {
    let mut id = std::collections::BTreeMap::new();
    for i in 0..n {
        for j in i..n {
            let k = id.len();
            id.insert((i, j), k);
        }
    }
    let mut entries = vec![LinearForm::new(); n * n];
    let mut obj = LinearForm::new();
    for (&(i, j), &k) in &id {
        entries[i * n + j] = LinearForm::from([(k, 1.0)]);
        entries[j * n + i] = LinearForm::from([(k, 1.0)]);
        obj.insert(k, if i == j { 1.0 } else { 2.0 });
    }
    let rows = (0..n)
        .map(|i| Word::single(crate::ncwords::Symbol::vertex(i as u32)))
        .collect();
    let block = SymbolicBlock {
        label: "moment".into(),
        rows,
        entries,
    };
    let mut cons = vec![LinearConstraint::eq(
        (0..n).map(|i| (id[&(i, i)], 1.0)).collect(),
        1.0,
    )];
    for i in 0..n {
        let (a, b) = (i.min((i + 1) % n), i.max((i + 1) % n));
        cons.push(LinearConstraint::fix(id[&(a, b)], 0.0));
    }
    assemble(
        id.len(),
        vec![],
        Objective::maximize(obj),
        &[block],
        cons,
        ProblemMetadata::default(),
    )
    .unwrap()
}

#[test]
fn toy_problem_optimum_is_one() {
    let p = one_by_one(
        vec![LinearConstraint::fix(0, 1.0)],
        Objective::minimize(LinearForm::from([(0, 1.0)])),
    );
    let s = solve(&p, DEFAULT_TOL).unwrap();
    assert_eq!(s.status, SdpStatus::Optimal);
    assert!((s.objective - 1.0).abs() < 1e-12);
}

#[test]
fn contradictory_equalities_are_infeasible() {
    let p = one_by_one(
        vec![LinearConstraint::fix(0, 1.0), LinearConstraint::fix(0, 2.0)],
        Objective::minimize(LinearForm::from([(0, 1.0)])),
    );
    assert_eq!(
        solve(&p, DEFAULT_TOL).unwrap().status,
        SdpStatus::Infeasible
    );
}

#[test]
fn theta_of_five_cycle() {
    let s = solve(&theta_cycle(5), DEFAULT_TOL).unwrap();
    assert_eq!(s.status, SdpStatus::Optimal, "{:?}", s.diagnostics);
    assert!((s.objective - 5f64.sqrt()).abs() < 1e-6, "{}", s.objective);
    assert!(s.dual_bound >= s.objective - 10.0 * DEFAULT_TOL);
}

#[test]
fn theta_of_odd_cycles_matches_closed_form() {
    for n in [5usize, 7, 9] {
        let c = (std::f64::consts::PI / n as f64).cos();
        let expect = n as f64 * c / (1.0 + c);
        let s = solve(&theta_cycle(n), DEFAULT_TOL).unwrap();
        assert!(
            (s.objective - expect).abs() < 1e-6,
            "n={n}: {} vs {expect}",
            s.objective
        );
    }
}

#[test]
fn bad_tolerance_is_a_contract_error() {
    let p = theta_cycle(5);
    assert!(matches!(solve(&p, 0.1), Err(Error::Contract(_))));
    assert!(matches!(solve(&p, 0.0), Err(Error::Contract(_))));
}

#[test]
fn psd_infeasibility_is_detected() {
    // L(1) = -1 with [L(1)] ⪰ 0 after elimination is a fixed block; use a
    // 2x2 block instead: [[a, 1], [1, a]] ⪰ 0 with a <= 0.5.
    let b = SymbolicBlock {
        label: "moment".into(),
        rows: vec![
            Word::identity(),
            Word::single(crate::ncwords::Symbol::vertex(0)),
        ],
        entries: vec![
            LinearForm::from([(0, 1.0)]),
            LinearForm::from([(1, 1.0)]),
            LinearForm::from([(1, 1.0)]),
            LinearForm::from([(0, 1.0)]),
        ],
    };
    let p = assemble(
        2,
        vec![],
        Objective::minimize(LinearForm::from([(0, 1.0)])),
        &[b],
        vec![
            LinearConstraint::fix(1, 1.0),
            LinearConstraint::ge(LinearForm::from([(0, -1.0)]), -0.5),
        ],
        ProblemMetadata::default(),
    )
    .unwrap();
    let s = solve(&p, DEFAULT_TOL).unwrap();
    assert_eq!(s.status, SdpStatus::Infeasible, "{:?}", s.diagnostics);
    assert!(s.diagnostics.ray_margin.unwrap() >= 1e-7);
}

#[test]
fn feasibility_of_single_block() {
    let p = one_by_one(vec![LinearConstraint::fix(0, 1.0)], Objective::none());
    let f = feasibility(&p, DEFAULT_EPS_FEAS).unwrap();
    assert!(f.feasible);
    assert!(f.margin >= 0.0);
}

#[test]
fn feasibility_rejects_objective() {
    let p = one_by_one(vec![], Objective::minimize(LinearForm::from([(0, 1.0)])));
    assert!(matches!(
        feasibility(&p, DEFAULT_EPS_FEAS),
        Err(Error::Contract(_))
    ));
}

#[test]
fn toy_sdpa_file_is_golden() {
    let p = one_by_one(
        vec![LinearConstraint::fix(0, 1.0)],
        Objective::minimize(LinearForm::from([(0, 1.0)])),
    );
    let text = export_sdpa(&p).unwrap();
    assert_eq!(text, "0\n1\n1\n\n0 1 1 1 -1\n");
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn sdpa_round_trip_is_exact() {
    let p = theta_cycle(5);
    let lmi = reduced_lmi(&p).unwrap();
    let text = sdpa::write_lmi(&lmi);
    let back = sdpa::parse_lmi(&text).unwrap();
    assert_eq!(sdpa::write_lmi(&back), text);
    let x: Vec<f64> = (0..lmi.n_vars).map(|i| 0.1 * i as f64 - 0.3).collect();
    for (a, b) in lmi.blocks.iter().zip(&back.blocks) {
        assert_eq!(a.evaluate(&x), b.evaluate(&x));
    }
    assert_eq!(lmi.c, back.c);
}

#[test]
fn solution_round_trip_reproduces_objective() {
    let p = theta_cycle(5);
    let s = solve(&p, DEFAULT_TOL).unwrap();
    let (status, sol_text) = solve_sdpa_text(&export_sdpa(&p).unwrap(), DEFAULT_TOL).unwrap();
    assert_eq!(status, SdpStatus::Optimal);
    let back = import_solution_sdpa(&p, &sol_text, DEFAULT_TOL).unwrap();
    assert_eq!(back.status, SdpStatus::Optimal, "{:?}", back.diagnostics);
    assert!((back.objective - s.objective).abs() < 1e-9);
}

#[test]
fn corrupt_block_count_reports_line_two() {
    let text = "1\nx\n2\n1\n1 1 1 1 1\n";
    match sdpa::parse_lmi(text) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn numerical_rank_examples() {
    assert_eq!(
        numerical_rank(&DMatrix::identity(3, 3), DEFAULT_TAU_RANK),
        3
    );
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1e-12]));
    assert_eq!(numerical_rank(&d, DEFAULT_TAU_RANK), 1);
    assert_eq!(numerical_rank(&DMatrix::zeros(2, 2), DEFAULT_TAU_RANK), 0);
}

#[test]
fn rank_one_moment_matrix_is_flat() {
    let v = nalgebra::DVector::from_vec(vec![1.0, 1.0, 0.0, 1.0, 0.0, 0.0]);
    let m = &v * v.transpose();
    let degrees = [0, 1, 1, 2, 2, 3];
    let f = flatness_of_matrix(&m, &degrees, 3, FlatnessMode::Entdim, DEFAULT_TAU_RANK).unwrap();
    assert_eq!(f.ranks, vec![1, 1, 1, 1]);
    assert_eq!(f.flat_deltas, vec![1, 2, 3]);
    assert_eq!(f.entdim_flat, Some(true));
}
