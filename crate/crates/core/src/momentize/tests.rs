use super::*;
use crate::ncwords::{EquivalenceMode, NcPolynomial, RewriteSystem, Symbol, Word};

fn c5_system() -> (Vec<Symbol>, RewriteSystem) {
    let syms: Vec<Symbol> = (0..5).map(Symbol::vertex).collect();
    let mut rw = RewriteSystem::new();
    for i in 0..5 {
        rw.add_idempotent(syms[i]);
        rw.add_zero_pair(syms[i], syms[(i + 1) % 5]);
    }
    (syms, rw)
}

fn c5_context(level: usize) -> MomentContext {
    let (syms, rw) = c5_system();
    MomentContext::new(syms, level, rw, EquivalenceMode::TracialSymmetric, 10_000).unwrap()
}

#[test]
fn identity_block_is_l_of_one() {
    let mut ctx = c5_context(1);
    let b = moment_block(&[Word::identity()], &mut ctx).unwrap();
    assert_eq!(b.size(), 1);
    assert_eq!(b.entry(0, 0), &LinearForm::from([(0, 1.0)]));
}

#[test]
fn idempotent_row_repeats_first_moment() {
    let x = Symbol::vertex(0);
    let rw = RewriteSystem::new().with_idempotent(x);
    let mut ctx =
        MomentContext::new(vec![x], 1, rw, EquivalenceMode::TracialSymmetric, 100).unwrap();
    let rows = ctx.row_words(1).unwrap();
    let b = moment_block(&rows, &mut ctx).unwrap();
    let id = ctx.index().lookup(&Word::single(x)).unwrap();
    assert_eq!(b.entry(0, 1), &LinearForm::from([(id, 1.0)]));
    assert_eq!(b.entry(1, 1), &LinearForm::from([(id, 1.0)]));
}

#[test]
fn c5_level_one_moment_block_has_vanishing_edges() {
    let mut ctx = c5_context(1);
    let rows = ctx.row_words(1).unwrap();
    assert_eq!(rows.len(), 6);
    let b = moment_block(&rows, &mut ctx).unwrap();
    assert!(b.is_symmetric());
    for i in 0..5 {
        let j = (i + 1) % 5;
        assert!(b.entry(i + 1, j + 1).is_empty());
    }
    assert!(!b.entry(1, 3).is_empty());
    // degree <= 2 variables: 1 + |V| + non-edges
    assert_eq!(ctx.index().len(), 11);
}

#[test]
fn clique_localizing_corner_entry() {
    let mut ctx = c5_context(2);
    let g = NcPolynomial::<f64>::one_minus_sum([Symbol::vertex(0), Symbol::vertex(1)]);
    let b = localizing_block("g", &g, &mut ctx).unwrap();
    assert_eq!(b.size(), 6);
    let x0 = ctx
        .index()
        .lookup(&Word::single(Symbol::vertex(0)))
        .unwrap();
    let x1 = ctx
        .index()
        .lookup(&Word::single(Symbol::vertex(1)))
        .unwrap();
    assert_eq!(
        b.entry(0, 0),
        &LinearForm::from([(0, 1.0), (x0, -1.0), (x1, -1.0)])
    );
}

#[test]
fn localizing_rejects_non_symmetric_generator() {
    let mut ctx = c5_context(2);
    let h = NcPolynomial::<f64>::word(Word::from_symbols([Symbol::vertex(0), Symbol::vertex(2)]));
    assert!(matches!(
        localizing_block("h", &h, &mut ctx),
        Err(crate::Error::Contract(_))
    ));
}

#[test]
fn povm_localizing_has_no_idempotence() {
    let x = Symbol::alice(0, 0);
    let mut ctx = MomentContext::new(
        vec![x],
        2,
        RewriteSystem::new(),
        EquivalenceMode::TracialSymmetric,
        100,
    )
    .unwrap();
    let b = localizing_block("x", &NcPolynomial::<f64>::symbol(x), &mut ctx).unwrap();
    assert_eq!(b.size(), 2);
    let xx = ctx.index().lookup(&Word::from_symbols([x, x])).unwrap();
    assert_eq!(b.entry(0, 1), &LinearForm::from([(xx, 1.0)]));
}

#[test]
fn ideal_constraint_examples() {
    let z = Symbol::state();
    let xs = [Symbol::alice(0, 0), Symbol::alice(0, 1)];
    let mut syms = xs.to_vec();
    syms.push(z);
    let mut ctx = MomentContext::new(
        syms,
        1,
        RewriteSystem::new(),
        EquivalenceMode::TracialSymmetric,
        100,
    )
    .unwrap();
    let sum = NcPolynomial::<f64>::one_minus_sum(xs);
    let zz = &NcPolynomial::<f64>::symbol(z) - &NcPolynomial::word(Word::from_symbols([z, z]));
    let cs = ideal_constraints(&[sum, zz], &mut ctx).unwrap();
    let x0 = ctx.index().lookup(&Word::single(xs[0])).unwrap();
    let x1 = ctx.index().lookup(&Word::single(xs[1])).unwrap();
    let zid = ctx.index().lookup(&Word::single(z)).unwrap();
    let z2 = ctx.index().lookup(&Word::from_symbols([z, z])).unwrap();
    let has = |terms: LinearForm| cs.as_slice().iter().any(|c| c.terms == terms);
    assert!(has(LinearForm::from([(0, 1.0), (x0, -1.0), (x1, -1.0)])));
    assert!(has(LinearForm::from([(zid, 1.0), (z2, -1.0)])));
}

#[test]
fn edge_monomials_emit_no_constraints() {
    let mut ctx = c5_context(2);
    let edge =
        NcPolynomial::<f64>::word(Word::from_symbols([Symbol::vertex(0), Symbol::vertex(1)]));
    let cs = ideal_constraints(&[edge], &mut ctx).unwrap();
    assert_eq!(cs.len(), 0);
}

#[test]
fn state_commutators_vanish_at_level_two() {
    let mut syms = vec![Symbol::state()];
    let mut rw = RewriteSystem::new().with_idempotent(Symbol::state());
    for s in 0..2 {
        for a in 0..2 {
            syms.push(Symbol::alice(s, a));
            syms.push(Symbol::bob(s, a));
        }
    }
    for s in 0..2 {
        for a in 0..2 {
            for t in 0..2 {
                for b in 0..2 {
                    rw.add_swap(Symbol::bob(t, b), Symbol::alice(s, a));
                }
            }
        }
    }
    let mut ctx =
        MomentContext::new(syms, 2, rw, EquivalenceMode::TracialSymmetric, 20_000).unwrap();
    assert_eq!(state_commutator_constraints(&mut ctx).unwrap().len(), 0);
}

#[test]
fn trivial_problem_assembles() {
    let mut ctx = c5_context(1);
    let b = moment_block(&[Word::identity()], &mut ctx).unwrap();
    let p = assemble(
        ctx.index().len(),
        ctx.index().words().to_vec(),
        Objective::minimize(LinearForm::from([(0, 1.0)])),
        &[b],
        vec![LinearConstraint::fix(0, 1.0)],
        ProblemMetadata::default(),
    )
    .unwrap();
    assert_eq!(p.block_sizes(), vec![1]);
    assert_eq!(p.moment_block, Some(0));
}

#[test]
fn empty_block_list_is_rejected() {
    let r = assemble(
        1,
        vec![],
        Objective::none(),
        &[],
        vec![],
        ProblemMetadata::default(),
    );
    assert!(matches!(r, Err(crate::Error::Contract(_))));
}

#[test]
fn zero_rows_are_trimmed() {
    let x = Symbol::vertex(0);
    let y = Symbol::vertex(1);
    let rw = RewriteSystem::new().with_zero_pair(x, y);
    let mut ctx =
        MomentContext::new(vec![x, y], 1, rw, EquivalenceMode::TracialSymmetric, 100).unwrap();
    // a row word that vanishes entirely
    let rows = vec![Word::identity(), Word::from_symbols([x, y])];
    let b = SymbolicBlock {
        label: "moment".into(),
        entries: vec![
            LinearForm::from([(0, 1.0)]),
            LinearForm::new(),
            LinearForm::new(),
            LinearForm::new(),
        ],
        rows,
    };
    let p = assemble(
        ctx.index().len(),
        vec![],
        Objective::none(),
        &[b],
        vec![],
        ProblemMetadata::default(),
    )
    .unwrap();
    assert_eq!(p.blocks[0].size, 1);
    let _ = ctx.row_words(1).unwrap();
}
