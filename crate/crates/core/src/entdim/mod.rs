//! Lower bounds `ξ_q^r(P)` on the minimal average entanglement dimension.
//!
//! `D_q(P)` is the least `d²` over tensor-model realizations of `P` in
//! `C^d ⊗ C^d` and `D_qc(P)` its commuting-operator analogue; `A_q(P)` and
//! `A_qc(P)` are the averaged versions, infima of `Σ λ_i D(P_i)` over convex
//! decompositions `P = Σ λ_i P_i`. None of these is computed here. The
//! hierarchy gives
//!
//! `1 = ξ_q^1(P) ≤ ξ_q^2(P) ≤ … ≤ A_qc(P) = A_q(P) ≤ D_q(P)`.

mod correlation;

use serde::{Deserialize, Serialize};

pub use correlation::{Correlation, Scenario, NEGATIVE_CLAMP, NORMALIZATION_TOL};

use crate::conic::{
    self, FlatnessMode, FlatnessReport, SdpSolution, SdpStatus, SolverConfig, DEFAULT_TAU_RANK,
};
use crate::momentize::{
    assemble_from_context, ideal_constraints, localizing_block, moment_block,
    state_commutator_constraints, ConstraintSet, LinearConstraint, LinearForm, MomentContext,
    Objective, SdpProblem,
};
use crate::ncwords::{EquivalenceMode, NcPolynomial, RewriteSystem, Symbol, Word};
use crate::{Error, Result};

pub const INTERPRETATION: &str =
    "ξ_q^r(P) ≤ A_qc(P) = A_q(P) ≤ D_q(P); the bound is a valid lower bound at every level";

/// Generators `𝒢`, ideal `ℋ` and the rewrite system for one scenario.
#[derive(Clone, Debug)]
pub struct EntDimSets {
    pub scenario: Scenario,
    pub level: usize,
    /// Every symbol: Alice's `x_s^a`, Bob's `y_t^b`, then `z`.
    pub symbols: Vec<Symbol>,
    /// `𝒢 = {x_s^a} ∪ {y_t^b} ∪ {z}`.
    pub generators: Vec<Symbol>,
    /// `z - z²`, then `1 - Σ_a x_s^a` per `s`, `1 - Σ_b y_t^b` per `t`, and
    /// `[x_s^a, y_t^b]` for all of `Γ`.
    pub ideal: Vec<NcPolynomial<f64>>,
    /// Sizes of the four families of `ideal`, in that order.
    pub ideal_families: [usize; 4],
    /// Bob symbols move right of Alice symbols; `z² → z`.
    pub rewrite: RewriteSystem,
}

fn alice(s: usize, a: usize) -> Symbol {
    Symbol::alice(s as u32, a as u32)
}

fn bob(t: usize, b: usize) -> Symbol {
    Symbol::bob(t as u32, b as u32)
}

pub fn build_entdim_sets(scenario: Scenario, r: usize) -> Result<EntDimSets> {
    scenario.validate()?;
    if r == 0 {
        return Err(Error::Contract(
            "relaxation level must be at least 1".into(),
        ));
    }
    let xs: Vec<Symbol> = (0..scenario.s)
        .flat_map(|s| (0..scenario.a).map(move |a| alice(s, a)))
        .collect();
    let ys: Vec<Symbol> = (0..scenario.t)
        .flat_map(|t| (0..scenario.b).map(move |b| bob(t, b)))
        .collect();
    let z = Symbol::state();
    let mut symbols = xs.clone();
    symbols.extend(&ys);
    symbols.push(z);

    let mut rw = RewriteSystem::new().with_idempotent(z);
    for &y in &ys {
        for &x in &xs {
            rw.add_swap(y, x);
        }
    }

    let zz = NcPolynomial::word(Word::from_symbols([z, z]));
    let mut ideal = vec![&NcPolynomial::symbol(z) - &zz];
    for s in 0..scenario.s {
        ideal.push(NcPolynomial::one_minus_sum(
            (0..scenario.a).map(|a| alice(s, a)),
        ));
    }
    for t in 0..scenario.t {
        ideal.push(NcPolynomial::one_minus_sum(
            (0..scenario.b).map(|b| bob(t, b)),
        ));
    }
    for &x in &xs {
        for &y in &ys {
            let xy = NcPolynomial::word(Word::from_symbols([x, y]));
            let yx = NcPolynomial::word(Word::from_symbols([y, x]));
            ideal.push(&xy - &yx);
        }
    }
    Ok(EntDimSets {
        scenario,
        level: r,
        generators: symbols.clone(),
        symbols,
        ideal,
        ideal_families: [1, scenario.s, scenario.t, xs.len() * ys.len()],
        rewrite: rw,
    })
}

impl EntDimSets {
    /// Moment context at this level. With `reduce_rows`, block rows skip the
    /// last answer symbol of every question.
    pub fn context(&self, cap: usize, reduce_rows: bool) -> Result<MomentContext> {
        let mut ctx = MomentContext::new(
            self.symbols.clone(),
            self.level,
            self.rewrite.clone(),
            EquivalenceMode::TracialSymmetric,
            cap,
        )?;
        if reduce_rows {
            let sc = self.scenario;
            let last_a = (0..sc.s).map(|s| alice(s, sc.a - 1));
            let last_b = (0..sc.t).map(|t| bob(t, sc.b - 1));
            ctx.exclude_from_rows(last_a.chain(last_b));
        }
        Ok(ctx)
    }

    /// `ℛ_r` as equalities on the moments of `ctx`.
    pub fn commutator_constraints(&self, ctx: &mut MomentContext) -> Result<ConstraintSet> {
        state_commutator_constraints(ctx)
    }
}

#[derive(Clone, Debug)]
pub struct EntDimConfig {
    pub solver: SolverConfig,
    /// Highest level accepted.
    pub r_cap: usize,
    pub basis_cap: usize,
    /// Largest residual accepted from a solve stopped at its iteration limit.
    pub accept: f64,
    pub tau_rank: f64,
    /// Drop block rows that the sum-to-one ideal makes redundant.
    pub reduce_rows: bool,
}

impl Default for EntDimConfig {
    fn default() -> Self {
        EntDimConfig {
            solver: SolverConfig::default(),
            r_cap: 3,
            basis_cap: 20_000,
            accept: 1e-6,
            tau_rank: DEFAULT_TAU_RANK,
            reduce_rows: true,
        }
    }
}

/// The assembled SDP for `ξ_q^r(P)`.
///
/// At `r = 1` the data words `x_s^a y_t^b z` have degree 3 and lie outside
/// the truncation, so only `L(z) = 1` ties the problem to `P`.
pub fn entdim_problem(p: &Correlation, r: usize, cfg: &EntDimConfig) -> Result<SdpProblem> {
    if r > cfg.r_cap {
        return Err(Error::Resource {
            what: "entanglement-dimension level".into(),
            needed: r,
            cap: cfg.r_cap,
        });
    }
    let sets = build_entdim_sets(p.scenario(), r)?;
    let mut ctx = sets.context(cfg.basis_cap, cfg.reduce_rows)?;
    let z = Symbol::state();

    let rows = ctx.block_rows(r)?;
    let mut blocks = vec![moment_block(&rows, &mut ctx)?];
    for &g in &sets.generators {
        blocks.push(localizing_block(
            g.to_string(),
            &NcPolynomial::<f64>::symbol(g),
            &mut ctx,
        )?);
    }

    let mut cons = ConstraintSet::new();
    let zvar = ctx
        .variable(&Word::single(z))?
        .ok_or_else(|| Error::Internal("state moment has no variable".into()))?;
    cons.push(LinearConstraint::fix(zvar, 1.0));
    if 2 * r >= 3 {
        let sc = p.scenario();
        for s in 0..sc.s {
            for t in 0..sc.t {
                for a in 0..sc.a {
                    for b in 0..sc.b {
                        let w = Word::from_symbols([alice(s, a), bob(t, b), z]);
                        let v = ctx.variable(&w)?.ok_or_else(|| {
                            Error::Internal(format!("data word {w} has no variable"))
                        })?;
                        cons.push(LinearConstraint::eq(
                            LinearForm::from([(v, 1.0)]),
                            p.get(a, b, s, t),
                        ));
                    }
                }
            }
        }
    }
    cons.extend(ideal_constraints(&sets.ideal, &mut ctx)?.into_vec());
    cons.extend(sets.commutator_constraints(&mut ctx)?.into_vec());

    let sc = p.scenario();
    assemble_from_context(
        &ctx,
        Objective::minimize(LinearForm::from([(0, 1.0)])),
        &blocks,
        cons,
        format!(
            "entanglement dimension bound, scenario ({},{},{},{}), r = {r}",
            sc.a, sc.b, sc.s, sc.t
        ),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntDimResult {
    pub level: usize,
    pub value: f64,
    pub solution: SdpSolution,
    pub flatness: FlatnessReport,
    pub interpretation: String,
}

/// `ξ_q^r(P)`.
pub fn xi_q(p: &Correlation, r: usize, cfg: &EntDimConfig) -> Result<EntDimResult> {
    let problem = entdim_problem(p, r, cfg)?;
    let s = conic::solve_with(&problem, &cfg.solver)?;
    match s.status {
        SdpStatus::Infeasible => {
            return Err(Error::Infeasible {
                message: format!("P not within tolerance of the level-{r} relaxation of C_qc(Γ)"),
                margin: s.diagnostics.ray_margin.unwrap_or(0.0),
            })
        }
        SdpStatus::Unbounded => {
            return Err(Error::Numerical(
                "entanglement dimension bound reported unbounded".into(),
            ))
        }
        _ if !s.is_usable(cfg.accept) => {
            return Err(Error::Numerical(format!(
                "level-{r} solve stopped after {} iterations at accuracy {:.2e}",
                s.diagnostics.iterations,
                s.accuracy()
            )))
        }
        _ => {}
    }
    let flatness = s.flatness(r, FlatnessMode::Entdim, cfg.tau_rank)?;
    Ok(EntDimResult {
        level: r,
        value: s.objective,
        solution: s,
        flatness,
        interpretation: INTERPRETATION.into(),
    })
}

/// Values of `ξ_q^r(P)` for `r = 1..=r_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityAudit {
    pub values: Vec<f64>,
    pub monotone: bool,
    /// Levels `r` with `value(r) < value(r - 1) - 1e-6`.
    pub violations: Vec<usize>,
}

pub fn monotonicity_audit(
    p: &Correlation,
    r_max: usize,
    cfg: &EntDimConfig,
) -> Result<MonotonicityAudit> {
    if r_max > cfg.r_cap {
        return Err(Error::Resource {
            what: "monotonicity audit level".into(),
            needed: r_max,
            cap: cfg.r_cap,
        });
    }
    let values = (1..=r_max)
        .map(|r| xi_q(p, r, cfg).map(|x| x.value))
        .collect::<Result<Vec<_>>>()?;
    let violations: Vec<usize> = (1..values.len())
        .filter(|&i| values[i] < values[i - 1] - 1e-6)
        .map(|i| i + 1)
        .collect();
    Ok(MonotonicityAudit {
        monotone: violations.is_empty(),
        values,
        violations,
    })
}

#[cfg(test)]
mod tests;
