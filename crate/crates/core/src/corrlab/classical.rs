use microlp::{ComparisonOp, OptimizationDirection, Problem, Solution, Variable};
use serde::{Deserialize, Serialize};

use crate::entdim::{Correlation, Scenario};
use crate::{Error, Result};

/// Largest error allowed when classical weights reproduce `P`.
pub const WEIGHT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Classical,
    Nonclassical,
}

/// A deterministic strategy `a = alice[s]`, `b = bob[t]` with its weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedStrategy {
    pub alice: Vec<usize>,
    pub bob: Vec<usize>,
    pub weight: f64,
}

/// A linear functional `Σ β(a,b,s,t) P(a,b|s,t)` with its maximum `bound`
/// over deterministic strategies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellFunctional {
    pub scenario: Scenario,
    /// Flat coefficients, indexed like the correlation table.
    pub coefficients: Vec<f64>,
    pub bound: f64,
}

impl BellFunctional {
    pub fn value(&self, p: &Correlation) -> f64 {
        self.coefficients
            .iter()
            .zip(p.table())
            .map(|(b, x)| b * x)
            .sum()
    }

    /// CHSH game in winning-probability form: `(1/4) Σ_{a⊕b = st}
    /// P(a,b|s,t)`, classical bound 3/4.
    pub fn chsh_game() -> Self {
        let sc = Scenario::chsh();
        let mut coefficients = vec![0.0; sc.size()];
        for (a, b, s, t) in gamma(sc) {
            if (a ^ b) == (s & t) {
                coefficients[sc.index(a, b, s, t)] = 0.25;
            }
        }
        BellFunctional {
            scenario: sc,
            coefficients,
            bound: 0.75,
        }
    }

    /// Largest value over deterministic strategies, by enumerating the
    /// smaller party and letting the other best-respond.
    pub fn deterministic_max(&self) -> f64 {
        best_response(self.scenario, &self.coefficients).0
    }
}

/// CHSH winning probability; requires a binary two-question scenario.
pub fn chsh_win_probability(p: &Correlation) -> Result<f64> {
    require_chsh(p)?;
    Ok(BellFunctional::chsh_game().value(p))
}

/// `Σ_{s,t} (-1)^{st} ⟨A_s B_t⟩` with `⟨A_s B_t⟩ = Σ_{a,b} (-1)^{a+b}
/// P(a,b|s,t)`; at most 2 classically and `2√2` quantumly.
pub fn chsh_value(p: &Correlation) -> Result<f64> {
    require_chsh(p)?;
    let mut v = 0.0;
    for (a, b, s, t) in gamma(Scenario::chsh()) {
        let sign = if (a ^ b ^ (s & t)) == 0 { 1.0 } else { -1.0 };
        v += sign * p.get(a, b, s, t);
    }
    Ok(v)
}

fn require_chsh(p: &Correlation) -> Result<()> {
    if p.scenario() != Scenario::chsh() {
        return Err(Error::Validation(
            "CHSH needs two questions and two answers per party".into(),
        ));
    }
    Ok(())
}

fn gamma(sc: Scenario) -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..sc.a).flat_map(move |a| {
        (0..sc.b)
            .flat_map(move |b| (0..sc.s).flat_map(move |s| (0..sc.t).map(move |t| (a, b, s, t))))
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalityCertificate {
    pub verdict: Verdict,
    /// Convex weights over deterministic strategies (CLASSICAL).
    pub weights: Vec<WeightedStrategy>,
    /// Largest entry of `|Σ w D - P|` (CLASSICAL).
    pub residual: f64,
    /// Separating functional with `value(P) = bound + margin` (NONCLASSICAL).
    pub functional: Option<BellFunctional>,
    pub margin: f64,
    /// Deterministic strategies handed to the LP.
    pub strategies_used: usize,
    pub column_generation: bool,
}

#[derive(Clone, Debug)]
pub struct ClassicalConfig {
    /// Above this many deterministic strategies the LP is column-generated.
    pub enumeration_limit: usize,
    /// Cap on the strategies of the smaller party, enumerated by the
    /// best-response oracle.
    pub party_cap: usize,
    /// Separation values above this certify nonclassicality.
    pub margin_tol: f64,
    pub max_rounds: usize,
}

impl Default for ClassicalConfig {
    fn default() -> Self {
        ClassicalConfig {
            enumeration_limit: 100_000,
            party_cap: 1_000_000,
            margin_tol: 1e-9,
            max_rounds: 10_000,
        }
    }
}

pub fn classical_membership(p: &Correlation) -> Result<ClassicalityCertificate> {
    classical_membership_with(p, &ClassicalConfig::default())
}

type Strategy = (Vec<usize>, Vec<usize>);

fn digits(mut k: usize, base: usize, len: usize) -> Vec<usize> {
    (0..len)
        .map(|_| {
            let d = k % base;
            k /= base;
            d
        })
        .collect()
}

fn party_count(base: usize, len: usize) -> usize {
    (base as u128)
        .saturating_pow(len as u32)
        .min(usize::MAX as u128) as usize
}

/// Best deterministic response to `coef`: value and strategy.
fn best_response(sc: Scenario, coef: &[f64]) -> (f64, Strategy) {
    let na = party_count(sc.a, sc.s);
    let nb = party_count(sc.b, sc.t);
    let mut best = (f64::NEG_INFINITY, (vec![], vec![]));
    if na <= nb {
        for k in 0..na {
            let fa = digits(k, sc.a, sc.s);
            let mut fb = vec![0; sc.t];
            let mut v = 0.0;
            for (t, slot) in fb.iter_mut().enumerate() {
                let (bv, bb) = (0..sc.b)
                    .map(|b| {
                        (
                            (0..sc.s)
                                .map(|s| coef[sc.index(fa[s], b, s, t)])
                                .sum::<f64>(),
                            b,
                        )
                    })
                    .fold(
                        (f64::NEG_INFINITY, 0),
                        |acc, x| if x.0 > acc.0 { x } else { acc },
                    );
                v += bv;
                *slot = bb;
            }
            if v > best.0 {
                best = (v, (fa, fb));
            }
        }
    } else {
        for k in 0..nb {
            let fb = digits(k, sc.b, sc.t);
            let mut fa = vec![0; sc.s];
            let mut v = 0.0;
            for (s, slot) in fa.iter_mut().enumerate() {
                let (av, aa) = (0..sc.a)
                    .map(|a| {
                        (
                            (0..sc.t)
                                .map(|t| coef[sc.index(a, fb[t], s, t)])
                                .sum::<f64>(),
                            a,
                        )
                    })
                    .fold(
                        (f64::NEG_INFINITY, 0),
                        |acc, x| if x.0 > acc.0 { x } else { acc },
                    );
                v += av;
                *slot = aa;
            }
            if v > best.0 {
                best = (v, (fa, fb));
            }
        }
    }
    best
}

fn solve_lp(lp: &Problem, what: &str) -> Result<Solution> {
    lp.solve()
        .map_err(|e| Error::Numerical(format!("{what} LP failed: {e}")))?
        .into_solution()
        .map_err(|_| Error::Numerical(format!("{what} LP was interrupted")))
}

/// `max Σ β P - c` over `-1 ≤ β ≤ 1` with `β·D ≤ c` for every strategy in
/// `active`. Returns the value, `β` and `c`.
fn separate(p: &Correlation, active: &[Strategy]) -> Result<(f64, Vec<f64>, f64)> {
    let sc = p.scenario();
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let beta: Vec<Variable> = p
        .table()
        .iter()
        .map(|&x| lp.add_var(x, (-1.0, 1.0)))
        .collect();
    let cvar = lp.add_var(-1.0, (f64::NEG_INFINITY, f64::INFINITY));
    for (fa, fb) in active {
        let mut terms: Vec<(Variable, f64)> = Vec::with_capacity(sc.s * sc.t + 1);
        for s in 0..sc.s {
            for t in 0..sc.t {
                terms.push((beta[sc.index(fa[s], fb[t], s, t)], 1.0));
            }
        }
        terms.push((cvar, -1.0));
        lp.add_constraint(terms.as_slice(), ComparisonOp::Le, 0.0);
    }
    let sol = solve_lp(&lp, "separation")?;
    let b: Vec<f64> = beta.iter().map(|&v| sol.var_value(v)).collect();
    Ok((sol.objective(), b, sol.var_value(cvar)))
}

/// `min ‖Σ w D - P‖_1` over `w ≥ 0` supported on `active`.
fn fit_weights(p: &Correlation, active: &[Strategy]) -> Result<(Vec<f64>, f64)> {
    let sc = p.scenario();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let w: Vec<Variable> = active
        .iter()
        .map(|_| lp.add_var(0.0, (0.0, f64::INFINITY)))
        .collect();
    let mut rows: Vec<Vec<(Variable, f64)>> = vec![Vec::new(); sc.size()];
    for (k, (fa, fb)) in active.iter().enumerate() {
        for s in 0..sc.s {
            for t in 0..sc.t {
                rows[sc.index(fa[s], fb[t], s, t)].push((w[k], 1.0));
            }
        }
    }
    for (g, row) in rows.iter_mut().enumerate() {
        row.push((lp.add_var(1.0, (0.0, f64::INFINITY)), 1.0));
        row.push((lp.add_var(1.0, (0.0, f64::INFINITY)), -1.0));
        lp.add_constraint(row.as_slice(), ComparisonOp::Eq, p.table()[g]);
    }
    let sol = solve_lp(&lp, "weight")?;
    let weights: Vec<f64> = w.iter().map(|&v| sol.var_value(v).max(0.0)).collect();
    let mut fit = vec![0.0; sc.size()];
    for ((fa, fb), &x) in active.iter().zip(&weights) {
        for s in 0..sc.s {
            for t in 0..sc.t {
                fit[sc.index(fa[s], fb[t], s, t)] += x;
            }
        }
    }
    let residual = fit
        .iter()
        .zip(p.table())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok((weights, residual))
}

/// Decides `P ∈ C_loc` by linear programming over deterministic strategies.
pub fn classical_membership_with(
    p: &Correlation,
    cfg: &ClassicalConfig,
) -> Result<ClassicalityCertificate> {
    let sc = p.scenario();
    let na = party_count(sc.a, sc.s);
    let nb = party_count(sc.b, sc.t);
    let total = sc.deterministic_count();
    let column_generation = total > cfg.enumeration_limit;

    let (value, beta, bound, active) = if !column_generation {
        let active: Vec<Strategy> = (0..na)
            .flat_map(|i| (0..nb).map(move |j| (digits(i, sc.a, sc.s), digits(j, sc.b, sc.t))))
            .collect();
        let (v, b, c) = separate(p, &active)?;
        (v, b, c, active)
    } else {
        if na.min(nb) > cfg.party_cap {
            return Err(Error::Resource {
                what: "deterministic strategies of the smaller party (reduce questions or answers)"
                    .into(),
                needed: na.min(nb),
                cap: cfg.party_cap,
            });
        }
        let mut active: Vec<Strategy> = vec![(vec![0; sc.s], vec![0; sc.t])];
        let mut rounds = 0;
        loop {
            let (v, b, c) = separate(p, &active)?;
            let (best, strat) = best_response(sc, &b);
            if best <= c + 1e-12 || v <= cfg.margin_tol {
                // With the full strategy set `c` is the true classical max.
                break (
                    p.table().iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() - best,
                    b,
                    best,
                    active,
                );
            }
            active.push(strat);
            rounds += 1;
            if rounds >= cfg.max_rounds {
                return Err(Error::Numerical(format!(
                    "column generation did not settle in {rounds} rounds"
                )));
            }
        }
    };

    if value > cfg.margin_tol {
        let functional = BellFunctional {
            scenario: sc,
            coefficients: beta,
            bound,
        };
        return Ok(ClassicalityCertificate {
            verdict: Verdict::Nonclassical,
            weights: Vec::new(),
            residual: f64::NAN,
            margin: value,
            functional: Some(functional),
            strategies_used: active.len(),
            column_generation,
        });
    }

    let (weights, residual) = fit_weights(p, &active)?;
    if residual > WEIGHT_TOL {
        return Err(Error::Numerical(format!(
            "separation value {value:.2e} found no Bell violation but weights reproduce P only within {residual:.2e}"
        )));
    }
    let weights = active
        .iter()
        .zip(weights)
        .filter(|(_, w)| *w > 1e-14)
        .map(|((fa, fb), weight)| WeightedStrategy {
            alice: fa.clone(),
            bob: fb.clone(),
            weight,
        })
        .collect();
    Ok(ClassicalityCertificate {
        verdict: Verdict::Classical,
        weights,
        residual,
        functional: None,
        margin: value,
        strategies_used: active.len(),
        column_generation,
    })
}

impl ClassicalityCertificate {
    /// Re-checks the certificate against `p` by exhaustive best response.
    pub fn verify(&self, p: &Correlation) -> bool {
        match self.verdict {
            Verdict::Classical => {
                let sc = p.scenario();
                let mut fit = vec![0.0; sc.size()];
                for w in &self.weights {
                    for s in 0..sc.s {
                        for t in 0..sc.t {
                            fit[sc.index(w.alice[s], w.bob[t], s, t)] += w.weight;
                        }
                    }
                }
                fit.iter()
                    .zip(p.table())
                    .all(|(a, b)| (a - b).abs() <= WEIGHT_TOL)
            }
            Verdict::Nonclassical => self.functional.as_ref().is_some_and(|f| {
                let max = f.deterministic_max();
                f.value(p) - max >= self.margin - 1e-9
            }),
        }
    }
}
