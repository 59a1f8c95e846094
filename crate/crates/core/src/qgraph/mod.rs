//! Graph parameter hierarchies: the tracial bounds `ξ_r^stab`, `ξ_r^col`
//! (with the `ϑ⁺` and `ξ_SDP` strengthenings), the feasibility hierarchies
//! `γ_r^col`, `γ_r^stab`, the commutative Lasserre bounds and `Λ_r`.
//!
//! Notation: `α`, `χ` are the classical stability and chromatic numbers,
//! `α_q`, `χ_q` their quantum versions and `α_qc`, `χ_qc` the
//! commuting-operator versions; `χ_f` is the fractional chromatic number.
//! `ℋ_G` is the vertex ideal `{x_i - x_i², x_i x_j (ij ∈ E)}`; `ℋ^col_{G,k}`
//! and `ℋ^stab_{G,k}` add color or index labels with sum-to-one generators,
//! and `g_C = 1 - Σ_{i∈C} x_i` is the clique polynomial.

mod build;
mod reports;

use serde::{Deserialize, Serialize};

pub use build::{
    gamma_problem, theta_problem, xi_col_problem, xi_stab_problem, GammaKind, Strengthening,
};
pub use reports::{CrossCheck, HierarchyComparison, ProductIdentityReport};

use crate::conic::{
    self, FlatnessMode, FlatnessReport, SdpSolution, SdpStatus, SolverConfig, DEFAULT_EPS_FEAS,
    DEFAULT_TAU_RANK,
};
use crate::graphs::{Graph, DEFAULT_CLIQUE_CAP};
use crate::momentize::SdpProblem;
use crate::ncwords::EquivalenceMode;
use crate::{Error, Result};

/// Threshold below `|V|` (or `k`) at which a product-graph value counts as
/// attaining it.
pub const EQUALITY_SLACK: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parameter {
    Theta,
    ThetaPlus,
    XiSdp,
    XiCol,
    XiStab,
    GammaCol,
    GammaStab,
    LasCol,
    LasStab,
    Lambda,
}

impl Parameter {
    pub const ALL: [Parameter; 10] = [
        Parameter::Theta,
        Parameter::ThetaPlus,
        Parameter::XiSdp,
        Parameter::XiCol,
        Parameter::XiStab,
        Parameter::GammaCol,
        Parameter::GammaStab,
        Parameter::LasCol,
        Parameter::LasStab,
        Parameter::Lambda,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Parameter::Theta => "theta",
            Parameter::ThetaPlus => "theta-plus",
            Parameter::XiSdp => "xi-sdp",
            Parameter::XiCol => "xi-col",
            Parameter::XiStab => "xi-stab",
            Parameter::GammaCol => "gamma-col",
            Parameter::GammaStab => "gamma-stab",
            Parameter::LasCol => "las-col",
            Parameter::LasStab => "las-stab",
            Parameter::Lambda => "lambda",
        }
    }

    pub fn is_integer(self) -> bool {
        matches!(
            self,
            Parameter::GammaCol | Parameter::GammaStab | Parameter::Lambda
        )
    }

    /// Where the computed value sits among the classical and quantum
    /// parameters it bounds.
    pub fn anchor(self) -> &'static str {
        match self {
            Parameter::Theta => "α(G) ≤ α_q(G) ≤ ϑ(G) and ϑ(Ḡ) ≤ χ_q(G)",
            Parameter::ThetaPlus => "ϑ(Ḡ) ≤ ϑ⁺(Ḡ) ≤ ξ_col^2(G) ≤ χ_qc(G)",
            Parameter::XiSdp => "ϑ⁺(Ḡ) ≤ ξ_SDP(G) ≤ ξ_col^2(G) ≤ χ_qc(G)",
            Parameter::XiCol => {
                "ϑ(Ḡ) = ξ_col^1(G) ≤ ξ_col^r(G) ≤ ξ_col^{r+1}(G) ≤ γ_r^col(G) ≤ χ_qc(G)"
            }
            Parameter::XiStab => "α_q(G) ≤ α_p(G) = ξ_*^stab(G) ≤ ξ_r^stab(G) ≤ ξ_1^stab(G) = ϑ(G)",
            Parameter::GammaCol => "γ_r^col(G) ≤ χ_qc(G) ≤ χ_q(G) ≤ χ(G)",
            Parameter::GammaStab => "α(G) ≤ α_q(G) ≤ α_qc(G) ≤ γ_r^stab(G)",
            Parameter::LasCol => "ϑ(Ḡ) ≤ las_r^col(G) ≤ χ_f(G)",
            Parameter::LasStab => "α(G) ≤ las_r^stab(G) ≤ ϑ(G), with las^stab_{α(G)}(G) = α(G)",
            Parameter::Lambda => "Λ_r(G) ≤ χ(G)",
        }
    }
}

impl std::fmt::Display for Parameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Parameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Parameter::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown graph parameter '{s}'")))
    }
}

/// One probe of a `k`-search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub k: usize,
    pub feasible: bool,
    /// Feasibility margin, or the product-graph value for searches through
    /// `ξ^stab` / `las^stab`.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphBoundResult {
    pub parameter: Parameter,
    pub graph: Graph,
    pub level: usize,
    pub value: f64,
    /// Set for the integer-valued parameters.
    pub integer_value: Option<usize>,
    pub solution: Option<SdpSolution>,
    pub flatness: Option<FlatnessReport>,
    pub anchor: String,
    /// `k` values probed by a search, in order.
    pub probes: Vec<Probe>,
}

#[derive(Clone, Debug)]
pub struct GraphConfig {
    pub solver: SolverConfig,
    pub basis_cap: usize,
    pub clique_cap: usize,
    /// Largest residual accepted from a solve stopped at its iteration limit.
    pub accept: f64,
    pub eps_feas: f64,
    pub tau_rank: f64,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            solver: SolverConfig::default(),
            basis_cap: 20_000,
            clique_cap: DEFAULT_CLIQUE_CAP,
            accept: 1e-6,
            eps_feas: DEFAULT_EPS_FEAS,
            tau_rank: DEFAULT_TAU_RANK,
        }
    }
}

fn check_inputs(g: &Graph, r: usize) -> Result<()> {
    if r == 0 {
        return Err(Error::Contract(
            "relaxation level must be at least 1".into(),
        ));
    }
    if g.n() == 0 {
        return Err(Error::Contract("graph has no vertices".into()));
    }
    Ok(())
}

/// Graph bound computations under one configuration.
#[derive(Clone, Debug, Default)]
pub struct GraphBounds {
    pub config: GraphConfig,
}

impl GraphBounds {
    pub fn new(config: GraphConfig) -> Self {
        GraphBounds { config }
    }

    fn optimize(&self, problem: &SdpProblem) -> Result<SdpSolution> {
        let s = conic::solve_with(problem, &self.config.solver)?;
        match s.status {
            SdpStatus::Infeasible => Err(Error::Infeasible {
                message: format!("{} is infeasible", problem.metadata.description),
                margin: s.diagnostics.ray_margin.unwrap_or(0.0),
            }),
            SdpStatus::Unbounded => Err(Error::Numerical(format!(
                "{} reported unbounded",
                problem.metadata.description
            ))),
            _ if !s.is_usable(self.config.accept) => Err(Error::Numerical(format!(
                "{} stopped after {} iterations at accuracy {:.2e}",
                problem.metadata.description,
                s.diagnostics.iterations,
                s.accuracy()
            ))),
            _ => Ok(s),
        }
    }

    fn bound(
        &self,
        parameter: Parameter,
        g: &Graph,
        r: usize,
        problem: &SdpProblem,
    ) -> Result<GraphBoundResult> {
        let s = self.optimize(problem)?;
        let flatness = match problem.moment_block {
            Some(_) => Some(s.flatness(r, FlatnessMode::Graph, self.config.tau_rank)?),
            None => None,
        };
        Ok(GraphBoundResult {
            parameter,
            graph: g.clone(),
            level: r,
            value: s.objective,
            integer_value: None,
            solution: Some(s),
            flatness,
            anchor: parameter.anchor().into(),
            probes: vec![],
        })
    }

    pub fn theta(&self, g: &Graph) -> Result<GraphBoundResult> {
        check_inputs(g, 1)?;
        self.bound(Parameter::Theta, g, 1, &theta_problem(g)?)
    }

    pub fn xi_stab(&self, g: &Graph, r: usize) -> Result<GraphBoundResult> {
        check_inputs(g, r)?;
        let p = xi_stab_problem(
            g,
            r,
            EquivalenceMode::TracialSymmetric,
            self.config.basis_cap,
        )?;
        self.bound(Parameter::XiStab, g, r, &p)
    }

    pub fn xi_col(
        &self,
        g: &Graph,
        r: usize,
        strengthening: Strengthening,
    ) -> Result<GraphBoundResult> {
        check_inputs(g, r)?;
        let p = xi_col_problem(
            g,
            r,
            strengthening,
            EquivalenceMode::TracialSymmetric,
            self.config.basis_cap,
            self.config.clique_cap,
        )?;
        let parameter = match strengthening {
            Strengthening::None => Parameter::XiCol,
            Strengthening::ThetaPlus => Parameter::ThetaPlus,
            Strengthening::XiSdp => Parameter::XiSdp,
        };
        self.bound(parameter, g, r, &p)
    }

    pub fn lasserre_stab(&self, g: &Graph, r: usize) -> Result<GraphBoundResult> {
        check_inputs(g, r)?;
        let p = xi_stab_problem(g, r, EquivalenceMode::Commutative, self.config.basis_cap)?;
        self.bound(Parameter::LasStab, g, r, &p)
    }

    pub fn lasserre_col(&self, g: &Graph, r: usize) -> Result<GraphBoundResult> {
        check_inputs(g, r)?;
        let p = xi_col_problem(
            g,
            r,
            Strengthening::None,
            EquivalenceMode::Commutative,
            self.config.basis_cap,
            self.config.clique_cap,
        )?;
        self.bound(Parameter::LasCol, g, r, &p)
    }

    /// Feasibility of the `k`-labelled system, with the solution it found.
    pub fn gamma_feasible(
        &self,
        g: &Graph,
        kind: GammaKind,
        k: usize,
        r: usize,
    ) -> Result<(bool, f64, SdpSolution)> {
        let p = gamma_problem(g, kind, k, r, self.config.basis_cap)?;
        let f = conic::feasibility_with(&p, self.config.eps_feas, &self.config.solver)?;
        if f.feasible {
            return Ok((true, f.margin, f.solution));
        }
        let s = &f.solution;
        let certified = matches!(s.status, SdpStatus::Optimal | SdpStatus::Infeasible)
            || s.dual_bound < -self.config.eps_feas;
        if !certified {
            return Err(Error::Numerical(format!(
                "{kind:?} feasibility at k = {k} undecided: margin {:.3e}, dual bound {:.3e}",
                f.margin, s.dual_bound
            )));
        }
        Ok((false, f.margin, f.solution))
    }

    /// Smallest `k` with a feasible coloring system, searched in
    /// `[⌈ξ_col^1(G)⌉, greedy coloring size]`.
    pub fn gamma_col(&self, g: &Graph, r: usize) -> Result<GraphBoundResult> {
        check_inputs(g, r)?;
        let lo_bound = self.xi_col(g, 1, Strengthening::None)?.value;
        let k_lo = ((lo_bound - 1e-6).ceil().max(1.0)) as usize;
        let k_hi = g.greedy_coloring().iter().max().map_or(1, |&c| c + 1);
        if k_lo > k_hi {
            return Err(Error::Bracket {
                what: "gamma_col".into(),
                lo: k_lo as f64,
                hi: k_hi as f64,
            });
        }
        let mut probes = Vec::new();
        let probe = |k: usize, probes: &mut Vec<Probe>| -> Result<(bool, SdpSolution)> {
            let (ok, margin, s) = self.gamma_feasible(g, GammaKind::Col, k, r)?;
            probes.push(Probe {
                k,
                feasible: ok,
                value: margin,
            });
            Ok((ok, s))
        };
        let (ok_hi, mut best) = probe(k_hi, &mut probes)?;
        if !ok_hi {
            return Err(Error::Bracket {
                what: "gamma_col: upper end infeasible".into(),
                lo: k_lo as f64,
                hi: k_hi as f64,
            });
        }
        let (mut lo, mut hi) = (k_lo, k_hi);
        if lo < hi {
            let (ok_lo, s) = probe(lo, &mut probes)?;
            if ok_lo {
                hi = lo;
                best = s;
            } else {
                lo += 1;
            }
        }
        while lo < hi {
            let mid = (lo + hi) / 2;
            let (ok, s) = probe(mid, &mut probes)?;
            if ok {
                hi = mid;
                best = s;
            } else {
                lo = mid + 1;
            }
        }
        self.integer_result(Parameter::GammaCol, g, r, hi, best, probes)
    }

    /// Largest `k` with a feasible index system, searched in
    /// `[greedy stable set size, ⌊ξ_stab^1(G)⌋]`.
    pub fn gamma_stab(&self, g: &Graph, r: usize) -> Result<GraphBoundResult> {
        check_inputs(g, r)?;
        let up_bound = self.xi_stab(g, 1)?.value;
        let k_hi = (up_bound + 1e-6).floor() as usize;
        let k_lo = g.greedy_stable_set().len().max(1);
        if k_lo > k_hi {
            return Err(Error::Bracket {
                what: "gamma_stab".into(),
                lo: k_lo as f64,
                hi: k_hi as f64,
            });
        }
        let mut probes = Vec::new();
        let probe = |k: usize, probes: &mut Vec<Probe>| -> Result<(bool, SdpSolution)> {
            let (ok, margin, s) = self.gamma_feasible(g, GammaKind::Stab, k, r)?;
            probes.push(Probe {
                k,
                feasible: ok,
                value: margin,
            });
            Ok((ok, s))
        };
        let (ok_lo, mut best) = probe(k_lo, &mut probes)?;
        if !ok_lo {
            return Err(Error::Bracket {
                what: "gamma_stab: lower end infeasible".into(),
                lo: k_lo as f64,
                hi: k_hi as f64,
            });
        }
        let (mut lo, mut hi) = (k_lo, k_hi);
        if lo < hi {
            let (ok_hi, s) = probe(hi, &mut probes)?;
            if ok_hi {
                lo = hi;
                best = s;
            } else {
                hi -= 1;
            }
        }
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            let (ok, s) = probe(mid, &mut probes)?;
            if ok {
                lo = mid;
                best = s;
            } else {
                hi = mid - 1;
            }
        }
        self.integer_result(Parameter::GammaStab, g, r, lo, best, probes)
    }

    fn integer_result(
        &self,
        parameter: Parameter,
        g: &Graph,
        r: usize,
        k: usize,
        solution: SdpSolution,
        probes: Vec<Probe>,
    ) -> Result<GraphBoundResult> {
        let flatness = solution
            .flatness(r, FlatnessMode::Graph, self.config.tau_rank)
            .ok();
        Ok(GraphBoundResult {
            parameter,
            graph: g.clone(),
            level: r,
            value: k as f64,
            integer_value: Some(k),
            solution: Some(solution),
            flatness,
            anchor: parameter.anchor().into(),
            probes,
        })
    }

    /// `Λ_r(G) = min{k : las_r^stab(G□K_k) ≥ |V| - EQUALITY_SLACK}`.
    pub fn lambda(&self, g: &Graph, r: usize) -> Result<GraphBoundResult> {
        check_inputs(g, r)?;
        let (k, probes, s) = self.min_product_k(g, r, EquivalenceMode::Commutative)?;
        self.integer_result(Parameter::Lambda, g, r, k, s, probes)
    }

    fn stab_value(&self, g: &Graph, r: usize, mode: EquivalenceMode) -> Result<SdpSolution> {
        self.optimize(&xi_stab_problem(g, r, mode, self.config.basis_cap)?)
    }

    /// `min{k : ξ^stab(G□K_k) ≥ |V| - EQUALITY_SLACK}`, scanning upwards to
    /// the greedy coloring size (which always attains `|V|`).
    fn min_product_k(
        &self,
        g: &Graph,
        r: usize,
        mode: EquivalenceMode,
    ) -> Result<(usize, Vec<Probe>, SdpSolution)> {
        let n = g.n() as f64;
        let k_max = g.greedy_coloring().iter().max().map_or(1, |&c| c + 1);
        let mut probes = Vec::new();
        for k in 1..=k_max {
            let s = self.stab_value(&g.cartesian_product(k), r, mode)?;
            let ok = s.objective >= n - EQUALITY_SLACK;
            probes.push(Probe {
                k,
                feasible: ok,
                value: s.objective,
            });
            if ok {
                return Ok((k, probes, s));
            }
        }
        Err(Error::Numerical(format!(
            "product value stayed below |V| up to the greedy coloring size {k_max}"
        )))
    }

    /// `max{k : ξ^stab(K_k⋆G) ≥ k - EQUALITY_SLACK}`, scanning upwards
    /// until the first failure above `⌊ϑ(G)⌋`.
    fn max_star_k(&self, g: &Graph, r: usize) -> Result<(usize, Vec<Probe>)> {
        let theta = self.xi_stab(g, 1)?.value;
        let k_max = (theta + 1e-6).floor() as usize + 1;
        let mut probes = Vec::new();
        let mut best = 0;
        for k in 1..=k_max {
            let s = self.stab_value(&g.star_product(k), r, EquivalenceMode::TracialSymmetric)?;
            let ok = s.objective >= k as f64 - EQUALITY_SLACK;
            probes.push(Probe {
                k,
                feasible: ok,
                value: s.objective,
            });
            if ok {
                best = k;
            }
        }
        Ok((best, probes))
    }

    /// Recomputes `γ_r^col` and `γ_r^stab` through the product graphs.
    pub fn gamma_cross_check(&self, g: &Graph, r: usize) -> Result<CrossCheck> {
        check_inputs(g, r)?;
        let col = self.gamma_col(g, r)?;
        let stab = self.gamma_stab(g, r)?;
        let (col_product, col_probes, _) =
            self.min_product_k(g, r, EquivalenceMode::TracialSymmetric)?;
        let (stab_product, stab_probes) = self.max_star_k(g, r)?;
        Ok(CrossCheck::new(
            r,
            col.integer_value.unwrap_or_default(),
            col_product,
            col_probes,
            stab.integer_value.unwrap_or_default(),
            stab_product,
            stab_probes,
        ))
    }

    pub fn product_identity_check(
        &self,
        g: &Graph,
        r: usize,
        vertex_transitive: bool,
    ) -> Result<ProductIdentityReport> {
        check_inputs(g, r)?;
        let stab = self.xi_stab(g, r)?.value;
        let col = self.xi_col(g, r, Strengthening::None)?.value;
        Ok(ProductIdentityReport::new(
            g.n(),
            r,
            vertex_transitive,
            stab,
            col,
        ))
    }

    pub fn hierarchy_comparison(&self, g: &Graph, r: usize) -> Result<HierarchyComparison> {
        check_inputs(g, r)?;
        let xi_col = self.xi_col(g, r, Strengthening::None)?.value;
        let gamma_col = self.gamma_col(g, r)?.integer_value.unwrap_or_default();
        let xi_stab = self.xi_stab(g, r)?.value;
        let gamma_stab = self.gamma_stab(g, r)?.integer_value.unwrap_or_default();
        Ok(HierarchyComparison::new(
            r, xi_col, gamma_col, xi_stab, gamma_stab,
        ))
    }

    /// Dispatch by parameter name. `Theta`, `ThetaPlus` and `XiSdp` ignore
    /// `r` beyond 1.
    pub fn compute(&self, parameter: Parameter, g: &Graph, r: usize) -> Result<GraphBoundResult> {
        match parameter {
            Parameter::Theta => self.theta(g),
            Parameter::ThetaPlus => self.xi_col(g, 1, Strengthening::ThetaPlus),
            Parameter::XiSdp => self.xi_col(g, 1, Strengthening::XiSdp),
            Parameter::XiCol => self.xi_col(g, r, Strengthening::None),
            Parameter::XiStab => self.xi_stab(g, r),
            Parameter::GammaCol => self.gamma_col(g, r),
            Parameter::GammaStab => self.gamma_stab(g, r),
            Parameter::LasCol => self.lasserre_col(g, r),
            Parameter::LasStab => self.lasserre_stab(g, r),
            Parameter::Lambda => self.lambda(g, r),
        }
    }
}

pub fn theta(g: &Graph) -> Result<GraphBoundResult> {
    GraphBounds::default().theta(g)
}

pub fn xi_stab(g: &Graph, r: usize) -> Result<GraphBoundResult> {
    GraphBounds::default().xi_stab(g, r)
}

pub fn xi_col(g: &Graph, r: usize, strengthening: Strengthening) -> Result<GraphBoundResult> {
    GraphBounds::default().xi_col(g, r, strengthening)
}

pub fn gamma_col(g: &Graph, r: usize) -> Result<GraphBoundResult> {
    GraphBounds::default().gamma_col(g, r)
}

pub fn gamma_stab(g: &Graph, r: usize) -> Result<GraphBoundResult> {
    GraphBounds::default().gamma_stab(g, r)
}

pub fn lasserre_stab(g: &Graph, r: usize) -> Result<GraphBoundResult> {
    GraphBounds::default().lasserre_stab(g, r)
}

pub fn lasserre_col(g: &Graph, r: usize) -> Result<GraphBoundResult> {
    GraphBounds::default().lasserre_col(g, r)
}

pub fn lambda(g: &Graph, r: usize) -> Result<GraphBoundResult> {
    GraphBounds::default().lambda(g, r)
}

pub fn product_identity_check(
    g: &Graph,
    r: usize,
    vertex_transitive: bool,
) -> Result<ProductIdentityReport> {
    GraphBounds::default().product_identity_check(g, r, vertex_transitive)
}

pub fn hierarchy_comparison(g: &Graph, r: usize) -> Result<HierarchyComparison> {
    GraphBounds::default().hierarchy_comparison(g, r)
}
