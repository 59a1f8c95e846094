//! Solving assembled moment SDPs: elimination of equalities, an embedded
//! interior point method, SDPA file exchange, numerical rank and flatness.

mod ipm;
mod lmi;
mod rank;
mod reduce;
pub mod sdpa;

use std::path::PathBuf;
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use lmi::{BlockKind, Lmi, LmiBlock, SymEntries};
pub use rank::{entdim_delta, flatness_of_matrix, numerical_rank, FlatnessMode, FlatnessReport};
pub use sdpa::LmiPoint;

use crate::momentize::SdpProblem;
use crate::{Error, Result};
use reduce::{ReduceOutcome, Reduction};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_EPS_FEAS: f64 = 1e-6;
pub const DEFAULT_TAU_RANK: f64 = 1e-6;
const RAY_MARGIN: f64 = 1e-7;

/// Which solver runs the reduced SDP.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Backend {
    #[default]
    Embedded,
    /// Write a `.dat-s` file and run `command <problem> <solution>`.
    SdpaFile { command: String },
}

impl Backend {
    /// `NCMOMENT_SOLVER=embedded|sdpa-file`; the external command comes from
    /// `NCMOMENT_SDPA_CMD`.
    pub fn from_env() -> Result<Self> {
        match std::env::var("NCMOMENT_SOLVER").ok().as_deref() {
            None | Some("") | Some("embedded") => Ok(Backend::Embedded),
            Some("sdpa-file") => {
                let command = std::env::var("NCMOMENT_SDPA_CMD").map_err(|_| {
                    Error::Config("NCMOMENT_SOLVER=sdpa-file needs NCMOMENT_SDPA_CMD".into())
                })?;
                Ok(Backend::SdpaFile { command })
            }
            Some(other) => Err(Error::Config(format!(
                "unknown NCMOMENT_SOLVER '{other}' (expected embedded or sdpa-file)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub backend: Backend,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: DEFAULT_TOL,
            max_iter: 150,
            backend: Backend::Embedded,
        }
    }
}

impl SolverConfig {
    pub fn with_tol(tol: f64) -> Self {
        SolverConfig {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalLimit,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    /// Variables eliminated by equalities.
    pub eliminated: usize,
    pub lmi_vars: usize,
    pub block_sizes: Vec<i64>,
    /// Normalized improvement of the dual ray certifying infeasibility.
    pub ray_margin: Option<f64>,
    pub message: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpSolution {
    pub status: SdpStatus,
    /// Primal objective in the problem's own sense.
    pub objective: f64,
    /// Dual objective in the problem's sense (a bound on the optimum).
    pub dual_bound: f64,
    /// Moment vector `L(w)` indexed by variable id.
    pub moments: Vec<f64>,
    /// Realized moment matrix, rows in block order.
    pub moment_matrix: Option<Vec<Vec<f64>>>,
    pub moment_row_degrees: Vec<usize>,
    pub diagnostics: Diagnostics,
}

impl SdpSolution {
    /// Largest of the relative residuals and gap.
    pub fn accuracy(&self) -> f64 {
        let d = &self.diagnostics;
        d.primal_residual.max(d.dual_residual).max(d.gap)
    }

    /// Optimal, or stopped at the iteration limit with accuracy `<= accept`.
    pub fn is_usable(&self, accept: f64) -> bool {
        match self.status {
            SdpStatus::Optimal => true,
            SdpStatus::NumericalLimit => self.accuracy() <= accept,
            _ => false,
        }
    }

    pub fn moment_matrix(&self) -> Option<DMatrix<f64>> {
        let rows = self.moment_matrix.as_ref()?;
        let n = rows.len();
        Some(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Flatness of the realized moment matrix at level `r`.
    pub fn flatness(&self, r: usize, mode: FlatnessMode, tau_rank: f64) -> Result<FlatnessReport> {
        let m = self
            .moment_matrix()
            .ok_or_else(|| Error::Contract("solution has no realized moment matrix".into()))?;
        flatness_of_matrix(&m, &self.moment_row_degrees, r, mode, tau_rank)
    }
}

/// Feasibility verdict from `max λ` with every block `⪰ λ I` (λ capped at 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub margin: f64,
    pub solution: SdpSolution,
}

fn block_sizes(lmi: &Lmi) -> Vec<i64> {
    lmi.blocks
        .iter()
        .map(|b| match b.kind {
            BlockKind::Dense => b.size as i64,
            BlockKind::Diag => -(b.size as i64),
        })
        .collect()
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(Error::Contract(format!(
            "solve tolerance {tol} outside (0, 1e-2]"
        )));
    }
    Ok(())
}

fn moment_view(problem: &SdpProblem, y: &[f64]) -> (Option<Vec<Vec<f64>>>, Vec<usize>) {
    match problem.moment_block {
        Some(k) => {
            let b = &problem.blocks[k];
            let m = b.evaluate(y);
            let rows = (0..m.nrows())
                .map(|i| m.row(i).iter().copied().collect())
                .collect();
            (Some(rows), b.row_degrees())
        }
        None => (None, Vec::new()),
    }
}

fn trivial_solution(
    problem: &SdpProblem,
    status: SdpStatus,
    message: String,
    margin: Option<f64>,
) -> SdpSolution {
    let nan = f64::NAN;
    SdpSolution {
        status,
        objective: nan,
        dual_bound: nan,
        moments: vec![nan; problem.n_vars],
        moment_matrix: None,
        moment_row_degrees: Vec::new(),
        diagnostics: Diagnostics {
            ray_margin: margin,
            message: Some(message),
            ..Diagnostics::default()
        },
    }
}

/// Runs the configured backend on an LMI.
fn run_lmi(
    lmi: &Lmi,
    cfg: &SolverConfig,
) -> Result<(ipm::IpmStatus, LmiPoint, Diagnostics, f64, f64)> {
    match &cfg.backend {
        Backend::Embedded => {
            let r = ipm::solve(
                lmi,
                &ipm::IpmConfig {
                    tol: cfg.tol,
                    max_iter: cfg.max_iter,
                    ray_margin: RAY_MARGIN,
                },
            );
            let diag = Diagnostics {
                iterations: r.iterations,
                primal_residual: r.primal_residual,
                dual_residual: r.dual_residual,
                gap: r.gap,
                lmi_vars: lmi.n_vars,
                block_sizes: block_sizes(lmi),
                ray_margin: (r.status == ipm::IpmStatus::PrimalInfeasible).then_some(r.ray_margin),
                ..Diagnostics::default()
            };
            let point = LmiPoint {
                x: r.x,
                slack: r.slack,
                dual: r.dual,
            };
            Ok((r.status, point, diag, r.primal_obj, r.dual_obj))
        }
        Backend::SdpaFile { command } => {
            let point = run_external(lmi, command)?;
            let (status, diag, pobj, dobj) = assess_point(lmi, &point, cfg.tol);
            Ok((status, point, diag, pobj, dobj))
        }
    }
}

/// Classifies an externally computed point by direct evaluation.
fn assess_point(lmi: &Lmi, p: &LmiPoint, tol: f64) -> (ipm::IpmStatus, Diagnostics, f64, f64) {
    let pobj = lmi.objective(&p.x);
    let mut dobj = 0.0;
    let mut aty = vec![0.0; lmi.n_vars];
    let mut have_dual = false;
    for (b, y) in lmi.blocks.iter().zip(&p.dual) {
        let entry = |i: usize, j: usize| match b.kind {
            BlockKind::Dense => y[(i, j)],
            BlockKind::Diag => {
                if i == j {
                    y[(i, 0)]
                } else {
                    0.0
                }
            }
        };
        let dot = |es: &SymEntries| -> f64 {
            es.iter()
                .map(|&(i, j, a)| {
                    if i == j {
                        a * entry(i, i)
                    } else {
                        2.0 * a * entry(i, j)
                    }
                })
                .sum()
        };
        have_dual |= y.iter().any(|&v| v != 0.0);
        dobj -= dot(&b.constant);
        for (v, es) in &b.coeffs {
            aty[*v] += dot(es);
        }
    }
    let dres = aty
        .iter()
        .zip(&lmi.c)
        .map(|(a, c)| (a - c).powi(2))
        .sum::<f64>()
        .sqrt()
        / (1.0 + lmi.c.iter().map(|c| c * c).sum::<f64>().sqrt());
    let min_eig = lmi.min_eigenvalue(&p.x);
    let pres = (-min_eig).max(0.0);
    let gap = if have_dual {
        (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs())
    } else {
        0.0
    };
    let ok =
        pres <= 10.0 * tol.max(1e-9) && (!have_dual || (dres <= 1e3 * tol && gap <= 1e3 * tol));
    let diag = Diagnostics {
        primal_residual: pres,
        dual_residual: if have_dual { dres } else { f64::NAN },
        gap,
        lmi_vars: lmi.n_vars,
        block_sizes: block_sizes(lmi),
        ..Diagnostics::default()
    };
    let status = if ok {
        ipm::IpmStatus::Optimal
    } else {
        ipm::IpmStatus::Limit
    };
    (status, diag, pobj, if have_dual { dobj } else { f64::NAN })
}

static TEMP_COUNTER: AtomicUsize = AtomicUsize::new(0);

fn run_external(lmi: &Lmi, command: &str) -> Result<LmiPoint> {
    let mut parts = command.split_whitespace();
    let prog = parts
        .next()
        .ok_or_else(|| Error::Config("empty external solver command".into()))?;
    let stem = format!(
        "ncmoment-{}-{}",
        std::process::id(),
        TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    );
    let dir = std::env::temp_dir();
    let input: PathBuf = dir.join(format!("{stem}.dat-s"));
    let output: PathBuf = dir.join(format!("{stem}.sol"));
    std::fs::write(&input, sdpa::write_lmi(lmi))?;
    let status = Command::new(prog)
        .args(parts)
        .arg(&input)
        .arg(&output)
        .status();
    let cleanup = || {
        let _ = std::fs::remove_file(&input);
        let _ = std::fs::remove_file(&output);
    };
    let status = match status {
        Ok(s) => s,
        Err(e) => {
            cleanup();
            return Err(Error::Config(format!(
                "cannot run external solver '{prog}': {e}"
            )));
        }
    };
    if !status.success() {
        cleanup();
        return Err(Error::Numerical(format!(
            "external solver exited with {status}"
        )));
    }
    let text = std::fs::read_to_string(&output);
    cleanup();
    sdpa::parse_solution(lmi, &text?)
}

fn finish(
    problem: &SdpProblem,
    red: &Reduction,
    status: ipm::IpmStatus,
    point: &LmiPoint,
    mut diag: Diagnostics,
    pobj: f64,
    dobj: f64,
) -> SdpSolution {
    diag.eliminated = red.eliminated;
    let y = red.recover(&point.x);
    let (mm, degrees) = moment_view(problem, &y);
    let status = match status {
        ipm::IpmStatus::Optimal => SdpStatus::Optimal,
        ipm::IpmStatus::PrimalInfeasible => SdpStatus::Infeasible,
        ipm::IpmStatus::Unbounded => SdpStatus::Unbounded,
        ipm::IpmStatus::Limit => SdpStatus::NumericalLimit,
    };
    SdpSolution {
        status,
        objective: red.objective(pobj),
        dual_bound: red.objective(dobj),
        moments: y,
        moment_matrix: mm,
        moment_row_degrees: degrees,
        diagnostics: diag,
    }
}

fn constant_solution(problem: &SdpProblem, red: &Reduction, tol: f64) -> SdpSolution {
    let min_eig = red.lmi.min_eigenvalue(&[]);
    let y = red.recover(&[]);
    let (mm, degrees) = moment_view(problem, &y);
    let feasible = min_eig >= -10.0 * tol;
    SdpSolution {
        status: if feasible {
            SdpStatus::Optimal
        } else {
            SdpStatus::Infeasible
        },
        objective: red.objective(0.0),
        dual_bound: red.objective(0.0),
        moments: y,
        moment_matrix: mm,
        moment_row_degrees: degrees,
        diagnostics: Diagnostics {
            eliminated: red.eliminated,
            block_sizes: block_sizes(&red.lmi),
            message: (!feasible).then(|| format!("fixed blocks have eigenvalue {min_eig:e}")),
            ..Diagnostics::default()
        },
    }
}

/// Solves an assembled problem.
pub fn solve(problem: &SdpProblem, tol: f64) -> Result<SdpSolution> {
    solve_with(problem, &SolverConfig::with_tol(tol))
}

pub fn solve_with(problem: &SdpProblem, cfg: &SolverConfig) -> Result<SdpSolution> {
    check_tol(cfg.tol)?;
    let red = match reduce::reduce(problem) {
        ReduceOutcome::Reduced(r) => r,
        ReduceOutcome::Inconsistent { margin, message } => {
            return Ok(trivial_solution(
                problem,
                SdpStatus::Infeasible,
                message,
                Some(margin),
            ))
        }
        ReduceOutcome::Unbounded { var } => {
            return Ok(trivial_solution(
                problem,
                SdpStatus::Unbounded,
                format!("variable {var} is unconstrained"),
                None,
            ))
        }
    };
    if red.lmi.n_vars == 0 {
        return Ok(constant_solution(problem, &red, cfg.tol));
    }
    let (status, point, diag, pobj, dobj) = run_lmi(&red.lmi, cfg)?;
    Ok(finish(problem, &red, status, &point, diag, pobj, dobj))
}

/// Decides whether the constraint system of `problem` (which must have no
/// objective) admits a solution, up to `eps_feas`.
pub fn feasibility(problem: &SdpProblem, eps_feas: f64) -> Result<Feasibility> {
    feasibility_with(problem, eps_feas, &SolverConfig::default())
}

pub fn feasibility_with(
    problem: &SdpProblem,
    eps_feas: f64,
    cfg: &SolverConfig,
) -> Result<Feasibility> {
    if !problem.objective.is_empty() {
        return Err(Error::Contract(
            "feasibility problems take no objective".into(),
        ));
    }
    check_tol(cfg.tol)?;
    let red = match reduce::reduce(problem) {
        ReduceOutcome::Reduced(r) => r,
        ReduceOutcome::Inconsistent { margin, message } => {
            return Ok(Feasibility {
                feasible: false,
                margin: -margin,
                solution: trivial_solution(problem, SdpStatus::Infeasible, message, Some(margin)),
            })
        }
        ReduceOutcome::Unbounded { .. } => {
            return Err(Error::Internal(
                "feasibility reduction reported unboundedness".into(),
            ))
        }
    };
    if red.lmi.n_vars == 0 {
        let margin = red.lmi.min_eigenvalue(&[]).min(1.0);
        let solution = constant_solution(problem, &red, cfg.tol);
        return Ok(Feasibility {
            feasible: margin >= -eps_feas,
            margin,
            solution,
        });
    }
    let lmi = red.lmi.with_margin_variable(1.0);
    let (status, point, mut diag, pobj, dobj) = run_lmi(&lmi, cfg)?;
    let t = lmi.n_vars - 1;
    let margin = point.x[t];
    diag.eliminated = red.eliminated;
    if status != ipm::IpmStatus::Optimal {
        diag.message = Some(format!(
            "margin from a non-optimal iterate (dual bound {:e})",
            -dobj
        ));
    }
    let y = red.recover(&point.x[..t]);
    let (mm, degrees) = moment_view(problem, &y);
    let solution = SdpSolution {
        status: match status {
            ipm::IpmStatus::Optimal => SdpStatus::Optimal,
            _ => SdpStatus::NumericalLimit,
        },
        objective: -pobj,
        dual_bound: -dobj,
        moments: y,
        moment_matrix: mm,
        moment_row_degrees: degrees,
        diagnostics: diag,
    };
    Ok(Feasibility {
        feasible: margin >= -eps_feas,
        margin,
        solution,
    })
}

/// The reduced problem in SDPA sparse format.
pub fn export_sdpa(problem: &SdpProblem) -> Result<String> {
    Ok(sdpa::write_lmi(&reduced_lmi(problem)?))
}

/// The LMI actually handed to the solver, after eliminating equalities.
pub fn reduced_lmi(problem: &SdpProblem) -> Result<Lmi> {
    match reduce::reduce(problem) {
        ReduceOutcome::Reduced(r) => Ok(r.lmi),
        ReduceOutcome::Inconsistent { margin, message } => Err(Error::Infeasible {
            message,
            margin: -margin,
        }),
        ReduceOutcome::Unbounded { var } => Err(Error::Contract(format!(
            "variable {var} is unconstrained; nothing to export"
        ))),
    }
}

/// Reads a solution file produced for [`export_sdpa`]`(problem)`.
pub fn import_solution_sdpa(problem: &SdpProblem, text: &str, tol: f64) -> Result<SdpSolution> {
    let red = match reduce::reduce(problem) {
        ReduceOutcome::Reduced(r) => r,
        _ => {
            return Err(Error::Contract(
                "problem has no exportable reduction".into(),
            ))
        }
    };
    let point = sdpa::parse_solution(&red.lmi, text)?;
    let (status, diag, pobj, dobj) = assess_point(&red.lmi, &point, tol);
    Ok(finish(problem, &red, status, &point, diag, pobj, dobj))
}

/// Solves an SDPA problem text with the embedded solver and returns the
/// solution file text together with the status.
pub fn solve_sdpa_text(text: &str, tol: f64) -> Result<(SdpStatus, String)> {
    check_tol(tol)?;
    let lmi = sdpa::parse_lmi(text)?;
    let r = ipm::solve(
        &lmi,
        &ipm::IpmConfig {
            tol,
            max_iter: SolverConfig::default().max_iter,
            ray_margin: RAY_MARGIN,
        },
    );
    let status = match r.status {
        ipm::IpmStatus::Optimal => SdpStatus::Optimal,
        ipm::IpmStatus::PrimalInfeasible => SdpStatus::Infeasible,
        ipm::IpmStatus::Unbounded => SdpStatus::Unbounded,
        ipm::IpmStatus::Limit => SdpStatus::NumericalLimit,
    };
    let point = LmiPoint {
        x: r.x,
        slack: r.slack,
        dual: r.dual,
    };
    Ok((status, sdpa::write_solution(&lmi, &point)))
}

#[cfg(test)]
mod tests;
