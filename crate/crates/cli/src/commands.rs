use std::path::Path;

use ncmoment::conic::{self, Backend, SdpSolution, SdpStatus, SolverConfig};
use ncmoment::corrlab::{
    classical_membership, factorize, factors_from_json, factors_to_json, gram_of_synchronous,
    gram_to_realization, projector_realization, random_projector_family, synchronous_from_projectors,
    CMatrix, CpsdGram, Realization, Verdict,
};
use ncmoment::entdim::{entdim_problem, xi_q, Correlation, EntDimConfig, Scenario};
use ncmoment::graphs::parse_graph;
use ncmoment::qgraph::{GraphBounds, GraphConfig, Parameter, Strengthening};
use ncmoment::{Error, Result};

use crate::report::{Clock, FileDigest, RunReport, SolverSummary, Status};
use crate::{CheckArgs, CorrBoundArgs, GenArgs, GraphBoundArgs, Model, SolveSdpaArgs, StrengthenArg, SyncArgs};

/// Smallest eigenvalue of `M_P` still reported as PSD.
const GRAM_PSD_TOL: f64 = 1e-9;

fn read_input(path: &Path) -> Result<(String, FileDigest)> {
    let bytes = std::fs::read(path).map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
    let digest = FileDigest::of(path, &bytes);
    let text = String::from_utf8(bytes).map_err(|_| Error::Validation(format!("{} is not UTF-8", path.display())))?;
    Ok((text, digest))
}

fn write_output(path: &Path, text: &str) -> Result<FileDigest> {
    std::fs::write(path, text)?;
    Ok(FileDigest::of(path, text.as_bytes()))
}

fn solver_config() -> Result<SolverConfig> {
    Ok(SolverConfig {
        backend: Backend::from_env()?,
        ..SolverConfig::default()
    })
}

fn solution_status(s: &SdpSolution) -> Status {
    match s.status {
        SdpStatus::NumericalLimit => Status::NumericalLimit,
        _ => Status::Ok,
    }
}

/// Reports infeasibility as a result; every other error propagates.
fn absorb_infeasible<T>(report: &mut RunReport, r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Infeasible { message, margin }) => {
            report.status = Status::Infeasible;
            report.diagnostics.push(message);
            report.detail("infeasibility_margin", margin);
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn parse_scenario(text: &str) -> Result<Scenario> {
    let parts: Vec<usize> = text
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Validation(format!("scenario '{text}' is not nA,nB,nS,nT")))?;
    match parts[..] {
        [a, b, s, t] => Scenario::new(a, b, s, t),
        _ => Err(Error::Validation(format!("scenario '{text}' needs four counts"))),
    }
}

pub fn graph_bound(echo: Vec<String>, args: &GraphBoundArgs) -> Result<u8> {
    let mut clock = Clock::start();
    let parameter: Parameter = args.param.parse()?;
    let strengthening = match args.strengthen {
        StrengthenArg::None => Strengthening::None,
        StrengthenArg::ThetaPlus => Strengthening::ThetaPlus,
        StrengthenArg::XiSdp => Strengthening::XiSdp,
    };
    if strengthening != Strengthening::None && parameter != Parameter::XiCol {
        return Err(Error::Config("--strengthen applies to xi-col only".into()));
    }
    let (text, digest) = read_input(&args.input)?;
    let g = parse_graph(&text)?;
    let solver = solver_config()?;
    let backend = solver.backend.clone();
    let bounds = GraphBounds::new(GraphConfig {
        solver,
        ..GraphConfig::default()
    });
    clock.lap("parse");

    let mut report = RunReport::new(echo, parameter.name());
    report.input = Some(digest);
    report.level = Some(args.level);
    let computed = match parameter {
        Parameter::XiCol => bounds.xi_col(&g, args.level, strengthening),
        p => bounds.compute(p, &g, args.level),
    };
    clock.lap("solve");
    if let Some(res) = absorb_infeasible(&mut report, computed)? {
        report.value = Some(res.value);
        report.integer_value = res.integer_value;
        report.flatness = res.flatness.as_ref().map(serde_json::to_value).transpose()?;
        if let Some(s) = &res.solution {
            report.status = solution_status(s);
            report.solver = Some(SolverSummary::of(&backend, s));
        }
        report.detail("anchor", &res.anchor);
        report.detail("n", g.n());
        if !res.probes.is_empty() {
            report.detail("probes", &res.probes);
        }
        if strengthening != Strengthening::None {
            report.detail("strengthening", strengthening);
        }
    }

    if args.cross_check {
        let cc = bounds.gamma_cross_check(&g, args.level)?;
        if !cc.agree {
            report.flag(format!(
                "direct and product-graph γ disagree: col {} vs {}, stab {} vs {}",
                cc.gamma_col, cc.gamma_col_via_product, cc.gamma_stab, cc.gamma_stab_via_product
            ));
        }
        let hc = bounds.hierarchy_comparison(&g, args.level)?;
        for d in &hc.diagnostics {
            report.flag(d.clone());
        }
        report.detail("cross_check", &cc);
        report.detail("hierarchy_comparison", &hc);
        clock.lap("cross_check");
    }
    if args.vertex_transitive {
        let pi = bounds.product_identity_check(&g, args.level, true)?;
        for d in &pi.diagnostics {
            report.flag(d.clone());
        }
        report.detail("product_identity", &pi);
        clock.lap("product_identity");
    }
    report.timings = clock.finish();
    report.emit(args.out.as_deref())
}

pub fn corr_bound(echo: Vec<String>, args: &CorrBoundArgs) -> Result<u8> {
    let mut clock = Clock::start();
    let (text, digest) = read_input(&args.input)?;
    let p = Correlation::from_json(&text)?;
    let solver = solver_config()?;
    let backend = solver.backend.clone();
    let cfg = EntDimConfig {
        solver,
        ..EntDimConfig::default()
    };
    clock.lap("parse");

    let mut report = RunReport::new(echo, "xi-q");
    report.input = Some(digest);
    report.level = Some(args.level);
    if let Some(path) = &args.export_sdpa {
        let exported = conic::export_sdpa(&entdim_problem(&p, args.level, &cfg)?)?;
        report.detail("sdpa_export", write_output(path, &exported)?);
        clock.lap("export");
    }
    let computed = xi_q(&p, args.level, &cfg);
    clock.lap("solve");
    if let Some(res) = absorb_infeasible(&mut report, computed)? {
        report.value = Some(res.value);
        report.status = solution_status(&res.solution);
        report.flatness = Some(serde_json::to_value(&res.flatness)?);
        report.solver = Some(SolverSummary::of(&backend, &res.solution));
        report.detail("entdim_delta", conic::entdim_delta(args.level));
        report.detail("interpretation", &res.interpretation);
    }
    report.timings = clock.finish();
    report.emit(args.out.as_deref())
}

pub fn gen(echo: Vec<String>, args: &GenArgs) -> Result<u8> {
    let clock = Clock::start();
    let sc = parse_scenario(&args.scenario)?;
    let mut report = RunReport::new(echo, "gen");
    report.detail("model", format!("{:?}", args.model).to_lowercase());
    report.detail("dim", args.dim);
    report.detail("seed", args.seed);
    let mut outputs = Vec::new();
    let (realization, factors) = match args.model {
        Model::Tensor => {
            if args.factors_out.is_some() {
                return Err(Error::Config("--factors-out needs --model projector".into()));
            }
            (Realization::random(sc, args.dim, args.seed)?, None)
        }
        Model::Projector => {
            if sc.a != sc.b || sc.s != sc.t {
                return Err(Error::Validation(format!(
                    "projector model needs nA = nB and nS = nT, got {}",
                    args.scenario
                )));
            }
            let fam = random_projector_family(args.dim, sc.s, sc.a, args.seed)?;
            (projector_realization(&fam, args.dim)?, Some(fam))
        }
    };
    let p = match &factors {
        Some(fam) => synchronous_from_projectors(fam, args.dim)?,
        None => realization.realize()?,
    };
    outputs.push(write_output(&args.out, &(p.to_json()? + "\n"))?);
    if let Some(path) = &args.realization_out {
        outputs.push(write_output(path, &(realization.to_json()? + "\n"))?);
    }
    if let (Some(path), Some(fam)) = (&args.factors_out, &factors) {
        outputs.push(write_output(path, &(factors_to_json(fam)? + "\n"))?);
    }
    report.detail("outputs", outputs);
    report.detail("signalling", p.signalling());
    report.timings = clock.finish();
    report.emit(None)
}

pub fn check_classical(echo: Vec<String>, args: &CheckArgs) -> Result<u8> {
    let mut clock = Clock::start();
    let (text, digest) = read_input(&args.input)?;
    let p = Correlation::from_json(&text)?;
    clock.lap("parse");
    let cert = classical_membership(&p)?;
    clock.lap("lp");
    let mut report = RunReport::new(echo, "classical-membership");
    report.input = Some(digest);
    report.value = Some(cert.margin);
    report.status = match cert.verdict {
        Verdict::Classical => Status::Classical,
        Verdict::Nonclassical => Status::Nonclassical,
    };
    if !cert.verify(&p) {
        report.diagnostics.push("certificate failed independent verification".into());
    }
    report.detail("certificate", &cert);
    report.timings = clock.finish();
    report.emit(args.out.as_deref())
}

/// `max |⟨X_s^a, X_t^b⟩ - P(a,b|s,t)|` for the realized `P`.
fn gram_gap(factors: &[Vec<CMatrix>], p: &Correlation) -> f64 {
    let mut worst: f64 = 0.0;
    for (s, xs) in factors.iter().enumerate() {
        for (t, xt) in factors.iter().enumerate() {
            for (a, x) in xs.iter().enumerate() {
                for (b, y) in xt.iter().enumerate() {
                    worst = worst.max(((x * y).trace().re - p.get(a, b, s, t)).abs());
                }
            }
        }
    }
    worst
}

pub fn sync(echo: Vec<String>, args: &SyncArgs) -> Result<u8> {
    let mut clock = Clock::start();
    let (text, digest) = read_input(&args.input)?;
    let json: serde_json::Value = serde_json::from_str(&text)?;
    let mut report = RunReport::new(echo, if args.gram { "sync-gram" } else { "sync-realize" });
    report.input = Some(digest);
    let mut outputs = Vec::new();
    if args.gram {
        let gram: CpsdGram = if json.get("psi").is_some() {
            factorize(&Realization::from_json(&text)?)?
        } else {
            if args.factors_out.is_some() {
                return Err(Error::Config("--factors-out needs a realization input".into()));
            }
            gram_of_synchronous(&Correlation::from_json(&text)?)?
        };
        clock.lap("gram");
        let min_eig = gram.min_eigenvalue();
        report.value = Some(min_eig);
        report.detail("psd_tolerance", GRAM_PSD_TOL);
        report.detail("psd", gram.is_psd(GRAM_PSD_TOL));
        if !gram.is_psd(GRAM_PSD_TOL) {
            report.flag(format!("M_P has eigenvalue {min_eig:e}"));
        }
        if let Some(err) = gram.factorization_error() {
            report.detail("factorization_error", err);
        }
        outputs.push(write_output(&args.out, &(gram.to_json()? + "\n"))?);
        if let (Some(path), Some(fam)) = (&args.factors_out, &gram.factors) {
            outputs.push(write_output(path, &(factors_to_json(fam)? + "\n"))?);
        }
    } else {
        let factors = factors_from_json(&text)?;
        let r = gram_to_realization(&factors)?;
        let p = r.realize()?;
        clock.lap("realize");
        let gap = gram_gap(&factors, &p);
        report.value = Some(gap);
        report.detail("dimension", r.dimension());
        outputs.push(write_output(&args.out, &(r.to_json()? + "\n"))?);
    }
    report.detail("outputs", outputs);
    report.timings = clock.finish();
    report.emit(None)
}

pub fn solve_sdpa(echo: Vec<String>, args: &SolveSdpaArgs) -> Result<u8> {
    let mut clock = Clock::start();
    let (text, digest) = read_input(&args.input)?;
    let (status, solution) = conic::solve_sdpa_text(&text, args.tol)?;
    clock.lap("solve");
    let mut report = RunReport::new(echo, "sdpa");
    report.input = Some(digest);
    report.detail("solution", write_output(&args.output, &solution)?);
    report.detail("solver_status", status);
    report.status = match status {
        SdpStatus::Optimal => Status::Ok,
        SdpStatus::NumericalLimit => Status::NumericalLimit,
        SdpStatus::Infeasible | SdpStatus::Unbounded => Status::Infeasible,
    };
    report.timings = clock.finish();
    // stdout stays clean so this command can serve as NCMOMENT_SDPA_CMD
    match &args.report {
        Some(path) => report.emit(Some(path)),
        None => Ok(report.status.exit_code()),
    }
}
