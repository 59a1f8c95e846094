use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use ncmoment::conic::{reduced_lmi, sdpa};
use ncmoment::corrlab::Realization;
use ncmoment::entdim::{entdim_problem, Correlation, EntDimConfig};

const BIN: &str = env!("CARGO_BIN_EXE_ncmoment");
const C5: &str = r#"{"n": 5, "edges": [[0, 1], [1, 2], [2, 3], [3, 4], [0, 4]]}"#;
const K3: &str = "p edge 3 3\ne 1 2\ne 2 3\ne 1 3\n";

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("NCMOMENT_SOLVER").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn schema() -> jsonschema::Validator {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/run-report.schema.json"))
        .unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

/// Parses stdout as a report and checks it against the schema.
fn report(o: &Output) -> Value {
    let v: Value = serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)));
    let errors: Vec<String> = schema().iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
    v
}

struct Files(TempDir);

impl Files {
    fn new() -> Self {
        Files(tempfile::tempdir().unwrap())
    }

    fn put(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn theta_of_c5() {
    let f = Files::new();
    let g = f.put("c5.json", C5);
    let o = run(&["graph-bound", "--param", "theta", "--level", "1", "--input", s(&g)]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert!((r["value"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-5);
    assert_eq!(r["status"], "OK");
    assert_eq!(r["input"]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn gamma_col_of_k3_with_cross_check() {
    let f = Files::new();
    let g = f.put("k3.dimacs", K3);
    let o = run(&["graph-bound", "--param", "gamma-col", "--level", "1", "--input", s(&g), "--cross-check"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&o);
    assert_eq!(r["integer_value"], 3);
    assert_eq!(r["details"]["cross_check"]["agree"], true);
}

#[test]
fn xi_col_level_two_and_product_identity() {
    let f = Files::new();
    let g = f.put("c5.json", C5);
    let out = f.path("report.json");
    let o = run(&[
        "graph-bound", "--param", "xi-col", "--level", "2", "--input", s(&g), "--vertex-transitive", "--out", s(&out),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(schema().is_valid(&r));
    assert!((r["value"].as_f64().unwrap() - 2.5).abs() < 1e-3);
    assert_eq!(r["details"]["product_identity"]["holds"], true);
}

#[test]
fn strengthened_xi_col_is_recorded() {
    let f = Files::new();
    let g = f.put("c5.json", C5);
    let o = run(&["graph-bound", "--param", "xi-col", "--level", "2", "--strengthen", "xi-sdp", "--input", s(&g)]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["details"]["strengthening"], "XI_SDP");
    assert!(r["value"].as_f64().unwrap() >= 2.5 - 1e-4);
}

#[test]
fn failed_product_identity_is_a_diagnostic_exit() {
    // P3 is not vertex-transitive: ξ_stab · ξ_col = 4 > 3.
    let f = Files::new();
    let g = f.put("p3.json", r#"{"n": 3, "edges": [[0, 1], [1, 2]]}"#);
    let o = run(&["graph-bound", "--param", "xi-stab", "--input", s(&g), "--vertex-transitive"]);
    assert_eq!(code(&o), 2);
    let r = report(&o);
    assert_eq!(r["status"], "DIAGNOSTIC");
    assert!(!r["diagnostics"].as_array().unwrap().is_empty());
}

#[test]
fn bad_parameter_and_bad_file_exit_one() {
    let f = Files::new();
    let g = f.put("c5.json", C5);
    let o = run(&["graph-bound", "--param", "chi", "--input", s(&g)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown graph parameter"));
    let bad = f.put("bad.json", r#"{"n": 2, "edges": [[0, 5]]}"#);
    assert_eq!(code(&run(&["graph-bound", "--param", "theta", "--input", s(&bad)])), 1);
    assert_eq!(code(&run(&["graph-bound", "--param", "theta", "--input", "/nonexistent/g.json"])), 1);
    assert_eq!(code(&run(&["graph-bound", "--input", s(&g)])), 1);
    let o = run(&["graph-bound", "--param", "theta", "--strengthen", "theta-plus", "--input", s(&g)]);
    assert_eq!(code(&o), 1);
}

#[test]
fn gen_is_deterministic_and_scalar_models_are_classical() {
    let f = Files::new();
    let (a, b) = (f.path("a.json"), f.path("b.json"));
    for p in [&a, &b] {
        let o = run(&["gen", "--model", "tensor", "--dim", "1", "--scenario", "2,2,2,2", "--seed", "7", "--out", s(p)]);
        assert_eq!(code(&o), 0);
        report(&o);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let o = run(&["check-classical", "--input", s(&a)]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["status"], "CLASSICAL");

    let c = f.path("c.json");
    run(&["gen", "--model", "tensor", "--dim", "2", "--scenario", "2,2,2,2", "--seed", "8", "--out", s(&c)]);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn tsirelson_is_nonclassical_with_exit_two() {
    let f = Files::new();
    let p = f.put("tsirelson.json", &Realization::tsirelson_chsh().realize().unwrap().to_json().unwrap());
    let o = run(&["check-classical", "--input", s(&p)]);
    assert_eq!(code(&o), 2);
    let r = report(&o);
    assert_eq!(r["status"], "NONCLASSICAL");
    assert!(r["value"].as_f64().unwrap() > 1e-3);
}

#[test]
fn corr_bound_of_classical_correlation_is_one() {
    let f = Files::new();
    let p = f.path("p.json");
    run(&["gen", "--model", "tensor", "--dim", "1", "--scenario", "2,2,2,2", "--seed", "3", "--out", s(&p)]);
    for level in ["1", "2"] {
        let o = run(&["corr-bound", "--level", level, "--input", s(&p)]);
        assert_eq!(code(&o), 0);
        let r = report(&o);
        assert!((r["value"].as_f64().unwrap() - 1.0).abs() < 1e-4, "{r}");
        assert!(r["flatness"]["entdim_flat"].is_boolean());
    }
}

#[test]
fn exported_sdpa_reimports_losslessly() {
    let f = Files::new();
    let text = Realization::tsirelson_chsh().realize().unwrap().to_json().unwrap();
    let p = f.put("t.json", &text);
    let dat = f.path("t.dat-s");
    let o = run(&["corr-bound", "--level", "2", "--input", s(&p), "--export-sdpa", s(&dat)]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    // the level-2 value of the Tsirelson point is not separated from 1
    assert!(r["value"].as_f64().unwrap() >= 1.0 - 1e-6);

    let exported = std::fs::read_to_string(&dat).unwrap();
    let lmi = reduced_lmi(&entdim_problem(&Correlation::from_json(&text).unwrap(), 2, &EntDimConfig::default()).unwrap())
        .unwrap();
    let back = sdpa::parse_lmi(&exported).unwrap();
    assert_eq!(back, lmi);
    assert_eq!(sdpa::write_lmi(&back), exported);
    assert_eq!(r["details"]["sdpa_export"]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn invalid_correlation_names_the_violated_invariant() {
    let f = Files::new();
    let p = f.put("bad.json", r#"{"A":2,"B":2,"S":1,"T":1,"P":[[[[0.5]],[[0.1]]],[[[0.1]],[[0.5]]]]}"#);
    let o = run(&["corr-bound", "--level", "2", "--input", s(&p)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("P(a,b|0,0)"));
}

#[test]
fn sync_gram_passes_the_psd_check_and_realize_round_trips() {
    let f = Files::new();
    let (p, real, gram) = (f.path("sync.json"), f.path("real.json"), f.path("gram.json"));
    let o = run(&[
        "gen", "--model", "projector", "--dim", "2", "--scenario", "2,2,3,3", "--seed", "5", "--out", s(&p),
        "--realization-out", s(&real),
    ]);
    assert_eq!(code(&o), 0);
    let o = run(&["sync", "--gram", "--input", s(&p), "--out", s(&gram)]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["details"]["psd"], true);
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&gram).unwrap()).unwrap();
    assert_eq!(m["M"].as_array().unwrap().len(), 6);
    assert!(m["min_eigenvalue"].as_f64().unwrap() >= -1e-9);

    let factors = f.path("x.json");
    let o = run(&["sync", "--gram", "--input", s(&real), "--out", s(&gram), "--factors-out", s(&factors)]);
    assert_eq!(code(&o), 0);
    assert!(report(&o)["details"]["factorization_error"].as_f64().unwrap() < 1e-9);
    let back = f.path("back.json");
    let o = run(&["sync", "--realize", "--input", s(&factors), "--out", s(&back)]);
    assert_eq!(code(&o), 0);
    assert!(report(&o)["value"].as_f64().unwrap() < 1e-8);
    let original = Correlation::from_json(&std::fs::read_to_string(&p).unwrap()).unwrap();
    let rebuilt = Realization::from_json(&std::fs::read_to_string(&back).unwrap()).unwrap().realize().unwrap();
    for (x, y) in original.table().iter().zip(rebuilt.table()) {
        assert!((x - y).abs() < 1e-8);
    }
}

#[test]
fn sync_mode_is_required_and_exclusive() {
    let f = Files::new();
    let p = f.put("c.json", C5);
    assert_eq!(code(&run(&["sync", "--input", s(&p), "--out", s(&f.path("o"))])), 1);
    assert_eq!(code(&run(&["sync", "--gram", "--realize", "--input", s(&p), "--out", s(&f.path("o"))])), 1);
}

#[test]
fn nonsynchronous_input_to_sync_is_an_error() {
    let f = Files::new();
    let p = f.put("t.json", &Realization::tsirelson_chsh().realize().unwrap().to_json().unwrap());
    let o = run(&["sync", "--gram", "--input", s(&p), "--out", s(&f.path("m.json"))]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("synchronous"));
}

#[test]
fn sdpa_file_backend_matches_embedded() {
    let f = Files::new();
    let g = f.put("c5.json", C5);
    let args = ["graph-bound", "--param", "xi-stab", "--level", "2", "--input", s(&g)];
    let embedded = report(&run(&args));
    let o = Command::new(BIN)
        .args(args)
        .env("NCMOMENT_SOLVER", "sdpa-file")
        .env("NCMOMENT_SDPA_CMD", format!("{BIN} solve-sdpa"))
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let external = report(&o);
    assert!(external["solver"]["backend"].as_str().unwrap().starts_with("sdpa-file"));
    let (a, b) = (embedded["value"].as_f64().unwrap(), external["value"].as_f64().unwrap());
    assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    assert!((a - 2.0).abs() < 1e-3);

    let o = Command::new(BIN).args(args).env("NCMOMENT_SOLVER", "gurobi").output().unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn solve_sdpa_writes_a_solution_and_keeps_stdout_clean() {
    let f = Files::new();
    let t = f.path("c.json");
    run(&["gen", "--model", "tensor", "--dim", "1", "--scenario", "2,2,2,2", "--seed", "1", "--out", s(&t)]);
    let exported = f.path("e.dat-s");
    run(&["corr-bound", "--level", "2", "--input", s(&t), "--export-sdpa", s(&exported)]);
    let sol = f.path("e.sol");
    let rep = f.path("rep.json");
    let o = run(&["solve-sdpa", s(&exported), s(&sol), "--report", s(&rep)]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    assert!(std::fs::metadata(&sol).unwrap().len() > 0);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert!(schema().is_valid(&r));
    assert_eq!(r["details"]["solver_status"], "OPTIMAL");
}

#[test]
fn reports_are_deterministic_modulo_timings() {
    let f = Files::new();
    let g = f.put("c5.json", C5);
    let strip = |mut v: Value| {
        v["timings"] = Value::Null;
        v
    };
    let a = strip(report(&run(&["graph-bound", "--param", "las-stab", "--level", "2", "--input", s(&g)])));
    let b = strip(report(&run(&["graph-bound", "--param", "las-stab", "--level", "2", "--input", s(&g)])));
    assert_eq!(a, b);
}
