use serde_json::Value;

use ncmoment_demo::{classicality_json, entdim_json, graph_bounds_json, noisy_tsirelson_json};

const C5: &str = r#"{"n":5,"edges":[[0,1],[1,2],[2,3],[3,4],[0,4]]}"#;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

fn num(v: &Value, k: &str) -> f64 {
    v[k].as_f64().unwrap()
}

#[test]
fn graph_panel_reports_the_c5_values() {
    let one = parse(graph_bounds_json(C5, 1).unwrap());
    assert!((num(&one, "theta") - 5f64.sqrt()).abs() < 1e-5);
    assert!((num(&one, "xi_stab") - 5f64.sqrt()).abs() < 1e-5);
    let two = parse(graph_bounds_json(C5, 2).unwrap());
    assert!((num(&two, "xi_col") - 2.5).abs() < 1e-3);
    assert!((num(&two, "las_stab") - 2.0).abs() < 1e-4);
    assert_eq!(two["alpha"], 2);
    assert_eq!(two["chi"], 3);
}

#[test]
fn graph_panel_rejects_large_graphs_and_levels() {
    let big = r#"{"n":11,"edges":[]}"#;
    assert!(graph_bounds_json(big, 1).unwrap_err().contains("at most"));
    assert!(graph_bounds_json(C5, 3).is_err());
    assert!(graph_bounds_json("not a graph", 1).is_err());
}

#[test]
fn visibility_threshold_separates_the_verdicts() {
    let v = std::f64::consts::FRAC_1_SQRT_2;
    let below = parse(classicality_json(&noisy_tsirelson_json(v - 0.01).unwrap()).unwrap());
    let above = parse(classicality_json(&noisy_tsirelson_json(v + 0.01).unwrap()).unwrap());
    assert_eq!(below["verdict"], "CLASSICAL");
    assert_eq!(above["verdict"], "NONCLASSICAL");
    let full = parse(classicality_json(&noisy_tsirelson_json(1.0).unwrap()).unwrap());
    assert!((num(&full, "chsh") - 2.0 * 2f64.sqrt()).abs() < 1e-9);
    assert!(noisy_tsirelson_json(1.5).is_err());
}

#[test]
fn entdim_panel_runs_levels_one_and_two() {
    let p = noisy_tsirelson_json(0.5).unwrap();
    for level in 1..=2 {
        let r = parse(entdim_json(&p, level).unwrap());
        assert!((num(&r, "value") - 1.0).abs() < 1e-4);
    }
    assert!(entdim_json(&p, 3).is_err());
    assert!(entdim_json("{}", 1).is_err());
}
