//! Browser front end: graph bounds, CHSH classicality and entanglement
//! dimension bounds, all on the embedded solver.
//!
//! Every exported function takes and returns JSON text. The plain `*_json`
//! functions are the native API; the `#[wasm_bindgen]` wrappers only convert
//! errors.

use serde_json::json;
use wasm_bindgen::prelude::*;

use ncmoment::corrlab::{chsh_value, chsh_win_probability, classical_membership, Realization};
use ncmoment::entdim::{xi_q, Correlation, EntDimConfig, Scenario};
use ncmoment::graphs::{parse_graph, Graph};
use ncmoment::qgraph::{self, Strengthening};

/// Largest graph accepted from the page.
pub const MAX_VERTICES: usize = 10;
/// Highest entanglement-dimension level offered in the page.
pub const MAX_ENTDIM_LEVEL: usize = 2;

type Res<T> = Result<T, String>;

fn err(e: ncmoment::Error) -> String {
    e.to_string()
}

fn small_graph(text: &str) -> Res<Graph> {
    let g = parse_graph(text).map_err(err)?;
    if g.n() > MAX_VERTICES {
        return Err(format!("the demo takes at most {MAX_VERTICES} vertices, got {}", g.n()));
    }
    Ok(g)
}

/// ϑ, ξ_stab, ξ_col and las_stab at `level`, with `α` and `χ` for comparison.
pub fn graph_bounds_json(graph: &str, level: usize) -> Res<String> {
    let g = small_graph(graph)?;
    if !(1..=2).contains(&level) {
        return Err("level must be 1 or 2".into());
    }
    let theta = qgraph::theta(&g).map_err(err)?.value;
    let xs = qgraph::xi_stab(&g, level).map_err(err)?.value;
    let xc = qgraph::xi_col(&g, level, Strengthening::None).map_err(err)?.value;
    let ls = qgraph::lasserre_stab(&g, level).map_err(err)?.value;
    Ok(json!({
        "n": g.n(),
        "level": level,
        "theta": theta,
        "xi_stab": xs,
        "xi_col": xc,
        "las_stab": ls,
        "product": xs * xc,
        "alpha": g.stability_number(),
        "chi": g.chromatic_number(),
    })
    .to_string())
}

/// `v · P_Tsirelson + (1 - v) · uniform`.
pub fn noisy_tsirelson_json(visibility: f64) -> Res<String> {
    if !(0.0..=1.0).contains(&visibility) {
        return Err("visibility must lie in [0, 1]".into());
    }
    let t = Realization::tsirelson_chsh().realize().map_err(err)?;
    let p = Correlation::from_fn(Scenario::chsh(), |a, b, s, u| {
        visibility * t.get(a, b, s, u) + (1.0 - visibility) * 0.25
    })
    .map_err(err)?;
    p.to_json().map_err(err)
}

/// Local-polytope verdict, plus the CHSH values when the scenario is CHSH.
pub fn classicality_json(correlation: &str) -> Res<String> {
    let p = Correlation::from_json(correlation).map_err(err)?;
    let cert = classical_membership(&p).map_err(err)?;
    let mut out = json!({
        "verdict": cert.verdict,
        "margin": cert.margin,
        "strategies_used": cert.strategies_used,
    });
    if p.scenario() == Scenario::chsh() {
        out["chsh"] = json!(chsh_value(&p).map_err(err)?);
        out["win_probability"] = json!(chsh_win_probability(&p).map_err(err)?);
    }
    Ok(out.to_string())
}

/// ξ_q^r(P) for `r <= MAX_ENTDIM_LEVEL`.
pub fn entdim_json(correlation: &str, level: usize) -> Res<String> {
    if !(1..=MAX_ENTDIM_LEVEL).contains(&level) {
        return Err(format!("level must be between 1 and {MAX_ENTDIM_LEVEL}"));
    }
    let p = Correlation::from_json(correlation).map_err(err)?;
    let r = xi_q(&p, level, &EntDimConfig::default()).map_err(err)?;
    Ok(json!({
        "level": level,
        "value": r.value,
        "status": r.solution.status,
        "iterations": r.solution.diagnostics.iterations,
        "ranks": r.flatness.ranks,
        "entdim_flat": r.flatness.entdim_flat,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn graph_bounds(graph: &str, level: usize) -> Result<String, JsValue> {
    graph_bounds_json(graph, level).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn noisy_tsirelson(visibility: f64) -> Result<String, JsValue> {
    noisy_tsirelson_json(visibility).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn classicality(correlation: &str) -> Result<String, JsValue> {
    classicality_json(correlation).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn entdim(correlation: &str, level: usize) -> Result<String, JsValue> {
    entdim_json(correlation, level).map_err(|e| JsValue::from_str(&e))
}
