use serde::{Deserialize, Serialize};

use super::Probe;

/// Tolerance on `ξ_stab · ξ_col` against `|V|`.
pub const PRODUCT_TOL: f64 = 1e-3;
/// Slack on the continuous side of `ξ_col ≤ γ_col` and `ξ_stab ≥ γ_stab`.
pub const COMPARISON_SLACK: f64 = 1e-4;

/// `ξ_stab^r(G) · ξ_col^r(G) ≥ |V|`, with equality when `G` is
/// vertex-transitive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductIdentityReport {
    pub n: usize,
    pub level: usize,
    pub vertex_transitive: bool,
    pub xi_stab: f64,
    pub xi_col: f64,
    pub product: f64,
    pub holds: bool,
    pub diagnostics: Vec<String>,
}

impl ProductIdentityReport {
    pub fn new(n: usize, level: usize, vertex_transitive: bool, xi_stab: f64, xi_col: f64) -> Self {
        let product = xi_stab * xi_col;
        let nf = n as f64;
        let mut diagnostics = Vec::new();
        if product < nf - PRODUCT_TOL {
            diagnostics.push(format!("product {product} is below |V| = {n}"));
        }
        if vertex_transitive && (product - nf).abs() > PRODUCT_TOL {
            diagnostics.push(format!(
                "vertex-transitive graph but product {product} differs from |V| = {n}"
            ));
        }
        ProductIdentityReport {
            n,
            level,
            vertex_transitive,
            xi_stab,
            xi_col,
            product,
            holds: diagnostics.is_empty(),
            diagnostics,
        }
    }
}

/// `ξ_col^r ≤ γ_r^col` and `ξ_stab^r ≥ γ_r^stab`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierarchyComparison {
    pub level: usize,
    pub xi_col: f64,
    pub gamma_col: usize,
    pub xi_stab: f64,
    pub gamma_stab: usize,
    pub holds: bool,
    pub diagnostics: Vec<String>,
}

impl HierarchyComparison {
    pub fn new(
        level: usize,
        xi_col: f64,
        gamma_col: usize,
        xi_stab: f64,
        gamma_stab: usize,
    ) -> Self {
        let mut diagnostics = Vec::new();
        if xi_col > gamma_col as f64 + COMPARISON_SLACK {
            diagnostics.push(format!("xi_col = {xi_col} exceeds gamma_col = {gamma_col}"));
        }
        if xi_stab < gamma_stab as f64 - COMPARISON_SLACK {
            diagnostics.push(format!(
                "xi_stab = {xi_stab} is below gamma_stab = {gamma_stab}"
            ));
        }
        HierarchyComparison {
            level,
            xi_col,
            gamma_col,
            xi_stab,
            gamma_stab,
            holds: diagnostics.is_empty(),
            diagnostics,
        }
    }
}

/// Direct `γ` values against the product-graph formulas.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub level: usize,
    pub gamma_col: usize,
    pub gamma_col_via_product: usize,
    pub col_probes: Vec<Probe>,
    pub gamma_stab: usize,
    pub gamma_stab_via_product: usize,
    pub stab_probes: Vec<Probe>,
    pub agree: bool,
}

impl CrossCheck {
    pub fn new(
        level: usize,
        gamma_col: usize,
        gamma_col_via_product: usize,
        col_probes: Vec<Probe>,
        gamma_stab: usize,
        gamma_stab_via_product: usize,
        stab_probes: Vec<Probe>,
    ) -> Self {
        CrossCheck {
            level,
            gamma_col,
            gamma_col_via_product,
            col_probes,
            gamma_stab,
            gamma_stab_via_product,
            stab_probes,
            agree: gamma_col == gamma_col_via_product && gamma_stab == gamma_stab_via_product,
        }
    }
}
