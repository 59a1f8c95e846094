use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Number of singular values above `tau_rank * σ_max`; 0 for the zero matrix.
pub fn numerical_rank(matrix: &DMatrix<f64>, tau_rank: f64) -> usize {
    rank_above(matrix, None, tau_rank)
}

fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect()
}

/// Rank relative to `reference` (defaults to the matrix's own largest
/// singular value).
fn rank_above(m: &DMatrix<f64>, reference: Option<f64>, tau: f64) -> usize {
    let sv = singular_values(m);
    let smax = reference.unwrap_or_else(|| sv.iter().copied().fold(0.0, f64::max));
    if smax <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tau * smax).count()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlatnessMode {
    /// Flag `δ = ⌈r/3⌉ + 1`.
    Entdim,
    /// Any `δ >= 1`.
    Graph,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatnessReport {
    pub r: usize,
    /// `rank(M_s)` for `s = 0..=r`.
    pub ranks: Vec<usize>,
    pub tau_rank: f64,
    /// All `δ >= 1` with `rank(M_{r-δ}) = rank(M_r)`.
    pub flat_deltas: Vec<usize>,
    /// Flatness at `δ = ⌈r/3⌉ + 1`, reported in [`FlatnessMode::Entdim`].
    pub entdim_flat: Option<bool>,
}

impl FlatnessReport {
    pub fn is_flat(&self, delta: usize) -> bool {
        self.flat_deltas.contains(&delta)
    }
}

pub fn entdim_delta(r: usize) -> usize {
    r.div_ceil(3) + 1
}

/// Ranks of the nested principal submatrices `M_s` (rows of degree `<= s`)
/// of a moment matrix, all measured against the largest singular value of
/// the full matrix so that they are nondecreasing in `s`.
pub fn flatness_of_matrix(
    moment: &DMatrix<f64>,
    row_degrees: &[usize],
    r: usize,
    mode: FlatnessMode,
    tau_rank: f64,
) -> Result<FlatnessReport> {
    if moment.nrows() != row_degrees.len() || moment.ncols() != row_degrees.len() {
        return Err(Error::Contract(
            "moment matrix and row degrees disagree".into(),
        ));
    }
    let smax = singular_values(moment).into_iter().fold(0.0, f64::max);
    let mut ranks = Vec::with_capacity(r + 1);
    for s in 0..=r {
        let idx: Vec<usize> = (0..row_degrees.len())
            .filter(|&i| row_degrees[i] <= s)
            .collect();
        let sub = moment.select_rows(&idx).select_columns(&idx);
        ranks.push(if smax > 0.0 {
            rank_above(&sub, Some(smax), tau_rank)
        } else {
            0
        });
    }
    let top = ranks[r];
    let flat_deltas: Vec<usize> = (1..=r).filter(|&d| ranks[r - d] == top).collect();
    let entdim_flat = match mode {
        FlatnessMode::Entdim => {
            let d = entdim_delta(r);
            Some(d <= r && ranks[r - d] == top)
        }
        FlatnessMode::Graph => None,
    };
    Ok(FlatnessReport {
        r,
        ranks,
        tau_rank,
        flat_deltas,
        entdim_flat,
    })
}
