//! Correlations with known realizations, synchronous Gram matrices and
//! classical membership.
//!
//! Realizations are complex; everything exported (correlation tables, `M_P`)
//! is real.

mod classical;
mod linalg;
mod realization;
mod sync;
mod witness;

pub use classical::{
    chsh_value, chsh_win_probability, classical_membership, classical_membership_with,
    BellFunctional, ClassicalConfig, ClassicalityCertificate, Verdict, WeightedStrategy,
    WEIGHT_TOL,
};
pub use linalg::CMatrix;
pub use realization::{Realization, COMPLETENESS_TOL, PSD_TOL, STATE_NORM_TOL};
pub use sync::{
    factorize, factors_from_json, factors_to_json, gram_of_synchronous, gram_to_realization,
    projector_realization, random_projector_family, synchronous_from_projectors, CpsdGram,
    K_MIN_EIGENVALUE, ROW_SUM_TOL, SYNC_TOL,
};
pub use witness::{realization_moments, realization_operator, trace_moments};

#[cfg(test)]
mod tests;
