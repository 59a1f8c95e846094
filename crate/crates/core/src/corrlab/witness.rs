use super::linalg::{self, CMatrix};
use super::realization::Realization;
use crate::ncwords::{Family, Symbol, Word};
use crate::{Error, Result};

/// `Re Tr(w(op))` for every word, with `op` sending a symbol to a `dim x dim`
/// matrix and the empty word to the identity.
pub fn trace_moments(
    words: &[Word],
    dim: usize,
    op: impl Fn(Symbol) -> Option<CMatrix>,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(words.len());
    for w in words {
        let mut m = CMatrix::identity(dim, dim);
        for &s in w.symbols() {
            let x =
                op(s).ok_or_else(|| Error::Validation(format!("no operator for symbol {s}")))?;
            if x.nrows() != dim || x.ncols() != dim {
                return Err(Error::Validation(format!(
                    "operator for {s} is not {dim}x{dim}"
                )));
            }
            m *= x;
        }
        out.push(m.trace().re);
    }
    Ok(out)
}

/// Operator of `s` on `C^d ⊗ C^d`: `E ⊗ I`, `I ⊗ F` or `ψψ*`.
pub fn realization_operator(r: &Realization, s: Symbol) -> Option<CMatrix> {
    let d = r.dimension();
    let id = CMatrix::identity(d, d);
    let (q, a) = (s.question as usize, s.answer as usize);
    match s.family {
        Family::X => r.alice().get(q)?.get(a).map(|e| linalg::kron(e, &id)),
        Family::Y => r.bob().get(q)?.get(a).map(|f| linalg::kron(&id, f)),
        Family::Z => {
            let psi = r.state();
            Some(psi * psi.adjoint())
        }
        Family::Vert => None,
    }
}

/// `L(w) = Σ_i λ_i Re Tr(w(E_i ⊗ I, I ⊗ F_i, ψ_i ψ_i*))`. Then `L(1) = Σ_i
/// λ_i d_i²` and `L(x_s^a y_t^b z) = Σ_i λ_i P_i(a,b|s,t)`.
pub fn realization_moments(words: &[Word], parts: &[(f64, &Realization)]) -> Result<Vec<f64>> {
    let mut total = vec![0.0; words.len()];
    for &(lambda, r) in parts {
        let d = r.dimension();
        let m = trace_moments(words, d * d, |s| realization_operator(r, s))?;
        for (t, v) in total.iter_mut().zip(m) {
            *t += lambda * v;
        }
    }
    Ok(total)
}
