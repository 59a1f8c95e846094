use super::index::{LinearForm, MomentContext};
use crate::ncwords::{Coefficient, NcPolynomial, Word};
use crate::{Error, Result};

/// A symmetric matrix of linear forms indexed by row words.
#[derive(Clone, Debug)]
pub struct SymbolicBlock {
    pub label: String,
    pub rows: Vec<Word>,
    /// Row-major `rows.len() x rows.len()` entries.
    pub entries: Vec<LinearForm>,
}

impl SymbolicBlock {
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &LinearForm {
        &self.entries[i * self.rows.len() + j]
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.size();
        (0..n).all(|i| (0..i).all(|j| self.entry(i, j) == self.entry(j, i)))
    }
}

/// The moment matrix `M_r(L) = (L(u* v))` over the given row words.
pub fn moment_block(basis: &[Word], ctx: &mut MomentContext) -> Result<SymbolicBlock> {
    let one = NcPolynomial::<f64>::one();
    build_block("moment".into(), basis, &one, ctx)
}

/// The localizing matrix `(L(u* g v))` for a symmetric generator `g`, with
/// rows of degree `<= r - ceil(deg(g)/2)`.
pub fn localizing_block<C: Coefficient>(
    label: impl Into<String>,
    g: &NcPolynomial<C>,
    ctx: &mut MomentContext,
) -> Result<SymbolicBlock> {
    if !g.is_symmetric(ctx.rewrite_system()) {
        return Err(Error::Contract(format!(
            "localizing generator {g} is not symmetric"
        )));
    }
    let half = g.degree().div_ceil(2);
    let r = ctx.level();
    if half > r {
        return Err(Error::Contract(format!(
            "generator of degree {} does not fit level {r}",
            g.degree()
        )));
    }
    let rows = ctx.block_rows(r - half)?;
    build_block(label.into(), &rows, g, ctx)
}

fn build_block<C: Coefficient>(
    label: String,
    rows: &[Word],
    g: &NcPolynomial<C>,
    ctx: &mut MomentContext,
) -> Result<SymbolicBlock> {
    let n = rows.len();
    let mut entries = vec![LinearForm::new(); n * n];
    for i in 0..n {
        for j in i..n {
            let f = ctx.sandwich(&rows[i], g, &rows[j])?;
            if j != i {
                entries[j * n + i] = f.clone();
            }
            entries[i * n + j] = f;
        }
    }
    Ok(SymbolicBlock {
        label,
        rows: rows.to_vec(),
        entries,
    })
}
