use serde::{Deserialize, Serialize};

/// Structure of a block of an LMI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockKind {
    Dense,
    /// Only diagonal entries; a batch of scalar inequalities.
    Diag,
}

/// Upper-triangle entries `(i, j, value)` with `i <= j` of a symmetric matrix.
pub type SymEntries = Vec<(usize, usize, f64)>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LmiBlock {
    pub kind: BlockKind,
    pub size: usize,
    pub constant: SymEntries,
    /// `(variable, entries)` sorted by variable, no empty entry lists.
    pub coeffs: Vec<(usize, SymEntries)>,
}

/// `min c·x  s.t.  C_b + Σ_i x_i A_{b,i} ⪰ 0` for every block `b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lmi {
    pub n_vars: usize,
    pub c: Vec<f64>,
    pub blocks: Vec<LmiBlock>,
}

impl LmiBlock {
    pub fn dense(size: usize) -> Self {
        LmiBlock {
            kind: BlockKind::Dense,
            size,
            constant: Vec::new(),
            coeffs: Vec::new(),
        }
    }

    pub fn diag(size: usize) -> Self {
        LmiBlock {
            kind: BlockKind::Diag,
            ..Self::dense(size)
        }
    }

    /// Dense value of `C + Σ x_i A_i`.
    pub fn evaluate(&self, x: &[f64]) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.size, self.size);
        add_sym(&mut m, &self.constant, 1.0);
        for (v, e) in &self.coeffs {
            add_sym(&mut m, e, x[*v]);
        }
        m
    }
}

pub(crate) fn add_sym(m: &mut nalgebra::DMatrix<f64>, entries: &[(usize, usize, f64)], scale: f64) {
    if scale == 0.0 {
        return;
    }
    for &(i, j, v) in entries {
        m[(i, j)] += scale * v;
        if i != j {
            m[(j, i)] += scale * v;
        }
    }
}

impl Lmi {
    pub fn objective(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    /// Smallest eigenvalue over all blocks at `x`.
    pub fn min_eigenvalue(&self, x: &[f64]) -> f64 {
        self.blocks
            .iter()
            .filter(|b| b.size > 0)
            .map(|b| b.evaluate(x).symmetric_eigenvalues().min())
            .fold(f64::INFINITY, f64::min)
    }

    /// Appends a variable `t` entering every block as `-t I`, plus the
    /// scalar bound `t <= cap`, and replaces the objective by `min -t`.
    pub(crate) fn with_margin_variable(&self, cap: f64) -> Lmi {
        let t = self.n_vars;
        let mut blocks = self.blocks.clone();
        for b in &mut blocks {
            let ident: SymEntries = (0..b.size).map(|i| (i, i, -1.0)).collect();
            b.coeffs.push((t, ident));
        }
        let mut bound = LmiBlock::diag(1);
        bound.constant.push((0, 0, cap));
        bound.coeffs.push((t, vec![(0, 0, -1.0)]));
        blocks.push(bound);
        let mut c = vec![0.0; self.n_vars + 1];
        c[t] = -1.0;
        Lmi {
            n_vars: self.n_vars + 1,
            c,
            blocks,
        }
    }
}
