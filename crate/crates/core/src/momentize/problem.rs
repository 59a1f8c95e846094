use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::blocks::SymbolicBlock;
use super::constraints::{ConstraintSet, LinearConstraint};
use super::index::{LinearForm, MomentContext};
use crate::ncwords::Word;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub sense: Sense,
    pub terms: LinearForm,
}

impl Objective {
    pub fn minimize(terms: LinearForm) -> Self {
        Objective {
            sense: Sense::Minimize,
            terms,
        }
    }

    pub fn maximize(terms: LinearForm) -> Self {
        Objective {
            sense: Sense::Maximize,
            terms,
        }
    }

    /// No objective: a pure feasibility system.
    pub fn none() -> Self {
        Self::minimize(LinearForm::new())
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn value(&self, y: &[f64]) -> f64 {
        self.terms.iter().map(|(&v, &c)| c * y[v]).sum()
    }
}

/// One nonzero of a compiled block: `coef * y[var]` at `(row, col)`,
/// upper triangle only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockEntry {
    pub var: usize,
    pub row: usize,
    pub col: usize,
    pub coef: f64,
}

/// A PSD block `Σ_v y_v A_v ⪰ 0` with sparse symmetric coefficient matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompiledBlock {
    pub label: String,
    pub size: usize,
    pub row_words: Vec<Word>,
    pub entries: Vec<BlockEntry>,
}

impl CompiledBlock {
    /// Dense value of the block at the moment vector `y`.
    pub fn evaluate(&self, y: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.size, self.size);
        for e in &self.entries {
            m[(e.row, e.col)] += e.coef * y[e.var];
            if e.row != e.col {
                m[(e.col, e.row)] += e.coef * y[e.var];
            }
        }
        m
    }

    pub fn row_degrees(&self) -> Vec<usize> {
        self.row_words.iter().map(Word::degree).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProblemMetadata {
    pub description: String,
    pub level: usize,
    /// Named counts, e.g. deduplicated constraint batches.
    pub counts: BTreeMap<String, usize>,
}

/// A block-diagonal SDP over moment variables with linear side constraints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpProblem {
    pub n_vars: usize,
    /// Canonical word of each variable (empty for problems not built from
    /// words).
    pub var_words: Vec<Word>,
    pub objective: Objective,
    pub blocks: Vec<CompiledBlock>,
    pub constraints: Vec<LinearConstraint>,
    /// Position of the moment matrix among `blocks`, if any.
    pub moment_block: Option<usize>,
    pub metadata: ProblemMetadata,
}

impl SdpProblem {
    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.size).collect()
    }

    /// Largest constraint violation at `y`.
    pub fn max_constraint_violation(&self, y: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|c| c.violation(y))
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue over all blocks at `y`.
    pub fn min_block_eigenvalue(&self, y: &[f64]) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let m = b.evaluate(y);
                if m.nrows() == 0 {
                    f64::INFINITY
                } else {
                    m.symmetric_eigenvalues().min()
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// A copy with extra constraints appended.
    pub fn with_constraints(&self, extra: impl IntoIterator<Item = LinearConstraint>) -> Self {
        let mut p = self.clone();
        p.constraints.extend(extra);
        p
    }
}

/// Compiles symbolic blocks into sparse coefficient matrices.
///
/// Rows and columns that are identically zero (index words whose products
/// all vanish) are removed. `var_words` may be empty; otherwise its length is
/// the number of variables.
pub fn assemble(
    n_vars: usize,
    var_words: Vec<Word>,
    objective: Objective,
    blocks: &[SymbolicBlock],
    constraints: Vec<LinearConstraint>,
    metadata: ProblemMetadata,
) -> Result<SdpProblem> {
    if blocks.is_empty() {
        return Err(Error::Contract(
            "an SDP needs at least one PSD block".into(),
        ));
    }
    if !var_words.is_empty() && var_words.len() != n_vars {
        return Err(Error::Internal(
            "variable word list does not match variable count".into(),
        ));
    }
    let check = |form: &LinearForm, what: &str| -> Result<()> {
        match form.keys().next_back() {
            Some(&v) if v >= n_vars => Err(Error::Contract(format!(
                "{what} references variable {v} outside the index of {n_vars}"
            ))),
            _ => Ok(()),
        }
    };
    check(&objective.terms, "objective")?;
    for c in &constraints {
        check(&c.terms, "constraint")?;
    }

    let mut moment_block = None;
    let mut compiled = Vec::with_capacity(blocks.len());
    for b in blocks {
        let n = b.size();
        let keep: Vec<usize> = (0..n)
            .filter(|&i| (0..n).any(|j| !b.entry(i, j).is_empty()))
            .collect();
        let mut entries = Vec::new();
        for (ni, &i) in keep.iter().enumerate() {
            for (nj, &j) in keep.iter().enumerate().skip(ni) {
                let form = b.entry(i, j);
                check(form, "block")?;
                for (&var, &coef) in form {
                    entries.push(BlockEntry {
                        var,
                        row: ni,
                        col: nj,
                        coef,
                    });
                }
            }
        }
        if keep.is_empty() {
            continue;
        }
        if b.label == "moment" && moment_block.is_none() {
            moment_block = Some(compiled.len());
        }
        compiled.push(CompiledBlock {
            label: b.label.clone(),
            size: keep.len(),
            row_words: keep.iter().map(|&i| b.rows[i].clone()).collect(),
            entries,
        });
    }
    if compiled.is_empty() {
        return Err(Error::Contract(
            "every PSD block is identically zero".into(),
        ));
    }
    Ok(SdpProblem {
        n_vars,
        var_words,
        objective,
        blocks: compiled,
        constraints,
        moment_block,
        metadata,
    })
}

/// [`assemble`] over the variables of `ctx`, recording block and constraint
/// counts in the metadata.
pub fn assemble_from_context(
    ctx: &MomentContext,
    objective: Objective,
    blocks: &[SymbolicBlock],
    constraints: ConstraintSet,
    description: impl Into<String>,
) -> Result<SdpProblem> {
    let mut metadata = ProblemMetadata {
        description: description.into(),
        level: ctx.level(),
        counts: BTreeMap::new(),
    };
    metadata
        .counts
        .insert("variables".into(), ctx.index().len());
    metadata
        .counts
        .insert("constraints".into(), constraints.len());
    metadata
        .counts
        .insert("duplicate_constraints".into(), constraints.dropped());
    metadata.counts.insert("blocks".into(), blocks.len());
    assemble(
        ctx.index().len(),
        ctx.index().words().to_vec(),
        objective,
        blocks,
        constraints.into_vec(),
        metadata,
    )
}
