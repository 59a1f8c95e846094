use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::index::{add_to, LinearForm, MomentContext};
use crate::ncwords::{Coefficient, NcPolynomial, Symbol, Word};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    /// `terms · L = rhs`
    Eq,
    /// `terms · L >= rhs`
    Ge,
}

/// `Σ coeff · L(word_id) (= | >=) rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub terms: LinearForm,
    pub rhs: f64,
    pub relation: Relation,
}

impl LinearConstraint {
    pub fn eq(terms: LinearForm, rhs: f64) -> Self {
        LinearConstraint {
            terms,
            rhs,
            relation: Relation::Eq,
        }
    }

    pub fn ge(terms: LinearForm, rhs: f64) -> Self {
        LinearConstraint {
            terms,
            rhs,
            relation: Relation::Ge,
        }
    }

    /// `L(var) = value`.
    pub fn fix(var: usize, value: f64) -> Self {
        Self::eq(LinearForm::from([(var, 1.0)]), value)
    }

    /// Signed violation at the moment vector `y` (0 when satisfied).
    pub fn violation(&self, y: &[f64]) -> f64 {
        let lhs: f64 = self.terms.iter().map(|(&v, &c)| c * y[v]).sum();
        match self.relation {
            Relation::Eq => (lhs - self.rhs).abs(),
            Relation::Ge => (self.rhs - lhs).max(0.0),
        }
    }

    /// Scale-normalized key used for deduplication: terms divided by the
    /// coefficient of the lowest variable id, rounded.
    fn key(&self) -> Option<(Vec<(usize, i64)>, i64, bool)> {
        let (_, &lead) = self.terms.iter().next()?;
        let scale = match self.relation {
            Relation::Eq => lead,
            Relation::Ge => lead.abs(),
        };
        let q = |x: f64| (x / scale * 1e9).round() as i64;
        Some((
            self.terms.iter().map(|(&v, &c)| (v, q(c))).collect(),
            q(self.rhs),
            self.relation == Relation::Eq,
        ))
    }
}

/// Duplicate-free list of constraints. Constraints without terms are dropped
/// (a contradictory empty row is kept so the solver can report it).
#[derive(Clone, Debug, Default)]
pub struct ConstraintSet {
    items: Vec<LinearConstraint>,
    seen: HashSet<(Vec<(usize, i64)>, i64, bool)>,
    dropped: usize,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns whether the constraint was new.
    pub fn push(&mut self, c: LinearConstraint) -> bool {
        if c.terms.is_empty() {
            let trivial = match c.relation {
                Relation::Eq => c.rhs == 0.0,
                Relation::Ge => c.rhs <= 0.0,
            };
            if trivial {
                self.dropped += 1;
                return false;
            }
            self.items.push(c);
            return true;
        }
        let key = c.key().expect("nonempty");
        if self.seen.insert(key) {
            self.items.push(c);
            true
        } else {
            self.dropped += 1;
            false
        }
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = LinearConstraint>) {
        for c in cs {
            self.push(c);
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn as_slice(&self) -> &[LinearConstraint] {
        &self.items
    }

    pub fn into_vec(self) -> Vec<LinearConstraint> {
        self.items
    }
}

/// `L(p h) = 0` for every `h` in `ideal` and every reduced word `p` with
/// `deg(p h) <= 2r`, deduplicated. In the tracial and commutative modes
/// left multiples generate the two-sided truncated ideal.
pub fn ideal_constraints<C: Coefficient>(
    ideal: &[NcPolynomial<C>],
    ctx: &mut MomentContext,
) -> Result<ConstraintSet> {
    let two_r = 2 * ctx.level();
    let mut out = ConstraintSet::new();
    for h in ideal {
        let d = h.degree();
        if d > two_r {
            continue;
        }
        let multipliers = ctx.multiplier_words(two_r - d)?;
        for p in &multipliers {
            let form = ctx.linear_form(&h.left_mul_word(p))?;
            out.push(LinearConstraint::eq(form, 0.0));
        }
    }
    Ok(out)
}

/// `L(w z u z v z) = L(w z v z u z)` for reduced words `u, v, w` with total
/// degree `<= 2r`. Pairs whose two sides share a canonical form are skipped.
pub fn state_commutator_constraints(ctx: &mut MomentContext) -> Result<ConstraintSet> {
    let two_r = 2 * ctx.level();
    let mut out = ConstraintSet::new();
    if two_r < 3 {
        return Ok(out);
    }
    let z = Word::single(Symbol::state());
    let free = two_r - 3;
    let words = ctx.row_words(free)?;
    for u in &words {
        for v in &words {
            if u >= v || u.degree() + v.degree() > free {
                continue;
            }
            for w in &words {
                if u.degree() + v.degree() + w.degree() > free {
                    continue;
                }
                let lhs = w.concat(&z).concat(u).concat(&z).concat(v).concat(&z);
                let rhs = w.concat(&z).concat(v).concat(&z).concat(u).concat(&z);
                let a = ctx.variable(&lhs)?;
                let b = ctx.variable(&rhs)?;
                if a == b {
                    continue;
                }
                let mut form = LinearForm::new();
                if let Some(a) = a {
                    add_to(&mut form, a, 1.0);
                }
                if let Some(b) = b {
                    add_to(&mut form, b, -1.0);
                }
                out.push(LinearConstraint::eq(form, 0.0));
            }
        }
    }
    Ok(out)
}
