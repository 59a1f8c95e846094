use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};

use super::{RewriteSystem, Symbol, Word};

/// Scalar type of polynomial coefficients: `f64` for numerics, `Rational64`
/// for exact symbolic checks.
pub trait Coefficient:
    Clone
    + fmt::Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn to_f64(&self) -> f64;
}

impl Coefficient for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Coefficient for Rational64 {
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Formal linear combination of words. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct NcPolynomial<C: Coefficient = f64> {
    terms: BTreeMap<Word, C>,
}

impl<C: Coefficient> Default for NcPolynomial<C> {
    fn default() -> Self {
        NcPolynomial {
            terms: BTreeMap::new(),
        }
    }
}

impl<C: Coefficient> NcPolynomial<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(Word::identity(), C::one())
    }

    pub fn monomial(word: Word, coeff: C) -> Self {
        let mut p = Self::zero();
        p.add_term(word, coeff);
        p
    }

    pub fn word(word: Word) -> Self {
        Self::monomial(word, C::one())
    }

    pub fn symbol(s: Symbol) -> Self {
        Self::word(Word::single(s))
    }

    /// `1 - Σ symbols`, the shape of every sum-to-one generator.
    pub fn one_minus_sum(symbols: impl IntoIterator<Item = Symbol>) -> Self {
        let mut p = Self::one();
        for s in symbols {
            p.add_term(Word::single(s), -C::one());
        }
        p
    }

    pub fn add_term(&mut self, word: Word, coeff: C) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(word);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let c = o.get().clone() + coeff;
                if c.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = c;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn coefficient(&self, w: &Word) -> C {
        self.terms.get(w).cloned().unwrap_or_else(C::zero)
    }

    /// Largest word degree; 0 for constants and for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::degree).max().unwrap_or(0)
    }

    pub fn scale(&self, c: C) -> Self {
        let mut p = Self::zero();
        for (w, a) in &self.terms {
            p.add_term(w.clone(), a.clone() * c.clone());
        }
        p
    }

    /// Involution, extended linearly (coefficients are real).
    pub fn star(&self) -> Self {
        let mut p = Self::zero();
        for (w, a) in &self.terms {
            p.add_term(w.star(), a.clone());
        }
        p
    }

    pub fn left_mul_word(&self, w: &Word) -> Self {
        let mut p = Self::zero();
        for (u, a) in &self.terms {
            p.add_term(w.concat(u), a.clone());
        }
        p
    }

    /// Rewrites every word to normal form and collects terms.
    pub fn reduce(&self, rw: &RewriteSystem) -> Self {
        let mut p = Self::zero();
        for (w, a) in &self.terms {
            if let Some(r) = rw.reduce_word(w) {
                p.add_term(r, a.clone());
            }
        }
        p
    }

    /// `p* = p` after rewriting both sides.
    pub fn is_symmetric(&self, rw: &RewriteSystem) -> bool {
        self.reduce(rw) == self.star().reduce(rw)
    }

    pub fn to_f64(&self) -> NcPolynomial<f64> {
        let mut p = NcPolynomial::<f64>::zero();
        for (w, a) in &self.terms {
            p.add_term(w.clone(), a.to_f64());
        }
        p
    }
}

impl<C: Coefficient> Add for &NcPolynomial<C> {
    type Output = NcPolynomial<C>;
    fn add(self, rhs: Self) -> NcPolynomial<C> {
        let mut p = self.clone();
        for (w, a) in &rhs.terms {
            p.add_term(w.clone(), a.clone());
        }
        p
    }
}

impl<C: Coefficient> Sub for &NcPolynomial<C> {
    type Output = NcPolynomial<C>;
    fn sub(self, rhs: Self) -> NcPolynomial<C> {
        let mut p = self.clone();
        for (w, a) in &rhs.terms {
            p.add_term(w.clone(), -a.clone());
        }
        p
    }
}

impl<C: Coefficient> Mul for &NcPolynomial<C> {
    type Output = NcPolynomial<C>;
    fn mul(self, rhs: Self) -> NcPolynomial<C> {
        let mut p = NcPolynomial::zero();
        for (u, a) in &self.terms {
            for (v, b) in &rhs.terms {
                p.add_term(u.concat(v), a.clone() * b.clone());
            }
        }
        p
    }
}

impl<C: Coefficient> fmt::Display for NcPolynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, a)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({a:?})·{w}")?;
        }
        Ok(())
    }
}
