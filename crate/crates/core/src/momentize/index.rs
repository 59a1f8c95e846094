use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::ncwords::{
    enumerate_basis, enumerate_basis_with, Coefficient, EquivalenceMode, NcPolynomial, Normalizer,
    RewriteSystem, Symbol, Word,
};
use crate::{Error, Result};

/// Sparse linear combination of moment variables: id -> coefficient.
pub type LinearForm = BTreeMap<usize, f64>;

pub(crate) fn add_to(form: &mut LinearForm, var: usize, c: f64) {
    if c == 0.0 {
        return;
    }
    let e = form.entry(var).or_insert(0.0);
    *e += c;
    if *e == 0.0 {
        form.remove(&var);
    }
}

/// Bijection between canonical words of degree `<= 2r` and variable ids.
/// Id 0 is the identity word, i.e. the moment `L(1)`.
#[derive(Clone, Debug)]
pub struct VariableIndex {
    words: Vec<Word>,
    ids: HashMap<Word, usize>,
}

impl VariableIndex {
    pub fn from_words(words: Vec<Word>) -> Result<Self> {
        if words.first().map(Word::is_identity) != Some(true) {
            return Err(Error::Internal(
                "variable index must start with the identity word".into(),
            ));
        }
        let ids = words
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, w)| (w, i))
            .collect();
        Ok(VariableIndex { words, ids })
    }

    pub fn lookup(&self, canonical_word: &Word) -> Option<usize> {
        self.ids.get(canonical_word).copied()
    }

    pub fn word(&self, id: usize) -> &Word {
        &self.words[id]
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Symbols, rewrite rules, equivalence mode and variable index of one
/// relaxation level.
#[derive(Clone, Debug)]
pub struct MomentContext {
    symbols: Vec<Symbol>,
    level: usize,
    normalizer: Normalizer,
    index: VariableIndex,
    row_words: BTreeMap<usize, Vec<Word>>,
    multipliers: BTreeMap<usize, Vec<Word>>,
    excluded_rows: BTreeSet<Symbol>,
    cap: usize,
}

impl MomentContext {
    /// Builds the index of all canonical reduced words of degree `<= 2 *
    /// level`. Fails with a resource error if the basis exceeds `cap`.
    pub fn new(
        symbols: Vec<Symbol>,
        level: usize,
        rw: RewriteSystem,
        mode: EquivalenceMode,
        cap: usize,
    ) -> Result<Self> {
        let mut normalizer = Normalizer::new(rw, mode);
        let words = enumerate_basis_with(&symbols, 2 * level, &mut normalizer, cap)?;
        let index = VariableIndex::from_words(words)?;
        Ok(MomentContext {
            symbols,
            level,
            normalizer,
            index,
            row_words: BTreeMap::new(),
            multipliers: BTreeMap::new(),
            excluded_rows: BTreeSet::new(),
            cap,
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn index(&self) -> &VariableIndex {
        &self.index
    }

    pub fn rewrite_system(&self) -> &RewriteSystem {
        self.normalizer.rewrite_system()
    }

    pub fn mode(&self) -> EquivalenceMode {
        self.normalizer.mode()
    }

    /// Mode used for matrix row indices: plain normal forms, or sorted
    /// monomials in the commutative setting.
    pub fn row_mode(&self) -> EquivalenceMode {
        match self.mode() {
            EquivalenceMode::Commutative => EquivalenceMode::Commutative,
            _ => EquivalenceMode::Plain,
        }
    }

    /// Reduced row words of degree `<= degree`, sorted with the identity
    /// first.
    pub fn row_words(&mut self, degree: usize) -> Result<Vec<Word>> {
        if let Some(w) = self.row_words.get(&degree) {
            return Ok(w.clone());
        }
        let words = enumerate_basis(
            &self.symbols,
            degree,
            self.normalizer.rewrite_system(),
            self.row_mode(),
            self.cap,
        )?;
        self.row_words.insert(degree, words.clone());
        Ok(words)
    }

    /// Reduced words used as ideal multipliers. Only the variable index and
    /// block rows count against the basis cap; multipliers get 64 times as
    /// much room.
    pub fn multiplier_words(&mut self, degree: usize) -> Result<Vec<Word>> {
        if let Some(w) = self.multipliers.get(&degree) {
            return Ok(w.clone());
        }
        let words = enumerate_basis(
            &self.symbols,
            degree,
            self.normalizer.rewrite_system(),
            self.row_mode(),
            self.cap.saturating_mul(64),
        )?;
        self.multipliers.insert(degree, words.clone());
        Ok(words)
    }

    /// Drops block rows indexed by words containing any of `symbols`.
    ///
    /// Sound when each such symbol `s` occurs in an ideal generator
    /// `1 - s - Σ s'` whose other symbols are kept, with disjoint symbol
    /// sets across generators: modulo the ideal, the row of a word through
    /// `s` is then a combination of rows of kept words of no larger degree,
    /// so the PSD condition is unchanged while the forced kernel goes away.
    pub fn exclude_from_rows(&mut self, symbols: impl IntoIterator<Item = Symbol>) {
        self.excluded_rows.extend(symbols);
    }

    /// Row words of PSD blocks: [`Self::row_words`] without excluded symbols.
    pub fn block_rows(&mut self, degree: usize) -> Result<Vec<Word>> {
        let words = self.row_words(degree)?;
        if self.excluded_rows.is_empty() {
            return Ok(words);
        }
        Ok(words
            .into_iter()
            .filter(|w| !w.symbols().iter().any(|s| self.excluded_rows.contains(s)))
            .collect())
    }

    /// Variable id of `L(word)`, `None` if the word vanishes.
    pub fn variable(&mut self, word: &Word) -> Result<Option<usize>> {
        match self.normalizer.normalize(word) {
            None => Ok(None),
            Some(nf) => match self.index.lookup(&nf) {
                Some(id) => Ok(Some(id)),
                None => Err(Error::Internal(format!(
                    "word {nf} (from {word}) is not in the degree-{} variable index",
                    2 * self.level
                ))),
            },
        }
    }

    /// Linear form of `L(p)`.
    pub fn linear_form<C: Coefficient>(&mut self, p: &NcPolynomial<C>) -> Result<LinearForm> {
        let mut form = LinearForm::new();
        for (w, c) in p.terms() {
            if let Some(id) = self.variable(w)? {
                add_to(&mut form, id, c.to_f64());
            }
        }
        Ok(form)
    }

    /// Linear form of `L(u* p v)`.
    pub fn sandwich<C: Coefficient>(
        &mut self,
        u: &Word,
        p: &NcPolynomial<C>,
        v: &Word,
    ) -> Result<LinearForm> {
        let mut form = LinearForm::new();
        let left = u.star();
        for (w, c) in p.terms() {
            let word = left.concat(w).concat(v);
            if let Some(id) = self.variable(&word)? {
                add_to(&mut form, id, c.to_f64());
            }
        }
        Ok(form)
    }
}
