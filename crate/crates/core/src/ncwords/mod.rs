//! Noncommutative words, involution, canonical forms and monomial rewriting.

mod poly;
mod rewrite;
mod symbol;
mod word;

use std::collections::{BTreeSet, HashMap, HashSet};

pub use poly::{Coefficient, NcPolynomial};
pub use rewrite::RewriteSystem;
pub use symbol::{Family, Symbol};
pub use word::Word;

use crate::{Error, Result};

/// Which words a linear functional is assumed not to distinguish.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum EquivalenceMode {
    /// Every word is its own class.
    Plain,
    /// `w ~ w*`.
    Symmetric,
    /// `w` is identified with all cyclic shifts of `w` and of `w*`.
    TracialSymmetric,
    /// Symbols commute; words are multisets. Used for the classical
    /// Lasserre bounds.
    Commutative,
}

/// Minimum (degree, then lex) element of the class of `word` under `mode`.
pub fn canonical(word: &Word, mode: EquivalenceMode) -> Word {
    match mode {
        EquivalenceMode::Plain => word.clone(),
        EquivalenceMode::Symmetric => {
            let s = word.star();
            if s < *word {
                s
            } else {
                word.clone()
            }
        }
        EquivalenceMode::TracialSymmetric => {
            let n = word.degree();
            if n < 2 {
                return word.clone();
            }
            let rev = word.star();
            let mut best = word.clone();
            for k in 0..n {
                for base in [word, &rev] {
                    let c = base.rotate(k);
                    if c < best {
                        best = c;
                    }
                }
            }
            best
        }
        EquivalenceMode::Commutative => {
            let mut v = word.clone().into_vec();
            v.sort();
            Word::from_vec(v)
        }
    }
}

/// Rewrites `word` with `rw`. The result is the zero polynomial when a zero
/// monomial fires and a single normal-form word otherwise.
pub fn reduce(word: &Word, rw: &RewriteSystem) -> NcPolynomial<f64> {
    match rw.reduce_word(word) {
        Some(w) => NcPolynomial::word(w),
        None => NcPolynomial::zero(),
    }
}

fn mode_moves(word: &Word, mode: EquivalenceMode) -> Vec<Word> {
    match mode {
        EquivalenceMode::Plain => vec![],
        EquivalenceMode::Symmetric => vec![word.star()],
        EquivalenceMode::TracialSymmetric => {
            let n = word.degree();
            let rev = word.star();
            let mut out = Vec::with_capacity(2 * n);
            for k in 0..n.max(1) {
                out.push(word.rotate(k));
                out.push(rev.rotate(k));
            }
            out
        }
        EquivalenceMode::Commutative => vec![canonical(word, mode)],
    }
}

fn commutative_normal_form(word: &Word, rw: &RewriteSystem) -> Option<Word> {
    let mut v = word.symbols().to_vec();
    v.sort();
    let mut out: Vec<crate::ncwords::Symbol> = Vec::with_capacity(v.len());
    for s in v {
        if out.last() == Some(&s) && rw.is_idempotent(s) {
            continue;
        }
        out.push(s);
    }
    for i in 0..out.len() {
        for j in 0..out.len() {
            if i != j && rw.is_zero_pair(out[i], out[j]) {
                return None;
            }
        }
    }
    Some(Word::from_vec(out))
}

/// Canonical representative of `word` modulo both the rewrite system and the
/// equivalence mode, or `None` if the class contains a word that rewrites to
/// zero.
///
/// For the non-commutative modes this explores the full class: every member
/// of the commutation class of each normal form is moved by the mode (shifts,
/// reversal) and rewritten again, until closure. The minimum reached is
/// returned.
pub fn normal_form(word: &Word, rw: &RewriteSystem, mode: EquivalenceMode) -> Option<Word> {
    closure(word, rw, mode).0
}

/// [`normal_form`] together with the reduced class members visited on the
/// way, all of which share it.
fn closure(word: &Word, rw: &RewriteSystem, mode: EquivalenceMode) -> (Option<Word>, Vec<Word>) {
    if mode == EquivalenceMode::Commutative {
        return (commutative_normal_form(word, rw), Vec::new());
    }
    let Some(start) = rw.reduce_word(word) else {
        return (None, Vec::new());
    };
    if mode == EquivalenceMode::Plain {
        return (Some(start), Vec::new());
    }
    let mut seen: HashSet<Word> = HashSet::new();
    let mut queue = vec![start.clone()];
    seen.insert(start.clone());
    let mut best = start;
    while let Some(w) = queue.pop() {
        for member in rw.commutation_class(&w) {
            for moved in mode_moves(&member, mode) {
                let Some(r) = rw.reduce_word(&moved) else {
                    return (None, seen.into_iter().collect());
                };
                if seen.insert(r.clone()) {
                    if r < best {
                        best = r.clone();
                    }
                    queue.push(r);
                }
            }
        }
    }
    (Some(best), seen.into_iter().collect())
}

/// Memoizing wrapper around [`normal_form`] for one rewrite system and mode.
#[derive(Debug, Clone)]
pub struct Normalizer {
    rw: RewriteSystem,
    mode: EquivalenceMode,
    cache: HashMap<Word, Option<Word>>,
}

impl Normalizer {
    pub fn new(rw: RewriteSystem, mode: EquivalenceMode) -> Self {
        Normalizer {
            rw,
            mode,
            cache: HashMap::new(),
        }
    }

    pub fn rewrite_system(&self) -> &RewriteSystem {
        &self.rw
    }

    pub fn mode(&self) -> EquivalenceMode {
        self.mode
    }

    pub fn normalize(&mut self, word: &Word) -> Option<Word> {
        if let Some(hit) = self.cache.get(word) {
            return hit.clone();
        }
        if matches!(
            self.mode,
            EquivalenceMode::Symmetric | EquivalenceMode::TracialSymmetric
        ) {
            let Some(r) = self.rw.reduce_word(word) else {
                self.cache.insert(word.clone(), None);
                return None;
            };
            if let Some(hit) = self.cache.get(&r).cloned() {
                self.cache.insert(word.clone(), hit.clone());
                return hit;
            }
        }
        let (nf, members) = closure(word, &self.rw, self.mode);
        for m in members {
            self.cache.insert(m, nf.clone());
        }
        self.cache.insert(word.clone(), nf.clone());
        nf
    }
}

/// All reduced, canonical, pairwise-distinct words of degree at most
/// `max_degree` over `symbols`, sorted; the identity comes first.
///
/// Normal forms are closed under prefixes, so the enumeration extends the
/// reduced words of each degree by one symbol at a time.
pub fn enumerate_basis(
    symbols: &[Symbol],
    max_degree: usize,
    rw: &RewriteSystem,
    mode: EquivalenceMode,
    cap: usize,
) -> Result<Vec<Word>> {
    enumerate_basis_with(
        symbols,
        max_degree,
        &mut Normalizer::new(rw.clone(), mode),
        cap,
    )
}

/// [`enumerate_basis`] through an existing normalizer, whose cache then
/// covers every enumerated word.
pub fn enumerate_basis_with(
    symbols: &[Symbol],
    max_degree: usize,
    normalizer: &mut Normalizer,
    cap: usize,
) -> Result<Vec<Word>> {
    let rw = normalizer.rw.clone();
    let rw = &rw;
    let mode = normalizer.mode;
    rw.validate()?;
    let mut syms: Vec<Symbol> = symbols.to_vec();
    syms.sort();
    syms.dedup();

    let over_cap = |needed: usize| Error::Resource {
        what: format!("word basis of degree {max_degree}"),
        needed,
        cap,
    };

    let mut out: BTreeSet<Word> = BTreeSet::new();
    out.insert(Word::identity());
    let mut frontier = vec![Word::identity()];
    let mut raw_count = 1usize;
    for _ in 0..max_degree {
        let mut next = Vec::new();
        for w in &frontier {
            for &s in &syms {
                let mut ext = w.clone();
                ext.push(s);
                if !rw.is_reduced(&ext) {
                    continue;
                }
                if mode == EquivalenceMode::Commutative {
                    // prefix-closed sorted words without zero pairs
                    if w.symbols().last().is_some_and(|&l| l > s) {
                        continue;
                    }
                    if commutative_normal_form(&ext, rw).as_ref() != Some(&ext) {
                        continue;
                    }
                }
                next.push(ext);
            }
        }
        raw_count += next.len();
        if raw_count > cap.saturating_mul(64).max(cap) {
            return Err(over_cap(raw_count));
        }
        for w in &next {
            if let Some(c) = normalizer.normalize(w) {
                out.insert(c);
            }
        }
        if out.len() > cap {
            return Err(over_cap(out.len()));
        }
        frontier = next;
    }
    Ok(out.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> Symbol {
        Symbol::vertex(i)
    }

    fn w(ids: &[u32]) -> Word {
        Word::from_symbols(ids.iter().map(|&i| v(i)))
    }

    fn cycle_rules(n: u32) -> RewriteSystem {
        let mut rw = RewriteSystem::new();
        for i in 0..n {
            rw.add_idempotent(v(i));
            rw.add_zero_pair(v(i), v((i + 1) % n));
        }
        rw
    }

    #[test]
    fn canonical_examples() {
        for mode in [
            EquivalenceMode::Plain,
            EquivalenceMode::Symmetric,
            EquivalenceMode::TracialSymmetric,
        ] {
            assert_eq!(canonical(&Word::identity(), mode), Word::identity());
        }
        assert_eq!(
            canonical(&w(&[1, 0]), EquivalenceMode::TracialSymmetric),
            w(&[0, 1])
        );
        assert_eq!(
            canonical(&w(&[0, 1, 2]), EquivalenceMode::Symmetric),
            w(&[0, 1, 2])
        );
        assert_eq!(
            canonical(&w(&[2, 1, 0]), EquivalenceMode::Symmetric),
            w(&[0, 1, 2])
        );
    }

    #[test]
    fn reduce_examples() {
        let rw = RewriteSystem::new().with_zero_pair(v(0), v(1));
        assert!(reduce(&w(&[0, 1]), &rw).is_zero());

        let rw = RewriteSystem::new().with_idempotent(v(0));
        assert_eq!(reduce(&w(&[0, 0, 2]), &rw), NcPolynomial::word(w(&[0, 2])));

        let (x, y, z) = (Symbol::alice(0, 1), Symbol::bob(1, 0), Symbol::state());
        let rw = RewriteSystem::new().with_swap(y, x);
        assert_eq!(
            reduce(&Word::from_symbols([y, x, z]), &rw),
            NcPolynomial::word(Word::from_symbols([x, y, z]))
        );
    }

    #[test]
    fn basis_examples() {
        let rw = RewriteSystem::new().with_idempotent(v(1));
        let b = enumerate_basis(&[v(1)], 2, &rw, EquivalenceMode::Plain, 100).unwrap();
        assert_eq!(b, vec![Word::identity(), w(&[1])]);

        let rw = cycle_rules(5);
        let syms: Vec<Symbol> = (0..5).map(v).collect();
        let b1 = enumerate_basis(&syms, 1, &rw, EquivalenceMode::Plain, 100).unwrap();
        assert_eq!(b1.len(), 6);
        assert_eq!(b1[0], Word::identity());

        let b2 = enumerate_basis(&syms, 2, &rw, EquivalenceMode::TracialSymmetric, 100).unwrap();
        assert_eq!(b2.len(), 11);
        let pairs: Vec<Word> = b2.iter().filter(|w| w.degree() == 2).cloned().collect();
        assert_eq!(
            pairs,
            vec![w(&[0, 2]), w(&[0, 3]), w(&[1, 3]), w(&[1, 4]), w(&[2, 4])]
        );
    }

    #[test]
    fn basis_cap_is_enforced() {
        let syms: Vec<Symbol> = (0..4).map(v).collect();
        let err = enumerate_basis(&syms, 3, &RewriteSystem::new(), EquivalenceMode::Plain, 10);
        assert!(matches!(err, Err(Error::Resource { cap: 10, .. })));
    }

    #[test]
    fn tracial_normal_form_sees_wraparound_zero() {
        // x0 x2 x1 contains no edge pattern, but its cyclic shift x1 x0 x2 does.
        let rw = cycle_rules(5);
        assert_eq!(
            normal_form(&w(&[0, 2, 1]), &rw, EquivalenceMode::TracialSymmetric),
            None
        );
        // x0 x2 x0 -> x0 x0 x2 -> x0 x2
        assert_eq!(
            normal_form(&w(&[0, 2, 0]), &rw, EquivalenceMode::TracialSymmetric),
            Some(w(&[0, 2]))
        );
    }

    #[test]
    fn commutative_normal_form_sorts_and_kills() {
        let rw = cycle_rules(5);
        assert_eq!(
            normal_form(&w(&[3, 0, 3]), &rw, EquivalenceMode::Commutative),
            Some(w(&[0, 3]))
        );
        assert_eq!(
            normal_form(&w(&[0, 2, 1]), &rw, EquivalenceMode::Commutative),
            None
        );
        let b = enumerate_basis(
            &(0..5).map(v).collect::<Vec<_>>(),
            3,
            &rw,
            EquivalenceMode::Commutative,
            100,
        )
        .unwrap();
        // stable sets of C5 of size <= 3: 1 + 5 + 5
        assert_eq!(b.len(), 11);
    }
}
