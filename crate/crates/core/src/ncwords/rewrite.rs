use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::{Symbol, Word};
use crate::{Error, Result};

/// Monomial rewrite rules of three kinds:
///
/// * zero monomials `a b -> 0`,
/// * idempotents `s s -> s`,
/// * swaps `b a -> a b` (normal ordering of commuting pairs).
///
/// Every rule is degree-nonincreasing, and a swap set whose directed graph is
/// acyclic orders symbols consistently, so rewriting terminates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RewriteSystem {
    zero: BTreeSet<(Symbol, Symbol)>,
    idempotent: BTreeSet<Symbol>,
    swaps: BTreeSet<(Symbol, Symbol)>,
}

impl RewriteSystem {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares `a b = 0` (ordered).
    pub fn with_zero(mut self, a: Symbol, b: Symbol) -> Self {
        self.zero.insert((a, b));
        self
    }

    /// Declares `a b = 0` and `b a = 0`.
    pub fn with_zero_pair(mut self, a: Symbol, b: Symbol) -> Self {
        self.zero.insert((a, b));
        self.zero.insert((b, a));
        self
    }

    pub fn with_idempotent(mut self, s: Symbol) -> Self {
        self.idempotent.insert(s);
        self
    }

    /// Declares that an occurrence of `later earlier` is rewritten to
    /// `earlier later`.
    pub fn with_swap(mut self, later: Symbol, earlier: Symbol) -> Self {
        self.swaps.insert((later, earlier));
        self
    }

    pub fn add_zero_pair(&mut self, a: Symbol, b: Symbol) {
        self.zero.insert((a, b));
        self.zero.insert((b, a));
    }

    pub fn add_idempotent(&mut self, s: Symbol) {
        self.idempotent.insert(s);
    }

    pub fn add_swap(&mut self, later: Symbol, earlier: Symbol) {
        self.swaps.insert((later, earlier));
    }

    pub fn zero_rules(&self) -> impl Iterator<Item = &(Symbol, Symbol)> {
        self.zero.iter()
    }

    pub fn idempotents(&self) -> impl Iterator<Item = &Symbol> {
        self.idempotent.iter()
    }

    pub fn swap_rules(&self) -> impl Iterator<Item = &(Symbol, Symbol)> {
        self.swaps.iter()
    }

    pub fn is_idempotent(&self, s: Symbol) -> bool {
        self.idempotent.contains(&s)
    }

    pub fn is_zero_pair(&self, a: Symbol, b: Symbol) -> bool {
        self.zero.contains(&(a, b))
    }

    /// Whether `a` and `b` commute under some swap rule (either direction).
    pub fn commutes(&self, a: Symbol, b: Symbol) -> bool {
        self.swaps.contains(&(a, b)) || self.swaps.contains(&(b, a))
    }

    pub fn has_swaps(&self) -> bool {
        !self.swaps.is_empty()
    }

    /// Rejects swap sets containing a directed cycle.
    pub fn validate(&self) -> Result<()> {
        let mut out: BTreeMap<Symbol, Vec<Symbol>> = BTreeMap::new();
        for &(later, earlier) in &self.swaps {
            if later == earlier {
                return Err(Error::Config(format!(
                    "swap rule {later}·{later} is not terminating"
                )));
            }
            out.entry(later).or_default().push(earlier);
        }
        fn visit(
            node: Symbol,
            out: &BTreeMap<Symbol, Vec<Symbol>>,
            color: &mut BTreeMap<Symbol, u8>,
        ) -> Result<()> {
            color.insert(node, 1);
            for &m in out.get(&node).map(|v| v.as_slice()).unwrap_or(&[]) {
                match color.get(&m).copied().unwrap_or(0) {
                    0 => visit(m, out, color)?,
                    1 => {
                        return Err(Error::Config(format!(
                            "swap rules contain a cycle through {m}; rewriting would not terminate"
                        )))
                    }
                    _ => {}
                }
            }
            color.insert(node, 2);
            Ok(())
        }
        let mut color: BTreeMap<Symbol, u8> = BTreeMap::new();
        for &start in out.keys() {
            if color.get(&start).copied().unwrap_or(0) == 0 {
                visit(start, &out, &mut color)?;
            }
        }
        Ok(())
    }

    /// Rewrites `word` to normal form; `None` when a zero monomial fires.
    pub fn reduce_word(&self, word: &Word) -> Option<Word> {
        let mut v = word.symbols().to_vec();
        let mut i = 0;
        while i + 1 < v.len() {
            let (a, b) = (v[i], v[i + 1]);
            if self.zero.contains(&(a, b)) {
                return None;
            }
            if a == b && self.idempotent.contains(&a) {
                v.remove(i + 1);
                i = i.saturating_sub(1);
                continue;
            }
            if self.swaps.contains(&(a, b)) {
                v.swap(i, i + 1);
                i = i.saturating_sub(1);
                continue;
            }
            i += 1;
        }
        Some(Word::from_vec(v))
    }

    /// Applies rules in an arbitrary position order chosen by `pick`; used to
    /// test confluence. `pick` receives the number of applicable redexes and
    /// returns the one to rewrite.
    pub fn reduce_word_with(
        &self,
        word: &Word,
        mut pick: impl FnMut(usize) -> usize,
    ) -> Option<Word> {
        let mut v = word.symbols().to_vec();
        loop {
            let redexes: Vec<usize> = (0..v.len().saturating_sub(1))
                .filter(|&i| {
                    let (a, b) = (v[i], v[i + 1]);
                    self.zero.contains(&(a, b))
                        || (a == b && self.idempotent.contains(&a))
                        || self.swaps.contains(&(a, b))
                })
                .collect();
            if redexes.is_empty() {
                return Some(Word::from_vec(v));
            }
            let i = redexes[pick(redexes.len()) % redexes.len()];
            let (a, b) = (v[i], v[i + 1]);
            if self.zero.contains(&(a, b)) {
                return None;
            } else if a == b && self.idempotent.contains(&a) {
                v.remove(i + 1);
            } else {
                v.swap(i, i + 1);
            }
        }
    }

    /// Whether `word` contains no redex.
    pub fn is_reduced(&self, word: &Word) -> bool {
        word.symbols().windows(2).all(|w| {
            let (a, b) = (w[0], w[1]);
            !(self.zero.contains(&(a, b))
                || (a == b && self.idempotent.contains(&a))
                || self.swaps.contains(&(a, b)))
        })
    }

    /// All words reachable from `word` by swapping adjacent commuting pairs
    /// in either direction (the commutation class of a normal form).
    pub(crate) fn commutation_class(&self, word: &Word) -> Vec<Word> {
        if self.swaps.is_empty() || word.degree() < 2 {
            return vec![word.clone()];
        }
        let mut seen: HashSet<Word> = HashSet::new();
        let mut queue = vec![word.clone()];
        seen.insert(word.clone());
        while let Some(w) = queue.pop() {
            let s = w.symbols();
            for i in 0..s.len().saturating_sub(1) {
                if s[i] != s[i + 1] && self.commutes(s[i], s[i + 1]) {
                    let mut v = s.to_vec();
                    v.swap(i, i + 1);
                    let nw = Word::from_vec(v);
                    if seen.insert(nw.clone()) {
                        queue.push(nw);
                    }
                }
            }
        }
        let mut out: Vec<Word> = seen.into_iter().collect();
        out.sort();
        out
    }
}
