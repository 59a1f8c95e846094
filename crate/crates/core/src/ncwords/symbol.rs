use std::fmt;

use serde::{Deserialize, Serialize};

/// Symbol family. The declaration order is the primary key of the symbol
/// order: Alice POVM symbols, then Bob POVM symbols, then the state symbol,
/// then graph variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    X,
    Y,
    Z,
    Vert,
}

/// A self-adjoint noncommuting generator.
///
/// Symbols are totally ordered lexicographically by `(family, question,
/// answer)`; the derived `Ord` relies on the field order below.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol {
    pub family: Family,
    pub question: u32,
    pub answer: u32,
}

impl Symbol {
    pub const fn new(family: Family, question: u32, answer: u32) -> Self {
        Symbol {
            family,
            question,
            answer,
        }
    }

    /// Alice's POVM element `x_s^a`.
    pub const fn alice(s: u32, a: u32) -> Self {
        Symbol::new(Family::X, s, a)
    }

    /// Bob's POVM element `y_t^b`.
    pub const fn bob(t: u32, b: u32) -> Self {
        Symbol::new(Family::Y, t, b)
    }

    /// The state symbol `z`.
    pub const fn state() -> Self {
        Symbol::new(Family::Z, 0, 0)
    }

    /// Plain vertex variable `x_i`.
    pub const fn vertex(i: u32) -> Self {
        Symbol::new(Family::Vert, i, 0)
    }

    /// Vertex variable carrying a second label (`x_i^c` in the coloring
    /// hierarchy, `x_c^i` in the stability hierarchy).
    pub const fn labeled(vertex: u32, label: u32) -> Self {
        Symbol::new(Family::Vert, vertex, label)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::X => write!(f, "x{}^{}", self.question, self.answer),
            Family::Y => write!(f, "y{}^{}", self.question, self.answer),
            Family::Z => write!(f, "z"),
            Family::Vert if self.answer == 0 => write!(f, "v{}", self.question),
            Family::Vert => write!(f, "v{}^{}", self.question, self.answer),
        }
    }
}
