//! Symbolic moment and localizing matrices, truncated-ideal constraints and
//! their assembly into a concrete semidefinite program.
//!
//! A [`MomentContext`] fixes the symbols, rewrite system and equivalence mode
//! and owns the [`VariableIndex`] of canonical words of degree at most `2r`.
//! Blocks and constraints are expressed as [`LinearForm`]s over variable ids,
//! then [`assemble`] compiles them into an [`SdpProblem`].

mod blocks;
mod constraints;
mod index;
mod problem;

pub use blocks::{localizing_block, moment_block, SymbolicBlock};
pub use constraints::{
    ideal_constraints, state_commutator_constraints, ConstraintSet, LinearConstraint, Relation,
};
pub use index::{LinearForm, MomentContext, VariableIndex};
pub use problem::{
    assemble, assemble_from_context, BlockEntry, CompiledBlock, Objective, ProblemMetadata,
    SdpProblem, Sense,
};

#[cfg(test)]
mod tests;
