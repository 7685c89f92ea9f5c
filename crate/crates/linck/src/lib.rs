//! linck: a compiler and interpreter for a small functional language with
//! linear types and linear constraints.
//!
//! Programs are typechecked by generating and solving linear wanted
//! constraints, elaborated into an evidence-passing linear core calculus,
//! re-verified by a core linter, and evaluated against capability-indexed
//! mutable-array primitives.

pub mod constraint;
pub mod oracle;
pub mod solver;
pub mod span;
pub mod wanted;

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod prelude;
pub mod pretty;
pub mod corecalc;
pub mod eval;
pub mod generate;
pub mod typing;
