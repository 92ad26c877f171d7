//! Word-automatic presentations of nilpotent class-2 groups of prime exponent,
//! a first-order decision engine over automatic structures, and a symbolic
//! normal-form oracle used to cross-check every automaton-computed product.

pub mod automata;
pub mod cli;
pub mod cocycle;
pub mod error;
pub mod fo;
pub mod oracle;
pub mod presentations;
pub mod relations;

pub use error::{Error, Result};
