//! Discrete systems as deterministic I/O automata, their composition
//! operators, nondeterministic role automata coupled through Shannon
//! channels into protocols, and the coordination of roles into
//! quasi-deterministic processes.

pub mod analysis;
pub mod automaton;
pub mod channel;
pub mod cli;
pub mod coordination;
pub mod dsl;
pub mod exec;
pub mod ids;
pub mod partition;
pub mod product;
pub mod projection;
pub mod system;

pub use automaton::{Acceptance, IoVector, Nioa, Port, Transition};
pub use ids::{StateId, Symbol};
