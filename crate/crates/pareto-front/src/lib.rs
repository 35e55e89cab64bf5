//! Command-line front end for Pareto front enumeration: problem files, an
//! oracle that talks to an external process, and the `run` / `verify`
//! commands.

pub mod cli;
pub mod external;
pub mod problem;

pub use external::ExternalProcessOracle;
pub use problem::{InputError, OracleSpec, Problem};
