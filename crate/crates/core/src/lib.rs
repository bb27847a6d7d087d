//! Event structures with disjunctive causes, concurrent games and
//! probabilistic strategies over finite structures.

pub mod budget;
pub mod error;
pub mod eventset;
pub mod fixtures;
pub mod games;
pub mod io;
pub mod probability;
pub mod realisations;
pub mod structures;

pub use budget::Budget;
pub use error::{Error, Result};
pub use eventset::EventSet;
pub use structures::{Consistency, Family, Kind, Polarity, StructMap, Structure, ValidationReport};
