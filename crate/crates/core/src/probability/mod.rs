//! Configuration-valuations and the constructions on probabilistic
//! strategies.

mod duplication;
mod ops;
mod valuation;

pub use duplication::{deterministic_for_opponent, duplication};
pub use ops::{bottom, compose_valuations, conjunction, is_2cell, named_table, prob_sum, push_forward, transport};
pub use valuation::{conditional, drop, ratio, validate_valuation, ProbStrategy, Valuation};
