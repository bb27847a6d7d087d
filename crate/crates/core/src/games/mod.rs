//! Games with polarity, strategies on them, and their composition.

mod game;
mod hiding;
mod iso;
mod pullback;
mod strategy;

pub use game::{arena, check_game, copycat, dual, is_race_free, par, par_many, race, scott_leq, Sides, Strategy};
pub use hiding::{factorise_partial, hide_events, mediate};
pub use iso::{find_iso, find_strategy_iso};
pub use pullback::{mediating_maps, pseudo_pullback_ef, pullback_edc, stable_part, EdcPullback, EfPullback};
pub use strategy::{
    check_strategy, compose, compose_full, determinism_witness, is_deterministic, is_deterministic_by_covers, Composition,
};
