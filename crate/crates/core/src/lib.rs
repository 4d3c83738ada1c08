//! Cooperative TU games with boycotts.
//!
//! Games are dense tables over bit-indexed coalitions with exact rational
//! worth. The crate builds the boycott game `v^AB`, computes exact and
//! sampled Shapley values and per-player boycott impact, generates the
//! trade-block and Myerson families, and checks the convexity theorems on
//! concrete instances.

pub mod boycott;
pub mod cli;
pub mod coalition;
pub mod document;
pub mod error;
pub mod game;
pub mod generators;
pub mod harness;
pub mod rational;
pub mod values;

pub use boycott::{boycott, dominates, BoycottSpec, Role};
pub use coalition::{Coalition, PlayerId};
pub use error::GameError;
pub use game::{is_invariant_player, Game, PairWitness, MAX_PLAYERS};
pub use rational::{q, GameValue};
pub use values::{
    check_balanced_impact, check_boycott_respecting, impact, impact_decomposed, shapley_exact, shapley_sampled,
    ImpactVector, SampledValueVector, ValueVector,
};
