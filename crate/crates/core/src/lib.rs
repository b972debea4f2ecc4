//! Simulation, alternating simulation, fair simulation and fair alternating
//! simulation between labeled (alternating) transition systems.
//!
//! Three routes compute alternating simulation and cross-check each other:
//! the textbook fixpoint ([`relations::altsim_basic`]), a reduction to a
//! reachability game ([`relations::altsim_game`]) and an iterative pruning
//! engine over successor sets ([`relations::altsim_iterative`]). Fair
//! variants reduce to parity games with three priorities.

pub mod arena;
pub mod error;
pub mod exec;
pub mod random;
pub mod reductions;
pub mod relations;
pub mod succ_index;
pub mod sweep;
pub mod systems;

pub use error::{Error, Result};
pub use exec::Exec;
pub use succ_index::SuccIndex;
pub use systems::{
    parse_system, ts_to_ats, write_system, Ats, FairAts, FairTs, SimRelation, System, Ts,
};
