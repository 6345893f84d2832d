//! Representation-based certification: GF(2) solving, generator separation,
//! representation search and perfect strategies from representations.

pub mod search;
pub mod separation;
pub mod z2;

pub use search::{
    candidates, find_signed_rep, mermin_peres_rep, standard_involutions, strategy_from_rep, RepOutcome, SignedRep,
    DEFAULT_NODE_BUDGET, REP_TOL,
};
pub use separation::{cycle_separation, inner_cycle, is_cycle, separate, shared_cycle, Cycle, SeparationReport};
pub use z2::{solve_z2, Z2Solution};
