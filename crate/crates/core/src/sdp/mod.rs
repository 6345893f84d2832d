//! Moment relaxation upper bounds for linear-system games and a dense
//! primal-dual interior-point SDP solver.

pub mod moment;
pub mod solver;

pub use moment::{build_moment_program, npa_upper_bound, solve_sdp, solve_sdp_with, Monomial, MomentProgram, NpaBound, ProgramSize, SdpResult};
pub use solver::{Sdp, SdpSolution, SdpStatus, SolverOptions, SparseSym};
