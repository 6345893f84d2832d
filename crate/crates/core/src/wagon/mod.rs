//! Wagon-wheel compilation of doubled presentations into weight-3 linear
//! systems over GF(2), solution groups, and certificate transport.

pub mod solution_group;
pub mod system;
pub mod transport;
pub mod wheel;

pub use solution_group::solution_group;
pub use system::{inconsistent_pair, magic_square, LinearSystemZ2};
pub use transport::{compile_presentation, CompiledPresentation, TransportReport};
pub use wheel::{assemble_system, compile_relation, CompiledSystem, Gadget, Subsystem, WagonWheelLayout};
