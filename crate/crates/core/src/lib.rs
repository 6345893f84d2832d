//! Linear-system games, wagon-wheel embeddings of finitely presented groups,
//! and tools for bounding their quantum values.

pub mod error;
pub mod games;
pub mod gf2;
pub mod group;
pub mod reductions;
pub mod rep;
pub mod sdp;
pub mod wagon;

pub use error::{Error, Result};
