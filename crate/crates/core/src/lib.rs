//! Bound quivers of sections for full strong exceptional collections of line
//! bundles on blow-ups of the projective plane, with exact checks of King
//! stability, weight augmentation, the blow-down map on representation
//! schemes, and the exceptional fiber.

pub mod acceptance;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod moduli;
pub mod picard;
pub mod pipeline;
pub mod poly;
pub mod quiver;
pub mod sampling;
pub mod sections;
pub mod solver;
pub mod stability;
pub mod toric_system;

pub use error::{Error, Result};
