//! Canonical heights, local heights and equilibrium-measure integrals for
//! polynomial self-maps of projective space over the rationals.

pub mod archplaces;
pub mod divisor;
pub mod dynmodel;
pub mod equilibrium;
pub mod error;
pub mod exact;
pub mod finiteplaces;
pub mod heights;
pub mod mahler;
pub mod point;

pub use dynmodel::{validate_model, MapModel};
pub use error::{Error, Result};
pub use point::ProjectivePoint;
