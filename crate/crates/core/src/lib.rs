//! Exact orbital integrals for unitary and symmetric-space orbits over an unramified
//! quadratic extension of `Q_p`, computed by counting stable lattices.

pub mod cayley;
pub mod error;
pub mod geometry;
pub mod lattices;
pub mod linalg;
pub mod orbital;
pub mod orbits;
pub mod padic;
pub mod weil;

pub use error::{Error, Result};
