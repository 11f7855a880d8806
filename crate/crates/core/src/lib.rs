//! Exact calculus of cyclic quotient surface singularities, Hilbert series of
//! orbifold del Pezzo surfaces, and reconstruction of reduced baskets.

pub mod cli;
pub mod error;
pub mod exactalg;
pub mod hilbert;
pub mod quiver;
pub mod reconstruct;
pub mod singularity;

pub use error::{Error, Result};
