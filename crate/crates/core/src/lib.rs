//! Certified rapid-mixing bounds for Glauber dynamics on spin systems.
//!
//! The crate is organized around the objects a mixing certificate is built
//! from:
//!
//! - [`norms`]: dense nonnegative matrices, their norms, spectral radius,
//!   numerical radius, Perron vectors and perturbations.
//! - [`depmat`]: dependency matrices and the update-operator algebra
//!   (site, random-update, scan and upper-triangle-scaled matrices).
//! - [`density`]: exact maximum density, bounded-indegree orientations, the
//!   `R = B + B^T` decomposition and density bounds for sparse graph classes.
//! - [`mixbounds`]: mixing-time formulas and certificate assembly.
//! - [`glauber`]: heat-bath simulation, maximal couplings, and exact
//!   small-instance verification (total variation, influences, contraction).

pub mod depmat;
pub mod density;
pub mod error;
pub mod glauber;
pub mod mixbounds;
pub mod norms;

pub use error::{Error, Result};
pub use norms::Matrix;
