//! Edge-soliton toolkit: the chiral and derivative NLS family, its closed-form
//! solutions, the maps between them and a pseudo-spectral integrator.

pub mod claims;
pub mod equations;
pub mod error;
pub mod field;
pub mod integrability;
pub mod integrator;
pub mod observables;
pub mod params;
pub mod solutions;
pub mod transforms;

pub use error::{Error, Result};
pub use rustfft::num_complex::Complex64;
