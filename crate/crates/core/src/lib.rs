//! Davies-map Liouvillians for finite quantum systems, permutation dressing
//! of initial states, and detection of relaxation crossovers.

pub mod davies;
pub mod distances;
pub mod error;
pub mod evolution;
pub mod linops;
pub mod models;
pub mod protocol;

pub use error::{Error, Result};
