//! Flow-pattern discovery from overhead occupancy maps.

pub mod baselines;
pub mod cli;
pub mod error;
pub mod grid;
pub mod io;
pub mod kmeans;
pub mod self_expressive;
pub mod sim;
pub mod subspace;

mod convex_l1;

pub use error::{Error, Result};
