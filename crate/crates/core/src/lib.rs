//! Stationarity-preserving global-flux finite-volume solver on Cartesian grids.

pub mod boundary;
pub mod cases;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod fv;
pub mod gf;
pub mod linalg;
pub mod mesh;
pub mod oracle1d;
pub mod run;
pub mod scheme;
pub mod systems;
pub mod timestep;

pub use error::{Error, Result};
pub use field::{ScalarField, StateField};
pub use mesh::Grid;
