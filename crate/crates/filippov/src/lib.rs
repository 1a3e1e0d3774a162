//! Planar piecewise-linear Filippov systems with a straight switching line.

pub mod canonical;
pub mod error;
pub mod flow;
pub mod halfmaps;
pub mod linalg;
pub mod periodic;
pub mod quad;
pub mod report;
pub mod scenarios;
pub mod specfile;
pub mod sweep;
pub mod system;
pub mod transform;
pub mod verify;

pub use error::{FlpError, Result};
