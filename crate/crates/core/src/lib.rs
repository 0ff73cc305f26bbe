//! Design-space exploration for three-column semi-submersible floating wind turbines.

pub mod analysis;
pub mod control;
pub mod environment;
pub mod error;
pub mod hull;
pub mod hydro;
pub mod numerics;
pub mod slow;
pub mod sweep;

pub use error::{Error, Result};
