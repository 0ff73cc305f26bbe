//! Low-order coupled floating wind turbine model.

pub mod linear;
pub mod model;
pub mod simulate;
pub mod mooring;
pub mod turbine;
