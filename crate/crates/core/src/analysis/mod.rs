//! Response statistics, fatigue and diagnostic indicators.

pub mod centerline;
pub mod fatigue;
pub mod modal;
pub mod spectra;
pub mod stats;
pub mod umin;
