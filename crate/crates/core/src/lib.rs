//! Statistics, link analysis and optimizers for RIS-assisted UAV relay links
//! under modified Fisher-Snedecor F composite fading.

pub mod aggregate;
pub mod channel;
pub mod error;
pub mod montecarlo;
pub mod numerics;
pub mod optimize;
pub mod pathloss;
pub mod performance;

pub use error::{Error, Result};
