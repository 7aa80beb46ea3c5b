pub mod channel;
pub mod coverage;
pub mod error;
pub mod geometry;
pub mod interference;
pub mod params;
pub mod quadrature;
pub mod simulator;

pub use error::{Error, Result};
pub use params::SystemParams;
