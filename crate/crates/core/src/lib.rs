//! Uplink performance model of mmWave cellular networks with clustered
//! device-to-device (D2D) users: stochastic-geometry analysis by numerical
//! quadrature, and a Monte Carlo simulator of the same model.

pub mod analysis;
pub mod channel;
pub mod cli;
pub mod params;
pub mod quadrature;
pub mod simulator;
pub mod stochgeom;

pub use params::{default_params, load_params, NetworkParams, ParamError, Sharing};
