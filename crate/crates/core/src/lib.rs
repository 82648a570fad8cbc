//! Adaptive fuzzy tracking control for nonlinear plants driven through an
//! unknown non-symmetric dead-zone actuator.
//!
//! The dead-zone output is written as `υ = m (u − d(u))`, and the bounded
//! residual `d(u)` is estimated online by a zero-order TSK fuzzy system whose
//! rule outputs adapt from the combined tracking error.

pub mod cli;
pub mod config;
pub mod controller;
pub mod deadzone;
pub mod error;
pub mod fuzzy;
pub mod lyapunov;
pub mod metrics;
pub mod sim;
pub mod timeseries;
pub mod verify;

pub use controller::{AdaptiveController, ControlSample, ControllerGains, ErrorFilter};
pub use deadzone::DeadZoneParams;
pub use error::{Error, Result};
pub use fuzzy::{default_partition, FuzzyPartition, MembershipFunction, RuleOutputs};
pub use sim::{run_closed_loop, SimConfig, SimRecord, SimRun};
