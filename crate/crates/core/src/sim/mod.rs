//! Plants, the fixed-step integrator and the multirate closed-loop runner.

mod plant;
mod reference;
mod rk4;
mod runner;

pub use plant::{vdp_rhs, PlantModel, VanDerPol};
pub use reference::{Reference, SineReference};
pub use rk4::{rk4_step, Rk4};
pub use runner::{run_closed_loop, ClosedLoop, SimConfig, SimRecord, SimRun, DIVERGENCE_LIMIT};
