//! Cooperative salvo guidance over a leader-follower network.
//!
//! A leader drives its time-to-go onto `T_d - t` before `t_fl`; followers
//! reach consensus on the leader's time-to-go before `t_f`; everyone then
//! holds `dt_go/dt = -1` and hits a stationary target together at `T_d`.
//! Both settling instants are chosen freely, independent of initial
//! conditions and gains.
//!
//! The crate is `no_std` (needs `alloc`). File formats, the CLI and any IO
//! live in the companion `salvo` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod engagement;
pub mod error;
pub mod guidance;
pub mod math;
pub mod metrics;
pub mod network;
pub mod presets;
pub mod scenario;
pub mod simulator;
pub mod timetogo;

pub use engagement::{Autopilot, EngagementState, InterceptorParams, Role};
pub use error::{Error, Result, TopologyError};
pub use guidance::{Command, GuidanceConfig, PreConsensus};
pub use metrics::RunMetrics;
pub use network::{InteractionMatrix, Matrix, NetworkTopology};
pub use presets::{preset, preset_catalog, preset_names};
pub use scenario::{InterceptorSpec, Scenario, SimSettings, ValidationReport};
pub use simulator::{run, TrajectoryLog};
pub use timetogo::TgoTerms;
