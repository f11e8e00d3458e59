//! Online advance reservation: LP-routed reservation policies, baselines,
//! and a simulation harness for measuring them against the LP bound.
//!
//! ```
//! use reserve_core::{instance::make_prop1_instance, lp::solve_routing_lp};
//!
//! let inst = make_prop1_instance(0.05, 1000.0).unwrap();
//! let lp = solve_routing_lp(&inst).unwrap();
//! assert!((lp.objective() - 0.1).abs() < 1e-9);
//! ```

pub mod constants;
pub mod error;
pub mod harness;
pub mod instance;
pub mod lp;
pub mod policies;
pub mod sim;

pub use constants::{ls_ratio, solve_rls_constants, RlsConstants};
pub use error::{Error, Result};
pub use harness::{run_experiment, ExperimentSpec, InstanceSource, RunReport};
pub use instance::{CustomerType, HospitalConfig, Instance, RateFunction, RateSegment, Resource};
pub use lp::{solve_auto, solve_layered_greedy, solve_routing_lp, FractionalRouting};
pub use policies::{Decision, Policy, PolicySpec, PolicyState};
pub use sim::{sample_path, ArrivalEvent, OfflineOracle, ReplicateResult};
