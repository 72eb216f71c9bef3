//! Position-dependent-mass (PDM) Lagrangian dynamics.
//!
//! The crate builds PDM systems from a family catalog or user expressions,
//! integrates their Euler–Lagrange equations, maps trajectories onto
//! constant-mass reference oscillators through a nonlocal point
//! transformation, and checks closed-form solutions against residual
//! oracles.
//!
//! ```
//! use pdm_core::prelude::*;
//!
//! let system = build_system(&SystemSpec::new(
//!     Family::Ml1,
//!     ParameterSet {
//!         omega: Some(vec![1.0]),
//!         lambda: Some(1.0),
//!         sign: Some(Sign::Plus),
//!         ..Default::default()
//!     },
//! ))?;
//! let state = State::new(0.0, vec![1.0], vec![0.0]);
//! assert_eq!(system.total_energy(&state)?.total, 0.25);
//! # Ok::<(), PdmError>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eom;
pub mod error;
pub mod exact;
pub mod exprparse;
pub mod integrate;
pub mod par;
pub mod profiles;
pub mod system;
pub mod transform;
pub mod verify;

pub use error::{PdmError, Result};

pub mod prelude {
    pub use crate::eom::{
        acceleration, el1_acceleration, el1_residual, el2_acceleration, reference_acceleration, Derivatives,
        ReferencePotential, ReferenceSystem,
    };
    pub use crate::error::{PdmError, Result};
    pub use crate::exact::{exact_energy, exact_solution, frequency_relation, ExactSolutionSpec, Mode, SolutionForm};
    pub use crate::exprparse::{eval_dual, parse_expression, Expr, Jet};
    pub use crate::integrate::{estimate_period, integrate, interpolate, rk4_step, IntegratorOptions, Scheme, Termination, Trajectory};
    pub use crate::par::Execution;
    pub use crate::profiles::{profile_domain, profile_eval, Interval, MassProfile, Sign};
    pub use crate::system::{
        build_system, kinetic_energy, potential_energy, total_energy, EnergyBreakdown, Family, KindTag, ParameterSet,
        PdmSystem, State, SystemSpec,
    };
    pub use crate::transform::{map_to_reference, MappedTrajectory, NonlocalMap};
    pub use crate::verify::{run_check, run_suite, CheckReport, Expectation};
}
