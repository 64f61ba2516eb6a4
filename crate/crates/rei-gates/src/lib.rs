//! Fidelity models for two-qubit gates between rare-earth ions.
//!
//! The crate has three layers:
//!
//! * [`operator`] and [`lindblad`]: dense operators, the matrix exponential and
//!   an exact GKSL master-equation solver on piecewise-constant schedules.
//! * [`perturbation`]: first- and second-order infidelity terms computed from
//!   the ideal evolution alone, plus entanglement and average gate fidelity.
//! * Gate models ([`dipolar`], [`cavity`]) and the sweep/report front-end
//!   ([`sweep`]).
//!
//! Units: angular frequencies in rad/s, times in s, distances in m, ħ = 1.

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cavity;
pub mod dipolar;
pub mod error;
pub mod exec;
pub mod haar;
pub mod lindblad;
pub mod operator;
pub mod optim;
pub mod perturbation;
pub mod quadrature;
pub mod report;
pub mod sweep;

pub use error::{Error, Result};
pub use lindblad::{GateSchedule, LindbladTerm, Segment};
pub use operator::{KetState, Operator, C64};
pub use perturbation::{ErrorBreakdown, QuadratureConfig};
pub use report::FidelityReport;

/// Physical constants (SI).
pub mod consts {
    pub const HBAR: f64 = 1.054_571_817e-34;
    pub const MU0: f64 = 1.256_637_062_12e-6;
    pub const MU_B: f64 = 9.274_010_078_3e-24;
    pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
}
