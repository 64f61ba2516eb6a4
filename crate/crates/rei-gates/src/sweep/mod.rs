//! Sweep orchestration, comparison tables, validation suites and plot
//! scripts.
//!
//! A sweep is described by a TOML file:
//!
//! ```toml
//! scheme = "md"
//! output = "md_surface"
//!
//! [[axes]]
//! name = "r"
//! start = 5e-9
//! stop = 30e-9
//! points = 26
//!
//! [[axes]]
//! name = "omega"
//! start = 1e6
//! stop = 20e6
//! points = 20
//! grid = "log"
//!
//! [constants]
//! gamma5 = 4.5e3
//! ```
//!
//! Frequencies and rates are given in Hz and converted to rad/s on load.

mod compare;
mod plot;
mod run;
mod spec;
mod validate;

pub use compare::{run_comparison, write_comparison, Comparison, ComparisonConfig, ComparisonRow, SliceRange};
pub use plot::{emit_plotscript, PlotKind};
pub use run::{evaluate_point, metadata, render_csv, run_sweep, sweep_rows, RunOptions, SweepOutcome, SweepRow, PS_T1P_RANGE};
pub use spec::{
    dipolar_params, exchange_params, interference_params, scattering_params, Axis, Constants, Grid, Param, Scheme,
    SweepSpec, Unit,
};
pub use validate::{
    log_log_slope, order_scaling, ps_gamma_dominated_infidelity, ps_gamma_free_infidelity, run_validation, Check,
    RandomModel, Suite, ValidationReport,
};
