//! Stability and performance analysis of SISO incremental (INDI) flight
//! control loops, plus a time-domain simulator that cross-validates the
//! frequency-domain results.
//!
//! The math layer is generic over the floating-point scalar type through
//! [`Scalar`]; concrete `f64` aliases are exported at the crate root.

pub mod blocks;
pub mod config;
pub mod error;
pub mod performance;
pub mod scalar;
pub mod sim;
pub mod stability;
pub mod synthesis;
pub mod tf;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use blocks::{
    block_tfs, command_square, gust_profile, make_roll, make_short_period, ControlLaw,
    GustSpec, LoopBlocks, LoopConfig, NoiseGenerator, PlantKind, PlantModel,
};
pub use performance::{pch_performance_delta, performance_set, PchComparison, PerformanceSet};
pub use stability::{
    compensation_compare, delay_char_poly, delay_stability_grid, delay_stability_grid_with,
    margins, margins_with_points, rationalized_loop_stable, roll_margins_closed_form,
    sync_delay_bound, sync_delay_char_poly, CompensationReport, GridTolerances, MarginReport,
    StabilityGrid, STABILITY_GUARD_BAND,
};
pub use synthesis::{
    closed_loop, equivalent_controller, gamma1, gamma2, open_loop, pch_ratio, pid_reduction,
    LoopSet,
};
pub use sim::{
    robustness_mc, run_metrics, simulate, McResult, MetricsReport, PlantParam, ScenarioBattery,
    ScenarioKind, SimScenario, SimTrace,
};
pub use tf::{
    freq_response, log_space, max_real_part, max_real_part_with_bound, pade2, poly_roots,
    poly_roots_with_bound, routh_stable, FrequencyResponse, Polynomial, Rational, RouthReport,
    TfExpr,
};

/// Concrete `f64` instantiations of the scalar-generic types.
pub type Polynomial64 = Polynomial<f64>;
pub type Rational64 = Rational<f64>;
pub type TfExpr64 = TfExpr<f64>;
pub type FrequencyResponse64 = FrequencyResponse<f64>;
pub type LoopConfig64 = LoopConfig<f64>;
pub type PlantModel64 = PlantModel<f64>;
pub type MarginReport64 = MarginReport<f64>;

/// `f32` instantiations, mostly useful to check scalar-genericity.
pub type Polynomial32 = Polynomial<f32>;
pub type Rational32 = Rational<f32>;
pub type TfExpr32 = TfExpr<f32>;
