//! Worst-case uniform recovery of smooth functions on the unit cube.
//!
//! The crate is a small laboratory around one question: how many function
//! values are needed to reconstruct an unknown function on `[0,1]^d`, with
//! all derivatives up to order `r` bounded by one, to uniform accuracy ε?
//! It provides
//!
//! * [`designs`] — regular grids, reflected cloud expansions with their
//!   doubling step schedule, and grid-plus-stencil recovery designs;
//! * [`recover`] — divided-difference Taylor reconstruction, sup-error
//!   measurement, and maximum estimation;
//! * [`envelopes`] — closed-form and recursive theoretical error bounds and
//!   the matching sample-count formulas;
//! * [`adversary`] — smooth bump constructions, largest-empty-ball search,
//!   and fooling-function lower-bound certificates;
//! * [`lab`] — a certified test-function battery, experiment sweeps with
//!   deterministic CSV output, and a verification suite that checks every
//!   invariant of the crate at desk scale.
//!
//! All computation is pure and seeded; reruns produce identical bytes. The
//! `CUBEREC_MAX_POINTS` environment variable caps how many points any
//! single operation may materialize (default `1e8`).
//!
//! # Example
//!
//! Reconstruct a smooth function from grid-plus-stencil samples and compare
//! the measured uniform error with its theoretical envelope:
//!
//! ```
//! use cuberec::core::{ClassKind, GridSpec, SampleTable};
//! use cuberec::envelopes::envelope_closed;
//! use cuberec::{build_recovery_design, default_step, fit_taylor_models, sup_error};
//!
//! let f = |x: &[f64]| 0.25 * (x[0] + x[1]).sin();
//!
//! let grid = GridSpec::new(4, 2)?;
//! let design = build_recovery_design(&grid, 2, default_step(&grid, 2))?;
//! let samples = SampleTable::sample("sinsum", design.all_points().iter(), f)?;
//! let model = fit_taylor_models(&design, &samples)?;
//!
//! let report = sup_error(&model, f, 16)?;
//! assert!(report.sup_estimate < envelope_closed(2, 2, 4, ClassKind::Standard));
//! # Ok::<(), cuberec::Error>(())
//! ```

pub mod adversary;
pub mod core;
pub mod designs;
pub mod envelopes;
pub mod error;
pub mod lab;
pub mod recover;

mod search;

pub use crate::core::{
    enumerate_multiindices, factorial_weight, nearest_grid_point, ClassKind, GridSpec, MultiIndex,
    Point, SampleTable, SmoothnessClass,
};
pub use crate::designs::{
    build_grid, build_proof_pointset, build_recovery_design, default_step, expand_cloud,
    proof_schedule, DesignDocument, Orientation, PointSet, ProofSchedule, RecoveryDesign,
};
pub use crate::error::{Error, Result};
pub use crate::recover::{
    estimate_derivative, estimate_maximum, fit_taylor_models, sup_error, ErrorReport, TaylorModel,
};
