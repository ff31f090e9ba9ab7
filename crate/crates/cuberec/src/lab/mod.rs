//! CLI-level orchestration: the test-function battery, experiment sweeps,
//! the invariant verification suite, and CSV/JSON reporting.

pub mod battery;
pub mod verify;

use serde::{Deserialize, Serialize};

use crate::adversary::{certify_lower_bound, estimate_k_default};
use crate::core::{ClassKind, GridSpec, SampleTable, SmoothnessClass};
use crate::designs::{build_recovery_design, default_step, expand_cloud, PointSet};
use crate::envelopes::{envelope_closed, envelope_recursive, envelope_recursive_directional};
use crate::error::{Error, Result};
use crate::recover::{fit_taylor_models, sup_error};

use battery::{battery_by_id, BatteryId};

/// A scalar field with an analytic gradient; what the mean-value checks
/// need from a test function.
pub trait DifferentiableField {
    fn dims(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
}

impl DifferentiableField for battery::BatteryFunction {
    fn dims(&self) -> usize {
        battery::BatteryFunction::dims(self)
    }

    fn value(&self, x: &[f64]) -> f64 {
        battery::BatteryFunction::value(self, x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        battery::BatteryFunction::gradient(self, x)
    }
}

// ---------------------------------------------------------------------------
// Mean-value fact
// ---------------------------------------------------------------------------

/// Checks the mean-value implication on a concrete instance: given that
/// `|f| ≤ h²` on the expanded cloud `M[h]` (the hypothesis, verified
/// first), every point of `M` must satisfy `|∂f/∂x_j| ≤ 3h`.
///
/// A hypothesis violation is reported as an error, distinct from the
/// conclusion failing (`Ok(false)`).
pub fn verify_mean_value_fact(
    f: &dyn DifferentiableField,
    m_set: &PointSet,
    h: f64,
    axis: usize,
) -> Result<bool> {
    if axis >= m_set.dim() {
        return Err(Error::InvalidInput(format!(
            "axis {axis} out of range for dimension {}",
            m_set.dim()
        )));
    }
    if f.dims() != m_set.dim() {
        return Err(Error::DimensionMismatch {
            expected: m_set.dim(),
            found: f.dims(),
        });
    }
    let cloud = expand_cloud(m_set, h)?;
    let budget = h * h;
    for q in cloud.iter() {
        let v = f.value(q.coords());
        if v.abs() > budget {
            return Err(Error::HypothesisViolated {
                point: q.coords().to_vec(),
                value: v,
                bound: budget,
            });
        }
    }
    let cap = 3.0 * h;
    for x in m_set.iter() {
        if f.gradient(x.coords())[axis].abs() > cap {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// Configuration of an experiment sweep over `(d, r, m)` tuples and the
/// whole battery.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepConfig {
    pub d_list: Vec<usize>,
    pub r_list: Vec<u32>,
    pub m_list: Vec<u32>,
    pub kind: ClassKind,
    pub probe_m: u32,
    pub seed: u64,
    #[serde(default)]
    pub output_path: Option<String>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d_list.is_empty() || self.r_list.is_empty() || self.m_list.is_empty() {
            return Err(Error::InvalidInput(
                "sweep lists d_list, r_list, m_list must be nonempty".into(),
            ));
        }
        if self.d_list.iter().any(|&d| d < 1) || self.m_list.iter().any(|&m| m < 1) {
            return Err(Error::InvalidInput("d and m entries must be >= 1".into()));
        }
        if self.r_list.iter().any(|&r| r < 1) {
            return Err(Error::InvalidInput("r entries must be >= 1".into()));
        }
        if self.probe_m < 1 {
            return Err(Error::InvalidInput("probe_m must be >= 1".into()));
        }
        Ok(())
    }
}

/// One CSV row of a sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRow {
    pub d: usize,
    pub r: u32,
    pub m: u32,
    pub kind: ClassKind,
    pub function: String,
    pub n_points: usize,
    pub h: f64,
    pub sup_estimate: f64,
    pub envelope_closed: f64,
    pub envelope_recursive: f64,
    pub lower_cert: f64,
    pub k_hat: f64,
    pub seed: u64,
}

pub const SWEEP_CSV_HEADER: &str =
    "d,r,m,kind,function,n_points,h,sup_estimate,envelope_closed,envelope_recursive,lower_cert,K_hat,seed";

impl SweepRow {
    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.d,
            self.r,
            self.m,
            self.kind,
            self.function,
            self.n_points,
            self.h,
            self.sup_estimate,
            self.envelope_closed,
            self.envelope_recursive,
            self.lower_cert,
            self.k_hat,
            self.seed
        )
    }
}

/// Result of a sweep: parsed rows plus the rendered CSV artifact.
#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub csv: String,
}

/// Runs the sweep: for every `(d, r, m)` tuple builds the default-step
/// design, fits every battery function, measures its sup error, computes
/// both envelopes, and certifies the adversary lower bound for the design's
/// point set. Rows are emitted in `(d, r, m, function)` order and the CSV
/// is byte-stable for a fixed config.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    config.validate()?;

    // one K estimate per distinct r
    let mut k_by_r: Vec<(u32, f64)> = Vec::new();
    for &r in &config.r_list {
        if !k_by_r.iter().any(|&(rr, _)| rr == r) {
            k_by_r.push((r, estimate_k_default(r, config.seed)?));
        }
    }
    let k_of = |r: u32| k_by_r.iter().find(|&&(rr, _)| rr == r).map(|&(_, k)| k);

    let mut rows = Vec::new();
    for &d in &config.d_list {
        for &r in &config.r_list {
            for &m in &config.m_list {
                let tuple_err = |e: Error| Error::SweepTuple {
                    d,
                    r,
                    m,
                    source: Box::new(e),
                };
                let grid = GridSpec::new(m, d).map_err(tuple_err)?;
                let h = default_step(&grid, r);
                let design = build_recovery_design(&grid, r, h).map_err(tuple_err)?;
                let probe = config.probe_m.max(2 * m);

                let k_hat = k_of(r).expect("K estimate prepared for every r");
                let cls = SmoothnessClass::new(r, d, config.kind).map_err(tuple_err)?;
                let cert =
                    certify_lower_bound(design.all_points(), &cls, k_hat, probe, config.seed)
                        .map_err(tuple_err)?;

                let closed = envelope_closed(d, r, m, config.kind);
                let recursive = match config.kind {
                    ClassKind::Standard => envelope_recursive(d, r, m),
                    ClassKind::Directional => envelope_recursive_directional(d, r, m),
                };

                for id in BatteryId::ALL {
                    let f = battery_by_id(id, r, d).map_err(tuple_err)?;
                    let samples =
                        SampleTable::sample(id.as_str(), design.all_points().iter(), |x| {
                            f.value(x)
                        })
                        .map_err(tuple_err)?;
                    let model = fit_taylor_models(&design, &samples).map_err(tuple_err)?;
                    let report = sup_error(&model, |x| f.value(x), probe).map_err(tuple_err)?;

                    rows.push(SweepRow {
                        d,
                        r,
                        m,
                        kind: config.kind,
                        function: id.as_str().to_string(),
                        n_points: design.n_points(),
                        h,
                        sup_estimate: report.sup_estimate,
                        envelope_closed: closed,
                        envelope_recursive: recursive,
                        lower_cert: cert.bound,
                        k_hat,
                        seed: config.seed,
                    });
                }
            }
        }
    }

    let mut csv = String::from(SWEEP_CSV_HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.csv_line());
        csv.push('\n');
    }

    if let Some(path) = &config.output_path {
        std::fs::write(path, &csv)?;
    }

    Ok(SweepOutcome { rows, csv })
}
