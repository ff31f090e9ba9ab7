//! Function reconstruction from design samples: divided-difference
//! derivative estimates, subcubewise Taylor models, uniform-error
//! measurement, and maximum estimation.

use serde::{Deserialize, Serialize};

use crate::core::{factorial_of, GridSpec, MultiIndex, Point, SampleTable};
use crate::designs::{stencil_point, Orientation, RecoveryDesign};
use crate::error::{Error, Result};
use crate::search::probe_refine_max;

// ---------------------------------------------------------------------------
// Divided differences
// ---------------------------------------------------------------------------

/// The nested one-sided divided difference `Δ_h^β f(y) / h^{|β|}`,
/// sign-corrected by `Π_j σ_j^{β_j}` so it estimates `D^β f(y)`.
///
/// All stencil points `y + h(σ ⊙ k)` for `k ≤ β` must be present in the
/// sample table; the error names the first absent point.
pub fn estimate_derivative(
    samples: &SampleTable,
    y: &Point,
    beta: &MultiIndex,
    h: f64,
    sigma: &Orientation,
) -> Result<f64> {
    let d = y.dim();
    if beta.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: beta.dim(),
        });
    }
    if sigma.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: sigma.dim(),
        });
    }
    if h.is_nan() || h <= 0.0 {
        return Err(Error::InvalidStep { h, max: f64::INFINITY });
    }

    let mut acc = 0.0;
    let mut k = vec![0u32; d];
    loop {
        // coefficient (-1)^{|β|-|k|} Π binomial(β_j, k_j)
        let mut coeff = 1.0;
        let mut order_gap = 0u32;
        for (&kj, &bj) in k.iter().zip(beta.entries()) {
            coeff *= binom_small(bj, kj);
            order_gap += bj - kj;
        }
        if order_gap % 2 == 1 {
            coeff = -coeff;
        }
        let point = stencil_point(y, &MultiIndex::new(k.clone()), sigma, h)?;
        acc += coeff * samples.require(&point)?;

        // next k ≤ β componentwise
        let mut pos = d;
        loop {
            if pos == 0 {
                let scale = h.powi(beta.order() as i32);
                return Ok(sigma.sign_power(beta) * acc / scale);
            }
            pos -= 1;
            if k[pos] < beta.entry(pos) {
                k[pos] += 1;
                break;
            }
            k[pos] = 0;
        }
    }
}

fn binom_small(n: u32, k: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Table of signed Stirling numbers of the first kind, `s(n, k)` for
/// `n, k ≤ n_max`, defined by `x(x-1)···(x-n+1) = Σ_k s(n,k) x^k`.
fn stirling_table(n_max: u32) -> Vec<Vec<i64>> {
    let n_max = n_max as usize;
    let mut t = vec![vec![0i64; n_max + 1]; n_max + 1];
    t[0][0] = 1;
    for n in 1..=n_max {
        for k in 1..=n {
            t[n][k] = t[n - 1][k - 1] - (n as i64 - 1) * t[n - 1][k];
        }
    }
    t
}

// ---------------------------------------------------------------------------
// Taylor models
// ---------------------------------------------------------------------------

/// Per grid point, coefficient estimates `ĉ_β ≈ D^β f(y)` for `|β| ≤ r−1`.
/// The model evaluates as `Σ_β ĉ_β/β! (x−y)^β` around the nearest grid
/// point; `ĉ_0` is the sampled value `f(y)` exactly.
#[derive(Clone, Debug)]
pub struct TaylorModel {
    design: RecoveryDesign,
    /// Outer index: grid point (lexicographic); inner: offset (graded-lex).
    coefficients: Vec<Vec<f64>>,
}

impl TaylorModel {
    pub fn design(&self) -> &RecoveryDesign {
        &self.design
    }

    pub fn coefficient(&self, grid_idx: usize, beta: &MultiIndex) -> Option<f64> {
        let pos = self.design.offset_position(beta)?;
        Some(self.coefficients[grid_idx][pos])
    }

    /// Evaluates the model at `x`: Taylor sum around the nearest grid point.
    pub fn evaluate(&self, x: &Point) -> f64 {
        self.evaluate_slice(x.coords())
    }

    pub(crate) fn evaluate_slice(&self, x: &[f64]) -> f64 {
        let grid = self.design.grid();
        let mut idx = vec![0u32; grid.d];
        for (j, &c) in x.iter().enumerate() {
            idx[j] = grid.nearest_index(c);
        }
        let flat = grid.flat_index(&idx);
        let coeffs = &self.coefficients[flat];
        let offsets = self.design.offsets();

        let mut acc = 0.0;
        for (pos, beta) in offsets.iter().enumerate() {
            let c = coeffs[pos];
            if c == 0.0 {
                continue;
            }
            let mut term = c / factorial_of(beta);
            for j in 0..grid.d {
                let e = beta.entry(j);
                if e > 0 {
                    let u = x[j] - grid.coord(idx[j]);
                    term *= u.powi(e as i32);
                }
            }
            acc += term;
        }
        acc
    }
}

/// Fits a Taylor model to the design samples.
///
/// Coefficients are the monomial-basis coefficients of the Newton
/// forward-difference interpolant on the stencil's simplex lattice: linear
/// combinations `ĉ_β = β! σ^β h^{−|β|} Σ_{k ≥ β} s(k_j, β_j)/k_j! Δ^k f(y)`
/// of the one-sided divided differences. The model therefore interpolates
/// every stencil sample, reproduces polynomials of total degree `r−1`, and
/// keeps the full order-`r` approximation rate. For `r ≤ 2`, and for the
/// top order `|β| = r−1` in general, this coincides with the raw divided
/// difference of [`estimate_derivative`].
pub fn fit_taylor_models(design: &RecoveryDesign, samples: &SampleTable) -> Result<TaylorModel> {
    let d = design.grid().d;
    let r = design.r();
    let h = design.h();
    let offsets = design.offsets();

    // Stirling/factorial tables up to order r-1.
    let max_e = r - 1;
    let stirling: Vec<Vec<f64>> = stirling_table(max_e)
        .into_iter()
        .map(|row| row.into_iter().map(|v| v as f64).collect())
        .collect();
    let inv_fact: Vec<f64> = {
        let mut v = vec![1.0f64];
        for i in 1..=max_e as usize {
            v.push(v[i - 1] / i as f64);
        }
        v
    };

    let mut coefficients = Vec::with_capacity(design.grid_points().len());
    for (gi, y) in design.grid_points().iter().enumerate() {
        let sigma = design.orientation(gi);

        // sample values on the oriented simplex lattice
        let mut values = Vec::with_capacity(offsets.len());
        for k in offsets {
            let p = stencil_point(y, k, sigma, h)?;
            values.push(samples.require(&p)?);
        }

        // tensor forward differences Δ^k f = Σ_{j ≤ k} (-1)^{|k-j|} C(k,j) f_j
        let mut diffs = vec![0.0f64; offsets.len()];
        for (ki, k) in offsets.iter().enumerate() {
            if k.is_zero() {
                diffs[ki] = values[ki];
                continue;
            }
            let mut acc = 0.0;
            for (ji, j) in offsets.iter().enumerate() {
                if !j.leq(k) {
                    continue;
                }
                let mut coeff = 1.0;
                for axis in 0..d {
                    coeff *= binom_small(k.entry(axis), j.entry(axis));
                }
                if (k.order() - j.order()) % 2 == 1 {
                    coeff = -coeff;
                }
                acc += coeff * values[ji];
            }
            diffs[ki] = acc;
        }

        // monomial coefficients of the Newton form
        let mut coeffs = vec![0.0f64; offsets.len()];
        for (bi, beta) in offsets.iter().enumerate() {
            let mut acc = 0.0;
            for (ki, k) in offsets.iter().enumerate() {
                if !beta.leq(k) {
                    continue;
                }
                let mut weight = 1.0;
                for axis in 0..d {
                    let s = stirling[k.entry(axis) as usize][beta.entry(axis) as usize];
                    if s == 0.0 {
                        weight = 0.0;
                        break;
                    }
                    weight *= s * inv_fact[k.entry(axis) as usize];
                }
                if weight != 0.0 {
                    acc += weight * diffs[ki];
                }
            }
            let scale = factorial_of(beta) * sigma.sign_power(beta) / h.powi(beta.order() as i32);
            coeffs[bi] = if beta.is_zero() { acc } else { scale * acc };
        }
        debug_assert_eq!(coeffs[0], values[0]);
        coefficients.push(coeffs);
    }

    Ok(TaylorModel {
        design: design.clone(),
        coefficients,
    })
}

// ---------------------------------------------------------------------------
// Error measurement
// ---------------------------------------------------------------------------

/// How a sup-error estimate was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchMethod {
    /// The dense probe grid already held the maximum found.
    DenseGrid,
    /// Coordinate-descent refinement improved on the probe grid.
    DenseGridPlusRefine,
}

/// Result of a sup-norm (or maximum) search. `sup_estimate` equals
/// `|f(witness) − model(witness)|` and is a certified lower bound on the
/// true sup error.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErrorReport {
    pub sup_estimate: f64,
    pub witness: Point,
    pub eval_count: u64,
    pub method: SearchMethod,
}

/// Measures `sup_x |oracle(x) − model(x)|` by dense probe on `Q_probe_m^d`
/// plus coordinate-descent refinement. Requires `probe_m ≥ 2m` so the probe
/// grid resolves every cell of the model.
pub fn sup_error<F>(model: &TaylorModel, oracle: F, probe_m: u32) -> Result<ErrorReport>
where
    F: Fn(&[f64]) -> f64,
{
    let grid = model.design().grid();
    if probe_m < 2 * grid.m {
        return Err(Error::InvalidInput(format!(
            "probe_m = {probe_m} must be at least 2m = {}",
            2 * grid.m
        )));
    }
    let out = probe_refine_max(grid.d, probe_m, |x| (oracle(x) - model.evaluate_slice(x)).abs())?;
    Ok(ErrorReport {
        sup_estimate: out.best,
        witness: Point::new(out.argmax)?,
        eval_count: out.evals,
        method: if out.refined {
            SearchMethod::DenseGridPlusRefine
        } else {
            SearchMethod::DenseGrid
        },
    })
}

/// Estimates `max_x model(x)` with the same probe-and-refine search;
/// returns the maximum found and a point attaining it.
pub fn estimate_maximum(model: &TaylorModel, probe_m: u32) -> Result<(f64, Point)> {
    let grid = model.design().grid();
    if probe_m < 2 * grid.m {
        return Err(Error::InvalidInput(format!(
            "probe_m = {probe_m} must be at least 2m = {}",
            2 * grid.m
        )));
    }
    let out = probe_refine_max(grid.d, probe_m, |x| model.evaluate_slice(x))?;
    Ok((out.best, Point::new(out.argmax)?))
}

/// Probe-and-refine maximum of an arbitrary function over the cube; the
/// plain-function counterpart of [`estimate_maximum`].
pub fn estimate_function_maximum<F>(f: F, d: usize, probe_m: u32) -> Result<(f64, Point)>
where
    F: Fn(&[f64]) -> f64,
{
    let out = probe_refine_max(d, probe_m, f)?;
    Ok((out.best, Point::new(out.argmax)?))
}

/// Builds the design with the default step, samples `f` on it, and fits the
/// model. Returns the fitted model together with the sample table.
pub fn fit_from_function<F>(
    grid: &GridSpec,
    r: u32,
    h: Option<f64>,
    provenance: &str,
    f: F,
) -> Result<(TaylorModel, SampleTable)>
where
    F: Fn(&[f64]) -> f64,
{
    let h = h.unwrap_or_else(|| crate::designs::default_step(grid, r));
    let design = crate::designs::build_recovery_design(grid, r, h)?;
    let samples = SampleTable::sample(provenance, design.all_points().iter(), &f)?;
    let model = fit_taylor_models(&design, &samples)?;
    Ok((model, samples))
}
