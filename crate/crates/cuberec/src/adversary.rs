//! Lower-bound certificates: smooth compactly supported radial bumps,
//! directional-norm constant estimation, largest-empty-ball search, and
//! fooling functions vanishing on a given design.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::core::{dist_sq, ClassKind, Point, SmoothnessClass};
use crate::designs::PointSet;
use crate::error::{Error, Result};
use crate::search::probe_refine_max;

/// Safety inflation applied to sampled derivative suprema.
pub const K_SAFETY_FACTOR: f64 = 1.05;

/// Feasibility is accepted when sampled directional derivatives stay below
/// `1 + FEASIBILITY_TOL`.
pub const FEASIBILITY_TOL: f64 = 1e-3;

/// Number of sampled directional-derivative tuples in a feasibility check.
pub const FEASIBILITY_SAMPLES: usize = 10_000;

// ---------------------------------------------------------------------------
// Bump profile
// ---------------------------------------------------------------------------

/// The smooth transition profile `h`: equals one on `(−∞, 0]`, zero on
/// `[1, ∞)`, and `ψ(1−t)/(ψ(1−t)+ψ(t))` with `ψ(s) = exp(−1/s)` in
/// between. Symmetric about `t = 1/2`, where it equals `1/2` exactly.
pub fn bump_profile(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if t >= 1.0 {
        return 0.0;
    }
    let a = (-1.0 / (1.0 - t)).exp();
    let b = (-1.0 / t).exp();
    a / (a + b)
}

/// Analytic derivative of [`bump_profile`]; zero outside `(0, 1)`.
pub fn bump_profile_deriv(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let a = (-1.0 / (1.0 - t)).exp();
    let b = (-1.0 / t).exp();
    let da = -a / ((1.0 - t) * (1.0 - t));
    let db = b / (t * t);
    (da * b - a * db) / ((a + b) * (a + b))
}

/// The radial bump `g_d(x) = h(‖x‖_2^2)`: one at the origin, supported in
/// the closed unit ball, smooth everywhere.
pub fn radial_bump(x: &[f64]) -> f64 {
    bump_profile(x.iter().map(|c| c * c).sum())
}

// ---------------------------------------------------------------------------
// Direction sampling
// ---------------------------------------------------------------------------

/// A seeded batch of unit vectors on the euclidean sphere `S_{d−1}`.
#[derive(Clone, Debug)]
pub struct DirectionSample {
    d: usize,
    seed: u64,
    directions: Vec<Vec<f64>>,
}

impl DirectionSample {
    /// Draws `count` directions with a deterministic generator.
    pub fn generate(d: usize, count: usize, seed: u64) -> Result<Self> {
        if d < 1 {
            return Err(Error::InvalidInput("dimension d must be >= 1".into()));
        }
        if count < 1 {
            return Err(Error::InvalidInput("direction count must be >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut directions = Vec::with_capacity(count);
        while directions.len() < count {
            let v = random_unit_vector(&mut rng, d);
            directions.push(v);
        }
        Ok(Self { d, seed, directions })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }
}

fn random_unit_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Central finite-difference estimate of the iterated directional
/// derivative `∂_{θ_1}···∂_{θ_ℓ} f(x)` with step `s` along each direction.
pub fn directional_fd<F>(f: F, x: &[f64], dirs: &[Vec<f64>], step: f64) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let l = dirs.len();
    if l == 0 {
        return f(x);
    }
    let mut total = 0.0;
    let mut point = vec![0.0f64; x.len()];
    for bits in 0..(1u32 << l) {
        point.copy_from_slice(x);
        let mut sign = 1.0;
        for (i, dir) in dirs.iter().enumerate() {
            let s = if bits >> i & 1 == 1 { 1.0 } else { -1.0 };
            sign *= s;
            for (pj, dj) in point.iter_mut().zip(dir.iter()) {
                *pj += step * s * dj;
            }
        }
        total += sign * f(&point);
    }
    total / (2.0 * step).powi(l as i32)
}

// ---------------------------------------------------------------------------
// Norm-constant estimation
// ---------------------------------------------------------------------------

/// Estimates `K_r`, the supremum over dimensions of the directional-norm
/// `sup_{ℓ ≤ r} ‖∂_{θ_1}···∂_{θ_ℓ} g_d‖_∞` of the radial bump.
///
/// For every order `ℓ ≤ r` the search combines the radially aligned tuple
/// (where the supremum is attained in practice) with the sampled tuples,
/// scans a dense radial point set `x = ρ e_1`, locally refines over `ρ`,
/// and inflates the maximum by [`K_SAFETY_FACTOR`]. The `ℓ = 0` term makes
/// the result at least one; for `r = 0` it is exactly one and no inflation
/// is applied.
pub fn estimate_k(r: u32, d_probe: usize, sample: &DirectionSample, fd_step: f64) -> Result<f64> {
    if fd_step >= 1e-2 || fd_step <= 1e-8 {
        return Err(Error::InvalidStep { h: fd_step, max: 1e-2 });
    }
    if r == 0 {
        return Ok(1.0);
    }
    if d_probe < (r as usize).min(2) {
        return Err(Error::InvalidInput(format!(
            "d_probe = {d_probe} too small for r = {r}: need at least min(r, 2)"
        )));
    }
    if sample.dim() != d_probe {
        return Err(Error::DimensionMismatch {
            expected: d_probe,
            found: sample.dim(),
        });
    }

    let mut e1 = vec![0.0; d_probe];
    e1[0] = 1.0;

    let mut worst = 0.0f64;
    for l in 1..=r as usize {
        let n = sample.len();
        // aligned tuple first, then windows over the sampled directions
        for tuple_idx in 0..=n {
            let dirs: Vec<Vec<f64>> = if tuple_idx == 0 {
                vec![e1.clone(); l]
            } else {
                (0..l)
                    .map(|t| sample.directions()[(tuple_idx - 1 + t) % n].clone())
                    .collect()
            };
            let deriv_at = |rho: f64| {
                let mut x = vec![0.0; d_probe];
                x[0] = rho;
                directional_fd(radial_bump, &x, &dirs, fd_step).abs()
            };

            // dense radial scan, slightly past the support boundary
            const RADIAL_POINTS: usize = 256;
            let mut best = 0.0f64;
            let mut best_rho = 0.0f64;
            for i in 0..=RADIAL_POINTS {
                let rho = 1.02 * i as f64 / RADIAL_POINTS as f64;
                let v = deriv_at(rho);
                if v > best {
                    best = v;
                    best_rho = rho;
                }
            }
            // local refinement over the radius
            let mut step = 1.02 / RADIAL_POINTS as f64;
            let mut rho = best_rho;
            for _ in 0..60 {
                let mut improved = false;
                for cand in [rho + step, rho - step] {
                    if !(0.0..=1.02).contains(&cand) {
                        continue;
                    }
                    let v = deriv_at(cand);
                    if v > best {
                        best = v;
                        rho = cand;
                        improved = true;
                    }
                }
                if !improved {
                    step *= 0.5;
                    if step < 1e-12 {
                        break;
                    }
                }
            }
            worst = worst.max(best);
        }
    }
    Ok((K_SAFETY_FACTOR * worst).max(1.0))
}

/// The probe dimension used for `K` estimation by the CLI and the sweep
/// harness: `min(max(r, 2), 4)`.
pub fn default_k_probe_dim(r: u32) -> usize {
    (r.max(2) as usize).min(4)
}

/// Convenience wrapper: estimates `K_r` at the default probe dimension with
/// a seeded direction sample and the default step `1e-3`.
pub fn estimate_k_default(r: u32, seed: u64) -> Result<f64> {
    let d_probe = default_k_probe_dim(r);
    let sample = DirectionSample::generate(d_probe, 192, seed)?;
    estimate_k(r, d_probe, &sample, 1e-3)
}

// ---------------------------------------------------------------------------
// Largest empty ball
// ---------------------------------------------------------------------------

/// The volume-argument radius `min{1, √d/(5 n^{1/d})}`: some point of the
/// cube is guaranteed to lie at least this far from any `n`-point set.
pub fn analytic_radius(n: u64, d: usize) -> f64 {
    debug_assert!(n >= 1 && d >= 1);
    let root = (n as f64).powf(1.0 / d as f64);
    ((d as f64).sqrt() / (5.0 * root)).min(1.0)
}

pub(crate) fn dist_sq_to_set(x: &[f64], p: &PointSet) -> f64 {
    p.iter()
        .map(|q| dist_sq(x, q.coords()))
        .fold(f64::INFINITY, f64::min)
}

/// Finds a point of the cube far from `P`: scans `Q_probe_m^d` for the
/// probe maximizing the euclidean distance to `P`, then refines by
/// coordinate descent. The returned distance is attained at the returned
/// point and never below the probe-grid maximum.
pub fn farthest_point(p: &PointSet, probe_m: u32) -> Result<(Point, f64)> {
    if p.is_empty() {
        return Err(Error::InvalidInput(
            "farthest_point requires a nonempty point set".into(),
        ));
    }
    let out = probe_refine_max(p.dim(), probe_m, |x| dist_sq_to_set(x, p))?;
    Ok((Point::new(out.argmax)?, out.best.sqrt()))
}

// ---------------------------------------------------------------------------
// Fooling instances
// ---------------------------------------------------------------------------

/// A scaled, shifted radial bump `f_*(x) = (R^r / K̂) g((x−z)/R)` vanishing
/// outside the ball `B_R(z)`, hence on the design it was built against.
///
/// Evaluation compares `‖x−z‖^2` against `R^2` through the same float
/// expression used to find `R`, so the instance is exactly zero at every
/// design point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FoolingInstance {
    pub z: Point,
    pub radius: f64,
    radius_sq: f64,
    pub r: u32,
    pub k_hat: f64,
    pub kind: ClassKind,
    amplitude: f64,
}

impl FoolingInstance {
    pub fn value(&self, x: &[f64]) -> f64 {
        let u = dist_sq(x, self.z.coords());
        self.amplitude * bump_profile(u / self.radius_sq)
    }

    /// The certified value at the center, `R^r / K̂`.
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }
}

/// Builds the fooling instance for a design `P`: centers the bump at the
/// farthest point from `P` with radius `R = min{1, dist_2(z, P)}`. An empty
/// `P` is treated as `n = 0`: the center of the cube with `R = 1`.
pub fn build_fooling(
    p: &PointSet,
    cls: &SmoothnessClass,
    k_hat: f64,
    probe_m: u32,
) -> Result<FoolingInstance> {
    if k_hat < 1.0 {
        return Err(Error::InvalidInput(format!(
            "K estimate must be >= 1, got {k_hat}"
        )));
    }
    if cls.d != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: cls.d,
            found: p.dim(),
        });
    }
    let (z, radius_sq) = if p.is_empty() {
        (Point::new(vec![0.5; cls.d])?, 1.0)
    } else {
        let (z, _) = farthest_point(p, probe_m)?;
        let dsq = dist_sq_to_set(z.coords(), p);
        (z, dsq.min(1.0))
    };
    let radius = radius_sq.sqrt();
    let amplitude = radius.powi(cls.r as i32) / k_hat;
    Ok(FoolingInstance {
        z,
        radius,
        radius_sq,
        r: cls.r,
        k_hat,
        kind: cls.kind,
        amplitude,
    })
}

/// Outcome of the sampled class-membership check of a fooling instance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub max_abs_derivative: f64,
    pub samples: usize,
    pub feasible: bool,
}

/// Estimates directional derivatives of the instance at sampled points and
/// direction tuples of every order `ℓ ≤ r` (central differences with step
/// `1e-3·R`) and checks they stay within `1 + FEASIBILITY_TOL`.
///
/// Directional feasibility certifies membership in the directional class
/// and a fortiori in the standard class, so one check serves both kinds.
pub fn feasibility_check(
    instance: &FoolingInstance,
    seed: u64,
    samples: usize,
) -> FeasibilityReport {
    let d = instance.z.dim();
    let mut max_abs: f64 = instance.value(instance.z.coords()).abs();
    if instance.r == 0 {
        return FeasibilityReport {
            max_abs_derivative: max_abs,
            samples: 0,
            feasible: max_abs <= 1.0 + FEASIBILITY_TOL,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = 1e-3 * instance.radius;
    let z = instance.z.coords();
    let radius = instance.radius;
    for i in 0..samples {
        let l = 1 + (i % instance.r as usize);
        let x: Vec<f64> = (0..d)
            .map(|j| {
                let lo = (z[j] - radius).max(0.0);
                let hi = (z[j] + radius).min(1.0);
                rng.gen_range(lo..=hi)
            })
            .collect();
        let dirs: Vec<Vec<f64>> = (0..l).map(|_| random_unit_vector(&mut rng, d)).collect();
        let est = directional_fd(|p| instance.value(p), &x, &dirs, step).abs();
        if est > max_abs {
            max_abs = est;
        }
    }
    FeasibilityReport {
        max_abs_derivative: max_abs,
        samples,
        feasible: max_abs <= 1.0 + FEASIBILITY_TOL,
    }
}

/// A lower-bound certificate: the fooling-function value `R^r/K̂` at its
/// center, valid for the class whenever the instance is class-feasible.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LowerBoundCertificate {
    pub z: Point,
    pub radius: f64,
    pub k_hat: f64,
    pub bound: f64,
    pub feasible: bool,
    pub max_sampled_derivative: f64,
}

/// Builds the fooling instance for `P` and certifies the lower bound
/// `f_*(z) = R^r/K̂` on the sup norm of class members vanishing on `P`,
/// with the sampled feasibility check attached.
pub fn certify_lower_bound(
    p: &PointSet,
    cls: &SmoothnessClass,
    k_hat: f64,
    probe_m: u32,
    seed: u64,
) -> Result<LowerBoundCertificate> {
    let instance = build_fooling(p, cls, k_hat, probe_m)?;
    let report = feasibility_check(&instance, seed, FEASIBILITY_SAMPLES);
    Ok(LowerBoundCertificate {
        z: instance.z.clone(),
        radius: instance.radius,
        k_hat,
        bound: instance.amplitude(),
        feasible: report.feasible,
        max_sampled_derivative: report.max_abs_derivative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::GridSpec;
    use crate::designs::build_grid;

    #[test]
    fn profile_boundary_values() {
        assert_eq!(bump_profile(0.0), 1.0);
        assert_eq!(bump_profile(-3.0), 1.0);
        assert_eq!(bump_profile(1.0), 0.0);
        assert_eq!(bump_profile(7.5), 0.0);
        assert_eq!(bump_profile(0.5), 0.5);
        assert!(bump_profile(0.25) > bump_profile(0.75));
    }

    #[test]
    fn profile_deriv_matches_finite_difference() {
        for t in [0.1, 0.3, 0.5, 0.7, 0.92] {
            let s = 1e-6;
            let fd = (bump_profile(t + s) - bump_profile(t - s)) / (2.0 * s);
            assert!((bump_profile_deriv(t) - fd).abs() < 1e-7, "t={t}");
        }
        assert_eq!(bump_profile_deriv(0.0), 0.0);
        assert_eq!(bump_profile_deriv(1.0), 0.0);
    }

    #[test]
    fn radial_bump_values() {
        assert_eq!(radial_bump(&[0.0, 0.0, 0.0]), 1.0);
        assert_eq!(radial_bump(&[1.0, 0.0]), 0.0);
        assert_eq!(radial_bump(&[0.8, 0.6]), 0.0); // norm exactly 1
        assert_eq!(radial_bump(&[0.5, 0.5]), 0.5);
        assert_eq!(radial_bump(&[2.0]), 0.0);
    }

    #[test]
    fn smooth_seams_under_difference_quotients() {
        // central differences of orders 1..=4 at both seams shrink with step
        // (the iterated stencil spans 2s per direction)
        for t0 in [0.0, 1.0] {
            for order in 1..=4u32 {
                let est = |s: f64| {
                    let dirs = vec![vec![1.0]; order as usize];
                    directional_fd(|x| bump_profile(x[0] + t0), &[0.0], &dirs, s).abs()
                };
                let coarse = est(0.04);
                let mid = est(0.02);
                let fine = est(0.01);
                assert!(mid <= coarse + 1e-9, "t0={t0} order={order}");
                assert!(fine <= mid + 1e-9, "t0={t0} order={order}");
                assert!(fine < 1e-2, "t0={t0} order={order} fine={fine}");
            }
        }
    }

    #[test]
    fn directions_are_unit_and_deterministic() {
        let a = DirectionSample::generate(3, 32, 7).unwrap();
        let b = DirectionSample::generate(3, 32, 7).unwrap();
        assert_eq!(a.directions(), b.directions());
        for v in a.directions() {
            let norm: f64 = v.iter().map(|c| c * c).sum::<f64>();
            assert!((norm.sqrt() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn k_estimate_r0_is_one() {
        let sample = DirectionSample::generate(2, 8, 1).unwrap();
        assert_eq!(estimate_k(0, 2, &sample, 1e-3).unwrap(), 1.0);
    }

    #[test]
    fn k_estimate_step_validation() {
        let sample = DirectionSample::generate(2, 8, 1).unwrap();
        assert!(estimate_k(1, 2, &sample, 1e-2).is_err());
        assert!(estimate_k(1, 2, &sample, 1e-9).is_err());

        // probe dimension must allow all angle constellations
        let line = DirectionSample::generate(1, 8, 1).unwrap();
        assert!(estimate_k(3, 1, &line, 1e-3).is_err());
        // and the sample must live in the probe dimension
        assert!(estimate_k(2, 3, &sample, 1e-3).is_err());
    }

    #[test]
    fn k_estimate_monotone_in_r() {
        let sample = DirectionSample::generate(3, 48, 11).unwrap();
        let k1 = estimate_k(1, 3, &sample, 1e-3).unwrap();
        let k2 = estimate_k(2, 3, &sample, 1e-3).unwrap();
        let k3 = estimate_k(3, 3, &sample, 1e-3).unwrap();
        assert!(k1 <= k2 && k2 <= k3);
        assert!(k1 >= 1.0);
    }

    #[test]
    fn k1_matches_radial_oracle_scan() {
        // K̂_1 = 1.05 · max_t 2 sqrt(t) |h'(t)|, reproduced by a dense
        // 1-d scan of the analytic radial derivative.
        let sample = DirectionSample::generate(2, 64, 3).unwrap();
        let k1 = estimate_k(1, 2, &sample, 1e-3).unwrap();
        let mut oracle = 0.0f64;
        for i in 0..=100_000 {
            let t = i as f64 / 100_000.0;
            let v = 2.0 * t.sqrt() * bump_profile_deriv(t).abs();
            oracle = oracle.max(v);
        }
        let expect = K_SAFETY_FACTOR * oracle;
        assert!(
            (k1 - expect).abs() / expect < 1e-3,
            "k1={k1} expect={expect}"
        );
    }

    #[test]
    fn analytic_radius_examples() {
        assert!((analytic_radius(1, 4) - 0.4).abs() < 1e-15);
        assert_eq!(analytic_radius(1, 100), 1.0);
        let oracle = 2.0f64.sqrt() / (5.0 * 32.0);
        assert!((analytic_radius(1024, 2) - oracle).abs() < 1e-12);
        assert!((analytic_radius(1024, 2) - 0.008838834764831844).abs() < 1e-12);
    }

    #[test]
    fn farthest_point_midpoint_example() {
        let p = PointSet::from_points(1, vec![Point::new(vec![0.5]).unwrap()]).unwrap();
        let (z, dist) = farthest_point(&p, 10).unwrap();
        assert!((dist - 0.5).abs() < 1e-12);
        assert!(z.get(0) == 0.0 || z.get(0) == 1.0);
    }

    #[test]
    fn farthest_point_square_center() {
        let p = build_grid(&GridSpec::new(1, 2).unwrap()).unwrap();
        let (z, dist) = farthest_point(&p, 10).unwrap();
        assert_eq!(z.coords(), &[0.5, 0.5]);
        assert!((dist - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn fooling_center_value_and_zeros() {
        let grid = GridSpec::new(2, 2).unwrap();
        let p = build_grid(&grid).unwrap();
        let cls = SmoothnessClass::new(2, 2, ClassKind::Directional).unwrap();
        let k_hat = 2.0;
        let inst = build_fooling(&p, &cls, k_hat, 16).unwrap();
        // exact zero on every design point
        for q in p.iter() {
            assert_eq!(inst.value(q.coords()), 0.0);
        }
        // exact amplitude at the center
        let expect = inst.radius.powi(2) / k_hat;
        assert_eq!(inst.value(inst.z.coords()), expect);
        assert!(inst.radius <= 2.0f64.sqrt() / 4.0 + 1e-12);
    }

    #[test]
    fn fooling_singleton_example() {
        // P = {0.5}, d = 1, r = 1: R = 0.5 and f*(0) = 0.5/K̂
        let p = PointSet::from_points(1, vec![Point::new(vec![0.5]).unwrap()]).unwrap();
        let cls = SmoothnessClass::new(1, 1, ClassKind::Directional).unwrap();
        let k_hat = 3.2;
        let inst = build_fooling(&p, &cls, k_hat, 10).unwrap();
        assert!((inst.radius - 0.5).abs() < 1e-12);
        let val = inst.value(inst.z.coords());
        assert!((val - 0.5 / k_hat).abs() < 1e-12);
    }

    #[test]
    fn empty_design_certifies_cap_bound() {
        let p = PointSet::new(3).unwrap();
        let cls = SmoothnessClass::new(2, 3, ClassKind::Directional).unwrap();
        let cert = certify_lower_bound(&p, &cls, 4.0, 8, 9).unwrap();
        assert!((cert.radius - 1.0).abs() < 1e-15);
        assert!((cert.bound - 0.25).abs() < 1e-15);
    }

    #[test]
    fn bound_nonincreasing_as_points_are_added() {
        let cls = SmoothnessClass::new(2, 2, ClassKind::Directional).unwrap();
        let k_hat = 4.0;
        let few = PointSet::from_points(2, vec![Point::new(vec![0.2, 0.8]).unwrap()]).unwrap();
        let more = PointSet::from_points(
            2,
            vec![
                Point::new(vec![0.2, 0.8]).unwrap(),
                Point::new(vec![0.9, 0.1]).unwrap(),
                Point::new(vec![0.5, 0.5]).unwrap(),
            ],
        )
        .unwrap();
        let b_few = build_fooling(&few, &cls, k_hat, 24).unwrap().amplitude();
        let b_more = build_fooling(&more, &cls, k_hat, 24).unwrap().amplitude();
        assert!(b_more <= b_few + 1e-12);
    }

    #[test]
    fn grid_design_certificate_example() {
        // d=1, r=1, P = Q_4^1: farthest point is a subinterval midpoint,
        // R = 1/8, bound = 1/(8 K̂)
        let p = build_grid(&GridSpec::new(4, 1).unwrap()).unwrap();
        let cls = SmoothnessClass::new(1, 1, ClassKind::Directional).unwrap();
        let k_hat = estimate_k_default(1, 5).unwrap();
        let cert = certify_lower_bound(&p, &cls, k_hat, 16, 5).unwrap();
        assert!((cert.radius - 0.125).abs() < 1e-12);
        assert!((cert.bound - 0.125 / k_hat).abs() < 1e-12);
        assert!(cert.feasible);
    }

    #[test]
    fn feasibility_of_typical_instance() {
        let p = build_grid(&GridSpec::new(2, 2).unwrap()).unwrap();
        let cls = SmoothnessClass::new(3, 2, ClassKind::Directional).unwrap();
        let k_hat = estimate_k_default(3, 2).unwrap();
        let inst = build_fooling(&p, &cls, k_hat, 16).unwrap();
        let report = feasibility_check(&inst, 17, FEASIBILITY_SAMPLES);
        assert!(
            report.feasible,
            "max sampled derivative {}",
            report.max_abs_derivative
        );
    }
}
