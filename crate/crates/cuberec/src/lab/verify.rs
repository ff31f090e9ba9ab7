//! The verification suite: every module invariant, run at desk
//! scale with seeded determinism, reported as pass/fail JSON.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{
    analytic_radius, build_fooling, certify_lower_bound, directional_fd, estimate_k_default,
    farthest_point, feasibility_check, radial_bump, DirectionSample, FEASIBILITY_SAMPLES,
};
use crate::core::{
    binomial, enumerate_multiindices, nearest_grid_point, ClassKind, GridSpec, MultiIndex, Point,
    SampleTable, SmoothnessClass,
};
use crate::designs::{
    build_recovery_design, default_step, expand_cloud, proof_schedule, PointSet,
};
use crate::envelopes::{envelope_closed, envelope_recursive};
use crate::error::Error;
use crate::lab::battery::{battery_by_id, BatteryId};
use crate::lab::{run_sweep, verify_mean_value_fact, DifferentiableField, SweepConfig};
use crate::recover::{
    estimate_derivative, estimate_function_maximum, estimate_maximum, fit_from_function,
    sup_error,
};

/// Outcome of one named invariant check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub details: String,
}

impl CheckResult {
    fn pass(name: &str, details: String) -> Self {
        Self { name: name.into(), passed: true, details }
    }

    fn fail(name: &str, details: String) -> Self {
        Self { name: name.into(), passed: false, details }
    }
}

/// The full suite report. Serialization is byte-stable for a fixed seed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub all_passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Runs every module invariant at desk scale and collects the results.
/// Failures are data, not errors; reruns with the same seed produce
/// byte-identical reports.
pub fn verify_suite(seed: u64) -> VerifyReport {
    let checks = vec![
        check_multiindex_count(),
        check_nearest_grid(seed),
        check_sample_table(seed),
        check_design_cost(),
        check_cloud_structure(seed),
        check_schedule_recurrence(),
        check_design_points_in_cube(),
        check_affine_exactness(seed),
        check_grid_interpolation(),
        check_convergence_rate(),
        check_optimization_sandwich(),
        check_derivative_bias(),
        check_support_exact_zero(seed),
        check_seam_smoothness(),
        check_class_feasibility(seed),
        check_volume_bound(seed),
        check_bakhvalov_consistency(seed),
        check_recursive_le_closed(),
        check_directional_le_standard(),
        check_odd_r_consistency(),
        check_dimension_shape(),
        check_envelope_monotonicity(),
        check_battery_membership(seed),
        check_sweep_determinism(seed),
        check_sweep_cost_accounting(seed),
        check_mean_value_instance(),
    ];
    let passed = checks.iter().filter(|c| c.passed).count();
    let failed = checks.len() - passed;
    VerifyReport {
        seed,
        total: checks.len(),
        passed,
        failed,
        all_passed: failed == 0,
        checks,
    }
}

// ---------------------------------------------------------------------------
// core
// ---------------------------------------------------------------------------

fn check_multiindex_count() -> CheckResult {
    const NAME: &str = "core/multiindex-count";
    for d in 1..=8usize {
        for k in 0..=6u32 {
            let got = enumerate_multiindices(d, k).len();
            let want = binomial((d + k as usize) as u64, d as u64) as usize;
            if got != want {
                return CheckResult::fail(
                    NAME,
                    format!("d={d} k={k}: {got} indices, expected {want}"),
                );
            }
        }
    }
    CheckResult::pass(NAME, "counts match binomial(d+k, d) for d<=8, k<=6".into())
}

fn check_nearest_grid(seed: u64) -> CheckResult {
    const NAME: &str = "core/nearest-grid-idempotent";
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x01);
    for _ in 0..400 {
        let d = rng.gen_range(1..=4usize);
        let m = rng.gen_range(1..=9u32);
        let grid = GridSpec::new(m, d).unwrap();
        let x = Point::new((0..d).map(|_| rng.gen_range(0.0..=1.0)).collect()).unwrap();
        let y = nearest_grid_point(&x, &grid);
        let max_move = x
            .coords()
            .iter()
            .zip(y.coords())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if max_move > 0.5 / m as f64 + 1e-15 {
            return CheckResult::fail(NAME, format!("moved {max_move} with m={m}"));
        }
        let yy = nearest_grid_point(&y, &grid);
        if yy.coords() != y.coords() {
            return CheckResult::fail(NAME, format!("not idempotent at {:?}", y.coords()));
        }
    }
    CheckResult::pass(NAME, "idempotent, moves at most 1/(2m)".into())
}

fn check_sample_table(seed: u64) -> CheckResult {
    const NAME: &str = "core/sample-table-roundtrip";
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x02);
    let mut table = SampleTable::new("check");
    let mut entries = Vec::new();
    for _ in 0..200 {
        let p = Point::new(vec![rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0)]).unwrap();
        let v: f64 = rng.gen_range(-1.0..1.0);
        table.insert(p.clone(), v).unwrap();
        entries.push((p, v));
    }
    for (p, v) in entries.iter().rev() {
        match table.get(p) {
            Some(got) if got == *v => {}
            other => {
                return CheckResult::fail(NAME, format!("expected {v}, got {other:?}"));
            }
        }
    }
    CheckResult::pass(NAME, "lookup after insert returns the value exactly".into())
}

// ---------------------------------------------------------------------------
// designs
// ---------------------------------------------------------------------------

fn check_design_cost() -> CheckResult {
    const NAME: &str = "designs/cost-accounting";
    for m in 1..=4u32 {
        for d in 1..=4usize {
            for r in 1..=4u32 {
                let grid = GridSpec::new(m, d).unwrap();
                let design = build_recovery_design(&grid, r, default_step(&grid, r)).unwrap();
                let budget = (d as u128 + 1).pow(r - 1) * grid.point_count();
                if design.n_points() as u128 > budget {
                    return CheckResult::fail(
                        NAME,
                        format!(
                            "m={m} d={d} r={r}: {} points exceed budget {budget}",
                            design.n_points()
                        ),
                    );
                }
            }
        }
    }
    CheckResult::pass(NAME, "|points| <= (d+1)^{r-1}(m+1)^d on the desk box".into())
}

fn check_cloud_structure(seed: u64) -> CheckResult {
    const NAME: &str = "designs/cloud-structure";
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x03);
    for _ in 0..50 {
        let d = rng.gen_range(1..=3usize);
        let n = rng.gen_range(1..=12usize);
        let points: Vec<Point> = (0..n)
            .map(|_| Point::new((0..d).map(|_| rng.gen_range(0.0..=1.0)).collect()).unwrap())
            .collect();
        let m_set = PointSet::from_points(d, points).unwrap();
        let h = rng.gen_range(0.01..=0.5);
        let cloud = expand_cloud(&m_set, h).unwrap();

        for p in m_set.iter() {
            if !cloud.contains(p) {
                return CheckResult::fail(NAME, "output does not contain input".into());
            }
        }
        // every added point is a parent with one coordinate stepped by ±h
        for q in cloud.iter().skip(m_set.len()) {
            let ok = m_set.iter().any(|p| {
                let mut diff_axis = None;
                for j in 0..d {
                    if q.get(j) != p.get(j) {
                        if diff_axis.is_some() {
                            return false;
                        }
                        diff_axis = Some(j);
                    }
                }
                match diff_axis {
                    Some(j) => q.get(j) == p.get(j) + h || q.get(j) == p.get(j) - h,
                    None => false,
                }
            });
            if !ok {
                return CheckResult::fail(
                    NAME,
                    format!("added point {:?} has no ±h parent", q.coords()),
                );
            }
        }
    }
    CheckResult::pass(NAME, "clouds contain parents; steps are exactly ±h".into())
}

fn check_schedule_recurrence() -> CheckResult {
    const NAME: &str = "designs/schedule-recurrence";
    for delta in [0.3, 0.6, 0.9] {
        for r in 2..=6u32 {
            let s = proof_schedule(delta, r).unwrap();
            for i in 1..s.steps.len() {
                let lhs = 3.0 * s.steps[i];
                let rhs = s.steps[i - 1] * s.steps[i - 1];
                if (lhs - rhs).abs() > 1e-12 * rhs.max(1e-300) {
                    return CheckResult::fail(
                        NAME,
                        format!("delta={delta} r={r} i={i}: 3h_i={lhs} vs h_{{i-1}}^2={rhs}"),
                    );
                }
            }
        }
    }
    CheckResult::pass(NAME, "3·h_i = h_{i-1}^2 to 1e-12 relative".into())
}

fn check_design_points_in_cube() -> CheckResult {
    const NAME: &str = "designs/points-in-cube";
    for (m, d, r) in [(1u32, 1usize, 2u32), (2, 2, 3), (4, 2, 4), (1, 4, 3), (3, 3, 2)] {
        let grid = GridSpec::new(m, d).unwrap();
        let design = build_recovery_design(&grid, r, default_step(&grid, r)).unwrap();
        for p in design.all_points().iter() {
            if p.coords().iter().any(|&c| !(0.0..=1.0).contains(&c)) {
                return CheckResult::fail(
                    NAME,
                    format!("m={m} d={d} r={r}: point {:?} leaves the cube", p.coords()),
                );
            }
        }
    }
    CheckResult::pass(NAME, "all design points lie in [0,1]^d exactly".into())
}

// ---------------------------------------------------------------------------
// recover
// ---------------------------------------------------------------------------

fn check_affine_exactness(seed: u64) -> CheckResult {
    const NAME: &str = "recover/affine-exactness";
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x04);
    for d in 1..=4usize {
        for r in [2u32, 3] {
            for m in [1u32, 2] {
                let coeffs: Vec<f64> = (0..=d).map(|_| rng.gen_range(-0.5..=0.5)).collect();
                let f = move |x: &[f64]| {
                    coeffs[0]
                        + x.iter()
                            .zip(&coeffs[1..])
                            .map(|(xi, ci)| xi * ci)
                            .sum::<f64>()
                };
                let grid = GridSpec::new(m, d).unwrap();
                let (model, _) = fit_from_function(&grid, r, None, "affine", &f).unwrap();
                let report = sup_error(&model, &f, (2 * m).max(4)).unwrap();
                if report.sup_estimate > 1e-10 {
                    return CheckResult::fail(
                        NAME,
                        format!("d={d} r={r} m={m}: sup error {}", report.sup_estimate),
                    );
                }
            }
        }
    }
    CheckResult::pass(NAME, "affine functions recovered to 1e-10".into())
}

fn check_grid_interpolation() -> CheckResult {
    const NAME: &str = "recover/grid-interpolation";
    for (d, r, m) in [(1usize, 3u32, 2u32), (2, 2, 2), (3, 2, 1)] {
        let f = battery_by_id(BatteryId::SinSum, r, d).unwrap();
        let grid = GridSpec::new(m, d).unwrap();
        let (model, samples) =
            fit_from_function(&grid, r, None, "sinsum", |x| f.value(x)).unwrap();
        for y in model.design().grid_points() {
            if model.evaluate(y) != samples.get(y).unwrap() {
                return CheckResult::fail(
                    NAME,
                    format!("d={d} r={r} m={m}: model differs from sample at a grid point"),
                );
            }
        }
    }
    CheckResult::pass(NAME, "model reproduces sampled grid values exactly".into())
}

fn slope_of_log_error(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(m, _)| m.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, e)| e.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let den: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    num / den
}

fn check_convergence_rate() -> CheckResult {
    const NAME: &str = "recover/convergence-rate";
    let mut details = String::new();
    for d in [1usize, 2] {
        let ms: &[u32] = if d == 1 { &[2, 4, 8, 16] } else { &[2, 4, 8] };
        for r in 1..=3u32 {
            let f = battery_by_id(BatteryId::SinSum, r, d).unwrap();
            let mut series = Vec::new();
            for &m in ms {
                let grid = GridSpec::new(m, d).unwrap();
                let (model, _) =
                    fit_from_function(&grid, r, None, "sinsum", |x| f.value(x)).unwrap();
                let report = sup_error(&model, |x| f.value(x), 4 * m).unwrap();
                series.push((m as f64, report.sup_estimate));
            }
            let slope = slope_of_log_error(&series);
            let lo = -(r as f64) - 0.5;
            let hi = -(r as f64) + 0.5;
            if !(lo..=hi).contains(&slope) {
                return CheckResult::fail(
                    NAME,
                    format!("d={d} r={r}: slope {slope:.3} outside [{lo}, {hi}]"),
                );
            }
            details.push_str(&format!("d={d} r={r}: slope {slope:.3}; "));
        }
    }
    CheckResult::pass(NAME, details)
}

fn check_optimization_sandwich() -> CheckResult {
    const NAME: &str = "recover/optimization-sandwich";
    for id in BatteryId::ALL {
        for d in [1usize, 2] {
            for r in 1..=2u32 {
                for m in [1u32, 2] {
                    let f = battery_by_id(id, r, d).unwrap();
                    let grid = GridSpec::new(m, d).unwrap();
                    let (model, _) =
                        fit_from_function(&grid, r, None, id.as_str(), |x| f.value(x)).unwrap();
                    let probe = (4 * m).max(8);
                    let err = sup_error(&model, |x| f.value(x), probe).unwrap();
                    let (max_f, _) =
                        estimate_function_maximum(|x| f.value(x), d, probe).unwrap();
                    let (max_model, _) = estimate_maximum(&model, probe).unwrap();
                    let gap = (max_f - max_model).abs();
                    if gap > err.sup_estimate + 2e-10 {
                        return CheckResult::fail(
                            NAME,
                            format!(
                                "{id} d={d} r={r} m={m}: |Δmax| {gap} > sup {} + 2e-10",
                                err.sup_estimate
                            ),
                        );
                    }
                }
            }
        }
    }
    CheckResult::pass(NAME, "|max f - max model| <= sup error + 2e-10".into())
}

fn check_derivative_bias() -> CheckResult {
    const NAME: &str = "recover/derivative-bias";
    let f = |x: &[f64]| x[0] * x[0] / 2.0;
    let grid = GridSpec::new(4, 1).unwrap();
    let h = 0.1;
    let design = build_recovery_design(&grid, 2, h).unwrap();
    let samples = SampleTable::sample("sq", design.all_points().iter(), f).unwrap();
    for (gi, y) in design.grid_points().iter().enumerate() {
        let est = estimate_derivative(
            &samples,
            y,
            &MultiIndex::new(vec![1]),
            h,
            design.orientation(gi),
        )
        .unwrap();
        let truth = y.get(0);
        if (est - truth).abs() > h / 2.0 + 1e-12 {
            return CheckResult::fail(
                NAME,
                format!("y={truth}: bias {} exceeds h/2", (est - truth).abs()),
            );
        }
    }
    CheckResult::pass(NAME, "divided-difference bias within h/2 for f = x^2/2".into())
}

// ---------------------------------------------------------------------------
// adversary
// ---------------------------------------------------------------------------

fn check_support_exact_zero(seed: u64) -> CheckResult {
    const NAME: &str = "adversary/support-exact-zero";
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x05);
    // outside the unit ball the bump is exactly zero
    for _ in 0..200 {
        let d = rng.gen_range(1..=4usize);
        let mut x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let target = rng.gen_range(1.0..3.0f64);
        if norm > 0.0 {
            for c in x.iter_mut() {
                *c *= target / norm;
            }
        } else {
            x[0] = target;
        }
        if x.iter().map(|c| c * c).sum::<f64>() >= 1.0 && radial_bump(&x) != 0.0 {
            return CheckResult::fail(NAME, format!("bump nonzero at {x:?}"));
        }
    }
    // fooling instances vanish exactly on their design
    for trial in 0..20 {
        let d = 1 + trial % 3;
        let n = rng.gen_range(2..=40usize);
        let points: Vec<Point> = (0..n)
            .map(|_| Point::new((0..d).map(|_| rng.gen_range(0.0..=1.0)).collect()).unwrap())
            .collect();
        let p = PointSet::from_points(d, points).unwrap();
        let cls = SmoothnessClass::new(1 + (trial as u32 % 3), d, ClassKind::Directional).unwrap();
        let inst = build_fooling(&p, &cls, 2.0, 12).unwrap();
        for q in p.iter() {
            if inst.value(q.coords()) != 0.0 {
                return CheckResult::fail(
                    NAME,
                    format!("instance nonzero at design point {:?}", q.coords()),
                );
            }
        }
    }
    CheckResult::pass(NAME, "supports are genuinely disjoint, no tolerance".into())
}

fn check_seam_smoothness() -> CheckResult {
    const NAME: &str = "adversary/seam-smoothness";
    for t0 in [0.0f64, 1.0] {
        for order in 1..=4usize {
            let dirs = vec![vec![1.0]; order];
            let est = |s: f64| {
                directional_fd(|x| crate::adversary::bump_profile(x[0] + t0), &[0.0], &dirs, s)
                    .abs()
            };
            let (coarse, mid, fine) = (est(0.04), est(0.02), est(0.01));
            if !(mid <= coarse + 1e-9 && fine <= mid + 1e-9 && fine < 1e-2) {
                return CheckResult::fail(
                    NAME,
                    format!("t={t0} order={order}: {coarse} -> {mid} -> {fine}"),
                );
            }
        }
    }
    CheckResult::pass(NAME, "difference quotients vanish at both seams".into())
}

fn check_class_feasibility(seed: u64) -> CheckResult {
    const NAME: &str = "adversary/class-feasibility";
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x06);
    for trial in 0..6u64 {
        let d = 1 + (trial as usize) % 3;
        let r = 1 + (trial as u32) % 3;
        let n = rng.gen_range(4..=32usize);
        let points: Vec<Point> = (0..n)
            .map(|_| Point::new((0..d).map(|_| rng.gen_range(0.0..=1.0)).collect()).unwrap())
            .collect();
        let p = PointSet::from_points(d, points).unwrap();
        let k_hat = estimate_k_default(r, seed ^ 0x07).unwrap();
        let cls = SmoothnessClass::new(r, d, ClassKind::Directional).unwrap();
        let inst = build_fooling(&p, &cls, k_hat, 16).unwrap();
        let report = feasibility_check(&inst, seed.wrapping_add(trial), FEASIBILITY_SAMPLES);
        if !report.feasible {
            return CheckResult::fail(
                NAME,
                format!(
                    "d={d} r={r}: sampled derivative {} exceeds 1+1e-3",
                    report.max_abs_derivative
                ),
            );
        }
    }
    CheckResult::pass(NAME, "sampled directional derivatives within 1 + 1e-3".into())
}

fn check_volume_bound(seed: u64) -> CheckResult {
    const NAME: &str = "adversary/volume-bound";
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x08);
    for trial in 0..100usize {
        let d = 1 + trial % 4;
        let n = rng.gen_range(1..=128usize);
        let points: Vec<Point> = (0..n)
            .map(|_| Point::new((0..d).map(|_| rng.gen_range(0.0..=1.0)).collect()).unwrap())
            .collect();
        let p = PointSet::from_points(d, points).unwrap();
        let probe_m = (64 / d as u32).max(4);
        let (_, dist) = farthest_point(&p, probe_m).unwrap();
        let guarantee = analytic_radius(p.len() as u64, d);
        if dist < guarantee {
            return CheckResult::fail(
                NAME,
                format!("trial {trial}: d={d} n={}: dist {dist} < {guarantee}", p.len()),
            );
        }
    }
    CheckResult::pass(NAME, "empty-ball radius meets sqrt(d)/(5 n^(1/d))".into())
}

fn check_bakhvalov_consistency(seed: u64) -> CheckResult {
    const NAME: &str = "adversary/bakhvalov-consistency";
    let mut k_cache: Vec<(u32, f64)> = Vec::new();
    for r in 1..=3u32 {
        k_cache.push((r, estimate_k_default(r, seed ^ 0x09).unwrap()));
    }
    for d in 1..=3usize {
        for r in 1..=3u32 {
            for m in 1..=4u32 {
                let grid = GridSpec::new(m, d).unwrap();
                let design = build_recovery_design(&grid, r, default_step(&grid, r)).unwrap();
                let k_hat = k_cache.iter().find(|&&(rr, _)| rr == r).unwrap().1;
                let cls = SmoothnessClass::new(r, d, ClassKind::Directional).unwrap();
                let cert = certify_lower_bound(
                    design.all_points(),
                    &cls,
                    k_hat,
                    (4 * m).max(8),
                    seed,
                )
                .unwrap();
                for kind in [ClassKind::Standard, ClassKind::Directional] {
                    let envelope = envelope_closed(d, r, m, kind);
                    if cert.bound > envelope {
                        return CheckResult::fail(
                            NAME,
                            format!(
                                "d={d} r={r} m={m} {kind}: certificate {} above envelope {envelope}",
                                cert.bound
                            ),
                        );
                    }
                }
            }
        }
    }
    CheckResult::pass(NAME, "certified lower bounds stay below the envelopes".into())
}

// ---------------------------------------------------------------------------
// envelopes
// ---------------------------------------------------------------------------

fn check_recursive_le_closed() -> CheckResult {
    const NAME: &str = "envelopes/recursive-le-closed";
    for d in 1..=6usize {
        for r in [2u32, 4] {
            for m in 1..=8u32 {
                let rec = envelope_recursive(d, r, m);
                let closed = envelope_closed(d, r, m, ClassKind::Standard);
                if rec > closed * (1.0 + 1e-12) {
                    return CheckResult::fail(NAME, format!("d={d} r={r} m={m}: {rec} > {closed}"));
                }
            }
        }
    }
    CheckResult::pass(NAME, "two-step recursion below the closed form".into())
}

fn check_directional_le_standard() -> CheckResult {
    const NAME: &str = "envelopes/directional-le-standard";
    for d in 1..=6usize {
        for r in 0..=5u32 {
            for m in 1..=8u32 {
                let dir = envelope_closed(d, r, m, ClassKind::Directional);
                let std = envelope_closed(d, r, m, ClassKind::Standard);
                if dir > std + 1e-15 {
                    return CheckResult::fail(NAME, format!("d={d} r={r} m={m}: {dir} > {std}"));
                }
            }
        }
    }
    CheckResult::pass(NAME, "directional envelope below standard".into())
}

fn check_odd_r_consistency() -> CheckResult {
    const NAME: &str = "envelopes/odd-r-consistency";
    for d in 1..=5usize {
        for m in 1..=6u32 {
            for r in [3u32, 5] {
                let odd = envelope_closed(d, r, m, ClassKind::Standard);
                let composed = (d as f64 / (2.0 * m as f64))
                    * envelope_closed(d, r - 1, m, ClassKind::Standard);
                if (odd - composed).abs() > 1e-12 * composed.max(1.0) {
                    return CheckResult::fail(
                        NAME,
                        format!("d={d} r={r} m={m}: {odd} vs composed {composed}"),
                    );
                }
            }
        }
    }
    CheckResult::pass(NAME, "odd closed form composes from the even one".into())
}

fn check_dimension_shape() -> CheckResult {
    const NAME: &str = "envelopes/dimension-shape";
    for r in [2u32, 4] {
        for m in [1u32, 2, 5] {
            let base = envelope_closed(1, r, m, ClassKind::Standard);
            for d in 1..=6usize {
                let ratio = envelope_closed(d, r, m, ClassKind::Standard) / base;
                let expect = (d as f64).powi((r / 2) as i32);
                if (ratio - expect).abs() > 1e-12 * expect {
                    return CheckResult::fail(
                        NAME,
                        format!("d={d} r={r} m={m}: ratio {ratio} vs d^{{r/2}} {expect}"),
                    );
                }
            }
        }
    }
    CheckResult::pass(NAME, "even-r envelopes grow exactly like d^(r/2)".into())
}

fn check_envelope_monotonicity() -> CheckResult {
    const NAME: &str = "envelopes/monotonicity";
    for kind in [ClassKind::Standard, ClassKind::Directional] {
        for r in 1..=4u32 {
            for d in 1..=5usize {
                for m in 1..=7u32 {
                    if envelope_closed(d, r, m + 1, kind) >= envelope_closed(d, r, m, kind) {
                        return CheckResult::fail(NAME, format!("not decreasing in m at d={d} r={r} m={m}"));
                    }
                    if envelope_closed(d + 1, r, m, kind) < envelope_closed(d, r, m, kind) {
                        return CheckResult::fail(NAME, format!("decreasing in d at d={d} r={r} m={m}"));
                    }
                }
            }
        }
    }
    CheckResult::pass(NAME, "strictly decreasing in m, nondecreasing in d".into())
}

// ---------------------------------------------------------------------------
// lab
// ---------------------------------------------------------------------------

fn check_battery_membership(seed: u64) -> CheckResult {
    const NAME: &str = "lab/battery-membership";
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0a);
    for id in BatteryId::ALL {
        for (r, d) in [(2u32, 2usize), (3, 1), (3, 3)] {
            let f = battery_by_id(id, r, d).unwrap();
            let sphere = DirectionSample::generate(d, 64, seed ^ 0x0b).unwrap();
            for i in 0..200usize {
                let l = 1 + i % r as usize;
                let x: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..=1.0)).collect();
                // alternate random sphere directions with axis directions
                // (mixed partial derivatives)
                let tuple: Vec<Vec<f64>> = if i % 2 == 0 {
                    (0..l)
                        .map(|t| sphere.directions()[(i + t) % sphere.len()].clone())
                        .collect()
                } else {
                    (0..l)
                        .map(|t| {
                            let mut e = vec![0.0; d];
                            e[(i + t) % d] = 1.0;
                            e
                        })
                        .collect()
                };
                let est = directional_fd(|p| f.value(p), &x, &tuple, 1e-3).abs();
                if est > 1.0 + 1e-3 {
                    return CheckResult::fail(
                        NAME,
                        format!("{id} r={r} d={d}: order-{l} estimate {est} above 1+1e-3"),
                    );
                }
            }
        }
    }
    CheckResult::pass(NAME, "sampled derivatives of every battery within class".into())
}

fn sweep_config_for(seed: u64) -> SweepConfig {
    SweepConfig {
        d_list: vec![1, 2],
        r_list: vec![1, 2],
        m_list: vec![1, 2],
        kind: ClassKind::Standard,
        probe_m: 8,
        seed,
        output_path: None,
    }
}

fn check_sweep_determinism(seed: u64) -> CheckResult {
    const NAME: &str = "lab/sweep-determinism";
    let config = sweep_config_for(seed);
    let a = run_sweep(&config).unwrap();
    let b = run_sweep(&config).unwrap();
    if a.csv.as_bytes() != b.csv.as_bytes() {
        return CheckResult::fail(NAME, "two sweeps with one seed differ".into());
    }
    CheckResult::pass(NAME, format!("{} rows, byte-identical on rerun", a.rows.len()))
}

fn check_sweep_cost_accounting(seed: u64) -> CheckResult {
    const NAME: &str = "lab/sweep-cost-accounting";
    let out = run_sweep(&sweep_config_for(seed)).unwrap();
    for row in &out.rows {
        let budget =
            (row.d as u128 + 1).pow(row.r - 1) * (row.m as u128 + 1).pow(row.d as u32);
        if row.n_points as u128 > budget {
            return CheckResult::fail(
                NAME,
                format!("row (d={}, r={}, m={}): {} > {budget}", row.d, row.r, row.m, row.n_points),
            );
        }
    }
    CheckResult::pass(NAME, "every sweep row respects the sample budget".into())
}

struct ScaledCosine {
    d: usize,
    amplitude: f64,
    shift: f64,
}

impl DifferentiableField for ScaledCosine {
    fn dims(&self) -> usize {
        self.d
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.amplitude * (x[0] - self.shift).cos()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.d];
        g[0] = -self.amplitude * (x[0] - self.shift).sin();
        g
    }
}

fn check_mean_value_instance() -> CheckResult {
    const NAME: &str = "lab/mean-value-instance";
    let m_set = PointSet::from_points(
        2,
        vec![
            Point::new(vec![0.25, 0.5]).unwrap(),
            Point::new(vec![0.75, 0.25]).unwrap(),
        ],
    )
    .unwrap();
    let h = 0.2;
    // |f| = h² |cos| ≤ h² on all of [0,1]^2, and |∂f/∂x_1| ≤ h² ≤ 3h
    let good = ScaledCosine { d: 2, amplitude: h * h, shift: 0.4 };
    match verify_mean_value_fact(&good, &m_set, h, 0) {
        Ok(true) => {}
        other => return CheckResult::fail(NAME, format!("constructed instance: {other:?}")),
    }
    // an instance violating the hypothesis must be gated, not failed
    let loud = ScaledCosine { d: 2, amplitude: 1.0, shift: 0.0 };
    match verify_mean_value_fact(&loud, &m_set, h, 0) {
        Err(Error::HypothesisViolated { .. }) => {}
        other => {
            return CheckResult::fail(NAME, format!("hypothesis gate missing: {other:?}"));
        }
    }
    CheckResult::pass(NAME, "mean-value implication holds on the instance".into())
}
