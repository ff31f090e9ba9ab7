//! Deterministic maximization over the cube: a dense lattice probe followed
//! by coordinate-descent refinement. Shared by the sup-error measurement,
//! model maximization, and the largest-empty-ball search.

use crate::core::check_point_budget;
use crate::error::{Error, Result};

pub(crate) const REFINE_MAX_ITERS: usize = 100;
pub(crate) const REFINE_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub(crate) struct SearchOutcome {
    pub best: f64,
    pub argmax: Vec<f64>,
    pub evals: u64,
    /// Whether refinement improved on the best probe value.
    pub refined: bool,
}

/// Maximizes `f` over `[0,1]^d`: evaluates every point of `Q_probe_m^d`
/// (keeping the lexicographically smallest witness on ties), then runs
/// coordinate descent from the best probe with the step shrinking from
/// `1/probe_m` by halves down to [`REFINE_TOL`].
///
/// The returned value is always attained at the returned point, so it is a
/// certified lower bound on the true supremum and never below the probe max.
pub(crate) fn probe_refine_max<F>(d: usize, probe_m: u32, f: F) -> Result<SearchOutcome>
where
    F: Fn(&[f64]) -> f64,
{
    if d < 1 {
        return Err(Error::InvalidInput("dimension d must be >= 1".into()));
    }
    if probe_m < 1 {
        return Err(Error::InvalidInput("probe_m must be >= 1".into()));
    }
    check_point_budget((probe_m as u128 + 1).pow(d as u32))?;

    let axis: Vec<f64> = (0..=probe_m).map(|k| k as f64 / probe_m as f64).collect();
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0f64; d];
    let mut best = f64::NEG_INFINITY;
    let mut argmax = vec![0.0f64; d];
    let mut evals: u64 = 0;
    'lattice: loop {
        for (j, &i) in idx.iter().enumerate() {
            x[j] = axis[i];
        }
        let v = f(&x);
        evals += 1;
        if v > best {
            best = v;
            argmax.copy_from_slice(&x);
        }
        let mut pos = d;
        loop {
            if pos == 0 {
                break 'lattice;
            }
            pos -= 1;
            if idx[pos] < probe_m as usize {
                idx[pos] += 1;
                break;
            }
            idx[pos] = 0;
        }
    }

    let probe_best = best;
    let mut step = 1.0 / probe_m as f64;
    let mut point = argmax.clone();
    for _ in 0..REFINE_MAX_ITERS {
        if step < REFINE_TOL {
            break;
        }
        let mut improved = false;
        for j in 0..d {
            for dir in [1.0f64, -1.0] {
                let cand = (point[j] + dir * step).clamp(0.0, 1.0);
                if cand == point[j] {
                    continue;
                }
                let old = point[j];
                point[j] = cand;
                let v = f(&point);
                evals += 1;
                if v > best {
                    best = v;
                    improved = true;
                } else {
                    point[j] = old;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    Ok(SearchOutcome {
        best,
        argmax: point,
        evals,
        refined: best > probe_best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_vertex_maximum() {
        let out = probe_refine_max(2, 4, |x| x[0] + 0.5 * x[1]).unwrap();
        assert!((out.best - 1.5).abs() < 1e-12);
        assert_eq!(out.argmax, vec![1.0, 1.0]);
    }

    #[test]
    fn refines_interior_maximum() {
        // peak at 0.3141..., off every probe point
        let c = 0.3141592653589793;
        let out = probe_refine_max(1, 8, |x| -(x[0] - c) * (x[0] - c)).unwrap();
        assert!(out.refined);
        assert!((out.argmax[0] - c).abs() < 1e-9);
        assert!(out.best > -1e-17);
    }

    #[test]
    fn tie_breaks_to_lex_smallest() {
        let out = probe_refine_max(2, 2, |_| 1.0).unwrap();
        assert_eq!(out.argmax, vec![0.0, 0.0]);
        assert!(!out.refined);
        assert!(out.evals >= 9);
    }

    #[test]
    fn respects_point_budget() {
        let err = probe_refine_max(6, 10_000, |_| 0.0);
        assert!(matches!(err, Err(Error::ResourceExhausted { .. })));
    }
}
