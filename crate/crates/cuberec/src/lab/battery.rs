//! Test-function battery with analytic class-membership certificates.
//!
//! Each function carries a closed form, an analytic gradient, and per-order
//! derivative bounds from which a scale is computed so that all directional
//! derivatives up to the requested order are at most 1/2 — comfortably
//! inside both smoothness classes.

use std::f64::consts::FRAC_PI_2;

use crate::adversary::{bump_profile, bump_profile_deriv};
use crate::error::{Error, Result};

/// Per-order sup bounds of one-dimensional Hermite–Gaussian factors
/// `|H_k(u) e^{-u^2}|`; mixed partials of `exp(-‖x‖²)` factor through these
/// and the largest product at total order ℓ is the single-axis entry.
const GAUSS_ORDER_BOUNDS: [f64; 5] = [1.0, 0.858, 2.0, 3.91, 12.0];

/// Numerically certified sup bounds (inflated ~10%) of the directional
/// norms of the radial bump profile, per derivative order.
const BUMP_ORDER_BOUNDS: [f64; 5] = [1.0, 3.3, 33.0, 740.0, 30500.0];

const BUMP_CENTER_COORD: f64 = 0.3;
const BUMP_SUPPORT_RADIUS: f64 = 0.5;
const GAUSS_CENTER_COORD: f64 = 0.5;

/// Identifiers of the battery functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BatteryId {
    Const,
    Affine,
    SinSum,
    Gauss,
    BumpOffCenter,
    PolyDegR,
}

impl BatteryId {
    /// All ids in the canonical sweep order.
    pub const ALL: [BatteryId; 6] = [
        BatteryId::Const,
        BatteryId::Affine,
        BatteryId::SinSum,
        BatteryId::Gauss,
        BatteryId::BumpOffCenter,
        BatteryId::PolyDegR,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BatteryId::Const => "const",
            BatteryId::Affine => "affine",
            BatteryId::SinSum => "sinsum",
            BatteryId::Gauss => "gauss",
            BatteryId::BumpOffCenter => "bump-offcenter",
            BatteryId::PolyDegR => "poly-deg-r",
        }
    }
}

impl std::str::FromStr for BatteryId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "const" => Ok(BatteryId::Const),
            "affine" => Ok(BatteryId::Affine),
            "sinsum" => Ok(BatteryId::SinSum),
            "gauss" => Ok(BatteryId::Gauss),
            "bump-offcenter" => Ok(BatteryId::BumpOffCenter),
            "poly-deg-r" => Ok(BatteryId::PolyDegR),
            other => Err(Error::UnknownBattery { id: other.into() }),
        }
    }
}

impl std::fmt::Display for BatteryId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A battery function scaled into the order-`r` classes on `[0,1]^d`.
#[derive(Clone, Debug)]
pub struct BatteryFunction {
    id: BatteryId,
    d: usize,
    r: u32,
    scale: f64,
    /// Certified sup bounds of the unscaled partial derivatives per order.
    partial_bounds: Vec<f64>,
}

impl BatteryFunction {
    pub fn id(&self) -> BatteryId {
        self.id
    }

    pub fn dims(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> u32 {
        self.r
    }

    /// The normalization applied to the unscaled closed form.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Certified bound on scaled directional derivatives of order `l`
    /// (uses `|∂_{θ_1}…∂_{θ_ℓ} f| ≤ d^{ℓ/2} max_{|α|=ℓ} |D^α f|`).
    pub fn directional_bound(&self, l: u32) -> f64 {
        self.scale * (self.d as f64).powf(l as f64 / 2.0) * self.partial_bounds[l as usize]
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.scale * self.unscaled_value(x)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.unscaled_gradient(x);
        for gj in g.iter_mut() {
            *gj *= self.scale;
        }
        g
    }

    /// Analytic maximum over the cube: `(max value, a maximizer)`.
    pub fn max_on_cube(&self) -> (f64, Vec<f64>) {
        let d = self.d;
        match self.id {
            BatteryId::Const => (self.scale, vec![0.0; d]),
            BatteryId::Affine => (0.5, vec![1.0; d]),
            BatteryId::SinSum => {
                if d == 1 {
                    (self.scale * 1.0f64.sin(), vec![1.0])
                } else {
                    // Σ x_j = π/2 is reachable once d ≥ 2
                    let mut x = vec![0.0; d];
                    let mut remaining = FRAC_PI_2;
                    for xj in x.iter_mut() {
                        *xj = remaining.min(1.0);
                        remaining -= *xj;
                    }
                    (self.scale, x)
                }
            }
            BatteryId::Gauss => (self.scale, vec![GAUSS_CENTER_COORD; d]),
            BatteryId::BumpOffCenter => (self.scale, vec![BUMP_CENTER_COORD; d]),
            BatteryId::PolyDegR => (self.scale, vec![1.0; d]),
        }
    }

    fn unscaled_value(&self, x: &[f64]) -> f64 {
        match self.id {
            BatteryId::Const => 1.0,
            BatteryId::Affine => x.iter().sum::<f64>(),
            BatteryId::SinSum => x.iter().sum::<f64>().sin(),
            BatteryId::Gauss => {
                let q: f64 = x.iter().map(|&c| (c - GAUSS_CENTER_COORD).powi(2)).sum();
                (-q).exp()
            }
            BatteryId::BumpOffCenter => {
                let t: f64 = x
                    .iter()
                    .map(|&c| {
                        let u = (c - BUMP_CENTER_COORD) / BUMP_SUPPORT_RADIUS;
                        u * u
                    })
                    .sum();
                bump_profile(t)
            }
            BatteryId::PolyDegR => {
                let u = x.iter().sum::<f64>() / self.d as f64;
                u.powi(self.r as i32)
            }
        }
    }

    fn unscaled_gradient(&self, x: &[f64]) -> Vec<f64> {
        let d = self.d;
        match self.id {
            BatteryId::Const => vec![0.0; d],
            BatteryId::Affine => vec![1.0; d],
            BatteryId::SinSum => {
                let c = x.iter().sum::<f64>().cos();
                vec![c; d]
            }
            BatteryId::Gauss => {
                let q: f64 = x.iter().map(|&c| (c - GAUSS_CENTER_COORD).powi(2)).sum();
                let e = (-q).exp();
                x.iter()
                    .map(|&c| -2.0 * (c - GAUSS_CENTER_COORD) * e)
                    .collect()
            }
            BatteryId::BumpOffCenter => {
                let rho2 = BUMP_SUPPORT_RADIUS * BUMP_SUPPORT_RADIUS;
                let t: f64 = x
                    .iter()
                    .map(|&c| (c - BUMP_CENTER_COORD) * (c - BUMP_CENTER_COORD) / rho2)
                    .sum();
                let hp = bump_profile_deriv(t);
                x.iter()
                    .map(|&c| hp * 2.0 * (c - BUMP_CENTER_COORD) / rho2)
                    .collect()
            }
            BatteryId::PolyDegR => {
                if self.r == 0 {
                    return vec![0.0; d];
                }
                let u = x.iter().sum::<f64>() / d as f64;
                let v = self.r as f64 * u.powi(self.r as i32 - 1) / d as f64;
                vec![v; d]
            }
        }
    }
}

/// Builds a battery function scaled into the order-`r` classes on
/// `[0,1]^d`. Supported ids: `const`, `affine`, `sinsum`, `gauss`,
/// `bump-offcenter`, `poly-deg-r`.
pub fn battery(id: &str, r: u32, d: usize) -> Result<BatteryFunction> {
    if d < 1 {
        return Err(Error::InvalidInput("dimension d must be >= 1".into()));
    }
    let id: BatteryId = id.parse()?;
    battery_by_id(id, r, d)
}

pub fn battery_by_id(id: BatteryId, r: u32, d: usize) -> Result<BatteryFunction> {
    let df = d as f64;
    let (scale, partial_bounds) = match id {
        BatteryId::Const => {
            let mut b = vec![0.0; r as usize + 1];
            b[0] = 1.0;
            (0.5, b)
        }
        BatteryId::Affine => {
            let mut b = vec![0.0; r as usize + 1];
            b[0] = df;
            if r >= 1 {
                b[1] = 1.0;
            }
            (0.5 / df, b)
        }
        BatteryId::SinSum => {
            let b = vec![1.0; r as usize + 1];
            (0.5 * df.powf(-(r as f64) / 2.0), b)
        }
        BatteryId::Gauss => {
            let b = order_bounds(&GAUSS_ORDER_BOUNDS, r, id)?;
            (0.5 / worst_directional(&b, d), b)
        }
        BatteryId::BumpOffCenter => {
            let raw = order_bounds(&BUMP_ORDER_BOUNDS, r, id)?;
            let b: Vec<f64> = raw
                .iter()
                .enumerate()
                .map(|(l, &v)| v / BUMP_SUPPORT_RADIUS.powi(l as i32))
                .collect();
            (0.5 / worst_directional(&b, d), b)
        }
        BatteryId::PolyDegR => {
            let mut b = Vec::with_capacity(r as usize + 1);
            let mut falling = 1.0;
            for l in 0..=r {
                b.push(falling / df.powi(l as i32));
                falling *= (r - l) as f64;
            }
            (0.5 / worst_directional(&b, d), b)
        }
    };
    Ok(BatteryFunction {
        id,
        d,
        r,
        scale,
        partial_bounds,
    })
}

fn order_bounds(table: &[f64], r: u32, id: BatteryId) -> Result<Vec<f64>> {
    if r as usize >= table.len() {
        return Err(Error::InvalidInput(format!(
            "battery {id:?} carries derivative certificates only up to order {}",
            table.len() - 1
        )));
    }
    Ok(table[..=r as usize].to_vec())
}

fn worst_directional(bounds: &[f64], d: usize) -> f64 {
    bounds
        .iter()
        .enumerate()
        .map(|(l, &b)| (d as f64).powf(l as f64 / 2.0) * b)
        .fold(0.0f64, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{directional_fd, DirectionSample};

    #[test]
    fn const_battery() {
        let f = battery("const", 3, 2).unwrap();
        assert_eq!(f.value(&[0.2, 0.9]), 0.5);
        assert_eq!(f.gradient(&[0.2, 0.9]), vec![0.0, 0.0]);
        assert_eq!(f.max_on_cube().0, 0.5);
    }

    #[test]
    fn affine_battery_certificate() {
        // f(x) = Σ x_j / (2d): first partials 1/(2d), higher zero
        let f = battery("affine", 2, 4).unwrap();
        let g = f.gradient(&[0.1, 0.2, 0.3, 0.4]);
        for gj in g {
            assert!((gj - 1.0 / 8.0).abs() < 1e-15);
        }
        assert!((f.value(&[1.0; 4]) - 0.5).abs() < 1e-15);
        assert!(f.directional_bound(1) <= 1.0);
        assert_eq!(f.directional_bound(2), 0.0);
    }

    #[test]
    fn sinsum_scale_example() {
        // d = 2, r = 2: s = 1/4
        let f = battery("sinsum", 2, 2).unwrap();
        assert!((f.scale() - 0.25).abs() < 1e-15);
        for l in 0..=2 {
            assert!(f.directional_bound(l) <= 0.5 + 1e-15);
        }
    }

    #[test]
    fn unknown_id_is_an_error() {
        assert!(matches!(
            battery("cubic-spline", 2, 2),
            Err(Error::UnknownBattery { .. })
        ));
    }

    #[test]
    fn gradients_match_finite_differences() {
        for id in BatteryId::ALL {
            let f = battery_by_id(id, 3, 3).unwrap();
            let x = [0.31, 0.52, 0.17];
            let g = f.gradient(&x);
            for j in 0..3 {
                let s = 1e-6;
                let mut xp = x;
                let mut xm = x;
                xp[j] += s;
                xm[j] -= s;
                let fd = (f.value(&xp) - f.value(&xm)) / (2.0 * s);
                assert!(
                    (g[j] - fd).abs() < 1e-7,
                    "{id}: axis {j}, analytic {} vs fd {fd}",
                    g[j]
                );
            }
        }
    }

    #[test]
    fn maxima_are_attained() {
        for id in BatteryId::ALL {
            for d in [1usize, 2, 3] {
                let f = battery_by_id(id, 2, d).unwrap();
                let (max, arg) = f.max_on_cube();
                assert!((f.value(&arg) - max).abs() < 1e-12, "{id} d={d}");
                // scatter check: no sampled value above the analytic max
                let mut state = 0x6a09e667f3bcc909u64;
                let mut next = || {
                    state = state
                        .wrapping_mul(6364136223846793005)
                        .wrapping_add(1442695040888963407);
                    (state >> 11) as f64 / (1u64 << 53) as f64
                };
                for _ in 0..2000 {
                    let x: Vec<f64> = (0..d).map(|_| next()).collect();
                    assert!(f.value(&x) <= max + 1e-12, "{id} d={d}");
                }
            }
        }
    }

    #[test]
    fn sampled_directional_derivatives_respect_certificates() {
        // 200 random tuples per function: the scaled function stays within
        // its per-order certificate, hence within the class
        for id in BatteryId::ALL {
            let d = 2;
            let r = 3;
            let f = battery_by_id(id, r, d).unwrap();
            let dirs = DirectionSample::generate(d, 64, 41).unwrap();
            let mut state = 0xb5297a4d3f84d5b5u64;
            let mut next = || {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64
            };
            for i in 0..200 {
                let l = 1 + i % r as usize;
                let x: Vec<f64> = (0..d).map(|_| next()).collect();
                let tuple: Vec<Vec<f64>> = (0..l)
                    .map(|t| dirs.directions()[(i + t) % dirs.len()].clone())
                    .collect();
                let est = directional_fd(|p| f.value(p), &x, &tuple, 1e-3).abs();
                assert!(
                    est <= 1.0 + 1e-3,
                    "{id}: order {l} estimate {est} exceeds the class bound"
                );
            }
        }
    }
}
