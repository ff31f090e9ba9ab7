//! Theoretical error envelopes `E(Q_m^d, ·)` — closed-form and recursive —
//! and the complexity-count formulas for sample numbers `n^app`.

use std::collections::HashMap;
use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::core::ClassKind;
use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Envelopes
// ---------------------------------------------------------------------------

/// Closed-form envelope for the sup norm of class members whose derivatives
/// nearly vanish on `Q_m^d`:
///
/// * standard, even `r`:  `e · d^{r/2} / (2m)^r`
/// * standard, odd `r`:   `e · d^{(r+1)/2} / (2m)^r`
/// * directional:         `(√d / (2m))^r`
/// * any kind, `r = 0`:   `1`
pub fn envelope_closed(d: usize, r: u32, m: u32, kind: ClassKind) -> f64 {
    debug_assert!(d >= 1 && m >= 1);
    if r == 0 {
        return 1.0;
    }
    let two_m = 2.0 * m as f64;
    match kind {
        ClassKind::Standard => {
            // d^{r/2} for even r, d^{(r+1)/2} for odd r
            let dim_exponent = r.div_ceil(2);
            E * (d as f64).powi(dim_exponent as i32) / two_m.powi(r as i32)
        }
        ClassKind::Directional => ((d as f64).sqrt() / two_m).powi(r as i32),
    }
}

/// Recursive envelope for the standard classes, memoized over `(d, r)`:
///
/// * `r = 0`: `1`
/// * odd `r`: `(d/(2m)) · E(d, r−1)`
/// * even `r`, `d = 1`: `e/(2m)^r`
/// * even `r`, `d ≥ 2`: `E(d−1, r) + (1/(8m²)) · E(d, r−2)`
///
/// Never exceeds [`envelope_closed`] for even `r`.
pub fn envelope_recursive(d: usize, r: u32, m: u32) -> f64 {
    debug_assert!(d >= 1 && m >= 1);
    let mut memo: HashMap<(usize, u32), f64> = HashMap::new();
    recursive_standard(d, r, m, &mut memo)
}

fn recursive_standard(d: usize, r: u32, m: u32, memo: &mut HashMap<(usize, u32), f64>) -> f64 {
    if r == 0 {
        return 1.0;
    }
    if let Some(&v) = memo.get(&(d, r)) {
        return v;
    }
    let two_m = 2.0 * m as f64;
    let value = if !r.is_multiple_of(2) {
        (d as f64 / two_m) * recursive_standard(d, r - 1, m, memo)
    } else if d == 1 {
        E / two_m.powi(r as i32)
    } else {
        recursive_standard(d - 1, r, m, memo)
            + recursive_standard(d, r - 2, m, memo) / (8.0 * (m as f64) * (m as f64))
    };
    memo.insert((d, r), value);
    value
}

/// Recursive envelope for the directional classes: the single-step
/// recursion `E(r) = (√d/(2m)) · E(r−1)` with `E(0) = 1`.
pub fn envelope_recursive_directional(d: usize, r: u32, m: u32) -> f64 {
    let factor = (d as f64).sqrt() / (2.0 * m as f64);
    let mut value = 1.0;
    for _ in 0..r {
        value *= factor;
    }
    value
}

/// Which formula produced an envelope value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnvelopeSource {
    ClosedForm,
    Recursive,
}

impl std::fmt::Display for EnvelopeSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EnvelopeSource::ClosedForm => write!(f, "closed"),
            EnvelopeSource::Recursive => write!(f, "recursive"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnvelopeRow {
    pub d: usize,
    pub r: u32,
    pub m: u32,
    pub kind: ClassKind,
    pub source: EnvelopeSource,
    pub bound: f64,
}

/// Rows `(d, r, m, kind, source, bound)` of envelope values.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnvelopeTable {
    pub rows: Vec<EnvelopeRow>,
}

impl EnvelopeTable {
    /// CSV rendering with header `d,r,m,kind,source,bound`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,r,m,kind,source,bound\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.d, row.r, row.m, row.kind, row.source, row.bound
            ));
        }
        out
    }
}

/// Builds the envelope table for fixed `(d, r)` and `m = 1..=m_max`, with
/// one closed-form and one recursive row per `m`.
pub fn build_envelope_table(d: usize, r: u32, m_max: u32, kind: ClassKind) -> Result<EnvelopeTable> {
    if d < 1 || m_max < 1 {
        return Err(Error::InvalidInput(
            "envelope table needs d >= 1 and m_max >= 1".into(),
        ));
    }
    let mut rows = Vec::with_capacity(2 * m_max as usize);
    for m in 1..=m_max {
        let closed = envelope_closed(d, r, m, kind);
        let recursive = match kind {
            ClassKind::Standard => envelope_recursive(d, r, m),
            ClassKind::Directional => envelope_recursive_directional(d, r, m),
        };
        debug_assert!(
            r % 2 == 1 || recursive <= closed * (1.0 + 1e-12),
            "recursive envelope must not exceed the closed form for even r"
        );
        rows.push(EnvelopeRow {
            d,
            r,
            m,
            kind,
            source: EnvelopeSource::ClosedForm,
            bound: closed,
        });
        rows.push(EnvelopeRow {
            d,
            r,
            m,
            kind,
            source: EnvelopeSource::Recursive,
            bound: recursive,
        });
    }
    Ok(EnvelopeTable { rows })
}

// ---------------------------------------------------------------------------
// Complexity counts
// ---------------------------------------------------------------------------

/// Which recipe produced an upper sample count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UpperRoute {
    /// Grid recipe at the requested smoothness.
    Direct,
    /// For odd `r`: the even-smoothness fallback `n^app(ε, C^{r-1})`,
    /// which wins for large `d`.
    EvenFallback,
}

/// An upper sample count `n = (d+1)^{r−1}(m+1)^d` together with the grid
/// size `m` that realizes it.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct UpperCount {
    pub m: u64,
    pub n: u64,
    pub saturated: bool,
    pub route: UpperRoute,
}

fn grid_size_for(epsilon: f64, d: usize, r: u32, kind: ClassKind) -> f64 {
    let inv_root = epsilon.powf(-1.0 / r as f64);
    match kind {
        ClassKind::Standard => {
            let e_root = E.powf(1.0 / r as f64);
            if r.is_multiple_of(2) {
                0.5 * e_root * (d as f64).sqrt() * inv_root
            } else {
                0.5 * e_root * (d as f64).powf((r as f64 + 1.0) / (2.0 * r as f64)) * inv_root
            }
        }
        ClassKind::Directional => 0.5 * (d as f64).sqrt() * inv_root,
    }
}

fn count_for(m: u64, d: usize, r: u32) -> (u64, bool) {
    let base = (d as u128 + 1).checked_pow(r - 1);
    let cells = (m as u128).checked_add(1).and_then(|v| v.checked_pow(d as u32));
    match (base, cells) {
        (Some(b), Some(c)) => match b.checked_mul(c) {
            Some(n) if n <= u64::MAX as u128 => (n as u64, false),
            _ => (u64::MAX, true),
        },
        _ => (u64::MAX, true),
    }
}

/// The sample count guaranteeing error `ε` by the grid-plus-cloud recipe:
/// `m` is the smallest grid size whose envelope meets the target and
/// `n = (d+1)^{r−1}(m+1)^d`. For odd standard `r ≥ 3` the even-smoothness
/// fallback is also computed and the smaller count returned, flagged by
/// [`UpperRoute`]. The guarantee `envelope_closed ≤ ε` is checked
/// internally.
pub fn n_app_upper(epsilon: f64, d: usize, r: u32, kind: ClassKind) -> Result<UpperCount> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }
    if r < 1 || d < 1 {
        return Err(Error::InvalidInput("need r >= 1 and d >= 1".into()));
    }

    let direct = upper_with(epsilon, d, r, kind)?;
    if kind == ClassKind::Standard && r % 2 == 1 && r >= 3 {
        let fallback = upper_with(epsilon, d, r - 1, kind)?;
        if fallback.n < direct.n {
            return Ok(UpperCount {
                route: UpperRoute::EvenFallback,
                ..fallback
            });
        }
    }
    Ok(direct)
}

fn upper_with(epsilon: f64, d: usize, r: u32, kind: ClassKind) -> Result<UpperCount> {
    let m_real = grid_size_for(epsilon, d, r, kind);
    if !m_real.is_finite() || m_real >= 9.0e15 {
        return Ok(UpperCount {
            m: u64::MAX,
            n: u64::MAX,
            saturated: true,
            route: UpperRoute::Direct,
        });
    }
    let m = (m_real.ceil() as u64).max(1);
    if let Ok(m32) = u32::try_from(m) {
        assert!(
            envelope_closed(d, r, m32, kind) <= epsilon,
            "grid recipe must meet the requested accuracy"
        );
    }
    let (n, saturated) = count_for(m, d, r);
    Ok(UpperCount {
        m,
        n,
        saturated,
        route: UpperRoute::Direct,
    })
}

/// The largest sample count excluded by the fooling-function lower bound:
/// `⌈((5^r K̂)^{−1/r} √d ε^{−1/r})^d⌉ − 1`, clamped at zero and saturating
/// at `u64::MAX`. Requires `0 < ε < 1/K̂`.
pub fn n_app_lower(epsilon: f64, d: usize, r: u32, k_hat: f64) -> Result<u64> {
    if r < 1 || d < 1 {
        return Err(Error::InvalidInput("need r >= 1 and d >= 1".into()));
    }
    if k_hat < 1.0 {
        return Err(Error::InvalidInput(format!(
            "K estimate must be >= 1, got {k_hat}"
        )));
    }
    let threshold = 1.0 / k_hat;
    if !(epsilon > 0.0 && epsilon < threshold) {
        return Err(Error::EpsilonOutOfRange { epsilon, threshold });
    }
    let base = (5.0f64.powi(r as i32) * k_hat).powf(-1.0 / r as f64)
        * (d as f64).sqrt()
        * epsilon.powf(-1.0 / r as f64);
    // Shave a couple of ulps so float overshoot can never report a count
    // the exact bound does not exclude.
    let value = (base * (1.0 - 2e-15)).powi(d as i32);
    if !value.is_finite() || value >= u64::MAX as f64 {
        return Ok(u64::MAX);
    }
    Ok((value.ceil() as u64).saturating_sub(1))
}

/// Upper and lower sample counts for one `(ε, d, r, kind)` cell. The lower
/// bound is present when the fooling-function formula applies: directional
/// classes for every `r`, standard classes for `r ≥ 2` (by inclusion), and
/// only for `ε` below the `1/K̂` threshold.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexityCount {
    pub epsilon: f64,
    pub d: usize,
    pub r: u32,
    pub kind: ClassKind,
    pub n_upper: u64,
    pub m_used: u64,
    pub saturated: bool,
    pub route: UpperRoute,
    pub n_lower: Option<u64>,
    pub k_hat: Option<f64>,
}

pub fn complexity_count(
    epsilon: f64,
    d: usize,
    r: u32,
    kind: ClassKind,
    k_hat: Option<f64>,
) -> Result<ComplexityCount> {
    let upper = n_app_upper(epsilon, d, r, kind)?;
    let lower_applies = matches!(kind, ClassKind::Directional) || r >= 2;
    let n_lower = match k_hat {
        Some(k) if lower_applies && epsilon < 1.0 / k => Some(n_app_lower(epsilon, d, r, k)?),
        _ => None,
    };
    Ok(ComplexityCount {
        epsilon,
        d,
        r,
        kind,
        n_upper: upper.n,
        m_used: upper.m,
        saturated: upper.saturated,
        route: upper.route,
        n_lower,
        k_hat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        // even-r value
        let v = envelope_closed(4, 2, 5, ClassKind::Standard);
        assert!((v - E * 4.0 / 100.0).abs() < 1e-15);
        assert!((v - 0.108731).abs() < 1e-6);

        // odd-r value
        let v = envelope_closed(1, 3, 1, ClassKind::Standard);
        assert!((v - E / 8.0).abs() < 1e-15);
        assert!((v - 0.339785).abs() < 1e-6);

        // directional
        let v = envelope_closed(4, 2, 1, ClassKind::Directional);
        assert!((v - 1.0).abs() < 1e-15);

        // r = 0
        assert_eq!(envelope_closed(3, 0, 2, ClassKind::Standard), 1.0);
    }

    #[test]
    fn recursive_examples() {
        // one recursion step from the stated base cases:
        // E(2,2,1) = e/4 + (1/8)·1
        let v = envelope_recursive(2, 2, 1);
        assert!((v - (E / 4.0 + 0.125)).abs() < 1e-12);

        // d = 1 base case
        let v = envelope_recursive(1, 2, 3);
        assert!((v - E / 36.0).abs() < 1e-15);

        // r = 0
        assert_eq!(envelope_recursive(5, 0, 2), 1.0);
    }

    #[test]
    fn recursive_below_closed_for_even_r() {
        for d in 1..=6 {
            for r in [2u32, 4] {
                for m in 1..=8 {
                    let rec = envelope_recursive(d, r, m);
                    let closed = envelope_closed(d, r, m, ClassKind::Standard);
                    assert!(
                        rec <= closed * (1.0 + 1e-12),
                        "d={d} r={r} m={m}: {rec} > {closed}"
                    );
                }
            }
        }
    }

    #[test]
    fn odd_r_consistency_identity() {
        // odd closed form = (d/(2m)) · even closed form one order down
        for d in 1..=5 {
            for m in 1..=6 {
                for r in [3u32, 5] {
                    let odd = envelope_closed(d, r, m, ClassKind::Standard);
                    let composed = (d as f64 / (2.0 * m as f64))
                        * envelope_closed(d, r - 1, m, ClassKind::Standard);
                    assert!((odd - composed).abs() <= 1e-12 * composed.max(1.0));
                }
                // r = 1 composes with the even-form value e at order zero
                let odd = envelope_closed(d, 1, m, ClassKind::Standard);
                let composed = (d as f64 / (2.0 * m as f64)) * E;
                assert!((odd - composed).abs() <= 1e-12 * composed.max(1.0));
            }
        }
    }

    #[test]
    fn directional_below_standard() {
        for d in 1..=6 {
            for r in 0..=5u32 {
                for m in 1..=6 {
                    assert!(
                        envelope_closed(d, r, m, ClassKind::Directional)
                            <= envelope_closed(d, r, m, ClassKind::Standard) + 1e-15
                    );
                }
            }
        }
    }

    #[test]
    fn dimension_shape_for_even_r() {
        for r in [2u32, 4] {
            for m in [1u32, 3] {
                let base = envelope_closed(1, r, m, ClassKind::Standard);
                for d in 1..=6 {
                    let ratio = envelope_closed(d, r, m, ClassKind::Standard) / base;
                    let expect = (d as f64).powi((r / 2) as i32);
                    assert!((ratio - expect).abs() < 1e-12 * expect);
                }
            }
        }
    }

    #[test]
    fn directional_recursion_matches_closed_form() {
        for d in 1..=4 {
            for r in 0..=4u32 {
                for m in 1..=4 {
                    let a = envelope_recursive_directional(d, r, m);
                    let b = envelope_closed(d, r, m, ClassKind::Directional);
                    assert!((a - b).abs() <= 1e-14 * b.max(1.0));
                }
            }
        }
    }

    #[test]
    fn upper_count_worked_example() {
        // ε = 0.1, d = 2, r = 2, standard: m = ⌈3.687⌉ = 4, n = 3·25 = 75
        let c = n_app_upper(0.1, 2, 2, ClassKind::Standard).unwrap();
        assert_eq!(c.m, 4);
        assert_eq!(c.n, 75);
        assert!(!c.saturated);
        assert_eq!(c.route, UpperRoute::Direct);
        assert!(envelope_closed(2, 2, 4, ClassKind::Standard) <= 0.1);
    }

    #[test]
    fn upper_count_directional_example() {
        // ε = 0.25, d = 1, r = 1: m = ⌈0.5·4⌉ = 2, n = 3
        let c = n_app_upper(0.25, 1, 1, ClassKind::Directional).unwrap();
        assert_eq!(c.m, 2);
        assert_eq!(c.n, 3);
    }

    #[test]
    fn odd_r_upper_switches_to_even_fallback_in_high_dimension() {
        // at small ε the even recipe needs a much denser grid, so the odd
        // recipe wins; at large d the cheaper cloud factor wins instead
        let direct = n_app_upper(1e-6, 1, 3, ClassKind::Standard).unwrap();
        assert_eq!(direct.route, UpperRoute::Direct);

        let fallback = n_app_upper(0.3, 8, 3, ClassKind::Standard).unwrap();
        assert_eq!(fallback.route, UpperRoute::EvenFallback);
        let even = n_app_upper(0.3, 8, 2, ClassKind::Standard).unwrap();
        assert_eq!(fallback.n, even.n);
        assert_eq!(fallback.m, even.m);
    }

    #[test]
    fn upper_count_monotone_in_epsilon() {
        let mut prev = u64::MAX;
        for eps in [0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0] {
            let c = n_app_upper(eps, 3, 2, ClassKind::Standard).unwrap();
            assert!(c.n <= prev);
            prev = c.n;
        }
    }

    #[test]
    fn lower_count_examples() {
        // d=1, r=1: bound ≈ (1/(5K̂)) ε^{-1}
        let k = 3.0;
        let eps = 0.01;
        let got = n_app_lower(eps, 1, 1, k).unwrap();
        let raw = 1.0 / (5.0 * k * eps);
        assert_eq!(got, (raw.ceil() as u64) - 1);

        // grows without bound as ε shrinks
        let smaller = n_app_lower(1e-6, 1, 1, k).unwrap();
        assert!(smaller > got);

        // high-precision cross-check: (d=2, r=2, K̂=4, ε=0.001) simplifies
        // to ⌈(√2·(1/10)·ε^{-1/2})²⌉ - 1 = ⌈0.02/ε⌉ - 1
        let got = n_app_lower(0.001, 2, 2, 4.0).unwrap();
        let oracle = (0.02f64 / 0.001).ceil() as u64 - 1;
        assert_eq!(got, oracle);

        // domain error at or above the threshold
        assert!(matches!(
            n_app_lower(0.5, 2, 2, 4.0),
            Err(Error::EpsilonOutOfRange { .. })
        ));
    }

    #[test]
    fn lower_never_exceeds_upper() {
        for (d, r, eps) in [
            (1usize, 1u32, 0.05),
            (2, 2, 0.01),
            (3, 2, 0.02),
            (2, 3, 0.001),
            (4, 4, 0.0005),
        ] {
            let k_hat = 2.5;
            let c = complexity_count(eps, d, r, ClassKind::Directional, Some(k_hat)).unwrap();
            if let Some(lower) = c.n_lower {
                assert!(lower <= c.n_upper, "d={d} r={r} eps={eps}");
            }
        }
    }

    #[test]
    fn envelope_table_shape() {
        let table = build_envelope_table(2, 2, 4, ClassKind::Standard).unwrap();
        assert_eq!(table.rows.len(), 8);
        let csv = table.to_csv();
        assert!(csv.starts_with("d,r,m,kind,source,bound\n"));
        assert_eq!(csv.lines().count(), 9);
    }

    #[test]
    fn monotone_in_m_and_d() {
        for kind in [ClassKind::Standard, ClassKind::Directional] {
            for r in 1..=4u32 {
                for d in 1..=5 {
                    for m in 1..=7u32 {
                        assert!(
                            envelope_closed(d, r, m + 1, kind) < envelope_closed(d, r, m, kind)
                        );
                        assert!(
                            envelope_closed(d + 1, r, m, kind) >= envelope_closed(d, r, m, kind)
                        );
                    }
                }
            }
        }
    }
}
