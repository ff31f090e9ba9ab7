//! Foundational domain types shared by every other module: multi-indices,
//! points of the unit cube, regular grids, smoothness classes, and sample
//! tables.
//!
//! Everything here is immutable after construction and every operation is
//! pure, so values can be shared freely across workers.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for accepting coordinates as members of `[0, 1]`.
pub const COORD_TOL: f64 = 1e-12;

/// Sample-table keys are coordinates rounded to this resolution.
pub const DEDUP_RESOLUTION: f64 = 1e-14;

/// Default cap on the number of points any single operation may materialize.
pub const DEFAULT_POINT_CAP: u128 = 100_000_000;

/// Environment variable overriding [`DEFAULT_POINT_CAP`].
pub const POINT_CAP_ENV: &str = "CUBEREC_MAX_POINTS";

/// Effective point-count cap: `CUBEREC_MAX_POINTS` if set and parseable,
/// otherwise [`DEFAULT_POINT_CAP`].
pub fn point_cap() -> u128 {
    std::env::var(POINT_CAP_ENV)
        .ok()
        .and_then(|s| s.parse::<u128>().ok())
        .unwrap_or(DEFAULT_POINT_CAP)
}

pub(crate) fn check_point_budget(points: u128) -> Result<()> {
    let cap = point_cap();
    if points > cap {
        return Err(Error::ResourceExhausted { points, cap });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// MultiIndex
// ---------------------------------------------------------------------------

/// A derivative order `β ∈ N_0^d`. Indexes Taylor coefficients and stencil
/// offsets; the total order `|β| = Σ β_j` is cached at construction.
///
/// Serializes as a plain JSON array of integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct MultiIndex {
    entries: Vec<u32>,
    order: u32,
}

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        assert!(!entries.is_empty(), "multi-index must have dimension >= 1");
        let order = entries.iter().sum();
        Self { entries, order }
    }

    pub fn zero(d: usize) -> Self {
        Self::new(vec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// Total order `|β|`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn entry(&self, j: usize) -> u32 {
        self.entries[j]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.order == 0
    }

    /// Componentwise `self ≤ other`.
    pub fn leq(&self, other: &MultiIndex) -> bool {
        self.dim() == other.dim()
            && self
                .entries
                .iter()
                .zip(other.entries.iter())
                .all(|(a, b)| a <= b)
    }
}

impl TryFrom<Vec<u32>> for MultiIndex {
    type Error = Error;

    fn try_from(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("multi-index must have dimension >= 1".into()));
        }
        Ok(Self::new(entries))
    }
}

impl From<MultiIndex> for Vec<u32> {
    fn from(beta: MultiIndex) -> Self {
        beta.entries
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// `binomial(n, k)` in exact integer arithmetic.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// All `β ∈ N_0^d` with `|β| ≤ k_max`, in graded lexicographic order:
/// ascending total order, and within one total order descending
/// lexicographic on the entry tuples (so for d=2, k=1 the order is
/// `(0,0), (1,0), (0,1)`).
///
/// The result has exactly `binomial(d + k_max, d)` elements.
pub fn enumerate_multiindices(d: usize, k_max: u32) -> Vec<MultiIndex> {
    assert!(d >= 1, "dimension must be >= 1");
    let mut out = Vec::with_capacity(binomial((d + k_max as usize) as u64, d as u64) as usize);
    let mut current = vec![0u32; d];
    for degree in 0..=k_max {
        push_fixed_degree(&mut out, &mut current, 0, degree);
    }
    out
}

fn push_fixed_degree(out: &mut Vec<MultiIndex>, current: &mut Vec<u32>, pos: usize, rest: u32) {
    if pos == current.len() - 1 {
        current[pos] = rest;
        out.push(MultiIndex::new(current.clone()));
        return;
    }
    for e in (0..=rest).rev() {
        current[pos] = e;
        push_fixed_degree(out, current, pos + 1, rest - e);
    }
}

/// `1/β!` where `β! = Π β_j!`.
///
/// Signals overflow if the factorial leaves the exactly-representable
/// integer range; any order up to 20 per entry is safe.
pub fn factorial_weight(beta: &MultiIndex) -> Result<f64> {
    let mut acc: u128 = 1;
    for &e in beta.entries() {
        for i in 2..=e as u128 {
            acc = acc.checked_mul(i).ok_or(Error::FactorialOverflow {
                order: beta.order() as u64,
            })?;
        }
    }
    Ok(1.0 / acc as f64)
}

/// `β!` as a float; exact for the orders used anywhere in this crate.
pub(crate) fn factorial_of(beta: &MultiIndex) -> f64 {
    let mut acc: f64 = 1.0;
    for &e in beta.entries() {
        for i in 2..=e as u64 {
            acc *= i as f64;
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Point
// ---------------------------------------------------------------------------

/// A point of the unit cube `[0,1]^d`. Serializes as a JSON array of reals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    /// Builds a point, accepting coordinates within [`COORD_TOL`] of the
    /// cube and clamping them onto it.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("point must have dimension >= 1".into()));
        }
        let mut clamped = coords;
        for c in clamped.iter_mut() {
            if !c.is_finite() || *c < -COORD_TOL || *c > 1.0 + COORD_TOL {
                return Err(Error::InvalidInput(format!(
                    "coordinate {c} outside [0,1] (tolerance {COORD_TOL:e})"
                )));
            }
            *c = c.clamp(0.0, 1.0);
        }
        Ok(Self { coords: clamped })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn get(&self, j: usize) -> f64 {
        self.coords[j]
    }

    /// Bit-exact identity key (grid and design constructions always produce
    /// the same float for the same point, so this deduplicates exactly).
    pub fn bit_key(&self) -> Vec<u64> {
        self.coords.iter().map(|c| c.to_bits()).collect()
    }

    /// Key after rounding coordinates to [`DEDUP_RESOLUTION`].
    pub fn rounded_key(&self) -> Vec<i64> {
        self.coords
            .iter()
            .map(|c| (c / DEDUP_RESOLUTION).round() as i64)
            .collect()
    }

    pub fn dist2_sq(&self, other: &Point) -> f64 {
        dist_sq(&self.coords, other.coords())
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Self::new(coords)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.coords
    }
}

pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| {
            let t = x - y;
            t * t
        })
        .sum()
}

// ---------------------------------------------------------------------------
// GridSpec
// ---------------------------------------------------------------------------

/// The regular grid `Q_m^d = {0, 1/m, ..., 1}^d` with `(m+1)^d` points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub m: u32,
    pub d: usize,
}

impl GridSpec {
    pub fn new(m: u32, d: usize) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidInput("grid subdivisions m must be >= 1".into()));
        }
        if d < 1 {
            return Err(Error::InvalidInput("dimension d must be >= 1".into()));
        }
        Ok(Self { m, d })
    }

    /// `(m+1)^d`, exact.
    pub fn point_count(&self) -> u128 {
        (self.m as u128 + 1).pow(self.d as u32)
    }

    /// The k-th grid coordinate `k/m`, evaluated once so equal grid points
    /// are always bit-identical.
    pub fn coord(&self, k: u32) -> f64 {
        k as f64 / self.m as f64
    }

    /// Per-axis nearest grid index of `x`, ties rounding up.
    pub fn nearest_index(&self, x: f64) -> u32 {
        let k = (x * self.m as f64 + 0.5).floor();
        (k.max(0.0) as u32).min(self.m)
    }

    /// Flat lexicographic index (first coordinate most significant) of a
    /// per-axis index vector.
    pub fn flat_index(&self, idx: &[u32]) -> usize {
        let base = self.m as usize + 1;
        idx.iter().fold(0usize, |acc, &i| acc * base + i as usize)
    }
}

/// Nearest point of `Q_m^d` to `x` in the max norm; each coordinate moves by
/// at most `1/(2m)` and exact half-way ties round up.
pub fn nearest_grid_point(x: &Point, grid: &GridSpec) -> Point {
    debug_assert_eq!(x.dim(), grid.d);
    let coords = x
        .coords()
        .iter()
        .map(|&c| grid.coord(grid.nearest_index(c)))
        .collect();
    Point { coords }
}

// ---------------------------------------------------------------------------
// SmoothnessClass
// ---------------------------------------------------------------------------

/// Which family of unit balls a statement refers to: all partial
/// derivatives bounded by one (`Standard`), or all directional derivatives
/// bounded by one (`Directional`, a subset of `Standard`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassKind {
    Standard,
    Directional,
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassKind::Standard => write!(f, "standard"),
            ClassKind::Directional => write!(f, "directional"),
        }
    }
}

impl std::str::FromStr for ClassKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "standard" => Ok(ClassKind::Standard),
            "directional" => Ok(ClassKind::Directional),
            other => Err(Error::InvalidInput(format!(
                "unknown class kind {other:?} (expected \"standard\" or \"directional\")"
            ))),
        }
    }
}

/// A smoothness class on `[0,1]^d`: order `r`, dimension `d`, and the kind
/// of derivative bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothnessClass {
    pub r: u32,
    pub d: usize,
    pub kind: ClassKind,
}

impl SmoothnessClass {
    pub fn new(r: u32, d: usize, kind: ClassKind) -> Result<Self> {
        if d < 1 {
            return Err(Error::InvalidInput("dimension d must be >= 1".into()));
        }
        Ok(Self { r, d, kind })
    }
}

// ---------------------------------------------------------------------------
// SampleTable
// ---------------------------------------------------------------------------

/// Function values keyed by sample point. Points are deduplicated by exact
/// coordinate equality after rounding to [`DEDUP_RESOLUTION`]; only finite
/// values are accepted.
#[derive(Clone, Debug)]
pub struct SampleTable {
    provenance: String,
    points: Vec<Point>,
    values: Vec<f64>,
    index: HashMap<Vec<i64>, usize>,
}

impl SampleTable {
    pub fn new(provenance: impl Into<String>) -> Self {
        Self {
            provenance: provenance.into(),
            points: Vec::new(),
            values: Vec::new(),
            index: HashMap::new(),
        }
    }

    /// Samples `f` at every point of an iterator.
    pub fn sample<'a, F>(
        provenance: impl Into<String>,
        points: impl IntoIterator<Item = &'a Point>,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
    {
        let mut table = Self::new(provenance);
        for p in points {
            table.insert(p.clone(), f(p.coords()))?;
        }
        Ok(table)
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Inserts a value; re-inserting an equal (rounded) point overwrites.
    pub fn insert(&mut self, point: Point, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::NonFinite { value });
        }
        match self.index.entry(point.rounded_key()) {
            std::collections::hash_map::Entry::Occupied(e) => {
                self.values[*e.get()] = value;
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(self.points.len());
                self.points.push(point);
                self.values.push(value);
            }
        }
        Ok(())
    }

    pub fn get(&self, point: &Point) -> Option<f64> {
        self.index.get(&point.rounded_key()).map(|&i| self.values[i])
    }

    /// Like [`SampleTable::get`] but reports the absent point on failure.
    pub fn require(&self, point: &Point) -> Result<f64> {
        self.get(point).ok_or_else(|| Error::MissingSample {
            point: point.coords().to_vec(),
        })
    }

    /// Number of stored samples (the information cost `n`).
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, f64)> {
        self.points.iter().zip(self.values.iter().copied())
    }
}
