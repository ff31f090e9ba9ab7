//! Sampling designs: regular grids, the proof-level cloud expansion `M[h]`
//! with boundary reflection and its doubling step schedule, and the
//! algorithm-level grid-plus-stencil recovery design.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::core::{
    binomial, check_point_budget, enumerate_multiindices, GridSpec, MultiIndex, Point,
};
use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// PointSet
// ---------------------------------------------------------------------------

/// A deduplicated, ordered set of points of `[0,1]^d`.
///
/// Deduplication is by bit-exact coordinate equality: grids and designs
/// always construct a given point through the same float expression, so
/// equal points are bit-identical.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointSet {
    d: usize,
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(d: usize) -> Result<Self> {
        if d < 1 {
            return Err(Error::InvalidInput("dimension d must be >= 1".into()));
        }
        Ok(Self { d, points: Vec::new() })
    }

    /// Builds a set from points in order, keeping the first occurrence of
    /// each duplicate.
    pub fn from_points(d: usize, points: impl IntoIterator<Item = Point>) -> Result<Self> {
        let mut set = Self::new(d)?;
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        for p in points {
            if p.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: p.dim(),
                });
            }
            if seen.insert(p.bit_key()) {
                set.points.push(p);
            }
        }
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = &Point> {
        self.points.iter()
    }

    pub fn contains(&self, p: &Point) -> bool {
        let key = p.bit_key();
        self.points.iter().any(|q| q.bit_key() == key)
    }
}

/// All `(m+1)^d` points of `Q_m^d` in lexicographic order (first coordinate
/// most significant).
pub fn build_grid(grid: &GridSpec) -> Result<PointSet> {
    check_point_budget(grid.point_count())?;
    let d = grid.d;
    let axis: Vec<f64> = (0..=grid.m).map(|k| grid.coord(k)).collect();
    let mut points = Vec::with_capacity(grid.point_count() as usize);
    let mut idx = vec![0usize; d];
    loop {
        points.push(Point::new(idx.iter().map(|&i| axis[i]).collect())?);
        // advance the mixed-radix counter, last coordinate fastest
        let mut pos = d;
        loop {
            if pos == 0 {
                return PointSet::from_points(d, points);
            }
            pos -= 1;
            if idx[pos] < grid.m as usize {
                idx[pos] += 1;
                break;
            }
            idx[pos] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// Cloud expansion
// ---------------------------------------------------------------------------

/// The cloud expansion `M[h]`: for every `x ∈ M` and every axis `j`, adds
/// `x + h e_j` when that stays in the cube and the reflected `x − h e_j`
/// otherwise. The result contains `M` and has at most `(d+1)|M|` points.
pub fn expand_cloud(m_set: &PointSet, h: f64) -> Result<PointSet> {
    if !(h > 0.0 && h <= 0.5) {
        return Err(Error::InvalidStep { h, max: 0.5 });
    }
    let d = m_set.dim();
    let mut points: Vec<Point> = m_set.points().to_vec();
    for x in m_set.iter() {
        for j in 0..d {
            let mut coords = x.coords().to_vec();
            let plus = coords[j] + h;
            coords[j] = if plus <= 1.0 { plus } else { coords[j] - h };
            points.push(Point::new(coords)?);
        }
    }
    PointSet::from_points(d, points)
}

// ---------------------------------------------------------------------------
// Proof schedule
// ---------------------------------------------------------------------------

/// The step schedule `h_i = 3 (δ/9)^{2^{i−1}}`, `i = 1..r−1`, used by the
/// iterated cloud construction. Satisfies `3 h_i = h_{i−1}^2`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProofSchedule {
    pub delta: f64,
    pub steps: Vec<f64>,
}

impl ProofSchedule {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Builds the schedule for smoothness `r`; empty for `r = 1`.
pub fn proof_schedule(delta: f64, r: u32) -> Result<ProofSchedule> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!(
            "delta must lie in (0,1), got {delta}"
        )));
    }
    if r < 1 {
        return Err(Error::InvalidInput("smoothness r must be >= 1".into()));
    }
    let base = delta / 9.0;
    let mut steps = Vec::with_capacity(r as usize - 1);
    // power = (delta/9)^{2^{i-1}} by repeated squaring
    let mut power = base;
    for _ in 1..r {
        let h = 3.0 * power;
        if h < 1e-300 {
            return Err(Error::Underflow { value: h });
        }
        steps.push(h);
        power *= power;
    }
    Ok(ProofSchedule { delta, steps })
}

/// The iterated cloud expansion `P = Q[h_1, …, h_{r−1}]`; returns `Q`
/// itself for `r = 1`. `|P| ≤ (d+1)^{r−1} |Q|`.
pub fn build_proof_pointset(q: &PointSet, delta: f64, r: u32) -> Result<PointSet> {
    let schedule = proof_schedule(delta, r)?;
    let mut p = q.clone();
    for &h in &schedule.steps {
        check_point_budget((p.len() as u128) * (q.dim() as u128 + 1))?;
        p = expand_cloud(&p, h)?;
    }
    Ok(p)
}

// ---------------------------------------------------------------------------
// Recovery design
// ---------------------------------------------------------------------------

/// Per-grid-point, per-axis stencil orientation: `+1` offsets step towards
/// larger coordinates, `−1` steps towards smaller ones (near the top face).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orientation {
    signs: Vec<i8>,
}

impl Orientation {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidInput("orientation entries must be ±1".into()));
        }
        Ok(Self { signs })
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn sign(&self, j: usize) -> f64 {
        self.signs[j] as f64
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// `Π_j σ_j^{β_j}`.
    pub fn sign_power(&self, beta: &MultiIndex) -> f64 {
        let mut s = 1.0;
        for j in 0..self.dim() {
            if beta.entry(j) % 2 == 1 {
                s *= self.signs[j] as f64;
            }
        }
        s
    }
}

/// The coordinate of a stencil point along one axis. Every construction and
/// lookup goes through this single expression so equal stencil points are
/// bit-identical.
pub(crate) fn stencil_coord(y: f64, sign: f64, h: f64, k: u32) -> f64 {
    y + sign * (h * k as f64)
}

pub(crate) fn stencil_point(y: &Point, offset: &MultiIndex, sigma: &Orientation, h: f64) -> Result<Point> {
    let coords = (0..y.dim())
        .map(|j| stencil_coord(y.get(j), sigma.sign(j), h, offset.entry(j)))
        .collect();
    Point::new(coords)
}

/// A regular grid plus a one-sided simplex stencil of divided-difference
/// offsets `{k ∈ N_0^d : |k| ≤ r−1}` at every grid point, oriented away
/// from the cube boundary.
#[derive(Clone, Debug)]
pub struct RecoveryDesign {
    grid: GridSpec,
    r: u32,
    h: f64,
    offsets: Vec<MultiIndex>,
    offset_index: HashMap<MultiIndex, usize>,
    grid_points: Vec<Point>,
    orientations: Vec<Orientation>,
    all_points: PointSet,
}

impl RecoveryDesign {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Stencil offsets `{k : |k| ≤ r−1}` in graded-lex order, shared by all
    /// grid points.
    pub fn offsets(&self) -> &[MultiIndex] {
        &self.offsets
    }

    pub fn offset_position(&self, beta: &MultiIndex) -> Option<usize> {
        self.offset_index.get(beta).copied()
    }

    /// Grid points in lexicographic order.
    pub fn grid_points(&self) -> &[Point] {
        &self.grid_points
    }

    pub fn orientation(&self, grid_idx: usize) -> &Orientation {
        &self.orientations[grid_idx]
    }

    /// Every sample point of the design, deduplicated.
    pub fn all_points(&self) -> &PointSet {
        &self.all_points
    }

    /// Total information cost `n = |all_points|`.
    pub fn n_points(&self) -> usize {
        self.all_points.len()
    }

    /// The sample location `y + h·(σ ⊙ k)` for grid point index `gi` and
    /// stencil offset `k`.
    pub fn sample_point(&self, gi: usize, offset: &MultiIndex) -> Result<Point> {
        stencil_point(&self.grid_points[gi], offset, &self.orientations[gi], self.h)
    }
}

/// Largest admissible step for a design: `1/(2m·max(r−1,1))`. Stencils built
/// with any `h` up to this value stay inside the grid point's own cell.
pub fn default_step(grid: &GridSpec, r: u32) -> f64 {
    1.0 / (2.0 * grid.m as f64 * (r.saturating_sub(1).max(1)) as f64)
}

/// Builds the recovery design for smoothness `r` with step `h`.
///
/// Orientation flips to `−1` on axis `j` exactly when `y_j + h(r−1) > 1`,
/// so all stencil points lie in the cube. The total point count is at most
/// `(d+1)^{r−1} (m+1)^d`.
pub fn build_recovery_design(grid: &GridSpec, r: u32, h: f64) -> Result<RecoveryDesign> {
    if r < 1 {
        return Err(Error::InvalidInput("smoothness r must be >= 1".into()));
    }
    let h_max = default_step(grid, r);
    if !(h > 0.0 && h <= h_max) {
        return Err(Error::InvalidStep { h, max: h_max });
    }
    let d = grid.d;
    let grid_points = build_grid(grid)?.points().to_vec();
    let offsets = enumerate_multiindices(d, r - 1);
    let offset_index: HashMap<MultiIndex, usize> = offsets
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, k)| (k, i))
        .collect();
    check_point_budget(grid.point_count() * offsets.len() as u128)?;

    let span = (r - 1) as f64;
    let mut orientations = Vec::with_capacity(grid_points.len());
    let mut flat = Vec::with_capacity(grid_points.len() * offsets.len());
    for y in &grid_points {
        let signs: Vec<i8> = (0..d)
            .map(|j| if y.get(j) + h * span <= 1.0 { 1 } else { -1 })
            .collect();
        let sigma = Orientation::new(signs)?;
        for k in &offsets {
            flat.push(stencil_point(y, k, &sigma, h)?);
        }
        orientations.push(sigma);
    }
    let all_points = PointSet::from_points(d, flat)?;

    let budget = binomial((d + r as usize - 1) as u64, d as u64) * grid.point_count();
    debug_assert!(all_points.len() as u128 <= budget);

    Ok(RecoveryDesign {
        grid: *grid,
        r,
        h,
        offsets,
        offset_index,
        grid_points,
        orientations,
        all_points,
    })
}

/// Serializable form of a design: the JSON document emitted by the `design`
/// subcommand and accepted by the `adversary` subcommand.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DesignDocument {
    pub grid: GridSpec,
    pub r: u32,
    pub h: f64,
    pub points: Vec<Vec<f64>>,
}

impl From<&RecoveryDesign> for DesignDocument {
    fn from(design: &RecoveryDesign) -> Self {
        DesignDocument {
            grid: *design.grid(),
            r: design.r(),
            h: design.h(),
            points: design
                .all_points()
                .iter()
                .map(|p| p.coords().to_vec())
                .collect(),
        }
    }
}

impl DesignDocument {
    pub fn point_set(&self) -> Result<PointSet> {
        PointSet::from_points(
            self.grid.d,
            self.points
                .iter()
                .map(|c| Point::new(c.clone()))
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::GridSpec;

    #[test]
    fn grid_examples() {
        let g = build_grid(&GridSpec::new(2, 1).unwrap()).unwrap();
        let coords: Vec<f64> = g.iter().map(|p| p.get(0)).collect();
        assert_eq!(coords, vec![0.0, 0.5, 1.0]);

        let g = build_grid(&GridSpec::new(1, 3).unwrap()).unwrap();
        assert_eq!(g.len(), 8);
        assert!(g.iter().all(|p| p.coords().iter().all(|&c| c == 0.0 || c == 1.0)));

        let g = build_grid(&GridSpec::new(2, 2).unwrap()).unwrap();
        assert_eq!(g.len(), 9);
    }

    #[test]
    fn grid_lexicographic_order() {
        let g = build_grid(&GridSpec::new(1, 2).unwrap()).unwrap();
        let coords: Vec<Vec<f64>> = g.iter().map(|p| p.coords().to_vec()).collect();
        assert_eq!(
            coords,
            vec![
                vec![0.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0]
            ]
        );
    }

    #[test]
    fn cloud_reflection_example() {
        let m = PointSet::from_points(2, vec![Point::new(vec![0.0, 1.0]).unwrap()]).unwrap();
        let got = expand_cloud(&m, 0.25).unwrap();
        let coords: Vec<Vec<f64>> = got.iter().map(|p| p.coords().to_vec()).collect();
        assert_eq!(
            coords,
            vec![vec![0.0, 1.0], vec![0.25, 1.0], vec![0.0, 0.75]]
        );
    }

    #[test]
    fn cloud_interior_point() {
        let m = PointSet::from_points(1, vec![Point::new(vec![0.5]).unwrap()]).unwrap();
        let got = expand_cloud(&m, 0.25).unwrap();
        let coords: Vec<f64> = got.iter().map(|p| p.get(0)).collect();
        assert_eq!(coords, vec![0.5, 0.75]);
    }

    #[test]
    fn cloud_cardinality_bound() {
        let q = build_grid(&GridSpec::new(1, 2).unwrap()).unwrap();
        let got = expand_cloud(&q, 0.1).unwrap();
        assert!(got.len() <= 3 * 4);
        for p in q.iter() {
            assert!(got.contains(p));
        }
    }

    #[test]
    fn schedule_example_and_recurrence() {
        let s = proof_schedule(0.9, 3).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.steps[0] - 0.3).abs() < 1e-15);
        assert!((s.steps[1] - 0.03).abs() < 1e-15);
        assert!((3.0 * s.steps[1] - s.steps[0] * s.steps[0]).abs() < 1e-15);

        let s = proof_schedule(0.9, 2).unwrap();
        assert_eq!(s.steps.len(), 1);
        assert!((s.steps[0] - 0.3).abs() < 1e-15);

        assert!(proof_schedule(1.5, 3).is_err());
        // deep schedules underflow
        assert!(matches!(
            proof_schedule(0.9, 12),
            Err(Error::Underflow { .. })
        ));
    }

    #[test]
    fn proof_pointset_examples() {
        // r = 1: P = Q
        let q = build_grid(&GridSpec::new(2, 2).unwrap()).unwrap();
        let p = build_proof_pointset(&q, 0.9, 1).unwrap();
        assert_eq!(p.len(), q.len());

        // cardinality bound (d+1)^{r-1} |Q|
        let p = build_proof_pointset(&q, 0.9, 3).unwrap();
        assert!(p.len() <= 9 * 9);

        // single cloud step in d = 1
        let q = PointSet::from_points(1, vec![Point::new(vec![0.5]).unwrap()]).unwrap();
        let p = build_proof_pointset(&q, 0.9, 2).unwrap();
        let coords: Vec<f64> = p.iter().map(|x| x.get(0)).collect();
        assert_eq!(coords.len(), 2);
        assert!((coords[0] - 0.5).abs() < 1e-15);
        assert!((coords[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn design_orientation_example() {
        // m=1, d=1, r=2, h=0.1: stencil at 0 is {0, 0.1}, at 1 is {1, 0.9}
        let grid = GridSpec::new(1, 1).unwrap();
        let design = build_recovery_design(&grid, 2, 0.1).unwrap();
        let pts: Vec<f64> = design.all_points().iter().map(|p| p.get(0)).collect();
        assert_eq!(pts, vec![0.0, 0.1, 1.0, 0.9]);
        assert_eq!(design.orientation(0).signs(), &[1]);
        assert_eq!(design.orientation(1).signs(), &[-1]);
    }

    #[test]
    fn design_r1_is_bare_grid() {
        let grid = GridSpec::new(2, 2).unwrap();
        let design = build_recovery_design(&grid, 1, default_step(&grid, 1)).unwrap();
        assert_eq!(design.n_points(), 9);
        assert_eq!(design.offsets().len(), 1);
    }

    #[test]
    fn design_stencil_size_and_budget() {
        let grid = GridSpec::new(1, 2).unwrap();
        let design = build_recovery_design(&grid, 3, 0.05).unwrap();
        assert_eq!(design.offsets().len(), 6); // binomial(4,2)
        assert!(design.offsets().len() as u128 <= 9); // (d+1)^{r-1}
        assert!(design.n_points() as u128 <= 9 * 4);
    }

    #[test]
    fn design_rejects_oversized_step() {
        let grid = GridSpec::new(2, 1).unwrap();
        assert!(matches!(
            build_recovery_design(&grid, 3, 0.3),
            Err(Error::InvalidStep { .. })
        ));
    }

    #[test]
    fn design_points_stay_inside_cube() {
        for (m, d, r) in [(1u32, 1usize, 2u32), (2, 2, 3), (3, 2, 4), (1, 3, 3)] {
            let grid = GridSpec::new(m, d).unwrap();
            let h = default_step(&grid, r);
            let design = build_recovery_design(&grid, r, h).unwrap();
            for p in design.all_points().iter() {
                for &c in p.coords() {
                    assert!((0.0..=1.0).contains(&c));
                }
            }
        }
    }

    #[test]
    fn design_document_roundtrip() {
        let grid = GridSpec::new(1, 2).unwrap();
        let design = build_recovery_design(&grid, 2, 0.2).unwrap();
        let doc = DesignDocument::from(&design);
        let json = serde_json::to_string(&doc).unwrap();
        let back: DesignDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back.point_set().unwrap().len(), design.n_points());
    }
}
