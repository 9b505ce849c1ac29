//! Seeded noisy samples of planar 1-complexes with a known number of holes.

use std::f64::consts::PI;
use std::io::Read;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::Diagram;
use crate::delaunay::Cloud;
use crate::forest;
use crate::geom::{self, Point2};
use crate::io::{self, IoError};

/// A shape made of straight segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeSpec {
    /// Regular polygon of circumradius `radius` centred at the origin, with
    /// the radii to all of its vertices.
    Wheel { spokes: usize, radius: f64 },
    /// Grid of `rows * cols` square cells of side `cell`, lower left corner
    /// at the origin.
    Lattice { rows: usize, cols: usize, cell: f64 },
    /// Closed polygon through `points`.
    Polygon { points: Vec<Point2> },
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid shape: {0}")]
    InvalidSpec(String),
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("noise must be finite and nonnegative, got {0}")]
    InvalidNoise(f64),
}

/// Estimated two-sided Hausdorff distance between a cloud and its shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleQuality {
    pub epsilon: f64,
}

impl ShapeSpec {
    /// Number of bounded complement components.
    pub fn hole_count(&self) -> usize {
        match *self {
            ShapeSpec::Wheel { spokes, .. } => spokes,
            ShapeSpec::Lattice { rows, cols, .. } => rows * cols,
            ShapeSpec::Polygon { .. } => 1,
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::InvalidSpec(m.to_string()));
        match self {
            ShapeSpec::Wheel { spokes, radius } => {
                if *spokes < 3 {
                    return bad("a wheel needs at least 3 spokes");
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return bad("wheel radius must be positive");
                }
            }
            ShapeSpec::Lattice { rows, cols, cell } => {
                if *rows == 0 || *cols == 0 {
                    return bad("a lattice needs at least one row and one column");
                }
                if !(cell.is_finite() && *cell > 0.0) {
                    return bad("lattice cell must be positive");
                }
            }
            ShapeSpec::Polygon { points } => {
                if points.len() < 3 {
                    return bad("a polygon needs at least 3 vertices");
                }
                if !points.iter().all(Point2::is_finite) {
                    return bad("polygon vertices must be finite");
                }
                let n = points.len();
                if (0..n).any(|i| points[i] == points[(i + 1) % n]) {
                    return bad("polygon has a repeated consecutive vertex");
                }
                let first = points[0];
                if points.iter().all(|&p| geom::orient2d(first, points[1], p) == geom::Orientation::Collinear) {
                    return bad("polygon vertices are collinear");
                }
            }
        }
        Ok(())
    }

    /// The segments making up the shape.
    pub fn segments(&self) -> Result<Vec<[Point2; 2]>, SynthError> {
        self.validate()?;
        Ok(match self {
            ShapeSpec::Wheel { spokes, radius } => {
                let k = *spokes;
                let rim: Vec<Point2> = (0..k)
                    .map(|i| {
                        let t = 2.0 * PI * i as f64 / k as f64;
                        Point2::new(radius * t.cos(), radius * t.sin())
                    })
                    .collect();
                let centre = Point2::new(0.0, 0.0);
                (0..k).flat_map(|i| [[rim[i], rim[(i + 1) % k]], [centre, rim[i]]]).collect()
            }
            ShapeSpec::Lattice { rows, cols, cell } => {
                let (w, h) = (*cols as f64 * cell, *rows as f64 * cell);
                let horizontal =
                    (0..=*rows).map(|r| r as f64 * cell).map(|y| [Point2::new(0.0, y), Point2::new(w, y)]);
                let vertical =
                    (0..=*cols).map(|c| c as f64 * cell).map(|x| [Point2::new(x, 0.0), Point2::new(x, h)]);
                horizontal.chain(vertical).collect()
            }
            ShapeSpec::Polygon { points } => {
                let n = points.len();
                (0..n).map(|i| [points[i], points[(i + 1) % n]]).collect()
            }
        })
    }
}

fn length(s: &[Point2; 2]) -> f64 {
    geom::squared_distance(s[0], s[1]).sqrt()
}

fn lerp(s: &[Point2; 2], t: f64) -> Point2 {
    Point2::new(s[0].x + t * (s[1].x - s[0].x), s[0].y + t * (s[1].y - s[0].y))
}

/// `n` points at i.i.d. uniform arc-length positions on the shape, each moved
/// by an offset drawn uniformly from the disk of radius `noise`.
pub fn sample_shape(spec: &ShapeSpec, n: usize, noise: f64, seed: u64) -> Result<Cloud, SynthError> {
    if n < 3 {
        return Err(SynthError::TooFewPoints(n));
    }
    if !(noise.is_finite() && noise >= 0.0) {
        return Err(SynthError::InvalidNoise(noise));
    }
    let segments = spec.segments()?;
    let mut cumulative = Vec::with_capacity(segments.len());
    let mut total = 0.0;
    for s in &segments {
        total += length(s);
        cumulative.push(total);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..n)
        .map(|_| {
            let u = rng.gen::<f64>() * total;
            let i = cumulative.partition_point(|&c| c <= u).min(segments.len() - 1);
            let start = if i == 0 { 0.0 } else { cumulative[i - 1] };
            let t = ((u - start) / length(&segments[i])).clamp(0.0, 1.0);
            let p = lerp(&segments[i], t);
            if noise == 0.0 {
                return p;
            }
            let r = noise * rng.gen::<f64>().sqrt();
            let theta = 2.0 * PI * rng.gen::<f64>();
            Point2::new(p.x + r * theta.cos(), p.y + r * theta.sin())
        })
        .collect();
    Ok(Cloud::new(pts).expect("finite shape and noise give finite points"))
}

/// Evenly spaced points along every segment, consecutive points at most
/// `spacing` apart, endpoints included.
pub fn discretize(segments: &[[Point2; 2]], spacing: f64) -> Vec<Point2> {
    let mut out = Vec::new();
    for s in segments {
        let steps = (length(s) / spacing).ceil().max(1.0) as usize;
        out.extend((0..=steps).map(|j| lerp(s, j as f64 / steps as f64)));
    }
    out
}

/// Distance from `p` to the segment `s`.
pub fn distance_to_segment(p: Point2, s: &[Point2; 2]) -> f64 {
    let (dx, dy) = (s[1].x - s[0].x, s[1].y - s[0].y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.x - s[0].x) * dx + (p.y - s[0].y) * dy) / len2).clamp(0.0, 1.0) };
    geom::squared_distance(p, lerp(s, t)).sqrt()
}

/// Bucket grid for nearest-neighbour queries.
struct Grid<'a> {
    pts: &'a [Point2],
    origin: Point2,
    cell: f64,
    dims: (usize, usize),
    buckets: Vec<Vec<usize>>,
}

impl<'a> Grid<'a> {
    fn new(pts: &'a [Point2]) -> Self {
        let (mut lo, mut hi) = (Point2::new(f64::INFINITY, f64::INFINITY), Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in pts {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let extent = (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE);
        let side = (pts.len() as f64).sqrt().ceil().max(1.0);
        let cell = extent / side;
        let dims = (((hi.x - lo.x) / cell) as usize + 1, ((hi.y - lo.y) / cell) as usize + 1);
        let mut buckets = vec![Vec::new(); dims.0 * dims.1];
        for (i, p) in pts.iter().enumerate() {
            let (cx, cy) = (((p.x - lo.x) / cell) as usize, ((p.y - lo.y) / cell) as usize);
            buckets[cy.min(dims.1 - 1) * dims.0 + cx.min(dims.0 - 1)].push(i);
        }
        Grid { pts, origin: lo, cell, dims, buckets }
    }

    fn nearest_distance(&self, q: Point2) -> f64 {
        let cx = ((q.x - self.origin.x) / self.cell).floor() as i64;
        let cy = ((q.y - self.origin.y) / self.cell).floor() as i64;
        let (w, h) = (self.dims.0 as i64, self.dims.1 as i64);
        // clamp the start cell into the grid; ring r then covers every point
        // whose cell offset from it is at most r
        let (sx, sy) = (cx.clamp(0, w - 1), cy.clamp(0, h - 1));
        let outside = (cx - sx).abs().max((cy - sy).abs()) as f64 * self.cell;
        let mut best = f64::INFINITY;
        for r in 0..=w.max(h) {
            for y in (sy - r)..=(sy + r) {
                for x in (sx - r)..=(sx + r) {
                    if (x - sx).abs() != r && (y - sy).abs() != r {
                        continue;
                    }
                    if x < 0 || y < 0 || x >= w || y >= h {
                        continue;
                    }
                    for &i in &self.buckets[(y * w + x) as usize] {
                        best = best.min(geom::squared_distance(q, self.pts[i]));
                    }
                }
            }
            // points in rings beyond r are at least r cells away from q's cell
            let reach = (r as f64 * self.cell - outside).max(0.0);
            if best.is_finite() && best.sqrt() <= reach {
                break;
            }
        }
        best.sqrt()
    }
}

/// Estimate of the two-sided Hausdorff distance between `cloud` and the shape.
///
/// The shape side is taken over a discretization ten times denser than the
/// mean cloud spacing, plus half that spacing to cover the gaps.
pub fn epsilon_of_sample(cloud: &Cloud, spec: &ShapeSpec) -> Result<SampleQuality, SynthError> {
    let segments = spec.segments()?;
    let total: f64 = segments.iter().map(length).sum();
    let spacing = total / cloud.len().max(1) as f64 / 10.0;
    let grid = Grid::new(cloud.points());
    let shape_side = discretize(&segments, spacing)
        .into_iter()
        .map(|q| grid.nearest_distance(q))
        .fold(0.0, f64::max)
        + 0.5 * spacing;
    let cloud_side = cloud
        .points()
        .iter()
        .map(|&p| segments.iter().map(|s| distance_to_segment(p, s)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    Ok(SampleQuality { epsilon: shape_side.max(cloud_side) })
}

/// Smallest and largest homological feature size of the shape.
///
/// Runs the pipeline on a dense noise-free sample and reads the deaths of
/// pairs that persist well beyond the sampling spacing.
pub fn shape_feature_sizes(spec: &ShapeSpec) -> Result<(f64, f64), SynthError> {
    let segments = spec.segments()?;
    let total: f64 = segments.iter().map(length).sum();
    let spacing = total / 20_000.0;
    let cloud = Cloud::new(discretize(&segments, spacing)).expect("finite shape");
    let diagram = forest::run_hoctop(&cloud).map_err(|e| SynthError::InvalidSpec(e.to_string()))?;
    let deaths: Vec<f64> = significant(&diagram, 2.0 * spacing).map(|p| p.death).collect();
    if deaths.is_empty() {
        return Err(SynthError::InvalidSpec("shape has no holes".into()));
    }
    let min = deaths.iter().copied().fold(f64::INFINITY, f64::min);
    let max = deaths.iter().copied().fold(0.0, f64::max);
    Ok((min, max))
}

fn significant(d: &Diagram, threshold: f64) -> impl Iterator<Item = &forest::PersistencePair> {
    d.pairs().iter().filter(move |p| p.persistence() > threshold)
}

/// Whether `epsilon` satisfies `minhfs > maxhfs / 2 + 4 epsilon`.
pub fn guarantee_holds(feature_sizes: (f64, f64), epsilon: f64) -> bool {
    feature_sizes.0 > 0.5 * feature_sizes.1 + 4.0 * epsilon
}

/// Polygon whose vertices are read from `x,y` lines.
pub fn polygon_from_csv<R: Read>(r: R) -> Result<ShapeSpec, IoError> {
    Ok(ShapeSpec::Polygon { points: io::read_points(r)? })
}
