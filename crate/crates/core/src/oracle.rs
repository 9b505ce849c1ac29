//! Slow ground truth for the sweep.
//!
//! Two independent routes: the filtered Delaunay complex reduced as a Z/2
//! boundary matrix, and a raster of the union of disks whose bounded
//! complement components are counted by flood fill. Neither touches
//! [`crate::forest`].

use std::collections::{HashMap, VecDeque};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytics::{staircase, Diagram, Staircase};
use crate::delaunay::{self, Cloud, TriangulationError};
use crate::forest::{self, PersistencePair};
use crate::geom::{self, Point2};

#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    /// Sorted vertex indices; 1, 2 or 3 of them.
    pub vertices: Vec<usize>,
    pub value: f64,
}

impl Simplex {
    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// Simplices of the Delaunay triangulation sorted by `(value, dimension)`,
/// ties broken by vertex indices.
#[derive(Debug, Clone)]
pub struct AlphaFiltration {
    pub simplices: Vec<Simplex>,
}

/// Entry values: vertices at 0, edges at half their length, acute triangles
/// at their circumradius and the others at half their longest side.
pub fn alpha_filtration(cloud: &Cloud) -> Result<AlphaFiltration, TriangulationError> {
    let tri = delaunay::triangulate(cloud)?;
    let pts = tri.vertices();
    let mut simplices: Vec<Simplex> =
        (0..pts.len()).map(|v| Simplex { vertices: vec![v], value: 0.0 }).collect();
    for e in tri.edges() {
        let [a, b] = e.endpoints;
        let len = geom::squared_distance(pts[a], pts[b]).sqrt();
        simplices.push(Simplex { vertices: vec![a, b], value: 0.5 * len });
    }
    for t in tri.triangles() {
        let [a, b, c] = t.map(|v| pts[v]);
        let half_longest = 0.5
            * geom::squared_distance(a, b)
                .max(geom::squared_distance(b, c))
                .max(geom::squared_distance(c, a))
                .sqrt();
        let value = if geom::is_acute(a, b, c).expect("proper triangle") {
            geom::circumradius(a, b, c).expect("proper triangle").max(half_longest)
        } else {
            half_longest
        };
        let mut vertices = t.to_vec();
        vertices.sort_unstable();
        simplices.push(Simplex { vertices, value });
    }
    simplices.sort_by(|s, t| {
        s.value
            .total_cmp(&t.value)
            .then(s.dimension().cmp(&t.dimension()))
            .then_with(|| s.vertices.cmp(&t.vertices))
    });
    Ok(AlphaFiltration { simplices })
}

/// One-dimensional persistence by left-to-right column reduction over Z/2.
pub fn reduce_boundary_matrix(f: &AlphaFiltration) -> Diagram {
    let index: HashMap<&[usize], usize> =
        f.simplices.iter().enumerate().map(|(i, s)| (s.vertices.as_slice(), i)).collect();
    let mut columns: Vec<Vec<usize>> = f
        .simplices
        .iter()
        .map(|s| {
            if s.vertices.len() == 1 {
                return Vec::new();
            }
            let mut col: Vec<usize> = (0..s.vertices.len())
                .map(|skip| {
                    let face: Vec<usize> =
                        s.vertices.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                    index[face.as_slice()]
                })
                .collect();
            col.sort_unstable();
            col
        })
        .collect();

    let mut owner_of_low: HashMap<usize, usize> = HashMap::new();
    let mut pairs = Vec::new();
    for j in 0..columns.len() {
        while let Some(&low) = columns[j].last() {
            let Some(&i) = owner_of_low.get(&low) else { break };
            let reduced = symmetric_difference(&columns[j], &columns[i]);
            columns[j] = reduced;
        }
        if let Some(&low) = columns[j].last() {
            owner_of_low.insert(low, j);
            if f.simplices[j].dimension() == 2 {
                pairs.push(PersistencePair::new(f.simplices[low].value, f.simplices[j].value));
            }
        }
    }
    let essential = f
        .simplices
        .iter()
        .enumerate()
        .filter(|&(i, s)| s.dimension() == 1 && columns[i].is_empty() && !owner_of_low.contains_key(&i))
        .count();
    assert_eq!(essential, 0, "a triangulated disk has no essential 1-cycles");
    Diagram::new(pairs)
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Counts bounded components of the complement of the union of radius-`alpha`
/// disks, on a grid with `resolution` cells per unit length.
///
/// A cell is covered when its centre lies in some disk. The grid is padded by
/// `2 * alpha` around the bounding box, the outside is flood filled from the
/// border and the remaining uncovered 4-connected components are counted.
///
/// Where two circles cross, the complement has a corner whose angle can be
/// well below 90 degrees, and the cell at its tip may be cut off from its
/// neighbours. Such fragments are ignored by only counting components with a
/// cell farther than `alpha + 2 / resolution` from every point. A hole that
/// persists at least four cells beyond `alpha` always has one.
pub fn raster_hole_count(cloud: &Cloud, alpha: f64, resolution: f64) -> usize {
    assert!(alpha > 0.0 && resolution > 0.0, "alpha and resolution must be positive");
    if 1.0 / resolution >= alpha / 10.0 {
        log::warn!("raster resolution {resolution} is coarse for alpha = {alpha}");
    }
    let pts = cloud.points();
    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        min_x = min_x.min(p.x);
        min_y = min_y.min(p.y);
        max_x = max_x.max(p.x);
        max_y = max_y.max(p.y);
    }
    let pad = 2.0 * alpha;
    let (x0, y0) = (min_x - pad, min_y - pad);
    let h = 1.0 / resolution;
    let width = (((max_x + pad) - x0) / h).ceil() as usize + 1;
    let height = (((max_y + pad) - y0) / h).ceil() as usize + 1;

    const DEEP: u8 = 0;
    const COVERED: u8 = 1;
    const VISITED: u8 = 2;
    const SHALLOW: u8 = 3;
    let mut grid = vec![DEEP; width * height];
    let reach = alpha + 2.0 * h;
    let (r2, reach2) = (alpha * alpha, reach * reach);
    for p in pts {
        let i_lo = (((p.x - reach - x0) / h).floor().max(0.0)) as usize;
        let i_hi = ((((p.x + reach - x0) / h).ceil()) as usize).min(width - 1);
        let j_lo = (((p.y - reach - y0) / h).floor().max(0.0)) as usize;
        let j_hi = ((((p.y + reach - y0) / h).ceil()) as usize).min(height - 1);
        for j in j_lo..=j_hi {
            let cy = y0 + (j as f64 + 0.5) * h - p.y;
            let row = j * width;
            for i in i_lo..=i_hi {
                let cx = x0 + (i as f64 + 0.5) * h - p.x;
                let d2 = cx * cx + cy * cy;
                let cell = &mut grid[row + i];
                if d2 <= r2 {
                    *cell = COVERED;
                } else if d2 <= reach2 && *cell == DEEP {
                    *cell = SHALLOW;
                }
            }
        }
    }

    // floods the free component of `seed`; returns whether it has a deep cell
    let mut queue = VecDeque::new();
    let mut fill = |grid: &mut Vec<u8>, seed: usize| -> Option<bool> {
        if grid[seed] == COVERED || grid[seed] == VISITED {
            return None;
        }
        let mut deep = false;
        grid[seed] = VISITED;
        queue.push_back(seed);
        while let Some(c) = queue.pop_front() {
            let (i, j) = (c % width, c / width);
            let mut visit = |n: usize| {
                if grid[n] == DEEP || grid[n] == SHALLOW {
                    deep |= grid[n] == DEEP;
                    grid[n] = VISITED;
                    queue.push_back(n);
                }
            };
            if i > 0 {
                visit(c - 1);
            }
            if i + 1 < width {
                visit(c + 1);
            }
            if j > 0 {
                visit(c - width);
            }
            if j + 1 < height {
                visit(c + width);
            }
        }
        Some(deep)
    };
    for i in 0..width {
        fill(&mut grid, i);
        fill(&mut grid, (height - 1) * width + i);
    }
    for j in 0..height {
        fill(&mut grid, j * width);
        fill(&mut grid, j * width + width - 1);
    }
    let mut holes = 0;
    for c in 0..grid.len() {
        let seed_deep = grid[c] == DEEP;
        if let Some(deep) = fill(&mut grid, c) {
            if deep || seed_deep {
                holes += 1;
            }
        }
    }
    holes
}

/// A scale that is safe to rasterize, with the staircase count expected there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RasterProbe {
    pub alpha: f64,
    pub resolution: f64,
    pub expected: usize,
}

/// Scales at which the union of disks changes shape: half of every Delaunay
/// edge length and every triangle circumradius. The topology of the union
/// can only change at these values, and thin channels or pockets only exist
/// close to them.
pub fn geometric_events(cloud: &Cloud) -> Result<Vec<f64>, TriangulationError> {
    let tri = delaunay::triangulate(cloud)?;
    let pts = tri.vertices();
    let mut events: Vec<f64> =
        tri.edges().iter().map(|e| 0.5 * geom::squared_distance(pts[e.endpoints[0]], pts[e.endpoints[1]]).sqrt()).collect();
    for t in 0..tri.triangles().len() {
        let [a, b, c] = tri.triangle_points(t);
        events.push(geom::circumradius(a, b, c).expect("proper triangle"));
    }
    events.sort_by(f64::total_cmp);
    events.dedup();
    Ok(events)
}

/// Picks up to `count` distinct probes inside the staircase range.
///
/// Each probe is the midpoint of a gap between consecutive geometric events,
/// gaps drawn with probability proportional to their width. The resolution
/// keeps the probe at least `margin_cells` cells from both ends of its gap;
/// probes whose grid would exceed `max_cells` cells are skipped.
pub fn interior_probes(
    cloud: &Cloud,
    stairs: &Staircase,
    count: usize,
    margin_cells: f64,
    max_cells: f64,
    rng: &mut impl Rng,
) -> Result<Vec<RasterProbe>, TriangulationError> {
    let Some((lo, hi)) = stairs.range() else { return Ok(Vec::new()) };
    let events = geometric_events(cloud)?;
    let gaps: Vec<(f64, f64)> = events
        .windows(2)
        .map(|w| (w[0], w[1]))
        .filter(|&(a, b)| a >= lo && b <= hi && b > a)
        .collect();
    if gaps.is_empty() {
        return Ok(Vec::new());
    }
    let extent = bounding_extent(cloud.points());
    let total: f64 = gaps.iter().map(|(a, b)| b - a).sum();
    let mut used = vec![false; gaps.len()];
    let mut probes = Vec::new();
    let mut attempts = 0;
    while probes.len() < count && attempts < 50 * count {
        attempts += 1;
        let mut target = rng.gen::<f64>() * total;
        let i = gaps
            .iter()
            .position(|(a, b)| {
                target -= b - a;
                target <= 0.0
            })
            .unwrap_or(gaps.len() - 1);
        if std::mem::replace(&mut used[i], true) {
            continue;
        }
        let (a, b) = gaps[i];
        let alpha = 0.5 * (a + b);
        let resolution = (margin_cells / (0.5 * (b - a))).max(10.5 / alpha);
        let cells = ((extent + 4.0 * alpha) * resolution).powi(2);
        if cells <= max_cells {
            probes.push(RasterProbe { alpha, resolution, expected: stairs.count_at(alpha) });
        }
    }
    Ok(probes)
}

fn bounding_extent(pts: &[Point2]) -> f64 {
    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        min_x = min_x.min(p.x);
        min_y = min_y.min(p.y);
        max_x = max_x.max(p.x);
        max_y = max_y.max(p.y);
    }
    (max_x - min_x).max(max_y - min_y)
}

/// Outcome of [`verify_equivalence`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    /// Off-diagonal pairs of both routes agree as multisets.
    pub equal: bool,
    pub max_deviation: f64,
    pub sweep_pairs: usize,
    pub reduction_pairs: usize,
    pub raster_checks: usize,
    pub raster_agreements: usize,
    pub mismatches: Vec<String>,
}

/// Tolerance on matched pair values.
pub const VALUE_TOLERANCE: f64 = 1e-9;

/// Compares the off-diagonal parts of two diagrams as multisets.
/// Returns whether they agree and the largest coordinate deviation.
pub fn compare_diagrams(a: &Diagram, b: &Diagram) -> (bool, f64) {
    let (a, b) = (a.off_diagonal(), b.off_diagonal());
    if a.len() != b.len() {
        return (false, f64::INFINITY);
    }
    let dev = a
        .pairs()
        .iter()
        .zip(b.pairs())
        .map(|(p, q)| (p.birth - q.birth).abs().max((p.death - q.death).abs()))
        .fold(0.0, f64::max);
    (dev <= VALUE_TOLERANCE, dev)
}

/// Runs the sweep and the boundary reduction on `cloud` and compares them;
/// also rasterizes five random scales and checks the staircase count.
pub fn verify_equivalence(cloud: &Cloud) -> Result<EquivalenceReport, TriangulationError> {
    let fast = forest::run_hoctop(cloud)?;
    let slow = reduce_boundary_matrix(&alpha_filtration(cloud)?);
    let (equal, max_deviation) = compare_diagrams(&fast, &slow);
    let mut mismatches = Vec::new();
    if !equal {
        mismatches.push(format!(
            "sweep has {} off-diagonal pairs, reduction has {} (max deviation {max_deviation:e})",
            fast.off_diagonal().len(),
            slow.off_diagonal().len()
        ));
    }

    let stairs = staircase(&fast);
    let mut rng = ChaCha8Rng::seed_from_u64(cloud.len() as u64);
    let probes = interior_probes(cloud, &stairs, 5, 4.0, 2.5e7, &mut rng)?;
    let mut raster_agreements = 0;
    for probe in &probes {
        let seen = raster_hole_count(cloud, probe.alpha, probe.resolution);
        if seen == probe.expected {
            raster_agreements += 1;
        } else {
            mismatches.push(format!(
                "alpha = {}: staircase {} holes, raster {}",
                probe.alpha, probe.expected, seen
            ));
        }
    }
    Ok(EquivalenceReport {
        equal,
        max_deviation,
        sweep_pairs: fast.len(),
        reduction_pairs: slow.len(),
        raster_checks: probes.len(),
        raster_agreements,
        mismatches,
    })
}
