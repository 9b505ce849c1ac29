//! Delaunay triangulation of a planar cloud.
//!
//! Points are inserted incrementally (Bowyer-Watson) in a biased randomized
//! insertion order: a seeded shuffle split into rounds of doubling size, each
//! round sorted along a Hilbert curve. Points are located by a stochastic
//! visibility walk from the most recently created triangle. The unbounded
//! region is represented by ghost triangles sharing a vertex at infinity, so
//! inserting outside the current hull needs no special casing.
//!
//! Cocircular configurations are resolved by the symbolic perturbation in
//! [`crate::geom`], which keeps the output a function of the input order of
//! the points only.

use std::cmp::Ordering;
use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geom::{self, Point2};

/// Seed of the insertion-order shuffle. Fixed so that triangulations are
/// reproducible.
const INSERTION_SEED: u64 = 0x5eed_de1a_0a11_7e57;
const HILBERT_ORDER: u32 = 16;
const GHOST: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CloudError {
    #[error("point {index} has a non-finite coordinate ({x}, {y})")]
    NonFinite { index: usize, x: f64, y: f64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriangulationError {
    #[error("a triangulation needs at least 3 distinct points, got {0}")]
    TooFewPoints(usize),
    #[error("all points are collinear")]
    AllCollinear,
}

/// An ordered set of distinct finite points.
#[derive(Debug, Clone, PartialEq)]
pub struct Cloud {
    points: Vec<Point2>,
    duplicates_removed: usize,
}

impl Cloud {
    /// Builds a cloud, dropping exact duplicates (first occurrence wins).
    pub fn new(points: Vec<Point2>) -> Result<Self, CloudError> {
        if let Some((index, p)) = points.iter().enumerate().find(|(_, p)| !p.is_finite()) {
            return Err(CloudError::NonFinite { index, x: p.x, y: p.y });
        }
        let mut seen = HashSet::with_capacity(points.len());
        let total = points.len();
        let points: Vec<Point2> = points
            .into_iter()
            .filter(|p| seen.insert((canonical_bits(p.x), canonical_bits(p.y))))
            .collect();
        let duplicates_removed = total - points.len();
        if duplicates_removed > 0 {
            log::warn!("removed {duplicates_removed} duplicate point(s) from the cloud");
        }
        Ok(Self { points, duplicates_removed })
    }

    pub fn from_xy(coords: &[(f64, f64)]) -> Result<Self, CloudError> {
        Self::new(coords.iter().map(|&c| Point2::from(c)).collect())
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn duplicates_removed(&self) -> usize {
        self.duplicates_removed
    }
}

fn canonical_bits(v: f64) -> u64 {
    // -0.0 and 0.0 are the same location
    if v == 0.0 {
        0
    } else {
        v.to_bits()
    }
}

/// One side of an edge: a triangle or the unbounded region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Face {
    Triangle(usize),
    External,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    /// Vertex indices, smaller first.
    pub endpoints: [usize; 2],
    pub faces: [Face; 2],
    pub length: f64,
    pub squared_length: f64,
}

impl Edge {
    pub fn is_hull(&self) -> bool {
        self.faces.contains(&Face::External)
    }
}

#[derive(Debug, Clone)]
pub struct Triangulation {
    vertices: Vec<Point2>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<Edge>,
}

impl Triangulation {
    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    /// Triangles as counter-clockwise vertex triples.
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn triangle_points(&self, t: usize) -> [Point2; 3] {
        self.triangles[t].map(|v| self.vertices[v])
    }

    pub fn hull_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.is_hull()).count()
    }
}

/// Delaunay triangulation of `cloud`.
pub fn triangulate(cloud: &Cloud) -> Result<Triangulation, TriangulationError> {
    let points = cloud.points();
    if points.len() < 3 {
        return Err(TriangulationError::TooFewPoints(points.len()));
    }
    let order = insertion_order(points);
    let mut mesh = Mesh::new(points);
    let seed_pos = mesh.seed(&order)?;
    for (pos, &v) in order.iter().enumerate() {
        if !seed_pos.contains(&pos) {
            mesh.insert(v);
        }
    }
    Ok(mesh.finish())
}

/// Edge ids sorted by decreasing length. Ties in the exact squared length are
/// broken by the endpoint pair, ascending.
pub fn edges_sorted_desc(tri: &Triangulation) -> Vec<usize> {
    let vertices = tri.vertices();
    let edges = tri.edges();
    let exact_cmp = |&i: &usize, &j: &usize| {
        let (e, f) = (&edges[i], &edges[j]);
        let by_length = geom::cmp_squared_distance_hinted(
            vertices[f.endpoints[0]],
            vertices[f.endpoints[1]],
            f.squared_length,
            vertices[e.endpoints[0]],
            vertices[e.endpoints[1]],
            e.squared_length,
        );
        by_length.then_with(|| e.endpoints.cmp(&f.endpoints))
    };

    // sort the rounded values, then settle runs of uncertain neighbours exactly
    let mut keys: Vec<(f64, usize)> = edges.iter().enumerate().map(|(i, e)| (e.squared_length, i)).collect();
    keys.sort_unstable_by(|a, b| b.0.total_cmp(&a.0));
    let mut order: Vec<usize> = keys.iter().map(|&(_, i)| i).collect();
    let mut start = 0;
    for end in 1..=keys.len() {
        if end == keys.len() || geom::squared_lengths_separated(keys[end - 1].0, keys[end].0) {
            if end - start > 1 {
                order[start..end].sort_unstable_by(exact_cmp);
            }
            start = end;
        }
    }
    order
}

fn insertion_order(points: &[Point2]) -> Vec<u32> {
    let mut order: Vec<u32> = (0..points.len() as u32).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(INSERTION_SEED);
    order.shuffle(&mut rng);

    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        min_x = min_x.min(p.x);
        min_y = min_y.min(p.y);
        max_x = max_x.max(p.x);
        max_y = max_y.max(p.y);
    }
    let span = (max_x - min_x).max(max_y - min_y);
    let scale = if span > 0.0 { ((1u32 << HILBERT_ORDER) - 1) as f64 / span } else { 0.0 };
    let key = |v: u32| {
        let p = points[v as usize];
        hilbert_index(((p.x - min_x) * scale) as u32, ((p.y - min_y) * scale) as u32)
    };

    // Rounds of doubling size; the last half of the shuffled points forms the
    // final round.
    let mut end = order.len();
    while end > 64 {
        let start = end / 2;
        order[start..end].sort_by_cached_key(|&v| key(v));
        end = start;
    }
    order[..end].sort_by_cached_key(|&v| key(v));
    order
}

fn hilbert_index(mut x: u32, mut y: u32) -> u64 {
    let n = 1u32 << HILBERT_ORDER;
    let mut d = 0u64;
    let mut s = n / 2;
    while s > 0 {
        let rx = u32::from(x & s > 0);
        let ry = u32::from(y & s > 0);
        d += u64::from(s) * u64::from(s) * u64::from((3 * rx) ^ ry);
        if ry == 0 {
            if rx == 1 {
                x = n - 1 - x;
                y = n - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        s /= 2;
    }
    d
}

/// Triangle soup with adjacency. Slot `i` of `nbrs[t]` is the triangle across
/// the edge opposite `verts[t][i]`. Ghost triangles contain [`GHOST`] and have
/// the outside of the hull to the left of their finite edge.
struct Mesh<'a> {
    pts: &'a [Point2],
    verts: Vec<[u32; 3]>,
    nbrs: Vec<[u32; 3]>,
    alive: Vec<bool>,
    state: Vec<u32>,
    free: Vec<u32>,
    stamp: u32,
    last: u32,
    walk_rng: u32,
    stack: Vec<u32>,
    cavity: Vec<u32>,
    boundary: Vec<Boundary>,
    created: Vec<(u32, u32)>,
}

#[derive(Clone, Copy)]
struct Boundary {
    from: u32,
    to: u32,
    outer: u32,
    outer_slot: u8,
}

impl<'a> Mesh<'a> {
    fn new(pts: &'a [Point2]) -> Self {
        let cap = 2 * pts.len() + 8;
        Self {
            pts,
            verts: Vec::with_capacity(cap),
            nbrs: Vec::with_capacity(cap),
            alive: Vec::with_capacity(cap),
            state: Vec::with_capacity(cap),
            free: Vec::new(),
            stamp: 0,
            last: 0,
            walk_rng: 0x9e37_79b9,
            stack: Vec::new(),
            cavity: Vec::new(),
            boundary: Vec::new(),
            created: Vec::new(),
        }
    }

    #[inline]
    fn pt(&self, v: u32) -> Point2 {
        self.pts[v as usize]
    }

    fn alloc(&mut self, v: [u32; 3]) -> u32 {
        if let Some(t) = self.free.pop() {
            self.verts[t as usize] = v;
            self.nbrs[t as usize] = [GHOST; 3];
            self.alive[t as usize] = true;
            t
        } else {
            self.verts.push(v);
            self.nbrs.push([GHOST; 3]);
            self.alive.push(true);
            self.state.push(0);
            (self.verts.len() - 1) as u32
        }
    }

    /// Builds the first triangle and its three ghosts. Returns the positions
    /// in `order` that were consumed.
    fn seed(&mut self, order: &[u32]) -> Result<[usize; 3], TriangulationError> {
        let (a, b) = (order[0], order[1]);
        let (pa, pb) = (self.pt(a), self.pt(b));
        let third = order[2..]
            .iter()
            .position(|&c| geom::orient2d_sign(pa, pb, self.pt(c)) != Ordering::Equal)
            .ok_or(TriangulationError::AllCollinear)?
            + 2;
        let c = order[third];
        let (b, c) = if geom::orient2d_sign(pa, pb, self.pt(c)) == Ordering::Greater {
            (b, c)
        } else {
            (c, b)
        };
        let ids = [
            self.alloc([a, b, c]),
            self.alloc([c, b, GHOST]),
            self.alloc([a, c, GHOST]),
            self.alloc([b, a, GHOST]),
        ];
        for &t in &ids {
            for &u in &ids {
                if t != u {
                    self.link_if_adjacent(t, u);
                }
            }
        }
        self.last = ids[0];
        Ok([0, 1, third])
    }

    fn link_if_adjacent(&mut self, t: u32, u: u32) {
        let vt = self.verts[t as usize];
        let vu = self.verts[u as usize];
        for i in 0..3 {
            let (p, q) = (vt[(i + 1) % 3], vt[(i + 2) % 3]);
            for j in 0..3 {
                if vu[(j + 1) % 3] == q && vu[(j + 2) % 3] == p {
                    self.nbrs[t as usize][i] = u;
                }
            }
        }
    }

    #[inline]
    fn next_rand(&mut self) -> u32 {
        // xorshift32
        let mut x = self.walk_rng;
        x ^= x << 13;
        x ^= x >> 17;
        x ^= x << 5;
        self.walk_rng = x;
        x
    }

    /// Finds a triangle in conflict with `q`: either a real triangle
    /// containing it (boundary included) or a ghost whose hull edge sees it.
    fn locate(&mut self, q: Point2) -> u32 {
        let mut t = self.last;
        'walk: loop {
            let v = self.verts[t as usize];
            let start = (self.next_rand() % 3) as usize;
            for k in 0..3 {
                let i = (start + k) % 3;
                let (a, b) = (v[(i + 1) % 3], v[(i + 2) % 3]);
                if geom::orient2d_sign(self.pt(a), self.pt(b), q) == Ordering::Less {
                    t = self.nbrs[t as usize][i];
                    if self.verts[t as usize].contains(&GHOST) {
                        return t;
                    }
                    continue 'walk;
                }
            }
            return t;
        }
    }

    fn in_conflict(&self, t: u32, p: u32) -> bool {
        let v = self.verts[t as usize];
        let q = self.pt(p);
        if let Some(g) = v.iter().position(|&x| x == GHOST) {
            let (a, b) = (self.pt(v[(g + 1) % 3]), self.pt(v[(g + 2) % 3]));
            return match geom::orient2d_sign(a, b, q) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => strictly_between(a, b, q),
            };
        }
        let pts = [self.pt(v[0]), self.pt(v[1]), self.pt(v[2]), q];
        let ids = [v[0] as usize, v[1] as usize, v[2] as usize, p as usize];
        geom::incircle_perturbed(pts, ids) == Ordering::Greater
    }

    fn insert(&mut self, p: u32) {
        let start = self.locate(self.pt(p));
        self.stamp += 1;
        let in_cavity = 2 * self.stamp;
        let outside = in_cavity + 1;

        self.cavity.clear();
        self.boundary.clear();
        self.stack.clear();
        self.state[start as usize] = in_cavity;
        self.stack.push(start);
        while let Some(t) = self.stack.pop() {
            self.cavity.push(t);
            for i in 0..3 {
                let n = self.nbrs[t as usize][i];
                let st = self.state[n as usize];
                let conflict = if st == in_cavity {
                    true
                } else if st == outside {
                    false
                } else {
                    let c = self.in_conflict(n, p);
                    self.state[n as usize] = if c { in_cavity } else { outside };
                    if c {
                        self.stack.push(n);
                    }
                    c
                };
                if !conflict {
                    let v = self.verts[t as usize];
                    let outer_slot =
                        self.nbrs[n as usize].iter().position(|&x| x == t).expect("adjacency") as u8;
                    self.boundary.push(Boundary {
                        from: v[(i + 1) % 3],
                        to: v[(i + 2) % 3],
                        outer: n,
                        outer_slot,
                    });
                }
            }
        }

        for k in 0..self.cavity.len() {
            let t = self.cavity[k];
            self.alive[t as usize] = false;
            self.free.push(t);
        }

        self.created.clear();
        let mut real = None;
        for k in 0..self.boundary.len() {
            let b = self.boundary[k];
            let t = self.alloc([b.from, b.to, p]);
            self.nbrs[t as usize][2] = b.outer;
            self.nbrs[b.outer as usize][b.outer_slot as usize] = t;
            self.created.push((b.from, t));
            if b.from != GHOST && b.to != GHOST {
                real = Some(t);
            }
        }
        self.created.sort_unstable();
        for k in 0..self.created.len() {
            let t = self.created[k].1;
            let to = self.verts[t as usize][1];
            let idx = self
                .created
                .binary_search_by_key(&to, |&(from, _)| from)
                .expect("cavity boundary is a closed cycle");
            let next = self.created[idx].1;
            self.nbrs[t as usize][0] = next;
            self.nbrs[next as usize][1] = t;
        }
        self.last = real.expect("every insertion creates a finite triangle");
    }

    fn finish(self) -> Triangulation {
        let mut compact = vec![usize::MAX; self.verts.len()];
        let mut triangles = Vec::new();
        for (t, v) in self.verts.iter().enumerate() {
            if self.alive[t] && !v.contains(&GHOST) {
                compact[t] = triangles.len();
                triangles.push(v.map(|x| x as usize));
            }
        }
        let mut edges = Vec::with_capacity(3 * self.pts.len());
        for (t, v) in self.verts.iter().enumerate() {
            if compact[t] == usize::MAX {
                continue;
            }
            for i in 0..3 {
                let n = self.nbrs[t][i] as usize;
                let other = if self.verts[n].contains(&GHOST) {
                    Face::External
                } else if t < n {
                    Face::Triangle(compact[n])
                } else {
                    continue;
                };
                let (a, b) = (v[(i + 1) % 3] as usize, v[(i + 2) % 3] as usize);
                let squared_length = geom::squared_distance(self.pts[a], self.pts[b]);
                edges.push(Edge {
                    endpoints: [a.min(b), a.max(b)],
                    faces: [Face::Triangle(compact[t]), other],
                    length: squared_length.sqrt(),
                    squared_length,
                });
            }
        }
        Triangulation { vertices: self.pts.to_vec(), triangles, edges }
    }
}

fn strictly_between(a: Point2, b: Point2, q: Point2) -> bool {
    let within = |s: f64, t: f64, v: f64| (s < v && v < t) || (t < v && v < s);
    if a.x != b.x {
        within(a.x, b.x, q.x)
    } else {
        within(a.y, b.y, q.y)
    }
}
