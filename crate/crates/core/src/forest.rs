//! Union-find sweep over the graph dual to the Delaunay triangulation.
//!
//! Every triangle is a node, plus one node for the unbounded region. Edges of
//! the triangulation are removed in decreasing order of length; removing an
//! edge at scale `alpha = length / 2` joins the two regions on either side.
//! A node is *gray* while its birth is zero, i.e. while its triangle still
//! belongs to the complex at the current scale. Components of white nodes are
//! holes; when two of them merge the younger one dies and a persistence pair
//! is emitted.
//!
//! Unions are by weight and `find_root` does no path compression, so every
//! parent chain has length at most `log2` of its tree size.

use serde::{Deserialize, Serialize};

use crate::analytics::Diagram;
use crate::delaunay::{self, Cloud, Face, Triangulation, TriangulationError};
use crate::geom::{self, Point2};

/// Node of the unbounded region.
pub const EXTERNAL: usize = 0;

/// Birth of a hole, `birth <= alpha < death`, in the ascending offset
/// filtration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistencePair {
    pub birth: f64,
    pub death: f64,
}

impl PersistencePair {
    pub fn new(birth: f64, death: f64) -> Self {
        Self { birth, death }
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_zero_persistence(&self) -> bool {
        self.death <= self.birth
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestNode {
    pub parent: usize,
    /// Number of nodes strictly below this one in its tree.
    pub weight: usize,
    /// Largest scale at which the node is white; `0` for gray nodes and
    /// `+inf` for the unbounded region.
    pub birth: f64,
}

impl ForestNode {
    fn isolated(id: usize, birth: f64) -> Self {
        Self { parent: id, weight: 0, birth }
    }
}

/// What happened when one edge was removed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Event {
    /// Both sides already belong to the same region.
    SameRegion,
    /// A gray triangle joined a white region.
    GrayJoinsWhite { gray: usize, root: usize },
    /// Two gray triangles sharing a hypotenuse formed a new region.
    GrayPair { parent: usize, child: usize },
    /// Two white regions merged and the younger one died.
    Merge { pair: PersistencePair, survivor: usize, absorbed: usize },
}

impl Event {
    pub fn case_number(&self) -> usize {
        match self {
            Event::SameRegion => 1,
            Event::GrayJoinsWhite { .. } => 2,
            Event::GrayPair { .. } => 3,
            Event::Merge { .. } => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepStats {
    /// Events per case, index 0 for case 1.
    pub cases: [usize; 4],
    /// Longest parent chain walked by any root query.
    pub max_find_steps: usize,
    pub find_queries: usize,
    pub edges_processed: usize,
}

#[derive(Debug, Clone)]
pub struct DualForest {
    nodes: Vec<ForestNode>,
    links: usize,
    stats: SweepStats,
}

/// Node id of the region on one side of an edge.
pub fn node_of(face: Face) -> usize {
    match face {
        Face::External => EXTERNAL,
        Face::Triangle(t) => t + 1,
    }
}

/// Initial birth of a triangle's node: its circumradius if acute, else zero.
///
/// The circumradius is clamped below by half the longest side so that
/// rounding on nearly right triangles cannot place the birth under the scale
/// at which the triangle's first edge is removed.
pub fn initial_birth(points: [Point2; 3]) -> f64 {
    let [a, b, c] = points;
    if !geom::is_acute(a, b, c).expect("Delaunay triangles are proper") {
        return 0.0;
    }
    let radius = geom::circumradius(a, b, c).expect("Delaunay triangles are proper");
    let longest = geom::squared_distance(a, b)
        .max(geom::squared_distance(b, c))
        .max(geom::squared_distance(c, a));
    radius.max(0.5 * longest.sqrt())
}

impl DualForest {
    /// Isolated nodes: the unbounded region at `+inf`, acute triangles at
    /// their circumradius, everything else gray.
    pub fn new(tri: &Triangulation) -> Self {
        let mut nodes = Vec::with_capacity(tri.triangles().len() + 1);
        nodes.push(ForestNode::isolated(EXTERNAL, f64::INFINITY));
        for t in 0..tri.triangles().len() {
            nodes.push(ForestNode::isolated(t + 1, initial_birth(tri.triangle_points(t))));
        }
        Self { nodes, links: 0, stats: SweepStats::default() }
    }

    pub fn nodes(&self) -> &[ForestNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &ForestNode {
        &self.nodes[id]
    }

    /// Number of links added so far.
    pub fn links(&self) -> usize {
        self.links
    }

    pub fn stats(&self) -> &SweepStats {
        &self.stats
    }

    /// True once the forest is a single tree.
    pub fn is_tree(&self) -> bool {
        self.links + 1 == self.nodes.len()
    }

    pub fn find_root(&self, node: usize) -> usize {
        self.find_root_counted(node).0
    }

    /// Root of `node` and the number of parent links walked to reach it.
    pub fn find_root_counted(&self, mut node: usize) -> (usize, usize) {
        let mut steps = 0;
        while self.nodes[node].parent != node {
            node = self.nodes[node].parent;
            steps += 1;
        }
        (node, steps)
    }

    fn is_root(&self, node: usize) -> bool {
        self.nodes[node].parent == node
    }

    /// Hangs the gray singleton `gray` below the white root `root`.
    pub fn link_gray_to_white(&mut self, gray: usize, root: usize) {
        assert!(self.is_root(gray) && self.nodes[gray].birth == 0.0, "node {gray} is not a gray root");
        assert_eq!(self.nodes[gray].weight, 0, "gray node {gray} is not a singleton");
        assert!(self.is_root(root) && self.nodes[root].birth > 0.0, "node {root} is not a white root");
        self.nodes[gray].parent = root;
        self.nodes[gray].birth = self.nodes[root].birth;
        self.nodes[root].weight += 1;
    }

    /// Joins two gray singletons into a region born at `alpha`; `parent`
    /// becomes the root.
    pub fn link_two_gray(&mut self, parent: usize, child: usize, alpha: f64) {
        for node in [parent, child] {
            assert!(
                self.is_root(node) && self.nodes[node].birth == 0.0 && self.nodes[node].weight == 0,
                "node {node} is not a gray singleton"
            );
        }
        self.nodes[child].parent = parent;
        self.nodes[parent].birth = alpha;
        self.nodes[child].birth = alpha;
        self.nodes[parent].weight = 1;
        self.nodes[child].weight = 0;
    }

    /// Merges the white trees rooted at `ru` and `rv` at scale `alpha`. The
    /// younger region dies. The heavier root (or `rv` on equal weights) becomes
    /// the parent and keeps the older birth.
    pub fn merge_white(&mut self, ru: usize, rv: usize, alpha: f64) -> (PersistencePair, usize, usize) {
        assert!(ru != rv && self.is_root(ru) && self.is_root(rv), "merge needs two distinct roots");
        let (bu, bv) = (self.nodes[ru].birth, self.nodes[rv].birth);
        assert!(bu > 0.0 && bv > 0.0, "merge needs two white roots");
        let death = if bu > bv { bv } else { bu };
        let (parent, child) =
            if self.nodes[ru].weight > self.nodes[rv].weight { (ru, rv) } else { (rv, ru) };
        self.nodes[child].parent = parent;
        self.nodes[parent].weight += self.nodes[child].weight + 1;
        self.nodes[parent].birth = bu.max(bv);
        (PersistencePair::new(alpha, death), parent, child)
    }

    /// Removes edge `edge` of `tri` from the complex.
    pub fn process_edge(&mut self, tri: &Triangulation, edge: usize) -> Event {
        let e = &tri.edges()[edge];
        let alpha = 0.5 * e.length;
        let (u, v) = (node_of(e.faces[0]), node_of(e.faces[1]));
        let (ru, su) = self.find_root_counted(u);
        let (rv, sv) = self.find_root_counted(v);
        self.stats.find_queries += 2;
        self.stats.max_find_steps = self.stats.max_find_steps.max(su).max(sv);
        self.stats.edges_processed += 1;

        let event = if ru == rv {
            Event::SameRegion
        } else {
            let (bu, bv) = (self.nodes[ru].birth, self.nodes[rv].birth);
            let event = if bu == 0.0 && bv > 0.0 {
                self.link_gray_to_white(ru, rv);
                Event::GrayJoinsWhite { gray: ru, root: rv }
            } else if bu > 0.0 && bv == 0.0 {
                self.link_gray_to_white(rv, ru);
                Event::GrayJoinsWhite { gray: rv, root: ru }
            } else if bu == 0.0 && bv == 0.0 {
                self.link_two_gray(ru, rv, alpha);
                Event::GrayPair { parent: ru, child: rv }
            } else {
                let (pair, survivor, absorbed) = self.merge_white(ru, rv, alpha);
                Event::Merge { pair, survivor, absorbed }
            };
            self.links += 1;
            event
        };
        self.stats.cases[event.case_number() - 1] += 1;
        event
    }
}

/// Result of a full sweep.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub diagram: Diagram,
    pub stats: SweepStats,
    /// Pairs in the order they were found (decreasing scale).
    pub pairs_in_sweep_order: Vec<PersistencePair>,
}

/// Sweeps `order` (as produced by [`delaunay::edges_sorted_desc`]) until the
/// forest is a tree.
pub fn sweep(tri: &Triangulation, order: &[usize]) -> SweepOutcome {
    sweep_inner(tri, order, None)
}

/// Like [`sweep`] but also records every event.
pub fn sweep_traced(tri: &Triangulation, order: &[usize]) -> (SweepOutcome, Vec<Event>) {
    let mut trace = Vec::new();
    let outcome = sweep_inner(tri, order, Some(&mut trace));
    (outcome, trace)
}

fn sweep_inner(tri: &Triangulation, order: &[usize], mut trace: Option<&mut Vec<Event>>) -> SweepOutcome {
    let mut forest = DualForest::new(tri);
    let mut pairs = Vec::new();
    let k = tri.triangles().len();
    for &edge in order {
        if forest.links() >= k {
            break;
        }
        let event = forest.process_edge(tri, edge);
        if let Event::Merge { pair, .. } = event {
            pairs.push(pair);
        }
        if let Some(trace) = trace.as_deref_mut() {
            trace.push(event);
        }
    }
    assert!(forest.is_tree(), "sweep ended with {} of {} links", forest.links(), k);
    SweepOutcome { diagram: Diagram::new(pairs.clone()), stats: *forest.stats(), pairs_in_sweep_order: pairs }
}

/// All persistence pairs of the holes of `cloud`.
pub fn run_hoctop(cloud: &Cloud) -> Result<Diagram, TriangulationError> {
    let tri = delaunay::triangulate(cloud)?;
    let order = delaunay::edges_sorted_desc(&tri);
    Ok(sweep(&tri, &order).diagram)
}
