//! Views of a persistence diagram: barcode, staircase, hole-count
//! probabilities, bottleneck distance and hole-count inference.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::forest::PersistencePair;

/// Multiset of persistence pairs, kept sorted by `(birth, death)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagram {
    pairs: Vec<PersistencePair>,
}

impl Diagram {
    pub fn new(mut pairs: Vec<PersistencePair>) -> Self {
        pairs.sort_by(|p, q| p.birth.total_cmp(&q.birth).then(p.death.total_cmp(&q.death)));
        Self { pairs }
    }

    pub fn pairs(&self) -> &[PersistencePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The pairs off the diagonal.
    pub fn off_diagonal(&self) -> Diagram {
        Diagram { pairs: self.pairs.iter().copied().filter(|p| !p.is_zero_persistence()).collect() }
    }

    pub fn persistences(&self) -> Vec<f64> {
        self.pairs.iter().map(PersistencePair::persistence).collect()
    }
}

impl FromIterator<PersistencePair> for Diagram {
    fn from_iter<I: IntoIterator<Item = PersistencePair>>(iter: I) -> Self {
        Diagram::new(iter.into_iter().collect())
    }
}

/// Bar lengths `death - birth`, longest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Barcode {
    pub bars: Vec<f64>,
}

pub fn barcode(d: &Diagram) -> Barcode {
    let mut bars = d.persistences();
    bars.sort_by(|a, b| b.total_cmp(a));
    Barcode { bars }
}

/// Number of holes as a step function of the scale. `counts[i]` holds on
/// `[breakpoints[i], breakpoints[i + 1])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Staircase {
    pub breakpoints: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Staircase {
    /// `[lo, hi]`, or `None` for an empty diagram.
    pub fn range(&self) -> Option<(f64, f64)> {
        Some((*self.breakpoints.first()?, *self.breakpoints.last()?))
    }

    /// Hole count at scale `alpha`.
    pub fn count_at(&self, alpha: f64) -> usize {
        // index of the last breakpoint <= alpha
        let idx = self.breakpoints.partition_point(|&b| b <= alpha);
        if idx == 0 || idx > self.counts.len() {
            0
        } else {
            self.counts[idx - 1]
        }
    }

    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64, usize)> + '_ {
        self.breakpoints.windows(2).zip(&self.counts).map(|(w, &c)| (w[0], w[1], c))
    }
}

/// Sum of the indicator functions of `[birth, death)` over all pairs.
/// Zero-persistence pairs contribute nothing.
pub fn staircase(d: &Diagram) -> Staircase {
    let mut events: Vec<(f64, i64)> = Vec::with_capacity(2 * d.len());
    for p in d.pairs().iter().filter(|p| !p.is_zero_persistence()) {
        events.push((p.birth, 1));
        events.push((p.death, -1));
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut breakpoints = Vec::new();
    let mut counts = Vec::new();
    let mut level = 0i64;
    let mut i = 0;
    while i < events.len() {
        let at = events[i].0;
        while i < events.len() && events[i].0 == at {
            level += events[i].1;
            i += 1;
        }
        breakpoints.push(at);
        if i < events.len() {
            counts.push(level as usize);
        }
    }
    Staircase { breakpoints, counts }
}

/// Probability of each hole count for a scale drawn uniformly from
/// `[min birth, max death]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoleProbabilityTable {
    pub entries: BTreeMap<usize, f64>,
    /// Set when the diagram has no off-diagonal pair; `entries` is then
    /// `{0: 1.0}`.
    pub empty_range: bool,
}

impl HoleProbabilityTable {
    pub fn probability(&self, holes: usize) -> f64 {
        self.entries.get(&holes).copied().unwrap_or(0.0)
    }

    /// Entries with positive probability, most likely first (ties by count).
    pub fn ranked(&self) -> Vec<(usize, f64)> {
        let mut v: Vec<(usize, f64)> = self.entries.iter().map(|(&k, &p)| (k, p)).filter(|e| e.1 > 0.0).collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        v
    }

    pub fn most_likely(&self) -> Option<usize> {
        self.ranked().first().map(|e| e.0)
    }
}

pub fn hole_probabilities(d: &Diagram) -> HoleProbabilityTable {
    probabilities_from_staircase(&staircase(d))
}

pub fn probabilities_from_staircase(s: &Staircase) -> HoleProbabilityTable {
    let Some((lo, hi)) = s.range() else {
        return HoleProbabilityTable { entries: BTreeMap::from([(0, 1.0)]), empty_range: true };
    };
    let total = hi - lo;
    let mut entries = BTreeMap::new();
    for (a, b, count) in s.intervals() {
        *entries.entry(count).or_insert(0.0) += (b - a) / total;
    }
    HoleProbabilityTable { entries, empty_range: false }
}

/// Number of pairs above the widest gap between consecutive persistence
/// values (with 0 prepended), and the width of that gap. On ties the lowest
/// gap wins.
pub fn infer_hole_count(d: &Diagram) -> (usize, f64) {
    let mut values = d.off_diagonal().persistences();
    if values.is_empty() {
        return (0, 0.0);
    }
    values.sort_by(f64::total_cmp);
    let mut prev = 0.0;
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, &v) in values.iter().enumerate() {
        let gap = v - prev;
        if gap > best.1 {
            best = (i, gap);
        }
        prev = v;
    }
    (values.len() - best.0, best.1)
}

/// Bottleneck distance with the L-infinity ground metric. A point may be
/// matched to the diagonal at cost `(death - birth) / 2`.
///
/// Exact: the answer is one of the finitely many candidate costs, found by
/// binary search with a perfect-matching feasibility test.
pub fn bottleneck_distance(d1: &Diagram, d2: &Diagram) -> f64 {
    let a: Vec<PersistencePair> = d1.off_diagonal().pairs().to_vec();
    let b: Vec<PersistencePair> = d2.off_diagonal().pairs().to_vec();
    let mut candidates = vec![0.0];
    for p in &a {
        candidates.push(diagonal_cost(p));
        for q in &b {
            candidates.push(linf(p, q));
        }
    }
    candidates.extend(b.iter().map(diagonal_cost));
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching_within(&a, &b, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

fn linf(p: &PersistencePair, q: &PersistencePair) -> f64 {
    (p.birth - q.birth).abs().max((p.death - q.death).abs())
}

fn diagonal_cost(p: &PersistencePair) -> f64 {
    (p.death - p.birth) / 2.0
}

/// Left side: points of `a`, then diagonal slots for `b`. Right side: points
/// of `b`, then diagonal slots for `a`.
fn perfect_matching_within(a: &[PersistencePair], b: &[PersistencePair], delta: f64) -> bool {
    let (m, n) = (a.len(), b.len());
    let size = m + n;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); size];
    for (i, p) in a.iter().enumerate() {
        for (j, q) in b.iter().enumerate() {
            if linf(p, q) <= delta {
                adj[i].push(j);
            }
        }
        if diagonal_cost(p) <= delta {
            adj[i].push(n + i);
        }
    }
    for (j, q) in b.iter().enumerate() {
        if diagonal_cost(q) <= delta {
            adj[m + j].push(j);
        }
        adj[m + j].extend(n..n + m);
    }
    hopcroft_karp(&adj, size) == size
}

/// Size of a maximum matching in the bipartite graph `adj` (left to right).
fn hopcroft_karp(adj: &[Vec<usize>], right_size: usize) -> usize {
    const FREE: usize = usize::MAX;
    let left_size = adj.len();
    let mut match_left = vec![FREE; left_size];
    let mut match_right = vec![FREE; right_size];
    let mut dist = vec![0usize; left_size];
    let mut matched = 0;

    loop {
        // BFS layering from free left vertices
        let mut queue = std::collections::VecDeque::new();
        for u in 0..left_size {
            if match_left[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_right[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            return matched;
        }
        let mut cursor = vec![0usize; left_size];
        for u in 0..left_size {
            if match_left[u] == FREE && augment(u, adj, &mut match_left, &mut match_right, &mut dist, &mut cursor) {
                matched += 1;
            }
        }
    }
}

fn augment(
    root: usize,
    adj: &[Vec<usize>],
    match_left: &mut [usize],
    match_right: &mut [usize],
    dist: &mut [usize],
    cursor: &mut [usize],
) -> bool {
    // iterative DFS along the BFS layers
    let mut path = vec![root];
    while let Some(&u) = path.last() {
        if cursor[u] == adj[u].len() {
            dist[u] = usize::MAX;
            path.pop();
            continue;
        }
        let v = adj[u][cursor[u]];
        cursor[u] += 1;
        let w = match_right[v];
        if w == usize::MAX {
            // flip the alternating path ending at v
            let mut v = v;
            while let Some(u) = path.pop() {
                let next = match_left[u];
                match_left[u] = v;
                match_right[v] = u;
                v = next;
            }
            return true;
        }
        if dist[w] == dist[u] + 1 {
            path.push(w);
        }
    }
    false
}
