use proptest::prelude::*;

use hoctop::analytics::{hole_probabilities, staircase, Diagram};
use hoctop::delaunay::{self, Cloud, TriangulationError};
use hoctop::forest::{self, PersistencePair};
use hoctop::geom::Point2;
use hoctop::oracle;

fn cloud_of(coords: &[(f64, f64)]) -> Option<Cloud> {
    let cloud = Cloud::from_xy(coords).ok()?;
    match delaunay::triangulate(&cloud) {
        Ok(_) => Some(cloud),
        Err(TriangulationError::AllCollinear | TriangulationError::TooFewPoints(_)) => None,
    }
}

fn random_coords() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3..60)
}

/// Small integer grids are full of cocircular and collinear subsets.
fn grid_coords() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0i32..6, 0i32..6), 3..30)
        .prop_map(|v| v.into_iter().map(|(x, y)| (x as f64, y as f64)).collect())
}

fn bits(d: &Diagram) -> Vec<(u64, u64)> {
    d.pairs().iter().map(|p| (p.birth.to_bits(), p.death.to_bits())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sweep_matches_reduction(coords in random_coords()) {
        let Some(cloud) = cloud_of(&coords) else { return Ok(()) };
        let fast = forest::run_hoctop(&cloud).unwrap();
        let slow = oracle::reduce_boundary_matrix(&oracle::alpha_filtration(&cloud).unwrap());
        let (equal, dev) = oracle::compare_diagrams(&fast, &slow);
        prop_assert!(equal, "deviation {}", dev);
    }

    #[test]
    fn sweep_matches_reduction_on_degenerate_grids(coords in grid_coords()) {
        let Some(cloud) = cloud_of(&coords) else { return Ok(()) };
        let fast = forest::run_hoctop(&cloud).unwrap();
        let slow = oracle::reduce_boundary_matrix(&oracle::alpha_filtration(&cloud).unwrap());
        prop_assert!(oracle::compare_diagrams(&fast, &slow).0);
    }

    #[test]
    fn input_order_does_not_matter(coords in random_coords(), rot in 0usize..60) {
        let Some(cloud) = cloud_of(&coords) else { return Ok(()) };
        let mut shuffled = coords.clone();
        shuffled.reverse();
        let k = rot % shuffled.len();
        shuffled.rotate_left(k);
        let a = forest::run_hoctop(&cloud).unwrap().off_diagonal();
        let b = forest::run_hoctop(&Cloud::from_xy(&shuffled).unwrap()).unwrap().off_diagonal();
        prop_assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn doubling_coordinates_doubles_every_pair(coords in random_coords()) {
        let Some(cloud) = cloud_of(&coords) else { return Ok(()) };
        let doubled: Vec<(f64, f64)> = coords.iter().map(|&(x, y)| (2.0 * x, 2.0 * y)).collect();
        let a = forest::run_hoctop(&cloud).unwrap();
        let b = forest::run_hoctop(&Cloud::from_xy(&doubled).unwrap()).unwrap();
        let scaled: Diagram = a.pairs().iter().map(|p| PersistencePair::new(2.0 * p.birth, 2.0 * p.death)).collect();
        prop_assert_eq!(bits(&scaled.off_diagonal()), bits(&b.off_diagonal()));
    }

    #[test]
    fn sweep_bookkeeping(coords in random_coords()) {
        let Some(cloud) = cloud_of(&coords) else { return Ok(()) };
        let tri = delaunay::triangulate(&cloud).unwrap();
        let order = delaunay::edges_sorted_desc(&tri);
        let (outcome, trace) = forest::sweep_traced(&tri, &order);
        let k = tri.triangles().len();
        let stats = outcome.stats;
        prop_assert_eq!(stats.cases.iter().sum::<usize>(), trace.len());
        prop_assert_eq!(stats.edges_processed, trace.len());
        // every case but the first adds one link, and the sweep stops at k links
        prop_assert_eq!(stats.cases[1] + stats.cases[2] + stats.cases[3], k);
        prop_assert_eq!(outcome.diagram.len(), stats.cases[3]);
        let bound = ((k + 1) as f64).log2().ceil() as usize + 1;
        prop_assert!(stats.max_find_steps <= bound);
        for w in outcome.pairs_in_sweep_order.windows(2) {
            prop_assert!(w[0].birth >= w[1].birth, "pairs come out by decreasing scale");
        }
        for p in outcome.diagram.pairs() {
            prop_assert!(p.birth > 0.0 && p.birth <= p.death && p.death.is_finite());
        }
    }

    #[test]
    fn staircase_counts_pairs_alive(coords in random_coords(), t in 0.0f64..1.0) {
        let Some(cloud) = cloud_of(&coords) else { return Ok(()) };
        let d = forest::run_hoctop(&cloud).unwrap();
        let s = staircase(&d);
        let Some((lo, hi)) = s.range() else { return Ok(()) };
        let alpha = lo + t * (hi - lo);
        let alive = d.off_diagonal().pairs().iter().filter(|p| p.birth <= alpha && alpha < p.death).count();
        prop_assert_eq!(s.count_at(alpha), alive);
        let total: f64 = hole_probabilities(&d).ranked().iter().map(|&(_, p)| p).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }
}

#[test]
fn repeated_runs_are_identical() {
    let cloud = hoctop::bench::uniform_cloud(2000, 99);
    let a = forest::run_hoctop(&cloud).unwrap();
    let b = forest::run_hoctop(&cloud).unwrap();
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn duplicates_are_dropped_before_triangulating() {
    let cloud = Cloud::new(vec![
        Point2::new(0., 0.),
        Point2::new(2., 0.),
        Point2::new(2., 2.),
        Point2::new(0., 2.),
        Point2::new(2., 2.),
        Point2::new(-0.0, 0.0),
    ])
    .unwrap();
    assert_eq!(cloud.len(), 4);
    assert_eq!(cloud.duplicates_removed(), 2);
    let d = forest::run_hoctop(&cloud).unwrap().off_diagonal();
    assert_eq!(d.pairs(), &[PersistencePair::new(1.0, 2f64.sqrt())]);
}

#[test]
fn degenerate_inputs_are_errors() {
    let line = Cloud::from_xy(&[(0., 0.), (1., 1.), (2., 2.), (3., 3.)]).unwrap();
    assert!(matches!(forest::run_hoctop(&line), Err(TriangulationError::AllCollinear)));
    let two = Cloud::from_xy(&[(0., 0.), (1., 1.)]).unwrap();
    assert!(matches!(forest::run_hoctop(&two), Err(TriangulationError::TooFewPoints(2))));
    assert!(Cloud::from_xy(&[(0., 0.), (f64::NAN, 1.), (2., 0.)]).is_err());
}
