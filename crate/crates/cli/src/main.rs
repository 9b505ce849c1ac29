use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hoctop::analytics::bottleneck_distance;
use hoctop::bench::{self, CountingAllocator};
use hoctop::io as hio;
use hoctop::oracle;
use hoctop::synth::{self, ShapeSpec};
use hoctop_cli::plot::{render_plots, PlotKind};
use hoctop_cli::report::{compute_report, format_table};

#[global_allocator]
static ALLOC: CountingAllocator = CountingAllocator;

/// Count persistent holes in a noisy planar point cloud.
#[derive(Debug, Parser)]
#[command(name = "hoctop", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the persistence diagram of a cloud.
    Compute(ComputeArgs),
    /// Sample a noisy cloud from a shape with known holes.
    Synth(SynthArgs),
    /// Check the sweep against the brute-force oracles on random clouds.
    Verify {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the inferred number of holes and the most likely counts.
    Infer { cloud: PathBuf },
    /// Time the pipeline on uniform clouds of growing size.
    Bench {
        #[arg(long, default_value_t = 1_000_000)]
        max_n: usize,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Bottleneck distance between two pair CSV files.
    Bottleneck { first: PathBuf, second: PathBuf },
}

#[derive(Debug, Args)]
struct ComputeArgs {
    cloud: PathBuf,
    /// Print the full report as JSON.
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Print the pairs as `birth,death` CSV.
    #[arg(long)]
    csv: bool,
    /// Write diagram.svg, barcode.svg and staircase.svg into this directory.
    #[arg(long)]
    svg_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ShapeKind {
    Wheel,
    Lattice,
    Polygon,
}

#[derive(Debug, Args)]
struct SynthArgs {
    shape: ShapeKind,
    #[arg(long, default_value_t = 7)]
    spokes: usize,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 3)]
    rows: usize,
    #[arg(long, default_value_t = 3)]
    cols: usize,
    #[arg(long, default_value_t = 1.0)]
    cell: f64,
    /// Polygon vertices as `x,y` lines.
    #[arg(long, required_if_eq("shape", "polygon"))]
    poly: Option<PathBuf>,
    #[arg(long)]
    points: usize,
    #[arg(long)]
    noise: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

/// Failures that are not the user's fault.
#[derive(Debug)]
struct InternalFailure(String);

impl std::fmt::Display for InternalFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InternalFailure {}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) if e.is::<InternalFailure>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        // the panic hook has already printed the message
        Err(_) => ExitCode::from(2),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Compute(args) => compute(args),
        Command::Synth(args) => synth_cmd(args),
        Command::Verify { n, trials, seed } => verify(n, trials, seed),
        Command::Infer { cloud } => infer(&cloud),
        Command::Bench { max_n, repeats, seed } => bench_cmd(max_n, repeats, seed),
        Command::Bottleneck { first, second } => {
            let d1 = read_pairs(&first)?;
            let d2 = read_pairs(&second)?;
            println!("{}", bottleneck_distance(&d1, &d2));
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<hoctop::delaunay::Cloud> {
    hio::read_cloud(path).with_context(|| format!("{}", path.display()))
}

fn read_pairs(path: &Path) -> Result<hoctop::analytics::Diagram> {
    let file = File::open(path).with_context(|| format!("{}", path.display()))?;
    hio::read_pairs(file).with_context(|| format!("{}", path.display()))
}

fn compute(args: ComputeArgs) -> Result<()> {
    let cloud = load(&args.cloud)?;
    let report = compute_report(&cloud, &args.cloud.display().to_string())?;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    if args.json {
        serde_json::to_writer_pretty(&mut out, &report)?;
        writeln!(out)?;
    } else if args.csv {
        hio::write_pairs(&mut out, &report.diagram())?;
    } else {
        out.write_all(format_table(&report).as_bytes())?;
    }
    out.flush()?;
    if let Some(dir) = args.svg_dir {
        fs::create_dir_all(&dir).with_context(|| format!("{}", dir.display()))?;
        for (kind, svg) in render_plots(&report, &PlotKind::ALL) {
            let path = dir.join(format!("{}.svg", kind.file_stem()));
            fs::write(&path, svg).with_context(|| format!("{}", path.display()))?;
        }
    }
    Ok(())
}

fn synth_cmd(args: SynthArgs) -> Result<()> {
    let spec = match args.shape {
        ShapeKind::Wheel => ShapeSpec::Wheel { spokes: args.spokes, radius: args.radius },
        ShapeKind::Lattice => ShapeSpec::Lattice { rows: args.rows, cols: args.cols, cell: args.cell },
        ShapeKind::Polygon => {
            let path = args.poly.expect("clap enforces --poly for polygons");
            let file = File::open(&path).with_context(|| format!("{}", path.display()))?;
            synth::polygon_from_csv(file).with_context(|| format!("{}", path.display()))?
        }
    };
    let cloud = synth::sample_shape(&spec, args.points, args.noise, args.seed)?;
    let file = File::create(&args.out).with_context(|| format!("{}", args.out.display()))?;
    let mut w = BufWriter::new(file);
    hio::write_points(&mut w, cloud.points())?;
    w.flush()?;
    log::info!("wrote {} points with {} holes to {}", cloud.len(), spec.hole_count(), args.out.display());
    Ok(())
}

fn verify(n: usize, trials: usize, seed: u64) -> Result<()> {
    if n < 3 {
        bail!("verify needs at least 3 points per cloud, got {n}");
    }
    let mut passed = 0;
    for t in 0..trials {
        let cloud = bench::uniform_cloud(n, seed.wrapping_add(t as u64));
        let r = oracle::verify_equivalence(&cloud)?;
        if r.equal && r.mismatches.is_empty() {
            passed += 1;
        } else {
            for m in &r.mismatches {
                eprintln!("trial {t}: {m}");
            }
        }
    }
    println!("{passed}/{trials} oracle-equal");
    if passed != trials {
        return Err(InternalFailure(format!("{} of {trials} trials disagree with the oracles", trials - passed)).into());
    }
    Ok(())
}

fn infer(path: &Path) -> Result<()> {
    let cloud = load(path)?;
    let report = compute_report(&cloud, &path.display().to_string())?;
    println!("holes: {}", report.inferred.holes);
    println!("gap: {}", report.inferred.gap);
    for (k, p) in &report.probabilities {
        println!("P({k}) = {:.4}%", 100.0 * p);
    }
    Ok(())
}

fn bench_cmd(max_n: usize, repeats: usize, seed: u64) -> Result<()> {
    if max_n < 1000 {
        bail!("--max-n must be at least 1000, got {max_n}");
    }
    if repeats == 0 {
        bail!("--repeats must be at least 1");
    }
    let rows = bench::scaling_table(&bench::default_sizes(max_n), repeats, seed);
    println!(
        "{:>9} {:>12} {:>12} {:>12} {:>12} {:>16} {:>14} {:>10}",
        "n", "triangulate", "sort", "sweep", "total", "ns/(n log2 n)", "peak bytes", "bytes/pt"
    );
    for r in &rows {
        let t = &r.timings;
        println!(
            "{:>9} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>16.2} {:>14} {:>10.1}",
            r.n,
            t.triangulate,
            t.sort,
            t.sweep,
            t.total,
            r.ns_per_n_log_n,
            r.peak_bytes,
            r.peak_bytes as f64 / r.n as f64
        );
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r.ns_per_n_log_n).collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    println!("ratio spread: {:.2}x", hi / lo);
    Ok(())
}
