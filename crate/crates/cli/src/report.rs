use serde::{Deserialize, Serialize};

use hoctop::analytics::{hole_probabilities, infer_hole_count, Diagram};
use hoctop::bench::{self, StageTimings};
use hoctop::delaunay::{Cloud, TriangulationError};
use hoctop::forest::{PersistencePair, SweepStats};

/// Where the cloud came from and what was kept of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputInfo {
    pub source: String,
    pub points: usize,
    pub duplicates_removed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inference {
    pub holes: usize,
    /// Width of the widest persistence gap that separates holes from noise.
    pub gap: f64,
}

/// Everything one pipeline run produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub input: InputInfo,
    pub pairs: Vec<PersistencePair>,
    /// `(holes, probability)` for every count with positive probability,
    /// most likely first.
    pub probabilities: Vec<(usize, f64)>,
    pub inferred: Inference,
    pub timings: StageTimings,
    pub stats: SweepStats,
}

impl RunReport {
    pub fn diagram(&self) -> Diagram {
        Diagram::new(self.pairs.clone())
    }
}

pub fn compute_report(cloud: &Cloud, source: &str) -> Result<RunReport, TriangulationError> {
    let (diagram, stats, timings) = bench::timed_pipeline(cloud)?;
    let (holes, gap) = infer_hole_count(&diagram);
    Ok(RunReport {
        input: InputInfo {
            source: source.to_string(),
            points: cloud.len(),
            duplicates_removed: cloud.duplicates_removed(),
        },
        probabilities: hole_probabilities(&diagram).ranked(),
        pairs: diagram.pairs().to_vec(),
        inferred: Inference { holes, gap },
        timings,
        stats,
    })
}

/// Plain-text summary for the terminal.
pub fn format_table(report: &RunReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{} points from {} ({} duplicates removed)\n",
        report.input.points, report.input.source, report.input.duplicates_removed
    ));
    out.push_str(&format!("{:>16} {:>16} {:>16}\n", "birth", "death", "persistence"));
    for p in &report.pairs {
        out.push_str(&format!("{:>16.9} {:>16.9} {:>16.9}\n", p.birth, p.death, p.persistence()));
    }
    out.push_str("holes  probability\n");
    for (k, p) in &report.probabilities {
        out.push_str(&format!("{k:>5}  {:>10.4}%\n", 100.0 * p));
    }
    out.push_str(&format!("inferred holes: {} (gap {:.6})\n", report.inferred.holes, report.inferred.gap));
    let t = &report.timings;
    out.push_str(&format!(
        "time: triangulate {:.6}s, sort {:.6}s, sweep {:.6}s, total {:.6}s\n",
        t.triangulate, t.sort, t.sweep, t.total
    ));
    out
}
