//! Report building and plot rendering behind the `hoctop` binary.

pub mod plot;
pub mod report;

pub use plot::{render_plots, PlotKind};
pub use report::{compute_report, RunReport};
