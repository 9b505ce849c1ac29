//! Counting holes in planar point clouds across all scales.
//!
//! The pipeline triangulates the cloud, sorts its edges by decreasing length
//! and sweeps them with a union-find over the dual graph, producing the
//! persistence pairs of every hole in the union of disks around the points.
//!
//! ```
//! use hoctop::{run_hoctop, Cloud};
//!
//! let square = Cloud::from_xy(&[(0., 0.), (2., 0.), (2., 2.), (0., 2.)]).unwrap();
//! let d = run_hoctop(&square).unwrap();
//! assert_eq!(d.len(), 1);
//! assert_eq!(d.pairs()[0].birth, 1.0);
//! ```

pub mod analytics;
pub mod bench;
pub mod delaunay;
pub mod forest;
pub mod geom;
pub mod io;
pub mod oracle;
pub mod synth;

pub use analytics::{
    barcode, bottleneck_distance, hole_probabilities, infer_hole_count, staircase, Barcode, Diagram,
    HoleProbabilityTable, Staircase,
};
pub use delaunay::{triangulate, Cloud, CloudError, Triangulation, TriangulationError};
pub use forest::{run_hoctop, PersistencePair};
pub use geom::Point2;
pub use synth::{sample_shape, ShapeSpec};
