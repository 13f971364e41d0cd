//! Static cutting force prediction for general uncut chip geometries.
//!
//! The crate predicts turning and threading forces from the planar uncut
//! chip area. Next to the classical Colwell (equivalent chord) and Young
//! (straight perpendicular segments) decompositions it implements a curved
//! chip thickness model: a compressed-plate finite element solve over the
//! chip area yields a displacement-gradient flow field whose streamlines
//! define curved chip segments, their lengths being the local uncut chip
//! thickness. Forces follow from empirical cutting characteristics and the
//! orthogonal-to-oblique transformation, summed per element in the local
//! equivalent oblique frame.
//!
//! The pipeline, end to end:
//!
//! ```
//! use cutforce::geometry::{self, ToolGeometry, ProcessParams};
//! use cutforce::{plate_fe, chipflow, force};
//!
//! let tool = ToolGeometry::from_degrees(90.0, 60.0, 0.4, 0.0, 0.0)?;
//! let process = ProcessParams::new(0.1, 1.0)?;
//! let region = geometry::build_turning_region(&tool, &process)?;
//! let mesh = geometry::triangulate(&region, 0.05)?;
//! let solution = plate_fe::solve_plate(&mesh, 0.3)?;
//! let field = plate_fe::gradient_field(&mesh, &solution)?;
//! let decomp = chipflow::curved_decomposition(&mesh, &field, &tool)?;
//! let result = force::integrate_forces(&decomp, &force::MaterialModel::ti6al4v())?;
//! println!("F = {:?} N", result.force);
//! # Ok::<(), cutforce::Error>(())
//! ```
//!
//! See the `examples/` directory for one runnable example per capability:
//! region construction, flow fields, streamlines, model comparison sweeps,
//! threading, and deflection compensation.

pub mod chipflow;
pub mod config;
pub mod error;
pub mod force;
pub mod geometry;
pub mod plate_fe;
pub mod point2;
pub mod svg;
pub mod sweep;
pub mod transforms;

pub use error::{Error, Result};
pub use point2::P2;
