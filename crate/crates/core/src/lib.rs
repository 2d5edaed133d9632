//! Discrete harmonic maps from closed triangulated surfaces of genus at least
//! two onto hyperbolic surfaces given as Poincaré-disk fundamental polygons.
//!
//! Pipeline: [`mesh`] ingestion, [`uniformize`] to a flat hyperbolic metric
//! and canonical weights, [`cut`] into a disk, [`harmonic`] descent, and
//! [`remesh`] pull-back of a template through the converged map.

pub mod error;
pub mod cut;
pub mod exec;
pub mod fuchsian;
pub mod generate;
pub mod harmonic;
pub mod hypgeom;
pub mod mesh;
pub mod pipeline;
pub mod remesh;
pub mod render;
pub mod sparse;
pub mod uniformize;

pub use error::{Error, ErrorKind, Result};
pub use exec::Exec;
