//! Near-field multi-bounce MIMO channel workbench.
//!
//! * [`geometry`]: spherical-wavefront element geometry
//! * [`channel`]: measurement tensor synthesis
//! * [`scene`]: indoor scenes and ground-truth paths
//! * [`dictionary`]: propagation-graph candidate atoms
//! * [`estimator`]: graph-dictionary multi-bounce SAGE and the one-bounce baseline
//! * [`metrics`]: detection scoring
//! * [`io`]: tensor and estimate files

// `!(x > 0.0)` style checks are kept because they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod dictionary;
pub mod error;
pub mod estimator;
pub mod geometry;
pub mod io;
pub mod metrics;
pub mod par;
pub mod scene;

pub use error::{Error, Result};
pub use num_complex::Complex64;
