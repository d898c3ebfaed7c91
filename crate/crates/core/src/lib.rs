//! Membership tests for sectional curvature bounds of algebraic curvature
//! operators: an exact decision procedure in dimension four and
//! semidefinite inner/outer relaxations in higher dimensions.

pub mod error;
pub mod dim4;
pub mod exactmath;
pub mod fixtures;
pub mod sdp;
pub mod relax;
pub mod sos;
pub mod tensorspace;
pub mod weitzenboeck;

pub use error::{Error, Result};
