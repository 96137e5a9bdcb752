//! Numerical laboratory for dyadic harmonic analysis.
//!
//! Functions and weights are cell-constant on a uniform mesh whose spacing is
//! `1/(3·2^L)`, so every cube of every shifted dyadic grid up to level `L` is
//! a union of whole cells and all cube integrals are exact for the data.
//! Suprema over cubes are taken over finite, window-clipped cube families and
//! are therefore lower bounds for the corresponding continuum quantities.

// negated comparisons reject NaN on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod examples;
pub mod func;
pub mod grid;
pub mod normest;
pub mod operators;
pub mod orlicz;
pub mod rational;
pub mod runner;
pub mod scan;
pub mod sparse;

pub use error::{LabError, Result};
pub use func::{ExponentTuple, Mesh, SampledFunction};
pub use grid::{shifted_grids, DyadicCube, GridFamily, Rational, RationalBox};
pub use orlicz::YoungFunction;
pub use sparse::SparseFamily;
