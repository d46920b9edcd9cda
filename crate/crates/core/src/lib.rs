//! Quantitative Banach-Saks measures over computable sequence spaces.
//!
//! Vectors are eventually constant rational sequences ([`FiniteVector`]) normed
//! by a [`SpaceDescriptor`]. On top of that sit a catalog of named sequences,
//! finite-horizon estimators for the Cesàro, separation, and spreading-model
//! quantities, an exact cross-polytope minimizer, a finite Ramsey toolkit, and
//! a verification suite.

pub mod admissible;
pub mod catalog;
pub mod dense;
pub mod distortion;
pub mod error;
pub mod estimate;
pub mod format;
pub mod functional;
pub mod lp;
pub mod polytope;
pub mod ramsey;
pub mod rational;
pub mod space;
pub mod vector;
pub mod verify;

pub use error::{Error, Result};
pub use rational::{rat, Rational, Value};
pub use space::{norm, norm_exact, norm_f64, BlockRule, Exponent, SpaceDescriptor};
pub use vector::{CoordIndex, FiniteVector};
