//! Quadratic Weyl sums over the skew shift, continued fractions of the
//! rotation number, and finite-scale experiments on the skew-product cocycle.

pub mod acceptance;
pub mod calibration;
pub mod contfrac;
pub mod error;
pub mod exactangle;
pub mod experiments;
pub mod report;
pub mod renorm;
pub mod rng;
pub mod stats;
pub mod weylsum;

pub use error::{Error, Result};
pub use exactangle::{angle_from_rational, Angle};
