//! Quaternionic hyperbolic isometries: the group `Sp(n,1)`, the projective
//! model of quaternionic hyperbolic space, classification of isometries,
//! the quaternionic cross-ratio, and a Jørgensen-type test for two-generator
//! groups with a loxodromic generator.

pub mod batch;
pub mod crossratio;
pub mod error;
pub mod geometry;
pub mod jorgensen;
pub mod qmatrix;
pub mod quaternion;
pub mod spectral;
pub mod spn1;

pub use error::{Error, Result};
pub use geometry::{apply, bergman_distance, Position, ProjectivePoint, Projection};
pub use jorgensen::{jorgensen_test, TestOutcome, Verdict};
pub use qmatrix::QMatrix;
pub use quaternion::Quaternion;
pub use spectral::{classify, loxodromic_data, Kind};
pub use spn1::{is_member, SpElement};
