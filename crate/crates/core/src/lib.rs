//! Decide and certify whether a real beamsplitter, together with its
//! mode-permutation conjugates, densely generates SO(N).

pub mod angle;
pub mod engine;
pub mod error;
pub mod exact;
pub mod lie;
pub mod linalg;
pub mod matrix;
pub mod orbit;
pub mod so3;
pub mod words;

pub use error::{Error, Result};
pub use matrix::{RotationMatrix, SkewMatrix};
