//! Color-space clustering for images built on a locally linear embedding.
//!
//! The pipeline maps pixels (or any point cloud) to a low-dimensional space
//! with LLE, repairs disconnected neighbor graphs by perturbing the
//! embedding cost matrix toward a cycle Laplacian, segments the embedded
//! cloud into one-dimensional subspaces gated by a color threshold, and uses
//! the resulting palette to seed LBG vector quantization.
//!
//! Module map:
//! - [`geometry`]: point clouds, metrics, k-nearest-neighbor search with
//!   duplicate exclusion
//! - [`lle`]: reconstruction weights, cost matrix, connectivity repair,
//!   eigensolvers, the embedding itself
//! - [`segmentation`]: seed selection, epsilon-ball SVD, dual-threshold
//!   assignment, the full clustering loop
//! - [`vq`]: LBG vector quantization and its center initializers
//! - [`imaging`]: image/cloud conversion, PPM codec, palettes, quality
//!   reports
//! - [`synthetic`]: torus-of-translated-squares and noisy-line generators

pub mod error;
pub mod geometry;
pub mod imaging;
pub mod lle;
pub mod segmentation;
pub mod synthetic;
pub mod vq;

pub use error::{Error, Result};
