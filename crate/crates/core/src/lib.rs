//! CPU-only pedestrian detection.
//!
//! Two detector pipelines share one set of image primitives:
//!
//! - batch LBP codes read off an integral image, scored by a discrete AdaBoost
//!   ensemble of 256-entry lookup-table weak learners;
//! - HOG descriptors whose per-pixel orientation votes come from a precomputed
//!   `(dx, dy)` table, scored by a linear SVM.
//!
//! Both run inside the same sliding-window pyramid scanner ([`detector`]) and are
//! scored with FPPI / miss rate ([`eval`]). Training data preparation lives in
//! [`dataset`]; trainers and hard-negative mining in [`classify`].

pub mod classify;
pub mod dataset;
pub mod detector;
pub mod error;
pub mod eval;
pub mod hog;
pub mod lbp;
pub mod pixel;
pub mod synth;

pub use error::{Error, Result};
pub use pixel::{GrayImage, IntegralImage, Rect};

/// Training/detection window width in pixels.
pub const WINDOW_W: usize = 32;
/// Training/detection window height in pixels.
pub const WINDOW_H: usize = 64;
