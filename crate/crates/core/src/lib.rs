//! Handwritten digit recognition from two shape descriptors.
//!
//! A grayscale glyph is binarized with Otsu's threshold, cropped to its
//! bounding box and resized. Two feature families are extracted:
//!
//! * [`dcc`]: Freeman chain codes traced along every outer and inner contour,
//!   histogrammed per block of a 30x30 image (800 values on a 10x10 grid).
//! * [`rlc`]: horizontal and vertical pixel-transition counts over a 3x3
//!   zoning of a 72x72 image (18 values).
//!
//! Each feature family feeds a k-nearest-neighbor and a ridge-regression
//! linear classifier, and [`fusion`] merges the four votes by majority with a
//! fixed voter priority for ties.
//!
//! ```
//! use numeral_fusion::config::RunConfig;
//! use numeral_fusion::data_io::generate_synthetic;
//! use numeral_fusion::eval::run_experiment;
//!
//! let ds = generate_synthetic(7, 10);
//! let (_, report) = run_experiment(&ds, &RunConfig::default()).unwrap();
//! assert_eq!(report.test_count, 20);
//! ```

pub mod classify;
pub mod cli;
pub mod config;
pub mod data_io;
pub mod dcc;
pub mod error;
pub mod eval;
pub mod features;
pub mod fusion;
pub mod imaging;
pub mod persist;
pub mod rlc;

pub use error::{Error, Result};
