//! Single-character recognition by run-midpoint sketches.
//!
//! A glyph is reduced to a [`Sketch`]: for every maximal black or white run
//! along rows and columns, a short segment centered on the run's middle pixel
//! is kept, its width set by a [`Bias`] fraction of the run length. A query
//! image is recognized by sampling it at every sketch point of every template,
//! after shifting the sampling frame so that the two black-pixel centroids
//! coincide, and ranking templates by the fraction of points that land on the
//! matching color.
//!
//! Module map:
//!
//! * [`raster`]: binary/gray images, Netpbm codecs, binarization, canvas
//!   normalization, centroids and translation.
//! * [`sketch`]: run detection and sketch extraction.
//! * [`matcher`]: centroid shift, match score and classification.
//! * [`templates`]: recognizer sets ("fonts") and their on-disk format.
//! * [`bench`]: distortions, seeded corpora and Table-style reports.

pub mod bench;
pub mod error;
mod fsutil;
pub mod matcher;
pub mod raster;
pub mod rng;
pub mod sketch;
pub mod templates;

pub use error::{Error, Result};
pub use fsutil::write_atomic;
pub use matcher::{classify, gravity_shift, match_score, MatchScore, Ranking, Shift};
pub use raster::{BinaryImage, Centroid, GrayImage, Pixel, Pnm};
pub use sketch::{extract_sketch, Bias, Direction, Directions, Sketch};
pub use templates::{TemplateEntry, TemplateSet};
