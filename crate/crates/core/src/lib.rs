//! Exact subsequence matching over collections of time series.
//!
//! The crate follows the filter-and-refine pattern: windows of every data
//! sequence are reduced with a contractive transform ([`transforms`]),
//! packed into MBRs and indexed ([`index`]); queries are answered by
//! searching the reduced space with radii that cannot dismiss a true match
//! and refining the survivors with the true distance ([`matcher`]).
//!
//! ```
//! use tsmatch::index::{build_index, IndexConfig};
//! use tsmatch::matcher::{Algorithm, Matcher};
//! use tsmatch::transforms::Transform;
//! use tsmatch::windowing::WindowingKind;
//! use tsmatch::synth;
//!
//! let data = synth::random_walk_dataset(&mut synth::rng(7), 10, 256);
//! let config = IndexConfig::new(Transform::Paa { frames: 4 }, 16, WindowingKind::Sliding);
//! let index = build_index(&data, config).unwrap();
//! let query = data.sequences()[3].values()[40..104].to_vec();
//! let hits = Matcher::new(&index, &data).unwrap().range(Algorithm::Frm, &query, 0.5).unwrap();
//! assert!(hits.results.iter().any(|r| r.sequence_id == 3 && r.start == 40));
//! ```

pub mod cli;
pub mod distances;
pub mod error;
pub mod index;
pub mod lower_bounds;
pub mod matcher;
pub mod motifs;
pub mod sequences;
pub mod synth;
pub mod transforms;
pub mod windowing;

pub use error::{Error, Result};
