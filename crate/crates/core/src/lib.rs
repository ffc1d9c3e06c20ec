//! Deterministic symbolic regression by exhaustive enumeration of a
//! restricted expression grammar.
//!
//! Sentences are derived best-first from the start symbol. Semantically
//! equivalent expressions are recognised by a hash of their canonical form
//! and visited once; coefficients are fitted by Levenberg–Marquardt and
//! models are ranked by normalized mean squared error.
//!
//! ```
//! use esr_core::data::generate;
//! use esr_core::search::{run, SearchConfig};
//!
//! let data = generate("nguyen-1", 1).unwrap();
//! let cfg = SearchConfig {
//!     max_variable_refs: 3,
//!     max_evaluated_sentences: 200,
//!     ..SearchConfig::default()
//! };
//! let report = run(&data, cfg).unwrap();
//! assert!(report.best.train_nmse <= 1.0);
//! ```

pub mod canon;
pub mod data;
pub mod enumerate;
pub mod expr;
pub mod fit;
pub mod grammar;
pub mod heuristic;
mod par;
pub mod search;

pub use par::PARALLEL_BUILD;

/// Version string embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
