//! Length-aware evaluation toolkit for document-level machine translation.
//!
//! The crate groups the pieces needed to study how segment length interacts
//! with translation quality:
//!
//! - [`tokenizer`] — scoring tokenization (13a rules) and pluggable sentence
//!   length measurement.
//! - [`metrics`] — corpus BLEU and its document-level variants (d-BLEU over
//!   concatenated documents, ds-BLEU as a macro-average of per-document
//!   scores).
//! - [`realign`] — edit-distance based resegmentation of unsegmented
//!   hypotheses against reference sentences, plus score attachment.
//! - [`databuild`] — packing sentence pairs into pseudo-documents under a
//!   length budget (Gaussian, uniform, and fixed-length builders).
//! - [`positions`] — offset distributions of position-encoding schemes and
//!   the token-coverage profiles they induce.
//! - [`stats`] — paired significance testing and the comparison tables built
//!   on it.
//! - [`repetition`] — detection of degenerate long n-gram repeats.
//!
//! [`formats`] and [`report`] hold the file formats and table renderings the
//! command-line tool exposes.

pub mod databuild;
pub mod error;
pub mod formats;
pub mod metrics;
pub mod positions;
pub mod realign;
pub mod repetition;
pub mod report;
pub mod stats;
pub mod tokenizer;

pub use error::{Error, Result};
