//! Sentence-level attribution of generated answers to source documents.
//!
//! Answer sentences are decomposed into information units, each unit is
//! matched to the smallest set of source sentences that entails it, and the
//! per-unit selections are merged into a ranked list per answer sentence.

pub mod attribute;
pub mod datasets;
pub mod decompose;
pub mod error;
pub mod eval;
pub mod http;
pub mod par;
pub mod retrieval;
pub mod text;
pub mod types;

pub use attribute::{
    attribute_answer, AttributionList, EntailmentScorer, LexicalEntailmentProxy, Pipeline, SelectionConfig,
    SelectionMode,
};
pub use decompose::{Decomposer, IdentityDecomposer, InformationUnit};
pub use error::{Error, Result};
pub use types::{AnswerRecord, AnswerSentence, SourceDocument, SourceSentence};

/// Version of this library, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
