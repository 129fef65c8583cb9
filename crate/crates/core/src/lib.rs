//! Tooling for evaluating and producing singable lyrics translations.
//!
//! The crate is organised around the life cycle of one lyric line:
//!
//! * [`data`] holds the dataset schema and the compact, copyright-safe line
//!   fingerprint used to re-attach externally fetched lyrics.
//! * [`syllable`] normalizes text and counts syllables (or morae) per language.
//! * [`phonetics`] transcribes text into IPA symbols and measures edit distance.
//! * [`metrics`] scores a predicted line against a reference and aggregates.
//! * [`providers`] is the boundary to generation and embedding services.
//! * [`pipeline`] runs the staged, syllable-constrained translation prompt.
//! * [`harness`] wires the above into translate / evaluate / ablate / stats runs.

pub mod data;
pub mod harness;
pub mod lang;
pub mod metrics;
pub mod phonetics;
pub mod pipeline;
pub mod providers;
pub mod syllable;

pub use lang::{LanguageTag, ParseLanguageError};
pub use metrics::{CorpusReport, LineScore, ReferenceKind, SyllableErrorParams};
pub use phonetics::{IpaString, RuleBook};
pub use syllable::{NormalizationPolicy, SyllableSegmentation, Syllabifier};
