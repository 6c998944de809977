//! Unanswerable question generation for extractive QA corpora.
//!
//! Answerable seed questions are turned into unanswerable ones by swapping a
//! single word for a WordNet antonym or a single named entity for another
//! entity of the same type taken from the question's own context. Linguistic
//! annotation (lemmas, POS tags, dependency arcs, entity mentions) is read from
//! a JSONL sidecar produced by an external tagger; this crate never runs a
//! model itself.
//!
//! The modules follow the data flow:
//!
//! - [`corpus`]: SQuAD 2.0 corpora, merging, subsampling, TydiQA conversion.
//! - [`annotation`]: the sidecar format and its validation against a corpus.
//! - [`wordnet`]: a reader for the WordNet database files and antonym lookup.
//! - [`antonym`] and [`entity`]: the two swap strategies.
//! - [`scoring`]: fluency scorers used to pick among antonym candidates.
//! - [`pipeline`]: end-to-end runs as driven by the `qaswap` binary.

pub mod annotation;
pub mod antonym;
pub mod candidate;
pub mod corpus;
pub mod entity;
mod error;
pub mod pipeline;
pub mod report;
pub mod scoring;
pub mod text;
pub mod wordnet;

pub use candidate::{Candidate, FilterStrategy, Seed, Strategy};
pub use error::{Error, Result};
