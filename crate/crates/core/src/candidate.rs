use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::ContextId;
use crate::error::Error;

/// Which swap produced a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Antonym,
    Entity,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Antonym => "antonym",
            Strategy::Entity => "entity",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How the candidates of one seed question are reduced before output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FilterStrategy {
    /// Keep every candidate.
    NoFilter,
    /// Keep one candidate drawn uniformly with a per-seed RNG.
    Random,
    /// Keep the candidate with the lowest fluency score.
    MinScore,
}

impl FromStr for FilterStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "none" => Ok(FilterStrategy::NoFilter),
            "random" => Ok(FilterStrategy::Random),
            "ppl" => Ok(FilterStrategy::MinScore),
            other => Err(Error::Config(format!(
                "unknown filter {other:?}; expected none, random or ppl"
            ))),
        }
    }
}

impl fmt::Display for FilterStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FilterStrategy::NoFilter => "none",
            FilterStrategy::Random => "random",
            FilterStrategy::MinScore => "ppl",
        })
    }
}

/// One proposed unanswerable question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    /// `<seed_id>-<strategy>-<k>`, `k` being the position in the seed's
    /// deterministic candidate order. Becomes the generated question id.
    pub id: String,
    pub seed_id: String,
    pub context_id: ContextId,
    pub strategy: Strategy,
    /// Character range in the seed question.
    pub replaced_span: Range<usize>,
    pub original: String,
    pub replacement: String,
    pub text: String,
}

/// An answerable question handed to an augmenter. `question` must be the
/// NFC-normalized text the annotation offsets refer to.
#[derive(Debug, Clone, Copy)]
pub struct Seed<'a> {
    pub id: &'a str,
    pub question: &'a str,
    pub context_id: &'a ContextId,
}

impl Seed<'_> {
    /// Candidate replacing `span` of the question, or `None` when the
    /// replacement would leave the text unchanged or the span is invalid.
    pub(crate) fn swap(
        &self,
        strategy: Strategy,
        k: usize,
        span: Range<usize>,
        replacement: String,
    ) -> Option<Candidate> {
        let original = crate::text::char_slice(self.question, span.clone())?.to_owned();
        if original == replacement {
            return None;
        }
        let text = crate::text::replace_chars(self.question, span.clone(), &replacement)?;
        Some(Candidate {
            id: candidate_id(self.id, strategy, k),
            seed_id: self.id.to_owned(),
            context_id: self.context_id.clone(),
            strategy,
            replaced_span: span,
            original,
            replacement,
            text,
        })
    }
}

pub(crate) fn candidate_id(seed_id: &str, strategy: Strategy, k: usize) -> String {
    format!("{seed_id}-{strategy}-{k}")
}

/// Per-seed RNG seed, so that the pick for a question does not depend on which
/// other questions are processed or in what order.
pub fn derive_seed(global_seed: u64, strategy: Strategy, seed_id: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(global_seed.to_le_bytes());
    hasher.update(strategy.as_str().as_bytes());
    hasher.update([0u8]);
    hasher.update(seed_id.as_bytes());
    let digest = hasher.finalize();
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(head)
}

/// Uniform index into `0..len` driven by `rng_seed`.
pub(crate) fn uniform_index(rng_seed: u64, len: usize) -> usize {
    debug_assert!(len > 0);
    ChaCha8Rng::seed_from_u64(rng_seed).random_range(0..len)
}
