//! Fluency scores for candidates: lower means more fluent.
//!
//! [`NgramModel`] is an add-k smoothed word n-gram model scored by
//! per-token perplexity. [`ExternalScoreTable`] reads scores computed
//! elsewhere, e.g. by a neural language model, from a TSV file.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::candidate::Candidate;
use crate::error::{Error, Result};

pub trait FluencyScorer: Sync {
    fn score(&self, candidate: &Candidate) -> Result<f64>;

    /// Scores in input order.
    fn score_all(&self, candidates: &[Candidate]) -> Result<Vec<f64>> {
        candidates.iter().map(|c| self.score(c)).collect()
    }
}

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";

/// Lowercased word tokens: maximal alphanumeric runs, and every other
/// non-space character on its own.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut word = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            word.extend(c.to_lowercase());
            continue;
        }
        if !word.is_empty() {
            tokens.push(std::mem::take(&mut word));
        }
        if !c.is_whitespace() {
            tokens.push(c.to_lowercase().collect());
        }
    }
    if !word.is_empty() {
        tokens.push(word);
    }
    tokens
}

type Id = u32;
const UNK_ID: Id = 0;
const EOS_ID: Id = 1;
const BOS_ID: Id = 2;

#[derive(Debug, Clone, Default)]
struct HistoryCounts {
    total: u64,
    next: HashMap<Id, u64>,
}

/// Word n-gram model with add-k smoothing:
/// `P(w | h) = (c(h, w) + k) / (c(h) + k * V)`, where `V` counts the training
/// vocabulary plus the unknown and end symbols. A history never seen in
/// training gets the uniform distribution `1 / V`.
#[derive(Debug, Clone)]
pub struct NgramModel {
    order: usize,
    k: f64,
    vocab: HashMap<String, Id>,
    counts: HashMap<Vec<Id>, HistoryCounts>,
}

impl NgramModel {
    pub const DEFAULT_ORDER: usize = 3;
    pub const DEFAULT_K: f64 = 0.1;

    pub fn train<S: AsRef<str>>(corpus: &[S], order: usize, k: f64) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut model = Self::empty(order, k)?;
        for sentence in corpus {
            let ids: Vec<Id> = tokenize(sentence.as_ref())
                .into_iter()
                .map(|t| model.intern(t))
                .collect();
            model.count(&ids);
        }
        Ok(model)
    }

    /// A model that has seen no text: every probability is `1 / V` with `V`
    /// the given words plus the unknown and end symbols.
    pub fn from_vocabulary<S: AsRef<str>>(words: &[S], order: usize, k: f64) -> Result<Self> {
        let mut model = Self::empty(order, k)?;
        for w in words {
            model.intern(w.as_ref().to_lowercase());
        }
        Ok(model)
    }

    fn empty(order: usize, k: f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::Config("n-gram order must be at least 1".into()));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Config(format!("smoothing k must be positive, got {k}")));
        }
        Ok(NgramModel {
            order,
            k,
            vocab: HashMap::new(),
            counts: HashMap::new(),
        })
    }

    fn intern(&mut self, word: String) -> Id {
        let next = self.vocab.len() as Id + 3;
        *self.vocab.entry(word).or_insert(next)
    }

    fn lookup(&self, word: &str) -> Id {
        self.vocab.get(word).copied().unwrap_or(UNK_ID)
    }

    /// The padded symbol sequence of a sentence, ending in the end symbol.
    fn padded(&self, ids: &[Id]) -> Vec<Id> {
        let mut seq = vec![BOS_ID; self.order - 1];
        seq.extend_from_slice(ids);
        seq.push(EOS_ID);
        seq
    }

    fn count(&mut self, ids: &[Id]) {
        let seq = self.padded(ids);
        for i in self.order - 1..seq.len() {
            let history = seq[i + 1 - self.order..i].to_vec();
            let slot = self.counts.entry(history).or_default();
            slot.total += 1;
            *slot.next.entry(seq[i]).or_default() += 1;
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Vocabulary size including the unknown and end symbols.
    pub fn vocabulary_size(&self) -> usize {
        self.vocab.len() + 2
    }

    fn prob_ids(&self, history: &[Id], word: Id) -> f64 {
        let v = self.vocabulary_size() as f64;
        let (c_hw, c_h) = match self.counts.get(history) {
            Some(h) => (h.next.get(&word).copied().unwrap_or(0), h.total),
            None => (0, 0),
        };
        (c_hw as f64 + self.k) / (c_h as f64 + self.k * v)
    }

    /// `P(word | history)`. The history holds the preceding `order - 1`
    /// tokens; use [`BOS`] for padding and [`EOS`] to ask for the end symbol.
    /// Unknown words map to [`UNK`].
    pub fn prob(&self, history: &[&str], word: &str) -> f64 {
        assert_eq!(history.len(), self.order - 1, "history length must be order - 1");
        let id = |w: &str| match w {
            BOS => BOS_ID,
            EOS => EOS_ID,
            UNK => UNK_ID,
            w => self.lookup(w),
        };
        let h: Vec<Id> = history.iter().map(|w| id(w)).collect();
        self.prob_ids(&h, id(word))
    }

    /// `exp` of the negative mean log-probability over the tokens of `text`
    /// followed by the end symbol.
    pub fn perplexity(&self, text: &str) -> f64 {
        let ids: Vec<Id> = tokenize(text).iter().map(|t| self.lookup(t)).collect();
        let seq = self.padded(&ids);
        let n = seq.len() - (self.order - 1);
        let log_sum: f64 = (self.order - 1..seq.len())
            .map(|i| self.prob_ids(&seq[i + 1 - self.order..i], seq[i]).ln())
            .sum();
        (-log_sum / n as f64).exp()
    }

    /// Observed histories, for normalization checks.
    pub fn histories(&self) -> Vec<Vec<String>> {
        let mut names: HashMap<Id, &str> = self.vocab.iter().map(|(w, &i)| (i, w.as_str())).collect();
        names.extend([(UNK_ID, UNK), (EOS_ID, EOS), (BOS_ID, BOS)]);
        self.counts
            .keys()
            .map(|h| h.iter().map(|i| names[i].to_owned()).collect())
            .collect()
    }

    /// Training vocabulary plus [`UNK`] and [`EOS`].
    pub fn outcomes(&self) -> Vec<String> {
        let mut words: Vec<String> = self.vocab.keys().cloned().collect();
        words.push(UNK.into());
        words.push(EOS.into());
        words.sort();
        words
    }
}

impl FluencyScorer for NgramModel {
    fn score(&self, candidate: &Candidate) -> Result<f64> {
        Ok(self.perplexity(&candidate.text))
    }
}

/// Scores read from `key<TAB>score` rows. Keys are candidate ids or, failing
/// that, candidate texts.
#[derive(Debug, Clone, Default)]
pub struct ExternalScoreTable {
    scores: HashMap<String, f64>,
}

impl ExternalScoreTable {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let content = fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => Error::malformed(path, None, "not valid UTF-8"),
            _ => Error::io(path, e),
        })?;
        Self::parse(&content, path)
    }

    pub fn parse(content: &str, source: impl AsRef<Path>) -> Result<Self> {
        let source = source.as_ref();
        let mut scores = HashMap::new();
        for (n, line) in content.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let malformed = |m: String| Error::malformed(source, Some(n + 1), m);
            let (key, value) = line
                .rsplit_once('\t')
                .ok_or_else(|| malformed("expected key<TAB>score".into()))?;
            let score: f64 = value
                .trim()
                .parse()
                .map_err(|_| malformed(format!("score {value:?} is not a number")))?;
            if !score.is_finite() || score < 0.0 {
                return Err(malformed(format!("score {value:?} is not a finite non-negative number")));
            }
            if scores.insert(key.to_owned(), score).is_some() {
                return Err(Error::DuplicateKey(key.to_owned()));
            }
        }
        Ok(ExternalScoreTable { scores })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.scores.get(key).copied()
    }
}

impl FluencyScorer for ExternalScoreTable {
    fn score(&self, candidate: &Candidate) -> Result<f64> {
        self.get(&candidate.id)
            .or_else(|| self.get(&candidate.text))
            .ok_or_else(|| Error::MissingScore(candidate.id.clone()))
    }
}

/// Writes `id<TAB>text` rows for an external scorer. Tabs and line breaks in
/// the text become spaces.
pub fn write_candidates_tsv(candidates: &[Candidate], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for c in candidates {
        out.push_str(&c.id);
        out.push('\t');
        out.extend(c.text.chars().map(|ch| if matches!(ch, '\t' | '\n' | '\r') { ' ' } else { ch }));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })
}
