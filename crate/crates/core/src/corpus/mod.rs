//! SQuAD 2.0-shaped QA corpora.

mod squad;
mod tydiqa;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::text;

pub use squad::{load_squad, parse_squad, to_squad_json, write_squad};
pub use tydiqa::{convert_tydiqa_minspan, convert_tydiqa_reader};

/// Hex SHA-256 of a context string. Joins corpus, sidecar and candidates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ContextId(String);

impl ContextId {
    pub fn of(context: &str) -> Self {
        ContextId(hex::encode(Sha256::digest(context.as_bytes())))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ContextId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<String> for ContextId {
    fn from(s: String) -> Self {
        ContextId(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QaDataset {
    pub version: String,
    pub articles: Vec<Article>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Article {
    pub title: String,
    pub paragraphs: Vec<Paragraph>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Paragraph {
    pub context: String,
    pub context_id: ContextId,
    pub qas: Vec<QuestionEntry>,
}

impl Paragraph {
    pub fn new(context: String, qas: Vec<QuestionEntry>) -> Self {
        let context_id = ContextId::of(&context);
        Paragraph {
            context,
            context_id,
            qas,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerSpan {
    pub text: String,
    /// Character offset into the context.
    pub answer_start: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Original,
    AntonymAug,
    EntityAug,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuestionEntry {
    pub id: String,
    pub question: String,
    pub is_impossible: bool,
    pub answers: Vec<AnswerSpan>,
    pub plausible_answers: Option<Vec<AnswerSpan>>,
    pub provenance: Provenance,
}

/// A generated question waiting to be merged into the paragraph it was
/// derived from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedQuestion {
    pub context_id: ContextId,
    pub entry: QuestionEntry,
}

/// Position of a question inside a dataset, for error messages.
pub(crate) fn question_path(article: usize, paragraph: usize, question: usize) -> String {
    format!("data[{article}].paragraphs[{paragraph}].qas[{question}]")
}

impl QaDataset {
    pub fn empty(version: impl Into<String>) -> Self {
        QaDataset {
            version: version.into(),
            articles: Vec::new(),
        }
    }

    pub fn paragraphs(&self) -> impl Iterator<Item = &Paragraph> {
        self.articles.iter().flat_map(|a| a.paragraphs.iter())
    }

    /// All questions with their paragraph, in document order.
    pub fn questions(&self) -> impl Iterator<Item = (&Paragraph, &QuestionEntry)> {
        self.paragraphs()
            .flat_map(|p| p.qas.iter().map(move |q| (p, q)))
    }

    pub fn question_count(&self) -> usize {
        self.paragraphs().map(|p| p.qas.len()).sum()
    }

    /// Checks every structural invariant of the corpus.
    pub fn validate(&self) -> Result<()> {
        let mut ids = HashSet::new();
        for (ai, article) in self.articles.iter().enumerate() {
            if article.title.is_empty() {
                return Err(Error::schema(format!("data[{ai}]"), "empty article title"));
            }
            for (pi, paragraph) in article.paragraphs.iter().enumerate() {
                if paragraph.context_id != ContextId::of(&paragraph.context) {
                    return Err(Error::schema(
                        format!("data[{ai}].paragraphs[{pi}]"),
                        "context_id does not match the context text",
                    ));
                }
                for (qi, entry) in paragraph.qas.iter().enumerate() {
                    let at = || format!("{} (id {})", question_path(ai, pi, qi), entry.id);
                    if !ids.insert(entry.id.as_str()) {
                        return Err(Error::schema(at(), "duplicate question id"));
                    }
                    validate_entry(&paragraph.context, entry).map_err(|m| Error::schema(at(), m))?;
                }
            }
        }
        Ok(())
    }
}

fn validate_entry(context: &str, entry: &QuestionEntry) -> std::result::Result<(), String> {
    if entry.is_impossible && !entry.answers.is_empty() {
        return Err("unanswerable question carries answers".into());
    }
    if !entry.is_impossible && entry.answers.is_empty() {
        return Err("answerable question has no answers".into());
    }
    if entry.provenance != Provenance::Original && !entry.is_impossible {
        return Err("generated question must be unanswerable".into());
    }
    let context_len = text::char_len(context);
    for (i, answer) in entry.answers.iter().enumerate() {
        let end = answer.answer_start + text::char_len(&answer.text);
        if end > context_len {
            return Err(format!(
                "answers[{i}] spans {}..{end}, beyond the context length {context_len}",
                answer.answer_start
            ));
        }
        let found = text::char_slice(context, answer.answer_start..end).unwrap_or_default();
        if found != answer.text {
            return Err(format!(
                "answers[{i}] text {:?} does not match context {found:?} at offset {}",
                answer.text, answer.answer_start
            ));
        }
    }
    for (i, answer) in entry.plausible_answers.iter().flatten().enumerate() {
        if answer.answer_start > context_len {
            return Err(format!(
                "plausible_answers[{i}] starts at {}, beyond the context length {context_len}",
                answer.answer_start
            ));
        }
    }
    Ok(())
}

/// Appends each generated question to the paragraph with its context id.
///
/// When several paragraphs share a context, the first one in document order
/// receives the question.
pub fn merge_augmented(base: &QaDataset, generated: &[GeneratedQuestion]) -> Result<QaDataset> {
    let mut location: HashMap<&ContextId, (usize, usize)> = HashMap::new();
    let mut ids: HashSet<&str> = HashSet::new();
    for (ai, article) in base.articles.iter().enumerate() {
        for (pi, paragraph) in article.paragraphs.iter().enumerate() {
            location.entry(&paragraph.context_id).or_insert((ai, pi));
            ids.extend(paragraph.qas.iter().map(|q| q.id.as_str()));
        }
    }

    let mut placed = Vec::with_capacity(generated.len());
    for g in generated {
        let &(ai, pi) = location
            .get(&g.context_id)
            .ok_or_else(|| Error::UnknownContext(g.context_id.to_string()))?;
        if !ids.insert(g.entry.id.as_str()) {
            return Err(Error::DuplicateId(g.entry.id.clone()));
        }
        placed.push((ai, pi, &g.entry));
    }

    let mut merged = base.clone();
    for (ai, pi, entry) in placed {
        merged.articles[ai].paragraphs[pi].qas.push(entry.clone());
    }
    Ok(merged)
}

/// Nested uniform samples without replacement, one per requested size.
///
/// The pool is shuffled once under `seed` and every sample is a prefix of that
/// shuffle, so a smaller sample is always contained in a larger one. Each
/// sample is returned in pool order.
pub fn subsample<T: Clone>(pool: &[T], sizes: &[usize], seed: u64) -> Result<Vec<(usize, Vec<T>)>> {
    let mut distinct = BTreeSet::new();
    for &size in sizes {
        if size > pool.len() {
            return Err(Error::SampleTooLarge {
                requested: size,
                available: pool.len(),
            });
        }
        if !distinct.insert(size) {
            return Err(Error::Config(format!("sample size {size} requested twice")));
        }
    }

    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    Ok(sizes
        .iter()
        .map(|&size| {
            let mut picked = order[..size].to_vec();
            picked.sort_unstable();
            (size, picked.into_iter().map(|i| pool[i].clone()).collect())
        })
        .collect())
}

/// Generated questions of a dataset, i.e. every entry not marked original.
pub fn generated_questions(d: &QaDataset) -> Vec<GeneratedQuestion> {
    d.questions()
        .filter(|(_, q)| q.provenance != Provenance::Original)
        .map(|(p, q)| GeneratedQuestion {
            context_id: p.context_id.clone(),
            entry: q.clone(),
        })
        .collect()
}

/// The dataset with every generated question removed.
pub fn original_only(d: &QaDataset) -> QaDataset {
    let mut out = d.clone();
    for article in &mut out.articles {
        for paragraph in &mut article.paragraphs {
            paragraph.qas.retain(|q| q.provenance == Provenance::Original);
        }
    }
    out
}
