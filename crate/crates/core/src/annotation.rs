//! The annotation sidecar: tokens, lemmas, UPOS tags, dependency arcs and
//! entity mentions for questions and contexts, produced by an external tagger.
//!
//! One JSON record per line, discriminated by `kind`:
//!
//! ```text
//! {"kind":"question","question_id":..,"tokens":[{"text","lemma","upos","start","end","head","deprel"}],"entities":[{"start_token","end_token","label","surface"}]}
//! {"kind":"context","context_id":..,"entities":[{"start","end","label","surface"}]}
//! ```
//!
//! Offsets count Unicode scalar values of the NFC-normalized text. Blank lines
//! and lines starting with `#` are skipped.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{ContextId, QaDataset};
use crate::error::{Error, Result};
use crate::text;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub lemma: String,
    /// Universal POS tag, e.g. `NOUN`, `ADJ`, `AUX`.
    pub upos: String,
    pub start: usize,
    pub end: usize,
    /// Index of the dependency head; the root points at itself.
    pub head: usize,
    pub deprel: String,
}

/// Entity mention in a question, as a token range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionEntity {
    pub start_token: usize,
    /// Exclusive.
    pub end_token: usize,
    pub label: String,
    pub surface: String,
}

/// Entity mention in a context, as a character range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextEntity {
    pub start: usize,
    pub end: usize,
    pub label: String,
    pub surface: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedQuestion {
    pub question_id: String,
    pub tokens: Vec<Token>,
    #[serde(default)]
    pub entities: Vec<QuestionEntity>,
}

impl AnnotatedQuestion {
    /// Character span of an entity mention in the question.
    pub fn entity_span(&self, e: &QuestionEntity) -> std::ops::Range<usize> {
        self.tokens[e.start_token].start..self.tokens[e.end_token - 1].end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedContext {
    pub context_id: ContextId,
    #[serde(default)]
    pub entities: Vec<ContextEntity>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SidecarRecord {
    Question(AnnotatedQuestion),
    Context(AnnotatedContext),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnnotationStore {
    questions: HashMap<String, AnnotatedQuestion>,
    contexts: HashMap<ContextId, AnnotatedContext>,
}

impl AnnotationStore {
    pub fn question(&self, id: &str) -> Option<&AnnotatedQuestion> {
        self.questions.get(id)
    }

    pub fn context(&self, id: &ContextId) -> Option<&AnnotatedContext> {
        self.contexts.get(id)
    }

    pub fn question_count(&self) -> usize {
        self.questions.len()
    }

    pub fn context_count(&self) -> usize {
        self.contexts.len()
    }

    /// Adds a record after checking its internal consistency.
    pub fn insert(&mut self, record: SidecarRecord) -> std::result::Result<(), String> {
        match record {
            SidecarRecord::Question(q) => {
                check_question(&q)?;
                if self.questions.contains_key(&q.question_id) {
                    return Err(format!("duplicate question_id {:?}", q.question_id));
                }
                self.questions.insert(q.question_id.clone(), q);
            }
            SidecarRecord::Context(c) => {
                check_context(&c)?;
                if self.contexts.contains_key(&c.context_id) {
                    return Err(format!("duplicate context_id {}", c.context_id));
                }
                self.contexts.insert(c.context_id.clone(), c);
            }
        }
        Ok(())
    }
}

pub fn load_sidecar(path: impl AsRef<Path>) -> Result<AnnotationStore> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_sidecar(BufReader::new(file), path)
}

pub fn read_sidecar(reader: impl BufRead, source: impl AsRef<Path>) -> Result<AnnotationStore> {
    let source = source.as_ref();
    let mut store = AnnotationStore::default();
    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => Error::malformed(source, Some(line_no), e.to_string()),
            _ => Error::io(source, e),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(trimmed)
            .map_err(|e| Error::malformed(source, Some(line_no), e.to_string()))?;
        let record: SidecarRecord = serde_json::from_value(value)
            .map_err(|e| Error::schema(format!("{}:{line_no}", source.display()), e.to_string()))?;
        store
            .insert(record)
            .map_err(|m| Error::schema(format!("{}:{line_no}", source.display()), m))?;
    }
    Ok(store)
}

fn check_question(q: &AnnotatedQuestion) -> std::result::Result<(), String> {
    if q.tokens.is_empty() {
        return Err("question record has no tokens".into());
    }
    let mut roots = 0;
    let mut prev_end = 0;
    for (i, t) in q.tokens.iter().enumerate() {
        if t.start >= t.end {
            return Err(format!("token {i} has empty span {}..{}", t.start, t.end));
        }
        if text::char_len(&t.text) != t.end - t.start {
            return Err(format!(
                "token {i} text {:?} does not fit its offsets {}..{}",
                t.text, t.start, t.end
            ));
        }
        if t.start < prev_end {
            return Err(format!("token {i} overlaps or precedes the previous token"));
        }
        prev_end = t.end;
        if t.head >= q.tokens.len() {
            return Err(format!("token {i} has head {} outside the sentence", t.head));
        }
        if t.head == i {
            roots += 1;
        }
    }
    if roots != 1 {
        return Err(format!("expected exactly one root token, found {roots}"));
    }
    for (i, e) in q.entities.iter().enumerate() {
        if e.start_token >= e.end_token || e.end_token > q.tokens.len() {
            return Err(format!(
                "entity {i} has invalid token range {}..{}",
                e.start_token, e.end_token
            ));
        }
        if e.label.is_empty() {
            return Err(format!("entity {i} has an empty label"));
        }
        let span = q.entity_span(e);
        let first = &q.tokens[e.start_token].text;
        let last = &q.tokens[e.end_token - 1].text;
        if text::char_len(&e.surface) != span.end - span.start
            || !e.surface.starts_with(first.as_str())
            || !e.surface.ends_with(last.as_str())
        {
            return Err(format!(
                "entity {i} surface {:?} does not match its tokens",
                e.surface
            ));
        }
    }
    Ok(())
}

fn check_context(c: &AnnotatedContext) -> std::result::Result<(), String> {
    for (i, e) in c.entities.iter().enumerate() {
        if e.start >= e.end {
            return Err(format!("entity {i} has empty span {}..{}", e.start, e.end));
        }
        if e.label.is_empty() {
            return Err(format!("entity {i} has an empty label"));
        }
        if text::char_len(&e.surface) != e.end - e.start {
            return Err(format!(
                "entity {i} surface {:?} does not fit its offsets {}..{}",
                e.surface, e.start, e.end
            ));
        }
    }
    Ok(())
}

/// A disagreement between a sidecar and the corpus it annotates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    MissingQuestion { question_id: String },
    MissingContext { context_id: ContextId },
    UnknownQuestion { question_id: String },
    UnknownContext { context_id: ContextId },
    OffsetMismatch { record: String, detail: String },
    NotNormalized { record: String, detail: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingQuestion { question_id } => {
                write!(f, "answerable question {question_id} has no annotation")
            }
            Violation::MissingContext { context_id } => {
                write!(f, "context {context_id} has no annotation")
            }
            Violation::UnknownQuestion { question_id } => {
                write!(f, "annotation for question {question_id} not in the corpus")
            }
            Violation::UnknownContext { context_id } => {
                write!(f, "annotation for context {context_id} not in the corpus")
            }
            Violation::OffsetMismatch { record, detail } => write!(f, "{record}: {detail}"),
            Violation::NotNormalized { record, detail } => {
                write!(f, "{record}: not NFC-normalized: {detail}")
            }
        }
    }
}

/// Everything that would stop the corpus from being augmented with this
/// store. An empty result means every answerable question and its context are
/// annotated and all offsets agree with the (NFC-normalized) corpus text.
pub fn validate_against(store: &AnnotationStore, d: &QaDataset) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut seen_questions = HashSet::new();
    let mut seen_contexts = HashSet::new();
    let mut needed_contexts = BTreeSet::new();

    for paragraph in d.paragraphs() {
        seen_contexts.insert(&paragraph.context_id);
        let mut needs_context = false;
        for q in &paragraph.qas {
            seen_questions.insert(q.id.as_str());
            let annotated = store.question(&q.id);
            if q.is_impossible {
                if let Some(a) = annotated {
                    check_question_text(a, &q.question, &mut violations);
                }
                continue;
            }
            needs_context = true;
            match annotated {
                Some(a) => check_question_text(a, &q.question, &mut violations),
                None => violations.push(Violation::MissingQuestion {
                    question_id: q.id.clone(),
                }),
            }
        }
        match store.context(&paragraph.context_id) {
            Some(c) => {
                if needed_contexts.insert(&paragraph.context_id) {
                    check_context_text(c, &paragraph.context, &mut violations);
                }
            }
            None if needs_context && needed_contexts.insert(&paragraph.context_id) => {
                violations.push(Violation::MissingContext {
                    context_id: paragraph.context_id.clone(),
                });
            }
            None => {}
        }
    }

    let mut unknown_q: Vec<_> = store
        .questions
        .keys()
        .filter(|id| !seen_questions.contains(id.as_str()))
        .cloned()
        .collect();
    unknown_q.sort();
    violations.extend(
        unknown_q
            .into_iter()
            .map(|question_id| Violation::UnknownQuestion { question_id }),
    );
    let mut unknown_c: Vec<_> = store
        .contexts
        .keys()
        .filter(|id| !seen_contexts.contains(id))
        .cloned()
        .collect();
    unknown_c.sort();
    violations.extend(
        unknown_c
            .into_iter()
            .map(|context_id| Violation::UnknownContext { context_id }),
    );
    violations
}

fn check_question_text(a: &AnnotatedQuestion, question: &str, out: &mut Vec<Violation>) {
    let record = format!("question {}", a.question_id);
    let question = text::nfc(question);
    for (i, t) in a.tokens.iter().enumerate() {
        if !text::is_normalized(&t.text) {
            out.push(Violation::NotNormalized {
                record: record.clone(),
                detail: format!("token {i} {:?}", t.text),
            });
        }
        let found = text::char_slice(&question, t.start..t.end);
        if found != Some(t.text.as_str()) {
            out.push(Violation::OffsetMismatch {
                record: record.clone(),
                detail: format!(
                    "token {i} {:?} at {}..{} reads {:?} in the question",
                    t.text, t.start, t.end, found
                ),
            });
        }
    }
    for (i, e) in a.entities.iter().enumerate() {
        let found = text::char_slice(&question, a.entity_span(e));
        if found != Some(e.surface.as_str()) {
            out.push(Violation::OffsetMismatch {
                record: record.clone(),
                detail: format!("entity {i} {:?} reads {:?} in the question", e.surface, found),
            });
        }
    }
}

fn check_context_text(c: &AnnotatedContext, context: &str, out: &mut Vec<Violation>) {
    let record = format!("context {}", c.context_id);
    let context = text::nfc(context);
    for (i, e) in c.entities.iter().enumerate() {
        if !text::is_normalized(&e.surface) {
            out.push(Violation::NotNormalized {
                record: record.clone(),
                detail: format!("entity {i} {:?}", e.surface),
            });
        }
        let found = text::char_slice(&context, e.start..e.end);
        if found != Some(e.surface.as_str()) {
            out.push(Violation::OffsetMismatch {
                record: record.clone(),
                detail: format!(
                    "entity {i} {:?} at {}..{} reads {:?} in the context",
                    e.surface, e.start, e.end, found
                ),
            });
        }
    }
}
