//! TydiQA primary-task JSONL to SQuAD 2.0 conversion (English minimal-span
//! variant).
//!
//! Per example, over all of its annotations:
//! - any YES/NO annotation drops the example;
//! - otherwise every non-empty minimal span becomes an answer;
//! - with no minimal span, a passage answer drops the example;
//! - with neither, the example becomes an unanswerable question.
//!
//! The context is the whole document plaintext. Byte offsets from the raw file
//! are converted to character offsets into that plaintext.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use serde::Deserialize;
use serde_json::Value;

use super::{AnswerSpan, Article, Paragraph, Provenance, QaDataset, QuestionEntry};
use crate::error::{Error, Result};
use crate::text;

const SUPPORTED_LANGUAGE: &str = "english";

#[derive(Debug, Deserialize)]
struct RawExample {
    annotations: Vec<RawAnnotation>,
    document_plaintext: String,
    #[serde(default)]
    document_title: String,
    example_id: Value,
    language: String,
    question_text: String,
}

#[derive(Debug, Deserialize)]
struct RawAnnotation {
    minimal_answer: RawMinimal,
    passage_answer: RawPassage,
    yes_no_answer: String,
}

#[derive(Debug, Deserialize)]
struct RawMinimal {
    plaintext_start_byte: i64,
    plaintext_end_byte: i64,
}

#[derive(Debug, Deserialize)]
struct RawPassage {
    candidate_index: i64,
}

/// Reads a `.jsonl` or `.jsonl.gz` TydiQA primary-task file.
pub fn convert_tydiqa_minspan(path: impl AsRef<Path>, language: &str) -> Result<QaDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    if path.extension().is_some_and(|ext| ext == "gz") {
        convert_tydiqa_reader(BufReader::new(MultiGzDecoder::new(file)), path, language)
    } else {
        convert_tydiqa_reader(BufReader::new(file), path, language)
    }
}

pub fn convert_tydiqa_reader(
    reader: impl BufRead,
    source: impl AsRef<Path>,
    language: &str,
) -> Result<QaDataset> {
    let source = source.as_ref();
    if language != SUPPORTED_LANGUAGE {
        return Err(Error::UnsupportedLanguage(language.to_owned()));
    }
    let mut articles = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => {
                Error::malformed(source, Some(line_no), e.to_string())
            }
            _ => Error::io(source, e),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawExample = serde_json::from_str(&line)
            .map_err(|e| Error::malformed(source, Some(line_no), e.to_string()))?;
        if raw.language != language {
            continue;
        }
        if let Some(article) = convert_example(raw)
            .map_err(|m| Error::malformed(source, Some(line_no), m))?
        {
            articles.push(article);
        }
    }
    let dataset = QaDataset {
        version: "tydiqa-minspan-english".into(),
        articles,
    };
    dataset.validate()?;
    Ok(dataset)
}

fn convert_example(raw: RawExample) -> std::result::Result<Option<Article>, String> {
    if raw.annotations.iter().any(|a| a.yes_no_answer != "NONE") {
        return Ok(None);
    }
    let plaintext = &raw.document_plaintext;
    let mut answers: Vec<AnswerSpan> = Vec::new();
    for a in &raw.annotations {
        let (start, end) = (a.minimal_answer.plaintext_start_byte, a.minimal_answer.plaintext_end_byte);
        if start < 0 || end <= start {
            continue;
        }
        let (start, end) = (start as usize, end as usize);
        let answer = plaintext
            .get(start..end)
            .ok_or_else(|| format!("minimal answer bytes {start}..{end} are not a valid span of the plaintext"))?;
        let answer_start = text::char_offset_of_byte(plaintext, start)
            .ok_or_else(|| format!("minimal answer starts inside a character at byte {start}"))?;
        let span = AnswerSpan {
            text: answer.to_owned(),
            answer_start,
        };
        if !answers.contains(&span) {
            answers.push(span);
        }
    }
    let has_passage = raw.annotations.iter().any(|a| a.passage_answer.candidate_index >= 0);
    if answers.is_empty() && has_passage {
        return Ok(None);
    }

    let id = match &raw.example_id {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => return Err(format!("example_id {other} is neither a number nor a string")),
    };
    let title = if raw.document_title.is_empty() {
        format!("tydiqa-{id}")
    } else {
        raw.document_title
    };
    let entry = QuestionEntry {
        id,
        question: raw.question_text,
        is_impossible: answers.is_empty(),
        answers,
        plausible_answers: None,
        provenance: Provenance::Original,
    };
    Ok(Some(Article {
        title,
        paragraphs: vec![Paragraph::new(raw.document_plaintext, vec![entry])],
    }))
}
