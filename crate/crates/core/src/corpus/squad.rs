use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use super::{question_path, AnswerSpan, Article, Paragraph, Provenance, QaDataset, QuestionEntry};
use crate::error::{Error, Result};

pub fn load_squad(path: impl AsRef<Path>) -> Result<QaDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut raw = String::new();
    BufReader::new(file)
        .read_to_string(&mut raw)
        .map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => Error::malformed(path, None, "not valid UTF-8"),
            _ => Error::io(path, e),
        })?;
    let value: Value = serde_json::from_str(&raw)
        .map_err(|e| Error::malformed(path, Some(e.line()), e.to_string()))?;
    parse_squad(&value)
}

/// Builds and validates a dataset from an already parsed SQuAD 2.0 document.
pub fn parse_squad(value: &Value) -> Result<QaDataset> {
    let root = object(value, "$")?;
    let version = match root.get("version") {
        Some(v) => string(v, "version")?.to_owned(),
        None => return Err(Error::schema("$", "missing field \"version\"")),
    };
    let mut articles = Vec::new();
    for (ai, article) in array(field(root, "data", "$")?, "data")?.iter().enumerate() {
        let at = format!("data[{ai}]");
        let article = object(article, &at)?;
        let title = string(field(article, "title", &at)?, &format!("{at}.title"))?.to_owned();
        let mut paragraphs = Vec::new();
        let list = field(article, "paragraphs", &at)?;
        for (pi, paragraph) in array(list, &format!("{at}.paragraphs"))?.iter().enumerate() {
            let at = format!("data[{ai}].paragraphs[{pi}]");
            let paragraph = object(paragraph, &at)?;
            let context = string(field(paragraph, "context", &at)?, &format!("{at}.context"))?;
            let mut qas = Vec::new();
            let list = field(paragraph, "qas", &at)?;
            for (qi, qa) in array(list, &format!("{at}.qas"))?.iter().enumerate() {
                qas.push(parse_entry(qa, &question_path(ai, pi, qi))?);
            }
            paragraphs.push(Paragraph::new(context.to_owned(), qas));
        }
        articles.push(Article { title, paragraphs });
    }
    let dataset = QaDataset { version, articles };
    dataset.validate()?;
    Ok(dataset)
}

fn parse_entry(value: &Value, at: &str) -> Result<QuestionEntry> {
    let qa = object(value, at)?;
    let id = string(field(qa, "id", at)?, &format!("{at}.id"))?.to_owned();
    let at = format!("{at} (id {id})");
    let question = string(field(qa, "question", &at)?, &format!("{at}.question"))?.to_owned();
    let is_impossible = field(qa, "is_impossible", &at)?
        .as_bool()
        .ok_or_else(|| Error::schema(&at, "is_impossible is not a boolean"))?;
    let answers = spans(field(qa, "answers", &at)?, &format!("{at}.answers"))?;
    let plausible_answers = match qa.get("plausible_answers") {
        None | Some(Value::Null) => None,
        Some(v) => Some(spans(v, &format!("{at}.plausible_answers"))?),
    };
    let provenance = match qa.get("provenance") {
        None => Provenance::Original,
        Some(v) => serde_json::from_value(v.clone())
            .map_err(|_| Error::schema(&at, format!("unknown provenance {v}")))?,
    };
    Ok(QuestionEntry {
        id,
        question,
        is_impossible,
        answers,
        plausible_answers,
        provenance,
    })
}

fn spans(value: &Value, at: &str) -> Result<Vec<AnswerSpan>> {
    array(value, at)?
        .iter()
        .enumerate()
        .map(|(i, span)| {
            let at = format!("{at}[{i}]");
            let span = object(span, &at)?;
            let text = string(field(span, "text", &at)?, &at)?.to_owned();
            let answer_start = field(span, "answer_start", &at)?
                .as_u64()
                .ok_or_else(|| Error::schema(&at, "answer_start is not a non-negative integer"))?;
            Ok(AnswerSpan {
                text,
                answer_start: answer_start as usize,
            })
        })
        .collect()
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str, at: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| Error::schema(at, format!("missing field {name:?}")))
}

fn object<'a>(value: &'a Value, at: &str) -> Result<&'a Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| Error::schema(at, "expected an object"))
}

fn array<'a>(value: &'a Value, at: &str) -> Result<&'a Vec<Value>> {
    value
        .as_array()
        .ok_or_else(|| Error::schema(at, "expected an array"))
}

fn string<'a>(value: &'a Value, at: &str) -> Result<&'a str> {
    value
        .as_str()
        .ok_or_else(|| Error::schema(at, "expected a string"))
}

#[derive(Serialize)]
struct DatasetOut<'a> {
    version: &'a str,
    data: Vec<ArticleOut<'a>>,
}

#[derive(Serialize)]
struct ArticleOut<'a> {
    title: &'a str,
    paragraphs: Vec<ParagraphOut<'a>>,
}

#[derive(Serialize)]
struct ParagraphOut<'a> {
    context: &'a str,
    qas: Vec<EntryOut<'a>>,
}

#[derive(Serialize)]
struct EntryOut<'a> {
    id: &'a str,
    question: &'a str,
    is_impossible: bool,
    answers: &'a [AnswerSpan],
    #[serde(skip_serializing_if = "Option::is_none")]
    plausible_answers: Option<&'a [AnswerSpan]>,
    // SQuAD tooling ignores unknown keys; original entries carry none.
    #[serde(skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

fn to_out(d: &QaDataset) -> DatasetOut<'_> {
    DatasetOut {
        version: &d.version,
        data: d
            .articles
            .iter()
            .map(|a| ArticleOut {
                title: &a.title,
                paragraphs: a
                    .paragraphs
                    .iter()
                    .map(|p| ParagraphOut {
                        context: &p.context,
                        qas: p
                            .qas
                            .iter()
                            .map(|q| EntryOut {
                                id: &q.id,
                                question: &q.question,
                                is_impossible: q.is_impossible,
                                answers: &q.answers,
                                plausible_answers: q.plausible_answers.as_deref(),
                                provenance: (q.provenance != Provenance::Original)
                                    .then_some(q.provenance),
                            })
                            .collect(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

/// Serialized SQuAD 2.0 JSON for `d`.
pub fn to_squad_json(d: &QaDataset) -> String {
    serde_json::to_string(&to_out(d)).expect("dataset serialization is infallible")
}

pub fn write_squad(d: &QaDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer(&mut out, &to_out(d)).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e.into(),
    })?;
    out.flush().map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })
}
