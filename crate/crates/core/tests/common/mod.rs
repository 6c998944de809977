#![allow(dead_code)]

pub mod invariants;
pub mod oracle;

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use qaswap::annotation::{
    AnnotatedContext, AnnotatedQuestion, AnnotationStore, ContextEntity, QuestionEntity, SidecarRecord, Token,
};
use qaswap::corpus::{AnswerSpan, Article, ContextId, Paragraph, Provenance, QaDataset, QuestionEntry};
use qaswap::wordnet::WordNetDb;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unicode_normalization::UnicodeNormalization;

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn data_dir() -> PathBuf {
    manifest_dir().join("tests/data")
}

pub fn fixture(name: &str) -> PathBuf {
    data_dir().join("fixtures").join(name)
}

/// `$WORDNET_DIR`, or `data/wordnet` at the workspace root.
pub fn wordnet_dir() -> PathBuf {
    let dir = std::env::var_os("WORDNET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| manifest_dir().join("../../data/wordnet"));
    assert!(
        dir.join("data.noun").is_file(),
        "WordNet 3.0 not found at {}; run scripts/fetch_wordnet.sh or set WORDNET_DIR",
        dir.display()
    );
    dir
}

pub fn wordnet() -> &'static WordNetDb {
    static DB: OnceLock<WordNetDb> = OnceLock::new();
    DB.get_or_init(|| WordNetDb::load(wordnet_dir()).expect("WordNet loads"))
}

pub fn env_path(var: &str) -> Option<PathBuf> {
    std::env::var_os(var).map(PathBuf::from).filter(|p| p.exists())
}

pub fn write_temp(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

/// A question under construction: tokens joined by single spaces, with no
/// space before the final punctuation.
#[derive(Default)]
struct QuestionBuilder {
    text: String,
    tokens: Vec<Token>,
    entities: Vec<QuestionEntity>,
}

impl QuestionBuilder {
    fn tok(&mut self, text: &str, lemma: &str, upos: &str, head: usize, deprel: &str) -> usize {
        if !self.text.is_empty() && upos != "PUNCT" {
            self.text.push(' ');
        }
        let start = self.text.chars().count();
        self.text.push_str(text);
        self.tokens.push(Token {
            text: text.into(),
            lemma: lemma.into(),
            upos: upos.into(),
            start,
            end: start + text.chars().count(),
            head,
            deprel: deprel.into(),
        });
        self.tokens.len() - 1
    }

    /// Adds a multi-token proper name; the last token is the name's head.
    fn entity(&mut self, name: &Entity, head: usize, deprel: &str) -> usize {
        let first = self.tokens.len();
        let words: Vec<&str> = name.surface.split(' ').collect();
        let last = first + words.len() - 1;
        for (i, w) in words.iter().enumerate() {
            if i + 1 == words.len() {
                self.tok(w, w, "PROPN", head, deprel);
            } else {
                self.tok(w, w, "PROPN", last, "compound");
            }
        }
        self.entities.push(QuestionEntity {
            start_token: first,
            end_token: last + 1,
            label: name.label.into(),
            surface: name.surface.into(),
        });
        last
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Entity {
    pub surface: &'static str,
    pub label: &'static str,
}

const fn ent(surface: &'static str, label: &'static str) -> Entity {
    Entity { surface, label }
}

pub const ENTITIES: &[Entity] = &[
    ent("Beyoncé", "PER"),
    ent("Beyonce", "PER"),
    ent("Beyoncé Giselle Knowles", "PER"),
    ent("Kelly Rowland", "PER"),
    ent("Kelly", "PER"),
    ent("LaTavia Roberson", "PER"),
    ent("Mathew Knowles", "PER"),
    ent("Ada Lovelace", "PER"),
    ent("José Martí", "PER"),
    ent("Zoë Saldaña", "PER"),
    ent("Marie Curie", "PER"),
    ent("Pierre Curie", "PER"),
    ent("Bermuda", "LOC"),
    ent("United States", "LOC"),
    ent("Berlin", "LOC"),
    ent("Brandenburg", "LOC"),
    ent("West Pomerania", "LOC"),
    ent("Zürich", "LOC"),
    ent("Lake Zürich", "LOC"),
    ent("São Paulo", "LOC"),
    ent("Houston", "LOC"),
    ent("Texas", "LOC"),
    ent("Destiny's Child", "ORG"),
    ent("Federal Republic", "ORG"),
    ent("United Nations", "ORG"),
    ent("Red Cross", "ORG"),
    ent("American", "MISC"),
    ent("German", "MISC"),
];

pub const NOUNS: &[(&str, &str)] = &[
    ("father", "fathers"), ("mother", "mothers"), ("man", "men"), ("woman", "women"), ("day", "days"),
    ("night", "nights"), ("war", "wars"), ("peace", "peaces"), ("friend", "friends"), ("enemy", "enemies"),
    ("city", "cities"), ("river", "rivers"), ("book", "books"), ("king", "kings"), ("winner", "winners"),
    ("beginning", "beginnings"), ("mammal", "mammals"), ("bird", "birds"), ("distance", "distances"),
];

pub const ADJECTIVES: &[&str] = &[
    "native", "popular", "young", "old", "long", "short", "big", "small", "good", "bad", "hot", "cold", "high",
    "low", "early", "late", "happy", "sad", "modern", "ancient", "strong", "weak", "rich", "poor", "regional",
];

pub const VERBS: &[(&str, &str)] = &[
    ("start", "started"), ("win", "won"), ("lose", "lost"), ("open", "opened"), ("close", "closed"),
    ("increase", "increased"), ("decrease", "decreased"), ("rise", "rose"), ("fall", "fell"), ("buy", "bought"),
    ("sell", "sold"), ("accept", "accepted"), ("reject", "rejected"), ("build", "built"), ("leave", "left"),
    ("arrive", "arrived"), ("enter", "entered"), ("teach", "taught"), ("learn", "learned"), ("form", "formed"),
];

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
}

/// Annotated question for one of ten templates. `ents` must be the entities
/// mentioned in the paragraph's context.
fn build_question(rng: &mut ChaCha8Rng, ents: &[Entity]) -> QuestionBuilder {
    let adj = *ADJECTIVES.choose(rng).unwrap();
    let (noun, nouns) = *NOUNS.choose(rng).unwrap();
    let (verb, verbed) = *VERBS.choose(rng).unwrap();
    let pick = |rng: &mut ChaCha8Rng| *ents.choose(rng).unwrap();
    let mut q = QuestionBuilder::default();
    match rng.random_range(0..10) {
        // What did the ADJ NOUN VERB in E ?
        0 => {
            let e = pick(rng);
            q.tok("What", "what", "PRON", 5, "dobj");
            q.tok("did", "do", "AUX", 5, "aux");
            q.tok("the", "the", "DET", 4, "det");
            q.tok(adj, adj, "ADJ", 4, "amod");
            q.tok(noun, noun, "NOUN", 5, "nsubj");
            q.tok(verb, verb, "VERB", 5, "ROOT");
            q.tok("in", "in", "ADP", 5, "prep");
            q.entity(&e, 6, "pobj");
            q.tok("?", "?", "PUNCT", 5, "punct");
        }
        // How ADJ was E in 1990 ?
        1 => {
            let e = pick(rng);
            q.tok("How", "how", "SCONJ", 1, "advmod");
            q.tok(adj, adj, "ADJ", 2, "acomp");
            q.tok("was", "be", "AUX", 2, "ROOT");
            let in_idx = q.tokens.len() + e.surface.split(' ').count();
            q.entity(&e, 2, "nsubj");
            q.tok("in", "in", "ADP", 2, "prep");
            q.tok("1990", "1990", "NUM", in_idx, "pobj");
            q.tok("?", "?", "PUNCT", 2, "punct");
        }
        // Is the NOUN ADJ near E ?
        2 => {
            let e = pick(rng);
            q.tok("Is", "be", "AUX", 0, "ROOT");
            q.tok("the", "the", "DET", 2, "det");
            q.tok(noun, noun, "NOUN", 0, "nsubj");
            q.tok(adj, adj, "ADJ", 0, "acomp");
            q.tok("near", "near", "ADP", 0, "prep");
            q.entity(&e, 4, "pobj");
            q.tok("?", "?", "PUNCT", 0, "punct");
        }
        // Adj NOUNS VERBED which E ?
        3 => {
            let e = pick(rng);
            q.tok(&capitalize(adj), adj, "ADJ", 1, "amod");
            q.tok(nouns, noun, "NOUN", 2, "nsubj");
            q.tok(verbed, verb, "VERB", 2, "ROOT");
            let last = 3 + e.surface.split(' ').count();
            q.tok("which", "which", "DET", last, "det");
            q.entity(&e, 2, "dobj");
            q.tok("?", "?", "PUNCT", 2, "punct");
        }
        // When did E VERB the NOUN ?
        4 => {
            let e = pick(rng);
            let n = e.surface.split(' ').count();
            let v = 2 + n;
            q.tok("When", "when", "SCONJ", v, "advmod");
            q.tok("did", "do", "AUX", v, "aux");
            q.entity(&e, v, "nsubj");
            q.tok(verb, verb, "VERB", v, "ROOT");
            q.tok("the", "the", "DET", v + 2, "det");
            q.tok(noun, noun, "NOUN", v, "dobj");
            q.tok("?", "?", "PUNCT", v, "punct");
        }
        // Why do ADJ NOUNS VERB with E and F ?
        5 => {
            let (e, f) = (pick(rng), pick(rng));
            q.tok("Why", "why", "SCONJ", 4, "advmod");
            q.tok("do", "do", "AUX", 4, "aux");
            q.tok(adj, adj, "ADJ", 3, "amod");
            q.tok(nouns, noun, "NOUN", 4, "nsubj");
            q.tok(verb, verb, "VERB", 4, "ROOT");
            q.tok("with", "with", "ADP", 4, "prep");
            let e_last = q.entity(&e, 5, "pobj");
            q.tok("and", "and", "CCONJ", e_last, "cc");
            q.entity(&f, e_last, "conj");
            q.tok("?", "?", "PUNCT", 4, "punct");
        }
        // What NOUN did E VERB ?
        6 => {
            let e = pick(rng);
            let v = 3 + e.surface.split(' ').count();
            q.tok("What", "what", "DET", 1, "det");
            q.tok(noun, noun, "NOUN", v, "dobj");
            q.tok("did", "do", "AUX", v, "aux");
            q.entity(&e, v, "nsubj");
            q.tok(verb, verb, "VERB", v, "ROOT");
            q.tok("?", "?", "PUNCT", v, "punct");
        }
        // What ADJ NOUN VERBED ?   (question word attached to the adjective)
        7 => {
            q.tok("What", "what", "DET", 1, "advmod");
            q.tok(adj, adj, "ADJ", 2, "amod");
            q.tok(noun, noun, "NOUN", 3, "nsubj");
            q.tok(verbed, verb, "VERB", 3, "ROOT");
            q.tok("?", "?", "PUNCT", 3, "punct");
        }
        // Does the NOUN VERB or VERB near E ?
        8 => {
            let e = pick(rng);
            let (other, _) = *VERBS.choose(rng).unwrap();
            q.tok("Does", "do", "AUX", 3, "aux");
            q.tok("the", "the", "DET", 2, "det");
            q.tok(noun, noun, "NOUN", 3, "nsubj");
            q.tok(verb, verb, "VERB", 3, "ROOT");
            q.tok("or", "or", "CCONJ", 3, "cc");
            q.tok(other, other, "VERB", 3, "conj");
            q.tok("near", "near", "ADP", 3, "prep");
            q.entity(&e, 6, "pobj");
            q.tok("?", "?", "PUNCT", 3, "punct");
        }
        // Which ADJ NOUN did E VERB ?
        _ => {
            let e = pick(rng);
            let v = 4 + e.surface.split(' ').count();
            q.tok("Which", "which", "DET", 2, "det");
            q.tok(adj, adj, "ADJ", 2, "amod");
            q.tok(noun, noun, "NOUN", v, "dobj");
            q.tok("did", "do", "AUX", v, "aux");
            q.entity(&e, v, "nsubj");
            q.tok(verb, verb, "VERB", v, "ROOT");
            q.tok("?", "?", "PUNCT", v, "punct");
        }
    }
    q
}

pub struct Synthetic {
    pub dataset: QaDataset,
    pub store: AnnotationStore,
    pub records: Vec<SidecarRecord>,
}

/// A corpus of template questions over entity-rich contexts, annotated as a
/// tagger would. Every fifth paragraph also holds an unannotated
/// unanswerable question; some questions are stored in decomposed form.
pub fn synthetic_corpus(paragraphs: usize, questions_per_paragraph: usize, seed: u64) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut articles = Vec::new();
    let mut records = Vec::new();
    let mut qid = 0usize;
    for pi in 0..paragraphs {
        let mut ents: Vec<Entity> = ENTITIES.choose_multiple(&mut rng, 6).copied().collect();
        ents.sort_by_key(|e| e.surface);
        let mut context = String::new();
        let mut mentions = Vec::new();
        for e in &ents {
            let (noun, _) = *NOUNS.choose(&mut rng).unwrap();
            let prefix = if rng.random_bool(0.3) { "the eastern " } else { "" };
            context.push_str(&format!("Records link {prefix}"));
            let start = context.chars().count();
            context.push_str(e.surface);
            mentions.push(ContextEntity {
                start,
                end: start + e.surface.chars().count(),
                label: e.label.into(),
                surface: e.surface.into(),
            });
            context.push_str(&format!(" to the {noun}. "));
        }
        context.push_str("The answer is forty two.");
        let answer_start = context.chars().count() - "forty two.".chars().count();
        let context_id = ContextId::of(&context);

        let mut qas = Vec::new();
        for _ in 0..questions_per_paragraph {
            let built = build_question(&mut rng, &ents);
            let id = format!("syn-{qid:06}");
            qid += 1;
            let stored = if rng.random_bool(0.05) {
                built.text.nfd().collect()
            } else {
                built.text.clone()
            };
            qas.push(QuestionEntry {
                id: id.clone(),
                question: stored,
                is_impossible: false,
                answers: vec![AnswerSpan {
                    text: "forty two".into(),
                    answer_start,
                }],
                plausible_answers: None,
                provenance: Provenance::Original,
            });
            records.push(SidecarRecord::Question(AnnotatedQuestion {
                question_id: id,
                tokens: built.tokens,
                entities: built.entities,
            }));
        }
        if pi % 5 == 0 {
            qas.push(QuestionEntry {
                id: format!("syn-unans-{pi:06}"),
                question: "What did nobody record?".into(),
                is_impossible: true,
                answers: vec![],
                plausible_answers: Some(vec![AnswerSpan {
                    text: "forty two".into(),
                    answer_start,
                }]),
                provenance: Provenance::Original,
            });
        }
        records.push(SidecarRecord::Context(AnnotatedContext {
            context_id,
            entities: mentions,
        }));
        articles.push(Article {
            title: format!("Synthetic {pi}"),
            paragraphs: vec![Paragraph::new(context, qas)],
        });
    }
    let dataset = QaDataset {
        version: "v2.0".into(),
        articles,
    };
    dataset.validate().expect("synthetic corpus is valid");
    let mut store = AnnotationStore::default();
    for r in &records {
        store.insert(r.clone()).expect("synthetic annotation is valid");
    }
    Synthetic {
        dataset,
        store,
        records,
    }
}

pub fn sidecar_jsonl(records: &[SidecarRecord]) -> String {
    records
        .iter()
        .map(|r| serde_json::to_string(r).unwrap() + "\n")
        .collect()
}
