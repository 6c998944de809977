//! Antonym swaps: replace one noun, adjective or verb with a WordNet antonym.

use crate::annotation::{AnnotatedQuestion, Token};
use crate::candidate::{uniform_index, Candidate, FilterStrategy, Seed, Strategy};
use crate::error::{Error, Result};
use crate::scoring::FluencyScorer;
use crate::text;
use crate::wordnet::WordNetDb;

pub const SWAPPABLE_POS: [&str; 3] = ["NOUN", "ADJ", "VERB"];

pub const WH_LEMMAS: [&str; 9] = ["how", "what", "which", "who", "whom", "whose", "when", "where", "why"];

/// Polar and alternative questions, recognised by an AUX first token.
pub fn is_excluded_question(q: &AnnotatedQuestion) -> bool {
    q.tokens.first().is_some_and(|t| t.upos == "AUX")
}

fn is_wh(t: &Token) -> bool {
    WH_LEMMAS.contains(&t.lemma.to_lowercase().as_str())
}

/// True when an adjective is linked by a single dependency arc, in either
/// direction, to a question word.
pub fn has_wh_arc(q: &AnnotatedQuestion, i: usize) -> bool {
    let head = q.tokens[i].head;
    (head != i && is_wh(&q.tokens[head]))
        || q.tokens
            .iter()
            .enumerate()
            .any(|(j, t)| j != i && t.head == i && is_wh(t))
}

fn is_uninflected_content_word(t: &Token) -> bool {
    SWAPPABLE_POS.contains(&t.upos.as_str()) && t.text.to_lowercase() == t.lemma.to_lowercase()
}

/// Indices of tokens that may be swapped for an antonym.
pub fn eligible_targets(q: &AnnotatedQuestion) -> Vec<usize> {
    scan_targets(q).0
}

/// Eligible targets plus the number of adjectives skipped for a wh-arc.
fn scan_targets(q: &AnnotatedQuestion) -> (Vec<usize>, usize) {
    let mut targets = Vec::new();
    let mut wh_skipped = 0;
    for (i, t) in q.tokens.iter().enumerate() {
        if !is_uninflected_content_word(t) {
            continue;
        }
        if t.upos == "ADJ" && has_wh_arc(q, i) {
            wh_skipped += 1;
            continue;
        }
        targets.push(i);
    }
    (targets, wh_skipped)
}

/// Every single-antonym variant of the seed, ordered by token index and then
/// by antonym.
pub fn generate_antonym_candidates(seed: Seed<'_>, q: &AnnotatedQuestion, db: &WordNetDb) -> Result<Vec<Candidate>> {
    Ok(scan(seed, q, db)?.candidates)
}

/// What the antonym augmenter found for one seed.
#[derive(Debug, Clone, Default)]
pub struct AntonymScan {
    pub aux_initial: bool,
    pub targets: Vec<usize>,
    pub wh_adjacent_skipped: usize,
    pub candidates: Vec<Candidate>,
}

pub fn scan(seed: Seed<'_>, q: &AnnotatedQuestion, db: &WordNetDb) -> Result<AntonymScan> {
    if is_excluded_question(q) {
        return Ok(AntonymScan {
            aux_initial: true,
            ..AntonymScan::default()
        });
    }
    let (targets, wh_adjacent_skipped) = scan_targets(q);
    let mut candidates = Vec::new();
    for &i in &targets {
        let t = &q.tokens[i];
        for antonym in db.antonyms(&t.lemma, &t.upos)? {
            let replacement = text::match_initial_case(&t.text, &antonym);
            if let Some(c) = seed.swap(Strategy::Antonym, candidates.len(), t.start..t.end, replacement) {
                candidates.push(c);
            }
        }
    }
    Ok(AntonymScan {
        aux_initial: false,
        targets,
        wh_adjacent_skipped,
        candidates,
    })
}

/// Picks at most one candidate. Under `MinScore` ties go to the earliest
/// candidate and a scorer is required. `NoFilter` keeps everything and is
/// handled by the caller.
pub fn select_antonym(
    cands: &[Candidate],
    scorer: Option<&dyn FluencyScorer>,
    strategy: FilterStrategy,
    rng_seed: u64,
) -> Result<Option<Candidate>> {
    if cands.is_empty() {
        return Ok(None);
    }
    match strategy {
        FilterStrategy::MinScore => {
            let scorer = scorer.ok_or_else(|| Error::Config("filter ppl needs a scorer".into()))?;
            let scores = scorer.score_all(cands)?;
            Ok(argmin(&scores).map(|i| cands[i].clone()))
        }
        FilterStrategy::Random => Ok(Some(cands[uniform_index(rng_seed, cands.len())].clone())),
        FilterStrategy::NoFilter => Err(Error::Config(
            "filter none keeps every candidate; there is nothing to select".into(),
        )),
    }
}

/// Index of the first smallest score.
pub(crate) fn argmin(scores: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, s) in scores.iter().enumerate() {
        if best.is_none_or(|b| s.total_cmp(&scores[b]).is_lt()) {
            best = Some(i);
        }
    }
    best
}
