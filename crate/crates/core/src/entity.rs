//! Entity swaps: replace one question entity with another entity of the same
//! type from the question's own context.

use crate::annotation::{AnnotatedContext, AnnotatedQuestion, QuestionEntity};
use crate::candidate::{uniform_index, Candidate, FilterStrategy, Seed, Strategy};
use crate::error::{Error, Result};

/// Substring coreference: `surface` counts as present in the question when it
/// occurs in the question text, or when it contains or is contained in one of
/// the question's entity surfaces. Case-insensitive, no diacritic folding.
pub fn appears_in(question: &str, question_entities: &[&str], surface: &str) -> bool {
    let surface = surface.to_lowercase();
    if question.to_lowercase().contains(&surface) {
        return true;
    }
    question_entities.iter().any(|e| {
        let e = e.to_lowercase();
        e.contains(&surface) || surface.contains(&e)
    })
}

fn entity_surfaces(q: &AnnotatedQuestion) -> Vec<&str> {
    q.entities.iter().map(|e| e.surface.as_str()).collect()
}

/// Distinct context surfaces with the mention's label that do not appear in
/// the question, in order of first occurrence in the context.
pub fn replacement_pool(
    mention: &QuestionEntity,
    ctx: &AnnotatedContext,
    q: &AnnotatedQuestion,
    question: &str,
) -> Vec<String> {
    let surfaces = entity_surfaces(q);
    let mut mentions: Vec<_> = ctx.entities.iter().filter(|e| e.label == mention.label).collect();
    mentions.sort_by_key(|e| (e.start, e.end));
    let mut pool: Vec<String> = Vec::new();
    for e in mentions {
        if e.surface.is_empty() || pool.contains(&e.surface) {
            continue;
        }
        if appears_in(question, &surfaces, &e.surface) {
            continue;
        }
        pool.push(e.surface.clone());
    }
    pool
}

/// One candidate per question mention and pool surface, ordered by mention
/// position and then by pool order.
pub fn generate_entity_candidates(seed: Seed<'_>, q: &AnnotatedQuestion, ctx: &AnnotatedContext) -> Vec<Candidate> {
    let mut mentions: Vec<&QuestionEntity> = q.entities.iter().collect();
    mentions.sort_by_key(|e| (e.start_token, e.end_token));
    let mut candidates = Vec::new();
    for mention in mentions {
        for surface in replacement_pool(mention, ctx, q, seed.question) {
            if let Some(c) = seed.swap(Strategy::Entity, candidates.len(), q.entity_span(mention), surface) {
                candidates.push(c);
            }
        }
    }
    candidates
}

/// Picks one candidate uniformly with the per-seed RNG. Entity swaps have no
/// score-based mode; `NoFilter` keeps everything and is handled by the caller.
pub fn select_entity(cands: &[Candidate], strategy: FilterStrategy, rng_seed: u64) -> Result<Option<Candidate>> {
    match strategy {
        FilterStrategy::Random => Ok((!cands.is_empty()).then(|| cands[uniform_index(rng_seed, cands.len())].clone())),
        FilterStrategy::MinScore => Err(Error::Config("entity swaps support only the random and none filters".into())),
        FilterStrategy::NoFilter => Err(Error::Config(
            "filter none keeps every candidate; there is nothing to select".into(),
        )),
    }
}
