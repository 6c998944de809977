//! Generation invariants checked over a whole annotated corpus, with case
//! counts, for the acceptance run.

use std::collections::{BTreeMap, HashMap};

use qaswap::annotation::AnnotationStore;
use qaswap::antonym::{has_wh_arc, is_excluded_question, SWAPPABLE_POS};
use qaswap::corpus::{to_squad_json, Provenance, QaDataset};
use qaswap::entity::appears_in;
use qaswap::pipeline::{augment, AugmentOptions, AugmentOutcome, StrategySelection};
use qaswap::text::{char_slice, nfc, replace_chars};
use qaswap::wordnet::WordNetDb;
use qaswap::{FilterStrategy, Strategy};

#[derive(Debug, Default)]
pub struct Tally {
    pub cases: usize,
    pub failed: usize,
    /// The first few failing cases.
    pub examples: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failed += 1;
            if self.examples.len() < 5 {
                self.examples.push(what());
            }
        }
    }
}

pub const NAMES: [&str; 9] = [
    "one-swap edit",
    "antonym POS/lemma rules",
    "AUX-initial exclusion",
    "wh-adjacent adjective exclusion",
    "entity type preservation",
    "context sourcing",
    "appears_in non-overlap",
    "answerable set untouched",
    "determinism under fixed seed",
];

fn run(d: &QaDataset, store: &AnnotationStore, db: &WordNetDb, filter: Option<FilterStrategy>, seed: u64) -> AugmentOutcome {
    let mut options = AugmentOptions::new(StrategySelection::Both);
    if let Some(f) = filter {
        options = options.with_filter(f);
    }
    options.seed = seed;
    augment(d, store, Some(db), &options).expect("augmentation succeeds")
}

/// Every invariant by name, each with the number of cases it covered.
pub fn check_invariants(d: &QaDataset, store: &AnnotationStore, db: &WordNetDb, seed: u64) -> BTreeMap<&'static str, Tally> {
    let mut t: BTreeMap<&'static str, Tally> = NAMES.iter().map(|&n| (n, Tally::default())).collect();
    let seeds: HashMap<&str, String> = d
        .questions()
        .filter(|(_, q)| !q.is_impossible)
        .map(|(_, q)| (q.id.as_str(), nfc(&q.question)))
        .collect();
    let all = run(d, store, db, Some(FilterStrategy::NoFilter), seed);

    let mut antonym_seeds = std::collections::HashSet::new();
    for c in &all.candidates {
        let question = &seeds[c.seed_id.as_str()];
        let q = store.question(&c.seed_id).expect("annotated seed");
        t.get_mut("one-swap edit").unwrap().check(
            char_slice(question, c.replaced_span.clone()) == Some(c.original.as_str())
                && c.original != c.replacement
                && replace_chars(question, c.replaced_span.clone(), &c.replacement).as_deref() == Some(c.text.as_str()),
            || c.id.clone(),
        );
        match c.strategy {
            Strategy::Antonym => {
                antonym_seeds.insert(c.seed_id.as_str());
                let token = q
                    .tokens
                    .iter()
                    .enumerate()
                    .find(|(_, tok)| tok.start == c.replaced_span.start && tok.end == c.replaced_span.end);
                let ok = token.is_some_and(|(_, tok)| {
                    SWAPPABLE_POS.contains(&tok.upos.as_str())
                        && tok.text.to_lowercase() == tok.lemma.to_lowercase()
                        && db
                            .antonyms(&tok.lemma, &tok.upos)
                            .is_ok_and(|a| a.iter().any(|w| w.to_lowercase() == c.replacement.to_lowercase()))
                });
                t.get_mut("antonym POS/lemma rules").unwrap().check(ok, || c.id.clone());
                let wh = token.is_some_and(|(i, tok)| tok.upos == "ADJ" && has_wh_arc(q, i));
                t.get_mut("wh-adjacent adjective exclusion").unwrap().check(!wh, || c.id.clone());
            }
            Strategy::Entity => {
                let ctx = store.context(&c.context_id).expect("annotated context");
                let mention = q.entities.iter().find(|e| q.entity_span(e) == c.replaced_span);
                t.get_mut("entity type preservation").unwrap().check(
                    mention.is_some_and(|m| ctx.entities.iter().any(|e| e.surface == c.replacement && e.label == m.label)),
                    || c.id.clone(),
                );
                t.get_mut("context sourcing").unwrap().check(
                    ctx.entities.iter().any(|e| e.surface == c.replacement),
                    || c.id.clone(),
                );
                let surfaces: Vec<&str> = q.entities.iter().map(|e| e.surface.as_str()).collect();
                t.get_mut("appears_in non-overlap").unwrap().check(
                    !appears_in(question, &surfaces, &c.replacement),
                    || c.id.clone(),
                );
            }
        }
    }
    for id in seeds.keys() {
        let q = store.question(id).expect("annotated seed");
        t.get_mut("AUX-initial exclusion")
            .unwrap()
            .check(!is_excluded_question(q) || !antonym_seeds.contains(id), || id.to_string());
    }

    let picked = run(d, store, db, None, seed);
    let before: Vec<_> = d.questions().map(|(p, q)| (&p.context_id, q)).collect();
    let after: Vec<_> = picked
        .dataset
        .questions()
        .filter(|(_, q)| q.provenance == Provenance::Original)
        .collect();
    let untouched = t.get_mut("answerable set untouched").unwrap();
    untouched.check(before.len() == after.len(), || "question count changed".into());
    for ((cid, q), (p, q2)) in before.iter().zip(&after) {
        untouched.check(*cid == &p.context_id && *q == *q2, || q.id.clone());
    }

    let reference = to_squad_json(&picked.dataset);
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let again = single.install(|| run(d, store, db, None, seed));
    let det = t.get_mut("determinism under fixed seed").unwrap();
    det.check(to_squad_json(&again.dataset) == reference, || "serialized corpus differs".into());
    det.check(again.emitted.len() == picked.emitted.len(), || "emitted count differs".into());
    for (a, b) in picked.emitted.iter().zip(&again.emitted) {
        det.check(a == b, || a.id.clone());
    }
    t
}
