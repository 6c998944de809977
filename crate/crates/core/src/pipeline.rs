//! End-to-end runs behind the `qaswap` subcommands.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;

use crate::annotation::{load_sidecar, validate_against, AnnotationStore};
use crate::antonym;
use crate::candidate::{derive_seed, Candidate, FilterStrategy, Seed, Strategy};
use crate::corpus::{
    convert_tydiqa_minspan, generated_questions, load_squad, merge_augmented, original_only, subsample,
    write_squad, ContextId, GeneratedQuestion, Provenance, QaDataset, QuestionEntry,
};
use crate::entity;
use crate::error::{Error, Result};
use crate::report::{report_counts, GenerationReport, StrategyStats};
use crate::scoring::{write_candidates_tsv, ExternalScoreTable, FluencyScorer, NgramModel};
use crate::text;
use crate::wordnet::{AntonymScope, WordNetDb};

/// Which augmenters run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategySelection {
    Antonym,
    Entity,
    Both,
}

impl StrategySelection {
    pub fn strategies(self) -> &'static [Strategy] {
        match self {
            StrategySelection::Antonym => &[Strategy::Antonym],
            StrategySelection::Entity => &[Strategy::Entity],
            StrategySelection::Both => &[Strategy::Antonym, Strategy::Entity],
        }
    }
}

impl FromStr for StrategySelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "antonym" => Ok(StrategySelection::Antonym),
            "entity" => Ok(StrategySelection::Entity),
            "both" => Ok(StrategySelection::Both),
            other => Err(Error::Config(format!(
                "unknown strategy {other:?}; expected antonym, entity or both"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScorerSpec {
    /// Trained on the answerable seed questions of the corpus.
    Ngram { order: usize, k: f64 },
    /// Precomputed scores, see [`ExternalScoreTable`].
    External(PathBuf),
}

impl Default for ScorerSpec {
    fn default() -> Self {
        ScorerSpec::Ngram {
            order: NgramModel::DEFAULT_ORDER,
            k: NgramModel::DEFAULT_K,
        }
    }
}

impl FromStr for ScorerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "ngram" {
            return Ok(ScorerSpec::default());
        }
        match s.strip_prefix("external:") {
            Some(path) if !path.is_empty() => Ok(ScorerSpec::External(path.into())),
            _ => Err(Error::Config(format!(
                "unknown scorer {s:?}; expected ngram or external:<path>"
            ))),
        }
    }
}

impl fmt::Display for ScorerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScorerSpec::Ngram { .. } => f.write_str("ngram"),
            ScorerSpec::External(p) => write!(f, "external:{}", p.display()),
        }
    }
}

fn parse_scope(s: &str) -> Result<AntonymScope> {
    match s {
        "lemma" => Ok(AntonymScope::Lemma),
        "synset" => Ok(AntonymScope::Synset),
        other => Err(Error::Config(format!(
            "unknown antonym scope {other:?}; expected lemma or synset"
        ))),
    }
}

/// How the augmenters run, independent of where inputs come from.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentOptions {
    pub strategy: StrategySelection,
    pub antonym_filter: FilterStrategy,
    pub entity_filter: FilterStrategy,
    pub scorer: ScorerSpec,
    pub seed: u64,
}

impl AugmentOptions {
    /// Lowest-score antonyms, random entities, n-gram scorer.
    pub fn new(strategy: StrategySelection) -> Self {
        AugmentOptions {
            strategy,
            antonym_filter: FilterStrategy::MinScore,
            entity_filter: FilterStrategy::Random,
            scorer: ScorerSpec::default(),
            seed: 0,
        }
    }

    /// Uses `filter` for every selected strategy.
    pub fn with_filter(mut self, filter: FilterStrategy) -> Self {
        self.antonym_filter = filter;
        self.entity_filter = filter;
        self
    }

    pub fn filter(&self, strategy: Strategy) -> FilterStrategy {
        match strategy {
            Strategy::Antonym => self.antonym_filter,
            Strategy::Entity => self.entity_filter,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.strategy != StrategySelection::Antonym && self.entity_filter == FilterStrategy::MinScore {
            return Err(Error::Config(
                "entity swaps cannot use the ppl filter; use random or none".into(),
            ));
        }
        if let ScorerSpec::Ngram { order, k } = self.scorer {
            if order == 0 || !(k > 0.0 && k.is_finite()) {
                return Err(Error::Config(format!(
                    "n-gram scorer needs order >= 1 and k > 0, got order {order}, k {k}"
                )));
            }
        }
        Ok(())
    }
}

/// Everything an `augment` run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub corpus: PathBuf,
    pub sidecar: PathBuf,
    pub wordnet_dir: Option<PathBuf>,
    pub antonym_scope: AntonymScope,
    pub options: AugmentOptions,
    pub out: Option<PathBuf>,
    pub report: Option<PathBuf>,
    /// Every generated candidate, before filtering, as `id<TAB>text`.
    pub candidates_out: Option<PathBuf>,
}

/// `augment` settings as read from flags or a TOML file. Unset fields fall
/// back to the file, then to defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct AugmentSettings {
    pub corpus: Option<PathBuf>,
    pub sidecar: Option<PathBuf>,
    pub wordnet_dir: Option<PathBuf>,
    pub strategy: Option<String>,
    pub filter: Option<String>,
    pub scorer: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub candidates_out: Option<PathBuf>,
    pub antonym_scope: Option<String>,
    pub ngram_order: Option<usize>,
    pub ngram_k: Option<f64>,
}

impl AugmentSettings {
    pub fn from_toml_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&raw).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// `self` with every field set in `flags` replaced.
    pub fn overridden_by(self, flags: AugmentSettings) -> Self {
        AugmentSettings {
            corpus: flags.corpus.or(self.corpus),
            sidecar: flags.sidecar.or(self.sidecar),
            wordnet_dir: flags.wordnet_dir.or(self.wordnet_dir),
            strategy: flags.strategy.or(self.strategy),
            filter: flags.filter.or(self.filter),
            scorer: flags.scorer.or(self.scorer),
            seed: flags.seed.or(self.seed),
            out: flags.out.or(self.out),
            report: flags.report.or(self.report),
            candidates_out: flags.candidates_out.or(self.candidates_out),
            antonym_scope: flags.antonym_scope.or(self.antonym_scope),
            ngram_order: flags.ngram_order.or(self.ngram_order),
            ngram_k: flags.ngram_k.or(self.ngram_k),
        }
    }

    pub fn resolve(self) -> Result<RunConfig> {
        let corpus = self.corpus.ok_or_else(|| Error::Config("--corpus is required".into()))?;
        let sidecar = self.sidecar.ok_or_else(|| Error::Config("--sidecar is required".into()))?;
        let strategy: StrategySelection = self.strategy.as_deref().unwrap_or("both").parse()?;
        let mut options = AugmentOptions::new(strategy);
        if let Some(filter) = &self.filter {
            options = options.with_filter(filter.parse()?);
        }
        options.scorer = match &self.scorer {
            Some(s) => s.parse()?,
            None => ScorerSpec::default(),
        };
        match &mut options.scorer {
            ScorerSpec::Ngram { order, k } => {
                *order = self.ngram_order.unwrap_or(*order);
                *k = self.ngram_k.unwrap_or(*k);
            }
            ScorerSpec::External(_) if self.ngram_order.is_some() || self.ngram_k.is_some() => {
                return Err(Error::Config("n-gram settings given with an external scorer".into()));
            }
            ScorerSpec::External(_) => {}
        }
        options.seed = self.seed.unwrap_or(0);
        options.check()?;
        let antonym_scope = match &self.antonym_scope {
            Some(s) => parse_scope(s)?,
            None => AntonymScope::default(),
        };
        if strategy != StrategySelection::Entity && self.wordnet_dir.is_none() {
            return Err(Error::Config("antonym swaps need --wordnet-dir".into()));
        }
        Ok(RunConfig {
            corpus,
            sidecar,
            wordnet_dir: self.wordnet_dir,
            antonym_scope,
            options,
            out: self.out,
            report: self.report,
            candidates_out: self.candidates_out,
        })
    }
}

#[derive(Debug, Clone)]
pub struct AugmentOutcome {
    /// The input corpus with the emitted questions appended.
    pub dataset: QaDataset,
    pub report: GenerationReport,
    /// Every candidate before filtering, antonym candidates first.
    pub candidates: Vec<Candidate>,
    /// The candidates that became questions, in output order.
    pub emitted: Vec<Candidate>,
}

struct SeedResult {
    candidates: Vec<Candidate>,
    emitted: Vec<Candidate>,
    aux_initial: bool,
    wh_adjacent: usize,
    no_target: bool,
    empty_pool: bool,
}

fn provenance(strategy: Strategy) -> Provenance {
    match strategy {
        Strategy::Antonym => Provenance::AntonymAug,
        Strategy::Entity => Provenance::EntityAug,
    }
}

fn generated_entry(c: &Candidate) -> GeneratedQuestion {
    GeneratedQuestion {
        context_id: c.context_id.clone(),
        entry: QuestionEntry {
            id: c.id.clone(),
            question: c.text.clone(),
            is_impossible: true,
            answers: vec![],
            plausible_answers: None,
            provenance: provenance(c.strategy),
        },
    }
}

fn filtered(
    cands: Vec<Candidate>,
    filter: FilterStrategy,
    select: impl FnOnce(&[Candidate]) -> Result<Option<Candidate>>,
) -> Result<(Vec<Candidate>, Vec<Candidate>)> {
    let emitted = match filter {
        FilterStrategy::NoFilter => cands.clone(),
        _ => select(&cands)?.into_iter().collect(),
    };
    Ok((cands, emitted))
}

/// Runs the selected augmenters over every answerable question of `d`.
///
/// The sidecar must validate against the corpus. Seeds are processed in
/// parallel; output order follows the corpus, with all antonym questions
/// ahead of entity questions.
pub fn augment(
    d: &QaDataset,
    store: &AnnotationStore,
    wordnet: Option<&WordNetDb>,
    options: &AugmentOptions,
) -> Result<AugmentOutcome> {
    options.check()?;
    let violations = validate_against(store, d);
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }

    let seeds: Vec<(String, String, ContextId)> = d
        .questions()
        .filter(|(_, q)| !q.is_impossible)
        .map(|(p, q)| (q.id.clone(), text::nfc(&q.question), p.context_id.clone()))
        .collect();

    let mut report_stats = std::collections::BTreeMap::new();
    let mut all_candidates = Vec::new();
    let mut emitted = Vec::new();
    for &strategy in options.strategy.strategies() {
        let filter = options.filter(strategy);
        let scorer: Option<Box<dyn FluencyScorer>> = match (strategy, filter) {
            (Strategy::Antonym, FilterStrategy::MinScore) => Some(match &options.scorer {
                ScorerSpec::Ngram { order, k } if !seeds.is_empty() => {
                    let texts: Vec<&str> = seeds.iter().map(|(_, q, _)| q.as_str()).collect();
                    Box::new(NgramModel::train(&texts, *order, *k)?)
                }
                ScorerSpec::Ngram { order, k } => Box::new(NgramModel::from_vocabulary::<&str>(&[], *order, *k)?),
                ScorerSpec::External(path) => Box::new(ExternalScoreTable::load(path)?),
            }),
            _ => None,
        };
        let db = match strategy {
            Strategy::Antonym => Some(wordnet.ok_or_else(|| Error::Config("antonym swaps need a WordNet database".into()))?),
            Strategy::Entity => None,
        };

        let results: Vec<SeedResult> = seeds
            .par_iter()
            .map(|(id, question, context_id)| -> Result<SeedResult> {
                let seed = Seed { id, question, context_id };
                let q = store.question(id).ok_or_else(|| Error::Config(format!("no annotation for {id}")))?;
                let rng_seed = derive_seed(options.seed, strategy, id);
                let result = match strategy {
                    Strategy::Antonym => {
                        let scan = antonym::scan(seed, q, db.expect("checked above"))?;
                        let had_targets = !scan.targets.is_empty();
                        let (candidates, emitted) = filtered(scan.candidates, filter, |c| {
                            antonym::select_antonym(c, scorer.as_deref(), filter, rng_seed)
                        })?;
                        SeedResult {
                            aux_initial: scan.aux_initial,
                            wh_adjacent: scan.wh_adjacent_skipped,
                            no_target: !scan.aux_initial && !had_targets,
                            empty_pool: had_targets && candidates.is_empty(),
                            candidates,
                            emitted,
                        }
                    }
                    Strategy::Entity => {
                        let ctx = store
                            .context(context_id)
                            .ok_or_else(|| Error::UnknownContext(context_id.to_string()))?;
                        let cands = entity::generate_entity_candidates(seed, q, ctx);
                        let (candidates, emitted) =
                            filtered(cands, filter, |c| entity::select_entity(c, filter, rng_seed))?;
                        SeedResult {
                            aux_initial: false,
                            wh_adjacent: 0,
                            no_target: q.entities.is_empty(),
                            empty_pool: !q.entities.is_empty() && candidates.is_empty(),
                            candidates,
                            emitted,
                        }
                    }
                };
                Ok(result)
            })
            .zip(seeds.par_iter())
            .map(|(r, (id, _, _))| {
                r.map_err(|e| Error::Seed {
                    question_id: id.clone(),
                    source: Box::new(e),
                })
            })
            .collect::<Result<_>>()?;

        let mut stats = StrategyStats {
            seeds_processed: seeds.len(),
            ..StrategyStats::default()
        };
        for r in results {
            stats.candidates_generated += r.candidates.len();
            stats.survived += r.emitted.len();
            stats.exclusions.aux_initial += usize::from(r.aux_initial);
            stats.exclusions.wh_adjacent_adjective += r.wh_adjacent;
            stats.exclusions.no_eligible_target += usize::from(r.no_target);
            stats.exclusions.empty_replacement_pool += usize::from(r.empty_pool);
            all_candidates.extend(r.candidates);
            emitted.extend(r.emitted);
        }
        report_stats.insert(strategy, stats);
    }

    let generated: Vec<GeneratedQuestion> = emitted.iter().map(generated_entry).collect();
    let dataset = merge_augmented(d, &generated)?;
    let mut report = report_counts(&dataset);
    report.strategies = report_stats;
    Ok(AugmentOutcome {
        dataset,
        report,
        candidates: all_candidates,
        emitted,
    })
}

fn write_text(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })
}

/// Loads every input named by `cfg`, augments, and writes the requested
/// outputs.
pub fn run_augment(cfg: &RunConfig) -> Result<AugmentOutcome> {
    cfg.options.check()?;
    let d = load_squad(&cfg.corpus)?;
    let store = load_sidecar(&cfg.sidecar)?;
    let needs_wordnet = cfg.options.strategy != StrategySelection::Entity;
    let db = match (&cfg.wordnet_dir, needs_wordnet) {
        (Some(dir), true) => Some(WordNetDb::load(dir)?.with_scope(cfg.antonym_scope)),
        (None, true) => return Err(Error::Config("antonym swaps need --wordnet-dir".into())),
        (_, false) => None,
    };
    let outcome = augment(&d, &store, db.as_ref(), &cfg.options)?;
    if let Some(path) = &cfg.out {
        write_squad(&outcome.dataset, path)?;
    }
    if let Some(path) = &cfg.report {
        write_text(path, &outcome.report.to_json())?;
    }
    if let Some(path) = &cfg.candidates_out {
        write_candidates_tsv(&outcome.candidates, path)?;
    }
    Ok(outcome)
}

/// Inputs of a `subsample` run.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsampleConfig {
    /// An augmented corpus; its generated questions form the pool.
    pub corpus: PathBuf,
    pub sizes: Vec<usize>,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Restricts the pool to one augmenter's questions.
    pub strategy: Option<Strategy>,
}

/// Writes `subsample-<size>.json` per size: the original corpus plus a nested
/// random sample of its generated questions.
pub fn run_subsample(cfg: &SubsampleConfig) -> Result<Vec<PathBuf>> {
    let d = load_squad(&cfg.corpus)?;
    let mut pool = generated_questions(&d);
    if let Some(strategy) = cfg.strategy {
        pool.retain(|g| g.entry.provenance == provenance(strategy));
    }
    let base = original_only(&d);
    let samples = subsample(&pool, &cfg.sizes, cfg.seed)?;
    fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::Io {
        path: cfg.out_dir.clone(),
        source: e,
    })?;
    let mut written = Vec::with_capacity(samples.len());
    for (size, sample) in samples {
        let path = cfg.out_dir.join(format!("subsample-{size}.json"));
        write_squad(&merge_augmented(&base, &sample)?, &path)?;
        written.push(path);
    }
    Ok(written)
}

/// Loads a corpus for reporting. A zero-byte file counts as an empty corpus.
pub fn load_for_report(path: impl AsRef<Path>) -> Result<QaDataset> {
    let path = path.as_ref();
    let meta = fs::metadata(path).map_err(|e| Error::io(path, e))?;
    if meta.len() == 0 {
        return Ok(QaDataset::empty(""));
    }
    load_squad(path)
}

pub fn run_report(paths: &[PathBuf]) -> Result<Vec<(PathBuf, GenerationReport)>> {
    paths
        .iter()
        .map(|p| Ok((p.clone(), report_counts(&load_for_report(p)?))))
        .collect()
}

/// Schema-checks a corpus and, given a sidecar, checks the sidecar against
/// it.
pub fn run_validate(corpus: &Path, sidecar: Option<&Path>) -> Result<GenerationReport> {
    let d = load_squad(corpus)?;
    if let Some(sidecar) = sidecar {
        let violations = validate_against(&load_sidecar(sidecar)?, &d);
        if !violations.is_empty() {
            return Err(Error::Validation(violations));
        }
    }
    Ok(report_counts(&d))
}

pub fn run_convert_tydiqa(input: &Path, language: &str, out: &Path) -> Result<GenerationReport> {
    let d = convert_tydiqa_minspan(input, language)?;
    write_squad(&d, out)?;
    Ok(report_counts(&d))
}
