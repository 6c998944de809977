//! Question counts and generation statistics, rendered as a table or JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::candidate::Strategy;
use crate::corpus::{Provenance, QaDataset};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub answerable: usize,
    pub unanswerable: usize,
}

impl Counts {
    pub fn total(&self) -> usize {
        self.answerable + self.unanswerable
    }
}

/// Why seeds or tokens were passed over.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExclusionCounts {
    /// Seeds whose first token is AUX (polar and alternative questions).
    pub aux_initial: usize,
    /// Adjective tokens skipped for a direct arc to a question word.
    pub wh_adjacent_adjective: usize,
    /// Seeds with no swappable token or entity mention.
    pub no_eligible_target: usize,
    /// Seeds with targets but no antonym or same-type context entity.
    pub empty_replacement_pool: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyStats {
    pub seeds_processed: usize,
    pub candidates_generated: usize,
    /// Candidates emitted after filtering. At most one per seed unless the
    /// run keeps every candidate.
    pub survived: usize,
    pub exclusions: ExclusionCounts,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub totals: Counts,
    pub by_provenance: BTreeMap<Provenance, Counts>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub strategies: BTreeMap<Strategy, StrategyStats>,
}

/// Counts partitioned by answerability and provenance.
pub fn report_counts(d: &QaDataset) -> GenerationReport {
    let mut report = GenerationReport::default();
    for (_, q) in d.questions() {
        let slot = report.by_provenance.entry(q.provenance).or_default();
        if q.is_impossible {
            slot.unanswerable += 1;
            report.totals.unanswerable += 1;
        } else {
            slot.answerable += 1;
            report.totals.answerable += 1;
        }
    }
    report
}

fn provenance_label(p: Provenance) -> &'static str {
    match p {
        Provenance::Original => "Original data",
        Provenance::AntonymAug => "  + Antonym",
        Provenance::EntityAug => "  + Entity",
    }
}

fn thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    out
}

impl GenerationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }

    /// Human-readable table in the style of a dataset statistics table.
    pub fn render_table(&self, title: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{title}");
        let _ = writeln!(out, "{:<24}{:>14}{:>14}", "Data", "Answerable", "Unanswerable");
        let original = self
            .by_provenance
            .get(&Provenance::Original)
            .copied()
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{:<24}{:>14}{:>14}",
            provenance_label(Provenance::Original),
            thousands(original.answerable),
            thousands(original.unanswerable)
        );
        for p in [Provenance::AntonymAug, Provenance::EntityAug] {
            if let Some(c) = self.by_provenance.get(&p) {
                let _ = writeln!(
                    out,
                    "{:<24}{:>14}{:>14}",
                    provenance_label(p),
                    format!("+ {}", thousands(c.answerable)),
                    format!("+ {}", thousands(c.unanswerable))
                );
            }
        }
        let _ = writeln!(
            out,
            "{:<24}{:>14}{:>14}",
            "Total",
            thousands(self.totals.answerable),
            thousands(self.totals.unanswerable)
        );
        if !self.strategies.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "{:<10}{:>9}{:>12}{:>10}{:>6}{:>10}{:>11}{:>12}",
                "Strategy", "Seeds", "Candidates", "Emitted", "AUX", "Wh-ADJ", "No target", "Empty pool"
            );
            for (s, st) in &self.strategies {
                let _ = writeln!(
                    out,
                    "{:<10}{:>9}{:>12}{:>10}{:>6}{:>10}{:>11}{:>12}",
                    s.as_str(),
                    thousands(st.seeds_processed),
                    thousands(st.candidates_generated),
                    thousands(st.survived),
                    thousands(st.exclusions.aux_initial),
                    thousands(st.exclusions.wh_adjacent_adjective),
                    thousands(st.exclusions.no_eligible_target),
                    thousands(st.exclusions.empty_replacement_pool),
                );
            }
        }
        out
    }
}
