//! Independent reference implementations.

use qaswap::scoring::{BOS, EOS, UNK};

/// Words are alphanumeric runs; any other visible character stands alone.
pub fn oracle_tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let mut run = String::new();
        for c in chunk.chars() {
            if c.is_alphanumeric() {
                run.push(c);
            } else {
                if !run.is_empty() {
                    out.push(run.to_lowercase());
                    run.clear();
                }
                out.push(c.to_lowercase().to_string());
            }
        }
        if !run.is_empty() {
            out.push(run.to_lowercase());
        }
    }
    out
}

/// Recounts everything from the raw sentences on every query.
pub struct Oracle {
    pub sentences: Vec<Vec<String>>,
    order: usize,
    k: f64,
}

impl Oracle {
    pub fn new(corpus: &[String], order: usize, k: f64) -> Self {
        Oracle {
            sentences: corpus.iter().map(|s| oracle_tokens(s)).collect(),
            order,
            k,
        }
    }

    pub fn vocabulary(&self) -> Vec<String> {
        let mut v: Vec<String> = self.sentences.iter().flatten().cloned().collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn v_prime(&self) -> usize {
        self.vocabulary().len() + 2
    }

    pub fn padded(&self, words: &[String]) -> Vec<String> {
        let vocab = self.vocabulary();
        let mut seq = vec![BOS.to_string(); self.order - 1];
        for w in words {
            seq.push(if vocab.contains(w) { w.clone() } else { UNK.to_string() });
        }
        seq.push(EOS.to_string());
        seq
    }

    pub fn prob(&self, history: &[String], word: &str) -> f64 {
        let mut c_h = 0u64;
        let mut c_hw = 0u64;
        for s in &self.sentences {
            let seq = self.padded(s);
            for end in self.order..=seq.len() {
                let window = &seq[end - self.order..end];
                if window[..self.order - 1] == *history {
                    c_h += 1;
                    if window[self.order - 1] == word {
                        c_hw += 1;
                    }
                }
            }
        }
        (c_hw as f64 + self.k) / (c_h as f64 + self.k * self.v_prime() as f64)
    }

    pub fn perplexity(&self, text: &str) -> f64 {
        let seq = self.padded(&oracle_tokens(text));
        let n = seq.len() - (self.order - 1);
        let log_sum: f64 = (self.order - 1..seq.len())
            .map(|i| self.prob(&seq[i + 1 - self.order..i], &seq[i]).ln())
            .sum();
        (-log_sum / n as f64).exp()
    }
}

/// Probe lemmas with their antonyms as computed by NLTK's WordNet reader over
/// the same WordNet 3.0 files (scripts/wordnet_probe_oracle.py): first the
/// pointers leaving the lemma itself, then all pointers leaving the lemma's
/// synsets.
pub const PROBES: &[(&str, &str, &[&str], &[&str])] = &[
    ("native", "ADJ", &["adopted", "foreign", "nonnative"], &["adopted", "foreign", "nonnative"]),
    ("popular", "ADJ", &["unpopular"], &["unpopular"]),
    ("start", "VERB", &["stop"], &["end", "stop"]),
    ("young", "ADJ", &["old"], &["old"]),
    ("long", "ADJ", &["short"], &["short", "unretentive"]),
    ("bermuda", "NOUN", &[], &[]),
    ("father", "NOUN", &["mother"], &["female parent", "mother"]),
    ("more", "ADJ", &["fewer", "less"], &["fewer", "less"]),
    ("big", "ADJ", &["little"], &["little", "small"]),
    ("narrow", "ADJ", &["wide"], &["broad-minded", "wide"]),
    ("increase", "VERB", &["decrease"], &["decrease"]),
    ("good", "ADJ", &["bad", "evil"], &["bad", "evil"]),
    ("hot", "ADJ", &["cold"], &["cold"]),
    ("win", "VERB", &["lose"], &["fail", "fall back", "lose"]),
    ("man", "NOUN", &["woman"], &["civilian", "woman"]),
    ("day", "NOUN", &["night"], &["night"]),
    ("open", "VERB", &["close"], &["close", "fold"]),
    ("old", "ADJ", &["new", "young"], &["new", "young"]),
    ("high", "ADJ", &["low"], &["low"]),
    ("mammal", "NOUN", &[], &[]),
];
