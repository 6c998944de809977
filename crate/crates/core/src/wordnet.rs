//! Reader for the WordNet 3.0 database files (`index.*` and `data.*`) and
//! part-of-speech scoped antonym lookup.
//!
//! Only what antonym lookup needs is kept: the lemma index, and for every
//! synset its words and pointers. Glosses and verb frames are skipped.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const ANTONYM: &str = "!";

/// Synset type as written in the data files. Satellites live in the
/// adjective files and are queried together with head adjectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SynsetType {
    Noun,
    Verb,
    Adjective,
    AdjectiveSatellite,
    Adverb,
}

impl SynsetType {
    pub fn file_pos(self) -> FilePos {
        match self {
            SynsetType::Noun => FilePos::Noun,
            SynsetType::Verb => FilePos::Verb,
            SynsetType::Adjective | SynsetType::AdjectiveSatellite => FilePos::Adjective,
            SynsetType::Adverb => FilePos::Adverb,
        }
    }
}

impl FromStr for SynsetType {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "n" => Ok(SynsetType::Noun),
            "v" => Ok(SynsetType::Verb),
            "a" => Ok(SynsetType::Adjective),
            "s" => Ok(SynsetType::AdjectiveSatellite),
            "r" => Ok(SynsetType::Adverb),
            other => Err(format!("unknown part of speech {other:?}")),
        }
    }
}

/// One of the four index/data file pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FilePos {
    Noun,
    Verb,
    Adjective,
    Adverb,
}

impl FilePos {
    pub const ALL: [FilePos; 4] = [FilePos::Noun, FilePos::Verb, FilePos::Adjective, FilePos::Adverb];

    fn suffix(self) -> &'static str {
        match self {
            FilePos::Noun => "noun",
            FilePos::Verb => "verb",
            FilePos::Adjective => "adj",
            FilePos::Adverb => "adv",
        }
    }

    /// Maps the UPOS tags that can carry antonyms.
    pub fn from_upos(upos: &str) -> Result<Self> {
        match upos {
            "NOUN" => Ok(FilePos::Noun),
            "VERB" => Ok(FilePos::Verb),
            "ADJ" => Ok(FilePos::Adjective),
            other => Err(Error::UnsupportedPos(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pointer {
    pub symbol: String,
    pub target_offset: u32,
    pub target_type: SynsetType,
    /// 1-based word number in the source synset, 0 for the whole synset.
    pub source_word: u16,
    /// 1-based word number in the target synset, 0 for the whole synset.
    pub target_word: u16,
}

impl Pointer {
    pub fn is_lexical(&self) -> bool {
        self.source_word != 0 && self.target_word != 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Synset {
    pub offset: u32,
    pub synset_type: SynsetType,
    /// Lemmas in file order, case preserved, underscores for spaces.
    pub words: Vec<String>,
    pub pointers: Vec<Pointer>,
}

/// Which antonym pointers a lookup follows.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum AntonymScope {
    /// Only lemma-to-lemma pointers leaving the queried lemma itself.
    Lemma,
    /// Every antonym pointer leaving any synset of the queried lemma, whether
    /// it starts at the lemma, at another lemma of the synset, or at the
    /// synset as a whole.
    #[default]
    Synset,
}

#[derive(Debug, Clone, Default)]
pub struct WordNetDb {
    index: HashMap<(FilePos, String), Vec<u32>>,
    synsets: HashMap<(FilePos, u32), Synset>,
    scope: AntonymScope,
}

impl WordNetDb {
    /// Loads `index.{noun,verb,adj,adv}` and `data.{noun,verb,adj,adv}`.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let mut db = WordNetDb::default();
        for pos in FilePos::ALL {
            for kind in ["index", "data"] {
                let path = dir.join(format!("{kind}.{}", pos.suffix()));
                let raw = fs::read(&path).map_err(|e| Error::io(&path, e))?;
                let content = String::from_utf8(raw)
                    .map_err(|_| Error::malformed(&path, None, "not valid UTF-8"))?;
                let parsed = if kind == "index" {
                    db.read_index(pos, &content)
                } else {
                    db.read_data(pos, &content)
                };
                parsed.map_err(|(line, msg)| Error::malformed(&path, Some(line), msg))?;
            }
        }
        db.check_pointers()?;
        Ok(db)
    }

    fn read_index(&mut self, pos: FilePos, content: &str) -> std::result::Result<(), (usize, String)> {
        for (n, line) in content.lines().enumerate() {
            if line.starts_with(' ') || line.trim().is_empty() {
                continue;
            }
            let (lemma, offsets) = parse_index_line(line).map_err(|m| (n + 1, m))?;
            self.index.insert((pos, lemma), offsets);
        }
        Ok(())
    }

    fn read_data(&mut self, pos: FilePos, content: &str) -> std::result::Result<(), (usize, String)> {
        for (n, line) in content.lines().enumerate() {
            if line.starts_with(' ') || line.trim().is_empty() {
                continue;
            }
            let synset = parse_data_line(line).map_err(|m| (n + 1, m))?;
            if synset.synset_type.file_pos() != pos {
                return Err((n + 1, format!("synset type {:?} in the {} file", synset.synset_type, pos.suffix())));
            }
            self.synsets.insert((pos, synset.offset), synset);
        }
        Ok(())
    }

    fn check_pointers(&self) -> Result<()> {
        for ((pos, offset), synset) in &self.synsets {
            for p in &synset.pointers {
                let target = self
                    .synsets
                    .get(&(p.target_type.file_pos(), p.target_offset))
                    .ok_or_else(|| {
                        Error::malformed(
                            format!("data.{}", pos.suffix()),
                            None,
                            format!("synset {offset:08} points to missing synset {:08}", p.target_offset),
                        )
                    })?;
                if usize::from(p.source_word) > synset.words.len()
                    || usize::from(p.target_word) > target.words.len()
                {
                    return Err(Error::malformed(
                        format!("data.{}", pos.suffix()),
                        None,
                        format!("synset {offset:08} has a pointer with an out-of-range word number"),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn with_scope(mut self, scope: AntonymScope) -> Self {
        self.scope = scope;
        self
    }

    pub fn scope(&self) -> AntonymScope {
        self.scope
    }

    /// Synset offsets of a lemma (lowercase, underscores for spaces).
    pub fn lemma_synsets(&self, lemma: &str, pos: FilePos) -> &[u32] {
        self.index
            .get(&(pos, lemma_key(lemma)))
            .map(Vec::as_slice)
            .unwrap_or_default()
    }

    pub fn synset(&self, pos: FilePos, offset: u32) -> Option<&Synset> {
        self.synsets.get(&(pos, offset))
    }

    pub fn synsets(&self) -> impl Iterator<Item = &Synset> {
        self.synsets.values()
    }

    pub fn contains_lemma(&self, lemma: &str, pos: FilePos) -> bool {
        self.index.contains_key(&(pos, lemma_key(lemma)))
    }

    /// Antonyms over every sense of `lemma`, using the database's scope.
    pub fn antonyms(&self, lemma: &str, upos: &str) -> Result<BTreeSet<String>> {
        self.antonyms_in_scope(lemma, upos, self.scope)
    }

    /// Antonyms over every sense of `lemma`, with no sense disambiguation.
    /// Results use spaces instead of underscores and never contain the lemma.
    pub fn antonyms_in_scope(&self, lemma: &str, upos: &str, scope: AntonymScope) -> Result<BTreeSet<String>> {
        let pos = FilePos::from_upos(upos)?;
        let key = lemma_key(lemma);
        let mut found = BTreeSet::new();
        for &offset in self.lemma_synsets(&key, pos) {
            let Some(synset) = self.synset(pos, offset) else {
                continue;
            };
            for p in synset.pointers.iter().filter(|p| p.symbol == ANTONYM) {
                let from_query = p.source_word != 0
                    && synset.words[usize::from(p.source_word) - 1].to_lowercase() == key;
                if scope == AntonymScope::Lemma && !(from_query && p.is_lexical()) {
                    continue;
                }
                let Some(target) = self.synset(p.target_type.file_pos(), p.target_offset) else {
                    continue;
                };
                if p.target_word == 0 {
                    found.extend(target.words.iter().cloned());
                } else {
                    found.insert(target.words[usize::from(p.target_word) - 1].clone());
                }
            }
        }
        Ok(found
            .into_iter()
            .filter(|w| w.to_lowercase() != key)
            .map(|w| w.replace('_', " "))
            .collect())
    }
}

fn lemma_key(lemma: &str) -> String {
    lemma.trim().to_lowercase().replace(' ', "_")
}

fn field<'a>(fields: &mut impl Iterator<Item = &'a str>, what: &str) -> std::result::Result<&'a str, String> {
    fields.next().ok_or_else(|| format!("line ends before {what}"))
}

fn number<T: FromStr>(s: &str, what: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|_| format!("{what} {s:?} is not a number"))
}

fn hex_number(s: &str, what: &str) -> std::result::Result<u16, String> {
    u16::from_str_radix(s, 16).map_err(|_| format!("{what} {s:?} is not hexadecimal"))
}

/// `lemma pos synset_cnt p_cnt [ptr_symbol...] sense_cnt tagsense_cnt offset...`
fn parse_index_line(line: &str) -> std::result::Result<(String, Vec<u32>), String> {
    let mut fields = line.split_ascii_whitespace();
    let lemma = field(&mut fields, "lemma")?.to_owned();
    field(&mut fields, "pos")?.parse::<SynsetType>()?;
    let synset_cnt: usize = number(field(&mut fields, "synset_cnt")?, "synset_cnt")?;
    let p_cnt: usize = number(field(&mut fields, "p_cnt")?, "p_cnt")?;
    for _ in 0..p_cnt {
        field(&mut fields, "pointer symbol")?;
    }
    let _sense_cnt: usize = number(field(&mut fields, "sense_cnt")?, "sense_cnt")?;
    let _tagsense_cnt: usize = number(field(&mut fields, "tagsense_cnt")?, "tagsense_cnt")?;
    let offsets = (0..synset_cnt)
        .map(|_| number(field(&mut fields, "synset offset")?, "synset offset"))
        .collect::<std::result::Result<Vec<u32>, String>>()?;
    if fields.next().is_some() {
        return Err(format!("more than {synset_cnt} synset offsets"));
    }
    Ok((lemma, offsets))
}

/// `offset lex_filenum ss_type w_cnt (word lex_id)... p_cnt (ptr offset pos src/tgt)... | gloss`
fn parse_data_line(line: &str) -> std::result::Result<Synset, String> {
    let head = line.split_once(" | ").map_or(line, |(h, _)| h);
    let mut fields = head.split_ascii_whitespace();
    let offset = number(field(&mut fields, "synset offset")?, "synset offset")?;
    let _lex_filenum: u8 = number(field(&mut fields, "lex_filenum")?, "lex_filenum")?;
    let synset_type = field(&mut fields, "ss_type")?.parse::<SynsetType>()?;
    let w_cnt = hex_number(field(&mut fields, "w_cnt")?, "w_cnt")?;
    let mut words = Vec::with_capacity(usize::from(w_cnt));
    for _ in 0..w_cnt {
        words.push(strip_adjective_marker(field(&mut fields, "word")?).to_owned());
        hex_number(field(&mut fields, "lex_id")?, "lex_id")?;
    }
    let p_cnt: usize = number(field(&mut fields, "p_cnt")?, "p_cnt")?;
    let mut pointers = Vec::with_capacity(p_cnt);
    for _ in 0..p_cnt {
        let symbol = field(&mut fields, "pointer symbol")?.to_owned();
        let target_offset = number(field(&mut fields, "pointer offset")?, "pointer offset")?;
        let target_type = field(&mut fields, "pointer pos")?.parse::<SynsetType>()?;
        let st = field(&mut fields, "source/target")?;
        if st.len() != 4 {
            return Err(format!("source/target {st:?} is not four hex digits"));
        }
        pointers.push(Pointer {
            symbol,
            target_offset,
            target_type,
            source_word: hex_number(&st[..2], "source word")?,
            target_word: hex_number(&st[2..], "target word")?,
        });
    }
    Ok(Synset {
        offset,
        synset_type,
        words,
        pointers,
    })
}

/// Drops the syntactic marker of adjectives, e.g. `galore(ip)`.
fn strip_adjective_marker(word: &str) -> &str {
    for marker in ["(a)", "(p)", "(ip)"] {
        if let Some(stripped) = word.strip_suffix(marker) {
            return stripped;
        }
    }
    word
}
