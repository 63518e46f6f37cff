//! Discourse transcripts, target-word lists and the occurrence relation
//! between them.
//!
//! A transcript is a UTF-8 CSV with the header `id,agent,text` and an optional
//! trailing `group` column. Word lists are plain text, one word per line, with
//! `#` comments and blank lines ignored.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{MatchPolicy, Matcher};

const BOM: &[u8] = b"\xEF\xBB\xBF";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorpusError {
    #[error("line {line}: input is not valid UTF-8")]
    Encoding { line: usize },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("line {line}: {message}")]
    Integrity { line: usize, message: String },
    #[error("corpus contains no discourse units")]
    EmptyCorpus,
    #[error("word list contains no words after removing comments and blank lines")]
    EmptyVocabulary,
}

impl CorpusError {
    /// Source line the error refers to, when there is one.
    pub fn line(&self) -> Option<usize> {
        match self {
            CorpusError::Encoding { line }
            | CorpusError::Format { line, .. }
            | CorpusError::Integrity { line, .. } => Some(*line),
            CorpusError::EmptyCorpus | CorpusError::EmptyVocabulary => None,
        }
    }
}

/// One turn, posting or sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscourseUnit {
    pub unit_id: u64,
    pub agent: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum LoadWarning {
    EmptyText { unit_id: u64 },
}

/// Ordered discourse units plus the agents that produced them.
///
/// Agents are kept in order of first appearance, which is also the node order
/// of every agent network derived from this corpus.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    units: Vec<DiscourseUnit>,
    agents: Vec<String>,
    warnings: Vec<LoadWarning>,
}

impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.units == other.units
    }
}

impl Eq for Corpus {}

impl Corpus {
    /// Builds a corpus from units already in memory, enforcing the same
    /// invariants as [`load_corpus`]. Line numbers in errors count data rows
    /// from 2 as if the units had come from a file.
    pub fn from_units(units: Vec<DiscourseUnit>) -> Result<Self, CorpusError> {
        let mut corpus = Corpus::default();
        for (i, mut unit) in units.into_iter().enumerate() {
            unit.agent = unit.agent.trim().to_owned();
            if matches!(unit.group.as_deref(), Some("")) {
                unit.group = None;
            }
            corpus.push(unit, i + 2)?;
        }
        Ok(corpus)
    }

    fn push(&mut self, unit: DiscourseUnit, line: usize) -> Result<(), CorpusError> {
        if unit.unit_id == 0 {
            return Err(CorpusError::Format {
                line,
                message: "unit id must be a positive integer".into(),
            });
        }
        if unit.agent.is_empty() {
            return Err(CorpusError::Integrity {
                line,
                message: "agent label is empty".into(),
            });
        }
        if let Some(prev) = self.units.last() {
            if unit.unit_id == prev.unit_id {
                return Err(CorpusError::Integrity {
                    line,
                    message: format!("duplicate unit id {}", unit.unit_id),
                });
            }
            if unit.unit_id < prev.unit_id {
                return Err(CorpusError::Integrity {
                    line,
                    message: format!(
                        "unit id {} is not greater than preceding id {}",
                        unit.unit_id, prev.unit_id
                    ),
                });
            }
        }
        if unit.text.trim().is_empty() {
            self.warnings.push(LoadWarning::EmptyText {
                unit_id: unit.unit_id,
            });
        }
        if !self.agents.contains(&unit.agent) {
            self.agents.push(unit.agent.clone());
        }
        self.units.push(unit);
        Ok(())
    }

    pub fn units(&self) -> &[DiscourseUnit] {
        &self.units
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn warnings(&self) -> &[LoadWarning] {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn unit(&self, unit_id: u64) -> Option<&DiscourseUnit> {
        self.units
            .binary_search_by_key(&unit_id, |u| u.unit_id)
            .ok()
            .map(|i| &self.units[i])
    }

    /// Serializes back to the transcript CSV format. The `group` column is
    /// written only when at least one unit carries a group.
    pub fn to_csv_bytes(&self) -> Vec<u8> {
        let with_group = self.units.iter().any(|u| u.group.is_some());
        let mut writer = csv::Writer::from_writer(Vec::new());
        let header: &[&str] = if with_group {
            &["id", "agent", "text", "group"]
        } else {
            &["id", "agent", "text"]
        };
        writer.write_record(header).expect("in-memory write");
        for u in &self.units {
            let id = u.unit_id.to_string();
            let mut record = vec![id.as_str(), u.agent.as_str(), u.text.as_str()];
            if with_group {
                record.push(u.group.as_deref().unwrap_or(""));
            }
            writer.write_record(&record).expect("in-memory write");
        }
        writer.into_inner().expect("in-memory flush")
    }
}

fn check_utf8(bytes: &[u8]) -> Result<&str, CorpusError> {
    std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count()
            + 1;
        CorpusError::Encoding { line }
    })
}

fn csv_line(err: &csv::Error) -> usize {
    err.position().map(|p| p.line() as usize).unwrap_or(0)
}

/// Parses a discourse transcript.
pub fn load_corpus(bytes: &[u8]) -> Result<Corpus, CorpusError> {
    let bytes = bytes.strip_prefix(BOM).unwrap_or(bytes);
    let text = check_utf8(bytes)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());

    let header = reader.headers().map_err(|e| CorpusError::Format {
        line: csv_line(&e).max(1),
        message: format!("unreadable header: {e}"),
    })?;
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    let has_group = match names.as_slice() {
        ["id", "agent", "text"] => false,
        ["id", "agent", "text", "group"] => true,
        [] | [""] => {
            return Err(CorpusError::Format {
                line: 1,
                message: "missing header row `id,agent,text[,group]`".into(),
            })
        }
        other => {
            let missing: Vec<&str> = ["id", "agent", "text"]
                .into_iter()
                .filter(|c| !other.contains(c))
                .collect();
            let message = if missing.is_empty() {
                format!(
                    "header must be `id,agent,text[,group]`, found `{}`",
                    other.join(",")
                )
            } else {
                format!(
                    "header is missing required column(s): {}",
                    missing.join(", ")
                )
            };
            return Err(CorpusError::Format { line: 1, message });
        }
    };

    let mut corpus = Corpus::default();
    for record in reader.records() {
        let record = record.map_err(|e| CorpusError::Format {
            line: csv_line(&e),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let raw_id = record[0].trim();
        let unit_id: u64 = raw_id.parse().map_err(|_| CorpusError::Format {
            line,
            message: format!("unit id `{raw_id}` is not a positive integer"),
        })?;
        let group = if has_group {
            Some(record[3].trim())
                .filter(|g| !g.is_empty())
                .map(str::to_owned)
        } else {
            None
        };
        let unit = DiscourseUnit {
            unit_id,
            agent: record[1].trim().to_owned(),
            text: record[2].to_owned(),
            group,
        };
        corpus.push(unit, line)?;
    }
    Ok(corpus)
}

/// Ordered, de-duplicated list of target words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    words: Vec<String>,
    normalized: bool,
}

impl Vocabulary {
    /// Parses a word list. Words are normalized with `policy` and duplicates
    /// after normalization are dropped, keeping the first occurrence.
    pub fn parse(bytes: &[u8], policy: MatchPolicy) -> Result<Self, CorpusError> {
        let bytes = bytes.strip_prefix(BOM).unwrap_or(bytes);
        let text = check_utf8(bytes)?;
        let mut words: Vec<String> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let word = policy.normalize(line);
            if !words.contains(&word) {
                words.push(word);
            }
        }
        Self::new(words, policy.normalizes())
    }

    /// Wraps an already-prepared word list. Duplicates are removed.
    pub fn new(words: Vec<String>, normalized: bool) -> Result<Self, CorpusError> {
        let mut unique: Vec<String> = Vec::with_capacity(words.len());
        for w in words {
            if !unique.contains(&w) {
                unique.push(w);
            }
        }
        if unique.is_empty() {
            return Err(CorpusError::EmptyVocabulary);
        }
        Ok(Vocabulary {
            words: unique,
            normalized,
        })
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.iter().any(|w| w == word)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for w in &self.words {
            out.push_str(w);
            out.push('\n');
        }
        out
    }
}

pub fn load_vocabulary(bytes: &[u8], policy: MatchPolicy) -> Result<Vocabulary, CorpusError> {
    Vocabulary::parse(bytes, policy)
}

/// Boolean units × words incidence, rows in corpus order and columns in
/// vocabulary order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccurrenceMatrix {
    units: usize,
    words: usize,
    cells: Vec<bool>,
}

impl OccurrenceMatrix {
    pub fn from_rows(words: usize, rows: &[Vec<usize>]) -> Self {
        let mut m = OccurrenceMatrix {
            units: rows.len(),
            words,
            cells: vec![false; rows.len() * words],
        };
        for (u, row) in rows.iter().enumerate() {
            for &w in row {
                assert!(w < words, "word index {w} out of range");
                m.cells[u * words + w] = true;
            }
        }
        m
    }

    pub fn units(&self) -> usize {
        self.units
    }

    pub fn words(&self) -> usize {
        self.words
    }

    pub fn get(&self, unit: usize, word: usize) -> bool {
        assert!(unit < self.units && word < self.words);
        self.cells[unit * self.words + word]
    }

    pub fn row(&self, unit: usize) -> &[bool] {
        &self.cells[unit * self.words..(unit + 1) * self.words]
    }

    /// Word indices matched in `unit`, ascending.
    pub fn row_words(&self, unit: usize) -> Vec<usize> {
        self.row(unit)
            .iter()
            .enumerate()
            .filter_map(|(w, &hit)| hit.then_some(w))
            .collect()
    }

    pub fn incidence_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }
}

pub fn occurrence_matrix(
    corpus: &Corpus,
    vocab: &Vocabulary,
    policy: MatchPolicy,
) -> Result<OccurrenceMatrix, CorpusError> {
    if corpus.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    if vocab.is_empty() {
        return Err(CorpusError::EmptyVocabulary);
    }
    let matcher = Matcher::new(vocab, policy);
    let rows: Vec<Vec<usize>> = corpus
        .units()
        .iter()
        .map(|u| matcher.match_text(&u.text).into_iter().collect())
        .collect();
    Ok(OccurrenceMatrix::from_rows(vocab.len(), &rows))
}
