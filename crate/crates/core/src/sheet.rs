//! The six-item discourse analysis sheet: keywords, topics, phases, pivotal
//! units, individual contributions and improvements.
//!
//! Sheets are plain drafts; [`validate_sheet`] reports what is missing or
//! inconsistent without rejecting the draft, so partial work can be saved.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Vocabulary};
use crate::metrics::{metric_timeseries, Metric};
use crate::network::{BipartiteGraph, NetworkKind};
use crate::text::MatchPolicy;

pub const SCHEMA_VERSION: u32 = 1;
pub const KEYWORD_LIMIT: usize = 20;
pub const TOPIC_COUNT: usize = 3;
pub const PIVOTAL_COUNT: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SheetError {
    #[error("sheet document is malformed: {0}")]
    Parse(String),
    #[error("unsupported sheet schema_version {found} (expected {SCHEMA_VERSION})")]
    SchemaVersion { found: u32 },
    #[error("cannot start a sheet on an empty corpus")]
    EmptyCorpus,
    #[error("precondition failed: {0}")]
    Precondition(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseTag {
    KnowledgeSharing,
    KnowledgeConstruction,
    KnowledgeCreation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseSegment {
    pub start_unit: u64,
    pub end_unit: u64,
    pub tag: PhaseTag,
    #[serde(default)]
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PivotalUnit {
    pub unit_id: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisSheet {
    pub schema_version: u32,
    #[serde(default)]
    pub keywords: Vec<String>,
    #[serde(default)]
    pub topics: Vec<String>,
    #[serde(default)]
    pub phases: Vec<PhaseSegment>,
    #[serde(default)]
    pub pivotal: Vec<PivotalUnit>,
    #[serde(default)]
    pub contributions: BTreeMap<String, String>,
    #[serde(default)]
    pub improvements: String,
}

impl Default for AnalysisSheet {
    fn default() -> Self {
        AnalysisSheet {
            schema_version: SCHEMA_VERSION,
            keywords: Vec::new(),
            topics: Vec::new(),
            phases: Vec::new(),
            pivotal: Vec::new(),
            contributions: BTreeMap::new(),
            improvements: String::new(),
        }
    }
}

impl AnalysisSheet {
    pub fn from_json(bytes: &[u8]) -> Result<Self, SheetError> {
        #[derive(Deserialize)]
        struct Probe {
            schema_version: Option<u32>,
        }
        let probe: Probe =
            serde_json::from_slice(bytes).map_err(|e| SheetError::Parse(e.to_string()))?;
        match probe.schema_version {
            None => return Err(SheetError::Parse("missing field `schema_version`".into())),
            Some(SCHEMA_VERSION) => {}
            Some(found) => return Err(SheetError::SchemaVersion { found }),
        }
        serde_json::from_slice(bytes).map_err(|e| SheetError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }
}

/// What a sheet is validated against: the session's units, agents and
/// vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheetContext {
    unit_ids: Vec<u64>,
    agents: Vec<String>,
    vocabulary: Vec<String>,
}

impl SheetContext {
    pub fn new(corpus: &Corpus, vocab: &Vocabulary) -> Self {
        SheetContext {
            unit_ids: corpus.units().iter().map(|u| u.unit_id).collect(),
            agents: corpus.agents().to_vec(),
            vocabulary: vocab.words().to_vec(),
        }
    }

    fn from_bipartite(bip: &BipartiteGraph) -> Self {
        SheetContext {
            unit_ids: bip.unit_ids().to_vec(),
            agents: bip.agents().to_vec(),
            vocabulary: bip.word_labels().to_vec(),
        }
    }
}

/// Starts an empty draft for a loaded session.
pub fn new_sheet(corpus: &Corpus, _vocab: &Vocabulary) -> Result<AnalysisSheet, SheetError> {
    if corpus.is_empty() {
        return Err(SheetError::EmptyCorpus);
    }
    Ok(AnalysisSheet::default())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoKeywords,
    KeywordLimitExceeded { count: usize },
    UnknownKeyword { word: String },
    DuplicateKeyword { word: String },
    TopicCount { found: usize },
    EmptyTopic { index: usize },
    NoPhases,
    InvertedPhase { start: u64, end: u64 },
    UnknownPhaseUnit { unit_id: u64 },
    PhasesOutOfOrder { index: usize },
    OverlappingPhases { index: usize },
    PhaseGap { after: u64, before: u64 },
    PhaseStart { expected: u64, found: u64 },
    PhaseEnd { expected: u64, found: u64 },
    PivotalCount { found: usize },
    UnknownPivotalUnit { unit_id: u64 },
    DuplicatePivotalUnit { unit_id: u64 },
    MissingPivotalReason { unit_id: u64 },
    MissingContribution { agent: String },
    UnknownContributor { agent: String },
    NoImprovements,
}

impl Violation {
    pub fn code(&self) -> &'static str {
        match self {
            Violation::NoKeywords => "no-keywords",
            Violation::KeywordLimitExceeded { .. } => "keyword-limit-exceeded",
            Violation::UnknownKeyword { .. } => "unknown-keyword",
            Violation::DuplicateKeyword { .. } => "duplicate-keyword",
            Violation::TopicCount { .. } => "topic-count",
            Violation::EmptyTopic { .. } => "empty-topic",
            Violation::NoPhases => "no-phases",
            Violation::InvertedPhase { .. } => "inverted-phase",
            Violation::UnknownPhaseUnit { .. } => "unknown-phase-unit",
            Violation::PhasesOutOfOrder { .. } => "phases-out-of-order",
            Violation::OverlappingPhases { .. } => "overlapping-phases",
            Violation::PhaseGap { .. } => "phase-gap",
            Violation::PhaseStart { .. } => "phase-start",
            Violation::PhaseEnd { .. } => "phase-end",
            Violation::PivotalCount { .. } => "pivotal-count",
            Violation::UnknownPivotalUnit { .. } => "unknown-pivotal-unit",
            Violation::DuplicatePivotalUnit { .. } => "duplicate-pivotal-unit",
            Violation::MissingPivotalReason { .. } => "missing-pivotal-reason",
            Violation::MissingContribution { .. } => "missing-contribution",
            Violation::UnknownContributor { .. } => "unknown-contributor",
            Violation::NoImprovements => "no-improvements",
        }
    }

    fn is_phase(&self) -> bool {
        matches!(
            self,
            Violation::NoPhases
                | Violation::InvertedPhase { .. }
                | Violation::UnknownPhaseUnit { .. }
                | Violation::PhasesOutOfOrder { .. }
                | Violation::OverlappingPhases { .. }
                | Violation::PhaseGap { .. }
                | Violation::PhaseStart { .. }
                | Violation::PhaseEnd { .. }
        )
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoKeywords => write!(f, "at least one keyword is required"),
            Violation::KeywordLimitExceeded { count } => {
                write!(f, "keyword limit {KEYWORD_LIMIT} exceeded ({count} listed)")
            }
            Violation::UnknownKeyword { word } => {
                write!(f, "keyword `{word}` is not in the session vocabulary")
            }
            Violation::DuplicateKeyword { word } => write!(f, "keyword `{word}` is listed twice"),
            Violation::TopicCount { found } => {
                write!(f, "exactly {TOPIC_COUNT} topics required, found {found}")
            }
            Violation::EmptyTopic { index } => write!(f, "topic {} is empty", index + 1),
            Violation::NoPhases => write!(f, "no phase segments"),
            Violation::InvertedPhase { start, end } => {
                write!(
                    f,
                    "phase segment starts at unit {start} after its end {end}"
                )
            }
            Violation::UnknownPhaseUnit { unit_id } => {
                write!(f, "phase boundary unit {unit_id} does not exist")
            }
            Violation::PhasesOutOfOrder { index } => {
                write!(
                    f,
                    "phase segment {} starts before the previous one",
                    index + 1
                )
            }
            Violation::OverlappingPhases { index } => {
                write!(
                    f,
                    "overlapping phase segments ({} and {})",
                    index,
                    index + 1
                )
            }
            Violation::PhaseGap { after, before } => {
                write!(f, "units between {after} and {before} belong to no phase")
            }
            Violation::PhaseStart { expected, found } => {
                write!(
                    f,
                    "first phase must start at unit {expected}, starts at {found}"
                )
            }
            Violation::PhaseEnd { expected, found } => {
                write!(f, "last phase must end at unit {expected}, ends at {found}")
            }
            Violation::PivotalCount { found } => {
                write!(
                    f,
                    "exactly {PIVOTAL_COUNT} pivotal units required, found {found}"
                )
            }
            Violation::UnknownPivotalUnit { unit_id } => {
                write!(f, "pivotal unit {unit_id} does not exist")
            }
            Violation::DuplicatePivotalUnit { unit_id } => {
                write!(f, "pivotal unit {unit_id} is listed twice")
            }
            Violation::MissingPivotalReason { unit_id } => {
                write!(f, "pivotal unit {unit_id} has no reason")
            }
            Violation::MissingContribution { agent } => {
                write!(f, "no contribution described for `{agent}`")
            }
            Violation::UnknownContributor { agent } => {
                write!(f, "`{agent}` does not appear in the discourse")
            }
            Violation::NoImprovements => write!(f, "improvements are not described"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SheetWarning {
    FewKeywords { count: usize },
}

impl SheetWarning {
    pub fn code(&self) -> &'static str {
        match self {
            SheetWarning::FewKeywords { .. } => "few-keywords",
        }
    }
}

impl fmt::Display for SheetWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SheetWarning::FewKeywords { count } => {
                write!(f, "{count} keywords listed, {KEYWORD_LIMIT} expected")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<SheetWarning>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct IssueWire {
    pub code: String,
    pub message: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct ReportWire {
    pub valid: bool,
    pub violations: Vec<IssueWire>,
    pub warnings: Vec<IssueWire>,
}

impl From<&ValidationReport> for ReportWire {
    fn from(r: &ValidationReport) -> Self {
        ReportWire {
            valid: r.is_valid(),
            violations: r
                .violations
                .iter()
                .map(|v| IssueWire {
                    code: v.code().into(),
                    message: v.to_string(),
                })
                .collect(),
            warnings: r
                .warnings
                .iter()
                .map(|w| IssueWire {
                    code: w.code().into(),
                    message: w.to_string(),
                })
                .collect(),
        }
    }
}

fn check_phases(phases: &[PhaseSegment], unit_ids: &[u64], out: &mut Vec<Violation>) {
    if phases.is_empty() {
        out.push(Violation::NoPhases);
        return;
    }
    let position: HashMap<u64, usize> = unit_ids
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, i))
        .collect();
    let before = out.len();
    for seg in phases {
        for id in [seg.start_unit, seg.end_unit] {
            if !position.contains_key(&id) {
                out.push(Violation::UnknownPhaseUnit { unit_id: id });
            }
        }
        if seg.start_unit > seg.end_unit {
            out.push(Violation::InvertedPhase {
                start: seg.start_unit,
                end: seg.end_unit,
            });
        }
    }
    if out.len() > before {
        // partition checks are meaningless with broken boundaries
        return;
    }

    let (Some(&first_id), Some(&last_id)) = (unit_ids.first(), unit_ids.last()) else {
        return;
    };
    if phases[0].start_unit != first_id {
        out.push(Violation::PhaseStart {
            expected: first_id,
            found: phases[0].start_unit,
        });
    }
    for (i, pair) in phases.windows(2).enumerate() {
        let (prev, next) = (&pair[0], &pair[1]);
        if next.start_unit < prev.start_unit {
            out.push(Violation::PhasesOutOfOrder { index: i + 1 });
        } else if next.start_unit <= prev.end_unit {
            out.push(Violation::OverlappingPhases { index: i + 1 });
        } else if position[&next.start_unit] != position[&prev.end_unit] + 1 {
            out.push(Violation::PhaseGap {
                after: prev.end_unit,
                before: next.start_unit,
            });
        }
    }
    let last = phases.last().expect("non-empty");
    if last.end_unit != last_id {
        out.push(Violation::PhaseEnd {
            expected: last_id,
            found: last.end_unit,
        });
    }
}

/// Lists every completeness and consistency problem of `sheet`.
pub fn validate_sheet(sheet: &AnalysisSheet, ctx: &SheetContext) -> ValidationReport {
    let mut report = ValidationReport::default();
    let v = &mut report.violations;

    let n_keywords = sheet.keywords.len();
    if n_keywords == 0 {
        v.push(Violation::NoKeywords);
    } else if n_keywords > KEYWORD_LIMIT {
        v.push(Violation::KeywordLimitExceeded { count: n_keywords });
    } else if n_keywords < KEYWORD_LIMIT {
        report
            .warnings
            .push(SheetWarning::FewKeywords { count: n_keywords });
    }
    let mut seen = BTreeSet::new();
    for word in &sheet.keywords {
        if !ctx.vocabulary.contains(word) {
            v.push(Violation::UnknownKeyword { word: word.clone() });
        }
        if !seen.insert(word.as_str()) {
            v.push(Violation::DuplicateKeyword { word: word.clone() });
        }
    }

    if sheet.topics.len() != TOPIC_COUNT {
        v.push(Violation::TopicCount {
            found: sheet.topics.len(),
        });
    }
    for (index, topic) in sheet.topics.iter().enumerate() {
        if topic.trim().is_empty() {
            v.push(Violation::EmptyTopic { index });
        }
    }

    check_phases(&sheet.phases, &ctx.unit_ids, v);

    if sheet.pivotal.len() != PIVOTAL_COUNT {
        v.push(Violation::PivotalCount {
            found: sheet.pivotal.len(),
        });
    }
    let mut seen = BTreeSet::new();
    for p in &sheet.pivotal {
        if ctx.unit_ids.binary_search(&p.unit_id).is_err() {
            v.push(Violation::UnknownPivotalUnit { unit_id: p.unit_id });
        }
        if !seen.insert(p.unit_id) {
            v.push(Violation::DuplicatePivotalUnit { unit_id: p.unit_id });
        }
        if p.reason.trim().is_empty() {
            v.push(Violation::MissingPivotalReason { unit_id: p.unit_id });
        }
    }

    for agent in &ctx.agents {
        let described = sheet
            .contributions
            .get(agent)
            .is_some_and(|t| !t.trim().is_empty());
        if !described {
            v.push(Violation::MissingContribution {
                agent: agent.clone(),
            });
        }
    }
    for agent in sheet.contributions.keys() {
        if !ctx.agents.contains(agent) {
            v.push(Violation::UnknownContributor {
                agent: agent.clone(),
            });
        }
    }

    if sheet.improvements.trim().is_empty() {
        v.push(Violation::NoImprovements);
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseStats {
    pub start_unit: u64,
    pub end_unit: u64,
    pub tag: PhaseTag,
    pub units: usize,
    pub new_word_edges: usize,
}

/// Per-phase unit counts and the word-network edges first appearing inside
/// each phase. Requires the phases to partition the discourse.
pub fn phase_summary(
    sheet: &AnalysisSheet,
    bip: &BipartiteGraph,
) -> Result<Vec<PhaseStats>, SheetError> {
    if bip.unit_count() == 0 {
        return Err(SheetError::Precondition(
            "the discourse has no units".into(),
        ));
    }
    let ctx = SheetContext::from_bipartite(bip);
    let mut problems = Vec::new();
    check_phases(&sheet.phases, &ctx.unit_ids, &mut problems);
    if let Some(p) = problems.iter().find(|p| p.is_phase()) {
        return Err(SheetError::Precondition(format!(
            "phases are not valid: {p}"
        )));
    }

    let total_degree = metric_timeseries(bip, NetworkKind::Words, Metric::TotalDegree).values;
    let edges_at = |k: usize| (total_degree[k] / 2.0) as usize;
    Ok(sheet
        .phases
        .iter()
        .map(|seg| {
            let start = bip.unit_index(seg.start_unit).expect("validated");
            let end = bip.unit_index(seg.end_unit).expect("validated");
            PhaseStats {
                start_unit: seg.start_unit,
                end_unit: seg.end_unit,
                tag: seg.tag,
                units: end - start + 1,
                new_word_edges: edges_at(end + 1) - edges_at(start),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordCandidate {
    pub word: String,
    pub document_frequency: usize,
}

/// Candidate keywords ranked by the number of units containing them, ties
/// broken lexicographically.
pub fn suggest_keywords(
    corpus: &Corpus,
    policy: MatchPolicy,
    limit: usize,
) -> Vec<KeywordCandidate> {
    let mut df: HashMap<String, usize> = HashMap::new();
    for unit in corpus.units() {
        let tokens: BTreeSet<String> = policy.tokenize(&unit.text).into_iter().collect();
        for t in tokens {
            *df.entry(t).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<KeywordCandidate> = df
        .into_iter()
        .map(|(word, document_frequency)| KeywordCandidate {
            word,
            document_frequency,
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.document_frequency
            .cmp(&a.document_frequency)
            .then_with(|| a.word.cmp(&b.word))
    });
    ranked.truncate(limit);
    ranked
}
