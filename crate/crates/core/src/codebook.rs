//! Report coding categories, the five-level collaborative knowledge-building
//! rubric, the pre/post Likert questionnaire, and loaders for the record CSVs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stats::{mean_score, paired_t, StatsError, TTestResult};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RecordError {
    #[error("line {line}: input is not valid UTF-8")]
    Encoding { line: usize },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("{0}")]
    Parameter(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CodeId {
    Shr,
    Com,
    Div,
    Cnt,
    Elb,
    Dep,
    Evd,
    Cra,
    Pta,
    Met,
    Mng,
}

pub struct CodeCategory {
    pub id: CodeId,
    pub name: &'static str,
    pub criteria: &'static str,
}

pub const CATEGORIES: [CodeCategory; 11] = [
    CodeCategory {
        id: CodeId::Shr,
        name: "Knowledge Sharing",
        criteria: "values sharing knowledge within the group",
    },
    CodeCategory {
        id: CodeId::Com,
        name: "Communication Skills",
        criteria: "stresses individual skill at sustaining productive conversation",
    },
    CodeCategory {
        id: CodeId::Div,
        name: "Idea Diversity",
        criteria: "recognises the value of a variety of ideas",
    },
    CodeCategory {
        id: CodeId::Cnt,
        name: "Controversy",
        criteria: "sees group work as effective for contested questions",
    },
    CodeCategory {
        id: CodeId::Elb,
        name: "Argument Elaboration",
        criteria: "reports arguments becoming more elaborate through group work",
    },
    CodeCategory {
        id: CodeId::Dep,
        name: "Deep Understanding",
        criteria: "reports deeper individual understanding through group work",
    },
    CodeCategory {
        id: CodeId::Evd,
        name: "Reasoning and Evidences",
        criteria: "stresses reasoning backed by evidence",
    },
    CodeCategory {
        id: CodeId::Cra,
        name: "Knowledge Creation",
        criteria: "frames learning as creating knowledge for a community",
    },
    CodeCategory {
        id: CodeId::Pta,
        name: "Passive to Active",
        criteria: "describes a move from receptive to output-oriented learning",
    },
    CodeCategory {
        id: CodeId::Met,
        name: "Meta Learning",
        criteria: "values reflective activities such as analysing own discourse",
    },
    CodeCategory {
        id: CodeId::Mng,
        name: "Collaboration Management",
        criteria: "addresses scheduling, task allocation and running a group project",
    },
];

impl CodeId {
    pub const ALL: [CodeId; 11] = [
        CodeId::Shr,
        CodeId::Com,
        CodeId::Div,
        CodeId::Cnt,
        CodeId::Elb,
        CodeId::Dep,
        CodeId::Evd,
        CodeId::Cra,
        CodeId::Pta,
        CodeId::Met,
        CodeId::Mng,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CodeId::Shr => "SHR",
            CodeId::Com => "COM",
            CodeId::Div => "DIV",
            CodeId::Cnt => "CNT",
            CodeId::Elb => "ELB",
            CodeId::Dep => "DEP",
            CodeId::Evd => "EVD",
            CodeId::Cra => "CRA",
            CodeId::Pta => "PTA",
            CodeId::Met => "MET",
            CodeId::Mng => "MNG",
        }
    }

    pub fn category(self) -> &'static CodeCategory {
        &CATEGORIES[self.index()]
    }
}

impl fmt::Display for CodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CodeId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CodeId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown code `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodedReport {
    pub report_id: String,
    pub class_year: String,
    pub codes: BTreeSet<CodeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excerpt: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyRow {
    pub class_year: String,
    pub n: usize,
    /// Indexed by [`CodeId::index`].
    pub counts: [usize; 11],
}

impl FrequencyRow {
    pub fn count(&self, code: CodeId) -> usize {
        self.counts[code.index()]
    }
}

/// Per class: number of distinct reports and, per category, the number of
/// reports carrying it. A report id listed more than once within a class is
/// merged.
pub fn frequency_table(reports: &[CodedReport]) -> Vec<FrequencyRow> {
    let mut by_class: BTreeMap<&str, BTreeMap<&str, BTreeSet<CodeId>>> = BTreeMap::new();
    for r in reports {
        by_class
            .entry(r.class_year.as_str())
            .or_default()
            .entry(r.report_id.as_str())
            .or_default()
            .extend(r.codes.iter().copied());
    }
    by_class
        .into_iter()
        .map(|(class, reports)| {
            let mut counts = [0usize; 11];
            for codes in reports.values() {
                for c in codes {
                    counts[c.index()] += 1;
                }
            }
            FrequencyRow {
                class_year: class.to_owned(),
                n: reports.len(),
                counts,
            }
        })
        .collect()
}

/// A rubric level in `1..=5`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct RubricLevel(u8);

impl RubricLevel {
    pub fn new(level: u8) -> Option<Self> {
        (1..=5).contains(&level).then_some(RubricLevel(level))
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn name(self) -> &'static str {
        match self.0 {
            1 => "not ready for work together",
            2 => "task role sharing",
            3 => "knowledge sharing",
            4 => "solo knowledge building",
            _ => "collaborative knowledge building",
        }
    }
}

impl TryFrom<u8> for RubricLevel {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        RubricLevel::new(v).ok_or_else(|| format!("rubric level {v} outside 1..=5"))
    }
}

impl From<RubricLevel> for u8 {
    fn from(l: RubricLevel) -> u8 {
        l.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RubricScore {
    pub report_id: String,
    pub class_year: String,
    pub level: RubricLevel,
}

/// Rubric levels corresponding to a level of the four-level collaboration
/// rubric it refines. Level 3 is split in two.
pub fn map_itl_to_rubkb(itl_level: u8) -> Result<BTreeSet<RubricLevel>, RecordError> {
    let levels: &[u8] = match itl_level {
        1 => &[1],
        2 => &[2],
        3 => &[3, 4],
        4 => &[5],
        other => {
            return Err(RecordError::Parameter(format!(
                "collaboration rubric level {other} outside 1..=4"
            )))
        }
    };
    Ok(levels.iter().map(|&l| RubricLevel(l)).collect())
}

/// Rubric levels grouped by class, as score vectors for a t-test.
pub fn scores_by_class(scores: &[RubricScore]) -> BTreeMap<String, Vec<f64>> {
    let mut out: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for s in scores {
        out.entry(s.class_year.clone())
            .or_default()
            .push(f64::from(s.level.get()));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Question {
    GeneralLearning,
    CollaborativeLearning,
}

impl Question {
    pub fn as_str(self) -> &'static str {
        match self {
            Question::GeneralLearning => "general-learning",
            Question::CollaborativeLearning => "collaborative-learning",
        }
    }
}

impl FromStr for Question {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "general-learning" => Ok(Question::GeneralLearning),
            "collaborative-learning" => Ok(Question::CollaborativeLearning),
            other => Err(format!("unknown question `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LikertResponse {
    pub student_id: String,
    pub question: Question,
    pub pre: u8,
    pub post: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LikertSummary {
    pub question: Question,
    pub n: usize,
    pub pre_mean: f64,
    pub post_mean: f64,
    pub test: TTestResult,
}

pub fn likert_summary(
    responses: &[LikertResponse],
    question: Question,
) -> Result<LikertSummary, StatsError> {
    let (pre, post): (Vec<f64>, Vec<f64>) = responses
        .iter()
        .filter(|r| r.question == question)
        .map(|r| (f64::from(r.pre), f64::from(r.post)))
        .unzip();
    if pre.len() < 2 {
        return Err(StatsError::SampleSize {
            needed: 2,
            got: pre.len(),
        });
    }
    Ok(LikertSummary {
        question,
        n: pre.len(),
        pre_mean: mean_score(&pre)?,
        post_mean: mean_score(&post)?,
        test: paired_t(&pre, &post)?,
    })
}

fn read_records(bytes: &[u8], header: &[&str]) -> Result<Vec<(usize, Vec<String>)>, RecordError> {
    let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
    let text = std::str::from_utf8(bytes).map_err(|e| RecordError::Encoding {
        line: bytes[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count()
            + 1,
    })?;
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let found: Vec<String> = reader
        .headers()
        .map_err(|e| RecordError::Format {
            line: 1,
            message: e.to_string(),
        })?
        .iter()
        .map(|h| h.trim().to_owned())
        .collect();
    if found != header {
        return Err(RecordError::Format {
            line: 1,
            message: format!("header must be `{}`", header.join(",")),
        });
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| RecordError::Format {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        rows.push((line, rec.iter().map(|f| f.trim().to_owned()).collect()));
    }
    Ok(rows)
}

fn non_empty(line: usize, field: &str, value: String) -> Result<String, RecordError> {
    if value.is_empty() {
        Err(RecordError::Format {
            line,
            message: format!("{field} is empty"),
        })
    } else {
        Ok(value)
    }
}

/// `report_id,class_year,codes` with codes `|`-separated (possibly empty).
pub fn load_coded_reports(bytes: &[u8]) -> Result<Vec<CodedReport>, RecordError> {
    read_records(bytes, &["report_id", "class_year", "codes"])?
        .into_iter()
        .map(|(line, mut f)| {
            let codes = f[2]
                .split('|')
                .map(str::trim)
                .filter(|c| !c.is_empty())
                .map(|c| {
                    c.parse()
                        .map_err(|message| RecordError::Format { line, message })
                })
                .collect::<Result<BTreeSet<CodeId>, _>>()?;
            Ok(CodedReport {
                class_year: non_empty(line, "class_year", std::mem::take(&mut f[1]))?,
                report_id: non_empty(line, "report_id", std::mem::take(&mut f[0]))?,
                codes,
                excerpt: None,
            })
        })
        .collect()
}

pub fn coded_reports_csv(reports: &[CodedReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["report_id", "class_year", "codes"])
        .expect("in-memory write");
    for r in reports {
        let codes: Vec<&str> = r.codes.iter().map(|c| c.as_str()).collect();
        w.write_record([
            r.report_id.as_str(),
            r.class_year.as_str(),
            &codes.join("|"),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

fn parse_level(line: usize, field: &str, raw: &str, max: u8) -> Result<u8, RecordError> {
    raw.parse::<u8>()
        .ok()
        .filter(|v| (1..=max).contains(v))
        .ok_or_else(|| RecordError::Format {
            line,
            message: format!("{field} `{raw}` is not an integer in 1..={max}"),
        })
}

/// `report_id,class_year,level`.
pub fn load_rubric_scores(bytes: &[u8]) -> Result<Vec<RubricScore>, RecordError> {
    read_records(bytes, &["report_id", "class_year", "level"])?
        .into_iter()
        .map(|(line, mut f)| {
            let level = RubricLevel(parse_level(line, "level", &f[2], 5)?);
            Ok(RubricScore {
                report_id: non_empty(line, "report_id", std::mem::take(&mut f[0]))?,
                class_year: non_empty(line, "class_year", std::mem::take(&mut f[1]))?,
                level,
            })
        })
        .collect()
}

/// `student_id,question,pre,post`.
pub fn load_likert(bytes: &[u8]) -> Result<Vec<LikertResponse>, RecordError> {
    read_records(bytes, &["student_id", "question", "pre", "post"])?
        .into_iter()
        .map(|(line, mut f)| {
            let question = f[1]
                .parse()
                .map_err(|message| RecordError::Format { line, message })?;
            Ok(LikertResponse {
                student_id: non_empty(line, "student_id", std::mem::take(&mut f[0]))?,
                question,
                pre: parse_level(line, "pre", &f[2], 5)?,
                post: parse_level(line, "post", &f[3], 5)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eleven_unique_categories() {
        let ids: BTreeSet<&str> = CATEGORIES.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids.len(), 11);
        for (i, c) in CATEGORIES.iter().enumerate() {
            assert_eq!(c.id.index(), i);
            assert_eq!(c.id.as_str().parse::<CodeId>().unwrap(), c.id);
        }
        assert_eq!(CodeId::Cra.category().name, "Knowledge Creation");
    }

    #[test]
    fn empty_frequency_table() {
        assert!(frequency_table(&[]).is_empty());
    }

    #[test]
    fn duplicate_report_ids_merge() {
        let r = |id: &str, codes: &[CodeId]| CodedReport {
            report_id: id.into(),
            class_year: "2012".into(),
            codes: codes.iter().copied().collect(),
            excerpt: None,
        };
        let t = frequency_table(&[
            r("a", &[CodeId::Met]),
            r("a", &[CodeId::Met, CodeId::Shr]),
            r("b", &[]),
        ]);
        assert_eq!(t[0].n, 2);
        assert_eq!(t[0].count(CodeId::Met), 1);
        assert_eq!(t[0].count(CodeId::Shr), 1);
    }

    #[test]
    fn itl_mapping() {
        let l = |v: &[u8]| v.iter().map(|&x| RubricLevel(x)).collect::<BTreeSet<_>>();
        assert_eq!(map_itl_to_rubkb(1).unwrap(), l(&[1]));
        assert_eq!(map_itl_to_rubkb(3).unwrap(), l(&[3, 4]));
        assert_eq!(map_itl_to_rubkb(4).unwrap(), l(&[5]));
        assert!(map_itl_to_rubkb(0).is_err());
        assert!(map_itl_to_rubkb(5).is_err());
    }

    #[test]
    fn itl_images_partition_rubric_levels() {
        let mut all = Vec::new();
        for itl in 1..=4 {
            all.extend(
                map_itl_to_rubkb(itl)
                    .unwrap()
                    .into_iter()
                    .map(RubricLevel::get),
            );
        }
        all.sort_unstable();
        assert_eq!(all, [1, 2, 3, 4, 5]);
    }

    #[test]
    fn rubric_level_bounds() {
        assert!(RubricLevel::new(0).is_none());
        assert!(RubricLevel::new(6).is_none());
        assert_eq!(
            RubricLevel::new(4).unwrap().name(),
            "solo knowledge building"
        );
        assert!(serde_json::from_str::<RubricLevel>("9").is_err());
    }

    #[test]
    fn record_loaders() {
        let reports =
            load_coded_reports(b"report_id,class_year,codes\nr1,2012,MET|CRA\nr2,2012,\n").unwrap();
        assert_eq!(reports[0].codes.len(), 2);
        assert!(reports[1].codes.is_empty());
        assert_eq!(
            load_coded_reports(coded_reports_csv(&reports).as_bytes()).unwrap(),
            reports
        );

        let err = load_coded_reports(b"report_id,class_year,codes\nr1,2012,XYZ\n").unwrap_err();
        assert!(matches!(err, RecordError::Format { line: 2, .. }));

        let scores = load_rubric_scores(b"report_id,class_year,level\nr1,2010,3\n").unwrap();
        assert_eq!(scores[0].level.get(), 3);
        assert!(load_rubric_scores(b"report_id,class_year,level\nr1,2010,6\n").is_err());

        let lk = load_likert(b"student_id,question,pre,post\ns1,general-learning,3,4\n").unwrap();
        assert_eq!(lk[0].question, Question::GeneralLearning);
        assert!(load_likert(b"student_id,question,pre,post\ns1,other,3,4\n").is_err());
        assert!(load_likert(b"student,question,pre,post\n").is_err());
    }

    #[test]
    fn likert_needs_pairs() {
        let one = [LikertResponse {
            student_id: "s".into(),
            question: Question::GeneralLearning,
            pre: 3,
            post: 4,
        }];
        assert!(matches!(
            likert_summary(&one, Question::GeneralLearning),
            Err(StatsError::SampleSize { .. })
        ));
        let same: Vec<_> = (0..4)
            .map(|i| LikertResponse {
                student_id: format!("s{i}"),
                question: Question::CollaborativeLearning,
                pre: 3,
                post: 3,
            })
            .collect();
        assert_eq!(
            likert_summary(&same, Question::CollaborativeLearning).unwrap_err(),
            StatsError::DegenerateVariance
        );
    }
}
