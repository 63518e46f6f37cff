//! Command line interface. Every verb prints the same bytes the HTTP API
//! returns for the same parameters.

use std::fs;
use std::io::Write;
use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use discourse_core::codebook::{
    frequency_table, likert_summary, load_coded_reports, load_likert, load_rubric_scores,
    scores_by_class, Question,
};
use discourse_core::sheet::{phase_summary, AnalysisSheet, ReportWire, SheetContext};
use discourse_core::stats::{mean_score, unpaired_t, TTestWire, TestKind};
use discourse_core::{Analysis, MatchMode, MatchPolicy};
use serde::Serialize;

use crate::error::ApiError;
use crate::ops::{self, ExportParams, TTestRequest};
use crate::store::SessionStore;

#[derive(Debug, Parser)]
#[command(name = "discourse", version, about = "Discourse network analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a transcript and word list and summarize the incidence.
    Build(Inputs),
    /// Print the word, unit and agent networks after `step` units.
    Networks {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        step: usize,
    },
    /// Print a metric at every step.
    Series {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value = "words")]
        kind: String,
        #[arg(long)]
        metric: String,
    },
    /// Render a network (json, dot) or a metric series (csv).
    Export {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        step: Option<String>,
        #[arg(long)]
        metric: Option<String>,
        /// Write to a file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    #[command(subcommand)]
    Sheet(SheetCommand),
    #[command(subcommand)]
    Stats(StatsCommand),
    /// Run the HTTP API.
    Serve {
        /// Session directory; sessions are kept in memory only when absent.
        #[arg(long)]
        store: Option<PathBuf>,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Listen on all interfaces instead of loopback only.
        #[arg(long)]
        lan: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum SheetCommand {
    /// Check an analysis sheet against a session's inputs.
    Validate {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        sheet: PathBuf,
    },
    /// Units and new word-network edges per phase of a sheet.
    Phases {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        sheet: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum StatsCommand {
    /// Student t-test on two files of numbers.
    Ttest {
        /// First sample (pre scores for --paired).
        a: PathBuf,
        /// Second sample (post scores for --paired).
        b: PathBuf,
        #[arg(long, conflicts_with = "welch")]
        paired: bool,
        #[arg(long)]
        welch: bool,
    },
    /// Category frequencies per class from coded reports.
    Table { reports: PathBuf },
    /// Rubric score means and the unpaired test between two classes.
    Rubric {
        scores: PathBuf,
        /// Class expected to score higher.
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Pre/post questionnaire means and paired tests.
    Likert { responses: PathBuf },
}

#[derive(Debug, Clone, Args)]
pub struct Inputs {
    /// Transcript CSV with header `id,agent,text[,group]`.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Target word list, one per line.
    #[arg(long)]
    pub words: PathBuf,
    #[arg(long, default_value = "normalized-token")]
    pub mode: MatchMode,
    #[arg(long)]
    pub no_case_fold: bool,
    /// Skip NFKC normalization.
    #[arg(long)]
    pub no_nfkc: bool,
}

impl Inputs {
    pub fn policy(&self) -> MatchPolicy {
        MatchPolicy {
            mode: self.mode,
            case_fold: !self.no_case_fold,
            unicode_normalize: !self.no_nfkc,
        }
    }

    pub fn load(&self) -> Result<Analysis, CliError> {
        let corpus = read(&self.corpus)?;
        let words = read(&self.words)?;
        Analysis::from_bytes(&corpus, &words, self.policy()).map_err(|e| CliError::Api(e.into()))
    }
}

#[derive(Debug)]
pub enum CliError {
    Io(PathBuf, std::io::Error),
    Input(String),
    Api(ApiError),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
            CliError::Input(msg) => f.write_str(msg),
            CliError::Api(e) => write!(f, "{}", e.body.message),
        }
    }
}

impl From<ApiError> for CliError {
    fn from(e: ApiError) -> Self {
        CliError::Api(e)
    }
}

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// The command ran but what it checked is invalid.
    Invalid,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Ok => 0,
            Outcome::Invalid => 2,
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Io(path.to_owned(), e))
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    out.write_all(&ops::json_bytes(value))
        .map_err(|e| CliError::Io(PathBuf::from("<stdout>"), e))
}

/// Numbers separated by whitespace or commas; `#` starts a comment.
pub fn parse_numbers(text: &str) -> Result<Vec<f64>, String> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for field in line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
        {
            let v: f64 = field
                .parse()
                .map_err(|_| format!("line {}: `{field}` is not a number", i + 1))?;
            values.push(v);
        }
    }
    Ok(values)
}

fn numbers(path: &Path) -> Result<Vec<f64>, CliError> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::Input(format!("{}: not UTF-8", path.display())))?;
    parse_numbers(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[derive(Debug, Serialize)]
struct BuildSummary {
    units: usize,
    words: usize,
    agents: usize,
    incidences: usize,
    warnings: Vec<discourse_core::corpus::LoadWarning>,
}

#[derive(Debug, Serialize)]
struct RubricReport {
    a: String,
    b: String,
    n_a: usize,
    n_b: usize,
    mean_a: f64,
    mean_b: f64,
    test: TTestWire,
}

#[derive(Debug, Serialize)]
struct LikertReport {
    question: Question,
    n: usize,
    pre_mean: f64,
    post_mean: f64,
    test: TTestWire,
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Build(inputs) => {
            let a = inputs.load()?;
            emit(
                out,
                &BuildSummary {
                    units: a.corpus.len(),
                    words: a.vocabulary.len(),
                    agents: a.corpus.agents().len(),
                    incidences: a.matrix.incidence_count(),
                    warnings: a.corpus.warnings().to_vec(),
                },
            )?;
        }
        Command::Networks { inputs, step } => {
            let a = inputs.load()?;
            emit(out, &ops::networks(&a, step)?)?;
        }
        Command::Series {
            inputs,
            kind,
            metric,
        } => {
            let a = inputs.load()?;
            let series = ops::series(&a, ops::parse_kind(&kind)?, ops::parse_metric(&metric)?);
            emit(out, &series)?;
        }
        Command::Export {
            inputs,
            format,
            kind,
            step,
            metric,
            out: path,
        } => {
            let a = inputs.load()?;
            let params = ExportParams {
                format: Some(format),
                kind,
                step,
                metric,
            };
            let bundle = ops::export(&a, &params)?;
            match path {
                Some(p) => fs::write(&p, &bundle.payload).map_err(|e| CliError::Io(p, e))?,
                None => out
                    .write_all(&bundle.payload)
                    .map_err(|e| CliError::Io(PathBuf::from("<stdout>"), e))?,
            }
        }
        Command::Sheet(SheetCommand::Validate { inputs, sheet }) => {
            let a = inputs.load()?;
            let sheet = AnalysisSheet::from_json(&read(&sheet)?).map_err(ApiError::from)?;
            let report = discourse_core::sheet::validate_sheet(
                &sheet,
                &SheetContext::new(&a.corpus, &a.vocabulary),
            );
            emit(out, &ReportWire::from(&report))?;
            if !report.is_valid() {
                return Ok(Outcome::Invalid);
            }
        }
        Command::Sheet(SheetCommand::Phases { inputs, sheet }) => {
            let a = inputs.load()?;
            let sheet = AnalysisSheet::from_json(&read(&sheet)?).map_err(ApiError::from)?;
            emit(
                out,
                &phase_summary(&sheet, &a.bipartite).map_err(ApiError::from)?,
            )?;
        }
        Command::Stats(StatsCommand::Ttest {
            a,
            b,
            paired,
            welch,
        }) => {
            let kind = if paired {
                TestKind::Paired
            } else if welch {
                TestKind::Welch
            } else {
                TestKind::Unpaired
            };
            let req = TTestRequest {
                a: numbers(&a)?,
                b: numbers(&b)?,
                kind,
            };
            emit(out, &ops::ttest(&req)?)?;
        }
        Command::Stats(StatsCommand::Table { reports }) => {
            let reports = load_coded_reports(&read(&reports)?).map_err(ApiError::from)?;
            emit(out, &frequency_table(&reports))?;
        }
        Command::Stats(StatsCommand::Rubric { scores, a, b }) => {
            let scores = load_rubric_scores(&read(&scores)?).map_err(ApiError::from)?;
            let by_class = scores_by_class(&scores);
            let sample = |class: &str| {
                by_class
                    .get(class)
                    .ok_or_else(|| CliError::Input(format!("no scores for class `{class}`")))
            };
            let (xa, xb) = (sample(&a)?, sample(&b)?);
            let test = unpaired_t(xa, xb).map_err(ApiError::from)?;
            emit(
                out,
                &RubricReport {
                    n_a: xa.len(),
                    n_b: xb.len(),
                    mean_a: mean_score(xa).map_err(ApiError::from)?,
                    mean_b: mean_score(xb).map_err(ApiError::from)?,
                    a,
                    b,
                    test: TTestWire::from(&test),
                },
            )?;
        }
        Command::Stats(StatsCommand::Likert { responses }) => {
            let responses = load_likert(&read(&responses)?).map_err(ApiError::from)?;
            let mut reports = Vec::new();
            for q in [Question::GeneralLearning, Question::CollaborativeLearning] {
                if !responses.iter().any(|r| r.question == q) {
                    continue;
                }
                let s = likert_summary(&responses, q).map_err(ApiError::from)?;
                reports.push(LikertReport {
                    question: q,
                    n: s.n,
                    pre_mean: s.pre_mean,
                    post_mean: s.post_mean,
                    test: TTestWire::from(&s.test),
                });
            }
            emit(out, &reports)?;
        }
        Command::Serve { store, port, lan } => {
            let store = match store {
                Some(dir) => SessionStore::open(&dir).map_err(|e| CliError::Io(dir, e))?,
                None => SessionStore::in_memory(),
            };
            let ip = if lan {
                IpAddr::V4(Ipv4Addr::UNSPECIFIED)
            } else {
                IpAddr::V4(Ipv4Addr::LOCALHOST)
            };
            let addr = SocketAddr::new(ip, port);
            let runtime = tokio::runtime::Runtime::new()
                .map_err(|e| CliError::Io(PathBuf::from("<runtime>"), e))?;
            eprintln!("listening on http://{addr}");
            runtime
                .block_on(crate::api::serve(Arc::new(store), addr))
                .map_err(|e| CliError::Io(PathBuf::from(addr.to_string()), e))?;
        }
    }
    Ok(Outcome::Ok)
}
