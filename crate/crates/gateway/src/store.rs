//! Sessions and their on-disk persistence.
//!
//! A persistent store keeps one folder per session holding the uploaded
//! inputs exactly as received, the match policy, the current sheet and the
//! coded report records. Graphs are rebuilt from the inputs on load.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use discourse_core::codebook::{coded_reports_csv, load_coded_reports, CodedReport};
use discourse_core::corpus::LoadWarning;
use discourse_core::sheet::{
    new_sheet, validate_sheet, AnalysisSheet, SheetContext, ValidationReport,
};
use discourse_core::{Analysis, MatchPolicy};

use crate::error::ApiError;

const META: &str = "session.json";
const CORPUS: &str = "corpus.csv";
const WORDS: &str = "words.txt";
const SHEET: &str = "sheet.json";
const RECORDS: &str = "records.csv";

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    session_id: String,
    created_at: u64,
    policy: MatchPolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub session_id: String,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
    pub units: usize,
    pub words: usize,
    pub agents: usize,
    pub warnings: Vec<LoadWarning>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitView {
    pub unit_id: u64,
    pub agent: String,
    pub text: String,
    /// Indices into `words` matched in this unit.
    pub words: Vec<usize>,
}

/// Everything a client needs to display a session besides the graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionInfo {
    pub session_id: String,
    pub created_at: u64,
    pub policy: MatchPolicy,
    pub words: Vec<String>,
    pub agents: Vec<String>,
    pub units: Vec<UnitView>,
    pub warnings: Vec<LoadWarning>,
}

pub struct Session {
    pub id: String,
    pub created_at: u64,
    pub analysis: Analysis,
    context: SheetContext,
    sheet: Mutex<AnalysisSheet>,
    records: Mutex<Vec<CodedReport>>,
    dir: Option<PathBuf>,
}

// write-then-rename so a crash never leaves a half-written file
fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(tmp, path)
}

impl Session {
    fn new(
        id: String,
        created_at: u64,
        analysis: Analysis,
        dir: Option<PathBuf>,
    ) -> Result<Self, ApiError> {
        let sheet = new_sheet(&analysis.corpus, &analysis.vocabulary)?;
        Ok(Session {
            id,
            created_at,
            context: SheetContext::new(&analysis.corpus, &analysis.vocabulary),
            analysis,
            sheet: Mutex::new(sheet),
            records: Mutex::new(Vec::new()),
            dir,
        })
    }

    pub fn summary(&self) -> SessionSummary {
        let a = &self.analysis;
        SessionSummary {
            session_id: self.id.clone(),
            created_at: self.created_at,
            units: a.corpus.len(),
            words: a.vocabulary.len(),
            agents: a.corpus.agents().len(),
            warnings: a.corpus.warnings().to_vec(),
        }
    }

    pub fn info(&self) -> SessionInfo {
        let a = &self.analysis;
        SessionInfo {
            session_id: self.id.clone(),
            created_at: self.created_at,
            policy: a.policy,
            words: a.vocabulary.words().to_vec(),
            agents: a.corpus.agents().to_vec(),
            units: a
                .corpus
                .units()
                .iter()
                .enumerate()
                .map(|(i, u)| UnitView {
                    unit_id: u.unit_id,
                    agent: u.agent.clone(),
                    text: u.text.clone(),
                    words: a.bipartite.words_of(i).to_vec(),
                })
                .collect(),
            warnings: a.corpus.warnings().to_vec(),
        }
    }

    pub fn sheet(&self) -> AnalysisSheet {
        self.sheet.lock().expect("sheet lock").clone()
    }

    pub fn validate(&self, sheet: &AnalysisSheet) -> ValidationReport {
        validate_sheet(sheet, &self.context)
    }

    /// Stores `sheet` whether or not it is complete and returns its
    /// validation report.
    pub fn put_sheet(&self, sheet: AnalysisSheet) -> Result<ValidationReport, ApiError> {
        let report = self.validate(&sheet);
        let mut current = self.sheet.lock().expect("sheet lock");
        if let Some(dir) = &self.dir {
            write_atomic(&dir.join(SHEET), sheet.to_json().as_bytes())?;
        }
        *current = sheet;
        Ok(report)
    }

    pub fn records(&self) -> Vec<CodedReport> {
        self.records.lock().expect("records lock").clone()
    }

    /// Appends coded reports and returns the new total.
    pub fn add_records(&self, new: Vec<CodedReport>) -> Result<usize, ApiError> {
        let mut records = self.records.lock().expect("records lock");
        let mut next = records.clone();
        next.extend(new);
        if let Some(dir) = &self.dir {
            write_atomic(&dir.join(RECORDS), coded_reports_csv(&next).as_bytes())?;
        }
        *records = next;
        Ok(records.len())
    }
}

#[derive(Default)]
pub struct SessionStore {
    root: Option<PathBuf>,
    sessions: RwLock<BTreeMap<String, Arc<Session>>>,
}

fn invalid(dir: &Path, what: impl std::fmt::Display) -> io::Error {
    io::Error::new(
        io::ErrorKind::InvalidData,
        format!("{}: {what}", dir.display()),
    )
}

impl SessionStore {
    /// A store that forgets everything on exit.
    pub fn in_memory() -> Self {
        SessionStore::default()
    }

    /// Opens (creating if needed) a store directory and reloads every
    /// session found in it.
    pub fn open(root: impl Into<PathBuf>) -> io::Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        let mut sessions = BTreeMap::new();
        for entry in fs::read_dir(&root)? {
            let dir = entry?.path();
            if dir.join(META).is_file() {
                let session = Self::load(&dir)?;
                sessions.insert(session.id.clone(), Arc::new(session));
            }
        }
        Ok(SessionStore {
            root: Some(root),
            sessions: RwLock::new(sessions),
        })
    }

    fn load(dir: &Path) -> io::Result<Session> {
        let meta: Meta =
            serde_json::from_slice(&fs::read(dir.join(META))?).map_err(|e| invalid(dir, e))?;
        let analysis = Analysis::from_bytes(
            &fs::read(dir.join(CORPUS))?,
            &fs::read(dir.join(WORDS))?,
            meta.policy,
        )
        .map_err(|e| invalid(dir, e))?;
        let session = Session::new(
            meta.session_id,
            meta.created_at,
            analysis,
            Some(dir.to_owned()),
        )
        .map_err(|e| invalid(dir, e))?;
        let sheet_path = dir.join(SHEET);
        if sheet_path.is_file() {
            let sheet =
                AnalysisSheet::from_json(&fs::read(&sheet_path)?).map_err(|e| invalid(dir, e))?;
            *session.sheet.lock().expect("sheet lock") = sheet;
        }
        let records_path = dir.join(RECORDS);
        if records_path.is_file() {
            let records =
                load_coded_reports(&fs::read(&records_path)?).map_err(|e| invalid(dir, e))?;
            *session.records.lock().expect("records lock") = records;
        }
        Ok(session)
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    /// Parses both inputs, builds the graphs and registers a new session.
    pub fn create(
        &self,
        corpus: &[u8],
        words: &[u8],
        policy: MatchPolicy,
    ) -> Result<Arc<Session>, ApiError> {
        let analysis = Analysis::from_bytes(corpus, words, policy)?;
        let id = uuid::Uuid::new_v4().simple().to_string();
        let created_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        let dir = match &self.root {
            Some(root) => {
                let dir = root.join(&id);
                fs::create_dir(&dir)?;
                fs::write(dir.join(CORPUS), corpus)?;
                fs::write(dir.join(WORDS), words)?;
                let meta = Meta {
                    session_id: id.clone(),
                    created_at,
                    policy,
                };
                write_atomic(
                    &dir.join(META),
                    &serde_json::to_vec_pretty(&meta).expect("meta serializes"),
                )?;
                Some(dir)
            }
            None => None,
        };
        let session = Arc::new(Session::new(id.clone(), created_at, analysis, dir)?);
        self.sessions
            .write()
            .expect("session map lock")
            .insert(id, Arc::clone(&session));
        Ok(session)
    }

    pub fn get(&self, id: &str) -> Result<Arc<Session>, ApiError> {
        self.sessions
            .read()
            .expect("session map lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::unknown_session(id))
    }

    pub fn list(&self) -> Vec<SessionSummary> {
        self.sessions
            .read()
            .expect("session map lock")
            .values()
            .map(|s| s.summary())
            .collect()
    }
}
