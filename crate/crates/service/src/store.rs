//! Durable sessions: one directory per session holding `meta.json` and an
//! append-only `events.jsonl`. State is rebuilt by replaying the log.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex as StdMutex};

use serde::{Deserialize, Serialize};
use tokio::sync::Mutex;

use roboto_core::catalog::Catalog;
use roboto_core::engine::{Event, ExecutionState};

use crate::error::ApiError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionMeta {
    pub session_id: String,
    pub entry_id: String,
    pub created_at_ms: u64,
}

pub struct Session {
    pub meta: SessionMeta,
    pub state: ExecutionState,
    /// Events already on disk.
    persisted: usize,
}

impl Session {
    pub fn updated_at_ms(&self) -> u64 {
        self.state.events().last().map_or(self.meta.created_at_ms, |e| e.timestamp_ms)
    }
}

pub type SessionHandle = Arc<Mutex<Session>>;

pub struct SessionStore {
    dir: PathBuf,
    live: StdMutex<HashMap<String, SessionHandle>>,
}

const META: &str = "meta.json";
const EVENTS: &str = "events.jsonl";

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-')
}

impl SessionStore {
    pub fn open(dir: impl AsRef<Path>) -> io::Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        Ok(Self {
            dir,
            live: StdMutex::new(HashMap::new()),
        })
    }

    fn session_dir(&self, id: &str) -> PathBuf {
        self.dir.join(id)
    }

    /// Persists a freshly started session and registers it.
    pub fn create(&self, meta: SessionMeta, state: ExecutionState) -> Result<SessionHandle, ApiError> {
        let dir = self.session_dir(&meta.session_id);
        fs::create_dir_all(&dir).map_err(io_err)?;
        write_durably(&dir.join(META), &serde_json::to_vec(&meta).expect("meta serializes")).map_err(io_err)?;
        File::create(dir.join(EVENTS)).map_err(io_err)?;
        let mut session = Session {
            meta,
            state,
            persisted: 0,
        };
        self.persist(&mut session)?;
        let id = session.meta.session_id.clone();
        let handle = Arc::new(Mutex::new(session));
        self.live.lock().expect("store lock").insert(id, handle.clone());
        Ok(handle)
    }

    /// The live session, loading and replaying it from disk on first use.
    pub fn get(&self, id: &str, catalog: &Catalog) -> Result<SessionHandle, ApiError> {
        let mut live = self.live.lock().expect("store lock");
        if let Some(handle) = live.get(id) {
            return Ok(handle.clone());
        }
        if !valid_id(id) {
            return Err(ApiError::not_found("session", id));
        }
        let dir = self.session_dir(id);
        let meta_bytes = match fs::read(dir.join(META)) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(ApiError::not_found("session", id)),
            Err(e) => return Err(io_err(e)),
        };
        let meta: SessionMeta =
            serde_json::from_slice(&meta_bytes).map_err(|e| ApiError::internal(format!("session meta: {e}")))?;
        let events = read_events(&dir.join(EVENTS)).map_err(|e| ApiError::internal(format!("event log: {e}")))?;
        let (_, doc) = catalog.load_doc(&meta.entry_id)?;
        let state = ExecutionState::replay(Arc::new(doc), &events)
            .map_err(|e| ApiError::internal(format!("replay of session {id} failed: {e}")))?;
        tracing::info!(session = id, events = events.len(), "session restored from event log");
        let handle = Arc::new(Mutex::new(Session {
            meta,
            state,
            persisted: events.len(),
        }));
        live.insert(id.to_string(), handle.clone());
        Ok(handle)
    }

    /// Appends the session's unpersisted events to its log and syncs it.
    pub fn persist(&self, session: &mut Session) -> Result<(), ApiError> {
        let pending = &session.state.events()[session.persisted..];
        if pending.is_empty() {
            return Ok(());
        }
        let mut buf = Vec::new();
        for event in pending {
            serde_json::to_writer(&mut buf, event).expect("event serializes");
            buf.push(b'\n');
        }
        let path = self.session_dir(&session.meta.session_id).join(EVENTS);
        let mut file = OpenOptions::new().append(true).open(path).map_err(io_err)?;
        file.write_all(&buf).map_err(io_err)?;
        file.sync_data().map_err(io_err)?;
        session.persisted = session.state.events().len();
        Ok(())
    }
}

fn io_err(e: io::Error) -> ApiError {
    ApiError::internal(format!("session store: {e}"))
}

fn write_durably(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut file = File::create(path)?;
    file.write_all(bytes)?;
    file.sync_all()
}

/// Reads an event log, ignoring a torn final line left by a crash during
/// an append.
fn read_events(path: &Path) -> io::Result<Vec<Event>> {
    let reader = BufReader::new(File::open(path)?);
    let lines: Vec<String> = reader.lines().collect::<Result<_, _>>()?;
    let mut events = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(line) {
            Ok(event) => events.push(event),
            Err(_) if i + 1 == lines.len() => break,
            Err(e) => return Err(io::Error::new(io::ErrorKind::InvalidData, e)),
        }
    }
    Ok(events)
}
