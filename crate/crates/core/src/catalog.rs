//! On-disk strategy repository: `strategies/*.roboto` plus an `index.json`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus;
use crate::engine::doc_hash;
use crate::syntax::{has_errors, parse_file, validate, Diagnostic, StrategyDoc};

const INDEX_FILE: &str = "index.json";
const STRATEGY_DIR: &str = "strategies";
const INDEX_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("strategy text does not parse")]
    ParseFailed(Vec<Diagnostic>),
    #[error("strategy text has validation errors")]
    ValidationFailed(Vec<Diagnostic>),
    #[error("no catalog entry `{0}`")]
    NotFound(String),
    #[error("catalog entry `{0}` is built in and cannot be removed")]
    ReadOnly(String),
    #[error("catalog index is corrupt: {0}")]
    CorruptIndex(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CatalogError {
    pub fn code(&self) -> &'static str {
        match self {
            CatalogError::ParseFailed(_) => "ParseFailed",
            CatalogError::ValidationFailed(_) => "ValidationFailed",
            CatalogError::NotFound(_) => "NotFound",
            CatalogError::ReadOnly(_) => "ReadOnly",
            CatalogError::CorruptIndex(_) => "CorruptIndex",
            CatalogError::Io(_) => "Io",
        }
    }

    pub fn diagnostics(&self) -> &[Diagnostic] {
        match self {
            CatalogError::ParseFailed(d) | CatalogError::ValidationFailed(d) => d,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CatalogEntry {
    pub id: String,
    pub name: String,
    /// Relative to the catalog directory.
    pub path: String,
    pub summary: String,
    pub strategy_names: Vec<String>,
    pub content_hash: String,
    pub builtin: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct Index {
    version: u32,
    entries: Vec<CatalogEntry>,
}

#[derive(Debug)]
pub struct Catalog {
    dir: PathBuf,
    entries: RwLock<Vec<CatalogEntry>>,
}

/// Id of a text: a prefix of the SHA-256 of its exact bytes.
pub fn entry_id(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))[..16].to_string()
}

fn check(text: &str, file: &str) -> Result<StrategyDoc, CatalogError> {
    let doc = parse_file(file, text).map_err(CatalogError::ParseFailed)?;
    let diags = validate(&doc);
    if has_errors(&diags) {
        return Err(CatalogError::ValidationFailed(diags));
    }
    Ok(doc)
}

fn summary(doc: &StrategyDoc) -> String {
    doc.strategies[0]
        .leading_comment
        .iter()
        .map(|l| l.trim())
        .take_while(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

impl Catalog {
    /// Opens (creating if needed) the catalog rooted at `dir`. Built-in
    /// strategies are always present.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, CatalogError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(dir.join(STRATEGY_DIR))?;
        let index_path = dir.join(INDEX_FILE);
        let entries = if index_path.exists() {
            let index: Index = serde_json::from_slice(&fs::read(&index_path)?)
                .map_err(|e| CatalogError::CorruptIndex(e.to_string()))?;
            if index.version != INDEX_VERSION {
                return Err(CatalogError::CorruptIndex(format!(
                    "unsupported index version {}",
                    index.version
                )));
            }
            index.entries
        } else {
            Vec::new()
        };
        let catalog = Self {
            dir,
            entries: RwLock::new(entries),
        };
        for (file, text) in corpus::BUILTIN {
            catalog.insert(text, file, true)?;
        }
        Ok(catalog)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Adds a strategy file. Ingesting the same text again returns the
    /// existing entry.
    pub fn ingest(&self, text: &str) -> Result<CatalogEntry, CatalogError> {
        self.insert(text, "<ingest>", false)
    }

    fn insert(&self, text: &str, file: &str, builtin: bool) -> Result<CatalogEntry, CatalogError> {
        let doc = check(text, file)?;
        let id = entry_id(text);
        let mut entries = self.entries.write().expect("catalog lock poisoned");
        if let Some(existing) = entries.iter().find(|e| e.id == id) {
            if self.dir.join(&existing.path).exists() {
                return Ok(existing.clone());
            }
        }
        let name = doc.strategies[0].name.clone();
        let path = format!("{STRATEGY_DIR}/{name}-{id}.roboto");
        fs::write(self.dir.join(&path), text)?;
        let entry = CatalogEntry {
            id: id.clone(),
            name,
            path,
            summary: summary(&doc),
            strategy_names: doc.strategy_names(),
            content_hash: doc_hash(&doc),
            builtin,
        };
        entries.retain(|e| e.id != id);
        entries.push(entry.clone());
        self.write_index(&entries)?;
        tracing::debug!(id = %entry.id, name = %entry.name, "ingested strategy");
        Ok(entry)
    }

    /// All entries ordered by name.
    pub fn list(&self) -> Vec<CatalogEntry> {
        let mut entries = self.entries.read().expect("catalog lock poisoned").clone();
        entries.sort_by(|a, b| a.name.cmp(&b.name).then_with(|| a.id.cmp(&b.id)));
        entries
    }

    pub fn entry(&self, id: &str) -> Result<CatalogEntry, CatalogError> {
        self.entries
            .read()
            .expect("catalog lock poisoned")
            .iter()
            .find(|e| e.id == id)
            .cloned()
            .ok_or_else(|| CatalogError::NotFound(id.to_string()))
    }

    /// The entry and its original text, byte for byte.
    pub fn get(&self, id: &str) -> Result<(CatalogEntry, String), CatalogError> {
        let entry = self.entry(id)?;
        let text = fs::read_to_string(self.dir.join(&entry.path))?;
        Ok((entry, text))
    }

    pub fn load_doc(&self, id: &str) -> Result<(CatalogEntry, StrategyDoc), CatalogError> {
        let (entry, text) = self.get(id)?;
        let doc = check(&text, &entry.path)?;
        Ok((entry, doc))
    }

    pub fn remove(&self, id: &str) -> Result<(), CatalogError> {
        let mut entries = self.entries.write().expect("catalog lock poisoned");
        let pos = entries
            .iter()
            .position(|e| e.id == id)
            .ok_or_else(|| CatalogError::NotFound(id.to_string()))?;
        if entries[pos].builtin {
            return Err(CatalogError::ReadOnly(id.to_string()));
        }
        let entry = entries.remove(pos);
        self.write_index(&entries)?;
        match fs::remove_file(self.dir.join(&entry.path)) {
            Err(e) if e.kind() != io::ErrorKind::NotFound => Err(e.into()),
            _ => Ok(()),
        }
    }

    fn write_index(&self, entries: &[CatalogEntry]) -> Result<(), CatalogError> {
        let index = Index {
            version: INDEX_VERSION,
            entries: entries.to_vec(),
        };
        let tmp = self.dir.join(format!("{INDEX_FILE}.tmp"));
        fs::write(&tmp, serde_json::to_vec_pretty(&index).expect("index serializes"))?;
        fs::rename(tmp, self.dir.join(INDEX_FILE))?;
        Ok(())
    }
}
