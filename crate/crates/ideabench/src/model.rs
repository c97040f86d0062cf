//! Domain types shared by all modules, plus pool persistence in a
//! line-oriented JSONL interchange format.
//!
//! A pool file is UTF-8 with LF line endings. Line 1 is a header record
//! (strategy id, creation time, provenance map, exclusion flag); every
//! following line is one idea record. Files round-trip losslessly.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("persistence failure: {0}")]
    Persistence(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("integrity violation: {0}")]
    Integrity(String),
    #[error("bad pool file: {0}")]
    Format(String),
}

/// One generated idea: a short name plus a body description, with its
/// position inside the strategy/session that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Idea {
    pub id: String,
    pub name: String,
    pub description: String,
    /// The verbatim paragraph the idea was parsed from.
    pub raw_text: String,
    pub strategy_id: String,
    pub session_index: usize,
    /// Position within the session's output order.
    pub idea_index: usize,
}

impl Idea {
    /// Canonical id for an idea at a given position. Content-independent,
    /// so re-embedding or re-analysis never changes identity.
    pub fn position_id(strategy_id: &str, session_index: usize, idea_index: usize) -> String {
        format!("{strategy_id}-s{session_index:03}-i{idea_index:04}")
    }
}

/// Generation sampling parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub temperature: f64,
    pub top_p: f64,
    pub model_name: String,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            temperature: 0.7,
            top_p: 1.0,
            model_name: "gpt-4-0314".to_string(),
        }
    }
}

/// An ordered collection of ideas from one strategy. Idea order is
/// generation order; the exhaustion analysis depends on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pool {
    pub strategy_id: String,
    pub ideas: Vec<Idea>,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
    /// Free-form run metadata: model name, parameters, notes.
    pub provenance: BTreeMap<String, String>,
    /// Manual exclusion flag; excluded pools are skipped by aggregate
    /// statistics. Set by an operator, never inferred.
    #[serde(default)]
    pub excluded: bool,
}

impl Pool {
    pub fn new(strategy_id: impl Into<String>, created_at: u64) -> Self {
        Self {
            strategy_id: strategy_id.into(),
            ideas: Vec::new(),
            created_at,
            provenance: BTreeMap::new(),
            excluded: false,
        }
    }

    pub fn len(&self) -> usize {
        self.ideas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideas.is_empty()
    }

    /// Checks the pool invariants: unique ids and unique
    /// (strategy, session, index) triples, non-empty names and raw text.
    pub fn validate(&self) -> Result<(), ModelError> {
        let mut ids = std::collections::HashSet::new();
        let mut positions = std::collections::HashSet::new();
        for idea in &self.ideas {
            if !ids.insert(idea.id.as_str()) {
                return Err(ModelError::Integrity(format!("duplicate idea id {}", idea.id)));
            }
            let pos = (idea.strategy_id.as_str(), idea.session_index, idea.idea_index);
            if !positions.insert(pos) {
                return Err(ModelError::Integrity(format!(
                    "duplicate position {}/{}/{}",
                    pos.0, pos.1, pos.2
                )));
            }
            if idea.raw_text.is_empty() {
                return Err(ModelError::Integrity(format!("idea {} has empty raw text", idea.id)));
            }
            if idea.name.is_empty() {
                return Err(ModelError::Integrity(format!("idea {} has empty name", idea.id)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct PoolHeader {
    strategy_id: String,
    created_at: u64,
    provenance: BTreeMap<String, String>,
    excluded: bool,
}

/// Writes one header line and one idea record per line, preserving order.
/// The write is atomic: a temp file in the target directory is renamed
/// into place.
pub fn save_pool(pool: &Pool, path: &Path) -> Result<(), ModelError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        let header = PoolHeader {
            strategy_id: pool.strategy_id.clone(),
            created_at: pool.created_at,
            provenance: pool.provenance.clone(),
            excluded: pool.excluded,
        };
        serde_json::to_writer(&mut w, &header).map_err(io_from_json)?;
        w.write_all(b"\n")?;
        for idea in &pool.ideas {
            serde_json::to_writer(&mut w, idea).map_err(io_from_json)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
    }
    tmp.persist(path).map_err(|e| ModelError::Persistence(e.error))?;
    Ok(())
}

/// Reads a pool file written by [`save_pool`]. Idea order equals file order.
pub fn load_pool(path: &Path) -> Result<Pool, ModelError> {
    let file = File::open(path)?;
    let mut lines = BufReader::new(file).lines();

    let header_line = match lines.next() {
        Some(line) => line?,
        None => return Err(ModelError::Format("empty file, header required".to_string())),
    };
    let header: PoolHeader = serde_json::from_str(&header_line).map_err(|e| ModelError::Parse {
        line: 1,
        message: format!("bad header: {e}"),
    })?;

    let mut pool = Pool {
        strategy_id: header.strategy_id,
        ideas: Vec::new(),
        created_at: header.created_at,
        provenance: header.provenance,
        excluded: header.excluded,
    };
    for (offset, line) in lines.enumerate() {
        let line_no = offset + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let idea: Idea = serde_json::from_str(&line).map_err(|e| ModelError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        pool.ideas.push(idea);
    }
    pool.validate()?;
    Ok(pool)
}

fn io_from_json(e: serde_json::Error) -> ModelError {
    ModelError::Persistence(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_idea(strategy: &str, session: usize, index: usize) -> Idea {
        Idea {
            id: Idea::position_id(strategy, session, index),
            name: format!("Idea {index}"),
            description: format!("Description of idea {index}."),
            raw_text: format!("Idea {index}: Description of idea {index}."),
            strategy_id: strategy.to_string(),
            session_index: session,
            idea_index: index,
        }
    }

    fn sample_pool(n: usize) -> Pool {
        let mut pool = Pool::new("base_prompt", 1_700_000_000);
        pool.provenance.insert("model".to_string(), "gpt-4-0314".to_string());
        pool.provenance.insert("temperature".to_string(), "0.7".to_string());
        for i in 0..n {
            pool.ideas.push(sample_idea("base_prompt", 0, i));
        }
        pool
    }

    #[test]
    fn empty_pool_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.pool");
        save_pool(&sample_pool(0), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 1);
        let loaded = load_pool(&path).unwrap();
        assert!(loaded.ideas.is_empty());
    }

    #[test]
    fn three_ideas_three_lines_in_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("three.pool");
        let pool = sample_pool(3);
        save_pool(&pool, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 4);
        let loaded = load_pool(&path).unwrap();
        let indices: Vec<usize> = loaded.ideas.iter().map(|i| i.idea_index).collect();
        assert_eq!(indices, vec![0, 1, 2]);
    }

    #[test]
    fn round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hundred.pool");
        let mut pool = sample_pool(100);
        pool.excluded = true;
        save_pool(&pool, &path).unwrap();
        let loaded = load_pool(&path).unwrap();
        assert_eq!(loaded, pool);
    }

    #[test]
    fn duplicate_id_is_integrity_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dup.pool");
        let mut pool = sample_pool(2);
        pool.ideas[1].id = pool.ideas[0].id.clone();
        // Bypass save-side validation by writing the lines directly.
        let mut text = serde_json::to_string(&PoolHeader {
            strategy_id: pool.strategy_id.clone(),
            created_at: pool.created_at,
            provenance: pool.provenance.clone(),
            excluded: false,
        })
        .unwrap();
        for idea in &pool.ideas {
            text.push('\n');
            text.push_str(&serde_json::to_string(idea).unwrap());
        }
        std::fs::write(&path, text).unwrap();
        match load_pool(&path) {
            Err(ModelError::Integrity(msg)) => assert!(msg.contains("duplicate idea id")),
            other => panic!("expected integrity error, got {other:?}"),
        }
    }

    #[test]
    fn empty_file_is_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.txt");
        std::fs::write(&path, "").unwrap();
        assert!(matches!(load_pool(&path), Err(ModelError::Format(_))));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.pool");
        let pool = sample_pool(1);
        save_pool(&pool, &path).unwrap();
        let mut text = std::fs::read_to_string(&path).unwrap();
        text.push_str("{not json\n");
        std::fs::write(&path, text).unwrap();
        match load_pool(&path) {
            Err(ModelError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
