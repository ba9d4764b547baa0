//! On-disk corpus layout.
//!
//! ```text
//! corpus/
//!   manifest.json
//!   transcripts/<id>.jsonl
//!   annotations/<id>.jsonl
//!   instances/<id>.jsonl
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{parse_transcript, CorpusError, LocativeInstance, Transcript};
use crate::commonground::{parse_annotations, validate_against, AnnotationEvent};
use crate::engine::GameConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub seed: u64,
    pub transcript: String,
    pub annotations: String,
    pub instances: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub master_seed: u64,
    pub config: GameConfig,
    pub policy: serde_json::Value,
    pub games: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusGame {
    pub transcript: Transcript,
    pub annotations: Vec<AnnotationEvent>,
    pub instances: Vec<LocativeInstance>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io { path: path.display().to_string(), source }
}

fn file_err(path: &Path, err: impl std::fmt::Display) -> CorpusError {
    CorpusError::File { path: path.display().to_string(), message: err.to_string() }
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CorpusError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| serde_json::from_str(line).map_err(|e| file_err(path, format!("line {}: {e}", i + 1))))
        .collect()
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), CorpusError> {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).map_err(|e| file_err(path, e))?);
        out.push('\n');
    }
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    fs::write(path, out).map_err(io_err(path))
}

fn read_transcript(path: &Path) -> Result<Transcript, CorpusError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parse_transcript(&id, &text).map_err(|e| file_err(path, e))
}

/// Every `*.jsonl` transcript in `dir`, sorted by file name.
pub fn load_transcripts_dir(dir: &Path) -> Result<Vec<Transcript>, CorpusError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "jsonl"))
        .collect();
    paths.sort();
    paths.iter().map(|p| read_transcript(p)).collect()
}

/// Loads every game listed in `dir/manifest.json`, validating annotations against
/// their transcripts.
pub fn load_corpus(dir: &Path) -> Result<(Manifest, Vec<CorpusGame>), CorpusError> {
    let manifest_path = dir.join("manifest.json");
    let text = fs::read_to_string(&manifest_path).map_err(io_err(&manifest_path))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| file_err(&manifest_path, e))?;
    let mut games = Vec::with_capacity(manifest.games.len());
    for entry in &manifest.games {
        let transcript = read_transcript(&dir.join(&entry.transcript))?;
        let ann_path = dir.join(&entry.annotations);
        let ann_text = fs::read_to_string(&ann_path).map_err(io_err(&ann_path))?;
        let annotations = parse_annotations(&ann_text).map_err(|e| file_err(&ann_path, e))?;
        validate_against(&annotations, &transcript).map_err(|e| file_err(&ann_path, e))?;
        let instances = read_jsonl(&dir.join(&entry.instances))?;
        games.push(CorpusGame { transcript, annotations, instances });
    }
    Ok((manifest, games))
}
