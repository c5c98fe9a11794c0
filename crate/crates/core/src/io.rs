//! Dataset files and directories.
//!
//! A dataset file is one JSON object holding the episode spec, the boxes in
//! presentation order and the split tree. A dataset directory holds one
//! `episode_NNNNN.json` per stream and is read back in file-name order.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::datagen::BoxStream;
use crate::error::{PackError, Result};

pub const DATASET_FORMAT_VERSION: u32 = 1;

#[derive(Serialize)]
struct DatasetOut<'a> {
    format_version: u32,
    #[serde(flatten)]
    stream: &'a BoxStream,
}

#[derive(Deserialize)]
struct DatasetIn {
    format_version: u32,
    #[serde(flatten)]
    stream: BoxStream,
}

pub fn dataset_to_json(stream: &BoxStream) -> Result<String> {
    Ok(serde_json::to_string(&DatasetOut { format_version: DATASET_FORMAT_VERSION, stream })?)
}

pub fn dataset_from_json(text: &str) -> Result<BoxStream> {
    let d: DatasetIn = serde_json::from_str(text)?;
    if d.format_version != DATASET_FORMAT_VERSION {
        return Err(PackError::InvalidArgument(format!("unsupported dataset version {}", d.format_version)));
    }
    Ok(d.stream)
}

pub fn write_dataset_dir(dir: &Path, streams: &[BoxStream]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    streams
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let path = dir.join(format!("episode_{k:05}.json"));
            fs::write(&path, dataset_to_json(s)?)?;
            Ok(path)
        })
        .collect()
}

pub fn read_dataset_dir(dir: &Path) -> Result<Vec<BoxStream>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(PackError::InvalidArgument(format!("no dataset files in {}", dir.display())));
    }
    paths.iter().map(|p| dataset_from_json(&fs::read_to_string(p)?)).collect()
}
