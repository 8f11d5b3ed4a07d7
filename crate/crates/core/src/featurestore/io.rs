use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};

use super::{FeatureOrigin, LabelVector};
use crate::error::{Error, Result};

/// Writes `bytes` to a sibling temporary file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::invalid(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let write = || -> std::io::Result<()> {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

fn parse_lines<T: std::str::FromStr>(text: &str, what: &str, path: &Path) -> Result<Vec<T>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            l.trim().parse::<T>().map_err(|_| {
                Error::invalid(format!("{}:{}: expected {what}, got {:?}", path.display(), n + 1, l.trim()))
            })
        })
        .collect()
}

/// Reads a labels file (one non-negative integer per line). Class names come
/// from `class_names` when given, otherwise they are generated per id.
pub fn read_labels(path: impl AsRef<Path>, class_names: Option<&BTreeMap<u32, String>>) -> Result<LabelVector> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let ids: Vec<u32> = parse_lines(&text, "a class id", path)?;
    match class_names {
        Some(names) => LabelVector::new(ids, names.clone()),
        None => Ok(LabelVector::from_ids(ids)),
    }
}

pub fn write_labels(labels: &LabelVector, path: impl AsRef<Path>) -> Result<()> {
    write_indices_like(labels.labels().iter(), path.as_ref())
}

pub fn read_indices(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_lines(&text, "an index", path)
}

pub fn write_indices(indices: &[usize], path: impl AsRef<Path>) -> Result<()> {
    write_indices_like(indices.iter(), path.as_ref())
}

fn write_indices_like<T: std::fmt::Display>(items: impl Iterator<Item = T>, path: &Path) -> Result<()> {
    let mut text = String::new();
    for i in items {
        text.push_str(&i.to_string());
        text.push('\n');
    }
    write_atomic(path, text.as_bytes())
}

/// Dataset manifest written next to an FMX file by the feature extractor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub dataset_name: String,
    #[serde(deserialize_with = "class_names_any")]
    pub class_names: BTreeMap<u32, String>,
    #[serde(default)]
    pub backbone: Option<String>,
    #[serde(default)]
    pub layer: Option<String>,
    #[serde(default)]
    pub image_ids: Vec<String>,
}

impl Manifest {
    pub fn origin(&self) -> Option<FeatureOrigin> {
        match (&self.backbone, &self.layer) {
            (Some(b), Some(l)) => Some(FeatureOrigin { backbone: b.clone(), layer: l.clone() }),
            _ => None,
        }
    }
}

// `class_names` may be a list indexed by id or an object keyed by id.
fn class_names_any<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<u32, String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Names {
        List(Vec<String>),
        Map(BTreeMap<String, String>),
    }
    match Names::deserialize(d)? {
        Names::List(v) => Ok(v.into_iter().enumerate().map(|(i, n)| (i as u32, n)).collect()),
        Names::Map(m) => m
            .into_iter()
            .map(|(k, v)| {
                k.parse::<u32>()
                    .map(|k| (k, v))
                    .map_err(|_| serde::de::Error::custom(format!("class id {k:?} is not an integer")))
            })
            .collect(),
    }
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path: path.to_path_buf(), source })
}
