//! Eigenpair export: a JSON index of `{lambda_T, theta_branch, vector_ref}`
//! records next to a sidecar of little-endian `f64`, one eigenvector per row.

use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use treewave_core::{EigenPair, SpectralPoint};

use crate::json;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRecord {
    #[serde(rename = "lambda_T")]
    pub lambda_t: f64,
    pub theta_branch: SpectralPoint,
    pub vector_ref: VectorRef,
}

/// Row `row` of the sidecar, `len` doubles long.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorRef {
    pub file: String,
    pub row: usize,
    pub len: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum EigenIoError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("sidecar {file}: expected at least {expected} bytes, found {found}")]
    Truncated {
        file: String,
        expected: usize,
        found: usize,
    },
    #[error("eigenvectors have differing lengths")]
    Ragged,
}

pub fn sidecar_path(index: &Path) -> PathBuf {
    index.with_extension("bin")
}

/// Writes `index` and its sidecar, returning the sidecar path.
pub fn write(pairs: &[EigenPair], index: &Path) -> Result<PathBuf, EigenIoError> {
    let n = pairs.first().map_or(0, |p| p.vector.len());
    if pairs.iter().any(|p| p.vector.len() != n) {
        return Err(EigenIoError::Ragged);
    }
    let sidecar = sidecar_path(index);
    let file_name = sidecar
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut bin = BufWriter::new(File::create(&sidecar)?);
    for pair in pairs {
        for x in &pair.vector {
            bin.write_all(&x.to_le_bytes())?;
        }
    }
    bin.flush()?;

    let records: Vec<EigenRecord> = pairs
        .iter()
        .enumerate()
        .map(|(row, p)| EigenRecord {
            lambda_t: p.lambda_t,
            theta_branch: p.spectral,
            vector_ref: VectorRef {
                file: file_name.clone(),
                row,
                len: n,
            },
        })
        .collect();
    fs::write(index, json::to_string(&records)?)?;
    Ok(sidecar)
}

/// Reads an index written by [`write`]; sidecar paths resolve relative to
/// the index.
pub fn read(index: &Path) -> Result<Vec<EigenPair>, EigenIoError> {
    let records: Vec<EigenRecord> = serde_json::from_str(&fs::read_to_string(index)?)?;
    let dir = index.parent().unwrap_or(Path::new("."));
    let mut cache: Option<(String, Vec<u8>)> = None;
    records
        .into_iter()
        .map(|r| {
            let VectorRef { file, row, len } = r.vector_ref;
            if cache.as_ref().is_none_or(|(name, _)| *name != file) {
                let mut bytes = Vec::new();
                File::open(dir.join(&file))?.read_to_end(&mut bytes)?;
                cache = Some((file.clone(), bytes));
            }
            let bytes = &cache.as_ref().expect("filled above").1;
            let (start, end) = (row * len * 8, (row + 1) * len * 8);
            if bytes.len() < end {
                return Err(EigenIoError::Truncated {
                    file,
                    expected: end,
                    found: bytes.len(),
                });
            }
            let vector = bytes[start..end]
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
                .collect();
            Ok(EigenPair {
                lambda_t: r.lambda_t,
                vector,
                spectral: r.theta_branch,
            })
        })
        .collect()
}
