//! FMX: a flat little-endian feature-matrix container.
//!
//! ```text
//! 0..4    magic "FMX1"
//! 4..8    u32 LE n_rows
//! 8..12   u32 LE n_cols
//! 12      dtype (0 = f32 LE)
//! 13..20  reserved, zero
//! 20..    n_rows * n_cols f32 LE, row-major
//! ```

use std::path::Path;

use super::io::write_atomic;
use super::FeatureMatrix;
use crate::error::{Error, FormatError, Result};

pub const FMX_MAGIC: [u8; 4] = *b"FMX1";
pub const FMX_HEADER_LEN: usize = 20;
const DTYPE_F32: u8 = 0;

pub fn encode_fmx(matrix: &FeatureMatrix) -> Result<Vec<u8>> {
    let rows = u32::try_from(matrix.n_rows()).map_err(|_| Error::invalid("too many rows for FMX"))?;
    let cols = u32::try_from(matrix.n_cols()).map_err(|_| Error::invalid("too many columns for FMX"))?;
    let mut out = Vec::with_capacity(FMX_HEADER_LEN + 4 * matrix.values().len());
    out.extend_from_slice(&FMX_MAGIC);
    out.extend_from_slice(&rows.to_le_bytes());
    out.extend_from_slice(&cols.to_le_bytes());
    out.push(DTYPE_F32);
    out.extend_from_slice(&[0u8; 7]);
    for v in matrix.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_fmx(bytes: &[u8]) -> Result<FeatureMatrix, FormatError> {
    if bytes.len() < FMX_HEADER_LEN {
        // a short file with the wrong magic is still a magic error
        if bytes.len() >= 4 && bytes[..4] != FMX_MAGIC {
            return Err(FormatError::BadMagic { expected: FMX_MAGIC, found: bytes[..4].try_into().unwrap() });
        }
        return Err(FormatError::Truncated { expected: FMX_HEADER_LEN, found: bytes.len() });
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if magic != FMX_MAGIC {
        return Err(FormatError::BadMagic { expected: FMX_MAGIC, found: magic });
    }
    let n_rows = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let n_cols = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    if bytes[12] != DTYPE_F32 {
        return Err(FormatError::UnsupportedDtype(bytes[12]));
    }
    if bytes[13..FMX_HEADER_LEN].iter().any(|&b| b != 0) {
        return Err(FormatError::ReservedNonZero);
    }
    let payload = &bytes[FMX_HEADER_LEN..];
    let expected = n_rows.saturating_mul(n_cols).saturating_mul(4);
    if payload.len() < expected {
        return Err(FormatError::Truncated { expected: FMX_HEADER_LEN + expected, found: bytes.len() });
    }
    if payload.len() > expected {
        return Err(FormatError::TrailingBytes { extra: payload.len() - expected });
    }
    let mut values = Vec::with_capacity(n_rows * n_cols);
    for (index, chunk) in payload.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().unwrap());
        if !v.is_finite() {
            return Err(FormatError::NonFinite { index });
        }
        values.push(v);
    }
    Ok(FeatureMatrix::from_parts_unchecked(n_rows, n_cols, values))
}

pub fn read_fmx(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_fmx(&bytes).map_err(|source| Error::Format { path: path.to_path_buf(), source })
}

/// Writes the matrix through a temporary file that is renamed into place.
pub fn write_fmx(matrix: &FeatureMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &encode_fmx(matrix)?)
}
