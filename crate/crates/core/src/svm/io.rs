//! SVM1 model container, all little-endian:
//!
//! ```text
//! "SVM1"  u32 version (=1)
//! f64 C   f64 gamma   f64 bias
//! u32 negative class id   u32 positive class id
//! u32 n_features
//! u8 has_standardizer  [n_features f64 mean, n_features f64 std]
//! u32 n_support
//! n_support f64 dual coefficients (alpha_i * y_i)
//! n_support * n_features f32 support vectors, row-major
//! ```

use std::path::Path;

use super::{LabelMap, SvmHyperparams, SvmModel, TrainStats};
use crate::error::{Error, FormatError, Result};
use crate::featurestore::{write_atomic, FeatureMatrix, StandardizationParams};

pub const SVM_MAGIC: [u8; 4] = *b"SVM1";
const VERSION: u32 = 1;

pub fn encode_svm(model: &SvmModel) -> Result<Vec<u8>> {
    let d = model.n_features();
    let to_u32 = |v: usize, what: &str| u32::try_from(v).map_err(|_| Error::invalid(format!("{what} too large for SVM1")));
    let mut out = Vec::new();
    out.extend_from_slice(&SVM_MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for v in [model.hyperparams.c, model.hyperparams.gamma, model.bias] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&model.label_map.negative.to_le_bytes());
    out.extend_from_slice(&model.label_map.positive.to_le_bytes());
    out.extend_from_slice(&to_u32(d, "feature count")?.to_le_bytes());
    match &model.standardizer {
        Some(s) => {
            if s.n_features() != d {
                return Err(Error::invalid("standardizer width does not match the support vectors"));
            }
            out.push(1);
            for v in s.mean.iter().chain(&s.std) {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        None => out.push(0),
    }
    out.extend_from_slice(&to_u32(model.n_support(), "support count")?.to_le_bytes());
    for c in &model.dual_coefs {
        out.extend_from_slice(&c.to_le_bytes());
    }
    for v in model.support_rows.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or(FormatError::Truncated {
            expected: self.pos.saturating_add(n),
            found: self.bytes.len(),
        })?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8, FormatError> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64, FormatError> {
        let v = f64::from_le_bytes(self.take(8)?.try_into().unwrap());
        if !v.is_finite() {
            return Err(FormatError::NonFinite { index: self.pos / 8 });
        }
        Ok(v)
    }
    fn f64s(&mut self, n: usize) -> Result<Vec<f64>, FormatError> {
        (0..n).map(|_| self.f64()).collect()
    }
}

pub fn decode_svm(bytes: &[u8]) -> Result<SvmModel, FormatError> {
    let mut cur = Cursor { bytes, pos: 0 };
    let magic: [u8; 4] = cur.take(4)?.try_into().unwrap();
    if magic != SVM_MAGIC {
        return Err(FormatError::BadMagic { expected: SVM_MAGIC, found: magic });
    }
    let version = cur.u32()?;
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let (c, gamma, bias) = (cur.f64()?, cur.f64()?, cur.f64()?);
    let label_map = LabelMap { negative: cur.u32()?, positive: cur.u32()? };
    let d = cur.u32()? as usize;
    let standardizer = match cur.u8()? {
        0 => None,
        1 => Some(StandardizationParams { mean: cur.f64s(d)?, std: cur.f64s(d)? }),
        other => return Err(FormatError::UnsupportedDtype(other)),
    };
    let n_sv = cur.u32()? as usize;
    let dual_coefs = cur.f64s(n_sv)?;
    let raw = cur.take(n_sv.saturating_mul(d).saturating_mul(4))?;
    let mut values = Vec::with_capacity(n_sv * d);
    for (index, ch) in raw.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(ch.try_into().unwrap());
        if !v.is_finite() {
            return Err(FormatError::NonFinite { index });
        }
        values.push(v);
    }
    if cur.pos != bytes.len() {
        return Err(FormatError::TrailingBytes { extra: bytes.len() - cur.pos });
    }
    Ok(SvmModel {
        support_rows: FeatureMatrix::from_parts_unchecked(n_sv, d, values),
        dual_coefs,
        bias,
        hyperparams: SvmHyperparams { c, gamma },
        standardizer,
        label_map,
        stats: TrainStats::default(),
    })
}

pub fn write_svm(model: &SvmModel, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &encode_svm(model)?)
}

pub fn read_svm(path: impl AsRef<Path>) -> Result<SvmModel> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_svm(&bytes).map_err(|source| Error::Format { path: path.to_path_buf(), source })
}
