//! Binary model container, little-endian throughout:
//!
//! ```text
//! "SLAVPARSE"  u32 version  u8 scalar width
//! u64 len + JSON config     u64 len + JSON vocab
//! u32 count, then per parameter:
//!     u32 len + name   u32 rows   u32 cols   u8 sparse   rows·cols scalars
//! 32-byte SHA-256 of everything above
//! ```

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{ModelError, ParserModel};
use crate::nn::ParamStore;
use crate::Scalar;

pub const MAGIC: &[u8; 9] = b"SLAVPARSE";
pub const FORMAT_VERSION: u32 = 1;
const CHECKSUM_LEN: usize = 32;

pub fn write_model<T: Scalar>(model: &ParserModel<T>) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.push(T::BYTES as u8);
    for json in [
        serde_json::to_vec(&model.config).expect("config serializes"),
        serde_json::to_vec(&model.vocab).expect("vocab serializes"),
    ] {
        out.extend_from_slice(&(json.len() as u64).to_le_bytes());
        out.extend_from_slice(&json);
    }
    out.extend_from_slice(&(model.params().len() as u32).to_le_bytes());
    for (_, p) in model.params().iter() {
        out.extend_from_slice(&(p.name.len() as u32).to_le_bytes());
        out.extend_from_slice(p.name.as_bytes());
        out.extend_from_slice(&(p.rows as u32).to_le_bytes());
        out.extend_from_slice(&(p.cols as u32).to_le_bytes());
        out.push(p.sparse as u8);
        for &v in &p.value {
            v.write_le(&mut out);
        }
    }
    let digest = Sha256::digest(&out);
    out.extend_from_slice(digest.as_slice());
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ModelError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or(ModelError::Truncated)?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, ModelError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, ModelError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, ModelError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn len(&mut self, n: u64) -> Result<usize, ModelError> {
        usize::try_from(n).map_err(|_| ModelError::Truncated)
    }
}

/// Reads the scalar width of a model file without decoding the rest.
pub fn model_scalar_width(bytes: &[u8]) -> Result<u8, ModelError> {
    let mut r = Reader { bytes, pos: 0 };
    header(&mut r)
}

fn header(r: &mut Reader<'_>) -> Result<u8, ModelError> {
    let magic = r.take(MAGIC.len()).map_err(|_| ModelError::BadMagic)?;
    if magic != MAGIC {
        return Err(ModelError::BadMagic);
    }
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(ModelError::VersionMismatch { found: version, expected: FORMAT_VERSION });
    }
    r.u8()
}

pub fn read_model<T: Scalar>(bytes: &[u8]) -> Result<ParserModel<T>, ModelError> {
    let mut r = Reader { bytes, pos: 0 };
    let width = header(&mut r)?;
    if width as usize != T::BYTES {
        return Err(ModelError::ScalarWidthMismatch { found: width, expected: T::BYTES as u8 });
    }
    let corrupt = |e: serde_json::Error| ModelError::Corrupt(e.to_string());
    let n = r.u64()?;
    let n = r.len(n)?;
    let config_json = r.take(n)?;
    let n = r.u64()?;
    let n = r.len(n)?;
    let vocab_json = r.take(n)?;
    let count = r.u32()?;
    let mut raw = Vec::new();
    for _ in 0..count {
        let n = r.u32()? as usize;
        let name = std::str::from_utf8(r.take(n)?).map_err(|e| ModelError::Corrupt(e.to_string()))?;
        let rows = r.u32()? as usize;
        let cols = r.u32()? as usize;
        let sparse = r.u8()? != 0;
        let len = rows.checked_mul(cols).and_then(|k| k.checked_mul(T::BYTES)).ok_or(ModelError::Truncated)?;
        let data = r.take(len)?;
        let value: Vec<T> = data.chunks_exact(T::BYTES).map(T::read_le).collect();
        raw.push((name, rows, cols, sparse, value));
    }
    let body_end = r.pos;
    let checksum = r.take(CHECKSUM_LEN)?;
    if r.pos != bytes.len() {
        return Err(ModelError::Corrupt(format!("{} unexpected trailing bytes", bytes.len() - r.pos)));
    }
    if Sha256::digest(&bytes[..body_end]).as_slice() != checksum {
        return Err(ModelError::ChecksumMismatch);
    }

    let config = serde_json::from_slice(config_json).map_err(corrupt)?;
    let vocab = serde_json::from_slice(vocab_json).map_err(corrupt)?;
    let mut params = ParamStore::new();
    for (name, rows, cols, sparse, value) in raw {
        let id = params.add_values(name, rows, cols, value)?;
        params.set_sparse(id, sparse);
    }
    ParserModel::from_parts(config, vocab, params)
}

pub fn save_model<T: Scalar>(model: &ParserModel<T>, path: impl AsRef<Path>) -> Result<(), ModelError> {
    let path = path.as_ref();
    fs::write(path, write_model(model)).map_err(|source| ModelError::Io { path: path.display().to_string(), source })
}

pub fn load_model<T: Scalar>(path: impl AsRef<Path>) -> Result<ParserModel<T>, ModelError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| ModelError::Io { path: path.display().to_string(), source })?;
    read_model(&bytes)
}
