//! Binary embeddings container: magic bytes, little-endian dimensions, then
//! row-major f64 values, with a small JSON sidecar describing the layout.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::Matrix;

const MAGIC: &[u8; 8] = b"GREMB\x00\x00\x01";

/// JSON sidecar written next to the binary file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingsHeader {
    pub rows: usize,
    pub cols: usize,
    pub dtype: String,
    pub layout: String,
}

/// Write `<path>` (binary) and `<path with .json extension>` (sidecar).
pub fn write_embeddings(path: &Path, z: &Matrix) -> Result<()> {
    let mut bytes = Vec::with_capacity(24 + 8 * z.values().len());
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&(z.rows() as u64).to_le_bytes());
    bytes.extend_from_slice(&(z.cols() as u64).to_le_bytes());
    for v in z.values() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))?;

    let header = EmbeddingsHeader {
        rows: z.rows(),
        cols: z.cols(),
        dtype: "f64le".into(),
        layout: "row-major".into(),
    };
    let sidecar = path.with_extension("json");
    fs::write(&sidecar, serde_json::to_string_pretty(&header)?)
        .map_err(|e| Error::io(&sidecar, e))?;
    Ok(())
}

/// Read a matrix written by [`write_embeddings`], validating magic and size.
pub fn read_embeddings(path: &Path) -> Result<Matrix> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < 24 || &bytes[..8] != MAGIC {
        return Err(Error::Parse {
            path: path.into(),
            line: 0,
            msg: "not an embeddings container (bad magic)".into(),
        });
    }
    let rows = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let cols = u64::from_le_bytes(bytes[16..24].try_into().unwrap()) as usize;
    let expected = 24 + 8 * rows * cols;
    if bytes.len() != expected {
        return Err(Error::Parse {
            path: path.into(),
            line: 0,
            msg: format!("expected {expected} bytes for {rows}x{cols}, found {}", bytes.len()),
        });
    }
    let values: Vec<f64> = bytes[24..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Matrix::from_vec(rows, cols, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("embeddings.bin");
        let z = Matrix::from_vec(2, 3, vec![0.1, -1.5, f64::MIN_POSITIVE, 3.0, 1e300, 0.0])
            .unwrap();
        write_embeddings(&path, &z).unwrap();
        assert_eq!(read_embeddings(&path).unwrap(), z);
        let header: EmbeddingsHeader =
            serde_json::from_str(&std::fs::read_to_string(path.with_extension("json")).unwrap())
                .unwrap();
        assert_eq!((header.rows, header.cols), (2, 3));
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.bin");
        std::fs::write(&path, b"not an embeddings file").unwrap();
        assert!(read_embeddings(&path).is_err());

        let good = dir.path().join("good.bin");
        write_embeddings(&good, &Matrix::zeros(3, 3)).unwrap();
        let mut bytes = std::fs::read(&good).unwrap();
        bytes.truncate(bytes.len() - 1);
        std::fs::write(&good, bytes).unwrap();
        assert!(read_embeddings(&good).is_err());
    }
}
