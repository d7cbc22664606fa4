//! IDX tensor files as distributed with MNIST and Fashion-MNIST.
//!
//! Only the unsigned-byte, three-dimensional variant (`00 00 08 03`) is
//! accepted. Files may be gzip-compressed; that is detected from the content.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use crate::error::{Error, Result};
use crate::image::{Corpus, Image};

const MAGIC_U8_3D: [u8; 4] = [0x00, 0x00, 0x08, 0x03];

pub fn load_idx(path: impl AsRef<Path>) -> Result<Corpus> {
    let raw = fs::read(path.as_ref())?;
    parse_idx(&raw)
}

pub fn parse_idx(raw: &[u8]) -> Result<Corpus> {
    if raw.starts_with(&[0x1f, 0x8b]) {
        let mut data = Vec::new();
        GzDecoder::new(raw).read_to_end(&mut data)?;
        return parse_plain(&data);
    }
    parse_plain(raw)
}

fn parse_plain(data: &[u8]) -> Result<Corpus> {
    if data.len() < 4 {
        return Err(truncated("magic"));
    }
    if data[..4] != MAGIC_U8_3D {
        return Err(Error::format(format!(
            "unsupported IDX magic {:02x} {:02x} {:02x} {:02x}; only unsigned-byte 3-D tensors are read",
            data[0], data[1], data[2], data[3]
        )));
    }
    if data.len() < 16 {
        return Err(truncated("dimension header"));
    }
    let dim = |i: usize| u32::from_be_bytes(data[4 + 4 * i..8 + 4 * i].try_into().unwrap()) as usize;
    let (count, rows, cols) = (dim(0), dim(1), dim(2));
    if count > 0 && (rows == 0 || cols == 0) {
        return Err(Error::format("zero-sized image dimension"));
    }
    let per_image = rows * cols;
    let payload = &data[16..];
    if payload.len() < count * per_image {
        return Err(truncated("pixel payload"));
    }
    let images = payload
        .chunks_exact(per_image.max(1))
        .take(count)
        .map(|chunk| Image::new(rows, cols, 256, chunk.iter().map(|&b| u16::from(b)).collect()))
        .collect::<Result<Vec<_>>>()?;
    Corpus::new(images, None)
}

fn truncated(what: &str) -> Error {
    Error::Io(io::Error::new(io::ErrorKind::UnexpectedEof, format!("IDX file truncated in {what}")))
}

/// Serialize 8-bit images of one size as an IDX3 tensor.
pub fn encode_idx(corpus: &Corpus) -> Result<Vec<u8>> {
    let (rows, cols) = corpus.images().first().map_or((0, 0), |i| (i.height(), i.width()));
    let mut out = Vec::with_capacity(16 + corpus.len() * rows * cols);
    out.extend_from_slice(&MAGIC_U8_3D);
    for d in [corpus.len(), rows, cols] {
        out.extend_from_slice(&(d as u32).to_be_bytes());
    }
    for img in corpus.images() {
        if img.height() != rows || img.width() != cols {
            return Err(Error::usage("IDX images must share dimensions"));
        }
        if img.depth_levels() > 256 {
            return Err(Error::usage("IDX stores unsigned bytes; depth must be at most 256"));
        }
        out.extend(img.pixels().iter().map(|&v| v as u8));
    }
    Ok(out)
}

/// Write an IDX3 file, gzip-compressed when the path ends in `.gz`.
pub fn save_idx(path: impl AsRef<Path>, corpus: &Corpus) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_idx(corpus)?;
    if path.extension().is_some_and(|e| e == "gz") {
        let mut enc = GzEncoder::new(fs::File::create(path)?, Compression::default());
        enc.write_all(&bytes)?;
        enc.finish()?;
    } else {
        fs::write(path, bytes)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(count: u32, rows: u32, cols: u32) -> Vec<u8> {
        let mut v = MAGIC_U8_3D.to_vec();
        for d in [count, rows, cols] {
            v.extend_from_slice(&d.to_be_bytes());
        }
        v
    }

    #[test]
    fn decodes_single_record() {
        let mut raw = header(1, 2, 2);
        raw.extend_from_slice(&[0, 1, 2, 3]);
        let corpus = parse_idx(&raw).unwrap();
        assert_eq!(corpus.len(), 1);
        let img = &corpus.images()[0];
        assert_eq!(img.depth_levels(), 256);
        assert_eq!((img.height(), img.width()), (2, 2));
        assert_eq!(img.pixels(), &[0, 1, 2, 3]);
    }

    #[test]
    fn zero_records() {
        let corpus = parse_idx(&header(0, 28, 28)).unwrap();
        assert!(corpus.is_empty());
    }

    #[test]
    fn vector_magic_rejected() {
        let mut raw = vec![0, 0, 8, 1];
        raw.extend_from_slice(&4u32.to_be_bytes());
        raw.extend_from_slice(&[1, 2, 3, 4]);
        assert!(matches!(parse_idx(&raw), Err(Error::Format(_))));
    }

    #[test]
    fn truncated_payload_is_io_error() {
        let mut raw = header(2, 2, 2);
        raw.extend_from_slice(&[0, 1, 2, 3, 4]);
        assert!(matches!(parse_idx(&raw), Err(Error::Io(_))));
    }

    #[test]
    fn gzip_round_trip() {
        let img = Image::from_rows(256, &[[9u16, 8], [7, 6]]).unwrap();
        let corpus = Corpus::new(vec![img.clone(), img], None).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.idx3-ubyte.gz");
        save_idx(&path, &corpus).unwrap();
        assert_eq!(load_idx(&path).unwrap(), corpus);
    }
}
