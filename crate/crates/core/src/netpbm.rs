//! Binary PGM (`P5`) and PPM (`P6`) reading and writing.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{Image, MultiComponentImage};

pub fn load_pnm(path: impl AsRef<Path>) -> Result<MultiComponentImage> {
    parse_pnm(&fs::read(path.as_ref())?)
}

pub fn parse_pnm(data: &[u8]) -> Result<MultiComponentImage> {
    let mut cur = HeaderCursor { data, pos: 0 };
    let magic = cur.token()?;
    let channels = match magic {
        b"P5" => 1,
        b"P6" => 3,
        other => {
            return Err(Error::format(format!(
                "unsupported netpbm magic {:?}; only P5 and P6 are read",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let width = cur.number()?;
    let height = cur.number()?;
    let maxval = cur.number()?;
    if width == 0 || height == 0 {
        return Err(Error::format("zero image dimension"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::format(format!("maxval {maxval} outside [1, 65535]")));
    }
    // exactly one whitespace byte separates the header from the raster
    match data.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(Error::format("missing whitespace before raster")),
    }
    let sample_bytes = if maxval > 255 { 2 } else { 1 };
    let count = width * height;
    let raster = &data[cur.pos..];
    if raster.len() < count * channels * sample_bytes {
        return Err(Error::format("raster shorter than header declares"));
    }
    let mut planes = vec![Vec::with_capacity(count); channels];
    for (i, sample) in raster.chunks_exact(sample_bytes).take(count * channels).enumerate() {
        let v = if sample_bytes == 2 { u16::from_be_bytes([sample[0], sample[1]]) } else { u16::from(sample[0]) };
        if usize::from(v) > maxval {
            return Err(Error::format(format!("sample {v} exceeds maxval {maxval}")));
        }
        planes[i % channels].push(v);
    }
    let depth = maxval as u32 + 1;
    let components = planes
        .into_iter()
        .map(|p| Image::new(height, width, depth, p))
        .collect::<Result<Vec<_>>>()?;
    let labels = if channels == 1 { vec!["Y"] } else { vec!["R", "G", "B"] };
    MultiComponentImage::new(components, labels.into_iter().map(String::from).collect())
}

/// Serialize as P5 (one component) or P6 (three components).
pub fn encode_pnm(img: &MultiComponentImage) -> Result<Vec<u8>> {
    let comps = img.components();
    let magic = match comps.len() {
        1 => "P5",
        3 => "P6",
        n => return Err(Error::usage(format!("netpbm stores 1 or 3 components, got {n}"))),
    };
    let depth = comps[0].depth_levels();
    if comps.iter().any(|c| c.depth_levels() != depth) {
        return Err(Error::usage("netpbm components must share depth"));
    }
    let maxval = depth - 1;
    let mut out = format!("{magic}\n{} {}\n{maxval}\n", img.width(), img.height()).into_bytes();
    let wide = maxval > 255;
    for i in 0..img.width() * img.height() {
        for c in comps {
            let v = c.pixels()[i];
            if wide {
                out.extend_from_slice(&v.to_be_bytes());
            } else {
                out.push(v as u8);
            }
        }
    }
    Ok(out)
}

pub fn save_pnm(path: impl AsRef<Path>, img: &MultiComponentImage) -> Result<()> {
    fs::write(path.as_ref(), encode_pnm(img)?)?;
    Ok(())
}

struct HeaderCursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while self.data.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(|b| !b.is_ascii_whitespace()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::format("netpbm header ended early"));
        }
        Ok(&self.data[start..self.pos])
    }

    fn number(&mut self) -> Result<usize> {
        let tok = self.token()?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::format(format!("bad header number {:?}", String::from_utf8_lossy(tok))))
    }
}
