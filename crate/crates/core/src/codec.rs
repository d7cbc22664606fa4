//! Encoder and decoder.
//!
//! The shape layer is covered greedily by codebook shapes. Each placement is
//! stored as the Golomb-coded distance from the previous placement followed
//! by the shape's Huffman codeword. The detail layer follows as plain
//! Huffman-coded symbols in raster order.

use crate::bits::{BitReader, BitWriter};
use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::golomb::{select_m, GolombParameter};
use crate::image::{ceil_log2, Image, MultiComponentImage, ResidualPlane};
use crate::transform::{decompose, recompose, LayerPair};
use crate::wire::Fields;

pub const FRAME_MAGIC: &[u8; 4] = b"SCMP";
pub const FRAME_VERSION: u8 = 1;
pub const CONTAINER_MAGIC: &[u8; 4] = b"SCMC";
/// Size of the fixed frame header in bytes.
pub const FRAME_HEADER_BYTES: usize = 43;
/// Frames describing more pixels than this are rejected as corrupt.
pub const MAX_FRAME_PIXELS: u64 = 1 << 28;

const FLAG_INVERTED: u8 = 1;

/// One shape placement. `row` and `col` locate the top-left corner of the
/// shape's bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Triplet {
    pub row: u32,
    pub col: u32,
    pub shape_id: u32,
}

/// Cover every nonzero value of `layer` with non-overlapping codebook shapes.
///
/// Anchors are visited in raster order. At each uncovered nonzero pixel the
/// chosen shape is the largest one that matches there, preferring shorter
/// codewords and then lower ids. Triplets come out sorted by the raster
/// position of each shape's first nonzero cell.
pub fn cover_shape_layer(layer: &ResidualPlane, cb: &Codebook) -> Result<Vec<Triplet>> {
    let (h, w) = (layer.height(), layer.width());
    let values = layer.values();
    let m = cb.matcher();
    let mut covered = vec![false; values.len()];
    let mut out = Vec::new();
    let free = |covered: &[bool], r: i64, c: i64| -> Option<usize> {
        if r < 0 || c < 0 || r >= h as i64 || c >= w as i64 {
            return None;
        }
        let i = r as usize * w + c as usize;
        (!covered[i] && values[i] != 0).then_some(i)
    };

    for p in 0..values.len() {
        let v = values[p];
        if v == 0 || covered[p] {
            continue;
        }
        let mut best = cb
            .unit_id(v)
            .ok_or_else(|| Error::usage(format!("shape-layer value {v} has no codebook shape")))?;
        let (r, c) = ((p / w) as i64, (p % w) as i64);
        if let Some(probes) = m.probes.get(&(v as u16)) {
            for &(dr, dc) in probes {
                let Some(q) = free(&covered, r + i64::from(dr), c + i64::from(dc)) else { continue };
                let Some(ids) = m.by_key.get(&(v as u16, dr, dc, values[q] as u16)) else { continue };
                for &id in ids {
                    if m.rank[id as usize] >= m.rank[best as usize] {
                        break;
                    }
                    let shape = cb.shape(id).expect("matcher ids are valid");
                    let left = c - i64::from(m.lead_col[id as usize]);
                    if left < 0 || left + shape.cols() as i64 > w as i64 || r + shape.rows() as i64 > h as i64 {
                        continue;
                    }
                    let fits = m.offsets[id as usize].iter().all(|&(dr, dc, sv)| {
                        free(&covered, r + i64::from(dr), c + i64::from(dc)).is_some_and(|i| values[i] == u32::from(sv))
                    });
                    if fits {
                        best = id;
                        break;
                    }
                }
            }
        }
        for &(dr, dc, _) in &m.offsets[best as usize] {
            covered[(r + i64::from(dr)) as usize * w + (c + i64::from(dc)) as usize] = true;
        }
        let left = c as u32 - m.lead_col[best as usize];
        out.push(Triplet { row: r as u32, col: left, shape_id: best });
    }
    Ok(out)
}

/// Fill shapes at their placements. Placements outside the canvas or on top
/// of earlier placements are reported as corruption.
pub fn reconstruct_shape_layer(triplets: &[Triplet], cb: &Codebook, height: usize, width: usize) -> Result<ResidualPlane> {
    let mut values = vec![0u32; height * width];
    for t in triplets {
        let shape = cb.shape(t.shape_id).ok_or_else(|| Error::corrupt(format!("unknown shape id {}", t.shape_id)))?;
        let (r, c) = (t.row as usize, t.col as usize);
        if r + shape.rows() > height || c + shape.cols() > width {
            return Err(Error::corrupt(format!("shape {} at ({r}, {c}) leaves the image", t.shape_id)));
        }
        for (i, &v) in shape.cells().iter().enumerate() {
            if v == 0 {
                continue;
            }
            let cell = &mut values[(r + i / shape.cols()) * width + c + i % shape.cols()];
            if *cell != 0 {
                return Err(Error::corrupt(format!("shape {} at ({r}, {c}) overlaps an earlier shape", t.shape_id)));
            }
            *cell = u32::from(v);
        }
    }
    ResidualPlane::new(height, width, values)
}

/// A self-contained compressed image. Decoding needs only the codebook.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedFrame {
    pub flags: u8,
    pub height: u32,
    pub width: u32,
    pub depth_levels: u32,
    pub interface: u8,
    pub golomb_m: u32,
    pub triplet_count: u32,
    pub shape_bits: u64,
    pub detail_bits: u64,
    pub shape_payload: Vec<u8>,
    pub detail_payload: Vec<u8>,
}

impl CompressedFrame {
    pub fn is_inverted(&self) -> bool {
        self.flags & FLAG_INVERTED != 0
    }

    pub fn byte_len(&self) -> usize {
        FRAME_HEADER_BYTES + self.shape_payload.len() + self.detail_payload.len()
    }

    /// Stored size in bits, header and padding included.
    pub fn total_bits(&self) -> u64 {
        self.byte_len() as u64 * 8
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.byte_len());
        out.extend_from_slice(FRAME_MAGIC);
        out.push(FRAME_VERSION);
        out.push(self.flags);
        out.extend_from_slice(&self.height.to_be_bytes());
        out.extend_from_slice(&self.width.to_be_bytes());
        out.extend_from_slice(&self.depth_levels.to_be_bytes());
        out.push(self.interface);
        out.extend_from_slice(&self.golomb_m.to_be_bytes());
        out.extend_from_slice(&self.triplet_count.to_be_bytes());
        out.extend_from_slice(&self.shape_bits.to_be_bytes());
        out.extend_from_slice(&self.detail_bits.to_be_bytes());
        out.extend_from_slice(&self.shape_payload);
        out.extend_from_slice(&self.detail_payload);
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        let mut f = Fields::new(data);
        let header = |e: Error| match e {
            Error::UnexpectedEof => Error::corrupt("frame header truncated"),
            other => other,
        };
        if f.take(4).map_err(header)? != FRAME_MAGIC {
            return Err(Error::format("not a compressed frame (bad magic)"));
        }
        let version = f.u8().map_err(header)?;
        if version != FRAME_VERSION {
            return Err(Error::format(format!("unsupported frame version {version}")));
        }
        let flags = f.u8().map_err(header)?;
        let height = f.u32().map_err(header)?;
        let width = f.u32().map_err(header)?;
        let depth_levels = f.u32().map_err(header)?;
        let interface = f.u8().map_err(header)?;
        let golomb_m = f.u32().map_err(header)?;
        let triplet_count = f.u32().map_err(header)?;
        let shape_bits = f.u64().map_err(header)?;
        let detail_bits = f.u64().map_err(header)?;
        let shape_len = shape_bits.div_ceil(8);
        let detail_len = detail_bits.div_ceil(8);
        if shape_len.checked_add(detail_len) != Some(f.remaining() as u64) {
            return Err(Error::corrupt(format!(
                "frame declares {} payload bytes but carries {}",
                shape_len.saturating_add(detail_len),
                f.remaining()
            )));
        }
        let shape_payload = f.take(shape_len as usize)?.to_vec();
        let detail_payload = f.take(detail_len as usize)?.to_vec();
        Ok(CompressedFrame {
            flags,
            height,
            width,
            depth_levels,
            interface,
            golomb_m,
            triplet_count,
            shape_bits,
            detail_bits,
            shape_payload,
            detail_payload,
        })
    }
}

/// Per-frame bit accounting gathered while encoding.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EncodeStats {
    pub triplets: usize,
    pub unit_triplets: usize,
    /// Golomb-coded distances, the first being the absolute index.
    pub deltas: Vec<u64>,
    pub location_bits: u64,
    pub codeword_bits: u64,
    pub detail_bits: u64,
    /// Nonzero shape-layer pixels.
    pub covered_pixels: usize,
}

impl EncodeStats {
    /// Mean bits per location, the break-even point against the CIV.
    pub fn mean_location_bits(&self) -> Option<f64> {
        (self.triplets > 0).then(|| self.location_bits as f64 / self.triplets as f64)
    }
}

/// Encode a gray image (`D > 2`) whose depth matches the codebook.
pub fn encode_gray(img: &Image, cb: &Codebook) -> Result<CompressedFrame> {
    if img.depth_levels() == 2 {
        return Err(Error::usage("two-level images are encoded with encode_binary"));
    }
    encode_with_stats(img, cb).map(|(f, _)| f)
}

/// Encode a two-level image. Images with a majority of ones are inverted
/// first and flagged.
pub fn encode_binary(img: &Image, cb: &Codebook) -> Result<CompressedFrame> {
    if img.depth_levels() != 2 {
        return Err(Error::usage(format!("encode_binary needs a two-level image, got depth {}", img.depth_levels())));
    }
    encode_with_stats(img, cb).map(|(f, _)| f)
}

/// Encode any image, choosing the binary or gray path from its depth.
pub fn encode(img: &Image, cb: &Codebook) -> Result<CompressedFrame> {
    encode_with_stats(img, cb).map(|(f, _)| f)
}

pub fn encode_with_stats(img: &Image, cb: &Codebook) -> Result<(CompressedFrame, EncodeStats)> {
    if img.depth_levels() != cb.depth_levels() {
        return Err(Error::usage(format!(
            "image depth {} does not match codebook depth {}",
            img.depth_levels(),
            cb.depth_levels()
        )));
    }
    let d = decompose(img, cb.interface())?;
    let (h, w) = (img.height(), img.width());
    if h as u64 * w as u64 > MAX_FRAME_PIXELS {
        return Err(Error::usage(format!("images above {MAX_FRAME_PIXELS} pixels are not supported")));
    }
    let triplets = cover_shape_layer(&d.layers.shape_layer, cb)?;
    let m = cb.matcher();

    let leads: Vec<u64> = triplets
        .iter()
        .map(|t| t.row as u64 * w as u64 + u64::from(t.col) + u64::from(m.lead_col[t.shape_id as usize]))
        .collect();
    let deltas: Vec<u64> = leads
        .iter()
        .enumerate()
        .map(|(i, &lead)| if i == 0 { lead } else { lead - leads[i - 1] - 1 })
        .collect();
    let golomb = if deltas.is_empty() { GolombParameter::new(cb.golomb_m())? } else { select_m(&deltas) };

    let mut shape_out = BitWriter::new();
    let mut stats = EncodeStats {
        triplets: triplets.len(),
        covered_pixels: d.layers.shape_layer.count_nonzero(),
        ..EncodeStats::default()
    };
    for (t, &delta) in triplets.iter().zip(&deltas) {
        let before = shape_out.bit_len();
        golomb.encode(delta, &mut shape_out);
        let mid = shape_out.bit_len();
        cb.shape_code().encode_symbol(t.shape_id, &mut shape_out)?;
        stats.location_bits += mid - before;
        stats.codeword_bits += shape_out.bit_len() - mid;
        if cb.shape(t.shape_id).is_some_and(|s| s.is_unit()) {
            stats.unit_triplets += 1;
        }
    }
    stats.deltas = deltas;

    let mut detail_out = BitWriter::new();
    if cb.interface() > 0 {
        for &v in d.layers.detail_layer.values() {
            cb.detail_code().encode_symbol(v, &mut detail_out)?;
        }
    }
    stats.detail_bits = detail_out.bit_len();

    let (shape_payload, shape_bits) = shape_out.finish();
    let (detail_payload, detail_bits) = detail_out.finish();
    let frame = CompressedFrame {
        flags: if d.inverted { FLAG_INVERTED } else { 0 },
        height: h as u32,
        width: w as u32,
        depth_levels: img.depth_levels(),
        interface: cb.interface(),
        golomb_m: golomb.m(),
        triplet_count: triplets.len() as u32,
        shape_bits,
        detail_bits,
        shape_payload,
        detail_payload,
    };
    Ok((frame, stats))
}

pub fn decode_gray(frame: &CompressedFrame, cb: &Codebook) -> Result<Image> {
    if frame.depth_levels == 2 {
        return Err(Error::usage("two-level frames are decoded with decode_binary"));
    }
    decode(frame, cb)
}

pub fn decode_binary(frame: &CompressedFrame, cb: &Codebook) -> Result<Image> {
    if frame.depth_levels != 2 {
        return Err(Error::usage(format!("decode_binary needs a two-level frame, got depth {}", frame.depth_levels)));
    }
    decode(frame, cb)
}

/// Decode a frame of either kind.
pub fn decode(frame: &CompressedFrame, cb: &Codebook) -> Result<Image> {
    if frame.depth_levels != cb.depth_levels() {
        return Err(Error::usage(format!(
            "frame depth {} does not match codebook depth {}",
            frame.depth_levels,
            cb.depth_levels()
        )));
    }
    if frame.interface != cb.interface() {
        return Err(Error::usage(format!(
            "frame layer interface {} does not match codebook interface {}",
            frame.interface,
            cb.interface()
        )));
    }
    if frame.flags & !FLAG_INVERTED != 0 || (frame.is_inverted() && frame.depth_levels != 2) {
        return Err(Error::corrupt(format!("invalid frame flags {:#04x}", frame.flags)));
    }
    let (h, w) = (frame.height as usize, frame.width as usize);
    let pixels = frame.height as u64 * frame.width as u64;
    if h == 0 || w == 0 || pixels > MAX_FRAME_PIXELS {
        return Err(Error::corrupt(format!("implausible frame size {h}x{w}")));
    }
    if u64::from(frame.triplet_count) > pixels {
        return Err(Error::corrupt("more placements than pixels"));
    }
    let golomb = GolombParameter::new(frame.golomb_m).map_err(|_| Error::corrupt("Golomb parameter is zero"))?;

    let triplets = read_placements(frame, cb, &golomb, pixels, w).map_err(Error::into_corrupt)?;
    let shape_layer = reconstruct_shape_layer(&triplets, cb, h, w)?;

    let detail_layer = if cb.interface() == 0 {
        if frame.detail_bits != 0 {
            return Err(Error::corrupt("detail payload present with layer interface 0"));
        }
        ResidualPlane::zeros(h, w)
    } else {
        if frame.detail_bits < pixels {
            return Err(Error::corrupt("detail payload too short"));
        }
        let mut src = BitReader::with_bit_len(&frame.detail_payload, frame.detail_bits).map_err(Error::into_corrupt)?;
        let values = (0..pixels)
            .map(|_| cb.detail_code().decode_symbol(&mut src))
            .collect::<Result<Vec<_>>>()
            .map_err(Error::into_corrupt)?;
        if src.remaining() != 0 {
            return Err(Error::corrupt("unused bits in detail payload"));
        }
        ResidualPlane::new(h, w, values)?
    };

    let layers = LayerPair { shape_layer, detail_layer, interface: cb.interface() };
    recompose(&layers, frame.is_inverted(), frame.depth_levels)
}

fn read_placements(
    frame: &CompressedFrame,
    cb: &Codebook,
    golomb: &GolombParameter,
    pixels: u64,
    width: usize,
) -> Result<Vec<Triplet>> {
    let m = cb.matcher();
    let mut src = BitReader::with_bit_len(&frame.shape_payload, frame.shape_bits)?;
    let mut triplets = Vec::with_capacity(frame.triplet_count as usize);
    let mut prev: Option<u64> = None;
    for _ in 0..frame.triplet_count {
        let delta = golomb.decode(&mut src)?;
        let lead = match prev {
            None => Some(delta),
            Some(p) => p.checked_add(delta).and_then(|v| v.checked_add(1)),
        }
        .filter(|&l| l < pixels)
        .ok_or_else(|| Error::corrupt("placement beyond the last pixel"))?;
        prev = Some(lead);
        let shape_id = cb.shape_code().decode_symbol(&mut src)?;
        let (row, col) = (lead / width as u64, lead % width as u64);
        let lead_col = u64::from(m.lead_col[shape_id as usize]);
        if col < lead_col {
            return Err(Error::corrupt(format!("shape {shape_id} at index {lead} leaves the image")));
        }
        triplets.push(Triplet { row: row as u32, col: (col - lead_col) as u32, shape_id });
    }
    if src.remaining() != 0 {
        return Err(Error::corrupt("unused bits in shape payload"));
    }
    Ok(triplets)
}

/// Encode each component with its own codebook.
pub fn encode_multi(img: &MultiComponentImage, cbs: &[Codebook]) -> Result<Vec<CompressedFrame>> {
    if img.components().len() != cbs.len() {
        return Err(Error::usage(format!(
            "{} components but {} codebooks",
            img.components().len(),
            cbs.len()
        )));
    }
    img.components().iter().zip(cbs).map(|(c, cb)| encode(c, cb)).collect()
}

pub fn decode_multi(frames: &[CompressedFrame], cbs: &[Codebook]) -> Result<Vec<Image>> {
    if frames.len() != cbs.len() {
        return Err(Error::usage(format!("{} frames but {} codebooks", frames.len(), cbs.len())));
    }
    let images = frames.iter().zip(cbs).map(|(f, cb)| decode(f, cb)).collect::<Result<Vec<_>>>()?;
    if images.windows(2).any(|p| p[0].height() != p[1].height() || p[0].width() != p[1].width()) {
        return Err(Error::corrupt("components disagree on image size"));
    }
    Ok(images)
}

/// Container layout: magic, component count, then each frame prefixed by
/// its byte length.
pub fn pack_frames(frames: &[CompressedFrame]) -> Result<Vec<u8>> {
    let count = u8::try_from(frames.len()).map_err(|_| Error::usage("at most 255 components fit a container"))?;
    let mut out = Vec::new();
    out.extend_from_slice(CONTAINER_MAGIC);
    out.push(count);
    for f in frames {
        let bytes = f.to_bytes();
        let len = u32::try_from(bytes.len()).map_err(|_| Error::usage("frame too large for a container"))?;
        out.extend_from_slice(&len.to_be_bytes());
        out.extend_from_slice(&bytes);
    }
    Ok(out)
}

pub fn unpack_frames(data: &[u8]) -> Result<Vec<CompressedFrame>> {
    let mut f = Fields::new(data);
    let trunc = |e: Error| match e {
        Error::UnexpectedEof => Error::corrupt("container truncated"),
        other => other,
    };
    if f.take(4).map_err(trunc)? != CONTAINER_MAGIC {
        return Err(Error::format("not a frame container (bad magic)"));
    }
    let count = f.u8().map_err(trunc)?;
    let mut frames = Vec::with_capacity(usize::from(count));
    for _ in 0..count {
        let len = f.u32().map_err(trunc)? as usize;
        frames.push(CompressedFrame::from_bytes(f.take(len).map_err(trunc)?)?);
    }
    if f.remaining() != 0 {
        return Err(Error::corrupt("trailing bytes after last frame"));
    }
    Ok(frames)
}

/// Natural-binary size of the image over the stored frame size.
pub fn measure_ratio(img: &Image, frame: &CompressedFrame) -> f64 {
    natural_bits(img) as f64 / frame.total_bits() as f64
}

/// `M * N * ceil(log2 D)`.
pub fn natural_bits(img: &Image) -> u64 {
    img.len() as u64 * u64::from(ceil_log2(img.depth_levels()))
}
