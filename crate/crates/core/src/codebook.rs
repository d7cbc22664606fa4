//! Trained codebooks: a canonical Huffman code over shapes plus one over the
//! detail alphabet, and the binary file format that carries them.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::golomb::MAX_M;
use crate::huffman::HuffmanCode;
use crate::shapes::{Shape, ShapeFrequencyTable, MAX_SHAPE_DIM};
use crate::transform::{check_interface, max_shape_value};
use crate::wire::Fields;

pub const CODEBOOK_MAGIC: &[u8; 4] = b"SCBK";
pub const CODEBOOK_VERSION: u8 = 1;

/// How shape counts turn into Huffman weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    Count,
    /// Count multiplied by the number of pixels the shape covers.
    #[default]
    CountTimesSize,
}

impl Weighting {
    pub fn weight(self, shape: &Shape, count: u64) -> u64 {
        match self {
            Weighting::Count => count,
            Weighting::CountTimesSize => count.saturating_mul(shape.size() as u64),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Codebook {
    depth_levels: u32,
    interface: u8,
    n_max: u8,
    golomb_m: u32,
    /// Shapes in id order; ids are positions in this list.
    shapes: Vec<Shape>,
    shape_code: HuffmanCode,
    detail_code: HuffmanCode,
    matcher: Matcher,
}

impl PartialEq for Codebook {
    fn eq(&self, other: &Self) -> bool {
        self.depth_levels == other.depth_levels
            && self.interface == other.interface
            && self.n_max == other.n_max
            && self.golomb_m == other.golomb_m
            && self.shapes == other.shapes
            && self.shape_code == other.shape_code
            && self.detail_code == other.detail_code
    }
}

impl Eq for Codebook {}

/// Parameters for [`build_codebook`] beyond the mined statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodebookParams {
    pub depth_levels: u32,
    pub interface: u8,
    pub n_max: u8,
    pub weighting: Weighting,
    pub golomb_m: u32,
}

/// Build a codebook from mined shape counts and detail-layer counts.
///
/// Every single-pixel shape the layer can hold is inserted with count at
/// least 1, so any image of the right depth can be encoded. Detail symbols
/// get add-one smoothing over the whole alphabet.
pub fn build_codebook(table: &ShapeFrequencyTable, detail_counts: &[u64], params: &CodebookParams) -> Result<Codebook> {
    check_params(params)?;
    let max_value = max_shape_value(params.depth_levels, params.interface);
    let mut counts: HashMap<Shape, u64> = HashMap::with_capacity(table.len() + max_value as usize);
    for (shape, count) in table.entries() {
        if u32::from(shape.max_value()) > max_value {
            return Err(Error::usage(format!("shape {shape:?} holds values above {max_value}")));
        }
        if shape.rows() > usize::from(params.n_max) || shape.cols() > usize::from(params.n_max) {
            return Err(Error::usage(format!("shape {shape:?} exceeds n_max {}", params.n_max)));
        }
        if count > 0 {
            counts.insert(shape.clone(), count);
        }
    }
    for v in 1..=max_value {
        let c = counts.entry(Shape::unit(v as u16)).or_insert(0);
        *c = (*c).max(1);
    }
    let mut shapes: Vec<(Shape, u64)> = counts.into_iter().collect();
    shapes.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let shape_code = HuffmanCode::build(
        shapes.iter().enumerate().map(|(id, (s, c))| (id as u32, params.weighting.weight(s, *c).max(1))),
    )?;

    let alphabet = 1usize << params.interface;
    let smoothed: Vec<u64> = (0..alphabet).map(|i| detail_counts.get(i).copied().unwrap_or(0) + 1).collect();
    let detail_code = HuffmanCode::from_counts(&smoothed)?;

    Codebook::assemble(
        params.depth_levels,
        params.interface,
        params.n_max,
        params.golomb_m,
        shapes.into_iter().map(|(s, _)| s).collect(),
        shape_code,
        detail_code,
    )
}

fn check_params(params: &CodebookParams) -> Result<()> {
    if params.depth_levels < 2 || params.depth_levels > crate::image::MAX_DEPTH_LEVELS {
        return Err(Error::usage(format!("depth {} out of range", params.depth_levels)));
    }
    check_interface(params.depth_levels, params.interface)?;
    if params.n_max == 0 || params.n_max > MAX_SHAPE_DIM {
        return Err(Error::usage(format!("n_max must be in [1, {MAX_SHAPE_DIM}]")));
    }
    if params.golomb_m == 0 || params.golomb_m > MAX_M {
        return Err(Error::usage(format!("Golomb parameter must be in [1, {MAX_M}]")));
    }
    Ok(())
}

impl Codebook {
    fn assemble(
        depth_levels: u32,
        interface: u8,
        n_max: u8,
        golomb_m: u32,
        shapes: Vec<Shape>,
        shape_code: HuffmanCode,
        detail_code: HuffmanCode,
    ) -> Result<Self> {
        let matcher = Matcher::new(&shapes, &shape_code, max_shape_value(depth_levels, interface));
        Ok(Codebook { depth_levels, interface, n_max, golomb_m, shapes, shape_code, detail_code, matcher })
    }

    pub fn depth_levels(&self) -> u32 {
        self.depth_levels
    }

    pub fn interface(&self) -> u8 {
        self.interface
    }

    pub fn n_max(&self) -> u8 {
        self.n_max
    }

    pub fn golomb_m(&self) -> u32 {
        self.golomb_m
    }

    /// Replace the fallback Golomb parameter.
    pub fn with_golomb_m(mut self, m: u32) -> Result<Self> {
        if m == 0 || m > MAX_M {
            return Err(Error::usage(format!("Golomb parameter must be in [1, {MAX_M}]")));
        }
        self.golomb_m = m;
        Ok(self)
    }

    pub fn shapes(&self) -> &[Shape] {
        &self.shapes
    }

    pub fn shape(&self, id: u32) -> Option<&Shape> {
        self.shapes.get(id as usize)
    }

    pub fn shape_code(&self) -> &HuffmanCode {
        &self.shape_code
    }

    pub fn detail_code(&self) -> &HuffmanCode {
        &self.detail_code
    }

    /// Codeword length of a shape id.
    pub fn shape_len(&self, id: u32) -> u8 {
        self.shape_code.length_of(id).expect("every shape has a codeword")
    }

    /// Id of the single-pixel shape holding `value`.
    pub fn unit_id(&self, value: u32) -> Option<u32> {
        self.matcher.unit.get(value as usize).copied().filter(|&id| id != u32::MAX)
    }

    /// True when every single-pixel shape the layer can hold is present.
    pub fn is_complete(&self) -> bool {
        (1..=max_shape_value(self.depth_levels, self.interface)).all(|v| self.unit_id(v).is_some())
    }

    pub(crate) fn matcher(&self) -> &Matcher {
        &self.matcher
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(CODEBOOK_MAGIC);
        out.push(CODEBOOK_VERSION);
        out.extend_from_slice(&self.depth_levels.to_be_bytes());
        out.push(self.interface);
        out.push(self.n_max);
        out.extend_from_slice(&self.golomb_m.to_be_bytes());
        out.extend_from_slice(&(self.shapes.len() as u32).to_be_bytes());
        for (id, shape) in self.shapes.iter().enumerate() {
            out.push(shape.rows() as u8);
            out.push(shape.cols() as u8);
            for &v in shape.cells() {
                out.extend_from_slice(&v.to_be_bytes());
            }
            out.push(self.shape_len(id as u32));
        }
        let alphabet = 1u32 << self.interface;
        out.extend_from_slice(&alphabet.to_be_bytes());
        for s in 0..alphabet {
            out.push(self.detail_code.length_of(s).expect("detail alphabet is dense"));
        }
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        parse(data).map_err(|e| match e {
            Error::UnexpectedEof => Error::format("codebook truncated"),
            Error::Build(msg) | Error::Usage(msg) | Error::Domain(msg) => Error::Format(msg),
            other => other,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Codebook::from_bytes(&fs::read(path)?)
    }
}

fn parse(data: &[u8]) -> Result<Codebook> {
    let mut f = Fields::new(data);
    if f.take(4)? != CODEBOOK_MAGIC {
        return Err(Error::format("not a codebook (bad magic)"));
    }
    let version = f.u8()?;
    if version != CODEBOOK_VERSION {
        return Err(Error::format(format!("unsupported codebook version {version}")));
    }
    let depth_levels = f.u32()?;
    let interface = f.u8()?;
    let n_max = f.u8()?;
    let golomb_m = f.u32()?;
    check_params(&CodebookParams { depth_levels, interface, n_max, weighting: Weighting::Count, golomb_m })?;
    let max_value = max_shape_value(depth_levels, interface);

    let count = f.u32()? as usize;
    // each entry takes at least 5 bytes
    if count > f.remaining() / 5 {
        return Err(Error::format("shape count exceeds file size"));
    }
    let mut shapes = Vec::with_capacity(count);
    let mut lengths = Vec::with_capacity(count);
    for id in 0..count {
        let rows = f.u8()?;
        let cols = f.u8()?;
        if rows > n_max || cols > n_max {
            return Err(Error::format(format!("shape {id} exceeds n_max {n_max}")));
        }
        let n = usize::from(rows) * usize::from(cols);
        let cells: Vec<u16> = (0..n).map(|_| f.u16()).collect::<Result<_>>()?;
        let shape = Shape::new(rows, cols, &cells).map_err(|_| Error::format(format!("shape {id} is not valid")))?;
        if u32::from(shape.max_value()) > max_value {
            return Err(Error::format(format!("shape {id} holds values above {max_value}")));
        }
        shapes.push(shape);
        lengths.push((id as u32, f.u8()?));
    }
    if shapes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::format("shapes are not in canonical order"));
    }
    let shape_code = HuffmanCode::from_lengths(&lengths)?;

    let alphabet = f.u32()?;
    if alphabet != 1u32 << interface {
        return Err(Error::format(format!("detail alphabet {alphabet} does not match interface {interface}")));
    }
    let detail_lengths: Vec<(u32, u8)> = (0..alphabet).map(|s| f.u8().map(|l| (s, l))).collect::<Result<_>>()?;
    let detail_code = HuffmanCode::from_lengths(&detail_lengths)?;
    if f.remaining() != 0 {
        return Err(Error::format("trailing bytes after codebook"));
    }
    let cb = Codebook::assemble(depth_levels, interface, n_max, golomb_m, shapes, shape_code, detail_code)?;
    if !cb.is_complete() {
        return Err(Error::format("codebook lacks single-pixel shapes"));
    }
    Ok(cb)
}

/// Candidate lookup for the greedy cover.
///
/// A multi-pixel shape is keyed by its lead value together with the offset
/// and value of its second nonzero cell in raster order. At an anchor the
/// cover probes each offset known for the anchor's value.
#[derive(Debug, Clone, Default)]
pub(crate) struct Matcher {
    /// value -> unit shape id, `u32::MAX` when absent
    pub unit: Vec<u32>,
    /// lead value -> distinct second-cell offsets
    pub probes: HashMap<u16, Vec<(i32, i32)>>,
    /// (lead value, dr, dc, second value) -> ids in priority order
    pub by_key: HashMap<(u16, i32, i32, u16), Vec<u32>>,
    /// per id: nonzero cells relative to the lead, lead first
    pub offsets: Vec<Vec<(i32, i32, u16)>>,
    pub lead_col: Vec<u32>,
    /// per id: position in the global priority order
    pub rank: Vec<u32>,
}

impl Matcher {
    fn new(shapes: &[Shape], code: &HuffmanCode, max_value: u32) -> Self {
        let mut order: Vec<u32> = (0..shapes.len() as u32).collect();
        order.sort_by_key(|&id| {
            (std::cmp::Reverse(shapes[id as usize].size()), code.length_of(id).unwrap_or(u8::MAX), id)
        });
        let mut rank = vec![0u32; shapes.len()];
        for (r, &id) in order.iter().enumerate() {
            rank[id as usize] = r as u32;
        }

        let mut m = Matcher {
            unit: vec![u32::MAX; max_value as usize + 1],
            offsets: shapes.iter().map(Shape::offsets_from_lead).collect(),
            lead_col: shapes.iter().map(|s| s.lead_col() as u32).collect(),
            rank,
            ..Matcher::default()
        };
        for &id in &order {
            let offs = &m.offsets[id as usize];
            let lead = offs[0].2;
            if offs.len() == 1 {
                if let Some(slot) = m.unit.get_mut(usize::from(lead)) {
                    *slot = id;
                }
                continue;
            }
            let (dr, dc, v) = offs[1];
            m.by_key.entry((lead, dr, dc, v)).or_default().push(id);
            let probes = m.probes.entry(lead).or_default();
            if !probes.contains(&(dr, dc)) {
                probes.push((dr, dc));
            }
        }
        m
    }
}
