//! Shapes and corpus shape mining.
//!
//! A shape is a small block of shape-layer values. Zero cells are not part of
//! the shape. A block qualifies when every row has at least half of its cells
//! nonzero and every column has at least half of its cells nonzero, which
//! also forces a tight bounding box.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::image::{Corpus, ResidualPlane};
use crate::info::entropy_of;
use crate::transform::decompose;

pub type Cells = SmallVec<[u16; 16]>;

/// Largest supported bounding-box side.
pub const MAX_SHAPE_DIM: u8 = 16;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shape {
    rows: u8,
    cols: u8,
    cells: Cells,
}

impl Shape {
    pub fn new(rows: u8, cols: u8, cells: &[u16]) -> Result<Self> {
        if rows == 0 || cols == 0 || rows > MAX_SHAPE_DIM || cols > MAX_SHAPE_DIM {
            return Err(Error::usage(format!("shape dimensions {rows}x{cols} out of range")));
        }
        if cells.len() != usize::from(rows) * usize::from(cols) {
            return Err(Error::usage("shape cell count does not match dimensions"));
        }
        if !is_valid_shape(usize::from(rows), usize::from(cols), cells) {
            return Err(Error::usage("cells do not form a valid shape"));
        }
        Ok(Shape { rows, cols, cells: Cells::from_slice(cells) })
    }

    /// The single-pixel shape with the given value.
    pub fn unit(value: u16) -> Self {
        assert!(value != 0, "unit shape needs a nonzero value");
        Shape { rows: 1, cols: 1, cells: Cells::from_slice(&[value]) }
    }

    pub fn rows(&self) -> usize {
        usize::from(self.rows)
    }

    pub fn cols(&self) -> usize {
        usize::from(self.cols)
    }

    pub fn cells(&self) -> &[u16] {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> u16 {
        self.cells[row * self.cols() + col]
    }

    /// Number of nonzero cells.
    pub fn size(&self) -> usize {
        self.cells.iter().filter(|&&v| v != 0).count()
    }

    pub fn is_unit(&self) -> bool {
        self.cells.len() == 1
    }

    pub fn max_value(&self) -> u16 {
        self.cells.iter().copied().max().unwrap_or(0)
    }

    /// Column of the first nonzero cell in the top row.
    pub fn lead_col(&self) -> usize {
        self.cells[..self.cols()].iter().position(|&v| v != 0).expect("valid shapes have a nonzero top row")
    }

    /// Nonzero cells as `(row offset, column offset, value)` relative to the
    /// lead cell, in raster order; the lead itself comes first.
    pub fn offsets_from_lead(&self) -> Vec<(i32, i32, u16)> {
        let lead = self.lead_col() as i32;
        let cols = self.cols();
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, &v)| ((i / cols) as i32, (i % cols) as i32 - lead, v))
            .collect()
    }
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Shape{}x{}[", self.rows, self.cols)?;
        for (r, row) in self.cells.chunks(self.cols()).enumerate() {
            if r > 0 {
                write!(f, "; ")?;
            }
            let parts: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", parts.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Row/column density test: each row needs at least `ceil(cols / 2)` nonzero
/// cells and each column at least `ceil(rows / 2)`.
pub fn is_valid_shape(rows: usize, cols: usize, cells: &[u16]) -> bool {
    if rows == 0 || cols == 0 || cells.len() != rows * cols {
        return false;
    }
    let need_row = cols.div_ceil(2);
    let need_col = rows.div_ceil(2);
    let rows_ok = cells.chunks(cols).all(|row| row.iter().filter(|&&v| v != 0).count() >= need_row);
    rows_ok && (0..cols).all(|c| (0..rows).filter(|&r| cells[r * cols + c] != 0).count() >= need_col)
}

/// Occurrence counts of shapes over a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ShapeFrequencyTable {
    counts: HashMap<Shape, u64>,
    images_scanned: usize,
}

impl ShapeFrequencyTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn images_scanned(&self) -> usize {
        self.images_scanned
    }

    pub fn count(&self, shape: &Shape) -> u64 {
        self.counts.get(shape).copied().unwrap_or(0)
    }

    pub fn add(&mut self, shape: Shape, n: u64) {
        *self.counts.entry(shape).or_insert(0) += n;
    }

    /// Entries sorted by shape.
    pub fn entries(&self) -> Vec<(&Shape, u64)> {
        let mut v: Vec<_> = self.counts.iter().map(|(s, &c)| (s, c)).collect();
        v.sort_unstable_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn merge(&mut self, other: ShapeFrequencyTable) {
        for (s, c) in other.counts {
            self.add(s, c);
        }
        self.images_scanned += other.images_scanned;
    }

    /// Count every window of the layer whose content is a valid shape.
    pub fn scan_layer(&mut self, layer: &ResidualPlane, n_max: usize) {
        for_each_window_shape(layer, n_max, |shape| self.add(shape, 1));
        self.images_scanned += 1;
    }

    /// When the table holds more than `keep_top` entries, drop multi-pixel
    /// shapes seen fewer than `prune_below` times. If that is not enough, the
    /// count threshold is raised until the table fits. Single-pixel shapes are
    /// never dropped.
    pub fn prune(&mut self, prune_below: u64, keep_top: usize) {
        if self.counts.len() <= keep_top {
            return;
        }
        self.counts.retain(|s, &mut c| s.is_unit() || c >= prune_below);
        if self.counts.len() <= keep_top {
            return;
        }
        let units = self.counts.keys().filter(|s| s.is_unit()).count();
        let room = keep_top.saturating_sub(units);
        let mut multi: Vec<u64> = self.counts.iter().filter(|(s, _)| !s.is_unit()).map(|(_, &c)| c).collect();
        multi.sort_unstable_by(|a, b| b.cmp(a));
        // smallest threshold keeping at most `room` multi-pixel shapes
        let threshold = if room == 0 { u64::MAX } else if room >= multi.len() { 0 } else { multi[room] + 1 };
        self.counts.retain(|s, &mut c| s.is_unit() || c >= threshold);
    }

    /// Plug-in entropy of the shapes of a given size, weighted by count.
    pub fn size_entropy(&self, size: usize) -> Option<f64> {
        let counts: Vec<u64> =
            self.entries().into_iter().filter(|(s, _)| s.size() == size).map(|(_, c)| c).collect();
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return None;
        }
        let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
        Some(entropy_of(&probs))
    }
}

/// Visit the content of every window up to `n_max x n_max` that forms a
/// valid shape. Windows overlap.
pub fn for_each_window_shape<F: FnMut(Shape)>(layer: &ResidualPlane, n_max: usize, mut visit: F) {
    let (h, w) = (layer.height(), layer.width());
    let values = layer.values();
    let mut buf: Cells = Cells::new();
    for top in 0..h {
        for left in 0..w {
            for rows in 1..=n_max.min(h - top) {
                for cols in 1..=n_max.min(w - left) {
                    buf.clear();
                    let mut ok = true;
                    let need_row = cols.div_ceil(2);
                    for r in 0..rows {
                        let row = &values[(top + r) * w + left..(top + r) * w + left + cols];
                        let mut nz = 0;
                        for &v in row {
                            if v != 0 {
                                nz += 1;
                            }
                            debug_assert!(v <= u32::from(u16::MAX));
                            buf.push(v as u16);
                        }
                        if nz < need_row {
                            ok = false;
                            break;
                        }
                    }
                    if !ok {
                        continue;
                    }
                    let need_col = rows.div_ceil(2);
                    if (0..cols).all(|c| (0..rows).filter(|&r| buf[r * cols + c] != 0).count() >= need_col) {
                        visit(Shape { rows: rows as u8, cols: cols as u8, cells: buf.clone() });
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MiningConfig {
    pub interface: u8,
    pub n_max: usize,
    pub prune_below: u64,
    pub keep_top: usize,
    /// Images counted between pruning passes. Images inside one epoch may be
    /// scanned concurrently; the result does not depend on the thread count.
    pub epoch: usize,
}

impl Default for MiningConfig {
    fn default() -> Self {
        MiningConfig { interface: 0, n_max: 4, prune_below: 2, keep_top: 4096, epoch: 1 }
    }
}

/// Result of a mining pass: shape counts plus the detail-layer histogram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinedCorpus {
    pub shapes: ShapeFrequencyTable,
    pub detail_counts: Vec<u64>,
}

pub fn mine_shapes(corpus: &Corpus, cfg: &MiningConfig) -> Result<MinedCorpus> {
    if corpus.is_empty() {
        return Err(Error::usage("cannot mine shapes from an empty corpus"));
    }
    if cfg.n_max == 0 || cfg.n_max > usize::from(MAX_SHAPE_DIM) {
        return Err(Error::usage(format!("n_max must be in [1, {MAX_SHAPE_DIM}]")));
    }
    if cfg.interface >= 32 {
        return Err(Error::usage("layer interface too large"));
    }
    let epoch = cfg.epoch.max(1);
    let mut table = ShapeFrequencyTable::new();
    let mut detail_counts = vec![0u64; 1usize << cfg.interface];

    for chunk in corpus.images().chunks(epoch) {
        let scan = |img| -> Result<(ShapeFrequencyTable, Vec<u64>)> {
            let layers = decompose(img, cfg.interface)?.layers;
            let mut t = ShapeFrequencyTable::new();
            t.scan_layer(&layers.shape_layer, cfg.n_max);
            let mut d = vec![0u64; 1usize << cfg.interface];
            for &v in layers.detail_layer.values() {
                d[v as usize] += 1;
            }
            Ok((t, d))
        };
        let parts: Vec<_> = if chunk.len() > 1 {
            chunk.par_iter().map(scan).collect::<Result<_>>()?
        } else {
            chunk.iter().map(scan).collect::<Result<_>>()?
        };
        for (t, d) in parts {
            table.merge(t);
            for (acc, v) in detail_counts.iter_mut().zip(d) {
                *acc += v;
            }
        }
        table.prune(cfg.prune_below, cfg.keep_top);
    }
    Ok(MinedCorpus { shapes: table, detail_counts })
}
