//! Codebook training: shape mining, codebook generation and the search over
//! layer interfaces.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::codebook::{build_codebook, Codebook, CodebookParams, Weighting};
use crate::codec::{cover_shape_layer, encode_with_stats};
use crate::error::{Error, Result};
use crate::golomb::select_m;
use crate::image::{ceil_log2, Corpus};
use crate::shapes::{mine_shapes, MiningConfig, ShapeFrequencyTable};
use crate::transform::{check_interface, decompose};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterfaceChoice {
    /// Try every admissible interface and keep the one giving the smallest
    /// total frame size on the training images.
    #[default]
    Auto,
    Fixed(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainConfig {
    pub interface: InterfaceChoice,
    pub n_max: u8,
    pub prune_below: u64,
    pub keep_top: usize,
    pub weighting: Weighting,
    pub epoch: usize,
    /// Number of training images, spread evenly over the corpus, used while
    /// searching interfaces. `None` searches on the whole corpus.
    pub search_sample: Option<usize>,
    /// Rounds of re-estimating shape codewords from how often the encoder
    /// actually places each shape on the training images. Shapes that are
    /// never placed (other than single pixels) are dropped.
    pub refine_passes: usize,
    /// After refinement, drop multi-pixel shapes placed fewer than `f` times,
    /// with `f` chosen among powers of two (or infinity, leaving single
    /// pixels only) to minimize the total size of the training frames.
    pub floor_search: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            interface: InterfaceChoice::Auto,
            n_max: 4,
            prune_below: 2,
            keep_top: 4096,
            weighting: Weighting::CountTimesSize,
            epoch: 1,
            search_sample: Some(200),
            refine_passes: 2,
            floor_search: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub codebook: Codebook,
    /// `(interface, total frame bytes)` for each interface tried.
    pub search: Vec<(u8, u64)>,
    pub elapsed: Duration,
}

/// Interfaces worth trying for a depth.
pub fn candidate_interfaces(depth_levels: u32) -> Vec<u8> {
    if depth_levels == 2 {
        return vec![0];
    }
    (0..=ceil_log2(depth_levels) as u8).filter(|&l| check_interface(depth_levels, l).is_ok()).collect()
}

pub fn train(corpus: &Corpus, cfg: &TrainConfig) -> Result<TrainReport> {
    let start = Instant::now();
    let depth = corpus.depth_levels().ok_or_else(|| Error::usage("cannot train on an empty corpus"))?;
    let mut search = Vec::new();
    let interface = match cfg.interface {
        InterfaceChoice::Fixed(l) => {
            check_interface(depth, l)?;
            l
        }
        InterfaceChoice::Auto => {
            let sample = cfg.search_sample.map_or_else(|| corpus.clone(), |n| corpus.sample_evenly(n.max(1)));
            for l in candidate_interfaces(depth) {
                let cb = train_fixed(&sample, cfg, l)?;
                search.push((l, trial_bytes(&sample, &cb)?));
            }
            search.iter().min_by_key(|&&(l, bytes)| (bytes, l)).expect("at least one candidate").0
        }
    };
    let codebook = train_fixed(corpus, cfg, interface)?;
    Ok(TrainReport { codebook, search, elapsed: start.elapsed() })
}

/// Mine, build, and set the fallback Golomb parameter from a trial encode.
pub fn train_fixed(corpus: &Corpus, cfg: &TrainConfig, interface: u8) -> Result<Codebook> {
    let depth = corpus.depth_levels().ok_or_else(|| Error::usage("cannot train on an empty corpus"))?;
    let mining = MiningConfig {
        interface,
        n_max: usize::from(cfg.n_max),
        prune_below: cfg.prune_below,
        keep_top: cfg.keep_top,
        epoch: cfg.epoch,
    };
    let mined = mine_shapes(corpus, &mining)?;
    let params = CodebookParams {
        depth_levels: depth,
        interface,
        n_max: cfg.n_max,
        weighting: cfg.weighting,
        golomb_m: 1,
    };
    let mut cb = build_codebook(&mined.shapes, &mined.detail_counts, &params)?;
    let usage_params = CodebookParams { weighting: Weighting::Count, ..params };
    for _ in 0..cfg.refine_passes {
        let usage = placement_counts(corpus, &cb)?;
        cb = build_codebook(&usage, &mined.detail_counts, &usage_params)?;
    }
    if cfg.floor_search {
        let usage = placement_counts(corpus, &cb)?;
        let top = usage.entries().iter().filter(|(s, _)| !s.is_unit()).map(|e| e.1).max().unwrap_or(0);
        let mut best: Option<(u64, Codebook)> = None;
        let floors = (0..64).map(|i| 1u64 << i).take_while(|&f| f <= top).chain([u64::MAX]);
        for floor in floors {
            let mut cand = build_codebook(&with_floor(&usage, floor), &mined.detail_counts, &usage_params)?;
            let recount = placement_counts(corpus, &cand)?;
            cand = build_codebook(&recount, &mined.detail_counts, &usage_params)?;
            let bytes = trial_bytes(corpus, &cand)?;
            if best.as_ref().is_none_or(|(b, _)| bytes < *b) {
                best = Some((bytes, cand));
            }
        }
        cb = best.expect("at least one floor").1;
    }
    let deltas: Vec<u64> = corpus
        .images()
        .par_iter()
        .map(|img| encode_with_stats(img, &cb).map(|(_, s)| s.deltas))
        .collect::<Result<Vec<_>>>()?
        .concat();
    cb.with_golomb_m(select_m(&deltas).m())
}

/// How often each shape is placed when covering the corpus with `cb`.
pub fn placement_counts(corpus: &Corpus, cb: &Codebook) -> Result<ShapeFrequencyTable> {
    let per_image = corpus
        .images()
        .par_iter()
        .map(|img| {
            let layers = decompose(img, cb.interface())?.layers;
            cover_shape_layer(&layers.shape_layer, cb)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut counts = vec![0u64; cb.shapes().len()];
    for t in per_image.iter().flatten() {
        counts[t.shape_id as usize] += 1;
    }
    let mut table = ShapeFrequencyTable::new();
    for (shape, n) in cb.shapes().iter().zip(counts) {
        if n > 0 {
            table.add(shape.clone(), n);
        }
    }
    Ok(table)
}

/// Single-pixel shapes plus the multi-pixel shapes placed at least `floor` times.
fn with_floor(usage: &ShapeFrequencyTable, floor: u64) -> ShapeFrequencyTable {
    let mut out = ShapeFrequencyTable::new();
    for (shape, n) in usage.entries() {
        if shape.is_unit() || n >= floor {
            out.add(shape.clone(), n);
        }
    }
    out
}

/// Total frame bytes when every image of `corpus` is encoded with `cb`.
pub fn trial_bytes(corpus: &Corpus, cb: &Codebook) -> Result<u64> {
    let sizes = corpus
        .images()
        .par_iter()
        .map(|img| encode_with_stats(img, cb).map(|(f, _)| f.byte_len() as u64))
        .collect::<Result<Vec<_>>>()?;
    Ok(sizes.iter().sum())
}
