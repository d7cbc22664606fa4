//! Reference coders: Huffman over raw pixel values, and median-edge
//! prediction followed by Golomb coding of the mapped residuals.
//!
//! Both report bit counts that include the soft-compression frame header, so
//! ratios line up with frame sizes.

use crate::codec::FRAME_HEADER_BYTES;
use crate::error::{Error, Result};
use crate::golomb::select_m;
use crate::huffman::HuffmanCode;
use crate::image::{Corpus, Image};
use crate::transform::predict;

pub const HEADER_BITS: u64 = FRAME_HEADER_BYTES as u64 * 8;

/// Pixel-value Huffman code over `[0, D - 1]` with add-one smoothing, so it
/// covers every value an image of that depth can hold.
pub fn train_pixel_code(corpus: &Corpus) -> Result<HuffmanCode> {
    let depth = corpus.depth_levels().ok_or_else(|| Error::usage("cannot train on an empty corpus"))?;
    let mut counts = vec![1u64; depth as usize];
    for img in corpus.images() {
        for (acc, n) in counts.iter_mut().zip(img.histogram()) {
            *acc += n;
        }
    }
    HuffmanCode::from_counts(&counts)
}

/// Bits spent by the pixel Huffman code on `img`, header included.
pub fn huffman_baseline(img: &Image, code: &HuffmanCode) -> Result<u64> {
    let hist = img.histogram();
    let payload = code.cost(hist.iter().enumerate().map(|(v, &n)| (v as u32, n)).filter(|&(_, n)| n > 0))?;
    Ok(payload + HEADER_BITS)
}

/// Bits spent by predictive Golomb coding on `img`, header included. The
/// divisor is chosen per image.
pub fn predictive_golomb_baseline(img: &Image) -> u64 {
    let residuals: Vec<u64> = predict(img).values().iter().map(|&v| u64::from(v)).collect();
    select_m(&residuals).total_len(&residuals) + HEADER_BITS
}
