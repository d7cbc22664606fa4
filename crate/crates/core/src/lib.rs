//! Lossless image compression with trained shape codebooks.
//!
//! An image is run through a median edge predictor, the residuals are folded
//! to nonnegative values and split into a sparse shape layer and a dense
//! detail layer. The shape layer is covered by shapes from a trained codebook
//! and stored as (location, shape) records; the detail layer is Huffman coded.

pub mod analysis;
pub mod baselines;
pub mod bench;
pub mod bits;
pub mod codebook;
pub mod codec;
pub mod datasets;
pub mod error;
pub mod golomb;
pub mod huffman;
pub mod idx;
pub mod image;
pub mod info;
pub mod netpbm;
pub mod shapes;
pub mod train;
pub mod transform;
mod wire;

pub use error::{Error, Result};
pub use image::{Corpus, Image, MultiComponentImage, ResidualPlane};
