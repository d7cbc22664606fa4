//! A single codebook trained on all Fashion-MNIST classes, compared with a
//! global pixel Huffman code and predictive Golomb coding.

use softcodec::bench::shared_comparison;
use softcodec::datasets::{data_dir, fashion_splits};
use softcodec::train::TrainConfig;

fn main() -> softcodec::Result<()> {
    let splits = fashion_splits(&data_dir(), 1000, 200)?;
    let cmp = shared_comparison(&splits, &TrainConfig::default())?;
    print!("{}", cmp.render());
    let beats = |other: &[f64]| cmp.soft.iter().zip(other).filter(|(s, o)| s > o).count();
    println!(
        "shape coding wins {}/10 against Huffman and {}/10 against predictive Golomb",
        beats(&cmp.huffman),
        beats(&cmp.predictive_golomb)
    );
    Ok(())
}
