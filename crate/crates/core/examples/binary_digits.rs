//! Binarized MNIST digits under one shared codebook: compression ratio
//! against the compressibility indicator for each digit.

use softcodec::bench::{shared_comparison, spearman};
use softcodec::datasets::{data_dir, mnist_binary_splits};
use softcodec::train::TrainConfig;

fn main() -> softcodec::Result<()> {
    let splits = mnist_binary_splits(&data_dir(), usize::MAX, 500)?;
    let cmp = shared_comparison(&splits, &TrainConfig::default())?;
    println!("digit  CIV    ratio");
    for i in 0..cmp.labels.len() {
        println!("{:>5}  {:.3}  {:.3}", cmp.labels[i], cmp.civ[i], cmp.soft[i]);
    }
    println!("rank correlation: {:.3}", spearman(&cmp.civ, &cmp.soft));
    Ok(())
}
