//! Train a codebook on one Fashion-MNIST class with the automatic interface
//! search and save it to disk.
//!
//! `cargo run --release --example train_codebook -- [class] [out.scb]`

use std::path::PathBuf;

use softcodec::datasets::{data_dir, fashion_splits};
use softcodec::train::{train, TrainConfig};

fn main() -> softcodec::Result<()> {
    let mut args = std::env::args().skip(1);
    let class: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let out = args.next().map_or_else(|| std::env::temp_dir().join("fashion.scb"), PathBuf::from);

    let split = fashion_splits(&data_dir(), 1000, 0)?.swap_remove(class);
    let report = train(&split.train, &TrainConfig::default())?;
    println!("interface  trial bytes");
    for (l, bytes) in &report.search {
        println!("{l:>9}  {bytes}");
    }
    let cb = &report.codebook;
    println!(
        "chose l={} with {} shapes, golomb m={}, trained in {:.1?}",
        cb.interface(),
        cb.shapes().len(),
        cb.golomb_m(),
        report.elapsed
    );
    cb.save(&out)?;
    println!("wrote {} ({} bytes)", out.display(), cb.to_bytes().len());
    Ok(())
}
