//! Mine frequent shapes from a Fashion-MNIST class and look at what the
//! codebook ends up keeping.
//!
//! Run `python3 scripts/fetch_datasets.py` first if `data/` is empty.

use softcodec::codebook::{build_codebook, CodebookParams, Weighting};
use softcodec::datasets::{data_dir, fashion_splits};
use softcodec::shapes::{mine_shapes, MiningConfig};

fn main() -> softcodec::Result<()> {
    let class = fashion_splits(&data_dir(), 300, 1)?.swap_remove(7);
    let cfg = MiningConfig { interface: 4, ..MiningConfig::default() };
    let mined = mine_shapes(&class.train, &cfg)?;
    println!("{} distinct shapes kept from {} images", mined.shapes.len(), class.train.len());
    for k in 1..=4 {
        if let Some(h) = mined.shapes.size_entropy(k) {
            println!("  size {k}: entropy {h:.3} bits");
        }
    }

    let mut entries = mined.shapes.entries();
    entries.sort_by_key(|&(s, n)| std::cmp::Reverse(n * s.size() as u64));
    println!("\nheaviest shapes by count x size:\n   count  weight  shape");
    for (shape, n) in entries.iter().take(8) {
        println!("  {n:>6}  {:>6}  {shape:?}", n * shape.size() as u64);
    }

    let params = CodebookParams {
        depth_levels: 256,
        interface: cfg.interface,
        n_max: cfg.n_max as u8,
        weighting: Weighting::CountTimesSize,
        golomb_m: 1,
    };
    let cb = build_codebook(&mined.shapes, &mined.detail_counts, &params)?;
    let longest = (0..cb.shapes().len() as u32).map(|id| cb.shape_len(id)).max().unwrap_or(0);
    println!("\ncodebook: {} shapes, codewords up to {longest} bits, complete: {}", cb.shapes().len(), cb.is_complete());
    Ok(())
}
