//! Encode test images with a trained codebook, check the round trip and show
//! where the bits go.

use softcodec::codec::{decode, encode_with_stats, measure_ratio, CompressedFrame};
use softcodec::datasets::{data_dir, fashion_splits};
use softcodec::train::{train, TrainConfig};

fn main() -> softcodec::Result<()> {
    let split = fashion_splits(&data_dir(), 500, 5)?.swap_remove(1);
    let cb = train(&split.train, &TrainConfig::default())?.codebook;
    println!("codebook: l={}, {} shapes\n", cb.interface(), cb.shapes().len());
    println!("image  bytes  ratio  placements  location  codewords  detail");
    for (i, img) in split.test.images().iter().enumerate() {
        let (frame, stats) = encode_with_stats(img, &cb)?;
        let bytes = frame.to_bytes();
        let back = decode(&CompressedFrame::from_bytes(&bytes)?, &cb)?;
        assert_eq!(&back, img, "lossless round trip");
        println!(
            "{i:>5}  {:>5}  {:>5.2}  {:>10}  {:>8}  {:>9}  {:>6}",
            bytes.len(),
            measure_ratio(img, &frame),
            stats.triplets,
            stats.location_bits,
            stats.codeword_bits,
            stats.detail_bits
        );
    }
    Ok(())
}
