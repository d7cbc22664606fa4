//! Code the three planes of a color picture, each with its own codebook, and
//! pack them into one container.

use softcodec::codec::{decode_multi, encode_multi, pack_frames, unpack_frames};
use softcodec::train::{train, InterfaceChoice, TrainConfig};
use softcodec::{Corpus, Image, MultiComponentImage};

/// A smooth test card whose channels drift at different rates.
fn card(h: usize, w: usize, phase: usize) -> MultiComponentImage {
    let plane = |k: usize| {
        let px = (0..h * w)
            .map(|i| {
                let (r, c) = (i / w, i % w);
                (((r * k + c + phase) / 3) % 64 * 4 + if (r / 8 + c / 8) % 2 == 0 { 0 } else { 2 }) as u16
            })
            .collect();
        Image::new(h, w, 256, px).expect("values stay below 256")
    };
    let labels = ["R", "G", "B"].map(String::from).to_vec();
    MultiComponentImage::new(vec![plane(1), plane(2), plane(3)], labels).expect("equal planes")
}

fn main() -> softcodec::Result<()> {
    let training: Vec<MultiComponentImage> = (0..8).map(|p| card(32, 32, p * 5)).collect();
    let cfg = TrainConfig { interface: InterfaceChoice::Fixed(1), ..TrainConfig::default() };
    let codebooks = (0..3)
        .map(|k| {
            let plane = training.iter().map(|m| m.components()[k].clone()).collect();
            Ok(train(&Corpus::new(plane, None)?, &cfg)?.codebook)
        })
        .collect::<softcodec::Result<Vec<_>>>()?;

    let picture = card(32, 32, 17);
    let frames = encode_multi(&picture, &codebooks)?;
    for (label, f) in picture.labels().iter().zip(&frames) {
        println!("{label}: {} bytes", f.byte_len());
    }
    let packed = pack_frames(&frames)?;
    let restored = decode_multi(&unpack_frames(&packed)?, &codebooks)?;
    assert_eq!(restored.as_slice(), picture.components());
    println!("container: {} bytes for {} raw bytes, lossless", packed.len(), 3 * 32 * 32);
    Ok(())
}
