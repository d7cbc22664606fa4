//! Independent reference implementations and generators shared by the
//! integration tests and the acceptance run.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use softcodec::bits::{bits_from_str, BitReader};
use softcodec::codebook::{build_codebook, Codebook, CodebookParams, Weighting};
use softcodec::codec::{decode, encode, CompressedFrame};
use softcodec::golomb::GolombParameter;
use softcodec::huffman::HuffmanCode;
use softcodec::info::{
    civ, civ_derivative, conditional_residual_entropy, predicted_relative_ratio, soft_bits_order_n_bound,
    soft_bits_order_one, IntensityDistribution,
};
use softcodec::shapes::{is_valid_shape, Shape, ShapeFrequencyTable};
use softcodec::train::{candidate_interfaces, train_fixed, TrainConfig};
use softcodec::transform::max_shape_value;
use softcodec::{Corpus, Image};

pub const THEORY_TOLERANCE: f64 = 1e-9;

// ---------------------------------------------------------------- entropy

/// `-sum p ln p / ln 2`, written independently of the library.
pub fn entropy_oracle(probs: &[f64]) -> f64 {
    -probs.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum::<f64>() / std::f64::consts::LN_2
}

pub fn binary_entropy_oracle(p: f64) -> f64 {
    entropy_oracle(&[p, 1.0 - p])
}

/// Random distribution over `len` symbols; some entries are zero and `p0`
/// ranges over the whole of `[0, 1)`.
pub fn random_distribution(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..len).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen::<f64>() }).collect();
    if rng.gen_bool(0.5) {
        w[0] *= rng.gen_range(1.0..200.0);
    }
    if w[1..].iter().all(|&x| x == 0.0) {
        w[len - 1] = rng.gen_range(0.01..1.0);
    }
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

/// Runs the theory suite on `instances` random draws per statement and
/// returns a description of the first violation.
pub fn theory_suite(rng: &mut ChaCha8Rng, instances: usize) -> Result<(), String> {
    let tol = THEORY_TOLERANCE;
    for i in 0..instances {
        // nonnegativity, agreement with H(p)/(1-p)
        let p: f64 = if i % 10 == 0 { 1.0 - rng.gen_range(1e-6..1e-2) } else { rng.gen_range(0.0..1.0) };
        let c = civ(p).map_err(|e| e.to_string())?;
        if c < 0.0 {
            return Err(format!("C({p}) = {c} is negative"));
        }
        let expect = binary_entropy_oracle(p) / (1.0 - p);
        if (c - expect).abs() > tol * expect.max(1.0) {
            return Err(format!("C({p}) = {c}, oracle {expect}"));
        }

        // monotonicity, directly and through the derivative
        let q: f64 = rng.gen_range(0.0..1.0 - 1e-6);
        let (lo, hi) = if p < q { (p, q) } else { (q, p) };
        let (c_lo, c_hi) = (civ(lo).unwrap(), civ(hi).unwrap());
        if c_lo > c_hi + tol {
            return Err(format!("C({lo}) = {c_lo} > C({hi}) = {c_hi}"));
        }
        let x = rng.gen_range(1e-3..1.0 - 1e-3);
        let h = 1e-6;
        let slope = (civ(x + h).unwrap() - civ(x - h).unwrap()) / (2.0 * h);
        let d = civ_derivative(x).unwrap();
        if slope < -tol || d < 0.0 {
            return Err(format!("C decreases near {x}: slope {slope}, derivative {d}"));
        }
        if (slope - d).abs() > 1e-4 * d.max(1.0) {
            return Err(format!("C'({x}) = {d} disagrees with finite difference {slope}"));
        }

        // H(Y) from the decomposition equals the entropy of the renormalized tail
        let len = rng.gen_range(2..=16);
        let probs = random_distribution(rng, len);
        let dist = IntensityDistribution::new(probs.clone()).map_err(|e| e.to_string())?;
        let hy = conditional_residual_entropy(&dist).map_err(|e| e.to_string())?;
        let rest = 1.0 - probs[0];
        let tail: Vec<f64> = probs[1..].iter().map(|p| p / rest).collect();
        let hy_oracle = entropy_oracle(&tail);
        if (hy - hy_oracle).abs() > tol {
            return Err(format!("H(Y) = {hy}, tail entropy {hy_oracle} for {probs:?}"));
        }

        // R' - 1 has the sign of C(p) - L_W
        let hx = entropy_oracle(&probs);
        if hx > 0.0 {
            let c = binary_entropy_oracle(probs[0]) / rest;
            let lw = if rng.gen_bool(0.1) { c } else { rng.gen_range(0.0..12.0) };
            let r = predicted_relative_ratio(&dist, lw).map_err(|e| e.to_string())?;
            let r_oracle = 1.0 + rest * (c - lw) / hx;
            if (r - r_oracle).abs() > tol * r_oracle.abs().max(1.0) {
                return Err(format!("R' = {r}, oracle {r_oracle}"));
            }
            let gap = c - lw;
            if gap.abs() > tol && (r - 1.0).signum() != gap.signum() {
                return Err(format!("sign(R' - 1) != sign(C - L_W): R' = {r}, C = {c}, L_W = {lw}"));
            }
        }

        // larger shapes never cost more than single pixels once H(Y_k) <= k H(Y)
        let n = rng.gen_range(1..=16);
        let counts: Vec<u64> = (0..n).map(|_| if rng.gen_bool(0.3) { 0 } else { rng.gen_range(0..5000) }).collect();
        let lw = rng.gen_range(0.0..20.0);
        let order_n = soft_bits_order_n_bound(&counts, hy_oracle, lw);
        let order_one = soft_bits_order_one(&counts, hy_oracle, lw);
        let nonzero: u64 = counts.iter().enumerate().map(|(k, &c)| (k as u64 + 1) * c).sum();
        let n_oracle: f64 = counts.iter().enumerate().map(|(k, &c)| c as f64 * ((k + 1) as f64 * hy_oracle + lw)).sum();
        let one_oracle = nonzero as f64 * (hy_oracle + lw);
        if (order_n - n_oracle).abs() > tol * n_oracle.max(1.0) || (order_one - one_oracle).abs() > tol * one_oracle.max(1.0) {
            return Err(format!("shape cost sums disagree for {counts:?}"));
        }
        if order_n > order_one + tol * order_one.max(1.0) {
            return Err(format!("order-n cost {order_n} exceeds order-one cost {order_one} for {counts:?}"));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- coders

/// Golomb codeword as a bit string, following the textbook steps.
pub fn golomb_reference(delta: u64, m: u64) -> String {
    let (q, r) = (delta / m, delta % m);
    let mut s = "1".repeat(q as usize);
    s.push('0');
    let mut k = 0;
    while (1u64 << k) < m {
        k += 1;
    }
    let c = (1u64 << k) - m;
    let (value, width) = if r < c { (r, k - 1) } else { (r + c, k) };
    for bit in (0..width).rev() {
        s.push(if value >> bit & 1 == 1 { '1' } else { '0' });
    }
    s
}

/// Smallest total cost `sum counts[i] * len[i]` over complete prefix codes,
/// by enumerating every length vector that meets Kraft's equality.
pub fn brute_force_huffman_cost(counts: &[u64]) -> u64 {
    let n = counts.len();
    if n == 1 {
        return counts[0];
    }
    let max_len = n - 1;
    let full = 1u64 << max_len;
    let mut best = u64::MAX;
    let mut lens = vec![1usize; n];
    loop {
        let kraft: u64 = lens.iter().map(|&l| full >> l).sum();
        if kraft == full {
            best = best.min(lens.iter().zip(counts).map(|(&l, &c)| l as u64 * c).sum());
        }
        let mut i = 0;
        while i < n && lens[i] == max_len {
            lens[i] = 1;
            i += 1;
        }
        if i == n {
            return best;
        }
        lens[i] += 1;
    }
}

/// True when no codeword is a prefix of another.
pub fn is_prefix_free(words: &[String]) -> bool {
    words.iter().enumerate().all(|(i, a)| words.iter().enumerate().all(|(j, b)| i == j || !b.starts_with(a.as_str())))
}

/// Exhaustive Golomb checks, the worked vectors and Huffman optimality on
/// small alphabets.
pub fn coder_oracles(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut golomb_cases = 0;
    for m in 1..=16u32 {
        let param = GolombParameter::new(m).unwrap();
        for delta in 0..=1000u64 {
            let mut w = softcodec::bits::BitWriter::new();
            param.encode(delta, &mut w);
            let expect = golomb_reference(delta, u64::from(m));
            if w.bit_string() != expect {
                return Err(format!("m={m} delta={delta}: {} vs reference {expect}", w.bit_string()));
            }
            let (bytes, len) = w.finish();
            let mut r = BitReader::with_bit_len(&bytes, len).unwrap();
            let back = param.decode(&mut r).map_err(|e| e.to_string())?;
            if back != delta || r.remaining() != 0 {
                return Err(format!("m={m} delta={delta} decoded as {back}"));
            }
            golomb_cases += 1;
        }
    }
    for (m, delta, bits) in [(4u32, 9u64, "11001"), (3, 4, "1010"), (1, 0, "0")] {
        let p = GolombParameter::new(m).unwrap();
        let mut w = softcodec::bits::BitWriter::new();
        p.encode(delta, &mut w);
        if w.bit_string() != bits {
            return Err(format!("m={m} delta={delta} encoded as {}", w.bit_string()));
        }
        let (bytes, len) = bits_from_str(bits);
        let mut r = BitReader::with_bit_len(&bytes, len).unwrap();
        if p.decode(&mut r).map_err(|e| e.to_string())? != delta {
            return Err(format!("{bits} with m={m} does not decode to {delta}"));
        }
    }

    let mut huffman_cases = 0;
    for _ in 0..3000 {
        let n = rng.gen_range(1..=6);
        let counts: Vec<u64> = (0..n).map(|_| rng.gen_range(1..60)).collect();
        let code = HuffmanCode::from_counts(&counts).map_err(|e| e.to_string())?;
        let cost: u64 = counts.iter().enumerate().map(|(s, &c)| u64::from(code.length_of(s as u32).unwrap()) * c).sum();
        let best = brute_force_huffman_cost(&counts);
        if cost != best {
            return Err(format!("Huffman cost {cost} for {counts:?}, optimum {best}"));
        }
        huffman_cases += 1;
    }
    Ok(format!("{golomb_cases} Golomb round trips, 3 worked vectors, {huffman_cases} Huffman alphabets"))
}

// ---------------------------------------------------------------- images

pub const FUZZ_DEPTHS: [u32; 12] = [2, 3, 4, 5, 16, 17, 255, 256, 1000, 4096, 40000, 65536];

#[derive(Debug, Clone, Copy)]
pub enum Texture {
    Noise,
    Sparse(f64),
    Ramp,
    Constant,
    Tiles,
}

pub fn random_texture(rng: &mut ChaCha8Rng) -> Texture {
    match rng.gen_range(0..5) {
        0 => Texture::Noise,
        1 => Texture::Sparse(rng.gen_range(0.0..1.0)),
        2 => Texture::Ramp,
        3 => Texture::Constant,
        _ => Texture::Tiles,
    }
}

pub fn random_image(rng: &mut ChaCha8Rng, h: usize, w: usize, depth: u32, texture: Texture) -> Image {
    let top = depth - 1;
    let px: Vec<u16> = match texture {
        Texture::Noise => (0..h * w).map(|_| rng.gen_range(0..=top) as u16).collect(),
        Texture::Sparse(p0) => (0..h * w)
            .map(|_| if rng.gen_bool(p0) { 0 } else { rng.gen_range(0..=top) as u16 })
            .collect(),
        Texture::Ramp => {
            let step = rng.gen_range(1..=4u32);
            (0..h * w)
                .map(|i| {
                    let v = ((i / w + i % w) as u32 * step + rng.gen_range(0..=1)) % depth;
                    v as u16
                })
                .collect()
        }
        Texture::Constant => vec![rng.gen_range(0..=top) as u16; h * w],
        Texture::Tiles => {
            let tile: Vec<u16> = (0..9).map(|_| if rng.gen_bool(0.5) { 0 } else { rng.gen_range(0..=top) as u16 }).collect();
            (0..h * w).map(|i| tile[(i / w) % 3 * 3 + (i % w) % 3]).collect()
        }
    };
    Image::new(h, w, depth, px).expect("generated pixels are in range")
}

/// Codebook over a random table of valid shapes, always complete.
pub fn random_codebook(rng: &mut ChaCha8Rng, depth: u32, interface: u8) -> Codebook {
    let max = max_shape_value(depth, interface).max(1);
    let mut table = ShapeFrequencyTable::new();
    for _ in 0..rng.gen_range(0..60) {
        let (rows, cols) = (rng.gen_range(1..=4u8), rng.gen_range(1..=4u8));
        let small = rng.gen_bool(0.7);
        let cells: Vec<u16> = (0..usize::from(rows) * usize::from(cols))
            .map(|_| {
                if rng.gen_bool(0.25) {
                    0
                } else if small {
                    rng.gen_range(1..=max.min(3)) as u16
                } else {
                    rng.gen_range(1..=max) as u16
                }
            })
            .collect();
        if is_valid_shape(rows.into(), cols.into(), &cells) {
            table.add(Shape::new(rows, cols, &cells).unwrap(), rng.gen_range(1..1000));
        }
    }
    let detail: Vec<u64> = (0..1usize << interface).map(|_| rng.gen_range(0..50)).collect();
    let params = CodebookParams {
        depth_levels: depth,
        interface,
        n_max: 4,
        weighting: *[Weighting::Count, Weighting::CountTimesSize].choose(rng).unwrap(),
        golomb_m: rng.gen_range(1..=64),
    };
    build_codebook(&table, &detail, &params).expect("random table is within limits")
}

pub fn random_interface(rng: &mut ChaCha8Rng, depth: u32) -> u8 {
    *candidate_interfaces(depth).choose(rng).unwrap()
}

/// Cheap training for fuzzing: no refinement passes.
pub fn quick_codebook(corpus: &Corpus, interface: u8) -> Codebook {
    let cfg = TrainConfig { refine_passes: 0, floor_search: false, keep_top: 512, ..TrainConfig::default() };
    train_fixed(corpus, &cfg, interface).expect("training on generated images")
}

/// Encode, serialize, parse and decode through serialized codebooks.
pub fn round_trip(img: &Image, cb: &Codebook) -> Result<(), String> {
    let frame = encode(img, cb).map_err(|e| format!("encode: {e}"))?;
    let bytes = frame.to_bytes();
    let parsed = CompressedFrame::from_bytes(&bytes).map_err(|e| format!("parse: {e}"))?;
    let cb2 = Codebook::from_bytes(&cb.to_bytes()).map_err(|e| format!("codebook: {e}"))?;
    let back = decode(&parsed, &cb2).map_err(|e| format!("decode: {e}"))?;
    if &back != img {
        return Err(format!("{}x{} D={} image differs after decoding", img.height(), img.width(), img.depth_levels()));
    }
    Ok(())
}

/// `count` random images in groups that share a depth and a codebook, which
/// is either random or trained on the group. Returns how many round-tripped.
pub fn fuzz_round_trips(rng: &mut ChaCha8Rng, count: usize) -> Result<usize, String> {
    let mut done = 0;
    while done < count {
        let depth = *FUZZ_DEPTHS.choose(rng).unwrap();
        let interface = random_interface(rng, depth);
        let group = rng.gen_range(1..=10).min(count - done);
        let images: Vec<Image> = (0..group)
            .map(|_| {
                let (h, w) = (rng.gen_range(1..=40), rng.gen_range(1..=40));
                let texture = random_texture(rng);
                random_image(rng, h, w, depth, texture)
            })
            .collect();
        let cb = if rng.gen_bool(0.5) {
            random_codebook(rng, depth, interface)
        } else {
            quick_codebook(&Corpus::new(images.clone(), None).unwrap(), interface)
        };
        for img in &images {
            round_trip(img, &cb).map_err(|e| format!("D={depth} l={interface}: {e}"))?;
            done += 1;
        }
    }
    Ok(done)
}
