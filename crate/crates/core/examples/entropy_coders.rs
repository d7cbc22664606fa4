//! The two entropy coders on their own: a canonical Huffman code built from
//! symbol counts, and Golomb codes for location gaps.

use softcodec::bits::BitWriter;
use softcodec::golomb::{select_m, GolombParameter};
use softcodec::huffman::HuffmanCode;

fn main() -> softcodec::Result<()> {
    let counts = [45u64, 13, 12, 16, 9, 5];
    let code = HuffmanCode::from_counts(&counts)?;
    println!("symbol  count  codeword");
    for (s, n) in counts.iter().enumerate() {
        println!("{s:>6}  {n:>5}  {}", code.codeword_string(s as u32).unwrap_or_default());
    }
    let message = [0u32, 3, 1, 0, 0, 5, 2, 4];
    let (bytes, bits) = code.encode(&message)?.finish();
    assert_eq!(code.decode(&bytes, bits, message.len())?, message);
    println!("{} symbols -> {bits} bits, Kraft sum {}", message.len(), code.kraft_sum());

    println!("\ndelta  m=1         m=3         m=4");
    for delta in [0u64, 1, 2, 5, 9] {
        let cells: Vec<String> = [1, 3, 4]
            .iter()
            .map(|&m| {
                let mut w = BitWriter::new();
                GolombParameter::new(m).expect("m >= 1").encode(delta, &mut w);
                format!("{:<11}", w.bit_string())
            })
            .collect();
        println!("{delta:>5}  {}", cells.join(" ").trim_end());
    }

    let gaps: Vec<u64> = (0..200).map(|i| (i * 7 % 23) as u64).collect();
    let best = select_m(&gaps);
    println!("\nbest m for the sample gaps: {} ({} bits)", best.m(), best.total_len(&gaps));
    Ok(())
}
