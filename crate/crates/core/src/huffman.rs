//! Canonical Huffman codes over `u32` symbol alphabets.
//!
//! Codewords are assigned in `(length, symbol)` order, so a code is fully
//! described by its length table. Ties during construction are broken by
//! creation order with leaves ordered by symbol id, which makes the build
//! deterministic.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::bits::{BitReader, BitWriter};
use crate::error::{Error, Result};

/// Longest codeword the coder will represent.
pub const MAX_CODE_LEN: u8 = 64;

const NO_SYMBOL: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanCode {
    /// Symbols sorted by id, with their lengths and codewords.
    symbols: Vec<u32>,
    lengths: Vec<u8>,
    codes: Vec<u64>,
    /// symbol id -> position in `symbols`
    index: Vec<u32>,
    /// canonical decode tables, indexed by length
    first_code: Vec<u64>,
    first_pos: Vec<u32>,
    count: Vec<u32>,
    /// positions in `symbols` sorted by (length, symbol)
    canonical_order: Vec<u32>,
}

impl HuffmanCode {
    /// Build an optimal prefix code from `(symbol, count)` pairs. Symbols with
    /// zero count are left out of the alphabet.
    pub fn build<I>(freqs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u64)>,
    {
        let mut leaves: Vec<(u32, u64)> = freqs.into_iter().filter(|&(_, c)| c > 0).collect();
        leaves.sort_unstable_by_key(|&(s, _)| s);
        if leaves.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Build("duplicate symbol".into()));
        }
        if leaves.is_empty() {
            return Err(Error::Build("alphabet has no symbol with positive count".into()));
        }
        if leaves.len() == 1 {
            return HuffmanCode::from_lengths(&[(leaves[0].0, 1)]);
        }

        let n = leaves.len();
        // parent links for every node; leaves are 0..n, internal nodes follow
        let mut parent = vec![usize::MAX; 2 * n - 1];
        let mut heap: BinaryHeap<Reverse<(u64, usize)>> =
            leaves.iter().enumerate().map(|(i, &(_, c))| Reverse((c, i))).collect();
        let mut next = n;
        while heap.len() > 1 {
            let Reverse((wa, a)) = heap.pop().unwrap();
            let Reverse((wb, b)) = heap.pop().unwrap();
            parent[a] = next;
            parent[b] = next;
            heap.push(Reverse((wa.saturating_add(wb), next)));
            next += 1;
        }
        let root = next - 1;
        let mut depth = vec![0u32; 2 * n - 1];
        for node in (0..root).rev() {
            depth[node] = depth[parent[node]] + 1;
        }
        let mut pairs = Vec::with_capacity(n);
        for (i, &(sym, _)) in leaves.iter().enumerate() {
            if depth[i] > u32::from(MAX_CODE_LEN) {
                return Err(Error::Build(format!("codeword length {} exceeds {MAX_CODE_LEN}", depth[i])));
            }
            pairs.push((sym, depth[i] as u8));
        }
        HuffmanCode::from_lengths(&pairs)
    }

    /// Convenience for dense alphabets: symbol `i` has count `counts[i]`.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        HuffmanCode::build(counts.iter().enumerate().map(|(i, &c)| (i as u32, c)))
    }

    /// Reconstruct the canonical code from its length table.
    pub fn from_lengths(pairs: &[(u32, u8)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Build("empty length table".into()));
        }
        let mut pairs = pairs.to_vec();
        pairs.sort_unstable_by_key(|&(s, _)| s);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Build("duplicate symbol".into()));
        }
        if pairs.iter().any(|&(s, _)| s == NO_SYMBOL) {
            return Err(Error::Build("symbol id u32::MAX is reserved".into()));
        }
        let max_len = pairs.iter().map(|p| p.1).max().unwrap();
        if pairs.iter().any(|&(_, l)| l == 0 || l > MAX_CODE_LEN) {
            return Err(Error::Build(format!("codeword lengths must be in [1, {MAX_CODE_LEN}]")));
        }
        let kraft: u128 = pairs.iter().map(|&(_, l)| 1u128 << (max_len - l)).sum();
        if kraft > 1u128 << max_len {
            return Err(Error::Build("lengths violate the Kraft inequality".into()));
        }

        let symbols: Vec<u32> = pairs.iter().map(|p| p.0).collect();
        let lengths: Vec<u8> = pairs.iter().map(|p| p.1).collect();
        let mut order: Vec<u32> = (0..symbols.len() as u32).collect();
        order.sort_unstable_by_key(|&i| (lengths[i as usize], symbols[i as usize]));

        let levels = max_len as usize + 1;
        let mut codes = vec![0u64; symbols.len()];
        let mut first_code = vec![0u64; levels];
        let mut first_pos = vec![0u32; levels];
        let mut count = vec![0u32; levels];
        let mut code: u64 = 0;
        let mut prev_len = 0u8;
        for (rank, &i) in order.iter().enumerate() {
            let len = lengths[i as usize];
            if len != prev_len {
                let shift = u32::from(len - prev_len);
                code = code.checked_shl(shift).unwrap_or(0);
                first_code[len as usize] = code;
                first_pos[len as usize] = rank as u32;
                prev_len = len;
            }
            codes[i as usize] = code;
            count[len as usize] += 1;
            code = code.wrapping_add(1);
        }

        let max_sym = *symbols.last().unwrap() as usize;
        let mut index = vec![NO_SYMBOL; max_sym + 1];
        for (i, &s) in symbols.iter().enumerate() {
            index[s as usize] = i as u32;
        }
        Ok(HuffmanCode { symbols, lengths, codes, index, first_code, first_pos, count, canonical_order: order })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    /// `(symbol, length)` pairs sorted by symbol.
    pub fn length_table(&self) -> Vec<(u32, u8)> {
        self.symbols.iter().copied().zip(self.lengths.iter().copied()).collect()
    }

    fn position(&self, symbol: u32) -> Option<usize> {
        match self.index.get(symbol as usize) {
            Some(&i) if i != NO_SYMBOL => Some(i as usize),
            _ => None,
        }
    }

    pub fn length_of(&self, symbol: u32) -> Option<u8> {
        self.position(symbol).map(|i| self.lengths[i])
    }

    /// `(codeword, length)` of a symbol.
    pub fn codeword(&self, symbol: u32) -> Option<(u64, u8)> {
        self.position(symbol).map(|i| (self.codes[i], self.lengths[i]))
    }

    /// Codeword as a `0`/`1` string.
    pub fn codeword_string(&self, symbol: u32) -> Option<String> {
        self.codeword(symbol)
            .map(|(c, l)| (0..l).rev().map(|i| if (c >> i) & 1 == 1 { '1' } else { '0' }).collect())
    }

    pub fn kraft_sum(&self) -> f64 {
        self.lengths.iter().map(|&l| 0.5f64.powi(i32::from(l))).sum()
    }

    #[inline]
    pub fn encode_symbol(&self, symbol: u32, out: &mut BitWriter) -> Result<()> {
        let (code, len) = self.codeword(symbol).ok_or(Error::UnknownSymbol(symbol))?;
        out.write_bits(code, u32::from(len));
        Ok(())
    }

    pub fn decode_symbol(&self, src: &mut BitReader<'_>) -> Result<u32> {
        let mut code: u64 = 0;
        for len in 1..self.count.len() {
            code = (code << 1) | u64::from(src.read_bit()?);
            let n = self.count[len];
            if n > 0 && code >= self.first_code[len] && code - self.first_code[len] < u64::from(n) {
                let rank = self.first_pos[len] as usize + (code - self.first_code[len]) as usize;
                return Ok(self.symbols[self.canonical_order[rank] as usize]);
            }
        }
        Err(Error::corrupt("bit pattern is not a codeword"))
    }

    pub fn encode(&self, symbols: &[u32]) -> Result<BitWriter> {
        let mut w = BitWriter::new();
        for &s in symbols {
            self.encode_symbol(s, &mut w)?;
        }
        Ok(w)
    }

    /// Decode exactly `count` symbols from the first `bit_len` bits of `bytes`.
    pub fn decode(&self, bytes: &[u8], bit_len: u64, count: usize) -> Result<Vec<u32>> {
        let mut r = BitReader::with_bit_len(bytes, bit_len)?;
        (0..count).map(|_| self.decode_symbol(&mut r)).collect()
    }

    /// Total encoded length in bits of `(symbol, count)` occurrences.
    pub fn cost<I>(&self, occurrences: I) -> Result<u64>
    where
        I: IntoIterator<Item = (u32, u64)>,
    {
        occurrences.into_iter().try_fold(0u64, |acc, (s, n)| {
            let l = self.length_of(s).ok_or(Error::UnknownSymbol(s))?;
            Ok(acc + u64::from(l) * n)
        })
    }
}
