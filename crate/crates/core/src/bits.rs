//! MSB-first bit sink and source. A partial final byte is zero-padded.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    acc: u8,
    acc_bits: u8,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn write_bit(&mut self, bit: bool) {
        self.acc = (self.acc << 1) | u8::from(bit);
        self.acc_bits += 1;
        if self.acc_bits == 8 {
            self.bytes.push(self.acc);
            self.acc = 0;
            self.acc_bits = 0;
        }
    }

    /// Write the low `count` bits of `value`, most significant first.
    #[inline]
    pub fn write_bits(&mut self, value: u64, count: u32) {
        debug_assert!(count <= 64);
        for i in (0..count).rev() {
            self.write_bit((value >> i) & 1 == 1);
        }
    }

    /// `count` one bits followed by a zero.
    pub fn write_unary(&mut self, count: u64) {
        for _ in 0..count {
            self.write_bit(true);
        }
        self.write_bit(false);
    }

    pub fn bit_len(&self) -> u64 {
        self.bytes.len() as u64 * 8 + u64::from(self.acc_bits)
    }

    /// Consume the writer, returning padded bytes and the number of valid bits.
    pub fn finish(mut self) -> (Vec<u8>, u64) {
        let len = self.bit_len();
        if self.acc_bits > 0 {
            self.bytes.push(self.acc << (8 - self.acc_bits));
        }
        (self.bytes, len)
    }

    /// The bits written so far as a string of `0`/`1`.
    pub fn bit_string(&self) -> String {
        let mut s = String::with_capacity(self.bit_len() as usize);
        for b in &self.bytes {
            for i in (0..8).rev() {
                s.push(if (b >> i) & 1 == 1 { '1' } else { '0' });
            }
        }
        for i in (0..self.acc_bits).rev() {
            s.push(if (self.acc >> i) & 1 == 1 { '1' } else { '0' });
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    data: &'a [u8],
    pos: u64,
    limit: u64,
}

impl<'a> BitReader<'a> {
    /// Read all bits of `data`.
    pub fn new(data: &'a [u8]) -> Self {
        BitReader { data, pos: 0, limit: data.len() as u64 * 8 }
    }

    /// Read only the first `bit_len` bits of `data`.
    pub fn with_bit_len(data: &'a [u8], bit_len: u64) -> Result<Self> {
        if bit_len > data.len() as u64 * 8 {
            return Err(Error::UnexpectedEof);
        }
        Ok(BitReader { data, pos: 0, limit: bit_len })
    }

    #[inline]
    pub fn read_bit(&mut self) -> Result<bool> {
        if self.pos >= self.limit {
            return Err(Error::UnexpectedEof);
        }
        let byte = self.data[(self.pos >> 3) as usize];
        let bit = (byte >> (7 - (self.pos & 7))) & 1 == 1;
        self.pos += 1;
        Ok(bit)
    }

    #[inline]
    pub fn read_bits(&mut self, count: u32) -> Result<u64> {
        debug_assert!(count <= 64);
        if self.pos + u64::from(count) > self.limit {
            return Err(Error::UnexpectedEof);
        }
        let mut v = 0u64;
        for _ in 0..count {
            v = (v << 1) | u64::from(self.read_bit()?);
        }
        Ok(v)
    }

    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.pos
    }
}

/// Parse a `0`/`1` string into padded bytes and a bit length.
pub fn bits_from_str(s: &str) -> (Vec<u8>, u64) {
    let mut w = BitWriter::new();
    for c in s.chars() {
        match c {
            '0' => w.write_bit(false),
            '1' => w.write_bit(true),
            _ => {}
        }
    }
    w.finish()
}
