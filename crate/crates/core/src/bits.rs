//! Packed bit strings.
//!
//! Position `i` of a string (0-based) lives in bit `i % 64` of word `i / 64`.
//! Bits past the declared length are always zero, so word-level popcounts
//! and comparisons need no masking.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; word_count(len)],
        }
    }

    /// The low `len` bits of `value`; `len` may not exceed 64.
    pub fn from_u64(value: u64, len: usize) -> Result<Self> {
        if len > 64 {
            return Err(Error::InvalidArgument(format!(
                "a u64 holds at most 64 bits, asked for {len}"
            )));
        }
        if len < 64 && value >> len != 0 {
            return Err(Error::InvalidArgument(format!(
                "value {value:#x} does not fit in {len} bits"
            )));
        }
        let mut s = Self::zeros(len);
        if len > 0 {
            s.words[0] = value;
        }
        Ok(s)
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut s = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            s.set(i, b);
        }
        s
    }

    pub(crate) fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(word_count(len), 0);
        let mut s = Self { len, words };
        s.clear_tail();
        s
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let words = (0..word_count(len)).map(|_| rng.random::<u64>()).collect();
        Self::from_words(len, words)
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    /// The whole string as an integer, when it fits.
    pub fn to_u64(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn weight(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn hamming(&self, other: &BitString) -> u64 {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as u64)
            .sum()
    }

    pub fn xor_assign(&mut self, other: &BitString) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// GF(2) inner product.
    pub fn dot(&self, other: &BitString) -> bool {
        debug_assert_eq!(self.len, other.len);
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Hex rendering, most significant nibble first: the string is read as
    /// the integer `sum bit_i 2^i` and printed with `ceil(len/4)` digits.
    pub fn to_hex(&self) -> String {
        let nibbles = self.len.div_ceil(4);
        let mut out = String::with_capacity(nibbles);
        for j in (0..nibbles).rev() {
            let bit = 4 * j;
            let nib = (self.words[bit / 64] >> (bit % 64)) & 0xf;
            out.push(char::from_digit(nib as u32, 16).unwrap());
        }
        out
    }

    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        let nibbles = len.div_ceil(4);
        if hex.len() != nibbles {
            return Err(Error::Parse(format!(
                "hex string of {} digits for a {len}-bit string (expected {nibbles})",
                hex.len()
            )));
        }
        let mut s = Self::zeros(len);
        for (pos, ch) in hex.chars().enumerate() {
            let nib = ch
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit {ch:?}")))?
                as u64;
            let bit = 4 * (nibbles - 1 - pos);
            s.words[bit / 64] |= nib << (bit % 64);
        }
        let before = s.weight();
        s.clear_tail();
        if s.weight() != before {
            return Err(Error::Parse(format!(
                "hex {hex} sets bits beyond length {len}"
            )));
        }
        Ok(s)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({}; ", self.len)?;
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}
