//! Fixed-width packed integer array and raw bit-field helpers.

use crate::codec::{Decoder, Encoder, Persist};
use crate::error::Result;

/// Reads `width` (< 64) bits starting at bit `pos` of `words`.
#[inline]
pub(crate) fn read_bits(words: &[u64], pos: usize, width: u32) -> u64 {
    if width == 0 {
        return 0;
    }
    let w = pos / 64;
    let off = (pos % 64) as u32;
    let mask = (1u64 << width) - 1;
    let lo = words[w] >> off;
    if off + width <= 64 {
        lo & mask
    } else {
        (lo | words[w + 1] << (64 - off)) & mask
    }
}

/// Writes the low `width` (< 64) bits of `v` at bit `pos`; the target bits
/// must be zero.
#[inline]
pub(crate) fn write_bits(words: &mut Vec<u64>, pos: usize, width: u32, v: u64) {
    if width == 0 {
        return;
    }
    let end = pos + width as usize;
    while words.len() * 64 < end {
        words.push(0);
    }
    let w = pos / 64;
    let off = (pos % 64) as u32;
    words[w] |= v << off;
    if off + width > 64 {
        words[w + 1] |= v >> (64 - off);
    }
}

/// Bits needed to store values in `0..=max`.
pub fn bits_for(max: u64) -> u32 {
    64 - max.leading_zeros()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackedInts {
    len: usize,
    width: u32,
    words: Vec<u64>,
}

impl PackedInts {
    /// Packs `values` with the smallest width that fits their maximum.
    pub fn from_slice(values: &[u64]) -> Self {
        let max = values.iter().copied().max().unwrap_or(0);
        Self::with_width(values, bits_for(max))
    }

    pub fn with_width(values: &[u64], width: u32) -> Self {
        assert!(width < 64, "packed width must be below 64");
        let mut words = Vec::with_capacity((values.len() * width as usize).div_ceil(64));
        for (i, &v) in values.iter().enumerate() {
            debug_assert!(width == 64 || v >> width == 0);
            write_bits(&mut words, i * width as usize, width, v);
        }
        Self {
            len: values.len(),
            width,
            words,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// Value at 0-based index `i`.
    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        read_bits(&self.words, i * self.width as usize, self.width)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    pub fn size_in_bytes(&self) -> usize {
        8 * self.words.len()
    }
}

impl Persist for PackedInts {
    fn encode(&self, enc: &mut Encoder) {
        enc.put_usize(self.len);
        enc.put_u8(self.width as u8);
        enc.put_u64s(&self.words);
    }

    fn decode(dec: &mut Decoder<'_>) -> Result<Self> {
        let len = dec.get_usize()?;
        let width = dec.get_u8()? as u32;
        let words = dec.get_u64s()?;
        if width >= 64 {
            return Err(dec.error("packed width out of range"));
        }
        let need = len
            .checked_mul(width as usize)
            .ok_or_else(|| dec.error("packed length overflows"))?;
        if words.len() != need.div_ceil(64) {
            return Err(dec.error("packed payload has wrong size"));
        }
        Ok(Self { len, width, words })
    }
}
