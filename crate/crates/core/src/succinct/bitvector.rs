//! Plain bitvector with a two-level rank directory and sampled select.
//!
//! Every 512-bit block stores the absolute rank before it plus seven 9-bit
//! in-block word counts packed into one `u64`. Select keeps the block of
//! every 4096th one (and zero) and binary searches between samples.

use super::{select_in_word, BitSeq, RawBits};
use crate::codec::{Decoder, Encoder, Persist};
use crate::error::Result;

const BLOCK_WORDS: usize = 8;
const BLOCK_BITS: usize = 512;
const SELECT_SAMPLE: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
    /// Interleaved (absolute rank, packed word counts) per block, plus a
    /// final absolute entry.
    dir: Vec<u64>,
    sel1: Vec<u32>,
    sel0: Vec<u32>,
}

impl BitVector {
    pub fn from_bools(bits: &[bool]) -> Self {
        Self::build(RawBits::from_bools(bits))
    }

    fn from_words(words: Vec<u64>, len: usize) -> Self {
        let nblocks = words.len().div_ceil(BLOCK_WORDS);
        let mut dir = Vec::with_capacity(2 * nblocks + 2);
        let mut total = 0u64;
        for b in 0..nblocks {
            dir.push(total);
            let mut packed = 0u64;
            let mut in_block = 0u64;
            for j in 0..BLOCK_WORDS {
                if j > 0 {
                    packed |= in_block << (9 * (j - 1));
                }
                if let Some(w) = words.get(b * BLOCK_WORDS + j) {
                    in_block += w.count_ones() as u64;
                }
            }
            dir.push(packed);
            total += in_block;
        }
        dir.push(total);
        dir.push(0);

        let ones = total as usize;
        let zeros = len - ones;
        let mut bv = BitVector {
            len,
            words,
            dir,
            sel1: Vec::new(),
            sel0: Vec::new(),
        };
        bv.sel1 = bv.sample(true, ones);
        bv.sel0 = bv.sample(false, zeros);
        bv
    }

    fn sample(&self, bit: bool, count: usize) -> Vec<u32> {
        let nblocks = self.nblocks();
        let mut out = Vec::with_capacity(count / SELECT_SAMPLE + 2);
        let mut b = 0;
        let mut r = 0;
        while r < count {
            while b + 1 < nblocks && self.block_rank(bit, b + 1) <= r {
                b += 1;
            }
            out.push(b as u32);
            r += SELECT_SAMPLE;
        }
        out.push(nblocks.saturating_sub(1) as u32);
        out
    }

    #[inline]
    fn nblocks(&self) -> usize {
        self.dir.len() / 2 - 1
    }

    /// Occurrences of `bit` before block `b`.
    #[inline]
    fn block_rank(&self, bit: bool, b: usize) -> usize {
        let ones = self.dir[2 * b] as usize;
        if bit {
            ones
        } else {
            b * BLOCK_BITS - ones
        }
    }

    /// Occurrences of `bit` in block `b` before its word `j`.
    #[inline]
    fn word_rank(&self, bit: bool, b: usize, j: usize) -> usize {
        let ones = if j == 0 {
            0
        } else {
            (self.dir[2 * b + 1] >> (9 * (j - 1))) as usize & 0x1ff
        };
        if bit {
            ones
        } else {
            j * 64 - ones
        }
    }

    fn select_impl(&self, bit: bool, k: usize) -> Option<usize> {
        let total = if bit { self.count_ones() } else { self.count_zeros() };
        if k == 0 || k > total {
            return None;
        }
        let r = k - 1;
        let samples = if bit { &self.sel1 } else { &self.sel0 };
        let s = r / SELECT_SAMPLE;
        let mut lo = samples[s] as usize;
        let mut hi = samples[s + 1] as usize;
        // last block in [lo, hi] whose preceding count is <= r
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if self.block_rank(bit, mid) <= r {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let b = lo;
        let mut rem = r - self.block_rank(bit, b);
        let mut j = 0;
        while j + 1 < BLOCK_WORDS && self.word_rank(bit, b, j + 1) <= rem {
            j += 1;
        }
        rem -= self.word_rank(bit, b, j);
        let wi = b * BLOCK_WORDS + j;
        let w = if bit { self.words[wi] } else { !self.words[wi] };
        Some(wi * 64 + select_in_word(w, rem as u32) as usize + 1)
    }
}

impl BitSeq for BitVector {
    fn build(bits: RawBits) -> Self {
        let (words, len) = bits.into_parts();
        Self::from_words(words, len)
    }

    fn len(&self) -> usize {
        self.len
    }

    #[inline]
    fn get(&self, p: usize) -> bool {
        debug_assert!(p >= 1 && p <= self.len);
        let i = p - 1;
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    fn rank1(&self, i: usize) -> usize {
        debug_assert!(i <= self.len);
        let w = i / 64;
        let b = w / BLOCK_WORDS;
        let mut r = self.dir[2 * b] as usize + self.word_rank(true, b, w % BLOCK_WORDS);
        let off = i % 64;
        if off != 0 {
            r += (self.words[w] & ((1u64 << off) - 1)).count_ones() as usize;
        }
        r
    }

    fn select1(&self, k: usize) -> Option<usize> {
        self.select_impl(true, k)
    }

    fn select0(&self, k: usize) -> Option<usize> {
        self.select_impl(false, k)
    }

    fn count_ones(&self) -> usize {
        self.dir[self.dir.len() - 2] as usize
    }

    fn size_in_bytes(&self) -> usize {
        8 * (self.words.len() + self.dir.len()) + 4 * (self.sel1.len() + self.sel0.len())
    }
}

impl Persist for BitVector {
    fn encode(&self, enc: &mut Encoder) {
        enc.put_usize(self.len);
        enc.put_u64s(&self.words);
        enc.put_u64s(&self.dir);
        enc.put_u32s(&self.sel1);
        enc.put_u32s(&self.sel0);
    }

    fn decode(dec: &mut Decoder<'_>) -> Result<Self> {
        let len = dec.get_usize()?;
        let words = dec.get_u64s()?;
        let dir = dec.get_u64s()?;
        let sel1 = dec.get_u32s()?;
        let sel0 = dec.get_u32s()?;
        if words.len() != len.div_ceil(64) {
            return Err(dec.error("bitvector word count does not match length"));
        }
        let nblocks = words.len().div_ceil(BLOCK_WORDS);
        if dir.len() != 2 * nblocks + 2 {
            return Err(dec.error("bitvector directory has wrong size"));
        }
        let bv = BitVector {
            len,
            words,
            dir,
            sel1,
            sel0,
        };
        let ones = bv.count_ones();
        if ones > len
            || bv.sel1.len() != ones.div_ceil(SELECT_SAMPLE) + 1
            || bv.sel0.len() != (len - ones).div_ceil(SELECT_SAMPLE) + 1
            || bv.sel1.iter().chain(&bv.sel0).any(|&b| b as usize >= nblocks.max(1))
        {
            return Err(dec.error("bitvector select samples are inconsistent"));
        }
        Ok(bv)
    }
}
