//! Zero-order compressed bitvector: 64-bit blocks stored as (class, offset)
//! pairs, where the class is the popcount and the offset is the block's
//! rank among all words of that class. Superblocks of 32 blocks keep the
//! absolute rank and the offset-stream pointer.

use super::packed::{read_bits, write_bits};
use super::{select_in_word, BitSeq, RawBits};
use crate::codec::{Decoder, Encoder, Persist};
use crate::error::Result;

const SUPER: usize = 32;

const fn binomials() -> [[u64; 65]; 65] {
    let mut c = [[0u64; 65]; 65];
    let mut n = 0;
    while n <= 64 {
        c[n][0] = 1;
        let mut k = 1;
        while k <= n {
            c[n][k] = c[n - 1][k - 1] + if k < n { c[n - 1][k] } else { 0 };
            k += 1;
        }
        n += 1;
    }
    c
}

static BINOM: [[u64; 65]; 65] = binomials();

const fn widths() -> [u32; 65] {
    let mut w = [0u32; 65];
    let mut k = 0;
    while k <= 64 {
        let c = BINOM[64][k];
        w[k] = if c <= 1 { 0 } else { 64 - (c - 1).leading_zeros() };
        k += 1;
    }
    w
}

const WIDTH: [u32; 65] = widths();

fn encode_word(mut w: u64) -> (u32, u64) {
    let class = w.count_ones();
    let mut k = class as usize;
    let mut offset = 0u64;
    while w != 0 {
        let p = 63 - w.leading_zeros() as usize;
        offset += BINOM[p][k];
        k -= 1;
        w &= !(1u64 << p);
    }
    (class, offset)
}

fn decode_word(class: u32, mut offset: u64) -> u64 {
    match class {
        0 => 0,
        64 => u64::MAX,
        _ => {
            let mut k = class as usize;
            let mut w = 0u64;
            let mut p = 64;
            while k > 0 {
                p -= 1;
                let c = BINOM[p][k];
                if offset >= c {
                    w |= 1 << p;
                    offset -= c;
                    k -= 1;
                }
            }
            w
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressedBitVector {
    len: usize,
    classes: Vec<u8>,
    offsets: Vec<u64>,
    /// Interleaved (ones before, offset bit pointer) per superblock, plus a
    /// final entry holding the totals.
    supers: Vec<u64>,
}

impl CompressedBitVector {
    pub fn from_bools(bits: &[bool]) -> Self {
        Self::build(RawBits::from_bools(bits))
    }

    fn nsupers(&self) -> usize {
        self.supers.len() / 2 - 1
    }

    /// Ones before block `b`, and its offset pointer.
    #[inline]
    fn locate(&self, b: usize) -> (usize, usize) {
        let s = b / SUPER;
        let mut ones = self.supers[2 * s] as usize;
        let mut ptr = self.supers[2 * s + 1] as usize;
        for &c in &self.classes[s * SUPER..b] {
            ones += c as usize;
            ptr += WIDTH[c as usize] as usize;
        }
        (ones, ptr)
    }

    #[inline]
    fn word_at(&self, b: usize, ptr: usize) -> u64 {
        let class = self.classes[b] as u32;
        decode_word(class, read_bits(&self.offsets, ptr, WIDTH[class as usize]))
    }

    fn super_rank(&self, bit: bool, s: usize) -> usize {
        let ones = self.supers[2 * s] as usize;
        if bit {
            ones
        } else {
            s * SUPER * 64 - ones
        }
    }

    fn select_impl(&self, bit: bool, k: usize) -> Option<usize> {
        let total = if bit { self.count_ones() } else { self.count_zeros() };
        if k == 0 || k > total {
            return None;
        }
        let r = k - 1;
        // last superblock with fewer than k occurrences before it
        let (mut lo, mut hi) = (0, self.nsupers() - 1);
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if self.super_rank(bit, mid) <= r {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let s = lo;
        let mut seen = self.super_rank(bit, s);
        let mut ptr = self.supers[2 * s + 1] as usize;
        let mut b = s * SUPER;
        loop {
            let c = self.classes[b] as usize;
            let here = if bit { c } else { 64 - c };
            if seen + here > r {
                break;
            }
            seen += here;
            ptr += WIDTH[c] as usize;
            b += 1;
        }
        let w = self.word_at(b, ptr);
        let w = if bit { w } else { !w };
        Some(b * 64 + select_in_word(w, (r - seen) as u32) as usize + 1)
    }
}

impl BitSeq for CompressedBitVector {
    fn build(bits: RawBits) -> Self {
        let (words, len) = bits.into_parts();
        let mut classes = Vec::with_capacity(words.len());
        let mut offsets = Vec::new();
        let mut supers = Vec::with_capacity(2 * (words.len() / SUPER + 2));
        let mut ones = 0u64;
        let mut ptr = 0usize;
        for (b, &w) in words.iter().enumerate() {
            if b % SUPER == 0 {
                supers.push(ones);
                supers.push(ptr as u64);
            }
            let (class, offset) = encode_word(w);
            let width = WIDTH[class as usize];
            write_bits(&mut offsets, ptr, width, offset);
            classes.push(class as u8);
            ones += class as u64;
            ptr += width as usize;
        }
        if words.len() % SUPER == 0 {
            // keeps a (possibly empty) superblock covering the tail
            supers.push(ones);
            supers.push(ptr as u64);
        }
        supers.push(ones);
        supers.push(ptr as u64);
        offsets.truncate(ptr.div_ceil(64));
        Self {
            len,
            classes,
            offsets,
            supers,
        }
    }

    fn len(&self) -> usize {
        self.len
    }

    fn get(&self, p: usize) -> bool {
        debug_assert!(p >= 1 && p <= self.len);
        let i = p - 1;
        let b = i / 64;
        let (_, ptr) = self.locate(b);
        self.word_at(b, ptr) >> (i % 64) & 1 == 1
    }

    fn rank1(&self, i: usize) -> usize {
        debug_assert!(i <= self.len);
        let b = i / 64;
        let (ones, ptr) = self.locate(b);
        let off = i % 64;
        if off == 0 {
            ones
        } else {
            ones + (self.word_at(b, ptr) & ((1u64 << off) - 1)).count_ones() as usize
        }
    }

    fn select1(&self, k: usize) -> Option<usize> {
        self.select_impl(true, k)
    }

    fn select0(&self, k: usize) -> Option<usize> {
        self.select_impl(false, k)
    }

    fn count_ones(&self) -> usize {
        self.supers[self.supers.len() - 2] as usize
    }

    fn size_in_bytes(&self) -> usize {
        self.classes.len() + 8 * (self.offsets.len() + self.supers.len())
    }
}

impl Persist for CompressedBitVector {
    fn encode(&self, enc: &mut Encoder) {
        enc.put_usize(self.len);
        enc.put_bytes(&self.classes);
        enc.put_u64s(&self.offsets);
        enc.put_u64s(&self.supers);
    }

    fn decode(dec: &mut Decoder<'_>) -> Result<Self> {
        let len = dec.get_usize()?;
        let classes = dec.get_bytes()?;
        let offsets = dec.get_u64s()?;
        let supers = dec.get_u64s()?;
        let nblocks = len.div_ceil(64);
        if classes.len() != nblocks || classes.iter().any(|&c| c > 64) {
            return Err(dec.error("compressed bitvector classes are inconsistent"));
        }
        if supers.len() != 2 * (nblocks / SUPER + 2) {
            return Err(dec.error("compressed bitvector superblocks have wrong size"));
        }
        let bits: usize = classes.iter().map(|&c| WIDTH[c as usize] as usize).sum();
        let ones: usize = classes.iter().map(|&c| c as usize).sum();
        if offsets.len() != bits.div_ceil(64)
            || supers[supers.len() - 1] as usize != bits
            || supers[supers.len() - 2] as usize != ones
            || ones > len
        {
            return Err(dec.error("compressed bitvector payload is inconsistent"));
        }
        Ok(Self {
            len,
            classes,
            offsets,
            supers,
        })
    }
}
