//! Bitvectors with rank and select.
//!
//! Positions are 1-based and ranks count a prefix: `rank1(i)` is the number
//! of ones in `B[1..=i]`, so `rank1(0) == 0`. `select1(k)` returns the
//! position of the `k`-th one (`k >= 1`).

mod bitvector;
mod compressed;
mod packed;

pub use bitvector::BitVector;
pub use compressed::CompressedBitVector;
pub use packed::{bits_for, PackedInts};

use crate::codec::Persist;
use crate::error::{Error, Result};

/// Growable raw bit buffer used to feed [`BitSeq::build`].
#[derive(Clone, Debug, Default)]
pub struct RawBits {
    words: Vec<u64>,
    len: usize,
}

impl RawBits {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(64)),
            len: 0,
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut raw = Self::with_capacity(bits.len());
        for &b in bits {
            raw.push(b);
        }
        raw
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / 64] |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    /// Appends `count` copies of `bit`.
    pub fn push_run(&mut self, bit: bool, count: usize) {
        for _ in 0..count {
            self.push(bit);
        }
    }

    /// Sets 0-based bit `i`.
    pub fn set(&mut self, i: usize, bit: bool) {
        debug_assert!(i < self.len);
        if bit {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub(crate) fn into_parts(self) -> (Vec<u64>, usize) {
        (self.words, self.len)
    }
}

/// Static bitvector with rank/select support.
pub trait BitSeq: Persist + Clone + std::fmt::Debug + Send + Sync {
    fn build(bits: RawBits) -> Self;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Bit at 1-based position `p`; `1 <= p <= len`.
    fn get(&self, p: usize) -> bool;

    /// Ones in `B[1..=i]`; `i <= len`.
    fn rank1(&self, i: usize) -> usize;

    fn rank0(&self, i: usize) -> usize {
        i - self.rank1(i)
    }

    /// Position of the `k`-th one, `None` if there are fewer than `k`.
    fn select1(&self, k: usize) -> Option<usize>;

    /// Position of the `k`-th zero, `None` if there are fewer than `k`.
    fn select0(&self, k: usize) -> Option<usize>;

    fn count_ones(&self) -> usize;

    fn count_zeros(&self) -> usize {
        self.len() - self.count_ones()
    }

    /// Heap bytes held by the structure.
    fn size_in_bytes(&self) -> usize;

    /// Checked access.
    fn access(&self, p: usize) -> Result<bool> {
        if p == 0 || p > self.len() {
            return Err(Error::OutOfRange {
                pos: p,
                len: self.len(),
            });
        }
        Ok(self.get(p))
    }

    /// Checked rank of bit `b` over `B[1..=i]`.
    fn rank(&self, b: bool, i: usize) -> Result<usize> {
        if i > self.len() {
            return Err(Error::RankOutOfRange {
                pos: i,
                len: self.len(),
            });
        }
        Ok(if b { self.rank1(i) } else { self.rank0(i) })
    }

    fn select(&self, b: bool, k: usize) -> Option<usize> {
        if k == 0 {
            return None;
        }
        if b {
            self.select1(k)
        } else {
            self.select0(k)
        }
    }

    /// Leftmost position `p >= j` holding `b`.
    fn select_next(&self, b: bool, j: usize) -> Option<usize> {
        if j == 0 || j > self.len() {
            return None;
        }
        let before = if b {
            self.rank1(j - 1)
        } else {
            self.rank0(j - 1)
        };
        self.select(b, before + 1)
    }
}

/// Position (0-based) of the `r`-th (0-based) set bit of `w`.
#[inline]
pub(crate) fn select_in_word(mut w: u64, mut r: u32) -> u32 {
    let mut base = 0;
    loop {
        let c = (w & 0xff).count_ones();
        if r < c {
            break;
        }
        r -= c;
        w >>= 8;
        base += 8;
    }
    for _ in 0..r {
        w &= w - 1;
    }
    base + w.trailing_zeros()
}

#[cfg(test)]
pub(crate) mod testing {
    //! Naive scan oracles shared by the bitvector tests.

    pub fn rank(bits: &[bool], b: bool, i: usize) -> usize {
        bits[..i].iter().filter(|&&x| x == b).count()
    }

    pub fn select(bits: &[bool], b: bool, k: usize) -> Option<usize> {
        if k == 0 {
            return None;
        }
        bits.iter()
            .enumerate()
            .filter(|(_, &x)| x == b)
            .nth(k - 1)
            .map(|(i, _)| i + 1)
    }

    pub fn select_next(bits: &[bool], b: bool, j: usize) -> Option<usize> {
        if j == 0 {
            return None;
        }
        (j..=bits.len()).find(|&p| bits[p - 1] == b)
    }
}
