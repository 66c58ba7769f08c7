//! Pointerless, level-wise wavelet tree over `[1, sigma]`.
//!
//! Node `[a, b]` splits at `m = (a + b) / 2` into `[a, m]` and `[m + 1, b]`.
//! Level `l` stores one bit per sequence element, grouped by the depth-`l`
//! node holding it; a node's elements occupy the same segment
//! `[before(a), before(b + 1))` on every level, where `before(a)` counts
//! elements smaller than `a`. Leaves reached above the last level are copied
//! down with zero bits.
//!
//! Per-symbol counts are kept as a unary bitvector: for each symbol a one
//! followed by as many zeros as occurrences (`n + sigma` bits). This is the
//! cumulative array `A` of a ring column.

use crate::codec::{Decoder, Encoder, Persist};
use crate::error::{Error, Result};
use crate::succinct::{BitSeq, RawBits};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WaveletTree<B> {
    n: usize,
    sigma: u32,
    levels: Vec<B>,
    counts: B,
}

/// A node segment `[st, en)` and a subrange `[s, e)` of it, 0-based.
#[derive(Clone, Copy, Debug, Default)]
struct Seg {
    st: usize,
    en: usize,
    s: usize,
    e: usize,
}

impl Seg {
    #[inline]
    fn is_empty(&self) -> bool {
        self.s >= self.e
    }

    #[inline]
    fn len(&self) -> usize {
        self.e - self.s
    }
}

/// A 1-based inclusive range `[l, r]` over one tree; empty when `l > r`.
#[derive(Clone, Copy, Debug)]
pub struct RangeRef<'a, B> {
    pub tree: &'a WaveletTree<B>,
    pub l: usize,
    pub r: usize,
}

impl<'a, B> RangeRef<'a, B> {
    pub fn new(tree: &'a WaveletTree<B>, l: usize, r: usize) -> Self {
        Self { tree, l, r }
    }
}

/// An alphabet partition `[lo, hi]` with one count per input range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub lo: u32,
    pub hi: u32,
    pub counts: Vec<usize>,
}

impl Partition {
    pub fn min(&self) -> usize {
        self.counts.iter().copied().min().unwrap_or(0)
    }
}

#[inline]
fn mid(a: u32, b: u32) -> u32 {
    ((a as u64 + b as u64) / 2) as u32
}

/// Number of levels needed to separate `sigma` symbols.
pub fn depth_for(sigma: u32) -> usize {
    if sigma <= 1 {
        0
    } else {
        (32 - (sigma - 1).leading_zeros()) as usize
    }
}

/// The alphabet partitions `k` levels below the root of a `[1, sigma]` tree.
pub fn alphabet_partitions(sigma: u32, k: usize) -> Vec<(u32, u32)> {
    let mut cur = vec![(1, sigma)];
    for _ in 0..k {
        let mut next = Vec::with_capacity(cur.len() * 2);
        for (a, b) in cur {
            if a == b {
                next.push((a, b));
            } else {
                let m = mid(a, b);
                next.push((a, m));
                next.push((m + 1, b));
            }
        }
        cur = next;
    }
    cur
}

impl<B: BitSeq> WaveletTree<B> {
    /// Builds over `seq` with symbols in `1..=sigma` (`sigma >= 1`).
    pub fn new(seq: &[u32], sigma: u32) -> Result<Self> {
        let sigma = sigma.max(1);
        if let Some(&bad) = seq.iter().find(|&&c| c == 0 || c > sigma) {
            return Err(Error::SymbolOutOfRange { symbol: bad, sigma });
        }
        let n = seq.len();
        let mut freq = vec![0usize; sigma as usize + 2];
        for &c in seq {
            freq[c as usize] += 1;
        }
        let mut counts = RawBits::with_capacity(n + sigma as usize);
        for &f in &freq[1..=sigma as usize] {
            counts.push(true);
            counts.push_run(false, f);
        }
        // before[c] = number of elements < c, 0-based offsets
        let mut before = vec![0usize; sigma as usize + 2];
        for c in 1..=sigma as usize {
            before[c + 1] = before[c] + freq[c];
        }

        let depth = depth_for(sigma);
        let mut levels = Vec::with_capacity(depth);
        let mut cur = seq.to_vec();
        let mut nodes = vec![(1u32, sigma)];
        for _ in 0..depth {
            let mut bits = RawBits::zeros(n);
            let mut next = vec![0u32; n];
            let mut next_nodes = Vec::with_capacity(nodes.len() * 2);
            for &(a, b) in &nodes {
                let st = before[a as usize];
                let en = before[b as usize + 1];
                if a == b {
                    next[st..en].copy_from_slice(&cur[st..en]);
                    next_nodes.push((a, b));
                    continue;
                }
                let m = mid(a, b);
                let mut left = st;
                let mut right = before[m as usize + 1];
                for (i, &c) in cur[st..en].iter().enumerate() {
                    if c > m {
                        bits.set(st + i, true);
                        next[right] = c;
                        right += 1;
                    } else {
                        next[left] = c;
                        left += 1;
                    }
                }
                next_nodes.push((a, m));
                next_nodes.push((m + 1, b));
            }
            levels.push(B::build(bits));
            cur = next;
            nodes = next_nodes;
        }
        Ok(Self {
            n,
            sigma,
            levels,
            counts: B::build(counts),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Elements smaller than `c`, for `1 <= c <= sigma + 1`.
    #[inline]
    pub fn before(&self, c: u32) -> usize {
        debug_assert!(c >= 1 && c <= self.sigma + 1);
        if c > self.sigma {
            return self.n;
        }
        self.counts.select1(c as usize).unwrap() - c as usize
    }

    /// Occurrences of `c` in the whole sequence; 0 outside the alphabet.
    pub fn count(&self, c: u32) -> usize {
        if c == 0 || c > self.sigma {
            return 0;
        }
        self.before(c + 1) - self.before(c)
    }

    /// The symbol `c` with `before(c) < i <= before(c + 1)`: the value of
    /// row `i` once the sequence is sorted.
    pub fn sorted_symbol(&self, i: usize) -> u32 {
        debug_assert!(i >= 1 && i <= self.n);
        self.counts.rank1(self.counts.select0(i).unwrap()) as u32
    }

    #[inline]
    fn root(&self, l: usize, r: usize) -> Seg {
        let (s, e) = if l >= 1 && l <= r && r <= self.n {
            (l - 1, r)
        } else {
            (0, 0)
        };
        Seg {
            st: 0,
            en: self.n,
            s,
            e,
        }
    }

    /// Maps a segment into both children.
    #[inline]
    fn split(&self, level: usize, seg: Seg) -> (Seg, Seg) {
        let bv = &self.levels[level];
        let r_st = bv.rank1(seg.st);
        let r_en = bv.rank1(seg.en);
        let (r_s, r_e) = if seg.is_empty() {
            (r_st, r_st)
        } else {
            (bv.rank1(seg.s), bv.rank1(seg.e))
        };
        let zeros = (seg.en - seg.st) - (r_en - r_st);
        let mid_pos = seg.st + zeros;
        let left = Seg {
            st: seg.st,
            en: mid_pos,
            s: seg.s - (r_s - r_st),
            e: seg.e - (r_e - r_st),
        };
        let right = Seg {
            st: mid_pos,
            en: seg.en,
            s: mid_pos + (r_s - r_st),
            e: mid_pos + (r_e - r_st),
        };
        if seg.is_empty() {
            (
                Seg {
                    s: left.st,
                    e: left.st,
                    ..left
                },
                Seg {
                    s: right.st,
                    e: right.st,
                    ..right
                },
            )
        } else {
            (left, right)
        }
    }

    /// Symbol at 1-based position `i` and its rank up to `i`.
    pub fn access_rank(&self, i: usize) -> Result<(u32, usize)> {
        if i == 0 || i > self.n {
            return Err(Error::OutOfRange {
                pos: i,
                len: self.n,
            });
        }
        let (mut a, mut b) = (1, self.sigma);
        let (mut st, mut en, mut p) = (0, self.n, i - 1);
        let mut level = 0;
        while a < b {
            let bv = &self.levels[level];
            let r_st = bv.rank1(st);
            let r_en = bv.rank1(en);
            let r_p = bv.rank1(p);
            let zeros = (en - st) - (r_en - r_st);
            let m = mid(a, b);
            if bv.get(p + 1) {
                st += zeros;
                p = st + (r_p - r_st);
                a = m + 1;
            } else {
                en = st + zeros;
                p -= r_p - r_st;
                b = m;
            }
            level += 1;
        }
        Ok((a, p - st + 1))
    }

    pub fn access(&self, i: usize) -> Result<u32> {
        Ok(self.access_rank(i)?.0)
    }

    /// Occurrences of `c` in `S[1..=i]`.
    pub fn rank(&self, c: u32, i: usize) -> Result<usize> {
        if i > self.n {
            return Err(Error::RankOutOfRange {
                pos: i,
                len: self.n,
            });
        }
        if c == 0 || c > self.sigma {
            return Err(Error::SymbolOutOfRange {
                symbol: c,
                sigma: self.sigma,
            });
        }
        Ok(self.rank_unchecked(c, i))
    }

    #[inline]
    pub(crate) fn rank_unchecked(&self, c: u32, i: usize) -> usize {
        let (mut a, mut b) = (1, self.sigma);
        let (mut st, mut en, mut e) = (0, self.n, i);
        let mut level = 0;
        while a < b {
            if e == st {
                return 0;
            }
            let bv = &self.levels[level];
            let r_st = bv.rank1(st);
            let r_en = bv.rank1(en);
            let r_e = bv.rank1(e);
            let zeros = (en - st) - (r_en - r_st);
            let m = mid(a, b);
            if c > m {
                st += zeros;
                e = st + (r_e - r_st);
                a = m + 1;
            } else {
                en = st + zeros;
                e -= r_e - r_st;
                b = m;
            }
            level += 1;
        }
        e - st
    }

    /// Position of the `j`-th occurrence of `c`.
    pub fn select(&self, c: u32, j: usize) -> Option<usize> {
        if c == 0 || c > self.sigma || j == 0 || j > self.count(c) {
            return None;
        }
        let (mut a, mut b) = (1, self.sigma);
        let (mut st, mut en) = (0, self.n);
        let mut path: Vec<(usize, bool)> = Vec::with_capacity(self.depth());
        let mut level = 0;
        while a < b {
            let bv = &self.levels[level];
            let r_st = bv.rank1(st);
            let r_en = bv.rank1(en);
            let zeros = (en - st) - (r_en - r_st);
            let m = mid(a, b);
            path.push((st, c > m));
            if c > m {
                st += zeros;
                a = m + 1;
            } else {
                en = st + zeros;
                b = m;
            }
            level += 1;
        }
        // offset of the occurrence inside the current node
        let mut rel = j - 1;
        for (level, &(pst, right)) in path.iter().enumerate().rev() {
            let bv = &self.levels[level];
            let pos = if right {
                bv.select1(bv.rank1(pst) + rel + 1).unwrap()
            } else {
                bv.select0(bv.rank0(pst) + rel + 1).unwrap()
            };
            rel = pos - 1 - pst;
        }
        Some(rel + 1)
    }

    /// Smallest symbol `>= c` occurring in `S[l..=r]`.
    pub fn range_next_value(&self, l: usize, r: usize, c: u32) -> Option<u32> {
        let seg = self.root(l, r);
        if seg.is_empty() || c > self.sigma {
            return None;
        }
        self.next_value_rec(0, 1, self.sigma, seg, c.max(1))
    }

    fn next_value_rec(&self, level: usize, a: u32, b: u32, seg: Seg, c: u32) -> Option<u32> {
        if seg.is_empty() || b < c {
            return None;
        }
        if a == b {
            return Some(a);
        }
        let m = mid(a, b);
        let (left, right) = self.split(level, seg);
        if c <= m {
            if let Some(v) = self.next_value_rec(level + 1, a, m, left, c) {
                return Some(v);
            }
        }
        self.next_value_rec(level + 1, m + 1, b, right, c)
    }

    /// Elements of `S[l..=r]` with value in `[lo, hi]`.
    pub fn range_count(&self, l: usize, r: usize, lo: u32, hi: u32) -> usize {
        let seg = self.root(l, r);
        let hi = hi.min(self.sigma);
        if seg.is_empty() || lo > hi {
            return 0;
        }
        self.count_rec(0, 1, self.sigma, seg, lo, hi)
    }

    fn count_rec(&self, level: usize, a: u32, b: u32, seg: Seg, lo: u32, hi: u32) -> usize {
        if seg.is_empty() || b < lo || a > hi {
            return 0;
        }
        if lo <= a && b <= hi {
            return seg.len();
        }
        let m = mid(a, b);
        let (left, right) = self.split(level, seg);
        self.count_rec(level + 1, a, m, left, lo, hi)
            + self.count_rec(level + 1, m + 1, b, right, lo, hi)
    }

    pub fn size_in_bytes(&self) -> usize {
        self.levels.iter().map(B::size_in_bytes).sum::<usize>() + self.counts.size_in_bytes()
    }
}

/// Checks that every range runs over the same alphabet.
fn common_sigma<B: BitSeq>(ranges: &[RangeRef<'_, B>]) -> Result<u32> {
    let sigma = ranges.first().map_or(1, |r| r.tree.sigma);
    for r in ranges {
        if r.tree.sigma != sigma {
            return Err(Error::AlphabetMismatch {
                left: sigma,
                right: r.tree.sigma,
            });
        }
    }
    Ok(sigma)
}

/// Synchronized descent over several trees sharing an alphabet. Segments
/// for level `d` live in `buf[d * k..(d + 1) * k]`.
struct MultiWalk<'r, 'a, B> {
    ranges: &'r [RangeRef<'a, B>],
    k: usize,
    buf: Vec<Seg>,
}

impl<'r, 'a, B: BitSeq> MultiWalk<'r, 'a, B> {
    fn new(ranges: &'r [RangeRef<'a, B>]) -> Self {
        let k = ranges.len();
        let depth = ranges.iter().map(|r| r.tree.depth()).max().unwrap_or(0);
        let mut buf = vec![Seg::default(); k * (depth + 2)];
        for (i, r) in ranges.iter().enumerate() {
            buf[i] = r.tree.root(r.l, r.r);
        }
        Self { ranges, k, buf }
    }

    fn any_empty(&self, d: usize) -> bool {
        self.buf[d * self.k..(d + 1) * self.k]
            .iter()
            .any(Seg::is_empty)
    }

    fn all_empty(&self, d: usize) -> bool {
        self.buf[d * self.k..(d + 1) * self.k]
            .iter()
            .all(Seg::is_empty)
    }

    /// Writes the `right` (or left) children of level-`d` segments into
    /// level `d + 1`.
    fn descend(&mut self, d: usize, right: bool) {
        for i in 0..self.k {
            let seg = self.buf[d * self.k + i];
            let (l, r) = self.ranges[i].tree.split(d, seg);
            self.buf[(d + 1) * self.k + i] = if right { r } else { l };
        }
    }

    fn next_common(&mut self, d: usize, a: u32, b: u32, c: u32) -> Option<u32> {
        if b < c || self.any_empty(d) {
            return None;
        }
        if a == b {
            return Some(a);
        }
        let m = mid(a, b);
        if c <= m {
            self.descend(d, false);
            if let Some(v) = self.next_common(d + 1, a, m, c) {
                return Some(v);
            }
        }
        self.descend(d, true);
        self.next_common(d + 1, m + 1, b, c)
    }

    fn collect_common(&mut self, d: usize, a: u32, b: u32, out: &mut Vec<u32>) {
        if self.any_empty(d) {
            return;
        }
        if a == b {
            out.push(a);
            return;
        }
        let m = mid(a, b);
        self.descend(d, false);
        self.collect_common(d + 1, a, m, out);
        self.descend(d, true);
        self.collect_common(d + 1, m + 1, b, out);
    }

    fn partitions(&mut self, d: usize, a: u32, b: u32, k: usize, out: &mut Vec<Partition>) {
        if self.all_empty(d) {
            return;
        }
        if a == b || d == k {
            out.push(Partition {
                lo: a,
                hi: b,
                counts: self.buf[d * self.k..(d + 1) * self.k]
                    .iter()
                    .map(Seg::len)
                    .collect(),
            });
            return;
        }
        let m = mid(a, b);
        self.descend(d, false);
        self.partitions(d + 1, a, m, k, out);
        self.descend(d, true);
        self.partitions(d + 1, m + 1, b, k, out);
    }
}

/// Ascending symbols occurring in every range.
pub fn range_intersect<B: BitSeq>(ranges: &[RangeRef<'_, B>]) -> Result<Vec<u32>> {
    let sigma = common_sigma(ranges)?;
    let mut out = Vec::new();
    if ranges.is_empty() {
        return Ok(out);
    }
    MultiWalk::new(ranges).collect_common(0, 1, sigma, &mut out);
    Ok(out)
}

/// Smallest symbol `>= c` occurring in every range.
pub fn range_intersect_next<B: BitSeq>(ranges: &[RangeRef<'_, B>], c: u32) -> Result<Option<u32>> {
    let sigma = common_sigma(ranges)?;
    if ranges.is_empty() || c > sigma {
        return Ok(None);
    }
    Ok(MultiWalk::new(ranges).next_common(0, 1, sigma, c.max(1)))
}

/// Descends all ranges `k` levels together and reports each reached
/// alphabet partition with the per-range element counts. Partitions empty in
/// every range are omitted, so each range's counts sum to its length.
pub fn partition_weights<B: BitSeq>(ranges: &[RangeRef<'_, B>], k: usize) -> Result<Vec<Partition>> {
    let sigma = common_sigma(ranges)?;
    let mut out = Vec::new();
    if ranges.is_empty() {
        return Ok(out);
    }
    MultiWalk::new(ranges).partitions(0, 1, sigma, k, &mut out);
    Ok(out)
}

/// Sum over the level-`k` partitions of the minimum per-range count.
pub fn refined_weight<B: BitSeq>(ranges: &[RangeRef<'_, B>], k: usize) -> Result<usize> {
    Ok(partition_weights(ranges, k)?.iter().map(Partition::min).sum())
}

impl<B: BitSeq> Persist for WaveletTree<B> {
    fn encode(&self, enc: &mut Encoder) {
        enc.put_usize(self.n);
        enc.put_u32(self.sigma);
        enc.put_usize(self.levels.len());
        for l in &self.levels {
            l.encode(enc);
        }
        self.counts.encode(enc);
    }

    fn decode(dec: &mut Decoder<'_>) -> Result<Self> {
        let n = dec.get_usize()?;
        let sigma = dec.get_u32()?;
        let depth = dec.get_usize()?;
        if sigma == 0 || depth != depth_for(sigma) {
            return Err(dec.error("wavelet tree shape is inconsistent"));
        }
        let mut levels = Vec::with_capacity(depth);
        for _ in 0..depth {
            let l = B::decode(dec)?;
            if l.len() != n {
                return Err(dec.error("wavelet level has wrong length"));
            }
            levels.push(l);
        }
        let counts = B::decode(dec)?;
        if counts.len() != n + sigma as usize || counts.count_ones() != sigma as usize {
            return Err(dec.error("wavelet symbol counts are inconsistent"));
        }
        Ok(Self {
            n,
            sigma,
            levels,
            counts,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::succinct::{BitVector, CompressedBitVector};
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    type Wt = WaveletTree<BitVector>;

    fn fig2() -> Vec<u32> {
        vec![5, 3, 1, 4, 6, 6, 6, 6, 6, 6, 6, 6, 6]
    }

    fn distinct(s: &[u32], l: usize, r: usize) -> BTreeSet<u32> {
        if l > r || l == 0 || r > s.len() {
            return BTreeSet::new();
        }
        s[l - 1..r].iter().copied().collect()
    }

    #[test]
    fn fig2_primitives() {
        let wt = Wt::new(&fig2(), 6).unwrap();
        assert_eq!(wt.access(4).unwrap(), 4);
        assert_eq!(wt.rank(6, 13).unwrap(), 9);
        assert_eq!(wt.select(6, 1), Some(5));
        assert_eq!(wt.range_next_value(1, 4, 2), Some(3));
        assert_eq!(wt.range_next_value(1, 4, 7), None);
        assert_eq!(wt.range_next_value(5, 13, 1), Some(6));
        assert_eq!(wt.range_count(1, 4, 1, 3), 2);
        assert_eq!(wt.range_count(5, 8, 1, 3), 0);
        assert_eq!(wt.range_count(1, 13, 7, 9), 0);

        let r = |l, r| RangeRef::new(&wt, l, r);
        assert!(range_intersect(&[r(1, 4), r(5, 8)]).unwrap().is_empty());
        assert_eq!(range_intersect(&[r(1, 4)]).unwrap(), vec![1, 3, 4, 5]);
        assert_eq!(range_intersect(&[r(5, 8), r(9, 13)]).unwrap(), vec![6]);
    }

    #[test]
    fn table1_partitions() {
        let wt = Wt::new(&fig2(), 6).unwrap();
        let ranges = [RangeRef::new(&wt, 1, 4), RangeRef::new(&wt, 5, 8)];
        let p0 = partition_weights(&ranges, 0).unwrap();
        assert_eq!(
            p0,
            vec![Partition {
                lo: 1,
                hi: 6,
                counts: vec![4, 4]
            }]
        );
        let p1 = partition_weights(&ranges, 1).unwrap();
        assert_eq!(
            p1,
            vec![
                Partition {
                    lo: 1,
                    hi: 3,
                    counts: vec![2, 0]
                },
                Partition {
                    lo: 4,
                    hi: 6,
                    counts: vec![2, 4]
                },
            ]
        );
        let p2 = partition_weights(&ranges, 2).unwrap();
        assert_eq!(p2.len(), 4);
        assert!(p2.iter().all(|p| p.min() == 0));
        assert_eq!(refined_weight(&ranges, 0).unwrap(), 4);
        assert_eq!(refined_weight(&ranges, 1).unwrap(), 2);
        assert_eq!(refined_weight(&ranges, 2).unwrap(), 0);
        assert_eq!(
            alphabet_partitions(6, 2),
            vec![(1, 2), (3, 3), (4, 5), (6, 6)]
        );
    }

    #[test]
    fn access_rank_and_counts() {
        let s = fig2();
        let wt = Wt::new(&s, 8).unwrap();
        for i in 1..=s.len() {
            let (c, r) = wt.access_rank(i).unwrap();
            assert_eq!(c, s[i - 1]);
            assert_eq!(r, s[..i].iter().filter(|&&x| x == c).count());
        }
        assert_eq!(wt.before(6), 4);
        assert_eq!(wt.before(9), 13);
        assert_eq!(wt.count(6), 9);
        assert_eq!(wt.count(7), 0);
        assert_eq!(wt.sorted_symbol(1), 1);
        assert_eq!(wt.sorted_symbol(5), 6);
        assert!(wt.access(0).is_err());
        assert!(wt.rank(9, 1).is_err());
        assert!(wt.rank(1, 14).is_err());
    }

    #[test]
    fn alphabet_mismatch_is_reported() {
        let a = Wt::new(&[1, 2], 4).unwrap();
        let b = Wt::new(&[1, 2], 5).unwrap();
        let err = range_intersect(&[RangeRef::new(&a, 1, 2), RangeRef::new(&b, 1, 2)]);
        assert!(matches!(err, Err(Error::AlphabetMismatch { .. })));
    }

    #[test]
    fn degenerate_alphabets() {
        let one = Wt::new(&[1, 1, 1], 1).unwrap();
        assert_eq!(one.depth(), 0);
        assert_eq!(one.access(2).unwrap(), 1);
        assert_eq!(one.rank(1, 2).unwrap(), 2);
        assert_eq!(one.select(1, 3), Some(3));
        let empty = Wt::new(&[], 5).unwrap();
        assert_eq!(empty.range_next_value(1, 0, 1), None);
        assert_eq!(empty.count(3), 0);
        assert!(Wt::new(&[0], 3).is_err());
        assert!(Wt::new(&[4], 3).is_err());
    }

    fn seq_strategy() -> impl Strategy<Value = (Vec<u32>, u32)> {
        (1u32..300).prop_flat_map(|sigma| {
            (proptest::collection::vec(1..=sigma, 0..400), Just(sigma))
        })
    }

    proptest! {
        #[test]
        fn primitives_match_scans((s, sigma) in seq_strategy(), q in any::<[u32; 6]>()) {
            let wt = Wt::new(&s, sigma).unwrap();
            let cw = WaveletTree::<CompressedBitVector>::new(&s, sigma).unwrap();
            let n = s.len();
            let c = q[0] % (sigma + 2);
            let (l, r) = if n == 0 { (1, 0) } else {
                let a = 1 + q[1] as usize % n;
                let b = 1 + q[2] as usize % n;
                (a.min(b), a.max(b))
            };
            if (1..=sigma).contains(&c) {
                for i in 0..=n {
                    let want = s[..i].iter().filter(|&&x| x == c).count();
                    prop_assert_eq!(wt.rank(c, i).unwrap(), want);
                    prop_assert_eq!(cw.rank(c, i).unwrap(), want);
                }
                let occ: Vec<usize> = (1..=n).filter(|&p| s[p - 1] == c).collect();
                for j in 1..=occ.len() + 1 {
                    prop_assert_eq!(wt.select(c, j), occ.get(j - 1).copied());
                }
            }
            for i in 1..=n {
                prop_assert_eq!(wt.access(i).unwrap(), s[i - 1]);
            }
            let d = distinct(&s, l, r);
            prop_assert_eq!(wt.range_next_value(l, r, c), d.range(c.max(1)..).next().copied());
            prop_assert_eq!(cw.range_next_value(l, r, c), d.range(c.max(1)..).next().copied());
            let lo = 1 + q[3] % sigma;
            let hi = 1 + q[4] % sigma;
            let want = if l <= r { s[l - 1..r].iter().filter(|&&x| lo <= x && x <= hi).count() } else { 0 };
            prop_assert_eq!(wt.range_count(l, r, lo, hi), want);
            if l <= r {
                prop_assert_eq!(wt.range_count(l, r, 1, sigma), r - l + 1);
            }
        }

        #[test]
        fn multi_range_ops_match_scans((s, sigma) in seq_strategy(), bounds in proptest::collection::vec((any::<usize>(), any::<usize>()), 1..5), c in 0u32..320, k in 0usize..6) {
            let wt = Wt::new(&s, sigma).unwrap();
            let n = s.len();
            let iv: Vec<(usize, usize)> = bounds.iter().map(|&(a, b)| {
                if n == 0 { (1, 0) } else {
                    let a = 1 + a % n;
                    let b = 1 + b % n;
                    (a.min(b), a.max(b))
                }
            }).collect();
            let ranges: Vec<_> = iv.iter().map(|&(l, r)| RangeRef::new(&wt, l, r)).collect();
            let mut want = distinct(&s, iv[0].0, iv[0].1);
            for &(l, r) in &iv[1..] {
                let d = distinct(&s, l, r);
                want.retain(|x| d.contains(x));
            }
            let got = range_intersect(&ranges).unwrap();
            prop_assert_eq!(&got, &want.iter().copied().collect::<Vec<_>>());
            prop_assert_eq!(range_intersect_next(&ranges, c).unwrap(), want.range(c.max(1)..).next().copied());

            let parts = partition_weights(&ranges, k).unwrap();
            for (i, &(l, r)) in iv.iter().enumerate() {
                let total: usize = parts.iter().map(|p| p.counts[i]).sum();
                prop_assert_eq!(total, if l <= r { r - l + 1 } else { 0 });
            }
            let w_k = refined_weight(&ranges, k).unwrap();
            let w_next = refined_weight(&ranges, k + 1).unwrap();
            prop_assert!(w_next <= w_k);
            prop_assert!(w_k >= want.len());
        }

        #[test]
        fn persist_round_trip((s, sigma) in seq_strategy()) {
            let wt = Wt::new(&s, sigma).unwrap();
            let back = Wt::from_bytes(&wt.to_bytes(), "wt").unwrap();
            prop_assert_eq!(back, wt);
        }
    }
}
