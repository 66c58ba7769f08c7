//! The ring: three wavelet-tree columns emulating all six trie orders.
//!
//! Table `T_r` lists the triples sorted cyclically starting at role `r`
//! (`T_spo`, `T_pos`, `T_osp`). Only its last column is stored: `C_o` for
//! `T_spo`, `C_p` for `T_osp`, `C_s` for `T_pos`. In general the column of
//! role `x` is the last column of `T_{next(x)}`, and its symbol counts give
//! `A_x`, so rows of `T_x` starting with `c` are `A_x[c]+1 ..= A_x[c+1]`.

mod uring;

pub use uring::{URing, URingCursor};

use crate::error::{Error, Result};
use crate::ingest::container::Container;
use crate::ltj::{PatternCursor, TripleIndex};
use crate::model::{Id, Role, Triple};
use crate::par::{self, Parallelism};
use crate::succinct::BitSeq;
use crate::wavelet::{alphabet_partitions, partition_weights, RangeRef, WaveletTree};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ring<B> {
    n: usize,
    universe: u32,
    /// Indexed by role: `cols[x]` is `C_x`.
    cols: [WaveletTree<B>; 3],
    /// `M_x[i]`: one plus the last row before `i` holding the same symbol
    /// in `C_x` (1 when there is none).
    prev_occ: Option<[WaveletTree<B>; 3]>,
}

/// Sorts, deduplicates and range-checks triples.
pub fn normalize_triples(triples: &[Triple], universe: u32, mode: Parallelism) -> Result<Vec<Triple>> {
    for t in triples {
        for &id in &t.0 {
            if id == 0 || id > universe {
                return Err(Error::IdOutOfRange { id, universe });
            }
        }
    }
    let mut v = triples.to_vec();
    par::sort_unstable(&mut v, mode);
    v.dedup();
    Ok(v)
}

fn prev_occurrence_column<B: BitSeq>(col: &[u32], universe: u32) -> Result<WaveletTree<B>> {
    let mut last = vec![0u32; universe as usize + 1];
    let mut m = Vec::with_capacity(col.len());
    for (i, &c) in col.iter().enumerate() {
        m.push(last[c as usize] + 1);
        last[c as usize] = i as u32 + 1;
    }
    WaveletTree::new(&m, col.len().max(1) as u32)
}

impl<B: BitSeq> Ring<B> {
    /// Builds from triples with ids in `1..=universe`; duplicates are
    /// dropped. `with_children` adds the arrays for distinct counting.
    pub fn build(
        triples: &[Triple],
        universe: u32,
        with_children: bool,
        mode: Parallelism,
    ) -> Result<Self> {
        let triples = normalize_triples(triples, universe, mode)?;
        let universe = universe.max(1);
        let column_of = |x: Role| -> Vec<u32> {
            // T_{next(x)} sorted, last column holds x
            let first = x.next();
            let mut rows: Vec<[Id; 3]> = triples.iter().map(|t| t.rotated(first)).collect();
            par::sort_unstable(&mut rows, mode);
            rows.iter().map(|r| r[2]).collect()
        };
        let (cs, cp, co) = par::join3(
            || column_of(Role::S),
            || column_of(Role::P),
            || column_of(Role::O),
            mode,
        );
        let raw = [cs, cp, co];
        let tree = |x: usize| WaveletTree::<B>::new(&raw[x], universe);
        let (ts, tp, to) = par::join3(|| tree(0), || tree(1), || tree(2), mode);
        let cols = [ts?, tp?, to?];
        let prev_occ = if with_children {
            let m = |x: usize| prev_occurrence_column::<B>(&raw[x], universe);
            let (ms, mp, mo) = par::join3(|| m(0), || m(1), || m(2), mode);
            Some([ms?, mp?, mo?])
        } else {
            None
        };
        Ok(Self {
            n: triples.len(),
            universe,
            cols,
            prev_occ,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    pub fn has_children(&self) -> bool {
        self.prev_occ.is_some()
    }

    /// `C_x`.
    pub fn column(&self, x: Role) -> &WaveletTree<B> {
        &self.cols[x.index()]
    }

    /// `A_x[c]`: rows of `T_x` whose first value is below `c`.
    #[inline]
    pub fn a(&self, x: Role, c: Id) -> usize {
        self.cols[x.index()].before(c)
    }

    /// Moves row `i` of `T_{next(j)}` to the row of the same triple in `T_j`.
    pub fn lf_step(&self, j: Role, i: usize) -> Result<usize> {
        let (c, r) = self.cols[j.index()].access_rank(i)?;
        Ok(self.a(j, c) + r)
    }

    /// Inverse of [`Ring::lf_step`].
    pub fn lf_step_inv(&self, j: Role, i: usize) -> Result<usize> {
        let col = &self.cols[j.index()];
        if i == 0 || i > self.n {
            return Err(Error::OutOfRange { pos: i, len: self.n });
        }
        let c = col.sorted_symbol(i);
        Ok(col.select(c, i - col.before(c)).unwrap())
    }

    /// Restricts rows `[s, e]` of `T_{next(j)}` to those preceded by `c` in
    /// role `j`, giving a range of `T_j`; empty when `s' > e'`.
    pub fn backward_step(&self, j: Role, s: usize, e: usize, c: Id) -> (usize, usize) {
        if c == 0 || c > self.universe || s > e || s == 0 || e > self.n {
            return (1, 0);
        }
        let col = &self.cols[j.index()];
        let base = col.before(c);
        (
            base + col.rank_unchecked(c, s - 1) + 1,
            base + col.rank_unchecked(c, e),
        )
    }

    /// Decodes all triples in `T_spo` order.
    pub fn triples(&self) -> Vec<Triple> {
        (1..=self.n)
            .map(|i| {
                let (o, _) = self.cols[Role::O.index()].access_rank(i).unwrap();
                let i2 = self.lf_step(Role::O, i).unwrap();
                let p = self.cols[Role::P.index()].access(i2).unwrap();
                let i3 = self.lf_step(Role::P, i2).unwrap();
                let s = self.cols[Role::S.index()].access(i3).unwrap();
                Triple::new(s, p, o)
            })
            .collect()
    }

    /// Opens a cursor with the given constants bound.
    pub fn cursor(&self, consts: [Option<Id>; 3]) -> RingCursor<'_, B> {
        let mut cur = RingCursor::new(self);
        for x in Role::ALL {
            if let Some(c) = consts[x.index()] {
                cur.down(x, c);
            }
        }
        cur.trail.clear();
        cur
    }

    pub fn size_in_bytes(&self) -> usize {
        let m: usize = self
            .prev_occ
            .iter()
            .flatten()
            .map(WaveletTree::size_in_bytes)
            .sum();
        self.cols.iter().map(WaveletTree::size_in_bytes).sum::<usize>() + m
    }

    pub(crate) fn save(&self, c: &mut Container, prefix: &str) {
        for x in Role::ALL {
            c.put(&format!("{prefix}.col_{}", x.name()), &self.cols[x.index()]);
        }
        if let Some(m) = &self.prev_occ {
            for x in Role::ALL {
                c.put(&format!("{prefix}.m_{}", x.name()), &m[x.index()]);
            }
        }
    }

    pub(crate) fn load(c: &Container, prefix: &str, with_children: bool) -> Result<Self> {
        let col = |x: Role| -> Result<WaveletTree<B>> {
            let name = format!("{prefix}.col_{}", x.name());
            let t: WaveletTree<B> = c.get(&name)?;
            if t.len() != c.n() as usize || t.sigma() != c.universe().max(1) {
                return Err(Error::corrupt(&name, "column shape does not match header"));
            }
            Ok(t)
        };
        let cols = [col(Role::S)?, col(Role::P)?, col(Role::O)?];
        let prev_occ = if with_children {
            let m = |x: Role| -> Result<WaveletTree<B>> {
                let name = format!("{prefix}.m_{}", x.name());
                let t: WaveletTree<B> = c.get(&name)?;
                if t.len() != c.n() as usize {
                    return Err(Error::corrupt(&name, "array length does not match header"));
                }
                Ok(t)
            };
            Some([m(Role::S)?, m(Role::P)?, m(Role::O)?])
        } else {
            None
        };
        Ok(Self {
            n: c.n() as usize,
            universe: c.universe().max(1),
            cols,
            prev_occ,
        })
    }
}

/// Bound roles form a cyclic run `start, next(start), ...` of length `len`;
/// `[l, r]` is the matching row range of `T_start`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct RingState {
    pub start: Role,
    pub len: u8,
    pub l: usize,
    pub r: usize,
    pub vals: [Id; 3],
}

impl RingState {
    fn is_empty(&self) -> bool {
        self.l > self.r
    }

    fn is_bound(&self, x: Role) -> bool {
        self.vals[x.index()] != 0
    }

    /// Whether `x` is read from the last column of the current table.
    pub fn left_adjacent(&self, x: Role) -> bool {
        self.len == 0 || (self.len < 3 && x == self.start.prev())
    }
}

#[derive(Clone, Debug)]
pub struct RingCursor<'a, B> {
    ring: &'a Ring<B>,
    state: RingState,
    trail: Vec<RingState>,
}

impl<'a, B: BitSeq> RingCursor<'a, B> {
    fn new(ring: &'a Ring<B>) -> Self {
        Self {
            ring,
            state: RingState {
                start: Role::S,
                len: 0,
                l: 1,
                r: ring.n,
                vals: [0; 3],
            },
            trail: Vec::with_capacity(3),
        }
    }

    pub(crate) fn state(&self) -> &RingState {
        &self.state
    }

    pub fn ring(&self) -> &'a Ring<B> {
        self.ring
    }

    /// Row range of the bound prefix, `(l, r)` with `l > r` when empty.
    pub fn range(&self) -> (usize, usize) {
        (self.state.l, self.state.r)
    }

    /// The column and range from which values of `x` can be read directly.
    pub fn left_range(&self, x: Role) -> Option<RangeRef<'a, B>> {
        let st = &self.state;
        if st.is_bound(x) || !st.left_adjacent(x) {
            return None;
        }
        Some(RangeRef::new(self.ring.column(x), st.l, st.r))
    }

    fn bind(&self, x: Role, c: Id) -> RingState {
        let ring = self.ring;
        let st = self.state;
        let mut out = st;
        out.vals[x.index()] = c.max(1);
        out.len += 1;
        if st.is_empty() || c == 0 || c > ring.universe || st.is_bound(x) {
            out.l = 1;
            out.r = 0;
            return out;
        }
        if st.len == 0 {
            out.start = x;
            out.l = ring.a(x, c) + 1;
            out.r = ring.a(x, c + 1);
        } else if x == st.start.prev() {
            let (l, r) = ring.backward_step(x, st.l, st.r, c);
            out.start = x;
            out.l = l;
            out.r = r;
        } else {
            debug_assert!(st.len == 1 && x == st.start.next());
            let b = st.start;
            let v = st.vals[b.index()];
            let cb = ring.column(b);
            let base = ring.a(b, v);
            out.l = base + cb.rank_unchecked(v, ring.a(x, c)) + 1;
            out.r = base + cb.rank_unchecked(v, ring.a(x, c + 1));
        }
        out
    }
}

impl<B: BitSeq> PatternCursor for RingCursor<'_, B> {
    fn is_empty(&self) -> bool {
        self.state.is_empty()
    }

    fn leap(&self, x: Role, c: Id) -> Option<Id> {
        let st = &self.state;
        let ring = self.ring;
        if st.is_empty() || st.is_bound(x) || c > ring.universe {
            return None;
        }
        let c = c.max(1);
        if st.left_adjacent(x) {
            return ring.column(x).range_next_value(st.l, st.r, c);
        }
        // right-adjacent: one bound role b, x follows it
        let b = st.start;
        let v = st.vals[b.index()];
        let cb = ring.column(b);
        let base = ring.a(b, v);
        let first = base + cb.rank_unchecked(v, ring.a(x, c)) + 1;
        if first > st.r {
            return None;
        }
        let row = cb.select(v, first - base).unwrap();
        Some(ring.column(x).sorted_symbol(row))
    }

    fn down(&mut self, x: Role, c: Id) {
        let next = self.bind(x, c);
        self.trail.push(self.state);
        self.state = next;
    }

    fn up(&mut self) {
        if let Some(s) = self.trail.pop() {
            self.state = s;
        }
    }

    fn range_size(&self) -> usize {
        let st = &self.state;
        if st.is_empty() {
            0
        } else {
            st.r - st.l + 1
        }
    }

    fn distinct_children(&self, x: Role) -> Option<usize> {
        let m = self.ring.prev_occ.as_ref()?;
        let st = &self.state;
        if st.is_empty() {
            return Some(0);
        }
        if st.left_adjacent(x) {
            Some(m[x.index()].range_count(st.l, st.r, 1, st.l as u32))
        } else {
            Some(self.range_size())
        }
    }

    fn partition_counts(&self, x: Role, k: usize) -> Option<Vec<(u32, u32, usize)>> {
        let st = &self.state;
        let ring = self.ring;
        if st.is_empty() {
            return Some(Vec::new());
        }
        if st.left_adjacent(x) {
            let parts = partition_weights(&[RangeRef::new(ring.column(x), st.l, st.r)], k).ok()?;
            return Some(
                parts
                    .into_iter()
                    .map(|p| (p.lo, p.hi, p.counts[0]))
                    .collect(),
            );
        }
        let b = st.start;
        let v = st.vals[b.index()];
        let cb = ring.column(b);
        Some(
            alphabet_partitions(ring.universe, k)
                .into_iter()
                .map(|(lo, hi)| {
                    let w = cb.rank_unchecked(v, ring.a(x, hi + 1))
                        - cb.rank_unchecked(v, ring.a(x, lo));
                    (lo, hi, w)
                })
                .filter(|p| p.2 > 0)
                .collect(),
        )
    }
}

impl<B: BitSeq> TripleIndex for Ring<B> {
    type Cursor<'a>
        = RingCursor<'a, B>
    where
        Self: 'a;

    fn open(&self, consts: [Option<Id>; 3]) -> Self::Cursor<'_> {
        self.cursor(consts)
    }

    fn len(&self) -> usize {
        self.n
    }

    fn universe(&self) -> u32 {
        self.universe
    }

    fn supports_children(&self) -> bool {
        self.has_children()
    }
}
