//! Pair of rings over the spo and ops orders. Every unbound role is read
//! from the last column of one of the two, so candidate values for a
//! variable come from a single multi-range wavelet intersection.

use super::{Ring, RingCursor};
use crate::error::Result;
use crate::ingest::container::Container;
use crate::ltj::{PatternCursor, TripleIndex};
use crate::model::{Id, Role, Triple};
use crate::par::{self, Parallelism};
use crate::succinct::BitSeq;
use crate::wavelet::{range_intersect, range_intersect_next, RangeRef};

/// Swaps subject and object.
fn flip(x: Role) -> Role {
    match x {
        Role::S => Role::O,
        Role::P => Role::P,
        Role::O => Role::S,
    }
}

fn flip_triple(t: &Triple) -> Triple {
    Triple::new(t.0[2], t.0[1], t.0[0])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct URing<B> {
    spo: Ring<B>,
    /// Built over `(o, p, s)`; its subject role holds objects.
    ops: Ring<B>,
}

impl<B: BitSeq> URing<B> {
    pub fn build(triples: &[Triple], universe: u32, mode: Parallelism) -> Result<Self> {
        let flipped: Vec<Triple> = triples.iter().map(flip_triple).collect();
        let (spo, ops) = par::join(
            || Ring::build(triples, universe, false, mode),
            || Ring::build(&flipped, universe, false, mode),
            mode,
        );
        Ok(Self {
            spo: spo?,
            ops: ops?,
        })
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    pub fn spo(&self) -> &Ring<B> {
        &self.spo
    }

    pub fn ops(&self) -> &Ring<B> {
        &self.ops
    }

    /// Triples decoded from the ops ring, in spo labelling.
    pub fn ops_triples(&self) -> Vec<Triple> {
        self.ops.triples().iter().map(flip_triple).collect()
    }

    pub fn cursor(&self, consts: [Option<Id>; 3]) -> URingCursor<'_, B> {
        let mut flipped = [None; 3];
        for x in Role::ALL {
            flipped[flip(x).index()] = consts[x.index()];
        }
        URingCursor {
            spo: self.spo.cursor(consts),
            ops: self.ops.cursor(flipped),
        }
    }

    /// Every constant admissible for a variable read at the given
    /// (cursor, role) positions, ascending.
    pub fn intersect(cursors: &[URingCursor<'_, B>], parts: &[(usize, Role)]) -> Vec<Id> {
        match collect_ranges(cursors, parts) {
            Some(ranges) => range_intersect(&ranges).unwrap_or_default(),
            None => Vec::new(),
        }
    }

    pub fn size_in_bytes(&self) -> usize {
        self.spo.size_in_bytes() + self.ops.size_in_bytes()
    }

    pub(crate) fn save(&self, c: &mut Container) {
        self.spo.save(c, "spo");
        self.ops.save(c, "ops");
    }

    pub(crate) fn load(c: &Container) -> Result<Self> {
        Ok(Self {
            spo: Ring::load(c, "spo", false)?,
            ops: Ring::load(c, "ops", false)?,
        })
    }
}

fn collect_ranges<'a, B: BitSeq>(
    cursors: &[URingCursor<'a, B>],
    parts: &[(usize, Role)],
) -> Option<Vec<RangeRef<'a, B>>> {
    parts
        .iter()
        .map(|&(i, x)| cursors[i].left_range(x))
        .collect()
}

#[derive(Clone, Debug)]
pub struct URingCursor<'a, B> {
    spo: RingCursor<'a, B>,
    ops: RingCursor<'a, B>,
}

impl<'a, B: BitSeq> URingCursor<'a, B> {
    /// The last-column range holding the values of `x`, from whichever
    /// ring has `x` left-adjacent.
    pub fn left_range(&self, x: Role) -> Option<RangeRef<'a, B>> {
        if self.spo.is_empty() {
            return Some(RangeRef::new(self.spo.ring().column(x), 1, 0));
        }
        self.spo
            .left_range(x)
            .or_else(|| self.ops.left_range(flip(x)))
    }

    fn in_spo(&self, x: Role) -> bool {
        self.spo.state().left_adjacent(x)
    }
}

impl<B: BitSeq> PatternCursor for URingCursor<'_, B> {
    fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    fn leap(&self, x: Role, c: Id) -> Option<Id> {
        if self.in_spo(x) {
            self.spo.leap(x, c)
        } else {
            self.ops.leap(flip(x), c)
        }
    }

    fn down(&mut self, x: Role, c: Id) {
        self.spo.down(x, c);
        self.ops.down(flip(x), c);
    }

    fn up(&mut self) {
        self.spo.up();
        self.ops.up();
    }

    fn range_size(&self) -> usize {
        self.spo.range_size()
    }

    fn distinct_children(&self, _x: Role) -> Option<usize> {
        None
    }

    fn partition_counts(&self, x: Role, k: usize) -> Option<Vec<(u32, u32, usize)>> {
        if self.in_spo(x) {
            self.spo.partition_counts(x, k)
        } else {
            self.ops.partition_counts(flip(x), k)
        }
    }
}

impl<B: BitSeq> TripleIndex for URing<B> {
    type Cursor<'a>
        = URingCursor<'a, B>
    where
        Self: 'a;

    fn open(&self, consts: [Option<Id>; 3]) -> Self::Cursor<'_> {
        self.cursor(consts)
    }

    fn len(&self) -> usize {
        self.spo.len()
    }

    fn universe(&self) -> u32 {
        self.spo.universe()
    }

    fn next_common<'a>(
        &'a self,
        cursors: &[Self::Cursor<'a>],
        parts: &[(usize, Role)],
        c: Id,
        leaps: &mut u64,
    ) -> Option<Id> {
        *leaps += 1;
        let ranges = collect_ranges(cursors, parts)?;
        range_intersect_next(&ranges, c).ok().flatten()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::succinct::BitVector;

    #[test]
    fn both_rings_hold_the_same_triples() {
        let t = vec![Triple::new(1, 1, 2), Triple::new(1, 2, 3), Triple::new(2, 1, 2)];
        let u = URing::<BitVector>::build(&t, 3, Parallelism::Sequential).unwrap();
        let mut a = u.spo().triples();
        let mut b = u.ops_triples();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert_eq!(a, t);
    }

    #[test]
    fn intersection_over_two_patterns() {
        let t = vec![Triple::new(1, 1, 2), Triple::new(1, 2, 3), Triple::new(2, 1, 2)];
        let u = URing::<BitVector>::build(&t, 3, Parallelism::Sequential).unwrap();
        let cursors = vec![
            u.cursor([None, Some(1), Some(2)]),
            u.cursor([None, Some(2), Some(3)]),
        ];
        let parts = [(0, Role::S), (1, Role::S)];
        assert_eq!(URing::intersect(&cursors, &parts), vec![1]);
        assert_eq!(URing::intersect(&cursors[..1], &parts[..1]), vec![1, 2]);
        let mut leaps = 0;
        assert_eq!(u.next_common(&cursors, &parts, 1, &mut leaps), Some(1));
        assert_eq!(u.next_common(&cursors, &parts, 2, &mut leaps), None);
        let disjoint = vec![u.cursor([Some(2), None, None]), u.cursor([None, Some(2), None])];
        assert!(URing::intersect(&disjoint, &[(0, Role::O), (1, Role::O)]).is_empty());
    }
}
