//! Two cyclic compressed suffix arrays over the triple text, one per
//! direction (spo and ops).
//!
//! Each triple contributes a cyclic string of three mapped symbols, with
//! role offsets keeping subjects, predicates and objects disjoint. Sorting
//! all 3n rotations gives three regions of the suffix array, one per role.
//! `D` marks where the first symbol changes and Ψ moves one symbol forward
//! inside the same triple, so Ψ³ is the identity.

mod alphabet;
mod psi;

pub use alphabet::RoleAlphabets;
pub use psi::{PlainPsi, PsiSeq, SampledPsi, PSI_SAMPLE};

use crate::error::{Error, Result};
use crate::ingest::container::Container;
use crate::ltj::{PatternCursor, TripleIndex};
use crate::model::{Id, Role, Triple};
use crate::par::{self, Parallelism};
use crate::ring::normalize_triples;
use crate::succinct::{BitSeq, BitVector, RawBits};

/// Symbol order of the cyclic strings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Spo,
    Ops,
}

impl Order {
    pub fn roles(self) -> [Role; 3] {
        match self {
            Order::Spo => [Role::S, Role::P, Role::O],
            Order::Ops => [Role::O, Role::P, Role::S],
        }
    }

    /// Region (0, 1 or 2) holding rotations that start with role `r`.
    pub fn region(self, r: Role) -> usize {
        self.roles().iter().position(|&x| x == r).unwrap()
    }

    /// The role read one Ψ step after `r`.
    pub fn after(self, r: Role) -> Role {
        match self {
            Order::Spo => r.next(),
            Order::Ops => r.prev(),
        }
    }

    fn tag(self) -> u8 {
        match self {
            Order::Spo => 0,
            Order::Ops => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rdfcsa<P> {
    n: usize,
    order: Order,
    /// Indexed by role.
    gaps: [u32; 3],
    /// Alphabet sizes `n_s, n_p, n_o`.
    sizes: [u32; 3],
    n_so: u32,
    d: BitVector,
    psi: P,
}

impl<P: PsiSeq> Rdfcsa<P> {
    /// Builds over triples given in role-local ids. Every local id in
    /// `1..=sizes[r]` must occur in role `r`.
    pub fn build_local(
        triples: &[Triple],
        sizes: [u32; 3],
        n_so: u32,
        order: Order,
        mode: Parallelism,
    ) -> Result<Self> {
        let seq = order.roles();
        let mut gaps = [0u32; 3];
        let mut acc = 0;
        for r in seq {
            gaps[r.index()] = acc;
            acc += sizes[r.index()];
        }
        let total = acc as usize;
        let mut rows: Vec<[u32; 3]> = Vec::with_capacity(triples.len());
        for t in triples {
            let mut row = [0; 3];
            for (k, r) in seq.into_iter().enumerate() {
                let v = t.get(r);
                if v == 0 || v > sizes[r.index()] {
                    return Err(Error::IdOutOfRange {
                        id: v,
                        universe: sizes[r.index()],
                    });
                }
                row[k] = v + gaps[r.index()];
            }
            rows.push(row);
        }
        par::sort_unstable(&mut rows, mode);
        rows.dedup();
        let n = rows.len();

        // rotation k of triple t sits at k*n + rank[k][t]
        let sorted_by = |k: usize| -> Vec<u32> {
            let mut idx: Vec<u32> = (0..n as u32).collect();
            if k > 0 {
                par::sort_unstable_by_key(
                    &mut idx,
                    |&t| {
                        let r = &rows[t as usize];
                        (r[k], r[(k + 1) % 3], r[(k + 2) % 3])
                    },
                    mode,
                );
            }
            idx
        };
        let (o0, o1, o2) = par::join3(|| sorted_by(0), || sorted_by(1), || sorted_by(2), mode);
        let orders = [o0, o1, o2];
        let mut rank = vec![[0u32; 3]; n];
        for (k, ord) in orders.iter().enumerate() {
            for (i, &t) in ord.iter().enumerate() {
                rank[t as usize][k] = (k * n + i + 1) as u32;
            }
        }
        let mut psi = vec![0u32; 3 * n];
        let mut bits = RawBits::with_capacity(3 * n);
        for (k, ord) in orders.iter().enumerate() {
            let mut prev = 0;
            for &t in ord {
                let t = t as usize;
                psi[rank[t][k] as usize - 1] = rank[t][(k + 1) % 3];
                let c = rows[t][k];
                bits.push(c != prev);
                prev = c;
            }
        }
        let d = BitVector::build(bits);
        if d.count_ones() != total {
            return Err(Error::Unsupported(
                "every role-local id must occur in the triples".into(),
            ));
        }
        Ok(Self {
            n,
            order,
            gaps,
            sizes,
            n_so,
            psi: P::build(&psi, n),
            d,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn gap(&self, r: Role) -> u32 {
        self.gaps[r.index()]
    }

    pub fn alphabet_size(&self, r: Role) -> u32 {
        self.sizes[r.index()]
    }

    pub fn n_so(&self) -> u32 {
        self.n_so
    }

    /// Number of distinct mapped symbols.
    pub fn symbols(&self) -> usize {
        self.sizes.iter().map(|&s| s as usize).sum()
    }

    pub fn d(&self) -> &BitVector {
        &self.d
    }

    #[inline]
    pub fn psi(&self, i: usize) -> usize {
        self.psi.get(i)
    }

    /// Mapped symbol starting the rotation at position `i`.
    #[inline]
    pub fn symbol(&self, i: usize) -> u32 {
        self.d.rank1(i) as u32
    }

    fn symbol_end(&self, c: u32) -> usize {
        if c as usize >= self.symbols() {
            3 * self.n
        } else {
            self.d.select1(c as usize + 1).unwrap() - 1
        }
    }

    /// Positions of rotations starting with mapped symbol `c`; `l > r`
    /// when `c` is not a symbol.
    pub fn range(&self, c: u32) -> (usize, usize) {
        if c == 0 || c as usize > self.symbols() {
            return (1, 0);
        }
        (self.d.select1(c as usize).unwrap(), self.symbol_end(c))
    }

    /// Positions covering mapped symbols `lo..=hi`.
    pub fn span(&self, lo: u32, hi: u32) -> (usize, usize) {
        (self.range(lo).0, self.symbol_end(hi))
    }

    /// Sub-range of `[l, r]` whose Ψ values fall in `[tl, tr]`. Ψ must be
    /// increasing on `[l, r]`.
    pub fn narrow(&self, l: usize, r: usize, tl: usize, tr: usize) -> (usize, usize) {
        if l > r || tl > tr {
            return (1, 0);
        }
        let a = self.first_psi_at_least(l, r, tl);
        let b = self.first_psi_at_least(a, r, tr + 1);
        if a >= b {
            (1, 0)
        } else {
            (a, b - 1)
        }
    }

    /// Sub-range of `[l, r]` (one first-symbol run) followed by symbol `d`.
    pub fn down(&self, l: usize, r: usize, d: u32) -> (usize, usize) {
        let (tl, tr) = self.range(d);
        self.narrow(l, r, tl, tr)
    }

    /// First position in `[l, r]` with Ψ `>= t`, or `r + 1`.
    fn first_psi_at_least(&self, mut lo: usize, r: usize, t: usize) -> usize {
        let mut hi = r + 1;
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.psi(mid) < t {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Smallest `i` in `[l, r]` with Ψ(i) in `[tl, tr]`. Ψ must be
    /// increasing on `[l, r]`.
    pub fn find_target_psi(&self, l: usize, r: usize, tl: usize, tr: usize) -> Option<usize> {
        if l > r {
            return None;
        }
        let i = self.first_psi_at_least(l, r, tl);
        (i <= r && self.psi(i) <= tr).then_some(i)
    }

    /// Smallest `i` in `[l, r]` with Ψ(Ψ(i)) in `[tl, tr]`, for `[l, r]`
    /// inside one first-symbol run. Ψ∘Ψ is increasing on each group of
    /// positions sharing their second symbol, so groups are searched in
    /// position order.
    pub fn find_target_psi2(&self, l: usize, r: usize, tl: usize, tr: usize) -> Option<usize> {
        if l > r || tl > tr {
            return None;
        }
        if r - l < 64 {
            return (l..=r).find(|&i| {
                let v = self.psi(self.psi(i));
                tl <= v && v <= tr
            });
        }
        let mut i = l;
        while i <= r {
            let second = self.symbol(self.psi(i));
            let group_end = self.first_psi_at_least(i, r, self.symbol_end(second) + 1) - 1;
            let (mut lo, mut hi) = (i, group_end + 1);
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if self.psi(self.psi(mid)) < tl {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            if lo <= group_end && self.psi(self.psi(lo)) <= tr {
                return Some(lo);
            }
            i = group_end + 1;
        }
        None
    }

    /// Last position of the region holding role `r`.
    pub fn limit_v(&self, r: Role) -> usize {
        (self.order.region(r) + 1) * self.n
    }

    /// Triple at position `i` of the first region, in local ids.
    pub fn local_triple(&self, i: usize) -> Triple {
        let seq = self.order.roles();
        let mut t = [0; 3];
        let mut p = i;
        for r in seq {
            t[r.index()] = self.symbol(p) - self.gap(r);
            p = self.psi(p);
        }
        Triple(t)
    }

    pub fn size_in_bytes(&self) -> usize {
        self.d.size_in_bytes() + self.psi.size_in_bytes() + 40
    }

    pub(crate) fn save(&self, c: &mut Container, prefix: &str) {
        let mut meta = crate::codec::Encoder::new();
        meta.put_u8(self.order.tag());
        meta.put_usize(self.n);
        for s in self.sizes {
            meta.put_u32(s);
        }
        meta.put_u32(self.n_so);
        c.put_raw(&format!("{prefix}.meta"), meta.into_bytes());
        c.put(&format!("{prefix}.d"), &self.d);
        c.put(&format!("{prefix}.psi"), &self.psi);
    }

    pub(crate) fn load(c: &Container, prefix: &str, order: Order) -> Result<Self> {
        let name = format!("{prefix}.meta");
        let mut dec = crate::codec::Decoder::new(c.raw(&name)?, &name);
        let tag = dec.get_u8()?;
        let n = dec.get_usize()?;
        let sizes = [dec.get_u32()?, dec.get_u32()?, dec.get_u32()?];
        let n_so = dec.get_u32()?;
        dec.finish()?;
        if tag != order.tag() || n as u64 != c.n() {
            return Err(Error::corrupt(&name, "order or triple count does not match"));
        }
        let mut gaps = [0u32; 3];
        let mut acc = 0u64;
        for r in order.roles() {
            gaps[r.index()] = acc as u32;
            acc += sizes[r.index()] as u64;
        }
        let d_name = format!("{prefix}.d");
        let d: BitVector = c.get(&d_name)?;
        if d.len() != 3 * n || d.count_ones() as u64 != acc {
            return Err(Error::corrupt(&d_name, "bitvector shape does not match"));
        }
        let psi_name = format!("{prefix}.psi");
        let psi: P = c.get(&psi_name)?;
        if psi.len() != 3 * n {
            return Err(Error::corrupt(&psi_name, "psi length is not 3n"));
        }
        Ok(Self {
            n,
            order,
            gaps,
            sizes,
            n_so,
            d,
            psi,
        })
    }
}

/// The spo and ops structures plus the global/local id translation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RdfcsaPair<P> {
    universe: u32,
    alphabet: RoleAlphabets,
    spo: Rdfcsa<P>,
    ops: Rdfcsa<P>,
}

impl<P: PsiSeq> RdfcsaPair<P> {
    pub fn build(triples: &[Triple], universe: u32, mode: Parallelism) -> Result<Self> {
        let triples = normalize_triples(triples, universe, mode)?;
        let alphabet = RoleAlphabets::from_triples(&triples);
        let local: Vec<Triple> = triples
            .iter()
            .map(|t| Triple(Role::ALL.map(|r| alphabet.local(r, t.get(r)).unwrap())))
            .collect();
        let sizes = Role::ALL.map(|r| alphabet.size(r) as u32);
        let n_so = alphabet.n_so() as u32;
        let (spo, ops) = par::join(
            || Rdfcsa::build_local(&local, sizes, n_so, Order::Spo, mode),
            || Rdfcsa::build_local(&local, sizes, n_so, Order::Ops, mode),
            mode,
        );
        Ok(Self {
            universe: universe.max(1),
            alphabet,
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

    pub fn universe(&self) -> u32 {
        self.universe
    }

    pub fn alphabet(&self) -> &RoleAlphabets {
        &self.alphabet
    }

    pub fn spo(&self) -> &Rdfcsa<P> {
        &self.spo
    }

    pub fn ops(&self) -> &Rdfcsa<P> {
        &self.ops
    }

    fn csa(&self, order: Order) -> &Rdfcsa<P> {
        match order {
            Order::Spo => &self.spo,
            Order::Ops => &self.ops,
        }
    }

    /// Triples decoded from one structure, in global ids and spo order.
    pub fn triples(&self, order: Order) -> Vec<Triple> {
        let csa = self.csa(order);
        let mut out: Vec<Triple> = (1..=csa.len())
            .map(|i| {
                let t = csa.local_triple(i);
                Triple(Role::ALL.map(|r| self.alphabet.global(r, t.get(r))))
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn cursor(&self, consts: [Option<Id>; 3]) -> RdfcsaCursor<'_, P> {
        let mut cur = RdfcsaCursor {
            pair: self,
            state: CsaState {
                len: 0,
                first: Role::S,
                vals: [0; 3],
                empty: self.is_empty(),
                spo: (1, 3 * self.len()),
                ops: (1, 3 * self.len()),
            },
            trail: Vec::with_capacity(3),
        };
        for x in Role::ALL {
            if let Some(c) = consts[x.index()] {
                cur.down(x, c);
            }
        }
        cur.trail.clear();
        cur
    }

    pub fn size_in_bytes(&self) -> usize {
        self.alphabet.size_in_bytes() + self.spo.size_in_bytes() + self.ops.size_in_bytes()
    }

    pub(crate) fn save(&self, c: &mut Container) {
        c.put("alphabet", &self.alphabet);
        self.spo.save(c, "spo");
        self.ops.save(c, "ops");
    }

    pub(crate) fn load(c: &Container) -> Result<Self> {
        let alphabet: RoleAlphabets = c.get("alphabet")?;
        let spo = Rdfcsa::load(c, "spo", Order::Spo)?;
        let ops = Rdfcsa::load(c, "ops", Order::Ops)?;
        let sizes = Role::ALL.map(|r| alphabet.size(r) as u32);
        if spo.sizes != sizes || ops.sizes != sizes {
            return Err(Error::corrupt("alphabet", "sizes do not match the suffix arrays"));
        }
        let universe = c.universe().max(1);
        if Role::ALL
            .iter()
            .any(|&r| (1..=sizes[r.index()]).any(|l| alphabet.global(r, l) > universe))
        {
            return Err(Error::corrupt("alphabet", "id beyond the universe"));
        }
        Ok(Self {
            universe,
            alphabet,
            spo,
            ops,
        })
    }
}

/// Bound roles and their ranges. With one bound role both structures hold
/// a range; with two, `first` is the bound role whose successor in spo
/// order is also bound, and only the spo range is kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct CsaState {
    len: u8,
    first: Role,
    /// Local ids, 0 when unbound.
    vals: [u32; 3],
    empty: bool,
    spo: (usize, usize),
    ops: (usize, usize),
}

#[derive(Clone, Debug)]
pub struct RdfcsaCursor<'a, P> {
    pair: &'a RdfcsaPair<P>,
    state: CsaState,
    trail: Vec<CsaState>,
}

impl<P: PsiSeq> RdfcsaCursor<'_, P> {
    fn mapped(csa: &Rdfcsa<P>, r: Role, v: u32) -> u32 {
        csa.gap(r) + v
    }

    fn bind(&self, x: Role, c: Id) -> CsaState {
        let pair = self.pair;
        let st = self.state;
        let mut out = st;
        out.len += 1;
        let local = pair.alphabet.local(x, c);
        out.vals[x.index()] = local.unwrap_or(1);
        let Some(v) = local.filter(|_| !st.empty && st.vals[x.index()] == 0) else {
            out.empty = true;
            return out;
        };
        let spo = &pair.spo;
        match st.len {
            0 => {
                out.first = x;
                out.spo = spo.range(Self::mapped(spo, x, v));
                out.ops = pair.ops.range(Self::mapped(&pair.ops, x, v));
            }
            1 => {
                let b = st.first;
                let vb = st.vals[b.index()];
                out.spo = if x == b.next() {
                    spo.down(st.spo.0, st.spo.1, Self::mapped(spo, x, v))
                } else {
                    out.first = x;
                    let (l, r) = spo.range(Self::mapped(spo, x, v));
                    spo.down(l, r, Self::mapped(spo, b, vb))
                };
            }
            _ => {
                let f = st.first;
                let s = f.next();
                let (l, r) = spo.range(Self::mapped(spo, s, st.vals[s.index()]));
                let (tl, tr) = spo.down(l, r, Self::mapped(spo, x, v));
                out.spo = spo.narrow(st.spo.0, st.spo.1, tl, tr);
            }
        }
        out.empty = out.spo.0 > out.spo.1;
        out
    }

    /// Smallest local id in `lo..=hi` admissible for unbound role `x`.
    fn local_leap(&self, x: Role, lo: u32, hi: u32) -> Option<u32> {
        let st = &self.state;
        let pair = self.pair;
        match st.len {
            0 => Some(lo),
            1 => {
                let b = st.first;
                let (csa, (l, r)) = if x == b.next() {
                    (&pair.spo, st.spo)
                } else {
                    (&pair.ops, st.ops)
                };
                let g = csa.gap(x);
                let (tl, tr) = csa.span(g + lo, g + hi);
                let i = csa.find_target_psi(l, r, tl, tr)?;
                Some(csa.symbol(csa.psi(i)) - g)
            }
            2 => {
                let csa = &pair.spo;
                let g = csa.gap(x);
                let (tl, tr) = csa.span(g + lo, g + hi);
                let i = csa.find_target_psi2(st.spo.0, st.spo.1, tl, tr)?;
                Some(csa.symbol(csa.psi(csa.psi(i))) - g)
            }
            _ => None,
        }
    }
}

impl<P: PsiSeq> PatternCursor for RdfcsaCursor<'_, P> {
    fn is_empty(&self) -> bool {
        self.state.empty
    }

    fn leap(&self, x: Role, c: Id) -> Option<Id> {
        let st = &self.state;
        if st.empty || st.vals[x.index()] != 0 {
            return None;
        }
        let alpha = &self.pair.alphabet;
        alpha
            .runs(x)
            .filter_map(|run| {
                let lo = alpha.first_at_least(x, run, c)?;
                let l = self.local_leap(x, lo, run.1)?;
                Some(alpha.global(x, l))
            })
            .min()
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
        if st.empty {
            0
        } else if st.len == 0 {
            self.pair.len()
        } else {
            st.spo.1 - st.spo.0 + 1
        }
    }

    fn distinct_children(&self, _x: Role) -> Option<usize> {
        None
    }

    fn partition_counts(&self, _x: Role, _k: usize) -> Option<Vec<(u32, u32, usize)>> {
        None
    }
}

impl<P: PsiSeq> TripleIndex for RdfcsaPair<P> {
    type Cursor<'a>
        = RdfcsaCursor<'a, P>
    where
        Self: 'a;

    fn open(&self, consts: [Option<Id>; 3]) -> Self::Cursor<'_> {
        self.cursor(consts)
    }

    fn len(&self) -> usize {
        self.spo.len()
    }

    fn universe(&self) -> u32 {
        self.universe
    }
}
