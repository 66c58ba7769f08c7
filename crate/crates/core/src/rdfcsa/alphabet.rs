//! Role-local id spaces. Terms that occur both as subject and object take
//! local ids `1..=n_so` in both alphabets; the remaining subjects and
//! objects follow. Each part is ordered by global id, so a role maps onto
//! at most two increasing runs of global ids.

use crate::codec::{Decoder, Encoder, Persist};
use crate::error::Result;
use crate::model::{Id, Role, Triple};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoleAlphabets {
    n_so: usize,
    /// Local id `i` of role `r` is `globals[r][i-1]`.
    globals: [Vec<Id>; 3],
}

fn distinct(triples: &[Triple], r: Role) -> Vec<Id> {
    let mut v: Vec<Id> = triples.iter().map(|t| t.get(r)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

impl RoleAlphabets {
    pub fn from_triples(triples: &[Triple]) -> Self {
        let subs = distinct(triples, Role::S);
        let objs = distinct(triples, Role::O);
        let mut shared = Vec::new();
        let (mut s_only, mut o_only) = (Vec::new(), Vec::new());
        let (mut i, mut j) = (0, 0);
        while i < subs.len() || j < objs.len() {
            match (subs.get(i), objs.get(j)) {
                (Some(&a), Some(&b)) if a == b => {
                    shared.push(a);
                    i += 1;
                    j += 1;
                }
                (Some(&a), Some(&b)) if a < b => {
                    s_only.push(a);
                    i += 1;
                }
                (Some(&a), None) => {
                    s_only.push(a);
                    i += 1;
                }
                (_, Some(&b)) => {
                    o_only.push(b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        let n_so = shared.len();
        let mut s = shared.clone();
        s.extend(s_only);
        let mut o = shared;
        o.extend(o_only);
        Self {
            n_so,
            globals: [s, distinct(triples, Role::P), o],
        }
    }

    pub fn n_so(&self) -> usize {
        self.n_so
    }

    /// Alphabet size of role `r`.
    pub fn size(&self, r: Role) -> usize {
        self.globals[r.index()].len()
    }

    pub fn global(&self, r: Role, local: u32) -> Id {
        self.globals[r.index()][local as usize - 1]
    }

    /// Local runs of role `r` as `(first, last)` local ids; each run is
    /// increasing in global id.
    pub fn runs(&self, r: Role) -> impl Iterator<Item = (u32, u32)> {
        let size = self.size(r) as u32;
        let split = if r == Role::P { 0 } else { self.n_so as u32 };
        [(1, split), (split + 1, size)]
            .into_iter()
            .filter(|&(a, b)| a <= b)
    }

    /// Smallest local id in run `(a, b)` whose global id is `>= g`.
    pub fn first_at_least(&self, r: Role, (a, b): (u32, u32), g: Id) -> Option<u32> {
        let run = &self.globals[r.index()][a as usize - 1..b as usize];
        let k = run.partition_point(|&x| x < g);
        (k < run.len()).then_some(a + k as u32)
    }

    pub fn local(&self, r: Role, g: Id) -> Option<u32> {
        self.runs(r).find_map(|run| {
            let l = self.first_at_least(r, run, g)?;
            (self.global(r, l) == g).then_some(l)
        })
    }

    /// Smallest global id `>= g` used in role `r`.
    pub fn next_at_least(&self, r: Role, g: Id) -> Option<Id> {
        self.runs(r)
            .filter_map(|run| self.first_at_least(r, run, g))
            .map(|l| self.global(r, l))
            .min()
    }

    pub fn size_in_bytes(&self) -> usize {
        self.globals.iter().map(|v| v.len() * 4).sum::<usize>() + 8
    }
}

impl Persist for RoleAlphabets {
    fn encode(&self, enc: &mut Encoder) {
        enc.put_usize(self.n_so);
        for g in &self.globals {
            enc.put_u32s(g);
        }
    }

    fn decode(dec: &mut Decoder<'_>) -> Result<Self> {
        let n_so = dec.get_usize()?;
        let globals = [dec.get_u32s()?, dec.get_u32s()?, dec.get_u32s()?];
        let a = Self { n_so, globals };
        if n_so > a.size(Role::S) || n_so > a.size(Role::O) {
            return Err(dec.error("shared prefix longer than an alphabet"));
        }
        for r in Role::ALL {
            for (lo, hi) in a.runs(r) {
                let run = &a.globals[r.index()][lo as usize - 1..hi as usize];
                if run.contains(&0) || run.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(dec.error("alphabet run is not strictly increasing"));
                }
            }
        }
        Ok(a)
    }
}
