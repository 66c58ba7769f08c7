//! Brute-force BGP evaluation by backtracking over pattern matches. Slow,
//! simple, and the reference every index is tested against.

use std::collections::HashMap;

use crate::model::{Bgp, Id, Mapping, Role, Term, Triple, TriplePattern};

#[derive(Clone, Debug, Default)]
pub struct OracleGraph {
    triples: Vec<Triple>,
    /// Per role, value -> indices of triples holding it (ascending).
    postings: [HashMap<Id, Vec<usize>>; 3],
}

impl OracleGraph {
    pub fn new(triples: &[Triple]) -> Self {
        let mut t = triples.to_vec();
        t.sort_unstable();
        t.dedup();
        let mut postings: [HashMap<Id, Vec<usize>>; 3] = Default::default();
        for (i, tr) in t.iter().enumerate() {
            for r in Role::ALL {
                postings[r.index()].entry(tr.get(r)).or_default().push(i);
            }
        }
        Self {
            triples: t,
            postings,
        }
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    /// All solutions of `bgp`, sorted. The empty BGP has exactly one
    /// solution, the empty mapping.
    pub fn eval(&self, bgp: &Bgp) -> Vec<Mapping> {
        self.eval_limited(bgp, usize::MAX).unwrap()
    }

    /// Like [`OracleGraph::eval`], giving up with `None` once more than
    /// `cap` solutions are found.
    pub fn eval_limited(&self, bgp: &Bgp, cap: usize) -> Option<Vec<Mapping>> {
        let mut vals = vec![None; bgp.var_count()];
        let mut out = Vec::new();
        if !self.search(bgp.patterns(), &mut vals, &mut out, cap) {
            return None;
        }
        out.sort_unstable();
        out.dedup();
        Some(out)
    }

    fn value(term: Term, vals: &[Option<Id>]) -> Option<Id> {
        match term {
            Term::Const(c) => Some(c),
            Term::Var(v) => vals[v],
        }
    }

    fn candidates(&self, p: &TriplePattern, vals: &[Option<Id>]) -> Vec<usize> {
        let mut best: Option<&[usize]> = None;
        for r in Role::ALL {
            if let Some(c) = Self::value(p.term(r), vals) {
                let list = self.postings[r.index()].get(&c).map_or(&[][..], |v| v.as_slice());
                if best.is_none_or(|b| list.len() < b.len()) {
                    best = Some(list);
                }
            }
        }
        match best {
            Some(b) => b.to_vec(),
            None => (0..self.triples.len()).collect(),
        }
    }

    /// Returns false when the cap was exceeded.
    fn search(
        &self,
        pats: &[TriplePattern],
        vals: &mut Vec<Option<Id>>,
        out: &mut Vec<Mapping>,
        cap: usize,
    ) -> bool {
        let Some((p, rest)) = pats.split_first() else {
            out.push(Mapping(vals.iter().map(|v| v.unwrap()).collect()));
            return out.len() <= cap;
        };
        for i in self.candidates(p, vals) {
            let t = self.triples[i];
            let mut newly = Vec::new();
            let mut ok = true;
            for r in Role::ALL {
                let x = t.get(r);
                match p.term(r) {
                    Term::Const(c) => ok &= c == x,
                    Term::Var(v) => match vals[v] {
                        Some(y) => ok &= y == x,
                        None => {
                            vals[v] = Some(x);
                            newly.push(v);
                        }
                    },
                }
                if !ok {
                    break;
                }
            }
            let within = !ok || self.search(rest, vals, out, cap);
            for v in newly {
                vals[v] = None;
            }
            if !within {
                return false;
            }
        }
        true
    }
}

/// Convenience wrapper over [`OracleGraph::eval`].
pub fn oracle_eval(triples: &[Triple], bgp: &Bgp) -> Vec<Mapping> {
    OracleGraph::new(triples).eval(bgp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Vec<Triple> {
        vec![Triple::new(1, 1, 2), Triple::new(1, 2, 3), Triple::new(2, 1, 2)]
    }

    #[test]
    fn empty_bgp_has_one_empty_solution() {
        let q = Bgp::from_tokens::<&str>(&[], |_| unreachable!()).unwrap();
        assert_eq!(oracle_eval(&tiny(), &q), vec![Mapping(vec![])]);
    }

    #[test]
    fn single_pattern() {
        let q = Bgp::parse_ints("?x 1 ?y").unwrap();
        let got = oracle_eval(&tiny(), &q);
        assert_eq!(got, vec![Mapping(vec![1, 2]), Mapping(vec![2, 2])]);
    }

    #[test]
    fn repeated_variable_in_pattern() {
        let mut g = tiny();
        g.push(Triple::new(3, 1, 3));
        g.push(Triple::new(3, 2, 3));
        let q = Bgp::parse_ints("?x 1 ?x").unwrap();
        assert_eq!(oracle_eval(&g, &q), vec![Mapping(vec![2]), Mapping(vec![3])]);
    }

    #[test]
    fn join_and_constant_patterns() {
        let q = Bgp::parse_ints("?x 1 ?y ; ?x 2 ?z").unwrap();
        assert_eq!(oracle_eval(&tiny(), &q), vec![Mapping(vec![1, 2, 3])]);
        let yes = Bgp::parse_ints("1 1 2").unwrap();
        assert_eq!(oracle_eval(&tiny(), &yes).len(), 1);
        let no = Bgp::parse_ints("1 1 3").unwrap();
        assert!(oracle_eval(&tiny(), &no).is_empty());
        let all = Bgp::parse_ints("?s ?p ?o").unwrap();
        let g = OracleGraph::new(&tiny());
        assert!(g.eval_limited(&all, 2).is_none());
        assert_eq!(g.eval_limited(&all, 3).unwrap().len(), 3);
    }

    #[test]
    fn pattern_order_does_not_matter() {
        let a = Bgp::parse_ints("?x 1 ?y ; ?y ?p ?z ; ?z 1 ?w").unwrap();
        let b = Bgp::parse_ints("?z 1 ?w ; ?x 1 ?y ; ?y ?p ?z").unwrap();
        let g: Vec<Triple> = (1..=4)
            .flat_map(|s| (1..=2).flat_map(move |p| (1..=4).map(move |o| Triple::new(s, p, (s * o + p) % 4 + 1))))
            .collect();
        let ra = oracle_eval(&g, &a);
        let names = |q: &Bgp, m: &Mapping| -> Vec<(String, Id)> {
            let mut v: Vec<_> = (0..q.var_count()).map(|i| (q.var_name(i).to_string(), m.get(i))).collect();
            v.sort();
            v
        };
        let mut na: Vec<_> = ra.iter().map(|m| names(&a, m)).collect();
        let mut nb: Vec<_> = oracle_eval(&g, &b).iter().map(|m| names(&b, m)).collect();
        na.sort();
        nb.sort();
        assert_eq!(na, nb);
        assert!(!na.is_empty());
    }
}
