//! Graph and query model: triples over integer ids, triple patterns, BGPs.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Constant identifier. Valid graph ids are `1..=U`; `0` never occurs in a
/// graph and is used for query constants that are absent from the dictionary.
pub type Id = u32;

/// Id used for query constants that cannot match anything.
pub const ABSENT: Id = 0;

/// Attribute of a triple. The cyclic order s → p → o → s drives every
/// table rotation of the indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    S,
    P,
    O,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::S, Role::P, Role::O];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Role {
        Role::ALL[i % 3]
    }

    /// Cyclic successor: s → p → o → s.
    pub fn next(self) -> Role {
        Role::from_index(self.index() + 1)
    }

    /// Cyclic predecessor: s → o → p → s.
    pub fn prev(self) -> Role {
        Role::from_index(self.index() + 2)
    }

    pub fn name(self) -> &'static str {
        match self {
            Role::S => "s",
            Role::P => "p",
            Role::O => "o",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple(pub [Id; 3]);

impl Triple {
    pub fn new(s: Id, p: Id, o: Id) -> Self {
        Triple([s, p, o])
    }

    pub fn get(&self, role: Role) -> Id {
        self.0[role.index()]
    }

    /// The triple read starting at `first` in cyclic order.
    pub fn rotated(&self, first: Role) -> [Id; 3] {
        [
            self.get(first),
            self.get(first.next()),
            self.get(first.next().next()),
        ]
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {} {})", self.0[0], self.0[1], self.0[2])
    }
}

/// Index of a variable inside its [`Bgp`], in order of first appearance.
pub type VarId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Const(Id),
    Var(VarId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TriplePattern(pub [Term; 3]);

impl TriplePattern {
    pub fn term(&self, role: Role) -> Term {
        self.0[role.index()]
    }

    pub fn constant(&self, role: Role) -> Option<Id> {
        match self.term(role) {
            Term::Const(c) => Some(c),
            Term::Var(_) => None,
        }
    }

    /// Roles at which `var` occurs.
    pub fn roles_of(&self, var: VarId) -> impl Iterator<Item = Role> + '_ {
        Role::ALL
            .into_iter()
            .filter(move |r| self.term(*r) == Term::Var(var))
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.iter().filter_map(|t| match t {
            Term::Var(v) => Some(*v),
            Term::Const(_) => None,
        })
    }
}

/// A basic graph pattern: a conjunction of triple patterns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bgp {
    patterns: Vec<TriplePattern>,
    var_names: Vec<String>,
}

impl Bgp {
    /// Builds a BGP from slot tokens, `"?x"` being a variable.
    pub fn from_tokens<S: AsRef<str>>(
        patterns: &[[S; 3]],
        mut constant: impl FnMut(&str) -> Result<Id>,
    ) -> Result<Self> {
        let mut var_names: Vec<String> = Vec::new();
        let mut var_ids: HashMap<String, VarId> = HashMap::new();
        let mut out = Vec::with_capacity(patterns.len());
        for slots in patterns {
            let mut terms = [Term::Const(ABSENT); 3];
            for (k, tok) in slots.iter().enumerate() {
                let tok = tok.as_ref();
                terms[k] = if let Some(name) = tok.strip_prefix('?') {
                    if name.is_empty() {
                        return Err(Error::Query("variable without a name".into()));
                    }
                    let next = var_names.len();
                    let id = *var_ids.entry(name.to_string()).or_insert_with(|| {
                        var_names.push(name.to_string());
                        next
                    });
                    Term::Var(id)
                } else {
                    Term::Const(constant(tok)?)
                };
            }
            out.push(TriplePattern(terms));
        }
        Ok(Bgp {
            patterns: out,
            var_names,
        })
    }

    /// Parses `"?x 1 ?y ; ?y 2 3"`: patterns separated by `;`, three
    /// whitespace-separated tokens each.
    pub fn parse(text: &str, constant: impl FnMut(&str) -> Result<Id>) -> Result<Self> {
        let mut slots = Vec::new();
        for part in text.split(';') {
            let toks: Vec<&str> = part.split_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            if toks.len() != 3 {
                return Err(Error::Query(format!(
                    "pattern `{}` has {} tokens, expected 3",
                    part.trim(),
                    toks.len()
                )));
            }
            slots.push([toks[0], toks[1], toks[2]]);
        }
        if slots.is_empty() {
            return Err(Error::Query("empty basic graph pattern".into()));
        }
        Self::from_tokens(&slots, constant)
    }

    /// Parses with integer constants.
    pub fn parse_ints(text: &str) -> Result<Self> {
        Self::parse(text, parse_int_constant)
    }

    pub fn patterns(&self) -> &[TriplePattern] {
        &self.patterns
    }

    pub fn var_count(&self) -> usize {
        self.var_names.len()
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.var_names[v]
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.var_names.iter().position(|n| n == name)
    }

    /// Indices of the patterns mentioning `var`.
    pub fn patterns_with(&self, var: VarId) -> Vec<usize> {
        self.patterns
            .iter()
            .enumerate()
            .filter(|(_, p)| p.vars().any(|v| v == var))
            .map(|(i, _)| i)
            .collect()
    }

    /// A variable is lonely when it occurs in exactly one pattern (possibly
    /// several times within it).
    pub fn is_lonely(&self, var: VarId) -> bool {
        self.patterns_with(var).len() == 1
    }

    /// Whether two variables share a pattern.
    pub fn connected(&self, a: VarId, b: VarId) -> bool {
        self.patterns.iter().any(|p| {
            let mut vs = p.vars();
            let has_a = p.vars().any(|v| v == a);
            has_a && vs.any(|v| v == b)
        })
    }
}

impl fmt::Display for Bgp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.patterns.iter().enumerate() {
            if i > 0 {
                f.write_str(" ; ")?;
            }
            for (k, t) in p.0.iter().enumerate() {
                if k > 0 {
                    f.write_str(" ")?;
                }
                match t {
                    Term::Const(c) => write!(f, "{c}")?,
                    Term::Var(v) => write!(f, "?{}", self.var_names[*v])?,
                }
            }
        }
        Ok(())
    }
}

pub fn parse_int_constant(tok: &str) -> Result<Id> {
    match tok.parse::<u64>() {
        Ok(v) if v >= 1 && v <= Id::MAX as u64 => Ok(v as Id),
        _ => Err(Error::Query(format!(
            "`{tok}` is neither a positive integer nor a ?variable"
        ))),
    }
}

/// A total solution: `values[v]` is the constant bound to variable `v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mapping(pub Vec<Id>);

impl Mapping {
    pub fn get(&self, v: VarId) -> Id {
        self.0[v]
    }

    /// Instantiates a pattern whose variables are all bound.
    pub fn apply(&self, pattern: &TriplePattern) -> Triple {
        let mut t = [0; 3];
        for (k, term) in pattern.0.iter().enumerate() {
            t[k] = match term {
                Term::Const(c) => *c,
                Term::Var(v) => self.0[*v],
            };
        }
        Triple(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roles_cycle() {
        for r in Role::ALL {
            assert_eq!(r.next().prev(), r);
            assert_eq!(r.next().next().next(), r);
        }
        assert_eq!(Role::S.next(), Role::P);
        assert_eq!(Role::S.prev(), Role::O);
        let t = Triple::new(1, 2, 3);
        assert_eq!(t.rotated(Role::O), [3, 1, 2]);
        assert_eq!(t.rotated(Role::P), [2, 3, 1]);
    }

    #[test]
    fn parse_bgp_with_shared_and_repeated_vars() {
        let q = Bgp::parse_ints("?x 1 ?y ; ?y 2 ?x ; ?z 3 ?z").unwrap();
        assert_eq!(q.patterns().len(), 3);
        assert_eq!(q.var_names(), &["x", "y", "z"]);
        assert!(!q.is_lonely(0));
        assert!(q.is_lonely(2));
        assert!(q.connected(0, 1));
        assert!(!q.connected(0, 2));
        assert_eq!(q.patterns()[2].roles_of(2).count(), 2);
        assert_eq!(q.to_string(), "?x 1 ?y ; ?y 2 ?x ; ?z 3 ?z");
    }

    #[test]
    fn parse_rejects_bad_patterns() {
        assert!(Bgp::parse_ints("?x 1").is_err());
        assert!(Bgp::parse_ints("?x 0 ?y").is_err());
        assert!(Bgp::parse_ints("?x -3 ?y").is_err());
        assert!(Bgp::parse_ints("? 1 2").is_err());
        assert!(Bgp::parse_ints(" ; ").is_err());
    }
}
