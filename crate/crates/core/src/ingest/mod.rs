//! Triple input parsing, the term dictionary and index persistence.

pub mod container;

use std::collections::HashMap;
use std::io::BufRead;
use std::str::FromStr;

use crate::codec::{Decoder, Encoder, Persist};
use crate::error::{Error, Result};
use crate::model::{Id, Triple};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    /// Three positive integers per line.
    Ints,
    /// Three whitespace-free tokens per line, mapped to ids.
    Terms,
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ints" => Ok(InputFormat::Ints),
            "terms" => Ok(InputFormat::Terms),
            _ => Err(Error::Query(format!("unknown input format `{s}`"))),
        }
    }
}

/// Bidirectional term/id map; ids are assigned by first appearance,
/// shared across roles.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dictionary {
    terms: Vec<String>,
    ids: HashMap<String, Id>,
}

impl Dictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Id of `term`, assigning the next one if unseen.
    pub fn intern(&mut self, term: &str) -> Id {
        if let Some(&id) = self.ids.get(term) {
            return id;
        }
        self.terms.push(term.to_string());
        let id = self.terms.len() as Id;
        self.ids.insert(term.to_string(), id);
        id
    }

    pub fn id(&self, term: &str) -> Option<Id> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: Id) -> Option<&str> {
        if id == 0 {
            return None;
        }
        self.terms.get(id as usize - 1).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl Persist for Dictionary {
    fn encode(&self, enc: &mut Encoder) {
        enc.put_usize(self.terms.len());
        for t in &self.terms {
            enc.put_str(t);
        }
    }

    fn decode(dec: &mut Decoder<'_>) -> Result<Self> {
        let n = dec.get_usize()?;
        let mut d = Dictionary::new();
        for _ in 0..n {
            let t = dec.get_str()?;
            if d.ids.contains_key(&t) {
                return Err(dec.error(format!("duplicate term `{t}`")));
            }
            d.intern(&t);
        }
        Ok(d)
    }
}

/// Parsed input: deduplicated triples in sorted order.
#[derive(Clone, Debug, Default)]
pub struct ParsedGraph {
    pub triples: Vec<Triple>,
    /// Largest id used.
    pub universe: u32,
    /// Present in terms mode.
    pub dictionary: Option<Dictionary>,
}

/// Reads triples, one per line; blank lines and `#` comments are skipped.
pub fn parse_triples(input: impl BufRead, format: InputFormat) -> Result<ParsedGraph> {
    let mut dict = Dictionary::new();
    let mut triples = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected 3 fields, found {}", toks.len()),
            });
        }
        let mut t = [0; 3];
        for (k, tok) in toks.iter().enumerate() {
            t[k] = match format {
                InputFormat::Terms => dict.intern(tok),
                InputFormat::Ints => match tok.parse::<u64>() {
                    Ok(v) if v >= 1 && v <= Id::MAX as u64 => v as Id,
                    _ => {
                        return Err(Error::Parse {
                            line: lineno,
                            msg: format!("`{tok}` is not a positive 32-bit integer"),
                        })
                    }
                },
            };
        }
        triples.push(Triple(t));
    }
    triples.sort_unstable();
    triples.dedup();
    let universe = triples.iter().flat_map(|t| t.0).max().unwrap_or(0);
    Ok(ParsedGraph {
        triples,
        universe,
        dictionary: (format == InputFormat::Terms).then_some(dict),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ints_are_deduplicated() {
        let g = parse_triples("1 1 2\n1 2 3\n\n# note\n1 1 2\n".as_bytes(), InputFormat::Ints).unwrap();
        assert_eq!(g.triples.len(), 2);
        assert_eq!(g.universe, 3);
        assert!(g.dictionary.is_none());
    }

    #[test]
    fn terms_round_trip() {
        let g = parse_triples("alice knows bob\nbob knows alice\n".as_bytes(), InputFormat::Terms).unwrap();
        let d = g.dictionary.unwrap();
        assert_eq!(d.len(), 3);
        for t in &g.triples {
            let back: Vec<&str> = t.0.iter().map(|&i| d.term(i).unwrap()).collect();
            let again: Vec<Id> = back.iter().map(|s| d.id(s).unwrap()).collect();
            assert_eq!(again, t.0.to_vec());
        }
        assert_eq!(d.term(d.id("alice").unwrap()), Some("alice"));
        let back = Dictionary::from_bytes(&d.to_bytes(), "dictionary").unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn malformed_lines_report_their_number() {
        for bad in ["1 1 2\n1 2\n", "1 1 2\n1 0 3\n", "1 1 2\n1 -2 3\n", "1 x 2\n"] {
            let err = parse_triples(bad.as_bytes(), InputFormat::Ints).unwrap_err();
            assert!(matches!(err, Error::Parse { .. }), "{err}");
        }
        let err = parse_triples("1 1 2\n1 2\n".as_bytes(), InputFormat::Ints).unwrap_err();
        assert!(err.to_string().starts_with("line 2"), "{err}");
    }
}
