//! Query files and query-type classification.

use std::fmt;
use std::path::Path;

use anyhow::{bail, Context, Result};
use ringjoin::ingest::Dictionary;
use ringjoin::model::{parse_int_constant, Bgp, Term};

/// One line of a query file: `[id:] pattern ; pattern ; ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryEntry {
    pub id: String,
    pub text: String,
}

/// Reads a query file. Blank lines and `#` comments are skipped; a line
/// whose first token ends in `:` uses that token as the query id,
/// otherwise the id is the query's 1-based position in the file.
pub fn read_query_file(path: &Path) -> Result<Vec<QueryEntry>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_query_file(&text)
}

pub fn parse_query_file(text: &str) -> Result<Vec<QueryEntry>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let first = body.split_whitespace().next().unwrap_or_default();
        let (id, rest) = match first.strip_suffix(':') {
            Some(id) if !id.is_empty() => (id.to_string(), body[first.len()..].trim()),
            _ => ((out.len() + 1).to_string(), body),
        };
        if rest.is_empty() {
            bail!("query file line {}: query `{id}` has no patterns", lineno + 1);
        }
        out.push(QueryEntry {
            id,
            text: rest.to_string(),
        });
    }
    Ok(out)
}

/// A parsed query. `unresolvable` is set when a constant names a term the
/// index dictionary does not contain, so the query has no solutions.
pub struct ResolvedQuery {
    pub bgp: Bgp,
    pub unresolvable: bool,
}

/// Parses the BGP text, resolving constants through the dictionary when
/// the index has one and as integer ids otherwise.
pub fn resolve(entry: &QueryEntry, dict: Option<&Dictionary>) -> Result<ResolvedQuery> {
    let mut unresolvable = false;
    let bgp = match dict {
        None => Bgp::parse(&entry.text, parse_int_constant),
        Some(d) => Bgp::parse(&entry.text, |tok| {
            Ok(d.id(tok).unwrap_or_else(|| {
                unresolvable = true;
                1
            }))
        }),
    }
    .with_context(|| format!("query {}", entry.id))?;
    Ok(ResolvedQuery { bgp, unresolvable })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[allow(clippy::upper_case_acronyms)]
pub enum QueryType {
    I,
    II,
    III,
}

impl fmt::Display for QueryType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryType::I => "I",
            QueryType::II => "II",
            QueryType::III => "III",
        })
    }
}

/// I: a single pattern. II: several patterns joined on exactly one
/// variable. III: everything else.
pub fn classify_query(bgp: &Bgp) -> QueryType {
    if bgp.patterns().len() == 1 {
        return QueryType::I;
    }
    let shared = (0..bgp.var_count())
        .filter(|&v| {
            bgp.patterns()
                .iter()
                .filter(|p| p.0.contains(&Term::Var(v)))
                .count()
                > 1
        })
        .count();
    if shared == 1 {
        QueryType::II
    } else {
        QueryType::III
    }
}
