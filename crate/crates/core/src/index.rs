//! The eight index variants behind one type, with persistence.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ingest::container::Container;
use crate::ingest::{Dictionary, ParsedGraph};
use crate::ltj::{self, BestVeo, EngineConfig, QueryResult, Stats};
use crate::model::{Bgp, Mapping, Triple};
use crate::par::Parallelism;
use crate::rdfcsa::{Order, PlainPsi, RdfcsaPair, SampledPsi};
use crate::ring::{Ring, URing};
use crate::succinct::{BitVector, CompressedBitVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    RingLarge,
    RingSmall,
    VringLarge,
    VringSmall,
    UringLarge,
    UringSmall,
    RdfcsaLarge,
    RdfcsaSmall,
}

impl Variant {
    pub const ALL: [Variant; 8] = [
        Variant::RingLarge,
        Variant::RingSmall,
        Variant::VringLarge,
        Variant::VringSmall,
        Variant::UringLarge,
        Variant::UringSmall,
        Variant::RdfcsaLarge,
        Variant::RdfcsaSmall,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::RingLarge => "ring-large",
            Variant::RingSmall => "ring-small",
            Variant::VringLarge => "vring-large",
            Variant::VringSmall => "vring-small",
            Variant::UringLarge => "uring-large",
            Variant::UringSmall => "uring-small",
            Variant::RdfcsaLarge => "rdfcsa-large",
            Variant::RdfcsaSmall => "rdfcsa-small",
        }
    }

    /// Tag stored in the container header.
    pub fn tag(self) -> u8 {
        Variant::ALL.iter().position(|&v| v == self).unwrap() as u8 + 1
    }

    pub fn from_tag(tag: u8) -> Option<Variant> {
        Variant::ALL.get((tag as usize).checked_sub(1)?).copied()
    }

    /// Whether the index can count distinct children.
    pub fn supports_children(self) -> bool {
        matches!(self, Variant::VringLarge | Variant::VringSmall)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Variant::ALL.iter().map(|v| v.name()).collect();
                Error::Query(format!("unknown variant `{s}`, expected one of {}", names.join(", ")))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum AnyIndex {
    RingLarge(Ring<BitVector>),
    RingSmall(Ring<CompressedBitVector>),
    VringLarge(Ring<BitVector>),
    VringSmall(Ring<CompressedBitVector>),
    UringLarge(URing<BitVector>),
    UringSmall(URing<CompressedBitVector>),
    RdfcsaLarge(RdfcsaPair<PlainPsi>),
    RdfcsaSmall(RdfcsaPair<SampledPsi>),
}

macro_rules! dispatch {
    ($value:expr, $i:ident => $body:expr) => {
        match $value {
            AnyIndex::RingLarge($i) => $body,
            AnyIndex::RingSmall($i) => $body,
            AnyIndex::VringLarge($i) => $body,
            AnyIndex::VringSmall($i) => $body,
            AnyIndex::UringLarge($i) => $body,
            AnyIndex::UringSmall($i) => $body,
            AnyIndex::RdfcsaLarge($i) => $body,
            AnyIndex::RdfcsaSmall($i) => $body,
        }
    };
}

impl AnyIndex {
    pub fn build(variant: Variant, triples: &[Triple], universe: u32, mode: Parallelism) -> Result<Self> {
        Ok(match variant {
            Variant::RingLarge => AnyIndex::RingLarge(Ring::build(triples, universe, false, mode)?),
            Variant::RingSmall => AnyIndex::RingSmall(Ring::build(triples, universe, false, mode)?),
            Variant::VringLarge => AnyIndex::VringLarge(Ring::build(triples, universe, true, mode)?),
            Variant::VringSmall => AnyIndex::VringSmall(Ring::build(triples, universe, true, mode)?),
            Variant::UringLarge => AnyIndex::UringLarge(URing::build(triples, universe, mode)?),
            Variant::UringSmall => AnyIndex::UringSmall(URing::build(triples, universe, mode)?),
            Variant::RdfcsaLarge => AnyIndex::RdfcsaLarge(RdfcsaPair::build(triples, universe, mode)?),
            Variant::RdfcsaSmall => AnyIndex::RdfcsaSmall(RdfcsaPair::build(triples, universe, mode)?),
        })
    }

    pub fn variant(&self) -> Variant {
        match self {
            AnyIndex::RingLarge(_) => Variant::RingLarge,
            AnyIndex::RingSmall(_) => Variant::RingSmall,
            AnyIndex::VringLarge(_) => Variant::VringLarge,
            AnyIndex::VringSmall(_) => Variant::VringSmall,
            AnyIndex::UringLarge(_) => Variant::UringLarge,
            AnyIndex::UringSmall(_) => Variant::UringSmall,
            AnyIndex::RdfcsaLarge(_) => Variant::RdfcsaLarge,
            AnyIndex::RdfcsaSmall(_) => Variant::RdfcsaSmall,
        }
    }

    pub fn len(&self) -> usize {
        dispatch!(self, i => ltj::TripleIndex::len(i))
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn universe(&self) -> u32 {
        dispatch!(self, i => ltj::TripleIndex::universe(i))
    }

    /// In-memory size of the succinct structures.
    pub fn size_in_bytes(&self) -> usize {
        dispatch!(self, i => i.size_in_bytes())
    }

    /// All indexed triples, sorted.
    pub fn triples(&self) -> Vec<Triple> {
        match self {
            AnyIndex::RingLarge(i) | AnyIndex::VringLarge(i) => i.triples(),
            AnyIndex::RingSmall(i) | AnyIndex::VringSmall(i) => i.triples(),
            AnyIndex::UringLarge(i) => i.spo().triples(),
            AnyIndex::UringSmall(i) => i.spo().triples(),
            AnyIndex::RdfcsaLarge(i) => i.triples(Order::Spo),
            AnyIndex::RdfcsaSmall(i) => i.triples(Order::Spo),
        }
    }

    pub fn evaluate(&self, bgp: &Bgp, config: &EngineConfig) -> Result<QueryResult> {
        dispatch!(self, i => ltj::evaluate(i, bgp, config))
    }

    pub fn evaluate_with(&self, bgp: &Bgp, config: &EngineConfig, emit: impl FnMut(&Mapping)) -> Result<Stats> {
        dispatch!(self, i => ltj::evaluate_with(i, bgp, config, emit))
    }

    pub fn exhaustive_best_veo(&self, bgp: &Bgp, config: &EngineConfig) -> Result<BestVeo> {
        dispatch!(self, i => ltj::exhaustive_best_veo(i, bgp, config))
    }

    fn save_sections(&self, c: &mut Container) {
        match self {
            AnyIndex::RingLarge(i) | AnyIndex::VringLarge(i) => i.save(c, "ring"),
            AnyIndex::RingSmall(i) | AnyIndex::VringSmall(i) => i.save(c, "ring"),
            AnyIndex::UringLarge(i) => i.save(c),
            AnyIndex::UringSmall(i) => i.save(c),
            AnyIndex::RdfcsaLarge(i) => i.save(c),
            AnyIndex::RdfcsaSmall(i) => i.save(c),
        }
    }

    fn load_sections(variant: Variant, c: &Container) -> Result<Self> {
        Ok(match variant {
            Variant::RingLarge => AnyIndex::RingLarge(Ring::load(c, "ring", false)?),
            Variant::RingSmall => AnyIndex::RingSmall(Ring::load(c, "ring", false)?),
            Variant::VringLarge => AnyIndex::VringLarge(Ring::load(c, "ring", true)?),
            Variant::VringSmall => AnyIndex::VringSmall(Ring::load(c, "ring", true)?),
            Variant::UringLarge => AnyIndex::UringLarge(URing::load(c)?),
            Variant::UringSmall => AnyIndex::UringSmall(URing::load(c)?),
            Variant::RdfcsaLarge => AnyIndex::RdfcsaLarge(RdfcsaPair::load(c)?),
            Variant::RdfcsaSmall => AnyIndex::RdfcsaSmall(RdfcsaPair::load(c)?),
        })
    }
}

/// An index plus the term dictionary it was built with, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Index {
    pub index: AnyIndex,
    pub dictionary: Option<Dictionary>,
}

impl Index {
    pub fn build(graph: &ParsedGraph, variant: Variant, mode: Parallelism) -> Result<Self> {
        Ok(Self {
            index: AnyIndex::build(variant, &graph.triples, graph.universe, mode)?,
            dictionary: graph.dictionary.clone(),
        })
    }

    pub fn variant(&self) -> Variant {
        self.index.variant()
    }

    pub fn to_container(&self) -> Container {
        let ix = &self.index;
        let mut c = Container::new(ix.variant().tag(), ix.len() as u64, ix.universe());
        ix.save_sections(&mut c);
        if let Some(d) = &self.dictionary {
            c.put("dictionary", d);
        }
        c
    }

    /// Rebuilds from a container. With `expected` set, a container of any
    /// other variant is rejected.
    pub fn from_container(c: &Container, expected: Option<Variant>) -> Result<Self> {
        let found = Variant::from_tag(c.tag())
            .ok_or_else(|| Error::corrupt("header", format!("unknown variant tag {}", c.tag())))?;
        if let Some(want) = expected {
            if want != found {
                return Err(Error::VariantMismatch {
                    expected: want.name().to_string(),
                    found: found.name().to_string(),
                });
            }
        }
        let index = AnyIndex::load_sections(found, c)?;
        let dictionary = if c.has("dictionary") {
            Some(c.get("dictionary")?)
        } else {
            None
        };
        Ok(Self { index, dictionary })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.to_container().to_bytes()
    }

    pub fn from_bytes(bytes: &[u8], expected: Option<Variant>) -> Result<Self> {
        Self::from_container(&Container::from_bytes(bytes)?, expected)
    }

    /// Writes the container, returning its size in bytes.
    pub fn save(&self, path: &Path) -> Result<u64> {
        self.to_container().write(path)
    }

    pub fn load(path: &Path, expected: Option<Variant>) -> Result<Self> {
        Self::from_container(&Container::read(path)?, expected)
    }
}

/// Bytes per triple for a container of `bytes` holding `n` triples.
pub fn bytes_per_triple(bytes: u64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        bytes as f64 / n as f64
    }
}
