#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::HashMap;
use ringjoin::index::Variant;
use ringjoin::ltj::{EngineConfig, Estimator, VeoMode};
use ringjoin::model::{parse_int_constant, Bgp, Mapping, Triple};
use ringjoin::oracle::OracleGraph;

/// Random triples over `1..=u`, with fewer predicates than nodes.
pub fn random_graph(rng: &mut impl Rng, n: usize, u: u32) -> Vec<Triple> {
    let preds = rng.gen_range(1..=u.min(12));
    let mut t: Vec<Triple> = (0..n)
        .map(|_| {
            Triple::new(
                rng.gen_range(1..=u),
                rng.gen_range(1..=preds),
                rng.gen_range(1..=u),
            )
        })
        .collect();
    t.sort_unstable();
    t.dedup();
    t
}

/// Random BGP of up to five patterns over up to five variables. Patterns
/// are mostly copied from connected graph triples, with repeated values
/// mapped to shared variables, so most queries have solutions; a few
/// patterns are random ids to keep empty answers in the mix.
pub fn random_query(rng: &mut impl Rng, triples: &[Triple], u: u32) -> Bgp {
    let k = rng.gen_range(1..=5);
    let max_vars = rng.gen_range(1..=5);
    let pool = ["?a", "?b", "?c", "?d", "?e"];
    let mut var_of: HashMap<u32, usize> = HashMap::new();
    let mut used = 0;
    let mut chosen: Vec<Triple> = Vec::new();
    let mut slots: Vec<[String; 3]> = Vec::with_capacity(k);
    for _ in 0..k {
        let base = if rng.gen_bool(0.04) {
            Triple::new(rng.gen_range(1..=u), rng.gen_range(1..=u), rng.gen_range(1..=u))
        } else if let Some(prev) = chosen.choose(rng).copied() {
            let linked: Vec<Triple> = triples
                .iter()
                .copied()
                .filter(|t| t.0.iter().any(|x| prev.0.contains(x)))
                .collect();
            *linked.choose(rng).unwrap_or(&prev)
        } else {
            *triples.choose(rng).unwrap()
        };
        chosen.push(base);
        slots.push(std::array::from_fn(|i| {
            let x = base.0[i];
            if let Some(&v) = var_of.get(&x) {
                if rng.gen_bool(0.85) {
                    return pool[v].to_string();
                }
            }
            let var_p = if i == 1 { 0.35 } else { 0.6 };
            if rng.gen_bool(var_p) {
                if used < max_vars && !var_of.contains_key(&x) {
                    var_of.insert(x, used);
                    used += 1;
                    return pool[used - 1].to_string();
                }
                if rng.gen_bool(0.15) {
                    return pool[rng.gen_range(0..max_vars)].to_string();
                }
            }
            x.to_string()
        }));
    }
    Bgp::from_tokens(&slots, parse_int_constant).unwrap()
}

/// Draws graph/query pairs until the query has at most `cap` solutions.
pub fn random_case(
    rng: &mut impl Rng,
    max_n: usize,
    max_u: u32,
    cap: usize,
) -> (Vec<Triple>, Bgp, Vec<Mapping>) {
    loop {
        let u = rng.gen_range(2..=max_u);
        let n = (10f64 * (max_n as f64 / 10.0).powf(rng.gen::<f64>())) as usize;
        let g = random_graph(rng, n.max(1), u);
        let oracle = OracleGraph::new(&g);
        for _ in 0..4 {
            let q = random_query(rng, &g, u);
            if let Some(sol) = oracle.eval_limited(&q, cap) {
                return (g, q, sol);
            }
        }
    }
}

/// The veo × estimator configurations run on `variant`, all unlimited.
pub fn configs(variant: Variant) -> Vec<EngineConfig> {
    let mut ests = vec![Estimator::Range, Estimator::Refined(3)];
    if variant.supports_children() {
        ests.push(Estimator::Children);
    }
    let mut out = Vec::new();
    for veo in [VeoMode::Global, VeoMode::Adaptive] {
        for &estimator in &ests {
            out.push(EngineConfig {
                veo,
                estimator,
                ..EngineConfig::unlimited()
            });
        }
    }
    out
}

pub fn sorted(mut v: Vec<Mapping>) -> Vec<Mapping> {
    v.sort_unstable();
    v
}
