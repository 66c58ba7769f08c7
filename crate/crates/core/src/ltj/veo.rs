//! Variable elimination orders and the weight estimators behind them.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{evaluate_with, var_positions, EngineConfig, PatternCursor, Stats, TripleIndex};
use crate::error::{Error, Result};
use crate::model::{Bgp, Role, VarId};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum VeoMode {
    Global,
    #[default]
    Adaptive,
}

impl fmt::Display for VeoMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VeoMode::Global => "global",
            VeoMode::Adaptive => "adaptive",
        })
    }
}

impl FromStr for VeoMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global" => Ok(VeoMode::Global),
            "adaptive" => Ok(VeoMode::Adaptive),
            _ => Err(Error::Query(format!("unknown veo mode `{s}`"))),
        }
    }
}

/// How the weight `w_ij` of a variable in a pattern is estimated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Estimator {
    /// Number of matching triples.
    #[default]
    Range,
    /// Number of distinct values of the variable.
    Children,
    /// Sum over `2^k` alphabet partitions of the per-partition minimum.
    Refined(usize),
    /// Uniformly random order.
    Random,
    /// Random order with lonely variables last.
    RandomNonLonely,
    /// The global heuristic fed with random weights.
    RandomConnected,
}

pub const DEFAULT_REFINED_LEVELS: usize = 3;

impl Estimator {
    pub fn is_random(self) -> bool {
        matches!(
            self,
            Estimator::Random | Estimator::RandomNonLonely | Estimator::RandomConnected
        )
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Estimator::Range => f.write_str("range"),
            Estimator::Children => f.write_str("children"),
            Estimator::Refined(k) => write!(f, "refined:{k}"),
            Estimator::Random => f.write_str("random"),
            Estimator::RandomNonLonely => f.write_str("random-nl"),
            Estimator::RandomConnected => f.write_str("random-e"),
        }
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "range" => Estimator::Range,
            "children" => Estimator::Children,
            "refined" => Estimator::Refined(DEFAULT_REFINED_LEVELS),
            "random" => Estimator::Random,
            "random-nl" => Estimator::RandomNonLonely,
            "random-e" => Estimator::RandomConnected,
            _ => match s.strip_prefix("refined:").map(str::parse::<usize>) {
                Some(Ok(k)) if k <= 32 => Estimator::Refined(k),
                _ => return Err(Error::Query(format!("unknown estimator `{s}`"))),
            },
        })
    }
}

/// `w_j`: the smallest estimated weight of the variable over its positions.
pub(crate) fn weight<C: PatternCursor>(cursors: &[C], parts: &[(usize, Role)], est: Estimator) -> usize {
    let range = || {
        parts
            .iter()
            .map(|&(i, _)| cursors[i].range_size())
            .min()
            .unwrap_or(0)
    };
    match est {
        Estimator::Children => parts
            .iter()
            .map(|&(i, x)| {
                cursors[i]
                    .distinct_children(x)
                    .unwrap_or_else(|| cursors[i].range_size())
            })
            .min()
            .unwrap_or(0),
        Estimator::Refined(k) => refined(cursors, parts, k).unwrap_or_else(range),
        _ => range(),
    }
}

/// Sum over partitions of the minimum count across positions; `None` when
/// some cursor cannot report partitions.
pub(crate) fn refined<C: PatternCursor>(cursors: &[C], parts: &[(usize, Role)], k: usize) -> Option<usize> {
    let mut acc: HashMap<(u32, u32), (usize, usize)> = HashMap::new();
    for &(i, x) in parts {
        for (lo, hi, w) in cursors[i].partition_counts(x, k)? {
            let e = acc.entry((lo, hi)).or_insert((usize::MAX, 0));
            e.0 = e.0.min(w);
            e.1 += 1;
        }
    }
    Some(
        acc.values()
            .filter(|&&(_, hits)| hits == parts.len())
            .map(|&(w, _)| w)
            .sum(),
    )
}

/// Orders non-lonely variables by weight, each new one sharing a pattern
/// with an earlier one when possible, then lonely ones by weight.
fn greedy_order(bgp: &Bgp, weights: &[u64]) -> Vec<VarId> {
    let n = bgp.var_count();
    let key = |v: VarId| (weights[v], v);
    let mut rest: Vec<VarId> = (0..n).filter(|&v| !bgp.is_lonely(v)).collect();
    let mut lonely: Vec<VarId> = (0..n).filter(|&v| bgp.is_lonely(v)).collect();
    let mut order = Vec::with_capacity(n);
    while !rest.is_empty() {
        let connected = rest
            .iter()
            .copied()
            .filter(|&v| order.iter().any(|&u| bgp.connected(u, v)))
            .min_by_key(|&v| key(v));
        let pick = connected
            .or_else(|| rest.iter().copied().min_by_key(|&v| key(v)))
            .unwrap();
        rest.retain(|&v| v != pick);
        order.push(pick);
    }
    lonely.sort_by_key(|&v| key(v));
    order.extend(lonely);
    order
}

pub(crate) fn order_from<I: TripleIndex, C: PatternCursor>(
    _index: &I,
    bgp: &Bgp,
    cursors: &[C],
    parts: &[Vec<(usize, Role)>],
    est: Estimator,
    seed: u64,
) -> Vec<VarId> {
    let n = bgp.var_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match est {
        Estimator::Random => {
            let mut order: Vec<VarId> = (0..n).collect();
            order.shuffle(&mut rng);
            order
        }
        Estimator::RandomNonLonely => {
            let mut head: Vec<VarId> = (0..n).filter(|&v| !bgp.is_lonely(v)).collect();
            let mut tail: Vec<VarId> = (0..n).filter(|&v| bgp.is_lonely(v)).collect();
            head.shuffle(&mut rng);
            tail.shuffle(&mut rng);
            head.extend(tail);
            head
        }
        Estimator::RandomConnected => {
            let weights: Vec<u64> = (0..n).map(|_| rng.gen()).collect();
            greedy_order(bgp, &weights)
        }
        _ => {
            let weights: Vec<u64> = (0..n)
                .map(|v| weight(cursors, &parts[v], est) as u64)
                .collect();
            greedy_order(bgp, &weights)
        }
    }
}

/// The global elimination order for `bgp` with constants resolved.
pub fn global_veo<I: TripleIndex>(index: &I, bgp: &Bgp, est: Estimator, seed: u64) -> Vec<VarId> {
    let cursors: Vec<_> = bgp
        .patterns()
        .iter()
        .map(|p| index.open(Role::ALL.map(|r| p.constant(r))))
        .collect();
    let parts: Vec<_> = (0..bgp.var_count()).map(|v| var_positions(bgp, v)).collect();
    order_from(index, bgp, &cursors, &parts, est, seed)
}

/// The unbound variable of least weight, lonely ones only when no other is
/// left; ties go to the earliest variable.
pub(crate) fn adaptive_next<I: TripleIndex, C: PatternCursor>(
    _index: &I,
    cursors: &[C],
    parts: &[Vec<(usize, Role)>],
    lonely: &[bool],
    bound: &[bool],
    est: Estimator,
) -> VarId {
    let pick = |want_lonely: bool| {
        (0..bound.len())
            .filter(|&v| !bound[v] && lonely[v] == want_lonely)
            .min_by_key(|&v| (weight(cursors, &parts[v], est), v))
    };
    pick(false).or_else(|| pick(true)).expect("an unbound variable remains")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestVeo {
    pub order: Vec<VarId>,
    /// Time of the best run.
    pub elapsed: Duration,
    pub stats: Stats,
    /// False when the query had too many variables and the plain global
    /// order was used instead.
    pub exhaustive: bool,
}

/// Most non-lonely variables for which all orders are tried.
pub const EXHAUSTIVE_MAX_VARS: usize = 6;

/// Runs every global order of the non-lonely variables that keeps each new
/// variable connected to an earlier one when possible (lonely variables
/// last) and reports the fastest.
pub fn exhaustive_best_veo<I: TripleIndex>(index: &I, bgp: &Bgp, config: &EngineConfig) -> Result<BestVeo> {
    let run = |order: Vec<VarId>| -> Result<(Vec<VarId>, Stats)> {
        let cfg = EngineConfig {
            fixed_order: Some(order.clone()),
            ..config.clone()
        };
        let stats = evaluate_with(index, bgp, &cfg, |_| {})?;
        Ok((order, stats))
    };
    let base = global_veo(index, bgp, Estimator::Range, config.seed);
    let head: Vec<VarId> = base.iter().copied().filter(|&v| !bgp.is_lonely(v)).collect();
    let tail: Vec<VarId> = base.iter().copied().filter(|&v| bgp.is_lonely(v)).collect();
    if head.len() > EXHAUSTIVE_MAX_VARS {
        let order = global_veo(index, bgp, config.estimator, config.seed);
        let (order, stats) = run(order)?;
        return Ok(BestVeo {
            order,
            elapsed: stats.elapsed,
            stats,
            exhaustive: false,
        });
    }
    let mut orders = Vec::new();
    connected_orders(bgp, &head, &mut Vec::new(), &mut orders);
    let mut best: Option<(Vec<VarId>, Stats)> = None;
    for mut order in orders {
        order.extend_from_slice(&tail);
        let (order, stats) = run(order)?;
        if best.as_ref().is_none_or(|(_, b)| stats.elapsed < b.elapsed) {
            best = Some((order, stats));
        }
    }
    let (order, stats) = best.unwrap_or_else(|| (tail.clone(), Stats::default()));
    Ok(BestVeo {
        order,
        elapsed: stats.elapsed,
        stats,
        exhaustive: true,
    })
}

fn connected_orders(bgp: &Bgp, vars: &[VarId], prefix: &mut Vec<VarId>, out: &mut Vec<Vec<VarId>>) {
    if prefix.len() == vars.len() {
        out.push(prefix.clone());
        return;
    }
    let free: Vec<VarId> = vars.iter().copied().filter(|v| !prefix.contains(v)).collect();
    let linked: Vec<VarId> = free
        .iter()
        .copied()
        .filter(|&v| prefix.iter().any(|&u| bgp.connected(u, v)))
        .collect();
    let choices = if prefix.is_empty() || linked.is_empty() {
        free
    } else {
        linked
    };
    for v in choices {
        prefix.push(v);
        connected_orders(bgp, vars, prefix, out);
        prefix.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimator_names_round_trip() {
        for e in [
            Estimator::Range,
            Estimator::Children,
            Estimator::Refined(3),
            Estimator::Random,
            Estimator::RandomNonLonely,
            Estimator::RandomConnected,
        ] {
            assert_eq!(e.to_string().parse::<Estimator>().unwrap(), e);
        }
        assert_eq!("refined".parse::<Estimator>().unwrap(), Estimator::Refined(3));
        assert!("refined:x".parse::<Estimator>().is_err());
        assert!("bogus".parse::<Estimator>().is_err());
        assert_eq!("global".parse::<VeoMode>().unwrap(), VeoMode::Global);
        assert!("sideways".parse::<VeoMode>().is_err());
    }

    #[test]
    fn greedy_prefers_connected_and_defers_lonely() {
        // x-y share a pattern, z is connected to y only, w is lonely
        let q = Bgp::parse_ints("?x 1 ?y ; ?y 2 ?z ; ?z 3 ?w ; ?x 4 ?y").unwrap();
        let (x, y, z, w) = (0, 1, 2, 3);
        assert!(q.is_lonely(w));
        // z lightest, then x, but x is not connected to z: y must come next
        let weights = vec![2, 9, 1, 0];
        assert_eq!(greedy_order(&q, &weights), vec![z, y, x, w]);
    }

    #[test]
    fn connected_orders_respect_links() {
        let q = Bgp::parse_ints("?a 1 ?b ; ?b 1 ?c").unwrap();
        let mut out = Vec::new();
        connected_orders(&q, &[0, 1, 2], &mut Vec::new(), &mut out);
        // a then c is never allowed while b is free and linked
        assert!(out.iter().all(|o| !(o[0] == 0 && o[1] == 2)));
        assert!(out.iter().all(|o| !(o[0] == 2 && o[1] == 0)));
        assert_eq!(out.len(), 4);
    }
}
