//! Leapfrog TrieJoin over any index exposing pattern cursors.
//!
//! Each triple pattern gets a cursor standing on the trie node of its bound
//! positions. Variables are eliminated one at a time: the candidate values
//! are intersected with `leap`, and each binding descends every cursor that
//! mentions the variable.

mod veo;

pub use veo::{exhaustive_best_veo, global_veo, BestVeo, Estimator, VeoMode};

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::model::{Bgp, Id, Mapping, Role, VarId};

/// A cursor over the triples matching one pattern under the current
/// bindings.
pub trait PatternCursor {
    fn is_empty(&self) -> bool;

    /// Smallest `c' >= c` such that binding role `x` to `c'` keeps the
    /// cursor nonempty. `x` must be unbound.
    fn leap(&self, x: Role, c: Id) -> Option<Id>;

    /// Binds role `x` to `c`; the cursor becomes empty if nothing matches.
    fn down(&mut self, x: Role, c: Id);

    /// Undoes the last [`PatternCursor::down`].
    fn up(&mut self);

    /// Number of matching triples.
    fn range_size(&self) -> usize;

    /// Distinct values of role `x` among matching triples, if the index
    /// can count them.
    fn distinct_children(&self, x: Role) -> Option<usize>;

    /// Counts of role-`x` values per alphabet partition `k` levels down,
    /// as `(lo, hi, count)` with zero counts omitted.
    fn partition_counts(&self, x: Role, k: usize) -> Option<Vec<(u32, u32, usize)>>;
}

/// An index the engine can run on.
pub trait TripleIndex: Send + Sync {
    type Cursor<'a>: PatternCursor
    where
        Self: 'a;

    /// Cursor for a pattern whose constants are given per role.
    fn open(&self, consts: [Option<Id>; 3]) -> Self::Cursor<'_>;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn universe(&self) -> u32;

    fn supports_children(&self) -> bool {
        false
    }

    /// Smallest `c' >= c` admitted at every `(cursor, role)` position.
    fn next_common<'a>(
        &'a self,
        cursors: &[Self::Cursor<'a>],
        parts: &[(usize, Role)],
        c: Id,
        leaps: &mut u64,
    ) -> Option<Id> {
        leapfrog(cursors, parts, c, leaps)
    }
}

/// Round-robin leapfrog search over the given positions.
pub fn leapfrog<C: PatternCursor>(
    cursors: &[C],
    parts: &[(usize, Role)],
    mut c: Id,
    leaps: &mut u64,
) -> Option<Id> {
    let k = parts.len();
    if k == 0 {
        return None;
    }
    let mut agree = 0;
    let mut i = 0;
    loop {
        let (ci, x) = parts[i];
        *leaps += 1;
        let v = cursors[ci].leap(x, c)?;
        if v == c {
            agree += 1;
        } else {
            c = v;
            agree = 1;
        }
        if agree == k {
            return Some(c);
        }
        i = (i + 1) % k;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    /// Maximum number of results; 0 means unlimited.
    pub limit: usize,
    pub timeout: Option<Duration>,
    pub veo: VeoMode,
    pub estimator: Estimator,
    /// Seed for the random estimators.
    pub seed: u64,
    /// Forces this elimination order, overriding `veo` and `estimator`.
    pub fixed_order: Option<Vec<VarId>>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            limit: 1000,
            timeout: Some(Duration::from_secs(600)),
            veo: VeoMode::Adaptive,
            estimator: Estimator::Range,
            seed: 0,
            fixed_order: None,
        }
    }
}

impl EngineConfig {
    pub fn unlimited() -> Self {
        Self {
            limit: 0,
            timeout: None,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub elapsed: Duration,
    pub emitted: usize,
    pub timed_out: bool,
    pub leap_calls: u64,
}

#[derive(Clone, Debug, Default)]
pub struct QueryResult {
    pub mappings: Vec<Mapping>,
    pub stats: Stats,
}

/// Evaluates `bgp`, collecting the mappings.
pub fn evaluate<I: TripleIndex>(index: &I, bgp: &Bgp, config: &EngineConfig) -> Result<QueryResult> {
    let mut mappings = Vec::new();
    let stats = evaluate_with(index, bgp, config, |m| mappings.push(m.clone()))?;
    Ok(QueryResult { mappings, stats })
}

/// Evaluates `bgp`, handing each mapping to `emit` as soon as it is found.
pub fn evaluate_with<I: TripleIndex>(
    index: &I,
    bgp: &Bgp,
    config: &EngineConfig,
    emit: impl FnMut(&Mapping),
) -> Result<Stats> {
    let started = Instant::now();
    if config.estimator == Estimator::Children && !index.supports_children() {
        return Err(Error::Unsupported(
            "the children estimator needs an index built with distinct-child counting (vring)".into(),
        ));
    }
    if let Some(order) = &config.fixed_order {
        let mut seen = vec![false; bgp.var_count()];
        for &v in order {
            if v >= seen.len() || seen[v] {
                return Err(Error::Query("fixed order is not a permutation of the variables".into()));
            }
            seen[v] = true;
        }
        if order.len() != seen.len() {
            return Err(Error::Query("fixed order is not a permutation of the variables".into()));
        }
    }
    let cursors: Vec<I::Cursor<'_>> = bgp
        .patterns()
        .iter()
        .map(|p| index.open(Role::ALL.map(|r| p.constant(r))))
        .collect();
    let mut run = Run {
        index,
        bgp,
        config,
        cursors,
        parts: (0..bgp.var_count()).map(|v| var_positions(bgp, v)).collect(),
        lonely: (0..bgp.var_count()).map(|v| bgp.is_lonely(v)).collect(),
        bound: vec![false; bgp.var_count()],
        mapping: Mapping(vec![0; bgp.var_count()]),
        order: Vec::new(),
        emit,
        stats: Stats::default(),
        started,
        stop: false,
    };
    if run.cursors.iter().all(|c| !c.is_empty()) {
        run.order = match (&config.fixed_order, config.veo, config.estimator.is_random()) {
            (Some(order), _, _) => order.clone(),
            (None, VeoMode::Global, _) | (None, _, true) => {
                veo::order_from(index, bgp, &run.cursors, &run.parts, config.estimator, config.seed)
            }
            (None, VeoMode::Adaptive, false) => Vec::new(),
        };
        run.solve(0);
    }
    run.stats.elapsed = started.elapsed();
    Ok(run.stats)
}

struct Run<'a, I: TripleIndex + 'a, F> {
    index: &'a I,
    bgp: &'a Bgp,
    config: &'a EngineConfig,
    cursors: Vec<I::Cursor<'a>>,
    /// Per variable, the `(pattern, role)` positions where it occurs.
    parts: Vec<Vec<(usize, Role)>>,
    lonely: Vec<bool>,
    bound: Vec<bool>,
    mapping: Mapping,
    /// Fixed elimination order; empty in adaptive mode.
    order: Vec<VarId>,
    emit: F,
    stats: Stats,
    started: Instant,
    stop: bool,
}

const TIMEOUT_CHECK_MASK: u64 = 0xff;

impl<'a, I: TripleIndex + 'a, F: FnMut(&Mapping)> Run<'a, I, F> {
    fn check_timeout(&mut self) {
        if let Some(limit) = self.config.timeout {
            if self.started.elapsed() >= limit {
                self.stats.timed_out = true;
                self.stop = true;
            }
        }
    }

    fn next_var(&self, depth: usize) -> VarId {
        if !self.order.is_empty() {
            return self.order[depth];
        }
        veo::adaptive_next(
            self.index,
            &self.cursors,
            &self.parts,
            &self.lonely,
            &self.bound,
            self.config.estimator,
        )
    }

    fn solve(&mut self, depth: usize) {
        if self.stop {
            return;
        }
        if depth == self.bgp.var_count() {
            (self.emit)(&self.mapping);
            self.stats.emitted += 1;
            if self.config.limit != 0 && self.stats.emitted >= self.config.limit {
                self.stop = true;
            }
            self.check_timeout();
            return;
        }
        let x = self.next_var(depth);
        let parts = std::mem::take(&mut self.parts[x]);
        let universe = self.index.universe();
        let mut c: Id = 1;
        while !self.stop {
            let before = self.stats.leap_calls;
            let found = self
                .index
                .next_common(&self.cursors, &parts, c, &mut self.stats.leap_calls);
            if self.stats.leap_calls & !TIMEOUT_CHECK_MASK != before & !TIMEOUT_CHECK_MASK {
                self.check_timeout();
                if self.stop {
                    break;
                }
            }
            let Some(v) = found else { break };
            for &(i, r) in &parts {
                self.cursors[i].down(r, v);
            }
            if parts.iter().all(|&(i, _)| !self.cursors[i].is_empty()) {
                self.mapping.0[x] = v;
                self.bound[x] = true;
                self.solve(depth + 1);
                self.bound[x] = false;
            }
            for &(i, _) in parts.iter().rev() {
                self.cursors[i].up();
            }
            if v >= universe {
                break;
            }
            c = v + 1;
        }
        self.parts[x] = parts;
    }
}

/// The `(pattern, role)` positions where `v` occurs.
pub fn var_positions(bgp: &Bgp, v: VarId) -> Vec<(usize, Role)> {
    bgp.patterns()
        .iter()
        .enumerate()
        .flat_map(|(i, p)| p.roles_of(v).map(move |r| (i, r)))
        .collect()
}
