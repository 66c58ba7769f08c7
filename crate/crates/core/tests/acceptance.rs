//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if
//! any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ringjoin::index::{AnyIndex, Index, Variant};
use ringjoin::ltj::EngineConfig;
use ringjoin::model::{Bgp, Role, Triple};
use ringjoin::oracle::OracleGraph;
use ringjoin::par::Parallelism;
use ringjoin::rdfcsa::{PlainPsi, PsiSeq, Rdfcsa, RdfcsaPair, SampledPsi};
use ringjoin::ring::Ring;
use ringjoin::succinct::{BitSeq, BitVector, CompressedBitVector, RawBits};
use ringjoin::wavelet::{partition_weights, range_intersect, range_intersect_next, refined_weight, RangeRef, WaveletTree};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

/// Sequence from the worked wavelet-tree example, with two ranges whose
/// refined weights are known for k = 0, 1, 2.
fn c1_refined_golden() -> Outcome {
    let s = [5, 3, 1, 4, 6, 6, 6, 6, 6, 6, 6, 6, 6];
    let wt = WaveletTree::<BitVector>::new(&s, 6).map_err(|e| e.to_string())?;
    let ranges = [RangeRef::new(&wt, 1, 4), RangeRef::new(&wt, 5, 8)];
    let got: Vec<usize> = (0..3).map(|k| refined_weight(&ranges, k).unwrap()).collect();
    ensure!(got == [4, 2, 0], "weights {got:?}, expected [4, 2, 0]");
    Ok(format!("weights k=0..2 = {got:?}"))
}

fn c2_oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce55);
    let cases = 1000;
    let mut runs = 0usize;
    let mut nonempty = 0usize;
    for case in 0..cases {
        let (g, q, want) = common::random_case(&mut rng, 5000, 200, 20_000);
        nonempty += usize::from(!want.is_empty());
        let u = g.iter().flat_map(|t| t.0).max().unwrap();
        for v in Variant::ALL {
            let ix = AnyIndex::build(v, &g, u, Parallelism::Parallel).map_err(|e| e.to_string())?;
            for cfg in common::configs(v) {
                let got = ix.evaluate(&q, &cfg).map_err(|e| e.to_string())?;
                runs += 1;
                ensure!(
                    common::sorted(got.mappings) == want,
                    "case {case}: {v} {} {} differs from the oracle on `{q}`",
                    cfg.veo,
                    cfg.estimator
                );
            }
        }
    }
    Ok(format!("{cases} cases ({nonempty} nonempty), {runs} configuration runs identical"))
}

fn c3_structural() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    fn check<P: PsiSeq>(c: &Rdfcsa<P>) -> Result<(), String> {
        let n = c.len();
        for i in 1..=3 * n {
            let j = c.psi(i);
            ensure!((j - 1) / n == ((i - 1) / n + 1) % 3, "psi({i}) = {j} leaves its band");
            ensure!(c.psi(c.psi(j)) == i, "psi^3({i}) != {i}");
        }
        Ok(())
    }
    for b in 0..100 {
        let u = rng.gen_range(2..=60);
        let n = rng.gen_range(1..=600);
        let g = common::random_graph(&mut rng, n, u);
        if b % 2 == 0 {
            let p = RdfcsaPair::<PlainPsi>::build(&g, u, Parallelism::Parallel).map_err(|e| e.to_string())?;
            check(p.spo())?;
            check(p.ops())?;
        } else {
            let p = RdfcsaPair::<SampledPsi>::build(&g, u, Parallelism::Parallel).map_err(|e| e.to_string())?;
            check(p.spo())?;
            check(p.ops())?;
        }
        let r = Ring::<BitVector>::build(&g, u, false, Parallelism::Parallel).map_err(|e| e.to_string())?;
        for i in 1..=r.len() {
            let j = r.lf_step(Role::O, i).unwrap();
            let k = r.lf_step(Role::P, j).unwrap();
            ensure!(r.lf_step(Role::S, k).unwrap() == i, "F_s(F_p(F_o({i}))) != {i}");
        }
    }
    Ok("100 rdfcsa pairs and 100 rings".into())
}

fn scan_rank(bits: &[bool], b: bool, i: usize) -> usize {
    bits[..i].iter().filter(|&&x| x == b).count()
}

fn scan_select(bits: &[bool], b: bool, k: usize) -> Option<usize> {
    if k == 0 {
        return None;
    }
    bits.iter()
        .enumerate()
        .filter(|(_, &x)| x == b)
        .nth(k - 1)
        .map(|(i, _)| i + 1)
}

fn bit_queries<B: BitSeq>(rng: &mut ChaCha8Rng, queries: usize) -> Result<(), String> {
    let mut done = 0;
    while done < queries {
        let n = rng.gen_range(1..=10_000);
        let density = rng.gen_range(0.0..1.0);
        let bits: Vec<bool> = (0..n).map(|_| rng.gen_bool(density)).collect();
        let bv = B::build(RawBits::from_bools(&bits));
        let ones = bits.iter().filter(|&&b| b).count();
        for _ in 0..1000 {
            let p = rng.gen_range(1..=n);
            ensure!(bv.get(p) == bits[p - 1], "access({p})");
            let i = rng.gen_range(0..=n);
            let b = rng.gen_bool(0.5);
            ensure!(bv.rank(b, i).unwrap() == scan_rank(&bits, b, i), "rank{}({i})", b as u8);
            let total = if b { ones } else { n - ones };
            let k = rng.gen_range(0..=total + 1);
            ensure!(bv.select(b, k) == scan_select(&bits, b, k), "select{}({k})", b as u8);
            let j = rng.gen_range(1..=n);
            let want = (j..=n).find(|&q| bits[q - 1] == b);
            ensure!(bv.select_next(b, j) == want, "select_next{}({j})", b as u8);
        }
        done += 1000;
    }
    Ok(())
}

fn c4_succinct() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let q = 10_000;
    bit_queries::<BitVector>(&mut rng, q)?;
    bit_queries::<CompressedBitVector>(&mut rng, q)?;
    let mut done = 0;
    while done < q {
        let n = rng.gen_range(1..=10_000);
        let sigma = rng.gen_range(1..=256u32);
        let seq: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=sigma)).collect();
        let wt = WaveletTree::<CompressedBitVector>::new(&seq, sigma).map_err(|e| e.to_string())?;
        let other: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=sigma)).collect();
        let wt2 = WaveletTree::<BitVector>::new(&other, sigma).map_err(|e| e.to_string())?;
        let wt3 = WaveletTree::<BitVector>::new(&seq, sigma).map_err(|e| e.to_string())?;
        for _ in 0..500 {
            let i = rng.gen_range(1..=n);
            ensure!(wt.access(i).unwrap() == seq[i - 1], "wt access({i})");
            let c = rng.gen_range(1..=sigma);
            let i = rng.gen_range(0..=n);
            let want = seq[..i].iter().filter(|&&x| x == c).count();
            ensure!(wt.rank(c, i).unwrap() == want, "wt rank({c},{i})");
            let occ = seq.iter().filter(|&&x| x == c).count();
            let j = rng.gen_range(1..=occ + 1);
            let want = seq.iter().enumerate().filter(|(_, &x)| x == c).nth(j - 1).map(|(p, _)| p + 1);
            ensure!(wt.select(c, j) == want, "wt select({c},{j})");

            let l = rng.gen_range(1..=n);
            let r = rng.gen_range(l - 1..=n);
            let slice = if l <= r { &seq[l - 1..r] } else { &seq[0..0] };
            let c = rng.gen_range(1..=sigma + 1);
            let want = slice.iter().copied().filter(|&x| x >= c).min();
            ensure!(wt.range_next_value(l, r, c) == want, "range_next_value({l},{r},{c})");
            let lo = rng.gen_range(1..=sigma);
            let hi = rng.gen_range(lo..=sigma);
            let want = slice.iter().filter(|&&x| lo <= x && x <= hi).count();
            ensure!(wt.range_count(l, r, lo, hi) == want, "range_count");

            let l2 = rng.gen_range(1..=n);
            let r2 = rng.gen_range(l2..=n);
            let slice2 = &other[l2 - 1..r2];
            let l3 = rng.gen_range(1..=n);
            let r3 = rng.gen_range(l3..=n);
            let slice3 = &seq[l3 - 1..r3];
            let a: BTreeSet<u32> = slice3.iter().copied().collect();
            let b: BTreeSet<u32> = slice2.iter().copied().collect();
            let common: Vec<u32> = a.intersection(&b).copied().collect();
            let ranges = [RangeRef::new(&wt3, l3, r3), RangeRef::new(&wt2, l2, r2)];
            ensure!(range_intersect(&ranges).unwrap() == common, "range_intersect");
            let c = rng.gen_range(1..=sigma);
            let want = common.iter().copied().find(|&x| x >= c);
            ensure!(range_intersect_next(&ranges, c).unwrap() == want, "range_intersect_next");
            let k = rng.gen_range(0..=4);
            for p in partition_weights(&ranges, k).unwrap() {
                let cnt3 = slice3.iter().filter(|&&x| p.lo <= x && x <= p.hi).count();
                let cnt2 = slice2.iter().filter(|&&x| p.lo <= x && x <= p.hi).count();
                ensure!(p.counts == [cnt3, cnt2], "partition_weights [{}, {}]", p.lo, p.hi);
            }
        }
        done += 500;
    }
    Ok(format!("{q} queries per primitive on both bitvectors and wavelet trees"))
}

fn c5_estimator() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for inst in 0..500 {
        let sigma = rng.gen_range(1..=256u32);
        let m = rng.gen_range(1..=4);
        let trees: Vec<(Vec<u32>, WaveletTree<BitVector>)> = (0..m)
            .map(|_| {
                let n = rng.gen_range(1..=2000);
                let s: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=sigma)).collect();
                let t = WaveletTree::new(&s, sigma).unwrap();
                (s, t)
            })
            .collect();
        let mut ranges = Vec::new();
        let mut sets: Vec<BTreeSet<u32>> = Vec::new();
        let mut sizes = Vec::new();
        for (s, t) in &trees {
            let l = rng.gen_range(1..=s.len());
            let r = rng.gen_range(l..=s.len());
            ranges.push(RangeRef::new(t, l, r));
            sets.push(s[l - 1..r].iter().copied().collect());
            sizes.push(r - l + 1);
        }
        let inter = sets[0].iter().filter(|x| sets.iter().all(|s| s.contains(x))).count();
        let w: Vec<usize> = (0..=4).map(|k| refined_weight(&ranges, k).unwrap()).collect();
        ensure!(w[0] == *sizes.iter().min().unwrap(), "instance {inst}: k=0 weight {} != min range size", w[0]);
        ensure!(w.windows(2).all(|p| p[0] >= p[1]), "instance {inst}: weights increase {w:?}");
        ensure!(w[4] >= inter, "instance {inst}: weight {} below intersection {inter}", w[4]);
    }
    Ok("500 instances, k = 0..4".into())
}

fn c6_persistence() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let g = common::random_graph(&mut rng, 3000, 150);
    let u = g.iter().flat_map(|t| t.0).max().unwrap();
    let queries: Vec<Bgp> = (0..1000).map(|_| common::random_query(&mut rng, &g, u)).collect();
    let cfg = EngineConfig {
        limit: 200,
        timeout: None,
        ..EngineConfig::default()
    };
    for v in Variant::ALL {
        let ix = Index {
            index: AnyIndex::build(v, &g, u, Parallelism::Parallel).map_err(|e| e.to_string())?,
            dictionary: None,
        };
        let path = dir.path().join(v.name());
        ix.save(&path).map_err(|e| e.to_string())?;
        let back = Index::load(&path, Some(v)).map_err(|e| e.to_string())?;
        ensure!(back.to_bytes() == std::fs::read(&path).unwrap(), "{v}: re-save differs");
        ensure!(back.index.triples() == g, "{v}: decoded triples differ");
        for q in &queries {
            let a = ix.index.evaluate(q, &cfg).map_err(|e| e.to_string())?;
            let b = back.index.evaluate(q, &cfg).map_err(|e| e.to_string())?;
            ensure!(a.mappings == b.mappings, "{v}: `{q}` differs after load");
        }
    }
    Ok("8 variants x 1000 queries, byte-identical re-save".into())
}

fn c7_space() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let u: u32 = 10_000;
    let mut g: Vec<Triple> = (0..1_000_000)
        .map(|_| Triple::new(rng.gen_range(1..=u), rng.gen_range(1..=u), rng.gen_range(1..=u)))
        .collect();
    g.sort_unstable();
    g.dedup();
    let n = g.len();
    let size = |v: Variant| -> Result<usize, String> {
        let ix = Index {
            index: AnyIndex::build(v, &g, u, Parallelism::Parallel).map_err(|e| e.to_string())?,
            dictionary: None,
        };
        Ok(ix.to_bytes().len())
    };
    let ring = size(Variant::RingLarge)?;
    let csa = size(Variant::RdfcsaLarge)?;
    let log_u = (u as f64).log2().ceil();
    let bound = 1.5 * (3.0 * n as f64 * log_u / 8.0 + u as f64);
    let ratio = csa as f64 / ring as f64;
    let detail = format!(
        "n={n}: ring-large {ring} B ({:.2} bpt, bound {:.0} B), rdfcsa-large {csa} B ({:.2} bpt), ratio {ratio:.2}",
        ring as f64 / n as f64,
        bound,
        csa as f64 / n as f64
    );
    ensure!((ring as f64) <= bound, "ring-large over bound: {detail}");
    ensure!((1.4..=2.6).contains(&ratio), "ratio outside 2 +/- 30%: {detail}");
    Ok(detail)
}

fn c8_limit() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let g = common::random_graph(&mut rng, 4000, 150);
    let u = g.iter().flat_map(|t| t.0).max().unwrap();
    let q = Bgp::parse_ints("?x ?p ?y ; ?y ?q ?z").unwrap();
    let all: BTreeSet<_> = OracleGraph::new(&g).eval(&q).into_iter().collect();
    ensure!(all.len() > 1000, "only {} solutions", all.len());
    for v in Variant::ALL {
        let ix = AnyIndex::build(v, &g, u, Parallelism::Parallel).map_err(|e| e.to_string())?;
        let res = ix.evaluate(&q, &EngineConfig::default()).map_err(|e| e.to_string())?;
        ensure!(res.mappings.len() == 1000 && res.stats.emitted == 1000, "{v}: {} emitted", res.mappings.len());
        ensure!(res.mappings.iter().all(|m| all.contains(m)), "{v}: emitted a non-solution");
        let distinct: BTreeSet<_> = res.mappings.iter().collect();
        ensure!(distinct.len() == 1000, "{v}: duplicate solutions");
        ensure!(!res.stats.timed_out, "{v}: timed out");
        let expired = EngineConfig {
            timeout: Some(Duration::ZERO),
            ..EngineConfig::default()
        };
        let res = ix.evaluate(&q, &expired).map_err(|e| e.to_string())?;
        ensure!(res.stats.timed_out && res.mappings.len() < 1000, "{v}: zero timeout not honoured");
        ensure!(res.mappings.iter().all(|m| all.contains(m)), "{v}: partial result not a solution");
    }
    Ok(format!("{} solutions available, 1000 emitted on every variant", all.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("refined weight golden values", c1_refined_golden),
        ("oracle equivalence", c2_oracle_equivalence),
        ("structural invariants", c3_structural),
        ("succinct-layer oracles", c4_succinct),
        ("estimator properties", c5_estimator),
        ("persistence", c6_persistence),
        ("space sanity", c7_space),
        ("limit and timeout", c8_limit),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(f).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {} {name}: {d} ({secs:.1}s)", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {} {name}: {d} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
