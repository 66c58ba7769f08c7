use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::Args;
use ringjoin::index::{bytes_per_triple, Index, Variant};
use ringjoin::ingest::{parse_triples, InputFormat};
use ringjoin::ltj::{EngineConfig, Estimator, Stats, VeoMode};
use ringjoin::model::Mapping;
use ringjoin::par::Parallelism;
use ringjoin::Error;

use crate::queries::{classify_query, read_query_file, resolve};

pub const CSV_HEADER: [&str; 8] = [
    "query_id",
    "type",
    "variant",
    "veo",
    "estimator",
    "elapsed_us",
    "results",
    "timeout",
];

#[derive(Args, Debug)]
pub struct BuildArgs {
    /// Triples file, one triple per line
    #[arg(long)]
    pub input: PathBuf,
    /// `ints` (positive integer ids) or `terms` (arbitrary tokens)
    #[arg(long, default_value = "ints")]
    pub format: InputFormat,
    /// ring-large, ring-small, vring-large, vring-small, uring-large,
    /// uring-small, rdfcsa-large or rdfcsa-small
    #[arg(long)]
    pub variant: Variant,
    /// Index file to write
    #[arg(long)]
    pub out: PathBuf,
    /// Build on one thread
    #[arg(long)]
    pub sequential: bool,
}

pub fn build(args: &BuildArgs) -> Result<()> {
    let file = File::open(&args.input).with_context(|| format!("opening {}", args.input.display()))?;
    let graph = parse_triples(BufReader::new(file), args.format)
        .with_context(|| format!("parsing {}", args.input.display()))?;
    if graph.triples.is_empty() {
        return Err(Error::EmptyGraph.into());
    }
    let mode = if args.sequential {
        Parallelism::Sequential
    } else {
        Parallelism::Parallel
    };
    let index = Index::build(&graph, args.variant, mode)?;
    let bytes = index
        .save(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    let n = graph.triples.len();
    println!(
        "variant={} n={} U={} bytes={} bpt={:.3}",
        args.variant,
        n,
        graph.universe,
        bytes,
        bytes_per_triple(bytes, n)
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(long)]
    pub index: PathBuf,
    /// One query per line: `[id:] s p o ; s p o ; ...`
    #[arg(long)]
    pub queries: PathBuf,
    /// Result limit per query; 0 for none
    #[arg(long, default_value_t = 1000)]
    pub limit: usize,
    /// Timeout per query in seconds; 0 for none
    #[arg(long, default_value_t = 600.0)]
    pub timeout: f64,
    #[arg(long, default_value = "adaptive")]
    pub veo: VeoMode,
    /// range, children, refined[:K], random, random-nl or random-e
    #[arg(long, default_value = "range")]
    pub estimator: Estimator,
    /// Seed for the random estimators
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl RunArgs {
    fn config(&self) -> Result<EngineConfig> {
        if !self.timeout.is_finite() || self.timeout < 0.0 {
            bail!("timeout must be a nonnegative number of seconds");
        }
        Ok(EngineConfig {
            limit: self.limit,
            timeout: (self.timeout > 0.0).then(|| Duration::from_secs_f64(self.timeout)),
            veo: self.veo,
            estimator: self.estimator,
            seed: self.seed,
            fixed_order: None,
        })
    }

    fn open(&self) -> Result<Index> {
        let index = Index::load(&self.index, None).with_context(|| format!("loading {}", self.index.display()))?;
        if self.estimator == Estimator::Children && !index.variant().supports_children() {
            bail!(
                "estimator `children` needs a vring-large or vring-small index, but {} holds {}",
                self.index.display(),
                index.variant()
            );
        }
        Ok(index)
    }
}

pub fn query(args: &RunArgs) -> Result<()> {
    let config = args.config()?;
    let index = args.open()?;
    let entries = read_query_file(&args.queries)?;
    let dict = index.dictionary.as_ref();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    for entry in &entries {
        let q = resolve(entry, dict)?;
        writeln!(out, "# query {} type={}", entry.id, classify_query(&q.bgp))?;
        let names = q.bgp.var_names();
        let mut failed: Option<io::Error> = None;
        let mut line = String::new();
        let mut emit = |m: &Mapping| {
            if failed.is_some() {
                return;
            }
            line.clear();
            for (v, &id) in m.0.iter().enumerate() {
                if v > 0 {
                    line.push('\t');
                }
                line.push_str(&names[v]);
                line.push('=');
                match dict.and_then(|d| d.term(id)) {
                    Some(term) => line.push_str(term),
                    None => line.push_str(&id.to_string()),
                }
            }
            if let Err(e) = writeln!(out, "{line}") {
                failed = Some(e);
            }
        };
        let stats = if q.unresolvable {
            Stats::default()
        } else {
            index.index.evaluate_with(&q.bgp, &config, &mut emit)?
        };
        if let Some(e) = failed {
            return Err(e.into());
        }
        writeln!(
            out,
            "# stats id={} results={} elapsed_us={} timeout={}",
            entry.id,
            stats.emitted,
            stats.elapsed.as_micros(),
            u8::from(stats.timed_out)
        )?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub csv: PathBuf,
    /// Also time every global order and report the fastest
    #[arg(long)]
    pub exhaustive_veo: bool,
}

pub fn bench(args: &BenchArgs) -> Result<()> {
    let config = args.run.config()?;
    let index = args.run.open()?;
    let entries = read_query_file(&args.run.queries)?;
    let mut csv = csv::Writer::from_path(&args.csv).with_context(|| format!("creating {}", args.csv.display()))?;
    let mut header: Vec<&str> = CSV_HEADER.to_vec();
    if args.exhaustive_veo {
        header.extend(["best_order", "best_elapsed_us"]);
    }
    csv.write_record(&header)?;
    let variant = index.variant().to_string();
    let veo = config.veo.to_string();
    let estimator = config.estimator.to_string();
    for entry in &entries {
        let q = resolve(entry, index.dictionary.as_ref())?;
        let stats = if q.unresolvable {
            Stats::default()
        } else {
            index.index.evaluate_with(&q.bgp, &config, |_| {})?
        };
        let mut row = vec![
            entry.id.clone(),
            classify_query(&q.bgp).to_string(),
            variant.clone(),
            veo.clone(),
            estimator.clone(),
            stats.elapsed.as_micros().to_string(),
            stats.emitted.to_string(),
            u8::from(stats.timed_out).to_string(),
        ];
        if args.exhaustive_veo {
            let best = if q.unresolvable {
                None
            } else {
                Some(index.index.exhaustive_best_veo(&q.bgp, &config)?).filter(|b| b.exhaustive)
            };
            match best {
                Some(b) => {
                    let order: Vec<&str> = b.order.iter().map(|&v| q.bgp.var_name(v)).collect();
                    row.push(order.join(" "));
                    row.push(b.elapsed.as_micros().to_string());
                }
                None => row.extend([String::new(), String::new()]),
            }
        }
        csv.write_record(&row)?;
    }
    csv.flush()?;
    println!("{} queries written to {}", entries.len(), args.csv.display());
    Ok(())
}
