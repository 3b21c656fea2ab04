//! Command-line frontend for the `fixedrank` samplers.
//!
//! Every command writes to stdout (or `--output`) and reports problems on
//! stderr. Exit codes: 0 on success, 1 on usage errors, 2 on runtime
//! failures such as exhausted budgets or failed verifications.

pub mod render;

use std::collections::hash_map::RandomState;
use std::fs;
use std::hash::{BuildHasher, Hasher};
use std::io::{self, Read, Write};
use std::sync::mpsc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use fixedrank::balance::{approx_count, sample_lattice_rank, BalanceOptions, FixedRankOptions};
use fixedrank::cftp::{MonotoneLattice, DEFAULT_MAX_STEPS};
use fixedrank::counts;
use fixedrank::diagnostics::{self, BiasReport};
use fixedrank::lozenge::{PlanePartition, PlanePartitionPoset};
use fixedrank::partitions::{PartitionSampler, PartitionSamplerConfig, Region, RegionPoset, YoungDiagram};
use fixedrank::permutations::{Permutation, PermutationPoset};
use fixedrank::poset::GradedPoset;
use fixedrank::rng::split_seed;

#[derive(Debug, Parser)]
#[command(name = "fixedrank", version, about = "Uniform sampling of fixed-rank elements in graded posets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw uniform samples; one JSON object per line.
    Sample(SampleArgs),
    /// Print an exact count.
    Count(CountArgs),
    /// Estimate the number of size-n diagrams by sampling.
    Estimate(EstimateArgs),
    /// Run exact checks of the bias inequalities and print a JSON report.
    Verify(VerifyArgs),
    /// Draw an object as SVG or ASCII.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Partitions of n.
    Partitions,
    /// Permutations of n with k inversions.
    Permutations,
    /// Plane partitions of volume k in a box.
    Lozenge,
    /// Young diagrams of size k in a region file.
    Region,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Size parameter: partitions of n, permutations of n.
    #[arg(long)]
    pub n: Option<usize>,
    /// Target rank: inversions, volume, or diagram size.
    #[arg(long, visible_alias = "rank")]
    pub k: Option<usize>,
    /// Region JSON file: {"ceiling": [[height, last_column], ...], "floor": ...}.
    #[arg(long)]
    pub region: Option<String>,
    /// Box AxB (partitions) or AxBxC (lozenge).
    #[arg(long = "box")]
    pub box_dims: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct BudgetArgs {
    /// Use coupling from the past for every draw.
    #[arg(long)]
    pub exact: bool,
    /// Chain steps per draw when not exact [partitions: mixing_bound(n, 1/e); others: twice the largest of 8 coalescence horizons].
    #[arg(long)]
    pub steps: Option<u64>,
    /// Draws allowed per accepted sample [partitions: 10^4·ceil(160 n^(1/4)); others: unlimited].
    #[arg(long)]
    pub retry_cap: Option<u64>,
    /// Samples per bias probe [Hoeffding count at 95% confidence].
    #[arg(long)]
    pub probe_samples: Option<usize>,
    /// Growth constant c of the bias schedule [the model's max degree].
    #[arg(long)]
    pub c: Option<f64>,
    /// Coupled-step budget per coupling from the past.
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    pub cftp_max_steps: u64,
}

impl BudgetArgs {
    fn options(&self) -> FixedRankOptions {
        FixedRankOptions {
            balance: BalanceOptions { c: self.c, samples_per_probe: self.probe_samples, ..BalanceOptions::default() },
            exact: self.exact,
            steps: self.steps,
            retry_cap: self.retry_cap,
            cftp_max_steps: self.cftp_max_steps,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    pub family: Family,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub budget: BudgetArgs,
    /// Number of samples.
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
    /// Seed; a fresh one is drawn and printed on stderr when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Replicas with split seeds; lines appear in completion order.
    #[arg(long, default_value_t = 1)]
    pub parallel: usize,
    /// Output file instead of stdout.
    #[arg(long)]
    pub output: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct CountArgs {
    pub family: Family,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    /// `partitions` uses the region under xy ≤ n; `region` reads --region.
    pub family: Family,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub budget: BudgetArgs,
    /// Samples per level of the recursion.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    /// Growth hypothesis, ratio bound, balanced tails, cut conductance and rank-mass bounds.
    Section2,
    /// Exact λ_n bounds, Z_n bound and salvage probability for partitions.
    PartitionBounds,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    pub check: Check,
    /// Model to check (section2).
    #[arg(long)]
    pub family: Option<Family>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Growth constant c [the model's max degree].
    #[arg(long)]
    pub c: Option<f64>,
    /// Upper end of the n range (partition-bounds); --n is the lower end [30].
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub output: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Svg,
    Ascii,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    /// partitions (Young diagram), permutations (Rothe diagram) or lozenge.
    pub family: Family,
    /// The object as JSON, or a sample line; read from stdin when absent.
    #[arg(long)]
    pub object: Option<String>,
    /// Box AxBxC for lozenge; the height bound defaults to the largest entry.
    #[arg(long = "box")]
    pub box_dims: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Svg)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<String>,
}

/// Failures mapped to exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
    #[error("verification failed")]
    Failed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) | CliError::Failed => 2,
        }
    }
}

impl From<fixedrank::Error> for CliError {
    fn from(e: fixedrank::Error) -> Self {
        use fixedrank::Error as E;
        match e {
            E::OutOfRange { .. } | E::InvalidInput(_) | E::InvalidRegion(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn entropy_seed() -> u64 {
    let mut h = RandomState::new().build_hasher();
    h.write_u128(std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_nanos()));
    h.write_u32(std::process::id());
    h.finish()
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = entropy_seed();
        eprintln!("seed: {s}");
        s
    })
}

fn parse_dims(text: &str, expected: usize) -> CliResult<Vec<usize>> {
    let dims: Result<Vec<usize>, _> = text.split(['x', 'X']).map(|t| t.trim().parse::<usize>()).collect();
    match dims {
        Ok(d) if d.len() == expected && d.iter().all(|&v| v > 0) => Ok(d),
        _ => Err(usage(format!("--box expects {expected} positive sides like {}", ["3"; 3][..expected].join("x")))),
    }
}

fn require<T: Copy>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| usage(format!("{flag} is required")))
}

fn load_region(model: &ModelArgs) -> CliResult<Region> {
    if let Some(path) = &model.region {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {path}: {e}")))?;
        return Ok(Region::from_json(&text)?);
    }
    if let Some(b) = &model.box_dims {
        let d = parse_dims(b, 2)?;
        return Ok(Region::rectangle(d[0], d[1] as u32));
    }
    Err(usage("--region FILE or --box AxB is required"))
}

fn lozenge_model(model: &ModelArgs) -> CliResult<PlanePartitionPoset> {
    let b = model.box_dims.as_deref().ok_or_else(|| usage("--box AxBxC is required"))?;
    let d = parse_dims(b, 3)?;
    Ok(PlanePartitionPoset::new(d[0], d[1], d[2] as u32)?)
}

fn open_output(path: &Option<String>) -> CliResult<Box<dyn Write + Send>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout())),
    })
}

#[derive(Serialize)]
struct SampleLine {
    replica: usize,
    index: usize,
    sample: Value,
    draws: u64,
}

/// Splits `total` samples over `replicas`, earlier replicas taking the remainder.
fn share(total: usize, replicas: usize, r: usize) -> usize {
    total / replicas + usize::from(r < total % replicas)
}

type Emit = mpsc::Sender<CliResult<SampleLine>>;

fn run_lattice<L, F>(
    lattice: &L,
    k: usize,
    count: usize,
    options: &FixedRankOptions,
    seed: u64,
    replica: usize,
    tx: &Emit,
    encode: F,
) -> CliResult<()>
where
    L: MonotoneLattice,
    F: Fn(&L::Element) -> Value,
{
    let batch = sample_lattice_rank(lattice, k, count, options, seed)?;
    for (index, s) in batch.samples.iter().enumerate() {
        let _ = tx.send(Ok(SampleLine { replica, index, sample: encode(&s.element), draws: s.draws }));
    }
    Ok(())
}

fn sample_replica(args: &SampleArgs, seed: u64, replica: usize, count: usize, tx: &Emit) -> CliResult<()> {
    let options = args.budget.options();
    match args.family {
        Family::Partitions => {
            let n = require(args.model.n, "--n")?;
            let config = PartitionSamplerConfig {
                exact: args.budget.exact,
                steps: args.budget.steps,
                retry_cap: args.budget.retry_cap,
                cftp_max_steps: args.budget.cftp_max_steps,
                ..PartitionSamplerConfig::default()
            };
            let sampler = PartitionSampler::new(n, config)?;
            for index in 0..count {
                let s = sampler.sample(split_seed(seed, index as u64))?;
                let _ = tx.send(Ok(SampleLine { replica, index, sample: json!(s.parts), draws: s.draws }));
            }
            Ok(())
        }
        Family::Permutations => {
            let poset = PermutationPoset::new(require(args.model.n, "--n")?)?;
            run_lattice(&poset, require(args.model.k, "--k")?, count, &options, seed, replica, tx, |p: &Permutation| json!(p.mapping()))
        }
        Family::Lozenge => {
            let poset = lozenge_model(&args.model)?;
            run_lattice(&poset, require(args.model.k, "--k")?, count, &options, seed, replica, tx, |p: &PlanePartition| json!(p.to_rows()))
        }
        Family::Region => {
            let poset = RegionPoset::new(load_region(&args.model)?);
            run_lattice(&poset, require(args.model.k, "--k")?, count, &options, seed, replica, tx, |d: &YoungDiagram| json!(d.parts()))
        }
    }
}

fn sample(args: &SampleArgs) -> CliResult<()> {
    if args.parallel == 0 {
        return Err(usage("--parallel must be positive"));
    }
    let seed = resolve_seed(args.seed);
    let mut out = open_output(&args.output)?;
    let (tx, rx) = mpsc::channel();
    let replicas = args.parallel;
    let mut first_error = None;
    std::thread::scope(|scope| {
        for r in 0..replicas {
            let tx = tx.clone();
            let replica_seed = if replicas == 1 { seed } else { split_seed(seed, r as u64) };
            scope.spawn(move || {
                if let Err(e) = sample_replica(args, replica_seed, r, share(args.samples, replicas, r), &tx) {
                    let _ = tx.send(Err(e));
                }
            });
        }
        drop(tx);
        for line in rx {
            match line {
                Ok(line) => {
                    if let Err(e) = serde_json::to_writer(&mut out, &line).map_err(io::Error::other).and_then(|_| out.write_all(b"\n")) {
                        first_error.get_or_insert(CliError::from(e));
                    }
                }
                Err(e) => {
                    first_error.get_or_insert(e);
                }
            }
        }
    });
    out.flush()?;
    first_error.map_or(Ok(()), Err)
}

fn count(args: &CountArgs) -> CliResult<()> {
    let m = &args.model;
    let value = match args.family {
        Family::Partitions => counts::partition_number(require(m.n, "--n")?),
        Family::Permutations => {
            let n = require(m.n, "--n")?;
            let table = counts::inversion_numbers(n);
            let k = require(m.k, "--k")?;
            table.get(k).cloned().ok_or_else(|| usage(format!("--k must be at most {}", table.len() - 1)))?
        }
        Family::Lozenge => {
            let p = lozenge_model(m)?;
            counts::box_plane_partitions(p.a, p.b, p.c as usize, require(m.k, "--k")?)
        }
        Family::Region => counts::count_restricted(&load_region(m)?, require(m.k, "--k")?),
    };
    println!("{value}");
    Ok(())
}

fn estimate(args: &EstimateArgs) -> CliResult<()> {
    let (region, n) = match args.family {
        Family::Partitions => {
            let n = require(args.model.n, "--n")?;
            (Region::under_hyperbola(n as u32), n)
        }
        Family::Region => (load_region(&args.model)?, require(args.model.k, "--k")?),
        _ => return Err(usage("estimate supports partitions and region")),
    };
    let seed = resolve_seed(args.seed);
    let result = approx_count(&region, n, args.samples, seed, &args.budget.options())?;
    let levels: Vec<Value> =
        result.levels.iter().map(|l| json!({"target": l.target, "height": l.height, "fraction": l.fraction})).collect();
    let mut out = open_output(&args.output)?;
    writeln!(out, "{}", json!({"n": n, "estimate": result.estimate, "levels": levels}))?;
    out.flush()?;
    Ok(())
}

fn verify_model<P: GradedPoset>(model: &P, c: Option<f64>, k: Option<usize>) -> CliResult<Vec<BiasReport>> {
    let c = c.unwrap_or((model.max_degree() as f64).max(2.0));
    let r = model.rank_bound();
    let ks: Vec<usize> = match k {
        Some(k) => vec![k],
        None => (1..r).collect(),
    };
    ks.into_iter().map(|k| diagnostics::verify_bias_inequalities(model, c, k).map_err(CliError::from)).collect()
}

fn verify(args: &VerifyArgs) -> CliResult<()> {
    let report = match args.check {
        Check::Section2 => {
            let family = args.family.ok_or_else(|| usage("--family is required"))?;
            let m = &args.model;
            let reports = match family {
                Family::Partitions | Family::Region => verify_model(&RegionPoset::new(load_region(m)?), args.c, m.k)?,
                Family::Permutations => verify_model(&PermutationPoset::new(require(m.n, "--n")?)?, args.c, m.k)?,
                Family::Lozenge => verify_model(&lozenge_model(m)?, args.c, m.k)?,
            };
            let passed = reports.iter().all(|r| r.passed);
            json!({"check": "section2", "passed": passed, "reports": reports})
        }
        Check::PartitionBounds => {
            let lo = args.model.n.unwrap_or(30);
            let hi = args.n_max.unwrap_or(lo);
            if lo < 30 || hi < lo {
                return Err(usage("partition-bounds needs 30 <= n <= n-max"));
            }
            let table = counts::partition_numbers(hi);
            let mut rows = Vec::new();
            let mut passed = true;
            for n in lo..=hi {
                let b = diagnostics::lambda_bounds(&table, n);
                let (z_ok, z_ratio) = diagnostics::z_n_bound(n)?;
                let prob = diagnostics::salvage_probability(n)?;
                let s_ok = diagnostics::salvage_bound_holds(&prob, n);
                let ok = b.lower && b.upper && b.inverse_bias && z_ok && s_ok;
                passed &= ok;
                rows.push(json!({
                    "n": n,
                    "lambda_lower": b.lower,
                    "lambda_upper": b.upper,
                    "inverse_bias": b.inverse_bias,
                    "z_ratio": z_ratio,
                    "z_bound": 40.0 * (n as f64).powf(0.75),
                    "z_ok": z_ok,
                    "salvage_probability": diagnostics::Scalar::to_f64(&prob),
                    "salvage_bound": diagnostics::salvage_bound_value(n),
                    "salvage_ok": s_ok,
                    "passed": ok,
                }));
            }
            json!({"check": "partition-bounds", "passed": passed, "rows": rows})
        }
    };
    let mut out = open_output(&args.output)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&report).map_err(io::Error::other)?)?;
    out.flush()?;
    if report["passed"].as_bool() == Some(true) {
        Ok(())
    } else {
        Err(CliError::Failed)
    }
}

/// Accepts a bare JSON object or a sample line carrying it under `sample`.
fn parse_object(text: &str) -> CliResult<Value> {
    let v: Value = serde_json::from_str(text.trim()).map_err(|e| usage(format!("object is not JSON: {e}")))?;
    Ok(match v {
        Value::Object(mut map) => map.remove("sample").ok_or_else(|| usage("object has no `sample` field"))?,
        other => other,
    })
}

fn as_u32_list(v: &Value) -> CliResult<Vec<u32>> {
    serde_json::from_value(v.clone()).map_err(|e| usage(format!("expected a list of nonnegative integers: {e}")))
}

pub fn decode_partition(v: &Value) -> CliResult<YoungDiagram> {
    Ok(YoungDiagram::from_parts(&as_u32_list(v)?)?)
}

pub fn decode_permutation(v: &Value) -> CliResult<Permutation> {
    Ok(Permutation::new(as_u32_list(v)?)?)
}

pub fn decode_plane_partition(v: &Value, c: Option<u32>) -> CliResult<PlanePartition> {
    let rows: Vec<Vec<u32>> = serde_json::from_value(v.clone()).map_err(|e| usage(format!("expected a matrix of heights: {e}")))?;
    let c = c.unwrap_or_else(|| rows.iter().flatten().copied().max().unwrap_or(0).max(1));
    Ok(PlanePartition::from_rows(&rows, c)?)
}

fn render(args: &RenderArgs) -> CliResult<()> {
    let text = match &args.object {
        Some(t) => t.clone(),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s.lines().next().unwrap_or("").to_string()
        }
    };
    let object = parse_object(&text)?;
    let doc = match (args.family, args.format) {
        (Family::Partitions | Family::Region, Format::Svg) => render::young_svg(&decode_partition(&object)?.parts()),
        (Family::Partitions | Family::Region, Format::Ascii) => render::young_ascii(&decode_partition(&object)?.parts()),
        (Family::Permutations, Format::Svg) => render::rothe_svg(&decode_permutation(&object)?),
        (Family::Lozenge, Format::Svg) => {
            let c = match &args.box_dims {
                Some(b) => Some(parse_dims(b, 3)?[2] as u32),
                None => None,
            };
            let pp = decode_plane_partition(&object, c)?;
            let c = c.unwrap_or_else(|| pp.to_rows().iter().flatten().copied().max().unwrap_or(0).max(1));
            render::lozenge_svg(&pp, c)
        }
        (family, Format::Ascii) => return Err(usage(format!("ascii output is only available for Young diagrams, not {family:?}"))),
    };
    let mut out = open_output(&args.output)?;
    out.write_all(doc.as_bytes())?;
    out.flush()?;
    Ok(())
}

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Sample(a) => sample(a),
        Command::Count(a) => count(a),
        Command::Estimate(a) => estimate(a),
        Command::Verify(a) => verify(a),
        Command::Render(a) => render(a),
    }
}
