use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use learned_index::bloom::synthetic_url_corpus;
use learned_index::datasets::{
    gen_dense, gen_lognormal, gen_strings, load_keys, write_string_keys, write_u64_keys, KeyFormat, LoadedKeys,
};
use learned_index::Error;
use learned_index_bench::bloom::{bench_bloom, BloomOptions, DEFAULT_P_STARS};
use learned_index_bench::hash::{bench_hash, default_utilizations};
use learned_index_bench::range::{bench_range, RangeOptions};
use learned_index_bench::scaling::{scaling_check, DEFAULT_PROBES, DEFAULT_REPLICATES, DEFAULT_SEEDS, DEFAULT_SIZES};
use learned_index_bench::{write_report, BenchError};

#[derive(Parser)]
#[command(name = "learned-bench", version, about = "Build, verify and measure learned index structures")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic key file.
    Gen(GenArgs),
    /// Range-index benchmark: B-trees, RMIs and baselines on one key file.
    BenchRange(RangeArgs),
    /// Learned vs random hash functions in chained hash maps.
    BenchHash(HashArgs),
    /// Standard, learned and model-hash existence filters.
    BenchBloom(BloomArgs),
    /// Empirical CDF error growth with sample size.
    Scaling(ScalingArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    Lognormal,
    Dense,
    Strings,
    /// Keys plus a second file of non-keys (`--non-keys-out`).
    Urls,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Binary,
    Csv,
    Lines,
}

impl From<Format> for KeyFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Binary => KeyFormat::BinaryU64Le,
            Format::Csv => KeyFormat::Csv,
            Format::Lines => KeyFormat::Lines,
        }
    }
}

#[derive(Args)]
struct Output {
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the full report as JSON here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    dataset: Generator,
    #[arg(long, default_value_t = 1_000_000)]
    n: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value = "binary")]
    format: Format,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    #[arg(long, default_value_t = 2.0)]
    sigma: f64,
    /// Largest lognormal key.
    #[arg(long, default_value_t = 1_000_000_000)]
    scale_max: u64,
    #[arg(long, default_value_t = 0)]
    start: u64,
    #[arg(long, default_value_t = 1)]
    step: u64,
    /// Non-key count for `urls`; defaults to four per key.
    #[arg(long)]
    non_keys: Option<usize>,
    #[arg(long)]
    non_keys_out: Option<PathBuf>,
}

#[derive(Args)]
struct RangeArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, value_enum, default_value = "binary")]
    format: Format,
    #[arg(long, default_value_t = 100_000)]
    lookups: usize,
    #[arg(long, default_value_t = 5)]
    runs: usize,
    #[arg(long, default_value_t = 0.0)]
    absent_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Second-stage RMI sizes; scaled to the key count when omitted.
    #[arg(long, value_delimiter = ',')]
    leaves: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    page_sizes: Vec<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct HashArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, value_enum, default_value = "binary")]
    format: Format,
    /// Slots per key.
    #[arg(long, value_delimiter = ',')]
    utilizations: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct BloomArgs {
    /// Key file.
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    non_keys: PathBuf,
    #[arg(long, value_enum, default_value = "lines")]
    format: Format,
    #[arg(long, value_delimiter = ',')]
    p_star: Vec<f64>,
    /// Bits in the model-hash bitmap; one per key when omitted.
    #[arg(long)]
    bitmap_bits: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ScalingArgs {
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_SEEDS)]
    seeds: usize,
    #[arg(long, default_value_t = DEFAULT_PROBES)]
    probes: usize,
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    replicates: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

fn load(path: &Path, format: Format) -> Result<LoadedKeys, BenchError> {
    let loaded = load_keys(path, format.into()).map_err(|source| BenchError::Load {
        path: path.to_path_buf(),
        source,
    })?;
    if loaded.duplicates_dropped > 0 {
        eprintln!("dropped {} duplicate keys from {}", loaded.duplicates_dropped, path.display());
    }
    Ok(loaded.keys)
}

fn gen(a: GenArgs) -> Result<(), BenchError> {
    let format: KeyFormat = a.format.into();
    match a.dataset {
        Generator::Lognormal => write_u64_keys(&a.out, gen_lognormal(a.n, a.mu, a.sigma, a.scale_max, a.seed)?.keys(), format)?,
        Generator::Dense => write_u64_keys(&a.out, gen_dense(a.n, a.start, a.step)?.keys(), format)?,
        Generator::Strings => write_string_keys(&a.out, gen_strings(a.n, b"abcdefghijklmnopqrstuvwxyz", 4, 16, a.seed)?.keys())?,
        Generator::Urls => {
            let target = a
                .non_keys_out
                .ok_or_else(|| Error::InvalidArgument("urls needs --non-keys-out".into()))?;
            let (keys, non_keys) = synthetic_url_corpus(a.n, a.non_keys.unwrap_or(4 * a.n), a.seed)?;
            write_string_keys(&a.out, &keys)?;
            write_string_keys(&target, &non_keys)?;
        }
    }
    Ok(())
}

fn range(a: RangeArgs) -> Result<(), BenchError> {
    let keys = load(&a.dataset, a.format)?;
    let configure = |n: usize| {
        let mut o = RangeOptions::for_keys(n);
        o.lookups = a.lookups;
        o.runs = a.runs;
        o.absent_fraction = a.absent_fraction;
        o.seed = a.seed;
        if !a.leaves.is_empty() {
            o.rmi_leaves = a.leaves.clone();
        }
        if !a.page_sizes.is_empty() {
            o.page_sizes = a.page_sizes.clone();
        }
        o
    };
    let report = match keys {
        LoadedKeys::Int(ds) => bench_range(ds.shared_keys(), &configure(ds.len()))?,
        LoadedKeys::Str(ds) => bench_range(ds.shared_keys(), &configure(ds.len()))?,
    };
    write_report(&report.rows, &report, a.output.out.as_deref(), a.output.json.as_deref())
}

fn hash(a: HashArgs) -> Result<(), BenchError> {
    let LoadedKeys::Int(ds) = load(&a.dataset, a.format)? else {
        return Err(Error::InvalidArgument("hash benchmark needs integer keys".into()).into());
    };
    let utils = if a.utilizations.is_empty() { default_utilizations() } else { a.utilizations };
    let report = bench_hash(ds.shared_keys(), &utils, a.seed)?;
    eprintln!("learned hash colliding-key reduction at one slot per key: {:.3}", report.conflict_reduction_at_full);
    write_report(&report.rows, &report, a.output.out.as_deref(), a.output.json.as_deref())
}

fn bloom(a: BloomArgs) -> Result<(), BenchError> {
    let opts = BloomOptions {
        p_stars: if a.p_star.is_empty() { DEFAULT_P_STARS.to_vec() } else { a.p_star },
        bitmap_bits: a.bitmap_bits,
        seed: a.seed,
        ..BloomOptions::default()
    };
    let report = match (load(&a.dataset, a.format)?, load(&a.non_keys, a.format)?) {
        (LoadedKeys::Int(k), LoadedKeys::Int(nk)) => bench_bloom(k.keys().to_vec(), nk.keys().to_vec(), &opts)?,
        (LoadedKeys::Str(k), LoadedKeys::Str(nk)) => bench_bloom(k.keys().to_vec(), nk.keys().to_vec(), &opts)?,
        _ => return Err(Error::InvalidArgument("key and non-key files differ in key type".into()).into()),
    };
    write_report(&report.rows, &report, a.output.out.as_deref(), a.output.json.as_deref())
}

fn scaling(a: ScalingArgs) -> Result<(), BenchError> {
    let sizes = if a.sizes.is_empty() { DEFAULT_SIZES.to_vec() } else { a.sizes };
    let report = scaling_check(&sizes, a.seeds, a.probes, a.replicates, a.seed);
    eprintln!(
        "slope {:.3}; variance at median {:.3e} vs {:.3e}",
        report.slope, report.variance.empirical, report.variance.expected
    );
    write_report(&report.rows, &report, a.output.out.as_deref(), a.output.json.as_deref())
}

fn main() -> ExitCode {
    // usage errors exit 1 so that 2 always means a failed correctness check
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.cmd {
        Cmd::Gen(a) => gen(a),
        Cmd::BenchRange(a) => range(a),
        Cmd::BenchHash(a) => hash(a),
        Cmd::BenchBloom(a) => bloom(a),
        Cmd::Scaling(a) => scaling(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
