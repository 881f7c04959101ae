use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use tnet_cli::bench::{append_records, ratio_table, run_grid, write_ratios, BenchGrid};
use tnet_cli::commands::{
    cmd_compare, cmd_generate, cmd_hash_export, compute, create, load, read_sizes, summarize_run, write_component_sets,
    write_json, write_sizes, ComputeParams, DEFAULT_HASHES,
};
use tnet_cli::{CliError, Method};
use tnet_core::hashing::default_super_nodes;
use tnet_core::sketch::DEFAULT_REGISTERS;
use tnet_core::{GeneratorConfig, HashFamily};

/// Out-components of temporal networks.
#[derive(Debug, Parser)]
#[command(name = "tnet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a random temporal network: Erdos-Renyi skeleton, uniform edges and times.
    Generate(GenerateArgs),
    /// Out-component sizes of an event file.
    Compute(ComputeArgs),
    /// Earth-Mover distance and quantile deltas between two size files.
    Compare(CompareArgs),
    /// Time and memory grid over generated networks.
    Bench(BenchArgs),
    /// Hashed super-event streams plus the descriptors of their hashes.
    HashExport(HashExportArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// Skeleton wiring probability; defaults to 2/n.
    #[arg(long)]
    p: Option<f64>,
    /// Observation window length; defaults to m.
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Event file with `u,v,t` lines.
    #[arg(long)]
    input: PathBuf,
    /// Sort events by time instead of rejecting out-of-order input.
    #[arg(long)]
    sort: bool,
    /// Keep only this leading fraction of the events.
    #[arg(long)]
    prefix_fraction: Option<f64>,
}

#[derive(Debug, Args)]
struct TuningArgs {
    /// Super-node count; defaults to ceil(0.3 n).
    #[arg(long)]
    n_super: Option<usize>,
    /// Number of hash functions K.
    #[arg(long, default_value_t = DEFAULT_HASHES)]
    hashes: usize,
    /// Registers per sketch s.
    #[arg(long, default_value_t = DEFAULT_REGISTERS)]
    registers: usize,
    /// Seed of the hash family and sketch salt.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ComputeArgs {
    #[arg(long, value_parser = parse_method)]
    method: Method,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    tuning: TuningArgs,
    /// Maximum waiting time between consecutive events (eg_hll only).
    #[arg(long)]
    delta_t: Option<f64>,
    /// Per-node sizes CSV.
    #[arg(long)]
    sizes: Option<PathBuf>,
    /// JSON summary; printed to stdout when omitted.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Bit dump of the out-component sets (matrix and hashed methods).
    #[arg(long)]
    dump: Option<PathBuf>,
    /// Exact sizes CSV to score the result against.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    estimate: PathBuf,
    /// JSON report; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long = "n", value_delimiter = ',', required = true)]
    ns: Vec<usize>,
    #[arg(long = "m", value_delimiter = ',', required = true)]
    ms: Vec<usize>,
    #[arg(long, value_delimiter = ',', value_parser = parse_method, required = true)]
    methods: Vec<Method>,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[command(flatten)]
    tuning: TuningArgs,
    /// Per-cell limit in seconds; slower cells are recorded as censored.
    #[arg(long)]
    timeout: Option<f64>,
    /// Score each method against the exact sizes.
    #[arg(long)]
    accuracy: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Bench CSV, appended to if it exists.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_parser = parse_method, default_value = "matrix")]
    baseline: Method,
    /// Ratio table CSV; printed to stdout when omitted.
    #[arg(long)]
    ratios: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct HashExportArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    n_super: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_HASHES)]
    hashes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tnet: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate(a) => {
            let mut cfg = GeneratorConfig::new(a.n, a.m, a.seed);
            if let Some(p) = a.p {
                cfg.p = p;
            }
            cfg.time_horizon = a.horizon;
            cmd_generate(&cfg, &a.out)?;
            Ok(())
        }
        Command::Compute(a) => {
            if a.sizes.is_some() && !a.method.per_node() {
                return Err(CliError::Usage(format!("{} reports the mean only; drop --sizes", a.method)));
            }
            let net = load(&a.input.input, a.input.sort, a.input.prefix_fraction)?;
            let params = ComputeParams {
                method: a.method,
                n_super: a.tuning.n_super,
                hashes: a.tuning.hashes,
                registers: a.tuning.registers,
                seed: a.tuning.seed,
                delta_t: a.delta_t,
            };
            let run = compute(&net, &params)?;
            if let Some(path) = &a.dump {
                let sets = run
                    .components
                    .as_ref()
                    .ok_or_else(|| CliError::Usage(format!("{} does not produce component sets", a.method)))?;
                write_component_sets(create(path)?, sets).map_err(|e| CliError::Io {
                    path: path.clone(),
                    source: e,
                })?;
            }
            if let (Some(path), Some(sizes)) = (&a.sizes, &run.sizes) {
                write_sizes(path, sizes)?;
            }
            let truth = a.truth.as_deref().map(read_sizes).transpose()?;
            let summary = summarize_run(&run, truth.as_ref(), a.sizes.clone())?;
            write_json(a.summary.as_deref(), &summary)
        }
        Command::Compare(a) => {
            let truth = read_sizes(&a.truth)?;
            let estimate = read_sizes(&a.estimate)?;
            write_json(a.out.as_deref(), &cmd_compare(&truth, &estimate)?)
        }
        Command::Bench(a) => {
            if let Some(t) = a.timeout {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(CliError::Usage(format!("--timeout must be positive, got {t}")));
                }
            }
            let grid = BenchGrid {
                repeats: a.repeats,
                seed: a.tuning.seed,
                n_super: a.tuning.n_super,
                hashes: a.tuning.hashes,
                registers: a.tuning.registers,
                timeout: a.timeout.map(Duration::from_secs_f64),
                accuracy: a.accuracy,
                jobs: a.jobs,
                ..BenchGrid::new(a.ns, a.ms, a.methods)
            };
            let records = run_grid(&grid)?;
            append_records(&a.out, &records)?;
            let rows = ratio_table(&records, a.baseline);
            match &a.ratios {
                Some(path) => write_ratios(create(path)?, &rows, a.baseline).map_err(|e| CliError::Io {
                    path: path.clone(),
                    source: e,
                }),
                None => write_ratios(std::io::stdout().lock(), &rows, a.baseline).map_err(|e| CliError::Io {
                    path: "<stdout>".into(),
                    source: e,
                }),
            }
        }
        Command::HashExport(a) => {
            let net = load(&a.input.input, a.input.sort, a.input.prefix_fraction)?;
            let n_s = a.n_super.unwrap_or_else(|| default_super_nodes(net.n()));
            let family = HashFamily::new(a.seed, n_s);
            let written = cmd_hash_export(&net, &family, a.hashes, &a.out_dir)?;
            write_json(None, &written)
        }
    }
}
