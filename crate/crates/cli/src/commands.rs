//! Subcommand implementations, independent of argument parsing.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use tnet_core::fusion::hashed_logical_bytes;
use tnet_core::hashing::default_super_nodes;
use tnet_core::matrix::dense_matrix_bytes;
use tnet_core::metrics::quantile_deltas;
use tnet_core::network::{load_with, LoadOptions};
use tnet_core::sketch::{BankOrientation, DEFAULT_REGISTERS};
use tnet_core::{
    compress, eg_out_component_sizes, emd, fused_out_components, generate, ComponentMatrix, EventGraph,
    FusionOptions, GeneratorConfig, HashFamily, NodeSet, SizeDistribution, SketchBank, TemporalNetwork,
};

use crate::error::CliError;
use crate::method::Method;

pub const DEFAULT_HASHES: usize = 5;
pub const QUANTILE_LEVELS: [f64; 7] = [0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0];

pub fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(CliError::io(path))
}

pub fn load(path: &Path, sort: bool, prefix_fraction: Option<f64>) -> Result<TemporalNetwork, CliError> {
    let opts = LoadOptions { sort, prefix_fraction };
    Ok(load_with(path, &opts)?.network)
}

pub fn read_sizes(path: &Path) -> Result<SizeDistribution, CliError> {
    let f = File::open(path).map_err(CliError::io(path))?;
    Ok(SizeDistribution::read_csv(BufReader::new(f))?)
}

pub fn write_sizes(path: &Path, sizes: &SizeDistribution) -> Result<(), CliError> {
    sizes.write_csv(create(path)?, "size").map_err(CliError::io(path))
}

pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => fs::write(p, text + "\n").map_err(CliError::io(p)),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

pub fn cmd_generate(cfg: &GeneratorConfig, out: &Path) -> Result<TemporalNetwork, CliError> {
    let net = generate(cfg)?;
    net.write_to(create(out)?).map_err(CliError::io(out))?;
    Ok(net)
}

/// Method choice plus every tunable; irrelevant fields are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct ComputeParams {
    pub method: Method,
    /// Defaults to `ceil(0.3 n)`.
    pub n_super: Option<usize>,
    pub hashes: usize,
    pub registers: usize,
    /// Hash-family seed and sketch salt.
    pub seed: u64,
    pub delta_t: Option<f64>,
}

impl ComputeParams {
    pub fn new(method: Method) -> Self {
        ComputeParams {
            method,
            n_super: None,
            hashes: DEFAULT_HASHES,
            registers: DEFAULT_REGISTERS,
            seed: 0,
            delta_t: None,
        }
    }
}

/// Parameters that actually applied to a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppliedParams {
    pub n_s: Option<usize>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub s: Option<usize>,
    pub seed: u64,
    pub delta_t: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Computation {
    pub method: Method,
    pub n: usize,
    pub m: usize,
    /// Absent for mean-only methods.
    pub sizes: Option<SizeDistribution>,
    pub mean: f64,
    pub logical_memory: u64,
    pub wall_time: f64,
    pub params: AppliedParams,
    /// Out-component sets, kept by the exact and fused methods.
    pub components: Option<Vec<NodeSet>>,
}

pub fn compute(net: &TemporalNetwork, p: &ComputeParams) -> Result<Computation, CliError> {
    let (n, m) = (net.n(), net.m());
    if p.delta_t.is_some() && p.method != Method::EgHll {
        return Err(CliError::Usage(format!("--delta-t only applies to eg_hll, not {}", p.method)));
    }
    if n == 0 {
        return Err(CliError::Core(tnet_core::Error::EmptyDistribution));
    }
    let mut params = AppliedParams {
        n_s: None,
        k: None,
        s: None,
        seed: p.seed,
        delta_t: p.delta_t,
    };
    let start = Instant::now();
    let (sizes, mean, logical_memory, components) = match p.method {
        Method::Matrix => {
            let cm = ComponentMatrix::run(net)?;
            let sizes = cm.size_distribution();
            let mean = sizes.mean();
            (Some(sizes), mean, dense_matrix_bytes(n), Some(cm.out_components()))
        }
        Method::MatrixHll => {
            params.s = Some(p.registers);
            let bank = SketchBank::run(net, p.registers, p.seed)?;
            debug_assert_eq!(bank.orientation(), BankOrientation::Forward);
            let est = bank.estimates();
            let mean = est.iter().sum::<f64>() / n as f64;
            (None, mean, bank.logical_bytes(), None)
        }
        Method::MatrixRevHll => {
            params.s = Some(p.registers);
            let bank = SketchBank::run_reversed(net, p.registers, p.seed)?;
            let sizes = SizeDistribution::from_estimates(bank.estimates());
            let mean = sizes.mean();
            (Some(sizes), mean, bank.logical_bytes(), None)
        }
        Method::EgHll => {
            params.s = Some(p.registers);
            let eg = EventGraph::build(net, p.delta_t)?;
            let est = eg_out_component_sizes(&eg, net, p.registers, p.seed)?;
            let memory = event_graph_bytes(m, eg.edge_count(), est.peak_live_sketches, p.registers);
            let mean = est.sizes.mean();
            (Some(est.sizes), mean, memory, None)
        }
        Method::Hashed | Method::HashedParallel => {
            if p.hashes == 0 {
                return Err(CliError::Usage("--hashes must be at least 1".into()));
            }
            let n_s = p.n_super.unwrap_or_else(|| default_super_nodes(n));
            params.n_s = Some(n_s);
            params.k = Some(p.hashes);
            let family = HashFamily::new(p.seed, n_s);
            let opts = FusionOptions {
                parallel: p.method == Method::HashedParallel,
                reversed_pass: false,
            };
            let fe = fused_out_components(net, &family, p.hashes, opts)?;
            let sizes = fe.size_distribution();
            let mean = sizes.mean();
            let memory = hashed_logical_bytes(n, n_s, p.hashes);
            (Some(sizes), mean, memory, Some(fe.components().to_vec()))
        }
    };
    let wall_time = start.elapsed().as_secs_f64();
    Ok(Computation {
        method: p.method,
        n,
        m,
        sizes,
        mean,
        logical_memory,
        wall_time,
        params,
        components,
    })
}

/// Event-graph footprint: one 8-byte entry per vertex and per edge, plus
/// the sketches alive at the peak of the sweep.
pub fn event_graph_bytes(m: usize, edges: usize, peak_live: usize, s: usize) -> u64 {
    8 * (m + edges) as u64 + (peak_live * s) as u64
}

/// Bit dump of component sets: `n` as u64 LE, then `ceil(n/8)` bytes per
/// set, least significant bit first.
pub fn write_component_sets<W: Write>(mut w: W, sets: &[NodeSet]) -> std::io::Result<()> {
    let n = sets.len();
    w.write_all(&(n as u64).to_le_bytes())?;
    let row_bytes = n.div_ceil(8);
    let mut buf = Vec::with_capacity(row_bytes + 8);
    for set in sets {
        buf.clear();
        for word in set.words() {
            buf.extend_from_slice(&word.to_le_bytes());
        }
        w.write_all(&buf[..row_bytes])?;
    }
    w.flush()
}

#[derive(Debug, Clone, Serialize)]
pub struct ComputeSummary {
    pub method: Method,
    pub n: usize,
    pub m: usize,
    pub mean: f64,
    pub max: Option<f64>,
    pub emd: Option<f64>,
    pub acc: Option<f64>,
    pub wall_time: f64,
    pub logical_memory: u64,
    pub sizes_path: Option<PathBuf>,
    pub params: AppliedParams,
}

/// JSON summary of a run, scored against `truth` when one is given.
pub fn summarize_run(
    run: &Computation,
    truth: Option<&SizeDistribution>,
    sizes_path: Option<PathBuf>,
) -> Result<ComputeSummary, CliError> {
    let distance = match (truth, &run.sizes) {
        (Some(t), Some(s)) => {
            if t.len() != s.len() {
                return Err(tnet_core::Error::SizeMismatch {
                    left: t.len(),
                    right: s.len(),
                }
                .into());
            }
            Some(emd(t, s)?)
        }
        _ => None,
    };
    Ok(ComputeSummary {
        method: run.method,
        n: run.n,
        m: run.m,
        mean: run.mean,
        max: run.sizes.as_ref().map(SizeDistribution::max),
        emd: distance,
        acc: distance,
        wall_time: run.wall_time,
        logical_memory: run.logical_memory,
        sizes_path,
        params: run.params.clone(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct QuantileDelta {
    pub q: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub n: usize,
    pub acc: f64,
    pub emd: f64,
    pub mean_truth: f64,
    pub mean_estimate: f64,
    pub quantiles: Vec<QuantileDelta>,
}

pub fn cmd_compare(truth: &SizeDistribution, estimate: &SizeDistribution) -> Result<CompareReport, CliError> {
    if truth.len() != estimate.len() {
        return Err(tnet_core::Error::SizeMismatch {
            left: truth.len(),
            right: estimate.len(),
        }
        .into());
    }
    let acc = tnet_core::accuracy(truth, estimate)?;
    let quantiles = quantile_deltas(truth, estimate, &QUANTILE_LEVELS)?
        .into_iter()
        .map(|(q, delta)| QuantileDelta { q, delta })
        .collect();
    Ok(CompareReport {
        n: truth.len(),
        acc,
        emd: acc,
        mean_truth: truth.mean(),
        mean_estimate: estimate.mean(),
        quantiles,
    })
}

/// Files written for one hash by [`cmd_hash_export`].
#[derive(Debug, Clone, Serialize)]
pub struct ExportedHash {
    pub index: usize,
    pub events: PathBuf,
    pub descriptor: PathBuf,
}

/// Writes, for each of the first `hashes` family members, the super-event
/// stream `h(u),h(v),t` and the descriptor needed to rebuild the hash.
pub fn cmd_hash_export(
    net: &TemporalNetwork,
    family: &HashFamily,
    hashes: usize,
    out_dir: &Path,
) -> Result<Vec<ExportedHash>, CliError> {
    if hashes == 0 {
        return Err(CliError::Usage("--hashes must be at least 1".into()));
    }
    fs::create_dir_all(out_dir).map_err(CliError::io(out_dir))?;
    let mut out = Vec::with_capacity(hashes);
    for j in 0..hashes {
        let h = family.member(j)?;
        let hashed = compress(net, &h)?;
        let events = out_dir.join(format!("super_events_{j}.csv"));
        hashed.network().write_to(create(&events)?).map_err(CliError::io(&events))?;
        let descriptor = out_dir.join(format!("hash_{j}.json"));
        write_json(Some(&descriptor), &h.descriptor())?;
        out.push(ExportedHash {
            index: j,
            events,
            descriptor,
        });
    }
    Ok(out)
}
