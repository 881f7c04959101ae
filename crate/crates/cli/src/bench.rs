//! Benchmark grid: every method on generated networks over lists of `n`
//! and `m`, timed, with analytic memory and optional accuracy.

use std::fs::OpenOptions;
use std::io::{self, Write};
use std::path::Path;
use std::sync::{mpsc, Arc};
use std::thread;
use std::time::Duration;

use rayon::prelude::*;
use serde::Serialize;
use tnet_core::fusion::hashed_logical_bytes;
use tnet_core::hashing::default_super_nodes;
use tnet_core::matrix::dense_matrix_bytes;
use tnet_core::sketch::DEFAULT_REGISTERS;
use tnet_core::{emd, generate, ComponentMatrix, GeneratorConfig, SizeDistribution, TemporalNetwork};

use crate::commands::{compute, ComputeParams, DEFAULT_HASHES};
use crate::error::CliError;
use crate::method::Method;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchGrid {
    pub ns: Vec<usize>,
    pub ms: Vec<usize>,
    pub methods: Vec<Method>,
    pub repeats: usize,
    /// Repeat `r` uses seed `seed + r` for the network, hashes and salts.
    pub seed: u64,
    /// Fixed super-node count; defaults to `ceil(0.3 n)` per cell.
    pub n_super: Option<usize>,
    pub hashes: usize,
    pub registers: usize,
    /// Cells running longer are recorded as censored.
    pub timeout: Option<Duration>,
    /// Score every per-node method against the exact matrix.
    pub accuracy: bool,
    /// Worker threads; networks are processed concurrently when above 1.
    pub jobs: usize,
}

impl BenchGrid {
    pub fn new(ns: Vec<usize>, ms: Vec<usize>, methods: Vec<Method>) -> Self {
        BenchGrid {
            ns,
            ms,
            methods,
            repeats: 1,
            seed: 0,
            n_super: None,
            hashes: DEFAULT_HASHES,
            registers: DEFAULT_REGISTERS,
            timeout: None,
            accuracy: false,
            jobs: 1,
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.ns.is_empty() || self.ms.is_empty() || self.methods.is_empty() {
            return Err(CliError::Usage("bench grid needs at least one n, one m and one method".into()));
        }
        if self.repeats == 0 || self.jobs == 0 {
            return Err(CliError::Usage("--repeats and --jobs must be at least 1".into()));
        }
        Ok(())
    }

    fn params(&self, method: Method, n: usize, seed: u64) -> ComputeParams {
        ComputeParams {
            method,
            n_super: Some(self.n_super.unwrap_or_else(|| default_super_nodes(n))),
            hashes: self.hashes,
            registers: self.registers,
            seed,
            delta_t: None,
        }
    }
}

/// One grid cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub method: Method,
    pub n: usize,
    pub m: usize,
    pub n_s: Option<usize>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub s: Option<usize>,
    pub seed: u64,
    /// Seconds; the timeout itself for censored cells.
    pub wall_time: f64,
    /// Bytes of the method's main structures; unknown for censored event-graph cells.
    pub logical_memory: Option<u64>,
    /// Earth-Mover distance to the exact sizes.
    pub acc: Option<f64>,
    pub censored: bool,
    /// Process-wide high-water mark after the cell, where the OS reports it.
    pub peak_rss: Option<u64>,
}

pub const CSV_HEADER: &str = "method,n,m,n_s,K,s,seed,wall_time,logical_memory,acc,censored,peak_rss";

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.method,
            self.n,
            self.m,
            opt(self.n_s),
            opt(self.k),
            opt(self.s),
            self.seed,
            self.wall_time,
            opt(self.logical_memory),
            opt(self.acc),
            self.censored,
            opt(self.peak_rss)
        )
    }
}

/// Memory a method needs, known before running it.
pub fn planned_memory(method: Method, n: usize, n_s: usize, k: usize, s: usize) -> Option<u64> {
    match method {
        Method::Matrix => Some(dense_matrix_bytes(n)),
        Method::MatrixHll | Method::MatrixRevHll => Some((n * s) as u64),
        Method::Hashed | Method::HashedParallel => Some(hashed_logical_bytes(n, n_s, k)),
        Method::EgHll => None,
    }
}

pub fn run_grid(grid: &BenchGrid) -> Result<Vec<BenchRecord>, CliError> {
    grid.validate()?;
    let mut cells = Vec::new();
    for &n in &grid.ns {
        for &m in &grid.ms {
            for r in 0..grid.repeats {
                cells.push((n, m, grid.seed.wrapping_add(r as u64)));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(grid.jobs)
        .build()
        .map_err(|e| CliError::Cell(e.to_string()))?;
    let groups: Vec<Vec<BenchRecord>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(n, m, seed)| run_network(grid, n, m, seed))
            .collect::<Result<_, _>>()
    })?;
    Ok(groups.into_iter().flatten().collect())
}

fn run_network(grid: &BenchGrid, n: usize, m: usize, seed: u64) -> Result<Vec<BenchRecord>, CliError> {
    let net = Arc::new(generate(&GeneratorConfig::new(n, m, seed))?);
    let truth = if grid.accuracy {
        Some(ComponentMatrix::run(&net)?.size_distribution())
    } else {
        None
    };
    grid.methods
        .iter()
        .map(|&method| run_cell(grid, &net, truth.as_ref(), method, seed))
        .collect()
}

fn run_cell(
    grid: &BenchGrid,
    net: &Arc<TemporalNetwork>,
    truth: Option<&SizeDistribution>,
    method: Method,
    seed: u64,
) -> Result<BenchRecord, CliError> {
    let params = grid.params(method, net.n(), seed);
    let n_s = params.n_super.unwrap_or(1);
    let mut record = BenchRecord {
        method,
        n: net.n(),
        m: net.m(),
        n_s: method.uses_hashing().then_some(n_s),
        k: method.uses_hashing().then_some(grid.hashes),
        s: method.uses_sketches().then_some(grid.registers),
        seed,
        wall_time: 0.0,
        logical_memory: planned_memory(method, net.n(), n_s, grid.hashes, grid.registers),
        acc: None,
        censored: false,
        peak_rss: None,
    };
    let outcome = match grid.timeout {
        None => Some(compute(net, &params)?),
        Some(limit) => {
            let (tx, rx) = mpsc::channel();
            let shared = Arc::clone(net);
            thread::spawn(move || {
                let _ = tx.send(compute(&shared, &params));
            });
            match rx.recv_timeout(limit) {
                Ok(result) => Some(result?),
                Err(mpsc::RecvTimeoutError::Timeout) => None,
                Err(mpsc::RecvTimeoutError::Disconnected) => {
                    return Err(CliError::Cell(format!("{method} on n={} m={} panicked", net.n(), net.m())));
                }
            }
        }
    };
    match outcome {
        Some(run) => {
            record.wall_time = run.wall_time.max(f64::MIN_POSITIVE);
            record.logical_memory = Some(run.logical_memory);
            if let (Some(t), Some(sizes)) = (truth, run.sizes.as_ref()) {
                record.acc = Some(emd(t, sizes)?);
            }
        }
        None => {
            record.wall_time = grid.timeout.unwrap_or_default().as_secs_f64();
            record.censored = true;
        }
    }
    record.peak_rss = peak_rss_bytes();
    Ok(record)
}

/// `VmHWM` from `/proc/self/status`, in bytes.
pub fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kib: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kib * 1024)
}

pub fn write_records<W: Write>(mut w: W, records: &[BenchRecord], header: bool) -> io::Result<()> {
    if header {
        writeln!(w, "{CSV_HEADER}")?;
    }
    for r in records {
        writeln!(w, "{}", r.csv_row())?;
    }
    w.flush()
}

/// Appends to `path`, writing the header only when the file is new or empty.
pub fn append_records(path: &Path, records: &[BenchRecord]) -> Result<(), CliError> {
    let f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(CliError::io(path))?;
    let fresh = f.metadata().map_err(CliError::io(path))?.len() == 0;
    write_records(io::BufWriter::new(f), records, fresh).map_err(CliError::io(path))
}

/// Mean time and memory of each method relative to `baseline` on the same
/// `(n, m)`, over uncensored repeats.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub method: Method,
    pub n: usize,
    pub m: usize,
    pub time_ratio: Option<f64>,
    pub memory_ratio: Option<f64>,
}

pub fn ratio_table(records: &[BenchRecord], baseline: Method) -> Vec<RatioRow> {
    let mut keys: Vec<(usize, usize, Method)> = records.iter().map(|r| (r.n, r.m, r.method)).collect();
    keys.sort();
    keys.dedup();
    let mean_of = |n: usize, m: usize, method: Method, f: &dyn Fn(&BenchRecord) -> Option<f64>| {
        let xs: Vec<f64> = records
            .iter()
            .filter(|r| r.n == n && r.m == m && r.method == method && !r.censored)
            .filter_map(f)
            .collect();
        (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
    };
    let time = |r: &BenchRecord| Some(r.wall_time);
    let memory = |r: &BenchRecord| r.logical_memory.map(|b| b as f64);
    keys.into_iter()
        .map(|(n, m, method)| {
            let ratio = |f: &dyn Fn(&BenchRecord) -> Option<f64>| {
                Some(mean_of(n, m, method, f)? / mean_of(n, m, baseline, f)?)
            };
            RatioRow {
                method,
                n,
                m,
                time_ratio: ratio(&time),
                memory_ratio: ratio(&memory),
            }
        })
        .collect()
}

pub fn write_ratios<W: Write>(mut w: W, rows: &[RatioRow], baseline: Method) -> io::Result<()> {
    writeln!(w, "method,n,m,time_ratio_vs_{baseline},memory_ratio_vs_{baseline}")?;
    for r in rows {
        let f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        writeln!(w, "{},{},{},{},{}", r.method, r.n, r.m, f(r.time_ratio), f(r.memory_ratio))?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_records_every_cell() {
        let mut grid = BenchGrid::new(vec![40], vec![500, 1000], Method::ALL.to_vec());
        grid.repeats = 2;
        grid.registers = 64;
        grid.accuracy = true;
        let records = run_grid(&grid).unwrap();
        assert_eq!(records.len(), 2 * 2 * Method::ALL.len());
        for r in &records {
            assert!(r.wall_time > 0.0 && !r.censored);
            assert!(r.logical_memory.is_some());
            match r.method {
                Method::Matrix => assert_eq!(r.acc, Some(0.0)),
                Method::MatrixHll => assert_eq!(r.acc, None),
                _ => assert!(r.acc.unwrap() >= 0.0),
            }
        }
        let again = run_grid(&grid).unwrap();
        let accs = |rs: &[BenchRecord]| rs.iter().map(|r| r.acc).collect::<Vec<_>>();
        assert_eq!(accs(&records), accs(&again));
    }

    #[test]
    fn timeout_marks_cell_censored() {
        let mut grid = BenchGrid::new(vec![300], vec![50_000], vec![Method::EgHll]);
        grid.timeout = Some(Duration::from_millis(1));
        let records = run_grid(&grid).unwrap();
        assert!(records[0].censored);
        assert_eq!(records[0].wall_time, 0.001);
        assert!(records[0].logical_memory.is_none());
    }

    #[test]
    fn ratios_against_baseline() {
        let rec = |method, wall_time, mem| BenchRecord {
            method,
            n: 10,
            m: 20,
            n_s: None,
            k: None,
            s: None,
            seed: 0,
            wall_time,
            logical_memory: Some(mem),
            acc: None,
            censored: false,
            peak_rss: None,
        };
        let records = [rec(Method::Matrix, 1.0, 13), rec(Method::Matrix, 3.0, 13), rec(Method::EgHll, 8.0, 26)];
        let rows = ratio_table(&records, Method::Matrix);
        let eg = rows.iter().find(|r| r.method == Method::EgHll).unwrap();
        assert_eq!(eg.time_ratio, Some(4.0));
        assert_eq!(eg.memory_ratio, Some(2.0));
        let mut out = Vec::new();
        write_ratios(&mut out, &rows, Method::Matrix).unwrap();
        assert!(String::from_utf8(out).unwrap().starts_with("method,n,m,time_ratio_vs_matrix"));
    }

    #[test]
    fn empty_grid_is_a_usage_error() {
        let grid = BenchGrid::new(vec![], vec![10], vec![Method::Matrix]);
        assert_eq!(run_grid(&grid).unwrap_err().exit_code(), 2);
    }
}
