//! Synthetic temporal networks: an Erdős–Rényi skeleton whose links fire as
//! independent equal-rate Poisson processes.
//!
//! Instead of running the processes and truncating, we condition on exactly
//! `m` events: each event picks a uniformly random skeleton edge and a
//! uniformly random time in `[0, T)`. Conditioned on the total count, a
//! superposition of equal-rate Poisson processes has exactly this law.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::network::{Event, NodeId, TemporalNetwork};

const MAX_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub n: usize,
    pub m: usize,
    /// Wiring probability of the skeleton.
    pub p: f64,
    pub seed: u64,
    /// Length of the observation window; `None` means `m`.
    pub time_horizon: Option<f64>,
}

impl GeneratorConfig {
    /// Defaults to `p = 2 / n`, which puts the skeleton above the giant
    /// component threshold.
    pub fn new(n: usize, m: usize, seed: u64) -> Self {
        GeneratorConfig {
            n,
            m,
            p: 2.0 / n.max(1) as f64,
            seed,
            time_horizon: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!("generator needs n >= 2, got {}", self.n)));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::InvalidParameter(format!("wiring probability must be in (0, 1], got {}", self.p)));
        }
        if let Some(t) = self.time_horizon {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidParameter(format!("time horizon must be positive, got {t}")));
            }
        }
        if self.n > NodeId::MAX as usize {
            return Err(Error::InvalidParameter(format!("n = {} exceeds node-id range", self.n)));
        }
        Ok(())
    }
}

/// Samples the edges of `G(n, p)` by geometric skipping over the
/// `n (n - 1) / 2` candidate pairs.
pub fn erdos_renyi_edges<R: Rng>(n: usize, p: f64, rng: &mut R) -> Vec<(NodeId, NodeId)> {
    let mut edges = Vec::new();
    if n < 2 {
        return edges;
    }
    if p >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                edges.push((w as NodeId, v as NodeId));
            }
        }
        return edges;
    }
    let log_q = (1.0 - p).ln();
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.random();
        let skip = ((1.0 - r).ln() / log_q).floor();
        if !skip.is_finite() || skip > (n * n) as f64 {
            break;
        }
        w += 1 + skip as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as NodeId, v as NodeId));
        }
    }
    edges
}

/// Draws a temporal network. Deterministic given the config.
pub fn generate(cfg: &GeneratorConfig) -> Result<TemporalNetwork> {
    Ok(generate_with_skeleton(cfg)?.0)
}

/// Like [`generate`], also returning the sampled skeleton edges.
pub fn generate_with_skeleton(cfg: &GeneratorConfig) -> Result<(TemporalNetwork, Vec<(NodeId, NodeId)>)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut edges = Vec::new();
    for _ in 0..MAX_ATTEMPTS {
        edges = erdos_renyi_edges(cfg.n, cfg.p, &mut rng);
        if !edges.is_empty() {
            break;
        }
    }
    if edges.is_empty() {
        return Err(Error::EdgelessGraph { attempts: MAX_ATTEMPTS });
    }
    let horizon = cfg.time_horizon.unwrap_or(cfg.m.max(1) as f64);
    let mut events: Vec<Event> = (0..cfg.m)
        .map(|_| {
            let (u, v) = edges[rng.random_range(0..edges.len())];
            let t = rng.random::<f64>() * horizon;
            Event::new(u, v, t)
        })
        .collect();
    events.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok((TemporalNetwork::new(cfg.n, events)?, edges))
}
