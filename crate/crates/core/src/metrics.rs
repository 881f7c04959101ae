//! Out-component size distributions and the Earth-Mover accuracy metric.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// One out-component size per node, indexed by node id.
///
/// Exact methods store integers; sketched methods store real-valued
/// estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeDistribution {
    values: Vec<f64>,
}

impl SizeDistribution {
    pub fn from_counts(counts: impl IntoIterator<Item = usize>) -> Self {
        SizeDistribution {
            values: counts.into_iter().map(|c| c as f64).collect(),
        }
    }

    pub fn from_estimates(values: Vec<f64>) -> Self {
        SizeDistribution { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, node: usize) -> f64 {
        self.values[node]
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NAN, f64::max)
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Writes `node,size` CSV with a header row.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W, value_column: &str) -> std::io::Result<()> {
        writeln!(w, "node,{value_column}")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{i},{v}")?;
        }
        w.flush()
    }

    /// Reads the CSV written by [`write_csv`](Self::write_csv). Rows may
    /// appear in any order but must cover `0..n` exactly once.
    pub fn read_csv<R: std::io::BufRead>(r: R) -> Result<Self> {
        let mut rows: Vec<(usize, f64)> = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let body = line.trim();
            if body.is_empty() || body.starts_with('#') || (idx == 0 && body.starts_with("node")) {
                continue;
            }
            let parse_err = || Error::Parse {
                line: idx + 1,
                msg: format!("expected `node,size`, got {body:?}"),
            };
            let (a, b) = body.split_once(',').ok_or_else(parse_err)?;
            let node = a.trim().parse().map_err(|_| parse_err())?;
            let size = b.trim().parse().map_err(|_| parse_err())?;
            rows.push((node, size));
        }
        let n = rows.len();
        let mut values = vec![f64::NAN; n];
        for (node, size) in rows {
            if node >= n || !values[node].is_nan() {
                return Err(Error::Format(format!("node {node} missing or duplicated")));
            }
            values[node] = size;
        }
        Ok(SizeDistribution { values })
    }
}

/// 1-D Wasserstein distance between two empirical size distributions.
///
/// For equal sizes this is the mean absolute difference of the sorted
/// samples. Unequal sizes are handled through the L1 distance of the two
/// quantile functions.
pub fn emd(a: &SizeDistribution, b: &SizeDistribution) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let xs = a.sorted();
    let ys = b.sorted();
    if xs.len() == ys.len() {
        let total: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - y).abs()).sum();
        return Ok(total / xs.len() as f64);
    }
    // Walk the merged quantile breakpoints i/|a| and j/|b|.
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut q = 0.0;
    let mut total = 0.0;
    while i < xs.len() && j < ys.len() {
        let next_a = (i + 1) as f64 / na;
        let next_b = (j + 1) as f64 / nb;
        let next = next_a.min(next_b);
        total += (next - q) * (xs[i] - ys[j]).abs();
        q = next;
        if next_a <= next {
            i += 1;
        }
        if next_b <= next {
            j += 1;
        }
    }
    Ok(total)
}

/// Distance between the ground-truth distribution and an estimate; lower is
/// better and zero means identical multisets.
pub fn accuracy(truth: &SizeDistribution, estimate: &SizeDistribution) -> Result<f64> {
    emd(truth, estimate)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub max: f64,
    /// Count of nodes per size, sizes rounded to the nearest integer.
    pub histogram: BTreeMap<u64, usize>,
}

pub fn summarize(d: &SizeDistribution) -> Result<Summary> {
    if d.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let mut histogram = BTreeMap::new();
    for &v in d.values() {
        *histogram.entry(v.round().max(0.0) as u64).or_insert(0) += 1;
    }
    Ok(Summary {
        n: d.len(),
        mean: d.mean(),
        max: d.max(),
        histogram,
    })
}

/// Differences between matching quantiles (`estimate - truth`) at the given
/// probability levels.
pub fn quantile_deltas(truth: &SizeDistribution, estimate: &SizeDistribution, levels: &[f64]) -> Result<Vec<(f64, f64)>> {
    if truth.is_empty() || estimate.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let a = truth.sorted();
    let b = estimate.sorted();
    let pick = |v: &[f64], q: f64| {
        let idx = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1;
        v[idx]
    };
    Ok(levels.iter().map(|&q| (q, pick(&b, q) - pick(&a, q))).collect())
}
