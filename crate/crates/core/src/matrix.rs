//! Streaming component matrix.
//!
//! Every node starts out knowing only itself (identity matrix). Each event
//! `(u, v)` replaces rows `u` and `v` by their bitwise OR. After a forward
//! pass, row `i` is the in-component of `i` and column `j` the maximum
//! out-component of `j`. Running the same pass over the reversed event
//! sequence swaps the roles, so rows then hold out-components directly.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::bits::{iter_ones, popcount, words_for, NodeSet};
use crate::error::{Error, Result};
use crate::metrics::SizeDistribution;
use crate::network::{Event, NodeId, TemporalNetwork, TimeDirection};

/// Which relation the rows of a component matrix hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Built from chronological events: rows are in-components.
    Forward,
    /// Built from reverse-chronological events: rows are out-components.
    Reversed,
}

/// Dense `n x n` bit matrix with packed 64-bit rows.
#[derive(Clone, PartialEq, Eq)]
pub struct ComponentMatrix {
    n: usize,
    stride: usize,
    words: Vec<u64>,
    orientation: Orientation,
}

impl ComponentMatrix {
    pub fn identity(n: usize, orientation: Orientation) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("component matrix needs at least one node".into()));
        }
        let stride = words_for(n);
        let mut words = vec![0u64; n * stride];
        for i in 0..n {
            words[i * stride + i / 64] |= 1 << (i % 64);
        }
        Ok(ComponentMatrix {
            n,
            stride,
            words,
            orientation,
        })
    }

    /// Identity matrix in forward orientation.
    pub fn init(n: usize) -> Result<Self> {
        Self::identity(n, Orientation::Forward)
    }

    /// Processes every event of `net` in stored order. A forward network
    /// yields a forward matrix, a reversed one a reversed matrix.
    pub fn run(net: &TemporalNetwork) -> Result<Self> {
        let orientation = match net.direction() {
            TimeDirection::Forward => Orientation::Forward,
            TimeDirection::Reversed => Orientation::Reversed,
        };
        let mut s = Self::identity(net.n(), orientation)?;
        for e in net.events() {
            s.or_rows(e.u as usize, e.v as usize);
        }
        Ok(s)
    }

    /// Same pass over the events from last to first: rows become
    /// out-components.
    pub fn run_reversed(net: &TemporalNetwork) -> Result<Self> {
        let orientation = match net.direction() {
            TimeDirection::Forward => Orientation::Reversed,
            TimeDirection::Reversed => Orientation::Forward,
        };
        let mut s = Self::identity(net.n(), orientation)?;
        for e in net.events().iter().rev() {
            s.or_rows(e.u as usize, e.v as usize);
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Streams one more event into the matrix.
    pub fn apply_event(&mut self, e: &Event) -> Result<()> {
        for id in [e.u, e.v] {
            if id as usize >= self.n {
                return Err(Error::NodeOutOfRange {
                    node: id as u64,
                    n: self.n,
                });
            }
        }
        self.or_rows(e.u as usize, e.v as usize);
        Ok(())
    }

    /// Appends a fresh node whose row and column hold only the diagonal bit.
    pub fn add_node(&mut self) -> NodeId {
        let new_n = self.n + 1;
        let new_stride = words_for(new_n);
        if new_stride != self.stride {
            let mut words = vec![0u64; new_n * new_stride];
            for i in 0..self.n {
                words[i * new_stride..i * new_stride + self.stride].copy_from_slice(self.row_words(i));
            }
            self.words = words;
            self.stride = new_stride;
        } else {
            self.words.resize(new_n * self.stride, 0);
        }
        let i = self.n;
        self.words[i * self.stride + i / 64] |= 1 << (i % 64);
        self.n = new_n;
        i as NodeId
    }

    #[inline]
    fn or_rows(&mut self, u: usize, v: usize) {
        if u == v {
            return;
        }
        let stride = self.stride;
        let (lo, hi) = if u < v { (u, v) } else { (v, u) };
        let (head, tail) = self.words.split_at_mut(hi * stride);
        let a = &mut head[lo * stride..(lo + 1) * stride];
        let b = &mut tail[..stride];
        for (x, y) in a.iter_mut().zip(b.iter_mut()) {
            let r = *x | *y;
            *x = r;
            *y = r;
        }
    }

    #[inline]
    fn row_words(&self, i: usize) -> &[u64] {
        &self.words[i * self.stride..(i + 1) * self.stride]
    }

    /// Entry `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.row_words(row)[col / 64] & (1 << (col % 64)) != 0
    }

    pub fn row(&self, i: usize) -> NodeSet {
        NodeSet::from_words(self.n, self.row_words(i).to_vec())
    }

    pub fn column(&self, j: usize) -> NodeSet {
        let mut s = NodeSet::empty(self.n);
        for i in 0..self.n {
            if self.get(i, j) {
                s.insert(i);
            }
        }
        s
    }

    fn check(&self, u: usize) -> Result<()> {
        if u >= self.n {
            return Err(Error::NodeOutOfRange {
                node: u as u64,
                n: self.n,
            });
        }
        Ok(())
    }

    /// Nodes reachable from `u` (its maximum out-component).
    pub fn out_component(&self, u: usize) -> Result<NodeSet> {
        self.check(u)?;
        Ok(match self.orientation {
            Orientation::Forward => self.column(u),
            Orientation::Reversed => self.row(u),
        })
    }

    /// Nodes that can reach `u`.
    pub fn in_component(&self, u: usize) -> Result<NodeSet> {
        self.check(u)?;
        Ok(match self.orientation {
            Orientation::Forward => self.row(u),
            Orientation::Reversed => self.column(u),
        })
    }

    /// All columns at once, in `O(ones)` instead of `n` column scans.
    pub fn columns(&self) -> Vec<NodeSet> {
        let mut cols = vec![NodeSet::empty(self.n); self.n];
        for i in 0..self.n {
            for j in iter_ones(self.row_words(i)) {
                cols[j].insert(i);
            }
        }
        cols
    }

    /// All out-components, indexed by source node.
    pub fn out_components(&self) -> Vec<NodeSet> {
        match self.orientation {
            Orientation::Forward => self.columns(),
            Orientation::Reversed => (0..self.n).map(|i| self.row(i)).collect(),
        }
    }

    pub fn row_popcounts(&self) -> Vec<usize> {
        (0..self.n).map(|i| popcount(self.row_words(i))).collect()
    }

    pub fn column_popcounts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n];
        for i in 0..self.n {
            for j in iter_ones(self.row_words(i)) {
                counts[j] += 1;
            }
        }
        counts
    }

    pub fn total_ones(&self) -> usize {
        popcount(&self.words)
    }

    /// `|OC(u)|` for every node.
    pub fn size_distribution(&self) -> SizeDistribution {
        let sizes = match self.orientation {
            Orientation::Forward => self.column_popcounts(),
            Orientation::Reversed => self.row_popcounts(),
        };
        SizeDistribution::from_counts(sizes)
    }

    /// Mean component size: total number of ones over `n`. Rows and columns
    /// sum to the same total, so this is both the mean in-component and the
    /// mean out-component size.
    pub fn average_component_size(&self) -> f64 {
        self.total_ones() as f64 / self.n as f64
    }

    /// Bytes needed for the bits alone, `ceil(n^2 / 8)`.
    pub fn logical_bytes(&self) -> u64 {
        dense_matrix_bytes(self.n)
    }

    /// Row-major dump: `n` as little-endian u64, then `n` rows of
    /// `ceil(n / 8)` bytes each, bit `j` of a row at byte `j / 8`, bit
    /// `j % 8` (least significant first).
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(&(self.n as u64).to_le_bytes())?;
        let row_bytes = self.n.div_ceil(8);
        let mut buf = Vec::with_capacity(self.stride * 8);
        for i in 0..self.n {
            buf.clear();
            for word in self.row_words(i) {
                buf.extend_from_slice(&word.to_le_bytes());
            }
            w.write_all(&buf[..row_bytes])?;
        }
        w.flush()
    }

    /// Reads a dump written by [`write_to`](Self::write_to). The format does
    /// not record orientation, so the caller supplies it.
    pub fn read_from<R: Read>(mut r: R, orientation: Orientation) -> Result<Self> {
        let mut header = [0u8; 8];
        r.read_exact(&mut header)?;
        let n = u64::from_le_bytes(header) as usize;
        let mut s = Self::identity(n, orientation)?;
        let row_bytes = n.div_ceil(8);
        let mut buf = vec![0u8; s.stride * 8];
        for i in 0..n {
            buf.fill(0);
            r.read_exact(&mut buf[..row_bytes])?;
            for (k, chunk) in buf.chunks_exact(8).enumerate() {
                s.words[i * s.stride + k] = u64::from_le_bytes(chunk.try_into().unwrap());
            }
        }
        let tail = n % 64;
        if tail != 0 {
            let mask = (1u64 << tail) - 1;
            if (0..n).any(|i| s.words[i * s.stride + s.stride - 1] & !mask != 0) {
                return Err(Error::Format("bits set beyond column n".into()));
            }
        }
        Ok(s)
    }
}

impl std::fmt::Debug for ComponentMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComponentMatrix(n={}, {:?})", self.n, self.orientation)?;
        for i in 0..self.n.min(64) {
            let line: String = (0..self.n.min(64)).map(|j| if self.get(i, j) { '1' } else { '.' }).collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

pub fn dense_matrix_bytes(n: usize) -> u64 {
    ((n as u64) * (n as u64)).div_ceil(8)
}
