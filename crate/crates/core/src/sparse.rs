//! Sparse variant of the component matrix: each row is a sorted list of
//! node ids. Worth it when the mean component size is far below `n`.

use crate::error::{Error, Result};
use crate::matrix::Orientation;
use crate::metrics::SizeDistribution;
use crate::network::{Event, NodeId, TemporalNetwork, TimeDirection};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseComponentMatrix {
    rows: Vec<Vec<NodeId>>,
    orientation: Orientation,
    scratch: Vec<NodeId>,
}

impl SparseComponentMatrix {
    pub fn identity(n: usize, orientation: Orientation) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("component matrix needs at least one node".into()));
        }
        Ok(SparseComponentMatrix {
            rows: (0..n as NodeId).map(|i| vec![i]).collect(),
            orientation,
            scratch: Vec::new(),
        })
    }

    pub fn run(net: &TemporalNetwork) -> Result<Self> {
        let orientation = match net.direction() {
            TimeDirection::Forward => Orientation::Forward,
            TimeDirection::Reversed => Orientation::Reversed,
        };
        let mut s = Self::identity(net.n(), orientation)?;
        for e in net.events() {
            s.union_rows(e.u as usize, e.v as usize);
        }
        Ok(s)
    }

    pub fn run_reversed(net: &TemporalNetwork) -> Result<Self> {
        let orientation = match net.direction() {
            TimeDirection::Forward => Orientation::Reversed,
            TimeDirection::Reversed => Orientation::Forward,
        };
        let mut s = Self::identity(net.n(), orientation)?;
        for e in net.events().iter().rev() {
            s.union_rows(e.u as usize, e.v as usize);
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn apply_event(&mut self, e: &Event) -> Result<()> {
        for id in [e.u, e.v] {
            if id as usize >= self.n() {
                return Err(Error::NodeOutOfRange {
                    node: id as u64,
                    n: self.n(),
                });
            }
        }
        self.union_rows(e.u as usize, e.v as usize);
        Ok(())
    }

    pub fn add_node(&mut self) -> NodeId {
        let id = self.rows.len() as NodeId;
        self.rows.push(vec![id]);
        id
    }

    fn union_rows(&mut self, u: usize, v: usize) {
        if u == v || self.rows[u] == self.rows[v] {
            return;
        }
        let (a, b) = (&self.rows[u], &self.rows[v]);
        let out = &mut self.scratch;
        out.clear();
        out.reserve(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        self.rows[u].clone_from(out);
        self.rows[v].clone_from(out);
    }

    pub fn row(&self, i: usize) -> &[NodeId] {
        &self.rows[i]
    }

    /// Sorted members of the out-component of `u`.
    pub fn out_component(&self, u: usize) -> Result<Vec<NodeId>> {
        if u >= self.n() {
            return Err(Error::NodeOutOfRange {
                node: u as u64,
                n: self.n(),
            });
        }
        Ok(match self.orientation {
            Orientation::Reversed => self.rows[u].clone(),
            Orientation::Forward => (0..self.n())
                .filter(|&w| self.rows[w].binary_search(&(u as NodeId)).is_ok())
                .map(|w| w as NodeId)
                .collect(),
        })
    }

    pub fn size_distribution(&self) -> SizeDistribution {
        match self.orientation {
            Orientation::Reversed => SizeDistribution::from_counts(self.rows.iter().map(Vec::len)),
            Orientation::Forward => {
                let mut counts = vec![0usize; self.n()];
                for row in &self.rows {
                    for &x in row {
                        counts[x as usize] += 1;
                    }
                }
                SizeDistribution::from_counts(counts)
            }
        }
    }

    pub fn total_ones(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Four bytes per stored entry.
    pub fn logical_bytes(&self) -> u64 {
        4 * self.total_ones() as u64
    }
}
