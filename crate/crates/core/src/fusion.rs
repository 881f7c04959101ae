//! Network compression onto super-nodes and fusion of the per-hash
//! out-components.
//!
//! Each hash function relabels every event `(u, v, t)` as
//! `(h(u), h(v), t)`. The exact component matrix of the small hashed network
//! gives super-node out-components, which are pulled back to original nodes
//! through the preimages of `h`. Any time-respecting path of the original
//! network maps to one of the hashed network, so each pulled-back set
//! contains the true out-component; intersecting over `K` independent hashes
//! tightens the estimate while keeping that guarantee.

use rayon::prelude::*;

use crate::bits::NodeSet;
use crate::error::{Error, Result};
use crate::hashing::{HashFamily, SuperNodeMap};
use crate::matrix::{dense_matrix_bytes, ComponentMatrix};
use crate::metrics::SizeDistribution;
use crate::network::{Event, NodeId, TemporalNetwork, TimeDirection};

/// A temporal network relabeled onto super-nodes, with the preimage of each
/// super-node over the original ids.
#[derive(Debug, Clone)]
pub struct HashedNetwork {
    network: TemporalNetwork,
    assignment: Vec<NodeId>,
    preimages: Vec<NodeSet>,
}

/// Maps every event through `h`. Event count, order and timestamps are
/// preserved.
pub fn compress<M: SuperNodeMap + ?Sized>(net: &TemporalNetwork, h: &M) -> Result<HashedNetwork> {
    let n_super = h.n_super();
    if n_super == 0 || n_super > NodeId::MAX as usize {
        return Err(Error::InvalidParameter(format!("n_super = {n_super} out of range")));
    }
    let assignment: Vec<NodeId> = (0..net.n() as u64).map(|u| h.super_node(u) as NodeId).collect();
    let mut preimages = vec![NodeSet::empty(net.n()); n_super];
    for (u, &x) in assignment.iter().enumerate() {
        preimages[x as usize].insert(u);
    }
    let relabel = |e: &Event| Event::new(assignment[e.u as usize], assignment[e.v as usize], e.t);
    let network = match net.direction() {
        TimeDirection::Forward => TemporalNetwork::new(n_super, net.events().iter().map(relabel).collect())?,
        TimeDirection::Reversed => TemporalNetwork::new(n_super, net.events().iter().rev().map(relabel).collect())?.reverse(),
    };
    Ok(HashedNetwork {
        network,
        assignment,
        preimages,
    })
}

impl HashedNetwork {
    /// The super-event stream; contains no original ids.
    pub fn network(&self) -> &TemporalNetwork {
        &self.network
    }

    pub fn n_super(&self) -> usize {
        self.preimages.len()
    }

    pub fn original_n(&self) -> usize {
        self.assignment.len()
    }

    pub fn super_node_of(&self, u: usize) -> usize {
        self.assignment[u] as usize
    }

    pub fn preimage(&self, super_node: usize) -> &NodeSet {
        &self.preimages[super_node]
    }

    /// Union of the preimages of the given super-nodes.
    pub fn expand_out_component<I: IntoIterator<Item = usize>>(&self, super_nodes: I) -> Result<NodeSet> {
        let mut out = NodeSet::empty(self.original_n());
        for x in super_nodes {
            let pre = self.preimages.get(x).ok_or(Error::NodeOutOfRange {
                node: x as u64,
                n: self.n_super(),
            })?;
            out.union_with(pre);
        }
        Ok(out)
    }

    /// Out-component of every super-node pulled back to original nodes,
    /// indexed by super-node.
    fn expanded_components(&self, reversed_pass: bool) -> Result<Vec<NodeSet>> {
        let matrix = if reversed_pass {
            ComponentMatrix::run_reversed(&self.network)?
        } else {
            ComponentMatrix::run(&self.network)?
        };
        matrix
            .out_components()
            .iter()
            .map(|oc| self.expand_out_component(oc.iter()))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FusionOptions {
    /// Run the `K` hash pipelines on the rayon pool.
    pub parallel: bool,
    /// Read super-node out-components from rows of a reversed-pass matrix
    /// instead of columns of the forward matrix. Results are identical.
    pub reversed_pass: bool,
}

/// Estimated out-component of every node.
#[derive(Debug, Clone, PartialEq)]
pub struct FusedEstimate {
    components: Vec<NodeSet>,
    hashes: usize,
}

impl FusedEstimate {
    pub fn component(&self, u: usize) -> &NodeSet {
        &self.components[u]
    }

    pub fn components(&self) -> &[NodeSet] {
        &self.components
    }

    pub fn hash_count(&self) -> usize {
        self.hashes
    }

    pub fn size_distribution(&self) -> SizeDistribution {
        fused_size_distribution(self)
    }

    /// Bit-vector dump in the component-matrix format, row `u` = estimated
    /// out-component of `u`.
    pub fn write_to<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        let n = self.components.len();
        w.write_all(&(n as u64).to_le_bytes())?;
        let row_bytes = n.div_ceil(8);
        let mut buf = Vec::new();
        for c in &self.components {
            buf.clear();
            for word in c.words() {
                buf.extend_from_slice(&word.to_le_bytes());
            }
            w.write_all(&buf[..row_bytes])?;
        }
        w.flush()
    }
}

pub fn fused_size_distribution(fe: &FusedEstimate) -> SizeDistribution {
    SizeDistribution::from_counts(fe.components.iter().map(NodeSet::count))
}

/// Fuses out-components over the given super-node maps.
pub fn fuse_with_maps<M: SuperNodeMap>(net: &TemporalNetwork, maps: &[M], opts: FusionOptions) -> Result<FusedEstimate> {
    if maps.is_empty() {
        return Err(Error::InvalidParameter("fusion needs at least one hash function".into()));
    }
    let n = net.n();
    let pipeline = |h: &M| -> Result<(Vec<NodeId>, Vec<NodeSet>)> {
        let hashed = compress(net, h)?;
        let expanded = hashed.expanded_components(opts.reversed_pass)?;
        Ok((hashed.assignment, expanded))
    };

    if opts.parallel {
        let results: Vec<_> = maps.par_iter().map(pipeline).collect::<Result<_>>()?;
        let components = (0..n)
            .into_par_iter()
            .map(|u| {
                let mut acc = NodeSet::full(n);
                for (assignment, expanded) in &results {
                    acc.intersect_with(&expanded[assignment[u] as usize]);
                }
                acc
            })
            .collect();
        return Ok(FusedEstimate {
            components,
            hashes: maps.len(),
        });
    }

    let mut components = vec![NodeSet::full(n); n];
    for h in maps {
        let (assignment, expanded) = pipeline(h)?;
        for (u, c) in components.iter_mut().enumerate() {
            c.intersect_with(&expanded[assignment[u] as usize]);
        }
    }
    Ok(FusedEstimate {
        components,
        hashes: maps.len(),
    })
}

/// Draws `hashes` functions from `family` and fuses their estimates.
pub fn fused_out_components(net: &TemporalNetwork, family: &HashFamily, hashes: usize, opts: FusionOptions) -> Result<FusedEstimate> {
    if hashes == 0 {
        return Err(Error::InvalidParameter("K must be at least 1".into()));
    }
    let maps = family.members(hashes)?;
    fuse_with_maps(net, &maps, opts)
}

/// Logical memory of the hashing framework: `K` super-node matrices plus
/// `K` preimage tables of `n_super` bit-vectors over `n` nodes.
pub fn hashed_logical_bytes(n: usize, n_super: usize, hashes: usize) -> u64 {
    let k = hashes as u64;
    k * dense_matrix_bytes(n_super) + k * n_super as u64 * n.div_ceil(8) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{generate, GeneratorConfig};
    use crate::hashing::{HashFunction, TableMap};
    use crate::metrics::accuracy;
    use crate::oracle::all_out_components_oracle;

    fn family(seed: u64, n_super: usize) -> HashFamily {
        HashFamily::new(seed, n_super)
    }

    #[test]
    fn single_super_node_collapses_everything() {
        let net = generate(&GeneratorConfig::new(30, 200, 1)).unwrap();
        let h = HashFunction::new(0, 1, 4).unwrap();
        let hashed = compress(&net, &h).unwrap();
        assert!(hashed.network().events().iter().all(|e| e.u == 0 && e.v == 0));
        assert_eq!(hashed.network().m(), net.m());
        let fe = fused_out_components(&net, &family(3, 1), 1, FusionOptions::default()).unwrap();
        assert!(fe.components().iter().all(|c| c.count() == 30));
    }

    #[test]
    fn preimages_partition_nodes() {
        let net = generate(&GeneratorConfig::new(200, 1000, 2)).unwrap();
        let h = HashFunction::new(5, 17, 4).unwrap();
        let hashed = compress(&net, &h).unwrap();
        let mut seen = NodeSet::empty(200);
        let mut total = 0;
        for x in 0..hashed.n_super() {
            let pre = hashed.preimage(x);
            let mut overlap = pre.clone();
            overlap.intersect_with(&seen);
            assert!(overlap.is_empty());
            seen.union_with(pre);
            total += pre.count();
        }
        assert_eq!(seen, NodeSet::full(200));
        assert_eq!(total, 200);
        // Timestamps and order survive compression.
        for (a, b) in net.events().iter().zip(hashed.network().events()) {
            assert_eq!(a.t, b.t);
            assert_eq!(b.u as usize, h.hash(a.u as u64));
        }
    }

    #[test]
    fn expansion_examples() {
        let net = generate(&GeneratorConfig::new(50, 300, 3)).unwrap();
        let h = HashFunction::new(8, 7, 4).unwrap();
        let hashed = compress(&net, &h).unwrap();
        assert_eq!(hashed.expand_out_component(0..7).unwrap(), NodeSet::full(50));
        for u in 0..50 {
            assert!(hashed.expand_out_component([h.hash(u as u64)]).unwrap().contains(u));
        }
        let pick = [0usize, 3, 4];
        let expected: usize = pick.iter().map(|&x| hashed.preimage(x).count()).sum();
        assert_eq!(hashed.expand_out_component(pick).unwrap().count(), expected);
        assert!(hashed.expand_out_component([7]).is_err());
    }

    #[test]
    fn injective_relabeling_is_isomorphic() {
        let net = generate(&GeneratorConfig::new(40, 400, 4)).unwrap();
        let perm: Vec<usize> = (0..40).map(|u| (u * 17 + 3) % 40).collect();
        let map = TableMap::new(40, perm.clone()).unwrap();
        let fe = fuse_with_maps(&net, &[map], FusionOptions::default()).unwrap();
        let truth = all_out_components_oracle(&net);
        assert_eq!(fe.components(), &truth[..]);
        assert_eq!(accuracy(&SizeDistribution::from_counts(truth.iter().map(NodeSet::count)), &fe.size_distribution()).unwrap(), 0.0);
    }

    #[test]
    fn superset_and_monotone_in_k() {
        for seed in 0..8u64 {
            let n = 60 + 20 * seed as usize;
            let net = generate(&GeneratorConfig::new(n, 20 * n, seed)).unwrap();
            let truth = all_out_components_oracle(&net);
            let fam = family(seed + 100, crate::hashing::default_super_nodes(n));
            let mut prev: Option<FusedEstimate> = None;
            for k in 1..=5 {
                let fe = fused_out_components(&net, &fam, k, FusionOptions::default()).unwrap();
                for u in 0..n {
                    assert!(truth[u].is_subset(fe.component(u)), "seed {seed} k {k} node {u}");
                    assert!(fe.component(u).contains(u));
                    if let Some(p) = &prev {
                        assert!(fe.component(u).is_subset(p.component(u)));
                    }
                }
                prev = Some(fe);
            }
        }
    }

    #[test]
    fn parallel_and_reversed_variants_agree() {
        let net = generate(&GeneratorConfig::new(150, 3000, 6)).unwrap();
        let fam = family(1, 45);
        let base = fused_out_components(&net, &fam, 5, FusionOptions::default()).unwrap();
        for opts in [
            FusionOptions { parallel: true, reversed_pass: false },
            FusionOptions { parallel: false, reversed_pass: true },
            FusionOptions { parallel: true, reversed_pass: true },
        ] {
            assert_eq!(fused_out_components(&net, &fam, 5, opts).unwrap(), base, "{opts:?}");
        }
    }

    #[test]
    fn permutation_equivariance() {
        struct Composed<'a> {
            inner: &'a HashFunction,
            inverse: &'a [usize],
        }
        impl SuperNodeMap for Composed<'_> {
            fn n_super(&self) -> usize {
                self.inner.n_super()
            }
            fn super_node(&self, node: u64) -> usize {
                self.inner.hash(self.inverse[node as usize] as u64)
            }
        }

        let n = 80;
        let net = generate(&GeneratorConfig::new(n, 1500, 12)).unwrap();
        let perm: Vec<usize> = (0..n).map(|u| (u * 31 + 7) % n).collect();
        let mut inverse = vec![0; n];
        for (u, &p) in perm.iter().enumerate() {
            inverse[p] = u;
        }
        let relabeled = TemporalNetwork::new(
            n,
            net.events().iter().map(|e| Event::new(perm[e.u as usize] as u32, perm[e.v as usize] as u32, e.t)).collect(),
        )
        .unwrap();
        let hashes = family(4, 24).members(3).unwrap();
        let composed: Vec<_> = hashes.iter().map(|h| Composed { inner: h, inverse: &inverse }).collect();

        let fe = fuse_with_maps(&net, &hashes, FusionOptions::default()).unwrap();
        let fe_rel = fuse_with_maps(&relabeled, &composed, FusionOptions::default()).unwrap();
        for u in 0..n {
            let mapped = NodeSet::from_nodes(n, fe.component(u).iter().map(|w| perm[w]));
            assert_eq!(fe_rel.component(perm[u]), &mapped);
        }
    }

    #[test]
    fn exact_when_hashes_are_injective_on_nodes() {
        let n = 50;
        let net = generate(&GeneratorConfig::new(n, 600, 21)).unwrap();
        let truth = all_out_components_oracle(&net);
        // With 5000 super-nodes most members are collision-free on 50 ids; skip any
        // member that still collides.
        let injective: Vec<HashFunction> = family(77, 5000)
            .members(6)
            .unwrap()
            .into_iter()
            .filter(|h| {
                let mut seen = std::collections::HashSet::new();
                (0..n as u64).all(|u| seen.insert(h.hash(u)))
            })
            .collect();
        assert!(!injective.is_empty());
        let fe = fuse_with_maps(&net, &injective, FusionOptions::default()).unwrap();
        assert_eq!(fe.components(), &truth[..]);
    }

    #[test]
    fn dump_layout() {
        let net = TemporalNetwork::new(3, vec![Event::new(0, 1, 1.0), Event::new(1, 2, 2.0)]).unwrap();
        let map = TableMap::new(3, vec![0, 1, 2]).unwrap();
        let fe = fuse_with_maps(&net, &[map], FusionOptions::default()).unwrap();
        let mut buf = Vec::new();
        fe.write_to(&mut buf).unwrap();
        assert_eq!(buf, [3, 0, 0, 0, 0, 0, 0, 0, 0b111, 0b111, 0b110]);
    }

    #[test]
    fn memory_formula() {
        // K * n_s^2 / 8 + K * n_s * ceil(n / 8)
        assert_eq!(hashed_logical_bytes(1000, 300, 5), 5 * 11_250 + 5 * 300 * 125);
        assert_eq!(hashed_logical_bytes(10, 3, 1), 2 + 3 * 2);
    }

    #[test]
    fn rejects_empty_families() {
        let net = TemporalNetwork::empty(3);
        assert!(fused_out_components(&net, &family(0, 2), 0, FusionOptions::default()).is_err());
        assert!(fuse_with_maps::<HashFunction>(&net, &[], FusionOptions::default()).is_err());
    }
}
