//! Event-graph baseline.
//!
//! Events become vertices of a static DAG; an edge links an event to a
//! strictly later event sharing a node, within an optional waiting window.
//! Only the reduced form is built: each event links, per endpoint, to the
//! next strictly-later events on that endpoint (all of them if several share
//! the next timestamp). Every longer hop on the same node is a path through
//! those links, so the set of reachable events is unchanged.
//!
//! Out-component sizes are estimated with one HyperLogLog sketch per event,
//! swept in reverse chronological order.

use crate::bits::NodeSet;
use crate::error::{Error, Result};
use crate::metrics::SizeDistribution;
use crate::network::{TemporalNetwork, TimeDirection};
use crate::sketch::CardinalitySketch;

#[derive(Debug, Clone)]
pub struct EventGraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
    delta_t: Option<f64>,
}

impl EventGraph {
    /// Builds the reduced event graph of a chronological network.
    pub fn build(net: &TemporalNetwork, delta_t: Option<f64>) -> Result<Self> {
        if net.direction() != TimeDirection::Forward {
            return Err(Error::InvalidParameter("event graph needs chronological events".into()));
        }
        if let Some(w) = delta_t {
            if w.is_nan() || w < 0.0 {
                return Err(Error::InvalidParameter(format!("delta_t must be non-negative, got {w}")));
            }
        }
        let events = net.events();
        let incidence = incidence_lists(net);
        let mut offsets = Vec::with_capacity(events.len() + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        let mut cursor = vec![0usize; net.n()];
        let mut scratch: Vec<u32> = Vec::new();
        offsets.push(0);
        for (idx, e) in events.iter().enumerate() {
            scratch.clear();
            for w in endpoints(e.u, e.v) {
                let list = &incidence[w as usize];
                let pos = cursor[w as usize];
                debug_assert_eq!(list[pos] as usize, idx);
                cursor[w as usize] += 1;
                let mut k = pos + 1;
                while k < list.len() && events[list[k] as usize].t <= e.t {
                    k += 1;
                }
                let Some(&first) = list.get(k) else { continue };
                let next_t = events[first as usize].t;
                if delta_t.is_some_and(|win| next_t - e.t > win) {
                    continue;
                }
                while k < list.len() && events[list[k] as usize].t == next_t {
                    scratch.push(list[k]);
                    k += 1;
                }
            }
            scratch.sort_unstable();
            scratch.dedup();
            for &f in &scratch {
                targets.push(f);
                weights.push(events[f as usize].t - e.t);
            }
            offsets.push(targets.len());
        }
        Ok(EventGraph {
            offsets,
            targets,
            weights,
            delta_t,
        })
    }

    /// Number of vertices (events).
    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of edges, `eta`.
    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn delta_t(&self) -> Option<f64> {
        self.delta_t
    }

    pub fn successors(&self, event: usize) -> &[u32] {
        &self.targets[self.offsets[event]..self.offsets[event + 1]]
    }

    /// Inter-event times of the edges leaving `event`.
    pub fn weights(&self, event: usize) -> &[f64] {
        &self.weights[self.offsets[event]..self.offsets[event + 1]]
    }

    /// Exact set of temporal-network nodes reachable from `event`, by
    /// depth-first search.
    pub fn reachable_nodes(&self, net: &TemporalNetwork, event: usize) -> NodeSet {
        let mut seen = vec![false; self.vertex_count()];
        let mut out = NodeSet::empty(net.n());
        let mut stack = vec![event];
        seen[event] = true;
        while let Some(x) = stack.pop() {
            let e = net.events()[x];
            out.insert(e.u as usize);
            out.insert(e.v as usize);
            for &f in self.successors(x) {
                if !std::mem::replace(&mut seen[f as usize], true) {
                    stack.push(f as usize);
                }
            }
        }
        out
    }
}

fn endpoints(u: u32, v: u32) -> impl Iterator<Item = u32> {
    std::iter::once(u).chain((u != v).then_some(v))
}

/// For each node, the indices of its events in stored order.
fn incidence_lists(net: &TemporalNetwork) -> Vec<Vec<u32>> {
    let mut lists = vec![Vec::new(); net.n()];
    for (idx, e) in net.events().iter().enumerate() {
        for w in endpoints(e.u, e.v) {
            lists[w as usize].push(idx as u32);
        }
    }
    lists
}

/// Output of the event-graph sweep.
#[derive(Debug, Clone)]
pub struct EgEstimate {
    pub sizes: SizeDistribution,
    /// Largest number of event sketches alive at once during the sweep.
    pub peak_live_sketches: usize,
}

/// Estimates every node's maximum out-component size.
///
/// Events are swept from last to first; each event's sketch holds its own
/// endpoints merged with the sketches of its successors. A node's maximum
/// out-component is read at its earliest timestamp (merging all of its
/// events at that time). A sketch is freed once all of its predecessors
/// have consumed it. Nodes without events get size 1.
pub fn eg_out_component_sizes(eg: &EventGraph, net: &TemporalNetwork, s: usize, salt: u64) -> Result<EgEstimate> {
    let m = net.m();
    if eg.vertex_count() != m {
        return Err(Error::InvalidParameter(format!(
            "event graph has {} vertices, network has {m} events",
            eg.vertex_count()
        )));
    }
    let events = net.events();
    let template = CardinalitySketch::new(s, salt)?;

    let mut waiting = vec![0u32; m];
    for &f in &eg.targets {
        waiting[f as usize] += 1;
    }
    let mut first_event = vec![u32::MAX; net.n()];
    for (idx, e) in events.iter().enumerate().rev() {
        first_event[e.u as usize] = idx as u32;
        first_event[e.v as usize] = idx as u32;
    }

    let mut live: Vec<Option<CardinalitySketch>> = vec![None; m];
    let mut pending: Vec<Option<CardinalitySketch>> = vec![None; net.n()];
    let mut sizes = vec![1.0; net.n()];
    let mut live_count = 0usize;
    let mut peak = 0usize;

    for idx in (0..m).rev() {
        let e = events[idx];
        let mut sk = template.clone();
        sk.add(e.u as u64);
        sk.add(e.v as u64);
        for &f in eg.successors(idx) {
            let f = f as usize;
            let succ = live[f].as_ref().expect("successor processed earlier");
            max_into_sketch(&mut sk, succ);
            waiting[f] -= 1;
            if waiting[f] == 0 {
                live[f] = None;
                live_count -= 1;
            }
        }
        for w in endpoints(e.u, e.v) {
            let w = w as usize;
            let first_t = events[first_event[w] as usize].t;
            if e.t != first_t {
                continue;
            }
            let acc = pending[w].get_or_insert_with(|| template.clone());
            max_into_sketch(acc, &sk);
            if first_event[w] as usize == idx {
                sizes[w] = acc.estimate();
                pending[w] = None;
            }
        }
        if waiting[idx] > 0 {
            live[idx] = Some(sk);
            live_count += 1;
            peak = peak.max(live_count);
        }
    }
    Ok(EgEstimate {
        sizes: SizeDistribution::from_estimates(sizes),
        peak_live_sketches: peak,
    })
}

fn max_into_sketch(dst: &mut CardinalitySketch, src: &CardinalitySketch) {
    dst.merge(src).expect("sketches share parameters");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{generate, GeneratorConfig};
    use crate::matrix::ComponentMatrix;
    use crate::network::{adjacent, Event};
    use crate::sketch::run_hll_distribution;

    fn net(events: Vec<Event>) -> TemporalNetwork {
        TemporalNetwork::from_unsorted(events).unwrap()
    }

    /// Full event graph: every delta_t-adjacent pair.
    fn full_successors(net: &TemporalNetwork, delta_t: Option<f64>) -> Vec<Vec<u32>> {
        let ev = net.events();
        (0..ev.len())
            .map(|i| {
                (i + 1..ev.len())
                    .filter(|&j| adjacent(&ev[i], &ev[j], delta_t))
                    .map(|j| j as u32)
                    .collect()
            })
            .collect()
    }

    fn reach_full(net: &TemporalNetwork, succ: &[Vec<u32>], start: usize) -> NodeSet {
        let mut seen = vec![false; succ.len()];
        let mut out = NodeSet::empty(net.n());
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(x) = stack.pop() {
            out.insert(net.events()[x].u as usize);
            out.insert(net.events()[x].v as usize);
            for &f in &succ[x] {
                if !std::mem::replace(&mut seen[f as usize], true) {
                    stack.push(f as usize);
                }
            }
        }
        out
    }

    #[test]
    fn small_examples() {
        let chain = net(vec![Event::new(0, 1, 1.0), Event::new(1, 2, 2.0)]);
        let eg = EventGraph::build(&chain, None).unwrap();
        assert_eq!(eg.edge_count(), 1);
        assert_eq!(eg.successors(0), &[1]);
        assert_eq!(eg.weights(0), &[1.0]);

        let simultaneous = net(vec![Event::new(0, 1, 1.0), Event::new(1, 2, 1.0)]);
        assert_eq!(EventGraph::build(&simultaneous, None).unwrap().edge_count(), 0);

        let gap = net(vec![Event::new(0, 1, 1.0), Event::new(1, 2, 3.0)]);
        assert_eq!(EventGraph::build(&gap, Some(1.0)).unwrap().edge_count(), 0);
        assert_eq!(EventGraph::build(&gap, Some(2.0)).unwrap().edge_count(), 1);
    }

    #[test]
    fn links_whole_tie_group() {
        // (0,1,1) precedes two simultaneous events on node 1.
        let g = net(vec![Event::new(0, 1, 1.0), Event::new(1, 2, 2.0), Event::new(1, 3, 2.0), Event::new(1, 4, 3.0)]);
        let eg = EventGraph::build(&g, None).unwrap();
        assert_eq!(eg.successors(0), &[1, 2]);
        assert_eq!(eg.reachable_nodes(&g, 0).count(), 5);
    }

    #[test]
    fn edges_point_forward_in_time() {
        let g = generate(&GeneratorConfig::new(50, 2000, 1)).unwrap();
        let eg = EventGraph::build(&g, None).unwrap();
        for i in 0..eg.vertex_count() {
            for &f in eg.successors(i) {
                assert!(g.events()[f as usize].t > g.events()[i].t);
            }
        }
        // At most one tie group per endpoint; ties have probability zero here.
        assert!(eg.edge_count() <= 2 * g.m());
    }

    #[test]
    fn reduction_preserves_reachability() {
        for seed in 0..30u64 {
            let n = 4 + seed as usize % 17;
            let m = 20 + (seed as usize * 7) % 81;
            let mut g = generate(&GeneratorConfig { p: 0.4, ..GeneratorConfig::new(n, m, seed) }).unwrap();
            if seed % 3 == 0 {
                // Integer timestamps to exercise ties.
                let events = g.events().iter().map(|e| Event::new(e.u, e.v, (e.t / 4.0).floor())).collect();
                g = TemporalNetwork::new(n, events).unwrap();
            }
            for delta_t in [None, Some(3.0)] {
                let eg = EventGraph::build(&g, delta_t).unwrap();
                let full = full_successors(&g, delta_t);
                for e in 0..g.m() {
                    assert_eq!(eg.reachable_nodes(&g, e), reach_full(&g, &full, e), "seed {seed} event {e} window {delta_t:?}");
                }
            }
        }
    }

    #[test]
    fn sizes_on_chain_and_empty() {
        let chain = net(vec![Event::new(0, 1, 1.0), Event::new(1, 2, 2.0)]);
        let eg = EventGraph::build(&chain, None).unwrap();
        let est = eg_out_component_sizes(&eg, &chain, 1 << 10, 3).unwrap();
        for (got, want) in est.sizes.values().iter().zip([3.0, 3.0, 2.0]) {
            assert!((got - want).abs() < 0.05);
        }
        let empty = TemporalNetwork::empty(4);
        let eg = EventGraph::build(&empty, None).unwrap();
        let est = eg_out_component_sizes(&eg, &empty, 64, 3).unwrap();
        assert_eq!(est.sizes.values(), &[1.0; 4]);
    }

    #[test]
    fn agrees_with_reversed_sketch_bank() {
        // Without ties and with an unbounded window both methods sketch the
        // same sets, so with a shared salt the registers, and hence the
        // estimates, coincide for every node that has events.
        for seed in 0..10u64 {
            let g = generate(&GeneratorConfig::new(200, 10_000, seed)).unwrap();
            let eg = EventGraph::build(&g, None).unwrap();
            let s = 1 << 10;
            let a = eg_out_component_sizes(&eg, &g, s, seed).unwrap().sizes;
            let b = run_hll_distribution(&g, s, seed).unwrap();
            let exact = ComponentMatrix::run(&g).unwrap().size_distribution();
            let mut active = vec![false; g.n()];
            for e in g.events() {
                active[e.u as usize] = true;
                active[e.v as usize] = true;
            }
            for u in 0..g.n() {
                if active[u] {
                    assert_eq!(a.get(u), b.get(u), "seed {seed} node {u}");
                } else {
                    assert_eq!(a.get(u), 1.0);
                    assert_eq!(exact.get(u), 1.0);
                }
            }
        }
    }

    #[test]
    fn sketches_are_released() {
        let g = generate(&GeneratorConfig::new(100, 20_000, 2)).unwrap();
        let eg = EventGraph::build(&g, None).unwrap();
        let est = eg_out_component_sizes(&eg, &g, 16, 0).unwrap();
        // Each live sketch is the latest-processed event on some node.
        assert!(est.peak_live_sketches <= 2 * g.n(), "{}", est.peak_live_sketches);
    }

    #[test]
    fn rejects_reversed_networks() {
        let chain = net(vec![Event::new(0, 1, 1.0), Event::new(1, 2, 2.0)]);
        assert!(EventGraph::build(&chain.reverse(), None).is_err());
    }
}
