//! Brute-force ground truth: a deterministic SI process per source node.
//!
//! `O(n)` space per source and `O(m)` time, so `O(n m)` for all nodes. Kept
//! deliberately naive; it is what the fast algorithms are checked against.

use crate::bits::NodeSet;
use crate::error::{Error, Result};
use crate::metrics::SizeDistribution;
use crate::network::TemporalNetwork;

/// Final infected set of an SI process seeded at `source`, sweeping the
/// events in stored order. Any contact with an infected node infects.
pub fn si_oracle(net: &TemporalNetwork, source: usize) -> Result<NodeSet> {
    if source >= net.n() {
        return Err(Error::NodeOutOfRange {
            node: source as u64,
            n: net.n(),
        });
    }
    let mut infected = vec![false; net.n()];
    infected[source] = true;
    for e in net.events() {
        let (a, b) = (e.u as usize, e.v as usize);
        if infected[a] || infected[b] {
            infected[a] = true;
            infected[b] = true;
        }
    }
    Ok(NodeSet::from_nodes(
        net.n(),
        infected.iter().enumerate().filter(|(_, &x)| x).map(|(i, _)| i),
    ))
}

/// Out-component of every node, via one SI sweep per node.
pub fn all_out_components_oracle(net: &TemporalNetwork) -> Vec<NodeSet> {
    (0..net.n()).map(|u| si_oracle(net, u).expect("source in range")).collect()
}

/// Ground-truth size distribution.
pub fn all_components_oracle(net: &TemporalNetwork) -> SizeDistribution {
    SizeDistribution::from_counts(all_out_components_oracle(net).iter().map(NodeSet::count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Event;

    fn nodes(s: &NodeSet) -> Vec<usize> {
        s.iter().collect()
    }

    #[test]
    fn hand_traced_cases() {
        let empty = TemporalNetwork::empty(3);
        assert_eq!(nodes(&si_oracle(&empty, 1).unwrap()), vec![1]);

        let net = TemporalNetwork::new(3, vec![Event::new(0, 1, 1.0), Event::new(1, 2, 2.0)]).unwrap();
        assert_eq!(nodes(&si_oracle(&net, 0).unwrap()), vec![0, 1, 2]);

        // (0,1) at t=1 happens before (1,2) at t=2: nothing flows back to 0.
        let net = TemporalNetwork::from_unsorted(vec![Event::new(1, 2, 2.0), Event::new(0, 1, 1.0)]).unwrap();
        assert_eq!(nodes(&si_oracle(&net, 2).unwrap()), vec![1, 2]);
        assert!(si_oracle(&net, 3).is_err());
    }

    #[test]
    fn complete_mixing_reaches_everyone() {
        let n = 6;
        let mut events = Vec::new();
        let mut t = 0.0;
        for _ in 0..2 {
            for a in 0..n {
                for b in a + 1..n {
                    t += 1.0;
                    events.push(Event::new(a, b, t));
                }
            }
        }
        let net = TemporalNetwork::new(n as usize, events).unwrap();
        assert_eq!(all_components_oracle(&net), SizeDistribution::from_counts([n as usize; 6]));
    }

    #[test]
    fn identity_when_no_events() {
        let d = all_components_oracle(&TemporalNetwork::empty(5));
        assert_eq!(d, SizeDistribution::from_counts([1; 5]));
    }
}
