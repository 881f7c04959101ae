use proptest::prelude::*;
use tnet_core::hashing::HashDescriptor;
use tnet_core::sparse::SparseComponentMatrix;
use tnet_core::{
    all_components_oracle, fused_out_components, si_oracle, ComponentMatrix, Event, FusionOptions, HashFamily,
    HashFunction, TemporalNetwork,
};

fn network() -> impl Strategy<Value = TemporalNetwork> {
    (2usize..25).prop_flat_map(|n| {
        prop::collection::vec((0..n as u32, 0..n as u32, 0u32..40), 0..120).prop_map(move |raw| {
            let events = raw.into_iter().map(|(u, v, t)| Event::new(u, v, t as f64)).collect();
            let mut net = TemporalNetwork::from_unsorted(events).unwrap();
            while net.n() < n {
                net = TemporalNetwork::new(n, net.events().to_vec()).unwrap();
            }
            net
        })
    })
}

proptest! {
    #[test]
    fn matrix_matches_oracle(net in network()) {
        let cm = ComponentMatrix::run(&net).unwrap();
        for u in 0..net.n() {
            prop_assert_eq!(cm.out_component(u).unwrap(), si_oracle(&net, u).unwrap());
        }
        prop_assert_eq!(cm.size_distribution(), all_components_oracle(&net));
    }

    #[test]
    fn reversed_and_sparse_agree(net in network()) {
        let fwd = ComponentMatrix::run(&net).unwrap();
        let rev = ComponentMatrix::run_reversed(&net).unwrap();
        let sparse = SparseComponentMatrix::run(&net).unwrap();
        for u in 0..net.n() {
            prop_assert_eq!(rev.row(u), fwd.column(u));
        }
        prop_assert_eq!(sparse.size_distribution(), fwd.size_distribution());
        prop_assert_eq!(sparse.total_ones(), fwd.total_ones());
    }

    #[test]
    fn fusion_contains_truth(net in network(), seed in any::<u64>(), k in 1usize..4) {
        let family = HashFamily::new(seed, (net.n() / 3).max(1));
        let fe = fused_out_components(&net, &family, k, FusionOptions::default()).unwrap();
        for u in 0..net.n() {
            prop_assert!(si_oracle(&net, u).unwrap().is_subset(fe.component(u)));
        }
    }

    #[test]
    fn descriptor_survives_json(seed in any::<u64>(), n_s in 1usize..1000) {
        let h = HashFunction::new(seed, n_s, 4).unwrap();
        let text = serde_json::to_string(&h.descriptor()).unwrap();
        let back: HashDescriptor = serde_json::from_str(&text).unwrap();
        let rebuilt = back.rebuild().unwrap();
        for key in [0u64, 1, 65_535, 65_536, u64::MAX] {
            prop_assert_eq!(rebuilt.hash(key), h.hash(key));
        }
    }
}
