use std::fs;

use tempfile::TempDir;
use tnet_core::matrix::Orientation;
use tnet_core::network::{load_with, LoadOptions};
use tnet_core::{generate, load_events, ComponentMatrix, Error, GeneratorConfig, SizeDistribution};

#[test]
fn save_and_load_round_trip() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("net.csv");
    let net = generate(&GeneratorConfig::new(80, 3000, 4)).unwrap();
    net.save(&path).unwrap();
    let back = load_events(&path, false).unwrap();
    assert_eq!(back.events(), net.events());
    assert!(back.n() <= net.n());
}

#[test]
fn unsorted_files_need_sorting() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("net.txt");
    fs::write(&path, "# u v t\n1 2 5\n\n0 1 3 extra\n").unwrap();
    match load_events(&path, false) {
        Err(Error::OutOfOrder { line, .. }) => assert_eq!(line, 4),
        other => panic!("expected out-of-order error, got {other:?}"),
    }
    let net = load_events(&path, true).unwrap();
    assert_eq!(net.m(), 2);
    assert_eq!(net.events()[0].t, 3.0);
    assert!(matches!(load_events(dir.path().join("missing"), true), Err(Error::Io(_))));
}

#[test]
fn labels_and_prefix() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("labels.csv");
    fs::write(&path, "bob,alice,2\nalice,carol,1\ncarol,dave,3\n").unwrap();
    let opts = LoadOptions {
        sort: true,
        prefix_fraction: Some(0.5),
    };
    let loaded = load_with(&path, &opts).unwrap();
    let labels = loaded.labels.expect("label mode");
    assert_eq!(loaded.network.m(), 2);
    assert_eq!(labels.label_of(0), Some("alice"));
    assert_eq!(labels.id_of("bob"), Some(2));
    let sizes = ComponentMatrix::run(&loaded.network).unwrap().size_distribution();
    assert_eq!(sizes.values(), &[3.0, 3.0, 2.0]);
}

#[test]
fn matrix_and_sizes_files() {
    let dir = TempDir::new().unwrap();
    let net = generate(&GeneratorConfig::new(37, 800, 9)).unwrap();
    let cm = ComponentMatrix::run(&net).unwrap();

    let bin = dir.path().join("m.bin");
    cm.write_to(fs::File::create(&bin).unwrap()).unwrap();
    assert_eq!(fs::metadata(&bin).unwrap().len(), 8 + 37 * 5);
    let back = ComponentMatrix::read_from(fs::File::open(&bin).unwrap(), Orientation::Forward).unwrap();
    assert_eq!(back.out_components(), cm.out_components());

    let csv = dir.path().join("sizes.csv");
    cm.size_distribution().write_csv(fs::File::create(&csv).unwrap(), "size").unwrap();
    let sizes = SizeDistribution::read_csv(fs::read(&csv).unwrap().as_slice()).unwrap();
    assert_eq!(sizes, cm.size_distribution());
}
