use tnet_cli::bench::{run_grid, BenchGrid};
use tnet_cli::Method;

#[test]
fn doubling_m_roughly_doubles_matrix_time() {
    let mut grid = BenchGrid::new(vec![200], vec![250_000, 500_000], vec![Method::Matrix]);
    grid.repeats = 5;
    let records = run_grid(&grid).unwrap();
    let best = |m: usize| {
        records
            .iter()
            .filter(|r| r.m == m)
            .map(|r| r.wall_time)
            .fold(f64::INFINITY, f64::min)
    };
    let ratio = best(500_000) / best(250_000);
    assert!((1.5..=3.0).contains(&ratio), "ratio {ratio}");
}
