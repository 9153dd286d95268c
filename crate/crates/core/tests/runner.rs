mod common;

use std::time::Instant;

use pskg::io::{read_edge_list, write_edge_list, EdgeFormat};
use pskg::{run_generation, GraphSpec, Model};

use common::*;

#[test]
fn million_edge_binary_round_trip() {
    let spec = GraphSpec::new(core_periphery(), 16, 1e6, 5, Model::Pskg, 4).unwrap();
    let g = run_generation(&spec).unwrap();
    assert!((g.len() as f64 - 1e6).abs() < 5_000.0);
    let bytes = write_edge_list(&g, EdgeFormat::Binary, None);
    assert_eq!(bytes.len(), 21 + 16 * g.len());
    let back = read_edge_list(&bytes, EdgeFormat::Binary).unwrap();
    assert_eq!(write_edge_list(&back, EdgeFormat::Binary, None), bytes);
}

#[test]
fn more_workers_than_vertices() {
    let one = GraphSpec::new(core_periphery(), 2, 50.0, 8, Model::Pskg, 1).unwrap();
    let many = GraphSpec {
        workers: 64,
        ..one.clone()
    };
    assert_eq!(
        run_generation(&one).unwrap(),
        run_generation(&many).unwrap()
    );
}

/// Needs a machine with at least 8 cores; run with `--ignored`.
#[test]
#[ignore]
fn eight_workers_scale() {
    let time = |workers| {
        let spec = GraphSpec::new(core_periphery(), 20, 1e7, 1, Model::Pskg, workers).unwrap();
        let start = Instant::now();
        let g = run_generation(&spec).unwrap();
        (start.elapsed().as_secs_f64(), g.len())
    };
    let (t1, m1) = time(1);
    let (t8, m8) = time(8);
    assert_eq!(m1, m8);
    println!(
        "1 worker {t1:.2}s, 8 workers {t8:.2}s, speed-up {:.2}",
        t1 / t8
    );
    assert!(t1 / t8 >= 3.0, "speed-up {:.2}", t1 / t8);
}
