use std::fs;

use proptest::prelude::*;
use slabflow::domain::{read_snapshot, write_snapshot, SlabGrid, Snapshot, State};
use slabflow::harness::{emit_artifacts, run_sweep, ExperimentConfig};
use slabflow::target::TargetInit;

fn tiny(seed: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::default_preset();
    c.grid.nh = 16;
    c.grid.nv = 4;
    c.t_final = 0.02;
    c.output_every = 0.01;
    c.scaling.eps = vec![0.6, 0.5, 0.45];
    c.target = TargetInit::RandomModes {
        count: 4,
        kmax: 3,
        seed: 0,
        amplitude: 0.5,
    };
    c.with_seed(seed)
}

fn summary_bytes(c: &ExperimentConfig) -> Vec<u8> {
    let d = tempfile::tempdir().unwrap();
    let out = run_sweep(c).unwrap();
    let files = emit_artifacts(d.path(), c, None, &out.report, &out.runs).unwrap();
    assert_eq!(files.iter().filter(|p| p.extension().is_some_and(|e| e == "csv")).count(), 3);
    assert!(files.iter().filter(|p| p.extension().is_some_and(|e| e == "svg")).count() >= 2);
    fs::read(d.path().join("summary.json")).unwrap()
}

#[test]
fn same_seed_same_summary_bytes() {
    let a = summary_bytes(&tiny(5));
    let b = summary_bytes(&tiny(5));
    assert_eq!(a, b);
    let c = summary_bytes(&tiny(6));
    assert_ne!(a, c);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn snapshot_round_trip(nh in 4usize..9, nv in 2usize..5, t in 0.0f64..10.0, seed in any::<u64>()) {
        let grid = SlabGrid::new(1.5, nh, nv).unwrap();
        let mut x = seed | 1;
        let mut next = move || {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x >> 11) as f64 / (1u64 << 53) as f64
        };
        let n = grid.len();
        let rho: Vec<f64> = (0..n).map(|_| 0.5 + next()).collect();
        let mom = [0, 1, 2].map(|_| (0..n).map(|_| next() - 0.5).collect::<Vec<f64>>());
        let s = State::new(grid, rho, mom, t).unwrap();
        let d = tempfile::tempdir().unwrap();
        let p = d.path().join("s.snap");
        write_snapshot(&p, &Snapshot::from_state(&s, Some([0.3, 3.0, 1.0]))).unwrap();
        let back = read_snapshot(&p).unwrap();
        prop_assert_eq!(back.header.eps_record, Some([0.3, 3.0, 1.0]));
        let r = back.to_state().unwrap();
        prop_assert_eq!(r.rho, s.rho);
        prop_assert_eq!(r.mom, s.mom);
        prop_assert_eq!(r.time, s.time);
    }
}
