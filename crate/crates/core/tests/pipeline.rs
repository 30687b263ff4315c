use replicator_core::{
    bounds_table, emit_trajectory, parse_config_str, run_experiment, BoundKind, EcdfTable, Error,
    RunManifest,
};

const CONFIG: &str = r#"
k = 2
generations = 3
elections = 4000
trials = 2
seed = 7
symmetry = true
probes = [0.3]

[initial]
kind = "uniform"
"#;

#[test]
fn written_run_reads_back_and_meets_the_two_candidate_formula() {
    let cfg = parse_config_str(CONFIG).unwrap();
    let runs = run_experiment(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let manifest = emit_trajectory(&runs, dir.path(), None).unwrap();
    assert_eq!(manifest.trial_seeds.len(), 2);

    let back = RunManifest::read(dir.path()).unwrap();
    assert_eq!(back.config.as_ref(), Some(&cfg));
    assert_eq!(back.files, manifest.files);

    // the file round trip is lossless
    let from_disk = EcdfTable::read(dir.path()).unwrap();
    let in_memory = EcdfTable::from_trajectories(&runs);
    for t in 0..=3 {
        for x in [0.25, 0.3, 0.5] {
            assert_eq!(from_disk.values(t, x), in_memory.values(t, x), "t={t} x={x}");
        }
    }

    let rows = bounds_table(&cfg, &from_disk, BoundKind::K2Exact, &[0.25, 0.3]).unwrap();
    assert_eq!(rows.len(), 8);
    // [2x]^(2^t) / 2 at x = 0.3, t = 3: 0.6^8 / 2
    let last = rows.iter().find(|r| r.t == 3 && r.x == 0.3).unwrap();
    assert!((last.bound_value - 0.008398080).abs() < 1e-12);
    assert!(rows.iter().all(|r| r.satisfied), "{rows:?}");
}

#[test]
fn same_seed_same_files() {
    let cfg = parse_config_str(CONFIG).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ma = emit_trajectory(&run_experiment(&cfg).unwrap(), a.path(), None).unwrap();
    let mb = emit_trajectory(&run_experiment(&cfg).unwrap(), b.path(), None).unwrap();
    assert_eq!(ma.files, mb.files);
}

#[test]
fn bounds_refuse_mismatched_runs() {
    let cfg = parse_config_str(CONFIG).unwrap();
    let table = EcdfTable::from_trajectories(&run_experiment(&cfg).unwrap());
    for (kind, x) in [(BoundKind::K3Upper, 0.25), (BoundKind::K2NoisyLimit, 0.25), (BoundKind::K2Exact, 0.31)] {
        let err = bounds_table(&cfg, &table, kind, &[x]).unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{kind:?}: {err}");
        assert_eq!(err.exit_code(), 2);
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let mut cfg = parse_config_str(CONFIG).unwrap();
    cfg.k = Some(5);
    cfg.probes.clear();
    let run_on = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let runs = pool.install(|| run_experiment(&cfg)).unwrap();
        emit_trajectory(&runs, dir.path(), None).unwrap().files
    };
    assert_eq!(run_on(1), run_on(4));
}
