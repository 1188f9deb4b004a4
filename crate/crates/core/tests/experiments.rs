use lingam_core::experiments::{ConsistencyCell, ConsistencyRow};
use lingam_core::prelude::*;

fn small() -> ExperimentConfig {
    ExperimentConfig {
        sample_sizes: vec![60, 120],
        noise_kinds: vec![NoiseKind::LAPLACE, NoiseKind::GAUSSIAN],
        batches: 12,
        it_cfg: IndependenceTestConfig {
            permutations: 100,
            ..Default::default()
        },
        master_seed: 42,
        ..Default::default()
    }
}

#[test]
fn reports_are_reproducible() {
    let cfg = small();
    assert_eq!(run_sweep(&cfg).unwrap(), run_sweep(&cfg).unwrap());
}

#[test]
fn consistency_alone_matches_full_sweep() {
    let cfg = small();
    assert_eq!(run_consistency(&cfg).unwrap(), run_sweep(&cfg).unwrap().consistency());
}

#[test]
fn cell_order_does_not_matter() {
    let cfg = small();
    let mut shuffled = cfg.clone();
    shuffled.sample_sizes.reverse();
    shuffled.noise_kinds.reverse();
    let a = run_tpd(&cfg).unwrap();
    let b = run_tpd(&shuffled).unwrap();
    for noise in &cfg.noise_kinds {
        for &n in &cfg.sample_sizes {
            for alg in [Algorithm::GaussDetect, Algorithm::PairwiseBaseline] {
                assert_eq!(a.cell(*noise, n, alg), b.cell(*noise, n, alg));
            }
        }
    }
    let a = run_consistency(&cfg).unwrap();
    let b = run_consistency(&shuffled).unwrap();
    for noise in &cfg.noise_kinds {
        for &n in &cfg.sample_sizes {
            assert_eq!(a.cell(*noise, n), b.cell(*noise, n));
        }
    }
}

#[test]
fn adding_a_cell_leaves_the_others_alone() {
    let cfg = small();
    let mut wider = cfg.clone();
    wider.noise_kinds.push(NoiseKind::POISSON);
    let a = run_consistency(&cfg).unwrap();
    let b = run_consistency(&wider).unwrap();
    assert_eq!(a.cell(NoiseKind::LAPLACE, 60), b.cell(NoiseKind::LAPLACE, 60));
}

#[test]
fn tpd_invariants() {
    let report = run_tpd(&small()).unwrap();
    assert!(report.all_valid());
    for cell in &report.cells {
        let evaluated = (cell.batches - cell.excluded) as f64;
        assert_eq!(cell.verdicts.total() as f64, evaluated);
        match cell.algorithm {
            Algorithm::GaussDetect => assert_eq!(cell.mean_tpd, 2.0),
            Algorithm::PairwiseBaseline => assert!((1.0..=3.0).contains(&cell.mean_tpd)),
        }
    }
    let rows = report.long_rows();
    let tpd_rows = rows.iter().filter(|r| r.metric.ends_with(".mean_tpd")).count();
    assert_eq!(tpd_rows, 2 * 2 * 2);
}

#[test]
fn consistency_invariants() {
    let report = run_consistency(&small()).unwrap();
    for cell in &report.cells {
        assert!((0.0..=1.0).contains(&cell.consistency_rate));
        let hits = cell.rows.iter().filter(|r| r.gt_phi == r.it_phi).count();
        assert_eq!(cell.consistency_rate, hits as f64 / cell.rows.len() as f64);
    }
    let rows = report.long_rows();
    assert_eq!(
        rows.iter().filter(|r| r.metric == "consistency_rate").count(),
        report.cells.len()
    );
}

#[test]
fn single_batch_rate_is_zero_or_one() {
    for (gt, it) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let rows = vec![ConsistencyRow {
            batch: 0,
            gt_phi: gt,
            it_phi: it,
        }];
        let cell = ConsistencyCell::from_rows(NoiseKind::LAPLACE, 400, 1, rows, Vec::new());
        assert_eq!(cell.consistency_rate, if gt == it { 1.0 } else { 0.0 });
    }
}

#[test]
fn invalid_configs() {
    let mut cfg = small();
    cfg.batches = 5;
    assert!(matches!(run_tpd(&cfg), Err(Error::InvalidConfig(_))));
    let mut cfg = small();
    cfg.sample_sizes = vec![10];
    assert!(run_consistency(&cfg).is_err());
    let mut cfg = small();
    cfg.alpha = 0.0;
    assert!(run_sweep(&cfg).is_err());
}
