use std::fs;
use std::path::Path;

use blackbench_core::harness::{run_experiment, ExperimentConfig};
use blackbench_core::observer::{parse_logs, ObserverConfig};
use blackbench_core::perf::{extract_runtimes, TargetSet};
use blackbench_core::suite::{make_transform, raw_function, SuiteFilter, BBOB_LITE};

fn config(
    out: &Path,
    optimizer: &str,
    multiplier: f64,
    seed: u64,
    filter: SuiteFilter,
) -> ExperimentConfig {
    ExperimentConfig {
        suite_name: BBOB_LITE.into(),
        filter,
        optimizer: optimizer.into(),
        budget_multiplier: multiplier,
        master_seed: seed,
        observer: ObserverConfig::new(out, optimizer),
    }
}

fn sphere_2d(instances: Option<Vec<u32>>) -> SuiteFilter {
    SuiteFilter {
        function_ids: Some(vec![1]),
        dimensions: Some(vec![2]),
        instance_ids: instances,
    }
}

fn dat_files(folder: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(folder)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "dat"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn identical_config_gives_identical_dat_files() {
    let dir = tempfile::tempdir().unwrap();
    let filter = SuiteFilter {
        dimensions: Some(vec![2, 3]),
        instance_ids: Some(vec![1, 2]),
        ..Default::default()
    };
    for optimizer in ["random-search", "nelder-mead"] {
        let a = run_experiment(&config(
            &dir.path().join("a"),
            optimizer,
            200.0,
            42,
            filter.clone(),
        ))
        .unwrap();
        let b = run_experiment(&config(
            &dir.path().join("b"),
            optimizer,
            200.0,
            42,
            filter.clone(),
        ))
        .unwrap();
        let (fa, fb) = (dat_files(&a), dat_files(&b));
        assert_eq!(fa.len(), 16);
        assert_eq!(fa, fb, "{optimizer}");
    }
}

#[test]
fn results_do_not_depend_on_problem_selection() {
    let dir = tempfile::tempdir().unwrap();
    let full = run_experiment(&config(
        &dir.path().join("full"),
        "random-search",
        100.0,
        7,
        sphere_2d(None),
    ))
    .unwrap();
    let one = run_experiment(&config(
        &dir.path().join("one"),
        "random-search",
        100.0,
        7,
        sphere_2d(Some(vec![3])),
    ))
    .unwrap();
    let full_logs = parse_logs(&full).unwrap().logs;
    let one_logs = parse_logs(&one).unwrap().logs;
    let from_full = full_logs
        .iter()
        .find(|l| l.descriptor.instance_id == 3)
        .unwrap();
    assert_eq!(one_logs.len(), 1);
    assert_eq!(one_logs[0].budget_used, from_full.budget_used);
    assert_eq!(one_logs[0].events, from_full.events);
}

#[test]
fn larger_budget_never_lowers_success_counts() {
    let dir = tempfile::tempdir().unwrap();
    let targets = TargetSet::standard();
    for seed in 1..=3 {
        let counts = |multiplier: f64, tag: &str| -> Vec<usize> {
            let out = dir.path().join(format!("{tag}-{seed}"));
            let folder = run_experiment(&config(
                &out,
                "random-search",
                multiplier,
                seed,
                sphere_2d(None),
            ))
            .unwrap();
            let logs = parse_logs(&folder).unwrap().logs;
            let records = extract_runtimes(&logs, &targets);
            targets
                .offsets()
                .iter()
                .map(|t| {
                    records
                        .iter()
                        .filter(|r| r.target_offset == *t && r.outcome.is_success())
                        .count()
                })
                .collect()
        };
        let small = counts(1e2, "small");
        let large = counts(1e4, "large");
        for (s, l) in small.iter().zip(&large) {
            assert!(l >= s, "seed {seed}: {small:?} vs {large:?}");
        }
        assert!(large.iter().sum::<usize>() > small.iter().sum::<usize>());
    }
}

/// Fraction of the box within offset `target` of the optimum, by midpoint
/// quadrature on a regular grid.
fn sphere_basin_fraction(x_opt: &[f64], target: f64) -> f64 {
    let cells = 1000;
    let h = 10.0 / cells as f64;
    let mut inside = 0usize;
    for a in 0..cells {
        for b in 0..cells {
            let x = -5.0 + (a as f64 + 0.5) * h - x_opt[0];
            let y = -5.0 + (b as f64 + 0.5) * h - x_opt[1];
            if x * x + y * y <= target {
                inside += 1;
            }
        }
    }
    inside as f64 / (cells * cells) as f64
}

#[test]
fn random_search_hit_probability_oracle() {
    let sphere = raw_function(1).unwrap();
    let budget = 2e4;
    for j in 1..=5 {
        let t = make_transform(BBOB_LITE, sphere, 2, j);
        let p = sphere_basin_fraction(t.shift(), 10.0);
        assert!(p > 0.05, "instance {j}: p = {p}");
        let miss = (1.0 - p).powf(budget);
        assert!(miss < 1e-12, "instance {j}: miss probability {miss}");
    }
}

#[test]
fn restarts_share_one_problem_budget() {
    let dir = tempfile::tempdir().unwrap();
    let filter = SuiteFilter {
        function_ids: Some(vec![3, 8]),
        dimensions: Some(vec![2]),
        instance_ids: Some(vec![1]),
    };
    let folder = run_experiment(&config(dir.path(), "nelder-mead", 3000.0, 5, filter)).unwrap();
    for log in parse_logs(&folder).unwrap().logs {
        assert!(log.budget_used <= 6000, "{}", log.descriptor);
        let final_hit = log.events.last().is_some_and(|e| e.best_offset <= 1e-8);
        assert!(final_hit || log.budget_used == 6000, "{}", log.descriptor);
    }
}
