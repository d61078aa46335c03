//! Byte-identical output for a fixed seed, and exact CSV parse-back.

use std::collections::BTreeMap;
use std::path::Path;

use oseen_core::fields::GridSpec;
use oseen_core::harness::{self, output, Experiment, ExperimentConfig};

fn small(experiment: Experiment) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(experiment, GridSpec::new(3, 1.0, 8).unwrap());
    cfg.ensemble.fields = 4;
    cfg.ensemble.refine = false;
    cfg.ensemble.asymptotic_lambdas = vec![1e12, 1e14, 1e16];
    cfg
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

#[test]
fn fixed_seed_reproduces_every_file() {
    for experiment in [Experiment::ScalingSteady, Experiment::Bilinear] {
        let cfg = small(experiment);
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        harness::run(&cfg).unwrap().write(a.path()).unwrap();
        harness::run(&cfg).unwrap().write(b.path()).unwrap();
        let (fa, fb) = (files(a.path()), files(b.path()));
        assert!(fa.len() >= 3, "{:?}", fa.keys());
        assert_eq!(fa, fb, "{}", experiment.name());
    }
}

#[test]
fn seed_changes_the_data() {
    let mut cfg = small(Experiment::ScalingSteady);
    let first = harness::run(&cfg).unwrap();
    cfg.seed += 1;
    let second = harness::run(&cfg).unwrap();
    assert_ne!(first.table("sweep").unwrap().rows, second.table("sweep").unwrap().rows);
}

#[test]
fn written_tables_parse_back_exactly() {
    let report = harness::run(&small(Experiment::ScalingSteady)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    report.write(dir.path()).unwrap();
    for table in &report.tables {
        let path = dir.path().join(format!("scaling-steady_{}.csv", table.name));
        let back = output::read_csv(&table.name, &path).unwrap();
        assert_eq!(back.columns, table.columns);
        for (x, y) in back.rows.iter().flatten().zip(table.rows.iter().flatten()) {
            assert!(x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()));
        }
    }
}
