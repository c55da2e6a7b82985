use std::fs;

use gda_lab::report::{emit_bound_csv, emit_sweep_csv, BOUND_HEADER, SWEEP_HEADER};
use gda_lab::{predict_sweep, run_sweep, BgmmBound, BoundMode, Gamma, SweepGrid, SweepResult, SweepSettings};

fn small_settings() -> SweepSettings {
    SweepSettings {
        runs: 30,
        n_test: 500,
        master_seed: 3,
        ..SweepSettings::default()
    }
}

#[test]
fn empty_result_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    emit_sweep_csv(&path, &SweepResult::default()).unwrap();
    assert_eq!(
        fs::read_to_string(&path).unwrap(),
        format!("{}\n", SWEEP_HEADER.join(","))
    );
    emit_bound_csv(&path, &[]).unwrap();
    assert_eq!(
        fs::read_to_string(&path).unwrap(),
        format!("{}\n", BOUND_HEADER.join(","))
    );
}

#[test]
fn one_cell_sweep_parses_back_to_record() {
    let grid = SweepGrid::new(vec![2], vec![20], vec![Gamma::new(5, 2).unwrap()]);
    let res = run_sweep(&grid, &small_settings()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.csv");
    emit_sweep_csv(&path, &res).unwrap();

    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(!text.starts_with('\u{feff}') && !text.contains('\r'));

    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), SWEEP_HEADER);
    let row = reader.records().next().unwrap().unwrap();
    let r = &res.records[0];
    let f = |i: usize| row[i].parse::<f64>().unwrap();
    assert_eq!(row[0].parse::<usize>().unwrap(), r.d);
    assert_eq!(row[1].parse::<u64>().unwrap(), r.m_s);
    assert_eq!(f(2), 2.5);
    assert_eq!(row[3].parse::<u64>().unwrap(), r.m_g);
    assert_eq!(row[4].parse::<u64>().unwrap(), r.runs);
    assert_eq!(f(5).to_bits(), r.mean_gen_error.to_bits());
    assert_eq!(f(6).to_bits(), r.std_error.to_bits());
    assert_eq!(f(7).to_bits(), r.mean_train_risk.to_bits());
    assert_eq!(f(8).to_bits(), r.mean_test_risk.to_bits());
    assert_eq!(row[9].parse::<u64>().unwrap(), r.redraw_count);
}

#[test]
fn repeated_run_is_byte_identical() {
    let grid = SweepGrid::new(vec![1, 4], vec![10, 25], vec![Gamma::ZERO, Gamma::integer(3)]);
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    emit_sweep_csv(&a, &run_sweep(&grid, &small_settings()).unwrap()).unwrap();
    let again = SweepSettings {
        workers: Some(3),
        ..small_settings()
    };
    emit_sweep_csv(&b, &run_sweep(&grid, &again).unwrap()).unwrap();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn predict_tables_ignore_delta_bytewise() {
    let grid = SweepGrid::new(
        vec![1, 50],
        vec![10, 40],
        [0, 1, 2, 5, 10, 20, 50].map(Gamma::integer).to_vec(),
    );
    let bound = BgmmBound::new(BoundMode::Predict);
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    emit_bound_csv(&a, &predict_sweep(&grid, 0.5, &bound).unwrap()).unwrap();
    emit_bound_csv(&b, &predict_sweep(&grid, 0.01, &bound).unwrap()).unwrap();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(fs::read_to_string(&a).unwrap().lines().count(), 1 + 28);
}
