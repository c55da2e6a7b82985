//! Fixtures shared by the criterion benches.

use gda_lab::{sample_dataset, Gamma, LabeledDataset, MixtureParams, SweepGrid, SweepSettings};

pub fn params(d: usize) -> MixtureParams {
    MixtureParams::standard(d, 0.6).expect("valid fixture parameters")
}

pub fn real_set(d: usize, m_s: usize, seed: u64) -> LabeledDataset {
    sample_dataset(&params(d), m_s, seed)
}

/// A small sweep that finishes in well under a second.
pub fn small_sweep() -> (SweepGrid, SweepSettings) {
    let grid = SweepGrid::new(vec![1, 10], vec![20], vec![Gamma::ZERO, Gamma::integer(5)]);
    let settings = SweepSettings {
        runs: 20,
        n_test: 1000,
        workers: Some(1),
        ..SweepSettings::default()
    };
    (grid, settings)
}
