//! Seeded Monte Carlo trials and grid sweeps.
//!
//! One trial: draw the real set `S`, fit the generator and augment when
//! `γ > 0`, fit ERM on `S̃`, and measure `|test risk − train risk|` against a
//! fresh test sample.
//!
//! Every trial owns a seed derived from
//! `(master_seed, d, m_S, γ numerator, γ denominator, trial_index)` with
//! [`derive_seed`]. Inside a trial the ChaCha stream index separates purposes:
//! stream 0 is the test set, stream 1 the synthetic set, and stream `2 + k`
//! the `k`-th attempt at drawing `S`. Trials are scheduled on a rayon pool in
//! any order, then aggregated per cell in trial-index order, so results do not
//! depend on the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bound::{BgmmBound, BoundBreakdown, BoundMode};
use crate::classifier::{empirical_risk, fit_erm, mc_true_risk, LossKind, RiskReport};
use crate::error::{Error, Result};
use crate::gamma::Gamma;
use crate::generator::{augment, fit_conditional_gmm};
use crate::mixture::{sample_dataset, MixtureParams};
use crate::rng::{derive_seed, RngKey};
use crate::sum::{pairwise_mean, pairwise_sum};

pub const DEFAULT_SIGMA: f64 = 0.6;
pub const DEFAULT_N_TEST: usize = 10_000;
pub const DEFAULT_RUNS: u64 = 1000;
/// Attempts at drawing a real set with two points per class before a trial aborts.
pub const MAX_REDRAWS: u32 = 1000;

pub const TEST_STREAM: u64 = 0;
pub const SYNTHETIC_STREAM: u64 = 1;
pub const REAL_STREAM_BASE: u64 = 2;

/// Written into run metadata next to every CSV.
pub const TEST_SET_POLICY: &str = "fresh test sample of n_test points per trial, drawn from the trial's own stream";
pub const REDRAW_POLICY: &str =
    "if gamma > 0 and a class has fewer than 2 real points, the whole real set is redrawn from the next stream (at most 1000 attempts, then the run aborts)";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub d: usize,
    #[serde(rename = "m_S")]
    pub m_s: u64,
    pub gamma: Gamma,
    /// Noise standard deviation σ.
    pub sigma: f64,
    pub n_test: usize,
    pub loss: LossKind,
    pub master_seed: u64,
    pub trial_index: u64,
}

impl TrialConfig {
    pub fn new(d: usize, m_s: u64, gamma: Gamma) -> Self {
        Self {
            d,
            m_s,
            gamma,
            sigma: DEFAULT_SIGMA,
            n_test: DEFAULT_N_TEST,
            loss: LossKind::Nll,
            master_seed: 0,
            trial_index: 0,
        }
    }

    pub fn trial_seed(&self) -> u64 {
        derive_seed(&[
            self.master_seed,
            self.d as u64,
            self.m_s,
            self.gamma.numer(),
            self.gamma.denom(),
            self.trial_index,
        ])
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 1 {
            return Err(Error::invalid("d", "must be at least 1"));
        }
        if self.m_s < 1 {
            return Err(Error::invalid("m_S", "must be at least 1"));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::invalid("sigma", format!("must be positive, got {}", self.sigma)));
        }
        if self.n_test < 1 {
            return Err(Error::invalid("n_test", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub gen_error: f64,
    pub train_risk: f64,
    pub test_risk: f64,
    pub redraws: u32,
}

pub fn run_trial(cfg: &TrialConfig) -> Result<TrialOutcome> {
    cfg.validate()?;
    let params = MixtureParams::standard(cfg.d, cfg.sigma)?;
    let seed = cfg.trial_seed();
    let m_s = cfg.m_s as usize;

    let mut redraws = 0;
    let train_set = loop {
        let real = sample_dataset(&params, m_s, RngKey::new(seed, REAL_STREAM_BASE + u64::from(redraws)));
        if cfg.gamma.is_zero() {
            break real;
        }
        match fit_conditional_gmm(&real) {
            Ok(gen) => break augment(&real, &gen, cfg.gamma, RngKey::new(seed, SYNTHETIC_STREAM)),
            Err(Error::InsufficientClassData { .. }) => {
                redraws += 1;
                if redraws >= MAX_REDRAWS {
                    return Err(Error::RedrawExhausted {
                        attempts: redraws,
                        d: cfg.d,
                        m_s: cfg.m_s,
                        trial_index: cfg.trial_index,
                    });
                }
            }
            Err(e) => return Err(e),
        }
    };

    let clf = fit_erm(&train_set, params.noise_var())?;
    let train_risk = empirical_risk(&clf, &train_set, cfg.loss)?;
    let test_risk = mc_true_risk(&clf, &params, cfg.n_test, RngKey::new(seed, TEST_STREAM), cfg.loss)?;
    let report = RiskReport::new(train_risk, test_risk, cfg.loss);
    Ok(TrialOutcome {
        gen_error: report.gen_error,
        train_risk,
        test_risk,
        redraws,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub d: usize,
    #[serde(rename = "m_S")]
    pub m_s: u64,
    pub gamma: Gamma,
}

impl Cell {
    pub fn m_g(&self) -> u64 {
        self.gamma.synthetic_count(self.m_s)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepGrid {
    pub d: Vec<usize>,
    #[serde(rename = "m_S")]
    pub m_s: Vec<u64>,
    pub gamma: Vec<Gamma>,
}

impl SweepGrid {
    pub fn new(d: Vec<usize>, m_s: Vec<u64>, gamma: Vec<Gamma>) -> Self {
        Self { d, m_s, gamma }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d.is_empty() || self.m_s.is_empty() || self.gamma.is_empty() {
            return Err(Error::invalid("grid", "d, m_S and gamma lists must be nonempty"));
        }
        Ok(())
    }

    /// Cartesian product, deduplicated and sorted by `(d, m_S, γ)`.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells: Vec<Cell> = self
            .d
            .iter()
            .flat_map(|&d| {
                self.m_s
                    .iter()
                    .flat_map(move |&m_s| self.gamma.iter().map(move |&gamma| Cell { d, m_s, gamma }))
            })
            .collect();
        cells.sort();
        cells.dedup();
        cells
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    pub runs: u64,
    pub sigma: f64,
    pub n_test: usize,
    pub loss: LossKind,
    pub master_seed: u64,
    /// Worker threads; `None` uses the machine's available parallelism.
    pub workers: Option<usize>,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            runs: DEFAULT_RUNS,
            sigma: DEFAULT_SIGMA,
            n_test: DEFAULT_N_TEST,
            loss: LossKind::Nll,
            master_seed: 0,
            workers: None,
        }
    }
}

impl SweepSettings {
    fn trial(&self, cell: &Cell, trial_index: u64) -> TrialConfig {
        TrialConfig {
            d: cell.d,
            m_s: cell.m_s,
            gamma: cell.gamma,
            sigma: self.sigma,
            n_test: self.n_test,
            loss: self.loss,
            master_seed: self.master_seed,
            trial_index,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub d: usize,
    #[serde(rename = "m_S")]
    pub m_s: u64,
    pub gamma: Gamma,
    #[serde(rename = "m_G")]
    pub m_g: u64,
    pub runs: u64,
    pub mean_gen_error: f64,
    /// Sample standard deviation over runs divided by √runs.
    pub std_error: f64,
    pub mean_train_risk: f64,
    pub mean_test_risk: f64,
    pub redraw_count: u64,
}

impl CellRecord {
    /// Aggregates outcomes given in trial-index order.
    pub fn aggregate(cell: &Cell, outcomes: &[TrialOutcome]) -> Self {
        let n = outcomes.len();
        let gen: Vec<f64> = outcomes.iter().map(|o| o.gen_error).collect();
        let train: Vec<f64> = outcomes.iter().map(|o| o.train_risk).collect();
        let test: Vec<f64> = outcomes.iter().map(|o| o.test_risk).collect();
        let mean_gen_error = pairwise_mean(&gen).unwrap_or(f64::NAN);
        let std_error = if n > 1 {
            let sq: Vec<f64> = gen.iter().map(|g| (g - mean_gen_error).powi(2)).collect();
            (pairwise_sum(&sq) / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            d: cell.d,
            m_s: cell.m_s,
            gamma: cell.gamma,
            m_g: cell.m_g(),
            runs: n as u64,
            mean_gen_error,
            std_error,
            mean_train_risk: pairwise_mean(&train).unwrap_or(f64::NAN),
            mean_test_risk: pairwise_mean(&test).unwrap_or(f64::NAN),
            redraw_count: outcomes.iter().map(|o| u64::from(o.redraws)).sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepResult {
    pub records: Vec<CellRecord>,
}

impl SweepResult {
    pub fn get(&self, d: usize, m_s: u64, gamma: Gamma) -> Option<&CellRecord> {
        self.records
            .iter()
            .find(|r| r.d == d && r.m_s == m_s && r.gamma == gamma)
    }
}

fn with_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(Error::invalid("workers", "must be at least 1"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::invalid("workers", format!("cannot start thread pool: {e}")))?;
    Ok(pool.install(job))
}

pub fn run_sweep(grid: &SweepGrid, settings: &SweepSettings) -> Result<SweepResult> {
    grid.validate()?;
    if settings.runs < 1 {
        return Err(Error::invalid("runs", "must be at least 1"));
    }
    let cells = grid.cells();
    for cell in &cells {
        settings.trial(cell, 0).validate()?;
    }
    let runs = settings.runs;
    let total = cells.len() as u64 * runs;

    let outcomes: Vec<Result<TrialOutcome>> = with_pool(settings.workers, || {
        (0..total)
            .into_par_iter()
            .map(|i| run_trial(&settings.trial(&cells[(i / runs) as usize], i % runs)))
            .collect()
    })?;
    let outcomes: Vec<TrialOutcome> = outcomes.into_iter().collect::<Result<_>>()?;

    let records = cells
        .iter()
        .zip(outcomes.chunks(runs as usize))
        .map(|(cell, chunk)| CellRecord::aggregate(cell, chunk))
        .collect();
    Ok(SweepResult { records })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub d: usize,
    #[serde(rename = "m_S")]
    pub m_s: u64,
    pub gamma: Gamma,
    #[serde(rename = "m_G")]
    pub m_g: u64,
    pub breakdown: BoundBreakdown,
    pub mode: BoundMode,
    /// `None` in predict mode, where the bound does not depend on δ.
    pub delta: Option<f64>,
}

/// bGMM bound for every cell of `grid`, sorted like [`run_sweep`].
pub fn predict_sweep(grid: &SweepGrid, delta: f64, bound: &BgmmBound) -> Result<Vec<BoundRecord>> {
    grid.validate()?;
    grid.cells()
        .iter()
        .map(|cell| {
            let m_g = cell.m_g();
            Ok(BoundRecord {
                d: cell.d,
                m_s: cell.m_s,
                gamma: cell.gamma,
                m_g,
                breakdown: bound.eval(cell.d, cell.m_s, m_g, delta)?,
                mode: bound.mode,
                delta: match bound.mode {
                    BoundMode::HighProb => Some(delta),
                    BoundMode::Predict => None,
                },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::eval_bgmm_bound;
    use std::collections::HashSet;

    #[test]
    fn degenerate_noise_gives_zero_gap() {
        let mut cfg = TrialConfig::new(1, 20, Gamma::ZERO);
        cfg.sigma = 1e-6;
        cfg.loss = LossKind::ZeroOne;
        let out = run_trial(&cfg).unwrap();
        assert_eq!((out.train_risk, out.test_risk, out.gen_error), (0.0, 0.0, 0.0));
    }

    #[test]
    fn trial_is_deterministic() {
        let mut cfg = TrialConfig::new(3, 10, Gamma::integer(5));
        cfg.master_seed = 42;
        cfg.trial_index = 17;
        cfg.n_test = 500;
        let a = run_trial(&cfg).unwrap();
        let b = run_trial(&cfg).unwrap();
        assert_eq!(a.gen_error.to_bits(), b.gen_error.to_bits());
        assert_eq!(a, b);
    }

    #[test]
    fn redraws_happen_at_tiny_m_s() {
        let total: u32 = (0..200)
            .map(|t| {
                let mut cfg = TrialConfig::new(1, 4, Gamma::integer(1));
                cfg.n_test = 10;
                cfg.trial_index = t;
                run_trial(&cfg).unwrap().redraws
            })
            .sum();
        // P(class with < 2 points) = 10/16 at m_S = 4
        assert!(total > 100, "{total}");
    }

    #[test]
    fn impossible_redraw_aborts() {
        let mut cfg = TrialConfig::new(1, 2, Gamma::integer(1));
        cfg.n_test = 10;
        assert!(matches!(
            run_trial(&cfg),
            Err(Error::RedrawExhausted { attempts: 1000, .. })
        ));
    }

    #[test]
    fn cells_are_sorted_and_deduped() {
        let g = SweepGrid::new(vec![5, 1], vec![40, 10, 40], vec![Gamma::integer(2), Gamma::ZERO]);
        let cells = g.cells();
        assert_eq!(cells.len(), 8);
        assert!(cells.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(
            cells[0],
            Cell {
                d: 1,
                m_s: 10,
                gamma: Gamma::ZERO
            }
        );
    }

    #[test]
    fn single_cell_sweep_matches_trial() {
        let grid = SweepGrid::new(vec![2], vec![15], vec![Gamma::integer(1)]);
        let settings = SweepSettings {
            runs: 1,
            n_test: 300,
            master_seed: 9,
            workers: Some(1),
            ..SweepSettings::default()
        };
        let res = run_sweep(&grid, &settings).unwrap();
        let mut cfg = TrialConfig::new(2, 15, Gamma::integer(1));
        cfg.n_test = 300;
        cfg.master_seed = 9;
        let t = run_trial(&cfg).unwrap();
        let r = &res.records[0];
        assert_eq!(r.mean_gen_error, t.gen_error);
        assert_eq!(r.mean_train_risk, t.train_risk);
        assert_eq!(r.mean_test_risk, t.test_risk);
        assert_eq!(r.std_error, 0.0);
        assert_eq!(r.redraw_count, u64::from(t.redraws));
        assert_eq!((r.runs, r.m_g), (1, 15));
    }

    #[test]
    fn worker_count_does_not_matter() {
        let grid = SweepGrid::new(vec![1, 3], vec![10, 30], vec![Gamma::ZERO, Gamma::integer(2)]);
        let base = SweepSettings {
            runs: 25,
            n_test: 200,
            master_seed: 5,
            ..SweepSettings::default()
        };
        let one = run_sweep(
            &grid,
            &SweepSettings {
                workers: Some(1),
                ..base
            },
        )
        .unwrap();
        let many = run_sweep(
            &grid,
            &SweepSettings {
                workers: Some(8),
                ..base
            },
        )
        .unwrap();
        assert_eq!(one, many);
        assert!(one
            .records
            .iter()
            .all(|r| r.runs == 25 && r.mean_gen_error >= 0.0 && r.std_error >= 0.0));
    }

    #[test]
    fn sweep_validation() {
        let s = SweepSettings::default();
        assert!(run_sweep(&SweepGrid::new(vec![], vec![10], vec![Gamma::ZERO]), &s).is_err());
        let g = SweepGrid::new(vec![1], vec![10], vec![Gamma::ZERO]);
        assert!(run_sweep(&g, &SweepSettings { runs: 0, ..s }).is_err());
        assert!(run_sweep(&g, &SweepSettings { workers: Some(0), ..s }).is_err());
        assert!(run_sweep(&g, &SweepSettings { sigma: 0.0, ..s }).is_err());
    }

    #[test]
    fn trial_seeds_do_not_collide() {
        let mut seen = HashSet::new();
        let gammas = [0, 1, 2, 5, 10, 20, 50].map(Gamma::integer);
        let mut cells = Vec::new();
        for m_s in [20, 50, 100, 200, 500, 40, 10] {
            for d in [1, 2, 10, 25, 50, 100] {
                for g in gammas {
                    cells.push((d, m_s, g));
                }
            }
        }
        for (d, m_s, gamma) in cells {
            for t in 0..1000 {
                let mut cfg = TrialConfig::new(d, m_s, gamma);
                cfg.trial_index = t;
                cfg.master_seed = 2024;
                assert!(seen.insert(cfg.trial_seed()));
            }
        }
    }

    #[test]
    fn predict_sweep_matches_direct_call() {
        let grid = SweepGrid::new(vec![1], vec![40], vec![Gamma::ZERO]);
        let rows = predict_sweep(&grid, 0.05, &BgmmBound::new(BoundMode::Predict)).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(
            rows[0].breakdown,
            eval_bgmm_bound(1, 40, 0, 0.05, BoundMode::Predict).unwrap()
        );
        assert_eq!(rows[0].delta, None);

        let hp = predict_sweep(&grid, 0.05, &BgmmBound::new(BoundMode::HighProb)).unwrap();
        assert_eq!(hp[0].delta, Some(0.05));
    }

    #[test]
    fn aggregate_statistics() {
        let cell = Cell {
            d: 1,
            m_s: 10,
            gamma: Gamma::ZERO,
        };
        let outs: Vec<TrialOutcome> = [1.0, 2.0, 3.0, 6.0]
            .iter()
            .map(|&g| TrialOutcome {
                gen_error: g,
                train_risk: 0.0,
                test_risk: g,
                redraws: 1,
            })
            .collect();
        let r = CellRecord::aggregate(&cell, &outs);
        assert_eq!(r.mean_gen_error, 3.0);
        // sample variance = (4 + 1 + 0 + 9) / 3
        assert!((r.std_error - (14.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(r.redraw_count, 4);
    }
}
