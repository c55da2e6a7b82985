//! Simulation lab for generative data augmentation on a binary Gaussian mixture.
//!
//! The pipeline: sample a real set from the ground-truth mixture
//! ([`mixture`]), fit a conditional Gaussian generator and augment
//! ([`generator`]), train the closed-form linear classifier ([`classifier`]),
//! and measure the train/test gap by Monte Carlo ([`experiment`]). Alongside
//! it sit closed-form and numeric divergences between the learned and true
//! mixtures ([`divergence`]) and evaluators for the stability-based
//! generalization bounds ([`bound`]).
//!
//! Every random draw is keyed by an explicit seed ([`rng`]), and every sum over
//! points is a pairwise sum in input order ([`sum`]), so sweeps are
//! bit-reproducible regardless of thread count.

pub mod bound;
pub mod classifier;
pub mod config;
pub mod divergence;
pub mod error;
pub mod experiment;
pub mod gamma;
pub mod generator;
pub mod mixture;
pub mod report;
pub mod rng;
pub mod sum;

pub use bound::{
    eval_bgmm_bound, eval_theorem2, eval_theorem3, optimal_mg, BgmmBound, BoundBreakdown, BoundInputs, BoundMode,
    CapRule, OptimalAugmentation,
};
pub use classifier::{empirical_risk, fit_erm, mc_true_risk, nll_loss, LinearClassifier, LossKind, RiskReport};
pub use config::{parse_config, ConfigError, ExperimentConfig};
pub use divergence::{
    kl_learned_vs_true, kl_numeric_1d, oracle_check, tv_numeric_1d, tv_pinsker, DivergenceMethod, DivergenceReport,
    IntegrationGrid,
};
pub use error::{Error, Result};
pub use experiment::{
    predict_sweep, run_sweep, run_trial, BoundRecord, Cell, CellRecord, SweepGrid, SweepResult, SweepSettings,
    TrialConfig, TrialOutcome,
};
pub use gamma::Gamma;
pub use generator::{augment, fit_conditional_gmm, sample_synthetic, FittedGenerator};
pub use mixture::{
    sample_dataset, standard_mean, zero_one_error, Label, LabeledDataset, LabeledPoint, MixtureParams, Source,
};
pub use rng::RngKey;
