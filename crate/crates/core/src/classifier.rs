//! Linear classifier `ŷ = sign(θᵀx)` trained by closed-form ERM under the
//! Gaussian negative log-likelihood loss `ℓ(θ,(x,y)) = ‖x − yθ‖² / (2σ²)`.
//!
//! The minimizer is `θ̂ = (1/m) Σ yᵢxᵢ`. Every sum over points is a
//! [`pairwise_sum`] in input order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixture::{predict, LabeledDataset, LabeledPoint, MixtureParams};
use crate::rng::RngKey;
use crate::sum::pairwise_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossKind {
    #[default]
    Nll,
    ZeroOne,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearClassifier {
    theta: Vec<f64>,
    noise_var: f64,
}

impl LinearClassifier {
    pub fn new(theta: Vec<f64>, noise_var: f64) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::invalid("theta", "must have at least one coordinate"));
        }
        if !(noise_var.is_finite() && noise_var > 0.0) {
            return Err(Error::invalid(
                "noise_var",
                format!("must be positive, got {noise_var}"),
            ));
        }
        Ok(Self { theta, noise_var })
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    fn loss_unchecked(&self, x: &[f64], y: f64, kind: LossKind) -> f64 {
        match kind {
            LossKind::Nll => {
                let sq: f64 = x
                    .iter()
                    .zip(&self.theta)
                    .map(|(xk, tk)| {
                        let r = xk - y * tk;
                        r * r
                    })
                    .sum();
                sq / (2.0 * self.noise_var)
            }
            LossKind::ZeroOne => {
                if predict(&self.theta, x).sign() == y {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            })
        }
    }
}

/// Train/test risks of one hypothesis and their gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub train_risk: f64,
    pub test_risk: f64,
    pub gen_error: f64,
    pub loss_kind: LossKind,
}

impl RiskReport {
    pub fn new(train_risk: f64, test_risk: f64, loss_kind: LossKind) -> Self {
        Self {
            train_risk,
            test_risk,
            gen_error: (test_risk - train_risk).abs(),
            loss_kind,
        }
    }
}

/// ERM on every point of `data`, real and synthetic alike.
pub fn fit_erm(data: &LabeledDataset, noise_var: f64) -> Result<LinearClassifier> {
    let dim = data.dim()?;
    let m = data.len() as f64;
    let mut column = vec![0.0; data.len()];
    let theta = (0..dim)
        .map(|k| {
            for (c, p) in column.iter_mut().zip(data.points()) {
                *c = p.y.sign() * p.x[k];
            }
            pairwise_sum(&column) / m
        })
        .collect();
    LinearClassifier::new(theta, noise_var)
}

/// `‖x − yθ‖² / (2σ²)`.
pub fn nll_loss(clf: &LinearClassifier, point: &LabeledPoint) -> Result<f64> {
    loss(clf, point, LossKind::Nll)
}

pub fn loss(clf: &LinearClassifier, point: &LabeledPoint, kind: LossKind) -> Result<f64> {
    clf.check_dim(point.dim())?;
    Ok(clf.loss_unchecked(&point.x, point.y.sign(), kind))
}

pub fn empirical_risk(clf: &LinearClassifier, data: &LabeledDataset, kind: LossKind) -> Result<f64> {
    clf.check_dim(data.dim()?)?;
    let losses: Vec<f64> = data
        .points()
        .iter()
        .map(|p| clf.loss_unchecked(&p.x, p.y.sign(), kind))
        .collect();
    Ok(pairwise_sum(&losses) / losses.len() as f64)
}

/// Empirical risk on a fresh sample of `n_test` points from `params`.
///
/// Points are streamed through a single buffer instead of materialized, but
/// the draws and the summation order are exactly those of
/// `empirical_risk(clf, &sample_dataset(params, n_test, key), kind)`.
pub fn mc_true_risk(
    clf: &LinearClassifier,
    params: &MixtureParams,
    n_test: usize,
    key: impl Into<RngKey>,
    kind: LossKind,
) -> Result<f64> {
    if n_test == 0 {
        return Err(Error::invalid("n_test", "must be at least 1"));
    }
    clf.check_dim(params.dim())?;
    let mut rng = key.into().rng();
    let mut x = vec![0.0; params.dim()];
    let losses: Vec<f64> = (0..n_test)
        .map(|_| {
            let y = params.draw_into(&mut rng, &mut x);
            clf.loss_unchecked(&x, y.sign(), kind)
        })
        .collect();
    Ok(pairwise_sum(&losses) / n_test as f64)
}
