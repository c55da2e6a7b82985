//! Conditional Gaussian generator fit on the real set and used for augmentation.
//!
//! Estimators:
//!
//! ```text
//! μ̂_y  = Σ_{yᵢ=y} xᵢ / m_y
//! σ̂²_k = Σ_y (m_y / m) · Σ_{yᵢ=y} (x_{ik} − μ̂_{yk})² / (m_y − 1)
//! ```
//!
//! Synthetic points: `y ~ uniform{−1,+1}`, `x | y ~ N(μ̂_y, diag(σ̂²))`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::gamma::Gamma;
use crate::mixture::{Label, LabeledDataset, LabeledPoint, Source};
use crate::rng::RngKey;
use crate::sum::pairwise_sum;

#[derive(Debug, Clone, PartialEq)]
pub struct FittedGenerator {
    mean_pos: Vec<f64>,
    mean_neg: Vec<f64>,
    var_diag: Vec<f64>,
    class_counts: (usize, usize),
}

impl FittedGenerator {
    /// Builds a generator from explicit parameters; `class_counts` is informational.
    pub fn new(
        mean_pos: Vec<f64>,
        mean_neg: Vec<f64>,
        var_diag: Vec<f64>,
        class_counts: (usize, usize),
    ) -> Result<Self> {
        let d = mean_pos.len();
        if d == 0 {
            return Err(Error::invalid("dim", "must be at least 1"));
        }
        for found in [mean_neg.len(), var_diag.len()] {
            if found != d {
                return Err(Error::DimensionMismatch { expected: d, found });
            }
        }
        if let Some((index, &value)) = var_diag
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::invalid(
                "var_diag",
                format!("entry {index} must be finite and nonnegative, got {value}"),
            ));
        }
        Ok(Self {
            mean_pos,
            mean_neg,
            var_diag,
            class_counts,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean_pos.len()
    }

    pub fn mean(&self, y: Label) -> &[f64] {
        match y {
            Label::Positive => &self.mean_pos,
            Label::Negative => &self.mean_neg,
        }
    }

    pub fn mean_pos(&self) -> &[f64] {
        &self.mean_pos
    }

    pub fn mean_neg(&self) -> &[f64] {
        &self.mean_neg
    }

    pub fn var_diag(&self) -> &[f64] {
        &self.var_diag
    }

    /// (m₊, m₋) of the fitting set.
    pub fn class_counts(&self) -> (usize, usize) {
        self.class_counts
    }
}

pub fn fit_conditional_gmm(data: &LabeledDataset) -> Result<FittedGenerator> {
    let dim = data.dim()?;
    let (pos, neg): (Vec<&LabeledPoint>, Vec<&LabeledPoint>) =
        data.points().iter().partition(|p| p.y == Label::Positive);
    if pos.len() < 2 || neg.len() < 2 {
        return Err(Error::InsufficientClassData {
            positive: pos.len(),
            negative: neg.len(),
        });
    }
    let m = data.len() as f64;

    let mut scratch = Vec::with_capacity(pos.len().max(neg.len()));
    let mut class_mean = |class: &[&LabeledPoint]| -> Vec<f64> {
        (0..dim)
            .map(|k| {
                scratch.clear();
                scratch.extend(class.iter().map(|p| p.x[k]));
                pairwise_sum(&scratch) / class.len() as f64
            })
            .collect()
    };
    let mean_pos = class_mean(&pos);
    let mean_neg = class_mean(&neg);

    let mut scratch = Vec::with_capacity(pos.len().max(neg.len()));
    let mut within = |class: &[&LabeledPoint], mu: &[f64], k: usize| -> f64 {
        scratch.clear();
        scratch.extend(class.iter().map(|p| (p.x[k] - mu[k]).powi(2)));
        let m_y = class.len() as f64;
        (m_y / m) * pairwise_sum(&scratch) / (m_y - 1.0)
    };
    let var_diag = (0..dim)
        .map(|k| within(&pos, &mean_pos, k) + within(&neg, &mean_neg, k))
        .collect();

    Ok(FittedGenerator {
        mean_pos,
        mean_neg,
        var_diag,
        class_counts: (pos.len(), neg.len()),
    })
}

pub fn sample_synthetic(gen: &FittedGenerator, m_g: usize, key: impl Into<RngKey>) -> LabeledDataset {
    let mut rng = key.into().rng();
    let sd: Vec<f64> = gen.var_diag.iter().map(|v| v.sqrt()).collect();
    let points = (0..m_g)
        .map(|_| {
            let y = Label::draw(&mut rng);
            let x = gen
                .mean(y)
                .iter()
                .zip(&sd)
                .map(|(mu, s)| {
                    let g: f64 = rng.sample(StandardNormal);
                    mu + s * g
                })
                .collect();
            LabeledPoint::new(x, y, Source::Synthetic)
        })
        .collect();
    LabeledDataset::from_points(points)
}

/// `S̃ = S ∪ S_G`: the real points unchanged, followed by `round(γ·m_S)`
/// synthetic points.
pub fn augment(real: &LabeledDataset, gen: &FittedGenerator, gamma: Gamma, key: impl Into<RngKey>) -> LabeledDataset {
    let m_g = gamma.synthetic_count(real.real_count() as u64) as usize;
    let mut out = real.clone();
    out.extend(sample_synthetic(gen, m_g, key));
    out
}
