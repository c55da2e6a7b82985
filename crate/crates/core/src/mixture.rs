//! Ground-truth binary Gaussian mixture and labeled datasets.
//!
//! `y ~ uniform{-1, +1}`, `x | y ~ N(y·μ, σ² I_d)`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::RngKey;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Negative => -1.0,
            Label::Positive => 1.0,
        }
    }

    pub(crate) fn draw<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.random::<bool>() {
            Label::Positive
        } else {
            Label::Negative
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    Real,
    Synthetic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoint {
    pub x: Vec<f64>,
    pub y: Label,
    pub source: Source,
}

impl LabeledPoint {
    pub fn new(x: Vec<f64>, y: Label, source: Source) -> Self {
        Self { x, y, source }
    }

    pub fn real(x: Vec<f64>, y: Label) -> Self {
        Self::new(x, y, Source::Real)
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

/// Ordered points plus real/synthetic counts that always agree with the
/// source tags.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabeledDataset {
    points: Vec<LabeledPoint>,
    real_count: usize,
    synthetic_count: usize,
}

impl LabeledDataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_points(points: Vec<LabeledPoint>) -> Self {
        let real_count = points.iter().filter(|p| p.source == Source::Real).count();
        let synthetic_count = points.len() - real_count;
        Self {
            points,
            real_count,
            synthetic_count,
        }
    }

    pub fn push(&mut self, point: LabeledPoint) {
        match point.source {
            Source::Real => self.real_count += 1,
            Source::Synthetic => self.synthetic_count += 1,
        }
        self.points.push(point);
    }

    /// Appends every point of `other`, preserving order.
    pub fn extend(&mut self, other: LabeledDataset) {
        self.real_count += other.real_count;
        self.synthetic_count += other.synthetic_count;
        self.points.extend(other.points);
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    pub fn into_points(self) -> Vec<LabeledPoint> {
        self.points
    }

    /// m_S: points tagged [`Source::Real`].
    pub fn real_count(&self) -> usize {
        self.real_count
    }

    /// m_G: points tagged [`Source::Synthetic`].
    pub fn synthetic_count(&self) -> usize {
        self.synthetic_count
    }

    /// m_T = m_S + m_G.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Shared dimension of the points, checked across the whole set.
    pub fn dim(&self) -> Result<usize> {
        let first = self.points.first().ok_or(Error::EmptyDataset)?.dim();
        match self.points.iter().find(|p| p.dim() != first) {
            Some(p) => Err(Error::DimensionMismatch {
                expected: first,
                found: p.dim(),
            }),
            None => Ok(first),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureParams {
    mean: Vec<f64>,
    noise_var: f64,
}

impl MixtureParams {
    pub fn new(mean: Vec<f64>, noise_var: f64) -> Result<Self> {
        if mean.is_empty() {
            return Err(Error::invalid("dim", "must be at least 1"));
        }
        if mean.iter().any(|m| !m.is_finite()) {
            return Err(Error::invalid("mean", "entries must be finite"));
        }
        if !(noise_var.is_finite() && noise_var > 0.0) {
            return Err(Error::invalid(
                "noise_var",
                format!("must be positive, got {noise_var}"),
            ));
        }
        Ok(Self { mean, noise_var })
    }

    /// μ = (1/√d, …, 1/√d) with noise standard deviation `sigma`.
    pub fn standard(dim: usize, sigma: f64) -> Result<Self> {
        Self::new(standard_mean(dim)?, sigma * sigma)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_var.sqrt()
    }

    /// Class-conditional mean y·μ at coordinate `k`.
    pub fn class_mean(&self, y: Label, k: usize) -> f64 {
        y.sign() * self.mean[k]
    }

    /// Draws one point into `x` (which must have length `dim`): the label
    /// first, then the `d` coordinates in order.
    pub(crate) fn draw_into<R: Rng + ?Sized>(&self, rng: &mut R, x: &mut [f64]) -> Label {
        let y = Label::draw(rng);
        let s = y.sign();
        let sd = self.noise_std();
        for (xk, mk) in x.iter_mut().zip(&self.mean) {
            let g: f64 = rng.sample(StandardNormal);
            *xk = s * mk + sd * g;
        }
        y
    }
}

pub fn standard_mean(dim: usize) -> Result<Vec<f64>> {
    if dim == 0 {
        return Err(Error::invalid("dim", "must be at least 1"));
    }
    let c = 1.0 / (dim as f64).sqrt();
    Ok(vec![c; dim])
}

pub fn sample_dataset(params: &MixtureParams, n: usize, key: impl Into<RngKey>) -> LabeledDataset {
    let mut rng = key.into().rng();
    let points = (0..n)
        .map(|_| {
            let mut x = vec![0.0; params.dim()];
            let y = params.draw_into(&mut rng, &mut x);
            LabeledPoint::real(x, y)
        })
        .collect();
    LabeledDataset::from_points(points)
}

/// `sign(θᵀx)` with `sign(0) = -1`.
pub fn predict(theta: &[f64], x: &[f64]) -> Label {
    let score: f64 = theta.iter().zip(x).map(|(t, v)| t * v).sum();
    if score > 0.0 {
        Label::Positive
    } else {
        Label::Negative
    }
}

pub fn zero_one_error(theta: &[f64], data: &LabeledDataset) -> Result<f64> {
    let dim = data.dim()?;
    if theta.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: theta.len(),
        });
    }
    let wrong = data.points().iter().filter(|p| predict(theta, &p.x) != p.y).count();
    Ok(wrong as f64 / data.len() as f64)
}
