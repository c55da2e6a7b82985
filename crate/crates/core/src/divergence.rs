//! KL and TV divergence between the learned mixture `D_G(S)` and the truth `D`.
//!
//! Both mixtures share the uniform label marginal, so the joint KL reduces to
//! the label-averaged KL of the class conditionals, which for diagonal
//! Gaussians against `N(yμ, σ²I)` is
//!
//! ```text
//! Σ_y ½ Σ_i ½ [ σ̂²ᵢ/σ² − 1 − ln(σ̂²ᵢ/σ²) + (μ̂_{yi} − yμᵢ)²/σ² ]
//! ```
//!
//! TV uses the half-L1 convention `d_TV = ½∫|p − q| ∈ [0, 1]`, with Pinsker's
//! inequality `d_TV ≤ √(KL/2)` (nats). The 1-D numeric routines are
//! trapezoid-rule oracles for the closed forms.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::FittedGenerator;
use crate::mixture::{Label, MixtureParams};
use crate::rng::RngKey;

const LABELS: [Label; 2] = [Label::Negative, Label::Positive];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DivergenceMethod {
    ClosedForm,
    Numeric1d,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub kl: f64,
    pub tv: f64,
    pub method: DivergenceMethod,
}

impl DivergenceReport {
    /// Closed-form KL with the Pinsker TV estimate.
    pub fn closed_form(gen: &FittedGenerator, params: &MixtureParams) -> Result<Self> {
        let kl = kl_learned_vs_true(gen, params)?;
        Ok(Self {
            kl,
            tv: tv_pinsker(kl),
            method: DivergenceMethod::ClosedForm,
        })
    }

    pub fn numeric_1d(gen: &FittedGenerator, params: &MixtureParams, grid: &IntegrationGrid) -> Result<Self> {
        Ok(Self {
            kl: kl_numeric_1d(gen, params, grid)?,
            tv: tv_numeric_1d(gen, params, grid)?,
            method: DivergenceMethod::Numeric1d,
        })
    }
}

fn check_compatible(gen: &FittedGenerator, params: &MixtureParams) -> Result<()> {
    if gen.dim() != params.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            found: gen.dim(),
        });
    }
    match gen.var_diag().iter().enumerate().find(|(_, v)| **v <= 0.0) {
        Some((index, &value)) => Err(Error::NonPositiveVariance { index, value }),
        None => Ok(()),
    }
}

/// `d_KL(D_G(S) ‖ D)` in nats.
pub fn kl_learned_vs_true(gen: &FittedGenerator, params: &MixtureParams) -> Result<f64> {
    check_compatible(gen, params)?;
    let s2 = params.noise_var();
    let mut total = 0.0;
    for y in LABELS {
        let mut per_class = 0.0;
        for (i, (&mu_hat, &v_hat)) in gen.mean(y).iter().zip(gen.var_diag()).enumerate() {
            let r = v_hat / s2;
            let dm = mu_hat - params.class_mean(y, i);
            per_class += 0.5 * (r - 1.0 - r.ln() + dm * dm / s2);
        }
        total += 0.5 * per_class;
    }
    // r − 1 − ln r ≥ 0 analytically; rounding can leave −ε.
    Ok(total.max(0.0))
}

/// Pinsker: `min(1, √(KL/2))`.
pub fn tv_pinsker(kl: f64) -> f64 {
    (kl / 2.0).sqrt().min(1.0)
}

/// Uniform trapezoid grid for the 1-D oracles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationGrid {
    nodes: usize,
    sigmas: f64,
}

impl IntegrationGrid {
    pub const MIN_NODES: usize = 200_000;

    /// `nodes` uniformly spaced points over `±(max|mean| + 10·max σ)`.
    pub fn new(nodes: usize) -> Result<Self> {
        if nodes < Self::MIN_NODES {
            return Err(Error::invalid(
                "nodes",
                format!("need at least {} nodes, got {nodes}", Self::MIN_NODES),
            ));
        }
        Ok(Self { nodes, sigmas: 10.0 })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    fn half_width(&self, gen: &FittedGenerator, params: &MixtureParams) -> f64 {
        let max_mean = [gen.mean_pos()[0], gen.mean_neg()[0], params.mean()[0]]
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        let max_sd = gen.var_diag()[0].sqrt().max(params.noise_std());
        max_mean + self.sigmas * max_sd
    }

    fn integrate(&self, half_width: f64, f: impl Fn(f64) -> f64) -> f64 {
        trapezoid(f, -half_width, half_width, self.nodes)
    }
}

impl Default for IntegrationGrid {
    fn default() -> Self {
        Self {
            nodes: 200_001,
            sigmas: 10.0,
        }
    }
}

/// Composite trapezoid rule on `nodes` equally spaced points of `[a, b]`.
pub fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, nodes: usize) -> f64 {
    assert!(nodes >= 2, "trapezoid rule needs at least two nodes");
    let n = nodes - 1;
    let h = (b - a) / n as f64;
    let interior: f64 = (1..n).map(|i| f(a + i as f64 * h)).sum();
    h * (0.5 * (f(a) + f(b)) + interior)
}

fn gaussian_log_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let z = x - mean;
    -0.5 * (2.0 * PI * var).ln() - z * z / (2.0 * var)
}

fn require_1d(gen: &FittedGenerator, params: &MixtureParams) -> Result<()> {
    if params.dim() != 1 {
        return Err(Error::UnsupportedDimension(params.dim()));
    }
    if gen.dim() != 1 {
        return Err(Error::UnsupportedDimension(gen.dim()));
    }
    check_compatible(gen, params)
}

pub fn kl_numeric_1d(gen: &FittedGenerator, params: &MixtureParams, grid: &IntegrationGrid) -> Result<f64> {
    require_1d(gen, params)?;
    let half_width = grid.half_width(gen, params);
    let (v_hat, v) = (gen.var_diag()[0], params.noise_var());
    let total = LABELS
        .iter()
        .map(|&y| {
            let (m_hat, m) = (gen.mean(y)[0], params.class_mean(y, 0));
            let per_class = grid.integrate(half_width, |x| {
                let lg = gaussian_log_pdf(x, m_hat, v_hat);
                lg.exp() * (lg - gaussian_log_pdf(x, m, v))
            });
            0.5 * per_class
        })
        .sum::<f64>();
    Ok(total)
}

/// `½ Σ_y ∫ |p_G(x, y) − p(x, y)| dx` with `p(y) = ½`.
pub fn tv_numeric_1d(gen: &FittedGenerator, params: &MixtureParams, grid: &IntegrationGrid) -> Result<f64> {
    require_1d(gen, params)?;
    let half_width = grid.half_width(gen, params);
    let (v_hat, v) = (gen.var_diag()[0], params.noise_var());
    let total = LABELS
        .iter()
        .map(|&y| {
            let (m_hat, m) = (gen.mean(y)[0], params.class_mean(y, 0));
            0.5 * grid.integrate(half_width, |x| {
                (gaussian_log_pdf(x, m_hat, v_hat).exp() - gaussian_log_pdf(x, m, v).exp()).abs()
            })
        })
        .sum::<f64>();
    Ok((0.5 * total).clamp(0.0, 1.0))
}

/// Largest accepted gap between closed-form and numeric KL in [`oracle_check`].
pub const KL_ORACLE_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleCheckRow {
    pub draw: usize,
    pub sigma: f64,
    pub var_ratio: f64,
    pub offset_pos: f64,
    pub offset_neg: f64,
    pub kl_closed: f64,
    pub kl_numeric: f64,
    pub tv_numeric: f64,
    pub tv_pinsker: f64,
}

impl OracleCheckRow {
    pub fn kl_abs_error(&self) -> f64 {
        (self.kl_closed - self.kl_numeric).abs()
    }

    pub fn passes(&self) -> bool {
        self.kl_abs_error() <= KL_ORACLE_TOLERANCE && self.tv_numeric <= self.tv_pinsker
    }
}

/// Random 1-D generators compared against the truth both ways.
///
/// Each draw picks σ ∈ [0.3, 1.5], a variance ratio σ̂²/σ² ∈ [0.5, 2] and
/// per-class mean offsets in [−σ, σ] around `±1`.
pub fn oracle_check(draws: usize, key: impl Into<RngKey>, grid: &IntegrationGrid) -> Result<Vec<OracleCheckRow>> {
    let mut rng = key.into().rng();
    (0..draws)
        .map(|draw| {
            let sigma = rng.random_range(0.3..=1.5);
            let var_ratio = rng.random_range(0.5..=2.0);
            let offset_pos = rng.random_range(-sigma..=sigma);
            let offset_neg = rng.random_range(-sigma..=sigma);
            let params = MixtureParams::new(vec![1.0], sigma * sigma)?;
            let gen = FittedGenerator::new(
                vec![1.0 + offset_pos],
                vec![-1.0 + offset_neg],
                vec![var_ratio * sigma * sigma],
                (0, 0),
            )?;
            let kl_closed = kl_learned_vs_true(&gen, &params)?;
            Ok(OracleCheckRow {
                draw,
                sigma,
                var_ratio,
                offset_pos,
                offset_neg,
                kl_closed,
                kl_numeric: kl_numeric_1d(&gen, &params, grid)?,
                tv_numeric: tv_numeric_1d(&gen, &params, grid)?,
                tv_pinsker: tv_pinsker(kl_closed),
            })
        })
        .collect()
}
