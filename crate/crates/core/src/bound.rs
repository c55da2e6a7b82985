//! Stability-based generalization bounds with every hidden constant set to 1.
//!
//! * [`eval_theorem2`]: classical i.i.d. bound
//!   `log(m)·β·log(1/δ) + M·√(log(1/δ)/m)`.
//! * [`eval_theorem3`]: the augmented-set bound from abstract inputs
//!   (`M`, `β_{m_T}`, `d_TV(D, D_G(S))`, `𝒯(m_S, m_G)`, `δ`).
//! * [`eval_bgmm_bound`]: the explicit five-term bound for the binary Gaussian
//!   mixture, either verbatim ([`BoundMode::HighProb`]) or with every
//!   `log(a/δ)` replaced by `log(a)` (or `1` when `a = 1`) to obtain a
//!   δ-free trend predictor ([`BoundMode::Predict`]).
//! * [`optimal_mg`]: grid search for the augmentation ratio minimizing the
//!   bGMM bound.
//!
//! Logs are natural and `0·log 0 = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::Gamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundMode {
    HighProb,
    #[default]
    Predict,
}

impl BoundMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundMode::HighProb => "high-prob",
            BoundMode::Predict => "predict",
        }
    }
}

/// Cap applied to the TV-derived factors of the bGMM bound.
///
/// [`CapRule::Max`] is `max(1, x)`, the form the explicit bound is written in;
/// [`CapRule::Min`] is `min(1, x)`, the natural cap for a quantity bounding a
/// total-variation distance. `Max` is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapRule {
    #[default]
    Max,
    Min,
}

impl CapRule {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            CapRule::Max => x.max(1.0),
            CapRule::Min => x.min(1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub m_s: u64,
    pub m_g: u64,
    /// M: bound on the loss.
    pub loss_bound: f64,
    /// β at m_T = m_S + m_G.
    pub beta: f64,
    /// d_TV(D, D_G(S)).
    pub tv: f64,
    /// 𝒯(m_S, m_G).
    pub tau: f64,
    pub delta: f64,
}

impl BoundInputs {
    pub fn validate(&self) -> Result<()> {
        if self.m_s < 1 {
            return Err(Error::invalid("m_S", "must be at least 1"));
        }
        check_loss_bound(self.loss_bound)?;
        check_nonneg("beta", self.beta)?;
        check_nonneg("tau", self.tau)?;
        if !(0.0..=1.0).contains(&self.tv) {
            return Err(Error::invalid("tv", format!("must lie in [0, 1], got {}", self.tv)));
        }
        check_delta(self.delta)
    }
}

/// Sum of three nonnegative terms; `total` is computed as
/// `(divergence_term + sqrt_term) + log_term`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundBreakdown {
    pub divergence_term: f64,
    pub sqrt_term: f64,
    pub log_term: f64,
    pub total: f64,
}

impl BoundBreakdown {
    pub fn from_terms(divergence_term: f64, sqrt_term: f64, log_term: f64) -> Self {
        Self {
            divergence_term,
            sqrt_term,
            log_term,
            total: divergence_term + sqrt_term + log_term,
        }
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("delta", format!("must lie in (0, 1), got {delta}")))
    }
}

fn check_loss_bound(m: f64) -> Result<()> {
    if m.is_finite() && m > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("loss_bound", format!("must be positive, got {m}")))
    }
}

fn check_nonneg(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and nonnegative, got {v}")))
    }
}

/// `x·ln x` with `0·ln 0 = 0`.
fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

fn classical_terms(m: f64, loss_bound: f64, beta: f64, delta: f64) -> BoundBreakdown {
    let l = -delta.ln();
    BoundBreakdown::from_terms(0.0, loss_bound * (l / m).sqrt(), m.ln() * beta * l)
}

/// `m` is real-valued so the bound can be probed between integers.
pub fn eval_theorem2(m: f64, loss_bound: f64, beta: f64, delta: f64) -> Result<BoundBreakdown> {
    if !(m.is_finite() && m >= 1.0) {
        return Err(Error::invalid("m", format!("must be at least 1, got {m}")));
    }
    check_loss_bound(loss_bound)?;
    check_nonneg("beta", beta)?;
    check_delta(delta)?;
    Ok(classical_terms(m, loss_bound, beta, delta))
}

/// General three-term form, without the `m_G = 0` collapse.
fn theorem3_terms(inp: &BoundInputs) -> BoundBreakdown {
    let (ms, mg) = (inp.m_s as f64, inp.m_g as f64);
    let mt = ms + mg;
    let l = -inp.delta.ln();
    let (big_m, beta) = (inp.loss_bound, inp.beta);
    let divergence = mg / mt * big_m * inp.tv;
    let sqrt_term = (big_m * (ms.sqrt() + mg.sqrt()) + ms * mg.sqrt() * beta) / mt * l.sqrt();
    let log_term = (beta * (xlogx(ms) + xlogx(mg)) + xlogx(ms) * big_m * inp.tau) / mt * l;
    BoundBreakdown::from_terms(divergence, sqrt_term, log_term)
}

/// With no synthetic samples the divergence weight `m_G/m_T` vanishes and the
/// synthetic product measure `D_G^0(S)` is a point mass, so `𝒯 = 0` whatever
/// value was supplied; the display then collapses algebraically to the
/// classical bound at `m = m_S`, which is evaluated in that form so the two
/// agree bit for bit.
pub fn eval_theorem3(inputs: &BoundInputs) -> Result<BoundBreakdown> {
    inputs.validate()?;
    if inputs.m_g == 0 {
        return Ok(classical_terms(
            inputs.m_s as f64,
            inputs.loss_bound,
            inputs.beta,
            inputs.delta,
        ));
    }
    Ok(theorem3_terms(inputs))
}

/// Evaluator for the explicit bGMM bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BgmmBound {
    pub mode: BoundMode,
    pub cap: CapRule,
}

impl BgmmBound {
    pub fn new(mode: BoundMode) -> Self {
        Self {
            mode,
            cap: CapRule::Max,
        }
    }

    pub fn with_cap(mut self, cap: CapRule) -> Self {
        self.cap = cap;
        self
    }

    /// `log(a/δ)`, or its predictor substitute.
    fn log_over_delta(&self, a: f64, delta: f64) -> f64 {
        match self.mode {
            BoundMode::HighProb => (a / delta).ln(),
            BoundMode::Predict if a != 1.0 => a.ln(),
            BoundMode::Predict => 1.0,
        }
    }

    pub fn eval(&self, d: usize, m_s: u64, m_g: u64, delta: f64) -> Result<BoundBreakdown> {
        if d < 1 {
            return Err(Error::invalid("d", "must be at least 1"));
        }
        if m_s < 1 {
            return Err(Error::invalid("m_S", "must be at least 1"));
        }
        check_delta(delta)?;

        let (d, ms, mg) = (d as f64, m_s as f64, m_g as f64);
        let mt = ms + mg;
        let log_inv_delta = self.log_over_delta(1.0, delta);
        let width = d + self.log_over_delta(mt, delta);

        let tv_factor = self.cap.apply((d / ms * self.log_over_delta(d, delta)).sqrt());
        let tau_factor = self
            .cap
            .apply((mg * d).sqrt() / ms * self.log_over_delta(ms * d, delta));

        let t1 = mg / mt * width * tv_factor;
        let t2 = (ms.sqrt() + mg.sqrt()) / mt * width * log_inv_delta.sqrt();
        let t3 = ms * mg.sqrt() / (mt * mt) * width * log_inv_delta.sqrt();
        let t4 = (xlogx(ms) + xlogx(mg)) / (mt * mt) * width * log_inv_delta;
        let t5 = xlogx(ms) / mt * width * tau_factor * log_inv_delta;

        Ok(BoundBreakdown::from_terms(t1, t2 + t3, t4 + t5))
    }
}

/// Explicit bGMM bound with the default `max(1, ·)` cap.
pub fn eval_bgmm_bound(d: usize, m_s: u64, m_g: u64, delta: f64, mode: BoundMode) -> Result<BoundBreakdown> {
    BgmmBound::new(mode).eval(d, m_s, m_g, delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalAugmentation {
    pub gamma: Gamma,
    #[serde(rename = "m_G")]
    pub m_g: u64,
    pub bound: BoundBreakdown,
}

/// Grid point with the smallest bGMM bound; ties go to the smallest γ.
pub fn optimal_mg(
    bound: &BgmmBound,
    d: usize,
    m_s: u64,
    delta: f64,
    gamma_grid: &[Gamma],
) -> Result<OptimalAugmentation> {
    let mut best: Option<OptimalAugmentation> = None;
    for &gamma in gamma_grid {
        let m_g = gamma.synthetic_count(m_s);
        let b = bound.eval(d, m_s, m_g, delta)?;
        let better = match &best {
            None => true,
            Some(cur) => b.total < cur.bound.total || (b.total == cur.bound.total && gamma < cur.gamma),
        };
        if better {
            best = Some(OptimalAugmentation { gamma, m_g, bound: b });
        }
    }
    best.ok_or(Error::EmptyGrid)
}
