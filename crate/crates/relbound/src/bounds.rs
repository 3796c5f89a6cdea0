//! Closed-form risk bounds, evaluated as auditable per-term reports.
//!
//! Every bound is the delta-parameterized solved form of a tail inequality:
//! the report carries each named addend, the inputs it was computed from, and
//! the exact total (the sum of the terms). The dependency structure enters
//! through `rho`, the maximum instance frequency: the chromatic number of the
//! dependency graph is at most `rho + 1`, and the concentration terms scale
//! with `sqrt(rho / m)` or `sqrt((rho + 1) / 2m)`.
//!
//! Nothing here clips or repairs bad inputs; a report is a certificate, so
//! out-of-range `delta`, `gamma`, `lambda` or trace values are hard errors.

use crate::rng::rng_from_seed;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BoundError {
    #[error("delta must lie in (0, 1), got {delta}")]
    BadDelta { delta: f64 },
    #[error("gamma must be positive and finite, got {gamma}")]
    BadGamma { gamma: f64 },
    #[error("lambda must be positive and finite, got {lambda}")]
    BadLambda { lambda: f64 },
    #[error("beta must be non-negative and finite, got {beta}")]
    BadBeta { beta: f64 },
    #[error("loss bound M must be positive and finite, got {loss_bound}")]
    BadLossBound { loss_bound: f64 },
    #[error("norm bound B must be positive and finite, got {norm_bound}")]
    BadNormBound { norm_bound: f64 },
    #[error("empirical risk must be non-negative and finite, got {remp}")]
    BadRemp { remp: f64 },
    #[error("need m >= 1")]
    EmptyTrainingSet,
    #[error("need rho >= 1 (at least one example touches an instance)")]
    ZeroRho,
    #[error("need n >= 2")]
    TooFewInstances,
    #[error("Gram trace {trace} exceeds m * B^2 = {cap}")]
    TraceExceedsBound { trace: f64, cap: f64 },
    #[error("negative Gram trace {trace}")]
    NegativeTrace { trace: f64 },
    #[error("uniform-subsampling bound requires m >= n/2, got m = {m}, n = {n}")]
    PreconditionMNotBigEnough { m: usize, n: usize },
    #[error("rademacher mc: {0}")]
    BadMcInput(String),
}

/// One named addend of a bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTerm {
    pub name: String,
    pub value: f64,
}

/// Inputs a bound was evaluated from; unused fields stay `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loss_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub remp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rad: Option<f64>,
    /// Degree-concentration factor of the uniform-subsampling bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree_factor: Option<f64>,
}

/// An evaluated bound: named terms, their exact sum, and the inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_name: String,
    pub inputs: BoundInputs,
    pub terms: Vec<BoundTerm>,
    pub total: f64,
    pub valid: bool,
}

impl BoundReport {
    fn new(name: &str, inputs: BoundInputs, terms: Vec<(&str, f64)>) -> Self {
        let terms: Vec<BoundTerm> = terms
            .into_iter()
            .map(|(name, value)| BoundTerm {
                name: name.to_string(),
                value,
            })
            .collect();
        let total = terms.iter().map(|t| t.value).sum();
        BoundReport {
            bound_name: name.to_string(),
            inputs,
            terms,
            total,
            valid: true,
        }
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }
}

fn check_delta(delta: f64) -> Result<(), BoundError> {
    if !(delta.is_finite() && delta > 0.0 && delta < 1.0) {
        return Err(BoundError::BadDelta { delta });
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<(), BoundError> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(BoundError::BadGamma { gamma });
    }
    Ok(())
}

fn check_remp(remp: f64) -> Result<(), BoundError> {
    if !(remp.is_finite() && remp >= 0.0) {
        return Err(BoundError::BadRemp { remp });
    }
    Ok(())
}

fn check_m(m: usize) -> Result<(), BoundError> {
    if m == 0 {
        return Err(BoundError::EmptyTrainingSet);
    }
    Ok(())
}

/// Constructive upper bound on the chromatic number of the dependency graph:
/// `rho + 1`. With no shared instances (`rho = 0`) a single class suffices.
pub fn chromatic_bound(rho: usize) -> usize {
    rho + 1
}

/// Generic Rademacher risk bound for `[0, 1]`-valued function classes:
/// `remp + rad + sqrt((rho + 1) / (2m) * ln(1/delta))`.
pub fn rad_generic_bound(
    remp: f64,
    rad: f64,
    rho: usize,
    m: usize,
    delta: f64,
) -> Result<BoundReport, BoundError> {
    check_remp(remp)?;
    check_m(m)?;
    check_delta(delta)?;
    if !(rad.is_finite() && rad >= 0.0) {
        return Err(BoundError::BadMcInput(format!(
            "rademacher complexity must be >= 0, got {rad}"
        )));
    }
    let tail = ((rho as f64 + 1.0) / (2.0 * m as f64) * (1.0 / delta).ln()).sqrt();
    Ok(BoundReport::new(
        "rad-generic",
        BoundInputs {
            m: Some(m),
            rho: Some(rho),
            delta: Some(delta),
            remp: Some(remp),
            rad: Some(rad),
            ..Default::default()
        },
        vec![
            ("empirical_risk", remp),
            ("rademacher_complexity", rad),
            ("chromatic_tail", tail),
        ],
    ))
}

/// Rademacher complexity of a norm-ball kernel class from the Gram trace:
/// `trace_term = 4 sqrt(tr K) / (gamma m)`, relaxed via `tr K <= m B^2` to
/// `4 B / (gamma sqrt(m))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceBound {
    pub trace_term: f64,
    pub relaxed: f64,
}

pub fn kernel_rademacher_trace_bound(
    gram_trace: f64,
    m: usize,
    gamma: f64,
    norm_bound: f64,
) -> Result<TraceBound, BoundError> {
    check_m(m)?;
    check_gamma(gamma)?;
    if !(norm_bound.is_finite() && norm_bound > 0.0) {
        return Err(BoundError::BadNormBound { norm_bound });
    }
    if !gram_trace.is_finite() || gram_trace < 0.0 {
        return Err(BoundError::NegativeTrace { trace: gram_trace });
    }
    let cap = m as f64 * norm_bound * norm_bound;
    // Tolerate only rounding noise above the analytic cap.
    if gram_trace > cap * (1.0 + 1e-9) + 1e-12 {
        return Err(BoundError::TraceExceedsBound {
            trace: gram_trace,
            cap,
        });
    }
    Ok(TraceBound {
        trace_term: 4.0 * gram_trace.sqrt() / (gamma * m as f64),
        relaxed: 4.0 * norm_bound / (gamma * (m as f64).sqrt()),
    })
}

/// Kernel-class risk bound under the ramp loss:
/// `remp_gamma + 4B / (gamma sqrt(m)) + sqrt((rho + 1) / (2m) * ln(1/delta))`.
pub fn rad_kernel_bound(
    remp_gamma: f64,
    norm_bound: f64,
    gamma: f64,
    rho: usize,
    m: usize,
    delta: f64,
) -> Result<BoundReport, BoundError> {
    check_remp(remp_gamma)?;
    check_m(m)?;
    check_gamma(gamma)?;
    check_delta(delta)?;
    if !(norm_bound.is_finite() && norm_bound > 0.0) {
        return Err(BoundError::BadNormBound { norm_bound });
    }
    let complexity = 4.0 * norm_bound / (gamma * (m as f64).sqrt());
    let tail = ((rho as f64 + 1.0) / (2.0 * m as f64) * (1.0 / delta).ln()).sqrt();
    Ok(BoundReport::new(
        "rad-kernel",
        BoundInputs {
            m: Some(m),
            rho: Some(rho),
            delta: Some(delta),
            gamma: Some(gamma),
            norm_bound: Some(norm_bound),
            remp: Some(remp_gamma),
            ..Default::default()
        },
        vec![
            ("empirical_ramp_risk", remp_gamma),
            ("kernel_complexity", complexity),
            ("chromatic_tail", tail),
        ],
    ))
}

/// Stability risk bound for a loss bounded by `loss_bound`:
/// `remp + 4 rho beta + (4 m beta + M) sqrt(rho / m * ln(1/delta))`.
pub fn stab_generic_bound(
    remp: f64,
    beta: f64,
    rho: usize,
    m: usize,
    loss_bound: f64,
    delta: f64,
) -> Result<BoundReport, BoundError> {
    check_remp(remp)?;
    check_m(m)?;
    check_delta(delta)?;
    if rho == 0 {
        return Err(BoundError::ZeroRho);
    }
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(BoundError::BadBeta { beta });
    }
    if !(loss_bound.is_finite() && loss_bound > 0.0) {
        return Err(BoundError::BadLossBound { loss_bound });
    }
    let mf = m as f64;
    let rhof = rho as f64;
    let stability = 4.0 * rhof * beta;
    let tail = (4.0 * mf * beta + loss_bound) * (rhof / mf * (1.0 / delta).ln()).sqrt();
    Ok(BoundReport::new(
        "stab-generic",
        BoundInputs {
            m: Some(m),
            rho: Some(rho),
            delta: Some(delta),
            beta: Some(beta),
            loss_bound: Some(loss_bound),
            remp: Some(remp),
            ..Default::default()
        },
        vec![
            ("empirical_risk", remp),
            ("stability_bias", stability),
            ("concentration_tail", tail),
        ],
    ))
}

/// Stability risk bound under the ramp loss, for classification stability
/// `beta`: substitutes `beta / gamma` and `M = 1` into the generic bound.
pub fn stab_ramp_bound(
    remp_gamma: f64,
    beta: f64,
    gamma: f64,
    rho: usize,
    m: usize,
    delta: f64,
) -> Result<BoundReport, BoundError> {
    check_gamma(gamma)?;
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(BoundError::BadBeta { beta });
    }
    let mut report = stab_generic_bound(remp_gamma, beta / gamma, rho, m, 1.0, delta)?;
    report.bound_name = "stab-ramp".to_string();
    report.inputs.gamma = Some(gamma);
    report.inputs.beta = Some(beta);
    report.terms[0].name = "empirical_ramp_risk".to_string();
    Ok(report)
}

/// SVM risk bound: the ramp stability bound at `gamma = 1` with the certified
/// classification stability `beta = B^2 / (2 lambda m)`, i.e.
/// `remp_hinge + 2 rho B^2 / (lambda m) + (2 B^2 / lambda + 1) sqrt(rho / m * ln(1/delta))`.
pub fn stab_svm_bound(
    remp_hinge: f64,
    norm_bound: f64,
    lambda: f64,
    rho: usize,
    m: usize,
    delta: f64,
) -> Result<BoundReport, BoundError> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(BoundError::BadLambda { lambda });
    }
    if !(norm_bound.is_finite() && norm_bound > 0.0) {
        return Err(BoundError::BadNormBound { norm_bound });
    }
    check_m(m)?;
    let beta = norm_bound * norm_bound / (2.0 * lambda * m as f64);
    let mut report = stab_ramp_bound(remp_hinge, beta, 1.0, rho, m, delta)?;
    report.bound_name = "stab-svm".to_string();
    report.inputs.lambda = Some(lambda);
    report.inputs.norm_bound = Some(norm_bound);
    report.terms[0].name = "empirical_hinge_risk".to_string();
    Ok(report)
}

/// High-probability bound on the maximum degree of a uniform random graph
/// with `n` vertices and `m` edges:
/// `(2m/n) (1 + sqrt(3n/(2m) * ln(n/delta)))`.
pub fn er_max_degree_bound(n: usize, m: usize, delta: f64) -> Result<f64, BoundError> {
    if n < 2 {
        return Err(BoundError::TooFewInstances);
    }
    check_m(m)?;
    check_delta(delta)?;
    let nf = n as f64;
    let mf = m as f64;
    let mean_degree = 2.0 * mf / nf;
    Ok(mean_degree * (1.0 + (3.0 * nf / (2.0 * mf) * (nf / delta).ln()).sqrt()))
}

/// Kernel-class risk bound under uniform random subsampling of `m >= n/2`
/// pairs: `remp_gamma + sqrt(32) B / (gamma sqrt(n)) +
/// sqrt((C + 1)/n * ln(2/delta))` with
/// `C = 1 + sqrt(3n/(2m) * ln(2n/delta))`.
pub fn er_rad_kernel_bound(
    remp_gamma: f64,
    norm_bound: f64,
    gamma: f64,
    n: usize,
    m: usize,
    delta: f64,
) -> Result<BoundReport, BoundError> {
    check_remp(remp_gamma)?;
    check_gamma(gamma)?;
    check_delta(delta)?;
    if n < 2 {
        return Err(BoundError::TooFewInstances);
    }
    if 2 * m < n {
        return Err(BoundError::PreconditionMNotBigEnough { m, n });
    }
    if !(norm_bound.is_finite() && norm_bound > 0.0) {
        return Err(BoundError::BadNormBound { norm_bound });
    }
    let nf = n as f64;
    let mf = m as f64;
    let degree_factor = 1.0 + (3.0 * nf / (2.0 * mf) * (2.0 * nf / delta).ln()).sqrt();
    let complexity = 32f64.sqrt() * norm_bound / (gamma * nf.sqrt());
    let tail = ((degree_factor + 1.0) / nf * (2.0 / delta).ln()).sqrt();
    Ok(BoundReport::new(
        "er-rad-kernel",
        BoundInputs {
            n: Some(n),
            m: Some(m),
            delta: Some(delta),
            gamma: Some(gamma),
            norm_bound: Some(norm_bound),
            remp: Some(remp_gamma),
            degree_factor: Some(degree_factor),
            ..Default::default()
        },
        vec![
            ("empirical_ramp_risk", remp_gamma),
            ("kernel_complexity", complexity),
            ("degree_adjusted_tail", tail),
        ],
    ))
}

/// A vector of fair-coin signs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RademacherDraw {
    pub signs: Vec<i8>,
    pub seed: u64,
}

impl RademacherDraw {
    pub fn sample(m: usize, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let signs = (0..m)
            .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
            .collect();
        RademacherDraw { signs, seed }
    }
}

/// Monte-Carlo empirical Rademacher complexity of the norm-ball linear class
/// `{z -> <w, z> : ||w|| <= cap}` over the given feature vectors: the inner
/// supremum has the closed form `cap * ||sum_i sigma_i phi_i||`, so each draw
/// contributes `(2/m) * cap * ||sum_i sigma_i phi_i||`.
pub fn empirical_rademacher_mc(
    features: &[Vec<f64>],
    cap: f64,
    draws: usize,
    seed: u64,
) -> Result<crate::learner::RiskEstimate, BoundError> {
    if features.is_empty() {
        return Err(BoundError::EmptyTrainingSet);
    }
    if !(cap.is_finite() && cap > 0.0) {
        return Err(BoundError::BadMcInput(format!(
            "norm cap must be positive, got {cap}"
        )));
    }
    if draws == 0 {
        return Err(BoundError::BadMcInput("need at least one draw".into()));
    }
    let dim = features[0].len();
    if features.iter().any(|f| f.len() != dim) {
        return Err(BoundError::BadMcInput("mixed feature dimensions".into()));
    }
    let m = features.len();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for draw_idx in 0..draws {
        let draw = RademacherDraw::sample(m, crate::rng::derive_seed(seed, draw_idx as u64));
        let mut acc = vec![0.0; dim];
        for (sigma, phi) in draw.signs.iter().zip(features) {
            let s = f64::from(*sigma);
            for (a, x) in acc.iter_mut().zip(phi) {
                *a += s * x;
            }
        }
        let norm = acc.iter().map(|x| x * x).sum::<f64>().sqrt();
        let value = 2.0 / m as f64 * cap * norm;
        sum += value;
        sum_sq += value * value;
    }
    let n = draws as f64;
    let mean = sum / n;
    let std_error = if draws > 1 {
        (((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) / n).sqrt()
    } else {
        0.0
    };
    Ok(crate::learner::RiskEstimate {
        value: mean,
        kind: None,
        sample_size: draws,
        std_error: Some(std_error),
    })
}
