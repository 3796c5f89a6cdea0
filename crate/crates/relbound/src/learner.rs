//! Regularized pairwise classifier: losses, training, risk and stability.
//!
//! The learner minimizes `mean hinge + lambda * ||w||^2` over linear
//! hypotheses on explicit pair features. The solver is a deterministic
//! averaged projected subgradient method with step `1/(lambda * t)` and
//! projection onto `||w|| <= 1/sqrt(lambda)` (a ball that always contains the
//! minimizer, since `lambda * ||w*||^2 <= F(0) <= 1`). Its suboptimality is
//! certified, not guessed:
//!
//! * objective gap `tau_obj = G^2 (1 + ln T) / (2 lambda T)` with
//!   `G = B + 2 sqrt(lambda)` bounding every subgradient norm on the ball
//!   (the classical rate for steps `1/(lambda t)` on a `lambda`-strongly
//!   convex objective, applied to the averaged iterate);
//! * hypothesis-value slack `tau_h = B * sqrt(tau_obj / lambda)`, since the
//!   objective is `2 lambda`-strongly convex so
//!   `||w - w*|| <= sqrt(tau_obj / lambda)`.
//!
//! Stability probes report both the observed leave-one-out change and the
//! certified `B^2 / (2 lambda m)`, with `tau_h` accounting for solver slack
//! on each side.

use crate::relations::{
    draw_instance, pair_feature_map, relation_label, FeatureMode, InstanceDist, PairDataset,
    RelationSpec, RelationsError,
};
use crate::rng::rng_from_seed;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LearnerError {
    #[error("dataset has no examples")]
    EmptyDataset,
    #[error("objective became non-finite at iteration {iteration}")]
    Divergence { iteration: usize },
    #[error("ramp margin gamma must be positive and finite, got {gamma}")]
    BadGamma { gamma: f64 },
    #[error("regularization lambda must be positive and finite, got {lambda}")]
    BadLambda { lambda: f64 },
    #[error("hypothesis dimension {weights} does not match feature dimension {features}")]
    DimMismatch { weights: usize, features: usize },
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Relations(#[from] RelationsError),
}

/// The three loss functions. Zero-one and ramp are bounded by `M = 1`; hinge
/// is unbounded above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LossKind {
    ZeroOne,
    Ramp { gamma: f64 },
    Hinge,
}

impl LossKind {
    pub fn validate(&self) -> Result<(), LearnerError> {
        if let LossKind::Ramp { gamma } = self {
            if !(gamma.is_finite() && *gamma > 0.0) {
                return Err(LearnerError::BadGamma { gamma: *gamma });
            }
        }
        Ok(())
    }

    /// Upper bound on the loss value, when one exists.
    pub fn upper_bound(&self) -> Option<f64> {
        match self {
            LossKind::ZeroOne | LossKind::Ramp { .. } => Some(1.0),
            LossKind::Hinge => None,
        }
    }
}

/// Sign convention: 0 predicts +1, so the decision rule is total.
pub fn sign(value: f64) -> i8 {
    if value < 0.0 {
        -1
    } else {
        1
    }
}

/// Loss of a real-valued prediction against a label in `{-1, +1}`.
pub fn loss(kind: LossKind, y: i8, value: f64) -> Result<f64, LearnerError> {
    kind.validate()?;
    Ok(loss_unchecked(kind, y, value))
}

fn loss_unchecked(kind: LossKind, y: i8, value: f64) -> f64 {
    let margin = f64::from(y) * value;
    match kind {
        LossKind::ZeroOne => {
            if sign(value) != y {
                1.0
            } else {
                0.0
            }
        }
        LossKind::Ramp { gamma } => (1.0 - margin / gamma).clamp(0.0, 1.0),
        LossKind::Hinge => (1.0 - margin).max(0.0),
    }
}

/// Linear hypothesis over pair features; prediction is `sign(<w, phi(z)>)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub weights: Vec<f64>,
    pub feature_mode: FeatureMode,
    /// Margin scale used when this hypothesis is evaluated under the ramp
    /// loss; kept with the serialized artifact, not used by prediction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

impl Hypothesis {
    pub fn new(weights: Vec<f64>, feature_mode: FeatureMode) -> Self {
        Self {
            weights,
            feature_mode,
            gamma: None,
        }
    }

    pub fn value(&self, phi: &[f64]) -> f64 {
        self.weights.iter().zip(phi).map(|(w, x)| w * x).sum()
    }

    /// Real-valued output on an instance pair.
    pub fn value_on_pair(
        &self,
        x: &crate::relations::Instance,
        x_prime: &crate::relations::Instance,
    ) -> Result<f64, LearnerError> {
        let phi = pair_feature_map(x, x_prime, self.feature_mode)?;
        if phi.len() != self.weights.len() {
            return Err(LearnerError::DimMismatch {
                weights: self.weights.len(),
                features: phi.len(),
            });
        }
        Ok(self.value(&phi))
    }
}

/// Deterministic solver budget. The certified gap shrinks as
/// `(1 + ln T) / T`, so the defaults trade runtime for slack explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub iterations: usize,
    /// Objective checkpoint cadence; the final averaged iterate is always
    /// evaluated regardless.
    pub check_every: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            iterations: 50_000,
            check_every: 1_000,
        }
    }
}

/// Training outcome: the returned hypothesis had the best checkpointed
/// objective, and the slack figures certify how far it can be from optimal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub objective: f64,
    /// Best-so-far objective at each checkpoint; non-increasing.
    pub objective_trace: Vec<f64>,
    /// Certified objective gap.
    pub tau_obj: f64,
    /// Certified bound on `|h(z) - h*(z)|` over `||phi(z)|| <= B`.
    pub tau_h: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub hypothesis: Hypothesis,
    pub report: TrainReport,
}

/// Risk value with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    pub value: f64,
    /// Loss the value averages; `None` for non-loss estimates such as the
    /// Monte-Carlo Rademacher complexity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<LossKind>,
    pub sample_size: usize,
    /// Standard error for Monte-Carlo estimates; `None` for exact averages.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
}

/// Trains the regularized hinge classifier on a pair dataset.
pub fn train_svm(
    data: &PairDataset,
    lambda: f64,
    params: &SolverParams,
) -> Result<TrainedModel, LearnerError> {
    if data.m() == 0 {
        return Err(LearnerError::EmptyDataset);
    }
    let rows: Vec<usize> = (0..data.m()).collect();
    let (weights, report) = subgradient_train(data, &rows, data.m(), lambda, params)?;
    Ok(TrainedModel {
        hypothesis: Hypothesis::new(weights, data.feature_mode),
        report,
    })
}

/// Core solver over a row subset. `divisor` scales the loss sum; leave-one-out
/// retraining keeps the original `m` so that the certified stability constant
/// `B^2 / (2 lambda m)` applies exactly as stated.
fn subgradient_train(
    data: &PairDataset,
    rows: &[usize],
    divisor: usize,
    lambda: f64,
    params: &SolverParams,
) -> Result<(Vec<f64>, TrainReport), LearnerError> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(LearnerError::BadLambda { lambda });
    }
    if rows.is_empty() || divisor == 0 {
        return Err(LearnerError::EmptyDataset);
    }
    if params.iterations == 0 {
        return Err(LearnerError::BadParams("iterations must be >= 1".into()));
    }
    let dim = data.dim();
    let b = data.norm_bound;
    let radius = 1.0 / lambda.sqrt();
    let t_total = params.iterations;
    let check_every = params.check_every.max(1);

    let objective = |w: &[f64]| -> f64 {
        let mut loss_sum = 0.0;
        for &r in rows {
            let phi = data.feature_row(r);
            let v: f64 = w.iter().zip(phi).map(|(a, b)| a * b).sum();
            loss_sum += loss_unchecked(LossKind::Hinge, data.labels[r], v);
        }
        loss_sum / divisor as f64 + lambda * w.iter().map(|x| x * x).sum::<f64>()
    };

    let mut w = vec![0.0; dim];
    let mut w_sum = vec![0.0; dim];
    let mut grad = vec![0.0; dim];
    let mut best_objective = objective(&w);
    let mut best_w = w.clone();
    let mut trace = Vec::new();

    for t in 1..=t_total {
        for g in grad.iter_mut() {
            *g = 0.0;
        }
        for &r in rows {
            let phi = data.feature_row(r);
            let y = f64::from(data.labels[r]);
            let v: f64 = w.iter().zip(phi).map(|(a, b)| a * b).sum();
            if y * v < 1.0 {
                for (g, x) in grad.iter_mut().zip(phi) {
                    *g -= y * x;
                }
            }
        }
        let step = 1.0 / (lambda * t as f64);
        let scale = 1.0 / divisor as f64;
        for (wi, gi) in w.iter_mut().zip(&grad) {
            *wi -= step * (2.0 * lambda * *wi + scale * gi);
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > radius {
            let shrink = radius / norm;
            for wi in w.iter_mut() {
                *wi *= shrink;
            }
        }
        for (s, wi) in w_sum.iter_mut().zip(&w) {
            *s += wi;
        }
        if t % check_every == 0 || t == t_total {
            let averaged: Vec<f64> = w_sum.iter().map(|s| s / t as f64).collect();
            let f = objective(&averaged);
            if !f.is_finite() {
                return Err(LearnerError::Divergence { iteration: t });
            }
            if f < best_objective {
                best_objective = f;
                best_w = averaged;
            }
            trace.push(best_objective);
        }
    }

    let g_bound = b + 2.0 * lambda.sqrt();
    let tau_obj =
        g_bound * g_bound * (1.0 + (t_total as f64).ln()) / (2.0 * lambda * t_total as f64);
    let tau_h = b * (tau_obj / lambda).sqrt();
    Ok((
        best_w,
        TrainReport {
            objective: best_objective,
            objective_trace: trace,
            tau_obj,
            tau_h,
            iterations: t_total,
        },
    ))
}

/// Average loss over the training examples.
pub fn empirical_risk(
    h: &Hypothesis,
    data: &PairDataset,
    kind: LossKind,
) -> Result<RiskEstimate, LearnerError> {
    kind.validate()?;
    if data.m() == 0 {
        return Err(LearnerError::EmptyDataset);
    }
    if h.weights.len() != data.dim() {
        return Err(LearnerError::DimMismatch {
            weights: h.weights.len(),
            features: data.dim(),
        });
    }
    let total: f64 = (0..data.m())
        .map(|e| loss_unchecked(kind, data.labels[e], h.value(data.feature_row(e))))
        .sum();
    Ok(RiskEstimate {
        value: total / data.m() as f64,
        kind: Some(kind),
        sample_size: data.m(),
        std_error: None,
    })
}

/// Monte-Carlo estimate of the true risk over freshly drawn i.i.d. pairs.
#[allow(clippy::too_many_arguments)]
pub fn true_risk_mc(
    h: &Hypothesis,
    dist: &InstanceDist,
    rel: &RelationSpec,
    mode: FeatureMode,
    kind: LossKind,
    n_samples: usize,
    dim: usize,
    seed: u64,
) -> Result<RiskEstimate, LearnerError> {
    kind.validate()?;
    if n_samples == 0 {
        return Err(LearnerError::BadParams("n_samples must be >= 1".into()));
    }
    if h.weights.len() != dim {
        return Err(LearnerError::DimMismatch {
            weights: h.weights.len(),
            features: dim,
        });
    }
    let mut rng = rng_from_seed(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n_samples {
        let x = draw_instance(dist, dim, &mut rng)?;
        let x_prime = draw_instance(dist, dim, &mut rng)?;
        let y = relation_label(rel, &x, &x_prime);
        let phi = pair_feature_map(&x, &x_prime, mode)?;
        let l = loss_unchecked(kind, y, h.value(&phi));
        sum += l;
        sum_sq += l * l;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let std_error = if n_samples > 1 {
        let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(RiskEstimate {
        value: mean,
        kind: Some(kind),
        sample_size: n_samples,
        std_error: Some(std_error),
    })
}

/// Defect: estimated true risk minus empirical risk. May be negative.
#[allow(clippy::too_many_arguments)]
pub fn defect(
    h: &Hypothesis,
    data: &PairDataset,
    dist: &InstanceDist,
    rel: &RelationSpec,
    mode: FeatureMode,
    kind: LossKind,
    n_samples: usize,
    seed: u64,
) -> Result<f64, LearnerError> {
    let risk = true_risk_mc(h, dist, rel, mode, kind, n_samples, data.dim(), seed)?;
    let remp = empirical_risk(h, data, kind)?;
    Ok(risk.value - remp.value)
}

/// Leave-one-out classification-stability probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityProbe {
    /// Max over probe pairs and removals of `|h_full(z) - h_loo(z)|`.
    pub observed_sup: f64,
    /// Certified classification stability `B^2 / (2 lambda m)` of the exact
    /// minimizer.
    pub certified: f64,
    /// Certified solver slack per trained hypothesis; comparisons should
    /// allow `certified + 2 * tau_h`.
    pub tau_h: f64,
    /// Which examples were removed.
    pub removed_examples: Vec<usize>,
}

/// Retrains with single examples removed and reports the largest observed
/// change in hypothesis value over random probe pairs.
///
/// Removal keeps the original `1/m` loss normalization (the convention under
/// which the `B^2 / (2 lambda m)` constant is stated), so only the removed
/// term leaves the objective.
pub fn classification_stability_probe(
    data: &PairDataset,
    lambda: f64,
    probe_points: usize,
    removals: usize,
    seed: u64,
    params: &SolverParams,
) -> Result<StabilityProbe, LearnerError> {
    let m = data.m();
    if m < 2 {
        return Err(LearnerError::EmptyDataset);
    }
    if probe_points == 0 || removals == 0 {
        return Err(LearnerError::BadParams(
            "probe_points and removals must be >= 1".into(),
        ));
    }
    let mut rng = rng_from_seed(seed);
    let n = data.instances.len();
    let probes: Vec<(usize, usize)> = (0..probe_points)
        .map(|_| {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            (a, b)
        })
        .collect();
    let probe_features: Vec<Vec<f64>> = probes
        .iter()
        .map(|&(a, b)| pair_feature_map(&data.instances[a], &data.instances[b], data.feature_mode))
        .collect::<Result<_, _>>()?;

    let mut removed_examples: Vec<usize> = Vec::with_capacity(removals.min(m));
    {
        let mut pool: Vec<usize> = (0..m).collect();
        for _ in 0..removals.min(m) {
            let pick = rng.gen_range(0..pool.len());
            removed_examples.push(pool.swap_remove(pick));
        }
        removed_examples.sort_unstable();
    }

    let all_rows: Vec<usize> = (0..m).collect();
    let (w_full, report_full) = subgradient_train(data, &all_rows, m, lambda, params)?;
    let full_values: Vec<f64> = probe_features.iter().map(|phi| dot(&w_full, phi)).collect();

    let mut observed_sup: f64 = 0.0;
    for &removed in &removed_examples {
        let rows: Vec<usize> = (0..m).filter(|&r| r != removed).collect();
        let (w_loo, _) = subgradient_train(data, &rows, m, lambda, params)?;
        for (phi, full) in probe_features.iter().zip(&full_values) {
            let diff = (full - dot(&w_loo, phi)).abs();
            observed_sup = observed_sup.max(diff);
        }
    }

    Ok(StabilityProbe {
        observed_sup,
        certified: data.norm_bound * data.norm_bound / (2.0 * lambda * m as f64),
        tau_h: report_full.tau_h,
        removed_examples,
    })
}

/// Uniform stability w.r.t. the ramp loss implied by classification
/// stability: `beta / gamma`.
pub fn uniform_stability_from_classification(beta: f64, gamma: f64) -> Result<f64, LearnerError> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(LearnerError::BadParams(format!(
            "beta must be >= 0, got {beta}"
        )));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(LearnerError::BadGamma { gamma });
    }
    Ok(beta / gamma)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::TrainingGraph;
    use crate::relations::{build_dataset, Instance};

    fn inst(v: &[f64]) -> Instance {
        Instance::new(v.to_vec()).unwrap()
    }

    /// Two examples with pair features +1 and -1, labels +1 and -1, so the
    /// objective is exactly `max(0, 1 - w) + lambda * w^2`.
    fn unit_margin_dataset() -> (PairDataset, RelationSpec) {
        let xs = vec![inst(&[0.6]), inst(&[-0.4]), inst(&[-0.5]), inst(&[0.5])];
        let g = TrainingGraph::from_edge_list(4, &[(0, 1), (2, 3)]).unwrap();
        let rel = RelationSpec::TotalOrder {
            direction: vec![-1.0],
        };
        let data = build_dataset(xs, g, &rel, FeatureMode::AntisymmetricDiff).unwrap();
        assert_eq!(data.labels, vec![1, -1]);
        assert_eq!(data.feature_row(0), &[1.0]);
        assert_eq!(data.feature_row(1), &[-1.0]);
        (data, rel)
    }

    #[test]
    fn loss_values() {
        assert_eq!(loss(LossKind::Ramp { gamma: 1.0 }, 1, 0.5).unwrap(), 0.5);
        assert_eq!(loss(LossKind::Hinge, -1, -2.0).unwrap(), 0.0);
        assert_eq!(loss(LossKind::Hinge, -1, 1.0).unwrap(), 2.0);
        assert_eq!(loss(LossKind::ZeroOne, 1, 3.0).unwrap(), 0.0);
        assert_eq!(loss(LossKind::ZeroOne, 1, 0.0).unwrap(), 0.0); // sign(0) = +1
        assert_eq!(loss(LossKind::ZeroOne, -1, 0.0).unwrap(), 1.0);
        assert!(loss(LossKind::Ramp { gamma: 0.0 }, 1, 0.0).is_err());
    }

    #[test]
    fn ramp_dominates_zero_one_and_hinge_dominates_ramp() {
        let gammas = [0.25, 0.5, 1.0, 2.0];
        for y in [-1i8, 1] {
            let mut v = -3.0;
            while v <= 3.0 {
                let zo = loss(LossKind::ZeroOne, y, v).unwrap();
                for gamma in gammas {
                    let ramp = loss(LossKind::Ramp { gamma }, y, v).unwrap();
                    assert!(zo <= ramp + 1e-15, "y={y} v={v} gamma={gamma}");
                }
                let ramp1 = loss(LossKind::Ramp { gamma: 1.0 }, y, v).unwrap();
                let hinge = loss(LossKind::Hinge, y, v).unwrap();
                assert!(ramp1 <= hinge + 1e-15, "y={y} v={v}");
                v += 0.01;
            }
        }
    }

    #[test]
    fn solver_matches_grid_search_oracle() {
        let (data, _) = unit_margin_dataset();
        // Grid-search oracle for f(w) = max(0, 1 - w) + w^2.
        let mut best = (f64::INFINITY, 0.0);
        let mut w = -2.0f64;
        while w <= 2.0 {
            let f = (1.0 - w).max(0.0) + w * w;
            if f < best.0 {
                best = (f, w);
            }
            w += 1e-4;
        }
        assert!((best.1 - 0.5).abs() < 1e-3);
        assert!((best.0 - 0.75).abs() < 1e-6);

        let params = SolverParams {
            iterations: 200_000,
            check_every: 1_000,
        };
        let model = train_svm(&data, 1.0, &params).unwrap();
        assert!(
            model.report.objective >= 0.75 - 1e-9,
            "cannot beat the optimum"
        );
        assert!(
            model.report.objective <= 0.75 + model.report.tau_obj,
            "objective {} outside certified gap {}",
            model.report.objective,
            model.report.tau_obj
        );
        let w = model.hypothesis.weights[0];
        assert!(
            (w - 0.5).abs() <= (model.report.tau_obj / 1.0).sqrt(),
            "w = {w}"
        );
    }

    #[test]
    fn huge_lambda_shrinks_weights_to_zero() {
        let (data, _) = unit_margin_dataset();
        let params = SolverParams {
            iterations: 5_000,
            check_every: 500,
        };
        let model = train_svm(&data, 1e6, &params).unwrap();
        let norm: f64 = model
            .hypothesis
            .weights
            .iter()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt();
        assert!(norm < 1e-2, "norm = {norm}");
        let hinge = empirical_risk(&model.hypothesis, &data, LossKind::Hinge).unwrap();
        assert!((hinge.value - 1.0).abs() < 0.05);
    }

    #[test]
    fn separable_clusters_reach_zero_training_error() {
        let dist = InstanceDist::GaussianMixture {
            clusters: 2,
            spread: 0.0,
        };
        let rel = RelationSpec::equivalence_from_mixture(2, 1);
        let xs = crate::relations::sample_instances(&dist, 20, 1, 3).unwrap();
        let g = crate::labeler::er_sample(20, 60, 4).unwrap();
        let data = build_dataset(xs, g, &rel, FeatureMode::SymmetricAbsdiff).unwrap();
        // Separability: within-cluster pairs have phi = 0 (predicted +1 by the
        // sign convention), cross pairs have phi = 2, so any w < 0 classifies
        // the sample perfectly.
        assert!(data
            .labels
            .iter()
            .enumerate()
            .all(|(e, &y)| (y == 1) == (data.feature_row(e)[0] < 1.0)));
        let params = SolverParams {
            iterations: 20_000,
            check_every: 1_000,
        };
        let model = train_svm(&data, 0.01, &params).unwrap();
        let zo = empirical_risk(&model.hypothesis, &data, LossKind::ZeroOne).unwrap();
        assert_eq!(zo.value, 0.0);
    }

    #[test]
    fn objective_trace_is_non_increasing() {
        let (data, _) = unit_margin_dataset();
        let params = SolverParams {
            iterations: 10_000,
            check_every: 100,
        };
        let model = train_svm(&data, 0.3, &params).unwrap();
        for pair in model.report.objective_trace.windows(2) {
            assert!(pair[1] <= pair[0]);
        }
    }

    #[test]
    fn empirical_risk_examples() {
        let (data, _) = unit_margin_dataset();
        // h = 0: ramp loss 1 on every example, zero-one depends on sign(0)=+1.
        let h = Hypothesis::new(vec![0.0], FeatureMode::AntisymmetricDiff);
        let ramp = empirical_risk(&h, &data, LossKind::Ramp { gamma: 0.7 }).unwrap();
        assert_eq!(ramp.value, 1.0);
        let zo = empirical_risk(&h, &data, LossKind::ZeroOne).unwrap();
        assert_eq!(zo.value, 0.5); // label -1 example is misclassified
                                   // losses {0, 1} over two edges via a perfect/failing hypothesis
        let good = Hypothesis::new(vec![1.0], FeatureMode::AntisymmetricDiff);
        assert_eq!(
            empirical_risk(&good, &data, LossKind::ZeroOne)
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn zero_hypothesis_on_all_plus_labels() {
        let xs = vec![inst(&[0.1]), inst(&[0.2]), inst(&[0.3])];
        let g = TrainingGraph::from_edge_list(3, &[(0, 1), (1, 2)]).unwrap();
        // absdiff features with an equivalence of a single cluster: all +1.
        let rel = RelationSpec::Equivalence {
            centers: vec![vec![0.0]],
        };
        let data = build_dataset(xs, g, &rel, FeatureMode::SymmetricAbsdiff).unwrap();
        assert!(data.labels.iter().all(|&y| y == 1));
        let h = Hypothesis::new(vec![0.0], FeatureMode::SymmetricAbsdiff);
        assert_eq!(
            empirical_risk(&h, &data, LossKind::ZeroOne).unwrap().value,
            0.0
        );
    }

    #[test]
    fn true_risk_mc_analytic_cases() {
        let dist = InstanceDist::GaussianMixture {
            clusters: 2,
            spread: 0.0,
        };
        let rel = RelationSpec::equivalence_from_mixture(2, 1);
        // Constant +1 hypothesis: errs exactly on cross-cluster pairs, P = 1/2.
        let h = Hypothesis::new(vec![0.0], FeatureMode::SymmetricAbsdiff);
        let est = true_risk_mc(
            &h,
            &dist,
            &rel,
            FeatureMode::SymmetricAbsdiff,
            LossKind::ZeroOne,
            20_000,
            1,
            5,
        )
        .unwrap();
        let se = est.std_error.unwrap();
        assert!((est.value - 0.5).abs() <= 3.0 * se, "risk {}", est.value);

        // Ramp of the zero hypothesis is exactly 1 with zero variance.
        let ramp = true_risk_mc(
            &h,
            &dist,
            &rel,
            FeatureMode::SymmetricAbsdiff,
            LossKind::Ramp { gamma: 1.0 },
            100,
            1,
            5,
        )
        .unwrap();
        assert_eq!(ramp.value, 1.0);
        assert_eq!(ramp.std_error, Some(0.0));

        // Exact rule for spread-0 centers at -1 and +1 on absdiff features:
        // within pairs have phi = 0 (predict +1), cross pairs phi = 2.
        let bayes = Hypothesis::new(vec![-1.0], FeatureMode::SymmetricAbsdiff);
        let exact = true_risk_mc(
            &bayes,
            &dist,
            &rel,
            FeatureMode::SymmetricAbsdiff,
            LossKind::ZeroOne,
            5_000,
            1,
            6,
        )
        .unwrap();
        assert_eq!(exact.value, 0.0);
    }

    #[test]
    fn defect_of_matching_estimates_is_near_zero() {
        let (data, rel) = unit_margin_dataset();
        let h = Hypothesis::new(vec![0.0], FeatureMode::AntisymmetricDiff);
        // Ramp of the zero hypothesis: both sides exactly 1, defect 0.
        let d = defect(
            &h,
            &data,
            &InstanceDist::UniformCube,
            &rel,
            FeatureMode::AntisymmetricDiff,
            LossKind::Ramp { gamma: 1.0 },
            500,
            8,
        )
        .unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn memorizing_star_data_has_positive_defect() {
        // Star around an off-center instance, antisymmetric relation but
        // symmetric features: the training set is partially learnable while
        // the true risk of any symmetric-feature hypothesis is exactly 1/2.
        let n = 42;
        let mut xs = vec![inst(&[-0.5])];
        for i in 1..n {
            let x = -1.0 + 2.0 * (i as f64) / (n as f64);
            xs.push(inst(&[x]));
        }
        let g = crate::labeler::star_sample(n, n - 1).unwrap();
        let rel = RelationSpec::order_along_first_axis(1);
        let data = build_dataset(xs, g, &rel, FeatureMode::SymmetricAbsdiff).unwrap();
        let params = SolverParams {
            iterations: 20_000,
            check_every: 1_000,
        };
        let model = train_svm(&data, 0.01, &params).unwrap();
        let remp = empirical_risk(&model.hypothesis, &data, LossKind::ZeroOne).unwrap();
        assert!(remp.value < 0.4, "training error {}", remp.value);
        let d = defect(
            &model.hypothesis,
            &data,
            &InstanceDist::UniformCube,
            &rel,
            FeatureMode::SymmetricAbsdiff,
            LossKind::ZeroOne,
            20_000,
            9,
        )
        .unwrap();
        assert!(d > 0.0, "defect = {d}");
    }

    #[test]
    fn antisymmetric_hypothesis_flips_sign_with_pair_order() {
        let dist = InstanceDist::UniformCube;
        let rel = RelationSpec::order_along_first_axis(2);
        let xs = crate::relations::sample_instances(&dist, 16, 2, 10).unwrap();
        let g = crate::labeler::er_sample(16, 40, 11).unwrap();
        let data = build_dataset(xs.clone(), g, &rel, FeatureMode::AntisymmetricDiff).unwrap();
        let params = SolverParams {
            iterations: 10_000,
            check_every: 1_000,
        };
        let model = train_svm(&data, 0.1, &params).unwrap();
        for a in 0..4 {
            for b in 4..8 {
                let fwd = model.hypothesis.value_on_pair(&xs[a], &xs[b]).unwrap();
                let bwd = model.hypothesis.value_on_pair(&xs[b], &xs[a]).unwrap();
                assert!((fwd + bwd).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn stability_probe_respects_certificate() {
        let dist = InstanceDist::GaussianMixture {
            clusters: 2,
            spread: 0.3,
        };
        let rel = RelationSpec::equivalence_from_mixture(2, 2);
        let xs = crate::relations::sample_instances(&dist, 30, 2, 21).unwrap();
        let g = crate::labeler::er_sample(30, 50, 22).unwrap();
        let data = build_dataset(xs, g, &rel, FeatureMode::SymmetricAbsdiff).unwrap();
        let params = SolverParams {
            iterations: 30_000,
            check_every: 3_000,
        };
        let probe = classification_stability_probe(&data, 1.0, 40, 20, 23, &params).unwrap();
        assert_eq!(probe.certified, 4.0 / (2.0 * 50.0));
        assert!(
            probe.observed_sup <= probe.certified + 2.0 * probe.tau_h,
            "observed {} certified {} tau_h {}",
            probe.observed_sup,
            probe.certified,
            probe.tau_h
        );
    }

    #[test]
    fn probe_certificate_is_b_squared_over_2_lambda_m() {
        // product features have B = 1, so m = 100 at lambda = 1 certifies 0.005
        let dist = InstanceDist::UniformCube;
        let rel = RelationSpec::order_along_first_axis(2);
        let xs = crate::relations::sample_instances(&dist, 40, 2, 41).unwrap();
        let g = crate::labeler::er_sample(40, 100, 42).unwrap();
        let data = build_dataset(xs, g, &rel, FeatureMode::SymmetricProduct).unwrap();
        let params = SolverParams {
            iterations: 1_000,
            check_every: 500,
        };
        let probe = classification_stability_probe(&data, 1.0, 10, 2, 43, &params).unwrap();
        assert_eq!(probe.certified, 0.005);
    }

    #[test]
    fn huge_lambda_probe_is_flat() {
        let (data, _) = unit_margin_dataset();
        let params = SolverParams {
            iterations: 2_000,
            check_every: 500,
        };
        let probe = classification_stability_probe(&data, 1e6, 10, 2, 3, &params).unwrap();
        assert!(probe.observed_sup < 1e-4);
    }

    #[test]
    fn certified_stability_halves_when_m_doubles() {
        let beta_m = |m: f64| 4.0 / (2.0 * 1.0 * m);
        assert_eq!(beta_m(100.0), 2.0 * beta_m(200.0));
        assert_eq!(
            uniform_stability_from_classification(0.0, 2.0).unwrap(),
            0.0
        );
        assert_eq!(
            uniform_stability_from_classification(0.005, 1.0).unwrap(),
            0.005
        );
        assert_eq!(
            uniform_stability_from_classification(0.005, 0.5).unwrap(),
            0.01
        );
        assert!(uniform_stability_from_classification(0.1, 0.0).is_err());
    }

    #[test]
    fn hypothesis_json_round_trip() {
        let mut h = Hypothesis::new(vec![0.25, -1.5], FeatureMode::SymmetricProduct);
        h.gamma = Some(0.5);
        let json = serde_json::to_string(&h).unwrap();
        assert!(json.contains("\"feature_mode\""));
        let back: Hypothesis = serde_json::from_str(&json).unwrap();
        assert_eq!(h, back);
    }
}
