//! Config-driven experiment runner over the relbound toolkit.
//!
//! Five commands: graph analysis, labeler simulation, bound evaluation,
//! defect-vs-bound studies, and Monte-Carlo verification of the random-graph
//! max-degree bound. All outputs are deterministic functions of their
//! configs: every artifact embeds the config hash, master seed, generator id
//! and crate versions, and reruns reproduce bytes.

use rayon::prelude::*;
use relbound::bounds::{
    er_max_degree_bound, er_rad_kernel_bound, kernel_rademacher_trace_bound, rad_generic_bound,
    rad_kernel_bound, stab_generic_bound, stab_ramp_bound, stab_svm_bound,
};
use relbound::coloring::edge_coloring;
use relbound::graph::{read_edge_list, write_edge_list, TrainingGraph};
use relbound::labeler::{er_sample, regular_sample, sample_pairs, star_sample, LabelerSpec};
use relbound::learner::{
    empirical_risk, train_svm, true_risk_mc, Hypothesis, LossKind, SolverParams,
};
use relbound::relations::{build_dataset, FeatureMode, InstanceDist, RelationSpec};
use relbound::rng::{derive_seed, GENERATOR_ID};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit code: 1 for invariant violations, 2 for config errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Invariant(_) | CliError::Io(_) => 1,
        }
    }
}

fn config_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

/// Input files are part of the configuration; failing to read one is a
/// config error, not a runtime fault.
fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

/// Provenance block embedded in every artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactMeta {
    pub config_hash: String,
    pub master_seed: Option<u64>,
    pub generator: String,
    pub versions: BTreeMap<String, String>,
}

impl ArtifactMeta {
    fn new(config_bytes: &[u8], master_seed: Option<u64>) -> Self {
        let mut versions = BTreeMap::new();
        versions.insert("relbound".to_string(), relbound::VERSION.to_string());
        versions.insert(
            "relbound-cli".to_string(),
            env!("CARGO_PKG_VERSION").to_string(),
        );
        ArtifactMeta {
            config_hash: hex::encode(Sha256::digest(config_bytes)),
            master_seed,
            generator: GENERATOR_ID.to_string(),
            versions,
        }
    }
}

/// Fixed decimal formatting for tabular output: 10 significant digits.
pub fn format_sig(x: f64) -> String {
    format!("{x:.9e}")
}

// ---------------------------------------------------------------------------
// analyze-graph

#[derive(Debug, Serialize)]
pub struct GraphAnalysis {
    pub meta: ArtifactMeta,
    pub n: usize,
    pub m: usize,
    pub max_degree: usize,
    pub degree_sum: usize,
    pub mean_degree: f64,
    pub handshaking_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effective_training_size: Option<f64>,
    pub chromatic_upper_bound: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub colors_used: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub color_class_sizes: Option<Vec<usize>>,
    pub coloring_proper: bool,
}

pub fn analyze_graph(input: &Path) -> Result<GraphAnalysis, CliError> {
    let text = read_input(input)?;
    let (graph, _labels) = read_edge_list(&text).map_err(config_err)?;
    analyze_training_graph(&graph, &text)
}

fn analyze_training_graph(
    graph: &TrainingGraph,
    config_bytes: &str,
) -> Result<GraphAnalysis, CliError> {
    let degrees = graph.degree_sequence();
    let degree_sum: usize = degrees.iter().sum();
    let handshaking_ok = degree_sum == 2 * graph.m();
    let rho = graph.max_instance_frequency();
    let (effective, colors_used, class_sizes, proper) = if graph.m() > 0 {
        let es = graph.effective_training_size().map_err(config_err)?;
        let partition = edge_coloring(graph).map_err(config_err)?;
        let proper = partition.is_proper(graph);
        let sizes: Vec<usize> = partition.classes().iter().map(Vec::len).collect();
        (
            Some(es.ratio),
            Some(partition.num_colors),
            Some(sizes),
            proper,
        )
    } else {
        (None, None, None, true)
    };
    let analysis = GraphAnalysis {
        meta: ArtifactMeta::new(config_bytes.as_bytes(), None),
        n: graph.n(),
        m: graph.m(),
        max_degree: rho,
        degree_sum,
        mean_degree: 2.0 * graph.m() as f64 / graph.n() as f64,
        handshaking_ok,
        effective_training_size: effective,
        chromatic_upper_bound: rho + 1,
        colors_used,
        color_class_sizes: class_sizes,
        coloring_proper: proper,
    };
    if !handshaking_ok {
        return Err(CliError::Invariant("degree sum is not 2m".into()));
    }
    if !proper {
        return Err(CliError::Invariant("edge coloring is not proper".into()));
    }
    if let Some(used) = analysis.colors_used {
        if used > analysis.chromatic_upper_bound {
            return Err(CliError::Invariant(format!(
                "coloring used {used} colors, above max degree + 1"
            )));
        }
    }
    Ok(analysis)
}

// ---------------------------------------------------------------------------
// sample-labeler

#[derive(Debug, Serialize)]
pub struct SampleSummary {
    pub meta: ArtifactMeta,
    pub n: usize,
    pub m: usize,
    pub max_degree: usize,
    pub out: PathBuf,
}

pub fn sample_labeler(spec_path: &Path, out: &Path) -> Result<SampleSummary, CliError> {
    let spec_text = read_input(spec_path)?;
    let spec: LabelerSpec = serde_json::from_str(&spec_text).map_err(config_err)?;
    let graph = sample_pairs(&spec).map_err(config_err)?;
    std::fs::write(out, write_edge_list(&graph, None))?;
    let seed = match &spec.variant {
        relbound::labeler::LabelerVariant::UniformWithoutReplacement { seed, .. } => Some(*seed),
        _ => None,
    };
    Ok(SampleSummary {
        meta: ArtifactMeta::new(spec_text.as_bytes(), seed),
        n: graph.n(),
        m: graph.m(),
        max_degree: graph.max_instance_frequency(),
        out: out.to_path_buf(),
    })
}

// ---------------------------------------------------------------------------
// compute-bounds

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundRequest {
    pub bound: String,
    #[serde(default)]
    pub remp: Option<f64>,
    #[serde(default)]
    pub rad: Option<f64>,
    #[serde(default)]
    pub rho: Option<usize>,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub loss_bound: Option<f64>,
    #[serde(default)]
    pub gram_trace: Option<f64>,
}

fn need<T: Copy>(v: Option<T>, name: &str, bound: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("bound {bound:?} requires field {name:?}")))
}

fn evaluate_bound(req: &BoundRequest) -> Result<Value, CliError> {
    let b = req.bound.as_str();
    let report = match b {
        "chromatic" => {
            let rho = need(req.rho, "rho", b)?;
            json!({
                "bound_name": "chromatic",
                "inputs": { "rho": rho },
                "value": relbound::bounds::chromatic_bound(rho),
            })
        }
        "rad-generic" => serde_json::to_value(
            rad_generic_bound(
                need(req.remp, "remp", b)?,
                need(req.rad, "rad", b)?,
                need(req.rho, "rho", b)?,
                need(req.m, "m", b)?,
                need(req.delta, "delta", b)?,
            )
            .map_err(config_err)?,
        )
        .map_err(config_err)?,
        "rad-kernel" => serde_json::to_value(
            rad_kernel_bound(
                need(req.remp, "remp", b)?,
                need(req.b, "b", b)?,
                need(req.gamma, "gamma", b)?,
                need(req.rho, "rho", b)?,
                need(req.m, "m", b)?,
                need(req.delta, "delta", b)?,
            )
            .map_err(config_err)?,
        )
        .map_err(config_err)?,
        "kernel-trace" => {
            let tb = kernel_rademacher_trace_bound(
                need(req.gram_trace, "gram_trace", b)?,
                need(req.m, "m", b)?,
                need(req.gamma, "gamma", b)?,
                need(req.b, "b", b)?,
            )
            .map_err(config_err)?;
            json!({
                "bound_name": "kernel-trace",
                "inputs": { "gram_trace": req.gram_trace, "m": req.m, "gamma": req.gamma, "b": req.b },
                "trace_term": tb.trace_term,
                "relaxed": tb.relaxed,
            })
        }
        "stab-generic" => serde_json::to_value(
            stab_generic_bound(
                need(req.remp, "remp", b)?,
                need(req.beta, "beta", b)?,
                need(req.rho, "rho", b)?,
                need(req.m, "m", b)?,
                need(req.loss_bound, "loss_bound", b)?,
                need(req.delta, "delta", b)?,
            )
            .map_err(config_err)?,
        )
        .map_err(config_err)?,
        "stab-ramp" => serde_json::to_value(
            stab_ramp_bound(
                need(req.remp, "remp", b)?,
                need(req.beta, "beta", b)?,
                need(req.gamma, "gamma", b)?,
                need(req.rho, "rho", b)?,
                need(req.m, "m", b)?,
                need(req.delta, "delta", b)?,
            )
            .map_err(config_err)?,
        )
        .map_err(config_err)?,
        "stab-svm" => serde_json::to_value(
            stab_svm_bound(
                need(req.remp, "remp", b)?,
                need(req.b, "b", b)?,
                need(req.lambda, "lambda", b)?,
                need(req.rho, "rho", b)?,
                need(req.m, "m", b)?,
                need(req.delta, "delta", b)?,
            )
            .map_err(config_err)?,
        )
        .map_err(config_err)?,
        "er-max-degree" => {
            let value = er_max_degree_bound(
                need(req.n, "n", b)?,
                need(req.m, "m", b)?,
                need(req.delta, "delta", b)?,
            )
            .map_err(config_err)?;
            json!({
                "bound_name": "er-max-degree",
                "inputs": { "n": req.n, "m": req.m, "delta": req.delta },
                "value": value,
            })
        }
        "er-rad-kernel" => serde_json::to_value(
            er_rad_kernel_bound(
                need(req.remp, "remp", b)?,
                need(req.b, "b", b)?,
                need(req.gamma, "gamma", b)?,
                need(req.n, "n", b)?,
                need(req.m, "m", b)?,
                need(req.delta, "delta", b)?,
            )
            .map_err(config_err)?,
        )
        .map_err(config_err)?,
        other => {
            return Err(CliError::Config(format!("unknown bound kind {other:?}")));
        }
    };
    Ok(report)
}

pub fn compute_bounds(input: &Path) -> Result<Value, CliError> {
    let text = read_input(input)?;
    let parsed: Value = serde_json::from_str(&text).map_err(config_err)?;
    let requests: Vec<BoundRequest> = match parsed {
        Value::Array(_) => serde_json::from_str(&text).map_err(config_err)?,
        Value::Object(_) => vec![serde_json::from_str(&text).map_err(config_err)?],
        _ => return Err(CliError::Config("expected an object or array".into())),
    };
    let reports: Vec<Value> = requests
        .iter()
        .map(evaluate_bound)
        .collect::<Result<_, _>>()?;
    Ok(json!({
        "meta": ArtifactMeta::new(text.as_bytes(), None),
        "reports": reports,
    }))
}

// ---------------------------------------------------------------------------
// defect-study

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Star,
    Regular,
    Er,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationKind {
    Equivalence,
    TotalOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefectStudyConfig {
    pub regime: Regime,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub trials: usize,
    pub d: usize,
    pub dist: InstanceDist,
    pub relation: RelationKind,
    pub feature_mode: FeatureMode,
    pub lambda: f64,
    pub gamma: f64,
    pub delta: f64,
    pub mc_samples: usize,
    pub iterations: usize,
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

impl DefectStudyConfig {
    fn relation_spec(&self) -> Result<RelationSpec, CliError> {
        match self.relation {
            RelationKind::Equivalence => match &self.dist {
                InstanceDist::GaussianMixture { clusters, .. } => {
                    Ok(RelationSpec::equivalence_from_mixture(*clusters, self.d))
                }
                InstanceDist::UniformCube => Err(CliError::Config(
                    "equivalence relation requires a gaussian-mixture distribution".into(),
                )),
            },
            RelationKind::TotalOrder => Ok(RelationSpec::order_along_first_axis(self.d)),
        }
    }

    fn graph_for_trial(&self, trial_seed: u64) -> Result<TrainingGraph, CliError> {
        match self.regime {
            Regime::Star => {
                let m = need(self.m, "m", "star regime")?;
                star_sample(self.n, m).map_err(config_err)
            }
            Regime::Regular => {
                let k = need(self.k, "k", "regular regime")?;
                regular_sample(self.n, k).map_err(config_err)
            }
            Regime::Er => {
                let m = need(self.m, "m", "er regime")?;
                er_sample(self.n, m, derive_seed(trial_seed, 0)).map_err(config_err)
            }
        }
    }
}

/// One defect-study trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefectRow {
    pub regime: Regime,
    pub trial: usize,
    pub n: usize,
    pub m: usize,
    pub rho: usize,
    pub effective_size: f64,
    pub remp_zero_one: f64,
    pub remp_ramp: f64,
    pub remp_hinge: f64,
    pub risk_mc: f64,
    pub risk_mc_se: f64,
    pub defect: f64,
    pub bound_rad_kernel: f64,
    pub bound_stab_svm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_er_rad_kernel: Option<f64>,
}

/// Column order of the defect-study CSV; pinned for consumers.
pub const DEFECT_CSV_COLUMNS: &[&str] = &[
    "regime",
    "trial",
    "n",
    "m",
    "rho",
    "effective_size",
    "remp_zero_one",
    "remp_ramp",
    "remp_hinge",
    "risk_mc",
    "risk_mc_se",
    "defect",
    "bound_rad_kernel",
    "bound_stab_svm",
    "bound_er_rad_kernel",
];

fn regime_name(regime: Regime) -> &'static str {
    match regime {
        Regime::Star => "star",
        Regime::Regular => "regular",
        Regime::Er => "er",
    }
}

fn run_trial(config: &DefectStudyConfig, trial: usize) -> Result<DefectRow, CliError> {
    let trial_seed = derive_seed(config.master_seed, trial as u64);
    let graph = config.graph_for_trial(trial_seed)?;
    let m = graph.m();
    let rho = graph.max_instance_frequency();
    if m == 0 || rho == 0 {
        return Err(CliError::Config("regime produced an empty graph".into()));
    }
    let effective_size = m as f64 / rho as f64;
    let rel = config.relation_spec()?;
    let instances = relbound::relations::sample_instances(
        &config.dist,
        config.n,
        config.d,
        derive_seed(trial_seed, 1),
    )
    .map_err(config_err)?;
    let data = build_dataset(instances, graph, &rel, config.feature_mode).map_err(config_err)?;
    let params = SolverParams {
        iterations: config.iterations,
        check_every: (config.iterations / 20).max(1),
    };
    let model = train_svm(&data, config.lambda, &params).map_err(config_err)?;
    let h: &Hypothesis = &model.hypothesis;
    let remp_zero_one = empirical_risk(h, &data, LossKind::ZeroOne).map_err(config_err)?;
    let remp_ramp = empirical_risk(
        h,
        &data,
        LossKind::Ramp {
            gamma: config.gamma,
        },
    )
    .map_err(config_err)?;
    let remp_hinge = empirical_risk(h, &data, LossKind::Hinge).map_err(config_err)?;
    let risk = true_risk_mc(
        h,
        &config.dist,
        &rel,
        config.feature_mode,
        LossKind::ZeroOne,
        config.mc_samples,
        config.d,
        derive_seed(trial_seed, 2),
    )
    .map_err(config_err)?;
    let b = data.norm_bound;
    let bound_rad_kernel = rad_kernel_bound(remp_ramp.value, b, config.gamma, rho, m, config.delta)
        .map_err(config_err)?
        .total;
    let bound_stab_svm = stab_svm_bound(remp_hinge.value, b, config.lambda, rho, m, config.delta)
        .map_err(config_err)?
        .total;
    let bound_er_rad_kernel = if config.regime == Regime::Er && 2 * m >= config.n {
        Some(
            er_rad_kernel_bound(remp_ramp.value, b, config.gamma, config.n, m, config.delta)
                .map_err(config_err)?
                .total,
        )
    } else {
        None
    };

    for (name, value) in [
        ("remp_zero_one", remp_zero_one.value),
        ("remp_ramp", remp_ramp.value),
        ("risk_mc", risk.value),
    ] {
        if !(0.0..=1.0).contains(&value) {
            return Err(CliError::Invariant(format!(
                "bounded loss {name} = {value} outside [0, 1]"
            )));
        }
    }

    Ok(DefectRow {
        regime: config.regime,
        trial,
        n: config.n,
        m,
        rho,
        effective_size,
        remp_zero_one: remp_zero_one.value,
        remp_ramp: remp_ramp.value,
        remp_hinge: remp_hinge.value,
        risk_mc: risk.value,
        risk_mc_se: risk.std_error.unwrap_or(0.0),
        defect: risk.value - remp_zero_one.value,
        bound_rad_kernel,
        bound_stab_svm,
        bound_er_rad_kernel,
    })
}

/// Runs all trials (in parallel; per-trial seeds are derived, so results do
/// not depend on scheduling).
pub fn defect_study(config: &DefectStudyConfig) -> Result<Vec<DefectRow>, CliError> {
    if config.trials == 0 {
        return Err(CliError::Config("trials must be >= 1".into()));
    }
    (0..config.trials)
        .into_par_iter()
        .map(|trial| run_trial(config, trial))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Serializes study rows; bytes are a pure function of the rows.
pub fn render_report(rows: &[DefectRow], format: ReportFormat) -> Result<String, CliError> {
    if rows.is_empty() {
        return Err(CliError::Invariant("no results to emit".into()));
    }
    match format {
        ReportFormat::Csv => {
            let mut out = String::new();
            let _ = writeln!(out, "{}", DEFECT_CSV_COLUMNS.join(","));
            for row in rows {
                let mut fields: Vec<String> = vec![
                    regime_name(row.regime).to_string(),
                    row.trial.to_string(),
                    row.n.to_string(),
                    row.m.to_string(),
                    row.rho.to_string(),
                ];
                for value in [
                    row.effective_size,
                    row.remp_zero_one,
                    row.remp_ramp,
                    row.remp_hinge,
                    row.risk_mc,
                    row.risk_mc_se,
                    row.defect,
                    row.bound_rad_kernel,
                    row.bound_stab_svm,
                ] {
                    fields.push(format_sig(value));
                }
                fields.push(row.bound_er_rad_kernel.map(format_sig).unwrap_or_default());
                let _ = writeln!(out, "{}", fields.join(","));
            }
            Ok(out)
        }
        ReportFormat::Json => {
            serde_json::to_string_pretty(rows).map_err(|e| CliError::Invariant(e.to_string()))
        }
    }
}

/// Writes `results.csv` and `meta.json` into the study's output directory.
pub fn write_defect_artifacts(
    config: &DefectStudyConfig,
    rows: &[DefectRow],
    out_dir: &Path,
) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir)?;
    let csv = render_report(rows, ReportFormat::Csv)?;
    std::fs::write(out_dir.join("results.csv"), csv)?;
    let config_bytes = serde_json::to_vec(config).map_err(|e| CliError::Config(e.to_string()))?;
    let meta = json!({
        "meta": ArtifactMeta::new(&config_bytes, Some(config.master_seed)),
        "config": config,
        "columns": DEFECT_CSV_COLUMNS,
    });
    std::fs::write(
        out_dir.join("meta.json"),
        serde_json::to_string_pretty(&meta).map_err(|e| CliError::Config(e.to_string()))?,
    )?;
    Ok(())
}

// ---------------------------------------------------------------------------
// verify-maxdeg

#[derive(Debug, Serialize)]
pub struct MaxDegreeVerification {
    pub meta: ArtifactMeta,
    pub n: usize,
    pub m: usize,
    pub delta: f64,
    pub trials: usize,
    pub bound: f64,
    pub exceed_fraction: f64,
    pub max_observed_degree: usize,
    pub mean_degree: f64,
    pub expected_mean_degree: f64,
}

pub fn verify_maxdeg(
    n: usize,
    m: usize,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<MaxDegreeVerification, CliError> {
    if trials == 0 {
        return Err(CliError::Config("trials must be >= 1".into()));
    }
    let bound = er_max_degree_bound(n, m, delta).map_err(config_err)?;
    let stats: Vec<(usize, usize)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let g = er_sample(n, m, derive_seed(seed, trial as u64)).map_err(config_err)?;
            Ok((g.max_instance_frequency(), g.degree_sequence().iter().sum()))
        })
        .collect::<Result<_, CliError>>()?;
    let exceed = stats
        .iter()
        .filter(|(max_deg, _)| *max_deg as f64 >= bound)
        .count();
    let max_observed = stats.iter().map(|(d, _)| *d).max().unwrap_or(0);
    let mean_degree = stats
        .iter()
        .map(|(_, sum)| *sum as f64 / n as f64)
        .sum::<f64>()
        / trials as f64;
    let config_bytes =
        format!("verify-maxdeg n={n} m={m} delta={delta} trials={trials} seed={seed}");
    let result = MaxDegreeVerification {
        meta: ArtifactMeta::new(config_bytes.as_bytes(), Some(seed)),
        n,
        m,
        delta,
        trials,
        bound,
        exceed_fraction: exceed as f64 / trials as f64,
        max_observed_degree: max_observed,
        mean_degree,
        expected_mean_degree: 2.0 * m as f64 / n as f64,
    };
    if result.exceed_fraction > delta {
        return Err(CliError::Invariant(format!(
            "max degree exceeded its bound in {:.3} of trials, above delta = {delta}",
            result.exceed_fraction
        )));
    }
    Ok(result)
}

// ---------------------------------------------------------------------------
// --set overrides

/// Applies `key=value` overrides to a JSON config. Keys use dots for nesting
/// (`dist.spread=0.5`); values parse as JSON when possible, else as strings.
pub fn apply_overrides(config: &mut Value, sets: &[String]) -> Result<(), CliError> {
    for set in sets {
        let (key, raw) = set
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set expects key=value, got {set:?}")))?;
        let value: Value =
            serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let parts: Vec<&str> = key.split('.').collect();
        let (last, path) = parts.split_last().expect("split_once guarantees a key");
        let mut node = &mut *config;
        for part in path {
            node = node
                .as_object_mut()
                .ok_or_else(|| {
                    CliError::Config(format!("--set {key:?}: {part:?} is not an object"))
                })?
                .entry(part.to_string())
                .or_insert_with(|| Value::Object(Default::default()));
        }
        node.as_object_mut()
            .ok_or_else(|| CliError::Config(format!("--set {key:?}: target is not an object")))?
            .insert(last.to_string(), value);
    }
    Ok(())
}

/// Loads a defect-study config with overrides applied.
pub fn load_defect_config(path: &Path, sets: &[String]) -> Result<DefectStudyConfig, CliError> {
    let text = read_input(path)?;
    let mut value: Value = serde_json::from_str(&text).map_err(config_err)?;
    apply_overrides(&mut value, sets)?;
    serde_json::from_value(value).map_err(config_err)
}
