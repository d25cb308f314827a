//! Command execution and output assembly.

use std::path::PathBuf;

use ockham::evidence::{
    bic_penalty, bic_sweep, constant_design_generator, polynomial_design_generator, PenaltyComparison,
};
use ockham::glm::{gram_diagnostics, glm_log_evidence, glm_log_likelihood, posterior};
use ockham::rng::standard_normals;
use ockham::selection::{
    mackay_crossover, polynomial_family, prior_predictive_draw, risk_mc, select, sweet_spot_experiment,
    Member, ModelSet, SelectionConfig, SelectionRule, SweetSpotConfig,
};
use ockham::{EstimatorRegistry, EstimatorSettings, EvidenceTarget, GaussianLinearSpec, ObservationSet};
use serde::Serialize;
use serde_json::json;

use crate::args::{Command, Format, RunConfig, Value};
use crate::data::read_observations;
use crate::error::CliError;
use crate::output::{to_json, write_atomic, Cell, Table};

/// Stream index for covariates drawn by `risk` when no data file is given.
const DESIGN_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Default, Serialize)]
pub struct Diagnostics {
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
}

/// Everything a command produces before it is written.
#[derive(Debug, Clone)]
pub struct Report {
    pub result: serde_json::Value,
    pub table: Table,
    pub diagnostics: Diagnostics,
}

#[derive(Serialize)]
struct ConfigEcho<'a> {
    #[serde(flatten)]
    config: &'a RunConfig,
    seed: u64,
    argv: Vec<String>,
}

#[derive(Serialize)]
struct Envelope<'a> {
    config: ConfigEcho<'a>,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<&'a serde_json::Value>,
    diagnostics: &'a Diagnostics,
}

/// Companion file holding the configuration of a CSV output.
pub fn meta_path(output: &std::path::Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Runs the command and writes its output; returns the process exit code.
pub fn run(config: &RunConfig) -> i32 {
    match execute(config).and_then(|report| write_report(config, &report)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn write_report(config: &RunConfig, report: &Report) -> Result<(), CliError> {
    let echo = || ConfigEcho {
        config,
        seed: config.seed(),
        argv: config.to_argv(),
    };
    match config.format {
        Format::Json => write_atomic(
            &config.output_path,
            &to_json(&Envelope {
                config: echo(),
                result: Some(&report.result),
                diagnostics: &report.diagnostics,
            }),
        ),
        Format::Csv => {
            write_atomic(&config.output_path, &report.table.to_csv())?;
            write_atomic(
                &meta_path(&config.output_path),
                &to_json(&Envelope {
                    config: echo(),
                    result: None,
                    diagnostics: &report.diagnostics,
                }),
            )
        }
    }
}

pub fn execute(config: &RunConfig) -> Result<Report, CliError> {
    match config.command {
        Command::Fit => fit(config),
        Command::Evidence => evidence(config, false),
        Command::Decompose => evidence(config, true),
        Command::Select => selection(config),
        Command::Risk => risk(config),
        Command::PolyDemo => poly_demo(config),
        Command::MackayDemo => mackay_demo(config),
        Command::BicSweep => sweep(config),
    }
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable result")
}

fn observations(config: &RunConfig) -> Result<ObservationSet, CliError> {
    let path = config
        .data_path
        .as_ref()
        .ok_or_else(|| CliError::Usage("missing required key --data".into()))?;
    read_observations(path)
}

fn sigma_lambda(config: &RunConfig) -> (f64, f64) {
    (
        config.real("sigma").expect("validated"),
        config.real("lambda").expect("validated"),
    )
}

fn settings(config: &RunConfig) -> EstimatorSettings {
    let mut s = EstimatorSettings {
        seed: config.seed(),
        ..EstimatorSettings::default()
    };
    if let Some(g) = config.int("grid") {
        s.grid_points = g as usize;
    }
    if let Some(n) = config.int("samples") {
        s.samples = n as usize;
    }
    s
}

struct Family {
    degrees: Vec<usize>,
    specs: Vec<GaussianLinearSpec>,
    set: ModelSet,
    column_scale: f64,
}

/// Polynomial models in `x` (scaled columns); without an `x` column only the intercept model exists.
fn family(
    obs: &ObservationSet,
    degrees: &[usize],
    sigma: f64,
    lambda: f64,
    diag: &mut Diagnostics,
) -> Result<Family, CliError> {
    match obs.x() {
        Some(x) => {
            let fam = polynomial_family(x, degrees, sigma, lambda)?;
            diag.warnings.extend(fam.warnings.iter().cloned());
            diag.notes.push(format!(
                "polynomial columns use x / {:e}; the prior applies to the scaled coefficients",
                fam.column_scale
            ));
            Ok(Family {
                degrees: fam.degrees,
                specs: fam.specs,
                set: fam.set,
                column_scale: fam.column_scale,
            })
        }
        None => {
            if degrees != [0] {
                return Err(CliError::Data(
                    "degrees above 0 need an 'x' column in the data".into(),
                ));
            }
            let spec = GaussianLinearSpec::from_rows(&vec![vec![1.0]; obs.len()], sigma, lambda)?;
            let set = ModelSet::uniform(vec![Member::Gaussian(spec.clone())])?
                .with_labels(vec!["degree-0".into()])?;
            Ok(Family {
                degrees: vec![0],
                specs: vec![spec],
                set,
                column_scale: 1.0,
            })
        }
    }
}

fn degrees(config: &RunConfig) -> Vec<usize> {
    match config.params.get("degrees") {
        Some(Value::Ints(v)) => v.iter().map(|&d| d as usize).collect(),
        _ => vec![config.int("degree").unwrap_or(0) as usize],
    }
}

fn fit(config: &RunConfig) -> Result<Report, CliError> {
    let obs = observations(config)?;
    let (sigma, lambda) = sigma_lambda(config);
    let mut diag = Diagnostics::default();
    let fam = family(&obs, &degrees(config), sigma, lambda, &mut diag)?;
    let spec = &fam.specs[0];
    let post = posterior(spec, &obs)?;
    let theta: Vec<f64> = post.theta_hat.iter().copied().collect();
    let sd = post.marginal_sd()?;
    let gram = gram_diagnostics(spec);
    if gram.rank_warning {
        diag.warnings.push("model matrix is numerically rank deficient".into());
    }
    let log_fit = glm_log_likelihood(spec, &obs, &theta)?;
    let mut table = Table::new(&["index", "theta_hat", "posterior_sd"]);
    for (i, (t, s)) in theta.iter().zip(&sd).enumerate() {
        table.push(vec![i.into(), (*t).into(), (*s).into()]);
    }
    Ok(Report {
        result: json!({
            "degree": fam.degrees[0],
            "n": obs.len(),
            "d": spec.d(),
            "column_scale": fam.column_scale,
            "theta_hat": theta,
            "posterior_sd": sd,
            "log_fit": log_fit,
            "gram": to_value(&gram),
        }),
        table,
        diagnostics: diag,
    })
}

fn evidence(config: &RunConfig, with_penalty: bool) -> Result<Report, CliError> {
    let obs = observations(config)?;
    let (sigma, lambda) = sigma_lambda(config);
    let mut diag = Diagnostics::default();
    let fam = family(&obs, &degrees(config), sigma, lambda, &mut diag)?;
    let spec = &fam.specs[0];
    let estimator = config.text("estimator").unwrap_or("glm-exact");
    let ev = EstimatorRegistry::builtin().estimate(
        estimator,
        &EvidenceTarget::Gaussian { spec, obs: &obs },
        &settings(config),
    )?;
    diag.notes.extend(ev.notes.iter().cloned());
    let err = ev.err_estimate.map(Cell::Real).unwrap_or(Cell::Text(String::new()));
    if !with_penalty {
        let mut table = Table::new(&["estimator", "log_evidence", "log_fit", "flexibility", "err_estimate"]);
        table.push(vec![
            ev.estimator.clone().into(),
            ev.log_evidence.into(),
            ev.log_fit.into(),
            ev.flexibility.into(),
            err,
        ]);
        let mut result = to_value(&ev);
        result["degree"] = json!(fam.degrees[0]);
        result["column_scale"] = json!(fam.column_scale);
        return Ok(Report {
            result,
            table,
            diagnostics: diag,
        });
    }
    let (d, n) = (spec.d(), obs.len());
    let penalty = match config.real("penalty") {
        Some(p) => PenaltyComparison::new(ev.flexibility, p, d, n)?,
        None => PenaltyComparison::against_bic(ev.flexibility, d, n)?,
    };
    let mut table = Table::new(&[
        "estimator",
        "log_evidence",
        "log_fit",
        "flexibility",
        "err_estimate",
        "bic_penalty",
        "supplied_penalty",
        "pen_prime",
        "d",
        "n",
    ]);
    table.push(vec![
        ev.estimator.clone().into(),
        ev.log_evidence.into(),
        ev.log_fit.into(),
        ev.flexibility.into(),
        err,
        penalty.bic_penalty.into(),
        penalty.supplied_penalty.into(),
        penalty.pen_prime.into(),
        d.into(),
        n.into(),
    ]);
    Ok(Report {
        result: json!({
            "degree": fam.degrees[0],
            "column_scale": fam.column_scale,
            "decomposition": to_value(&ev),
            "penalty": to_value(&penalty),
        }),
        table,
        diagnostics: diag,
    })
}

fn weighted(set: ModelSet, config: &RunConfig) -> Result<ModelSet, CliError> {
    Ok(match config.reals("weights") {
        Some(w) => set.with_normalized_weights(w.to_vec())?,
        None => set,
    })
}

fn selection(config: &RunConfig) -> Result<Report, CliError> {
    let obs = observations(config)?;
    let (sigma, lambda) = sigma_lambda(config);
    let mut diag = Diagnostics::default();
    let fam = family(&obs, &degrees(config), sigma, lambda, &mut diag)?;
    let set = weighted(fam.set, config)?;
    let rule: SelectionRule = config.text("rule").unwrap_or("max-evidence").parse()?;
    let cfg = SelectionConfig {
        registry: EstimatorRegistry::builtin(),
        estimator: config.text("estimator").map(str::to_string),
        settings: settings(config),
    };
    let outcome = select(&set, &obs, rule, &cfg)?;
    if outcome.tie_broken {
        diag.notes.push("tie broken toward the lowest index".into());
    }
    for (label, ev) in set.labels().iter().zip(&outcome.evidence) {
        diag.notes.extend(ev.notes.iter().map(|n| format!("{label}: {n}")));
    }
    let mut table = Table::new(&[
        "index",
        "label",
        "degree",
        "weight",
        "log_evidence",
        "log_fit",
        "flexibility",
        "log_score",
        "chosen",
    ]);
    for (i, ev) in outcome.evidence.iter().enumerate() {
        table.push(vec![
            i.into(),
            set.labels()[i].clone().into(),
            fam.degrees[i].into(),
            set.weights()[i].into(),
            ev.log_evidence.into(),
            ev.log_fit.into(),
            ev.flexibility.into(),
            outcome.log_scores[i].into(),
            (i == outcome.chosen).into(),
        ]);
    }
    Ok(Report {
        result: json!({
            "chosen_degree": fam.degrees[outcome.chosen],
            "chosen_label": set.labels()[outcome.chosen],
            "degrees": fam.degrees,
            "labels": set.labels(),
            "weights": set.weights(),
            "column_scale": fam.column_scale,
            "outcome": to_value(&outcome),
        }),
        table,
        diagnostics: diag,
    })
}

fn risk(config: &RunConfig) -> Result<Report, CliError> {
    let (sigma, lambda) = sigma_lambda(config);
    let n = config.int("n").expect("required") as usize;
    let seed = config.seed();
    let mut diag = Diagnostics::default();
    let x = match &config.data_path {
        Some(path) => {
            let obs = read_observations(path)?;
            let x = obs
                .x()
                .ok_or_else(|| CliError::Data("risk needs an 'x' column in the data".into()))?;
            if x.len() != n {
                return Err(CliError::Data(format!("data has {} rows but n is {n}", x.len())));
            }
            diag.notes.push("covariates taken from the data file; responses are simulated".into());
            x.to_vec()
        }
        None => {
            diag.notes.push("covariates drawn from N(0, 1)".into());
            standard_normals(seed, DESIGN_STREAM, n)
        }
    };
    let obs = ObservationSet::with_covariate(x.clone(), vec![0.0; n])?;
    let fam = family(&obs, &degrees(config), sigma, lambda, &mut diag)?;
    let set = weighted(fam.set, config)?;
    let cfg = SelectionConfig {
        settings: settings(config),
        ..SelectionConfig::default()
    };
    let reps = config.int("reps").expect("required") as usize;
    let report = risk_mc(&set, prior_predictive_draw, reps, &SelectionRule::ALL, seed, &cfg)?;
    let mut table = Table::new(&["rule", "risk"]);
    for (name, r) in report.rule_names.iter().zip(&report.risks) {
        table.push(vec![name.clone().into(), (*r).into()]);
    }
    Ok(Report {
        result: json!({
            "degrees": fam.degrees,
            "weights": set.weights(),
            "column_scale": fam.column_scale,
            "risk": to_value(&report),
        }),
        table,
        diagnostics: diag,
    })
}

fn poly_demo(config: &RunConfig) -> Result<Report, CliError> {
    let (sigma, lambda) = sigma_lambda(config);
    let report = sweet_spot_experiment(&SweetSpotConfig {
        true_degree: config.int("true-degree").expect("required") as usize,
        degrees: degrees(config),
        n: config.int("n").expect("required") as usize,
        sigma,
        lambda,
        reps: config.int("reps").expect("required") as usize,
        seed: config.seed(),
    })?;
    let mut table = Table::new(&["degree", "chosen_count", "chosen_frequency", "mean_rmse"]);
    for (i, &d) in report.degrees.iter().enumerate() {
        table.push(vec![
            d.into(),
            report.chosen_counts[i].into(),
            report.chosen_frequency[i].into(),
            report.mean_rmse[i].into(),
        ]);
    }
    Ok(Report {
        result: to_value(&report),
        table,
        diagnostics: Diagnostics::default(),
    })
}

fn mackay_demo(config: &RunConfig) -> Result<Report, CliError> {
    let sigma = config.real("sigma").expect("defaulted");
    let simple = GaussianLinearSpec::from_rows(&[vec![1.0]], sigma, config.real("lambda-simple").expect("defaulted"))?;
    let complex =
        GaussianLinearSpec::from_rows(&[vec![1.0]], sigma, config.real("lambda-complex").expect("defaulted"))?;
    let (lo, hi) = (config.real("y-min").expect("defaulted"), config.real("y-max").expect("defaulted"));
    let m = config.int("grid").expect("defaulted") as usize;
    let grid: Vec<f64> = (0..m)
        .map(|i| if i + 1 == m { hi } else { lo + (hi - lo) * i as f64 / (m - 1) as f64 })
        .collect();
    let report = mackay_crossover(&simple, &complex, &grid)?;
    let mut table = Table::new(&["kind", "y", "log_evidence_simple", "log_evidence_complex"]);
    for (i, &y) in report.y_grid.iter().enumerate() {
        table.push(vec![
            "grid".into(),
            y.into(),
            report.log_evidence_simple[i].into(),
            report.log_evidence_complex[i].into(),
        ]);
    }
    for c in &report.crossovers {
        let at = ObservationSet::new(vec![c.y])?;
        table.push(vec![
            "crossover".into(),
            c.y.into(),
            glm_log_evidence(&simple, &at)?.log_evidence.into(),
            glm_log_evidence(&complex, &at)?.log_evidence.into(),
        ]);
    }
    let mut diag = Diagnostics::default();
    diag.notes.push(format!("{} crossovers located", report.crossovers.len()));
    if !report.both_regions_found {
        diag.warnings
            .push("grid does not reach both the simple and the complex region".into());
    }
    Ok(Report {
        result: to_value(&report),
        table,
        diagnostics: diag,
    })
}

fn sweep(config: &RunConfig) -> Result<Report, CliError> {
    let (sigma, lambda) = sigma_lambda(config);
    let ns: Vec<usize> = config.ints("ns").expect("required").iter().map(|&n| n as usize).collect();
    let seed = config.seed();
    let result = match config.text("design") {
        Some("constant") => bic_sweep(constant_design_generator(sigma, lambda), &ns, seed)?,
        _ => {
            let theta = config.reals("theta").expect("defaulted").to_vec();
            bic_sweep(polynomial_design_generator(theta, sigma, lambda), &ns, seed)?
        }
    };
    let mut table = Table::new(&["n", "flexibility", "bic_penalty", "gap", "predicted_constant"]);
    for (i, &n) in result.ns.iter().enumerate() {
        table.push(vec![
            n.into(),
            result.flexibilities[i].into(),
            bic_penalty(result.d, n).into(),
            result.gaps[i].into(),
            result.predicted_constant.into(),
        ]);
    }
    let mut out = to_value(&result);
    out["gap_steps"] = json!(result.gap_steps());
    Ok(Report {
        result: out,
        table,
        diagnostics: Diagnostics::default(),
    })
}
