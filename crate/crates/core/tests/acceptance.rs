//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::time::{Duration, Instant};

use common::*;
use ockham::evidence::*;
use ockham::generic::map_optimize;
use ockham::glm::*;
use ockham::rng::stream;
use ockham::selection::*;
use ockham::ObservationSet;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(elapsed: Duration, limit_secs: f64) -> bool {
    elapsed.as_secs_f64() < limit_secs
}

/// Randomized GLM instance in the ranges n ≤ 50, d ≤ 8, σ ∈ [0.2, 2], λ ∈ [0.1, 10].
fn ranged_instance(rng: &mut ockham::rng::StreamRng) -> (GaussianLinearSpec, ObservationSet) {
    let n = 1 + (uniform(rng, 0.0, 50.0) as usize).min(49);
    let d = 1 + (uniform(rng, 0.0, 8.0) as usize).min(7);
    let sigma = uniform(rng, 0.2, 2.0);
    let lambda = uniform(rng, 0.1, 10.0);
    random_glm(rng, n, d, sigma, lambda)
}

fn c1_exact_decomposition() -> Outcome {
    let start = Instant::now();
    let mut rng = stream(0, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (spec, obs) = ranged_instance(&mut rng);
        let ev = glm_log_evidence(&spec, &obs).unwrap();
        worst = worst.max((ev.log_evidence - marginal_gaussian_oracle(&spec, &obs)).abs());
    }
    let t = start.elapsed();
    check(worst < 1e-8 && within(t, 5.0), format!("max |exact - oracle| = {worst:.2e} (< 1e-8), {t:.2?} (< 5 s)"))
}

fn c2_candidate_invariance() -> Outcome {
    let start = Instant::now();
    let mut rng = stream(0, 2);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (spec, obs) = ranged_instance(&mut rng);
        let vals: Vec<f64> = (0..10)
            .map(|_| {
                let t: Vec<f64> = (0..spec.d()).map(|_| normal(&mut rng)).collect();
                evidence_via_candidate(&spec, &obs, &t).unwrap()
            })
            .collect();
        let spread = vals.iter().cloned().fold(f64::MIN, f64::max) - vals.iter().cloned().fold(f64::MAX, f64::min);
        worst = worst.max(spread);
    }
    let t = start.elapsed();
    check(worst < 1e-9 && within(t, 1.0), format!("max spread = {worst:.2e} (< 1e-9), {t:.2?} (< 1 s)"))
}

fn c3_laplace_exactness() -> Outcome {
    let start = Instant::now();
    let settings = EstimatorSettings::default();
    let mut worst: f64 = 0.0;
    for i in 0..20u64 {
        let d = 1 + (i % 4) as usize;
        let (spec, obs) = random_glm_seeded(300 + i, 10 + 2 * i as usize, d, 0.5 + 0.075 * i as f64, 0.5 + 0.1 * i as f64);
        let exact = glm_log_evidence(&spec, &obs).unwrap().log_evidence;
        let lap = Laplace
            .estimate(&EvidenceTarget::Gaussian { spec: &spec, obs: &obs }, &settings)
            .unwrap();
        worst = worst.max((lap.log_evidence - exact).abs());
    }
    let t = start.elapsed();
    check(worst < 1e-6 && within(t, 5.0), format!("max |laplace - exact| = {worst:.2e} (< 1e-6), {t:.2?} (< 5 s)"))
}

fn c4_quadrature() -> Outcome {
    let start = Instant::now();
    let settings = EstimatorSettings { grid_points: 2001, ..EstimatorSettings::default() };
    let mut worst: f64 = 0.0;
    for (seed, n, d) in [(5u64, 10usize, 1usize), (41, 25, 1), (9, 15, 2), (42, 30, 2)] {
        let (spec, obs) = random_glm_seeded(seed, n, d, 1.0, 1.0);
        let exact = glm_log_evidence(&spec, &obs).unwrap().log_evidence;
        let q = Quadrature
            .estimate(&EvidenceTarget::Gaussian { spec: &spec, obs: &obs }, &settings)
            .unwrap();
        worst = worst.max((q.log_evidence - exact).abs());
    }
    let t = start.elapsed();
    check(worst < 1e-4 && within(t, 10.0), format!("max |quadrature - exact| = {worst:.2e} (< 1e-4), {t:.2?} (< 10 s)"))
}

fn c5_importance() -> Outcome {
    let start = Instant::now();
    let samples = 100_000;
    let (mut worst, mut min_ess_frac): (f64, f64) = (0.0, f64::INFINITY);
    for i in 0..10u64 {
        let d = 1 + (i % 4) as usize;
        let (spec, obs) = random_glm_seeded(500 + i, 20 + 2 * i as usize, d, 1.0, 1.0);
        let exact = glm_log_evidence(&spec, &obs).unwrap().log_evidence;
        let model = spec.to_generic(&obs).unwrap();
        let map = map_optimize(&model, &vec![0.0; d]).unwrap();
        let curv = laplace_curvature(&model, &map.theta).unwrap();
        let out = evidence_importance(
            &model,
            &spec.normalized_prior(),
            &map.theta,
            &GaussianProposal { mean: map.theta.clone(), precision: curv.hessian },
            &ImportanceSettings { samples, seed: i, inflation: 1.5 },
        )
        .unwrap();
        worst = worst.max((out.decomposition.log_evidence - exact).abs());
        min_ess_frac = min_ess_frac.min(out.effective_sample_size / samples as f64);
    }
    let t = start.elapsed();
    check(
        worst < 0.05 && min_ess_frac > 0.2 && within(t, 30.0),
        format!("max |IS - exact| = {worst:.2e} (< 0.05), min ESS/draws = {min_ess_frac:.3} (> 0.2), {t:.2?} (< 30 s)"),
    )
}

fn c6_flexibility_limits() -> Outcome {
    let mut rng = stream(0, 0);
    let mut min_flex = f64::INFINITY;
    for _ in 0..100 {
        let (spec, obs) = ranged_instance(&mut rng);
        min_flex = min_flex.min(flexibility_exact(&spec, &obs).unwrap());
    }
    let (base, obs) = random_glm_seeded(6, 20, 2, 1.0, 1.0);
    let at = |lambda: f64| {
        flexibility_exact(&GaussianLinearSpec::new(base.g().clone(), 1.0, lambda).unwrap(), &obs).unwrap()
    };
    let (f10, f1000) = (at(10.0), at(1e3));
    check(
        min_flex >= 0.0 && f1000 < 1e-2 && f1000 < f10,
        format!("min flexibility = {min_flex:.3e} (>= 0), flex(λ=1e3) = {f1000:.3e} (< 1e-2), flex(λ=10) = {f10:.3e}"),
    )
}

fn c7_bic_asymptotics() -> Outcome {
    let start = Instant::now();
    let ns = [100, 1_000, 10_000, 100_000];
    let sweep = bic_sweep(polynomial_design_generator(vec![1.0, -0.5], 1.0, 1.0), &ns, 13).unwrap();
    let final_gap = (sweep.gaps[3] - sweep.predicted_constant).abs();
    let steps = sweep.gap_steps();
    let decreasing = steps.windows(2).all(|w| w[1] < w[0]);
    let ones = bic_sweep(constant_design_generator(1.0, 1.0), &ns, 13).unwrap();
    let analytic = ns.iter().zip(&ones.gaps).all(|(&n, g)| {
        let n = n as f64;
        (g - (0.5 * (1.0 + n).ln() - 0.5 * n.ln())).abs() < 1e-12
    });
    let ones_final = ones.gaps[3];
    let t = start.elapsed();
    check(
        final_gap < 0.1 && decreasing && analytic && ones_final < 5e-6 && within(t, 10.0),
        format!(
            "|gap(1e5) - constant| = {final_gap:.3e} (< 0.1), gap steps {steps:?} strictly decreasing = {decreasing}, \
             all-ones final gap = {ones_final:.3e} (< 5e-6), {t:.2?} (< 10 s)"
        ),
    )
}

fn c8_crossover() -> Outcome {
    let start = Instant::now();
    let simple = GaussianLinearSpec::from_rows(&[vec![1.0]], 1.0, 10.0).unwrap();
    let complex = GaussianLinearSpec::from_rows(&[vec![1.0]], 1.0, 0.1).unwrap();
    let grid: Vec<f64> = (0..=5000).map(|i| -25.0 + 50.0 * i as f64 / 5000.0).collect();
    let rep = mackay_crossover(&simple, &complex, &grid).unwrap();
    let diff = |y: f64| {
        let o = ObservationSet::new(vec![y]).unwrap();
        glm_log_evidence(&simple, &o).unwrap().log_evidence - glm_log_evidence(&complex, &o).unwrap().log_evidence
    };
    let residual = rep.crossovers.iter().map(|c| c.residual).fold(0.0, f64::max);
    let t = start.elapsed();
    let pass = rep.crossovers.len() == 2
        && diff(0.0) > 0.0
        && diff(20.0) < 0.0
        && diff(-20.0) < 0.0
        && residual < 1e-8
        && within(t, 1.0);
    check(
        pass,
        format!(
            "{} crossovers at {:?} (= 2), residual {residual:.1e} (< 1e-8), simple wins at 0: {}, loses at ±20: {}, {t:.2?} (< 1 s)",
            rep.crossovers.len(),
            rep.crossovers.iter().map(|c| c.y).collect::<Vec<_>>(),
            diff(0.0) > 0.0,
            diff(20.0) < 0.0 && diff(-20.0) < 0.0
        ),
    )
}

fn c9_sweet_spot() -> Outcome {
    let start = Instant::now();
    let rep = sweet_spot_experiment(&SweetSpotConfig {
        true_degree: 3,
        degrees: (0..10).collect(),
        n: 100,
        sigma: 1.0,
        lambda: 1.0,
        reps: 200,
        seed: 8,
    })
    .unwrap();
    let t = start.elapsed();
    let freq = rep.chosen_frequency[3];
    check(
        rep.modal_degree == 3 && freq >= 0.6 && rep.relative_regret <= 0.10 && within(t, 60.0),
        format!(
            "modal degree {} (= 3), frequency {freq:.3} (>= 0.6), regret {:.4} of best RMSE (<= 0.10), {t:.2?} (< 60 s)",
            rep.modal_degree, rep.relative_regret
        ),
    )
}

fn c10_selection_identities() -> Outcome {
    let cfg = SelectionConfig::default();
    let mut rng = stream(10, 0);
    let (mut fit_ok, mut rule_ok) = (0, 0);
    for _ in 0..50 {
        let n = 5 + (uniform(&mut rng, 0.0, 30.0) as usize);
        let members: Vec<Member> = (0..5)
            .map(|_| {
                let d = 1 + uniform(&mut rng, 0.0, 5.0) as usize;
                let sigma = uniform(&mut rng, 0.2, 2.0);
                let lambda = uniform(&mut rng, 0.1, 10.0);
                let (spec, _) = random_glm(&mut rng, n, d, sigma, lambda);
                Member::Gaussian(spec)
            })
            .collect();
        let set = ModelSet::uniform(members).unwrap();
        let obs = ObservationSet::new((0..n).map(|_| 2.0 * normal(&mut rng)).collect()).unwrap();
        let ev = select(&set, &obs, SelectionRule::MaxEvidence, &cfg).unwrap();
        let post = select(&set, &obs, SelectionRule::MaxPosterior, &cfg).unwrap();
        let fit_minus_flex: Vec<f64> = ev.evidence.iter().map(|e| e.log_fit - e.flexibility).collect();
        let log_e: Vec<f64> = ev.evidence.iter().map(|e| e.log_evidence).collect();
        if argmax_lowest_index(&fit_minus_flex).0 == argmax_lowest_index(&log_e).0 {
            fit_ok += 1;
        }
        if post.chosen == ev.chosen {
            rule_ok += 1;
        }
    }
    check(
        fit_ok == 50 && rule_ok == 50,
        format!("fit-minus-flexibility argmax agrees {fit_ok}/50, uniform max-posterior agrees {rule_ok}/50"),
    )
}

fn c11_risk() -> Outcome {
    let start = Instant::now();
    let mut rng = stream(2, 1_000);
    let x: Vec<f64> = (0..100).map(|_| normal(&mut rng)).collect();
    let fam = polynomial_family(&x, &[0, 4], 0.3, 1.0).unwrap();
    let cfg = SelectionConfig::default();
    let a = risk_mc(&fam.set, prior_predictive_draw, 500, &SelectionRule::ALL, 2, &cfg).unwrap();
    let b = risk_mc(&fam.set, prior_predictive_draw, 500, &SelectionRule::ALL, 2, &cfg).unwrap();
    let identical = a.risks.iter().zip(&b.risks).all(|(p, q)| p.to_bits() == q.to_bits())
        && a.true_model_counts == b.true_model_counts;
    let t = start.elapsed();
    check(
        a.risks[0] < 0.5 && identical && within(t, 30.0),
        format!("max-evidence risk {:.3} (< 0.5), bit-identical rerun = {identical}, {t:.2?} (< 30 s)", a.risks[0]),
    )
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 exact decomposition", c1_exact_decomposition),
        ("2 candidate-formula invariance", c2_candidate_invariance),
        ("3 Laplace exact on Gaussian models", c3_laplace_exactness),
        ("4 quadrature oracle", c4_quadrature),
        ("5 importance sampling", c5_importance),
        ("6 flexibility limits", c6_flexibility_limits),
        ("7 BIC asymptotics", c7_bic_asymptotics),
        ("8 evidence crossover", c8_crossover),
        ("9 sweet spot", c9_sweet_spot),
        ("10 selection identities", c10_selection_identities),
        ("11 risk harness", c11_risk),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let out = run();
        println!("[{}] criterion {name}: {}", if out.pass { "PASS" } else { "FAIL" }, out.detail);
        if !out.pass {
            failures += 1;
        }
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
