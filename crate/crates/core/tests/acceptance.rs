//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p wjgap-core --test acceptance`.

mod common;

use std::panic;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use wjgap_core::dynamics::*;
use wjgap_core::functionals::{dissipation_1d, hessian_gap, hwi_gap, j_functional_1d, entropy_dissipation_gap};
use wjgap_core::inequalities::*;
use wjgap_core::measures::{fisher_information, relative_entropy, sample, Expectation};
use wjgap_core::transport::w2_exact_1d;
use wjgap_core::{GridMeasure, ScalarField, VectorField};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! check {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn gaussian_optimality() -> Outcome {
    let start = Instant::now();
    let e = entry("gaussian");
    let nu = reference("gaussian");
    let family = TestFamily::translates(&e, &nu).unwrap().union(TestFamily::dilations(&e, &nu).unwrap());
    let est = wj_constant_estimate(&nu, &e.gradient, &family).map_err(|e| e.to_string())?;
    check!((est.report.value - 1.0).abs() <= 5e-3, "estimate {}", est.report.value);
    for m in &est.members {
        let expected = match m.kind {
            MemberKind::Translate => 1.0,
            _ => 1.0 + 1.0 / m.parameter,
        };
        check!((m.ratio - expected).abs() <= 1e-3, "{}: ratio {} expected {expected}", m.description, m.ratio);
    }
    let elapsed = start.elapsed();
    check!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!("estimate {:.6}, minimizer {}", est.report.value, est.minimizer().description))
}

fn quartic_dichotomy() -> Outcome {
    let start = Instant::now();
    // zero diffusion: closed form against an independent RK4 flow
    let mu0 = normal_on(-1.0, 5.0, 600, 2.0, 0.5);
    let mut worst = 0.0f64;
    for t in [0.0, 0.5, 1.0, 5.0, 20.0, 50.0] {
        let closed = quartic_zero_diffusion_w2(&mu0, t);
        let flow = mu0.expectation(&|x| cubic_flow(x[0], t, 20_000).powi(2));
        worst = worst.max((closed - flow).abs());
    }
    check!(worst < 1e-6, "closed form vs flow {worst:e}");
    let times: Vec<f64> = (1..=50).map(|t| t as f64).collect();
    let series: Vec<f64> = times.iter().map(|t| quartic_zero_diffusion_w2(&mu0, *t)).collect();
    let poly = decay_rate_fit(&times, &series).map_err(|e| e.to_string())?;
    check!(!poly.exponential && poly.r_squared < EXPONENTIAL_R2, "zero-diffusion fit {poly:?}");

    let e = entry("quartic");
    let drift = DriftSpec::from_catalog(&e);
    let mut rates = Vec::new();
    for n in [400, 800, 1600] {
        let nu = e.grid_measure_on(-5.5, 5.5, n).unwrap();
        let mu0 = normal_on(-5.5, 5.5, n, 2.0, 0.5);
        let dt = fp_max_stable_dt(&mu0, &drift).map_err(|e| e.to_string())?;
        let tr = fp_solve_1d_at(&mu0, &drift, &uniform_times(4.0, 0.1), dt).map_err(|e| e.to_string())?;
        let (t, w): (Vec<f64>, Vec<f64>) = tr
            .times
            .iter()
            .zip(&tr.states)
            .filter(|(t, _)| **t >= 1.0)
            .map(|(t, s)| (*t, w2_exact_1d(s, &nu)))
            .unzip();
        let fit = decay_rate_fit(&t, &w).map_err(|e| e.to_string())?;
        check!(fit.r_squared > 0.99 && fit.rate > 0.0, "n {n}: {fit:?}");
        rates.push(fit.rate);
    }
    for w in rates.windows(2) {
        check!((w[1] / w[0] - 1.0).abs() < 0.1, "rates {rates:?}");
    }
    let elapsed = start.elapsed();
    check!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("zero-diffusion R² {:.4}, diffusive rates {:.4?}", poly.r_squared, rates))
}

fn contraction_exactness() -> Outcome {
    let g = reference("gaussian");
    let x0 = sample(&g, 500, 1).unwrap();
    let y0 = sample(&g, 500, 2).unwrap().translated(&[1.0]);
    let mut worst = 0.0f64;
    for c in [0.5, 1.0, 2.0] {
        let opts = SdeOptions::new(2.0, 1e-3, 3).scheme(Scheme::SplitRk4).times(uniform_times(2.0, 0.1));
        let tr = coupled_sde_with(&x0, &y0, &DriftSpec::linear(1, c), &opts).map_err(|e| e.to_string())?;
        let m = tr.metric(COUPLING_METRIC).unwrap();
        for (t, v) in tr.times.iter().zip(m) {
            worst = worst.max((v / ((-2.0 * c * t).exp() * m[0]) - 1.0).abs());
        }
    }
    check!(worst < 1e-10, "linear relative error {worst:e}");
    let e = entry("quartic");
    let q = e.grid_measure(2000).unwrap();
    let (x0, y0) = (sample(&q, 2000, 4).unwrap(), sample(&q, 2000, 5).unwrap().translated(&[0.5]));
    let opts = SdeOptions::new(2.0, 1e-3, 6).scheme(Scheme::SplitRk4).times(uniform_times(2.0, 0.1));
    let tr = coupled_sde_with(&x0, &y0, &DriftSpec::from_catalog(&e), &opts).map_err(|e| e.to_string())?;
    let m = tr.metric(COUPLING_METRIC).unwrap();
    let se = tr.metric(COUPLING_SE_METRIC).unwrap();
    for k in 1..m.len() {
        check!(m[k] <= m[k - 1] + 3.0 * se[k], "quartic coupling grew at t {}", tr.times[k]);
    }
    Ok(format!("linear relative error {worst:.1e}, quartic E|X−Y|² {:.4} → {:.4}", m[0], m[m.len() - 1]))
}

fn hessian_gap_positivity() -> Outcome {
    let mut r = rng(101);
    for _ in 0..10_000 {
        let d: f64 = 100.0 * (1.0 - rand::Rng::random::<f64>(&mut r));
        let g = hessian_gap(d).map_err(|e| e.to_string())?;
        check!(g >= 0.0, "hessian_gap({d}) = {g}");
    }
    let mut worst = f64::INFINITY;
    let mut pairs = 0;
    for name in ["gaussian", "quartic"] {
        let e = entry(name);
        let nu = reference(name);
        let mut measures: Vec<GridMeasure> = (0..50).map(|_| random_measure(&mut r, &nu)).collect();
        measures.extend(TestFamily::standard(&e, &nu).unwrap().members.into_iter().map(|m| m.measure));
        for mu in &measures {
            let j = j_functional_1d(mu, &nu, &e.gradient).map_err(|e| e.to_string())?;
            worst = worst.min(j.integrand_min);
            pairs += 1;
        }
    }
    check!(worst >= -1e-8, "integrand_min {worst:e}");
    Ok(format!("10⁴ gaps nonnegative, {pairs} pairs with integrand_min ≥ {worst:.2e}"))
}

fn inequality_residuals() -> Outcome {
    let mut r = rng(102);
    let mut worst_hwi = f64::INFINITY;
    let mut worst_edg = f64::INFINITY;
    let mut pairs = 0;
    for (name, lambda1) in [("gaussian", 1.0), ("quartic", 0.0), ("double_well", -1.0)] {
        let e = entry(name);
        let nu = reference(name);
        for _ in 0..40 {
            let mu = random_measure(&mut r, &nu);
            worst_hwi = worst_hwi.min(hwi_gap(&mu, &nu, lambda1).map_err(|e| e.to_string())?);
            worst_edg = worst_edg.min(entropy_dissipation_gap(&mu, &nu, &e.gradient, lambda1, 0.0).map_err(|e| e.to_string())?);
            pairs += 1;
        }
    }
    check!(worst_hwi >= -1e-4, "hwi_gap {worst_hwi:e}");
    check!(worst_edg >= -1e-4, "entropy_dissipation_gap {worst_edg:e}");
    let nu = normal(0.0, 1.0);
    let id = VectorField::from_1d(|x| x);
    let mut translate = 0.0f64;
    for a in [-1.0, -0.3, 0.4, 1.2] {
        let mu = normal(a, 1.0);
        translate = translate.max(hwi_gap(&mu, &nu, 1.0).unwrap().abs());
        translate = translate.max(entropy_dissipation_gap(&mu, &nu, &id, 1.0, 0.0).unwrap().abs());
    }
    check!(translate <= 1e-6, "translate residual {translate:e}");
    Ok(format!("{pairs} pairs: min hwi {worst_hwi:.2e}, min entropy-dissipation {worst_edg:.2e}; translates {translate:.1e}"))
}

fn entropy_dissipation() -> Outcome {
    let cases = [
        ("gaussian", normal_on(-10.0, 10.0, 2000, 2.0, 1.0)),
        ("gaussian", normal_on(-10.0, 10.0, 2000, 0.5, 0.5)),
        ("double_well", normal_on(-4.5, 4.5, 900, 1.0, 0.3)),
        ("quartic", normal_on(-3.0, 3.0, 600, 0.5, 0.3)),
    ];
    let mut worst = 0.0f64;
    for (name, mu0) in cases {
        let e = entry(name);
        let drift = DriftSpec::from_catalog(&e);
        let nu = e.grid_measure_on(mu0.lo(), mu0.hi(), mu0.n_cells()).unwrap();
        let dt = fp_max_stable_dt(&mu0, &drift).map_err(|e| e.to_string())?;
        let times = uniform_times(1.0, 0.005);
        let tr = fp_solve_1d_at(&mu0, &drift, &times, dt).map_err(|e| e.to_string())?;
        let keep: Vec<usize> = (0..times.len()).filter(|&i| times[i] >= 0.05 - 1e-12).collect();
        let h: Vec<f64> = keep.iter().map(|&i| relative_entropy(&tr.states[i], &nu).unwrap()).collect();
        let fi: Vec<f64> = keep.iter().map(|&i| fisher_information(&tr.states[i], &nu).unwrap()).collect();
        let ts: Vec<f64> = keep.iter().map(|&i| times[i]).collect();
        let rel = (h[h.len() - 1] - h[0] + trapezoid(&ts, &fi)).abs() / h[0];
        check!(rel < 0.02, "{name}: relative imbalance {rel}");
        worst = worst.max(rel);
    }
    Ok(format!("worst relative imbalance {worst:.2e} over 4 runs"))
}

fn dissipation_identity() -> Outcome {
    let e = entry("gaussian");
    let drift = DriftSpec::from_catalog(&e);
    let a = drift.drift();
    let nu = e.grid_measure_on(-10.0, 10.0, 2000).unwrap();
    let mu0 = GridMeasure::from_log_density(-10.0, 10.0, 2000, |x| {
        let l1 = -0.5 * ((x - 2.0) / 0.6f64).powi(2) - 0.6f64.ln();
        let l2 = -0.5 * ((x + 0.5) / 0.8f64).powi(2) - 0.8f64.ln() + 0.5f64.ln();
        l1.max(l2) + (1.0 + (-(l1 - l2).abs()).exp()).ln()
    })
    .unwrap();
    let dt = fp_max_stable_dt(&mu0, &drift).map_err(|e| e.to_string())?;
    let h = 0.01;
    let centres: Vec<f64> = (1..=10).map(|k| 0.1 * k as f64).collect();
    let mut times = vec![0.0];
    for c in &centres {
        times.extend([c - h, *c, c + h]);
    }
    let tr = fp_solve_1d_at(&mu0, &drift, &times, dt).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (k, c) in centres.iter().enumerate() {
        let half_w2 = |i: usize| 0.5 * w2_exact_1d(&tr.states[i], &nu).powi(2);
        let derivative = (half_w2(3 + 3 * k) - half_w2(1 + 3 * k)) / (2.0 * h);
        let d = dissipation_1d(&tr.states[2 + 3 * k], &nu, &a).map_err(|e| e.to_string())?;
        let rel = (derivative + d).abs() / d;
        check!(rel < 0.05, "t {c}: d/dt ½W² {derivative} vs −D {}", -d);
        worst = worst.max(rel);
    }
    Ok(format!("worst relative mismatch {worst:.2e} on t ∈ [0.1, 1]"))
}

fn derived_formulas() -> Outcome {
    let agswh = derived_agswh(2.0, 1.0, 0.0);
    check!(agswh.value == 1.5 && agswh.valid, "agswh {agswh:?}");
    check!(!derived_agswh(1.0, -2.0, 0.0).valid, "agswh validity");
    let t = derived_tensorization(&[1.0, 2.0, 3.0]).map_err(|e| e.to_string())?;
    check!(t.value == 1.0, "tensorization {}", t.value);
    let p = derived_perturbation(1.0, 0.0, 0.0, 0.0).map_err(|e| e.to_string())?;
    check!(p.value == 1.0 && p.valid, "perturbation {p:?}");
    let p = derived_perturbation(1.0, 0.0, 0.0, 0.5).map_err(|e| e.to_string())?;
    check!((p.value - (-1f64).exp()).abs() < 1e-15, "perturbation K=0.5 {}", p.value);
    let ours = derived_lsi(1.0, -1.0).map_err(|e| e.to_string())?.value;
    let theirs = alternative_lsi(1.0, -1.0).map_err(|e| e.to_string())?.value;
    check!((ours - 4.0 / 9.0).abs() < 1e-15, "lsi {ours}");
    check!((theirs - 1.0 / 3.0).abs() < 1e-15 && theirs < ours, "alternative {theirs}");
    Ok(format!("WJ 1.5, min 1, perturbed 1, LSI {ours:.6} > {theirs:.6}"))
}

fn far_pairs_k_over_three() -> Outcome {
    let cubic = VectorField::from_1d(|x| x.powi(3));
    let r = monotone_at_infinity_check(&cubic, 1.0, 3.0, 100_000, 7).map_err(|e| e.to_string())?;
    check!(r.passed && r.worst_far_ratio >= 1.0 - 1e-9, "x³: {r:?}");
    let neg = VectorField::from_1d(|x| -x);
    let bad = monotone_at_infinity_check(&neg, 1.0, 3.0, 100_000, 8).map_err(|e| e.to_string())?;
    check!(!bad.passed && !bad.global_monotone, "−x was not rejected");
    Ok(format!("x³ worst far ratio {:.6} over 10⁵ pairs; −x rejected (worst {:.3})", r.worst_far_ratio, bad.worst_global_ratio))
}

fn nongradient_stationarity() -> Outcome {
    let v = ScalarField::new(2, |x| 0.5 * (x[0] * x[0] + x[1] * x[1]));
    let grad = VectorField::scaled_identity(2, 1.0);
    let f = make_rotational_F(&grad, [[0.0, 1.0], [-1.0, 0.0]]).map_err(|e| e.to_string())?;
    let residual = stationarity_residual(&v, &f, &NodeGrid::square(-4.0, 4.0, 2, 41)).map_err(|e| e.to_string())?;
    check!(residual < 1e-6, "residual {residual:e}");
    let plain = DriftSpec::linear(2, 1.0);
    let rotated = plain.clone().with_perturbation(f, Some(0.0)).map_err(|e| e.to_string())?;
    let domain = [(-3.0, 3.0), (-3.0, 3.0)];
    let a = sturm_vonrenesse_probe(&plain, &domain, 400, 11).map_err(|e| e.to_string())?;
    let b = sturm_vonrenesse_probe(&rotated, &domain, 400, 11).map_err(|e| e.to_string())?;
    let tol = 3.0 * (a.c_dyn_se.powi(2) + b.c_dyn_se.powi(2)).sqrt() + 1e-9;
    check!((a.c_dyn - b.c_dyn).abs() <= tol, "rates {} vs {} (tol {tol:e})", a.c_dyn, b.c_dyn);
    Ok(format!("residual {residual:.1e}; rates {:.6} vs {:.6}", a.c_dyn, b.c_dyn))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("AC1 gaussian optimality", gaussian_optimality),
        ("AC2 quartic dichotomy", quartic_dichotomy),
        ("AC3 contraction exactness", contraction_exactness),
        ("AC4 hessian-gap positivity", hessian_gap_positivity),
        ("AC5 inequality residuals", inequality_residuals),
        ("AC6 entropy dissipation", entropy_dissipation),
        ("AC7 dissipation identity", dissipation_identity),
        ("AC8 derived formulas", derived_formulas),
        ("AC9 far-pair K/3", far_pairs_k_over_three),
        ("AC10 non-gradient stationarity", nongradient_stationarity),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(run).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name} ({secs:.1}s): {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
