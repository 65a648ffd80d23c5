//! The built-in experiment registry.

use wjgap_core::dynamics::{
    fp_max_stable_dt, fp_solve_1d_at, make_rotational_F, quartic_zero_diffusion_w2, stationarity_residual,
    uniform_times, DriftSpec, NodeGrid,
};
use wjgap_core::functionals::j_functional_nd;
use wjgap_core::inequalities::{
    decay_rate_fit, derived_lsi, derived_perturbation, derived_tensorization, derived_wh_from_decay,
    monotone_at_infinity_check, poincare_constant_1d, sturm_vonrenesse_probe_with, wj_constant_estimate,
    wj_product_estimate, ConstantReport, DecayFit, MemberKind, ProductFactor, SvrOptions, TestFamily,
};
use wjgap_core::measures::sample;
use wjgap_core::transport::w2_exact_1d;
use wjgap_core::{catalog, CatalogEntry, CatalogParams, GridMeasure, Result};

use crate::config::{Defaults, Params};

/// One `(t, metric, value)` row; sweeps put their parameter in `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub t: f64,
    pub metric: String,
    pub value: f64,
}

/// A line plot of metrics already present in `metrics.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub file: &'static str,
    pub title: String,
    pub x_label: &'static str,
    pub metrics: Vec<String>,
    pub log_y: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outputs {
    pub metrics: Vec<MetricRow>,
    pub reports: Vec<ConstantReport>,
    pub plots: Vec<PlotSpec>,
    /// Human-readable lines printed after a successful run.
    pub summary: Vec<String>,
}

impl Outputs {
    fn series(&mut self, metric: &str, t: &[f64], values: &[f64]) {
        for (t, v) in t.iter().zip(values) {
            self.metrics.push(MetricRow { t: *t, metric: metric.into(), value: *v });
        }
    }

    fn plot(&mut self, file: &'static str, title: &str, x_label: &'static str, metrics: &[&str], log_y: bool) {
        self.plots.push(PlotSpec {
            file,
            title: title.into(),
            x_label,
            metrics: metrics.iter().map(|m| m.to_string()).collect(),
            log_y,
        });
    }

    fn report(&mut self, r: ConstantReport) {
        self.summary.push(format!("{:<12} {:>12.6} {:<16} {}", r.name, r.value, r.kind.as_str(), r.notes()));
        self.reports.push(r);
    }
}

pub struct ExperimentInfo {
    pub name: &'static str,
    /// The result the experiment reproduces.
    pub anchor: &'static str,
    pub measures: &'static [&'static str],
    pub defaults: Defaults,
    pub run: fn(&Params) -> Result<Outputs>,
}

const fn defaults(measure: &'static str, t_end: f64, grid_cells: usize) -> Defaults {
    Defaults { measure, t_end, grid_cells, particles: 500, pairs: 400 }
}

pub static REGISTRY: [ExperimentInfo; 8] = [
    ExperimentInfo {
        name: "gaussian_sanity",
        anchor: "Gaussian benchmark: spectral gap 1, optimal WJ constant 1 attained by translates, OU decay at rate 1",
        measures: &["gaussian"],
        defaults: defaults("gaussian", 3.0, 2000),
        run: gaussian_sanity,
    },
    ExperimentInfo {
        name: "quartic_rates",
        anchor: "Quartic potential: polynomial decay without diffusion, exponential decay with diffusion",
        measures: &["quartic"],
        defaults: defaults("quartic", 4.0, 800),
        run: quartic_rates,
    },
    ExperimentInfo {
        name: "double_well_wj",
        anchor: "WJ constant of a nonconvex potential estimated over test families, with the LSI constant it implies",
        measures: &["double_well", "quartic", "gaussian"],
        defaults: defaults("double_well", 1.0, 2000),
        run: double_well_wj,
    },
    ExperimentInfo {
        name: "rotational_2d",
        anchor: "Non-gradient stationary drift: a rotation keeps the Gaussian invariant and adds no contraction",
        measures: &["gaussian_2d"],
        defaults: defaults("gaussian_2d", 2.0, 41),
        run: rotational_2d,
    },
    ExperimentInfo {
        name: "tensorization_2d",
        anchor: "Tensorization: a product measure satisfies WJ with the smallest factor constant",
        measures: &["gaussian", "quartic", "double_well"],
        defaults: defaults("gaussian", 1.0, 400),
        run: tensorization_2d,
    },
    ExperimentInfo {
        name: "perturbation_sweep",
        anchor: "Bounded perturbation: WJ constant Ce^{-2K} + β + α(1 − e^{-2K}) as the oscillation K grows",
        measures: &["gaussian", "quartic", "double_well"],
        defaults: defaults("gaussian", 2.0, 2000),
        run: perturbation_sweep,
    },
    ExperimentInfo {
        name: "svr_probe",
        anchor: "Synchronous-coupling contraction versus the uniform monotonicity constant of the drift",
        measures: &["quartic", "gaussian", "double_well"],
        defaults: defaults("quartic", 2.0, 2000),
        run: svr_probe,
    },
    ExperimentInfo {
        name: "inequality_hierarchy",
        anchor: "WJ implies Poincaré, LSI and WH: estimated constants against their derived bounds",
        measures: &["gaussian", "quartic", "double_well"],
        defaults: defaults("double_well", 4.0, 800),
        run: inequality_hierarchy,
    },
];

pub fn find(name: &str) -> Option<&'static ExperimentInfo> {
    REGISTRY.iter().find(|e| e.name == name)
}

fn entry(p: &Params) -> Result<CatalogEntry> {
    catalog(&p.measure, &p.catalog)
}

fn fit_report(label: &str, fit: &DecayFit) -> ConstantReport {
    let shape = if fit.exponential { "exponential" } else { "non-exponential" };
    let mut r = ConstantReport::estimated(
        "contraction",
        fit.rate,
        format!("{label}: log-linear fit, R² = {:.6}, {shape}", fit.r_squared),
    );
    r.valid = fit.exponential;
    r
}

/// Runs the grid solver from `mu0` towards `e^{-V}` and records `w2` every
/// `step`, plus `entropy` and `fisher` when `e^{-V}` does not underflow on
/// the grid.
fn decay_run(
    e: &CatalogEntry,
    mu0: &GridMeasure,
    p: &Params,
    step: f64,
    prefix: &str,
    out: &mut Outputs,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let drift = DriftSpec::from_catalog(e);
    let nu = e.grid_measure_on(mu0.lo(), mu0.hi(), mu0.n_cells())?;
    let dt = match p.dt {
        Some(dt) => dt,
        None => fp_max_stable_dt(mu0, &drift)?,
    };
    let mut tr = fp_solve_1d_at(mu0, &drift, &uniform_times(p.t_end, step), dt)?;
    if nu.min_density() > 0.0 {
        tr.record_against(&nu)?;
    } else {
        tr.record("w2", |mu| Ok(w2_exact_1d(mu, &nu)))?;
    }
    for (name, values) in &tr.metrics {
        out.series(&format!("{prefix}{name}"), &tr.times, values);
    }
    Ok((tr.times.clone(), tr.metric("w2").unwrap_or_default().to_vec()))
}

/// `N(m + shift·s, (0.5s)²)` on `m ± half_width·s`.
fn displaced_normal(p: &Params, shift: f64, half_width: f64) -> Result<GridMeasure> {
    let (m, s) = (p.catalog.mean, p.catalog.scale);
    let c = m + shift * s;
    GridMeasure::from_log_density(m - half_width * s, m + half_width * s, p.grid_cells, |x| {
        -0.5 * ((x - c) / (0.5 * s)).powi(2)
    })
}

fn gaussian_sanity(p: &Params) -> Result<Outputs> {
    let mut out = Outputs::default();
    let e = entry(p)?;
    let nu = e.grid_measure(p.grid_cells)?;
    out.report(poincare_constant_1d(&nu)?);
    let family = TestFamily::translates(&e, &nu)?.union(TestFamily::dilations(&e, &nu)?);
    let est = wj_constant_estimate(&nu, &e.gradient, &family)?;
    for kind in [MemberKind::Translate, MemberKind::Dilation] {
        let (t, v): (Vec<f64>, Vec<f64>) =
            est.members.iter().filter(|m| m.kind == kind).map(|m| (m.parameter, m.ratio)).unzip();
        out.series(&format!("wj_ratio_{}", kind.as_str()), &t, &v);
    }
    out.report(est.report);

    let (m, s) = (p.catalog.mean, p.catalog.scale);
    let v = e.potential.clone();
    let mu0 = GridMeasure::from_log_density(m - 10.0 * s, m + 10.0 * s, p.grid_cells, move |x| -v.eval_1d(x - 2.0 * s))?;
    let (t, w) = decay_run(&e, &mu0, p, 0.05, "", &mut out)?;
    let fit = decay_rate_fit(&t[1..], &w[1..])?;
    out.report(fit_report("W2 decay from a translate", &fit));
    out.plot("w2.svg", "W2 to equilibrium", "t", &["w2"], true);
    out.plot("wj_ratios.svg", "J/W2² over the family", "parameter", &["wj_ratio_translate", "wj_ratio_dilation"], false);
    Ok(out)
}

fn quartic_rates(p: &Params) -> Result<Outputs> {
    let mut out = Outputs::default();
    let e = entry(p)?;
    let mu0 = displaced_normal(p, 2.0, 5.5)?;

    let t: Vec<f64> = (1..=50).map(|k| k as f64).collect();
    let w2: Vec<f64> = t.iter().map(|t| quartic_zero_diffusion_w2(&mu0, *t)).collect();
    out.series("w2_squared_zero_diffusion", &t, &w2);
    out.report(fit_report("zero diffusion W2² on t in [1, 50]", &decay_rate_fit(&t, &w2)?));

    let (t, w) = decay_run(&e, &mu0, p, 0.1, "diffusive_", &mut out)?;
    let (tt, ww): (Vec<f64>, Vec<f64>) = t.iter().zip(&w).filter(|(t, _)| **t >= 1.0).map(|(t, w)| (*t, *w)).unzip();
    out.report(fit_report("diffusive W2 on t >= 1", &decay_rate_fit(&tt, &ww)?));
    out.report(poincare_constant_1d(&e.grid_measure(2000)?)?);
    out.plot("zero_diffusion.svg", "W2² without diffusion", "t", &["w2_squared_zero_diffusion"], true);
    out.plot("diffusive.svg", "W2 with diffusion", "t", &["diffusive_w2"], true);
    Ok(out)
}

fn double_well_wj(p: &Params) -> Result<Outputs> {
    let mut out = Outputs::default();
    let e = entry(p)?;
    let nu = e.grid_measure(p.grid_cells)?;
    let family = TestFamily::standard(&e, &nu)?;
    let est = wj_constant_estimate(&nu, &e.gradient, &family)?;
    let mut kinds: Vec<&str> = Vec::new();
    for kind in [MemberKind::Translate, MemberKind::Dilation, MemberKind::Mixture, MemberKind::Hermite, MemberKind::Spectral]
    {
        let mut rows: Vec<(f64, f64)> =
            est.members.iter().filter(|m| m.kind == kind).map(|m| (m.w2_squared, m.ratio)).collect();
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (t, v): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
        out.series(&format!("ratio_{}", kind.as_str()), &t, &v);
        kinds.push(kind.as_str());
    }
    let c = est.report.value;
    out.report(est.report);
    out.report(poincare_constant_1d(&nu)?);
    if let Some(rho) = e.hessian_lower_bound {
        out.report(derived_lsi(c, rho)?);
    }
    let metrics: Vec<String> = kinds.iter().map(|k| format!("ratio_{k}")).collect();
    let refs: Vec<&str> = metrics.iter().map(|s| s.as_str()).collect();
    out.plot("ratios.svg", "J/W2² against W2²", "W2²", &refs, false);
    Ok(out)
}

fn rotational_2d(p: &Params) -> Result<Outputs> {
    let mut out = Outputs::default();
    let e = entry(p)?;
    let plain = DriftSpec::from_catalog(&e);
    let f = make_rotational_F(&e.gradient, [[0.0, 1.0], [-1.0, 0.0]])?;
    let residual = stationarity_residual(&e.potential, &f, &NodeGrid::square(-4.0, 4.0, 2, p.grid_cells))?;
    let rotated = plain.clone().with_perturbation(f.clone(), Some(0.0))?;
    let opts = SvrOptions { t_end: p.t_end, dt: p.dt.unwrap_or(1e-3), ..SvrOptions::default() };
    let domain = [(-3.0, 3.0), (-3.0, 3.0)];
    let a = sturm_vonrenesse_probe_with(&plain, &domain, p.pairs, p.seed, &opts)?;
    let b = sturm_vonrenesse_probe_with(&rotated, &domain, p.pairs, p.seed, &opts)?;
    out.series("coupling_gradient", &a.times, &a.coupling);
    out.series("coupling_rotational", &b.times, &b.coupling);
    let tol = 3.0 * (a.c_dyn_se.powi(2) + b.c_dyn_se.powi(2)).sqrt() + 1e-9;
    for (label, r) in [("F = 0", &a), ("rotational F", &b)] {
        let mut rep = ConstantReport::estimated(
            "contraction",
            r.c_dyn,
            format!("{label}: half the decay rate of E|X−Y|², se {:.2e}, stationarity residual {residual:.2e}", r.c_dyn_se),
        );
        rep.valid = residual < 1e-6 && (a.c_dyn - b.c_dyn).abs() <= tol;
        out.report(rep);
    }
    // drift part of J between two clouds, with and without F
    let g = catalog("gaussian", &CatalogParams::default())?.grid_measure(2000)?;
    let draw = |seed: u64| -> Result<Vec<f64>> {
        let (x, y) = (sample(&g, p.particles, seed)?, sample(&g, p.particles, seed + 1)?);
        Ok(x.points().iter().zip(y.points()).flat_map(|(a, b)| [*a, 1.3 * b]).collect())
    };
    let cloud_a = wjgap_core::ParticleCloud::uniform(2, draw(p.seed)?)?;
    let cloud_b = wjgap_core::ParticleCloud::uniform(2, draw(p.seed + 2)?)?;
    let j_plain = j_functional_nd(&cloud_b, &cloud_a, &e.gradient)?.value;
    let j_rot = j_functional_nd(&cloud_b, &cloud_a, &e.gradient.add(&f))?.value;
    out.summary.push(format!("drift part of J: F = 0 {j_plain:.9}, rotational {j_rot:.9}"));
    out.plot("coupling.svg", "E|X−Y|² under synchronous coupling", "t", &["coupling_gradient", "coupling_rotational"], true);
    Ok(out)
}

fn tensorization_2d(p: &Params) -> Result<Outputs> {
    let mut out = Outputs::default();
    let first = entry(p)?;
    let narrow = CatalogParams { scale: p.catalog.scale * std::f64::consts::FRAC_1_SQRT_2, ..p.catalog.clone() };
    let second = catalog(&p.measure, &narrow)?;
    let grids = [first.grid_measure(p.grid_cells)?, second.grid_measure(p.grid_cells)?];
    let families = [
        TestFamily::translates(&first, &grids[0])?.union(TestFamily::dilations(&first, &grids[0])?),
        TestFamily::translates(&second, &grids[1])?.union(TestFamily::dilations(&second, &grids[1])?),
    ];
    let mut constants = Vec::new();
    for (i, (e, (nu, fam))) in [&first, &second].iter().zip(grids.iter().zip(&families)).enumerate() {
        let mut r = wj_constant_estimate(nu, &e.gradient, fam)?.report;
        r.reason = format!("factor {}: {}", i + 1, r.reason);
        constants.push(r.value);
        out.report(r);
    }
    let product = wj_product_estimate(&[
        ProductFactor { nu: &grids[0], drift: &first.gradient, family: &families[0] },
        ProductFactor { nu: &grids[1], drift: &second.gradient, family: &families[1] },
    ])?;
    let mut rows: Vec<(f64, f64)> = product.members.iter().map(|m| (m.w2_squared, m.ratio)).collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let (t, v): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    out.series("product_ratio", &t, &v);
    out.report(product.report);
    out.report(derived_tensorization(&constants)?);
    out.plot("product.svg", "J/W2² over the product family", "W2²", &["product_ratio"], false);
    Ok(out)
}

fn perturbation_sweep(p: &Params) -> Result<Outputs> {
    let mut out = Outputs::default();
    let e = entry(p)?;
    let nu = e.grid_measure(p.grid_cells)?;
    let est = wj_constant_estimate(&nu, &e.gradient, &TestFamily::standard(&e, &nu)?)?;
    let c = est.report.value;
    out.report(est.report);
    let ks = uniform_times(p.t_end, 0.05);
    let cases = [(0.0, 0.0), (0.0, 0.5), (0.0, -0.5), (-0.5, 0.0)];
    let mut names = Vec::new();
    for (alpha, beta) in cases {
        let name = format!("perturbed_alpha{alpha}_beta{beta}");
        let values = ks.iter().map(|k| derived_perturbation(c, alpha, beta, *k).map(|r| r.value)).collect::<Result<Vec<_>>>()?;
        out.series(&name, &ks, &values);
        out.report(derived_perturbation(c, alpha, beta, 0.5)?);
        names.push(name);
    }
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    out.plot("perturbation.svg", "Perturbed WJ constant", "K", &refs, false);
    Ok(out)
}

/// Smallest `V″` on `R ≤ |x| ≤ 4R`, by a dense scan.
fn far_curvature(e: &CatalogEntry, r: f64) -> Option<f64> {
    let v2 = e.second_derivative.as_ref()?;
    let m = e.support_1d().map(|(lo, hi)| 0.5 * (lo + hi)).ok()?;
    let k = (0..=3000)
        .map(|i| r + 3.0 * r * i as f64 / 3000.0)
        .flat_map(|d| [v2.eval_1d(m + d), v2.eval_1d(m - d)])
        .fold(f64::INFINITY, f64::min);
    Some(k)
}

fn svr_probe(p: &Params) -> Result<Outputs> {
    let mut out = Outputs::default();
    let e = entry(p)?;
    let (m, s) = (p.catalog.mean, p.catalog.scale);
    let drift = DriftSpec::from_catalog(&e);
    let opts = SvrOptions { t_end: p.t_end, dt: p.dt.unwrap_or(1e-3), ..SvrOptions::default() };
    let r = sturm_vonrenesse_probe_with(&drift, &[(m - 3.0 * s, m + 3.0 * s)], p.pairs, p.seed, &opts)?;
    out.series("coupling", &r.times, &r.coupling);
    let mut geo = ConstantReport::estimated("contraction", r.c_geo, format!("geometric: worst (A(y)−A(x))(y−x)/|y−x|² over {} pairs", p.pairs));
    geo.valid = r.consistent;
    out.report(geo);
    let mut dynamic = ConstantReport::estimated(
        "contraction",
        r.c_dyn,
        format!("dynamic: half the decay rate of E|X−Y|², se {:.2e}, R² {:.4}", r.c_dyn_se, r.fit.r_squared),
    );
    dynamic.valid = r.consistent;
    out.report(dynamic);
    if let Some(k) = far_curvature(&e, s).filter(|k| *k > 0.0) {
        // the check takes A centred at the origin
        let g = e.gradient.clone();
        let centred = wjgap_core::VectorField::from_1d(move |x| g.eval_1d(x + m));
        let scan = monotone_at_infinity_check(&centred, s, k, 10 * p.pairs, p.seed)?;
        out.summary.push(format!(
            "monotone at infinity (R = {s}, K = {k:.4}): {}, worst far ratio {:.4} vs K/3 = {:.4}, worst global {:.4}",
            if scan.passed { "passed" } else { "failed" },
            scan.worst_far_ratio,
            scan.threshold,
            scan.worst_global_ratio
        ));
    }
    out.plot("coupling.svg", "E|X−Y|² under synchronous coupling", "t", &["coupling"], true);
    Ok(out)
}

fn inequality_hierarchy(p: &Params) -> Result<Outputs> {
    let mut out = Outputs::default();
    let e = entry(p)?;
    let nu = e.grid_measure(2000)?;
    let poincare = poincare_constant_1d(&nu)?;
    let est = wj_constant_estimate(&nu, &e.gradient, &TestFamily::standard(&e, &nu)?)?;
    let c = est.report.value;
    let mut wj = est.report;
    wj.valid = c <= poincare.value + 1e-3;
    out.report(poincare);
    out.report(wj);
    if let Some(rho) = e.hessian_lower_bound {
        out.report(derived_lsi(c, rho)?);
    }
    let mu0 = displaced_normal(p, 1.0, 5.5)?;
    let (t, w) = decay_run(&e, &mu0, p, 0.1, "", &mut out)?;
    let (tt, ww): (Vec<f64>, Vec<f64>) = t.iter().zip(&w).filter(|(t, _)| **t >= 1.0).map(|(t, w)| (*t, *w)).unzip();
    let fit = decay_rate_fit(&tt, &ww)?;
    out.report(fit_report("W2 decay on t >= 1", &fit));
    if fit.rate > 0.0 {
        out.report(derived_wh_from_decay(fit.rate)?);
    }
    let nu_run = e.grid_measure_on(mu0.lo(), mu0.hi(), mu0.n_cells())?;
    out.summary.push(format!("initial W2 {:.6}", w2_exact_1d(&mu0, &nu_run)));
    out.plot("w2.svg", "W2 to equilibrium", "t", &["w2"], true);
    out.plot("entropy.svg", "Relative entropy and Fisher information", "t", &["entropy", "fisher"], true);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_complete() {
        let names: Vec<&str> = REGISTRY.iter().map(|e| e.name).collect();
        assert_eq!(
            names,
            [
                "gaussian_sanity",
                "quartic_rates",
                "double_well_wj",
                "rotational_2d",
                "tensorization_2d",
                "perturbation_sweep",
                "svr_probe",
                "inequality_hierarchy"
            ]
        );
        for e in &REGISTRY {
            assert!(e.measures.contains(&e.defaults.measure), "{}", e.name);
            assert!(!e.anchor.is_empty());
        }
    }
}
