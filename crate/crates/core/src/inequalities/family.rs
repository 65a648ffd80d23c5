//! Parameterised families of test measures around a reference measure.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use super::poincare::poincare_eigenfunction_1d;
use crate::measures::{CatalogEntry, GridMeasure};

/// Log-densities are floored this far below their maximum so that every
/// member stays strictly positive on the grid.
pub const LOG_DENSITY_FLOOR: f64 = -700.0;

/// Transport amplitudes of the Hermite members, as fractions of the largest
/// admissible one.
pub const HERMITE_AMPLITUDES: [f64; 4] = [0.4, 0.2, 0.1, 0.05];

/// Hermite modes `k = 1..=5`.
pub const HERMITE_MODES: usize = 5;

/// Amplitudes `ε max|f″|` of the spectral members.
pub const SPECTRAL_AMPLITUDES: [f64; 4] = [0.1, 0.03, 0.01, 0.003];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MemberKind {
    Translate,
    Dilation,
    Mixture,
    Hermite,
    Spectral,
}

impl MemberKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MemberKind::Translate => "translate",
            MemberKind::Dilation => "dilation",
            MemberKind::Mixture => "mixture",
            MemberKind::Hermite => "hermite",
            MemberKind::Spectral => "spectral",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMember {
    pub kind: MemberKind,
    pub description: String,
    /// Generating parameter: shift, scale, mixture weight or amplitude.
    pub parameter: f64,
    pub measure: GridMeasure,
}

/// Test measures on the grid of a reference measure.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFamily {
    pub name: String,
    pub members: Vec<FamilyMember>,
}

/// Grid and reference log-density shared by the generators.
struct Base {
    lo: f64,
    hi: f64,
    n: usize,
    potential: ScalarField,
    mean: f64,
    sd: f64,
    /// Unit of the shift parameters: an eighth of the support half-width.
    width: f64,
}

impl Base {
    fn new(entry: &CatalogEntry, grid: &GridMeasure) -> Result<Self> {
        entry.support_1d()?;
        let mean = grid.mean();
        Ok(Self {
            lo: grid.lo(),
            hi: grid.hi(),
            n: grid.n_cells(),
            potential: entry.potential.clone(),
            mean,
            sd: grid.variance().sqrt(),
            width: 0.5 * (grid.hi() - grid.lo()) / 8.0,
        })
    }

    fn log_nu(&self, x: f64) -> f64 {
        -self.potential.eval_1d(x)
    }

    fn member(&self, log_f: impl Fn(f64) -> f64) -> Option<GridMeasure> {
        let dx = (self.hi - self.lo) / self.n as f64;
        let logs: Vec<f64> = (0..self.n).map(|i| log_f(self.lo + (i as f64 + 0.5) * dx)).collect();
        let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return None;
        }
        let raw: Vec<f64> = logs.iter().map(|l| (l - max).max(LOG_DENSITY_FLOOR).exp()).collect();
        GridMeasure::normalized(raw, self.lo, self.hi).ok().filter(|m| m.density().iter().all(|d| *d > 0.0))
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Probabilists' Hermite polynomials `He₀..He_k` at `y`.
fn hermite(k: usize, y: f64) -> Vec<f64> {
    let mut he = vec![1.0, y];
    for j in 1..k {
        he.push(y * he[j] - j as f64 * he[j - 1]);
    }
    he.truncate(k + 1);
    he
}

/// Derivatives of `h(y) = He_k(y) e^{−y²/4}`: returns `(h′, h″)`.
pub fn hermite_profile_derivatives(k: usize, y: f64) -> (f64, f64) {
    let he = hermite(k.max(2), y);
    let g = (-0.25 * y * y).exp();
    let kf = k as f64;
    let hk = he[k];
    let hk1 = if k >= 1 { he[k - 1] } else { 0.0 };
    let hk2 = if k >= 2 { he[k - 2] } else { 0.0 };
    let d1 = (kf * hk1 - 0.5 * y * hk) * g;
    let d2 = (kf * (kf - 1.0) * hk2 - y * kf * hk1 + (0.25 * y * y - 0.5) * hk) * g;
    (d1, d2)
}

/// `max |h″|` over the real line, by a dense scan.
fn hermite_max_curvature(k: usize) -> f64 {
    (0..=24_000)
        .map(|i| hermite_profile_derivatives(k, -12.0 + 1e-3 * i as f64).1.abs())
        .fold(0.0, f64::max)
}

impl TestFamily {
    /// `ν(· − s)` for `s = ±{0.25, 0.5, …, 2.5}·w`, with `w` an eighth of the
    /// support half-width.
    pub fn translates(entry: &CatalogEntry, grid: &GridMeasure) -> Result<Self> {
        let b = Base::new(entry, grid)?;
        let shifts: Vec<f64> =
            (1..=10).flat_map(|k| [-1.0, 1.0].map(|sign| sign * 0.25 * k as f64 * b.width)).collect();
        let members = shifts
            .par_iter()
            .filter_map(|&s| {
                b.member(|x| b.log_nu(x - s)).map(|measure| FamilyMember {
                    kind: MemberKind::Translate,
                    description: format!("translate by {s:.4}"),
                    parameter: s,
                    measure,
                })
            })
            .collect();
        Ok(Self { name: "translates".into(), members })
    }

    /// Laws of `m + σ(X − m)` for `σ = 0.5·4^{k/19}`, `k = 0..20`.
    pub fn dilations(entry: &CatalogEntry, grid: &GridMeasure) -> Result<Self> {
        let b = Base::new(entry, grid)?;
        let members = (0..20)
            .into_par_iter()
            .filter_map(|k| {
                let sigma = 0.5 * 4f64.powf(k as f64 / 19.0);
                b.member(|x| b.log_nu(b.mean + (x - b.mean) / sigma)).map(|measure| FamilyMember {
                    kind: MemberKind::Dilation,
                    description: format!("dilation by {sigma:.4}"),
                    parameter: sigma,
                    measure,
                })
            })
            .collect();
        Ok(Self { name: "dilations".into(), members })
    }

    /// `p ν(· − a) + (1 − p) ν(· − b)` over 5 weights and 5 shift pairs.
    pub fn mixtures(entry: &CatalogEntry, grid: &GridMeasure) -> Result<Self> {
        let b = Base::new(entry, grid)?;
        let weights = [0.1, 0.25, 0.5, 0.75, 0.9];
        let pairs = [(-1.0, 1.0), (-2.0, 2.0), (-0.5, 1.5), (-1.5, 0.5), (0.0, 2.0)];
        let combos: Vec<(f64, f64, f64)> =
            weights.iter().flat_map(|p| pairs.iter().map(move |(l, r)| (*p, *l, *r))).collect();
        let members = combos
            .par_iter()
            .filter_map(|&(p, l, r)| {
                let (sa, sb) = (l * b.width, r * b.width);
                b.member(|x| log_add(p.ln() + b.log_nu(x - sa), (1.0 - p).ln() + b.log_nu(x - sb)))
                    .map(|measure| FamilyMember {
                        kind: MemberKind::Mixture,
                        description: format!("mixture {p} at {sa:.4} / {sb:.4}"),
                        parameter: p,
                        measure,
                    })
            })
            .collect();
        Ok(Self { name: "mixtures".into(), members })
    }

    /// Push-forwards `T#ν` by `T(x) = x + ε s h_k′(y)`, `y = (x − m)/s`, with
    /// `h_k(y) = He_k(y) e^{−y²/4}`, `m`, `s` the mean and standard deviation
    /// of `ν`, `k = 1..=5` and `ε max|h_k″| ∈ {0.4, 0.2, 0.1, 0.05}`. Then
    /// `T′ = 1 + ε h_k″(y) ≥ 0.6`.
    pub fn hermite(entry: &CatalogEntry, grid: &GridMeasure) -> Result<Self> {
        let b = Base::new(entry, grid)?;
        let combos: Vec<(usize, f64)> = (1..=HERMITE_MODES)
            .flat_map(|k| {
                let scale = hermite_max_curvature(k);
                HERMITE_AMPLITUDES.iter().map(move |a| (k, a / scale))
            })
            .collect();
        let members = combos
            .par_iter()
            .filter_map(|&(k, eps)| {
                hermite_pushforward(&b, k, eps).map(|measure| FamilyMember {
                    kind: MemberKind::Hermite,
                    description: format!("hermite mode {k} amplitude {eps:.4e}"),
                    parameter: eps,
                    measure,
                })
            })
            .collect();
        Ok(Self { name: "hermite".into(), members })
    }

    /// Push-forwards `T#ν` by `T = x + ε f′` with `f` the first nonconstant
    /// eigenfunction of the generator, the direction in which `J/W₂²` tends
    /// to the spectral gap. `f′` is interpolated linearly between centres.
    pub fn spectral(entry: &CatalogEntry, grid: &GridMeasure) -> Result<Self> {
        let b = Base::new(entry, grid)?;
        let (_, f) = poincare_eigenfunction_1d(grid)?;
        let n = f.len();
        let dx = grid.dx();
        let x = grid.centers();
        let df: Vec<f64> = (0..n)
            .map(|i| match i {
                0 => (f[1] - f[0]) / dx,
                i if i == n - 1 => (f[i] - f[i - 1]) / dx,
                i => (f[i + 1] - f[i - 1]) / (2.0 * dx),
            })
            .collect();
        let curvature = df.windows(2).map(|w| ((w[1] - w[0]) / dx).abs()).fold(0.0, f64::max);
        if !(curvature > 0.0 && curvature.is_finite()) {
            return Err(Error::NumericalFailure("eigenfunction has no curvature".into()));
        }
        let members = SPECTRAL_AMPLITUDES
            .par_iter()
            .filter_map(|a| {
                let eps = a / curvature;
                let t: Vec<f64> = x.iter().zip(&df).map(|(x, d)| x + eps * d).collect();
                b.member(|z| {
                    let k = t.partition_point(|v| *v <= z).clamp(1, n - 1) - 1;
                    let slope = (t[k + 1] - t[k]) / dx;
                    let xz = x[k] + (z - t[k]) / slope;
                    b.log_nu(xz) - slope.ln()
                })
                .map(|measure| FamilyMember {
                    kind: MemberKind::Spectral,
                    description: format!("spectral amplitude {eps:.4e}"),
                    parameter: eps,
                    measure,
                })
            })
            .collect();
        Ok(Self { name: "spectral".into(), members })
    }

    /// Translates, dilations, mixtures, Hermite and spectral perturbations.
    pub fn standard(entry: &CatalogEntry, grid: &GridMeasure) -> Result<Self> {
        let mut f = Self::translates(entry, grid)?;
        for g in [
            Self::dilations(entry, grid)?,
            Self::mixtures(entry, grid)?,
            Self::hermite(entry, grid)?,
            Self::spectral(entry, grid)?,
        ] {
            f = f.union(g);
        }
        f.name = "standard".into();
        Ok(f)
    }

    pub fn union(mut self, other: TestFamily) -> TestFamily {
        self.name = format!("{} + {}", self.name, other.name);
        self.members.extend(other.members);
        self
    }

    pub fn only(&self, kind: MemberKind) -> TestFamily {
        TestFamily {
            name: kind.as_str().into(),
            members: self.members.iter().filter(|m| m.kind == kind).cloned().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn check_nonempty(&self) -> Result<()> {
        if self.members.is_empty() {
            return Err(Error::InvalidParameter(format!("family `{}` is empty", self.name)));
        }
        Ok(())
    }
}

/// `log μ(z) = log ν(x) − log T′(x)` at `x = T⁻¹(z)`.
fn hermite_pushforward(b: &Base, k: usize, eps: f64) -> Option<GridMeasure> {
    let (m, s) = (b.mean, b.sd);
    let t = |x: f64| x + eps * s * hermite_profile_derivatives(k, (x - m) / s).0;
    let tp = |x: f64| 1.0 + eps * hermite_profile_derivatives(k, (x - m) / s).1;
    b.member(|z| {
        let mut reach = eps * s + 1e-12;
        while !(t(z - reach) <= z && t(z + reach) >= z) {
            reach *= 2.0;
        }
        let (mut lo, mut hi) = (z - reach, z + reach);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if t(mid) < z {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-14 * (1.0 + z.abs()) {
                break;
            }
        }
        let x = 0.5 * (lo + hi);
        b.log_nu(x) - tp(x).ln()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{catalog, CatalogParams, REFERENCE_CELLS};

    fn gaussian() -> (CatalogEntry, GridMeasure) {
        let e = catalog("gaussian", &CatalogParams::default()).unwrap();
        let g = e.grid_measure(REFERENCE_CELLS).unwrap();
        (e, g)
    }

    #[test]
    fn family_sizes() {
        let (e, g) = gaussian();
        let f = TestFamily::standard(&e, &g).unwrap();
        assert_eq!(f.only(MemberKind::Translate).len(), 20);
        assert_eq!(f.only(MemberKind::Dilation).len(), 20);
        assert_eq!(f.only(MemberKind::Mixture).len(), 25);
        assert_eq!(f.only(MemberKind::Hermite).len(), 20);
        assert_eq!(f.only(MemberKind::Spectral).len(), 4);
        for m in &f.members {
            assert!((m.measure.mass() - 1.0).abs() < 1e-10);
            assert!(m.measure.density().iter().all(|d| *d > 0.0));
        }
    }

    #[test]
    fn hermite_derivatives_match_differences() {
        for k in 1..=5 {
            let h = |y: f64| hermite(k, y)[k] * (-0.25 * y * y).exp();
            for y in [-2.3, -0.4, 0.0, 0.9, 3.1] {
                let (d1, d2) = hermite_profile_derivatives(k, y);
                let e = 1e-4;
                assert!((d1 - (h(y + e) - h(y - e)) / (2.0 * e)).abs() < 1e-6);
                let fd2 = (h(y + e) - 2.0 * h(y) + h(y - e)) / (e * e);
                assert!((d2 - fd2).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn translates_move_the_mean() {
        let (e, g) = gaussian();
        for m in TestFamily::translates(&e, &g).unwrap().members {
            assert!((m.measure.mean() - m.parameter).abs() < 1e-6);
        }
    }

    #[test]
    fn hermite_members_have_the_pushed_mean() {
        let (e, g) = gaussian();
        for m in TestFamily::hermite(&e, &g).unwrap().members {
            let k: usize = m.description.split_whitespace().nth(2).unwrap().parse().unwrap();
            let pushed = g.expect_1d(|x| x + m.parameter * hermite_profile_derivatives(k, x).0);
            assert!((m.measure.mean() - pushed).abs() < 1e-6, "{}", m.description);
        }
    }

    #[test]
    fn non_1d_entries_are_rejected() {
        let e = catalog("gaussian_2d", &CatalogParams::default()).unwrap();
        let (_, g) = gaussian();
        assert!(TestFamily::translates(&e, &g).is_err());
    }
}
