use crate::error::{Error, Result};

/// Tolerance on the total mass of a grid measure.
pub const MASS_TOLERANCE: f64 = 1e-10;

/// A probability density sampled at the cell centres of a uniform grid on
/// `[lo, hi]`.
///
/// All quadratures use the midpoint rule, so the mass is `Σ density·dx`.
/// Between cell edges the measure is read as piecewise constant, which makes
/// its cumulative distribution function piecewise linear.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMeasure {
    lo: f64,
    hi: f64,
    density: Vec<f64>,
}

/// Scales a nonnegative profile on `[lo, hi]` into a probability density.
pub fn normalize_grid(raw: &[f64], lo: f64, hi: f64) -> Result<GridMeasure> {
    GridMeasure::normalized(raw.to_vec(), lo, hi)
}

impl GridMeasure {
    /// Builds a measure from an already normalised density.
    pub fn new(density: Vec<f64>, lo: f64, hi: f64) -> Result<Self> {
        check_interval(lo, hi, density.len())?;
        check_nonnegative(&density)?;
        let m = Self { lo, hi, density };
        let mass = m.mass();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDensity(format!("mass {mass} is not 1")));
        }
        Ok(m)
    }

    /// Builds a measure from a nonnegative profile, rescaling it to unit mass.
    pub fn normalized(mut raw: Vec<f64>, lo: f64, hi: f64) -> Result<Self> {
        check_interval(lo, hi, raw.len())?;
        check_nonnegative(&raw)?;
        let dx = (hi - lo) / raw.len() as f64;
        let total: f64 = raw.iter().sum::<f64>() * dx;
        if total <= 0.0 || !total.is_finite() {
            return Err(Error::InvalidDensity("profile has no mass".into()));
        }
        raw.iter_mut().for_each(|v| *v /= total);
        Ok(Self { lo, hi, density: raw })
    }

    /// Samples `f` at the cell centres of an `n_cells` grid and normalises.
    pub fn from_fn(lo: f64, hi: f64, n_cells: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_interval(lo, hi, n_cells)?;
        let dx = (hi - lo) / n_cells as f64;
        let raw = (0..n_cells).map(|i| f(lo + (i as f64 + 0.5) * dx)).collect();
        Self::normalized(raw, lo, hi)
    }

    /// Like [`GridMeasure::from_fn`] but takes the log-density, which is
    /// shifted by its maximum before exponentiation so that very peaked
    /// profiles do not overflow.
    pub fn from_log_density(
        lo: f64,
        hi: f64,
        n_cells: usize,
        log_f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        check_interval(lo, hi, n_cells)?;
        let dx = (hi - lo) / n_cells as f64;
        let logs: Vec<f64> = (0..n_cells).map(|i| log_f(lo + (i as f64 + 0.5) * dx)).collect();
        let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(Error::InvalidDensity("log-density has no finite maximum".into()));
        }
        Self::normalized(logs.into_iter().map(|l| (l - max).exp()).collect(), lo, hi)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn n_cells(&self) -> usize {
        self.density.len()
    }

    pub fn dx(&self) -> f64 {
        (self.hi - self.lo) / self.density.len() as f64
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Centre of cell `i`.
    #[inline]
    pub fn center(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells()).map(|i| self.center(i)).collect()
    }

    /// Left edge of cell `i`; `edge(n_cells)` is `hi`.
    #[inline]
    pub fn edge(&self, i: usize) -> f64 {
        if i == self.n_cells() {
            self.hi
        } else {
            self.lo + i as f64 * self.dx()
        }
    }

    /// Mass carried by each cell.
    pub fn cell_masses(&self) -> Vec<f64> {
        let dx = self.dx();
        self.density.iter().map(|d| d * dx).collect()
    }

    pub fn mass(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.dx()
    }

    /// Whether both measures share the same grid (bit-for-bit endpoints).
    pub fn same_grid(&self, other: &GridMeasure) -> bool {
        self.lo == other.lo && self.hi == other.hi && self.n_cells() == other.n_cells()
    }

    /// Midpoint-rule expectation of `f`.
    pub fn expect_1d(&self, f: impl Fn(f64) -> f64) -> f64 {
        let dx = self.dx();
        self.density
            .iter()
            .enumerate()
            .filter(|(_, d)| **d > 0.0)
            .map(|(i, d)| f(self.center(i)) * d)
            .sum::<f64>()
            * dx
    }

    pub fn mean(&self) -> f64 {
        self.expect_1d(|x| x)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.expect_1d(|x| (x - m) * (x - m))
    }

    /// Density at an arbitrary point, linearly interpolated between cell
    /// centres and held constant in the outer half cells; zero outside.
    pub fn interpolate(&self, x: f64) -> f64 {
        if x < self.lo || x > self.hi {
            return 0.0;
        }
        let n = self.n_cells();
        let s = (x - self.lo) / self.dx() - 0.5;
        if s <= 0.0 {
            return self.density[0];
        }
        if s >= (n - 1) as f64 {
            return self.density[n - 1];
        }
        let i = s.floor() as usize;
        let t = s - i as f64;
        self.density[i] * (1.0 - t) + self.density[i + 1] * t
    }

    /// Smallest density value on the grid.
    pub fn min_density(&self) -> f64 {
        self.density.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Mass below `x` under the piecewise-constant reading.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return 1.0;
        }
        let dx = self.dx();
        let s = (x - self.lo) / dx;
        let i = (s.floor() as usize).min(self.n_cells() - 1);
        let below: f64 = self.density[..i].iter().sum::<f64>() * dx;
        below + self.density[i] * (s - i as f64) * dx
    }
}

fn check_interval(lo: f64, hi: f64, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidDensity(format!("need at least 2 cells, got {n}")));
    }
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::InvalidParameter(format!("bad interval [{lo}, {hi}]")));
    }
    Ok(())
}

fn check_nonnegative(values: &[f64]) -> Result<()> {
    if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidDensity(format!("value {v} at cell {i}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_profile_is_uniform() {
        let m = normalize_grid(&[3.0; 10], 0.0, 1.0).unwrap();
        for d in m.density() {
            assert!((d - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn gaussian_profile_has_unit_mass() {
        let m = GridMeasure::from_fn(-8.0, 8.0, 2000, |x| (-x * x / 2.0).exp()).unwrap();
        assert!((m.mass() - 1.0).abs() < 1e-10);
        assert!(m.mean().abs() < 1e-12);
        assert!((m.variance() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_negative_and_empty_profiles() {
        assert!(matches!(
            normalize_grid(&[1.0, -0.1, 2.0], 0.0, 1.0),
            Err(Error::InvalidDensity(_))
        ));
        assert!(matches!(normalize_grid(&[0.0; 4], 0.0, 1.0), Err(Error::InvalidDensity(_))));
        assert!(matches!(normalize_grid(&[1.0], 0.0, 1.0), Err(Error::InvalidDensity(_))));
    }

    #[test]
    fn cdf_is_piecewise_linear() {
        let m = normalize_grid(&[1.0, 3.0], 0.0, 2.0).unwrap();
        assert!((m.cdf(1.0) - 0.25).abs() < 1e-15);
        assert!((m.cdf(1.5) - 0.625).abs() < 1e-15);
        assert_eq!(m.cdf(5.0), 1.0);
    }

    #[test]
    fn interpolation_hits_centres() {
        let m = normalize_grid(&[1.0, 2.0, 3.0, 4.0], 0.0, 4.0).unwrap();
        assert!((m.interpolate(1.5) - m.density()[1]).abs() < 1e-15);
        assert!((m.interpolate(2.0) - 0.5 * (m.density()[1] + m.density()[2])).abs() < 1e-15);
        assert_eq!(m.interpolate(-1.0), 0.0);
    }
}
