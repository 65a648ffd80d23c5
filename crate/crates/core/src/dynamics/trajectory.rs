use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::measures::{fisher_information, relative_entropy, GridMeasure};
use crate::transport::w2_exact_1d;

/// Recorded states of an evolution together with named scalar series.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    /// Series aligned with `times`, keyed by name.
    pub metrics: BTreeMap<String, Vec<f64>>,
}

impl<S> Trajectory<S> {
    pub(crate) fn new() -> Self {
        Self { times: Vec::new(), states: Vec::new(), metrics: BTreeMap::new() }
    }

    pub(crate) fn push(&mut self, t: f64, state: S) {
        debug_assert!(self.times.last().is_none_or(|l| t > *l));
        self.times.push(t);
        self.states.push(state);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn metric(&self, name: &str) -> Option<&[f64]> {
        self.metrics.get(name).map(|v| v.as_slice())
    }

    /// Adds a series; it must have one value per recorded time.
    pub fn insert_metric(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        if values.len() != self.times.len() {
            return Err(Error::InvalidSeries(format!(
                "`{name}` has {} values for {} times",
                values.len(),
                self.times.len()
            )));
        }
        self.metrics.insert(name.to_string(), values);
        Ok(())
    }

    /// Computes a series from the states.
    pub fn record(&mut self, name: &str, f: impl Fn(&S) -> Result<f64>) -> Result<()> {
        let values = self.states.iter().map(f).collect::<Result<Vec<_>>>()?;
        self.insert_metric(name, values)
    }

    /// Writes `(t, metric, value)` rows, grouped by metric name.
    pub fn write_metrics_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::NumericalFailure(format!("csv: {e}"));
        w.write_record(["t", "metric", "value"]).map_err(io)?;
        for (name, values) in &self.metrics {
            for (t, v) in self.times.iter().zip(values) {
                w.write_record([t.to_string(), name.clone(), v.to_string()]).map_err(io)?;
            }
        }
        w.flush().map_err(|e| Error::NumericalFailure(format!("csv: {e}")))?;
        Ok(())
    }
}

impl Trajectory<GridMeasure> {
    /// Records `w2`, `entropy` and `fisher` against the target `nu`.
    pub fn record_against(&mut self, nu: &GridMeasure) -> Result<()> {
        self.record("w2", |mu| Ok(w2_exact_1d(mu, nu)))?;
        self.record("entropy", |mu| relative_entropy(mu, nu))?;
        self.record("fisher", |mu| fisher_information(mu, nu))
    }

    /// Writes `(t, x, density)` rows for every recorded state.
    pub fn write_states_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::NumericalFailure(format!("csv: {e}"));
        w.write_record(["t", "x", "density"]).map_err(io)?;
        for (t, mu) in self.times.iter().zip(&self.states) {
            for (i, d) in mu.density().iter().enumerate() {
                w.write_record([t.to_string(), mu.center(i).to_string(), d.to_string()]).map_err(io)?;
            }
        }
        w.flush().map_err(|e| Error::NumericalFailure(format!("csv: {e}")))?;
        Ok(())
    }
}

/// `{0} ∪ {0.05·1.3ᵏ < t_end} ∪ {t_end}`.
pub fn geometric_times(t_end: f64) -> Vec<f64> {
    let mut times = vec![0.0];
    let mut t = 0.05;
    while t < t_end * (1.0 - 1e-12) {
        times.push(t);
        t *= 1.3;
    }
    if t_end > 0.0 {
        times.push(t_end);
    }
    times
}

/// `{0, step, 2·step, …}` up to `t_end`.
pub fn uniform_times(t_end: f64, step: f64) -> Vec<f64> {
    let n = (t_end / step).round() as usize;
    (0..=n).map(|k| k as f64 * step).collect()
}

pub(crate) fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() || times[0] < 0.0 || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter("record times must be finite and nonnegative".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("record times must increase strictly".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_grids() {
        let g = geometric_times(1.0);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[1], 0.05);
        assert!((g[2] - 0.065).abs() < 1e-15);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(uniform_times(1.0, 0.25), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn metrics_csv_is_long_format() {
        let mut tr: Trajectory<()> = Trajectory::new();
        tr.push(0.0, ());
        tr.push(1.0, ());
        tr.insert_metric("a", vec![1.0, 2.0]).unwrap();
        assert!(tr.insert_metric("b", vec![1.0]).is_err());
        let mut buf = Vec::new();
        tr.write_metrics_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,metric,value\n0,a,1\n1,a,2\n");
    }
}
