//! Rendering and atomic writing of run artifacts.
//!
//! `metrics.csv` has columns `t,metric,value` and `report.csv` has columns
//! `constant_name,value,kind,valid,notes`. Every artifact is rendered in
//! memory first, so a failed run leaves nothing behind.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use wjgap_core::inequalities::write_reports_csv;

use crate::experiments::Outputs;
use crate::plot;

pub const METRICS_FILE: &str = "metrics.csv";
pub const REPORT_FILE: &str = "report.csv";

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("report: {0}")]
    Report(#[from] wjgap_core::Error),
    #[error("plot {file}: {message}")]
    Plot { file: String, message: String },
}

pub fn metrics_csv(out: &Outputs) -> Result<Vec<u8>, OutputError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "metric", "value"])?;
    for row in &out.metrics {
        w.write_record([row.t.to_string(), row.metric.clone(), row.value.to_string()])?;
    }
    w.into_inner().map_err(|e| OutputError::Io { path: METRICS_FILE.into(), source: e.into_error() })
}

pub fn report_csv(out: &Outputs) -> Result<Vec<u8>, OutputError> {
    let mut buf = Vec::new();
    write_reports_csv(&out.reports, &mut buf)?;
    Ok(buf)
}

/// Renders every artifact, then writes them into `dir` through temporary
/// files and renames. Returns the written paths.
pub fn write_all(dir: &Path, out: &Outputs, plots: bool) -> Result<Vec<PathBuf>, OutputError> {
    let mut files: Vec<(String, Vec<u8>)> =
        vec![(METRICS_FILE.into(), metrics_csv(out)?), (REPORT_FILE.into(), report_csv(out)?)];
    if plots {
        for spec in &out.plots {
            let svg = plot::render(spec, &out.metrics)
                .map_err(|message| OutputError::Plot { file: spec.file.into(), message })?;
            files.push((spec.file.into(), svg.into_bytes()));
        }
    }
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| OutputError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut staged = Vec::new();
    for (name, bytes) in &files {
        let tmp = dir.join(format!(".{name}.tmp"));
        if let Err(e) = fs::write(&tmp, bytes) {
            for (t, _) in &staged {
                let _ = fs::remove_file(t);
            }
            let _ = fs::remove_file(&tmp);
            return Err(io_err(&tmp)(e));
        }
        staged.push((tmp, dir.join(name)));
    }
    let mut written = Vec::new();
    for (tmp, target) in staged {
        fs::rename(&tmp, &target).map_err(io_err(&target))?;
        written.push(target);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::MetricRow;

    #[test]
    fn metrics_have_the_fixed_header() {
        let out = Outputs {
            metrics: vec![MetricRow { t: 0.5, metric: "w2".into(), value: 0.25 }],
            ..Outputs::default()
        };
        let text = String::from_utf8(metrics_csv(&out).unwrap()).unwrap();
        assert_eq!(text, "t,metric,value\n0.5,w2,0.25\n");
        let report = String::from_utf8(report_csv(&out).unwrap()).unwrap();
        assert_eq!(report.lines().next(), Some("constant_name,value,kind,valid,notes"));
    }
}
