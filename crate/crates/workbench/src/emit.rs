//! CSV and JSON writers.
//!
//! CSV: comma separated, LF line endings, mandatory header, no quoting.
//! Floats use the shortest representation that parses back to the same
//! double. JSON is pretty-printed by serde_json, which uses the same
//! shortest round-trip representation.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use lorenz_anticontrol::Trajectory;

use crate::sweep::{SweepResult, TaskOutput};
use crate::WorkbenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = WorkbenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(WorkbenchError::Usage(format!("unknown format '{other}'"))),
        }
    }
}

/// Shortest round-trip decimal form of `v`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        ryu::Buffer::new().format_finite(v).to_string()
    } else if v.is_nan() {
        "NaN".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Anything the workbench can write out. Every report has a JSON form; only
/// tabular ones have a CSV form.
pub trait Report: Serialize {
    fn to_csv(&self) -> Option<String> {
        None
    }
}

impl Report for Trajectory {
    fn to_csv(&self) -> Option<String> {
        let mut out = String::from("t,x,y,z\n");
        for (t, s) in self.times.iter().zip(&self.states) {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                fmt_f64(*t),
                fmt_f64(s.x),
                fmt_f64(s.y),
                fmt_f64(s.z)
            );
        }
        Some(out)
    }
}

impl Report for SweepResult {
    fn to_csv(&self) -> Option<String> {
        let mut header: Vec<&str> = self.axes.iter().map(|a| a.param.as_str()).collect();
        for t in &self.tasks {
            header.extend_from_slice(t.columns());
        }
        header.push("error");
        let mut out = header.join(",");
        out.push('\n');

        for row in &self.rows {
            let mut fields: Vec<String> = row.axis_values.iter().map(|&v| fmt_f64(v)).collect();
            for (task, output) in self.tasks.iter().zip(&row.outputs) {
                match output {
                    TaskOutput::Equilibria { kind, count, e_plus } => {
                        fields.push(kind.name().to_string());
                        fields.push(count.map_or_else(|| "inf".to_string(), |c| c.to_string()));
                        match e_plus {
                            Some(s) => fields.extend([s.x, s.y, s.z].map(fmt_f64)),
                            None => fields.extend(["NaN"; 3].map(String::from)),
                        }
                    }
                    TaskOutput::OriginClass { class } => fields.push(class.name().to_string()),
                    TaskOutput::Certificate { report } => fields.extend(
                        [
                            report.flags.lemma_ok,
                            report.flags.conv_ok,
                            report.flags.het_ok,
                            report.chaos_possible,
                        ]
                        .map(|b| b.to_string()),
                    ),
                    TaskOutput::Regime { label } => fields.push(label.name().to_string()),
                    TaskOutput::Lle { lambda1 } => fields.push(fmt_f64(*lambda1)),
                    TaskOutput::Failed { .. } => {
                        fields.extend(task.columns().iter().map(|_| "NaN".to_string()))
                    }
                }
            }
            fields.push(row.errors().join(";"));
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        Some(out)
    }
}

/// Wraps any serializable value as a JSON-only report.
#[derive(Serialize)]
#[serde(transparent)]
pub struct JsonOnly<T: Serialize>(pub T);

impl<T: Serialize> Report for JsonOnly<T> {}

pub fn render<R: Report + ?Sized>(report: &R, format: Format) -> Result<String, WorkbenchError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report)
                .map_err(|e| WorkbenchError::Numerical(format!("cannot serialize: {e}")))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => report
            .to_csv()
            .ok_or_else(|| WorkbenchError::Usage("csv is not supported for this output; use json".into())),
    }
}

/// Renders and writes to `dest`, or to standard output when `None`.
pub fn emit<R: Report + ?Sized>(report: &R, format: Format, dest: Option<&Path>) -> Result<(), WorkbenchError> {
    let text = render(report, format)?;
    match dest {
        Some(path) => std::fs::write(path, text).map_err(|e| WorkbenchError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| WorkbenchError::Io(e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lorenz_anticontrol::{find_equilibria, State, SystemParams, TrajectoryStatus};

    #[test]
    fn float_format_round_trips() {
        for v in [0.5, 1.0, 1e-7, 8.0 / 3.0, -1234.5678e100, 5e-324] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(28.5), "28.5");
        assert_eq!(fmt_f64(f64::NAN), "NaN");
    }

    #[test]
    fn trajectory_csv() {
        let tr = Trajectory {
            times: vec![0.0, 0.5],
            states: vec![State::new(1.0, 2.0, 3.0), State::new(0.25, -1.0, 1e-9)],
            status: TrajectoryStatus::CompletedTspan,
        };
        let csv = render(&tr, Format::Csv).unwrap();
        assert_eq!(csv, "t,x,y,z\n0.0,1.0,2.0,3.0\n0.5,0.25,-1.0,1e-9\n");
    }

    #[test]
    fn equilibrium_json_has_pairs_as_arrays() {
        let set = find_equilibria(&SystemParams::lorenz(1.0, 3.0, 2.0), 1e-9).unwrap();
        let text = render(&JsonOnly(set), Format::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["kind"], "Triple");
        let eig = &v["origin"]["eigenvalues"];
        assert_eq!(eig.as_array().unwrap().len(), 3);
        assert_eq!(eig[2], serde_json::json!([-3.0, 0.0]));
        assert!(v["pair"]["plus"]["location"]["x"].as_f64().unwrap() > 0.0);
        assert!(render(&JsonOnly(set), Format::Csv).is_err());
    }

    #[test]
    fn params_json_round_trip() {
        let p = SystemParams { a: 10.0, b: 8.0 / 3.0, c: 0.1 + 0.2, m: -1e-300, n: 1.0 / 3.0, p: 0.7 };
        let text = render(&JsonOnly(p), Format::Json).unwrap();
        let back: SystemParams = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
        assert!(text.contains("\"M\""));
    }
}
