//! Report rows, the CSV contract and the JSON summary.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::Config;
use crate::error::{Error, Result};
use crate::quat::Quaternion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "SKIPPED-HYPOTHESIS")]
    SkippedHypothesis,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::SkippedHypothesis => "SKIPPED-HYPOTHESIS",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One evaluation of one identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub case_id: String,
    pub point: String,
    pub lhs: Quaternion,
    pub rhs: Quaternion,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub seconds: f64,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub note: String,
}

impl Row {
    /// Residual row; passes iff the relative residual is within `tolerance`.
    pub fn compare(case_id: &str, point: impl Into<String>, lhs: Quaternion, rhs: Quaternion, tolerance: f64) -> Row {
        let abs = (lhs - rhs).norm();
        let rel = abs / rhs.norm().max(1.0);
        Row {
            case_id: case_id.into(),
            point: point.into(),
            lhs,
            rhs,
            abs_residual: abs,
            rel_residual: rel,
            tolerance,
            verdict: if rel <= tolerance { Verdict::Pass } else { Verdict::Fail },
            seconds: 0.0,
            note: String::new(),
        }
    }

    /// Row for a precomputed scalar residual (lhs carries it, rhs is 0).
    pub fn residual(case_id: &str, point: impl Into<String>, residual: f64, tolerance: f64) -> Row {
        Row::compare(case_id, point, Quaternion::real(residual), Quaternion::ZERO, tolerance)
    }

    pub fn failed(case_id: &str, point: impl Into<String>, err: &Error) -> Row {
        Row {
            verdict: Verdict::Fail,
            abs_residual: f64::NAN,
            rel_residual: f64::NAN,
            lhs: Quaternion::ZERO,
            rhs: Quaternion::ZERO,
            note: err.to_string(),
            ..Row::compare(case_id, point, Quaternion::ZERO, Quaternion::ZERO, 0.0)
        }
    }

    pub fn skipped(case_id: &str, point: impl Into<String>, err: &Error) -> Row {
        Row { verdict: Verdict::SkippedHypothesis, ..Row::failed(case_id, point, err) }
    }

    pub fn with_seconds(mut self, s: f64) -> Row {
        self.seconds = s;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Row {
        self.note = note.into();
        self
    }
}

/// Per-case tallies for the summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseSummary {
    pub case_id: String,
    pub rows: usize,
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    pub max_rel_residual: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub config: Config,
    pub sigma_sign: i8,
    pub rows: Vec<Row>,
    pub seconds: f64,
}

impl VerificationReport {
    pub fn any_fail(&self) -> bool {
        self.rows.iter().any(|r| r.verdict == Verdict::Fail)
    }

    pub fn exit_code(&self) -> i32 {
        if self.any_fail() {
            1
        } else {
            0
        }
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.rows.iter().filter(|r| r.verdict == v).count()
    }

    /// Cases in first-appearance order.
    pub fn case_summaries(&self) -> Vec<CaseSummary> {
        let mut out: Vec<CaseSummary> = Vec::new();
        for r in &self.rows {
            let i = match out.iter().position(|c| c.case_id == r.case_id) {
                Some(i) => i,
                None => {
                    out.push(CaseSummary {
                        case_id: r.case_id.clone(),
                        rows: 0,
                        pass: 0,
                        fail: 0,
                        skipped: 0,
                        max_rel_residual: 0.0,
                        seconds: 0.0,
                    });
                    out.len() - 1
                }
            };
            let c = &mut out[i];
            c.rows += 1;
            match r.verdict {
                Verdict::Pass => c.pass += 1,
                Verdict::Fail => c.fail += 1,
                Verdict::SkippedHypothesis => c.skipped += 1,
            }
            if r.verdict == Verdict::Pass && r.rel_residual > c.max_rel_residual {
                c.max_rel_residual = r.rel_residual;
            }
            c.seconds += r.seconds;
        }
        out
    }

    /// CSV with columns `case_id, point, lhs, rhs, abs_residual,
    /// rel_residual, verdict, seconds`. Quaternions are written as
    /// `a;b;c;d`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["case_id", "point", "lhs", "rhs", "abs_residual", "rel_residual", "verdict", "seconds"]).map_err(io)?;
        for r in &self.rows {
            w.write_record([
                r.case_id.as_str(),
                r.point.as_str(),
                &quat_field(&r.lhs),
                &quat_field(&r.rhs),
                &format!("{:e}", r.abs_residual),
                &format!("{:e}", r.rel_residual),
                r.verdict.as_str(),
                &format!("{:.6}", r.seconds),
            ])
            .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn summary_json(&self) -> String {
        let s = serde_json::json!({
            "config": self.config,
            "sigma_sign": self.sigma_sign,
            "rows": self.rows.len(),
            "pass": self.count(Verdict::Pass),
            "fail": self.count(Verdict::Fail),
            "skipped_hypothesis": self.count(Verdict::SkippedHypothesis),
            "seconds": self.seconds,
            "cases": self.case_summaries(),
            "failures": self.rows.iter().filter(|r| r.verdict == Verdict::Fail).collect::<Vec<_>>(),
        });
        serde_json::to_string_pretty(&s).expect("summary serializes")
    }

    /// Writes `report.csv` and `summary.json` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let csv_path = dir.join("report.csv");
        let json_path = dir.join("summary.json");
        self.write_csv(std::fs::File::create(&csv_path)?)?;
        std::fs::write(&json_path, self.summary_json())?;
        Ok((csv_path, json_path))
    }
}

fn quat_field(q: &Quaternion) -> String {
    format!("{:e};{:e};{:e};{:e}", q[0], q[1], q[2], q[3])
}
