//! Convergence sweeps: one case, a refinement parameter stepped over levels.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::cases::{case_info, stokes_pair_residuals, Refinement};
use super::context::Context;
use crate::error::{Error, Result};
use crate::field::{builtin_catalog, QuaternionField};
use crate::quad::QuadSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepLevel {
    pub level: usize,
    pub parameter: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub case_id: String,
    pub parameter: String,
    pub levels: Vec<SweepLevel>,
    /// Observed order: `residual ~ eps^p`, or `~ order^-p`. `None` when
    /// fewer than two levels sit above the noise floor.
    pub fitted_order: Option<f64>,
}

impl SweepTable {
    pub fn to_text(&self) -> String {
        let mut s = format!("case {}\n{:>5} {:>14} {:>14}\n", self.case_id, "level", self.parameter, "residual");
        for l in &self.levels {
            s.push_str(&format!("{:>5} {:>14.6e} {:>14.6e}\n", l.level, l.parameter, l.residual));
        }
        match self.fitted_order {
            Some(p) => s.push_str(&format!("fitted order {p:.3}\n")),
            None => s.push_str("fitted order n/a (residuals at noise floor)\n"),
        }
        s
    }
}

/// Residuals below this are treated as round-off and left out of the fit.
pub const NOISE_FLOOR: f64 = 1e-13;

/// Least-squares slope of `ln r` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(_, r)| *r > NOISE_FLOOR && r.is_finite()).map(|(x, r)| (x.ln(), r.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

fn catalog(ctx: &Context, id: &str) -> Arc<dyn QuaternionField> {
    builtin_catalog(&ctx.psi, &ctx.domain).into_iter().find(|e| e.id == id).map(|e| e.field).expect("catalog id")
}

fn residual_at(ctx: &Context, case: &str, spec: &QuadSpec) -> Result<f64> {
    match case {
        "stokes-classical" => {
            let fields = vec![("exp".to_string(), catalog(ctx, "exp")), ("cauchy".to_string(), catalog(ctx, "cauchy"))];
            let res = stokes_pair_residuals(&fields, &ctx.psi, &ctx.sigma, &ctx.domain, spec)?;
            let (_, _, l, r) = res.into_iter().find(|(g, f, _, _)| *g == 0 && *f == 1).expect("pair present");
            Ok((l - r).norm() / r.norm().max(1.0))
        }
        "bp-classical" => super::cases::bp_classical_sweep_residual(ctx, spec),
        c if c.starts_with("s4-") => super::cases::s4_sweep_residual(ctx, c, spec),
        other => Err(Error::Config(format!("case `{other}` has no sweep"))),
    }
}

/// Runs `levels` refinements of `case`.
pub fn convergence_sweep(ctx: &Context, case: &str, levels: usize) -> Result<SweepTable> {
    let info = case_info(case)?;
    let refinement = info.refinement.ok_or_else(|| Error::Config(format!("case `{case}` does not support sweeps")))?;
    if levels == 0 {
        return Err(Error::Config("at least one sweep level is needed".into()));
    }
    let base = ctx.spec;
    let mut out = Vec::with_capacity(levels);
    for level in 0..levels {
        let (spec, parameter) = match (refinement, case) {
            (Refinement::Order, "stokes-classical") => {
                let order = 2 * level + 4;
                (QuadSpec::new(order, base.subdiv, base.epsilon, base.grading)?, order as f64)
            }
            (Refinement::Order, _) => {
                let order = 2usize << level;
                (QuadSpec::new(order, 1, base.epsilon, base.grading)?, order as f64)
            }
            (Refinement::Epsilon, _) => {
                let eps = base.epsilon / (1u64 << level) as f64;
                (QuadSpec::new(base.order, base.subdiv, eps, base.grading)?, eps)
            }
        };
        out.push(SweepLevel { level, parameter, residual: residual_at(ctx, case, &spec)? });
    }
    let pts: Vec<(f64, f64)> = out.iter().map(|l| (l.parameter, l.residual)).collect();
    let fitted_order = log_log_slope(&pts).map(|s| if refinement == Refinement::Order { -s } else { s });
    Ok(SweepTable {
        case_id: case.to_string(),
        parameter: if refinement == Refinement::Order { "order".into() } else { "epsilon".into() },
        levels: out,
        fitted_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::Config;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [0.1, 0.05, 0.025].iter().map(|&e: &f64| (e, 3.0 * e * e)).collect();
        assert!((log_log_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(log_log_slope(&[(0.1, 1e-16), (0.05, 1e-17)]), None);
    }

    #[test]
    fn unsupported_case_is_a_config_error() {
        let ctx = Context::new(&Config::default()).unwrap();
        assert!(matches!(convergence_sweep(&ctx, "conjugation", 2), Err(Error::Config(_))));
        assert!(matches!(convergence_sweep(&ctx, "nope", 2), Err(Error::UnknownCase(_))));
    }
}
