//! The verification harness: configuration, cases, reports and sweeps.

pub mod cases;
pub mod config;
pub mod context;
pub mod points;
pub mod report;
pub mod sweep;

use std::time::Instant;

use rayon::prelude::*;

pub use cases::{case_info, run_case, CaseInfo, Refinement, CASES};
pub use config::{Config, Tolerances};
pub use context::Context;
pub use report::{Row, Verdict, VerificationReport};
pub use sweep::{convergence_sweep, SweepTable};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
    /// Zero every timing so reports are byte-identical across runs.
    pub no_timing: bool,
}

/// Case ids to run: the config's list, or every case.
pub fn selected_cases(config: &Config) -> Result<Vec<&'static str>> {
    match &config.cases {
        None => Ok(CASES.iter().map(|c| c.id).collect()),
        Some(ids) => ids.iter().map(|id| case_info(id).map(|c| c.id).map_err(|e| Error::Config(e.to_string()))).collect(),
    }
}

/// Runs the selected cases. Rows come back in case order, then in each
/// case's own order, whatever the thread count.
pub fn run_suite(config: &Config, opts: RunOptions) -> Result<VerificationReport> {
    let ids = selected_cases(config)?;
    let start = Instant::now();
    let run = || -> Result<VerificationReport> {
        let ctx = Context::new(config)?;
        let per_case: Vec<Vec<Row>> = ids.par_iter().map(|id| run_case(&ctx, id)).collect();
        let mut rows: Vec<Row> = per_case.into_iter().flatten().collect();
        if opts.no_timing {
            for r in &mut rows {
                r.seconds = 0.0;
            }
        }
        Ok(VerificationReport { config: config.clone(), sigma_sign: ctx.sigma.s, rows, seconds: 0.0 })
    };
    let mut report = match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    if !opts.no_timing {
        report.seconds = start.elapsed().as_secs_f64();
    }
    Ok(report)
}

pub fn list_cases() -> String {
    CASES.iter().map(|c| format!("{:<24} {}\n", c.id, c.summary)).collect()
}
