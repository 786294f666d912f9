//! The verification cases. Each returns its rows in a fixed order; errors
//! become FAIL rows carrying the message.

mod classical;
mod differential;
mod section4;
mod weighted;

use std::time::Instant;

use super::context::Context;
use super::report::Row;
use crate::error::{Error, Result};
use crate::quat::Quaternion;

pub use classical::{
    bp_classical_rows, check_bp_classical, check_conjugation_remark, check_stokes_classical, kernel_regularity_rows,
    stokes_pair_residuals, BpTerms,
};
pub use differential::{
    check_pro2_differential, check_pro3_differential, cross_sum_literal, CrossReading, Side, degeneracy_rows, fitted_limit_order,
    limit_recovery_rows, weight_construction_rows,
};
pub use section4::{
    check_section4_bp, check_section4_stokes, diagonal_remark_rhs, s4_bp_residual, s4_stokes_residual, Family, S4Pair,
};
pub(crate) use classical::bp_classical_sweep_residual;
pub(crate) use section4::s4_sweep_residual;
pub use weighted::{check_pro15, log_periodic_instance, Pro15Options};

/// How a case can be refined in a convergence sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refinement {
    /// Gauss order grows.
    Order,
    /// The excluded cube around the pole shrinks.
    Epsilon,
}

#[derive(Debug, Clone, Copy)]
pub struct CaseInfo {
    pub id: &'static str,
    pub summary: &'static str,
    pub refinement: Option<Refinement>,
}

pub const CASES: &[CaseInfo] = &[
    CaseInfo { id: "stokes-classical", summary: "Stokes identity for catalog pairs of degree <= 3, two frames", refinement: Some(Refinement::Order) },
    CaseInfo { id: "bp-classical", summary: "Borel-Pompeiu reconstruction and exterior zero branch", refinement: Some(Refinement::Epsilon) },
    CaseInfo { id: "bp-classical-constants", summary: "Borel-Pompeiu with constants: boundary terms give 2c", refinement: None },
    CaseInfo { id: "kernel-regularity", summary: "Cauchy kernel annihilated by both operators", refinement: None },
    CaseInfo { id: "conjugation", summary: "Z o f o Z relation between left and right derivatives", refinement: None },
    CaseInfo { id: "pro15-constants", summary: "Weighted Stokes and Borel-Pompeiu with constant instances", refinement: None },
    CaseInfo { id: "pro15-cauchy", summary: "Weighted Cauchy formula, f constant and g = 0", refinement: None },
    CaseInfo { id: "pro15-log-periodic", summary: "Weighted identities for the log-periodic instance", refinement: None },
    CaseInfo { id: "pro15-square-candidate", summary: "Certificate gate on a candidate that violates the hypothesis", refinement: None },
    CaseInfo { id: "operator-degeneracies", summary: "Identity gives -2, Fueter variables, monomial eigenvalues", refinement: None },
    CaseInfo { id: "limit-recovery", summary: "Deformed operator tends to the classical one as q' -> 1", refinement: None },
    CaseInfo { id: "pro2-differential", summary: "Differential identity for whole-field slice transforms", refinement: None },
    CaseInfo { id: "pro3-differential", summary: "Differential identity for componentwise slice transforms", refinement: None },
    CaseInfo { id: "weight-construction", summary: "Quadrature weights vs closed form, ODE residuals, anchor shifts", refinement: None },
    CaseInfo { id: "s4-stokes-slice", summary: "Deformed Stokes identity with whole-field transforms", refinement: Some(Refinement::Order) },
    CaseInfo { id: "s4-stokes-comp", summary: "Deformed Stokes identity with componentwise transforms", refinement: Some(Refinement::Order) },
    CaseInfo { id: "s4-bp-slice", summary: "Deformed Borel-Pompeiu with whole-field transforms", refinement: Some(Refinement::Epsilon) },
    CaseInfo { id: "s4-bp-comp", summary: "Deformed Borel-Pompeiu with componentwise transforms", refinement: Some(Refinement::Epsilon) },
    CaseInfo { id: "s4-bp-diagonal", summary: "Deformed Borel-Pompeiu at x = w", refinement: Some(Refinement::Epsilon) },
    CaseInfo { id: "s4-bp-corollary", summary: "Deformed Cauchy formula for deformed-regular fields", refinement: None },
];

pub fn case_info(id: &str) -> Result<&'static CaseInfo> {
    CASES.iter().find(|c| c.id == id).ok_or_else(|| Error::UnknownCase(id.to_string()))
}

pub fn run_case(ctx: &Context, id: &str) -> Vec<Row> {
    match id {
        "stokes-classical" => check_stokes_classical(ctx),
        "bp-classical" => check_bp_classical(ctx),
        "bp-classical-constants" => bp_classical_rows(ctx, id, true),
        "kernel-regularity" => kernel_regularity_rows(ctx),
        "conjugation" => check_conjugation_remark(ctx),
        "pro15-constants" | "pro15-cauchy" | "pro15-log-periodic" | "pro15-square-candidate" => weighted::run(ctx, id),
        "operator-degeneracies" => degeneracy_rows(ctx),
        "limit-recovery" => limit_recovery_rows(ctx),
        "pro2-differential" => check_pro2_differential(ctx),
        "pro3-differential" => check_pro3_differential(ctx),
        "weight-construction" => weight_construction_rows(ctx),
        "s4-stokes-slice" | "s4-stokes-comp" => check_section4_stokes(ctx, id),
        "s4-bp-slice" | "s4-bp-comp" | "s4-bp-diagonal" | "s4-bp-corollary" => check_section4_bp(ctx, id),
        other => vec![Row::failed(other, "-", &Error::UnknownCase(other.to_string()))],
    }
}

/// Evaluates one `(lhs, rhs)` pair into a row, timing it and turning an
/// error into a FAIL row.
pub(crate) fn timed_row(case: &str, point: impl Into<String>, tol: f64, f: impl FnOnce() -> Result<(Quaternion, Quaternion)>) -> Row {
    let start = Instant::now();
    let point = point.into();
    match f() {
        Ok((l, r)) => Row::compare(case, point, l, r, tol).with_seconds(start.elapsed().as_secs_f64()),
        Err(e) => Row::failed(case, point, &e).with_seconds(start.elapsed().as_secs_f64()),
    }
}

/// Like [`timed_row`] for a scalar residual.
pub(crate) fn timed_residual(case: &str, point: impl Into<String>, tol: f64, f: impl FnOnce() -> Result<f64>) -> Row {
    timed_row(case, point, tol, || f().map(|r| (Quaternion::real(r), Quaternion::ZERO)))
}
