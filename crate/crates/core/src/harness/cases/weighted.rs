//! Whole-field weighted Stokes and Borel-Pompeiu identities, gated by the
//! sampled certificate of each instance.

use std::sync::Arc;
use std::time::Instant;

use super::classical::BpTerms;
use super::timed_row;
use crate::error::Error;
use crate::field::{constant_instance, FnField, Pro14Instance, Pro14Side, QuatPower, ScalarWeight};
use crate::harness::context::Context;
use crate::harness::report::Row;
use crate::qq::QQPair;
use crate::quad::{boundary_integral, volume_integral, Integrand};
use crate::quat::{Coords, Quaternion, StructuralSet};

/// Which rows a weighted check produces and their thresholds.
#[derive(Debug, Clone, Copy)]
pub struct Pro15Options {
    /// Full Borel-Pompeiu with the volume terms.
    pub full: bool,
    /// Boundary terms alone (valid when both derivatives vanish).
    pub corollary: bool,
    pub stokes_tol: f64,
    pub interior_tol: f64,
    pub exterior_tol: f64,
}

/// `c e^{-lambda}` with a log-periodic `lambda`; its (q,q')-derivative
/// vanishes and `^psi D[lambda]` is the conservative field of the
/// hypothesis.
pub fn log_periodic_instance(side: Pro14Side, c: Quaternion, amplitude: f64, pair: QQPair, psi: StructuralSet) -> Pro14Instance {
    let weight = ScalarWeight::log_periodic(amplitude, pair);
    let (w1, w2) = (weight.clone(), weight.clone());
    let field = FnField::new(format!("{c}*exp(-{})", weight.label()), move |p: &Coords| c * (-w1.value(p)).exp()).with_partials(
        move |k, p: &Coords| {
            let v = c * (-w2.value(p)).exp();
            v * -w2.grad(p)[k]
        },
    );
    Pro14Instance::new(Arc::new(field), weight, side, pair, psi)
}

fn weighted(inst: &Pro14Instance) -> Integrand {
    let i = inst.clone();
    Integrand::point(move |y| i.field.eval(y) * i.weight.value(y).exp())
}

/// `field(y) e^{w(y) - w(x)}` (or the derivative instead of the field).
fn relative(inst: &Pro14Instance, x: &Coords, derivative: bool) -> Integrand {
    let i = inst.clone();
    let wx = inst.weight.value(x);
    Integrand::point(move |y| {
        let v = if derivative { i.qq_derivative(y).unwrap_or(Quaternion::real(f64::NAN)) } else { i.field.eval(y) };
        v * (i.weight.value(y) - wx).exp()
    })
}

fn bp_terms(f: &Pro14Instance, g: &Pro14Instance, x: &Coords, full: bool) -> BpTerms {
    let k = Integrand::kernel(*x, f.psi);
    let pairs = vec![(relative(g, x, false), k.clone()), (k.clone(), relative(f, x, false))];
    let volume = if full { relative(g, x, true).mul(&k).add(&k.mul(&relative(f, x, true))) } else { Integrand::zero() };
    BpTerms { pairs, volume }
}

/// Both weighted identities for the instance pair `(f, g)`.
pub fn check_pro15(ctx: &Context, case: &str, f: &Pro14Instance, g: &Pro14Instance, opts: Pro15Options) -> Vec<Row> {
    let start = Instant::now();
    let pts = ctx.certificate_points();
    let cert = f.certify(&pts, ctx.tol.certificate).and_then(|a| g.certify(&pts, ctx.tol.certificate).map(|b| a.max(b)));
    let cert = match cert {
        Ok(r) => Row::residual(case, "certificate", r, ctx.tol.certificate).with_seconds(start.elapsed().as_secs_f64()),
        Err(e @ Error::HypothesisViolated { .. }) => return vec![Row::skipped(case, "certificate", &e)],
        Err(e) => return vec![Row::failed(case, "certificate", &e)],
    };
    let mut rows = vec![cert];
    rows.push(timed_row(case, "stokes", opts.stokes_tol, || {
        let lhs = boundary_integral(&weighted(g), &weighted(f), &ctx.domain, &ctx.sigma, &ctx.spec)?;
        let (fi, gi) = (f.clone(), g.clone());
        let vol = Integrand::point(move |y| {
            let dg = gi.qq_derivative(y).unwrap_or(Quaternion::real(f64::NAN));
            let df = fi.qq_derivative(y).unwrap_or(Quaternion::real(f64::NAN));
            (dg * fi.field.eval(y) + gi.field.eval(y) * df) * (gi.weight.value(y) + fi.weight.value(y)).exp()
        });
        Ok((lhs, volume_integral(&vol, &ctx.domain, &ctx.spec)?))
    }));
    let rhs = |x: &Coords| if ctx.domain.contains_open(x) { g.field.eval(x) + f.field.eval(x) } else { Quaternion::ZERO };
    for (prefix, on) in [("bp", opts.full), ("cor", opts.corollary)] {
        if !on {
            continue;
        }
        let full = prefix == "bp";
        for (i, x) in ctx.interior.iter().enumerate() {
            rows.push(timed_row(case, format!("{prefix}:x{i}"), opts.interior_tol, || {
                Ok((bp_terms(f, g, x, full).lhs(&ctx.domain, &ctx.sigma, &ctx.spec, x)?, rhs(x)))
            }));
        }
        for (i, x) in ctx.exterior.iter().enumerate() {
            rows.push(timed_row(case, format!("{prefix}:e{i}"), opts.exterior_tol, || {
                Ok((bp_terms(f, g, x, full).lhs(&ctx.domain, &ctx.sigma, &ctx.spec, x)?, rhs(x)))
            }));
        }
    }
    rows
}

pub(crate) fn run(ctx: &Context, case: &str) -> Vec<Row> {
    let (pf, pg, psi) = (ctx.pair_f(), ctx.pair_g(), ctx.psi);
    let c = Quaternion::new(1.5, -0.5, 0.25, 2.0);
    let c2 = Quaternion::new(0.5, 1.0, -1.0, 0.25);
    let t = &ctx.tol;
    let (f, g, opts) = match case {
        "pro15-constants" => (
            constant_instance(c, Pro14Side::Left, pf, psi),
            constant_instance(c2, Pro14Side::Right, pg, psi),
            Pro15Options { full: true, corollary: false, stokes_tol: t.pro15, interior_tol: t.pro15, exterior_tol: t.bp_exterior },
        ),
        "pro15-cauchy" => (
            constant_instance(c, Pro14Side::Left, pf, psi),
            constant_instance(Quaternion::ZERO, Pro14Side::Right, pg, psi),
            Pro15Options { full: false, corollary: true, stokes_tol: t.pro15, interior_tol: t.pro15, exterior_tol: t.bp_exterior },
        ),
        "pro15-log-periodic" => (
            log_periodic_instance(Pro14Side::Left, c, 0.3, pf, psi),
            log_periodic_instance(Pro14Side::Right, c2, 0.2, pg, psi),
            Pro15Options {
                full: true,
                corollary: true,
                stokes_tol: t.pro15,
                interior_tol: t.pro15_nontrivial,
                exterior_tol: t.pro15,
            },
        ),
        "pro15-square-candidate" => (
            Pro14Instance::new(Arc::new(QuatPower::new(psi, 2)), ScalarWeight::constant(0.0), Pro14Side::Left, pf, psi),
            constant_instance(Quaternion::ZERO, Pro14Side::Right, pg, psi),
            Pro15Options { full: true, corollary: false, stokes_tol: t.pro15, interior_tol: t.pro15_nontrivial, exterior_tol: t.pro15 },
        ),
        other => return vec![Row::failed(other, "-", &Error::UnknownCase(other.to_string()))],
    };
    check_pro15(ctx, case, &f, &g, opts)
}

/// Weighted Borel-Pompeiu residual at one point, for tests.
#[cfg(test)]
fn pro15_point(ctx: &Context, f: &Pro14Instance, g: &Pro14Instance, x: &Coords, full: bool) -> crate::Result<(Quaternion, Quaternion)> {
    let lhs = bp_terms(f, g, x, full).lhs(&ctx.domain, &ctx.sigma, &ctx.spec, x)?;
    let rhs = if ctx.domain.contains_open(x) { g.field.eval(x) + f.field.eval(x) } else { Quaternion::ZERO };
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::Config;
    use crate::harness::report::Verdict;

    #[test]
    fn log_periodic_instance_certifies() {
        let ctx = Context::new(&Config::default()).unwrap();
        let f = log_periodic_instance(Pro14Side::Left, Quaternion::ONE, 0.3, ctx.pair_f(), ctx.psi);
        let g = log_periodic_instance(Pro14Side::Right, Quaternion::E2, 0.2, ctx.pair_g(), ctx.psi);
        assert!(f.certify(&ctx.certificate_points(), 1e-12).is_ok());
        assert!(g.certify(&ctx.certificate_points(), 1e-12).is_ok());
        let m = crate::field::finite_difference_mismatch(&*f.field, &[1.3, 1.7, 1.2, 1.9], 1e-5).unwrap();
        assert!(m < 1e-7, "{m}");
    }

    #[test]
    fn square_candidate_is_skipped() {
        let ctx = Context::new(&Config::default()).unwrap();
        let rows = run(&ctx, "pro15-square-candidate");
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].verdict, Verdict::SkippedHypothesis);
    }

    #[test]
    fn weighted_exterior_zero() {
        let ctx = Context::new(&Config::default()).unwrap();
        let f = log_periodic_instance(Pro14Side::Left, Quaternion::ONE, 0.3, ctx.pair_f(), ctx.psi);
        let g = constant_instance(Quaternion::ZERO, Pro14Side::Right, ctx.pair_g(), ctx.psi);
        let (l, r) = pro15_point(&ctx, &f, &g, &ctx.exterior[0], false).unwrap();
        assert_eq!(r, Quaternion::ZERO);
        assert!(l.norm() < 1e-8, "{l}");
    }
}
