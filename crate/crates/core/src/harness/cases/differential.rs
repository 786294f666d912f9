//! Pointwise checks: the differential identities of the slice transforms,
//! operator degeneracies, the classical limit and the weight construction.

use std::sync::Arc;

use super::section4::{s4_stokes_residual, sweep_pair, Family};
use super::{timed_residual, timed_row};
use crate::error::{Error, Result};
use crate::field::{
    build_weight_pro3, cal_i_transform_partial, component_monomials, fueter_left, i_transform_partial,
    ode_residual_component, ode_residual_field, positive_polynomial, ComponentWeights, Constant, FueterVariable,
    Identity, Monomial, QuatPower, QuaternionField, SliceWeights,
};
use crate::harness::context::Context;
use crate::harness::report::Row;
use crate::qq::{
    deformed_component_partial, deformed_fueter_left, deformed_fueter_right, deformed_partial, qq_number, EvalFrame, QQPair,
    QQVector,
};
use crate::quat::{Coords, Quaternion, StructuralSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Which index pairs the cross sum runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossReading {
    /// `(j, k) != (l, m)`.
    DistinctPairs,
    /// `j != k` and `l != m`.
    DistinctIndices,
}

/// The cross sum of the componentwise identity, written out as a loop over
/// all index quadruples. `a[j][k]` are deformed component partials and
/// `e[l][m]` the weight exponentials at the active point.
pub fn cross_sum_literal(a: &[[f64; 4]; 4], e: &[[f64; 4]; 4], psi: &StructuralSet, side: Side, reading: CrossReading) -> Quaternion {
    let mut out = Quaternion::ZERO;
    for j in 0..4 {
        for k in 0..4 {
            for l in 0..4 {
                for m in 0..4 {
                    let take = match reading {
                        CrossReading::DistinctPairs => (j, k) != (l, m),
                        CrossReading::DistinctIndices => j != k && l != m,
                    };
                    if !take {
                        continue;
                    }
                    let pp = match side {
                        Side::Left => psi.get(k) * psi.get(j),
                        Side::Right => psi.get(j) * psi.get(k),
                    };
                    out += pp * (a[j][k] * e[l][m]);
                }
            }
        }
    }
    out
}

fn frame_label(family: &str, side: Side, i: usize) -> String {
    format!("{family}:{}:f{i:02}", if side == Side::Left { "L" } else { "R" })
}

/// `(lhs, rhs)` of the whole-field identity, left and right.
fn pro2_sides(f: &dyn QuaternionField, qq: &QQVector, psi: &StructuralSet, sw: &SliceWeights, frame: &EvalFrame) -> Result<[(Quaternion, Quaternion); 2]> {
    let mut dl = Quaternion::ZERO;
    let mut dr = Quaternion::ZERO;
    let mut a = [Quaternion::ZERO; 4];
    let mut e = [0.0; 4];
    for k in 0..4 {
        let d = i_transform_partial(f, sw, frame, k)?;
        dl += psi.get(k) * d;
        dr += d * psi.get(k);
        a[k] = deformed_partial(f, k, qq.pairs[k], frame)?;
        e[k] = sw.weights[k].exp(frame.x[k]);
    }
    let s: f64 = e.iter().sum();
    let pl: Quaternion = (0..4).map(|k| psi.get(k) * a[k]).sum();
    let pr: Quaternion = (0..4).map(|k| a[k] * psi.get(k)).sum();
    let mut cl = Quaternion::ZERO;
    let mut cr = Quaternion::ZERO;
    for k in 0..4 {
        for j in (0..4).filter(|&j| j != k) {
            cl += psi.get(k) * a[k] * e[j];
            cr += a[k] * psi.get(k) * e[j];
        }
    }
    Ok([(dl, pl * s - cl), (dr, pr * s - cr)])
}

/// `(lhs, rhs)` of the componentwise identity, left and right.
fn pro3_sides(f: &dyn QuaternionField, qq: &QQVector, psi: &StructuralSet, cw: &ComponentWeights, frame: &EvalFrame) -> Result<[(Quaternion, Quaternion); 2]> {
    let mut dl = Quaternion::ZERO;
    let mut dr = Quaternion::ZERO;
    let mut a = [[0.0; 4]; 4];
    let mut e = [[0.0; 4]; 4];
    for k in 0..4 {
        let d = cal_i_transform_partial(f, cw, psi, frame, k)?;
        dl += psi.get(k) * d;
        dr += d * psi.get(k);
        for j in 0..4 {
            a[j][k] = deformed_component_partial(f, j, k, qq.pairs[k], psi, frame)?;
            e[j][k] = cw.weights[j][k].exp(frame.x[k]);
        }
    }
    let s: f64 = e.iter().flatten().sum();
    let mut pl = Quaternion::ZERO;
    let mut pr = Quaternion::ZERO;
    for k in 0..4 {
        let col: Quaternion = (0..4).map(|j| psi.get(j) * a[j][k]).sum();
        pl += psi.get(k) * col;
        pr += col * psi.get(k);
    }
    let cl = cross_sum_literal(&a, &e, psi, Side::Left, CrossReading::DistinctPairs);
    let cr = cross_sum_literal(&a, &e, psi, Side::Right, CrossReading::DistinctPairs);
    Ok([(dl, pl * s - cl), (dr, pr * s - cr)])
}

fn pro2_families(psi: StructuralSet) -> Vec<(&'static str, Arc<dyn QuaternionField>)> {
    vec![
        ("mono-1234", Arc::new(Monomial::new(Quaternion::new(0.5, 0.25, 0.0, -1.0), [1, 2, 3, 4]))),
        ("mono-1111", Arc::new(Monomial::new(Quaternion::new(1.0, -0.5, 0.5, 0.25), [1, 1, 1, 1]))),
        ("mono-2113", Arc::new(Monomial::new(Quaternion::new(0.25, -1.0, 0.5, 0.5), [2, 1, 1, 3]))),
        ("const", Arc::new(Constant::new(Quaternion::new(1.5, -0.5, 0.25, 2.0)))),
        ("fueter-1", Arc::new(FueterVariable::new(psi, 1))),
    ]
}

fn pro3_families(psi: StructuralSet) -> Vec<(&'static str, Arc<dyn QuaternionField>)> {
    vec![
        ("poly+", Arc::new(positive_polynomial(psi))),
        ("compmono", Arc::new(component_monomials(psi))),
        ("compmono-quad", Arc::new(component_monomials(psi).without_monomial_hints())),
        ("poly+-quad", Arc::new(positive_polynomial(psi).without_monomial_hints())),
        ("fueter-1", Arc::new(FueterVariable::new(psi, 1))),
        ("const", Arc::new(Constant::new(psi.get(0) * 1.7 + psi.get(2) * 0.6 + psi.get(1) * 1.1 + psi.get(3) * 0.9))),
    ]
}

fn sides_rows(case: &str, label: &str, i: usize, tol: f64, sides: Result<[(Quaternion, Quaternion); 2]>) -> Vec<Row> {
    match sides {
        Ok([l, r]) => vec![
            Row::compare(case, frame_label(label, Side::Left, i), l.0, l.1, tol),
            Row::compare(case, frame_label(label, Side::Right, i), r.0, r.1, tol),
        ],
        Err(e) => vec![Row::failed(case, frame_label(label, Side::Left, i), &e), Row::failed(case, frame_label(label, Side::Right, i), &e)],
    }
}

fn rel(l: Quaternion, r: Quaternion) -> f64 {
    (l - r).norm() / r.norm().max(1.0)
}

pub fn check_pro2_differential(ctx: &Context) -> Vec<Row> {
    let case = "pro2-differential";
    let mut rows = Vec::new();
    for (label, f) in pro2_families(ctx.psi) {
        for (i, (w, x)) in ctx.frames().into_iter().enumerate() {
            let frame = EvalFrame::new(w, x, ctx.zero_threshold);
            let sides = SliceWeights::build_pro2(&*f, &ctx.qq, &w, &ctx.domain).and_then(|sw| pro2_sides(&*f, &ctx.qq, &ctx.psi, &sw, &frame));
            rows.extend(sides_rows(case, label, i, ctx.tol.differential, sides));
        }
    }
    // the identity is symmetric under q <-> q'
    let (_, f) = &pro2_families(ctx.psi)[0];
    let swapped = ctx.qq.swapped();
    for (i, (w, x)) in ctx.frames().into_iter().take(4).enumerate() {
        let frame = EvalFrame::new(w, x, ctx.zero_threshold);
        rows.push(timed_row(case, format!("swap:f{i:02}"), ctx.tol.anchor, || {
            let a = SliceWeights::build_pro2(&**f, &ctx.qq, &w, &ctx.domain)?;
            let b = SliceWeights::build_pro2(&**f, &swapped, &w, &ctx.domain)?;
            let [l, _] = pro2_sides(&**f, &ctx.qq, &ctx.psi, &a, &frame)?;
            let [ls, _] = pro2_sides(&**f, &swapped, &ctx.psi, &b, &frame)?;
            Ok((Quaternion::real(rel(ls.0, ls.1)), Quaternion::real(rel(l.0, l.1))))
        }));
    }
    rows
}

pub fn check_pro3_differential(ctx: &Context) -> Vec<Row> {
    let case = "pro3-differential";
    let mut rows = Vec::new();
    for (label, f) in pro3_families(ctx.psi) {
        for (i, (w, x)) in ctx.frames().into_iter().enumerate() {
            let frame = EvalFrame::new(w, x, ctx.zero_threshold);
            let sides = ComponentWeights::build_pro3(&*f, &ctx.qq, &ctx.psi, &w, &ctx.domain)
                .and_then(|cw| pro3_sides(&*f, &ctx.qq, &ctx.psi, &cw, &frame));
            rows.extend(sides_rows(case, label, i, ctx.tol.differential, sides));
        }
    }
    rows
}

/// Worst of several `(lhs, rhs)` evaluations as one row.
fn worst_row(case: &str, point: String, tol: f64, evals: impl IntoIterator<Item = Result<(Quaternion, Quaternion)>>) -> Row {
    let mut worst: Option<(f64, Quaternion, Quaternion)> = None;
    for e in evals {
        match e {
            Ok((l, r)) => {
                let d = rel(l, r);
                if worst.is_none_or(|(w, _, _)| d > w || d.is_nan()) {
                    worst = Some((d, l, r));
                }
            }
            Err(e) => return Row::failed(case, point, &e),
        }
    }
    match worst {
        Some((_, l, r)) => Row::compare(case, point, l, r, tol),
        None => Row::failed(case, point, &Error::Config("no evaluations".into())),
    }
}

pub fn degeneracy_rows(ctx: &Context) -> Vec<Row> {
    let case = "operator-degeneracies";
    let thr = ctx.zero_threshold;
    let mut rows = Vec::new();
    let two = Quaternion::real(-2.0);
    let std = StructuralSet::standard();
    for (label, psi, tol) in [("std", std, ctx.tol.identity), ("random", ctx.psi_random, ctx.tol.degeneracy)] {
        let id = Identity::new(psi);
        for (i, x) in ctx.interior.iter().enumerate() {
            let frame = EvalFrame::diagonal(*x, thr);
            rows.push(timed_row(case, format!("identity:{label}:L:x{i}"), tol, || Ok((deformed_fueter_left(&id, &ctx.qq, &psi, &frame)?, two))));
            rows.push(timed_row(case, format!("identity:{label}:R:x{i}"), tol, || Ok((deformed_fueter_right(&id, &ctx.qq, &psi, &frame)?, two))));
        }
    }
    for (label, psi) in [("std", std), ("rotated", ctx.rotated_unit_frame())] {
        for k in 1..4 {
            let f = FueterVariable::new(psi, k);
            for side in [Side::Left, Side::Right] {
                let evals = ctx.interior.iter().map(|x| {
                    let frame = EvalFrame::new(ctx.base_w, *x, thr);
                    let d = match side {
                        Side::Left => deformed_fueter_left(&f, &ctx.qq, &psi, &frame)?,
                        Side::Right => deformed_fueter_right(&f, &ctx.qq, &psi, &frame)?,
                    };
                    Ok((d, Quaternion::ZERO))
                });
                let s = if side == Side::Left { "L" } else { "R" };
                rows.push(worst_row(case, format!("fueter-{k}:{label}:{s}"), ctx.tol.degeneracy, evals.collect::<Vec<_>>()));
            }
        }
    }
    let x = ctx.interior[0];
    let frame = EvalFrame::diagonal(x, thr);
    for k in 0..4 {
        for n in 1..=6u32 {
            let mut exps = [0u32; 4];
            exps[k] = n;
            let f = Monomial::new(Quaternion::ONE, exps);
            let p = ctx.qq.pairs[k];
            rows.push(timed_row(case, format!("eigen:k{k}:n{n}"), ctx.tol.degeneracy, || {
                Ok((deformed_partial(&f, k, p, &frame)?, Quaternion::real(qq_number(n, p) * x[k].powi(n as i32 - 1))))
            }));
        }
    }
    rows
}

pub const LIMIT_QP: [f64; 3] = [0.9, 0.99, 0.999];

/// Slope of `log(max deviation)` against `log(1 - q')` with `q = 1`, and
/// the deviations themselves.
pub fn fitted_limit_order(f: &dyn QuaternionField, psi: &StructuralSet, points: &[Coords], qps: &[f64], thr: f64) -> Result<(f64, Vec<f64>)> {
    let mut devs = Vec::with_capacity(qps.len());
    for &qp in qps {
        let qq = QQVector::uniform(QQPair::new(1.0, qp)?);
        let mut worst = 0.0_f64;
        for x in points {
            let classical = fueter_left(f, psi, x)?;
            let deformed = deformed_fueter_left(f, &qq, psi, &EvalFrame::diagonal(*x, thr))?;
            worst = worst.max(rel(deformed, classical));
        }
        devs.push(worst);
    }
    let xs: Vec<f64> = qps.iter().map(|qp| (1.0 - qp).ln()).collect();
    let ys: Vec<f64> = devs.iter().map(|d| d.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok((sxy / sxx, devs))
}

pub fn limit_recovery_rows(ctx: &Context) -> Vec<Row> {
    let case = "limit-recovery";
    let fields: Vec<(&str, Arc<dyn QuaternionField>)> =
        vec![("cube", Arc::new(QuatPower::new(ctx.psi, 3))), ("poly+", Arc::new(positive_polynomial(ctx.psi)))];
    fields
        .into_iter()
        .map(|(label, f)| match fitted_limit_order(&*f, &ctx.psi, &ctx.interior, &LIMIT_QP, ctx.zero_threshold) {
            Ok((p, devs)) => Row::compare(case, format!("{label}:order"), Quaternion::real(p), Quaternion::ONE, ctx.tol.limit_order)
                .with_note(format!("deviations {devs:?}")),
            Err(e) => Row::failed(case, format!("{label}:order"), &e),
        })
        .collect()
}

/// Exponents of the single-monomial components of `component_monomials`.
const COMPMONO_EXPS: [[u32; 4]; 4] = [[2, 1, 0, 0], [0, 3, 0, 0], [0, 0, 1, 2], [1, 0, 0, 1]];

const ANCHOR_SHIFT: fn(usize, usize) -> f64 = |j, k| 0.1 * (j + 1) as f64 - 0.05 * k as f64;

pub fn weight_construction_rows(ctx: &Context) -> Vec<Row> {
    let case = "weight-construction";
    let (w, b, psi) = (ctx.base_w, &ctx.domain, &ctx.psi);
    let mut rows = Vec::new();
    let hinted = component_monomials(*psi);
    let plain = component_monomials(*psi).without_monomial_hints();
    for j in 0..4 {
        for k in 0..4 {
            let p = ctx.qq.pairs[k];
            let n = COMPMONO_EXPS[j][k];
            let coef = qq_number(n, p) - n as f64;
            let built = build_weight_pro3(&hinted, j, k, p, psi, &w, b)
                .and_then(|c| build_weight_pro3(&plain, j, k, p, psi, &w, b).map(|q| (c, q)));
            let (closed, quad) = match built {
                Ok(x) => x,
                Err(e) => {
                    rows.push(Row::failed(case, format!("closed:j{j}k{k}"), &e));
                    continue;
                }
            };
            let ts: Vec<f64> = (0..9).map(|i| b.lo[k] + b.width(k) * i as f64 / 8.0).collect();
            let formula = |t: f64| coef * (t / b.lo[k]).ln();
            rows.push(worst_row(case, format!("closed:j{j}k{k}"), ctx.tol.weights, ts.iter().map(|&t| Ok((Quaternion::real(closed.eval(t)), Quaternion::real(formula(t)))))));
            rows.push(worst_row(case, format!("quad:j{j}k{k}"), ctx.tol.weights, ts.iter().map(|&t| Ok((Quaternion::real(quad.eval(t)), Quaternion::real(formula(t)))))));
        }
    }
    let poly = positive_polynomial(*psi).without_monomial_hints();
    rows.push(timed_residual(case, "ode:poly+", ctx.tol.differential, || {
        let mut worst = 0.0_f64;
        for j in 0..4 {
            for k in 0..4 {
                let l = build_weight_pro3(&poly, j, k, ctx.qq.pairs[k], psi, &w, b)?;
                worst = worst.max(ode_residual_component(&l, &poly, j, ctx.qq.pairs[k], psi, &w, b, 65)?);
            }
        }
        Ok(worst)
    }));
    let mono = Monomial::new(Quaternion::new(0.5, 0.25, 0.0, -1.0), [1, 2, 3, 4]);
    rows.push(timed_residual(case, "ode:mono-1234", ctx.tol.differential, || {
        let sw = SliceWeights::build_pro2(&mono, &ctx.qq, &w, b)?;
        let mut worst = 0.0_f64;
        for k in 0..4 {
            worst = worst.max(ode_residual_field(&sw.weights[k], &mono, ctx.qq.pairs[k], &w, b, 65)?);
        }
        Ok(worst)
    }));
    let shift: [[f64; 4]; 4] = std::array::from_fn(|j| std::array::from_fn(|k| ANCHOR_SHIFT(j, k)));
    for family in [Family::Slice, Family::Comp] {
        let label = if family == Family::Slice { "slice" } else { "comp" };
        rows.push(timed_row(case, format!("anchor:stokes-{label}"), ctx.tol.anchor, || {
            let pair = sweep_pair(ctx, family, w)?;
            let (l0, r0) = s4_stokes_residual(&pair, b, &ctx.sigma, &ctx.spec)?;
            let (l1, r1) = s4_stokes_residual(&pair.shifted(shift), b, &ctx.sigma, &ctx.spec)?;
            Ok((Quaternion::real(rel(l1, r1)), Quaternion::real(rel(l0, r0))))
        }));
    }
    let f = positive_polynomial(*psi);
    rows.push(timed_row(case, "anchor:pro3", ctx.tol.anchor, || {
        let cw = ComponentWeights::build_pro3(&f, &ctx.qq, psi, &w, b)?;
        let mut worst = (0.0_f64, 0.0_f64);
        for (_, x) in ctx.frames().into_iter().take(4) {
            let frame = EvalFrame::new(w, x, ctx.zero_threshold);
            let [l0, _] = pro3_sides(&f, &ctx.qq, psi, &cw, &frame)?;
            let [l1, _] = pro3_sides(&f, &ctx.qq, psi, &cw.shifted(shift), &frame)?;
            let (a, c) = (rel(l0.0, l0.1), rel(l1.0, l1.1));
            if (a - c).abs() >= (worst.0 - worst.1).abs() {
                worst = (c, a);
            }
        }
        Ok((Quaternion::real(worst.0), Quaternion::real(worst.1)))
    }));
    rows
}
