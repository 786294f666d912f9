//! Deformed Stokes and Borel-Pompeiu identities for the weighted slice sums.
//!
//! Every term is a sum over axes of functions of one coordinate, so the
//! integrands are built with [`Integrand::slices`] and products of them.

use std::sync::Arc;
use std::time::Instant;

use super::classical::BpTerms;
use super::timed_row;
use crate::error::{Error, Result};
use crate::field::{
    cal_i_transform, component, component_monomials, i_transform, positive_polynomial, ComponentWeights, Constant,
    FueterVariable, Monomial, QuaternionField, SliceWeights,
};
use crate::harness::context::Context;
use crate::harness::report::Row;
use crate::qq::{deformed_fueter_left, deformed_fueter_right, deformed_partial, slice_point, EvalFrame, QQVector};
use crate::quad::{boundary_integral, volume_integral, Box4, Integrand, QuadSpec, SigmaForm};
use crate::quat::{Coords, Quaternion, StructuralSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Whole-field weights `lambda_k`.
    Slice,
    /// Component weights `lambda_{j,k}`.
    Comp,
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Weights {
    Slice(SliceWeights),
    Comp(ComponentWeights),
}

/// A left field `f` and a right field `g` with their weights at base `w`.
#[derive(Clone)]
pub struct S4Pair {
    pub family: Family,
    pub psi: StructuralSet,
    pub f: Arc<dyn QuaternionField>,
    pub g: Arc<dyn QuaternionField>,
    pub qq_f: QQVector,
    pub qq_g: QQVector,
    pub w: Coords,
    pub fw: Weights,
    pub gw: Weights,
    pub zero_threshold: f64,
}

impl std::fmt::Debug for S4Pair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("S4Pair")
            .field("family", &self.family)
            .field("f", &self.f.label())
            .field("g", &self.g.label())
            .field("w", &self.w)
            .finish()
    }
}

fn build_weights(
    family: Family,
    f: &dyn QuaternionField,
    qq: &QQVector,
    psi: &StructuralSet,
    w: &Coords,
    b: &Box4,
) -> Result<Weights> {
    Ok(match family {
        Family::Slice => Weights::Slice(SliceWeights::build_pro2(f, qq, w, b)?),
        Family::Comp => Weights::Comp(ComponentWeights::build_pro3(f, qq, psi, w, b)?),
    })
}

impl S4Pair {
    #[allow(clippy::too_many_arguments)]
    pub fn build(
        family: Family,
        f: Arc<dyn QuaternionField>,
        g: Arc<dyn QuaternionField>,
        qq_f: QQVector,
        qq_g: QQVector,
        psi: StructuralSet,
        w: Coords,
        b: &Box4,
        zero_threshold: f64,
    ) -> Result<S4Pair> {
        let fw = build_weights(family, &*f, &qq_f, &psi, &w, b)?;
        let gw = build_weights(family, &*g, &qq_g, &psi, &w, b)?;
        Ok(S4Pair { family, psi, f, g, qq_f, qq_g, w, fw, gw, zero_threshold })
    }

    /// Weights moved by additive constants: `shift[j][k]` for component
    /// weights, row 0 (for `f`) and row 1 (for `g`) for whole-field ones.
    pub fn shifted(&self, shift: [[f64; 4]; 4]) -> S4Pair {
        let sh = |w: &Weights, row: usize| match w {
            Weights::Slice(s) => Weights::Slice(s.shifted(shift[row])),
            Weights::Comp(c) => Weights::Comp(c.shifted(shift)),
        };
        S4Pair { fw: sh(&self.fw, 0), gw: sh(&self.gw, 1), ..self.clone() }
    }

    fn transform(&self, field: &dyn QuaternionField, weights: &Weights, x: &Coords) -> Result<Quaternion> {
        let frame = EvalFrame::new(self.w, *x, self.zero_threshold);
        match weights {
            Weights::Slice(s) => i_transform(field, s, &frame),
            Weights::Comp(c) => cal_i_transform(field, c, &self.psi, &frame),
        }
    }

    /// Transform of `f` at `x`.
    pub fn transform_f(&self, x: &Coords) -> Result<Quaternion> {
        self.transform(&*self.f, &self.fw, x)
    }

    /// Transform of `g` at `x`.
    pub fn transform_g(&self, x: &Coords) -> Result<Quaternion> {
        self.transform(&*self.g, &self.gw, x)
    }

    fn side(&self, right: bool) -> SideTerms {
        let data = if right {
            SideData { field: self.g.clone(), weights: self.gw.clone(), qq: self.qq_g, psi: self.psi, w: self.w, thr: self.zero_threshold, right }
        } else {
            SideData { field: self.f.clone(), weights: self.fw.clone(), qq: self.qq_f, psi: self.psi, w: self.w, thr: self.zero_threshold, right }
        };
        SideTerms::new(Arc::new(data))
    }
}

struct SideData {
    field: Arc<dyn QuaternionField>,
    weights: Weights,
    qq: QQVector,
    psi: StructuralSet,
    w: Coords,
    thr: f64,
    right: bool,
}

impl SideData {
    fn slice(&self, k: usize, t: f64) -> Coords {
        slice_point(&self.w, k, t)
    }

    fn partial(&self, k: usize, t: f64) -> Quaternion {
        let frame = EvalFrame::new(self.w, self.slice(k, t), self.thr);
        deformed_partial(&*self.field, k, self.qq.pairs[k], &frame).unwrap_or(Quaternion::real(f64::NAN))
    }

    /// `a_{j,k}` on the `k`-slice.
    fn comp_partials(&self, k: usize, t: f64) -> [f64; 4] {
        let d = self.partial(k, t);
        std::array::from_fn(|j| d.dot(&self.psi.get(j)))
    }

    fn i(&self, k: usize, t: f64) -> Quaternion {
        let y = self.slice(k, t);
        match &self.weights {
            Weights::Slice(s) => self.field.eval(&y) * s.weights[k].exp(t),
            Weights::Comp(c) => (0..4).map(|j| self.psi.get(j) * (component(&*self.field, j, &self.psi, &y) * c.weights[j][k].exp(t))).sum(),
        }
    }

    fn s(&self, k: usize, t: f64) -> Quaternion {
        match &self.weights {
            Weights::Slice(s) => Quaternion::real(s.weights[k].exp(t)),
            Weights::Comp(c) => Quaternion::real((0..4).map(|j| c.weights[j][k].exp(t)).sum()),
        }
    }

    fn d(&self, k: usize, t: f64) -> Quaternion {
        let a = match &self.weights {
            Weights::Slice(_) => self.partial(k, t),
            Weights::Comp(_) => {
                let a = self.comp_partials(k, t);
                (0..4).map(|j| self.psi.get(j) * a[j]).sum()
            }
        };
        let pk = self.psi.get(k);
        if self.right {
            a * pk
        } else {
            pk * a
        }
    }

    /// Diagonal terms of the cross sums.
    fn t(&self, k: usize, t: f64) -> Quaternion {
        let pk = self.psi.get(k);
        match &self.weights {
            Weights::Slice(s) => self.d(k, t) * s.weights[k].exp(t),
            Weights::Comp(c) => {
                let a = self.comp_partials(k, t);
                (0..4)
                    .map(|j| {
                        let pp = if self.right { self.psi.get(j) * pk } else { pk * self.psi.get(j) };
                        pp * (a[j] * c.weights[j][k].exp(t))
                    })
                    .sum()
            }
        }
    }
}

/// The slice-sum integrands of one side.
struct SideTerms {
    i: Integrand,
    s: Integrand,
    d: Integrand,
    cross: Integrand,
}

impl SideTerms {
    fn new(data: Arc<SideData>) -> SideTerms {
        let mk = |f: fn(&SideData, usize, f64) -> Quaternion| {
            let d = data.clone();
            Integrand::slices(move |k, t| f(&d, k, t))
        };
        let (i, s, d, t) = (mk(SideData::i), mk(SideData::s), mk(SideData::d), mk(SideData::t));
        let cross = d.mul(&s).sub(&t);
        SideTerms { i, s, d, cross }
    }
}

/// Deformed Stokes: boundary of `(I g) sigma (I f)` against the volume
/// integral of the expanded derivatives.
pub fn s4_stokes_residual(pair: &S4Pair, b: &Box4, sigma: &SigmaForm, spec: &QuadSpec) -> Result<(Quaternion, Quaternion)> {
    let (fs, gs) = (pair.side(false), pair.side(true));
    let lhs = boundary_integral(&gs.i, &fs.i, b, sigma, spec)?;
    let vol = gs
        .d
        .mul(&gs.s)
        .mul(&fs.i)
        .add(&gs.i.mul(&fs.d).mul(&fs.s))
        .sub(&gs.cross.mul(&fs.i))
        .sub(&gs.i.mul(&fs.cross));
    Ok((lhs, volume_integral(&vol, b, spec)?))
}

/// Deformed Borel-Pompeiu at `x`. With `corollary` only the cross-sum
/// volume terms are kept.
pub fn s4_bp_residual(
    pair: &S4Pair,
    b: &Box4,
    sigma: &SigmaForm,
    spec: &QuadSpec,
    x: &Coords,
    corollary: bool,
) -> Result<(Quaternion, Quaternion)> {
    let (fs, gs) = (pair.side(false), pair.side(true));
    let k = Integrand::kernel(*x, pair.psi);
    let mut volume = Integrand::zero().sub(&gs.cross.mul(&k)).sub(&k.mul(&fs.cross));
    if !corollary {
        volume = gs.d.mul(&gs.s).mul(&k).add(&k.mul(&fs.s).mul(&fs.d)).add(&volume);
    }
    let terms = BpTerms { pairs: vec![(gs.i.clone(), k.clone()), (k, fs.i.clone())], volume };
    let lhs = terms.lhs(b, sigma, spec, x)?;
    let rhs = if b.contains_open(x) { pair.transform_g(x)? + pair.transform_f(x)? } else { Quaternion::ZERO };
    Ok((lhs, rhs))
}

/// Right side at `x = w`, written through the weights at the base point.
pub fn diagonal_remark_rhs(pair: &S4Pair) -> Quaternion {
    let w = pair.w;
    let one = |field: &dyn QuaternionField, weights: &Weights| -> Quaternion {
        let fw = field.eval(&w);
        match weights {
            Weights::Slice(s) => fw * (0..4).map(|k| s.weights[k].exp(w[k])).sum::<f64>(),
            Weights::Comp(c) => (0..4)
                .map(|j| {
                    let fj = component(field, j, &pair.psi, &w);
                    pair.psi.get(j) * (fj * (0..4).map(|k| c.weights[j][k].exp(w[k])).sum::<f64>())
                })
                .sum(),
        }
    };
    one(&*pair.g, &pair.gw) + one(&*pair.f, &pair.fw)
}

fn mono_1234() -> Arc<dyn QuaternionField> {
    Arc::new(Monomial::new(Quaternion::new(0.5, 0.25, 0.0, -1.0), [1, 2, 3, 4]))
}

fn mono_2113() -> Arc<dyn QuaternionField> {
    Arc::new(Monomial::new(Quaternion::new(0.25, -1.0, 0.5, 0.5), [2, 1, 1, 3]))
}

fn constant(c: Quaternion) -> Arc<dyn QuaternionField> {
    Arc::new(Constant::new(c))
}

const C_F: Quaternion = Quaternion::new(1.5, -0.5, 0.25, 2.0);
const C_G: Quaternion = Quaternion::new(0.5, 1.0, -1.0, 0.25);

type Named = (&'static str, Arc<dyn QuaternionField>, Arc<dyn QuaternionField>);

/// `(label, f, g)` pairs of a Stokes case.
fn stokes_pairs(ctx: &Context, family: Family) -> Vec<Named> {
    match family {
        Family::Slice => vec![
            ("f=const,g=const", constant(C_F), constant(C_G)),
            ("f=mono-1234,g=const", mono_1234(), constant(C_G)),
            ("f=mono-1234,g=mono-2113", mono_1234(), mono_2113()),
        ],
        Family::Comp => vec![
            ("f=const,g=const", constant(C_F), constant(C_G)),
            ("f=poly+,g=const", Arc::new(positive_polynomial(ctx.psi)), constant(C_G)),
            ("f=poly+,g=compmono", Arc::new(positive_polynomial(ctx.psi)), Arc::new(component_monomials(ctx.psi))),
        ],
    }
}

fn family_of(case: &str) -> Family {
    if case.ends_with("slice") {
        Family::Slice
    } else {
        Family::Comp
    }
}

/// Pair used by the refinement sweeps and the anchor-shift rows.
pub(crate) fn sweep_pair(ctx: &Context, family: Family, w: Coords) -> Result<S4Pair> {
    let (_, f, g) = stokes_pairs(ctx, family).pop().expect("non-empty");
    S4Pair::build(family, f, g, ctx.qq, ctx.qq_g, ctx.psi, w, &ctx.domain, ctx.zero_threshold)
}

pub fn check_section4_stokes(ctx: &Context, case: &str) -> Vec<Row> {
    let family = family_of(case);
    stokes_pairs(ctx, family)
        .into_iter()
        .map(|(label, f, g)| {
            timed_row(case, label, ctx.tol.s4_stokes, || {
                let pair = S4Pair::build(family, f, g, ctx.qq, ctx.qq_g, ctx.psi, ctx.base_w, &ctx.domain, ctx.zero_threshold)?;
                s4_stokes_residual(&pair, &ctx.domain, &ctx.sigma, &ctx.spec)
            })
        })
        .collect()
}

fn bp_rows(ctx: &Context, case: &str, prefix: &str, pair: &Result<S4Pair>, interior_tol: f64, corollary: bool) -> Vec<Row> {
    let pair = match pair {
        Ok(p) => p,
        Err(e) => return vec![Row::failed(case, format!("{prefix}build"), e)],
    };
    let mut rows = Vec::new();
    for (i, x) in ctx.interior.iter().enumerate() {
        rows.push(timed_row(case, format!("{prefix}x{i}"), interior_tol, || {
            s4_bp_residual(pair, &ctx.domain, &ctx.sigma, &ctx.spec, x, corollary)
        }));
    }
    for (i, x) in ctx.exterior.iter().enumerate() {
        rows.push(timed_row(case, format!("{prefix}e{i}"), ctx.tol.s4_exterior, || {
            s4_bp_residual(pair, &ctx.domain, &ctx.sigma, &ctx.spec, x, corollary)
        }));
    }
    rows
}

fn build(ctx: &Context, family: Family, f: Arc<dyn QuaternionField>, g: Arc<dyn QuaternionField>, w: Coords) -> Result<S4Pair> {
    S4Pair::build(family, f, g, ctx.qq, ctx.qq_g, ctx.psi, w, &ctx.domain, ctx.zero_threshold)
}

/// `(lhs, rhs)` at `x = w` for a pair rebuilt at that base point.
fn diagonal_row(ctx: &Context, case: &str, point: String, tol: f64, family: Family, f: Arc<dyn QuaternionField>, g: Arc<dyn QuaternionField>, x: &Coords) -> Row {
    timed_row(case, point, tol, || {
        let pair = build(ctx, family, f, g, *x)?;
        let (lhs, rhs) = s4_bp_residual(&pair, &ctx.domain, &ctx.sigma, &ctx.spec, x, false)?;
        let rhs_diag = if ctx.domain.contains_open(x) { diagonal_remark_rhs(&pair) } else { Quaternion::ZERO };
        debug_assert!((rhs - rhs_diag).norm() <= 1e-9 * rhs.norm().max(1.0));
        Ok((lhs, rhs_diag))
    })
}

/// Largest deformed left derivative of `f` and right derivative of `g`
/// over the certificate points, at the diagonal and at base `w`.
fn regularity_certificate(ctx: &Context, f: &dyn QuaternionField, g: &dyn QuaternionField) -> Result<f64> {
    let mut worst = 0.0_f64;
    for x in ctx.certificate_points() {
        for frame in [EvalFrame::diagonal(x, ctx.zero_threshold), EvalFrame::new(ctx.base_w, x, ctx.zero_threshold)] {
            worst = worst.max(deformed_fueter_left(f, &ctx.qq, &ctx.psi, &frame)?.norm());
            worst = worst.max(deformed_fueter_right(g, &ctx.qq_g, &ctx.psi, &frame)?.norm());
        }
    }
    Ok(worst)
}

fn corollary_rows(ctx: &Context, case: &str) -> Vec<Row> {
    let f: Arc<dyn QuaternionField> = Arc::new(FueterVariable::new(ctx.psi, 1));
    let g: Arc<dyn QuaternionField> = Arc::new(FueterVariable::new(ctx.psi, 2));
    let f3: Arc<dyn QuaternionField> = Arc::new(FueterVariable::new(ctx.psi, 3));
    let zero = constant(Quaternion::ZERO);
    let start = Instant::now();
    let cert = regularity_certificate(ctx, &*f, &*g).and_then(|a| regularity_certificate(ctx, &*f3, &*zero).map(|b| a.max(b)));
    let cert_row = match cert {
        Ok(r) if r <= ctx.tol.certificate => Row::residual(case, "certificate", r, ctx.tol.certificate),
        Ok(r) => {
            let e = Error::HypothesisViolated { residual: r, detail: "fields are not deformed-regular in this frame".into() };
            return vec![Row::skipped(case, "certificate", &e)];
        }
        Err(e) => return vec![Row::failed(case, "certificate", &e)],
    };
    let mut rows = vec![cert_row.with_seconds(start.elapsed().as_secs_f64())];
    let pair = build(ctx, Family::Slice, f, g, ctx.base_w);
    rows.extend(bp_rows(ctx, case, "", &pair, ctx.tol.bp_interior, true));
    for (i, x) in ctx.interior.iter().enumerate() {
        let f3 = f3.clone();
        rows.push(timed_row(case, format!("diag:x{i}"), ctx.tol.bp_interior, || {
            let pair = build(ctx, Family::Slice, f3.clone(), zero.clone(), *x)?;
            let (lhs, _) = s4_bp_residual(&pair, &ctx.domain, &ctx.sigma, &ctx.spec, x, true)?;
            Ok((lhs, f3.eval(x) * 4.0))
        }));
    }
    rows
}

pub fn check_section4_bp(ctx: &Context, case: &str) -> Vec<Row> {
    let t = &ctx.tol;
    match case {
        "s4-bp-slice" => {
            let pair = build(ctx, Family::Slice, mono_1234(), mono_2113(), ctx.base_w);
            bp_rows(ctx, case, "", &pair, t.s4_interior, false)
        }
        "s4-bp-comp" => {
            let pair = sweep_pair(ctx, Family::Comp, ctx.base_w);
            let mut rows = bp_rows(ctx, case, "", &pair, t.s4_interior, false);
            match build(ctx, Family::Comp, constant(C_F), constant(C_G), ctx.base_w) {
                Ok(pair) => {
                    for (i, x) in ctx.interior.iter().enumerate() {
                        rows.push(timed_row(case, format!("const:x{i}"), t.s4_constants, || {
                            let (lhs, _) = s4_bp_residual(&pair, &ctx.domain, &ctx.sigma, &ctx.spec, x, false)?;
                            Ok((lhs, (C_F + C_G) * 4.0))
                        }));
                    }
                    for (i, x) in ctx.exterior.iter().enumerate() {
                        rows.push(timed_row(case, format!("const:e{i}"), t.s4_exterior, || {
                            s4_bp_residual(&pair, &ctx.domain, &ctx.sigma, &ctx.spec, x, false)
                        }));
                    }
                }
                Err(e) => rows.push(Row::failed(case, "const:build", &e)),
            }
            rows
        }
        "s4-bp-diagonal" => {
            let f: Arc<dyn QuaternionField> = Arc::new(positive_polynomial(ctx.psi));
            let g: Arc<dyn QuaternionField> = Arc::new(component_monomials(ctx.psi));
            let mut rows = Vec::new();
            for (i, x) in ctx.interior.iter().enumerate() {
                rows.push(diagonal_row(ctx, case, format!("x{i}"), t.s4_interior, Family::Comp, f.clone(), g.clone(), x));
            }
            for (i, x) in ctx.exterior.iter().enumerate() {
                rows.push(diagonal_row(ctx, case, format!("e{i}"), t.s4_exterior, Family::Comp, f.clone(), g.clone(), x));
            }
            rows
        }
        "s4-bp-corollary" => corollary_rows(ctx, case),
        other => vec![Row::failed(other, "-", &Error::UnknownCase(other.to_string()))],
    }
}

/// Largest relative residual of a case's primary rows under `spec`.
pub(crate) fn s4_sweep_residual(ctx: &Context, case: &str, spec: &QuadSpec) -> Result<f64> {
    let family = family_of(case);
    let pair = sweep_pair(ctx, family, ctx.base_w)?;
    let rel = |(l, r): (Quaternion, Quaternion)| (l - r).norm() / r.norm().max(1.0);
    if case.starts_with("s4-stokes") {
        return Ok(rel(s4_stokes_residual(&pair, &ctx.domain, &ctx.sigma, spec)?));
    }
    let mut worst = 0.0_f64;
    for x in &ctx.interior {
        let r = if case == "s4-bp-diagonal" {
            let p = sweep_pair(ctx, family, *x)?;
            rel(s4_bp_residual(&p, &ctx.domain, &ctx.sigma, spec, x, false)?)
        } else {
            rel(s4_bp_residual(&pair, &ctx.domain, &ctx.sigma, spec, x, false)?)
        };
        worst = worst.max(r);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::Config;

    fn ctx() -> Context {
        Context::new(&Config::default()).unwrap()
    }

    #[test]
    fn diagonal_rhs_matches_transforms() {
        let ctx = ctx();
        for family in [Family::Slice, Family::Comp] {
            let x = ctx.interior[1];
            let pair = sweep_pair(&ctx, family, x).unwrap();
            let general = pair.transform_f(&x).unwrap() + pair.transform_g(&x).unwrap();
            assert!((general - diagonal_remark_rhs(&pair)).norm() < 1e-12);
        }
    }

    #[test]
    fn slice_integrands_match_pointwise_derivatives() {
        // the left side's diagonal terms sum to ^psi D of the transform
        let ctx = ctx();
        let pair = sweep_pair(&ctx, Family::Comp, ctx.base_w).unwrap();
        let fs = pair.side(false);
        let y = ctx.interior[2];
        let h = 1e-5;
        let mut fd = Quaternion::ZERO;
        for k in 0..4 {
            let (mut a, mut b) = (y, y);
            a[k] += h;
            b[k] -= h;
            fd += ctx.psi.get(k) * ((pair.transform_f(&a).unwrap() - pair.transform_f(&b).unwrap()) / (2.0 * h));
        }
        let exact = fs.d.mul(&fs.s).sub(&fs.cross).eval(&y);
        assert!((fd - exact).norm() < 1e-6 * exact.norm().max(1.0), "{fd} vs {exact}");
    }

    #[test]
    fn shifted_pair_moves_transforms() {
        let ctx = ctx();
        let pair = sweep_pair(&ctx, Family::Slice, ctx.base_w).unwrap();
        let shifted = pair.shifted([[0.1; 4]; 4]);
        let x = ctx.interior[0];
        let a = pair.transform_f(&x).unwrap() * 0.1_f64.exp();
        assert!((shifted.transform_f(&x).unwrap() - a).norm() < 1e-12 * a.norm());
    }
}
