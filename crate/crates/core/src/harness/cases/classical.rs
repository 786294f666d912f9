//! Undeformed identities: Stokes, Borel-Pompeiu, kernel regularity, and the
//! conjugation relation between the left and right (q,q')-derivatives.

use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use super::{timed_residual, timed_row};
use crate::error::Result;
use crate::field::{builtin_catalog, fueter_left, fueter_right, Constant, QuaternionField};
use crate::harness::context::Context;
use crate::harness::report::Row;
use crate::kernel::{hyperholomorphy_residual, hyperholomorphy_residual_fd, hyperholomorphy_residual_right, kernel, kernel_at, displacement};
use crate::qq::{quat_qq_derivative_left, quat_qq_derivative_right};
use crate::quad::{
    boundary_integral_pairs, boundary_nodes, pairwise_sum, singular_volume_integral, volume_integral_near, volume_nodes, Box4,
    Integrand, QuadSpec, SigmaForm,
};
use crate::quat::{Coords, Quaternion, StructuralSet};

pub type NamedField = (String, Arc<dyn QuaternionField>);

struct Tabulated {
    vol_f: Vec<Quaternion>,
    vol_left: Vec<Quaternion>,
    vol_right: Vec<Quaternion>,
    bnd_f: Vec<Quaternion>,
}

/// Both sides of `∫_∂ g σ f = ∫ (g ^ψD f + D^ψ g f)` for every ordered pair
/// `(g, f)` of `fields`, row-major in `g`. Field values are tabulated once
/// at the quadrature nodes.
pub fn stokes_pair_residuals(
    fields: &[NamedField],
    psi: &StructuralSet,
    sigma: &SigmaForm,
    b: &Box4,
    spec: &QuadSpec,
) -> Result<Vec<(usize, usize, Quaternion, Quaternion)>> {
    let vol = volume_nodes(b, spec)?;
    let bnd = boundary_nodes(b, spec)?;
    let tabs = fields
        .par_iter()
        .map(|(_, f)| -> Result<Tabulated> {
            let mut t = Tabulated {
                vol_f: Vec::with_capacity(vol.len()),
                vol_left: Vec::with_capacity(vol.len()),
                vol_right: Vec::with_capacity(vol.len()),
                bnd_f: Vec::with_capacity(bnd.len()),
            };
            for (y, _) in &vol {
                t.vol_f.push(f.eval(y));
                t.vol_left.push(fueter_left(&**f, psi, y)?);
                t.vol_right.push(fueter_right(&**f, psi, y)?);
            }
            t.bnd_f.extend(bnd.iter().map(|(y, _, _)| f.eval(y)));
            Ok(t)
        })
        .collect::<Result<Vec<_>>>()?;
    let face_weight: Vec<Quaternion> = bnd.iter().map(|(_, _, face)| sigma.weight(face.axis, face.side)).collect();
    let n = fields.len();
    Ok((0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (gi, fi) = (idx / n, idx % n);
            let (tg, tf) = (&tabs[gi], &tabs[fi]);
            let lhs: Vec<Quaternion> =
                bnd.iter().enumerate().map(|(i, (_, w, _))| tg.bnd_f[i] * face_weight[i] * tf.bnd_f[i] * *w).collect();
            let rhs: Vec<Quaternion> = vol
                .iter()
                .enumerate()
                .map(|(i, (_, w))| (tg.vol_f[i] * tf.vol_left[i] + tg.vol_right[i] * tf.vol_f[i]) * *w)
                .collect();
            (gi, fi, pairwise_sum(&lhs), pairwise_sum(&rhs))
        })
        .collect())
}

fn low_degree_fields(psi: &StructuralSet, b: &Box4) -> Vec<NamedField> {
    builtin_catalog(psi, b).into_iter().filter(|e| e.low_degree_polynomial).map(|e| (e.id.to_string(), e.field)).collect()
}

pub fn check_stokes_classical(ctx: &Context) -> Vec<Row> {
    const CASE: &str = "stokes-classical";
    let mut rows = Vec::new();
    for (label, psi, sigma) in [("psi", ctx.psi, ctx.sigma), ("psi-random", ctx.psi_random, ctx.sigma_random)] {
        let fields = low_degree_fields(&psi, &ctx.domain);
        let start = Instant::now();
        match stokes_pair_residuals(&fields, &psi, &sigma, &ctx.domain, &ctx.spec) {
            Ok(res) => {
                let each = start.elapsed().as_secs_f64() / res.len().max(1) as f64;
                for (gi, fi, l, r) in res {
                    let point = format!("{label}:g={},f={}", fields[gi].0, fields[fi].0);
                    rows.push(Row::compare(CASE, point, l, r, ctx.tol.stokes).with_seconds(each));
                }
            }
            Err(e) => rows.push(Row::failed(CASE, label, &e)),
        }
    }
    rows
}

/// Boundary pairs and volume integrand of the Borel-Pompeiu formula for
/// `(f, g)` with pole `x`.
pub struct BpTerms {
    pub pairs: Vec<(Integrand, Integrand)>,
    pub volume: Integrand,
}

impl BpTerms {
    pub fn classical(f: &Arc<dyn QuaternionField>, g: &Arc<dyn QuaternionField>, psi: StructuralSet, x: Coords) -> BpTerms {
        let k = Integrand::kernel(x, psi);
        let pairs = vec![(Integrand::field(g.clone()), k.clone()), (k.clone(), Integrand::field(f.clone()))];
        let (f2, g2) = (f.clone(), g.clone());
        let df = Integrand::point(move |y| fueter_left(&*f2, &psi, y).unwrap_or(Quaternion::real(f64::NAN)));
        let dg = Integrand::point(move |y| fueter_right(&*g2, &psi, y).unwrap_or(Quaternion::real(f64::NAN)));
        BpTerms { pairs, volume: dg.mul(&k).add(&k.mul(&df)) }
    }

    pub fn boundary_only(mut self) -> BpTerms {
        self.volume = Integrand::zero();
        self
    }

    /// Boundary minus volume. Interior poles use the graded singular rule,
    /// exterior ones refinement towards the pole.
    pub fn lhs(&self, b: &Box4, sigma: &SigmaForm, spec: &QuadSpec, x: &Coords) -> Result<Quaternion> {
        let interior = b.contains_open(x);
        let pole = if interior { None } else { Some(x) };
        let boundary = boundary_integral_pairs(&self.pairs, b, sigma, spec, pole)?;
        if self.volume.is_zero() {
            return Ok(boundary);
        }
        let volume = if interior {
            singular_volume_integral(&self.volume, b, x, spec)?
        } else {
            volume_integral_near(&self.volume, b, spec, x)?
        };
        Ok(boundary - volume)
    }
}

/// `(lhs, rhs)` of the Borel-Pompeiu formula at one point.
pub fn bp_classical_point(
    ctx: &Context,
    spec: &QuadSpec,
    f: &Arc<dyn QuaternionField>,
    g: &Arc<dyn QuaternionField>,
    x: &Coords,
    with_volume: bool,
) -> Result<(Quaternion, Quaternion)> {
    let mut terms = BpTerms::classical(f, g, ctx.psi, *x);
    if !with_volume {
        terms = terms.boundary_only();
    }
    let lhs = terms.lhs(&ctx.domain, &ctx.sigma, spec, x)?;
    let rhs = if ctx.domain.contains_open(x) { f.eval(x) + g.eval(x) } else { Quaternion::ZERO };
    Ok((lhs, rhs))
}

fn catalog_field(ctx: &Context, id: &str) -> Arc<dyn QuaternionField> {
    builtin_catalog(&ctx.psi, &ctx.domain).into_iter().find(|e| e.id == id).map(|e| e.field).expect("catalog id")
}

pub(crate) fn cubic_pair(ctx: &Context) -> (Arc<dyn QuaternionField>, Arc<dyn QuaternionField>) {
    (catalog_field(ctx, "cube"), catalog_field(ctx, "square"))
}

pub fn check_bp_classical(ctx: &Context) -> Vec<Row> {
    const CASE: &str = "bp-classical";
    let (cube, square) = cubic_pair(ctx);
    let zero: Arc<dyn QuaternionField> = Arc::new(Constant::new(Quaternion::ZERO));
    let mut rows = Vec::new();
    for (i, x) in ctx.interior.iter().enumerate() {
        rows.push(timed_row(CASE, format!("x{i}[f=cube,g=0]"), ctx.tol.bp_interior, || {
            bp_classical_point(ctx, &ctx.spec, &cube, &zero, x, true)
        }));
    }
    for (i, x) in ctx.interior.iter().enumerate() {
        rows.push(timed_row(CASE, format!("x{i}[f=cube,g=square]"), ctx.tol.bp_interior, || {
            bp_classical_point(ctx, &ctx.spec, &cube, &square, x, true)
        }));
    }
    for (i, x) in ctx.exterior.iter().enumerate() {
        rows.push(timed_row(CASE, format!("e{i}[f=cube,g=square]"), ctx.tol.bp_exterior, || {
            bp_classical_point(ctx, &ctx.spec, &cube, &square, x, true)
        }));
    }
    rows
}

/// Largest interior relative residual of the cubic reconstruction under
/// `spec`; used by the ε sweep.
pub(crate) fn bp_classical_sweep_residual(ctx: &Context, spec: &QuadSpec) -> Result<f64> {
    let (cube, _) = cubic_pair(ctx);
    let zero: Arc<dyn QuaternionField> = Arc::new(Constant::new(Quaternion::ZERO));
    let mut worst = 0.0_f64;
    for x in &ctx.interior {
        let (l, r) = bp_classical_point(ctx, spec, &cube, &zero, x, true)?;
        worst = worst.max((l - r).norm() / r.norm().max(1.0));
    }
    Ok(worst)
}

/// `f = g = c`: the volume terms vanish and the boundary terms give `2c`
/// inside, `0` outside.
pub fn bp_classical_rows(ctx: &Context, case: &str, _constants: bool) -> Vec<Row> {
    let c: Arc<dyn QuaternionField> = Arc::new(Constant::new(Quaternion::new(1.5, -0.5, 0.25, 2.0)));
    let mut rows = Vec::new();
    for (i, x) in ctx.interior.iter().enumerate() {
        rows.push(timed_row(case, format!("x{i}"), ctx.tol.bp_constants, || bp_classical_point(ctx, &ctx.spec, &c, &c, x, false)));
    }
    for (i, x) in ctx.exterior.iter().enumerate() {
        rows.push(timed_row(case, format!("e{i}"), ctx.tol.bp_exterior, || bp_classical_point(ctx, &ctx.spec, &c, &c, x, false)));
    }
    rows
}

const KERNEL_OFFSET: Coords = [0.3, -0.2, 0.25, -0.35];
const KERNEL_FD_STEP: f64 = 1e-5;

/// Largest difference between the exact kernel partials and central
/// differences at `x`.
fn kernel_partial_fd_mismatch(x: &Coords, pole: &Coords, psi: &StructuralSet) -> Result<f64> {
    let ke = kernel(x, pole, psi)?;
    let mut worst = 0.0_f64;
    for k in 0..4 {
        let (mut a, mut b) = (*x, *x);
        a[k] += KERNEL_FD_STEP;
        b[k] -= KERNEL_FD_STEP;
        let fd = (kernel_at(displacement(&a, pole, psi)) - kernel_at(displacement(&b, pole, psi))) / (2.0 * KERNEL_FD_STEP);
        worst = worst.max((fd - ke.partials[k]).norm());
    }
    Ok(worst)
}

pub fn kernel_regularity_rows(ctx: &Context) -> Vec<Row> {
    const CASE: &str = "kernel-regularity";
    let mut rows = Vec::new();
    for (label, psi) in [("psi", ctx.psi), ("psi-random", ctx.psi_random)] {
        for (i, x) in ctx.interior.iter().enumerate() {
            let pole: Coords = std::array::from_fn(|k| x[k] + KERNEL_OFFSET[k]);
            rows.push(timed_residual(CASE, format!("{label}:left:x{i}"), ctx.tol.kernel, || hyperholomorphy_residual(x, &pole, &psi)));
            rows.push(timed_residual(CASE, format!("{label}:right:x{i}"), ctx.tol.kernel, || {
                hyperholomorphy_residual_right(x, &pole, &psi)
            }));
            rows.push(timed_residual(CASE, format!("{label}:fd:x{i}"), ctx.tol.kernel_fd, || {
                hyperholomorphy_residual_fd(x, &pole, &psi, KERNEL_FD_STEP)
            }));
            rows.push(timed_residual(CASE, format!("{label}:partials-fd:x{i}"), ctx.tol.kernel_fd, || {
                kernel_partial_fd_mismatch(x, &pole, &psi)
            }));
        }
    }
    rows
}

/// Seed and count of the conjugation sample.
pub const CONJUGATION_SEED: u64 = 11;
pub const CONJUGATION_POINTS: usize = 20;

/// Points of the conjugation-symmetric box `[0.5, 1.5] x [-1, 1]^3`.
pub fn conjugation_points() -> Vec<Quaternion> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(CONJUGATION_SEED);
    (0..CONJUGATION_POINTS)
        .map(|_| Quaternion::new(rng.gen_range(0.5..1.5), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// Worst `conj(D_r(Z∘f∘Z)(x))` against `(D f)(conj x)` over the sample.
pub fn check_conjugation_remark(ctx: &Context) -> Vec<Row> {
    const CASE: &str = "conjugation";
    let p = ctx.pair_f();
    let c = Quaternion::new(0.5, -1.0, 2.0, 0.25);
    type Field = Box<dyn Fn(Quaternion) -> Quaternion>;
    let fields: [(&str, Field); 3] = [
        ("square", Box::new(|x: Quaternion| x * x)),
        ("constant", Box::new(move |_| c)),
        ("norm-sq", Box::new(|x: Quaternion| Quaternion::real(x.norm_sq()))),
    ];
    let pts = conjugation_points();
    let mut rows = Vec::new();
    for (name, f) in fields.iter() {
        let mut worst: Option<Row> = None;
        let start = Instant::now();
        for (i, x) in pts.iter().enumerate() {
            let zfz = |y: Quaternion| f(y.conj()).conj();
            let r = timed_row(CASE, format!("{name}:p{i}"), ctx.tol.conjugation, || {
                let lhs = quat_qq_derivative_right(zfz, p, *x, None)?.conj();
                let rhs = quat_qq_derivative_left(f, p, x.conj(), None)?;
                Ok((lhs, rhs))
            });
            if worst.as_ref().map(|w| !(r.rel_residual <= w.rel_residual)).unwrap_or(true) {
                worst = Some(r);
            }
        }
        let seconds = start.elapsed().as_secs_f64();
        rows.push(worst.expect("non-empty sample").with_seconds(seconds));
    }
    // closed form for |x|^2: D f(y) = (q + q') conj(y), so at conj(x) it is (q + q') x
    let mut worst: Option<Row> = None;
    for (i, x) in pts.iter().enumerate() {
        let r = timed_row(CASE, format!("norm-sq-closed-form:p{i}"), ctx.tol.conjugation, || {
            let lhs = quat_qq_derivative_left(|y: Quaternion| Quaternion::real(y.norm_sq()), p, x.conj(), None)?;
            Ok((lhs, *x * (p.q() + p.qp())))
        });
        if worst.as_ref().map(|w| !(r.rel_residual <= w.rel_residual)).unwrap_or(true) {
            worst = Some(r);
        }
    }
    rows.push(worst.expect("non-empty sample"));
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::Config;

    fn ctx() -> Context {
        Context::new(&Config::default()).unwrap()
    }

    #[test]
    fn stokes_batch_matches_engine() {
        let ctx = ctx();
        let spec = QuadSpec::new(4, 1, 0.02, 0.5).unwrap();
        let fields = low_degree_fields(&ctx.psi, &ctx.domain);
        let pick: Vec<NamedField> = fields.into_iter().filter(|(id, _)| id == "square" || id == "mono-small").collect();
        let res = stokes_pair_residuals(&pick, &ctx.psi, &ctx.sigma, &ctx.domain, &spec).unwrap();
        let (g, f) = (pick[0].1.clone(), pick[1].1.clone());
        let direct = crate::quad::boundary_integral(&Integrand::field(g), &Integrand::field(f), &ctx.domain, &ctx.sigma, &spec).unwrap();
        let (_, _, l, _) = res[1];
        assert!((l - direct).norm() <= 1e-12 * direct.norm().max(1.0));
    }

    #[test]
    fn conjugation_sample_is_fixed() {
        let a = conjugation_points();
        assert_eq!(a, conjugation_points());
        assert!(a.iter().all(|x| (0.5..1.5).contains(&x[0])));
    }

    #[test]
    fn kernel_rows_pass() {
        let rows = kernel_regularity_rows(&ctx());
        assert!(rows.iter().all(|r| r.verdict == crate::harness::report::Verdict::Pass), "{rows:?}");
    }
}
