//! Tensor Gauss quadrature over axis-aligned regions with parallel cell
//! evaluation and a fixed pairwise reduction tree.

use rayon::prelude::*;

use super::domain::{Box4, Face, QuadSpec};
use super::gauss::GaussRule;
use super::integrand::{Factor, Integrand};
use super::sigma::SigmaForm;
use crate::error::{Error, Result};
use crate::kernel::{displacement, kernel_at};
use crate::quat::{Coords, Quaternion};

/// Axis-aligned region; an axis with `lo == hi` is a fixed coordinate
/// (single node, unit weight), which is how face cells are represented.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub lo: Coords,
    pub hi: Coords,
}

impl Region {
    pub fn of_box(b: &Box4) -> Self {
        Region { lo: b.lo, hi: b.hi }
    }

    /// Largest side length.
    pub fn size(&self) -> f64 {
        (0..4).map(|k| self.hi[k] - self.lo[k]).fold(0.0, f64::max)
    }

    pub fn distance_to(&self, p: &Coords) -> f64 {
        (0..4)
            .map(|k| {
                let d = (self.lo[k] - p[k]).max(p[k] - self.hi[k]).max(0.0);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `n` equal panels along every non-degenerate axis, lexicographic order.
    pub fn grid(&self, n: usize) -> Vec<Region> {
        let axes: [Vec<(f64, f64)>; 4] = [0, 1, 2, 3].map(|k| split_interval(self.lo[k], self.hi[k], n));
        product4(&axes)
    }

    /// Splits every axis wider than `eta * dist(pole)`, recursively, until
    /// each piece is admissible.
    pub fn refine_towards(&self, pole: &Coords, eta: f64, max_depth: u32, out: &mut Vec<Region>) -> Result<()> {
        let d = self.distance_to(pole);
        let limit = eta * d;
        let needs: Vec<usize> = (0..4).filter(|&k| self.hi[k] - self.lo[k] > limit).collect();
        if needs.is_empty() {
            out.push(*self);
            return Ok(());
        }
        if max_depth == 0 {
            return Err(Error::PoleTooCloseToBoundary { distance: d, required: self.size() / eta });
        }
        let axes: [Vec<(f64, f64)>; 4] = [0, 1, 2, 3].map(|k| {
            if needs.contains(&k) {
                split_interval(self.lo[k], self.hi[k], 2)
            } else {
                vec![(self.lo[k], self.hi[k])]
            }
        });
        for child in product4(&axes) {
            child.refine_towards(pole, eta, max_depth - 1, out)?;
        }
        Ok(())
    }
}

fn split_interval(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    if a == b {
        return vec![(a, b)];
    }
    let h = (b - a) / n as f64;
    (0..n)
        .map(|i| {
            let lo = a + i as f64 * h;
            let hi = if i + 1 == n { b } else { a + (i + 1) as f64 * h };
            (lo, hi)
        })
        .collect()
}

fn product4(axes: &[Vec<(f64, f64)>; 4]) -> Vec<Region> {
    let mut out = Vec::with_capacity(axes.iter().map(|a| a.len()).product());
    for a in &axes[0] {
        for b in &axes[1] {
            for c in &axes[2] {
                for d in &axes[3] {
                    out.push(Region { lo: [a.0, b.0, c.0, d.0], hi: [a.1, b.1, c.1, d.1] });
                }
            }
        }
    }
    out
}

/// A region paired with the integrand (by index) and rule order used on it.
#[derive(Debug, Clone, Copy)]
pub struct Cell {
    pub region: Region,
    pub integrand: usize,
    pub order: usize,
}

/// Sum by recursive halving; the tree depends only on the length.
pub fn pairwise_sum(v: &[Quaternion]) -> Quaternion {
    match v.len() {
        0 => Quaternion::ZERO,
        1 => v[0],
        2 => v[0] + v[1],
        n => {
            let m = n / 2;
            pairwise_sum(&v[..m]) + pairwise_sum(&v[m..])
        }
    }
}

fn axis_nodes(lo: f64, hi: f64, order: usize) -> Vec<(f64, f64)> {
    if lo == hi {
        vec![(lo, 1.0)]
    } else {
        GaussRule::cached(order).mapped(lo, hi)
    }
}

/// Integral of one integrand over one cell, nodes in lexicographic order.
pub fn integrate_cell(f: &Integrand, region: &Region, order: usize) -> Result<Quaternion> {
    if f.is_zero() {
        return Ok(Quaternion::ZERO);
    }
    let axes: [Vec<(f64, f64)>; 4] = [0, 1, 2, 3].map(|k| axis_nodes(region.lo[k], region.hi[k], order));
    // slice tables: tables[s][k][i] = h_s(k, node_i on axis k)
    let tables: Vec<[Vec<Quaternion>; 4]> = f
        .slices
        .iter()
        .map(|h| [0, 1, 2, 3].map(|k| axes[k].iter().map(|&(t, _)| h(k, t)).collect()))
        .collect();
    let mut slice_vals = vec![Quaternion::ZERO; f.slices.len()];
    let mut point_vals = vec![Quaternion::ZERO; f.points.len()];
    let mut kernel_vals = vec![Quaternion::ZERO; f.kernels.len()];
    let mut acc = Quaternion::ZERO;
    let mut y = [0.0; 4];
    for (i0, &(y0, w0)) in axes[0].iter().enumerate() {
        y[0] = y0;
        let mut part1 = Quaternion::ZERO;
        for (i1, &(y1, w1)) in axes[1].iter().enumerate() {
            y[1] = y1;
            let mut part2 = Quaternion::ZERO;
            for (i2, &(y2, w2)) in axes[2].iter().enumerate() {
                y[2] = y2;
                let mut part3 = Quaternion::ZERO;
                for (i3, &(y3, w3)) in axes[3].iter().enumerate() {
                    y[3] = y3;
                    let idx = [i0, i1, i2, i3];
                    for (s, t) in tables.iter().enumerate() {
                        slice_vals[s] = t[0][idx[0]] + t[1][idx[1]] + t[2][idx[2]] + t[3][idx[3]];
                    }
                    for (p, fp) in f.points.iter().enumerate() {
                        point_vals[p] = fp(&y);
                    }
                    for (kk, (pole, psi)) in f.kernels.iter().enumerate() {
                        kernel_vals[kk] = kernel_at(displacement(&y, pole, psi));
                    }
                    let mut v = Quaternion::ZERO;
                    for term in &f.terms {
                        let mut t = Quaternion::ONE;
                        for fac in &term.factors {
                            t *= match *fac {
                                Factor::Const(c) => c,
                                Factor::Point(i) => point_vals[i],
                                Factor::Slices(i) => slice_vals[i],
                                Factor::Kernel(i) => kernel_vals[i],
                            };
                        }
                        v += t;
                    }
                    if !v.is_finite() {
                        return Err(Error::NonFiniteSample { location: y });
                    }
                    part3 += v * w3;
                }
                part2 += part3 * w2;
            }
            part1 += part2 * w1;
        }
        acc += part1 * w0;
    }
    Ok(acc)
}

/// Evaluates all cells (in parallel) and reduces them in list order.
pub fn integrate_cells(integrands: &[Integrand], cells: &[Cell]) -> Result<Quaternion> {
    let parts: Vec<Quaternion> = cells
        .par_iter()
        .map(|c| integrate_cell(&integrands[c.integrand], &c.region, c.order))
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&parts))
}

fn grid_cells(region: &Region, spec: &QuadSpec, integrand: usize) -> Vec<Cell> {
    region.grid(spec.subdiv).into_iter().map(|r| Cell { region: r, integrand, order: spec.order }).collect()
}

/// Composite tensor Gauss-Legendre volume integral.
pub fn volume_integral(f: &Integrand, b: &Box4, spec: &QuadSpec) -> Result<Quaternion> {
    spec.validate()?;
    integrate_cells(std::slice::from_ref(f), &grid_cells(&Region::of_box(b), spec, 0))
}

/// Refinement ratio used near a pole outside the integration region: a cell
/// is admissible when its size is at most `NEAR_ETA` times its distance to
/// the pole.
pub const NEAR_ETA: f64 = 1.0;
const MAX_REFINE_DEPTH: u32 = 24;

/// Volume integral whose integrand is singular at `pole` outside the box;
/// cells are refined towards the pole.
pub fn volume_integral_near(f: &Integrand, b: &Box4, spec: &QuadSpec, pole: &Coords) -> Result<Quaternion> {
    spec.validate()?;
    let mut regions = Vec::new();
    for r in Region::of_box(b).grid(spec.subdiv) {
        r.refine_towards(pole, NEAR_ETA, MAX_REFINE_DEPTH, &mut regions)?;
    }
    let cells: Vec<Cell> = regions.into_iter().map(|region| Cell { region, integrand: 0, order: spec.order }).collect();
    integrate_cells(std::slice::from_ref(f), &cells)
}

fn face_region(b: &Box4, axis: usize, side: i8) -> Region {
    let mut r = Region::of_box(b);
    let v = if side < 0 { b.lo[axis] } else { b.hi[axis] };
    r.lo[axis] = v;
    r.hi[axis] = v;
    r
}

/// `sum_faces ∫_face g M(face) f dS`, optionally refining face cells toward
/// a nearby pole.
pub fn boundary_integral_with(
    g: &Integrand,
    f: &Integrand,
    b: &Box4,
    sigma: &SigmaForm,
    spec: &QuadSpec,
    pole: Option<&Coords>,
) -> Result<Quaternion> {
    boundary_integral_pairs(&[(g.clone(), f.clone())], b, sigma, spec, pole)
}

/// `sum_i sum_faces ∫_face g_i M(face) f_i dS` in one pass over the faces.
pub fn boundary_integral_pairs(
    pairs: &[(Integrand, Integrand)],
    b: &Box4,
    sigma: &SigmaForm,
    spec: &QuadSpec,
    pole: Option<&Coords>,
) -> Result<Quaternion> {
    spec.validate()?;
    let mut integrands = Vec::with_capacity(8);
    let mut cells = Vec::new();
    for (i, face) in b.faces().iter().enumerate() {
        let m = sigma.weight(face.axis, face.side);
        let mut h = Integrand::zero();
        for (g, f) in pairs {
            h = h.add(&g.right_mul(m).mul(f));
        }
        integrands.push(h);
        let base = face_region(b, face.axis, face.side);
        for r in base.grid(spec.subdiv) {
            match pole {
                Some(p) => {
                    let mut rs = Vec::new();
                    r.refine_towards(p, NEAR_ETA, MAX_REFINE_DEPTH, &mut rs)?;
                    cells.extend(rs.into_iter().map(|region| Cell { region, integrand: i, order: spec.order }));
                }
                None => cells.push(Cell { region: r, integrand: i, order: spec.order }),
            }
        }
    }
    integrate_cells(&integrands, &cells)
}

/// Tensor Gauss nodes and weights of the composite volume rule, in the
/// order the engine visits them.
pub fn volume_nodes(b: &Box4, spec: &QuadSpec) -> Result<Vec<(Coords, f64)>> {
    spec.validate()?;
    let mut out = Vec::new();
    for r in Region::of_box(b).grid(spec.subdiv) {
        region_nodes(&r, spec.order, &mut out);
    }
    Ok(out)
}

/// Face nodes with weights and the face they lie on, faces in
/// [`Box4::faces`] order.
pub fn boundary_nodes(b: &Box4, spec: &QuadSpec) -> Result<Vec<(Coords, f64, Face)>> {
    spec.validate()?;
    let mut out = Vec::new();
    for face in b.faces() {
        let mut nodes = Vec::new();
        for r in face_region(b, face.axis, face.side).grid(spec.subdiv) {
            region_nodes(&r, spec.order, &mut nodes);
        }
        out.extend(nodes.into_iter().map(|(p, w)| (p, w, face)));
    }
    Ok(out)
}

fn region_nodes(r: &Region, order: usize, out: &mut Vec<(Coords, f64)>) {
    let axes: [Vec<(f64, f64)>; 4] = [0, 1, 2, 3].map(|k| axis_nodes(r.lo[k], r.hi[k], order));
    for &(y0, w0) in &axes[0] {
        for &(y1, w1) in &axes[1] {
            for &(y2, w2) in &axes[2] {
                for &(y3, w3) in &axes[3] {
                    out.push(([y0, y1, y2, y3], w0 * w1 * w2 * w3));
                }
            }
        }
    }
}

/// `sum_faces ∫_face g M(face) f dS`.
pub fn boundary_integral(g: &Integrand, f: &Integrand, b: &Box4, sigma: &SigmaForm, spec: &QuadSpec) -> Result<Quaternion> {
    boundary_integral_with(g, f, b, sigma, spec, None)
}

/// Number of geometric shells used when `epsilon = 0` (the innermost cube
/// is then integrated directly).
pub const CORE_SHELLS: i32 = 12;

/// Rule order on shell cells around the pole.
pub fn shell_order(spec: &QuadSpec) -> usize {
    spec.order.div_ceil(2).max(4)
}

/// Half-widths `r_0 < r_1 < .. < r_m = d` of the graded shells.
pub fn shell_radii(d: f64, epsilon: f64, grading: f64) -> Vec<f64> {
    let mut r = if epsilon > 0.0 { epsilon } else { d * grading.powi(CORE_SHELLS) };
    let mut radii = vec![r];
    while r / grading < d * (1.0 - 1e-12) {
        r /= grading;
        radii.push(r);
    }
    if d > r * (1.0 + 1e-12) {
        radii.push(d);
    }
    radii
}

/// Volume integral of an integrand singular at interior `pole`, over the box
/// minus the cube `|y - pole|_inf < epsilon` (which contains the
/// epsilon-ball). Graded cubic shells with ratio `grading` cover the region
/// out to the largest cube inside the box; the remainder is refined towards
/// the pole. With `epsilon = 0` a tiny core cube is integrated directly.
pub fn singular_volume_integral(f: &Integrand, b: &Box4, pole: &Coords, spec: &QuadSpec) -> Result<Quaternion> {
    spec.validate()?;
    let d = b.inner_distance(pole);
    if !b.contains_open(pole) || d < 4.0 * spec.epsilon || d == 0.0 {
        return Err(Error::PoleTooCloseToBoundary { distance: d, required: 4.0 * spec.epsilon });
    }
    let mut cells = Vec::new();
    let radii = shell_radii(d, spec.epsilon, spec.grading);
    if spec.epsilon == 0.0 {
        let r = radii[0];
        let region = Region { lo: pole.map(|v| v - r), hi: pole.map(|v| v + r) };
        cells.push(Cell { region, integrand: 0, order: spec.order });
    }
    let so = shell_order(spec);
    for w in radii.windows(2) {
        let (a, c) = (w[0], w[1]);
        let axes: [Vec<(f64, f64)>; 4] = [0, 1, 2, 3].map(|k| {
            let x = pole[k];
            vec![(x - c, x - a), (x - a, x), (x, x + a), (x + a, x + c)]
        });
        for r in product4(&axes) {
            let inner = (0..4).all(|k| r.lo[k] >= pole[k] - a && r.hi[k] <= pole[k] + a);
            if !inner {
                cells.push(Cell { region: r, integrand: 0, order: so });
            }
        }
    }
    // outer part: box minus the cube of half-width d
    let axes: [Vec<(f64, f64)>; 4] = [0, 1, 2, 3].map(|k| {
        let pts = [b.lo[k], pole[k] - d, pole[k] + d, b.hi[k]];
        pts.windows(2).filter(|p| p[1] > p[0]).map(|p| (p[0], p[1])).collect()
    });
    for r in product4(&axes) {
        let center_cube = (0..4).all(|k| r.lo[k] >= pole[k] - d * (1.0 + 1e-12) && r.hi[k] <= pole[k] + d * (1.0 + 1e-12));
        if center_cube {
            continue;
        }
        let mut rs = Vec::new();
        r.refine_towards(pole, 1.0, MAX_REFINE_DEPTH, &mut rs)?;
        cells.extend(rs.into_iter().map(|region| Cell { region, integrand: 0, order: spec.order }));
    }
    integrate_cells(std::slice::from_ref(f), &cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::StructuralSet;
    use crate::quad::calibrate_sigma;

    fn unit_spec() -> QuadSpec {
        QuadSpec::new(8, 2, 0.02, 0.5).unwrap()
    }

    #[test]
    fn constant_volume() {
        let v = volume_integral(&Integrand::constant(Quaternion::ONE), &Box4::unit(), &unit_spec()).unwrap();
        assert!((v - Quaternion::ONE).max_abs() < 1e-14);
    }

    #[test]
    fn separable_product() {
        let f = Integrand::point(|p: &Coords| Quaternion::real(p[0] * p[1] * p[2] * p[3]));
        let v = volume_integral(&f, &Box4::unit(), &unit_spec()).unwrap();
        assert!((v.re() - 1.0 / 16.0).abs() < 1e-13);
    }

    #[test]
    fn gauss_exactness_per_axis() {
        let spec = QuadSpec::new(4, 1, 0.0, 0.5).unwrap();
        let b = Box4::new([1.0, 0.0, -1.0, 2.0], [2.0, 1.5, 1.0, 2.5]).unwrap();
        // per-axis degree 7 = 2*4-1; odd power on the symmetric axis vanishes
        let f = Integrand::point(|p: &Coords| Quaternion::real(p[0].powi(7) * p[1].powi(6) * p[2].powi(7) * p[3].powi(5)));
        let v = volume_integral(&f, &b, &spec).unwrap();
        assert!(v.re().abs() < 1e-12, "{}", v.re());
        let g = Integrand::point(|p: &Coords| Quaternion::real(p[0].powi(7) * p[1].powi(6) * p[2].powi(6) * p[3].powi(5)));
        let exact = (2f64.powi(8) - 1.0) / 8.0 * (1.5f64.powi(7) / 7.0) * (2.0 / 7.0) * ((2.5f64.powi(6) - 2f64.powi(6)) / 6.0);
        let v = volume_integral(&g, &b, &spec).unwrap();
        assert!((v.re() - exact).abs() < 1e-12 * exact, "{} vs {}", v.re(), exact);
    }

    #[test]
    fn closed_surface_null_form() {
        let psi = StructuralSet::standard();
        let b = Box4::new([1.0; 4], [2.0, 1.5, 2.5, 3.0]).unwrap();
        let sigma = calibrate_sigma(&psi, &b, &unit_spec()).unwrap();
        let one = Integrand::constant(Quaternion::ONE);
        let v = boundary_integral(&one, &one, &b, &sigma, &unit_spec()).unwrap();
        assert!(v.max_abs() < 1e-12);
    }

    #[test]
    fn determinism_of_reduction() {
        let f = Integrand::point(|p: &Coords| Quaternion::new(p[0].sin(), p[1].exp(), p[2] * p[3], 1.0 / (1.0 + p[0])));
        let spec = QuadSpec::new(5, 3, 0.0, 0.5).unwrap();
        let a = volume_integral(&f, &Box4::unit(), &spec).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| volume_integral(&f, &Box4::unit(), &spec).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn shells_reach_distance() {
        let r = shell_radii(0.25, 0.02, 0.5);
        assert_eq!(r[0], 0.02);
        assert_eq!(*r.last().unwrap(), 0.25);
        for w in r.windows(2) {
            assert!(w[1] > w[0] && w[1] <= w[0] / 0.5 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn singular_matches_smooth_without_pole() {
        let b = Box4::new([1.0; 4], [2.0; 4]).unwrap();
        let f = Integrand::point(|p: &Coords| Quaternion::new(p[0] * p[1], p[2].exp(), 1.0, p[3] * p[3]));
        let spec = QuadSpec::new(8, 2, 0.0, 0.5).unwrap();
        let a = volume_integral(&f, &b, &spec).unwrap();
        let s = singular_volume_integral(&f, &b, &[1.4, 1.5, 1.6, 1.45], &spec).unwrap();
        assert!((a - s).max_abs() < 1e-12 * a.max_abs(), "{}", (a - s).max_abs());
    }

    #[test]
    fn pole_too_close() {
        let b = Box4::unit();
        let f = Integrand::constant(Quaternion::ONE);
        let spec = QuadSpec::new(8, 2, 0.1, 0.5).unwrap();
        assert!(matches!(
            singular_volume_integral(&f, &b, &[0.2, 0.5, 0.5, 0.5], &spec),
            Err(Error::PoleTooCloseToBoundary { .. })
        ));
    }
}
