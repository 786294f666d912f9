use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 40;

/// One 7/15-point Gauss-Kronrod panel: (kronrod estimate, |kronrod - gauss|).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive bisection on G7K15 panels until each panel's error estimate is
/// below its share of `abs_tol` (or at the rounding floor).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let v = recurse(&f, a, b, abs_tol, 0)?;
    if !v.is_finite() {
        return Err(Error::NonFiniteSample { location: [a, b, 0.0, 0.0] });
    }
    Ok(v)
}

fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64> {
    let (v, err) = gk15(f, a, b);
    if !v.is_finite() {
        return Err(Error::NonFiniteSample { location: [a, b, 0.0, 0.0] });
    }
    let floor = 50.0 * f64::EPSILON * v.abs();
    if err <= tol.max(floor) || depth >= MAX_DEPTH {
        return Ok(v);
    }
    let m = 0.5 * (a + b);
    Ok(recurse(f, a, m, 0.5 * tol, depth + 1)? + recurse(f, m, b, 0.5 * tol, depth + 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_integrals() {
        let v = integrate(|t: f64| t.ln(), 1.0, 2.0, 1e-14).unwrap();
        assert!((v - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-14);
        let v = integrate(|t: f64| 1.0 / t, 1.0, 3.0, 1e-14).unwrap();
        assert!((v - 3f64.ln()).abs() < 1e-14);
        let v = integrate(|t: f64| t.sqrt(), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn reversed_interval() {
        let v = integrate(|t: f64| t * t, 2.0, 1.0, 1e-14).unwrap();
        assert!((v + 7.0 / 3.0).abs() < 1e-14);
    }
}
