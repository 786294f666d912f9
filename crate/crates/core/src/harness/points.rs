//! Deterministic evaluation points.

use crate::quad::Box4;
use crate::quat::Coords;

const BASES: [u32; 4] = [2, 3, 5, 7];

/// Radical inverse of `i` in `base`.
pub fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base as u64) as f64 * inv;
        i /= base as u64;
        inv /= b;
    }
    out
}

/// Halton point `i` (bases 2, 3, 5, 7) in the unit cube.
pub fn halton(i: u64) -> Coords {
    BASES.map(|b| radical_inverse(i, b))
}

/// `n` Halton points (indices `start..start+n`) in the central part
/// `[lo + margin*w, hi - margin*w]` of the box.
pub fn halton_in(b: &Box4, margin: f64, start: u64, n: usize) -> Vec<Coords> {
    (0..n as u64)
        .map(|i| {
            let h = halton(start + i);
            [0, 1, 2, 3].map(|k| b.lo[k] + b.width(k) * (margin + (1.0 - 2.0 * margin) * h[k]))
        })
        .collect()
}

/// Five interior points in the core `[lo + w/4, hi - w/4]`.
pub fn interior_points(b: &Box4) -> Vec<Coords> {
    halton_in(b, 0.25, 1, 5)
}

/// Three points outside the closed box, 0.3 to 0.4 widths away.
pub fn exterior_points(b: &Box4) -> Vec<Coords> {
    let c = b.center();
    let mut e0 = c;
    e0[0] = b.lo[0] - 0.3 * b.width(0);
    let mut e1 = c;
    e1[1] = b.hi[1] + 0.4 * b.width(1);
    let e2 = [0, 1, 2, 3].map(|k| b.hi[k] + 0.3 * b.width(k));
    vec![e0, e1, e2]
}

/// `n` frames `(w, x)` spread over the whole box.
pub fn frames(b: &Box4, n: usize) -> Vec<(Coords, Coords)> {
    let ws = halton_in(b, 0.0, 1, n);
    let xs = halton_in(b, 0.0, 1 + n as u64, n);
    ws.into_iter().zip(xs).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_first_points() {
        assert_eq!(halton(1), [0.5, 1.0 / 3.0, 0.2, 1.0 / 7.0]);
        assert_eq!(radical_inverse(6, 2), 0.375);
    }

    #[test]
    fn placement() {
        let b = Box4::new([1.0; 4], [2.0; 4]).unwrap();
        for p in interior_points(&b) {
            assert!(b.inner_distance(&p) >= 0.25);
        }
        for p in exterior_points(&b) {
            assert!(b.distance_to(&p) >= 0.3 - 1e-12);
        }
    }
}
