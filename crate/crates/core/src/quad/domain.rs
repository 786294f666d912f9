use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::Coords;

/// Axis-aligned box `[lo_0, hi_0] x .. x [lo_3, hi_3]` in ψ-coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box4 {
    pub lo: Coords,
    pub hi: Coords,
}

/// One of the eight boundary faces: `x_axis = lo` (`side = -1`) or `hi` (`+1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Face {
    pub axis: usize,
    pub side: i8,
}

impl Box4 {
    pub fn new(lo: Coords, hi: Coords) -> Result<Self> {
        for k in 0..4 {
            if !(lo[k].is_finite() && hi[k].is_finite() && lo[k] < hi[k]) {
                return Err(Error::InvalidBox(format!("axis {k}: lo {} must be below hi {}", lo[k], hi[k])));
            }
        }
        Ok(Box4 { lo, hi })
    }

    pub fn unit() -> Self {
        Box4 { lo: [0.0; 4], hi: [1.0; 4] }
    }

    #[inline]
    pub fn width(&self, k: usize) -> f64 {
        self.hi[k] - self.lo[k]
    }

    pub fn volume(&self) -> f64 {
        (0..4).map(|k| self.width(k)).product()
    }

    pub fn diameter(&self) -> f64 {
        (0..4).map(|k| self.width(k).powi(2)).sum::<f64>().sqrt()
    }

    pub fn center(&self) -> Coords {
        [0, 1, 2, 3].map(|k| 0.5 * (self.lo[k] + self.hi[k]))
    }

    /// Faces in fixed order: axis-major, low side first.
    pub fn faces(&self) -> [Face; 8] {
        let mut out = [Face { axis: 0, side: -1 }; 8];
        for k in 0..4 {
            out[2 * k] = Face { axis: k, side: -1 };
            out[2 * k + 1] = Face { axis: k, side: 1 };
        }
        out
    }

    pub fn contains(&self, p: &Coords) -> bool {
        (0..4).all(|k| self.lo[k] <= p[k] && p[k] <= self.hi[k])
    }

    /// Strictly inside.
    pub fn contains_open(&self, p: &Coords) -> bool {
        (0..4).all(|k| self.lo[k] < p[k] && p[k] < self.hi[k])
    }

    /// Max-norm distance from an interior point to the boundary (0 outside).
    pub fn inner_distance(&self, p: &Coords) -> f64 {
        (0..4).map(|k| (p[k] - self.lo[k]).min(self.hi[k] - p[k])).fold(f64::INFINITY, f64::min).max(0.0)
    }

    /// Euclidean distance from `p` to the closed box (0 inside).
    pub fn distance_to(&self, p: &Coords) -> f64 {
        (0..4)
            .map(|k| {
                let d = (self.lo[k] - p[k]).max(p[k] - self.hi[k]).max(0.0);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Euclidean distance from `p` to the boundary.
    pub fn boundary_distance(&self, p: &Coords) -> f64 {
        if self.contains(p) {
            self.inner_distance(p)
        } else {
            self.distance_to(p)
        }
    }

    /// Point at relative position `t` (each `t_k` in `[0, 1]`).
    pub fn at(&self, t: &Coords) -> Coords {
        [0, 1, 2, 3].map(|k| self.lo[k] + t[k] * self.width(k))
    }
}

/// Quadrature configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    pub order: usize,
    pub subdiv: usize,
    /// Half-width of the excluded cube around a pole (absolute).
    pub epsilon: f64,
    pub grading: f64,
}

impl QuadSpec {
    pub fn new(order: usize, subdiv: usize, epsilon: f64, grading: f64) -> Result<Self> {
        let s = QuadSpec { order, subdiv, epsilon, grading };
        s.validate()?;
        Ok(s)
    }

    /// Order 8, two panels per axis, `epsilon = 1e-2 * diameter`, grading 0.5.
    pub fn default_for(b: &Box4) -> Self {
        QuadSpec { order: 8, subdiv: 2, epsilon: 1e-2 * b.diameter(), grading: 0.5 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 2 {
            return Err(Error::InvalidQuadSpec(format!("order {} below 2", self.order)));
        }
        if self.subdiv < 1 {
            return Err(Error::InvalidQuadSpec("subdiv must be at least 1".into()));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidQuadSpec(format!("epsilon {} must be finite and >= 0", self.epsilon)));
        }
        if !(self.grading > 0.0 && self.grading < 1.0) {
            return Err(Error::InvalidQuadSpec(format!("grading {} outside (0, 1)", self.grading)));
        }
        Ok(())
    }
}
