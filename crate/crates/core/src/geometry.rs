//! d-dimensional points, the toroidal metric, unit-ball volume, and
//! uniform sampling primitives.
//!
//! Boundary handling is toroidal everywhere: distances wrap per coordinate,
//! which removes border effects entirely, so a sampled box behaves like a
//! window of the infinite homogeneous process.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::gamma;
use crate::scalar::Real;

/// A point in `[0, L)^d` (or free space, for chain sampling).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point<F> {
    coords: Vec<F>,
}

impl<F: Real> Point<F> {
    pub fn new(coords: Vec<F>) -> Self {
        debug_assert!(!coords.is_empty());
        debug_assert!(coords.iter().all(|c| c.is_finite()));
        Point { coords }
    }

    /// Origin of `d`-dimensional space.
    pub fn origin(d: usize) -> Self {
        Point {
            coords: vec![F::zero(); d],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[F] {
        &self.coords
    }

    /// Plain Euclidean distance (no wrap); used for free-space chains.
    pub fn euclidean_distance(&self, other: &Self) -> F {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<F>()
            .sqrt()
    }
}

/// The sampling region `[0, L)^d` with wrap-around metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusBox<F> {
    dim: usize,
    side: F,
}

impl<F: Real> TorusBox<F> {
    pub fn new(dim: usize, side: F) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(dim));
        }
        if !(side > F::zero()) || !side.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "torus side must be positive and finite, got {side}"
            )));
        }
        Ok(TorusBox { dim, side })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> F {
        self.side
    }

    pub fn volume(&self) -> F {
        self.side.powi(self.dim as i32)
    }

    pub fn contains(&self, p: &Point<F>) -> bool {
        p.dim() == self.dim && p.coords().iter().all(|&c| c >= F::zero() && c < self.side)
    }

    /// Center point, used as the origin-node convention.
    pub fn center(&self) -> Point<F> {
        Point::new(vec![self.side / F::of(2.0); self.dim])
    }

    /// Uniform point in the box.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point<F> {
        let coords = (0..self.dim)
            .map(|_| F::unit_uniform(rng) * self.side)
            .collect();
        Point::new(coords)
    }

    pub(crate) fn torus_distance_sq_unchecked(&self, p: &Point<F>, q: &Point<F>) -> F {
        let mut acc = F::zero();
        for (&a, &b) in p.coords().iter().zip(q.coords()) {
            let mut delta = (a - b).abs();
            let wrapped = self.side - delta;
            if wrapped < delta {
                delta = wrapped;
            }
            acc = acc + delta * delta;
        }
        acc
    }
}

/// Volume of the d-dimensional unit ball, `π^{d/2} / Γ((d+2)/2)`.
pub fn unit_ball_volume<F: Real>(d: usize) -> Result<F> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    let half_d = F::of_usize(d) / F::of(2.0);
    Ok(F::PI().powf(half_d) / gamma(half_d + F::one()))
}

/// Euclidean distance minimized over per-coordinate wraps.
///
/// Both points must live in the box; the result is at most `(L/2)·√d`.
pub fn torus_distance<F: Real>(p: &Point<F>, q: &Point<F>, bbox: &TorusBox<F>) -> Result<F> {
    if p.dim() != bbox.dim() {
        return Err(Error::DimensionMismatch {
            expected: bbox.dim(),
            found: p.dim(),
        });
    }
    if q.dim() != bbox.dim() {
        return Err(Error::DimensionMismatch {
            expected: bbox.dim(),
            found: q.dim(),
        });
    }
    Ok(bbox.torus_distance_sq_unchecked(p, q).sqrt())
}

/// Uniform sample from the closed d-ball about `center`.
///
/// No torus wrap is applied; the caller wraps if needed. Direction comes
/// from a normalized Gaussian vector and the radial factor from the CDF
/// `u ↦ u^d`.
pub fn sample_uniform_in_ball<F: Real, R: Rng + ?Sized>(
    center: &Point<F>,
    radius: F,
    rng: &mut R,
) -> Result<Point<F>> {
    if !(radius > F::zero()) {
        return Err(Error::InvalidParameter(format!(
            "ball radius must be positive, got {radius}"
        )));
    }
    let d = center.dim();
    let inv_d = F::one() / F::of_usize(d);
    loop {
        let dir: Vec<F> = (0..d).map(|_| F::standard_normal(rng)).collect();
        let norm = dir.iter().map(|&x| x * x).sum::<F>().sqrt();
        if norm <= F::of(1e-12) {
            continue; // essentially never; resample a degenerate direction
        }
        let r = radius * F::unit_uniform(rng).powf(inv_d);
        let coords = center
            .coords()
            .iter()
            .zip(&dir)
            .map(|(&c, &g)| c + g / norm * r)
            .collect();
        return Ok(Point::new(coords));
    }
}
