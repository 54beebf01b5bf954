//! Monte Carlo estimation of the percolation threshold and the empirical
//! subcritical logarithmic-growth check.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::mu_lower_bound;
use crate::cluster::c3_quadrature;
use crate::components::{connected_components, largest_component_fraction};
use crate::error::{Error, Result};
use crate::geometry::{unit_ball_volume, Point, TorusBox};
use crate::rgg::{build_graph, sample_poisson_points, PointSet};
use crate::rng::stream_rng;
use crate::scalar::Real;

/// One density grid point of a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveRow<F> {
    pub density: F,
    pub trials: usize,
    pub mean_fraction: F,
    pub std_error: F,
    pub mean_origin_size: F,
}

/// Largest-component fraction vs density.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PercolationCurve<F> {
    pub d: usize,
    pub side: F,
    pub radius: F,
    pub rows: Vec<CurveRow<F>>,
}

/// Threshold from the first upward crossing of a level `theta`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdEstimate<F> {
    pub lambda_hat: F,
    pub theta: F,
    pub side: F,
    pub method: String,
}

/// One system size of the growth check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthRow<F> {
    pub n: usize,
    pub mean_largest: F,
    pub max_largest: usize,
    /// Max observed largest-component size divided by ln n.
    pub max_over_log_n: F,
}

/// Largest-component sizes across system sizes at fixed mean degree.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthReport<F> {
    pub mu: F,
    pub rows: Vec<GrowthRow<F>>,
}

/// The origin whose component the percolation probability refers to is
/// realized as an extra node at the box center (the choice is arbitrary
/// for a homogeneous process).
fn trial_fraction_and_origin_size<F: Real>(
    density: F,
    bbox: &TorusBox<F>,
    radius: F,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<(F, usize)> {
    let mut points = sample_poisson_points(density, bbox, rng)?;
    points.points.push(bbox.center());
    let origin_index = points.len() - 1;
    let graph = build_graph(&points, radius)?;
    let labeling = connected_components(&graph);
    let fraction = largest_component_fraction::<F>(&labeling, graph.node_count())?;
    Ok((
        fraction,
        labeling.size_of_component_containing(origin_index),
    ))
}

/// Sweep a density grid, measuring largest-component fraction statistics
/// and the origin-component size per grid point.
///
/// Trial `k` of grid point `g` uses stream `g·trials + k`, and per-point
/// statistics are accumulated in trial order, so the curve is identical
/// for any worker count.
pub fn percolation_sweep<F: Real>(
    d: usize,
    density_grid: &[F],
    side: F,
    radius: F,
    trials_per_point: usize,
    seed: u64,
) -> Result<PercolationCurve<F>> {
    if density_grid.is_empty() {
        return Err(Error::InvalidParameter("density grid is empty".into()));
    }
    if density_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter(
            "density grid must be strictly increasing".into(),
        ));
    }
    if !(density_grid[0] >= F::zero()) {
        return Err(Error::InvalidParameter(
            "densities must be nonnegative".into(),
        ));
    }
    if !(side >= F::of(8.0)) {
        return Err(Error::InvalidParameter(format!(
            "torus side must be at least 8, got {side}"
        )));
    }
    if trials_per_point == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let bbox = TorusBox::new(d, side)?;
    if !(radius > F::zero()) || radius > side / F::of(2.0) {
        return Err(Error::InvalidParameter(format!(
            "radius {radius} out of range (0, {}/2]",
            side
        )));
    }

    let tasks = density_grid.len() * trials_per_point;
    let samples: Vec<(F, usize)> = (0..tasks)
        .into_par_iter()
        .map(|task| {
            let density = density_grid[task / trials_per_point];
            let mut rng = stream_rng(seed, task as u64);
            trial_fraction_and_origin_size(density, &bbox, radius, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;

    let rows = density_grid
        .iter()
        .enumerate()
        .map(|(g, &density)| {
            let block = &samples[g * trials_per_point..(g + 1) * trials_per_point];
            let n = F::of_usize(trials_per_point);
            let mean = block.iter().map(|&(f, _)| f).sum::<F>() / n;
            let var = if trials_per_point > 1 {
                block
                    .iter()
                    .map(|&(f, _)| (f - mean) * (f - mean))
                    .sum::<F>()
                    / F::of_usize(trials_per_point - 1)
            } else {
                F::zero()
            };
            let mean_origin = block.iter().map(|&(_, s)| F::of_usize(s)).sum::<F>() / n;
            CurveRow {
                density,
                trials: trials_per_point,
                mean_fraction: mean,
                std_error: (var / n).sqrt(),
                mean_origin_size: mean_origin,
            }
        })
        .collect();

    Ok(PercolationCurve {
        d,
        side,
        radius,
        rows,
    })
}

/// Linear interpolation of the first upward crossing of `theta` by the
/// mean largest-component fraction.
pub fn estimate_threshold<F: Real>(
    curve: &PercolationCurve<F>,
    theta: F,
) -> Result<ThresholdEstimate<F>> {
    if !(theta > F::zero() && theta < F::one()) {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in (0, 1), got {theta}"
        )));
    }
    for pair in curve.rows.windows(2) {
        let (lo, hi) = (&pair[0], &pair[1]);
        if lo.mean_fraction < theta && theta <= hi.mean_fraction {
            let slope = (hi.density - lo.density) / (hi.mean_fraction - lo.mean_fraction);
            return Ok(ThresholdEstimate {
                lambda_hat: lo.density + (theta - lo.mean_fraction) * slope,
                theta,
                side: curve.side,
                method: "linear_interpolation".to_string(),
            });
        }
    }
    Err(Error::NoCrossing {
        theta: theta.to_f64().unwrap_or(f64::NAN),
    })
}

/// Empirical check of the subcritical regime: at mean degree `mu` below
/// the t = 3 bound, simulate graphs of exactly `n` uniform points (with
/// `L = (n/λ)^{1/d}`, radius 1) and report largest-component sizes and
/// their ratio to ln n.
pub fn subcritical_growth<F: Real>(
    d: usize,
    mu: F,
    n_list: &[usize],
    trials: usize,
    seed: u64,
) -> Result<GrowthReport<F>> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "n list must be nonempty and strictly increasing".into(),
        ));
    }
    if n_list[0] < 2 {
        return Err(Error::InvalidParameter("n must be at least 2".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    if !(mu > F::zero()) {
        return Err(Error::InvalidParameter(format!(
            "mean degree must be positive, got {mu}"
        )));
    }
    let limit = mu_lower_bound(c3_quadrature::<F>(d)?)?;
    if mu >= limit {
        return Err(Error::OutOfSubcriticalRegime {
            mu: mu.to_f64().unwrap_or(f64::NAN),
            limit: limit.to_f64().unwrap_or(f64::NAN),
        });
    }
    let density = mu / unit_ball_volume::<F>(d)?;

    let mut rows = Vec::with_capacity(n_list.len());
    for (size_idx, &n) in n_list.iter().enumerate() {
        let side = (F::of_usize(n) / density).powf(F::one() / F::of_usize(d));
        let bbox = TorusBox::new(d, side)?;
        let sizes: Vec<usize> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let task = (size_idx * trials + trial) as u64;
                let mut rng = stream_rng(seed, task);
                let points: Vec<Point<F>> = (0..n).map(|_| bbox.sample_uniform(&mut rng)).collect();
                let graph = build_graph(&PointSet { bbox, points }, F::one())?;
                Ok(connected_components(&graph).largest_size())
            })
            .collect::<Result<Vec<_>>>()?;
        let mean = sizes.iter().map(|&s| F::of_usize(s)).sum::<F>() / F::of_usize(trials);
        let max = sizes.iter().copied().max().unwrap_or(0);
        let log_n = F::of_usize(n).ln();
        rows.push(GrowthRow {
            n,
            mean_largest: mean,
            max_largest: max,
            max_over_log_n: F::of_usize(max) / log_n,
        });
    }
    Ok(GrowthReport { mu, rows })
}
