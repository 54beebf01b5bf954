//! Lower bounds on the critical mean degree and critical density derived
//! from a cluster coefficient: `μ_c ≥ 1/(1−C_t)` and
//! `λ_c ≥ 1/(V^(d)(1−C_t))`.

use serde::{Deserialize, Serialize};

use crate::cluster::{coefficient, CoefficientEstimate, Method};
use crate::error::{Error, Result};
use crate::geometry::unit_ball_volume;
use crate::scalar::Real;

/// A coefficient together with the bounds it implies.
///
/// `mu_lower · (1/V^(d)) = lambda_lower` holds by construction; for Monte
/// Carlo coefficients the interval fields carry the 95% CI mapped through
/// the (monotone) bound transform.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundResult<F> {
    pub d: usize,
    pub t: usize,
    pub coefficient: F,
    pub coefficient_method: Method,
    pub coefficient_half_width_95: F,
    pub mu_lower: F,
    pub lambda_lower: F,
    /// 95% interval for `mu_lower` (Monte Carlo coefficients only).
    pub mu_lower_interval: Option<(F, F)>,
    /// 95% interval for `lambda_lower` (Monte Carlo coefficients only).
    pub lambda_lower_interval: Option<(F, F)>,
}

/// Critical-mean-degree lower bound `1/(1−ct)`.
pub fn mu_lower_bound<F: Real>(ct: F) -> Result<F> {
    if !(ct >= F::zero() && ct < F::one()) {
        return Err(Error::InvalidParameter(format!(
            "cluster coefficient must lie in [0, 1), got {ct}"
        )));
    }
    Ok(F::one() / (F::one() - ct))
}

/// Critical-density lower bound `1/(V^(d)(1−ct))`.
pub fn lambda_lower_bound<F: Real>(d: usize, ct: F) -> Result<F> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(mu_lower_bound(ct)? / unit_ball_volume::<F>(d)?)
}

/// Compute the coefficient by `method` and fill in both bounds.
pub fn bound_report<F: Real>(
    d: usize,
    t: usize,
    method: Method,
    trials: u64,
    seed: u64,
) -> Result<BoundResult<F>> {
    let est: CoefficientEstimate<F> = coefficient(d, t, method, trials, seed)?;
    bound_report_from(d, t, &est)
}

/// Bounds from an already-computed coefficient estimate.
pub fn bound_report_from<F: Real>(
    d: usize,
    t: usize,
    est: &CoefficientEstimate<F>,
) -> Result<BoundResult<F>> {
    let mu = mu_lower_bound(est.value)?;
    let lambda = lambda_lower_bound(d, est.value)?;
    let intervals = if est.method == Method::MonteCarlo {
        let lo = (est.value - est.half_width_95).max(F::zero());
        let hi = est.value + est.half_width_95;
        if hi < F::one() {
            Some((
                (mu_lower_bound(lo)?, mu_lower_bound(hi)?),
                (lambda_lower_bound(d, lo)?, lambda_lower_bound(d, hi)?),
            ))
        } else {
            None
        }
    } else {
        None
    };
    let (mu_iv, lambda_iv) = match intervals {
        Some((m, l)) => (Some(m), Some(l)),
        None => (None, None),
    };
    Ok(BoundResult {
        d,
        t,
        coefficient: est.value,
        coefficient_method: est.method,
        coefficient_half_width_95: est.half_width_95,
        mu_lower: mu,
        lambda_lower: lambda,
        mu_lower_interval: mu_iv,
        lambda_lower_interval: lambda_iv,
    })
}
