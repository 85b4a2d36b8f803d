//! Analytic constants for radial power weights on homogeneous dimensions.
//!
//! With `u = |x|^alpha` and `v = |x|^beta` the ball and complement integrals
//! are elementary, the Muckenhoupt-type profiles collapse to constants
//! whenever the balance condition `(Q+alpha)/q + (Q+beta(1-p'))/p' = 0`
//! holds, and the two-sided constant bracket becomes fully explicit. This
//! module is the closed-form route that the quadrature engine is checked
//! against.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::hardy::{constant_bounds, ExponentPair};
use crate::Result;

/// Exponents within this distance of a convergence boundary are refused
/// rather than regularised.
const BOUNDARY_GUARD: f64 = 1e-10;

/// Balance residuals up to this size count as exactly balanced.
pub const BALANCE_TOL: f64 = 1e-12;

/// Power-weight parameter set on a space of homogeneous dimension Q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerParams {
    pub q_dim: f64,
    pub sphere_area: f64,
    pub alpha: f64,
    pub beta: f64,
    pub exps: ExponentPair,
}

impl PowerParams {
    pub fn new(q_dim: f64, sphere_area: f64, alpha: f64, beta: f64, exps: ExponentPair) -> Result<Self> {
        if !(q_dim >= 1.0) {
            return Err(Error::InvalidParams(format!(
                "homogeneous dimension must be >= 1, got {q_dim}"
            )));
        }
        if !(sphere_area > 0.0) {
            return Err(Error::InvalidParams(
                "sphere area must be positive".into(),
            ));
        }
        Ok(PowerParams {
            q_dim,
            sphere_area,
            alpha,
            beta,
            exps,
        })
    }

    /// Exponent of `v^{1-p'}`.
    pub fn beta_reduced(&self) -> f64 {
        self.beta * (1.0 - self.exps.p_conj)
    }
}

/// `\int_{B(0,r)} |y|^gamma dy = S r^{Q+gamma} / (Q+gamma)`, requiring
/// `Q + gamma > 0`.
pub fn ball_power_integral(q_dim: f64, sphere_area: f64, gamma: f64, r: f64) -> Result<f64> {
    let e = q_dim + gamma;
    if e <= BOUNDARY_GUARD {
        return Err(Error::InadmissibleExponent(format!(
            "ball power integral needs Q + gamma > 0, got {e}"
        )));
    }
    if !(r > 0.0) {
        return Err(Error::InvalidParams("radius must be positive".into()));
    }
    Ok(sphere_area / e * r.powf(e))
}

/// `\int_{X \ B(0,r)} |y|^gamma dy = S r^{Q+gamma} / |Q+gamma|`, requiring
/// `Q + gamma < 0`.
pub fn complement_power_integral(q_dim: f64, sphere_area: f64, gamma: f64, r: f64) -> Result<f64> {
    let e = q_dim + gamma;
    if e >= -BOUNDARY_GUARD {
        return Err(Error::InadmissibleExponent(format!(
            "complement power integral needs Q + gamma < 0, got {e}"
        )));
    }
    if !(r > 0.0) {
        return Err(Error::InvalidParams("radius must be positive".into()));
    }
    Ok(sphere_area / e.abs() * r.powf(e))
}

/// Outcome of a balance-condition check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalanceCheck {
    pub residual: f64,
    pub holds: bool,
}

/// Residual of `(Q+alpha)/q + (Q+beta(1-p'))/p'`; the profile is constant in
/// the radius exactly when this vanishes.
pub fn balance_check_direct(params: &PowerParams) -> BalanceCheck {
    let residual = (params.q_dim + params.alpha) / params.exps.q
        + (params.q_dim + params.beta_reduced()) / params.exps.p_conj;
    BalanceCheck {
        residual,
        holds: residual.abs() <= BALANCE_TOL,
    }
}

/// Solve the balance condition for beta given everything else.
pub fn solve_beta(alpha: f64, q_dim: f64, exps: &ExponentPair) -> f64 {
    let target = -exps.p_conj * (q_dim + alpha) / exps.q;
    (target - q_dim) / (1.0 - exps.p_conj)
}

/// Closed-form constant with its two-sided bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyConstant {
    pub d: f64,
    pub c_lower: f64,
    pub c_upper: f64,
}

/// Direct-case constant
/// `D1 = (S/(alpha+Q))^{1/q} (S/(Q+beta(1-p')))^{1/p'}` under the direct
/// admissibility `alpha + Q > 0`, `beta(1-p') + Q > 0` and exact balance.
pub fn hardy_constant_direct(params: &PowerParams) -> Result<HardyConstant> {
    let (q_dim, s) = (params.q_dim, params.sphere_area);
    let eu = q_dim + params.alpha;
    let ev = q_dim + params.beta_reduced();
    if eu <= BOUNDARY_GUARD || ev <= BOUNDARY_GUARD {
        return Err(Error::InadmissibleExponent(format!(
            "direct case needs alpha + Q > 0 and beta(1-p') + Q > 0, got {eu} and {ev}"
        )));
    }
    let balance = balance_check_direct(params);
    if !balance.holds {
        return Err(Error::BalanceViolated(balance.residual));
    }
    let d = (s / eu).powf(1.0 / params.exps.q) * (s / ev).powf(1.0 / params.exps.p_conj);
    let (c_lower, c_upper) = constant_bounds(&params.exps, d);
    Ok(HardyConstant { d, c_lower, c_upper })
}

/// Conjugate-case constant
/// `D2 = (S/|alpha+Q|)^{1/q} (S/|Q+beta(1-p')|)^{1/p'}` under
/// `alpha + Q < 0`, `beta(1-p') + Q < 0` and exact balance.
pub fn hardy_constant_conjugate(params: &PowerParams) -> Result<HardyConstant> {
    let (q_dim, s) = (params.q_dim, params.sphere_area);
    let eu = q_dim + params.alpha;
    let ev = q_dim + params.beta_reduced();
    if eu >= -BOUNDARY_GUARD || ev >= -BOUNDARY_GUARD {
        return Err(Error::InadmissibleExponent(format!(
            "conjugate case needs alpha + Q < 0 and beta(1-p') + Q < 0, got {eu} and {ev}"
        )));
    }
    let balance = balance_check_direct(params);
    if !balance.holds {
        return Err(Error::BalanceViolated(balance.residual));
    }
    let d = (s / eu.abs()).powf(1.0 / params.exps.q) * (s / ev.abs()).powf(1.0 / params.exps.p_conj);
    let (c_lower, c_upper) = constant_bounds(&params.exps, d);
    Ok(HardyConstant { d, c_lower, c_upper })
}
