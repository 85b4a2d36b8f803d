//! The reverse Hardy inequality engine.
//!
//! For exponents q <= p < 0 and weights u, v on a polar-decomposable space,
//! the inequality
//!
//! ```text
//! [ \int_X ( \int_{B(0,|x|)} f )^q u dx ]^{1/q}
//!     >= C (\int_X f^p v dx)^{1/p}
//! ```
//!
//! holds for all non-negative f exactly when the profile
//! `D1(t) = (\int_{B(0,t)} u)^{1/q} (\int_{B(0,t)} v^{1-p'})^{1/p'}`
//! is non-decreasing with a positive infimum D, and the best constant is
//! bracketed by `|p|^{1/q} (p')^{1/p'} D <= C <= D`. The conjugate version
//! runs the inner integral over the complement of the ball and asks the
//! mirrored profile D2 to be non-increasing.
//!
//! This module provides the exponent bookkeeping, the reverse Holder check,
//! the D-profiles with their monotonicity verdicts, both Hardy ratios, the
//! near-extremal family that approaches the upper constant, the cumulative
//! identity used inside the lower-bound proof, and the batch verifier that
//! ties it all into a report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Endpoint, Error};
use crate::quadrature::{
    cumulative, default_grid, integrate, CumulativeIntegral, EndpointHint, QuadratureConfig,
    SingularityHints,
};
use crate::radial::{PiecewisePowerFunction, RadialProfile, TailBehavior, WeightPair};
use crate::report::Verdict;
use crate::spaces::{polar_integrate_profile, PolarSpace};
use crate::Result;

/// Warning attached whenever the extremal family is evaluated.
pub const WARN_EXTREMAL_DIRECTION: &str = "extremal family taken in the large-amplitude \
direction: with p < 0 the amplitude^p tail term vanishes as the amplitude grows, which is \
the direction in which the truncated ratio converges to its limit; the small-amplitude \
direction diverges";

/// Warning attached when a D-profile infimum sits on the edge of the scanned
/// radius grid.
pub const WARN_INFIMUM_AT_EDGE: &str = "D-profile infimum attained at the edge of the radius \
grid; the true infimum over all radii may be smaller";

/// Validated exponent pair q <= p < 0 with conjugates p' = p/(p-1) and
/// q' = q/(q-1), both in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub p: f64,
    pub q: f64,
    pub p_conj: f64,
    pub q_conj: f64,
}

impl ExponentPair {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !p.is_finite() || !q.is_finite() {
            return Err(Error::InvalidExponents(format!(
                "p = {p}, q = {q} must be finite"
            )));
        }
        if !(p < 0.0) {
            return Err(Error::InvalidExponents(format!(
                "p = {p} must satisfy p < 0"
            )));
        }
        if !(q <= p) {
            return Err(Error::InvalidExponents(format!(
                "q = {q} must satisfy q <= p = {p}"
            )));
        }
        Ok(ExponentPair {
            p,
            q,
            p_conj: conjugate(p),
            q_conj: conjugate(q),
        })
    }
}

/// Holder conjugate e/(e-1).
pub fn conjugate(e: f64) -> f64 {
    e / (e - 1.0)
}

/// Validated exponent pair; the entry point named by the run configuration.
pub fn make_exponents(p: f64, q: f64) -> Result<ExponentPair> {
    ExponentPair::new(p, q)
}

/// Two-sided bracket of the best constant from the Muckenhoupt-type infimum:
/// `(|p|^{1/q} (p')^{1/p'} D, D)`.
pub fn constant_bounds(exps: &ExponentPair, d: f64) -> (f64, f64) {
    (eq_factor(exps) * d, d)
}

/// The lower-bound factor `|p|^{1/q} (p')^{1/p'}`, always <= 1 on
/// q <= p < 0. Computed in log space so extreme exponents cannot overflow.
pub fn eq_factor(exps: &ExponentPair) -> f64 {
    let log_factor = exps.p.abs().ln() / exps.q + exps.p_conj.ln() / exps.p_conj;
    log_factor.exp()
}

/// Monotonicity classification of a sampled profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotoneVerdict {
    NonDecreasing,
    NonIncreasing,
    Neither,
}

/// Sampled Muckenhoupt-type profile with its infimum and monotonicity
/// verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub infimum: f64,
    pub infimum_at_edge: bool,
    pub monotone_verdict: MonotoneVerdict,
}

const MONOTONE_SLACK: f64 = 1e-9;

fn classify_monotone(values: &[f64], preferred: MonotoneVerdict) -> MonotoneVerdict {
    let non_decreasing = values
        .windows(2)
        .all(|w| w[1] >= w[0] - MONOTONE_SLACK * w[0].abs().max(w[1].abs()));
    let non_increasing = values
        .windows(2)
        .all(|w| w[1] <= w[0] + MONOTONE_SLACK * w[0].abs().max(w[1].abs()));
    match preferred {
        MonotoneVerdict::NonDecreasing if non_decreasing => MonotoneVerdict::NonDecreasing,
        MonotoneVerdict::NonIncreasing if non_increasing => MonotoneVerdict::NonIncreasing,
        _ if non_decreasing => MonotoneVerdict::NonDecreasing,
        _ if non_increasing => MonotoneVerdict::NonIncreasing,
        _ => MonotoneVerdict::Neither,
    }
}

fn build_profile(radii: &[f64], values: Vec<f64>, preferred: MonotoneVerdict) -> DProfile {
    let (mut arg_min, mut infimum) = (0usize, f64::INFINITY);
    for (i, &v) in values.iter().enumerate() {
        if v < infimum {
            infimum = v;
            arg_min = i;
        }
    }
    let verdict = classify_monotone(&values, preferred);
    DProfile {
        radii: radii.to_vec(),
        values,
        infimum,
        infimum_at_edge: arg_min == 0 || arg_min + 1 == radii.len(),
        monotone_verdict: verdict,
    }
}

/// Default logarithmic radius grid for profile scans: 64 points spanning
/// [1e-3, 1e3].
pub fn default_radius_grid() -> Vec<f64> {
    let (lo, hi, n) = (1e-3f64, 1e3f64, 64usize);
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn weight_zero_exponent(w: &RadialProfile) -> Option<f64> {
    w.behavior_at_zero().exponent()
}

fn weight_tail_exponent(w: &RadialProfile) -> Option<f64> {
    w.behavior_at_infinity().exponent()
}

/// Direct-case profile `D1(t) = (\int_{B(0,t)} u)^{1/q}
/// (\int_{B(0,t)} v^{1-p'})^{1/p'}` on the given radius grid.
///
/// Power weights are pre-checked analytically: the ball integrals require
/// `alpha + Q > 0` and `beta (1-p') + Q > 0`.
pub fn d1_profile(
    space: &PolarSpace,
    weights: &WeightPair,
    exps: &ExponentPair,
    radii: &[f64],
    cfg: &QuadratureConfig,
) -> Result<DProfile> {
    let q_dim = space.homogeneous_dim;
    let v_reduced = weights.v.powered(1.0 - exps.p_conj)?;
    for (label, w) in [("u", &weights.u), ("v^(1-p')", &v_reduced)] {
        if let Some(e) = weight_zero_exponent(w) {
            if e + q_dim <= 1e-12 {
                return Err(Error::InadmissibleWeights(format!(
                    "ball integral of {label} diverges at 0: exponent {e} + Q = {}",
                    e + q_dim
                )));
            }
        }
    }
    let u_cum = cumulative(space, &weights.u, cfg)?;
    let v_cum = cumulative(space, &v_reduced, cfg)?;
    let mut values = Vec::with_capacity(radii.len());
    for &t in radii {
        let u_ball = u_cum.eval(t)?;
        let v_ball = v_cum.eval(t)?;
        values.push(u_ball.powf(1.0 / exps.q) * v_ball.powf(1.0 / exps.p_conj));
    }
    Ok(build_profile(radii, values, MonotoneVerdict::NonDecreasing))
}

/// Conjugate-case profile `D2(t)` built from complement integrals
/// `\int_{X \ B(0,t)}`. Power weights require `alpha + Q < 0` and
/// `beta (1-p') + Q < 0`.
pub fn d2_profile(
    space: &PolarSpace,
    weights: &WeightPair,
    exps: &ExponentPair,
    radii: &[f64],
    cfg: &QuadratureConfig,
) -> Result<DProfile> {
    let q_dim = space.homogeneous_dim;
    let v_reduced = weights.v.powered(1.0 - exps.p_conj)?;
    let density_tail = space.density_exponent_at_infinity();
    let mut cums = Vec::new();
    for (label, w) in [("u", weights.u.clone()), ("v^(1-p')", v_reduced)] {
        let cum = match w.behavior_at_infinity() {
            TailBehavior::Vanishes => {
                let upper = w
                    .segments()
                    .last()
                    .map(|s| s.start)
                    .unwrap_or(f64::INFINITY);
                tail_cumulative(space, w, EndpointHint::Unknown, upper, cfg)?
            }
            TailBehavior::Power(e) => {
                let d = density_tail.ok_or_else(|| {
                    Error::UnsupportedSpace(format!(
                        "complement integrals of power weights diverge on {}",
                        space.name
                    ))
                })?;
                if e + q_dim >= -1e-12 {
                    return Err(Error::InadmissibleWeights(format!(
                        "complement integral of {label} diverges: exponent {e} + Q = {}",
                        e + q_dim
                    )));
                }
                tail_cumulative(space, w, EndpointHint::Power(e + d), f64::INFINITY, cfg)?
            }
        };
        cums.push(cum);
    }
    let (u_cum, v_cum) = (&cums[0], &cums[1]);
    let mut values = Vec::with_capacity(radii.len());
    for &t in radii {
        let u_c = u_cum.eval(t)?;
        let v_c = v_cum.eval(t)?;
        values.push(u_c.powf(1.0 / exps.q) * v_c.powf(1.0 / exps.p_conj));
    }
    Ok(build_profile(radii, values, MonotoneVerdict::NonIncreasing))
}

fn tail_cumulative<'a>(
    space: &'a PolarSpace,
    w: RadialProfile,
    hint: EndpointHint,
    upper: f64,
    cfg: &QuadratureConfig,
) -> Result<CumulativeIntegral<'a>> {
    let sphere = space.sphere_area;
    let grid = default_grid(&w.breakpoints());
    if let Some(combined) = space.fold_density(&w) {
        return CumulativeIntegral::from_infinity(
            move |r| sphere * combined.eval(r),
            hint,
            upper,
            grid,
            cfg,
        );
    }
    CumulativeIntegral::from_infinity(
        move |r| sphere * w.eval(r) * space.density(r),
        hint,
        upper,
        grid,
        cfg,
    )
}

/// Outcome of a single reverse Holder comparison
/// `\int fg >= (\int f^p)^{1/p} (\int g^{p'})^{1/p'}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReverseHolderCheck {
    /// `\int fg`; infinite when the product integral diverges (the
    /// inequality then holds trivially).
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Check the reverse Holder inequality for a pair of positive profiles over
/// the whole space. Requires `0 < \int f^p < inf` and `0 < \int g^{p'} < inf`.
pub fn reverse_holder_check(
    space: &PolarSpace,
    f: &RadialProfile,
    g: &RadialProfile,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<ReverseHolderCheck> {
    reverse_holder_check_in(space, f, g, p, 0.0, f64::INFINITY, cfg)
}

/// Reverse Holder comparison restricted to the radial shell (r_lo, r_hi);
/// truncating the space is how finite-measure equality cases are exercised.
pub fn reverse_holder_check_in(
    space: &PolarSpace,
    f: &RadialProfile,
    g: &RadialProfile,
    p: f64,
    r_lo: f64,
    r_hi: f64,
    cfg: &QuadratureConfig,
) -> Result<ReverseHolderCheck> {
    if !(p < 0.0) {
        return Err(Error::InvalidExponents(format!(
            "reverse Holder needs p < 0, got {p}"
        )));
    }
    let p_conj = conjugate(p);
    let fp = polar_integrate_profile(space, &f.powered(p)?, r_lo, r_hi, cfg)?;
    let gp = polar_integrate_profile(space, &g.powered(p_conj)?, r_lo, r_hi, cfg)?;
    if !(fp > 0.0) || !(gp > 0.0) {
        return Err(Error::InvalidParams(
            "reverse Holder needs strictly positive integrals".into(),
        ));
    }
    let rhs = fp.powf(1.0 / p) * gp.powf(1.0 / p_conj);
    let lhs = match polar_integrate_profile(space, &f.multiplied(g), r_lo, r_hi, cfg) {
        Ok(v) => v,
        Err(Error::DivergentIntegral { .. }) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    let holds = lhs >= rhs * (1.0 - 1e-10);
    Ok(ReverseHolderCheck { lhs, rhs, holds })
}

fn require_positive_power_profile(f: &RadialProfile) -> Result<(f64, f64)> {
    if !f.strictly_positive() {
        return Err(Error::InvalidParams(
            "Hardy ratios need strictly positive test functions".into(),
        ));
    }
    let s0 = f
        .behavior_at_zero()
        .exponent()
        .expect("positive profile has a power head");
    let s_inf = f
        .behavior_at_infinity()
        .exponent()
        .expect("positive profile has a power tail");
    Ok((s0, s_inf))
}

/// Normalise a profile to O(1) magnitude at r = 1 so the whole pipeline is
/// exactly scale-equivariant; returns (normalised profile, removed scale).
fn normalised(f: &RadialProfile) -> (RadialProfile, f64) {
    let scale = f.eval(1.0);
    if scale.is_finite() && scale > 0.0 {
        (f.scaled(1.0 / scale), scale)
    } else {
        (f.clone(), 1.0)
    }
}

/// Left side of the reverse Hardy inequality:
/// `[ \int_X ( \int_{B(0,|x|)} f )^q u dx ]^{1/q}`, computed through a
/// cumulative inner integral and an adaptive outer pass.
pub fn hardy_lhs(
    space: &PolarSpace,
    f: &RadialProfile,
    u: &RadialProfile,
    q: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let (f_norm, scale) = normalised(f);
    let (s0, s_inf) = require_positive_power_profile(&f_norm)?;
    let q_dim = space.homogeneous_dim;
    let d0 = space.density_exponent_at_zero();

    // Inner cumulative F(r); construction refuses Q + s0 <= 0.
    let f_cum = cumulative(space, &f_norm, cfg)?;

    // Outer integrand F(r)^q u(r) density(r); endpoint analysis below.
    let zero_exp = match weight_zero_exponent(u) {
        Some(eu) => {
            let e = (q_dim + s0) * q + eu + d0;
            if e <= -1.0 + 1e-12 {
                return Err(Error::divergent(
                    Endpoint::Zero,
                    format!("outer Hardy integrand exponent {e} <= -1 at the origin"),
                ));
            }
            EndpointHint::Power(e)
        }
        None => EndpointHint::Unknown,
    };

    let mut upper = f64::INFINITY;
    let tail_exp = match weight_tail_exponent(u) {
        None => {
            upper = u
                .segments()
                .last()
                .map(|s| s.start)
                .unwrap_or(f64::INFINITY);
            EndpointHint::Unknown
        }
        Some(eu) => {
            let d_inf = space.density_exponent_at_infinity().ok_or_else(|| {
                Error::divergent(
                    Endpoint::Infinity,
                    format!(
                        "power data against super-polynomial density on {}",
                        space.name
                    ),
                )
            })?;
            let growth = q_dim + s_inf;
            let e = if growth > 1e-9 {
                // F grows like r^{Q + s_inf}.
                growth * q + eu + d_inf
            } else if growth < -1e-9 {
                // F saturates at its finite total.
                eu + d_inf
            } else {
                return Err(Error::InadmissibleExponent(
                    "test function tail sits on the logarithmic boundary Q + s_inf = 0".into(),
                ));
            };
            if e >= -1.0 - 1e-12 {
                return Err(Error::divergent(
                    Endpoint::Infinity,
                    format!("outer Hardy integrand tail exponent {e} >= -1"),
                ));
            }
            EndpointHint::Power(e)
        }
    };

    let mut breakpoints = f_norm.breakpoints();
    breakpoints.extend(u.breakpoints());
    let u_density = space.fold_density(u);
    let weight_at = |r: f64| match &u_density {
        Some(c) => c.eval(r),
        None => u.eval(r) * space.density(r),
    };
    let outer = integrate(
        |r| weighted_power(f_cum.eval(r).unwrap_or(f64::NAN), q, weight_at(r)),
        0.0,
        upper,
        SingularityHints {
            at_zero: zero_exp,
            at_infinity: tail_exp,
        },
        &breakpoints,
        cfg,
    )?;
    Ok((space.sphere_area * outer).powf(1.0 / q) * scale)
}

/// `inner^q * weight` with extreme radii handled: once any factor leaves the
/// representable range the convergent-exponent analysis behind the endpoint
/// hints guarantees the true product is far below f64 resolution, so it
/// contributes zero.
fn weighted_power(inner: f64, q: f64, weight: f64) -> f64 {
    if inner.is_nan() {
        return f64::NAN;
    }
    if inner == 0.0 || inner.is_infinite() {
        return 0.0;
    }
    let a = inner.powf(q);
    if a == 0.0 || weight == 0.0 {
        return 0.0;
    }
    a * weight
}

/// Right side of the inequality: `( \int_X f^p v dx )^{1/p}`.
pub fn hardy_rhs(
    space: &PolarSpace,
    f: &RadialProfile,
    v: &RadialProfile,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let (f_norm, scale) = normalised(f);
    require_positive_power_profile(&f_norm)?;
    let integrand = f_norm.powered(p)?.multiplied(v);
    let value = polar_integrate_profile(space, &integrand, 0.0, f64::INFINITY, cfg)?;
    if !(value > 0.0) {
        return Err(Error::InvalidParams(
            "right side of the Hardy inequality must be positive".into(),
        ));
    }
    Ok(value.powf(1.0 / p) * scale)
}

/// Hardy ratio lhs/rhs; scale-invariant in f.
pub fn hardy_ratio(
    space: &PolarSpace,
    f: &RadialProfile,
    weights: &WeightPair,
    exps: &ExponentPair,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let lhs = hardy_lhs(space, f, &weights.u, exps.q, cfg)?;
    let rhs = hardy_rhs(space, f, &weights.v, exps.p, cfg)?;
    Ok(lhs / rhs)
}

/// Conjugate left side with the inner integral over the complement
/// `X \ B(0,|x|)`, accumulated from infinity inward.
pub fn conjugate_hardy_lhs(
    space: &PolarSpace,
    f: &RadialProfile,
    u: &RadialProfile,
    q: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let (f_norm, scale) = normalised(f);
    let (s0, s_inf) = require_positive_power_profile(&f_norm)?;
    let q_dim = space.homogeneous_dim;
    let d0 = space.density_exponent_at_zero();
    let d_inf = space.density_exponent_at_infinity().ok_or_else(|| {
        Error::UnsupportedSpace(format!(
            "conjugate Hardy with power data diverges on {}",
            space.name
        ))
    })?;

    // G(r) = sphere * \int_r^inf f density; needs Q + s_inf < 0.
    let sphere = space.sphere_area;
    let f_density = space.fold_density(&f_norm);
    let g_cum = CumulativeIntegral::from_infinity(
        |r| match &f_density {
            Some(c) => sphere * c.eval(r),
            None => sphere * f_norm.eval(r) * space.density(r),
        },
        EndpointHint::Power(s_inf + d_inf),
        f64::INFINITY,
        default_grid(&f_norm.breakpoints()),
        cfg,
    )?;

    let head = q_dim + s0;
    let zero_exp = match weight_zero_exponent(u) {
        Some(eu) => {
            let e = if head < -1e-9 {
                // G blows up like r^{Q + s0}; with q < 0 the power flips down.
                head * q + eu + d0
            } else if head > 1e-9 {
                // G approaches its finite total near the origin.
                eu + d0
            } else {
                return Err(Error::InadmissibleExponent(
                    "test function head sits on the logarithmic boundary Q + s0 = 0".into(),
                ));
            };
            if e <= -1.0 + 1e-12 {
                return Err(Error::divergent(
                    Endpoint::Zero,
                    format!("conjugate outer integrand exponent {e} <= -1 at the origin"),
                ));
            }
            EndpointHint::Power(e)
        }
        None => EndpointHint::Unknown,
    };
    let mut upper = f64::INFINITY;
    let tail_exp = match weight_tail_exponent(u) {
        None => {
            upper = u
                .segments()
                .last()
                .map(|s| s.start)
                .unwrap_or(f64::INFINITY);
            EndpointHint::Unknown
        }
        Some(eu) => {
            let e = (q_dim + s_inf) * q + eu + d_inf;
            if e >= -1.0 - 1e-12 {
                return Err(Error::divergent(
                    Endpoint::Infinity,
                    format!("conjugate outer integrand tail exponent {e} >= -1"),
                ));
            }
            EndpointHint::Power(e)
        }
    };

    let mut breakpoints = f_norm.breakpoints();
    breakpoints.extend(u.breakpoints());
    let u_density = space.fold_density(u);
    let weight_at = |r: f64| match &u_density {
        Some(c) => c.eval(r),
        None => u.eval(r) * space.density(r),
    };
    let outer = integrate(
        |r| weighted_power(g_cum.eval(r).unwrap_or(f64::NAN), q, weight_at(r)),
        0.0,
        upper,
        SingularityHints {
            at_zero: zero_exp,
            at_infinity: tail_exp,
        },
        &breakpoints,
        cfg,
    )?;
    Ok((space.sphere_area * outer).powf(1.0 / q) * scale)
}

/// Conjugate Hardy ratio; scale-invariant in f.
pub fn conjugate_hardy_ratio(
    space: &PolarSpace,
    f: &RadialProfile,
    weights: &WeightPair,
    exps: &ExponentPair,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let lhs = conjugate_hardy_lhs(space, f, &weights.u, exps.q, cfg)?;
    let rhs = hardy_rhs(space, f, &weights.v, exps.p, cfg)?;
    Ok(lhs / rhs)
}

/// The near-extremal construction: `f = v^{1-p'}` inside the ball of radius
/// t, `amplitude * f1` outside. As the amplitude grows the Hardy ratio
/// approaches a limit bounded by D1(t).
pub fn extremal_family_member(
    space: &PolarSpace,
    v: &RadialProfile,
    exps: &ExponentPair,
    t: f64,
    amplitude: f64,
    f1: &RadialProfile,
) -> Result<RadialProfile> {
    if !(t > 0.0) || !(amplitude > 0.0) {
        return Err(Error::InvalidParams(
            "extremal construction needs t > 0 and amplitude > 0".into(),
        ));
    }
    // Tail integrability: \int_{|x|>t} v f1^p < inf.
    let q_dim = space.homogeneous_dim;
    let ev = weight_tail_exponent(v)
        .ok_or_else(|| Error::InadmissibleTail("weight v vanishes at infinity".into()))?;
    let e1 = f1
        .behavior_at_infinity()
        .exponent()
        .ok_or_else(|| Error::InadmissibleTail("tail function vanishes at infinity".into()))?;
    let tail_exponent = ev + exps.p * e1 + q_dim;
    if tail_exponent >= -1e-12 {
        return Err(Error::InadmissibleTail(format!(
            "tail integral of v f1^p diverges: exponent {tail_exponent} >= 0"
        )));
    }

    let inner = v.powered(1.0 - exps.p_conj)?;
    let outer = f1.scaled(amplitude);
    let mut segments = Vec::new();
    for s in inner.segments() {
        if s.start < t {
            segments.push(*s);
        }
    }
    let cut = outer
        .segments()
        .iter()
        .filter(|s| s.start <= t)
        .next_back()
        .copied();
    if let Some(seg) = cut {
        segments.push(crate::radial::PowerSegment {
            start: t,
            coeff: seg.coeff,
            exponent: seg.exponent,
        });
    }
    for s in outer.segments() {
        if s.start > t {
            segments.push(*s);
        }
    }
    RadialProfile::new(segments)
}

/// One evaluation point of the proof-internal cumulative identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityPoint {
    pub t: f64,
    pub h1: f64,
    pub expected: f64,
    pub rel_deviation: f64,
}

/// Report of the identity `H1(t) = p' h(t)^p` where
/// `h(t) = (\int_0^t V)^{1/(p p')}` and `H1(t) = \int_0^t h^{-p'} V`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofIdentityReport {
    pub p: f64,
    pub points: Vec<IdentityPoint>,
    pub max_rel_deviation: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// Numerically verify the cumulative identity underlying the lower-bound
/// proof, integrating both routes independently.
pub fn proof_identity_check(
    space: &PolarSpace,
    v: &RadialProfile,
    exps: &ExponentPair,
    t_grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<ProofIdentityReport> {
    let p = exps.p;
    let p_conj = exps.p_conj;
    let v_reduced = v.powered(1.0 - p_conj)?;
    let e_v = weight_zero_exponent(&v_reduced)
        .ok_or_else(|| Error::InadmissibleWeights("v^(1-p') vanishes near 0".into()))?;
    let q_dim = space.homogeneous_dim;
    if e_v + q_dim <= 1e-12 {
        return Err(Error::InadmissibleWeights(format!(
            "cumulative of v^(1-p') diverges at 0: exponent {} + Q = {}",
            e_v,
            e_v + q_dim
        )));
    }
    // W(t) = \int_0^t V with V(s) = sphere * density(s) * v^{1-p'}(s).
    let w_cum = cumulative(space, &v_reduced, cfg)?;
    let sphere = space.sphere_area;
    let d0 = space.density_exponent_at_zero();

    // Integrand of H1: W(s)^{-1/p} V(s); near 0 it behaves like
    // s^{(Q + e_v)(-1/p) + e_v + Q - 1}, integrable whenever W is finite.
    let h1_zero_exp = (q_dim + e_v) * (-1.0 / p) + e_v + d0;
    let v_density = space.fold_density(&v_reduced);
    let v_at = |s: f64| match &v_density {
        Some(c) => c.eval(s),
        None => v_reduced.eval(s) * space.density(s),
    };
    let mut points = Vec::with_capacity(t_grid.len());
    let mut max_rel: f64 = 0.0;
    for &t in t_grid {
        let h1 = integrate(
            |s| {
                let w = w_cum.eval(s).unwrap_or(f64::NAN);
                w.powf(-1.0 / p) * sphere * v_at(s)
            },
            0.0,
            t,
            SingularityHints {
                at_zero: EndpointHint::Power(h1_zero_exp),
                at_infinity: EndpointHint::Unknown,
            },
            &v_reduced.breakpoints(),
            cfg,
        )?;
        let expected = p_conj * w_cum.eval(t)?.powf(1.0 / p_conj);
        let rel = (h1 - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
        max_rel = max_rel.max(rel);
        points.push(IdentityPoint {
            t,
            h1,
            expected,
            rel_deviation: rel,
        });
    }
    let tolerance = 1e-6;
    Ok(ProofIdentityReport {
        p,
        points,
        max_rel_deviation: max_rel,
        tolerance,
        holds: max_rel <= tolerance,
    })
}

/// Open interval of admissible exponents; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentWindow {
    pub lo: f64,
    pub hi: f64,
}

impl ExponentWindow {
    fn is_empty(&self) -> bool {
        !(self.hi > self.lo)
    }
}

/// Admissible (s0, s_inf) windows for two-branch power test functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleWindows {
    pub s0: ExponentWindow,
    pub s_inf: ExponentWindow,
}

/// Which Hardy inequality a window serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HardyKind {
    Direct,
    Conjugate,
}

/// Solve the six exponent inequalities that make a two-branch power function
/// admissible for the chosen inequality: integrability of the inner integral
/// at both ends, convergence of the outer integral at both ends, and
/// convergence of the weighted right side at both ends.
pub fn admissible_window(
    space: &PolarSpace,
    weights: &WeightPair,
    exps: &ExponentPair,
    kind: HardyKind,
) -> Result<AdmissibleWindows> {
    let q_dim = space.homogeneous_dim;
    let eu0 = weight_zero_exponent(&weights.u)
        .ok_or_else(|| Error::InadmissibleWeights("u vanishes near 0".into()))?;
    let eu_inf = weight_tail_exponent(&weights.u)
        .ok_or_else(|| Error::InadmissibleWeights("u vanishes at infinity".into()))?;
    let ev0 = weight_zero_exponent(&weights.v)
        .ok_or_else(|| Error::InadmissibleWeights("v vanishes near 0".into()))?;
    let ev_inf = weight_tail_exponent(&weights.v)
        .ok_or_else(|| Error::InadmissibleWeights("v vanishes at infinity".into()))?;
    let (p, q) = (exps.p, exps.q);

    // Outer-at-0 and rhs-at-0 both cap s0 from above (q, p < 0 flip signs).
    let s0_cap = ((q_dim * q + eu0 + q_dim) / -q).min((ev0 + q_dim) / -p);
    // Outer-at-inf and rhs-at-inf both floor s_inf.
    let s_inf_floor = ((q_dim * q + eu_inf + q_dim) / -q).max((ev_inf + q_dim) / -p);

    let windows = match kind {
        HardyKind::Direct => AdmissibleWindows {
            s0: ExponentWindow {
                lo: -q_dim,
                hi: s0_cap,
            },
            s_inf: ExponentWindow {
                lo: s_inf_floor.max(-q_dim),
                hi: f64::INFINITY,
            },
        },
        HardyKind::Conjugate => AdmissibleWindows {
            s0: ExponentWindow {
                lo: f64::NEG_INFINITY,
                hi: s0_cap.min(-q_dim),
            },
            s_inf: ExponentWindow {
                lo: s_inf_floor,
                hi: -q_dim,
            },
        },
    };
    if windows.s0.is_empty() || windows.s_inf.is_empty() {
        return Err(Error::InadmissibleWeights(format!(
            "empty admissible window: s0 in ({}, {}), s_inf in ({}, {})",
            windows.s0.lo, windows.s0.hi, windows.s_inf.lo, windows.s_inf.hi
        )));
    }
    Ok(windows)
}

/// Family generation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub count: usize,
    pub seed: u64,
    /// Breakpoint radii are drawn log-uniformly from this range.
    pub breakpoint_range: (f64, f64),
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec {
            count: 50,
            seed: 0,
            breakpoint_range: (0.1, 10.0),
        }
    }
}

fn sample_window(window: ExponentWindow, rng: &mut ChaCha8Rng) -> f64 {
    // Unbounded sides are capped four exponent units from the finite side;
    // bounded windows keep a 2% interior margin against near-divergence.
    let lo = if window.lo.is_finite() {
        window.lo
    } else {
        window.hi - 4.0
    };
    let hi = if window.hi.is_finite() {
        window.hi
    } else {
        lo + 4.0
    };
    let width = hi - lo;
    lo + width * (0.02 + 0.96 * rng.gen::<f64>())
}

/// Seeded admissible family of two-branch power functions.
pub fn generate_family(
    windows: &AdmissibleWindows,
    spec: &FamilySpec,
) -> Vec<PiecewisePowerFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (r_lo, r_hi) = spec.breakpoint_range;
    (0..spec.count)
        .map(|_| {
            let s0 = sample_window(windows.s0, &mut rng);
            let s_inf = sample_window(windows.s_inf, &mut rng);
            let bp = (r_lo.ln() + (r_hi.ln() - r_lo.ln()) * rng.gen::<f64>()).exp();
            PiecewisePowerFunction::new(s0, s_inf, bp, 1.0).expect("valid family member")
        })
        .collect()
}

/// One evaluated family member in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioEntry {
    /// (start, coeff, exponent) triples of the test function.
    pub function: Vec<(f64, f64, f64)>,
    pub ratio: f64,
}

/// Options of the batch verifier.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub radii: Vec<f64>,
    pub quadrature: QuadratureConfig,
    /// Relative slack on the lower-bound comparison.
    pub ratio_tol: f64,
    /// Relative slack on the extremal upper-bound comparison.
    pub family_tol: f64,
    /// Amplitudes of the extremal sweep (direct case only).
    pub extremal_amplitudes: Vec<f64>,
    /// Truncation radius of the extremal construction.
    pub extremal_radius: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            radii: default_radius_grid(),
            quadrature: QuadratureConfig::default(),
            ratio_tol: 1e-6,
            family_tol: 1e-2,
            extremal_amplitudes: vec![1e2, 1e3, 1e4],
            extremal_radius: 1.0,
        }
    }
}

/// Structured verdict of a Hardy verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    pub kind: HardyKind,
    pub exponents: ExponentPair,
    pub weights: WeightPair,
    pub d_profile: DProfile,
    /// Infimum of the D-profile.
    pub d: f64,
    pub c_lower: f64,
    pub c_upper: f64,
    pub ratios: Vec<RatioEntry>,
    pub min_ratio: f64,
    /// `min_ratio - c_lower`.
    pub margin: f64,
    /// (amplitude, ratio) sweep of the extremal family; empty for the
    /// conjugate inequality.
    pub extremal: Vec<(f64, f64)>,
    pub extremal_min: Option<f64>,
    pub verdict: Verdict,
    pub diagnostics: Vec<String>,
}

/// Run the full direct-case verification: profile gate, two-sided constant,
/// family ratios and extremal sweep.
pub fn verify_hardy(
    space: &PolarSpace,
    weights: &WeightPair,
    exps: &ExponentPair,
    family: &[PiecewisePowerFunction],
    opts: &VerifyOptions,
) -> Result<HardyReport> {
    let profile = d1_profile(space, weights, exps, &opts.radii, &opts.quadrature)?;
    let mut diagnostics = Vec::new();
    if profile.infimum_at_edge && profile.monotone_verdict != MonotoneVerdict::NonDecreasing {
        diagnostics.push(WARN_INFIMUM_AT_EDGE.to_string());
    }
    let d = profile.infimum;
    let (c_lower, c_upper) = constant_bounds(exps, d);

    if profile.monotone_verdict != MonotoneVerdict::NonDecreasing {
        diagnostics.push(
            "D1 profile is not non-decreasing; the characterisation does not apply and no \
             verdict is drawn"
                .to_string(),
        );
        return Ok(HardyReport {
            kind: HardyKind::Direct,
            exponents: *exps,
            weights: weights.clone(),
            d_profile: profile,
            d,
            c_lower,
            c_upper,
            ratios: Vec::new(),
            min_ratio: f64::NAN,
            margin: f64::NAN,
            extremal: Vec::new(),
            extremal_min: None,
            verdict: Verdict::Inconclusive,
            diagnostics,
        });
    }

    let ratios: Vec<RatioEntry> = family
        .par_iter()
        .map(|f| {
            let profile = f.profile();
            hardy_ratio(space, &profile, weights, exps, &opts.quadrature).map(|ratio| RatioEntry {
                function: profile.descriptor(),
                ratio,
            })
        })
        .collect::<Result<_>>()?;
    let min_ratio = ratios.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);

    // Extremal sweep: tail exponent one unit inside the admissible floor.
    let windows = admissible_window(space, weights, exps, HardyKind::Direct)?;
    let tail_exponent = windows.s_inf.lo + 1.0;
    let f1 = RadialProfile::power(tail_exponent);
    let extremal: Vec<(f64, f64)> = opts
        .extremal_amplitudes
        .par_iter()
        .map(|&a| {
            let member =
                extremal_family_member(space, &weights.v, exps, opts.extremal_radius, a, &f1)?;
            let ratio = hardy_ratio(space, &member, weights, exps, &opts.quadrature)?;
            Ok((a, ratio))
        })
        .collect::<Result<_>>()?;
    diagnostics.push(WARN_EXTREMAL_DIRECTION.to_string());
    let extremal_min = extremal
        .iter()
        .map(|(_, r)| *r)
        .fold(f64::INFINITY, f64::min);

    let lower_ok = min_ratio >= c_lower * (1.0 - opts.ratio_tol);
    let upper_ok = extremal_min <= c_upper * (1.0 + opts.family_tol);
    let verdict = if !lower_ok {
        Verdict::Violated
    } else if upper_ok && !ratios.is_empty() {
        Verdict::Verified
    } else {
        diagnostics.push(format!(
            "extremal sweep did not confirm the upper bound: min extremal ratio {extremal_min} \
             vs c_upper {c_upper}"
        ));
        Verdict::Inconclusive
    };

    Ok(HardyReport {
        kind: HardyKind::Direct,
        exponents: *exps,
        weights: weights.clone(),
        d_profile: profile,
        d,
        c_lower,
        c_upper,
        ratios,
        min_ratio,
        margin: min_ratio - c_lower,
        extremal,
        extremal_min: Some(extremal_min),
        verdict,
        diagnostics,
    })
}

/// Conjugate-case batch verification: D2 gate plus family ratios.
pub fn verify_conjugate_hardy(
    space: &PolarSpace,
    weights: &WeightPair,
    exps: &ExponentPair,
    family: &[PiecewisePowerFunction],
    opts: &VerifyOptions,
) -> Result<HardyReport> {
    let profile = d2_profile(space, weights, exps, &opts.radii, &opts.quadrature)?;
    let mut diagnostics = Vec::new();
    let d = profile.infimum;
    let (c_lower, c_upper) = constant_bounds(exps, d);

    if profile.monotone_verdict != MonotoneVerdict::NonIncreasing {
        diagnostics.push(
            "D2 profile is not non-increasing; the characterisation does not apply and no \
             verdict is drawn"
                .to_string(),
        );
        return Ok(HardyReport {
            kind: HardyKind::Conjugate,
            exponents: *exps,
            weights: weights.clone(),
            d_profile: profile,
            d,
            c_lower,
            c_upper,
            ratios: Vec::new(),
            min_ratio: f64::NAN,
            margin: f64::NAN,
            extremal: Vec::new(),
            extremal_min: None,
            verdict: Verdict::Inconclusive,
            diagnostics,
        });
    }

    let ratios: Vec<RatioEntry> = family
        .par_iter()
        .map(|f| {
            let profile = f.profile();
            conjugate_hardy_ratio(space, &profile, weights, exps, &opts.quadrature).map(|ratio| {
                RatioEntry {
                    function: profile.descriptor(),
                    ratio,
                }
            })
        })
        .collect::<Result<_>>()?;
    let min_ratio = ratios.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    diagnostics.push(
        "conjugate verification checks the lower bound only; no extremal construction is run"
            .to_string(),
    );

    let verdict = if ratios.is_empty() {
        Verdict::Inconclusive
    } else if min_ratio >= c_lower * (1.0 - opts.ratio_tol) {
        Verdict::Verified
    } else {
        Verdict::Violated
    };

    Ok(HardyReport {
        kind: HardyKind::Conjugate,
        exponents: *exps,
        weights: weights.clone(),
        d_profile: profile,
        d,
        c_lower,
        c_upper,
        ratios,
        min_ratio,
        margin: min_ratio - c_lower,
        extremal: Vec::new(),
        extremal_min: None,
        verdict,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn line() -> PolarSpace {
        PolarSpace::euclidean(1).unwrap()
    }

    #[test]
    fn exponent_pair_conjugates() {
        let e = make_exponents(-1.0, -1.0).unwrap();
        assert_relative_eq!(e.p_conj, 0.5, max_relative = 1e-15);
        assert_relative_eq!(e.q_conj, 0.5, max_relative = 1e-15);
        let e = make_exponents(-1.0, -2.0).unwrap();
        assert_relative_eq!(e.p_conj, 0.5, max_relative = 1e-15);
        assert_relative_eq!(e.q_conj, 2.0 / 3.0, max_relative = 1e-15);
        assert!(make_exponents(-1.0, -0.5).is_err());
        assert!(make_exponents(0.5, -1.0).is_err());
    }

    #[test]
    fn constant_bounds_examples() {
        let e = make_exponents(-1.0, -1.0).unwrap();
        let (lo, hi) = constant_bounds(&e, 8.0);
        assert_relative_eq!(lo, 2.0, max_relative = 1e-12);
        assert_relative_eq!(hi, 8.0, max_relative = 1e-15);
        let e = make_exponents(-2.0, -2.0).unwrap();
        let factor = eq_factor(&e);
        assert_relative_eq!(
            factor,
            2f64.powf(-0.5) * (2.0 / 3.0f64).powf(1.5),
            max_relative = 1e-12
        );
    }

    proptest! {
        #[test]
        fn conjugate_identity_holds(p in -1e3..-1e-3f64) {
            let pc = conjugate(p);
            prop_assert!((1.0 / p + 1.0 / pc - 1.0).abs() <= 1e-15);
            prop_assert!(pc > 0.0 && pc < 1.0);
        }

        #[test]
        fn lower_factor_below_one(p in -40.0..-1e-3f64, shift in 0.0..40.0f64) {
            let e = make_exponents(p, p - shift).unwrap();
            prop_assert!(eq_factor(&e) <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn d1_profile_is_constant_eight_in_the_canonical_case() {
        let e = make_exponents(-1.0, -1.0).unwrap();
        let w = WeightPair::powers(0.0, -1.0);
        let prof = d1_profile(&line(), &w, &e, &[0.01, 0.1, 1.0, 10.0, 100.0], &cfg()).unwrap();
        for v in &prof.values {
            assert_relative_eq!(*v, 8.0, max_relative = 1e-7);
        }
        assert_eq!(prof.monotone_verdict, MonotoneVerdict::NonDecreasing);
        assert_relative_eq!(prof.infimum, 8.0, max_relative = 1e-7);
    }

    #[test]
    fn d1_profile_unbalanced_is_strictly_monotone() {
        let e = make_exponents(-1.0, -1.0).unwrap();
        let w = WeightPair::powers(0.0, 0.0);
        let radii = [0.5, 1.0, 2.0, 4.0];
        let prof = d1_profile(&line(), &w, &e, &radii, &cfg()).unwrap();
        for (t, v) in radii.iter().zip(&prof.values) {
            assert_relative_eq!(*v, 2.0 * t, max_relative = 1e-8);
        }
        assert_eq!(prof.monotone_verdict, MonotoneVerdict::NonDecreasing);
        assert!(prof.infimum_at_edge);
    }

    #[test]
    fn d2_profile_is_constant_eight_in_the_mirror_case() {
        let e = make_exponents(-1.0, -1.0).unwrap();
        let w = WeightPair::powers(-2.0, -3.0);
        let prof = d2_profile(&line(), &w, &e, &[0.01, 0.1, 1.0, 10.0, 100.0], &cfg()).unwrap();
        for v in &prof.values {
            assert_relative_eq!(*v, 8.0, max_relative = 1e-7);
        }
        assert_eq!(prof.monotone_verdict, MonotoneVerdict::NonIncreasing);
    }

    #[test]
    fn d2_profile_rejects_convergence_boundary() {
        let e = make_exponents(-1.0, -1.0).unwrap();
        let w = WeightPair::powers(-1.0, -3.0); // alpha + Q = 0
        let err = d2_profile(&line(), &w, &e, &[1.0], &cfg()).unwrap_err();
        assert!(matches!(err, Error::InadmissibleWeights(_)));
    }

    #[test]
    fn reverse_holder_rejects_vanishing_and_is_tight_on_constants() {
        let space = line();
        let f = RadialProfile::indicator(0.5);
        assert!(reverse_holder_check(&space, &f, &f, -1.0, &cfg()).is_err());
        // f = g = 1 on a shell of measure 1: both sides equal 1 exactly.
        let one = RadialProfile::constant(1.0);
        let check =
            reverse_holder_check_in(&space, &one, &one, -1.0, 0.0, 0.5, &cfg()).unwrap();
        assert_relative_eq!(check.lhs, 1.0, max_relative = 1e-10);
        assert_relative_eq!(check.rhs, 1.0, max_relative = 1e-10);
        assert!(check.holds);
    }

    #[test]
    fn reverse_holder_equality_case_is_tight() {
        // f^p = c g^{p'} pointwise forces equality.
        let space = line();
        let p = -1.5f64;
        let pc = conjugate(p);
        let g = PiecewisePowerFunction::new(0.2, -2.0, 1.3, 0.7)
            .unwrap()
            .profile();
        let c = 2.3f64;
        let f = g.powered(pc / p).unwrap().scaled(c.powf(1.0 / p));
        let check = reverse_holder_check(&space, &f, &g, p, &cfg()).unwrap();
        assert_relative_eq!(check.lhs, check.rhs, max_relative = 1e-8);
        assert!(check.holds);
    }

    #[test]
    fn hardy_lhs_refuses_logarithmic_outer_divergence() {
        // f = 1 on the line gives F(r) = 2r; with u the unit-ball indicator
        // and q = -1 the outer integrand is (2r)^{-1} near 0.
        let space = line();
        let f = RadialProfile::constant(1.0);
        let u = RadialProfile::indicator(1.0);
        let err = hardy_lhs(&space, &f, &u, -1.0, &cfg()).unwrap_err();
        assert!(matches!(
            err,
            Error::DivergentIntegral {
                endpoint: Endpoint::Zero,
                ..
            }
        ));
    }

    #[test]
    fn hardy_lhs_matches_closed_form_on_the_line() {
        // f = r^{-1/2} inside r <= 1 and r beyond; u = 1, q = -1.
        // F(r) = 4 sqrt(r) for r <= 1 and 3 + r^2 beyond, so
        // lhs = [ 2( \int_0^1 dr/(4 sqrt r) + \int_1^inf dr/(3 + r^2) ) ]^{-1}.
        let space = line();
        let f = PiecewisePowerFunction::new(-0.5, 1.0, 1.0, 1.0)
            .unwrap()
            .profile();
        let u = RadialProfile::constant(1.0);
        let got = hardy_lhs(&space, &f, &u, -1.0, &cfg()).unwrap();
        let tail = (std::f64::consts::PI / 2.0 - (1.0 / 3f64.sqrt()).atan()) / 3f64.sqrt();
        let exact = 1.0 / (2.0 * (0.5 + tail));
        assert_relative_eq!(got, exact, max_relative = 1e-7);
    }

    #[test]
    fn hardy_rhs_trivial_and_oracle_values() {
        let space = line();
        // f = 1, v = unit ball indicator, p = -1: (\int_0^1 2 dr)^{-1} = 0.5.
        let f = RadialProfile::constant(1.0);
        let v = RadialProfile::indicator(1.0);
        let got = hardy_rhs(&space, &f, &v, -1.0, &cfg()).unwrap();
        assert_relative_eq!(got, 0.5, max_relative = 1e-9);

        // Piecewise-power test function against v = |x|^{-1}:
        // \int f^{-1} r^{-1} 2 dr = 2( \int_0^1 r^{-1/2} + \int_1^inf r^{-2} ) = 6.
        let f = PiecewisePowerFunction::new(-0.5, 1.0, 1.0, 1.0)
            .unwrap()
            .profile();
        let v = RadialProfile::power(-1.0);
        let got = hardy_rhs(&space, &f, &v, -1.0, &cfg()).unwrap();
        assert_relative_eq!(got, 1.0 / 6.0, max_relative = 1e-8);
    }

    #[test]
    fn hardy_sides_are_degree_one_homogeneous() {
        let space = line();
        let f = PiecewisePowerFunction::new(-0.5, 1.0, 1.0, 1.0)
            .unwrap()
            .profile();
        let u = RadialProfile::constant(1.0);
        let v = RadialProfile::power(-1.0);
        let lhs = hardy_lhs(&space, &f, &u, -1.0, &cfg()).unwrap();
        let rhs = hardy_rhs(&space, &f, &v, -1.0, &cfg()).unwrap();
        for &c in &[0.1, 10.0] {
            let scaled = f.scaled(c);
            let l = hardy_lhs(&space, &scaled, &u, -1.0, &cfg()).unwrap();
            let r = hardy_rhs(&space, &scaled, &v, -1.0, &cfg()).unwrap();
            assert_relative_eq!(l, c * lhs, max_relative = 1e-12);
            assert_relative_eq!(r, c * rhs, max_relative = 1e-12);
        }
    }

    #[test]
    fn hardy_ratio_within_certified_bracket() {
        let space = line();
        let e = make_exponents(-1.0, -1.0).unwrap();
        let w = WeightPair::powers(0.0, -1.0);
        let f = PiecewisePowerFunction::new(-0.5, 1.0, 1.0, 1.0)
            .unwrap()
            .profile();
        let ratio = hardy_ratio(&space, &f, &w, &e, &cfg()).unwrap();
        assert!(ratio >= 2.0 * (1.0 - 1e-9), "ratio {ratio}");
        // Scale invariance of the ratio.
        let scaled = hardy_ratio(&space, &f.scaled(7.0), &w, &e, &cfg()).unwrap();
        assert_relative_eq!(ratio, scaled, max_relative = 1e-12);
    }

    #[test]
    fn extremal_family_profile_and_sweep() {
        let space = line();
        let e = make_exponents(-1.0, -1.0).unwrap();
        let v = RadialProfile::power(-1.0);
        // Inside the truncation radius the profile is v^{1-p'} = r^{-1/2}.
        let member =
            extremal_family_member(&space, &v, &e, 1.0, 10.0, &RadialProfile::power(1.0)).unwrap();
        assert_relative_eq!(member.eval(0.25), 0.25f64.powf(-0.5), max_relative = 1e-12);
        assert_relative_eq!(member.eval(2.0), 20.0, max_relative = 1e-12);

        // Amplitude sweep oracle: ratio(A) = (4 + 2/A) / (1 + 2 I_A) with
        // I_A = \int_1^inf dr / (4 + A(r^2 - 1)), A > 4.
        let w = WeightPair::powers(0.0, -1.0);
        let exact_ratio = |a: f64| {
            let k = ((a - 4.0) / a).sqrt();
            let i_a = ((1.0 + k) / (1.0 - k)).ln() / (2.0 * a * k);
            (4.0 + 2.0 / a) / (1.0 + 2.0 * i_a)
        };
        for &a in &[10.0, 100.0, 1000.0] {
            let member =
                extremal_family_member(&space, &v, &e, 1.0, a, &RadialProfile::power(1.0))
                    .unwrap();
            let ratio = hardy_ratio(&space, &member, &w, &e, &cfg()).unwrap();
            assert_relative_eq!(ratio, exact_ratio(a), max_relative = 1e-6);
            // The sweep approaches its limit 4 from below, far beneath the
            // upper constant 8.
            assert!(ratio <= 8.0 * (1.0 + 1e-2));
            assert!(ratio <= 4.0 + 1e-6);
        }
        // Small amplitudes overshoot the large-amplitude limit.
        let small =
            extremal_family_member(&space, &v, &e, 1.0, 1e-3, &RadialProfile::power(1.0)).unwrap();
        let small_ratio = hardy_ratio(&space, &small, &w, &e, &cfg()).unwrap();
        assert!(small_ratio > 4.0, "small-amplitude ratio {small_ratio}");
    }

    #[test]
    fn extremal_family_rejects_non_integrable_tail() {
        let space = line();
        let e = make_exponents(-1.0, -1.0).unwrap();
        let v = RadialProfile::power(-1.0);
        // p s_inf + beta + Q = -s - 1 + 1 >= 0 for s <= 0.
        let err = extremal_family_member(&space, &v, &e, 1.0, 10.0, &RadialProfile::power(-0.5));
        assert!(matches!(err, Err(Error::InadmissibleTail(_))));
    }

    #[test]
    fn proof_identity_on_power_weights() {
        let space = line();
        let e = make_exponents(-1.0, -1.0).unwrap();
        // v = |x|^{-1}: W(t) = 4 sqrt t, H1(t) = 8t = p' h(t)^p.
        let v = RadialProfile::power(-1.0);
        let t_grid: Vec<f64> = (0..10).map(|i| 10f64.powf(-2.0 + 0.4 * i as f64)).collect();
        let report = proof_identity_check(&space, &v, &e, &t_grid, &cfg()).unwrap();
        assert!(report.holds, "max deviation {}", report.max_rel_deviation);
        for pt in &report.points {
            assert_relative_eq!(pt.h1, 8.0 * pt.t, max_relative = 1e-6);
        }

        // v = 1: closed form H1(t) = p' (2t)^{1/p'}.
        let v = RadialProfile::constant(1.0);
        let report = proof_identity_check(&space, &v, &e, &[0.5, 1.0, 3.0], &cfg()).unwrap();
        for pt in &report.points {
            assert_relative_eq!(pt.h1, 0.5 * (2.0 * pt.t).powf(2.0), max_relative = 1e-6);
        }
    }

    #[test]
    fn admissible_window_canonical_cases() {
        let space = line();
        let e = make_exponents(-1.0, -1.0).unwrap();
        let w = WeightPair::powers(0.0, -1.0);
        let win = admissible_window(&space, &w, &e, HardyKind::Direct).unwrap();
        assert_relative_eq!(win.s0.lo, -1.0, max_relative = 1e-12);
        assert!(win.s0.hi.abs() < 1e-12);
        assert!(win.s_inf.lo.abs() < 1e-12);
        assert!(win.s_inf.hi.is_infinite());

        let w = WeightPair::powers(-2.0, -3.0);
        let win = admissible_window(&space, &w, &e, HardyKind::Conjugate).unwrap();
        assert!(win.s0.lo.is_infinite());
        assert_relative_eq!(win.s0.hi, -2.0, max_relative = 1e-12);
        assert_relative_eq!(win.s_inf.lo, -2.0, max_relative = 1e-12);
        assert_relative_eq!(win.s_inf.hi, -1.0, max_relative = 1e-12);
    }

    #[test]
    fn conjugate_ratio_respects_lower_bound() {
        let space = line();
        let e = make_exponents(-1.0, -1.0).unwrap();
        let w = WeightPair::powers(-2.0, -3.0);
        let f = PiecewisePowerFunction::new(-3.0, -1.5, 1.0, 1.0)
            .unwrap()
            .profile();
        let ratio = conjugate_hardy_ratio(&space, &f, &w, &e, &cfg()).unwrap();
        assert!(ratio >= 2.0 * (1.0 - 1e-9), "ratio {ratio}");
        let again = conjugate_hardy_ratio(&space, &f.scaled(0.3), &w, &e, &cfg()).unwrap();
        assert_relative_eq!(ratio, again, max_relative = 1e-12);
    }

    #[test]
    fn verify_hardy_canonical_run_is_verified() {
        let space = line();
        let e = make_exponents(-1.0, -1.0).unwrap();
        let w = WeightPair::powers(0.0, -1.0);
        let windows = admissible_window(&space, &w, &e, HardyKind::Direct).unwrap();
        let family = generate_family(
            &windows,
            &FamilySpec {
                count: 12,
                seed: 7,
                breakpoint_range: (0.1, 10.0),
            },
        );
        let opts = VerifyOptions::default();
        let report = verify_hardy(&space, &w, &e, &family, &opts).unwrap();
        assert_eq!(report.verdict, Verdict::Verified);
        assert!(report.margin >= 0.0);
        assert_relative_eq!(report.d, 8.0, max_relative = 1e-6);
        assert!(report
            .diagnostics
            .iter()
            .any(|d| d == WARN_EXTREMAL_DIRECTION));
    }

    #[test]
    fn verify_hardy_gates_on_monotonicity() {
        // A u-weight with a steep interior bump makes D1 dip on (1, 2) and
        // climb back afterwards: neither monotone class, so the hypothesis
        // gate reports inconclusive instead of extrapolating.
        use crate::radial::PowerSegment;
        let space = line();
        let e = make_exponents(-1.0, -1.0).unwrap();
        let u = RadialProfile::new(vec![
            PowerSegment {
                start: 0.0,
                coeff: 1.0,
                exponent: 0.0,
            },
            PowerSegment {
                start: 1.0,
                coeff: 1.0,
                exponent: 6.0,
            },
            PowerSegment {
                start: 2.0,
                coeff: 1.0,
                exponent: 0.0,
            },
        ])
        .unwrap();
        let w = WeightPair {
            u,
            v: RadialProfile::power(-1.0),
        };
        let report = verify_hardy(&space, &w, &e, &[], &VerifyOptions::default()).unwrap();
        assert_eq!(report.verdict, Verdict::Inconclusive);
        assert_eq!(report.d_profile.monotone_verdict, MonotoneVerdict::Neither);
    }
}
