//! Piecewise-power radial functions.
//!
//! Everything the inequality engine integrates — test functions, weights,
//! extremal constructions — is a finite union of power laws `c * r^e` on
//! consecutive radial intervals. Keeping that structure explicit lets every
//! consumer read off exact endpoint exponents and breakpoints, so divergence
//! is decided analytically before any quadrature runs.

use serde::{Deserialize, Serialize};

use crate::error::{Endpoint, Error};
use crate::Result;

/// One power-law piece `coeff * r^exponent`, valid from `start` until the
/// next segment begins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSegment {
    pub start: f64,
    pub coeff: f64,
    pub exponent: f64,
}

/// Behaviour of a radial function at an endpoint of (0, inf).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailBehavior {
    /// Proportional to `r^e` with the given exponent.
    Power(f64),
    /// Identically zero on a neighbourhood of the endpoint.
    Vanishes,
}

impl TailBehavior {
    pub fn exponent(&self) -> Option<f64> {
        match self {
            TailBehavior::Power(e) => Some(*e),
            TailBehavior::Vanishes => None,
        }
    }
}

/// A non-negative radial function given by finitely many power-law segments.
///
/// The first segment always starts at 0. Segments may have zero coefficient,
/// which is how indicator-style weights are expressed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    segments: Vec<PowerSegment>,
}

impl RadialProfile {
    /// Build from raw segments. Starts must begin at 0 and strictly increase;
    /// coefficients must be non-negative and finite.
    pub fn new(segments: Vec<PowerSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidParams("profile needs a segment".into()));
        }
        if segments[0].start != 0.0 {
            return Err(Error::InvalidParams(
                "first profile segment must start at r = 0".into(),
            ));
        }
        for w in segments.windows(2) {
            if !(w[1].start > w[0].start) {
                return Err(Error::InvalidParams(
                    "profile segment starts must strictly increase".into(),
                ));
            }
        }
        for s in &segments {
            if !(s.coeff >= 0.0) || !s.coeff.is_finite() || !s.exponent.is_finite() {
                return Err(Error::InvalidParams(
                    "profile coefficients must be finite and non-negative".into(),
                ));
            }
        }
        Ok(RadialProfile { segments })
    }

    /// The constant weight `c`.
    pub fn constant(c: f64) -> Self {
        RadialProfile {
            segments: vec![PowerSegment {
                start: 0.0,
                coeff: c,
                exponent: 0.0,
            }],
        }
    }

    /// The pure power `r^gamma`.
    pub fn power(gamma: f64) -> Self {
        RadialProfile {
            segments: vec![PowerSegment {
                start: 0.0,
                coeff: 1.0,
                exponent: gamma,
            }],
        }
    }

    /// Indicator of the ball of the given radius (1 inside, 0 outside).
    pub fn indicator(radius: f64) -> Self {
        RadialProfile {
            segments: vec![
                PowerSegment {
                    start: 0.0,
                    coeff: 1.0,
                    exponent: 0.0,
                },
                PowerSegment {
                    start: radius,
                    coeff: 0.0,
                    exponent: 0.0,
                },
            ],
        }
    }

    pub fn segments(&self) -> &[PowerSegment] {
        &self.segments
    }

    pub fn eval(&self, r: f64) -> f64 {
        let seg = self.segment_at(r);
        if seg.coeff == 0.0 {
            return 0.0;
        }
        seg.coeff * r.powf(seg.exponent)
    }

    fn segment_at(&self, r: f64) -> &PowerSegment {
        let mut current = &self.segments[0];
        for seg in &self.segments[1..] {
            if r >= seg.start {
                current = seg;
            } else {
                break;
            }
        }
        current
    }

    /// Interior radii where the power law changes.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.segments.iter().skip(1).map(|s| s.start).collect()
    }

    pub fn behavior_at_zero(&self) -> TailBehavior {
        let s = &self.segments[0];
        if s.coeff == 0.0 {
            TailBehavior::Vanishes
        } else {
            TailBehavior::Power(s.exponent)
        }
    }

    pub fn behavior_at_infinity(&self) -> TailBehavior {
        let s = self.segments.last().expect("non-empty");
        if s.coeff == 0.0 {
            TailBehavior::Vanishes
        } else {
            TailBehavior::Power(s.exponent)
        }
    }

    /// True when the function is strictly positive on all of (0, inf).
    pub fn strictly_positive(&self) -> bool {
        self.segments.iter().all(|s| s.coeff > 0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        RadialProfile {
            segments: self
                .segments
                .iter()
                .map(|s| PowerSegment {
                    start: s.start,
                    coeff: c * s.coeff,
                    exponent: s.exponent,
                })
                .collect(),
        }
    }

    /// Pointwise power. Rejects negative powers of a function that vanishes
    /// on a set of positive measure, since the result would be infinite there.
    pub fn powered(&self, e: f64) -> Result<Self> {
        let mut segments = Vec::with_capacity(self.segments.len());
        for s in &self.segments {
            let coeff = if s.coeff == 0.0 {
                if e <= 0.0 {
                    return Err(Error::divergent(
                        Endpoint::Interior,
                        format!(
                            "power {e} of a function vanishing on [{}, ...) is not integrable",
                            s.start
                        ),
                    ));
                }
                0.0
            } else {
                s.coeff.powf(e)
            };
            segments.push(PowerSegment {
                start: s.start,
                coeff,
                exponent: s.exponent * e,
            });
        }
        Ok(RadialProfile { segments })
    }

    /// Pointwise product, exact on the merged breakpoint grid.
    pub fn multiplied(&self, other: &RadialProfile) -> Self {
        let mut starts: Vec<f64> = self
            .segments
            .iter()
            .chain(other.segments.iter())
            .map(|s| s.start)
            .collect();
        starts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        starts.dedup();
        let segments = starts
            .into_iter()
            .map(|start| {
                let probe = if start == 0.0 { 0.0 } else { start };
                let a = self.segment_at(probe);
                let b = other.segment_at(probe);
                PowerSegment {
                    start,
                    coeff: a.coeff * b.coeff,
                    exponent: a.exponent + b.exponent,
                }
            })
            .collect();
        RadialProfile { segments }
    }

    /// Compact descriptor for reports: `(start, coeff, exponent)` triples.
    pub fn descriptor(&self) -> Vec<(f64, f64, f64)> {
        self.segments
            .iter()
            .map(|s| (s.start, s.coeff, s.exponent))
            .collect()
    }
}

/// Strictly positive two-branch power function: `scale * r^{s0}` up to the
/// breakpoint radius, crossing over continuously to exponent `s_inf` beyond.
///
/// This is the admissible test family for the Hardy ratio checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePowerFunction {
    pub s0: f64,
    pub s_inf: f64,
    pub breakpoint: f64,
    pub scale: f64,
}

impl PiecewisePowerFunction {
    pub fn new(s0: f64, s_inf: f64, breakpoint: f64, scale: f64) -> Result<Self> {
        if !(breakpoint > 0.0) || !breakpoint.is_finite() {
            return Err(Error::InvalidParams(
                "breakpoint radius must be positive and finite".into(),
            ));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidParams("scale must be positive".into()));
        }
        if !s0.is_finite() || !s_inf.is_finite() {
            return Err(Error::InvalidParams("exponents must be finite".into()));
        }
        Ok(PiecewisePowerFunction {
            s0,
            s_inf,
            breakpoint,
            scale,
        })
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r <= self.breakpoint {
            self.scale * r.powf(self.s0)
        } else {
            self.scale * self.breakpoint.powf(self.s0 - self.s_inf) * r.powf(self.s_inf)
        }
    }

    pub fn profile(&self) -> RadialProfile {
        RadialProfile {
            segments: vec![
                PowerSegment {
                    start: 0.0,
                    coeff: self.scale,
                    exponent: self.s0,
                },
                PowerSegment {
                    start: self.breakpoint,
                    coeff: self.scale * self.breakpoint.powf(self.s0 - self.s_inf),
                    exponent: self.s_inf,
                },
            ],
        }
    }
}

/// Weight pair (u, v) of the weighted inequality. Power weights are
/// single-segment profiles; indicators and piecewise powers are also valid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightPair {
    pub u: RadialProfile,
    pub v: RadialProfile,
}

impl WeightPair {
    /// Radial power weights `u = r^alpha`, `v = r^beta`.
    pub fn powers(alpha: f64, beta: f64) -> Self {
        WeightPair {
            u: RadialProfile::power(alpha),
            v: RadialProfile::power(beta),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn piecewise_power_is_continuous_at_breakpoint() {
        let f = PiecewisePowerFunction::new(-0.5, 1.0, 2.0, 3.0).unwrap();
        let below = f.eval(2.0 - 1e-12);
        let above = f.eval(2.0 + 1e-12);
        assert_relative_eq!(below, above, max_relative = 1e-9);
        assert_relative_eq!(f.eval(2.0), 3.0 * 2.0f64.powf(-0.5), max_relative = 1e-14);
    }

    #[test]
    fn profile_matches_direct_evaluation() {
        let f = PiecewisePowerFunction::new(-0.5, 1.0, 2.0, 3.0).unwrap();
        let p = f.profile();
        for &r in &[0.01, 0.5, 1.9999, 2.0, 2.0001, 17.0] {
            assert_relative_eq!(p.eval(r), f.eval(r), max_relative = 1e-13);
        }
    }

    #[test]
    fn indicator_is_zero_outside() {
        let ind = RadialProfile::indicator(1.0);
        assert_eq!(ind.eval(0.5), 1.0);
        assert_eq!(ind.eval(1.0), 0.0);
        assert_eq!(ind.eval(3.0), 0.0);
        assert_eq!(ind.behavior_at_infinity(), TailBehavior::Vanishes);
    }

    #[test]
    fn negative_power_of_vanishing_profile_is_rejected() {
        let ind = RadialProfile::indicator(1.0);
        assert!(ind.powered(-1.0).is_err());
        assert!(ind.powered(0.5).is_ok());
    }

    proptest! {
        #[test]
        fn product_and_power_agree_pointwise(
            s0 in -2.0..2.0f64,
            s1 in -2.0..2.0f64,
            bp in 0.1..10.0f64,
            scale in 0.1..10.0f64,
            e in -3.0..3.0f64,
            r in 1e-3..1e3f64,
        ) {
            let f = PiecewisePowerFunction::new(s0, s1, bp, scale).unwrap().profile();
            let g = RadialProfile::power(-0.25);
            let prod = f.multiplied(&g);
            prop_assert!((prod.eval(r) - f.eval(r) * g.eval(r)).abs()
                <= 1e-12 * prod.eval(r).abs().max(1e-300));
            let powed = f.powered(e).unwrap();
            let direct = f.eval(r).powf(e);
            prop_assert!((powed.eval(r) - direct).abs() <= 1e-9 * direct.abs().max(1e-300));
        }
    }
}
