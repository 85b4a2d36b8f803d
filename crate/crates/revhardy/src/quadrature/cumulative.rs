//! Cached cumulative integrals for nested Hardy integrands.
//!
//! The outer integral of a Hardy ratio queries the inner ball integral
//! F(r) = sphere * \int_0^r g(s) density(s) ds at thousands of radii. The
//! cache stores exact partial integrals on a logarithmic grid and answers a
//! query by integrating only the short remainder from the nearest cached
//! breakpoint, so every value carries full quadrature accuracy while the
//! expensive prefix work is shared. The scheme is monotone by construction
//! for non-negative integrands, and a breakpoint query returns the stored
//! value exactly.

use std::sync::Mutex;

use crate::error::{Endpoint, Error};
use crate::quadrature::{integrate, EndpointHint, QuadratureConfig, SingularityHints};
use crate::radial::{RadialProfile, TailBehavior};
use crate::spaces::PolarSpace;
use crate::Result;

enum Direction {
    /// F(r) = integral over (0, r).
    FromZero,
    /// T(r) = integral over (r, upper) with upper possibly infinite.
    FromInfinity { upper: f64 },
}

pub struct CumulativeIntegral<'a> {
    integrand: Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>,
    hint_at_zero: EndpointHint,
    hint_at_infinity: EndpointHint,
    direction: Direction,
    cfg: QuadratureConfig,
    /// (radius, cumulative value) pairs, radius strictly increasing.
    cells: Mutex<Vec<(f64, f64)>>,
}

impl<'a> CumulativeIntegral<'a> {
    /// Cumulative integral from the origin. Refuses integrands whose declared
    /// power behaviour at 0 is not locally integrable.
    pub fn from_zero(
        integrand: impl Fn(f64) -> f64 + Send + Sync + 'a,
        hint_at_zero: EndpointHint,
        grid: Vec<f64>,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        if let EndpointHint::Power(e) = hint_at_zero {
            if e <= -1.0 + 1e-12 {
                return Err(Error::divergent(
                    Endpoint::Zero,
                    format!("cumulative integrand exponent {e} <= -1 at the origin"),
                ));
            }
        }
        let cfg = cell_config(cfg);
        let this = CumulativeIntegral {
            integrand: Box::new(integrand),
            hint_at_zero,
            hint_at_infinity: EndpointHint::Unknown,
            direction: Direction::FromZero,
            cfg,
            cells: Mutex::new(Vec::new()),
        };
        this.build(grid)?;
        Ok(this)
    }

    /// Cumulative integral from the far end: T(r) = integral over (r, upper).
    /// When `upper` is infinite a decaying power tail hint is required.
    pub fn from_infinity(
        integrand: impl Fn(f64) -> f64 + Send + Sync + 'a,
        hint_at_infinity: EndpointHint,
        upper: f64,
        grid: Vec<f64>,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        if upper.is_infinite() {
            match hint_at_infinity {
                EndpointHint::Power(e) if e < -1.0 - 1e-12 => {}
                EndpointHint::Power(e) => {
                    return Err(Error::divergent(
                        Endpoint::Infinity,
                        format!("cumulative tail exponent {e} >= -1"),
                    ));
                }
                EndpointHint::Unknown => {
                    return Err(Error::InvalidParams(
                        "tail cumulative over an infinite range needs a decay exponent".into(),
                    ));
                }
            }
        }
        let cfg = cell_config(cfg);
        let this = CumulativeIntegral {
            integrand: Box::new(integrand),
            hint_at_zero: EndpointHint::Unknown,
            hint_at_infinity,
            direction: Direction::FromInfinity { upper },
            cfg,
            cells: Mutex::new(Vec::new()),
        };
        this.build(grid)?;
        Ok(this)
    }

    fn build(&self, mut grid: Vec<f64>) -> Result<()> {
        grid.retain(|r| r.is_finite() && *r > 0.0);
        grid.sort_by(|a, b| a.total_cmp(b));
        grid.dedup();
        if grid.is_empty() {
            grid.push(1.0);
        }
        if let Direction::FromInfinity { upper } = self.direction {
            grid.retain(|r| *r < upper);
            if grid.is_empty() {
                grid.push(if upper.is_finite() { upper * 0.5 } else { 1.0 });
            }
        }

        let mut cells = Vec::with_capacity(grid.len());
        match self.direction {
            Direction::FromZero => {
                let mut acc = self.piece(0.0, grid[0])?;
                cells.push((grid[0], acc));
                for w in grid.windows(2) {
                    acc += self.piece(w[0], w[1])?;
                    cells.push((w[1], acc));
                }
            }
            Direction::FromInfinity { upper } => {
                let last = *grid.last().expect("non-empty grid");
                let mut acc = self.piece(last, upper)?;
                cells.push((last, acc));
                for w in grid.windows(2).rev() {
                    acc += self.piece(w[0], w[1])?;
                    cells.push((w[0], acc));
                }
                cells.reverse();
            }
        }
        *self.cells.lock().unwrap() = cells;
        Ok(())
    }

    fn piece(&self, lo: f64, hi: f64) -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        integrate(
            &self.integrand,
            lo,
            hi,
            SingularityHints {
                at_zero: self.hint_at_zero,
                at_infinity: self.hint_at_infinity,
            },
            &[],
            &self.cfg,
        )
    }

    /// Cumulative value at any radius > 0.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidParams(format!(
                "cumulative query at invalid radius {r}"
            )));
        }
        match self.direction {
            Direction::FromZero => self.eval_from_zero(r),
            Direction::FromInfinity { upper } => self.eval_from_infinity(r, upper),
        }
    }

    fn eval_from_zero(&self, r: f64) -> Result<f64> {
        {
            let mut cells = self.cells.lock().unwrap();
            // Extend the cached grid geometrically past large queries.
            while r > cells.last().expect("non-empty").0 {
                let (last_r, last_v) = *cells.last().unwrap();
                let next_r = last_r * 4.0;
                let inc = self.piece(last_r, next_r)?;
                cells.push((next_r, last_v + inc));
            }
        }
        let cells = self.cells.lock().unwrap();
        if r < cells[0].0 {
            return self.piece(0.0, r);
        }
        let idx = cells.partition_point(|(b, _)| *b <= r) - 1;
        let (base_r, base_v) = cells[idx];
        if r == base_r {
            return Ok(base_v);
        }
        Ok(base_v + self.piece(base_r, r)?)
    }

    fn eval_from_infinity(&self, r: f64, upper: f64) -> Result<f64> {
        if r >= upper {
            return Ok(0.0);
        }
        {
            let mut cells = self.cells.lock().unwrap();
            // Extend the cached grid toward the origin for small queries.
            while r < cells[0].0 {
                let (first_r, first_v) = cells[0];
                let prev_r = first_r * 0.25;
                let inc = self.piece(prev_r, first_r)?;
                cells.insert(0, (prev_r, first_v + inc));
            }
        }
        let cells = self.cells.lock().unwrap();
        let last = *cells.last().expect("non-empty");
        if r > last.0 {
            return self.piece(r, upper);
        }
        let idx = cells.partition_point(|(b, _)| *b < r);
        let (base_r, base_v) = cells[idx];
        if r == base_r {
            return Ok(base_v);
        }
        Ok(base_v + self.piece(r, base_r)?)
    }
}

fn cell_config(cfg: &QuadratureConfig) -> QuadratureConfig {
    QuadratureConfig {
        rel_tol: cfg.rel_tol * 0.1,
        abs_tol: f64::MIN_POSITIVE,
        max_subdivisions: cfg.max_subdivisions,
        infinity_transform: cfg.infinity_transform,
    }
}

/// Default logarithmic grid for cumulative caches, merged with the
/// integrand's own breakpoints.
pub fn default_grid(breakpoints: &[f64]) -> Vec<f64> {
    let mut grid: Vec<f64> = (-24..=24).map(|k| 2f64.powi(k)).collect();
    grid.extend_from_slice(breakpoints);
    grid
}

/// Cumulative ball integral of a radial profile over a polar space:
/// F(r) = sphere_area * \int_0^r g(s) density(s) ds.
pub fn cumulative<'a>(
    space: &'a PolarSpace,
    g: &'a RadialProfile,
    cfg: &QuadratureConfig,
) -> Result<CumulativeIntegral<'a>> {
    let sphere = space.sphere_area;
    let grid = default_grid(&g.breakpoints());
    if let Some(combined) = space.fold_density(g) {
        let hint = match combined.behavior_at_zero() {
            TailBehavior::Power(e) => EndpointHint::Power(e),
            TailBehavior::Vanishes => EndpointHint::Power(0.0),
        };
        return CumulativeIntegral::from_zero(
            move |r| sphere * combined.eval(r),
            hint,
            grid,
            cfg,
        );
    }
    let hint = match g.behavior_at_zero() {
        TailBehavior::Power(e) => EndpointHint::Power(e + space.density_exponent_at_zero()),
        TailBehavior::Vanishes => EndpointHint::Power(0.0),
    };
    CumulativeIntegral::from_zero(
        move |r| sphere * g.eval(r) * space.density(r),
        hint,
        default_grid(&g.breakpoints()),
        cfg,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::PolarSpace;
    use approx::assert_relative_eq;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn constant_density_line_gives_linear_cumulative() {
        // Euclidean n = 1: F(r) = 2r for g = 1.
        let space = PolarSpace::euclidean(1).unwrap();
        let g = RadialProfile::constant(1.0);
        let f = cumulative(&space, &g, &cfg()).unwrap();
        for &r in &[1e-4, 0.3, 1.0, 7.0, 1e5] {
            assert_relative_eq!(f.eval(r).unwrap(), 2.0 * r, max_relative = 1e-9);
        }
    }

    #[test]
    fn power_cumulative_matches_antiderivative() {
        // Q = 4 homogeneous density, g = r^s: F(r) = S r^{s+Q}/(s+Q).
        let space = PolarSpace::homogeneous_radial("q4", 4.0, 6.0).unwrap();
        let s = -1.5;
        let g = RadialProfile::power(s);
        let f = cumulative(&space, &g, &cfg()).unwrap();
        for &r in &[0.01f64, 0.5, 2.0, 40.0] {
            let exact = 6.0 * r.powf(s + 4.0) / (s + 4.0);
            assert_relative_eq!(f.eval(r).unwrap(), exact, max_relative = 1e-8);
        }
    }

    #[test]
    fn compactly_supported_integrand_saturates() {
        let space = PolarSpace::euclidean(1).unwrap();
        let g = RadialProfile::indicator(1.0);
        let f = cumulative(&space, &g, &cfg()).unwrap();
        let total = f.eval(1.0).unwrap();
        assert_relative_eq!(total, 2.0, max_relative = 1e-9);
        for &r in &[1.5, 10.0, 1e4] {
            assert_relative_eq!(f.eval(r).unwrap(), total, max_relative = 1e-12);
        }
    }

    #[test]
    fn breakpoint_queries_return_stored_values_exactly() {
        let space = PolarSpace::euclidean(2).unwrap();
        let g = RadialProfile::power(-0.5);
        let f = cumulative(&space, &g, &cfg()).unwrap();
        let probe = 2f64.powi(3);
        let first = f.eval(probe).unwrap();
        let second = f.eval(probe).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn tail_cumulative_matches_antiderivative() {
        // T(r) = \int_r^inf s^{-2} ds = 1/r.
        let t = CumulativeIntegral::from_infinity(
            |s: f64| s.powf(-2.0),
            EndpointHint::Power(-2.0),
            f64::INFINITY,
            super::default_grid(&[]),
            &cfg(),
        )
        .unwrap();
        for &r in &[1e-6, 0.02, 1.0, 19.0, 1e5] {
            assert_relative_eq!(t.eval(r).unwrap(), 1.0 / r, max_relative = 1e-8);
        }
    }

    #[test]
    fn cumulative_matches_fresh_truncated_integrals() {
        // F(r) agrees with a fresh truncated integration within
        // 10 * rel_tol at log-spaced radii.
        use crate::quadrature::{integrate, EndpointHint, SingularityHints};
        let space = PolarSpace::euclidean(2).unwrap();
        let g = RadialProfile::power(-0.7);
        let conf = cfg();
        let f = cumulative(&space, &g, &conf).unwrap();
        for i in 0..20 {
            let r = 10f64.powf(-3.0 + 6.0 * i as f64 / 19.0);
            let cached = f.eval(r).unwrap();
            let fresh = integrate(
                |s| 2.0 * std::f64::consts::PI * s.powf(-0.7) * s,
                0.0,
                r,
                SingularityHints {
                    at_zero: EndpointHint::Power(0.3),
                    at_infinity: EndpointHint::Unknown,
                },
                &[],
                &conf,
            )
            .unwrap();
            assert!(
                (cached - fresh).abs() <= 10.0 * conf.rel_tol * fresh.abs(),
                "r = {r}: cached {cached} vs fresh {fresh}"
            );
        }
    }

    #[test]
    fn non_integrable_origin_is_refused_at_construction() {
        let space = PolarSpace::euclidean(1).unwrap();
        let g = RadialProfile::power(-1.0);
        assert!(cumulative(&space, &g, &cfg()).is_err());
    }

    #[test]
    fn divergent_tail_cumulative_is_refused() {
        let res = CumulativeIntegral::from_infinity(
            |s: f64| s.powf(-0.5),
            EndpointHint::Power(-0.5),
            f64::INFINITY,
            vec![1.0],
            &cfg(),
        );
        assert!(res.is_err());
    }
}
