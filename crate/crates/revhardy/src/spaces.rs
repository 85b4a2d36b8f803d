//! Metric measure spaces with a polar decomposition, and homogeneous Lie
//! groups carrying dilations, a group law and a quasi-norm.
//!
//! Every space used by the inequality engine integrates radial functions as
//! `sphere_area * \int g(r) density(r) dr`. Euclidean space has density
//! `r^{n-1}`, a homogeneous group of homogeneous dimension Q has `r^{Q-1}`,
//! and hyperbolic space has `sinh(r)^{n-1}` (exposed radially only).
//!
//! The sphere measure is normalised through the unit-ball identity
//! `sphere_area = Q * vol(B(0,1))`, which makes the polar formula and the
//! power-weight closed forms self-consistent. Group ball volumes come from
//! coordinate-space quadrature (with the last coordinate resolved by
//! bisection against the quasi-norm) and, independently, from Monte Carlo.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

use crate::error::{Endpoint, Error};
use crate::quadrature::{
    integrate, EndpointHint, QuadratureConfig, SingularityHints,
};
use crate::radial::{RadialProfile, TailBehavior};
use crate::Result;

/// A point in group coordinates (at most three of them here).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    coords: [f64; 3],
    dim: usize,
}

impl Point {
    pub fn new(coords: &[f64]) -> Self {
        assert!(coords.len() <= 3, "points carry at most 3 coordinates");
        let mut buf = [0.0; 3];
        buf[..coords.len()].copy_from_slice(coords);
        Point {
            coords: buf,
            dim: coords.len(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Point::new(&vec![0.0; dim])
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|c| c.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum GroupLaw {
    Abelian,
    Heisenberg1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum QuasiNormKind {
    Euclidean,
    Koranyi,
}

/// A homogeneous Lie group on R^n with dilations, group law and quasi-norm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HomogeneousGroup {
    pub name: String,
    pub coords_dim: usize,
    pub dilation_weights: Vec<f64>,
    /// Homogeneous dimension, the sum of the dilation weights.
    pub homogeneous_dim: f64,
    law: GroupLaw,
    norm: QuasiNormKind,
    /// Per-coordinate bound of the unit quasi-ball: `|x_i| <= unit_box[i]`
    /// whenever `|x| <= 1`.
    unit_box: Vec<f64>,
    /// Published quasi-triangle constant: `|xy| <= C (|x| + |y|)`.
    /// Exact (1.0) for the Euclidean norm, estimated empirically otherwise.
    pub triangle_constant: f64,
}

impl HomogeneousGroup {
    /// The abelian group (R^n, +) with the Euclidean norm, n <= 3.
    pub fn abelian(n: usize) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::UnsupportedSpace(format!(
                "abelian group shipped for n in 1..=3, got {n}"
            )));
        }
        Ok(HomogeneousGroup {
            name: format!("euclidean:{n}"),
            coords_dim: n,
            dilation_weights: vec![1.0; n],
            homogeneous_dim: n as f64,
            law: GroupLaw::Abelian,
            norm: QuasiNormKind::Euclidean,
            unit_box: vec![1.0; n],
            triangle_constant: 1.0,
        })
    }

    /// The first Heisenberg group with coordinates (a, b, c), group law
    /// `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+(ab'-ba')/2)`, dilations
    /// `(s a, s b, s^2 c)` and the Koranyi norm
    /// `((a^2+b^2)^2 + 16 c^2)^{1/4}`. Homogeneous dimension Q = 4.
    pub fn heisenberg1() -> Self {
        let mut g = HomogeneousGroup {
            name: "heisenberg:1".into(),
            coords_dim: 3,
            dilation_weights: vec![1.0, 1.0, 2.0],
            homogeneous_dim: 4.0,
            law: GroupLaw::Heisenberg1,
            norm: QuasiNormKind::Koranyi,
            // |a|,|b| <= |x| and 16 c^2 <= |x|^4 force |c| <= 1/4 on the unit ball.
            unit_box: vec![1.0, 1.0, 0.25],
            triangle_constant: 1.0,
        };
        g.triangle_constant = *h1_triangle_constant(&g);
        g
    }

    pub fn product(&self, x: &Point, y: &Point) -> Point {
        let (a, b) = (x.coords(), y.coords());
        match self.law {
            GroupLaw::Abelian => {
                let sums: Vec<f64> = a.iter().zip(b).map(|(p, q)| p + q).collect();
                Point::new(&sums)
            }
            GroupLaw::Heisenberg1 => Point::new(&[
                a[0] + b[0],
                a[1] + b[1],
                a[2] + b[2] + 0.5 * (a[0] * b[1] - a[1] * b[0]),
            ]),
        }
    }

    pub fn inverse(&self, x: &Point) -> Point {
        let neg: Vec<f64> = x.coords().iter().map(|c| -c).collect();
        Point::new(&neg)
    }

    pub fn dilate(&self, s: f64, x: &Point) -> Point {
        let scaled: Vec<f64> = x
            .coords()
            .iter()
            .zip(&self.dilation_weights)
            .map(|(c, nu)| c * s.powf(*nu))
            .collect();
        Point::new(&scaled)
    }

    pub fn quasi_norm(&self, x: &Point) -> f64 {
        // Evaluated in dilation-scaled coordinates so radii far outside
        // [1e-150, 1e150] do not underflow through the intermediate powers.
        let c = x.coords();
        match self.norm {
            QuasiNormKind::Euclidean => {
                let m = c.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
                if m == 0.0 || !m.is_finite() {
                    return m;
                }
                m * c.iter().map(|v| (v / m) * (v / m)).sum::<f64>().sqrt()
            }
            QuasiNormKind::Koranyi => {
                let m = c[0].abs().max(c[1].abs()).max(c[2].abs().sqrt());
                if m == 0.0 || !m.is_finite() {
                    return m;
                }
                let (a, b) = (c[0] / m, c[1] / m);
                let t = c[2] / (m * m);
                let horiz = a * a + b * b;
                m * (horiz * horiz + 16.0 * t * t).powf(0.25)
            }
        }
    }

    /// Convolution kernel radius `|y^{-1} x|`; on abelian groups this is the
    /// Euclidean distance.
    pub fn kernel_norm(&self, x: &Point, y: &Point) -> f64 {
        self.quasi_norm(&self.product(&self.inverse(y), x))
    }

    /// Coordinate bounds of the quasi-ball of the given radius.
    pub fn ball_box(&self, radius: f64) -> Vec<f64> {
        self.unit_box
            .iter()
            .zip(&self.dilation_weights)
            .map(|(b, nu)| b * radius.powf(*nu))
            .collect()
    }

    /// Empirical maximum of `|xy| / (|x| + |y|)` over seeded random pairs.
    pub fn estimate_triangle_ratio(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let x = self.random_point(&mut rng, 2.0);
            let y = self.random_point(&mut rng, 2.0);
            let nx = self.quasi_norm(&x);
            let ny = self.quasi_norm(&y);
            if nx + ny == 0.0 {
                continue;
            }
            let ratio = self.quasi_norm(&self.product(&x, &y)) / (nx + ny);
            worst = worst.max(ratio);
        }
        worst
    }

    fn random_point(&self, rng: &mut ChaCha8Rng, scale: f64) -> Point {
        let box_bounds = self.ball_box(scale);
        let coords: Vec<f64> = box_bounds
            .iter()
            .map(|b| (2.0 * rng.gen::<f64>() - 1.0) * b)
            .collect();
        Point::new(&coords)
    }
}

fn h1_triangle_constant(g: &HomogeneousGroup) -> &'static f64 {
    static C: OnceLock<f64> = OnceLock::new();
    C.get_or_init(|| {
        // Empirical quasi-triangle estimate with 5% headroom, floored at 1.
        let raw = g.estimate_triangle_ratio(20_000, 0x5EED_0001);
        (raw * 1.05).max(1.0)
    })
}

/// How the radial density behaves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
enum RadialDensity {
    /// `r^e` (Euclidean `e = n-1`, homogeneous group `e = Q-1`).
    Power { exponent: f64 },
    /// `sinh(r)^k` for hyperbolic space.
    SinhPower { k: u32 },
}

/// A metric measure space reduced to its polar data: radial density,
/// quasi-sphere measure and homogeneous dimension.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolarSpace {
    pub name: String,
    pub topological_dim: usize,
    /// Q; equals the topological dimension for Euclidean and hyperbolic space.
    pub homogeneous_dim: f64,
    /// Total measure of the unit quasi-sphere.
    pub sphere_area: f64,
    density: RadialDensity,
}

impl PolarSpace {
    pub fn euclidean(n: usize) -> Result<Self> {
        let sphere_area = euclidean_sphere_area(n)?;
        Ok(PolarSpace {
            name: format!("euclidean:{n}"),
            topological_dim: n,
            homogeneous_dim: n as f64,
            sphere_area,
            density: RadialDensity::Power {
                exponent: n as f64 - 1.0,
            },
        })
    }

    pub fn hyperbolic(n: usize) -> Result<Self> {
        let sphere_area = euclidean_sphere_area(n)?;
        Ok(PolarSpace {
            name: format!("hyperbolic:{n}"),
            topological_dim: n,
            homogeneous_dim: n as f64,
            sphere_area,
            density: RadialDensity::SinhPower { k: n as u32 - 1 },
        })
    }

    /// Radial view of a homogeneous group: density `r^{Q-1}` with the given
    /// sphere measure. Useful for synthetic Q in tests and closed forms.
    pub fn homogeneous_radial(name: &str, q: f64, sphere_area: f64) -> Result<Self> {
        if !(q >= 1.0) || !(sphere_area > 0.0) {
            return Err(Error::InvalidParams(
                "homogeneous dimension must be >= 1 and sphere area positive".into(),
            ));
        }
        Ok(PolarSpace {
            name: name.into(),
            topological_dim: q.round() as usize,
            homogeneous_dim: q,
            sphere_area,
            density: RadialDensity::Power { exponent: q - 1.0 },
        })
    }

    pub fn density(&self, r: f64) -> f64 {
        match self.density {
            RadialDensity::Power { exponent } => {
                if exponent == 0.0 {
                    1.0
                } else {
                    r.powf(exponent)
                }
            }
            RadialDensity::SinhPower { k } => r.sinh().powi(k as i32),
        }
    }

    pub fn density_exponent_at_zero(&self) -> f64 {
        match self.density {
            RadialDensity::Power { exponent } => exponent,
            RadialDensity::SinhPower { k } => k as f64,
        }
    }

    /// Power-law exponent of the density at infinity, or `None` when the
    /// density grows faster than any power (hyperbolic, n >= 2).
    pub fn density_exponent_at_infinity(&self) -> Option<f64> {
        match self.density {
            RadialDensity::Power { exponent } => Some(exponent),
            RadialDensity::SinhPower { k } if k == 0 => Some(0.0),
            RadialDensity::SinhPower { .. } => None,
        }
    }

    /// The profile `g * density` as a single piecewise power when the
    /// density is itself a pure power. Steep integrands then evaluate
    /// through one representable exponent instead of two factors that can
    /// individually leave f64 range at extreme radii.
    pub fn fold_density(&self, g: &RadialProfile) -> Option<RadialProfile> {
        match self.density {
            RadialDensity::Power { exponent } => {
                Some(g.multiplied(&RadialProfile::power(exponent)))
            }
            RadialDensity::SinhPower { k } if k == 0 => Some(g.clone()),
            RadialDensity::SinhPower { .. } => None,
        }
    }
}

/// A space as the rest of the crate consumes it: the polar data always, plus
/// the full group structure when one exists (Euclidean spaces are carried as
/// abelian groups; hyperbolic space is radial-only).
#[derive(Debug, Clone)]
pub struct Space {
    pub polar: PolarSpace,
    pub group: Option<HomogeneousGroup>,
}

impl Space {
    pub fn euclidean(n: usize) -> Result<Self> {
        Ok(Space {
            polar: PolarSpace::euclidean(n)?,
            group: Some(HomogeneousGroup::abelian(n)?),
        })
    }

    pub fn heisenberg1() -> Result<Self> {
        let group = HomogeneousGroup::heisenberg1();
        let sphere_area = heisenberg1_sphere_area(&group)?;
        Ok(Space {
            polar: PolarSpace {
                name: "heisenberg:1".into(),
                topological_dim: 3,
                homogeneous_dim: 4.0,
                sphere_area,
                density: RadialDensity::Power { exponent: 3.0 },
            },
            group: Some(group),
        })
    }

    pub fn hyperbolic(n: usize) -> Result<Self> {
        Ok(Space {
            polar: PolarSpace::hyperbolic(n)?,
            group: None,
        })
    }

    /// Parse the selection grammar `euclidean:<n>`, `heisenberg:1`,
    /// `hyperbolic:<n>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (kind, arg) = spec
            .split_once(':')
            .ok_or_else(|| Error::ConfigError(format!("bad space spec '{spec}'")))?;
        let n: usize = arg
            .parse()
            .map_err(|_| Error::ConfigError(format!("bad space dimension in '{spec}'")))?;
        match kind {
            "euclidean" => Space::euclidean(n),
            "heisenberg" if n == 1 => Space::heisenberg1(),
            "heisenberg" => Err(Error::UnsupportedSpace(
                "only heisenberg:1 is shipped".into(),
            )),
            "hyperbolic" => Space::hyperbolic(n),
            _ => Err(Error::ConfigError(format!("unknown space kind '{kind}'"))),
        }
    }
}

fn euclidean_sphere_area(n: usize) -> Result<f64> {
    match n {
        1 => Ok(2.0),
        2 => Ok(2.0 * std::f64::consts::PI),
        3 => Ok(4.0 * std::f64::consts::PI),
        _ => Err(Error::UnsupportedSpace(format!(
            "euclidean space shipped for n in 1..=3, got {n}"
        ))),
    }
}

fn heisenberg1_sphere_area(group: &HomogeneousGroup) -> Result<f64> {
    static AREA: OnceLock<f64> = OnceLock::new();
    if let Some(v) = AREA.get() {
        return Ok(*v);
    }
    let v = sphere_area_quadrature(group)?;
    Ok(*AREA.get_or_init(|| v))
}

/// Integrate a radial function over the space:
/// `sphere_area * \int_{r_lo}^{r_hi} g(r) density(r) dr`.
///
/// `g_hints` describe `g` alone; the density exponent is folded in here. On
/// spaces with super-polynomial density growth an infinite upper limit with a
/// power-law tail is refused as divergent.
pub fn polar_integrate(
    space: &PolarSpace,
    g: impl Fn(f64) -> f64,
    r_lo: f64,
    r_hi: f64,
    g_hints: SingularityHints,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let at_zero = match g_hints.at_zero {
        EndpointHint::Power(e) => EndpointHint::Power(e + space.density_exponent_at_zero()),
        EndpointHint::Unknown => EndpointHint::Unknown,
    };
    let at_infinity = if r_hi.is_infinite() {
        match (g_hints.at_infinity, space.density_exponent_at_infinity()) {
            (EndpointHint::Power(e), Some(d)) => EndpointHint::Power(e + d),
            (EndpointHint::Power(_), None) => {
                return Err(Error::divergent(
                    Endpoint::Infinity,
                    format!(
                        "power-law integrand against super-polynomial density on {}",
                        space.name
                    ),
                ));
            }
            (EndpointHint::Unknown, _) => EndpointHint::Unknown,
        }
    } else {
        EndpointHint::Unknown
    };

    let value = integrate(
        |r| g(r) * space.density(r),
        r_lo,
        r_hi,
        SingularityHints {
            at_zero,
            at_infinity,
        },
        breakpoints,
        cfg,
    )?;
    Ok(space.sphere_area * value)
}

/// `polar_integrate` for a piecewise-power profile, with hints and
/// breakpoints read off the profile itself. Vanishing tails shrink the range
/// instead of engaging a tail transform.
pub fn polar_integrate_profile(
    space: &PolarSpace,
    g: &RadialProfile,
    r_lo: f64,
    r_hi: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let mut lo = r_lo;
    let mut hi = r_hi;
    let segs = g.segments();
    if let TailBehavior::Vanishes = g.behavior_at_zero() {
        let first_active = segs
            .iter()
            .find(|s| s.coeff > 0.0)
            .map(|s| s.start)
            .unwrap_or(hi);
        lo = lo.max(first_active);
    }
    if let TailBehavior::Vanishes = g.behavior_at_infinity() {
        let last_active_end = segs
            .windows(2)
            .rev()
            .find(|w| w[0].coeff > 0.0)
            .map(|w| w[1].start)
            .unwrap_or(lo);
        hi = hi.min(last_active_end);
    }
    if hi <= lo {
        return Ok(0.0);
    }
    if let Some(combined) = space.fold_density(g) {
        let at_zero = match combined.behavior_at_zero() {
            TailBehavior::Power(e) => EndpointHint::Power(e),
            TailBehavior::Vanishes => EndpointHint::Unknown,
        };
        let at_infinity = if hi.is_infinite() {
            match combined.behavior_at_infinity() {
                TailBehavior::Power(e) => {
                    if e >= -1.0 - 1e-12 {
                        return Err(Error::divergent(
                            Endpoint::Infinity,
                            format!("tail exponent {e} >= -1"),
                        ));
                    }
                    EndpointHint::Power(e)
                }
                TailBehavior::Vanishes => EndpointHint::Unknown,
            }
        } else {
            EndpointHint::Unknown
        };
        let value = integrate(
            |r| combined.eval(r),
            lo,
            hi,
            SingularityHints {
                at_zero,
                at_infinity,
            },
            &combined.breakpoints(),
            cfg,
        )?;
        return Ok(space.sphere_area * value);
    }
    let hints = SingularityHints {
        at_zero: match g.behavior_at_zero() {
            TailBehavior::Power(e) => EndpointHint::Power(e),
            TailBehavior::Vanishes => EndpointHint::Unknown,
        },
        at_infinity: match g.behavior_at_infinity() {
            TailBehavior::Power(e) => EndpointHint::Power(e),
            TailBehavior::Vanishes => EndpointHint::Unknown,
        },
    };
    polar_integrate(space, |r| g.eval(r), lo, hi, hints, &g.breakpoints(), cfg)
}

/// Lebesgue measure of `{c : |(partial..., c)| < radius}` for the last
/// coordinate, by bisection against the quasi-norm. Requires the norm to be
/// even and non-decreasing in the last coordinate at fixed others, which
/// holds for the Euclidean and Koranyi norms.
fn last_coord_extent(group: &HomogeneousGroup, partial: &[f64], radius: f64) -> f64 {
    let n = group.coords_dim;
    debug_assert_eq!(partial.len(), n - 1);
    let mut coords = [0.0f64; 3];
    coords[..n - 1].copy_from_slice(partial);
    let norm_at = |c: f64, coords: &mut [f64; 3]| {
        coords[n - 1] = c;
        group.quasi_norm(&Point::new(&coords[..n]))
    };
    let mut buf = coords;
    if norm_at(0.0, &mut buf) >= radius {
        return 0.0;
    }
    let mut hi = group.ball_box(radius)[n - 1] * (1.0 + 1e-9);
    let mut guard = 0;
    while norm_at(hi, &mut buf) < radius {
        hi *= 2.0;
        guard += 1;
        if guard > 60 {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if norm_at(mid, &mut buf) < radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo + hi
}

/// Quasi-ball volume by nested coordinate-space quadrature (n <= 3).
pub fn ball_volume_quadrature(group: &HomogeneousGroup, radius: f64) -> Result<f64> {
    let tight = QuadratureConfig {
        rel_tol: 1e-10,
        abs_tol: 1e-14,
        max_subdivisions: 4000,
        ..QuadratureConfig::default()
    };
    let bounds = group.ball_box(radius);
    match group.coords_dim {
        1 => Ok(last_coord_extent(group, &[], radius)),
        2 => {
            let b0 = bounds[0];
            let half = integrate(
                |a| last_coord_extent(group, &[a], radius),
                0.0,
                b0,
                SingularityHints::none(),
                &[],
                &tight,
            )?;
            Ok(2.0 * half)
        }
        3 => {
            let (b0, b1) = (bounds[0], bounds[1]);
            let inner_cfg = QuadratureConfig {
                rel_tol: 1e-11,
                abs_tol: 1e-15,
                ..tight
            };
            let quarter = integrate(
                |a| {
                    // Slices are symmetric in each coordinate for the shipped
                    // norms, so integrate one quadrant and scale.
                    integrate(
                        |b| {
                            let e1 = last_coord_extent(group, &[a, b], radius);
                            let e2 = last_coord_extent(group, &[a, -b], radius);
                            0.5 * (e1 + e2)
                        },
                        0.0,
                        b1,
                        SingularityHints::none(),
                        &[],
                        &inner_cfg,
                    )
                    .unwrap_or(f64::NAN)
                },
                0.0,
                b0,
                SingularityHints::none(),
                &[],
                &tight,
            )?;
            if !quarter.is_finite() {
                return Err(Error::NonConvergent {
                    estimate: quarter,
                    error: f64::NAN,
                    tolerance: tight.rel_tol,
                });
            }
            Ok(4.0 * quarter)
        }
        n => Err(Error::UnsupportedSpace(format!(
            "coordinate quadrature shipped for n <= 3, got {n}"
        ))),
    }
}

/// Quasi-ball volume by seeded Monte Carlo over the bounding box.
/// Returns (volume, standard error).
pub fn ball_volume_mc(group: &HomogeneousGroup, radius: f64, n_samples: u64, seed: u64) -> (f64, f64) {
    let bounds = group.ball_box(radius);
    let box_volume: f64 = bounds.iter().map(|b| 2.0 * b).product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    let mut coords = [0.0f64; 3];
    for _ in 0..n_samples {
        for (slot, b) in coords[..group.coords_dim].iter_mut().zip(&bounds) {
            *slot = (2.0 * rng.gen::<f64>() - 1.0) * b;
        }
        if group.quasi_norm(&Point::new(&coords[..group.coords_dim])) < radius {
            hits += 1;
        }
    }
    let p = hits as f64 / n_samples as f64;
    let volume = box_volume * p;
    let std_error = box_volume * (p * (1.0 - p) / n_samples as f64).sqrt();
    (volume, std_error)
}

/// `sphere_area = Q * vol(B(0,1))` with the volume from deterministic
/// coordinate quadrature.
pub fn sphere_area_quadrature(group: &HomogeneousGroup) -> Result<f64> {
    Ok(group.homogeneous_dim * ball_volume_quadrature(group, 1.0)?)
}

/// `sphere_area = Q * vol(B(0,1))` with the volume from Monte Carlo.
/// Returns (area, standard error).
pub fn sphere_area_mc(group: &HomogeneousGroup, n_samples: u64, seed: u64) -> (f64, f64) {
    let (vol, se) = ball_volume_mc(group, 1.0, n_samples, seed);
    (group.homogeneous_dim * vol, group.homogeneous_dim * se)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn euclidean_sphere_areas_by_quadrature() {
        for (n, expected) in [(1usize, 2.0), (2, 2.0 * PI), (3, 4.0 * PI)] {
            let g = HomogeneousGroup::abelian(n).unwrap();
            let area = sphere_area_quadrature(&g).unwrap();
            assert_relative_eq!(area, expected, max_relative = 1e-6);
        }
    }

    #[test]
    fn unit_disk_area_via_polar_integration() {
        let space = PolarSpace::euclidean(2).unwrap();
        let area = polar_integrate(
            &space,
            |_| 1.0,
            0.0,
            1.0,
            SingularityHints::none(),
            &[],
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(area, PI, max_relative = 1e-9);
    }

    #[test]
    fn homogeneous_ball_integral_matches_power_rule() {
        // g = 1 over (0, r) on a Q = 4 group: sphere * r^4 / 4.
        let space = Space::heisenberg1().unwrap();
        let sphere = space.polar.sphere_area;
        let r = 1.7;
        let v = polar_integrate(
            &space.polar,
            |_| 1.0,
            0.0,
            r,
            SingularityHints::none(),
            &[],
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(v, sphere * r.powi(4) / 4.0, max_relative = 1e-8);
    }

    #[test]
    fn singular_radial_profile_on_line() {
        // n = 1, g = r^{-1/2} over (0,1): 2 * 2 = 4.
        let space = PolarSpace::euclidean(1).unwrap();
        let g = RadialProfile::power(-0.5);
        let v =
            polar_integrate_profile(&space, &g, 0.0, 1.0, &QuadratureConfig::default()).unwrap();
        assert_relative_eq!(v, 4.0, max_relative = 1e-9);
    }

    #[test]
    fn koranyi_ball_volume_against_reduction() {
        // The Koranyi unit ball has volume pi * \int_0^1 rho sqrt(1-rho^4) drho
        // = pi^2 / 8 by the rho^2 substitution.
        let g = HomogeneousGroup::heisenberg1();
        let vol = ball_volume_quadrature(&g, 1.0).unwrap();
        assert_relative_eq!(vol, PI * PI / 8.0, max_relative = 1e-7);
    }

    #[test]
    fn heisenberg_sphere_area_mc_agrees_with_quadrature() {
        let g = HomogeneousGroup::heisenberg1();
        let quad = sphere_area_quadrature(&g).unwrap();
        let (mc, se) = sphere_area_mc(&g, 400_000, 7);
        assert!(
            (mc - quad).abs() / quad < 5e-3,
            "mc {mc} vs quadrature {quad} (se {se})"
        );
    }

    #[test]
    fn ball_volume_scales_with_homogeneous_dimension() {
        let g = HomogeneousGroup::heisenberg1();
        let unit = ball_volume_quadrature(&g, 1.0).unwrap();
        for &s in &[0.5, 2.0] {
            let v = ball_volume_quadrature(&g, s).unwrap();
            assert_relative_eq!(v, s.powi(4) * unit, max_relative = 1e-6);
        }
        for &s in &[0.5, 2.0, 10.0] {
            let (v, _) = ball_volume_mc(&g, s, 300_000, 11);
            assert!((v - s.powi(4) * unit).abs() / (s.powi(4) * unit) < 0.01);
        }
    }

    #[test]
    fn quasi_norm_axioms_on_random_samples() {
        let groups = [
            HomogeneousGroup::abelian(2).unwrap(),
            HomogeneousGroup::heisenberg1(),
        ];
        for g in &groups {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            for _ in 0..10_000 {
                let x = g.random_point(&mut rng, 1.5);
                let nx = g.quasi_norm(&x);
                // (i) symmetry under inversion
                assert_relative_eq!(g.quasi_norm(&g.inverse(&x)), nx, max_relative = 1e-12);
                // (ii) 1-homogeneity under dilations
                let s = 0.1 + 5.0 * rng.gen::<f64>();
                assert_relative_eq!(
                    g.quasi_norm(&g.dilate(s, &x)),
                    s * nx,
                    max_relative = 1e-10
                );
                // group identity
                let e = g.product(&x, &g.inverse(&x));
                assert!(g.quasi_norm(&e) <= 1e-12 * (1.0 + nx));
            }
            // (iii) vanishing only at the identity
            assert_eq!(g.quasi_norm(&Point::zero(g.coords_dim)), 0.0);
        }
    }

    #[test]
    fn kernel_norm_is_symmetric_and_abelian_reduces_to_distance() {
        let g = HomogeneousGroup::heisenberg1();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10_000 {
            let x = g.random_point(&mut rng, 1.0);
            let y = g.random_point(&mut rng, 1.0);
            let xy = g.kernel_norm(&x, &y);
            let yx = g.kernel_norm(&y, &x);
            assert_relative_eq!(xy, yx, max_relative = 1e-11);
        }
        let e = HomogeneousGroup::abelian(3).unwrap();
        let x = Point::new(&[0.3, -1.2, 2.0]);
        let y = Point::new(&[1.0, 0.5, -0.25]);
        let dist = x
            .coords()
            .iter()
            .zip(y.coords())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert_relative_eq!(e.kernel_norm(&x, &y), dist, max_relative = 1e-14);
        assert_eq!(e.kernel_norm(&x, &x), 0.0);
    }

    #[test]
    fn koranyi_point_evaluations() {
        let g = HomogeneousGroup::heisenberg1();
        let x = Point::new(&[1.0, 0.0, 0.0]);
        assert_relative_eq!(
            g.kernel_norm(&x, &Point::zero(3)),
            1.0,
            max_relative = 1e-14
        );
        let quasi_triangle = g.triangle_constant;
        assert!(
            (1.0..1.3).contains(&quasi_triangle),
            "published constant {quasi_triangle}"
        );
    }

    #[test]
    fn hyperbolic_space_is_radial_with_exponential_growth() {
        let s = Space::hyperbolic(3).unwrap();
        assert!(s.group.is_none());
        assert_eq!(s.polar.density_exponent_at_infinity(), None);
        // Power tails against sinh^{n-1} growth are refused as divergent.
        let err = polar_integrate(
            &s.polar,
            |r| r.powf(-8.0),
            1.0,
            f64::INFINITY,
            SingularityHints::powers(0.0, -8.0),
            &[],
            &QuadratureConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DivergentIntegral { .. }));
        // Finite ranges integrate fine.
        let v = polar_integrate(
            &s.polar,
            |_| 1.0,
            0.0,
            1.0,
            SingularityHints::none(),
            &[],
            &QuadratureConfig::default(),
        )
        .unwrap();
        let exact = 4.0 * PI * (0.25 * 2f64.sinh() - 0.5); // \int sinh^2 = sinh(2r)/4 - r/2
        assert_relative_eq!(v, exact, max_relative = 1e-9);
    }

    #[test]
    fn space_parsing_grammar() {
        assert!(Space::parse("euclidean:2").is_ok());
        assert!(Space::parse("heisenberg:1").is_ok());
        assert!(Space::parse("hyperbolic:3").is_ok());
        assert!(Space::parse("euclidean:7").is_err());
        assert!(Space::parse("heisenberg:2").is_err());
        assert!(Space::parse("minkowski:4").is_err());
        assert!(Space::parse("euclidean").is_err());
    }
}
