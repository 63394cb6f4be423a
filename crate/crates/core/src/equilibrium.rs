//! Closed-form equilibrium measures, Coulomb potentials of uniform laws and
//! Euler–Lagrange residual checks.

use crate::error::{invalid, Result};
use crate::kernel::{ball_volume, c_d, Dimension, Point, Potential};
use crate::quadrature::integrate;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

/// The tabulated equilibrium measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EquilibriumLabel {
    /// Uniform law on the unit ball of R^d (`V = |x|^2/2`).
    UniformBall(Dimension),
    /// Uniform law on the unit disc (Ginibre).
    UniformDisc,
    /// Density `1 / (pi (1 + |z|^2)^2)` on the plane (spherical ensemble).
    SphericalHeavyTail,
    /// Limit of truncated Haar unitaries with `n/m -> alpha`:
    /// density `(1-alpha) / (pi alpha (1-|z|^2)^2)` on `|z| <= sqrt(alpha)`.
    TruncationLimit { alpha: f64 },
    /// Limit of products of `m` Ginibre matrices: density
    /// `|z|^{2/m - 2} / (m pi)` on the unit disc.
    ProductLimit { m: u32 },
    /// Semicircle on `[-2, 2]` of the real axis.
    Semicircle,
    /// Arcsine law on `[a, b]` of the real axis.
    Arcsine { a: f64, b: f64 },
}

/// An equilibrium measure, optionally dilated by `scale` (the law of
/// `scale * X` for `X` with the tabulated law).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumMeasure {
    label: EquilibriumLabel,
    scale: f64,
}

/// Validates the label parameters and returns the measure.
pub fn equilibrium_for(label: EquilibriumLabel) -> Result<EquilibriumMeasure> {
    match label {
        EquilibriumLabel::TruncationLimit { alpha } if !(alpha > 0.0 && alpha < 1.0) => {
            return Err(invalid("alpha", format!("must lie in (0,1), got {alpha}")));
        }
        EquilibriumLabel::ProductLimit { m } if m < 1 => {
            return Err(invalid("m", "number of factors must be >= 1"));
        }
        EquilibriumLabel::Arcsine { a, b } if !(a < b && a.is_finite() && b.is_finite()) => {
            return Err(invalid("b", format!("need a < b, got [{a}, {b}]")));
        }
        _ => {}
    }
    Ok(EquilibriumMeasure { label, scale: 1.0 })
}

/// Radial CDF `mu({|x| <= r})` of a tabulated (undilated) measure. For the
/// measures carried by the real axis this is the CDF in the coordinate `s`.
pub fn radial_cdf_closed(label: EquilibriumLabel, r: f64) -> f64 {
    match label {
        EquilibriumLabel::UniformBall(d) => r.clamp(0.0, 1.0).powi(d.get() as i32),
        EquilibriumLabel::UniformDisc => r.clamp(0.0, 1.0).powi(2),
        EquilibriumLabel::SphericalHeavyTail => {
            if r <= 0.0 {
                0.0
            } else if r.is_infinite() {
                1.0
            } else {
                let r2 = r * r;
                r2 / (1.0 + r2)
            }
        }
        EquilibriumLabel::TruncationLimit { alpha } => {
            let r = r.clamp(0.0, alpha.sqrt());
            let r2 = r * r;
            ((1.0 - alpha) / alpha * r2 / (1.0 - r2)).min(1.0)
        }
        EquilibriumLabel::ProductLimit { m } => r.clamp(0.0, 1.0).powf(2.0 / m as f64),
        EquilibriumLabel::Semicircle => {
            let s = r.clamp(-2.0, 2.0);
            0.5 + s * (4.0 - s * s).sqrt() / (4.0 * PI) + (s / 2.0).asin() / PI
        }
        EquilibriumLabel::Arcsine { a, b } => {
            let t = ((r - a) / (b - a)).clamp(0.0, 1.0);
            2.0 / PI * t.sqrt().asin()
        }
    }
}

impl EquilibriumMeasure {
    pub fn label(&self) -> EquilibriumLabel {
        self.label
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// The law of `factor * X`.
    pub fn dilated(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(invalid("factor", format!("dilation must be positive, got {factor}")));
        }
        Ok(EquilibriumMeasure {
            label: self.label,
            scale: self.scale * factor,
        })
    }

    /// Dimension of the ambient space of the density (1 for the measures
    /// carried by the real axis).
    pub fn dim(&self) -> usize {
        match self.label {
            EquilibriumLabel::UniformBall(d) => d.get(),
            EquilibriumLabel::Semicircle | EquilibriumLabel::Arcsine { .. } => 1,
            _ => 2,
        }
    }

    /// Rotationally invariant measures (everything except the ones carried
    /// by a segment of the real axis).
    pub fn is_radial(&self) -> bool {
        !matches!(self.label, EquilibriumLabel::Semicircle | EquilibriumLabel::Arcsine { .. })
    }

    /// Support radius (`+inf` for the heavy-tailed law). For the measures on
    /// the real axis, the largest `|s|` in the support.
    pub fn support_radius(&self) -> f64 {
        let r = match self.label {
            EquilibriumLabel::SphericalHeavyTail => f64::INFINITY,
            EquilibriumLabel::TruncationLimit { alpha } => alpha.sqrt(),
            EquilibriumLabel::Semicircle => 2.0,
            EquilibriumLabel::Arcsine { a, b } => a.abs().max(b.abs()),
            _ => 1.0,
        };
        r * self.scale
    }

    /// Support interval of the CDF variable: `[0, R]` for radial measures,
    /// `[a, b]` on the real axis otherwise.
    pub fn cdf_support(&self) -> (f64, f64) {
        match self.label {
            EquilibriumLabel::Semicircle => (-2.0 * self.scale, 2.0 * self.scale),
            EquilibriumLabel::Arcsine { a, b } => (a * self.scale, b * self.scale),
            _ => (0.0, self.support_radius()),
        }
    }

    /// Density with respect to Lebesgue measure in `dim()` dimensions, at a
    /// point of norm `r` (radial measures) or at the coordinate `r` (real
    /// axis measures).
    pub fn density(&self, r: f64) -> f64 {
        let s = self.scale;
        let x = r / s;
        let base = match self.label {
            EquilibriumLabel::UniformBall(d) => {
                if x.abs() <= 1.0 {
                    1.0 / ball_volume(d)
                } else {
                    0.0
                }
            }
            EquilibriumLabel::UniformDisc => {
                if x.abs() <= 1.0 {
                    1.0 / PI
                } else {
                    0.0
                }
            }
            EquilibriumLabel::SphericalHeavyTail => {
                let t = 1.0 + x * x;
                1.0 / (PI * t * t)
            }
            EquilibriumLabel::TruncationLimit { alpha } => {
                if x.abs() <= alpha.sqrt() {
                    let t = 1.0 - x * x;
                    (1.0 - alpha) / (PI * alpha * t * t)
                } else {
                    0.0
                }
            }
            EquilibriumLabel::ProductLimit { m } => {
                if x.abs() <= 1.0 {
                    x.abs().powf(2.0 / m as f64 - 2.0) / (m as f64 * PI)
                } else {
                    0.0
                }
            }
            EquilibriumLabel::Semicircle => {
                if x.abs() <= 2.0 {
                    (4.0 - x * x).sqrt() / (2.0 * PI)
                } else {
                    0.0
                }
            }
            EquilibriumLabel::Arcsine { a, b } => {
                if x > a && x < b {
                    1.0 / (PI * ((x - a) * (b - x)).sqrt())
                } else {
                    0.0
                }
            }
        };
        base / s.powi(self.dim() as i32)
    }

    /// Density of `|X|` (radial measures) or of the coordinate (real axis
    /// measures).
    pub fn radial_density(&self, r: f64) -> f64 {
        if self.is_radial() {
            if r < 0.0 {
                return 0.0;
            }
            let d = self.dim();
            crate::kernel::sphere_area(d) * r.powi(d as i32 - 1) * self.density(r)
        } else {
            self.density(r)
        }
    }

    /// `mu({|x| <= r})`, or the CDF of the coordinate for real-axis
    /// measures.
    pub fn radial_cdf(&self, r: f64) -> f64 {
        radial_cdf_closed(self.label, r / self.scale)
    }

    /// Inverse of `radial_cdf` by bisection to an absolute width of 1e-12.
    pub fn radial_quantile(&self, p: f64) -> f64 {
        let (mut lo, mut hi) = self.cdf_support();
        if hi.is_infinite() {
            hi = self.scale;
            while self.radial_cdf(hi) < p {
                hi *= 2.0;
            }
        }
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.radial_cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Coulomb potential `U_mu(x) = int g(x - y) dmu(y)`.
    ///
    /// Closed form for the uniform disc; other radial measures use the
    /// shell theorem `U(x) = int g(max(|x|, r)) dmu_radial(r)`, a 1D
    /// integral split at `|x|`.
    pub fn coulomb_potential(&self, x: &[f64]) -> Result<f64> {
        if !self.is_radial() {
            return Err(invalid("measure", "potentials of measures on a segment are not implemented"));
        }
        if x.len() != self.dim() {
            return Err(invalid("x", format!("expected {} coordinates, got {}", self.dim(), x.len())));
        }
        let rx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if self.label == EquilibriumLabel::UniformDisc {
            return Ok(potential_uniform_disc(self.scale, x));
        }
        let d = self.dim();
        let g_of = |r: f64| -> f64 {
            if d == 2 {
                -r.ln()
            } else {
                1.0 / ((d - 2) as f64 * r.powi(d as i32 - 2))
            }
        };
        let support = self.support_radius();
        // mass inside |x| sits at the shell value g(|x|)
        let inner_mass = self.radial_cdf(rx.min(support));
        let mut total = if inner_mass > 0.0 { inner_mass * g_of(rx) } else { 0.0 };
        if rx < support {
            if support.is_finite() {
                total += integrate(|r| g_of(r) * self.radial_density(r), rx, support, 1e-13, 1e-12)?;
            } else {
                let split = rx.max(self.scale);
                total += integrate(|r| g_of(r) * self.radial_density(r), rx, split, 1e-13, 1e-12)?;
                // r = split / t maps (split, inf) onto (0, 1)
                total += integrate(
                    |t| {
                        if t <= 0.0 {
                            0.0
                        } else {
                            let r = split / t;
                            g_of(r) * self.radial_density(r) * split / (t * t)
                        }
                    },
                    0.0,
                    1.0,
                    1e-13,
                    1e-12,
                )?;
            }
        }
        Ok(total)
    }

    /// Draws `n` i.i.d. points: inverse-CDF radius and uniform direction
    /// (radial measures), or inverse-CDF abscissa on the real axis.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<Point> {
        let d = self.dim();
        (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                let r = self.radial_quantile(u);
                if !self.is_radial() {
                    return vec![r, 0.0];
                }
                if d == 2 {
                    let theta = 2.0 * PI * rng.random::<f64>();
                    vec![r * theta.cos(), r * theta.sin()]
                } else {
                    let mut dir: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
                    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
                    dir.iter_mut().for_each(|v| *v *= r / norm);
                    dir
                }
            })
            .collect()
    }
}

/// Draws `n` points from `m` (see [`EquilibriumMeasure::sample`]).
pub fn sample_equilibrium<R: Rng + ?Sized>(m: &EquilibriumMeasure, n: usize, rng: &mut R) -> Vec<Point> {
    m.sample(n, rng)
}

/// Potential of the uniform law on the circle of radius `r` in the plane.
pub fn potential_uniform_circle(r: f64, x: &[f64]) -> f64 {
    let rx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if rx <= r {
        -r.ln()
    } else {
        -rx.ln()
    }
}

/// Potential of the uniform law on the disc of radius `big_r` in the plane.
pub fn potential_uniform_disc(big_r: f64, x: &[f64]) -> f64 {
    let r2 = x.iter().map(|v| v * v).sum::<f64>();
    if r2 <= big_r * big_r {
        -0.5 * (r2 / (big_r * big_r) - 1.0 + 2.0 * big_r.ln())
    } else {
        -0.5 * r2.ln()
    }
}

/// A uniform planar law with a closed-form Coulomb energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UniformLaw {
    Circle(f64),
    Disc(f64),
}

/// Coulomb energy `(1/2) int int g(x-y) dmu dmu` of a uniform planar law.
pub fn energy_uniform_closed(law: UniformLaw) -> Result<f64> {
    match law {
        UniformLaw::Circle(r) | UniformLaw::Disc(r) if !(r > 0.0 && r.is_finite()) => {
            Err(invalid("radius", format!("must be positive, got {r}")))
        }
        UniformLaw::Circle(r) => Ok(-r.ln() / 2.0),
        UniformLaw::Disc(r) => Ok(0.125 - r.ln() / 2.0),
    }
}

/// `Laplacian V(x) / c_d`, the density of the equilibrium measure on the
/// interior of its support.
pub fn density_from_laplacian(v: &Potential, x: &[f64], dim: Dimension) -> f64 {
    v.laplacian(x, dim) / c_d(dim)
}

/// `U_m(x) + V(x)` over a grid.
fn total_potential(v: &Potential, m: &EquilibriumMeasure, grid: &[Point]) -> Result<Vec<f64>> {
    grid.iter()
        .map(|x| Ok(m.coulomb_potential(x)? + v.value(x)))
        .collect()
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

/// Median of `U_m + V` over a grid of the support; estimates the Robin-type
/// constant of the Euler–Lagrange equations.
pub fn euler_lagrange_constant(v: &Potential, m: &EquilibriumMeasure, grid: &[Point]) -> Result<f64> {
    if grid.is_empty() {
        return Err(invalid("grid", "empty grid"));
    }
    let mut values = total_potential(v, m, grid)?;
    Ok(median(&mut values))
}

/// `max_x |U_m(x) + V(x) - c|` over a grid of the support, with `c` the grid
/// median.
pub fn euler_lagrange_residual(v: &Potential, m: &EquilibriumMeasure, grid: &[Point]) -> Result<f64> {
    if grid.is_empty() {
        return Err(invalid("grid", "empty grid"));
    }
    let values = total_potential(v, m, grid)?;
    let c = median(&mut values.clone());
    Ok(values.iter().map(|u| (u - c).abs()).fold(0.0, f64::max))
}

/// `min_x (U_m(x) + V(x) - c)` over a grid; nonnegative off the support
/// when `m` is the equilibrium measure of `V`.
pub fn euler_lagrange_min_excess(v: &Potential, m: &EquilibriumMeasure, grid: &[Point], c: f64) -> Result<f64> {
    Ok(total_potential(v, m, grid)?
        .into_iter()
        .map(|u| u - c)
        .fold(f64::INFINITY, f64::min))
}

/// Polar grid with `n_r` radii `(k + 1/2) R / n_r` and `n_theta` angles.
pub fn polar_grid(radius: f64, n_r: usize, n_theta: usize) -> Vec<Point> {
    annulus_grid(0.0, radius, n_r, n_theta)
}

/// Polar grid over the annulus `inner < |x| < outer`.
pub fn annulus_grid(inner: f64, outer: f64, n_r: usize, n_theta: usize) -> Vec<Point> {
    let mut pts = Vec::with_capacity(n_r * n_theta);
    for i in 0..n_r {
        let r = inner + (i as f64 + 0.5) * (outer - inner) / n_r as f64;
        for k in 0..n_theta {
            let t = 2.0 * PI * k as f64 / n_theta as f64 + 0.1;
            pts.push(vec![r * t.cos(), r * t.sin()]);
        }
    }
    pts
}
