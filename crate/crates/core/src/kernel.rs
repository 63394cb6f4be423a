//! Coulomb kernel, confining potentials and the discrete gas energy
//!
//! The energy of `n` labelled particles is
//! `E_n = n * sum_i V(x_i) + sum_{i<j} g(x_i - x_j)` and the gas law has
//! density proportional to `exp(-beta * E_n)`.

use crate::error::{invalid, Error, Result};
use crate::special::ln_gamma;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Ambient dimension, at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dimension(usize);

impl Dimension {
    pub const PLANE: Dimension = Dimension(2);

    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(invalid("dim", format!("dimension must be >= 2, got {d}")));
        }
        Ok(Dimension(d))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }
}

/// A point of R^d stored as its coordinates.
pub type Point = Vec<f64>;

#[inline]
fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

#[inline]
fn dist_sq(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Kernel value from a squared distance; the caller guarantees `r2 > 0`.
#[inline]
fn g_from_sq(d: usize, r2: f64) -> f64 {
    match d {
        2 => -0.5 * r2.ln(),
        3 => 1.0 / r2.sqrt(),
        4 => 0.5 / r2,
        _ => 1.0 / ((d - 2) as f64 * r2.powf(0.5 * (d - 2) as f64)),
    }
}

/// Coulomb kernel `g(x)`: `-log|x|` in the plane, `|x|^{2-d}/(d-2)` above.
pub fn coulomb_g(dim: Dimension, x: &[f64]) -> Result<f64> {
    check_len(dim, x)?;
    let r2 = norm_sq(x);
    if r2 == 0.0 {
        return Err(Error::Domain("Coulomb kernel is infinite at the origin".into()));
    }
    Ok(g_from_sq(dim.get(), r2))
}

/// Gradient of the Coulomb kernel, `-x / |x|^d` in every dimension.
pub fn coulomb_grad(dim: Dimension, x: &[f64]) -> Result<Point> {
    check_len(dim, x)?;
    let r2 = norm_sq(x);
    if r2 == 0.0 {
        return Err(Error::Domain("Coulomb kernel gradient is undefined at the origin".into()));
    }
    let scale = grad_scale(dim.get(), r2);
    Ok(x.iter().map(|v| -v * scale).collect())
}

/// `1/|x|^d` as a function of `|x|^2`.
#[inline]
fn grad_scale(d: usize, r2: f64) -> f64 {
    match d {
        2 => 1.0 / r2,
        3 => 1.0 / (r2 * r2.sqrt()),
        4 => 1.0 / (r2 * r2),
        _ => r2.powf(-0.5 * d as f64),
    }
}

/// Surface area of the unit sphere, `c_d = d * omega_d = 2 pi^{d/2} / Gamma(d/2)`.
/// This is the constant in `-Laplacian g = c_d delta_0`.
pub fn c_d(dim: Dimension) -> f64 {
    sphere_area(dim.get())
}

pub(crate) fn sphere_area(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => (2f64.ln() + 0.5 * d as f64 * PI.ln() - ln_gamma(0.5 * d as f64)).exp(),
    }
}

/// Volume of the unit ball in R^d.
pub fn ball_volume(dim: Dimension) -> f64 {
    c_d(dim) / dim.get() as f64
}

fn check_len(dim: Dimension, x: &[f64]) -> Result<()> {
    if x.len() != dim.get() {
        return Err(invalid("point", format!("expected {} coordinates, got {}", dim.get(), x.len())));
    }
    Ok(())
}

/// Radial profile `h` of a potential `V(x) = h(|x|)` with its first two
/// derivatives.
#[derive(Clone)]
pub struct RadialProfile {
    pub value: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub derivative: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub second_derivative: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl RadialProfile {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
        second_derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        RadialProfile {
            value: Arc::new(value),
            derivative: Arc::new(derivative),
            second_derivative: Arc::new(second_derivative),
        }
    }
}

/// Confining potential `V`.
#[derive(Clone)]
pub enum Potential {
    /// `V(x) = gamma * |x|^2`.
    Quadratic { gamma: f64 },
    /// `V(x) = (prefactor / 2) * log(1 + |x|^2)`. The spherical ensemble
    /// uses `prefactor = (n + 1) / n`.
    SphericalLog { prefactor: f64 },
    /// `V(x) = h(|x|)` for a caller-supplied profile. Integrability of the
    /// resulting gas is the caller's responsibility.
    RadialCustom(RadialProfile),
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Quadratic { gamma } => f.debug_struct("Quadratic").field("gamma", gamma).finish(),
            Potential::SphericalLog { prefactor } => {
                f.debug_struct("SphericalLog").field("prefactor", prefactor).finish()
            }
            Potential::RadialCustom(_) => f.write_str("RadialCustom(..)"),
        }
    }
}

impl Potential {
    /// The Ginibre potential `|x|^2 / 2`.
    pub fn ginibre() -> Self {
        Potential::Quadratic { gamma: 0.5 }
    }

    /// Spherical-ensemble potential for `n` particles.
    pub fn spherical_for(n: usize) -> Self {
        Potential::SphericalLog {
            prefactor: (n as f64 + 1.0) / n as f64,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Potential::Quadratic { gamma } if !(*gamma > 0.0 && gamma.is_finite()) => {
                Err(invalid("gamma", format!("quadratic coefficient must be positive, got {gamma}")))
            }
            Potential::SphericalLog { prefactor } if !(*prefactor > 0.0 && prefactor.is_finite()) => {
                Err(invalid("prefactor", format!("must be positive, got {prefactor}")))
            }
            _ => Ok(()),
        }
    }

    #[inline]
    fn value_sq(&self, r2: f64) -> f64 {
        match self {
            Potential::Quadratic { gamma } => gamma * r2,
            Potential::SphericalLog { prefactor } => 0.5 * prefactor * r2.ln_1p(),
            Potential::RadialCustom(p) => (p.value)(r2.sqrt()),
        }
    }

    /// `V(x)`.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.value_sq(norm_sq(x))
    }

    /// `grad V(x)`.
    pub fn gradient(&self, x: &[f64]) -> Point {
        let r2 = norm_sq(x);
        let scale = self.gradient_scale(r2);
        x.iter().map(|v| v * scale).collect()
    }

    /// `grad V(x) = scale(|x|^2) * x`.
    #[inline]
    fn gradient_scale(&self, r2: f64) -> f64 {
        match self {
            Potential::Quadratic { gamma } => 2.0 * gamma,
            Potential::SphericalLog { prefactor } => prefactor / (1.0 + r2),
            Potential::RadialCustom(p) => {
                let r = r2.sqrt();
                if r == 0.0 {
                    // h'(r)/r -> h''(0) for a smooth radial profile
                    (p.second_derivative)(0.0)
                } else {
                    (p.derivative)(r) / r
                }
            }
        }
    }

    /// `Laplacian V(x)` in dimension `dim`.
    pub fn laplacian(&self, x: &[f64], dim: Dimension) -> f64 {
        let d = dim.get() as f64;
        let r2 = norm_sq(x);
        match self {
            Potential::Quadratic { gamma } => 2.0 * gamma * d,
            Potential::SphericalLog { prefactor } => {
                let s = 1.0 + r2;
                prefactor * ((1.0 - r2) / (s * s) + (d - 1.0) / s)
            }
            Potential::RadialCustom(p) => {
                let r = r2.sqrt();
                if r == 0.0 {
                    d * (p.second_derivative)(0.0)
                } else {
                    (p.second_derivative)(r) + (d - 1.0) * (p.derivative)(r) / r
                }
            }
        }
    }
}

/// Parameters that fully specify a gas law.
#[derive(Debug, Clone)]
pub struct GasParameters {
    pub dim: Dimension,
    pub n: usize,
    pub beta: f64,
    pub potential: Potential,
    /// Restrict particles to the first coordinate axis (the potential is
    /// `+inf` elsewhere). Used for one-dimensional log-gases seen as planar
    /// Coulomb gases.
    pub line_constrained: bool,
}

impl GasParameters {
    pub fn new(dim: Dimension, n: usize, beta: f64, potential: Potential) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "particle count must be >= 1"));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(invalid("beta", format!("inverse temperature must be positive, got {beta}")));
        }
        potential.validate()?;
        Ok(GasParameters {
            dim,
            n,
            beta,
            potential,
            line_constrained: false,
        })
    }

    /// Planar gas with `V = |x|^2 / 2`.
    pub fn beta_ginibre(n: usize, beta: f64) -> Result<Self> {
        Self::new(Dimension::PLANE, n, beta, Potential::ginibre())
    }

    /// Planar spherical gas at `beta = 2`.
    pub fn spherical(n: usize) -> Result<Self> {
        Self::new(Dimension::PLANE, n, 2.0, Potential::spherical_for(n))
    }

    /// Real beta-Hermite gas: density proportional to
    /// `exp(-n beta/4 sum x_i^2) prod |x_i - x_j|^beta` on the real line.
    pub fn real_hermite(n: usize, beta: f64) -> Result<Self> {
        let mut p = Self::new(Dimension::PLANE, n, beta, Potential::Quadratic { gamma: 0.25 })?;
        p.line_constrained = true;
        Ok(p)
    }
}

/// One state of the gas: `n` points in R^d (flat storage) and the cached
/// value of `E_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    dim: usize,
    coords: Vec<f64>,
    energy: f64,
}

impl Configuration {
    /// Builds a configuration from flat coordinates and computes its energy.
    pub fn new(coords: Vec<f64>, params: &GasParameters) -> Result<Self> {
        let d = params.dim.get();
        if coords.len() != d * params.n {
            return Err(invalid(
                "coords",
                format!("expected {} values for n={} d={}, got {}", d * params.n, params.n, d, coords.len()),
            ));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(invalid("coords", "coordinates must be finite"));
        }
        let energy = energy_of(&coords, params)?;
        Ok(Configuration { dim: d, coords, energy })
    }

    pub fn from_points(points: &[Point], params: &GasParameters) -> Result<Self> {
        Self::new(points.iter().flatten().copied().collect(), params)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.coords.len() / self.dim
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Cached `E_n`.
    #[inline]
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Moves particle `i` and updates the cached energy by `delta`.
    pub(crate) fn apply_move(&mut self, i: usize, x_new: &[f64], delta: f64) {
        self.coords[i * self.dim..(i + 1) * self.dim].copy_from_slice(x_new);
        self.energy += delta;
    }

    /// Replaces every coordinate at once, with a freshly computed energy.
    pub(crate) fn replace(&mut self, coords: Vec<f64>, energy: f64) {
        self.coords = coords;
        self.energy = energy;
    }

    /// Recomputes the energy from scratch and returns the relative drift of
    /// the cached value.
    pub fn refresh_energy(&mut self, params: &GasParameters) -> Result<f64> {
        let fresh = energy_of(&self.coords, params)?;
        let drift = (fresh - self.energy).abs() / fresh.abs().max(1.0);
        self.energy = fresh;
        Ok(drift)
    }

    /// Sum of squared norms of the points.
    pub fn sum_sq(&self) -> f64 {
        norm_sq(&self.coords)
    }

    /// Coordinatewise sum of the points.
    pub fn sum(&self) -> Point {
        let mut s = vec![0.0; self.dim];
        for p in self.points() {
            for (acc, v) in s.iter_mut().zip(p) {
                *acc += v;
            }
        }
        s
    }
}

fn energy_of(coords: &[f64], params: &GasParameters) -> Result<f64> {
    let d = params.dim.get();
    let n = coords.len() / d;
    let v: f64 = coords.chunks_exact(d).map(|x| params.potential.value(x)).sum();
    let mut pair = 0.0;
    for i in 0..n {
        let xi = &coords[i * d..(i + 1) * d];
        for j in (i + 1)..n {
            let r2 = dist_sq(xi, &coords[j * d..(j + 1) * d]);
            if r2 == 0.0 {
                return Err(Error::Collision(i, j));
            }
            pair += g_from_sq(d, r2);
        }
    }
    Ok(n as f64 * v + pair)
}

/// `E_n` recomputed from the points of `cfg`, ignoring the cache.
pub fn energy_total(cfg: &Configuration, params: &GasParameters) -> Result<f64> {
    energy_of(&cfg.coords, params)
}

/// `E_n(cfg with x_i -> x_new) - E_n(cfg)` in O(n).
pub fn energy_delta(cfg: &Configuration, i: usize, x_new: &[f64], params: &GasParameters) -> Result<f64> {
    let d = cfg.dim;
    let n = cfg.n();
    if i >= n {
        return Err(invalid("i", format!("particle index {i} out of range for n={n}")));
    }
    if x_new.len() != d {
        return Err(invalid("x_new", format!("expected {d} coordinates, got {}", x_new.len())));
    }
    let x_old = cfg.point(i);
    let mut delta = n as f64 * (params.potential.value(x_new) - params.potential.value(x_old));
    for (j, xj) in cfg.points().enumerate() {
        if j == i {
            continue;
        }
        let r2_new = dist_sq(x_new, xj);
        if r2_new == 0.0 {
            return Err(Error::Collision(i, j));
        }
        delta += g_from_sq(d, r2_new) - g_from_sq(d, dist_sq(x_old, xj));
    }
    Ok(delta)
}

/// `grad E_n` as flat coordinates: component `i` is
/// `n grad V(x_i) + sum_{j != i} grad g(x_i - x_j)`.
pub fn gradient_energy(cfg: &Configuration, params: &GasParameters) -> Result<Vec<f64>> {
    gradient_of(&cfg.coords, params)
}

pub(crate) fn gradient_of(coords: &[f64], params: &GasParameters) -> Result<Vec<f64>> {
    let d = params.dim.get();
    let n = coords.len() / d;
    let nf = n as f64;
    let mut grad = vec![0.0; coords.len()];
    for (i, x) in coords.chunks_exact(d).enumerate() {
        let s = nf * params.potential.gradient_scale(norm_sq(x));
        for k in 0..d {
            grad[i * d + k] = s * x[k];
        }
    }
    let mut diff = vec![0.0; d];
    for i in 0..n {
        for j in (i + 1)..n {
            let mut r2 = 0.0;
            for k in 0..d {
                diff[k] = coords[i * d + k] - coords[j * d + k];
                r2 += diff[k] * diff[k];
            }
            if r2 == 0.0 {
                return Err(Error::Collision(i, j));
            }
            let s = grad_scale(d, r2);
            for k in 0..d {
                // grad g(x_i - x_j) = -(x_i - x_j)/|x_i - x_j|^d
                grad[i * d + k] -= diff[k] * s;
                grad[j * d + k] += diff[k] * s;
            }
        }
    }
    Ok(grad)
}
