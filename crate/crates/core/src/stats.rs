//! Empirical measures, goodness-of-fit tests and the CLT variance functional.

use crate::equilibrium::EquilibriumMeasure;
use crate::error::{invalid, Error, Result};
use crate::exactlaws::DistributionSpec;
use crate::kernel::{Configuration, Point};
use crate::quadrature::{integrate, integrate_polar};
use crate::rmt::SpectrumSample;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Minimum sample size accepted by the KS tests.
pub const MIN_SAMPLES: usize = 8;

/// Uniform probability measure on a finite point set.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    points: Vec<Point>,
}

impl EmpiricalMeasure {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("points", "empirical measure needs at least one point"));
        }
        let d = points[0].len();
        if points.iter().any(|p| p.len() != d) {
            return Err(invalid("points", "mixed dimensions"));
        }
        Ok(Self { points })
    }

    pub fn from_configuration(cfg: &Configuration) -> Self {
        Self { points: cfg.points().map(<[f64]>::to_vec).collect() }
    }

    pub fn from_spectrum(s: &SpectrumSample) -> Self {
        Self { points: s.eigenvalues.iter().map(|z| vec![z.re, z.im]).collect() }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.points.len() as f64
    }

    pub fn radii(&self) -> Vec<f64> {
        self.points.iter().map(|p| norm(p)).collect()
    }

    /// `int f dmu_n`.
    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.points.iter().map(|p| f(p)).sum::<f64>() * self.weight()
    }
}

fn norm(p: &[f64]) -> f64 {
    p.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GofTest {
    Ks,
    W1,
}

impl fmt::Display for GofTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GofTest::Ks => "KS",
            GofTest::W1 => "W1",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GofReport {
    pub test: GofTest,
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub n_samples: usize,
    pub oracle: String,
}

impl GofReport {
    /// `p_value > level`; W1 reports (no p-value) never pass by this rule.
    pub fn passes(&self, level: f64) -> bool {
        self.p_value.is_some_and(|p| p > level)
    }
}

/// Survival function `P(K > t)` of the Kolmogorov distribution.
pub fn kolmogorov_sf(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if t < 1.0 {
        // theta-function form, fast for small t
        let a = PI * PI / (8.0 * t * t);
        let mut cdf = 0.0;
        for k in 1..100 {
            let j = (2 * k - 1) as f64;
            let term = (-j * j * a).exp();
            cdf += term;
            if term < 1e-16 {
                break;
            }
        }
        cdf *= (2.0 * PI).sqrt() / t;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut sf = 0.0;
    let mut sign = 1.0;
    for k in 1..100 {
        let kf = k as f64;
        let term = 2.0 * (-2.0 * kf * kf * t * t).exp();
        sf += sign * term;
        if term < 1e-12 {
            break;
        }
        sign = -sign;
    }
    sf.clamp(0.0, 1.0)
}

fn sorted_finite(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples { needed: MIN_SAMPLES, got: samples.len() });
    }
    if let Some(bad) = samples.iter().find(|v| v.is_nan()) {
        return Err(invalid("samples", format!("contains {bad}")));
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// `sup |F_emp - F|` for sorted samples.
fn ks_sorted(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    d
}

/// One-sample KS distance against an arbitrary continuous CDF.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    Ok(ks_sorted(&sorted_finite(samples)?, cdf))
}

/// One-sample KS test against a continuous CDF described by `oracle`.
pub fn ks_test_cdf(samples: &[f64], cdf: impl Fn(f64) -> f64, oracle: &str) -> Result<GofReport> {
    let d = ks_distance(samples, cdf)?;
    let n = samples.len();
    Ok(GofReport {
        test: GofTest::Ks,
        statistic: d,
        p_value: Some(kolmogorov_sf(d * (n as f64).sqrt())),
        n_samples: n,
        oracle: oracle.to_string(),
    })
}

/// One-sample KS test against an analytic law.
pub fn ks_test(samples: &[f64], spec: &DistributionSpec) -> Result<GofReport> {
    ks_test_cdf(samples, |x| spec.cdf(x), &format!("{spec:?}"))
}

/// Two-sample KS test with effective size `n1 n2 / (n1 + n2)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<GofReport> {
    let a = sorted_finite(a)?;
    let b = sorted_finite(b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let eff = na * nb / (na + nb);
    Ok(GofReport {
        test: GofTest::Ks,
        statistic: d,
        p_value: Some(kolmogorov_sf(d * eff.sqrt())),
        n_samples: a.len() + b.len(),
        oracle: "two-sample".into(),
    })
}

/// KS of the angles `arg(z) / 2pi` of planar points against Uniform(0, 1).
pub fn angular_uniformity(samples: &[Point]) -> Result<GofReport> {
    let mut angles = Vec::with_capacity(samples.len());
    for p in samples {
        if p.len() != 2 {
            return Err(invalid("samples", "angular uniformity needs planar points"));
        }
        if p[0] == 0.0 && p[1] == 0.0 {
            return Err(invalid("samples", "point at the origin has no angle"));
        }
        angles.push((p[1].atan2(p[0]) / (2.0 * PI)).rem_euclid(1.0));
    }
    ks_test(&angles, &DistributionSpec::uniform(0.0, 1.0)?)
}

/// KS of the third coordinate of points on the unit sphere against
/// Uniform(-1, 1).
pub fn sphere_z_uniformity(points: &[[f64; 3]]) -> Result<GofReport> {
    for p in points {
        let r = norm(p);
        if (r - 1.0).abs() > 1e-9 {
            return Err(invalid("points", format!("not on the unit sphere (norm {r})")));
        }
    }
    let z: Vec<f64> = points.iter().map(|p| p[2]).collect();
    ks_test(&z, &DistributionSpec::uniform(-1.0, 1.0)?)
}

/// `W_1` between the empirical law of `|x|` over `samples` and the radial
/// law of `m`.
pub fn w1_radial(samples: &[Point], m: &EquilibriumMeasure) -> Result<f64> {
    let radii: Vec<f64> = samples.iter().map(|p| norm(p)).collect();
    w1_radial_radii(&radii, m)
}

/// `W_1 = int_0^inf |F_emp(r) - F(r)| dr`, integrated segment by segment
/// between consecutive order statistics.
pub fn w1_radial_radii(radii: &[f64], m: &EquilibriumMeasure) -> Result<f64> {
    if !m.is_radial() {
        return Err(invalid("m", "w1_radial needs a rotationally invariant measure"));
    }
    if radii.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    if radii.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
        return Err(invalid("radii", "must be finite and nonnegative"));
    }
    let mut r = radii.to_vec();
    r.sort_by(f64::total_cmp);
    let n = r.len() as f64;
    let hi = m.support_radius();
    let cdf = |x: f64| m.radial_cdf(x);
    // int_a^b F, split at the support edge
    let int_f = |a: f64, b: f64| -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        let top = b.min(hi);
        let inner = if top > a { integrate(cdf, a, top, 1e-15, 1e-13)? } else { 0.0 };
        Ok(inner + (b - a.max(top)).max(0.0))
    };
    let mut total = 0.0;
    let mut prev = 0.0;
    for (i, &x) in r.iter().enumerate() {
        let c = i as f64 / n;
        if x > prev {
            total += abs_gap(c, prev, x, m, &int_f)?;
        }
        prev = x;
    }
    // last level: int_{r_max}^inf (1 - F)
    if hi.is_finite() {
        if hi > prev {
            total += (hi - prev) - int_f(prev, hi)?;
        }
    } else {
        let b0 = prev.max(m.scale());
        total += (b0 - prev) - int_f(prev, b0)?;
        total += integrate(|t| if t == 0.0 { 0.0 } else { (1.0 - cdf(b0 / t)) * b0 / (t * t) }, 0.0, 1.0, 1e-14, 1e-12)?;
    }
    Ok(total)
}

fn abs_gap(
    c: f64,
    a: f64,
    b: f64,
    m: &EquilibriumMeasure,
    int_f: &impl Fn(f64, f64) -> Result<f64>,
) -> Result<f64> {
    let q = if c <= 0.0 { 0.0 } else { m.radial_quantile(c) };
    let s = q.clamp(a, b);
    let below = c * (s - a) - int_f(a, s)?;
    let above = int_f(s, b)? - c * (b - s);
    Ok(below.max(0.0) + above.max(0.0))
}

/// `W_1` between two empirical laws on the line: `int |F_a - F_b|`.
pub fn w1_empirical(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(invalid("samples", "must be finite"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut x = a[0].min(b[0]);
    let mut total = 0.0;
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&u), Some(&v)) => u.min(v),
            (Some(&u), None) => u,
            (None, Some(&v)) => v,
            (None, None) => unreachable!(),
        };
        total += (next - x) * (i as f64 / na - j as f64 / nb).abs();
        x = next;
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
    }
    Ok(total)
}

/// W1 report wrapper around [`w1_radial`].
pub fn w1_report(samples: &[Point], m: &EquilibriumMeasure) -> Result<GofReport> {
    Ok(GofReport {
        test: GofTest::W1,
        statistic: w1_radial(samples, m)?,
        p_value: None,
        n_samples: samples.len(),
        oracle: format!("{:?}", m.label()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HarmonicPart {
    Re,
    Im,
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real test function on the plane.
#[derive(Clone)]
pub enum TestFunction {
    /// `h(|z|)` with derivative `dh`.
    Radial { h: RealFn, dh: RealFn },
    /// Real or imaginary part of `z^k`.
    Harmonic { k: u32, part: HarmonicPart },
    /// `sum c x^i y^j` over `(i, j, c)`.
    BivariatePolynomial(Vec<(u32, u32, f64)>),
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Radial { .. } => f.write_str("Radial(..)"),
            TestFunction::Harmonic { k, part } => write!(f, "Harmonic({part:?} z^{k})"),
            TestFunction::BivariatePolynomial(c) => write!(f, "BivariatePolynomial({c:?})"),
        }
    }
}

impl TestFunction {
    pub fn radial(
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dh: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        TestFunction::Radial { h: Arc::new(h), dh: Arc::new(dh) }
    }

    /// `|z|^2`.
    pub fn modulus_squared() -> Self {
        Self::radial(|r| r * r, |r| 2.0 * r)
    }

    pub fn re_power(k: u32) -> Self {
        TestFunction::Harmonic { k, part: HarmonicPart::Re }
    }

    pub fn im_power(k: u32) -> Self {
        TestFunction::Harmonic { k, part: HarmonicPart::Im }
    }

    pub fn constant(c: f64) -> Self {
        TestFunction::BivariatePolynomial(vec![(0, 0, c)])
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        match self {
            TestFunction::Radial { h, .. } => h(z.norm()),
            TestFunction::Harmonic { k, part } => {
                let w = z.powu(*k);
                match part {
                    HarmonicPart::Re => w.re,
                    HarmonicPart::Im => w.im,
                }
            }
            TestFunction::BivariatePolynomial(c) => {
                c.iter().map(|&(i, j, a)| a * z.re.powi(i as i32) * z.im.powi(j as i32)).sum()
            }
        }
    }

    /// `(df/dx, df/dy)`.
    pub fn gradient(&self, z: Complex64) -> [f64; 2] {
        match self {
            TestFunction::Radial { dh, .. } => {
                let r = z.norm();
                if r == 0.0 {
                    return [0.0, 0.0];
                }
                let s = dh(r) / r;
                [s * z.re, s * z.im]
            }
            TestFunction::Harmonic { k, part } => {
                if *k == 0 {
                    return [0.0, 0.0];
                }
                let dw = z.powu(k - 1) * *k as f64;
                match part {
                    HarmonicPart::Re => [dw.re, -dw.im],
                    HarmonicPart::Im => [dw.im, dw.re],
                }
            }
            TestFunction::BivariatePolynomial(c) => {
                let mut g = [0.0, 0.0];
                for &(i, j, a) in c {
                    if i > 0 {
                        g[0] += a * i as f64 * z.re.powi(i as i32 - 1) * z.im.powi(j as i32);
                    }
                    if j > 0 {
                        g[1] += a * j as f64 * z.re.powi(i as i32) * z.im.powi(j as i32 - 1);
                    }
                }
                g
            }
        }
    }
}

/// Angular nodes for the disc integral and circle nodes / maximal mode for
/// the boundary Fourier sum.
pub const CLT_DISC_NODES: usize = 128;
pub const CLT_CIRCLE_NODES: usize = 4096;
pub const CLT_MAX_MODE: i64 = 64;

/// The two terms of the limiting variance:
/// `((1/4pi) int_D |grad f|^2, (1/2) sum_k |k| |f_k|^2)`.
pub fn clt_variance_terms(f: &TestFunction) -> Result<(f64, f64)> {
    let dirichlet = integrate_polar(
        |r, t| {
            let g = f.gradient(Complex64::from_polar(r, t));
            g[0] * g[0] + g[1] * g[1]
        },
        1.0,
        CLT_DISC_NODES,
        1e-13,
        1e-12,
    )?;
    let values: Vec<f64> = (0..CLT_CIRCLE_NODES)
        .map(|j| f.eval(Complex64::from_polar(1.0, 2.0 * PI * j as f64 / CLT_CIRCLE_NODES as f64)))
        .collect();
    let mut half = 0.0;
    for k in 1..=CLT_MAX_MODE {
        let mut c = Complex64::new(0.0, 0.0);
        for (j, v) in values.iter().enumerate() {
            let theta = 2.0 * PI * (k as f64) * j as f64 / CLT_CIRCLE_NODES as f64;
            c += Complex64::from_polar(*v, -theta);
        }
        c /= CLT_CIRCLE_NODES as f64;
        // f real, so |f_{-k}| = |f_k|
        half += 2.0 * k as f64 * c.norm_sqr();
    }
    Ok((dirichlet / (4.0 * PI), 0.5 * half))
}

/// Limiting variance of `sum f(lambda_k / sqrt(n))` for the Ginibre
/// ensemble.
pub fn clt_variance(f: &TestFunction) -> Result<f64> {
    let (a, b) = clt_variance_terms(f)?;
    Ok(a + b)
}

/// `sum f(z)` over already-scaled points.
pub fn linear_statistic_points(points: impl IntoIterator<Item = Complex64>, f: &TestFunction) -> f64 {
    points.into_iter().map(|z| f.eval(z)).sum()
}

/// One value of `sum_k f(lambda_k)` per spectrum.
pub fn linear_statistic(samples: &[SpectrumSample], f: &TestFunction) -> Vec<f64> {
    samples.iter().map(|s| linear_statistic_points(s.eigenvalues.iter().copied(), f)).collect()
}

/// One value of `sum_i f(x_i)` per planar configuration.
pub fn linear_statistic_configs(samples: &[Configuration], f: &TestFunction) -> Result<Vec<f64>> {
    samples
        .iter()
        .map(|c| {
            if c.dim() != 2 {
                return Err(invalid("samples", "test functions live on the plane"));
            }
            Ok(linear_statistic_points(c.points().map(|p| Complex64::new(p[0], p[1])), f))
        })
        .collect()
}

/// Sample mean and unbiased variance.
pub fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Median (NaN-free input assumed).
pub fn median(x: &[f64]) -> f64 {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// `true` when every element is strictly below its predecessor.
pub fn strictly_decreasing(x: &[f64]) -> bool {
    x.windows(2).all(|w| w[1] < w[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{equilibrium_for, EquilibriumLabel};
    use crate::rng_from_seed;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn kolmogorov_branches_agree() {
        // both series are valid at t = 1
        let t: f64 = 1.0;
        let a = PI * PI / (8.0 * t * t);
        let theta: f64 = (1..20).map(|k| (-((2 * k - 1) as f64).powi(2) * a).exp()).sum::<f64>() * (2.0 * PI).sqrt() / t;
        assert!((1.0 - theta - kolmogorov_sf(t)).abs() < 1e-12);
        assert!((kolmogorov_sf(1.3580986) - 0.05).abs() < 1e-5);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
        assert!(kolmogorov_sf(0.2) > 0.999_99);
    }

    #[test]
    fn ks_constant_sample() {
        let spec = DistributionSpec::normal(0.0, 1.0).unwrap();
        let r = ks_test(&[0.3; 20], &spec).unwrap();
        let f = spec.cdf(0.3);
        assert!((r.statistic - f.max(1.0 - f)).abs() < 1e-15);
    }

    #[test]
    fn ks_calibration_and_power() {
        let spec = DistributionSpec::normal(0.0, 1.0).unwrap();
        let mut rng = rng_from_seed(11);
        let mut rejections = 0;
        for _ in 0..200 {
            let x: Vec<f64> = (0..200).map(|_| spec.sample(&mut rng)).collect();
            if ks_test(&x, &spec).unwrap().p_value.unwrap() < 0.05 {
                rejections += 1;
            }
        }
        let frac = rejections as f64 / 200.0;
        assert!((0.01..=0.12).contains(&frac), "{frac}");
        let shifted: Vec<f64> = (0..10_000).map(|_| 1.0 + spec.sample(&mut rng)).collect();
        assert!(ks_test(&shifted, &spec).unwrap().p_value.unwrap() < 1e-6);
    }

    #[test]
    fn ks_errors() {
        let spec = DistributionSpec::normal(0.0, 1.0).unwrap();
        assert!(matches!(ks_test(&[0.0; 7], &spec), Err(Error::TooFewSamples { .. })));
        assert!(ks_test(&[f64::NAN; 10], &spec).is_err());
    }

    #[test]
    fn two_sample_symmetry_and_ties() {
        let mut rng = rng_from_seed(3);
        let a: Vec<f64> = (0..50).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = (0..80).map(|_| rng.random::<f64>().powi(2)).collect();
        assert_eq!(ks_two_sample(&a, &b).unwrap().statistic, ks_two_sample(&b, &a).unwrap().statistic);
        let same = ks_two_sample(&a, &a).unwrap();
        assert_eq!(same.statistic, 0.0);
        let c = vec![1.0; 10];
        let d = vec![2.0; 10];
        assert_eq!(ks_two_sample(&c, &d).unwrap().statistic, 1.0);
    }

    #[test]
    fn w1_hand_values() {
        let disc = equilibrium_for(EquilibriumLabel::UniformDisc).unwrap();
        let zeros = vec![vec![0.0, 0.0]; 10];
        assert!((w1_radial(&zeros, &disc).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        // all at radius 1: int_0^1 r^2 dr
        let ones = vec![vec![1.0, 0.0]; 4];
        assert!((w1_radial(&ones, &disc).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let heavy = equilibrium_for(EquilibriumLabel::SphericalHeavyTail).unwrap();
        // int_0^inf (1 - r^2/(1+r^2)) dr = pi/2
        assert!((w1_radial(&zeros, &heavy).unwrap() - PI / 2.0).abs() < 1e-9);
    }

    #[test]
    fn w1_of_quantile_atoms_is_small() {
        let disc = equilibrium_for(EquilibriumLabel::UniformDisc).unwrap();
        let n = 1000;
        let radii: Vec<f64> = (0..n).map(|i| disc.radial_quantile((i as f64 + 0.5) / n as f64)).collect();
        let w = w1_radial_radii(&radii, &disc).unwrap();
        assert!(w >= 0.0 && w < 1e-3, "{w}");
    }

    #[test]
    fn w1_monte_carlo_scale() {
        let disc = equilibrium_for(EquilibriumLabel::UniformDisc).unwrap();
        let pts = disc.sample(10_000, &mut rng_from_seed(8));
        assert!(w1_radial(&pts, &disc).unwrap() <= 0.02);
    }

    #[test]
    fn w1_empirical_values() {
        assert_eq!(w1_empirical(&[0.0, 1.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert!((w1_empirical(&[0.0], &[2.5]).unwrap() - 2.5).abs() < 1e-15);
        assert!((w1_empirical(&[0.0, 1.0], &[0.5]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn w1_rejects_segment_measures() {
        let sc = equilibrium_for(EquilibriumLabel::Semicircle).unwrap();
        assert!(w1_radial(&[vec![0.1]], &sc).is_err());
    }

    #[test]
    fn angular_checks() {
        let mut rng = rng_from_seed(21);
        let pts: Vec<Point> = (0..2000)
            .map(|_| vec![StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)])
            .collect();
        assert!(angular_uniformity(&pts).unwrap().p_value.unwrap() > 0.01);
        let axis: Vec<Point> = (1..=100).map(|k| vec![k as f64, 0.0]).collect();
        assert!(angular_uniformity(&axis).unwrap().p_value.unwrap() < 1e-6);
        assert!(angular_uniformity(&vec![vec![0.0, 0.0]; 10]).is_err());
    }

    #[test]
    fn sphere_checks() {
        let mut rng = rng_from_seed(22);
        let pts: Vec<[f64; 3]> = (0..2000)
            .map(|_| {
                let v: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
                let r = norm(&v);
                [v[0] / r, v[1] / r, v[2] / r]
            })
            .collect();
        assert!(sphere_z_uniformity(&pts).unwrap().p_value.unwrap() > 0.01);
        assert!(sphere_z_uniformity(&[[0.0, 0.0, 1.0]; 50]).unwrap().p_value.unwrap() < 1e-6);
        assert!(sphere_z_uniformity(&[[0.0, 0.0, 2.0]; 50]).is_err());
    }

    #[test]
    fn test_function_gradients() {
        let fs = [
            TestFunction::modulus_squared(),
            TestFunction::radial(|r| (r * r).sin(), |r| 2.0 * r * (r * r).cos()),
            TestFunction::re_power(3),
            TestFunction::im_power(4),
            TestFunction::BivariatePolynomial(vec![(2, 1, 1.5), (0, 3, -0.5), (1, 0, 2.0)]),
        ];
        let h = 1e-6;
        for f in &fs {
            for &(x, y) in &[(0.3, -0.4), (0.9, 0.1), (-0.2, 0.7)] {
                let z = Complex64::new(x, y);
                let g = f.gradient(z);
                let gx = (f.eval(z + h) - f.eval(z - h)) / (2.0 * h);
                let gy = (f.eval(z + Complex64::new(0.0, h)) - f.eval(z - Complex64::new(0.0, h))) / (2.0 * h);
                assert!((g[0] - gx).abs() < 1e-6 && (g[1] - gy).abs() < 1e-6, "{f:?}");
            }
        }
    }

    #[test]
    fn clt_reference_values() {
        assert!((clt_variance(&TestFunction::re_power(1)).unwrap() - 0.5).abs() < 1e-8);
        assert!((clt_variance(&TestFunction::modulus_squared()).unwrap() - 0.5).abs() < 1e-8);
        assert!(clt_variance(&TestFunction::constant(3.0)).unwrap().abs() < 1e-12);
        for k in 1..=8 {
            let (_, half) = clt_variance_terms(&TestFunction::re_power(k)).unwrap();
            assert!((half - k as f64 / 4.0).abs() < 1e-8, "k={k}: {half}");
        }
    }

    #[test]
    fn clt_constant_shift_and_radial_boundary() {
        let f = TestFunction::BivariatePolynomial(vec![(2, 0, 1.0), (1, 1, 0.5)]);
        let g = TestFunction::BivariatePolynomial(vec![(2, 0, 1.0), (1, 1, 0.5), (0, 0, 7.0)]);
        assert!((clt_variance(&f).unwrap() - clt_variance(&g).unwrap()).abs() < 1e-12);
        let (_, half) = clt_variance_terms(&TestFunction::radial(|r| r.powi(4), |r| 4.0 * r.powi(3))).unwrap();
        assert!(half <= 1e-10);
    }

    #[test]
    fn linear_statistic_of_one_counts() {
        let s = SpectrumSample { eigenvalues: vec![Complex64::new(0.1, 0.2); 7], scaling: 1.0 };
        assert_eq!(linear_statistic(&[s], &TestFunction::constant(1.0)), vec![7.0]);
    }

    #[test]
    fn helpers() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(strictly_decreasing(&[3.0, 2.0, 1.0]));
        assert!(!strictly_decreasing(&[3.0, 3.0]));
        let (m, v) = mean_var(&[1.0, 2.0, 3.0]);
        assert_eq!((m, v), (2.0, 1.0));
    }
}
