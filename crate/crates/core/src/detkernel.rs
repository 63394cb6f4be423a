//! Exact determinantal quantities of the Ginibre gas (`beta = 2`, `V = |z|^2`).
//!
//! Unscaled functions use the kernel `K_n(z, w) = sqrt(g(z) g(w)) e_n(z conj(w))`
//! with `g(u) = exp(-|u|^2) / pi`. The `scaled_*` functions and
//! [`two_point_defect`] work at the `sqrt(n)` scale where the support is the
//! unit disc.

use crate::error::{invalid, Error, Result};
use crate::linalg::{determinant, ComplexMatrix};
use crate::special::{gamma_q, ln_factorial};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Holds the particle number `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelContext {
    n: usize,
}

impl KernelContext {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "must be >= 1"));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

#[derive(Default, Clone, Copy)]
struct Kahan {
    sum: Complex64,
    comp: Complex64,
}

impl Kahan {
    fn add(&mut self, x: Complex64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
}

/// `e_n(z) = sum_{l < n} z^l / l!`, with compensated summation.
pub fn truncated_exp(n: usize, z: Complex64) -> Complex64 {
    let mut acc = Kahan::default();
    let mut term = Complex64::new(1.0, 0.0);
    for l in 0..n {
        if l > 0 {
            term = term * z / l as f64;
        }
        acc.add(term);
    }
    acc.sum
}

/// `ln e_n(x)` for real `x >= 0`, summed relative to the largest term so
/// that nothing overflows.
pub fn ln_truncated_exp_real(n: usize, x: f64) -> f64 {
    if n == 0 {
        return f64::NEG_INFINITY;
    }
    if x == 0.0 {
        return 0.0;
    }
    let ln_x = x.ln();
    let peak = (x.floor() as usize).min(n - 1);
    let ln_peak = peak as f64 * ln_x - ln_factorial(peak as u64);
    // walk outward from the peak term in both directions
    let mut sum = 1.0;
    let mut comp = 0.0;
    let add = |v: f64, sum: &mut f64, comp: &mut f64| {
        let y = v - *comp;
        let t = *sum + y;
        *comp = (t - *sum) - y;
        *sum = t;
    };
    let mut t = 1.0;
    for l in (0..peak).rev() {
        t *= (l + 1) as f64 / x;
        add(t, &mut sum, &mut comp);
        if t < 1e-20 * sum {
            break;
        }
    }
    t = 1.0;
    for l in peak + 1..n {
        t *= x / l as f64;
        add(t, &mut sum, &mut comp);
        if t < 1e-20 * sum {
            break;
        }
    }
    ln_peak + sum.ln()
}

/// `|sum_{l >= n} w^l / l!|`, summed directly. Used where `|w| <= n`, so the
/// terms decrease.
pub fn exp_tail(n: usize, w: Complex64) -> f64 {
    let mut term = Complex64::new(1.0, 0.0);
    for l in 1..=n {
        term = term * w / l as f64;
    }
    // term is now w^n / n!
    let mut acc = Kahan::default();
    let mut l = n;
    loop {
        acc.add(term);
        l += 1;
        term = term * w / l as f64;
        if term.norm() <= 1e-18 * acc.sum.norm() || term.norm() == 0.0 || l > n + 100_000 {
            break;
        }
    }
    acc.sum.norm()
}

/// `ln r_n(z)`; `-inf` at `z = 0`.
pub fn log_remainder_bound(n: usize, z: Complex64) -> f64 {
    let nf = n as f64;
    let r = z.norm();
    if r == 0.0 {
        return f64::NEG_INFINITY;
    }
    let factor = if r <= 1.0 {
        (nf + 1.0) / (nf * (1.0 - r) + 1.0)
    } else {
        nf / (nf * (r - 1.0) + 1.0)
    };
    nf + nf * r.ln() - 0.5 * (2.0 * PI * nf).ln() + factor.ln()
}

/// `r_n(z)`, the error bound for `|e_n(nz) - e^{nz} 1_{|z| <= 1}|`.
pub fn remainder_bound(n: usize, z: Complex64) -> f64 {
    log_remainder_bound(n, z).exp()
}

/// Left side of the exponential-series bound: `|e_n(nz) - e^{nz}|` inside
/// the closed unit disc (computed as the series tail), `|e_n(nz)|` outside.
pub fn remainder_lhs(n: usize, z: Complex64) -> f64 {
    let w = z * n as f64;
    if z.norm() <= 1.0 {
        exp_tail(n, w)
    } else {
        truncated_exp(n, w).norm()
    }
}

/// `K_n(z, w)`.
pub fn kernel_k(ctx: &KernelContext, z: Complex64, w: Complex64) -> Complex64 {
    let scale = (-(z.norm_sqr() + w.norm_sqr()) / 2.0).exp() / PI;
    truncated_exp(ctx.n, z * w.conj()) * scale
}

/// `K_n(z, z) = exp(-|z|^2) e_n(|z|^2) / pi` (real, log-space).
pub fn kernel_diag(ctx: &KernelContext, z: Complex64) -> f64 {
    let x = z.norm_sqr();
    (ln_truncated_exp_real(ctx.n, x) - x).exp() / PI
}

/// Threshold below which a negative determinant is treated as round-off.
pub const NEGATIVE_CLAMP: f64 = 1e-12;

/// Density of `k` of the `n` unordered particles:
/// `((n-k)!/n!) det[K_n(z_i, z_j)]`.
pub fn density_kpoint(ctx: &KernelContext, points: &[Complex64]) -> Result<f64> {
    let k = points.len();
    if k == 0 || k > ctx.n {
        return Err(invalid("points", format!("need 1 <= k <= n = {}, got {k}", ctx.n)));
    }
    let m = ComplexMatrix::from_fn(k, k, |i, j| {
        if i == j {
            Complex64::new(kernel_diag(ctx, points[i]), 0.0)
        } else {
            kernel_k(ctx, points[i], points[j])
        }
    });
    let det = determinant(&m)?.re;
    let norm = (ln_factorial((ctx.n - k) as u64) - ln_factorial(ctx.n as u64)).exp();
    let value = norm * det;
    if value < -NEGATIVE_CLAMP {
        return Err(Error::NegativeDensity(value));
    }
    Ok(value.max(0.0))
}

/// Joint density from the product form:
/// `prod g(z_k) / prod_{k=1}^n k! * prod_{i<j} |z_i - z_j|^2`.
pub fn joint_density_product(points: &[Complex64]) -> f64 {
    let n = points.len();
    let mut ln = 0.0;
    for (i, z) in points.iter().enumerate() {
        ln += -z.norm_sqr() - PI.ln() - ln_factorial(i as u64 + 1);
        for w in &points[i + 1..] {
            let d = (z - w).norm_sqr();
            if d == 0.0 {
                return 0.0;
            }
            ln += d.ln();
        }
    }
    if n == 0 {
        return 1.0;
    }
    ln.exp()
}

/// `n phi_{n,1}(sqrt(n) z) = exp(-n|z|^2) e_n(n|z|^2) / pi`.
pub fn scaled_one_point(ctx: &KernelContext, z: Complex64) -> f64 {
    let x = ctx.n as f64 * z.norm_sqr();
    (ln_truncated_exp_real(ctx.n, x) - x).exp() / PI
}

/// `Delta_n(z1, z2) = phi^{n,2}(z1, z2) - phi^{n,1}(z1) phi^{n,1}(z2)` at the
/// `sqrt(n)` scale.
pub fn two_point_defect(ctx: &KernelContext, z1: Complex64, z2: Complex64) -> Result<f64> {
    if ctx.n < 2 {
        return Err(invalid("n", "two-point defect needs n >= 2"));
    }
    let nf = ctx.n as f64;
    let p1 = scaled_one_point(ctx, z1);
    let p2 = scaled_one_point(ctx, z2);
    let cross = truncated_exp(ctx.n, z1 * z2.conj() * nf).norm();
    let weight = (-nf * (z1.norm_sqr() + z2.norm_sqr()) / 2.0).exp();
    let k12 = weight * cross / PI;
    Ok(p1 * p2 / (nf - 1.0) - nf / (nf - 1.0) * k12 * k12)
}

/// Both sides of the incomplete-gamma / Poisson identity:
/// `(Q(n, r), exp(-r) sum_{l<n} r^l / l!)`.
pub fn gamma_poisson_tail(n: usize, r: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(invalid("n", "must be >= 1"));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(invalid("r", format!("must be positive and finite, got {r}")));
    }
    let q = gamma_q(n as f64, r)?;
    let mut term = (-r).exp();
    let mut sum = term;
    for l in 1..n {
        term *= r / l as f64;
        sum += term;
    }
    Ok((q, sum))
}

/// Radius beyond which `K_n(z, z)` has less than `tol` mass.
pub fn integration_radius(n: usize, tol: f64) -> f64 {
    let mut r = (n as f64).sqrt() + 1.0;
    while gamma_q(n as f64, r * r).map_or(true, |q| q > tol) && r < 1e3 {
        r += 0.5;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_polar;
    use crate::special::gamma_q;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn truncated_exp_small_cases() {
        assert_eq!(truncated_exp(1, c(7.0, -3.0)), c(1.0, 0.0));
        assert_eq!(truncated_exp(2, c(3.0, 0.0)), c(4.0, 0.0));
        let z = c(0.3, 0.4);
        let e = truncated_exp(60, z);
        assert!((e - z.exp()).norm() < 1e-15);
    }

    #[test]
    fn truncated_exp_against_incomplete_gamma() {
        let direct = truncated_exp(50, c(10.0, 0.0)).re;
        let oracle = 10f64.exp() * gamma_q(50.0, 10.0).unwrap();
        assert!((direct / oracle - 1.0).abs() < 1e-10);
        for &(n, x) in &[(50, 10.0), (300, 250.0), (1000, 640.0), (1000, 1690.0), (7, 0.01)] {
            let ln = ln_truncated_exp_real(n, x);
            let oracle = x + gamma_q(n as f64, x).unwrap().ln();
            assert!((ln - oracle).abs() < 1e-10 * oracle.abs().max(1.0), "n={n} x={x}");
        }
    }

    #[test]
    fn remainder_bound_log_form() {
        assert_eq!(remainder_bound(5, c(0.0, 0.0)), 0.0);
        let n = 10.0f64;
        let expected = n + n * 0.5f64.ln() - 0.5 * (2.0 * PI * n).ln() + ((n + 1.0) / (n * 0.5 + 1.0)).ln();
        let got = log_remainder_bound(10, Complex64::from_polar(0.5, 1.1));
        assert!((got - expected).abs() < 1e-13);
        assert!(got.is_finite());
    }

    #[test]
    fn exp_tail_is_complement() {
        let n = 12;
        let z = c(0.4, -0.7);
        let w = z * n as f64;
        let tail = exp_tail(n, w);
        assert!((tail - (w.exp() - truncated_exp(n, w)).norm()).abs() < 1e-12 * w.exp().norm());
        assert_eq!(exp_tail(3, c(0.0, 0.0)), 0.0);
    }

    #[test]
    fn kernel_at_origin() {
        for n in [1, 3, 40] {
            let ctx = KernelContext::new(n).unwrap();
            assert!((kernel_k(&ctx, c(0.0, 0.0), c(0.0, 0.0)).re - 1.0 / PI).abs() < 1e-16);
            let z = c(0.7, -1.2);
            assert!((kernel_k(&ctx, z, z).re - kernel_diag(&ctx, z)).abs() < 1e-14);
        }
        assert!(KernelContext::new(0).is_err());
    }

    #[test]
    fn kernel_is_hermitian() {
        let ctx = KernelContext::new(6).unwrap();
        let (z, w) = (c(0.3, 1.1), c(-0.8, 0.25));
        assert!((kernel_k(&ctx, z, w) - kernel_k(&ctx, w, z).conj()).norm() < 1e-15);
    }

    #[test]
    fn diagonal_integrates_to_n() {
        for n in [1, 2, 5] {
            let ctx = KernelContext::new(n).unwrap();
            let radius = integration_radius(n, 1e-18);
            let total = integrate_polar(|r, t| kernel_diag(&ctx, Complex64::from_polar(r, t)), radius, 64, 1e-11, 1e-11).unwrap();
            assert!((total - n as f64).abs() < 1e-6, "n={n}: {total}");
        }
    }

    #[test]
    fn reproducing_property() {
        let ctx = KernelContext::new(4).unwrap();
        let (x, z) = (c(0.3, 0.0), c(0.1, -0.2));
        let radius = integration_radius(4, 1e-18) + 1.0;
        let part = |re: bool| {
            integrate_polar(
                |r, t| {
                    let y = Complex64::from_polar(r, t);
                    let v = kernel_k(&ctx, x, y) * kernel_k(&ctx, y, z);
                    if re { v.re } else { v.im }
                },
                radius,
                96,
                1e-11,
                1e-11,
            )
            .unwrap()
        };
        let got = c(part(true), part(false));
        assert!((got - kernel_k(&ctx, x, z)).norm() < 1e-6);
    }

    #[test]
    fn one_point_density_examples() {
        let ctx = KernelContext::new(4).unwrap();
        let v = density_kpoint(&ctx, &[c(0.0, 0.0)]).unwrap();
        assert!((v - 1.0 / (4.0 * PI)).abs() < 1e-15);
        let one = KernelContext::new(1).unwrap();
        assert!((scaled_one_point(&one, c(0.0, 0.0)) - 1.0 / PI).abs() < 1e-16);
    }

    #[test]
    fn coincident_points_repel() {
        let ctx = KernelContext::new(5).unwrap();
        let z = c(0.4, -0.3);
        assert!(density_kpoint(&ctx, &[z, z]).unwrap().abs() <= 1e-15);
        let d = two_point_defect(&ctx, z, z).unwrap();
        let p = scaled_one_point(&ctx, z);
        assert!((d + p * p).abs() < 1e-14);
    }

    #[test]
    fn full_density_matches_product_form() {
        let ctx = KernelContext::new(2).unwrap();
        let direct = density_kpoint(&ctx, &[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let oracle = (1.0 / PI) * ((-1.0f64).exp() / PI) / 2.0;
        assert!((direct - oracle).abs() < 1e-15);
        assert!((joint_density_product(&[c(0.0, 0.0), c(1.0, 0.0)]) - oracle).abs() < 1e-15);
    }

    #[test]
    fn kpoint_rejects_bad_k() {
        let ctx = KernelContext::new(2).unwrap();
        assert!(density_kpoint(&ctx, &[]).is_err());
        assert!(density_kpoint(&ctx, &[c(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn gamma_poisson_hand_values() {
        let (a, b) = gamma_poisson_tail(1, 2.0).unwrap();
        assert!((a - (-2f64).exp()).abs() < 1e-15 && (b - (-2f64).exp()).abs() < 1e-15);
        let (a, b) = gamma_poisson_tail(3, 1.0).unwrap();
        let hand = 2.5 * (-1f64).exp();
        assert!((a - hand).abs() < 1e-14 && (b - hand).abs() < 1e-15);
        assert!(gamma_poisson_tail(0, 1.0).is_err());
        assert!(gamma_poisson_tail(3, 0.0).is_err());
    }

    #[test]
    fn defect_needs_two_particles() {
        let ctx = KernelContext::new(1).unwrap();
        assert!(two_point_defect(&ctx, c(0.0, 0.0), c(0.5, 0.0)).is_err());
    }
}
