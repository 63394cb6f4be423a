//! Adaptive Gauss–Kronrod integration on intervals and a polar rule for
//! integrals over the plane.

use crate::error::{Error, Result};
use std::collections::BinaryHeap;
use std::f64::consts::PI;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[a, b]` with globally adaptive bisection until the
/// estimated error is below `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature("infinite interval".into()));
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut heap = BinaryHeap::new();
    let first = gk15(&mut f, lo, hi);
    let mut total = first.value;
    let mut err = first.error;
    heap.push(first);
    const MAX_SEGMENTS: usize = 20_000;
    while err > abs_tol.max(rel_tol * total.abs()) {
        if heap.len() >= MAX_SEGMENTS {
            return Err(Error::Quadrature(format!(
                "error estimate {err:e} after {MAX_SEGMENTS} segments on [{lo}, {hi}]"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Quadrature("interval underflow".into()));
        }
        let left = gk15(&mut f, worst.a, mid);
        let right = gk15(&mut f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if !total.is_finite() {
            return Err(Error::Quadrature("non-finite integrand".into()));
        }
    }
    // re-sum to shed accumulated update error
    let total: f64 = heap.iter().map(|s| s.value).sum();
    Ok(sign * total)
}

/// Integrates `f(r, theta)` over the disc of radius `radius` in polar
/// coordinates: trapezoid in the angle (spectrally accurate for smooth
/// periodic integrands) and adaptive Gauss–Kronrod in the radius.
/// The Jacobian `r` is included.
pub fn integrate_polar<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    radius: f64,
    n_theta: usize,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    let h = 2.0 * PI / n_theta as f64;
    integrate(
        |r| {
            let s: f64 = (0..n_theta).map(|k| f(r, k as f64 * h)).sum();
            r * s * h
        },
        0.0,
        radius,
        abs_tol,
        rel_tol,
    )
}

/// Integral of a radial function `h(|x|)` over R^d up to `radius`.
pub fn integrate_radial<F: FnMut(f64) -> f64>(
    mut f: F,
    dim: usize,
    radius: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    let surface = crate::kernel::sphere_area(dim);
    integrate(|r| surface * r.powi(dim as i32 - 1) * f(r), 0.0, radius, abs_tol, rel_tol)
}
