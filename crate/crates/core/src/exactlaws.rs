//! Reference distributions and the exact laws of linear statistics.
//!
//! Contains the Gamma/Gaussian laws of `sum V(X_i)` and `sum X_i` for
//! homogeneous interactions, their beta-Ginibre and real-Hermite
//! specializations, Kostlan's independent-moduli representation of the
//! Ginibre spectrum, and the Gumbel normalization of the spectral radius.

use crate::error::{invalid, Error, Result};
use crate::special::{gamma_pq, ln_gamma, std_normal_cdf};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp, Exp1, Gamma, Normal};
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// An analytic law on the real line used as a test oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionSpec {
    /// Density `rate^shape x^{shape-1} e^{-rate x} / Gamma(shape)` on `x >= 0`.
    Gamma { shape: f64, rate: f64 },
    Normal { mean: f64, variance: f64 },
    /// Standard Gumbel, CDF `exp(-exp(-x))`.
    Gumbel,
    Exponential { rate: f64 },
    Uniform { low: f64, high: f64 },
}

impl DistributionSpec {
    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(invalid("shape", format!("must be positive, got {shape}")));
        }
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(invalid("rate", format!("must be positive, got {rate}")));
        }
        Ok(DistributionSpec::Gamma { shape, rate })
    }

    pub fn normal(mean: f64, variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) || !mean.is_finite() {
            return Err(invalid("variance", format!("must be positive, got {variance}")));
        }
        Ok(DistributionSpec::Normal { mean, variance })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(invalid("rate", format!("must be positive, got {rate}")));
        }
        Ok(DistributionSpec::Exponential { rate })
    }

    pub fn uniform(low: f64, high: f64) -> Result<Self> {
        if !(low < high) || !low.is_finite() || !high.is_finite() {
            return Err(invalid("high", format!("need finite low < high, got [{low}, {high}]")));
        }
        Ok(DistributionSpec::Uniform { low, high })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            DistributionSpec::Gamma { shape, rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    gamma_pq(shape, rate * x).map(|(p, _)| p).unwrap_or(f64::NAN)
                }
            }
            DistributionSpec::Normal { mean, variance } => std_normal_cdf((x - mean) / variance.sqrt()),
            DistributionSpec::Gumbel => (-(-x).exp()).exp(),
            DistributionSpec::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            DistributionSpec::Uniform { low, high } => ((x - low) / (high - low)).clamp(0.0, 1.0),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            DistributionSpec::Gamma { shape, rate } => {
                if x < 0.0 || (x == 0.0 && shape > 1.0) {
                    0.0
                } else {
                    (shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - ln_gamma(shape)).exp()
                }
            }
            DistributionSpec::Normal { mean, variance } => {
                let z = x - mean;
                (-(z * z) / (2.0 * variance)).exp() / (2.0 * PI * variance).sqrt()
            }
            DistributionSpec::Gumbel => (-x - (-x).exp()).exp(),
            DistributionSpec::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            }
            DistributionSpec::Uniform { low, high } => {
                if x < low || x > high {
                    0.0
                } else {
                    1.0 / (high - low)
                }
            }
        }
    }

    /// Inverse CDF for `p` in `(0, 1)`; closed form where available,
    /// otherwise bisection on the CDF down to adjacent floats.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(invalid("p", format!("quantile level must lie in (0,1), got {p}")));
        }
        match *self {
            DistributionSpec::Gumbel => Ok(-(-p.ln()).ln()),
            DistributionSpec::Exponential { rate } => Ok(-(-p).ln_1p() / rate),
            DistributionSpec::Uniform { low, high } => Ok(low + p * (high - low)),
            DistributionSpec::Gamma { shape, rate } => {
                let mean = shape / rate;
                let sd = shape.sqrt() / rate;
                let mut hi = mean + 10.0 * sd + 10.0 / rate;
                while self.cdf(hi) < p {
                    hi *= 2.0;
                }
                Ok(self.bisect(p, 0.0, hi))
            }
            DistributionSpec::Normal { mean, variance } => {
                let sd = variance.sqrt();
                let mut w = 10.0;
                while self.cdf(mean - w * sd) > p || self.cdf(mean + w * sd) < p {
                    w *= 2.0;
                }
                Ok(self.bisect(p, mean - w * sd, mean + w * sd))
            }
        }
    }

    fn bisect(&self, p: f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn mean(&self) -> f64 {
        match *self {
            DistributionSpec::Gamma { shape, rate } => shape / rate,
            DistributionSpec::Normal { mean, .. } => mean,
            DistributionSpec::Gumbel => EULER_GAMMA,
            DistributionSpec::Exponential { rate } => 1.0 / rate,
            DistributionSpec::Uniform { low, high } => 0.5 * (low + high),
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            DistributionSpec::Gamma { shape, rate } => shape / (rate * rate),
            DistributionSpec::Normal { variance, .. } => variance,
            DistributionSpec::Gumbel => PI * PI / 6.0,
            DistributionSpec::Exponential { rate } => 1.0 / (rate * rate),
            DistributionSpec::Uniform { low, high } => (high - low).powi(2) / 12.0,
        }
    }

    /// Law of `sigma * X` for `sigma > 0`.
    pub fn scaled(&self, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(invalid("sigma", format!("scale must be positive, got {sigma}")));
        }
        match *self {
            DistributionSpec::Gamma { shape, rate } => Self::gamma(shape, rate / sigma),
            DistributionSpec::Normal { mean, variance } => Self::normal(sigma * mean, sigma * sigma * variance),
            DistributionSpec::Exponential { rate } => Self::exponential(rate / sigma),
            DistributionSpec::Uniform { low, high } => Self::uniform(sigma * low, sigma * high),
            DistributionSpec::Gumbel => Err(invalid("sigma", "the standard Gumbel family is not closed under scaling")),
        }
    }

    /// Draws one value.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            DistributionSpec::Gamma { shape, rate } => Gamma::new(shape, 1.0 / rate)
                .expect("validated parameters")
                .sample(rng),
            DistributionSpec::Normal { mean, variance } => Normal::new(mean, variance.sqrt())
                .expect("validated parameters")
                .sample(rng),
            DistributionSpec::Gumbel => {
                let e: f64 = Exp1.sample(rng);
                -e.ln()
            }
            DistributionSpec::Exponential { rate } => Exp::new(rate).expect("validated parameters").sample(rng),
            DistributionSpec::Uniform { low, high } => rng.random_range(low..high),
        }
    }
}

/// Law of `V(X_1) + ... + V(X_n)` when the density is proportional to
/// `exp(-sum V(x_i)) prod_{i<j} W(x_i - x_j)` on `(R^d)^n` with `V`
/// homogeneous of degree `a > 0` and `W` homogeneous of degree `b >= 0`.
pub fn potential_sum_law(n: usize, d: usize, a: f64, b: f64) -> Result<DistributionSpec> {
    if n == 0 || d == 0 {
        return Err(invalid("n", "n and d must be positive"));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(invalid("a", format!("homogeneity degree of V must be positive, got {a}")));
    }
    if !(b >= 0.0 && b.is_finite()) {
        return Err(invalid("b", format!("homogeneity degree of W must be nonnegative, got {b}")));
    }
    let nf = n as f64;
    DistributionSpec::gamma(nf * d as f64 / a + nf * (nf - 1.0) * b / (2.0 * a), 1.0)
}

/// Per-coordinate law of `X_1 + ... + X_n` when `V = gamma |.|^2`:
/// `N(0, n / (2 gamma))`, independent of `d`.
pub fn sum_law_gaussian(gamma_coeff: f64, n: usize, d: usize) -> Result<DistributionSpec> {
    if !(gamma_coeff > 0.0 && gamma_coeff.is_finite()) {
        return Err(invalid("gamma", format!("must be positive, got {gamma_coeff}")));
    }
    if n == 0 || d == 0 {
        return Err(invalid("n", "n and d must be positive"));
    }
    DistributionSpec::normal(0.0, n as f64 / (2.0 * gamma_coeff))
}

/// Exact laws for the planar beta-Ginibre gas (`V = |.|^2/2`): the
/// per-coordinate law of `sum X_i` and the law of `sum |X_i|^2`.
pub fn beta_ginibre_laws(n: usize, beta: f64) -> Result<(DistributionSpec, DistributionSpec)> {
    check_n_beta(n, beta, 1)?;
    let nf = n as f64;
    Ok((
        DistributionSpec::normal(0.0, 1.0 / beta)?,
        DistributionSpec::gamma(nf + beta * nf * (nf - 1.0) / 4.0, beta * nf / 2.0)?,
    ))
}

/// `(E|sum X_i|^2, E sum |X_i|^2)` for the beta-Ginibre gas.
pub fn beta_ginibre_moments(n: usize, beta: f64) -> Result<(f64, f64)> {
    check_n_beta(n, beta, 1)?;
    Ok((2.0 / beta, 2.0 / beta + (n as f64 - 1.0) / 2.0))
}

/// Laws of `(sum x_i, sum x_i^2)` for the real beta-Hermite gas with
/// density proportional to `exp(-n beta/4 sum x_i^2) prod |x_i - x_j|^beta`.
pub fn hermite_laws(n: usize, beta: f64) -> Result<(DistributionSpec, DistributionSpec)> {
    check_n_beta(n, beta, 2)?;
    let nf = n as f64;
    Ok((
        DistributionSpec::normal(0.0, 2.0 / beta)?,
        DistributionSpec::gamma(nf / 2.0 + beta * nf * (nf - 1.0) / 4.0, beta * nf / 4.0)?,
    ))
}

fn check_n_beta(n: usize, beta: f64, min_n: usize) -> Result<()> {
    if n < min_n {
        return Err(invalid("n", format!("need n >= {min_n}, got {n}")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(invalid("beta", format!("must be positive, got {beta}")));
    }
    Ok(())
}

/// Unordered moduli of the (unscaled) Ginibre spectrum via Kostlan's
/// theorem: `sqrt(G_k)` with independent `G_k ~ Gamma(k, 1)`, uniformly
/// permuted.
pub fn kostlan_moduli<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut moduli: Vec<f64> = (1..=n)
        .map(|k| {
            Gamma::new(k as f64, 1.0)
                .expect("positive integer shape")
                .sample(rng)
                .sqrt()
        })
        .collect();
    moduli.shuffle(rng);
    moduli
}

/// `(kappa_n, center, scale)` with `kappa_n = log(n / 2pi) - 2 log(log n)`,
/// `center = 1 + sqrt(kappa_n / 4n)` and `scale = 1 / sqrt(4 n kappa_n)`, so
/// that `(rho_n - center) / scale` is asymptotically Gumbel.
pub fn gumbel_normalization(n: u64) -> Result<(f64, f64)> {
    let kappa = edge_kappa(n)?;
    let nf = n as f64;
    Ok((1.0 + (kappa / (4.0 * nf)).sqrt(), 1.0 / (4.0 * nf * kappa).sqrt()))
}

/// `kappa_n`, failing when it is not positive.
pub fn edge_kappa(n: u64) -> Result<f64> {
    if n < 3 {
        return Err(invalid("n", format!("edge normalization needs n >= 3, got {n}")));
    }
    let nf = n as f64;
    let kappa = (nf / (2.0 * PI)).ln() - 2.0 * nf.ln().ln();
    if kappa <= 0.0 {
        return Err(Error::NonPositiveKappa { n, kappa });
    }
    Ok(kappa)
}

/// Smallest `n` for which the edge normalization is defined.
pub fn min_edge_n() -> u64 {
    (3..).find(|&n| edge_kappa(n).is_ok()).expect("kappa_n grows like log n")
}

/// Scaled spectral radius `max_k |lambda_k| / sqrt(n)` of an `n x n`
/// Ginibre matrix, sampled through Kostlan's independent moduli.
pub fn spectral_radius_sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> f64 {
    let max_g = (1..=n)
        .map(|k| Gamma::new(k as f64, 1.0).expect("positive integer shape").sample(rng))
        .fold(0.0f64, f64::max);
    (max_g / n as f64).sqrt()
}
