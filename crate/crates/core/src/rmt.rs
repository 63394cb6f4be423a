//! Matrix models whose spectra realize planar Coulomb gases at `beta = 2`.

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, solve_right, ComplexMatrix};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Spectrum of a sampled matrix, already multiplied by `scaling`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSample {
    pub eigenvalues: Vec<Complex64>,
    pub scaling: f64,
}

impl SpectrumSample {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.norm()).collect()
    }

    pub fn sum(&self) -> Complex64 {
        self.eigenvalues.iter().sum()
    }

    pub fn product(&self) -> Complex64 {
        self.eigenvalues.iter().product()
    }
}

/// Desk-scale size bounds.
pub const MAX_EIGEN_N: usize = 256;
pub const MAX_SPHERICAL_N: usize = 128;
pub const MAX_PRODUCT_N: usize = 128;

/// `n x n` matrix with i.i.d. entries whose real and imaginary parts are
/// independent `N(0, 1/2)`, so that `E|M_ij|^2 = 1`.
pub fn sample_ginibre_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid variance");
    ComplexMatrix::from_fn(n, n, |_, _| Complex64::new(normal.sample(rng), normal.sample(rng)))
}

/// Eigenvalues of a square matrix (unit scaling).
pub fn eigenvalues(m: &ComplexMatrix) -> Result<SpectrumSample> {
    if m.rows() > MAX_EIGEN_N {
        return Err(invalid("m", format!("eigensolver is limited to n <= {MAX_EIGEN_N}, got {}", m.rows())));
    }
    Ok(SpectrumSample {
        eigenvalues: linalg::eigenvalues(m)?,
        scaling: 1.0,
    })
}

/// Haar-distributed `m x m` unitary: Householder QR of a Ginibre matrix with
/// column `k` of `Q` multiplied by the unit phase of `R[k, k]`.
pub fn sample_haar_unitary<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if m == 0 {
        return Err(invalid("m", "size must be >= 1"));
    }
    let g = sample_ginibre_matrix(m, rng);
    let (mut q, diag) = linalg::qr_householder(&g)?;
    for (k, r) in diag.iter().enumerate() {
        let norm = r.norm();
        if norm == 0.0 {
            return Err(Error::SingularMatrix);
        }
        let phase = r / norm;
        for i in 0..m {
            q[(i, k)] *= phase;
        }
    }
    Ok(q)
}

fn scaled(mut eigenvalues: Vec<Complex64>, scaling: f64) -> SpectrumSample {
    eigenvalues.iter_mut().for_each(|z| *z *= scaling);
    SpectrumSample { eigenvalues, scaling }
}

/// Eigenvalues of an `n x n` Ginibre matrix divided by `sqrt(n)`: a sample
/// of the Ginibre gas.
pub fn ginibre_eigs<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SpectrumSample> {
    if n == 0 || n > MAX_EIGEN_N {
        return Err(invalid("n", format!("need 1 <= n <= {MAX_EIGEN_N}, got {n}")));
    }
    let m = sample_ginibre_matrix(n, rng);
    Ok(scaled(linalg::eigenvalues(&m)?, 1.0 / (n as f64).sqrt()))
}

/// `A = M1 M2^{-1}` for independent Ginibre matrices, computed by a linear
/// solve. Singular draws are retried.
pub fn spherical_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ComplexMatrix> {
    for _ in 0..8 {
        let m1 = sample_ginibre_matrix(n, rng);
        let m2 = sample_ginibre_matrix(n, rng);
        match solve_right(&m1, &m2) {
            Ok(a) => return Ok(a),
            Err(Error::SingularMatrix) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::SingularMatrix)
}

/// Eigenvalues of `M1 M2^{-1}` (spherical ensemble), unscaled.
pub fn spherical_eigs<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SpectrumSample> {
    if n == 0 || n > MAX_SPHERICAL_N {
        return Err(invalid("n", format!("need 1 <= n <= {MAX_SPHERICAL_N}, got {n}")));
    }
    let a = spherical_matrix(n, rng)?;
    Ok(scaled(linalg::eigenvalues(&a)?, 1.0))
}

/// Eigenvalues of the top-left `n x n` block of an `m x m` Haar unitary.
pub fn truncated_unitary_eigs<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<SpectrumSample> {
    if n == 0 || n >= m || m > MAX_EIGEN_N {
        return Err(invalid("m", format!("need 1 <= n < m <= {MAX_EIGEN_N}, got n={n}, m={m}")));
    }
    let u = sample_haar_unitary(m, rng)?;
    Ok(scaled(linalg::eigenvalues(&u.top_left(n)?)?, 1.0))
}

/// Eigenvalues of `n^{-m/2} M_1 ... M_m` for independent Ginibre `M_i`.
pub fn product_ginibre_eigs<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<SpectrumSample> {
    if n == 0 || n > MAX_PRODUCT_N {
        return Err(invalid("n", format!("need 1 <= n <= {MAX_PRODUCT_N}, got {n}")));
    }
    if m == 0 {
        return Err(invalid("m", "number of factors must be >= 1"));
    }
    let mut prod = sample_ginibre_matrix(n, rng);
    // rescale each factor by 1/sqrt(n) so the product stays O(1)
    let s = 1.0 / (n as f64).sqrt();
    prod.scale(s);
    for _ in 1..m {
        let mut next = sample_ginibre_matrix(n, rng);
        next.scale(s);
        prod = prod.matmul(&next)?;
    }
    Ok(SpectrumSample {
        eigenvalues: linalg::eigenvalues(&prod)?,
        scaling: s.powi(m as i32),
    })
}

/// Inverse stereographic projection onto the unit sphere:
/// `(2 Re z, 2 Im z, |z|^2 - 1) / (|z|^2 + 1)`.
pub fn stereographic_lift(z: Complex64) -> [f64; 3] {
    let r2 = z.norm_sqr();
    let d = r2 + 1.0;
    if r2.is_infinite() {
        return [0.0, 0.0, 1.0];
    }
    [2.0 * z.re / d, 2.0 * z.im / d, (r2 - 1.0) / d]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng_from_seed;

    #[test]
    fn ginibre_entry_moments() {
        let mut rng = rng_from_seed(1);
        let mut s2 = 0.0;
        let mut sre2 = 0.0;
        let mut sim2 = 0.0;
        let mut sreim = 0.0;
        let reps = 62_500;
        for _ in 0..reps {
            let m = sample_ginibre_matrix(4, &mut rng);
            for z in m.as_slice() {
                s2 += z.norm_sqr();
                sre2 += z.re * z.re;
                sim2 += z.im * z.im;
                sreim += z.re * z.im;
            }
        }
        let count = (reps * 16) as f64;
        // Var|M|^2 = 1 for a standard complex Gaussian
        let se = (1.0 / count).sqrt();
        assert!((s2 / count - 1.0).abs() < 3.0 * se);
        assert!((sre2 / count - 0.5).abs() < 3.0 * (0.5 / count).sqrt());
        assert!((sim2 / count - 0.5).abs() < 3.0 * (0.5 / count).sqrt());
        assert!((sreim / count).abs() < 3.0 * (0.25 / count).sqrt());
    }

    #[test]
    fn ginibre_is_seeded() {
        let a = sample_ginibre_matrix(5, &mut rng_from_seed(4));
        let b = sample_ginibre_matrix(5, &mut rng_from_seed(4));
        assert_eq!(a, b);
    }

    #[test]
    fn haar_is_unitary_with_unit_circle_spectrum() {
        let mut rng = rng_from_seed(2);
        for &m in &[1, 3, 16, 64] {
            let u = sample_haar_unitary(m, &mut rng).unwrap();
            let err = u.adjoint().matmul(&u).unwrap().sub(&ComplexMatrix::identity(m)).unwrap().max_abs();
            assert!(err <= 1e-12, "m={m}: {err}");
            for z in eigenvalues(&u).unwrap().eigenvalues {
                assert!((z.norm() - 1.0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn stereographic_examples() {
        assert_eq!(stereographic_lift(Complex64::new(0.0, 0.0)), [0.0, 0.0, -1.0]);
        assert_eq!(stereographic_lift(Complex64::new(1.0, 0.0)), [1.0, 0.0, 0.0]);
        let p = stereographic_lift(Complex64::from_polar(1.0, 0.7));
        assert!(p[2].abs() < 1e-15);
        for &(re, im) in &[(0.3, -2.0), (15.0, 4.0), (-1e-3, 1e-4)] {
            let p = stereographic_lift(Complex64::new(re, im));
            assert!((p.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn spherical_solve_residual() {
        let mut rng = rng_from_seed(5);
        for &n in &[1, 4, 32] {
            let m1 = sample_ginibre_matrix(n, &mut rng);
            let m2 = sample_ginibre_matrix(n, &mut rng);
            let a = solve_right(&m1, &m2).unwrap();
            let resid = m1.sub(&a.matmul(&m2).unwrap()).unwrap().frobenius_norm();
            assert!(resid <= 1e-10 * m1.frobenius_norm());
        }
    }

    #[test]
    fn truncation_is_a_contraction() {
        let mut rng = rng_from_seed(6);
        for _ in 0..20 {
            let s = truncated_unitary_eigs(8, 12, &mut rng).unwrap();
            assert!(s.moduli().iter().all(|&r| r <= 1.0 + 1e-10));
        }
        assert!(truncated_unitary_eigs(4, 4, &mut rng).is_err());
    }

    #[test]
    fn size_bounds() {
        let mut rng = rng_from_seed(0);
        assert!(ginibre_eigs(0, &mut rng).is_err());
        assert!(ginibre_eigs(MAX_EIGEN_N + 1, &mut rng).is_err());
        assert!(spherical_eigs(MAX_SPHERICAL_N + 1, &mut rng).is_err());
        assert!(product_ginibre_eigs(4, 0, &mut rng).is_err());
    }
}
