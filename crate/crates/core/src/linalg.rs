//! Dense complex matrices: Householder QR and Hessenberg reduction,
//! single-shift QR eigenvalues, and LU with partial pivoting.

use crate::error::{invalid, Error, Result};
use num_complex::Complex64;
use std::ops::{Index, IndexMut};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(invalid("data", format!("expected {} entries, got {}", rows * cols, data.len())));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(invalid(
                "other",
                format!("shape mismatch {}x{} * {}x{}", self.rows, self.cols, other.rows, other.cols),
            ));
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|z| *z *= factor);
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(invalid("other", "shape mismatch"));
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// Top-left `n x n` block.
    pub fn top_left(&self, n: usize) -> Result<ComplexMatrix> {
        if n > self.rows || n > self.cols {
            return Err(invalid("n", format!("block {n} exceeds {}x{}", self.rows, self.cols)));
        }
        Ok(ComplexMatrix::from_fn(n, n, |i, j| self[(i, j)]))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Householder vector `v` (unit norm) and `alpha` with
/// `(I - 2 v v^H) x = alpha e_1`. Returns `None` when `x` is zero.
fn householder(x: &[Complex64]) -> Option<(Vec<Complex64>, Complex64)> {
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    let phase = if x[0] == ZERO { ONE } else { x[0] / x[0].norm() };
    let alpha = -phase * norm;
    let mut v = x.to_vec();
    v[0] -= alpha;
    let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if vnorm == 0.0 {
        return None;
    }
    v.iter_mut().for_each(|z| *z /= vnorm);
    Some((v, alpha))
}

/// Householder QR of a square matrix. Returns `(Q, diag(R))`.
pub fn qr_householder(a: &ComplexMatrix) -> Result<(ComplexMatrix, Vec<Complex64>)> {
    if !a.is_square() {
        return Err(invalid("a", "QR is implemented for square matrices"));
    }
    let n = a.rows;
    let mut r = a.clone();
    let mut q = ComplexMatrix::identity(n);
    let mut diag = vec![ZERO; n];
    for k in 0..n {
        let x: Vec<Complex64> = (k..n).map(|i| r[(i, k)]).collect();
        let Some((v, alpha)) = householder(&x) else {
            diag[k] = r[(k, k)];
            continue;
        };
        // R <- (I - 2 v v^H) R on rows k.., columns k..
        for j in k..n {
            let mut dot = ZERO;
            for (t, vi) in v.iter().enumerate() {
                dot += vi.conj() * r[(k + t, j)];
            }
            dot *= 2.0;
            for (t, vi) in v.iter().enumerate() {
                r[(k + t, j)] -= vi * dot;
            }
        }
        diag[k] = alpha;
        // Q <- Q (I - 2 v v^H) on columns k..
        for i in 0..n {
            let mut dot = ZERO;
            for (t, vi) in v.iter().enumerate() {
                dot += q[(i, k + t)] * vi;
            }
            dot *= 2.0;
            for (t, vi) in v.iter().enumerate() {
                q[(i, k + t)] -= dot * vi.conj();
            }
        }
    }
    Ok((q, diag))
}

/// Unitary similarity reduction to upper Hessenberg form.
pub fn hessenberg(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(invalid("a", "matrix must be square"));
    }
    let n = a.rows;
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let Some((v, _)) = householder(&x) else { continue };
        // left: rows k+1.., columns k..
        for j in k..n {
            let mut dot = ZERO;
            for (t, vi) in v.iter().enumerate() {
                dot += vi.conj() * h[(k + 1 + t, j)];
            }
            dot *= 2.0;
            for (t, vi) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= vi * dot;
            }
        }
        // right: all rows, columns k+1..
        for i in 0..n {
            let mut dot = ZERO;
            for (t, vi) in v.iter().enumerate() {
                dot += h[(i, k + 1 + t)] * vi;
            }
            dot *= 2.0;
            for (t, vi) in v.iter().enumerate() {
                h[(i, k + 1 + t)] -= dot * vi.conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    Ok(h)
}

/// Complex Givens rotation `(c, s)` with real `c` mapping `(a, b)` to
/// `(r, 0)` via `[[c, s], [-conj(s), c]]`.
#[inline]
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, ZERO);
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let norm = na.hypot(nb);
    let c = na / norm;
    let s = (a / na) * b.conj() / norm;
    (c, s)
}

/// Eigenvalue of the 2x2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half_tr = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    let l1 = half_tr + disc;
    let l2 = half_tr - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// All eigenvalues of a square complex matrix: Hessenberg reduction then
/// single-shift QR with Wilkinson shifts and deflation when
/// `|h[k+1,k]| <= 1e-13 (|h[k,k]| + |h[k+1,k+1]|)`. Fails after `40 n`
/// iterations.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(invalid("m", format!("eigenvalues need a square matrix, got {}x{}", a.rows, a.cols)));
    }
    let n = a.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    if a.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(invalid("m", "matrix has non-finite entries"));
    }
    let mut h = hessenberg(a)?;
    let norm = h.max_abs();
    let mut eig = vec![ZERO; n];
    let max_iter = 40 * n;
    let mut total_iter = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;
    let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(n);
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        // locate the active block [lo, hi]
        let mut lo = hi;
        while lo > 0 {
            let scale = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let scale = if scale == 0.0 { norm } else { scale };
            if h[(lo, lo - 1)].norm() <= 1e-13 * scale {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total_iter += 1;
        since_deflation += 1;
        if total_iter > max_iter {
            return Err(Error::NoConvergence { n, iterations: total_iter - 1 });
        }
        let mu = if since_deflation.is_multiple_of(11) {
            // exceptional shift to break cycles
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for k in lo..=hi {
            h[(k, k)] -= mu;
        }
        rots.clear();
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            rots.push((c, s));
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = lo + idx;
            for i in lo..=(k + 1).min(hi) {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
        }
        for k in lo..=hi {
            h[(k, k)] += mu;
        }
    }
    Ok(eig)
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(invalid("a", "LU needs a square matrix"));
        }
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == 0.0 || !pmax.is_finite() {
                return Err(Error::SingularMatrix);
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor != ZERO {
                    for j in k + 1..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= factor * u;
                    }
                }
            }
        }
        Ok(Lu { lu, perm, sign })
    }

    pub fn determinant(&self) -> Complex64 {
        let n = self.lu.rows;
        (0..n).map(|i| self.lu[(i, i)]).product::<Complex64>() * self.sign
    }

    /// Solves `A X = B`.
    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.lu.rows;
        if b.rows != n {
            return Err(invalid("b", "row count mismatch"));
        }
        let m = b.cols;
        let mut x = ComplexMatrix::from_fn(n, m, |i, j| b[(self.perm[i], j)]);
        for j in 0..m {
            for i in 0..n {
                let mut s = x[(i, j)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, j)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }
}

/// Determinant by Gaussian elimination; zero for singular matrices.
pub fn determinant(a: &ComplexMatrix) -> Result<Complex64> {
    match Lu::new(a) {
        Ok(lu) => Ok(lu.determinant()),
        Err(Error::SingularMatrix) => Ok(ZERO),
        Err(e) => Err(e),
    }
}

/// `X` with `X A = B`, via `A^T X^T = B^T`.
pub fn solve_right(b: &ComplexMatrix, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let lu = Lu::new(&a.transpose())?;
    Ok(lu.solve(&b.transpose())?.transpose())
}

/// Determinant of a small real matrix (row-major `k x k`) by pivoted
/// elimination.
pub fn real_determinant(mut a: Vec<f64>, k: usize) -> f64 {
    let mut det = 1.0;
    for c in 0..k {
        let (p, pmax) = (c..k)
            .map(|i| (i, a[i * k + c].abs()))
            .fold((c, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmax == 0.0 {
            return 0.0;
        }
        if p != c {
            for j in 0..k {
                a.swap(c * k + j, p * k + j);
            }
            det = -det;
        }
        let pivot = a[c * k + c];
        det *= pivot;
        for i in c + 1..k {
            let f = a[i * k + c] / pivot;
            for j in c + 1..k {
                a[i * k + j] -= f * a[c * k + j];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_spectrum() {
        let e = eigenvalues(&ComplexMatrix::identity(4)).unwrap();
        assert!(e.iter().all(|z| (z - ONE).norm() < 1e-14));
    }

    #[test]
    fn rotation_generator() {
        let m = ComplexMatrix::from_row_major(2, 2, vec![ZERO, ONE, -ONE, ZERO]).unwrap();
        let mut e = eigenvalues(&m).unwrap();
        e.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((e[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((e[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn triangular_matrix_returns_diagonal() {
        let m = ComplexMatrix::from_fn(5, 5, |i, j| if j >= i { c(i as f64 + 1.0, j as f64) } else { ZERO });
        let mut e = eigenvalues(&m).unwrap();
        e.sort_by(|a, b| a.re.total_cmp(&b.re));
        for (i, z) in e.iter().enumerate() {
            assert!((z - c(i as f64 + 1.0, i as f64)).norm() < 1e-12);
        }
    }

    #[test]
    fn nilpotent_jordan_block() {
        // a 3x3 Jordan block at 2: eigenvalues are ill-conditioned, but the
        // solver must still converge
        let m = ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                c(2.0, 0.0)
            } else if j == i + 1 {
                ONE
            } else {
                ZERO
            }
        });
        let e = eigenvalues(&m).unwrap();
        assert!(e.iter().all(|z| (z - c(2.0, 0.0)).norm() < 1e-4));
    }

    #[test]
    fn non_square_is_rejected() {
        assert!(eigenvalues(&ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn hessenberg_preserves_trace_and_shape() {
        let m = ComplexMatrix::from_fn(6, 6, |i, j| c((i * 7 + j * 3) as f64 % 5.0 - 2.0, (i + 2 * j) as f64 % 3.0));
        let h = hessenberg(&m).unwrap();
        assert!((h.trace() - m.trace()).norm() < 1e-12);
        for i in 0..6usize {
            for j in 0..i.saturating_sub(1) {
                assert_eq!(h[(i, j)], ZERO);
            }
        }
    }

    #[test]
    fn lu_solve_and_determinant() {
        let a = ComplexMatrix::from_row_major(2, 2, vec![c(0.0, 0.0), c(2.0, 0.0), c(1.0, 1.0), c(3.0, 0.0)]).unwrap();
        assert!((determinant(&a).unwrap() - c(-2.0, -2.0)).norm() < 1e-15);
        let b = ComplexMatrix::identity(2);
        let inv = Lu::new(&a).unwrap().solve(&b).unwrap();
        let prod = a.matmul(&inv).unwrap();
        assert!(prod.sub(&ComplexMatrix::identity(2)).unwrap().max_abs() < 1e-15);
        let singular = ComplexMatrix::from_row_major(2, 2, vec![ONE, ONE, ONE, ONE]).unwrap();
        assert_eq!(Lu::new(&singular).unwrap_err(), Error::SingularMatrix);
        assert_eq!(determinant(&singular).unwrap(), ZERO);
    }

    #[test]
    fn real_determinants() {
        assert_eq!(real_determinant(vec![1.0, 2.0, 3.0, 4.0], 2), -2.0);
        assert_eq!(real_determinant(vec![1.0, 1.0, 1.0, 1.0], 2), 0.0);
        assert_eq!(real_determinant(vec![0.0, 1.0, 1.0, 0.0], 2), -1.0);
    }
}
