//! Dense complex linear algebra for small square matrices.
//!
//! Everything here is sized for the 4x4 modal blocks (anything up to 16x16
//! works): LU solves with partial pivoting, spectral norms from a cyclic
//! Jacobi eigensolver on `m^H m`, eigenvalues through the characteristic
//! polynomial, and a Pade matrix exponential.

mod eig;
mod expm;
mod jacobi;
mod lu;

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::{invalid, Result};

pub use eig::{characteristic_polynomial, eigenvalues, MAX_EIG_DIM};
pub use expm::expm;
pub use jacobi::hermitian_eigenvalues;

/// Largest supported dimension.
pub const MAX_DIM: usize = 16;

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMat {
    n: usize,
    data: Vec<Complex64>,
}

/// Complex column vector.
#[derive(Clone, Debug, PartialEq)]
pub struct CVec(pub Vec<Complex64>);

impl CMat {
    pub fn zeros(n: usize) -> Self {
        assert!(n <= MAX_DIM, "dimension {n} exceeds {MAX_DIM}");
        CMat {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Result<Self> {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_real_diag(diag: &[f64]) -> Result<Self> {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    /// Builds a matrix from rows; every row must have the matrix dimension.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n > MAX_DIM {
            return Err(invalid(format!("matrix dimension {n} not in 1..={MAX_DIM}")));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(invalid("matrix rows must all have length equal to the row count"));
        }
        let m = CMat {
            n,
            data: rows.iter().flatten().copied().collect(),
        };
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub(crate) fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    fn check_finite(&self) -> Result<()> {
        if self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(())
        } else {
            Err(invalid("matrix entries must be finite"))
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: Complex64) -> CMat {
        CMat {
            n: self.n,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        CMat {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        CMat {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(x, y)| x - y).collect(),
        }
    }

    /// `s*I - self`.
    pub fn shifted_neg(&self, s: Complex64) -> CMat {
        let mut m = self.scale(Complex64::new(-1.0, 0.0));
        for i in 0..self.n {
            m[(i, i)] += s;
        }
        m
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &CVec) -> CVec {
        assert_eq!(self.n, x.len());
        CVec(
            (0..self.n)
                .map(|i| self.row(i).iter().zip(&x.0).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Solves `self * x = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &CVec) -> Result<CVec> {
        if rhs.len() != self.n {
            return Err(invalid(format!(
                "right-hand side has length {} but matrix is {}x{}",
                rhs.len(),
                self.n,
                self.n
            )));
        }
        lu::Lu::factor(self)?.solve(rhs)
    }

    pub fn inverse(&self) -> Result<CMat> {
        lu::Lu::factor(self).map(|lu| lu.inverse())
    }

    pub fn determinant(&self) -> Complex64 {
        match lu::Lu::factor(self) {
            Ok(lu) => lu.determinant(),
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// Largest singular value: square root of the top eigenvalue of `m^H m`.
    pub fn operator_norm(&self) -> f64 {
        self.singular_values().last().copied().unwrap_or(0.0)
    }

    /// Singular values in ascending order, from the eigenvalues of `m^H m`.
    ///
    /// Small singular values carry absolute error of order `eps * ||m||`;
    /// use `inverse().operator_norm()` when the reciprocal of a tiny
    /// singular value is needed to full relative precision.
    pub fn singular_values(&self) -> Vec<f64> {
        let gram = self.adjoint().matmul(self);
        hermitian_eigenvalues(&gram)
            .into_iter()
            .map(|e| e.max(0.0).sqrt())
            .collect()
    }

    pub fn min_singular_value(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        eigenvalues(self)
    }

    pub fn expm(&self, t: f64) -> CMat {
        expm(self, t)
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &CMat {
    type Output = CMat;

    fn mul(self, rhs: &CMat) -> CMat {
        self.matmul(rhs)
    }
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat {}x{} [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>12.5e}{:+.5e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CVec {
    pub fn zeros(n: usize) -> Self {
        CVec(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn from_real(xs: &[f64]) -> Self {
        CVec(xs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn sub(&self, other: &CVec) -> CVec {
        CVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Hermitian inner product `<self, other> = sum self_i * conj(other_i)`.
    pub fn dot(&self, other: &CVec) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b.conj()).sum()
    }
}

impl Index<usize> for CVec {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for CVec {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.0[i]
    }
}
