//! Eigenvalues through the characteristic polynomial.
//!
//! Faddeev-LeVerrier gives the coefficients, Durand-Kerner finds all roots
//! simultaneously, and one Newton step per root recovers digits lost to
//! coefficient rounding. The matrix is scaled to unit 1-norm first so the
//! roots sit inside the unit disc.

use num_complex::Complex64;

use super::CMat;
use crate::error::{invalid, Error, Result};

/// Largest dimension handled by [`eigenvalues`].
pub const MAX_EIG_DIM: usize = 8;

const MAX_ITERATIONS: usize = 500;

/// Coefficients `c[0..=n]` of `det(z I - m) = sum c[k] z^k`, with `c[n] = 1`.
pub fn characteristic_polynomial(m: &CMat) -> Vec<Complex64> {
    let n = m.dim();
    let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
    c[n] = Complex64::new(1.0, 0.0);
    let mut mk = CMat::zeros(n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I ; c_{n-k} = -tr(A M_k) / k
        let mut next = m.matmul(&mk);
        for i in 0..n {
            next[(i, i)] += c[n - k + 1];
        }
        let am = m.matmul(&next);
        c[n - k] = -am.trace() / k as f64;
        mk = next;
    }
    c
}

/// All eigenvalues of `m` (with multiplicity), for dimensions up to
/// [`MAX_EIG_DIM`].
pub fn eigenvalues(m: &CMat) -> Result<Vec<Complex64>> {
    let n = m.dim();
    if n > MAX_EIG_DIM {
        return Err(invalid(format!(
            "eigenvalues supports dimension <= {MAX_EIG_DIM}, got {n}"
        )));
    }
    let scale = m.norm_1();
    if scale == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); n]);
    }
    let scaled = m.scale(Complex64::new(1.0 / scale, 0.0));
    let coeffs = characteristic_polynomial(&scaled);
    let roots = durand_kerner(&coeffs)?;
    Ok(roots.into_iter().map(|r| r * scale).collect())
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn horner_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    coeffs.iter().rev().fold((zero, zero), |(p, dp), &c| (p * z + c, dp * z + p))
}

/// Rounding-error bound for evaluating the polynomial at `z`.
fn evaluation_bound(coeffs: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    let abs_sum = coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
    8.0 * coeffs.len() as f64 * f64::EPSILON * abs_sum
}

/// Roots of a monic polynomial given by ascending coefficients.
fn durand_kerner(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![-coeffs[0]]);
    }
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32 + 1)).collect();

    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let p = horner(coeffs, z[i]);
            if p.norm() <= evaluation_bound(coeffs, z[i]) {
                continue;
            }
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    let mut d = z[i] - z[j];
                    if d == Complex64::new(0.0, 0.0) {
                        d = Complex64::new(f64::EPSILON, f64::EPSILON);
                    }
                    denom *= d;
                }
            }
            let step = p / denom;
            z[i] -= step;
            max_step = max_step.max(step.norm() / z[i].norm().max(1e-3));
        }
        if max_step <= 4.0 * f64::EPSILON {
            converged = true;
            break;
        }
    }
    if !converged {
        // Clustered roots stall above the step tolerance but still satisfy
        // the backward-error test.
        let ok = z
            .iter()
            .all(|&zi| horner(coeffs, zi).norm() <= 1e3 * evaluation_bound(coeffs, zi));
        if !ok {
            return Err(Error::ConvergenceFailure {
                iterations: MAX_ITERATIONS,
            });
        }
    }

    for zi in &mut z {
        let (p, dp) = horner_with_derivative(coeffs, *zi);
        if dp.norm() > 0.0 {
            let candidate = *zi - p / dp;
            if horner(coeffs, candidate).norm() <= p.norm() {
                *zi = candidate;
            }
        }
    }
    Ok(z)
}
