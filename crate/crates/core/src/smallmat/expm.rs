use num_complex::Complex64;

use super::{lu::Lu, CMat};

/// Degree-6 diagonal Pade coefficients: b_k = (12-k)! 6! / (12! k! (6-k)!).
const PADE6: [f64; 7] = [
    1.0,
    1.0 / 2.0,
    5.0 / 44.0,
    1.0 / 66.0,
    1.0 / 792.0,
    1.0 / 15840.0,
    1.0 / 665280.0,
];

/// Scaled 1-norm target before the Pade step; truncation error is below
/// 1e-16 at this radius.
const THETA6: f64 = 0.5;

/// `exp(t m)` by scaling and squaring with a [6/6] Pade approximant.
pub fn expm(m: &CMat, t: f64) -> CMat {
    let n = m.dim();
    if t == 0.0 {
        return CMat::identity(n);
    }
    let x = m.scale(Complex64::new(t, 0.0));
    let norm = x.norm_1();
    if norm == 0.0 {
        return CMat::identity(n);
    }
    let squarings = if norm > THETA6 {
        (norm / THETA6).log2().ceil() as i32
    } else {
        0
    };
    let x = x.scale(Complex64::new(0.5f64.powi(squarings), 0.0));

    let mut powers = vec![CMat::identity(n), x.clone()];
    for k in 2..PADE6.len() {
        let next = powers[k - 1].matmul(&x);
        powers.push(next);
    }
    let mut num = CMat::zeros(n);
    let mut den = CMat::zeros(n);
    for (k, (p, &b)) in powers.iter().zip(PADE6.iter()).enumerate() {
        num = num.add(&p.scale(Complex64::new(b, 0.0)));
        let sign = if k % 2 == 0 { b } else { -b };
        den = den.add(&p.scale(Complex64::new(sign, 0.0)));
    }

    // den is within 0.5 of the identity in 1-norm, so it is well conditioned.
    let lu = Lu::factor(&den).expect("Pade denominator is nonsingular for scaled argument");
    let mut r = lu.inverse().matmul(&num);
    for _ in 0..squarings {
        r = r.matmul(&r);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_time_is_identity() {
        let m = CMat::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(expm(&m, 0.0), CMat::identity(2));
    }

    #[test]
    fn diagonal_exponential() {
        let m = CMat::from_real_diag(&[-1.0, -2.0, -3.0, -4.0]).unwrap();
        let e = expm(&m, 1.0);
        for k in 0..4 {
            let want = (-(k as f64) - 1.0).exp();
            assert!((e[(k, k)].re - want).abs() <= 1e-14 * want.max(1e-300) * 10.0);
            assert!(e[(k, k)].im.abs() < 1e-16);
        }
    }

    #[test]
    fn rotation_generator() {
        // exp(t [[0,1],[-1,0]]) = [[cos t, sin t], [-sin t, cos t]]
        let m = CMat::from_real_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        let t = 37.25;
        let e = expm(&m, t);
        assert!((e[(0, 0)].re - t.cos()).abs() < 1e-12);
        assert!((e[(0, 1)].re - t.sin()).abs() < 1e-12);
        assert!((e[(1, 0)].re + t.sin()).abs() < 1e-12);
    }
}
