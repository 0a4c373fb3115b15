//! Oracles built on nalgebra, independent of the crate's own kernels.
#![allow(dead_code)]

use damped_spectra::{modal_resolvent_norm, SpectrumModel, SystemParams};
use nalgebra::{Complex, DMatrix, DVector};

pub type C = Complex<f64>;

/// Raw modal block written out from the system, not from the crate.
pub fn raw_block(a: f64, b: f64, gamma: f64, theta: f64, omega: f64) -> DMatrix<C> {
    let g = gamma * omega.powf(theta);
    let r = |x: f64| C::new(x, 0.0);
    DMatrix::from_row_slice(
        4,
        4,
        &[
            r(0.0), r(1.0), r(0.0), r(0.0),
            r(-a * omega), r(-g), r(0.0), r(-g),
            r(0.0), r(0.0), r(0.0), r(1.0),
            r(0.0), r(-g), r(-b * omega), r(-g),
        ],
    )
}

/// Block in energy-weighted coordinates, `D raw D^{-1}`.
pub fn weighted_block(a: f64, b: f64, gamma: f64, theta: f64, omega: f64) -> DMatrix<C> {
    let d = [(a * omega).sqrt(), 1.0, (b * omega).sqrt(), 1.0];
    let raw = raw_block(a, b, gamma, theta, omega);
    DMatrix::from_fn(4, 4, |i, j| raw[(i, j)] * (d[i] / d[j]))
}

/// `||M^{-1}||` by power iteration on `H = M^{-H} M^{-1}`, each step two LU
/// solves. Far from resonance the two largest singular values of `M^{-1}`
/// can agree to 1e-4, where plain power iteration stalls, so a short run
/// only seeds a Krylov space that a Rayleigh-Ritz step finishes.
pub fn power_iteration_inverse_norm(m: &DMatrix<C>) -> f64 {
    let lu = m.clone().lu();
    let lu_h = m.adjoint().lu();
    let apply = |x: &DVector<C>| lu_h.solve(&lu.solve(x).expect("nonsingular")).expect("nonsingular");
    let n = m.nrows();
    let mut x = DVector::from_fn(n, |i, _| C::new(1.0 + 0.37 * i as f64, 0.11 * i as f64 - 0.2));
    x /= C::new(x.norm(), 0.0);
    for _ in 0..50 {
        let z = apply(&x);
        x = &z / C::new(z.norm(), 0.0);
    }
    let est = x.dotc(&apply(&x)).re;

    // Orthonormal Krylov basis x, Hx, H^2 x, ... (Gram-Schmidt applied twice).
    let mut basis: Vec<DVector<C>> = Vec::new();
    let mut v = x;
    while basis.len() < n {
        let scale = v.norm();
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&v);
                v -= b * c;
            }
        }
        let norm = v.norm();
        if norm < 1e-12 * scale {
            break;
        }
        let q = v / C::new(norm, 0.0);
        v = apply(&q);
        basis.push(q);
    }
    let k = basis.len();
    let images: Vec<DVector<C>> = basis.iter().map(apply).collect();
    let t = DMatrix::from_fn(k, k, |i, j| basis[i].dotc(&images[j]));
    let t = (&t + t.adjoint()) * C::new(0.5, 0.0);
    let ritz = t.symmetric_eigenvalues().max();
    ritz.max(est).sqrt()
}

pub fn oracle_modal_norm(p: &SystemParams, omega: f64, lambda: f64) -> f64 {
    let w = weighted_block(p.a(), p.b(), p.gamma(), p.theta(), omega);
    let m = DMatrix::<C>::identity(4, 4) * C::new(0.0, lambda) - w;
    power_iteration_inverse_norm(&m)
}

/// Maximum of the modal norm over modes `1..=n_max`.
pub fn exhaustive_max(p: &SystemParams, s: &SpectrumModel, lambda: f64, n_max: usize) -> (f64, usize) {
    let mut best = (0.0, 0);
    for n in 1..=n_max {
        let r = modal_resolvent_norm(p, s.mode_at(n).unwrap(), lambda).unwrap();
        if r > best.0 {
            best = (r, n);
        }
    }
    best
}

/// Least-squares slope, written independently of the crate's fitter.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}
