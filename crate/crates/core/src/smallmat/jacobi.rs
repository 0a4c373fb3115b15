use num_complex::Complex64;

use super::CMat;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations, ascending.
///
/// Only the Hermitian part of the input is used: each pivot is rotated as if
/// `h[q][p] == conj(h[p][q])`.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let n = m.dim();
    let mut h = CMat::from_fn(n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj()));
    let total: f64 = h.norm_fro().powi(2);
    if total == 0.0 {
        return vec![0.0; n];
    }
    let tol = (f64::EPSILON * f64::EPSILON) * total;

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| h[(i, j)].norm_sqr())
            .sum();
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut h, p, q);
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    eig.sort_by(|a, b| a.total_cmp(b));
    eig
}

fn rotate(h: &mut CMat, p: usize, q: usize) {
    let n = h.dim();
    let hpq = h[(p, q)];
    let r = hpq.norm();
    if r == 0.0 {
        return;
    }

    // Phase rotation so that h[p][q] becomes the real number r.
    let phase = hpq / r;
    let phase_conj = phase.conj();
    for k in 0..n {
        h[(k, q)] *= phase_conj;
    }
    for k in 0..n {
        h[(q, k)] *= phase;
    }

    let app = h[(p, p)].re;
    let aqq = h[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        let hkp = h[(k, p)];
        let hkq = h[(k, q)];
        h[(k, p)] = c * hkp - s * hkq;
        h[(k, q)] = s * hkp + c * hkq;
    }
    for k in 0..n {
        let hpk = h[(p, k)];
        let hqk = h[(q, k)];
        h[(p, k)] = c * hpk - s * hqk;
        h[(q, k)] = s * hpk + c * hqk;
    }
    h[(p, q)] = Complex64::new(0.0, 0.0);
    h[(q, p)] = Complex64::new(0.0, 0.0);
    h[(p, p)] = Complex64::new(app - t * r, 0.0);
    h[(q, q)] = Complex64::new(aqq + t * r, 0.0);
}
