use num_complex::Complex64;

use super::{CMat, CVec};
use crate::error::{Error, Result};

/// Pivots below this fraction of the largest entry count as zero.
const PIVOT_FLOOR: f64 = 1e-300;

/// `P A = L U` with unit lower-triangular `L`, both packed in `lu`.
pub(crate) struct Lu {
    lu: CMat,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    pub(crate) fn factor(m: &CMat) -> Result<Lu> {
        let n = m.dim();
        let scale = m.max_abs();
        if scale == 0.0 {
            return Err(Error::SingularMatrix);
        }
        let floor = PIVOT_FLOOR * scale;
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;

        for k in 0..n {
            let (p, pmag) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pmag > floor) {
                return Err(Error::SingularMatrix);
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Lu { lu, perm, swaps })
    }

    pub(crate) fn solve(&self, rhs: &CVec) -> Result<CVec> {
        let n = self.lu.dim();
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::SingularMatrix);
        }
        Ok(CVec(x))
    }

    pub(crate) fn inverse(&self) -> CMat {
        let n = self.lu.dim();
        let mut inv = CMat::zeros(n);
        for j in 0..n {
            let mut e = CVec::zeros(n);
            e[j] = Complex64::new(1.0, 0.0);
            // factor() already rejected singular pivots, so solve cannot fail
            // short of overflow; propagate infinities in that case.
            let col = self
                .solve(&e)
                .unwrap_or_else(|_| CVec(vec![Complex64::new(f64::INFINITY, 0.0); n]));
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }

    pub(crate) fn determinant(&self) -> Complex64 {
        let n = self.lu.dim();
        let mut d: Complex64 = (0..n).map(|i| self.lu[(i, i)]).product();
        if self.swaps % 2 == 1 {
            d = -d;
        }
        d
    }
}
