//! One-mode restriction of the coupled generator.
//!
//! On the span of an eigenfunction with eigenvalue `omega` the generator acts
//! on `(u, v, w, z)` as the 4x4 block
//!
//! ```text
//! [   0      1      0      0  ]
//! [ -a w    -g      0     -g  ]      g = gamma * omega^theta
//! [   0      0      0      1  ]
//! [   0     -g    -b w    -g  ]
//! ```
//!
//! The similarity `D = diag(sqrt(a w), 1, sqrt(b w), 1)` turns the energy
//! norm into the Euclidean norm, so resolvent norms are ordinary spectral
//! norms of the weighted block.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::SystemParams;
use crate::smallmat::{CMat, CVec};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
#[cfg(test)]
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Modal coordinates `(u, v, w, z)` of a state on one eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModalState {
    pub omega: f64,
    pub u: Complex64,
    pub v: Complex64,
    pub w: Complex64,
    pub z: Complex64,
}

impl ModalState {
    pub fn new(omega: f64, u: Complex64, v: Complex64, w: Complex64, z: Complex64) -> Self {
        ModalState { omega, u, v, w, z }
    }

    pub fn zero(omega: f64) -> Self {
        ModalState::new(omega, ZERO, ZERO, ZERO, ZERO)
    }

    pub fn to_vec(&self) -> CVec {
        CVec(vec![self.u, self.v, self.w, self.z])
    }

    pub fn from_vec(omega: f64, x: &CVec) -> Self {
        ModalState::new(omega, x[0], x[1], x[2], x[3])
    }

    /// `a w |u|^2 + |v|^2 + b w |w|^2 + |z|^2`.
    pub fn hnorm_sq(&self, params: &SystemParams) -> f64 {
        params.a() * self.omega * self.u.norm_sqr()
            + self.v.norm_sqr()
            + params.b() * self.omega * self.w.norm_sqr()
            + self.z.norm_sqr()
    }

    pub fn hnorm(&self, params: &SystemParams) -> f64 {
        self.hnorm_sq(params).sqrt()
    }

    /// `D x`, whose Euclidean norm is the energy norm.
    pub fn weighted(&self, params: &SystemParams) -> CVec {
        let d = weights(params, self.omega);
        CVec(vec![self.u * d[0], self.v * d[1], self.w * d[2], self.z * d[3]])
    }

    /// Inverse of [`ModalState::weighted`].
    pub fn from_weighted(params: &SystemParams, omega: f64, y: &CVec) -> Self {
        let d = weights(params, omega);
        ModalState::new(omega, y[0] / d[0], y[1] / d[1], y[2] / d[2], y[3] / d[3])
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        ModalState::new(self.omega, self.u * s, self.v * s, self.w * s, self.z * s)
    }
}

/// Diagonal of the norm-isometric similarity for eigenvalue `omega`.
pub fn weights(params: &SystemParams, omega: f64) -> [f64; 4] {
    [(params.a() * omega).sqrt(), 1.0, (params.b() * omega).sqrt(), 1.0]
}

/// The generator restricted to one mode, in raw and weighted coordinates.
#[derive(Debug, Clone)]
pub struct ModalBlock {
    pub omega: f64,
    /// `gamma * omega^theta`.
    pub damping: f64,
    pub raw: CMat,
    pub weighted: CMat,
}

pub fn build_modal_block(params: &SystemParams, omega: f64) -> Result<ModalBlock> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(invalid(format!("mode eigenvalue must be positive, got {omega}")));
    }
    let (a, b) = (params.a(), params.b());
    let g = params.damping(omega);
    let raw = CMat::from_real_rows(&[
        vec![0.0, 1.0, 0.0, 0.0],
        vec![-a * omega, -g, 0.0, -g],
        vec![0.0, 0.0, 0.0, 1.0],
        vec![0.0, -g, -b * omega, -g],
    ])?;
    let sa = (a * omega).sqrt();
    let sb = (b * omega).sqrt();
    // Entries of D raw D^-1, written so the undamped part is exactly skew.
    let weighted = CMat::from_real_rows(&[
        vec![0.0, sa, 0.0, 0.0],
        vec![-sa, -g, 0.0, -g],
        vec![0.0, 0.0, 0.0, sb],
        vec![0.0, -g, -sb, -g],
    ])?;
    Ok(ModalBlock {
        omega,
        damping: g,
        raw,
        weighted,
    })
}

impl ModalBlock {
    /// `i lambda I - weighted`.
    pub fn shifted(&self, lambda: f64) -> CMat {
        self.weighted.shifted_neg(Complex64::new(0.0, lambda))
    }

    /// Undamped eigenfrequencies `sqrt(a w)`, `sqrt(b w)`.
    pub fn frequencies(&self, params: &SystemParams) -> (f64, f64) {
        (
            (params.a() * self.omega).sqrt(),
            (params.b() * self.omega).sqrt(),
        )
    }
}

/// `Re <A Z, Z> = -gamma omega^theta |v + z|^2` on one mode.
pub fn dissipativity_form(params: &SystemParams, state: &ModalState) -> Result<f64> {
    if !(state.omega > 0.0) {
        return Err(invalid(format!(
            "mode eigenvalue must be positive, got {}",
            state.omega
        )));
    }
    Ok(-params.damping(state.omega) * (state.v + state.z).norm_sqr())
}

/// Eigenvalues of the modal block. For the conservative system they are
/// `+-i sqrt(a w)`, `+-i sqrt(b w)` exactly.
pub fn modal_eigenvalues(params: &SystemParams, omega: f64) -> Result<Vec<Complex64>> {
    let block = build_modal_block(params, omega)?;
    if params.is_undamped() {
        let (fa, fb) = block.frequencies(params);
        return Ok(vec![
            Complex64::new(0.0, fa),
            Complex64::new(0.0, -fa),
            Complex64::new(0.0, fb),
            Complex64::new(0.0, -fb),
        ]);
    }
    block.weighted.eigenvalues()
}

/// Resolvent data of one mode at `i lambda`, shared by the scan bounds.
#[derive(Debug, Clone)]
pub(crate) struct ModalResolvent {
    pub norm: f64,
    pub inverse: CMat,
}

pub(crate) fn modal_resolvent(
    params: &SystemParams,
    block: &ModalBlock,
    lambda: f64,
) -> Result<ModalResolvent> {
    let inverse = block.shifted(lambda).inverse().map_err(|_| {
        Error::Inconsistency(format!(
            "i*{lambda} is an eigenvalue of the damped block for omega = {} \
             (gamma = {}, theta = {})",
            block.omega,
            params.gamma(),
            params.theta()
        ))
    })?;
    let norm = inverse.operator_norm();
    if !norm.is_finite() {
        return Err(Error::Inconsistency(format!(
            "resolvent norm overflow at lambda = {lambda}, omega = {}",
            block.omega
        )));
    }
    Ok(ModalResolvent { norm, inverse })
}

/// `||(i lambda - A)^{-1}||` restricted to one mode, in the energy norm.
///
/// Returns `f64::INFINITY` when `i lambda` is an eigenvalue, which can only
/// happen for the conservative system. For `gamma > 0` a singular shift is
/// reported as an inconsistency, since the imaginary axis lies in the
/// resolvent set.
pub fn modal_resolvent_norm(params: &SystemParams, omega: f64, lambda: f64) -> Result<f64> {
    let block = build_modal_block(params, omega)?;
    if params.is_undamped() {
        // The weighted undamped block is real skew-symmetric, hence normal:
        // the resolvent norm is the reciprocal distance to the spectrum.
        let (fa, fb) = block.frequencies(params);
        let dist = [lambda - fa, lambda + fa, lambda - fb, lambda + fb]
            .iter()
            .map(|d| d.abs())
            .fold(f64::INFINITY, f64::min);
        return Ok(if dist == 0.0 { f64::INFINITY } else { 1.0 / dist });
    }
    Ok(modal_resolvent(params, &block, lambda)?.norm)
}

/// Solves `(i lambda - A) Z = rhs` on one mode.
pub fn modal_solve(
    params: &SystemParams,
    omega: f64,
    lambda: f64,
    rhs: &ModalState,
) -> Result<ModalState> {
    if rhs.omega != omega {
        return Err(invalid(format!(
            "right-hand side lives on omega = {} but the block has omega = {omega}",
            rhs.omega
        )));
    }
    let block = build_modal_block(params, omega)?;
    let y = block.shifted(lambda).solve(&rhs.weighted(params))?;
    Ok(ModalState::from_weighted(params, omega, &y))
}

/// `(i lambda - A) Z` on one mode, applied in raw coordinates.
pub fn apply_shifted(params: &SystemParams, lambda: f64, state: &ModalState) -> Result<ModalState> {
    let block = build_modal_block(params, state.omega)?;
    let m = block.raw.shifted_neg(Complex64::new(0.0, lambda));
    Ok(ModalState::from_vec(state.omega, &m.mul_vec(&state.to_vec())))
}

/// `A Z` on one mode.
pub fn apply_generator(params: &SystemParams, state: &ModalState) -> Result<ModalState> {
    let block = build_modal_block(params, state.omega)?;
    Ok(ModalState::from_vec(state.omega, &block.raw.mul_vec(&state.to_vec())))
}

#[cfg(test)]
fn unit_vector(k: usize) -> CVec {
    let mut e = CVec::zeros(4);
    e[k] = ONE;
    e
}
