//! Explicit optimality sequences: unit-norm modal states `Z_n` at
//! frequencies `lambda_n` whose residual `||(i lambda_n - A) Z_n||` is small,
//! so that `||(i lambda_n - A)^{-1}|| >= 1 / residual`.
//!
//! Both constructions use `Z_n = (a_n, i lambda_n a_n, c_n, i lambda_n c_n)`
//! on a single mode, with `alpha = (a+b)/2` and `beta = (a-b)/2`.
//!
//! The residual is reported twice: from its closed form, and by applying
//! `i lambda_n - A` to the construction. The second route involves
//! cancellations of size `omega |a_n|` against a residual that can be smaller
//! by many orders of magnitude, so it runs in double-double arithmetic on the
//! unrounded coefficients. (Rounding `Z_n` to `f64` first perturbs the
//! residual by `eps * omega * |a_n|`, which for negative theta and large
//! omega exceeds the residual itself.)

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{invalid, Error, Result};
use crate::modal::{modal_resolvent_norm, ModalState};
use crate::model::SystemParams;

/// Relative agreement required between the two residual routes.
pub const RESIDUAL_AGREEMENT: f64 = 1e-9;
/// Slack when comparing a certified bound with the computed norm.
pub const CERTIFY_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    /// `lambda_n = sqrt(alpha omega_n)`; shows `lambda^r ||R||` unbounded for
    /// `r > 2(1 - theta)` when `theta > 1/2`.
    NonAnalytic,
    /// `lambda_n = sqrt(a omega_n)`; shows optimality of the Gevrey exponent
    /// `2 theta` and of the polynomial rate.
    PolyOpt,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub n: Option<usize>,
    pub omega: f64,
    pub lambda: f64,
    pub state: ModalState,
    /// Closed-form residual.
    pub residual: f64,
    /// Residual from applying `i lambda - A` to the construction.
    pub residual_direct: f64,
    pub lower_bound: f64,
    /// `|hnorm(state) - 1|`.
    pub hnorm_error: f64,
    pub a_n: Complex64,
    pub c_n: Complex64,
    pub alpha0: Option<f64>,
    pub beta0: Option<f64>,
    pub r_n: Option<f64>,
    pub zeta_n: Option<f64>,
    /// False when theta is outside the range the construction is meant for
    /// (`(1/2, 1]` for `NonAnalytic`, `[-1, 1/2]` for `PolyOpt`). The state
    /// and residual are still valid.
    pub in_range: bool,
}

impl Witness {
    pub fn with_index(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn residual_disagreement(&self) -> f64 {
        (self.residual - self.residual_direct).abs() / self.residual
    }
}

type Cdd = Complex<TwoFloat>;

fn dd(x: f64) -> TwoFloat {
    TwoFloat::from(x)
}

/// Double-double quotient by long division. (`TwoFloat`'s own `Div` between
/// two double-doubles returns only a double-precision quotient.)
fn div(x: TwoFloat, y: TwoFloat) -> TwoFloat {
    let q1 = x.hi() / y.hi();
    let r = x - y * q1;
    let q2 = r.hi() / y.hi();
    let r = r - y * q2;
    let q3 = r.hi() / y.hi();
    TwoFloat::new_add(q1, q2) + q3
}

fn cdiv(x: Cdd, y: Cdd) -> Cdd {
    let d = y.norm_sqr();
    let n = x * y.conj();
    Cdd::new(div(n.re, d), div(n.im, d))
}

fn to_c64(z: Cdd) -> Complex64 {
    Complex64::new(f64::from(z.re), f64::from(z.im))
}

/// `||(i lambda - raw) Z||_H` for `Z = (u, i lambda u, w, i lambda w)`.
fn residual_direct(params: &SystemParams, omega: f64, g: f64, lambda: TwoFloat, u: Cdd, w: Cdd) -> f64 {
    let il = Cdd::new(dd(0.0), lambda);
    let (aw, bw) = (dd(params.a()) * dd(omega), dd(params.b()) * dd(omega));
    let g = dd(g);
    let v = il * u;
    let z = il * w;
    let damp = (v + z).scale(g);
    let r1 = il * u - v;
    let r2 = il * v + u.scale(aw) + damp;
    let r3 = il * w - z;
    let r4 = il * z + w.scale(bw) + damp;
    let sq = r1.norm_sqr() * aw + r2.norm_sqr() + r3.norm_sqr() * bw + r4.norm_sqr();
    f64::from(sq.sqrt())
}

fn finish(
    params: &SystemParams,
    kind: WitnessKind,
    omega: f64,
    lambda: TwoFloat,
    a_n: Cdd,
    c_n: Cdd,
    residual: f64,
    residual_direct: f64,
) -> Result<Witness> {
    let lam = f64::from(lambda);
    let il = Cdd::new(dd(0.0), lambda);
    let state = ModalState::new(omega, to_c64(a_n), to_c64(il * a_n), to_c64(c_n), to_c64(il * c_n));
    let w = Witness {
        kind,
        n: None,
        omega,
        lambda: lam,
        state,
        residual,
        residual_direct,
        lower_bound: 1.0 / residual,
        hnorm_error: (state.hnorm(params) - 1.0).abs(),
        a_n: to_c64(a_n),
        c_n: to_c64(c_n),
        alpha0: None,
        beta0: None,
        r_n: None,
        zeta_n: None,
        in_range: true,
    };
    if !(residual > 0.0 && residual.is_finite()) {
        return Err(Error::Inconsistency(format!(
            "{kind:?} witness at omega = {omega}: residual {residual} is not positive"
        )));
    }
    if w.residual_disagreement() > RESIDUAL_AGREEMENT {
        return Err(Error::Inconsistency(format!(
            "{kind:?} witness at omega = {omega}: closed-form residual {residual} \
             and direct residual {residual_direct} disagree"
        )));
    }
    Ok(w)
}

fn check_inputs(params: &SystemParams, omega: f64, op: &str) -> Result<()> {
    params.require_damped(op)?;
    params.require_distinct(op)?;
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(invalid(format!("{op}: omega must be positive, got {omega}")));
    }
    Ok(())
}

/// Witness at `lambda_n = sqrt(alpha omega_n)`. The residual decays like
/// `omega_n^{1 - theta}` relative to `lambda_n^2`, which is what defeats
/// analyticity for `theta > 1/2`.
pub fn witness_nonanalytic(params: &SystemParams, omega: f64) -> Result<Witness> {
    check_inputs(params, omega, "witness_nonanalytic")?;
    let (a, b) = (params.a(), params.b());
    let alpha = params.alpha_avg();
    let beta = params.beta_half();
    let g = params.damping(omega);

    // alpha^{1/2} gamma omega^{theta - 1/2}, i.e. lambda g / omega
    let t = alpha.sqrt() * g / omega.sqrt();
    // gamma^2 omega^{2 theta - 1}
    let g2w = g * g / omega;

    let alpha0 = 1.0 / (4.0 * (a + b)).sqrt();
    let beta0 = alpha0;
    let zeta = (a + alpha) * beta * beta
        / (4.0 * alpha * ((b + alpha) * beta * beta + 4.0 * alpha * alpha * g2w));
    let s = alpha0 + beta0;
    // Positive root of r^2 + s r - zeta/2 = 0, in cancellation-free form.
    let r_n = zeta / (s + (s * s + 2.0 * zeta).sqrt());
    let (alpha_n, beta_n) = (alpha0 + r_n, beta0 + r_n);

    let sqrt_omega = omega.sqrt();
    let c_abs = alpha_n.hypot(beta_n) / sqrt_omega;
    let residual = beta * beta * omega * c_abs / (beta * beta + alpha * g2w).sqrt();

    let alpha_dd = (dd(a) + dd(b)) / 2.0;
    let beta_dd = (dd(a) - dd(b)) / 2.0;
    let lambda = (alpha_dd * dd(omega)).sqrt();
    let t_dd = div(lambda * dd(g), dd(omega));
    let c_n = Cdd::new(div(dd(alpha_n), dd(sqrt_omega)), div(dd(beta_n), dd(sqrt_omega)));
    let it = Cdd::new(dd(0.0), t_dd);
    let a_n = -cdiv(it * c_n, Cdd::new(beta_dd, dd(0.0)) + it);
    debug_assert!((f64::from(t_dd) - t).abs() <= 1e-12 * t.max(1e-300));

    let direct = residual_direct(params, omega, g, lambda, a_n, c_n);
    let mut w = finish(
        params,
        WitnessKind::NonAnalytic,
        omega,
        lambda,
        a_n,
        c_n,
        residual,
        direct,
    )?;
    w.alpha0 = Some(alpha0);
    w.beta0 = Some(beta0);
    w.r_n = Some(r_n);
    w.zeta_n = Some(zeta);
    w.in_range = params.theta() > 0.5;
    Ok(w)
}

/// Witness at `lambda_n = sqrt(a omega_n)` with `c_n` real positive. Its
/// residual `2 |beta| omega_n |c_n|` behaves like `omega_n^theta`.
pub fn witness_polyopt(params: &SystemParams, omega: f64) -> Result<Witness> {
    check_inputs(params, omega, "witness_polyopt")?;
    let (a, b) = (params.a(), params.b());
    let beta = params.beta_half();
    let g = params.damping(omega);

    // |c_n|^2 = 1 / (omega ((3a + b) + 8 beta^2 omega / g^2))
    let c = 1.0 / (omega * ((3.0 * a + b) + 8.0 * beta * beta * omega / (g * g))).sqrt();
    let residual = 2.0 * beta.abs() * omega * c;

    let beta_dd = (dd(a) - dd(b)) / 2.0;
    let lambda = (dd(a) * dd(omega)).sqrt();
    // a_n = -(1 + 2 i beta omega / (lambda g)) c_n
    let k = div(dd(2.0) * beta_dd * dd(omega), lambda * dd(g));
    let c_n = Cdd::new(dd(c), dd(0.0));
    let a_n = -(Cdd::new(dd(1.0), k) * c_n);

    let direct = residual_direct(params, omega, g, lambda, a_n, c_n);
    let mut w = finish(
        params,
        WitnessKind::PolyOpt,
        omega,
        lambda,
        a_n,
        c_n,
        residual,
        direct,
    )?;
    w.in_range = params.theta() <= 0.5;
    Ok(w)
}

pub fn build_witness(params: &SystemParams, kind: WitnessKind, omega: f64) -> Result<Witness> {
    match kind {
        WitnessKind::NonAnalytic => witness_nonanalytic(params, omega),
        WitnessKind::PolyOpt => witness_polyopt(params, omega),
    }
}

/// Returns the certified bound `1 / residual` after checking it against the
/// computed modal resolvent norm at `(omega_n, lambda_n)`. The modal norm is
/// a lower bound for the global one, so this is the stronger check.
pub fn certify_lower_bound(params: &SystemParams, w: &Witness) -> Result<f64> {
    let bound = 1.0 / w.residual;
    let norm = modal_resolvent_norm(params, w.omega, w.lambda)?;
    if norm < bound * (1.0 - CERTIFY_SLACK) {
        return Err(Error::Inconsistency(format!(
            "witness at omega = {}: certified bound {bound} exceeds resolvent norm {norm}",
            w.omega
        )));
    }
    Ok(bound)
}

/// Square-lattice-style ladder `omega_n = (step n)^2` for `n = 1..=count`.
pub fn squared_ladder(step: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|n| (step * n as f64).powi(2)).collect()
}
