//! Time-domain evaluation of the semigroup on finite modal expansions.
//!
//! Modes are invariant, so each evolves by the exponential of its own 4x4
//! block. The exponential is taken of the weighted block, where the energy
//! norm is Euclidean, and applied to `D x`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::asymptotics::least_squares_line;
use crate::error::{invalid, Error, Result};
use crate::modal::{build_modal_block, dissipativity_form, ModalState};
use crate::model::{SpectrumModel, SystemParams};
use crate::smallmat::{CMat, CVec};

/// A finite modal expansion of the initial state `(y0, y1, z0, z1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    /// `(mode index, coefficients)`, indices distinct.
    pub modes: Vec<(usize, ModalState)>,
}

impl InitialData {
    pub fn new(modes: Vec<(usize, ModalState)>) -> Result<Self> {
        if modes.is_empty() {
            return Err(invalid("initial data needs at least one mode"));
        }
        let mut seen: Vec<usize> = modes.iter().map(|(n, _)| *n).collect();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("initial data lists a mode index twice"));
        }
        for (n, s) in &modes {
            if !(s.omega > 0.0 && s.omega.is_finite()) {
                return Err(invalid(format!("mode {n}: omega must be positive")));
            }
            if ![s.u, s.v, s.w, s.z].iter().all(|c| c.is_finite()) {
                return Err(invalid(format!("mode {n}: coefficients must be finite")));
            }
        }
        Ok(InitialData { modes })
    }

    /// Modes `1..=count` with weighted coordinates
    /// `(sqrt(a w) u, v, sqrt(b w) w, z) = (1, 1, 1, 1) / omega_n`. The graph
    /// norm stays bounded as `count` grows.
    pub fn smooth(params: &SystemParams, spectrum: &SpectrumModel, count: usize) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        let modes = (1..=count)
            .map(|n| {
                let omega = spectrum.mode_at(n)?;
                let y = CVec(vec![one / omega; 4]);
                Ok((n, ModalState::from_weighted(params, omega, &y)))
            })
            .collect::<Result<Vec<_>>>()?;
        InitialData::new(modes)
    }

    pub fn hnorm(&self, params: &SystemParams) -> f64 {
        self.modes
            .iter()
            .map(|(_, s)| s.hnorm_sq(params))
            .sum::<f64>()
            .sqrt()
    }

    /// `(||Z||^2 + ||A Z||^2)^{1/2}`.
    pub fn graph_norm(&self, params: &SystemParams) -> Result<f64> {
        let mut sum = 0.0;
        for (_, s) in &self.modes {
            let block = build_modal_block(params, s.omega)?;
            let y = s.weighted(params);
            sum += y.norm().powi(2) + block.weighted.mul_vec(&y).norm().powi(2);
        }
        Ok(sum.sqrt())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub times: Vec<f64>,
    pub total_norm: Vec<f64>,
    /// `mode_norms[k][j]`: norm of the k-th listed mode at `times[j]`.
    pub mode_indices: Vec<usize>,
    pub mode_norms: Vec<Vec<f64>>,
    /// For `a = b`: energy norm of `q = y - z` and `p = y + z`.
    pub q_norm: Option<Vec<f64>>,
    pub p_norm: Option<Vec<f64>>,
    pub graph_norm: f64,
    pub damped: bool,
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(invalid("time grid is empty"));
    }
    if times[0] != 0.0 {
        return Err(invalid(format!("time grid must start at 0, got {}", times[0])));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || !times.iter().all(|t| t.is_finite()) {
        return Err(invalid("time grid must be finite and strictly increasing"));
    }
    Ok(())
}

fn propagate_mode(params: &SystemParams, state: &ModalState, t: f64) -> Result<ModalState> {
    let block = build_modal_block(params, state.omega)?;
    let y = block.weighted.expm(t).mul_vec(&state.weighted(params));
    Ok(ModalState::from_weighted(params, state.omega, &y))
}

/// State at time `t >= 0`.
pub fn propagate(params: &SystemParams, data: &InitialData, t: f64) -> Result<InitialData> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("time must be finite and nonnegative, got {t}")));
    }
    let modes = data
        .modes
        .iter()
        .map(|(n, s)| Ok((*n, propagate_mode(params, s, t)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(InitialData { modes })
}

fn pq_norms(params: &SystemParams, s: &ModalState) -> (f64, f64) {
    let aw = params.a() * s.omega;
    let p = aw * (s.u + s.w).norm_sqr() + (s.v + s.z).norm_sqr();
    let q = aw * (s.u - s.w).norm_sqr() + (s.v - s.z).norm_sqr();
    (p, q)
}

pub fn evolve(params: &SystemParams, data: &InitialData, times: &[f64]) -> Result<Trace> {
    check_times(times)?;
    let synced = params.a() == params.b();
    let nt = times.len();
    let mut total_sq = vec![0.0; nt];
    let mut p_sq = vec![0.0; nt];
    let mut q_sq = vec![0.0; nt];
    let mut mode_norms = Vec::with_capacity(data.modes.len());

    for (_, s0) in &data.modes {
        let block = build_modal_block(params, s0.omega)?;
        let y0 = s0.weighted(params);
        let mut norms = Vec::with_capacity(nt);
        for (j, &t) in times.iter().enumerate() {
            let (y, n2) = if t == 0.0 {
                (y0.clone(), s0.hnorm_sq(params))
            } else {
                let y = block.weighted.expm(t).mul_vec(&y0);
                let n2 = y.norm().powi(2);
                (y, n2)
            };
            total_sq[j] += n2;
            norms.push(n2.sqrt());
            if synced {
                let s = ModalState::from_weighted(params, s0.omega, &y);
                let (p, q) = pq_norms(params, &s);
                p_sq[j] += p;
                q_sq[j] += q;
            }
        }
        mode_norms.push(norms);
    }

    let sqrt_all = |v: Vec<f64>| v.into_iter().map(f64::sqrt).collect::<Vec<_>>();
    Ok(Trace {
        times: times.to_vec(),
        total_norm: sqrt_all(total_sq),
        mode_indices: data.modes.iter().map(|(n, _)| *n).collect(),
        mode_norms,
        q_norm: synced.then(|| sqrt_all(q_sq.clone())),
        p_norm: synced.then(|| sqrt_all(p_sq.clone())),
        graph_norm: data.graph_norm(params)?,
        damped: !params.is_undamped(),
    })
}

/// Trace of the `q = y - z` and `p = y + z` components for equal stiffness.
/// `q` solves an undamped wave equation, so its norm is constant.
pub fn sync_check(params: &SystemParams, data: &InitialData, times: &[f64]) -> Result<Trace> {
    if params.a() != params.b() {
        return Err(invalid(format!(
            "sync_check requires a = b, got a = {}, b = {}",
            params.a(),
            params.b()
        )));
    }
    evolve(params, data, times)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayModel {
    /// `||Z(t)|| ~ K exp(-rate t)`
    Exponential,
    /// `||Z(t)|| / ||Z0||_graph ~ K (1 + t)^{-rate}`
    Polynomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub model: DecayModel,
    pub rate: f64,
    pub prefactor: f64,
    /// RMS residual of the log-linear fit.
    pub residual: f64,
}

pub fn fit_decay(trace: &Trace, model: DecayModel) -> Result<DecayFit> {
    let n = trace.times.len();
    if n < 16 || trace.total_norm.len() != n {
        return Err(invalid(format!("decay fit needs at least 16 samples, got {n}")));
    }
    let first = trace.total_norm[0];
    let last = trace.total_norm[n - 1];
    if !(last < first) || trace.total_norm.iter().any(|&x| !(x > 0.0)) {
        let msg = format!("trace does not decay: norm {first} at t = 0, {last} at the end");
        return Err(if trace.damped {
            Error::Inconsistency(msg)
        } else {
            invalid(msg)
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = match model {
        DecayModel::Exponential => trace
            .times
            .iter()
            .zip(&trace.total_norm)
            .map(|(&t, &x)| (t, x.ln()))
            .unzip(),
        DecayModel::Polynomial => {
            let scale = if trace.graph_norm > 0.0 {
                trace.graph_norm
            } else {
                1.0
            };
            trace
                .times
                .iter()
                .zip(&trace.total_norm)
                .map(|(&t, &x)| ((1.0 + t).ln(), (x / scale).ln()))
                .unzip()
        }
    };
    let (slope, intercept, residual) = least_squares_line(&xs, &ys)?;
    Ok(DecayFit {
        model,
        rate: -slope,
        prefactor: intercept.exp(),
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Abscissa {
    /// Largest real part over all modal eigenvalues of modes `1..=n_max`.
    pub value: f64,
    pub mode_index: usize,
    pub omega: f64,
}

pub fn spectral_abscissa(
    params: &SystemParams,
    spectrum: &SpectrumModel,
    n_max: usize,
) -> Result<Abscissa> {
    if n_max == 0 {
        return Err(invalid("n_max must be at least 1"));
    }
    if let Some(len) = spectrum.len() {
        if n_max > len {
            return Err(Error::IndexOutOfRange {
                index: n_max,
                len,
            });
        }
    }
    let mut best: Option<Abscissa> = None;
    for n in 1..=n_max {
        let omega = spectrum.mode_at(n)?;
        let value = crate::modal::modal_eigenvalues(params, omega)?
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        if best.is_none_or(|b| value > b.value) {
            best = Some(Abscissa {
                value,
                mode_index: n,
                omega,
            });
        }
    }
    Ok(best.expect("n_max >= 1"))
}

/// One sample of the energy identity `d/dt ||Z||^2 = 2 Re <A Z, Z>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissipationSample {
    pub t: f64,
    pub finite_difference: f64,
    pub form: f64,
    pub relative_error: f64,
}

fn energy(blocks: &[(CMat, CVec)], t: f64) -> f64 {
    blocks
        .iter()
        .map(|(w, y0)| w.expm(t).mul_vec(y0).norm().powi(2))
        .sum()
}

/// Compares a fourth-order centred difference of `||Z(t)||^2` with twice the
/// dissipativity form at each requested time. The step is a small fraction
/// of the fastest modal time scale.
pub fn dissipation_identity(
    params: &SystemParams,
    data: &InitialData,
    sample_times: &[f64],
) -> Result<Vec<DissipationSample>> {
    let mut fastest: f64 = 0.0;
    let mut blocks = Vec::with_capacity(data.modes.len());
    for (_, s) in &data.modes {
        let block = build_modal_block(params, s.omega)?;
        let (fa, fb) = block.frequencies(params);
        fastest = fastest.max(fa).max(fb).max(block.damping);
        blocks.push((block.weighted, s.weighted(params)));
    }
    let h = 2e-3 / fastest;

    sample_times
        .iter()
        .map(|&t| {
            if !(t - 2.0 * h >= 0.0) {
                return Err(invalid(format!(
                    "sample time {t} is too close to 0 for a centred difference"
                )));
            }
            let e = |s: f64| energy(&blocks, s);
            let fd = (e(t - 2.0 * h) - 8.0 * e(t - h) + 8.0 * e(t + h) - e(t + 2.0 * h)) / (12.0 * h);
            let state = propagate(params, data, t)?;
            let mut form = 0.0;
            for (_, s) in &state.modes {
                form += 2.0 * dissipativity_form(params, s)?;
            }
            let relative_error = if form == 0.0 {
                fd.abs()
            } else {
                (fd - form).abs() / form.abs()
            };
            Ok(DissipationSample {
                t,
                finite_difference: fd,
                form,
                relative_error,
            })
        })
        .collect()
}

/// Uniform grid `0, dt, ..., (count - 1) dt`.
pub fn uniform_times(t_end: f64, count: usize) -> Vec<f64> {
    let last = (count.max(2) - 1) as f64;
    (0..count.max(2)).map(|j| t_end * j as f64 / last).collect()
}
