//! Global resolvent norm `sup_n ||(i lambda - A_n)^{-1}||` over the modes of
//! a spectrum, and log-spaced scans of it.
//!
//! The modal norm peaks where `lambda^2` is close to `a omega` or `b omega`,
//! so the supremum is taken over a resonance window
//! `[lambda^2 / (K max(a,b)), K lambda^2 / min(a,b)]`, the first
//! `baseline_modes` modes, and the last mode of an explicit list.
//!
//! Windows at large `lambda` hold millions of modes. The maximum over the
//! window is computed exactly by branch and bound on index intervals: for an
//! interval bracketed by two evaluated modes, perturbation bounds on the
//! smallest singular value of `i lambda - A_n` bound the modal norm of every
//! interior mode, and intervals that cannot beat the running maximum are
//! discarded. The result equals the maximum over full enumeration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::modal::{build_modal_block, modal_resolvent};
use crate::model::{SpectrumModel, SystemParams};

/// Candidate-set parameters for the supremum over modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    /// Resonance window width `K >= 1`.
    pub factor: f64,
    /// Modes `1..=baseline_modes` are always examined.
    pub baseline_modes: usize,
}

impl Default for Window {
    fn default() -> Self {
        Window {
            factor: 10.0,
            baseline_modes: 8,
        }
    }
}

impl Window {
    pub fn validate(&self) -> Result<()> {
        if !(self.factor >= 1.0 && self.factor.is_finite()) {
            return Err(invalid(format!(
                "window factor must be >= 1, got {}",
                self.factor
            )));
        }
        if self.baseline_modes == 0 {
            return Err(invalid("baseline_modes must be at least 1"));
        }
        Ok(())
    }
}

fn default_window_factor() -> f64 {
    10.0
}

fn default_baseline_modes() -> usize {
    8
}

/// Log-spaced frequency grid plus window settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub points: usize,
    #[serde(default = "default_window_factor")]
    pub window_factor: f64,
    #[serde(default = "default_baseline_modes")]
    pub baseline_modes: usize,
    /// Move every grid point to the nearest undamped modal frequency
    /// `sqrt(a omega_n)` or `sqrt(b omega_n)`. When damping decays with
    /// frequency the resonance peaks are far narrower than the mode spacing
    /// and a plain grid samples only the troughs between them.
    #[serde(default)]
    pub snap_to_resonance: bool,
}

impl ScanConfig {
    pub fn new(lambda_min: f64, lambda_max: f64, points: usize) -> Self {
        ScanConfig {
            lambda_min,
            lambda_max,
            points,
            window_factor: default_window_factor(),
            baseline_modes: default_baseline_modes(),
            snap_to_resonance: false,
        }
    }

    pub fn snapped(self) -> Self {
        ScanConfig {
            snap_to_resonance: true,
            ..self
        }
    }

    pub fn window(&self) -> Window {
        Window {
            factor: self.window_factor,
            baseline_modes: self.baseline_modes,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_min > 0.0 && self.lambda_min.is_finite()) {
            return Err(invalid(format!(
                "lambda_min must be positive, got {}",
                self.lambda_min
            )));
        }
        if !(self.lambda_max > self.lambda_min && self.lambda_max.is_finite()) {
            return Err(invalid(format!(
                "lambda_max ({}) must exceed lambda_min ({})",
                self.lambda_max, self.lambda_min
            )));
        }
        if self.points < 2 {
            return Err(invalid(format!("points must be >= 2, got {}", self.points)));
        }
        self.window().validate()
    }

    /// Log-spaced grid with exact endpoints.
    pub fn grid(&self) -> Vec<f64> {
        let (l0, l1) = (self.lambda_min.ln(), self.lambda_max.ln());
        let last = self.points - 1;
        (0..self.points)
            .map(|j| {
                if j == 0 {
                    self.lambda_min
                } else if j == last {
                    self.lambda_max
                } else {
                    (l0 + (l1 - l0) * j as f64 / last as f64).exp()
                }
            })
            .collect()
    }
}

/// Supremum of the modal resolvent norms at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalNorm {
    pub norm: f64,
    /// 1-based index of the dominating mode.
    pub mode_index: usize,
    pub omega: f64,
    /// Size of the candidate set the supremum was taken over.
    pub modes_examined: usize,
    /// Modal resolvents actually evaluated.
    pub evaluations: usize,
}

/// One grid point of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub lambda: f64,
    pub norm: f64,
    pub mode_index: usize,
    pub omega: f64,
    pub modes_examined: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventScan {
    pub points: Vec<ScanPoint>,
    /// True when the spectrum was an explicit list, so the supremum only
    /// covers the available modes.
    pub truncated: bool,
}

impl ResolventScan {
    pub fn from_samples(samples: &[(f64, f64)]) -> Self {
        ResolventScan {
            points: samples
                .iter()
                .map(|&(lambda, norm)| ScanPoint {
                    lambda,
                    norm,
                    mode_index: 0,
                    omega: f64::NAN,
                    modes_examined: 0,
                })
                .collect(),
            truncated: false,
        }
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.lambda).collect()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.norm).collect()
    }

    /// Sub-scan restricted to `lo <= lambda <= hi`.
    pub fn restrict(&self, lo: f64, hi: f64) -> ResolventScan {
        ResolventScan {
            points: self
                .points
                .iter()
                .filter(|p| p.lambda >= lo && p.lambda <= hi)
                .copied()
                .collect(),
            truncated: self.truncated,
        }
    }
}

/// Inclusive, sorted, disjoint index ranges forming the candidate set.
pub fn candidate_ranges(
    params: &SystemParams,
    spectrum: &SpectrumModel,
    lambda: f64,
    window: &Window,
) -> Vec<(usize, usize)> {
    let l2 = lambda * lambda;
    let lo = l2 / (window.factor * params.a().max(params.b()));
    let hi = window.factor * l2 / params.a().min(params.b());

    let mut ranges = Vec::with_capacity(3);
    let baseline_end = match spectrum.len() {
        Some(len) => window.baseline_modes.min(len),
        None => window.baseline_modes,
    };
    ranges.push((1, baseline_end));
    if let Some(r) = spectrum.index_range(lo, hi) {
        ranges.push(r);
    }
    if let Some(len) = spectrum.len() {
        ranges.push((len, len));
    }
    ranges.sort_unstable();

    let mut merged: Vec<(usize, usize)> = Vec::with_capacity(ranges.len());
    for (a, b) in ranges {
        match merged.last_mut() {
            Some(last) if a <= last.1 + 1 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    merged
}

/// Undamped modal frequency `sqrt(a omega_n)` or `sqrt(b omega_n)` closest
/// to `lambda`.
pub fn nearest_resonance(params: &SystemParams, spectrum: &SpectrumModel, lambda: f64) -> f64 {
    let mut best = f64::NAN;
    for c in [params.a(), params.b()] {
        let below = spectrum.index_range(0.0, lambda * lambda / c).map(|(_, last)| last);
        let candidates = match below {
            Some(n) => [Some(n), Some(n + 1)],
            None => [Some(1), None],
        };
        for n in candidates.into_iter().flatten() {
            if let Ok(omega) = spectrum.mode_at(n) {
                let f = (c * omega).sqrt();
                if best.is_nan() || (f - lambda).abs() < (best - lambda).abs() {
                    best = f;
                }
            }
        }
    }
    best
}

/// Modal data at one mode, including what the interval bounds need.
#[derive(Debug, Clone, Copy)]
struct Probe {
    n: usize,
    omega: f64,
    sa: f64,
    sb: f64,
    damping: f64,
    norm: f64,
    /// `||(M^{-1}) p||`, `||p^T M^{-1}||` and `p^T M^{-1} p` for the damping
    /// direction `p = (0, 1, 0, 1)`.
    col_norm: f64,
    row_norm: f64,
    eta: Complex64,
}

struct Evaluator<'a> {
    params: &'a SystemParams,
    spectrum: &'a SpectrumModel,
    lambda: f64,
    evaluations: usize,
}

impl Evaluator<'_> {
    fn probe(&mut self, n: usize) -> Result<Probe> {
        let omega = self.spectrum.mode_at(n)?;
        let block = build_modal_block(self.params, omega)?;
        let res = modal_resolvent(self.params, &block, self.lambda)?;
        self.evaluations += 1;
        let inv = &res.inverse;
        let col: Vec<Complex64> = (0..4).map(|i| inv[(i, 1)] + inv[(i, 3)]).collect();
        let row: Vec<Complex64> = (0..4).map(|j| inv[(1, j)] + inv[(3, j)]).collect();
        let norm2 = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        Ok(Probe {
            n,
            omega,
            sa: (self.params.a() * omega).sqrt(),
            sb: (self.params.b() * omega).sqrt(),
            damping: block.damping,
            norm: res.norm,
            col_norm: norm2(&col),
            row_norm: norm2(&row),
            eta: col[1] + col[3],
        })
    }
}

/// Upper bound on the modal norm of every mode strictly between `lo` and
/// `hi`.
fn interior_bound(lo: &Probe, hi: &Probe) -> f64 {
    // Skew part moves by at most the spread of the undamped frequencies.
    let ds = (hi.sa - lo.sa).abs().max((hi.sb - lo.sb).abs());
    let dg = (hi.damping - lo.damping).abs();

    // Weyl: sigma_min moves by at most ||Delta M|| = ds + 2 dg.
    let mut sigma_lb = (1.0 / lo.norm).max(1.0 / hi.norm) - ds - 2.0 * dg;

    // Rank-one damping increase from the less damped end (Sherman-Morrison,
    // using Re(eta) >= 0 from accretivity of i lambda - A).
    let base = if lo.damping <= hi.damping { lo } else { hi };
    let inflated = if dg == 0.0 {
        base.norm
    } else {
        let t = 1.0 / dg;
        let denom = if t + base.eta.re >= 0.0 {
            Complex64::new(t + base.eta.re, base.eta.im).norm()
        } else {
            base.eta.im.abs()
        };
        if denom > 0.0 {
            base.norm + base.col_norm * base.row_norm / denom
        } else {
            f64::INFINITY
        }
    };
    sigma_lb = sigma_lb.max(1.0 / inflated - ds);

    if sigma_lb > 0.0 {
        // Margin for rounding in the evaluated norms.
        (1.0 / sigma_lb) * (1.0 + 1e-9)
    } else {
        f64::INFINITY
    }
}

struct Node {
    bound: f64,
    lo: Probe,
    hi: Probe,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then_with(|| other.lo.n.cmp(&self.lo.n))
    }
}

fn better(candidate: &Probe, best: &Option<Probe>) -> bool {
    match best {
        None => true,
        Some(b) => candidate.norm > b.norm || (candidate.norm == b.norm && candidate.n < b.n),
    }
}

/// `||(i lambda - A)^{-1}||` as the supremum of modal norms over the
/// candidate set.
pub fn global_resolvent_norm(
    params: &SystemParams,
    spectrum: &SpectrumModel,
    lambda: f64,
    window: &Window,
) -> Result<GlobalNorm> {
    params.require_damped("global_resolvent_norm")?;
    window.validate()?;
    if !lambda.is_finite() {
        return Err(invalid(format!("lambda must be finite, got {lambda}")));
    }
    let lambda_abs = lambda.abs();
    let ranges = candidate_ranges(params, spectrum, lambda_abs, window);
    let modes_examined = ranges.iter().map(|(a, b)| b - a + 1).sum();

    let mut ev = Evaluator {
        params,
        spectrum,
        lambda: lambda_abs,
        evaluations: 0,
    };
    let mut best: Option<Probe> = None;
    let mut heap = BinaryHeap::new();

    for &(first, last) in &ranges {
        let lo = ev.probe(first)?;
        if better(&lo, &best) {
            best = Some(lo);
        }
        if last == first {
            continue;
        }
        let hi = ev.probe(last)?;
        if better(&hi, &best) {
            best = Some(hi);
        }
        if last > first + 1 {
            heap.push(Node {
                bound: interior_bound(&lo, &hi),
                lo,
                hi,
            });
        }
    }

    while let Some(node) = heap.pop() {
        let current = best.as_ref().map_or(0.0, |b| b.norm);
        if node.bound < current {
            break;
        }
        let mid = node.lo.n + (node.hi.n - node.lo.n) / 2;
        let m = ev.probe(mid)?;
        if better(&m, &best) {
            best = Some(m);
        }
        if mid > node.lo.n + 1 {
            heap.push(Node {
                bound: interior_bound(&node.lo, &m),
                lo: node.lo,
                hi: m,
            });
        }
        if node.hi.n > mid + 1 {
            heap.push(Node {
                bound: interior_bound(&m, &node.hi),
                lo: m,
                hi: node.hi,
            });
        }
    }

    let best = best.expect("candidate set always contains mode 1");
    Ok(GlobalNorm {
        norm: best.norm,
        mode_index: best.n,
        omega: best.omega,
        modes_examined,
        evaluations: ev.evaluations,
    })
}

/// Evaluates the global resolvent norm on the configured log grid. Grid
/// points are independent and evaluated in parallel; results keep grid
/// order.
pub fn scan(
    params: &SystemParams,
    spectrum: &SpectrumModel,
    config: &ScanConfig,
) -> Result<ResolventScan> {
    config.validate()?;
    params.require_damped("scan")?;
    let window = config.window();
    let mut grid = config.grid();
    if config.snap_to_resonance {
        for lambda in &mut grid {
            *lambda = nearest_resonance(params, spectrum, *lambda);
        }
    }
    let points = grid
        .into_par_iter()
        .map(|lambda| {
            global_resolvent_norm(params, spectrum, lambda, &window).map(|g| ScanPoint {
                lambda,
                norm: g.norm,
                mode_index: g.mode_index,
                omega: g.omega,
                modes_examined: g.modes_examined,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResolventScan {
        points,
        truncated: spectrum.is_truncated(),
    })
}
