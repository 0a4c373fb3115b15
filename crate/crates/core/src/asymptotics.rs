//! Exponent fitting on resolvent scans, the differentiability constant, bound
//! probes, and the theta-regime table.
//!
//! A finite scan cannot see a limit superior, so growth statements are
//! probed as ratios of grid suprema between a scan and its extension by a
//! decade. `STABLE_RATIO` and `GROWING_RATIO` are heuristic cut-offs.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scan::ResolventScan;

/// Ratio of suprema at or below which a weighted norm is read as bounded.
pub const STABLE_RATIO: f64 = 1.2;
/// Ratio of suprema at or above which a weighted norm is read as growing.
pub const GROWING_RATIO: f64 = 1.5;
/// Trailing window used when no other is requested.
pub const DEFAULT_FIT_DECADES: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Assertion {
    Yes,
    No,
    NotAsserted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    Exponential,
    Polynomial,
}

/// What is proved about the semigroup for a given theta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularityClass {
    pub theta: f64,
    pub analytic: Assertion,
    pub differentiable: Assertion,
    /// Exponent `s` with `|lambda|^s ||R(i lambda)||` bounded.
    pub gevrey_s: Option<f64>,
    /// Gevrey classes `delta > 1/s`.
    pub gevrey_delta_threshold: Option<f64>,
    pub stability: Stability,
    /// Decay exponent `-1/(2 theta)` in `(1+t)^{-rate}` for graph-norm data.
    pub poly_rate: Option<f64>,
    /// `lambda^r ||R||` is unbounded for every `r > 2(1 - theta)`.
    pub nonanalytic_threshold: Option<f64>,
    /// Optimality exponent: `2 theta` (Gevrey range) or `-2 theta`
    /// (polynomial range).
    pub optimal_lower_exponent: Option<f64>,
}

pub fn classify(theta: f64) -> Result<RegularityClass> {
    if !(-1.0..=1.0).contains(&theta) {
        return Err(invalid(format!("theta must lie in [-1, 1], got {theta}")));
    }
    let analytic = if theta > 0.5 {
        Assertion::No
    } else {
        Assertion::NotAsserted
    };
    let differentiable = if theta > 0.0 && theta < 1.0 {
        Assertion::Yes
    } else {
        Assertion::NotAsserted
    };
    let gevrey_s = if theta > 0.0 && theta <= 0.25 {
        Some(2.0 * theta)
    } else if theta > 0.25 && theta <= 0.5 {
        Some(3.0 * theta / (1.0 + 2.0 * theta))
    } else {
        None
    };
    let (stability, poly_rate) = if theta >= 0.0 {
        (Stability::Exponential, None)
    } else {
        (Stability::Polynomial, Some(-1.0 / (2.0 * theta)))
    };
    let optimal_lower_exponent = if theta > 0.0 && theta < 0.5 {
        Some(2.0 * theta)
    } else if theta < 0.0 {
        Some(-2.0 * theta)
    } else {
        None
    };
    Ok(RegularityClass {
        theta,
        analytic,
        differentiable,
        gevrey_s,
        gevrey_delta_threshold: gevrey_s.map(|s| 1.0 / s),
        stability,
        poly_rate,
        nonanalytic_threshold: (theta > 0.5).then_some(2.0 * (1.0 - theta)),
        optimal_lower_exponent,
    })
}

/// Ordinary least squares `y = slope x + intercept`; returns
/// `(slope, intercept, rms residual)`.
pub fn least_squares_line(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(invalid("least squares needs at least two paired samples"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(invalid("least squares abscissae are all equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    Ok((slope, intercept, (ss / n).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub window: (f64, f64),
    pub residual: f64,
    pub samples: usize,
}

/// Log-log slope of `R` against `lambda` over the trailing `decades` of the
/// scan.
pub fn fit_exponent(scan: &ResolventScan, decades: f64) -> Result<ExponentFit> {
    if !(decades > 0.0) {
        return Err(invalid(format!("decades must be positive, got {decades}")));
    }
    let lambdas = scan.lambdas();
    let (Some(&first), Some(&last)) = (lambdas.first(), lambdas.last()) else {
        return Err(invalid("cannot fit an empty scan"));
    };
    let lo = last / 10f64.powf(decades);
    if first > lo * (1.0 + 1e-9) {
        return Err(invalid(format!(
            "scan spans {:.3} decades, {decades} requested",
            (last / first).log10()
        )));
    }
    let lo = lo * (1.0 - 1e-12);
    let (xs, ys): (Vec<f64>, Vec<f64>) = scan
        .points
        .iter()
        .filter(|p| p.lambda >= lo)
        .map(|p| (p.lambda.ln(), p.norm.ln()))
        .unzip();
    if xs.len() < 8 {
        return Err(invalid(format!(
            "fit window holds {} points, at least 8 required",
            xs.len()
        )));
    }
    let (slope, intercept, residual) = least_squares_line(&xs, &ys)?;
    Ok(ExponentFit {
        slope,
        intercept,
        window: (xs[0].exp(), last),
        residual,
        samples: xs.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub exponent: f64,
    pub sup: f64,
    pub arg_lambda: f64,
}

fn weighted_max(scan: &ResolventScan, weight: impl Fn(f64) -> f64) -> Option<(f64, f64)> {
    scan.points
        .iter()
        .map(|p| (weight(p.lambda) * p.norm, p.lambda))
        .fold(None, |acc, cur| match acc {
            Some(best) if best.0 >= cur.0 => Some(best),
            _ => Some(cur),
        })
}

/// Grid maximum of `lambda^s R(lambda)`.
pub fn check_bound(scan: &ResolventScan, s: f64) -> Result<BoundCheck> {
    let (sup, arg_lambda) = weighted_max(scan, |l| l.powf(s))
        .ok_or_else(|| invalid("cannot bound an empty scan"))?;
    Ok(BoundCheck {
        exponent: s,
        sup,
        arg_lambda,
    })
}

/// `check_bound(extended).sup / check_bound(base).sup`: close to 1 when
/// `lambda^s R` is bounded, large when it grows.
pub fn extension_ratio(base: &ResolventScan, extended: &ResolventScan, s: f64) -> Result<f64> {
    Ok(check_bound(extended, s)?.sup / check_bound(base, s)?.sup)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    Stable,
    Growing,
    Inconclusive,
}

pub fn trend(ratio: f64) -> Trend {
    if ratio <= STABLE_RATIO {
        Trend::Stable
    } else if ratio >= GROWING_RATIO {
        Trend::Growing
    } else {
        Trend::Inconclusive
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogPowerCheck {
    pub r: f64,
    pub sup: f64,
    pub arg_lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferentiabilityEstimate {
    pub k0_estimate: f64,
    pub k0_arg_lambda: f64,
    pub lambda0: f64,
    pub log_power_checks: Vec<LogPowerCheck>,
}

/// Grid maxima of `log(lambda) R(lambda)` and of `log(lambda)^r R(lambda)`
/// for `lambda >= lambda0`.
pub fn estimate_k0(
    scan: &ResolventScan,
    lambda0: f64,
    log_powers: &[f64],
) -> Result<DifferentiabilityEstimate> {
    if !(lambda0 > 1.0) {
        return Err(invalid(format!("lambda0 must exceed 1, got {lambda0}")));
    }
    let tail = scan.restrict(lambda0, f64::INFINITY);
    if tail.points.is_empty() {
        return Err(invalid(format!("no scan points at or above lambda0 = {lambda0}")));
    }
    let (k0, arg) = weighted_max(&tail, f64::ln).expect("tail is nonempty");
    let log_power_checks = log_powers
        .iter()
        .map(|&r| {
            let (sup, arg_lambda) =
                weighted_max(&tail, |l| l.ln().powf(r)).expect("tail is nonempty");
            LogPowerCheck { r, sup, arg_lambda }
        })
        .collect();
    Ok(DifferentiabilityEstimate {
        k0_estimate: k0,
        k0_arg_lambda: arg,
        lambda0,
        log_power_checks,
    })
}
