//! System constants and the spectrum of the elastic operator.
//!
//! The operator is carried only through its eigenvalues `omega_n`; the
//! eigenfunctions are normalized, so modal coordinates hold all the norm
//! information. Repeated eigenvalues are allowed in explicit lists: a repeat
//! contributes an identical modal block, so suprema over modes do not change.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Constants `a`, `b`, `gamma`, `theta` of the coupled damped system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct SystemParams {
    a: f64,
    b: f64,
    gamma: f64,
    theta: f64,
    undamped: bool,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    a: f64,
    b: f64,
    gamma: f64,
    theta: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    undamped: bool,
}

impl TryFrom<RawParams> for SystemParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        if raw.undamped {
            if raw.gamma != 0.0 {
                return Err(invalid("undamped systems must have gamma = 0"));
            }
            SystemParams::undamped(raw.a, raw.b, raw.theta)
        } else {
            SystemParams::new(raw.a, raw.b, raw.gamma, raw.theta)
        }
    }
}

impl From<SystemParams> for RawParams {
    fn from(p: SystemParams) -> Self {
        RawParams {
            a: p.a,
            b: p.b,
            gamma: p.gamma,
            theta: p.theta,
            undamped: p.undamped,
        }
    }
}

fn check_common(a: f64, b: f64, theta: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(invalid(format!("a must be positive and finite, got {a}")));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(invalid(format!("b must be positive and finite, got {b}")));
    }
    if !(-1.0..=1.0).contains(&theta) {
        return Err(invalid(format!("theta must lie in [-1, 1], got {theta}")));
    }
    Ok(())
}

impl SystemParams {
    pub fn new(a: f64, b: f64, gamma: f64, theta: f64) -> Result<Self> {
        check_common(a, b, theta)?;
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(invalid(format!(
                "gamma must be positive and finite, got {gamma}"
            )));
        }
        Ok(SystemParams {
            a,
            b,
            gamma,
            theta,
            undamped: false,
        })
    }

    /// The conservative system (`gamma = 0`), admitted only for
    /// conservation checks. Witness, scan and certification operations reject it.
    pub fn undamped(a: f64, b: f64, theta: f64) -> Result<Self> {
        check_common(a, b, theta)?;
        Ok(SystemParams {
            a,
            b,
            gamma: 0.0,
            theta,
            undamped: true,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn is_undamped(&self) -> bool {
        self.undamped
    }

    /// `(a + b) / 2`.
    pub fn alpha_avg(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// `(a - b) / 2`.
    pub fn beta_half(&self) -> f64 {
        0.5 * (self.a - self.b)
    }

    /// Damping strength `gamma * omega^theta` on the mode with eigenvalue
    /// `omega`. Underflows to zero for large `omega` when `theta < 0`.
    pub fn damping(&self, omega: f64) -> f64 {
        if self.undamped {
            0.0
        } else {
            self.gamma * (self.theta * omega.ln()).exp()
        }
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        if self.undamped {
            SystemParams::undamped(self.a, self.b, theta)
        } else {
            SystemParams::new(self.a, self.b, self.gamma, theta)
        }
    }

    pub fn require_damped(&self, op: &str) -> Result<()> {
        if self.undamped {
            Err(invalid(format!("{op} requires gamma > 0")))
        } else {
            Ok(())
        }
    }

    pub fn require_distinct(&self, op: &str) -> Result<()> {
        if self.beta_half() == 0.0 {
            Err(Error::DegenerateParameters(format!(
                "{op} requires a != b (got a = b = {})",
                self.a
            )))
        } else {
            Ok(())
        }
    }
}

/// Eigenvalue sequence `omega_1 <= omega_2 <= ...` of the elastic operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpectrum", into = "RawSpectrum")]
pub enum SpectrumModel {
    /// A finite list, treated as a truncation of the full spectrum.
    Explicit { values: Vec<f64> },
    /// `omega_n = scale * n^exponent`, `n = 1, 2, ...`.
    PowerLaw { scale: f64, exponent: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum RawSpectrum {
    Explicit { values: Vec<f64> },
    PowerLaw { scale: f64, exponent: f64 },
}

impl TryFrom<RawSpectrum> for SpectrumModel {
    type Error = Error;

    fn try_from(raw: RawSpectrum) -> Result<Self> {
        match raw {
            RawSpectrum::Explicit { values } => SpectrumModel::explicit(values),
            RawSpectrum::PowerLaw { scale, exponent } => SpectrumModel::power_law(scale, exponent),
        }
    }
}

impl From<SpectrumModel> for RawSpectrum {
    fn from(s: SpectrumModel) -> Self {
        match s {
            SpectrumModel::Explicit { values } => RawSpectrum::Explicit { values },
            SpectrumModel::PowerLaw { scale, exponent } => RawSpectrum::PowerLaw { scale, exponent },
        }
    }
}

impl SpectrumModel {
    /// Positive, non-decreasing list of eigenvalues.
    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("explicit spectrum must contain at least one value"));
        }
        if let Some(bad) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(invalid(format!(
                "spectrum values must be positive and finite, got {bad}"
            )));
        }
        if let Some(w) = values.windows(2).position(|w| w[1] < w[0]) {
            return Err(invalid(format!(
                "spectrum values must be non-decreasing (omega_{} = {} > omega_{} = {})",
                w + 1,
                values[w],
                w + 2,
                values[w + 1]
            )));
        }
        Ok(SpectrumModel::Explicit { values })
    }

    pub fn power_law(scale: f64, exponent: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid(format!("power-law scale must be positive, got {scale}")));
        }
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(invalid(format!(
                "power-law exponent must be positive, got {exponent}"
            )));
        }
        Ok(SpectrumModel::PowerLaw { scale, exponent })
    }

    /// Number of modes, `None` for the unbounded power law.
    pub fn len(&self) -> Option<usize> {
        match self {
            SpectrumModel::Explicit { values } => Some(values.len()),
            SpectrumModel::PowerLaw { .. } => None,
        }
    }

    pub fn is_truncated(&self) -> bool {
        matches!(self, SpectrumModel::Explicit { .. })
    }

    /// `omega_n` for 1-based `n`.
    pub fn mode_at(&self, n: usize) -> Result<f64> {
        match self {
            SpectrumModel::Explicit { values } => {
                if n == 0 || n > values.len() {
                    Err(Error::IndexOutOfRange {
                        index: n,
                        len: values.len(),
                    })
                } else {
                    Ok(values[n - 1])
                }
            }
            SpectrumModel::PowerLaw { scale, exponent } => {
                if n == 0 {
                    Err(invalid("mode indices start at 1"))
                } else {
                    Ok(power_law_value(*scale, *exponent, n))
                }
            }
        }
    }

    /// First `count` eigenvalues (fewer if an explicit list is shorter).
    pub fn prefix(&self, count: usize) -> Vec<f64> {
        match self {
            SpectrumModel::Explicit { values } => values.iter().take(count).copied().collect(),
            SpectrumModel::PowerLaw { scale, exponent } => (1..=count)
                .map(|n| power_law_value(*scale, *exponent, n))
                .collect(),
        }
    }

    /// Inclusive 1-based index range of modes with `lo <= omega_n <= hi`,
    /// or `None` when no mode lies in the interval.
    pub fn index_range(&self, lo: f64, hi: f64) -> Option<(usize, usize)> {
        if !(hi >= lo) {
            return None;
        }
        let (first, last) = match self {
            SpectrumModel::Explicit { values } => {
                let first = values.partition_point(|&w| w < lo) + 1;
                let last = values.partition_point(|&w| w <= hi);
                (first, last)
            }
            SpectrumModel::PowerLaw { scale, exponent } => {
                let value = |n: usize| power_law_value(*scale, *exponent, n);
                let guess = |w: f64| (w.max(0.0) / scale).powf(1.0 / exponent);
                let mut first = (guess(lo).floor() as usize).max(1);
                while first > 1 && value(first - 1) >= lo {
                    first -= 1;
                }
                while value(first) < lo {
                    first += 1;
                }
                if !hi.is_finite() {
                    return None;
                }
                let mut last = guess(hi).ceil() as usize + 1;
                while last >= 1 && value(last) > hi {
                    last -= 1;
                }
                if last == 0 {
                    return None;
                }
                while value(last + 1) <= hi {
                    last += 1;
                }
                (first, last)
            }
        };
        (first >= 1 && last >= first).then_some((first, last))
    }
}

fn power_law_value(scale: f64, exponent: f64, n: usize) -> f64 {
    let nf = n as f64;
    // Integer exponents are evaluated by repeated multiplication so that
    // n^2 and n^4 come out exact.
    if exponent.fract() == 0.0 && exponent <= 16.0 {
        scale * nf.powi(exponent as i32)
    } else {
        scale * nf.powf(exponent)
    }
}

fn check_generator(length: f64, count: usize) -> Result<()> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(invalid(format!("length must be positive, got {length}")));
    }
    if count == 0 {
        return Err(invalid("mode count must be at least 1"));
    }
    Ok(())
}

/// Dirichlet Laplacian on an interval: `omega_n = (n pi / length)^2`.
pub fn make_membrane_spectrum(length: f64, count: usize) -> Result<SpectrumModel> {
    check_generator(length, count)?;
    let values = (1..=count)
        .map(|n| (n as f64 * PI / length).powi(2))
        .collect();
    SpectrumModel::explicit(values)
}

/// One-dimensional plate surrogate: `omega_n = (n pi / length)^4`.
pub fn make_plate_spectrum(length: f64, count: usize) -> Result<SpectrumModel> {
    check_generator(length, count)?;
    let values = (1..=count)
        .map(|n| (n as f64 * PI / length).powi(4))
        .collect();
    SpectrumModel::explicit(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(x: f64, y: f64) -> bool {
        (x - y).abs() <= 4.0 * f64::EPSILON * y.abs()
    }

    #[test]
    fn params_validation() {
        assert!(SystemParams::new(1.0, 2.0, 1.0, 0.5).is_ok());
        assert!(SystemParams::new(0.0, 2.0, 1.0, 0.5).is_err());
        assert!(SystemParams::new(1.0, -2.0, 1.0, 0.5).is_err());
        assert!(SystemParams::new(1.0, 2.0, 0.0, 0.5).is_err());
        assert!(SystemParams::new(1.0, 2.0, 1.0, 1.5).is_err());
        assert!(SystemParams::new(1.0, 2.0, 1.0, -1.0).is_ok());
        assert!(SystemParams::new(1.0, 2.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn derived_constants() {
        let p = SystemParams::new(1.0, 4.0, 2.0, 0.0).unwrap();
        assert_eq!(p.alpha_avg(), 2.5);
        assert_eq!(p.beta_half(), -1.5);
        assert_eq!(p.damping(7.0), 2.0);
        let u = SystemParams::undamped(1.0, 4.0, 0.5).unwrap();
        assert!(u.is_undamped());
        assert_eq!(u.damping(9.0), 0.0);
    }

    #[test]
    fn negative_theta_damping_underflows_gracefully() {
        let p = SystemParams::new(1.0, 2.0, 1.0, -1.0).unwrap();
        let tiny = p.damping(f64::MAX);
        assert!(tiny > 0.0 && (tiny * f64::MAX - 1.0).abs() < 1e-10);
        assert!(p.damping(1e300) >= 0.0);
    }

    #[test]
    fn params_serde_validates() {
        let ok: SystemParams =
            serde_json::from_str(r#"{"a":1,"b":2,"gamma":1,"theta":0.25}"#).unwrap();
        assert_eq!(ok.theta(), 0.25);
        assert!(serde_json::from_str::<SystemParams>(r#"{"a":1,"b":2,"gamma":1,"theta":2}"#)
            .is_err());
        assert!(serde_json::from_str::<SystemParams>(
            r#"{"a":1,"b":2,"gamma":1,"theta":0,"extra":3}"#
        )
        .is_err());
        let u: SystemParams =
            serde_json::from_str(r#"{"a":1,"b":1,"gamma":0,"theta":0,"undamped":true}"#).unwrap();
        assert!(u.is_undamped());
    }

    #[test]
    fn membrane_examples() {
        let s = make_membrane_spectrum(PI, 3).unwrap();
        let v = s.prefix(3);
        for (got, want) in v.iter().zip([1.0, 4.0, 9.0]) {
            assert!(close(*got, want), "{got} vs {want}");
        }
        let s = make_membrane_spectrum(1.0, 2).unwrap();
        assert!(close(s.mode_at(1).unwrap(), PI * PI));
        assert!(close(s.mode_at(2).unwrap(), 4.0 * PI * PI));
        let s = make_membrane_spectrum(2.0, 1).unwrap();
        assert!(close(s.mode_at(1).unwrap(), PI * PI / 4.0));
    }

    #[test]
    fn plate_examples() {
        let s = make_plate_spectrum(PI, 3).unwrap();
        for (got, want) in s.prefix(3).iter().zip([1.0, 16.0, 81.0]) {
            assert!(close(*got, want), "{got} vs {want}");
        }
        assert!(close(make_plate_spectrum(PI, 1).unwrap().mode_at(1).unwrap(), 1.0));
        let s = make_plate_spectrum(1.0, 2).unwrap();
        assert!(close(s.mode_at(2).unwrap(), 16.0 * PI.powi(4)));
    }

    #[test]
    fn generator_errors() {
        assert!(make_membrane_spectrum(0.0, 3).is_err());
        assert!(make_membrane_spectrum(1.0, 0).is_err());
        assert!(make_plate_spectrum(-1.0, 3).is_err());
    }

    #[test]
    fn mode_at_examples() {
        let p = SpectrumModel::power_law(1.0, 2.0).unwrap();
        assert_eq!(p.mode_at(7).unwrap(), 49.0);
        let e = SpectrumModel::explicit(vec![1.0, 4.0, 9.0]).unwrap();
        assert_eq!(e.mode_at(2).unwrap(), 4.0);
        assert_eq!(e.mode_at(4), Err(Error::IndexOutOfRange { index: 4, len: 3 }));
        assert!(e.mode_at(0).is_err());
    }

    #[test]
    fn explicit_validation() {
        assert!(SpectrumModel::explicit(vec![]).is_err());
        assert!(SpectrumModel::explicit(vec![1.0, -2.0]).is_err());
        assert!(SpectrumModel::explicit(vec![4.0, 1.0]).is_err());
        // repeated eigenvalues are allowed
        assert!(SpectrumModel::explicit(vec![1.0, 1.0, 2.0]).is_ok());
    }

    #[test]
    fn spectrum_json_forms() {
        let p: SpectrumModel =
            serde_json::from_str(r#"{"kind":"power-law","scale":2,"exponent":1.5}"#).unwrap();
        assert_eq!(p, SpectrumModel::power_law(2.0, 1.5).unwrap());
        let e: SpectrumModel =
            serde_json::from_str(r#"{"kind":"explicit","values":[1,2,3]}"#).unwrap();
        assert_eq!(e.len(), Some(3));
        assert!(serde_json::from_str::<SpectrumModel>(r#"{"kind":"explicit","values":[3,2]}"#)
            .is_err());
        let round = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<SpectrumModel>(&round).unwrap(), p);
    }

    #[test]
    fn index_range_power_law() {
        let s = SpectrumModel::power_law(1.0, 2.0).unwrap();
        assert_eq!(s.index_range(4.0, 50.0), Some((2, 7)));
        assert_eq!(s.index_range(4.5, 48.9), Some((3, 6)));
        assert_eq!(s.index_range(0.0, 0.5), None);
        assert_eq!(s.index_range(10.0, 15.0), None);
        assert_eq!(s.index_range(0.0, 1.0), Some((1, 1)));
    }

    #[test]
    fn index_range_explicit() {
        let s = SpectrumModel::explicit(vec![1.0, 4.0, 9.0, 16.0]).unwrap();
        assert_eq!(s.index_range(4.0, 10.0), Some((2, 3)));
        assert_eq!(s.index_range(20.0, 30.0), None);
        assert_eq!(s.index_range(0.0, 100.0), Some((1, 4)));
    }

    proptest! {
        #[test]
        fn generated_spectra_strictly_increase(
            length in 0.1f64..10.0,
            count in 2usize..200,
            scale in 0.01f64..100.0,
            exponent in 0.1f64..4.0,
        ) {
            for s in [
                make_membrane_spectrum(length, count).unwrap(),
                make_plate_spectrum(length, count).unwrap(),
            ] {
                let v = s.prefix(count);
                prop_assert!(v[0] > 0.0);
                prop_assert!(v.windows(2).all(|w| w[1] > w[0]));
            }
            let p = SpectrumModel::power_law(scale, exponent).unwrap();
            for n in 1..count {
                prop_assert!(p.mode_at(n + 1).unwrap() > p.mode_at(n).unwrap());
            }
        }

        #[test]
        fn index_range_matches_linear_scan(lo in 0.0f64..500.0, width in 0.0f64..2000.0) {
            let s = SpectrumModel::power_law(1.0, 2.0).unwrap();
            let hi = lo + width;
            let expect: Vec<usize> = (1..=100).filter(|&n| {
                let w = (n * n) as f64;
                w >= lo && w <= hi
            }).collect();
            let got = s.index_range(lo, hi);
            match got {
                None => prop_assert!(expect.is_empty()),
                Some((a, b)) => {
                    prop_assert_eq!(a, expect[0]);
                    prop_assert_eq!(b, *expect.last().unwrap());
                }
            }
        }
    }
}
