//! Human-readable regime table for `classify`.

use std::fmt::Write;

use damped_spectra::asymptotics::{classify, Assertion, RegularityClass, Stability};

/// Theta intervals with a representative point inside each.
const INTERVALS: [(&str, f64); 7] = [
    ("[-1, 0)", -0.5),
    ("0", 0.0),
    ("(0, 1/4]", 0.125),
    ("(1/4, 1/2)", 0.375),
    ("1/2", 0.5),
    ("(1/2, 1)", 0.75),
    ("1", 1.0),
];

fn assertion(a: Assertion) -> &'static str {
    match a {
        Assertion::Yes => "yes",
        Assertion::No => "no",
        Assertion::NotAsserted => "-",
    }
}

fn stability(c: &RegularityClass) -> String {
    match c.stability {
        Stability::Exponential => "exponential".into(),
        Stability::Polynomial => "polynomial, rate -1/(2t)".into(),
    }
}

fn gevrey(c: &RegularityClass) -> &'static str {
    match c.gevrey_s {
        None => "-",
        Some(_) if c.theta <= 0.25 => "s = 2t",
        Some(_) => "s = 3t/(1+2t)",
    }
}

fn optimal(c: &RegularityClass) -> &'static str {
    match (c.optimal_lower_exponent, c.nonanalytic_threshold) {
        (Some(_), _) if c.theta < 0.0 => "rate optimal",
        (Some(_), _) => "s = 2t sharp",
        (None, Some(_)) => "r > 2(1-t) unbounded",
        (None, None) => "-",
    }
}

fn row(out: &mut String, label: &str, c: &RegularityClass, exponents: (&str, &str)) {
    let _ = writeln!(
        out,
        "{:<14} {:<9} {:<15} {:<15} {:<26} {}",
        label,
        assertion(c.analytic),
        assertion(c.differentiable),
        exponents.0,
        stability(c),
        exponents.1
    );
}

/// Table of what holds on each theta interval, followed by the values at
/// the requested thetas. `t` stands for theta.
pub fn regime_table(thetas: &[f64]) -> damped_spectra::Result<String> {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<14} {:<9} {:<15} {:<15} {:<26} sharpness",
        "theta", "analytic", "differentiable", "Gevrey", "stability"
    );
    for (label, rep) in INTERVALS {
        let c = classify(rep)?;
        row(&mut out, label, &c, (gevrey(&c), optimal(&c)));
    }
    for &t in thetas {
        let c = classify(t)?;
        let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.6}"));
        let _ = writeln!(
            out,
            "\ntheta = {t}: Gevrey s = {}, delta > {}, optimal exponent = {}, \
             non-analytic beyond r = {}, polynomial rate = {}",
            fmt(c.gevrey_s),
            fmt(c.gevrey_delta_threshold),
            fmt(c.optimal_lower_exponent),
            fmt(c.nonanalytic_threshold),
            fmt(c.poly_rate)
        );
    }
    Ok(out)
}
