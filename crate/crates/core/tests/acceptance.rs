//! Acceptance criteria. Runs every criterion, prints one PASS/FAIL line per
//! criterion, and exits nonzero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use damped_spectra::asymptotics::{estimate_k0, extension_ratio, fit_exponent, check_bound};
use damped_spectra::scan::candidate_ranges;
use damped_spectra::simulate::{
    dissipation_identity, evolve, spectral_abscissa, sync_check, uniform_times, InitialData,
};
use damped_spectra::witness::{certify_lower_bound, squared_ladder};
use damped_spectra::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;

fn squares() -> SpectrumModel {
    SpectrumModel::power_law(1.0, 2.0).unwrap()
}

fn params(theta: f64) -> SystemParams {
    SystemParams::new(1.0, 2.0, 1.0, theta).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn distinct_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    loop {
        let a: f64 = rng.gen_range(0.5..4.0);
        let b = rng.gen_range(0.5..4.0);
        if (a - b).abs() > 1e-3 {
            return (a, b);
        }
    }
}

fn c1_kernel_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let (a, b) = distinct_pair(&mut rng);
        let p = SystemParams::new(a, b, rng.gen_range(0.1..10.0), rng.gen_range(-1.0..=1.0)).unwrap();
        let omega = 10f64.powf(rng.gen_range(0.0..8.0));
        let lambda = 10f64.powf(rng.gen_range(-1.0..4.0));
        let got = modal_resolvent_norm(&p, omega, lambda).map_err(|e| e.to_string())?;
        let want = common::oracle_modal_norm(&p, omega, lambda);
        worst = worst.max((got - want).abs() / want);
    }
    check(worst <= 1e-8, format!("max relative difference {worst:.2e} over 200 draws (tol 1e-8)"))
}

fn c2_window_vs_exhaustive() -> Outcome {
    let thetas = [-1.0, -0.5, 0.0, 0.25, 0.5, 0.75, 1.0];
    let s = squares();
    let w = Window::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (a, b) = distinct_pair(&mut rng);
        let theta = thetas[rng.gen_range(0..thetas.len())];
        let p = SystemParams::new(a, b, rng.gen_range(0.1..10.0), theta).unwrap();
        let lambda = rng.gen_range(1.0..100.0);
        let ranges = candidate_ranges(&p, &s, lambda, &w);
        if ranges.last().unwrap().1 > 500 {
            return Err(format!("window at lambda {lambda} leaves the 500-mode prefix"));
        }
        let g = global_resolvent_norm(&p, &s, lambda, &w).map_err(|e| e.to_string())?;
        let (want, _) = common::exhaustive_max(&p, &s, lambda, 500);
        worst = worst.max((g.norm - want).abs() / want);
    }
    check(worst <= 1e-12, format!("max relative difference {worst:.2e} at 100 points (tol 1e-12)"))
}

fn c3_witness_unit_norm() -> Outcome {
    let mut worst_norm: f64 = 0.0;
    let mut worst_res: f64 = 0.0;
    let mut count = 0;
    for theta in [-1.0, -0.5, 0.25, 0.4, 0.6, 0.75, 1.0] {
        for omega in [1e2, 1e4, 1e6, 1e8] {
            let p = params(theta);
            let w = if theta > 0.5 {
                witness_nonanalytic(&p, omega)
            } else {
                witness_polyopt(&p, omega)
            }
            .map_err(|e| format!("theta {theta}, omega {omega}: {e}"))?;
            worst_norm = worst_norm.max(w.hnorm_error);
            worst_res = worst_res.max(w.residual_disagreement());
            count += 1;
        }
    }
    check(
        worst_norm <= 1e-10 && worst_res <= 1e-9,
        format!(
            "{count} witnesses: max |hnorm - 1| {worst_norm:.2e} (tol 1e-10), \
             max residual disagreement {worst_res:.2e} (tol 1e-9)"
        ),
    )
}

fn c4_nonanalyticity() -> Outcome {
    let p = params(0.8);
    let mut first = None;
    let mut last = 0.0;
    for omega in squared_ladder(10.0, 100) {
        let w = witness_nonanalytic(&p, omega).map_err(|e| e.to_string())?;
        certify_lower_bound(&p, &w).map_err(|e| e.to_string())?;
        let q = w.lambda.powf(0.5) / w.residual;
        first.get_or_insert(q);
        last = q;
    }
    let factor = last / first.unwrap();
    check(
        factor >= 1.5,
        format!("lambda^0.5 / residual grows by {factor:.4} over 100 rungs (need >= 1.5); all 100 bounds certified"),
    )
}

fn c5_differentiability() -> Outcome {
    let p = params(0.75);
    let s = squares();
    // 50 points per decade on both grids, so the base grid is a subset.
    let base = scan(&p, &s, &ScanConfig::new(1e2, 1e6, 201)).map_err(|e| e.to_string())?;
    let ext = scan(&p, &s, &ScanConfig::new(1e2, 1e7, 251)).map_err(|e| e.to_string())?;
    let restrict = |sc: &ResolventScan| sc.restrict(0.0, 1e6 * (1.0 + 1e-12));
    let e0 = estimate_k0(&restrict(&base), 1e3, &[2.0]).map_err(|e| e.to_string())?;
    let e1 = estimate_k0(&ext, 1e3, &[2.0]).map_err(|e| e.to_string())?;
    let r1 = e1.k0_estimate / e0.k0_estimate;
    let r2 = e1.log_power_checks[0].sup / e0.log_power_checks[0].sup;
    check(
        r1 <= 1.05 && r2 <= 1.05,
        format!(
            "max log(l) R: {:.5} -> {:.5} (ratio {r1:.4}); max log(l)^2 R: {:.4} -> {:.4} (ratio {r2:.4}); tol 1.05",
            e0.k0_estimate, e1.k0_estimate, e0.log_power_checks[0].sup, e1.log_power_checks[0].sup
        ),
    )
}

fn c6_gevrey() -> Outcome {
    let p = params(0.2);
    let s = squares();
    let base = scan(&p, &s, &ScanConfig::new(1e2, 1e5, 121)).map_err(|e| e.to_string())?;
    let ext = scan(&p, &s, &ScanConfig::new(1e2, 1e6, 161)).map_err(|e| e.to_string())?;
    let fit = fit_exponent(&base, 2.0).map_err(|e| e.to_string())?;
    let stable = extension_ratio(&base, &ext, 0.4).map_err(|e| e.to_string())?;
    let growing = extension_ratio(&base, &ext, 0.55).map_err(|e| e.to_string())?;
    check(
        (fit.slope + 0.4).abs() <= 0.05 && stable <= 1.2 && growing >= 1.5,
        format!(
            "slope {:.4} on [1e3,1e5] (need -0.4 +- 0.05); sup l^0.4 R ratio {stable:.4} (need <= 1.2); \
             sup l^0.55 R ratio {growing:.4} (need >= 1.5)",
            fit.slope
        ),
    )
}

fn c7_intermediate() -> Outcome {
    let p = params(0.4);
    let s = squares();
    let sc = scan(&p, &s, &ScanConfig::new(1e2, 1e8, 241)).map_err(|e| e.to_string())?;
    let fit = fit_exponent(&sc, 2.0).map_err(|e| e.to_string())?;
    let decades: Vec<String> = (2..8)
        .map(|k| {
            let lo = 10f64.powi(k);
            let d = sc.restrict(lo * (1.0 - 1e-12), 10.0 * lo * (1.0 + 1e-12));
            let xs: Vec<f64> = d.lambdas().iter().map(|l| l.ln()).collect();
            let ys: Vec<f64> = d.norms().iter().map(|r| r.ln()).collect();
            format!("{:.4}", common::slope(&xs, &ys))
        })
        .collect();
    check(
        (-0.80..=-0.6467).contains(&fit.slope),
        format!(
            "slope {:.4} on [1e6,1e8] (need [-0.80, -0.6467]); per-decade slopes from 1e2: {}",
            fit.slope,
            decades.join(", ")
        ),
    )
}

fn c8_exponential() -> Outcome {
    let p = params(0.0);
    let s = squares();
    let sc = scan(&p, &s, &ScanConfig::new(1.0, 1e5, 201)).map_err(|e| e.to_string())?;
    let fit = fit_exponent(&sc, 2.0).map_err(|e| e.to_string())?;
    let sup = check_bound(&sc, 0.0).map_err(|e| e.to_string())?.sup;
    let a1 = spectral_abscissa(&p, &s, 500).map_err(|e| e.to_string())?.value;
    let a2 = spectral_abscissa(&p, &s, 1000).map_err(|e| e.to_string())?.value;
    let change = (a2 - a1).abs() / a1.abs();
    check(
        sup.is_finite() && fit.slope.abs() <= 0.05 && a1 < 0.0 && a2 < 0.0 && change <= 0.1,
        format!(
            "sup R {sup:.4}, slope {:.4} (need |.| <= 0.05); abscissa {a1:.6} (500 modes), {a2:.6} \
             (1000 modes), change {:.1}%",
            fit.slope,
            100.0 * change
        ),
    )
}

fn c9_polynomial() -> Outcome {
    let p = params(-0.5);
    let s = squares();
    let peaks = scan(&p, &s, &ScanConfig::new(10.0, 1e4, 121).snapped()).map_err(|e| e.to_string())?;
    let plain = scan(&p, &s, &ScanConfig::new(10.0, 1e4, 121)).map_err(|e| e.to_string())?;
    let fit = fit_exponent(&peaks, 3.0).map_err(|e| e.to_string())?;
    let plain_fit = fit_exponent(&plain, 3.0).map_err(|e| e.to_string())?;

    // lambda_n^r residual -> 0 exactly when r < -2 theta = 1.
    let ladder: Vec<_> = (1..=4)
        .map(|k| witness_polyopt(&p, 10f64.powi(2 * k)))
        .collect::<Result<_>>()
        .map_err(|e| e.to_string())?;
    let series = |r: f64| -> Vec<f64> {
        ladder.iter().map(|w| w.lambda.powf(r) * w.residual).collect()
    };
    let below = series(0.9);
    let above = series(1.1);
    let falls = below.windows(2).all(|w| w[1] < w[0]);
    let rises = above.windows(2).all(|w| w[1] > w[0]);
    let r_below = below[3] / below[0];
    let r_above = above[3] / above[0];
    check(
        (fit.slope - 1.0).abs() <= 0.05 && falls && rises && r_below <= 0.6 && r_above >= 1.0 / 0.6,
        format!(
            "slope {:.4} on resonance-snapped grid over [10,1e4] (need 1 +- 0.05; plain grid gives {:.4}); \
             l^0.9 res ratio {r_below:.4} (monotone {falls}), l^1.1 res ratio {r_above:.4} (monotone {rises})",
            fit.slope, plain_fit.slope
        ),
    )
}

/// Equal-stiffness data with `y0 != z0`.
fn unsynchronized_data(_p: &SystemParams) -> InitialData {
    let s = squares();
    let modes = (1..=8)
        .map(|n| {
            let omega = s.mode_at(n).unwrap();
            let c = |x: f64| Complex64::new(x / omega, 0.0);
            (n, ModalState::new(omega, c(1.0), c(0.3), c(-0.5), c(0.8)))
        })
        .collect();
    InitialData::new(modes).unwrap()
}

fn c10_conservation() -> Outcome {
    let s = squares();
    let times = uniform_times(100.0, 101);

    let und = SystemParams::undamped(1.0, 2.0, 0.0).unwrap();
    let data = InitialData::smooth(&und, &s, 20).map_err(|e| e.to_string())?;
    let tr = evolve(&und, &data, &times).map_err(|e| e.to_string())?;
    let n0 = tr.total_norm[0];
    let drift = tr.total_norm.iter().map(|x| (x - n0).abs() / n0).fold(0.0, f64::max);

    let p = SystemParams::new(1.0, 1.0, 1.0, 0.5).unwrap();
    let tr = sync_check(&p, &unsynchronized_data(&p), &times).map_err(|e| e.to_string())?;
    let q = tr.q_norm.unwrap();
    let pn = tr.p_norm.unwrap();
    let q_drift = q.iter().map(|x| (x - q[0]).abs() / q[0]).fold(0.0, f64::max);
    // Once p reaches the roundoff floor it jitters at a few ulps of ||Z0||.
    let floor = 1e-13 * tr.total_norm[0];
    let p_monotone = pn.windows(2).all(|w| w[1] <= w[0] + floor);
    let p_ratio = pn[pn.len() - 1] / pn[0];
    check(
        drift <= 1e-9 && q_drift <= 1e-9 && p_monotone && p_ratio < 1.0,
        format!(
            "undamped norm drift {drift:.2e}; q-norm drift {q_drift:.2e} (tol 1e-9); \
             p-norm non-increasing: {p_monotone}, p(100)/p(0) = {p_ratio:.2e}"
        ),
    )
}

fn c11_dissipation() -> Outcome {
    let s = squares();
    // Sampled while the dissipation is still resolvable against the conserved
    // part of the energy; later the derivative sinks below roundoff in ||Z||^2.
    let times: Vec<f64> = (1..=20).map(|k| 0.25 * k as f64).collect();
    let runs = [
        ("a=b, theta 0.5", SystemParams::new(1.0, 1.0, 1.0, 0.5).unwrap(), None),
        ("theta -0.5, 64 modes", params(-0.5), Some(64)),
        ("theta 0.75, 16 modes", params(0.75), Some(16)),
        ("theta 1, 16 modes", params(1.0), Some(16)),
        ("theta 0, 32 modes", params(0.0), Some(32)),
    ];
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (name, p, modes) in runs {
        let data = match modes {
            Some(m) => InitialData::smooth(&p, &s, m).map_err(|e| e.to_string())?,
            None => unsynchronized_data(&p),
        };
        let e = dissipation_identity(&p, &data, &times)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|x| x.relative_error)
            .fold(0.0, f64::max);
        worst = worst.max(e);
        parts.push(format!("{name}: {e:.1e}"));
    }
    check(
        worst <= 1e-6,
        format!("max relative error {worst:.2e} (tol 1e-6) at 20 times in [0.25, 5]; {}", parts.join("; ")),
    )
}

struct Criterion {
    id: usize,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "kernel oracle equivalence", limit: Duration::from_secs(5), run: c1_kernel_oracle },
        Criterion { id: 2, name: "window vs exhaustive", limit: Duration::from_secs(30), run: c2_window_vs_exhaustive },
        Criterion { id: 3, name: "witness unit norm and residuals", limit: Duration::from_secs(5), run: c3_witness_unit_norm },
        Criterion { id: 4, name: "non-analyticity witness ladder", limit: Duration::from_secs(10), run: c4_nonanalyticity },
        Criterion { id: 5, name: "differentiability constant", limit: Duration::from_secs(60), run: c5_differentiability },
        Criterion { id: 6, name: "Gevrey exponent, theta 0.2", limit: Duration::from_secs(60), run: c6_gevrey },
        Criterion { id: 7, name: "intermediate regime, theta 0.4", limit: Duration::from_secs(60), run: c7_intermediate },
        Criterion { id: 8, name: "exponential regime, theta 0", limit: Duration::from_secs(60), run: c8_exponential },
        Criterion { id: 9, name: "polynomial regime, theta -0.5", limit: Duration::from_secs(30), run: c9_polynomial },
        Criterion { id: 10, name: "conservation and synchronization", limit: Duration::from_secs(10), run: c10_conservation },
        Criterion { id: 11, name: "dissipation identity", limit: Duration::from_secs(10), run: c11_dissipation },
    ];

    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.limit;
        let (pass, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        println!(
            "criterion {:>2} {} | {} | {} | {:.2} s (limit {} s{})",
            c.id,
            if pass { "PASS" } else { "FAIL" },
            c.name,
            detail,
            elapsed.as_secs_f64(),
            c.limit.as_secs(),
            if in_time { "" } else { ", exceeded" }
        );
        if !pass {
            failed.push(c.id);
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed.len(),
        criteria.len()
    );
    if !failed.is_empty() {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
