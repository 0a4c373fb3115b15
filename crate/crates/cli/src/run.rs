use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use damped_spectra::asymptotics::{check_bound, classify, estimate_k0, fit_exponent};
use damped_spectra::simulate::{dissipation_identity, fit_decay, uniform_times};
use damped_spectra::witness::{build_witness, squared_ladder, WitnessKind};
use damped_spectra::{
    certify_lower_bound, evolve, modal_resolvent_norm, scan, spectral_abscissa, InitialData, ModalState,
    Witness,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::*;
use crate::error::{CliError, Context};
use crate::report::*;
use crate::table::regime_table;

/// Reads the config at `config_path`, runs `command`, and writes the report
/// and data files into `out_dir`.
pub fn run(command: Command, config_path: &Path, out_dir: &Path) -> Result<Report, CliError> {
    let text = fs::read_to_string(config_path).map_err(|e| CliError::Config {
        line: None,
        message: format!("cannot read {}: {e}", config_path.display()),
    })?;
    let config = JobConfig::parse(&text, command)?;
    run_config(config, command, out_dir)
}

pub fn run_config(config: JobConfig, command: Command, out_dir: &Path) -> Result<Report, CliError> {
    fs::create_dir_all(out_dir).map_err(|e| output_error(out_dir, e))?;
    let mut files = Vec::new();
    let results = match command {
        Command::Scan => Results::Scan(scan_job(&config, out_dir, &mut files)?),
        Command::Classify => Results::Classify(classify_job(&config)?),
        Command::Witness => Results::Witness(witness_job(&config, out_dir, &mut files)?),
        Command::Simulate => Results::Simulate(simulate_job(&config, out_dir, &mut files)?),
        Command::Abscissa => Results::Abscissa(abscissa_job(&config, out_dir, &mut files)?),
        Command::Certify => Results::Certify(certify_job(&config, out_dir, &mut files)?),
    };
    let report = Report::new(config, command, results, files);
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_file(out_dir, REPORT_FILE, &(json + "\n"))?;
    Ok(report)
}

fn output_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Output {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| output_error(&path, e))
}

/// Shortest decimal that parses back to the same `f64`.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn write_csv(
    dir: &Path,
    files: &mut Vec<String>,
    name: &str,
    header: &[String],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), CliError> {
    let mut body = header.join(",");
    body.push('\n');
    for row in rows {
        body.push_str(&row.join(","));
        body.push('\n');
    }
    write_file(dir, name, &body)?;
    files.push(name.to_string());
    Ok(())
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}

fn scan_job(config: &JobConfig, out: &Path, files: &mut Vec<String>) -> Result<ScanResults, CliError> {
    let opts = config.scan.as_ref().expect("validated");
    let sc = scan(&config.params, &config.spectrum, &opts.grid).during("resolvent-scan/scan")?;
    write_csv(
        out,
        files,
        "scan.csv",
        &header(&["lambda", "norm", "mode_index", "omega", "modes_examined"]),
        sc.points.iter().map(|p| {
            vec![
                num(p.lambda),
                num(p.norm),
                p.mode_index.to_string(),
                num(p.omega),
                p.modes_examined.to_string(),
            ]
        }),
    )?;

    let (fit, fit_note) = match fit_exponent(&sc, opts.fit_decades) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let bounds = opts
        .bound_exponents
        .iter()
        .map(|&s| check_bound(&sc, s))
        .collect::<damped_spectra::Result<Vec<_>>>()
        .during("asymptotics/check_bound")?;
    let k0 = opts
        .k0
        .as_ref()
        .map(|k| estimate_k0(&sc, k.lambda0, &k.log_powers))
        .transpose()
        .during("asymptotics/estimate_k0")?;
    let sup = *sc
        .points
        .iter()
        .max_by(|a, b| a.norm.total_cmp(&b.norm))
        .expect("at least two points");
    Ok(ScanResults {
        points: sc.points.len(),
        truncated: sc.truncated,
        sup,
        fit,
        fit_note,
        bounds,
        k0,
        regularity: classify(config.params.theta()).during("asymptotics/classify")?,
    })
}

fn classify_job(config: &JobConfig) -> Result<ClassifyResults, CliError> {
    let mut thetas = vec![config.params.theta()];
    if let Some(c) = &config.classify {
        thetas.extend(&c.thetas);
    }
    let classes = thetas
        .iter()
        .map(|&t| classify(t))
        .collect::<damped_spectra::Result<Vec<_>>>()
        .during("asymptotics/classify")?;
    print!("{}", regime_table(&thetas).during("asymptotics/classify")?);
    Ok(ClassifyResults { classes })
}

fn witness_targets(config: &JobConfig, opts: &WitnessOptions) -> Result<Vec<(Option<usize>, f64)>, CliError> {
    if let Some(o) = &opts.omegas {
        return Ok(o.iter().map(|&w| (None, w)).collect());
    }
    if let Some(m) = &opts.modes {
        return m
            .iter()
            .map(|&n| Ok((Some(n), config.spectrum.mode_at(n)?)))
            .collect::<damped_spectra::Result<Vec<_>>>()
            .during("spectral-model/mode_at");
    }
    let l = opts.ladder.expect("validated");
    Ok(squared_ladder(l.step, l.count)
        .into_iter()
        .enumerate()
        .map(|(k, w)| (Some(k + 1), w))
        .collect())
}

fn build_witnesses(config: &JobConfig, opts: &WitnessOptions) -> Result<Vec<Witness>, CliError> {
    let kind = match opts.kind {
        KindChoice::NonAnalytic => WitnessKind::NonAnalytic,
        KindChoice::PolyOpt => WitnessKind::PolyOpt,
        KindChoice::Auto if config.params.theta() > 0.5 => WitnessKind::NonAnalytic,
        KindChoice::Auto => WitnessKind::PolyOpt,
    };
    witness_targets(config, opts)?
        .into_iter()
        .map(|(n, omega)| {
            let w = build_witness(&config.params, kind, omega).during("witness/build")?;
            Ok(match n {
                Some(n) => w.with_index(n),
                None => w,
            })
        })
        .collect()
}

fn opt_index(n: Option<usize>) -> String {
    n.map(|n| n.to_string()).unwrap_or_default()
}

fn witness_job(config: &JobConfig, out: &Path, files: &mut Vec<String>) -> Result<WitnessResults, CliError> {
    let witnesses = build_witnesses(config, config.witness.as_ref().expect("validated"))?;
    write_csv(
        out,
        files,
        "witness.csv",
        &header(&["n", "omega", "lambda", "residual", "lower_bound", "hnorm_error"]),
        witnesses.iter().map(|w| {
            vec![
                opt_index(w.n),
                num(w.omega),
                num(w.lambda),
                num(w.residual),
                num(w.lower_bound),
                num(w.hnorm_error),
            ]
        }),
    )?;
    Ok(WitnessResults {
        max_hnorm_error: witnesses.iter().map(|w| w.hnorm_error).fold(0.0, f64::max),
        max_residual_disagreement: witnesses
            .iter()
            .map(|w| w.residual_disagreement())
            .fold(0.0, f64::max),
        witnesses,
    })
}

fn certify_job(config: &JobConfig, out: &Path, files: &mut Vec<String>) -> Result<CertifyResults, CliError> {
    let witnesses = build_witnesses(config, config.certify.as_ref().expect("validated"))?;
    let certificates = witnesses
        .iter()
        .map(|w| {
            let lower_bound = certify_lower_bound(&config.params, w).during("witness/certify_lower_bound")?;
            let modal_norm =
                modal_resolvent_norm(&config.params, w.omega, w.lambda).during("modal-operator/resolvent_norm")?;
            Ok(Certificate {
                n: w.n,
                omega: w.omega,
                lambda: w.lambda,
                lower_bound,
                modal_norm,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    write_csv(
        out,
        files,
        "certify.csv",
        &header(&["n", "omega", "lambda", "lower_bound", "modal_norm"]),
        certificates.iter().map(|c| {
            vec![opt_index(c.n), num(c.omega), num(c.lambda), num(c.lower_bound), num(c.modal_norm)]
        }),
    )?;
    Ok(CertifyResults { certificates })
}

fn initial_data(config: &JobConfig, initial: &InitialSpec) -> damped_spectra::Result<InitialData> {
    let p = &config.params;
    match initial {
        InitialSpec::Smooth { modes } => InitialData::smooth(p, &config.spectrum, *modes),
        InitialSpec::Random { modes } => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let modes = (1..=*modes)
                .map(|n| {
                    let omega = config.spectrum.mode_at(n)?;
                    let y = damped_spectra::smallmat::CVec(
                        (0..4)
                            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / omega)
                            .collect(),
                    );
                    Ok((n, ModalState::from_weighted(p, omega, &y)))
                })
                .collect::<damped_spectra::Result<Vec<_>>>()?;
            InitialData::new(modes)
        }
        InitialSpec::Explicit { modes } => {
            let c = |x: [f64; 2]| Complex64::new(x[0], x[1]);
            let modes = modes
                .iter()
                .map(|m| {
                    let omega = config.spectrum.mode_at(m.n)?;
                    Ok((m.n, ModalState::new(omega, c(m.u), c(m.v), c(m.w), c(m.z))))
                })
                .collect::<damped_spectra::Result<Vec<_>>>()?;
            InitialData::new(modes)
        }
    }
}

fn simulate_job(config: &JobConfig, out: &Path, files: &mut Vec<String>) -> Result<SimulateResults, CliError> {
    let opts = config.simulate.as_ref().expect("validated");
    let p = &config.params;
    let data = initial_data(config, &opts.initial).during("semigroup-sim/initial_data")?;
    let times = uniform_times(opts.t_end, opts.points);
    let trace = evolve(p, &data, &times).during("semigroup-sim/evolve")?;

    let mut cols = header(&["t", "total_norm"]);
    if trace.q_norm.is_some() {
        cols.push("q_norm".into());
        cols.push("p_norm".into());
    }
    if opts.mode_columns {
        cols.extend(trace.mode_indices.iter().map(|n| format!("mode_{n}_norm")));
    }
    let rows = (0..trace.times.len()).map(|j| {
        let mut row = vec![num(trace.times[j]), num(trace.total_norm[j])];
        if let (Some(q), Some(pn)) = (&trace.q_norm, &trace.p_norm) {
            row.push(num(q[j]));
            row.push(num(pn[j]));
        }
        if opts.mode_columns {
            row.extend(trace.mode_norms.iter().map(|m| num(m[j])));
        }
        row
    });
    write_csv(out, files, "trace.csv", &cols, rows)?;

    let fits = opts
        .fits
        .iter()
        .map(|&m| fit_decay(&trace, m))
        .collect::<damped_spectra::Result<Vec<_>>>()
        .during("semigroup-sim/fit_decay")?;
    let q_norm_drift = trace.q_norm.as_ref().map(|q| {
        q.iter()
            .map(|x| (x - q[0]).abs() / q[0].max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    });
    let dissipation = match opts.dissipation_samples {
        Some(m) if trace.damped => {
            let sample_times: Vec<f64> =
                (1..=m).map(|k| opts.t_end * k as f64 / (m + 1) as f64).collect();
            let samples = dissipation_identity(p, &data, &sample_times).during("semigroup-sim/dissipation_identity")?;
            Some(DissipationSummary {
                samples: samples.len(),
                max_relative_error: samples.iter().map(|s| s.relative_error).fold(0.0, f64::max),
            })
        }
        _ => None,
    };
    Ok(SimulateResults {
        modes: trace.mode_indices.clone(),
        samples: trace.times.len(),
        damped: trace.damped,
        initial_norm: trace.total_norm[0],
        final_norm: *trace.total_norm.last().expect("nonempty"),
        graph_norm: trace.graph_norm,
        fits,
        q_norm_drift,
        dissipation,
    })
}

fn abscissa_job(config: &JobConfig, out: &Path, files: &mut Vec<String>) -> Result<AbscissaResults, CliError> {
    let opts = config.abscissa.as_ref().expect("validated");
    let entries = opts
        .modes
        .iter()
        .map(|&n_max| {
            Ok(AbscissaEntry {
                n_max,
                abscissa: spectral_abscissa(&config.params, &config.spectrum, n_max)?,
            })
        })
        .collect::<damped_spectra::Result<Vec<_>>>()
        .during("semigroup-sim/spectral_abscissa")?;
    write_csv(
        out,
        files,
        "abscissa.csv",
        &header(&["n_max", "value", "mode_index", "omega"]),
        entries.iter().map(|e| {
            vec![
                e.n_max.to_string(),
                num(e.abscissa.value),
                e.abscissa.mode_index.to_string(),
                num(e.abscissa.omega),
            ]
        }),
    )?;
    let relative_change = match entries.as_slice() {
        [.., x, y] if x.abscissa.value != 0.0 => {
            Some((y.abscissa.value - x.abscissa.value).abs() / x.abscissa.value.abs())
        }
        _ => None,
    };
    Ok(AbscissaResults {
        entries,
        relative_change,
    })
}

/// One-line summary printed after a successful run.
pub fn summary(report: &Report) -> String {
    let mut s = String::new();
    match &report.results {
        Results::Scan(r) => {
            let _ = write!(s, "{} points, sup R = {:e} at lambda = {:e}", r.points, r.sup.norm, r.sup.lambda);
            if let Some(f) = &r.fit {
                let _ = write!(s, ", trailing slope {:.4}", f.slope);
            }
        }
        Results::Classify(r) => {
            let _ = write!(s, "{} theta value(s) classified", r.classes.len());
        }
        Results::Witness(r) => {
            let _ = write!(
                s,
                "{} witnesses, max |hnorm - 1| = {:e}",
                r.witnesses.len(),
                r.max_hnorm_error
            );
        }
        Results::Certify(r) => {
            let _ = write!(s, "{} lower bounds certified", r.certificates.len());
        }
        Results::Simulate(r) => {
            let _ = write!(s, "{} samples, ||Z|| {:e} -> {:e}", r.samples, r.initial_norm, r.final_norm);
        }
        Results::Abscissa(r) => {
            if let Some(e) = r.entries.last() {
                let _ = write!(s, "abscissa {:e} with {} modes", e.abscissa.value, e.n_max);
            }
        }
    }
    s
}
