//! Job configuration: one JSON document per run.

use damped_spectra::simulate::DecayModel;
use damped_spectra::{ScanConfig, SpectrumModel, SystemParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Scan,
    Classify,
    Witness,
    Simulate,
    Abscissa,
    Certify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Scan => "scan",
            Command::Classify => "classify",
            Command::Witness => "witness",
            Command::Simulate => "simulate",
            Command::Abscissa => "abscissa",
            Command::Certify => "certify",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    /// Optional; when present it must match the subcommand.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    pub params: SystemParams,
    pub spectrum: SpectrumModel,
    /// Seed for randomly drawn initial data.
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classify: Option<ClassifyOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abscissa: Option<AbscissaOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certify: Option<WitnessOptions>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanOptions {
    pub grid: ScanConfig,
    /// Trailing window, in decades, for the log-log slope.
    #[serde(default = "default_fit_decades")]
    pub fit_decades: f64,
    /// Exponents `s` for which `sup lambda^s R(lambda)` is reported.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bound_exponents: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<K0Options>,
}

fn default_fit_decades() -> f64 {
    damped_spectra::asymptotics::DEFAULT_FIT_DECADES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct K0Options {
    pub lambda0: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub log_powers: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ClassifyOptions {
    /// Extra theta values to classify next to `params.theta`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub thetas: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum KindChoice {
    /// Non-analytic construction for theta > 1/2, the optimality one otherwise.
    #[default]
    Auto,
    NonAnalytic,
    PolyOpt,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ladder {
    pub step: f64,
    pub count: usize,
}

/// Exactly one of `omegas`, `modes`, `ladder` selects where witnesses live.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessOptions {
    #[serde(default)]
    pub kind: KindChoice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omegas: Option<Vec<f64>>,
    /// Mode indices into the configured spectrum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<usize>>,
    /// `omega_n = (step n)^2`, `n = 1..=count`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder: Option<Ladder>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub n: usize,
    /// Coefficients as `[re, im]` in the raw coordinates `(u, v, w, z)`.
    pub u: [f64; 2],
    pub v: [f64; 2],
    pub w: [f64; 2],
    pub z: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialSpec {
    /// Modes `1..=modes`, weighted coordinates `(1, 1, 1, 1) / omega_n`.
    Smooth { modes: usize },
    /// Modes `1..=modes`, weighted coordinates uniform in the unit square
    /// divided by `omega_n`, drawn from the configured seed.
    Random { modes: usize },
    Explicit { modes: Vec<ModeSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateOptions {
    pub t_end: f64,
    /// Uniform samples on `[0, t_end]`.
    pub points: usize,
    pub initial: InitialSpec,
    /// Emit one `mode_<n>_norm` column per mode.
    #[serde(default = "yes")]
    pub mode_columns: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fits: Vec<DecayModel>,
    /// Interior sample times for the energy identity check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dissipation_samples: Option<usize>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbscissaOptions {
    /// Truncation levels; the abscissa is reported for each.
    pub modes: Vec<usize>,
}

impl JobConfig {
    /// Parses and validates. Errors carry the line of the offending field.
    pub fn parse(text: &str, command: Command) -> Result<Self, CliError> {
        let config: JobConfig = serde_json::from_str(text).map_err(|e| CliError::Config {
            line: (e.line() > 0).then(|| e.line()),
            message: e.to_string(),
        })?;
        config.validate(command).map_err(|(key, message)| CliError::Config {
            line: key.and_then(|k| line_of(text, k)),
            message,
        })?;
        Ok(config)
    }

    /// Cross-field checks serde cannot express. On failure returns the JSON
    /// key the problem belongs to, if any.
    pub fn validate(&self, command: Command) -> Result<(), (Option<&'static str>, String)> {
        if let Some(c) = self.command {
            if c != command {
                return Err((
                    Some("command"),
                    format!("config is for '{}' but '{}' was requested", c.name(), command.name()),
                ));
            }
        }
        let missing = |key: &'static str| (None, format!("command '{key}' needs a \"{key}\" section"));
        match command {
            Command::Scan => {
                let s = self.scan.as_ref().ok_or_else(|| missing("scan"))?;
                s.grid.validate().map_err(|e| (Some("grid"), e.to_string()))?;
                if !(s.fit_decades > 0.0 && s.fit_decades.is_finite()) {
                    return Err((Some("fit_decades"), "fit_decades must be positive".into()));
                }
                if s.bound_exponents.iter().any(|x| !x.is_finite()) {
                    return Err((Some("bound_exponents"), "bound exponents must be finite".into()));
                }
                if let Some(k) = &s.k0 {
                    if !(k.lambda0 > 1.0 && k.lambda0.is_finite()) {
                        return Err((Some("lambda0"), "lambda0 must exceed 1".into()));
                    }
                }
                self.params
                    .require_damped("scan")
                    .map_err(|e| (Some("params"), e.to_string()))?;
            }
            Command::Classify => {
                let extra = self.classify.clone().unwrap_or_default();
                if let Some(t) = extra.thetas.iter().find(|t| !(-1.0..=1.0).contains(*t)) {
                    return Err((Some("thetas"), format!("theta must lie in [-1, 1], got {t}")));
                }
            }
            Command::Witness | Command::Certify => {
                let key = command.name();
                let w = match command {
                    Command::Witness => self.witness.as_ref(),
                    _ => self.certify.as_ref(),
                }
                .ok_or_else(|| missing(key))?;
                w.validate(&self.spectrum).map_err(|(k, m)| (k.or(Some(key)), m))?;
                self.params
                    .require_distinct(key)
                    .map_err(|e| (Some("params"), e.to_string()))?;
                self.params
                    .require_damped(key)
                    .map_err(|e| (Some("params"), e.to_string()))?;
            }
            Command::Simulate => {
                let s = self.simulate.as_ref().ok_or_else(|| missing("simulate"))?;
                if !(s.t_end > 0.0 && s.t_end.is_finite()) {
                    return Err((Some("t_end"), "t_end must be positive".into()));
                }
                if s.points < 2 {
                    return Err((Some("points"), "points must be at least 2".into()));
                }
                match &s.initial {
                    InitialSpec::Smooth { modes } | InitialSpec::Random { modes } => {
                        if *modes == 0 {
                            return Err((Some("initial"), "initial data needs at least one mode".into()));
                        }
                        self.check_mode(*modes).map_err(|m| (Some("initial"), m))?;
                    }
                    InitialSpec::Explicit { modes } => {
                        if modes.is_empty() {
                            return Err((Some("initial"), "initial data needs at least one mode".into()));
                        }
                        for m in modes {
                            self.check_mode(m.n).map_err(|msg| (Some("initial"), msg))?;
                        }
                    }
                }
                if s.dissipation_samples == Some(0) {
                    return Err((Some("dissipation_samples"), "need at least one sample".into()));
                }
            }
            Command::Abscissa => {
                let a = self.abscissa.as_ref().ok_or_else(|| missing("abscissa"))?;
                if a.modes.is_empty() {
                    return Err((Some("abscissa"), "list at least one truncation level".into()));
                }
                for &n in &a.modes {
                    self.check_mode(n).map_err(|m| (Some("abscissa"), m))?;
                }
            }
        }
        Ok(())
    }

    fn check_mode(&self, n: usize) -> Result<(), String> {
        if n == 0 {
            return Err("mode indices start at 1".into());
        }
        self.spectrum.mode_at(n).map(|_| ()).map_err(|e| e.to_string())
    }
}

impl WitnessOptions {
    fn validate(&self, spectrum: &SpectrumModel) -> Result<(), (Option<&'static str>, String)> {
        let given = [self.omegas.is_some(), self.modes.is_some(), self.ladder.is_some()];
        if given.iter().filter(|g| **g).count() != 1 {
            return Err((None, "give exactly one of \"omegas\", \"modes\", \"ladder\"".into()));
        }
        if let Some(o) = &self.omegas {
            if o.is_empty() || o.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                return Err((Some("omegas"), "omegas must be a nonempty list of positive numbers".into()));
            }
        }
        if let Some(m) = &self.modes {
            if m.is_empty() {
                return Err((Some("modes"), "modes must be nonempty".into()));
            }
            for &n in m {
                if n == 0 {
                    return Err((Some("modes"), "mode indices start at 1".into()));
                }
                spectrum.mode_at(n).map_err(|e| (Some("modes"), e.to_string()))?;
            }
        }
        if let Some(l) = &self.ladder {
            if !(l.step > 0.0 && l.step.is_finite()) || l.count == 0 {
                return Err((Some("ladder"), "ladder needs step > 0 and count >= 1".into()));
            }
        }
        Ok(())
    }
}

/// 1-based line of the first occurrence of `"key"` in the document.
fn line_of(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}
