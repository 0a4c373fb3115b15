//! The machine-readable report written next to the CSV files.

use damped_spectra::asymptotics::{BoundCheck, DifferentiabilityEstimate, ExponentFit, RegularityClass};
use damped_spectra::scan::ScanPoint;
use damped_spectra::simulate::{Abscissa, DecayFit};
use damped_spectra::Witness;
use serde::{Deserialize, Serialize};

use crate::config::{Command, JobConfig};
use crate::error::CliError;

pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub core_version: String,
    pub command: Command,
    /// The validated input, echoed.
    pub config: JobConfig,
    pub results: Results,
    /// Data files written alongside, relative to the output directory.
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum Results {
    Scan(ScanResults),
    Classify(ClassifyResults),
    Witness(WitnessResults),
    Simulate(SimulateResults),
    Abscissa(AbscissaResults),
    Certify(CertifyResults),
}

impl Results {
    fn command(&self) -> Command {
        match self {
            Results::Scan(_) => Command::Scan,
            Results::Classify(_) => Command::Classify,
            Results::Witness(_) => Command::Witness,
            Results::Simulate(_) => Command::Simulate,
            Results::Abscissa(_) => Command::Abscissa,
            Results::Certify(_) => Command::Certify,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanResults {
    pub points: usize,
    /// The spectrum is an explicit list, so suprema cover only its modes.
    pub truncated: bool,
    /// Largest sample on the grid.
    pub sup: ScanPoint,
    pub fit: Option<ExponentFit>,
    /// Why no fit was produced, if none was.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_note: Option<String>,
    pub bounds: Vec<BoundCheck>,
    pub k0: Option<DifferentiabilityEstimate>,
    pub regularity: RegularityClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyResults {
    pub classes: Vec<RegularityClass>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessResults {
    pub witnesses: Vec<Witness>,
    pub max_hnorm_error: f64,
    pub max_residual_disagreement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub n: Option<usize>,
    pub omega: f64,
    pub lambda: f64,
    /// Certified `1 / residual`.
    pub lower_bound: f64,
    /// Modal resolvent norm at the same point; never below `lower_bound`
    /// beyond roundoff.
    pub modal_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyResults {
    pub certificates: Vec<Certificate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DissipationSummary {
    pub samples: usize,
    pub max_relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateResults {
    pub modes: Vec<usize>,
    pub samples: usize,
    pub damped: bool,
    pub initial_norm: f64,
    pub final_norm: f64,
    pub graph_norm: f64,
    pub fits: Vec<DecayFit>,
    /// Equal stiffness only: largest relative change of the `q` norm.
    pub q_norm_drift: Option<f64>,
    pub dissipation: Option<DissipationSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbscissaEntry {
    pub n_max: usize,
    pub abscissa: Abscissa,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbscissaResults {
    pub entries: Vec<AbscissaEntry>,
    /// Relative change between the last two truncation levels.
    pub relative_change: Option<f64>,
}

impl Report {
    pub fn new(config: JobConfig, command: Command, results: Results, files: Vec<String>) -> Self {
        Report {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            core_version: damped_spectra::VERSION.to_string(),
            command,
            config,
            results,
            files,
        }
    }

    /// Re-parses a report and applies the same validation as a fresh config.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let report: Report = serde_json::from_str(text).map_err(|e| CliError::Config {
            line: (e.line() > 0).then(|| e.line()),
            message: e.to_string(),
        })?;
        report.validate()?;
        Ok(report)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.config
            .validate(self.command)
            .map_err(|(_, message)| CliError::Config { line: None, message })?;
        if self.results.command() != self.command {
            return Err(CliError::Config {
                line: None,
                message: format!(
                    "report for '{}' carries '{}' results",
                    self.command.name(),
                    self.results.command().name()
                ),
            });
        }
        Ok(())
    }
}
