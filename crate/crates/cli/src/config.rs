//! Run configuration: what the user asked for ([`RunConfig`]) and what will
//! actually run once every default is filled in ([`Resolved`]).

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use spin_ibr::noise::default_sigma_over_n_grid;
use spin_ibr::optimizer::DEFAULT_MAX_ANGLE;
use spin_ibr::prep::{PrepScheme, SchemeKind};
use spin_ibr::readout::ReadoutKind;

use crate::grid::GridSpec;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    NqcrbCurve,
    CfiSweep,
    ProbSnapshot,
    OptVerify,
    BoundCert,
    Husimi,
    StateReport,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::NqcrbCurve,
        Command::CfiSweep,
        Command::ProbSnapshot,
        Command::OptVerify,
        Command::BoundCert,
        Command::Husimi,
        Command::StateReport,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::NqcrbCurve => "nqcrb-curve",
            Command::CfiSweep => "cfi-sweep",
            Command::ProbSnapshot => "prob-snapshot",
            Command::OptVerify => "opt-verify",
            Command::BoundCert => "bound-cert",
            Command::Husimi => "husimi",
            Command::StateReport => "state-report",
        }
    }

    /// Scheme used when the config names none; `None` for commands without a state.
    pub fn default_scheme(self) -> Option<PrepScheme> {
        match self {
            Command::CfiSweep | Command::StateReport => Some(PrepScheme::new(SchemeKind::Oat, 100)),
            Command::ProbSnapshot | Command::Husimi => Some(PrepScheme::new(SchemeKind::Oat, 20).with_r(0.2)),
            _ => None,
        }
    }

    /// Config fields the command reads, besides `command`, `seed` and `out`.
    pub fn fields(self) -> &'static [&'static str] {
        match self {
            Command::NqcrbCurve => &["n_values", "sigma_over_n"],
            Command::CfiSweep => &["scheme", "readouts", "sigmas", "phis"],
            Command::ProbSnapshot => &["scheme", "sigma", "dphi"],
            Command::OptVerify => &["n", "sigma", "f0", "iterations", "max_angle", "trace_stride"],
            Command::BoundCert => &["n", "sigma", "f0", "samples"],
            Command::Husimi => &["scheme", "theta_points", "phi_points"],
            Command::StateReport => &["scheme"],
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

/// Everything a run can be told, as read from a JSON file and/or flags.
/// Fields a command does not use must be absent.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<PrepScheme>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readouts: Option<Vec<ReadoutKind>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigmas: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phis: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_values: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_over_n: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dphi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_stride: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    fn present(&self) -> Vec<&'static str> {
        let flags = [
            ("scheme", self.scheme.is_some()),
            ("readouts", self.readouts.is_some()),
            ("sigmas", self.sigmas.is_some()),
            ("phis", self.phis.is_some()),
            ("n_values", self.n_values.is_some()),
            ("sigma_over_n", self.sigma_over_n.is_some()),
            ("sigma", self.sigma.is_some()),
            ("dphi", self.dphi.is_some()),
            ("n", self.n.is_some()),
            ("f0", self.f0.is_some()),
            ("iterations", self.iterations.is_some()),
            ("samples", self.samples.is_some()),
            ("max_angle", self.max_angle.is_some()),
            ("trace_stride", self.trace_stride.is_some()),
            ("theta_points", self.theta_points.is_some()),
            ("phi_points", self.phi_points.is_some()),
        ];
        flags.into_iter().filter(|(_, set)| *set).map(|(name, _)| name).collect()
    }

    /// Fills in defaults and validates everything the command will use.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let command = self.command.ok_or_else(|| bad("no command given"))?;
        if let Some(extra) = self.present().into_iter().find(|f| !command.fields().contains(f)) {
            return Err(bad(format!("field `{extra}` is not used by {command}")));
        }
        let seed = self.seed.unwrap_or(0);
        let out = self.out.clone().unwrap_or_else(|| PathBuf::from("."));
        let params = match command {
            Command::NqcrbCurve => {
                let n_values = self.n_values.clone().unwrap_or_else(|| vec![10, 100, 1000]);
                if n_values.is_empty() || n_values.contains(&0) {
                    return Err(bad("n_values must be non-empty and at least 1"));
                }
                let sigma_over_n = grid(&self.sigma_over_n, "sigma_over_n")?.unwrap_or_else(default_sigma_over_n_grid);
                non_negative(&sigma_over_n, "sigma_over_n")?;
                Params::NqcrbCurve { n_values, sigma_over_n }
            }
            Command::CfiSweep => {
                let scheme = scheme_or(&self.scheme, command)?;
                let readouts = match &self.readouts {
                    Some(r) if r.is_empty() => return Err(bad("readouts must not be empty")),
                    Some(r) => r.clone(),
                    None => default_readouts(scheme.kind),
                };
                for r in &readouts {
                    check_readout(*r, &scheme)?;
                }
                let sigmas = grid(&self.sigmas, "sigmas")?.unwrap_or_else(|| (0..=20).map(|k| k as f64 * 0.5).collect());
                non_negative(&sigmas, "sigmas")?;
                let phis = grid(&self.phis, "phis")?;
                Params::CfiSweep { scheme, readouts, sigmas, phis }
            }
            Command::ProbSnapshot => {
                let scheme = scheme_or(&self.scheme, command)?;
                if !scheme.kind.is_pure() {
                    return Err(bad("prob-snapshot needs a pure scheme (its panels use the optimal readout)"));
                }
                let sigma = non_negative_value(self.sigma.unwrap_or(3.0), "sigma")?;
                let dphi = self.dphi.unwrap_or(1.0 / scheme.n as f64);
                if !dphi.is_finite() {
                    return Err(bad("dphi must be finite"));
                }
                Params::ProbSnapshot { scheme, sigma, dphi }
            }
            Command::OptVerify => {
                let n = particles(self.n.unwrap_or(10))?;
                if n < 4 {
                    return Err(bad("opt-verify needs n >= 4 for its spread start"));
                }
                let iterations = self.iterations.unwrap_or(100_000);
                let trace_stride = self.trace_stride.unwrap_or(100);
                if trace_stride == 0 {
                    return Err(bad("trace_stride must be at least 1"));
                }
                let max_angle = self.max_angle.unwrap_or(DEFAULT_MAX_ANGLE);
                if !(max_angle.is_finite() && max_angle > 0.0) {
                    return Err(bad("max_angle must be positive"));
                }
                Params::OptVerify {
                    n,
                    sigma: non_negative_value(self.sigma.unwrap_or(4.0), "sigma")?,
                    f0: non_negative_value(self.f0.unwrap_or(1.0), "f0")?,
                    iterations,
                    max_angle,
                    trace_stride,
                }
            }
            Command::BoundCert => Params::BoundCert {
                n: particles(self.n.unwrap_or(10))?,
                sigma: non_negative_value(self.sigma.unwrap_or(4.0), "sigma")?,
                f0: non_negative_value(self.f0.unwrap_or(1.0), "f0")?,
                samples: match self.samples.unwrap_or(10_000) {
                    0 => return Err(bad("samples must be at least 1")),
                    s => s,
                },
            },
            Command::Husimi => {
                let scheme = scheme_or(&self.scheme, command)?;
                let theta_points = self.theta_points.unwrap_or(200);
                let phi_points = self.phi_points.unwrap_or(400);
                if theta_points < 2 || phi_points < 1 {
                    return Err(bad("need theta_points >= 2 and phi_points >= 1"));
                }
                Params::Husimi { scheme, theta_points, phi_points }
            }
            Command::StateReport => Params::StateReport {
                scheme: scheme_or(&self.scheme, command)?,
            },
        };
        Ok(Resolved { seed, out, params })
    }
}

/// A fully specified run. Serialised into every sidecar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub seed: u64,
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(flatten)]
    pub params: Params,
}

impl Resolved {
    pub fn command(&self) -> Command {
        match self.params {
            Params::NqcrbCurve { .. } => Command::NqcrbCurve,
            Params::CfiSweep { .. } => Command::CfiSweep,
            Params::ProbSnapshot { .. } => Command::ProbSnapshot,
            Params::OptVerify { .. } => Command::OptVerify,
            Params::BoundCert { .. } => Command::BoundCert,
            Params::Husimi { .. } => Command::Husimi,
            Params::StateReport { .. } => Command::StateReport,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Params {
    NqcrbCurve {
        n_values: Vec<usize>,
        sigma_over_n: Vec<f64>,
    },
    CfiSweep {
        scheme: PrepScheme,
        readouts: Vec<ReadoutKind>,
        sigmas: Vec<f64>,
        /// `None` means each readout's default grid, listed in the sidecar results.
        phis: Option<Vec<f64>>,
    },
    ProbSnapshot {
        scheme: PrepScheme,
        sigma: f64,
        dphi: f64,
    },
    OptVerify {
        n: usize,
        sigma: f64,
        f0: f64,
        iterations: usize,
        max_angle: f64,
        trace_stride: usize,
    },
    BoundCert {
        n: usize,
        sigma: f64,
        f0: f64,
        samples: u64,
    },
    Husimi {
        scheme: PrepScheme,
        theta_points: usize,
        phi_points: usize,
    },
    StateReport {
        scheme: PrepScheme,
    },
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn grid(spec: &Option<GridSpec>, name: &str) -> Result<Option<Vec<f64>>, CliError> {
    spec.as_ref()
        .map(|g| g.values().map_err(|e| bad(format!("{name}: {e}"))))
        .transpose()
}

fn non_negative(v: &[f64], name: &str) -> Result<(), CliError> {
    match v.iter().find(|x| **x < 0.0) {
        Some(x) => Err(bad(format!("{name}: negative value {x}"))),
        None => Ok(()),
    }
}

fn non_negative_value(x: f64, name: &str) -> Result<f64, CliError> {
    if x.is_finite() && x >= 0.0 {
        Ok(x)
    } else {
        Err(bad(format!("{name} must be finite and non-negative, got {x}")))
    }
}

fn particles(n: usize) -> Result<usize, CliError> {
    if n == 0 {
        Err(bad("n must be at least 1"))
    } else {
        Ok(n)
    }
}

fn scheme_or(given: &Option<PrepScheme>, command: Command) -> Result<PrepScheme, CliError> {
    let s = match given {
        Some(s) => s.clone(),
        None => command.default_scheme().expect("command prepares a state"),
    };
    s.validate().map_err(|e| bad(format!("scheme: {e}")))?;
    Ok(s.resolved())
}

/// NONE_LINEAR, ECHO, the flip variant for the scheme and (pure schemes) OPTIMAL.
pub fn default_readouts(kind: SchemeKind) -> Vec<ReadoutKind> {
    let flip = if kind == SchemeKind::Qpt {
        ReadoutKind::FlipPrimeEcho
    } else {
        ReadoutKind::FlipEcho
    };
    let mut r = vec![ReadoutKind::NoneLinear, ReadoutKind::Echo, flip];
    if kind.is_pure() {
        r.push(ReadoutKind::Optimal);
    }
    r
}

fn check_readout(r: ReadoutKind, scheme: &PrepScheme) -> Result<(), CliError> {
    if r == ReadoutKind::Optimal && !scheme.kind.is_pure() {
        return Err(bad(format!("readout OPTIMAL needs a pure scheme, not {}", scheme.kind)));
    }
    if r == ReadoutKind::FlipPrimeEcho && scheme.n % 2 == 1 {
        return Err(bad("readout FLIP_PRIME_ECHO needs an even particle number"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_explicit() {
        let cfg = RunConfig::from_json(r#"{"command":"cfi-sweep"}"#).unwrap();
        let r = cfg.resolve().unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.starts_with(r#"{"seed":0,"command":"cfi-sweep","scheme":{"kind":"OAT","n":100,"r":0.2},"readouts":["NONE_LINEAR","ECHO","FLIP_ECHO","OPTIMAL"],"sigmas":[0.0,0.5,"#));
        assert!(json.ends_with(r#""phis":null}"#));
    }

    #[test]
    fn qpt_defaults_use_modified_flip() {
        assert_eq!(default_readouts(SchemeKind::Qpt)[2], ReadoutKind::FlipPrimeEcho);
        assert!(!default_readouts(SchemeKind::Qnd).contains(&ReadoutKind::Optimal));
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            r#"{}"#,
            r#"{"command":"cfi-sweep","bogus":1}"#,
            r#"{"command":"cfi-sweep","sigmas":[]}"#,
            r#"{"command":"cfi-sweep","sigmas":"lin:0:1:0"}"#,
            r#"{"command":"cfi-sweep","sigmas":[-1]}"#,
            r#"{"command":"cfi-sweep","readouts":["OPTIMAL"],"scheme":{"kind":"QND","n":10}}"#,
            r#"{"command":"nqcrb-curve","phis":[0.1]}"#,
            r#"{"command":"bound-cert","samples":0}"#,
            r#"{"command":"opt-verify","n":0}"#,
            r#"{"command":"husimi","theta_points":1}"#,
            r#"{"command":"prob-snapshot","scheme":{"kind":"QND","n":10}}"#,
            r#"{"command":"teleport"}"#,
        ] {
            let res = RunConfig::from_json(text).and_then(|c| c.resolve());
            assert!(matches!(res, Err(CliError::Config(_))), "{text}");
        }
    }
}
