//! Experiment settings as they appear in config files and manifests.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::BoundMode;
use crate::experiments::{Spacing, DESK_DT_LIST, DESK_MAX_STEPS, DESK_T_END};
use crate::schemes::Scheme;

use super::CliError;

/// Which error series a time-series diagnostic reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Series {
    #[serde(rename = "E_r")]
    RoundOff,
    #[serde(rename = "E_t")]
    Truncation,
}

impl Series {
    pub fn column(self) -> &'static str {
        match self {
            Series::RoundOff => "E_r",
            Series::Truncation => "E_t",
        }
    }
}

impl std::str::FromStr for Series {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "E_r" => Ok(Series::RoundOff),
            "E_t" => Ok(Series::Truncation),
            other => Err(format!("unknown series {other:?} (expected E_r or E_t)")),
        }
    }
}

pub(crate) fn parse_mode(s: &str) -> Result<BoundMode, String> {
    match s {
        "worst" | "worst_case" => Ok(BoundMode::WorstCase),
        "random" | "random_walk" => Ok(BoundMode::RandomWalk),
        other => Err(format!("unknown bound mode {other:?} (expected worst_case or random_walk)")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Diagnostic {
    Ect,
    Os,
    Spectral,
    Drift,
    Residual,
    Bound,
}

impl Diagnostic {
    pub fn name(self) -> &'static str {
        match self {
            Diagnostic::Ect => "ect",
            Diagnostic::Os => "os",
            Diagnostic::Spectral => "spectral",
            Diagnostic::Drift => "drift",
            Diagnostic::Residual => "residual",
            Diagnostic::Bound => "bound",
        }
    }
}

/// Every setting any command reads. In a config file all fields are
/// optional; after resolution the fields a command uses are all present,
/// and that resolved form is what a manifest records.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<Diagnostic>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Scheme>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt_list: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_run: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_ref: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing: Option<Spacing>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<Series>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<BoundMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
}

macro_rules! overlay_fields {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl Settings {
    /// Fields set in `top` win over fields set in `self`.
    pub fn overlay(mut self, top: &Settings) -> Settings {
        overlay_fields!(self, top; diagnostic, scheme, a, b, t_end, dt, dt_list, p_run, p_ref,
            samples, spacing, max_steps, threshold, series, mode, input);
        self
    }

    /// Reads a JSON settings file. A manifest is accepted too, in which
    /// case its recorded settings are used.
    pub fn load(path: &Path) -> Result<Settings, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {} is not valid JSON: {e}", path.display())))?;
        let inner = match value.get("config") {
            Some(c) if value.get("artifact").is_some() => c.clone(),
            _ => value,
        };
        serde_json::from_value(inner).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    fn base() -> Settings {
        Settings {
            scheme: Some(Scheme::MidpointImplicit),
            a: Some(0.1),
            b: Some(0.2),
            p_run: Some(24),
            p_ref: Some(113),
            max_steps: Some(DESK_MAX_STEPS),
            ..Settings::default()
        }
    }

    pub fn sweep_defaults() -> Settings {
        Settings { t_end: Some(DESK_T_END), dt_list: Some(DESK_DT_LIST.to_vec()), ..Settings::base() }
    }

    pub fn longrun_defaults() -> Settings {
        Settings {
            t_end: Some(1e3),
            dt: Some(1e-3),
            samples: Some(100),
            spacing: Some(Spacing::Log),
            ..Settings::base()
        }
    }

    /// Only the fields the given diagnostic reads get defaults.
    pub fn diagnose_defaults(kind: Diagnostic) -> Settings {
        let base = Settings { diagnostic: Some(kind), ..Settings::default() };
        match kind {
            Diagnostic::Ect => Settings { series: Some(Series::RoundOff), ..base },
            Diagnostic::Os => base,
            Diagnostic::Spectral => Settings {
                scheme: Some(Scheme::MidpointImplicit),
                a: Some(0.1),
                b: Some(0.2),
                dt: Some(1e-2),
                ..base
            },
            Diagnostic::Drift => Settings {
                t_end: Some(10.0),
                dt: Some(1e-2),
                samples: Some(100),
                spacing: Some(Spacing::Log),
                ..Settings::base().overlay(&base)
            },
            Diagnostic::Residual => Settings {
                scheme: Some(Scheme::ForwardEuler),
                t_end: Some(1.0),
                dt: Some(1e-2),
                ..Settings::base().overlay(&base)
            },
            Diagnostic::Bound => Settings {
                t_end: Some(DESK_T_END),
                dt: Some(1e-3),
                mode: Some(BoundMode::RandomWalk),
                ..Settings::base().overlay(&base)
            },
        }
    }

    /// Drops every field the diagnostic does not read, so the manifest
    /// records only what mattered.
    pub fn restrict_to(self, kind: Diagnostic) -> Settings {
        let keep = Settings::diagnose_defaults(kind);
        let mut out = Settings { diagnostic: Some(kind), ..Settings::default() };
        macro_rules! keep_if {
            ($($f:ident),*) => { $( if keep.$f.is_some() { out.$f = self.$f.clone(); } )* };
        }
        keep_if!(scheme, a, b, t_end, dt, dt_list, p_run, p_ref, samples, spacing, max_steps, mode, series);
        match kind {
            Diagnostic::Ect => {
                out.threshold = self.threshold;
                out.input = self.input;
            }
            Diagnostic::Os => out.input = self.input,
            _ => {}
        }
        out
    }
}
