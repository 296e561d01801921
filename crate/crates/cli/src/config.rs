use crate::error::{CliError, Result};
use qillum::fock::TruncationSpec;
use qillum::receivers::OpaConfig;
use qillum::ScenarioParams;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// One output curve, named after its CSV column without the `pe_` prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Curve {
    QcbTmsv,
    QcbCoherent,
    OpaExact,
    OpaGauss,
    PcGauss,
    Hom,
}

impl Curve {
    pub const ALL: [Curve; 6] = [
        Curve::QcbTmsv,
        Curve::QcbCoherent,
        Curve::OpaExact,
        Curve::OpaGauss,
        Curve::PcGauss,
        Curve::Hom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Curve::QcbTmsv => "qcb_tmsv",
            Curve::QcbCoherent => "qcb_coherent",
            Curve::OpaExact => "opa_exact",
            Curve::OpaGauss => "opa_gauss",
            Curve::PcGauss => "pc_gauss",
            Curve::Hom => "hom",
        }
    }

    pub fn column(self) -> String {
        format!("pe_{}", self.name())
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Curve {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bare = s.trim().strip_prefix("pe_").unwrap_or(s.trim());
        Curve::ALL.into_iter().find(|c| c.name() == bare).ok_or_else(|| {
            let names: Vec<_> = Curve::ALL.iter().map(|c| c.name()).collect();
            format!("unknown receiver '{s}' (expected one of {})", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format '{s}' (expected csv or json)")),
        }
    }
}

/// Everything a run needs, loadable from JSON and overridable by flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n_s: f64,
    pub n_b: f64,
    pub kappa: f64,
    pub m_min: f64,
    pub m_max: f64,
    pub points: usize,
    pub receivers: Vec<Curve>,
    /// Explicit OPA gain; `None` selects `ε² = N_S/√N_B`.
    pub gain: Option<f64>,
    pub truncation: TruncationSpec,
    /// Truncation levels the oracle may try before giving up.
    pub max_levels: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub svg: Option<PathBuf>,
    /// Seed for the Monte Carlo checks.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = ScenarioParams::reference_figure(1);
        RunConfig {
            n_s: p.n_s,
            n_b: p.n_b,
            kappa: p.kappa,
            m_min: 1e3,
            m_max: 1e7,
            points: 60,
            receivers: Curve::ALL.to_vec(),
            gain: None,
            truncation: TruncationSpec::default(),
            max_levels: 6,
            out: None,
            format: Format::Csv,
            svg: None,
            seed: 1,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn params(&self, m: u64) -> Result<ScenarioParams> {
        Ok(ScenarioParams::new(self.n_s, self.n_b, self.kappa, m)?)
    }

    pub fn opa_config(&self) -> Result<OpaConfig> {
        let p = self.params(1)?;
        Ok(match self.gain {
            Some(g) => OpaConfig::with_gain(g)?,
            None => OpaConfig::default_for(&p)?,
        })
    }

    /// Selected curves in canonical column order, without duplicates.
    pub fn curves(&self) -> Vec<Curve> {
        Curve::ALL.into_iter().filter(|c| self.receivers.contains(c)).collect()
    }

    /// Log-spaced mode counts from `m_min` to `m_max`, rounded to integers.
    pub fn m_grid(&self) -> Result<Vec<u64>> {
        let (lo, hi) = (self.m_min, self.m_max);
        if !(lo.is_finite() && hi.is_finite() && lo >= 1.0 && hi >= lo) {
            return Err(CliError::Config(format!("M range [{lo}, {hi}] must satisfy 1 <= m_min <= m_max")));
        }
        if self.points == 0 || (self.points > 1 && hi == lo) {
            return Err(CliError::Config(format!("{} points cannot span [{lo}, {hi}]", self.points)));
        }
        let step = if self.points > 1 {
            (hi / lo).ln() / (self.points - 1) as f64
        } else {
            0.0
        };
        let grid: Vec<u64> = (0..self.points)
            .map(|i| {
                let m = if i + 1 == self.points { hi } else { lo * (step * i as f64).exp() };
                m.round() as u64
            })
            .collect();
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Config(format!(
                "{} points over [{lo}, {hi}] do not give strictly increasing integer M",
                self.points
            )));
        }
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        self.params(1)?;
        if self.receivers.is_empty() {
            return Err(CliError::Config("select at least one receiver".into()));
        }
        if self.max_levels < 2 {
            return Err(CliError::Config("max_levels must be at least 2".into()));
        }
        if !(self.truncation.tail_tol > 0.0 && self.truncation.tail_tol < 1.0) {
            return Err(CliError::Config(format!("tail_tol {} outside (0, 1)", self.truncation.tail_tol)));
        }
        self.m_grid()?;
        Ok(())
    }
}
