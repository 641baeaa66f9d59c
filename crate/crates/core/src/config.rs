//! Run configuration shared by the command-line tool and its JSON config files.

use serde::{Deserialize, Serialize};

use crate::basis::Mode;
use crate::dispersion::ScanOptions;
use crate::error::{BlochError, Result};
use crate::potential::{PotentialKind, PotentialSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = BlochError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(BlochError::Domain(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub e_max: f64,
    pub de: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_energies: usize,
    pub n_z: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n_energies: 20,
            n_z: 200,
        }
    }
}

impl std::str::FromStr for GridConfig {
    type Err = BlochError;
    /// Parses `NxM`: `N` energies by `M` points in `z`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || BlochError::Domain(format!("grid must look like 20x200, got {s:?}"));
        let (n, m) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        Ok(Self {
            n_energies: n.trim().parse().map_err(|_| bad())?,
            n_z: m.trim().parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialSpec<f64>,
    pub mode: Mode,
    pub scan: ScanConfig,
    pub grid: GridConfig,
    pub output_path: String,
    pub format: OutputFormat,
}

impl RunConfig {
    /// Defaults for a potential: scan to `1.25 V + 1`, a 20 by 200 grid, CSV.
    pub fn for_potential(potential: PotentialSpec<f64>) -> Self {
        let o = ScanOptions::default_for(&potential);
        Self {
            potential,
            mode: Mode::Exact,
            scan: ScanConfig {
                e_max: o.e_max,
                de: o.de,
            },
            grid: GridConfig::default(),
            output_path: "-".into(),
            format: OutputFormat::Csv,
        }
    }

    /// Recomputes the scan defaults after the potential height changed.
    pub fn rescale_scan(&mut self) {
        let o = ScanOptions::default_for(&self.potential);
        self.scan = ScanConfig {
            e_max: o.e_max,
            de: o.de,
        };
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(BlochError::Domain(format!("{name} must be positive, got {x}")))
            }
        };
        positive("V", self.potential.v)?;
        positive("scan.e_max", self.scan.e_max)?;
        positive("scan.de", self.scan.de)?;
        if self.grid.n_energies < 2 {
            return Err(BlochError::Domain("grid needs at least 2 energies".into()));
        }
        if self.grid.n_z < 16 {
            return Err(BlochError::Domain("grid needs at least 16 points in z".into()));
        }
        if self.output_path.is_empty() {
            return Err(BlochError::Domain("output path is empty".into()));
        }
        if self.potential.kind == PotentialKind::KronigPenney && self.mode == Mode::NearTop {
            return Err(BlochError::Unsupported(
                "near-top mode is defined only for the biparabolic potential".into(),
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| BlochError::Domain(format!("config: {e}")))
    }
}
