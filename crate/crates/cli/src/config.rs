//! Experiment configuration: a TOML file with the experiment id, an
//! optional output directory, and a `[params]` table matched strictly
//! against the experiment's schema (unknown keys are errors).  Every field
//! has a default, so each experiment runs from a single bare command.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The golden ratio fractional part: the canonical badly approximable
/// modulation used by default in the minor-arc experiments.
pub const GOLDEN_FRAC: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    experiment: String,
    #[serde(default)]
    out: Option<PathBuf>,
    #[serde(default)]
    params: Option<toml::Table>,
}

/// Loads `path`, checks the experiment id, and deserializes `[params]`
/// against `P`'s schema.  A missing file section falls back to defaults.
pub fn load<P: DeserializeOwned + Default>(
    path: &Path,
    expected: &'static str,
) -> Result<(P, Option<PathBuf>)> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: ConfigFile = toml::from_str(&text).map_err(|e| Error::ConfigParse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    if file.experiment != expected {
        return Err(Error::ExperimentMismatch {
            expected,
            found: file.experiment,
        });
    }
    let params = match file.params {
        None => P::default(),
        Some(table) => {
            let rendered = toml::to_string(&table).map_err(|e| Error::ConfigParse {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
            toml::from_str(&rendered).map_err(|e| Error::ConfigParse {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?
        }
    };
    Ok((params, file.out))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaussVanishingParams {
    pub q_max: i64,
    pub d_values: Vec<u32>,
    pub tolerance: f64,
}

impl Default for GaussVanishingParams {
    fn default() -> Self {
        GaussVanishingParams {
            q_max: 64,
            d_values: vec![1, 2],
            tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeylDecayParams {
    pub radii: Vec<f64>,
    pub coefficient: f64,
    pub degree: u32,
    /// Required drop of |S_R|/R from the first to the last radius.
    pub min_drop: f64,
}

impl Default for WeylDecayParams {
    fn default() -> Self {
        WeylDecayParams {
            radii: (5..=12).map(|e| (2.0f64).powi(e)).collect(),
            coefficient: GOLDEN_FRAC,
            degree: 2,
            min_drop: 4.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MultiplierApproxParams {
    pub j_min: u32,
    pub j_max: u32,
    pub q_cap: i64,
    /// Multiples of the natural width 2^{−j} at which ξ sits inside the
    /// neighboring rational center.
    pub widths: Vec<f64>,
    pub spread_max: f64,
    pub tol: f64,
    pub kernel: String,
}

impl Default for MultiplierApproxParams {
    fn default() -> Self {
        MultiplierApproxParams {
            j_min: 4,
            j_max: 10,
            q_cap: 8,
            widths: vec![0.5, 1.0, 2.0],
            spread_max: 2.0,
            tol: 1e-8,
            kernel: "odd_power".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ErrorDecayParams {
    pub j_min: u32,
    pub j_max: u32,
    pub m_exp: f64,
    /// Modulations as strings: integers, fractions "a/b", or decimals.
    pub lambdas: Vec<String>,
    pub grid: usize,
    pub tol: f64,
    pub min_rate: f64,
    pub min_r_squared: f64,
    pub kernel: String,
}

impl Default for ErrorDecayParams {
    fn default() -> Self {
        ErrorDecayParams {
            j_min: 4,
            j_max: 12,
            m_exp: 2.0,
            lambdas: vec!["0".into(), "1/2".into(), "1/3".into()],
            grid: 16,
            tol: 1e-7,
            min_rate: 0.0,
            min_r_squared: 0.8,
            kernel: "odd_power".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelIdentityParams {
    pub s_values: Vec<u32>,
    pub m_exp: f64,
    pub y_max: i64,
    pub tolerance: f64,
}

impl Default for KernelIdentityParams {
    fn default() -> Self {
        KernelIdentityParams {
            s_values: vec![1, 2, 3],
            m_exp: 10.0,
            y_max: 64,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FactorizationParams {
    pub s_values: Vec<u32>,
    pub samples: usize,
    pub m_exp: f64,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for FactorizationParams {
    fn default() -> Self {
        FactorizationParams {
            s_values: vec![1, 2, 3],
            samples: 1000,
            m_exp: 10.0,
            tolerance: 1e-10,
            seed: 40_404,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CarlesonNormParams {
    pub sizes: Vec<usize>,
    pub p: f64,
    pub trials: u32,
    pub seed: u64,
    pub kind: String,
    pub kernel: String,
    pub j_trunc: u32,
    pub d: u32,
    pub epsilon: f64,
    pub lambda: f64,
    pub parabola_bound: i64,
    /// Re-run the whole table and require byte-identical CSV output.
    pub verify_determinism: bool,
}

impl Default for CarlesonNormParams {
    fn default() -> Self {
        CarlesonNormParams {
            sizes: vec![64, 128, 256, 512, 1024],
            p: 2.0,
            trials: 20,
            seed: 424_242,
            kind: "carleson-sup".into(),
            kernel: "odd_power".into(),
            j_trunc: 4,
            d: 1,
            epsilon: 1e-2,
            lambda: GOLDEN_FRAC,
            parabola_bound: 8,
            verify_determinism: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TtstarScanParams {
    pub j_min: u32,
    pub j_max: u32,
    pub kappa: f64,
    pub c0: f64,
    pub delta0: f64,
    pub lambda: f64,
    pub kernel: String,
    /// Member records kept per exported set; the full cardinality is always
    /// reported even when the listing is truncated.
    pub max_members: usize,
}

impl Default for TtstarScanParams {
    fn default() -> Self {
        TtstarScanParams {
            j_min: 4,
            j_max: 8,
            kappa: 2.0,
            c0: 0.5,
            delta0: 9.0,
            lambda: GOLDEN_FRAC,
            kernel: "odd_power".into(),
            max_members: 10_000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParabolaFourierParams {
    pub n1: usize,
    pub n2: usize,
    pub fields: u64,
    pub j_trunc: u32,
    pub coeff_bound: i64,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for ParabolaFourierParams {
    fn default() -> Self {
        ParabolaFourierParams {
            n1: 32,
            n2: 32,
            fields: 5,
            j_trunc: 4,
            coeff_bound: 8,
            tolerance: 1e-10,
            seed: 7_000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RademacherMenshovParams {
    pub sequences: u64,
    pub s_max: u32,
    pub r_values: Vec<f64>,
    pub amplitude: f64,
    pub seed: u64,
}

impl Default for RademacherMenshovParams {
    fn default() -> Self {
        RademacherMenshovParams {
            sequences: 10_000,
            s_max: 6,
            r_values: vec![1.0, 2.0, 3.0],
            amplitude: 2.5,
            seed: 2024,
        }
    }
}
