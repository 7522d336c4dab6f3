//! Run settings and the shipped default parameter sets of the verifiers.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::Exec;
use crate::spd::{HpdMatrix, SpdMatrix};
use crate::whittaker::{Effort, Engine};

const DEFAULTS: &str = include_str!("../config/defaults.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub atol: f64,
    pub inner: usize,
    pub max_degree: usize,
    pub tail_tol: f64,
    #[serde(skip)]
    pub exec: Exec,
    #[serde(skip)]
    pub timing: bool,
}

impl RunSettings {
    pub fn effort(&self) -> Effort {
        Effort { samples: self.samples, tol: self.tol, engine: Engine::Auto, exec: self.exec, inner: self.inner }
    }
}

impl Default for RunSettings {
    fn default() -> Self {
        RunConfig::defaults().run
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eq22Case {
    pub alpha: f64,
    pub a: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thm21Case {
    pub alpha: f64,
    pub beta: f64,
    pub a: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thm23Case {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thm31Case {
    pub alpha: f64,
    pub a: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_im: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thm32Case {
    pub alpha: f64,
    pub q: f64,
    pub b: Vec<f64>,
    pub u: Vec<f64>,
    pub m: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_im: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_im: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_im: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarReductionGrid {
    pub z: Vec<f64>,
    pub indices: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub version: u32,
    pub run: RunSettings,
    pub eq2_2: Vec<Eq22Case>,
    pub thm2_1: Vec<Thm21Case>,
    pub thm2_3: Vec<Thm23Case>,
    pub thm3_1: Vec<Thm31Case>,
    pub thm3_2: Vec<Thm32Case>,
    pub scalar_reduction: ScalarReductionGrid,
}

impl RunConfig {
    /// The shipped defaults.
    pub fn defaults() -> Self {
        Self::from_toml_str(DEFAULTS).expect("shipped defaults parse")
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Invalid(format!("config: {e}")))
    }
}

fn side(len: usize) -> Result<usize> {
    let p = (len as f64).sqrt().round() as usize;
    if p == 0 || p * p != len {
        return Err(Error::Invalid(format!("{len} entries do not form a square matrix")));
    }
    Ok(p)
}

/// Real positive definite matrix from row-major entries.
pub fn spd_from_flat(entries: &[f64]) -> Result<SpdMatrix> {
    SpdMatrix::from_row_major(side(entries.len())?, entries)
}

/// Hermitian positive definite matrix from row-major real and optional
/// imaginary parts.
pub fn hpd_from_flat(re: &[f64], im: Option<&[f64]>) -> Result<HpdMatrix> {
    let p = side(re.len())?;
    let entries: Vec<Complex64> = match im {
        Some(im) if im.len() != re.len() => {
            return Err(Error::DimensionMismatch { expected: re.len(), got: im.len() });
        }
        Some(im) => re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect(),
        None => re.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
    };
    HpdMatrix::from_row_major(p, &entries)
}
