//! Run configuration: `system`, `boundary` and `run` sections of a JSON file.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boundary::{
    build_hspin, BoundaryCondition, Coupling, MatrixBC, NonseparatedBC, SeparatedBC, SeparatedSpinBC, SpinDeltaBC,
};
use crate::error::{Error, Result};
use crate::tensor::{ComplexMatrix, SpinSpace, Statistics};
use crate::ybe_check::{ARITHMETIC_TOL, CLASSIFY_TOL, DEFAULT_SAMPLES, DEFAULT_SEED};

/// A complex number written as `[re, im]` or as a bare real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexRepr {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexRepr {
    pub fn value(self) -> Complex64 {
        match self {
            ComplexRepr::Real(re) => Complex64::new(re, 0.0),
            ComplexRepr::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for ComplexRepr {
    fn from(z: Complex64) -> Self {
        ComplexRepr::Pair([z.re, z.im])
    }
}

pub type MatrixRepr = Vec<Vec<ComplexRepr>>;

pub fn matrix_from_repr(rows: &MatrixRepr, what: &str) -> Result<ComplexMatrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    if r == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(Error::InvalidParameter(format!("{what} must be a non-empty rectangular matrix")));
    }
    Ok(ComplexMatrix::from_fn(r, c, |i, j| rows[i][j].value()))
}

pub fn matrix_to_repr(m: &ComplexMatrix) -> MatrixRepr {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub n: usize,
    #[serde(rename = "N")]
    pub particles: usize,
    #[serde(default = "default_statistics")]
    pub statistics: Statistics,
}

fn default_statistics() -> Statistics {
    Statistics::Bose
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HspinParams {
    pub a: f64,
    pub b: f64,
    pub g: f64,
    pub c: ComplexRepr,
    pub f: f64,
    pub e1: ComplexRepr,
    pub e2: ComplexRepr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryConfig {
    /// `d` defaults to `(1 + bc)/a`.
    Nonseparated {
        #[serde(default)]
        theta: f64,
        a: f64,
        #[serde(default)]
        b: f64,
        c: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<f64>,
    },
    Delta {
        c: f64,
    },
    /// Either `q` (with `q₋ = -q`) or both `q_plus` and `q_minus`.
    Separated {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<Coupling>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q_plus: Option<Coupling>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q_minus: Option<Coupling>,
    },
    /// Either `h` or the 2×2-spin parametrization `hspin`.
    SpinDelta {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        h: Option<MatrixRepr>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hspin: Option<HspinParams>,
    },
    SeparatedSpin {
        g: MatrixRepr,
    },
    Matrix {
        a: MatrixRepr,
        b: MatrixRepr,
        c: MatrixRepr,
        d: MatrixRepr,
    },
}

impl BoundaryConfig {
    pub fn build(&self) -> Result<BoundaryCondition> {
        Ok(match self {
            BoundaryConfig::Nonseparated { theta, a, b, c, d } => BoundaryCondition::Nonseparated(match d {
                Some(d) => NonseparatedBC::new(*theta, *a, *b, *c, *d)?,
                None => NonseparatedBC::from_theta_a_b_c(*theta, *a, *b, *c)?,
            }),
            BoundaryConfig::Delta { c } => BoundaryCondition::Nonseparated(NonseparatedBC::delta(*c)),
            BoundaryConfig::Separated { q, q_plus, q_minus } => BoundaryCondition::Separated(match (q, q_plus, q_minus) {
                (Some(q), None, None) => SeparatedBC::symmetric(*q),
                (None, Some(p), Some(m)) => SeparatedBC { q_plus: *p, q_minus: *m },
                _ => {
                    return Err(Error::InvalidParameter(
                        "separated boundary needs either q or both q_plus and q_minus".into(),
                    ))
                }
            }),
            BoundaryConfig::SpinDelta { h, hspin } => {
                let h = match (h, hspin) {
                    (Some(h), None) => matrix_from_repr(h, "h")?,
                    (None, Some(p)) => build_hspin(
                        p.a.into(),
                        p.b.into(),
                        p.g,
                        p.c.value(),
                        p.f.into(),
                        p.e1.value(),
                        p.e2.value(),
                    )?,
                    _ => return Err(Error::InvalidParameter("spin_delta needs exactly one of h and hspin".into())),
                };
                BoundaryCondition::SpinDelta(SpinDeltaBC::new(h)?)
            }
            BoundaryConfig::SeparatedSpin { g } => {
                BoundaryCondition::SeparatedSpin(SeparatedSpinBC::new(matrix_from_repr(g, "g")?)?)
            }
            BoundaryConfig::Matrix { a, b, c, d } => BoundaryCondition::Matrix(MatrixBC {
                a: matrix_from_repr(a, "a")?,
                b: matrix_from_repr(b, "b")?,
                c: matrix_from_repr(c, "c")?,
                d: matrix_from_repr(d, "d")?,
            }),
        })
    }
}

/// Parameter values spanned by a classification scan; `d = (1 + bc)/a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub theta: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        let pi = std::f64::consts::PI;
        Self {
            theta: (0..5).map(|i| i as f64 * pi / 5.0).collect(),
            a: vec![-2.0, -1.0, 0.5, 1.0, 2.0],
            b: vec![-1.0, -0.5, 0.0, 0.5, 1.0],
            c: vec![1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunOptions {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_tol_classify")]
    pub tol_classify: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momenta: Option<Vec<ComplexRepr>>,
    #[serde(default = "default_probes")]
    pub probes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default = "default_a_param")]
    pub a_param: f64,
    #[serde(default)]
    pub c_param: f64,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_samples() -> usize {
    DEFAULT_SAMPLES
}
fn default_tol() -> f64 {
    ARITHMETIC_TOL
}
fn default_tol_classify() -> f64 {
    CLASSIFY_TOL
}
fn default_probes() -> usize {
    10
}
fn default_a_param() -> f64 {
    1.0
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
            tol: ARITHMETIC_TOL,
            tol_classify: CLASSIFY_TOL,
            momenta: None,
            probes: 10,
            grid: None,
            a_param: 1.0,
            c_param: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub run: RunOptions,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.system.n < 1 || self.system.particles < 2 {
            return Err(Error::InvalidParameter("system needs n ≥ 1 and N ≥ 2".into()));
        }
        for (name, t) in [("tol", self.run.tol), ("tol_classify", self.run.tol_classify)] {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive")));
            }
        }
        if self.run.samples == 0 || self.run.probes == 0 {
            return Err(Error::InvalidParameter("samples and probes must be positive".into()));
        }
        if let Some(k) = &self.run.momenta {
            if k.len() != self.system.particles {
                return Err(Error::InvalidParameter(format!(
                    "{} momenta given for N = {}",
                    k.len(),
                    self.system.particles
                )));
            }
        }
        let bc = self.boundary.build()?;
        let pair_dim = self.system.n * self.system.n;
        let dim = match &bc {
            BoundaryCondition::Matrix(m) => Some(m.dim()),
            BoundaryCondition::SpinDelta(s) => Some(s.h.nrows()),
            BoundaryCondition::SeparatedSpin(s) => Some(s.g.nrows()),
            _ => None,
        };
        if let Some(d) = dim {
            if d != pair_dim {
                return Err(Error::DimensionMismatch { expected: format!("{pair_dim}×{pair_dim} couplings"), found: format!("{d}×{d}") });
            }
        }
        Ok(())
    }

    pub fn space(&self) -> Result<SpinSpace> {
        SpinSpace::new(self.system.n, self.system.particles)
    }

    pub fn boundary_condition(&self) -> Result<BoundaryCondition> {
        self.boundary.build()
    }

    pub fn momenta(&self) -> Option<Vec<Complex64>> {
        self.run.momenta.as_ref().map(|k| k.iter().map(|z| z.value()).collect())
    }
}
