//! Yang–Baxter consistency checks at sampled real momenta.
//!
//! Relations checked, with `u = k12`, `v = k23`, `u + v = k13`:
//!
//! * `ybe11`: `Y12(v) Y23(u+v) Y12(u) = Y23(u) Y12(u+v) Y23(v)`, the two reduced
//!   words of the longest permutation of three particles;
//! * `inverse`: `Y(k) Y(-k) = 1`;
//! * `disjoint-commute`: `[Y12(k), Y34(k')] = 0`.
//!
//! Momenta are drawn uniformly from `[-5, 5]`; draws within `1e-6` of a pole
//! are redrawn and counted. Each sample has its own RNG stream, so reports
//! are identical regardless of how samples are scheduled.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{build_hspin, NonseparatedBC};
use crate::error::{Error, Result};
use crate::tensor::{
    commutator, hermiticity_residual, identity, permutation_op, ComplexMatrix, SpinSpace,
    Statistics,
};
use crate::yang_ops::{spectral_parameter, Interaction, YOperator};

pub const DEFAULT_SAMPLES: usize = 50;
pub const DEFAULT_SEED: u64 = 42;
pub const ARITHMETIC_TOL: f64 = 1e-10;
/// Residual above which a family is declared non-integrable.
pub const CLASSIFY_TOL: f64 = 1e-6;
pub const MOMENTUM_RANGE: f64 = 5.0;
pub const POLE_MARGIN: f64 = 1e-6;
const MAX_REDRAWS: usize = 10_000;

pub const YBE11: &str = "ybe11";
pub const INVERSE: &str = "inverse";
pub const DISJOINT_COMMUTE: &str = "disjoint-commute";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// Momenta at which a relation showed its largest residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub relation: String,
    pub momenta: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YbeReport {
    /// Max residual per relation over all samples.
    pub residuals: BTreeMap<String, f64>,
    pub verdict: Verdict,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    /// Draws rejected for lying near a pole.
    pub redrawn: usize,
    pub witness: Option<Witness>,
}

impl YbeReport {
    fn assemble(per_relation: Vec<(String, Vec<Sample>)>, samples: usize, seed: u64, tol: f64) -> Self {
        let mut residuals = BTreeMap::new();
        let mut redrawn = 0;
        let mut witness: Option<Witness> = None;
        for (relation, list) in per_relation {
            let mut max = 0.0f64;
            for s in &list {
                redrawn += s.redrawn;
                if s.residual > max || (max == 0.0 && s.residual.is_nan()) {
                    max = s.residual;
                }
                let better = witness.as_ref().map_or(true, |w| s.residual > w.residual);
                if better {
                    witness = Some(Witness {
                        relation: relation.clone(),
                        momenta: s.momenta.clone(),
                        residual: s.residual,
                    });
                }
            }
            residuals.insert(relation, max);
        }
        let verdict = if residuals.values().all(|r| *r < tol) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            residuals,
            verdict,
            samples,
            seed,
            tol,
            redrawn,
            witness,
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.values().cloned().fold(0.0, f64::max)
    }

    pub fn residual(&self, relation: &str) -> Option<f64> {
        self.residuals.get(relation).copied()
    }

    /// Combines several reports; verdict is Pass only if every part passed.
    pub fn merge(parts: &[&YbeReport]) -> Self {
        let mut residuals = BTreeMap::new();
        let mut witness: Option<Witness> = None;
        let mut redrawn = 0;
        for p in parts {
            for (k, v) in &p.residuals {
                let e = residuals.entry(k.clone()).or_insert(0.0f64);
                *e = e.max(*v);
            }
            redrawn += p.redrawn;
            if let Some(w) = &p.witness {
                if witness.as_ref().map_or(true, |cur| w.residual > cur.residual) {
                    witness = Some(w.clone());
                }
            }
        }
        let tol = parts.iter().map(|p| p.tol).fold(f64::INFINITY, f64::min);
        let verdict = if parts.iter().all(|p| p.verdict.passed()) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            residuals,
            verdict,
            samples: parts.first().map_or(0, |p| p.samples),
            seed: parts.first().map_or(0, |p| p.seed),
            tol,
            redrawn,
            witness,
        }
    }
}

struct Sample {
    momenta: Vec<f64>,
    residual: f64,
    redrawn: usize,
}

fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws `count` momenta whose spectral parameters (all pairwise halves and
/// their negatives) stay at least `POLE_MARGIN` away from every pole.
fn draw_momenta(op: &YOperator, rng: &mut ChaCha8Rng, count: usize) -> Result<(Vec<f64>, usize)> {
    for redrawn in 0..MAX_REDRAWS {
        let k: Vec<f64> = (0..count)
            .map(|_| rng.gen_range(-MOMENTUM_RANGE..MOMENTUM_RANGE))
            .collect();
        let clear = (0..count).all(|a| {
            (0..count).filter(|&b| b != a).all(|b| {
                let s = spectral_parameter(Complex64::from(k[a]), Complex64::from(k[b]));
                op.pole_distance(s) >= POLE_MARGIN
            })
        });
        if clear {
            return Ok((k, redrawn));
        }
    }
    Err(Error::InvalidParameter(
        "could not draw momenta away from the Y-operator poles".into(),
    ))
}

fn run_samples<F>(
    op: &YOperator,
    samples: usize,
    seed: u64,
    stream_offset: u64,
    count: usize,
    residual: F,
) -> Result<Vec<Sample>>
where
    F: Fn(&[Complex64]) -> Result<f64> + Sync,
{
    (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = sample_rng(seed, stream_offset + s as u64);
            let (momenta, redrawn) = draw_momenta(op, &mut rng, count)?;
            let k: Vec<Complex64> = momenta.iter().map(|&x| Complex64::from(x)).collect();
            Ok(Sample {
                residual: residual(&k)?,
                momenta,
                redrawn,
            })
        })
        .collect()
}

/// Braid-form residual for one momentum triple on a three-particle space.
pub fn ybe11_residual(op: &YOperator, k: &[Complex64]) -> Result<f64> {
    let u = spectral_parameter(k[0], k[1]);
    let v = spectral_parameter(k[1], k[2]);
    let w = spectral_parameter(k[0], k[2]);
    let lhs = op.eval(v, 0, 1)? * op.eval(w, 1, 2)? * op.eval(u, 0, 1)?;
    let rhs = op.eval(u, 1, 2)? * op.eval(w, 0, 1)? * op.eval(v, 1, 2)?;
    Ok((lhs - rhs).norm())
}

pub fn inverse_residual(op: &YOperator, k: Complex64) -> Result<f64> {
    let prod = op.pair_matrix(k)? * op.pair_matrix(-k)?;
    Ok((prod - identity(op.space().n * op.space().n)).norm())
}

/// Checks the braid relation on particles (1, 2, 3). Extra particles only add
/// identity factors, so the check runs on a three-particle copy of the space.
pub fn check_ybe11(op: &YOperator, samples: usize, seed: u64, tol: f64) -> Result<YbeReport> {
    if op.space().particles < 3 {
        return Err(Error::InvalidParameter("ybe11 needs at least three particles".into()));
    }
    let three = op.with_particles(3)?;
    let list = run_samples(&three, samples, seed, 0, 3, |k| ybe11_residual(&three, k))?;
    Ok(YbeReport::assemble(vec![(YBE11.into(), list)], samples, seed, tol))
}

/// Inverse relation always; disjoint-pair commutation when `N >= 4`.
pub fn check_ybe22(op: &YOperator, samples: usize, seed: u64, tol: f64) -> Result<YbeReport> {
    let pair = op.with_particles(2)?;
    let inverse = run_samples(&pair, samples, seed, 1 << 32, 2, |k| {
        inverse_residual(&pair, spectral_parameter(k[0], k[1]))
    })?;
    let mut parts = vec![(INVERSE.to_string(), inverse)];
    if op.space().particles >= 4 {
        let four = op.with_particles(4)?;
        let commute = run_samples(&four, samples, seed, 2 << 32, 4, |k| {
            let a = four.eval(spectral_parameter(k[0], k[1]), 0, 1)?;
            let b = four.eval(spectral_parameter(k[2], k[3]), 2, 3)?;
            Ok(commutator(&a, &b).norm())
        })?;
        parts.push((DISJOINT_COMMUTE.to_string(), commute));
    }
    Ok(YbeReport::assemble(parts, samples, seed, tol))
}

/// ybe11 at `N = 3` and ybe22 at `N = 4`, merged.
pub fn check_all(op: &YOperator, samples: usize, seed: u64, tol: f64) -> Result<YbeReport> {
    let a = check_ybe11(&op.with_particles(3)?, samples, seed, tol)?;
    let b = check_ybe22(&op.with_particles(4)?, samples, seed, tol)?;
    Ok(YbeReport::merge(&[&a, &b]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Classification {
    Integrable,
    NonIntegrable(Witness),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub bc: NonseparatedBC,
    pub classification: Classification,
    pub ybe11: YbeReport,
    pub ybe22: YbeReport,
}

impl ClassificationReport {
    pub fn is_integrable(&self) -> bool {
        self.classification == Classification::Integrable
    }
}

/// Integrable unless some relation residual exceeds `classify_tol`.
pub fn classify_nonseparated(
    bc: &NonseparatedBC,
    n: usize,
    samples: usize,
    seed: u64,
    classify_tol: f64,
) -> Result<ClassificationReport> {
    let op = YOperator::new(
        Interaction::Nonseparated(*bc),
        SpinSpace::new(n.max(2), 3)?,
        Statistics::Bose,
    )?;
    let ybe11 = check_ybe11(&op, samples, seed, ARITHMETIC_TOL)?;
    let ybe22 = check_ybe22(&op.with_particles(4)?, samples, seed, ARITHMETIC_TOL)?;
    let worst = [&ybe11, &ybe22]
        .into_iter()
        .filter_map(|r| r.witness.clone())
        .filter(|w| w.residual > classify_tol)
        .max_by(|a, b| a.residual.total_cmp(&b.residual));
    let classification = match worst {
        Some(w) => Classification::NonIntegrable(w),
        None => Classification::Integrable,
    };
    Ok(ClassificationReport {
        bc: *bc,
        classification,
        ybe11,
        ybe22,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutatorReport {
    pub commutator_norm: f64,
    pub ybe11: YbeReport,
}

/// `‖[h, p¹²]‖` and the braid-relation verdict for the spin-δ Y built from `h`.
pub fn check_h_commutation(h: &ComplexMatrix, n: usize, samples: usize, seed: u64) -> Result<CommutatorReport> {
    let pair = SpinSpace::new(n, 2)?;
    let swap = permutation_op(pair, 0, 1)?;
    let commutator_norm = commutator(h, &swap).norm();
    let op = YOperator::new(Interaction::SpinDelta(h.clone()), SpinSpace::new(n, 3)?, Statistics::Bose)?;
    let ybe11 = check_ybe11(&op, samples, seed, ARITHMETIC_TOL)?;
    Ok(CommutatorReport {
        commutator_norm,
        ybe11,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutantSearch {
    pub n: usize,
    /// Real dimension of `{h : h = h†, [h, p¹²] = 0}`.
    pub real_dimension: usize,
    pub samples: usize,
    /// Projected samples reproduced exactly by the spin-½ commuting form.
    pub pattern_matches: usize,
    pub max_pattern_residual: f64,
    pub swap_in_commutant: bool,
}

/// Real basis of the `d×d` Hermitian matrices.
pub fn hermitian_basis(dim: usize) -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(dim * dim);
    for k in 0..dim {
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(k, k)] = Complex64::from(1.0);
        basis.push(m);
    }
    for k in 0..dim {
        for l in (k + 1)..dim {
            let mut re = ComplexMatrix::zeros(dim, dim);
            re[(k, l)] = Complex64::from(1.0);
            re[(l, k)] = Complex64::from(1.0);
            basis.push(re);
            let mut im = ComplexMatrix::zeros(dim, dim);
            im[(k, l)] = Complex64::new(0.0, 1.0);
            im[(l, k)] = Complex64::new(0.0, -1.0);
            basis.push(im);
        }
    }
    basis
}

/// Real dimension of the Hermitian swap-commutant, by the nullity of the
/// real-linear map `h ↦ [h, p]` on a Hermitian basis.
pub fn commutant_dimension(n: usize) -> Result<usize> {
    let swap = permutation_op(SpinSpace::new(n, 2)?, 0, 1)?;
    let dim = n * n;
    let basis = hermitian_basis(dim);
    let mut map = DMatrix::<f64>::zeros(2 * dim * dim, basis.len());
    for (col, h) in basis.iter().enumerate() {
        let comm = commutator(h, &swap);
        for (idx, z) in comm.iter().enumerate() {
            map[(2 * idx, col)] = z.re;
            map[(2 * idx + 1, col)] = z.im;
        }
    }
    let sv = map.singular_values();
    Ok(sv.iter().filter(|&&s| s < 1e-10).count() + basis.len().saturating_sub(sv.len()))
}

/// Projects random Hermitian 4×4 matrices onto the swap-commutant and
/// checks each against the spin-½ commuting form.
pub fn search_commuting_hermitian(samples: usize, seed: u64) -> Result<CommutantSearch> {
    let n = 2;
    let swap = permutation_op(SpinSpace::new(n, 2)?, 0, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matches = 0;
    let mut max_residual = 0.0f64;
    for _ in 0..samples {
        let m = ComplexMatrix::from_fn(4, 4, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let h = (&m + m.adjoint()) * Complex64::from(0.5);
        let projected = (&h + &swap * &h * &swap) * Complex64::from(0.5);
        let rebuilt = build_hspin(
            projected[(0, 0)],
            projected[(3, 3)],
            projected[(1, 2)].re,
            projected[(0, 3)],
            projected[(1, 1)],
            projected[(0, 1)],
            projected[(1, 3)],
        )?;
        let residual = (&projected - &rebuilt).norm();
        max_residual = max_residual.max(residual);
        if residual < 1e-12 && hermiticity_residual(&projected) < 1e-12 {
            matches += 1;
        }
    }
    let swap_in_commutant = commutator(&swap, &swap).norm() == 0.0 && hermiticity_residual(&swap) == 0.0;
    Ok(CommutantSearch {
        n,
        real_dimension: commutant_dimension(n)?,
        samples,
        pattern_matches: matches,
        max_pattern_residual: max_residual,
        swap_in_commutant,
    })
}
