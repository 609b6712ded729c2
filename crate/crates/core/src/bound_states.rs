//! Bound states: spin-δ momentum strings and the separated-family states.
//!
//! Every state has the form `v · s_ε(x) · exp(κ Σ_{i>j} |x_i - x_j|)` with
//! `κ < 0`, where `s_ε` is `1` or the sign-pattern factor
//! `Π_{k>l} (θ(x_k - x_l) + ε_kl θ(x_l - x_k))`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bethe::{
    boundary_residual, eigen_residual, evaluate, hyperplane_probes, interior_points, RegionExpansion,
};
use crate::boundary::{BoundaryCondition, Coupling, SeparatedBC, SeparatedSpinBC, SpinDeltaBC};
use crate::error::{Error, Result};
use crate::tensor::{
    check_square, commutator, embed_pair, hermitian_eigen, hermiticity_residual, identity, norm, null_space,
    permutation_op, statistics_op, ComplexMatrix, ComplexVector, SpinSpace, Statistics, DEFAULT_TOL, I,
};

const NULL_TOL: f64 = 1e-10;
const BINDING_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    SpinDelta,
    Separated,
    SeparatedSpin,
}

/// Pairs `(k, l)` with `k > l` in the order `(1,0), (2,0), (2,1), (3,0), …`.
pub fn ordered_pairs(particles: usize) -> Vec<(usize, usize)> {
    (1..particles).flat_map(|k| (0..k).map(move |l| (k, l))).collect()
}

#[derive(Debug, Clone)]
pub struct BoundStateFamily {
    pub kind: BoundKind,
    pub space: SpinSpace,
    pub statistics: Statistics,
    /// `Λ` of `h` (spin-δ) or `λ` of `G` / `q` (separated).
    pub eigenvalue: f64,
    /// Coefficient of `Σ_{i>j} |x_i - x_j|`.
    pub kappa: f64,
    pub momenta: Vec<Complex64>,
    pub energy: f64,
    /// Orthonormal basis of admissible spin vectors.
    pub spin_vectors: Vec<ComplexVector>,
    /// `ε_kl` in [`ordered_pairs`] order.
    pub sign_pattern: Option<Vec<i8>>,
    pub boundary: BoundaryCondition,
}

impl BoundStateFamily {
    pub fn degeneracy(&self) -> usize {
        self.spin_vectors.len()
    }

    pub fn momentum_energy(&self) -> Complex64 {
        crate::bethe::energy(&self.momenta)
    }

    pub fn wavefunction(&self, index: usize) -> BoundWavefunction {
        BoundWavefunction {
            space: self.space,
            spin: self.spin_vectors[index].clone(),
            kappa: self.kappa,
            sign_pattern: self.sign_pattern.clone(),
        }
    }
}

/// `k_m = iκ'(N + 1 - 2m)/2`, `m = 1..N`; decaying for `κ' < 0`.
pub fn spin_delta_string(kappa_prime: f64, particles: usize) -> Vec<Complex64> {
    (1..=particles)
        .map(|m| I * kappa_prime * (particles as f64 + 1.0 - 2.0 * m as f64) / 2.0)
        .collect()
}

/// `k_m = iλ(N + 1 - 2m)`, `m = 1..N`.
pub fn separated_string(lambda: f64, particles: usize) -> Vec<Complex64> {
    (1..=particles)
        .map(|m| I * lambda * (particles as f64 + 1.0 - 2.0 * m as f64))
        .collect()
}

pub fn spin_delta_energy(kappa_prime: f64, particles: usize) -> f64 {
    let n = particles as f64;
    -kappa_prime * kappa_prime * n * (n * n - 1.0) / 12.0
}

pub fn separated_energy(lambda: f64, particles: usize) -> f64 {
    let n = particles as f64;
    -lambda * lambda * n * (n * n - 1.0) / 3.0
}

fn check_pair_coupling(h: &ComplexMatrix, n: usize, what: &str) -> Result<()> {
    check_square(h, n * n, what)?;
    let r = hermiticity_residual(h);
    if r >= DEFAULT_TOL {
        return Err(Error::InvalidParameter(format!("{what} is not Hermitian (residual {r:e})")));
    }
    Ok(())
}

fn check_commutes(h: &ComplexMatrix, n: usize) -> Result<()> {
    let p = permutation_op(SpinSpace::new(n, 2)?, 0, 1)?;
    let c = norm(&commutator(h, &p));
    if c >= DEFAULT_TOL {
        return Err(Error::CommutationViolated { norm: c });
    }
    Ok(())
}

fn dimension_of(h: &ComplexMatrix) -> usize {
    (h.nrows() as f64).sqrt().round() as usize
}

/// Groups ascending eigenpairs whose eigenvalues agree within tolerance.
fn group_eigen(pairs: Vec<(f64, ComplexVector)>) -> Vec<(f64, Vec<ComplexVector>)> {
    let mut groups: Vec<(f64, Vec<ComplexVector>)> = Vec::new();
    for (l, v) in pairs {
        match groups.last_mut() {
            Some((g, vs)) if (l - *g).abs() < 1e-9 * g.abs().max(1.0) => vs.push(v),
            _ => groups.push((l, vec![v])),
        }
    }
    groups
}

fn spin_delta_family(
    space: SpinSpace,
    statistics: Statistics,
    lambda: f64,
    kappa_prime: f64,
    effective: &ComplexMatrix,
    spin_vectors: Vec<ComplexVector>,
) -> Result<BoundStateFamily> {
    Ok(BoundStateFamily {
        kind: BoundKind::SpinDelta,
        space,
        statistics,
        eigenvalue: lambda,
        kappa: kappa_prime / 2.0,
        momenta: spin_delta_string(kappa_prime, space.particles),
        energy: spin_delta_energy(kappa_prime, space.particles),
        spin_vectors,
        sign_pattern: None,
        boundary: BoundaryCondition::SpinDelta(SpinDeltaBC::new(effective.clone())?),
    })
}

/// Two-body bound states `u e^{(c + aΛ)|x_2 - x_1|/2}` from the joint
/// eigenvectors of `h` and the exchange operator with exchange eigenvalue `+1`.
pub fn bound_two_body_spin_delta(
    h: &ComplexMatrix,
    a_param: f64,
    c_param: f64,
    statistics: Statistics,
) -> Result<Vec<BoundStateFamily>> {
    let n = dimension_of(h);
    check_pair_coupling(h, n, "h")?;
    check_commutes(h, n)?;
    let space = SpinSpace::new(n, 2)?;
    let p = statistics_op(space, 0, 1, statistics)?;
    let basis = null_space(&(&p - identity(space.dim())), NULL_TOL);
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let b = ComplexMatrix::from_columns(&basis);
    let reduced = b.adjoint() * h * &b;
    let effective = identity(space.dim()) * Complex64::from(c_param) + h * Complex64::from(a_param);
    let mut out = Vec::new();
    for (lambda, ws) in group_eigen(hermitian_eigen(&reduced)) {
        let kappa_prime = c_param + a_param * lambda;
        if kappa_prime < -BINDING_EPS {
            let vs = ws.iter().map(|w| &b * w).collect();
            out.push(spin_delta_family(space, statistics, lambda, kappa_prime, &effective, vs)?);
        }
    }
    Ok(out)
}

/// Spin vectors with `P^{ij} v = v` and `h_ij v = Λ v` for every pair.
pub fn invariant_spin_vectors(
    h: &ComplexMatrix,
    lambda: f64,
    space: SpinSpace,
    statistics: Statistics,
) -> Result<Vec<ComplexVector>> {
    let dim = space.dim();
    let pairs = ordered_pairs(space.particles);
    let mut blocks = Vec::new();
    for &(k, l) in &pairs {
        blocks.push(statistics_op(space, l, k, statistics)? - identity(dim));
        blocks.push(embed_pair(h, space, l, k)? - identity(dim) * Complex64::from(lambda));
    }
    Ok(null_space(&stack(&blocks, dim), NULL_TOL))
}

fn stack(blocks: &[ComplexMatrix], dim: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(blocks.len() * dim, dim);
    for (b, block) in blocks.iter().enumerate() {
        m.view_mut((b * dim, 0), (dim, dim)).copy_from(block);
    }
    m
}

/// N-body string states, one family per admissible `Λ` with a common
/// invariant spin vector.
pub fn bound_n_body_string(
    h: &ComplexMatrix,
    particles: usize,
    a_param: f64,
    c_param: f64,
    statistics: Statistics,
) -> Result<Vec<BoundStateFamily>> {
    let n = dimension_of(h);
    check_pair_coupling(h, n, "h")?;
    check_commutes(h, n)?;
    if particles < 2 {
        return Err(Error::InvalidParameter("bound states need at least two particles".into()));
    }
    let space = SpinSpace::new(n, particles)?;
    let effective = identity(n * n) * Complex64::from(c_param) + h * Complex64::from(a_param);
    let mut out = Vec::new();
    let mut first_admissible = None;
    for two_body in bound_two_body_spin_delta(h, a_param, c_param, statistics)? {
        let lambda = two_body.eigenvalue;
        first_admissible.get_or_insert(lambda);
        let vs = invariant_spin_vectors(h, lambda, space, statistics)?;
        if !vs.is_empty() {
            let kappa_prime = c_param + a_param * lambda;
            out.push(spin_delta_family(space, statistics, lambda, kappa_prime, &effective, vs)?);
        }
    }
    match (out.is_empty(), first_admissible) {
        (true, Some(lambda)) => Err(Error::NoInvariantSpinVector { eigenvalue: lambda }),
        _ => Ok(out),
    }
}

#[derive(Debug, Clone)]
pub enum SeparatedCoupling {
    Scalar(f64),
    Matrix(ComplexMatrix),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternDimension {
    pub eigenvalue: f64,
    /// `ε_kl` in [`ordered_pairs`] order.
    pub pattern: Vec<i8>,
    pub dimension: usize,
}

#[derive(Debug, Clone)]
pub struct SeparatedBoundStates {
    pub families: Vec<BoundStateFamily>,
    pub patterns: Vec<PatternDimension>,
    /// `2^{N(N-1)/2}` sign patterns per eigenvalue.
    pub patterns_per_eigenvalue: usize,
}

impl SeparatedBoundStates {
    /// Patterns with no admissible spin vector.
    pub fn empty_patterns(&self) -> Vec<&PatternDimension> {
        self.patterns.iter().filter(|p| p.dimension == 0).collect()
    }

    pub fn total_states(&self) -> usize {
        self.families.iter().map(|f| f.degeneracy()).sum()
    }
}

pub fn sign_patterns(particles: usize) -> Vec<Vec<i8>> {
    let m = particles * (particles - 1) / 2;
    (0..1usize << m)
        .map(|bits| (0..m).map(|b| if bits >> b & 1 == 1 { -1 } else { 1 }).collect())
        .collect()
}

/// Separated-family states over every negative eigenvalue and every sign
/// pattern, with the spin-space dimension each pattern admits.
pub fn bound_separated(
    coupling: &SeparatedCoupling,
    particles: usize,
    n: usize,
    statistics: Statistics,
) -> Result<SeparatedBoundStates> {
    if particles < 2 {
        return Err(Error::InvalidParameter("bound states need at least two particles".into()));
    }
    let space = SpinSpace::new(n, particles)?;
    let dim = space.dim();
    let (eigenvalues, g, kind) = match coupling {
        SeparatedCoupling::Scalar(q) => {
            if !(*q < 0.0) {
                return Err(Error::InvalidParameter(format!("separated bound states need q < 0, got {q}")));
            }
            (vec![*q], None, BoundKind::Separated)
        }
        SeparatedCoupling::Matrix(g) => {
            check_pair_coupling(g, n, "G")?;
            let negative: Vec<f64> = group_eigen(hermitian_eigen(g))
                .into_iter()
                .map(|(l, _)| l)
                .filter(|&l| l < -BINDING_EPS)
                .collect();
            if negative.is_empty() {
                return Err(Error::InvalidParameter("G has no negative eigenvalue".into()));
            }
            (negative, Some(g), BoundKind::SeparatedSpin)
        }
    };
    let pairs = ordered_pairs(particles);
    let mut families = Vec::new();
    let mut patterns = Vec::new();
    for &lambda in &eigenvalues {
        for pattern in sign_patterns(particles) {
            let mut blocks = Vec::new();
            for (&(k, l), &eps) in pairs.iter().zip(&pattern) {
                blocks.push(statistics_op(space, l, k, statistics)? - identity(dim) * Complex64::from(eps as f64));
                if let Some(g) = g {
                    blocks.push(embed_pair(g, space, l, k)? - identity(dim) * Complex64::from(lambda));
                }
            }
            let vs = null_space(&stack(&blocks, dim), NULL_TOL);
            patterns.push(PatternDimension { eigenvalue: lambda, pattern: pattern.clone(), dimension: vs.len() });
            if vs.is_empty() {
                continue;
            }
            let boundary = match g {
                None => BoundaryCondition::Separated(SeparatedBC::symmetric(Coupling::Finite(lambda))),
                Some(g) => BoundaryCondition::SeparatedSpin(SeparatedSpinBC::new(g.clone())?),
            };
            families.push(BoundStateFamily {
                kind,
                space,
                statistics,
                eigenvalue: lambda,
                kappa: lambda,
                momenta: separated_string(lambda, particles),
                energy: separated_energy(lambda, particles),
                spin_vectors: vs,
                sign_pattern: Some(pattern),
                boundary,
            });
        }
    }
    Ok(SeparatedBoundStates { families, patterns, patterns_per_eigenvalue: 1 << pairs.len() })
}

/// `v · s_ε(x) · exp(κ Σ_{i>j} |x_i - x_j|)`.
#[derive(Debug, Clone)]
pub struct BoundWavefunction {
    pub space: SpinSpace,
    pub spin: ComplexVector,
    pub kappa: f64,
    pub sign_pattern: Option<Vec<i8>>,
}

impl RegionExpansion for BoundWavefunction {
    fn space(&self) -> SpinSpace {
        self.space
    }

    fn region_jet(&self, order: &[usize], x: &[f64]) -> (ComplexVector, Vec<ComplexVector>) {
        let n = order.len();
        let mut position = vec![0; n];
        for (m, &p) in order.iter().enumerate() {
            position[p] = m;
        }
        // inside the region, particle a is right of b iff position[a] > position[b]
        let right_of = |a: usize, b: usize| if position[a] > position[b] { 1.0 } else { -1.0 };
        let mut sign = 1.0;
        if let Some(eps) = &self.sign_pattern {
            for (&(k, l), &e) in ordered_pairs(n).iter().zip(eps) {
                if position[k] < position[l] {
                    sign *= e as f64;
                }
            }
        }
        let mut distance = 0.0;
        for (k, l) in ordered_pairs(n) {
            distance += right_of(k, l) * (x[k] - x[l]);
        }
        let value = &self.spin * Complex64::from(sign * (self.kappa * distance).exp());
        let grads = (0..n)
            .map(|p| {
                let slope: f64 = (0..n).filter(|&b| b != p).map(|b| right_of(p, b)).sum();
                &value * Complex64::from(self.kappa * slope)
            })
            .collect();
        (value, grads)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundVerification {
    pub boundary_defect: f64,
    pub eigen_residual: f64,
    pub statistics_residual: f64,
    /// Relative gap between `Σ k_m²` and the closed-form energy.
    pub energy_identity_residual: f64,
    pub kappa: f64,
    pub passed: bool,
}

pub const BOUND_BOUNDARY_TOL: f64 = 1e-9;
pub const BOUND_EIGEN_TOL: f64 = 1e-5;
pub const FD_STEP: f64 = 1e-4;

/// Checks every spin vector of the family: boundary conditions on all
/// collision planes, `-Δψ = Eψ` by finite differences, exchange statistics,
/// the energy identity and decay.
pub fn verify_bound_state(bs: &BoundStateFamily, bc: &BoundaryCondition, probes: usize, seed: u64) -> Result<BoundVerification> {
    let space = bs.space;
    let particles = space.particles;
    let mut boundary_defect = 0.0f64;
    let mut eigen = 0.0f64;
    let mut stats = 0.0f64;
    let points = interior_points(particles, probes, 0.01, seed ^ 0x5eed);
    for index in 0..bs.degeneracy() {
        let wf = bs.wavefunction(index);
        for (k, l) in ordered_pairs(particles) {
            let plane = hyperplane_probes(particles, l, k, probes, seed.wrapping_add((k * particles + l) as u64));
            boundary_defect = boundary_defect.max(boundary_residual(&wf, l, k, bc, &plane)?.max_residual);
        }
        for x in &points {
            eigen = eigen.max(eigen_residual(&wf, x, Complex64::from(bs.energy), FD_STEP)?);
            let psi = evaluate(&wf, x)?;
            for (k, l) in ordered_pairs(particles) {
                let mut y = x.clone();
                y.swap(k, l);
                let swapped = evaluate(&wf, &y)?;
                let p = statistics_op(space, l, k, bs.statistics)?;
                stats = stats.max((swapped - p * &psi).norm() / psi.norm().max(f64::MIN_POSITIVE));
            }
        }
    }
    let identity_residual = (bs.momentum_energy() - bs.energy).norm() / bs.energy.abs().max(f64::MIN_POSITIVE);
    let passed = bs.degeneracy() > 0
        && boundary_defect < BOUND_BOUNDARY_TOL
        && eigen < BOUND_EIGEN_TOL
        && stats < 1e-10
        && identity_residual < 1e-12
        && bs.kappa < 0.0;
    Ok(BoundVerification {
        boundary_defect,
        eigen_residual: eigen,
        statistics_residual: stats,
        energy_identity_residual: identity_residual,
        kappa: bs.kappa,
        passed,
    })
}
