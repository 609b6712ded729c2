//! Two-body Y-operators.
//!
//! The canonical spectral parameter is `k12 = (k_i - k_j)/2`. Going from a
//! Bethe coefficient with momentum `k_i` on the left particle of a colliding
//! pair to the one with the pair swapped multiplies by `Y(k12)`.

use num_complex::Complex64;

use crate::boundary::{BoundaryCondition, Coupling, NonseparatedBC};
use crate::error::{Error, Result};
use crate::tensor::{
    self, apply_pair, check_square, embed_pair, identity, statistics_op, ComplexMatrix,
    ComplexVector, SpinSpace, Statistics, I, ONE,
};

/// Relative threshold under which a denominator counts as a pole.
pub const POLE_EPS: f64 = 1e-12;

pub fn spectral_parameter(k_i: Complex64, k_j: Complex64) -> Complex64 {
    (k_i - k_j) / 2.0
}

fn pole_threshold(k: Complex64) -> f64 {
    POLE_EPS * (1.0 + k.norm())
}

fn nonseparated_denominator(k: Complex64, bc: &NonseparatedBC) -> Complex64 {
    I * k * (bc.a + bc.d) + k * k * bc.b - bc.c
}

/// `[2i e^{iθ} k P + (ik(a-d) + k²b + c)] / (ik(a+d) + k²b - c)`.
pub fn y_nonseparated(k: Complex64, bc: &NonseparatedBC, p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let den = nonseparated_denominator(k, bc);
    if den.norm() < pole_threshold(k) {
        return Err(Error::PoleAtParameter { k });
    }
    let scalar = I * k * (bc.a - bc.d) + k * k * bc.b + bc.c;
    let num = p * (I * 2.0 * bc.phase() * k) + identity(p.nrows()) * scalar;
    Ok(num / den)
}

/// `(ik + q)/(ik - q)`, with the Dirichlet limit `-1` for `q = ∞`.
pub fn y_separated(k: Complex64, q: Coupling) -> Result<Complex64> {
    match q {
        Coupling::Infinite => Ok(-ONE),
        Coupling::Finite(q) => {
            let den = I * k - q;
            if den.norm() < pole_threshold(k) {
                return Err(Error::PoleAtParameter { k });
            }
            Ok((I * k + q) / den)
        }
    }
}

/// `(2ik - h)^{-1} (2ik P + h)`, by a linear solve.
pub fn y_spin_delta(k: Complex64, h: &ComplexMatrix, p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let dim = h.nrows();
    check_square(h, dim, "h")?;
    check_square(p, dim, "P")?;
    let two_ik = identity(dim) * (I * 2.0 * k);
    let resolvent = &two_ik - h;
    if tensor::smallest_singular_value(&resolvent) < pole_threshold(k) {
        return Err(Error::SingularResolvent { k });
    }
    let rhs = p * (I * 2.0 * k) + h;
    tensor::solve(&resolvent, &rhs).ok_or(Error::SingularResolvent { k })
}

/// `(ik + G)(ik - G)^{-1}`. Both factors are functions of `G` and commute,
/// so this is evaluated as `(ik - G)^{-1}(ik + G)`.
pub fn y_separated_spin(k: Complex64, g: &ComplexMatrix) -> Result<ComplexMatrix> {
    let dim = g.nrows();
    check_square(g, dim, "G")?;
    let ik = identity(dim) * (I * k);
    let resolvent = &ik - g;
    if tensor::smallest_singular_value(&resolvent) < pole_threshold(k) {
        return Err(Error::SingularResolvent { k });
    }
    tensor::solve(&resolvent, &(&ik + g)).ok_or(Error::SingularResolvent { k })
}

/// δ-interaction Y written in the full momentum difference `Δ = k_i - k_j`:
/// `(iΔ P + c)/(iΔ - c)`.
pub fn y_delta_from_difference(diff: Complex64, c: f64, p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let den = I * diff - c;
    if den.norm() < pole_threshold(diff) {
        return Err(Error::PoleAtParameter { k: diff / 2.0 });
    }
    Ok((p * (I * diff) + identity(p.nrows()) * Complex64::from(c)) / den)
}

/// Separated Y in the full momentum difference: `(iΔ + 2q)/(iΔ - 2q)`.
pub fn y_separated_from_difference(diff: Complex64, q: Coupling) -> Result<Complex64> {
    match q {
        Coupling::Infinite => Ok(-ONE),
        Coupling::Finite(q) => {
            let den = I * diff - 2.0 * q;
            if den.norm() < pole_threshold(diff) {
                return Err(Error::PoleAtParameter { k: diff / 2.0 });
            }
            Ok((I * diff + 2.0 * q) / den)
        }
    }
}

/// The pair interaction a Y-operator is built from.
#[derive(Debug, Clone, PartialEq)]
pub enum Interaction {
    Nonseparated(NonseparatedBC),
    /// Separated sub-family `q = q₊ = -q₋`.
    Separated(Coupling),
    /// Spin-coupled δ with `n²×n²` coupling `h`.
    SpinDelta(ComplexMatrix),
    /// Separated spin coupling `G` (`n²×n²`).
    SeparatedSpin(ComplexMatrix),
}

impl Interaction {
    pub fn name(&self) -> &'static str {
        match self {
            Interaction::Nonseparated(_) => "nonseparated",
            Interaction::Separated(_) => "separated",
            Interaction::SpinDelta(_) => "spin_delta",
            Interaction::SeparatedSpin(_) => "separated_spin",
        }
    }

    /// The boundary condition each Y-operator encodes, on the `n²`-dim pair space.
    pub fn boundary(&self) -> BoundaryCondition {
        use crate::boundary::{SeparatedBC, SeparatedSpinBC, SpinDeltaBC};
        match self {
            Interaction::Nonseparated(bc) => BoundaryCondition::Nonseparated(*bc),
            Interaction::Separated(q) => BoundaryCondition::Separated(SeparatedBC::symmetric(*q)),
            Interaction::SpinDelta(h) => BoundaryCondition::SpinDelta(SpinDeltaBC { h: h.clone() }),
            Interaction::SeparatedSpin(g) => {
                BoundaryCondition::SeparatedSpin(SeparatedSpinBC { g: g.clone() })
            }
        }
    }
}

/// Y-operator family on an `N`-particle spin space.
#[derive(Debug, Clone, PartialEq)]
pub struct YOperator {
    interaction: Interaction,
    space: SpinSpace,
    statistics: Statistics,
    /// `P^{12}` on the pair space.
    pair_exchange: ComplexMatrix,
}

impl YOperator {
    pub fn new(interaction: Interaction, space: SpinSpace, statistics: Statistics) -> Result<Self> {
        if space.particles < 2 {
            return Err(Error::InvalidParameter("Y-operators need at least two particles".into()));
        }
        let pair_dim = space.n * space.n;
        match &interaction {
            Interaction::SpinDelta(m) | Interaction::SeparatedSpin(m) => {
                check_square(m, pair_dim, "pair coupling")?
            }
            Interaction::Nonseparated(_) | Interaction::Separated(_) => {}
        }
        let pair_exchange = statistics_op(space.pair(), 0, 1, statistics)?;
        Ok(Self {
            interaction,
            space,
            statistics,
            pair_exchange,
        })
    }

    /// Builds the Y-operator for a boundary condition that has one.
    pub fn from_boundary(bc: &BoundaryCondition, space: SpinSpace, statistics: Statistics) -> Result<Self> {
        let interaction = match bc {
            BoundaryCondition::Nonseparated(bc) => Interaction::Nonseparated(*bc),
            BoundaryCondition::Separated(sep) => {
                let q = sep.symmetric_coupling().ok_or_else(|| {
                    Error::Unsupported("separated conditions need q- = -q+ for a Bethe solution".into())
                })?;
                Interaction::Separated(q)
            }
            BoundaryCondition::SpinDelta(bc) => Interaction::SpinDelta(bc.h.clone()),
            BoundaryCondition::SeparatedSpin(bc) => Interaction::SeparatedSpin(bc.g.clone()),
            BoundaryCondition::Matrix(m) => {
                let dim = m.dim();
                let is_delta_form = (&m.a - identity(dim)).norm() < tensor::DEFAULT_TOL
                    && (&m.d - identity(dim)).norm() < tensor::DEFAULT_TOL
                    && m.b.norm() < tensor::DEFAULT_TOL;
                if is_delta_form {
                    Interaction::SpinDelta(m.c.clone())
                } else if let Some(scalar) = crate::boundary::reduce_to_scalar(m, tensor::DEFAULT_TOL) {
                    Interaction::Nonseparated(scalar)
                } else {
                    return Err(Error::Unsupported(
                        "no Y-operator for a general matrix boundary condition".into(),
                    ));
                }
            }
        };
        Self::new(interaction, space, statistics)
    }

    /// Same family on a space with a different particle count.
    pub fn with_particles(&self, particles: usize) -> Result<Self> {
        Self::new(
            self.interaction.clone(),
            SpinSpace::new(self.space.n, particles)?,
            self.statistics,
        )
    }

    pub fn interaction(&self) -> &Interaction {
        &self.interaction
    }

    pub fn space(&self) -> SpinSpace {
        self.space
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn pair_exchange(&self) -> &ComplexMatrix {
        &self.pair_exchange
    }

    /// Y on the pair space (`n²×n²`), first factor = left particle.
    pub fn pair_matrix(&self, k: Complex64) -> Result<ComplexMatrix> {
        let p = &self.pair_exchange;
        match &self.interaction {
            Interaction::Nonseparated(bc) => y_nonseparated(k, bc, p),
            Interaction::Separated(q) => Ok(identity(p.nrows()) * y_separated(k, *q)?),
            Interaction::SpinDelta(h) => y_spin_delta(k, h, p),
            Interaction::SeparatedSpin(g) => y_separated_spin(k, g),
        }
    }

    /// Distance of the Y denominator (or resolvent) from singularity.
    pub fn pole_distance(&self, k: Complex64) -> f64 {
        let dim = self.pair_exchange.nrows();
        match &self.interaction {
            Interaction::Nonseparated(bc) => nonseparated_denominator(k, bc).norm(),
            Interaction::Separated(Coupling::Infinite) => f64::INFINITY,
            Interaction::Separated(Coupling::Finite(q)) => (I * k - *q).norm(),
            Interaction::SpinDelta(h) => {
                tensor::smallest_singular_value(&(identity(dim) * (I * 2.0 * k) - h))
            }
            Interaction::SeparatedSpin(g) => {
                tensor::smallest_singular_value(&(identity(dim) * (I * k) - g))
            }
        }
    }

    /// `Y^{ij}(k)` on the full `n^N` space.
    pub fn eval(&self, k: Complex64, i: usize, j: usize) -> Result<ComplexMatrix> {
        embed_pair(&self.pair_matrix(k)?, self.space, i, j)
    }

    /// `Y^{ij}(k) v` without building the full matrix.
    pub fn apply(&self, k: Complex64, i: usize, j: usize, v: &ComplexVector) -> Result<ComplexVector> {
        apply_pair(&self.pair_matrix(k)?, v, self.space, i, j)
    }

    /// `P^{ij}` on the full space.
    pub fn exchange(&self, i: usize, j: usize) -> Result<ComplexMatrix> {
        statistics_op(self.space, i, j, self.statistics)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::build_hspin;
    use crate::tensor::{commutator, permutation_op, unitarity_residual};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn swap(n: usize) -> ComplexMatrix {
        permutation_op(SpinSpace::new(n, 2).unwrap(), 0, 1).unwrap()
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
        let m = ComplexMatrix::from_fn(dim, dim, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        (&m + m.adjoint()) * c(0.5, 0.0)
    }

    fn random_hspin(rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let mut r = || rng.gen_range(-2.0..2.0);
        build_hspin(c(r(), 0.0), c(r(), 0.0), r(), c(r(), r()), c(r(), 0.0), c(r(), r()), c(r(), r())).unwrap()
    }

    #[test]
    fn delta_reduces_to_difference_form() {
        let p = swap(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let (k1, k2, cc) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-3.0..3.0));
            let k12 = spectral_parameter(c(k1, 0.0), c(k2, 0.0));
            let y = y_nonseparated(k12, &NonseparatedBC::delta(cc), &p).unwrap();
            let y0 = y_delta_from_difference(c(k1 - k2, 0.0), cc, &p).unwrap();
            assert!((y - y0).norm() < 1e-12);
        }
    }

    #[test]
    fn free_case_is_exchange() {
        let p = swap(3);
        let y = y_nonseparated(c(0.7, 0.0), &NonseparatedBC::delta(0.0), &p).unwrap();
        assert!((y - &p).norm() < 1e-15);
        let h0 = ComplexMatrix::zeros(9, 9);
        assert!((y_spin_delta(c(0.7, 0.0), &h0, &p).unwrap() - &p).norm() < 1e-15);
        assert!((y_separated_spin(c(0.7, 0.0), &h0).unwrap() - identity(9)).norm() < 1e-15);
    }

    #[test]
    fn scalar_nonseparated_modulus_one_when_a_equals_d() {
        // n = 1, θ = 0: numerator and denominator are conjugate up to sign
        let one = identity(1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let a: f64 = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let bc = NonseparatedBC { theta: 0.0, a, b: 0.0, c: rng.gen_range(-4.0..4.0), d: a };
            let k = c(rng.gen_range(-5.0..5.0), 0.0);
            let y = y_nonseparated(k, &bc, &one).unwrap()[(0, 0)];
            assert!((y.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn separated_limits_and_modulus() {
        assert_eq!(y_separated(c(1.3, 0.0), Coupling::Finite(0.0)).unwrap(), ONE);
        assert_eq!(y_separated(c(1.3, 0.0), Coupling::Infinite).unwrap(), -ONE);
        // large q approaches the Dirichlet value
        let big = y_separated(c(1.3, 0.0), Coupling::Finite(1e9)).unwrap();
        assert!((big + ONE).norm() < 1e-8);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let y = y_separated(c(rng.gen_range(-5.0..5.0), 0.0), Coupling::Finite(rng.gen_range(-4.0..4.0))).unwrap();
            assert!((y.norm() - 1.0).abs() < 1e-12);
        }
        // pole at k = -iq
        assert!(matches!(
            y_separated(c(0.0, 2.0), Coupling::Finite(-2.0)),
            Err(Error::PoleAtParameter { .. })
        ));
        let d = y_separated_from_difference(c(2.0, 0.0), Coupling::Finite(0.6)).unwrap();
        assert!((d - y_separated(c(1.0, 0.0), Coupling::Finite(0.6)).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn nonseparated_pole() {
        let bc = NonseparatedBC::delta(-2.0);
        // 2ik - c = 0  ⇔  k = c/(2i) = i
        assert!(matches!(
            y_nonseparated(c(0.0, 1.0), &bc, &swap(2)),
            Err(Error::PoleAtParameter { .. })
        ));
        assert!(y_nonseparated(c(0.0, -1.0), &bc, &swap(2)).is_ok());
    }

    #[test]
    fn spin_delta_with_scalar_h_matches_delta() {
        let p = swap(2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let cc = rng.gen_range(-3.0..3.0);
            let k = c(rng.gen_range(-5.0..5.0), 0.0);
            let a = y_spin_delta(k, &(identity(4) * c(cc, 0.0)), &p).unwrap();
            let b = y_nonseparated(k, &NonseparatedBC::delta(cc), &p).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn spin_delta_unitary_for_commuting_h() {
        let p = swap(2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let h = random_hspin(&mut rng);
            assert!(commutator(&h, &p).norm() < 1e-12);
            let k = c(rng.gen_range(-5.0..5.0), 0.0);
            let y = y_spin_delta(k, &h, &p).unwrap();
            assert!(unitarity_residual(&y) < 1e-10);
        }
    }

    #[test]
    fn spin_delta_singular_resolvent_at_imaginary_parameter() {
        // 2ik = Λ for the eigenvalue Λ = -3 of h = -3·1
        let h = identity(4) * c(-3.0, 0.0);
        let k = c(0.0, 1.5);
        assert!(matches!(y_spin_delta(k, &h, &swap(2)), Err(Error::SingularResolvent { .. })));
    }

    #[test]
    fn separated_spin_reduces_to_scalar_and_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let q = rng.gen_range(-3.0..3.0);
            let k = c(rng.gen_range(-5.0..5.0), 0.0);
            let y = y_separated_spin(k, &(identity(4) * c(q, 0.0))).unwrap();
            let s = y_separated(k, Coupling::Finite(q)).unwrap();
            assert!((y - identity(4) * s).norm() < 1e-12);

            let g = random_hermitian(&mut rng, 4);
            let y = y_separated_spin(k, &g).unwrap();
            assert!(unitarity_residual(&y) < 1e-10);
            // both factor orders agree
            let ik = identity(4) * (I * k);
            let right = (&ik + &g) * (&ik - &g).try_inverse().unwrap();
            assert!((y - right).norm() < 1e-10);
        }
    }

    #[test]
    fn inverse_relation_for_integrable_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let space = SpinSpace::new(2, 2).unwrap();
        let families = vec![
            Interaction::Nonseparated(NonseparatedBC::delta(2.7)),
            Interaction::Nonseparated(NonseparatedBC { theta: 0.0, a: -1.0, b: 0.0, c: 1.1, d: -1.0 }),
            Interaction::Separated(Coupling::Finite(-1.3)),
            Interaction::Separated(Coupling::Infinite),
            Interaction::SpinDelta(random_hspin(&mut rng)),
            Interaction::SeparatedSpin(random_hermitian(&mut rng, 4)),
        ];
        for fam in families {
            for stats in [Statistics::Bose, Statistics::Fermi] {
                let op = YOperator::new(fam.clone(), space, stats).unwrap();
                for _ in 0..100 {
                    let k = c(rng.gen_range(-5.0..5.0), 0.0);
                    let prod = op.pair_matrix(k).unwrap() * op.pair_matrix(-k).unwrap();
                    assert!((prod - identity(4)).norm() < 1e-10, "{}", fam.name());
                }
            }
        }
    }

    #[test]
    fn inverse_relation_requires_zero_theta_and_equal_diagonal() {
        // Y(k)Y(-k) = 1 only when a = d and e^{2iθ} = 1
        let p = swap(2);
        let k = c(0.9, 0.0);
        let check = |bc: NonseparatedBC| {
            let prod = y_nonseparated(k, &bc, &p).unwrap() * y_nonseparated(-k, &bc, &p).unwrap();
            (prod - identity(4)).norm()
        };
        assert!(check(NonseparatedBC { theta: 0.5, ..NonseparatedBC::delta(2.7) }) > 1e-3);
        assert!(check(NonseparatedBC::from_theta_a_b_c(0.0, 2.0, 0.0, 1.0).unwrap()) > 1e-3);
        assert!(check(NonseparatedBC { theta: std::f64::consts::PI, ..NonseparatedBC::delta(2.0) }) < 1e-12);
        // b ≠ 0 with a = d keeps the inverse relation
        assert!(check(NonseparatedBC { theta: 0.0, a: 1.0, b: 0.5, c: 0.0, d: 1.0 }) < 1e-12);
    }

    #[test]
    fn embedded_operators_on_disjoint_pairs_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let op = YOperator::new(
            Interaction::SpinDelta(random_hspin(&mut rng)),
            SpinSpace::new(2, 4).unwrap(),
            Statistics::Fermi,
        )
        .unwrap();
        let a = op.eval(c(0.3, 0.0), 0, 1).unwrap();
        let b = op.eval(c(-1.2, 0.0), 2, 3).unwrap();
        assert!(commutator(&a, &b).norm() < 1e-10);
        let v = ComplexVector::from_fn(16, |i, _| c(i as f64, 1.0));
        assert!((op.apply(c(0.3, 0.0), 0, 1, &v).unwrap() - &a * &v).norm() < 1e-12);
    }

    #[test]
    fn matrix_boundary_conditions_map_to_families() {
        use crate::boundary::{MatrixBC, SpinDeltaBC};
        let space = SpinSpace::new(2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = random_hspin(&mut rng);
        let bc = BoundaryCondition::Matrix(SpinDeltaBC::new(h.clone()).unwrap().to_matrix_bc());
        let op = YOperator::from_boundary(&bc, space, Statistics::Bose).unwrap();
        assert_eq!(op.interaction(), &Interaction::SpinDelta(h));
        let general = BoundaryCondition::Matrix(MatrixBC::derivative_coupling(random_hermitian(&mut rng, 4)));
        assert!(matches!(
            YOperator::from_boundary(&general, space, Statistics::Bose),
            Err(Error::Unsupported(_))
        ));
        assert!(YOperator::new(Interaction::SpinDelta(identity(3)), space, Statistics::Bose).is_err());
    }
}
