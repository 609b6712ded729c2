//! Point-interaction boundary conditions at a collision plane `x = x_j - x_i = 0`.
//!
//! Five families are represented: the four-parameter nonseparated scalar
//! condition, separated (Robin/Dirichlet) conditions, general `n²×n²` matrix
//! conditions, the spin-coupled δ interaction and its separated analogue.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{
    check_square, commutator, hermiticity_residual, identity, permutation_op, ComplexMatrix,
    SpinSpace, DEFAULT_TOL, ZERO,
};

/// Residual of one algebraic relation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationResidual {
    pub relation: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Validation {
    Valid(Vec<RelationResidual>),
    Violation(Vec<RelationResidual>),
}

impl Validation {
    fn from_residuals(residuals: Vec<RelationResidual>, tol: f64) -> Self {
        if residuals.iter().all(|r| r.residual < tol) {
            Validation::Valid(residuals)
        } else {
            Validation::Violation(residuals)
        }
    }

    pub fn is_valid(&self) -> bool {
        matches!(self, Validation::Valid(_))
    }

    pub fn residuals(&self) -> &[RelationResidual] {
        match self {
            Validation::Valid(r) | Validation::Violation(r) => r,
        }
    }
}

/// `(φ, φ')(0+) = e^{iθ} [[a, b], [c, d]] (φ, φ')(0-)` with `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonseparatedBC {
    pub theta: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl NonseparatedBC {
    /// Checked constructor; rejects `|ad - bc - 1| >= 1e-10`.
    pub fn new(theta: f64, a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let bc = Self { theta, a, b, c, d };
        match bc.validate(DEFAULT_TOL) {
            Validation::Valid(_) => Ok(bc),
            Validation::Violation(r) => Err(Error::InvalidParameter(format!(
                "nonseparated boundary condition violates ad - bc = 1: {r:?}"
            ))),
        }
    }

    /// Ordinary δ interaction of strength `c`.
    pub fn delta(c: f64) -> Self {
        Self { theta: 0.0, a: 1.0, b: 0.0, c, d: 1.0 }
    }

    /// Builds a point of the family with `d = (1 + bc)/a`.
    pub fn from_theta_a_b_c(theta: f64, a: f64, b: f64, c: f64) -> Result<Self> {
        if a == 0.0 {
            return Err(Error::InvalidParameter("a must be nonzero to solve for d".into()));
        }
        Self::new(theta, a, b, c, (1.0 + b * c) / a)
    }

    pub fn validate(&self, tol: f64) -> Validation {
        let finite = [self.theta, self.a, self.b, self.c, self.d]
            .iter()
            .all(|x| x.is_finite());
        let det = self.a * self.d - self.b * self.c - 1.0;
        let residual = if finite { det.abs() } else { f64::INFINITY };
        Validation::from_residuals(
            vec![RelationResidual {
                relation: "ad-bc=1".into(),
                residual,
            }],
            tol,
        )
    }

    pub fn phase(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }
}

pub fn validate_nonseparated(bc: &NonseparatedBC, tol: f64) -> Validation {
    bc.validate(tol)
}

/// A Robin coupling `φ' = q φ`, or the Dirichlet limit `q = ∞` kept as a tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Finite(f64),
    Infinite,
}

impl Coupling {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Coupling::Infinite)
    }

    pub fn neg(self) -> Self {
        match self {
            Coupling::Finite(q) => Coupling::Finite(-q),
            Coupling::Infinite => Coupling::Infinite,
        }
    }
}

impl Serialize for Coupling {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Coupling::Finite(q) => s.serialize_f64(*q),
            Coupling::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Coupling {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(q) if q.is_finite() => Ok(Coupling::Finite(q)),
            Raw::Num(_) => Ok(Coupling::Infinite),
            Raw::Str(s) if matches!(s.as_str(), "inf" | "infinity" | "Infinity" | "∞") => {
                Ok(Coupling::Infinite)
            }
            Raw::Str(s) => Err(serde::de::Error::custom(format!("invalid coupling {s:?}"))),
        }
    }
}

/// `φ'(0+) = q₊ φ(0+)`, `φ'(0-) = q₋ φ(0-)`; `∞` means Dirichlet on that side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparatedBC {
    pub q_plus: Coupling,
    pub q_minus: Coupling,
}

impl SeparatedBC {
    /// The sub-family `q = q₊ = -q₋`.
    pub fn symmetric(q: Coupling) -> Self {
        Self { q_plus: q, q_minus: q.neg() }
    }

    /// `Some(q)` when `q₋ = -q₊`.
    pub fn symmetric_coupling(&self) -> Option<Coupling> {
        match (self.q_plus, self.q_minus) {
            (Coupling::Infinite, Coupling::Infinite) => Some(Coupling::Infinite),
            (Coupling::Finite(p), Coupling::Finite(m)) if (p + m).abs() < DEFAULT_TOL => {
                Some(Coupling::Finite(p))
            }
            _ => None,
        }
    }
}

/// `(ψ, ψ')(0+) = [[A, B], [C, D]] (ψ, ψ')(0-)` with `n²×n²` blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixBC {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
    pub d: ComplexMatrix,
}

impl MatrixBC {
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    fn check_dims(&self) -> Result<()> {
        let dim = self.a.nrows();
        for (m, name) in [(&self.a, "A"), (&self.b, "B"), (&self.c, "C"), (&self.d, "D")] {
            check_square(m, dim, name)?;
        }
        Ok(())
    }

    /// `A†D - C†B = 1`, `B†D = D†B`, `A†C = C†A`.
    pub fn validate(&self, tol: f64) -> Result<Validation> {
        self.check_dims()?;
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        let r1 = (a.adjoint() * d - c.adjoint() * b - identity(self.dim())).norm();
        let r2 = (b.adjoint() * d - d.adjoint() * b).norm();
        let r3 = (a.adjoint() * c - c.adjoint() * a).norm();
        Ok(Validation::from_residuals(
            vec![
                RelationResidual { relation: "A†D-C†B=1".into(), residual: r1 },
                RelationResidual { relation: "B†D=D†B".into(), residual: r2 },
                RelationResidual { relation: "A†C=C†A".into(), residual: r3 },
            ],
            tol,
        ))
    }

    /// Condition with `A = D = 1`, `B` arbitrary, `C = 0`.
    pub fn derivative_coupling(b: ComplexMatrix) -> Self {
        let dim = b.nrows();
        Self {
            a: identity(dim),
            b,
            c: ComplexMatrix::zeros(dim, dim),
            d: identity(dim),
        }
    }
}

pub fn validate_matrix_bc(bc: &MatrixBC, tol: f64) -> Result<Validation> {
    bc.validate(tol)
}

/// Spin-coupled δ interaction: continuity plus `ψ'(0+) - ψ'(0-) = h ψ(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinDeltaBC {
    pub h: ComplexMatrix,
}

impl SpinDeltaBC {
    pub fn new(h: ComplexMatrix) -> Result<Self> {
        check_square(&h, h.nrows(), "h")?;
        let r = hermiticity_residual(&h);
        if r >= DEFAULT_TOL {
            return Err(Error::InvalidParameter(format!("h is not Hermitian (residual {r:e})")));
        }
        Ok(Self { h })
    }

    pub fn to_matrix_bc(&self) -> MatrixBC {
        let dim = self.h.nrows();
        MatrixBC {
            a: identity(dim),
            b: ComplexMatrix::zeros(dim, dim),
            c: self.h.clone(),
            d: identity(dim),
        }
    }
}

/// `ψ'(0+) = G ψ(0+)`, `ψ'(0-) = -G ψ(0-)` with `G` Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatedSpinBC {
    pub g: ComplexMatrix,
}

impl SeparatedSpinBC {
    pub fn new(g: ComplexMatrix) -> Result<Self> {
        check_square(&g, g.nrows(), "G")?;
        let r = hermiticity_residual(&g);
        if r >= DEFAULT_TOL {
            return Err(Error::InvalidParameter(format!("G is not Hermitian (residual {r:e})")));
        }
        Ok(Self { g })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryCondition {
    Nonseparated(NonseparatedBC),
    Separated(SeparatedBC),
    Matrix(MatrixBC),
    SpinDelta(SpinDeltaBC),
    SeparatedSpin(SeparatedSpinBC),
}

impl BoundaryCondition {
    pub fn name(&self) -> &'static str {
        match self {
            BoundaryCondition::Nonseparated(_) => "nonseparated",
            BoundaryCondition::Separated(_) => "separated",
            BoundaryCondition::Matrix(_) => "matrix",
            BoundaryCondition::SpinDelta(_) => "spin_delta",
            BoundaryCondition::SeparatedSpin(_) => "separated_spin",
        }
    }

    pub fn validate(&self, tol: f64) -> Result<Validation> {
        match self {
            BoundaryCondition::Nonseparated(bc) => Ok(bc.validate(tol)),
            BoundaryCondition::Separated(_) => Ok(Validation::Valid(vec![])),
            BoundaryCondition::Matrix(bc) => bc.validate(tol),
            BoundaryCondition::SpinDelta(bc) => bc.to_matrix_bc().validate(tol),
            BoundaryCondition::SeparatedSpin(bc) => Ok(Validation::from_residuals(
                vec![RelationResidual {
                    relation: "G=G†".into(),
                    residual: hermiticity_residual(&bc.g),
                }],
                tol,
            )),
        }
    }
}

/// The general spin-½ pair coupling commuting with the spin swap:
///
/// ```text
/// [ a    e1   e1   c  ]
/// [ e1*  f    g    e2 ]
/// [ e1*  g    f    e2 ]
/// [ c*   e2*  e2*  b  ]
/// ```
///
/// `a`, `b` and `f` sit on the diagonal and must be real; nonzero imaginary
/// parts are rejected.
pub fn build_hspin(
    a: Complex64,
    b: Complex64,
    g: f64,
    c: Complex64,
    f: Complex64,
    e1: Complex64,
    e2: Complex64,
) -> Result<ComplexMatrix> {
    for (name, v) in [("a", a), ("b", b), ("f", f)] {
        if v.im.abs() > DEFAULT_TOL {
            return Err(Error::InvalidParameter(format!(
                "diagonal entry {name} = {v} must be real for h to be Hermitian"
            )));
        }
    }
    let g = Complex64::from(g);
    let (a, b, f) = (Complex64::from(a.re), Complex64::from(b.re), Complex64::from(f.re));
    #[rustfmt::skip]
    let h = ComplexMatrix::from_row_slice(4, 4, &[
        a,         e1,        e1,        c,
        e1.conj(), f,         g,         e2,
        e1.conj(), g,         f,         e2,
        c.conj(),  e2.conj(), e2.conj(), b,
    ]);
    let swap = permutation_op(SpinSpace { n: 2, particles: 2 }, 0, 1)?;
    debug_assert!(hermiticity_residual(&h) < 1e-12);
    debug_assert!(commutator(&h, &swap).norm() < 1e-12);
    Ok(h)
}

/// Recovers `(θ, a, b, c, d)` when every block is a multiple of the identity
/// with a common phase.
pub fn reduce_to_scalar(bc: &MatrixBC, tol: f64) -> Option<NonseparatedBC> {
    bc.check_dims().ok()?;
    let blocks = [&bc.a, &bc.b, &bc.c, &bc.d];
    let dim = bc.dim();
    let mut scalars = [ZERO; 4];
    for (slot, m) in scalars.iter_mut().zip(blocks) {
        let s = m[(0, 0)];
        if (m - identity(dim) * s).norm() > tol {
            return None;
        }
        *slot = s;
    }
    let lead = scalars
        .iter()
        .cloned()
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))?;
    if lead.norm() < tol {
        return None;
    }
    // e^{iθ} and -e^{iθ} describe the same family; keep θ in (-π/2, π/2].
    let mut theta = lead.arg();
    if theta > FRAC_PI_2 + 1e-15 {
        theta -= std::f64::consts::PI;
    } else if theta <= -FRAC_PI_2 + 1e-15 {
        theta += std::f64::consts::PI;
    }
    let unphase = Complex64::from_polar(1.0, -theta);
    let mut real = [0.0; 4];
    for (r, s) in real.iter_mut().zip(scalars) {
        let v = s * unphase;
        if v.im.abs() > tol {
            return None;
        }
        *r = v.re;
    }
    Some(NonseparatedBC {
        theta,
        a: real[0],
        b: real[1],
        c: real[2],
        d: real[3],
    })
}
