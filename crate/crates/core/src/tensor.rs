//! Dense complex operators on the spin space `(C^n)^{⊗N}`.
//!
//! Basis ordering is big-endian: the tensor index `(s_1, …, s_N)` (zero-based
//! digits here) maps to `Σ s_i · n^{N-1-i}`, so particle 0 varies slowest.
//! Every module shares this convention.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Default absolute tolerance for operator identities.
pub const DEFAULT_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Bose,
    Fermi,
}

impl Statistics {
    pub fn sign(self) -> f64 {
        match self {
            Statistics::Bose => 1.0,
            Statistics::Fermi => -1.0,
        }
    }
}

/// `N` particles with `n` spin states each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinSpace {
    pub n: usize,
    pub particles: usize,
}

impl SpinSpace {
    pub fn new(n: usize, particles: usize) -> Result<Self> {
        if n == 0 || particles == 0 {
            return Err(Error::InvalidParameter(format!(
                "spin space needs n >= 1 and N >= 1, got n={n}, N={particles}"
            )));
        }
        Ok(Self { n, particles })
    }

    /// The two-particle space with the same single-particle dimension.
    pub fn pair(&self) -> Self {
        Self { n: self.n, particles: 2 }
    }

    pub fn dim(&self) -> usize {
        self.n.pow(self.particles as u32)
    }

    /// Flat-index weight of particle `i`.
    pub fn stride(&self, i: usize) -> usize {
        self.n.pow((self.particles - 1 - i) as u32)
    }

    pub fn digits(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.particles];
        for slot in out.iter_mut().rev() {
            *slot = flat % self.n;
            flat /= self.n;
        }
        out
    }

    pub fn flat(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &d| acc * self.n + d)
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i >= self.particles || j >= self.particles || i == j {
            return Err(Error::IndexOutOfRange {
                i,
                j,
                particles: self.particles,
            });
        }
        Ok(())
    }
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Operator with `(Q v)_s = v_{s∘σ}`, i.e. output digit `m` is read from
/// input digit `σ(m)`. For a transposition this is the swap `p^{ij}`.
pub fn spin_permutation(space: SpinSpace, sigma: &[usize]) -> Result<ComplexMatrix> {
    if sigma.len() != space.particles || !is_permutation(sigma) {
        return Err(Error::InvalidParameter(format!(
            "{sigma:?} is not a permutation of {} particles",
            space.particles
        )));
    }
    let dim = space.dim();
    let mut q = ComplexMatrix::zeros(dim, dim);
    let mut source = vec![0; space.particles];
    for s in 0..dim {
        let digits = space.digits(s);
        for (m, slot) in source.iter_mut().enumerate() {
            *slot = digits[sigma[m]];
        }
        q[(s, space.flat(&source))] = ONE;
    }
    Ok(q)
}

/// The swap `p^{ij}` of tensor factors `i` and `j` (zero-based).
pub fn permutation_op(space: SpinSpace, i: usize, j: usize) -> Result<ComplexMatrix> {
    space.check_pair(i, j)?;
    let mut sigma: Vec<usize> = (0..space.particles).collect();
    sigma.swap(i, j);
    spin_permutation(space, &sigma)
}

/// `P^{ij} = ±p^{ij}` for bosons / fermions.
pub fn statistics_op(
    space: SpinSpace,
    i: usize,
    j: usize,
    statistics: Statistics,
) -> Result<ComplexMatrix> {
    Ok(permutation_op(space, i, j)? * Complex64::from(statistics.sign()))
}

/// `h_{ij}`: the two-particle operator `h` acting on factors `(i, j)` in that
/// order, identity elsewhere. `embed_pair(h, space, 0, 1) = h ⊗ 1 ⊗ … ⊗ 1`.
pub fn embed_pair(h: &ComplexMatrix, space: SpinSpace, i: usize, j: usize) -> Result<ComplexMatrix> {
    space.check_pair(i, j)?;
    check_pair_operator(h, space)?;
    let n = space.n;
    let dim = space.dim();
    let (si, sj) = (space.stride(i), space.stride(j));
    let mut out = ComplexMatrix::zeros(dim, dim);
    for row in 0..dim {
        let digits = space.digits(row);
        let (ri, rj) = (digits[i], digits[j]);
        let base = row - ri * si - rj * sj;
        for ci in 0..n {
            for cj in 0..n {
                out[(row, base + ci * si + cj * sj)] = h[(ri * n + rj, ci * n + cj)];
            }
        }
    }
    Ok(out)
}

/// `embed_pair(h, space, i, j) * v` without forming the full matrix.
pub fn apply_pair(
    h: &ComplexMatrix,
    v: &ComplexVector,
    space: SpinSpace,
    i: usize,
    j: usize,
) -> Result<ComplexVector> {
    space.check_pair(i, j)?;
    check_pair_operator(h, space)?;
    if v.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("vector of length {}", space.dim()),
            found: format!("length {}", v.len()),
        });
    }
    let n = space.n;
    let (si, sj) = (space.stride(i), space.stride(j));
    let out = ComplexVector::from_fn(space.dim(), |row, _| {
        let ri = (row / si) % n;
        let rj = (row / sj) % n;
        let base = row - ri * si - rj * sj;
        let mut acc = ZERO;
        for ci in 0..n {
            for cj in 0..n {
                acc += h[(ri * n + rj, ci * n + cj)] * v[base + ci * si + cj * sj];
            }
        }
        acc
    });
    Ok(out)
}

fn check_pair_operator(h: &ComplexMatrix, space: SpinSpace) -> Result<()> {
    let d = space.n * space.n;
    if h.nrows() != d || h.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: format!("{d}x{d} pair operator"),
            found: format!("{}x{}", h.nrows(), h.ncols()),
        });
    }
    Ok(())
}

pub fn check_square(m: &ComplexMatrix, dim: usize, what: &str) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: format!("{what} of size {dim}x{dim}"),
            found: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    Ok(())
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

/// Frobenius norm; all residuals in the crate use it.
pub fn norm(m: &ComplexMatrix) -> f64 {
    m.norm()
}

pub fn hermiticity_residual(m: &ComplexMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

pub fn unitarity_residual(m: &ComplexMatrix) -> f64 {
    (m.adjoint() * m - identity(m.nrows())).norm()
}

pub fn is_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    m.is_square() && hermiticity_residual(m) < tol
}

pub fn is_unitary(m: &ComplexMatrix, tol: f64) -> bool {
    m.is_square() && unitarity_residual(m) < tol
}

pub fn approx_eq(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    a.shape() == b.shape() && (a - b).norm() < tol
}

/// Solves `a x = b`; `None` when `a` is singular.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Option<ComplexMatrix> {
    a.clone().lu().solve(b)
}

/// Smallest singular value, used as the distance of a resolvent from a pole.
pub fn smallest_singular_value(a: &ComplexMatrix) -> f64 {
    a.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Eigenpairs of a Hermitian matrix, ascending by eigenvalue.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Vec<(f64, ComplexVector)> {
    let eig = h.clone().symmetric_eigen();
    let mut pairs: Vec<(f64, ComplexVector)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, eig.eigenvectors.column(i).into_owned()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
}

/// Orthonormal basis of `{v : m v = 0}` from the Gram matrix `m†m`.
pub fn null_space(m: &ComplexMatrix, tol: f64) -> Vec<ComplexVector> {
    let gram = m.adjoint() * m;
    let scale = gram.norm().max(1.0);
    hermitian_eigen(&gram)
        .into_iter()
        .filter(|(l, _)| *l < tol * scale)
        .map(|(_, v)| v)
        .collect()
}

pub fn is_permutation(sigma: &[usize]) -> bool {
    let mut seen = vec![false; sigma.len()];
    for &s in sigma {
        if s >= sigma.len() || seen[s] {
            return false;
        }
        seen[s] = true;
    }
    true
}

/// `+1` for even permutations, `-1` for odd ones.
pub fn permutation_sign(sigma: &[usize]) -> f64 {
    let mut visited = vec![false; sigma.len()];
    let mut sign = 1.0;
    for start in 0..sigma.len() {
        if visited[start] {
            continue;
        }
        let mut len = 0;
        let mut k = start;
        while !visited[k] {
            visited[k] = true;
            k = sigma[k];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Real 4x4 (or any size) matrix literal helper, mostly for tests.
pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_row_iterator(rows, cols, entries.iter().map(|&x| Complex64::from(x)))
}

pub fn diag(entries: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&ComplexVector::from_column_slice(entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(r, c, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    /// Kronecker product straight from the index formula.
    fn kron_oracle(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        let (br, bc) = b.shape();
        ComplexMatrix::from_fn(a.nrows() * br, a.ncols() * bc, |r, c| {
            a[(r / br, c / bc)] * b[(r % br, c % bc)]
        })
    }

    fn basis(space: SpinSpace, digits: &[usize]) -> ComplexVector {
        let mut v = ComplexVector::zeros(space.dim());
        v[space.flat(digits)] = ONE;
        v
    }

    #[test]
    fn kron_identities() {
        assert_eq!(kron(&identity(2), &identity(2)), identity(4));
        let d = diag(&[ONE, Complex64::from(2.0)]);
        let expected = diag(&[ONE, ONE, Complex64::from(2.0), Complex64::from(2.0)]);
        assert_eq!(kron(&d, &identity(2)), expected);
    }

    #[test]
    fn kron_mixed_product_against_index_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let (a, b, c, d) = (
                random_matrix(&mut rng, 2, 2),
                random_matrix(&mut rng, 2, 2),
                random_matrix(&mut rng, 2, 2),
                random_matrix(&mut rng, 2, 2),
            );
            let lhs = kron_oracle(&a, &b) * kron_oracle(&c, &d);
            let rhs = kron_oracle(&(&a * &c), &(&b * &d));
            assert!(approx_eq(&lhs, &rhs, 1e-12));
            assert!(approx_eq(&kron(&a, &b), &kron_oracle(&a, &b), 0.0 + 1e-15));
        }
    }

    #[test]
    fn kron_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (a, b, c) = (
            random_matrix(&mut rng, 2, 3),
            random_matrix(&mut rng, 3, 2),
            random_matrix(&mut rng, 2, 2),
        );
        let lhs = kron(&kron(&a, &b), &c);
        let rhs = kron(&a, &kron(&b, &c));
        assert!(approx_eq(&lhs, &rhs, 1e-14));
    }

    #[test]
    fn swap_on_basis_vectors() {
        let space = SpinSpace::new(2, 2).unwrap();
        let p = permutation_op(space, 0, 1).unwrap();
        assert_eq!(&p * basis(space, &[0, 1]), basis(space, &[1, 0]));
        assert_eq!(&p * basis(space, &[0, 0]), basis(space, &[0, 0]));
    }

    #[test]
    fn swap_trace_counts_fixed_basis_vectors() {
        for n in 1..=3 {
            let space = SpinSpace::new(n, 2).unwrap();
            let p = permutation_op(space, 0, 1).unwrap();
            let fixed = (0..space.dim())
                .filter(|&s| {
                    let d = space.digits(s);
                    d[0] == d[1]
                })
                .count();
            assert_eq!(p.trace(), Complex64::from(fixed as f64));
            assert_eq!(fixed, n);
        }
    }

    #[test]
    fn swaps_are_involutions() {
        let space = SpinSpace::new(2, 3).unwrap();
        for i in 0..3 {
            for j in (i + 1)..3 {
                let p = permutation_op(space, i, j).unwrap();
                assert_eq!(&p * &p, identity(8));
                for stats in [Statistics::Bose, Statistics::Fermi] {
                    let big_p = statistics_op(space, i, j, stats).unwrap();
                    assert_eq!(&big_p * &big_p, identity(8));
                }
            }
        }
    }

    #[test]
    fn statistics_sign() {
        let space = SpinSpace::new(2, 2).unwrap();
        let p = permutation_op(space, 0, 1).unwrap();
        assert_eq!(statistics_op(space, 0, 1, Statistics::Bose).unwrap(), p);
        assert_eq!(statistics_op(space, 0, 1, Statistics::Fermi).unwrap(), -p);
    }

    #[test]
    fn symmetric_group_relations() {
        for n in 2..=3 {
            for particles in 3..=4 {
                let space = SpinSpace::new(n, particles).unwrap();
                for i in 0..particles {
                    for j in 0..particles {
                        for k in 0..particles {
                            if i == j || j == k || i == k {
                                continue;
                            }
                            let pij = permutation_op(space, i, j).unwrap();
                            let pjk = permutation_op(space, j, k).unwrap();
                            let pik = permutation_op(space, i, k).unwrap();
                            assert_eq!(&pij * &pjk * &pij, pik);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn index_errors() {
        let space = SpinSpace::new(2, 3).unwrap();
        assert!(matches!(permutation_op(space, 0, 3), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(permutation_op(space, 1, 1), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(
            embed_pair(&identity(3), space, 0, 1),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(SpinSpace::new(0, 2).is_err());
    }

    #[test]
    fn embed_identity_and_first_pair() {
        let space = SpinSpace::new(2, 3).unwrap();
        assert_eq!(embed_pair(&identity(4), space, 0, 1).unwrap(), identity(8));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_matrix(&mut rng, 4, 4);
        assert_eq!(embed_pair(&h, space, 0, 1).unwrap(), kron(&h, &identity(2)));
        assert_eq!(embed_pair(&h, space, 1, 2).unwrap(), kron(&identity(2), &h));
    }

    #[test]
    fn embed_non_adjacent_matches_conjugated_embedding_on_every_basis_vector() {
        let space = SpinSpace::new(2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = random_matrix(&mut rng, 4, 4);
        let p23 = permutation_op(space, 1, 2).unwrap();
        let conjugated = &p23 * kron(&h, &identity(2)) * &p23;
        let embedded = embed_pair(&h, space, 0, 2).unwrap();
        for s in 0..8 {
            let e = basis(space, &space.digits(s));
            assert!((&embedded * &e - &conjugated * &e).norm() < 1e-14);
        }
        // reversed factor order is the swap-conjugate
        let p = permutation_op(space.pair(), 0, 1).unwrap();
        let swapped = &p * &h * &p;
        assert!(approx_eq(
            &embed_pair(&h, space, 2, 0).unwrap(),
            &embed_pair(&swapped, space, 0, 2).unwrap(),
            1e-14
        ));
    }

    #[test]
    fn disjoint_embeddings_commute() {
        let space = SpinSpace::new(2, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_matrix(&mut rng, 4, 4);
        let g = random_matrix(&mut rng, 4, 4);
        for (a, b) in [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (2, 1))] {
            let x = embed_pair(&h, space, a.0, a.1).unwrap();
            let y = embed_pair(&g, space, b.0, b.1).unwrap();
            assert!(norm(&commutator(&x, &y)) < 1e-12);
        }
    }

    #[test]
    fn apply_pair_matches_embedding() {
        let space = SpinSpace::new(3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let h = random_matrix(&mut rng, 9, 9);
        let v = random_matrix(&mut rng, 27, 1).column(0).into_owned();
        for (i, j) in [(0, 1), (1, 2), (0, 2), (2, 0)] {
            let full = embed_pair(&h, space, i, j).unwrap() * &v;
            let fast = apply_pair(&h, &v, space, i, j).unwrap();
            assert!((full - fast).norm() < 1e-12);
        }
    }

    #[test]
    fn permutation_sign_and_general_spin_permutation() {
        assert_eq!(permutation_sign(&[0, 1, 2]), 1.0);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1.0);
        assert_eq!(permutation_sign(&[1, 2, 0]), 1.0);
        assert_eq!(permutation_sign(&[2, 1, 0]), -1.0);
        let space = SpinSpace::new(2, 3).unwrap();
        // reversal is p^{13}
        assert_eq!(
            spin_permutation(space, &[2, 1, 0]).unwrap(),
            permutation_op(space, 0, 2).unwrap()
        );
        // Q_{στ} = Q_σ Q_τ for the right action s ↦ s∘σ
        let sigma = [1, 2, 0];
        let tau = [0, 2, 1];
        let composed: Vec<usize> = (0..3).map(|m| sigma[tau[m]]).collect();
        let lhs = spin_permutation(space, &composed).unwrap();
        let rhs = spin_permutation(space, &sigma).unwrap() * spin_permutation(space, &tau).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn hermitian_and_unitary_predicates_take_tolerance() {
        let space = SpinSpace::new(2, 2).unwrap();
        let p = permutation_op(space, 0, 1).unwrap();
        assert!(is_hermitian(&p, DEFAULT_TOL));
        assert!(is_unitary(&p, DEFAULT_TOL));
        let mut q = p.clone();
        q[(0, 1)] = Complex64::new(1e-6, 0.0);
        assert!(!is_hermitian(&q, 1e-8));
        assert!(is_hermitian(&q, 1e-5));
    }

    #[test]
    fn null_space_of_swap_minus_identity_is_symmetric_subspace() {
        let space = SpinSpace::new(2, 2).unwrap();
        let p = permutation_op(space, 0, 1).unwrap();
        let sym = null_space(&(&p - identity(4)), 1e-12);
        assert_eq!(sym.len(), 3);
        for v in &sym {
            assert!((&p * v - v).norm() < 1e-12);
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
        assert_eq!(null_space(&(&p + identity(4)), 1e-12).len(), 1);
        assert!(null_space(&identity(3), 1e-12).is_empty());
    }

    #[test]
    fn hermitian_eigen_sorted_and_exact() {
        let h = real_matrix(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let e = hermitian_eigen(&h);
        assert!((e[0].0 - 1.0).abs() < 1e-12 && (e[1].0 - 3.0).abs() < 1e-12);
        for (l, v) in &e {
            assert!((&h * v - v * Complex64::from(*l)).norm() < 1e-12);
        }
    }
}
