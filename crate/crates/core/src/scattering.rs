//! Factorized scattering matrices built from `X_ij = Y^{ij}((k_i - k_j)/2) P^{ij}`.
//!
//! The canonical word is `[X_{1,0} X_{2,0} … X_{N-1,0}][X_{2,1} … X_{N-1,1}] … [X_{N-1,N-2}]`
//! (0-based particles), multiplied left to right and acting on in-state columns.

use num_complex::Complex64;
use crate::bethe::{arrangement_rank, assemble_unchecked};
use crate::bound_states::spin_delta_string;
use crate::error::{Error, Result};
use crate::tensor::{
    identity, norm, permutation_sign, solve, spin_permutation, unitarity_residual, ComplexMatrix, ComplexVector,
    SpinSpace, Statistics,
};
use crate::yang_ops::{spectral_parameter, YOperator};

/// Factor `(i, j)` stands for `X_ij`.
pub type Word = Vec<(usize, usize)>;

#[derive(Debug, Clone)]
pub struct SMatrix {
    pub space: SpinSpace,
    pub statistics: Statistics,
    pub momenta: Vec<f64>,
    pub matrix: ComplexMatrix,
    pub word: Word,
}

impl SMatrix {
    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.matrix)
    }

    /// `‖S - Sᵀ‖`.
    pub fn symmetry_residual(&self) -> f64 {
        norm(&(&self.matrix - self.matrix.transpose()))
    }

    /// `⟨s'|S|s⟩` with spin labels in `1..=n`.
    pub fn element(&self, out: &[usize], inp: &[usize]) -> Result<Complex64> {
        smatrix_element(self, out, inp)
    }
}

fn operator_for(op: &YOperator, particles: usize) -> Result<YOperator> {
    if op.space().particles == particles {
        Ok(op.clone())
    } else {
        op.with_particles(particles)
    }
}

/// `X_ij` on the full space of `momenta.len()` particles.
pub fn x_op(op: &YOperator, i: usize, j: usize, momenta: &[Complex64]) -> Result<ComplexMatrix> {
    let op = operator_for(op, momenta.len())?;
    for &p in &[i, j] {
        if p >= momenta.len() {
            return Err(Error::IndexOutOfRange { i, j, particles: momenta.len() });
        }
    }
    if (momenta[i] - momenta[j]).norm() < 1e-12 {
        return Err(Error::CoincidentMomenta { i: i.min(j), j: i.max(j) });
    }
    let y = op.eval(spectral_parameter(momenta[i], momenta[j]), i, j)?;
    Ok(y * op.exchange(i, j)?)
}

pub fn canonical_word(particles: usize) -> Word {
    (0..particles.saturating_sub(1))
        .flat_map(|l| (l + 1..particles).map(move |k| (k, l)))
        .collect()
}

/// The canonical word with its last three factors, the three-particle block
/// `X_{ba} X_{ca} X_{cb}`, replaced by `X_{cb} X_{ca} X_{ba}`.
pub fn alternative_word(particles: usize) -> Result<Word> {
    if particles < 3 {
        return Err(Error::InvalidParameter("a braid move needs at least three particles".into()));
    }
    let mut w = canonical_word(particles);
    let n = w.len();
    w[n - 3..].reverse();
    Ok(w)
}

pub fn product_along(op: &YOperator, word: &[(usize, usize)], momenta: &[Complex64]) -> Result<ComplexMatrix> {
    let dim = operator_for(op, momenta.len())?.space().dim();
    let mut s = identity(dim);
    for &(i, j) in word {
        s *= x_op(op, i, j, momenta)?;
    }
    Ok(s)
}

fn check_ascending(momenta: &[f64]) -> Result<()> {
    if momenta.iter().any(|k| !k.is_finite()) || momenta.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NonAscendingMomenta);
    }
    Ok(())
}

fn complexify(momenta: &[f64]) -> Vec<Complex64> {
    momenta.iter().map(|&k| Complex64::from(k)).collect()
}

/// `S` along the canonical word for strictly ascending real momenta.
pub fn build_smatrix(op: &YOperator, momenta: &[f64]) -> Result<SMatrix> {
    check_ascending(momenta)?;
    let n = momenta.len();
    if n < 2 {
        return Err(Error::InvalidParameter("scattering needs at least two particles".into()));
    }
    let op = operator_for(op, n)?;
    let word = canonical_word(n);
    let matrix = product_along(&op, &word, &complexify(momenta))?;
    Ok(SMatrix {
        space: op.space(),
        statistics: op.statistics(),
        momenta: momenta.to_vec(),
        matrix,
        word,
    })
}

/// `‖S_canonical - S_alternative‖` for the braid-moved word.
pub fn order_independence_residual(op: &YOperator, momenta: &[f64]) -> Result<f64> {
    check_ascending(momenta)?;
    let k = complexify(momenta);
    let a = product_along(op, &canonical_word(k.len()), &k)?;
    let b = product_along(op, &alternative_word(k.len())?, &k)?;
    Ok(norm(&(a - b)))
}

pub fn smatrix_element(s: &SMatrix, out: &[usize], inp: &[usize]) -> Result<Complex64> {
    let index = |labels: &[usize]| -> Result<usize> {
        if labels.len() != s.space.particles {
            return Err(Error::DimensionMismatch {
                expected: format!("{} spin labels", s.space.particles),
                found: format!("{}", labels.len()),
            });
        }
        let mut digits = Vec::with_capacity(labels.len());
        for &l in labels {
            if l < 1 || l > s.space.n {
                return Err(Error::LabelOutOfRange { label: l, n: s.space.n });
            }
            digits.push(l - 1);
        }
        Ok(s.space.flat(&digits))
    };
    Ok(s.matrix[(index(out)?, index(inp)?)])
}

#[derive(Debug, Clone)]
pub struct ClusterSMatrix {
    pub matrix: ComplexMatrix,
    pub word: Word,
}

/// Scattering of cluster `b` on cluster `a`: for each particle of `a` from
/// last to first, the factors `X_{b_1 a} X_{b_2 a} …`.
pub fn cluster_smatrix(op: &YOperator, cluster_a: &[usize], cluster_b: &[usize], momenta: &[Complex64]) -> Result<ClusterSMatrix> {
    let n = momenta.len();
    let mut seen = vec![false; n];
    for &p in cluster_a.iter().chain(cluster_b) {
        if p >= n {
            return Err(Error::IndexOutOfRange { i: p, j: p, particles: n });
        }
        if seen[p] {
            return Err(Error::InvalidParameter(format!("particle {p} appears twice in the clusters")));
        }
        seen[p] = true;
    }
    let word: Word = cluster_a
        .iter()
        .rev()
        .flat_map(|&a| cluster_b.iter().map(move |&b| (b, a)))
        .collect();
    let matrix = product_along(op, &word, momenta)?;
    Ok(ClusterSMatrix { matrix, word })
}

/// Momenta of a bound cluster with total momentum `total`: the string
/// shifted by `total / size`.
pub fn cluster_string(total: f64, kappa_prime: f64, size: usize) -> Vec<Complex64> {
    spin_delta_string(kappa_prime, size)
        .into_iter()
        .map(|k| k + total / size as f64)
        .collect()
}

/// Exchange-symmetry map of the fully reversed region: `sgn(σ)^F Q_σ`.
pub fn reversal_operator(space: SpinSpace, statistics: Statistics) -> Result<ComplexMatrix> {
    let sigma: Vec<usize> = (0..space.particles).rev().collect();
    let sign = match statistics {
        Statistics::Bose => 1.0,
        Statistics::Fermi => permutation_sign(&sigma),
    };
    Ok(spin_permutation(space, &sigma)? * Complex64::from(sign))
}

/// `S` read off the assembled Bethe coefficients: the out-amplitude `u_{0…N-1}`
/// against the in-amplitude `Π_rev u_{N-1…0}` seen in the reversed region.
pub fn bethe_smatrix(op: &YOperator, momenta: &[f64]) -> Result<ComplexMatrix> {
    check_ascending(momenta)?;
    let n = momenta.len();
    let op = operator_for(op, n)?;
    let space = op.space();
    let k = complexify(momenta);
    let reversed: Vec<usize> = (0..n).rev().collect();
    let rank = arrangement_rank(&reversed);
    let mut transfer = ComplexMatrix::zeros(space.dim(), space.dim());
    for b in 0..space.dim() {
        let mut e = ComplexVector::zeros(space.dim());
        e[b] = Complex64::from(1.0);
        let state = assemble_unchecked(&op, &k, &e)?;
        transfer.set_column(b, &state.coefficients()[rank]);
    }
    let incoming = reversal_operator(space, op.statistics())? * transfer;
    // S · incoming = I
    solve(&incoming.transpose(), &identity(space.dim()))
        .map(|m| m.transpose())
        .ok_or_else(|| Error::InvalidParameter("in-state map is singular".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{Coupling, NonseparatedBC};
    use crate::yang_ops::Interaction;

    fn delta(c: f64, n: usize, particles: usize, stats: Statistics) -> YOperator {
        YOperator::new(Interaction::Nonseparated(NonseparatedBC::delta(c)), SpinSpace::new(n, particles).unwrap(), stats).unwrap()
    }

    #[test]
    fn words() {
        assert_eq!(canonical_word(2), vec![(1, 0)]);
        assert_eq!(canonical_word(3), vec![(1, 0), (2, 0), (2, 1)]);
        assert_eq!(alternative_word(3).unwrap(), vec![(2, 1), (2, 0), (1, 0)]);
        assert_eq!(canonical_word(4).len(), 6);
        assert!(alternative_word(2).is_err());
    }

    #[test]
    fn free_family_is_trivial() {
        let op = delta(0.0, 2, 3, Statistics::Bose);
        let k = [Complex64::from(-1.0), Complex64::from(0.5), Complex64::from(2.0)];
        assert!((x_op(&op, 1, 0, &k).unwrap() - identity(8)).norm() < 1e-14);
        let s = build_smatrix(&op, &[-1.0, 0.5, 2.0]).unwrap();
        assert!((&s.matrix - identity(8)).norm() < 1e-14);
        assert_eq!(s.element(&[1, 2, 1], &[1, 2, 1]).unwrap(), Complex64::from(1.0));
        assert_eq!(s.element(&[1, 2, 1], &[2, 1, 1]).unwrap(), Complex64::from(0.0));
    }

    #[test]
    fn scalar_delta_two_body_phase() {
        for (stats, sign) in [(Statistics::Bose, 1.0), (Statistics::Fermi, -1.0)] {
            let c = 1.3;
            let op = delta(c, 1, 2, stats);
            let s = build_smatrix(&op, &[-0.4, 0.9]).unwrap();
            assert_eq!(s.word, vec![(1, 0)]);
            // X_21 with Δ = k_2 - k_1
            let diff = 0.9 - -0.4;
            let y = (Complex64::new(0.0, diff) * sign + c) / (Complex64::new(0.0, diff) - c);
            let expected = y * sign;
            assert!((s.element(&[1, 1], &[1, 1]).unwrap() - expected).norm() < 1e-14);
            assert!((expected.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn x_inverse_with_swapped_momenta() {
        let op = delta(0.8, 2, 3, Statistics::Bose);
        let k = [Complex64::from(-1.0), Complex64::from(0.5), Complex64::from(2.0)];
        let swapped = [k[1], k[0], k[2]];
        // X_10 at (k_0, k_1) and X_10 with the momenta exchanged
        let a = x_op(&op, 1, 0, &k).unwrap();
        let b = x_op(&op, 1, 0, &swapped).unwrap();
        assert!((&a * &b - identity(8)).norm() < 1e-12);
        assert!(matches!(x_op(&op, 0, 1, &[k[0], k[0], k[2]]), Err(Error::CoincidentMomenta { .. })));
    }

    #[test]
    fn delta_three_body_unitary_symmetric_order_independent() {
        for stats in [Statistics::Bose, Statistics::Fermi] {
            let op = delta(1.1, 2, 3, stats);
            let m = [-1.0, 0.5, 2.0];
            let s = build_smatrix(&op, &m).unwrap();
            assert!(s.unitarity_residual() < 1e-10);
            assert!(s.symmetry_residual() < 1e-10);
            assert!(order_independence_residual(&op, &m).unwrap() < 1e-10);
        }
    }

    #[test]
    fn consistent_with_bethe_assembly() {
        for stats in [Statistics::Bose, Statistics::Fermi] {
            for particles in [2, 3, 4] {
                let op = delta(0.9, 2, particles, stats);
                let m: Vec<f64> = (0..particles).map(|i| -1.2 + 0.9 * i as f64).collect();
                let s = build_smatrix(&op, &m).unwrap();
                let oracle = bethe_smatrix(&op, &m).unwrap();
                assert!((&s.matrix - &oracle).norm() < 1e-9, "N={particles} {stats:?}");
            }
        }
        let sep = YOperator::new(Interaction::Separated(Coupling::Finite(-0.7)), SpinSpace::new(2, 3).unwrap(), Statistics::Bose).unwrap();
        let m = [-0.5, 0.25, 1.5];
        assert!((build_smatrix(&sep, &m).unwrap().matrix - bethe_smatrix(&sep, &m).unwrap()).norm() < 1e-9);
    }

    #[test]
    fn non_integrable_point_depends_on_word() {
        let bc = NonseparatedBC::from_theta_a_b_c(0.0, 1.0, 0.4, 0.8).unwrap();
        let op = YOperator::new(Interaction::Nonseparated(bc), SpinSpace::new(2, 3).unwrap(), Statistics::Bose).unwrap();
        assert!(order_independence_residual(&op, &[-1.0, 0.5, 2.0]).unwrap() > 1e-6);
    }

    #[test]
    fn momenta_must_ascend() {
        let op = delta(1.0, 2, 3, Statistics::Bose);
        assert!(matches!(build_smatrix(&op, &[0.5, -1.0, 2.0]), Err(Error::NonAscendingMomenta)));
        assert!(matches!(build_smatrix(&op, &[0.5, 0.5, 2.0]), Err(Error::NonAscendingMomenta)));
    }

    #[test]
    fn labels_checked() {
        let s = build_smatrix(&delta(1.0, 2, 2, Statistics::Bose), &[0.0, 1.0]).unwrap();
        assert!(matches!(s.element(&[0, 1], &[1, 1]), Err(Error::LabelOutOfRange { .. })));
        assert!(matches!(s.element(&[3, 1], &[1, 1]), Err(Error::LabelOutOfRange { .. })));
        assert!(s.element(&[1], &[1, 1]).is_err());
        let a = s.element(&[1, 2], &[2, 1]).unwrap();
        let b = s.element(&[2, 1], &[1, 2]).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn cluster_words() {
        let op = delta(0.0, 2, 5, Statistics::Bose);
        let k: Vec<Complex64> = (0..5).map(|i| Complex64::from(i as f64)).collect();
        let c = cluster_smatrix(&op, &[0, 1], &[2, 3, 4], &k).unwrap();
        assert_eq!(c.word, vec![(2, 1), (3, 1), (4, 1), (2, 0), (3, 0), (4, 0)]);
        assert!((c.matrix - identity(32)).norm() < 1e-12);
        let op2 = delta(0.7, 2, 2, Statistics::Bose);
        let single = cluster_smatrix(&op2, &[0], &[1], &[Complex64::from(0.0), Complex64::from(1.0)]).unwrap();
        let s = build_smatrix(&op2, &[0.0, 1.0]).unwrap();
        assert!((single.matrix - s.matrix).norm() < 1e-14);
        assert!(cluster_smatrix(&op2, &[0], &[0], &[Complex64::from(0.0), Complex64::from(1.0)]).is_err());
    }

    #[test]
    fn cluster_string_momenta() {
        let k = cluster_string(3.0, -2.0, 3);
        let total: Complex64 = k.iter().sum();
        assert!((total - Complex64::from(3.0)).norm() < 1e-12);
        let op = delta(-2.0, 1, 5, Statistics::Bose);
        let mut all = cluster_string(0.8, -2.0, 2);
        all.extend(cluster_string(-0.6, -2.0, 3));
        // complex inter-cluster parameters: either finite or a reported pole
        match cluster_smatrix(&op, &[0, 1], &[2, 3, 4], &all) {
            Ok(c) => assert!(c.matrix.iter().all(|z| z.is_finite())),
            Err(e) => assert!(matches!(e, Error::PoleAtParameter { .. })),
        }
    }
}
