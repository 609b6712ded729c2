//! Bethe-ansatz wavefunctions.
//!
//! In the fundamental region `x_0 < x_1 < … < x_{N-1}` the wavefunction is
//! `Σ_α u_α exp(i Σ_m k_{α(m)} x_m)` over arrangements `α` of the momenta.
//! Other regions follow from exchange symmetry: if `σ` sorts the coordinates
//! (`x_{σ(0)} < x_{σ(1)} < …`) then `ψ(x) = sgn(σ)^F Q_σ ψ_F(x∘σ)` with
//! `(Q_σ v)_s = v_{s∘σ}`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boundary::{BoundaryCondition, Coupling, RelationResidual};
use crate::error::{Error, Result};
use crate::tensor::{embed_pair, permutation_sign, ComplexVector, SpinSpace, Statistics, I, ZERO};
use crate::yang_ops::{spectral_parameter, YOperator};

/// All arrangements of `0..n` in lexicographic order.
pub fn arrangements(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    loop {
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
        out.push(current.clone());
    }
}

/// Lexicographic rank of an arrangement.
pub fn arrangement_rank(arr: &[usize]) -> usize {
    let n = arr.len();
    let mut rank = 0;
    let mut fact = (1..n).product::<usize>().max(1);
    for i in 0..n {
        let smaller = arr[i + 1..].iter().filter(|&&x| x < arr[i]).count();
        rank += smaller * fact;
        if n - 1 - i > 0 {
            fact /= n - 1 - i;
        }
    }
    rank
}

/// Which reduced word to build an arrangement along.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Word {
    /// Reverse of a left-to-right bubble sort.
    Bubble,
    /// Reverse of a right-to-left bubble sort.
    ReverseBubble,
}

/// Adjacent-swap positions taking the identity arrangement to `target`;
/// every step creates one new inversion.
pub fn reduced_word(target: &[usize], word: Word) -> Vec<usize> {
    let mut arr = target.to_vec();
    let n = arr.len();
    let mut swaps = Vec::new();
    loop {
        let mut changed = false;
        match word {
            Word::Bubble => {
                for p in 0..n.saturating_sub(1) {
                    if arr[p] > arr[p + 1] {
                        arr.swap(p, p + 1);
                        swaps.push(p);
                        changed = true;
                    }
                }
            }
            Word::ReverseBubble => {
                for p in (0..n.saturating_sub(1)).rev() {
                    if arr[p] > arr[p + 1] {
                        arr.swap(p, p + 1);
                        swaps.push(p);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    swaps.reverse();
    swaps
}

/// Seeded random unit column, the default initial coefficient.
pub fn random_unit_column(dim: usize, seed: u64) -> ComplexVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = ComplexVector::from_fn(dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let norm = v.norm();
    v / Complex64::from(norm)
}

#[derive(Debug, Clone)]
pub struct BetheState {
    op: YOperator,
    momenta: Vec<Complex64>,
    coefficients: Vec<ComplexVector>,
    path_residual: f64,
    worst_arrangement: Vec<usize>,
}

fn build_along(op: &YOperator, momenta: &[Complex64], u: &ComplexVector, target: &[usize], word: Word) -> Result<ComplexVector> {
    let mut arr: Vec<usize> = (0..target.len()).collect();
    let mut u = u.clone();
    for p in reduced_word(target, word) {
        let (a, b) = (arr[p], arr[p + 1]);
        debug_assert!(a < b);
        u = op.apply(spectral_parameter(momenta[a], momenta[b]), p, p + 1, &u)?;
        arr.swap(p, p + 1);
    }
    debug_assert_eq!(arr, target);
    Ok(u)
}

fn relative_gap(a: &ComplexVector, b: &ComplexVector) -> f64 {
    (a - b).norm() / a.norm().max(1.0)
}

/// Builds all `N!` coefficients along bubble-sort words and compares each with
/// the reverse-bubble word. `DivergentPath` when they disagree beyond `tol`.
pub fn assemble(op: &YOperator, momenta: &[Complex64], u_identity: &ComplexVector, tol: f64) -> Result<BetheState> {
    let state = assemble_unchecked(op, momenta, u_identity)?;
    if state.path_residual > tol {
        return Err(Error::DivergentPath {
            arrangement: state.worst_arrangement.clone(),
            residual: state.path_residual,
        });
    }
    Ok(state)
}

/// Like [`assemble`] but records the path residual instead of failing on it.
pub fn assemble_unchecked(op: &YOperator, momenta: &[Complex64], u_identity: &ComplexVector) -> Result<BetheState> {
    let space = op.space();
    if momenta.len() != space.particles {
        return Err(Error::DimensionMismatch {
            expected: format!("{} momenta", space.particles),
            found: format!("{}", momenta.len()),
        });
    }
    if u_identity.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("initial column of length {}", space.dim()),
            found: format!("{}", u_identity.len()),
        });
    }
    for i in 0..momenta.len() {
        for j in (i + 1)..momenta.len() {
            if (momenta[i] - momenta[j]).norm() < 1e-12 {
                return Err(Error::CoincidentMomenta { i, j });
            }
        }
    }
    let mut coefficients = Vec::new();
    let mut path_residual = 0.0f64;
    let mut worst_arrangement = (0..space.particles).collect();
    for arr in arrangements(space.particles) {
        let first = build_along(op, momenta, u_identity, &arr, Word::Bubble)?;
        let second = build_along(op, momenta, u_identity, &arr, Word::ReverseBubble)?;
        let gap = relative_gap(&first, &second);
        if gap > path_residual {
            path_residual = gap;
            worst_arrangement = arr.clone();
        }
        coefficients.push(first);
    }
    Ok(BetheState {
        op: op.clone(),
        momenta: momenta.to_vec(),
        coefficients,
        path_residual,
        worst_arrangement,
    })
}

impl BetheState {
    pub fn space(&self) -> SpinSpace {
        self.op.space()
    }

    pub fn statistics(&self) -> Statistics {
        self.op.statistics()
    }

    pub fn operator(&self) -> &YOperator {
        &self.op
    }

    pub fn momenta(&self) -> &[Complex64] {
        &self.momenta
    }

    /// Largest relative disagreement between the two reduced words.
    pub fn path_residual(&self) -> f64 {
        self.path_residual
    }

    pub fn coefficient(&self, arrangement: &[usize]) -> &ComplexVector {
        &self.coefficients[arrangement_rank(arrangement)]
    }

    /// Coefficients in lexicographic arrangement order.
    pub fn coefficients(&self) -> &[ComplexVector] {
        &self.coefficients
    }

    pub fn energy(&self) -> Complex64 {
        energy(&self.momenta)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<ComplexVector> {
        evaluate(self, x)
    }
}

/// `E = Σ k_i²`.
pub fn energy(momenta: &[Complex64]) -> Complex64 {
    momenta.iter().map(|k| k * k).sum()
}

/// A wavefunction given analytically in each coordinate-ordering region.
pub trait RegionExpansion {
    fn space(&self) -> SpinSpace;

    /// Value and all first partial derivatives of the expansion valid where the
    /// particles are ordered as `order` (`order[m]` is the particle at sorted
    /// position `m`). Evaluating it on a region's boundary gives the one-sided
    /// limit from inside that region.
    fn region_jet(&self, order: &[usize], x: &[f64]) -> (ComplexVector, Vec<ComplexVector>);
}

/// `Q_σ v` with `(Q_σ v)_s = v_{s∘σ}`.
fn permute_spins(space: SpinSpace, sigma: &[usize], v: &ComplexVector) -> ComplexVector {
    let mut src = vec![0; space.particles];
    ComplexVector::from_fn(space.dim(), |s, _| {
        let digits = space.digits(s);
        for (m, slot) in src.iter_mut().enumerate() {
            *slot = digits[sigma[m]];
        }
        v[space.flat(&src)]
    })
}

impl RegionExpansion for BetheState {
    fn space(&self) -> SpinSpace {
        self.op.space()
    }

    fn region_jet(&self, order: &[usize], x: &[f64]) -> (ComplexVector, Vec<ComplexVector>) {
        let space = self.space();
        let n = space.particles;
        let dim = space.dim();
        let mut value = ComplexVector::zeros(dim);
        let mut grads = vec![ComplexVector::zeros(dim); n];
        for (arr, u) in arrangements(n).iter().zip(&self.coefficients) {
            let exponent: Complex64 = (0..n).map(|m| self.momenta[arr[m]] * x[order[m]]).sum();
            let term = u * (I * exponent).exp();
            for m in 0..n {
                grads[order[m]] += &term * (I * self.momenta[arr[m]]);
            }
            value += term;
        }
        let sign = match self.statistics() {
            Statistics::Bose => 1.0,
            Statistics::Fermi => permutation_sign(order),
        };
        let sign = Complex64::from(sign);
        let value = permute_spins(space, order, &value) * sign;
        let grads = grads.iter().map(|g| permute_spins(space, order, g) * sign).collect();
        (value, grads)
    }
}

/// Sorting permutation; errors on exactly coincident coordinates.
pub fn sorting_order(x: &[f64]) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    for w in order.windows(2) {
        if x[w[0]] == x[w[1]] {
            let (i, j) = (w[0].min(w[1]), w[0].max(w[1]));
            return Err(Error::CoincidentCoordinates { i, j });
        }
    }
    Ok(order)
}

pub fn evaluate<W: RegionExpansion + ?Sized>(wf: &W, x: &[f64]) -> Result<ComplexVector> {
    check_coordinates(wf.space(), x)?;
    let order = sorting_order(x)?;
    Ok(wf.region_jet(&order, x).0)
}

fn check_coordinates(space: SpinSpace, x: &[f64]) -> Result<()> {
    if x.len() != space.particles {
        return Err(Error::DimensionMismatch {
            expected: format!("{} coordinates", space.particles),
            found: format!("{}", x.len()),
        });
    }
    Ok(())
}

/// Side of the plane `x_i = x_j`: `Plus` is `x_j > x_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// One-sided limit of `ψ` and of `∂ψ/∂r`, `r = x_j - x_i` at fixed centre of
/// mass, at a point with `x_i = x_j`.
pub fn one_sided<W: RegionExpansion + ?Sized>(
    wf: &W,
    x: &[f64],
    i: usize,
    j: usize,
    side: Side,
) -> Result<(ComplexVector, ComplexVector)> {
    check_coordinates(wf.space(), x)?;
    let mut order: Vec<usize> = (0..x.len()).collect();
    // sort by coordinate; the tie between i and j is broken by the side
    order.sort_by(|&a, &b| {
        x[a].total_cmp(&x[b]).then_with(|| {
            let rank = |p: usize| match (side, p) {
                (Side::Plus, p) if p == i => 0,
                (Side::Plus, p) if p == j => 1,
                (Side::Minus, p) if p == j => 0,
                (Side::Minus, p) if p == i => 1,
                _ => 2,
            };
            rank(a).cmp(&rank(b)).then(a.cmp(&b))
        })
    });
    for w in order.windows(2) {
        let pair = (w[0].min(w[1]), w[0].max(w[1]));
        if x[w[0]] == x[w[1]] && pair != (i.min(j), i.max(j)) {
            return Err(Error::CoincidentCoordinates { i: pair.0, j: pair.1 });
        }
    }
    let (value, grads) = wf.region_jet(&order, x);
    let deriv = (&grads[j] - &grads[i]) * Complex64::from(0.5);
    Ok((value, deriv))
}

/// Probe points on the plane `x_i = x_j` with `i` and `j` neighbours in the
/// coordinate ordering and all other particles at distinct positions.
pub fn hyperplane_probes(particles: usize, i: usize, j: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // fundamental order with j moved right after i
    let mut order: Vec<usize> = (0..particles).filter(|&p| p != j).collect();
    let at = order.iter().position(|&p| p == i).unwrap();
    order.insert(at + 1, j);
    (0..count)
        .map(|_| {
            let slots = particles - 1;
            let mut pos = Vec::with_capacity(slots);
            let mut cur = rng.gen_range(-2.0..-1.0);
            for _ in 0..slots {
                pos.push(cur);
                cur += rng.gen_range(0.3..1.0);
            }
            let mut x = vec![0.0; particles];
            let mut slot = 0;
            for (m, &p) in order.iter().enumerate() {
                if m > 0 && order[m - 1] == i && p == j {
                    x[p] = pos[slot - 1];
                } else {
                    x[p] = pos[slot];
                    slot += 1;
                }
            }
            x
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryResidualReport {
    pub pair: (usize, usize),
    pub boundary: String,
    pub probes: usize,
    pub relations: Vec<RelationResidual>,
    pub max_residual: f64,
}

/// Defect of the boundary condition across `x_i = x_j` at each probe point.
pub fn boundary_residual<W: RegionExpansion + ?Sized>(
    wf: &W,
    i: usize,
    j: usize,
    bc: &BoundaryCondition,
    probes: &[Vec<f64>],
) -> Result<BoundaryResidualReport> {
    let space = wf.space();
    let names: Vec<&str> = match bc {
        BoundaryCondition::Nonseparated(_) | BoundaryCondition::Matrix(_) => vec!["value", "derivative"],
        BoundaryCondition::SpinDelta(_) => vec!["continuity", "jump"],
        BoundaryCondition::Separated(_) | BoundaryCondition::SeparatedSpin(_) => vec!["plus side", "minus side"],
    };
    let embed = |m| embed_pair(m, space, i, j);
    let embedded = match bc {
        BoundaryCondition::Matrix(m) => Some([embed(&m.a)?, embed(&m.b)?, embed(&m.c)?, embed(&m.d)?]),
        BoundaryCondition::SpinDelta(s) => Some([embed(&s.h)?, embed(&s.h)?, embed(&s.h)?, embed(&s.h)?]),
        BoundaryCondition::SeparatedSpin(s) => Some([embed(&s.g)?, embed(&s.g)?, embed(&s.g)?, embed(&s.g)?]),
        _ => None,
    };
    let mut maxima = [0.0f64; 2];
    for x in probes {
        if x[i] != x[j] {
            return Err(Error::InvalidParameter(format!("probe {x:?} is not on the plane x_{i} = x_{j}")));
        }
        let (vp, dp) = one_sided(wf, x, i, j, Side::Plus)?;
        let (vm, dm) = one_sided(wf, x, i, j, Side::Minus)?;
        let defects = match bc {
            BoundaryCondition::Nonseparated(s) => {
                let ph = s.phase();
                [
                    (&vp - (&vm * Complex64::from(s.a) + &dm * Complex64::from(s.b)) * ph).norm(),
                    (&dp - (&vm * Complex64::from(s.c) + &dm * Complex64::from(s.d)) * ph).norm(),
                ]
            }
            BoundaryCondition::Matrix(_) => {
                let [a, b, c, d] = embedded.as_ref().unwrap();
                [(&vp - (a * &vm + b * &dm)).norm(), (&dp - (c * &vm + d * &dm)).norm()]
            }
            BoundaryCondition::SpinDelta(_) => {
                let h = &embedded.as_ref().unwrap()[0];
                [(&vp - &vm).norm(), (&dp - &dm - h * &vm).norm()]
            }
            BoundaryCondition::SeparatedSpin(_) => {
                let g = &embedded.as_ref().unwrap()[0];
                [(&dp - g * &vp).norm(), (&dm + g * &vm).norm()]
            }
            BoundaryCondition::Separated(s) => {
                let side = |q: Coupling, v: &ComplexVector, d: &ComplexVector| match q {
                    Coupling::Finite(q) => (d - v * Complex64::from(q)).norm(),
                    Coupling::Infinite => v.norm(),
                };
                [side(s.q_plus, &vp, &dp), side(s.q_minus, &vm, &dm)]
            }
        };
        for (m, d) in maxima.iter_mut().zip(defects) {
            *m = m.max(d);
        }
    }
    let relations: Vec<RelationResidual> = names
        .iter()
        .zip(maxima)
        .map(|(n, r)| RelationResidual { relation: n.to_string(), residual: r })
        .collect();
    Ok(BoundaryResidualReport {
        pair: (i, j),
        boundary: bc.name().into(),
        probes: probes.len(),
        max_residual: maxima[0].max(maxima[1]),
        relations,
    })
}

/// Relative residual of `-Δψ = Eψ` by second-order central differences.
pub fn eigen_residual<W: RegionExpansion + ?Sized>(wf: &W, x: &[f64], energy: Complex64, step: f64) -> Result<f64> {
    let psi = evaluate(wf, x)?;
    let mut lap = ComplexVector::zeros(psi.len());
    let mut xp = x.to_vec();
    for p in 0..x.len() {
        xp[p] = x[p] + step;
        let fwd = evaluate(wf, &xp)?;
        xp[p] = x[p] - step;
        let bwd = evaluate(wf, &xp)?;
        xp[p] = x[p];
        lap += (fwd + bwd - &psi * Complex64::from(2.0)) / Complex64::from(step * step);
    }
    let defect = (-lap - &psi * energy).norm();
    Ok(defect / (psi.norm() * energy.norm().max(1.0)).max(f64::MIN_POSITIVE))
}

/// Generic interior points with every pair separated by at least `gap`.
pub fn interior_points(particles: usize, count: usize, gap: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let x: Vec<f64> = (0..particles).map(|_| rng.gen_range(-2.5..2.5)).collect();
            let ok = (0..particles).all(|a| (a + 1..particles).all(|b| (x[a] - x[b]).abs() > gap));
            if ok {
                break x;
            }
        })
        .collect()
}

/// `U = Π_{i>j} sgn(x_i - x_j)`.
pub fn kink_gauge_sign(x: &[f64]) -> Result<f64> {
    let order = sorting_order(x)?;
    Ok(kink_sign_for_order(&order))
}

fn kink_sign_for_order(order: &[usize]) -> f64 {
    // particle a sits after particle b in `order` ⇔ x_a > x_b
    let mut position = vec![0; order.len()];
    for (m, &p) in order.iter().enumerate() {
        position[p] = m;
    }
    let mut sign = 1.0;
    for a in 0..order.len() {
        for b in 0..a {
            if position[a] < position[b] {
                sign = -sign;
            }
        }
    }
    sign
}

pub fn kink_gauge_transform(value: &ComplexVector, x: &[f64]) -> Result<ComplexVector> {
    Ok(value * Complex64::from(kink_gauge_sign(x)?))
}

/// `U ψ` as a wavefunction in its own right.
pub struct KinkGauged<'a, W: ?Sized>(pub &'a W);

impl<W: RegionExpansion + ?Sized> RegionExpansion for KinkGauged<'_, W> {
    fn space(&self) -> SpinSpace {
        self.0.space()
    }

    fn region_jet(&self, order: &[usize], x: &[f64]) -> (ComplexVector, Vec<ComplexVector>) {
        let (v, g) = self.0.region_jet(order, x);
        let s = Complex64::from(kink_sign_for_order(order));
        (v * s, g.into_iter().map(|d| d * s).collect())
    }
}

/// Independent term-by-term evaluation, kept for cross-checks.
pub fn evaluate_by_terms(state: &BetheState, x: &[f64]) -> Result<ComplexVector> {
    let order = sorting_order(x)?;
    let space = state.space();
    let n = space.particles;
    let mut sorted = ComplexVector::zeros(space.dim());
    for arr in arrangements(n) {
        let mut phase = ZERO;
        for m in 0..n {
            phase += state.momenta[arr[m]] * x[order[m]];
        }
        sorted += state.coefficient(&arr) * (I * phase).exp();
    }
    let q = crate::tensor::spin_permutation(space, &order)?;
    let sign = match state.statistics() {
        Statistics::Bose => 1.0,
        Statistics::Fermi => permutation_sign(&order),
    };
    Ok(q * sorted * Complex64::from(sign))
}
