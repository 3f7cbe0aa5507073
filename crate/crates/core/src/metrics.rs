//! Worst-case error machinery: closed-form diamond distances for Pauli and
//! unitary channels, a numerical lower-bound search for everything else,
//! fidelity-to-worst-case bounds and the evaluators for the gate-dependent
//! noise bounds.
//!
//! Throughout, `ε(E) = ½ sup_ψ ‖((E - I) ⊗ I)(ψ)‖₁` is the diamond distance
//! to the identity and `‖·‖⋄` the (unhalved) diamond norm.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channels::{unitarity_defect, PauliChannel, PauliString, Ptm};
use crate::{Error, Result};

const DIST_TOL: f64 = 1e-9;

/// Exact `ε = 1 - c_I` for a Pauli channel.
pub fn diamond_pauli(pc: &PauliChannel) -> f64 {
    1.0 - pc.prob(0)
}

/// Exact `ε` of the unitary channel `ρ ↦ UρU†` against the identity:
/// `√(1 - ν²)` where `ν` is the distance from the origin to the convex hull
/// of the eigenvalues of `U`.
pub fn diamond_unitary(u: &DMatrix<Complex64>) -> Result<f64> {
    if !u.is_square() || u.nrows() > 8 || u.nrows() == 0 {
        return Err(Error::DimensionMismatch(format!("unitary is {}x{}, need square with dim <= 8", u.nrows(), u.ncols())));
    }
    let defect = unitarity_defect(u);
    if defect > DIST_TOL {
        return Err(Error::NotUnitary(defect));
    }
    let eig = u
        .clone()
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::DimensionMismatch("schur decomposition failed".into()))?;
    let mut angles: Vec<f64> = eig.iter().map(|z| z.arg()).collect();
    angles.sort_by(f64::total_cmp);
    let two_pi = 2.0 * std::f64::consts::PI;
    // smallest arc containing every eigenvalue = 2π minus the largest gap
    let mut largest_gap = angles[0] + two_pi - angles[angles.len() - 1];
    for w in angles.windows(2) {
        largest_gap = largest_gap.max(w[1] - w[0]);
    }
    let spread = two_pi - largest_gap;
    if spread >= std::f64::consts::PI {
        Ok(1.0)
    } else {
        Ok((spread / 2.0).sin())
    }
}

/// Tuning for [`diamond_lower_search`].
#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub restarts: usize,
    /// Coordinate steps per restart.
    pub iters: usize,
    pub initial_step: f64,
    /// A restart counts as converged once every coordinate step has shrunk
    /// below this.
    pub step_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { restarts: 50, iters: 500, initial_step: 0.5, step_tol: 1e-4 }
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    /// Best `½‖((A - B) ⊗ I)(ψ)‖₁` found; a certified lower bound.
    pub value: f64,
    pub converged: bool,
    /// Input state on system ⊗ ancilla, system index most significant.
    pub state: DVector<Complex64>,
}

/// Superoperator of a PTM difference acting on vectorized operators.
struct DiffMap {
    d: usize,
    // column-major vec(E(X)) = s · vec(X)
    s: DMatrix<Complex64>,
}

impl DiffMap {
    fn new(a: &Ptm, b: &Ptm) -> Result<Self> {
        if a.qubits() != b.qubits() {
            return Err(Error::DimensionMismatch(format!("{} vs {} qubits", a.qubits(), b.qubits())));
        }
        let n = a.qubits();
        let d = 1usize << n;
        let count = d * d;
        let diff = a.matrix() - b.matrix();
        let basis: Vec<DMatrix<Complex64>> = (0..count)
            .map(|i| PauliString::from_index(n, i).dense(n) / Complex64::new((d as f64).sqrt(), 0.0))
            .collect();
        let mut s = DMatrix::zeros(count, count);
        for (p, bp) in basis.iter().enumerate() {
            for (q, bq) in basis.iter().enumerate() {
                let w = diff[(p, q)];
                if w == 0.0 {
                    continue;
                }
                // |vec P⟩⟨vec Q|, with ⟨vec Q|vec X⟩ = Tr(Q† X)
                for (i, vp) in bp.iter().enumerate() {
                    if vp.norm() == 0.0 {
                        continue;
                    }
                    for (j, vq) in bq.iter().enumerate() {
                        s[(i, j)] += *vp * vq.conj() * w;
                    }
                }
            }
        }
        Ok(Self { d, s })
    }

    /// `½‖((A - B) ⊗ I)(ψψ†)‖₁`.
    fn objective(&self, psi: &DVector<Complex64>) -> f64 {
        let d = self.d;
        let mut out = DMatrix::<Complex64>::zeros(d * d, d * d);
        let mut block = DVector::<Complex64>::zeros(d * d);
        for j in 0..d {
            for l in 0..d {
                // vec(Ψ_{:,j} Ψ_{:,l}†), column-major
                for col in 0..d {
                    let right = psi[col * d + l].conj();
                    for row in 0..d {
                        block[col * d + row] = psi[row * d + j] * right;
                    }
                }
                let img = &self.s * &block;
                for col in 0..d {
                    for row in 0..d {
                        out[(row * d + j, col * d + l)] = img[col * d + row];
                    }
                }
            }
        }
        let herm = (&out + out.adjoint()) * Complex64::new(0.5, 0.0);
        0.5 * herm.symmetric_eigenvalues().iter().map(|v| v.abs()).sum::<f64>()
    }
}

fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<Complex64> {
    let mut v = DVector::from_fn(dim, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let norm = v.norm();
    v /= Complex64::new(norm, 0.0);
    v
}

fn perturbed(psi: &DVector<Complex64>, coord: usize, step: f64) -> DVector<Complex64> {
    let mut v = psi.clone();
    let kick = if coord.is_multiple_of(2) { Complex64::new(step, 0.0) } else { Complex64::new(0.0, step) };
    v[coord / 2] += kick;
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

fn ascend(map: &DiffMap, cfg: &SearchConfig, seed: u64) -> SearchResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = map.d * map.d;
    let coords = 2 * dim;
    let mut psi = random_state(dim, &mut rng);
    let mut best = map.objective(&psi);
    let mut steps = vec![cfg.initial_step; coords];
    for it in 0..cfg.iters {
        let c = it % coords;
        let mut improved = false;
        for sign in [1.0, -1.0] {
            let cand = perturbed(&psi, c, sign * steps[c]);
            let val = map.objective(&cand);
            if val > best {
                psi = cand;
                best = val;
                improved = true;
                break;
            }
        }
        steps[c] = if improved { (steps[c] * 1.5).min(1.0) } else { steps[c] * 0.5 };
    }
    let converged = steps.iter().all(|&s| s < cfg.step_tol);
    SearchResult { value: best, converged, state: psi }
}

/// Lower bound on `½‖A - B‖⋄` by random-restart coordinate ascent over pure
/// states on the system plus an equal-sized ancilla. Restarts run in
/// parallel with seeds drawn up front from `rng`.
pub fn diamond_distance_lower<R: Rng + ?Sized>(a: &Ptm, b: &Ptm, cfg: &SearchConfig, rng: &mut R) -> Result<SearchResult> {
    if a.qubits() > 2 {
        return Err(Error::WidthOverflow { n: a.qubits(), max: 2 });
    }
    let map = DiffMap::new(a, b)?;
    let seeds: Vec<u64> = (0..cfg.restarts.max(1)).map(|_| rng.random()).collect();
    let results: Vec<SearchResult> = seeds.par_iter().map(|&s| ascend(&map, cfg, s)).collect();
    Ok(results
        .into_iter()
        .reduce(|x, y| if y.value > x.value { y } else { x })
        .expect("at least one restart"))
}

/// Lower bound on `ε(E)`.
pub fn diamond_lower_search<R: Rng + ?Sized>(e: &Ptm, cfg: &SearchConfig, rng: &mut R) -> Result<SearchResult> {
    diamond_distance_lower(e, &Ptm::identity(e.qubits()), cfg, rng)
}

/// Infidelity-to-worst-case bounds `r(d+1)/d ≤ ε ≤ √(r d (d+1))`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub r: f64,
    pub lower: f64,
    pub upper: f64,
    pub d: usize,
}

pub fn eq3_bounds(r: f64, d: usize) -> Result<BoundReport> {
    if !(0.0..=1.0).contains(&r) || d < 2 {
        return Err(Error::OutOfRange(format!("need r in [0,1] and d >= 2, got r={r}, d={d}")));
    }
    let df = d as f64;
    Ok(BoundReport { r, lower: r * (df + 1.0) / df, upper: (r * df * (df + 1.0)).sqrt(), d })
}

fn check_rate(r: f64) -> Result<()> {
    if (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("rate {r} outside [0, 1]")))
    }
}

/// `Σ_j 4√(6 r_j)` for local noise with per-qubit averaged infidelities `r_j`.
pub fn thm3_local_bound(rates: &[f64]) -> Result<f64> {
    rates.iter().try_fold(0.0, |acc, &r| {
        check_rate(r)?;
        Ok(acc + 4.0 * (6.0 * r).sqrt())
    })
}

/// Arbitrary-noise form `2ε(E^T) + 2√(E[ε²])`, from the averaged channel's
/// `ε` and the per-dressed-gate `ε` values.
pub fn thm3_arbitrary_bound(eps_average: f64, eps_each: &[f64]) -> Result<f64> {
    if eps_each.is_empty() {
        return Err(Error::OutOfRange("no per-gate errors supplied".into()));
    }
    check_rate(eps_average)?;
    for &e in eps_each {
        check_rate(e)?;
    }
    let mean_sq = eps_each.iter().map(|e| e * e).sum::<f64>() / eps_each.len() as f64;
    Ok(2.0 * eps_average + 2.0 * mean_sq.sqrt())
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Thm2Bound {
    /// `δ_1 + Σ_{k≥2} 2 δ_k ε_{k-1}`, valid when the twirling group is
    /// normalized by the easy gates.
    pub normalized: f64,
    /// `Σ_k δ_k`.
    pub general: f64,
}

/// Bounds on `‖C_GD - C_GI‖⋄` from `δ_k = E‖E(C̃_k) - E_k^T‖⋄` and
/// `ε_k = ε[E(G_k) E_k^T]`. `eps` holds `ε_1 … ε_{K-1}` (a trailing `ε_K`
/// is accepted and ignored).
pub fn thm2_bound(deltas: &[f64], eps: &[f64]) -> Result<Thm2Bound> {
    let k = deltas.len();
    if k == 0 || !(eps.len() == k || eps.len() + 1 == k) {
        return Err(Error::DimensionMismatch(format!("{k} deltas with {} epsilons", eps.len())));
    }
    if deltas.iter().chain(eps).any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::OutOfRange("bound inputs must be finite and nonnegative".into()));
    }
    let normalized = deltas[0] + (1..k).map(|i| 2.0 * deltas[i] * eps[i - 1]).sum::<f64>();
    Ok(Thm2Bound { normalized, general: deltas.iter().sum() })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Fig2Curve {
    /// `√(20 r)`: worst case for arbitrary two-qubit noise of infidelity `r`.
    Untailored,
    /// `(5/4) r`: tailored noise with gate-independent easy noise.
    TailoredGateIndependent,
    /// `(5/4) r + 2 [Σ_j 4√(6 r_j)] √(20 r)`.
    TailoredGateDependent,
}

/// Upper bound on the worst-case error of a two-qubit hard gate in the bulk
/// of a circuit. The gate-dependent curve charges the local easy-gate bound
/// against the preceding cycle's worst case, taken at its fidelity upper
/// bound `√(20 r)`.
pub fn fig2_upper_bound(r_hard: f64, r_easy: &[f64], curve: Fig2Curve) -> Result<f64> {
    check_rate(r_hard)?;
    let b = eq3_bounds(r_hard, 4)?;
    Ok(match curve {
        Fig2Curve::Untailored => b.upper,
        Fig2Curve::TailoredGateIndependent => b.lower,
        Fig2Curve::TailoredGateDependent => b.lower + 2.0 * thm3_local_bound(r_easy)? * b.upper,
    })
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if let Some(v) = p.iter().find(|v| !v.is_finite() || **v < -DIST_TOL) {
        return Err(Error::InvalidDistribution(format!("entry {v}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > DIST_TOL {
        return Err(Error::InvalidDistribution(format!("sums to {total}")));
    }
    Ok(())
}

/// `½ Σ_j |p_j - q_j|`.
pub fn variational_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::InvalidDistribution(format!("lengths {} and {}", p.len(), q.len())));
    }
    check_distribution(p)?;
    check_distribution(q)?;
    Ok((0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()).min(1.0))
}

/// Largest entry of `A_{K:1} - B_{K:1} - Σ_k A_{K:k+1}(A_k - B_k)B_{k-1:1}`,
/// where `X_{j:i} = X_j ⋯ X_i`.
pub fn telescoping_residual(a: &[Ptm], b: &[Ptm]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::DimensionMismatch(format!("sequences of length {} and {}", a.len(), b.len())));
    }
    let dim = a[0].matrix().nrows();
    if a.iter().chain(b).any(|m| m.matrix().nrows() != dim) {
        return Err(Error::DimensionMismatch("channels of different widths".into()));
    }
    let k = a.len();
    let id = DMatrix::<f64>::identity(dim, dim);
    // suffix[i] = A_K ⋯ A_{i+1} (0-based: product of a[i..])
    let mut suffix = vec![id.clone(); k + 1];
    for i in (0..k).rev() {
        suffix[i] = &suffix[i + 1] * a[i].matrix();
    }
    let mut prefix_b = id.clone();
    let mut rhs = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..k {
        rhs += &suffix[i + 1] * (a[i].matrix() - b[i].matrix()) * &prefix_b;
        prefix_b = b[i].matrix() * prefix_b;
    }
    let lhs = &suffix[0] - &prefix_b;
    Ok((lhs - rhs).amax())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{infidelity, pauli_twirl, random_unitary};
    use rand::SeedableRng;

    fn rotation(theta: f64) -> DMatrix<Complex64> {
        let mut m = DMatrix::identity(2, 2);
        m[(1, 1)] = Complex64::from_polar(1.0, theta);
        m
    }

    #[test]
    fn pauli_examples() {
        assert_eq!(diamond_pauli(&PauliChannel::identity(1)), 0.0);
        let pc = PauliChannel::new(1, vec![0.99, 0.01, 0.0, 0.0]).unwrap();
        assert!((diamond_pauli(&pc) - 0.01).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let found = diamond_lower_search(&pc.to_ptm(), &SearchConfig::default(), &mut rng).unwrap();
        assert!((found.value - 0.01).abs() < 1e-6, "{}", found.value);
        let uniform = PauliChannel::new(1, vec![0.25; 4]).unwrap();
        assert!((diamond_pauli(&uniform) - 0.75).abs() < 1e-15);
        let found = diamond_lower_search(&uniform.to_ptm(), &SearchConfig::default(), &mut rng).unwrap();
        assert!((found.value - 0.75).abs() < 1e-6, "{}", found.value);
    }

    #[test]
    fn unitary_examples() {
        assert!(diamond_unitary(&DMatrix::identity(2, 2)).unwrap().abs() < 1e-15);
        let eps = diamond_unitary(&rotation(0.1)).unwrap();
        assert!((eps - 0.05f64.sin()).abs() < 1e-12);
        assert!((eps - 0.0499792).abs() < 1e-7);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let found = diamond_lower_search(&Ptm::from_unitary(&rotation(0.1)).unwrap(), &SearchConfig::default(), &mut rng).unwrap();
        assert!((found.value - eps).abs() < 1e-4, "{}", found.value);
        // a large rotation reaches the boundary of distinguishability
        assert!((diamond_unitary(&rotation(std::f64::consts::PI)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unitary_is_phase_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(4, &mut rng);
        let e1 = diamond_unitary(&u).unwrap();
        let e2 = diamond_unitary(&(u * Complex64::from_polar(1.0, 2.9))).unwrap();
        assert!((e1 - e2).abs() < 1e-10);
    }

    #[test]
    fn unitary_rejects_non_unitary() {
        let m = DMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        assert!(matches!(diamond_unitary(&m), Err(Error::NotUnitary(_))));
        assert!(diamond_unitary(&DMatrix::identity(16, 16)).is_err());
    }

    #[test]
    fn search_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let id = diamond_lower_search(&Ptm::identity(1), &SearchConfig::default(), &mut rng).unwrap();
        assert!(id.value.abs() < 1e-9);
        let pc = PauliChannel::new(1, vec![0.9, 0.0, 0.0, 0.1]).unwrap();
        let found = diamond_lower_search(&pc.to_ptm(), &SearchConfig::default(), &mut rng).unwrap();
        assert!((found.value - 0.1).abs() < 1e-4);
        let found = diamond_lower_search(&Ptm::from_unitary(&rotation(0.2)).unwrap(), &SearchConfig::default(), &mut rng).unwrap();
        assert!((found.value - 0.1f64.sin()).abs() < 1e-4, "{}", found.value);
        assert!(found.converged);
    }

    #[test]
    fn search_never_exceeds_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cfg = SearchConfig { restarts: 8, iters: 400, ..SearchConfig::default() };
        for n in [1, 2] {
            for _ in 0..4 {
                let u = random_unitary(1 << n, &mut rng);
                let exact = diamond_unitary(&u).unwrap();
                let found = diamond_lower_search(&Ptm::from_unitary(&u).unwrap(), &cfg, &mut rng).unwrap();
                assert!(found.value <= exact + 1e-9, "{} > {exact}", found.value);
                let pc = PauliChannel::random(n, 10.0, &mut rng);
                let found = diamond_lower_search(&pc.to_ptm(), &cfg, &mut rng).unwrap();
                assert!(found.value <= diamond_pauli(&pc) + 1e-9);
            }
        }
    }

    #[test]
    fn fidelity_bound_examples() {
        let b = eq3_bounds(0.0, 2).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));
        let b = eq3_bounds(1e-4, 2).unwrap();
        assert!((b.lower - 1.5e-4).abs() < 1e-18);
        assert!((b.upper - 2.4495e-2).abs() < 1e-6);
        let b = eq3_bounds(1e-3, 4).unwrap();
        assert!((b.lower - 1.25e-3).abs() < 1e-18);
        assert!((b.upper - 0.14142).abs() < 1e-5);
        assert!(eq3_bounds(1.5, 2).is_err());
        assert!(eq3_bounds(0.1, 1).is_err());
    }

    #[test]
    fn pauli_channels_saturate_lower_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in [1, 2] {
            for _ in 0..50 {
                let pc = PauliChannel::random(n, 5.0, &mut rng);
                let r = infidelity(&pc.to_ptm());
                let b = eq3_bounds(r, 1 << n).unwrap();
                assert!((diamond_pauli(&pc) - b.lower).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn local_bound_examples() {
        assert_eq!(thm3_local_bound(&[0.0, 0.0]).unwrap(), 0.0);
        assert!((thm3_local_bound(&[1e-5, 1e-5]).unwrap() - 0.061968).abs() < 1e-6);
        assert!((thm3_local_bound(&[1e-4]).unwrap() - 0.09798).abs() < 1e-5);
        assert!(thm3_local_bound(&[-1e-3]).is_err());
        let b = thm3_arbitrary_bound(0.01, &[0.03, 0.04]).unwrap();
        assert!((b - (0.02 + 2.0 * (0.00125f64).sqrt())).abs() < 1e-15);
    }

    #[test]
    fn gate_dependent_bound_examples() {
        assert_eq!(thm2_bound(&[0.0, 0.0], &[0.0]).unwrap(), Thm2Bound { normalized: 0.0, general: 0.0 });
        let b = thm2_bound(&[1e-3, 1e-3], &[1e-2]).unwrap();
        assert!((b.normalized - 1.02e-3).abs() < 1e-15);
        let b = thm2_bound(&[1e-3; 3], &[0.1, 0.1, 0.1]).unwrap();
        assert!((b.general - 3e-3).abs() < 1e-15);
        assert!(thm2_bound(&[1e-3; 3], &[0.1]).is_err());
        assert!(thm2_bound(&[], &[]).is_err());
    }

    #[test]
    fn worst_case_curve_examples() {
        for c in [Fig2Curve::Untailored, Fig2Curve::TailoredGateIndependent, Fig2Curve::TailoredGateDependent] {
            assert_eq!(fig2_upper_bound(0.0, &[0.0, 0.0], c).unwrap(), 0.0);
        }
        assert!((fig2_upper_bound(1e-4, &[], Fig2Curve::Untailored).unwrap() - 0.04472).abs() < 1e-5);
        assert!((fig2_upper_bound(1e-4, &[], Fig2Curve::TailoredGateIndependent).unwrap() - 1.25e-4).abs() < 1e-18);
        assert!(fig2_upper_bound(2.0, &[], Fig2Curve::Untailored).is_err());
    }

    #[test]
    fn variational_examples() {
        assert_eq!(variational_distance(&[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
        assert_eq!(variational_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert!((variational_distance(&[0.75, 0.25], &[0.5, 0.5]).unwrap() - 0.25).abs() < 1e-15);
        assert!(variational_distance(&[0.5, 0.6], &[0.5, 0.5]).is_err());
        assert!(variational_distance(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn telescoping() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mk = |rng: &mut ChaCha8Rng| Ptm::from_unitary(&random_unitary(2, rng)).unwrap();
        let a: Vec<Ptm> = (0..4).map(|_| mk(&mut rng)).collect();
        assert!(telescoping_residual(&a, &a).unwrap() < 1e-15);
        let b: Vec<Ptm> = (0..4).map(|_| mk(&mut rng)).collect();
        assert!(telescoping_residual(&a, &b).unwrap() < 1e-12);
        assert!(telescoping_residual(&a[..1], &b[..1]).unwrap() < 1e-15);
        assert!(telescoping_residual(&a[..2], &b[..1]).is_err());
    }

    #[test]
    fn twirl_then_bounds_are_ordered() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = random_unitary(2, &mut rng);
        let pc = pauli_twirl(&Ptm::from_unitary(&u).unwrap()).unwrap();
        let r = infidelity(&pc.to_ptm());
        let b = eq3_bounds(r, 2).unwrap();
        let eps = diamond_pauli(&pc);
        assert!(b.lower - 1e-9 <= eps && eps <= b.upper + 1e-9);
    }
}
