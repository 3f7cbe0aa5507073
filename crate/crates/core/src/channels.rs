//! Pauli-transfer-matrix channels, Pauli twirling, infidelity and the
//! calibrated over-rotation noise model.
//!
//! PTMs are taken in the normalized Pauli basis `P/√(2^n)`, ordered
//! lexicographically with `I, X, Y, Z` per qubit and qubit 0 most
//! significant. In that basis composition is matrix multiplication, tensor
//! products are Kronecker products, and Pauli channels are diagonal.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::Rng;

use crate::algebra::{to_dmatrix, Dihedral, HardGate};
use crate::{Error, Result};

/// Widest channel handled with dense PTMs.
pub const MAX_PTM_QUBITS: usize = 3;

const TP_TOL: f64 = 1e-12;
const PROB_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-9;

/// `n`-qubit Pauli operator `i^{#Y} ⊗_q X^{x_q} Z^{z_q}` stored as bit masks
/// over big-endian basis indices.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct PauliString {
    pub x: usize,
    pub z: usize,
    y_count: u32,
}

impl PauliString {
    /// Pauli with lexicographic index `idx` over `n` qubits.
    pub fn from_index(n: usize, idx: usize) -> Self {
        let (mut x, mut z, mut y_count) = (0, 0, 0);
        for q in 0..n {
            let digit = (idx >> (2 * (n - 1 - q))) & 3;
            let bit = 1 << (n - 1 - q);
            match digit {
                1 => x |= bit,
                2 => {
                    x |= bit;
                    z |= bit;
                    y_count += 1;
                }
                3 => z |= bit,
                _ => {}
            }
        }
        Self { x, z, y_count }
    }

    /// `⟨k ⊕ x| P |k⟩`.
    #[inline]
    pub fn entry(&self, k: usize) -> Complex64 {
        let sign = if (k & self.z).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        Complex64::i().powu(self.y_count) * sign
    }

    /// `Tr(P A)` for a dense operator `A`.
    pub fn trace_with(&self, a: &DMatrix<Complex64>) -> Complex64 {
        (0..a.nrows()).map(|k| self.entry(k) * a[(k, k ^ self.x)]).sum()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    pub fn dense(&self, n: usize) -> DMatrix<Complex64> {
        let dim = 1 << n;
        let mut m = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            m[(k ^ self.x, k)] = self.entry(k);
        }
        m
    }
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::DimensionMismatch(format!("dimension {dim} is not a power of two")));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Deviation `max |U†U - I|`.
pub fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
    let id = DMatrix::<Complex64>::identity(u.nrows(), u.ncols());
    (u.adjoint() * u - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Pauli transfer matrix of an `n`-qubit channel.
#[derive(Clone, Debug, PartialEq)]
pub struct Ptm {
    n: usize,
    m: DMatrix<f64>,
}

impl Ptm {
    pub fn new(n: usize, m: DMatrix<f64>) -> Result<Self> {
        let dim = 1usize << (2 * n);
        if m.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch(format!(
                "{n}-qubit ptm must be {dim}x{dim}, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self { n, m })
    }

    pub fn identity(n: usize) -> Self {
        let dim = 1 << (2 * n);
        Self { n, m: DMatrix::identity(dim, dim) }
    }

    /// `R_{PQ} = Tr(P U Q U†) / 2^n`.
    pub fn from_unitary(u: &DMatrix<Complex64>) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::DimensionMismatch(format!("unitary is {}x{}", u.nrows(), u.ncols())));
        }
        let n = qubits_for_dim(u.nrows())?;
        if n > MAX_PTM_QUBITS {
            return Err(Error::WidthOverflow { n, max: MAX_PTM_QUBITS });
        }
        let defect = unitarity_defect(u);
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        let d = u.nrows() as f64;
        let paulis: Vec<PauliString> = (0..1 << (2 * n)).map(|i| PauliString::from_index(n, i)).collect();
        let ud = u.adjoint();
        let mut m = DMatrix::zeros(paulis.len(), paulis.len());
        for (col, q) in paulis.iter().enumerate() {
            let conj = u * q.dense(n) * &ud;
            for (row, p) in paulis.iter().enumerate() {
                m[(row, col)] = p.trace_with(&conj).re / d;
            }
        }
        Ok(Self { n, m })
    }

    pub fn from_unitary2(u: &Matrix2<Complex64>) -> Result<Self> {
        Self::from_unitary(&to_dmatrix(u))
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Ptm) -> Result<Ptm> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("compose {} with {} qubits", self.n, other.n)));
        }
        Ok(Ptm { n: self.n, m: &self.m * &other.m })
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &Ptm) -> Result<Ptm> {
        let n = self.n + other.n;
        if n > MAX_PTM_QUBITS {
            return Err(Error::WidthOverflow { n, max: MAX_PTM_QUBITS });
        }
        Ok(Ptm { n, m: self.m.kronecker(&other.m) })
    }

    /// Uniform mixture of channels.
    pub fn average<'a>(channels: impl IntoIterator<Item = &'a Ptm>) -> Result<Ptm> {
        let mut it = channels.into_iter();
        let first = it
            .next()
            .ok_or_else(|| Error::DimensionMismatch("average of zero channels".into()))?;
        let mut sum = first.m.clone();
        let mut count = 1.0;
        for c in it {
            if c.n != first.n {
                return Err(Error::DimensionMismatch("averaging channels of different widths".into()));
            }
            sum += &c.m;
            count += 1.0;
        }
        Ok(Ptm { n: first.n, m: sum / count })
    }

    /// Largest deviation of the identity row from `(1, 0, …, 0)`.
    pub fn trace_preservation_defect(&self) -> f64 {
        self.m
            .row(0)
            .iter()
            .enumerate()
            .map(|(j, &v)| if j == 0 { (v - 1.0).abs() } else { v.abs() })
            .fold(0.0, f64::max)
    }

    pub fn check_trace_preserving(&self) -> Result<()> {
        let defect = self.trace_preservation_defect();
        if defect > TP_TOL {
            Err(Error::NotTracePreserving(defect))
        } else {
            Ok(())
        }
    }

    /// Largest off-diagonal magnitude.
    pub fn off_diagonal_mass(&self) -> f64 {
        let mut worst = 0.0f64;
        for ((i, j), v) in self.m.iter().enumerate().map(|(k, v)| ((k % self.m.nrows(), k / self.m.nrows()), v)) {
            if i != j {
                worst = worst.max(v.abs());
            }
        }
        worst
    }

    /// Applies the channel to an arbitrary (not necessarily Hermitian)
    /// `2^n × 2^n` operator by linearity.
    pub fn apply(&self, op: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let dim = 1usize << self.n;
        let count = dim * dim;
        let scale = 1.0 / dim as f64;
        let paulis: Vec<PauliString> = (0..count).map(|i| PauliString::from_index(self.n, i)).collect();
        let coeffs: Vec<Complex64> = paulis.iter().map(|p| p.trace_with(op) * scale.sqrt()).collect();
        let mut out = DMatrix::zeros(dim, dim);
        for (row, p) in paulis.iter().enumerate() {
            let y: Complex64 = (0..count).map(|col| coeffs[col] * self.m[(row, col)]).sum::<Complex64>() * scale.sqrt();
            if y.norm() == 0.0 {
                continue;
            }
            for k in 0..dim {
                out[(k ^ p.x, k)] += y * p.entry(k);
            }
        }
        out
    }

    /// CSV dump of the matrix, one row per line.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for row in self.m.row_iter() {
            let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            writeln!(s, "{}", line.join(",")).expect("writing to a String");
        }
        s
    }
}

/// Diagonal PTM of conjugation by the Pauli with index `p`.
fn pauli_signs(n: usize, p: usize) -> Vec<f64> {
    let pp = PauliString::from_index(n, p);
    (0..1 << (2 * n))
        .map(|q| if pp.commutes_with(&PauliString::from_index(n, q)) { 1.0 } else { -1.0 })
        .collect()
}

/// Averages `T† ∘ E ∘ T` over the `4^n` Pauli rounds `T` and returns the
/// resulting Pauli channel.
pub fn pauli_twirl(e: &Ptm) -> Result<PauliChannel> {
    e.check_trace_preserving()?;
    let twirled = pauli_twirl_ptm(e);
    let off = twirled.off_diagonal_mass();
    assert!(off < 1e-12, "pauli twirl left off-diagonal mass {off:e}");
    PauliChannel::from_ptm_diagonal(e.n, twirled.m.diagonal().as_slice())
}

/// The twirled PTM itself, without projecting onto the diagonal.
pub fn pauli_twirl_ptm(e: &Ptm) -> Ptm {
    let dim = e.m.nrows();
    let mut acc = DMatrix::<f64>::zeros(dim, dim);
    for p in 0..dim {
        let s = pauli_signs(e.n, p);
        for j in 0..dim {
            for i in 0..dim {
                acc[(i, j)] += s[i] * e.m[(i, j)] * s[j];
            }
        }
    }
    Ptm { n: e.n, m: acc / dim as f64 }
}

/// Averages `U† ∘ E ∘ U` over an arbitrary finite set of unitaries.
pub fn twirl_over(e: &Ptm, unitaries: &[DMatrix<Complex64>]) -> Result<Ptm> {
    let mut conj = Vec::with_capacity(unitaries.len());
    for u in unitaries {
        let r = Ptm::from_unitary(u)?;
        if r.n != e.n {
            return Err(Error::DimensionMismatch("twirling set width differs from channel".into()));
        }
        // PTMs of unitaries are orthogonal, so R(U†) = R(U)^T
        conj.push(Ptm { n: e.n, m: r.m.transpose() * &e.m * &r.m });
    }
    Ptm::average(conj.iter())
}

/// All `8^n` dihedral rounds as dense matrices.
pub fn dihedral_rounds(n: usize) -> Vec<DMatrix<Complex64>> {
    let mut rounds = vec![DMatrix::identity(1, 1)];
    for _ in 0..n {
        rounds = rounds
            .iter()
            .flat_map(|m| Dihedral::all().into_iter().map(move |g| m.kronecker(&to_dmatrix(&g.matrix()))))
            .collect();
    }
    rounds
}

/// Average gate infidelity `1 - (Tr R + d) / (d² + d)`.
pub fn infidelity(e: &Ptm) -> f64 {
    let d = (1usize << e.n) as f64;
    1.0 - (e.m.trace() + d) / (d * d + d)
}

/// Stochastic Pauli channel `ρ ↦ Σ_P c_P P ρ P`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliChannel {
    n: usize,
    c: Vec<f64>,
}

impl PauliChannel {
    pub fn new(n: usize, c: Vec<f64>) -> Result<Self> {
        if c.len() != 1 << (2 * n) {
            return Err(Error::DimensionMismatch(format!("{n}-qubit pauli channel needs {} entries", 1 << (2 * n))));
        }
        if let Some(&neg) = c.iter().find(|&&v| v < -PROB_TOL) {
            return Err(Error::NegativeProbability(neg));
        }
        let total: f64 = c.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidDistribution(format!("pauli probabilities sum to {total}")));
        }
        Ok(Self { n, c })
    }

    pub fn identity(n: usize) -> Self {
        let mut c = vec![0.0; 1 << (2 * n)];
        c[0] = 1.0;
        Self { n, c }
    }

    /// Random channel with probabilities drawn from a flat Dirichlet, tilted
    /// toward the identity by `bias`.
    pub fn random<R: Rng + ?Sized>(n: usize, bias: f64, rng: &mut R) -> Self {
        let mut c: Vec<f64> = (0..1 << (2 * n)).map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln()).collect();
        c[0] += bias;
        let total: f64 = c.iter().sum();
        c.iter_mut().for_each(|v| *v /= total);
        Self { n, c }
    }

    /// Inverts `λ_Q = Σ_P c_P χ(P, Q)` where `χ = ±1` by commutation.
    pub fn from_ptm_diagonal(n: usize, diag: &[f64]) -> Result<Self> {
        let dim = 1usize << (2 * n);
        if diag.len() != dim {
            return Err(Error::DimensionMismatch(format!("expected {dim} eigenvalues, got {}", diag.len())));
        }
        let c = (0..dim)
            .map(|p| pauli_signs(n, p).iter().zip(diag).map(|(s, l)| s * l).sum::<f64>() / dim as f64)
            .collect();
        Self::new(n, c)
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.c
    }

    /// Probability of the Pauli with lexicographic index `idx`.
    pub fn prob(&self, idx: usize) -> f64 {
        self.c[idx]
    }

    pub fn to_ptm(&self) -> Ptm {
        let dim = self.c.len();
        let diag: Vec<f64> = (0..dim)
            .map(|q| (0..dim).map(|p| self.c[p] * pauli_signs(self.n, p)[q]).sum())
            .collect();
        Ptm { n: self.n, m: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)) }
    }
}

/// Gate whose noise is configured by a [`NoiseSpec`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    Easy(Dihedral),
    Hard(HardGate),
    Cz,
}

impl GateKind {
    /// Ideal gate matrix (2×2, or 4×4 for `Cz`).
    pub fn matrix(self) -> DMatrix<Complex64> {
        match self {
            GateKind::Easy(g) => to_dmatrix(&g.matrix()),
            GateKind::Hard(g) => to_dmatrix(&g.matrix()),
            GateKind::Cz => {
                let mut m = DMatrix::identity(4, 4);
                m[(3, 3)] = Complex64::new(-1.0, 0.0);
                m
            }
        }
    }
}

/// Eigenvector of a single-qubit unitary that receives the over-rotation:
/// the one whose eigenvalue has the larger argument in `(-π, π]`. Multiples
/// of the identity use `|1⟩`.
fn perturbed_eigenvector(u: &Matrix2<Complex64>) -> [Complex64; 2] {
    const EPS: f64 = 1e-12;
    // argument in (-π, π], so that -1 always sorts above everything else
    let arg = |z: Complex64| {
        let a = z.arg();
        if a <= -PI + EPS { PI } else { a }
    };
    let (a, b, c, d) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    if b.norm() < EPS && c.norm() < EPS {
        if (a - d).norm() < EPS || arg(d) >= arg(a) {
            return [zero, one];
        }
        return [one, zero];
    }
    let tr = a + d;
    let disc = (tr * tr - 4.0 * (a * d - b * c)).sqrt();
    let (l1, l2) = ((tr + disc) / 2.0, (tr - disc) / 2.0);
    let lambda = if arg(l1) >= arg(l2) { l1 } else { l2 };
    let v = if b.norm() >= c.norm() { [b, lambda - a] } else { [lambda - d, c] };
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / norm, v[1] / norm]
}

/// Noisy version of `gate`: one eigenvalue multiplied by `e^{iδ}`. For `CZ`
/// the phase goes on `|11⟩`, giving `diag(1, 1, 1, -e^{iδ})`.
pub fn over_rotation(gate: GateKind, delta: f64) -> DMatrix<Complex64> {
    let u = gate.matrix();
    let kick = Complex64::from_polar(1.0, delta) - 1.0;
    match gate {
        GateKind::Cz => {
            let mut m = u;
            m[(3, 3)] *= kick + 1.0;
            m
        }
        _ => {
            let u2 = Matrix2::new(u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
            let v = perturbed_eigenvector(&u2);
            let proj = Matrix2::new(
                v[0] * v[0].conj(),
                v[0] * v[1].conj(),
                v[1] * v[0].conj(),
                v[1] * v[1].conj(),
            );
            to_dmatrix(&(u2 * (Matrix2::identity() + proj * kick)))
        }
    }
}

/// Which infidelity/angle relation to invert.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CalibrationKind {
    Single,
    Cz,
}

impl CalibrationKind {
    /// `r = scale · sin²(δ/2)`: 2/3 for one qubit, 3/5 for `CZ`.
    pub fn scale(self) -> f64 {
        match self {
            CalibrationKind::Single => 2.0 / 3.0,
            CalibrationKind::Cz => 3.0 / 5.0,
        }
    }
}

/// Over-rotation angle giving infidelity `r_target`.
pub fn calibrate_delta(kind: CalibrationKind, r_target: f64) -> Result<f64> {
    let max = kind.scale();
    if !(0.0..max).contains(&r_target) {
        return Err(Error::OutOfRange(format!("target infidelity {r_target} outside [0, {max})")));
    }
    Ok(2.0 * (r_target / max).sqrt().asin())
}

/// Over-rotation angle per gate. All angles lie in `(-π, π]`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSpec {
    easy: [f64; 8],
    h: f64,
    t: f64,
    cz: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self::noiseless()
    }
}

impl NoiseSpec {
    pub fn noiseless() -> Self {
        Self { easy: [0.0; 8], h: 0.0, t: 0.0, cz: 0.0 }
    }

    /// `CZ` at infidelity `r_cz`, every single-qubit gate (easy gates,
    /// including the identity, plus `H` and `T`) at `r_single`.
    pub fn calibrated(r_cz: f64, r_single: f64) -> Result<Self> {
        let single = calibrate_delta(CalibrationKind::Single, r_single)?;
        let cz = calibrate_delta(CalibrationKind::Cz, r_cz)?;
        Ok(Self { easy: [single; 8], h: single, t: single, cz })
    }

    pub fn delta(&self, gate: GateKind) -> f64 {
        match gate {
            GateKind::Easy(g) => self.easy[g.index()],
            GateKind::Hard(HardGate::Wire) => 0.0,
            GateKind::Hard(HardGate::H) => self.h,
            GateKind::Hard(HardGate::T) => self.t,
            GateKind::Cz => self.cz,
        }
    }

    /// Sets one gate's angle. Wires are always noiseless.
    pub fn set_delta(&mut self, gate: GateKind, delta: f64) -> Result<()> {
        if !(delta > -PI && delta <= PI) {
            return Err(Error::OutOfRange(format!("over-rotation {delta} outside (-pi, pi]")));
        }
        match gate {
            GateKind::Easy(g) => self.easy[g.index()] = delta,
            GateKind::Hard(HardGate::Wire) => {
                return Err(Error::OutOfRange("wires carry no noise".into()));
            }
            GateKind::Hard(HardGate::H) => self.h = delta,
            GateKind::Hard(HardGate::T) => self.t = delta,
            GateKind::Cz => self.cz = delta,
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.easy.iter().chain([&self.h, &self.t, &self.cz]).all(|&d| d == 0.0)
    }

    pub fn noisy(&self, gate: GateKind) -> DMatrix<Complex64> {
        over_rotation(gate, self.delta(gate))
    }
}

/// Haar-random unitary via Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let mut gauss = || {
        let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
        let u2: f64 = rng.random();
        let r = (-2.0 * u1.ln()).sqrt();
        Complex64::new(r * (2.0 * PI * u2).cos(), r * (2.0 * PI * u2).sin())
    };
    let mut m = DMatrix::from_fn(dim, dim, |_, _| gauss());
    for j in 0..dim {
        for k in 0..j {
            let proj: Complex64 = (0..dim).map(|i| m[(i, k)].conj() * m[(i, j)]).sum();
            for i in 0..dim {
                let v = m[(i, k)];
                m[(i, j)] -= proj * v;
            }
        }
        let norm = m.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        m.column_mut(j).iter_mut().for_each(|z| *z /= norm);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z_rotation(delta: f64) -> DMatrix<Complex64> {
        let mut m = DMatrix::identity(2, 2);
        m[(1, 1)] = Complex64::from_polar(1.0, delta);
        m
    }

    #[test]
    fn identity_and_x_ptms() {
        let id = Ptm::from_unitary(&DMatrix::identity(2, 2)).unwrap();
        assert!((id.matrix() - DMatrix::<f64>::identity(4, 4)).amax() < 1e-15);
        let x = Ptm::from_unitary2(&crate::Pauli::X.matrix()).unwrap();
        let expect = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, -1.0, -1.0]));
        assert!((x.matrix() - expect).amax() < 1e-15);
    }

    #[test]
    fn inverse_composes_to_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in [2, 4, 8] {
            let u = random_unitary(dim, &mut rng);
            let a = Ptm::from_unitary(&u).unwrap();
            let b = Ptm::from_unitary(&u.adjoint()).unwrap();
            let id = a.compose(&b).unwrap();
            assert!((id.matrix() - DMatrix::<f64>::identity(dim * dim, dim * dim)).amax() < 1e-12);
        }
    }

    #[test]
    fn tensor_matches_kron_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (u, v) = (random_unitary(2, &mut rng), random_unitary(2, &mut rng));
        let lhs = Ptm::from_unitary(&u).unwrap().tensor(&Ptm::from_unitary(&v).unwrap()).unwrap();
        let rhs = Ptm::from_unitary(&u.kronecker(&v)).unwrap();
        assert!((lhs.matrix() - rhs.matrix()).amax() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(Ptm::from_unitary(&DMatrix::identity(3, 3)), Err(Error::DimensionMismatch(_))));
        assert!(matches!(Ptm::from_unitary(&DMatrix::identity(16, 16)), Err(Error::WidthOverflow { .. })));
        let mut not_u = DMatrix::<Complex64>::identity(2, 2);
        not_u[(0, 0)] = Complex64::new(2.0, 0.0);
        assert!(matches!(Ptm::from_unitary(&not_u), Err(Error::NotUnitary(_))));
        assert!(Ptm::identity(1).compose(&Ptm::identity(2)).is_err());
        let mut m = DMatrix::identity(4, 4);
        m[(0, 1)] = 0.1;
        assert!(matches!(pauli_twirl(&Ptm::new(1, m).unwrap()), Err(Error::NotTracePreserving(_))));
    }

    #[test]
    fn twirl_of_identity() {
        let pc = pauli_twirl(&Ptm::identity(1)).unwrap();
        assert_eq!(pc.probabilities(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn twirl_of_z_rotation() {
        for delta in [0.01, 0.3, 1.7] {
            let pc = pauli_twirl(&Ptm::from_unitary(&z_rotation(delta)).unwrap()).unwrap();
            let (s, c) = ((delta / 2.0).sin().powi(2), (delta / 2.0).cos().powi(2));
            assert!((pc.prob(0) - c).abs() < 1e-12);
            assert!((pc.prob(3) - s).abs() < 1e-12);
            assert!(pc.prob(1).abs() < 1e-12 && pc.prob(2).abs() < 1e-12);
            // direct 4-term average of P U ρ U† P on a Pauli-basis oracle
            let u = z_rotation(delta);
            let paulis: Vec<_> = crate::Pauli::all().iter().map(|p| to_dmatrix(&p.matrix())).collect();
            let avg = Ptm::average(
                paulis.iter().map(|p| Ptm::from_unitary(&(p * &u * p)).unwrap()).collect::<Vec<_>>().iter(),
            )
            .unwrap();
            assert!((avg.matrix() - pc.to_ptm().matrix()).amax() < 1e-12);
        }
    }

    #[test]
    fn twirl_fixes_pauli_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [1, 2] {
            for _ in 0..20 {
                let pc = PauliChannel::random(n, 3.0, &mut rng);
                let back = pauli_twirl(&pc.to_ptm()).unwrap();
                for (a, b) in back.probabilities().iter().zip(pc.probabilities()) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn infidelity_closed_forms() {
        assert!(infidelity(&Ptm::identity(2)).abs() < 1e-15);
        for delta in [0.05f64, 0.4, 2.0] {
            let s2 = (delta / 2.0).sin().powi(2);
            let r1 = infidelity(&Ptm::from_unitary(&z_rotation(delta)).unwrap());
            assert!((r1 - 2.0 / 3.0 * s2).abs() < 1e-12);
            let rcz = infidelity(&Ptm::from_unitary(&(over_rotation(GateKind::Cz, delta) * GateKind::Cz.matrix().adjoint())).unwrap());
            assert!((rcz - 3.0 / 5.0 * s2).abs() < 1e-12);
        }
    }

    #[test]
    fn infidelity_matches_haar_average() {
        // 1 - E_ψ |⟨ψ|U|ψ⟩|² over Haar-random pure qubit states
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_unitary(2, &mut rng);
        let samples = 200_000;
        let mut acc = 0.0;
        for _ in 0..samples {
            let psi = random_unitary(2, &mut rng).column(0).into_owned();
            acc += (psi.adjoint() * &u * &psi)[(0, 0)].norm_sqr();
        }
        let mc = 1.0 - acc / samples as f64;
        let r = infidelity(&Ptm::from_unitary(&u).unwrap());
        // per-sample variance is at most 1/4
        assert!((mc - r).abs() < 4.0 * 0.5 / (samples as f64).sqrt(), "mc {mc} vs ptm {r}");
    }

    #[test]
    fn over_rotation_examples() {
        for g in Dihedral::all().map(GateKind::Easy).into_iter().chain([GateKind::Hard(HardGate::H), GateKind::Hard(HardGate::T), GateKind::Cz]) {
            assert!((over_rotation(g, 0.0) - g.matrix()).iter().all(|z| z.norm() < 1e-15), "{g:?}");
        }
        let delta = 0.2;
        let cz = over_rotation(GateKind::Cz, delta);
        let expect = [1.0, 1.0, 1.0].map(|v| Complex64::new(v, 0.0));
        for (i, v) in expect.iter().enumerate() {
            assert_eq!(cz[(i, i)], *v);
        }
        assert!((cz[(3, 3)] + Complex64::from_polar(1.0, delta)).norm() < 1e-15);

        let h = GateKind::Hard(HardGate::H);
        let noisy = over_rotation(h, delta);
        assert!(unitarity_defect(&noisy) < 1e-12);
        // commutes with H (same eigenbasis)
        assert!((&noisy * h.matrix() - h.matrix() * &noisy).iter().all(|z| z.norm() < 1e-12));
        let err = Ptm::from_unitary(&(&noisy * h.matrix().adjoint())).unwrap();
        assert!((infidelity(&err) - 2.0 / 3.0 * (delta / 2.0).sin().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn every_single_qubit_gate_rotates_one_eigenvalue() {
        let delta = 0.37;
        for g in Dihedral::all().map(GateKind::Easy).into_iter().chain([GateKind::Hard(HardGate::H), GateKind::Hard(HardGate::T)]) {
            let noisy = over_rotation(g, delta);
            let err = &noisy * g.matrix().adjoint();
            assert!((&noisy * g.matrix() - g.matrix() * &noisy).iter().all(|z| z.norm() < 1e-12), "{g:?}");
            let tr = err.trace();
            assert!((tr - (1.0 + Complex64::from_polar(1.0, delta))).norm() < 1e-12, "{g:?}");
        }
    }

    #[test]
    fn calibration() {
        assert_eq!(calibrate_delta(CalibrationKind::Single, 0.0).unwrap(), 0.0);
        let single = calibrate_delta(CalibrationKind::Single, 1e-3).unwrap();
        assert!((single - 0.077_479_044_923_880_91).abs() < 1e-12);
        let cz = calibrate_delta(CalibrationKind::Cz, 1e-3).unwrap();
        assert!((cz - 0.081_672_355_580_593_88).abs() < 1e-12);
        assert!(calibrate_delta(CalibrationKind::Single, 0.7).is_err());
        assert!(calibrate_delta(CalibrationKind::Cz, -1e-3).is_err());

        for r in [1e-6, 1e-4, 1e-2, 0.3] {
            let d = calibrate_delta(CalibrationKind::Single, r).unwrap();
            let e = Ptm::from_unitary(&(over_rotation(GateKind::Hard(HardGate::T), d) * GateKind::Hard(HardGate::T).matrix().adjoint())).unwrap();
            assert!((infidelity(&e) - r).abs() < 1e-12);
            let d = calibrate_delta(CalibrationKind::Cz, r).unwrap();
            let e = Ptm::from_unitary(&(over_rotation(GateKind::Cz, d) * GateKind::Cz.matrix().adjoint())).unwrap();
            assert!((infidelity(&e) - r).abs() < 1e-12);
        }
    }

    #[test]
    fn calibration_is_increasing() {
        for kind in [CalibrationKind::Single, CalibrationKind::Cz] {
            let mut prev = -1.0;
            for i in 0..1000 {
                let r = kind.scale() * i as f64 / 1000.0;
                let d = calibrate_delta(kind, r).unwrap();
                assert!(d > prev);
                prev = d;
            }
        }
    }

    #[test]
    fn apply_matches_unitary_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = random_unitary(4, &mut rng);
        let ptm = Ptm::from_unitary(&u).unwrap();
        let op = DMatrix::from_fn(4, 4, |i, j| Complex64::new(i as f64 - 0.5 * j as f64, (i * j) as f64 * 0.1));
        let expect = &u * &op * u.adjoint();
        assert!((ptm.apply(&op) - expect).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn pauli_channel_validation() {
        assert!(PauliChannel::new(1, vec![0.5, 0.5, 0.0]).is_err());
        assert!(matches!(PauliChannel::new(1, vec![1.1, -0.1, 0.0, 0.0]), Err(Error::NegativeProbability(_))));
        assert!(matches!(PauliChannel::new(1, vec![0.5, 0.1, 0.0, 0.0]), Err(Error::InvalidDistribution(_))));
    }

    #[test]
    fn noise_spec_bounds() {
        let mut spec = NoiseSpec::noiseless();
        assert!(spec.set_delta(GateKind::Cz, PI).is_ok());
        assert!(spec.set_delta(GateKind::Cz, -PI).is_err());
        assert!(spec.set_delta(GateKind::Hard(HardGate::Wire), 0.1).is_err());
        assert!(NoiseSpec::calibrated(1.0, 1e-3).is_err());
    }
}
