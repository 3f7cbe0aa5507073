//! Exact finite-group representation of the easy gates (Paulis and the phase
//! gate `R`), hard rounds (`H`, `T = √R`, `CZ`), and circuits built from
//! alternating easy/hard rounds.
//!
//! All group elements are tracked modulo global phase. Matrix realizations
//! use the computational basis with `R = diag(1, i)`, `T = diag(1, e^{iπ/4})`
//! and `CZ = diag(1, 1, 1, -1)`. Multi-qubit matrices are big-endian: qubit 0
//! is the leftmost tensor factor and the most significant bit of a basis index.

use std::fmt;
use std::ops::{Deref, Mul};

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest width for which dense `2^n × 2^n` unitaries are built.
pub const MAX_UNITARY_QUBITS: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Single-qubit Pauli `X^x Z^z`, global phase discarded.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Pauli {
    pub x: bool,
    pub z: bool,
}

impl Pauli {
    pub const I: Pauli = Pauli { x: false, z: false };
    pub const X: Pauli = Pauli { x: true, z: false };
    pub const Y: Pauli = Pauli { x: true, z: true };
    pub const Z: Pauli = Pauli { x: false, z: true };

    pub const fn new(x: bool, z: bool) -> Self {
        Self { x, z }
    }

    /// The four Paulis in `I, X, Y, Z` order.
    pub const fn all() -> [Pauli; 4] {
        [Self::I, Self::X, Self::Y, Self::Z]
    }

    /// Index in `I, X, Y, Z` order.
    pub fn index(self) -> usize {
        match (self.x, self.z) {
            (false, false) => 0,
            (true, false) => 1,
            (true, true) => 2,
            (false, true) => 3,
        }
    }

    pub fn from_index(i: usize) -> Self {
        Self::all()[i & 3]
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_index(rng.random_range(0..4))
    }

    /// Embedding into the dihedral group: `X^x Z^z ↦ R^{2z} X^x`.
    pub fn embed(self) -> Dihedral {
        Dihedral::new(if self.z { 2 } else { 0 }, self.x)
    }

    /// Whether two Paulis commute.
    pub fn commutes_with(self, other: Pauli) -> bool {
        !((self.x & other.z) ^ (self.z & other.x))
    }

    /// Hermitian matrix representative (`Y = [[0, -i], [i, 0]]`).
    pub fn matrix(self) -> Matrix2<Complex64> {
        match (self.x, self.z) {
            (false, false) => Matrix2::new(ONE, ZERO, ZERO, ONE),
            (true, false) => Matrix2::new(ZERO, ONE, ONE, ZERO),
            (true, true) => Matrix2::new(ZERO, -I, I, ZERO),
            (false, true) => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["I", "X", "Y", "Z"][self.index()])
    }
}

impl Serialize for Pauli {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.x as u8, self.z as u8).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Pauli {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (x, z) = <(u8, u8)>::deserialize(d)?;
        match (x, z) {
            (0 | 1, 0 | 1) => Ok(Pauli::new(x == 1, z == 1)),
            _ => Err(serde::de::Error::custom(format!("pauli bits out of range: [{x},{z}]"))),
        }
    }
}

/// Element `R^a X^b` of the order-8 dihedral group generated by `R` and the
/// Paulis, global phase discarded.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Dihedral {
    a: u8,
    b: bool,
}

impl Dihedral {
    pub const IDENTITY: Dihedral = Dihedral { a: 0, b: false };
    pub const R: Dihedral = Dihedral { a: 1, b: false };

    /// Builds `R^a X^b`, reducing `a` modulo 4.
    pub const fn new(a: u8, b: bool) -> Self {
        Self { a: a & 3, b }
    }

    /// Power of `R`, in `0..4`.
    pub fn a(self) -> u8 {
        self.a
    }

    /// Power of `X`.
    pub fn b(self) -> bool {
        self.b
    }

    /// All eight elements, ordered by `index`.
    pub fn all() -> [Dihedral; 8] {
        std::array::from_fn(Self::from_index)
    }

    /// Dense index `a + 4b` in `0..8`.
    pub fn index(self) -> usize {
        self.a as usize + 4 * self.b as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self::new((i & 3) as u8, i & 4 != 0)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_index(rng.random_range(0..8))
    }

    pub fn inverse(self) -> Self {
        if self.b {
            // (R^a X)^2 = R^a R^{-a} X^2 = I
            self
        } else {
            Self::new(4 - self.a, false)
        }
    }

    /// The Pauli this element equals, if any.
    pub fn as_pauli(self) -> Option<Pauli> {
        match self.a {
            0 => Some(Pauli::new(self.b, false)),
            2 => Some(Pauli::new(self.b, true)),
            _ => None,
        }
    }

    /// Canonical matrix `R^a X^b`.
    pub fn matrix(self) -> Matrix2<Complex64> {
        let phase = I.powu(self.a as u32);
        let r = Matrix2::new(ONE, ZERO, ZERO, phase);
        if self.b {
            r * Pauli::X.matrix()
        } else {
            r
        }
    }
}

impl Mul for Dihedral {
    type Output = Dihedral;

    /// `(R^a X^b)(R^c X^d) = R^{a + (-1)^b c} X^{b ⊕ d}`, using `X R X ∝ R^{-1}`.
    fn mul(self, rhs: Dihedral) -> Dihedral {
        let c = if self.b { 4 - rhs.a } else { rhs.a };
        Dihedral::new(self.a + c, self.b ^ rhs.b)
    }
}

impl From<Pauli> for Dihedral {
    fn from(p: Pauli) -> Self {
        p.embed()
    }
}

impl fmt::Display for Dihedral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (0, false) => f.write_str("I"),
            (0, true) => f.write_str("X"),
            (a, false) => write!(f, "R^{a}"),
            (a, true) => write!(f, "R^{a}X"),
        }
    }
}

impl Serialize for Dihedral {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.a, self.b as u8).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Dihedral {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (a, b) = <(u8, u8)>::deserialize(d)?;
        if a > 3 || b > 1 {
            return Err(serde::de::Error::custom(format!("dihedral element out of range: [{a},{b}]")));
        }
        Ok(Dihedral::new(a, b == 1))
    }
}

macro_rules! round_newtype {
    ($(#[$doc:meta])* $name:ident, $elem:ty) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub Vec<$elem>);

        impl $name {
            pub fn identity(n: usize) -> Self {
                Self(vec![<$elem>::default(); n])
            }

            pub fn width(&self) -> usize {
                self.0.len()
            }
        }

        impl Deref for $name {
            type Target = [$elem];

            fn deref(&self) -> &[$elem] {
                &self.0
            }
        }

        impl From<Vec<$elem>> for $name {
            fn from(v: Vec<$elem>) -> Self {
                Self(v)
            }
        }

        impl FromIterator<$elem> for $name {
            fn from_iter<It: IntoIterator<Item = $elem>>(iter: It) -> Self {
                Self(iter.into_iter().collect())
            }
        }
    };
}

round_newtype!(
    /// One Pauli per qubit, `T_1 ⊗ … ⊗ T_n`.
    PauliRound,
    Pauli
);
round_newtype!(
    /// One dihedral (easy) gate per qubit.
    EasyRound,
    Dihedral
);

impl PauliRound {
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        (0..n).map(|_| Pauli::random(rng)).collect()
    }

    pub fn embed(&self) -> EasyRound {
        self.iter().map(|p| p.embed()).collect()
    }
}

impl EasyRound {
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        (0..n).map(|_| Dihedral::random(rng)).collect()
    }

    /// Qubit-wise product `self · rhs`.
    pub fn mul(&self, rhs: &EasyRound) -> Result<EasyRound> {
        check_width(self.width(), rhs.width())?;
        Ok(self.iter().zip(rhs.iter()).map(|(&g, &h)| g * h).collect())
    }

    /// Tensor product of the canonical matrices.
    pub fn matrix(&self) -> Result<DMatrix<Complex64>> {
        check_unitary_width(self.width())?;
        Ok(self
            .iter()
            .fold(DMatrix::identity(1, 1), |acc, g| acc.kronecker(&to_dmatrix(&g.matrix()))))
    }
}

fn check_width(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::WidthMismatch { expected, got })
    }
}

fn check_unitary_width(n: usize) -> Result<()> {
    if n > MAX_UNITARY_QUBITS {
        Err(Error::WidthOverflow { n, max: MAX_UNITARY_QUBITS })
    } else {
        Ok(())
    }
}

pub(crate) fn to_dmatrix(m: &Matrix2<Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(2, 2, |i, j| m[(i, j)])
}

/// Role of a qubit that is not part of a `CZ` pair in a hard round.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum HardGate {
    #[default]
    #[serde(rename = "W")]
    Wire,
    H,
    /// The π/8 gate `√R`.
    T,
}

impl HardGate {
    pub const ALL: [HardGate; 3] = [HardGate::Wire, HardGate::H, HardGate::T];

    pub fn matrix(self) -> Matrix2<Complex64> {
        match self {
            HardGate::Wire => Matrix2::identity(),
            HardGate::H => {
                let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                Matrix2::new(s, s, s, -s)
            }
            HardGate::T => Matrix2::new(ONE, ZERO, ZERO, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)),
        }
    }

    /// Conjugation `G (X^x Z^z) G†` as an easy gate.
    pub fn conjugate(self, p: Pauli) -> Dihedral {
        match self {
            HardGate::Wire => p.embed(),
            HardGate::H => Pauli::new(p.z, p.x).embed(),
            // √R maps X^x Z^z to R^x X^x Z^z = R^{x + 2z} X^x
            HardGate::T => Dihedral::new(p.x as u8 + 2 * p.z as u8, p.x),
        }
    }
}

/// A round of hard gates: a role per qubit plus disjoint `CZ` pairs.
///
/// Qubits inside a `CZ` pair always have the `Wire` role.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawHardRound")]
pub struct HardRound {
    singles: Vec<HardGate>,
    cz: Vec<(usize, usize)>,
}

#[derive(Deserialize)]
struct RawHardRound {
    singles: Vec<HardGate>,
    #[serde(default)]
    cz: Vec<(usize, usize)>,
}

impl TryFrom<RawHardRound> for HardRound {
    type Error = Error;

    fn try_from(raw: RawHardRound) -> Result<Self> {
        HardRound::new(raw.singles, raw.cz)
    }
}

impl HardRound {
    pub fn new(singles: Vec<HardGate>, cz: Vec<(usize, usize)>) -> Result<Self> {
        let n = singles.len();
        let mut used = vec![false; n];
        for &(i, j) in &cz {
            if i >= n || j >= n {
                return Err(Error::InvalidCircuit(format!("cz pair ({i},{j}) out of range for width {n}")));
            }
            if i == j || used[i] || used[j] {
                return Err(Error::InvalidCircuit(format!("cz pair ({i},{j}) overlaps another role")));
            }
            if singles[i] != HardGate::Wire || singles[j] != HardGate::Wire {
                return Err(Error::InvalidCircuit(format!("cz qubits ({i},{j}) also carry a single-qubit gate")));
            }
            used[i] = true;
            used[j] = true;
        }
        Ok(Self { singles, cz })
    }

    /// All-`Wire` round.
    pub fn identity(n: usize) -> Self {
        Self { singles: vec![HardGate::Wire; n], cz: Vec::new() }
    }

    pub fn width(&self) -> usize {
        self.singles.len()
    }

    pub fn singles(&self) -> &[HardGate] {
        &self.singles
    }

    pub fn cz_pairs(&self) -> &[(usize, usize)] {
        &self.cz
    }

    pub fn is_identity(&self) -> bool {
        self.cz.is_empty() && self.singles.iter().all(|&g| g == HardGate::Wire)
    }

    /// Samples a round: each unpaired qubit, visited in order, is paired with
    /// probability 1/2 to a uniformly chosen later unpaired qubit; qubits left
    /// unpaired get `Wire`, `H` or `T` uniformly.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut singles = vec![HardGate::Wire; n];
        let mut paired = vec![false; n];
        let mut cz = Vec::new();
        for q in 0..n {
            if paired[q] {
                continue;
            }
            let want_pair = rng.random_bool(0.5);
            let partners: Vec<usize> = (q + 1..n).filter(|&j| !paired[j]).collect();
            if want_pair && !partners.is_empty() {
                let j = partners[rng.random_range(0..partners.len())];
                paired[q] = true;
                paired[j] = true;
                cz.push((q, j));
            } else {
                singles[q] = HardGate::ALL[rng.random_range(0..3)];
            }
        }
        Self { singles, cz }
    }

    /// `G P G†` for a Pauli round, as an easy round (global phase discarded).
    pub fn conjugate(&self, paulis: &PauliRound) -> Result<EasyRound> {
        check_width(self.width(), paulis.width())?;
        let mut out: Vec<Dihedral> =
            self.singles.iter().zip(paulis.iter()).map(|(g, &p)| g.conjugate(p)).collect();
        for &(i, j) in &self.cz {
            let (pi, pj) = (paulis[i], paulis[j]);
            out[i] = Pauli::new(pi.x, pi.z ^ pj.x).embed();
            out[j] = Pauli::new(pj.x, pj.z ^ pi.x).embed();
        }
        Ok(EasyRound(out))
    }

    pub fn matrix(&self) -> Result<DMatrix<Complex64>> {
        let n = self.width();
        check_unitary_width(n)?;
        let mut m = self
            .singles
            .iter()
            .fold(DMatrix::identity(1, 1), |acc, g| acc.kronecker(&to_dmatrix(&g.matrix())));
        let dim = 1usize << n;
        for &(i, j) in &self.cz {
            let (bi, bj) = (bit_mask(n, i), bit_mask(n, j));
            for row in 0..dim {
                if row & bi != 0 && row & bj != 0 {
                    m.row_mut(row).neg_mut();
                }
            }
        }
        Ok(m)
    }
}

/// Mask of qubit `q` in a big-endian basis index over `n` qubits.
pub fn bit_mask(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

/// Easy round followed by hard round.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cycle {
    pub easy: EasyRound,
    pub hard: HardRound,
}

/// Circuit of `K ≥ 1` cycles whose final hard round is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCircuit")]
pub struct Circuit {
    n: usize,
    cycles: Vec<Cycle>,
}

#[derive(Deserialize)]
struct RawCircuit {
    n: usize,
    cycles: Vec<Cycle>,
}

impl TryFrom<RawCircuit> for Circuit {
    type Error = Error;

    fn try_from(raw: RawCircuit) -> Result<Self> {
        Circuit::new(raw.n, raw.cycles)
    }
}

impl Circuit {
    pub fn new(n: usize, cycles: Vec<Cycle>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidCircuit("circuit has no qubits".into()));
        }
        let Some(last) = cycles.last() else {
            return Err(Error::InvalidCircuit("circuit has no cycles".into()));
        };
        for (k, c) in cycles.iter().enumerate() {
            if c.easy.width() != n || c.hard.width() != n {
                return Err(Error::InvalidCircuit(format!(
                    "cycle {k} has width ({}, {}), expected {n}",
                    c.easy.width(),
                    c.hard.width()
                )));
            }
        }
        if !last.hard.is_identity() {
            return Err(Error::InvalidCircuit("final hard round must be all wires".into()));
        }
        Ok(Self { n, cycles })
    }

    /// Samples `k` cycles with uniform easy rounds and `HardRound::random`
    /// hard rounds; the final hard round is all wires.
    pub fn random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::InvalidCircuit(format!("need n >= 1 and K >= 1, got n={n}, K={k}")));
        }
        let cycles = (0..k)
            .map(|i| {
                let easy = EasyRound::random(n, rng);
                let hard = if i + 1 == k { HardRound::identity(n) } else { HardRound::random(n, rng) };
                Cycle { easy, hard }
            })
            .collect();
        Ok(Self { n, cycles })
    }

    /// All-identity circuit.
    pub fn identity(n: usize, k: usize) -> Result<Self> {
        Self::new(n, (0..k).map(|_| Cycle { easy: EasyRound::identity(n), hard: HardRound::identity(n) }).collect())
    }

    pub fn width(&self) -> usize {
        self.n
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// `∏_k G_k · C_k`, later cycles on the left.
    pub fn unitary(&self) -> Result<DMatrix<Complex64>> {
        check_unitary_width(self.n)?;
        let dim = 1usize << self.n;
        let mut u = DMatrix::identity(dim, dim);
        for c in &self.cycles {
            u = c.hard.matrix()? * c.easy.matrix()? * u;
        }
        Ok(u)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("circuit serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Dense form of `HardGate::conjugate`/`HardRound::conjugate` is checked
/// against this in tests; shared with the verification harness.
pub fn equal_up_to_phase(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, tol: f64) -> bool {
    if a.shape() != b.shape() {
        return false;
    }
    // pick the phase from the largest entry of b
    let (idx, _) = b
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .expect("non-empty matrix");
    let (bv, av) = (b[idx], a[idx]);
    if bv.norm() < tol || av.norm() < tol {
        return false;
    }
    let phase = av / bv;
    let phase = phase / phase.norm();
    a.iter().zip(b.iter()).all(|(x, y)| (x - phase * y).norm() <= tol)
}
