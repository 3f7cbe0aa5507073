//! Statevector execution of bare and randomized circuits under the
//! over-rotation noise model.
//!
//! Every elementary gate instance carries its own noise: each easy gate
//! (identity included), each `H`/`T`, and each `CZ`. Wires are noiseless and
//! measurement is ideal.

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{bit_mask, Circuit, Dihedral, HardGate, MAX_UNITARY_QUBITS};
use crate::channels::{GateKind, NoiseSpec};
use crate::randomizer::randomize_circuit;
use crate::{Error, Result};

/// Largest simulated width.
pub const MAX_QUBITS: usize = MAX_UNITARY_QUBITS;

const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    /// Computational basis state `|index⟩` (qubit 0 most significant).
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::WidthOverflow { n, max: MAX_QUBITS });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        let slot = amps
            .get_mut(index)
            .ok_or_else(|| Error::OutOfRange(format!("basis index {index} for {n} qubits")))?;
        *slot = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn apply_single(&mut self, q: usize, m: &Matrix2<Complex64>) {
        let mask = bit_mask(self.n, q);
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | mask]);
                self.amps[i] = m[(0, 0)] * a0 + m[(0, 1)] * a1;
                self.amps[i | mask] = m[(1, 0)] * a0 + m[(1, 1)] * a1;
            }
        }
    }

    /// Multiplies the `|11⟩` component of qubits `(i, j)` by `phase`.
    pub fn apply_controlled_phase(&mut self, i: usize, j: usize, phase: Complex64) {
        let both = bit_mask(self.n, i) | bit_mask(self.n, j);
        for (k, a) in self.amps.iter_mut().enumerate() {
            if k & both == both {
                *a *= phase;
            }
        }
    }

    pub fn distribution(&self) -> Distribution {
        Distribution(self.amps.iter().map(|a| a.norm_sqr()).collect())
    }
}

/// Outcome probabilities over `2^n` computational basis states.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution(pub Vec<f64>);

impl Distribution {
    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Outcome relabeling `z ↦ z ⊕ x` for a measurement frame.
    pub fn relabel(&self, frame_x: &[bool]) -> Distribution {
        let n = frame_x.len();
        let mask = frame_x
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .fold(0usize, |m, (q, _)| m | bit_mask(n, q));
        let mut out = vec![0.0; self.0.len()];
        for (z, &p) in self.0.iter().enumerate() {
            out[z ^ mask] = p;
        }
        Distribution(out)
    }
}

/// Noisy matrices for every gate, precomputed from a [`NoiseSpec`].
#[derive(Clone, Debug)]
pub struct GateTable {
    easy: [Matrix2<Complex64>; 8],
    easy_trivial: [bool; 8],
    h: Matrix2<Complex64>,
    t: Matrix2<Complex64>,
    cz_phase: Complex64,
}

fn as_matrix2(m: &nalgebra::DMatrix<Complex64>) -> Matrix2<Complex64> {
    Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

impl GateTable {
    pub fn new(noise: &NoiseSpec) -> Self {
        let easy = Dihedral::all().map(|g| as_matrix2(&noise.noisy(GateKind::Easy(g))));
        let easy_trivial = easy.map(|m| m == Matrix2::identity());
        let cz = noise.noisy(GateKind::Cz);
        Self {
            easy,
            easy_trivial,
            h: as_matrix2(&noise.noisy(GateKind::Hard(HardGate::H))),
            t: as_matrix2(&noise.noisy(GateKind::Hard(HardGate::T))),
            cz_phase: cz[(3, 3)],
        }
    }

    /// Runs `circuit` on `state` in place.
    pub fn run(&self, circuit: &Circuit, state: &mut StateVector) -> Result<()> {
        if circuit.width() != state.n {
            return Err(Error::WidthMismatch { expected: state.n, got: circuit.width() });
        }
        for cycle in circuit.cycles() {
            for (q, g) in cycle.easy.iter().enumerate() {
                if !self.easy_trivial[g.index()] {
                    state.apply_single(q, &self.easy[g.index()]);
                }
            }
            for (q, g) in cycle.hard.singles().iter().enumerate() {
                match g {
                    HardGate::Wire => {}
                    HardGate::H => state.apply_single(q, &self.h),
                    HardGate::T => state.apply_single(q, &self.t),
                }
            }
            for &(i, j) in cycle.hard.cz_pairs() {
                state.apply_controlled_phase(i, j, self.cz_phase);
            }
            debug_assert!((state.norm() - 1.0).abs() < NORM_TOL, "norm drifted to {}", state.norm());
        }
        Ok(())
    }

    /// Output distribution from `|0…0⟩`.
    pub fn distribution(&self, circuit: &Circuit) -> Result<Distribution> {
        let mut state = StateVector::zero(circuit.width())?;
        self.run(circuit, &mut state)?;
        Ok(state.distribution())
    }
}

/// Noiseless output distribution from `|0…0⟩`.
pub fn ideal_distribution(circuit: &Circuit) -> Result<Distribution> {
    GateTable::new(&NoiseSpec::noiseless()).distribution(circuit)
}

/// Output distribution with every gate replaced by its over-rotated version.
pub fn run_bare(circuit: &Circuit, noise: &NoiseSpec) -> Result<Distribution> {
    GateTable::new(noise).distribution(circuit)
}

/// Average over `m` independent randomized compilations of `circuit`, each
/// run with `noise` on its dressed gates and relabeled by its measurement
/// frame. Per-randomization seeds are drawn from `rng` before the parallel
/// runs and the average is reduced in index order.
pub fn run_tailored<R: Rng + ?Sized>(circuit: &Circuit, noise: &NoiseSpec, m: usize, rng: &mut R) -> Result<Distribution> {
    if m == 0 {
        return Err(Error::OutOfRange("need at least one randomization".into()));
    }
    if circuit.width() > MAX_QUBITS {
        return Err(Error::WidthOverflow { n: circuit.width(), max: MAX_QUBITS });
    }
    let table = GateTable::new(noise);
    let seeds: Vec<u64> = (0..m).map(|_| rng.random()).collect();
    let runs: Vec<Distribution> = seeds
        .par_iter()
        .map(|&seed| {
            let rc = randomize_circuit(circuit, &mut ChaCha8Rng::seed_from_u64(seed));
            Ok(table.distribution(&rc.compiled)?.relabel(&rc.frame_x))
        })
        .collect::<Result<_>>()?;
    Ok(average_in_order(&runs))
}

/// Neumaier-compensated mean, accumulated in slice order.
pub fn average_in_order(runs: &[Distribution]) -> Distribution {
    let len = runs[0].0.len();
    let mut sum = vec![0.0f64; len];
    let mut comp = vec![0.0f64; len];
    for run in runs {
        for (j, &v) in run.0.iter().enumerate() {
            let t = sum[j] + v;
            if sum[j].abs() >= v.abs() {
                comp[j] += (sum[j] - t) + v;
            } else {
                comp[j] += (v - t) + sum[j];
            }
            sum[j] = t;
        }
    }
    let scale = 1.0 / runs.len() as f64;
    Distribution(sum.iter().zip(&comp).map(|(s, c)| (s + c) * scale).collect())
}
