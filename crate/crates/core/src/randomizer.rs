//! The randomized compiling pass.
//!
//! For each cycle `k` a uniformly random Pauli round `T_k` is drawn and the
//! bare easy round `C_k` is replaced by the single dressed round
//! `T_k · C_k · T^c_{k-1}`, where `T^c_k = G_k T_k G_k†` undoes the previous
//! twirl once it has been commuted through the hard round. `T^c_0` is the
//! identity. The final twirl `T_K` is left in place and undone classically
//! by relabeling measured bits with its X part.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Circuit, Cycle, EasyRound, HardRound, PauliRound};
use crate::metrics::variational_distance;
use crate::simulator::{GateTable, StateVector, MAX_QUBITS};
use crate::{Error, NoiseSpec, Result};

/// A compiled randomization of a bare circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawRandomized", into = "RawRandomized")]
pub struct RandomizedCircuit {
    /// Same width, hard rounds and cycle count as the bare circuit.
    pub compiled: Circuit,
    /// X bits of `T_K`; measured outcomes are mapped `z ↦ z ⊕ frame_x`.
    pub frame_x: Vec<bool>,
    /// The sampled `T_1 … T_K`.
    pub twirl_log: Vec<PauliRound>,
}

#[derive(Serialize, Deserialize)]
struct RawRandomized {
    #[serde(flatten)]
    compiled: Circuit,
    frame_x: Vec<u8>,
    twirl_log: Vec<PauliRound>,
}

impl From<RandomizedCircuit> for RawRandomized {
    fn from(rc: RandomizedCircuit) -> Self {
        Self {
            compiled: rc.compiled,
            frame_x: rc.frame_x.into_iter().map(u8::from).collect(),
            twirl_log: rc.twirl_log,
        }
    }
}

impl TryFrom<RawRandomized> for RandomizedCircuit {
    type Error = Error;

    fn try_from(raw: RawRandomized) -> Result<Self> {
        let n = raw.compiled.width();
        if raw.frame_x.len() != n {
            return Err(Error::InvalidCircuit(format!("frame_x has {} bits for {n} qubits", raw.frame_x.len())));
        }
        let frame_x = raw
            .frame_x
            .iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                _ => Err(Error::InvalidCircuit(format!("frame bit {b} is not 0 or 1"))),
            })
            .collect::<Result<Vec<bool>>>()?;
        if raw.twirl_log.len() != raw.compiled.len() || raw.twirl_log.iter().any(|t| t.width() != n) {
            return Err(Error::InvalidCircuit("twirl_log does not match circuit shape".into()));
        }
        let last = raw.twirl_log.last().expect("circuits have at least one cycle");
        if last.iter().map(|p| p.x).ne(frame_x.iter().copied()) {
            return Err(Error::InvalidCircuit("frame_x disagrees with the final twirl".into()));
        }
        Ok(Self { compiled: raw.compiled, frame_x, twirl_log: raw.twirl_log })
    }
}

impl RandomizedCircuit {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("randomized circuit serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// `T^c = G T† G†`; Paulis are self-inverse up to phase.
pub fn correction_round(hard: &HardRound, twirl: &PauliRound) -> Result<EasyRound> {
    hard.conjugate(twirl)
}

/// `T_k · C_k · T^c_{k-1}` as one easy round.
pub fn dress_cycle(easy: &EasyRound, twirl: &PauliRound, prev_correction: &EasyRound) -> Result<EasyRound> {
    twirl.embed().mul(&easy.mul(prev_correction)?)
}

/// Compiles `bare` with the given twirls, one forward pass.
pub fn randomize_with_twirls(bare: &Circuit, twirls: Vec<PauliRound>) -> Result<RandomizedCircuit> {
    let n = bare.width();
    if twirls.len() != bare.len() {
        return Err(Error::DimensionMismatch(format!("{} twirl rounds for {} cycles", twirls.len(), bare.len())));
    }
    let mut correction = EasyRound::identity(n);
    let mut cycles = Vec::with_capacity(bare.len());
    for (cycle, twirl) in bare.cycles().iter().zip(&twirls) {
        let easy = dress_cycle(&cycle.easy, twirl, &correction)?;
        correction = correction_round(&cycle.hard, twirl)?;
        cycles.push(Cycle { easy, hard: cycle.hard.clone() });
    }
    let frame_x = twirls.last().expect("non-empty circuit").iter().map(|p| p.x).collect();
    Ok(RandomizedCircuit { compiled: Circuit::new(n, cycles)?, frame_x, twirl_log: twirls })
}

/// Draws `T_1 … T_K` i.i.d. uniform over Pauli rounds and compiles.
pub fn randomize_circuit<R: Rng + ?Sized>(bare: &Circuit, rng: &mut R) -> RandomizedCircuit {
    let twirls = (0..bare.len()).map(|_| PauliRound::random(bare.width(), rng)).collect();
    randomize_with_twirls(bare, twirls).expect("twirls are generated with matching shape")
}

/// Largest variational distance, over all computational basis inputs,
/// between the noiseless bare outputs and the relabeled compiled outputs.
pub fn check_logical_equivalence(bare: &Circuit, rc: &RandomizedCircuit) -> Result<f64> {
    let n = bare.width();
    if n > MAX_QUBITS {
        return Err(Error::WidthOverflow { n, max: MAX_QUBITS });
    }
    if rc.compiled.width() != n {
        return Err(Error::WidthMismatch { expected: n, got: rc.compiled.width() });
    }
    let table = GateTable::new(&NoiseSpec::noiseless());
    let mut worst = 0.0f64;
    for input in 0..1usize << n {
        let mut a = StateVector::basis(n, input)?;
        table.run(bare, &mut a)?;
        let mut b = StateVector::basis(n, input)?;
        table.run(&rc.compiled, &mut b)?;
        let tau = variational_distance(a.distribution().probabilities(), b.distribution().relabel(&rc.frame_x).probabilities())?;
        worst = worst.max(tau);
    }
    Ok(worst)
}

/// `min_φ ‖U_bare - e^{iφ} T_K† U_rc‖_F`. The full final twirl (Z part
/// included) is undone so the residual vanishes at the unitary level.
pub fn unitary_residual(bare: &Circuit, rc: &RandomizedCircuit) -> Result<f64> {
    let a = bare.unitary()?;
    let last = rc.twirl_log.last().ok_or_else(|| Error::InvalidCircuit("empty twirl log".into()))?;
    let undo: DMatrix<Complex64> = last.embed().matrix()?.adjoint();
    let b = undo * rc.compiled.unitary()?;
    let overlap: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
    Ok((a - b * phase.conj()).norm())
}
