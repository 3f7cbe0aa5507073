//! Exact tailored channels for small circuits, by enumerating every twirl
//! sequence at the PTM level.
//!
//! A cycle is implemented as `G ∘ E(G) ∘ E(C̃) ∘ C̃`: the dressed easy round
//! followed by its noise, then the hard round's noise and the hard round
//! itself. The final twirl is undone noiselessly, standing in for the
//! measurement relabeling.

use rand::Rng;

use crate::algebra::{Circuit, EasyRound, HardRound, Pauli, PauliRound};
use crate::channels::{PauliString, Ptm, MAX_PTM_QUBITS};
use crate::metrics::{diamond_distance_lower, diamond_lower_search, thm2_bound, SearchConfig, Thm2Bound};
use crate::randomizer::randomize_with_twirls;
use crate::{Error, Result};

/// Noise channels attached to easy rounds and hard rounds.
pub trait RoundNoise {
    fn easy(&self, round: &EasyRound) -> Result<Ptm>;
    fn hard(&self, round: &HardRound) -> Result<Ptm>;
}

/// Single-qubit noise: one error channel per dihedral element and per hard
/// gate role.
#[derive(Clone, Debug)]
pub struct LocalNoise {
    pub easy: [Ptm; 8],
    pub hard: [Ptm; 3],
}

impl RoundNoise for LocalNoise {
    fn easy(&self, round: &EasyRound) -> Result<Ptm> {
        tensor_all(round.iter().map(|g| &self.easy[g.index()]))
    }

    fn hard(&self, round: &HardRound) -> Result<Ptm> {
        if !round.cz_pairs().is_empty() {
            return Err(Error::InvalidCircuit("local noise model has no cz channel".into()));
        }
        tensor_all(round.singles().iter().map(|g| &self.hard[*g as usize]))
    }
}

fn tensor_all<'a>(mut parts: impl Iterator<Item = &'a Ptm>) -> Result<Ptm> {
    let first = parts.next().ok_or_else(|| Error::InvalidCircuit("empty round".into()))?;
    parts.try_fold(first.clone(), |acc, p| acc.tensor(p))
}

fn all_pauli_rounds(n: usize) -> Vec<PauliRound> {
    (0..1usize << (2 * n))
        .map(|idx| (0..n).map(|q| Pauli::from_index(idx >> (2 * (n - 1 - q)))).collect())
        .collect()
}

fn check_small(c: &Circuit) -> Result<()> {
    if c.width() > MAX_PTM_QUBITS {
        return Err(Error::WidthOverflow { n: c.width(), max: MAX_PTM_QUBITS });
    }
    if c.len() > 4 {
        return Err(Error::OutOfRange(format!("exact enumeration limited to 4 cycles, got {}", c.len())));
    }
    Ok(())
}

fn pauli_ptm(round: &PauliRound) -> Ptm {
    let n = round.width();
    let idx = round.iter().fold(0usize, |acc, p| acc * 4 + p.index());
    let p = PauliString::from_index(n, idx);
    let diag: Vec<f64> = (0..1usize << (2 * n))
        .map(|q| if p.commutes_with(&PauliString::from_index(n, q)) { 1.0 } else { -1.0 })
        .collect();
    Ptm::new(n, nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag))).expect("shape matches")
}

/// Tailored channel with the noise supplied per cycle by `easy_noise(k, C̃_k)`.
fn tailored_with(
    bare: &Circuit,
    hard_noise: &dyn Fn(&HardRound) -> Result<Ptm>,
    easy_noise: &dyn Fn(usize, &EasyRound) -> Result<Ptm>,
) -> Result<Ptm> {
    check_small(bare)?;
    let n = bare.width();
    let rounds = all_pauli_rounds(n);
    let k = bare.len();
    let total = rounds.len().pow(k as u32);
    let mut acc: Option<nalgebra::DMatrix<f64>> = None;
    for seq in 0..total {
        let twirls: Vec<PauliRound> = (0..k).map(|i| rounds[(seq / rounds.len().pow(i as u32)) % rounds.len()].clone()).collect();
        let last = twirls[k - 1].clone();
        let rc = randomize_with_twirls(bare, twirls)?;
        let mut ch = Ptm::identity(n);
        for (i, cycle) in rc.compiled.cycles().iter().enumerate() {
            let easy = Ptm::from_unitary(&cycle.easy.matrix()?)?;
            let hard = Ptm::from_unitary(&cycle.hard.matrix()?)?;
            ch = hard
                .compose(&hard_noise(&cycle.hard)?)?
                .compose(&easy_noise(i, &cycle.easy)?)?
                .compose(&easy)?
                .compose(&ch)?;
        }
        ch = pauli_ptm(&last).compose(&ch)?;
        let m = ch.into_matrix();
        acc = Some(match acc {
            Some(a) => a + m,
            None => m,
        });
    }
    Ptm::new(n, acc.expect("at least one sequence") / total as f64)
}

/// `C_GD`: every dressed round carries its own noise.
pub fn tailored_gate_dependent<N: RoundNoise>(bare: &Circuit, noise: &N) -> Result<Ptm> {
    tailored_with(bare, &|h| noise.hard(h), &|_, e| noise.easy(e))
}

/// `C_GI`: cycle `k`'s dressed-round noise replaced by `per_cycle[k]`.
pub fn tailored_gate_independent<N: RoundNoise>(bare: &Circuit, noise: &N, per_cycle: &[Ptm]) -> Result<Ptm> {
    if per_cycle.len() != bare.len() {
        return Err(Error::DimensionMismatch(format!("{} averaged channels for {} cycles", per_cycle.len(), bare.len())));
    }
    tailored_with(bare, &|h| noise.hard(h), &|k, _| Ok(per_cycle[k].clone()))
}

/// Distribution of the dressed round `C̃_k` for each cycle, as
/// `(round, probability)` pairs.
pub fn dressed_distribution(bare: &Circuit) -> Result<Vec<Vec<(EasyRound, f64)>>> {
    check_small(bare)?;
    let n = bare.width();
    let rounds = all_pauli_rounds(n);
    let weight = 1.0 / (rounds.len() * rounds.len()) as f64;
    let mut out = Vec::with_capacity(bare.len());
    for (k, cycle) in bare.cycles().iter().enumerate() {
        let mut dist: Vec<(EasyRound, f64)> = Vec::new();
        for t in &rounds {
            for prev in &rounds {
                let correction = if k == 0 {
                    EasyRound::identity(n)
                } else {
                    bare.cycles()[k - 1].hard.conjugate(prev)?
                };
                let dressed = crate::randomizer::dress_cycle(&cycle.easy, t, &correction)?;
                match dist.iter_mut().find(|(r, _)| *r == dressed) {
                    Some((_, p)) => *p += weight,
                    None => dist.push((dressed, weight)),
                }
            }
        }
        out.push(dist);
    }
    Ok(out)
}

/// `E_k^T = E_{C̃_k} E(C̃_k)` for each cycle.
pub fn averaged_easy_noise<N: RoundNoise>(bare: &Circuit, noise: &N) -> Result<Vec<Ptm>> {
    dressed_distribution(bare)?
        .iter()
        .map(|dist| {
            let n = bare.width();
            let mut acc = nalgebra::DMatrix::<f64>::zeros(1 << (2 * n), 1 << (2 * n));
            for (round, p) in dist {
                acc += noise.easy(round)?.into_matrix() * *p;
            }
            Ptm::new(n, acc)
        })
        .collect()
}

/// Both sides of the gate-dependent easy-noise bound for one instance.
#[derive(Clone, Debug)]
pub struct GateDependenceCheck {
    /// `2 · ½‖C_GD - C_GI‖⋄` from the search: a lower bound on the norm.
    pub lhs_lower: f64,
    /// Measured `δ_k = E_{C̃_k}‖E(C̃_k) - E_k^T‖⋄`.
    pub deltas: Vec<f64>,
    /// Measured `ε[E(G_k) E_k^T]` for `k = 1 … K-1`.
    pub eps: Vec<f64>,
    pub bound: Thm2Bound,
}

/// Evaluates `‖C_GD - C_GI‖⋄` against the bound built from searched
/// `δ_k` and `ε_k` values.
pub fn gate_dependence_check<N: RoundNoise, R: Rng + ?Sized>(
    bare: &Circuit,
    noise: &N,
    cfg: &SearchConfig,
    rng: &mut R,
) -> Result<GateDependenceCheck> {
    let averaged = averaged_easy_noise(bare, noise)?;
    let gd = tailored_gate_dependent(bare, noise)?;
    let gi = tailored_gate_independent(bare, noise, &averaged)?;
    let lhs_lower = 2.0 * diamond_distance_lower(&gd, &gi, cfg, rng)?.value;

    let mut deltas = Vec::with_capacity(bare.len());
    for (dist, avg) in dressed_distribution(bare)?.iter().zip(&averaged) {
        let mut delta = 0.0;
        for (round, p) in dist {
            delta += p * 2.0 * diamond_distance_lower(&noise.easy(round)?, avg, cfg, rng)?.value;
        }
        deltas.push(delta);
    }
    let mut eps = Vec::with_capacity(bare.len().saturating_sub(1));
    for (cycle, avg) in bare.cycles().iter().zip(&averaged).take(bare.len() - 1) {
        let combined = noise.hard(&cycle.hard)?.compose(avg)?;
        eps.push(diamond_lower_search(&combined, cfg, rng)?.value);
    }
    let bound = thm2_bound(&deltas, &eps)?;
    Ok(GateDependenceCheck { lhs_lower, deltas, eps, bound })
}
