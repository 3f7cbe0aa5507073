//! Invariant suites behind `rctailor verify`.

use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use rctailor_core::algebra::equal_up_to_phase;
use rctailor_core::channels::{
    calibrate_delta, infidelity, over_rotation, pauli_twirl, random_unitary, CalibrationKind, PauliChannel, Ptm,
};
use rctailor_core::exact::{gate_dependence_check, LocalNoise};
use rctailor_core::metrics::{
    diamond_lower_search, diamond_pauli, diamond_unitary, eq3_bounds, fig2_upper_bound, telescoping_residual, Fig2Curve,
    SearchConfig,
};
use rctailor_core::randomizer::{check_logical_equivalence, randomize_circuit, unitary_residual};
use rctailor_core::{Circuit, Dihedral, GateKind, HardGate, HardRound, Pauli, PauliRound};

use crate::{point_seed, HarnessError, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Suite {
    Algebra,
    Twirl,
    Bounds,
    Equivalence,
    Telescope,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Algebra, Suite::Twirl, Suite::Bounds, Suite::Equivalence, Suite::Telescope];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Twirl => "twirl",
            Suite::Bounds => "bounds",
            Suite::Equivalence => "equivalence",
            Suite::Telescope => "telescope",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown suite {s:?}")))
    }
}

/// One checked invariant. `worst` is the largest observed violation
/// metric (or the relevant measured value) and `limit` its threshold.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub suite: &'static str,
    pub check: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub failures: usize,
    pub worst: f64,
    pub limit: f64,
    pub seconds: f64,
}

struct Tally {
    suite: &'static str,
    check: &'static str,
    limit: f64,
    cases: usize,
    failures: usize,
    worst: f64,
    start: Instant,
}

impl Tally {
    fn new(suite: Suite, check: &'static str, limit: f64) -> Self {
        Tally { suite: suite.name(), check, limit, cases: 0, failures: 0, worst: 0.0, start: Instant::now() }
    }

    /// Records a case whose violation metric must stay at or below `limit`.
    fn at_most(&mut self, value: f64) {
        self.record(value, value <= self.limit);
    }

    fn record(&mut self, value: f64, ok: bool) {
        self.cases += 1;
        if !ok || value.is_nan() {
            self.failures += 1;
        }
        if value.is_nan() || value > self.worst {
            self.worst = value;
        }
    }

    fn finish(self) -> CheckOutcome {
        CheckOutcome {
            suite: self.suite,
            check: self.check,
            passed: self.failures == 0 && self.cases > 0,
            cases: self.cases,
            failures: self.failures,
            worst: self.worst,
            limit: self.limit,
            seconds: self.start.elapsed().as_secs_f64(),
        }
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(point_seed(seed, suite as u64));
    match suite {
        Suite::Algebra => algebra(),
        Suite::Twirl => twirl(&mut rng),
        Suite::Bounds => bounds(&mut rng),
        Suite::Equivalence => Ok(vec![equivalence(&mut rng)?]),
        Suite::Telescope => Ok(vec![telescope(&mut rng)?]),
    }
}

fn dense2(m: &nalgebra::Matrix2<Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_iterator(2, 2, m.iter().cloned())
}

fn algebra() -> Result<Vec<CheckOutcome>> {
    let suite = Suite::Algebra;
    let mut products = Tally::new(suite, "dihedral_products", 0.0);
    for a in Dihedral::all() {
        for b in Dihedral::all() {
            let ok = equal_up_to_phase(&dense2(&(a * b).matrix()), &dense2(&(a.matrix() * b.matrix())), 1e-12);
            products.record(if ok { 0.0 } else { 1.0 }, ok);
        }
    }

    let mut single = Tally::new(suite, "single_qubit_conjugation", 0.0);
    for g in HardGate::ALL {
        for p in Pauli::all() {
            let expect = g.matrix() * p.matrix() * g.matrix().adjoint();
            let ok = equal_up_to_phase(&dense2(&g.conjugate(p).matrix()), &dense2(&expect), 1e-12);
            single.record(if ok { 0.0 } else { 1.0 }, ok);
        }
    }

    let mut cz = Tally::new(suite, "cz_conjugation", 0.0);
    let round = HardRound::new(vec![HardGate::Wire; 2], vec![(0, 1)])?;
    let g = round.matrix()?;
    for p in Pauli::all() {
        for q in Pauli::all() {
            let twirl = PauliRound(vec![p, q]);
            let expect = &g * twirl.embed().matrix()? * g.adjoint();
            let ok = equal_up_to_phase(&round.conjugate(&twirl)?.matrix()?, &expect, 1e-12);
            cz.record(if ok { 0.0 } else { 1.0 }, ok);
        }
    }
    Ok(vec![products.finish(), single.finish(), cz.finish()])
}

fn twirl(rng: &mut ChaCha8Rng) -> Result<Vec<CheckOutcome>> {
    let suite = Suite::Twirl;
    let mut diag = Tally::new(suite, "twirl_off_diagonal_mass", 1e-12);
    let mut preserved = Tally::new(suite, "twirl_infidelity_preserved", 1e-12);
    let mut valid = Tally::new(suite, "twirl_probabilities_valid", 0.0);
    for i in 0..1000 {
        let n = 1 + i % 2;
        let e = Ptm::from_unitary(&random_unitary(1 << n, rng))?;
        match pauli_twirl(&e) {
            Ok(pc) => {
                let t = pc.to_ptm();
                valid.record(0.0, true);
                diag.at_most(t.off_diagonal_mass());
                preserved.at_most((infidelity(&t) - infidelity(&e)).abs());
            }
            Err(_) => {
                valid.record(1.0, false);
                diag.record(f64::INFINITY, false);
                preserved.record(f64::INFINITY, false);
            }
        }
    }
    Ok(vec![diag.finish(), preserved.finish(), valid.finish()])
}

fn near_identity(dim: usize, scale: f64, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let u = random_unitary(dim, rng);
    let h = (&u + u.adjoint()) * Complex64::new(0.5, 0.0);
    (h * Complex64::new(0.0, scale * rng.random::<f64>())).exp()
}

fn bounds(rng: &mut ChaCha8Rng) -> Result<Vec<CheckOutcome>> {
    let suite = Suite::Bounds;
    let mut chain = Tally::new(suite, "fidelity_bound_chain", 1e-9);
    let mut saturation = Tally::new(suite, "pauli_saturation", 1e-12);
    for i in 0..200 {
        let n = 1 + i % 2;
        let d = 1 << n;
        let u = near_identity(d, 0.5, rng);
        let r = infidelity(&Ptm::from_unitary(&u)?);
        let eps = diamond_unitary(&u)?;
        let b = eq3_bounds(r, d)?;
        chain.at_most((b.lower - eps).max(eps - b.upper).max(0.0));

        let pc = PauliChannel::random(n, 0.1, rng);
        let r = infidelity(&pc.to_ptm());
        let eps = diamond_pauli(&pc);
        let b = eq3_bounds(r, d)?;
        chain.at_most((b.lower - eps).max(eps - b.upper).max(0.0));
        saturation.at_most((eps - b.lower).abs());
    }
    let mut out = vec![chain.finish(), saturation.finish()];

    // a coherent over-rotation at r = 1e-4 sits near ε ≈ 1e-2
    let mut coherent = Tally::new(suite, "coherent_example_range", 3e-2);
    let delta = calibrate_delta(CalibrationKind::Single, 1e-4)?;
    let u = over_rotation(GateKind::Easy(Dihedral::IDENTITY), delta);
    let eps = diamond_unitary(&u)?;
    coherent.record(eps, (5e-3..=3e-2).contains(&eps));
    let mut search = Tally::new(suite, "coherent_search_agreement", 1e-4);
    let found = diamond_lower_search(&Ptm::from_unitary(&u)?, &SearchConfig::default(), rng)?;
    search.at_most((found.value - eps).abs());
    out.push(coherent.finish());
    out.push(search.finish());

    let mut soundness = Tally::new(suite, "gate_dependent_bound", 1e-9);
    for i in 0..20 {
        let bare = Circuit::random(1, 1 + i % 3, rng)?;
        let noise = LocalNoise {
            easy: std::array::from_fn(|_| Ptm::from_unitary(&near_identity(2, 0.2, rng)).expect("unitary")),
            hard: std::array::from_fn(|_| Ptm::from_unitary(&near_identity(2, 0.3, rng)).expect("unitary")),
        };
        let check = gate_dependence_check(&bare, &noise, &SearchConfig::default(), rng)?;
        soundness.at_most((check.lhs_lower - check.bound.normalized).max(check.lhs_lower - check.bound.general).max(0.0));
    }
    out.push(soundness.finish());

    // strict ordering dotted < dashed < solid, reported as the smallest gap
    let mut fig2 = Tally::new(suite, "fig2_dashed_between", 0.0);
    for r in crate::log_space(1e-4, 1e-2, 41) {
        let solid = fig2_upper_bound(r, &[], Fig2Curve::Untailored)?;
        let dotted = fig2_upper_bound(r, &[], Fig2Curve::TailoredGateIndependent)?;
        let dashed = fig2_upper_bound(r, &[1e-5, 1e-5], Fig2Curve::TailoredGateDependent)?;
        let gap = (dashed - dotted).min(solid - dashed);
        fig2.record(-gap, gap > 0.0);
    }
    out.push(fig2.finish());
    Ok(out)
}

fn equivalence(rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let mut t = Tally::new(Suite::Equivalence, "noiseless_equivalence", 1e-10);
    for _ in 0..100 {
        let n = rng.random_range(1..=4);
        let k = rng.random_range(1..=10);
        let bare = Circuit::random(n, k, rng)?;
        let rc = randomize_circuit(&bare, rng);
        t.at_most(check_logical_equivalence(&bare, &rc)?.max(unitary_residual(&bare, &rc)?));
    }
    Ok(t.finish())
}

fn telescope(rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let mut t = Tally::new(Suite::Telescope, "telescoping_residual", 1e-12);
    for _ in 0..100 {
        let k = rng.random_range(1..=4);
        let mut draw = || -> Result<Vec<Ptm>> { (0..k).map(|_| Ok(Ptm::from_unitary(&random_unitary(2, rng))?)).collect() };
        let a = draw()?;
        let b = draw()?;
        t.at_most(telescoping_residual(&a, &b)?);
    }
    Ok(t.finish())
}
