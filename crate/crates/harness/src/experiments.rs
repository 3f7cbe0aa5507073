//! The `fig2`, `fig3` and `fig4` sweeps and their CSV encodings.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use rctailor_core::metrics::{fig2_upper_bound, variational_distance, Fig2Curve};
use rctailor_core::simulator::{ideal_distribution, run_bare, run_tailored};
use rctailor_core::Circuit;

use crate::{noise_for, point_seed, ExperimentConfig, Result};

/// Per-qubit easy-gate rates of the gate-dependent `fig2` curves.
pub const FIG2_EASY_RATES: [f64; 4] = [1e-5, 1e-4, 5e-4, 1e-3];

#[derive(Clone, Debug, PartialEq)]
pub struct Fig3Row {
    pub circuit_index: usize,
    pub r_cz: f64,
    pub tau_bare: f64,
    pub tau_tailored: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig4Row {
    pub cycles: usize,
    pub tau_bare: f64,
    pub tau_tailored: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fig2Row {
    pub r_hard: f64,
    pub untailored: f64,
    pub tailored_gi: f64,
    /// One entry per rate in [`FIG2_EASY_RATES`].
    pub tailored_gd: Vec<f64>,
}

/// `(τ_bare, τ_tailored)` for one circuit at one noise strength. The
/// tailored randomizations draw from `tailored_seed`.
fn taus(circuit: &Circuit, r_cz: f64, cfg: &ExperimentConfig, tailored_seed: u64) -> Result<(f64, f64)> {
    let noise = noise_for(r_cz, cfg.easy_ratio)?;
    let ideal = ideal_distribution(circuit)?;
    let bare = run_bare(circuit, &noise)?;
    let mut rng = ChaCha8Rng::seed_from_u64(tailored_seed);
    let tailored = run_tailored(circuit, &noise, cfg.randomizations, &mut rng)?;
    Ok((
        variational_distance(bare.probabilities(), ideal.probabilities())?,
        variational_distance(tailored.probabilities(), ideal.probabilities())?,
    ))
}

/// Fixed circuits, swept noise strength. Circuit `c` is drawn from
/// `point_seed(seed, c)` and reused at every rate.
pub fn fig3_rows(cfg: &ExperimentConfig) -> Result<Vec<Fig3Row>> {
    cfg.validate()?;
    let rates = cfg.rates();
    let jobs: Vec<(usize, usize)> = (0..cfg.circuits).flat_map(|c| (0..rates.len()).map(move |j| (c, j))).collect();
    jobs.par_iter()
        .map(|&(c, j)| {
            let seed = point_seed(cfg.seed, c as u64);
            let circuit = Circuit::random(cfg.qubits, cfg.cycles, &mut ChaCha8Rng::seed_from_u64(seed))?;
            let (tau_bare, tau_tailored) = taus(&circuit, rates[j], cfg, point_seed(seed, j as u64 + 1))?;
            Ok(Fig3Row { circuit_index: c, r_cz: rates[j], tau_bare, tau_tailored, seed })
        })
        .collect()
}

/// Fixed noise, swept circuit length; fresh circuits at every length.
pub fn fig4_rows(cfg: &ExperimentConfig) -> Result<Vec<Fig4Row>> {
    cfg.validate()?;
    let ks = cfg.cycle_sweep();
    let jobs: Vec<(usize, usize)> = (0..ks.len()).flat_map(|i| (0..cfg.circuits).map(move |c| (i, c))).collect();
    jobs.par_iter()
        .map(|&(i, c)| {
            let seed = point_seed(cfg.seed, (i * cfg.circuits + c) as u64);
            let circuit = Circuit::random(cfg.qubits, ks[i], &mut ChaCha8Rng::seed_from_u64(seed))?;
            let (tau_bare, tau_tailored) = taus(&circuit, cfg.r_cz, cfg, point_seed(seed, 1))?;
            Ok(Fig4Row { cycles: ks[i], tau_bare, tau_tailored, seed })
        })
        .collect()
}

pub fn fig2_rows(cfg: &ExperimentConfig) -> Result<Vec<Fig2Row>> {
    cfg.validate()?;
    cfg.rates()
        .into_iter()
        .map(|r| {
            let tailored_gd = FIG2_EASY_RATES
                .iter()
                .map(|&re| fig2_upper_bound(r, &[re, re], Fig2Curve::TailoredGateDependent))
                .collect::<std::result::Result<_, _>>()?;
            Ok(Fig2Row {
                r_hard: r,
                untailored: fig2_upper_bound(r, &[], Fig2Curve::Untailored)?,
                tailored_gi: fig2_upper_bound(r, &[], Fig2Curve::TailoredGateIndependent)?,
                tailored_gd,
            })
        })
        .collect()
}

fn write_csv(kind: &str, cfg: &ExperimentConfig, header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let mut out = format!("# rctailor {kind} {}\n", cfg.describe()).into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
    }
    Ok(String::from_utf8(out).expect("csv output is utf-8"))
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

pub fn fig3_csv(cfg: &ExperimentConfig) -> Result<String> {
    let rows = fig3_rows(cfg)?;
    write_csv(
        "fig3",
        cfg,
        &header(&["circuit_index", "r_cz", "tau_bare", "tau_tailored", "seed"]),
        rows.iter().map(|r| vec![r.circuit_index.to_string(), num(r.r_cz), num(r.tau_bare), num(r.tau_tailored), r.seed.to_string()]),
    )
}

pub fn fig4_csv(cfg: &ExperimentConfig) -> Result<String> {
    let rows = fig4_rows(cfg)?;
    write_csv(
        "fig4",
        cfg,
        &header(&["K", "tau_bare", "tau_tailored", "seed"]),
        rows.iter().map(|r| vec![r.cycles.to_string(), num(r.tau_bare), num(r.tau_tailored), r.seed.to_string()]),
    )
}

pub fn fig2_csv(cfg: &ExperimentConfig) -> Result<String> {
    let rows = fig2_rows(cfg)?;
    let mut names = header(&["r_hard", "eps_untailored", "eps_tailored_gi"]);
    names.extend(FIG2_EASY_RATES.iter().map(|re| format!("eps_tailored_gd_{re:e}")));
    write_csv(
        "fig2",
        cfg,
        &names,
        rows.iter().map(|r| {
            let mut cells = vec![num(r.r_hard), num(r.untailored), num(r.tailored_gi)];
            cells.extend(r.tailored_gd.iter().map(|v| num(*v)));
            cells
        }),
    )
}

/// Median τ over circuits at each rate: `(r, bare, tailored)`.
pub fn fig3_medians(rows: &[Fig3Row]) -> Vec<(f64, f64, f64)> {
    let mut rates: Vec<f64> = rows.iter().map(|r| r.r_cz).collect();
    rates.sort_by(f64::total_cmp);
    rates.dedup();
    rates
        .into_iter()
        .map(|rate| {
            let at: Vec<&Fig3Row> = rows.iter().filter(|r| r.r_cz == rate).collect();
            let bare: Vec<f64> = at.iter().map(|r| r.tau_bare).collect();
            let tailored: Vec<f64> = at.iter().map(|r| r.tau_tailored).collect();
            (rate, crate::median(&bare), crate::median(&tailored))
        })
        .collect()
}

/// Median τ over circuits at each length: `(K, bare, tailored)`.
pub fn fig4_medians(rows: &[Fig4Row]) -> Vec<(usize, f64, f64)> {
    let mut ks: Vec<usize> = rows.iter().map(|r| r.cycles).collect();
    ks.sort_unstable();
    ks.dedup();
    ks.into_iter()
        .map(|k| {
            let at: Vec<&Fig4Row> = rows.iter().filter(|r| r.cycles == k).collect();
            let bare: Vec<f64> = at.iter().map(|r| r.tau_bare).collect();
            let tailored: Vec<f64> = at.iter().map(|r| r.tau_tailored).collect();
            (k, crate::median(&bare), crate::median(&tailored))
        })
        .collect()
}

/// Log-log slopes of the median bare and tailored τ against rate.
pub fn fig3_slopes(rows: &[Fig3Row]) -> (f64, f64) {
    let med = fig3_medians(rows);
    let x: Vec<f64> = med.iter().map(|m| m.0.log10()).collect();
    let bare: Vec<f64> = med.iter().map(|m| m.1.log10()).collect();
    let tailored: Vec<f64> = med.iter().map(|m| m.2.log10()).collect();
    (crate::linear_fit(&x, &bare).slope, crate::linear_fit(&x, &tailored).slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig { qubits: 2, cycles: 4, randomizations: 8, circuits: 2, points: 3, ..ExperimentConfig::fig3_default() }
    }

    #[test]
    fn zero_noise_gives_zero_tau() {
        let cfg = ExperimentConfig { r_min: 0.0, r_max: 0.0, points: 1, ..small() };
        for row in fig3_rows(&cfg).unwrap() {
            assert!(row.tau_bare < 1e-10 && row.tau_tailored < 1e-10);
        }
    }

    #[test]
    fn fig3_csv_is_reproducible() {
        let a = fig3_csv(&small()).unwrap();
        assert_eq!(a, fig3_csv(&small()).unwrap());
        let mut lines = a.lines();
        assert!(lines.next().unwrap().starts_with("# rctailor fig3 qubits=2"));
        assert_eq!(lines.next().unwrap(), "circuit_index,r_cz,tau_bare,tau_tailored,seed");
        assert_eq!(lines.count(), 6);
        assert_ne!(a, fig3_csv(&ExperimentConfig { seed: 2, ..small() }).unwrap());
    }

    #[test]
    fn taus_are_probabilities() {
        for row in fig3_rows(&small()).unwrap() {
            assert!((0.0..=1.0).contains(&row.tau_bare) && (0.0..=1.0).contains(&row.tau_tailored));
        }
    }

    #[test]
    fn fig4_rows_follow_the_sweep() {
        let cfg = ExperimentConfig { cycles_min: 1, cycles_max: 10, cycles_step: 5, ..small() };
        let rows = fig4_rows(&cfg).unwrap();
        let ks: Vec<usize> = rows.iter().map(|r| r.cycles).collect();
        assert_eq!(ks, vec![1, 1, 5, 5, 10, 10]);
        assert_eq!(fig4_csv(&cfg).unwrap(), fig4_csv(&cfg).unwrap());
    }

    #[test]
    fn fig2_columns_match_their_formulas() {
        let cfg = ExperimentConfig::fig2_default();
        let csv = fig2_csv(&cfg).unwrap();
        assert_eq!(
            csv.lines().nth(1).unwrap(),
            "r_hard,eps_untailored,eps_tailored_gi,eps_tailored_gd_1e-5,eps_tailored_gd_1e-4,eps_tailored_gd_5e-4,eps_tailored_gd_1e-3"
        );
        for row in fig2_rows(&cfg).unwrap() {
            assert!((row.untailored - (20.0 * row.r_hard).sqrt()).abs() < 1e-15);
            assert!((row.tailored_gi - 1.25 * row.r_hard).abs() < 1e-18);
            assert!(row.tailored_gd.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
