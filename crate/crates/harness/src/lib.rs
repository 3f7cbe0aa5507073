//! Noise-sweep experiments and verification suites for `rctailor-core`.
//!
//! Every sweep point gets its own seed, `master ⊕ splitmix64(index)`, so
//! points can run in any order and still produce identical output.

pub mod experiments;
pub mod verify;

use rctailor_core::channels::{CalibrationKind, NoiseSpec};

pub use experiments::{fig2_csv, fig2_rows, fig3_csv, fig3_rows, fig4_csv, fig4_rows, Fig2Row, Fig3Row, Fig4Row};
pub use verify::{run_suite, CheckOutcome, Suite};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] rctailor_core::Error),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

/// Parameters shared by the figure commands. Each command reads the fields
/// it needs: fig3 sweeps `r_min..=r_max` at fixed `cycles`, fig4 sweeps the
/// cycle range at fixed `r_cz`, fig2 sweeps the rate range only.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub qubits: usize,
    pub cycles: usize,
    pub cycles_min: usize,
    pub cycles_max: usize,
    pub cycles_step: usize,
    pub randomizations: usize,
    pub circuits: usize,
    pub r_cz: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    /// Single-qubit infidelity as a fraction of the CZ infidelity.
    pub easy_ratio: f64,
    pub seed: u64,
}

impl ExperimentConfig {
    /// Defaults for the `fig3` rate sweep.
    pub fn fig3_default() -> Self {
        ExperimentConfig {
            qubits: 4,
            cycles: 50,
            cycles_min: 50,
            cycles_max: 50,
            cycles_step: 1,
            randomizations: 200,
            circuits: 10,
            r_cz: 1e-3,
            r_min: 1e-5,
            r_max: 1e-2,
            points: 7,
            easy_ratio: 0.1,
            seed: 1,
        }
    }

    /// Defaults for the `fig4` length sweep.
    pub fn fig4_default() -> Self {
        ExperimentConfig {
            cycles: 100,
            cycles_min: 1,
            cycles_max: 100,
            cycles_step: 5,
            r_cz: 1e-3,
            easy_ratio: 1e-2,
            points: 1,
            ..Self::fig3_default()
        }
    }

    pub fn fig2_default() -> Self {
        ExperimentConfig { r_min: 1e-6, r_max: 1e-2, points: 41, ..Self::fig3_default() }
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("qubits", self.qubits),
            ("cycles", self.cycles),
            ("cycles-min", self.cycles_min),
            ("cycles-step", self.cycles_step),
            ("randomizations", self.randomizations),
            ("circuits", self.circuits),
            ("points", self.points),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(HarnessError::Config(format!("{name} must be at least 1")));
        }
        if self.cycles_max < self.cycles_min {
            return Err(HarnessError::Config("cycles-max is below cycles-min".into()));
        }
        if self.qubits > rctailor_core::simulator::MAX_QUBITS {
            return Err(HarnessError::Config(format!("at most {} qubits", rctailor_core::simulator::MAX_QUBITS)));
        }
        if self.r_min.is_nan() || self.r_max.is_nan() || self.r_min < 0.0 || self.r_max < self.r_min {
            return Err(HarnessError::Config("need 0 <= r-min <= r-max".into()));
        }
        if self.r_min == 0.0 && self.points > 1 {
            return Err(HarnessError::Config("log spacing needs r-min > 0".into()));
        }
        if self.r_cz.is_nan() || self.r_cz < 0.0 {
            return Err(HarnessError::Config("r-cz must be nonnegative".into()));
        }
        if self.easy_ratio.is_nan() || self.easy_ratio < 0.0 {
            return Err(HarnessError::Config("easy-ratio must be nonnegative".into()));
        }
        for r in [self.r_cz, self.r_max] {
            noise_for(r, self.easy_ratio)?;
        }
        Ok(())
    }

    /// `points` log-spaced rates from `r_min` to `r_max`.
    pub fn rates(&self) -> Vec<f64> {
        log_space(self.r_min, self.r_max, self.points)
    }

    /// `cycles_min`, then every multiple of `cycles_step` above it up to
    /// `cycles_max`.
    pub fn cycle_sweep(&self) -> Vec<usize> {
        let mut ks = vec![self.cycles_min];
        let mut k = (self.cycles_min / self.cycles_step + 1) * self.cycles_step;
        while k <= self.cycles_max {
            ks.push(k);
            k += self.cycles_step;
        }
        ks
    }

    /// `key=value` pairs recorded in CSV headers.
    pub fn describe(&self) -> String {
        format!(
            "qubits={} cycles={} cycles_min={} cycles_max={} cycles_step={} randomizations={} circuits={} r_cz={:e} r_min={:e} r_max={:e} points={} easy_ratio={:e} seed={}",
            self.qubits,
            self.cycles,
            self.cycles_min,
            self.cycles_max,
            self.cycles_step,
            self.randomizations,
            self.circuits,
            self.r_cz,
            self.r_min,
            self.r_max,
            self.points,
            self.easy_ratio,
            self.seed
        )
    }
}

/// Over-rotation noise with CZ infidelity `r_cz` and every single-qubit
/// gate at `r_cz * easy_ratio`.
pub fn noise_for(r_cz: f64, easy_ratio: f64) -> Result<NoiseSpec> {
    let r_single = r_cz * easy_ratio;
    if r_single >= CalibrationKind::Single.scale() {
        return Err(HarnessError::Config(format!("single-qubit rate {r_single:e} is out of calibration range")));
    }
    Ok(NoiseSpec::calibrated(r_cz, r_single)?)
}

pub fn log_space(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..points).map(|i| 10f64.powf(a + (b - a) * i as f64 / (points - 1) as f64)).collect()
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of sweep point `index`.
pub fn point_seed(master: u64, index: u64) -> u64 {
    master ^ splitmix64(index)
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Least-squares line `y = slope x + intercept`, with its `R²`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    LinearFit { slope, intercept: my - slope * mx, r_squared }
}
