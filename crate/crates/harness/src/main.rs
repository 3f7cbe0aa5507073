use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rctailor_harness::{fig2_csv, fig3_csv, fig4_csv, run_suite, ExperimentConfig, HarnessError, Suite};

#[derive(Parser)]
#[command(name = "rctailor", version, about = "Randomized compiling noise sweeps and invariant checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Worst-case error bounds against hard-gate infidelity.
    Fig2(Opts),
    /// Bare vs tailored τ over a sweep of CZ error rates.
    Fig3(Opts),
    /// Bare vs tailored τ over a sweep of circuit lengths.
    Fig4(Opts),
    /// Run invariant suites and print one JSON line per check.
    Verify {
        /// algebra, twirl, bounds, equivalence or telescope; all when omitted.
        suites: Vec<String>,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args)]
struct Opts {
    #[arg(long)]
    qubits: Option<usize>,
    #[arg(long, conflicts_with_all = ["cycles_min", "cycles_max"])]
    cycles: Option<usize>,
    #[arg(long)]
    cycles_min: Option<usize>,
    #[arg(long)]
    cycles_max: Option<usize>,
    #[arg(long)]
    cycles_step: Option<usize>,
    #[arg(long)]
    randomizations: Option<usize>,
    #[arg(long)]
    circuits: Option<usize>,
    /// A single CZ infidelity; replaces the rate sweep for fig2/fig3.
    #[arg(long, conflicts_with_all = ["r_min", "r_max", "points"])]
    r_cz: Option<f64>,
    #[arg(long)]
    r_min: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    easy_ratio: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    threads: Option<usize>,
}

impl Opts {
    fn apply(&self, mut cfg: ExperimentConfig, sweeps_cycles: bool) -> ExperimentConfig {
        macro_rules! set {
            ($($field:ident),*) => { $(if let Some(v) = self.$field { cfg.$field = v; })* };
        }
        set!(qubits, cycles_min, cycles_max, cycles_step, randomizations, circuits, r_min, r_max, points, easy_ratio);
        if let Some(k) = self.cycles {
            cfg.cycles = k;
            if sweeps_cycles {
                cfg.cycles_min = k;
                cfg.cycles_max = k;
            }
        }
        if let Some(r) = self.r_cz {
            cfg.r_cz = r;
            if !sweeps_cycles {
                cfg.r_min = r;
                cfg.r_max = r;
                cfg.points = 1;
            }
        }
        cfg.seed = self.seed;
        cfg
    }

    fn emit(&self, text: &str) -> Result<(), HarnessError> {
        match &self.out {
            Some(path) => std::fs::write(path, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<bool, HarnessError> {
    let opts = match &cli.command {
        Command::Fig2(o) | Command::Fig3(o) | Command::Fig4(o) => o,
        Command::Verify { opts, .. } => opts,
    };
    if let Some(t) = opts.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
    }
    match &cli.command {
        Command::Fig2(o) => o.emit(&fig2_csv(&o.apply(ExperimentConfig::fig2_default(), false))?)?,
        Command::Fig3(o) => o.emit(&fig3_csv(&o.apply(ExperimentConfig::fig3_default(), false))?)?,
        Command::Fig4(o) => o.emit(&fig4_csv(&o.apply(ExperimentConfig::fig4_default(), true))?)?,
        Command::Verify { suites, opts } => {
            let chosen: Vec<Suite> = if suites.is_empty() {
                Suite::ALL.to_vec()
            } else {
                suites.iter().map(|s| s.parse()).collect::<Result<_, _>>()?
            };
            let mut report = String::new();
            let mut all_passed = true;
            for suite in chosen {
                for outcome in run_suite(suite, opts.seed)? {
                    all_passed &= outcome.passed;
                    report.push_str(&serde_json::to_string(&outcome).expect("outcome serializes"));
                    report.push('\n');
                }
            }
            opts.emit(&report)?;
            return Ok(all_passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
