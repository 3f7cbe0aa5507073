//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rctailor_harness::experiments::{fig3_rows, fig3_slopes, fig4_medians, fig4_rows};
use rctailor_harness::{linear_fit, run_suite, CheckOutcome, ExperimentConfig, Suite};

struct Gate {
    failed: usize,
}

impl Gate {
    fn report(&mut self, name: &str, passed: bool, detail: String) {
        if !passed {
            self.failed += 1;
        }
        println!("{} {name}: {detail}", if passed { "PASS" } else { "FAIL" });
    }

    fn checks(&mut self, name: &str, outcomes: &[&CheckOutcome], elapsed: Duration, budget: Duration) {
        let passed = outcomes.iter().all(|o| o.passed) && elapsed < budget;
        let detail = outcomes
            .iter()
            .map(|o| format!("{} {}/{} ok worst={:e} limit={:e}", o.check, o.cases - o.failures, o.cases, o.worst, o.limit))
            .collect::<Vec<_>>()
            .join("; ");
        self.report(name, passed, format!("{detail}; {:.2}s (budget {}s)", elapsed.as_secs_f64(), budget.as_secs()));
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn pick<'a>(outcomes: &'a [CheckOutcome], names: &[&str]) -> Vec<&'a CheckOutcome> {
    names.iter().map(|n| outcomes.iter().find(|o| o.check == *n).expect("check exists")).collect()
}

fn main() -> ExitCode {
    let mut gate = Gate { failed: 0 };
    let seed = 1;

    let (eq, t) = timed(|| run_suite(Suite::Equivalence, seed).expect("equivalence suite runs"));
    gate.checks("logical equivalence (100 circuits, n<=4, K<=10)", &eq.iter().collect::<Vec<_>>(), t, Duration::from_secs(30));

    let (tw, t) = timed(|| run_suite(Suite::Twirl, seed).expect("twirl suite runs"));
    gate.checks("pauli twirl (1000 unitaries, n=1,2)", &tw.iter().collect::<Vec<_>>(), t, Duration::from_secs(60));

    let (alg, t) = timed(|| run_suite(Suite::Algebra, seed).expect("algebra suite runs"));
    gate.checks("conjugation algebra (exhaustive)", &alg.iter().collect::<Vec<_>>(), t, Duration::from_secs(60));

    let (bounds, t) = timed(|| run_suite(Suite::Bounds, seed).expect("bounds suite runs"));
    let long = Duration::from_secs(600);
    gate.checks("fidelity bound chain (200 pauli + 200 unitary)", &pick(&bounds, &["fidelity_bound_chain", "pauli_saturation"]), t, long);
    gate.checks("coherent example at r=1e-4", &pick(&bounds, &["coherent_example_range", "coherent_search_agreement"]), t, long);

    let (tel, t2) = timed(|| run_suite(Suite::Telescope, seed).expect("telescope suite runs"));
    let mut soundness = pick(&bounds, &["gate_dependent_bound"]);
    soundness.extend(tel.iter());
    gate.checks("gate-dependent bound soundness (20 instances) and telescoping (100)", &soundness, t + t2, long);

    let (rows, t) = timed(|| fig3_rows(&ExperimentConfig::fig3_default()).expect("fig3 runs"));
    let (bare, tailored) = fig3_slopes(&rows);
    let ratio = tailored / (2.0 * bare);
    gate.report(
        "fig3 slope (n=4, K=50, M=200, 10 circuits, r_cz 1e-5..1e-2)",
        (0.7..=1.3).contains(&ratio) && t < long,
        format!("bare slope {bare:.3}, tailored slope {tailored:.3}, tailored/(2 bare) = {ratio:.3} (need 0.7..1.3); {:.2}s", t.as_secs_f64()),
    );

    let cfg = ExperimentConfig { cycles_min: 5, ..ExperimentConfig::fig4_default() };
    let (rows, t) = timed(|| fig4_rows(&cfg).expect("fig4 runs"));
    let med = fig4_medians(&rows);
    let x: Vec<f64> = med.iter().map(|m| m.0 as f64).collect();
    let y: Vec<f64> = med.iter().map(|m| m.2).collect();
    let fit = linear_fit(&x, &y);
    gate.report(
        "fig4 linear growth (n=4, K=5..100, r_cz=1e-3, r_easy=1e-5, M=200)",
        fit.r_squared > 0.9 && t < long,
        format!("R^2 = {:.4} (need > 0.9), slope {:.3e} per cycle; {:.2}s", fit.r_squared, fit.slope, t.as_secs_f64()),
    );

    gate.checks("fig2 dashed curve strictly between dotted and solid (r >= 1e-4)", &pick(&bounds, &["fig2_dashed_between"]), Duration::ZERO, long);

    if gate.failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria failed", gate.failed);
        ExitCode::FAILURE
    }
}
