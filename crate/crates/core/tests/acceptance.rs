//! Acceptance gate. Runs every criterion at its stated size and tolerance,
//! prints one `[PASS]`/`[FAIL]` line each, and exits nonzero on any failure.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use relaxcb::harness::config::{ExperimentConfig, LearnerKind};
use relaxcb::harness::output::regret_csv;
use relaxcb::harness::run::{run_experiment, ExperimentResult};
use relaxcb::harness::theoretical_bound;
use relaxcb::harness::verify::{
    admissibility_spot_check, estimator_unbiasedness, inner_sup_sweep, minimax_sweep, random_floored_distribution,
    random_history, rademacher_bound_check, RademacherParams, TinyInstance,
};
use relaxcb::learner::{ContextMode, ContextSource, LearnerConfig, RelaxationLearner};
use relaxcb::policy::{EnumerationOracle, PolicyClass, ValueOracle};
use relaxcb::environment::ContextDistribution;
use relaxcb::types::CostVector;

const STOCHASTIC_GAP: &str = include_str!("../../../configs/stochastic_gap.json");
const POLICY_TARGETED: &str = include_str!("../../../configs/policy_targeted.json");

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

/// Played-distribution floors and coin probabilities seen across runs.
#[derive(Default)]
struct FloorLog {
    worst_floor_gap: f64,
    max_coin: f64,
    distributions: usize,
}

impl FloorLog {
    fn record_run(&mut self, result: &ExperimentResult) {
        if result.config.learner != LearnerKind::Relax {
            return;
        }
        let floor = 1.0 / result.scale;
        for run in &result.runs {
            for r in &run.per_round {
                self.worst_floor_gap = self.worst_floor_gap.min(r.min_prob - floor);
                self.distributions += 1;
            }
            if let Some(c) = run.max_coin_probability {
                self.max_coin = self.max_coin.max(c);
            }
        }
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn within(limit_secs: f64, elapsed: Duration) -> bool {
    elapsed.as_secs_f64() < limit_secs
}

// ── Criteria ────────────────────────────────────────────────────────────

fn estimator_unbiased(log: &mut FloorLog) -> Outcome {
    let (report, elapsed) = timed(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let q = random_floored_distribution(4, 8.0, &mut rng);
        assert!(q.min_prob() >= 1.0 / 8.0 - 1e-12);
        let c: Vec<f64> = (0..4).map(|_| rng.random::<f64>()).collect();
        estimator_unbiasedness(&q, &c, 8.0, 100_000, &mut rng).unwrap()
    });
    log.max_coin = log.max_coin.max(report.max_coin_probability);
    let z: Vec<String> = (0..4)
        .map(|i| format!("{:+.2}", (report.mean[i] - report.target[i]) / report.stderr[i]))
        .collect();
    Outcome::new(
        report.passed && within(5.0, elapsed),
        format!("z-scores [{}], {:.2}s", z.join(", "), elapsed.as_secs_f64()),
    )
}

fn oracle_budget() -> Outcome {
    let (k, t) = (4usize, 500usize);
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let class = Arc::new(PolicyClass::random(20, 6, k, &mut rng).unwrap());
    let contexts = ContextDistribution::uniform(6).unwrap();
    let config = LearnerConfig::new(k, t, 8.0, ContextMode::IidSampler).unwrap();
    let oracle = EnumerationOracle::new(class);
    let mut learner = RelaxationLearner::new(config, &oracle, ContextSource::Sampler(contexts.clone())).unwrap();
    for _ in 0..t {
        let x = contexts.sample(&mut rng);
        let cost = CostVector::new((0..k).map(|_| rng.random::<f64>()).collect()).unwrap();
        learner.step(x, |a| cost.get(a), &mut rng).unwrap();
    }
    let calls = oracle.calls();
    let want = (t * (k + 1)) as u64;
    Outcome::new(calls == want, format!("{calls} calls, expected T(K+1) = {want}"))
}

fn minimax_correct() -> Outcome {
    let ((k2, k3), elapsed) = timed(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(303);
        (
            minimax_sweep(2, 100, 1e-3, &mut rng).unwrap(),
            minimax_sweep(3, 50, 1e-2, &mut rng).unwrap(),
        )
    });
    Outcome::new(
        k2.passed && k3.passed && within(60.0, elapsed),
        format!(
            "worst excess over grid min: K=2 {:.2e} (tol {:.2e}), K=3 {:.2e} (tol {:.2e}), {:.2}s",
            k2.worst_excess,
            k2.tolerance,
            k3.worst_excess,
            k3.tolerance,
            elapsed.as_secs_f64()
        ),
    )
}

fn closed_form_inner_sup() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let sweep = inner_sup_sweep(100, &mut rng).unwrap();
    Outcome::new(sweep.passed, format!("max |diff| {:.2e} over {} instances", sweep.max_abs_diff, sweep.instances))
}

struct BoundRuns {
    results: Vec<(&'static str, ExperimentResult)>,
    elapsed: Duration,
}

fn bound_runs() -> BoundRuns {
    let start = Instant::now();
    let results = [("stochastic-gap", STOCHASTIC_GAP), ("policy-targeted", POLICY_TARGETED)]
        .into_iter()
        .map(|(name, json)| (name, run_experiment(&ExperimentConfig::from_json_str(json).unwrap()).unwrap()))
        .collect();
    BoundRuns {
        results,
        elapsed: start.elapsed(),
    }
}

fn sublinear(result: &ExperimentResult) -> (bool, f64, f64) {
    let late = result.mean_regret_at(2000) / 2000.0;
    let early = result.mean_regret_at(500) / 500.0;
    (late < 0.8 * early, late, early)
}

fn bound_conformance(runs: &BoundRuns) -> Outcome {
    let mut passed = within(600.0, runs.elapsed);
    let mut parts = Vec::new();
    for (name, r) in &runs.results {
        let c = &r.config;
        let bound = theoretical_bound(c.num_actions, c.horizon, r.scale, r.num_policies).unwrap();
        let last = r.final_point();
        let (sub, late, early) = sublinear(r);
        passed &= last.mean_regret <= bound && sub && r.runs.len() == 20;
        parts.push(format!(
            "{name}: L={:.3} regret {:.1}±{:.1} vs bound {:.1}; per-round {:.4} vs 0.8×{:.4}={:.4}{}",
            r.scale,
            last.mean_regret,
            last.stderr_regret,
            bound,
            late,
            early,
            0.8 * early,
            if sub { "" } else { " (not sublinear)" }
        ));
    }
    parts.push(format!("{:.1}s", runs.elapsed.as_secs_f64()));
    Outcome::new(passed, parts.join("; "))
}

fn rademacher_monte_carlo() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let r = rademacher_bound_check(&RademacherParams::standard(200, 2, 4.0, 16, 10_000), &mut rng).unwrap();
    Outcome::new(
        r.passed,
        format!("empirical {:.2} ± {:.2} vs bound {:.2}", r.empirical, r.stderr, r.bound),
    )
}

fn admissibility() -> Outcome {
    let (reports, elapsed) = timed(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(707);
        let mut out = Vec::new();
        for _ in 0..5 {
            let inst = TinyInstance::random(&mut rng).unwrap();
            out.push(admissibility_spot_check(&inst, &[], 4000, &mut rng).unwrap());
            let hist = random_history(&inst, &mut rng).unwrap();
            out.push(admissibility_spot_check(&inst, &hist, 4000, &mut rng).unwrap());
        }
        out
    });
    let worst = reports
        .iter()
        .map(|r| (r.lhs - r.rhs) / r.stderr)
        .fold(f64::NEG_INFINITY, f64::max);
    Outcome::new(
        reports.iter().all(|r| r.passed) && within(300.0, elapsed),
        format!(
            "{} step checks, worst (LHS-RHS)/SE = {:+.2}, {:.2}s",
            reports.len(),
            worst,
            elapsed.as_secs_f64()
        ),
    )
}

fn exploration_floor(log: &FloorLog) -> Outcome {
    Outcome::new(
        log.worst_floor_gap >= -1e-12 && log.max_coin <= 1.0,
        format!(
            "{} distributions, min(q) - 1/L >= {:.3e}, max coin probability {:.4}",
            log.distributions, log.worst_floor_gap, log.max_coin
        ),
    )
}

fn determinism(runs: &BoundRuns) -> Outcome {
    let again = bound_runs();
    let same = runs
        .results
        .iter()
        .zip(&again.results)
        .all(|((_, a), (_, b))| regret_csv(a) == regret_csv(b));
    Outcome::new(same, format!("{} regret.csv files compared byte for byte", runs.results.len()))
}

fn baseline_sanity(runs: &BoundRuns, log: &mut FloorLog) -> Outcome {
    let relax = &runs.results[0].1;
    let with_learner = |learner| {
        let mut c = relax.config.clone();
        c.learner = learner;
        run_experiment(&c).unwrap()
    };
    let uniform = with_learner(LearnerKind::Uniform);
    let exp4 = with_learner(LearnerKind::Exp4);
    log.record_run(&uniform);
    let (exp4_sub, late, early) = sublinear(&exp4);
    let relax_final = relax.final_point().mean_regret;
    let uniform_final = uniform.final_point().mean_regret;
    Outcome::new(
        relax_final < uniform_final && exp4_sub,
        format!(
            "relax {relax_final:.1} vs uniform {uniform_final:.1}; exp4 per-round {late:.4} vs 0.8×{early:.4}={:.4}",
            0.8 * early
        ),
    )
}

fn main() -> ExitCode {
    let mut log = FloorLog::default();
    let early = vec![
        (1, "estimator unbiasedness", estimator_unbiased(&mut log)),
        (2, "oracle budget", oracle_budget()),
        (3, "minimax correctness", minimax_correct()),
        (4, "closed-form inner sup", closed_form_inner_sup()),
    ];
    let mut results: Vec<(usize, &str, Outcome)> = early;
    let runs = bound_runs();
    for (_, r) in &runs.results {
        log.record_run(r);
    }
    results.push((5, "bound conformance", bound_conformance(&runs)));
    results.push((6, "rademacher monte carlo", rademacher_monte_carlo()));
    results.push((7, "one-step admissibility", admissibility()));
    let baseline = baseline_sanity(&runs, &mut log);
    results.push((8, "exploration floor", exploration_floor(&log)));
    results.push((9, "determinism", determinism(&runs)));
    results.push((10, "baseline sanity", baseline));
    results.sort_by_key(|(n, _, _)| *n);

    let mut failed = 0;
    for (n, name, o) in &results {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!o.passed);
        println!("[{tag}] criterion {n:>2} {name}: {}", o.detail);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
