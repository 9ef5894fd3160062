//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run with `cargo test -p pbrcheck --test acceptance`.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use pbrcheck::appendix::{certify_identity_report, residual, search_local, LinearMap2, SearchConfig};
use pbrcheck::detector::{
    branch_amplitudes_eq5, check_contract, couple_simple, joint_xi_detector, xi_superposition, PointerValue, Reading,
};
use pbrcheck::ontic::{
    exact_violation_probability, feasibility, forbidden_constraints, lattice_distributions, monte_carlo_violation,
    overlap_weight, FeasibilityVerdict, OnticModel, ResponseTable,
};
use pbrcheck::qcore::random_state;
use pbrcheck::report::{self, within_three_sigma};
use pbrcheck::{
    born_probabilities, forbidden_table, prepared_state, xi_basis, Amplitude, Command, DetectorModel,
    LocalDetectorParams, Preparation, RunOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 7;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn random_a(rng: &mut ChaCha8Rng) -> [Amplitude; 4] {
    let v = random_state(rng, 4);
    std::array::from_fn(|i| v.amps()[i])
}

/// 1. Forbidden-outcome table and the |0⟩|0⟩ distribution.
fn forbidden_outcomes() -> Outcome {
    let table = forbidden_table().expect("table");
    let basis = xi_basis();
    let mut worst_forbidden: f64 = 0.0;
    let mut worst_sum: f64 = 0.0;
    for p in Preparation::ALL {
        let probs = born_probabilities(&prepared_state(p), &basis).unwrap();
        let k = table.get(p).position();
        worst_forbidden = worst_forbidden.max(probs[k]);
        let rest: f64 = probs.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, v)| v).sum();
        worst_sum = worst_sum.max((rest - 1.0).abs());
    }
    let p00 = born_probabilities(&prepared_state(Preparation::ALL[0]), &basis).unwrap();
    let dev00 = [0.25, 0.25, 0.5].iter().zip(&p00[1..]).map(|(e, v)| (e - v).abs()).fold(0.0, f64::max);
    outcome(
        worst_forbidden < 1e-24 && worst_sum < 1e-12 && dev00 < 1e-12,
        format!("max forbidden prob {worst_forbidden:e}, max |rest-1| {worst_sum:e}, |00> deviation {dev00:e}"),
    )
}

/// 2. Simulated branches equal the closed-form coefficients.
fn closed_form_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let bit = |b: usize| if b == 0 { PointerValue::R0 } else { PointerValue::R1 };
    let order = [(1, 1), (1, 0), (0, 1), (0, 0)];
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let a = random_a(&mut rng);
        let branches = couple_simple(&xi_superposition(&a).unwrap()).unwrap();
        let closed = branch_amplitudes_eq5(&a).unwrap();
        for (&(x, y), c) in order.iter().zip(closed) {
            let sim = branches
                .iter()
                .find(|b| b.reading == Reading::pointers(bit(x), bit(y)))
                .map_or(Amplitude::new(0.0, 0.0), |b| b.amplitude);
            worst = worst.max((sim - c).norm());
        }
    }
    outcome(worst < 1e-12, format!("1000 random a(j): max deviation {worst:e}"))
}

/// 3. ξ(1) through the simple detector splits half/half; contract fails.
fn half_half() -> Outcome {
    let branches = couple_simple(&xi_basis().vectors()[0]).unwrap();
    let readings: BTreeSet<Reading> = branches.iter().map(|b| b.reading).collect();
    let want = BTreeSet::from([
        Reading::pointers(PointerValue::R1, PointerValue::R0),
        Reading::pointers(PointerValue::R0, PointerValue::R1),
    ]);
    let halves = branches.iter().all(|b| (b.probability() - 0.5).abs() < 1e-12);
    let verdict = check_contract(&DetectorModel::SimpleLocal).unwrap();
    outcome(
        branches.len() == 2 && readings == want && halves && !verdict.satisfied,
        format!(
            "{} branches, probabilities {:?}, contract satisfied = {}",
            branches.len(),
            branches.iter().map(|b| b.probability()).collect::<Vec<_>>(),
            verdict.satisfied
        ),
    )
}

/// 4. Exact identity over ≥ 10⁴ instances.
fn appendix_identity() -> Outcome {
    let cert = certify_identity_report();
    outcome(
        cert.holds() && cert.forced_instances >= 10_000,
        format!(
            "{} exact instances, {} forced with c(1,2)=c(2,2)=0, violations {}",
            cert.total_instances(),
            cert.forced_instances,
            cert.exhaustive_violations + cert.forced_violations + cert.solved_violations + cert.cell_violations
                + cert.polynomial_failures
        ),
    )
}

/// Dense-sampling bound: the smallest residual among 10⁶ uniform samples
/// whose normalized maps both clear the floor.
fn dense_sampling_bound(det_floor: f64, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw_map = |rng: &mut ChaCha8Rng| {
        LinearMap2::new(std::array::from_fn(|_| {
            std::array::from_fn(|_| Amplitude::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)))
        }))
        .normalized()
    };
    let mut best = f64::INFINITY;
    for _ in 0..samples {
        let u = draw_map(&mut rng);
        let v = draw_map(&mut rng);
        if u.det().norm() < det_floor || v.det().norm() < det_floor {
            continue;
        }
        let p = LocalDetectorParams::new(u, v).unwrap();
        best = best.min(residual(&p).unwrap());
    }
    best
}

/// 5. Restart search: positive residual, and within a factor of 2 of the
/// dense-sampling bound.
fn no_near_miss() -> Outcome {
    let report = search_local(&SearchConfig::new(SEED, 10_000, 0.1)).unwrap();
    let bound = dense_sampling_bound(0.1, 1_000_000, SEED);
    let ratio = bound / report.best_residual;
    let positive = report.best_residual > 0.0;
    let matches = (0.5..=2.0).contains(&ratio);
    outcome(
        positive && matches,
        format!(
            "search best {:e} (positive: {positive}); dense-sampling bound {bound:e}; ratio {ratio:.1} (factor-2 match: {matches})",
            report.best_residual
        ),
    )
}

/// 6. The joint detector satisfies the contract and reproduces Born
/// probabilities.
fn joint_contract() -> Outcome {
    let verdict = check_contract(&DetectorModel::JointXi).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let basis = xi_basis();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let psi = random_state(&mut rng, 4);
        let born = born_probabilities(&psi, &basis).unwrap();
        let mut seen = [0.0; 4];
        for b in joint_xi_detector(&psi).unwrap() {
            if let Reading::Joint(j) = b.reading {
                seen[j.position()] = b.probability();
            }
        }
        for (s, p) in seen.iter().zip(&born) {
            worst = worst.max((s - p).abs());
        }
    }
    outcome(verdict.satisfied && worst < 1e-12, format!("satisfied = {}, max deviation {worst:e}", verdict.satisfied))
}

/// Brute-force oracle: propagate each constraint term by term, then look
/// for a cell left with no admissible outcome.
fn propagation_oracle_feasible(m: &OnticModel) -> bool {
    let n = m.size();
    let table = forbidden_table().unwrap();
    let mut open = vec![[true; 4]; n * n];
    for p in Preparation::ALL {
        let (za, zb) = (m.distribution(p.a_choice).weights(), m.distribution(p.b_choice).weights());
        for a in 0..n {
            for b in 0..n {
                if za[a] * zb[b] > 0.0 {
                    open[a * n + b][table.get(p).position()] = false;
                }
            }
        }
    }
    open.iter().all(|cell| cell.iter().any(|&o| o))
}

/// 7. Feasibility equivalence on the 0.25-step lattice, N ≤ 4.
fn ontic_equivalence() -> Outcome {
    let mut models = 0;
    let mut bad = 0;
    for n in 1..=4 {
        let dists = lattice_distributions(n, 4);
        for z in &dists {
            for p in &dists {
                models += 1;
                let m = OnticModel::new(z.clone(), p.clone()).unwrap();
                let verdict = feasibility(&m).unwrap();
                let overlap_zero = overlap_weight(&m) == 0.0;
                let mut ok = verdict.is_feasible() == overlap_zero && verdict.is_feasible() == propagation_oracle_feasible(&m);
                match &verdict {
                    FeasibilityVerdict::Infeasible { witness } => {
                        ok &= z.weights()[*witness] > 0.0 && p.weights()[*witness] > 0.0;
                    }
                    FeasibilityVerdict::Feasible { table } => {
                        ok &= forbidden_constraints(&m).unwrap().iter().all(|c| c.evaluate(table) < 1e-12);
                    }
                }
                bad += usize::from(!ok);
            }
        }
    }
    outcome(bad == 0 && models == 1476, format!("{models} models, {bad} disagreements"))
}

/// 8. Monte Carlo frequencies within 3σ of the exact expectation.
fn monte_carlo() -> Outcome {
    let runs = 100_000;
    let disjoint = OnticModel::from_weights(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
    let FeasibilityVerdict::Feasible { table } = feasibility(&disjoint).unwrap() else {
        return outcome(false, "disjoint model not feasible");
    };
    let e0 = exact_violation_probability(&disjoint, &table).unwrap();
    let f0 = monte_carlo_violation(&disjoint, &table, runs, SEED).unwrap();

    let point = OnticModel::from_weights(&[1.0], &[1.0]).unwrap();
    let uniform = ResponseTable::uniform(1);
    let e1 = exact_violation_probability(&point, &uniform).unwrap();
    let f1 = monte_carlo_violation(&point, &uniform, runs, SEED).unwrap();
    let again = monte_carlo_violation(&point, &uniform, runs, SEED).unwrap();

    outcome(
        e0 == 0.0
            && (e1 - 0.25).abs() < 1e-15
            && within_three_sigma(f0.frequency, e0, runs)
            && within_three_sigma(f1.frequency, e1, runs)
            && f1 == again,
        format!("exact 0 -> {}, exact 1/4 -> {} (3 sigma = {:.2e})", f0.frequency, f1.frequency, 3.0 * (e1 * (1.0 - e1) / runs as f64).sqrt()),
    )
}

/// 9. `all --seed 7` twice gives byte-identical structured reports.
fn reproducibility() -> Outcome {
    let opts = RunOptions { seed: SEED, ..RunOptions::default() };
    let a = report::run(Command::All, &opts).unwrap();
    let b = report::run(Command::All, &opts).unwrap();
    let identical = a.to_structured() == b.to_structured();
    outcome(identical && a.passed(), format!("identical = {identical}, overall = {:?}, {} checks", a.overall, a.results.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 9] = [
        ("1 forbidden-outcome table", forbidden_outcomes, Some(Duration::from_secs(1))),
        ("2 closed-form branch equivalence", closed_form_equivalence, Some(Duration::from_secs(1))),
        ("3 half/half branches of xi(1)", half_half, None),
        ("4 exact determinant identity", appendix_identity, Some(Duration::from_secs(10))),
        ("5 no near-miss local detector", no_near_miss, Some(Duration::from_secs(60))),
        ("6 joint detector contract", joint_contract, None),
        ("7 ontic feasibility equivalence", ontic_equivalence, Some(Duration::from_secs(60))),
        ("8 Monte Carlo consistency", monte_carlo, None),
        ("9 reproducible report", reproducibility, None),
    ];

    let mut failed = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let mut result = check();
        let elapsed = start.elapsed();
        if let Some(limit) = limit {
            if elapsed > limit {
                result.ok = false;
                result.detail.push_str(&format!("; exceeded {limit:?}"));
            }
        }
        failed += usize::from(!result.ok);
        println!(
            "{} criterion {name} ({:.2}s): {}",
            if result.ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            result.detail
        );
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
