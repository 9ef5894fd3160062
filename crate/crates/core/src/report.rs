//! Verification suites and their reports.
//!
//! Each suite returns a list of [`CheckResult`]s. A [`Report`] is rendered
//! either for humans or as a JSON document with fixed key order, so that the
//! same command, options and seed always produce the same bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::appendix::{
    certify_identity_report, near_singular_family_residual, primed_expansion, primed_expansion_for, residual,
    search_local, LinearMap2, LocalDetectorParams, SearchConfig, CELLS, DEFAULT_DET_FLOOR, DEFAULT_RESTARTS,
};
use crate::detector::{
    branch_amplitudes_eq5, check_contract, couple_simple, joint_xi_detector, xi_superposition, BranchOutcome,
    DetectorModel, PointerValue, Reading,
};
use crate::error::{Error, Result};
use crate::ontic::{
    exact_violation_probability, feasibility, forbidden_constraints, lattice_distributions, monte_carlo_violation,
    overlap_weight, FeasibilityVerdict, OnticModel, ResponseTable,
};
use crate::qcore::{born_probabilities, inner, random_state, Amplitude, TOL};
use crate::states::{forbidden_table, prepared_state, single_states, xi_basis, Preparation, XiIndex};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_RUNS: u64 = 100_000;

const RANDOM_TRIALS: usize = 1_000;
const AMPLITUDE_DIGITS: usize = 15;
const PROBABILITY_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyStates,
    SimulateDetector,
    CertifyAppendix,
    SearchLocal,
    OnticFeasibility,
    All,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::VerifyStates,
        Command::SimulateDetector,
        Command::CertifyAppendix,
        Command::SearchLocal,
        Command::OnticFeasibility,
        Command::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyStates => "verify-states",
            Command::SimulateDetector => "simulate-detector",
            Command::CertifyAppendix => "certify-appendix",
            Command::SearchLocal => "search-local",
            Command::OnticFeasibility => "ontic-feasibility",
            Command::All => "all",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown command `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    pub restarts: usize,
    pub det_floor: f64,
    pub a: Option<[Amplitude; 4]>,
    pub model: Option<OnticModel>,
    pub runs: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            restarts: DEFAULT_RESTARTS,
            det_floor: DEFAULT_DET_FLOOR,
            a: None,
            model: None,
            runs: DEFAULT_RUNS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Overall {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check_id: String,
    pub status: Status,
    pub detail: String,
    pub numeric_payload: Option<BTreeMap<String, f64>>,
}

impl CheckResult {
    fn new(check_id: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Self { check_id: check_id.into(), status: Status::from_bool(ok), detail: detail.into(), numeric_payload: None }
    }

    /// Adds a payload entry, rounded to 12 significant digits so the
    /// structured output does not carry last-bit noise.
    fn with(mut self, key: &str, value: f64) -> Self {
        let rounded = format!("{:.*e}", PROBABILITY_DIGITS - 1, value).parse().unwrap_or(value);
        self.numeric_payload.get_or_insert_with(BTreeMap::new).insert(key.to_string(), rounded);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub command: Command,
    pub seed: u64,
    pub results: Vec<CheckResult>,
    pub overall: Overall,
}

impl Report {
    pub fn new(command: Command, seed: u64, results: Vec<CheckResult>) -> Result<Self> {
        let mut ids = BTreeSet::new();
        if let Some(dup) = results.iter().find(|r| !ids.insert(r.check_id.as_str())) {
            return Err(Error::Consistency(format!("duplicate check id `{}`", dup.check_id)));
        }
        let overall = if results.iter().any(|r| r.status == Status::Fail) { Overall::Fail } else { Overall::Pass };
        Ok(Self { tool_version: TOOL_VERSION.to_string(), command, seed, results, overall })
    }

    pub fn passed(&self) -> bool {
        self.overall == Overall::Pass
    }

    pub fn get(&self, check_id: &str) -> Option<&CheckResult> {
        self.results.iter().find(|r| r.check_id == check_id)
    }

    /// JSON document, keys in declaration order, trailing newline.
    pub fn to_structured(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }

    pub fn to_human(&self) -> String {
        let mut out = format!("pbrcheck {}  command={}  seed={}\n", self.tool_version, self.command, self.seed);
        for r in &self.results {
            out.push_str(&format!("[{}] {}: {}\n", r.status.tag(), r.check_id, r.detail));
            if let Some(payload) = &r.numeric_payload {
                for (k, v) in payload {
                    let shown = if v.fract() == 0.0 && v.abs() < 1e15 {
                        format!("{}", *v as i64)
                    } else {
                        fmt_sig(*v, PROBABILITY_DIGITS)
                    };
                    out.push_str(&format!("       {k} = {shown}\n"));
                }
            }
        }
        let passed = self.results.iter().filter(|r| r.status == Status::Pass).count();
        let failed = self.results.iter().filter(|r| r.status == Status::Fail).count();
        out.push_str(&format!(
            "overall: {}  ({passed} passed, {failed} failed, {} total)\n",
            if self.passed() { "PASS" } else { "FAIL" },
            self.results.len()
        ));
        out
    }
}

/// `x` to `digits` significant digits, fixed-point when reasonable.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = digits as i32 - 1 - magnitude;
    if (-4..=20).contains(&magnitude) && decimals >= 0 {
        format!("{:.*}", decimals as usize, x)
    } else {
        format!("{:.*e}", digits - 1, x)
    }
}

pub fn fmt_amplitude(a: Amplitude) -> String {
    format!("({}, {})", fmt_sig(a.re, AMPLITUDE_DIGITS), fmt_sig(a.im, AMPLITUDE_DIGITS))
}

/// Parses four comma-separated complex values, each `re`, `imi` or `re±imi`.
pub fn parse_coefficients(text: &str) -> Result<[Amplitude; 4]> {
    let values = text
        .split(',')
        .map(|t| {
            let t = t.trim();
            Amplitude::from_str(t)
                .ok()
                .filter(|a| a.re.is_finite() && a.im.is_finite())
                .ok_or_else(|| Error::InvalidArgument(format!("bad complex value `{t}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let coeffs: [Amplitude; 4] = values
        .try_into()
        .map_err(|v: Vec<_>| Error::InvalidArgument(format!("expected 4 coefficients, got {}", v.len())))?;
    let norm: f64 = coeffs.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > TOL {
        return Err(Error::NotNormalized { norm_sqr: norm });
    }
    Ok(coeffs)
}

/// Runs one command's suites.
pub fn run(command: Command, options: &RunOptions) -> Result<Report> {
    let results = match command {
        Command::VerifyStates => verify_states()?,
        Command::SimulateDetector => simulate_detector(options)?,
        Command::CertifyAppendix => certify_appendix(options)?,
        Command::SearchLocal => search(options)?,
        Command::OnticFeasibility => ontic(options)?,
        Command::All => {
            let mut all = verify_states()?;
            all.extend(simulate_detector(options)?);
            all.extend(certify_appendix(options)?);
            all.extend(search(options)?);
            all.extend(ontic(options)?);
            all
        }
    };
    Report::new(command, options.seed, results)
}

fn verify_states() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let s = single_states();
    let o01 = inner(&s.zero, &s.one)?.norm();
    let opm = inner(&s.plus, &s.minus)?.norm();
    let norms_ok = [&s.zero, &s.one, &s.plus, &s.minus].iter().all(|v| v.is_normalized());
    out.push(
        CheckResult::new(
            "states.single.orthonormal",
            o01 < TOL && opm < TOL && norms_ok,
            "<0|1> = 0, <+|-> = 0, all four states normalized",
        )
        .with("abs_inner_0_1", o01)
        .with("abs_inner_plus_minus", opm),
    );

    let basis = xi_basis();
    let gram_dev = basis
        .gram()
        .iter()
        .enumerate()
        .flat_map(|(i, row)| {
            row.iter().enumerate().map(move |(j, v)| (v - Amplitude::new(f64::from(u8::from(i == j)), 0.0)).norm())
        })
        .fold(0.0, f64::max);
    out.push(
        CheckResult::new("states.xi.orthonormal", gram_dev < TOL, "Gram matrix of xi1..xi4 is the identity")
            .with("max_gram_deviation", gram_dev),
    );

    let table = forbidden_table()?;
    for p in Preparation::ALL {
        let probs = born_probabilities(&prepared_state(p), &basis)?;
        let k = table.get(p);
        let forbidden = probs[k.position()];
        let rest: f64 = probs.iter().enumerate().filter(|(i, _)| *i != k.position()).map(|(_, v)| v).sum();
        let others_positive = probs.iter().enumerate().all(|(i, v)| i == k.position() || *v > 0.0);
        let ok = forbidden < 1e-24 && (rest - 1.0).abs() < TOL && others_positive;
        let mut r = CheckResult::new(
            format!("states.forbidden.{}", p.label()),
            ok,
            format!("preparation {p} gives zero probability to {k}"),
        );
        for (j, v) in XiIndex::ALL.iter().zip(&probs) {
            r = r.with(&format!("p_{j}"), *v);
        }
        out.push(r.with("forbidden", f64::from(k.get())));
    }
    out.push(CheckResult::new(
        "states.forbidden.bijective",
        table.is_bijective(),
        "each xi outcome is forbidden by exactly one preparation",
    ));

    let p00 = born_probabilities(&prepared_state(Preparation::ALL[0]), &basis)?;
    let expected = [0.0, 0.25, 0.25, 0.5];
    let dev = p00.iter().zip(expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    out.push(
        CheckResult::new(
            "states.zero_zero.distribution",
            dev < TOL,
            "|0>|0> has probabilities (0, 1/4, 1/4, 1/2) on xi1..xi4",
        )
        .with("max_deviation", dev),
    );
    Ok(out)
}

fn describe_branches(branches: &[BranchOutcome]) -> String {
    branches
        .iter()
        .map(|b| format!("{} amp {} prob {}", b.reading, fmt_amplitude(b.amplitude), fmt_sig(b.probability(), PROBABILITY_DIGITS)))
        .collect::<Vec<_>>()
        .join("; ")
}

fn reading_key(r: &Reading) -> String {
    match r {
        Reading::Pointers(p) => format!("prob_{}{}", p.a_reading.symbol(), p.b_reading.symbol()),
        Reading::Joint(j) => format!("prob_r{}", j.get()),
    }
}

fn closed_form_deviation(a: &[Amplitude; 4]) -> Result<f64> {
    let psi = xi_superposition(a)?;
    let closed = branch_amplitudes_eq5(a)?;
    let branches = couple_simple(&psi)?;
    let order = [(1, 1), (1, 0), (0, 1), (0, 0)];
    let bit = |b: usize| if b == 0 { PointerValue::R0 } else { PointerValue::R1 };
    Ok(order
        .iter()
        .zip(closed)
        .map(|(&(x, y), c)| {
            let sim = branches
                .iter()
                .find(|b| b.reading == Reading::pointers(bit(x), bit(y)))
                .map_or(Amplitude::new(0.0, 0.0), |b| b.amplitude);
            (sim - c).norm()
        })
        .fold(0.0, f64::max))
}

fn random_coefficients(rng: &mut ChaCha8Rng) -> [Amplitude; 4] {
    let v = random_state(rng, 4);
    [v.amps()[0], v.amps()[1], v.amps()[2], v.amps()[3]]
}

fn simulate_detector(options: &RunOptions) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let one = Amplitude::new(1.0, 0.0);
    let zero = Amplitude::new(0.0, 0.0);
    let a = options.a.unwrap_or([one, zero, zero, zero]);
    let psi = xi_superposition(&a)?;

    let simple = couple_simple(&psi)?;
    let total: f64 = simple.iter().map(BranchOutcome::probability).sum();
    let dev = closed_form_deviation(&a)?;
    let mut r = CheckResult::new(
        "detector.simple.branches",
        dev < TOL && (total - 1.0).abs() < TOL,
        format!("{} branch(es): {}", simple.len(), describe_branches(&simple)),
    )
    .with("branch_count", simple.len() as f64)
    .with("closed_form_max_deviation", dev)
    .with("total_probability", total);
    for b in &simple {
        r = r.with(&reading_key(&b.reading), b.probability());
    }
    out.push(r);

    let joint = joint_xi_detector(&psi)?;
    let born = born_probabilities(&psi, &xi_basis())?;
    let jdev = joint
        .iter()
        .map(|b| match b.reading {
            Reading::Joint(j) => (b.probability() - born[j.position()]).abs(),
            Reading::Pointers(_) => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    let mut r = CheckResult::new(
        "detector.joint.branches",
        jdev < TOL,
        format!("{} branch(es): {}", joint.len(), describe_branches(&joint)),
    )
    .with("born_max_deviation", jdev);
    for b in &joint {
        r = r.with(&reading_key(&b.reading), b.probability());
    }
    out.push(r);

    let verdict = check_contract(&DetectorModel::SimpleLocal)?;
    let expected_witness = BTreeSet::from([
        Reading::pointers(PointerValue::R1, PointerValue::R0),
        Reading::pointers(PointerValue::R0, PointerValue::R1),
    ]);
    let witness_ok = verdict
        .witness
        .as_ref()
        .is_some_and(|w| w.xi == XiIndex::ALL[0] && w.readings == expected_witness);
    let detail = match &verdict.witness {
        Some(w) => format!(
            "contract verdict FAIL: {} yields readings {}",
            w.xi,
            w.readings.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ")
        ),
        None => "contract verdict PASS".to_string(),
    };
    out.push(CheckResult::new("detector.simple.contract_violated", !verdict.satisfied && witness_ok, detail));

    let id = check_contract(&DetectorModel::LocalProduct(LocalDetectorParams::identity()))?;
    out.push(CheckResult::new(
        "detector.identity_product.contract_violated",
        !id.satisfied,
        format!("identity local product detector: contract verdict {}", if id.satisfied { "PASS" } else { "FAIL" }),
    ));

    let jv = check_contract(&DetectorModel::JointXi)?;
    out.push(CheckResult::new(
        "detector.joint.contract_satisfied",
        jv.satisfied,
        format!("joint xi detector: contract verdict {}", if jv.satisfied { "PASS" } else { "FAIL" }),
    ));

    let table = forbidden_table()?;
    let mut never = true;
    for p in Preparation::ALL {
        let k = table.get(p);
        never &= joint_xi_detector(&prepared_state(p))?.iter().all(|b| b.reading != Reading::Joint(k));
    }
    out.push(CheckResult::new(
        "detector.joint.forbidden_readings",
        never,
        "no preparation produces its forbidden reading r(k)",
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut closed_form_max: f64 = 0.0;
    let mut born_max: f64 = 0.0;
    let mut norm_max: f64 = 0.0;
    for _ in 0..RANDOM_TRIALS {
        let a = random_coefficients(&mut rng);
        closed_form_max = closed_form_max.max(closed_form_deviation(&a)?);
        let psi = random_state(&mut rng, 4);
        let born = born_probabilities(&psi, &xi_basis())?;
        for b in joint_xi_detector(&psi)? {
            if let Reading::Joint(j) = b.reading {
                born_max = born_max.max((b.probability() - born[j.position()]).abs());
            }
        }
        for model in [DetectorModel::SimpleLocal, DetectorModel::JointXi] {
            let total: f64 = model.run(&psi)?.iter().map(BranchOutcome::probability).sum();
            norm_max = norm_max.max((total - 1.0).abs());
        }
    }
    out.push(
        CheckResult::new(
            "detector.random.closed_form",
            closed_form_max < TOL,
            format!("{RANDOM_TRIALS} random inputs: simulated branches match the closed-form coefficients"),
        )
        .with("max_deviation", closed_form_max),
    );
    out.push(
        CheckResult::new(
            "detector.random.joint_born",
            born_max < TOL,
            format!("{RANDOM_TRIALS} random inputs: joint detector frequencies equal Born probabilities"),
        )
        .with("max_deviation", born_max),
    );
    out.push(
        CheckResult::new("detector.random.norm", norm_max < TOL, "branch probabilities sum to one")
            .with("max_deviation", norm_max),
    );
    Ok(out)
}

fn certify_appendix(options: &RunOptions) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let cert = certify_identity_report();
    out.push(
        CheckResult::new(
            "appendix.identity",
            cert.holds(),
            "vanishing non-target coefficients force det[u] = 0 (exact arithmetic)",
        )
        .with("polynomial_identities", cert.polynomial_identities as f64)
        .with("polynomial_failures", cert.polynomial_failures as f64)
        .with("exhaustive_instances", cert.exhaustive_instances as f64)
        .with("exhaustive_constrained", cert.exhaustive_constrained as f64)
        .with("exhaustive_violations", cert.exhaustive_violations as f64)
        .with("forced_instances", cert.forced_instances as f64)
        .with("forced_violations", cert.forced_violations as f64)
        .with("solved_instances", cert.solved_instances as f64)
        .with("solved_violations", cert.solved_violations as f64)
        .with("cell_checks", cert.cell_checks as f64)
        .with("cell_violations", cert.cell_violations as f64),
    );

    let zero = Amplitude::new(0.0, 0.0);
    let one = Amplitude::new(1.0, 0.0);
    let id = primed_expansion(&LocalDetectorParams::identity())?;
    let r_id = residual(&LocalDetectorParams::identity())?;
    out.push(
        CheckResult::new(
            "appendix.identity_maps",
            id.c == [[zero, one], [one, zero]] && (r_id - 0.5).abs() < TOL,
            "u = u' = 1: c(1,2) = c(2,1) = 1, others 0, residual 1/2",
        )
        .with("residual", r_id),
    );
    let swap = LocalDetectorParams::new(LinearMap2::swap(), LinearMap2::identity())?;
    let sw = primed_expansion(&swap)?;
    let r_sw = residual(&swap)?;
    out.push(
        CheckResult::new(
            "appendix.swap_map",
            sw.c == [[one, zero], [zero, one]] && (r_sw - 0.5).abs() < TOL,
            "u = swap, u' = 1: c(1,1) = c(2,2) = 1, others 0, residual 1/2",
        )
        .with("residual", r_sw),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut formula_dev: f64 = 0.0;
    let mut scale_dev: f64 = 0.0;
    let mut min_residual = f64::INFINITY;
    for _ in 0..RANDOM_TRIALS {
        let p = crate::appendix::sample_feasible(&mut rng, 0.1);
        let lit = primed_expansion(&p)?;
        let gen = primed_expansion_for(&p, XiIndex::ALL[0])?;
        for (k, l) in CELLS {
            formula_dev = formula_dev.max((lit.at(k, l) - gen.at(k, l) * std::f64::consts::SQRT_2).norm());
        }
        let s = random_state(&mut rng, 2);
        let q = LocalDetectorParams::new(
            p.u.scaled(s.amps()[0] * 3.0),
            p.u_prime.scaled(s.amps()[1] * 3.0 + Amplitude::new(0.5, 0.0)),
        )?;
        let r = residual(&p)?;
        scale_dev = scale_dev.max((r - residual(&q)?).abs());
        for target in XiIndex::ALL {
            min_residual = min_residual.min(crate::appendix::residual_for(&p, target)?);
        }
    }
    out.push(
        CheckResult::new(
            "appendix.formula_vs_contraction",
            formula_dev < TOL,
            format!("{RANDOM_TRIALS} random maps: explicit coefficient formula equals u^T X u'"),
        )
        .with("max_deviation", formula_dev),
    );
    out.push(
        CheckResult::new(
            "appendix.residual_scale_invariance",
            scale_dev < TOL,
            format!("{RANDOM_TRIALS} random maps: residual unchanged under complex rescaling of u and u'"),
        )
        .with("max_deviation", scale_dev),
    );
    out.push(
        CheckResult::new(
            "appendix.random_maps_residual_positive",
            min_residual > 0.0,
            "no random invertible local detector isolates a single branch of any xi(j)",
        )
        .with("min_residual", min_residual),
    );
    Ok(out)
}

fn search(options: &RunOptions) -> Result<Vec<CheckResult>> {
    let cfg = SearchConfig::new(options.seed, options.restarts, options.det_floor);
    let rep = search_local(&cfg)?;
    let feasible = rep.det_u_abs >= cfg.det_floor && rep.det_u_prime_abs >= cfg.det_floor;
    let recomputed = residual(&rep.best_params)?;
    let family = near_singular_family_residual(cfg.det_floor);
    let base = CheckResult::new(
        "search.best_residual_positive",
        rep.best_residual > 0.0 && feasible,
        format!(
            "best residual over {} restarts with |det| >= {} is {}",
            rep.restarts,
            fmt_sig(cfg.det_floor, PROBABILITY_DIGITS),
            fmt_sig(rep.best_residual, PROBABILITY_DIGITS)
        ),
    )
    .with("best_residual", rep.best_residual)
    .with("det_floor", cfg.det_floor)
    .with("det_u_abs", rep.det_u_abs)
    .with("det_u_prime_abs", rep.det_u_prime_abs)
    .with("near_singular_family_residual", family)
    .with("restarts", rep.restarts as f64)
    .with("evaluations", rep.evaluations as f64);
    let base = match rep.best_restart {
        Some(i) => base.with("best_restart", i as f64),
        None => base,
    };
    let maps = format!(
        "u = [[{}, {}], [{}, {}]], u' = [[{}, {}], [{}, {}]]",
        fmt_amplitude(rep.best_params.u.entries[0][0]),
        fmt_amplitude(rep.best_params.u.entries[0][1]),
        fmt_amplitude(rep.best_params.u.entries[1][0]),
        fmt_amplitude(rep.best_params.u.entries[1][1]),
        fmt_amplitude(rep.best_params.u_prime.entries[0][0]),
        fmt_amplitude(rep.best_params.u_prime.entries[0][1]),
        fmt_amplitude(rep.best_params.u_prime.entries[1][0]),
        fmt_amplitude(rep.best_params.u_prime.entries[1][1]),
    );
    Ok(vec![
        base,
        CheckResult::new(
            "search.report_consistent",
            (recomputed - rep.best_residual).abs() < TOL,
            format!("reported best point reproduces its residual; {maps}"),
        )
        .with("recomputed_residual", recomputed),
    ])
}

/// Whether `|observed − exact| ≤ 3σ` for a binomial frequency.
pub fn within_three_sigma(observed: f64, exact: f64, runs: u64) -> bool {
    let sigma = (exact * (1.0 - exact) / runs as f64).sqrt();
    (observed - exact).abs() <= 3.0 * sigma
}

fn skip_if_empty(empty: bool, mut r: CheckResult) -> CheckResult {
    if empty {
        r.status = Status::Skipped;
        r.detail = "no runs requested".to_string();
        r.numeric_payload = None;
    }
    r
}

fn ontic(options: &RunOptions) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();

    let mut models = 0usize;
    let mut mismatches = 0usize;
    let mut bad_witnesses = 0usize;
    let mut bad_tables = 0usize;
    for n in 1..=4 {
        let dists = lattice_distributions(n, 4);
        for z in &dists {
            for p in &dists {
                models += 1;
                let m = OnticModel::new(z.clone(), p.clone())?;
                let verdict = feasibility(&m)?;
                if verdict.is_feasible() != (overlap_weight(&m) == 0.0) {
                    mismatches += 1;
                }
                match &verdict {
                    FeasibilityVerdict::Infeasible { witness } => {
                        if !(z.weights()[*witness] > 0.0 && p.weights()[*witness] > 0.0) {
                            bad_witnesses += 1;
                        }
                    }
                    FeasibilityVerdict::Feasible { table } => {
                        if forbidden_constraints(&m)?.iter().any(|c| c.evaluate(table) >= TOL) {
                            bad_tables += 1;
                        }
                    }
                }
            }
        }
    }
    out.push(
        CheckResult::new(
            "ontic.lattice_equivalence",
            mismatches == 0 && bad_witnesses == 0 && bad_tables == 0,
            format!("{models} models on grids N <= 4 with 0.25-step weights: infeasible iff supports overlap"),
        )
        .with("models", models as f64)
        .with("mismatches", mismatches as f64)
        .with("bad_witnesses", bad_witnesses as f64)
        .with("bad_tables", bad_tables as f64),
    );

    let runs = options.runs;
    let disjoint = OnticModel::from_weights(&[1.0, 0.0], &[0.0, 1.0])?;
    let FeasibilityVerdict::Feasible { table } = feasibility(&disjoint)? else {
        return Err(Error::Consistency("disjoint model reported infeasible".into()));
    };
    let est = monte_carlo_violation(&disjoint, &table, runs, options.seed)?;
    out.push(skip_if_empty(
        est.empty,
        CheckResult::new(
            "ontic.monte_carlo.disjoint",
            est.violations == 0,
            format!("disjoint supports with the constructed response table: {} forbidden outcomes in {runs} runs", est.violations),
        )
        .with("frequency", est.frequency)
        .with("exact", 0.0),
    ));

    let point = OnticModel::from_weights(&[1.0], &[1.0])?;
    let uniform = ResponseTable::uniform(1);
    let exact = exact_violation_probability(&point, &uniform)?;
    let est = monte_carlo_violation(&point, &uniform, runs, options.seed)?;
    out.push(skip_if_empty(
        est.empty,
        CheckResult::new(
            "ontic.monte_carlo.shared_point",
            !est.empty && within_three_sigma(est.frequency, exact, runs),
            format!("shared point mass with uniform responses: frequency within 3 sigma of {exact} over {runs} runs"),
        )
        .with("frequency", est.frequency)
        .with("exact", exact),
    ));

    if let Some(m) = &options.model {
        out.extend(ontic_model_checks(m, options)?);
    }
    Ok(out)
}

fn ontic_model_checks(m: &OnticModel, options: &RunOptions) -> Result<Vec<CheckResult>> {
    let overlap = overlap_weight(m);
    let verdict = feasibility(m)?;
    let mut out = Vec::new();
    let (response, detail, ok) = match &verdict {
        FeasibilityVerdict::Infeasible { witness } => {
            let ok = overlap > 0.0 && m.mu_zero.weights()[*witness] > 0.0 && m.mu_plus.weights()[*witness] > 0.0;
            (
                ResponseTable::uniform(m.size()),
                format!("infeasible: {} has positive weight under both preparations", m.grid.labels()[*witness]),
                ok,
            )
        }
        FeasibilityVerdict::Feasible { table } => {
            let worst = forbidden_constraints(m)?.iter().map(|c| c.evaluate(table)).fold(0.0, f64::max);
            (table.clone(), "feasible: supports are disjoint".to_string(), overlap == 0.0 && worst < TOL)
        }
    };
    out.push(
        CheckResult::new("ontic.model.verdict", ok, detail)
            .with("grid_size", m.size() as f64)
            .with("overlap_weight", overlap),
    );

    let exact = exact_violation_probability(m, &response)?;
    let est = monte_carlo_violation(m, &response, options.runs, options.seed)?;
    let consistent = if est.empty { true } else { within_three_sigma(est.frequency, exact, est.runs) };
    let which = if verdict.is_feasible() { "constructed" } else { "uniform" };
    out.push(skip_if_empty(
        est.empty,
        CheckResult::new(
            "ontic.model.monte_carlo",
            consistent,
            format!("{which} response table: {} forbidden outcomes in {} runs", est.violations, est.runs),
        )
        .with("frequency", est.frequency)
        .with("exact", exact),
    ));
    Ok(out)
}
