//! Random-restart derivative-free search for a near-deterministic local
//! product detector.
//!
//! The sixteen real parameters are the real and imaginary parts of `u` and
//! `u′`. Each map is normalized to unit largest-entry magnitude before the
//! determinant floor is applied. Local descent is Nelder–Mead with the
//! dimension-adaptive coefficients; it only compares objective values, so
//! infeasible points are ranked as `1 + violation`, above every feasible
//! residual.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::exact::XI_INTEGER_FORMS;
use super::maps::{LinearMap2, LocalDetectorParams};
use crate::error::{Error, Result};
use crate::qcore::Amplitude;
use crate::states::XiIndex;

pub const DEFAULT_DET_FLOOR: f64 = 0.1;
pub const DEFAULT_RESTARTS: usize = 10_000;

/// Largest `|det|` attainable by a 2×2 map with entries of magnitude ≤ 1.
pub const MAX_NORMALIZED_DET: f64 = 2.0;

const DIM: usize = 16;
const MAX_EVALS: usize = 4_000;
const SIMPLEX_STEP: f64 = 0.1;
const X_TOL: f64 = 1e-10;
const REINITS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchConfig {
    pub seed: u64,
    pub restarts: usize,
    pub det_floor: f64,
    pub target: XiIndex,
}

impl SearchConfig {
    pub fn new(seed: u64, restarts: usize, det_floor: f64) -> Self {
        Self { seed, restarts, det_floor, target: XiIndex::ALL[0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchReport {
    pub seed: u64,
    pub target: XiIndex,
    pub det_floor: f64,
    pub restarts: usize,
    pub best_residual: f64,
    /// `None` when no restart ran and the report echoes the seed point.
    pub best_restart: Option<usize>,
    pub best_params: LocalDetectorParams,
    pub det_u_abs: f64,
    pub det_u_prime_abs: f64,
    pub evaluations: usize,
}

struct Objective {
    floor: f64,
    form: [[f64; 2]; 2],
}

impl Objective {
    fn new(floor: f64, target: XiIndex) -> Self {
        let x = XI_INTEGER_FORMS[target.position()];
        Self { floor, form: x.map(|row| row.map(|v| v as f64)) }
    }

    fn eval(&self, x: &[f64; DIM]) -> f64 {
        let p = params_from(x).normalized();
        let violation = (self.floor - p.u.det().norm()).max(0.0) + (self.floor - p.u_prime.det().norm()).max(0.0);
        if violation > 0.0 {
            return 1.0 + violation;
        }
        self.residual(&p)
    }

    /// Residual of `uᵀ X u′`; scale-invariant, so the unnormalized integer
    /// form of ξ is used directly.
    fn residual(&self, p: &LocalDetectorParams) -> f64 {
        let (u, v) = (&p.u.entries, &p.u_prime.entries);
        let mut total = 0.0;
        let mut largest: f64 = 0.0;
        for k in 0..2 {
            for l in 0..2 {
                let mut c = Amplitude::new(0.0, 0.0);
                for j in 0..2 {
                    for m in 0..2 {
                        if self.form[j][m] != 0.0 {
                            c += u[j][k] * v[m][l] * self.form[j][m];
                        }
                    }
                }
                let w = c.norm_sqr();
                total += w;
                largest = largest.max(w);
            }
        }
        if total == 0.0 {
            return 1.0;
        }
        ((total - largest) / total).max(0.0)
    }
}

fn params_from(x: &[f64; DIM]) -> LocalDetectorParams {
    let map = |o: usize| {
        LinearMap2::new([
            [Amplitude::new(x[o], x[o + 4]), Amplitude::new(x[o + 1], x[o + 5])],
            [Amplitude::new(x[o + 2], x[o + 6]), Amplitude::new(x[o + 3], x[o + 7])],
        ])
    };
    LocalDetectorParams { u: map(0), u_prime: map(8) }
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// Uniform entries in `[-1, 1]`, rejected until both normalized maps clear
/// the floor.
pub fn sample_feasible(rng: &mut impl Rng, det_floor: f64) -> LocalDetectorParams {
    let obj = Objective::new(det_floor, XiIndex::ALL[0]);
    loop {
        let x = random_point(rng);
        if obj.eval(&x) <= 1.0 {
            return params_from(&x).normalized();
        }
    }
}

fn random_point(rng: &mut impl Rng) -> [f64; DIM] {
    std::array::from_fn(|_| rng.random_range(-1.0..=1.0))
}

fn feasible_start(rng: &mut impl Rng, obj: &Objective) -> [f64; DIM] {
    loop {
        let x = random_point(rng);
        if obj.eval(&x) <= 1.0 {
            return x;
        }
    }
}

struct Descent {
    best: [f64; DIM],
    value: f64,
    evals: usize,
}

fn nelder_mead(obj: &Objective, start: [f64; DIM]) -> Descent {
    let n = DIM as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / n, 0.75 - 1.0 / (2.0 * n), 1.0 - 1.0 / n);
    let mut evals = 0;
    let mut f = |x: &[f64; DIM]| {
        evals += 1;
        obj.eval(x)
    };

    let mut best = start;
    let mut best_value = f(&best);

    for _ in 0..=REINITS {
        let mut simplex: Vec<([f64; DIM], f64)> = Vec::with_capacity(DIM + 1);
        simplex.push((best, best_value));
        for i in 0..DIM {
            let mut x = best;
            x[i] += SIMPLEX_STEP;
            let v = f(&x);
            simplex.push((x, v));
        }

        let budget = MAX_EVALS / (REINITS + 1);
        let mut used = 0;
        while used < budget {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let size = simplex[1..]
                .iter()
                .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if size < X_TOL {
                break;
            }

            let mut centroid = [0.0; DIM];
            for (x, _) in &simplex[..DIM] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / n;
                }
            }
            let worst = simplex[DIM];
            let along = |t: f64| -> [f64; DIM] { std::array::from_fn(|i| centroid[i] + t * (worst.0[i] - centroid[i])) };

            let xr = along(-alpha);
            let fr = f(&xr);
            used += 1;
            if fr < simplex[0].1 {
                let xe = along(-alpha * beta);
                let fe = f(&xe);
                used += 1;
                simplex[DIM] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[DIM - 1].1 {
                simplex[DIM] = (xr, fr);
            } else {
                let (xc, fc) = if fr < worst.1 {
                    let xc = along(-alpha * gamma);
                    (xc, f(&xc))
                } else {
                    let xc = along(gamma);
                    (xc, f(&xc))
                };
                used += 1;
                if fc < worst.1.min(fr) {
                    simplex[DIM] = (xc, fc);
                } else {
                    let x0 = simplex[0].0;
                    for (x, v) in simplex[1..].iter_mut() {
                        for i in 0..DIM {
                            x[i] = x0[i] + delta * (x[i] - x0[i]);
                        }
                        *v = f(x);
                        used += 1;
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[0].1 < best_value {
            best = simplex[0].0;
            best_value = simplex[0].1;
        }
    }

    Descent { best, value: best_value, evals }
}

/// Minimizes the residual over local product detectors whose normalized maps
/// both satisfy `|det| ≥ det_floor`. Deterministic for a given config;
/// restarts run in parallel and ties go to the lowest restart index.
pub fn search_local(config: &SearchConfig) -> Result<SearchReport> {
    let floor = config.det_floor;
    if !(floor > 0.0 && floor <= MAX_NORMALIZED_DET) {
        return Err(Error::InvalidArgument(format!(
            "det_floor must be in (0, {MAX_NORMALIZED_DET}], got {floor}"
        )));
    }
    let obj = Objective::new(floor, config.target);

    let finish = |x: &[f64; DIM], value: f64, best_restart, evaluations| {
        let best_params = params_from(x).normalized();
        SearchReport {
            seed: config.seed,
            target: config.target,
            det_floor: floor,
            restarts: config.restarts,
            best_residual: value,
            best_restart,
            det_u_abs: best_params.u.det().norm(),
            det_u_prime_abs: best_params.u_prime.det().norm(),
            best_params,
            evaluations,
        }
    };

    if config.restarts == 0 {
        let x = feasible_start(&mut restart_rng(config.seed, 0), &obj);
        let v = obj.eval(&x);
        return Ok(finish(&x, v, None, 1));
    }

    let (index, descent, evaluations) = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let start = feasible_start(&mut restart_rng(config.seed, r), &obj);
            let d = nelder_mead(&obj, start);
            let evals = d.evals;
            (r, d, evals)
        })
        .reduce_with(|a, b| {
            let evals = a.2 + b.2;
            let keep_a = match a.1.value.total_cmp(&b.1.value) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => a.0 < b.0,
            };
            if keep_a {
                (a.0, a.1, evals)
            } else {
                (b.0, b.1, evals)
            }
        })
        .expect("at least one restart");

    Ok(finish(&descent.best, descent.value, Some(index), evaluations))
}

/// Residual reached by the explicit family
/// `u = [[1, s], [1, −s]]`, `u′ = [[1, −s], [1, s]]` with `s = floor/2`,
/// both at `|det| = floor`: `floor⁴ / (16 + floor⁴)`. An upper bound on the
/// constrained minimum for `ξ(1)`.
pub fn near_singular_family_residual(det_floor: f64) -> f64 {
    let f4 = det_floor.powi(4);
    f4 / (16.0 + f4)
}

pub fn near_singular_family(det_floor: f64) -> LocalDetectorParams {
    let s = det_floor / 2.0;
    LocalDetectorParams {
        u: LinearMap2::from_real([[1.0, s], [1.0, -s]]),
        u_prime: LinearMap2::from_real([[1.0, -s], [1.0, s]]),
    }
}
