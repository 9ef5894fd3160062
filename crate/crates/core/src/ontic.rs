//! Finite ontological models for the two preparations `|0⟩` and `|+⟩`.
//!
//! A compound preparation samples `(λA, λB)` independently from the two
//! single-system distributions. A response table gives the probability of
//! each ξ outcome for every compound ontic state. The model is feasible when
//! some response table gives every forbidden outcome zero probability.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::TOL;
use crate::states::{forbidden_table, Preparation, SingleChoice, XiIndex};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LambdaGrid {
    labels: Vec<String>,
}

impl LambdaGrid {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidArgument("lambda grid must have at least one point".into()));
        }
        Ok(Self { labels: (1..=size).map(|i| format!("lambda{i}")).collect() })
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// Probability distribution over the λ grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpistemicDistribution {
    weights: Vec<f64>,
}

impl EpistemicDistribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("no weights".into()));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution(format!("weight {i} is {}", weights[i])));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > TOL {
            return Err(Error::InvalidDistribution(format!("weights sum to {sum}")));
        }
        Ok(Self { weights })
    }

    pub fn point_mass(size: usize, at: usize) -> Result<Self> {
        if at >= size {
            return Err(Error::InvalidArgument(format!("point {at} outside grid of size {size}")));
        }
        let mut w = vec![0.0; size];
        w[at] = 1.0;
        Self::new(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.weights.iter().enumerate().filter(|(_, w)| **w > 0.0).map(|(i, _)| i)
    }
}

/// Outcome probabilities for each compound ontic state `(λA, λB)`, stored
/// row-major with `λA` slowest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseTable {
    size: usize,
    rows: Vec<[f64; 4]>,
}

impl ResponseTable {
    pub fn new(size: usize, rows: Vec<[f64; 4]>) -> Result<Self> {
        if rows.len() != size * size {
            return Err(Error::DimensionMismatch { left: rows.len(), right: size * size });
        }
        for (i, row) in rows.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) || (sum - 1.0).abs() > TOL {
                return Err(Error::InvalidDistribution(format!("response row {i} is {row:?}")));
            }
        }
        Ok(Self { size, rows })
    }

    pub fn uniform(size: usize) -> Self {
        Self { size, rows: vec![[0.25; 4]; size * size] }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn row(&self, lambda_a: usize, lambda_b: usize) -> &[f64; 4] {
        &self.rows[lambda_a * self.size + lambda_b]
    }

    pub fn prob(&self, lambda_a: usize, lambda_b: usize, outcome: XiIndex) -> f64 {
        self.row(lambda_a, lambda_b)[outcome.position()]
    }

    pub fn rows(&self) -> &[[f64; 4]] {
        &self.rows
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OnticModel {
    pub grid: LambdaGrid,
    pub mu_zero: EpistemicDistribution,
    pub mu_plus: EpistemicDistribution,
    pub response: Option<ResponseTable>,
}

impl OnticModel {
    pub fn new(mu_zero: EpistemicDistribution, mu_plus: EpistemicDistribution) -> Result<Self> {
        if mu_zero.len() != mu_plus.len() {
            return Err(Error::DimensionMismatch { left: mu_zero.len(), right: mu_plus.len() });
        }
        Ok(Self { grid: LambdaGrid::new(mu_zero.len())?, mu_zero, mu_plus, response: None })
    }

    pub fn from_weights(mu_zero: &[f64], mu_plus: &[f64]) -> Result<Self> {
        Self::new(EpistemicDistribution::new(mu_zero.to_vec())?, EpistemicDistribution::new(mu_plus.to_vec())?)
    }

    pub fn with_response(mut self, response: ResponseTable) -> Result<Self> {
        if response.size() != self.size() {
            return Err(Error::DimensionMismatch { left: response.size(), right: self.size() });
        }
        self.response = Some(response);
        Ok(self)
    }

    pub fn size(&self) -> usize {
        self.grid.size()
    }

    pub fn distribution(&self, choice: SingleChoice) -> &EpistemicDistribution {
        match choice {
            SingleChoice::Zero => &self.mu_zero,
            SingleChoice::Plus => &self.mu_plus,
        }
    }

    /// Reads the tabular format: a header `N=<int>` followed by the `|0⟩`
    /// and `|+⟩` weight lines, each with `N` decimals separated by
    /// whitespace or commas. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (hline, header) = lines.next().ok_or(Error::ModelParse { line: 1, message: "empty model file".into() })?;
        let n_text = header
            .strip_prefix("N=")
            .or_else(|| header.strip_prefix("N ="))
            .ok_or_else(|| Error::ModelParse { line: hline, message: format!("expected `N=<int>`, found `{header}`") })?;
        let n: usize = n_text
            .trim()
            .parse()
            .map_err(|_| Error::ModelParse { line: hline, message: format!("bad grid size `{n_text}`") })?;
        if n == 0 {
            return Err(Error::ModelParse { line: hline, message: "grid size must be positive".into() });
        }

        let mut read_weights = |name: &str| -> Result<(usize, Vec<f64>)> {
            let (line, text) = lines
                .next()
                .ok_or(Error::ModelParse { line: hline, message: format!("missing {name} weight line") })?;
            let values = text
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<f64>().map_err(|_| Error::ModelParse { line, message: format!("bad number `{t}`") }))
                .collect::<Result<Vec<_>>>()?;
            if values.len() != n {
                return Err(Error::ModelParse { line, message: format!("expected {n} weights, found {}", values.len()) });
            }
            Ok((line, values))
        };
        let (zl, zero) = read_weights("mu_zero")?;
        let (pl, plus) = read_weights("mu_plus")?;
        if let Some((line, extra)) = lines.next() {
            return Err(Error::ModelParse { line, message: format!("unexpected content `{extra}`") });
        }
        let wrap = |line: usize| move |e: Error| Error::ModelParse { line, message: e.to_string() };
        let mu_zero = EpistemicDistribution::new(zero).map_err(wrap(zl))?;
        let mu_plus = EpistemicDistribution::new(plus).map_err(wrap(pl))?;
        Self::new(mu_zero, mu_plus)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::ModelParse { line: 0, message: format!("{}: {e}", path.display()) })?;
        Self::parse(&text)
    }

    /// Writes the tabular format read by [`OnticModel::parse`].
    pub fn to_text(&self) -> String {
        let line = |d: &EpistemicDistribution| d.weights().iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ");
        format!("N={}\n{}\n{}\n", self.size(), line(&self.mu_zero), line(&self.mu_plus))
    }
}

impl FromStr for OnticModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// `Σ_λ min(μ₀(λ), μ₊(λ))`.
pub fn overlap_weight(m: &OnticModel) -> f64 {
    m.mu_zero.weights().iter().zip(m.mu_plus.weights()).map(|(a, b)| a.min(*b)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstraintTerm {
    pub lambda_a: usize,
    pub lambda_b: usize,
    pub coefficient: f64,
}

/// `Σ coefficient · response[(λA, λB)][outcome] = 0` for one preparation.
/// Only cells with positive coefficient are listed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constraint {
    pub preparation: Preparation,
    pub outcome: XiIndex,
    pub terms: Vec<ConstraintTerm>,
}

impl Constraint {
    pub fn evaluate(&self, response: &ResponseTable) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coefficient * response.prob(t.lambda_a, t.lambda_b, self.outcome))
            .sum()
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P({} | {}) = 0 over {} cells", self.outcome, self.preparation, self.terms.len())
    }
}

pub fn forbidden_constraints(m: &OnticModel) -> Result<Vec<Constraint>> {
    let table = forbidden_table()?;
    Ok(Preparation::ALL
        .iter()
        .map(|&p| {
            let mu_a = m.distribution(p.a_choice);
            let mu_b = m.distribution(p.b_choice);
            let terms = mu_a
                .support()
                .flat_map(|a| {
                    mu_b.support().map(move |b| ConstraintTerm {
                        lambda_a: a,
                        lambda_b: b,
                        coefficient: mu_a.weights()[a] * mu_b.weights()[b],
                    })
                })
                .collect();
            Constraint { preparation: p, outcome: table.get(p), terms }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum FeasibilityVerdict {
    /// `witness` has positive weight under both distributions, so the cell
    /// `(witness, witness)` must give all four outcomes zero probability.
    Infeasible { witness: usize },
    Feasible { table: ResponseTable },
}

impl FeasibilityVerdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityVerdict::Feasible { .. })
    }
}

/// Decides by support analysis whether a response table can meet every
/// forbidden-outcome constraint. "Compatible with both states" is read as
/// strictly positive weight under both distributions.
pub fn feasibility(m: &OnticModel) -> Result<FeasibilityVerdict> {
    let shared = m.mu_zero.support().find(|&l| m.mu_plus.weights()[l] > 0.0);
    if let Some(witness) = shared {
        return Ok(FeasibilityVerdict::Infeasible { witness });
    }

    // Each cell keeps the outcomes no constraint touches; with disjoint
    // supports at most three of the four are ever forced to zero.
    let n = m.size();
    let constraints = forbidden_constraints(m)?;
    let mut allowed = vec![[true; 4]; n * n];
    for c in &constraints {
        for t in &c.terms {
            allowed[t.lambda_a * n + t.lambda_b][c.outcome.position()] = false;
        }
    }
    let rows = allowed
        .iter()
        .map(|mask| {
            let free = mask.iter().filter(|&&a| a).count();
            if free == 0 {
                return Err(Error::Consistency("cell with every outcome forbidden despite disjoint supports".into()));
            }
            Ok(mask.map(|a| if a { 1.0 / free as f64 } else { 0.0 }))
        })
        .collect::<Result<Vec<_>>>()?;
    let table = ResponseTable::new(n, rows)?;
    if let Some(c) = constraints.iter().find(|c| c.evaluate(&table) >= TOL) {
        return Err(Error::Consistency(format!("constructed table violates {c}")));
    }
    Ok(FeasibilityVerdict::Feasible { table })
}

/// Exact probability of a forbidden outcome when the preparation is chosen
/// uniformly at random.
pub fn exact_violation_probability(m: &OnticModel, response: &ResponseTable) -> Result<f64> {
    if response.size() != m.size() {
        return Err(Error::DimensionMismatch { left: response.size(), right: m.size() });
    }
    let total: f64 = forbidden_constraints(m)?.iter().map(|c| c.evaluate(response)).sum();
    Ok(total / 4.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub runs: u64,
    pub violations: u64,
    pub frequency: f64,
    /// Set when `runs == 0`; `frequency` is then reported as 0.
    pub empty: bool,
}

/// Empirical forbidden-outcome frequency. Each run picks a preparation
/// uniformly, samples `λA` and `λB` from the matching distributions and an
/// outcome from the response row.
pub fn monte_carlo_violation(m: &OnticModel, response: &ResponseTable, runs: u64, seed: u64) -> Result<MonteCarloEstimate> {
    if response.size() != m.size() {
        return Err(Error::DimensionMismatch { left: response.size(), right: m.size() });
    }
    if runs == 0 {
        return Ok(MonteCarloEstimate { runs, violations: 0, frequency: 0.0, empty: true });
    }
    let table = forbidden_table()?;
    let sampler = |d: &EpistemicDistribution| {
        WeightedIndex::new(d.weights()).map_err(|e| Error::InvalidDistribution(e.to_string()))
    };
    let zero = sampler(&m.mu_zero)?;
    let plus = sampler(&m.mu_plus)?;
    let rows = response
        .rows()
        .iter()
        .map(|r| WeightedIndex::new(r).map_err(|e| Error::InvalidDistribution(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let pick = |c: SingleChoice| match c {
        SingleChoice::Zero => &zero,
        SingleChoice::Plus => &plus,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    for _ in 0..runs {
        let p = Preparation::ALL[rng.random_range(0..4)];
        let a = pick(p.a_choice).sample(&mut rng);
        let b = pick(p.b_choice).sample(&mut rng);
        let outcome = rows[a * m.size() + b].sample(&mut rng);
        if outcome == table.get(p).position() {
            violations += 1;
        }
    }
    Ok(MonteCarloEstimate { runs, violations, frequency: violations as f64 / runs as f64, empty: false })
}

/// Every distribution over `size` points whose weights are multiples of
/// `1/steps`.
pub fn lattice_distributions(size: usize, steps: usize) -> Vec<EpistemicDistribution> {
    fn fill(remaining: usize, slots: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=remaining {
            prefix.push(k);
            fill(remaining - k, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    if size == 0 || steps == 0 {
        return Vec::new();
    }
    let mut counts = Vec::new();
    fill(steps, size, &mut Vec::with_capacity(size), &mut counts);
    counts
        .into_iter()
        .map(|c| {
            EpistemicDistribution::new(c.iter().map(|&k| k as f64 / steps as f64).collect())
                .expect("lattice weights sum to one")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(z: &[f64], p: &[f64]) -> OnticModel {
        OnticModel::from_weights(z, p).unwrap()
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(overlap_weight(&model(&[1.0, 0.0], &[0.0, 1.0])), 0.0);
        assert_eq!(overlap_weight(&model(&[0.5, 0.5], &[0.5, 0.5])), 1.0);
        assert!((overlap_weight(&model(&[0.7, 0.3, 0.0], &[0.0, 0.3, 0.7])) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn four_constraints() {
        let m = model(&[0.5, 0.5, 0.0], &[0.0, 0.2, 0.8]);
        let cs = forbidden_constraints(&m).unwrap();
        assert_eq!(cs.len(), 4);
        let outcomes: Vec<u8> = cs.iter().map(|c| c.outcome.get()).collect();
        assert_eq!(outcomes, [1, 2, 3, 4]);
    }

    #[test]
    fn single_point_grid_constraints() {
        let m = model(&[1.0], &[1.0]);
        for c in forbidden_constraints(&m).unwrap() {
            assert_eq!(c.terms, vec![ConstraintTerm { lambda_a: 0, lambda_b: 0, coefficient: 1.0 }]);
        }
    }

    #[test]
    fn disjoint_supports_touch_distinct_cells() {
        let m = model(&[1.0, 0.0], &[0.0, 1.0]);
        let cells: Vec<Vec<(usize, usize)>> = forbidden_constraints(&m)
            .unwrap()
            .iter()
            .map(|c| c.terms.iter().map(|t| (t.lambda_a, t.lambda_b)).collect())
            .collect();
        assert_eq!(cells, vec![vec![(0, 0)], vec![(0, 1)], vec![(1, 0)], vec![(1, 1)]]);
    }

    #[test]
    fn feasibility_examples() {
        let v = feasibility(&model(&[0.5, 0.5, 0.0], &[0.0, 0.5, 0.5])).unwrap();
        assert_eq!(v, FeasibilityVerdict::Infeasible { witness: 1 });

        let m = model(&[1.0, 0.0], &[0.0, 1.0]);
        let FeasibilityVerdict::Feasible { table } = feasibility(&m).unwrap() else {
            panic!("disjoint supports must be feasible");
        };
        for c in forbidden_constraints(&m).unwrap() {
            assert!(c.evaluate(&table) < 1e-12);
        }
        assert_eq!(exact_violation_probability(&m, &table).unwrap(), 0.0);

        let point = model(&[1.0], &[1.0]);
        assert_eq!(feasibility(&point).unwrap(), FeasibilityVerdict::Infeasible { witness: 0 });
    }

    #[test]
    fn uniform_response_violation_is_quarter() {
        let m = model(&[1.0], &[1.0]);
        let p = exact_violation_probability(&m, &ResponseTable::uniform(1)).unwrap();
        assert!((p - 0.25).abs() < 1e-15);
    }

    #[test]
    fn monte_carlo_edge_cases() {
        let m = model(&[1.0], &[1.0]);
        let e = monte_carlo_violation(&m, &ResponseTable::uniform(1), 0, 1).unwrap();
        assert!(e.empty);
        assert_eq!(e.frequency, 0.0);
        let a = monte_carlo_violation(&m, &ResponseTable::uniform(1), 1000, 9).unwrap();
        let b = monte_carlo_violation(&m, &ResponseTable::uniform(1), 1000, 9).unwrap();
        assert_eq!(a, b);
        assert!(monte_carlo_violation(&m, &ResponseTable::uniform(2), 10, 1).is_err());
    }

    #[test]
    fn lattice_counts() {
        // compositions of 4 into N parts
        let counts: Vec<usize> = (1..=4).map(|n| lattice_distributions(n, 4).len()).collect();
        assert_eq!(counts, [1, 5, 15, 35]);
    }

    #[test]
    fn distribution_validation() {
        assert!(EpistemicDistribution::new(vec![0.5, 0.4]).is_err());
        assert!(EpistemicDistribution::new(vec![1.5, -0.5]).is_err());
        assert!(EpistemicDistribution::new(vec![]).is_err());
        assert!(ResponseTable::new(1, vec![[0.5, 0.5, 0.5, 0.0]]).is_err());
        assert!(ResponseTable::new(2, vec![[0.25; 4]]).is_err());
        assert!(OnticModel::from_weights(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn parse_model_file() {
        let m: OnticModel = "# comment\nN=3\n0.7 0.3 0\n0, 0.3, 0.7\n".parse().unwrap();
        assert_eq!(m.size(), 3);
        assert_eq!(m.mu_plus.weights(), &[0.0, 0.3, 0.7]);
        let again = OnticModel::parse(&m.to_text()).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("", 1),
            ("M=2\n1 0\n0 1\n", 1),
            ("N=0\n\n", 1),
            ("N=2\n1 0\n", 1),
            ("N=2\n1 0 0\n0 1\n", 2),
            ("N=2\n1 0\n0 x\n", 3),
            ("N=2\n0.5 0.4\n0 1\n", 2),
            ("N=2\n1 0\n0 1\n1 1\n", 4),
        ];
        for (text, line) in cases {
            match OnticModel::parse(text) {
                Err(Error::ModelParse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }
}
