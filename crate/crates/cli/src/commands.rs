//! Subcommand bodies. Each returns its stdout text; errors carry the exit
//! code of the contract (1 invalid input, 2 no closed form, 3 limit).

use std::collections::hash_map::RandomState;
use std::hash::{BuildHasher, Hasher};

use alignment_core::model::{Atom, Domain, Family, GameSpec, MixedStrategy, PureStrategy, Solution};
use alignment_core::oracle::{
    build_payoff_matrix, discretize_continuous, solve_matrix_game, verify_solution, GridOptions,
    MatrixGameSolution, OracleLimits, PayoffMatrix, VerifyOptions,
};
use alignment_core::rational::{canonical, int, parse_rational, to_f64, Rational};
use alignment_core::simulate::estimate_payoff;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::document::{
    game_spec_to_json, render, report_to_json, simulation_to_json, solution_to_json, DocumentError,
};

/// Overrides the oracle's cell limit (`|rows| · |cols|`).
pub const MAX_CELLS_ENV: &str = "ALIGNMENT_ORACLE_MAX_CELLS";

pub const EXIT_INVALID: u8 = 1;
pub const EXIT_NO_CLOSED_FORM: u8 = 2;
pub const EXIT_LIMIT: u8 = 3;
/// `verify` ran but the solution was not certified.
pub const EXIT_NOT_VERIFIED: u8 = 4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("no closed form; try `oracle` ({0})")]
    NoClosedForm(String),
    #[error("{0}")]
    Limit(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::NoClosedForm(_) => EXIT_NO_CLOSED_FORM,
            CliError::Limit(_) => EXIT_LIMIT,
        }
    }
}

impl From<alignment_core::Error> for CliError {
    fn from(e: alignment_core::Error) -> Self {
        match e {
            alignment_core::Error::NoClosedForm(detail) => CliError::NoClosedForm(detail),
            alignment_core::Error::LimitExceeded(_) => CliError::Limit(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<DocumentError> for CliError {
    fn from(e: DocumentError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Command output and the exit code to finish with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub code: u8,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output { stdout, code: 0 }
    }
}

pub fn parse_number(text: &str, name: &str) -> Result<Rational> {
    parse_rational(text).map_err(|e| CliError::Invalid(format!("{name}: {e}")))
}

/// Default limits, with the cell limit taken from [`MAX_CELLS_ENV`] when set.
pub fn limits_from_env() -> Result<OracleLimits> {
    let mut limits = OracleLimits::default();
    if let Ok(text) = std::env::var(MAX_CELLS_ENV) {
        let cells: usize = text
            .trim()
            .parse()
            .map_err(|_| CliError::Invalid(format!("{MAX_CELLS_ENV}={text:?} is not a cell count")))?;
        limits.max_cells = cells;
        limits.max_exact_cells = limits.max_exact_cells.min(cells);
    }
    Ok(limits)
}

fn grid_options(step: Option<&Rational>) -> Result<GridOptions> {
    let options = match step {
        Some(step) => GridOptions::with_step(step.clone()),
        None => GridOptions::default(),
    };
    Ok(options)
}

pub fn solve(spec: &GameSpec) -> Result<Output> {
    let solution = alignment_core::solve(spec)?;
    Ok(Output::ok(render(&solution_to_json(spec, &solution))))
}

/// Verifies `solution`, or the closed-form solution when none is given.
/// Tolerance defaults to 0 for finite games and 1e-6 on the grid.
pub fn verify(
    spec: &GameSpec,
    solution: Option<Solution>,
    tolerance: Option<Rational>,
    grid: Option<Rational>,
    limits: OracleLimits,
) -> Result<Output> {
    let solution = match solution {
        Some(s) => s,
        None => alignment_core::solve(spec)?,
    };
    let tolerance = tolerance.unwrap_or_else(|| match spec.domain {
        Domain::Finite(_) => Rational::zero(),
        _ => Rational::new(1.into(), 1_000_000.into()),
    });
    let options = VerifyOptions {
        limits,
        grid: grid_options(grid.as_ref())?,
    };
    let report = verify_solution(spec, &solution, &tolerance, &options)?;
    let mut doc = report_to_json(&report);
    doc["provenance"] = solution.provenance.0.clone().into();
    Ok(Output {
        stdout: render(&doc),
        code: if report.passed { 0 } else { EXIT_NOT_VERIFIED },
    })
}

/// Whether the environment marks a CI run.
pub fn ci_mode() -> bool {
    std::env::var("CI").is_ok_and(|v| !v.is_empty() && v != "0" && !v.eq_ignore_ascii_case("false"))
}

pub fn simulate(spec: &GameSpec, trials: u64, seed: Option<u64>) -> Result<Output> {
    let seed = match seed {
        Some(seed) => seed,
        None if ci_mode() => {
            return Err(CliError::Invalid("--seed is required when CI is set".into()));
        }
        None => RandomState::new().build_hasher().finish(),
    };
    if trials == 0 {
        return Err(CliError::Invalid("--trials must be positive".into()));
    }
    let solution = alignment_core::solve(spec)?;
    let result = estimate_payoff(spec, &solution.hider, &solution.searcher, trials, seed)?;
    Ok(Output::ok(render(&simulation_to_json(&result, &solution.value))))
}

/// A parameter that `sweep` can vary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SweepParam {
    /// Hider length; the searcher's moves with it when they start equal.
    Alpha,
    /// Searcher length; the hider's moves with it when they start equal.
    Beta,
    /// Cardinality of the hider (or, failing that, the searcher); tied
    /// across both sides when they start equal.
    K,
    /// Cost of one location (one-based); its penalty follows when equal.
    Cost(usize),
}

impl SweepParam {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "alpha" => Ok(SweepParam::Alpha),
            "beta" => Ok(SweepParam::Beta),
            "k" => Ok(SweepParam::K),
            _ => match text.strip_prefix("cost:").map(str::parse::<usize>) {
                Some(Ok(j)) if j >= 1 => Ok(SweepParam::Cost(j)),
                _ => Err(CliError::Invalid(format!(
                    "parameter {text:?} is not sweepable; use alpha, beta, k or cost:J"
                ))),
            },
        }
    }

    /// The template with this parameter set to `x`.
    pub fn apply(&self, template: &GameSpec, x: &Rational) -> Result<GameSpec> {
        let mut spec = template.clone();
        let unsupported = |what: &str| CliError::Invalid(format!("cannot sweep {what} on this game"));
        match self {
            SweepParam::Alpha | SweepParam::Beta => {
                let (own, other) = if *self == SweepParam::Alpha {
                    (&mut spec.hider, &mut spec.searcher)
                } else {
                    (&mut spec.searcher, &mut spec.hider)
                };
                let name = if *self == SweepParam::Alpha { "alpha" } else { "beta" };
                let Family::FixedLength(current) = own.clone() else {
                    return Err(unsupported(name));
                };
                if *other == Family::FixedLength(current) {
                    *other = Family::FixedLength(x.clone());
                }
                *own = Family::FixedLength(x.clone());
            }
            SweepParam::K => {
                if !x.is_integer() || x.is_negative() {
                    return Err(CliError::Invalid(format!("k = {} is not a cardinality", canonical(x))));
                }
                let k = x
                    .to_integer()
                    .to_usize()
                    .ok_or_else(|| CliError::Invalid(format!("k = {} is too large", canonical(x))))?;
                match (spec.hider.cardinality(), spec.searcher.cardinality()) {
                    (Some(h), Some(s)) if h == s => {
                        spec.hider = Family::FixedCardinality(k);
                        spec.searcher = Family::FixedCardinality(k);
                    }
                    (Some(_), _) => spec.hider = Family::FixedCardinality(k),
                    (None, Some(_)) => spec.searcher = Family::FixedCardinality(k),
                    (None, None) => return Err(unsupported("k")),
                }
            }
            SweepParam::Cost(j) => {
                let (Some(costs), Some(penalties)) = (spec.profile.costs(), spec.profile.penalties()) else {
                    return Err(unsupported("a location cost"));
                };
                if *j > costs.len() {
                    return Err(CliError::Invalid(format!("cost:{j} names a location outside 1..={}", costs.len())));
                }
                let mut costs = costs.to_vec();
                let mut penalties = penalties.to_vec();
                if costs[j - 1] == penalties[j - 1] {
                    penalties[j - 1] = x.clone();
                }
                costs[j - 1] = x.clone();
                spec.profile = alignment_core::model::CostProfile::discrete(costs, penalties)?;
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// `steps` evenly spaced points from `from` to `to`, both included.
pub fn sweep_points(from: &Rational, to: &Rational, steps: usize) -> Result<Vec<Rational>> {
    match steps {
        0 => Err(CliError::Invalid("--steps must be positive".into())),
        1 => Ok(vec![from.clone()]),
        _ => {
            let delta = (to - from) / int(steps as i64 - 1);
            Ok((0..steps).map(|i| from + &delta * int(i as i64)).collect())
        }
    }
}

/// CSV with header `param,value,provenance`, one row per point in order.
pub fn sweep(template: &GameSpec, param: &SweepParam, points: &[Rational]) -> Result<Output> {
    let rows = points
        .par_iter()
        .map(|x| {
            let spec = param.apply(template, x)?;
            let solution = alignment_core::solve(&spec).map_err(|e| match CliError::from(e) {
                CliError::NoClosedForm(detail) => {
                    CliError::NoClosedForm(format!("at {} = {}: {detail}", param_name(param), canonical(x)))
                }
                other => other,
            })?;
            Ok((to_f64(x), to_f64(&solution.value), solution.provenance.0))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut writer = csv::Writer::from_writer(Vec::new());
    let csv_error = |e: csv::Error| CliError::Invalid(format!("writing CSV: {e}"));
    writer.write_record(["param", "value", "provenance"]).map_err(csv_error)?;
    for (x, value, provenance) in rows {
        writer
            .write_record([x.to_string(), value.to_string(), provenance])
            .map_err(csv_error)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Invalid(format!("writing CSV: {e}")))?;
    Ok(Output::ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields")))
}

fn param_name(param: &SweepParam) -> String {
    match param {
        SweepParam::Alpha => "alpha".into(),
        SweepParam::Beta => "beta".into(),
        SweepParam::K => "k".into(),
        SweepParam::Cost(j) => format!("cost:{j}"),
    }
}

fn label(strategy: &PureStrategy) -> String {
    match strategy {
        PureStrategy::Subset(s) => s.to_string(),
        PureStrategy::Arc(a) => format!("{}:{}", canonical(a.start()), canonical(a.length())),
    }
}

/// The payoff matrix as CSV: a corner cell, column labels, then one row
/// per hider strategy. Subsets print as `{1,3}`, arcs as `start:length`.
pub fn matrix_csv(matrix: &PayoffMatrix) -> Result<String> {
    let csv_error = |e: csv::Error| CliError::Invalid(format!("writing CSV: {e}"));
    let mut writer = csv::Writer::from_writer(Vec::new());
    let header = std::iter::once("hider\\searcher".to_string()).chain(matrix.cols.iter().map(label));
    writer.write_record(header).map_err(csv_error)?;
    for (i, row) in matrix.rows.iter().enumerate() {
        let cells = (0..matrix.cols.len()).map(|j| canonical(&matrix.entry(i, j)));
        writer
            .write_record(std::iter::once(label(row)).chain(cells))
            .map_err(csv_error)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Invalid(format!("writing CSV: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields"))
}

/// Solves the game as a matrix game: the finite game itself, or a
/// continuous game with both lengths fixed, discretized on a `grid` of
/// starts. Returns the solution document and the matrix.
pub fn oracle(spec: &GameSpec, grid: Option<Rational>, limits: OracleLimits) -> Result<(Output, PayoffMatrix)> {
    let (matrix, provenance) = match spec.domain {
        Domain::Finite(_) => (build_payoff_matrix(spec, &limits)?, "matrix-game LP oracle".to_string()),
        Domain::Circle | Domain::Interval => {
            let step = grid.unwrap_or_else(|| Rational::new(1.into(), 100.into()));
            let matrix = discretize_continuous(spec, &step, &limits)?;
            (matrix, format!("matrix-game LP oracle, grid {}", canonical(&step)))
        }
    };
    let MatrixGameSolution::Exact(exact) = solve_matrix_game(&matrix, &limits)? else {
        return Err(CliError::Limit(format!(
            "{}×{} is too large for an exact solution",
            matrix.rows.len(),
            matrix.cols.len()
        )));
    };
    let pack = |labels: &[PureStrategy], mix: &[Rational]| {
        MixedStrategy::atoms(
            labels
                .iter()
                .zip(mix)
                .filter(|(_, p)| !p.is_zero())
                .map(|(strategy, p)| Atom {
                    strategy: strategy.clone(),
                    probability: p.clone(),
                })
                .collect(),
        )
    };
    let solution = Solution::new(
        pack(&matrix.rows, &exact.row_mix)?,
        pack(&matrix.cols, &exact.col_mix)?,
        exact.value.clone(),
        provenance,
    );
    let mut doc = solution_to_json(spec, &solution);
    doc["game"] = game_spec_to_json(spec);
    Ok((Output::ok(render(&doc)), matrix))
}
