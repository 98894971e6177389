//! Independent numeric verification.
//!
//! Nothing here calls into the closed-form solvers: payoff matrices are
//! materialized from the pure-strategy payoff alone, matrix games are solved
//! by linear programming, and best responses are found by enumeration (finite
//! games) or grid search (continuous games).

mod continuous;
pub mod lp;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use continuous::{discretize_continuous, grid_best_responses, GridOptions, GridResponses};
pub use lp::{ExactGameSolution, FloatGameSolution};

use crate::error::{Error, Result};
use crate::model::{Domain, Family, GameSpec, MixedStrategy, PureStrategy, Side, Solution, Subset};
use crate::rational::{canonical, to_f64, Rational};

/// Size limits for anything the oracle enumerates or pivots on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    /// Largest `|rows| · |cols|` the oracle will materialize.
    pub max_cells: usize,
    /// Largest `|rows| · |cols|` solved with exact pivoting; bigger games
    /// fall back to floating point.
    pub max_exact_cells: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_cells: 1 << 20,
            max_exact_cells: 1 << 20,
        }
    }
}

/// Tolerance of the floating-point LP fallback.
pub const FLOAT_LP_TOLERANCE: f64 = 1e-9;

/// Pure-strategy payoffs of a finite game. Entry `(i, j)` is what the
/// Hider playing row `i` receives from the Searcher playing column `j`.
/// Entries are stored as integer numerators over one common `scale`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PayoffMatrix {
    pub rows: Vec<PureStrategy>,
    pub cols: Vec<PureStrategy>,
    numerators: Vec<Vec<BigInt>>,
    scale: BigInt,
}

impl PayoffMatrix {
    pub fn from_entries(
        rows: Vec<PureStrategy>,
        cols: Vec<PureStrategy>,
        entries: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        if rows.is_empty() || cols.is_empty() {
            return Err(Error::InvalidArgument("empty payoff matrix".into()));
        }
        if entries.len() != rows.len() || entries.iter().any(|r| r.len() != cols.len()) {
            return Err(Error::InvalidArgument(
                "payoff entries do not match the label lists".into(),
            ));
        }
        let scale = entries
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let numerators = entries
            .iter()
            .map(|row| row.iter().map(|x| (x * &scale).to_integer()).collect())
            .collect();
        Ok(PayoffMatrix {
            rows,
            cols,
            numerators,
            scale,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    pub fn entry(&self, row: usize, col: usize) -> Rational {
        Rational::new(self.numerators[row][col].clone(), self.scale.clone())
    }

    pub fn entries(&self) -> Vec<Vec<Rational>> {
        (0..self.rows.len())
            .map(|i| (0..self.cols.len()).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        let scale = self.scale.to_f64().unwrap_or(f64::NAN);
        self.numerators
            .iter()
            .map(|row| row.iter().map(|x| x.to_f64().unwrap_or(f64::NAN) / scale).collect())
            .collect()
    }

    /// Expected payoff of each column against the row mix `x`.
    pub fn column_payoffs(&self, x: &[Rational]) -> Vec<Rational> {
        let (numers, denom) = common_denominator(x);
        (0..self.cols.len())
            .map(|j| {
                let sum: BigInt = numers
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| !p.is_zero())
                    .map(|(i, p)| p * &self.numerators[i][j])
                    .sum();
                Rational::new(sum, &denom * &self.scale)
            })
            .collect()
    }

    /// Expected payoff of each row against the column mix `y`.
    pub fn row_payoffs(&self, y: &[Rational]) -> Vec<Rational> {
        let (numers, denom) = common_denominator(y);
        self.numerators
            .iter()
            .map(|row| {
                let sum: BigInt = row
                    .iter()
                    .zip(&numers)
                    .filter(|(_, q)| !q.is_zero())
                    .map(|(a, q)| a * q)
                    .sum();
                Rational::new(sum, &denom * &self.scale)
            })
            .collect()
    }

    pub fn row_index(&self) -> HashMap<&PureStrategy, usize> {
        self.rows.iter().enumerate().map(|(i, s)| (s, i)).collect()
    }

    pub fn col_index(&self) -> HashMap<&PureStrategy, usize> {
        self.cols.iter().enumerate().map(|(j, s)| (s, j)).collect()
    }
}

fn common_denominator(values: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let denom = values.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let numers = values
        .iter()
        .map(|x| x.numer() * (&denom / x.denom()))
        .collect();
    (numers, denom)
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of pure strategies in a finite family.
pub fn family_size(family: &Family, n: usize) -> Result<usize> {
    match family {
        Family::PowerSet => Ok(1usize << n),
        Family::FixedCardinality(k) => Ok(binomial(n, *k)),
        Family::Explicit(sets) => Ok(sets.len()),
        _ => Err(Error::InvalidSpec("continuous family has no enumeration".into())),
    }
}

/// Members of a finite family in canonical order: ascending bitmask for the
/// power set, lexicographic index order for cardinality families, listed
/// order (duplicates dropped) for explicit families.
pub fn enumerate_family(family: &Family, n: usize) -> Result<Vec<Subset>> {
    match family {
        Family::PowerSet => (0..(1u32 << n)).map(|bits| Subset::new(n, bits)).collect(),
        Family::FixedCardinality(k) => {
            let k = *k;
            if k > n {
                return Err(Error::InvalidSpec(format!("cardinality {k} exceeds n = {n}")));
            }
            let mut out = Vec::with_capacity(binomial(n, k));
            let mut current: Vec<usize> = (0..k).collect();
            loop {
                out.push(Subset::from_indices(n, current.iter().copied())?);
                // Advance to the next combination in lexicographic order.
                let Some(pos) = (0..k).rev().find(|&i| current[i] < n - k + i) else {
                    break;
                };
                current[pos] += 1;
                for i in pos + 1..k {
                    current[i] = current[i - 1] + 1;
                }
            }
            Ok(out)
        }
        Family::Explicit(sets) => {
            let mut out: Vec<Subset> = Vec::with_capacity(sets.len());
            for s in sets {
                if s.ground_set() != n {
                    return Err(Error::InvalidSpec(format!("{s} is not a subset of [{n}]")));
                }
                if !out.contains(s) {
                    out.push(*s);
                }
            }
            Ok(out)
        }
        _ => Err(Error::InvalidSpec("continuous family has no enumeration".into())),
    }
}

fn check_cells(rows: usize, cols: usize, limits: &OracleLimits) -> Result<()> {
    match rows.checked_mul(cols) {
        Some(cells) if cells <= limits.max_cells => Ok(()),
        _ => Err(Error::LimitExceeded(format!(
            "{rows}×{cols} payoff matrix exceeds {} cells",
            limits.max_cells
        ))),
    }
}

/// Materializes the payoff matrix of a finite game.
pub fn build_payoff_matrix(spec: &GameSpec, limits: &OracleLimits) -> Result<PayoffMatrix> {
    let Domain::Finite(n) = spec.domain else {
        return Err(Error::InvalidSpec(
            "continuous game: discretize it before building a matrix".into(),
        ));
    };
    check_cells(
        family_size(&spec.hider, n)?,
        family_size(&spec.searcher, n)?,
        limits,
    )?;
    let hider = enumerate_family(&spec.hider, n)?;
    let searcher = enumerate_family(&spec.searcher, n)?;

    let costs = spec.profile.costs().unwrap();
    let penalties = spec.profile.penalties().unwrap();
    let scale = costs
        .iter()
        .chain(penalties)
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let to_scaled = |x: &Rational| (x * &scale).to_integer();
    let cost_numers: Vec<BigInt> = costs.iter().map(to_scaled).collect();
    let penalty_numers: Vec<BigInt> = penalties.iter().map(to_scaled).collect();

    let numerators = hider
        .iter()
        .map(|&h| {
            searcher
                .iter()
                .map(|&s| {
                    let commission = s.difference(h);
                    let omission = h.difference(s);
                    let mut total = BigInt::zero();
                    for j in 0..n {
                        if commission & (1 << j) != 0 {
                            total += &cost_numers[j];
                        } else if omission & (1 << j) != 0 {
                            total += &penalty_numers[j];
                        }
                    }
                    total
                })
                .collect()
        })
        .collect();
    Ok(PayoffMatrix {
        rows: hider.into_iter().map(PureStrategy::Subset).collect(),
        cols: searcher.into_iter().map(PureStrategy::Subset).collect(),
        numerators,
        scale,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixGameSolution {
    Exact(ExactGameSolution),
    Float(FloatGameSolution),
}

impl MatrixGameSolution {
    pub fn value_f64(&self) -> f64 {
        match self {
            MatrixGameSolution::Exact(sol) => to_f64(&sol.value),
            MatrixGameSolution::Float(sol) => sol.value,
        }
    }

    pub fn exact(&self) -> Option<&ExactGameSolution> {
        match self {
            MatrixGameSolution::Exact(sol) => Some(sol),
            MatrixGameSolution::Float(_) => None,
        }
    }
}

/// Solves the matrix game, exactly when it fits `limits.max_exact_cells`.
pub fn solve_matrix_game(matrix: &PayoffMatrix, limits: &OracleLimits) -> Result<MatrixGameSolution> {
    let (rows, cols) = matrix.dims();
    check_cells(rows, cols, limits)?;
    if rows * cols <= limits.max_exact_cells {
        Ok(MatrixGameSolution::Exact(lp::solve_exact_scaled(
            &matrix.numerators,
            &matrix.scale,
        )))
    } else {
        Ok(MatrixGameSolution::Float(lp::solve_float(&matrix.to_f64())))
    }
}

/// A number that is exact when the computation producing it was.
#[derive(Debug, Clone, PartialEq)]
pub enum Number {
    Exact(Rational),
    Approx(f64),
}

impl Number {
    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Exact(r) => to_f64(r),
            Number::Approx(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Number::Exact(r) => Some(r),
            Number::Approx(_) => None,
        }
    }
}

impl std::fmt::Display for Number {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Number::Exact(r) => write!(f, "{}", canonical(r)),
            Number::Approx(x) => write!(f, "{x}"),
        }
    }
}

/// Distribution over the enumerated strategies of one side.
fn mix_vector(
    strategy: &MixedStrategy,
    index: &HashMap<&PureStrategy, usize>,
    len: usize,
    side: Side,
) -> Result<Vec<Rational>> {
    let mut mix = vec![Rational::zero(); len];
    for atom in strategy.expand()? {
        let Some(&i) = index.get(&atom.strategy) else {
            return Err(Error::FamilyMismatch {
                side: side.name(),
                detail: "atom is not an admissible pure strategy".into(),
            });
        };
        mix[i] += atom.probability;
    }
    Ok(mix)
}

/// Best pure response of `side` to the opponent's mixed strategy, with its
/// expected payoff. Ties go to the first strategy in canonical order.
pub fn best_response(
    spec: &GameSpec,
    opponent: &MixedStrategy,
    side: Side,
    limits: &OracleLimits,
) -> Result<(PureStrategy, Rational)> {
    let Domain::Finite(_) = spec.domain else {
        return Err(Error::InvalidSpec(
            "continuous best responses come from the grid search".into(),
        ));
    };
    let matrix = build_payoff_matrix(spec, limits)?;
    let payoffs = match side {
        Side::Hider => {
            let y = mix_vector(opponent, &matrix.col_index(), matrix.cols.len(), Side::Searcher)?;
            matrix.row_payoffs(&y)
        }
        Side::Searcher => {
            let x = mix_vector(opponent, &matrix.row_index(), matrix.rows.len(), Side::Hider)?;
            matrix.column_payoffs(&x)
        }
    };
    let labels = match side {
        Side::Hider => &matrix.rows,
        Side::Searcher => &matrix.cols,
    };
    let best = extremal(&payoffs, side == Side::Hider);
    Ok((labels[best].clone(), payoffs[best].clone()))
}

fn extremal(values: &[Rational], maximize: bool) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        let better = if maximize { v > &values[best] } else { v < &values[best] };
        if better {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub claimed_value: Rational,
    /// LP value of the (finite) game; absent for continuous games.
    pub oracle_value: Option<Number>,
    /// `min_S P(h, S)`.
    pub hider_guarantee: Number,
    /// `max_H P(H, s)`.
    pub searcher_guarantee: Number,
    /// `claimed − min_S P(h, S)`.
    pub hider_gap: Number,
    /// `max_H P(H, s) − claimed`.
    pub searcher_gap: Number,
    pub hider_best_response: PureStrategy,
    pub searcher_best_response: PureStrategy,
    pub tolerance: Rational,
    pub passed: bool,
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub limits: OracleLimits,
    pub grid: GridOptions,
}

/// Certifies `solution` for `spec`: both best-response gaps must be within
/// `tolerance` and, for finite games, the claimed value must match the LP
/// value. Tolerance zero demands exact equality.
pub fn verify_solution(
    spec: &GameSpec,
    solution: &Solution,
    tolerance: &Rational,
    options: &VerifyOptions,
) -> Result<VerificationReport> {
    if tolerance.is_negative() {
        return Err(Error::InvalidArgument("negative tolerance".into()));
    }
    solution
        .hider
        .check_family(spec.domain, &spec.hider, Side::Hider)?;
    solution
        .searcher
        .check_family(spec.domain, &spec.searcher, Side::Searcher)?;
    match spec.domain {
        Domain::Finite(_) => verify_finite(spec, solution, tolerance, &options.limits),
        Domain::Circle | Domain::Interval => {
            let responses = grid_best_responses(spec, &solution.hider, &solution.searcher, &options.grid)?;
            let claimed = to_f64(&solution.value);
            let hider_gap = claimed - responses.hider_guarantee;
            let searcher_gap = responses.searcher_guarantee - claimed;
            let tol = to_f64(tolerance);
            Ok(VerificationReport {
                claimed_value: solution.value.clone(),
                oracle_value: None,
                hider_guarantee: Number::Approx(responses.hider_guarantee),
                searcher_guarantee: Number::Approx(responses.searcher_guarantee),
                hider_gap: Number::Approx(hider_gap),
                searcher_gap: Number::Approx(searcher_gap),
                hider_best_response: responses.hider_best_response,
                searcher_best_response: responses.searcher_best_response,
                tolerance: tolerance.clone(),
                passed: hider_gap <= tol && searcher_gap <= tol,
            })
        }
    }
}

fn verify_finite(
    spec: &GameSpec,
    solution: &Solution,
    tolerance: &Rational,
    limits: &OracleLimits,
) -> Result<VerificationReport> {
    let matrix = build_payoff_matrix(spec, limits)?;
    let x = mix_vector(&solution.hider, &matrix.row_index(), matrix.rows.len(), Side::Hider)?;
    let y = mix_vector(&solution.searcher, &matrix.col_index(), matrix.cols.len(), Side::Searcher)?;

    let against_hider = matrix.column_payoffs(&x);
    let against_searcher = matrix.row_payoffs(&y);
    let searcher_best = extremal(&against_hider, false);
    let hider_best = extremal(&against_searcher, true);
    let hider_guarantee = against_hider[searcher_best].clone();
    let searcher_guarantee = against_searcher[hider_best].clone();
    let hider_gap = &solution.value - &hider_guarantee;
    let searcher_gap = &searcher_guarantee - &solution.value;

    let oracle = solve_matrix_game(&matrix, limits)?;
    let (oracle_value, value_ok) = match &oracle {
        MatrixGameSolution::Exact(sol) => {
            let ok = (&sol.value - &solution.value).abs() <= *tolerance;
            (Number::Exact(sol.value.clone()), ok)
        }
        MatrixGameSolution::Float(sol) => {
            let tol = to_f64(tolerance).max(FLOAT_LP_TOLERANCE);
            let ok = (sol.value - to_f64(&solution.value)).abs() <= tol;
            (Number::Approx(sol.value), ok)
        }
    };
    let passed = &hider_gap <= tolerance && &searcher_gap <= tolerance && value_ok;
    Ok(VerificationReport {
        claimed_value: solution.value.clone(),
        oracle_value: Some(oracle_value),
        hider_guarantee: Number::Exact(hider_guarantee),
        searcher_guarantee: Number::Exact(searcher_guarantee),
        hider_gap: Number::Exact(hider_gap),
        searcher_gap: Number::Exact(searcher_gap),
        hider_best_response: matrix.rows[hider_best].clone(),
        searcher_best_response: matrix.cols[searcher_best].clone(),
        tolerance: tolerance.clone(),
        passed,
    })
}

/// Solves a finite game purely numerically and packages the LP optimum as
/// a [`Solution`].
pub fn solve_by_oracle(spec: &GameSpec, limits: &OracleLimits) -> Result<(Solution, MatrixGameSolution)> {
    let matrix = build_payoff_matrix(spec, limits)?;
    let oracle = solve_matrix_game(&matrix, limits)?;
    let MatrixGameSolution::Exact(exact) = &oracle else {
        return Err(Error::LimitExceeded(
            "game too large for an exact oracle solution".into(),
        ));
    };
    let pack = |labels: &[PureStrategy], mix: &[Rational]| {
        MixedStrategy::atoms(
            labels
                .iter()
                .zip(mix)
                .filter(|(_, p)| !p.is_zero())
                .map(|(s, p)| crate::model::Atom {
                    strategy: s.clone(),
                    probability: p.clone(),
                })
                .collect(),
        )
    };
    let solution = Solution::new(
        pack(&matrix.rows, &exact.row_mix)?,
        pack(&matrix.cols, &exact.col_mix)?,
        exact.value.clone(),
        "matrix-game LP oracle",
    );
    Ok((solution, oracle))
}
