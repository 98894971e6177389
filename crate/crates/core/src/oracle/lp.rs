//! Zero-sum matrix games solved as linear programs.
//!
//! The game matrix `A` (row player maximizes) is shifted to a strictly
//! positive matrix `B` and the column player's problem
//!
//! ```text
//! maximize Σ w_j   subject to   B w ≤ 1,  w ≥ 0
//! ```
//!
//! is solved by the simplex method starting from the all-slack basis. With
//! optimum `z`, the value of `B` is `1/z`, the column mix is `w/z` and the
//! row mix is the slack columns' dual prices divided by `z`.
//!
//! The exact solver keeps an integer tableau and uses fraction-free
//! (Bareiss) pivoting: every entry is the true tableau value times the
//! current basis determinant, and each update divides exactly by the
//! previous pivot. No rational normalization happens inside the loop.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// Consecutive degenerate pivots after which Dantzig's rule yields to
/// Bland's rule, which cannot cycle.
const DEGENERATE_SWITCH: usize = 32;

const FLOAT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactGameSolution {
    pub value: Rational,
    pub row_mix: Vec<Rational>,
    pub col_mix: Vec<Rational>,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloatGameSolution {
    pub value: f64,
    pub row_mix: Vec<f64>,
    pub col_mix: Vec<f64>,
    pub pivots: usize,
}

/// Solves the game exactly. `entries` must be rectangular and non-empty.
pub fn solve_exact(entries: &[Vec<Rational>]) -> ExactGameSolution {
    let scale = entries
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let numerators: Vec<Vec<BigInt>> = entries
        .iter()
        .map(|row| row.iter().map(|x| (x * &scale).to_integer()).collect())
        .collect();
    solve_exact_scaled(&numerators, &scale)
}

/// Exact solve of the game whose entries are `numerators[i][j] / scale`.
pub fn solve_exact_scaled(numerators: &[Vec<BigInt>], scale: &BigInt) -> ExactGameSolution {
    let rows = numerators.len();
    let cols = numerators[0].len();
    let min = numerators.iter().flatten().min().cloned().unwrap_or_default();
    // B = numerators − min + 1 ≥ 1 elementwise; value(A) = (value(B) + min − 1)/scale.
    let offset = &min - BigInt::one();

    let width = cols + rows + 1;
    let rhs = width - 1;
    let mut tableau: Vec<Vec<BigInt>> = Vec::with_capacity(rows + 1);
    for (i, row) in numerators.iter().enumerate() {
        let mut line = vec![BigInt::zero(); width];
        for (j, x) in row.iter().enumerate() {
            line[j] = x - &offset;
        }
        line[cols + i] = BigInt::one();
        line[rhs] = BigInt::one();
        tableau.push(line);
    }
    let mut objective = vec![BigInt::zero(); width];
    for x in objective.iter_mut().take(cols) {
        *x = -BigInt::one();
    }
    tableau.push(objective);

    let mut basis: Vec<usize> = (cols..cols + rows).collect();
    let mut det = BigInt::one();
    let mut pivots = 0;
    let mut degenerate_run = 0;

    loop {
        let obj = &tableau[rows];
        let entering = if degenerate_run < DEGENERATE_SWITCH {
            (0..rhs)
                .filter(|&j| obj[j].is_negative())
                .min_by(|&a, &b| obj[a].cmp(&obj[b]).then(a.cmp(&b)))
        } else {
            (0..rhs).find(|&j| obj[j].is_negative())
        };
        let Some(col) = entering else { break };

        // Ratio test by cross-multiplication; ties go to the smallest basic index.
        let mut leaving: Option<usize> = None;
        for i in 0..rows {
            if !tableau[i][col].is_positive() {
                continue;
            }
            leaving = match leaving {
                None => Some(i),
                Some(best) => {
                    let lhs = &tableau[i][rhs] * &tableau[best][col];
                    let rhs_val = &tableau[best][rhs] * &tableau[i][col];
                    match lhs.cmp(&rhs_val) {
                        std::cmp::Ordering::Less => Some(i),
                        std::cmp::Ordering::Equal if basis[i] < basis[best] => Some(i),
                        _ => Some(best),
                    }
                }
            };
        }
        // B > 0 keeps the problem bounded, so some row always qualifies.
        let row = leaving.expect("positive game matrix gives a bounded LP");
        degenerate_run = if tableau[row][rhs].is_zero() {
            degenerate_run + 1
        } else {
            0
        };

        let pivot_row = tableau[row].clone();
        let pivot = pivot_row[col].clone();
        for (i, line) in tableau.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let factor = line[col].clone();
            for (j, x) in line.iter_mut().enumerate() {
                let mut updated = &*x * &pivot;
                if !factor.is_zero() && !pivot_row[j].is_zero() {
                    updated -= &factor * &pivot_row[j];
                }
                *x = exact_div(updated, &det);
            }
        }
        det = pivot;
        basis[row] = col;
        pivots += 1;
    }

    let obj = &tableau[rows];
    let z_scaled = obj[rhs].clone();
    // value(B) = 1/z = det / z_scaled
    let value_b = Rational::new(det.clone(), z_scaled.clone());
    let value = (value_b + Rational::from_integer(offset)) / Rational::from_integer(scale.clone());

    let mut col_mix = vec![Rational::zero(); cols];
    for (i, &var) in basis.iter().enumerate() {
        if var < cols {
            col_mix[var] = Rational::new(tableau[i][rhs].clone(), z_scaled.clone());
        }
    }
    let row_mix = (0..rows)
        .map(|i| Rational::new(obj[cols + i].clone(), z_scaled.clone()))
        .collect();

    ExactGameSolution {
        value,
        row_mix,
        col_mix,
        pivots,
    }
}

fn exact_div(numer: BigInt, denom: &BigInt) -> BigInt {
    if denom.is_one() {
        return numer;
    }
    let (quot, rem) = numer.div_rem(denom);
    debug_assert!(rem.sign() == Sign::NoSign, "fraction-free pivot must divide exactly");
    quot
}

/// Floating-point counterpart of [`solve_exact`] for matrices too large for
/// exact pivoting.
pub fn solve_float(entries: &[Vec<f64>]) -> FloatGameSolution {
    let rows = entries.len();
    let cols = entries[0].len();
    let min = entries.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
    let max = entries.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = (max - min).max(1.0);
    // B = (A − min)/span + 1 lies in [1, 2].
    let width = cols + rows + 1;
    let rhs = width - 1;
    let mut tableau: Vec<Vec<f64>> = Vec::with_capacity(rows + 1);
    for (i, row) in entries.iter().enumerate() {
        let mut line = vec![0.0; width];
        for (j, &x) in row.iter().enumerate() {
            line[j] = (x - min) / span + 1.0;
        }
        line[cols + i] = 1.0;
        line[rhs] = 1.0;
        tableau.push(line);
    }
    let mut objective = vec![0.0; width];
    for x in objective.iter_mut().take(cols) {
        *x = -1.0;
    }
    tableau.push(objective);

    let mut basis: Vec<usize> = (cols..cols + rows).collect();
    let mut pivots = 0;
    let mut degenerate_run = 0;
    let max_pivots = 50 * (rows + cols) + 1000;

    while pivots < max_pivots {
        let obj = &tableau[rows];
        let entering = if degenerate_run < DEGENERATE_SWITCH {
            (0..rhs)
                .filter(|&j| obj[j] < -FLOAT_EPS)
                .min_by(|&a, &b| obj[a].total_cmp(&obj[b]).then(a.cmp(&b)))
        } else {
            (0..rhs).find(|&j| obj[j] < -FLOAT_EPS)
        };
        let Some(col) = entering else { break };
        let mut leaving: Option<(usize, f64)> = None;
        for i in 0..rows {
            let a = tableau[i][col];
            if a <= FLOAT_EPS {
                continue;
            }
            let ratio = tableau[i][rhs] / a;
            leaving = match leaving {
                Some((best, r)) if r < ratio - FLOAT_EPS => Some((best, r)),
                Some((best, r)) if (r - ratio).abs() <= FLOAT_EPS && basis[best] < basis[i] => {
                    Some((best, r))
                }
                _ => Some((i, ratio)),
            };
        }
        let Some((row, ratio)) = leaving else { break };
        degenerate_run = if ratio <= FLOAT_EPS { degenerate_run + 1 } else { 0 };

        let pivot = tableau[row][col];
        for x in tableau[row].iter_mut() {
            *x /= pivot;
        }
        let pivot_row = tableau[row].clone();
        for (i, line) in tableau.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let factor = line[col];
            if factor == 0.0 {
                continue;
            }
            for (x, p) in line.iter_mut().zip(&pivot_row) {
                *x -= factor * p;
            }
        }
        basis[row] = col;
        pivots += 1;
    }

    let obj = &tableau[rows];
    let z = obj[rhs];
    let value = (1.0 / z - 1.0) * span + min;
    let mut col_mix = vec![0.0; cols];
    for (i, &var) in basis.iter().enumerate() {
        if var < cols {
            col_mix[var] = (tableau[i][rhs] / z).max(0.0);
        }
    }
    let row_mix = (0..rows).map(|i| (obj[cols + i] / z).max(0.0)).collect();
    FloatGameSolution {
        value,
        row_mix: normalize(row_mix),
        col_mix: normalize(col_mix),
        pivots,
    }
}

fn normalize(mut mix: Vec<f64>) -> Vec<f64> {
    let total: f64 = mix.iter().sum();
    if total > 0.0 {
        for x in &mut mix {
            *x /= total;
        }
    }
    mix
}
