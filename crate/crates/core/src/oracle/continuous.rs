//! Grid search and discretization for the circle and interval games.
//!
//! Expected payoffs against a uniformly placed arc are computed by
//! integrating the overlap over the opponent's start. The overlap is
//! piecewise linear in that start, so the trapezoid rule over its
//! breakpoints is exact up to rounding.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{check_cells, OracleLimits, PayoffMatrix};
use crate::error::{Error, Result};
use crate::model::{arc_payoff, circle_overlap, Arc, Domain, Family, GameSpec, MixedStrategy, PureStrategy};
use crate::rational::{canonical, ratio, to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridOptions {
    /// Spacing of candidate starts and lengths; must be `1/N`.
    pub step: Rational,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions { step: ratio(1, 1000) }
    }
}

impl GridOptions {
    pub fn with_step(step: Rational) -> Self {
        GridOptions { step }
    }

    fn points(&self) -> Result<usize> {
        grid_points(&self.step)
    }
}

fn grid_points(step: &Rational) -> Result<usize> {
    if !step.is_positive() || !step.numer().is_one() {
        return Err(Error::InvalidArgument(format!(
            "grid step {} is not of the form 1/N",
            canonical(step)
        )));
    }
    step.denom()
        .to_usize()
        .filter(|&n| n <= 1_000_000)
        .ok_or_else(|| Error::LimitExceeded(format!("grid step {}", canonical(step))))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResponses {
    /// Smallest payoff any candidate searcher arc achieves against the hider.
    pub hider_guarantee: f64,
    /// Largest payoff any candidate hider arc achieves against the searcher.
    pub searcher_guarantee: f64,
    /// The hider arc attaining `searcher_guarantee`.
    pub hider_best_response: PureStrategy,
    /// The searcher arc attaining `hider_guarantee`.
    pub searcher_best_response: PureStrategy,
}

/// A mixed arc strategy reduced to `f64` for fast evaluation.
enum ArcMix {
    Atoms(Vec<(f64, f64, f64)>),
    Uniform(f64),
}

impl ArcMix {
    fn new(strategy: &MixedStrategy) -> Result<Self> {
        match strategy {
            MixedStrategy::UniformStartArc { length } => Ok(ArcMix::Uniform(to_f64(length))),
            MixedStrategy::Atoms(atoms) => atoms
                .iter()
                .map(|atom| match &atom.strategy {
                    PureStrategy::Arc(arc) => {
                        let (start, length) = arc.to_f64();
                        Ok((start, length, to_f64(&atom.probability)))
                    }
                    PureStrategy::Subset(_) => {
                        Err(Error::InvalidStrategy("subset in a continuous game".into()))
                    }
                })
                .collect::<Result<_>>()
                .map(ArcMix::Atoms),
            MixedStrategy::IndependentInclusion { .. } => Err(Error::InvalidStrategy(
                "power-set strategy in a continuous game".into(),
            )),
        }
    }

    /// Start points at which a best response may change shape: the
    /// opponent's arc endpoints, and those endpoints shifted back by the
    /// responding arc's length.
    fn breakpoints(&self) -> Vec<f64> {
        match self {
            ArcMix::Atoms(atoms) => atoms.iter().flat_map(|&(s, l, _)| [s, s + l]).collect(),
            ArcMix::Uniform(_) => Vec::new(),
        }
    }

    fn lengths(&self) -> Vec<f64> {
        match self {
            ArcMix::Atoms(atoms) => atoms.iter().map(|&(_, l, _)| l).collect(),
            ArcMix::Uniform(l) => vec![*l],
        }
    }
}

struct Rates {
    circle: bool,
    c: f64,
    pi: f64,
}

impl Rates {
    /// Expected payoff of the pure arc `(start, length)` played by the hider
    /// (`as_hider`) or the searcher against `mix`.
    fn against(&self, as_hider: bool, start: f64, length: f64, mix: &ArcMix) -> f64 {
        let pure = |other_start: f64, other_length: f64| {
            if as_hider {
                arc_payoff(self.circle, self.c, self.pi, start, length, other_start, other_length)
            } else {
                arc_payoff(self.circle, self.c, self.pi, other_start, other_length, start, length)
            }
        };
        match mix {
            ArcMix::Atoms(atoms) => atoms.iter().map(|&(s, l, p)| p * pure(s, l)).sum(),
            ArcMix::Uniform(other_length) => {
                let overlap = uniform_overlap(start, length, *other_length);
                let (lh, ls) = if as_hider {
                    (length, *other_length)
                } else {
                    (*other_length, length)
                };
                self.c * (ls - overlap) + self.pi * (lh - overlap)
            }
        }
    }
}

/// `∫₀¹ |[a, a+la] ∩ [b, b+lb]| db` on the circle.
fn uniform_overlap(a: f64, la: f64, lb: f64) -> f64 {
    let mut knots = vec![0.0, 1.0];
    for x in [a - lb, a, a + la - lb, a + la] {
        knots.push(x.rem_euclid(1.0));
    }
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let overlap = |b: f64| circle_overlap(a, la, b.rem_euclid(1.0), lb);
    knots
        .windows(2)
        .map(|w| 0.5 * (w[1] - w[0]) * (overlap(w[0]) + overlap(w[1])))
        .sum()
}

/// Candidate pure arcs for one side: grid starts and lengths, plus starts
/// aligned with the opponent's support endpoints.
fn candidates(
    domain: Domain,
    family: &Family,
    opponent: &ArcMix,
    points: usize,
) -> Result<Vec<(f64, f64)>> {
    let step = 1.0 / points as f64;
    let mut lengths: Vec<f64> = match family {
        Family::FixedLength(x) => vec![to_f64(x)],
        Family::FreeLength => {
            let mut ls: Vec<f64> = (0..=points).map(|i| i as f64 * step).collect();
            ls.extend(opponent.lengths());
            ls
        }
        _ => return Err(Error::InvalidSpec("subset family in a continuous game".into())),
    };
    lengths.sort_by(f64::total_cmp);
    lengths.dedup();

    let grid: Vec<f64> = (0..=points).map(|i| i as f64 * step).collect();
    let anchors = opponent.breakpoints();
    let mut out = Vec::new();
    for &length in &lengths {
        let mut starts: Vec<f64> = grid.clone();
        for &x in &anchors {
            starts.push(x);
            starts.push(x - length);
        }
        let starts: Vec<f64> = match domain {
            Domain::Circle => {
                let mut s: Vec<f64> = starts.into_iter().map(|x| x.rem_euclid(1.0)).collect();
                s.retain(|&x| x < 1.0);
                s
            }
            _ => {
                let last = 1.0 - length;
                let mut s: Vec<f64> = starts
                    .into_iter()
                    .filter(|&x| x >= -1e-12 && x <= last + 1e-12)
                    .map(|x| x.clamp(0.0, last.max(0.0)))
                    .collect();
                s.push(last.max(0.0));
                s
            }
        };
        let mut starts = starts;
        starts.sort_by(f64::total_cmp);
        starts.dedup();
        out.extend(starts.into_iter().map(|s| (s, length)));
    }
    Ok(out)
}

fn to_arc(domain: Domain, start: f64, length: f64) -> PureStrategy {
    let exact = |x: f64| Rational::from_float(x).unwrap_or_else(Rational::zero);
    let (start, length) = (exact(start), exact(length));
    let arc = Arc::for_domain(domain, start.clone(), length.clone())
        .or_else(|_| Arc::for_domain(domain, Rational::one() - &length, length))
        .expect("candidate arcs lie in the domain");
    PureStrategy::Arc(arc)
}

/// Best responses of both players over the candidate grid.
pub fn grid_best_responses(
    spec: &GameSpec,
    hider: &MixedStrategy,
    searcher: &MixedStrategy,
    options: &GridOptions,
) -> Result<GridResponses> {
    let points = options.points()?;
    let (c, pi) = spec
        .profile
        .rates()
        .ok_or_else(|| Error::InvalidSpec("grid search needs a continuous game".into()))?;
    let rates = Rates {
        circle: spec.domain == Domain::Circle,
        c: to_f64(c),
        pi: to_f64(pi),
    };
    let h_mix = ArcMix::new(hider)?;
    let s_mix = ArcMix::new(searcher)?;

    let mut searcher_best = (f64::INFINITY, (0.0, 0.0));
    for (start, length) in candidates(spec.domain, &spec.searcher, &h_mix, points)? {
        let payoff = rates.against(false, start, length, &h_mix);
        if payoff < searcher_best.0 {
            searcher_best = (payoff, (start, length));
        }
    }
    let mut hider_best = (f64::NEG_INFINITY, (0.0, 0.0));
    for (start, length) in candidates(spec.domain, &spec.hider, &s_mix, points)? {
        let payoff = rates.against(true, start, length, &s_mix);
        if payoff > hider_best.0 {
            hider_best = (payoff, (start, length));
        }
    }
    Ok(GridResponses {
        hider_guarantee: searcher_best.0,
        searcher_guarantee: hider_best.0,
        hider_best_response: to_arc(spec.domain, hider_best.1 .0, hider_best.1 .1),
        searcher_best_response: to_arc(spec.domain, searcher_best.1 .0, searcher_best.1 .1),
    })
}

/// Finite approximation of a continuous game in which both lengths are
/// fixed: pure strategies are arcs starting on the grid `{i·step}` (and,
/// on the interval, the last admissible start `1 − length`). Entries are
/// exact.
pub fn discretize_continuous(
    spec: &GameSpec,
    step: &Rational,
    limits: &OracleLimits,
) -> Result<PayoffMatrix> {
    let points = grid_points(step)?;
    let (c, pi) = spec
        .profile
        .rates()
        .ok_or_else(|| Error::InvalidSpec("discretization needs a continuous game".into()))?;
    let (Some(alpha), Some(beta)) = (spec.hider.fixed_length(), spec.searcher.fixed_length()) else {
        return Err(Error::InvalidSpec(
            "discretization needs fixed lengths for both players".into(),
        ));
    };
    let arcs = |length: &Rational| -> Result<Vec<Arc>> {
        let mut starts: Vec<Rational> = (0..points)
            .map(|i| step * Rational::from_integer(i.into()))
            .collect();
        if spec.domain == Domain::Interval {
            let last = Rational::one() - length;
            starts.retain(|s| s <= &last);
            if starts.last() != Some(&last) {
                starts.push(last);
            }
        }
        starts
            .into_iter()
            .map(|s| Arc::for_domain(spec.domain, s, length.clone()))
            .collect()
    };
    let rows = arcs(alpha)?;
    let cols = arcs(beta)?;
    check_cells(rows.len(), cols.len(), limits)?;

    // Arc endpoints are multiples of step and of the lengths' denominators.
    let unit = [step, alpha, beta]
        .iter()
        .fold(num_bigint::BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled = |x: &Rational| (x * &unit).to_integer().to_i64();
    let ok = [alpha, beta].iter().all(|x| scaled(x).is_some()) && unit.to_i64().is_some();
    if !ok {
        return Err(Error::LimitExceeded("grid denominators too large".into()));
    }
    let u = unit.to_i64().unwrap();
    let circle = spec.domain == Domain::Circle;
    // Overlaps are computed on integers in units of 1/u and rescaled once.
    let entries: Vec<Vec<Rational>> = rows
        .iter()
        .map(|h| {
            let (hs, hl) = (scaled(h.start()).unwrap(), scaled(h.length()).unwrap());
            cols.iter()
                .map(|s| {
                    let (ss, sl) = (scaled(s.start()).unwrap(), scaled(s.length()).unwrap());
                    let overlap = if circle {
                        int_line_overlap(hs, hl, ss - u, sl)
                            + int_line_overlap(hs, hl, ss, sl)
                            + int_line_overlap(hs, hl, ss + u, sl)
                    } else {
                        int_line_overlap(hs, hl, ss, sl)
                    };
                    let (commission, omission) = (sl - overlap, hl - overlap);
                    (c * Rational::from_integer(commission.into())
                        + pi * Rational::from_integer(omission.into()))
                        / Rational::from_integer(unit.clone())
                })
                .collect()
        })
        .collect();
    PayoffMatrix::from_entries(
        rows.into_iter().map(PureStrategy::Arc).collect(),
        cols.into_iter().map(PureStrategy::Arc).collect(),
        entries,
    )
}

fn int_line_overlap(a: i64, la: i64, b: i64, lb: i64) -> i64 {
    ((a + la).min(b + lb) - a.max(b)).max(0)
}
