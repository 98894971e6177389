//! Closed-form equilibria of the circle and unit-interval games.
//!
//! Values are exact rationals. Interval games are solved only when the
//! cost and penalty rates agree; their payoffs are then the unit-rate
//! payoffs times the common rate.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{
    uniform_arc_value, Arc, Domain, Family, GameSpec, MixedStrategy, PureStrategy, Side, Solution,
};
use crate::rational::{canonical, int, is_unit_interval, Rational};

/// `β(1 − α)c + α(1 − β)π`, the expected payoff when at least one arc on
/// the circle starts uniformly at random.
pub fn circle_uniform_value(alpha: &Rational, beta: &Rational, c: &Rational, pi: &Rational) -> Result<Rational> {
    for (name, x) in [("alpha", alpha), ("beta", beta)] {
        if !is_unit_interval(x) {
            return Err(Error::InvalidArgument(format!("{name} = {} outside [0, 1]", canonical(x))));
        }
    }
    if !c.is_positive() || !pi.is_positive() {
        return Err(Error::InvalidArgument("rates must be positive".into()));
    }
    Ok(uniform_arc_value(alpha, beta, c, pi))
}

fn pure_arc(domain: Domain, start: Rational, length: Rational) -> Result<MixedStrategy> {
    Ok(MixedStrategy::pure(PureStrategy::Arc(Arc::for_domain(domain, start, length)?)))
}

fn rates(spec: &GameSpec) -> Result<(&Rational, &Rational)> {
    spec.profile
        .rates()
        .ok_or_else(|| Error::InvalidSpec("continuous game needs scalar rates".into()))
}

pub fn solve_circle(spec: &GameSpec) -> Result<Solution> {
    if spec.domain != Domain::Circle {
        return Err(Error::InvalidSpec("not a circle game".into()));
    }
    let (c, pi) = rates(spec)?;
    let total = c + pi;
    let alpha_star = c / &total;
    let beta_star = pi / &total;
    let one = Rational::one();
    let uniform = MixedStrategy::uniform_start_arc;
    let circle_arc = |length: Rational| pure_arc(Domain::Circle, Rational::zero(), length);

    match (&spec.hider, &spec.searcher) {
        (Family::FreeLength, Family::FreeLength) => Ok(Solution::new(
            uniform(alpha_star)?,
            uniform(beta_star)?,
            c * pi / &total,
            "circle, both lengths free",
        )),
        (Family::FixedLength(alpha), Family::FreeLength) => {
            let (searcher, value, what) = if alpha < &alpha_star {
                (circle_arc(Rational::zero())?, alpha * pi, "empty")
            } else {
                (circle_arc(one.clone())?, (&one - alpha) * c, "full")
            };
            Ok(Solution::new(
                uniform(alpha.clone())?,
                searcher,
                value,
                format!("circle, hider length fixed, searcher {what} arc"),
            ))
        }
        (Family::FreeLength, Family::FixedLength(beta)) => {
            let (hider, value, what) = if beta < &beta_star {
                (circle_arc(one.clone())?, (&one - beta) * pi, "full")
            } else {
                (circle_arc(Rational::zero())?, beta * c, "empty")
            };
            Ok(Solution::new(
                hider,
                uniform(beta.clone())?,
                value,
                format!("circle, searcher length fixed, hider {what} arc"),
            ))
        }
        (Family::FixedLength(alpha), Family::FixedLength(beta)) => Ok(Solution::new(
            uniform(alpha.clone())?,
            uniform(beta.clone())?,
            circle_uniform_value(alpha, beta, c, pi)?,
            "circle, both lengths fixed",
        )),
        _ => Err(Error::InvalidSpec("circle game with a subset family".into())),
    }
}

fn interval_rate(c: &Rational, pi: &Rational) -> Result<Rational> {
    if c != pi {
        return Err(Error::NoClosedForm(format!(
            "interval game with cost rate {} and penalty rate {}",
            canonical(c),
            canonical(pi)
        )));
    }
    Ok(c.clone())
}

fn half_mix(first: Arc, second: Arc) -> Result<MixedStrategy> {
    let half = Rational::new(1.into(), 2.into());
    MixedStrategy::arcs(vec![(first, half.clone()), (second, half)])
}

/// Both players free on the interval: each mixes the two halves equally.
pub fn solve_interval_free(c: &Rational, pi: &Rational) -> Result<Solution> {
    let rate = interval_rate(c, pi)?;
    let half = Rational::new(1.into(), 2.into());
    let halves = || half_mix(Arc::interval(Rational::zero(), half.clone())?, Arc::interval(half.clone(), half.clone())?);
    Ok(Solution::new(halves()?, halves()?, &rate * &half, "interval, both lengths free (halves)"))
}

/// One player's length is fixed at `x`, the other is free. The fixed player
/// mixes the two extreme positions; the free player takes the whole
/// interval or nothing.
pub fn solve_interval_one_fixed(fixed_side: Side, x: &Rational, c: &Rational, pi: &Rational) -> Result<Solution> {
    let rate = interval_rate(c, pi)?;
    if !is_unit_interval(x) {
        return Err(Error::InvalidArgument(format!("length {} outside [0, 1]", canonical(x))));
    }
    let one = Rational::one();
    let half = Rational::new(1.into(), 2.into());
    let extremes = half_mix(Arc::interval(Rational::zero(), x.clone())?, Arc::interval(&one - x, x.clone())?)?;
    let whole = || pure_arc(Domain::Interval, Rational::zero(), one.clone());
    let empty = || pure_arc(Domain::Interval, Rational::zero(), Rational::zero());
    Ok(match fixed_side {
        Side::Hider => {
            if x >= &half {
                Solution::new(extremes, whole()?, (&one - x) * &rate, "interval, hider length fixed, searcher whole interval")
            } else {
                Solution::new(extremes, empty()?, x * &rate, "interval, hider length fixed, searcher empty")
            }
        }
        Side::Searcher => {
            if x >= &half {
                Solution::new(empty()?, extremes, x * &rate, "interval, searcher length fixed, hider empty")
            } else {
                Solution::new(whole()?, extremes, (&one - x) * &rate, "interval, searcher length fixed, hider whole interval")
            }
        }
    })
}

/// The equilibrium of the interval game in which both players use
/// subintervals of the same length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalFixedSolution {
    /// `⌊1/α⌋`.
    pub m: usize,
    /// `a_i = i(1 − α)/M` for `i = 0..=M`. These arcs cover `[0, 1]`, but
    /// the uniform mix over them is not optimal unless `α = 1/M`.
    pub covering_points: Vec<Rational>,
    /// Optimal hider mix: starts `kα` and `1 − α − kα` for `k = 0..M`, each
    /// with weight `(M − k)/(M(M + 1))`, merged where they coincide.
    pub hider_mix: Vec<(Rational, Rational)>,
    /// `b_i = i(1 + α)/(M + 1) − α` for `i = 1..=M`.
    pub searcher_points: Vec<Rational>,
    /// `(2α(M² − M − 1) + 2) / (M(M + 1))` at unit rate.
    pub value: Rational,
}

impl IntervalFixedSolution {
    pub fn new(alpha: &Rational) -> Result<Self> {
        if !alpha.is_positive() || alpha > &Rational::one() {
            return Err(Error::InvalidArgument(format!(
                "common length {} must lie in (0, 1]",
                canonical(alpha)
            )));
        }
        let one = Rational::one();
        let m_int = alpha.recip().floor().to_integer();
        let m = m_int
            .to_usize()
            .filter(|&m| m <= 100_000)
            .ok_or_else(|| Error::LimitExceeded(format!("1/α = {} is too large", canonical(&alpha.recip()))))?;
        let m_r = Rational::from_integer(m_int);
        let hider_gap = (&one - alpha) / &m_r;
        let searcher_gap = (&one + alpha) / (&m_r + &one);
        let covering_points = (0..=m).map(|i| &hider_gap * int(i as i64)).collect();
        let searcher_points = (1..=m).map(|i| &searcher_gap * int(i as i64) - alpha).collect();
        let value = (int(2) * alpha * (&m_r * &m_r - &m_r - &one) + int(2)) / (&m_r * (&m_r + &one));
        let mut merged: BTreeMap<Rational, Rational> = BTreeMap::new();
        let norm = &m_r * (&m_r + &one);
        for k in 0..m {
            let k_r = int(k as i64);
            let weight = (&m_r - &k_r) / &norm;
            let left = alpha * &k_r;
            let right = &one - alpha - &left;
            for start in [left, right] {
                *merged.entry(start).or_insert_with(Rational::zero) += &weight;
            }
        }
        Ok(IntervalFixedSolution {
            m,
            covering_points,
            hider_mix: merged.into_iter().collect(),
            searcher_points,
            value,
        })
    }
}

/// Both players use subintervals of length `alpha`.
pub fn solve_interval_both_fixed(
    alpha: &Rational,
    c: &Rational,
    pi: &Rational,
) -> Result<(Solution, IntervalFixedSolution)> {
    let rate = interval_rate(c, pi)?;
    let fixed = IntervalFixedSolution::new(alpha)?;
    let hider = MixedStrategy::arcs(
        fixed
            .hider_mix
            .iter()
            .map(|(a, p)| Ok((Arc::interval(a.clone(), alpha.clone())?, p.clone())))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let searcher = MixedStrategy::uniform(
        fixed
            .searcher_points
            .iter()
            .map(|b| Ok(PureStrategy::Arc(Arc::interval(b.clone(), alpha.clone())?)))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let solution = Solution::new(
        hider,
        searcher,
        &fixed.value * &rate,
        format!("interval, equal fixed lengths, M={}", fixed.m),
    );
    Ok((solution, fixed))
}

pub fn solve_interval(spec: &GameSpec) -> Result<Solution> {
    if spec.domain != Domain::Interval {
        return Err(Error::InvalidSpec("not an interval game".into()));
    }
    let (c, pi) = rates(spec)?;
    match (&spec.hider, &spec.searcher) {
        (Family::FreeLength, Family::FreeLength) => solve_interval_free(c, pi),
        (Family::FixedLength(alpha), Family::FreeLength) => solve_interval_one_fixed(Side::Hider, alpha, c, pi),
        (Family::FreeLength, Family::FixedLength(beta)) => solve_interval_one_fixed(Side::Searcher, beta, c, pi),
        (Family::FixedLength(alpha), Family::FixedLength(beta)) => {
            if alpha != beta {
                return Err(Error::NoClosedForm(format!(
                    "interval game with unequal fixed lengths {} and {}",
                    canonical(alpha),
                    canonical(beta)
                )));
            }
            if alpha.is_zero() {
                return Err(Error::NoClosedForm("interval game with zero-length arcs".into()));
            }
            solve_interval_both_fixed(alpha, c, pi).map(|(solution, _)| solution)
        }
        _ => Err(Error::InvalidSpec("interval game with a subset family".into())),
    }
}
