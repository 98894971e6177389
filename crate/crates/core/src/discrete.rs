//! Closed-form equilibria of the finite games.
//!
//! Solvers that assume costs in descending order sort them first (stably,
//! so ties keep their original order), apply the formulas in sorted
//! coordinates and relabel the answer back to the caller's locations.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{
    complement_strategy, Atom, CostProfile, Domain, Family, GameSpec, MixedStrategy, PureStrategy, Solution,
    Subset,
};
use crate::rational::{canonical, int, Rational};

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

/// Stable descending order of `costs`: `order[i]` is the original index of
/// the `i`-th largest cost.
fn descending_order(costs: &[Rational]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..costs.len()).collect();
    order.sort_by(|&a, &b| costs[b].cmp(&costs[a]));
    order
}

/// Builds a subset strategy from `(set, probability)` pairs given in sorted
/// coordinates, relabeled through `order` and with zero atoms dropped.
fn relabeled(order: &[usize], atoms: Vec<(Subset, Rational)>) -> Result<MixedStrategy> {
    MixedStrategy::subsets(
        atoms
            .into_iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|(s, p)| (s.relabel(order), p))
            .collect(),
    )
}

fn symmetric_costs(profile: &CostProfile) -> Result<&[Rational]> {
    if !profile.is_symmetric() {
        return Err(Error::NoClosedForm(
            "costs and penalties differ in a cardinality game".into(),
        ));
    }
    let costs = profile
        .costs()
        .ok_or_else(|| Error::InvalidSpec("finite game needs a discrete profile".into()))?;
    if let Some(j) = costs.iter().position(|c| !c.is_positive()) {
        return Err(Error::NoClosedForm(format!(
            "location {} has cost {}; the formulas divide by it",
            j + 1,
            canonical(&costs[j])
        )));
    }
    Ok(costs)
}

/// Both players choose any subset. Location `j` enters the hider's set
/// independently with probability `c_j/(c_j + π_j)` and the searcher's
/// with probability `π_j/(c_j + π_j)`; the value is `Σ c_jπ_j/(c_j + π_j)`.
pub fn solve_powerset(profile: &CostProfile) -> Result<Solution> {
    let (Some(costs), Some(penalties)) = (profile.costs(), profile.penalties()) else {
        return Err(Error::InvalidSpec("power-set game needs a discrete profile".into()));
    };
    if let Some(j) = penalties.iter().position(|p| p.is_zero()) {
        return Err(Error::NoClosedForm(format!(
            "location {} has zero penalty; the cost/penalty ratio is undefined",
            j + 1
        )));
    }
    let mut hider = Vec::with_capacity(costs.len());
    let mut searcher = Vec::with_capacity(costs.len());
    let mut value = Rational::zero();
    for (c, pi) in costs.iter().zip(penalties) {
        let total = c + pi;
        hider.push(c / &total);
        searcher.push(pi / &total);
        value += c * pi / &total;
    }
    Ok(Solution::new(
        MixedStrategy::independent(hider)?,
        MixedStrategy::independent(searcher)?,
        value,
        "power set, independent inclusion",
    ))
}

/// Which of the four two-location regimes applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoLocationScenario {
    /// `π₁π₂ ≤ c₁c₂`, `π₁ ≤ π₂`: searcher mixes ∅ and {2}.
    I,
    /// `π₁π₂ ≥ c₁c₂`, `π₁ ≤ π₂`: searcher mixes {2} and {1,2}.
    II,
    /// `π₁π₂ ≤ c₁c₂`, `π₁ ≥ π₂`: searcher mixes ∅ and {1}.
    III,
    /// `π₁π₂ ≥ c₁c₂`, `π₁ ≥ π₂`: solved by the same mix as `II`.
    IV,
}

impl TwoLocationScenario {
    pub fn label(self) -> &'static str {
        match self {
            TwoLocationScenario::I => "i",
            TwoLocationScenario::II => "ii",
            TwoLocationScenario::III => "iii",
            TwoLocationScenario::IV => "iv",
        }
    }
}

/// Hider hides in exactly one of two locations, searcher picks any subset.
/// Locations are indexed so that `c₁ ≥ c₂` (swapping if needed); boundary
/// cases take the lowest-numbered scenario.
pub fn solve_two_by_two_k1(profile: &CostProfile) -> Result<(Solution, TwoLocationScenario)> {
    let (Some(costs), Some(penalties)) = (profile.costs(), profile.penalties()) else {
        return Err(Error::InvalidSpec("two-location game needs a discrete profile".into()));
    };
    if costs.len() != 2 {
        return Err(Error::InvalidArgument(format!(
            "two-location game has {} locations",
            costs.len()
        )));
    }
    if costs.iter().chain(penalties).any(|x| !x.is_positive()) {
        return Err(Error::NoClosedForm(
            "two-location game needs positive costs and penalties".into(),
        ));
    }
    let order = descending_order(costs);
    let (c1, c2) = (&costs[order[0]], &costs[order[1]]);
    let (p1, p2) = (&penalties[order[0]], &penalties[order[1]]);
    let set = |members: &[usize]| Subset::from_indices(2, members.iter().copied());
    let (first, second, empty, both) = (set(&[0])?, set(&[1])?, set(&[])?, set(&[0, 1])?);

    let product_low = p1 * p2 <= c1 * c2;
    let scenario = match (product_low, p1 <= p2) {
        (true, true) => TwoLocationScenario::I,
        (false, true) => TwoLocationScenario::II,
        (true, false) => TwoLocationScenario::III,
        (false, false) => TwoLocationScenario::IV,
    };
    let one = Rational::one();
    let (hider, searcher, value) = match scenario {
        TwoLocationScenario::I => {
            let q = p2 / (c2 + p2);
            let p = (c2 + p1) / (c2 + p2);
            (
                vec![(first, q.clone()), (second, &one - &q)],
                vec![(empty, p.clone()), (second, &one - &p)],
                (c2 + p1) * p2 / (c2 + p2),
            )
        }
        // The first scenario with the locations' roles exchanged.
        TwoLocationScenario::III => {
            let q = p1 / (c1 + p1);
            let p = (c1 + p2) / (c1 + p1);
            (
                vec![(second, q.clone()), (first, &one - &q)],
                vec![(empty, p.clone()), (first, &one - &p)],
                (c1 + p2) * p1 / (c1 + p1),
            )
        }
        // The second scenario's equalizing mix only needs π₁π₂ ≥ c₁c₂ and
        // c₁ ≥ c₂, so it also covers the fourth.
        TwoLocationScenario::II | TwoLocationScenario::IV => {
            let q = c1 / (p1 + c1);
            let p = (c1 - c2) / (p1 + c1);
            (
                vec![(first, q.clone()), (second, &one - &q)],
                vec![(second, p.clone()), (both, &one - &p)],
                (c2 + p1) * c1 / (p1 + c1),
            )
        }
    };
    let solution = Solution::new(
        relabeled(&order, hider)?,
        relabeled(&order, searcher)?,
        value,
        format!("two locations, one hidden, scenario ({})", scenario.label()),
    );
    Ok((solution, scenario))
}

/// Value `c([2k])/2` of the game in which the hider must choose exactly
/// `k` of the locations (for `2k ≤ n`, costs descending).
fn prefix_half_sum(sorted: &[Rational], k: usize) -> Rational {
    sorted[..2 * k].iter().sum::<Rational>() * half()
}

/// Hider chooses exactly `k` locations, searcher any subset, costs equal
/// penalties. Returns the solution and the sorted-coordinate solution it
/// was built from.
pub fn solve_hider_cardinality(costs: &[Rational], k: usize) -> Result<Solution> {
    let profile = CostProfile::symmetric(costs.to_vec())?;
    let costs = symmetric_costs(&profile)?;
    let n = costs.len();
    if k > n {
        return Err(Error::InvalidArgument(format!("cardinality {k} exceeds n = {n}")));
    }
    if 2 * k > n {
        // Complement the solution of the (n − k)-location game.
        let dual = solve_hider_cardinality(costs, n - k)?;
        return Ok(Solution::new(
            complement_strategy(&dual.hider, n)?,
            complement_strategy(&dual.searcher, n)?,
            dual.value,
            format!("hider cardinality k={k}, complement of k={}", n - k),
        ));
    }
    let order = descending_order(costs);
    let sorted: Vec<Rational> = order.iter().map(|&j| costs[j].clone()).collect();
    if k == 0 {
        let empty = Subset::empty(n)?;
        return Ok(Solution::new(
            MixedStrategy::pure(PureStrategy::Subset(empty)),
            MixedStrategy::pure(PureStrategy::Subset(empty)),
            Rational::zero(),
            "hider cardinality k=0 (nothing hidden)",
        ));
    }
    let low = &sorted[2 * k - 1];
    let first_half = Subset::prefix(n, k)?;
    let second_half = Subset::from_indices(n, k..2 * k)?;
    let hider = vec![(first_half, half()), (second_half, half())];

    let mut searcher = vec![(Subset::empty(n)?, half() + low / (int(2) * &sorted[0]))];
    for j in 1..2 * k {
        let p = low / (int(2) * &sorted[j]) - low / (int(2) * &sorted[j - 1]);
        searcher.push((Subset::prefix(n, j)?, p));
    }
    Ok(Solution::new(
        relabeled(&order, hider)?,
        relabeled(&order, searcher)?,
        prefix_half_sum(&sorted, k),
        format!("hider cardinality k={k}, nested prefixes"),
    ))
}

/// Hider chooses any subset, searcher exactly `k` locations: the hider
/// plays the complement of the searcher's strategy in the hider-cardinality
/// game and the searcher plays that game's hider strategy. The value is
/// `c([n])` minus that game's value.
pub fn solve_searcher_cardinality(costs: &[Rational], k: usize) -> Result<Solution> {
    let dual = solve_hider_cardinality(costs, k)?;
    let n = costs.len();
    let total: Rational = costs.iter().sum();
    Ok(Solution::new(
        complement_strategy(&dual.searcher, n)?,
        dual.hider,
        total - dual.value,
        format!("searcher cardinality k={k}, dual of hider cardinality"),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingletonCase {
    /// Two locations: matching pennies.
    Pennies,
    /// `M = n − 1`: both players use every location.
    One,
    /// `M ≤ n − 2`: the hider uses `1..=M+1`, the searcher `1..=M` and `n`.
    Two,
}

/// Details of the single-location game's solution, in the caller's labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingletonCaseData {
    /// Largest `M ∈ {2, …, n−1}` with `Σ_{i≤M} 1/c_i ≥ (M − 2)/c_n` in
    /// descending cost order; absent for `n = 2`.
    pub threshold: Option<usize>,
    pub case: SingletonCase,
    /// Probability the hider picks each location.
    pub hider: Vec<Rational>,
    /// Probability the searcher picks each location.
    pub searcher: Vec<Rational>,
    pub value: Rational,
}

/// Both players choose exactly one location, costs equal penalties; the
/// payoff is `c_i + c_j` when they differ and zero otherwise.
pub fn solve_singleton_pair(costs: &[Rational]) -> Result<(Solution, SingletonCaseData)> {
    let profile = CostProfile::symmetric(costs.to_vec())?;
    let costs = symmetric_costs(&profile)?;
    let n = costs.len();
    if n < 2 {
        return Err(Error::InvalidArgument("single-location game needs n ≥ 2".into()));
    }
    let order = descending_order(costs);
    let c: Vec<Rational> = order.iter().map(|&j| costs[j].clone()).collect();
    let last = &c[n - 1];
    let one = Rational::one();

    let (threshold, case, p, q, value) = if n == 2 {
        let p = vec![half(), half()];
        (None, SingletonCase::Pennies, p.clone(), p, (&c[0] + &c[1]) * half())
    } else {
        let mut prefix_inverse = vec![Rational::zero(); n + 1];
        for i in 0..n {
            prefix_inverse[i + 1] = &prefix_inverse[i] + c[i].recip();
        }
        let m = (2..n)
            .rev()
            .find(|&m| prefix_inverse[m] >= int(m as i64 - 2) / last)
            .expect("the threshold condition holds at M = 2");
        if m == n - 1 {
            let inverse_sum = &prefix_inverse[n];
            let n_minus_2 = int(n as i64 - 2);
            let p: Vec<Rational> = c
                .iter()
                .map(|cj| half() - &n_minus_2 / (int(2) * cj * inverse_sum))
                .collect();
            let total: Rational = c.iter().sum();
            let value = total * half() - &n_minus_2 * &n_minus_2 / (int(2) * inverse_sum);
            (Some(m), SingletonCase::One, p.clone(), p, value)
        } else {
            let next = &c[m];
            let mut p = vec![Rational::zero(); n];
            let mut q = vec![Rational::zero(); n];
            for j in 0..m {
                p[j] = half() - last / (int(2) * &c[j]);
                q[j] = half() - next / (int(2) * &c[j]);
            }
            p[m] = &one - p.iter().sum::<Rational>();
            q[n - 1] = &one - q.iter().sum::<Rational>();
            let mut value = -(int(m as i64 - 2)) * (last + next) * half();
            for ci in &c[..m] {
                value += (ci + next * last / ci) * half();
            }
            (Some(m), SingletonCase::Two, p, q, value)
        }
    };

    let to_strategy = |probs: &[Rational]| -> Result<MixedStrategy> {
        let atoms = (0..n)
            .map(|i| Ok((Subset::from_indices(n, [i])?, probs[i].clone())))
            .collect::<Result<Vec<_>>>()?;
        relabeled(&order, atoms)
    };
    let mut hider_original = vec![Rational::zero(); n];
    let mut searcher_original = vec![Rational::zero(); n];
    for (i, &j) in order.iter().enumerate() {
        hider_original[j] = p[i].clone();
        searcher_original[j] = q[i].clone();
    }
    let provenance = match case {
        SingletonCase::Pennies => "single location, n=2 (matching pennies)".to_string(),
        SingletonCase::One => format!("single location, case 1, M={}", threshold.unwrap()),
        SingletonCase::Two => format!("single location, case 2, M={}", threshold.unwrap()),
    };
    let solution = Solution::new(to_strategy(&p)?, to_strategy(&q)?, value.clone(), provenance);
    Ok((
        solution,
        SingletonCaseData {
            threshold,
            case,
            hider: hider_original,
            searcher: searcher_original,
            value,
        },
    ))
}

/// Dispatches a finite game to its closed form.
pub fn solve_finite(spec: &GameSpec) -> Result<Solution> {
    let Domain::Finite(n) = spec.domain else {
        return Err(Error::InvalidSpec("not a finite game".into()));
    };
    let profile = &spec.profile;
    let costs = profile
        .costs()
        .ok_or_else(|| Error::InvalidSpec("finite game needs a discrete profile".into()))?;
    match (&spec.hider, &spec.searcher) {
        (Family::PowerSet, Family::PowerSet) => solve_powerset(profile),
        (Family::FixedCardinality(k), Family::PowerSet) if profile.is_symmetric() => {
            solve_hider_cardinality(costs, *k)
        }
        (Family::FixedCardinality(1), Family::PowerSet) if n == 2 => {
            solve_two_by_two_k1(profile).map(|(solution, _)| solution)
        }
        (Family::PowerSet, Family::FixedCardinality(k)) if profile.is_symmetric() => {
            solve_searcher_cardinality(costs, *k)
        }
        (Family::FixedCardinality(1), Family::FixedCardinality(1)) if profile.is_symmetric() => {
            solve_singleton_pair(costs).map(|(solution, _)| solution)
        }
        (hider, searcher) => Err(Error::NoClosedForm(format!(
            "finite game with hider family {} and searcher family {}{}",
            family_name(hider),
            family_name(searcher),
            if profile.is_symmetric() { "" } else { " and unequal costs/penalties" }
        ))),
    }
}

fn family_name(family: &Family) -> String {
    match family {
        Family::PowerSet => "power set".into(),
        Family::FixedCardinality(k) => format!("cardinality {k}"),
        Family::Explicit(sets) => format!("explicit ({} sets)", sets.len()),
        Family::FreeLength => "free length".into(),
        Family::FixedLength(x) => format!("length {}", canonical(x)),
    }
}

/// Atom list of a subset strategy as `(set, probability)` pairs; expands
/// independent-inclusion strategies.
pub fn subset_atoms(strategy: &MixedStrategy) -> Result<Vec<(Subset, Rational)>> {
    strategy
        .expand()?
        .into_iter()
        .map(|Atom { strategy, probability }| match strategy {
            PureStrategy::Subset(s) => Ok((s, probability)),
            PureStrategy::Arc(_) => Err(Error::InvalidStrategy("arc in a finite game".into())),
        })
        .collect()
}
