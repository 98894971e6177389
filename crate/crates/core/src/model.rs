//! Game descriptions, strategies and exact payoff evaluation.
//!
//! A game pits a Hider (maximizer) against a Searcher (minimizer). Each
//! picks a subset of the ground space and the Hider receives
//! `C(S \ H) + Π(H \ S)`: a commission cost for every searched-but-empty
//! location plus an omission penalty for every occupied-but-unsearched one.
//! On the finite ground set `[n]` both functions are additive; on the circle
//! and the interval they are proportional to length.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{canonical, int, is_unit_interval, Rational};

/// Largest ground set a [`Subset`] can index.
pub const MAX_GROUND_SET: usize = 24;

/// Largest ground set for which an implicit power-set strategy will be
/// expanded into explicit atoms.
pub const MAX_EXPANDED_GROUND_SET: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Hider,
    Searcher,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Hider => "hider",
            Side::Searcher => "searcher",
        }
    }
}

/// A subset of `[n]`, stored as a bitmask. Bit `i` is location `i + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    n: u8,
    bits: u32,
}

impl Subset {
    pub fn new(n: usize, bits: u32) -> Result<Self> {
        check_ground_set(n)?;
        if u64::from(bits) >= 1u64 << n {
            return Err(Error::InvalidStrategy(format!(
                "bitmask {bits:#b} has locations outside [{n}]"
            )));
        }
        Ok(Subset { n: n as u8, bits })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Subset::new(n, 0)
    }

    pub fn full(n: usize) -> Result<Self> {
        Subset::new(n, full_mask(n))
    }

    /// Builds a subset from zero-based location indices.
    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        check_ground_set(n)?;
        let mut bits = 0u32;
        for index in indices {
            if index >= n {
                return Err(Error::InvalidStrategy(format!(
                    "location {} outside [{n}]",
                    index + 1
                )));
            }
            bits |= 1 << index;
        }
        Ok(Subset { n: n as u8, bits })
    }

    /// `[count]` = the first `count` locations.
    pub fn prefix(n: usize, count: usize) -> Result<Self> {
        Subset::from_indices(n, 0..count)
    }

    pub fn ground_set(self) -> usize {
        usize::from(self.n)
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn contains(self, index: usize) -> bool {
        index < self.ground_set() && self.bits & (1 << index) != 0
    }

    pub fn complement(self) -> Subset {
        Subset {
            n: self.n,
            bits: !self.bits & full_mask(self.ground_set()),
        }
    }

    pub fn difference(self, other: Subset) -> u32 {
        self.bits & !other.bits
    }

    /// Zero-based indices of the members, ascending.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..self.ground_set()).filter(move |&i| self.bits & (1 << i) != 0)
    }

    /// Relabels locations: member `i` becomes `map[i]`.
    pub fn relabel(self, map: &[usize]) -> Subset {
        let bits = self.indices().fold(0u32, |acc, i| acc | (1 << map[i]));
        Subset { n: self.n, bits }
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (pos, index) in self.indices().enumerate() {
            if pos > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", index + 1)?;
        }
        f.write_str("}")
    }
}

fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

fn check_ground_set(n: usize) -> Result<()> {
    if n == 0 || n > MAX_GROUND_SET {
        return Err(Error::InvalidSpec(format!(
            "ground set size {n} outside 1..={MAX_GROUND_SET}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CostProfile {
    /// Per-location costs `c_j` and penalties `π_j`.
    Discrete {
        costs: Vec<Rational>,
        penalties: Vec<Rational>,
    },
    /// Cost and penalty per unit length.
    Continuous {
        cost_rate: Rational,
        penalty_rate: Rational,
    },
}

impl CostProfile {
    pub fn discrete(costs: Vec<Rational>, penalties: Vec<Rational>) -> Result<Self> {
        if costs.is_empty() {
            return Err(Error::InvalidProfile("no locations".into()));
        }
        if costs.len() != penalties.len() {
            return Err(Error::InvalidProfile(format!(
                "{} costs but {} penalties",
                costs.len(),
                penalties.len()
            )));
        }
        check_ground_set(costs.len()).map_err(|_| {
            Error::InvalidProfile(format!(
                "{} locations exceeds the limit of {MAX_GROUND_SET}",
                costs.len()
            ))
        })?;
        for (name, values) in [("cost", &costs), ("penalty", &penalties)] {
            if let Some(pos) = values.iter().position(Signed::is_negative) {
                return Err(Error::InvalidProfile(format!(
                    "{name} of location {} is negative",
                    pos + 1
                )));
            }
        }
        Ok(CostProfile::Discrete { costs, penalties })
    }

    /// Equal costs and penalties, `c = π`.
    pub fn symmetric(costs: Vec<Rational>) -> Result<Self> {
        CostProfile::discrete(costs.clone(), costs)
    }

    pub fn continuous(cost_rate: Rational, penalty_rate: Rational) -> Result<Self> {
        if !cost_rate.is_positive() || !penalty_rate.is_positive() {
            return Err(Error::InvalidProfile(
                "continuous cost and penalty rates must be positive".into(),
            ));
        }
        Ok(CostProfile::Continuous {
            cost_rate,
            penalty_rate,
        })
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, CostProfile::Discrete { .. })
    }

    pub fn len(&self) -> Option<usize> {
        match self {
            CostProfile::Discrete { costs, .. } => Some(costs.len()),
            CostProfile::Continuous { .. } => None,
        }
    }

    pub fn costs(&self) -> Option<&[Rational]> {
        match self {
            CostProfile::Discrete { costs, .. } => Some(costs),
            CostProfile::Continuous { .. } => None,
        }
    }

    pub fn penalties(&self) -> Option<&[Rational]> {
        match self {
            CostProfile::Discrete { penalties, .. } => Some(penalties),
            CostProfile::Continuous { .. } => None,
        }
    }

    pub fn rates(&self) -> Option<(&Rational, &Rational)> {
        match self {
            CostProfile::Continuous {
                cost_rate,
                penalty_rate,
            } => Some((cost_rate, penalty_rate)),
            CostProfile::Discrete { .. } => None,
        }
    }

    /// True when `c = π` (componentwise, or as rates).
    pub fn is_symmetric(&self) -> bool {
        match self {
            CostProfile::Discrete { costs, penalties } => costs == penalties,
            CostProfile::Continuous {
                cost_rate,
                penalty_rate,
            } => cost_rate == penalty_rate,
        }
    }

    /// Sum of costs, `c([n])`.
    pub fn total_cost(&self) -> Option<Rational> {
        self.costs().map(|c| c.iter().sum())
    }

    /// Multiplies every cost and penalty by `factor > 0`.
    pub fn scaled(&self, factor: &Rational) -> Result<Self> {
        if !factor.is_positive() {
            return Err(Error::InvalidArgument("scale factor must be positive".into()));
        }
        Ok(match self {
            CostProfile::Discrete { costs, penalties } => CostProfile::Discrete {
                costs: costs.iter().map(|c| c * factor).collect(),
                penalties: penalties.iter().map(|p| p * factor).collect(),
            },
            CostProfile::Continuous {
                cost_rate,
                penalty_rate,
            } => CostProfile::Continuous {
                cost_rate: cost_rate * factor,
                penalty_rate: penalty_rate * factor,
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Circle,
    Interval,
    Finite(usize),
}

impl Domain {
    pub fn is_continuous(self) -> bool {
        !matches!(self, Domain::Finite(_))
    }
}

/// A player's admissible pure strategies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    /// Any arc or subinterval.
    FreeLength,
    /// Arcs or subintervals of one given length in `[0, 1]`.
    FixedLength(Rational),
    /// Every subset of `[n]`.
    PowerSet,
    /// Subsets of `[n]` of exactly this size.
    FixedCardinality(usize),
    /// An arbitrary non-empty collection of subsets.
    Explicit(Vec<Subset>),
}

impl Family {
    pub fn is_continuous(&self) -> bool {
        matches!(self, Family::FreeLength | Family::FixedLength(_))
    }

    pub fn fixed_length(&self) -> Option<&Rational> {
        match self {
            Family::FixedLength(x) => Some(x),
            _ => None,
        }
    }

    pub fn cardinality(&self) -> Option<usize> {
        match self {
            Family::FixedCardinality(k) => Some(*k),
            _ => None,
        }
    }

    /// The family of complements, `{A^c : A ∈ family}`.
    pub fn complement(&self, n: usize) -> Result<Family> {
        Ok(match self {
            Family::PowerSet => Family::PowerSet,
            Family::FixedCardinality(k) if *k <= n => Family::FixedCardinality(n - k),
            Family::Explicit(sets) => {
                Family::Explicit(sets.iter().map(|s| s.complement()).collect())
            }
            other => {
                return Err(Error::InvalidSpec(format!(
                    "family {other:?} has no complement on [{n}]"
                )))
            }
        })
    }

    pub fn admits_subset(&self, subset: Subset) -> bool {
        match self {
            Family::PowerSet => true,
            Family::FixedCardinality(k) => subset.len() == *k,
            Family::Explicit(sets) => sets.contains(&subset),
            Family::FreeLength | Family::FixedLength(_) => false,
        }
    }

    pub fn admits_arc(&self, arc: &Arc) -> bool {
        match self {
            Family::FreeLength => true,
            Family::FixedLength(length) => arc.length() == length,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSpec {
    pub domain: Domain,
    pub hider: Family,
    pub searcher: Family,
    pub profile: CostProfile,
}

impl GameSpec {
    pub fn new(domain: Domain, hider: Family, searcher: Family, profile: CostProfile) -> Result<Self> {
        let spec = GameSpec {
            domain,
            hider,
            searcher,
            profile,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn circle(c: Rational, pi: Rational, hider: Family, searcher: Family) -> Result<Self> {
        GameSpec::new(Domain::Circle, hider, searcher, CostProfile::continuous(c, pi)?)
    }

    pub fn interval(c: Rational, pi: Rational, hider: Family, searcher: Family) -> Result<Self> {
        GameSpec::new(Domain::Interval, hider, searcher, CostProfile::continuous(c, pi)?)
    }

    pub fn finite(profile: CostProfile, hider: Family, searcher: Family) -> Result<Self> {
        let n = profile
            .len()
            .ok_or_else(|| Error::InvalidSpec("finite game needs a discrete profile".into()))?;
        GameSpec::new(Domain::Finite(n), hider, searcher, profile)
    }

    pub fn ground_set(&self) -> Option<usize> {
        match self.domain {
            Domain::Finite(n) => Some(n),
            _ => None,
        }
    }

    pub fn family(&self, side: Side) -> &Family {
        match side {
            Side::Hider => &self.hider,
            Side::Searcher => &self.searcher,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.domain {
            Domain::Finite(n) => {
                check_ground_set(n)?;
                if self.profile.len() != Some(n) {
                    return Err(Error::InvalidSpec(format!(
                        "finite domain of size {n} needs a discrete profile of length {n}"
                    )));
                }
                for side in [Side::Hider, Side::Searcher] {
                    match self.family(side) {
                        Family::PowerSet => {}
                        Family::FixedCardinality(k) if *k <= n => {}
                        Family::FixedCardinality(k) => {
                            return Err(Error::InvalidSpec(format!(
                                "{} cardinality {k} exceeds n = {n}",
                                side.name()
                            )))
                        }
                        Family::Explicit(sets) => {
                            if sets.is_empty() {
                                return Err(Error::InvalidSpec(format!(
                                    "{} family is empty",
                                    side.name()
                                )));
                            }
                            if let Some(bad) = sets.iter().find(|s| s.ground_set() != n) {
                                return Err(Error::InvalidSpec(format!(
                                    "{} family member {bad} is over [{}], not [{n}]",
                                    side.name(),
                                    bad.ground_set()
                                )));
                            }
                        }
                        other => {
                            return Err(Error::InvalidSpec(format!(
                                "{} family {other:?} is not a finite family",
                                side.name()
                            )))
                        }
                    }
                }
            }
            Domain::Circle | Domain::Interval => {
                if self.profile.is_discrete() {
                    return Err(Error::InvalidSpec(
                        "continuous domain needs cost and penalty rates".into(),
                    ));
                }
                for side in [Side::Hider, Side::Searcher] {
                    match self.family(side) {
                        Family::FreeLength => {}
                        Family::FixedLength(x) if is_unit_interval(x) => {}
                        Family::FixedLength(x) => {
                            return Err(Error::InvalidSpec(format!(
                                "{} length {} outside [0, 1]",
                                side.name(),
                                canonical(x)
                            )))
                        }
                        other => {
                            return Err(Error::InvalidSpec(format!(
                                "{} family {other:?} is not a continuous family",
                                side.name()
                            )))
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// A closed arc of the unit circle (start taken modulo 1) or a closed
/// subinterval of `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arc {
    start: Rational,
    length: Rational,
}

impl Arc {
    /// Circle arc; the start is reduced into `[0, 1)`.
    pub fn circle(start: Rational, length: Rational) -> Result<Self> {
        check_length(&length)?;
        let start = &start - start.floor();
        Ok(Arc { start, length })
    }

    /// Subinterval `[start, start + length]` of `[0, 1]`.
    pub fn interval(start: Rational, length: Rational) -> Result<Self> {
        check_length(&length)?;
        if start.is_negative() || &start + &length > Rational::one() {
            return Err(Error::InvalidStrategy(format!(
                "interval [{}, {} + {}] leaves [0, 1]",
                canonical(&start),
                canonical(&start),
                canonical(&length)
            )));
        }
        Ok(Arc { start, length })
    }

    pub fn for_domain(domain: Domain, start: Rational, length: Rational) -> Result<Self> {
        match domain {
            Domain::Circle => Arc::circle(start, length),
            Domain::Interval => Arc::interval(start, length),
            Domain::Finite(_) => Err(Error::InvalidStrategy("arc on a finite domain".into())),
        }
    }

    pub fn start(&self) -> &Rational {
        &self.start
    }

    pub fn length(&self) -> &Rational {
        &self.length
    }

    pub fn end(&self) -> Rational {
        &self.start + &self.length
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (crate::rational::to_f64(&self.start), crate::rational::to_f64(&self.length))
    }
}

fn check_length(length: &Rational) -> Result<()> {
    if !is_unit_interval(length) {
        return Err(Error::InvalidStrategy(format!(
            "arc length {} outside [0, 1]",
            canonical(length)
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PureStrategy {
    Subset(Subset),
    Arc(Arc),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub strategy: PureStrategy,
    pub probability: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MixedStrategy {
    /// Finite distribution over pure strategies, in listed order.
    Atoms(Vec<Atom>),
    /// A circle arc of fixed length whose start is uniform on the circle.
    UniformStartArc { length: Rational },
    /// Power-set strategy in which location `j` is included independently
    /// with probability `inclusion[j]`.
    IndependentInclusion { inclusion: Vec<Rational> },
}

impl MixedStrategy {
    /// Validates and canonicalizes an atom list: probabilities are
    /// non-negative and sum to one exactly, atoms are of one kind, and
    /// repeated pure strategies are merged at their first position.
    pub fn atoms(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidStrategy("no atoms".into()));
        }
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            if atom.probability.is_negative() {
                return Err(Error::InvalidStrategy("negative probability".into()));
            }
            match (merged.first().map(|a| &a.strategy), &atom.strategy) {
                (Some(PureStrategy::Subset(first)), PureStrategy::Subset(s))
                    if first.ground_set() != s.ground_set() =>
                {
                    return Err(Error::InvalidStrategy(
                        "subsets over different ground sets".into(),
                    ))
                }
                (Some(PureStrategy::Subset(_)), PureStrategy::Arc(_))
                | (Some(PureStrategy::Arc(_)), PureStrategy::Subset(_)) => {
                    return Err(Error::InvalidStrategy("mixes subsets and arcs".into()))
                }
                _ => {}
            }
            match merged.iter_mut().find(|a| a.strategy == atom.strategy) {
                Some(existing) => existing.probability += atom.probability,
                None => merged.push(atom),
            }
        }
        let total: Rational = merged.iter().map(|a| &a.probability).sum();
        if !total.is_one() {
            return Err(Error::InvalidStrategy(format!(
                "probabilities sum to {}, not 1",
                canonical(&total)
            )));
        }
        Ok(MixedStrategy::Atoms(merged))
    }

    pub fn pure(strategy: PureStrategy) -> Self {
        MixedStrategy::Atoms(vec![Atom {
            strategy,
            probability: Rational::one(),
        }])
    }

    /// Uniform mixture over the given pure strategies.
    pub fn uniform(strategies: Vec<PureStrategy>) -> Result<Self> {
        let weight = Rational::new(1.into(), strategies.len().max(1).into());
        MixedStrategy::atoms(
            strategies
                .into_iter()
                .map(|strategy| Atom {
                    strategy,
                    probability: weight.clone(),
                })
                .collect(),
        )
    }

    pub fn subsets(atoms: Vec<(Subset, Rational)>) -> Result<Self> {
        MixedStrategy::atoms(
            atoms
                .into_iter()
                .map(|(s, p)| Atom {
                    strategy: PureStrategy::Subset(s),
                    probability: p,
                })
                .collect(),
        )
    }

    pub fn arcs(atoms: Vec<(Arc, Rational)>) -> Result<Self> {
        MixedStrategy::atoms(
            atoms
                .into_iter()
                .map(|(a, p)| Atom {
                    strategy: PureStrategy::Arc(a),
                    probability: p,
                })
                .collect(),
        )
    }

    pub fn uniform_start_arc(length: Rational) -> Result<Self> {
        check_length(&length)?;
        Ok(MixedStrategy::UniformStartArc { length })
    }

    pub fn independent(inclusion: Vec<Rational>) -> Result<Self> {
        check_ground_set(inclusion.len())?;
        if inclusion.iter().any(|q| !is_unit_interval(q)) {
            return Err(Error::InvalidStrategy(
                "inclusion probability outside [0, 1]".into(),
            ));
        }
        Ok(MixedStrategy::IndependentInclusion { inclusion })
    }

    /// Explicit atoms. Independent-inclusion strategies are expanded in
    /// ascending bitmask order with zero-probability subsets omitted (only
    /// up to [`MAX_EXPANDED_GROUND_SET`] locations); uniform-start arcs
    /// have no finite expansion.
    pub fn expand(&self) -> Result<Vec<Atom>> {
        match self {
            MixedStrategy::Atoms(atoms) => Ok(atoms.clone()),
            MixedStrategy::UniformStartArc { .. } => Err(Error::InvalidStrategy(
                "a uniform-start arc has no finite atom list".into(),
            )),
            MixedStrategy::IndependentInclusion { inclusion } => {
                let n = inclusion.len();
                if n > MAX_EXPANDED_GROUND_SET {
                    return Err(Error::LimitExceeded(format!(
                        "expanding a power-set strategy over {n} locations"
                    )));
                }
                let mut atoms = Vec::new();
                for bits in 0..(1u32 << n) {
                    let mut p = Rational::one();
                    for (j, q) in inclusion.iter().enumerate() {
                        if bits & (1 << j) != 0 {
                            p *= q;
                        } else {
                            p *= Rational::one() - q;
                        }
                        if p.is_zero() {
                            break;
                        }
                    }
                    if !p.is_zero() {
                        atoms.push(Atom {
                            strategy: PureStrategy::Subset(Subset::new(n, bits)?),
                            probability: p,
                        });
                    }
                }
                Ok(atoms)
            }
        }
    }

    /// Probability that each location is included, for discrete strategies.
    pub fn marginals(&self, n: usize) -> Result<Vec<Rational>> {
        match self {
            MixedStrategy::IndependentInclusion { inclusion } => {
                if inclusion.len() != n {
                    return Err(Error::InvalidStrategy(format!(
                        "strategy over {} locations, game over {n}",
                        inclusion.len()
                    )));
                }
                Ok(inclusion.clone())
            }
            MixedStrategy::Atoms(atoms) => {
                let mut marginals = vec![Rational::zero(); n];
                for atom in atoms {
                    let PureStrategy::Subset(subset) = atom.strategy else {
                        return Err(Error::InvalidStrategy("arc in a discrete game".into()));
                    };
                    if subset.ground_set() != n {
                        return Err(Error::InvalidStrategy(format!(
                            "subset over [{}] in a game over [{n}]",
                            subset.ground_set()
                        )));
                    }
                    for j in subset.indices() {
                        marginals[j] += &atom.probability;
                    }
                }
                Ok(marginals)
            }
            MixedStrategy::UniformStartArc { .. } => {
                Err(Error::InvalidStrategy("arc strategy in a discrete game".into()))
            }
        }
    }

    /// Checks every atom against `family` on `domain`.
    pub fn check_family(&self, domain: Domain, family: &Family, side: Side) -> Result<()> {
        let mismatch = |detail: String| Error::FamilyMismatch {
            side: side.name(),
            detail,
        };
        match (self, domain) {
            (MixedStrategy::UniformStartArc { length }, Domain::Circle) => match family {
                Family::FreeLength => Ok(()),
                Family::FixedLength(x) if x == length => Ok(()),
                _ => Err(mismatch(format!("uniform arc of length {}", canonical(length)))),
            },
            (MixedStrategy::UniformStartArc { .. }, _) => Err(mismatch(
                "uniform-start arcs exist only on the circle".into(),
            )),
            (MixedStrategy::IndependentInclusion { inclusion }, Domain::Finite(n)) => {
                if inclusion.len() != n {
                    return Err(mismatch(format!(
                        "{} inclusion probabilities for {n} locations",
                        inclusion.len()
                    )));
                }
                match family {
                    Family::PowerSet => Ok(()),
                    // Degenerate inclusion vectors put all mass on admissible sets.
                    _ => {
                        for atom in self.expand()? {
                            if let PureStrategy::Subset(s) = atom.strategy {
                                if !family.admits_subset(s) {
                                    return Err(mismatch(format!("subset {s}")));
                                }
                            }
                        }
                        Ok(())
                    }
                }
            }
            (MixedStrategy::IndependentInclusion { .. }, _) => {
                Err(mismatch("power-set strategy on a continuous domain".into()))
            }
            (MixedStrategy::Atoms(atoms), domain) => {
                for atom in atoms {
                    match (&atom.strategy, domain) {
                        (PureStrategy::Subset(s), Domain::Finite(n)) => {
                            if s.ground_set() != n || !family.admits_subset(*s) {
                                return Err(mismatch(format!("subset {s}")));
                            }
                        }
                        (PureStrategy::Arc(arc), Domain::Circle | Domain::Interval) => {
                            if domain == Domain::Interval && arc.end() > Rational::one() {
                                return Err(mismatch("subinterval leaves [0, 1]".into()));
                            }
                            if !family.admits_arc(arc) {
                                return Err(mismatch(format!(
                                    "arc of length {}",
                                    canonical(arc.length())
                                )));
                            }
                        }
                        _ => return Err(mismatch("pure strategy of the wrong kind".into())),
                    }
                }
                Ok(())
            }
        }
    }
}

/// Which closed form produced a [`Solution`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance(pub String);

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub hider: MixedStrategy,
    pub searcher: MixedStrategy,
    pub value: Rational,
    pub provenance: Provenance,
}

impl Solution {
    pub fn new(
        hider: MixedStrategy,
        searcher: MixedStrategy,
        value: Rational,
        provenance: impl Into<String>,
    ) -> Self {
        Solution {
            hider,
            searcher,
            value,
            provenance: Provenance(provenance.into()),
        }
    }
}

/// `Σ_{j ∈ S∖H} c_j + Σ_{j ∈ H∖S} π_j`.
pub fn subset_payoff(profile: &CostProfile, hider: Subset, searcher: Subset) -> Result<Rational> {
    let (costs, penalties) = match profile {
        CostProfile::Discrete { costs, penalties } => (costs, penalties),
        CostProfile::Continuous { .. } => {
            return Err(Error::InvalidSpec("subset payoff needs a discrete profile".into()))
        }
    };
    let n = costs.len();
    if hider.ground_set() != n || searcher.ground_set() != n {
        return Err(Error::InvalidStrategy(format!(
            "subsets over [{}] and [{}] for a profile of length {n}",
            hider.ground_set(),
            searcher.ground_set()
        )));
    }
    let commission = searcher.difference(hider);
    let omission = hider.difference(searcher);
    let mut total = Rational::zero();
    for j in 0..n {
        if commission & (1 << j) != 0 {
            total += &costs[j];
        } else if omission & (1 << j) != 0 {
            total += &penalties[j];
        }
    }
    Ok(total)
}

/// Coordinates on which arc geometry is evaluated: exact rationals for
/// closed forms, `f64` for grid sweeps and sampling.
pub trait Coord:
    Clone + PartialOrd + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
}

impl Coord for f64 {}
impl Coord for Rational {}

fn max_of<T: Coord>(a: T, b: T) -> T {
    if a >= b {
        a
    } else {
        b
    }
}

fn min_of<T: Coord>(a: T, b: T) -> T {
    if a <= b {
        a
    } else {
        b
    }
}

/// Measure of `[a, a + la] ∩ [b, b + lb]` on the line.
pub fn line_overlap<T: Coord>(a: T, la: T, b: T, lb: T) -> T {
    let lo = max_of(a.clone(), b.clone());
    let hi = min_of(a + la, b + lb);
    max_of(hi - lo, T::zero())
}

/// Measure of the intersection of two circle arcs with starts in `[0, 1)`
/// and lengths in `[0, 1]`.
pub fn circle_overlap<T: Coord>(a: T, la: T, b: T, lb: T) -> T {
    // The three translates b-1, b, b+1 tile every point of [a, a + la] ⊂ [0, 2).
    let one = T::one();
    line_overlap(a.clone(), la.clone(), b.clone() - one.clone(), lb.clone())
        + line_overlap(a.clone(), la.clone(), b.clone(), lb.clone())
        + line_overlap(a, la, b + one, lb)
}

/// `c·|S ∖ H| + π·|H ∖ S|` for a hider arc `(h, lh)` and searcher arc
/// `(s, ls)`.
pub fn arc_payoff<T: Coord>(circle: bool, c: T, pi: T, h: T, lh: T, s: T, ls: T) -> T {
    let overlap = if circle {
        circle_overlap(h, lh.clone(), s, ls.clone())
    } else {
        line_overlap(h, lh.clone(), s, ls.clone())
    };
    c * (ls - overlap.clone()) + pi * (lh - overlap)
}

/// Exact payoff between two arcs of the given domain.
pub fn arc_symmetric_difference(
    domain: Domain,
    c: &Rational,
    pi: &Rational,
    hider: &Arc,
    searcher: &Arc,
) -> Result<Rational> {
    let circle = match domain {
        Domain::Circle => true,
        Domain::Interval => false,
        Domain::Finite(_) => return Err(Error::InvalidSpec("arcs on a finite domain".into())),
    };
    for arc in [hider, searcher] {
        if !circle && arc.end() > Rational::one() {
            return Err(Error::InvalidStrategy("subinterval leaves [0, 1]".into()));
        }
    }
    Ok(arc_payoff(
        circle,
        c.clone(),
        pi.clone(),
        hider.start.clone(),
        hider.length.clone(),
        searcher.start.clone(),
        searcher.length.clone(),
    ))
}

/// Payoff between equal-length subintervals starting at `a` and `b` with
/// unit cost and penalty: `2|a − b|` when they overlap, `2α` otherwise.
pub fn interval_arc_payoff(alpha: &Rational, a: &Rational, b: &Rational) -> Result<Rational> {
    if !is_unit_interval(alpha) {
        return Err(Error::InvalidArgument("length outside [0, 1]".into()));
    }
    let last = Rational::one() - alpha;
    for (name, start) in [("a", a), ("b", b)] {
        if start.is_negative() || start > &last {
            return Err(Error::InvalidArgument(format!(
                "start {name} = {} outside [0, {}]",
                canonical(start),
                canonical(&last)
            )));
        }
    }
    let gap = (a - b).abs();
    Ok(if &gap <= alpha {
        int(2) * gap
    } else {
        int(2) * alpha
    })
}

/// Expected payoff `P(h, s)` of a strategy pair in `spec`.
pub fn mixed_payoff(spec: &GameSpec, hider: &MixedStrategy, searcher: &MixedStrategy) -> Result<Rational> {
    hider.check_family(spec.domain, &spec.hider, Side::Hider)?;
    searcher.check_family(spec.domain, &spec.searcher, Side::Searcher)?;
    match spec.domain {
        Domain::Finite(n) => {
            // Payoffs are additive over locations and the players randomize
            // independently, so per-location inclusion marginals determine it.
            let (costs, penalties) = (spec.profile.costs().unwrap(), spec.profile.penalties().unwrap());
            let in_hider = hider.marginals(n)?;
            let in_searcher = searcher.marginals(n)?;
            let one = Rational::one();
            let mut total = Rational::zero();
            for j in 0..n {
                total += &costs[j] * &in_searcher[j] * (&one - &in_hider[j]);
                total += &penalties[j] * &in_hider[j] * (&one - &in_searcher[j]);
            }
            Ok(total)
        }
        Domain::Circle | Domain::Interval => {
            let (c, pi) = spec.profile.rates().unwrap();
            match (hider, searcher) {
                (
                    MixedStrategy::UniformStartArc { length: alpha },
                    MixedStrategy::UniformStartArc { length: beta },
                ) => Ok(uniform_arc_value(alpha, beta, c, pi)),
                // Against a uniformly placed arc every point of a fixed arc is
                // covered with probability equal to the uniform arc's length.
                (MixedStrategy::UniformStartArc { length: alpha }, MixedStrategy::Atoms(atoms)) => {
                    weighted_arcs(atoms, |arc| uniform_arc_value(alpha, arc.length(), c, pi))
                }
                (MixedStrategy::Atoms(atoms), MixedStrategy::UniformStartArc { length: beta }) => {
                    weighted_arcs(atoms, |arc| uniform_arc_value(arc.length(), beta, c, pi))
                }
                (MixedStrategy::Atoms(h_atoms), MixedStrategy::Atoms(s_atoms)) => {
                    let mut total = Rational::zero();
                    for h in h_atoms {
                        let PureStrategy::Arc(h_arc) = &h.strategy else {
                            return Err(Error::InvalidStrategy("subset in a continuous game".into()));
                        };
                        for s in s_atoms {
                            let PureStrategy::Arc(s_arc) = &s.strategy else {
                                return Err(Error::InvalidStrategy(
                                    "subset in a continuous game".into(),
                                ));
                            };
                            total += &h.probability
                                * &s.probability
                                * arc_symmetric_difference(spec.domain, c, pi, h_arc, s_arc)?;
                        }
                    }
                    Ok(total)
                }
                _ => Err(Error::InvalidStrategy(
                    "strategy kind not valid on a continuous domain".into(),
                )),
            }
        }
    }
}

fn weighted_arcs(atoms: &[Atom], value: impl Fn(&Arc) -> Rational) -> Result<Rational> {
    let mut total = Rational::zero();
    for atom in atoms {
        let PureStrategy::Arc(arc) = &atom.strategy else {
            return Err(Error::InvalidStrategy("subset in a continuous game".into()));
        };
        total += &atom.probability * value(arc);
    }
    Ok(total)
}

/// `β(1 − α)c + α(1 − β)π`: expected payoff when at least one of the two
/// circle arcs is placed uniformly at random.
pub(crate) fn uniform_arc_value(alpha: &Rational, beta: &Rational, c: &Rational, pi: &Rational) -> Rational {
    let one = Rational::one();
    beta * (&one - alpha) * c + alpha * (&one - beta) * pi
}

/// Maps every atom `A` to `[n] ∖ A` (inclusion probabilities to `1 − q`).
pub fn complement_strategy(strategy: &MixedStrategy, n: usize) -> Result<MixedStrategy> {
    match strategy {
        MixedStrategy::Atoms(atoms) => {
            let mut out = Vec::with_capacity(atoms.len());
            for atom in atoms {
                let PureStrategy::Subset(subset) = atom.strategy else {
                    return Err(Error::InvalidStrategy("cannot complement an arc".into()));
                };
                if subset.ground_set() != n {
                    return Err(Error::InvalidStrategy(format!(
                        "subset over [{}], expected [{n}]",
                        subset.ground_set()
                    )));
                }
                out.push(Atom {
                    strategy: PureStrategy::Subset(subset.complement()),
                    probability: atom.probability.clone(),
                });
            }
            Ok(MixedStrategy::Atoms(out))
        }
        MixedStrategy::IndependentInclusion { inclusion } if inclusion.len() == n => {
            Ok(MixedStrategy::IndependentInclusion {
                inclusion: inclusion.iter().map(|q| Rational::one() - q).collect(),
            })
        }
        MixedStrategy::IndependentInclusion { inclusion } => Err(Error::InvalidStrategy(format!(
            "strategy over {} locations, expected {n}",
            inclusion.len()
        ))),
        MixedStrategy::UniformStartArc { .. } => {
            Err(Error::InvalidStrategy("cannot complement an arc".into()))
        }
    }
}
