//! Seeded Monte-Carlo estimation of expected payoffs.
//!
//! Trials are split into fixed blocks of [`BLOCK_TRIALS`]. Block `b` draws
//! from ChaCha8 seeded with the user seed on stream `b`, so every trial's
//! randomness depends only on `(seed, trial index)`. Blocks run in
//! parallel; their running moments are merged in a fixed binary tree, so
//! serial and parallel runs produce identical bits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{arc_payoff, Domain, Family, GameSpec, MixedStrategy, PureStrategy, Side};
use crate::rational::{canonical, to_f64, Rational};

/// Trials per random stream.
pub const BLOCK_TRIALS: u64 = 1 << 16;

/// Largest atom-pair table precomputed for finite games.
const MAX_TABLE_CELLS: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub trials: u64,
    pub mean: f64,
    /// Sample standard deviation over `√trials`.
    pub std_error: f64,
    pub seed: u64,
    /// Short hash of the game's canonical description.
    pub spec_digest: String,
}

/// Count, mean and sum of squared deviations of a block of samples.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    const EMPTY: Moments = Moments {
        count: 0,
        mean: 0.0,
        m2: 0.0,
    };

    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(a: Moments, b: Moments) -> Moments {
        if a.count == 0 {
            return b;
        }
        if b.count == 0 {
            return a;
        }
        let count = a.count + b.count;
        let delta = b.mean - a.mean;
        let weight = b.count as f64 / count as f64;
        Moments {
            count,
            mean: a.mean + delta * weight,
            m2: a.m2 + b.m2 + delta * delta * a.count as f64 * weight,
        }
    }
}

fn merge_tree(parts: &[Moments]) -> Moments {
    match parts {
        [] => Moments::EMPTY,
        [one] => *one,
        _ => {
            let (left, right) = parts.split_at(parts.len() / 2);
            Moments::merge(merge_tree(left), merge_tree(right))
        }
    }
}

/// Inverse-CDF selection over atoms in listed order.
#[derive(Debug, Clone)]
struct Categorical {
    cumulative: Vec<f64>,
}

impl Categorical {
    fn new(probabilities: &[Rational]) -> Self {
        let mut total = Rational::from_integer(0.into());
        let cumulative = probabilities
            .iter()
            .map(|p| {
                total += p;
                to_f64(&total)
            })
            .collect();
        Categorical { cumulative }
    }

    fn sample(&self, u: f64) -> usize {
        let i = self.cumulative.partition_point(|&c| c <= u);
        // Rounding can leave the last cumulative just below one.
        i.min(self.cumulative.len() - 1)
    }
}

enum ArcSampler {
    Atoms(Categorical, Vec<(f64, f64)>),
    Uniform(f64),
}

impl ArcSampler {
    fn new(strategy: &MixedStrategy) -> Result<Self> {
        match strategy {
            MixedStrategy::UniformStartArc { length } => Ok(ArcSampler::Uniform(to_f64(length))),
            MixedStrategy::Atoms(atoms) => {
                let mut arcs = Vec::with_capacity(atoms.len());
                let mut probabilities = Vec::with_capacity(atoms.len());
                for atom in atoms {
                    let PureStrategy::Arc(arc) = &atom.strategy else {
                        return Err(Error::InvalidStrategy("subset in a continuous game".into()));
                    };
                    arcs.push(arc.to_f64());
                    probabilities.push(atom.probability.clone());
                }
                Ok(ArcSampler::Atoms(Categorical::new(&probabilities), arcs))
            }
            MixedStrategy::IndependentInclusion { .. } => Err(Error::InvalidStrategy(
                "power-set strategy in a continuous game".into(),
            )),
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> (f64, f64) {
        let u: f64 = rng.random();
        match self {
            ArcSampler::Uniform(length) => (u, *length),
            ArcSampler::Atoms(pick, arcs) => arcs[pick.sample(u)],
        }
    }
}

enum SetSampler {
    Atoms(Categorical, Vec<u32>),
    Independent(Vec<f64>),
}

impl SetSampler {
    fn new(strategy: &MixedStrategy) -> Result<Self> {
        match strategy {
            MixedStrategy::IndependentInclusion { inclusion } => {
                Ok(SetSampler::Independent(inclusion.iter().map(to_f64).collect()))
            }
            MixedStrategy::Atoms(atoms) => {
                let mut sets = Vec::with_capacity(atoms.len());
                let mut probabilities = Vec::with_capacity(atoms.len());
                for atom in atoms {
                    let PureStrategy::Subset(s) = &atom.strategy else {
                        return Err(Error::InvalidStrategy("arc in a finite game".into()));
                    };
                    sets.push(s.bits());
                    probabilities.push(atom.probability.clone());
                }
                Ok(SetSampler::Atoms(Categorical::new(&probabilities), sets))
            }
            MixedStrategy::UniformStartArc { .. } => {
                Err(Error::InvalidStrategy("arc strategy in a finite game".into()))
            }
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> u32 {
        match self {
            SetSampler::Atoms(pick, sets) => sets[pick.sample(rng.random())],
            SetSampler::Independent(inclusion) => {
                let mut bits = 0;
                for (j, &q) in inclusion.iter().enumerate() {
                    if rng.random::<f64>() < q {
                        bits |= 1 << j;
                    }
                }
                bits
            }
        }
    }
}

enum Trial {
    Arcs {
        circle: bool,
        c: f64,
        pi: f64,
        hider: ArcSampler,
        searcher: ArcSampler,
    },
    /// Both strategies are atom lists; payoffs of every atom pair are
    /// tabulated up front.
    Table {
        hider: Categorical,
        searcher: Categorical,
        cols: usize,
        payoffs: Vec<f64>,
    },
    Sets {
        costs: Vec<f64>,
        penalties: Vec<f64>,
        hider: SetSampler,
        searcher: SetSampler,
    },
}

fn set_payoff(costs: &[f64], penalties: &[f64], hider: u32, searcher: u32) -> f64 {
    let mut total = 0.0;
    let (mut commission, mut omission) = (searcher & !hider, hider & !searcher);
    while commission != 0 {
        total += costs[commission.trailing_zeros() as usize];
        commission &= commission - 1;
    }
    while omission != 0 {
        total += penalties[omission.trailing_zeros() as usize];
        omission &= omission - 1;
    }
    total
}

impl Trial {
    fn new(spec: &GameSpec, hider: &MixedStrategy, searcher: &MixedStrategy) -> Result<Self> {
        hider.check_family(spec.domain, &spec.hider, Side::Hider)?;
        searcher.check_family(spec.domain, &spec.searcher, Side::Searcher)?;
        match spec.domain {
            Domain::Circle | Domain::Interval => {
                let (c, pi) = spec.profile.rates().unwrap();
                Ok(Trial::Arcs {
                    circle: spec.domain == Domain::Circle,
                    c: to_f64(c),
                    pi: to_f64(pi),
                    hider: ArcSampler::new(hider)?,
                    searcher: ArcSampler::new(searcher)?,
                })
            }
            Domain::Finite(_) => {
                let costs: Vec<f64> = spec.profile.costs().unwrap().iter().map(to_f64).collect();
                let penalties: Vec<f64> = spec.profile.penalties().unwrap().iter().map(to_f64).collect();
                let hider = SetSampler::new(hider)?;
                let searcher = SetSampler::new(searcher)?;
                if let (SetSampler::Atoms(hp, hs), SetSampler::Atoms(sp, ss)) = (&hider, &searcher) {
                    if hs.len() * ss.len() <= MAX_TABLE_CELLS {
                        let payoffs = hs
                            .iter()
                            .flat_map(|&h| ss.iter().map(move |&s| (h, s)))
                            .map(|(h, s)| set_payoff(&costs, &penalties, h, s))
                            .collect();
                        return Ok(Trial::Table {
                            hider: hp.clone(),
                            searcher: sp.clone(),
                            cols: ss.len(),
                            payoffs,
                        });
                    }
                }
                Ok(Trial::Sets {
                    costs,
                    penalties,
                    hider,
                    searcher,
                })
            }
        }
    }

    fn run(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Trial::Arcs {
                circle,
                c,
                pi,
                hider,
                searcher,
            } => {
                let (h, lh) = hider.sample(rng);
                let (s, ls) = searcher.sample(rng);
                arc_payoff(*circle, *c, *pi, h, lh, s, ls)
            }
            Trial::Table {
                hider,
                searcher,
                cols,
                payoffs,
            } => {
                let i = hider.sample(rng.random());
                let j = searcher.sample(rng.random());
                payoffs[i * cols + j]
            }
            Trial::Sets {
                costs,
                penalties,
                hider,
                searcher,
            } => {
                let h = hider.sample(rng);
                let s = searcher.sample(rng);
                set_payoff(costs, penalties, h, s)
            }
        }
    }
}

/// Canonical one-line description of a game, stable across runs.
pub fn spec_key(spec: &GameSpec) -> String {
    let family = |f: &Family| match f {
        Family::FreeLength => "free".to_string(),
        Family::FixedLength(x) => format!("fixed:{}", canonical(x)),
        Family::PowerSet => "powerset".to_string(),
        Family::FixedCardinality(k) => format!("card:{k}"),
        Family::Explicit(sets) => {
            let sets: Vec<String> = sets.iter().map(|s| s.to_string()).collect();
            format!("sets:{}", sets.join(";"))
        }
    };
    let list = |xs: &[Rational]| xs.iter().map(canonical).collect::<Vec<_>>().join(",");
    let (domain, profile) = match spec.domain {
        Domain::Circle | Domain::Interval => {
            let (c, pi) = spec.profile.rates().unwrap();
            let name = if spec.domain == Domain::Circle { "circle" } else { "interval" };
            (name.to_string(), format!("c={} pi={}", canonical(c), canonical(pi)))
        }
        Domain::Finite(n) => (
            format!("finite:{n}"),
            format!(
                "c={} pi={}",
                list(spec.profile.costs().unwrap()),
                list(spec.profile.penalties().unwrap())
            ),
        ),
    };
    format!(
        "{domain} hider={} searcher={} {profile}",
        family(&spec.hider),
        family(&spec.searcher)
    )
}

/// First 16 hex digits of the SHA-256 of [`spec_key`].
pub fn spec_digest(spec: &GameSpec) -> String {
    Sha256::digest(spec_key(spec).as_bytes())
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Estimates `P(hider, searcher)` from `trials` independent plays.
pub fn estimate_payoff(
    spec: &GameSpec,
    hider: &MixedStrategy,
    searcher: &MixedStrategy,
    trials: u64,
    seed: u64,
) -> Result<SimulationResult> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let trial = Trial::new(spec, hider, searcher)?;
    let blocks = trials.div_ceil(BLOCK_TRIALS);
    let base = ChaCha8Rng::seed_from_u64(seed);
    let parts: Vec<Moments> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = base.clone();
            rng.set_stream(block);
            let count = BLOCK_TRIALS.min(trials - block * BLOCK_TRIALS);
            let mut moments = Moments::EMPTY;
            for _ in 0..count {
                moments.push(trial.run(&mut rng));
            }
            moments
        })
        .collect();
    let total = merge_tree(&parts);
    let std_error = if trials > 1 {
        (total.m2.max(0.0) / (trials - 1) as f64).sqrt() / (trials as f64).sqrt()
    } else {
        0.0
    };
    Ok(SimulationResult {
        trials,
        mean: total.mean,
        std_error,
        seed,
        spec_digest: spec_digest(spec),
    })
}
