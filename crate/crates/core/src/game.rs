//! The one-shot `(alpha, w)`-avoidance game with epsilon-coins.
//!
//! The verifier hides a random set `C` of rounds, each round joining `C`
//! independently with probability 1/3. The prover picks a set `S` of rounds
//! to corrupt. Every corrupted round outside `C` is caught unless its coin
//! comes up 0 (probability `epsilon`). The prover wins when
//!
//! * a) `|S ∩ C| > alpha |C|`, and
//! * b) `|{x in S \ C : Y_x = 1}| <= w (N - |C|)`.
//!
//! Coins for rounds in `S ∩ C` never influence the outcome and are not drawn.

use rand::distr::{Bernoulli, Distribution};
use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::exact_binomial_cdf;
use crate::error::{invalid, Error, Result};
use crate::experiments::TrialSummary;
use crate::rng::StreamKey;

/// Largest `N` the exact oracle will enumerate.
pub const ENUMERATION_LIMIT: usize = 24;

const GAME_STREAM: u64 = 0x6a6d;

/// A subset of the rounds `{0, .., N-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subset {
    members: Vec<bool>,
}

impl Subset {
    pub fn empty(n: usize) -> Self {
        Self {
            members: vec![false; n],
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            members: vec![true; n],
        }
    }

    /// Builds a subset from zero-based indices; rejects indices `>= n`.
    pub fn from_indices<I: IntoIterator<Item = usize>>(n: usize, indices: I) -> Result<Self> {
        let mut set = Self::empty(n);
        for i in indices {
            if i >= n {
                return Err(invalid("S", format!("index {i} is outside 0..{n}")));
            }
            set.members[i] = true;
        }
        Ok(set)
    }

    pub fn from_mask(members: Vec<bool>) -> Self {
        Self { members }
    }

    /// Size of the universe the subset lives in.
    pub fn universe(&self) -> usize {
        self.members.len()
    }

    pub fn count(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members[i]
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
    }

    pub fn as_mask(&self) -> &[bool] {
        &self.members
    }

    fn bits(&self) -> u32 {
        self.indices().fold(0u32, |acc, i| acc | (1 << i))
    }
}

/// Parameters of one game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    pub n: usize,
    pub alpha: f64,
    pub w: f64,
    #[serde(default)]
    pub epsilon: f64,
}

impl GameParams {
    pub fn new(n: usize, alpha: f64, w: f64, epsilon: f64) -> Result<Self> {
        let p = Self {
            n,
            alpha,
            w,
            epsilon,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..0.5).contains(&self.alpha) {
            return Err(invalid(
                "alpha",
                format!("{} is not in [0, 1/2)", self.alpha),
            ));
        }
        if !(0.0..=1.0).contains(&self.w) {
            return Err(invalid("w", format!("{} is not in [0, 1]", self.w)));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(invalid(
                "epsilon",
                format!("{} is not in [0, 1]", self.epsilon),
            ));
        }
        Ok(())
    }
}

/// How the prover chooses `S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AdversaryStrategy {
    EmptySet,
    FullSet,
    /// A fixed set of zero-based round indices.
    FixedSet {
        members: Vec<usize>,
    },
    /// A uniformly random subset of the given size, drawn afresh per play.
    UniformRandomOfSize {
        size: usize,
    },
    /// Size drawn from `weights` over `0..=N`, then a uniform subset of it.
    SizeDistribution {
        weights: Vec<f64>,
    },
}

impl AdversaryStrategy {
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            Self::EmptySet | Self::FullSet => Ok(()),
            Self::FixedSet { members } => {
                Subset::from_indices(n, members.iter().copied()).map(|_| ())
            }
            Self::UniformRandomOfSize { size } => {
                if *size > n {
                    return Err(invalid("size", format!("{size} exceeds N = {n}")));
                }
                Ok(())
            }
            Self::SizeDistribution { weights } => {
                if weights.len() != n + 1 {
                    return Err(invalid(
                        "weights",
                        format!("need N + 1 = {} weights, got {}", n + 1, weights.len()),
                    ));
                }
                if weights.iter().any(|w| !(*w >= 0.0)) {
                    return Err(invalid("weights", "must be nonnegative"));
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(invalid("weights", format!("sum to {total}, not 1")));
                }
                Ok(())
            }
        }
    }

    /// Short label used in reports and CSV rows.
    pub fn label(&self) -> String {
        match self {
            Self::EmptySet => "empty".into(),
            Self::FullSet => "full".into(),
            Self::FixedSet { members } => format!("fixed:{}", members.len()),
            Self::UniformRandomOfSize { size } => format!("uniform:{size}"),
            Self::SizeDistribution { .. } => "size-distribution".into(),
        }
    }

    /// The subset if the strategy is deterministic.
    pub fn fixed_subset(&self, n: usize) -> Result<Option<Subset>> {
        Ok(match self {
            Self::EmptySet => Some(Subset::empty(n)),
            Self::FullSet => Some(Subset::full(n)),
            Self::FixedSet { members } => Some(Subset::from_indices(n, members.iter().copied())?),
            _ => None,
        })
    }

    /// Draws `S`. Deterministic strategies ignore `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Subset {
        match self {
            Self::EmptySet => Subset::empty(n),
            Self::FullSet => Subset::full(n),
            Self::FixedSet { members } => {
                Subset::from_indices(n, members.iter().copied()).expect("validated strategy")
            }
            Self::UniformRandomOfSize { size } => uniform_subset(n, *size, rng),
            Self::SizeDistribution { weights } => {
                let size = sample_weighted(weights, rng);
                uniform_subset(n, size, rng)
            }
        }
    }
}

fn uniform_subset<R: Rng + ?Sized>(n: usize, size: usize, rng: &mut R) -> Subset {
    match size {
        0 => Subset::empty(n),
        s if s == n => Subset::full(n),
        s => {
            let mut members = vec![false; n];
            for i in index::sample(rng, n, s) {
                members[i] = true;
            }
            Subset::from_mask(members)
        }
    }
}

fn sample_weighted<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w / total;
        if u < acc {
            return i;
        }
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// Result of one play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameOutcome {
    pub c_size: usize,
    pub s_size: usize,
    pub s_cap_c: usize,
    pub undetected_off_c: usize,
    pub prover_wins: bool,
}

/// Draws `C`: each round joins independently with probability exactly 1/3.
pub fn sample_c<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Subset {
    Subset::from_mask((0..n).map(|_| rng.random_range(0..3u32) == 0).collect())
}

/// Conditions a) and b) with strict `>` and non-strict `<=`.
pub fn win_condition(
    params: &GameParams,
    c_size: usize,
    s_cap_c: usize,
    undetected_off_c: usize,
) -> bool {
    let hits = s_cap_c as f64 > params.alpha * c_size as f64;
    let hidden = undetected_off_c as f64 <= params.w * (params.n - c_size) as f64;
    hits && hidden
}

/// One play against a fixed `S`.
pub fn play<R: Rng + ?Sized>(params: &GameParams, s: &Subset, rng: &mut R) -> GameOutcome {
    assert_eq!(s.universe(), params.n, "S must live in 0..N");
    let coin = Bernoulli::new(1.0 - params.epsilon).expect("epsilon validated");
    let mut c_size = 0;
    let mut s_cap_c = 0;
    let mut undetected = 0;
    for &in_s in s.as_mask() {
        let in_c = rng.random_range(0..3u32) == 0;
        if in_c {
            c_size += 1;
            s_cap_c += usize::from(in_s);
        } else if in_s && coin.sample(rng) {
            undetected += 1;
        }
    }
    GameOutcome {
        c_size,
        s_size: s.count(),
        s_cap_c,
        undetected_off_c: undetected,
        prover_wins: win_condition(params, c_size, s_cap_c, undetected),
    }
}

/// Exact win probability by enumerating all `2^N` sets `C`.
///
/// For each `C`, condition b) holds with probability
/// `Pr[Binomial(|S \ C|, 1 - epsilon) <= floor(w (N - |C|))]`.
pub fn exact_win_probability(params: &GameParams, s: &Subset) -> Result<f64> {
    params.validate()?;
    let n = params.n;
    if n > ENUMERATION_LIMIT {
        return Err(Error::EnumerationGuard {
            n,
            limit: ENUMERATION_LIMIT,
        });
    }
    if s.universe() != n {
        return Err(invalid(
            "S",
            format!("lives in 0..{}, expected 0..{n}", s.universe()),
        ));
    }
    let s_bits = s.bits();
    let s_size = s.count();

    // Pr[C] depends only on |C|; Pr[b | C] only on (|C|, |S \ C|).
    let weight: Vec<f64> = (0..=n)
        .map(|c| (1.0f64 / 3.0).powi(c as i32) * (2.0f64 / 3.0).powi((n - c) as i32))
        .collect();
    let mut hidden = vec![vec![0.0; s_size + 1]; n + 1];
    for (c_size, row) in hidden.iter_mut().enumerate() {
        let allowed = (params.w * (n - c_size) as f64).floor() as i64;
        for (off, slot) in row.iter_mut().enumerate() {
            *slot = exact_binomial_cdf(off as u64, 1.0 - params.epsilon, allowed)?;
        }
    }

    let mut total = 0.0;
    for c in 0u32..(1u32 << n) {
        let c_size = c.count_ones() as usize;
        let cap = (c & s_bits).count_ones() as usize;
        if !(cap as f64 > params.alpha * c_size as f64) {
            continue;
        }
        total += weight[c_size] * hidden[c_size][s_size - cap];
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Monte Carlo estimate of the prover's win probability.
///
/// Trial `i` draws from the stream `(seed, i)`, so the result does not depend
/// on how rayon schedules the trials.
pub fn monte_carlo_win_probability(
    params: &GameParams,
    strategy: &AdversaryStrategy,
    trials: u64,
    seed: u64,
) -> Result<TrialSummary> {
    monte_carlo_with_key(
        params,
        strategy,
        trials,
        StreamKey::new(seed, GAME_STREAM),
        seed,
    )
}

fn monte_carlo_with_key(
    params: &GameParams,
    strategy: &AdversaryStrategy,
    trials: u64,
    key: StreamKey,
    seed: u64,
) -> Result<TrialSummary> {
    params.validate()?;
    strategy.validate(params.n)?;
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    let start = std::time::Instant::now();
    let fixed = strategy.fixed_subset(params.n)?;
    let wins = (0..trials)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = key.trial(i);
            match &fixed {
                Some(s) => play(params, s, &mut rng).prover_wins,
                None => {
                    let s = strategy.sample(params.n, &mut rng);
                    play(params, &s, &mut rng).prover_wins
                }
            }
        })
        .count() as u64;
    Ok(TrialSummary::new(wins, trials, seed).timed(start))
}

/// One row of a size sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub size: usize,
    pub summary: TrialSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub params: GameParams,
    pub entries: Vec<SweepEntry>,
    /// Size with the largest point estimate (first on ties).
    pub argmax_size: usize,
}

impl SweepReport {
    pub fn max_ci_high(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.summary.ci_high)
            .fold(0.0, f64::max)
    }
}

/// Estimates the win probability of `UniformRandomOfSize(m)` for each `m`.
///
/// Each size draws from its own stream keyed by the size itself, so adding or
/// reordering sizes leaves the other rows unchanged.
pub fn strategy_sweep(
    params: &GameParams,
    sizes: &[usize],
    trials: u64,
    seed: u64,
) -> Result<SweepReport> {
    let root = StreamKey::new(seed, GAME_STREAM);
    let mut entries = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let strategy = AdversaryStrategy::UniformRandomOfSize { size };
        let summary =
            monte_carlo_with_key(params, &strategy, trials, root.child(size as u64), seed)?;
        entries.push(SweepEntry { size, summary });
    }
    let argmax_size = entries
        .iter()
        .fold(None::<&SweepEntry>, |best, e| match best {
            Some(b) if b.summary.point_estimate >= e.summary.point_estimate => Some(b),
            _ => Some(e),
        })
        .map_or(0, |e| e.size);
    Ok(SweepReport {
        params: *params,
        entries,
        argmax_size,
    })
}

/// Keyed Monte Carlo for callers that manage their own stream hierarchy.
pub(crate) fn monte_carlo_keyed(
    params: &GameParams,
    strategy: &AdversaryStrategy,
    trials: u64,
    key: StreamKey,
    seed: u64,
) -> Result<TrialSummary> {
    monte_carlo_with_key(params, strategy, trials, key, seed)
}
