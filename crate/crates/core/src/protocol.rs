//! The `(N, w, C)`-run: N interleaved rounds, a hidden three-way partition
//! into computation, X-test and Z-test rounds, and a majority verdict with
//! per-test-type abort.
//!
//! Rounds are modelled at the level of their observable outcome:
//!
//! | round       | honest / benign                       | non-benign Pauli   |
//! |-------------|---------------------------------------|--------------------|
//! | test        | fails with probability `p_noise`      | always fails       |
//! | computation | noise event w.p. `p_noise` corrupts,  | always corrupted   |
//! |             | else outputs 0 w.p. `p_zero`          |                    |
//!
//! A corrupted computation round reports the wrong-answer bit, or a uniform
//! bit under [`CorruptionMode::UniformBit`].

use std::fmt;
use std::str::FromStr;

use rand::distr::{Bernoulli, Distribution};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bounds::alpha_from_q;
use crate::error::{invalid, Error, Result};
use crate::game::Subset;

/// Slack on the promise boundaries, so that e.g. `2/3` counts as `1 - 1/3`.
pub const CLASSIFY_TOLERANCE: f64 = 1e-12;

/// Promise classification of a circuit (or of its zero-outcome probability).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum InstanceLabel {
    Yes,
    No,
    Unpromised,
}

impl InstanceLabel {
    /// YES iff `p_zero >= 1 - q`, NO iff `p_zero <= q`; both boundaries inclusive
    /// up to `CLASSIFY_TOLERANCE`.
    pub fn classify(p_zero: f64, q: f64) -> Self {
        if p_zero >= 1.0 - q - CLASSIFY_TOLERANCE {
            Self::Yes
        } else if p_zero <= q + CLASSIFY_TOLERANCE {
            Self::No
        } else {
            Self::Unpromised
        }
    }
}

impl fmt::Display for InstanceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Yes => "YES",
            Self::No => "NO",
            Self::Unpromised => "UNPROMISED",
        })
    }
}

/// Abort threshold `w` on the failed fraction of each test type.
///
/// A threshold given as a ratio is compared in exact integer arithmetic, so
/// `failed = w |S_A|` is recognised exactly (e.g. `w = 1/10`, 1 of 10 failed).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AbortThreshold {
    Real(f64),
    Ratio { num: u64, den: u64 },
}

impl AbortThreshold {
    pub fn value(&self) -> f64 {
        match *self {
            Self::Real(w) => w,
            Self::Ratio { num, den } => num as f64 / den as f64,
        }
    }

    /// `failed >= w * size`.
    pub fn reached(&self, failed: u64, size: u64) -> bool {
        match *self {
            Self::Real(w) => failed as f64 >= w * size as f64,
            Self::Ratio { num, den } => {
                u128::from(failed) * u128::from(den) >= u128::from(num) * u128::from(size)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if let Self::Ratio { den: 0, .. } = self {
            return Err(invalid("w", "ratio denominator is zero"));
        }
        let w = self.value();
        if !(w > 0.0 && w <= 1.0) {
            return Err(invalid("w", format!("{w} is not in (0, 1]")));
        }
        Ok(())
    }
}

impl From<f64> for AbortThreshold {
    fn from(w: f64) -> Self {
        Self::Real(w)
    }
}

impl FromStr for AbortThreshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let parse = |t: &str| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|e| invalid("w", format!("bad ratio `{s}`: {e}")))
            };
            let w = Self::Ratio {
                num: parse(num)?,
                den: parse(den)?,
            };
            w.validate()?;
            Ok(w)
        } else {
            let w = s
                .parse::<f64>()
                .map_err(|e| invalid("w", format!("bad number `{s}`: {e}")))?;
            Ok(Self::Real(w))
        }
    }
}

impl fmt::Display for AbortThreshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Real(w) => write!(f, "{w}"),
            Self::Ratio { num, den } => write!(f, "{num}/{den}"),
        }
    }
}

impl Serialize for AbortThreshold {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Real(w) => serializer.serialize_f64(*w),
            Self::Ratio { .. } => serializer.serialize_str(&self.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for AbortThreshold {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(f64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Number(w) => Ok(Self::Real(w)),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorruptionMode {
    /// Corrupted computation rounds report the wrong-answer bit.
    #[default]
    WrongBit,
    /// Corrupted computation rounds report a uniformly random bit.
    UniformBit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub n: usize,
    pub w: AbortThreshold,
    pub p_noise: f64,
    pub p_zero: f64,
    /// Inherent error probability of the delegated computation.
    pub q: f64,
    #[serde(default)]
    pub corruption: CorruptionMode,
}

impl ProtocolParams {
    pub fn new(
        n: usize,
        w: impl Into<AbortThreshold>,
        p_noise: f64,
        p_zero: f64,
        q: f64,
    ) -> Result<Self> {
        let p = Self {
            n,
            w: w.into(),
            p_noise,
            p_zero,
            q,
            corruption: CorruptionMode::WrongBit,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_corruption(mut self, mode: CorruptionMode) -> Self {
        self.corruption = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("N", "must be at least 1"));
        }
        self.w.validate()?;
        for (name, p) in [("p_noise", self.p_noise), ("p_zero", self.p_zero)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(name, format!("{p} is not in [0, 1]")));
            }
        }
        if !(0.0..0.5).contains(&self.q) {
            return Err(invalid("q", format!("{} is not in [0, 1/2)", self.q)));
        }
        Ok(())
    }

    pub fn instance_label(&self) -> InstanceLabel {
        InstanceLabel::classify(self.p_zero, self.q)
    }

    /// Output bit that pushes the majority toward the wrong verdict.
    pub fn wrong_bit(&self) -> u8 {
        match self.instance_label() {
            InstanceLabel::Yes => 1,
            InstanceLabel::No => 0,
            InstanceLabel::Unpromised => u8::from(self.p_zero >= 0.5),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoundType {
    Computation,
    XTest,
    ZTest,
}

impl RoundType {
    pub fn is_test(self) -> bool {
        !matches!(self, Self::Computation)
    }
}

/// What the prover does in one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackTag {
    #[default]
    Honest,
    BenignPauli,
    NonBenignPauli,
}

/// Per-round attack tags; the game's `S` is the set of non-benign rounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackPlan(Vec<AttackTag>);

impl AttackPlan {
    pub fn honest(n: usize) -> Self {
        Self(vec![AttackTag::Honest; n])
    }

    pub fn new(tags: Vec<AttackTag>) -> Self {
        Self(tags)
    }

    /// Non-benign attacks on exactly the rounds in `s`.
    pub fn from_subset(s: &Subset) -> Self {
        Self(
            s.as_mask()
                .iter()
                .map(|&hit| {
                    if hit {
                        AttackTag::NonBenignPauli
                    } else {
                        AttackTag::Honest
                    }
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn tags(&self) -> &[AttackTag] {
        &self.0
    }

    /// The rounds tagged non-benign.
    pub fn corruption_set(&self) -> Subset {
        Subset::from_mask(
            self.0
                .iter()
                .map(|&t| t == AttackTag::NonBenignPauli)
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RoundResult {
    Computation { output_bit: u8, corrupted: bool },
    Test { kind: RoundType, failed: bool },
}

impl RoundResult {
    pub fn round_type(&self) -> RoundType {
        match *self {
            Self::Computation { .. } => RoundType::Computation,
            Self::Test { kind, .. } => kind,
        }
    }

    pub fn test_failed(&self) -> Option<bool> {
        match *self {
            Self::Test { failed, .. } => Some(failed),
            Self::Computation { .. } => None,
        }
    }

    pub fn output_bit(&self) -> Option<u8> {
        match *self {
            Self::Computation { output_bit, .. } => Some(output_bit),
            Self::Test { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AbortReason {
    XTest,
    ZTest,
    /// Some partition class is empty.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Accept,
    Reject,
    Abort(AbortReason),
}

impl Verdict {
    pub fn is_abort(&self) -> bool {
        matches!(self, Self::Abort(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Accept => "accept",
            Self::Reject => "reject",
            Self::Abort(AbortReason::XTest) => "abort-x",
            Self::Abort(AbortReason::ZTest) => "abort-z",
            Self::Abort(AbortReason::Degenerate) => "abort-degenerate",
        })
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "accept" => Self::Accept,
            "reject" => Self::Reject,
            "abort-x" => Self::Abort(AbortReason::XTest),
            "abort-z" => Self::Abort(AbortReason::ZTest),
            "abort-degenerate" => Self::Abort(AbortReason::Degenerate),
            other => return Err(invalid("verdict", format!("unknown verdict `{other}`"))),
        })
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Verdict {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Flat counts record of one run. Field names are the CSV keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunCounts {
    pub n: usize,
    pub sc: u64,
    pub sx: u64,
    pub sz: u64,
    pub zeros: u64,
    pub failed_x: u64,
    pub failed_z: u64,
    pub corrupted: u64,
    pub verdict: Verdict,
}

impl RunCounts {
    pub fn key_values(&self) -> [(&'static str, String); 9] {
        [
            ("n", self.n.to_string()),
            ("sc", self.sc.to_string()),
            ("sx", self.sx.to_string()),
            ("sz", self.sz.to_string()),
            ("zeros", self.zeros.to_string()),
            ("failed_x", self.failed_x.to_string()),
            ("failed_z", self.failed_z.to_string()),
            ("corrupted", self.corrupted.to_string()),
            ("verdict", self.verdict.to_string()),
        ]
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    sc: u64,
    sx: u64,
    sz: u64,
    zeros: u64,
    failed_x: u64,
    failed_z: u64,
    corrupted: u64,
}

impl Tally {
    fn push(&mut self, r: RoundResult) {
        match r {
            RoundResult::Computation {
                output_bit,
                corrupted,
            } => {
                self.sc += 1;
                self.zeros += u64::from(output_bit == 0);
                self.corrupted += u64::from(corrupted);
            }
            RoundResult::Test {
                kind: RoundType::XTest,
                failed,
            } => {
                self.sx += 1;
                self.failed_x += u64::from(failed);
            }
            RoundResult::Test { failed, .. } => {
                self.sz += 1;
                self.failed_z += u64::from(failed);
            }
        }
    }

    fn verdict(&self, w: &AbortThreshold) -> Verdict {
        if self.sc == 0 || self.sx == 0 || self.sz == 0 {
            return Verdict::Abort(AbortReason::Degenerate);
        }
        if w.reached(self.failed_x, self.sx) {
            return Verdict::Abort(AbortReason::XTest);
        }
        if w.reached(self.failed_z, self.sz) {
            return Verdict::Abort(AbortReason::ZTest);
        }
        if 2 * self.zeros >= self.sc {
            Verdict::Accept
        } else {
            Verdict::Reject
        }
    }

    fn counts(&self, n: usize, w: &AbortThreshold) -> RunCounts {
        RunCounts {
            n,
            sc: self.sc,
            sx: self.sx,
            sz: self.sz,
            zeros: self.zeros,
            failed_x: self.failed_x,
            failed_z: self.failed_z,
            corrupted: self.corrupted,
            verdict: self.verdict(w),
        }
    }
}

/// Rolls a fair three-sided die per round.
pub fn sample_partition<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<RoundType> {
    (0..n)
        .map(|_| match rng.random_range(0..3u32) {
            0 => RoundType::Computation,
            1 => RoundType::XTest,
            _ => RoundType::ZTest,
        })
        .collect()
}

/// Per-run sampler with the Bernoulli distributions prepared once.
#[derive(Debug, Clone)]
pub struct RoundModel {
    noise: Bernoulli,
    zero: Bernoulli,
    wrong_bit: u8,
    corruption: CorruptionMode,
}

impl RoundModel {
    pub fn new(params: &ProtocolParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            noise: Bernoulli::new(params.p_noise).expect("validated"),
            zero: Bernoulli::new(params.p_zero).expect("validated"),
            wrong_bit: params.wrong_bit(),
            corruption: params.corruption,
        })
    }

    pub fn simulate<R: Rng + ?Sized>(
        &self,
        round: RoundType,
        attack: AttackTag,
        rng: &mut R,
    ) -> RoundResult {
        match round {
            RoundType::XTest | RoundType::ZTest => RoundResult::Test {
                kind: round,
                failed: attack == AttackTag::NonBenignPauli || self.noise.sample(rng),
            },
            RoundType::Computation => {
                let corrupted = attack == AttackTag::NonBenignPauli || self.noise.sample(rng);
                let output_bit = if corrupted {
                    match self.corruption {
                        CorruptionMode::WrongBit => self.wrong_bit,
                        CorruptionMode::UniformBit => u8::from(rng.random::<bool>()),
                    }
                } else {
                    u8::from(!self.zero.sample(rng))
                };
                RoundResult::Computation {
                    output_bit,
                    corrupted,
                }
            }
        }
    }
}

/// Outcome of one round under the given attack.
pub fn simulate_round<R: Rng + ?Sized>(
    round: RoundType,
    params: &ProtocolParams,
    attack: AttackTag,
    rng: &mut R,
) -> Result<RoundResult> {
    Ok(RoundModel::new(params)?.simulate(round, attack, rng))
}

/// Verdict for a completed run.
///
/// Abort on an empty partition class, then on `failed_A >= w |S_A|` for X and
/// then Z; otherwise accept iff at least half the computation rounds read 0.
pub fn verdict(results: &[RoundResult], w: impl Into<AbortThreshold>) -> Verdict {
    let mut tally = Tally::default();
    results.iter().for_each(|&r| tally.push(r));
    tally.verdict(&w.into())
}

/// One full run: partition, then every round, then the verdict.
///
/// `plan = None` is the honest prover.
pub fn run_protocol<R: Rng + ?Sized>(
    params: &ProtocolParams,
    plan: Option<&AttackPlan>,
    rng: &mut R,
) -> Result<RunCounts> {
    let partition = sample_partition(params.n, rng);
    run_with_partition(params, &partition, plan, rng)
}

/// A run over a caller-supplied partition.
pub fn run_with_partition<R: Rng + ?Sized>(
    params: &ProtocolParams,
    partition: &[RoundType],
    plan: Option<&AttackPlan>,
    rng: &mut R,
) -> Result<RunCounts> {
    let model = RoundModel::new(params)?;
    if partition.len() != params.n {
        return Err(invalid(
            "partition",
            format!("has {} rounds, N = {}", partition.len(), params.n),
        ));
    }
    let mut tally = Tally::default();
    match plan {
        Some(plan) => {
            if plan.len() != params.n {
                return Err(invalid(
                    "plan",
                    format!("has {} rounds, N = {}", plan.len(), params.n),
                ));
            }
            for (&round, &attack) in partition.iter().zip(plan.tags()) {
                tally.push(model.simulate(round, attack, rng));
            }
        }
        None => {
            for &round in partition {
                tally.push(model.simulate(round, AttackTag::Honest, rng));
            }
        }
    }
    Ok(tally.counts(params.n, &params.w))
}

/// Fewest corrupted computation rounds that can flip the majority:
/// the least integer strictly above `|C| (1 - 2q) / (2 (1 - q))`.
pub fn min_corrupted_for_flip(c_size: u64, q: f64) -> Result<u64> {
    let alpha = alpha_from_q(q)?;
    let mut m = (c_size as f64 * alpha).floor() as u64 + 1;
    // settle rounding at integral boundaries on the unscaled inequality
    // 2 (1 - q) m > |C| (1 - 2q)
    let exceeds = |m: u64| 2.0 * (1.0 - q) * m as f64 > c_size as f64 * (1.0 - 2.0 * q);
    while m > 1 && exceeds(m - 1) {
        m -= 1;
    }
    while !exceeds(m) {
        m += 1;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn rng(seed: u64) -> Xoshiro256PlusPlus {
        Xoshiro256PlusPlus::seed_from_u64(seed)
    }

    fn comp(bit: u8) -> RoundResult {
        RoundResult::Computation {
            output_bit: bit,
            corrupted: false,
        }
    }

    fn test(kind: RoundType, failed: bool) -> RoundResult {
        RoundResult::Test { kind, failed }
    }

    #[test]
    fn verdict_examples() {
        use RoundType::{XTest, ZTest};
        let base = [comp(0), comp(0), test(XTest, false), test(XTest, false)];
        let mut rounds = base.to_vec();
        rounds.extend([test(ZTest, true), test(ZTest, false)]);
        assert_eq!(verdict(&rounds, 0.5), Verdict::Abort(AbortReason::ZTest));

        let mut rounds = base.to_vec();
        rounds.extend([test(ZTest, false), test(ZTest, false)]);
        assert_eq!(verdict(&rounds, 0.5), Verdict::Accept);

        let rounds = [
            comp(0),
            comp(1),
            comp(1),
            test(XTest, false),
            test(ZTest, false),
        ];
        assert_eq!(verdict(&rounds, 0.5), Verdict::Reject);
    }

    #[test]
    fn verdict_degenerate_partitions() {
        let only_tests = [test(RoundType::XTest, false), test(RoundType::ZTest, false)];
        assert_eq!(
            verdict(&only_tests, 0.5),
            Verdict::Abort(AbortReason::Degenerate)
        );
        let no_z = [comp(0), test(RoundType::XTest, false)];
        assert_eq!(verdict(&no_z, 0.5), Verdict::Abort(AbortReason::Degenerate));
    }

    #[test]
    fn abort_boundary_is_exact_for_ratios() {
        let w: AbortThreshold = "1/10".parse().unwrap();
        assert!(w.reached(1, 10));
        assert!(!w.reached(0, 10));
        assert!(w.reached(3, 30));
        assert!(!w.reached(2, 30));
        // as a binary float 0.1 * 10 rounds to 1.0 as well
        assert!(AbortThreshold::Real(0.5).reached(3, 6));
        assert!(!AbortThreshold::Real(0.5).reached(2, 6));
        assert!("0/3".parse::<AbortThreshold>().is_err());
        assert!("1/0".parse::<AbortThreshold>().is_err());
    }

    #[test]
    fn tie_goes_to_accept() {
        let rounds = [
            comp(0),
            comp(1),
            test(RoundType::XTest, false),
            test(RoundType::ZTest, false),
        ];
        assert_eq!(verdict(&rounds, 0.5), Verdict::Accept);
    }

    #[test]
    fn round_semantics() {
        let mut r = rng(1);
        let clean = ProtocolParams::new(10, 0.5, 0.0, 1.0, 1.0 / 3.0).unwrap();
        for _ in 0..100 {
            assert_eq!(
                simulate_round(RoundType::XTest, &clean, AttackTag::Honest, &mut r).unwrap(),
                test(RoundType::XTest, false)
            );
            assert_eq!(
                simulate_round(RoundType::ZTest, &clean, AttackTag::NonBenignPauli, &mut r)
                    .unwrap(),
                test(RoundType::ZTest, true)
            );
            assert_eq!(
                simulate_round(RoundType::Computation, &clean, AttackTag::Honest, &mut r).unwrap(),
                comp(0)
            );
            assert_eq!(
                simulate_round(
                    RoundType::Computation,
                    &clean,
                    AttackTag::BenignPauli,
                    &mut r
                )
                .unwrap(),
                comp(0)
            );
            assert_eq!(
                simulate_round(
                    RoundType::Computation,
                    &clean,
                    AttackTag::NonBenignPauli,
                    &mut r
                )
                .unwrap(),
                RoundResult::Computation {
                    output_bit: 1,
                    corrupted: true
                }
            );
        }
    }

    #[test]
    fn partition_is_uniform() {
        let mut r = rng(2);
        let samples = 100_000;
        let mut counts = [0f64; 3];
        for _ in 0..samples {
            counts[sample_partition(1, &mut r)[0] as usize] += 1.0;
        }
        let expect = samples as f64 / 3.0;
        let chi2: f64 = counts.iter().map(|c| (c - expect).powi(2) / expect).sum();
        // chi-square, 2 dof, 0.001 upper quantile
        assert!(chi2 < 13.815_510_557_964_274, "chi2 = {chi2}");
    }

    #[test]
    fn honest_zero_noise_accepts() {
        let mut r = rng(3);
        let p = ProtocolParams::new(60, 0.5, 0.0, 1.0, 1.0 / 3.0).unwrap();
        for _ in 0..200 {
            let c = run_protocol(&p, None, &mut r).unwrap();
            let degenerate = c.sc == 0 || c.sx == 0 || c.sz == 0;
            assert_eq!(
                c.verdict,
                if degenerate {
                    Verdict::Abort(AbortReason::Degenerate)
                } else {
                    Verdict::Accept
                }
            );
        }
    }

    #[test]
    fn full_attack_aborts() {
        let mut r = rng(4);
        let p = ProtocolParams::new(30, 0.9, 0.1, 0.8, 0.2).unwrap();
        let plan = AttackPlan::from_subset(&Subset::full(30));
        for _ in 0..200 {
            assert!(run_protocol(&p, Some(&plan), &mut r)
                .unwrap()
                .verdict
                .is_abort());
        }
    }

    #[test]
    fn plan_length_is_checked() {
        let p = ProtocolParams::new(5, 0.5, 0.0, 1.0, 0.1).unwrap();
        assert!(run_protocol(&p, Some(&AttackPlan::honest(4)), &mut rng(0)).is_err());
    }

    #[test]
    fn min_corrupted_examples() {
        assert_eq!(min_corrupted_for_flip(100, 1.0 / 3.0).unwrap(), 26);
        assert_eq!(min_corrupted_for_flip(0, 0.2).unwrap(), 1);
        assert_eq!(min_corrupted_for_flip(4, 0.0).unwrap(), 3);
        assert_eq!(min_corrupted_for_flip(4, 1.0 / 3.0).unwrap(), 2);
    }

    #[test]
    fn labels_and_wrong_bits() {
        assert_eq!(
            InstanceLabel::classify(2.0 / 3.0, 1.0 / 3.0),
            InstanceLabel::Yes
        );
        assert_eq!(
            InstanceLabel::classify(0.5, 1.0 / 3.0),
            InstanceLabel::Unpromised
        );
        assert_eq!(InstanceLabel::classify(0.3, 0.3), InstanceLabel::No);
        let yes = ProtocolParams::new(3, 0.5, 0.0, 0.9, 0.1).unwrap();
        let no = ProtocolParams::new(3, 0.5, 0.0, 0.1, 0.1).unwrap();
        assert_eq!((yes.wrong_bit(), no.wrong_bit()), (1, 0));
    }

    #[test]
    fn counts_serialize_flat() {
        let c = RunCounts {
            n: 6,
            sc: 2,
            sx: 2,
            sz: 2,
            zeros: 2,
            failed_x: 0,
            failed_z: 1,
            corrupted: 0,
            verdict: Verdict::Abort(AbortReason::ZTest),
        };
        let json = serde_json::to_value(c).unwrap();
        assert_eq!(json["verdict"], "abort-z");
        let keys: Vec<_> = c.key_values().iter().map(|(k, _)| *k).collect();
        assert_eq!(
            keys,
            [
                "n",
                "sc",
                "sx",
                "sz",
                "zeros",
                "failed_x",
                "failed_z",
                "corrupted",
                "verdict"
            ]
        );
        let back: RunCounts = serde_json::from_value(json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn threshold_serde_accepts_numbers_and_ratios() {
        let w: AbortThreshold = serde_json::from_str("\"1/4\"").unwrap();
        assert_eq!(w, AbortThreshold::Ratio { num: 1, den: 4 });
        let w: AbortThreshold = serde_json::from_str("0.25").unwrap();
        assert_eq!(w, AbortThreshold::Real(0.25));
    }
}
