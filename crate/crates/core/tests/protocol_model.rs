//! Protocol runs against the avoidance game and against exact binomials.

use robust_vqc::bounds::exact_binomial_sf;
use robust_vqc::game::{win_condition, GameParams, Subset};
use robust_vqc::protocol::{
    run_with_partition, AbortReason, AttackPlan, ProtocolParams, RoundType, Verdict,
};
use robust_vqc::rng::StreamKey;

fn partitions(n: usize) -> impl Iterator<Item = Vec<RoundType>> {
    (0..3usize.pow(n as u32)).map(move |mut code| {
        (0..n)
            .map(|_| {
                let t = [RoundType::Computation, RoundType::XTest, RoundType::ZTest][code % 3];
                code /= 3;
                t
            })
            .collect()
    })
}

/// Noiseless YES instance: every attacked test round fails, every attacked
/// computation round reports the wrong bit. A successful attack therefore
/// wins the game with `alpha` just below 1/2 and `epsilon = 0` on
/// `C` = computation rounds.
#[test]
fn successful_attacks_win_the_game() {
    let w = 0.4;
    for n in 1..=5 {
        let params = ProtocolParams::new(n, w, 0.0, 1.0, 0.25).unwrap();
        let game = GameParams::new(n, 0.4999, w, 0.0).unwrap();
        let mut rng = StreamKey::new(1, 0).trial(0);
        for partition in partitions(n) {
            for mask in 0u32..(1 << n) {
                let s = Subset::from_mask((0..n).map(|i| mask >> i & 1 == 1).collect());
                let plan = AttackPlan::from_subset(&s);
                let counts =
                    run_with_partition(&params, &partition, Some(&plan), &mut rng).unwrap();
                let c: Vec<usize> = (0..n)
                    .filter(|&i| partition[i] == RoundType::Computation)
                    .collect();
                let cap = c.iter().filter(|&&i| s.contains(i)).count();
                let wins = win_condition(&game, c.len(), cap, s.count() - cap);

                let count = |t| partition.iter().filter(|&&r| r == t).count() as u64;
                let hits = |t| {
                    (0..n)
                        .filter(|&i| partition[i] == t && s.contains(i))
                        .count() as u64
                };
                assert_eq!(
                    (counts.sc, counts.sx, counts.sz),
                    (
                        count(RoundType::Computation),
                        count(RoundType::XTest),
                        count(RoundType::ZTest)
                    )
                );
                assert_eq!(
                    (counts.failed_x, counts.failed_z, counts.corrupted),
                    (hits(RoundType::XTest), hits(RoundType::ZTest), cap as u64)
                );
                if counts.verdict == Verdict::Reject {
                    assert!(wins, "n={n} partition={partition:?} mask={mask:b}");
                }
            }
        }
    }
}

/// With a fixed partition, the X-test abort rate of an honest prover is
/// `Pr[Binomial(|X|, p) >= ceil(w |X|)]`.
#[test]
fn honest_x_abort_rate_matches_binomial() {
    let (sx, sz, sc) = (40usize, 40usize, 20usize);
    let (w, p) = (0.25, 0.2);
    let mut partition = vec![RoundType::XTest; sx];
    partition.extend(vec![RoundType::ZTest; sz]);
    partition.extend(vec![RoundType::Computation; sc]);
    let params = ProtocolParams::new(partition.len(), w, p, 1.0, 0.25).unwrap();
    let key = StreamKey::new(3, 0);
    let trials = 40_000u64;
    let x_aborts = (0..trials)
        .filter(|&i| {
            let counts = run_with_partition(&params, &partition, None, &mut key.trial(i)).unwrap();
            counts.verdict == Verdict::Abort(AbortReason::XTest)
        })
        .count() as f64;
    let exact = exact_binomial_sf(sx as u64, p, (w * sx as f64).ceil() as i64).unwrap();
    let rate = x_aborts / trials as f64;
    let se = (exact * (1.0 - exact) / trials as f64).sqrt();
    assert!(
        (rate - exact).abs() < 4.0 * se,
        "rate {rate}, exact {exact}"
    );
}

/// Noise-free honest runs accept YES instances unless the partition is degenerate.
#[test]
fn honest_noiseless_runs_accept() {
    let params = ProtocolParams::new(4, 0.5, 0.0, 1.0, 0.25).unwrap();
    let mut rng = StreamKey::new(4, 0).trial(0);
    for partition in partitions(4) {
        let counts = run_with_partition(&params, &partition, None, &mut rng).unwrap();
        let degenerate = counts.sc == 0 || counts.sx == 0 || counts.sz == 0;
        let expected = if degenerate {
            Verdict::Abort(AbortReason::Degenerate)
        } else {
            Verdict::Accept
        };
        assert_eq!(counts.verdict, expected);
    }
}
