//! Property tests for the distribution, policy and stream invariants.

use std::sync::Arc;

use proptest::prelude::*;

use banditlab::env::{density_ratio_zero, ArmDistribution, Environment, EnvironmentClass};
use banditlab::ks::ks_distance;
use banditlab::policy::{ucb_index, BuildContext, PolicySpec};

fn unit() -> impl Strategy<Value = f64> {
    (0u32..=1000).prop_map(|i| i as f64 / 1000.0)
}

fn arb_dist() -> impl Strategy<Value = ArmDistribution> {
    prop_oneof![
        unit().prop_map(|p| ArmDistribution::bernoulli(p).unwrap()),
        unit().prop_map(|x| ArmDistribution::dirac(x).unwrap()),
        (0u32..999, 1u32..=1000).prop_filter_map("need a < b", |(a, b)| {
            let (a, b) = (a as f64 / 1000.0, b as f64 / 1000.0);
            (a < b).then(|| ArmDistribution::uniform(a, b).unwrap())
        }),
        arb_finite(),
    ]
}

fn arb_finite() -> impl Strategy<Value = ArmDistribution> {
    (1usize..=4, any::<u64>()).prop_map(|(k, seed)| {
        // Derive k distinct points and positive weights from the seed.
        let mut points = Vec::new();
        let mut s = seed;
        let mut next = || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut xs: Vec<f64> = (0..k).map(|_| (next() * 1000.0).round() / 1000.0).collect();
        xs.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup();
        let raw: Vec<f64> = (0..xs.len()).map(|_| next() + 0.01).collect();
        let total: f64 = raw.iter().sum();
        for (x, w) in xs.iter().zip(&raw) {
            points.push((*x, w / total));
        }
        // Make the weights sum to one exactly.
        let sum_rest: f64 = points[..points.len() - 1].iter().map(|(_, w)| w).sum();
        let last = points.len() - 1;
        points[last].1 = 1.0 - sum_rest;
        ArmDistribution::finite(points).unwrap()
    })
}

proptest! {
    #[test]
    fn cdf_is_monotone_with_unit_range(dist in arb_dist(), xs in proptest::collection::vec(-0.5f64..1.5, 2..40)) {
        let mut xs = xs;
        xs.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        for w in xs.windows(2) {
            let (lo, hi) = (dist.cdf(w[0]), dist.cdf(w[1]));
            prop_assert!(lo <= hi + 1e-15);
            prop_assert!((0.0..=1.0).contains(&lo));
        }
        prop_assert_eq!(dist.cdf(1.0), 1.0);
        prop_assert_eq!(dist.cdf(-1e-9), 0.0);
    }

    #[test]
    fn cdf_left_limit_is_consistent(dist in arb_dist(), x in -0.1f64..1.1) {
        let left = dist.cdf_left(x);
        let at = dist.cdf(x);
        prop_assert!(left <= at + 1e-15);
        prop_assert!((at - left - dist.atom_mass(x)).abs() < 1e-15);
    }

    #[test]
    fn ks_distance_agrees_with_dense_grid(
        model in arb_dist(),
        sampler in arb_dist(),
        seeds in proptest::collection::vec(any::<u64>(), 1..30),
    ) {
        let mut obs: Vec<f64> = seeds
            .iter()
            .map(|&s| sampler.quantile((s >> 11) as f64 / (1u64 << 53) as f64))
            .collect();
        obs.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());

        let n = obs.len() as f64;
        let emp_at = |x: f64| obs.iter().filter(|&&v| v <= x).count() as f64 / n;
        let emp_left = |x: f64| obs.iter().filter(|&&v| v < x).count() as f64 / n;
        let mut candidates: Vec<f64> = (0..=20_000).map(|i| i as f64 / 20_000.0).collect();
        candidates.extend(model.breakpoints());
        candidates.extend_from_slice(&obs);
        let mut want = 0.0f64;
        for x in candidates {
            want = want.max((emp_at(x) - model.cdf(x)).abs());
            want = want.max((emp_left(x) - model.cdf_left(x)).abs());
        }
        let got = ks_distance(&obs, &model);
        prop_assert!((got - want).abs() < 1e-12, "{} vs {}", got, want);
    }

    #[test]
    fn gaps_are_permutation_equivariant(
        means in proptest::collection::vec(unit(), 2..6),
        rotation in 0usize..5,
    ) {
        let arms: Vec<ArmDistribution> = means
            .iter()
            .map(|&p| ArmDistribution::bernoulli(p).unwrap())
            .collect();
        let base = Environment::new(arms.clone()).unwrap();

        let k = arms.len();
        let shift = rotation % k;
        let permuted: Vec<ArmDistribution> =
            (0..k).map(|i| arms[(i + shift) % k].clone()).collect();
        let rotated = Environment::new(permuted).unwrap();

        for i in 0..k {
            prop_assert_eq!(rotated.gaps().gaps[i], base.gaps().gaps[(i + shift) % k]);
        }
        prop_assert_eq!(rotated.gaps().min_gap, base.gaps().min_gap);
        // The best arm maps to a position holding the same mean (ties may
        // move the index to the lowest occurrence).
        prop_assert_eq!(rotated.gaps().best_mean, base.gaps().best_mean);
        prop_assert_eq!(rotated.mean(rotated.best_arm()), base.gaps().best_mean);
    }

    #[test]
    fn ucb_argmax_is_shift_invariant(
        means in proptest::collection::vec(unit(), 2..6),
        pulls in proptest::collection::vec(1u64..200, 2..6),
        shift in -10.0f64..10.0,
        rho in 0.0f64..4.0,
    ) {
        let k = means.len().min(pulls.len());
        let tau = 500.0;
        let pick = |delta: f64| -> usize {
            let mut best = 0;
            let mut best_value = f64::NEG_INFINITY;
            for i in 0..k {
                let v = ucb_index(means[i] + delta, pulls[i] as f64, tau, rho);
                if v > best_value {
                    best = i;
                    best_value = v;
                }
            }
            best
        };
        prop_assert_eq!(pick(0.0), pick(shift));
    }

    #[test]
    fn finite_support_singularity_symmetry(a in arb_finite(), b in arb_finite()) {
        // For purely atomic laws, non-singularity means sharing an atom.
        // The density-ratio test at the reference's atoms must agree with
        // that brute-force check, symmetrically.
        let atoms = |d: &ArmDistribution| -> Vec<f64> { d.breakpoints() };
        let share_atom = atoms(&a).iter().any(|x| atoms(&b).contains(x));
        let a_positive_somewhere = atoms(&b)
            .iter()
            .any(|&x| !density_ratio_zero(&a, &b, x));
        let b_positive_somewhere = atoms(&a)
            .iter()
            .any(|&x| !density_ratio_zero(&b, &a, x));
        prop_assert_eq!(a_positive_somewhere, share_atom);
        prop_assert_eq!(b_positive_somewhere, share_atom);
    }
}

#[test]
fn policies_are_deterministic_replays() {
    // Feeding the same reward history twice yields identical selections.
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let class = Arc::new(
        EnvironmentClass::new(vec![
            Environment::parse("ber(0.6),ber(0.5)").unwrap(),
            Environment::parse("ber(0.4),ber(0.7)").unwrap(),
        ])
        .unwrap(),
    );
    let specs = [
        "ucb1(0.5)",
        "ucbh(0.5)",
        "gcl",
        "gclb",
        "gclstar(0.6)",
        "gclstar_kl(0.6)",
    ];
    for literal in specs {
        let spec = PolicySpec::parse(literal).unwrap();
        let ctx = BuildContext::new(2)
            .with_class(Arc::clone(&class))
            .with_horizon(60);
        let rewards: Vec<f64> = (0..60)
            .map(|_| if rng.random::<f64>() < 0.5 { 1.0 } else { 0.0 })
            .collect();

        let run = |mut policy: Box<dyn banditlab::BanditPolicy>| -> Vec<usize> {
            let mut picks = Vec::new();
            for reward in &rewards {
                let arm = policy.select().unwrap();
                picks.push(arm);
                policy.record(arm, *reward);
            }
            picks
        };
        let first = run(spec.build(&ctx).unwrap());
        let second = run(spec.build(&ctx).unwrap());
        assert_eq!(first, second, "{literal}");
    }
}

#[test]
fn gcl_elimination_never_removes_the_generating_environment() {
    // Over many simulated first rounds on finite atomic classes, the member
    // the data was drawn from survives the first-round test every time.
    use banditlab::env::RewardStream;
    let class = Arc::new(
        EnvironmentClass::new(vec![
            Environment::parse("ber(0.25),dirac(0.5)").unwrap(),
            Environment::parse("ber(0.75),dirac(0.5)").unwrap(),
            Environment::parse("ber(0.5),finite(0.25:0.5,0.5:0.5)").unwrap(),
        ])
        .unwrap(),
    );
    use banditlab::policy::{BanditPolicy as _, Gcl};
    for (member_index, truth) in class.members().iter().enumerate() {
        for rep in 0..3_334u64 {
            let mut policy = Gcl::new(Arc::clone(&class), 2);
            for arm in 0..2 {
                assert_eq!(policy.select().unwrap(), arm);
                let mut stream = RewardStream::new(truth.arm(arm).clone(), 1234, rep, arm);
                policy.record(arm, stream.reward(0));
            }
            policy.select().unwrap(); // triggers the one-shot elimination
            assert!(
                policy.active_members()[member_index],
                "member {member_index} removed at rep {rep}"
            );
        }
    }
}
