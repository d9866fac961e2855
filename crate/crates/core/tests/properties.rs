//! Cross-module properties: sampling, paired streams and staged bounds.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use restsure::env::{expected_loss, PullHandle};
use restsure::policies::run_policy;
use restsure::theory::{rest_sure_nbar, ConstantExponent, Witness};
use restsure::{ArmSpec, BanditInstance, EnvState, NoiseModel, PolicyKind};

fn noise_strategy() -> impl Strategy<Value = NoiseModel> {
    prop_oneof![
        Just(NoiseModel::Deterministic),
        Just(NoiseModel::ScaledBernoulli),
        (0.01..2.0f64).prop_map(|sigma| NoiseModel::TruncGaussian { sigma }),
    ]
}

proptest! {
    #[test]
    fn samples_stay_in_range(
        noise in noise_strategy(), upper in 0.0..3.0f64, frac in 0.0..=1.0f64, beta in 0.0..=1.0f64,
        rho in 0.05..0.95f64, seed in any::<u64>(),
    ) {
        let inst = BanditInstance::new(vec![ArmSpec::new(upper * frac, beta)], rho, 200, upper, noise).unwrap();
        let mut env = EnvState::with_seed(inst, seed).unwrap();
        for _ in 0..200 {
            let x = env.pull(0).unwrap();
            prop_assert!((0.0..=upper + 1.0).contains(&x));
        }
    }

    #[test]
    fn every_policy_spends_the_horizon(
        k in 2usize..5, extra in 0u64..400, seed in any::<u64>(), p in 0usize..4, noise in noise_strategy(),
    ) {
        let arms = (0..k).map(|i| ArmSpec::new(0.3 * i as f64, 0.1 + 0.2 * i as f64)).collect();
        let inst = BanditInstance::new(arms, 0.5, k as u64 + extra, 1.0, noise).unwrap();
        let mut env = EnvState::new(inst, seed, 0).unwrap();
        let out = run_policy(PolicyKind::ALL[p], &mut env, 0.05).unwrap();
        prop_assert_eq!(out.pulls.iter().sum::<u64>(), k as u64 + extra);
        prop_assert_eq!(out.tau_out, out.pulls[out.i_out]);
        prop_assert!(out.tau_out >= 1);
    }
}

fn empirical_mean(noise: NoiseModel, alpha: f64, beta: f64, tau: u64, draws: usize) -> (f64, f64) {
    let upper = 1.0;
    let mean = alpha / (tau as f64).sqrt() + beta;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let xs: Vec<f64> = (0..draws).map(|_| noise.sample(mean, upper, &mut rng)).collect();
    let m = xs.iter().sum::<f64>() / draws as f64;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (draws - 1) as f64;
    (m - mean, (var / draws as f64).sqrt())
}

#[test]
fn scaled_bernoulli_is_unbiased() {
    for (alpha, beta, tau) in [(0.0, 0.01, 1), (1.0, 0.3, 4), (1.0, 1.0, 1)] {
        let (bias, se) = empirical_mean(NoiseModel::ScaledBernoulli, alpha, beta, tau, 200_000);
        assert!(bias.abs() < 5.0 * se + 1e-12, "bias {bias} se {se}");
    }
}

#[test]
fn truncated_gaussian_bias() {
    let noise = NoiseModel::TruncGaussian { sigma: 0.1 };
    let (interior, se) = empirical_mean(noise, 0.0, 1.0, 1, 200_000);
    assert!(interior.abs() < 5.0 * se, "interior bias {interior}");
    let noise = NoiseModel::TruncGaussian { sigma: 0.3 };
    let (low, se) = empirical_mean(noise, 0.0, 0.05, 1, 200_000);
    assert!(low > 0.1 && low > 10.0 * se, "boundary bias {low}");
}

#[test]
fn paired_streams_do_not_depend_on_other_arms() {
    let inst = BanditInstance::new(
        vec![ArmSpec::new(1.0, 0.1), ArmSpec::new(0.5, 0.4)],
        0.5,
        100,
        1.0,
        NoiseModel::ScaledBernoulli,
    )
    .unwrap();
    let mut a = EnvState::new(inst.clone(), 5, 3).unwrap();
    let mut b = EnvState::new(inst.clone(), 5, 3).unwrap();
    let xs: Vec<f64> = (0..30).map(|_| a.pull(0).unwrap()).collect();
    let ys: Vec<f64> = (0..30)
        .map(|_| {
            b.pull(1).unwrap();
            b.pull(0).unwrap()
        })
        .collect();
    assert_eq!(xs, ys);
    assert!(expected_loss(&inst, 0, 1).unwrap() > expected_loss(&inst, 0, 30).unwrap());
}

#[test]
fn nbar_retires_the_worst_arm_first() {
    let inst = BanditInstance::new(
        vec![
            ArmSpec::new(0.0, 0.0),
            ArmSpec::new(0.0, 0.6),
            ArmSpec::new(0.0, 0.85),
            ArmSpec::new(0.0, 1.0),
        ],
        0.5,
        100_000_000,
        0.0,
        NoiseModel::Deterministic,
    )
    .unwrap();
    let report = rest_sure_nbar(&inst, ConstantExponent::Fourth).unwrap();
    let order: Vec<(usize, Witness)> = report.stages.iter().map(|s| (s.arm, s.witness)).collect();
    assert_eq!(order[..2], [(3, Witness::Elimination), (2, Witness::Elimination)]);
    assert_eq!(report.i_out, Some(0));
    assert_eq!(report.value, report.stages.iter().map(|s| s.n).sum::<u64>());
    assert!(report.stages.windows(2).all(|w| w[0].n <= w[1].n));
}
