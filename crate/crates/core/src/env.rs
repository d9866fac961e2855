//! Problem instances and the rested loss generator.
//!
//! An arm's expected loss depends only on how many times that arm has been
//! pulled: `mu_i(tau) = alpha_i / tau^rho + beta_i`, with `tau` starting at 1
//! for the first pull. Arm indices are 0-based throughout the crate.
//!
//! Ground-truth accessors ([`expected_loss`], [`gap`], [`mu_star`],
//! [`optimal_arm`]) take a [`BanditInstance`]. Policies never see one; they
//! interact through the [`PullHandle`] trait, which only exposes pulls and
//! the publicly known constants (K, T, rho, U).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, BanditError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmSpec {
    /// Scale of the decaying component.
    pub alpha: f64,
    /// Asymptotic loss level.
    pub beta: f64,
}

impl ArmSpec {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    pub fn mean(&self, tau: u64, rho: f64) -> f64 {
        self.alpha / (tau as f64).powf(rho) + self.beta
    }
}

/// How a loss sample is drawn around its conditional mean `mu`.
///
/// All models produce samples in `[0, U + 1]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    /// The sample equals its mean.
    Deterministic,
    /// `(U + 1) * Bernoulli(mu / (U + 1))`. Exact mean, and the variance
    /// equals `(U + 1) * mu - mu^2`.
    #[default]
    ScaledBernoulli,
    /// Gaussian around `mu`, rejection-resampled into `[0, U + 1]`. The
    /// mean is biased towards the interior near the boundaries.
    TruncGaussian { sigma: f64 },
}

impl NoiseModel {
    /// Draw one loss with conditional mean `mean` for an instance with
    /// alpha bound `upper`.
    pub fn sample<R: Rng + ?Sized>(&self, mean: f64, upper: f64, rng: &mut R) -> f64 {
        let top = upper + 1.0;
        match *self {
            NoiseModel::Deterministic => mean,
            NoiseModel::ScaledBernoulli => {
                let p = (mean / top).clamp(0.0, 1.0);
                if rng.random::<f64>() < p {
                    top
                } else {
                    0.0
                }
            }
            NoiseModel::TruncGaussian { sigma } => loop {
                let z: f64 = rng.sample(StandardNormal);
                let x = mean + sigma * z;
                if (0.0..=top).contains(&x) {
                    break x;
                }
            },
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            NoiseModel::TruncGaussian { sigma } if !(sigma > 0.0 && sigma.is_finite()) => Err(
                BanditError::InvalidInstance(format!("gaussian sigma must be positive, got {sigma}")),
            ),
            _ => Ok(()),
        }
    }
}

/// Ground-truth problem: arms, exponent, horizon, alpha bound and noise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BanditInstance {
    pub rho: f64,
    #[serde(rename = "T")]
    pub horizon: u64,
    #[serde(rename = "U")]
    pub upper_alpha: f64,
    #[serde(default)]
    pub noise: NoiseModel,
    pub arms: Vec<ArmSpec>,
}

impl BanditInstance {
    pub fn new(
        arms: Vec<ArmSpec>,
        rho: f64,
        horizon: u64,
        upper_alpha: f64,
        noise: NoiseModel,
    ) -> Result<Self> {
        let instance = Self {
            rho,
            horizon,
            upper_alpha,
            noise,
            arms,
        };
        instance.validate()?;
        Ok(instance)
    }

    /// The two-arm family `mu_2 = mu_1 + gap` used by the lower bound and
    /// the ETC analysis.
    pub fn shifted_pair(
        alpha: f64,
        beta: f64,
        gap: f64,
        rho: f64,
        horizon: u64,
        upper_alpha: f64,
        noise: NoiseModel,
    ) -> Result<Self> {
        Self::new(
            vec![ArmSpec::new(alpha, beta), ArmSpec::new(alpha, beta + gap)],
            rho,
            horizon,
            upper_alpha,
            noise,
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let instance: Self = serde_json::from_str(text)?;
        instance.validate()?;
        Ok(instance)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(BanditError::InvalidInstance(msg));
        if self.arms.is_empty() {
            return bad("instance needs at least one arm".into());
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad(format!("rho must lie in (0, 1), got {}", self.rho));
        }
        if !(self.upper_alpha >= 0.0 && self.upper_alpha.is_finite()) {
            return bad(format!("U must be finite and non-negative, got {}", self.upper_alpha));
        }
        if self.horizon < self.arms.len() as u64 {
            return bad(format!(
                "horizon T = {} is smaller than the number of arms {}",
                self.horizon,
                self.arms.len()
            ));
        }
        for (i, arm) in self.arms.iter().enumerate() {
            if !(0.0..=self.upper_alpha).contains(&arm.alpha) {
                return bad(format!(
                    "arm {i}: alpha = {} outside [0, U = {}]",
                    arm.alpha, self.upper_alpha
                ));
            }
            if !(0.0..=1.0).contains(&arm.beta) {
                return bad(format!("arm {i}: beta = {} outside [0, 1]", arm.beta));
            }
        }
        self.noise.validate()
    }
}

/// `mu_i(tau) = alpha_i / tau^rho + beta_i`.
pub fn expected_loss(instance: &BanditInstance, arm: usize, tau: u64) -> Result<f64> {
    let spec = instance
        .arms
        .get(arm)
        .ok_or_else(|| invalid_arg(format!("arm index {arm} out of range 0..{}", instance.num_arms())))?;
    if tau == 0 {
        return Err(invalid_arg("pull count tau must be at least 1"));
    }
    Ok(spec.mean(tau, instance.rho))
}

/// `mu_i(tau) - mu_j(tau)`.
pub fn gap(instance: &BanditInstance, i: usize, j: usize, tau: u64) -> Result<f64> {
    Ok(expected_loss(instance, i, tau)? - expected_loss(instance, j, tau)?)
}

/// Smallest expected loss over all arms when each has been pulled `tau` times.
pub fn mu_star(instance: &BanditInstance, tau: u64) -> Result<f64> {
    if tau == 0 {
        return Err(invalid_arg("pull count tau must be at least 1"));
    }
    Ok(instance
        .arms
        .iter()
        .map(|a| a.mean(tau, instance.rho))
        .fold(f64::INFINITY, f64::min))
}

/// The arm that is best when pulled for the whole horizon, with its terminal
/// expected loss. Ties go to the lowest index.
pub fn optimal_arm(instance: &BanditInstance) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, arm) in instance.arms.iter().enumerate() {
        let value = arm.mean(instance.horizon, instance.rho);
        if value < best.1 {
            best = (i, value);
        }
    }
    best
}

/// The only view of an environment a policy gets.
pub trait PullHandle {
    fn num_arms(&self) -> usize;
    fn horizon(&self) -> u64;
    fn rho(&self) -> f64;
    fn upper_alpha(&self) -> f64;
    /// Rounds consumed so far.
    fn round(&self) -> u64;
    fn pull(&mut self, arm: usize) -> Result<f64>;
}

/// One step of the SplitMix64 output function; used to derive independent
/// stream keys from `(base_seed, run_id, arm)`.
pub fn mix_seed(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of run `run_id` under `base_seed`. Independent of the policy so that
/// all policies in an experiment face the same per-arm sample sequences.
pub fn run_seed(base_seed: u64, run_id: u64) -> u64 {
    mix_seed(base_seed, run_id)
}

/// Mutable simulation state for one run.
///
/// Each arm owns its own random stream, so the `s`-th loss of arm `i` is the
/// same no matter how pulls of different arms are interleaved.
#[derive(Clone, Debug)]
pub struct EnvState {
    instance: BanditInstance,
    pull_counts: Vec<u64>,
    round: u64,
    seed: u64,
    streams: Vec<ChaCha8Rng>,
}

impl EnvState {
    pub fn new(instance: BanditInstance, base_seed: u64, run_id: u64) -> Result<Self> {
        Self::with_seed(instance, run_seed(base_seed, run_id))
    }

    pub fn with_seed(instance: BanditInstance, seed: u64) -> Result<Self> {
        instance.validate()?;
        let k = instance.num_arms();
        let streams = (0..k)
            .map(|arm| ChaCha8Rng::seed_from_u64(mix_seed(seed, arm as u64)))
            .collect();
        Ok(Self {
            instance,
            pull_counts: vec![0; k],
            round: 0,
            seed,
            streams,
        })
    }

    pub fn instance(&self) -> &BanditInstance {
        &self.instance
    }

    pub fn pull_counts(&self) -> &[u64] {
        &self.pull_counts
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl PullHandle for EnvState {
    fn num_arms(&self) -> usize {
        self.instance.num_arms()
    }

    fn horizon(&self) -> u64 {
        self.instance.horizon
    }

    fn rho(&self) -> f64 {
        self.instance.rho
    }

    fn upper_alpha(&self) -> f64 {
        self.instance.upper_alpha
    }

    fn round(&self) -> u64 {
        self.round
    }

    fn pull(&mut self, arm: usize) -> Result<f64> {
        if arm >= self.instance.num_arms() {
            return Err(invalid_arg(format!(
                "arm index {arm} out of range 0..{}",
                self.instance.num_arms()
            )));
        }
        if self.round >= self.instance.horizon {
            return Err(BanditError::BudgetExhausted {
                horizon: self.instance.horizon,
            });
        }
        self.pull_counts[arm] += 1;
        self.round += 1;
        let mean = self.instance.arms[arm].mean(self.pull_counts[arm], self.instance.rho);
        Ok(self
            .instance
            .noise
            .sample(mean, self.instance.upper_alpha, &mut self.streams[arm]))
    }
}
