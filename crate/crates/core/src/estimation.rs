//! Split-sample estimators for `(alpha, beta)` and their confidence widths.
//!
//! After `2 tau` pulls of an arm, the first `tau` losses and the next `tau`
//! losses are averaged separately. Their expectations are
//!
//! ```text
//! E[x_hat]   = beta + alpha / tau * S(tau)
//! E[x_tilde] = beta + alpha / tau * (S(2 tau) - S(tau))
//! ```
//!
//! with `S(n) = sum_{s=1}^{n} s^-rho`, so the two means identify both
//! parameters. The widths follow from Bernstein's inequality with the
//! variance proxy `(U + 1) * mu` of a loss supported on `[0, U + 1]`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, BanditError, Result};

/// `sum_{s=1}^{tau} s^-rho` by direct summation.
pub fn harmonic_sum(tau: u64, rho: f64) -> f64 {
    (1..=tau).map(|s| (s as f64).powf(-rho)).sum()
}

/// Prefix table of generalised harmonic sums, `prefix[n] = S(n)`.
///
/// Built once per `(rho, max_n)` and then only read.
#[derive(Clone, Debug)]
pub struct HarmonicTable {
    rho: f64,
    prefix: Vec<f64>,
}

impl HarmonicTable {
    pub fn new(rho: f64, max_n: u64) -> Self {
        let mut prefix = Vec::with_capacity(max_n as usize + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for s in 1..=max_n {
            acc += (s as f64).powf(-rho);
            prefix.push(acc);
        }
        Self { rho, prefix }
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn max_n(&self) -> u64 {
        (self.prefix.len() - 1) as u64
    }

    /// `S(n)`. Panics if `n` exceeds the table.
    pub fn sum(&self, n: u64) -> f64 {
        self.prefix[n as usize]
    }

    /// `S(tau) - (S(2 tau) - S(tau))`, the positive denominator of the alpha
    /// estimator.
    pub fn split_denominator(&self, tau: u64) -> f64 {
        2.0 * self.sum(tau) - self.sum(2 * tau)
    }
}

/// The two half-sample means of an arm's first `2 tau` losses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitEstimate {
    pub tau: u64,
    /// Mean of losses `1..=tau`.
    pub x_hat: f64,
    /// Mean of losses `tau+1..=2 tau`.
    pub x_tilde: f64,
    /// `x_hat - x_tilde`; non-negative in expectation.
    pub dx: f64,
}

impl SplitEstimate {
    fn from_sums(tau: u64, first: f64, second: f64) -> Self {
        let x_hat = first / tau as f64;
        let x_tilde = second / tau as f64;
        Self {
            tau,
            x_hat,
            x_tilde,
            dx: x_hat - x_tilde,
        }
    }
}

/// Half-split means of `samples` (in pull order). With an odd count the
/// newest sample is ignored.
pub fn split_means(samples: &[f64]) -> Result<SplitEstimate> {
    if samples.len() < 2 {
        return Err(BanditError::InsufficientData {
            needed: 2,
            have: samples.len(),
        });
    }
    let tau = samples.len() / 2;
    let first: f64 = samples[..tau].iter().sum();
    let second: f64 = samples[tau..2 * tau].iter().sum();
    Ok(SplitEstimate::from_sums(tau as u64, first, second))
}

/// Append-only loss history of one arm, with running prefix sums so that a
/// split can be formed in O(1) after every pull.
#[derive(Clone, Debug, Default)]
pub struct ArmSamples {
    losses: Vec<f64>,
    prefix: Vec<f64>,
}

impl ArmSamples {
    pub fn new() -> Self {
        Self {
            losses: Vec::new(),
            prefix: vec![0.0],
        }
    }

    pub fn with_capacity(n: usize) -> Self {
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(0.0);
        Self {
            losses: Vec::with_capacity(n),
            prefix,
        }
    }

    pub fn push(&mut self, loss: f64) {
        let last = *self.prefix.last().expect("prefix starts with 0");
        self.losses.push(loss);
        self.prefix.push(last + loss);
    }

    pub fn len(&self) -> usize {
        self.losses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.losses.is_empty()
    }

    pub fn losses(&self) -> &[f64] {
        &self.losses
    }

    pub fn mean(&self) -> Option<f64> {
        if self.losses.is_empty() {
            None
        } else {
            Some(self.prefix[self.losses.len()] / self.losses.len() as f64)
        }
    }

    pub fn split(&self) -> Result<SplitEstimate> {
        if self.losses.len() < 2 {
            return Err(BanditError::InsufficientData {
                needed: 2,
                have: self.losses.len(),
            });
        }
        let tau = self.losses.len() / 2;
        let first = self.prefix[tau];
        let second = self.prefix[2 * tau] - self.prefix[tau];
        Ok(SplitEstimate::from_sums(tau as u64, first, second))
    }
}

/// Unclipped alpha estimate `tau * dx / (2 S(tau) - S(2 tau))`.
///
/// The table must cover `2 * split.tau`.
pub fn alpha_hat(split: &SplitEstimate, table: &HarmonicTable) -> f64 {
    split.tau as f64 * split.dx / table.split_denominator(split.tau)
}

/// `x_hat - alpha_hat / tau * S(tau)`.
pub fn beta_hat(split: &SplitEstimate, alpha_hat: f64, table: &HarmonicTable) -> f64 {
    split.x_hat - alpha_hat / split.tau as f64 * table.sum(split.tau)
}

fn bracket(log_term: f64, tau: u64) -> f64 {
    let ratio = log_term / tau as f64;
    ratio + ratio.sqrt()
}

fn sqrt_u_plus_one_sq(upper: f64) -> f64 {
    (upper.sqrt() + 1.0).powi(2)
}

/// Half-width of the alpha interval:
/// `5 tau^rho (sqrt(U)+1)^2 / rho * [L/tau + sqrt(L/tau)]`, `L = ln(1/delta)`.
pub fn alpha_cb(tau: u64, rho: f64, upper: f64, delta: f64) -> f64 {
    let prefactor = 5.0 * (tau as f64).powf(rho) * sqrt_u_plus_one_sq(upper) / rho;
    prefactor * bracket((1.0 / delta).ln(), tau)
}

/// Half-width of the beta interval:
/// `5 (sqrt(U)+1)^2 / ((1-rho) rho) * [L/tau + sqrt(L/tau)]`.
pub fn beta_cb(tau: u64, rho: f64, upper: f64, delta: f64) -> f64 {
    let prefactor = 5.0 * sqrt_u_plus_one_sq(upper) / ((1.0 - rho) * rho);
    prefactor * bracket((1.0 / delta).ln(), tau)
}

/// Width of the projected-loss interval, valid jointly over arms, split
/// sizes and target pull counts:
/// `10 (sqrt(U)+1)^2 / ((1-rho) rho) * [L/tau + sqrt(L/tau)]` with
/// `L = ln(tau K T / delta)`.
pub fn cb_mu(tau: u64, rho: f64, upper: f64, delta: f64, num_arms: usize, horizon: u64) -> f64 {
    let prefactor = 10.0 * sqrt_u_plus_one_sq(upper) / ((1.0 - rho) * rho);
    let log_term = (tau as f64 * num_arms as f64 * horizon as f64 / delta).ln();
    prefactor * bracket(log_term, tau)
}

/// Bernstein width of a single half-sample mean:
/// `(sqrt(U)+1)^2 sqrt(2 L / tau) + (U+1) L / tau`, `L = ln(1/delta)`.
pub fn raw_mean_cb(tau: u64, upper: f64, delta: f64) -> f64 {
    let log_term = (1.0 / delta).ln();
    let t = tau as f64;
    sqrt_u_plus_one_sq(upper) * (2.0 * log_term / t).sqrt() + (upper + 1.0) * log_term / t
}

/// Which family of width formulas to use.
///
/// `Simplified` is the closed form above and is what the policies default to.
/// `Tight` keeps the harmonic sums and the `2 (U+1) L / (3 tau)` range term
/// of Bernstein's inequality instead of bounding them; it is narrower and is
/// meant for sensitivity studies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundConstants {
    #[default]
    Simplified,
    Tight,
}

/// Parameter estimate of one arm after `2 tau` pulls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamEstimate {
    /// Unclipped; may be negative under noise.
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub cb_alpha: f64,
    pub cb_beta: f64,
    pub tau: u64,
    pub delta: f64,
    /// Known upper bound on alpha, used to clip the prediction.
    pub upper: f64,
}

impl ParamEstimate {
    pub fn alpha_clipped(&self) -> f64 {
        self.alpha_hat.clamp(0.0, self.upper)
    }

    /// Projected expected loss after `tau_out` pulls.
    pub fn predict(&self, tau_out: u64, rho: f64) -> f64 {
        self.alpha_clipped() / (tau_out as f64).powf(rho) + self.beta_hat
    }
}

/// `clamp(alpha_hat, 0, U) / tau_out^rho + beta_hat`.
pub fn predict_loss(estimate: &ParamEstimate, tau_out: u64, rho: f64) -> f64 {
    estimate.predict(tau_out, rho)
}

/// Bundles a harmonic table with the constants needed to turn splits into
/// [`ParamEstimate`]s.
#[derive(Clone, Debug)]
pub struct Estimator {
    table: HarmonicTable,
    upper: f64,
    constants: BoundConstants,
}

impl Estimator {
    /// `max_pulls` is the largest number of samples any arm will have.
    pub fn new(rho: f64, max_pulls: u64, upper: f64, constants: BoundConstants) -> Self {
        Self {
            table: HarmonicTable::new(rho, max_pulls.max(2)),
            upper,
            constants,
        }
    }

    pub fn rho(&self) -> f64 {
        self.table.rho()
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn table(&self) -> &HarmonicTable {
        &self.table
    }

    pub fn estimate_split(&self, split: &SplitEstimate, delta: f64) -> ParamEstimate {
        let alpha = alpha_hat(split, &self.table);
        let beta = beta_hat(split, alpha, &self.table);
        let (cb_alpha, cb_beta) = match self.constants {
            BoundConstants::Simplified => (
                alpha_cb(split.tau, self.rho(), self.upper, delta),
                beta_cb(split.tau, self.rho(), self.upper, delta),
            ),
            BoundConstants::Tight => {
                let log_term = (1.0 / delta).ln();
                (
                    self.tight_alpha_cb(split.tau, log_term),
                    self.tight_beta_cb(split.tau, log_term),
                )
            }
        };
        ParamEstimate {
            alpha_hat: alpha,
            beta_hat: beta,
            cb_alpha,
            cb_beta,
            tau: split.tau,
            delta,
            upper: self.upper,
        }
    }

    pub fn estimate(&self, samples: &ArmSamples, delta: f64) -> Result<ParamEstimate> {
        if 2 * (samples.len() as u64 / 2) > self.table.max_n() {
            return Err(invalid_arg("sample count exceeds the harmonic table"));
        }
        Ok(self.estimate_split(&samples.split()?, delta))
    }

    /// Projected-loss width for target pull counts `tau_out >= tau`.
    pub fn cb_mu(&self, tau: u64, delta: f64, num_arms: usize, horizon: u64) -> f64 {
        match self.constants {
            BoundConstants::Simplified => cb_mu(tau, self.rho(), self.upper, delta, num_arms, horizon),
            BoundConstants::Tight => {
                let log_term = (tau as f64 * num_arms as f64 * horizon as f64 / delta).ln();
                self.tight_alpha_cb(tau, log_term) / (tau as f64).powf(self.rho())
                    + self.tight_beta_cb(tau, log_term)
            }
        }
    }

    // Bernstein width of x_hat with V[X_s] <= (U+1)(U s^-rho + 1); it
    // dominates the x_tilde width because S(tau) >= S(2 tau) - S(tau).
    fn tight_raw_cb(&self, tau: u64, log_term: f64) -> f64 {
        let t = tau as f64;
        let u = self.upper;
        ((u * self.table.sum(tau)).sqrt() / t + 1.0 / t.sqrt()) * (2.0 * (u + 1.0) * log_term).sqrt()
            + 2.0 * (u + 1.0) * log_term / (3.0 * t)
    }

    fn tight_alpha_cb(&self, tau: u64, log_term: f64) -> f64 {
        tau as f64 * 2.0 * self.tight_raw_cb(tau, log_term) / self.table.split_denominator(tau)
    }

    fn tight_beta_cb(&self, tau: u64, log_term: f64) -> f64 {
        self.tight_raw_cb(tau, log_term)
            + self.table.sum(tau) / tau as f64 * self.tight_alpha_cb(tau, log_term)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn noiseless(alpha: f64, beta: f64, rho: f64, n: u64) -> Vec<f64> {
        (1..=n).map(|s| alpha / (s as f64).powf(rho) + beta).collect()
    }

    #[test]
    fn harmonic_sum_values() {
        assert_eq!(harmonic_sum(1, 0.3), 1.0);
        assert_eq!(harmonic_sum(1, 0.9), 1.0);
        // 50-digit mpmath sum
        assert_relative_eq!(harmonic_sum(4, 0.5), 2.784_457_050_376_173, max_relative = 1e-15);
        let table = HarmonicTable::new(0.5, 4);
        assert_eq!(table.sum(4), harmonic_sum(4, 0.5));
    }

    #[test]
    fn split_denominator_lower_bound() {
        for rho in [0.1, 0.5, 0.9] {
            let table = HarmonicTable::new(rho, 200_000);
            for tau in 1..=100_000u64 {
                let denom = table.split_denominator(tau);
                let bound = tau as f64 * (2f64.powf(rho) - 1.0) / (2.0 * tau as f64).powf(rho);
                assert!(denom > 0.0);
                assert!(denom >= bound * (1.0 - 1e-12), "rho {rho} tau {tau}: {denom} < {bound}");
                assert!(table.sum(2 * tau) - table.sum(tau) < table.sum(tau));
            }
        }
    }

    #[test]
    fn split_means_examples() {
        let split = split_means(&[1.0, 0.0]).unwrap();
        assert_eq!(split, SplitEstimate { tau: 1, x_hat: 1.0, x_tilde: 0.0, dx: 1.0 });
        let five = [0.9, 0.2, 0.4, 0.1, 7.0];
        assert_eq!(split_means(&five).unwrap(), split_means(&five[..4]).unwrap());
        assert!(matches!(
            split_means(&[0.3]),
            Err(BanditError::InsufficientData { needed: 2, have: 1 })
        ));
    }

    #[test]
    fn split_means_match_expectation_identities() {
        let (alpha, beta, rho, tau) = (1.5, 0.2, 0.5, 50);
        let split = split_means(&noiseless(alpha, beta, rho, 2 * tau)).unwrap();
        let s1 = harmonic_sum(tau, rho);
        let s2 = harmonic_sum(2 * tau, rho);
        assert_relative_eq!(split.x_hat, beta + alpha / tau as f64 * s1, max_relative = 1e-13);
        assert_relative_eq!(split.x_tilde, beta + alpha / tau as f64 * (s2 - s1), max_relative = 1e-13);
    }

    #[test]
    fn arm_samples_agree_with_split_means() {
        let data = noiseless(0.7, 0.1, 0.4, 31);
        let mut samples = ArmSamples::new();
        for &x in &data {
            samples.push(x);
        }
        let a = samples.split().unwrap();
        let b = split_means(&data).unwrap();
        assert_eq!(a.tau, 15);
        assert_relative_eq!(a.x_hat, b.x_hat, max_relative = 1e-14);
        assert_relative_eq!(a.x_tilde, b.x_tilde, max_relative = 1e-14);
    }

    #[test]
    fn noiseless_recovery() {
        for rho in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9] {
            let table = HarmonicTable::new(rho, 2000);
            for tau in [2u64, 3, 10, 50, 333, 1000] {
                let (alpha, beta) = (1.5, 0.2);
                let split = split_means(&noiseless(alpha, beta, rho, 2 * tau)).unwrap();
                let a = alpha_hat(&split, &table);
                let b = beta_hat(&split, a, &table);
                assert_relative_eq!(a, alpha, max_relative = 1e-9);
                assert_relative_eq!(b, beta, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn zero_difference_gives_zero_alpha() {
        let table = HarmonicTable::new(0.5, 20);
        let split = split_means(&[0.4; 20]).unwrap();
        assert_eq!(alpha_hat(&split, &table), 0.0);
        assert_eq!(beta_hat(&split, 0.0, &table), split.x_hat);
    }

    #[test]
    fn width_formulas() {
        // 50-digit mpmath evaluations
        assert_relative_eq!(alpha_cb(100, 0.5, 1.0, 0.01), 104.259_321_795_526_26, max_relative = 1e-13);
        assert_relative_eq!(beta_cb(100, 0.5, 1.0, 0.01), 20.851_864_359_105_25, max_relative = 1e-13);
        assert_relative_eq!(cb_mu(100, 0.5, 1.0, 1e-3, 2, 1000), 100.533_107_150_341_23, max_relative = 1e-13);
        assert_relative_eq!(raw_mean_cb(8, 0.0, (-1f64).exp()), 0.625, max_relative = 1e-15);
        for tau in [1, 10, 1000] {
            assert!(alpha_cb(tau, 0.5, 1.0, 1.0 - 1e-12) < 1e-4);
            assert!(beta_cb(tau, 0.5, 1.0, 1.0 - 1e-12) < 1e-4);
            assert!(beta_cb(2 * tau, 0.3, 2.0, 0.05) < beta_cb(tau, 0.3, 2.0, 0.05));
        }
    }

    #[test]
    fn alpha_width_sqrt_term_decreases_for_small_rho() {
        // tau^rho * sqrt(L / tau) decreases in tau exactly when rho < 1/2
        let log_term = (1.0f64 / 0.05).ln();
        let sqrt_part = |tau: u64, rho: f64| (tau as f64).powf(rho) * (log_term / tau as f64).sqrt();
        for tau in 1..500 {
            assert!(sqrt_part(tau + 1, 0.3) < sqrt_part(tau, 0.3));
            assert!(sqrt_part(tau + 1, 0.7) > sqrt_part(tau, 0.7));
        }
    }

    #[test]
    fn cb_mu_quarter_decrease_and_scaling() {
        let horizon = 100_000;
        for tau in 8..=horizon / 4 {
            assert!(cb_mu(4 * tau, 0.5, 1.0, 1e-5, 3, horizon) < cb_mu(tau, 0.5, 1.0, 1e-5, 3, horizon));
        }
        // (sqrt(U)+1)^2 doubles from U = 0 to U = (sqrt(2)-1)^2
        let u = (2f64.sqrt() - 1.0).powi(2);
        assert_relative_eq!(
            cb_mu(50, 0.4, u, 0.01, 2, 500),
            2.0 * cb_mu(50, 0.4, 0.0, 0.01, 2, 500),
            max_relative = 1e-12
        );
    }


    #[test]
    fn prediction_clips_alpha() {
        let est = ParamEstimate {
            alpha_hat: -0.4,
            beta_hat: 0.3,
            cb_alpha: 1.0,
            cb_beta: 1.0,
            tau: 10,
            delta: 0.1,
            upper: 1.0,
        };
        assert_eq!(predict_loss(&est, 100, 0.5), 0.3);
        let big = ParamEstimate { alpha_hat: 3.0, ..est };
        assert_relative_eq!(big.predict(4, 0.5), 0.8, max_relative = 1e-15);
        assert!((big.predict(u64::MAX, 0.5) - 0.3).abs() < 1e-9);
    }

    #[test]
    fn noiseless_prediction_hits_truth() {
        let (alpha, beta, rho, tau) = (0.8, 0.25, 0.6, 200);
        let est = Estimator::new(rho, 2 * tau, 1.0, BoundConstants::Simplified);
        let mut samples = ArmSamples::new();
        for x in noiseless(alpha, beta, rho, 2 * tau) {
            samples.push(x);
        }
        let p = est.estimate(&samples, 0.01).unwrap();
        let horizon = 10_000u64;
        assert_relative_eq!(
            p.predict(horizon, rho),
            alpha / (horizon as f64).powf(rho) + beta,
            max_relative = 1e-10
        );
    }

    #[test]
    fn tight_widths_are_narrower() {
        let simple = Estimator::new(0.5, 20_000, 1.0, BoundConstants::Simplified);
        let tight = Estimator::new(0.5, 20_000, 1.0, BoundConstants::Tight);
        for tau in [10u64, 100, 1000, 10_000] {
            let split = SplitEstimate { tau, x_hat: 0.5, x_tilde: 0.4, dx: 0.1 };
            let a = simple.estimate_split(&split, 0.01);
            let b = tight.estimate_split(&split, 0.01);
            assert_eq!(a.alpha_hat, b.alpha_hat);
            assert!(b.cb_alpha < a.cb_alpha);
            assert!(tight.cb_mu(tau, 0.01, 2, 20_000) < simple.cb_mu(tau, 0.01, 2, 20_000));
        }
    }
}
