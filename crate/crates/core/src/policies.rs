//! Policies that interact with an environment only through [`PullHandle`].
//!
//! Every policy spends exactly `T` pulls and reports the arm it commits to
//! together with that arm's final pull count. Estimates are refreshed after
//! each sweep of pulls. With `n` pulls per arm the split uses
//! `tau = floor(n / 2)` samples per half, so stop and elimination rules are
//! only evaluated once `n >= 2`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::env::PullHandle;
use crate::error::{invalid_arg, BanditError, Result};
use crate::estimation::{alpha_hat, beta_hat, ArmSamples, BoundConstants, Estimator, HarmonicTable, ParamEstimate};

/// Why a policy stopped exploring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CommitReason {
    /// One arm's projected loss beat every other by more than twice the width.
    GapIdentified,
    /// The best projected loss could not improve enough to pay for another sweep.
    ExplorationUnprofitable,
    /// The budget ran out before any stop rule fired.
    BudgetExhausted,
}

impl fmt::Display for CommitReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CommitReason::GapIdentified => "GapIdentified",
            CommitReason::ExplorationUnprofitable => "ExplorationUnprofitable",
            CommitReason::BudgetExhausted => "BudgetExhausted",
        })
    }
}

impl FromStr for CommitReason {
    type Err = BanditError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "GapIdentified" => Ok(CommitReason::GapIdentified),
            "ExplorationUnprofitable" => Ok(CommitReason::ExplorationUnprofitable),
            "BudgetExhausted" => Ok(CommitReason::BudgetExhausted),
            other => Err(invalid_arg(format!("unknown commit reason {other:?}"))),
        }
    }
}

/// Final state of one policy run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyOutcome {
    pub i_out: usize,
    /// Pulls of `i_out` at the horizon.
    pub tau_out: u64,
    /// Final pull count of every arm.
    pub pulls: Vec<u64>,
    /// Round at which the policy committed, if a stop rule fired.
    pub commit_round: Option<u64>,
    pub commit_reason: CommitReason,
    /// Completed exploration sweeps (pulls per arm of the sweeping phase).
    pub sweeps: u64,
}

/// Policy names accepted in experiment configs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Etc,
    RestSure,
    Uniform,
    Greedy,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [PolicyKind::Etc, PolicyKind::RestSure, PolicyKind::Uniform, PolicyKind::Greedy];

    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::Etc => "etc",
            PolicyKind::RestSure => "rest_sure",
            PolicyKind::Uniform => "uniform",
            PolicyKind::Greedy => "greedy",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = BanditError;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| BanditError::Config(format!("unknown policy {s:?}")))
    }
}

/// Run `kind` on a fresh environment. `delta` is ignored by the baselines.
pub fn run_policy<H: PullHandle>(kind: PolicyKind, env: &mut H, delta: f64) -> Result<PolicyOutcome> {
    match kind {
        PolicyKind::Etc => run_etc(env, delta),
        PolicyKind::RestSure => run_rest_sure(env, delta),
        PolicyKind::Uniform => run_uniform(env),
        PolicyKind::Greedy => run_greedy(env),
    }
}

fn check_fresh<H: PullHandle>(env: &H, delta: f64) -> Result<()> {
    if env.round() != 0 {
        return Err(invalid_arg("policy needs a fresh environment"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid_arg(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

// Estimates are only formed while at least two arms share the budget.
fn estimator_for<H: PullHandle>(env: &H, constants: BoundConstants) -> Estimator {
    Estimator::new(env.rho(), env.horizon() / 2 + 2, env.upper_alpha(), constants)
}

/// Pull `arm` until the horizon and return the resulting pull counts.
fn finish_on<H: PullHandle>(env: &mut H, arm: usize, pulls: &mut [u64]) -> Result<()> {
    while env.round() < env.horizon() {
        env.pull(arm)?;
        pulls[arm] += 1;
    }
    Ok(())
}

/// Index of the smallest value; ties go to the earliest position.
fn argmin_by<T>(items: &[T], key: impl Fn(&T) -> f64) -> usize {
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for (pos, item) in items.iter().enumerate() {
        let v = key(item);
        if v < best_val {
            best = pos;
            best_val = v;
        }
    }
    best
}

/// Position `p` whose prediction is below every other by more than `2 cb`.
/// With a single candidate the condition holds vacuously.
fn gap_winner(preds: &[f64], cb: f64) -> Option<usize> {
    (0..preds.len()).find(|&p| {
        let rival = preds
            .iter()
            .enumerate()
            .filter(|&(q, _)| q != p)
            .map(|(_, &v)| v)
            .fold(f64::INFINITY, f64::min);
        preds[p] < rival - 2.0 * cb
    })
}

/// Adaptive explore-then-commit with confidence `delta`.
pub fn run_etc<H: PullHandle>(env: &mut H, delta: f64) -> Result<PolicyOutcome> {
    run_etc_with(env, delta, BoundConstants::Simplified)
}

/// [`run_etc`] with a choice of width constants.
pub fn run_etc_with<H: PullHandle>(env: &mut H, delta: f64, constants: BoundConstants) -> Result<PolicyOutcome> {
    check_fresh(env, delta)?;
    let k = env.num_arms();
    let horizon = env.horizon();
    let rho = env.rho();
    let estimator = estimator_for(env, constants);
    let mut samples: Vec<ArmSamples> = (0..k).map(|_| ArmSamples::new()).collect();
    let mut pulls = vec![0u64; k];

    if k == 1 {
        finish_on(env, 0, &mut pulls)?;
        return Ok(PolicyOutcome {
            i_out: 0,
            tau_out: horizon,
            pulls,
            commit_round: Some(0),
            commit_reason: CommitReason::GapIdentified,
            sweeps: 0,
        });
    }

    let max_sweeps = horizon / k as u64;
    let mut last_preds: Vec<f64> = Vec::new();
    for n in 1..=max_sweeps {
        for (arm, arm_samples) in samples.iter_mut().enumerate() {
            arm_samples.push(env.pull(arm)?);
            pulls[arm] += 1;
        }
        let tau_out = horizon - n * (k as u64 - 1);
        if n < 2 {
            last_preds = samples.iter().map(|s| s.mean().expect("pulled once")).collect();
            continue;
        }
        let estimates = samples
            .iter()
            .map(|s| estimator.estimate(s, delta))
            .collect::<Result<Vec<_>>>()?;
        last_preds = estimates.iter().map(|e| e.predict(tau_out, rho)).collect();
        let cb = estimator.cb_mu(n / 2, delta, k, horizon);
        if let Some(winner) = gap_winner(&last_preds, cb) {
            let commit_round = env.round();
            finish_on(env, winner, &mut pulls)?;
            return Ok(PolicyOutcome {
                i_out: winner,
                tau_out: pulls[winner],
                pulls,
                commit_round: Some(commit_round),
                commit_reason: CommitReason::GapIdentified,
                sweeps: n,
            });
        }
    }

    let i_out = argmin_by(&last_preds, |&v| v);
    finish_on(env, i_out, &mut pulls)?;
    Ok(PolicyOutcome {
        i_out,
        tau_out: pulls[i_out],
        pulls,
        commit_round: None,
        commit_reason: CommitReason::BudgetExhausted,
        sweeps: max_sweeps,
    })
}

/// Surviving arms of an elimination policy with their latest estimates.
#[derive(Clone, Debug)]
pub struct ActiveSet {
    arms: Vec<usize>,
    estimates: Vec<Option<ParamEstimate>>,
    sweeps: u64,
}

impl ActiveSet {
    pub fn new(num_arms: usize) -> Self {
        Self {
            arms: (0..num_arms).collect(),
            estimates: vec![None; num_arms],
            sweeps: 0,
        }
    }

    /// Active arm indices in increasing order.
    pub fn arms(&self) -> &[usize] {
        &self.arms
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    /// Completed sweeps; each active arm has exactly this many pulls.
    pub fn sweeps(&self) -> u64 {
        self.sweeps
    }

    pub fn estimate(&self, arm: usize) -> Option<&ParamEstimate> {
        self.estimates[arm].as_ref()
    }

    fn retain(&mut self, survivors: Vec<usize>) {
        debug_assert!(!survivors.is_empty());
        debug_assert!(survivors.iter().all(|a| self.arms.contains(a)));
        self.arms = survivors;
    }
}

/// `pred_i(m) - pred_j(m) > 2 cb`, the pointwise dominance of `i` by `j`.
pub fn dominated_at(ei: &ParamEstimate, ej: &ParamEstimate, rho: f64, cb: f64, m: u64) -> bool {
    ei.predict(m, rho) - ej.predict(m, rho) > 2.0 * cb
}

/// The pull counts `m` in `[m_lo, m_hi]` at which arm `i` is dominated by
/// arm `j`, as an inclusive interval.
///
/// The difference of two predictions is monotone in `m`: decreasing when
/// `i` has the larger clipped alpha, increasing when it has the smaller one.
/// The dominated set is therefore a prefix or a suffix of the range and is
/// located by binary search.
pub fn dominance_interval(
    i: usize,
    j: usize,
    estimates: &[ParamEstimate],
    rho: f64,
    cb: f64,
    m_lo: u64,
    m_hi: u64,
) -> Option<(u64, u64)> {
    if m_lo > m_hi {
        return None;
    }
    let (ei, ej) = (&estimates[i], &estimates[j]);
    let holds = |m: u64| dominated_at(ei, ej, rho, cb, m);
    let slope = ei.alpha_clipped() - ej.alpha_clipped();
    if slope > 0.0 {
        if !holds(m_lo) {
            return None;
        }
        // last m with holds(m)
        let (mut lo, mut hi) = (m_lo, m_hi);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if holds(mid) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        Some((m_lo, lo))
    } else if slope < 0.0 {
        if !holds(m_hi) {
            return None;
        }
        // first m with holds(m)
        let (mut lo, mut hi) = (m_lo, m_hi);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if holds(mid) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Some((lo, m_hi))
    } else if holds(m_lo) {
        Some((m_lo, m_hi))
    } else {
        None
    }
}

/// Arms of `active` that survive elimination: `i` is removed when, for
/// every `m` in `[n, tau_out]`, some other active arm dominates it at `m`.
///
/// `estimates` is indexed by arm and must cover every active arm. All
/// comparisons use the same snapshot, so removal order does not matter.
pub fn eliminate(active: &[usize], estimates: &[ParamEstimate], rho: f64, cb: f64, n: u64, tau_out: u64) -> Vec<usize> {
    active
        .iter()
        .copied()
        .filter(|&i| {
            let mut intervals: Vec<(u64, u64)> = active
                .iter()
                .filter(|&&j| j != i)
                .filter_map(|&j| dominance_interval(i, j, estimates, rho, cb, n, tau_out))
                .collect();
            intervals.sort_unstable();
            !covers(&intervals, n, tau_out)
        })
        .collect()
}

/// Whether sorted inclusive intervals cover `[lo, hi]`.
fn covers(sorted: &[(u64, u64)], lo: u64, hi: u64) -> bool {
    let mut next = lo;
    for &(a, b) in sorted {
        if a > next {
            return false;
        }
        if b >= next {
            if b >= hi {
                return true;
            }
            next = b + 1;
        }
    }
    false
}

/// Reference implementation of [`eliminate`] that checks every `m`.
pub fn eliminate_brute_force(
    active: &[usize],
    estimates: &[ParamEstimate],
    rho: f64,
    cb: f64,
    n: u64,
    tau_out: u64,
) -> Vec<usize> {
    active
        .iter()
        .copied()
        .filter(|&i| {
            !(n..=tau_out).all(|m| {
                active
                    .iter()
                    .any(|&j| j != i && dominated_at(&estimates[i], &estimates[j], rho, cb, m))
            })
        })
        .collect()
}

/// REST-SURE: round-robin over a shrinking active set with two stop rules.
pub fn run_rest_sure<H: PullHandle>(env: &mut H, delta: f64) -> Result<PolicyOutcome> {
    run_rest_sure_with(env, delta, BoundConstants::Simplified)
}

/// [`run_rest_sure`] with a choice of width constants.
pub fn run_rest_sure_with<H: PullHandle>(env: &mut H, delta: f64, constants: BoundConstants) -> Result<PolicyOutcome> {
    check_fresh(env, delta)?;
    let k = env.num_arms();
    let horizon = env.horizon();
    let rho = env.rho();
    let estimator = estimator_for(env, constants);
    let mut samples: Vec<ArmSamples> = (0..k).map(|_| ArmSamples::new()).collect();
    let mut pulls = vec![0u64; k];
    let mut active = ActiveSet::new(k);
    let placeholder = ParamEstimate {
        alpha_hat: 0.0,
        beta_hat: f64::INFINITY,
        cb_alpha: 0.0,
        cb_beta: 0.0,
        tau: 0,
        delta,
        upper: env.upper_alpha(),
    };

    loop {
        let n = active.sweeps();
        let t = env.round();
        let tau_out = horizon - t + n;
        let size = active.len();

        let commit = |env: &mut H, pulls: &mut Vec<u64>, arm: usize, reason: CommitReason| -> Result<PolicyOutcome> {
            finish_on(env, arm, pulls)?;
            Ok(PolicyOutcome {
                i_out: arm,
                tau_out: pulls[arm],
                pulls: pulls.clone(),
                commit_round: Some(t),
                commit_reason: reason,
                sweeps: n,
            })
        };

        if size == 1 {
            return commit(env, &mut pulls, active.arms()[0], CommitReason::GapIdentified);
        }

        let mut preds_out: Vec<f64> = Vec::new();
        if n >= 2 {
            for &arm in &active.arms {
                active.estimates[arm] = Some(estimator.estimate(&samples[arm], delta)?);
            }
            let snapshot: Vec<ParamEstimate> = active.estimates.iter().map(|e| e.unwrap_or(placeholder)).collect();
            let cb = estimator.cb_mu(n / 2, delta, k, horizon);
            preds_out = active.arms().iter().map(|&a| snapshot[a].predict(tau_out, rho)).collect();

            if let Some(pos) = gap_winner(&preds_out, cb) {
                return commit(env, &mut pulls, active.arms()[pos], CommitReason::GapIdentified);
            }

            let m_next = (tau_out + 1).saturating_sub(size as u64).max(1);
            let best_next = active
                .arms()
                .iter()
                .map(|&a| snapshot[a].predict(m_next, rho))
                .fold(f64::INFINITY, f64::min);
            let best_now = preds_out.iter().copied().fold(f64::INFINITY, f64::min);
            if best_next - 2.0 * cb > best_now {
                let pos = argmin_by(&preds_out, |&v| v);
                return commit(env, &mut pulls, active.arms()[pos], CommitReason::ExplorationUnprofitable);
            }

            let survivors = eliminate(active.arms(), &snapshot, rho, cb, n, tau_out);
            if survivors.len() < size {
                let keep: Vec<f64> = active
                    .arms()
                    .iter()
                    .zip(&preds_out)
                    .filter(|(a, _)| survivors.contains(a))
                    .map(|(_, &p)| p)
                    .collect();
                active.retain(survivors);
                preds_out = keep;
            }
        } else if n == 1 {
            preds_out = active.arms().iter().map(|&a| samples[a].mean().expect("pulled once")).collect();
        }

        if t + active.len() as u64 > horizon {
            let pos = if preds_out.is_empty() { 0 } else { argmin_by(&preds_out, |&v| v) };
            let arm = active.arms()[pos];
            finish_on(env, arm, &mut pulls)?;
            return Ok(PolicyOutcome {
                i_out: arm,
                tau_out: pulls[arm],
                pulls,
                commit_round: None,
                commit_reason: CommitReason::BudgetExhausted,
                sweeps: n,
            });
        }

        for &arm in active.arms() {
            samples[arm].push(env.pull(arm)?);
            pulls[arm] += 1;
        }
        active.sweeps += 1;
    }
}

/// Coefficients `(alpha_hat, beta_hat)` without confidence widths.
fn point_estimate(samples: &ArmSamples, table: &HarmonicTable) -> Option<(f64, f64)> {
    let split = samples.split().ok()?;
    let a = alpha_hat(&split, table);
    Some((a, beta_hat(&split, a, table)))
}

/// Projected loss at `m`, falling back to the raw mean below two samples.
fn point_prediction(samples: &ArmSamples, table: &HarmonicTable, upper: f64, m: u64) -> f64 {
    match point_estimate(samples, table) {
        Some((a, b)) => a.clamp(0.0, upper) / (m as f64).powf(table.rho()) + b,
        None => samples.mean().unwrap_or(f64::INFINITY),
    }
}

/// Round-robin over all arms for the whole horizon, then output the arm
/// with the smallest projected loss at `floor(T / K)`.
pub fn run_uniform<H: PullHandle>(env: &mut H) -> Result<PolicyOutcome> {
    check_fresh(env, 0.5)?;
    let k = env.num_arms();
    let horizon = env.horizon();
    let table = HarmonicTable::new(env.rho(), horizon / k as u64 + 1);
    let mut samples: Vec<ArmSamples> = (0..k).map(|_| ArmSamples::new()).collect();
    let mut pulls = vec![0u64; k];
    for round in 0..horizon {
        let arm = (round % k as u64) as usize;
        samples[arm].push(env.pull(arm)?);
        pulls[arm] += 1;
    }
    let target = (horizon / k as u64).max(1);
    let preds: Vec<f64> = samples
        .iter()
        .map(|s| point_prediction(s, &table, env.upper_alpha(), target))
        .collect();
    let i_out = argmin_by(&preds, |&v| v);
    Ok(PolicyOutcome {
        i_out,
        tau_out: pulls[i_out],
        pulls,
        commit_round: None,
        commit_reason: CommitReason::BudgetExhausted,
        sweeps: horizon / k as u64,
    })
}

/// After one pull per arm, always pull the arm whose projected loss at its
/// own next pull count is smallest. Outputs the most-pulled arm.
pub fn run_greedy<H: PullHandle>(env: &mut H) -> Result<PolicyOutcome> {
    check_fresh(env, 0.5)?;
    let k = env.num_arms();
    let horizon = env.horizon();
    let upper = env.upper_alpha();
    let table = HarmonicTable::new(env.rho(), horizon + 1);
    let mut samples: Vec<ArmSamples> = (0..k).map(|_| ArmSamples::new()).collect();
    let mut pulls = vec![0u64; k];
    let mut preds = vec![f64::INFINITY; k];
    for arm in 0..k {
        if env.round() == horizon {
            break;
        }
        samples[arm].push(env.pull(arm)?);
        pulls[arm] += 1;
        preds[arm] = point_prediction(&samples[arm], &table, upper, pulls[arm] + 1);
    }
    while env.round() < horizon {
        let arm = argmin_by(&preds, |&v| v);
        samples[arm].push(env.pull(arm)?);
        pulls[arm] += 1;
        preds[arm] = point_prediction(&samples[arm], &table, upper, pulls[arm] + 1);
    }
    let most = pulls.iter().copied().max().unwrap_or(0);
    let i_out = pulls.iter().position(|&p| p == most).unwrap_or(0);
    Ok(PolicyOutcome {
        i_out,
        tau_out: pulls[i_out],
        pulls,
        commit_round: None,
        commit_reason: CommitReason::BudgetExhausted,
        sweeps: 1,
    })
}
