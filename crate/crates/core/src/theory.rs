//! Exploration-length bounds and the regret values they imply.
//!
//! Every quantity here is the smallest integer at which a monotone
//! predicate first holds: a left side growing in `n` against a right side
//! that grows more slowly. The primary solver is an ascending scan;
//! [`Solver::Bisection`] locates the same sign change by binary search and
//! serves as a cross-check.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::env::BanditInstance;
use crate::error::{invalid_arg, BanditError, Result};

/// Which bound a [`BoundReport`] carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundKind {
    TauSub,
    TauSubExact,
    Cor1TauSub,
    EtcN0,
    RestSureNbar,
    Cor2N0,
}

impl BoundKind {
    pub const ALL: [BoundKind; 6] = [
        BoundKind::TauSub,
        BoundKind::TauSubExact,
        BoundKind::Cor1TauSub,
        BoundKind::EtcN0,
        BoundKind::RestSureNbar,
        BoundKind::Cor2N0,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BoundKind::TauSub => "TauSub",
            BoundKind::TauSubExact => "TauSubExact",
            BoundKind::Cor1TauSub => "Cor1TauSub",
            BoundKind::EtcN0 => "EtcN0",
            BoundKind::RestSureNbar => "RestSureNbar",
            BoundKind::Cor2N0 => "Cor2N0",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundKind {
    type Err = BanditError;

    fn from_str(s: &str) -> Result<Self> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| invalid_arg(format!("unknown bound kind {s:?}")))
    }
}

/// The term of a minimum that determined a bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Witness {
    /// Half of the horizon.
    HalfHorizon,
    /// The constant gap between arms.
    Gap,
    /// The gap created by the decay of the loss curve.
    Decay,
    /// No candidate qualified; the value is the documented cap.
    Cap,
    /// Remaining budget shared among the active arms.
    Budget,
    /// Dominance at every reachable pull count.
    Elimination,
    /// Another sweep cannot pay for itself.
    StopExploration,
    /// Separation of the committed arm at the output pull count.
    Commit,
    /// Nothing to decide (a single arm).
    Degenerate,
}

impl Witness {
    pub const ALL: [Witness; 9] = [
        Witness::HalfHorizon,
        Witness::Gap,
        Witness::Decay,
        Witness::Cap,
        Witness::Budget,
        Witness::Elimination,
        Witness::StopExploration,
        Witness::Commit,
        Witness::Degenerate,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Witness::HalfHorizon => "HalfHorizon",
            Witness::Gap => "Gap",
            Witness::Decay => "Decay",
            Witness::Cap => "Cap",
            Witness::Budget => "Budget",
            Witness::Elimination => "Elimination",
            Witness::StopExploration => "StopExploration",
            Witness::Commit => "Commit",
            Witness::Degenerate => "Degenerate",
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Witness {
    type Err = BanditError;

    fn from_str(s: &str) -> Result<Self> {
        Witness::ALL
            .into_iter()
            .find(|w| w.name() == s)
            .ok_or_else(|| invalid_arg(format!("unknown witness {s:?}")))
    }
}

/// One stage of the REST-SURE exploration-length computation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageDetail {
    /// 1-based stage index.
    pub stage: usize,
    /// The arm with the smallest candidate length at this stage.
    pub arm: usize,
    pub n: u64,
    pub witness: Witness,
    /// Output pull count after this stage.
    pub tau_out: i64,
}

/// A computed bound with its inputs echoed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub horizon: u64,
    pub num_arms: usize,
    pub rho: f64,
    pub upper: Option<f64>,
    pub alpha: Option<f64>,
    pub delta_gap: Option<f64>,
    pub c_kl: Option<f64>,
    pub value: u64,
    pub witness: Witness,
    /// Regret value implied by `value`; `+inf` when `value` reaches `T`.
    pub regret_bound: f64,
    /// Scale of the unquantified lower-order term, per unit constant.
    pub residual: Option<f64>,
    /// Per-stage detail; empty except for [`BoundKind::RestSureNbar`].
    pub stages: Vec<StageDetail>,
    /// Arm the bound projects as the output, where applicable.
    pub i_out: Option<usize>,
}

impl BoundReport {
    fn new(kind: BoundKind, horizon: u64, rho: f64, value: u64, witness: Witness, regret_bound: f64) -> Self {
        Self {
            kind,
            horizon,
            num_arms: 2,
            rho,
            upper: None,
            alpha: None,
            delta_gap: None,
            c_kl: None,
            value,
            witness,
            regret_bound,
            residual: None,
            stages: Vec::new(),
            i_out: None,
        }
    }
}

/// Strategy for locating the first integer at which a monotone predicate holds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    #[default]
    Scan,
    Bisection,
}

/// Smallest `n` in `[lo, hi]` with `pred(n)`, for a predicate that is false
/// then true on the range.
pub fn first_true(lo: u64, hi: u64, solver: Solver, pred: impl Fn(u64) -> bool) -> Option<u64> {
    if lo > hi {
        return None;
    }
    match solver {
        Solver::Scan => (lo..=hi).find(|&n| pred(n)),
        Solver::Bisection => {
            if !pred(hi) {
                return None;
            }
            let (mut a, mut b) = (lo, hi);
            while a < b {
                let mid = a + (b - a) / 2;
                if pred(mid) {
                    b = mid;
                } else {
                    a = mid + 1;
                }
            }
            Some(a)
        }
    }
}

/// Exponent of `(sqrt(U) + 1)` in the REST-SURE length constant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantExponent {
    Second,
    #[default]
    Fourth,
}

fn check_common(rho: f64, horizon: u64) -> Result<()> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(invalid_arg(format!("rho must lie in (0, 1), got {rho}")));
    }
    if horizon == 0 {
        return Err(invalid_arg("horizon must be at least 1"));
    }
    Ok(())
}

fn check_nonneg(name: &str, value: f64) -> Result<()> {
    if !(value >= 0.0 && value.is_finite()) {
        return Err(invalid_arg(format!("{name} must be finite and non-negative, got {value}")));
    }
    Ok(())
}

/// `alpha * ((T - tau_sub)^-rho - T^-rho)`.
pub fn lower_bound_regret(alpha: f64, rho: f64, horizon: u64, tau_sub: u64) -> Result<f64> {
    if tau_sub >= horizon {
        return Err(invalid_arg(format!("tau_sub = {tau_sub} must be below T = {horizon}")));
    }
    let t = horizon as f64;
    Ok(alpha * (((t - tau_sub as f64).powf(-rho)) - t.powf(-rho)))
}

/// [`lower_bound_regret`], or `+inf` once the length reaches the horizon.
fn regret_or_inf(alpha: f64, rho: f64, horizon: u64, value: u64) -> f64 {
    lower_bound_regret(alpha, rho, horizon, value).unwrap_or(f64::INFINITY)
}

/// Index of the smallest term; ties go to the earliest.
fn min_term(terms: &[(f64, Witness)]) -> (f64, Witness) {
    let mut best = terms[0];
    for &t in &terms[1..] {
        if t.0 < best.0 {
            best = t;
        }
    }
    best
}

fn tau_sub_terms(alpha: f64, delta_gap: f64, c_kl: f64, horizon: u64, tau: u64, exponent: f64) -> [(f64, Witness); 3] {
    let t = horizon as f64;
    let log_t = t.ln();
    let gap = if delta_gap > 0.0 {
        log_t / (c_kl * delta_gap * delta_gap)
    } else {
        f64::INFINITY
    };
    let decay = if alpha > 0.0 {
        let remaining = (t - tau as f64 - 1.0).max(0.0);
        log_t / (c_kl * alpha * alpha) * remaining.powf(exponent)
    } else {
        f64::INFINITY
    };
    [(t / 2.0, Witness::HalfHorizon), (gap, Witness::Gap), (decay, Witness::Decay)]
}

fn validate_tau_sub(alpha: f64, delta_gap: f64, rho: f64, c_kl: f64, horizon: u64) -> Result<()> {
    check_common(rho, horizon)?;
    check_nonneg("alpha", alpha)?;
    check_nonneg("Delta", delta_gap)?;
    if !(c_kl > 0.0 && c_kl.is_finite()) {
        return Err(invalid_arg(format!("C must be positive, got {c_kl}")));
    }
    Ok(())
}

/// Smallest `tau` in `[T]` strictly above
/// `min{T/2, ln T / (C Delta^2), ln T / (C alpha^2) (T - tau - 1)^(2 rho + 2)}`.
///
/// The left side grows and the minimum does not, so the first crossing is
/// unique. A zero `alpha` or `Delta` removes the corresponding term.
pub fn tau_sub(alpha: f64, delta_gap: f64, rho: f64, c_kl: f64, horizon: u64) -> Result<BoundReport> {
    tau_sub_with(alpha, delta_gap, rho, c_kl, horizon, Solver::Scan)
}

/// [`tau_sub`] with an explicit solver.
pub fn tau_sub_with(alpha: f64, delta_gap: f64, rho: f64, c_kl: f64, horizon: u64, solver: Solver) -> Result<BoundReport> {
    validate_tau_sub(alpha, delta_gap, rho, c_kl, horizon)?;
    let exponent = 2.0 * rho + 2.0;
    let terms = |tau| tau_sub_terms(alpha, delta_gap, c_kl, horizon, tau, exponent);
    // tau = T always exceeds T / 2
    let value = first_true(1, horizon, solver, |tau| tau as f64 > min_term(&terms(tau)).0).expect("T exceeds T/2");
    let (_, witness) = min_term(&terms(value));
    let mut report = BoundReport::new(
        BoundKind::TauSub,
        horizon,
        rho,
        value,
        witness,
        regret_or_inf(alpha, rho, horizon, value),
    );
    report.alpha = Some(alpha);
    report.delta_gap = Some(delta_gap);
    report.c_kl = Some(c_kl);
    Ok(report)
}

/// Single-step decay gap `alpha ((T - tau - 1)^-rho - (T - tau)^-rho)`; zero
/// once `T - tau - 1` is no longer positive.
pub fn decay_gap(alpha: f64, rho: f64, horizon: u64, tau: u64) -> f64 {
    if tau + 1 >= horizon {
        return 0.0;
    }
    let rest = (horizon - tau) as f64;
    alpha * ((rest - 1.0).powf(-rho) - rest.powf(-rho))
}

/// `(1 / (8 C d^2)) ln(C d^2 tau / 4)`, or `None` when it is not positive.
fn exact_term(c_kl: f64, d: f64, tau: u64) -> Option<f64> {
    let scaled = c_kl * d * d;
    let arg = scaled * tau as f64 / 4.0;
    if arg > 1.0 && scaled.is_finite() {
        Some(arg.ln() / (8.0 * scaled))
    } else {
        None
    }
}

/// Smallest `tau` in `[T/2]` with
/// `tau >= min{(1/(8 C D~^2)) ln(C D~^2 tau / 4), (1/(8 C Delta^2)) ln(C Delta^2 tau / 4)}`,
/// where `D~ = decay_gap(alpha, rho, T, tau)`.
///
/// A term counts only once it is positive. Both log arguments grow with
/// `tau`, so each term switches on at most once and the crossing is unique.
/// Without a crossing the value is `floor(T/2)` with witness `HalfHorizon`.
pub fn tau_sub_exact(alpha: f64, delta_gap: f64, rho: f64, c_kl: f64, horizon: u64) -> Result<BoundReport> {
    tau_sub_exact_with(alpha, delta_gap, rho, c_kl, horizon, Solver::Scan)
}

/// [`tau_sub_exact`] with an explicit solver.
pub fn tau_sub_exact_with(
    alpha: f64,
    delta_gap: f64,
    rho: f64,
    c_kl: f64,
    horizon: u64,
    solver: Solver,
) -> Result<BoundReport> {
    validate_tau_sub(alpha, delta_gap, rho, c_kl, horizon)?;
    let terms = |tau: u64| -> Vec<(f64, Witness)> {
        let mut out = Vec::with_capacity(2);
        if let Some(v) = exact_term(c_kl, delta_gap, tau) {
            out.push((v, Witness::Gap));
        }
        if let Some(v) = exact_term(c_kl, decay_gap(alpha, rho, horizon, tau), tau) {
            out.push((v, Witness::Decay));
        }
        out
    };
    let half = (horizon / 2).max(1);
    let hit = first_true(1, half, solver, |tau| {
        let t = terms(tau);
        !t.is_empty() && tau as f64 >= min_term(&t).0
    });
    let (value, witness) = match hit {
        Some(tau) => (tau, min_term(&terms(tau)).1),
        None => (half, Witness::HalfHorizon),
    };
    let mut report = BoundReport::new(
        BoundKind::TauSubExact,
        horizon,
        rho,
        value,
        witness,
        regret_or_inf(alpha, rho, horizon, value),
    );
    report.alpha = Some(alpha);
    report.delta_gap = Some(delta_gap);
    report.c_kl = Some(c_kl);
    Ok(report)
}

/// [`tau_sub`] at `rho = 1/2` with the gap term rounded up to an integer.
pub fn cor1_tau_sub(alpha: f64, delta_gap: f64, c_kl: f64, horizon: u64) -> Result<BoundReport> {
    cor1_tau_sub_with(alpha, delta_gap, c_kl, horizon, Solver::Scan)
}

/// [`cor1_tau_sub`] with an explicit solver.
pub fn cor1_tau_sub_with(alpha: f64, delta_gap: f64, c_kl: f64, horizon: u64, solver: Solver) -> Result<BoundReport> {
    validate_tau_sub(alpha, delta_gap, 0.5, c_kl, horizon)?;
    let terms = |tau| {
        let mut t = tau_sub_terms(alpha, delta_gap, c_kl, horizon, tau, 3.0);
        t[1].0 = t[1].0.ceil();
        t
    };
    let value = first_true(1, horizon, solver, |tau| tau as f64 > min_term(&terms(tau)).0).expect("T exceeds T/2");
    let (_, witness) = min_term(&terms(value));
    let mut report = BoundReport::new(
        BoundKind::Cor1TauSub,
        horizon,
        0.5,
        value,
        witness,
        regret_or_inf(alpha, 0.5, horizon, value),
    );
    report.alpha = Some(alpha);
    report.delta_gap = Some(delta_gap);
    report.c_kl = Some(c_kl);
    Ok(report)
}

fn sqrt_u_plus_one(upper: f64) -> f64 {
    upper.sqrt() + 1.0
}

/// Smallest `n` with `n >= 1600 (sqrt(U)+1)^4 / (rho^2 (1-rho)^2) ln(4 n T^2) / Delta^2`,
/// capped at `ceil(T/2)`.
///
/// `n - a ln(4 n T^2)` is negative for `n <= a` (as `ln 4 > 1`) and
/// increasing beyond, so the crossing is unique. `regret_bound` is
/// `alpha ((T - n_0)^-rho - T^-rho)`; `residual` holds `1 / sqrt(T)`, the
/// scale of the unquantified lower-order term.
pub fn etc_n0(delta_gap: f64, rho: f64, upper: f64, horizon: u64, alpha: f64) -> Result<BoundReport> {
    etc_n0_with(delta_gap, rho, upper, horizon, alpha, Solver::Scan)
}

/// [`etc_n0`] with an explicit solver.
pub fn etc_n0_with(delta_gap: f64, rho: f64, upper: f64, horizon: u64, alpha: f64, solver: Solver) -> Result<BoundReport> {
    check_common(rho, horizon)?;
    check_nonneg("Delta", delta_gap)?;
    check_nonneg("U", upper)?;
    check_nonneg("alpha", alpha)?;
    let t = horizon as f64;
    let scale = 1600.0 * sqrt_u_plus_one(upper).powi(4) / (rho * rho * (1.0 - rho) * (1.0 - rho)) / (delta_gap * delta_gap);
    let cap = horizon.div_ceil(2);
    let hit = first_true(1, cap, solver, |n| n as f64 >= scale * (4.0 * n as f64 * t * t).ln());
    let (value, witness) = match hit {
        Some(n) => (n, Witness::Gap),
        None => (cap, Witness::HalfHorizon),
    };
    let mut report = BoundReport::new(
        BoundKind::EtcN0,
        horizon,
        rho,
        value,
        witness,
        regret_or_inf(alpha, rho, horizon, value),
    );
    report.upper = Some(upper);
    report.alpha = Some(alpha);
    report.delta_gap = Some(delta_gap);
    report.residual = Some(1.0 / t.sqrt());
    Ok(report)
}

/// Smallest `n` in `[T]` strictly above `min{c(n) / Delta^2, c(n) (T - n)^3 / alpha^2}`
/// with `c(n) = 25600 (sqrt(U)+1)^4 ln(4 n T^2)`, at `rho = 1/2`.
///
/// The first branch crosses once (linear against logarithmic growth), the
/// second is decreasing, so their minimum crosses once. With neither branch
/// finite, or no crossing in `[T]`, the value is `ceil(T/2)` with witness `Cap`.
pub fn cor2_n0(alpha: f64, delta_gap: f64, upper: f64, horizon: u64) -> Result<BoundReport> {
    cor2_n0_with(alpha, delta_gap, upper, horizon, Solver::Scan)
}

/// [`cor2_n0`] with an explicit solver.
pub fn cor2_n0_with(alpha: f64, delta_gap: f64, upper: f64, horizon: u64, solver: Solver) -> Result<BoundReport> {
    check_common(0.5, horizon)?;
    check_nonneg("alpha", alpha)?;
    check_nonneg("Delta", delta_gap)?;
    check_nonneg("U", upper)?;
    let t = horizon as f64;
    let base = 25600.0 * sqrt_u_plus_one(upper).powi(4);
    let terms = |n: u64| {
        let c = base * (4.0 * n as f64 * t * t).ln();
        let gap = if delta_gap > 0.0 {
            c / (delta_gap * delta_gap)
        } else {
            f64::INFINITY
        };
        let decay = if alpha > 0.0 {
            c * (t - n as f64).powi(3) / (alpha * alpha)
        } else {
            f64::INFINITY
        };
        [(gap, Witness::Gap), (decay, Witness::Decay)]
    };
    let hit = first_true(1, horizon, solver, |n| n as f64 > min_term(&terms(n)).0);
    let (value, witness) = match hit {
        Some(n) => (n, min_term(&terms(n)).1),
        None => (horizon.div_ceil(2), Witness::Cap),
    };
    let mut report = BoundReport::new(
        BoundKind::Cor2N0,
        horizon,
        0.5,
        value,
        witness,
        regret_or_inf(alpha, 0.5, horizon, value),
    );
    report.upper = Some(upper);
    report.alpha = Some(alpha);
    report.delta_gap = Some(delta_gap);
    report.residual = Some(1.0 / t.sqrt());
    Ok(report)
}

/// Rivals of one arm within a stage, with the crossing points of its gaps.
struct Profile {
    arm: usize,
    others: Vec<usize>,
    crossings: Vec<f64>,
}

/// Inputs of one stage of [`rest_sure_nbar`] shared by all candidate arms.
struct Stage<'a> {
    instance: &'a BanditInstance,
    remaining: &'a [usize],
    /// `T - sum of earlier stage lengths`.
    budget_left: f64,
    /// Active arms at the start of the stage, `K_{s-1}`.
    active: f64,
    /// `T - sum_{r<s} K_{r+1} n_r`.
    tau_base: i64,
    /// `K_{s+1}`.
    k_next: i64,
    c_rho: f64,
    log_scale: f64,
}

impl Stage<'_> {
    fn mu(&self, arm: usize, m: i64) -> f64 {
        self.instance.arms[arm].mean(m as u64, self.instance.rho)
    }

    fn mu_star(&self, m: i64) -> f64 {
        (0..self.instance.num_arms()).map(|a| self.mu(a, m)).fold(f64::INFINITY, f64::min)
    }

    /// Rivals of `arm` and the pull counts at which two of the differences
    /// `mu_arm - mu_j` cross. Each difference is affine in `x = m^-rho`.
    fn dominance_profile(&self, arm: usize) -> Profile {
        let rho = self.instance.rho;
        let others: Vec<usize> = self.remaining.iter().copied().filter(|&j| j != arm).collect();
        let lines: Vec<(f64, f64)> = others
            .iter()
            .map(|&j| {
                let (a, b) = (&self.instance.arms[arm], &self.instance.arms[j]);
                (a.alpha - b.alpha, a.beta - b.beta)
            })
            .collect();
        let mut crossings = Vec::new();
        for p in 0..lines.len() {
            for q in p + 1..lines.len() {
                let ((sa, ia), (sb, ib)) = (lines[p], lines[q]);
                if sa == sb {
                    continue;
                }
                let x = (ib - ia) / (sa - sb);
                if x > 0.0 {
                    let m = x.powf(-1.0 / rho);
                    if m.is_finite() {
                        crossings.push(m);
                    }
                }
            }
        }
        Profile { arm, others, crossings }
    }

    /// Smallest `max_j (mu_i(m) - mu_j(m))` over `m` in `[lo, hi]`. The
    /// maximum is convex in `m^-rho`, so its minimum sits at an endpoint or
    /// next to a crossing of two differences.
    fn worst_dominance(&self, profile: &Profile, lo: i64, hi: i64) -> f64 {
        let envelope = |m: i64| {
            let mine = self.mu(profile.arm, m);
            profile
                .others
                .iter()
                .map(|&j| mine - self.mu(j, m))
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let mut best = envelope(lo).min(envelope(hi));
        for &m in &profile.crossings {
            if m >= lo as f64 && m <= hi as f64 {
                best = best.min(envelope(m.floor() as i64)).min(envelope((m.ceil() as i64).min(hi)));
            }
        }
        best
    }

    /// Candidate length of `arm`: smallest `n` above the four-term minimum,
    /// searched up to `limit`.
    fn candidate(&self, arm: usize, limit: u64) -> Option<(u64, Witness)> {
        let budget = self.budget_left / self.active;
        let n_hi = limit.min((budget.max(0.0).floor() as u64).saturating_add(1));
        let profile = self.dominance_profile(arm);
        (1..=n_hi).find_map(|n| {
            let terms = self.terms(&profile, n, budget);
            let (value, witness) = min_term(&terms);
            (n as f64 > value).then_some((n, witness))
        })
    }

    fn terms(&self, profile: &Profile, n: u64, budget: f64) -> [(f64, Witness); 4] {
        let arm = profile.arm;
        let tau_out = self.tau_base - self.k_next * n as i64;
        let numerator = self.c_rho * (n as f64 * self.log_scale).ln();
        let over_sq = |d: f64| if d > 0.0 { numerator / (d * d) } else { f64::INFINITY };

        let elimination = if tau_out >= n as i64 && self.remaining.len() > 1 {
            over_sq(self.worst_dominance(profile, n as i64, tau_out))
        } else {
            f64::INFINITY
        };
        let earlier = tau_out - self.k_next;
        let stop = if earlier >= 1 && tau_out >= 1 {
            over_sq(self.mu_star(earlier) - self.mu_star(tau_out))
        } else {
            f64::INFINITY
        };
        let commit = if tau_out >= 1 {
            let mine = self.mu(arm, tau_out);
            let margin = (0..self.instance.num_arms())
                .filter(|&j| j != arm)
                .map(|j| self.mu(j, tau_out) - mine)
                .fold(f64::INFINITY, f64::min);
            over_sq(margin)
        } else {
            f64::INFINITY
        };
        [
            (budget, Witness::Budget),
            (elimination, Witness::Elimination),
            (stop, Witness::StopExploration),
            (commit, Witness::Commit),
        ]
    }
}

/// Staged exploration length of REST-SURE on a known instance.
///
/// Stage `s` (1-based) computes, for each arm still in play, the smallest
/// `n` above the minimum of a budget share, an elimination term, a
/// stop-exploration term and a commit term, then retires the arm with the
/// smallest such `n` (ties to the lowest index). A stage won by the commit
/// or stop-exploration term ends the computation with that arm, respectively
/// the best arm in play, as output. `value` is the sum of the stage lengths
/// and `regret_bound` is `mu_out(T - value) - mu_{i*}(T)` on the true curves.
pub fn rest_sure_nbar(instance: &BanditInstance, exponent: ConstantExponent) -> Result<BoundReport> {
    instance.validate()?;
    let k = instance.num_arms();
    let horizon = instance.horizon;
    let rho = instance.rho;
    let t = horizon as f64;
    let power = match exponent {
        ConstantExponent::Second => 2,
        ConstantExponent::Fourth => 4,
    };
    let c_rho = 1600.0 * sqrt_u_plus_one(instance.upper_alpha).powi(power) / (rho * rho * (1.0 - rho) * (1.0 - rho));
    let log_scale = (k * k) as f64 * t * t;
    let (_, best_loss) = crate::env::optimal_arm(instance);

    let mut report = BoundReport::new(BoundKind::RestSureNbar, horizon, rho, 0, Witness::Degenerate, 0.0);
    report.num_arms = k;
    report.upper = Some(instance.upper_alpha);
    if k == 1 {
        report.i_out = Some(0);
        return Ok(report);
    }

    let mut remaining: Vec<usize> = (0..k).collect();
    let mut spent = 0u64;
    let mut tau_base = horizon as i64;
    let mut i_out = None;
    for s in 1..k {
        let stage = Stage {
            instance,
            remaining: &remaining,
            budget_left: (horizon - spent) as f64,
            active: (k - s + 1) as f64,
            tau_base,
            k_next: k as i64 - s as i64 - 1,
            c_rho,
            log_scale,
        };
        let mut winner: Option<(usize, u64, Witness)> = None;
        for &arm in &remaining {
            // a later arm only wins with a strictly smaller length
            let limit = winner.map_or(u64::MAX, |(_, n, _)| n - 1);
            if let Some((n, w)) = stage.candidate(arm, limit) {
                winner = Some((arm, n, w));
            }
        }
        let (arm, n, witness) = winner.ok_or_else(|| BanditError::Evaluation(format!("stage {s}: no arm has a finite length")))?;
        spent += n;
        tau_base -= stage.k_next * n as i64;
        report.stages.push(StageDetail {
            stage: s,
            arm,
            n,
            witness,
            tau_out: tau_base,
        });
        match witness {
            Witness::Commit => {
                i_out = Some(arm);
                break;
            }
            Witness::StopExploration => {
                let m = tau_base.max(1) as u64;
                let pick = remaining
                    .iter()
                    .copied()
                    .min_by(|&a, &b| instance.arms[a].mean(m, rho).total_cmp(&instance.arms[b].mean(m, rho)))
                    .expect("non-empty");
                i_out = Some(pick);
                break;
            }
            _ => remaining.retain(|&a| a != arm),
        }
    }
    let i_out = i_out.unwrap_or(remaining[0]);
    let value = spent.min(horizon);
    let out_pulls = horizon.saturating_sub(value).max(1);
    let bound = instance.arms[i_out].mean(out_pulls, rho) - best_loss;
    report.value = value;
    report.witness = report.stages[0].witness;
    report.regret_bound = bound.max(0.0);
    report.i_out = Some(i_out);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{ArmSpec, NoiseModel};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn brute_tau_sub(alpha: f64, delta_gap: f64, rho: f64, c_kl: f64, horizon: u64) -> u64 {
        let t = horizon as f64;
        (1..=horizon)
            .find(|&tau| {
                let third = if alpha > 0.0 {
                    t.ln() / (c_kl * alpha * alpha) * (t - tau as f64 - 1.0).max(0.0).powf(2.0 * rho + 2.0)
                } else {
                    f64::INFINITY
                };
                let second = t.ln() / (c_kl * delta_gap * delta_gap);
                tau as f64 > (t / 2.0).min(second).min(third)
            })
            .unwrap()
    }

    #[test]
    fn tau_sub_huge_gap_is_one() {
        let r = tau_sub(0.0, 1e3, 0.5, 0.5, 10_000).unwrap();
        assert_eq!((r.value, r.witness), (1, Witness::Gap));
    }

    #[test]
    fn tau_sub_small_horizon_hits_half() {
        let r = tau_sub(1.0, 0.01, 0.5, 0.5, 10).unwrap();
        assert_eq!((r.value, r.witness), (6, Witness::HalfHorizon));
    }

    #[test]
    fn tau_sub_matches_exhaustive_scan() {
        let r = tau_sub(1.0, 0.1, 0.5, 0.5, 10_000).unwrap();
        assert_eq!(r.value, brute_tau_sub(1.0, 0.1, 0.5, 0.5, 10_000));
        // ln(1e4) / (0.5 * 0.01) = 1842.07
        assert_eq!(r.value, 1843);
        assert_eq!(r.witness, Witness::Gap);
        assert_relative_eq!(r.regret_bound, lower_bound_regret(1.0, 0.5, 10_000, 1843).unwrap());
    }

    #[test]
    fn tau_sub_rejects_bad_input() {
        assert!(tau_sub(1.0, 0.1, 1.0, 0.5, 100).is_err());
        assert!(tau_sub(1.0, 0.1, 0.5, 0.0, 100).is_err());
        assert!(tau_sub(-1.0, 0.1, 0.5, 0.5, 100).is_err());
        assert!(tau_sub(1.0, 0.1, 0.5, 0.5, 0).is_err());
    }

    #[test]
    fn tau_sub_one_round_has_infinite_bound() {
        let r = tau_sub(1.0, 0.1, 0.5, 0.5, 1).unwrap();
        assert_eq!(r.value, 1);
        assert!(r.regret_bound.is_infinite());
    }

    #[test]
    fn lower_bound_regret_examples() {
        assert_eq!(lower_bound_regret(1.0, 0.5, 100, 0).unwrap(), 0.0);
        assert_eq!(lower_bound_regret(0.0, 0.5, 100, 40).unwrap(), 0.0);
        // 1/sqrt(5000) - 1/100, 50-digit reference
        assert_relative_eq!(
            lower_bound_regret(1.0, 0.5, 10_000, 5000).unwrap(),
            0.004_142_135_623_730_950_5,
            max_relative = 1e-12
        );
        assert!(lower_bound_regret(1.0, 0.5, 100, 100).is_err());
    }

    #[test]
    fn decay_gap_sandwich_at_half() {
        let (alpha, horizon) = (2.0, 5000u64);
        for tau in 0..horizon - 1 {
            let d = decay_gap(alpha, 0.5, horizon, tau);
            let rest = (horizon - tau) as f64;
            assert!(d > alpha / (2.0 * rest.powf(1.5)));
            assert!(d < alpha / (2.0 * (rest - 1.0).powf(1.5)));
        }
        assert_eq!(decay_gap(alpha, 0.5, horizon, horizon - 1), 0.0);
    }

    #[test]
    fn tau_sub_exact_without_alpha_uses_gap() {
        let r = tau_sub_exact(0.0, 2.0, 0.5, 0.5, 1000).unwrap();
        // first tau with 0.5 * 4 * tau / 4 > 1
        assert_eq!((r.value, r.witness), (3, Witness::Gap));
    }

    #[test]
    fn tau_sub_exact_without_signal_is_capped() {
        let r = tau_sub_exact(0.0, 0.0, 0.5, 0.5, 1001).unwrap();
        assert_eq!((r.value, r.witness), (500, Witness::HalfHorizon));
    }

    #[test]
    fn cor1_examples() {
        let r = cor1_tau_sub(0.0, 0.1, 0.5, 10_000).unwrap();
        assert_eq!((r.value, r.witness), (1844, Witness::Gap));
        let capped = cor1_tau_sub(1.0, 0.001, 0.5, 20).unwrap();
        assert_eq!((capped.value, capped.witness), (11, Witness::HalfHorizon));
    }

    #[test]
    fn etc_n0_examples() {
        // tiny gap: cap at ceil(T/2)
        let r = etc_n0(1e-3, 0.5, 1.0, 10_001, 1.0).unwrap();
        assert_eq!((r.value, r.witness), (5001, Witness::HalfHorizon));
        // large gap: brute crossing
        let (gap, rho, upper, horizon) = (10.0, 0.5, 0.0, 1_000_000u64);
        let r = etc_n0(gap, rho, upper, horizon, 1.0).unwrap();
        let a = 1600.0 / (0.0625 * 100.0);
        let t = horizon as f64;
        let brute = (1..).find(|&n: &u64| n as f64 >= a * (4.0 * n as f64 * t * t).ln()).unwrap();
        assert_eq!((r.value, r.witness), (brute, Witness::Gap));
        assert_relative_eq!(r.residual.unwrap(), 1e-3);
    }

    #[test]
    fn etc_n0_non_increasing_in_gap() {
        let mut last = u64::MAX;
        for i in 1..=60 {
            let gap = 0.05 * i as f64;
            let v = etc_n0(gap, 0.5, 0.0, 2_000_000, 1.0).unwrap().value;
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn cor2_branches() {
        // vanishing alpha removes the cubic branch
        let horizon = 100_000u64;
        let t = horizon as f64;
        let r = cor2_n0(1e-30, 100.0, 0.0, horizon).unwrap();
        let base = 25600.0;
        let gap_only = (1..=horizon)
            .find(|&n| n as f64 > base * (4.0 * n as f64 * t * t).ln() / 1e4)
            .unwrap();
        assert_eq!((r.value, r.witness), (gap_only, Witness::Gap));
        // tiny gap, moderate alpha: cubic branch
        let r = cor2_n0(1.0, 1e-6, 0.0, horizon).unwrap();
        let cubic = (1..=horizon)
            .find(|&n| n as f64 > base * (4.0 * n as f64 * t * t).ln() * (t - n as f64).powi(3))
            .unwrap();
        assert_eq!((r.value, r.witness), (cubic, Witness::Decay));
        let none = cor2_n0(0.0, 0.0, 0.0, 11).unwrap();
        assert_eq!((none.value, none.witness), (6, Witness::Cap));
    }

    fn instance(arms: &[(f64, f64)], horizon: u64) -> BanditInstance {
        let arms = arms.iter().map(|&(a, b)| ArmSpec::new(a, b)).collect();
        BanditInstance::new(arms, 0.5, horizon, 1.0, NoiseModel::ScaledBernoulli).unwrap()
    }

    #[test]
    fn nbar_single_arm_is_zero() {
        let r = rest_sure_nbar(&instance(&[(0.5, 0.5)], 100), ConstantExponent::Fourth).unwrap();
        assert_eq!((r.value, r.witness, r.regret_bound), (0, Witness::Degenerate, 0.0));
    }

    #[test]
    fn nbar_identical_stationary_arms_use_budget() {
        let horizon = 12_000;
        let r = rest_sure_nbar(&instance(&[(0.0, 0.4); 4], horizon), ConstantExponent::Fourth).unwrap();
        assert_eq!(r.stages.len(), 3);
        assert!(r.stages.iter().all(|s| s.witness == Witness::Budget));
        let arms: Vec<usize> = r.stages.iter().map(|s| s.arm).collect();
        assert_eq!(arms, vec![0, 1, 2]);
        // stage s takes the smallest integer above (T - spent) / (K - s + 1)
        let mut spent = 0u64;
        for (s, stage) in r.stages.iter().enumerate() {
            let share = (horizon - spent) as f64 / (4 - s) as f64;
            assert_eq!(stage.n, share.floor() as u64 + 1);
            spent += stage.n;
        }
        assert_eq!(r.value, spent);
    }

    #[test]
    fn nbar_two_arms_gap_regime() {
        let horizon = 100_000_000u64;
        let inst = BanditInstance::shifted_pair(0.0, 0.1, 0.8, 0.5, horizon, 0.0, NoiseModel::ScaledBernoulli).unwrap();
        let r = rest_sure_nbar(&inst, ConstantExponent::Fourth).unwrap();
        assert_eq!(r.i_out, Some(0));
        assert!(matches!(r.witness, Witness::Commit | Witness::Elimination));
        let t = horizon as f64;
        let c = 1600.0 / 0.0625;
        let expect = (1..).find(|&n: &u64| n as f64 > c * (n as f64 * 4.0 * t * t).ln() / 0.64).unwrap();
        assert_eq!(r.value, expect);
        assert_eq!(cor2_n0(0.0, 0.8, 0.0, horizon).unwrap().witness, Witness::Gap);
    }

    #[test]
    fn nbar_stage_budgets_never_overspend() {
        for arms in [
            vec![(0.2, 0.1), (0.9, 0.3), (0.5, 0.5)],
            vec![(0.0, 0.2); 3],
            vec![(1.0, 0.0), (0.0, 0.05), (0.3, 0.9), (0.7, 0.4)],
        ] {
            let k = arms.len() as u64;
            let inst = instance(&arms, 20_000);
            let r = rest_sure_nbar(&inst, ConstantExponent::Fourth).unwrap();
            let spend: u64 = r.stages.iter().map(|s| (k - s.stage as u64 - 1) * s.n).sum();
            assert!(spend <= inst.horizon, "{arms:?}: {spend}");
            assert!(r.regret_bound >= 0.0);
        }
    }

    proptest! {
        #[test]
        fn solvers_agree(
            alpha in 0.0..5.0f64, gap in 1e-3..2.0f64, rho in 0.05..0.95f64,
            c_kl in 0.1..2.0f64, horizon in 1u64..20_000, upper in 0.0..3.0f64,
        ) {
            prop_assert_eq!(
                tau_sub_with(alpha, gap, rho, c_kl, horizon, Solver::Scan).unwrap(),
                tau_sub_with(alpha, gap, rho, c_kl, horizon, Solver::Bisection).unwrap()
            );
            prop_assert_eq!(
                etc_n0_with(gap, rho, upper, horizon, alpha, Solver::Scan).unwrap(),
                etc_n0_with(gap, rho, upper, horizon, alpha, Solver::Bisection).unwrap()
            );
            prop_assert_eq!(
                cor2_n0_with(alpha, gap, upper, horizon, Solver::Scan).unwrap(),
                cor2_n0_with(alpha, gap, upper, horizon, Solver::Bisection).unwrap()
            );
            prop_assert_eq!(
                tau_sub_exact_with(alpha, gap, rho, c_kl, horizon, Solver::Scan).unwrap(),
                tau_sub_exact_with(alpha, gap, rho, c_kl, horizon, Solver::Bisection).unwrap()
            );
        }

        #[test]
        fn cor1_differs_only_by_ceiling(
            alpha in 0.0..5.0f64, gap in 1e-3..2.0f64, c_kl in 0.1..2.0f64, horizon in 1u64..20_000,
        ) {
            let a = tau_sub(alpha, gap, 0.5, c_kl, horizon).unwrap();
            let b = cor1_tau_sub(alpha, gap, c_kl, horizon).unwrap();
            prop_assert!(b.value == a.value || b.value == a.value + 1);
            if b.value != a.value {
                prop_assert!(a.witness == Witness::Gap || b.witness == Witness::Gap);
            }
        }

        #[test]
        fn tau_sub_monotone_in_gap(
            alpha in 0.0..5.0f64, gap in 1e-3..2.0f64, scale in 1.0..4.0f64,
            rho in 0.05..0.95f64, horizon in 1u64..20_000,
        ) {
            let lo = tau_sub(alpha, gap, rho, 0.5, horizon).unwrap().value;
            let hi = tau_sub(alpha, gap * scale, rho, 0.5, horizon).unwrap().value;
            prop_assert!(hi <= lo);
        }

        #[test]
        fn lower_bound_regret_increases(alpha in 0.01..5.0f64, rho in 0.05..0.95f64, horizon in 3u64..100_000, a in 0u64..100_000, b in 0u64..100_000) {
            let (a, b) = (a % horizon, b % horizon);
            prop_assume!(a < b);
            prop_assert!(lower_bound_regret(alpha, rho, horizon, a).unwrap() < lower_bound_regret(alpha, rho, horizon, b).unwrap());
        }
    }
}
