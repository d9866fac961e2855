//! Python bindings for the simulation, scoring and bound computations.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use restsure::env::{expected_loss, optimal_arm, EnvState};
use restsure::estimation::{ArmSamples, BoundConstants, Estimator, ParamEstimate};
use restsure::harness::{self, ExperimentConfig, PolicyStats, RunRecord};
use restsure::policies::{self, PolicyOutcome};
use restsure::theory::{self, BoundReport, ConstantExponent};
use restsure::{ArmSpec, BanditError, BanditInstance, NoiseModel, PolicyKind};

fn to_py(err: BanditError) -> PyErr {
    match err {
        BanditError::Config(_)
        | BanditError::InvalidArgument(_)
        | BanditError::InvalidInstance(_)
        | BanditError::InsufficientData { .. }
        | BanditError::Json(_) => PyValueError::new_err(err.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn noise_from(name: &str, sigma: Option<f64>) -> PyResult<NoiseModel> {
    match (name, sigma) {
        ("deterministic", _) => Ok(NoiseModel::Deterministic),
        ("scaled_bernoulli", _) => Ok(NoiseModel::ScaledBernoulli),
        ("trunc_gaussian", Some(sigma)) => Ok(NoiseModel::TruncGaussian { sigma }),
        ("trunc_gaussian", None) => Err(PyValueError::new_err("trunc_gaussian needs sigma")),
        (other, _) => Err(PyValueError::new_err(format!("unknown noise model {other:?}"))),
    }
}

/// Ground-truth rested bandit instance.
#[pyclass(name = "Instance", module = "restsure", frozen)]
struct PyInstance {
    inner: BanditInstance,
}

#[pymethods]
impl PyInstance {
    #[new]
    #[pyo3(signature = (arms, rho, horizon, upper=1.0, noise="scaled_bernoulli", sigma=None))]
    fn new(arms: Vec<(f64, f64)>, rho: f64, horizon: u64, upper: f64, noise: &str, sigma: Option<f64>) -> PyResult<Self> {
        let arms = arms.into_iter().map(|(a, b)| ArmSpec::new(a, b)).collect();
        let inner = BanditInstance::new(arms, rho, horizon, upper, noise_from(noise, sigma)?).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: BanditInstance::from_json(text).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(to_py)
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.inner.rho
    }

    #[getter]
    fn horizon(&self) -> u64 {
        self.inner.horizon
    }

    #[getter]
    fn upper(&self) -> f64 {
        self.inner.upper_alpha
    }

    #[getter]
    fn arms(&self) -> Vec<(f64, f64)> {
        self.inner.arms.iter().map(|a| (a.alpha, a.beta)).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.num_arms()
    }

    /// Expected loss of `arm` at its `tau`-th pull.
    fn expected_loss(&self, arm: usize, tau: u64) -> PyResult<f64> {
        expected_loss(&self.inner, arm, tau).map_err(to_py)
    }

    /// `(arm, loss)` of the best arm when pulled for the whole horizon.
    fn optimal_arm(&self) -> (usize, f64) {
        optimal_arm(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(K={}, rho={}, T={}, U={})",
            self.inner.num_arms(),
            self.inner.rho,
            self.inner.horizon,
            self.inner.upper_alpha
        )
    }
}

/// Final state of one policy run.
#[pyclass(name = "Outcome", module = "restsure", frozen, get_all)]
struct PyOutcome {
    i_out: usize,
    tau_out: u64,
    pulls: Vec<u64>,
    commit_round: Option<u64>,
    commit_reason: String,
    sweeps: u64,
}

impl From<PolicyOutcome> for PyOutcome {
    fn from(o: PolicyOutcome) -> Self {
        Self {
            i_out: o.i_out,
            tau_out: o.tau_out,
            pulls: o.pulls,
            commit_round: o.commit_round,
            commit_reason: o.commit_reason.to_string(),
            sweeps: o.sweeps,
        }
    }
}

#[pymethods]
impl PyOutcome {
    fn __repr__(&self) -> String {
        format!(
            "Outcome(i_out={}, tau_out={}, commit_reason={})",
            self.i_out, self.tau_out, self.commit_reason
        )
    }
}

/// Parameter estimate of one arm from its loss sequence.
#[pyclass(name = "Estimate", module = "restsure", frozen, get_all)]
struct PyEstimate {
    alpha_hat: f64,
    beta_hat: f64,
    cb_alpha: f64,
    cb_beta: f64,
    tau: u64,
    rho: f64,
    upper: f64,
}

#[pymethods]
impl PyEstimate {
    /// Projected expected loss after `tau_out` pulls.
    fn predict(&self, tau_out: u64) -> f64 {
        let e = ParamEstimate {
            alpha_hat: self.alpha_hat,
            beta_hat: self.beta_hat,
            cb_alpha: self.cb_alpha,
            cb_beta: self.cb_beta,
            tau: self.tau,
            delta: 0.0,
            upper: self.upper,
        };
        e.predict(tau_out, self.rho)
    }
}

/// One scored run.
#[pyclass(name = "Record", module = "restsure", frozen, get_all)]
struct PyRecord {
    policy: String,
    run_id: u64,
    seed: u64,
    i_out: usize,
    tau_out: u64,
    regret: f64,
    commit_round: Option<u64>,
    commit_reason: String,
}

impl From<RunRecord> for PyRecord {
    fn from(r: RunRecord) -> Self {
        Self {
            policy: r.policy.name().to_owned(),
            run_id: r.run_id,
            seed: r.seed,
            i_out: r.i_out,
            tau_out: r.tau_out,
            regret: r.regret,
            commit_round: r.commit_round,
            commit_reason: r.commit_reason.to_string(),
        }
    }
}

/// Per-policy summary of an experiment.
#[pyclass(name = "Stats", module = "restsure", frozen, get_all)]
struct PyStats {
    policy: String,
    runs: u64,
    mean_regret: f64,
    std_regret: f64,
    q50: f64,
    q90: f64,
    q99: f64,
    frac_exceeding: Option<f64>,
    mean_tau_out: f64,
}

impl From<PolicyStats> for PyStats {
    fn from(s: PolicyStats) -> Self {
        Self {
            policy: s.policy.name().to_owned(),
            runs: s.runs,
            mean_regret: s.mean_regret,
            std_regret: s.std_regret,
            q50: s.q50,
            q90: s.q90,
            q99: s.q99,
            frac_exceeding: s.frac_exceeding,
            mean_tau_out: s.mean_tau_out,
        }
    }
}

/// A computed bound.
#[pyclass(name = "Bound", module = "restsure", frozen, get_all)]
struct PyBound {
    kind: String,
    horizon: u64,
    value: u64,
    witness: String,
    regret_bound: f64,
    residual: Option<f64>,
    i_out: Option<usize>,
}

impl From<BoundReport> for PyBound {
    fn from(r: BoundReport) -> Self {
        Self {
            kind: r.kind.to_string(),
            horizon: r.horizon,
            value: r.value,
            witness: r.witness.to_string(),
            regret_bound: r.regret_bound,
            residual: r.residual,
            i_out: r.i_out,
        }
    }
}

#[pymethods]
impl PyBound {
    fn __repr__(&self) -> String {
        format!("Bound({}, value={}, witness={})", self.kind, self.value, self.witness)
    }
}

fn policy_from(name: &str) -> PyResult<PolicyKind> {
    name.parse().map_err(to_py)
}

/// Run one policy on a freshly seeded environment.
#[pyfunction]
#[pyo3(signature = (instance, policy, base_seed=0, run_id=0, delta=None))]
fn run_policy(instance: &PyInstance, policy: &str, base_seed: u64, run_id: u64, delta: Option<f64>) -> PyResult<PyOutcome> {
    let kind = policy_from(policy)?;
    let delta = delta.unwrap_or(1.0 / instance.inner.horizon as f64);
    let mut env = EnvState::new(instance.inner.clone(), base_seed, run_id).map_err(to_py)?;
    Ok(policies::run_policy(kind, &mut env, delta).map_err(to_py)?.into())
}

/// Pseudo-regret of an outcome.
#[pyfunction]
fn regret(instance: &PyInstance, outcome: &PyOutcome) -> PyResult<f64> {
    harness::permutation_regret_check(&instance.inner, &outcome.pulls, outcome.i_out).map_err(to_py)
}

/// Fit the split estimator to one arm's losses in pull order.
#[pyfunction]
#[pyo3(signature = (losses, rho, upper, delta))]
fn estimate(losses: Vec<f64>, rho: f64, upper: f64, delta: f64) -> PyResult<PyEstimate> {
    let estimator = Estimator::new(rho, losses.len() as u64, upper, BoundConstants::Simplified);
    let mut samples = ArmSamples::with_capacity(losses.len());
    for x in losses {
        samples.push(x);
    }
    let e = estimator.estimate(&samples, delta).map_err(to_py)?;
    Ok(PyEstimate {
        alpha_hat: e.alpha_hat,
        beta_hat: e.beta_hat,
        cb_alpha: e.cb_alpha,
        cb_beta: e.cb_beta,
        tau: e.tau,
        rho,
        upper,
    })
}

/// Width of the projected-loss confidence interval.
#[pyfunction]
fn cb_mu(tau: u64, rho: f64, upper: f64, delta: f64, num_arms: usize, horizon: u64) -> f64 {
    restsure::estimation::cb_mu(tau, rho, upper, delta, num_arms, horizon)
}

/// Paired-seed Monte Carlo experiment; returns `(stats, records)`.
#[pyfunction]
#[pyo3(signature = (instance, policies, num_runs, base_seed=0, delta=None, bound=None))]
fn monte_carlo(
    py: Python<'_>,
    instance: &PyInstance,
    policies: Vec<String>,
    num_runs: u64,
    base_seed: u64,
    delta: Option<f64>,
    bound: Option<f64>,
) -> PyResult<(Vec<PyStats>, Vec<PyRecord>)> {
    let config = ExperimentConfig {
        instance: instance.inner.clone(),
        policies: policies.iter().map(|p| policy_from(p)).collect::<PyResult<_>>()?,
        num_runs,
        base_seed,
        delta,
        output_dir: None,
    };
    let (stats, records) = py.detach(|| harness::monte_carlo(&config, bound)).map_err(to_py)?;
    Ok((
        stats.policies.into_iter().map(Into::into).collect(),
        records.into_iter().map(Into::into).collect(),
    ))
}

#[pyfunction]
#[pyo3(signature = (alpha, delta_gap, rho, horizon, c_kl=0.5))]
fn tau_sub(alpha: f64, delta_gap: f64, rho: f64, horizon: u64, c_kl: f64) -> PyResult<PyBound> {
    Ok(theory::tau_sub(alpha, delta_gap, rho, c_kl, horizon).map_err(to_py)?.into())
}

#[pyfunction]
#[pyo3(signature = (alpha, delta_gap, horizon, c_kl=0.5))]
fn cor1_tau_sub(alpha: f64, delta_gap: f64, horizon: u64, c_kl: f64) -> PyResult<PyBound> {
    Ok(theory::cor1_tau_sub(alpha, delta_gap, c_kl, horizon).map_err(to_py)?.into())
}

#[pyfunction]
fn lower_bound_regret(alpha: f64, rho: f64, horizon: u64, tau_sub: u64) -> PyResult<f64> {
    theory::lower_bound_regret(alpha, rho, horizon, tau_sub).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (delta_gap, rho, upper, horizon, alpha=0.0))]
fn etc_n0(delta_gap: f64, rho: f64, upper: f64, horizon: u64, alpha: f64) -> PyResult<PyBound> {
    Ok(theory::etc_n0(delta_gap, rho, upper, horizon, alpha).map_err(to_py)?.into())
}

#[pyfunction]
fn cor2_n0(alpha: f64, delta_gap: f64, upper: f64, horizon: u64) -> PyResult<PyBound> {
    Ok(theory::cor2_n0(alpha, delta_gap, upper, horizon).map_err(to_py)?.into())
}

#[pyfunction]
#[pyo3(signature = (instance, exponent="fourth"))]
fn rest_sure_nbar(instance: &PyInstance, exponent: &str) -> PyResult<PyBound> {
    let exponent = match exponent {
        "second" => ConstantExponent::Second,
        "fourth" => ConstantExponent::Fourth,
        other => return Err(PyValueError::new_err(format!("unknown exponent {other:?}"))),
    };
    Ok(theory::rest_sure_nbar(&instance.inner, exponent).map_err(to_py)?.into())
}

#[pymodule]
#[pyo3(name = "restsure")]
fn restsure_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PyOutcome>()?;
    m.add_class::<PyEstimate>()?;
    m.add_class::<PyRecord>()?;
    m.add_class::<PyStats>()?;
    m.add_class::<PyBound>()?;
    m.add_function(wrap_pyfunction!(run_policy, m)?)?;
    m.add_function(wrap_pyfunction!(regret, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(cb_mu, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo, m)?)?;
    m.add_function(wrap_pyfunction!(tau_sub, m)?)?;
    m.add_function(wrap_pyfunction!(cor1_tau_sub, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound_regret, m)?)?;
    m.add_function(wrap_pyfunction!(etc_n0, m)?)?;
    m.add_function(wrap_pyfunction!(cor2_n0, m)?)?;
    m.add_function(wrap_pyfunction!(rest_sure_nbar, m)?)?;
    Ok(())
}
