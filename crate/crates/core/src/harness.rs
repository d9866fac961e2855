//! Scoring, seeded Monte Carlo experiments and their CSV/SVG output.
//!
//! Run `r` of an experiment seeds its environment from `(base_seed, r)`
//! only, so every policy in a config faces the same per-arm loss sequences.
//! Records are produced in `(run_id, policy)` order whatever the thread
//! schedule, which makes emitted CSV byte-identical across thread counts.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{expected_loss, optimal_arm, ArmSpec, BanditInstance, EnvState};
use crate::error::{invalid_arg, BanditError, Result};
use crate::policies::{run_policy, CommitReason, PolicyKind, PolicyOutcome};
use crate::theory::BoundReport;

/// Tolerance below zero that is attributed to rounding.
pub const REGRET_TOLERANCE: f64 = 1e-12;

fn score(instance: &BanditInstance, i_out: usize, tau_out: u64) -> Result<f64> {
    if i_out >= instance.num_arms() {
        return Err(BanditError::Evaluation(format!("output arm {i_out} does not exist")));
    }
    if tau_out == 0 {
        return Err(BanditError::Evaluation(format!("output arm {i_out} was never pulled")));
    }
    if tau_out > instance.horizon {
        return Err(BanditError::Evaluation(format!(
            "tau_out = {tau_out} exceeds the horizon {}",
            instance.horizon
        )));
    }
    let (best, _) = optimal_arm(instance);
    let r = expected_loss(instance, i_out, tau_out)? - expected_loss(instance, best, instance.horizon)?;
    if r < -REGRET_TOLERANCE {
        return Err(BanditError::Evaluation(format!("negative regret {r}")));
    }
    Ok(r.max(0.0))
}

/// Pseudo-regret `mu_{i_out}(tau_out) - mu_{i*_T}(T)` recomputed from the
/// ground truth.
pub fn regret(instance: &BanditInstance, outcome: &PolicyOutcome) -> Result<f64> {
    score(instance, outcome.i_out, outcome.tau_out)
}

/// Regret of a pull-count profile, which by construction ignores the order
/// in which the pulls happened.
pub fn permutation_regret_check(instance: &BanditInstance, pulls_per_arm: &[u64], i_out: usize) -> Result<f64> {
    if pulls_per_arm.len() != instance.num_arms() {
        return Err(invalid_arg(format!(
            "profile has {} entries for {} arms",
            pulls_per_arm.len(),
            instance.num_arms()
        )));
    }
    if pulls_per_arm.iter().sum::<u64>() > instance.horizon {
        return Err(invalid_arg("profile spends more than the horizon"));
    }
    let tau_out = *pulls_per_arm
        .get(i_out)
        .ok_or_else(|| BanditError::Evaluation(format!("output arm {i_out} does not exist")))?;
    score(instance, i_out, tau_out)
}

/// One Monte Carlo experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub instance: BanditInstance,
    pub policies: Vec<PolicyKind>,
    pub num_runs: u64,
    #[serde(default)]
    pub base_seed: u64,
    /// Confidence parameter; `1 / T` when absent.
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| BanditError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let mut text = String::new();
        File::open(path)?.read_to_string(&mut text)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.instance
            .validate()
            .map_err(|e| BanditError::Config(e.to_string()))?;
        if self.num_runs == 0 {
            return Err(BanditError::Config("num_runs must be at least 1".into()));
        }
        if self.policies.is_empty() {
            return Err(BanditError::Config("at least one policy is required".into()));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d < 1.0) {
                return Err(BanditError::Config(format!("delta must lie in (0, 1), got {d}")));
            }
        }
        Ok(())
    }

    pub fn effective_delta(&self) -> f64 {
        self.delta.unwrap_or(1.0 / self.instance.horizon as f64)
    }
}

/// Scored outcome of one policy on one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub policy: PolicyKind,
    pub run_id: u64,
    pub seed: u64,
    pub i_out: usize,
    pub tau_out: u64,
    pub regret: f64,
    pub commit_round: Option<u64>,
    pub commit_reason: CommitReason,
}

/// Run `policy` on run `run_id` of `config` and score it.
pub fn run_single(config: &ExperimentConfig, policy: PolicyKind, run_id: u64) -> Result<(PolicyOutcome, RunRecord)> {
    let mut env = EnvState::new(config.instance.clone(), config.base_seed, run_id)?;
    let outcome = run_policy(policy, &mut env, config.effective_delta())?;
    let record = RunRecord {
        policy,
        run_id,
        seed: env.seed(),
        i_out: outcome.i_out,
        tau_out: outcome.tau_out,
        regret: regret(&config.instance, &outcome)?,
        commit_round: outcome.commit_round,
        commit_reason: outcome.commit_reason,
    };
    Ok((outcome, record))
}

/// Summary of one policy's runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyStats {
    pub policy: PolicyKind,
    pub runs: u64,
    pub mean_regret: f64,
    /// Sample standard deviation; zero for a single run.
    pub std_regret: f64,
    pub q50: f64,
    pub q90: f64,
    pub q99: f64,
    /// Fraction of runs whose regret exceeds the supplied bound.
    pub frac_exceeding: Option<f64>,
    pub mean_tau_out: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub policies: Vec<PolicyStats>,
}

impl AggregateStats {
    pub fn get(&self, policy: PolicyKind) -> Option<&PolicyStats> {
        self.policies.iter().find(|s| s.policy == policy)
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Per-policy statistics in first-appearance order of the policies.
pub fn aggregate(records: &[RunRecord], bound: Option<f64>) -> AggregateStats {
    let mut order: Vec<PolicyKind> = Vec::new();
    for r in records {
        if !order.contains(&r.policy) {
            order.push(r.policy);
        }
    }
    let policies = order
        .into_iter()
        .map(|policy| {
            let mine: Vec<&RunRecord> = records.iter().filter(|r| r.policy == policy).collect();
            let n = mine.len() as f64;
            let mut regrets: Vec<f64> = mine.iter().map(|r| r.regret).collect();
            regrets.sort_by(f64::total_cmp);
            let mean = regrets.iter().sum::<f64>() / n;
            let var = if mine.len() > 1 {
                regrets.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            PolicyStats {
                policy,
                runs: mine.len() as u64,
                mean_regret: mean,
                std_regret: var.sqrt(),
                q50: quantile(&regrets, 0.5),
                q90: quantile(&regrets, 0.9),
                q99: quantile(&regrets, 0.99),
                frac_exceeding: bound.map(|b| regrets.iter().filter(|&&r| r > b).count() as f64 / n),
                mean_tau_out: mine.iter().map(|r| r.tau_out as f64).sum::<f64>() / n,
            }
        })
        .collect();
    AggregateStats { policies }
}

/// Execute every `(run, policy)` pair of `config` in parallel and return
/// the records in `(run_id, policy)` order with their aggregate.
pub fn monte_carlo(config: &ExperimentConfig, bound: Option<f64>) -> Result<(AggregateStats, Vec<RunRecord>)> {
    config.validate()?;
    let per_run: Vec<Vec<RunRecord>> = (0..config.num_runs)
        .into_par_iter()
        .map(|run_id| {
            config
                .policies
                .iter()
                .map(|&p| run_single(config, p, run_id).map(|(_, rec)| rec))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let records: Vec<RunRecord> = per_run.into_iter().flatten().collect();
    Ok((aggregate(&records, bound), records))
}

/// Instance parameter varied by [`sweep`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Constant gap of a two-arm instance: arm 1 becomes arm 0 shifted up.
    DeltaGap,
    /// Horizon `T`.
    Horizon,
    Rho,
}

impl FromStr for SweepParam {
    type Err = BanditError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delta_gap" => Ok(SweepParam::DeltaGap),
            "T" | "horizon" => Ok(SweepParam::Horizon),
            "rho" => Ok(SweepParam::Rho),
            other => Err(BanditError::Config(format!("unknown sweep parameter {other:?}"))),
        }
    }
}

/// `config.instance` with `param` set to `value`.
pub fn with_param(instance: &BanditInstance, param: SweepParam, value: f64) -> Result<BanditInstance> {
    let mut out = instance.clone();
    match param {
        SweepParam::DeltaGap => {
            if out.num_arms() != 2 {
                return Err(BanditError::Config("a delta_gap sweep needs a two-arm instance".into()));
            }
            let base = out.arms[0];
            out.arms[1] = ArmSpec::new(base.alpha, base.beta + value);
        }
        SweepParam::Horizon => {
            if !(value >= 1.0 && value.fract() == 0.0) {
                return Err(BanditError::Config(format!("T must be a positive integer, got {value}")));
            }
            out.horizon = value as u64;
        }
        SweepParam::Rho => out.rho = value,
    }
    out.validate().map_err(|e| BanditError::Config(e.to_string()))?;
    Ok(out)
}

/// One grid point of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub stats: AggregateStats,
}

/// Re-run `config` once per grid value. Each point reuses the same seeds.
pub fn sweep(config: &ExperimentConfig, param: SweepParam, grid: &[f64]) -> Result<(Vec<SweepPoint>, Vec<RunRecord>)> {
    if grid.is_empty() {
        return Err(BanditError::Config("sweep grid is empty".into()));
    }
    let mut points = Vec::with_capacity(grid.len());
    let mut all = Vec::new();
    for &value in grid {
        let mut point_config = config.clone();
        point_config.instance = with_param(&config.instance, param, value)?;
        let (stats, records) = monte_carlo(&point_config, None)?;
        points.push(SweepPoint { value, stats });
        all.extend(records);
    }
    Ok((points, all))
}

/// Write run records with the header
/// `policy,run_id,seed,i_out,tau_out,regret,commit_round,commit_reason`.
pub fn write_records<W: Write>(writer: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(RECORD_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

const RECORD_HEADER: [&str; 8] = [
    "policy",
    "run_id",
    "seed",
    "i_out",
    "tau_out",
    "regret",
    "commit_round",
    "commit_reason",
];

pub fn read_records<R: Read>(reader: R) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_reader(reader);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != RECORD_HEADER {
        return Err(invalid_arg(format!("unexpected record header {header:?}")));
    }
    Ok(r.deserialize().collect::<std::result::Result<Vec<RunRecord>, _>>()?)
}

pub fn write_records_path(path: &Path, records: &[RunRecord]) -> Result<()> {
    write_records(File::create(path)?, records)
}

pub fn read_records_path(path: &Path) -> Result<Vec<RunRecord>> {
    read_records(File::open(path)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct BoundRow {
    kind: String,
    #[serde(rename = "T")]
    horizon: u64,
    #[serde(rename = "K")]
    num_arms: usize,
    rho: f64,
    #[serde(rename = "U")]
    upper: Option<f64>,
    alpha: Option<f64>,
    delta_gap: Option<f64>,
    #[serde(rename = "C")]
    c_kl: Option<f64>,
    value: u64,
    witness: String,
    regret_bound: f64,
}

/// Write bound reports with the header
/// `kind,T,K,rho,U,alpha,delta_gap,C,value,witness,regret_bound`.
pub fn write_reports<W: Write>(writer: W, reports: &[BoundReport]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(["kind", "T", "K", "rho", "U", "alpha", "delta_gap", "C", "value", "witness", "regret_bound"])?;
    for r in reports {
        w.serialize(BoundRow {
            kind: r.kind.to_string(),
            horizon: r.horizon,
            num_arms: r.num_arms,
            rho: r.rho,
            upper: r.upper,
            alpha: r.alpha,
            delta_gap: r.delta_gap,
            c_kl: r.c_kl,
            value: r.value,
            witness: r.witness.to_string(),
            regret_bound: r.regret_bound,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Write per-policy statistics, one row per policy.
pub fn write_stats<W: Write>(writer: W, stats: &AggregateStats) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for s in &stats.policies {
        w.serialize(s)?;
    }
    if stats.policies.is_empty() {
        w.write_record([
            "policy",
            "runs",
            "mean_regret",
            "std_regret",
            "q50",
            "q90",
            "q99",
            "frac_exceeding",
            "mean_tau_out",
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Write sweep statistics, one row per `(grid value, policy)`, with the
/// header `param,value,policy,runs,mean_regret,std_regret,q50,q90,q99,frac_exceeding,mean_tau_out`.
pub fn write_sweep<W: Write>(writer: W, param: SweepParam, points: &[SweepPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "param",
        "value",
        "policy",
        "runs",
        "mean_regret",
        "std_regret",
        "q50",
        "q90",
        "q99",
        "frac_exceeding",
        "mean_tau_out",
    ])?;
    let name = match param {
        SweepParam::DeltaGap => "delta_gap",
        SweepParam::Horizon => "T",
        SweepParam::Rho => "rho",
    };
    for p in points {
        for s in &p.stats.policies {
            w.write_record([
                name.to_owned(),
                p.value.to_string(),
                s.policy.name().to_owned(),
                s.runs.to_string(),
                s.mean_regret.to_string(),
                s.std_regret.to_string(),
                s.q50.to_string(),
                s.q90.to_string(),
                s.q99.to_string(),
                s.frac_exceeding.map(|f| f.to_string()).unwrap_or_default(),
                s.mean_tau_out.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read two numeric columns of a CSV file as `(x, y)` points, grouped into
/// series by the optional `group` column.
pub fn read_columns<R: Read>(reader: R, x: &str, y: &str, group: Option<&str>) -> Result<Vec<Series>> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers()?.clone();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| invalid_arg(format!("column {name:?} not found")))
    };
    let (xi, yi) = (find(x)?, find(y)?);
    let gi = group.map(find).transpose()?;
    let mut series: Vec<Series> = Vec::new();
    for row in r.records() {
        let row = row?;
        let parse = |i: usize| -> Result<f64> {
            row[i]
                .parse::<f64>()
                .map_err(|_| invalid_arg(format!("non-numeric value {:?}", &row[i])))
        };
        let label = gi.map_or_else(|| y.to_owned(), |g| row[g].to_owned());
        let point = (parse(xi)?, parse(yi)?);
        match series.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push(point),
            None => series.push(Series {
                label,
                points: vec![point],
            }),
        }
    }
    Ok(series)
}

/// A named polyline.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AxisScale {
    #[default]
    Linear,
    Log,
}

impl AxisScale {
    fn forward(self, v: f64) -> f64 {
        match self {
            AxisScale::Linear => v,
            AxisScale::Log => v.log10(),
        }
    }

    fn inverse(self, v: f64) -> f64 {
        match self {
            AxisScale::Linear => v,
            AxisScale::Log => 10f64.powf(v),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PlotAxes {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_scale: AxisScale,
    pub y_scale: AxisScale,
}

/// Range of `values` on `scale`, in transformed units, widened by 5% of the
/// span on each side. A zero span is widened by half a unit.
pub fn axis_bounds(values: &[f64], scale: AxisScale) -> (f64, f64) {
    let (lo, hi) = values
        .iter()
        .map(|&v| scale.forward(v))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let span = hi - lo;
    if span > 0.0 {
        (lo - 0.05 * span, hi + 0.05 * span)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 {
        return "0".to_owned();
    }
    if !(1e-3..1e5).contains(&a) {
        return format!("{v:.2e}");
    }
    let decimals = (3 - a.log10().floor() as i32).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Render `series` as a standalone SVG document.
pub fn render_svg(series: &[Series], axes: &PlotAxes) -> Result<String> {
    if series.is_empty() || series.iter().any(|s| s.points.is_empty()) {
        return Err(invalid_arg("plot needs at least one non-empty series"));
    }
    let points = series.iter().flat_map(|s| s.points.iter());
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.copied().unzip();
    for (vals, scale, name) in [(&xs, axes.x_scale, "x"), (&ys, axes.y_scale, "y")] {
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(invalid_arg(format!("non-finite {name} value")));
        }
        if scale == AxisScale::Log && vals.iter().any(|&v| v <= 0.0) {
            return Err(invalid_arg(format!("log {name} axis needs positive values")));
        }
    }
    let (x0, x1) = axis_bounds(&xs, axes.x_scale);
    let (y0, y1) = axis_bounds(&ys, axes.y_scale);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |v: f64| LEFT + (axes.x_scale.forward(v) - x0) / (x1 - x0) * plot_w;
    let py = |v: f64| TOP + plot_h - (axes.y_scale.forward(v) - y0) / (y1 - y0) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(&axes.title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = axes.x_scale.inverse(x0 + f * (x1 - x0));
        let yv = axes.y_scale.inverse(y0 + f * (y1 - y0));
        let (tx, ty) = (LEFT + f * plot_w, TOP + plot_h - f * plot_h);
        let _ = writeln!(
            svg,
            r#"<line x1="{tx:.2}" y1="{:.2}" x2="{tx:.2}" y2="{:.2}" stroke="black"/><text x="{tx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 18.0,
            tick_label(xv)
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{ty:.2}" x2="{LEFT}" y2="{ty:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            ty + 4.0,
            tick_label(yv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0,
        escape(&axes.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(&axes.y_label)
    );
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            coords.join(" ")
        );
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            lx + 25.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Write [`render_svg`] output to `path`.
pub fn emit_svg_plot(series: &[Series], path: &Path, axes: &PlotAxes) -> Result<()> {
    let svg = render_svg(series, axes)?;
    File::create(path)?.write_all(svg.as_bytes())?;
    Ok(())
}
