//! End-to-end checks of experiments and their file outputs.

use approx::assert_relative_eq;
use restsure::env::PullHandle;
use restsure::harness::{
    emit_svg_plot, monte_carlo, read_columns, read_records_path, render_svg, sweep, write_records,
    write_records_path, write_stats, AxisScale, PlotAxes, Series, SweepParam,
};
use restsure::{ArmSpec, BanditInstance, EnvState, ExperimentConfig, NoiseModel, PolicyKind};

fn config(noise: NoiseModel) -> ExperimentConfig {
    ExperimentConfig {
        instance: BanditInstance::new(
            vec![ArmSpec::new(1.0, 0.1), ArmSpec::new(0.2, 0.35), ArmSpec::new(0.0, 0.5)],
            0.5,
            3_000,
            1.0,
            noise,
        )
        .unwrap(),
        policies: PolicyKind::ALL.to_vec(),
        num_runs: 24,
        base_seed: 17,
        delta: None,
        output_dir: None,
    }
}

fn csv_with_threads(threads: usize, config: &ExperimentConfig) -> Vec<u8> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let (_, records) = pool.install(|| monte_carlo(config, None)).unwrap();
    let mut buf = Vec::new();
    write_records(&mut buf, &records).unwrap();
    buf
}

#[test]
fn csv_is_identical_across_thread_counts() {
    let config = config(NoiseModel::ScaledBernoulli);
    let one = csv_with_threads(1, &config);
    assert_eq!(one, csv_with_threads(4, &config));
    assert_eq!(one, csv_with_threads(7, &config));
}

#[test]
fn records_are_in_run_order() {
    let config = config(NoiseModel::ScaledBernoulli);
    let (stats, records) = monte_carlo(&config, Some(0.0)).unwrap();
    assert_eq!(records.len(), 24 * 4);
    for (i, r) in records.iter().enumerate() {
        assert_eq!(r.run_id, (i / 4) as u64);
        assert_eq!(r.policy, PolicyKind::ALL[i % 4]);
        assert!(r.regret >= 0.0);
    }
    for s in &stats.policies {
        assert_eq!(s.runs, 24);
        assert!((0.0..=1.0).contains(&s.frac_exceeding.unwrap()));
    }
}

#[test]
fn policies_see_paired_samples() {
    let config = config(NoiseModel::TruncGaussian { sigma: 0.2 });
    let mut a = EnvState::new(config.instance.clone(), 17, 5).unwrap();
    let mut b = EnvState::new(config.instance.clone(), 17, 5).unwrap();
    let first: Vec<f64> = (0..50).map(|_| a.pull(1).unwrap()).collect();
    b.pull(0).unwrap();
    b.pull(2).unwrap();
    let second: Vec<f64> = (0..50).map(|_| b.pull(1).unwrap()).collect();
    assert_eq!(first, second);
}

#[test]
fn record_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("runs.csv");
    let (_, records) = monte_carlo(&config(NoiseModel::ScaledBernoulli), None).unwrap();
    write_records_path(&path, &records).unwrap();
    assert_eq!(read_records_path(&path).unwrap(), records);
}

#[test]
fn config_file_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    let mut base = config(NoiseModel::Deterministic);
    base.instance.arms.truncate(2);
    base.num_runs = 2;
    std::fs::write(&path, base.to_json().unwrap()).unwrap();
    let loaded = ExperimentConfig::from_path(&path).unwrap();
    assert_eq!(loaded, base);
    let (points, records) = sweep(&loaded, SweepParam::DeltaGap, &[0.05, 0.2, 0.5]).unwrap();
    assert_eq!(points.len(), 3);
    assert_eq!(records.len(), 3 * 2 * 4);
    let uniform = |i: usize| points[i].stats.get(PolicyKind::Uniform).unwrap().mean_regret;
    assert_relative_eq!(uniform(0), uniform(2), max_relative = 1e-12);
    assert!(sweep(&loaded, SweepParam::Rho, &[]).is_err());
}

#[test]
fn stats_csv_columns() {
    let (stats, _) = monte_carlo(&config(NoiseModel::Deterministic), Some(0.05)).unwrap();
    let mut buf = Vec::new();
    write_stats(&mut buf, &stats).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "policy,runs,mean_regret,std_regret,q50,q90,q99,frac_exceeding,mean_tau_out"
    );
    assert_eq!(text.lines().count(), 5);
    let series = read_columns(text.as_bytes(), "mean_tau_out", "mean_regret", Some("policy")).unwrap();
    assert_eq!(series.len(), 4);
}

fn golden_series() -> Vec<Series> {
    vec![
        Series {
            label: "etc".into(),
            points: vec![(1e3, 0.05), (1e4, 0.02), (1e5, 0.004)],
        },
        Series {
            label: "rest_sure".into(),
            points: vec![(1e3, 0.03), (1e4, 0.01), (1e5, 0.003)],
        },
    ]
}

fn golden_axes() -> PlotAxes {
    PlotAxes {
        title: "regret vs T".into(),
        x_label: "T".into(),
        y_label: "mean regret".into(),
        x_scale: AxisScale::Log,
        y_scale: AxisScale::Log,
    }
}

#[test]
fn svg_matches_golden_file() {
    let svg = render_svg(&golden_series(), &golden_axes()).unwrap();
    let golden = include_str!("data/golden_plot.svg");
    assert_eq!(svg, golden);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plot.svg");
    emit_svg_plot(&golden_series(), &path, &golden_axes()).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), golden);
    assert_eq!(svg.matches("<polyline").count(), 2);
}

#[test]
#[ignore]
fn regenerate_golden() {
    let svg = render_svg(&golden_series(), &golden_axes()).unwrap();
    std::fs::write(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/golden_plot.svg"), svg).unwrap();
}
