//! Command-line front end: experiments, sweeps, bound computations and plots.

use std::collections::HashMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use restsure::harness::{
    emit_svg_plot, monte_carlo, read_columns, sweep, write_records, write_records_path, write_reports, write_stats,
    write_sweep, AxisScale, PlotAxes, SweepParam,
};
use restsure::theory::{
    cor1_tau_sub, cor2_n0, etc_n0, rest_sure_nbar, tau_sub, tau_sub_exact, BoundReport, ConstantExponent,
};
use restsure::{BanditError, BanditInstance, ExperimentConfig, PolicyKind, Result};

#[derive(Parser)]
#[command(name = "restsure", version, about = "Rested bandits with decaying losses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo experiment
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Run only this policy
        #[arg(long)]
        policy: Option<String>,
        /// Override the base seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override the number of runs
        #[arg(long)]
        runs: Option<u64>,
        /// Regret level for the fraction-exceeding statistic
        #[arg(long)]
        bound: Option<f64>,
        /// Output directory; overrides the config
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeat an experiment over a grid of one instance parameter
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// delta_gap, T or rho
        #[arg(long)]
        param: String,
        /// Comma-separated grid values
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute a bound and print it as CSV
    Theory {
        #[arg(long, value_enum)]
        kind: TheoryKind,
        /// Comma-separated key=value pairs among alpha, delta_gap, rho, C, T, U
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
        /// Instance or experiment config JSON, for nbar
        #[arg(long)]
        instance: Option<PathBuf>,
        /// Exponent of (sqrt(U)+1) in the nbar constant
        #[arg(long, value_enum, default_value = "fourth")]
        exponent: Exponent,
    },
    /// Plot two columns of a CSV file as SVG
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        out: PathBuf,
        /// Column that splits rows into series
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        logx: bool,
        #[arg(long)]
        logy: bool,
        #[arg(long, default_value = "")]
        title: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum TheoryKind {
    TauSub,
    TauSubExact,
    Cor1TauSub,
    EtcN0,
    Cor2N0,
    Nbar,
}

#[derive(Clone, Copy, ValueEnum)]
enum Exponent {
    Second,
    Fourth,
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    ExperimentConfig::from_path(path).map_err(|e| match e {
        BanditError::Io(io) => BanditError::Config(format!("{}: {io}", path.display())),
        other => other,
    })
}

fn cmd_run(
    config: &Path,
    policy: Option<String>,
    seed: Option<u64>,
    runs: Option<u64>,
    bound: Option<f64>,
    out: Option<PathBuf>,
) -> Result<()> {
    let mut config = load_config(config)?;
    if let Some(p) = policy {
        config.policies = vec![p.parse::<PolicyKind>()?];
    }
    if let Some(s) = seed {
        config.base_seed = s;
    }
    if let Some(n) = runs {
        config.num_runs = n;
    }
    let (stats, records) = monte_carlo(&config, bound)?;
    match out.or(config.output_dir) {
        Some(dir) => {
            fs::create_dir_all(&dir)?;
            write_records_path(&dir.join("runs.csv"), &records)?;
            write_stats(fs::File::create(dir.join("stats.csv"))?, &stats)?;
            write_stats(io::stdout().lock(), &stats)
        }
        None => write_records(io::stdout().lock(), &records),
    }
}

fn cmd_sweep(config: &Path, param: &str, grid: &[f64], out: Option<PathBuf>) -> Result<()> {
    let config = load_config(config)?;
    let param: SweepParam = param.parse()?;
    let (points, records) = sweep(&config, param, grid)?;
    match out.or(config.output_dir) {
        Some(dir) => {
            fs::create_dir_all(&dir)?;
            write_records_path(&dir.join("runs.csv"), &records)?;
            write_sweep(fs::File::create(dir.join("sweep.csv"))?, param, &points)?;
            write_sweep(io::stdout().lock(), param, &points)
        }
        None => write_sweep(io::stdout().lock(), param, &points),
    }
}

fn parse_params(pairs: &[String]) -> Result<HashMap<String, f64>> {
    pairs
        .iter()
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| BanditError::Config(format!("expected key=value, got {p:?}")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| BanditError::Config(format!("non-numeric value for {k}")))?;
            Ok((k.trim().to_owned(), v))
        })
        .collect()
}

fn load_instance(path: &Path) -> Result<BanditInstance> {
    let text = fs::read_to_string(path).map_err(|e| BanditError::Config(format!("{}: {e}", path.display())))?;
    if let Ok(config) = ExperimentConfig::from_json(&text) {
        return Ok(config.instance);
    }
    BanditInstance::from_json(&text).map_err(|e| BanditError::Config(e.to_string()))
}

fn cmd_theory(kind: TheoryKind, params: &[String], instance: Option<PathBuf>, exponent: Exponent) -> Result<()> {
    let params = parse_params(params)?;
    let get = |k: &str, default: Option<f64>| {
        params
            .get(k)
            .copied()
            .or(default)
            .ok_or_else(|| BanditError::Config(format!("missing parameter {k}")))
    };
    let horizon = || -> Result<u64> {
        let t = get("T", None)?;
        if t >= 1.0 && t.fract() == 0.0 {
            Ok(t as u64)
        } else {
            Err(BanditError::Config(format!("T must be a positive integer, got {t}")))
        }
    };
    let report: BoundReport = match kind {
        TheoryKind::TauSub => tau_sub(get("alpha", None)?, get("delta_gap", None)?, get("rho", None)?, get("C", Some(0.5))?, horizon()?)?,
        TheoryKind::TauSubExact => {
            tau_sub_exact(get("alpha", None)?, get("delta_gap", None)?, get("rho", None)?, get("C", Some(0.5))?, horizon()?)?
        }
        TheoryKind::Cor1TauSub => cor1_tau_sub(get("alpha", None)?, get("delta_gap", None)?, get("C", Some(0.5))?, horizon()?)?,
        TheoryKind::EtcN0 => etc_n0(get("delta_gap", None)?, get("rho", None)?, get("U", None)?, horizon()?, get("alpha", Some(0.0))?)?,
        TheoryKind::Cor2N0 => cor2_n0(get("alpha", None)?, get("delta_gap", None)?, get("U", None)?, horizon()?)?,
        TheoryKind::Nbar => {
            let path = instance.ok_or_else(|| BanditError::Config("nbar needs --instance".into()))?;
            let exponent = match exponent {
                Exponent::Second => ConstantExponent::Second,
                Exponent::Fourth => ConstantExponent::Fourth,
            };
            rest_sure_nbar(&load_instance(&path)?, exponent)?
        }
    };
    write_reports(io::stdout().lock(), &[report])
}

fn cmd_plot(
    input: &Path,
    x: &str,
    y: &str,
    out: &Path,
    group: Option<&str>,
    axes: PlotAxes,
) -> Result<()> {
    let file = fs::File::open(input).map_err(|e| BanditError::Config(format!("{}: {e}", input.display())))?;
    let series = read_columns(file, x, y, group)?;
    emit_svg_plot(&series, out, &axes)
}

fn exit_code(err: &BanditError) -> u8 {
    match err {
        BanditError::Config(_)
        | BanditError::InvalidArgument(_)
        | BanditError::InvalidInstance(_)
        | BanditError::Json(_) => 2,
        BanditError::BudgetExhausted { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            policy,
            seed,
            runs,
            bound,
            out,
        } => cmd_run(&config, policy, seed, runs, bound, out),
        Command::Sweep { config, param, grid, out } => cmd_sweep(&config, &param, &grid, out),
        Command::Theory {
            kind,
            params,
            instance,
            exponent,
        } => cmd_theory(kind, &params, instance, exponent),
        Command::Plot {
            input,
            x,
            y,
            out,
            group,
            logx,
            logy,
            title,
        } => {
            let scale = |log: bool| if log { AxisScale::Log } else { AxisScale::Linear };
            let axes = PlotAxes {
                title,
                x_label: x.clone(),
                y_label: y.clone(),
                x_scale: scale(logx),
                y_scale: scale(logy),
            };
            cmd_plot(&input, &x, &y, &out, group.as_deref(), axes)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(io::stderr(), "error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_kind() {
        assert_eq!(exit_code(&BanditError::Config("x".into())), 2);
        assert_eq!(exit_code(&BanditError::InvalidArgument("x".into())), 2);
        assert_eq!(exit_code(&BanditError::BudgetExhausted { horizon: 10 }), 3);
        assert_eq!(exit_code(&BanditError::Evaluation("x".into())), 1);
    }

    #[test]
    fn params_parse() {
        let p = parse_params(&["alpha=1".into(), " T = 100".into()]).unwrap();
        assert_eq!(p["alpha"], 1.0);
        assert_eq!(p["T"], 100.0);
        assert!(parse_params(&["alpha".into()]).is_err());
        assert!(parse_params(&["alpha=x".into()]).is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
