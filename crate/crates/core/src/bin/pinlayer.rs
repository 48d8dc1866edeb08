//! Command-line front end.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pinlayer::branch::{roots_at, J};
use pinlayer::config::{Format, RunConfig};
use pinlayer::layer::{matching_identities, LayerGeometry, MatchReport};
use pinlayer::report::{
    prepare, run_report, write_csv, write_json, ErrorReport, SteadySummary,
};
use pinlayer::simulate::run_stability_experiment;
use pinlayer::spectrum::analyze;
use pinlayer::{find_v_star, validate_assumptions, BranchData, ValidationReport};

#[derive(Parser)]
#[command(name = "pinlayer", version, about = "Transition layers in mass-conserving reaction-diffusion systems")]
struct Cli {
    /// TOML run configuration; defaults to the cubic family with s = 0.1.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides output.directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Seed for the simulation perturbation (overrides simulate.seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Both,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Balanced level v* and the equilibrium branches.
    Branch,
    /// Front profile, layer position and matching residuals.
    Layer,
    /// Newton-refined steady state.
    Steady,
    /// Asymptotic, Evans and direct spectral indicators.
    Spectrum,
    /// Perturbation experiment with the conservative time stepper.
    Simulate,
    /// Full pipeline with consolidated verdict.
    Report,
}

#[derive(Serialize)]
struct BranchOut<'a> {
    branch: &'a BranchData,
    assumptions: &'a ValidationReport,
    v_interval: (f64, f64),
}

#[derive(Serialize)]
struct LayerOut<'a> {
    alpha: f64,
    w_dot0: f64,
    energy: f64,
    mass_defects: (f64, f64),
    geometry: &'a LayerGeometry,
    layer_position: f64,
    matching: MatchReport,
}

#[derive(Serialize)]
struct SteadyOut<'a> {
    geometry: &'a LayerGeometry,
    steady: SteadySummary,
}

fn load(cli: &Cli) -> pinlayer::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_path(p)?,
        None => RunConfig::cubic(0.1, 0.02, 1.0, 0.0),
    };
    if let Some(o) = &cli.out {
        cfg.output.directory = o.clone();
    }
    if let Some(f) = cli.format {
        cfg.output.format = match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Both => Format::Both,
        };
    }
    if let Some(s) = cli.seed {
        cfg.simulate.seed = s;
    }
    Ok(cfg)
}

fn run(cmd: Command, cfg: &RunConfig) -> pinlayer::Result<u8> {
    let dir = cfg.output.directory.as_path();
    std::fs::create_dir_all(dir)?;
    let fmt = cfg.output.format;
    match cmd {
        Command::Branch => {
            let model = cfg.build_model()?;
            let params = cfg.problem_params()?;
            let assumptions = validate_assumptions(&model, &params, 32)?;
            let branch = find_v_star(&model)?;
            if fmt.json() {
                let out = BranchOut { branch: &branch, assumptions: &assumptions, v_interval: model.v_interval };
                write_json(&dir.join("branch.json"), &out)?;
            }
            if fmt.csv() {
                let (lo, hi) = model.v_interval;
                let rows = (0..=100).filter_map(|k| {
                    let v = lo + (hi - lo) * (k as f64 + 0.5) / 101.0;
                    let r = roots_at(&model, v).ok()?;
                    Some(vec![v, r[0], r[1], r[2], J(&model, v).ok()?])
                });
                write_csv(&dir.join("branch.csv"), &["v", "h_minus", "h_zero", "h_plus", "J"], rows)?;
            }
            Ok(0)
        }
        Command::Layer => {
            let prep = prepare(cfg)?;
            let comp = prep.composite(cfg.grid.n)?;
            if fmt.json() {
                let p = &prep.profile;
                let out = LayerOut {
                    alpha: p.alpha,
                    w_dot0: p.w_dot0,
                    energy: p.energy,
                    mass_defects: p.mass_defects,
                    geometry: &prep.geometry,
                    layer_position: prep.geometry.x_star(prep.params.epsilon),
                    matching: matching_identities(&prep.model, p, &prep.geometry)?,
                };
                write_json(&dir.join("layer.json"), &out)?;
            }
            if fmt.csv() {
                let p = &prep.profile;
                let rows = (0..=800).map(|k| {
                    let z = -20.0 + 40.0 * k as f64 / 800.0;
                    let q = p.eval(z);
                    vec![z, q.w, q.w_dot]
                });
                write_csv(&dir.join("front.csv"), &["z", "W", "W_dot"], rows)?;
                let rows = (0..comp.u.len()).map(|i| vec![comp.x_grid[i], comp.u[i], comp.v[i]]);
                write_csv(&dir.join("composite.csv"), &["x", "u", "v"], rows)?;
            }
            Ok(0)
        }
        Command::Steady => {
            let prep = prepare(cfg)?;
            let state = prep.steady(cfg)?;
            if fmt.json() {
                let out = SteadyOut { geometry: &prep.geometry, steady: SteadySummary::new(&state, &prep.geometry) };
                write_json(&dir.join("steady.json"), &out)?;
            }
            if fmt.csv() {
                let rows = (0..state.u.len()).map(|i| vec![state.x_grid[i], state.u[i], state.v[i]]);
                write_csv(&dir.join("steady.csv"), &["x", "u", "v"], rows)?;
            }
            Ok(0)
        }
        Command::Spectrum => {
            let prep = prepare(cfg)?;
            let state = prep.steady(cfg)?;
            let rep = analyze(&prep.model, &prep.branch, &prep.profile, &prep.geometry, &state, &cfg.spectrum)?;
            if fmt.json() {
                write_json(&dir.join("spectrum.json"), &rep)?;
            }
            if fmt.csv() {
                let rows = rep.case2.samples.iter().map(|s| vec![s.lambda.re, s.lambda.im, s.g_value.norm()]);
                write_csv(&dir.join("evans_samples.csv"), &["re_lambda", "im_lambda", "abs_g"], rows)?;
            }
            Ok(if rep.indicators_agree { 0 } else { 2 })
        }
        Command::Simulate => {
            let prep = prepare(cfg)?;
            let state = prep.steady(cfg)?;
            let rep = run_stability_experiment(&prep.model, &prep.params, &state, &cfg.sim_config())?;
            if fmt.json() {
                write_json(&dir.join("simulate.json"), &rep)?;
            }
            if fmt.csv() {
                let rows = rep.series.iter().map(|s| {
                    vec![s.t, s.mass, s.layer_position.unwrap_or(f64::NAN), s.deviation_norm]
                });
                write_csv(&dir.join("timeseries.csv"), &["t", "mass", "layer_position", "deviation_norm"], rows)?;
            }
            Ok(0)
        }
        Command::Report => {
            let rep = run_report(cfg)?;
            if fmt.json() {
                write_json(&dir.join("report.json"), &rep)?;
            }
            if fmt.csv() {
                let row = vec![
                    rep.lambda_asymptotic,
                    rep.lambda_evans.re,
                    rep.lambda_evans.im,
                    rep.lambda_direct.re,
                    rep.lambda_direct.im,
                    rep.sim_growth_rate,
                ];
                let header = [
                    "lambda_asymptotic",
                    "lambda_evans_re",
                    "lambda_evans_im",
                    "lambda_direct_re",
                    "lambda_direct_im",
                    "sim_growth_rate",
                ];
                write_csv(&dir.join("report.csv"), &header, [row])?;
            }
            log::info!("verdict: {:?}, indicators agree: {}", rep.verdict, rep.indicators_agree());
            Ok(rep.exit_code() as u8)
        }
    }
}

fn report_error(e: &pinlayer::Error, dir: Option<&Path>) {
    let body = serde_json::json!({ "error": ErrorReport::from(e) });
    eprintln!("{body}");
    if let Some(d) = dir {
        if std::fs::create_dir_all(d).is_ok() {
            let _ = write_json(&d.join("error.json"), &body);
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            report_error(&e, cli.out.as_deref());
            return ExitCode::from(1);
        }
    };
    match run(cli.command, &cfg) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            report_error(&e, Some(&cfg.output.directory));
            ExitCode::from(1)
        }
    }
}
