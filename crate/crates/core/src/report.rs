//! The end-to-end pipeline behind the command-line tool and its outputs.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::branch::{find_v_star, BranchData};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::layer::{composite, front_profile, geometry, CompositeApprox, FrontProfile, LayerGeometry};
use crate::model::{validate_assumptions, BistableModel, ProblemParams, ValidationReport};
use crate::simulate::{run_stability_experiment, SimReport};
use crate::spectrum::{analyze, SpectralReport, Verdict};
use crate::steady::{refine, SteadyState};

/// Everything upstream of the steady state.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub model: BistableModel,
    pub params: ProblemParams,
    pub assumptions: ValidationReport,
    pub branch: BranchData,
    pub profile: FrontProfile,
    pub geometry: LayerGeometry,
}

pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    let model = cfg.build_model()?;
    let params = cfg.problem_params()?;
    let assumptions = validate_assumptions(&model, &params, 32)?;
    let branch = find_v_star(&model)?;
    let alpha = cfg.model.alpha.unwrap_or_else(|| branch.default_alpha());
    let profile = front_profile(&model, &branch, alpha)?;
    let geometry = geometry(&branch, &profile, &params, cfg.model.orientation)?;
    if !assumptions.all_passed() {
        return Err(Error::InvalidModel(assumptions.failures().join("; ")));
    }
    Ok(Prepared { model, params, assumptions, branch, profile, geometry })
}

impl Prepared {
    pub fn composite(&self, n: usize) -> Result<CompositeApprox> {
        composite(&self.branch, &self.geometry, &self.profile, &self.params, n)
    }

    pub fn steady(&self, cfg: &RunConfig) -> Result<SteadyState> {
        refine(&self.model, &self.params, &self.composite(cfg.grid.n)?, &cfg.newton)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SteadySummary {
    #[serde(rename = "C")]
    pub c: f64,
    pub residual_inf: f64,
    pub first_integral_dev: f64,
    pub mass_error: f64,
    pub newton_iters: usize,
    pub layer_position: Option<f64>,
    pub layer_position_asymptotic: f64,
}

impl SteadySummary {
    pub fn new(state: &SteadyState, geom: &LayerGeometry) -> Self {
        Self {
            c: state.c,
            residual_inf: state.residual_inf,
            first_integral_dev: state.first_integral_dev,
            mass_error: state.mass_error,
            newton_iters: state.newton_iters,
            layer_position: state.layer_position_detected,
            layer_position_asymptotic: geom.x_star(state.params.epsilon),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct FullReport {
    pub assumptions: ValidationReport,
    pub v_star: f64,
    #[serde(rename = "J_prime")]
    pub j_prime: f64,
    pub x0: f64,
    pub x1: f64,
    pub lambda_asymptotic: f64,
    #[serde(serialize_with = "crate::spectrum::ser_complex")]
    pub lambda_evans: Complex64,
    #[serde(serialize_with = "crate::spectrum::ser_complex")]
    pub lambda_direct: Complex64,
    pub sim_growth_rate: f64,
    pub verdict: Verdict,
    pub indicators: BTreeMap<&'static str, Verdict>,
    pub agreement_matrix: BTreeMap<&'static str, BTreeMap<&'static str, bool>>,
    pub steady: SteadySummary,
    pub spectrum: SpectralReport,
    pub simulation: SimReport,
    pub config: RunConfig,
    pub metadata: Metadata,
}

impl FullReport {
    pub fn indicators_agree(&self) -> bool {
        self.indicators.values().all(|v| *v == self.verdict)
    }

    /// 0 when all four stability indicators agree, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.indicators_agree() {
            0
        } else {
            2
        }
    }
}

pub fn agreement_matrix(
    indicators: &BTreeMap<&'static str, Verdict>,
) -> BTreeMap<&'static str, BTreeMap<&'static str, bool>> {
    indicators
        .iter()
        .map(|(a, va)| (*a, indicators.iter().map(|(b, vb)| (*b, va == vb)).collect()))
        .collect()
}

/// validate → branch → layer → steady → (spectrum ∥ simulate).
pub fn run_report(cfg: &RunConfig) -> Result<FullReport> {
    let prep = prepare(cfg)?;
    let state = prep.steady(cfg)?;
    let sim_cfg = cfg.sim_config();
    let (spectrum, simulation) = rayon::join(
        || analyze(&prep.model, &prep.branch, &prep.profile, &prep.geometry, &state, &cfg.spectrum),
        || run_stability_experiment(&prep.model, &prep.params, &state, &sim_cfg),
    );
    let (spectrum, simulation) = (spectrum?, simulation?);
    let indicators: BTreeMap<&'static str, Verdict> = [
        ("asymptotic", Verdict::from_rate(spectrum.kappa_star)),
        ("evans", Verdict::from_rate(spectrum.lambda_evans.re)),
        ("direct", Verdict::from_rate(spectrum.lambda_direct.re)),
        ("simulation", Verdict::from_rate(simulation.growth_rate_fit)),
    ]
    .into_iter()
    .collect();
    Ok(FullReport {
        assumptions: prep.assumptions.clone(),
        v_star: prep.branch.v_star,
        j_prime: prep.branch.j_prime_star,
        x0: prep.geometry.x0,
        x1: prep.geometry.x1,
        lambda_asymptotic: spectrum.lambda_asymptotic,
        lambda_evans: spectrum.lambda_evans,
        lambda_direct: spectrum.lambda_direct,
        sim_growth_rate: simulation.growth_rate_fit,
        verdict: spectrum.verdict,
        agreement_matrix: agreement_matrix(&indicators),
        indicators,
        steady: SteadySummary::new(&state, &prep.geometry),
        spectrum,
        simulation,
        config: cfg.clone(),
        metadata: Metadata { tool: "pinlayer", version: env!("CARGO_PKG_VERSION") },
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Comma-separated values with a header row; every number is written with
/// 17 significant digits, missing values as `nan`.
pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub kind: &'static str,
    pub message: String,
}

impl From<&Error> for ErrorReport {
    fn from(e: &Error) -> Self {
        Self { kind: e.kind(), message: e.to_string() }
    }
}
