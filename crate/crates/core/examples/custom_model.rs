//! Plugging in a user nonlinearity through callbacks. The model here is a
//! cubic with a u·v coupling, so the balanced level is found numerically.

use std::sync::Arc;

use pinlayer::layer::{composite, front_profile, geometry, Orientation};
use pinlayer::model::Callbacks;
use pinlayer::spectrum::{analyze, SpectrumConfig};
use pinlayer::steady::{refine, NewtonConfig};
use pinlayer::{find_v_star, validate_assumptions, BistableModel, ProblemParams};

fn main() -> pinlayer::Result<()> {
    let (a, b) = (0.4, 0.3);
    let cb = Callbacks {
        f: Arc::new(move |u, v| u - u * u * u + a * v + b * u * v + 0.05),
        f_u: Arc::new(move |u, v| 1.0 - 3.0 * u * u + b * v),
        f_v: Arc::new(move |u, _| a + b * u),
        f_uu: Arc::new(|u, _| -6.0 * u),
        f_uv: Arc::new(move |_, _| b),
    };
    let model = BistableModel::new("cubic + u v", (-0.4, 0.2), (-2.0, 2.0), cb)?;
    println!("max derivative mismatch {:.1e}", model.derivative_mismatch(0.3, -0.1));

    let params = ProblemParams::new(0.02, 1.0, 0.0)?;
    let checks = validate_assumptions(&model, &params, 32)?;
    println!("assumptions hold: {}", checks.all_passed());

    let br = find_v_star(&model)?;
    println!("v* = {:.10}, J'(v*) = {:.6}", br.v_star, br.j_prime_star);
    let front = front_profile(&model, &br, br.default_alpha())?;
    let g = geometry(&br, &front, &params, Orientation::JumpUp)?;
    let approx = composite(&br, &g, &front, &params, 2048)?;
    let st = refine(&model, &params, &approx, &NewtonConfig::default())?;
    let rep = analyze(&model, &br, &front, &g, &st, &SpectrumConfig::default())?;
    println!(
        "eps*kappa* = {:.5e}, Evans = {:.5e}, direct = {:.5e}: {:?}",
        rep.lambda_asymptotic, rep.lambda_evans.re, rep.lambda_direct.re, rep.verdict
    );
    Ok(())
}
