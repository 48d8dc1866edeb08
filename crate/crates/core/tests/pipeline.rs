use std::sync::Arc;

use pinlayer::config::RunConfig;
use pinlayer::layer::{composite, front_profile, geometry, matching_identities, Orientation};
use pinlayer::model::Callbacks;
use pinlayer::report::run_report;
use pinlayer::spectrum::{analyze, SpectrumConfig, Verdict};
use pinlayer::steady::{refine, NewtonConfig};
use pinlayer::{find_v_star, validate_assumptions, BistableModel, ProblemParams};

/// Cubic with its balanced level moved to v = −0.3.
fn shifted_cubic() -> BistableModel {
    let cb = Callbacks {
        f: Arc::new(|u, v| u - u * u * u + v + 0.3),
        f_u: Arc::new(|u, _| 1.0 - 3.0 * u * u),
        f_v: Arc::new(|_, _| 1.0),
        f_uu: Arc::new(|u, _| -6.0 * u),
        f_uv: Arc::new(|_, _| 0.0),
    };
    BistableModel::new("shifted cubic", (-0.45, -0.1), (-2.0, 2.0), cb).unwrap()
}

#[test]
fn user_model_runs_through_the_spectral_pipeline() {
    let m = shifted_cubic();
    let params = ProblemParams::new(0.02, 1.0, -0.3).unwrap();
    let checks = validate_assumptions(&m, &params, 32).unwrap();
    assert!(checks.all_passed(), "{:?}", checks.failures());

    let b = find_v_star(&m).unwrap();
    assert!((b.v_star + 0.3).abs() < 1e-12, "v* = {}", b.v_star);
    assert!((b.j_prime_star - 2.0).abs() < 1e-12);

    let p = front_profile(&m, &b, b.default_alpha()).unwrap();
    let g = geometry(&b, &p, &params, Orientation::JumpUp).unwrap();
    assert!(matching_identities(&m, &p, &g).unwrap().passed);

    let c = composite(&b, &g, &p, &params, 2048).unwrap();
    let st = refine(&m, &params, &c, &NewtonConfig::default()).unwrap();
    // nodal v ≈ −0.3 carries its own rounding, amplified by D/h² in the v equation
    let h = 1.0 / 2047.0;
    let floor = 16.0 * f64::EPSILON * 0.3 / (h * h);
    assert!(st.residual_inf < 1e-10 + floor, "{:e} after {} iterations", st.residual_inf, st.newton_iters);
    assert!(st.mass_error.abs() < 1e-12);

    let rep = analyze(&m, &b, &p, &g, &st, &SpectrumConfig::default()).unwrap();
    // same front and coupling as the s = 1 cubic
    let kappa = -6.0 * 2f64.sqrt() / 3.0;
    assert!(((rep.kappa_star - kappa) / kappa).abs() < 1e-10);
    assert!(((rep.lambda_direct.re - 0.02 * kappa) / (0.02 * kappa)).abs() < 0.05);
    assert!((rep.lambda_evans - rep.lambda_direct).norm() < 1e-3 * rep.lambda_direct.norm());
    assert_eq!(rep.verdict, Verdict::Stable);
    assert!(rep.indicators_agree);
}

#[test]
fn report_is_consistent_with_its_parts() {
    let cfg = RunConfig::cubic(-0.2, 0.02, 1.0, 0.1);
    let r = run_report(&cfg).unwrap();
    assert_eq!(r.verdict, Verdict::Unstable);
    assert!(r.indicators_agree());
    assert_eq!(r.exit_code(), 0);
    assert_eq!(r.lambda_direct, r.spectrum.lambda_direct);
    assert_eq!(r.lambda_evans, r.spectrum.lambda_evans);
    assert!(r.agreement_matrix.values().all(|row| row.values().all(|&ok| ok)));
    assert!(r.simulation.mass_drift_max < 1e-12);
    let rel = (r.sim_growth_rate - r.lambda_direct.re) / r.lambda_direct.re;
    assert!(rel.abs() < 0.3, "{rel}");

    let json = serde_json::to_value(&r).unwrap();
    for key in ["v_star", "J_prime", "x0", "x1", "lambda_asymptotic", "lambda_evans", "lambda_direct", "verdict"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert_eq!(json["verdict"], "unstable");
    let evans = json["lambda_evans"].as_array().unwrap();
    assert_eq!(evans.len(), 2);
    assert_eq!(evans[0].as_f64().unwrap(), r.lambda_evans.re);
}
