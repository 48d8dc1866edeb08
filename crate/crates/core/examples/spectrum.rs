//! Spectral analysis of the layer for a stable and an unstable coupling:
//! asymptotic rate, Evans zero, direct eigenvalue and the exclusion checks.

use pinlayer::config::RunConfig;
use pinlayer::report::prepare;
use pinlayer::spectrum::{analyze, SpectrumConfig};

fn main() -> pinlayer::Result<()> {
    for s in [0.1, -0.5] {
        let cfg = RunConfig::cubic(s, 0.02, 1.0, 0.0);
        let prep = prepare(&cfg)?;
        let state = prep.steady(&cfg)?;
        let rep = analyze(&prep.model, &prep.branch, &prep.profile, &prep.geometry, &state, &SpectrumConfig::default())?;
        println!("s = {s}");
        println!("  kappa*            {:.6}", rep.kappa_star);
        println!("  eps*kappa*        {:.6e}", rep.lambda_asymptotic);
        println!("  Evans zero        {:.6e}", rep.lambda_evans.re);
        println!("  direct            {:.6e}", rep.lambda_direct.re);
        println!("  verdict           {:?} (indicators agree: {})", rep.verdict, rep.indicators_agree);
        println!("  min |g| case II   {:.3e}", rep.case2_min_g);
        for c in &rep.case3 {
            println!("  mu = {:.1}: H1 = {:.4}, H2 = {:.4}", c.lambda_hat.re, c.h1.re, c.h2.re);
        }
        println!("  zero mode         integral {:.12}", rep.zero_mode.constraint_integral);
    }
    Ok(())
}
