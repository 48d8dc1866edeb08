//! Conservative time stepping from a perturbed steady state, with the
//! growth rate fitted from the deviation history.

use pinlayer::config::RunConfig;
use pinlayer::report::prepare;
use pinlayer::simulate::{run_stability_experiment, SimConfig};

fn main() -> pinlayer::Result<()> {
    for s in [0.1, -0.5] {
        let cfg = RunConfig::cubic(s, 0.02, 1.0, 0.0);
        let prep = prepare(&cfg)?;
        let state = prep.steady(&cfg)?;
        let sim = SimConfig { seed: 3, ..SimConfig::default() };
        let rep = run_stability_experiment(&prep.model, &prep.params, &state, &sim)?;
        println!(
            "s = {s:>4}: rate {:+.5e} over t in [{:.0}, {:.0}] (R^2 {:.5}), {} steps, mass drift {:.1e}",
            rep.growth_rate_fit, rep.fit_window.0, rep.fit_window.1, rep.fit_r2, rep.steps, rep.mass_drift_max
        );
        for p in rep.series.iter().step_by(rep.series.len().div_ceil(6)) {
            println!("    t = {:>7.1}  |u - u*| = {:.3e}", p.t, p.deviation_norm);
        }
    }
    Ok(())
}
