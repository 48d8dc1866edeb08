//! Evans function along the real axis and its zero near ε·κ*.

use num_complex::Complex64;
use pinlayer::config::RunConfig;
use pinlayer::report::prepare;
use pinlayer::spectrum::EvansSystem;

fn main() -> pinlayer::Result<()> {
    let (s, eps) = (-0.2, 0.02);
    let cfg = RunConfig::cubic(s, eps, 1.0, 0.0);
    let prep = prepare(&cfg)?;
    let state = prep.steady(&cfg)?;
    let evans = EvansSystem::new(&prep.model, &state)?;

    let lambdas: Vec<Complex64> = (1..=8).map(|k| Complex64::new(0.005 * k as f64, 0.0)).collect();
    for p in evans.sample(&lambdas)? {
        println!("lambda = {:.3}: g/lambda = {:+.6e}", p.lambda.re, (p.g_normalized / p.lambda).re);
    }
    // closed-form κ* of the cubic
    let seed = Complex64::new(eps * -6.0 * 2f64.sqrt() * s / (2.0 + s), 0.0);
    let zero = evans.zero_search(seed)?;
    println!("seed {:.6e} -> zero {:.6e} {:+.1e}i", seed.re, zero.re, zero.im);
    Ok(())
}
