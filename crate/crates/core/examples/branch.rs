//! Balanced level v* and the three equilibrium branches of the cubic
//! f(u, v) = u − u³ + s·v.

use pinlayer::branch::{alpha_bounds, J};
use pinlayer::{builtin_cubic, find_v_star};

fn main() -> pinlayer::Result<()> {
    let s = 0.5;
    let model = builtin_cubic(s)?;
    let b = find_v_star(&model)?;
    println!("v* = {:.3e}, J'(v*) = {:.6}", b.v_star, b.j_prime_star);
    println!("h(v*) = ({:.6}, {:.6}, {:.6})", b.h_minus_star, b.h_zero_star, b.h_plus_star);

    let (lo, hi) = model.v_interval;
    println!("{:>10} {:>10} {:>10} {:>10} {:>12}", "v", "h-", "h0", "h+", "J");
    for k in 0..9 {
        let v = lo + (hi - lo) * (k as f64 + 0.5) / 9.0;
        let h = b.sample(&model, v)?;
        println!("{v:>10.4} {:>10.6} {:>10.6} {:>10.6} {:>12.4e}", h[0], h[1], h[2], J(&model, v)?);
    }
    let (a_lo, a_hi) = alpha_bounds(&model, 0.01)?;
    println!("admissible layer values at v = 0.01: ({a_lo:.6}, {a_hi:.6})");
    Ok(())
}
