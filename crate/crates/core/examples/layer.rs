//! Standing front, layer position and the matching identities for an
//! off-centre mass.

use pinlayer::layer::{front_profile, geometry, matching_identities, Orientation};
use pinlayer::{builtin_cubic, find_v_star, ProblemParams};

fn main() -> pinlayer::Result<()> {
    let model = builtin_cubic(0.1)?;
    let b = find_v_star(&model)?;
    let front = front_profile(&model, &b, b.default_alpha())?;
    println!("W'(0) = {:.12}  (exact 1/sqrt(2) = {:.12})", front.w_dot0, 0.5f64.sqrt());
    println!("energy = {:.12}  (exact 2 sqrt(2)/3 = {:.12})", front.energy, 2.0 * 2f64.sqrt() / 3.0);

    for z in [-6.0, -2.0, 0.0, 2.0, 6.0] {
        let p = front.eval(z);
        println!("z = {z:>5.1}: W = {:>+.10}, tanh(z/sqrt 2) = {:>+.10}", p.w, (z / 2f64.sqrt()).tanh());
    }

    for xi in [-0.4, 0.0, 0.4] {
        let params = ProblemParams::new(0.02, 1.0, xi)?;
        let g = geometry(&b, &front, &params, Orientation::JumpUp)?;
        let m = matching_identities(&model, &front, &g)?;
        println!(
            "xi = {xi:>4}: x0 = {:.6}, x* = {:.6}, Phi0 = {:.1e}, K = {:.1e}, M = {:.4}, passed = {}",
            g.x0,
            g.x_star(params.epsilon),
            m.phi0,
            m.k,
            m.m,
            m.passed
        );
    }
    Ok(())
}
