//! Composite approximation, Newton refinement and mesh extrapolation.

use pinlayer::layer::{composite, front_profile, geometry, Orientation};
use pinlayer::steady::{refine, refine_doubled, richardson, NewtonConfig};
use pinlayer::{builtin_cubic, find_v_star, ProblemParams};

fn main() -> pinlayer::Result<()> {
    let model = builtin_cubic(-0.5)?;
    let b = find_v_star(&model)?;
    let front = front_profile(&model, &b, b.default_alpha())?;
    let params = ProblemParams::new(0.02, 1.0, 0.2)?;
    let g = geometry(&b, &front, &params, Orientation::JumpUp)?;
    let approx = composite(&b, &g, &front, &params, 2048)?;

    let cfg = NewtonConfig::default();
    let st = refine(&model, &params, &approx, &cfg)?;
    let gap = approx.u.iter().zip(&st.u).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    println!("newton iterations   {}", st.newton_iters);
    println!("residual            {:.2e}", st.residual_inf);
    println!("first integral      {:.2e}", st.first_integral_dev);
    println!("mass error          {:.2e}", st.mass_error);
    println!("composite gap       {gap:.2e}");
    println!(
        "layer position      {:.8} (asymptotic {:.8})",
        st.layer_position_detected.unwrap_or(f64::NAN),
        g.x_star(params.epsilon)
    );

    let fine = refine_doubled(&model, &st, &cfg)?;
    let ext = richardson(&st, &fine)?;
    let change = ext.u.iter().zip(&st.u).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    println!("extrapolation shift {change:.2e} (O(h^2) error of the {}-node state)", st.u.len());
    Ok(())
}
