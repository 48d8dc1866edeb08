//! Spectral stability of the layer: direct eigensolver, Evans function,
//! asymptotic eigenvalue and the non-vanishing checks away from it.

pub mod analysis;
pub mod asymptotic;
pub mod cases;
pub mod direct;
pub mod evans;
pub mod operator;

pub use analysis::{analyze, SpectralReport, SpectrumConfig, Verdict};
pub use asymptotic::{kappa_star, lemma32_coefficients, AsymptoticEigen, Lemma32Coefficients};
pub use cases::{
    case2_sampling, case3_nonvanishing, default_omega_grid, zero_mode_exclusion, Case2Report,
    Case3Report, ZeroModeReport,
};
pub use direct::{direct_spectrum, direct_spectrum_near, DirectSpectrum, Eigenpair};
pub use evans::{evans_value, evans_zero_search, EvansSample, EvansSystem};
pub use operator::LinearizedOperator;

use num_complex::Complex64;
use serde::Serializer;

/// Serializes a complex number as `[re, im]`.
pub fn ser_complex<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

#[cfg(test)]
pub(crate) mod fixture {
    use crate::branch::{find_v_star, BranchData};
    use crate::layer::{composite, front_profile, geometry, FrontProfile, LayerGeometry, Orientation};
    use crate::model::{builtin_cubic, BistableModel, ProblemParams};
    use crate::steady::{refine, NewtonConfig, SteadyState};

    pub struct Setup {
        pub model: BistableModel,
        pub branch: BranchData,
        pub profile: FrontProfile,
        pub geom: LayerGeometry,
        pub params: ProblemParams,
        pub state: SteadyState,
    }

    pub fn cubic(s: f64, eps: f64, xi: f64, n: usize) -> Setup {
        let model = builtin_cubic(s).unwrap();
        let branch = find_v_star(&model).unwrap();
        let profile = front_profile(&model, &branch, branch.default_alpha()).unwrap();
        let params = ProblemParams::new(eps, 1.0, xi).unwrap();
        let geom = geometry(&branch, &profile, &params, Orientation::JumpUp).unwrap();
        let c = composite(&branch, &geom, &profile, &params, n).unwrap();
        let state = refine(&model, &params, &c, &NewtonConfig::default()).unwrap();
        Setup { model, branch, profile, geom, params, state }
    }
}
