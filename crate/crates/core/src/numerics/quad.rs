//! Adaptive Gauss–Kronrod (G10/K21) quadrature and fixed Gauss–Legendre rules.

use crate::error::{Error, Result};

// Kronrod abscissae (positive half, descending) and weights; QUADPACK qk21.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes (XGK[1], XGK[3], ...).
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// One G10/K21 panel: returns (kronrod estimate, |kronrod − gauss|).
fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[10];
    let mut rg = 0.0;
    for j in 0..10 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

/// Adaptive integration of `f` over `[a, b]` to an absolute tolerance.
///
/// Bisection of the panel with the largest error estimate, up to `max_panels`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    integrate_with(&mut f, a, b, abs_tol, 2000)
}

pub fn integrate_with<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (r, e) = gk21(f, a, b);
    let mut panels = vec![(a, b, r, e)];
    let mut err = e;
    while err > abs_tol {
        if panels.len() >= max_panels {
            return Err(Error::Quadrature { a, b, err });
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (pa, pb, _, pe) = panels.swap_remove(idx);
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            // panel cannot be split further in double precision
            return Err(Error::Quadrature { a, b, err });
        }
        let (r1, e1) = gk21(f, pa, mid);
        let (r2, e2) = gk21(f, mid, pb);
        err += e1 + e2 - pe;
        panels.push((pa, mid, r1, e1));
        panels.push((mid, pb, r2, e2));
        // re-sum occasionally to stop drift in the running error
        if panels.len() % 64 == 0 {
            err = panels.iter().map(|p| p.3).sum();
        }
    }
    Ok(panels.iter().map(|p| p.2).sum())
}

/// Fixed 8-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre8<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    const X: [f64; 4] = [
        0.183_434_642_495_649_804_939_476_142_360_184,
        0.525_532_409_916_328_985_817_739_049_189_254,
        0.796_666_477_413_626_739_591_553_936_475_831,
        0.960_289_856_497_536_231_683_560_868_569_473,
    ];
    const W: [f64; 4] = [
        0.362_683_783_378_361_982_965_150_449_277_195,
        0.313_706_645_877_887_287_337_962_201_986_601,
        0.222_381_034_453_374_470_544_355_994_426_241,
        0.101_228_536_290_376_259_152_531_354_309_962,
    ];
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for k in 0..4 {
        s += W[k] * (f(c - h * X[k]) + f(c + h * X[k]));
    }
    s * h
}
