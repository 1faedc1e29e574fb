#![allow(dead_code)]

use toda_shock::harness::RunConfig;
use toda_shock::lattice::{Background, SteplikeLattice};
use toda_shock::surface::{SurfaceContext, TwoBandSpectrum};

/// The one-eigenvalue datum: a ≡ 1/2, b = −4 left of 0, b(0) = −1.7, b = 0 to the right.
pub fn fig1(half_width: i64) -> SteplikeLattice {
    let mut lat = SteplikeLattice::step(
        -half_width,
        half_width,
        Background::new(0.5, -4.0),
        Background::new(0.5, 0.0),
    )
    .unwrap();
    lat.set_b(0, -1.7).unwrap();
    lat
}

/// Pure step with left background (a, b) and the normalized right background.
pub fn pure_step(half_width: i64, a: f64, b: f64) -> SteplikeLattice {
    SteplikeLattice::step(
        -half_width,
        half_width,
        Background::new(a, b),
        Background::new(0.5, 0.0),
    )
    .unwrap()
}

pub fn ctx(a: f64, b: f64) -> SurfaceContext {
    SurfaceContext::new(TwoBandSpectrum::new(a, b).unwrap()).unwrap()
}

pub fn fig1_ctx() -> SurfaceContext {
    ctx(0.5, -4.0)
}

/// ∫_{e1}^{e2} f(x)/√((x−e1)(e2−x)) dx by the midpoint rule with `panels` panels
/// in θ, where x = e1 + (e2−e1)·sin²θ.
pub fn midpoint_arcsine<F: Fn(f64) -> f64>(e1: f64, e2: f64, panels: usize, f: F) -> f64 {
    let h = std::f64::consts::FRAC_PI_2 / panels as f64;
    let mut acc = 0.0;
    for k in 0..panels {
        let th = (k as f64 + 0.5) * h;
        let s = th.sin();
        let x = e1 + (e2 - e1) * s * s;
        // dx = 2(e2 − e1)·sinθ·cosθ dθ cancels √((x−e1)(e2−x)) up to the factor 2.
        acc += f(x) * 2.0 * h;
    }
    acc
}

/// Multi-eigenvalue step profiles on the fig1 backgrounds, all nonresonant.
///
/// "A" has two gap eigenvalues, "B" and "F" three, "D" two.
pub fn profile(name: &str) -> RunConfig {
    type Sites = Vec<(i64, f64)>;
    let (b, a): (Sites, Sites) = match name {
        "A" => (vec![(0, -1.7), (5, -2.0)], vec![]),
        "B" => (vec![(-1, -2.0), (0, -2.0), (1, -2.0)], vec![]),
        "F" => (vec![(0, -1.3), (4, -2.4), (9, -1.8)], vec![(4, 0.6)]),
        "D" => (vec![(0, -1.8), (1, -1.8)], vec![(0, 0.7)]),
        other => panic!("no profile {other}"),
    };
    RunConfig {
        n_min: -200,
        n_max: 200,
        b_overrides: b,
        a_overrides: a,
        t_end: 40.0,
        t_list: vec![10.0, 20.0, 30.0, 40.0],
        ..RunConfig::default()
    }
}
