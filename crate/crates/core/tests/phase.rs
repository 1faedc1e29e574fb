mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;
use toda_shock::harness::{analyze, Analysis, RunConfig};
use toda_shock::phase::*;
use toda_shock::scattering::{self, Resonance};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const NR: (Resonance, Resonance) = (Resonance::Nonresonant, Resonance::Nonresonant);

fn fig1() -> Analysis {
    analyze(&RunConfig::preset("fig1").unwrap()).unwrap()
}

#[test]
fn blaschke_product_identities() {
    let zs = [-0.3, -0.55, -0.05];
    assert!((blaschke(c(1.0, 0.0), &zs) - 1.0).norm() <= 1e-14);
    let p0 = blaschke(c(0.0, 0.0), &zs);
    assert!((p0.re - 1.0 / (0.3 * 0.55 * 0.05)).abs() <= 1e-10 && p0.im == 0.0);
    for &zk in &zs {
        assert!(blaschke(c(1.0 / zk, 0.0), &zs).norm() <= 1e-14);
    }
    for k in 0..12 {
        let z = Complex64::from_polar(1.0, 0.5 * k as f64 + 0.1);
        assert!((blaschke(z, &zs).norm() - 1.0).abs() <= 1e-13);
        let w = Complex64::from_polar(0.4 + 0.1 * k as f64, 1.0 + 0.3 * k as f64);
        assert!((blaschke(w, &zs) * blaschke(w.inv(), &zs) - 1.0).norm() <= 1e-12);
    }
    assert_eq!(blaschke(c(0.7, 0.2), &[]), c(1.0, 0.0));
}

#[test]
fn blaschke_factor_selection() {
    let gap = [-0.2, -0.3, -0.4];
    let below = [-0.05];
    assert_eq!(blaschke_factors(1, &gap, &below), vec![-0.05]);
    assert_eq!(blaschke_factors(3, &gap, &below), vec![-0.2, -0.3, -0.05]);
    assert_eq!(blaschke_factors(4, &gap, &[]), gap.to_vec());
}

#[test]
fn q_factor_identities() {
    let (q, q1) = (-0.101, -0.1716);
    assert!((q_factor(c(1.0, 0.0), q, q1, NR).unwrap() - 1.0).norm() <= 1e-15);
    for k in 0..10 {
        let z = Complex64::from_polar(0.3 + 0.25 * k as f64, 0.4 + 0.5 * k as f64);
        let qz = q_factor(z, q, q1, NR).unwrap();
        let fourth: Complex64 = [q, q1]
            .iter()
            .map(|&al| (z - al) / ((z - 1.0 / al) * (-al)))
            .product();
        assert!((qz.powu(4) - fourth).norm() <= 1e-12 * fourth.norm());
        assert!((qz * q_factor(z.inv(), q, q1, NR).unwrap() - 1.0).norm() <= 1e-12);
        let res = q_factor(z, q, q1, (Resonance::Resonant, Resonance::Nonresonant)).unwrap();
        let only_q1 = ((z - q1) / ((z - 1.0 / q1) * (-q1))).powf(0.25);
        let only_q = ((z - q) / ((z - 1.0 / q) * (-q))).powf(-0.25);
        assert!((res - only_q * only_q1).norm() <= 1e-12);
    }
    for k in 1..10 {
        let s = q1 + (q - q1) * k as f64 / 10.0;
        let above = q_factor(c(s, 0.0), q, q1, NR).unwrap().norm();
        let below = q_factor(c(s, -0.0), q, q1, NR).unwrap().norm();
        let abs = q_abs(s, q, q1, NR).unwrap();
        assert!((above - abs).abs() <= 1e-13 && (below - abs).abs() <= 1e-13);
    }
    assert!(q_factor(c(0.5, 0.5), q, q1, (Resonance::Indeterminate, Resonance::Nonresonant)).is_err());
}

#[test]
fn chebyshev_interpolation_reproduces_polynomials() {
    let nodes = toda_shock::quadrature::chebyshev_nodes(-0.17, -0.1, 16);
    let p = |x: f64| 3.0 - 2.0 * x + 7.0 * x * x * x;
    let vals: Vec<f64> = nodes.iter().map(|&x| p(x)).collect();
    for k in 0..25 {
        let x = -0.17 + 0.07 * k as f64 / 24.0;
        assert!((chebyshev_interpolate(&nodes, &vals, x) - p(x)).abs() <= 1e-12);
    }
    assert_eq!(chebyshev_interpolate(&nodes, &vals, nodes[3]), vals[3]);
}

#[test]
fn wrap_phase_lands_in_the_principal_interval() {
    for k in -20..20 {
        let x = 0.77 * k as f64;
        let w = wrap_phase(x);
        assert!(w > -PI && w <= PI);
        let turns = (x - w) / (2.0 * PI);
        assert!((turns - turns.round()).abs() <= 1e-12);
    }
    assert_eq!(wrap_phase(PI), PI);
    assert_eq!(wrap_phase(-PI), PI);
}

#[test]
fn fig1_phases() {
    let an = fig1();
    let rep = &an.phases;
    assert_eq!(rep.ell, -1);
    assert_eq!(rep.sectors.len(), 2);
    // Regression values recorded from this configuration.
    let recorded = [-5.534825341863554, -2.902367196949791];
    for (s, want) in rep.sectors.iter().zip(recorded) {
        assert!((s.delta - want).abs() <= 1e-8, "sector {}: {}", s.j, s.delta);
        assert!(s.delta_mod_2pi >= 0.0 && s.delta_mod_2pi < 2.0 * PI);
        assert!((s.delta_mod_2pi - s.delta.rem_euclid(2.0 * PI)).abs() < 1e-15);
    }
    let first = &rep.sectors[0];
    assert!(first.jump_residual.unwrap() <= 1e-6);
    assert!(rep.sectors[1].jump_direct.is_none());
}

#[test]
fn jumps_agree_on_both_routes_for_every_profile() {
    for name in ["A", "B", "F", "D"] {
        let an = analyze(&common::profile(name)).unwrap();
        let expected = match name {
            "A" | "D" => 2,
            _ => 3,
        };
        assert_eq!(an.inputs.gap_z.len(), expected, "profile {name}");
        for s in &an.phases.sectors[..expected] {
            let r = s.jump_residual.unwrap();
            assert!(r <= 1e-6, "profile {name}, sector {}: residual {r}", s.j);
        }
    }
}

#[test]
fn dropping_later_eigenvalues_leaves_earlier_sectors_alone() {
    let an = analyze(&common::profile("F")).unwrap();
    let full: Vec<f64> = (1..=4).map(|j| delta_j(j, &an.inputs).unwrap()).collect();
    let mut cut = an.inputs.clone();
    cut.gap_z.truncate(1);
    assert_eq!(cut.sectors(), 2);
    assert!((delta_j(1, &cut).unwrap() - full[0]).abs() <= 1e-14);
    assert!((delta_j(2, &cut).unwrap() - full[1]).abs() <= 1e-14);
    assert!(delta_j(3, &cut).is_err());
    assert!(delta_j(0, &cut).is_err());
}

#[test]
fn phase_is_constant_on_each_sector() {
    let an = fig1();
    for (j, &(lo, hi)) in an.partition.intervals.iter().enumerate() {
        let want = an.phases.sectors[j].delta;
        for k in 0..=10 {
            let xi = lo + (hi - lo) * k as f64 / 10.0;
            assert_eq!(delta_at_xi(xi, &an.partition, &an.inputs).unwrap(), want);
        }
    }
    assert!(delta_at_xi(an.context.xi_upper + 0.1, &an.partition, &an.inputs).is_err());
}

#[test]
fn szego_function_normalization_and_symmetry() {
    let an = fig1();
    for j in 1..=2 {
        assert!((szego_f(c(1.0, 0.0), j, &an.inputs).unwrap() - 1.0).norm() <= 1e-12);
        for &z in &[c(0.3, 0.4), c(-2.0, 0.7), c(0.05, -0.2)] {
            let p = szego_f(z, j, &an.inputs).unwrap() * szego_f(z.inv(), j, &an.inputs).unwrap();
            assert!((p - 1.0).norm() <= 1e-10, "j = {j}, z = {z}: {p}");
        }
        let near_zero = szego_f(c(1e-3, 0.0), j, &an.inputs).unwrap();
        assert!(near_zero.re > 0.0 && near_zero.im.abs() <= 1e-10 * near_zero.re);
    }
}

#[test]
fn szego_boundary_product_on_i() {
    let an = fig1();
    let inp = &an.inputs;
    let lat = &an.prepared.lattice;
    for j in 1..=2 {
        let factors = blaschke_factors(j, &inp.gap_z, &inp.below_z);
        for k in 1..=10 {
            let s = inp.q1 + (inp.q - inp.q1) * k as f64 / 11.0;
            let (fp, fm) = szego_f_sides(s, 1e-5, j, inp).unwrap();
            let pi = blaschke(c(s, 0.0), &factors).re;
            let chi = scattering::chi_abs(s, lat).unwrap();
            let want = inp.chi_scale * chi / (pi * pi);
            assert!((fp * fm - want).norm() <= 1e-5, "j = {j}, s = {s}: {} vs {want}", fp * fm);
        }
    }
}

#[test]
fn szego_jump_on_j() {
    let an = fig1();
    let inp = &an.inputs;
    for j in 1..=2 {
        let delta = an.phases.sectors[j - 1].delta;
        for k in 1..=10 {
            let s = -1.0 + (inp.q1 + 1.0) * k as f64 / 11.0;
            let (fp, fm) = szego_f_sides(s, 1e-5, j, inp).unwrap();
            let r = (fp - fm * Complex64::from_polar(1.0, delta)).norm();
            assert!(r <= 1e-5, "j = {j}, s = {s}: {r}");
        }
    }
    assert!(szego_f_sides(0.5, 1e-5, 1, inp).is_err());
}

#[test]
fn inputs_validation() {
    let an = fig1();
    let mut bad = an.inputs.clone();
    bad.chi_abs[3] = 0.0;
    assert!(bad.validate().is_err());
    let mut bad = an.inputs.clone();
    bad.chi_abs.pop();
    assert!(bad.validate().is_err());
    let mut bad = an.inputs.clone();
    bad.gap_z = vec![-0.5, -0.3];
    assert!(bad.validate().is_err());
}

#[test]
fn phase_report_survives_json() {
    let an = fig1();
    let text = serde_json::to_string(&an.phases).unwrap();
    let back: PhaseReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, an.phases);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn blaschke_is_unimodular_on_the_circle(
        zs in proptest::collection::vec(-0.99f64..-0.01, 0..5),
        th in 0.0f64..(2.0 * PI),
    ) {
        let v = blaschke(Complex64::from_polar(1.0, th), &zs);
        prop_assert!((v.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn q_factor_is_inverted_by_reflection(r in 0.2f64..5.0, th in 0.05f64..3.0) {
        let z = Complex64::from_polar(r, th);
        let (q, q1) = (-0.101, -0.1716);
        for flags in [NR, (Resonance::Resonant, Resonance::Resonant)] {
            let p = q_factor(z, q, q1, flags).unwrap() * q_factor(z.inv(), q, q1, flags).unwrap();
            prop_assert!((p - 1.0).norm() <= 1e-12);
        }
    }
}
