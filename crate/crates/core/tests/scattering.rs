mod common;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use toda_shock::lattice::{evolve_to_times, Background, SteplikeLattice};
use toda_shock::scattering::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense eigenvalues of the truncated Jacobi matrix, sorted.
fn dense_eigenvalues(lat: &SteplikeLattice) -> Vec<f64> {
    let n = lat.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = lat.b[i];
        if i + 1 < n {
            m[(i, i + 1)] = lat.a[i];
            m[(i + 1, i)] = lat.a[i];
        }
    }
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

fn profile(bs: &[(i64, f64)], a_s: &[(i64, f64)], half_width: i64) -> SteplikeLattice {
    let mut lat = common::pure_step(half_width, 0.5, -4.0);
    for &(n, v) in bs {
        lat.set_b(n, v).unwrap();
    }
    for &(n, v) in a_s {
        lat.set_a(n, v).unwrap();
    }
    lat
}

#[test]
fn joukovski_round_trip_and_band() {
    let jm = JoukovskiMap::new(0.5, -4.0);
    for &z in &[c(0.3, 0.2), c(-0.7, 0.1), c(-0.2, 0.0), c(0.01, -0.5)] {
        let back = jm.z(jm.lambda(z));
        assert!((back - z).norm() < 1e-13, "{z} -> {back}");
    }
    for k in 1..10 {
        let lam = -5.0 + 0.2 * k as f64;
        let z = jm.z(c(lam, 0.0));
        assert!((z.norm() - 1.0).abs() < 1e-12);
    }
    assert!(jm.z(c(-2.0, 0.0)).norm() < 1.0);
}

#[test]
fn free_exponent_on_a_constant_background() {
    let lat = SteplikeLattice::step(-30, 30, Background::new(0.5, 0.0), Background::new(0.5, 0.0)).unwrap();
    for &z in &[c(0.3, 0.2), c(-0.6, 0.0), c(0.8, -0.5)] {
        let psi = jost_right(z, &lat).unwrap();
        for n in -30..=30 {
            let want = z.powi(n as i32);
            assert!((psi.get(n) - want).norm() <= 1e-12 * want.norm().max(1.0), "z = {z}, n = {n}");
        }
    }
    let one = jost_right(c(1.0, 0.0), &lat).unwrap();
    assert!(one.values().iter().all(|v| (v - 1.0).norm() < 1e-13));
}

#[test]
fn left_solution_is_the_left_exponent_before_the_step() {
    let lat = common::pure_step(40, 0.5, -4.0);
    let z = c(-0.3, 0.1);
    let zeta = left_zeta(z, &lat);
    assert!(zeta.norm() <= 1.0);
    let psi = jost_left(z, &lat).unwrap();
    for n in -40..=0 {
        let want = zeta.powi(-(n as i32));
        assert!((psi.get(n) - want).norm() <= 1e-12 * want.norm().max(1.0), "n = {n}");
    }
}

#[test]
fn jost_solutions_solve_the_recurrence_on_the_fig1_datum() {
    let lat = common::fig1(150);
    let z = c(-0.3, 0.0);
    assert!(recurrence_residual(&jost_right(z, &lat).unwrap(), z, &lat) <= 1e-12);
    let z = c(-0.14, -0.0);
    assert!(recurrence_residual(&jost_left(z, &lat).unwrap(), z, &lat) <= 1e-12);
    let z = c(0.2, 0.7);
    assert!(recurrence_residual(&jost_right(z, &lat).unwrap(), z, &lat) <= 1e-12);
    assert!(recurrence_residual(&jost_left(z, &lat).unwrap(), z, &lat) <= 1e-12);
}

#[test]
fn left_solution_is_real_in_the_gap() {
    let lat = common::fig1(80);
    let psi = jost_left(c(-0.5, 0.0), &lat).unwrap();
    assert!(psi.values().iter().all(|v| v.im == 0.0));
}

#[test]
fn wronskian_is_site_independent() {
    let lat = common::fig1(150);
    for &z in &[c(-0.5, 0.0), c(0.2, 0.6), c(-0.14, -0.0), Complex64::from_polar(1.0, 1.1)] {
        let pair = JostPair::new(z, &lat).unwrap();
        let w0 = pair.wronskian(&lat, 0);
        for m in [-60, -7, -1, 1, 2, 5, 10, 33, 90, 140] {
            let wm = pair.wronskian(&lat, m);
            assert!((wm - w0).norm() <= 1e-12 * w0.norm().max(1.0), "z = {z}, m = {m}");
        }
    }
}

#[test]
fn wronskian_commutes_with_conjugation_on_the_circle() {
    let lat = common::fig1(100);
    for k in 1..8 {
        let z = Complex64::from_polar(1.0, 0.4 * k as f64);
        let w = wronskian(z, &lat, 0).unwrap();
        let wc = wronskian(z.conj(), &lat, 0).unwrap();
        assert!((wc - w.conj()).norm() <= 1e-12 * w.norm().max(1.0));
    }
}

#[test]
fn pure_step_has_no_discrete_spectrum() {
    let lat = common::pure_step(100, 0.5, -4.0);
    assert!(eigenvalues(&lat).unwrap().is_empty());
}

#[test]
fn fig1_has_one_gap_eigenvalue_matching_the_dense_oracle() {
    let lat = common::fig1(100);
    let ev = eigenvalues(&lat).unwrap();
    assert_eq!(ev.len(), 1);
    let e = ev[0];
    assert_eq!(e.kind, EigenKind::Gap);
    assert!(e.z > -1.0 && e.z < -3.0 + 8.0f64.sqrt());
    let dense: Vec<f64> = dense_eigenvalues(&lat)
        .into_iter()
        .filter(|&l| l > -3.0 && l < -1.0)
        .collect();
    assert_eq!(dense.len(), 1);
    assert!((dense[0] - e.lambda).abs() <= 1e-8, "{} vs {}", dense[0], e.lambda);
    assert!((e.lambda_matrix - e.lambda).abs() <= 1e-8);
    let w = wronskian(c(e.z, 0.0), &lat, 0).unwrap();
    let w_near = wronskian(c(e.z + 1e-3, 0.0), &lat, 0).unwrap();
    assert!(w.norm() <= 1e-10 * w_near.norm());
}

#[test]
fn several_gap_eigenvalues_are_ordered_and_match_the_oracle() {
    let lat = profile(&[(-1, -2.0), (0, -2.0), (1, -2.0)], &[], 100);
    let ev = eigenvalues(&lat).unwrap();
    let gap: Vec<_> = ev.iter().filter(|e| e.kind == EigenKind::Gap).collect();
    assert_eq!(gap.len(), 3);
    assert!(gap.windows(2).all(|w| w[0].z > w[1].z));
    let dense: Vec<f64> = dense_eigenvalues(&lat)
        .into_iter()
        .filter(|&l| l > -3.0 && l < -1.0)
        .collect();
    assert_eq!(dense.len(), 3);
    for (e, d) in gap.iter().zip(&dense) {
        assert!((e.lambda - d).abs() <= 1e-8);
    }
    // By reflection symmetry of this profile about n = 0 the middle eigenvalue is b = −2.
    assert!((gap[1].lambda + 2.0).abs() <= 1e-10);
}

#[test]
fn eigenvalue_below_the_left_band_is_flagged() {
    let lat = profile(&[(0, -7.0)], &[], 80);
    let ev = eigenvalues(&lat).unwrap();
    let below: Vec<_> = ev.iter().filter(|e| e.kind == EigenKind::Below).collect();
    assert_eq!(below.len(), 1);
    assert!(below[0].lambda < -5.0);
    let dense = dense_eigenvalues(&lat);
    assert!((dense[0] - below[0].lambda).abs() <= 1e-8);
}

#[test]
fn norming_constant_is_positive_and_window_stable() {
    let small = common::fig1(60);
    let large = common::fig1(120);
    let z = eigenvalues(&small).unwrap()[0].z;
    let g_small = norming_constant(z, &small).unwrap();
    let g_large = norming_constant(z, &large).unwrap();
    assert!(g_small > 0.0);
    assert!((g_small - g_large).abs() <= 1e-10 * g_large);
}

#[test]
fn norming_constant_matches_a_normalized_dense_eigenvector() {
    let lat = common::fig1(80);
    let z = eigenvalues(&lat).unwrap()[0].z;
    let gamma = norming_constant(z, &lat).unwrap();
    // γ = ψ(n)² / Σψ² for any n, with ψ ~ zⁿ far right; read off the unit eigenvector v at large n.
    let n = lat.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = lat.b[i];
        if i + 1 < n {
            m[(i, i + 1)] = lat.a[i];
            m[(i + 1, i)] = lat.a[i];
        }
    }
    let eig = m.symmetric_eigen();
    let lam = 0.5 * (z + 1.0 / z);
    let k = (0..n)
        .min_by(|&i, &j| {
            (eig.eigenvalues[i] - lam).abs().partial_cmp(&(eig.eigenvalues[j] - lam).abs()).unwrap()
        })
        .unwrap();
    let v = eig.eigenvectors.column(k);
    let site = 12i64;
    let vi = v[(site - lat.n_min) as usize];
    let estimate = vi * vi / z.powi(2 * site as i32);
    assert!((estimate - gamma).abs() <= 1e-8 * gamma, "{estimate} vs {gamma}");
}

#[test]
fn norming_constant_evolves_exponentially() {
    let lat = common::fig1(100);
    let z0 = eigenvalues(&lat).unwrap()[0].z;
    let g0 = norming_constant(z0, &lat).unwrap();
    let t = 1.0;
    let evolved = evolve_to_times(&lat, &[t], 0.001, 1e-8).unwrap().last();
    let z1 = eigenvalues(&evolved).unwrap()[0].z;
    let g1 = norming_constant(z1, &evolved).unwrap();
    let predicted = g0 * (t * (z0 - 1.0 / z0)).exp();
    assert!((g1 - predicted).abs() <= 1e-5 * predicted, "{g1} vs {predicted}");
}

#[test]
fn chi_is_positive_imaginary_and_offset_consistent() {
    let lat = common::fig1(150);
    let (q, q1) = (-5.0 + 24.0f64.sqrt(), -3.0 + 8.0f64.sqrt());
    for k in 1..10 {
        let s = q1 + (q - q1) * k as f64 / 10.0;
        let a = chi_abs(s, &lat).unwrap();
        assert!(a > 0.0);
        let full = chi(s, &lat).unwrap();
        assert!(full.re.abs() <= 1e-6 * full.norm(), "s = {s}: {full}");
        assert!((full.norm() - a).abs() <= 1e-12 * a);
        let extrap = chi_abs_extrapolated(s, 1e-5, 1e-6, &lat).unwrap();
        assert!((extrap - a).abs() <= 1e-6 * a, "s = {s}: {extrap} vs {a}");
    }
    // The coarser offset pair carries an O(h₁h₂) remainder that grows towards the edges of I.
    for k in 3..=7 {
        let s = q1 + (q - q1) * k as f64 / 10.0;
        let a = chi_abs(s, &lat).unwrap();
        let extrap = chi_abs_extrapolated(s, 1e-4, 1e-5, &lat).unwrap();
        assert!((extrap - a).abs() <= 1e-6 * a, "s = {s}: {extrap} vs {a}");
    }
}

#[test]
fn fig1_is_nonresonant() {
    let lat = common::fig1(150);
    let r = resonance_classify(&lat, 1e-6).unwrap();
    assert_eq!(r.at_q, Resonance::Nonresonant);
    assert_eq!(r.at_q1, Resonance::Nonresonant);
    assert_eq!(r.ell, -1);
}

#[test]
fn resonance_case_table() {
    use Resonance::*;
    assert_eq!(ell(Nonresonant, Nonresonant).unwrap(), -1);
    assert_eq!(ell(Resonant, Nonresonant).unwrap(), 0);
    assert_eq!(ell(Nonresonant, Resonant).unwrap(), 0);
    assert_eq!(ell(Resonant, Resonant).unwrap(), 1);
    assert!(ell(Indeterminate, Resonant).is_err());
    assert_eq!(Resonance::from_w(1e-7, 1e-6), Resonant);
    assert_eq!(Resonance::from_w(5e-6, 1e-6), Indeterminate);
    assert_eq!(Resonance::from_w(1e-4, 1e-6), Nonresonant);
}

#[test]
fn injected_edge_blow_up_is_read_as_a_resonance() {
    let q1 = -3.0 + 8.0f64.sqrt();
    let blow_up = |s: f64| 1.0 / (s - q1).sqrt();
    let regular = |s: f64| (s - q1).sqrt();
    let at_q1 = resonance_from_chi(blow_up, q1, 1.0);
    assert_eq!(at_q1, Resonance::Resonant);
    assert_eq!(resonance_from_chi(regular, q1, 1.0), Resonance::Nonresonant);
    assert_eq!(ell(Resonance::Nonresonant, at_q1).unwrap(), 0);
}

#[test]
fn scattering_relation_and_unit_reflection() {
    let lat = common::fig1(150);
    for k in 1..12 {
        let z = Complex64::from_polar(1.0, std::f64::consts::PI * k as f64 / 12.0);
        assert!(scattering_relation_residual(z, &lat).unwrap() <= 1e-9);
        let (_, r) = transmission_reflection(z, &lat).unwrap();
        assert!((r.norm() - 1.0).abs() <= 1e-6, "|R| = {}", r.norm());
    }
}

#[test]
fn scattering_data_survives_json() {
    let lat = common::fig1(100);
    let data = scatter(
        &lat,
        &ScatterOptions {
            chi_nodes: 32,
            r_samples: 8,
            tol_res: 1e-6,
        },
    )
    .unwrap();
    assert_eq!(data.gap_z().len(), 1);
    assert!(data.gamma.iter().all(|&g| g > 0.0));
    assert!(data.chi_abs.windows(2).all(|w| w[0].s > w[1].s));
    let text = serde_json::to_string(&data).unwrap();
    let back: ScatteringData = serde_json::from_str(&text).unwrap();
    assert_eq!(back, data);
}

#[test]
fn window_edges_off_background_are_rejected() {
    let mut lat = common::fig1(10);
    lat.set_b(10, 0.3).unwrap();
    assert!(jost_right(c(0.3, 0.0), &lat).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn joukovski_image_stays_in_the_disk(re in -6.0f64..3.0, im in -2.0f64..2.0) {
        let jm = JoukovskiMap::new(0.5, 0.0);
        let z = jm.z(c(re, im));
        prop_assert!(z.norm() <= 1.0 + 1e-14);
        if im.abs() > 1e-3 {
            prop_assert!((jm.lambda(z) - c(re, im)).norm() < 1e-10);
        }
    }

    #[test]
    fn wronskian_site_independence_for_random_points(r in 0.05f64..1.0, th in 0.0f64..std::f64::consts::TAU) {
        let lat = common::fig1(60);
        let z = Complex64::from_polar(r, th);
        let pair = JostPair::new(z, &lat).unwrap();
        let w0 = pair.wronskian(&lat, 0);
        for m in [-20, -3, 4, 25] {
            prop_assert!((pair.wronskian(&lat, m) - w0).norm() <= 1e-11 * w0.norm().max(1.0));
        }
    }
}
