//! Direct scattering for steplike Jacobi operators on a finite window.
//!
//! Jost solutions are carried as a complex mantissa times `exp(log_scale)` so that
//! recursions across wide windows neither overflow nor underflow.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::SteplikeLattice;
use crate::surface::joukovski_right;
use crate::tridiag::SymTridiag;

const RESCALE_HI: f64 = 1e150;
const RESCALE_LO: f64 = 1e-150;
const SEED_TOL: f64 = 1e-6;

/// λ = b + a(z + z⁻¹) for one background.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JoukovskiMap {
    pub a_bg: f64,
    pub b_bg: f64,
}

impl JoukovskiMap {
    pub fn new(a_bg: f64, b_bg: f64) -> Self {
        Self { a_bg, b_bg }
    }

    pub fn lambda(&self, z: Complex64) -> Complex64 {
        self.b_bg + self.a_bg * (z + z.inv())
    }

    /// Inverse branch with |z| ≤ 1, the band being the cut.
    pub fn z(&self, lambda: Complex64) -> Complex64 {
        joukovski_right((lambda - self.b_bg) / (2.0 * self.a_bg))
    }
}

/// A solution of the three-term recurrence stored on n_lo..=n_hi in scaled form.
#[derive(Clone, Debug)]
pub struct JostSolution {
    pub n_lo: i64,
    mant: Vec<Complex64>,
    log_scale: Vec<f64>,
}

impl JostSolution {
    pub fn n_hi(&self) -> i64 {
        self.n_lo + self.mant.len() as i64 - 1
    }

    fn idx(&self, n: i64) -> usize {
        assert!(
            n >= self.n_lo && n <= self.n_hi(),
            "site {n} outside {}..={}",
            self.n_lo,
            self.n_hi()
        );
        (n - self.n_lo) as usize
    }

    /// Value at site n (may overflow far from the normalization end).
    pub fn get(&self, n: i64) -> Complex64 {
        let i = self.idx(n);
        self.mant[i] * self.log_scale[i].exp()
    }

    /// (mantissa, log-scale) at site n.
    pub fn scaled(&self, n: i64) -> (Complex64, f64) {
        let i = self.idx(n);
        (self.mant[i], self.log_scale[i])
    }

    /// Value at n divided by the value at m, computed without overflow.
    pub fn ratio(&self, n: i64, m: i64) -> Complex64 {
        let (pn, sn) = self.scaled(n);
        let (pm, sm) = self.scaled(m);
        pn / pm * (sn - sm).exp()
    }

    pub fn values(&self) -> Vec<Complex64> {
        (self.n_lo..=self.n_hi()).map(|n| self.get(n)).collect()
    }
}

/// z^n as (mantissa, log-scale).
fn scaled_power(z: Complex64, n: i64) -> (Complex64, f64) {
    let lz = z.ln();
    let nf = n as f64;
    (Complex64::from_polar(1.0, nf * lz.im), nf * lz.re)
}

fn check_seed(state: &SteplikeLattice) -> Result<()> {
    let left = (state.a[0] - state.bg_left.a).abs() + (state.b[0] - state.bg_left.b).abs();
    let k = state.len() - 1;
    let right = (state.a[k] - state.bg_right.a).abs() + (state.b[k] - state.bg_right.b).abs();
    if left.max(right) > SEED_TOL {
        return Err(Error::WindowTooSmall(format!(
            "edge rows deviate from the backgrounds by {:e}",
            left.max(right)
        )));
    }
    Ok(())
}

/// λ = (z + z⁻¹)/2.
fn lambda_of(z: Complex64) -> Complex64 {
    0.5 * (z + z.inv())
}

/// Right Jost solution ψ(z, n) ~ zⁿ as n → +∞, on n_min−1 ..= n_max+1.
pub fn jost_right(z: Complex64, state: &SteplikeLattice) -> Result<JostSolution> {
    if z.norm() == 0.0 || z.norm() > 1.0 + 1e-12 {
        return Err(Error::Domain(format!("jost_right needs 0 < |z| <= 1, got {z}")));
    }
    check_seed(state)?;
    let lambda = lambda_of(z);
    let lo = state.n_min - 1;
    let top = state.n_max + 1;
    let len = (top - lo + 1) as usize;
    let mut mant = vec![Complex64::new(0.0, 0.0); len];
    let mut scale = vec![0.0; len];

    let (m_top, s_top) = scaled_power(z, top);
    let mut p_next = m_top * z;
    let mut p = m_top;
    let mut s = s_top;
    mant[len - 1] = p;
    scale[len - 1] = s;
    let mut n = top;
    while n > lo {
        let pm = ((lambda - state.b_at(n)) * p - state.a_at(n) * p_next) / state.a_at(n - 1);
        p_next = p;
        p = pm;
        n -= 1;
        let mag = p.norm();
        if mag > RESCALE_HI || (mag < RESCALE_LO && mag > 0.0) {
            let f = mag.ln();
            p /= mag;
            p_next /= mag;
            s += f;
        }
        let i = (n - lo) as usize;
        mant[i] = p;
        scale[i] = s;
    }
    Ok(JostSolution {
        n_lo: lo,
        mant,
        log_scale: scale,
    })
}

/// Left spectral variable ζ with |ζ| ≤ 1. On the real axis the sign bit of `z.im` picks the
/// side: z − i0 maps to λ + i0, where ζ = e^{−iθ} on the left band.
pub fn left_zeta(z: Complex64, state: &SteplikeLattice) -> Complex64 {
    let mut lambda = lambda_of(z);
    if z.im == 0.0 {
        lambda.im = if z.im.is_sign_negative() { 0.0 } else { -0.0 };
    }
    JoukovskiMap::new(state.bg_left.a, state.bg_left.b).z(lambda)
}

/// Left Jost solution ψ₋(z, n) ~ ζ^{−n} as n → −∞, on n_min−1 ..= n_max+1.
pub fn jost_left(z: Complex64, state: &SteplikeLattice) -> Result<JostSolution> {
    if z.norm() == 0.0 {
        return Err(Error::Domain("jost_left needs z != 0".into()));
    }
    check_seed(state)?;
    let zeta = left_zeta(z, state);
    let lambda = lambda_of(z);
    let lo = state.n_min - 1;
    let top = state.n_max + 1;
    let len = (top - lo + 1) as usize;
    let mut mant = vec![Complex64::new(0.0, 0.0); len];
    let mut scale = vec![0.0; len];

    let (m_lo, s_lo) = scaled_power(zeta, -lo);
    let mut q_prev = m_lo * zeta;
    let mut q = m_lo;
    let mut s = s_lo;
    mant[0] = q;
    scale[0] = s;
    let mut n = lo;
    while n < top {
        let qn = ((lambda - state.b_at(n)) * q - state.a_at(n - 1) * q_prev) / state.a_at(n);
        q_prev = q;
        q = qn;
        n += 1;
        let mag = q.norm();
        if mag > RESCALE_HI || (mag < RESCALE_LO && mag > 0.0) {
            let f = mag.ln();
            q /= mag;
            q_prev /= mag;
            s += f;
        }
        let i = (n - lo) as usize;
        mant[i] = q;
        scale[i] = s;
    }
    Ok(JostSolution {
        n_lo: lo,
        mant,
        log_scale: scale,
    })
}

/// Residual max_n |a(n−1)ψ(n−1) + (b(n)−λ)ψ(n) + a(n)ψ(n+1)| / max(|ψ(n)|, neighbours) over the window.
pub fn recurrence_residual(sol: &JostSolution, z: Complex64, state: &SteplikeLattice) -> f64 {
    let lambda = lambda_of(z);
    let mut worst: f64 = 0.0;
    for n in state.n_min..=state.n_max {
        let (pm, pc, pp) = (sol.ratio(n - 1, n), 1.0, sol.ratio(n + 1, n));
        let r = state.a_at(n - 1) * pm + (state.b_at(n) - lambda) * pc + state.a_at(n) * pp;
        let norm = 1.0f64.max(pm.norm()).max(pp.norm());
        worst = worst.max(r.norm() / norm);
    }
    worst
}

/// Wronskian a(m−1)(f(m−1)g(m) − f(m)g(m−1)) of two scaled solutions.
pub fn wronskian_of(f: &JostSolution, g: &JostSolution, state: &SteplikeLattice, m: i64) -> Complex64 {
    let (f0, sf0) = f.scaled(m - 1);
    let (f1, sf1) = f.scaled(m);
    let (g0, sg0) = g.scaled(m - 1);
    let (g1, sg1) = g.scaled(m);
    let e1 = sf0 + sg1;
    let e2 = sf1 + sg0;
    let e = e1.max(e2);
    let w = f0 * g1 * (e1 - e).exp() - f1 * g0 * (e2 - e).exp();
    state.a_at(m - 1) * w * e.exp()
}

/// Both Jost solutions at one spectral point.
#[derive(Clone, Debug)]
pub struct JostPair {
    pub z: Complex64,
    pub left: JostSolution,
    pub right: JostSolution,
}

impl JostPair {
    pub fn new(z: Complex64, state: &SteplikeLattice) -> Result<Self> {
        Ok(Self {
            z,
            left: jost_left(z, state)?,
            right: jost_right(z, state)?,
        })
    }

    /// W(z) = a(m−1)(ψ₋(m−1)ψ(m) − ψ₋(m)ψ(m−1)).
    pub fn wronskian(&self, state: &SteplikeLattice, m: i64) -> Complex64 {
        wronskian_of(&self.left, &self.right, state, m)
    }
}

/// Default evaluation site for Wronskians: 0 clamped into the window.
pub fn default_site(state: &SteplikeLattice) -> i64 {
    0i64.clamp(state.n_min, state.n_max)
}

/// W(z) evaluated at site m.
pub fn wronskian(z: Complex64, state: &SteplikeLattice, m: i64) -> Result<Complex64> {
    Ok(JostPair::new(z, state)?.wronskian(state, m))
}

/// Location of a discrete eigenvalue relative to the continuous spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EigenKind {
    /// In the gap (b+2a, −1) between the bands.
    Gap,
    /// Below the left band.
    Below,
    /// Above the right band.
    Above,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub z: f64,
    pub lambda: f64,
    /// Eigenvalue of the truncated matrix before refinement.
    pub lambda_matrix: f64,
    pub kind: EigenKind,
}

fn real_wronskian_sign(z: f64, state: &SteplikeLattice, m: i64) -> f64 {
    match wronskian(Complex64::new(z, 0.0), state, m) {
        Ok(w) => w.re,
        Err(_) => f64::NAN,
    }
}

/// Refines a truncated-matrix eigenvalue to a zero of W on the real z-interval (lo, hi).
fn refine_zero(z0: f64, lo: f64, hi: f64, state: &SteplikeLattice) -> Result<f64> {
    let m = default_site(state);
    let f = |z: f64| real_wronskian_sign(z, state, m);
    let mut h = 1e-9f64.max(1e-9 * z0.abs());
    for _ in 0..60 {
        let a = (z0 - h).max(lo);
        let b = (z0 + h).min(hi);
        let (fa, fb) = (f(a), f(b));
        if fa == 0.0 {
            return Ok(a);
        }
        if fb == 0.0 {
            return Ok(b);
        }
        if fa.signum() != fb.signum() {
            return crate::surface::bisect_root(a, b, f, "wronskian zero");
        }
        if a <= lo && b >= hi {
            break;
        }
        h *= 4.0;
    }
    Err(Error::Bracket(format!(
        "no sign change of W near z = {z0} (matrix eigenvalue)"
    )))
}

/// Discrete spectrum: gap eigenvalues in decreasing z (−1 < z_ℵ < … < z₁ < q₁) followed by
/// eigenvalues below the left band and above the right band.
pub fn eigenvalues(state: &SteplikeLattice) -> Result<Vec<Eigenvalue>> {
    let jm = JoukovskiMap::new(0.5, 0.0);
    let left = state.bg_left;
    let (e1, e2) = (left.b - 2.0 * left.a, left.b + 2.0 * left.a);
    let q = jm.z(Complex64::new(e1, 0.0)).re;
    let q1 = jm.z(Complex64::new(e2, 0.0)).re;
    let mat = SymTridiag::from_lattice(state);
    let (glo, ghi) = mat.bounds();
    let margin = 1e-9;

    let mut out = Vec::new();
    let mut push = |lam_m: f64, kind: EigenKind, lo: f64, hi: f64| -> Result<()> {
        let z0 = jm.z(Complex64::new(lam_m, 0.0)).re;
        let z = refine_zero(z0, lo, hi, state)?;
        out.push(Eigenvalue {
            z,
            lambda: 0.5 * (z + 1.0 / z),
            lambda_matrix: lam_m,
            kind,
        });
        Ok(())
    };

    let mut gap = mat.eigenvalues_in(e2 + margin, -1.0 - margin);
    gap.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    // Increasing λ in the gap is decreasing z; the ordering starts next to q₁.
    for &l in &gap {
        push(l, EigenKind::Gap, -1.0 + 1e-15, q1 - 1e-15)?;
    }
    if glo < e1 - margin {
        for l in mat.eigenvalues_in(glo - 1.0, e1 - margin) {
            push(l, EigenKind::Below, q + 1e-15, -1e-300)?;
        }
    }
    if ghi > 1.0 + margin {
        for l in mat.eigenvalues_in(1.0 + margin, ghi + 1.0) {
            push(l, EigenKind::Above, 1e-300, 1.0 - 1e-15)?;
        }
    }
    Ok(out)
}

/// γ_j = (Σ_n ψ(z_j, n)²)⁻¹ including the geometric tails outside the window.
///
/// Left of the matching site the eigenfunction is taken from ψ₋, which is the stable
/// representation there.
pub fn norming_constant(z: f64, state: &SteplikeLattice) -> Result<f64> {
    let zc = Complex64::new(z, 0.0);
    let pair = JostPair::new(zc, state)?;
    let m = default_site(state);
    // At an eigenvalue ψ₋ is a multiple of ψ, so ratios to the value at m agree.
    let mut sum = 0.0;
    for n in m..=state.n_max {
        sum += pair.right.ratio(n, m).re.powi(2);
    }
    for n in state.n_min..m {
        sum += pair.left.ratio(n, m).re.powi(2);
    }
    let zr = pair.right.ratio(state.n_max, m).re;
    sum += zr * zr * z * z / (1.0 - z * z);
    let zeta = left_zeta(zc, state).re;
    let zl = pair.left.ratio(state.n_min, m).re;
    sum += zl * zl * zeta * zeta / (1.0 - zeta * zeta);
    let (pm, sm) = pair.right.scaled(m);
    let psi_m_sq = pm.re * pm.re * (2.0 * sm).exp();
    let gamma = 1.0 / (psi_m_sq * sum);
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::Domain(format!("norming constant at z = {z} is {gamma}")));
    }
    Ok(gamma)
}

pub fn norming_constants(state: &SteplikeLattice, eigen: &[Eigenvalue]) -> Result<Vec<f64>> {
    eigen.iter().map(|e| norming_constant(e.z, state)).collect()
}

/// Left-band angle θ ∈ (0, π) of s ∈ I: (λ − b₋)/(2a₋) = cos θ.
fn band_angle(s: f64, state: &SteplikeLattice) -> f64 {
    let lambda = 0.5 * (s + 1.0 / s);
    ((lambda - state.bg_left.b) / (2.0 * state.bg_left.a))
        .clamp(-1.0, 1.0)
        .acos()
}

/// χ(s) = (s − s⁻¹)(ζ⁻¹ − ζ)(s − i0)/|W(s)|², purely imaginary on I.
pub fn chi(s: f64, state: &SteplikeLattice) -> Result<Complex64> {
    let zc = Complex64::new(s, -0.0);
    let pair = JostPair::new(zc, state)?;
    let w = pair.wronskian(state, default_site(state));
    let zeta = left_zeta(zc, state);
    Ok((s - 1.0 / s) * (zeta.inv() - zeta) / w.norm_sqr())
}

/// |χ(s)| for s strictly inside I, from boundary values on the axis.
pub fn chi_abs(s: f64, state: &SteplikeLattice) -> Result<f64> {
    let theta = band_angle(s, state);
    let w = wronskian(Complex64::new(s, -0.0), state, default_site(state))?;
    let w2 = w.norm_sqr();
    if w2.sqrt() < 1e-6 {
        log::warn!("|W({s})| = {:e}: close to a resonance", w2.sqrt());
    }
    Ok((s - 1.0 / s).abs() * 2.0 * theta.sin() / w2)
}

/// |χ| at s − ih, with ζ and W continued off the axis.
pub fn chi_abs_offset(s: f64, h: f64, state: &SteplikeLattice) -> Result<f64> {
    let zc = Complex64::new(s, -h);
    let pair = JostPair::new(zc, state)?;
    let w = pair.wronskian(state, default_site(state));
    let zeta = left_zeta(zc, state);
    Ok(((zc - zc.inv()) * (zeta.inv() - zeta)).norm() / w.norm_sqr())
}

/// Linear extrapolation of [`chi_abs_offset`] from offsets h₁ > h₂ to the axis.
pub fn chi_abs_extrapolated(s: f64, h1: f64, h2: f64, state: &SteplikeLattice) -> Result<f64> {
    let f1 = chi_abs_offset(s, h1, state)?;
    let f2 = chi_abs_offset(s, h2, state)?;
    Ok(f2 + (f2 - f1) * h2 / (h1 - h2))
}

/// Transmission and reflection coefficients at |z| = 1.
pub fn transmission_reflection(z: Complex64, state: &SteplikeLattice) -> Result<(Complex64, Complex64)> {
    let pair = JostPair::new(z, state)?;
    let conj = conj_solution(&pair.right);
    let m = default_site(state);
    let w = pair.wronskian(state, m);
    let w_bar = wronskian_of(&pair.left, &conj, state, m);
    let t = (z - z.inv()) / (2.0 * w);
    let r = -w_bar / w;
    Ok((t, r))
}

fn conj_solution(sol: &JostSolution) -> JostSolution {
    JostSolution {
        n_lo: sol.n_lo,
        mant: sol.mant.iter().map(|c| c.conj()).collect(),
        log_scale: sol.log_scale.clone(),
    }
}

/// max_n |Tψ₋ − ψ̄ − Rψ| / max|ψ| over the window at |z| = 1.
pub fn scattering_relation_residual(z: Complex64, state: &SteplikeLattice) -> Result<f64> {
    let pair = JostPair::new(z, state)?;
    let (t, r) = transmission_reflection(z, state)?;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for n in state.n_min..=state.n_max {
        let psi = pair.right.get(n);
        let lhs = t * pair.left.get(n);
        let rhs = psi.conj() + r * psi;
        worst = worst.max((lhs - rhs).norm());
        scale = scale.max(psi.norm());
    }
    Ok(worst / scale.max(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Resonance {
    Nonresonant,
    Resonant,
    /// |W| inside [tol, 10·tol].
    Indeterminate,
}

impl Resonance {
    pub fn from_w(w_abs: f64, tol: f64) -> Self {
        if w_abs < tol {
            Resonance::Resonant
        } else if w_abs <= 10.0 * tol {
            Resonance::Indeterminate
        } else {
            Resonance::Nonresonant
        }
    }
}

/// ℓ = −1 (no resonance), 0 (one resonant edge), +1 (both edges resonant).
pub fn ell(at_q: Resonance, at_q1: Resonance) -> Result<i32> {
    for (flag, name) in [(at_q, "q"), (at_q1, "q1")] {
        if flag == Resonance::Indeterminate {
            return Err(Error::IndeterminateResonance {
                point: name,
                w_abs: f64::NAN,
            });
        }
    }
    Ok(match (at_q, at_q1) {
        (Resonance::Nonresonant, Resonance::Nonresonant) => -1,
        (Resonance::Resonant, Resonance::Resonant) => 1,
        _ => 0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub at_q: Resonance,
    pub at_q1: Resonance,
    pub w_q: f64,
    pub w_q1: f64,
    pub ell: i32,
}

/// Resonance flags from |W| at the edges q (ζ = −1) and q₁ (ζ = +1) of I.
pub fn resonance_classify(state: &SteplikeLattice, tol_res: f64) -> Result<ResonanceReport> {
    let left = state.bg_left;
    let jm = JoukovskiMap::new(0.5, 0.0);
    let q = jm.z(Complex64::new(left.b - 2.0 * left.a, 0.0)).re;
    let q1 = jm.z(Complex64::new(left.b + 2.0 * left.a, 0.0)).re;
    let m = default_site(state);
    let w_q = wronskian(Complex64::new(q, 0.0), state, m)?.norm();
    let w_q1 = wronskian(Complex64::new(q1, 0.0), state, m)?.norm();
    let at_q = Resonance::from_w(w_q, tol_res);
    let at_q1 = Resonance::from_w(w_q1, tol_res);
    let ell = match ell(at_q, at_q1) {
        Ok(v) => v,
        Err(_) => {
            let w_abs = if at_q == Resonance::Indeterminate { w_q } else { w_q1 };
            let point = if at_q == Resonance::Indeterminate { "q" } else { "q1" };
            return Err(Error::IndeterminateResonance { point, w_abs });
        }
    };
    Ok(ResonanceReport {
        at_q,
        at_q1,
        w_q,
        w_q1,
        ell,
    })
}

/// Classifies an edge from the local power law of |χ| near it: |χ| ~ d^{1/2} away from a
/// resonance and ~ d^{−1/2} at one. `dist_sign` points from the edge into I.
pub fn resonance_from_chi<F: Fn(f64) -> f64>(chi: F, edge: f64, dist_sign: f64) -> Resonance {
    let d = 1e-6;
    let near = chi(edge + dist_sign * d);
    let far = chi(edge + dist_sign * 4.0 * d);
    let exponent = (far / near).ln() / 4.0f64.ln();
    if exponent < 0.0 {
        Resonance::Resonant
    } else {
        Resonance::Nonresonant
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RSample {
    pub z: Complex64,
    pub r: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSample {
    pub s: f64,
    pub chi_abs: f64,
}

/// Options for [`scatter`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatterOptions {
    /// Number of Chebyshev nodes on I at which |χ| is sampled.
    pub chi_nodes: usize,
    /// Number of points on the upper unit semicircle at which R is sampled.
    pub r_samples: usize,
    pub tol_res: f64,
}

impl Default for ScatterOptions {
    fn default() -> Self {
        Self {
            chi_nodes: 256,
            r_samples: 64,
            tol_res: 1e-6,
        }
    }
}

/// Scattering data of a normalized steplike lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatteringData {
    pub q: f64,
    pub q1: f64,
    pub eigen: Vec<Eigenvalue>,
    pub gamma: Vec<f64>,
    pub r_samples: Vec<RSample>,
    /// Samples on the Chebyshev nodes of I, ordered from q down to q₁.
    pub chi_abs: Vec<ChiSample>,
    pub resonance: ResonanceReport,
}

impl ScatteringData {
    /// Gap eigenvalues z_j in decreasing order.
    pub fn gap_z(&self) -> Vec<f64> {
        self.eigen
            .iter()
            .filter(|e| e.kind == EigenKind::Gap)
            .map(|e| e.z)
            .collect()
    }

    /// Eigenvalues below the left band, as z ∈ (q, 0).
    pub fn below_z(&self) -> Vec<f64> {
        self.eigen
            .iter()
            .filter(|e| e.kind == EigenKind::Below)
            .map(|e| e.z)
            .collect()
    }
}

/// Full scattering pass over a normalized lattice.
pub fn scatter(state: &SteplikeLattice, opts: &ScatterOptions) -> Result<ScatteringData> {
    if !state.is_normalized() {
        return Err(Error::InvalidInput(
            "scattering expects a normalized lattice (a+ = 1/2, b+ = 0)".into(),
        ));
    }
    let left = state.bg_left;
    let jm = JoukovskiMap::new(0.5, 0.0);
    let q = jm.z(Complex64::new(left.b - 2.0 * left.a, 0.0)).re;
    let q1 = jm.z(Complex64::new(left.b + 2.0 * left.a, 0.0)).re;
    let eigen = eigenvalues(state)?;
    let gamma = norming_constants(state, &eigen)?;
    let resonance = resonance_classify(state, opts.tol_res)?;

    let nodes = crate::quadrature::chebyshev_nodes(q1, q, opts.chi_nodes);
    let chi_abs = nodes
        .iter()
        .map(|&s| chi_abs(s, state).map(|c| ChiSample { s, chi_abs: c }))
        .collect::<Result<Vec<_>>>()?;

    let r_samples = (0..opts.r_samples)
        .map(|k| {
            let th = std::f64::consts::PI * (k as f64 + 0.5) / opts.r_samples as f64;
            let z = Complex64::from_polar(1.0, th);
            transmission_reflection(z, state).map(|(_, r)| RSample { z, r })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ScatteringData {
        q,
        q1,
        eigen,
        gamma,
        r_samples,
        chi_abs,
        resonance,
    })
}
