//! Phase constants Δ_j of the finite-gap asymptotics and the jumps between sectors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::scattering::{Resonance, ScatteringData};
use crate::surface::{sqrt_pair, TwoBandSpectrum};

/// Π(z) = ∏ |z_k|(z − z_k⁻¹)/(z − z_k) over the given factors.
pub fn blaschke(z: Complex64, factors: &[f64]) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for &zk in factors {
        let d = z - zk;
        if d.norm() < 1e-12 {
            log::warn!("Blaschke factor evaluated {:e} from its pole {zk}", d.norm());
        }
        acc *= zk.abs() * (z - 1.0 / zk) / d;
    }
    acc
}

/// Eigenvalues entering Π_j: z_k with z_j < z_k < 0, i.e. the gap eigenvalues z₁ … z_{j−1}
/// together with every eigenvalue below the left band.
pub fn blaschke_factors(j: usize, gap_z: &[f64], below_z: &[f64]) -> Vec<f64> {
    let mut f: Vec<f64> = gap_z.iter().take(j.saturating_sub(1)).copied().collect();
    f.extend_from_slice(below_z);
    f
}

/// Exponent ±1 of the edge factor in Q⁴: +1 at a nonresonant edge, −1 at a resonant one.
fn q_exponent(flag: Resonance) -> Result<f64> {
    match flag {
        Resonance::Nonresonant => Ok(1.0),
        Resonance::Resonant => Ok(-1.0),
        Resonance::Indeterminate => Err(Error::Branch("indeterminate resonance flag".into())),
    }
}

/// Q(z) = ∏_{α∈{q,q₁}} [(z−α)/((z−α⁻¹)(−α))]^{±1/4} with principal roots, so Q(1) = 1.
///
/// Each root has its cut on the segment [α⁻¹, α]; the product is analytic off [q⁻¹, q].
pub fn q_factor(z: Complex64, q: f64, q1: f64, flags: (Resonance, Resonance)) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    for (alpha, flag) in [(q, flags.0), (q1, flags.1)] {
        let e = q_exponent(flag)?;
        let u = (z - alpha) / ((z - 1.0 / alpha) * (-alpha));
        acc *= u.powf(0.25 * e);
    }
    Ok(acc)
}

/// |Q(s)| for real s, which is independent of the side of the cut.
pub fn q_abs(s: f64, q: f64, q1: f64, flags: (Resonance, Resonance)) -> Result<f64> {
    let mut acc = 1.0;
    for (alpha, flag) in [(q, flags.0), (q1, flags.1)] {
        let e = q_exponent(flag)?;
        let u = ((s - alpha) / ((s - 1.0 / alpha) * alpha)).abs();
        acc *= u.powf(0.25 * e);
    }
    Ok(acc)
}

/// Data needed for the phase integrals.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhaseInputs {
    pub spectrum: TwoBandSpectrum,
    pub q: f64,
    pub q1: f64,
    /// Chebyshev nodes of I (first kind, from q down to q₁).
    pub nodes: Vec<f64>,
    /// |χ| at `nodes`.
    pub chi_abs: Vec<f64>,
    /// Gap eigenvalues in decreasing z.
    pub gap_z: Vec<f64>,
    /// Eigenvalues below the left band, as z ∈ (q, 0).
    pub below_z: Vec<f64>,
    pub flags: (Resonance, Resonance),
    pub ell: i32,
    pub eps: f64,
    /// Background factor a₋a₊ multiplying |χ| in the phase integrand.
    pub chi_scale: f64,
}

impl PhaseInputs {
    pub fn from_scattering(data: &ScatteringData, spectrum: TwoBandSpectrum, eps: f64) -> Result<Self> {
        let inputs = Self {
            spectrum,
            q: data.q,
            q1: data.q1,
            nodes: data.chi_abs.iter().map(|c| c.s).collect(),
            chi_abs: data.chi_abs.iter().map(|c| c.chi_abs).collect(),
            gap_z: data.gap_z(),
            below_z: data.below_z(),
            flags: (data.resonance.at_q, data.resonance.at_q1),
            ell: data.resonance.ell,
            eps,
            chi_scale: 0.5 * spectrum.a,
        };
        inputs.validate()?;
        Ok(inputs)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes.len() != self.chi_abs.len() || self.nodes.is_empty() {
            return Err(Error::InvalidInput("chi samples and nodes differ in length".into()));
        }
        if let Some(k) = self.chi_abs.iter().position(|&c| !(c > 0.0 && c.is_finite())) {
            return Err(Error::Domain(format!(
                "|chi| = {} at s = {} is not positive",
                self.chi_abs[k], self.nodes[k]
            )));
        }
        if self.gap_z.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidInput("gap eigenvalues must be strictly decreasing".into()));
        }
        Ok(())
    }

    pub fn sectors(&self) -> usize {
        self.gap_z.len() + 1
    }

    /// log(|Q|⁻²·a₋a₊·|χ|) at the stored nodes: smooth up to the edges of I.
    fn smooth_log(&self) -> Result<Vec<f64>> {
        self.nodes
            .iter()
            .zip(&self.chi_abs)
            .map(|(&s, &c)| {
                let qa = q_abs(s, self.q, self.q1, self.flags)?;
                Ok((c * self.chi_scale / (qa * qa)).ln())
            })
            .collect()
    }

    /// Barycentric interpolant of log(|Q|⁻²·a₋a₊·|χ|) through the Chebyshev nodes.
    pub fn smooth_log_at(&self, s: f64) -> Result<f64> {
        let vals = self.smooth_log()?;
        Ok(chebyshev_interpolate(&self.nodes, &vals, s))
    }
}

/// Barycentric interpolation through first-kind Chebyshev nodes ordered as produced by
/// [`quadrature::chebyshev_nodes`].
pub fn chebyshev_interpolate(nodes: &[f64], vals: &[f64], x: f64) -> f64 {
    let n = nodes.len();
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..n {
        let d = x - nodes[k];
        if d == 0.0 {
            return vals[k];
        }
        let th = (2 * k + 1) as f64 * PI / (2 * n) as f64;
        let w = if k % 2 == 0 { th.sin() } else { -th.sin() } / d;
        num += w * vals[k];
        den += w;
    }
    num / den
}

/// Value of 𝒫̃ on I approached from below.
fn p_tilde_below(spec: &TwoBandSpectrum, s: f64) -> Complex64 {
    spec.p_tilde(Complex64::new(s, -0.0))
}

/// ∫_J ds/(s𝒫(s)) = ∫_{q₁}^{−1} ds/𝒫̃(s), oriented from q₁ to −1.
pub fn j_period(spec: &TwoBandSpectrum) -> Complex64 {
    let q1 = spec.q1();
    let top = (q1 + 1.0).sqrt();
    quadrature::legendre_complex(0.0, top, 4, 48, |u| {
        let s = q1 - u * u;
        Complex64::new(-2.0 * u, 0.0) / spec.p_tilde(Complex64::new(s, 0.0))
    })
}

/// Δ_j on the literal branch conventions, before reduction mod 2π.
///
/// I is traversed from q to q₁ with 𝒫₊ the boundary value from below.
pub fn delta_j(j: usize, inputs: &PhaseInputs) -> Result<f64> {
    if j == 0 || j > inputs.sectors() {
        return Err(Error::Domain(format!("sector {j} outside 1..={}", inputs.sectors())));
    }
    let spec = &inputs.spectrum;
    let (q, q1) = (inputs.q, inputs.q1);
    let factors = blaschke_factors(j, &inputs.gap_z, &inputs.below_z);
    let logs = inputs.smooth_log()?;
    let n = inputs.nodes.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, &s) in inputs.nodes.iter().enumerate() {
        let pi_j = blaschke(Complex64::new(s, 0.0), &factors).re;
        let l = logs[k] - 2.0 * pi_j.abs().ln();
        // Gauss–Chebyshev removes √((q−s)(s−q₁)); restore it in the integrand.
        let weight = ((q - s) * (s - q1)).sqrt();
        acc += l * weight / p_tilde_below(spec, s);
    }
    // ∫_{q→q₁} is minus the integral in increasing s.
    let numerator = -acc * (PI / n as f64);
    let value = -Complex64::i() * numerator / j_period(spec);
    let scale = value.norm().max(1.0);
    if value.im.abs() > 1e-6 * scale {
        return Err(Error::Branch(format!(
            "phase integral has imaginary part {:e}",
            value.im
        )));
    }
    Ok(value.re + inputs.ell as f64 * PI)
}

/// Reduces a phase to (−π, π].
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Closed-form Δ_j − Δ_{j+1} from one Blaschke factor.
pub fn delta_jump(j: usize, inputs: &PhaseInputs) -> Result<f64> {
    let zj = *inputs
        .gap_z
        .get(j.wrapping_sub(1))
        .ok_or_else(|| Error::Domain(format!("no gap eigenvalue with index {j}")))?;
    let (q, q1) = (inputs.q, inputs.q1);
    let num = quadrature::chebyshev_adaptive(q1, q, 1e-13, |s| {
        ((zj * s - 1.0) / (s - zj)).abs().ln() / ((s - 1.0 / q) * (s - 1.0 / q1)).sqrt()
    })?;
    let top = (q1 + 1.0).sqrt();
    let den = quadrature::legendre_composite(0.0, top, 4, 48, |u| {
        let s = q1 - u * u;
        let p = sqrt_pair(Complex64::new(s, 0.0), q1, q) * sqrt_pair(Complex64::new(s, 0.0), 1.0 / q, 1.0 / q1);
        2.0 * u / p.re
    });
    Ok(2.0 * num / den)
}

/// Δ(ξ) for ξ in one of the trimmed sectors.
pub fn delta_at_xi(xi: f64, partition: &crate::surface::XiPartition, inputs: &PhaseInputs) -> Result<f64> {
    let j = partition
        .sector_of(xi)
        .ok_or_else(|| Error::Domain(format!("xi = {xi} lies in no trimmed sector")))?;
    delta_j(j, inputs)
}

/// Per-sector entry of a phase report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorPhase {
    pub j: usize,
    pub xi_range: (f64, f64),
    pub delta: f64,
    pub delta_mod_2pi: f64,
    /// Δ_j − Δ_{j+1} from the two Δ integrals (absent for the last sector).
    pub jump_direct: Option<f64>,
    pub jump_closed_form: Option<f64>,
    pub jump_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub ell: i32,
    pub gap_z: Vec<f64>,
    pub sectors: Vec<SectorPhase>,
}

pub fn phase_report(inputs: &PhaseInputs, partition: &crate::surface::XiPartition) -> Result<PhaseReport> {
    let m = inputs.sectors();
    let deltas = (1..=m).map(|j| delta_j(j, inputs)).collect::<Result<Vec<_>>>()?;
    let mut sectors = Vec::with_capacity(m);
    for j in 1..=m {
        let (jump_direct, jump_closed_form, jump_residual) = if j < m {
            let d = deltas[j - 1] - deltas[j];
            let c = delta_jump(j, inputs)?;
            (Some(d), Some(c), Some(wrap_phase(d - c).abs()))
        } else {
            (None, None, None)
        };
        sectors.push(SectorPhase {
            j,
            xi_range: partition.intervals[j - 1],
            delta: deltas[j - 1],
            delta_mod_2pi: deltas[j - 1].rem_euclid(2.0 * PI),
            jump_direct,
            jump_closed_form,
            jump_residual,
        });
    }
    Ok(PhaseReport {
        ell: inputs.ell,
        gap_z: inputs.gap_z.clone(),
        sectors,
    })
}

/// Density f of the scalar problem on the contour from q to q⁻¹, parametrized piecewise.
struct SzegoDensity<'a> {
    inputs: &'a PhaseInputs,
    factors: Vec<f64>,
    logs: Vec<f64>,
    /// Δ − ℓπ.
    delta_tilde: f64,
}

impl SzegoDensity<'_> {
    /// f(s) for s inside I (boundary value 𝒫₊ from below).
    fn on_i(&self, s: f64) -> Complex64 {
        let inp = self.inputs;
        let l = chebyshev_interpolate(&inp.nodes, &self.logs, s)
            - 2.0 * blaschke(Complex64::new(s, 0.0), &self.factors).re.abs().ln();
        l / (p_tilde_below(&inp.spectrum, s) / s)
    }

    /// f(s) for s inside J.
    fn on_j(&self, s: f64) -> Complex64 {
        Complex64::new(0.0, self.delta_tilde) / self.inputs.spectrum.script_p(Complex64::new(s, 0.0))
    }
}

fn omega_kernel(z: Complex64, s: f64) -> Complex64 {
    (s - z).inv() - 1.0 / (s - 1.0)
}

/// The scalar function S(z) for z off the contour, with f(s₀) subtracted near s₀ when given.
fn szego_s(z: Complex64, dens: &SzegoDensity, anchor: Option<(f64, Complex64)>) -> Complex64 {
    let inp = dens.inputs;
    let (q, q1) = (inp.q, inp.q1);
    let (mid, half) = (0.5 * (q + q1), 0.5 * (q - q1));
    let f0 = anchor.map(|a| a.1).unwrap_or(Complex64::new(0.0, 0.0));
    let panels = 24;
    // Parameter of the anchor on I or J (outside the range if it lies on the other arc);
    // panels are graded towards it down to a fraction of the distance from z to the axis.
    let x0 = anchor.map(|a| a.0).unwrap_or(f64::NAN);
    let finest = (0.1 * z.im.abs()).max(1e-12);
    let phi0 = ((x0 - mid) / half).acos();
    let u0 = (q1 - x0).sqrt();
    // I: s = mid + half·cos φ, φ from 0 (s = q) to π (s = q₁).
    let on_i = quadrature::legendre_complex_graded(0.0, PI, phi0, finest / half, panels, 32, |phi| {
        let s = mid + half * phi.cos();
        let ds = -half * phi.sin();
        let fs = dens.on_i(s) - f0;
        (omega_kernel(z, s) + omega_kernel(z, 1.0 / s) / (s * s)) * fs * ds
    });
    // The reflected arcs I*, J* are pulled back by s ↦ s⁻¹, which keeps the orientation of I, J.
    let top = (q1 + 1.0).sqrt();
    let on_j = quadrature::legendre_complex_graded(0.0, top, u0, finest / (2.0 * u0.max(1e-3)), panels, 32, |u| {
        let s = q1 - u * u;
        let ds = -2.0 * u;
        let fs = dens.on_j(s) - f0;
        (omega_kernel(z, s) + omega_kernel(z, 1.0 / s) / (s * s)) * fs * ds
    });
    let mut total = on_i + on_j;
    if anchor.is_some() {
        let l = ((1.0 / q - z) / (q - z)).ln() - Complex64::new((1.0 / q - 1.0) / (q - 1.0), 0.0).ln();
        total += f0 * l;
    }
    total / (2.0 * PI * Complex64::i())
}

fn szego_density(j: usize, inputs: &PhaseInputs) -> Result<SzegoDensity<'_>> {
    let delta = delta_j(j, inputs)?;
    Ok(SzegoDensity {
        inputs,
        factors: blaschke_factors(j, &inputs.gap_z, &inputs.below_z),
        logs: inputs.smooth_log()?,
        delta_tilde: delta - inputs.ell as f64 * PI,
    })
}

/// F(z) = exp(𝒫(z)S(z))·Q(z) for sector j; z off [q⁻¹, q].
pub fn szego_f(z: Complex64, j: usize, inputs: &PhaseInputs) -> Result<Complex64> {
    let dens = szego_density(j, inputs)?;
    szego_f_with(z, &dens, None)
}

fn szego_f_with(z: Complex64, dens: &SzegoDensity, anchor: Option<(f64, Complex64)>) -> Result<Complex64> {
    let inp = dens.inputs;
    let s = szego_s(z, dens, anchor);
    let p = inp.spectrum.script_p(z);
    Ok((p * s).exp() * q_factor(z, inp.q, inp.q1, inp.flags)?)
}

/// Boundary values (F₊, F₋) at a point x of I or J from the offsets x ∓ i·h and x ∓ i·h/2,
/// combined as 2F(h/2) − F(h) to cancel the O(h) term. Both arcs run leftwards, so the + side
/// is below the axis. The density value at x is subtracted to tame the near-singular integral.
pub fn szego_f_sides(x: f64, h: f64, j: usize, inputs: &PhaseInputs) -> Result<(Complex64, Complex64)> {
    let dens = szego_density(j, inputs)?;
    let (q, q1) = (inputs.q, inputs.q1);
    let f0 = if x > q1 && x < q {
        dens.on_i(x)
    } else if x > -1.0 && x < q1 {
        dens.on_j(x)
    } else {
        return Err(Error::Domain(format!("{x} is not inside I or J")));
    };
    let anchor = Some((x, f0));
    let side = |y: f64| -> Result<Complex64> {
        let far = szego_f_with(Complex64::new(x, y), &dens, anchor)?;
        let near = szego_f_with(Complex64::new(x, 0.5 * y), &dens, anchor)?;
        Ok(2.0 * near - far)
    };
    Ok((side(-h)?, side(h)?))
}
