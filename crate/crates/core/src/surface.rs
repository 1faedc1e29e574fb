//! Genus-one quantities of the two-band spectrum [b−2a, b+2a] ∪ [−1, 1].
//!
//! Branch conventions: 𝓡^{1/2}(λ) = −√((λ²−1)(λ−e₁)(λ−e₂)) continued off the bands,
//! so it is positive in the gap, +i|𝓡|^{1/2} on the upper rim of the left band and
//! behaves like −λ² at infinity on the upper sheet.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature;

const QUAD_TOL: f64 = 1e-14;

/// Principal-root product √(s−α)·√(s−β): cut on [α, β], ~ s at infinity.
pub fn sqrt_pair(s: Complex64, alpha: f64, beta: f64) -> Complex64 {
    (s - alpha).sqrt() * (s - beta).sqrt()
}

/// Right Joukovski variable z(λ) with |z| ≤ 1, from λ = (z + z⁻¹)/2.
pub fn joukovski_right(lambda: Complex64) -> Complex64 {
    lambda - sqrt_pair(lambda, -1.0, 1.0)
}

/// λ = (z + z⁻¹)/2.
pub fn lambda_of_z(z: Complex64) -> Complex64 {
    0.5 * (z + z.inv())
}

/// The two-band spectrum of a normalized shock.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoBandSpectrum {
    pub a: f64,
    pub b: f64,
}

impl TwoBandSpectrum {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::Domain(format!("left background a = {a} must be positive")));
        }
        if !(b + 2.0 * a < -1.0) {
            return Err(Error::Domain(format!(
                "b + 2a = {} must lie below -1",
                b + 2.0 * a
            )));
        }
        Ok(Self { a, b })
    }

    /// Lower edge b − 2a of the left band.
    pub fn e1(&self) -> f64 {
        self.b - 2.0 * self.a
    }

    /// Upper edge b + 2a of the left band.
    pub fn e2(&self) -> f64 {
        self.b + 2.0 * self.a
    }

    /// z-image of b − 2a.
    pub fn q(&self) -> f64 {
        joukovski_right(Complex64::new(self.e1(), 0.0)).re
    }

    /// z-image of b + 2a.
    pub fn q1(&self) -> f64 {
        joukovski_right(Complex64::new(self.e2(), 0.0)).re
    }

    /// |𝓡(λ)|^{1/2} for real λ.
    pub fn r_abs_sqrt(&self, lambda: f64) -> f64 {
        ((lambda * lambda - 1.0) * (lambda - self.e1()) * (lambda - self.e2()))
            .abs()
            .sqrt()
    }

    /// The branch 𝓡^{1/2}(λ) described in the module documentation.
    pub fn sqrt_r(&self, lambda: Complex64) -> Complex64 {
        -sqrt_pair(lambda, -1.0, 1.0) * sqrt_pair(lambda, self.e1(), self.e2())
    }

    /// 𝒫̃(z) = √((z−q)(z−q₁)(z−q₁⁻¹)(z−q⁻¹)) with cuts on I = [q₁, q] and I* and 𝒫̃(0) = 1.
    pub fn p_tilde(&self, z: Complex64) -> Complex64 {
        let (q, q1) = (self.q(), self.q1());
        sqrt_pair(z, q1, q) * sqrt_pair(z, 1.0 / q, 1.0 / q1)
    }

    /// 𝒫(z) = 𝒫̃(z)/z, symmetric under z ↦ z⁻¹.
    pub fn script_p(&self, z: Complex64) -> Complex64 {
        self.p_tilde(z) / z
    }
}

/// Where an Abel integral is taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Segment {
    BandLeft,
    BandRight,
    Gap,
    /// The half-line (−∞, b − 2a).
    Tail,
}

/// ∫_segment f(λ) dλ / |𝓡(λ)|^{1/2}.
///
/// Endpoint inverse square roots are absorbed by Gauss–Chebyshev weights; the
/// tail uses λ = e₁ − v² and a compactifying map. `f` may grow at most linearly.
pub fn cycle_quadrature<F: Fn(f64) -> f64>(
    spec: &TwoBandSpectrum,
    f: F,
    segment: Segment,
) -> Result<f64> {
    let (e1, e2) = (spec.e1(), spec.e2());
    match segment {
        Segment::BandLeft => quadrature::chebyshev_adaptive(e1, e2, QUAD_TOL, |l| {
            f(l) / (l * l - 1.0).sqrt()
        }),
        Segment::BandRight => quadrature::chebyshev_adaptive(-1.0, 1.0, QUAD_TOL, |l| {
            f(l) / ((l - e1) * (l - e2)).sqrt()
        }),
        Segment::Gap => quadrature::chebyshev_adaptive(e2, -1.0, QUAD_TOL, |l| {
            f(l) / ((1.0 - l) * (l - e1)).sqrt()
        }),
        Segment::Tail => Ok(quadrature::half_line(|v| {
            let l = e1 - v * v;
            2.0 * f(l) / ((v * v + 4.0 * spec.a).sqrt() * (l * l - 1.0).sqrt())
        })),
    }
}

/// Γ₁, Γ₂: gap averages of λ² and λ against dλ/|𝓡|^{1/2}.
pub fn gammas(spec: &TwoBandSpectrum) -> Result<(f64, f64)> {
    let i0 = cycle_quadrature(spec, |_| 1.0, Segment::Gap)?;
    let i1 = cycle_quadrature(spec, |l| l, Segment::Gap)?;
    let i2 = cycle_quadrature(spec, |l| l * l, Segment::Gap)?;
    Ok((i2 / i0, i1 / i0))
}

/// Cached genus-one data of one spectrum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfaceContext {
    pub spectrum: TwoBandSpectrum,
    pub q: f64,
    pub q1: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Im Λ, where Λ is the b-period of ω_{∞₊∞₋} (Λ itself is purely imaginary).
    pub lambda_im: f64,
    /// Im U, where U is the b-period of Ω₀.
    pub u_im: f64,
    /// Im τ > 0.
    pub tau_im: f64,
    /// c with ζ = c dλ/𝓡^{1/2} and unit a-period.
    pub zeta_norm: f64,
    /// Logarithmic capacity ã of the spectrum.
    pub cap: f64,
    /// Next coefficient of the capacity expansion.
    pub cap_next: f64,
    /// Abel map at ∞₊ (real).
    pub a_inf: f64,
    pub xi_lower: f64,
    pub xi_upper: f64,
}

impl SurfaceContext {
    pub fn new(spectrum: TwoBandSpectrum) -> Result<Self> {
        let spec = &spectrum;
        let gap0 = cycle_quadrature(spec, |_| 1.0, Segment::Gap)?;
        let (gamma1, gamma2) = gammas(spec)?;
        let c = 1.0 / (2.0 * gap0);
        let b0 = cycle_quadrature(spec, |_| 1.0, Segment::BandLeft)?;
        let b1 = cycle_quadrature(spec, |l| l, Segment::BandLeft)?;
        let b2 = cycle_quadrature(spec, |l| l * l, Segment::BandLeft)?;
        let b = spec.b;
        let nu_prod = b * gamma2 - gamma1;
        let lambda_im = 2.0 * (b1 - gamma2 * b0);
        let u_im = 2.0 * (b2 - b * b1 + nu_prod * b0);
        let tau_im = 2.0 * c * b0;
        let a_inf = c * cycle_quadrature(spec, |_| 1.0, Segment::Tail)?;
        let mut ctx = Self {
            spectrum,
            q: spec.q(),
            q1: spec.q1(),
            gamma1,
            gamma2,
            lambda_im,
            u_im,
            tau_im,
            zeta_norm: c,
            cap: 0.0,
            cap_next: 0.0,
            a_inf,
            xi_lower: 0.0,
            xi_upper: 0.0,
        };
        let (lo, hi) = sector_bounds(&ctx);
        ctx.xi_lower = lo;
        ctx.xi_upper = hi;
        let (cap, next) = capacity(&ctx);
        ctx.cap = cap;
        ctx.cap_next = next;
        Ok(ctx)
    }

    pub fn tau(&self) -> Complex64 {
        Complex64::new(0.0, self.tau_im)
    }

    /// Λ/(2πi), the per-site advance of the Dirichlet divisor.
    pub fn delta_rate(&self) -> f64 {
        self.lambda_im / (2.0 * PI)
    }

    /// U/(2πi), the per-unit-time advance of the Dirichlet divisor.
    pub fn omega_rate(&self) -> f64 {
        self.u_im / (2.0 * PI)
    }

    /// Integral c∫_{e₂}^{λ} dλ/|𝓡|^{1/2} along the gap, for λ ∈ [e₂, −1].
    pub fn gap_abel(&self, lambda: f64) -> f64 {
        let phi = self.gap_phi(lambda);
        self.gap_abel_phi(phi)
    }

    /// Angle φ with λ = e₂ + (−1 − e₂)(1 − cos φ)/2.
    pub fn gap_phi(&self, lambda: f64) -> f64 {
        let e2 = self.spectrum.e2();
        let x = 1.0 - 2.0 * (lambda - e2) / (-1.0 - e2);
        x.clamp(-1.0, 1.0).acos()
    }

    pub fn gap_lambda(&self, phi: f64) -> f64 {
        let e2 = self.spectrum.e2();
        e2 + (-1.0 - e2) * 0.5 * (1.0 - phi.cos())
    }

    /// c∫_0^φ dφ'/√((1−λ)(λ−e₁)).
    pub fn gap_abel_phi(&self, phi: f64) -> f64 {
        if phi <= 0.0 {
            return 0.0;
        }
        let e1 = self.spectrum.e1();
        self.zeta_norm
            * quadrature::legendre(0.0, phi, 48, |p| {
                let l = self.gap_lambda(p);
                1.0 / ((1.0 - l) * (l - e1)).sqrt()
            })
    }
}

/// μ₁ < μ₂ with μ₁ + μ₂ = b − ξ and μ₁μ₂ = (b − ξ)Γ₂ − Γ₁.
pub fn mu_pair(xi: f64, ctx: &SurfaceContext) -> Result<(f64, f64)> {
    let b = ctx.spectrum.b;
    let disc = (b - xi).powi(2) + 4.0 * (ctx.gamma1 + (xi - b) * ctx.gamma2);
    if disc < 0.0 {
        return Err(Error::Domain(format!("negative discriminant at xi = {xi}")));
    }
    let d = disc.sqrt();
    Ok((0.5 * (b - xi - d), 0.5 * (b - xi + d)))
}

/// (ξ_{ℵ+1}, ξ₀): the rays where μ₂ reaches −1 and μ₁ reaches b + 2a.
pub fn sector_bounds(ctx: &SurfaceContext) -> (f64, f64) {
    let (b, e2) = (ctx.spectrum.b, ctx.spectrum.e2());
    let lower = b + (1.0 - ctx.gamma1) / (1.0 + ctx.gamma2);
    let upper = b + (ctx.gamma1 - e2 * e2) / (e2 - ctx.gamma2);
    (lower, upper)
}

fn bisect<F: FnMut(f64) -> f64>(mut lo: f64, mut hi: f64, mut f: F, what: &str) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Bracket(format!(
            "{what}: no sign change on [{lo}, {hi}] ({flo:e}, {fhi:e})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub(crate) fn bisect_root<F: FnMut(f64) -> f64>(lo: f64, hi: f64, f: F, what: &str) -> Result<f64> {
    bisect(lo, hi, f, what)
}

/// ∫_x^{−1} (λ−μ₁)(λ−μ₂)/|𝓡|^{1/2} dλ for x in the gap.
pub fn mu_zero_functional(x: f64, mu: (f64, f64), ctx: &SurfaceContext) -> f64 {
    let e1 = ctx.spectrum.e1();
    let phi = ctx.gap_phi(x);
    quadrature::legendre_composite(phi, PI, 2, 48, |p| {
        let l = ctx.gap_lambda(p);
        (l - mu.0) * (l - mu.1) / ((1.0 - l) * (l - e1)).sqrt()
    })
}

/// μ₀(ξ): the zero of the gap functional between μ₁ and μ₂.
pub fn mu_zero(xi: f64, ctx: &SurfaceContext) -> Result<f64> {
    if !(xi > ctx.xi_lower && xi < ctx.xi_upper) {
        return Err(Error::Domain(format!(
            "xi = {xi} outside ({}, {})",
            ctx.xi_lower, ctx.xi_upper
        )));
    }
    let mu = mu_pair(xi, ctx)?;
    let lo = mu.0.max(ctx.spectrum.e2());
    let hi = mu.1.min(-1.0);
    bisect(lo, hi, |x| mu_zero_functional(x, mu, ctx), "mu_zero")
}

/// Integrand ½ N(s) / (𝒫̃(s) s²) of the g-function, N(s) = ∏ (s−y_k)(s−y_k⁻¹).
pub fn g_integrand(s: Complex64, ys: (Complex64, Complex64), ctx: &SurfaceContext) -> Complex64 {
    let n = (s - ys.0) * (s - ys.0.inv()) * (s - ys.1) * (s - ys.1.inv());
    0.5 * n / (ctx.spectrum.p_tilde(s) * s * s)
}

fn y_points(xi: f64, ctx: &SurfaceContext) -> Result<(Complex64, Complex64)> {
    let (m1, m2) = mu_pair(xi, ctx)?;
    Ok((
        joukovski_right(Complex64::new(m1, 0.0)),
        joukovski_right(Complex64::new(m2, 0.0)),
    ))
}

/// g on the principal logarithmic branch: ∫₁^z along 1 → m → z in the closed upper
/// half-plane, continued by conjugation below. The sign bit of `z.im` selects the side
/// for points on the negative axis.
pub fn g_principal(z: Complex64, xi: f64, ctx: &SurfaceContext) -> Result<Complex64> {
    let ys = y_points(xi, ctx)?;
    Ok(g_principal_with(z, ys, ctx))
}

fn g_principal_with(z: Complex64, ys: (Complex64, Complex64), ctx: &SurfaceContext) -> Complex64 {
    if z.im.is_sign_negative() {
        return g_principal_with(z.conj(), ys, ctx).conj();
    }
    if (z - 1.0).norm() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let m = Complex64::new(0.5 * (1.0 + z.re), 0.6 * z.norm().max(1.0));
    let one = Complex64::new(1.0, 0.0);
    let first = quadrature::legendre_complex(0.0, 1.0, 8, 32, |u| {
        g_integrand(one + (m - one) * u, ys, ctx) * (m - one)
    });
    let second = quadrature::legendre_complex(0.0, 1.0, 12, 32, |v| {
        let s = z + (m - z) * (v * v);
        g_integrand(s, ys, ctx) * (m - z) * (2.0 * v)
    });
    first - second
}

/// g(z, ξ) on the branch g_principal − iπξ·sgn(Im z).
///
/// This branch is odd under z ↦ z⁻¹, vanishes at q and q⁻¹ and jumps by −U − ξΛ across J.
pub fn g_eval(z: Complex64, xi: f64, ctx: &SurfaceContext) -> Result<Complex64> {
    let base = g_principal(z, xi, ctx)?;
    let sign = if z.im.is_sign_negative() { -1.0 } else { 1.0 };
    let on_positive_axis = z.im == 0.0 && z.re > 0.0;
    if on_positive_axis {
        return Ok(base);
    }
    Ok(base - Complex64::new(0.0, sign * PI * xi))
}

/// Boundary values (g₊, g₋) at a real point x < 0. The contour runs leftwards along the
/// negative axis, so g₊ is the value from below and g₋ the value from above.
pub fn g_sides(x: f64, xi: f64, ctx: &SurfaceContext) -> Result<(Complex64, Complex64)> {
    let below = g_eval(Complex64::new(x, -0.0), xi, ctx)?;
    let above = g_eval(Complex64::new(x, 0.0), xi, ctx)?;
    Ok((below, above))
}

/// Λ, U (imaginary parts) and the largest deviation of g₊ − g₋ from −U − ξΛ on a 20-point grid in J.
pub fn periods(ctx: &SurfaceContext, xi: f64) -> Result<(f64, f64, f64)> {
    let target = -Complex64::new(0.0, ctx.u_im + xi * ctx.lambda_im);
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let x = -1.0 + (ctx.q1 + 1.0) * (k as f64 + 0.5) / 20.0;
        let (gp, gm) = g_sides(x, xi, ctx)?;
        worst = worst.max((gp - gm - target).norm());
    }
    Ok((ctx.lambda_im, ctx.u_im, worst))
}

/// Φ(z, ξ) = (z − z⁻¹)/2 + ξ log z on the principal logarithm.
pub fn phi_phase(z: Complex64, xi: f64) -> Complex64 {
    0.5 * (z - z.inv()) + xi * z.ln()
}

/// K(ξ) = lim_{z→0} (Φ − g), with g on the principal branch.
///
/// Computed as ∫₀¹ (g′ − Φ′) ds along (0, 1], where the integrand is regular.
pub fn k_const(xi: f64, ctx: &SurfaceContext) -> Result<f64> {
    let ys = y_points(xi, ctx)?;
    Ok(quadrature::legendre_composite(0.0, 1.0, 8, 48, |s| {
        let sc = Complex64::new(s, 0.0);
        let h = g_integrand(sc, ys, ctx).re;
        h - 0.5 * (1.0 + 1.0 / (s * s)) - xi / s
    }))
}

/// ∫_1^λ (x − Γ₂)/|𝓡(x)|^{1/2} dx for λ > 1 (Green function of the spectrum).
pub fn green_right(lambda: f64, ctx: &SurfaceContext) -> f64 {
    let (e1, e2, g2) = (ctx.spectrum.e1(), ctx.spectrum.e2(), ctx.gamma2);
    let top = (lambda - 1.0).sqrt();
    let w_top = top.ln_1p();
    // u = e^w − 1 spreads the nodes logarithmically towards large u.
    quadrature::legendre_composite(0.0, w_top, 32, 32, |w| {
        let u = w.exp_m1();
        let du = w.exp();
        let x = 1.0 + u * u;
        2.0 * u * (x - g2) / ((u * u * (x + 1.0)).sqrt() * ((x - e1) * (x - e2)).sqrt()) * du
    })
}

/// log ã = lim_{λ→+∞} (log λ − G(λ)) = ∫_1^∞ (1/x − (x − Γ₂)/|𝓡(x)|^{1/2}) dx.
pub fn log_capacity(ctx: &SurfaceContext) -> f64 {
    let (e1, e2, g2) = (ctx.spectrum.e1(), ctx.spectrum.e2(), ctx.gamma2);
    // x = 1 + u² removes the square-root singularity at x = 1; the integrand decays like u⁻³.
    quadrature::half_line(|u| {
        let x = 1.0 + u * u;
        2.0 * u / x - 2.0 * (x - g2) / ((x + 1.0) * (x - e1) * (x - e2)).sqrt()
    })
}

/// Capacity ã and the next coefficient b̃ of e^{−G(λ(z))}/(2z) = ã(1 + 2b̃ z + O(z²)).
///
/// ã comes from [`log_capacity`]; b̃ from a linear fit of (e^{−G}/(2z) − ã)/z at z = 1e−2, 1e−3.
pub fn capacity(ctx: &SurfaceContext) -> (f64, f64) {
    let cap = log_capacity(ctx).exp();
    let f = |z: f64| {
        let lambda = 0.5 * (z + 1.0 / z);
        ((-green_right(lambda, ctx)).exp() / (2.0 * z) - cap) / z
    };
    let (z1, z2) = (1e-2, 1e-3);
    let (f1, f2) = (f(z1), f(z2));
    let c1 = f2 - (f1 - f2) / (z1 - z2) * z2;
    (cap, c1 / (2.0 * cap))
}

/// Sheet of a point of the Riemann surface lying over the real axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sheet {
    Upper,
    Lower,
}

/// A real point of the surface accepted by [`abel_map`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SurfacePoint {
    /// λ in the closed gap [b + 2a, −1].
    Gap { lambda: f64, sheet: Sheet },
    /// λ ≤ b − 2a.
    LeftOfBands { lambda: f64, sheet: Sheet },
    Infinity(Sheet),
}

/// Abel map ∫_{b−2a}^p ζ, reduced to the representative −τ/2 + s with s ∈ [0, 1) on the a-cycle
/// and to a real value on the half-line left of the bands.
pub fn abel_map(p: SurfacePoint, ctx: &SurfaceContext) -> Result<Complex64> {
    match p {
        SurfacePoint::Gap { lambda, sheet } => {
            let (e2, top) = (ctx.spectrum.e2(), -1.0);
            if !(lambda >= e2 - 1e-14 && lambda <= top + 1e-14) {
                return Err(Error::Domain(format!("lambda = {lambda} outside the gap")));
            }
            let u = ctx.gap_abel(lambda.clamp(e2, top));
            let s = match sheet {
                Sheet::Upper => u,
                Sheet::Lower => (1.0 - u).rem_euclid(1.0),
            };
            Ok(Complex64::new(s, -0.5 * ctx.tau_im))
        }
        SurfacePoint::LeftOfBands { lambda, sheet } => {
            let e1 = ctx.spectrum.e1();
            if lambda > e1 {
                return Err(Error::Domain(format!("lambda = {lambda} above b - 2a")));
            }
            let w_top = (e1 - lambda).sqrt().ln_1p();
            let a = ctx.spectrum.a;
            // v = e^w − 1 keeps the nodes dense near the branch point for large |λ|.
            let val = ctx.zeta_norm
                * quadrature::legendre_composite(0.0, w_top, 16, 48, |w| {
                    let v = w.exp_m1();
                    let l = e1 - v * v;
                    2.0 * w.exp() / ((v * v + 4.0 * a).sqrt() * (l * l - 1.0).sqrt())
                });
            Ok(Complex64::new(
                if sheet == Sheet::Upper { val } else { -val },
                0.0,
            ))
        }
        SurfacePoint::Infinity(sheet) => Ok(Complex64::new(
            if sheet == Sheet::Upper {
                ctx.a_inf
            } else {
                -ctx.a_inf
            },
            0.0,
        )),
    }
}

/// Sector bookkeeping derived from the gap eigenvalues.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct XiPartition {
    /// ξ₀ > ξ₁ > … > ξ_ℵ > ξ_{ℵ+1}.
    pub breakpoints: Vec<f64>,
    /// ε-trimmed sector intervals [ξ_j + ε, ξ_{j−1} − ε], j = 1..=ℵ+1.
    pub intervals: Vec<(f64, f64)>,
}

impl XiPartition {
    pub fn midpoint(&self, j: usize) -> f64 {
        let (lo, hi) = self.intervals[j - 1];
        0.5 * (lo + hi)
    }

    /// Sector index j (1-based) whose trimmed interval contains ξ.
    pub fn sector_of(&self, xi: f64) -> Option<usize> {
        self.intervals
            .iter()
            .position(|&(lo, hi)| xi >= lo && xi <= hi)
            .map(|i| i + 1)
    }
}

/// ξ_j for each gap eigenvalue (ordered z₁ > z₂ > …) by inverting μ₀(ξ_j) = λ_j.
pub fn xi_partition(ctx: &SurfaceContext, gap_z: &[f64], eps: f64) -> Result<XiPartition> {
    let mut zs: Vec<f64> = gap_z.to_vec();
    zs.sort_by(|x, y| y.partial_cmp(x).expect("finite eigenvalues"));
    let (lo, hi) = (ctx.xi_lower, ctx.xi_upper);
    let margin = 1e-9 * (hi - lo);
    let mut breaks = vec![hi];
    for &z in &zs {
        let lambda = 0.5 * (z + 1.0 / z);
        let xi = bisect(
            lo + margin,
            hi - margin,
            |x| mu_zero(x, ctx).map(|m| m - lambda).unwrap_or(f64::NAN),
            "xi_partition",
        )?;
        breaks.push(xi);
    }
    breaks.push(lo);
    let intervals: Vec<(f64, f64)> = breaks
        .windows(2)
        .map(|w| (w[1] + eps, w[0] - eps))
        .collect();
    for (j, &(a, b)) in intervals.iter().enumerate() {
        if a >= b {
            log::warn!("sector {} is empty for eps = {eps}", j + 1);
        }
    }
    Ok(XiPartition {
        breakpoints: breaks,
        intervals,
    })
}
