//! Theta functions, Jacobi inversion on the a-cycle and the two-band Toda solution.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::surface::{Sheet, SurfaceContext};

/// Smallest M with e^{−π Im τ M²} below 1e−16.
pub fn theta_order(tau_im: f64) -> usize {
    let m = (16.0 * std::f64::consts::LN_10 / (PI * tau_im)).sqrt();
    (m.ceil() as usize).max(1)
}

/// θ(v | τ) = Σ_{|m|≤M} exp(πi m²τ + 2πi m v).
pub fn theta(v: Complex64, tau: Complex64) -> Complex64 {
    let big_m = theta_order(tau.im) as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for m in -big_m..=big_m {
        let mf = m as f64;
        let i = Complex64::i();
        acc += (i * PI * mf * mf * tau + 2.0 * i * PI * mf * v).exp();
    }
    acc
}

/// θ(x | i·tau_im) for real x: 1 + 2Σ e^{−π m² Im τ} cos 2πmx.
pub fn theta_real(x: f64, tau_im: f64) -> f64 {
    let big_m = theta_order(tau_im);
    let mut acc = 1.0;
    for m in 1..=big_m {
        let mf = m as f64;
        acc += 2.0 * (-PI * mf * mf * tau_im).exp() * (2.0 * PI * mf * x).cos();
    }
    acc
}

/// A point of the a-cycle: the gap on either sheet, parametrized by the arc fraction s ∈ [0, 1).
///
/// s ∈ [0, 1/2] runs from b + 2a to −1 on the upper sheet, s ∈ [1/2, 1) returns on the lower one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivisorPoint {
    pub s: f64,
    pub lambda: f64,
    pub sheet: Sheet,
}

/// λ with c∫_{b+2a}^{λ} dλ/|𝓡|^{1/2} = u for u ∈ [0, 1/2].
pub fn gap_point_of_fraction(u: f64, ctx: &SurfaceContext) -> f64 {
    let (e1, e2) = (ctx.spectrum.e1(), ctx.spectrum.e2());
    if u <= 0.0 {
        return e2;
    }
    if u >= 0.5 {
        return -1.0;
    }
    // Newton in φ, safeguarded by the bracket [0, π]; F is increasing.
    let (mut lo, mut hi) = (0.0, PI);
    let mut phi = 2.0 * PI * u;
    for _ in 0..60 {
        let f = ctx.gap_abel_phi(phi) - u;
        if f > 0.0 {
            hi = phi;
        } else {
            lo = phi;
        }
        let l = ctx.gap_lambda(phi);
        let df = ctx.zeta_norm / ((1.0 - l) * (l - e1)).sqrt();
        let mut next = phi - f / df;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - phi).abs() < 1e-15 {
            phi = next;
            break;
        }
        phi = next;
    }
    ctx.gap_lambda(phi)
}

/// The point of the a-cycle at arc fraction s (taken mod 1).
pub fn point_of_fraction(s: f64, ctx: &SurfaceContext) -> DivisorPoint {
    let s = s.rem_euclid(1.0);
    let (u, sheet) = if s <= 0.5 {
        (s, Sheet::Upper)
    } else {
        (1.0 - s, Sheet::Lower)
    };
    DivisorPoint {
        s,
        lambda: gap_point_of_fraction(u, ctx),
        sheet,
    }
}

/// p₀ with ∫_{b+2a}^{p₀} ζ ≡ −Δ/2π (mod 1).
pub fn jacobi_invert(delta: f64, ctx: &SurfaceContext) -> DivisorPoint {
    point_of_fraction(-delta / (2.0 * PI), ctx)
}

/// Phase parameters of a finite-gap solution.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiniteGapParams {
    pub ctx: SurfaceContext,
    pub delta: f64,
    pub p0: DivisorPoint,
    pub m_theta: usize,
}

impl FiniteGapParams {
    pub fn new(ctx: SurfaceContext, delta: f64) -> Self {
        let p0 = jacobi_invert(delta, &ctx);
        let m_theta = theta_order(ctx.tau_im);
        Self {
            ctx,
            delta,
            p0,
            m_theta,
        }
    }

    /// Arc fraction of the Dirichlet divisor at (n, t), not reduced mod 1.
    pub fn fraction(&self, n: i64, t: f64) -> f64 {
        self.p0.s + n as f64 * self.ctx.delta_rate() + t * self.ctx.omega_rate()
    }

    /// Real theta argument Z(n, t) once the τ/2 parts cancel.
    ///
    /// The constant uses the Abel map at ∞₋ (equal to −A(∞₊)).
    pub fn z_arg(&self, n: i64, t: f64) -> f64 {
        -self.ctx.a_inf - self.fraction(n, t) - 0.5
    }

    /// Complex theta argument built from the Abel map of p₀ and the Riemann constant τ/2 + 1/2.
    pub fn z_arg_complex(&self, n: i64, t: f64) -> Complex64 {
        let tau = self.ctx.tau();
        let a_p0 = Complex64::new(self.p0.s, 0.0) - 0.5 * tau;
        let xi_const = 0.5 * tau + 0.5;
        let rates = n as f64 * self.ctx.delta_rate() + t * self.ctx.omega_rate();
        Complex64::new(-self.ctx.a_inf, 0.0) - a_p0 - rates - xi_const
    }
}

/// λ(n, t) and its sheet.
pub fn dirichlet_eigenvalue(n: i64, t: f64, params: &FiniteGapParams) -> DivisorPoint {
    point_of_fraction(params.fraction(n, t), &params.ctx)
}

/// (â(n,t), b̂(n,t)) from the trace formula and the theta quotient.
pub fn finite_gap_solution(n: i64, t: f64, params: &FiniteGapParams) -> Result<(f64, f64)> {
    let ctx = &params.ctx;
    let lambda = dirichlet_eigenvalue(n, t, params).lambda;
    let b_hat = ctx.spectrum.b - lambda;
    let th = |k: i64| theta_real(params.z_arg(k, t), ctx.tau_im);
    let (tm, t0, tp) = (th(n - 1), th(n), th(n + 1));
    if t0.abs() < 1e-13 || tm <= 0.0 || tp <= 0.0 {
        return Err(Error::Domain(format!(
            "theta quotient degenerate at n = {n}, t = {t}: ({tm:e}, {t0:e}, {tp:e})"
        )));
    }
    let a_hat = ctx.cap * (tm * tp).sqrt() / t0;
    Ok((a_hat, b_hat))
}

/// Finite-gap rows (t, n, â, b̂) over n_lo..=n_hi for each t.
pub fn finite_gap_grid(
    params: &FiniteGapParams,
    n_lo: i64,
    n_hi: i64,
    times: &[f64],
) -> Result<Vec<(f64, i64, f64, f64)>> {
    let mut rows = Vec::with_capacity(times.len() * (n_hi - n_lo + 1).max(0) as usize);
    for &t in times {
        for n in n_lo..=n_hi {
            let (a, b) = finite_gap_solution(n, t, params)?;
            rows.push((t, n, a, b));
        }
    }
    Ok(rows)
}

/// Largest residual of the Toda equations for (â, b̂) by central differences in t.
pub fn toda_residual(params: &FiniteGapParams, ns: &[i64], ts: &[f64], h: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &t in ts {
        for &n in ns {
            let (a_p, b_p) = finite_gap_solution(n, t + h, params)?;
            let (a_m, b_m) = finite_gap_solution(n, t - h, params)?;
            let (a0, b0) = finite_gap_solution(n, t, params)?;
            let (a_prev, _) = finite_gap_solution(n - 1, t, params)?;
            let (_, b_next) = finite_gap_solution(n + 1, t, params)?;
            let da = (a_p - a_m) / (2.0 * h);
            let db = (b_p - b_m) / (2.0 * h);
            let ra = da - a0 * (b_next - b0);
            let rb = db - 2.0 * (a0 * a0 - a_prev * a_prev);
            worst = worst.max(ra.abs()).max(rb.abs());
        }
    }
    Ok(worst)
}
