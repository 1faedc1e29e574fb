//! Quadrature rules shared by every spectral integral.
//!
//! Gauss–Chebyshev rules absorb inverse square-root endpoint behaviour,
//! Gauss–Legendre rules (nodes from `gauss-quad`) handle smooth real and
//! complex path integrals.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};

type Pairs = Arc<[(f64, f64)]>;

fn legendre_pairs(n: usize) -> Pairs {
    static CACHE: OnceLock<Mutex<HashMap<usize, Pairs>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let rule = GaussLegendre::new(NonZeroUsize::new(n.max(1)).unwrap());
            rule.as_node_weight_pairs().to_vec().into()
        })
        .clone()
}

/// n-point Gauss–Legendre approximation of ∫_a^b f.
pub fn legendre<F: FnMut(f64) -> f64>(a: f64, b: f64, n: usize, mut f: F) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    legendre_pairs(n)
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Composite Gauss–Legendre on `panels` equal panels of [a, b].
pub fn legendre_composite<F: FnMut(f64) -> f64>(
    a: f64,
    b: f64,
    panels: usize,
    n: usize,
    mut f: F,
) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let lo = a + h * k as f64;
            legendre(lo, lo + h, n, &mut f)
        })
        .sum()
}

/// Composite Gauss–Legendre for a complex integrand of a real parameter.
pub fn legendre_complex<F: FnMut(f64) -> Complex64>(
    a: f64,
    b: f64,
    panels: usize,
    n: usize,
    mut f: F,
) -> Complex64 {
    let pairs = legendre_pairs(n);
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..panels {
        let lo = a + h * k as f64;
        let mid = lo + 0.5 * h;
        for &(x, w) in pairs.iter() {
            acc += f(mid + 0.5 * h * x) * (w * 0.5 * h);
        }
    }
    acc
}

/// Gauss–Legendre on [a, b] with panels refined geometrically towards an interior point c.
///
/// Panel edges sit at c ± d·3^k down to d = `finest`; the remaining stretches are split into
/// panels no wider than (b − a)/`panels`.
pub fn legendre_complex_graded<F: FnMut(f64) -> Complex64>(
    a: f64,
    b: f64,
    c: f64,
    finest: f64,
    panels: usize,
    n: usize,
    mut f: F,
) -> Complex64 {
    let mut edges = vec![a, b];
    if c > a && c < b {
        edges.push(c);
        let mut d = finest;
        while d < b - a {
            for e in [c - d, c + d] {
                if e > a && e < b {
                    edges.push(e);
                }
            }
            d *= 3.0;
        }
    }
    let max_width = (b - a) / panels.max(1) as f64;
    let uniform = ((b - a) / max_width).ceil() as usize;
    edges.extend((1..uniform).map(|k| a + max_width * k as f64));
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let pairs = legendre_pairs(n);
    let mut acc = Complex64::new(0.0, 0.0);
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for &(x, wt) in pairs.iter() {
            acc += f(mid + half * x) * (wt * half);
        }
    }
    acc
}

/// Chebyshev nodes of the first kind mapped to [e1, e2], ordered from e2 down to e1.
pub fn chebyshev_nodes(e1: f64, e2: f64, n: usize) -> Vec<f64> {
    let mid = 0.5 * (e1 + e2);
    let half = 0.5 * (e2 - e1);
    (1..=n)
        .map(|k| {
            let theta = (2 * k - 1) as f64 * std::f64::consts::PI / (2 * n) as f64;
            mid + half * theta.cos()
        })
        .collect()
}

/// n-point Gauss–Chebyshev approximation of ∫_{e1}^{e2} f(x) / √((x−e1)(e2−x)) dx.
pub fn chebyshev<F: FnMut(f64) -> f64>(e1: f64, e2: f64, n: usize, mut f: F) -> f64 {
    let sum: f64 = chebyshev_nodes(e1, e2, n).into_iter().map(&mut f).sum();
    std::f64::consts::PI / n as f64 * sum
}

/// Gauss–Chebyshev with node doubling until two successive values agree to `rel_tol`.
pub fn chebyshev_adaptive<F: FnMut(f64) -> f64>(
    e1: f64,
    e2: f64,
    rel_tol: f64,
    mut f: F,
) -> Result<f64> {
    let mut n = 32;
    let mut prev = chebyshev(e1, e2, n, &mut f);
    while n <= 1 << 16 {
        n *= 2;
        let next = chebyshev(e1, e2, n, &mut f);
        if (next - prev).abs() <= rel_tol * next.abs().max(1e-300) || (next - prev).abs() < 1e-15 {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature(format!(
        "Gauss-Chebyshev on [{e1}, {e2}] stalled at {n} nodes"
    )))
}

/// ∫_0^∞ f(v) dv via v = w/(1−w), composite Gauss–Legendre on [0, 1).
///
/// Suitable for integrands decaying at least like v⁻².
pub fn half_line<F: FnMut(f64) -> f64>(mut f: F) -> f64 {
    legendre_composite(0.0, 1.0, 16, 48, |w| {
        if w >= 1.0 {
            return 0.0;
        }
        let one_minus = 1.0 - w;
        f(w / one_minus) / (one_minus * one_minus)
    })
}
