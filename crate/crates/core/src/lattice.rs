//! Direct evolution of the Toda lattice on a finite window.
//!
//! Sites outside `n_min..=n_max` are frozen at the background constants, which
//! is exact as long as the disturbance has not reached the window edges.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tridiag;

/// Constant coefficients (a, b) of a background half-lattice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Background {
    pub a: f64,
    pub b: f64,
}

impl Background {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    /// Lower and upper edge of the band [b − 2a, b + 2a].
    pub fn band(&self) -> (f64, f64) {
        (self.b - 2.0 * self.a, self.b + 2.0 * self.a)
    }
}

/// Windowed Jacobi coefficients with steplike backgrounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteplikeLattice {
    pub n_min: i64,
    pub n_max: i64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub bg_left: Background,
    pub bg_right: Background,
    /// Exponential decay rate of the perturbation towards the backgrounds.
    pub rho: f64,
}

impl SteplikeLattice {
    /// Builds a lattice and checks positivity of every stored a(n).
    pub fn new(
        n_min: i64,
        a: Vec<f64>,
        b: Vec<f64>,
        bg_left: Background,
        bg_right: Background,
        rho: f64,
    ) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::InvalidInput(format!(
                "coefficient arrays must be nonempty and equally long ({} vs {})",
                a.len(),
                b.len()
            )));
        }
        if bg_left.a <= 0.0 || bg_right.a <= 0.0 {
            return Err(Error::InvalidInput("background a must be positive".into()));
        }
        let n_max = n_min + a.len() as i64 - 1;
        let lat = Self {
            n_min,
            n_max,
            a,
            b,
            bg_left,
            bg_right,
            rho,
        };
        lat.check_positive()?;
        Ok(lat)
    }

    /// Pure step: a(n), b(n) equal the left background for n < 0 and the right one for n ≥ 0.
    pub fn step(n_min: i64, n_max: i64, bg_left: Background, bg_right: Background) -> Result<Self> {
        if n_max < n_min {
            return Err(Error::InvalidInput("empty window".into()));
        }
        let ns = n_min..=n_max;
        let a = ns
            .clone()
            .map(|n| if n < 0 { bg_left.a } else { bg_right.a })
            .collect();
        let b = ns
            .map(|n| if n < 0 { bg_left.b } else { bg_right.b })
            .collect();
        Self::new(n_min, a, b, bg_left, bg_right, 1.0)
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> {
        self.n_min..=self.n_max
    }

    fn index(&self, n: i64) -> Option<usize> {
        (n >= self.n_min && n <= self.n_max).then(|| (n - self.n_min) as usize)
    }

    /// a(n), using the background constants outside the window.
    pub fn a_at(&self, n: i64) -> f64 {
        match self.index(n) {
            Some(i) => self.a[i],
            None if n < self.n_min => self.bg_left.a,
            None => self.bg_right.a,
        }
    }

    /// b(n), using the background constants outside the window.
    pub fn b_at(&self, n: i64) -> f64 {
        match self.index(n) {
            Some(i) => self.b[i],
            None if n < self.n_min => self.bg_left.b,
            None => self.bg_right.b,
        }
    }

    pub fn set_a(&mut self, n: i64, value: f64) -> Result<()> {
        let i = self
            .index(n)
            .ok_or_else(|| Error::InvalidInput(format!("site {n} outside window")))?;
        if value <= 0.0 {
            return Err(Error::NonPositiveA { n, value });
        }
        self.a[i] = value;
        Ok(())
    }

    pub fn set_b(&mut self, n: i64, value: f64) -> Result<()> {
        let i = self
            .index(n)
            .ok_or_else(|| Error::InvalidInput(format!("site {n} outside window")))?;
        self.b[i] = value;
        Ok(())
    }

    fn check_positive(&self) -> Result<()> {
        for (n, &v) in self.sites().zip(&self.a) {
            if !(v > 0.0) {
                return Err(Error::NonPositiveA { n, value: v });
            }
        }
        Ok(())
    }

    /// Largest deviation of the two window edges from their backgrounds.
    pub fn edge_deviation(&self) -> f64 {
        let first = (self.a[0] - self.bg_left.a).abs() + (self.b[0] - self.bg_left.b).abs();
        let k = self.len() - 1;
        let last = (self.a[k] - self.bg_right.a).abs() + (self.b[k] - self.bg_right.b).abs();
        first.max(last)
    }

    /// True when the backgrounds satisfy a₊ = 1/2, b₊ = 0 and b₋ + 2a₋ < −1.
    pub fn is_normalized(&self) -> bool {
        (self.bg_right.a - 0.5).abs() < 1e-15
            && self.bg_right.b.abs() < 1e-15
            && self.bg_left.b + 2.0 * self.bg_left.a < -1.0
    }

    /// Background step value of b at site n.
    pub fn b_background(&self, n: i64) -> f64 {
        if n < 0 {
            self.bg_left.b
        } else {
            self.bg_right.b
        }
    }
}

/// Affine rescaling mapping general shock backgrounds to a₊ = 1/2, b₊ = 0.
///
/// Returns the transformed lattice, the time scale 2a₊ (normalized time equals
/// `time_scale` times original time) and the energy shift b₊/(2a₊).
pub fn normalize(lat: &SteplikeLattice) -> Result<(SteplikeLattice, f64, f64)> {
    let (_, left_top) = lat.bg_left.band();
    let (right_bottom, _) = lat.bg_right.band();
    if !(left_top < right_bottom) {
        return Err(Error::NotAShock {
            left_top,
            right_bottom,
        });
    }
    let scale = 2.0 * lat.bg_right.a;
    let shift = lat.bg_right.b / scale;
    let map_a = |x: f64| x / scale;
    let map_b = |x: f64| x / scale - shift;
    let out = SteplikeLattice {
        n_min: lat.n_min,
        n_max: lat.n_max,
        a: lat.a.iter().map(|&x| map_a(x)).collect(),
        b: lat.b.iter().map(|&x| map_b(x)).collect(),
        bg_left: Background::new(map_a(lat.bg_left.a), map_b(lat.bg_left.b)),
        bg_right: Background::new(0.5, 0.0),
        rho: lat.rho,
    };
    Ok((out, scale, shift))
}

/// Right-hand side of the Toda system: (da, db).
pub fn toda_rhs(state: &SteplikeLattice) -> (Vec<f64>, Vec<f64>) {
    let mut da = vec![0.0; state.len()];
    let mut db = vec![0.0; state.len()];
    rhs_into(
        &state.a,
        &state.b,
        state.bg_left,
        state.bg_right,
        &mut da,
        &mut db,
    );
    (da, db)
}

fn rhs_into(
    a: &[f64],
    b: &[f64],
    left: Background,
    right: Background,
    da: &mut [f64],
    db: &mut [f64],
) {
    let len = a.len();
    for i in 0..len {
        let b_next = if i + 1 < len { b[i + 1] } else { right.b };
        let a_prev = if i > 0 { a[i - 1] } else { left.a };
        da[i] = a[i] * (b_next - b[i]);
        db[i] = 2.0 * (a[i] * a[i] - a_prev * a_prev);
    }
}

/// Integrator settings for [`evolve`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EvolveOptions {
    pub dt: f64,
    /// Store every `snapshot_stride`-th step (the initial and final states are always kept).
    pub snapshot_stride: usize,
    pub clamp_tol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            dt: 0.005,
            snapshot_stride: 200,
            clamp_tol: 1e-8,
        }
    }
}

/// One stored state of a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Sequence of timestamped states sharing one window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub n_min: i64,
    pub n_max: i64,
    pub bg_left: Background,
    pub bg_right: Background,
    pub rho: f64,
    pub snapshots: Vec<Snapshot>,
}

impl Trajectory {
    pub fn last(&self) -> SteplikeLattice {
        self.state(self.snapshots.len() - 1)
    }

    /// Snapshot `k` as a lattice.
    pub fn state(&self, k: usize) -> SteplikeLattice {
        let s = &self.snapshots[k];
        SteplikeLattice {
            n_min: self.n_min,
            n_max: self.n_max,
            a: s.a.clone(),
            b: s.b.clone(),
            bg_left: self.bg_left,
            bg_right: self.bg_right,
            rho: self.rho,
        }
    }

    /// Snapshot whose time is closest to `t`.
    pub fn at_time(&self, t: f64) -> Option<&Snapshot> {
        self.snapshots.iter().min_by(|x, y| {
            (x.t - t)
                .abs()
                .partial_cmp(&(y.t - t).abs())
                .expect("finite times")
        })
    }
}

/// Minimal window half-width keeping fronts away from the edges up to `t_end`.
pub fn required_window(bg_left: Background, t_end: f64) -> i64 {
    (2.0 * (1.0f64).max(2.0 * bg_left.a) * t_end).ceil() as i64 + 100
}

struct Rk4Workspace {
    k: [(Vec<f64>, Vec<f64>); 4],
    ta: Vec<f64>,
    tb: Vec<f64>,
}

impl Rk4Workspace {
    fn new(len: usize) -> Self {
        let pair = || (vec![0.0; len], vec![0.0; len]);
        Self {
            k: [pair(), pair(), pair(), pair()],
            ta: vec![0.0; len],
            tb: vec![0.0; len],
        }
    }

    fn step(&mut self, a: &mut [f64], b: &mut [f64], left: Background, right: Background, h: f64) {
        let len = a.len();
        let coeffs = [0.0, 0.5, 0.5, 1.0];
        for (stage, &coef) in coeffs.iter().enumerate() {
            if stage == 0 {
                self.ta.copy_from_slice(a);
                self.tb.copy_from_slice(b);
            } else {
                let c = coef * h;
                let (pa, pb) = &self.k[stage - 1];
                for i in 0..len {
                    self.ta[i] = a[i] + c * pa[i];
                    self.tb[i] = b[i] + c * pb[i];
                }
            }
            let (ka, kb) = &mut self.k[stage];
            rhs_into(&self.ta, &self.tb, left, right, ka, kb);
        }
        let w = h / 6.0;
        for i in 0..len {
            a[i] += w * (self.k[0].0[i] + 2.0 * self.k[1].0[i] + 2.0 * self.k[2].0[i] + self.k[3].0[i]);
            b[i] += w * (self.k[0].1[i] + 2.0 * self.k[1].1[i] + 2.0 * self.k[2].1[i] + self.k[3].1[i]);
        }
    }
}

/// Classical fourth-order Runge–Kutta evolution to `t_end`.
///
/// The step count is `ceil(t_end/dt)` with the step shortened to land on `t_end`.
pub fn evolve(state: &SteplikeLattice, t_end: f64, opts: &EvolveOptions) -> Result<Trajectory> {
    if !(opts.dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::InvalidInput("dt must be positive and t_end nonnegative".into()));
    }
    let steps = (t_end / opts.dt - 1e-9).ceil().max(0.0) as usize;
    let h = if steps > 0 { t_end / steps as f64 } else { 0.0 };
    let stride = opts.snapshot_stride.max(1);
    let mut a = state.a.clone();
    let mut b = state.b.clone();
    let mut ws = Rk4Workspace::new(a.len());
    let mut snapshots = vec![Snapshot {
        t: 0.0,
        a: a.clone(),
        b: b.clone(),
    }];
    let edge_base = state.edge_deviation();
    for step in 1..=steps {
        ws.step(&mut a, &mut b, state.bg_left, state.bg_right, h);
        let t = h * step as f64;
        if step % stride == 0 || step == steps {
            let probe = SteplikeLattice {
                a: a.clone(),
                b: b.clone(),
                ..state.clone()
            };
            if let Some((i, &v)) = a.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
                return Err(Error::Instability {
                    t,
                    n: state.n_min + i as i64,
                    value: v,
                });
            }
            let dev = probe.edge_deviation();
            if dev > opts.clamp_tol.max(edge_base * 1.5) {
                return Err(Error::BoundaryContamination {
                    t,
                    deviation: dev,
                    tolerance: opts.clamp_tol,
                });
            }
            snapshots.push(Snapshot {
                t,
                a: a.clone(),
                b: b.clone(),
            });
        }
    }
    Ok(Trajectory {
        n_min: state.n_min,
        n_max: state.n_max,
        bg_left: state.bg_left,
        bg_right: state.bg_right,
        rho: state.rho,
        snapshots,
    })
}

/// Evolves and returns only the snapshots closest to the requested times.
///
/// The times must be nonnegative; they are visited in increasing order and the
/// integration lands exactly on each of them.
pub fn evolve_to_times(state: &SteplikeLattice, times: &[f64], dt: f64, clamp_tol: f64) -> Result<Trajectory> {
    let mut sorted: Vec<f64> = times.to_vec();
    sorted.sort_by(|x, y| x.partial_cmp(y).expect("finite times"));
    let mut current = state.clone();
    let mut t_now = 0.0;
    let mut snapshots = Vec::with_capacity(sorted.len());
    for &t in &sorted {
        let span = t - t_now;
        if span > 0.0 {
            let traj = evolve(
                &current,
                span,
                &EvolveOptions {
                    dt,
                    snapshot_stride: usize::MAX,
                    clamp_tol,
                },
            )?;
            current = traj.last();
        }
        t_now = t;
        snapshots.push(Snapshot {
            t,
            a: current.a.clone(),
            b: current.b.clone(),
        });
    }
    Ok(Trajectory {
        n_min: state.n_min,
        n_max: state.n_max,
        bg_left: state.bg_left,
        bg_right: state.bg_right,
        rho: state.rho,
        snapshots,
    })
}

/// Conservation and isospectrality checks of a state against a reference state.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Σ (b(n) − background step value) over the window.
    pub sum_b_deviation: f64,
    /// Largest change among the 5 lowest and 5 highest eigenvalues of the truncated matrix.
    pub spectrum_drift: f64,
    /// Largest change of truncated-matrix eigenvalues inside the gap (b₋+2a₋, b₊−2a₊).
    pub gap_drift: f64,
}

pub fn sum_b_deviation(state: &SteplikeLattice) -> f64 {
    state
        .sites()
        .zip(&state.b)
        .map(|(n, &b)| b - state.b_background(n))
        .sum()
}

/// Diagnostics of `state` relative to `reference` (usually the initial datum).
pub fn conserved_diagnostics(state: &SteplikeLattice, reference: &SteplikeLattice) -> Diagnostics {
    let extremes = |s: &SteplikeLattice| {
        let m = tridiag::SymTridiag::from_lattice(s);
        let len = s.len();
        let k = 5.min(len / 2);
        let mut v: Vec<f64> = (0..k).map(|i| m.kth_eigenvalue(i)).collect();
        v.extend((len - k..len).map(|i| m.kth_eigenvalue(i)));
        v
    };
    let drift = extremes(state)
        .iter()
        .zip(extremes(reference))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let lo = reference.bg_left.band().1;
    let hi = reference.bg_right.band().0;
    let gap = |s: &SteplikeLattice| tridiag::SymTridiag::from_lattice(s).eigenvalues_in(lo, hi);
    let g_now = gap(state);
    let g_ref = gap(reference);
    let gap_drift = if g_now.len() == g_ref.len() {
        g_now
            .iter()
            .zip(&g_ref)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    Diagnostics {
        sum_b_deviation: sum_b_deviation(state),
        spectrum_drift: drift,
        gap_drift,
    }
}
