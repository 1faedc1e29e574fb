//! Run configuration, presets and the evolve → scatter → surface → phase → compare pipeline.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::finitegap::{finite_gap_solution, FiniteGapParams};
use crate::io::{self, fmt_f64};
use crate::lattice::{self, Background, SteplikeLattice, Trajectory};
use crate::phase::{self, PhaseInputs, PhaseReport};
use crate::scattering::{self, ScatterOptions, ScatteringData};
use crate::surface::{self, SurfaceContext, TwoBandSpectrum, XiPartition};

/// Named initial data shipped with the tool.
pub const PRESETS: &[&str] = &["fig1", "vdo-pure-step"];

/// Everything a pipeline run needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub n_min: i64,
    pub n_max: i64,
    pub bg_left: Background,
    pub bg_right: Background,
    /// Site overrides of a(n) on top of the pure step.
    pub a_overrides: Vec<(i64, f64)>,
    /// Site overrides of b(n) on top of the pure step.
    pub b_overrides: Vec<(i64, f64)>,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_stride: usize,
    pub epsilon: f64,
    pub t_list: Vec<f64>,
    pub tol_res: f64,
    pub chi_nodes: usize,
    pub clamp_tol: f64,
    /// Added to every Δ_j in comparisons (0 for genuine runs).
    pub delta_offset: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            preset: None,
            n_min: -450,
            n_max: 450,
            bg_left: Background::new(0.5, -4.0),
            bg_right: Background::new(0.5, 0.0),
            a_overrides: Vec::new(),
            b_overrides: Vec::new(),
            dt: 0.005,
            t_end: 200.0,
            snapshot_stride: 2000,
            epsilon: 0.01,
            t_list: vec![50.0, 100.0, 150.0, 200.0],
            tol_res: 1e-6,
            chi_nodes: 256,
            clamp_tol: 1e-8,
            delta_offset: 0.0,
        }
    }
}

impl RunConfig {
    /// Built-in configuration by name.
    pub fn preset(name: &str) -> Result<Self> {
        let mut cfg = Self {
            preset: Some(name.to_string()),
            ..Self::default()
        };
        match name {
            "fig1" => {
                cfg.b_overrides = vec![(0, -1.7)];
            }
            "vdo-pure-step" => {
                // a = 1/2 and b(n) = 2·sgn(n); normalization shifts this to the fig1 backgrounds.
                cfg.bg_left = Background::new(0.5, -2.0);
                cfg.bg_right = Background::new(0.5, 2.0);
                cfg.b_overrides = vec![(0, 0.0)];
            }
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown preset '{other}' (known: {})",
                    PRESETS.join(", ")
                )))
            }
        }
        Ok(cfg)
    }

    /// Parses `key = value` lines; `[a]`/`[b]` sections hold `n value` overrides.
    ///
    /// A `preset` key, if present, must come first and supplies the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut section: Option<char> = None;
        let mut seen_other = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Config { line: line_no, msg };
            if line.starts_with('[') {
                section = match line {
                    "[a]" => Some('a'),
                    "[b]" => Some('b'),
                    _ => return Err(err(format!("unknown section {line}"))),
                };
                seen_other = true;
                continue;
            }
            if let Some(which) = section {
                let mut it = line.split_whitespace();
                let (Some(n), Some(v), None) = (it.next(), it.next(), it.next()) else {
                    return Err(err("expected 'n value'".into()));
                };
                let n: i64 = n.parse().map_err(|_| err(format!("bad site index '{n}'")))?;
                let v: f64 = v.parse().map_err(|_| err(format!("bad value '{v}'")))?;
                let list = if which == 'a' {
                    &mut cfg.a_overrides
                } else {
                    &mut cfg.b_overrides
                };
                list.retain(|&(m, _)| m != n);
                list.push((n, v));
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(err(format!("expected 'key = value', got '{line}'")));
            };
            let (key, value) = (key.trim(), value.trim());
            let nums = || -> Result<Vec<f64>> {
                value
                    .split_whitespace()
                    .map(|w| w.parse::<f64>().map_err(|_| err(format!("bad number '{w}'"))))
                    .collect()
            };
            let one = || -> Result<f64> {
                let v = nums()?;
                if v.len() != 1 {
                    return Err(err(format!("{key} takes one value")));
                }
                Ok(v[0])
            };
            match key {
                "preset" => {
                    if seen_other {
                        return Err(err("preset must precede other keys".into()));
                    }
                    cfg = Self::preset(value).map_err(|e| err(e.to_string()))?;
                }
                "window" => {
                    let v = nums()?;
                    if v.len() != 2 || v[0].fract() != 0.0 || v[1].fract() != 0.0 || v[0] >= v[1] {
                        return Err(err("window takes two increasing integers".into()));
                    }
                    cfg.n_min = v[0] as i64;
                    cfg.n_max = v[1] as i64;
                }
                "backgrounds" => {
                    let v = nums()?;
                    if v.len() != 4 {
                        return Err(err("backgrounds takes a_left b_left a_right b_right".into()));
                    }
                    cfg.bg_left = Background::new(v[0], v[1]);
                    cfg.bg_right = Background::new(v[2], v[3]);
                }
                "dt" => cfg.dt = one()?,
                "t_end" => cfg.t_end = one()?,
                "snapshot_stride" => {
                    let v = one()?;
                    if v < 1.0 || v.fract() != 0.0 {
                        return Err(err("snapshot_stride must be a positive integer".into()));
                    }
                    cfg.snapshot_stride = v as usize;
                }
                "epsilon" => cfg.epsilon = one()?,
                "t_list" => cfg.t_list = nums()?,
                "tol_res" => cfg.tol_res = one()?,
                "chi_nodes" => cfg.chi_nodes = one()? as usize,
                "clamp_tol" => cfg.clamp_tol = one()?,
                "delta_offset" => cfg.delta_offset = one()?,
                other => return Err(err(format!("unknown key '{other}'"))),
            }
            seen_other = true;
        }
        cfg.a_overrides.sort_by_key(|&(n, _)| n);
        cfg.b_overrides.sort_by_key(|&(n, _)| n);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidInput(msg.to_string()));
        if !(self.dt > 0.0) {
            return bad("dt must be positive");
        }
        if !(self.t_end > 0.0) {
            return bad("t_end must be positive");
        }
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        if self.t_list.iter().any(|&t| !(t > 0.0)) {
            return bad("t_list entries must be positive");
        }
        if self.chi_nodes < 16 {
            return bad("chi_nodes must be at least 16");
        }
        for &(n, _) in self.a_overrides.iter().chain(&self.b_overrides) {
            if n <= self.n_min || n >= self.n_max {
                return Err(Error::InvalidInput(format!(
                    "override at n = {n} must lie strictly inside the window"
                )));
            }
        }
        Ok(())
    }

    /// Canonical text form; parsing it reproduces the configuration.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
        if let Some(p) = &self.preset {
            let _ = writeln!(s, "preset = {p}");
        }
        let _ = writeln!(s, "window = {} {}", self.n_min, self.n_max);
        let _ = writeln!(
            s,
            "backgrounds = {:?} {:?} {:?} {:?}",
            self.bg_left.a, self.bg_left.b, self.bg_right.a, self.bg_right.b
        );
        let _ = writeln!(s, "dt = {:?}", self.dt);
        let _ = writeln!(s, "t_end = {:?}", self.t_end);
        let _ = writeln!(s, "snapshot_stride = {}", self.snapshot_stride);
        let _ = writeln!(s, "epsilon = {:?}", self.epsilon);
        let _ = writeln!(s, "t_list = {}", join(&self.t_list));
        let _ = writeln!(s, "tol_res = {:?}", self.tol_res);
        let _ = writeln!(s, "chi_nodes = {}", self.chi_nodes);
        let _ = writeln!(s, "clamp_tol = {:?}", self.clamp_tol);
        let _ = writeln!(s, "delta_offset = {:?}", self.delta_offset);
        for (name, list) in [("a", &self.a_overrides), ("b", &self.b_overrides)] {
            if !list.is_empty() {
                let _ = writeln!(s, "[{name}]");
                let mut sorted = list.clone();
                sorted.sort_by_key(|&(n, _)| n);
                for (n, v) in sorted {
                    let _ = writeln!(s, "{n} {v:?}");
                }
            }
        }
        s
    }

    /// Initial lattice in the original (unnormalized) variables.
    pub fn initial_lattice(&self) -> Result<SteplikeLattice> {
        let mut lat = SteplikeLattice::step(self.n_min, self.n_max, self.bg_left, self.bg_right)?;
        for &(n, v) in &self.a_overrides {
            lat.set_a(n, v)?;
        }
        for &(n, v) in &self.b_overrides {
            lat.set_b(n, v)?;
        }
        Ok(lat)
    }
}

/// Normalized initial data together with the scale factors of the normalization.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub lattice: SteplikeLattice,
    pub time_scale: f64,
    pub energy_shift: f64,
}

pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    let raw = cfg.initial_lattice()?;
    let (lattice, time_scale, energy_shift) = lattice::normalize(&raw)?;
    let half_width = lattice::required_window(lattice.bg_left, cfg.t_end) / 2;
    if (cfg.n_max - cfg.n_min) / 2 < half_width {
        log::warn!(
            "window [{}, {}] is narrower than the recommended half-width {half_width}",
            cfg.n_min,
            cfg.n_max
        );
    }
    Ok(Prepared {
        lattice,
        time_scale,
        energy_shift,
    })
}

/// Direct evolution of the normalized lattice to t_end with snapshots every `snapshot_stride` steps.
pub fn run_evolve(cfg: &RunConfig) -> Result<Trajectory> {
    let prep = prepare(cfg)?;
    lattice::evolve(
        &prep.lattice,
        cfg.t_end,
        &lattice::EvolveOptions {
            dt: cfg.dt,
            snapshot_stride: cfg.snapshot_stride,
            clamp_tol: cfg.clamp_tol,
        },
    )
}

pub fn run_scatter(cfg: &RunConfig) -> Result<ScatteringData> {
    let prep = prepare(cfg)?;
    scattering::scatter(
        &prep.lattice,
        &ScatterOptions {
            chi_nodes: cfg.chi_nodes,
            tol_res: cfg.tol_res,
            ..ScatterOptions::default()
        },
    )
}

/// Surface data together with the sector partition induced by the gap eigenvalues.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfaceSummary {
    pub context: SurfaceContext,
    pub delta_rate: f64,
    pub omega_rate: f64,
    pub partition: XiPartition,
}

/// All analysis products of one configuration.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub prepared: Prepared,
    pub scattering: ScatteringData,
    pub context: SurfaceContext,
    pub partition: XiPartition,
    pub inputs: PhaseInputs,
    pub phases: PhaseReport,
}

impl Analysis {
    pub fn surface_summary(&self) -> SurfaceSummary {
        SurfaceSummary {
            context: self.context.clone(),
            delta_rate: self.context.delta_rate(),
            omega_rate: self.context.omega_rate(),
            partition: self.partition.clone(),
        }
    }

    /// Finite-gap parameters for sector j (1-based), shifted by `delta_offset`.
    pub fn params(&self, j: usize, delta_offset: f64) -> FiniteGapParams {
        FiniteGapParams::new(self.context.clone(), self.phases.sectors[j - 1].delta + delta_offset)
    }
}

pub fn analyze(cfg: &RunConfig) -> Result<Analysis> {
    let prepared = prepare(cfg)?;
    let scattering = scattering::scatter(
        &prepared.lattice,
        &ScatterOptions {
            chi_nodes: cfg.chi_nodes,
            tol_res: cfg.tol_res,
            ..ScatterOptions::default()
        },
    )?;
    let spectrum = TwoBandSpectrum::new(prepared.lattice.bg_left.a, prepared.lattice.bg_left.b)?;
    let context = SurfaceContext::new(spectrum)?;
    let gap_z = scattering.gap_z();
    let partition = surface::xi_partition(&context, &gap_z, cfg.epsilon)?;
    let sectors = gap_z.len() + 1;
    let width = context.xi_upper - context.xi_lower;
    if cfg.epsilon >= width / (2.0 * (sectors as f64 + 1.0)) {
        log::warn!("epsilon = {} may empty some sectors", cfg.epsilon);
    }
    let inputs = PhaseInputs::from_scattering(&scattering, spectrum, cfg.epsilon)?;
    let phases = phase::phase_report(&inputs, &partition)?;
    Ok(Analysis {
        prepared,
        scattering,
        context,
        partition,
        inputs,
        phases,
    })
}

/// Finite-gap rows for every (t, n) of the window whose ray n/t falls in a trimmed sector.
pub fn asymptotic_rows(analysis: &Analysis, cfg: &RunConfig, delta_offset: f64) -> Result<Vec<(f64, i64, f64, f64)>> {
    let params: Vec<FiniteGapParams> = (1..=analysis.partition.intervals.len())
        .map(|j| analysis.params(j, delta_offset))
        .collect();
    let mut rows = Vec::new();
    for &t in &cfg.t_list {
        for n in cfg.n_min..=cfg.n_max {
            if let Some(j) = analysis.partition.sector_of(n as f64 / t) {
                let (a, b) = finite_gap_solution(n, t, &params[j - 1])?;
                rows.push((t, n, a, b));
            }
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub sector: usize,
    pub t: f64,
    pub n: i64,
    pub xi: f64,
    pub b_direct: f64,
    pub b_hat: f64,
    pub a_direct: f64,
    pub a_hat: f64,
    pub err_b: f64,
    pub err_a: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorFit {
    pub sector: usize,
    pub xi_mid: f64,
    pub delta: f64,
    /// Least-squares slope of log |b − b̂| against t.
    pub slope_b: f64,
    pub slope_a: f64,
    /// Fraction of consecutive t-pairs over which |b − b̂| decreased.
    pub decreasing_fraction: f64,
    pub final_err_b: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub delta_offset: f64,
    pub rows: Vec<ComparisonRow>,
    pub sectors: Vec<SectorFit>,
}

impl ComparisonReport {
    /// Decay criterion: in every sector a strict majority of consecutive t-steps
    /// decrease the error, the log-error slope is negative and the final error is
    /// below `final_tol`.
    pub fn decays(&self, final_tol: f64) -> bool {
        !self.sectors.is_empty()
            && self.sectors.iter().all(|s| {
                s.decreasing_fraction > 0.5 && s.slope_b < 0.0 && s.final_err_b < final_tol
            })
    }

    pub fn csv(&self) -> String {
        io::csv_text(
            &["sector", "t", "n", "xi", "b_direct", "b_hat", "a_direct", "a_hat", "err_b", "err_a"],
            self.rows.iter().map(|r| {
                vec![
                    r.sector.to_string(),
                    fmt_f64(r.t),
                    r.n.to_string(),
                    fmt_f64(r.xi),
                    fmt_f64(r.b_direct),
                    fmt_f64(r.b_hat),
                    fmt_f64(r.a_direct),
                    fmt_f64(r.a_hat),
                    fmt_f64(r.err_b),
                    fmt_f64(r.err_a),
                ]
            }),
        )
    }
}

/// Least-squares slope of y against x.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return f64::NAN;
    }
    sxy / sxx
}

/// Compares a trajectory with the finite-gap asymptotics at the sector midpoints.
pub fn compare_with(
    analysis: &Analysis,
    traj: &Trajectory,
    t_list: &[f64],
    delta_offset: f64,
) -> Result<ComparisonReport> {
    let nsec = analysis.partition.intervals.len();
    let jobs: Vec<(usize, f64)> = (1..=nsec)
        .flat_map(|j| t_list.iter().map(move |&t| (j, t)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(j, t)| -> Result<ComparisonRow> {
            let xi_mid = analysis.partition.midpoint(j);
            let n = (xi_mid * t).round() as i64;
            let snap = traj
                .at_time(t)
                .filter(|s| (s.t - t).abs() < 1e-9)
                .ok_or_else(|| Error::InvalidInput(format!("no snapshot at t = {t}")))?;
            if n < traj.n_min || n > traj.n_max {
                return Err(Error::WindowTooSmall(format!("site {n} outside the window at t = {t}")));
            }
            let k = (n - traj.n_min) as usize;
            let params = analysis.params(j, delta_offset);
            let (a_hat, b_hat) = finite_gap_solution(n, t, &params)?;
            let (a_direct, b_direct) = (snap.a[k], snap.b[k]);
            Ok(ComparisonRow {
                sector: j,
                t,
                n,
                xi: n as f64 / t,
                b_direct,
                b_hat,
                a_direct,
                a_hat,
                err_b: (b_direct - b_hat).abs(),
                err_a: (a_direct - a_hat).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut sectors = Vec::with_capacity(nsec);
    for j in 1..=nsec {
        let mine: Vec<&ComparisonRow> = rows.iter().filter(|r| r.sector == j).collect();
        let ts: Vec<f64> = mine.iter().map(|r| r.t).collect();
        let lb: Vec<f64> = mine.iter().map(|r| r.err_b.max(1e-300).ln()).collect();
        let la: Vec<f64> = mine.iter().map(|r| r.err_a.max(1e-300).ln()).collect();
        let pairs = mine.len().saturating_sub(1);
        let dec = mine.windows(2).filter(|w| w[1].err_b < w[0].err_b).count();
        sectors.push(SectorFit {
            sector: j,
            xi_mid: analysis.partition.midpoint(j),
            delta: analysis.phases.sectors[j - 1].delta + delta_offset,
            slope_b: ls_slope(&ts, &lb),
            slope_a: ls_slope(&ts, &la),
            decreasing_fraction: if pairs == 0 { 0.0 } else { dec as f64 / pairs as f64 },
            final_err_b: mine.last().map(|r| r.err_b).unwrap_or(f64::NAN),
        });
    }
    Ok(ComparisonReport {
        delta_offset,
        rows,
        sectors,
    })
}

/// Full pipeline: evolve to every t in the list and compare at the sector midpoints.
pub fn run_compare(cfg: &RunConfig) -> Result<(Analysis, Trajectory, ComparisonReport)> {
    let analysis = analyze(cfg)?;
    let traj = lattice::evolve_to_times(&analysis.prepared.lattice, &cfg.t_list, cfg.dt, cfg.clamp_tol)?;
    let report = compare_with(&analysis, &traj, &cfg.t_list, cfg.delta_offset)?;
    Ok((analysis, traj, report))
}

/// Rows (t, n, b, b̂) for overlay plots; b̂ is empty outside the trimmed sectors.
pub fn plot_csv(analysis: &Analysis, traj: &Trajectory, delta_offset: f64) -> Result<String> {
    let params: Vec<FiniteGapParams> = (1..=analysis.partition.intervals.len())
        .map(|j| analysis.params(j, delta_offset))
        .collect();
    let mut rows = Vec::new();
    for snap in &traj.snapshots {
        for (k, n) in (traj.n_min..=traj.n_max).enumerate() {
            let b_hat = if snap.t > 0.0 {
                match analysis.partition.sector_of(n as f64 / snap.t) {
                    Some(j) => fmt_f64(finite_gap_solution(n, snap.t, &params[j - 1])?.1),
                    None => String::new(),
                }
            } else {
                String::new()
            };
            rows.push(vec![fmt_f64(snap.t), n.to_string(), fmt_f64(snap.b[k]), b_hat]);
        }
    }
    Ok(io::csv_text(&["t", "n", "b", "b_hat"], rows))
}

/// Loads a configuration from an optional file and an optional preset name.
///
/// When both are given, the file is applied on top of the preset.
pub fn load_config(path: Option<&Path>, preset: Option<&str>) -> Result<RunConfig> {
    let mut text = String::new();
    if let Some(p) = preset {
        let _ = writeln!(text, "preset = {p}");
    }
    if let Some(path) = path {
        let body = io::read_text(path)?;
        if preset.is_some() && body.lines().any(|l| l.trim_start().starts_with("preset")) {
            return Err(Error::InvalidInput(
                "config file sets a preset and --preset was also given".into(),
            ));
        }
        text.push_str(&body);
    }
    if text.is_empty() {
        return Err(Error::InvalidInput("either a config file or --preset is required".into()));
    }
    let mut cfg = RunConfig::parse(&text)?;
    if cfg.preset.is_none() {
        cfg.preset = preset.map(str::to_string);
    }
    Ok(cfg)
}
