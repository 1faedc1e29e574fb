use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};

use toda_shock::harness::{self, RunConfig};
use toda_shock::io::{self, Manifest};

#[derive(Parser)]
#[command(name = "toda-shock", version, about = "Toda shock-wave laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Plain-text configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in initial data: fig1 or vdo-pure-step.
    #[arg(long)]
    preset: Option<String>,
    /// Run directory for outputs and the manifest.
    #[arg(long, default_value = "run")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the normalized lattice with RK4 and write trajectory.csv.
    Evolve(Common),
    /// Compute scattering data of the initial lattice and write scattering.json.
    Scatter(Common),
    /// Compute genus-one surface data and the sector partition; write surface.json.
    Surface(Common),
    /// Compute the sector phases and their jumps; write phase.json.
    Phase(Common),
    /// Tabulate the finite-gap asymptotics at the configured times; write finite_gap.csv.
    Asymptotics(Common),
    /// Compare direct evolution with the asymptotics; write comparison.{json,csv} and plot.csv.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Add this offset to every sector phase (control runs).
        #[arg(long)]
        delta_offset: Option<f64>,
    },
}

fn load(common: &Common) -> Result<RunConfig> {
    harness::load_config(common.config.as_deref(), common.preset.as_deref())
        .context("loading configuration")
}

fn finish(dir: &Path, command: &str, cfg: &RunConfig, outputs: Vec<String>) -> Result<()> {
    let manifest = Manifest::new(command, &cfg.to_text(), outputs);
    let path = manifest.write(dir)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Evolve(c) => {
            let cfg = load(&c)?;
            io::ensure_dir(&c.out)?;
            let traj = harness::run_evolve(&cfg)?;
            io::write_text(&c.out.join("trajectory.csv"), &io::trajectory_csv(&traj))?;
            finish(&c.out, "evolve", &cfg, vec!["trajectory.csv".into()])
        }
        Command::Scatter(c) => {
            let cfg = load(&c)?;
            io::ensure_dir(&c.out)?;
            let data = harness::run_scatter(&cfg)?;
            io::write_json(&c.out.join("scattering.json"), &data)?;
            finish(&c.out, "scatter", &cfg, vec!["scattering.json".into()])
        }
        Command::Surface(c) => {
            let cfg = load(&c)?;
            io::ensure_dir(&c.out)?;
            let analysis = harness::analyze(&cfg)?;
            io::write_json(&c.out.join("surface.json"), &analysis.surface_summary())?;
            finish(&c.out, "surface", &cfg, vec!["surface.json".into()])
        }
        Command::Phase(c) => {
            let cfg = load(&c)?;
            io::ensure_dir(&c.out)?;
            let analysis = harness::analyze(&cfg)?;
            io::write_json(&c.out.join("phase.json"), &analysis.phases)?;
            finish(&c.out, "phase", &cfg, vec!["phase.json".into()])
        }
        Command::Asymptotics(c) => {
            let cfg = load(&c)?;
            io::ensure_dir(&c.out)?;
            let analysis = harness::analyze(&cfg)?;
            let rows = harness::asymptotic_rows(&analysis, &cfg, cfg.delta_offset)?;
            io::write_text(&c.out.join("finite_gap.csv"), &io::finite_gap_csv(&rows))?;
            finish(&c.out, "asymptotics", &cfg, vec!["finite_gap.csv".into()])
        }
        Command::Compare {
            common: c,
            delta_offset,
        } => {
            let mut cfg = load(&c)?;
            if let Some(d) = delta_offset {
                cfg.delta_offset = d;
            }
            io::ensure_dir(&c.out)?;
            let (analysis, traj, report) = harness::run_compare(&cfg)?;
            io::write_json(&c.out.join("comparison.json"), &report)?;
            io::write_text(&c.out.join("comparison.csv"), &report.csv())?;
            io::write_text(
                &c.out.join("plot.csv"),
                &harness::plot_csv(&analysis, &traj, cfg.delta_offset)?,
            )?;
            for s in &report.sectors {
                println!(
                    "sector {}: xi = {:.6}, delta = {:.9}, slope = {:.6e}, final |b - b_hat| = {:.3e}",
                    s.sector, s.xi_mid, s.delta, s.slope_b, s.final_err_b
                );
            }
            println!("decays: {}", report.decays(1e-2));
            finish(
                &c.out,
                "compare",
                &cfg,
                vec!["comparison.json".into(), "comparison.csv".into(), "plot.csv".into()],
            )
        }
    }
}
