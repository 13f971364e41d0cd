use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use cutforce::config::{ModelKind, RunConfig};
use cutforce::sweep::{render_plots, run_sweep, write_csv, write_normalized_csv};

/// Batch cutting-force sweeps: load a JSON configuration, run the selected
/// chip models over the feed/depth grid, write CSV tables and SVG plots.
#[derive(Parser)]
#[command(name = "cutforce", version, about)]
struct Cli {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Override the model selection: curved | colwell | young | all.
    #[arg(long)]
    model: Option<String>,

    /// Override the mesh target edge length (mm).
    #[arg(long)]
    mesh_size: Option<f64>,

    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Emit normalized outputs (F / (K_uc A_max) over f / f_max).
    #[arg(long)]
    normalized: bool,

    /// Render SVG plots of the region, mesh, field, streamlines and forces.
    #[arg(long)]
    plots: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> cutforce::Result<ExitCode> {
    let mut config = RunConfig::load(&cli.config)?;
    if let Some(model) = &cli.model {
        config.models = if model == "all" {
            ModelKind::all()
        } else {
            vec![model.parse()?]
        };
    }
    if let Some(mesh_size) = cli.mesh_size {
        config.mesh_size_mm = mesh_size;
    }
    if let Some(out) = cli.out {
        config.output_dir = out;
    }
    config.normalized |= cli.normalized;
    config.plots |= cli.plots;
    config.validate()?;

    let report = run_sweep(&config)?;
    std::fs::create_dir_all(&config.output_dir)?;
    let csv_path = config.output_dir.join("sweep.csv");
    std::fs::write(&csv_path, write_csv(&report))?;
    println!("wrote {}", csv_path.display());
    if config.normalized {
        let path = config.output_dir.join("sweep_normalized.csv");
        std::fs::write(&path, write_normalized_csv(&report))?;
        println!("wrote {}", path.display());
    }
    if config.plots {
        for path in render_plots(&report, &config.output_dir)? {
            println!("wrote {}", path.display());
        }
    }

    let failed = report.rows.iter().filter(|r| r.error.is_some()).count();
    println!(
        "{} rows, {} failed, total wall {:.1} ms",
        report.rows.len(),
        failed,
        report.rows.iter().map(|r| r.wall_ms).sum::<f64>()
    );
    if report.all_failed() {
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}
