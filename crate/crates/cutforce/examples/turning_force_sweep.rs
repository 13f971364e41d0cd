//! Normalized model comparison for a V-shaped insert over the feed range.
//!
//! Reproduces the classical comparison: with a linear cutting law and no
//! edge forces, the normalized force components F / (K_uc * A_max) over
//! f / f_max depend on the chip geometry alone. The three models nearly
//! coincide at small feeds and split apart as the feed approaches the
//! largest value for which subsequent cuts still overlap; the equivalent
//! chord model deviates the most near that limit.

use cutforce::config::{FeedsSpec, ModelKind, ProcessSpec, RunConfig, ToolSpec};
use cutforce::force::MaterialModel;
use cutforce::sweep::{run_sweep, write_csv, write_normalized_csv};

fn main() -> cutforce::Result<()> {
    let n_points = 20;
    let config = RunConfig {
        tool: ToolSpec {
            kappa_r_deg: 60.0,
            epsilon_deg: 60.0,
            nose_radius_mm: 0.2,
            side_rake_deg: 0.0,
            back_rake_deg: 0.0,
        },
        material: MaterialModel::Linear { k_uc: 500.0, k_vc: 1000.0, k_ue: 0.0, k_ve: 0.0 },
        process: Some(ProcessSpec {
            // Filled in below once f_max is known.
            feeds_mm: FeedsSpec::List(vec![]),
            depths_mm: vec![1.0],
            cutting_speed_m_min: None,
            spindle_rpm: None,
            workpiece_radius_mm: None,
        }),
        threading: None,
        models: ModelKind::all(),
        mesh_size_mm: 0.05,
        poisson: 0.3,
        compliance_m_per_n: None,
        normalized: true,
        plots: false,
        output_dir: "out/turning_sweep".into(),
        young_segments: 64,
    };

    let tool = config.tool.build()?;
    let f_max = cutforce::geometry::max_feed(&tool, 1.0);
    println!("f_max = {f_max:.4} mm");
    let feeds: Vec<f64> = (0..n_points)
        .map(|i| f_max * (0.1 + 0.9 * i as f64 / (n_points - 1) as f64))
        .collect();
    let mut config = config;
    if let Some(p) = config.process.as_mut() {
        p.feeds_mm = FeedsSpec::List(feeds);
    }

    let start = std::time::Instant::now();
    let report = run_sweep(&config)?;
    println!("sweep took {:.1} s", start.elapsed().as_secs_f64());

    std::fs::create_dir_all(&config.output_dir)?;
    std::fs::write(config.output_dir.join("sweep.csv"), write_csv(&report))?;
    std::fs::write(config.output_dir.join("sweep_normalized.csv"), write_normalized_csv(&report))?;

    // Pairwise agreement at the smallest feed and the curved-vs-chord
    // discrepancy near f_max.
    let rows = |model: ModelKind| -> Vec<(f64, f64, f64)> {
        report
            .rows
            .iter()
            .filter(|r| r.model == model && r.error.is_none())
            .filter_map(|r| r.normalized.map(|(fr, f)| (fr, f.x, f.z)))
            .collect()
    };
    let curved = rows(ModelKind::Curved);
    let colwell = rows(ModelKind::Colwell);
    let young = rows(ModelKind::Young);

    println!("\n{:>8} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}", "f/fmax", "Fx_cur", "Fx_col", "Fx_yng", "Fz_cur", "Fz_col", "Fz_yng");
    for i in 0..curved.len() {
        println!(
            "{:>8.3} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>9.4}",
            curved[i].0, curved[i].1, colwell[i].1, young[i].1, curved[i].2, colwell[i].2, young[i].2
        );
    }

    let small = 0;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs());
    println!("\nat f/f_max = {:.2}:", curved[small].0);
    println!(
        "  Fx: curved-colwell {:.1}%, curved-young {:.1}%",
        100.0 * rel(curved[small].1, colwell[small].1),
        100.0 * rel(curved[small].1, young[small].1)
    );
    println!(
        "  Fz: curved-colwell {:.1}%, curved-young {:.1}%",
        100.0 * rel(curved[small].2, colwell[small].2),
        100.0 * rel(curved[small].2, young[small].2)
    );

    // Discrepancy near f_max relative to the curved component scale.
    let scale_x = curved.iter().map(|r| r.1.abs()).fold(0.0f64, f64::max);
    let scale_z = curved.iter().map(|r| r.2.abs()).fold(0.0f64, f64::max);
    let mut worst = 0.0f64;
    for i in 0..curved.len() {
        if curved[i].0 < 0.8 {
            continue;
        }
        worst = worst.max((curved[i].1 - colwell[i].1).abs() / scale_x);
        worst = worst.max((curved[i].2 - colwell[i].2).abs() / scale_z);
    }
    println!("max |curved - colwell| near f_max: {:.1}%", 100.0 * worst);
    Ok(())
}
