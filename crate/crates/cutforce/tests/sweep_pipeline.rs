//! End-to-end sweep driver checks: CSV format and determinism, row
//! independence, per-row error recording, and plot output.

use cutforce::config::{FeedsSpec, ModelKind, ProcessSpec, RunConfig, ThreadingSpec, ToolSpec};
use cutforce::force::MaterialModel;
use cutforce::sweep::{quiver_segments, render_plots, run_sweep, write_csv, write_normalized_csv};

fn base_config() -> RunConfig {
    RunConfig {
        tool: ToolSpec {
            kappa_r_deg: 62.5,
            epsilon_deg: 55.0,
            nose_radius_mm: 0.4,
            side_rake_deg: 0.0,
            back_rake_deg: 0.0,
        },
        material: MaterialModel::al7075(),
        process: Some(ProcessSpec {
            feeds_mm: FeedsSpec::List(vec![0.2, 0.45, 0.7, 0.9]),
            depths_mm: vec![0.4],
            cutting_speed_m_min: Some(300.0),
            spindle_rpm: None,
            workpiece_radius_mm: None,
        }),
        threading: None,
        models: ModelKind::all(),
        mesh_size_mm: 0.02,
        poisson: 0.3,
        compliance_m_per_n: None,
        normalized: false,
        plots: false,
        output_dir: std::env::temp_dir().join("cutforce-sweep-test"),
        young_segments: 64,
    }
}

#[test]
fn csv_has_exact_columns_and_is_deterministic() {
    let config = base_config();
    let report_a = run_sweep(&config).unwrap();
    let report_b = run_sweep(&config).unwrap();
    let csv_a = write_csv(&report_a);
    let csv_b = write_csv(&report_b);
    assert_eq!(csv_a, csv_b, "rerunning the same config must byte-reproduce the CSV");
    let header = csv_a.lines().next().unwrap();
    assert_eq!(
        header,
        "model,feed_mm,depth_mm,Fx_N,Fy_N,Fz_N,area_mm2,Ne,a_eff_mm,iters,error"
    );
    assert_eq!(csv_a.lines().count(), 1 + 3 * 4);
    for line in csv_a.lines().skip(1) {
        assert_eq!(line.split(',').count(), 11, "bad column count in {line}");
    }
}

#[test]
fn rows_are_independent() {
    let full = run_sweep(&base_config()).unwrap();
    let mut reduced_config = base_config();
    if let Some(p) = reduced_config.process.as_mut() {
        p.feeds_mm = FeedsSpec::List(vec![0.2, 0.7, 0.9]);
    }
    let reduced = run_sweep(&reduced_config).unwrap();
    for r in &reduced.rows {
        let matching = full
            .rows
            .iter()
            .find(|f| f.model == r.model && (f.feed_mm - r.feed_mm).abs() < 1e-12)
            .unwrap();
        let (a, b) = (r.force.unwrap(), matching.force.unwrap());
        assert_eq!(a, b, "removing a sweep point changed another row");
    }
}

#[test]
fn feed_above_max_is_skipped_not_fatal() {
    let mut config = base_config();
    if let Some(p) = config.process.as_mut() {
        p.feeds_mm = FeedsSpec::List(vec![0.4, 5.0]);
    }
    let report = run_sweep(&config).unwrap();
    assert!(!report.all_failed());
    let skipped: Vec<_> = report.rows.iter().filter(|r| r.error.is_some()).collect();
    assert_eq!(skipped.len(), 3, "one skipped feed for each of three models");
    for r in skipped {
        assert!(r.error.as_ref().unwrap().contains("exceeds max feed"));
        assert!(r.force.is_none());
    }
    let csv = write_csv(&report);
    assert!(csv.contains("skipped: feed 5 exceeds max feed"));
}

#[test]
fn industrial_config_tangential_equality() {
    // Linear law, orthogonal insert, edge force on the edge only: the
    // tangential force is the same for all three models at every feed.
    let report = run_sweep(&base_config()).unwrap();
    for feed in [0.2, 0.45, 0.7, 0.9] {
        let fys: Vec<f64> = report
            .rows
            .iter()
            .filter(|r| (r.feed_mm - feed).abs() < 1e-12)
            .map(|r| r.force.unwrap().y)
            .collect();
        assert_eq!(fys.len(), 3);
        for w in fys.windows(2) {
            assert!(
                (w[0] - w[1]).abs() <= 0.01 * w[0].abs(),
                "feed {feed}: Fy spread {:?}",
                fys
            );
        }
    }
}

#[test]
fn threading_sweep_runs() {
    let mut config = base_config();
    config.process = None;
    config.material = MaterialModel::aisi1045();
    config.threading = Some(ThreadingSpec {
        pitch_width_mm: 1.0,
        nose_radius_mm: 0.1,
        steep_flank_deg: 30.0,
        slant_flank_deg: 60.0,
        tooth_height_mm: 1.5,
        a1_mm: 0.1,
        delta_a_mm: vec![0.1, 0.2],
        tooth: 2,
    });
    config.mesh_size_mm = 0.02;
    let report = run_sweep(&config).unwrap();
    assert_eq!(report.rows.len(), 6);
    assert!(report.rows.iter().all(|r| r.error.is_none()));
    // Feed column carries 2w for threading rows.
    assert!(report.rows.iter().all(|r| (r.feed_mm - 2.0).abs() < 1e-12));
}

#[test]
fn plots_are_written_and_quiver_follows_feed() {
    let mut config = base_config();
    config.plots = true;
    if let Some(p) = config.process.as_mut() {
        p.feeds_mm = FeedsSpec::List(vec![0.45]);
    }
    let report = run_sweep(&config).unwrap();
    let art = report.artifacts.as_ref().expect("plot artifacts");
    let out = std::env::temp_dir().join("cutforce-plot-test");
    let written = render_plots(&report, &out).unwrap();
    assert!(written.len() >= 7);
    for p in &written {
        let text = std::fs::read_to_string(p).unwrap();
        match p.extension().and_then(|e| e.to_str()) {
            Some("svg") => assert!(text.starts_with("<svg"), "{} is not an svg", p.display()),
            Some("csv") => assert!(text.starts_with("x_mm,z_mm,gx,gz"), "{}", p.display()),
            other => panic!("unexpected output {other:?}"),
        }
    }

    // Rectangle case: arrows parallel to the feed direction.
    let region = cutforce::geometry::UncutChipRegion::rectangle(2.0, 0.1).unwrap();
    let mesh = cutforce::geometry::triangulate(&region, 0.02).unwrap();
    let field = cutforce::plate_fe::gradient_field(
        &mesh,
        &cutforce::plate_fe::solve_plate(&mesh, 0.3).unwrap(),
    )
    .unwrap();
    let mut parallel = 0usize;
    let mut total = 0usize;
    for (p, g) in quiver_segments(&mesh, &field) {
        // Skip the ends where the free sides bend the field.
        if p.x < 0.2 || p.x > 1.8 {
            continue;
        }
        total += 1;
        if g.z.abs() > 0.98 {
            parallel += 1;
        }
    }
    assert!(parallel as f64 >= 0.95 * total as f64, "{parallel}/{total} arrows parallel to feed");
    let _ = art;
}

#[test]
fn compliance_sweep_records_effective_depth() {
    let mut config = base_config();
    if let Some(p) = config.process.as_mut() {
        p.feeds_mm = FeedsSpec::List(vec![0.6]);
    }
    config.mesh_size_mm = 0.04;
    config.compliance_m_per_n = Some([
        [0.1405e-6, -0.0172e-6, -0.0834e-6],
        [-0.0172e-6, 0.0067e-6, 0.0076e-6],
        [-0.0834e-6, 0.0076e-6, 0.0531e-6],
    ]);
    let report = run_sweep(&config).unwrap();
    assert_eq!(report.rows.len(), 3);
    for r in &report.rows {
        assert!(r.error.is_none(), "{:?}", r.error);
        let a_eff = r.a_eff_mm.unwrap();
        assert!(a_eff != r.depth_mm, "compensation left depth unchanged");
        assert!((a_eff - r.depth_mm).abs() < 0.05, "deflection implausibly large");
        assert!(r.iterations >= 2 && r.iterations <= 10, "iters {}", r.iterations);
    }
}

#[test]
fn tangential_force_monotone_in_feed() {
    // All characteristics are positive and the chip area grows with the
    // feed, so |Fy| must be nondecreasing along a feed sweep.
    let report = run_sweep(&base_config()).unwrap();
    for model in [ModelKind::Curved, ModelKind::Colwell, ModelKind::Young] {
        let mut fy: Vec<(f64, f64)> = report
            .rows
            .iter()
            .filter(|r| r.model == model)
            .map(|r| (r.feed_mm, -r.force.unwrap().y))
            .collect();
        fy.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in fy.windows(2) {
            assert!(
                w[1].1 >= w[0].1 * (1.0 - 1e-9),
                "{model:?}: Fy magnitude dropped from {:?} to {:?}",
                w[0],
                w[1]
            );
        }
    }
}

#[test]
fn oblique_holder_full_pipeline() {
    // Nonzero side and back rake: local frames vary over the chip area and
    // the traced field is the rake-face tilt projected back to the
    // reference plane.
    let mut config = base_config();
    config.tool = ToolSpec {
        kappa_r_deg: 93.0,
        epsilon_deg: 60.0,
        nose_radius_mm: 0.4,
        side_rake_deg: -7.5,
        back_rake_deg: -5.0,
    };
    config.material = MaterialModel::ti6al4v();
    if let Some(p) = config.process.as_mut() {
        p.feeds_mm = FeedsSpec::List(vec![0.1]);
        p.depths_mm = vec![0.3];
    }
    config.mesh_size_mm = 0.04;
    let report = run_sweep(&config).unwrap();
    assert!(report.rows.iter().all(|r| r.error.is_none()));
    let force_of = |m: ModelKind| report.rows.iter().find(|r| r.model == m).unwrap().force.unwrap();
    let curved = force_of(ModelKind::Curved);
    let young = force_of(ModelKind::Young);
    let colwell = force_of(ModelKind::Colwell);
    // Tangential component dominates and carries the cutting sign.
    for f in [curved, young, colwell] {
        assert!(f.y < 0.0 && f.y.abs() > f.x.abs() && f.y.abs() > f.z.abs(), "{f:?}");
    }
    // The straight-segment and curved models stay close; the chord model
    // deviates most in the radial component.
    assert!((curved - young).norm() < 0.05 * curved.norm(), "curved {curved:?} young {young:?}");
    assert!((curved.x - colwell.x).abs() > (curved.x - young.x).abs());
}

#[test]
fn normalized_csv_shape() {
    let mut config = base_config();
    config.material = MaterialModel::Linear { k_uc: 500.0, k_vc: 1000.0, k_ue: 0.0, k_ve: 0.0 };
    config.normalized = true;
    let report = run_sweep(&config).unwrap();
    let csv = write_normalized_csv(&report);
    assert!(csv.starts_with("model,f_over_fmax,Fx_norm,Fy_norm,Fz_norm\n"));
    assert_eq!(csv.lines().count(), 1 + 12);
}
