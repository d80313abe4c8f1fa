use std::fs;
use std::path::Path;

use mirrorlight::experiment::{irradiance_field, run_experiment, ExperimentKind};
use mirrorlight::scenario::{load_config, ScenarioConfig};
use mirrorlight::Error;

fn small(extra: &str) -> ScenarioConfig {
    ScenarioConfig::parse(&format!(
        "grid.n = 12\nmesh.resolution = 48\nblockage.users = 2000\n{extra}"
    ))
    .unwrap()
}

fn rows(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let body = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, body)
}

#[test]
fn same_config_gives_identical_files() {
    let cfg = small("");
    for kind in [
        ExperimentKind::IrradianceField,
        ExperimentKind::BlockageMap,
        ExperimentKind::SnrCdf,
    ] {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let ra = run_experiment(&cfg, kind, a.path()).unwrap();
        let rb = run_experiment(&cfg, kind, b.path()).unwrap();
        assert_eq!(
            fs::read(&ra.data).unwrap(),
            fs::read(&rb.data).unwrap(),
            "{}",
            kind.name()
        );
        assert_eq!(fs::read(&ra.manifest).unwrap(), fs::read(&rb.manifest).unwrap());
    }
}

#[test]
fn rerunning_from_the_manifest_reproduces_the_data() {
    let cfg = small("mirror.radius = 0.2236\nseed = 17");
    for kind in [ExperimentKind::IrradianceField, ExperimentKind::BlockageMap] {
        let first = tempfile::tempdir().unwrap();
        let report = run_experiment(&cfg, kind, first.path()).unwrap();
        let reloaded = load_config(&report.manifest).unwrap();
        assert_eq!(reloaded, cfg);
        let second = tempfile::tempdir().unwrap();
        let again = run_experiment(&reloaded, kind, second.path()).unwrap();
        assert_eq!(fs::read(&report.data).unwrap(), fs::read(&again.data).unwrap());
    }
}

#[test]
fn manifest_records_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small("seed = 5");
    let report = run_experiment(&cfg, ExperimentKind::BlockageMap, dir.path()).unwrap();
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(report.manifest).unwrap()).unwrap();
    assert_eq!(manifest["experiment"], "blockage-map");
    assert_eq!(manifest["seed"], 5);
    assert_eq!(manifest["outputs"][0], "blockage_map.csv");
    assert_eq!(manifest["config"]["grid.n"], "12");
    assert_eq!(manifest["config"]["mesh.resolution"], "48");
}

#[test]
fn irradiance_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small("");
    let report = run_experiment(&cfg, ExperimentKind::IrradianceField, dir.path()).unwrap();
    let (header, body) = rows(&report.data);
    assert_eq!(header, "x_m,y_m,E_los_W_m2,E_nlos_exact_W_m2,E_nlos_approx_W_m2");
    let field = irradiance_field(&cfg).unwrap();
    assert_eq!(body.len(), 144);
    for (k, row) in body.iter().enumerate() {
        let v: Vec<f64> = row.iter().map(|s| s.parse().unwrap()).collect();
        let (x, y) = cfg.room_xy(&field.grid, k);
        assert_eq!(v, vec![x, y, field.los[k], field.nlos_exact[k], field.nlos_approx[k]]);
        assert!((0.0..=4.0).contains(&v[0]) && (0.0..=4.0).contains(&v[1]));
    }
}

#[test]
fn blockage_csv_lists_every_panel() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small("blockage.grid = 10");
    let report = run_experiment(&cfg, ExperimentKind::BlockageMap, dir.path()).unwrap();
    let (header, body) = rows(&report.data);
    assert_eq!(header, "panel_side_m,x_m,y_m,blocked");
    assert_eq!(body.len(), 300);
    let sides: Vec<&str> = body.iter().step_by(100).map(|r| r[0].as_str()).collect();
    assert_eq!(sides, ["0.02", "0.5", "1"]);
    assert!(body.iter().all(|r| r[3] == "0" || r[3] == "1"));
}

#[test]
fn snr_csv_has_a_floor_row_and_monotone_steps() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_experiment(&small(""), ExperimentKind::SnrCdf, dir.path()).unwrap();
    let (header, body) = rows(&report.data);
    assert_eq!(header, "series,snr_db,cdf");
    let mut names: Vec<&str> = body.iter().map(|r| r[0].as_str()).collect();
    names.dedup();
    assert_eq!(names.len(), 18);
    for link in ["nlos", "los+nlos"] {
        for family in ["paraboloid", "semi_sphere", "plane"] {
            for size in ["small", "medium", "large"] {
                assert!(names.contains(&format!("{link}/{family}/{size}").as_str()));
            }
        }
    }
    for name in names {
        let series: Vec<&Vec<String>> = body.iter().filter(|r| r[0] == name).collect();
        assert_eq!(series[0][1], "-inf");
        let cdf: Vec<f64> = series.iter().map(|r| r[2].parse().unwrap()).collect();
        assert!(cdf.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*cdf.last().unwrap(), 1.0);
        let db: Vec<f64> = series[1..].iter().map(|r| r[1].parse().unwrap()).collect();
        assert!(db.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn sweep_tables_have_their_shape() {
    let cfg = ScenarioConfig::parse("grid.n = 6\nmesh.resolution = 24").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let report = run_experiment(&cfg, ExperimentKind::ShadowingSweep, dir.path()).unwrap();
    let (header, body) = rows(&report.data);
    assert_eq!(header, "h_par_m,w_par_m,l_par_m,mesh_n_u,mesh_n_v,probability");
    assert_eq!(body.len(), 3 * 5 * 10);
    assert!(body.iter().all(|r| (0.0..=1.0).contains(&r[5].parse::<f64>().unwrap())));

    let report = run_experiment(&cfg, ExperimentKind::RelativeErrorSweep, dir.path()).unwrap();
    let (header, body) = rows(&report.data);
    assert_eq!(
        header,
        "shape,w_par_m,l_par_m,h_par_m,r_sph_m,mesh_n_u,mesh_n_v,peak_relative_error"
    );
    assert_eq!(body.len(), 3 * 3 * 9 + 10);
    for r in &body {
        match r[0].as_str() {
            "paraboloid" => assert!(r[4].is_empty() && !r[1].is_empty()),
            "semi_sphere" => assert!(r[1].is_empty() && r[2].is_empty() && r[3].is_empty() && !r[4].is_empty()),
            other => panic!("unexpected shape {other}"),
        }
    }
}

#[test]
fn oversized_mirror_is_a_geometry_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = run_experiment(&small("mirror.width = 5"), ExperimentKind::IrradianceField, dir.path()).unwrap_err();
    assert!(matches!(err, Error::Geometry(_)), "{err:?}");
    assert!(!err.is_config());
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let err = run_experiment(&small(""), ExperimentKind::BlockageMap, &blocker.join("out")).unwrap_err();
    assert!(matches!(err, Error::Io { .. }), "{err:?}");
}
