use std::path::PathBuf;

use solab_core::config::{OutputFormat, SeedProfile};
use solab_core::flow::{self, ErrorKind, ErrorModel};
use solab_core::geometry::RadialProfile;
use solab_core::io::{self, Series};
use solab_core::numerics::linspace;
use solab_core::{RunConfig, SolabError};

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn empty_config_is_the_default() {
    assert_eq!(io::parse_config("").unwrap(), RunConfig::default());
    assert_eq!(io::parse_config("# only a comment\n\n").unwrap(), RunConfig::default());
}

#[test]
fn config_round_trips_through_text() {
    let mut cfg = RunConfig::default();
    cfg.grid.zmax = Some(12.5);
    cfg.flow.seed = SeedProfile::File(PathBuf::from("seed.csv"));
    cfg.error = ErrorModel::custom(0.25, 0.125, 3.0).unwrap();
    cfg.output.formats = vec![OutputFormat::Svg, OutputFormat::Csv];
    cfg.asymptotics.c_theta = 4.0;
    let text = io::format_config(&cfg);
    assert_eq!(io::parse_config(&text).unwrap(), cfg);
    let d = RunConfig::default();
    assert_eq!(io::parse_config(&io::format_config(&d)).unwrap(), d);
}

#[test]
fn every_key_is_accepted() {
    let text = io::format_config(&RunConfig {
        error: ErrorModel::custom(0.1, 0.1, 1.0).unwrap(),
        flow: flow_with_file(),
        ..RunConfig::default()
    });
    for key in io::CONFIG_KEYS {
        assert!(text.contains(&format!("{key} = ")), "format_config omits {key}");
    }
}

fn flow_with_file() -> solab_core::config::FlowConfig {
    let mut f = RunConfig::default().flow;
    f.seed = SeedProfile::File(PathBuf::from("x.csv"));
    f
}

#[test]
fn golden_configs_parse() {
    let cyl = io::parse_config(&golden("cylinder.conf")).unwrap();
    assert_eq!(cyl.flow.seed, SeedProfile::Cylinder);
    assert_eq!(cyl.error.kind, ErrorKind::Zero);
    assert_eq!((cyl.flow.s1, cyl.flow.s0, cyl.grid.n), (100.0, 50.0, 256));
    let neutral = io::parse_config(&golden("neutral.conf")).unwrap();
    assert_eq!(neutral.flow.seed, SeedProfile::NeutralAnsatz);
    assert_eq!(neutral.error.kind, ErrorKind::Default);
    assert!((neutral.flow.s1 - 20f64.exp()).abs() <= 1e-6);
    assert!((neutral.flow.s0 - 0.9 * neutral.flow.s1).abs() <= 1e-6);
    assert_eq!(neutral.spectral.cutoff_exponent, 0.66);
}

#[test]
fn bad_configs_are_rejected() {
    let err = |t: &str| match io::parse_config(t) {
        Err(SolabError::Config(m)) => m,
        other => panic!("expected a config error for {t:?}, got {other:?}"),
    };
    let m = err("grid.nn = 4\nfoo = 1\n");
    assert!(m.contains("grid.nn") && m.contains("foo"));
    assert!(err("grid.n = 4\ngrid.n = 8\n").contains("duplicate"));
    assert!(err("grid.n = 255\n").contains("even"));
    err("grid.n = many\n");
    err("flow.s0 = 200\n");
    err("flow.seed_profile = torus\n");
    err("flow.seed_profile = file\n");
    err("flow.seed_file = a.csv\n");
    err("error.c_rad = 1\n");
    err("error.model = custom\nerror.c_rad = -1\n");
    err("output.formats = csv, pdf\n");
    err("asymptotics.theta = 0.5\n");
    err("just text\n");
}

fn sample_profile(closed: bool) -> RadialProfile {
    if closed {
        let z = linspace(-1.5, 1.5, 101);
        let mut f: Vec<f64> = z.iter().map(|v| (1.5 * 1.5 - v * v).max(0.0).sqrt()).collect();
        f[0] = 0.0;
        f[100] = 0.0;
        RadialProfile::new(z, f, 0.5625, true).unwrap()
    } else {
        let z = flow::symmetric_grid(64, 3.0).unwrap();
        let f = z.iter().map(|v| 2.0 + 0.1 * (1.0 / 3.0) * v.sin()).collect();
        RadialProfile::new(z, f, 2.0 / 3.0, false).unwrap()
    }
}

#[test]
fn snapshot_round_trip_is_exact() {
    for closed in [false, true] {
        let p = sample_profile(closed);
        let text = io::write_snapshot(&p, &ErrorModel::standard()).unwrap();
        let back = io::read_snapshot(&text).unwrap();
        assert!(back.warnings.is_empty(), "{:?}", back.warnings);
        assert_eq!(back.profile, p);
        assert_eq!(io::write_snapshot(&back.profile, &ErrorModel::standard()).unwrap(), text);
    }
}

#[test]
fn tips_carry_nan_curvature() {
    let text = io::write_snapshot(&sample_profile(true), &ErrorModel::zero()).unwrap();
    let first = text.lines().nth(5).unwrap();
    assert_eq!(first.split(',').nth(5), Some("NaN"));
}

#[test]
fn missing_columns_and_versions() {
    let text = io::write_snapshot(&sample_profile(false), &ErrorModel::zero()).unwrap();
    let dropped = text.replace("K_orb", "K_other");
    match io::read_snapshot(&dropped) {
        Err(SolabError::Schema(m)) => assert!(m.contains("K_orb")),
        other => panic!("{other:?}"),
    }
    let future = text.replace("# version = 1", "# version = 2");
    let read = io::read_snapshot(&future).unwrap();
    assert_eq!(read.warnings.len(), 1);
    assert!(read.warnings[0].contains("version 2"));
    let bare: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    assert_eq!(io::read_snapshot(&bare).unwrap().warnings.len(), 2);
    assert!(io::read_snapshot("# version = 1\n").is_err());
    let garbled = text.replacen("e0,", "e0,x", 1);
    assert!(matches!(io::read_snapshot(&garbled), Err(SolabError::Schema(_))));
}

#[test]
fn svg_output_is_deterministic() {
    let series = vec![
        Series {
            label: "a & b".into(),
            points: (0..50).map(|i| (i as f64, (i as f64 * 0.2).sin())).collect(),
        },
        Series {
            label: "flat".into(),
            points: vec![(0.0, 0.5), (49.0, 0.5)],
        },
    ];
    let one = io::svg_plot("t", "x", "y", &series, false).unwrap();
    let two = io::svg_plot("t", "x", "y", &series, false).unwrap();
    assert_eq!(one, two);
    assert!(one.starts_with("<svg") && one.ends_with("</svg>\n"));
    assert!(one.contains("a &amp; b"));
}

#[test]
fn empty_plots_are_skipped() {
    let empty = [Series {
        label: "nothing".into(),
        points: vec![(0.0, f64::NAN), (1.0, -1.0)],
    }];
    assert!(io::svg_plot("t", "x", "y", &empty, true).is_none());
    assert!(io::svg_plot("t", "x", "y", &[], false).is_none());
}

#[test]
fn manifest_lists_files_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::default();
    let b = io::write_file(dir.path(), "b.csv", "x\n").unwrap();
    let a = io::write_file(&dir.path().join("nested"), "a.json", "{}\n").unwrap();
    assert_eq!(std::fs::read_to_string(&a).unwrap(), "{}\n");
    let m = io::manifest("simulate", &cfg, &[b, a]);
    assert_eq!(m.files, vec!["a.json".to_string(), "b.csv".to_string()]);
    assert_eq!(m.tool, "solab");
    let json = io::to_json(&m).unwrap();
    assert!(json.ends_with("}\n"));
    assert_eq!(json, io::to_json(&io::manifest("simulate", &cfg, &[dir.path().join("b.csv"), dir.path().join("nested/a.json")])).unwrap());
}
