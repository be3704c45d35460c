use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ucsk::constellation::ConstellationDoc;
use ucsk::linksim::{CurveKind, SnrCurve};

fn ucsk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ucsk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(out: &str, key: &str) -> String {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no {key} in {out}"))
        .to_string()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&ucsk(&[])), 1);
    assert_eq!(code(&ucsk(&["design", "--out", "x.json"])), 1);
    assert_eq!(
        code(&ucsk(&["design", "--preset", "4", "--out", "x.json"])),
        1
    );
    assert_eq!(
        code(&ucsk(&[
            "ser",
            "--constellation",
            "table1-t1o1",
            "--snr",
            "0:0:3",
            "--out",
            "x.csv"
        ])),
        1
    );
    assert_eq!(
        code(&ucsk(&[
            "rate", "--scheme", "ook", "--snr", "0:1:3", "--out", "x.csv"
        ])),
        1
    );
    assert_eq!(code(&ucsk(&["--help"])), 0);
    assert_eq!(code(&ucsk(&["--version"])), 0);
}

#[test]
fn too_few_symbols_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = ucsk(&[
        "ser",
        "--constellation",
        "optimized-3",
        "--snr",
        "0:1:1",
        "--symbols",
        "100",
        "--out",
        &p(dir.path(), "s.csv"),
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn design_preset_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path(), "d.json");
    let o = ucsk(&["design", "--preset", "1", "--out", &out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let d: f64 = field(&stdout(&o), "d_min").parse().unwrap();
    assert!((0.2695..=0.2807).contains(&d), "{d}");
    let doc = ConstellationDoc::read(&out).unwrap();
    assert!((doc.d_min - d).abs() < 1e-6);
    assert!(Path::new(&format!("{out}.manifest.json")).exists());

    let v = ucsk(&["validate", "--constellation", &out]);
    assert_eq!(code(&v), 0);
    assert_eq!(field(&stdout(&v), "centroid_check"), "ok");
    assert_eq!(field(&stdout(&v), "x_inside"), "yes");
}

#[test]
fn design_degenerate_and_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let o = ucsk(&[
        "design",
        "--target-radius",
        "0",
        "--target-center",
        "0.1355,0.03988",
        "--starts",
        "8",
        "--out",
        &p(dir.path(), "a.json"),
    ]);
    assert_eq!(code(&o), 0);
    let d: f64 = field(&stdout(&o), "d_min").parse().unwrap();
    assert!(d < 1e-3);
    let o = ucsk(&[
        "design",
        "--target-center",
        "2,2",
        "--target-radius",
        "0.05",
        "--out",
        &p(dir.path(), "b.json"),
    ]);
    assert_eq!(code(&o), 2);
    let o = ucsk(&[
        "design",
        "--target-center",
        "0.15,0.15",
        "--target-radius",
        "-1",
        "--out",
        &p(dir.path(), "c.json"),
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn validate_fixtures_and_bad_files() {
    let o = ucsk(&["validate", "--constellation", "table1-t3o1"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!((field(&s, "d_min").parse::<f64>().unwrap() - 0.0936).abs() < 1e-3);
    assert_eq!(field(&s, "min_pair"), "X-B");
    assert_eq!(field(&s, "x_inside"), "yes");

    let o = ucsk(&["validate", "--constellation", "table1-t1o2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(field(&stdout(&o), "centroid_check"), "MISMATCH");

    let dir = tempfile::tempdir().unwrap();
    let json = ucsk::constellation::table1_row("table1-t2o1")
        .unwrap()
        .document()
        .to_json();
    let trunc = p(dir.path(), "t.json");
    std::fs::write(&trunc, &json[..json.len() / 3]).unwrap();
    assert_eq!(code(&ucsk(&["validate", "--constellation", &trunc])), 3);
    assert_eq!(
        code(&ucsk(&[
            "validate",
            "--constellation",
            &p(dir.path(), "missing.json")
        ])),
        3
    );
    // Out-of-disk X against another preset is a soft violation.
    let o = ucsk(&[
        "validate",
        "--constellation",
        "table1-t1o1",
        "--preset",
        "3",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(field(&stdout(&o), "x_inside"), "no");
}

#[test]
fn ser_outputs_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path(), "s.csv");
    let o = ucsk(&[
        "ser",
        "--constellation",
        "optimized-2",
        "--water",
        "seawater",
        "--distance",
        "10",
        "--snr",
        "0:6:24",
        "--symbols",
        "20000",
        "--seed",
        "3",
        "--out",
        &out,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let ser = SnrCurve::read(&out, CurveKind::Ser, None).unwrap();
    let ub = SnrCurve::read(p(dir.path(), "s.ub.csv"), CurveKind::UnionBound, None).unwrap();
    assert_eq!(ser.points.len(), 5);
    assert_eq!(ser.seed, 3);
    assert_eq!(ser.n, 20_000);
    assert_eq!(ser.config_sha, ub.config_sha);
    assert_eq!(ser.config_sha.len(), 64);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{out}.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["subcommand"], "ser");
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn ser_noiseless_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path(), "s.csv");
    assert_eq!(
        code(&ucsk(&[
            "ser",
            "--constellation",
            "optimized-1",
            "--snr",
            "200:1:200",
            "--symbols",
            "10000",
            "--out",
            &out
        ])),
        0
    );
    let ser = SnrCurve::read(&out, CurveKind::Ser, None).unwrap();
    assert_eq!(ser.values(), vec![0.0]);
}

#[test]
fn ser_rejects_unproducible_constellations() {
    let dir = tempfile::tempdir().unwrap();
    let o = ucsk(&[
        "ser",
        "--constellation",
        "table1-t1o1",
        "--snr",
        "0:3:6",
        "--out",
        &p(dir.path(), "s.csv"),
    ]);
    assert_eq!(code(&o), 2);
    let o = ucsk(&[
        "ser",
        "--constellation",
        "optimized-1",
        "--water",
        &p(dir.path(), "none.csv"),
        "--snr",
        "0:3:6",
        "--out",
        &p(dir.path(), "s.csv"),
    ]);
    assert_eq!(code(&o), 3);
    let o = ucsk(&[
        "ser",
        "--constellation",
        "optimized-1",
        "--snr",
        "0:3:6",
        "--out",
        &p(&dir.path().join("no/such/dir"), "s.csv"),
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn custom_water_table() {
    let dir = tempfile::tempdir().unwrap();
    let water = p(dir.path(), "w.csv");
    std::fs::write(
        &water,
        "wavelength_nm,a_per_m,b_per_m\n460,0.02,0.0\n550,0.07,0.0\n700,0.6,0.0\n",
    )
    .unwrap();
    let out = p(dir.path(), "r.csv");
    let o = ucsk(&[
        "rate",
        "--scheme",
        "ook",
        "--wavelength",
        "550",
        "--water",
        &water,
        "--snr",
        "0:5:10",
        "--samples",
        "10000",
        "--out",
        &out,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::write(&water, "wavelength_nm,a_per_m,b_per_m\n460,0.02,0.0\n").unwrap();
    let o = ucsk(&[
        "rate",
        "--scheme",
        "ook",
        "--wavelength",
        "460",
        "--water",
        &water,
        "--snr",
        "0:5:10",
        "--out",
        &out,
    ]);
    assert_eq!(code(&o), 2);
    std::fs::write(&water, "wavelength_nm,a_per_m,b_per_m\n460,zz,0.0\n").unwrap();
    let o = ucsk(&[
        "rate",
        "--scheme",
        "ook",
        "--wavelength",
        "460",
        "--water",
        &water,
        "--snr",
        "0:5:10",
        "--out",
        &out,
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn rate_caps() {
    let dir = tempfile::tempdir().unwrap();
    let u = p(dir.path(), "u.csv");
    assert_eq!(
        code(&ucsk(&[
            "rate",
            "--scheme",
            "ucsk",
            "--constellation",
            "optimized-3",
            "--snr",
            "40:10:60",
            "--samples",
            "10000",
            "--out",
            &u
        ])),
        0
    );
    let c = SnrCurve::read(&u, CurveKind::Rate, Some(2e8)).unwrap();
    assert!(c.values().iter().all(|v| *v > 1.99e8), "{:?}", c.values());
    let k = p(dir.path(), "k.csv");
    assert_eq!(
        code(&ucsk(&[
            "rate",
            "--scheme",
            "ook",
            "--wavelength",
            "700",
            "--snr",
            "0:10:60",
            "--samples",
            "10000",
            "--out",
            &k
        ])),
        0
    );
    let c = SnrCurve::read(&k, CurveKind::Rate, Some(1e8)).unwrap();
    assert!(c.values().iter().all(|v| *v <= 1e8));
    assert_eq!(
        code(&ucsk(&[
            "rate",
            "--scheme",
            "ook",
            "--wavelength",
            "460",
            "--constellation",
            "optimized-1",
            "--snr",
            "0:1:1",
            "--out",
            &k
        ])),
        1
    );
    assert_eq!(
        code(&ucsk(&[
            "rate", "--scheme", "ucsk", "--snr", "0:1:1", "--out", &k
        ])),
        1
    );
}

#[test]
fn rate_blue_far_beats_red_near() {
    let dir = tempfile::tempdir().unwrap();
    let blue = p(dir.path(), "b.csv");
    let red = p(dir.path(), "r.csv");
    let grid = "0:5:20";
    assert_eq!(
        code(&ucsk(&[
            "rate",
            "--scheme",
            "ook",
            "--wavelength",
            "460",
            "--distance",
            "50",
            "--snr",
            grid,
            "--samples",
            "20000",
            "--out",
            &blue
        ])),
        0
    );
    assert_eq!(
        code(&ucsk(&[
            "rate",
            "--scheme",
            "ook",
            "--wavelength",
            "700",
            "--distance",
            "10",
            "--snr",
            grid,
            "--samples",
            "20000",
            "--out",
            &red
        ])),
        0
    );
    let b = SnrCurve::read(&blue, CurveKind::Rate, Some(1e8))
        .unwrap()
        .values();
    let r = SnrCurve::read(&red, CurveKind::Rate, Some(1e8))
        .unwrap()
        .values();
    assert!(b.iter().zip(&r).all(|(b, r)| b > r), "{b:?} {r:?}");
}

fn bundle(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            let bytes = std::fs::read(&p).unwrap();
            (PathBuf::from(p.file_name().unwrap()), bytes)
        })
        .collect();
    files.sort();
    files
}

#[test]
fn reproduce_file_counts_and_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let a1 = dir.path().join("a1");
    let a2 = dir.path().join("a2");
    for d in [&a1, &a2] {
        assert_eq!(
            code(&ucsk(&[
                "reproduce",
                "--figure",
                "4a",
                "--out",
                d.to_str().unwrap()
            ])),
            0
        );
    }
    let files = bundle(&a1);
    let csvs: Vec<_> = files
        .iter()
        .filter(|(p, _)| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    assert_eq!(csvs.len(), 6);
    assert_eq!(
        csvs.iter()
            .filter(|(p, _)| p.to_string_lossy().ends_with(".ub.csv"))
            .count(),
        3
    );
    assert!(files.iter().any(|(p, _)| p == Path::new("manifest.json")));
    assert_eq!(files, bundle(&a2));
    for (p, _) in csvs {
        let kind = if p.to_string_lossy().ends_with(".ub.csv") {
            CurveKind::UnionBound
        } else {
            CurveKind::Ser
        };
        SnrCurve::read(a1.join(p), kind, None).unwrap();
    }

    let b = dir.path().join("b");
    assert_eq!(
        code(&ucsk(&[
            "reproduce",
            "--figure",
            "4b",
            "--out",
            b.to_str().unwrap()
        ])),
        0
    );
    let files = bundle(&b);
    let csvs: Vec<_> = files
        .iter()
        .filter(|(p, _)| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    assert_eq!(csvs.len(), 7);
    for (p, _) in csvs {
        SnrCurve::read(b.join(p), CurveKind::Rate, Some(2e8)).unwrap();
    }

    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    assert_eq!(
        code(&ucsk(&[
            "reproduce",
            "--figure",
            "4a",
            "--out",
            blocker.join("sub").to_str().unwrap()
        ])),
        3
    );
}
