use std::path::Path;

use serde_json::json;
use ucsk::colorimetry::{solve_fluxes, ChromaticityPoint, GamutPolygon};
use ucsk::constellation::{
    validate_against_target, BlueTarget, ConstellationDoc, Symbol, CENTROID_TOLERANCE,
};
use ucsk::linksim::{
    build_hypotheses, ook_hypotheses, rate_curve, simulate_ser, union_bound_curve, LinkConfig,
};
use ucsk::optimizer::{design_constellation, dmin_upper_bound, OptimizerConfig};
use ucsk::Error;

use crate::manifest::{manifest_path, union_bound_path, RunManifest};
use crate::source::{load_constellation, load_water, optimized_preset, source_triangle};
use crate::{
    DesignArgs, Figure, GamutChoice, RateArgs, ReproduceArgs, Scheme, SerArgs, ValidateArgs,
};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_INFEASIBLE: u8 = 2;
pub const EXIT_IO: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_IO,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io { .. } | Error::Parse { .. } | Error::Json(_) => EXIT_IO,
            Error::InfeasibleTarget(_)
            | Error::InfeasibleConstellation { .. }
            | Error::NoConvergence(_)
            | Error::OutOfGamut { .. }
            | Error::OutOfTriangle { .. }
            | Error::WavelengthOutOfRange { .. } => EXIT_INFEASIBLE,
            _ => EXIT_USAGE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<(), CliError>;

fn pair_label(p: (Symbol, Symbol)) -> String {
    format!("{}-{}", p.1, p.0)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn design(a: DesignArgs) -> CmdResult {
    let target = match (a.preset, a.target_center, a.target_radius) {
        (Some(k), _, _) => BlueTarget::preset(k)?,
        (None, Some([x, y]), Some(r)) => BlueTarget::new(ChromaticityPoint::xy(x, y), r)?,
        _ => {
            return Err(CliError::usage(
                "give --preset or both --target-center and --target-radius",
            ))
        }
    };
    let defaults = OptimizerConfig::default();
    let cfg = OptimizerConfig {
        rng_seed: a.seed.unwrap_or(defaults.rng_seed),
        multistart_count: a.starts.unwrap_or(defaults.multistart_count),
        primaries: Some(LinkConfig::default().primary_points()),
        ..defaults
    };
    let triangle;
    let (gamut, gamut_name): (&GamutPolygon, &str) = match a.gamut {
        GamutChoice::Triangle => {
            triangle = source_triangle();
            (&triangle, "triangle")
        }
        GamutChoice::Locus => (GamutPolygon::spectral_locus(), "locus"),
    };
    let res = design_constellation(&target, &cfg, gamut)?;
    let doc = ConstellationDoc::from_constellation(
        &res.constellation,
        &target,
        format!(
            "optimized design, seed {}, {} starts, {gamut_name} gamut",
            cfg.rng_seed, cfg.multistart_count
        ),
    );
    let mut manifest = RunManifest::new(
        "design",
        Some(cfg.rng_seed),
        json!({
            "preset": a.preset,
            "target_center": target.center.to_array(),
            "target_radius": target.radius,
            "gamut": gamut_name,
            "optimizer": cfg,
        }),
    );
    manifest.emit(&a.out, doc.to_json().as_bytes())?;
    manifest.write(&manifest_path(&a.out))?;

    let margin = target.margin(res.constellation.x());
    println!("d_min: {:.6}", res.achieved_dmin);
    println!("min_pair: {}", pair_label(res.min_pair));
    println!("upper_bound: {:.6}", dmin_upper_bound(&target));
    println!("disk_margin: {margin:.3e}");
    println!("constraint_residual: {:.3e}", res.constraint_residual);
    println!(
        "starts_converged: {}/{}",
        res.starts_converged, cfg.multistart_count
    );
    if let Some(ok) = res.intensity_feasible {
        println!("producible_at_primaries: {}", yes_no(ok));
    }
    for (s, p) in res.constellation.points() {
        println!("{s}: {p}");
    }
    println!("wrote: {}", a.out.display());
    Ok(())
}

pub fn validate(a: ValidateArgs) -> CmdResult {
    let loaded = load_constellation(&a.constellation)?;
    let doc = loaded.value;
    let to_io = |e: Error| CliError::io(format!("{}: {e}", a.constellation));
    let c = doc.to_constellation_unchecked().map_err(to_io)?;
    let target = match a.preset {
        Some(k) => BlueTarget::preset(k)?,
        None => doc.target().map_err(to_io)?,
    };
    let report = validate_against_target(&c, &target, GamutPolygon::spectral_locus());
    let mismatch = doc.centroid_mismatch();
    let primaries = LinkConfig::default().primary_points();
    let producible = c
        .points()
        .iter()
        .all(|(_, p)| solve_fluxes(&primaries, *p, 1.0).is_ok());

    println!("source: {}", a.constellation);
    println!("d_min: {:.6}", report.d_min);
    println!("min_pair: {}", pair_label(report.min_pair));
    println!("stored_d_min: {:.6}", doc.d_min);
    println!("centroid: {}", c.x());
    println!("centroid_mismatch: {mismatch:.3e}");
    println!(
        "centroid_check: {}",
        if mismatch > CENTROID_TOLERANCE {
            "MISMATCH"
        } else {
            "ok"
        }
    );
    println!("target: center {} radius {}", target.center, target.radius);
    println!("disk_margin: {:.6}", report.x_margin);
    println!("x_inside: {}", yes_no(report.x_inside));
    let gamut: Vec<String> = report
        .in_gamut
        .iter()
        .map(|(s, ok)| format!("{s}={}", yes_no(*ok)))
        .collect();
    println!("in_locus: {}", gamut.join(" "));
    println!("producible_at_primaries: {}", yes_no(producible));
    Ok(())
}

fn link_config(
    water: &str,
    distance: f64,
) -> Result<(LinkConfig, crate::manifest::FileDigest), CliError> {
    if !(distance >= 0.0) || !distance.is_finite() {
        return Err(CliError::usage(format!(
            "--distance must be >= 0, got {distance}"
        )));
    }
    let w = load_water(water)?;
    let cfg = LinkConfig::default()
        .with_water(w.value)
        .with_distance(distance);
    cfg.validate()?;
    Ok((cfg, w.digest))
}

pub fn ser(a: SerArgs) -> CmdResult {
    let ch = &a.channel;
    let doc = load_constellation(&a.constellation)?;
    let (cfg, water_digest) = link_config(&ch.water, ch.distance)?;
    let c = doc.value.to_constellation(GamutPolygon::spectral_locus())?;
    let h = build_hypotheses(&c, &cfg)?;
    let curve = simulate_ser(&c, &cfg, &ch.snr.0, a.symbols, ch.seed)?;
    let ub = union_bound_curve(&h, &ch.snr.0, curve.config_sha.clone())?;

    let mut manifest = RunManifest::new(
        "ser",
        Some(ch.seed),
        json!({
            "constellation": a.constellation,
            "water": ch.water,
            "distance_m": ch.distance,
            "snr_db": ch.snr.0,
            "symbols": a.symbols,
            "link": cfg,
        }),
    );
    manifest.inputs = vec![doc.digest, water_digest];
    let ub_path = union_bound_path(&ch.out);
    manifest.emit(&ch.out, curve.to_csv().as_bytes())?;
    manifest.emit(&ub_path, ub.to_csv().as_bytes())?;
    manifest.write(&manifest_path(&ch.out))?;
    println!("wrote: {}", ch.out.display());
    println!("wrote: {}", ub_path.display());
    Ok(())
}

pub fn rate(a: RateArgs) -> CmdResult {
    let ch = &a.channel;
    let (cfg, water_digest) = link_config(&ch.water, ch.distance)?;
    let mut inputs = vec![water_digest];
    let h = match (a.scheme, a.wavelength, &a.constellation) {
        (Scheme::Ucsk, None, Some(name)) => {
            let doc = load_constellation(name)?;
            inputs.insert(0, doc.digest);
            build_hypotheses(
                &doc.value.to_constellation(GamutPolygon::spectral_locus())?,
                &cfg,
            )?
        }
        (Scheme::Ook, Some(wl), None) => ook_hypotheses(wl, &cfg)?,
        (Scheme::Ucsk, _, _) => {
            return Err(CliError::usage(
                "--scheme ucsk needs --constellation and no --wavelength",
            ))
        }
        (Scheme::Ook, _, _) => {
            return Err(CliError::usage(
                "--scheme ook needs --wavelength and no --constellation",
            ))
        }
    };
    let curve = rate_curve(&h, &cfg, &ch.snr.0, a.samples, ch.seed)?;
    let mut manifest = RunManifest::new(
        "rate",
        Some(ch.seed),
        json!({
            "scheme": format!("{:?}", a.scheme).to_lowercase(),
            "wavelength_nm": a.wavelength,
            "constellation": a.constellation,
            "water": ch.water,
            "distance_m": ch.distance,
            "snr_db": ch.snr.0,
            "samples": a.samples,
            "link": cfg,
        }),
    );
    manifest.inputs = inputs;
    manifest.emit(&ch.out, curve.to_csv().as_bytes())?;
    manifest.write(&manifest_path(&ch.out))?;
    println!("wrote: {}", ch.out.display());
    Ok(())
}

/// Seeds and grids used by `reproduce`.
pub const REPRODUCE_SEED: u64 = 1;
pub const REPRODUCE_SYMBOLS: u64 = 100_000;
const SER_GRID: (f64, f64, usize) = (0.0, 3.0, 11);
const RATE_GRID: (f64, f64, usize) = (0.0, 2.0, 16);

fn grid((lo, step, n): (f64, f64, usize)) -> Vec<f64> {
    (0..n).map(|i| lo + i as f64 * step).collect()
}

pub fn reproduce(a: ReproduceArgs) -> CmdResult {
    let dir = &a.out;
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
    let opt = OptimizerConfig::default();
    let triangle = source_triangle();
    let mut designs = Vec::new();
    for k in 1..=3u8 {
        let doc = optimized_preset(k, &opt)?;
        let c = doc.to_constellation(&triangle)?;
        designs.push((k, doc, c));
    }
    let cfg = LinkConfig::default();
    let design_json: Vec<_> = designs
        .iter()
        .map(|(k, d, _)| json!({"preset": k, "design": d}))
        .collect();
    let path = |name: String| dir.join(name);

    let mut manifest;
    match a.figure {
        Figure::Ser => {
            let g = grid(SER_GRID);
            manifest = RunManifest::new(
                "reproduce",
                Some(REPRODUCE_SEED),
                json!({"figure": "4a", "snr_db": g, "symbols": REPRODUCE_SYMBOLS, "designs": design_json, "link": cfg}),
            );
            for (k, _, c) in &designs {
                let curve = simulate_ser(c, &cfg, &g, REPRODUCE_SYMBOLS, REPRODUCE_SEED)?;
                let ub =
                    union_bound_curve(&build_hypotheses(c, &cfg)?, &g, curve.config_sha.clone())?;
                manifest.emit(
                    &path(format!("ser_target{k}.csv")),
                    curve.to_csv().as_bytes(),
                )?;
                manifest.emit(
                    &path(format!("ser_target{k}.ub.csv")),
                    ub.to_csv().as_bytes(),
                )?;
            }
        }
        Figure::Rate => {
            let g = grid(RATE_GRID);
            manifest = RunManifest::new(
                "reproduce",
                Some(REPRODUCE_SEED),
                json!({"figure": "4b", "snr_db": g, "samples": REPRODUCE_SYMBOLS, "designs": design_json, "link": cfg}),
            );
            let mut emit_curve = |name: String, h, cfg: &LinkConfig| -> CmdResult {
                let curve = rate_curve(&h, cfg, &g, REPRODUCE_SYMBOLS, REPRODUCE_SEED)?;
                manifest.emit(&path(name), curve.to_csv().as_bytes())
            };
            for (k, _, c) in &designs {
                emit_curve(
                    format!("rate_ucsk_target{k}_10m.csv"),
                    build_hypotheses(c, &cfg)?,
                    &cfg,
                )?;
            }
            for (color, wl) in [("red", 700.0), ("green", 550.0), ("blue", 460.0)] {
                emit_curve(
                    format!("rate_ook_{color}_10m.csv"),
                    ook_hypotheses(wl, &cfg)?,
                    &cfg,
                )?;
            }
            let far = cfg.clone().with_distance(50.0);
            emit_curve(
                "rate_ook_blue_50m.csv".into(),
                ook_hypotheses(460.0, &far)?,
                &far,
            )?;
        }
    }
    manifest.write(&dir.join("manifest.json"))?;
    for o in &manifest.outputs {
        println!("wrote: {}", Path::new(dir).join(&o.path).display());
    }
    Ok(())
}
