//! Resolution of `--constellation` and `--water` arguments.

use std::path::Path;

use ucsk::channel::{load_water_csv, WaterProperties};
use ucsk::colorimetry::GamutPolygon;
use ucsk::constellation::{table1, table1_row, BlueTarget, ConstellationDoc};
use ucsk::linksim::{sha256_hex, LinkConfig};
use ucsk::optimizer::{design_constellation, OptimizerConfig};

use crate::commands::CliError;
use crate::manifest::FileDigest;

/// A loaded input and the digest recorded in the manifest.
pub struct Loaded<T> {
    pub value: T,
    pub digest: FileDigest,
}

pub fn source_triangle() -> GamutPolygon {
    let [a, b, c] = LinkConfig::default().primary_points();
    GamutPolygon::triangle(a, b, c).expect("default primaries form a triangle")
}

/// Optimized design for a preset inside the default source triangle.
pub fn optimized_preset(preset: u8, cfg: &OptimizerConfig) -> Result<ConstellationDoc, CliError> {
    let target = BlueTarget::preset(preset)?;
    let res = design_constellation(&target, cfg, &source_triangle())?;
    Ok(ConstellationDoc::from_constellation(
        &res.constellation,
        &target,
        format!(
            "optimized preset {preset}, seed {}, {} starts, source triangle",
            cfg.rng_seed, cfg.multistart_count
        ),
    ))
}

fn builtin(name: &str) -> Result<Option<ConstellationDoc>, CliError> {
    if let Some(row) = table1_row(name) {
        return Ok(Some(row.document()));
    }
    if let Some(k) = name.strip_prefix("optimized-") {
        if let Ok(k @ 1..=3) = k.parse::<u8>() {
            return optimized_preset(k, &OptimizerConfig::default()).map(Some);
        }
    }
    Ok(None)
}

pub fn builtin_names() -> Vec<String> {
    table1()
        .iter()
        .map(|r| r.name.to_string())
        .chain((1..=3).map(|k| format!("optimized-{k}")))
        .collect()
}

/// A file path if one exists, otherwise a built-in name.
pub fn load_constellation(arg: &str) -> Result<Loaded<ConstellationDoc>, CliError> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(doc) = builtin(arg)? {
            let digest = sha256_hex(doc.to_json().as_bytes());
            return Ok(Loaded {
                value: doc,
                digest: FileDigest::builtin(arg, digest),
            });
        }
    }
    let bytes = std::fs::read(path).map_err(|e| {
        CliError::io(format!(
            "cannot read constellation {arg:?}: {e} (built-in names: {})",
            builtin_names().join(", ")
        ))
    })?;
    let text =
        String::from_utf8(bytes.clone()).map_err(|_| CliError::io(format!("{arg}: not UTF-8")))?;
    let doc =
        ConstellationDoc::from_json(&text).map_err(|e| CliError::io(format!("{arg}: {e}")))?;
    Ok(Loaded {
        value: doc,
        digest: FileDigest::file(arg, &bytes),
    })
}

pub fn load_water(arg: &str) -> Result<Loaded<WaterProperties>, CliError> {
    if arg == "seawater" && !Path::new(arg).exists() {
        let w = WaterProperties::seawater();
        let digest = sha256_hex(serde_json::to_string(&w).expect("serializes").as_bytes());
        return Ok(Loaded {
            value: w,
            digest: FileDigest::builtin(arg, digest),
        });
    }
    let bytes = std::fs::read(arg)
        .map_err(|e| CliError::io(format!("cannot read water table {arg:?}: {e}")))?;
    let w = load_water_csv(arg).map_err(|e| CliError::io(e.to_string()))?;
    Ok(Loaded {
        value: w,
        digest: FileDigest::file(arg, &bytes),
    })
}
