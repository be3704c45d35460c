use std::path::PathBuf;

use crate::colorimetry::ChromaticityPoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate chromaticity {0}: y must be at least 1e-6")]
    DegenerateChromaticity(ChromaticityPoint),

    #[error("invalid chromaticity ({x}, {y}): expected 0 <= x, 0 < y and x + y <= 1")]
    InvalidChromaticity { x: f64, y: f64 },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("primaries are collinear; the mixing system is singular")]
    SingularPrimaries,

    #[error(
        "target {target} lies outside the primaries' triangle (flux {flux:.3e} on primary {index})"
    )]
    OutOfTriangle {
        target: ChromaticityPoint,
        index: usize,
        flux: f64,
    },

    #[error("point {label} = {point} lies outside the gamut")]
    OutOfGamut {
        label: String,
        point: ChromaticityPoint,
    },

    #[error("invalid gamut polygon: {0}")]
    InvalidPolygon(String),

    #[error("wavelength {wavelength} nm outside table range [{min}, {max}] nm")]
    WavelengthOutOfRange { wavelength: f64, min: f64, max: f64 },

    #[error("infeasible target: {0}")]
    InfeasibleTarget(String),

    #[error("constellation not realizable at the configured primaries: symbol {label} needs flux {flux:.3e} on primary {index}")]
    InfeasibleConstellation {
        label: String,
        index: usize,
        flux: f64,
    },

    #[error("no start converged ({} starts tried)", .0.len())]
    NoConvergence(Vec<crate::optimizer::StartDiagnostics>),

    #[error("{}:{line}: {message}", .source_name)]
    Parse {
        source_name: String,
        line: u64,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(
        source_name: impl Into<String>,
        line: u64,
        message: impl Into<String>,
    ) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            line,
            message: message.into(),
        }
    }
}
