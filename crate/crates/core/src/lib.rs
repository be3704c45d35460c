//! Design and evaluation of blue-targeted 4-point color-shift-keying
//! constellations for underwater optical links.
//!
//! The crate is organised bottom-up:
//!
//! * [`colorimetry`]: CIE 1931 chromaticity-plane geometry, tristimulus
//!   conversion, additive mixing and gamut membership.
//! * [`constellation`]: the four-symbol constellation model, blue targets
//!   and the tabulated reference designs.
//! * [`optimizer`]: constrained maximin placement of the red and green
//!   symbols.
//! * [`channel`]: per-wavelength seawater attenuation (Beer-Lambert).
//! * [`linksim`]: received-signal hypotheses, Monte Carlo symbol error
//!   rate, union bound and achievable-rate estimation.

pub mod channel;
pub mod colorimetry;
pub mod constellation;
mod error;
pub mod linksim;
pub mod optimizer;

pub use error::{Error, Result};
