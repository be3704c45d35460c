//! Monte Carlo symbol error rate, union bound and mutual information.

use rayon::prelude::*;
use statrs::function::erf::erfc;

use super::curve::{CurveKind, CurvePoint, SnrCurve};
use super::rng::{DrawStream, MAX_DIMS};
use super::{build_hypotheses, detect_ml, distance_sq, sha256_hex, HypothesisSet, LinkConfig};
use crate::constellation::Constellation4;
use crate::{Error, Result};

/// Draws per parallel work item.
const CHUNK: u64 = 8192;

/// Minimum Monte Carlo sample count.
pub const MIN_SAMPLES: u64 = 10_000;

/// Standard Gaussian tail probability.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

fn snr_linear(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}

/// Noise standard deviation for SNR = P_avg / σ², with P_avg the per-band
/// average hypothesis power.
pub fn sigma_for_snr(h: &HypothesisSet, snr_db: f64) -> f64 {
    (h.average_power() / snr_linear(snr_db)).sqrt()
}

/// Noise standard deviation for SNR = P_ref / σ² with the configuration's
/// fixed reference power, shared by every scheme and wavelength.
pub fn reference_sigma(cfg: &LinkConfig, snr_db: f64) -> f64 {
    (cfg.reference_power() / snr_linear(snr_db)).sqrt()
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Empty("SNR grid"));
    }
    if grid.iter().any(|v| !v.is_finite()) || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "SNR grid must be finite and strictly increasing".into(),
        ));
    }
    Ok(())
}

fn check_samples(n: u64) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_SAMPLES} samples, got {n}"
        )));
    }
    Ok(())
}

/// Splits `0..n` into chunks, maps each in parallel and returns the per-chunk
/// results in chunk order.
fn chunked<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            f(start, (start + CHUNK).min(n))
        })
        .collect()
}

fn count_errors(h: &HypothesisSet, sigma: f64, n: u64, seed: u64, stream: u64) -> u64 {
    let m = h.len();
    let dims = h.dims();
    chunked(n, |start, end| {
        let mut rng = DrawStream::new(seed, stream, start);
        let mut y = [0.0; MAX_DIMS];
        let mut errors = 0u64;
        for _ in start..end {
            let d = rng.next(m);
            let hs = h.get(d.symbol);
            for k in 0..dims {
                y[k] = hs[k] + sigma * d.noise[k];
            }
            if detect_ml(&y[..dims], h) != d.symbol {
                errors += 1;
            }
        }
        errors
    })
    .into_iter()
    .sum()
}

/// Monte Carlo SER over `grid` for a hypothesis set. Grid point `i` uses
/// stream `i`, so each point is reproducible on its own.
pub fn simulate_ser_hypotheses(
    h: &HypothesisSet,
    grid: &[f64],
    n_symbols: u64,
    seed: u64,
    config_sha: String,
) -> Result<SnrCurve> {
    check_grid(grid)?;
    check_samples(n_symbols)?;
    let points = grid
        .iter()
        .enumerate()
        .map(|(i, &snr_db)| {
            let p = count_errors(h, sigma_for_snr(h, snr_db), n_symbols, seed, i as u64) as f64
                / n_symbols as f64;
            CurvePoint {
                snr_db,
                value: p,
                std_err: (p * (1.0 - p) / n_symbols as f64).sqrt(),
            }
        })
        .collect();
    Ok(SnrCurve {
        kind: CurveKind::Ser,
        seed,
        n: n_symbols,
        config_sha,
        points,
    })
}

fn run_digest(cfg: &LinkConfig, h: &HypothesisSet) -> String {
    sha256_hex(format!("{}:{}", cfg.digest(), h.digest()).as_bytes())
}

pub fn simulate_ser(
    c: &Constellation4,
    cfg: &LinkConfig,
    grid: &[f64],
    n_symbols: u64,
    seed: u64,
) -> Result<SnrCurve> {
    let h = build_hypotheses(c, cfg)?;
    simulate_ser_hypotheses(&h, grid, n_symbols, seed, run_digest(cfg, &h))
}

/// (1/M) Σ_i Σ_{j≠i} Q(‖h_i − h_j‖ / 2σ).
pub fn union_bound(h: &HypothesisSet, sigma: f64) -> f64 {
    let m = h.len();
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                total += q_function(distance_sq(h.get(i), h.get(j)).sqrt() / (2.0 * sigma));
            }
        }
    }
    total / m as f64
}

pub fn union_bound_ser(c: &Constellation4, cfg: &LinkConfig, snr_db: f64) -> Result<f64> {
    let h = build_hypotheses(c, cfg)?;
    Ok(union_bound(&h, sigma_for_snr(&h, snr_db)))
}

pub fn union_bound_curve(h: &HypothesisSet, grid: &[f64], config_sha: String) -> Result<SnrCurve> {
    check_grid(grid)?;
    Ok(SnrCurve {
        kind: CurveKind::UnionBound,
        seed: 0,
        n: 0,
        config_sha,
        points: grid
            .iter()
            .map(|&snr_db| CurvePoint {
                snr_db,
                value: union_bound(h, sigma_for_snr(h, snr_db)),
                std_err: 0.0,
            })
            .collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MiEstimate {
    pub bits: f64,
    pub std_err: f64,
}

fn mi_stream(h: &HypothesisSet, sigma: f64, n: u64, seed: u64, stream: u64) -> MiEstimate {
    let m = h.len();
    let dims = h.dims();
    let log2m = (m as f64).log2();
    let inv = 1.0 / (2.0 * sigma * sigma);
    let partial = chunked(n, |start, end| {
        let mut rng = DrawStream::new(seed, stream, start);
        let mut y = [0.0; MAX_DIMS];
        let mut expo = vec![0.0; m];
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in start..end {
            let d = rng.next(m);
            let hs = h.get(d.symbol);
            for k in 0..dims {
                y[k] = hs[k] + sigma * d.noise[k];
            }
            let own = distance_sq(&y[..dims], hs) * inv;
            let mut top = f64::NEG_INFINITY;
            for (j, e) in expo.iter_mut().enumerate() {
                *e = own - distance_sq(&y[..dims], h.get(j)) * inv;
                top = top.max(*e);
            }
            let lse = top + expo.iter().map(|e| (e - top).exp()).sum::<f64>().ln();
            let term = log2m - lse / std::f64::consts::LN_2;
            sum += term;
            sq += term * term;
        }
        (sum, sq)
    });
    let (sum, sq) = partial
        .into_iter()
        .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let nf = n as f64;
    let mean = sum / nf;
    let var = (sq / nf - mean * mean).max(0.0);
    MiEstimate {
        bits: mean.clamp(0.0, log2m),
        std_err: (var / nf).sqrt(),
    }
}

/// Monte Carlo estimate of I(S; Y) in bits for equiprobable symbols,
/// averaging log2(M p(y|s) / Σ_j p(y|s_j)).
pub fn mutual_information(
    h: &HypothesisSet,
    sigma: f64,
    n_samples: u64,
    seed: u64,
) -> Result<MiEstimate> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "noise sigma must be positive, got {sigma}"
        )));
    }
    check_samples(n_samples)?;
    Ok(mi_stream(h, sigma, n_samples, seed, 0))
}

/// Bandwidth × MI, one symbol per Hz.
pub fn achievable_rate(
    h: &HypothesisSet,
    sigma: f64,
    bandwidth_hz: f64,
    n_samples: u64,
    seed: u64,
) -> Result<f64> {
    if !(bandwidth_hz > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "bandwidth must be positive, got {bandwidth_hz}"
        )));
    }
    Ok(bandwidth_hz * mutual_information(h, sigma, n_samples, seed)?.bits)
}

/// Rate curve in bits/s with the configuration's fixed noise reference;
/// grid point `i` uses stream `i`.
pub fn rate_curve(
    h: &HypothesisSet,
    cfg: &LinkConfig,
    grid: &[f64],
    n_samples: u64,
    seed: u64,
) -> Result<SnrCurve> {
    check_grid(grid)?;
    check_samples(n_samples)?;
    let points = grid
        .iter()
        .enumerate()
        .map(|(i, &snr_db)| {
            let mi = mi_stream(h, reference_sigma(cfg, snr_db), n_samples, seed, i as u64);
            CurvePoint {
                snr_db,
                value: cfg.bandwidth_hz * mi.bits,
                std_err: cfg.bandwidth_hz * mi.std_err,
            }
        })
        .collect();
    Ok(SnrCurve {
        kind: CurveKind::Rate,
        seed,
        n: n_samples,
        config_sha: run_digest(cfg, h),
        points,
    })
}
