//! Constrained maximin placement of the red and green symbols.
//!
//! With B fixed, choose R and G to maximize the minimum pairwise distance of
//! {R, G, B, X} where X = centroid(R, G, B) must lie in the blue-target disk
//! and R, G must lie in the gamut. The nonsmooth minimum is replaced by a
//! soft-min during the solve and the exact minimum is re-evaluated on every
//! candidate. Each start runs an augmented-Lagrangian loop; the best
//! feasible start wins.

mod solver;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::colorimetry::{solve_fluxes, xy_distance, ChromaticityPoint, GamutPolygon};
use crate::constellation::{build_constellation, BlueTarget, Constellation4, Symbol, PRIMARY_BLUE};
use crate::{Error, Result};

use solver::{ConstrainedProblem, SolverSettings};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizerConfig {
    pub multistart_count: usize,
    /// Inner quasi-Newton iteration cap per outer step.
    pub max_iterations: usize,
    pub max_outer_iterations: usize,
    pub constraint_tolerance: f64,
    pub step_tolerance: f64,
    pub penalty_growth: f64,
    pub softmin_sharpness: f64,
    pub rng_seed: u64,
    /// The fixed blue symbol.
    pub blue: ChromaticityPoint,
    /// Source primaries used for the post-hoc light-intensity check on X.
    pub primaries: Option<[ChromaticityPoint; 3]>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            multistart_count: 32,
            max_iterations: 500,
            max_outer_iterations: 40,
            constraint_tolerance: 1e-6,
            step_tolerance: 1e-9,
            penalty_growth: 10.0,
            softmin_sharpness: 200.0,
            rng_seed: 0x5eed_0001,
            blue: PRIMARY_BLUE,
            primaries: None,
        }
    }
}

impl OptimizerConfig {
    fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.multistart_count == 0 {
            return bad("multistart_count must be >= 1");
        }
        if self.max_iterations == 0 || self.max_outer_iterations == 0 {
            return bad("iteration limits must be >= 1");
        }
        if !(self.constraint_tolerance > 0.0) || !(self.step_tolerance > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.penalty_growth > 1.0) {
            return bad("penalty_growth must exceed 1");
        }
        if !(self.softmin_sharpness > 0.0) {
            return bad("softmin_sharpness must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StartDiagnostics {
    pub index: usize,
    pub converged: bool,
    pub d_min: f64,
    pub constraint_residual: f64,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DesignResult {
    pub constellation: Constellation4,
    pub target: BlueTarget,
    pub achieved_dmin: f64,
    pub min_pair: (Symbol, Symbol),
    pub constraint_residual: f64,
    pub starts_converged: usize,
    pub best_start_index: usize,
    /// Whether X is producible with nonnegative fluxes at the configured
    /// primaries; `None` when no primaries were configured.
    pub intensity_feasible: Option<bool>,
    pub starts: Vec<StartDiagnostics>,
}

/// |center - B| + r: X lies in the disk and (X, B) is one of the pairs.
pub fn dmin_upper_bound(target: &BlueTarget) -> f64 {
    dmin_upper_bound_with_blue(target, PRIMARY_BLUE)
}

pub fn dmin_upper_bound_with_blue(target: &BlueTarget, blue: ChromaticityPoint) -> f64 {
    xy_distance(target.center, blue) + target.radius
}

/// Soft-min of the six pairwise distances and the constraint residuals
/// `[|X - c| - r, -sd(R), -sd(G)]` (nonpositive when satisfied).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObjectiveEval {
    pub soft_min: f64,
    pub hard_min: f64,
    pub constraints: [f64; 3],
}

pub fn objective_and_constraints(
    r: ChromaticityPoint,
    g: ChromaticityPoint,
    target: &BlueTarget,
    gamut: &GamutPolygon,
    sharpness: f64,
) -> ObjectiveEval {
    objective_with_blue(r, g, PRIMARY_BLUE, target, gamut, sharpness)
}

fn objective_with_blue(
    r: ChromaticityPoint,
    g: ChromaticityPoint,
    b: ChromaticityPoint,
    target: &BlueTarget,
    gamut: &GamutPolygon,
    sharpness: f64,
) -> ObjectiveEval {
    let x = ChromaticityPoint::xy((r.x + g.x + b.x) / 3.0, (r.y + g.y + b.y) / 3.0);
    let pts = [r, g, b, x];
    let mut d = [0.0; 6];
    let mut k = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            d[k] = xy_distance(pts[i], pts[j]);
            k += 1;
        }
    }
    let (soft, _) = soft_min(&d, sharpness);
    ObjectiveEval {
        soft_min: soft,
        hard_min: d.iter().copied().fold(f64::INFINITY, f64::min),
        constraints: [
            xy_distance(x, target.center) - target.radius,
            -gamut.signed_distance(r),
            -gamut.signed_distance(g),
        ],
    }
}

/// -(1/β) ln Σ exp(-β d_i) and its weights ∂/∂d_i.
fn soft_min(d: &[f64; 6], beta: f64) -> (f64, [f64; 6]) {
    let lo = d.iter().copied().fold(f64::INFINITY, f64::min);
    let mut w = [0.0; 6];
    let mut sum = 0.0;
    for (wi, di) in w.iter_mut().zip(d) {
        *wi = (-beta * (di - lo)).exp();
        sum += *wi;
    }
    w.iter_mut().for_each(|wi| *wi /= sum);
    (lo - sum.ln() / beta, w)
}

/// Decision variables: R (always) and X (unless the disk has zero radius,
/// which pins X to the center). G = 3X - B - R.
struct Placement<'a> {
    target: BlueTarget,
    gamut: &'a GamutPolygon,
    blue: ChromaticityPoint,
    beta: f64,
    pinned_x: Option<ChromaticityPoint>,
}

impl Placement<'_> {
    fn unpack(&self, v: &[f64]) -> (ChromaticityPoint, ChromaticityPoint, ChromaticityPoint) {
        let r = ChromaticityPoint::xy(v[0], v[1]);
        let x = self
            .pinned_x
            .unwrap_or_else(|| ChromaticityPoint::xy(v[2], v[3]));
        let g = ChromaticityPoint::xy(3.0 * x.x - self.blue.x - r.x, 3.0 * x.y - self.blue.y - r.y);
        (r, g, x)
    }

    fn pack(&self, r: ChromaticityPoint, x: ChromaticityPoint) -> Vec<f64> {
        match self.pinned_x {
            Some(_) => vec![r.x, r.y],
            None => vec![r.x, r.y, x.x, x.y],
        }
    }

    /// Accumulates d/dv of a quantity given its gradients w.r.t. R, G and X.
    fn chain(&self, dr: [f64; 2], dg: [f64; 2], dx: [f64; 2], grad: &mut [f64]) {
        grad[0] += dr[0] - dg[0];
        grad[1] += dr[1] - dg[1];
        if self.pinned_x.is_none() {
            grad[2] += dx[0] + 3.0 * dg[0];
            grad[3] += dx[1] + 3.0 * dg[1];
        }
    }
}

impl ConstrainedProblem for Placement<'_> {
    fn dim(&self) -> usize {
        if self.pinned_x.is_some() {
            2
        } else {
            4
        }
    }

    fn num_constraints(&self) -> usize {
        if self.pinned_x.is_some() {
            2
        } else {
            3
        }
    }

    fn objective(&self, v: &[f64], grad: &mut [f64]) -> f64 {
        let (r, g, x) = self.unpack(v);
        let pts = [r, g, self.blue, x];
        let mut d = [0.0; 6];
        let mut unit = [[0.0; 2]; 6];
        let mut pairs = [(0usize, 0usize); 6];
        let mut k = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                let (dx, dy) = (pts[i].x - pts[j].x, pts[i].y - pts[j].y);
                let dist = dx.hypot(dy);
                d[k] = dist;
                unit[k] = if dist > 0.0 {
                    [dx / dist, dy / dist]
                } else {
                    [0.0, 0.0]
                };
                pairs[k] = (i, j);
                k += 1;
            }
        }
        let (soft, w) = soft_min(&d, self.beta);
        // Gradient of the soft-min with respect to each point.
        let mut dp = [[0.0; 2]; 4];
        for k in 0..6 {
            let (i, j) = pairs[k];
            for c in 0..2 {
                dp[i][c] += w[k] * unit[k][c];
                dp[j][c] -= w[k] * unit[k][c];
            }
        }
        grad.iter_mut().for_each(|g| *g = 0.0);
        // Minimize the negated soft-min.
        let neg = |a: [f64; 2]| [-a[0], -a[1]];
        self.chain(neg(dp[0]), neg(dp[1]), neg(dp[3]), grad);
        -soft
    }

    fn constraints(&self, v: &[f64], values: &mut [f64], jac: &mut [Vec<f64>]) {
        let (r, g, x) = self.unpack(v);
        for row in jac.iter_mut() {
            row.iter_mut().for_each(|e| *e = 0.0);
        }
        let (sd_r, gr) = self.gamut.signed_distance_with_gradient(r);
        let (sd_g, gg) = self.gamut.signed_distance_with_gradient(g);
        values[0] = -sd_r;
        self.chain([-gr[0], -gr[1]], [0.0, 0.0], [0.0, 0.0], &mut jac[0]);
        values[1] = -sd_g;
        self.chain([0.0, 0.0], [-gg[0], -gg[1]], [0.0, 0.0], &mut jac[1]);
        if self.pinned_x.is_none() {
            let (dx, dy) = (x.x - self.target.center.x, x.y - self.target.center.y);
            let dist = dx.hypot(dy);
            values[2] = dist - self.target.radius;
            if dist > 0.0 {
                self.chain([0.0, 0.0], [0.0, 0.0], [dx / dist, dy / dist], &mut jac[2]);
            }
        }
    }
}

fn sample_in_gamut(rng: &mut ChaCha8Rng, gamut: &GamutPolygon) -> ChromaticityPoint {
    let (x0, y0, x1, y1) = gamut.bounding_box();
    loop {
        let p = ChromaticityPoint::xy(rng.random_range(x0..=x1), rng.random_range(y0..=y1));
        if gamut.contains(p) {
            return p;
        }
    }
}

struct StartOutcome {
    diag: StartDiagnostics,
    constellation: Option<Constellation4>,
}

/// Moves a point that sits marginally outside the gamut onto its boundary.
fn snap(p: ChromaticityPoint, gamut: &GamutPolygon, tol: f64) -> ChromaticityPoint {
    let sd = gamut.signed_distance(p);
    if sd < 0.0 && sd >= -tol {
        gamut.nearest_boundary_point(p)
    } else {
        p
    }
}

fn run_start(index: usize, problem: &Placement<'_>, cfg: &OptimizerConfig) -> StartOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(index as u64);
    let r0 = sample_in_gamut(&mut rng, problem.gamut);
    let g0 = sample_in_gamut(&mut rng, problem.gamut);
    let x0 = ChromaticityPoint::xy(
        (r0.x + g0.x + problem.blue.x) / 3.0,
        (r0.y + g0.y + problem.blue.y) / 3.0,
    );
    let settings = SolverSettings {
        max_outer: cfg.max_outer_iterations,
        max_inner: cfg.max_iterations,
        constraint_tolerance: cfg.constraint_tolerance,
        step_tolerance: cfg.step_tolerance,
        initial_penalty: 10.0,
        penalty_growth: cfg.penalty_growth,
        max_penalty: 1e12,
    };
    let out = solver::solve(problem, &problem.pack(r0, x0), &settings);
    let (r, g, _) = problem.unpack(&out.v);
    let tol = cfg.constraint_tolerance;
    let (r, g) = (snap(r, problem.gamut, tol), snap(g, problem.gamut, tol));
    // The problem is symmetric in R and G; label the redder point R.
    let (r, g) = if g.x > r.x { (g, r) } else { (r, g) };
    let eval = objective_with_blue(
        r,
        g,
        problem.blue,
        &problem.target,
        problem.gamut,
        problem.beta,
    );
    let residual = eval.constraints.iter().fold(0.0f64, |m, c| m.max(*c));
    let constellation = if residual <= tol && out.v.iter().all(|v| v.is_finite()) {
        build_constellation(r, g, problem.blue, problem.gamut).ok()
    } else {
        None
    };
    StartOutcome {
        diag: StartDiagnostics {
            index,
            converged: constellation.is_some(),
            d_min: eval.hard_min,
            constraint_residual: residual,
            outer_iterations: out.outer_iterations,
            inner_iterations: out.inner_iterations,
        },
        constellation,
    }
}

/// Maximin design for a blue target over `gamut`.
///
/// Starts run in parallel; the winner is the largest exact d_min among
/// converged starts, ties going to the lowest start index, so the result is
/// independent of scheduling.
pub fn design_constellation(
    target: &BlueTarget,
    cfg: &OptimizerConfig,
    gamut: &GamutPolygon,
) -> Result<DesignResult> {
    cfg.check()?;
    if !gamut.contains(cfg.blue) {
        return Err(Error::InfeasibleTarget(format!(
            "fixed blue {} lies outside the gamut",
            cfg.blue
        )));
    }
    if !target.intersects(gamut) {
        return Err(Error::InfeasibleTarget(format!(
            "disk of radius {} at {} does not meet the gamut",
            target.radius, target.center
        )));
    }
    let problem = Placement {
        target: *target,
        gamut,
        blue: cfg.blue,
        beta: cfg.softmin_sharpness,
        pinned_x: (target.radius == 0.0).then_some(target.center),
    };
    let outcomes: Vec<StartOutcome> = (0..cfg.multistart_count)
        .into_par_iter()
        .map(|i| run_start(i, &problem, cfg))
        .collect();

    let mut best: Option<(usize, Constellation4)> = None;
    for (i, o) in outcomes.iter().enumerate() {
        if let Some(c) = o.constellation {
            if best.is_none_or(|(_, b)| c.d_min() > b.d_min()) {
                best = Some((i, c));
            }
        }
    }
    let starts: Vec<StartDiagnostics> = outcomes.into_iter().map(|o| o.diag).collect();
    let Some((best_index, constellation)) = best else {
        return Err(Error::NoConvergence(starts));
    };
    let md = crate::constellation::min_distance(&constellation);
    let eval = objective_with_blue(
        constellation.r(),
        constellation.g(),
        cfg.blue,
        target,
        gamut,
        cfg.softmin_sharpness,
    );
    let residual = eval.constraints.iter().fold(0.0f64, |m, c| m.max(*c));
    let intensity_feasible = cfg
        .primaries
        .map(|p| solve_fluxes(&p, constellation.x(), 1.0).is_ok());
    Ok(DesignResult {
        constellation,
        target: *target,
        achieved_dmin: md.value,
        min_pair: md.pair,
        constraint_residual: residual,
        starts_converged: starts.iter().filter(|s| s.converged).count(),
        best_start_index: best_index,
        intensity_feasible,
        starts,
    })
}
