//! Augmented-Lagrangian method for inequality-constrained minimization with
//! a BFGS inner solve.
//!
//! Problem: minimize f(v) subject to g_i(v) <= 0.

/// A smooth objective with inequality constraints `g_i(v) <= 0`.
pub(crate) trait ConstrainedProblem {
    fn dim(&self) -> usize;
    fn num_constraints(&self) -> usize;
    /// Objective value; writes the gradient into `grad`.
    fn objective(&self, v: &[f64], grad: &mut [f64]) -> f64;
    /// Constraint values and gradients (`jac[i]` has length `dim`).
    fn constraints(&self, v: &[f64], values: &mut [f64], jac: &mut [Vec<f64>]);
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct SolverSettings {
    pub max_outer: usize,
    pub max_inner: usize,
    pub constraint_tolerance: f64,
    pub step_tolerance: f64,
    pub initial_penalty: f64,
    pub penalty_growth: f64,
    pub max_penalty: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct SolverOutcome {
    pub v: Vec<f64>,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
}

struct Lagrangian<'a, P: ConstrainedProblem> {
    problem: &'a P,
    multipliers: &'a [f64],
    penalty: f64,
}

impl<P: ConstrainedProblem> Lagrangian<'_, P> {
    fn eval(&self, v: &[f64], grad: &mut [f64]) -> f64 {
        let n = self.problem.dim();
        let m = self.problem.num_constraints();
        let mut value = self.problem.objective(v, grad);
        let mut g = vec![0.0; m];
        let mut jac = vec![vec![0.0; n]; m];
        self.problem.constraints(v, &mut g, &mut jac);
        for i in 0..m {
            let lam = self.multipliers[i];
            let shifted = (lam + self.penalty * g[i]).max(0.0);
            value += (shifted * shifted - lam * lam) / (2.0 * self.penalty);
            if shifted > 0.0 {
                for k in 0..n {
                    grad[k] += shifted * jac[i][k];
                }
            }
        }
        value
    }
}

fn max_violation<P: ConstrainedProblem>(p: &P, v: &[f64], g: &mut [f64]) -> f64 {
    let mut jac = vec![vec![0.0; p.dim()]; p.num_constraints()];
    p.constraints(v, g, &mut jac);
    g.iter().fold(0.0f64, |acc, gi| acc.max(*gi))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// BFGS with Armijo backtracking. Returns the number of iterations used.
fn bfgs<F>(f: F, v: &mut [f64], max_iter: usize, step_tol: f64) -> usize
where
    F: Fn(&[f64], &mut [f64]) -> f64,
{
    let n = v.len();
    let mut h = vec![vec![0.0; n]; n];
    for (i, row) in h.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut grad = vec![0.0; n];
    let mut fx = f(v, &mut grad);
    let mut trial = vec![0.0; n];
    let mut trial_grad = vec![0.0; n];
    let mut dir = vec![0.0; n];
    let mut first = true;
    for iter in 0..max_iter {
        if inf_norm(&grad) < 1e-14 {
            return iter;
        }
        for i in 0..n {
            dir[i] = -dot(&h[i], &grad);
        }
        let mut slope = dot(&grad, &dir);
        if slope >= 0.0 {
            // Lost descent; restart from steepest descent.
            for (i, row) in h.iter_mut().enumerate() {
                row.iter_mut().for_each(|x| *x = 0.0);
                row[i] = 1.0;
                dir[i] = -grad[i];
            }
            slope = -dot(&grad, &grad);
        }
        let mut alpha = 1.0;
        let mut accepted = false;
        let mut f_trial = fx;
        for _ in 0..60 {
            for i in 0..n {
                trial[i] = v[i] + alpha * dir[i];
            }
            f_trial = f(&trial, &mut trial_grad);
            if f_trial.is_finite() && f_trial <= fx + 1e-4 * alpha * slope {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            return iter;
        }
        let s: Vec<f64> = (0..n).map(|i| trial[i] - v[i]).collect();
        let y: Vec<f64> = (0..n).map(|i| trial_grad[i] - grad[i]).collect();
        v.copy_from_slice(&trial);
        let improvement = fx - f_trial;
        fx = f_trial;
        grad.copy_from_slice(&trial_grad);
        if inf_norm(&s) < step_tol || improvement.abs() < 1e-16 * (1.0 + fx.abs()) {
            return iter + 1;
        }
        let sy = dot(&s, &y);
        if sy > 1e-14 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if first {
                let scale = sy / dot(&y, &y);
                for (i, row) in h.iter_mut().enumerate() {
                    row.iter_mut().for_each(|x| *x = 0.0);
                    row[i] = scale;
                }
                first = false;
            }
            let hy: Vec<f64> = (0..n).map(|i| dot(&h[i], &y)).collect();
            let yhy = dot(&y, &hy);
            let rho = 1.0 / sy;
            for i in 0..n {
                for j in 0..n {
                    h[i][j] +=
                        (1.0 + yhy * rho) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
        }
    }
    max_iter
}

pub(crate) fn solve<P: ConstrainedProblem>(
    problem: &P,
    start: &[f64],
    settings: &SolverSettings,
) -> SolverOutcome {
    let m = problem.num_constraints();
    let mut v = start.to_vec();
    let mut multipliers = vec![0.0; m];
    let mut penalty = settings.initial_penalty;
    let mut g = vec![0.0; m];
    let mut prev_violation = f64::INFINITY;
    let mut inner_total = 0;
    let mut outer = 0;
    while outer < settings.max_outer {
        outer += 1;
        let before = v.clone();
        {
            let lag = Lagrangian {
                problem,
                multipliers: &multipliers,
                penalty,
            };
            inner_total += bfgs(
                |x, gr| lag.eval(x, gr),
                &mut v,
                settings.max_inner,
                settings.step_tolerance,
            );
        }
        let violation = max_violation(problem, &v, &mut g);
        for i in 0..m {
            multipliers[i] = (multipliers[i] + penalty * g[i]).max(0.0);
        }
        let moved = before
            .iter()
            .zip(&v)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        if violation <= 0.1 * settings.constraint_tolerance
            && moved <= 1e3 * settings.step_tolerance
        {
            break;
        }
        if violation > 0.25 * prev_violation {
            penalty = (penalty * settings.penalty_growth).min(settings.max_penalty);
        }
        prev_violation = violation;
    }
    SolverOutcome {
        v,
        outer_iterations: outer,
        inner_iterations: inner_total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// minimize (x-2)^2 + (y-1)^2 s.t. x^2 + y^2 <= 1; optimum (2,1)/sqrt(5).
    struct Circle;

    impl ConstrainedProblem for Circle {
        fn dim(&self) -> usize {
            2
        }
        fn num_constraints(&self) -> usize {
            1
        }
        fn objective(&self, v: &[f64], grad: &mut [f64]) -> f64 {
            grad[0] = 2.0 * (v[0] - 2.0);
            grad[1] = 2.0 * (v[1] - 1.0);
            (v[0] - 2.0).powi(2) + (v[1] - 1.0).powi(2)
        }
        fn constraints(&self, v: &[f64], values: &mut [f64], jac: &mut [Vec<f64>]) {
            values[0] = v[0] * v[0] + v[1] * v[1] - 1.0;
            jac[0][0] = 2.0 * v[0];
            jac[0][1] = 2.0 * v[1];
        }
    }

    fn settings() -> SolverSettings {
        SolverSettings {
            max_outer: 50,
            max_inner: 500,
            constraint_tolerance: 1e-8,
            step_tolerance: 1e-12,
            initial_penalty: 10.0,
            penalty_growth: 10.0,
            max_penalty: 1e12,
        }
    }

    #[test]
    fn active_constraint() {
        let out = solve(&Circle, &[0.0, 0.0], &settings());
        let s5 = 5f64.sqrt();
        assert!((out.v[0] - 2.0 / s5).abs() < 1e-6, "{:?}", out);
        assert!((out.v[1] - 1.0 / s5).abs() < 1e-6);
        assert!(max_violation(&Circle, &out.v, &mut [0.0]) <= 1e-8);
    }

    #[test]
    fn bfgs_rosenbrock() {
        let mut v = vec![-1.2, 1.0];
        bfgs(
            |x, g| {
                g[0] = -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]);
                g[1] = 200.0 * (x[1] - x[0] * x[0]);
                (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
            },
            &mut v,
            1000,
            1e-14,
        );
        assert!(
            (v[0] - 1.0).abs() < 1e-5 && (v[1] - 1.0).abs() < 1e-5,
            "{v:?}"
        );
    }
}
