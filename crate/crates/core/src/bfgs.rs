//! Quasi-Newton minimization with a pluggable retraction, so the same loop
//! runs on `R^n` and on the unitary group (steps taken in the Lie algebra at
//! the current point).

pub(crate) trait Problem {
    type Point: Clone;
    fn value(&self, x: &Self::Point) -> f64;
    fn gradient(&self, x: &Self::Point) -> Vec<f64>;
    /// Moves `x` along tangent coordinates `step`.
    fn retract(&self, x: &Self::Point, step: &[f64]) -> Self::Point;
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Options {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub rel_tol: f64,
    /// Cap on the length of a trial step.
    pub max_step: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct Outcome<P> {
    pub point: P,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after every accepted step, starting with the initial value.
    pub history: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn minimize<P: Problem>(problem: &P, start: P::Point, opts: Options) -> Outcome<P::Point> {
    const ARMIJO: f64 = 1e-4;
    const MAX_BACKTRACKS: usize = 50;

    let mut x = start;
    let mut fx = problem.value(&x);
    let mut g = problem.gradient(&x);
    let n = g.len();
    // inverse Hessian approximation, row-major
    let mut h = identity(n);
    let mut history = vec![fx];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iters {
        if norm(&g) < opts.grad_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut p: Vec<f64> = (0..n).map(|i| -dot(&h[i * n..(i + 1) * n], &g)).collect();
        if dot(&p, &g) >= 0.0 {
            h = identity(n);
            p = g.iter().map(|v| -v).collect();
        }
        let len = norm(&p);
        if len > opts.max_step {
            p.iter_mut().for_each(|v| *v *= opts.max_step / len);
        }
        let slope = dot(&p, &g);

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let step: Vec<f64> = p.iter().map(|v| v * t).collect();
            let y = problem.retract(&x, &step);
            let fy = problem.value(&y);
            if fy <= fx + ARMIJO * t * slope && fy < fx {
                accepted = Some((step, y, fy));
                break;
            }
            t *= 0.5;
        }
        let Some((step, y, fy)) = accepted else {
            // no decrease possible at working precision
            converged = norm(&g) < opts.grad_tol.sqrt();
            break;
        };

        let g_new = problem.gradient(&y);
        let yv: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&step, &yv);
        if sy > 1e-12 * norm(&step) * norm(&yv) {
            if iterations == 1 {
                let scale = sy / dot(&yv, &yv);
                h.iter_mut().for_each(|v| *v *= scale);
            }
            bfgs_update(&mut h, &step, &yv, sy);
        }

        let rel_change = (fx - fy).abs() / fx.abs().max(1.0);
        x = y;
        fx = fy;
        g = g_new;
        history.push(fx);
        if rel_change < opts.rel_tol {
            converged = true;
            break;
        }
    }
    Outcome {
        point: x,
        value: fx,
        iterations,
        converged,
        history,
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    h
}

/// `H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T`.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}
