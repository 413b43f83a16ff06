//! Three-parameter power-law fit `y = a N^b + c` by Levenberg–Marquardt.

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub stderr_a: f64,
    pub stderr_b: f64,
    pub stderr_c: f64,
    pub rss: f64,
    pub iterations: usize,
    /// `JᵀJ` could not be inverted; `b` comes from a log-log line and the
    /// errors are NaN.
    pub singular: bool,
}

const MAX_ITER: usize = 500;

fn model_and_jacobian(p: &Vector3<f64>, x: f64) -> (f64, Vector3<f64>) {
    let pow = x.powf(p[1]);
    (p[0] * pow + p[2], Vector3::new(pow, p[0] * pow * x.ln(), 1.0))
}

fn rss(p: &Vector3<f64>, pts: &[(f64, f64)]) -> f64 {
    pts.iter()
        .map(|&(x, y)| (y - model_and_jacobian(p, x).0).powi(2))
        .sum()
}

fn normal_equations(p: &Vector3<f64>, pts: &[(f64, f64)]) -> (Matrix3<f64>, Vector3<f64>) {
    let mut jtj = Matrix3::zeros();
    let mut jtr = Vector3::zeros();
    for &(x, y) in pts {
        let (f, g) = model_and_jacobian(p, x);
        jtj += g * g.transpose();
        jtr += g * (y - f);
    }
    (jtj, jtr)
}

/// Least-squares slope of `ln y` on `ln N`, ignoring non-positive values.
fn log_log_slope(pts: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = pts
        .iter()
        .filter(|&&(x, y)| x > 0.0 && y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    linear_slope(&logs).unwrap_or(1.0)
}

fn linear_slope(pts: &[(f64, f64)]) -> Option<f64> {
    let m = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Fits `(N, y)` pairs. Needs at least four points with distinct `N ≥ 1`.
/// Starts from `a` = linear slope, `b = 1`, `c = 0`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite()) {
        return domain("fit points must be finite");
    }
    if points.iter().any(|&(x, _)| x < 1.0) {
        return domain("fit abscissae must be >= 1");
    }
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 4 {
        return domain(format!(
            "power-law fit needs at least 4 distinct N, got {}",
            xs.len()
        ));
    }

    let a0 = linear_slope(points).unwrap_or(1.0);
    let mut p = Vector3::new(if a0 == 0.0 { 1.0 } else { a0 }, 1.0, 0.0);
    let mut cost = rss(&p, points);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    while iterations < MAX_ITER {
        iterations += 1;
        let (jtj, jtr) = normal_equations(&p, points);
        let mut improved = false;
        while lambda < 1e16 {
            let mut damped = jtj;
            for i in 0..3 {
                damped[(i, i)] += lambda * jtj[(i, i)].max(1e-300);
            }
            let Some(step) = damped.cholesky().map(|c| c.solve(&jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let trial = p + step;
            let trial_cost = rss(&trial, points);
            if trial_cost.is_finite() && trial_cost <= cost {
                let small = step.norm() <= 1e-15 * (p.norm() + 1e-15);
                let flat = cost - trial_cost <= 1e-15 * cost;
                p = trial;
                cost = trial_cost;
                lambda = (lambda / 10.0).max(1e-12);
                improved = !(small || flat);
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }

    let (jtj, _) = normal_equations(&p, points);
    let dof = points.len().saturating_sub(3).max(1) as f64;
    let s2 = cost / dof;
    let inverse = jtj.try_inverse().filter(|m| m.iter().all(|v| v.is_finite()));
    let cond_ok = {
        let ev = jtj.symmetric_eigenvalues();
        let (lo, hi) = (ev.min(), ev.max());
        hi > 0.0 && lo > hi * 1e-14
    };
    match inverse {
        Some(inv) if cond_ok => Ok(FitResult {
            a: p[0],
            b: p[1],
            c: p[2],
            stderr_a: (s2 * inv[(0, 0)]).max(0.0).sqrt(),
            stderr_b: (s2 * inv[(1, 1)]).max(0.0).sqrt(),
            stderr_c: (s2 * inv[(2, 2)]).max(0.0).sqrt(),
            rss: cost,
            iterations,
            singular: false,
        }),
        _ => Ok(FitResult {
            a: p[0],
            b: log_log_slope(points),
            c: p[2],
            stderr_a: f64::NAN,
            stderr_b: f64::NAN,
            stderr_c: f64::NAN,
            rss: cost,
            iterations,
            singular: true,
        }),
    }
}
