//! Large-N, large-t prefactors of the maximal (`G`) and GHZ (`F`) variances,
//! normalized so that `Δ²O / (N² t²) -> G(g)` resp. `F(g)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::fermion::max_variance;
use crate::params::{ModelParams, Target};
use crate::quadrature::integrate;

pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-10;

/// `G(g)` for `g ≥ 1` and `g -> ∞`.
pub const G_STRONG_COUPLING: f64 = 4.0 / (PI * PI);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Curve {
    OptimalG,
    GhzF,
}

/// Half-angle form of `(1 + g cos x)` and `1 + g² + 2g cos x`, free of the
/// cancellation at `x = π`.
fn numerator_denominator(g: f64, x: f64) -> (f64, f64) {
    let c = (0.5 * x).cos();
    let c2 = c * c;
    let num = (1.0 - g) + 2.0 * g * c2;
    let den = (1.0 - g) * (1.0 - g) + 4.0 * g * c2;
    (num, den)
}

fn optimal_integrand(g: f64, x: f64) -> f64 {
    let (num, den) = numerator_denominator(g, x);
    if den == 0.0 {
        // g = 1, x = π: the integrand is |cos(x/2)| there.
        return 0.0;
    }
    num.abs() / den.sqrt()
}

fn ghz_integrand(g: f64, x: f64) -> f64 {
    let (num, den) = numerator_denominator(g, x);
    if den == 0.0 {
        return 0.0;
    }
    num * num / den
}

fn check_ratio(g: f64) -> Result<()> {
    if !g.is_finite() || g < 0.0 {
        return domain(format!("coupling ratio must be finite and non-negative, got {g}"));
    }
    Ok(())
}

/// Mean of the integrand over a full period, using the reflection symmetry
/// about `x = π` and splitting at interior kinks.
fn period_mean(integrand: impl Fn(f64) -> f64, breaks: &[f64], tol: f64) -> f64 {
    let mut total = 0.0;
    let mut lo = 0.0;
    let pieces = breaks.len() + 1;
    for &hi in breaks.iter().chain(std::iter::once(&PI)) {
        total += integrate(&integrand, lo, hi, tol / pieces as f64).value;
        lo = hi;
    }
    total / PI
}

pub fn g_optimal_with_tol(g: f64, tol: f64) -> Result<f64> {
    check_ratio(g)?;
    if g == 0.0 {
        return Ok(1.0);
    }
    // For g > 1 the numerator changes sign at cos x = -1/g.
    let breaks: Vec<f64> = if g > 1.0 {
        vec![(-1.0 / g).acos()]
    } else {
        Vec::new()
    };
    let mean = period_mean(|x| optimal_integrand(g, x), &breaks, tol);
    Ok(mean * mean)
}

/// Prefactor of the optimal-state variance, `(1/2π ∫ |1+g cos x| / √(1+g²+2g cos x) dx)²`.
pub fn g_optimal(g: f64) -> Result<f64> {
    g_optimal_with_tol(g, DEFAULT_QUADRATURE_TOL)
}

pub fn f_ghz_with_tol(g: f64, tol: f64) -> Result<f64> {
    check_ratio(g)?;
    if g == 0.0 {
        return Ok(1.0);
    }
    let mean = period_mean(|x| ghz_integrand(g, x), &[], tol);
    Ok(mean * mean)
}

/// Prefactor of the GHZ variance, `(1/2π ∫ (1+g cos θ)² / (1+g²+2g cos θ) dθ)²`.
pub fn f_ghz(g: f64) -> Result<f64> {
    f_ghz_with_tol(g, DEFAULT_QUADRATURE_TOL)
}

pub fn prefactor(curve: Curve, g: f64, tol: f64) -> Result<f64> {
    match curve {
        Curve::OptimalG => g_optimal_with_tol(g, tol),
        Curve::GhzF => f_ghz_with_tol(g, tol),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrefactorCurve {
    pub curve: Curve,
    pub grid: Vec<(f64, f64)>,
    pub quadrature_tol: f64,
}

impl PrefactorCurve {
    /// Evaluates the curve on `gs` in parallel; output keeps the input order.
    pub fn sample(curve: Curve, gs: &[f64], quadrature_tol: f64) -> Result<Self> {
        let grid = gs
            .par_iter()
            .map(|&g| prefactor(curve, g, quadrature_tol).map(|v| (g, v)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            curve,
            grid,
            quadrature_tol,
        })
    }
}

/// One-sided difference quotients `(left, right)` of the chosen prefactor at `g0`.
pub fn kink_detect(curve: Curve, g0: f64, h: f64) -> Result<(f64, f64)> {
    if !(h > 0.0 && g0 > h) {
        return domain(format!("need g0 > h > 0, got g0={g0}, h={h}"));
    }
    let tol = DEFAULT_QUADRATURE_TOL;
    let center = prefactor(curve, g0, tol)?;
    let left = (center - prefactor(curve, g0 - h, tol)?) / h;
    let right = (prefactor(curve, g0 + h, tol)? - center) / h;
    Ok((left, right))
}

/// `max_variance / (N² t²) - G(ratio)` with `ratio = B/J` for `J` and `J/B`
/// for `B`.
///
/// Both targets run through the same code: `B`-estimation is evaluated as
/// `J`-estimation on the dual chain with `J` and `B` exchanged.
pub fn asymptotic_check(params: &ModelParams, target: Target) -> Result<f64> {
    let dual = match target {
        Target::EstimateJ => *params,
        Target::EstimateB => params.swapped(),
    };
    let ratio = if dual.j() == 0.0 {
        if dual.b() == 0.0 {
            return domain("asymptotic ratio undefined for J = B = 0");
        }
        f64::INFINITY
    } else {
        (dual.b() / dual.j()).abs()
    };
    let g = if ratio.is_infinite() {
        G_STRONG_COUPLING
    } else {
        g_optimal(ratio)?
    };
    let n = dual.n() as f64;
    let t = dual.t();
    if t == 0.0 {
        return Ok(-g);
    }
    let v = max_variance(&dual, Target::EstimateJ).variance;
    Ok(v / (n * n * t * t) - g)
}
