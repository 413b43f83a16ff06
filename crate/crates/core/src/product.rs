//! Multi-start maximization of the generator variance over product states.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

use crate::error::{domain, Error, Result};
use crate::oracle::{fill_product, integrated_generator, MatrixModel, ModelKind, C64};
use crate::params::{ModelParams, Target};

pub use crate::oracle::ProductStateAngles;

pub const DEFAULT_RESTARTS: usize = 64;

/// Variance of `O_i` after evolving the product state, recomputing the
/// generator. Use [`ProductObjective`] for repeated evaluations.
pub fn product_variance(
    angles: &ProductStateAngles,
    params: &ModelParams,
    target: Target,
    model: &MatrixModel,
) -> Result<f64> {
    if angles.n() != model.n() {
        return Err(Error::DimensionMismatch {
            expected: 2 * model.n(),
            got: 2 * angles.n(),
        });
    }
    if params.n() != model.n() {
        return Err(Error::DimensionMismatch {
            expected: model.n(),
            got: params.n(),
        });
    }
    let obj = ProductObjective::new(params, target, model)?;
    Ok(obj.variance(&angles.interleaved()))
}

/// `K = U† O U` split into real and imaginary parts, so one variance costs two
/// real `dim × dim × 2` products.
#[derive(Debug, Clone)]
pub struct ProductObjective {
    n: usize,
    re: DMatrix<f64>,
    im: DMatrix<f64>,
}

impl ProductObjective {
    pub fn new(params: &ModelParams, target: Target, model: &MatrixModel) -> Result<Self> {
        let gen = integrated_generator(params, target, model)?;
        let k = gen.heisenberg_matrix();
        Ok(Self {
            n: model.n(),
            re: k.map(|z| z.re),
            im: k.map(|z| z.im),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Variance for interleaved angles `[θ_1, φ_1, …]`. Angles need not be
    /// wrapped.
    pub fn variance(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), 2 * self.n, "angle vector length");
        let dim = self.re.nrows();
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        fill_product(x, &mut amps);
        let mut psi = DMatrix::<f64>::zeros(dim, 2);
        for (i, a) in amps.iter().enumerate() {
            psi[(i, 0)] = a.re;
            psi[(i, 1)] = a.im;
        }
        let r = &self.re * &psi;
        let m = &self.im * &psi;
        // Kψ = (Kr ψr − Ki ψi) + i (Kr ψi + Ki ψr)
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for i in 0..dim {
            let kr = r[(i, 0)] - m[(i, 1)];
            let ki = r[(i, 1)] + m[(i, 0)];
            m1 += psi[(i, 0)] * kr + psi[(i, 1)] * ki;
            m2 += kr * kr + ki * ki;
        }
        (m2 - m1 * m1).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NelderMeadOptions {
    /// Stop once every vertex lies within this distance of the best one.
    pub diameter_tol: f64,
    pub max_evals: usize,
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            diameter_tol: 1e-8,
            max_evals: 40_000,
            initial_step: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Nelder–Mead with dimension-adaptive coefficients (Gao & Han).
pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let nf = n as f64;
    let (alpha, gamma) = (1.0, 1.0 + 2.0 / nf);
    let (rho, sigma) = (0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);

    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }

    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &simplex[0].0;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| dist(x, best))
            .fold(0.0, f64::max);
        if diameter < opts.diameter_tol {
            converged = true;
            break;
        }
        if evals >= opts.max_evals {
            break;
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / nf;
            }
        }
        let along = |t: f64, worst: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(worst)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let worst = simplex[n].0.clone();
        let (f_best, f_second) = (simplex[0].1, simplex[n - 1].1);
        let f_worst = simplex[n].1;

        let xr = along(-alpha, &worst);
        let fr = eval(&xr, &mut evals);
        if fr < f_best {
            let xe = along(-alpha * gamma, &worst);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < f_worst {
            let xc = along(-alpha * rho, &worst);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(rho, &worst);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < fr.min(f_worst) {
            simplex[n] = (xc, fc);
            continue;
        }
        let x_best = simplex[0].0.clone();
        for (x, v) in simplex.iter_mut().skip(1) {
            for (xi, bi) in x.iter_mut().zip(&x_best) {
                *xi = bi + sigma * (*xi - bi);
            }
            *v = eval(x, &mut evals);
        }
    }
    let (x, value) = simplex.swap_remove(0);
    Minimum {
        x,
        value,
        evaluations: evals,
        converged,
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartLog {
    pub index: usize,
    pub variance: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptRun {
    pub params: ModelParams,
    pub target: Target,
    pub model: ModelKind,
    pub restarts: usize,
    pub seed: u64,
    pub best_variance: f64,
    pub best_angles: ProductStateAngles,
    pub per_restart: Vec<RestartLog>,
}

impl OptRun {
    pub fn restarts_converged(&self) -> usize {
        self.per_restart.iter().filter(|r| r.converged).count()
    }
}

/// Starting point of restart `index`: its own ChaCha stream under `seed`, so
/// results do not depend on scheduling.
pub fn restart_start(seed: u64, index: usize, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    (0..n)
        .flat_map(|_| [rng.gen::<f64>() * PI, rng.gen::<f64>() * TAU])
        .collect()
}

/// Best product-state variance over `restarts` Nelder–Mead runs. Runs on the
/// current rayon pool; the result is identical for any pool size.
pub fn optimize(
    params: &ModelParams,
    target: Target,
    model: &MatrixModel,
    restarts: usize,
    seed: u64,
    opts: &NelderMeadOptions,
) -> Result<OptRun> {
    if model.n() < 2 {
        return domain("product optimization needs N >= 2");
    }
    if params.n() != model.n() {
        return Err(Error::DimensionMismatch {
            expected: model.n(),
            got: params.n(),
        });
    }
    if restarts == 0 {
        return domain("need at least one restart");
    }
    let obj = ProductObjective::new(params, target, model)?;
    let results: Vec<Minimum> = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let x0 = restart_start(seed, i, model.n());
            nelder_mead(|x| -obj.variance(x), &x0, opts)
        })
        .collect();

    // Ties go to the lowest restart index.
    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if -r.value > -results[best].value {
            best = i;
        }
    }
    let per_restart = results
        .iter()
        .enumerate()
        .map(|(index, r)| RestartLog {
            index,
            variance: -r.value,
            evaluations: r.evaluations,
            converged: r.converged,
        })
        .collect();
    Ok(OptRun {
        params: *params,
        target,
        model: model.kind(),
        restarts,
        seed,
        best_variance: -results[best].value,
        best_angles: ProductStateAngles::from_interleaved(&results[best].x)?,
        per_restart,
    })
}

/// Exhaustive random sampling of product states; a crude reference for the
/// optimizer.
pub fn random_search(obj: &ProductObjective, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    let mut x = vec![0.0; 2 * obj.n()];
    for _ in 0..samples {
        for pair in x.chunks_mut(2) {
            // Uniform on the sphere.
            pair[0] = (1.0 - 2.0 * rng.gen::<f64>()).acos();
            pair[1] = rng.gen::<f64>() * TAU;
        }
        best = best.max(obj.variance(&x));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{make_state, variance_of, StateKind};

    fn p(n: usize, j: f64, b: f64, t: f64) -> ModelParams {
        ModelParams::new(n, j, b, t).unwrap()
    }

    #[test]
    fn objective_matches_oracle_variance() {
        let params = p(4, 0.8, -0.3, 1.7);
        let model = MatrixModel::new(ModelKind::SpinPeriodic, 4).unwrap();
        let angles = ProductStateAngles::new(vec![0.3, 1.1, 2.0, 2.9], vec![0.1, 4.0, 2.2, 5.5])
            .unwrap();
        let gen = integrated_generator(&params, Target::EstimateJ, &model).unwrap();
        let state = make_state(&StateKind::Product(angles.clone()), 4).unwrap();
        let want = variance_of(&state, &gen).unwrap().variance;
        let got = product_variance(&angles, &params, Target::EstimateJ, &model).unwrap();
        assert!((got - want).abs() < 1e-10 * want.max(1.0), "{got} vs {want}");
    }

    #[test]
    fn nelder_mead_quadratic() {
        let m = nelder_mead(
            |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2),
            &[0.0, 0.0],
            &NelderMeadOptions::default(),
        );
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-7 && (m.x[1] + 2.0).abs() < 1e-7);
    }

    #[test]
    fn field_only_optimum_is_n_t_squared() {
        let (n, t) = (4, 2.0);
        let params = p(n, 0.0, 1.0, t);
        let model = MatrixModel::new(ModelKind::SpinOpen, n).unwrap();
        let run = optimize(
            &params,
            Target::EstimateB,
            &model,
            8,
            3,
            &NelderMeadOptions::default(),
        )
        .unwrap();
        assert!((run.best_variance - n as f64 * t * t).abs() < 1e-6);
    }

    #[test]
    fn staggered_basis_state_reference() {
        // Any computational basis state gives (N-1) t² for the open-chain
        // coupling generator at B = 0.
        for n in 2..=6 {
            let t = 1.5;
            let params = p(n, 1.0, 0.0, t);
            let model = MatrixModel::new(ModelKind::SpinOpen, n).unwrap();
            let bits: Vec<bool> = (0..n).map(|i| i % 2 == 1).collect();
            let state = make_state(&StateKind::BasisString(bits), n).unwrap();
            let gen = integrated_generator(&params, Target::EstimateJ, &model).unwrap();
            let v = variance_of(&state, &gen).unwrap().variance;
            assert!((v - (n - 1) as f64 * t * t).abs() < 1e-10);
        }
    }

    #[test]
    fn deterministic_and_monotone_in_restarts() {
        let params = p(3, 1.0, 0.7, 2.0);
        let model = MatrixModel::new(ModelKind::SpinOpen, 3).unwrap();
        let opts = NelderMeadOptions::default();
        let a = optimize(&params, Target::EstimateJ, &model, 6, 11, &opts).unwrap();
        let b = optimize(&params, Target::EstimateJ, &model, 6, 11, &opts).unwrap();
        assert_eq!(a, b);
        let mut last = 0.0;
        for r in 1..=6 {
            let run = optimize(&params, Target::EstimateJ, &model, r, 11, &opts).unwrap();
            assert!(run.best_variance >= last);
            last = run.best_variance;
        }
        assert_eq!(last, a.best_variance);
    }

    #[test]
    fn bounded_by_max_variance() {
        let params = p(4, 1.0, 0.6, 3.0);
        let model = MatrixModel::new(ModelKind::FermionCyclic, 4).unwrap();
        for target in [Target::EstimateJ, Target::EstimateB] {
            let run =
                optimize(&params, target, &model, 8, 5, &NelderMeadOptions::default()).unwrap();
            let bound = crate::fermion::max_variance(&params, target).variance;
            assert!(run.best_variance <= bound * (1.0 + 1e-10), "{target:?}");
        }
    }

    #[test]
    fn rejects_mismatched_sizes() {
        let model = MatrixModel::new(ModelKind::SpinOpen, 3).unwrap();
        let angles = ProductStateAngles::uniform(2, 0.0, 0.0).unwrap();
        assert!(product_variance(&angles, &p(3, 1.0, 1.0, 1.0), Target::EstimateJ, &model).is_err());
    }
}
