use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::model::{build_generator, build_hamiltonian, MatrixModel};
use super::state::{StateVector, C64};
use crate::error::{Error, Result};
use crate::params::{ModelParams, Target};

/// Eigen-decomposition `H = V diag(E) Vᵀ` of a real symmetric Hamiltonian.
#[derive(Debug, Clone)]
pub struct Propagator {
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl Propagator {
    pub fn new(h: DMatrix<f64>) -> Self {
        let eig = SymmetricEigen::new(h);
        Self {
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        }
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    /// `e^{-itH} ψ`.
    pub fn evolve(&self, psi: &DVector<C64>, t: f64) -> DVector<C64> {
        if t == 0.0 {
            return psi.clone();
        }
        let v = &self.vectors;
        let (re, im) = split(psi);
        let (cr, ci) = (v.tr_mul(&re), v.tr_mul(&im));
        let mut rot_re = DVector::zeros(cr.len());
        let mut rot_im = DVector::zeros(cr.len());
        for i in 0..cr.len() {
            let phase = C64::from_polar(1.0, -t * self.energies[i]);
            let z = C64::new(cr[i], ci[i]) * phase;
            rot_re[i] = z.re;
            rot_im[i] = z.im;
        }
        join(&(v * rot_re), &(v * rot_im))
    }
}

fn split(psi: &DVector<C64>) -> (DVector<f64>, DVector<f64>) {
    (psi.map(|z| z.re), psi.map(|z| z.im))
}

fn join(re: &DVector<f64>, im: &DVector<f64>) -> DVector<C64> {
    re.zip_map(im, C64::new)
}

/// `∫_0^t e^{-is d} ds`, written as `t e^{-iθ} sin θ / θ` with `θ = t d / 2`.
pub(crate) fn time_kernel(d: f64, t: f64) -> C64 {
    let theta = 0.5 * t * d;
    if theta == 0.0 {
        return C64::from(t);
    }
    C64::from_polar(t * theta.sin() / theta, -theta)
}

/// Integrated generator `O_i = ∫_0^t U(s) H_i U†(s) ds` with `U(s) = e^{-isH}`,
/// stored with the Hamiltonian's eigen-decomposition so states can be evolved.
#[derive(Debug)]
pub struct IntegratedGenerator {
    matrix: DMatrix<C64>,
    target: Target,
    model: MatrixModel,
    params: ModelParams,
    propagator: Propagator,
    energy_tol: f64,
    // U†(t) O U(t), built on first use.
    heisenberg: OnceLock<DMatrix<C64>>,
}

impl IntegratedGenerator {
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn target(&self) -> Target {
        self.target
    }

    pub fn model(&self) -> &MatrixModel {
        &self.model
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn propagator(&self) -> &Propagator {
        &self.propagator
    }

    /// `K = U†(t) O U(t) = ∫_0^t U†(s) H_i U(s) ds`, whose variance on the
    /// initial state is the variance of `O` on the evolved state.
    pub fn heisenberg_matrix(&self) -> &DMatrix<C64> {
        self.heisenberg.get_or_init(|| {
            let m = generator_in_eigenbasis(&self.propagator, self.target, &self.model);
            kernel_product(&self.propagator, &m, self.params.t(), self.energy_tol, true)
        })
    }

    /// Eigenvalues of `O`, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        let herm = (&self.matrix + self.matrix.adjoint()) * C64::from(0.5);
        let mut e: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    /// `λ_max - λ_min` of `O`.
    pub fn spectral_gap(&self) -> f64 {
        let e = self.spectrum();
        e[e.len() - 1] - e[0]
    }
}

/// `V (re + i im) Vᵀ` with real `V`.
fn conjugate_back(v: &DMatrix<f64>, re: &DMatrix<f64>, im: &DMatrix<f64>) -> DMatrix<C64> {
    let vt = v.transpose();
    let r = v * re * &vt;
    let i = v * im * &vt;
    r.zip_map(&i, C64::new)
}

fn energy_threshold(h: &DMatrix<f64>) -> f64 {
    1e-9 * h.amax()
}

/// Evaluates `O_i` exactly through the eigenbasis of `H`: entry `(m, n)` of
/// `Vᵀ H_i V` is multiplied by `∫_0^t e^{-is(E_m - E_n)} ds`.
pub fn integrated_generator(
    params: &ModelParams,
    target: Target,
    model: &MatrixModel,
) -> Result<IntegratedGenerator> {
    let h = build_hamiltonian(params, model)?;
    let energy_tol = energy_threshold(&h);
    let propagator = Propagator::new(h);
    let m = generator_in_eigenbasis(&propagator, target, model);
    let matrix = kernel_product(&propagator, &m, params.t(), energy_tol, false);
    Ok(IntegratedGenerator {
        matrix,
        target,
        model: *model,
        params: *params,
        propagator,
        energy_tol,
        heisenberg: OnceLock::new(),
    })
}

fn generator_in_eigenbasis(
    propagator: &Propagator,
    target: Target,
    model: &MatrixModel,
) -> DMatrix<f64> {
    let v = &propagator.vectors;
    v.tr_mul(&(build_generator(target, model) * v))
}

/// Multiplies the eigenbasis generator entrywise by the time kernel and
/// rotates back. `reversed` gives `U†(t) O U(t)` instead of `O`.
fn kernel_product(
    propagator: &Propagator,
    m: &DMatrix<f64>,
    t: f64,
    energy_tol: f64,
    reversed: bool,
) -> DMatrix<C64> {
    let e = &propagator.energies;
    let dim = e.len();
    let mut re = DMatrix::zeros(dim, dim);
    let mut im = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        for r in 0..dim {
            let d = e[r] - e[c];
            let k = if d.abs() <= energy_tol {
                C64::from(t)
            } else if reversed {
                time_kernel(-d, t)
            } else {
                time_kernel(d, t)
            };
            let z = k * m[(r, c)];
            re[(r, c)] = z.re;
            im[(r, c)] = z.im;
        }
    }
    conjugate_back(&propagator.vectors, &re, &im)
}

pub(crate) fn check_state(state: &StateVector, dim: usize) -> Result<()> {
    if state.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: state.dim(),
        });
    }
    Ok(())
}
