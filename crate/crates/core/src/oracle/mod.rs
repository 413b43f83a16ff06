//! Brute-force `2^N` matrix oracle: explicit spin and Jordan–Wigner
//! Hamiltonians, the integrated generator via eigen-decomposition, and two
//! independent routes to the pure-state QFI.

mod generator;
mod model;
mod operators;
mod state;

pub use generator::{integrated_generator, IntegratedGenerator, Propagator};
pub use model::{build_generator, build_hamiltonian, hermiticity_defect, MatrixModel, ModelKind};
pub use operators::{jw_mode_matrix, Monomial, OperatorSum};
pub use state::{make_state, ProductStateAngles, StateKind, StateVector, C64};

pub(crate) use state::fill_product;

use nalgebra::DVector;

use crate::error::{domain, Error, Result};
use crate::fermion::VarianceResult;
use crate::params::{ModelParams, Target};

pub const DEFAULT_N_MAX: usize = 12;

/// Largest chain handled by the dense oracle; `ISING_QFI_NMAX` overrides it.
pub fn n_max() -> usize {
    std::env::var("ISING_QFI_NMAX")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n >= 2 && n < usize::BITS as usize)
        .unwrap_or(DEFAULT_N_MAX)
}

pub(crate) fn check_size(n: usize) -> Result<()> {
    let max = n_max();
    if n > max {
        return Err(Error::TooLarge { n, max });
    }
    Ok(())
}

fn mean_and_second_moment(op: &nalgebra::DMatrix<C64>, psi: &DVector<C64>) -> (f64, f64) {
    let o_psi = op * psi;
    (psi.dotc(&o_psi).re, o_psi.norm_squared())
}

/// Variance of `O` on the evolved state `U(t)|ψ⟩`, i.e. of `U† O U` on `|ψ⟩`.
pub fn variance_of(state: &StateVector, gen: &IntegratedGenerator) -> Result<VarianceResult> {
    generator::check_state(state, gen.model().dim())?;
    let evolved = gen.propagator().evolve(state.amplitudes(), gen.params().t());
    let (m1, m2) = mean_and_second_moment(gen.matrix(), &evolved);
    Ok(VarianceResult::new(m2 - m1 * m1))
}

/// `⟨O⟩` on the evolved state.
pub fn mean_of(state: &StateVector, gen: &IntegratedGenerator) -> Result<f64> {
    generator::check_state(state, gen.model().dim())?;
    let evolved = gen.propagator().evolve(state.amplitudes(), gen.params().t());
    Ok(mean_and_second_moment(gen.matrix(), &evolved).0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteDifferenceQfi {
    pub qfi: f64,
    /// Set when the step is small enough for round-off to dominate.
    pub cancellation_warning: bool,
}

/// QFI from the central difference `(U(λ+ε)ψ - U(λ-ε)ψ) / 2ε` of the evolved
/// state, without going through the integrated generator.
pub fn qfi_finite_difference(
    params: &ModelParams,
    target: Target,
    model: &MatrixModel,
    state: &StateVector,
    eps: f64,
) -> Result<FiniteDifferenceQfi> {
    if !(eps > 0.0 && eps.is_finite()) {
        return domain(format!("finite-difference step must be positive, got {eps}"));
    }
    generator::check_state(state, model.dim())?;
    let shifted = |delta: f64| -> Result<ModelParams> {
        match target {
            Target::EstimateJ => params.with_couplings(params.j() + delta, params.b()),
            Target::EstimateB => params.with_couplings(params.j(), params.b() + delta),
        }
    };
    let evolve = |p: &ModelParams| -> Result<DVector<C64>> {
        let h = build_hamiltonian(p, model)?;
        Ok(Propagator::new(h).evolve(state.amplitudes(), p.t()))
    };
    let center = evolve(params)?;
    let plus = evolve(&shifted(eps)?)?;
    let minus = evolve(&shifted(-eps)?)?;
    let deriv = (plus - minus) / C64::from(2.0 * eps);
    let overlap = deriv.dotc(&center);
    let qfi = 4.0 * (deriv.norm_squared() - overlap.norm_sqr());
    Ok(FiniteDifferenceQfi {
        qfi: qfi.max(0.0),
        cancellation_warning: eps < 1e-12,
    })
}
