use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::check_size;
use super::operators::{Monomial, OperatorSum};
use crate::error::{domain, Result};
use crate::params::{ModelParams, Target};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    /// `J Σ_{i<N} X_i X_{i+1} + B Σ Z_i`.
    SpinOpen,
    /// Same with the bond `X_N X_1`.
    SpinPeriodic,
    /// The quadratic form `J Σ_j (a†_j - a_j)(a†_{j+1} + a_{j+1}) + 2B Σ_j a†_j a_j`
    /// with `a_{N+1} ≡ a_1` imposed on the fermions.
    FermionCyclic,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [
        ModelKind::SpinOpen,
        ModelKind::SpinPeriodic,
        ModelKind::FermionCyclic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::SpinOpen => "spin-open",
            ModelKind::SpinPeriodic => "spin-periodic",
            ModelKind::FermionCyclic => "fermion-cyclic",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .map_or_else(|| domain(format!("unknown model '{s}'")), Ok)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatrixModel {
    kind: ModelKind,
    n: usize,
}

impl MatrixModel {
    pub fn new(kind: ModelKind, n: usize) -> Result<Self> {
        if n < 2 {
            return domain(format!("chain size must be at least 2, got {n}"));
        }
        check_size(n)?;
        Ok(Self { kind, n })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    fn bonds(&self) -> usize {
        match self.kind {
            ModelKind::SpinOpen => self.n - 1,
            ModelKind::SpinPeriodic | ModelKind::FermionCyclic => self.n,
        }
    }

    fn coupling_terms(&self) -> OperatorSum {
        let n = self.n;
        let mut sum = OperatorSum::new(n);
        for i in 0..self.bonds() {
            let next = (i + 1) % n;
            match self.kind {
                ModelKind::SpinOpen | ModelKind::SpinPeriodic => {
                    sum.push(1.0, Monomial::pauli_x(n, i).then_after(&Monomial::pauli_x(n, next)));
                }
                ModelKind::FermionCyclic => {
                    let a = Monomial::annihilator(n, i);
                    let ad = a.adjoint();
                    let b = Monomial::annihilator(n, next);
                    let bd = b.adjoint();
                    // (a† - a)(b† + b)
                    sum.push(1.0, ad.then_after(&bd));
                    sum.push(1.0, ad.then_after(&b));
                    sum.push(-1.0, a.then_after(&bd));
                    sum.push(-1.0, a.then_after(&b));
                }
            }
        }
        sum
    }

    fn field_terms(&self, fermion_weight: f64) -> OperatorSum {
        let n = self.n;
        let mut sum = OperatorSum::new(n);
        for i in 0..n {
            match self.kind {
                ModelKind::SpinOpen | ModelKind::SpinPeriodic => {
                    sum.push(1.0, Monomial::pauli_z(n, i));
                }
                ModelKind::FermionCyclic => {
                    let a = Monomial::annihilator(n, i);
                    let ad = a.adjoint();
                    sum.push(fermion_weight, ad.then_after(&a));
                }
            }
        }
        sum
    }
}

fn check_match(params: &ModelParams, model: &MatrixModel) -> Result<()> {
    if params.n() != model.n() {
        return domain(format!(
            "parameter chain size {} does not match model size {}",
            params.n(),
            model.n()
        ));
    }
    Ok(())
}

/// Dense Hamiltonian of the chosen model. All three models are real symmetric.
pub fn build_hamiltonian(params: &ModelParams, model: &MatrixModel) -> Result<DMatrix<f64>> {
    check_match(params, model)?;
    let mut h = model.coupling_terms().to_dense() * params.j();
    // Fermion model: 2B Σ a†a, which is B Σ Z + N B.
    h += model.field_terms(2.0).to_dense() * params.b();
    Ok(h)
}

/// Generator `H_1` (for `J`) or `H_2` (for `B`).
///
/// For the fermion model `H_2 = Σ_j (a†_j a_j - a_j a†_j)`, the momentum-block
/// form without offset; it differs from `∂H/∂B = 2 Σ a†a` by `N · 1`.
pub fn build_generator(target: Target, model: &MatrixModel) -> DMatrix<f64> {
    match target {
        Target::EstimateJ => model.coupling_terms().to_dense(),
        Target::EstimateB => match model.kind {
            ModelKind::FermionCyclic => {
                let n = model.dim();
                model.field_terms(2.0).to_dense() - DMatrix::<f64>::identity(n, n)
                    * model.n() as f64
            }
            _ => model.field_terms(1.0).to_dense(),
        },
    }
}

/// `‖M - Mᵀ‖_max`.
pub fn hermiticity_defect(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).amax()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;

    fn sorted_eigs(m: DMatrix<f64>) -> Vec<f64> {
        let mut e: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    fn p(n: usize, j: f64, b: f64) -> ModelParams {
        ModelParams::new(n, j, b, 1.0).unwrap()
    }

    #[test]
    fn two_site_spectra() {
        let m = MatrixModel::new(ModelKind::SpinOpen, 2).unwrap();
        let e = sorted_eigs(build_hamiltonian(&p(2, 0.0, 1.0), &m).unwrap());
        assert_eq!(e, vec![-2.0, 0.0, 0.0, 2.0]);
        let e = sorted_eigs(build_hamiltonian(&p(2, 1.0, 0.0), &m).unwrap());
        for (x, y) in e.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn all_models_are_symmetric() {
        for kind in ModelKind::ALL {
            for n in 2..=6 {
                let m = MatrixModel::new(kind, n).unwrap();
                let h = build_hamiltonian(&p(n, 0.7, -1.3), &m).unwrap();
                assert!(hermiticity_defect(&h) <= 1e-12);
                for target in [Target::EstimateJ, Target::EstimateB] {
                    assert!(hermiticity_defect(&build_generator(target, &m)) <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn field_generator_diagonal() {
        for kind in ModelKind::ALL {
            let m = MatrixModel::new(kind, 3).unwrap();
            let g = build_generator(Target::EstimateB, &m);
            let diag: Vec<f64> = (0..8).map(|i| g[(i, i)]).collect();
            assert_eq!(diag, vec![3.0, 1.0, 1.0, -1.0, 1.0, -1.0, -1.0, -3.0]);
            assert_eq!(g.amax(), 3.0);
        }
    }

    #[test]
    fn coupling_generator_is_xx_for_two_open_sites() {
        let m = MatrixModel::new(ModelKind::SpinOpen, 2).unwrap();
        let xx = Monomial::pauli_x(2, 0).then_after(&Monomial::pauli_x(2, 1)).to_dense();
        assert_eq!(build_generator(Target::EstimateJ, &m), xx);
    }

    #[test]
    fn generator_is_derivative() {
        let eps = 1e-5;
        for kind in ModelKind::ALL {
            let m = MatrixModel::new(kind, 4).unwrap();
            let hp = build_hamiltonian(&p(4, 0.8 + eps, 1.1), &m).unwrap();
            let hm = build_hamiltonian(&p(4, 0.8 - eps, 1.1), &m).unwrap();
            let d = (hp - hm) / (2.0 * eps);
            assert!((d - build_generator(Target::EstimateJ, &m)).amax() <= eps * eps);
        }
    }

    #[test]
    fn fermion_bulk_bond_is_minus_xx() {
        // Away from the wrap-around bond the JW quadratic form is -X_j X_{j+1}.
        let n = 4;
        let a = Monomial::annihilator(n, 1);
        let b = Monomial::annihilator(n, 2);
        let mut s = OperatorSum::new(n);
        s.push(1.0, a.adjoint().then_after(&b.adjoint()));
        s.push(1.0, a.adjoint().then_after(&b));
        s.push(-1.0, a.then_after(&b.adjoint()));
        s.push(-1.0, a.then_after(&b));
        let xx = Monomial::pauli_x(n, 1).then_after(&Monomial::pauli_x(n, 2)).to_dense();
        assert!((s.to_dense() + xx).amax() < 1e-15);
    }

    #[test]
    fn model_names_round_trip() {
        for kind in ModelKind::ALL {
            assert_eq!(kind.name().parse::<ModelKind>().unwrap(), kind);
        }
        assert!("spin".parse::<ModelKind>().is_err());
    }
}
