//! Pauli strings and Jordan–Wigner operators on `N` qubits.
//!
//! Computational-basis index: site 1 is the most significant bit, `|0⟩` is the
//! `Z = +1` state. Every operator built here maps each basis state to at most
//! one basis state with a real weight, so it is stored as a [`Monomial`] and
//! only expanded to a dense matrix on request.

use nalgebra::DMatrix;

use crate::error::{domain, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    sites: usize,
    /// `image[c] = Some((r, w))` means `|c⟩ -> w |r⟩`.
    image: Vec<Option<(usize, f64)>>,
}

impl Monomial {
    pub fn identity(sites: usize) -> Self {
        Self {
            sites,
            image: (0..1usize << sites).map(|c| Some((c, 1.0))).collect(),
        }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.image.len()
    }

    fn bit(&self, site: usize) -> usize {
        1 << (self.sites - 1 - site)
    }

    fn from_fn(sites: usize, f: impl Fn(usize) -> Option<(usize, f64)>) -> Self {
        Self {
            sites,
            image: (0..1usize << sites).map(f).collect(),
        }
    }

    /// `σ_x` on 0-based `site`.
    pub fn pauli_x(sites: usize, site: usize) -> Self {
        let bit = Self::identity(sites).bit(site);
        Self::from_fn(sites, |c| Some((c ^ bit, 1.0)))
    }

    /// `σ_z` on 0-based `site`.
    pub fn pauli_z(sites: usize, site: usize) -> Self {
        let bit = Self::identity(sites).bit(site);
        Self::from_fn(sites, |c| Some((c, if c & bit == 0 { 1.0 } else { -1.0 })))
    }

    /// Jordan–Wigner annihilator `a_j = (⊗_{k<j} σ_z) ⊗ σ⁻_j`, with
    /// `σ⁻ = |1⟩⟨0|` and 0-based `site`. The fermionic vacuum is `|1…1⟩`.
    pub fn annihilator(sites: usize, site: usize) -> Self {
        let bit = Self::identity(sites).bit(site);
        let string_mask = !((bit << 1) - 1) & ((1usize << sites) - 1);
        Self::from_fn(sites, |c| {
            if c & bit != 0 {
                return None;
            }
            let ones = (c & string_mask).count_ones();
            let sign = if ones.is_multiple_of(2) { 1.0 } else { -1.0 };
            Some((c | bit, sign))
        })
    }

    pub fn adjoint(&self) -> Self {
        let mut image = vec![None; self.dim()];
        for (c, slot) in self.image.iter().enumerate() {
            if let Some((r, w)) = *slot {
                image[r] = Some((c, w));
            }
        }
        Self {
            sites: self.sites,
            image,
        }
    }

    /// Operator product `self · rhs` (apply `rhs` first).
    pub fn then_after(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.sites, rhs.sites);
        let image = rhs
            .image
            .iter()
            .map(|slot| {
                let (mid, w1) = (*slot)?;
                let (r, w2) = self.image[mid]?;
                Some((r, w1 * w2))
            })
            .collect();
        Self {
            sites: self.sites,
            image,
        }
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        for (_, w) in self.image.iter_mut().flatten() {
            *w *= factor;
        }
        self
    }

    /// `dense += coeff · self`.
    pub fn accumulate(&self, dense: &mut DMatrix<f64>, coeff: f64) {
        for (c, slot) in self.image.iter().enumerate() {
            if let Some((r, w)) = *slot {
                dense[(r, c)] += coeff * w;
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        self.accumulate(&mut m, 1.0);
        m
    }
}

/// Sum of monomials with real coefficients, assembled into a dense matrix.
#[derive(Debug, Clone)]
pub struct OperatorSum {
    dim: usize,
    terms: Vec<(f64, Monomial)>,
}

impl OperatorSum {
    pub fn new(sites: usize) -> Self {
        Self {
            dim: 1 << sites,
            terms: Vec::new(),
        }
    }

    pub fn push(&mut self, coeff: f64, term: Monomial) {
        debug_assert_eq!(term.dim(), self.dim);
        self.terms.push((coeff, term));
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (coeff, term) in &self.terms {
            term.accumulate(&mut m, *coeff);
        }
        m
    }
}

/// Explicit `(a_j, a_j†)` for 1-based mode `j` on `n` sites.
pub fn jw_mode_matrix(n: usize, j: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if j == 0 || j > n {
        return domain(format!("mode {j} out of range 1..={n}"));
    }
    crate::oracle::check_size(n)?;
    let a = Monomial::annihilator(n, j - 1);
    Ok((a.to_dense(), a.adjoint().to_dense()))
}
