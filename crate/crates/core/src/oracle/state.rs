use std::f64::consts::{PI, TAU};

use nalgebra::{Complex, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub type C64 = Complex<f64>;

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized.
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return domain(format!("state length {len} is not a power of two"));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn normalized(amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return domain("cannot normalize a zero or non-finite vector");
        }
        Self::new(amplitudes / C64::from(norm))
    }

    /// From separate real and imaginary parts; must already be normalized.
    pub fn from_parts(re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::DimensionMismatch {
                expected: re.len(),
                got: im.len(),
            });
        }
        Self::new(DVector::from_iterator(
            re.len(),
            re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)),
        ))
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn sites(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }
}

/// Bloch angles of a pure product state: qubit `i` is
/// `cos(θ_i/2)|0⟩ + e^{iφ_i} sin(θ_i/2)|1⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductStateAngles {
    thetas: Vec<f64>,
    phis: Vec<f64>,
}

/// Folds an unconstrained polar angle into `[0, π]`.
fn fold_polar(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r > PI {
        TAU - r
    } else {
        r
    }
}

impl ProductStateAngles {
    /// Builds angles from `thetas` and `phis`, wrapping them into `[0, π]` and
    /// `[0, 2π)`. Wrapping a polar angle across a pole shifts the azimuth by π
    /// so the represented state is unchanged.
    pub fn new(thetas: Vec<f64>, phis: Vec<f64>) -> Result<Self> {
        if thetas.len() != phis.len() {
            return Err(Error::DimensionMismatch {
                expected: thetas.len(),
                got: phis.len(),
            });
        }
        if thetas.iter().chain(&phis).any(|x| !x.is_finite()) {
            return domain("product-state angles must be finite");
        }
        let mut th = Vec::with_capacity(thetas.len());
        let mut ph = Vec::with_capacity(phis.len());
        for (&t, &p) in thetas.iter().zip(&phis) {
            let r = t.rem_euclid(TAU);
            let shift = if r > PI { PI } else { 0.0 };
            th.push(fold_polar(t));
            ph.push((p + shift).rem_euclid(TAU));
        }
        Ok(Self { thetas: th, phis: ph })
    }

    /// Interleaved `[θ_1, φ_1, θ_2, φ_2, …]`, the optimizer's layout.
    pub fn from_interleaved(x: &[f64]) -> Result<Self> {
        if !x.len().is_multiple_of(2) {
            return domain("interleaved angle vector must have even length");
        }
        let thetas = x.iter().step_by(2).copied().collect();
        let phis = x.iter().skip(1).step_by(2).copied().collect();
        Self::new(thetas, phis)
    }

    pub fn uniform(n: usize, theta: f64, phi: f64) -> Result<Self> {
        Self::new(vec![theta; n], vec![phi; n])
    }

    pub fn n(&self) -> usize {
        self.thetas.len()
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn interleaved(&self) -> Vec<f64> {
        self.thetas
            .iter()
            .zip(&self.phis)
            .flat_map(|(&t, &p)| [t, p])
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateKind {
    /// `(|0…0⟩ + |1…1⟩)/√2`.
    Ghz,
    /// `(|00⟩^{⊗N/2} + |01⟩^{⊗N/2})/√2`; even `N` only.
    StaggeredGhz,
    Product(ProductStateAngles),
    /// Computational basis state, site 1 first.
    BasisString(Vec<bool>),
}

/// Writes the product amplitudes into `out` (length `2^N`).
pub(crate) fn fill_product(angles_interleaved: &[f64], out: &mut [C64]) {
    let n = angles_interleaved.len() / 2;
    out[0] = C64::new(1.0, 0.0);
    let mut len = 1;
    for i in 0..n {
        let (th, ph) = (angles_interleaved[2 * i], angles_interleaved[2 * i + 1]);
        let up = C64::from((0.5 * th).cos());
        let down = C64::from_polar((0.5 * th).sin(), ph);
        // Site i becomes the new least significant bit.
        for idx in (0..len).rev() {
            let a = out[idx];
            out[2 * idx] = a * up;
            out[2 * idx + 1] = a * down;
        }
        len *= 2;
    }
}

pub fn make_state(kind: &StateKind, n: usize) -> Result<StateVector> {
    if n == 0 {
        return domain("need at least one site");
    }
    crate::oracle::check_size(n)?;
    let dim = 1usize << n;
    let mut amps = DVector::<C64>::zeros(dim);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match kind {
        StateKind::Ghz => {
            amps[0] = C64::from(h);
            amps[dim - 1] = C64::from(h);
        }
        StateKind::StaggeredGhz => {
            if !n.is_multiple_of(2) {
                return domain(format!("staggered GHZ needs even N, got {n}"));
            }
            let pattern = (0..n).fold(0usize, |acc, i| (acc << 1) | (i % 2));
            amps[0] = C64::from(h);
            amps[pattern] = C64::from(h);
        }
        StateKind::Product(angles) => {
            if angles.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: 2 * n,
                    got: 2 * angles.n(),
                });
            }
            fill_product(&angles.interleaved(), amps.as_mut_slice());
        }
        StateKind::BasisString(bits) => {
            if bits.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: bits.len(),
                });
            }
            let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
            amps[idx] = C64::from(1.0);
        }
    }
    StateVector::normalized(amps)
}
