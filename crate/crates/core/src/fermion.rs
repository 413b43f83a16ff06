//! Closed-form momentum-space treatment of the Jordan–Wigner fermionized chain.
//!
//! After the Fourier transform the Hamiltonian splits into 2×2 blocks acting on
//! `(b_k, b†_{N-k})`, `h_k = [[α_k, iβ_k], [-iβ_k, -α_k]]`, with
//! `α_k = J cos(2πk/N) + B`, `β_k = J sin(2πk/N)` and `ω_k = √(α_k² + β_k²)`.
//! The quasi-particle energy of mode `k` is `2ω_k`, so each block rotates as
//! `exp(-2is h_k)`. Integrating the rotated generator block over `[0, t]` gives
//! the integrated generator `O_i` in the same block form; its non-negative
//! singular values `s_k` fix the whole spectrum of `O_i` up to an offset.

use std::f64::consts::PI;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::params::{ModelParams, Target};

/// Bogoliubov phase `φ_k`; constant for every mode.
pub const BOGOLIUBOV_PHASE: f64 = PI / 2.0;

/// Below this `ω_k` the closed forms are 0/0 and the analytic `t·M_k` limit is used.
pub fn degeneracy_threshold(params: &ModelParams) -> f64 {
    1e-9 * params.j().abs().max(params.b().abs()).max(1.0)
}

/// `(cos, sin)` of `2πk/n`, exact at the lattice's symmetric points and odd
/// under `k -> n - k`.
pub(crate) fn lattice_angle(k: usize, n: usize) -> (f64, f64) {
    let k = k % n;
    if k == 0 {
        return (1.0, 0.0);
    }
    if 2 * k == n {
        return (-1.0, 0.0);
    }
    if 4 * k == n {
        return (0.0, 1.0);
    }
    if 4 * k == 3 * n {
        return (0.0, -1.0);
    }
    if 2 * k > n {
        let (c, s) = lattice_angle(n - k, n);
        return (c, -s);
    }
    let x = 2.0 * PI * k as f64 / n as f64;
    (x.cos(), x.sin())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumMode {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub omega: f64,
    /// Bogoliubov angle `θ_k = ½ atan2(β_k, α_k)`. No variance depends on it.
    pub theta: f64,
}

pub fn mode_params(params: &ModelParams, k: usize) -> Result<MomentumMode> {
    let n = params.n();
    if k >= n {
        return domain(format!("mode index {k} out of range for N={n}"));
    }
    let (c, s) = lattice_angle(k, n);
    let alpha = params.j() * c + params.b();
    let beta = params.j() * s;
    Ok(MomentumMode {
        k,
        alpha,
        beta,
        omega: alpha.hypot(beta),
        theta: 0.5 * beta.atan2(alpha),
    })
}

/// One 2×2 block `[[diag, offdiag], [offdiag*, -diag]]` of `O_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorBlock {
    pub k: usize,
    pub diag: f64,
    pub offdiag: Complex<f64>,
    pub target: Target,
}

impl GeneratorBlock {
    pub fn singular_value(&self) -> f64 {
        self.diag.hypot(self.offdiag.norm())
    }
}

/// Block coefficients `(Ω_k, Δ_k)` for `J` or `(A_k, B_k)` for `B`, split into
/// a part linear in `t` and a bounded oscillatory part.
pub fn generator_block(params: &ModelParams, k: usize, target: Target) -> Result<GeneratorBlock> {
    generator_block_with_threshold(params, k, target, degeneracy_threshold(params))
}

/// [`generator_block`] with an explicit degeneracy cutoff on `ω_k`.
pub fn generator_block_with_threshold(
    params: &ModelParams,
    k: usize,
    target: Target,
    eps_omega: f64,
) -> Result<GeneratorBlock> {
    let mode = mode_params(params, k)?;
    let (c, s) = lattice_angle(k, params.n());
    let t = params.t();
    let MomentumMode {
        alpha, beta, omega, ..
    } = mode;

    let (diag, offdiag) = if omega < eps_omega {
        // R_k(s) is the identity: the block integral is t times the generator block.
        match target {
            Target::EstimateJ => (t * c, Complex::new(0.0, t * s)),
            Target::EstimateB => (t, Complex::new(0.0, 0.0)),
        }
    } else {
        let w2 = omega * omega;
        let sin4 = (4.0 * omega * t).sin();
        let sin2sq = (2.0 * omega * t).sin().powi(2);
        match target {
            Target::EstimateJ => {
                let p = alpha * c + beta * s;
                let q = beta * c - alpha * s;
                let diag = (alpha * p * t + beta * q * sin4 / (4.0 * omega)) / w2;
                let re = q * sin2sq / 2.0;
                let im = beta * p * t - q * alpha * sin4 / (4.0 * omega);
                (diag, Complex::new(re, im) / w2)
            }
            Target::EstimateB => {
                let w3 = w2 * omega;
                let diag = alpha * alpha * t / w2 + beta * beta * sin4 / (4.0 * w3);
                let re = 2.0 * beta * omega * sin2sq / (4.0 * w3);
                let im = alpha * beta * t / w2 - alpha * beta * sin4 / (4.0 * w3);
                (diag, Complex::new(re, im))
            }
        }
    };
    Ok(GeneratorBlock {
        k,
        diag,
        offdiag,
        target,
    })
}

pub fn generator_blocks(params: &ModelParams, target: Target) -> Vec<GeneratorBlock> {
    (0..params.n())
        .map(|k| generator_block(params, k, target).expect("k < N"))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpectrum {
    pub target: Target,
    /// `s_k ≥ 0`, indexed by momentum `k`.
    pub values: Vec<f64>,
    pub params: ModelParams,
}

impl GeneratorSpectrum {
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `λ_max - λ_min` of `O_i`: from the vacuum to the fully occupied state.
    pub fn gap(&self) -> f64 {
        2.0 * self.sum()
    }
}

pub fn generator_spectrum(params: &ModelParams, target: Target) -> GeneratorSpectrum {
    generator_spectrum_with_threshold(params, target, degeneracy_threshold(params))
}

pub fn generator_spectrum_with_threshold(
    params: &ModelParams,
    target: Target,
    eps_omega: f64,
) -> GeneratorSpectrum {
    GeneratorSpectrum {
        target,
        values: (0..params.n())
            .map(|k| {
                generator_block_with_threshold(params, k, target, eps_omega)
                    .expect("k < N")
                    .singular_value()
            })
            .collect(),
        params: *params,
    }
}

/// `diag_k² + |offdiag_k|²` from its own closed form, independent of
/// [`generator_block`]. Only defined for non-degenerate modes.
pub fn eigenvalue_identity(params: &ModelParams, k: usize, target: Target) -> Result<f64> {
    let mode = mode_params(params, k)?;
    if mode.omega < degeneracy_threshold(params) {
        return Err(Error::UnsupportedMode {
            k,
            omega: mode.omega,
        });
    }
    let (c, s) = lattice_angle(k, params.n());
    let t = params.t();
    let w2 = mode.omega * mode.omega;
    let osc = 1.0 - (4.0 * mode.omega * t).cos();
    let (linear, transverse) = match target {
        Target::EstimateJ => (
            mode.alpha * c + mode.beta * s,
            mode.beta * c - mode.alpha * s,
        ),
        Target::EstimateB => (mode.alpha, mode.beta),
    };
    Ok((transverse * transverse * osc + 8.0 * t * t * w2 * linear * linear) / (8.0 * w2 * w2))
}

/// Variance of an integrated generator together with its QFI and the
/// Cramér–Rao precision bound for `repetitions` runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceResult {
    pub variance: f64,
    pub qfi: f64,
    pub repetitions: u64,
    pub precision_bound: f64,
}

impl VarianceResult {
    pub fn new(variance: f64) -> Self {
        let variance = variance.max(0.0);
        let qfi = 4.0 * variance;
        Self {
            variance,
            qfi,
            repetitions: 1,
            precision_bound: 1.0 / qfi.sqrt(),
        }
    }

    pub fn with_repetitions(self, repetitions: u64) -> Result<Self> {
        if repetitions == 0 {
            return domain("repetition count must be at least 1");
        }
        Ok(Self {
            repetitions,
            precision_bound: 1.0 / (repetitions as f64 * self.qfi).sqrt(),
            ..self
        })
    }
}

/// Largest achievable variance: equal superposition of the `O_i` vacuum and the
/// fully occupied state, `(Σ_k s_k)²`.
pub fn max_variance(params: &ModelParams, target: Target) -> VarianceResult {
    let sum = generator_spectrum(params, target).sum();
    VarianceResult::new(sum * sum)
}

/// Exact finite-N variance of `O_B` on `(|0…0⟩ + |1…1⟩)/√2`.
///
/// In the `b` modes the GHZ state is the vacuum plus the fully occupied state.
/// The diagonal blocks give `(Σ A_k)²`; each pairing term `B_k b†_k b†_{N-k}`
/// lifts both components out of the state and adds `2|B_k|²` per momentum.
pub fn ghz_variance_b(params: &ModelParams) -> VarianceResult {
    let blocks = generator_blocks(params, Target::EstimateB);
    let diag: f64 = blocks.iter().map(|b| b.diag).sum();
    let pairing: f64 = blocks.iter().map(|b| b.offdiag.norm_sqr()).sum();
    VarianceResult::new(diag * diag + 2.0 * pairing)
}

/// Leading GHZ term `(Σ A_k)²`, which carries the `N² t² F(J/B)` asymptotics.
pub fn ghz_variance_b_leading(params: &ModelParams) -> VarianceResult {
    let diag: f64 = generator_blocks(params, Target::EstimateB)
        .iter()
        .map(|b| b.diag)
        .sum();
    VarianceResult::new(diag * diag)
}

/// `J`-estimation with the staggered GHZ state, through the J↔B duality.
/// Exact only asymptotically.
pub fn staggered_variance_j(params: &ModelParams) -> VarianceResult {
    ghz_variance_b(&params.swapped())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, j: f64, b: f64, t: f64) -> ModelParams {
        ModelParams::new(n, j, b, t).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn mode_params_examples() {
        let m = mode_params(&p(4, 1.0, 0.0, 0.0), 1).unwrap();
        assert_eq!((m.alpha, m.beta, m.omega), (0.0, 1.0, 1.0));

        let m = mode_params(&p(8, 0.0, 1.0, 0.0), 3).unwrap();
        assert_eq!((m.alpha, m.beta, m.omega, m.theta), (1.0, 0.0, 1.0, 0.0));

        let m = mode_params(&p(6, 1.0, 1.0, 0.0), 2).unwrap();
        assert!(close(m.alpha, 0.5, 1e-15));
        assert!(close(m.beta, 3f64.sqrt() / 2.0, 1e-15));
        assert!(close(m.omega, 1.0, 1e-15));

        assert!(mode_params(&p(4, 1.0, 1.0, 0.0), 4).is_err());
    }

    #[test]
    fn beta_vanishes_at_symmetric_momenta() {
        for n in [2, 4, 6, 8, 10] {
            let params = p(n, 1.3, -0.4, 1.0);
            assert_eq!(mode_params(&params, 0).unwrap().beta, 0.0);
            assert_eq!(mode_params(&params, n / 2).unwrap().beta, 0.0);
            for k in 1..n {
                let a = mode_params(&params, k).unwrap();
                let b = mode_params(&params, n - k).unwrap();
                assert_eq!(a.beta, -b.beta);
                assert_eq!(a.alpha, b.alpha);
            }
        }
    }

    #[test]
    fn theta_defined_for_negative_alpha() {
        let m = mode_params(&p(6, 1.0, -2.0, 0.0), 1).unwrap();
        assert!(m.alpha < 0.0);
        assert!(close((2.0 * m.theta).tan(), m.beta / m.alpha, 1e-12));
        assert!(m.theta > 0.0);
    }

    #[test]
    fn b_zero_block_collapse() {
        for n in [3, 5, 8] {
            let params = p(n, 1.0, 0.0, 2.7);
            for k in 0..n {
                let blk = generator_block(&params, k, Target::EstimateJ).unwrap();
                let (c, s) = lattice_angle(k, n);
                assert!(close(blk.diag, 2.7 * c, 1e-13));
                assert!(close(blk.offdiag.re, 0.0, 1e-13));
                assert!(close(blk.offdiag.im, 2.7 * s, 1e-13));
                assert!(close(blk.singular_value(), 2.7, 1e-13));
            }
        }
    }

    #[test]
    fn j_zero_block_collapse() {
        let params = p(7, 0.0, 1.0, 4.0);
        for k in 0..7 {
            let blk = generator_block(&params, k, Target::EstimateB).unwrap();
            assert_eq!(blk.diag, 4.0);
            assert_eq!(blk.offdiag, Complex::new(0.0, 0.0));
        }
    }

    #[test]
    fn zero_time_gives_zero_blocks() {
        let params = p(6, 0.8, 1.1, 0.0);
        for target in [Target::EstimateJ, Target::EstimateB] {
            for k in 0..6 {
                let blk = generator_block(&params, k, target).unwrap();
                assert_eq!(blk.diag, 0.0);
                assert_eq!(blk.offdiag.norm(), 0.0);
                assert_eq!(eigenvalue_identity(&params, k, target).unwrap(), 0.0);
            }
            assert_eq!(max_variance(&params, target).variance, 0.0);
        }
        assert_eq!(ghz_variance_b(&params).variance, 0.0);
        assert_eq!(staggered_variance_j(&params).variance, 0.0);
    }

    #[test]
    fn spectrum_examples() {
        let s = generator_spectrum(&p(5, 1.0, 0.0, 2.0), Target::EstimateJ);
        assert_eq!(s.values.len(), 5);
        assert!(s.values.iter().all(|&v| close(v, 2.0, 1e-13)));

        let s = generator_spectrum(&p(3, 0.0, 1.0, 7.0), Target::EstimateB);
        assert_eq!(s.values, vec![7.0, 7.0, 7.0]);
    }

    #[test]
    fn identity_examples() {
        let params = p(5, 1.0, 0.0, 3.0);
        for k in 0..5 {
            let v = eigenvalue_identity(&params, k, Target::EstimateJ).unwrap();
            assert!(close(v, 9.0, 1e-12));
        }
        let params = p(5, 0.0, 1.0, 3.0);
        assert!(close(
            eigenvalue_identity(&params, 2, Target::EstimateB).unwrap(),
            9.0,
            1e-12
        ));
    }

    #[test]
    fn identity_rejects_degenerate_mode() {
        // B = -J kills k = 0.
        let params = p(4, 1.0, -1.0, 1.0);
        assert!(matches!(
            eigenvalue_identity(&params, 0, Target::EstimateJ),
            Err(Error::UnsupportedMode { k: 0, .. })
        ));
    }

    #[test]
    fn block_matches_identity() {
        for &(j, b) in &[(1.0, 1.0), (1.0, 0.5), (0.7, 1.3), (-0.4, 2.0), (2.0, -0.3)] {
            for &t in &[0.3, 3.1, 20.0] {
                let params = p(7, j, b, t);
                for target in [Target::EstimateJ, Target::EstimateB] {
                    for k in 0..7 {
                        let blk = generator_block(&params, k, target).unwrap();
                        let direct = blk.diag.powi(2) + blk.offdiag.norm_sqr();
                        let Ok(ident) = eigenvalue_identity(&params, k, target) else {
                            continue;
                        };
                        assert!(
                            (direct - ident).abs() <= 1e-12 * t.powi(2).max(1.0),
                            "k={k} {target:?} J={j} B={b} t={t}: {direct} vs {ident}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn max_variance_collapse() {
        let v = max_variance(&p(4, 1.0, 0.0, 3.0), Target::EstimateJ);
        assert!(close(v.variance, 144.0, 1e-10));
        let v = max_variance(&p(6, 0.0, 1.0, 2.0), Target::EstimateB);
        assert!(close(v.variance, 144.0, 1e-10));
    }

    #[test]
    fn ghz_and_staggered_examples() {
        assert!(close(ghz_variance_b(&p(5, 0.0, 1.0, 2.0)).variance, 100.0, 1e-10));
        assert!(close(staggered_variance_j(&p(6, 1.0, 0.0, 2.0)).variance, 144.0, 1e-10));
        let params = p(8, 1.0, 1.0, 20.0);
        assert_eq!(
            staggered_variance_j(&params),
            ghz_variance_b(&params.swapped())
        );
    }

    #[test]
    fn ghz_leading_term_is_below_exact() {
        let params = p(8, 1.0, 1.0, 20.0);
        let exact = ghz_variance_b(&params).variance;
        let leading = ghz_variance_b_leading(&params).variance;
        assert!(leading < exact);
        let params = p(8, 0.0, 1.0, 20.0);
        assert_eq!(
            ghz_variance_b(&params).variance,
            ghz_variance_b_leading(&params).variance
        );
    }

    #[test]
    fn degenerate_limit_is_continuous() {
        // k = 0 degenerates at B = -J; approach it from above.
        let t = 1.7;
        for target in [Target::EstimateJ, Target::EstimateB] {
            let limit = generator_block(&p(6, 1.0, -1.0, t), 0, target).unwrap();
            let mut prev = f64::INFINITY;
            for e in 2..=8 {
                let params = p(6, 1.0, -1.0 + 10f64.powi(-e), t);
                let blk = generator_block(&params, 0, target).unwrap();
                let dev = (blk.diag - limit.diag).abs() + (blk.offdiag - limit.offdiag).norm();
                assert!(dev <= prev + 1e-12);
                prev = dev;
            }
            assert!(prev < 1e-6);
        }
        // k = N/2 degenerates at B = J and has nonzero sin only through rounding.
        for e in 2..=8 {
            let params = p(6, 1.0, 1.0 + 10f64.powi(-e), t);
            let blk = generator_block(&params, 3, Target::EstimateJ).unwrap();
            assert!(close(blk.diag, -t, 1e-9));
            assert!(blk.offdiag.norm() < 1e-9);
        }
    }

    #[test]
    fn precision_bound_contract() {
        let v = VarianceResult::new(2.5).with_repetitions(7).unwrap();
        assert_eq!(v.qfi, 10.0);
        assert!(close(v.precision_bound * (7.0 * v.qfi).sqrt(), 1.0, 1e-15));
        assert!(VarianceResult::new(1.0).with_repetitions(0).is_err());
        assert!(VarianceResult::new(0.0).precision_bound.is_infinite());
    }

    #[test]
    fn variance_over_t2_converges() {
        let base = p(16, 1.0, 0.6, 1.0);
        let ratios: Vec<f64> = [1e2, 1e3, 1e4, 1e5]
            .iter()
            .map(|&t| max_variance(&base.with_t(t).unwrap(), Target::EstimateJ).variance / (t * t))
            .collect();
        for w in ratios.windows(2) {
            assert!((w[1] - w[0]).abs() < 1e-2 * w[0]);
        }
        assert!((ratios[3] - ratios[2]).abs() < 1e-4 * ratios[2]);
    }
}
