//! Cross-checks between the momentum-space formulas and the dense oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fermion::{
    degeneracy_threshold, generator_spectrum_with_threshold, ghz_variance_b, mode_params,
};
use crate::oracle::{
    build_hamiltonian, integrated_generator, jw_mode_matrix, make_state, mean_of,
    qfi_finite_difference, variance_of, MatrixModel, ModelKind, ProductStateAngles, StateKind,
};
use crate::params::{ModelParams, Target};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Fast,
    Full,
}

impl Level {
    pub fn max_n(self) -> usize {
        match self {
            Level::Fast => 6,
            Level::Full => 8,
        }
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            _ => Err(Error::Domain(format!("unknown verify level {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub level: Level,
    /// Overrides the degeneracy cutoff used by the degenerate-limit suite.
    pub eps_omega: Option<f64>,
}

impl VerifyConfig {
    pub fn new(level: Level) -> Self {
        Self {
            level,
            eps_omega: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    /// Informational suites are reported but never fail.
    pub tracked: bool,
    pub passed: bool,
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn checked(name: &'static str, deviations: &[f64], tolerance: f64) -> Self {
        let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
        let finite = deviations.iter().all(|d| d.is_finite());
        Self {
            name,
            cases: deviations.len(),
            max_deviation,
            tolerance,
            tracked: false,
            passed: finite && max_deviation <= tolerance,
            notes: Vec::new(),
        }
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match (self.tracked, self.passed) {
            (true, _) => "INFO",
            (false, true) => "PASS",
            (false, false) => "FAIL",
        };
        write!(
            f,
            "{status} {:<18} cases={:<4} max_dev={:.3e} tol={:.1e}",
            self.name, self.cases, self.max_deviation, self.tolerance
        )?;
        for note in &self.notes {
            write!(f, "\n     {note}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub level: Level,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.tracked || s.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.suites {
            writeln!(f, "{s}")?;
        }
        write!(
            f,
            "{}",
            if self.passed() { "all suites passed" } else { "verification FAILED" }
        )
    }
}

const COUPLINGS: [(f64, f64); 5] = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.5), (0.7, 1.3)];
const TIMES: [f64; 3] = [0.7, 3.1, 20.0];

fn rel(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}

pub fn run(config: &VerifyConfig) -> Result<VerifyReport> {
    let n_max = config.level.max_n();
    Ok(VerifyReport {
        level: config.level,
        suites: vec![
            car(n_max.min(6))?,
            spectrum_match(n_max)?,
            generator_gap(n_max)?,
            ghz_equality(n_max)?,
            qfi_two_path(n_max.min(6))?,
            degenerate_limit(config.eps_omega)?,
            boundary_decay(n_max)?,
        ],
    })
}

/// `{a_i, a_j†} = δ_ij`, `{a_i, a_j} = 0`.
pub fn car(n_max: usize) -> Result<SuiteReport> {
    let mut devs = Vec::new();
    for n in 2..=n_max {
        let modes: Vec<_> = (1..=n).map(|j| jw_mode_matrix(n, j)).collect::<Result<_>>()?;
        let dim = 1usize << n;
        for (i, (ai, _)) in modes.iter().enumerate() {
            for (j, (aj, ajd)) in modes.iter().enumerate() {
                let mut mixed = ai * ajd + ajd * ai;
                if i == j {
                    for d in 0..dim {
                        mixed[(d, d)] -= 1.0;
                    }
                }
                let same = ai * aj + aj * ai;
                devs.push(mixed.amax().max(same.amax()));
            }
        }
    }
    Ok(SuiteReport::checked("car", &devs, 1e-12))
}

/// Dense `FermionCyclic` spectrum against `E_0 + Σ n_k 2ω_k`.
pub fn spectrum_match(n_max: usize) -> Result<SuiteReport> {
    let cases: Vec<(usize, f64, f64)> = (2..=n_max)
        .flat_map(|n| COUPLINGS.iter().map(move |&(j, b)| (n, j, b)))
        .collect();
    let devs: Vec<f64> = cases
        .par_iter()
        .map(|&(n, j, b)| -> Result<f64> {
            let params = ModelParams::new(n, j, b, 1.0)?;
            let model = MatrixModel::new(ModelKind::FermionCyclic, n)?;
            let h = build_hamiltonian(&params, &model)?;
            let mut exact: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
            exact.sort_by(f64::total_cmp);
            let omegas: Vec<f64> = (0..n)
                .map(|k| mode_params(&params, k).map(|m| 2.0 * m.omega))
                .collect::<Result<_>>()?;
            let mut formula: Vec<f64> = (0..1usize << n)
                .map(|occ| {
                    (0..n)
                        .filter(|k| occ >> k & 1 == 1)
                        .map(|k| omegas[k])
                        .sum::<f64>()
                })
                .collect();
            formula.sort_by(f64::total_cmp);
            let e0 = exact[0];
            let scale = exact.iter().fold(1.0f64, |m, e| m.max(e.abs()));
            Ok(exact
                .iter()
                .zip(&formula)
                .map(|(e, f)| (e - e0 - f).abs() / scale)
                .fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    Ok(SuiteReport::checked("spectrum-match", &devs, 1e-8))
}

fn gap_deviation(params: &ModelParams, target: Target, eps_omega: f64) -> Result<f64> {
    let model = MatrixModel::new(ModelKind::FermionCyclic, params.n())?;
    let exact = integrated_generator(params, target, &model)?.spectral_gap();
    let formula = generator_spectrum_with_threshold(params, target, eps_omega).gap();
    Ok(if formula == 0.0 {
        exact.abs()
    } else {
        rel(exact, formula)
    })
}

/// Spectral gap of the dense `O_i` against `2 Σ s_k`.
pub fn generator_gap(n_max: usize) -> Result<SuiteReport> {
    let mut cases = Vec::new();
    for n in 2..=n_max {
        for &(j, b) in &COUPLINGS {
            for &t in &TIMES {
                for target in [Target::EstimateJ, Target::EstimateB] {
                    cases.push((ModelParams::new(n, j, b, t)?, target));
                }
            }
        }
    }
    let devs: Vec<f64> = cases
        .par_iter()
        .map(|(p, target)| gap_deviation(p, *target, degeneracy_threshold(p)))
        .collect::<Result<_>>()?;
    Ok(SuiteReport::checked("generator-gap", &devs, 1e-8))
}

/// GHZ variance of `O_B` against the exact pairing formula, and `⟨O_B⟩ = 0`.
pub fn ghz_equality(n_max: usize) -> Result<SuiteReport> {
    let mut cases = Vec::new();
    for n in 2..=n_max {
        for &(j, b) in &COUPLINGS {
            for &t in &TIMES {
                cases.push(ModelParams::new(n, j, b, t)?);
            }
        }
    }
    let devs: Vec<f64> = cases
        .par_iter()
        .map(|p| -> Result<f64> {
            let model = MatrixModel::new(ModelKind::FermionCyclic, p.n())?;
            let gen = integrated_generator(p, Target::EstimateB, &model)?;
            let ghz = make_state(&StateKind::Ghz, p.n())?;
            let var = variance_of(&ghz, &gen)?.variance;
            let mean = mean_of(&ghz, &gen)?;
            let want = ghz_variance_b(p).variance;
            let scale = p.n() as f64 * p.t().max(1.0);
            Ok(rel(var, want).max(mean.abs() / scale))
        })
        .collect::<Result<_>>()?;
    Ok(SuiteReport::checked("ghz-equality", &devs, 1e-8))
}

pub fn random_angles(rng: &mut impl Rng, n: usize) -> ProductStateAngles {
    let thetas = (0..n).map(|_| rng.gen::<f64>() * PI).collect();
    let phis = (0..n).map(|_| rng.gen::<f64>() * TAU).collect();
    ProductStateAngles::new(thetas, phis).expect("finite angles")
}

/// Finite-difference QFI against `4 Var(O)` on random product states.
pub fn qfi_two_path(n_max: usize) -> Result<SuiteReport> {
    let mut cases = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for n in [2, 4, 6].into_iter().filter(|&n| n <= n_max) {
        for kind in ModelKind::ALL {
            for target in [Target::EstimateJ, Target::EstimateB] {
                for _ in 0..10 {
                    cases.push((n, kind, target, random_angles(&mut rng, n)));
                }
            }
        }
    }
    let devs: Vec<f64> = cases
        .par_iter()
        .map(|(n, kind, target, angles)| -> Result<f64> {
            let params = ModelParams::new(*n, 1.0, 0.7, 2.0)?;
            let model = MatrixModel::new(*kind, *n)?;
            let state = make_state(&StateKind::Product(angles.clone()), *n)?;
            let gen = integrated_generator(&params, *target, &model)?;
            let via_var = variance_of(&state, &gen)?.qfi;
            let fd = qfi_finite_difference(&params, *target, &model, &state, 1e-6)?.qfi;
            Ok(rel(fd, via_var))
        })
        .collect::<Result<_>>()?;
    Ok(SuiteReport::checked("qfi-two-path", &devs, 1e-4))
}

/// Gap equality at and near `ω_k = 0`, with an optional overridden cutoff.
pub fn degenerate_limit(eps_omega: Option<f64>) -> Result<SuiteReport> {
    let couplings = [
        (1.0, -1.0),
        (1.0, -1.0 + 1e-6),
        (1.0, -1.0 + 1e-3),
        (1.0, 1.0),
        (0.5, 0.5),
    ];
    let mut cases = Vec::new();
    for n in [4, 6] {
        for &(j, b) in &couplings {
            for target in [Target::EstimateJ, Target::EstimateB] {
                cases.push((ModelParams::new(n, j, b, 3.1)?, target));
            }
        }
    }
    let devs: Vec<f64> = cases
        .par_iter()
        .map(|(p, target)| {
            let eps = eps_omega.unwrap_or_else(|| degeneracy_threshold(p));
            gap_deviation(p, *target, eps)
        })
        .collect::<Result<_>>()?;
    let mut report = SuiteReport::checked("degenerate-limit", &devs, 1e-8);
    if let Some(eps) = eps_omega {
        report.notes.push(format!("cutoff overridden: eps_omega = {eps:e}"));
    }
    Ok(report)
}

/// Relative GHZ `Var(O_B)` difference between the periodic spin chain and the
/// cyclic fermion model, per even `N`. Reported, not asserted: the difference
/// only decays once the chain is longer than the light cone `~4|J|t`.
pub fn boundary_decay(n_max: usize) -> Result<SuiteReport> {
    let mut notes = Vec::new();
    let mut devs = Vec::new();
    for t in [0.7, 3.1] {
        let mut line = format!("J=1 B=0.5 t={t}:");
        for n in (2..=n_max).step_by(2) {
            let p = ModelParams::new(n, 1.0, 0.5, t)?;
            let ghz = make_state(&StateKind::Ghz, n)?;
            let mut var = [0.0; 2];
            for (slot, kind) in [ModelKind::SpinPeriodic, ModelKind::FermionCyclic]
                .into_iter()
                .enumerate()
            {
                let model = MatrixModel::new(kind, n)?;
                let gen = integrated_generator(&p, Target::EstimateB, &model)?;
                var[slot] = variance_of(&ghz, &gen)?.variance;
            }
            let d = rel(var[0], var[1]);
            line.push_str(&format!(" N={n}:{d:.2e}"));
            devs.push(d);
        }
        notes.push(line);
    }
    let mut report = SuiteReport::checked("boundary-decay", &devs, f64::INFINITY);
    report.tracked = true;
    report.notes = notes;
    Ok(report)
}
