use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Which coupling is being estimated; the other one is assumed known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    /// Estimate the nearest-neighbour coupling `J`; generator `H_1 = Σ X_i X_{i+1}`.
    EstimateJ,
    /// Estimate the transverse field `B`; generator `H_2 = Σ Z_i`.
    EstimateB,
}

impl Target {
    pub fn label(self) -> &'static str {
        match self {
            Target::EstimateJ => "J",
            Target::EstimateB => "B",
        }
    }
}

/// Chain size, couplings and evolution time of `H = J Σ X X + B Σ Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    n: usize,
    j: f64,
    b: f64,
    t: f64,
}

impl ModelParams {
    pub fn new(n: usize, j: f64, b: f64, t: f64) -> Result<Self> {
        if n < 2 {
            return domain(format!("chain size must be at least 2, got {n}"));
        }
        if !j.is_finite() || !b.is_finite() {
            return domain("couplings must be finite");
        }
        if !t.is_finite() || t < 0.0 {
            return domain(format!("evolution time must be finite and non-negative, got {t}"));
        }
        Ok(Self { n, j, b, t })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Same chain and time with the roles of `J` and `B` exchanged (kink duality).
    pub fn swapped(&self) -> Self {
        Self {
            j: self.b,
            b: self.j,
            ..*self
        }
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(n, self.j, self.b, self.t)
    }

    pub fn with_t(&self, t: f64) -> Result<Self> {
        Self::new(self.n, self.j, self.b, t)
    }

    pub fn with_couplings(&self, j: f64, b: f64) -> Result<Self> {
        Self::new(self.n, j, b, self.t)
    }
}
