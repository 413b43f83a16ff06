//! Quantum Fisher information limits for estimating the coupling `J` or the
//! transverse field `B` of the Ising chain `H = J Σ X_i X_{i+1} + B Σ Z_i`.
//!
//! * [`fermion`]: momentum-space closed forms for the integrated generators,
//!   their spectra and the optimal / GHZ / staggered-GHZ variances.
//! * [`asymptotics`]: the large-N prefactors `G(g)` and `F(g)`.
//! * [`oracle`]: dense `2^N` matrices used to check every closed form.
//! * [`product`]: multi-start optimization over product inputs and the
//!   power-law fit of the resulting scaling.
//! * [`verify`]: cross-checks shared by the CLI and the test suites.
//!
//! Pauli operators have eigenvalues `±1` throughout.

pub mod asymptotics;
pub mod error;
pub mod fermion;
pub mod fit;
pub mod oracle;
pub mod params;
pub mod product;
pub mod quadrature;
pub mod table;
pub mod verify;

pub use error::{Error, Result};
pub use params::{ModelParams, Target};
