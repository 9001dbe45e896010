//! Exact and numerical dynamics generated by time-dependent 2×2
//! pseudo-Hermitian su(1,1) Hamiltonians.

// `!(x >= 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_form;
pub mod coefficient;
pub mod error;
pub mod guided_wave;
pub mod linalg;
pub mod ode;
pub mod open_dynamics;
pub mod oracle;
pub mod quadrature;
pub mod su11;

pub use closed_form::{ClosedForm, PhaseIntegrals, Propagator, Regime, RegimeSolution};
pub use coefficient::CoefficientFn;
pub use error::{Error, Result};
pub use guided_wave::{CoupledModeProblem, ModeSolver, Modes};
pub use open_dynamics::{DensityMatrix, Dynamics, HermitianSplit};
pub use su11::{SolvableScenario, Spectrum, SpectrumKind, Su11Hamiltonian};
