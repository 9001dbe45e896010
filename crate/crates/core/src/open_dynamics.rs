//! Normalized-conjugation evolution of density matrices,
//! `ρ(t) = UρU† / Tr(UρU†)`, and its nonlinear generator.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::closed_form::ClosedForm;
use crate::error::{Error, Result};
use crate::linalg::{
    anticommutator, commutator, hermitian_eigenvalues, max_abs_diff, pack, propagate_constant,
    trace, unpack, Mat2, I, ONE, ZERO,
};
use crate::ode::{self, IntegratorConfig};
use crate::oracle;
use crate::su11::{SolvableScenario, Su11Hamiltonian};

/// Tolerance for Hermiticity, unit trace and positivity of inputs.
pub const DENSITY_TOL: f64 = 1e-12;

/// Normalization traces at or below this are treated as underflow.
pub const TRACE_FLOOR: f64 = 1e-300;

/// A 2×2 density matrix. Entries serialize row-major as `[[re, im]; 4]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct DensityMatrix(Mat2);

impl DensityMatrix {
    pub fn new(m: Mat2) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidDensity("entries must be finite".into()));
        }
        let herm = max_abs_diff(&m, &m.adjoint());
        if herm > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian: max |rho - rho^dag| = {herm:e} exceeds {DENSITY_TOL:e}"
            )));
        }
        let tr = trace(&m);
        if (tr - ONE).norm() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "trace is {} + {}i, expected 1 within {DENSITY_TOL:e}",
                tr.re, tr.im
            )));
        }
        let [lo, _] = hermitian_eigenvalues(&m);
        if lo < -DENSITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {lo:e} (below -{DENSITY_TOL:e})"
            )));
        }
        Ok(Self(m))
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) nonzero vector.
    pub fn pure(psi: [C64; 2]) -> Result<Self> {
        let n = psi[0].norm_sqr() + psi[1].norm_sqr();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidDensity(
                "state vector must be nonzero and finite".into(),
            ));
        }
        let m = Mat2::new(
            psi[0] * psi[0].conj(),
            psi[0] * psi[1].conj(),
            psi[1] * psi[0].conj(),
            psi[1] * psi[1].conj(),
        ) / C64::from(n);
        Ok(Self(hermitize(&m)))
    }

    /// `|+⟩⟨+|`, the upper basis state.
    pub fn plus() -> Self {
        Self(Mat2::new(ONE, ZERO, ZERO, ZERO))
    }

    /// `|−⟩⟨−|`, the lower basis state.
    pub fn minus() -> Self {
        Self(Mat2::new(ZERO, ZERO, ZERO, ONE))
    }

    pub fn maximally_mixed() -> Self {
        Self(Mat2::identity() * C64::from(0.5))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn trace(&self) -> C64 {
        trace(&self.0)
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        trace(&(self.0 * self.0)).re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.0)[0]
    }

    /// Population of the lower state, `ρ₂₂`.
    pub fn rho22(&self) -> f64 {
        self.0[(1, 1)].re
    }
}

impl TryFrom<Vec<[f64; 2]>> for DensityMatrix {
    type Error = Error;

    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        if v.len() != 4 {
            return Err(Error::InvalidDensity(format!(
                "expected 4 entries [re, im] in row-major order, got {}",
                v.len()
            )));
        }
        let c = |k: usize| C64::new(v[k][0], v[k][1]);
        Self::new(Mat2::new(c(0), c(1), c(2), c(3)))
    }
}

impl From<DensityMatrix> for Vec<[f64; 2]> {
    fn from(d: DensityMatrix) -> Self {
        let m = d.0;
        [(0, 0), (0, 1), (1, 0), (1, 1)]
            .iter()
            .map(|&ij| [m[ij].re, m[ij].im])
            .collect()
    }
}

/// `H = H₀ − iΓ` with both parts Hermitian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianSplit {
    pub h0: Mat2,
    pub gamma: Mat2,
}

impl HermitianSplit {
    pub fn recombine(&self) -> Mat2 {
        self.h0 - self.gamma * I
    }
}

/// `H₀ = (H + H†)/2`, `Γ = i(H − H†)/2`.
pub fn split(h: &Mat2) -> HermitianSplit {
    let hd = h.adjoint();
    HermitianSplit {
        h0: (h + hd) * C64::from(0.5),
        gamma: (h - hd) * C64::new(0.0, 0.5),
    }
}

fn hermitize(m: &Mat2) -> Mat2 {
    (m + m.adjoint()) * C64::from(0.5)
}

/// `Uρ U† / Tr(UρU†)`, re-symmetrized.
pub fn conjugate(u: &Mat2, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let m = u * rho.0 * u.adjoint();
    let tr = trace(&m).re;
    if !(tr > TRACE_FLOOR) || !tr.is_finite() {
        return Err(Error::Underflow { trace: tr });
    }
    Ok(DensityMatrix(hermitize(&(m / C64::from(tr)))))
}

/// Source of the evolution operator.
#[derive(Debug, Clone, Copy)]
pub enum Dynamics<'a> {
    /// Solvable scenario; `U` comes from the closed form.
    Solvable(&'a SolvableScenario),
    /// General Hamiltonian; `U` comes from numerical integration.
    General(&'a Su11Hamiltonian, &'a IntegratorConfig),
}

/// `ρ(t)` for each of the non-decreasing `times`.
pub fn evolve_density_at(
    dynamics: Dynamics<'_>,
    rho0: &DensityMatrix,
    times: &[f64],
) -> Result<Vec<DensityMatrix>> {
    if let Some(&t) = times.iter().find(|t| !(**t >= 0.0)) {
        return Err(Error::InvalidScenario(format!(
            "time must be >= 0, got {t}"
        )));
    }
    let us = match dynamics {
        Dynamics::Solvable(s) => {
            let cf = ClosedForm::new(s)?;
            times
                .iter()
                .map(|&t| cf.propagator(t).map(|p| p.matrix()))
                .collect::<Result<Vec<_>>>()?
        }
        Dynamics::General(h, cfg) => oracle::integrate_u_at(h, times, cfg)?,
    };
    us.iter().map(|u| conjugate(u, rho0)).collect()
}

pub fn evolve_density(
    dynamics: Dynamics<'_>,
    rho0: &DensityMatrix,
    t: f64,
) -> Result<DensityMatrix> {
    Ok(evolve_density_at(dynamics, rho0, &[t])?.remove(0))
}

/// `−i[H₀, ρ] − {Γ, ρ} + 2ρ Tr(ρΓ)`.
pub fn nonlinear_rhs(h: &Mat2, rho: &Mat2) -> Mat2 {
    let HermitianSplit { h0, gamma } = split(h);
    let g = trace(&(rho * gamma));
    commutator(&h0, rho) * (-I) - anticommutator(&gamma, rho) + rho * (g * 2.0)
}

/// Direct integration of the nonlinear equation. The state is re-symmetrized
/// before every right-hand-side evaluation and at every output.
pub fn integrate_nonlinear<G>(
    generator: G,
    rho0: &DensityMatrix,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<DensityMatrix>>
where
    G: Fn(f64) -> Mat2,
{
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let rho = hermitize(&unpack(y));
        dy.copy_from_slice(&pack(&nonlinear_rhs(&generator(t), &rho)));
    };
    let states = ode::integrate_to_times(&rhs, 0.0, &pack(&rho0.0), times, cfg)?;
    Ok(states
        .iter()
        .map(|y| DensityMatrix(hermitize(&unpack(y))))
        .collect())
}

/// `‖φ_s(φ_t(ρ₀)) − φ_{s+t}(ρ₀)‖_max` for a constant generator.
pub fn semigroup_check(h: &Mat2, rho0: &DensityMatrix, s: f64, t: f64) -> Result<f64> {
    let step = |rho: &DensityMatrix, dt: f64| conjugate(&propagate_constant(h, dt), rho);
    let two_step = step(&step(rho0, t)?, s)?;
    let one_step = step(rho0, s + t)?;
    Ok(max_abs_diff(&two_step.0, &one_step.0))
}
