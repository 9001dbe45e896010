//! Two counter-propagating coupled modes
//! `A' = k e^{−iΔz} B`, `B' = k* e^{iΔz} A`, solved as an su(1,1) problem in `z`.
//!
//! With `Ã = A e^{iΔz/2}`, `B̃ = B e^{−iΔz/2}` the system reads
//! `i d(Ã, B̃)/dz = [[−Δ/2, ik], [ik*, Δ/2]] (Ã, B̃)`. Exchanging the two labels
//! gives the canonical form with `Ω = Δ/2`, `|ω| = |k|`, `φ_ω = −φ_k − π/2`,
//! where solvability reads `Δ − φ_k' = 2ν|k|`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::closed_form::ClosedForm;
use crate::coefficient::CoefficientFn;
use crate::error::{Error, Result};
use crate::linalg::{Mat2, I};
use crate::ode::{self, IntegratorConfig};
use crate::oracle;
use crate::su11::{detect_nu, SolvableScenario, Su11Hamiltonian};

/// Tolerance of the solvability detector.
pub const DETECT_TOL: f64 = 1e-10;

/// Number of grid intervals used by the solvability detector.
pub const DETECT_INTERVALS: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoupledModeProblem {
    pub delta: f64,
    pub k_abs: CoefficientFn,
    pub phi_k: CoefficientFn,
    #[serde(rename = "A0")]
    pub a0: C64,
    #[serde(rename = "B0")]
    pub b0: C64,
}

impl CoupledModeProblem {
    /// Profile satisfying the solvability condition by construction:
    /// `φ_k(z) = φ_k(0) + Δz − 2ν∫₀ᶻ|k|`.
    pub fn solvable(
        nu: f64,
        k_abs: CoefficientFn,
        delta: f64,
        phi_k0: f64,
        a0: C64,
        b0: C64,
    ) -> Result<Self> {
        let phi_k = CoefficientFn::sum(vec![
            CoefficientFn::polynomial(vec![phi_k0, delta]),
            k_abs
                .integral_from_zero()
                .map_err(|e| e.named("k_abs"))?
                .scaled(-2.0 * nu),
        ]);
        Ok(Self {
            delta,
            k_abs,
            phi_k,
            a0,
            b0,
        })
    }

    pub fn validate(&self, z_max: f64) -> Result<()> {
        if !self.delta.is_finite() {
            return Err(Error::InvalidScenario(format!(
                "delta must be finite, got {}",
                self.delta
            )));
        }
        if !(z_max >= 0.0) {
            return Err(Error::InvalidScenario(format!(
                "z must be >= 0, got {z_max}"
            )));
        }
        self.k_abs
            .ensure_nonnegative(0.0, z_max)
            .map_err(|e| e.named("k_abs"))?;
        self.phi_k.eval(z_max).map_err(|e| e.named("phi_k"))?;
        Ok(())
    }

    /// `k(z) = |k| e^{iφ_k}`.
    pub fn k(&self, z: f64) -> Result<C64> {
        Ok(C64::from_polar(
            self.k_abs.eval(z).map_err(|e| e.named("k_abs"))?,
            self.phi_k.eval(z).map_err(|e| e.named("phi_k"))?,
        ))
    }

    /// `[[−Δ/2, ik], [ik*, Δ/2]]` acting on `(Ã, B̃)`.
    pub fn natural_hamiltonian(&self, z: f64) -> Result<Mat2> {
        let k = self.k(z)?;
        let d = C64::from(0.5 * self.delta);
        Ok(Mat2::new(-d, I * k, I * k.conj(), d))
    }
}

/// The canonical su(1,1) Hamiltonian in the label-exchanged basis `(B̃, Ã)`.
pub fn to_su11(problem: &CoupledModeProblem) -> Su11Hamiltonian {
    Su11Hamiltonian::new(
        CoefficientFn::constant(0.5 * problem.delta),
        problem.k_abs.clone(),
        CoefficientFn::sum(vec![
            problem.phi_k.scaled(-1.0),
            CoefficientFn::constant(-FRAC_PI_2),
        ]),
    )
}

/// The solvable scenario matching `problem` on `[0, z_max]`, if the
/// solvability condition holds to `tol` on a uniform grid.
pub fn detect_scenario(
    problem: &CoupledModeProblem,
    z_max: f64,
    tol: f64,
) -> Result<Option<SolvableScenario>> {
    let h = to_su11(problem);
    let grid: Vec<f64> = (0..=DETECT_INTERVALS)
        .map(|k| z_max * k as f64 / DETECT_INTERVALS as f64)
        .collect();
    let Some(nu) = detect_nu(&h, &grid, tol)? else {
        return Ok(None);
    };
    let phi_k0 = problem.phi_k.eval(0.0).map_err(|e| e.named("phi_k"))?;
    let scenario = SolvableScenario::new(
        nu,
        problem.k_abs.clone(),
        CoefficientFn::sum(vec![
            problem.k_abs.scaled(2.0 * nu),
            CoefficientFn::constant(-problem.delta),
        ]),
        -phi_k0 - FRAC_PI_2,
    )?;
    Ok(Some(scenario))
}

/// Mode amplitudes at one position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modes {
    pub z: f64,
    pub a: C64,
    pub b: C64,
}

impl Modes {
    pub fn flux(&self) -> f64 {
        self.a.norm_sqr() - self.b.norm_sqr()
    }
}

#[allow(clippy::large_enum_variant)]
enum Path {
    Closed(ClosedForm),
    Numeric(Su11Hamiltonian, IntegratorConfig),
}

/// Propagates `(A, B)` from `z = 0`, through the closed form when the profile
/// is solvable and numerically otherwise.
pub struct ModeSolver {
    problem: CoupledModeProblem,
    path: Path,
}

impl ModeSolver {
    pub fn new(problem: &CoupledModeProblem, z_max: f64) -> Result<Self> {
        Self::with_config(problem, z_max, None)
    }

    /// `cfg` overrides the integrator settings of the numerical path.
    pub fn with_config(
        problem: &CoupledModeProblem,
        z_max: f64,
        cfg: Option<IntegratorConfig>,
    ) -> Result<Self> {
        problem.validate(z_max)?;
        let path = match detect_scenario(problem, z_max, DETECT_TOL)? {
            Some(s) => Path::Closed(ClosedForm::new(&s)?),
            None => {
                let h = to_su11(problem);
                let cfg = match cfg {
                    Some(c) => c,
                    None => oracle::default_config(&h, z_max)?,
                };
                Path::Numeric(h, cfg)
            }
        };
        Ok(Self {
            problem: problem.clone(),
            path,
        })
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self.path, Path::Closed(_))
    }

    pub fn nu(&self) -> Option<f64> {
        match &self.path {
            Path::Closed(cf) => Some(cf.scenario().nu),
            Path::Numeric(..) => None,
        }
    }

    /// Amplitudes at each of the non-decreasing positions `zs`.
    pub fn modes_at(&self, zs: &[f64]) -> Result<Vec<Modes>> {
        if let Some(&z) = zs.iter().find(|z| !(**z >= 0.0)) {
            return Err(Error::InvalidScenario(format!("z must be >= 0, got {z}")));
        }
        let us = match &self.path {
            Path::Closed(cf) => zs
                .iter()
                .map(|&z| cf.propagator(z).map(|p| p.matrix()))
                .collect::<Result<Vec<_>>>()?,
            Path::Numeric(h, cfg) => oracle::integrate_u_at(h, zs, cfg)?,
        };
        let p = &self.problem;
        Ok(zs
            .iter()
            .zip(&us)
            .map(|(&z, u)| {
                // swapped basis: first slot B̃, second slot Ã
                let b_tilde = u[(0, 0)] * p.b0 + u[(0, 1)] * p.a0;
                let a_tilde = u[(1, 0)] * p.b0 + u[(1, 1)] * p.a0;
                let phase = C64::from_polar(1.0, -0.5 * p.delta * z);
                Modes {
                    z,
                    a: a_tilde * phase,
                    b: b_tilde * phase.conj(),
                }
            })
            .collect())
    }
}

pub fn propagate_modes(problem: &CoupledModeProblem, z: f64) -> Result<(C64, C64)> {
    let m = ModeSolver::new(problem, z)?.modes_at(&[z])?[0];
    Ok((m.a, m.b))
}

/// Direct integration of the coupled-mode equations in the original variables.
pub fn integrate_modes(
    problem: &CoupledModeProblem,
    zs: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<Modes>> {
    if let Some(&last) = zs.last() {
        problem.validate(last)?;
    }
    let rhs = |z: f64, y: &[f64], dy: &mut [f64]| {
        let k = problem.k(z).unwrap_or(C64::new(f64::NAN, 0.0));
        let a = C64::new(y[0], y[1]);
        let b = C64::new(y[2], y[3]);
        let rot = C64::from_polar(1.0, -problem.delta * z);
        let da = k * rot * b;
        let db = k.conj() * rot.conj() * a;
        dy.copy_from_slice(&[da.re, da.im, db.re, db.im]);
    };
    let y0 = [problem.a0.re, problem.a0.im, problem.b0.re, problem.b0.im];
    let states = ode::integrate_to_times(&rhs, 0.0, &y0, zs, cfg)?;
    Ok(zs
        .iter()
        .zip(&states)
        .map(|(&z, y)| Modes {
            z,
            a: C64::new(y[0], y[1]),
            b: C64::new(y[2], y[3]),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn direct_config(problem: &CoupledModeProblem, z_max: f64) -> IntegratorConfig {
        oracle::default_config(&to_su11(problem), z_max).unwrap()
    }

    #[test]
    fn pt_form_for_zero_mismatch() {
        let p = CoupledModeProblem {
            delta: 0.0,
            k_abs: 0.7.into(),
            phi_k: 0.0.into(),
            a0: c(1.0, 0.0),
            b0: c(0.0, 0.0),
        };
        let expected = Mat2::new(c(0.0, 0.0), c(0.0, 0.7), c(0.0, 0.7), c(0.0, 0.0));
        assert!(max_abs_diff(&p.natural_hamiltonian(1.0).unwrap(), &expected) < 1e-15);
        let phi = to_su11(&p).coefficients(1.0).unwrap().phi_omega;
        assert!((phi.abs() - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn swap_reproduces_natural_hamiltonian() {
        let p = CoupledModeProblem {
            delta: 0.8,
            k_abs: CoefficientFn::sinusoid(1.0, 0.2, 0.5, 0.0),
            phi_k: CoefficientFn::polynomial(vec![0.3, -0.1]),
            a0: c(1.0, 0.0),
            b0: c(0.0, 0.0),
        };
        let swap = Mat2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        for z in [0.0, 0.7, 2.3] {
            let canonical = to_su11(&p).matrix(z).unwrap();
            let natural = p.natural_hamiltonian(z).unwrap();
            assert!(max_abs_diff(&(swap * natural * swap), &canonical) < 1e-15);
        }
    }

    #[test]
    fn constant_coupling_scenario() {
        let nu = 0.75;
        let p = CoupledModeProblem {
            delta: 2.0 * nu,
            k_abs: 1.0.into(),
            phi_k: 0.0.into(),
            a0: c(1.0, 0.0),
            b0: c(0.0, 0.0),
        };
        let s = detect_scenario(&p, 5.0, DETECT_TOL)
            .unwrap()
            .expect("solvable");
        assert!((s.nu - nu).abs() < 1e-15);
        assert_eq!(s.omega_abs.constant_value(), Some(1.0));
    }

    #[test]
    fn uncoupled_modes_are_constant() {
        let p = CoupledModeProblem {
            delta: 1.3,
            k_abs: 0.0.into(),
            phi_k: 0.0.into(),
            a0: c(0.6, 0.2),
            b0: c(-0.1, 0.3),
        };
        for z in [0.0, 1.0, 7.5] {
            let (a, b) = propagate_modes(&p, z).unwrap();
            assert!((a - p.a0).norm() < 1e-10 && (b - p.b0).norm() < 1e-10);
        }
    }

    #[test]
    fn tanh_transfer_law() {
        let k = 0.8;
        let p = CoupledModeProblem {
            delta: 0.0,
            k_abs: k.into(),
            phi_k: 0.0.into(),
            a0: c(1.0, 0.0),
            b0: c(0.0, 0.0),
        };
        let zs: Vec<f64> = (0..=50).map(|j| 0.1 * j as f64).collect();
        let solver = ModeSolver::new(&p, 5.0).unwrap();
        assert_eq!(solver.nu(), Some(0.0));
        for m in solver.modes_at(&zs).unwrap() {
            assert!((m.b.norm() - (k * m.z).tanh() * m.a.norm()).abs() <= 1e-9);
            assert!((m.a - c((k * m.z).cosh(), 0.0)).norm() <= 1e-9 * (k * m.z).cosh());
        }
    }

    #[test]
    fn closed_form_matches_direct_integration() {
        for nu in [0.0, 0.6, 1.0, 1.5, 3.0] {
            let p = CoupledModeProblem::solvable(
                nu,
                CoefficientFn::sinusoid(0.8, 0.2, 0.9, 0.3),
                0.4,
                0.2,
                c(0.9, 0.1),
                c(0.2, -0.3),
            )
            .unwrap();
            let z_max = 4.0;
            let solver = ModeSolver::new(&p, z_max).unwrap();
            assert!(solver.is_closed_form(), "nu = {nu}");
            let zs: Vec<f64> = (1..=40).map(|j| 0.1 * j as f64).collect();
            let closed = solver.modes_at(&zs).unwrap();
            let direct = integrate_modes(&p, &zs, &direct_config(&p, z_max)).unwrap();
            let flux0 = p.a0.norm_sqr() - p.b0.norm_sqr();
            for (x, y) in closed.iter().zip(&direct) {
                assert!(
                    (x.a - y.a).norm() <= 1e-8 && (x.b - y.b).norm() <= 1e-8,
                    "nu = {nu}, z = {}",
                    x.z
                );
                assert!((x.flux() - flux0).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn perturbed_profile_is_not_solvable() {
        let mut p =
            CoupledModeProblem::solvable(1.2, 1.0.into(), 3.0, 0.0, c(1.0, 0.0), c(0.0, 0.0))
                .unwrap();
        assert!(detect_scenario(&p, 10.0, DETECT_TOL).unwrap().is_some());
        p.phi_k = CoefficientFn::sum(vec![
            p.phi_k.clone(),
            CoefficientFn::polynomial(vec![0.0, 0.0, 1e-3]),
        ]);
        assert!(detect_scenario(&p, 10.0, DETECT_TOL).unwrap().is_none());
        let solver = ModeSolver::new(&p, 10.0).unwrap();
        assert!(!solver.is_closed_form());
        let numeric = solver.modes_at(&[5.0, 10.0]).unwrap();
        let direct = integrate_modes(&p, &[5.0, 10.0], &direct_config(&p, 10.0)).unwrap();
        for (x, y) in numeric.iter().zip(&direct) {
            assert!((x.a - y.a).norm() <= 1e-8 && (x.b - y.b).norm() <= 1e-8);
        }
    }

    #[test]
    fn json_problem() {
        let src = r#"{"delta": 1.0,
            "k_abs": {"family": "constant", "params": [0.5]},
            "phi_k": {"family": "polynomial", "params": [0.0, 1.0]},
            "A0": [1.0, 0.0], "B0": [0.0, 0.5]}"#;
        let p: CoupledModeProblem = serde_json::from_str(src).unwrap();
        assert_eq!(p.b0, c(0.0, 0.5));
        // Δ − φ_k' = 0 ⇒ ν = 0
        let s = detect_scenario(&p, 3.0, DETECT_TOL).unwrap().unwrap();
        assert_eq!(s.nu, 0.0);
        assert!(serde_json::from_str::<CoupledModeProblem>(r#"{"delta": 1.0}"#).is_err());
    }
}
