//! su(1,1) Hamiltonians `[[Ω, −ω], [ω*, −Ω]]` with `ω = |ω| e^{iφ_ω}`, and
//! their algebraic predicates.

use serde::{Deserialize, Serialize};

use crate::coefficient::CoefficientFn;
use crate::error::{Error, Result};
use crate::linalg::{max_abs_diff, sigma_z, Mat2, ONE};
use num_complex::Complex64 as C64;

/// Time-dependent su(1,1) Hamiltonian given by the triple (Ω, |ω|, φ_ω).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Su11Hamiltonian {
    pub big_omega: CoefficientFn,
    pub omega_abs: CoefficientFn,
    pub phi_omega: CoefficientFn,
}

/// Instantaneous values of the three defining coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub big_omega: f64,
    pub omega_abs: f64,
    pub phi_omega: f64,
}

impl Coefficients {
    pub fn omega(&self) -> C64 {
        C64::from_polar(self.omega_abs, self.phi_omega)
    }

    pub fn matrix(&self) -> Mat2 {
        let w = self.omega();
        let o = C64::from(self.big_omega);
        Mat2::new(o, -w, w.conj(), -o)
    }
}

impl Su11Hamiltonian {
    pub fn new(
        big_omega: CoefficientFn,
        omega_abs: CoefficientFn,
        phi_omega: CoefficientFn,
    ) -> Self {
        Self {
            big_omega,
            omega_abs,
            phi_omega,
        }
    }

    pub fn constant(big_omega: f64, omega_abs: f64, phi_omega: f64) -> Self {
        Self::new(big_omega.into(), omega_abs.into(), phi_omega.into())
    }

    /// Common domain of the three coefficients.
    pub fn domain(&self) -> (f64, f64) {
        let (a0, b0) = self.big_omega.domain();
        let (a1, b1) = self.omega_abs.domain();
        let (a2, b2) = self.phi_omega.domain();
        (a0.max(a1).max(a2), b0.min(b1).min(b2))
    }

    /// Checks `|ω| ≥ 0` on `[0, t_max]`.
    pub fn validate(&self, t_max: f64) -> Result<()> {
        self.omega_abs
            .ensure_nonnegative(0.0, t_max)
            .map_err(|e| e.named("omega_abs"))?;
        self.big_omega
            .eval(t_max)
            .map_err(|e| e.named("big_omega"))?;
        self.phi_omega
            .eval(t_max)
            .map_err(|e| e.named("phi_omega"))?;
        Ok(())
    }

    pub fn coefficients(&self, t: f64) -> Result<Coefficients> {
        Ok(Coefficients {
            big_omega: self.big_omega.eval(t).map_err(|e| e.named("big_omega"))?,
            omega_abs: self.omega_abs.eval(t).map_err(|e| e.named("omega_abs"))?,
            phi_omega: self.phi_omega.eval(t).map_err(|e| e.named("phi_omega"))?,
        })
    }

    /// `φ̇_ω(t)`, from the coefficient family's exact derivative.
    pub fn phase_rate(&self, t: f64) -> Result<f64> {
        self.phi_omega
            .derivative(t)
            .map_err(|e| e.named("phi_omega"))
    }

    pub fn matrix(&self, t: f64) -> Result<Mat2> {
        Ok(self.coefficients(t)?.matrix())
    }

    /// Largest of `|Ω|` and `|ω|` on the sample grid `0, t/n, …, t`.
    pub fn rate_scale(&self, t: f64, n: usize) -> Result<f64> {
        let mut scale = 0.0f64;
        for k in 0..=n {
            let c = self.coefficients(t * k as f64 / n as f64)?;
            scale = scale.max(c.big_omega.abs()).max(c.omega_abs);
        }
        Ok(scale)
    }
}

/// `hamiltonian_matrix(h, t)`.
pub fn hamiltonian_matrix(h: &Su11Hamiltonian, t: f64) -> Result<Mat2> {
    h.matrix(t)
}

/// `‖M† − σ_z M σ_z‖_max ≤ tol`.
pub fn is_pseudo_hermitian(m: &Mat2, tol: f64) -> bool {
    let sz = sigma_z();
    max_abs_diff(&m.adjoint(), &(sz * m * sz)) <= tol
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumKind {
    Real,
    /// Exceptional point: both eigenvalues coalesce at zero.
    Degenerate,
    ComplexPair,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    /// `E₊`; `E₋ = −E₊`.
    pub upper: C64,
    pub kind: SpectrumKind,
}

impl Spectrum {
    pub fn from_coefficients(big_omega: f64, omega_abs: f64) -> Self {
        let disc = big_omega * big_omega - omega_abs * omega_abs;
        let kind = if disc > 0.0 {
            SpectrumKind::Real
        } else if disc == 0.0 {
            SpectrumKind::Degenerate
        } else {
            SpectrumKind::ComplexPair
        };
        let upper = if disc >= 0.0 {
            C64::new(disc.sqrt(), 0.0)
        } else {
            C64::new(0.0, (-disc).sqrt())
        };
        Self { upper, kind }
    }

    pub fn eigenvalues(&self) -> [C64; 2] {
        [self.upper, -self.upper]
    }
}

/// `E± = ±√(Ω² − |ω|²)` with its reality classification.
pub fn spectrum(h: &Su11Hamiltonian, t: f64) -> Result<Spectrum> {
    let c = h.coefficients(t)?;
    Ok(Spectrum::from_coefficients(c.big_omega, c.omega_abs))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric {
    pub eta: Mat2,
    pub positive: bool,
    /// `‖H†η₊ − η₊H‖_max`.
    pub residual: f64,
}

/// The positive metric candidate `η₊ = [[1, −ω/Ω], [−ω*/Ω, 1]]`.
pub fn quasi_hermitian_metric(h: &Su11Hamiltonian, t: f64) -> Result<Metric> {
    let c = h.coefficients(t)?;
    if c.big_omega == 0.0 {
        return Err(Error::SingularMetric { t });
    }
    let w = c.omega() / c.big_omega;
    let eta = Mat2::new(ONE, -w, -w.conj(), ONE);
    let m = c.matrix();
    Ok(Metric {
        eta,
        positive: c.omega_abs * c.omega_abs < c.big_omega * c.big_omega,
        residual: max_abs_diff(&(m.adjoint() * eta), &(eta * m)),
    })
}

/// True iff φ_ω and Ω/|ω| are constant on the grid and the spectrum is real,
/// i.e. η₊ is time-independent and positive.
pub fn is_closed_system(h: &Su11Hamiltonian, grid: &[f64]) -> Result<bool> {
    const TOL: f64 = 1e-12;
    let Some(&t0) = grid.first() else {
        return Err(Error::InvalidScenario("empty time grid".into()));
    };
    let first = h.coefficients(t0)?;
    let mut ratio: Option<f64> = None;
    let mut zeros = 0usize;
    for &t in grid {
        let c = h.coefficients(t)?;
        if (c.phi_omega - first.phi_omega).abs() > TOL {
            return Ok(false);
        }
        if c.omega_abs * c.omega_abs >= c.big_omega * c.big_omega {
            return Ok(false);
        }
        if c.omega_abs == 0.0 {
            zeros += 1;
            continue;
        }
        let r = c.big_omega / c.omega_abs;
        match ratio {
            None => ratio = Some(r),
            Some(r0) if (r - r0).abs() > TOL * r0.abs().max(1.0) => return Ok(false),
            _ => {}
        }
    }
    // a vanishing |ω| leaves the ratio undefined unless it vanishes everywhere
    Ok(zeros == 0 || zeros == grid.len())
}

/// Exactly solvable scenario: `Ω = ν|ω| − c/2`, `φ_ω = φ₀ + ∫₀ᵗ c`, so that
/// `2Ω + φ̇_ω = 2ν|ω|` holds by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolvableScenario {
    pub nu: f64,
    pub omega_abs: CoefficientFn,
    pub phase_rate: CoefficientFn,
    #[serde(default)]
    pub phi0: f64,
}

impl SolvableScenario {
    pub fn new(
        nu: f64,
        omega_abs: CoefficientFn,
        phase_rate: CoefficientFn,
        phi0: f64,
    ) -> Result<Self> {
        let s = Self {
            nu,
            omega_abs,
            phase_rate,
            phi0,
        };
        s.check_nu()?;
        Ok(s)
    }

    /// Constant coefficients: `|ω| = omega0`, `φ̇_ω = c0`.
    pub fn constant(nu: f64, omega0: f64, c0: f64) -> Result<Self> {
        Self::new(nu, omega0.into(), c0.into(), 0.0)
    }

    /// Constant scenario with prescribed `Ω₀` and `c₀`; `|ω₀| = (2Ω₀ + c₀)/(2ν)`.
    pub fn from_rabi(nu: f64, big_omega0: f64, c0: f64) -> Result<Self> {
        if nu <= 0.0 {
            return Err(Error::InvalidScenario(
                "fixing Omega_0 requires nu > 0".into(),
            ));
        }
        let omega0 = (2.0 * big_omega0 + c0) / (2.0 * nu);
        if omega0 < 0.0 {
            return Err(Error::InvalidScenario(format!(
                "2 Omega_0 + c_0 = {} gives a negative |omega_0|",
                2.0 * big_omega0 + c0
            )));
        }
        Self::constant(nu, omega0, c0)
    }

    fn check_nu(&self) -> Result<()> {
        if !(self.nu.is_finite() && self.nu >= 0.0) {
            return Err(Error::InvalidScenario(format!(
                "nu must be a finite non-negative number, got {}",
                self.nu
            )));
        }
        Ok(())
    }

    pub fn validate(&self, t_max: f64) -> Result<()> {
        self.check_nu()?;
        self.omega_abs
            .ensure_nonnegative(0.0, t_max)
            .map_err(|e| e.named("omega_abs"))?;
        self.phase_rate
            .eval(t_max)
            .map_err(|e| e.named("phase_rate"))?;
        Ok(())
    }

    pub fn big_omega(&self) -> CoefficientFn {
        CoefficientFn::sum(vec![
            self.omega_abs.scaled(self.nu),
            self.phase_rate.scaled(-0.5),
        ])
    }

    pub fn phi_omega(&self) -> Result<CoefficientFn> {
        Ok(CoefficientFn::sum(vec![
            CoefficientFn::constant(self.phi0),
            self.phase_rate
                .integral_from_zero()
                .map_err(|e| e.named("phase_rate"))?,
        ]))
    }

    pub fn hamiltonian(&self) -> Result<Su11Hamiltonian> {
        Ok(Su11Hamiltonian::new(
            self.big_omega(),
            self.omega_abs.clone(),
            self.phi_omega()?,
        ))
    }

    /// True when every coefficient is time independent (the Rabi-like case).
    pub fn is_constant(&self) -> bool {
        self.omega_abs.is_constant() && self.phase_rate.is_constant()
    }

    /// Name of the first time-dependent field, if any.
    pub fn first_time_dependent_field(&self) -> Option<&'static str> {
        if !self.omega_abs.is_constant() {
            Some("omega_abs")
        } else if !self.phase_rate.is_constant() {
            Some("phase_rate")
        } else {
            None
        }
    }
}

/// `max_t |2Ω(t) + φ̇_ω(t) − 2ν|ω(t)||` over the grid.
pub fn solvability_residual(h: &Su11Hamiltonian, nu: f64, grid: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &t in grid {
        let c = h.coefficients(t)?;
        let r = 2.0 * c.big_omega + h.phase_rate(t)? - 2.0 * nu * c.omega_abs;
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// Looks for a constant `ν ≥ 0` with `2Ω + φ̇_ω = 2ν|ω|` on the grid.
pub fn detect_nu(h: &Su11Hamiltonian, grid: &[f64], tol: f64) -> Result<Option<f64>> {
    let mut estimate: Option<f64> = None;
    for &t in grid {
        let c = h.coefficients(t)?;
        if c.omega_abs > 0.0 {
            let lhs = 2.0 * c.big_omega + h.phase_rate(t)?;
            estimate = Some(lhs / (2.0 * c.omega_abs));
            break;
        }
    }
    let Some(nu) = estimate else {
        return Ok(None);
    };
    if nu < -tol {
        return Ok(None);
    }
    let nu = nu.max(0.0);
    Ok((solvability_residual(h, nu, grid)? <= tol).then_some(nu))
}

/// The ν above which the constant spectrum is real, `1 + c₀/(2Ω₀)`.
///
/// Obtained by substituting `|ω₀| = (2Ω₀ + c₀)/(2ν)` into `|ω₀| < Ω₀`.
pub fn reality_threshold(scenario: &SolvableScenario) -> Result<f64> {
    let (Some(omega0), Some(c0)) = (
        scenario.omega_abs.constant_value(),
        scenario.phase_rate.constant_value(),
    ) else {
        return Err(Error::InvalidScenario(
            "reality threshold needs constant coefficients".into(),
        ));
    };
    if omega0 <= 0.0 {
        return Err(Error::InvalidScenario("|omega_0| must be positive".into()));
    }
    let big_omega0 = scenario.nu * omega0 - 0.5 * c0;
    if big_omega0 <= 0.0 {
        return Err(Error::UnsupportedSign(format!(
            "Omega_0 = {big_omega0} must be positive"
        )));
    }
    Ok(1.0 + c0 / (2.0 * big_omega0))
}

/// `1 + c₀/Ω₀`, the threshold without the factor 2 on `Ω₀`;
/// kept for comparison reports only.
pub fn uncorrected_reality_threshold(big_omega0: f64, c0: f64) -> f64 {
    1.0 + c0 / big_omega0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{sigma_x, I, ZERO};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn matrix_examples() {
        let m = Su11Hamiltonian::constant(1.0, 0.0, 0.7)
            .matrix(0.0)
            .unwrap();
        assert!(max_abs_diff(&m, &Mat2::new(c(1., 0.), ZERO, ZERO, c(-1., 0.))) < 1e-15);
        let m = Su11Hamiltonian::constant(0.0, 1.0, FRAC_PI_2)
            .matrix(0.0)
            .unwrap();
        assert!(max_abs_diff(&m, &Mat2::new(ZERO, -I, -I, ZERO)) < 1e-15);
        let m = Su11Hamiltonian::constant(2.0, 1.0, 0.0)
            .matrix(0.0)
            .unwrap();
        assert!(max_abs_diff(&m, &Mat2::new(c(2., 0.), c(-1., 0.), c(1., 0.), c(-2., 0.))) < 1e-15);
    }

    #[test]
    fn matrix_domain_error_names_coefficient() {
        let h = Su11Hamiltonian::new(
            1.0.into(),
            CoefficientFn::table(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap(),
            0.0.into(),
        );
        match h.matrix(2.0) {
            Err(Error::Domain { name, .. }) => assert_eq!(name, "omega_abs"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pseudo_hermiticity() {
        let m = Su11Hamiltonian::constant(0.3, 1.7, 2.1)
            .matrix(0.0)
            .unwrap();
        assert!(is_pseudo_hermitian(&m, 1e-12));
        assert!(!is_pseudo_hermitian(&sigma_x(), 1e-12));
        assert!(!is_pseudo_hermitian(&Mat2::new(I, ZERO, ZERO, -I), 1e-12));
    }

    #[test]
    fn spectrum_examples() {
        let s = Spectrum::from_coefficients(2.0, 1.0);
        assert_eq!(s.kind, SpectrumKind::Real);
        assert_abs_diff_eq!(s.upper.re, 3f64.sqrt(), epsilon = 1e-15);
        let s = Spectrum::from_coefficients(1.0, 1.0);
        assert_eq!(s.kind, SpectrumKind::Degenerate);
        assert_eq!(s.upper, ZERO);
        let s = Spectrum::from_coefficients(0.0, 1.0);
        assert_eq!(s.kind, SpectrumKind::ComplexPair);
        assert_eq!(s.eigenvalues(), [I, -I]);
    }

    #[test]
    fn spectrum_matches_matrix_eigenvalues() {
        // E² = −det H for a traceless 2×2 matrix
        for &(o, w, p) in &[(2.0, 1.0, 0.3), (0.5, 1.5, -1.0), (1.0, 1.0, 2.0)] {
            let h = Su11Hamiltonian::constant(o, w, p);
            let e = spectrum(&h, 0.0).unwrap().upper;
            let d = crate::linalg::det(&h.matrix(0.0).unwrap());
            assert!((e * e + d).norm() < 1e-14);
        }
    }

    #[test]
    fn metric_examples() {
        let m = quasi_hermitian_metric(&Su11Hamiltonian::constant(3.0, 0.0, 0.0), 0.0).unwrap();
        assert!(max_abs_diff(&m.eta, &Mat2::identity()) < 1e-15);
        assert!(m.positive);
        let m = quasi_hermitian_metric(&Su11Hamiltonian::constant(2.0, 1.0, 0.0), 0.0).unwrap();
        let expected = Mat2::new(ONE, c(-0.5, 0.), c(-0.5, 0.), ONE);
        assert!(max_abs_diff(&m.eta, &expected) < 1e-15);
        assert!(m.positive);
        let [lo, hi] = crate::linalg::hermitian_eigenvalues(&m.eta);
        assert_abs_diff_eq!(lo, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(hi, 1.5, epsilon = 1e-15);
        assert!(m.residual < 1e-12);
        let m = quasi_hermitian_metric(&Su11Hamiltonian::constant(1.0, 2.0, 0.4), 0.0).unwrap();
        assert!(!m.positive);
        assert!(m.residual < 1e-12);
        assert_eq!(
            quasi_hermitian_metric(&Su11Hamiltonian::constant(0.0, 2.0, 0.4), 1.5),
            Err(Error::SingularMetric { t: 1.5 })
        );
    }

    #[test]
    fn reality_threshold_examples() {
        let t = reality_threshold(&SolvableScenario::from_rabi(0.8, 1.0, 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(t, 1.0, epsilon = 1e-15);
        let t = reality_threshold(&SolvableScenario::from_rabi(0.8, 1.0, -0.5).unwrap()).unwrap();
        assert!(t < 1.0);
        let t = reality_threshold(&SolvableScenario::from_rabi(1.1, 1.0, 0.5).unwrap()).unwrap();
        assert_abs_diff_eq!(t, 1.25, epsilon = 1e-15);
        // cross-check against the spectrum on both sides of 1.25
        for (nu, kind) in [(1.2, SpectrumKind::ComplexPair), (1.3, SpectrumKind::Real)] {
            let s = SolvableScenario::from_rabi(nu, 1.0, 0.5).unwrap();
            assert_eq!(spectrum(&s.hamiltonian().unwrap(), 0.0).unwrap().kind, kind);
        }
        // Omega_0 <= 0 is rejected
        let neg = SolvableScenario::constant(0.1, 1.0, 1.0).unwrap();
        assert!(matches!(
            reality_threshold(&neg),
            Err(Error::UnsupportedSign(_))
        ));
    }

    #[test]
    fn closed_system_examples() {
        let grid: Vec<f64> = (0..50).map(|k| 0.1 * k as f64).collect();
        let f = CoefficientFn::sinusoid(2.0, 1.0, 1.0, 0.0);
        let h = Su11Hamiltonian::new(f.scaled(2.0), f.clone(), 0.3.into());
        assert!(is_closed_system(&h, &grid).unwrap());
        let h = Su11Hamiltonian::new(
            3.0.into(),
            CoefficientFn::sinusoid(0.0, 1.0, 1.0, 0.0),
            0.3.into(),
        );
        assert!(!is_closed_system(&h, &grid).unwrap());
        let h = Su11Hamiltonian::new(
            2.0.into(),
            1.0.into(),
            CoefficientFn::polynomial(vec![0.0, 1.0]),
        );
        assert!(!is_closed_system(&h, &grid).unwrap());
        let h = Su11Hamiltonian::constant(1.0, 0.0, 0.0);
        assert!(is_closed_system(&h, &grid).unwrap());
        assert!(is_closed_system(&h, &[]).is_err());
    }

    #[test]
    fn scenario_satisfies_solvability_condition() {
        let s = SolvableScenario::new(
            1.3,
            CoefficientFn::sinusoid(1.0, 0.5, 1.0, 0.0),
            CoefficientFn::sinusoid(0.0, 0.3, 1.0, FRAC_PI_2),
            0.4,
        )
        .unwrap();
        let h = s.hamiltonian().unwrap();
        let grid: Vec<f64> = (0..1000).map(|k| 0.01 * k as f64).collect();
        assert!(solvability_residual(&h, 1.3, &grid).unwrap() <= 1e-10);
        assert_abs_diff_eq!(h.phi_omega.eval(0.0).unwrap(), 0.4, epsilon = 1e-15);
        let nu = detect_nu(&h, &grid, 1e-10).unwrap().unwrap();
        assert_abs_diff_eq!(nu, 1.3, epsilon = 1e-12);
    }

    #[test]
    fn negative_nu_rejected() {
        assert!(SolvableScenario::constant(-0.1, 1.0, 0.0).is_err());
        assert!(SolvableScenario::constant(f64::NAN, 1.0, 0.0).is_err());
    }

    #[test]
    fn json_field_names() {
        let s: SolvableScenario = serde_json::from_str(
            r#"{"nu":2,"omega_abs":{"family":"constant","params":[1]},
                "phase_rate":{"family":"constant","params":[0]},"phi0":0.5}"#,
        )
        .unwrap();
        assert_eq!(s.nu, 2.0);
        assert_eq!(s.phi0, 0.5);
        let h: Su11Hamiltonian = serde_json::from_str(
            r#"{"big_omega":{"family":"constant","params":[1]},
                "omega_abs":{"family":"table","t":[0,1],"v":[0,1]},
                "phi_omega":{"family":"polynomial","params":[0,1]}}"#,
        )
        .unwrap();
        assert_abs_diff_eq!(h.coefficients(0.5).unwrap().omega_abs, 0.5, epsilon = 1e-15);
        assert!(serde_json::from_str::<SolvableScenario>(r#"{"nu":1}"#).is_err());
    }
}
