//! Exact evolution operators for the ν-parametrized solvable class.
//!
//! Under `2Ω + φ̇_ω = 2ν|ω|` the Riccati problem for `Y` reads
//! `dY/dχ = 1 − 2iνY − Y²`, `Y(0) = 0`, with `χ(t) = ∫₀ᵗ|ω|`. Its solution is
//! written here in forms that are finite for every χ: the trigonometric
//! branch is multiplied through by cos², the hyperbolic branch is expressed in
//! tanh and sech² only.
//!
//! The evolution operator is the Caley-Klein matrix `[[a, b], [b*, a*]]` with
//! `a = e^{r − is}` and `b = Ỹ e^{r} e^{i(s + y)}`, where `Ỹ` is the signed
//! amplitude of `Y = Ỹ e^{iφ_ν}`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::coefficient::CoefficientFn;
use crate::error::{Error, Result};
use crate::linalg::{sigma_y, sigma_z, Mat2, I};
use crate::quadrature::{self, QuadConfig};
use crate::su11::{SolvableScenario, Su11Hamiltonian};

/// `|ν − 1|` below which the rational (ν = 1) formulas are used.
pub const RATIONAL_BAND: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// ν > 1, oscillatory.
    Trigonometric,
    /// 0 < ν < 1, plateau.
    Hyperbolic,
    /// ν = 1.
    Rational,
    /// ν = 0.
    Zero,
}

impl Regime {
    pub fn classify(nu: f64) -> Regime {
        if nu == 0.0 {
            Regime::Zero
        } else if (nu - 1.0).abs() <= RATIONAL_BAND {
            Regime::Rational
        } else if nu > 1.0 {
            Regime::Trigonometric
        } else {
            Regime::Hyperbolic
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Trigonometric => "trigonometric",
            Regime::Hyperbolic => "hyperbolic",
            Regime::Rational => "rational",
            Regime::Zero => "zero",
        }
    }
}

/// The solution `Y_ν` as a function of the accumulated coupling `χ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeSolution {
    nu: f64,
    regime: Regime,
    /// `√|ν² − 1|`.
    rate: f64,
}

impl RegimeSolution {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu.is_finite() && nu >= 0.0) {
            return Err(Error::InvalidScenario(format!(
                "nu must be a finite non-negative number, got {nu}"
            )));
        }
        let regime = Regime::classify(nu);
        let rate = ((nu - 1.0) * (nu + 1.0)).abs().sqrt();
        Ok(Self { nu, regime, rate })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// `Y_ν(χ)`.
    pub fn y(&self, chi: f64) -> C64 {
        let nu = self.nu;
        match self.regime {
            Regime::Trigonometric => {
                let mu = self.rate;
                let (s, c) = (mu * chi).sin_cos();
                C64::new(mu * s * c, -nu * s * s) / (mu * mu + s * s)
            }
            Regime::Hyperbolic => {
                let k = self.rate;
                let th = (k * chi).tanh();
                C64::new(k * th, -nu * th * th) / (k * k + nu * nu * th * th)
            }
            Regime::Rational => C64::new(chi, -chi * chi) / (chi * chi + 1.0),
            Regime::Zero => C64::new(chi.tanh(), 0.0),
        }
    }

    /// `1 − |Y_ν(χ)|²`, free of cancellation as `|Y| → 1`.
    pub fn one_minus_abs_sq(&self, chi: f64) -> f64 {
        match self.regime {
            Regime::Trigonometric => {
                let mu = self.rate;
                let s = (mu * chi).sin();
                mu * mu / (mu * mu + s * s)
            }
            Regime::Hyperbolic => {
                let k = self.rate;
                let sech2 = (k * chi).cosh().powi(-2);
                let th = (k * chi).tanh();
                k * k * sech2 / (k * k * sech2 + th * th)
            }
            Regime::Rational => 1.0 / (1.0 + chi * chi),
            Regime::Zero => chi.cosh().powi(-2),
        }
    }

    /// Signed amplitude `Ỹ` such that `Y = Ỹ e^{iφ_ν}`; `|Ỹ| = |Y|`.
    ///
    /// In the trigonometric regime `Ỹ` changes sign with `sin(√(ν²−1)χ)`.
    pub fn signed_amplitude(&self, chi: f64) -> f64 {
        match self.regime {
            Regime::Trigonometric => {
                let mu = self.rate;
                let s = (mu * chi).sin();
                s / (mu * mu + s * s).sqrt()
            }
            Regime::Hyperbolic => {
                let k = self.rate;
                let sech2 = (k * chi).cosh().powi(-2);
                let th = (k * chi).tanh();
                th / (k * k * sech2 + th * th).sqrt()
            }
            Regime::Rational => chi / (1.0 + chi * chi).sqrt(),
            Regime::Zero => chi.tanh(),
        }
    }

    /// `φ_ν(χ) = −arctan[ν tan(√(ν²−1)χ)/√(ν²−1)]`, continued across every
    /// crossing of `√(ν²−1)χ` through `π/2 + kπ` so that it is continuous.
    pub fn phase(&self, chi: f64) -> f64 {
        let nu = self.nu;
        match self.regime {
            Regime::Trigonometric => {
                let mu = self.rate;
                let theta = mu * chi;
                // crossings of pi/2 + k pi below theta
                let m = (theta / PI).round();
                let (s, c) = (theta - m * PI).sin_cos();
                -(m * PI + (nu * s).atan2(mu * c))
            }
            Regime::Hyperbolic => {
                let k = self.rate;
                -(nu * (k * chi).tanh() / k).atan()
            }
            Regime::Rational => -chi.atan(),
            Regime::Zero => 0.0,
        }
    }

    /// `P₊⁻ = |Y|²/(1 + |Y|²)`.
    pub fn transition_probability(&self, chi: f64) -> f64 {
        let a = self.signed_amplitude(chi);
        a * a / (1.0 + a * a)
    }

    /// χ-period of `P₊⁻`, `π/√(ν²−1)`; `None` outside the trigonometric regime.
    pub fn chi_period(&self) -> Option<f64> {
        (self.regime == Regime::Trigonometric).then(|| PI / self.rate)
    }

    /// Largest value reached by `P₊⁻`: `1/(ν²+1)` when oscillating, the
    /// supremum `1/2` otherwise.
    pub fn peak_probability(&self) -> f64 {
        match self.regime {
            Regime::Trigonometric => 1.0 / (self.nu * self.nu + 1.0),
            _ => 0.5,
        }
    }

    pub fn is_oscillatory(&self) -> bool {
        self.regime == Regime::Trigonometric
    }
}

/// Caley-Klein pair of `U = [[a, b], [b*, a*]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagator {
    pub a: C64,
    pub b: C64,
}

impl Propagator {
    pub fn identity() -> Self {
        Self {
            a: C64::new(1.0, 0.0),
            b: C64::new(0.0, 0.0),
        }
    }

    pub fn matrix(&self) -> Mat2 {
        Mat2::new(self.a, self.b, self.b.conj(), self.a.conj())
    }

    /// `|a|² − |b|²` from the entries.
    pub fn det(&self) -> f64 {
        self.a.norm_sqr() - self.b.norm_sqr()
    }

    /// `|b|² / (|a|² + |b|²)`.
    pub fn transition_probability(&self) -> f64 {
        let (a2, b2) = (self.a.norm_sqr(), self.b.norm_sqr());
        b2 / (a2 + b2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseIntegrals {
    /// `∫₀ᵗ |ω| Re Y`.
    pub r: f64,
    /// `∫₀ᵗ Ω + ∫₀ᵗ |ω| Im Y`.
    pub s: f64,
    /// `π/2 + φ_ω(0) + 2νχ − 2∫₀ᵗΩ + φ_ν`.
    pub y: f64,
    pub phi_nu: f64,
    pub chi: f64,
    /// Signed amplitude `Ỹ` of `Y = Ỹ e^{iφ_ν}`.
    pub amplitude: f64,
    /// `1 − |Y|²`, evaluated without cancellation.
    pub one_minus_abs_sq: f64,
    /// Achieved quadrature error bound on `r` and `s`.
    pub quad_err: f64,
}

impl PhaseIntegrals {
    /// `exp(2r)·(1 − |Y|²)`, identically one.
    pub fn det_identity(&self) -> f64 {
        (2.0 * self.r).exp() * self.one_minus_abs_sq
    }

    pub fn propagator(&self) -> Propagator {
        let scale = self.r.exp();
        Propagator {
            a: C64::from_polar(scale, -self.s),
            b: C64::from_polar(self.amplitude * scale, self.s + self.y),
        }
    }
}

/// Closed-form solver bound to one scenario.
#[derive(Debug, Clone)]
pub struct ClosedForm {
    scenario: SolvableScenario,
    solution: RegimeSolution,
    hamiltonian: Su11Hamiltonian,
    chi_fn: CoefficientFn,
    big_omega_integral: CoefficientFn,
    quad: QuadConfig,
}

impl ClosedForm {
    pub fn new(scenario: &SolvableScenario) -> Result<Self> {
        let solution = RegimeSolution::new(scenario.nu)?;
        let hamiltonian = scenario.hamiltonian()?;
        let chi_fn = scenario
            .omega_abs
            .integral_from_zero()
            .map_err(|e| e.named("omega_abs"))?;
        let big_omega_integral = hamiltonian
            .big_omega
            .integral_from_zero()
            .map_err(|e| e.named("big_omega"))?;
        Ok(Self {
            scenario: scenario.clone(),
            solution,
            hamiltonian,
            chi_fn,
            big_omega_integral,
            quad: QuadConfig::default(),
        })
    }

    pub fn with_quadrature(mut self, quad: QuadConfig) -> Self {
        self.quad = quad;
        self
    }

    pub fn scenario(&self) -> &SolvableScenario {
        &self.scenario
    }

    pub fn solution(&self) -> &RegimeSolution {
        &self.solution
    }

    pub fn hamiltonian(&self) -> &Su11Hamiltonian {
        &self.hamiltonian
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(t >= 0.0) {
            return Err(Error::InvalidScenario(format!(
                "time must be >= 0, got {t}"
            )));
        }
        // the coefficients are evaluated on all of [0, t]
        self.hamiltonian.coefficients(0.0)?;
        self.hamiltonian.coefficients(t)?;
        Ok(())
    }

    /// `χ(t) = ∫₀ᵗ |ω|`, from the exact antiderivative of `|ω|`.
    pub fn chi(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        self.chi_fn.eval(t).map_err(|e| e.named("omega_abs"))
    }

    pub fn y(&self, t: f64) -> Result<C64> {
        Ok(self.solution.y(self.chi(t)?))
    }

    pub fn phase_integrals(&self, t: f64) -> Result<PhaseIntegrals> {
        let chi = self.chi(t)?;
        let sol = self.solution;
        let omega_abs = &self.scenario.omega_abs;
        let chi_fn = &self.chi_fn;
        let weighted_y = |tau: f64| -> C64 {
            match (omega_abs.eval(tau), chi_fn.eval(tau)) {
                (Ok(w), Ok(x)) => sol.y(x) * w,
                _ => C64::new(f64::NAN, f64::NAN),
            }
        };
        let r = quadrature::integrate(|tau| weighted_y(tau).re, 0.0, t, &self.quad)?;
        let s_im = quadrature::integrate(|tau| weighted_y(tau).im, 0.0, t, &self.quad)?;
        let omega_int = self
            .big_omega_integral
            .eval(t)
            .map_err(|e| e.named("big_omega"))?;
        let phi_nu = sol.phase(chi);
        let y = FRAC_PI_2 + self.scenario.phi0 + 2.0 * sol.nu() * chi - 2.0 * omega_int + phi_nu;
        Ok(PhaseIntegrals {
            r: r.value,
            s: omega_int + s_im.value,
            y,
            phi_nu,
            chi,
            amplitude: sol.signed_amplitude(chi),
            one_minus_abs_sq: sol.one_minus_abs_sq(chi),
            quad_err: r.abs_err.max(s_im.abs_err),
        })
    }

    pub fn propagator(&self, t: f64) -> Result<Propagator> {
        Ok(self.phase_integrals(t)?.propagator())
    }

    pub fn transition_probability(&self, t: f64) -> Result<f64> {
        Ok(self.solution.transition_probability(self.chi(t)?))
    }

    /// `(Ω + φ̇_ω/2)σ_z − i|ω|σ_y`, the generator in the frame rotated by
    /// `exp{iφ_ω σ_z/2}`; equals `|ω|(νσ_z − iσ_y)` for a solvable scenario.
    pub fn effective_hamiltonian(&self, t: f64) -> Result<Mat2> {
        let c = self.hamiltonian.coefficients(t)?;
        let rate = self.hamiltonian.phase_rate(t)?;
        Ok(sigma_z() * C64::from(c.big_omega + 0.5 * rate) - sigma_y() * (I * c.omega_abs))
    }

    /// `exp{iφ_ω(t)σ_z/2}`, the frame rotation.
    pub fn frame_rotation(&self, t: f64) -> Result<Mat2> {
        let phi = self.hamiltonian.coefficients(t)?.phi_omega;
        Ok(Mat2::new(
            C64::from_polar(1.0, 0.5 * phi),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::from_polar(1.0, -0.5 * phi),
        ))
    }
}

/// `χ(t)` for a scenario.
pub fn chi(scenario: &SolvableScenario, t: f64) -> Result<f64> {
    ClosedForm::new(scenario)?.chi(t)
}

pub fn propagator(scenario: &SolvableScenario, t: f64) -> Result<Propagator> {
    ClosedForm::new(scenario)?.propagator(t)
}

pub fn transition_probability(scenario: &SolvableScenario, t: f64) -> Result<f64> {
    ClosedForm::new(scenario)?.transition_probability(t)
}

pub fn effective_hamiltonian(scenario: &SolvableScenario, t: f64) -> Result<Mat2> {
    ClosedForm::new(scenario)?.effective_hamiltonian(t)
}
