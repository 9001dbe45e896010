//! Direct numerical integration of `iU̇ = H(t)U` and of the Riccati system
//! for the factorization `U = e^{u₁σ⁺} e^{−u₂σ_z} e^{u₃σ⁻}`.
//!
//! These never touch the closed forms and serve as ground truth for them.

use num_complex::Complex64 as C64;

use crate::closed_form::Propagator;
use crate::error::{Error, Result};
use crate::linalg::{pack, unpack, Mat2};
use crate::ode::{self, IntegratorConfig};
use crate::su11::Su11Hamiltonian;

/// Escape radius for `|u₁|`.
pub const RICCATI_ESCAPE: f64 = 1e6;

/// Default configuration for `h` on `[0, t]`: `max_step = 0.01/max(|Ω|, |ω|)`.
pub fn default_config(h: &Su11Hamiltonian, t: f64) -> Result<IntegratorConfig> {
    Ok(IntegratorConfig::for_rate(h.rate_scale(t, 256)?))
}

fn check_range(h: &Su11Hamiltonian, t: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::InvalidScenario(format!(
            "time must be >= 0, got {t}"
        )));
    }
    h.coefficients(0.0)?;
    h.coefficients(t)?;
    Ok(())
}

/// Evolution operator of a matrix-valued generator at each of `times`.
pub fn integrate_generator<G>(
    generator: G,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<Mat2>>
where
    G: Fn(f64) -> Mat2,
{
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let u = unpack(y);
        let du = generator(t) * u * C64::new(0.0, -1.0);
        dy.copy_from_slice(&pack(&du));
    };
    let states = ode::integrate_to_times(&rhs, 0.0, &pack(&Mat2::identity()), times, cfg)?;
    Ok(states.iter().map(|s| unpack(s)).collect())
}

/// `U(t)` for each of the (non-decreasing) `times`.
pub fn integrate_u_at(
    h: &Su11Hamiltonian,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<Mat2>> {
    if let Some(&last) = times.last() {
        check_range(h, last)?;
    }
    // domain was checked on [0, t_max]; coefficient families are continuous
    integrate_generator(
        |t| {
            h.matrix(t)
                .unwrap_or_else(|_| Mat2::from_element(C64::new(f64::NAN, 0.0)))
        },
        times,
        cfg,
    )
}

/// Solves `iU̇ = H(t)U`, `U(0) = 𝟙`.
pub fn integrate_u(h: &Su11Hamiltonian, t: f64, cfg: &IntegratorConfig) -> Result<Mat2> {
    Ok(integrate_u_at(h, &[t], cfg)?.remove(0))
}

/// Caley-Klein view of an integrated evolution operator.
pub fn as_propagator(u: &Mat2) -> Propagator {
    Propagator {
        a: u[(0, 0)],
        b: u[(0, 1)],
    }
}

/// The three factorization parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiState {
    pub u1: C64,
    pub u2: C64,
    pub u3: C64,
}

impl RiccatiState {
    /// `e^{u₁σ⁺} e^{−u₂σ_z} e^{u₃σ⁻}`.
    pub fn matrix(&self) -> Mat2 {
        let e = self.u2.exp();
        let e_inv = (-self.u2).exp();
        Mat2::new(e_inv + self.u1 * e * self.u3, self.u1 * e, e * self.u3, e)
    }

    /// `u₁ = b/a*`, `u₂ = log a*`, `u₃ = b*/a*` (principal logarithm).
    pub fn from_caley_klein(p: &Propagator) -> Self {
        let ac = p.a.conj();
        Self {
            u1: p.b / ac,
            u2: ac.ln(),
            u3: p.b.conj() / ac,
        }
    }
}

/// Integrates
/// `u̇₁ = iω − 2iΩu₁ + iω*u₁²`, `u̇₂ = iΩ − iω*u₁`, `u̇₃ = −iω* e^{−2u₂}`
/// from zero initial data. `u₂` is integrated directly so its branch follows
/// continuity rather than the principal logarithm.
///
/// For su(1,1) input `|u₁| = |b|/|a| < 1`, so the escape check can only fire
/// for generators outside the algebra.
pub fn integrate_riccati_at(
    h: &Su11Hamiltonian,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<RiccatiState>> {
    if let Some(&last) = times.last() {
        check_range(h, last)?;
    }
    integrate_riccati_generator(
        |t| {
            h.matrix(t)
                .unwrap_or_else(|_| Mat2::from_element(C64::new(f64::NAN, 0.0)))
        },
        times,
        cfg,
    )
}

/// Riccati system for an arbitrary traceless generator `[[Ω, −ω], [ω̃, −Ω]]`,
/// with `ω̃` taking the place of `ω*`.
pub fn integrate_riccati_generator<G>(
    generator: G,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<RiccatiState>>
where
    G: Fn(f64) -> Mat2,
{
    let i = C64::new(0.0, 1.0);
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let m = generator(t);
        let big = m[(0, 0)];
        let w = -m[(0, 1)];
        let w_tilde = m[(1, 0)];
        let u1 = C64::new(y[0], y[1]);
        let u2 = C64::new(y[2], y[3]);
        let d1 = i * w - 2.0 * i * big * u1 + i * w_tilde * u1 * u1;
        let d2 = i * big - i * w_tilde * u1;
        let d3 = -i * w_tilde * (-2.0 * u2).exp();
        dy.copy_from_slice(&[d1.re, d1.im, d2.re, d2.im, d3.re, d3.im]);
    };
    let states = ode::integrate_observed(&rhs, 0.0, &[0.0; 6], times, cfg, |t, y| {
        let u1 = C64::new(y[0], y[1]);
        if !(u1.norm() <= RICCATI_ESCAPE) {
            return Err(Error::RiccatiBlowUp { t });
        }
        Ok(())
    })?;
    Ok(states
        .iter()
        .map(|y| RiccatiState {
            u1: C64::new(y[0], y[1]),
            u2: C64::new(y[2], y[3]),
            u3: C64::new(y[4], y[5]),
        })
        .collect())
}

pub fn integrate_riccati(
    h: &Su11Hamiltonian,
    t: f64,
    cfg: &IntegratorConfig,
) -> Result<RiccatiState> {
    Ok(integrate_riccati_at(h, &[t], cfg)?.remove(0))
}
