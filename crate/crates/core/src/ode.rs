//! Explicit Runge–Kutta integration of real first-order systems.
//!
//! Complex systems are integrated as real systems of doubled dimension.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Classical fourth-order scheme with step `max_step`.
    Rk4Fixed,
    /// Dormand–Prince 5(4) with embedded error control.
    Rk45Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub method: Method,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.01,
            method: Method::Rk45Adaptive,
            max_steps: 10_000_000,
        }
    }
}

impl IntegratorConfig {
    /// Default tolerances with `max_step = 0.01 / rate_scale`.
    pub fn for_rate(rate_scale: f64) -> Self {
        let mut cfg = Self::default();
        if rate_scale > 0.0 && rate_scale.is_finite() {
            cfg.max_step = 0.01 / rate_scale;
        }
        cfg
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidConfig("max_step must be positive".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be positive".into()));
        }
        Ok(())
    }
}

// Dormand–Prince tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// B - B*, the embedded fourth-order difference
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Right-hand side `dy/dt = f(t, y)` written into `dy`.
pub trait System {
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]);
}

impl<F: Fn(f64, &[f64], &mut [f64])> System for F {
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        self(t, y, dy)
    }
}

fn axpy(out: &mut [f64], y: &[f64], h: f64, terms: &[(f64, &[f64])]) {
    for i in 0..y.len() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] = y[i] + h * acc;
    }
}

struct Stepper {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    next: Vec<f64>,
}

impl Stepper {
    fn new(n: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
            next: vec![0.0; n],
        }
    }

    fn rk4<S: System>(&mut self, sys: &S, t: f64, y: &[f64], h: f64) {
        let [k1, k2, k3, k4, ..] = &mut self.k;
        sys.rhs(t, y, k1);
        axpy(&mut self.tmp, y, h, &[(0.5, k1)]);
        sys.rhs(t + 0.5 * h, &self.tmp, k2);
        axpy(&mut self.tmp, y, h, &[(0.5, k2)]);
        sys.rhs(t + 0.5 * h, &self.tmp, k3);
        axpy(&mut self.tmp, y, h, &[(1.0, k3)]);
        sys.rhs(t + h, &self.tmp, k4);
        axpy(
            &mut self.next,
            y,
            h,
            &[
                (1.0 / 6.0, k1),
                (1.0 / 3.0, k2),
                (1.0 / 3.0, k3),
                (1.0 / 6.0, k4),
            ],
        );
    }

    /// One Dormand–Prince step; returns the scaled error norm.
    fn dopri<S: System>(
        &mut self,
        sys: &S,
        t: f64,
        y: &[f64],
        h: f64,
        cfg: &IntegratorConfig,
    ) -> f64 {
        let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
        sys.rhs(t, y, k1);
        axpy(&mut self.tmp, y, h, &[(A21, k1)]);
        sys.rhs(t + C2 * h, &self.tmp, k2);
        axpy(&mut self.tmp, y, h, &[(A31, k1), (A32, k2)]);
        sys.rhs(t + C3 * h, &self.tmp, k3);
        axpy(&mut self.tmp, y, h, &[(A41, k1), (A42, k2), (A43, k3)]);
        sys.rhs(t + C4 * h, &self.tmp, k4);
        axpy(
            &mut self.tmp,
            y,
            h,
            &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)],
        );
        sys.rhs(t + C5 * h, &self.tmp, k5);
        axpy(
            &mut self.tmp,
            y,
            h,
            &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)],
        );
        sys.rhs(t + h, &self.tmp, k6);
        axpy(
            &mut self.next,
            y,
            h,
            &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)],
        );
        sys.rhs(t + h, &self.next, k7);
        let mut sum = 0.0;
        for i in 0..y.len() {
            let err =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(self.next[i].abs());
            sum += (err / scale).powi(2);
        }
        (sum / y.len() as f64).sqrt()
    }
}

/// Integrates from `t0` through every time in `times` (non-decreasing, all
/// `>= t0`), returning the state at each. `observe` runs after each accepted
/// step and may abort the integration.
pub fn integrate_observed<S, O>(
    sys: &S,
    t0: f64,
    y0: &[f64],
    times: &[f64],
    cfg: &IntegratorConfig,
    mut observe: O,
) -> Result<Vec<Vec<f64>>>
where
    S: System,
    O: FnMut(f64, &[f64]) -> Result<()>,
{
    cfg.validate()?;
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut stepper = Stepper::new(y.len());
    let mut steps = 0usize;
    let mut h = cfg.max_step;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        if target < t {
            return Err(Error::InvalidConfig(format!(
                "output times must be non-decreasing, got {target} after {t}"
            )));
        }
        while t < target {
            if steps >= cfg.max_steps {
                return Err(Error::StepLimit { t, steps });
            }
            let remaining = target - t;
            let last = h.min(cfg.max_step) >= remaining;
            let step = if last { remaining } else { h.min(cfg.max_step) };
            match cfg.method {
                Method::Rk4Fixed => {
                    stepper.rk4(sys, t, &y, step);
                }
                Method::Rk45Adaptive => {
                    let err = stepper.dopri(sys, t, &y, step, cfg);
                    if !err.is_finite() || err > 1.0 {
                        let shrink = if err.is_finite() {
                            (0.9 * err.powf(-0.2)).max(0.2)
                        } else {
                            0.2
                        };
                        h = step * shrink;
                        steps += 1;
                        if h <= f64::EPSILON * t.abs().max(1.0) {
                            return Err(Error::StepUnderflow { t });
                        }
                        continue;
                    }
                    let grow = if err == 0.0 {
                        5.0
                    } else {
                        (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    // keep the proposal from the full step, not the clipped one
                    if !last {
                        h = step * grow;
                    } else {
                        h = h.max(step * grow);
                    }
                }
            }
            std::mem::swap(&mut y, &mut stepper.next);
            t = if last { target } else { t + step };
            steps += 1;
            observe(t, &y)?;
        }
        out.push(y.clone());
    }
    Ok(out)
}

pub fn integrate_to_times<S: System>(
    sys: &S,
    t0: f64,
    y0: &[f64],
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<Vec<f64>>> {
    integrate_observed(sys, t0, y0, times, cfg, |_, _| Ok(()))
}

pub fn integrate<S: System>(
    sys: &S,
    t0: f64,
    y0: &[f64],
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec<f64>> {
    let mut states = integrate_to_times(sys, t0, y0, &[t1], cfg)?;
    Ok(states.pop().expect("one output time"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillator(_: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = y[1];
        dy[1] = -y[0];
    }

    #[test]
    fn harmonic_oscillator() {
        let cfg = IntegratorConfig::default();
        let y = integrate(&oscillator, 0.0, &[1.0, 0.0], 10.0, &cfg).unwrap();
        assert!((y[0] - 10f64.cos()).abs() < 1e-9);
        assert!((y[1] + 10f64.sin()).abs() < 1e-9);
        let fixed = cfg.with_method(Method::Rk4Fixed);
        let y = integrate(&oscillator, 0.0, &[1.0, 0.0], 10.0, &fixed).unwrap();
        assert!((y[0] - 10f64.cos()).abs() < 1e-8);
    }

    #[test]
    fn non_autonomous_growth() {
        // y' = t y, y = exp(t²/2)
        let sys = |t: f64, y: &[f64], dy: &mut [f64]| dy[0] = t * y[0];
        let cfg = IntegratorConfig::default();
        let states = integrate_to_times(&sys, 0.0, &[1.0], &[0.5, 1.0, 2.0], &cfg).unwrap();
        for (t, s) in [0.5f64, 1.0, 2.0].iter().zip(&states) {
            let exact = (t * t / 2.0).exp();
            assert!((s[0] - exact).abs() < 1e-9 * exact);
        }
    }

    #[test]
    fn halving_tolerance_converges() {
        let sys = |t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = (t.sin() + 1.0) * y[1];
            dy[1] = -y[0] + 0.1 * y[1];
        };
        let coarse = IntegratorConfig::default().with_tolerances(1e-8, 1e-10);
        let fine = IntegratorConfig::default().with_tolerances(5e-9, 5e-11);
        let a = integrate(&sys, 0.0, &[1.0, 0.0], 5.0, &coarse).unwrap();
        let b = integrate(&sys, 0.0, &[1.0, 0.0], 5.0, &fine).unwrap();
        for i in 0..2 {
            assert!((a[i] - b[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn step_limit_reports_time() {
        let cfg = IntegratorConfig {
            max_steps: 10,
            ..IntegratorConfig::default()
        };
        match integrate(&oscillator, 0.0, &[1.0, 0.0], 10.0, &cfg) {
            Err(Error::StepLimit { t, steps }) => {
                assert_eq!(steps, 10);
                assert!(t > 0.0 && t < 10.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn observer_can_abort() {
        let cfg = IntegratorConfig::default();
        let r = integrate_observed(&oscillator, 0.0, &[1.0, 0.0], &[5.0], &cfg, |t, _| {
            if t > 1.0 {
                Err(Error::RiccatiBlowUp { t })
            } else {
                Ok(())
            }
        });
        assert!(matches!(r, Err(Error::RiccatiBlowUp { .. })));
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = IntegratorConfig {
            abs_tol: 0.0,
            ..IntegratorConfig::default()
        };
        assert!(integrate(&oscillator, 0.0, &[1.0, 0.0], 1.0, &cfg).is_err());
    }
}
