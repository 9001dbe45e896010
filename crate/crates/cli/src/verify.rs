use std::f64::consts::FRAC_PI_2;

use anyhow::Result;
use clap::error::ErrorKind;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use su11::linalg::max_abs_diff;
use su11::open_dynamics::{evolve_density_at, Dynamics};
use su11::{oracle, ClosedForm, CoefficientFn, DensityMatrix, SolvableScenario};

use crate::input;
use crate::VerifyArgs;

struct Check {
    label: String,
    name: &'static str,
    value: f64,
    tol: f64,
}

impl Check {
    fn passed(&self) -> bool {
        self.value <= self.tol
    }
}

fn usage(msg: String) -> anyhow::Error {
    clap::Error::raw(ErrorKind::ValueValidation, format!("{msg}\n")).into()
}

fn parse_grid(src: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for part in src.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let nu: f64 = part
            .parse()
            .map_err(|_| usage(format!("invalid value '{part}' in --nu-grid")))?;
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(usage(format!(
                "--nu-grid values must be finite and >= 0, got {nu}"
            )));
        }
        out.push(nu);
    }
    if out.is_empty() {
        return Err(usage("--nu-grid must contain at least one value".into()));
    }
    Ok(out)
}

fn cases(nu: f64) -> Result<[(String, SolvableScenario); 2]> {
    Ok([
        (
            format!("nu={nu} constant"),
            SolvableScenario::constant(nu, 1.0, 0.0)?,
        ),
        (
            format!("nu={nu} driven"),
            SolvableScenario::new(
                nu,
                CoefficientFn::sinusoid(1.0, 0.5, 1.0, 0.0),
                CoefficientFn::sinusoid(0.0, 0.3, 1.0, FRAC_PI_2),
                0.0,
            )?,
        ),
    ])
}

fn riccati_residual(cf: &ClosedForm, chi_max: f64) -> f64 {
    let sol = cf.solution();
    let nu = sol.nu();
    let h = 1e-5;
    (0..1000)
        .map(|k| {
            let chi = h + chi_max * k as f64 / 999.0;
            let y = sol.y(chi);
            let dy = (sol.y(chi + h) - sol.y(chi - h)) / (2.0 * h);
            (dy - (C64::new(1.0, 0.0) - C64::new(0.0, 2.0 * nu) * y - y * y)).norm()
        })
        .fold(0.0, f64::max)
}

fn run_case(label: String, s: &SolvableScenario, times: &[f64], tol: f64) -> Result<Vec<Check>> {
    let cf = ClosedForm::new(s)?;
    let h = cf.hamiltonian();
    let t_max = *times.last().unwrap_or(&0.0);
    let cfg = oracle::default_config(h, t_max)?;
    let us = oracle::integrate_u_at(h, times, &cfg)?;
    let (mut dev, mut det) = (0.0f64, 0.0f64);
    for (&t, u) in times.iter().zip(&us) {
        let p = cf.phase_integrals(t)?;
        dev = dev.max(max_abs_diff(&p.propagator().matrix(), u));
        det = det.max((p.det_identity() - 1.0).abs());
    }
    let rhos = evolve_density_at(Dynamics::Solvable(s), &DensityMatrix::plus(), times)?;
    let (mut pop, mut trace) = (0.0f64, 0.0f64);
    for (&t, rho) in times.iter().zip(&rhos) {
        let y2 = cf.y(t)?.norm_sqr();
        pop = pop.max((rho.rho22() - y2 / (1.0 + y2)).abs());
        trace = trace.max((rho.trace() - C64::new(1.0, 0.0)).norm());
    }
    let riccati = riccati_residual(&cf, cf.chi(t_max)?.max(1.0));
    let check = |name, value, tol| Check {
        label: label.clone(),
        name,
        value,
        tol,
    };
    Ok(vec![
        check("closed form vs oracle", dev, tol),
        check("determinant identity", det, 1e-10),
        check("Riccati residual", riccati, 1e-6),
        check("rho22 vs |Y|^2/(1+|Y|^2)", pop, 1e-9),
        check("density trace", trace, 1e-12),
    ])
}

/// Returns whether every check passed.
pub fn run(args: &VerifyArgs) -> Result<bool> {
    let grid = parse_grid(&args.nu_grid)?;
    let times = input::sample_grid(args.t_max, args.samples, "t-max")?;
    if !(args.tol >= 0.0) {
        return Err(usage(format!("--tol must be >= 0, got {}", args.tol)));
    }
    let mut jobs = Vec::new();
    for &nu in &grid {
        jobs.extend(cases(nu)?);
    }
    let results: Vec<Vec<Check>> = jobs
        .into_par_iter()
        .map(|(label, s)| run_case(label, &s, &times, args.tol))
        .collect::<Result<_>>()?;
    let mut all = true;
    for c in results.iter().flatten() {
        all &= c.passed();
        println!(
            "{} {:<18} {:<26} max {:.3e} (tol {:.1e})",
            if c.passed() { "PASS" } else { "FAIL" },
            c.label,
            c.name,
            c.value,
            c.tol
        );
    }
    let failed = results.iter().flatten().filter(|c| !c.passed()).count();
    println!(
        "{} of {} checks passed",
        results.iter().map(Vec::len).sum::<usize>() - failed,
        results.iter().map(Vec::len).sum::<usize>()
    );
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0, 0.5,2").unwrap(), vec![0.0, 0.5, 2.0]);
        assert!(parse_grid("").is_err());
        assert!(parse_grid(" , ").is_err());
        assert!(parse_grid("1,x").is_err());
        assert!(parse_grid("-1").is_err());
    }
}
