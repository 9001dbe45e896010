use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use su11::closed_form::ClosedForm;
use su11::guided_wave::ModeSolver;
use su11::open_dynamics::{evolve_density_at, Dynamics};
use su11::{oracle, CoupledModeProblem, DensityMatrix, Propagator, SolvableScenario};

use crate::input::{self, Scenario};
use crate::table::{self, Cell};
use crate::{GuidedWaveArgs, OpenEvolveArgs, PropagatorArgs, RabiCurveArgs};

fn rabi_rows(s: &SolvableScenario, times: &[f64], with_nu: bool) -> Result<Vec<Vec<Cell>>> {
    let cf = ClosedForm::new(s)?;
    let omega0 = s.omega_abs.constant_value().unwrap_or(0.0);
    let regime = cf.solution().regime().as_str();
    times
        .par_iter()
        .map(|&t| {
            let chi = cf.chi(t)?;
            let mut row: Vec<Cell> = Vec::with_capacity(5);
            if with_nu {
                row.push(s.nu.into());
            }
            row.extend([
                (omega0 * t).into(),
                chi.into(),
                cf.solution().transition_probability(chi).into(),
                regime.into(),
            ]);
            Ok(row)
        })
        .collect()
}

pub fn rabi_curve(args: &RabiCurveArgs) -> Result<()> {
    let times = input::sample_grid(args.t_max, args.samples, "t-max")?;
    let scenario = match input::load_scenario(&args.scenario, args.t_max)? {
        Scenario::Solvable(s) => s,
        Scenario::General(_) => bail!("rabi-curve needs a solvable scenario with a `nu` field"),
    };
    if let Some(field) = scenario.first_time_dependent_field() {
        bail!("rabi-curve needs constant coefficients, but `{field}` is time dependent");
    }
    if args.nu_sweep.is_empty() {
        let rows = rabi_rows(&scenario, &times, false)?;
        return table::write(
            args.output.out.as_deref(),
            &["tau", "chi", "P", "regime"],
            &rows,
        );
    }
    let blocks: Vec<Vec<Vec<Cell>>> = args
        .nu_sweep
        .par_iter()
        .map(|&nu| {
            let s = SolvableScenario::new(
                nu,
                scenario.omega_abs.clone(),
                scenario.phase_rate.clone(),
                scenario.phi0,
            )?;
            rabi_rows(&s, &times, true)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<Cell>> = blocks.into_iter().flatten().collect();
    table::write(
        args.output.out.as_deref(),
        &["nu", "tau", "chi", "P", "regime"],
        &rows,
    )
}

pub fn propagator(args: &PropagatorArgs) -> Result<()> {
    let times = input::sample_grid(args.t_max, args.samples, "t-max")?;
    let scenario = input::load_scenario(&args.scenario, args.t_max)?;
    let props: Vec<Propagator> = match &scenario {
        Scenario::Solvable(s) => {
            let cf = ClosedForm::new(s)?;
            times
                .par_iter()
                .map(|&t| cf.propagator(t))
                .collect::<su11::Result<_>>()?
        }
        Scenario::General(h) => {
            let cfg = input::integrator(h, args.t_max, &args.integrator)?;
            oracle::integrate_u_at(h, &times, &cfg)?
                .iter()
                .map(oracle::as_propagator)
                .collect()
        }
    };
    let rows: Vec<Vec<Cell>> = times
        .iter()
        .zip(&props)
        .map(|(&t, p)| {
            vec![
                t.into(),
                p.a.re.into(),
                p.a.im.into(),
                p.b.re.into(),
                p.b.im.into(),
                p.transition_probability().into(),
            ]
        })
        .collect();
    table::write(
        args.output.out.as_deref(),
        &["t", "re_a", "im_a", "re_b", "im_b", "P"],
        &rows,
    )
}

pub fn guided_wave(args: &GuidedWaveArgs) -> Result<()> {
    let zs = input::sample_grid(args.z_max, args.samples, "z-max")?;
    let problem: CoupledModeProblem = input::load(&args.problem, "problem")?;
    problem
        .validate(args.z_max)
        .with_context(|| format!("invalid problem in {}", args.problem.display()))?;
    let h = su11::guided_wave::to_su11(&problem);
    let cfg = input::integrator(&h, args.z_max, &args.integrator)?;
    let solver = ModeSolver::with_config(&problem, args.z_max, Some(cfg))?;
    match solver.nu() {
        Some(nu) => eprintln!("solvable profile, nu = {nu}; using the closed form"),
        None => eprintln!("no solvability match; integrating numerically"),
    }
    let flux0 = problem.a0.norm_sqr() - problem.b0.norm_sqr();
    let rows: Vec<Vec<Cell>> = solver
        .modes_at(&zs)?
        .iter()
        .map(|m| {
            vec![
                m.z.into(),
                m.a.re.into(),
                m.a.im.into(),
                m.b.re.into(),
                m.b.im.into(),
                (m.flux() - flux0).into(),
            ]
        })
        .collect();
    table::write(
        args.output.out.as_deref(),
        &["z", "re_A", "im_A", "re_B", "im_B", "flux_error"],
        &rows,
    )
}

pub fn open_evolve(args: &OpenEvolveArgs) -> Result<()> {
    let times = input::sample_grid(args.t_max, args.samples, "t-max")?;
    let scenario = input::load_scenario(&args.scenario, args.t_max)?;
    let rho0: DensityMatrix = input::load(&args.rho0, "rho0")?;
    let rhos = match &scenario {
        Scenario::Solvable(s) => times
            .par_chunks(64)
            .map(|chunk| evolve_density_at(Dynamics::Solvable(s), &rho0, chunk))
            .collect::<su11::Result<Vec<_>>>()?
            .concat(),
        Scenario::General(_) => {
            let h = scenario.hamiltonian()?;
            let cfg = input::integrator(&h, args.t_max, &args.integrator)?;
            evolve_density_at(Dynamics::General(&h, &cfg), &rho0, &times)?
        }
    };
    let rows: Vec<Vec<Cell>> = times
        .iter()
        .zip(&rhos)
        .map(|(&t, rho)| {
            let m = rho.matrix();
            vec![
                t.into(),
                m[(0, 0)].re.into(),
                m[(0, 1)].re.into(),
                m[(0, 1)].im.into(),
                m[(1, 1)].re.into(),
                rho.purity().into(),
                rho.min_eigenvalue().into(),
            ]
        })
        .collect();
    table::write(
        args.output.out.as_deref(),
        &[
            "t",
            "rho11",
            "re_rho12",
            "im_rho12",
            "rho22",
            "purity",
            "min_eigenvalue",
        ],
        &rows,
    )
}
