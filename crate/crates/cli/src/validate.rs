//! Oracle equivalence checks runnable from a clean checkout.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spincharge::fullspace::{build_full_hamiltonian, thermal_mixture_symmetric, HybridBasis};
use spincharge::hamiltonians::{build_spin_charger, ideal_initial_state};
use spincharge::observables::{charge, Charging};
use spincharge::oracles::{appendix_emax, single_cell_pmax, thermal_energy, AppendixSolution};
use spincharge::propagation::{KrylovPropagator, SpectralPropagator};
use spincharge::experiments::{parallel_baseline, SweepSettings};
use spincharge::{EnginePolicy, Execution, Frame, ModelParams, Propagator, TimeGrid};

use crate::config::{Scenario, ValidateConfig};
use crate::error::CliError;
use crate::output::Report;

struct Check {
    name: String,
    error: f64,
    tol: f64,
}

fn capacity(n: u32) -> Result<Check, CliError> {
    let rep = charge(&ModelParams::new(2, n), None, &EnginePolicy::default(), Execution::Sequential)?;
    let exact = appendix_emax(n)?;
    Ok(Check { name: format!("two-cell capacity N={n}"), error: (rep.e_max() - exact).abs() / exact, tol: 1e-6 })
}

fn amplitudes(n: u32, samples: usize, rng: &mut ChaCha8Rng) -> Result<Check, CliError> {
    let params = ModelParams::new(2, n).with_frame(Frame::Rotating);
    let basis = params.basis();
    let engine = SpectralPropagator::new(&build_spin_charger(&params, &basis)?)?;
    let psi0 = ideal_initial_state(&basis)?;
    let oracle = AppendixSolution::new(n)?;
    let nn = n as usize;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let t = rng.random_range(0.0..200.0);
        let a = engine.propagate(&psi0, t)?.into_amplitudes();
        let sym = a[basis.index(1, nn - 1)?] / 2f64.sqrt();
        let got = [a[basis.index(2, nn - 2)?], sym, sym, a[basis.index(0, nn)?]];
        for (x, y) in got.iter().zip(oracle.amplitudes(params.g * t)) {
            worst = worst.max((x - y).norm());
        }
    }
    Ok(Check { name: format!("two-cell amplitudes N={n}"), error: worst, tol: 1e-8 })
}

fn single_cell() -> Result<Check, CliError> {
    let (p, _) = single_cell_pmax();
    let mut worst = 0.0f64;
    for gamma in [0.0, 0.5, 1.0] {
        let s = parallel_baseline(1.0, 0.1, gamma, &SweepSettings::default())?;
        worst = worst.max((s.p_max / 0.1 - p).abs()).max((s.e_max - 1.0).abs());
    }
    Ok(Check { name: "single-cell optimum".into(), error: worst, tol: 1e-8 })
}

fn thermal(rng: &mut ChaCha8Rng) -> Result<Check, CliError> {
    let params = ModelParams::new(2, 2);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (p0, t) = (rng.random_range(0.0..=1.0), rng.random_range(0.01..100.0));
        let (basis, mixed) = thermal_mixture_symmetric(p0)?;
        let h = build_spin_charger(&params, &basis)?;
        let mut c = Charging::mixed(&h, &mixed, &basis.battery_excitations(), 1.0, &EnginePolicy::default())?;
        let e = c.run(&TimeGrid::new(t, 2)?, Execution::Sequential)?.energy[1];
        worst = worst.max((e - thermal_energy(p0, params.g * t)?).abs());
    }
    Ok(Check { name: "thermal mixture closed form".into(), error: worst, tol: 1e-10 })
}

fn full_space(m: u32, n: u32) -> Result<Check, CliError> {
    let params = ModelParams::new(m, n).with_gamma(0.6);
    let grid = TimeGrid::new(60.0, 61)?;
    let basis = params.basis();
    let full = HybridBasis::full(m, n)?;
    let policy = EnginePolicy::default();
    let mut c = Charging::pure(
        &build_spin_charger(&params, &basis)?,
        &ideal_initial_state(&basis)?,
        &basis.battery_excitations(),
        1.0,
        &policy,
    )?;
    let mut f = Charging::pure(
        &build_full_hamiltonian(&params, &full)?,
        &full.ideal_state()?,
        &full.battery_excitations(),
        1.0,
        &policy,
    )?;
    let a = c.run(&grid, Execution::Sequential)?.energy;
    let b = f.run(&grid, Execution::Sequential)?.energy;
    let worst = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok(Check { name: format!("full space vs collective M={m} N={n}"), error: worst, tol: 1e-9 })
}

fn engines(rng: &mut ChaCha8Rng) -> Result<Check, CliError> {
    let params = ModelParams::new(8, 8).with_gamma(0.6);
    let h = build_spin_charger(&params, &params.basis())?;
    let psi = spincharge::StateVector::normalized(
        (0..h.dim())
            .map(|_| num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect(),
    )?;
    let a = SpectralPropagator::new(&h)?.propagate(&psi, 25.0)?;
    let b = KrylovPropagator::new(h, Default::default())?.propagate(&psi, 25.0)?;
    Ok(Check { name: "Krylov vs spectral M=N=8".into(), error: a.distance(&b), tol: 1e-7 })
}

/// Run every check; the report lists each with its status. Returns the
/// report and the number of failures.
pub fn run(mut cfg: ValidateConfig) -> Result<(Report, usize), CliError> {
    cfg.scenario = Some(Scenario::Validate);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();
    for n in [2, 3, 4, 10, 20, 200] {
        checks.push(capacity(n)?);
    }
    for n in [2, 5, 10] {
        checks.push(amplitudes(n, cfg.samples, &mut rng)?);
    }
    checks.push(single_cell()?);
    checks.push(thermal(&mut rng)?);
    for (m, n) in [(2, 2), (2, 3), (3, 3)] {
        checks.push(full_space(m, n)?);
    }
    checks.push(engines(&mut rng)?);

    let mut report = Report::new(&cfg, vec!["check", "status", "error", "tolerance"])?;
    let mut failed = 0;
    for c in &checks {
        let ok = c.error <= c.tol;
        failed += usize::from(!ok);
        report.push(vec![
            c.name.as_str().into(),
            (if ok { "pass" } else { "fail" }).into(),
            c.error.into(),
            c.tol.into(),
        ]);
    }
    report.summary = serde_json::json!({ "checks": checks.len(), "failed": failed });
    Ok((report, failed))
}
