use serde_json::json;

use spincharge::experiments::{
    crosstalk_crossing, crosstalk_scan, eta_scaling, fit_scaling, landscape, nonideal, slope_fit,
    tc_reference, ScalingFit,
};
use spincharge::observables::{charge, default_grid};
use spincharge::{Execution, TimeGrid};

use crate::config::{
    CrosstalkConfig, LandscapeConfig, NonidealConfig, ScalingConfig, Scenario, SimulateConfig, TcConfig,
};
use crate::error::CliError;
use crate::output::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Tier {
    /// Battery sizes up to 100.
    Ci,
    /// Adds the 1000-cell point.
    Full,
}

pub fn scaling_cells(tier: Tier) -> Vec<u32> {
    match tier {
        Tier::Ci => vec![25, 50, 75, 99, 100],
        Tier::Full => vec![25, 50, 75, 99, 100, 250, 500, 750, 999, 1000],
    }
}

pub fn simulate(mut cfg: SimulateConfig, exec: Execution) -> Result<Report, CliError> {
    cfg.scenario = Some(Scenario::Simulate);
    cfg.model.validate()?;
    let g = cfg.model.g;
    let n = cfg.model.chargers as usize;
    let gt_max = cfg.gt_max.unwrap_or(default_grid(g, n)?.t_max() * g);
    cfg.gt_max = Some(gt_max);
    let grid = TimeGrid::new(gt_max / g, cfg.points)?;
    let run = charge(&cfg.model, Some(&grid), &cfg.policy, exec)?;

    let mut report = Report::new(
        &cfg,
        vec!["t", "gt", "E_over_omega0", "P_over_gomega0", "P_over_sqrtN_gomega0"],
    )?;
    for (k, t) in grid.times().enumerate() {
        let (e, p) = (run.trace.energy[k], run.trace.power[k]);
        report.push(vec![
            t.into(),
            (g * t).into(),
            run.scales.energy(e).into(),
            run.scales.power(p).into(),
            run.scales.collective_power(p).into(),
        ]);
    }
    let s = run.summary;
    report.summary = json!({
        "E_max_over_omega0": run.e_max(),
        "gt_E": g * s.t_e,
        "P_max_over_gomega0": run.p_max(),
        "P_max_over_sqrtN_gomega0": run.p_max_collective(),
        "gt_P": g * s.t_p,
        "degenerate": s.degenerate,
        "horizon_warning": s.horizon_warning,
    });
    Ok(report)
}

pub fn landscape_cmd(mut cfg: LandscapeConfig, exec: Execution) -> Result<Report, CliError> {
    cfg.scenario = Some(Scenario::Landscape);
    let pts = landscape(&cfg.cells, &cfg.ratios, &cfg.gammas, &cfg.model, &cfg.settings, exec)?;
    let mut report = Report::new(
        &cfg,
        vec![
            "M",
            "N",
            "gamma",
            "E_max_over_omega0",
            "P_max_over_gomega0",
            "P_max_over_sqrtN_gomega0",
            "gt_E",
            "gt_P",
            "horizon_warning",
        ],
    )?;
    for p in &pts {
        report.push(vec![
            p.cells.into(),
            p.chargers.into(),
            p.gamma.into(),
            p.e_max.into(),
            p.p_max.into(),
            p.p_max_collective.into(),
            (cfg.model.g * p.t_e).into(),
            (cfg.model.g * p.t_p).into(),
            p.horizon_warning.into(),
        ]);
    }
    // slope fits need at least three points per ratio
    let slopes = match slope_fit(&pts, cfg.regression) {
        Ok(fits) => serde_json::to_value(fits)?,
        Err(e) => json!(e.to_string()),
    };
    report.summary = json!({ "slopes": slopes });
    Ok(report)
}

fn fit_json(fit: &ScalingFit) -> serde_json::Value {
    json!({
        "beta_global": fit.beta_global,
        "beta_local": fit.beta_local,
        "residual": fit.residual,
    })
}

pub fn scaling(mut cfg: ScalingConfig, tier: Tier, exec: Execution) -> Result<Report, CliError> {
    cfg.scenario = Some(Scenario::Scaling);
    let cells = cfg.cells.clone().unwrap_or_else(|| scaling_cells(tier));
    cfg.cells = Some(cells.clone());
    let spin = eta_scaling(&cells, cfg.gamma, cfg.ratio, &cfg.model, &cfg.settings, exec)?;
    let mut report = Report::new(&cfg, vec!["model", "M", "eta"])?;
    for (m, eta) in spin.cells.iter().zip(&spin.eta) {
        report.push(vec!["spin".into(), (*m).into(), (*eta).into()]);
    }
    let mut summary = json!({ "spin": fit_json(&spin) });
    if cfg.cavity {
        let tc = tc_reference(&cells, cfg.gamma, &cfg.model, &cfg.settings, exec)?;
        let ms: Vec<u32> = tc.iter().map(|p| p.cells).collect();
        let eta: Vec<f64> = tc.iter().map(|p| p.eta).collect();
        let fit = fit_scaling(&ms, &eta)?;
        for (m, eta) in fit.cells.iter().zip(&fit.eta) {
            report.push(vec!["cavity".into(), (*m).into(), (*eta).into()]);
        }
        summary["cavity"] = fit_json(&fit);
    }
    report.summary = summary;
    Ok(report)
}

pub fn crosstalk(mut cfg: CrosstalkConfig, exec: Execution) -> Result<Report, CliError> {
    cfg.scenario = Some(Scenario::Crosstalk);
    let pts = crosstalk_scan(&cfg.model, &cfg.g1_over_g, &cfg.settings, exec)?;
    let mut report = Report::new(
        &cfg,
        vec!["g1_over_g", "E_max_over_omega0", "P_max_over_gomega0", "horizon_warning"],
    )?;
    for p in &pts {
        report.push(vec![p.g1_over_g.into(), p.e_max.into(), p.p_max.into(), p.horizon_warning.into()]);
    }
    let level = cfg.level * cfg.model.cells as f64;
    report.summary = json!({
        "level_over_omega0": level,
        "crossing_g1_over_g": crosstalk_crossing(&pts, level),
    });
    Ok(report)
}

pub fn nonideal_cmd(mut cfg: NonidealConfig) -> Result<Report, CliError> {
    cfg.scenario = Some(Scenario::Nonideal);
    let r = nonideal(&cfg.model, &cfg.charger_weights, &cfg.battery_weights, &cfg.settings)?;
    let (e_unit, p_unit) = (cfg.model.omega0, cfg.model.g * cfg.model.omega0);
    let mut report = Report::new(
        &cfg,
        vec!["state", "E_max_over_omega0", "P_max_over_gomega0", "E_fraction", "P_fraction"],
    )?;
    for (name, s) in [("ideal", r.ideal), ("charger_mixture", r.charger), ("battery_mixture", r.battery)] {
        report.push(vec![
            name.into(),
            (s.e_max / e_unit).into(),
            (s.p_max / p_unit).into(),
            (s.e_max / r.ideal.e_max).into(),
            (s.p_max / r.ideal.p_max).into(),
        ]);
    }
    Ok(report)
}

pub fn tc_benchmark(mut cfg: TcConfig, exec: Execution) -> Result<Report, CliError> {
    cfg.scenario = Some(Scenario::TcBenchmark);
    let pts = tc_reference(&cfg.cells, cfg.gamma, &cfg.model, &cfg.settings, exec)?;
    let mut report = Report::new(
        &cfg,
        vec![
            "M",
            "n_init",
            "gamma",
            "cutoff",
            "E_max_over_omega0",
            "P_max_over_gomega0",
            "P_max_over_sqrtN_gomega0",
            "eta",
        ],
    )?;
    for p in &pts {
        report.push(vec![
            p.cells.into(),
            p.n_init.into(),
            p.gamma.into(),
            p.cutoff.into(),
            p.e_max.into(),
            p.p_max.into(),
            p.p_max_collective.into(),
            p.eta.into(),
        ]);
    }
    if pts.len() >= 3 {
        let ms: Vec<u32> = pts.iter().map(|p| p.cells).collect();
        let eta: Vec<f64> = pts.iter().map(|p| p.eta).collect();
        report.summary = json!({ "fit": fit_json(&fit_scaling(&ms, &eta)?) });
    }
    Ok(report)
}
