//! Parameter sweeps and the derived statistics: capacity/power landscapes,
//! collective-vs-parallel ratio and its exponent, capacity-power slope fits,
//! cavity reference, charger crosstalk and imperfect initial states.
//!
//! Every sweep runs its independent points through [`map_ordered`], so the
//! output order is the input order whatever the execution mode.

use serde::{Deserialize, Serialize};

use crate::dicke::ProductBasis;
use crate::error::{Error, Result};
use crate::exec::{map_ordered, Execution};
use crate::fullspace::{build_full_hamiltonian, nonideal_battery_mixture, nonideal_charger_mixture};
use crate::hamiltonians::{
    build_single_cell, build_spin_charger, build_tc, ideal_initial_state, ModelParams, TcParams,
};
use crate::observables::{Charging, ChargingSummary, Scales, DEFAULT_POINTS};
use crate::propagation::{EnginePolicy, MixedState, TimeGrid};
use crate::state::StateVector;

/// Anisotropies pooled by default in [`slope_fit`].
pub const SLOPE_GAMMAS: [f64; 3] = [0.0, 0.2, 0.6];

/// Doublings of the cavity cutoff attempted before giving up.
const MAX_CUTOFF_DOUBLINGS: u32 = 6;

/// Relative change in capacity accepted as cutoff convergence.
const CUTOFF_TOLERANCE: f64 = 1e-6;

/// Numerical settings shared by every sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSettings {
    pub policy: EnginePolicy,
    pub points: usize,
    /// Horizon in units of `π/(g√N)`.
    pub horizon: f64,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self { policy: EnginePolicy::default(), points: DEFAULT_POINTS, horizon: 8.0 }
    }
}

impl SweepSettings {
    pub fn grid(&self, g: f64, n: usize) -> Result<TimeGrid> {
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::invalid("horizon", format!("{} must be positive", self.horizon)));
        }
        TimeGrid::new(self.horizon * std::f64::consts::PI / (g * (n as f64).sqrt()), self.points)
    }
}

/// Capacity and optimal power of one `(M, N, γ, g₁)` point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandscapePoint {
    pub cells: u32,
    pub chargers: u32,
    pub gamma: f64,
    pub g1: f64,
    /// `E_max/ω₀`.
    pub e_max: f64,
    /// `P_max/(gω₀)`.
    pub p_max: f64,
    /// `P_max/(√N gω₀)`.
    pub p_max_collective: f64,
    pub t_e: f64,
    pub t_p: f64,
    pub horizon_warning: bool,
}

impl LandscapePoint {
    pub fn ratio(&self) -> f64 {
        self.chargers as f64 / self.cells as f64
    }
}

fn point_from(params: &ModelParams, summary: &ChargingSummary) -> LandscapePoint {
    let scales = Scales { omega0: params.omega0, g: params.g, n: params.chargers as usize };
    LandscapePoint {
        cells: params.cells,
        chargers: params.chargers,
        gamma: params.gamma,
        g1: params.g1,
        e_max: scales.energy(summary.e_max),
        p_max: scales.power(summary.p_max),
        p_max_collective: scales.collective_power(summary.p_max),
        t_e: summary.t_e,
        t_p: summary.t_p,
        horizon_warning: summary.horizon_warning,
    }
}

/// Ideal charging of one parameter point on the sweep grid.
pub fn charge_point(params: &ModelParams, settings: &SweepSettings) -> Result<LandscapePoint> {
    params.validate()?;
    let basis = params.basis();
    let h = build_spin_charger(params, &basis)?;
    let psi0 = ideal_initial_state(&basis)?;
    let grid = settings.grid(params.g, params.chargers as usize)?;
    let mut charging =
        Charging::pure(&h, &psi0, &basis.battery_excitations(), params.omega0, &settings.policy)?;
    let (_, summary) = charging.charge(&grid, Execution::Sequential)?;
    Ok(point_from(params, &summary))
}

/// `N = ratio · M`, rejecting non-integral products.
pub fn chargers_for(cells: u32, ratio: f64) -> Result<u32> {
    let n = ratio * cells as f64;
    if !(n.is_finite() && n >= 1.0) || (n - n.round()).abs() > 1e-9 {
        return Err(Error::invalid("ratio", format!("N = {ratio} x {cells} is not a positive integer")));
    }
    Ok(n.round() as u32)
}

/// One point per `(M, ratio, γ)`, in that nesting order.
pub fn landscape(
    cells: &[u32],
    ratios: &[f64],
    gammas: &[f64],
    base: &ModelParams,
    settings: &SweepSettings,
    exec: Execution,
) -> Result<Vec<LandscapePoint>> {
    let mut jobs = Vec::new();
    for &m in cells {
        for &r in ratios {
            let n = chargers_for(m, r)?;
            for &gamma in gammas {
                let p = ModelParams { cells: m, chargers: n, gamma, ..*base };
                p.validate()?;
                jobs.push(p);
            }
        }
    }
    map_ordered(exec, &jobs, |p| charge_point(p, settings)).into_iter().collect()
}

/// One cell charged by one spin, the unit of the parallel scheme.
pub fn parallel_baseline(omega0: f64, g: f64, gamma: f64, settings: &SweepSettings) -> Result<ChargingSummary> {
    let params = ModelParams::new(1, 1).with_omega0(omega0).with_coupling(g).with_gamma(gamma);
    params.validate()?;
    let h = build_single_cell(omega0, g, gamma);
    let psi0 = StateVector::basis(4, 2)?;
    let mut charging = Charging::pure(&h, &psi0, &[1.0, 1.0, 0.0, 0.0], omega0, &settings.policy)?;
    Ok(charging.charge(&settings.grid(g, 1)?, Execution::Sequential)?.1)
}

/// Power-law fit `η ∝ M^β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub cells: Vec<u32>,
    pub eta: Vec<f64>,
    /// Log-log least-squares slope over `M ∈ [M_max/4, M_max]`.
    pub beta_global: f64,
    /// `ln(η_a/η_b)/ln(a/b)` for the two largest `M`.
    pub beta_local: f64,
    /// RMS residual of the global fit in `ln η`.
    pub residual: f64,
}

/// Ordinary least squares `y = a + b x`; returns `(b, a, rms residual)`.
pub fn least_squares(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::DegenerateFit(format!("{} abscissae for {} ordinates", x.len(), y.len())));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx <= 1e-300 * n || !sxx.is_finite() {
        return Err(Error::DegenerateFit("abscissa has zero variance".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum::<f64>() / n).sqrt();
    Ok((slope, intercept, rms))
}

/// Fit `η(M)` given at strictly increasing or arbitrary `M` values.
pub fn fit_scaling(cells: &[u32], eta: &[f64]) -> Result<ScalingFit> {
    if cells.len() != eta.len() {
        return Err(Error::DimensionMismatch { expected: cells.len(), found: eta.len() });
    }
    if cells.len() < 3 {
        return Err(Error::DegenerateFit(format!("{} battery sizes, at least 3 needed", cells.len())));
    }
    let mut pairs: Vec<(u32, f64)> = cells.iter().copied().zip(eta.iter().copied()).collect();
    pairs.sort_by_key(|p| p.0);
    if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::DegenerateFit("repeated battery size".into()));
    }
    if pairs.iter().any(|p| p.1.is_nan() || p.1 <= 0.0) {
        return Err(Error::DegenerateFit("non-positive ratio".into()));
    }
    let m_max = pairs.last().expect("non-empty").0 as f64;
    let window: Vec<&(u32, f64)> = pairs.iter().filter(|p| 4.0 * p.0 as f64 >= m_max).collect();
    let lx: Vec<f64> = window.iter().map(|p| (p.0 as f64).ln()).collect();
    let ly: Vec<f64> = window.iter().map(|p| p.1.ln()).collect();
    let (beta_global, _, residual) = least_squares(&lx, &ly)?;
    let (a, b) = (pairs[pairs.len() - 1], pairs[pairs.len() - 2]);
    let beta_local = (a.1 / b.1).ln() / (a.0 as f64 / b.0 as f64).ln();
    Ok(ScalingFit {
        cells: pairs.iter().map(|p| p.0).collect(),
        eta: pairs.iter().map(|p| p.1).collect(),
        beta_global,
        beta_local,
        residual,
    })
}

/// `η(M) = P_max(M)/(M p_max)` at `N = ratio · M`, with `p_max` from the
/// one-cell, one-spin parallel unit.
pub fn eta_scaling(
    cells: &[u32],
    gamma: f64,
    ratio: f64,
    base: &ModelParams,
    settings: &SweepSettings,
    exec: Execution,
) -> Result<ScalingFit> {
    let unit = parallel_baseline(base.omega0, base.g, gamma, settings)?.p_max;
    let points = landscape(cells, &[ratio], &[gamma], base, settings, exec)?;
    let eta: Vec<f64> = points
        .iter()
        .map(|p| p.p_max * base.g * base.omega0 / (p.cells as f64 * unit))
        .collect();
    fit_scaling(cells, &eta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regression {
    /// `P_max/(√N gω₀)` regressed on `E_max/ω₀`.
    #[default]
    PowerOnEnergy,
    /// `E_max/ω₀` regressed on `P_max/(√N gω₀)`.
    EnergyOnPower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub ratio: f64,
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Least-squares slope of each `N/M` group, groups in order of first
/// appearance.
pub fn slope_fit(points: &[LandscapePoint], regression: Regression) -> Result<Vec<SlopeFit>> {
    let mut groups: Vec<(f64, Vec<&LandscapePoint>)> = Vec::new();
    for p in points {
        match groups.iter_mut().find(|(r, _)| (r - p.ratio()).abs() < 1e-12) {
            Some((_, g)) => g.push(p),
            None => groups.push((p.ratio(), vec![p])),
        }
    }
    groups
        .into_iter()
        .map(|(ratio, group)| {
            if group.len() < 3 {
                return Err(Error::DegenerateFit(format!("{} points at N/M = {ratio}", group.len())));
            }
            let e: Vec<f64> = group.iter().map(|p| p.e_max).collect();
            let pw: Vec<f64> = group.iter().map(|p| p.p_max_collective).collect();
            let (slope, intercept, _) = match regression {
                Regression::PowerOnEnergy => least_squares(&e, &pw)?,
                Regression::EnergyOnPower => least_squares(&pw, &e)?,
            };
            Ok(SlopeFit { ratio, slope, intercept, points: group.len() })
        })
        .collect()
}

/// Cavity benchmark at one battery size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TcPoint {
    pub cells: u32,
    pub n_init: usize,
    pub gamma: f64,
    pub cutoff: usize,
    pub e_max: f64,
    /// `P_max/(g̃ω₀)`.
    pub p_max: f64,
    /// `P_max/(√n_init g̃ω₀)`.
    pub p_max_collective: f64,
    /// `P_max/(M p_JC)` with one Jaynes-Cummings cell holding one photon.
    pub eta: f64,
    pub horizon_warning: bool,
}

fn tc_summary(params: &TcParams, settings: &SweepSettings) -> Result<ChargingSummary> {
    let h = build_tc(params)?;
    let basis = params.basis();
    let grid = settings.grid(params.g_tilde, params.n_init.max(1))?;
    let mut charging = Charging::pure(
        &h,
        &params.initial_state()?,
        &basis.battery_excitations(),
        params.omega0,
        &settings.policy,
    )?;
    Ok(charging.charge(&grid, Execution::Sequential)?.1)
}

/// Capacity at a converged cutoff. Exact at `cutoff = n_init` when excitations
/// are conserved; otherwise doubled until the capacity settles.
pub fn tc_converged(params: &TcParams, settings: &SweepSettings) -> Result<(TcParams, ChargingSummary)> {
    let mut p = TcParams { cutoff: params.cutoff.max(params.minimum_cutoff()), ..*params };
    p.validate()?;
    let mut summary = tc_summary(&p, settings)?;
    if p.gamma == 0.0 {
        return Ok((p, summary));
    }
    let mut change = f64::INFINITY;
    for _ in 0..MAX_CUTOFF_DOUBLINGS {
        let next = TcParams { cutoff: 2 * p.cutoff, ..p };
        let s = tc_summary(&next, settings)?;
        change = (s.e_max - summary.e_max).abs() / s.e_max.abs().max(f64::MIN_POSITIVE);
        p = next;
        summary = s;
        if change < CUTOFF_TOLERANCE {
            return Ok((p, summary));
        }
    }
    Err(Error::CutoffNonConvergence { cutoff: p.cutoff, change })
}

/// Tavis-Cummings (γ = 0) or Dicke-like (γ > 0) cavity charger with
/// `n_init = M` photons and bare coupling `g̃ = g`.
pub fn tc_reference(
    cells: &[u32],
    gamma: f64,
    base: &ModelParams,
    settings: &SweepSettings,
    exec: Execution,
) -> Result<Vec<TcPoint>> {
    let unit = parallel_baseline(base.omega0, base.g, 0.0, settings)?.p_max;
    let jobs: Vec<TcParams> = cells
        .iter()
        .map(|&m| TcParams {
            omega0: base.omega0,
            g_tilde: base.g,
            ..TcParams::new(m, m as usize)
        }
        .with_gamma(gamma))
        .collect();
    map_ordered(exec, &jobs, |p| -> Result<TcPoint> {
        let (p, s) = tc_converged(p, settings)?;
        let scales = Scales { omega0: p.omega0, g: p.g_tilde, n: p.n_init };
        Ok(TcPoint {
            cells: p.cells,
            n_init: p.n_init,
            gamma: p.gamma,
            cutoff: p.cutoff,
            e_max: scales.energy(s.e_max),
            p_max: scales.power(s.p_max),
            p_max_collective: scales.collective_power(s.p_max),
            eta: s.p_max / (p.cells as f64 * unit),
            horizon_warning: s.horizon_warning,
        })
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkPoint {
    pub g1_over_g: f64,
    pub e_max: f64,
    pub p_max: f64,
    pub horizon_warning: bool,
}

/// Capacity and power as the charger crosstalk `g₁ = ratio · g` is raised.
pub fn crosstalk_scan(
    base: &ModelParams,
    ratios: &[f64],
    settings: &SweepSettings,
    exec: Execution,
) -> Result<Vec<CrosstalkPoint>> {
    let jobs: Vec<ModelParams> = ratios.iter().map(|&r| base.with_crosstalk(r * base.g)).collect();
    map_ordered(exec, &jobs, |p| -> Result<CrosstalkPoint> {
        let pt = charge_point(p, settings)?;
        Ok(CrosstalkPoint {
            g1_over_g: p.g1 / p.g,
            e_max: pt.e_max,
            p_max: pt.p_max,
            horizon_warning: pt.horizon_warning,
        })
    })
    .into_iter()
    .collect()
}

/// First `g₁/g` at which `E_max/ω₀` falls to `level`, linearly interpolated
/// between scan points.
pub fn crosstalk_crossing(points: &[CrosstalkPoint], level: f64) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        (a.e_max > level && b.e_max <= level).then(|| {
            a.g1_over_g + (a.e_max - level) / (a.e_max - b.e_max) * (b.g1_over_g - a.g1_over_g)
        })
    })
}

/// Ideal and imperfect-start charging at one `(M, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonidealReport {
    pub ideal: ChargingSummary,
    pub charger: ChargingSummary,
    pub battery: ChargingSummary,
}

impl NonidealReport {
    pub fn charger_fractions(&self) -> (f64, f64) {
        (self.charger.e_max / self.ideal.e_max, self.charger.p_max / self.ideal.p_max)
    }

    pub fn battery_fractions(&self) -> (f64, f64) {
        (self.battery.e_max / self.ideal.e_max, self.battery.p_max / self.ideal.p_max)
    }
}

/// `p_charger` has `N + 1` weights, `p_battery` has `M + 1`.
pub fn nonideal(
    params: &ModelParams,
    p_charger: &[f64],
    p_battery: &[f64],
    settings: &SweepSettings,
) -> Result<NonidealReport> {
    params.validate()?;
    let grid = settings.grid(params.g, params.chargers as usize)?;
    let basis: ProductBasis = params.basis();
    let h = build_spin_charger(params, &basis)?;
    let number = basis.battery_excitations();
    let run = |h, mixed: &MixedState, number: &[f64]| -> Result<ChargingSummary> {
        let mut c = Charging::mixed(h, mixed, number, params.omega0, &settings.policy)?;
        Ok(c.charge(&grid, Execution::Sequential)?.1)
    };
    let ideal = run(&h, &MixedState::pure(ideal_initial_state(&basis)?), &number)?;
    let charger = run(&h, &nonideal_charger_mixture(&basis, p_charger)?, &number)?;
    let (hybrid, mixed) = nonideal_battery_mixture(params.cells, params.chargers, p_battery)?;
    let hf = build_full_hamiltonian(params, &hybrid)?;
    let battery = run(&hf, &mixed, &hybrid.battery_excitations())?;
    Ok(NonidealReport { ideal, charger, battery })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn quick() -> SweepSettings {
        SweepSettings { points: 800, ..SweepSettings::default() }
    }

    #[test]
    fn ratio_must_give_integer_chargers() {
        assert_eq!(chargers_for(4, 2.5).unwrap(), 10);
        assert!(chargers_for(3, 2.5).is_err());
        assert!(chargers_for(3, 0.0).is_err());
    }

    #[test]
    fn one_cell_point_is_parallel_unit() {
        for gamma in [0.0, 0.5, 1.0] {
            let pts = landscape(&[1], &[1.0], &[gamma], &ModelParams::default(), &quick(), Execution::Sequential)
                .unwrap();
            assert_relative_eq!(pts[0].e_max, 1.0, epsilon = 1e-9);
            assert!((pts[0].p_max - 0.7246).abs() < 1e-4);
        }
    }

    #[test]
    fn least_squares_exact_line_and_degenerate() {
        let (b, a, r) = least_squares(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]).unwrap();
        assert_relative_eq!(b, 2.0, epsilon = 1e-14);
        assert_relative_eq!(a, 1.0, epsilon = 1e-14);
        assert!(r < 1e-14);
        assert!(least_squares(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn duplicated_pair_gives_difference_quotient() {
        let mk = |e, p| LandscapePoint {
            cells: 2,
            chargers: 2,
            gamma: 0.0,
            g1: 0.0,
            e_max: e,
            p_max: p,
            p_max_collective: p,
            t_e: 1.0,
            t_p: 1.0,
            horizon_warning: false,
        };
        let pts: Vec<_> = (0..3).flat_map(|_| [mk(1.0, 2.0), mk(1.6, 2.3)]).collect();
        let fit = slope_fit(&pts, Regression::EnergyOnPower).unwrap();
        assert_relative_eq!(fit[0].slope, 0.6 / 0.3, epsilon = 1e-12);
        let fit = slope_fit(&pts, Regression::PowerOnEnergy).unwrap();
        assert_relative_eq!(fit[0].slope, 0.3 / 0.6, epsilon = 1e-12);
        assert!(slope_fit(&pts[..2], Regression::PowerOnEnergy).is_err());
    }

    #[test]
    fn scaling_fit_recovers_power_law() {
        let cells: Vec<u32> = (1..=40).collect();
        let eta: Vec<f64> = cells.iter().map(|&m| 1.3 * (m as f64).powf(0.7)).collect();
        let fit = fit_scaling(&cells, &eta).unwrap();
        assert_relative_eq!(fit.beta_global, 0.7, epsilon = 1e-12);
        assert_relative_eq!(fit.beta_local, 0.7, epsilon = 1e-12);
        assert!(fit_scaling(&cells[..2], &eta[..2]).is_err());
        assert!(fit_scaling(&[1, 2, 2], &[1.0, 2.0, 2.0]).is_err());
    }

    #[test]
    fn eta_is_one_for_single_cell() {
        let fit = eta_scaling(&[1, 2, 3], 0.0, 1.0, &ModelParams::default(), &quick(), Execution::Sequential)
            .unwrap();
        assert_relative_eq!(fit.eta[0], 1.0, epsilon = 1e-10);
        assert!(fit.eta[2] > fit.eta[1]);
    }

    #[test]
    fn tc_two_cells_two_photons() {
        let pts = tc_reference(&[2], 0.0, &ModelParams::default(), &quick(), Execution::Sequential).unwrap();
        assert_relative_eq!(pts[0].e_max, 16.0 / 9.0, epsilon = 1e-8);
        assert_eq!(pts[0].cutoff, 2);
    }

    #[test]
    fn tc_cutoff_grows_with_anisotropy() {
        let (p, s) = tc_converged(&TcParams::new(2, 2).with_gamma(0.5), &quick()).unwrap();
        assert!(p.cutoff >= 12);
        assert!(s.e_max > 0.0);
    }

    #[test]
    fn crossing_interpolates() {
        let mk = |r, e| CrosstalkPoint { g1_over_g: r, e_max: e, p_max: 0.0, horizon_warning: false };
        let pts = [mk(0.0, 1.0), mk(1.0, 0.5), mk(2.0, 0.1)];
        assert_relative_eq!(crosstalk_crossing(&pts, 0.3).unwrap(), 1.5, epsilon = 1e-12);
        assert!(crosstalk_crossing(&pts, 0.01).is_none());
    }

    #[test]
    fn all_down_chargers_store_nothing() {
        let params = ModelParams::new(2, 4);
        let r = nonideal(&params, &[0.0, 1.0, 0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &quick()).unwrap();
        assert!(r.charger.degenerate);
        assert_relative_eq!(r.battery.e_max, r.ideal.e_max, epsilon = 1e-10);
    }
}
