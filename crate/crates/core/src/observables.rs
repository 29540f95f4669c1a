//! Stored energy, average power, and their maxima.
//!
//! Stored energy is `E(t) = ω₀(⟨n_B⟩(t) − ⟨n_B⟩(0))` and average power is
//! `P(t) = E(t)/t` with `P(0) = 0`. [`summarize`] scans a trace for global
//! maxima and optionally refines each candidate by golden-section search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_ordered, Execution};
use crate::hamiltonians::{build_spin_charger, ideal_initial_state, ModelParams};
use crate::operator::HermitianOperator;
use crate::propagation::{
    Engine, EnginePolicy, MixedState, Propagator, ReachableSector, TimeGrid,
};
use crate::state::StateVector;

/// Grid points per horizon in [`default_grid`].
pub const DEFAULT_POINTS: usize = 4000;

/// Relative time resolution of the refinement.
pub const REFINE_TOLERANCE: f64 = 1e-6;

/// Two maxima closer than this (relative) count as equal for first attainment.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Spacing of stored Krylov checkpoints, in grid points.
const CHECKPOINT_STRIDE: usize = 32;

/// Horizon `8π/(g√n)` sampled at [`DEFAULT_POINTS`].
pub fn default_grid(g: f64, n: usize) -> Result<TimeGrid> {
    if g.is_nan() || g <= 0.0 || n == 0 {
        return Err(Error::invalid("grid", "default horizon needs g > 0 and n ≥ 1"));
    }
    TimeGrid::new(8.0 * std::f64::consts::PI / (g * (n as f64).sqrt()), DEFAULT_POINTS)
}

/// Expected battery excitation count `Σ_k |c_k|² n_B(k)`.
pub fn battery_excitation(state: &StateVector, battery_number: &[f64]) -> Result<f64> {
    if battery_number.len() != state.dim() {
        return Err(Error::DimensionMismatch { expected: state.dim(), found: battery_number.len() });
    }
    Ok(state.diagonal_expectation(battery_number))
}

/// Units used to report dimensionless energy and power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scales {
    pub omega0: f64,
    pub g: f64,
    /// Count `N` in the collective power unit `√N gω₀`.
    pub n: usize,
}

impl Scales {
    pub fn energy(&self, e: f64) -> f64 {
        e / self.omega0
    }

    pub fn power(&self, p: f64) -> f64 {
        p / (self.g * self.omega0)
    }

    pub fn collective_power(&self, p: f64) -> f64 {
        self.power(p) / (self.n as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChargingTrace {
    pub grid: TimeGrid,
    pub energy: Vec<f64>,
    pub power: Vec<f64>,
}

impl ChargingTrace {
    pub fn from_energy(grid: TimeGrid, energy: Vec<f64>) -> Result<Self> {
        if energy.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: energy.len() });
        }
        let power = grid.times().zip(&energy).map(|(t, e)| if t > 0.0 { e / t } else { 0.0 }).collect();
        Ok(Self { grid, energy, power })
    }

    /// Sample a closed-form `E(t)` on the grid.
    pub fn from_fn(grid: TimeGrid, energy: impl Fn(f64) -> f64) -> Self {
        let e = grid.times().map(energy).collect();
        Self::from_energy(grid, e).expect("one value per grid point")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChargingSummary {
    pub e_max: f64,
    pub t_e: f64,
    pub p_max: f64,
    pub t_p: f64,
    /// No energy was transferred anywhere on the horizon.
    pub degenerate: bool,
    /// A maximum sits on the last grid point; the horizon may be too short.
    pub horizon_warning: bool,
}

struct Peak {
    value: f64,
    time: f64,
    at_horizon: bool,
}

fn golden_max(f: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

fn locate_peak(
    times: &[f64],
    values: &[f64],
    refine: Option<&dyn Fn(f64) -> Result<f64>>,
) -> Result<Peak> {
    let n = values.len();
    let (best_idx, best) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let at_horizon = best_idx == n - 1;
    let Some(f) = refine else {
        return Ok(Peak { value: best, time: times[best_idx], at_horizon });
    };

    // Every interior local maximum close enough to the grid optimum may hide
    // the true one between grid points.
    let margin = 1e-3 * best.abs() + f64::EPSILON;
    let mut candidates: Vec<(f64, f64)> = Vec::new();
    for i in 1..n - 1 {
        if values[i] >= values[i - 1] && values[i] >= values[i + 1] && values[i] >= best - margin {
            let tol = REFINE_TOLERANCE * times[i];
            let (t, v) = golden_max(f, times[i - 1], times[i + 1], tol)?;
            if v >= values[i] {
                candidates.push((t, v));
            } else {
                candidates.push((times[i], values[i]));
            }
        }
    }
    if at_horizon || candidates.is_empty() {
        candidates.push((times[best_idx], best));
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    let top = candidates.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    let threshold = top - TIE_TOLERANCE * top.abs();
    let (time, _) = *candidates.iter().find(|c| c.1 >= threshold).expect("top is attained");
    Ok(Peak { value: top, time, at_horizon })
}

/// Global maxima of `E` and `P` over the trace. When `refine` supplies `E(t)`
/// at arbitrary times, each near-optimal grid peak is polished by
/// golden-section search.
pub fn summarize(
    trace: &ChargingTrace,
    refine: Option<&dyn Fn(f64) -> Result<f64>>,
) -> Result<ChargingSummary> {
    let times: Vec<f64> = trace.grid.times().collect();
    let scale = trace.energy.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    if trace.energy.iter().all(|&e| e <= 1e-14 * scale.max(1.0)) {
        return Ok(ChargingSummary {
            e_max: 0.0,
            t_e: 0.0,
            p_max: 0.0,
            t_p: 0.0,
            degenerate: true,
            horizon_warning: false,
        });
    }
    let e_peak = locate_peak(&times, &trace.energy, refine)?;
    let power_fn = refine.map(|f| move |t: f64| -> Result<f64> { Ok(if t > 0.0 { f(t)? / t } else { 0.0 }) });
    let p_peak = locate_peak(
        &times,
        &trace.power,
        power_fn.as_ref().map(|f| f as &dyn Fn(f64) -> Result<f64>),
    )?;
    Ok(ChargingSummary {
        e_max: e_peak.value,
        t_e: e_peak.time,
        p_max: p_peak.value,
        t_p: p_peak.time,
        degenerate: false,
        horizon_warning: e_peak.at_horizon || p_peak.at_horizon,
    })
}

/// One pure branch of a charging problem, reduced to its reachable sector.
/// Stored state at a grid time, used to restart refinement propagations.
type Checkpoint = (f64, StateVector);

#[derive(Debug, Clone)]
struct Branch {
    weight: f64,
    engine: Engine,
    initial: StateVector,
    number: Vec<f64>,
    baseline: f64,
    checkpoints: Vec<(f64, StateVector)>,
}

impl Branch {
    fn new(
        weight: f64,
        h: &HermitianOperator,
        psi0: &StateVector,
        number: &[f64],
        policy: &EnginePolicy,
    ) -> Result<Self> {
        let sector = ReachableSector::new(h, psi0)?;
        let number = sector.restrict_weights(number);
        let engine = Engine::new(&sector.hamiltonian, policy)?;
        let baseline = sector.initial.diagonal_expectation(&number);
        Ok(Self { weight, engine, initial: sector.initial, number, baseline, checkpoints: Vec::new() })
    }

    fn excess(&self, state: &StateVector) -> f64 {
        state.diagonal_expectation(&self.number) - self.baseline
    }

    fn series(&self, grid: &TimeGrid) -> Result<(Vec<f64>, Vec<Checkpoint>)> {
        let mut out = vec![0.0; grid.len()];
        let mut checkpoints = Vec::new();
        let keep = !self.engine.is_spectral();
        self.engine.for_each_state(&self.initial, grid, &mut |k, s| {
            out[k] = self.excess(s);
            if keep && k % CHECKPOINT_STRIDE == 0 {
                checkpoints.push((grid.time(k), s.clone()));
            }
        })?;
        Ok((out, checkpoints))
    }

    fn excess_at(&self, t: f64) -> Result<f64> {
        let start = self
            .checkpoints
            .iter()
            .rev()
            .find(|(tc, _)| *tc <= t)
            .map(|(tc, s)| (*tc, s))
            .unwrap_or((0.0, &self.initial));
        let state = self.engine.propagate(start.1, t - start.0)?;
        Ok(self.excess(&state))
    }
}

/// Charging from a pure or mixed initial state under a static Hamiltonian.
#[derive(Debug, Clone)]
pub struct Charging {
    branches: Vec<Branch>,
    omega0: f64,
}

impl Charging {
    /// `number` holds the battery excitation count of each basis state.
    pub fn pure(
        h: &HermitianOperator,
        psi0: &StateVector,
        number: &[f64],
        omega0: f64,
        policy: &EnginePolicy,
    ) -> Result<Self> {
        Self::mixed(h, &MixedState::pure(psi0.clone()), number, omega0, policy)
    }

    pub fn mixed(
        h: &HermitianOperator,
        mixed: &MixedState,
        number: &[f64],
        omega0: f64,
        policy: &EnginePolicy,
    ) -> Result<Self> {
        if number.len() != h.dim() {
            return Err(Error::DimensionMismatch { expected: h.dim(), found: number.len() });
        }
        let branches = mixed
            .branches()
            .iter()
            .filter(|(p, _)| *p > 0.0)
            .map(|(p, psi)| Branch::new(*p, h, psi, number, policy))
            .collect::<Result<_>>()?;
        Ok(Self { branches, omega0 })
    }

    /// Largest reduced dimension among the branches.
    pub fn sector_dim(&self) -> usize {
        self.branches.iter().map(|b| b.engine.dim()).max().unwrap_or(0)
    }

    pub fn energy_at(&self, t: f64) -> Result<f64> {
        let mut e = 0.0;
        for b in &self.branches {
            e += b.weight * b.excess_at(t)?;
        }
        Ok(self.omega0 * e)
    }

    /// Energy on the grid. Krylov branches keep checkpoints so later
    /// [`Charging::energy_at`] calls start close to the requested time.
    pub fn run(&mut self, grid: &TimeGrid, exec: Execution) -> Result<ChargingTrace> {
        let results = map_ordered(exec, &self.branches, |b| b.series(grid));
        let mut energy = vec![0.0; grid.len()];
        for (b, r) in self.branches.iter_mut().zip(results) {
            let (series, checkpoints) = r?;
            energy.iter_mut().zip(&series).for_each(|(e, s)| *e += self.omega0 * b.weight * s);
            b.checkpoints = checkpoints;
        }
        ChargingTrace::from_energy(grid.clone(), energy)
    }

    /// Run on the grid and summarize with refinement.
    pub fn charge(&mut self, grid: &TimeGrid, exec: Execution) -> Result<(ChargingTrace, ChargingSummary)> {
        let trace = self.run(grid, exec)?;
        let this = &*self;
        let summary = summarize(&trace, Some(&|t| this.energy_at(t)))?;
        Ok((trace, summary))
    }
}

/// Ideal charging of the spin-charger model.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargingReport {
    pub params: ModelParams,
    pub scales: Scales,
    pub trace: ChargingTrace,
    pub summary: ChargingSummary,
}

impl ChargingReport {
    pub fn e_max(&self) -> f64 {
        self.scales.energy(self.summary.e_max)
    }

    pub fn p_max(&self) -> f64 {
        self.scales.power(self.summary.p_max)
    }

    pub fn p_max_collective(&self) -> f64 {
        self.scales.collective_power(self.summary.p_max)
    }
}

/// Build the model, start from the ideal state and charge over `grid`
/// (default horizon when `None`).
pub fn charge(
    params: &ModelParams,
    grid: Option<&TimeGrid>,
    policy: &EnginePolicy,
    exec: Execution,
) -> Result<ChargingReport> {
    params.validate()?;
    let basis = params.basis();
    let h = build_spin_charger(params, &basis)?;
    let psi0 = ideal_initial_state(&basis)?;
    let grid = match grid {
        Some(g) => g.clone(),
        None => default_grid(params.g, params.chargers as usize)?,
    };
    let mut charging = Charging::pure(&h, &psi0, &basis.battery_excitations(), params.omega0, policy)?;
    let (trace, summary) = charging.charge(&grid, exec)?;
    Ok(ChargingReport {
        params: *params,
        scales: Scales { omega0: params.omega0, g: params.g, n: params.chargers as usize },
        trace,
        summary,
    })
}
