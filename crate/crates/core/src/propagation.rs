//! Unitary evolution `|ψ(t)⟩ = e^{-iHt}|ψ(0)⟩` under a static real-symmetric
//! Hamiltonian.
//!
//! Two engines are provided. [`SpectralPropagator`] diagonalizes `H` once and
//! is exact up to rounding; [`KrylovPropagator`] applies the exponential in a
//! Lanczos subspace with an a-posteriori error estimate and adaptive
//! sub-stepping, so it only needs matrix-vector products. [`Engine`]
//! dispatches on dimension.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_ordered, Execution};
use crate::operator::HermitianOperator;
use crate::state::StateVector;

/// Uniform time grid starting at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    t_max: f64,
    points: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::invalid("points", format!("{points} < 2")));
        }
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::invalid("t_max", format!("{t_max} must be positive")));
        }
        Ok(Self { t_max, points })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.t_max / (self.points - 1) as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k + 1 == self.points {
            self.t_max
        } else {
            k as f64 * self.step()
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|k| self.time(k))
    }

    /// Same horizon, twice the density (`2·points − 1` points).
    pub fn refined(&self) -> Self {
        Self { t_max: self.t_max, points: 2 * self.points - 1 }
    }
}

pub trait Propagator {
    fn dim(&self) -> usize;

    /// State at time `t` (which may be negative) starting from `psi`.
    fn propagate(&self, psi: &StateVector, t: f64) -> Result<StateVector>;

    /// Visit `|ψ(t_k)⟩` for every grid point in order.
    fn for_each_state(
        &self,
        psi0: &StateVector,
        grid: &TimeGrid,
        visit: &mut dyn FnMut(usize, &StateVector),
    ) -> Result<()> {
        check_dim(self.dim(), psi0)?;
        let mut psi = psi0.clone();
        visit(0, &psi);
        for k in 1..grid.len() {
            psi = self.propagate(&psi, grid.time(k) - grid.time(k - 1))?;
            visit(k, &psi);
        }
        Ok(())
    }

    fn trajectory(&self, psi0: &StateVector, grid: &TimeGrid) -> Result<Vec<StateVector>> {
        let mut out = Vec::with_capacity(grid.len());
        self.for_each_state(psi0, grid, &mut |_, s| out.push(s.clone()))?;
        Ok(out)
    }
}

fn check_dim(dim: usize, psi: &StateVector) -> Result<()> {
    if psi.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: psi.dim() });
    }
    Ok(())
}

/// Exact propagation through the eigendecomposition `H = V Λ Vᵀ`.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

/// Grid columns evaluated per dense product in [`SpectralPropagator`].
const SPECTRAL_CHUNK: usize = 256;

impl SpectralPropagator {
    pub fn new(h: &HermitianOperator) -> Result<Self> {
        let dim = h.dim();
        let eig = SymmetricEigen::try_new(h.to_dense(), f64::EPSILON, 0)
            .ok_or(Error::Eigensolver { dim })?;
        if eig.eigenvalues.iter().any(|e| !e.is_finite()) {
            return Err(Error::Eigensolver { dim });
        }
        Ok(Self { energies: eig.eigenvalues, vectors: eig.eigenvectors })
    }

    pub fn energies(&self) -> &[f64] {
        self.energies.as_slice()
    }

    /// Eigenbasis coefficients `Vᵀψ` as separate real and imaginary parts.
    fn coefficients(&self, psi: &StateVector) -> (DVector<f64>, DVector<f64>) {
        let re = DVector::from_iterator(psi.dim(), psi.amplitudes().iter().map(|a| a.re));
        let im = DVector::from_iterator(psi.dim(), psi.amplitudes().iter().map(|a| a.im));
        (self.vectors.tr_mul(&re), self.vectors.tr_mul(&im))
    }
}

impl Propagator for SpectralPropagator {
    fn dim(&self) -> usize {
        self.energies.len()
    }

    fn propagate(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        check_dim(self.dim(), psi)?;
        let (cr, ci) = self.coefficients(psi);
        let n = self.dim();
        let mut pr = DVector::zeros(n);
        let mut pi = DVector::zeros(n);
        for k in 0..n {
            let phase = Complex64::from_polar(1.0, -self.energies[k] * t);
            let c = Complex64::new(cr[k], ci[k]) * phase;
            pr[k] = c.re;
            pi[k] = c.im;
        }
        let re = &self.vectors * pr;
        let im = &self.vectors * pi;
        Ok(StateVector::from_evolved(
            re.iter().zip(im.iter()).map(|(&a, &b)| Complex64::new(a, b)).collect(),
        ))
    }

    /// Every grid state is computed directly from `ψ(0)`, batched as dense
    /// products so no error accumulates along the grid.
    fn for_each_state(
        &self,
        psi0: &StateVector,
        grid: &TimeGrid,
        visit: &mut dyn FnMut(usize, &StateVector),
    ) -> Result<()> {
        check_dim(self.dim(), psi0)?;
        let n = self.dim();
        let (cr, ci) = self.coefficients(psi0);
        let mut start = 0;
        while start < grid.len() {
            let width = SPECTRAL_CHUNK.min(grid.len() - start);
            let mut pr = DMatrix::zeros(n, width);
            let mut pi = DMatrix::zeros(n, width);
            for col in 0..width {
                let t = grid.time(start + col);
                for k in 0..n {
                    let c = Complex64::new(cr[k], ci[k])
                        * Complex64::from_polar(1.0, -self.energies[k] * t);
                    pr[(k, col)] = c.re;
                    pi[(k, col)] = c.im;
                }
            }
            let re = &self.vectors * pr;
            let im = &self.vectors * pi;
            for col in 0..width {
                let amps = (0..n).map(|r| Complex64::new(re[(r, col)], im[(r, col)])).collect();
                visit(start + col, &StateVector::from_evolved(amps));
            }
            start += width;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KrylovConfig {
    /// Accepted error per unit time.
    pub tol: f64,
    pub max_subspace: usize,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        Self { tol: 1e-10, max_subspace: 40 }
    }
}

/// Largest number of step halvings before propagation is abandoned.
const MAX_HALVINGS: u32 = 40;

/// Lanczos approximation of `e^{-iHτ}ψ` with full reorthogonalization.
#[derive(Debug, Clone)]
pub struct KrylovPropagator {
    h: HermitianOperator,
    config: KrylovConfig,
}

/// Krylov basis and tridiagonal projection built from one starting vector.
struct LanczosBasis {
    norm: f64,
    basis: Vec<Vec<Complex64>>,
    ritz_values: Vec<f64>,
    ritz_vectors: DMatrix<f64>,
    /// Residual coupling `β_m` out of the subspace (zero on breakdown).
    residual: f64,
}

impl LanczosBasis {
    /// Coefficients of `e^{-iTτ} e₁` in the Krylov basis (unscaled by the norm).
    fn small_exponential(&self, tau: f64) -> Vec<Complex64> {
        let m = self.ritz_values.len();
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|k| {
                        self.ritz_vectors[(i, k)]
                            * self.ritz_vectors[(0, k)]
                            * Complex64::from_polar(1.0, -self.ritz_values[k] * tau)
                    })
                    .sum()
            })
            .collect()
    }

    fn error_estimate(&self, tau: f64) -> f64 {
        if self.residual == 0.0 {
            return 0.0;
        }
        let y = self.small_exponential(tau);
        self.norm * self.residual * y[y.len() - 1].norm()
    }
}

fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    (eig.eigenvalues.as_slice().to_vec(), eig.eigenvectors)
}

impl KrylovPropagator {
    pub fn new(h: HermitianOperator, config: KrylovConfig) -> Result<Self> {
        if !(config.tol.is_finite() && config.tol > 0.0) {
            return Err(Error::invalid("tol", format!("{} must be positive", config.tol)));
        }
        if config.max_subspace < 2 {
            return Err(Error::invalid("max_subspace", "at least 2 Krylov vectors are needed"));
        }
        Ok(Self { h, config })
    }

    pub fn config(&self) -> KrylovConfig {
        self.config
    }

    /// Build the Lanczos basis, stopping early once the estimate for a step of
    /// length `target` meets tolerance.
    fn lanczos(&self, v: &[Complex64], target: f64) -> LanczosBasis {
        let dim = self.h.dim();
        let norm = crate::state::norm(v);
        let m_max = self.config.max_subspace.min(dim).max(1);
        let mut basis: Vec<Vec<Complex64>> = vec![v.iter().map(|a| a / norm).collect()];
        let mut alpha: Vec<f64> = Vec::with_capacity(m_max);
        let mut beta: Vec<f64> = Vec::with_capacity(m_max);
        let mut w = vec![Complex64::new(0.0, 0.0); dim];
        let breakdown = 1e-13 * self.h.norm_bound().max(1.0);

        loop {
            let j = basis.len() - 1;
            self.h.matvec_into(&basis[j], &mut w);
            let a: f64 = basis[j].iter().zip(&w).map(|(q, x)| (q.conj() * x).re).sum();
            alpha.push(a);
            w.iter_mut().zip(&basis[j]).for_each(|(x, q)| *x -= a * q);
            if j > 0 {
                let b = beta[j - 1];
                w.iter_mut().zip(&basis[j - 1]).for_each(|(x, q)| *x -= b * q);
            }
            // one further Gram-Schmidt sweep restores orthogonality
            for q in &basis {
                let overlap: Complex64 = q.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= overlap * y);
            }
            let b = crate::state::norm(&w);
            let m = alpha.len();

            let exhausted = b <= breakdown || m >= m_max;
            let check = exhausted || m >= 4;
            if check {
                let (ritz_values, ritz_vectors) = tridiagonal_eigen(&alpha, &beta);
                let lb = LanczosBasis {
                    norm,
                    basis: std::mem::take(&mut basis),
                    ritz_values,
                    ritz_vectors,
                    residual: if b <= breakdown { 0.0 } else { b },
                };
                if exhausted || lb.error_estimate(target) <= self.config.tol * target {
                    return lb;
                }
                basis = lb.basis;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
    }

    fn step(&self, psi: &[Complex64], dt: f64) -> Result<Vec<Complex64>> {
        let dim = self.h.dim();
        let mut current = psi.to_vec();
        let mut remaining = dt.abs();
        let sign = dt.signum();
        while remaining > 0.0 {
            let lb = self.lanczos(&current, remaining);
            let mut tau = remaining;
            let mut halvings = 0;
            while lb.error_estimate(tau) > self.config.tol * tau {
                tau *= 0.5;
                halvings += 1;
                if halvings > MAX_HALVINGS {
                    return Err(Error::KrylovNonConvergence {
                        dim,
                        step: tau,
                        estimate: lb.error_estimate(tau),
                    });
                }
            }
            let y = lb.small_exponential(sign * tau);
            let mut next = vec![Complex64::new(0.0, 0.0); dim];
            for (q, c) in lb.basis.iter().zip(&y) {
                let c = c * lb.norm;
                next.iter_mut().zip(q).for_each(|(x, v)| *x += c * v);
            }
            current = next;
            remaining = if tau >= remaining { 0.0 } else { remaining - tau };
        }
        Ok(current)
    }
}

impl Propagator for KrylovPropagator {
    fn dim(&self) -> usize {
        self.h.dim()
    }

    fn propagate(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        check_dim(self.dim(), psi)?;
        if t == 0.0 {
            return Ok(psi.clone());
        }
        Ok(StateVector::from_evolved(self.step(psi.amplitudes(), t)?))
    }
}

/// Engine choice by dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnginePolicy {
    /// Largest dimension handled by dense diagonalization.
    pub spectral_max_dim: usize,
    pub krylov: KrylovConfig,
}

/// Default crossover between the dense and Krylov engines.
pub const DEFAULT_SPECTRAL_MAX_DIM: usize = 1500;

impl Default for EnginePolicy {
    fn default() -> Self {
        Self { spectral_max_dim: DEFAULT_SPECTRAL_MAX_DIM, krylov: KrylovConfig::default() }
    }
}

impl EnginePolicy {
    pub fn spectral_only() -> Self {
        Self { spectral_max_dim: usize::MAX, ..Self::default() }
    }

    pub fn krylov_only() -> Self {
        Self { spectral_max_dim: 0, ..Self::default() }
    }
}

#[derive(Debug, Clone)]
pub enum Engine {
    Spectral(SpectralPropagator),
    Krylov(KrylovPropagator),
}

impl Engine {
    pub fn new(h: &HermitianOperator, policy: &EnginePolicy) -> Result<Self> {
        if h.dim() <= policy.spectral_max_dim {
            Ok(Engine::Spectral(SpectralPropagator::new(h)?))
        } else {
            Ok(Engine::Krylov(KrylovPropagator::new(h.clone(), policy.krylov)?))
        }
    }

    pub fn is_spectral(&self) -> bool {
        matches!(self, Engine::Spectral(_))
    }

    fn inner(&self) -> &dyn Propagator {
        match self {
            Engine::Spectral(p) => p,
            Engine::Krylov(p) => p,
        }
    }
}

impl Propagator for Engine {
    fn dim(&self) -> usize {
        self.inner().dim()
    }

    fn propagate(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        self.inner().propagate(psi, t)
    }

    fn for_each_state(
        &self,
        psi0: &StateVector,
        grid: &TimeGrid,
        visit: &mut dyn FnMut(usize, &StateVector),
    ) -> Result<()> {
        self.inner().for_each_state(psi0, grid, visit)
    }
}

/// Restriction of a problem to the invariant subspace reachable from the
/// support of an initial state.
#[derive(Debug, Clone)]
pub struct ReachableSector {
    pub indices: Vec<usize>,
    pub hamiltonian: HermitianOperator,
    pub initial: StateVector,
}

impl ReachableSector {
    pub fn new(h: &HermitianOperator, psi0: &StateVector) -> Result<Self> {
        check_dim(h.dim(), psi0)?;
        let indices = h.reachable_from(psi0.support());
        Ok(Self { hamiltonian: h.restrict(&indices)?, initial: psi0.restrict(&indices)?, indices })
    }

    pub fn restrict_weights(&self, weights: &[f64]) -> Vec<f64> {
        self.indices.iter().map(|&i| weights[i]).collect()
    }
}

/// Probability-weighted ensemble of pure states.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    branches: Vec<(f64, StateVector)>,
}

impl MixedState {
    pub fn new(branches: Vec<(f64, StateVector)>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::Probability("mixture has no branches".into()));
        }
        if let Some((p, _)) = branches.iter().find(|(p, _)| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Probability(format!("negative or non-finite weight {p}")));
        }
        let total: f64 = branches.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Probability(format!("weights sum to {total}")));
        }
        let dim = branches[0].1.dim();
        if let Some((_, s)) = branches.iter().find(|(_, s)| s.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: s.dim() });
        }
        Ok(Self { branches })
    }

    pub fn pure(state: StateVector) -> Self {
        Self { branches: vec![(1.0, state)] }
    }

    pub fn dim(&self) -> usize {
        self.branches[0].1.dim()
    }

    pub fn branches(&self) -> &[(f64, StateVector)] {
        &self.branches
    }
}

/// `Σ_i p_i ⟨ψ_i(t)|O|ψ_i(t)⟩` over the grid, evolving branch by branch.
pub fn evolve_mixture(
    h: &HermitianOperator,
    mixed: &MixedState,
    grid: &TimeGrid,
    observable: &(dyn Fn(&StateVector) -> f64 + Sync),
    policy: &EnginePolicy,
    exec: Execution,
) -> Result<Vec<f64>> {
    if mixed.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: mixed.dim() });
    }
    let engine = Engine::new(h, policy)?;
    let per_branch = map_ordered(exec, mixed.branches(), |(p, psi)| -> Result<Vec<f64>> {
        let mut series = vec![0.0; grid.len()];
        engine.for_each_state(psi, grid, &mut |k, s| series[k] = p * observable(s))?;
        Ok(series)
    });
    let mut total = vec![0.0; grid.len()];
    for series in per_branch {
        total.iter_mut().zip(series?).for_each(|(t, s)| *t += s);
    }
    Ok(total)
}
