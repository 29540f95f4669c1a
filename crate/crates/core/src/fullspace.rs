//! Site-resolved reference representations.
//!
//! Either factor of the battery ⊗ charger space may be kept as the full
//! `2^n` product space of individual spins or as the symmetric collective
//! sector. Full sides are indexed by bitstrings, bit `k` set meaning spin `k`
//! is excited. These bases carry states the collective model cannot (a
//! single excited battery cell, a product charger state) and serve as
//! brute-force checks of the collective reduction.

use num_complex::Complex64;

use crate::dicke::{build_collective, Collective, ProductBasis, SpinSector};
use crate::error::{Error, Result};
use crate::hamiltonians::{Frame, ModelParams};
use crate::operator::{HermitianOperator, SparseMatrix};
use crate::propagation::MixedState;
use crate::state::StateVector;

/// Largest full battery side.
pub const MAX_FULL_BATTERY: u32 = 12;
/// Largest total spin count when both sides are full.
pub const MAX_FULL_FULL: u32 = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `n` spins in the `2^n` product space.
    Full(u32),
    /// `n` spins in the symmetric `n + 1` sector.
    Collective(u32),
}

impl Side {
    pub fn spins(&self) -> u32 {
        match *self {
            Side::Full(n) | Side::Collective(n) => n,
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Side::Full(n) => 1 << n,
            Side::Collective(n) => n as usize + 1,
        }
    }

    pub fn excitations(&self, index: usize) -> usize {
        match self {
            Side::Full(_) => index.count_ones() as usize,
            Side::Collective(_) => index,
        }
    }

    /// `Σ_k σ⁺_k`.
    pub fn raise(&self) -> SparseMatrix {
        match *self {
            Side::Full(n) => {
                let triplets = (0..self.dim()).flat_map(|b| {
                    (0..n).filter(move |k| b & (1 << k) == 0).map(move |k| (b | (1 << k), b, 1.0))
                });
                SparseMatrix::from_triplets(self.dim(), self.dim(), triplets).expect("in range")
            }
            Side::Collective(n) => build_collective(SpinSector::symmetric(n), Collective::Jplus),
        }
    }

    /// `Σ_k σᶻ_k`.
    pub fn z(&self) -> SparseMatrix {
        let n = self.spins() as f64;
        let diag: Vec<f64> =
            (0..self.dim()).map(|i| 2.0 * self.excitations(i) as f64 - n).collect();
        SparseMatrix::diagonal(&diag)
    }

    /// `Σ_{l≠j} (σ⁺_l σ⁻_j + σ⁻_l σ⁺_j)`, the flip-flop exchange between
    /// distinct spins.
    pub fn exchange(&self) -> SparseMatrix {
        match *self {
            Side::Full(n) => {
                let triplets = (0..self.dim()).flat_map(|b| {
                    (0..n).flat_map(move |j| {
                        (0..n)
                            .filter(move |&l| {
                                l != j && b & (1 << j) != 0 && b & (1 << l) == 0
                            })
                            .map(move |l| ((b & !(1 << j)) | (1 << l), b, 2.0))
                    })
                });
                SparseMatrix::from_triplets(self.dim(), self.dim(), triplets).expect("in range")
            }
            Side::Collective(n) => build_collective(SpinSector::symmetric(n), Collective::Janticomm)
                .sub(&SparseMatrix::identity(self.dim()).scale(n as f64))
                .expect("same sector"),
        }
    }

    /// Normalized symmetric state with `excitations` quanta.
    pub fn dicke(&self, excitations: usize) -> Result<Vec<(usize, f64)>> {
        let n = self.spins() as usize;
        if excitations > n {
            return Err(Error::invalid("excitations", format!("{excitations} > {n} spins")));
        }
        Ok(match self {
            Side::Collective(_) => vec![(excitations, 1.0)],
            Side::Full(_) => {
                let support: Vec<usize> =
                    (0..self.dim()).filter(|b| b.count_ones() as usize == excitations).collect();
                let amp = 1.0 / (support.len() as f64).sqrt();
                support.into_iter().map(|b| (b, amp)).collect()
            }
        })
    }
}

/// Battery side ⊗ charger side, battery-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HybridBasis {
    pub battery: Side,
    pub charger: Side,
}

impl HybridBasis {
    pub fn new(battery: Side, charger: Side) -> Result<Self> {
        if let Side::Full(m) = battery {
            if m > MAX_FULL_BATTERY {
                return Err(Error::SizeBound {
                    what: "full battery spins",
                    value: m as usize,
                    limit: MAX_FULL_BATTERY as usize,
                });
            }
        }
        if let Side::Full(n) = charger {
            if n > MAX_FULL_BATTERY {
                return Err(Error::SizeBound {
                    what: "full charger spins",
                    value: n as usize,
                    limit: MAX_FULL_BATTERY as usize,
                });
            }
        }
        if let (Side::Full(m), Side::Full(n)) = (battery, charger) {
            if m + n > MAX_FULL_FULL {
                return Err(Error::SizeBound {
                    what: "total spins in full-full basis",
                    value: (m + n) as usize,
                    limit: MAX_FULL_FULL as usize,
                });
            }
        }
        if battery.spins() == 0 || charger.spins() == 0 {
            return Err(Error::invalid("basis", "both sides need at least one spin"));
        }
        Ok(Self { battery, charger })
    }

    pub fn full(cells: u32, chargers: u32) -> Result<Self> {
        Self::new(Side::Full(cells), Side::Full(chargers))
    }

    pub fn dim(&self) -> usize {
        self.battery.dim() * self.charger.dim()
    }

    pub fn index(&self, battery: usize, charger: usize) -> Result<usize> {
        if battery >= self.battery.dim() || charger >= self.charger.dim() {
            return Err(Error::IndexOutOfRange {
                battery,
                charger,
                battery_dim: self.battery.dim(),
                charger_dim: self.charger.dim(),
            });
        }
        Ok(battery * self.charger.dim() + charger)
    }

    pub fn battery_excitations(&self) -> Vec<f64> {
        let dc = self.charger.dim();
        (0..self.dim()).map(|k| self.battery.excitations(k / dc) as f64).collect()
    }

    /// Product of per-side states given as sparse amplitude lists.
    pub fn product(&self, battery: &[(usize, f64)], charger: &[(usize, f64)]) -> Result<StateVector> {
        let mut amps = vec![Complex64::new(0.0, 0.0); self.dim()];
        for &(b, x) in battery {
            for &(c, y) in charger {
                amps[self.index(b, c)?] += Complex64::new(x * y, 0.0);
            }
        }
        StateVector::normalized(amps)
    }

    /// Battery empty, every charger spin excited.
    pub fn ideal_state(&self) -> Result<StateVector> {
        let n = self.charger.spins() as usize;
        self.product(&[(0, 1.0)], &self.charger.dicke(n)?)
    }

    /// Map a state of the collective product basis into this basis, sending
    /// each collective level to the symmetric state of the same excitation.
    pub fn lift(&self, collective: &ProductBasis, state: &StateVector) -> Result<StateVector> {
        if collective.cells() != self.battery.spins() as usize
            || collective.charger_dim() != self.charger.spins() as usize + 1
        {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: collective.dim() });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (k, a) in state.amplitudes().iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let (nb, nc) = collective.decompose(k)?;
            for (b, x) in self.battery.dicke(nb)? {
                for (c, y) in self.charger.dicke(nc)? {
                    amps[self.index(b, c)?] += a * (x * y);
                }
            }
        }
        StateVector::new(amps)
    }
}

/// Spin-charger Hamiltonian assembled from per-site sums on any hybrid basis.
pub fn build_full_hamiltonian(params: &ModelParams, basis: &HybridBasis) -> Result<HermitianOperator> {
    params.validate()?;
    if basis.battery.spins() != params.cells || basis.charger.spins() != params.chargers {
        return Err(Error::invalid(
            "basis",
            format!(
                "basis holds {} cells and {} chargers, parameters {} and {}",
                basis.battery.spins(),
                basis.charger.spins(),
                params.cells,
                params.chargers
            ),
        ));
    }
    let (db, dc) = (basis.battery.dim(), basis.charger.dim());
    let s_plus = basis.battery.raise();
    let j_minus = basis.charger.raise().transpose();
    let battery_part = s_plus.add(&s_plus.transpose().scale(params.gamma))?;
    let half = battery_part.kron(&j_minus).scale(params.g);
    let mut h = half.add(&half.transpose())?;
    if params.frame == Frame::Lab {
        let free = basis
            .battery
            .z()
            .kron(&SparseMatrix::identity(dc))
            .add(&SparseMatrix::identity(db).kron(&basis.charger.z()))?;
        h = h.add(&free.scale(params.omega0 / 2.0))?;
    }
    if params.g1 > 0.0 {
        h = h.add(&SparseMatrix::identity(db).kron(&basis.charger.exchange()).scale(params.g1))?;
    }
    h.into_hermitian(1e-12)
}

fn check_distribution(p: &[f64], expected_len: usize, what: &str) -> Result<()> {
    if p.len() != expected_len {
        return Err(Error::Probability(format!(
            "{what} needs {expected_len} weights, got {}",
            p.len()
        )));
    }
    Ok(())
}

/// Charger spins partly relaxed: weight `p[0]` on the ideal state and `p[l]`
/// (`l = 1..=N`) on an empty battery with `l − 1` excited charger spins, all
/// in the collective basis.
pub fn nonideal_charger_mixture(basis: &ProductBasis, p: &[f64]) -> Result<MixedState> {
    let n = basis.charger_dim() - 1;
    check_distribution(p, n + 1, "charger mixture")?;
    let mut branches = Vec::with_capacity(n + 1);
    branches.push((p[0], StateVector::basis(basis.dim(), basis.index(0, n)?)?));
    for (l, &w) in p.iter().enumerate().skip(1) {
        branches.push((w, StateVector::basis(basis.dim(), basis.index(0, l - 1)?)?));
    }
    MixedState::new(branches)
}

/// Battery cells partly charged: weight `p[0]` on the ideal state and `p[k]`
/// (`k = 1..=M`) on cell `k` alone excited, chargers all up. Lives on a full
/// battery ⊗ collective charger basis.
pub fn nonideal_battery_mixture(cells: u32, chargers: u32, p: &[f64]) -> Result<(HybridBasis, MixedState)> {
    let basis = HybridBasis::new(Side::Full(cells), Side::Collective(chargers))?;
    check_distribution(p, cells as usize + 1, "battery mixture")?;
    let up = chargers as usize;
    let mut branches = Vec::with_capacity(p.len());
    branches.push((p[0], StateVector::basis(basis.dim(), basis.index(0, up)?)?));
    for (k, &w) in p.iter().enumerate().skip(1) {
        branches.push((w, StateVector::basis(basis.dim(), basis.index(1 << (k - 1), up)?)?));
    }
    Ok((basis, MixedState::new(branches)?))
}

/// Two chargers with the second one thermal, on a collective battery ⊗ full
/// charger basis: weight `1 − p₀` on both chargers excited and `p₀` on the
/// product state with only the first excited.
pub fn thermal_mixture_product(p0: f64) -> Result<(HybridBasis, MixedState)> {
    let basis = HybridBasis::new(Side::Collective(2), Side::Full(2))?;
    let both = StateVector::basis(basis.dim(), basis.index(0, 0b11)?)?;
    let first = StateVector::basis(basis.dim(), basis.index(0, 0b01)?)?;
    Ok((basis, MixedState::new(vec![(1.0 - p0, both), (p0, first)])?))
}

/// Same thermal weights with the `p₀` branch as the symmetric one-excitation
/// charger state, in the collective basis.
pub fn thermal_mixture_symmetric(p0: f64) -> Result<(ProductBasis, MixedState)> {
    let basis = ProductBasis::spin(2, 2);
    let both = StateVector::basis(basis.dim(), basis.index(0, 2)?)?;
    let one = StateVector::basis(basis.dim(), basis.index(0, 1)?)?;
    Ok((basis, MixedState::new(vec![(1.0 - p0, both), (p0, one)])?))
}

/// The symmetric thermal mixture on the 16-dimensional full ⊗ full basis.
pub fn thermal_mixture_full(p0: f64) -> Result<(HybridBasis, MixedState)> {
    let basis = HybridBasis::full(2, 2)?;
    let both = basis.product(&[(0, 1.0)], &basis.charger.dicke(2)?)?;
    let one = basis.product(&[(0, 1.0)], &basis.charger.dicke(1)?)?;
    Ok((basis, MixedState::new(vec![(1.0 - p0, both), (p0, one)])?))
}
