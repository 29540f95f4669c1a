//! Collective angular-momentum sectors, ladder matrix elements, and the
//! battery ⊗ charger product basis.
//!
//! A sector with total spin `j` has basis states `|j, m⟩`, `m = -j..=j`,
//! indexed by the excitation count `n = m + j`. Collective `J_z` is stored
//! with eigenvalue `2m` (sum of Pauli `z` operators), so `(ω₀/2)·J_z` is the
//! free Hamiltonian of the ensemble with no rescaling.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{HermitianOperator, SparseMatrix};

/// An integer or half-integer, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const fn from_twice(twice: i64) -> Self {
        Self(twice)
    }

    pub fn from_f64(value: f64) -> Result<Self> {
        let twice = 2.0 * value;
        if !twice.is_finite() || (twice - twice.round()).abs() > 1e-12 {
            return Err(Error::invalid("half_int", format!("{value} is not a multiple of 1/2")));
        }
        Ok(Self(twice.round() as i64))
    }

    pub const fn twice(self) -> i64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ladder {
    Raise,
    Lower,
}

/// Matrix element `⟨j, m±1| J_± |j, m⟩`; zero when `m ± 1` leaves the sector.
pub fn ladder_element(j: HalfInt, m: HalfInt, direction: Ladder) -> Result<f64> {
    let (tj, tm) = (j.twice(), m.twice());
    if tj < 0 {
        return Err(Error::invalid("j", format!("{j} is negative")));
    }
    if tm < -tj || tm > tj || (tj - tm) % 2 != 0 {
        return Err(Error::invalid("m", format!("{m} is not a projection of j = {j}")));
    }
    // j(j+1) - m(m±1) in quarter units
    let quarter = match direction {
        Ladder::Raise => tj * (tj + 2) - tm * (tm + 2),
        Ladder::Lower => tj * (tj + 2) - tm * (tm - 2),
    };
    Ok((quarter.max(0) as f64 / 4.0).sqrt())
}

/// Maximal-spin sector of `2j` identical two-level systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinSector {
    twice_j: u32,
}

impl SpinSector {
    /// Sector with `j = spins / 2`.
    pub fn symmetric(spins: u32) -> Self {
        Self { twice_j: spins }
    }

    pub fn from_j(j: HalfInt) -> Result<Self> {
        u32::try_from(j.twice())
            .map(|twice_j| Self { twice_j })
            .map_err(|_| Error::invalid("j", format!("{j} is negative")))
    }

    pub fn j(&self) -> HalfInt {
        HalfInt::from_twice(self.twice_j as i64)
    }

    pub fn dim(&self) -> usize {
        self.twice_j as usize + 1
    }

    /// Projection `m` of the basis state with `excitations` quanta.
    pub fn m_of(&self, excitations: usize) -> HalfInt {
        HalfInt::from_twice(2 * excitations as i64 - self.twice_j as i64)
    }

    /// All projections in ascending order.
    pub fn m_values(&self) -> impl Iterator<Item = HalfInt> + '_ {
        (0..self.dim()).map(|n| self.m_of(n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Collective {
    /// `Σ σ^z`, eigenvalue `2m`.
    Jz,
    Jplus,
    Jminus,
    /// `J₊J₋ + J₋J₊`, eigenvalue `2[j(j+1) - m²]`.
    Janticomm,
}

/// Collective operator on a sector, as a sparse matrix over excitation index.
pub fn build_collective(sector: SpinSector, which: Collective) -> SparseMatrix {
    let j = sector.j();
    let dim = sector.dim();
    let triplets: Vec<(usize, usize, f64)> = match which {
        Collective::Jz => (0..dim).map(|n| (n, n, sector.m_of(n).twice() as f64)).collect(),
        Collective::Jplus => (0..dim.saturating_sub(1))
            .map(|n| {
                let v = ladder_element(j, sector.m_of(n), Ladder::Raise).expect("m inside sector");
                (n + 1, n, v)
            })
            .collect(),
        Collective::Jminus => (1..dim)
            .map(|n| {
                let v = ladder_element(j, sector.m_of(n), Ladder::Lower).expect("m inside sector");
                (n - 1, n, v)
            })
            .collect(),
        Collective::Janticomm => (0..dim)
            .map(|n| {
                let (tj, tm) = (j.twice(), sector.m_of(n).twice());
                (n, n, (tj * (tj + 2) - tm * tm) as f64 / 2.0)
            })
            .collect(),
    };
    SparseMatrix::from_triplets(dim, dim, triplets).expect("indices inside sector")
}

/// State space of the charger factor of a [`ProductBasis`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChargerSpace {
    /// `N` charger spins in their symmetric sector (`N + 1` states).
    Spins(SpinSector),
    /// Single bosonic mode truncated at `cutoff` photons.
    Fock { cutoff: usize },
}

impl ChargerSpace {
    pub fn dim(&self) -> usize {
        match self {
            ChargerSpace::Spins(s) => s.dim(),
            ChargerSpace::Fock { cutoff } => cutoff + 1,
        }
    }
}

/// Battery collective sector ⊗ charger space, battery-major, both factors
/// ordered by ascending excitation count: `k = n_B · dim_C + n_C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductBasis {
    battery: SpinSector,
    charger: ChargerSpace,
}

impl ProductBasis {
    /// `M` battery cells with `N` charger spins.
    pub fn spin(cells: u32, chargers: u32) -> Self {
        Self {
            battery: SpinSector::symmetric(cells),
            charger: ChargerSpace::Spins(SpinSector::symmetric(chargers)),
        }
    }

    /// `M` battery cells with a cavity mode truncated at `cutoff` photons.
    pub fn cavity(cells: u32, cutoff: usize) -> Self {
        Self { battery: SpinSector::symmetric(cells), charger: ChargerSpace::Fock { cutoff } }
    }

    pub fn battery(&self) -> SpinSector {
        self.battery
    }

    pub fn charger(&self) -> ChargerSpace {
        self.charger
    }

    pub fn cells(&self) -> usize {
        self.battery.dim() - 1
    }

    pub fn charger_dim(&self) -> usize {
        self.charger.dim()
    }

    pub fn dim(&self) -> usize {
        self.battery.dim() * self.charger.dim()
    }

    pub fn index(&self, n_battery: usize, n_charger: usize) -> Result<usize> {
        if n_battery >= self.battery.dim() || n_charger >= self.charger.dim() {
            return Err(Error::IndexOutOfRange {
                battery: n_battery,
                charger: n_charger,
                battery_dim: self.battery.dim(),
                charger_dim: self.charger.dim(),
            });
        }
        Ok(n_battery * self.charger.dim() + n_charger)
    }

    pub fn decompose(&self, k: usize) -> Result<(usize, usize)> {
        if k >= self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: k + 1 });
        }
        Ok((k / self.charger.dim(), k % self.charger.dim()))
    }

    /// Battery excitation count `n_B` of every basis state.
    pub fn battery_excitations(&self) -> Vec<f64> {
        let dc = self.charger.dim();
        (0..self.dim()).map(|k| (k / dc) as f64).collect()
    }

    /// Total excitation count `n_B + n_C` of every basis state.
    pub fn total_excitations(&self) -> Vec<usize> {
        let dc = self.charger.dim();
        (0..self.dim()).map(|k| k / dc + k % dc).collect()
    }

    /// Lift a battery-side operator to the product space.
    pub fn on_battery(&self, op: &SparseMatrix) -> SparseMatrix {
        op.kron(&SparseMatrix::identity(self.charger.dim()))
    }

    /// Lift a charger-side operator to the product space.
    pub fn on_charger(&self, op: &SparseMatrix) -> SparseMatrix {
        SparseMatrix::identity(self.battery.dim()).kron(op)
    }
}

/// Diagonal operator `n_B` (battery excitation count) on a product basis.
pub fn battery_number(basis: &ProductBasis) -> HermitianOperator {
    HermitianOperator::from_upper(
        basis.dim(),
        basis.battery_excitations().into_iter().enumerate().map(|(k, n)| (k, k, n)),
    )
    .expect("diagonal fits basis")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn h(twice: i64) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    #[test]
    fn ladder_examples() {
        assert_relative_eq!(ladder_element(h(1), h(-1), Ladder::Raise).unwrap(), 1.0);
        for n in 1..8 {
            assert_eq!(ladder_element(h(n), h(n), Ladder::Raise).unwrap(), 0.0);
            assert_eq!(ladder_element(h(n), h(-n), Ladder::Lower).unwrap(), 0.0);
        }
        assert_relative_eq!(ladder_element(h(4), h(0), Ladder::Lower).unwrap(), 6f64.sqrt());
    }

    #[test]
    fn ladder_rejects_bad_projection() {
        assert!(ladder_element(h(2), h(4), Ladder::Raise).is_err());
        assert!(ladder_element(h(2), h(1), Ladder::Raise).is_err());
        assert!(ladder_element(h(-1), h(-1), Ladder::Raise).is_err());
        assert!(HalfInt::from_f64(0.3).is_err());
        assert_eq!(HalfInt::from_f64(1.5).unwrap(), h(3));
    }

    #[test]
    fn collective_examples() {
        let one = SpinSector::from_j(h(2)).unwrap();
        let d = build_collective(one, Collective::Janticomm);
        assert_eq!((0..3).map(|i| d.get(i, i)).collect::<Vec<_>>(), vec![2.0, 4.0, 2.0]);

        let half = SpinSector::symmetric(1);
        let z = build_collective(half, Collective::Jz);
        assert_eq!((z.get(0, 0), z.get(1, 1)), (-1.0, 1.0));

        let three_halves = SpinSector::symmetric(3);
        let jp = build_collective(three_halves, Collective::Jplus);
        // from m = 1/2 (n = 2) to m = 3/2 (n = 3)
        assert_relative_eq!(jp.get(3, 2), 3f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn m_values_ascending() {
        let s = SpinSector::symmetric(5);
        let ms: Vec<i64> = s.m_values().map(HalfInt::twice).collect();
        assert_eq!(ms, vec![-5, -3, -1, 1, 3, 5]);
    }

    #[test]
    fn tensor_index_examples() {
        let b = ProductBasis::spin(2, 4);
        assert_eq!(b.dim(), 15);
        assert_eq!(b.index(0, 4).unwrap(), 4);
        assert_eq!(b.index(2, 0).unwrap(), 10);
        for k in 0..15 {
            let (nb, nc) = b.decompose(k).unwrap();
            assert_eq!(b.index(nb, nc).unwrap(), k);
        }
        assert!(b.index(3, 0).is_err());
        assert!(b.index(0, 5).is_err());
        assert!(b.decompose(15).is_err());
    }
}
