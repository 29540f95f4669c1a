//! Hamiltonian builders: collective spin charger (with optional charger
//! crosstalk), the Tavis-Cummings/Dicke cavity benchmark, and the
//! one-cell/one-spin block of the parallel scheme.

use serde::{Deserialize, Serialize};

use crate::dicke::{build_collective, Collective, ProductBasis, SpinSector};
use crate::error::{Error, Result};
use crate::operator::{HermitianOperator, SparseMatrix};
use crate::state::StateVector;

/// Asymmetry tolerated when converting an assembled sum to symmetric storage.
const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// Static `H₀ + H₁` including the free level splitting.
    #[default]
    Lab,
    /// Interaction picture w.r.t. `H₀`; only exact when the coupling conserves
    /// excitations (`gamma = 0`).
    Rotating,
}

/// Physical parameters of one spin-charger scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelParams {
    /// Battery cells `M`.
    pub cells: u32,
    /// Charger spins `N`.
    pub chargers: u32,
    pub omega0: f64,
    /// Battery-charger coupling.
    pub g: f64,
    /// Anisotropy, weight of the counter-rotating terms.
    pub gamma: f64,
    /// Charger-charger crosstalk.
    pub g1: f64,
    pub frame: Frame,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { cells: 2, chargers: 2, omega0: 1.0, g: 0.1, gamma: 0.0, g1: 0.0, frame: Frame::Lab }
    }
}

impl ModelParams {
    pub fn new(cells: u32, chargers: u32) -> Self {
        Self { cells, chargers, ..Self::default() }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_coupling(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    pub fn with_crosstalk(mut self, g1: f64) -> Self {
        self.g1 = g1;
        self
    }

    pub fn with_omega0(mut self, omega0: f64) -> Self {
        self.omega0 = omega0;
        self
    }

    pub fn with_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells < 1 {
            return Err(Error::invalid("cells", "at least one battery cell is required"));
        }
        if self.chargers < 1 {
            return Err(Error::invalid("chargers", "at least one charger spin is required"));
        }
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(Error::invalid("omega0", format!("{} must be positive", self.omega0)));
        }
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(Error::invalid("g", format!("{} must be positive", self.g)));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::invalid("gamma", format!("{} outside [0, 1]", self.gamma)));
        }
        if !(self.g1.is_finite() && self.g1 >= 0.0) {
            return Err(Error::invalid("g1", format!("{} must be non-negative", self.g1)));
        }
        if self.frame == Frame::Rotating && self.gamma != 0.0 {
            return Err(Error::invalid("frame", "rotating frame requires gamma = 0"));
        }
        Ok(())
    }

    pub fn basis(&self) -> ProductBasis {
        ProductBasis::spin(self.cells, self.chargers)
    }
}

/// Constant subtracted from `J₊J₋ + J₋J₊` in the crosstalk term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrosstalkOffset {
    /// `N·I`, the exact self-interaction compensation.
    Exact,
    /// A bare identity.
    Unit,
    None,
}

/// `g₁ (J₊J₋ + J₋J₊ − offset)` on the charger sector.
pub fn crosstalk_term(sector: SpinSector, g1: f64, offset: CrosstalkOffset) -> SparseMatrix {
    let shift = match offset {
        CrosstalkOffset::Exact => (sector.dim() - 1) as f64,
        CrosstalkOffset::Unit => 1.0,
        CrosstalkOffset::None => 0.0,
    };
    build_collective(sector, Collective::Janticomm)
        .sub(&SparseMatrix::identity(sector.dim()).scale(shift))
        .expect("same sector")
        .scale(g1)
}

/// Collective spin-charger Hamiltonian
/// `H = (ω₀/2)(S_z + J_z) + g[(γS₋ + S₊)J₋ + h.c.] + g₁(J₊J₋ + J₋J₊ − N)`.
pub fn build_spin_charger(params: &ModelParams, basis: &ProductBasis) -> Result<HermitianOperator> {
    build_spin_charger_with(params, basis, CrosstalkOffset::Exact)
}

pub fn build_spin_charger_with(
    params: &ModelParams,
    basis: &ProductBasis,
    offset: CrosstalkOffset,
) -> Result<HermitianOperator> {
    params.validate()?;
    let expected = params.basis();
    if *basis != expected {
        return Err(Error::DimensionMismatch { expected: expected.dim(), found: basis.dim() });
    }
    let battery = basis.battery();
    let charger = SpinSector::symmetric(params.chargers);

    let s_plus = build_collective(battery, Collective::Jplus);
    let s_minus = build_collective(battery, Collective::Jminus);
    let j_minus = build_collective(charger, Collective::Jminus);

    let battery_part = s_plus.add(&s_minus.scale(params.gamma))?;
    let half = battery_part.kron(&j_minus).scale(params.g);
    let mut h = half.add(&half.transpose())?;

    if params.frame == Frame::Lab {
        let free_b = basis.on_battery(&build_collective(battery, Collective::Jz));
        let free_c = basis.on_charger(&build_collective(charger, Collective::Jz));
        h = h.add(&free_b.add(&free_c)?.scale(params.omega0 / 2.0))?;
    }
    if params.g1 > 0.0 {
        h = h.add(&basis.on_charger(&crosstalk_term(charger, params.g1, offset)))?;
    }
    h.into_hermitian(SYMMETRY_TOL)
}

/// Free part `H₀ = (ω₀/2)(S_z + J_z)` alone.
pub fn build_free(params: &ModelParams, basis: &ProductBasis) -> Result<HermitianOperator> {
    let free_b = basis.on_battery(&build_collective(basis.battery(), Collective::Jz));
    let free_c =
        basis.on_charger(&build_collective(SpinSector::symmetric(params.chargers), Collective::Jz));
    free_b.add(&free_c)?.scale(params.omega0 / 2.0).into_hermitian(SYMMETRY_TOL)
}

/// Battery empty, every charger spin excited: `|n_B = 0, n_C = N⟩`.
pub fn ideal_initial_state(basis: &ProductBasis) -> Result<StateVector> {
    StateVector::basis(basis.dim(), basis.index(0, basis.charger_dim() - 1)?)
}

/// Cavity-charger benchmark parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TcParams {
    pub cells: u32,
    /// Initial photon number.
    pub n_init: usize,
    /// Fock truncation (largest photon number kept).
    pub cutoff: usize,
    pub omega0: f64,
    pub g_tilde: f64,
    pub gamma: f64,
    pub frame: Frame,
}

impl Default for TcParams {
    fn default() -> Self {
        Self { cells: 2, n_init: 2, cutoff: 2, omega0: 1.0, g_tilde: 0.1, gamma: 0.0, frame: Frame::Lab }
    }
}

impl TcParams {
    /// `M` cells, `n_init` photons, with the minimal admissible cutoff.
    pub fn new(cells: u32, n_init: usize) -> Self {
        Self { cells, n_init, cutoff: n_init, ..Self::default() }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self.cutoff = self.cutoff.max(self.minimum_cutoff());
        self
    }

    pub fn with_coupling(mut self, g_tilde: f64) -> Self {
        self.g_tilde = g_tilde;
        self
    }

    pub fn with_cutoff(mut self, cutoff: usize) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn with_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    /// Smallest cutoff admitted: `n_init` when excitations are conserved,
    /// otherwise `n_init + 2M`.
    pub fn minimum_cutoff(&self) -> usize {
        if self.gamma > 0.0 {
            self.n_init + 2 * self.cells as usize
        } else {
            self.n_init
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells < 1 {
            return Err(Error::invalid("cells", "at least one battery cell is required"));
        }
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(Error::invalid("omega0", format!("{} must be positive", self.omega0)));
        }
        if !(self.g_tilde.is_finite() && self.g_tilde > 0.0) {
            return Err(Error::invalid("g_tilde", format!("{} must be positive", self.g_tilde)));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::invalid("gamma", format!("{} outside [0, 1]", self.gamma)));
        }
        if self.cutoff < self.minimum_cutoff() {
            return Err(Error::invalid(
                "cutoff",
                format!("{} below the floor {}", self.cutoff, self.minimum_cutoff()),
            ));
        }
        if self.frame == Frame::Rotating && self.gamma != 0.0 {
            return Err(Error::invalid("frame", "rotating frame requires gamma = 0"));
        }
        Ok(())
    }

    pub fn basis(&self) -> ProductBasis {
        ProductBasis::cavity(self.cells, self.cutoff)
    }

    /// `|n_B = 0⟩ ⊗ |n_init⟩`.
    pub fn initial_state(&self) -> Result<StateVector> {
        let basis = self.basis();
        StateVector::basis(basis.dim(), basis.index(0, self.n_init)?)
    }
}

/// `H = ω₀ b†b + (ω₀/2) S_z + g̃[(γS₋ + S₊) b + h.c.]` on battery ⊗ Fock.
pub fn build_tc(params: &TcParams) -> Result<HermitianOperator> {
    params.validate()?;
    let basis = params.basis();
    let battery = basis.battery();
    let levels = params.cutoff + 1;

    let annihilate =
        SparseMatrix::from_triplets(levels, levels, (1..levels).map(|n| (n - 1, n, (n as f64).sqrt())))?;
    let battery_part = build_collective(battery, Collective::Jplus)
        .add(&build_collective(battery, Collective::Jminus).scale(params.gamma))?;
    let half = battery_part.kron(&annihilate).scale(params.g_tilde);
    let mut h = half.add(&half.transpose())?;

    if params.frame == Frame::Lab {
        let photons = SparseMatrix::diagonal(&(0..levels).map(|n| n as f64).collect::<Vec<_>>());
        let free = basis
            .on_charger(&photons)
            .add(&basis.on_battery(&build_collective(battery, Collective::Jz)).scale(0.5))?
            .scale(params.omega0);
        h = h.add(&free)?;
    }
    h.into_hermitian(SYMMETRY_TOL)
}

/// One cell charged by one spin, over
/// `{|1_B 1_C⟩, |1_B 0_C⟩, |0_B 1_C⟩, |0_B 0_C⟩}`.
pub fn build_single_cell(omega0: f64, g: f64, gamma: f64) -> HermitianOperator {
    HermitianOperator::from_upper(
        4,
        [(0, 0, omega0), (0, 3, g * gamma), (1, 2, g), (3, 3, -omega0)],
    )
    .expect("fixed 4x4 layout")
}
