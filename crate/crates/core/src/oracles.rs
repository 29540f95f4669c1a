//! Closed-form reference results, written without any of the matrix
//! machinery so they can check it.
//!
//! All functions take the dimensionless time `x = g·t` and return energies in
//! units of `ω₀` and powers in units of `gω₀`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Capacity of two cells charged by a two-photon cavity mode.
pub const TC_TWO_CELL_EMAX: f64 = 16.0 / 9.0;

/// Exact solution for `M = 2` battery cells charged by `N ≥ 2` charger spins
/// under the isotropic coupling.
///
/// The four amplitudes refer to `|11, N/2−2⟩`, `|10, N/2−1⟩`, `|01, N/2−1⟩`
/// and `|00, N/2⟩` (battery product state, charger projection) in the frame
/// rotating with the free Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppendixSolution {
    n: u32,
    xi: f64,
}

impl AppendixSolution {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("chargers", format!("closed form needs N ≥ 2, got {n}")));
        }
        Ok(Self { n, xi: (2.0 * (3.0 * n as f64 - 2.0)).sqrt() })
    }

    pub fn chargers(&self) -> u32 {
        self.n
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn amplitudes(&self, x: f64) -> [Complex64; 4] {
        let xi = self.xi;
        let x2 = xi * xi;
        let s = (xi * x / 2.0).sin();
        let c1 = -2.0 * (2.0 * (x2 + 4.0) * (x2 - 2.0)).sqrt() / (3.0 * x2) * s * s;
        let c2 = Complex64::new(0.0, -((x2 + 4.0) / (6.0 * x2)).sqrt() * (xi * x).sin());
        let c4 = ((x2 + 4.0) * (xi * x).cos() + 2.0 * (x2 - 2.0)) / (3.0 * x2);
        [Complex64::new(c1, 0.0), c2, c2, Complex64::new(c4, 0.0)]
    }

    /// Stored energy from the closed-form expression.
    pub fn energy(&self, x: f64) -> f64 {
        let x2 = self.xi * self.xi;
        let cos = (self.xi * x).cos();
        (x2 + 4.0) / (9.0 * x2 * x2) * ((x2 - 8.0) * cos - (7.0 * x2 - 8.0)) * (cos - 1.0)
    }

    /// Stored energy as `2|c₁|² + |c₂|² + |c₃|²`.
    pub fn energy_from_amplitudes(&self, x: f64) -> f64 {
        let c = self.amplitudes(x);
        2.0 * c[0].norm_sqr() + c[1].norm_sqr() + c[2].norm_sqr()
    }

    /// `16N(N−1)/(3N−2)²`.
    pub fn e_max(&self) -> f64 {
        let n = self.n as f64;
        16.0 * n * (n - 1.0) / ((3.0 * n - 2.0) * (3.0 * n - 2.0))
    }

    /// `g·t̄ = π/ξ`, first time the capacity is reached.
    pub fn x_bar(&self) -> f64 {
        std::f64::consts::PI / self.xi
    }
}

pub fn appendix_energy(n: u32, x: f64) -> Result<f64> {
    Ok(AppendixSolution::new(n)?.energy(x))
}

pub fn appendix_emax(n: u32) -> Result<f64> {
    Ok(AppendixSolution::new(n)?.e_max())
}

/// Single cell charged by a single spin: `(e/ω₀, p/(gω₀))` at `x = gt`.
pub fn single_cell(x: f64) -> (f64, f64) {
    let e = x.sin().powi(2);
    (e, if x > 0.0 { e / x } else { 0.0 })
}

/// Optimal single-cell power `p_max/(gω₀)` and the optimal `gt*`, the root of
/// `tan x = 2x` in `(0, π/2)`.
pub fn single_cell_pmax() -> (f64, f64) {
    // d/dx sin²x/x ∝ 2x cos x − sin x, positive below the root
    let f = |x: f64| 2.0 * x * x.cos() - x.sin();
    let (mut lo, mut hi) = (0.5, std::f64::consts::FRAC_PI_2);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    (x.sin().powi(2) / x, x)
}

fn check_probability(p0: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::Probability(format!("p0 = {p0} outside [0, 1]")));
    }
    Ok(())
}

/// Two cells, two chargers, with one charger spin thermally excited: weight
/// `1 − p₀` on both chargers up and `p₀` on the symmetric one-excitation
/// charger state.
pub fn thermal_energy(p0: f64, x: f64) -> Result<f64> {
    check_probability(p0)?;
    let s = (2f64.sqrt() * x).sin().powi(2);
    Ok(2.0 * s - p0 * (2.0 * s - (2.0 * x).sin().powi(2)))
}

/// Same mixture with the `p₀` branch taken as the product state (first
/// charger up, second down). Only its symmetric half couples to the battery,
/// which halves the weight of that branch's dynamics.
pub fn thermal_energy_product(p0: f64, x: f64) -> Result<f64> {
    check_probability(p0)?;
    let s = (2f64.sqrt() * x).sin().powi(2);
    Ok((1.0 - p0) * 2.0 * s + p0 * 0.5 * (2.0 * x).sin().powi(2))
}
