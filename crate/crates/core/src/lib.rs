//! Exact dynamics of collective spin-charger quantum batteries.
//!
//! A battery of `M` two-level cells exchanges energy with a charger of `N`
//! two-level systems (or, for the reference model, a single cavity mode).
//! Both ensembles are treated in their permutation-symmetric Dicke sectors,
//! so the Hilbert space has dimension `(M+1)(N+1)` instead of `2^(M+N)`.
//!
//! The main entry points are [`hamiltonians::build_spin_charger`],
//! [`observables::charge`] and the sweeps in [`experiments`].

pub mod dicke;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod fullspace;
pub mod hamiltonians;
pub mod observables;
pub mod operator;
pub mod oracles;
pub mod propagation;
pub mod state;

pub use error::{Error, Result};
pub use exec::{map_ordered, set_thread_count, Execution};
pub use hamiltonians::{Frame, ModelParams, TcParams};
pub use operator::{HermitianOperator, SparseMatrix};
pub use propagation::{Engine, EnginePolicy, MixedState, Propagator, TimeGrid};
pub use state::StateVector;
