//! Simulation toolkit for periodically modulated open quantum systems coupled
//! to stationary baths that need not be in thermal equilibrium.
//!
//! The crate is organised in layers:
//!
//! * [`bath`] — bath coupling spectra `G(ω)`: thermal, population-specified,
//!   filtered, displaced, squeezed-thermal and composite models, together with
//!   frequency-local temperatures, passivity classification and the filter
//!   threshold for work extraction from a single bath.
//! * [`modulation`] — periodic phase modulations of a two-level system reduced
//!   to their harmonic weights `P_q`.
//! * [`tls`] — closed-form steady state, heat currents, output power and
//!   efficiency of a modulated two-level machine, including the pairwise
//!   decomposition of the power and the sufficient work-extraction condition.
//! * [`floquet`] — the general pipeline: one-period propagation of a
//!   time-periodic Hamiltonian, monodromy diagonalisation, harmonic-resolved
//!   jump operators, the block-structured master-equation generator, its
//!   stationary state, time evolution, and thermodynamic reporting
//!   (currents, power, effective temperatures, entropy balance).
//! * [`thermo`] — bath-agnostic bookkeeping over labelled heat currents:
//!   entropy flow and the effective hot/cold temperatures of a channel
//!   partition.
//! * [`oracle`] — small, independent reference implementations (classical rate
//!   equations, Runge–Kutta integration, the exactly solvable circularly
//!   driven two-level problem, Bessel functions) used to cross-check the main
//!   pipeline in tests.
//! * [`scenario`] — TOML scenario files describing baths and machines, plus
//!   tabulated data loading and content hashing for reproducible outputs.
//! * [`verify`] — seeded random-scenario generators and invariant suites
//!   (route identity, passivity no-work bound, engine law checks, entropy
//!   production positivity) shared by the test-suite and the CLI.
//!
//! Units are natural throughout: ħ = k_B = 1, frequencies and temperatures in
//! the same unit, rates in frequency units.

pub mod bath;
pub mod floquet;
pub mod linalg;
pub mod modulation;
pub mod oracle;
pub mod scenario;
pub mod thermo;
pub mod tls;
pub mod verify;

pub use bath::{BaseCoupling, BathError, BathModel, PassivityVerdict, Profile};
pub use floquet::{
    FloquetDecomposition, FloquetError, FloquetMachine, GeneratorDecomposition,
    PeriodicHamiltonian,
};
pub use modulation::Modulation;
pub use scenario::{LoadedScenario, MachineKind, Scenario, ScenarioError};
pub use thermo::{CurrentEntry, EffectiveTemperatures};
pub use tls::{EngineError, TlsMachine};
pub use verify::{Fault, SuiteReport};
