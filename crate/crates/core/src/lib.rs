//! Pulse-level simulation of short-path nonadiabatic geometric gates on
//! superconducting transmons.
//!
//! The crate builds drive schedules for the short-path scheme and the
//! orange-slice comparator, turns them into three-level transmon (or
//! coupled two-qutrit) Hamiltonians, integrates the Lindblad equation and
//! reports state, gate and leakage metrics.
//!
//! ```
//! use sngqc::prelude::*;
//!
//! let tp = TransmonParams::default();
//! let gp = GateParams::new(std::f64::consts::FRAC_PI_2, 0.0, std::f64::consts::FRAC_PI_2, Scheme::Sngqc)?;
//! let sched = sngqc_schedule(&gp, tp.omega_max, tp.delta)?;
//! assert!((sched.total_duration() - 62.5e-9).abs() < 1e-15);
//! # Ok::<(), sngqc::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod config;
pub mod device;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod gates;
pub mod matrix;
pub mod pulses;
pub mod state;

pub use error::{Error, Result};

/// `2π`, for writing frequencies as `TWO_PI * 20e6`.
pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

pub mod prelude {
    pub use crate::device::{
        collapse_channels, coupled_trajectory, coupling_schedule, effective_coupling,
        effective_two_qubit_hamiltonian, single_qubit_trajectory, two_qubit_channels,
        CoupledParams, ModulationEnvelope, TransmonParams,
    };
    pub use crate::dynamics::{
        expectation, lindblad_evolve, lindblad_map, propagate_unitary, CollapseChannel,
        HamiltonianTrajectory,
    };
    pub use crate::gates::{
        gate_fidelity_single, gate_fidelity_two, ideal_cphase, ideal_single_gate, state_fidelity,
        verify_cyclic, verify_parallel_transport, FidelityReport, IdealGate, SimOptions,
    };
    pub use crate::matrix::{expm, kron, pauli, ComplexMatrix, C64};
    pub use crate::pulses::{
        drag_augment, inject_errors, ngqc_schedule, schedule_for, sngqc_schedule, Envelope,
        ErrorModel, GateParams, PulseSchedule, PulseSegment, Scheme,
    };
    pub use crate::state::{dressed_states, DensityMatrix, QuantumState};
    pub use crate::{Error, Result, TWO_PI};
}

// Keep the book's snippets compiling and passing.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/short-path.md")]
    mod short_path {}
    #[doc = include_str!("../../../book/src/geometric-conditions.md")]
    mod geometric_conditions {}
    #[doc = include_str!("../../../book/src/open-system.md")]
    mod open_system {}
    #[doc = include_str!("../../../book/src/two-qubit.md")]
    mod two_qubit {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
