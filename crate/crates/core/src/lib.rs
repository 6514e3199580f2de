// Copyright 2026 The colcm Authors
// SPDX-License-Identifier: Apache-2.0

//! Collision models for quantum systems coupled to colored-noise bosonic baths.
//!
//! A frequency-dependent coupling turns the usual memoryless collision model
//! into one where the system meets every time-bin ancilla repeatedly. This
//! crate builds that model on a uniform grid and checks it against exact
//! references:
//!
//! * [`kernel`]: couplings, their time kernels and discrete collision weights.
//! * [`state`]: single-excitation and truncated-Fock joint states.
//! * [`engine`]: collision plans, exact and second-order steppers, the mirror
//!   recursion, and [`engine::run`].
//! * [`reference`]: the mirror delay equation and white-noise decay.
//! * [`analysis`]: CP-divisibility flags and the revival witness.
//! * [`config`] and [`runner`]: TOML configuration and the commands behind
//!   the `colcm` binary.
//!
//! ```
//! use colcm::{run, CouplingSpec, SimulationConfig};
//!
//! let mirror = CouplingSpec::mirror(0.5, 0.0, 1.0).unwrap();
//! let cfg = SimulationConfig::new(mirror, 0.0, 1.0 / 64.0, 256);
//! let traj = run(&cfg).unwrap();
//! assert_eq!(traj.len(), 257);
//! ```

pub mod analysis;
pub mod config;
pub mod engine;
pub mod error;
pub mod kernel;
mod linalg;
pub mod reference;
pub mod runner;
pub mod state;

pub use analysis::{analyze, channel_from_amplitude, intermediate_map, DivisibilityReport, QubitChannel};
pub use config::{Representation, SimulationConfig};
pub use engine::{build_plan, run, CollisionPlan, StepperKind, Trajectory};
pub use error::{Error, Result};
pub use kernel::{collision_weights, coupling_strengths, time_kernel, CouplingSpec, TimeKernel, WeightMatrix};
pub use reference::{dde_numeric_oracle, solve_dde, white_amplitude, DdeSolution};
pub use state::{embed_single_excitation, init_single_excitation, QubitDensityMatrix, SingleExcitationState, TruncatedFockState};

pub use num_complex::Complex64;

/// Round-trip decimal form used in every CSV: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    // Normalise -0 so sign noise does not leak into byte comparisons.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}
