// Copyright 2026 The colcm Authors
// SPDX-License-Identifier: Apache-2.0

//! Discrete collision weights for the three coupling families.
//!
//! Delta kernels land on a single lag; smooth kernels are averaged over each
//! grid square. Off-grid delays are reported as warnings.
//!
//!     cargo run --release --example kernel_weights

use colcm::kernel::{Delta, SmoothTerm};
use colcm::{collision_weights, coupling_strengths, Complex64, CouplingSpec};

fn main() -> colcm::Result<()> {
    let dt = 0.1;

    let white = CouplingSpec::white(1.0)?;
    print!("white:\n{}", collision_weights(&white.time_kernel(), dt, 10)?.to_csv());

    let mirror = CouplingSpec::mirror(0.5, 0.4, 0.3)?;
    let w = collision_weights(&mirror.time_kernel(), dt, 10)?;
    print!("\nmirror, tau = 3 dt, phi = 0.4:\n{}", w.to_csv());
    let g = coupling_strengths(&w, mirror.gamma())?;
    println!("strengths g(l) = sqrt(gamma/dt) W(l): {:?}", g.iter().collect::<Vec<_>>());

    let memory = CouplingSpec::custom(
        1.0,
        vec![Delta { lag: 0.0, weight: Complex64::new(1.0, 0.0) }],
        vec![SmoothTerm::Exponential {
            rate: 2.0,
            weight: Complex64::new(-2.0, 0.0),
            cutoff: 0.5,
        }],
    )?;
    print!("\ndelta plus exponential tail:\n{}", collision_weights(&memory.time_kernel(), dt, 10)?.to_csv());

    let off_grid = CouplingSpec::mirror(0.5, 0.0, 0.33)?;
    let w = collision_weights(&off_grid.time_kernel(), dt, 10)?;
    println!("\nmirror with tau = 0.33:");
    for warning in w.warnings() {
        println!("  warning: {warning}");
    }
    Ok(())
}
