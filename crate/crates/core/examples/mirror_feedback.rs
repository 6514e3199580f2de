// Copyright 2026 The colcm Authors
// SPDX-License-Identifier: Apache-2.0

//! Emitter in front of a mirror: the photon returns after a round trip `τ`
//! and interferes with the emitter, partly trapping the excitation.
//!
//! Compares the exact single-excitation stepper, the second-order stepper
//! and the ring-buffer mirror recursion against the delay-equation solution,
//! and prints the trapped fraction for in-phase and out-of-phase feedback.
//!
//!     cargo run --release --example mirror_feedback

use std::f64::consts::PI;

use colcm::runner::max_grid_error;
use colcm::{run, solve_dde, CouplingSpec, Representation, SimulationConfig, StepperKind};

fn main() -> colcm::Result<()> {
    let (gamma, tau) = (0.5, 1.0);
    let dt = tau / 256.0;

    for phi in [0.0, PI / 2.0, PI] {
        let spec = CouplingSpec::mirror(gamma, phi, tau)?;
        let base = SimulationConfig::new(spec, 0.0, dt, 1).with_t_max(12.0);
        let reference = solve_dde(0.0, gamma, phi, tau, 12.0)?;

        let exact = run(&base)?;
        let second = run(&base.clone().with_stepper(StepperKind::SecondOrder))?;
        let recursion = run(
            &base
                .with_stepper(StepperKind::SecondOrder)
                .with_representation(Representation::MirrorRecursion),
        )?;

        println!("phi = {phi:.4}");
        for (name, traj) in [("exact", &exact), ("second order", &second), ("recursion", &recursion)] {
            println!(
                "  {name:<13} |eps(12)| = {:.6}   max error vs delay equation = {:.3e}",
                traj.eps.last().unwrap().norm(),
                max_grid_error(traj, |t| reference.eval(t))
            );
        }
        println!("  reference     |eps(12)| = {:.6}", reference.eval(12.0).norm());
    }
    println!("in-phase trapping limit 1/(1 + gamma tau) = {:.6}", 1.0 / (1.0 + gamma * tau));
    Ok(())
}
