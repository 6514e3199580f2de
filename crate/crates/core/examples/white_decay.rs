// Copyright 2026 The colcm Authors
// SPDX-License-Identifier: Apache-2.0

//! Markovian decay of an excited emitter under a white (flat) coupling.
//!
//! Every collision touches only the fresh ancilla, so the amplitude decays
//! as `e^{-γ t / 2}` in the continuum limit.
//!
//!     cargo run --release --example white_decay

use colcm::{run, white_amplitude, CouplingSpec, SimulationConfig};

fn main() -> colcm::Result<()> {
    let gamma = 1.0;
    let cfg = SimulationConfig::new(CouplingSpec::white(gamma)?, 0.0, 1e-3, 5000);
    let traj = run(&cfg)?;

    println!("{:>6} {:>12} {:>12} {:>10}", "t", "|eps|", "exp(-t/2)", "diff");
    for n in (0..traj.len()).step_by(500) {
        let t = traj.t[n];
        let exact = white_amplitude(0.0, gamma, t).norm();
        let got = traj.eps[n].norm();
        println!("{t:>6.2} {got:>12.8} {exact:>12.8} {:>10.2e}", (got - exact).abs());
    }
    println!("largest norm drift: {:.2e}", traj.max_norm_drift());
    Ok(())
}
