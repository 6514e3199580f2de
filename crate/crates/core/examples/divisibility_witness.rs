// Copyright 2026 The colcm Authors
// SPDX-License-Identifier: Apache-2.0

//! CP-divisibility of the emitter's reduced dynamics.
//!
//! The reduced map after `n` steps is the amplitude-damping-like channel with
//! `G_n = ε_n / ε_0`. The map between consecutive steps is completely
//! positive exactly when `|G|` does not grow; revivals break it.
//!
//!     cargo run --release --example divisibility_witness

use colcm::{analyze, channel_from_amplitude, intermediate_map, run, CouplingSpec, SimulationConfig};

fn main() -> colcm::Result<()> {
    let dt = 1.0 / 64.0;
    for (name, spec) in [
        ("white", CouplingSpec::white(0.5)?),
        ("mirror", CouplingSpec::mirror(0.5, 0.0, 1.0)?),
    ] {
        let traj = run(&SimulationConfig::new(spec, 0.0, dt, 1).with_t_max(6.0))?;
        let report = analyze(&traj)?;
        let flagged = report.cp.iter().filter(|cp| !**cp).count();
        println!("{name}: {flagged} NOT-CP steps, witness N = {:.5}", report.witness);
        for iv in &report.intervals {
            println!(
                "  revival over steps {}..={} (t = {:.3}..{:.3}), |eps|^2 gained {:.5}",
                iv.n_start,
                iv.n_end,
                iv.n_start as f64 * dt,
                iv.n_end as f64 * dt,
                iv.gained
            );
        }
        if let Some(n) = report.first_not_cp_step {
            let map = intermediate_map(traj.eps[n - 1], traj.eps[n])?;
            println!(
                "  step {n}: |ratio| = {:.9}, smallest Choi eigenvalue = {:.3e}",
                map.ratio().norm(),
                map.choi_min_eigenvalue()
            );
        }
    }

    let ch = channel_from_amplitude(colcm::Complex64::new(0.6, 0.3))?;
    println!("Choi spectrum of G = 0.6 + 0.3i: {:?}", ch.choi_eigenvalues());
    Ok(())
}
