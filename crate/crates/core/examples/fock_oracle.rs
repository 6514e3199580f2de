// Copyright 2026 The colcm Authors
// SPDX-License-Identifier: Apache-2.0

//! Cross-check of the single-excitation stepper against a dense truncated
//! Fock register with a sliding window of ancilla modes.
//!
//! Starting from `|e, vac>` the dynamics never leaves the one-excitation
//! sector, so both representations must agree to rounding.
//!
//!     cargo run --release --example fock_oracle

use colcm::{run, CouplingSpec, Representation, SimulationConfig};

fn main() -> colcm::Result<()> {
    let spec = CouplingSpec::mirror(0.5, 0.0, 0.4)?;
    let cfg = SimulationConfig::new(spec, 0.3, 0.1, 48);
    let d = cfg.mirror_delay_steps().unwrap_or(0);

    let single = run(&cfg)?;
    for n_max in [1, 2] {
        let window = d + 1;
        let fock = run(&cfg.clone().with_representation(Representation::FullFock { n_max, window }))?;
        let diff = single
            .eps
            .iter()
            .zip(&fock.eps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        println!(
            "n_max = {n_max}, window = {window}: register dimension {:>4}, max |eps diff| = {diff:.2e}, final norm {:.15}",
            2 * (n_max + 1).pow(window as u32),
            fock.norm.last().unwrap()
        );
    }
    Ok(())
}
