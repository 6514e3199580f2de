// Copyright 2026 The colcm Authors
// SPDX-License-Identifier: Apache-2.0

//! Time-step sweep of the mirror model against the exact delay-equation
//! amplitude. Runs execute in parallel; the table shows first-order
//! convergence for both steppers.
//!
//!     cargo run --release --example dde_convergence

use colcm::runner::convergence_table;
use colcm::{CouplingSpec, SimulationConfig, StepperKind};

fn main() -> colcm::Result<()> {
    let tau = 1.0;
    let dts: Vec<f64> = (6..=10).map(|k| tau / f64::from(1u32 << k)).collect();
    let base = SimulationConfig::new(CouplingSpec::mirror(0.5, 0.0, tau)?, 0.0, dts[0], 1).with_t_max(4.0);

    for stepper in [StepperKind::ExactExponential, StepperKind::SecondOrder] {
        let table = convergence_table(&base.clone().with_stepper(stepper), &dts)?;
        println!("{stepper:?}");
        println!("{:>12} {:>8} {:>14} {:>8}", "dt", "steps", "max error", "order");
        for row in &table.rows {
            let order = row.observed_order.map_or(String::from("-"), |p| format!("{p:.3}"));
            println!("{:>12.3e} {:>8} {:>14.6e} {:>8}", row.dt, row.n_steps, row.max_abs_error, order);
        }
    }
    Ok(())
}
