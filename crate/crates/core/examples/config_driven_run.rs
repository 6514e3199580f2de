// Copyright 2026 The colcm Authors
// SPDX-License-Identifier: Apache-2.0

//! Load a TOML configuration and run every command the `colcm` binary offers,
//! writing the outputs to a directory.
//!
//!     cargo run --release --example config_driven_run -- [CONFIG] [OUT_DIR]
//!
//! Defaults to `configs/mirror.toml` and `out/example`.

use std::path::PathBuf;

use colcm::runner::{cmd_converge, cmd_kernel, cmd_simulate, cmd_witness};
use colcm::SimulationConfig;

fn main() -> colcm::Result<()> {
    let mut args = std::env::args().skip(1);
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let config = args.next().map(PathBuf::from).unwrap_or_else(|| manifest.join("configs/mirror.toml"));
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out/example"));

    let cfg = SimulationConfig::from_file(&config)?;
    println!("loaded {}:\n{}", config.display(), cfg.to_toml_string());

    let mut files = cmd_kernel(&cfg, &out)?.files;
    let (traj, outcome) = cmd_simulate(&cfg, &out)?;
    files.extend(outcome.files);
    let (report, outcome) = cmd_witness(&cfg, &out)?;
    files.extend(outcome.files);
    if cfg.converge.is_some() {
        files.extend(cmd_converge(&cfg, None, &out)?.1.files);
    }

    let summary = traj.summary();
    println!(
        "{} steps, |eps(T)| = {:.6}, witness N = {:.5}",
        summary.n_steps, summary.abs_eps_final, report.witness
    );
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
