// Copyright 2026 The colcm Authors
// SPDX-License-Identifier: Apache-2.0

//! Simulation configuration and its TOML file format.
//!
//! ```toml
//! omega0 = 0.0
//! dt = 0.001953125
//! t_max = 4.0            # or n_steps = 2048, never both
//! stepper = "exact_exponential"
//! beta = [1.0, 0.0]
//! rotating_frame = false
//!
//! [coupling]
//! kind = "mirror"        # white | mirror | custom
//! gamma = 0.5
//! phi = 0.0
//! tau = 1.0
//!
//! [representation]
//! kind = "single_excitation"   # | full_fock (n_max, window) | mirror_recursion
//!
//! [output]
//! dir = "out"
//!
//! [converge]
//! dt_list = [0.015625, 0.0078125]
//! ```
//!
//! Unknown keys anywhere are rejected.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::engine::StepperKind;
use crate::error::{Error, Result};
use crate::kernel::{collision_weights, CouplingShape, CouplingSpec};

/// How the joint state is stored and advanced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Representation {
    /// Exact single-excitation sector with all ancilla amplitudes stored.
    #[default]
    SingleExcitation,
    /// Dense truncated Fock vector over a sliding mode window.
    FullFock { n_max: usize, window: usize },
    /// Mirror recursion with a ring buffer of `d` ancilla amplitudes.
    MirrorRecursion,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    pub dt_list: Vec<f64>,
}

fn default_beta() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn is_default_output(o: &OutputConfig) -> bool {
    o.dir.is_none()
}

/// Everything needed to reproduce one trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(default)]
    pub omega0: f64,
    pub dt: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default)]
    pub stepper: StepperKind,
    #[serde(default = "default_beta")]
    pub beta: Complex64,
    #[serde(default)]
    pub rotating_frame: bool,
    pub coupling: CouplingSpec,
    #[serde(default)]
    pub representation: Representation,
    #[serde(default, skip_serializing_if = "is_default_output")]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converge: Option<ConvergeConfig>,
}

impl SimulationConfig {
    /// Defaults around a coupling: exact stepper, single-excitation sector,
    /// `beta = 1`, lab frame.
    pub fn new(coupling: CouplingSpec, omega0: f64, dt: f64, n_steps: usize) -> Self {
        Self {
            omega0,
            dt,
            n_steps: Some(n_steps),
            t_max: None,
            stepper: StepperKind::default(),
            beta: default_beta(),
            rotating_frame: false,
            coupling,
            representation: Representation::default(),
            output: OutputConfig::default(),
            converge: None,
        }
    }

    pub fn with_stepper(mut self, stepper: StepperKind) -> Self {
        self.stepper = stepper;
        self
    }

    pub fn with_representation(mut self, representation: Representation) -> Self {
        self.representation = representation;
        self
    }

    pub fn with_beta(mut self, beta: Complex64) -> Self {
        self.beta = beta;
        self
    }

    /// Replace the horizon by `t_max`, to be rounded down to whole steps.
    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.n_steps = None;
        self.t_max = Some(t_max);
        self
    }

    /// Parse and validate a TOML document.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SimulationConfig = toml::from_str(text).map_err(|e| {
            let field = e
                .message()
                .split('`')
                .nth(1)
                .unwrap_or("<document>")
                .to_string();
            Error::config(field, e.to_string().trim().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("--config", format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration is always representable as TOML")
    }

    /// Number of collisions and, when `t_max` is not a whole number of steps, a
    /// note saying how it was rounded.
    pub fn resolved_steps(&self) -> Result<(usize, Option<String>)> {
        match (self.n_steps, self.t_max) {
            (Some(n), None) => Ok((n, None)),
            (None, Some(t)) => {
                let ratio = t / self.dt;
                // Absorb rounding in t / dt before flooring.
                let n = (ratio * (1.0 + 1e-12)).floor() as usize;
                let covered = n as f64 * self.dt;
                let note = ((t - covered).abs() > 1e-9 * t.abs().max(self.dt)).then(|| {
                    format!("t_max = {t} rounded down to n_steps = {n} (covers t = {covered})")
                });
                Ok((n, note))
            }
            (Some(_), Some(_)) => Err(Error::config(
                "n_steps",
                "give exactly one of n_steps and t_max",
            )),
            (None, None) => Err(Error::config("n_steps", "one of n_steps or t_max is required")),
        }
    }

    /// Mirror delay in steps, `round(tau / dt)`.
    pub fn mirror_delay_steps(&self) -> Option<usize> {
        match self.coupling.shape() {
            CouplingShape::Mirror { tau, .. } => Some((tau / self.dt).round() as usize),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::config("dt", format!("must be finite and > 0, got {}", self.dt)));
        }
        if !self.omega0.is_finite() {
            return Err(Error::config("omega0", "must be finite"));
        }
        if let Some(t) = self.t_max {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::config("t_max", format!("must be finite and > 0, got {t}")));
            }
        }
        let (n, _) = self.resolved_steps()?;
        if n == 0 {
            let field = if self.t_max.is_some() { "t_max" } else { "n_steps" };
            return Err(Error::config(field, "horizon must contain at least one step"));
        }
        if self.beta.norm_sqr().is_nan() || self.beta.norm_sqr() > 1.0 + 1e-15 {
            return Err(Error::config(
                "beta",
                format!("|beta| must be <= 1, got {}", self.beta.norm()),
            ));
        }
        match self.representation {
            Representation::SingleExcitation => {}
            Representation::MirrorRecursion => match self.mirror_delay_steps() {
                None => {
                    return Err(Error::config(
                        "representation",
                        "mirror_recursion requires a mirror coupling",
                    ))
                }
                Some(0) => {
                    return Err(Error::config(
                        "representation",
                        "mirror_recursion requires tau / dt to round to d >= 1",
                    ))
                }
                Some(_) => {}
            },
            Representation::FullFock { n_max, window } => {
                if n_max == 0 {
                    return Err(Error::config("representation.n_max", "must be >= 1"));
                }
                let weights = collision_weights(&self.coupling.time_kernel(), self.dt, n)
                    .map_err(|e| Error::config("coupling", e.to_string()))?;
                let need = weights.max_lag() + 1;
                if window < need {
                    return Err(Error::config(
                        "representation.window",
                        format!("kernel spans {need} ancillas per step, window is {window}"),
                    ));
                }
            }
        }
        if let Some(c) = &self.converge {
            if c.dt_list.is_empty() {
                return Err(Error::config("converge.dt_list", "must not be empty"));
            }
            if let Some(bad) = c.dt_list.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
                return Err(Error::config("converge.dt_list", format!("entries must be > 0, got {bad}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIRROR: &str = r#"
dt = 0.125
t_max = 4.0

[coupling]
kind = "mirror"
gamma = 0.5
phi = 0.0
tau = 1.0
"#;

    #[test]
    fn parses_minimal_mirror() {
        let cfg = SimulationConfig::from_toml_str(MIRROR).unwrap();
        assert_eq!(cfg.mirror_delay_steps(), Some(8));
        assert_eq!(cfg.resolved_steps().unwrap().0, 32);
        assert_eq!(cfg.stepper, StepperKind::ExactExponential);
        assert_eq!(cfg.beta, Complex64::new(1.0, 0.0));
        assert_eq!(cfg.representation, Representation::SingleExcitation);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("gama = 1.0\n{MIRROR}");
        let err = SimulationConfig::from_toml_str(&text).unwrap_err();
        assert!(err.is_config());
        assert!(err.to_string().contains("gama"), "{err}");

        let text = MIRROR.replace("tau = 1.0", "tau = 1.0\ntua = 2.0");
        assert!(SimulationConfig::from_toml_str(&text).unwrap_err().is_config());
    }

    #[test]
    fn invalid_values_name_their_field() {
        let err = SimulationConfig::from_toml_str(&MIRROR.replace("dt = 0.125", "dt = -0.1")).unwrap_err();
        assert!(matches!(&err, Error::Config { field, .. } if field == "dt"), "{err}");

        let both = MIRROR.replace("t_max = 4.0", "t_max = 4.0\nn_steps = 3");
        let err = SimulationConfig::from_toml_str(&both).unwrap_err();
        assert!(matches!(&err, Error::Config { field, .. } if field == "n_steps"));

        let beta = format!("beta = [0.9, 0.9]\n{MIRROR}");
        let err = SimulationConfig::from_toml_str(&beta).unwrap_err();
        assert!(matches!(&err, Error::Config { field, .. } if field == "beta"));

        let neg = MIRROR.replace("tau = 1.0", "tau = -1.0");
        assert!(SimulationConfig::from_toml_str(&neg).unwrap_err().is_config());
    }

    #[test]
    fn representation_must_match_coupling() {
        let white = SimulationConfig::new(CouplingSpec::white(1.0).unwrap(), 0.0, 0.1, 10)
            .with_representation(Representation::MirrorRecursion);
        assert!(white.validate().is_err());

        let short = SimulationConfig::new(CouplingSpec::mirror(1.0, 0.0, 0.01).unwrap(), 0.0, 0.1, 10)
            .with_representation(Representation::MirrorRecursion);
        assert!(short.validate().is_err());

        let narrow = SimulationConfig::new(CouplingSpec::mirror(1.0, 0.0, 0.4).unwrap(), 0.0, 0.1, 10)
            .with_representation(Representation::FullFock { n_max: 1, window: 4 });
        let err = narrow.validate().unwrap_err();
        assert!(matches!(&err, Error::Config { field, .. } if field == "representation.window"));
        let wide = narrow.with_representation(Representation::FullFock { n_max: 1, window: 5 });
        wide.validate().unwrap();
    }

    #[test]
    fn t_max_rounds_down() {
        let cfg = SimulationConfig::new(CouplingSpec::white(1.0).unwrap(), 0.0, 0.3, 1).with_t_max(1.0);
        let (n, note) = cfg.resolved_steps().unwrap();
        assert_eq!(n, 3);
        assert!(note.unwrap().contains("n_steps = 3"));
        let exact = SimulationConfig::new(CouplingSpec::white(1.0).unwrap(), 0.0, 1e-3, 1).with_t_max(5.0);
        assert_eq!(exact.resolved_steps().unwrap().0, 5000);
    }

    #[test]
    fn round_trip_full_config() {
        let text = r#"
omega0 = 1.5
dt = 0.05
n_steps = 40
stepper = "second_order"
beta = [0.6, 0.0]
rotating_frame = true

[coupling]
kind = "custom"
gamma = 0.7
deltas = [{ lag = 0.0, weight = [1.0, 0.0] }, { lag = 0.2, weight = [0.0, -0.5] }]

[[coupling.smooth]]
kind = "exponential"
rate = 2.0
weight = [2.0, 0.0]
cutoff = 0.5

[representation]
kind = "full_fock"
n_max = 1
window = 15

[output]
dir = "out"

[converge]
dt_list = [0.05, 0.025]
"#;
        let cfg = SimulationConfig::from_toml_str(text).unwrap();
        let again = SimulationConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.to_toml_string(), again.to_toml_string());
    }
}
