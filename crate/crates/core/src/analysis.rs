// Copyright 2026 The colcm Authors
// SPDX-License-Identifier: Apache-2.0

//! CP-divisibility diagnostics for the vacuum single-excitation channel family.
//!
//! With the bath starting in vacuum, the reduced qubit map from time 0 to
//! `t_n` depends on one complex number `G = ε(t_n) / ε(0)`:
//!
//! ```text
//! ρ_ee -> |G|² ρ_ee,   ρ_ge -> G* ρ_ge,   ρ_gg -> ρ_gg + (1 - |G|²) ρ_ee.
//! ```
//!
//! The intermediate map from `t_n` to `t_{n+1}` belongs to the same family
//! with `G = G_{n+1} / G_n`. It is completely positive iff `|G| <= 1`, which
//! is checked both directly and through the Choi matrix.

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::engine::Trajectory;
use crate::error::{Error, Result};
use crate::state::QubitDensityMatrix;

/// Slack on `1 - |G|²` (and on the smallest Choi eigenvalue) before a map is
/// declared not completely positive.
pub const CP_TOL: f64 = 1e-12;

/// Largest `|G| - 1` accepted by [`channel_from_amplitude`].
pub const AMPLITUDE_TOL: f64 = 1e-9;

/// Amplitude-damping-type channel with decoherence factor `g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitChannel {
    g: Complex64,
}

pub fn channel_from_amplitude(g: Complex64) -> Result<QubitChannel> {
    if g.norm().is_nan() || g.norm() > 1.0 + AMPLITUDE_TOL {
        return Err(Error::domain(format!(
            "|G| = {} exceeds 1; the map is not completely positive",
            g.norm()
        )));
    }
    Ok(QubitChannel { g })
}

// Basis order (|e>, |g>); vec(ρ) = (ρ_ee, ρ_eg, ρ_ge, ρ_gg).
fn superoperator_of(g: Complex64) -> Matrix4<Complex64> {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let p = Complex64::new(g.norm_sqr(), 0.0);
    Matrix4::new(
        p, z, z, z, //
        z, g, z, z, //
        z, z, g.conj(), z, //
        one - p, z, z, one,
    )
}

// J = Σ_ij |i><j| ⊗ Φ(|i><j|), row (i, a), column (j, b).
fn choi_of(g: Complex64) -> Matrix4<Complex64> {
    let s = superoperator_of(g);
    let mut j = Matrix4::zeros();
    for i in 0..2 {
        for jj in 0..2 {
            // Φ(|i><jj|) is column (2 i + jj) of the superoperator.
            let col = 2 * i + jj;
            for a in 0..2 {
                for b in 0..2 {
                    j[(2 * i + a, 2 * jj + b)] = s[(2 * a + b, col)];
                }
            }
        }
    }
    j
}

fn hermitian_eigenvalues(m: Matrix4<Complex64>) -> [f64; 4] {
    let eig = SymmetricEigen::new(m);
    let mut v = [
        eig.eigenvalues[0],
        eig.eigenvalues[1],
        eig.eigenvalues[2],
        eig.eigenvalues[3],
    ];
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

impl QubitChannel {
    pub fn amplitude(&self) -> Complex64 {
        self.g
    }

    /// Identity channel.
    pub fn identity() -> Self {
        Self {
            g: Complex64::new(1.0, 0.0),
        }
    }

    pub fn apply(&self, rho: &QubitDensityMatrix) -> QubitDensityMatrix {
        let p = self.g.norm_sqr();
        QubitDensityMatrix::from_entries(
            p * rho.rho_ee(),
            rho.rho_gg() + (1.0 - p) * rho.rho_ee(),
            self.g.conj() * rho.rho_ge(),
        )
    }

    /// Matrix acting on `(ρ_ee, ρ_eg, ρ_ge, ρ_gg)`.
    pub fn superoperator(&self) -> Matrix4<Complex64> {
        superoperator_of(self.g)
    }

    pub fn choi(&self) -> Matrix4<Complex64> {
        choi_of(self.g)
    }

    /// Choi eigenvalues in increasing order.
    pub fn choi_eigenvalues(&self) -> [f64; 4] {
        hermitian_eigenvalues(self.choi())
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &QubitChannel) -> QubitChannel {
        QubitChannel {
            g: self.g * first.g,
        }
    }
}

/// Map between two times of the same trajectory, possibly not CP.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntermediateMap {
    ratio: Complex64,
}

impl IntermediateMap {
    pub fn ratio(&self) -> Complex64 {
        self.ratio
    }

    /// CP by the contraction test `|G| <= 1`.
    pub fn is_cp(&self) -> bool {
        1.0 - self.ratio.norm_sqr() >= -CP_TOL
    }

    pub fn choi(&self) -> Matrix4<Complex64> {
        choi_of(self.ratio)
    }

    pub fn choi_min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(self.choi())[0]
    }

    /// CP by positivity of the Choi matrix.
    pub fn is_cp_by_choi(&self) -> bool {
        self.choi_min_eigenvalue() >= -CP_TOL
    }

    /// The map as a channel, when it is one.
    pub fn channel(&self) -> Option<QubitChannel> {
        self.is_cp().then_some(QubitChannel { g: self.ratio })
    }
}

pub fn intermediate_map(g_from: Complex64, g_to: Complex64) -> Result<IntermediateMap> {
    if g_from == Complex64::new(0.0, 0.0) {
        return Err(Error::Singular(
            "amplitude vanished; the intermediate map is undefined".to_string(),
        ));
    }
    Ok(IntermediateMap {
        ratio: g_to / g_from,
    })
}

/// A run of consecutive non-CP steps `n_start ..= n_end`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RevivalInterval {
    pub n_start: usize,
    pub n_end: usize,
    /// `|ε|²` gained over the interval.
    pub gained: f64,
}

/// Per-step divisibility flags and the revival witness.
///
/// `cp[k]` refers to collision step `n = k + 1`, the map from `t_{n-1}` to
/// `t_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivisibilityReport {
    pub cp: Vec<bool>,
    pub first_not_cp_step: Option<usize>,
    pub intervals: Vec<RevivalInterval>,
    /// Σ over non-CP steps of `|ε_n|² - |ε_{n-1}|²`.
    pub witness: f64,
    /// Step at which ε vanished, if the analysis had to stop there.
    pub truncated_at: Option<usize>,
    pub note: Option<String>,
}

/// Flags, revivals and witness from a sequence `ε_0, ε_1, ...`.
pub fn analyze_amplitudes(eps: &[Complex64]) -> Result<DivisibilityReport> {
    let Some(&e0) = eps.first() else {
        return Err(Error::domain("trajectory is empty"));
    };
    if e0 == Complex64::new(0.0, 0.0) {
        return Err(Error::Singular(
            "initial amplitude is zero; G = ε_n / ε_0 is undefined".to_string(),
        ));
    }
    let mut report = DivisibilityReport {
        cp: Vec::with_capacity(eps.len().saturating_sub(1)),
        first_not_cp_step: None,
        intervals: Vec::new(),
        witness: 0.0,
        truncated_at: None,
        note: None,
    };
    let mut open: Option<RevivalInterval> = None;
    for n in 1..eps.len() {
        let from = eps[n - 1] / e0;
        let to = eps[n] / e0;
        let map = match intermediate_map(from, to) {
            Ok(m) => m,
            Err(_) => {
                report.truncated_at = Some(n - 1);
                report.note = Some(format!(
                    "ε vanished at step {}; later intermediate maps are undefined",
                    n - 1
                ));
                break;
            }
        };
        let cp = map.is_cp();
        report.cp.push(cp);
        if cp {
            if let Some(iv) = open.take() {
                report.intervals.push(iv);
            }
            continue;
        }
        let gain = eps[n].norm_sqr() - eps[n - 1].norm_sqr();
        report.witness += gain;
        report.first_not_cp_step.get_or_insert(n);
        match open.as_mut() {
            Some(iv) => {
                iv.n_end = n;
                iv.gained += gain;
            }
            None => {
                open = Some(RevivalInterval {
                    n_start: n,
                    n_end: n,
                    gained: gain,
                })
            }
        }
    }
    if let Some(iv) = open {
        report.intervals.push(iv);
    }
    Ok(report)
}

pub fn analyze(trajectory: &Trajectory) -> Result<DivisibilityReport> {
    analyze_amplitudes(&trajectory.eps)
}
