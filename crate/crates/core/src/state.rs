// Copyright 2026 The colcm Authors
// SPDX-License-Identifier: Apache-2.0

//! Joint system + ancilla states.
//!
//! Two representations are provided:
//!
//! * [`SingleExcitationState`]: the exact number-conserving sector spanned by
//!   `|g, vac>`, `|e, vac>` and `|g, 1_m>`. This is all a vacuum-initial
//!   two-level emitter ever explores.
//! * [`TruncatedFockState`]: a brute-force state vector over the qubit and a
//!   sliding window of bosonic modes truncated at `n_max` photons, used as an
//!   independent oracle.
//!
//! Ancillas are labelled by the step at which they first pass the system.
//! Labels `m <= 0` are time bins from before `t = 0`; they start in vacuum.

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Amplitudes `(a_vac, eps, {c_m})` of a state in the single-excitation sector
/// plus the dark vacuum component.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleExcitationState {
    a_vac: Complex64,
    eps: Complex64,
    step: usize,
    /// Label of the ancilla stored at `c[0]`.
    first: i64,
    c: Vec<Complex64>,
}

/// Prepare `sqrt(1 - |beta|^2) |g, vac> + beta |e, vac>` with room for
/// `n_steps` collisions.
pub fn init_single_excitation(n_steps: usize, beta: Complex64) -> Result<SingleExcitationState> {
    let b2 = beta.norm_sqr();
    if !(b2.is_finite() && b2 <= 1.0 + 1e-15) {
        return Err(Error::domain(format!("|beta| must be <= 1, got {}", beta.norm())));
    }
    Ok(SingleExcitationState {
        a_vac: Complex64::new((1.0 - b2).max(0.0).sqrt(), 0.0),
        eps: beta,
        step: 0,
        first: 1,
        c: vec![ZERO; n_steps],
    })
}

impl SingleExcitationState {
    /// Build a state from explicit amplitudes after `step` collisions.
    ///
    /// Ancillas with label above `step` must be absent (they have not collided).
    pub fn from_amplitudes(
        a_vac: Complex64,
        eps: Complex64,
        step: usize,
        ancillas: &[(i64, Complex64)],
    ) -> Result<Self> {
        let first = ancillas.iter().map(|a| a.0).min().unwrap_or(1).min(1);
        let last = step as i64;
        let mut c = vec![ZERO; (last - first + 1).max(0) as usize];
        for &(m, amp) in ancillas {
            if m > last {
                if amp != ZERO {
                    return Err(Error::domain(format!(
                        "ancilla {m} has not collided by step {step} and must be empty"
                    )));
                }
                continue;
            }
            c[(m - first) as usize] += amp;
        }
        Ok(Self {
            a_vac,
            eps,
            step,
            first,
            c,
        })
    }

    pub fn a_vac(&self) -> Complex64 {
        self.a_vac
    }

    pub fn eps(&self) -> Complex64 {
        self.eps
    }

    /// Number of collisions applied so far.
    pub fn step(&self) -> usize {
        self.step
    }

    /// Amplitude of one photon in ancilla `m` (zero if never stored).
    pub fn c(&self, m: i64) -> Complex64 {
        let idx = m - self.first;
        if idx < 0 {
            return ZERO;
        }
        self.c.get(idx as usize).copied().unwrap_or(ZERO)
    }

    /// Labels covered by the amplitude store.
    pub fn ancilla_range(&self) -> std::ops::RangeInclusive<i64> {
        self.first..=self.first + self.c.len() as i64 - 1
    }

    /// Nonzero ancilla amplitudes in label order.
    pub fn occupied(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let first = self.first;
        self.c
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != ZERO)
            .map(move |(i, a)| (first + i as i64, *a))
    }

    /// Make room for pre-history ancillas down to label `1 - lag`.
    pub(crate) fn reserve_history(&mut self, lag: usize) {
        let lowest = 1 - lag as i64;
        if lowest < self.first {
            let extra = (self.first - lowest) as usize;
            let mut c = vec![ZERO; extra];
            c.extend_from_slice(&self.c);
            self.c = c;
            self.first = lowest;
        }
    }

    /// Make room for ancillas up to label `m`.
    pub(crate) fn reserve_to(&mut self, m: i64) {
        let need = m - self.first + 1;
        if need > self.c.len() as i64 {
            self.c.resize(need as usize, ZERO);
        }
    }

    pub(crate) fn slot(&self, m: i64) -> Option<usize> {
        let idx = m - self.first;
        (idx >= 0 && (idx as usize) < self.c.len()).then_some(idx as usize)
    }

    pub(crate) fn amplitudes_mut(&mut self) -> (&mut Complex64, &mut [Complex64]) {
        (&mut self.eps, &mut self.c)
    }

    pub(crate) fn advance(&mut self) {
        self.step += 1;
    }

    /// Squared norm.
    pub fn norm_sqr(&self) -> f64 {
        self.a_vac.norm_sqr() + self.eps.norm_sqr() + self.c.iter().map(|a| a.norm_sqr()).sum::<f64>()
    }

    /// 2-norm of the amplitude vector.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Reduced qubit state after tracing out every ancilla.
    pub fn reduced_qubit_state(&self) -> QubitDensityMatrix {
        let ee = self.eps.norm_sqr();
        QubitDensityMatrix::from_entries(ee, 1.0 - ee, self.a_vac * self.eps.conj())
    }
}

/// 2×2 qubit density matrix in the ordered basis `(|e>, |g>)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitDensityMatrix {
    m: [[Complex64; 2]; 2],
}

impl QubitDensityMatrix {
    /// From populations and the `<g|rho|e>` coherence.
    pub fn from_entries(rho_ee: f64, rho_gg: f64, rho_ge: Complex64) -> Self {
        Self {
            m: [
                [Complex64::new(rho_ee, 0.0), rho_ge.conj()],
                [rho_ge, Complex64::new(rho_gg, 0.0)],
            ],
        }
    }

    pub fn from_matrix(m: [[Complex64; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn rho_ee(&self) -> f64 {
        self.m[0][0].re
    }

    pub fn rho_gg(&self) -> f64 {
        self.m[1][1].re
    }

    /// `<g|rho|e>`.
    pub fn rho_ge(&self) -> Complex64 {
        self.m[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        let off = self.m[1][0].norm();
        let mean = 0.5 * (a + d);
        let r = (0.25 * (a - d) * (a - d) + off * off).sqrt();
        [mean - r, mean + r]
    }

    /// Checks Hermiticity, unit trace (1e-12) and positivity (1e-10).
    pub fn validate(&self) -> Result<()> {
        let herm = (self.m[0][1] - self.m[1][0].conj()).norm()
            + self.m[0][0].im.abs()
            + self.m[1][1].im.abs();
        if herm > 1e-12 {
            return Err(Error::domain(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::domain(format!("density matrix trace {tr} != 1")));
        }
        let lo = self.eigenvalues()[0];
        if lo < -1e-10 {
            return Err(Error::domain(format!("density matrix has eigenvalue {lo:e}")));
        }
        Ok(())
    }
}

/// Dense state vector over the qubit and a window of truncated bosonic modes.
///
/// Basis index: `s + 2 · Σ_k n_k (n_max + 1)^k`, with `s = 0` for `|g>`,
/// `s = 1` for `|e>` and `n_k` the occupation of `active_modes[k]`.
///
/// Modes that can no longer couple are traced out. When the traced part is
/// dark (qubit in `|g>` and all other modes empty, which always holds for a
/// vacuum-initial single excitation), the result is exactly the pure
/// remainder plus an incoherent weight on `|g, vac>`, stored per photon
/// number in `retired`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedFockState {
    amplitudes: Vec<Complex64>,
    active_modes: Vec<i64>,
    n_max: usize,
    retired: Vec<f64>,
    step: usize,
}

impl TruncatedFockState {
    /// `|g>` or `|e>` times vacuum, with no active modes.
    pub fn new(n_max: usize, a_vac: Complex64, eps: Complex64) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::domain("n_max must be >= 1"));
        }
        Ok(Self {
            amplitudes: vec![a_vac, eps],
            active_modes: Vec::new(),
            n_max,
            retired: vec![0.0; n_max + 1],
            step: 0,
        })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn active_modes(&self) -> &[i64] {
        &self.active_modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub(crate) fn advance(&mut self) {
        self.step += 1;
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    /// Probability held by traced-out modes.
    pub fn retired_population(&self) -> f64 {
        self.retired.iter().sum()
    }

    fn levels(&self) -> usize {
        self.n_max + 1
    }

    pub fn position(&self, mode: i64) -> Option<usize> {
        self.active_modes.iter().position(|&m| m == mode)
    }

    /// Split a basis index into qubit level and mode occupations.
    pub fn decompose(&self, mut idx: usize) -> (usize, Vec<usize>) {
        let s = idx % 2;
        idx /= 2;
        let lv = self.levels();
        let occ = (0..self.active_modes.len())
            .map(|_| {
                let o = idx % lv;
                idx /= lv;
                o
            })
            .collect();
        (s, occ)
    }

    pub fn compose(&self, s: usize, occ: &[usize]) -> usize {
        let lv = self.levels();
        let mut idx = 0;
        for &o in occ.iter().rev() {
            idx = idx * lv + o;
        }
        s + 2 * idx
    }

    /// Amplitude of `|e, vac>`.
    pub fn eps(&self) -> Complex64 {
        self.amplitudes[1]
    }

    /// Amplitude of `|g, vac>` (coherent part only).
    pub fn a_vac(&self) -> Complex64 {
        self.amplitudes[0]
    }

    /// Append a mode in vacuum. Its digit is the most significant, so the
    /// amplitude vector is only zero-padded.
    pub fn add_mode(&mut self, mode: i64) -> Result<()> {
        if self.position(mode).is_some() {
            return Err(Error::Internal(format!("mode {mode} already active")));
        }
        let new_len = self.amplitudes.len() * self.levels();
        self.amplitudes.resize(new_len, Complex64::new(0.0, 0.0));
        self.active_modes.push(mode);
        Ok(())
    }

    /// Trace out `mode`, keeping the pure remainder where it is empty.
    pub fn retire_mode(&mut self, mode: i64) -> Result<()> {
        let pos = self
            .position(mode)
            .ok_or_else(|| Error::Internal(format!("mode {mode} not active")))?;
        let lv = self.levels();
        let below = 2 * lv.pow(pos as u32);
        let above = self.amplitudes.len() / (below * lv);

        let mut kept = Vec::with_capacity(self.amplitudes.len() / lv);
        let mut retired = vec![0.0; lv];
        for hi in 0..above {
            for (k, gone) in retired.iter_mut().enumerate() {
                for lo in 0..below {
                    let amp = self.amplitudes[lo + below * (k + lv * hi)];
                    if k == 0 {
                        kept.push(amp);
                    } else if amp.norm_sqr() > 0.0 {
                        if hi != 0 || lo != 0 {
                            return Err(Error::Domain(format!(
                                "cannot trace out mode {mode}: remainder is not dark"
                            )));
                        }
                        *gone += amp.norm_sqr();
                    }
                }
            }
        }
        for (acc, r) in self.retired.iter_mut().zip(retired) {
            *acc += r;
        }
        self.amplitudes = kept;
        self.active_modes.remove(pos);
        Ok(())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() + self.retired_population()
    }

    /// 2-norm, counting traced-out weight.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Mean and variance of `N = |e><e| + Σ_m a_m† a_m`.
    pub fn excitation_moments(&self) -> (f64, f64) {
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let (s, occ) = self.decompose(i);
            let n = (s + occ.iter().sum::<usize>()) as f64;
            m1 += p * n;
            m2 += p * n * n;
        }
        for (k, p) in self.retired.iter().enumerate() {
            m1 += p * k as f64;
            m2 += p * (k * k) as f64;
        }
        (m1, m2 - m1 * m1)
    }

    /// Partial trace over all modes.
    pub fn reduced_qubit_state(&self) -> QubitDensityMatrix {
        let mut ee = 0.0;
        let mut gg = self.retired_population();
        let mut ge = Complex64::new(0.0, 0.0);
        for pair in self.amplitudes.chunks_exact(2) {
            gg += pair[0].norm_sqr();
            ee += pair[1].norm_sqr();
            ge += pair[0] * pair[1].conj();
        }
        QubitDensityMatrix::from_entries(ee, gg, ge)
    }

    /// Project onto `|g, vac>`, `|e, vac>` and single photons in active modes.
    ///
    /// Fails if the state has weight outside that subspace.
    pub fn to_single_excitation(&self) -> Result<SingleExcitationState> {
        let mut ancillas = Vec::new();
        for (i, a) in self.amplitudes.iter().enumerate().skip(2) {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (s, occ) = self.decompose(i);
            let total: usize = occ.iter().sum();
            if s != 0 || total != 1 {
                return Err(Error::domain(
                    "state has weight outside the single-excitation sector",
                ));
            }
            let k = occ.iter().position(|&o| o == 1).unwrap();
            ancillas.push((self.active_modes[k], *a));
        }
        SingleExcitationState::from_amplitudes(self.a_vac(), self.eps(), self.step, &ancillas)
    }
}

/// Embed a single-excitation state into a truncated Fock register whose
/// active window holds the `window` most recent ancillas
/// `step + 1 - window ..= step`.
pub fn embed_single_excitation(
    state: &SingleExcitationState,
    n_max: usize,
    window: usize,
) -> Result<TruncatedFockState> {
    let mut fock = TruncatedFockState::new(n_max, state.a_vac(), state.eps())?;
    fock.step = state.step();
    let top = state.step() as i64;
    let lowest = top + 1 - window as i64;
    for (m, _) in state.occupied() {
        if m < lowest || m > top {
            return Err(Error::domain(format!(
                "window of {window} modes does not cover occupied ancilla {m}"
            )));
        }
    }
    for m in lowest..=top {
        fock.add_mode(m)?;
    }
    for (m, amp) in state.occupied() {
        let mut occ = vec![0; fock.active_modes.len()];
        occ[fock.position(m).unwrap()] = 1;
        let idx = fock.compose(0, &occ);
        fock.amplitudes[idx] = amp;
    }
    Ok(fock)
}
