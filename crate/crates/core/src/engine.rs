// Copyright 2026 The colcm Authors
// SPDX-License-Identifier: Apache-2.0

//! Collision plans and steppers.
//!
//! Step `n` (n = 1, 2, ...) covers `[t_{n-1}, t_n]` and couples the system to
//! ancilla `n - l` with strength `g(l)` for every stored lag `l`. Ancillas
//! with label `<= 0` are time bins from before the start of the run; they
//! are in vacuum when they first collide.

use std::fmt::Write as _;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{Representation, SimulationConfig};
use crate::error::{Error, Result};
use crate::kernel::{collision_weights, coupling_strengths, CouplingShape, WeightMatrix};
use crate::linalg::propagator;
use crate::state::{init_single_excitation, SingleExcitationState, TruncatedFockState};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// How each collision unitary is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepperKind {
    /// exp(-i (H_S + V_n) dt), exactly unitary.
    #[default]
    ExactExponential,
    /// `1 - i (H_S + V_n) dt - V_n^2 dt^2 / 2`.
    SecondOrder,
}

/// One system-ancilla coupling within a step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Collision {
    pub ancilla: i64,
    pub strength: Complex64,
}

/// Stationary schedule of collisions.
#[derive(Clone, Debug, PartialEq)]
pub struct CollisionPlan {
    dt: f64,
    omega0: f64,
    n_steps: usize,
    couplings: Vec<(usize, Complex64)>,
}

/// Plan the collisions for `n_steps` steps from scaled strengths.
///
/// Lags with zero strength are dropped.
pub fn build_plan(strengths: &WeightMatrix, omega0: f64, n_steps: usize) -> CollisionPlan {
    CollisionPlan {
        dt: strengths.dt(),
        omega0,
        n_steps,
        couplings: strengths
            .iter()
            .filter(|(_, g)| *g != Complex64::new(0.0, 0.0))
            .collect(),
    }
}

impl CollisionPlan {
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Nonzero `(lag, g)` pairs in increasing lag order.
    pub fn couplings(&self) -> &[(usize, Complex64)] {
        &self.couplings
    }

    /// Largest lag with nonzero strength.
    pub fn max_lag(&self) -> usize {
        self.couplings.last().map_or(0, |c| c.0)
    }

    /// Ancillas touched at step `n`, newest first.
    pub fn collisions(&self, n: usize) -> impl Iterator<Item = Collision> + '_ {
        self.couplings.iter().map(move |&(l, g)| Collision {
            ancilla: n as i64 - l as i64,
            strength: g,
        })
    }

    /// Restricted Hamiltonian on span{|e,vac>, |g,1_m> for touched m}.
    fn restricted_hamiltonian(&self) -> DMatrix<Complex64> {
        let dim = 1 + self.couplings.len();
        let mut h = DMatrix::zeros(dim, dim);
        h[(0, 0)] = Complex64::new(self.omega0, 0.0);
        for (k, &(_, g)) in self.couplings.iter().enumerate() {
            h[(k + 1, 0)] = g;
            h[(0, k + 1)] = g.conj();
        }
        h
    }
}

/// Advances [`SingleExcitationState`]s along a plan.
///
/// The plan is stationary, so the restricted propagator is built once.
#[derive(Clone, Debug)]
pub struct SingleExcitationStepper {
    plan: CollisionPlan,
    kind: StepperKind,
    propagator: Option<DMatrix<Complex64>>,
    slots: Vec<usize>,
    scratch: Vec<Complex64>,
}

impl SingleExcitationStepper {
    pub fn new(plan: CollisionPlan, kind: StepperKind) -> Self {
        let propagator = match kind {
            StepperKind::ExactExponential => Some(propagator(&plan.restricted_hamiltonian(), plan.dt)),
            StepperKind::SecondOrder => None,
        };
        let m = plan.couplings.len();
        Self {
            plan,
            kind,
            propagator,
            slots: Vec::with_capacity(m),
            scratch: Vec::with_capacity(m + 1),
        }
    }

    pub fn plan(&self) -> &CollisionPlan {
        &self.plan
    }

    /// Apply collision `n`; the state must have completed `n - 1` steps.
    pub fn step(&mut self, state: &mut SingleExcitationState, n: usize) -> Result<()> {
        if n == 0 || state.step() + 1 != n {
            return Err(Error::Internal(format!(
                "state is at step {} but collision {n} was requested",
                state.step()
            )));
        }
        self.slots.clear();
        for col in self.plan.collisions(n) {
            let slot = state.slot(col.ancilla).ok_or_else(|| {
                Error::Internal(format!("ancilla {} is not stored in the state", col.ancilla))
            })?;
            self.slots.push(slot);
        }
        let (eps, c) = state.amplitudes_mut();
        match self.kind {
            StepperKind::ExactExponential => {
                let u = self.propagator.as_ref().expect("built with the stepper");
                self.scratch.clear();
                self.scratch.push(*eps);
                self.scratch.extend(self.slots.iter().map(|&s| c[s]));
                let dim = self.scratch.len();
                let mut out = [Complex64::new(0.0, 0.0)];
                for i in 0..dim {
                    out[0] = Complex64::new(0.0, 0.0);
                    for j in 0..dim {
                        out[0] += u[(i, j)] * self.scratch[j];
                    }
                    if i == 0 {
                        *eps = out[0];
                    } else {
                        c[self.slots[i - 1]] = out[0];
                    }
                }
            }
            StepperKind::SecondOrder => {
                let dt = self.plan.dt;
                let e0 = *eps;
                // Σ_m conj(g_m) c_m  and  Σ_m |g_m|^2
                let mut back = Complex64::new(0.0, 0.0);
                let mut rate = 0.0;
                for (&(_, g), &s) in self.plan.couplings.iter().zip(&self.slots) {
                    back += g.conj() * c[s];
                    rate += g.norm_sqr();
                }
                *eps = e0 - I * dt * (self.plan.omega0 * e0 + back) - 0.5 * dt * dt * rate * e0;
                for (&(_, g), &s) in self.plan.couplings.iter().zip(&self.slots) {
                    c[s] += -I * dt * g * e0 - 0.5 * dt * dt * g * back;
                }
            }
        }
        state.advance();
        Ok(())
    }
}

/// Single collision on the single-excitation sector.
///
/// Convenience wrapper; loops should keep a [`SingleExcitationStepper`].
pub fn step_single_excitation(
    state: &mut SingleExcitationState,
    plan: &CollisionPlan,
    n: usize,
    kind: StepperKind,
) -> Result<()> {
    state.reserve_history(plan.max_lag());
    state.reserve_to(n as i64);
    SingleExcitationStepper::new(plan.clone(), kind).step(state, n)
}

/// Dense `H_S + V_n` on the active window of a Fock register.
fn fock_hamiltonian(state: &TruncatedFockState, plan: &CollisionPlan, n: usize) -> Result<DMatrix<Complex64>> {
    let dim = state.dimension();
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    let mut touched = Vec::new();
    for col in plan.collisions(n) {
        let pos = state.position(col.ancilla).ok_or_else(|| {
            Error::domain(format!("ancilla {} is outside the active window", col.ancilla))
        })?;
        touched.push((pos, col.strength));
    }
    for i in 0..dim {
        let (s, occ) = state.decompose(i);
        if s == 1 {
            h[(i, i)] += Complex64::new(plan.omega0, 0.0);
            // b α_m†: |e, k> -> sqrt(k + 1) |g, k + 1>
            for &(pos, g) in &touched {
                if occ[pos] < state.n_max() {
                    let mut up = occ.clone();
                    up[pos] += 1;
                    let j = state.compose(0, &up);
                    let amp = g * ((occ[pos] + 1) as f64).sqrt();
                    h[(j, i)] += amp;
                    h[(i, j)] += amp.conj();
                }
            }
        }
    }
    Ok(h)
}

/// Exact collision `n` on a truncated Fock register.
pub fn step_full(state: &mut TruncatedFockState, plan: &CollisionPlan, n: usize) -> Result<()> {
    let h = fock_hamiltonian(state, plan, n)?;
    let u = propagator(&h, plan.dt);
    let psi = nalgebra::DVector::from_column_slice(state.amplitudes());
    let next = u * psi;
    state.amplitudes_mut().copy_from_slice(next.as_slice());
    state.advance();
    Ok(())
}

/// Drives a [`TruncatedFockState`] with a sliding window of modes.
///
/// Before step `n` every ancilla the step touches is made active (in vacuum
/// if new); afterwards ancillas that no later step can reach are traced out.
#[derive(Clone, Debug)]
pub struct FockStepper {
    plan: CollisionPlan,
    window: usize,
}

impl FockStepper {
    pub fn new(plan: CollisionPlan, window: usize) -> Self {
        Self { plan, window }
    }

    pub fn step(&self, state: &mut TruncatedFockState, n: usize) -> Result<()> {
        let mut needed: Vec<i64> = self.plan.collisions(n).map(|c| c.ancilla).collect();
        needed.sort_unstable();
        for m in needed {
            if state.position(m).is_none() {
                state.add_mode(m)?;
            }
        }
        if state.active_modes().len() > self.window {
            return Err(Error::domain(format!(
                "step {n} needs {} active modes, window is {}",
                state.active_modes().len(),
                self.window
            )));
        }
        step_full(state, &self.plan, n)?;
        let oldest_reachable = n as i64 + 1 - self.plan.max_lag() as i64;
        let stale: Vec<i64> = state
            .active_modes()
            .iter()
            .copied()
            .filter(|&m| m < oldest_reachable)
            .collect();
        for m in stale {
            state.retire_mode(m)?;
        }
        Ok(())
    }
}

/// Literal mirror recursion with a ring buffer of the last `d` ancillas.
///
/// Each ancilla meets the system twice, at steps `m` and `m + d`, and its
/// amplitude is frozen in between, so only `d` amplitudes are live. After
/// the second collision the ancilla's weight moves to `retired`.
#[derive(Clone, Debug)]
pub struct MirrorRecursion {
    gamma: f64,
    phi: f64,
    d: usize,
    omega0: f64,
    dt: f64,
    a_vac: Complex64,
    eps: Complex64,
    ring: Vec<Complex64>,
    retired: f64,
    step: usize,
}

impl MirrorRecursion {
    pub fn new(
        gamma: f64,
        phi: f64,
        d: usize,
        omega0: f64,
        dt: f64,
        beta: Complex64,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::domain(
                "mirror recursion needs d >= 1; use the merged-delta plan for d = 0",
            ));
        }
        if !(gamma.is_finite() && gamma >= 0.0) || !(dt.is_finite() && dt > 0.0) {
            return Err(Error::domain("gamma must be >= 0 and dt > 0"));
        }
        let init = init_single_excitation(0, beta)?;
        Ok(Self {
            gamma,
            phi,
            d,
            omega0,
            dt,
            a_vac: init.a_vac(),
            eps: init.eps(),
            ring: vec![Complex64::new(0.0, 0.0); d],
            retired: 0.0,
            step: 0,
        })
    }

    pub fn eps(&self) -> Complex64 {
        self.eps
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    /// Amplitude of ancilla `m` if it is still live.
    pub fn c(&self, m: i64) -> Complex64 {
        let n = self.step as i64;
        if m > n || m <= n - self.d as i64 {
            return Complex64::new(0.0, 0.0);
        }
        self.ring[m.rem_euclid(self.d as i64) as usize]
    }

    pub fn norm(&self) -> f64 {
        (self.a_vac.norm_sqr()
            + self.eps.norm_sqr()
            + self.ring.iter().map(|c| c.norm_sqr()).sum::<f64>()
            + self.retired)
            .sqrt()
    }

    /// Collision `step + 1`: couples ancillas `n` (fresh) and `n - d`.
    pub fn step(&mut self) {
        let n = self.step + 1;
        let dt = self.dt;
        let root = (self.gamma * dt).sqrt();
        let feedback = Complex64::from_polar(1.0, self.phi);
        let slot = n % self.d;
        let old = self.ring[slot]; // c_{n-d}; zero for pre-history ancillas
        let e = self.eps;

        self.eps = e - (I * self.omega0 + self.gamma) * dt * e + I * root * feedback * old;
        let fresh = -I * root * e + 0.5 * self.gamma * dt * feedback * old;
        let second = old * (1.0 - 0.5 * self.gamma * dt) + I * root * feedback.conj() * e;

        self.retired += second.norm_sqr();
        self.ring[slot] = fresh;
        self.step = n;
    }
}

/// Free-function form of [`MirrorRecursion::step`] for step `n`.
pub fn mirror_recursion_step(state: &mut MirrorRecursion, n: usize) -> Result<()> {
    if state.step + 1 != n {
        return Err(Error::Internal(format!(
            "recursion is at step {} but step {n} was requested",
            state.step
        )));
    }
    state.step();
    Ok(())
}

/// Per-step record of a run, `n = 0 ..= n_steps`.
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub n: Vec<usize>,
    pub t: Vec<f64>,
    pub eps: Vec<Complex64>,
    pub pop_e: Vec<f64>,
    pub norm: Vec<f64>,
    /// Seconds since the start of the run, per step.
    pub wall_time: Vec<f64>,
    pub config: SimulationConfig,
    pub notes: Vec<String>,
}

/// Final values and bookkeeping of a trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectorySummary {
    pub n_steps: usize,
    pub t_final: f64,
    pub re_eps_final: f64,
    pub im_eps_final: f64,
    pub abs_eps_final: f64,
    pub pop_e_final: f64,
    pub norm_final: f64,
    pub max_norm_drift: f64,
    pub wall_time_s: f64,
    pub notes: Vec<String>,
    pub config: SimulationConfig,
}

impl Trajectory {
    fn with_capacity(config: &SimulationConfig, n: usize) -> Self {
        Self {
            n: Vec::with_capacity(n + 1),
            t: Vec::with_capacity(n + 1),
            eps: Vec::with_capacity(n + 1),
            pop_e: Vec::with_capacity(n + 1),
            norm: Vec::with_capacity(n + 1),
            wall_time: Vec::with_capacity(n + 1),
            config: config.clone(),
            notes: Vec::new(),
        }
    }

    fn record(&mut self, n: usize, dt: f64, eps: Complex64, norm: f64, started: Instant) {
        self.n.push(n);
        self.t.push(n as f64 * dt);
        self.eps.push(eps);
        self.pop_e.push(eps.norm_sqr());
        self.norm.push(norm);
        self.wall_time.push(started.elapsed().as_secs_f64());
    }

    pub fn len(&self) -> usize {
        self.n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n.is_empty()
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norm.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max)
    }

    /// CSV with columns `n,t,re_eps,im_eps,abs_eps,pop_e,norm`.
    pub fn to_csv(&self) -> String {
        use crate::fmt_f64 as f;
        let mut out = String::from("n,t,re_eps,im_eps,abs_eps,pop_e,norm\n");
        for i in 0..self.len() {
            let e = self.eps[i];
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                self.n[i],
                f(self.t[i]),
                f(e.re),
                f(e.im),
                f(e.norm()),
                f(self.pop_e[i]),
                f(self.norm[i])
            );
        }
        out
    }

    pub fn summary(&self) -> TrajectorySummary {
        let last = self.len() - 1;
        let e = self.eps[last];
        TrajectorySummary {
            n_steps: self.n[last],
            t_final: self.t[last],
            re_eps_final: e.re,
            im_eps_final: e.im,
            abs_eps_final: e.norm(),
            pop_e_final: self.pop_e[last],
            norm_final: self.norm[last],
            max_norm_drift: self.max_norm_drift(),
            wall_time_s: self.wall_time[last],
            notes: self.notes.clone(),
            config: self.config.clone(),
        }
    }
}

/// Simulate the configured collision model.
pub fn run(config: &SimulationConfig) -> Result<Trajectory> {
    config.validate()?;
    let (n_steps, note) = config.resolved_steps()?;
    let dt = config.dt;
    let gamma = config.coupling.gamma();

    // In the rotating frame the free phase moves onto the lag weights,
    // g(l) -> g(l) e^{-i ω0 l dt}, and is restored on output.
    let (omega0, frame) = if config.rotating_frame {
        (0.0, config.omega0)
    } else {
        (config.omega0, 0.0)
    };

    let weights = collision_weights(&config.coupling.time_kernel(), dt, n_steps)?;
    let mut strengths = coupling_strengths(&weights, gamma)?;
    if frame != 0.0 {
        strengths = rephase(&strengths, frame);
    }
    let plan = build_plan(&strengths, omega0, n_steps);

    let mut traj = Trajectory::with_capacity(config, n_steps);
    traj.notes.extend(note);
    traj.notes.extend(weights.warnings().iter().map(|w| w.to_string()));
    let lab = |n: usize, e: Complex64| e * Complex64::from_polar(1.0, -frame * n as f64 * dt);
    let started = Instant::now();

    match config.representation {
        Representation::SingleExcitation => {
            let mut state = init_single_excitation(n_steps, config.beta)?;
            state.reserve_history(plan.max_lag());
            let mut stepper = SingleExcitationStepper::new(plan, config.stepper);
            traj.record(0, dt, lab(0, state.eps()), state.norm(), started);
            for n in 1..=n_steps {
                stepper.step(&mut state, n)?;
                traj.record(n, dt, lab(n, state.eps()), state.norm(), started);
            }
        }
        Representation::FullFock { n_max, window } => {
            if config.stepper != StepperKind::ExactExponential {
                traj.notes
                    .push("full_fock always applies the exact exponential".to_string());
            }
            let init = init_single_excitation(0, config.beta)?;
            let mut state = TruncatedFockState::new(n_max, init.a_vac(), init.eps())?;
            let stepper = FockStepper::new(plan, window);
            traj.record(0, dt, lab(0, state.eps()), state.norm(), started);
            for n in 1..=n_steps {
                stepper.step(&mut state, n)?;
                traj.record(n, dt, lab(n, state.eps()), state.norm(), started);
            }
        }
        Representation::MirrorRecursion => {
            let CouplingShape::Mirror { phi, .. } = config.coupling.shape() else {
                return Err(Error::config("representation", "mirror_recursion requires a mirror coupling"));
            };
            let d = config.mirror_delay_steps().unwrap_or(0);
            if config.stepper != StepperKind::SecondOrder {
                traj.notes
                    .push("mirror_recursion always applies the second-order update".to_string());
            }
            let phase = phi + frame * d as f64 * dt;
            let mut state = MirrorRecursion::new(gamma, phase, d, omega0, dt, config.beta)?;
            traj.record(0, dt, lab(0, state.eps()), state.norm(), started);
            for n in 1..=n_steps {
                state.step();
                traj.record(n, dt, lab(n, state.eps()), state.norm(), started);
            }
        }
    }
    Ok(traj)
}

fn rephase(strengths: &WeightMatrix, omega0: f64) -> WeightMatrix {
    let dt = strengths.dt();
    strengths.map_lags(|l, g| g * Complex64::from_polar(1.0, -omega0 * l as f64 * dt))
}
