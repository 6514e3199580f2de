// Copyright 2026 The colcm Authors
// SPDX-License-Identifier: Apache-2.0

//! Structural invariants of the collision dynamics and of the channel family
//! used by the divisibility analysis.

mod common;

use colcm::analysis::{analyze_amplitudes, CP_TOL};
use colcm::engine::{step_single_excitation, FockStepper};
use colcm::kernel::{Delta, SmoothTerm};
use colcm::state::SingleExcitationState;
use colcm::{
    build_plan, channel_from_amplitude, collision_weights, coupling_strengths, embed_single_excitation,
    init_single_excitation, intermediate_map, run, CollisionPlan, Complex64, CouplingSpec, Representation,
    SimulationConfig, StepperKind, TruncatedFockState,
};
use proptest::prelude::*;

use common::max_abs_diff;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn amplitude(max: f64) -> impl Strategy<Value = Complex64> {
    (0.0..max, -std::f64::consts::PI..std::f64::consts::PI).prop_map(|(r, a)| Complex64::from_polar(r, a))
}

/// Custom couplings with up to three on-grid deltas and one short smooth tail.
fn coupling(dt: f64) -> impl Strategy<Value = CouplingSpec> {
    (
        0.05f64..2.0,
        prop::collection::vec((0usize..4, amplitude(1.0)), 1..4),
        prop::option::of((0.5f64..4.0, amplitude(1.0), 1usize..3)),
    )
        .prop_map(move |(gamma, deltas, tail)| {
            let deltas = deltas
                .into_iter()
                .map(|(k, weight)| Delta {
                    lag: k as f64 * dt,
                    weight,
                })
                .collect();
            let smooth = tail
                .map(|(rate, weight, k)| SmoothTerm::Exponential {
                    rate,
                    weight,
                    cutoff: k as f64 * dt,
                })
                .into_iter()
                .collect();
            CouplingSpec::custom(gamma, deltas, smooth).unwrap()
        })
}

fn plan_for(spec: &CouplingSpec, omega0: f64, dt: f64, n: usize) -> CollisionPlan {
    let w = collision_weights(&spec.time_kernel(), dt, n).unwrap();
    build_plan(&coupling_strengths(&w, spec.gamma()).unwrap(), omega0, n)
}

const DT: f64 = 0.1;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_stepper_preserves_norm(spec in coupling(DT), omega0 in -3.0f64..3.0, beta in amplitude(1.0)) {
        let cfg = SimulationConfig::new(spec, omega0, DT, 200).with_beta(beta);
        let traj = run(&cfg).unwrap();
        prop_assert!(traj.max_norm_drift() <= 1e-12, "{}", traj.max_norm_drift());
    }

    #[test]
    fn fock_register_matches_single_excitation(
        spec in coupling(DT),
        omega0 in -2.0f64..2.0,
        beta in amplitude(1.0),
        n_max in 1usize..3,
    ) {
        let cfg = SimulationConfig::new(spec, omega0, DT, 12).with_beta(beta);
        let se = run(&cfg).unwrap();
        let max_lag = collision_weights(&cfg.coupling.time_kernel(), DT, 12).unwrap().max_lag();
        let fock = run(&cfg.with_representation(Representation::FullFock { n_max, window: max_lag + 1 })).unwrap();
        prop_assert!(max_abs_diff(&se.eps, &fock.eps) <= 1e-10);
    }

    #[test]
    fn excitation_number_is_conserved(spec in coupling(DT), beta in amplitude(1.0), n_max in 1usize..3) {
        let plan = plan_for(&spec, 0.4, DT, 10);
        let init = init_single_excitation(0, beta).unwrap();
        let mut state = TruncatedFockState::new(n_max, init.a_vac(), init.eps()).unwrap();
        let stepper = FockStepper::new(plan.clone(), plan.max_lag() + 1);
        let b2 = beta.norm_sqr();
        for n in 1..=10 {
            stepper.step(&mut state, n).unwrap();
            let (mean, var) = state.excitation_moments();
            prop_assert!((mean - b2).abs() <= 1e-12, "step {n}: mean {mean}");
            prop_assert!((var - b2 * (1.0 - b2)).abs() <= 1e-12, "step {n}: var {var}");
            prop_assert!((state.norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn untouched_ancillas_are_unchanged(
        spec in coupling(DT),
        kind in prop::sample::select(vec![StepperKind::ExactExponential, StepperKind::SecondOrder]),
        steps in 1usize..15,
    ) {
        let plan = plan_for(&spec, 0.7, DT, steps + 1);
        let mut state = init_single_excitation(steps + 1, c(1.0, 0.0)).unwrap();
        for n in 1..=steps {
            step_single_excitation(&mut state, &plan, n, kind).unwrap();
        }
        let before: Vec<(i64, Complex64)> = state.ancilla_range().map(|m| (m, state.c(m))).collect();
        let n = steps + 1;
        step_single_excitation(&mut state, &plan, n, kind).unwrap();
        let touched: Vec<i64> = plan.collisions(n).map(|col| col.ancilla).collect();
        for (m, amp) in before {
            if !touched.contains(&m) {
                prop_assert_eq!(state.c(m), amp, "ancilla {} moved", m);
            }
        }
    }

    #[test]
    fn vacuum_is_stationary(spec in coupling(DT), omega0 in -3.0f64..3.0, kind in prop::sample::select(vec![StepperKind::ExactExponential, StepperKind::SecondOrder])) {
        let plan = plan_for(&spec, omega0, DT, 20);
        let mut state = init_single_excitation(20, c(0.0, 0.0)).unwrap();
        for n in 1..=20 {
            step_single_excitation(&mut state, &plan, n, kind).unwrap();
        }
        prop_assert_eq!(state.a_vac(), c(1.0, 0.0));
        prop_assert_eq!(state.eps(), c(0.0, 0.0));
        prop_assert_eq!(state.occupied().count(), 0);
    }

    #[test]
    fn embedding_round_trips(
        eps in amplitude(0.5),
        photons in prop::collection::vec(amplitude(0.3), 1..5),
        step in 4usize..20,
        n_max in 1usize..3,
    ) {
        let window = photons.len();
        let ancillas: Vec<(i64, Complex64)> = photons
            .iter()
            .enumerate()
            .map(|(k, &a)| (step as i64 - k as i64, a))
            .collect();
        let norm2: f64 = eps.norm_sqr() + photons.iter().map(|p| p.norm_sqr()).sum::<f64>();
        let a_vac = c((1.0 - norm2).max(0.0).sqrt(), 0.0);
        let se = SingleExcitationState::from_amplitudes(a_vac, eps, step, &ancillas).unwrap();
        let fock = embed_single_excitation(&se, n_max, window).unwrap();
        let back = fock.to_single_excitation().unwrap();
        prop_assert_eq!(back.a_vac(), se.a_vac());
        prop_assert_eq!(back.eps(), se.eps());
        prop_assert_eq!(back.step(), se.step());
        for (m, amp) in &ancillas {
            prop_assert_eq!(back.c(*m), *amp);
        }
        let r1 = se.reduced_qubit_state();
        let r2 = fock.reduced_qubit_state();
        prop_assert!((r1.rho_ee() - r2.rho_ee()).abs() <= 1e-15);
        prop_assert!((r1.rho_ge() - r2.rho_ge()).norm() <= 1e-15);
    }

    #[test]
    fn choi_test_agrees_with_contraction(from in amplitude(1.0), to in amplitude(1.0)) {
        prop_assume!(from.norm() > 1e-6);
        let map = intermediate_map(from, to).unwrap();
        // Stay clear of the boundary where the two tests use different tolerances.
        prop_assume!((map.ratio().norm() - 1.0).abs() > 1e-9);
        prop_assert_eq!(map.is_cp(), map.is_cp_by_choi());
        prop_assert_eq!(map.is_cp(), to.norm() <= from.norm());
    }

    #[test]
    fn channels_compose_multiplicatively(g1 in amplitude(1.0), g2 in amplitude(1.0)) {
        let a = channel_from_amplitude(g1).unwrap();
        let b = channel_from_amplitude(g2).unwrap();
        let direct = channel_from_amplitude(g1 * g2).unwrap();
        let diff = (b.after(&a).superoperator() - direct.superoperator()).camax();
        prop_assert!(diff <= 1e-12);
        let product = b.superoperator() * a.superoperator();
        prop_assert!((product - direct.superoperator()).camax() <= 1e-12);
    }

    #[test]
    fn choi_spectrum_has_closed_form(g in amplitude(1.0)) {
        let ev = channel_from_amplitude(g).unwrap().choi_eigenvalues();
        let mut want = [0.0, 0.0, 1.0 - g.norm_sqr(), 1.0 + g.norm_sqr()];
        want.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(want) {
            prop_assert!((a - b).abs() <= 1e-12, "{:?} vs {:?}", ev, want);
        }
    }

    #[test]
    fn reduced_states_stay_physical(spec in coupling(DT), beta in amplitude(1.0)) {
        let cfg = SimulationConfig::new(spec, 0.3, DT, 40).with_beta(beta);
        let plan = plan_for(&cfg.coupling, cfg.omega0, DT, 40);
        let mut state = init_single_excitation(40, beta).unwrap();
        for n in 1..=40 {
            step_single_excitation(&mut state, &plan, n, StepperKind::ExactExponential).unwrap();
            prop_assert!(state.reduced_qubit_state().validate().is_ok());
            let g = state.eps() / beta;
            if beta.norm() > 1e-3 {
                prop_assert!(channel_from_amplitude(g).is_ok());
            }
        }
    }

    #[test]
    fn witness_counts_only_non_cp_gain(eps in prop::collection::vec(amplitude(1.0), 2..30)) {
        prop_assume!(eps.iter().all(|e| e.norm() > 1e-9));
        let report = analyze_amplitudes(&eps).unwrap();
        let mut want = 0.0;
        for n in 1..eps.len() {
            let contracts = (eps[n] / eps[n - 1]).norm_sqr() <= 1.0 + CP_TOL;
            prop_assert_eq!(report.cp[n - 1], contracts);
            if !report.cp[n - 1] {
                want += eps[n].norm_sqr() - eps[n - 1].norm_sqr();
            }
        }
        prop_assert!((report.witness - want).abs() <= 1e-12);
        prop_assert!(report.witness >= 0.0);
        let spanned: usize = report.intervals.iter().map(|i| i.n_end + 1 - i.n_start).sum();
        prop_assert_eq!(spanned, report.cp.iter().filter(|c| !**c).count());
    }
}

#[test]
fn decoupled_emitter_only_rotates() {
    let cfg = SimulationConfig::new(CouplingSpec::mirror(0.0, 0.3, 0.5).unwrap(), 2.0, 0.05, 100);
    let report = colcm::analyze(&run(&cfg).unwrap()).unwrap();
    assert_eq!(report.witness, 0.0);
    assert!(report.cp.iter().all(|&c| c));
    assert!(report.intervals.is_empty());
}
