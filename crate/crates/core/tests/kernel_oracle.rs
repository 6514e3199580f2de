// Copyright 2026 The colcm Authors
// SPDX-License-Identifier: Apache-2.0

mod common;

use std::f64::consts::PI;

use colcm::kernel::{Delta, SmoothTerm, WeightMatrix};
use colcm::{collision_weights, coupling_strengths, Complex64, CouplingSpec, TimeKernel};
use proptest::prelude::*;

use common::trapezoid_cell_average;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Richardson-extrapolated trapezoid; removes the O(h^2) term of the plain
/// rule so larger `rate * dt` can be checked tightly.
fn extrapolated(term: &SmoothTerm, dt: f64, l: usize) -> Complex64 {
    let coarse = trapezoid_cell_average(term, dt, l, 160);
    let fine = trapezoid_cell_average(term, dt, l, 320);
    (fine * 4.0 - coarse) / 3.0
}

fn lags_to_check(term: &SmoothTerm, dt: f64) -> usize {
    (term.support_end() / dt).ceil() as usize + 2
}

#[test]
fn exponential_kernel_matches_trapezoid_oracle() {
    let term = SmoothTerm::Exponential {
        rate: 1.0,
        weight: c(1.0, 0.0),
        cutoff: 3.0,
    };
    let dt = 0.05;
    let w = collision_weights(&TimeKernel::new([], vec![term.clone()]), dt, 200).unwrap();
    for l in 0..lags_to_check(&term, dt) {
        let oracle = trapezoid_cell_average(&term, dt, l, 320);
        assert!((w.lag(l) - oracle).norm() <= 1e-8, "lag {l}: {} vs {oracle}", w.lag(l));
    }
}

#[test]
fn fast_complex_exponential_matches_extrapolated_oracle() {
    let term = SmoothTerm::Exponential {
        rate: 4.0,
        weight: c(0.7, -1.2),
        cutoff: 0.6,
    };
    let dt = 0.1;
    let w = collision_weights(&TimeKernel::new([], vec![term.clone()]), dt, 50).unwrap();
    for l in 0..lags_to_check(&term, dt) {
        let oracle = extrapolated(&term, dt, l);
        assert!((w.lag(l) - oracle).norm() <= 1e-9, "lag {l}: {} vs {oracle}", w.lag(l));
    }
}

#[test]
fn sampled_kernel_matches_extrapolated_oracle() {
    // Sample nodes coincide with grid points of the oracle (spacing = 2 dt / 5).
    let dt = 0.1;
    let term = SmoothTerm::Sampled {
        spacing: 0.04,
        values: (0..12)
            .map(|k| c((k as f64 * 0.7).sin() + 1.0, 0.3 * (k as f64).cos()))
            .collect(),
    };
    let w = collision_weights(&TimeKernel::new([], vec![term.clone()]), dt, 50).unwrap();
    for l in 0..lags_to_check(&term, dt) {
        let oracle = extrapolated(&term, dt, l);
        assert!((w.lag(l) - oracle).norm() <= 1e-9, "lag {l}: {} vs {oracle}", w.lag(l));
    }
}

#[test]
fn white_is_kronecker_delta_for_any_rate() {
    for gamma in [0.0, 0.3, 1.0, 7.5] {
        let w = collision_weights(&CouplingSpec::white(gamma).unwrap().time_kernel(), 0.1, 10).unwrap();
        assert_eq!(w.iter().collect::<Vec<_>>(), vec![(0, c(1.0, 0.0))]);
    }
}

#[test]
fn strengths_scale_with_rate_over_step() {
    let spec = CouplingSpec::mirror(0.8, 0.3, 0.5).unwrap();
    let w = collision_weights(&spec.time_kernel(), 0.1, 20).unwrap();
    let g = coupling_strengths(&w, spec.gamma()).unwrap();
    let scale = (0.8f64 / 0.1).sqrt();
    for (l, wl) in w.iter() {
        assert!((g.lag(l) - wl * scale).norm() < 1e-15);
    }
}

fn exponential() -> impl Strategy<Value = SmoothTerm> {
    (0.1f64..5.0, -2.0f64..2.0, -2.0f64..2.0, 1usize..12).prop_map(|(rate, re, im, k)| {
        SmoothTerm::Exponential {
            rate,
            weight: c(re, im),
            cutoff: k as f64 * 0.05,
        }
    })
}

fn delta() -> impl Strategy<Value = Delta> {
    (0usize..20, -2.0f64..2.0, -2.0f64..2.0).prop_map(|(k, re, im)| Delta {
        lag: k as f64 * 0.1,
        weight: c(re, im),
    })
}

fn kernel() -> impl Strategy<Value = TimeKernel> {
    (
        prop::collection::vec(delta(), 0..4),
        prop::collection::vec(exponential(), 0..3),
    )
        .prop_map(|(d, s)| TimeKernel::new(d.into_iter().map(|d| (d.lag, d.weight)), s))
}

fn weights(k: &TimeKernel) -> WeightMatrix {
    collision_weights(k, 0.1, 40).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weights_are_linear_in_the_kernel(a in kernel(), b in kernel()) {
        let wa = weights(&a);
        let wb = weights(&b);
        let wab = weights(&a.sum(&b));
        for l in 0..=wab.max_lag().max(wa.max_lag()).max(wb.max_lag()) {
            prop_assert!((wab.lag(l) - wa.lag(l) - wb.lag(l)).norm() <= 1e-13);
        }
    }

    #[test]
    fn weights_scale_with_the_kernel(k in kernel(), s in -3.0f64..3.0) {
        let scaled = TimeKernel::new(
            k.deltas().iter().map(|&(l, w)| (l, w * s)),
            k.smooth()
                .iter()
                .map(|t| match t {
                    SmoothTerm::Exponential { rate, weight, cutoff } => SmoothTerm::Exponential {
                        rate: *rate,
                        weight: weight * s,
                        cutoff: *cutoff,
                    },
                    other => other.clone(),
                })
                .collect(),
        );
        let w = weights(&k);
        let ws = weights(&scaled);
        for l in 0..=w.max_lag().max(ws.max_lag()) {
            prop_assert!((ws.lag(l) - w.lag(l) * s).norm() <= 1e-13);
        }
    }

    #[test]
    fn weights_are_stationary_and_causal(k in kernel(), n in 1i64..40, m in -20i64..40, shift in 1i64..10) {
        let w = weights(&k);
        prop_assert_eq!(w.get(n, m), w.get(n + shift, m + shift));
        if m > n {
            prop_assert_eq!(w.get(n, m), c(0.0, 0.0));
        }
    }

    #[test]
    fn on_grid_mirror_weights_are_exact(
        phi in -PI..PI,
        d in 1usize..200,
        gamma in 0.0f64..4.0,
        dt in prop::sample::select(vec![0.1, 0.05, 0.02, 0.01, 1.0 / 64.0, 0.25]),
    ) {
        let tau = d as f64 * dt;
        let w = collision_weights(&CouplingSpec::mirror(gamma, phi, tau).unwrap().time_kernel(), dt, 10).unwrap();
        prop_assert!(w.warnings().is_empty());
        prop_assert_eq!(w.lag(0), c(1.0, 0.0));
        prop_assert_eq!(w.lag(d), -Complex64::from_polar(1.0, -phi));
        prop_assert_eq!(w.len(), 2);
    }
}
