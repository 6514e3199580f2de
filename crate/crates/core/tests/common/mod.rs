// Copyright 2026 The colcm Authors
// SPDX-License-Identifier: Apache-2.0

//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use colcm::kernel::SmoothTerm;
use colcm::Complex64;

/// `(1/dt) ∫∫` of a smooth kernel term over the `(n, n - l)` grid square,
/// computed by a plain 2-D trapezoid rule with `res × res` intervals.
///
/// Grid points are addressed by the integer `k` with `s = k · h`, so the
/// support edges `s = 0` and `s = cutoff` are hit exactly when they lie on the
/// grid. A point on an edge takes the mean of the one-sided limits that exist
/// inside the square: a line crossing the square gets the half value, a line
/// that only touches a corner gets the limit from the inside.
pub fn trapezoid_cell_average(term: &SmoothTerm, dt: f64, l: usize, res: usize) -> Complex64 {
    let h = dt / res as f64;
    let end = term.support_end();
    let tol = 1e-12 * end.max(1.0);
    let zero = Complex64::new(0.0, 0.0);
    // Limits of the kernel approaching s = k h from above and from below.
    let from_above = |k: i64| {
        let s = k as f64 * h;
        if k < 0 || s >= end - tol {
            zero
        } else {
            term.eval(s)
        }
    };
    let from_below = |k: i64| {
        let s = k as f64 * h;
        if k <= 0 || s > end + tol {
            zero
        } else {
            term.eval(s.min(end))
        }
    };
    let base = (l * res) as i64;
    let (k_min, k_max) = (base - res as i64, base + res as i64);
    let value = |k: i64| {
        if k == k_min {
            from_above(k)
        } else if k == k_max {
            from_below(k)
        } else {
            (from_above(k) + from_below(k)) * 0.5
        }
    };
    let w = |i: usize| if i == 0 || i == res { 0.5 } else { 1.0 };
    let mut acc = zero;
    for i in 0..=res {
        for j in 0..=res {
            acc += value(base + i as i64 - j as i64) * (w(i) * w(j));
        }
    }
    acc * (dt / (res * res) as f64)
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
