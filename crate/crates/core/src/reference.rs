// Copyright 2026 The colcm Authors
// SPDX-License-Identifier: Apache-2.0

//! Continuous-time references for the emitter amplitude.
//!
//! In front of a mirror the excited-state amplitude obeys the linear
//! constant-delay equation
//!
//! ```text
//! ε'(t) = -(i ω0 + γ) ε(t) + γ e^{iφ} ε(t - τ) θ(t - τ),   ε(0) = 1,
//! ```
//!
//! whose method-of-steps solution is a finite sum on every interval
//! `[kτ, (k+1)τ)`:
//!
//! ```text
//! ε(t) = Σ_{j=0}^{k} q^j (t - jτ)^j / j! · e^{-(i ω0 + γ) t},   q = γ e^{iφ} e^{(i ω0 + γ) τ}.
//! ```
//!
//! The `j`-th term vanishes at `t = jτ`, so ε is continuous. The feedback
//! term is taken as switched on at `t = τ` inclusive.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Closed-form solution of the mirror delay equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DdeSolution {
    omega0: f64,
    gamma: f64,
    phi: f64,
    tau: f64,
    t_max: f64,
}

pub fn solve_dde(omega0: f64, gamma: f64, phi: f64, tau: f64, t_max: f64) -> Result<DdeSolution> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::domain(format!("gamma must be >= 0, got {gamma}")));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::domain(format!(
            "tau must be > 0, got {tau}; use white_amplitude for tau = 0"
        )));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::domain(format!("t_max must be > 0, got {t_max}")));
    }
    if !omega0.is_finite() || !phi.is_finite() {
        return Err(Error::domain("omega0 and phi must be finite"));
    }
    Ok(DdeSolution {
        omega0,
        gamma,
        phi,
        tau,
        t_max,
    })
}

impl DdeSolution {
    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Delay interval `k = floor(t / τ)` containing `t`.
    pub fn segment(&self, t: f64) -> usize {
        (t / self.tau).floor().max(0.0) as usize
    }

    /// ε(t) for any `t >= 0`.
    pub fn eval(&self, t: f64) -> Complex64 {
        let a = Complex64::new(self.gamma, self.omega0);
        let decay = (-a * t).exp();
        if self.gamma == 0.0 {
            return decay;
        }
        // Terms are built in log space: (t - jτ)^j / j! overflows long
        // before the product with e^{-γ t} does.
        let log_q = Complex64::new(self.gamma.ln(), self.phi) + a * self.tau;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut log_fact = 0.0;
        for j in 0..=self.segment(t) {
            if j > 0 {
                log_fact += (j as f64).ln();
            }
            let s = t - j as f64 * self.tau;
            if s <= 0.0 {
                if j == 0 {
                    sum += decay;
                }
                continue;
            }
            let log_term = log_q * j as f64 + (j as f64) * s.ln() - log_fact - a * t;
            sum += log_term.exp();
        }
        sum
    }

    /// ε on the grid `t_n = n · dt`, `n = 0 ..= n_max`.
    pub fn sample(&self, dt: f64, n_max: usize) -> Vec<Complex64> {
        (0..=n_max).map(|n| self.eval(n as f64 * dt)).collect()
    }

    /// CSV `t,re_eps,im_eps,abs_eps` on the grid `t_n = n · dt` up to `t_max`.
    pub fn to_csv(&self, dt: f64) -> String {
        let n_max = (self.t_max / dt * (1.0 + 1e-12)).floor() as usize;
        samples_to_csv((0..=n_max).map(|n| {
            let t = n as f64 * dt;
            (t, self.eval(t))
        }))
    }
}

/// CSV `t,re_eps,im_eps,abs_eps` for arbitrary samples.
pub fn samples_to_csv(samples: impl IntoIterator<Item = (f64, Complex64)>) -> String {
    use crate::fmt_f64 as f;
    let mut out = String::from("t,re_eps,im_eps,abs_eps\n");
    for (t, e) in samples {
        let _ = writeln!(out, "{},{},{},{}", f(t), f(e.re), f(e.im), f(e.norm()));
    }
    out
}

/// Markovian decay `e^{-(i ω0 + γ/2) t}` of a white-coupled emitter.
pub fn white_amplitude(omega0: f64, gamma: f64, t: f64) -> Complex64 {
    (-Complex64::new(0.5 * gamma, omega0) * t).exp()
}

/// Independent fixed-step RK4 integration of the mirror delay equation with
/// linear interpolation of the stored history.
///
/// Returns `(t_n, ε(t_n))` for `t_n = n · dt_fine <= t_max`.
pub fn dde_numeric_oracle(
    omega0: f64,
    gamma: f64,
    phi: f64,
    tau: f64,
    dt_fine: f64,
    t_max: f64,
) -> Result<Vec<(f64, Complex64)>> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::domain("tau must be > 0"));
    }
    if !(dt_fine > 0.0 && dt_fine <= tau / 1000.0 * (1.0 + 1e-12)) {
        return Err(Error::domain(format!(
            "dt_fine must lie in (0, tau / 1000], got {dt_fine}"
        )));
    }
    let a = Complex64::new(gamma, omega0);
    let b = Complex64::from_polar(gamma, phi);
    let h = dt_fine;
    let n_max = (t_max / h * (1.0 + 1e-12)).floor() as usize;
    let mut ys: Vec<Complex64> = Vec::with_capacity(n_max + 1);
    ys.push(Complex64::new(1.0, 0.0));

    let history = |ys: &[Complex64], s: f64| -> Complex64 {
        if s < 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let x = s / h;
        let k = (x.floor() as usize).min(ys.len() - 1);
        if k + 1 >= ys.len() {
            return ys[k];
        }
        let frac = x - k as f64;
        ys[k] * (1.0 - frac) + ys[k + 1] * frac
    };
    // The feedback term switches on at t = τ, so each step uses the branch
    // valid on its open interval, decided at the step midpoint. When the grid
    // hits τ exactly no stage ever straddles the switch.
    let rhs = |ys: &[Complex64], active: bool, t: f64, y: Complex64| -> Complex64 {
        let delayed = if active {
            history(ys, (t - tau).max(0.0))
        } else {
            Complex64::new(0.0, 0.0)
        };
        -a * y + b * delayed
    };

    for n in 0..n_max {
        let t = n as f64 * h;
        let y = ys[n];
        let on = t + 0.5 * h > tau;
        let k1 = rhs(&ys, on, t, y);
        let k2 = rhs(&ys, on, t + 0.5 * h, y + 0.5 * h * k1);
        let k3 = rhs(&ys, on, t + 0.5 * h, y + 0.5 * h * k2);
        let k4 = rhs(&ys, on, t + h, y + h * k3);
        ys.push(y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
    Ok(ys
        .into_iter()
        .enumerate()
        .map(|(n, y)| (n as f64 * h, y))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_interval_is_pure_decay() {
        let sol = solve_dde(1.7, 0.8, 0.3, 1.5, 5.0).unwrap();
        for i in 0..150 {
            let t = i as f64 * 0.01;
            let want = (-Complex64::new(0.8, 1.7) * t).exp();
            assert!((sol.eval(t) - want).norm() < 1e-14);
        }
        assert_eq!(sol.eval(0.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn no_decay_without_coupling() {
        let sol = solve_dde(2.0, 0.0, 0.3, 1.0, 10.0).unwrap();
        for t in [0.0, 0.5, 1.0, 3.3, 9.9] {
            let e = sol.eval(t);
            assert!((e - Complex64::from_polar(1.0, -2.0 * t)).norm() < 1e-14);
            assert!((e.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn continuous_at_delay_multiples() {
        let sol = solve_dde(0.4, 1.2, 2.0, 0.7, 10.0).unwrap();
        for k in 1..=14 {
            let t = k as f64 * 0.7;
            let jump = (sol.eval(t * (1.0 - 1e-15)) - sol.eval(t * (1.0 + 1e-15))).norm();
            assert!(jump < 1e-12, "k = {k}: {jump:e}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(solve_dde(0.0, 1.0, 0.0, 0.0, 1.0).is_err());
        assert!(solve_dde(0.0, -1.0, 0.0, 1.0, 1.0).is_err());
        assert!(dde_numeric_oracle(0.0, 1.0, 0.0, 1.0, 0.01, 1.0).is_err());
    }

    #[test]
    fn white_reference_values() {
        assert_eq!(white_amplitude(3.0, 1.0, 0.0), Complex64::new(1.0, 0.0));
        assert!((white_amplitude(0.0, 1.0, 2.0).re - (-1.0f64).exp()).abs() < 1e-15);
        assert!((white_amplitude(1.5, 0.0, 2.0) - Complex64::from_polar(1.0, -3.0)).norm() < 1e-15);
    }
}
