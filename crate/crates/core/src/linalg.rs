// Copyright 2026 The colcm Authors
// SPDX-License-Identifier: Apache-2.0

//! Small dense helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// exp(-i H dt) for a Hermitian `h`.
///
/// Backed by nalgebra's scaling-and-squaring Padé exponential; for the
/// anti-Hermitian argument used here the result is unitary to rounding.
pub fn propagator(h: &DMatrix<Complex64>, dt: f64) -> DMatrix<Complex64> {
    let scaled = h * Complex64::new(0.0, -dt);
    scaled.exp()
}

/// Largest |H_ij - conj(H_ji)|.
#[cfg(test)]
pub fn hermiticity_defect(h: &DMatrix<Complex64>) -> f64 {
    let n = h.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn propagator_of_diagonal_is_phase() {
        let h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]));
        let u = propagator(&h, 0.3);
        assert!((u[(0, 0)] - Complex64::from_polar(1.0, -0.6)).norm() < 1e-15);
        assert!((u[(1, 1)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(u[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn propagator_is_unitary() {
        let g = Complex64::new(1.3, -0.4);
        let h = DMatrix::from_row_slice(
            3,
            3,
            &[
                Complex64::new(0.7, 0.0),
                g.conj(),
                -g,
                g,
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                -g.conj(),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        assert!(hermiticity_defect(&h) < 1e-15);
        let u = propagator(&h, 0.25);
        let id = u.adjoint() * &u;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - Complex64::new(want, 0.0)).norm() < 1e-14);
            }
        }
    }
}
