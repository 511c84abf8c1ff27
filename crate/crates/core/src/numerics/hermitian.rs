//! Cyclic Jacobi eigensolver for hermitian matrices.
//!
//! Rotations are the complex generalization of the classic symmetric Jacobi
//! scheme: each 2×2 pivot (p,q) is annihilated by a unitary plane rotation
//! whose phase absorbs the argument of the off-diagonal entry. Convergence is
//! quadratic; a handful of sweeps suffices at these dimensions.

use num_complex::Complex64;

use super::{eigen_residual, ComplexMatrix, EigenSystem};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

pub(super) fn jacobi_eig(input: &ComplexMatrix) -> Result<EigenSystem> {
    let n = input.dim();
    if n == 1 {
        return Ok(EigenSystem {
            eigenvalues: vec![Complex64::new(input[(0, 0)].re, 0.0)],
            eigenvectors: vec![vec![Complex64::new(1.0, 0.0)]],
            residuals: vec![input[(0, 0)].im.abs()],
        });
    }

    let mut a = input.clone();
    let mut v = ComplexMatrix::identity(n);
    let frob: f64 = input.entries().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let stop = f64::EPSILON * frob;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_norm(&a) <= stop {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_norm(&a) > stop {
        return Err(Error::EigNonConvergence {
            matrix: input.describe(),
            detail: format!(
                "jacobi off-diagonal norm {:.3e} after {MAX_SWEEPS} sweeps (target {:.3e})",
                off_norm(&a),
                stop
            ),
        });
    }

    let eigenvalues: Vec<Complex64> =
        (0..n).map(|i| Complex64::new(a[(i, i)].re, 0.0)).collect();
    let eigenvectors: Vec<Vec<Complex64>> =
        (0..n).map(|j| (0..n).map(|i| v[(i, j)]).collect()).collect();
    let residuals = eigenvalues
        .iter()
        .zip(&eigenvectors)
        .map(|(&l, vec)| eigen_residual(input, l, vec))
        .collect();
    Ok(EigenSystem { eigenvalues, eigenvectors, residuals })
}

/// Frobenius norm of the strict off-diagonal part.
fn off_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One plane rotation zeroing A[p][q]: A ← J†AJ, V ← V·J with
/// J = [[c, s], [−s̄, c]] in the (p,q) plane, c real.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = a.dim();
    let delta = a[(p, q)];
    let mag = delta.norm();
    if mag < 1e-300 {
        // already annihilated to machine scale; make it exact
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let alpha = a[(p, p)].re;
    let gamma = a[(q, q)].re;
    let theta = (gamma - alpha) / (2.0 * mag);
    // smaller-angle root of t² + 2θt − 1 = 0, the numerically stable choice
    let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
    let t = sgn / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = delta / mag * (t * c); // phase e^{iβ} times real sine

    // A ← A·J on columns p, q
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s.conj() * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    // A ← J†·A on rows p, q
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s.conj() * apk + c * aqk;
    }
    // exact zeros and real diagonal on the pivot block
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    // V ← V·J
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s.conj() * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::inner;

    #[test]
    fn diagonal_matrix_is_a_fixed_point() {
        let m = ComplexMatrix::from_real(4, &[
            3.0, 0.0, 0.0, 0.0,
            0.0, -1.0, 0.0, 0.0,
            0.0, 0.0, 2.0, 0.0,
            0.0, 0.0, 0.0, 0.5,
        ])
        .unwrap();
        let sys = jacobi_eig(&m).unwrap();
        let mut vals: Vec<f64> = sys.eigenvalues.iter().map(|e| e.re).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(vals, vec![-1.0, 0.5, 2.0, 3.0]);
    }

    #[test]
    fn complex_offdiagonals_converge() {
        // pauli-y embedded in 2x2: eigenvalues ±1
        let m = ComplexMatrix::new(
            2,
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let sys = jacobi_eig(&m).unwrap();
        let mut vals: Vec<f64> = sys.eigenvalues.iter().map(|e| e.re).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
        let ip = inner(&sys.eigenvectors[0], &sys.eigenvectors[1]).norm();
        assert!(ip < 1e-13, "eigenvectors not orthogonal: {ip}");
    }
}
