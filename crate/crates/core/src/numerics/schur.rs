//! Schur-based eigensolver for general complex matrices.
//!
//! Pipeline: Householder reduction to upper Hessenberg form, implicit
//! single-shift QR with Wilkinson shifts until the matrix deflates to upper
//! triangular, then eigenvectors of the triangle by back-substitution mapped
//! through the accumulated unitary. At dim ≤ 8 everything is materialized as
//! full matrices; no packed storage games.

use num_complex::Complex64;

use super::{eigen_residual, normalized, ComplexMatrix, EigenSystem, MatrixKind};
use crate::error::{Error, Result};

/// QR iterations allowed per eigenvalue before giving up.
const MAX_ITERS_PER_EIGENVALUE: usize = 60;
/// Cadence of ad-hoc exceptional shifts to break rare shift cycles.
const EXCEPTIONAL_EVERY: usize = 12;

pub(super) fn schur_eig(input: &ComplexMatrix) -> Result<EigenSystem> {
    let n = input.dim();
    if n == 1 {
        return Ok(EigenSystem {
            eigenvalues: vec![input[(0, 0)]],
            eigenvectors: vec![vec![Complex64::new(1.0, 0.0)]],
            residuals: vec![0.0],
        });
    }

    let (mut h, mut q) = hessenberg(input);
    qr_to_triangular(&mut h, &mut q, input)?;

    // clean below-diagonal dust so the back-substitution sees a true triangle
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }

    let eigenvalues: Vec<Complex64> = (0..n).map(|i| h[(i, i)]).collect();
    let eigenvectors = triangular_eigenvectors(&h, &q);
    let residuals = eigenvalues
        .iter()
        .zip(&eigenvectors)
        .map(|(&l, v)| eigen_residual(input, l, v))
        .collect();
    Ok(EigenSystem { eigenvalues, eigenvectors, residuals })
}

/// Unitary reduction A = Q H Q† with H upper Hessenberg.
fn hessenberg(input: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = input.dim();
    let mut h = input.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        // householder vector for the subcolumn below the subdiagonal
        let mut u: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if xnorm < 1e-300 {
            continue;
        }
        let phase = if u[0].norm() > 0.0 {
            u[0] / u[0].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        u[0] += phase * xnorm;
        let unorm2: f64 = u.iter().map(|c| c.norm_sqr()).sum();
        if unorm2 < 1e-300 {
            continue;
        }
        // P = I − 2uu†/‖u‖², embedded at offset k+1; hermitian and involutive
        let mut p = ComplexMatrix::identity(n);
        p.kind = MatrixKind::General;
        for (i, ui) in u.iter().enumerate() {
            for (j, uj) in u.iter().enumerate() {
                p[(k + 1 + i, k + 1 + j)] -= 2.0 * ui * uj.conj() / unorm2;
            }
        }
        h = p.mul(&h).unwrap().mul(&p).unwrap();
        q = q.mul(&p).unwrap();
        // the reflector zeroes these exactly in theory; enforce it
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    (h, q)
}

/// Drive the Hessenberg matrix to upper triangular by shifted QR,
/// accumulating the similarity into `q`.
fn qr_to_triangular(
    h: &mut ComplexMatrix,
    q: &mut ComplexMatrix,
    input: &ComplexMatrix,
) -> Result<()> {
    let n = h.dim();
    let scale = input.max_norm().max(f64::MIN_POSITIVE);
    let negligible = |h: &ComplexMatrix, k: usize| -> bool {
        let base = h[(k - 1, k - 1)].norm() + h[(k, k)].norm();
        let thr = if base > 0.0 { f64::EPSILON * base } else { f64::EPSILON * scale };
        h[(k, k - 1)].norm() <= thr
    };

    let mut hi = n - 1;
    let mut iters = 0usize;
    while hi > 0 {
        if negligible(h, hi) {
            h[(hi, hi - 1)] = Complex64::new(0.0, 0.0);
            hi -= 1;
            iters = 0;
            continue;
        }
        // active unreduced block is [lo..=hi]
        let mut lo = hi;
        while lo > 0 && !negligible(h, lo) {
            lo -= 1;
        }
        if lo > 0 {
            h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
        }

        iters += 1;
        if iters > MAX_ITERS_PER_EIGENVALUE {
            return Err(Error::EigNonConvergence {
                matrix: input.describe(),
                detail: format!(
                    "QR stalled on block [{lo}..={hi}] after {MAX_ITERS_PER_EIGENVALUE} shifts"
                ),
            });
        }
        let mu = if iters % EXCEPTIONAL_EVERY == 0 {
            // ad-hoc shift to break a cycling pattern
            h[(hi, hi)] + 0.75 * h[(hi, hi - 1)].norm()
        } else {
            wilkinson_shift(h, hi)
        };
        qr_step(h, q, lo, hi, mu);
    }
    Ok(())
}

/// Eigenvalue of the trailing 2×2 closest to the bottom-right entry.
fn wilkinson_shift(h: &ComplexMatrix, hi: usize) -> Complex64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let mid = (a + d) * 0.5;
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One implicit single-shift QR sweep over the block [lo..=hi].
fn qr_step(h: &mut ComplexMatrix, q: &mut ComplexMatrix, lo: usize, hi: usize, mu: Complex64) {
    let n = h.dim();
    let mut x = h[(lo, lo)] - mu;
    let mut y = h[(lo + 1, lo)];
    for k in lo..hi {
        let (c, s) = givens(x, y);
        // rows k, k+1: H ← G·H
        for j in 0..n {
            let a = h[(k, j)];
            let b = h[(k + 1, j)];
            h[(k, j)] = c * a + s * b;
            h[(k + 1, j)] = -s.conj() * a + c * b;
        }
        // columns k, k+1: H ← H·G†
        for i in 0..n {
            let a = h[(i, k)];
            let b = h[(i, k + 1)];
            h[(i, k)] = c * a + s.conj() * b;
            h[(i, k + 1)] = -s * a + c * b;
        }
        // Q ← Q·G†
        for i in 0..n {
            let a = q[(i, k)];
            let b = q[(i, k + 1)];
            q[(i, k)] = c * a + s.conj() * b;
            q[(i, k + 1)] = -s * a + c * b;
        }
        if k + 1 < hi {
            // chase the bulge sitting at (k+2, k)
            x = h[(k + 1, k)];
            y = h[(k + 2, k)];
        }
    }
}

/// Plane rotation G = [[c, s], [−s̄, c]] with c real, mapping (x, y) → (r, 0).
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let xn = x.norm();
    let yn = y.norm();
    if yn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    let r = xn.hypot(yn);
    if xn == 0.0 {
        return (0.0, y.conj() / yn);
    }
    (xn / r, (x / xn) * y.conj() / r)
}

/// Eigenvectors of the triangle by back-substitution, mapped through Q.
fn triangular_eigenvectors(t: &ComplexMatrix, q: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    let n = t.dim();
    let smin = f64::EPSILON * t.max_norm().max(f64::MIN_POSITIVE);
    (0..n)
        .map(|i| {
            let lambda = t[(i, i)];
            let mut y = vec![Complex64::new(0.0, 0.0); n];
            y[i] = Complex64::new(1.0, 0.0);
            for j in (0..i).rev() {
                let mut rhs = Complex64::new(0.0, 0.0);
                for l in j + 1..=i {
                    rhs += t[(j, l)] * y[l];
                }
                let mut den = t[(j, j)] - lambda;
                if den.norm() < smin {
                    // repeated diagonal entry: damp rather than divide by ~0
                    den = Complex64::new(smin, 0.0);
                }
                y[j] = -rhs / den;
                // keep partial solutions bounded for near-defective triangles
                let mag = y[j].norm();
                if mag > 1e12 {
                    let rescale = 1.0 / mag;
                    for item in y.iter_mut().take(i + 1).skip(j) {
                        *item *= rescale;
                    }
                }
            }
            normalized(&q.apply(&y).expect("dims match by construction"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hessenberg_is_similarity() {
        let m = ComplexMatrix::new(
            4,
            (0..16)
                .map(|k| c(((k * 7) % 5) as f64 - 2.0, ((k * 3) % 4) as f64 - 1.5))
                .collect(),
        )
        .unwrap();
        let (h, q) = hessenberg(&m);
        // H is Hessenberg
        for i in 2..4 {
            for j in 0..i - 1 {
                assert_eq!(h[(i, j)], c(0.0, 0.0));
            }
        }
        // Q unitary, QHQ† = M
        assert!(q.unitarity_defect() < 1e-13);
        let rebuilt = q.mul(&h).unwrap().mul(&q.adjoint()).unwrap();
        assert!(rebuilt.max_diff(&m) < 1e-12);
    }

    #[test]
    fn eigenvalues_of_permutation_cycle() {
        // 4-cycle: eigenvalues are the 4th roots of unity
        let m = ComplexMatrix::from_real(
            4,
            &[
                0.0, 0.0, 0.0, 1.0,
                1.0, 0.0, 0.0, 0.0,
                0.0, 1.0, 0.0, 0.0,
                0.0, 0.0, 1.0, 0.0,
            ],
        )
        .unwrap();
        let sys = schur_eig(&m).unwrap();
        let mut remaining: Vec<Complex64> = sys.eigenvalues.clone();
        for target in [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)] {
            let (idx, d) = remaining
                .iter()
                .enumerate()
                .map(|(i, e)| (i, (e - target).norm()))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap();
            assert!(d < 1e-12, "missing root of unity {target}");
            remaining.remove(idx);
        }
        for r in &sys.residuals {
            assert!(*r < 1e-12);
        }
    }

    #[test]
    fn defective_jordan_block_still_deflates() {
        // [[2,1],[0,2]] has a single eigenvector; both returned eigenvalues
        // must equal 2 and the residuals must still satisfy the kernel bound.
        let m = ComplexMatrix::from_real(2, &[2.0, 1.0, 0.0, 2.0]).unwrap();
        let sys = schur_eig(&m).unwrap();
        for ev in &sys.eigenvalues {
            assert!((ev - c(2.0, 0.0)).norm() < 1e-7);
        }
    }
}
