//! Small dense complex linear algebra: eigendecomposition, matrix powers,
//! and hermitian time evolution for dimensions up to 8.
//!
//! Everything here is self-contained: hermitian matrices go through a cyclic
//! Jacobi sweep ([`hermitian`]), everything else through a shifted-QR Schur
//! reduction ([`schur`]). Tolerances are expressed relative to the max-norm of
//! the input so they stay meaningful when entries scale with the clique size.

mod hermitian;
mod schur;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on matrix dimension for the dense kernel.
pub const MAX_DIM: usize = 8;

/// Construction tolerance for the `unitary` flag: ‖U†U − I‖_max.
pub const UNITARY_TOL: f64 = 1e-12;
/// Construction tolerance for the `hermitian` flag: ‖A − A†‖_max.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenpair residual bound, relative to ‖A‖_max · dim.
pub const RESIDUAL_FACTOR: f64 = 1e-10;

/// Structural flag carried by a matrix; checked at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    General,
    Unitary,
    Hermitian,
}

/// Dense square complex matrix in row-major order, dim ≤ 8.
#[derive(Clone, Debug)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
    kind: MatrixKind,
    label: Option<String>,
}

impl ComplexMatrix {
    /// General matrix from row-major entries.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("matrix dimension must be ≥ 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for dim {dim}, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Self { dim, entries, kind: MatrixKind::General, label: None })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
            kind: MatrixKind::General,
            label: None,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m.kind = MatrixKind::Unitary;
        m
    }

    /// Flag as unitary, verifying ‖U†U − I‖_max ≤ `UNITARY_TOL`.
    pub fn into_unitary(self) -> Result<Self> {
        self.into_kind_checked(MatrixKind::Unitary, UNITARY_TOL)
    }

    /// Flag as hermitian, verifying ‖A − A†‖_max ≤ `HERMITIAN_TOL`.
    pub fn into_hermitian(self) -> Result<Self> {
        self.into_kind_checked(MatrixKind::Hermitian, HERMITIAN_TOL)
    }

    /// Flag with an explicit tolerance (used by `matrix_power`, which relaxes
    /// the unitarity bound to 1e−10·k).
    pub fn into_kind_checked(mut self, kind: MatrixKind, tol: f64) -> Result<Self> {
        let defect = match kind {
            MatrixKind::Unitary => self.unitarity_defect(),
            MatrixKind::Hermitian => self.hermiticity_defect(),
            MatrixKind::General => 0.0,
        };
        if defect > tol {
            return Err(Error::MatrixInvariant {
                kind: match kind {
                    MatrixKind::Unitary => "unitary",
                    MatrixKind::Hermitian => "hermitian",
                    MatrixKind::General => "general",
                },
                matrix: self.describe(),
                defect,
                tol,
            });
        }
        self.kind = kind;
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn describe(&self) -> String {
        match &self.label {
            Some(l) => l.clone(),
            None => format!("{}x{} matrix", self.dim, self.dim),
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out.kind = self.kind;
        out
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch(format!(
                "matrix product {}x{} · {}x{}",
                self.dim, self.dim, rhs.dim, rhs.dim
            )));
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "matrix dim {} vs vector len {}",
                self.dim,
                v.len()
            )));
        }
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Largest entry magnitude.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// ‖U†U − I‖_max.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self[(k, i)].conj() * self[(k, j)];
                }
                if i == j {
                    acc -= Complex64::new(1.0, 0.0);
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    /// ‖A − A†‖_max.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Entrywise max difference to another matrix.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

/// Full eigendecomposition of a small matrix.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub eigenvalues: Vec<Complex64>,
    /// Unit-norm eigenvectors, one per eigenvalue, same order.
    pub eigenvectors: Vec<Vec<Complex64>>,
    /// Per-pair ‖Av − λv‖₂ against the input matrix.
    pub residuals: Vec<f64>,
}

impl EigenSystem {
    /// Index of the eigenvalue closest to `target`.
    pub fn closest_to(&self, target: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, ev) in self.eigenvalues.iter().enumerate() {
            let d = (ev - target).norm();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }
}

/// All eigenpairs of a matrix with dim ≤ 8.
///
/// Hermitian inputs (flagged, or with hermiticity defect ≤ 1e−12) are ordered
/// by ascending real eigenvalue; everything else by ascending eigenvalue
/// phase in (−π, π]. Residuals are checked against
/// `RESIDUAL_FACTOR · ‖A‖_max · dim`.
pub fn eig(matrix: &ComplexMatrix) -> Result<EigenSystem> {
    if matrix.dim > MAX_DIM {
        return Err(Error::DimensionTooLarge(matrix.dim));
    }
    let hermitian_like =
        matrix.kind == MatrixKind::Hermitian || matrix.hermiticity_defect() <= HERMITIAN_TOL;
    let mut sys = if hermitian_like {
        hermitian::jacobi_eig(matrix)?
    } else {
        schur::schur_eig(matrix)?
    };

    // Sort convention: hermitian by ascending real value, otherwise by phase.
    let mut order: Vec<usize> = (0..sys.eigenvalues.len()).collect();
    if hermitian_like {
        order.sort_by(|&a, &b| {
            sys.eigenvalues[a]
                .re
                .partial_cmp(&sys.eigenvalues[b].re)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
    } else {
        let phase = |c: Complex64| {
            let mut p = c.arg();
            // fold −π onto π so the phase interval is (−π, π]
            if p <= -std::f64::consts::PI + f64::EPSILON {
                p = std::f64::consts::PI;
            }
            p
        };
        order.sort_by(|&a, &b| {
            let pa = phase(sys.eigenvalues[a]);
            let pb = phase(sys.eigenvalues[b]);
            pa.partial_cmp(&pb)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| {
                    sys.eigenvalues[a]
                        .norm()
                        .partial_cmp(&sys.eigenvalues[b].norm())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
        });
    }
    sys.eigenvalues = order.iter().map(|&i| sys.eigenvalues[i]).collect();
    sys.eigenvectors = order.iter().map(|&i| sys.eigenvectors[i].clone()).collect();
    sys.residuals = order.iter().map(|&i| sys.residuals[i]).collect();

    let bound = RESIDUAL_FACTOR * matrix.max_norm() * matrix.dim as f64;
    if let Some(worst) = sys.residuals.iter().cloned().reduce(f64::max) {
        if worst > bound {
            return Err(Error::EigNonConvergence {
                matrix: matrix.describe(),
                detail: format!("worst residual {worst:.3e} exceeds bound {bound:.3e}"),
            });
        }
    }
    Ok(sys)
}

/// `matrix`^`k` by repeated squaring. A unitary input yields a unitary-flagged
/// output with the tolerance relaxed to 1e−10·max(k, 1).
pub fn matrix_power(matrix: &ComplexMatrix, k: u64) -> Result<ComplexMatrix> {
    if matrix.dim > MAX_DIM {
        return Err(Error::DimensionTooLarge(matrix.dim));
    }
    let mut result = ComplexMatrix::identity(matrix.dim);
    result.kind = MatrixKind::General;
    let mut base = matrix.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result = result.mul(&base)?;
        }
        e >>= 1;
        if e > 0 {
            base = base.mul(&base)?;
        }
    }
    if matrix.kind == MatrixKind::Unitary {
        let tol = 1e-10 * k.max(1) as f64;
        result = result.into_kind_checked(MatrixKind::Unitary, tol)?;
    }
    if let Some(label) = &matrix.label {
        result = result.with_label(format!("{label}^{k}"));
    }
    Ok(result)
}

/// e^{−iHt}|state⟩ by spectral decomposition of the hermitian `h`.
pub fn evolve_hermitian(h: &ComplexMatrix, t: f64, state: &[Complex64]) -> Result<Vec<Complex64>> {
    if state.len() != h.dim {
        return Err(Error::DimensionMismatch(format!(
            "hamiltonian dim {} vs state len {}",
            h.dim,
            state.len()
        )));
    }
    if h.kind != MatrixKind::Hermitian && h.hermiticity_defect() > HERMITIAN_TOL {
        return Err(Error::InvalidParameter(format!(
            "evolve_hermitian requires a hermitian matrix; defect {:.3e}",
            h.hermiticity_defect()
        )));
    }
    let sys = eig(h)?;
    evolve_with_eigensystem(&sys, t, state)
}

/// Same as [`evolve_hermitian`] but reusing a precomputed eigensystem, for
/// sampling many times along one trajectory.
pub fn evolve_with_eigensystem(
    sys: &EigenSystem,
    t: f64,
    state: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = state.len();
    if sys.eigenvectors.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "eigensystem dim {} vs state len {}",
            sys.eigenvectors.len(),
            n
        )));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (ev, vec) in sys.eigenvalues.iter().zip(&sys.eigenvectors) {
        let c = inner(vec, state);
        let phase = Complex64::from_polar(1.0, -ev.re * t);
        let w = c * phase;
        for (o, &vi) in out.iter_mut().zip(vec) {
            *o += w * vi;
        }
    }
    Ok(out)
}

/// ⟨a|b⟩ with the conjugate on the first argument.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Scale to unit norm; the zero vector is returned unchanged.
pub fn normalized(v: &[Complex64]) -> Vec<Complex64> {
    let n = norm2(v);
    if n == 0.0 {
        return v.to_vec();
    }
    v.iter().map(|c| c / n).collect()
}

/// |⟨a|b⟩| after normalizing both vectors.
pub fn overlap(a: &[Complex64], b: &[Complex64]) -> f64 {
    let na = norm2(a);
    let nb = norm2(b);
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    inner(a, b).norm() / (na * nb)
}

/// ‖Av − λv‖₂.
pub fn eigen_residual(a: &ComplexMatrix, lambda: Complex64, v: &[Complex64]) -> f64 {
    let av = a.apply(v).expect("dimension checked by caller");
    av.iter()
        .zip(v)
        .map(|(x, y)| (x - lambda * y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_eigenvalues_are_all_one() {
        let sys = eig(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(sys.eigenvalues.len(), 3);
        for ev in &sys.eigenvalues {
            assert!((ev - c(1.0, 0.0)).norm() < 1e-14);
        }
        // returned basis is orthonormal
        for i in 0..3 {
            for j in 0..3 {
                let ip = inner(&sys.eigenvectors[i], &sys.eigenvectors[j]).norm();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hermitian_eig_matches_reconstruction() {
        // deterministic non-trivial hermitian matrix
        let n = 5;
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let re = ((i * 3 + j * 7) % 11) as f64 / 11.0;
                let im = if i == j { 0.0 } else { ((i * 5 + j) % 7) as f64 / 7.0 };
                m[(i, j)] = c(re, if i < j { im } else { -im });
            }
        }
        // symmetrize exactly
        let sym = {
            let adj = m.adjoint();
            let mut s = ComplexMatrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    s[(i, j)] = (m[(i, j)] + adj[(i, j)]) * 0.5;
                }
            }
            s.into_hermitian().unwrap()
        };
        let sys = eig(&sym).unwrap();
        for ev in &sys.eigenvalues {
            assert!(ev.im.abs() < 1e-12);
        }
        // ascending order
        for w in sys.eigenvalues.windows(2) {
            assert!(w[0].re <= w[1].re + 1e-14);
        }
        // Σ λᵢ vᵢvᵢ† rebuilds the input entrywise
        let mut rebuilt = ComplexMatrix::zeros(n);
        for (ev, v) in sys.eigenvalues.iter().zip(&sys.eigenvectors) {
            for i in 0..n {
                for j in 0..n {
                    rebuilt[(i, j)] += ev * v[i] * v[j].conj();
                }
            }
        }
        assert!(rebuilt.max_diff(&sym) < 1e-10);
    }

    #[test]
    fn general_complex_eig_small_cases() {
        // 2x2 rotation: eigenvalues e^{±iθ}
        let th = 0.3f64;
        let m = ComplexMatrix::from_real(2, &[th.cos(), -th.sin(), th.sin(), th.cos()])
            .unwrap()
            .into_unitary()
            .unwrap();
        let sys = eig(&m).unwrap();
        let phases: Vec<f64> = sys.eigenvalues.iter().map(|e| e.arg()).collect();
        assert!((phases[0] + th).abs() < 1e-12);
        assert!((phases[1] - th).abs() < 1e-12);
        for r in &sys.residuals {
            assert!(*r < 1e-12);
        }
    }

    #[test]
    fn non_normal_matrix_eigenvalues() {
        // upper triangular: eigenvalues are the diagonal
        let m = ComplexMatrix::new(
            3,
            vec![
                c(1.0, 0.0), c(2.0, 1.0), c(0.5, 0.0),
                c(0.0, 0.0), c(-1.0, 0.0), c(3.0, 0.0),
                c(0.0, 0.0), c(0.0, 0.0), c(0.0, 2.0),
            ],
        )
        .unwrap();
        let sys = eig(&m).unwrap();
        let mut got: Vec<Complex64> = sys.eigenvalues.clone();
        for target in [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 2.0)] {
            let (idx, d) = got
                .iter()
                .enumerate()
                .map(|(i, e)| (i, (e - target).norm()))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap();
            assert!(d < 1e-10, "missing eigenvalue {target}");
            got.remove(idx);
        }
    }

    #[test]
    fn rejects_dim_over_limit() {
        let m = ComplexMatrix::zeros(9);
        assert!(matches!(eig(&m), Err(Error::DimensionTooLarge(9))));
        assert!(matches!(matrix_power(&m, 2), Err(Error::DimensionTooLarge(9))));
    }

    #[test]
    fn matrix_power_zero_is_identity() {
        let m = ComplexMatrix::from_real(3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0])
            .unwrap()
            .into_unitary()
            .unwrap();
        let p = matrix_power(&m, 0).unwrap();
        assert!(p.max_diff(&ComplexMatrix::identity(3)) == 0.0);
    }

    #[test]
    fn matrix_power_matches_naive_product() {
        // permutation-with-phases matrix, k = 7 against a naive loop
        let m = ComplexMatrix::new(
            3,
            vec![
                c(0.0, 0.0), c(0.6, 0.8), c(0.0, 0.0),
                c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0),
                c(0.0, -1.0), c(0.0, 0.0), c(0.0, 0.0),
            ],
        )
        .unwrap()
        .into_unitary()
        .unwrap();
        let mut naive = ComplexMatrix::identity(3);
        naive.kind = MatrixKind::General;
        for _ in 0..7 {
            naive = naive.mul(&m).unwrap();
        }
        let fast = matrix_power(&m, 7).unwrap();
        assert!(fast.max_diff(&naive) < 1e-13);
    }

    #[test]
    fn evolve_hermitian_t_zero_is_identity() {
        let h = ComplexMatrix::from_real(2, &[1.0, 0.5, 0.5, -1.0])
            .unwrap()
            .into_hermitian()
            .unwrap();
        let state = [c(0.6, 0.0), c(0.0, 0.8)];
        let out = evolve_hermitian(&h, 0.0, &state).unwrap();
        for (a, b) in out.iter().zip(&state) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn evolve_hermitian_reverses() {
        let h = ComplexMatrix::from_real(3, &[2.0, 1.0, 0.0, 1.0, 0.0, 3.0, 0.0, 3.0, -1.0])
            .unwrap()
            .into_hermitian()
            .unwrap();
        let state = normalized(&[c(1.0, 0.2), c(-0.3, 0.5), c(0.1, -0.7)]);
        let fwd = evolve_hermitian(&h, 2.37, &state).unwrap();
        assert!((norm2(&fwd) - 1.0).abs() < 1e-12);
        let back = evolve_hermitian(&h, -2.37, &fwd).unwrap();
        for (a, b) in back.iter().zip(&state) {
            assert!((a - b).norm() < 1e-11);
        }
    }

    #[test]
    fn evolve_rejects_dimension_mismatch() {
        let h = ComplexMatrix::identity(3).into_hermitian().unwrap();
        let state = [c(1.0, 0.0); 2];
        assert!(evolve_hermitian(&h, 1.0, &state).is_err());
    }
}
