//! Closed-form spectral claims and the machinery to check them against the
//! numerical eigensolver.
//!
//! Each dynamics module exposes its analytic eigenvalues/eigenvectors as
//! [`SpectralPrediction`]s tagged with a [`Regime`]: `Exact` claims must match
//! the solver to near machine precision at every M, `LargeM` claims only to
//! leading order in 1/M (or 1/√M), so their tolerances are set by the caller.
//! Statements of the form "state X is approximately state Y" are
//! [`OverlapClaim`]s rather than eigenpairs.

use num_complex::Complex64;

use crate::numerics::{inner, norm2, normalized, EigenSystem};

/// How strongly a closed form is claimed to hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// Holds to numerical precision at every valid M.
    Exact,
    /// Leading order in 1/M; deviations shrink as M grows.
    LargeM,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Exact => write!(f, "exact"),
            Regime::LargeM => write!(f, "large-M"),
        }
    }
}

/// One closed-form eigenpair claim about a specific operator.
#[derive(Clone, Debug)]
pub struct SpectralPrediction {
    pub label: String,
    pub eigenvalue: Complex64,
    /// Closed-form eigenvector components, not necessarily normalized.
    pub eigenvector: Vec<Complex64>,
    pub regime: Regime,
}

impl SpectralPrediction {
    pub fn new(
        label: impl Into<String>,
        eigenvalue: Complex64,
        eigenvector: Vec<Complex64>,
        regime: Regime,
    ) -> Self {
        Self { label: label.into(), eigenvalue, eigenvector, regime }
    }

    pub fn normalized_vector(&self) -> Vec<Complex64> {
        normalized(&self.eigenvector)
    }

    /// Distance from the predicted eigenvalue to the closest numerical one.
    pub fn value_error(&self, sys: &EigenSystem) -> f64 {
        sys.eigenvalues
            .iter()
            .map(|ev| (ev - self.eigenvalue).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Overlap of the predicted vector with the span of all numerical
    /// eigenvectors whose eigenvalue lies within `cluster_tol` of the
    /// prediction. Handles degenerate eigenvalues, where no single numerical
    /// eigenvector need match the closed form.
    pub fn subspace_overlap(&self, sys: &EigenSystem, cluster_tol: f64) -> f64 {
        let target = self.normalized_vector();
        let cluster: Vec<&Vec<Complex64>> = sys
            .eigenvalues
            .iter()
            .zip(&sys.eigenvectors)
            .filter(|(ev, _)| (*ev - self.eigenvalue).norm() <= cluster_tol)
            .map(|(_, v)| v)
            .collect();
        if cluster.is_empty() {
            return 0.0;
        }
        span_overlap(cluster.into_iter().map(|v| v.as_slice()), &target)
    }
}

/// Norm of the projection of the (normalized) target onto the span of the
/// given vectors, computed by Gram-Schmidt orthonormalization. Returns a
/// value in [0, 1]; 1 means the target lies entirely in the span.
pub fn span_overlap<'a>(
    vectors: impl IntoIterator<Item = &'a [Complex64]>,
    target: &[Complex64],
) -> f64 {
    let target = normalized(target);
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for v in vectors {
        let mut w = v.to_vec();
        for b in &basis {
            let c = inner(b, &w);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= c * bi;
            }
        }
        if norm2(&w) > 1e-8 {
            basis.push(normalized(&w));
        }
    }
    let proj_sq: f64 = basis.iter().map(|b| inner(b, &target).norm_sqr()).sum();
    proj_sq.min(1.0).sqrt()
}

/// A "state X ≈ state Y" claim, checked by inner-product magnitude.
#[derive(Clone, Debug)]
pub struct OverlapClaim {
    pub label: String,
    pub lhs: Vec<Complex64>,
    pub rhs: Vec<Complex64>,
    pub min_overlap: f64,
    pub regime: Regime,
}

impl OverlapClaim {
    pub fn new(
        label: impl Into<String>,
        lhs: Vec<Complex64>,
        rhs: Vec<Complex64>,
        min_overlap: f64,
        regime: Regime,
    ) -> Self {
        Self { label: label.into(), lhs, rhs, min_overlap, regime }
    }

    /// |⟨lhs|rhs⟩| after normalizing both sides.
    pub fn measured_overlap(&self) -> f64 {
        crate::numerics::overlap(&self.lhs, &self.rhs)
    }

    pub fn holds(&self) -> bool {
        self.measured_overlap() >= self.min_overlap
    }
}

/// Eigenpair claims plus approximation statements for one operator.
#[derive(Clone, Debug, Default)]
pub struct SpectrumPredictions {
    pub eigenpairs: Vec<SpectralPrediction>,
    pub overlap_claims: Vec<OverlapClaim>,
}

impl SpectrumPredictions {
    pub fn exact_eigenpairs(&self) -> impl Iterator<Item = &SpectralPrediction> {
        self.eigenpairs.iter().filter(|p| p.regime == Regime::Exact)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{eig, ComplexMatrix};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn span_overlap_of_conjugate_pair_contains_real_combination() {
        // (1, i)/√2 and (1, −i)/√2 span the same plane as (1, 0) and (0, 1)
        let s = 1.0 / 2.0f64.sqrt();
        let v1 = vec![c(s, 0.0), c(0.0, s)];
        let v2 = vec![c(s, 0.0), c(0.0, -s)];
        let target = vec![c(-s, 0.0), c(s, 0.0)];
        let ov = span_overlap([v1.as_slice(), v2.as_slice()], &target);
        assert!(ov > 1.0 - 1e-12, "span overlap {ov}");
        // but a single member of the pair only captures 1/√2 of it
        let ov1 = span_overlap([v1.as_slice()], &target);
        assert!((ov1 - 1.0 / 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn exact_prediction_matches_diagonal_matrix() {
        let m = ComplexMatrix::from_real(2, &[2.0, 0.0, 0.0, -1.0])
            .unwrap()
            .into_hermitian()
            .unwrap();
        let sys = eig(&m).unwrap();
        let pred = SpectralPrediction::new(
            "upper mode",
            c(2.0, 0.0),
            vec![c(3.0, 0.0), c(0.0, 0.0)], // unnormalized on purpose
            Regime::Exact,
        );
        assert!(pred.value_error(&sys) < 1e-14);
        assert!(pred.subspace_overlap(&sys, 1e-8) > 1.0 - 1e-12);
    }

    #[test]
    fn degenerate_subspace_overlap_sees_the_whole_eigenspace() {
        // identity has a fully degenerate spectrum; any unit vector lies in
        // the lambda=1 eigenspace even though no single returned eigenvector
        // need equal it
        let sys = eig(&ComplexMatrix::identity(3)).unwrap();
        let pred = SpectralPrediction::new(
            "arbitrary direction",
            c(1.0, 0.0),
            vec![c(1.0, 0.0), c(1.0, 1.0), c(0.0, -2.0)],
            Regime::Exact,
        );
        assert!(pred.subspace_overlap(&sys, 1e-10) > 1.0 - 1e-12);
    }

    #[test]
    fn wrong_prediction_scores_low() {
        let m = ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0])
            .unwrap()
            .into_hermitian()
            .unwrap();
        let sys = eig(&m).unwrap();
        let pred = SpectralPrediction::new(
            "claims the wrong eigenvector",
            c(1.0, 0.0),
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            Regime::Exact,
        );
        assert!(pred.value_error(&sys) < 1e-14);
        assert!(pred.subspace_overlap(&sys, 1e-8) < 1e-6);
    }

    #[test]
    fn overlap_claim_measures_cosine() {
        let claim = OverlapClaim::new(
            "45 degrees",
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            0.5,
            Regime::LargeM,
        );
        assert!((claim.measured_overlap() - 1.0 / 2.0_f64.sqrt()).abs() < 1e-14);
        assert!(claim.holds());
    }
}
