//! Search with multiple walk steps per oracle query: U = U₀ᵏ R_w, the
//! resonance rule for k, query/step accounting, and the degenerate
//! perturbation analysis of the composed operator for even and odd k.

use num_complex::Complex64;

use crate::dtqw::{build_u0, initial_state, r_w, success_probability, AA, AB, BA, BC, CB, CC};
use crate::error::{Error, Result};
use crate::numerics::{matrix_power, ComplexMatrix};
use crate::record::{QueryLedger, RunRecord, RunRow};
use crate::spectral::{OverlapClaim, Regime, SpectralPrediction, SpectrumPredictions};

/// Parameters of a multistep run. `k` is derived from the resonance rule
/// unless overridden explicitly.
#[derive(Clone, Copy, Debug)]
pub struct MultistepParams {
    pub m: usize,
    /// Odd-multiple selector: k targets (2n+1)π/φ₊.
    pub n: u32,
    /// Walk steps per oracle query.
    pub k: u64,
    /// Number of oracle queries to simulate.
    pub queries: u64,
}

impl MultistepParams {
    pub fn new(m: usize, n: u32, queries: u64) -> Result<Self> {
        let k = choose_k(m, n)?;
        Ok(Self { m, n, k, queries })
    }

    /// Use an explicit step count instead of the resonance rule.
    pub fn with_explicit_k(m: usize, k: u64, queries: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter(format!(
                "clique size M must be ≥ 2, got {m}"
            )));
        }
        if k == 0 {
            return Err(Error::InvalidParameter(
                "steps per query must be ≥ 1".into(),
            ));
        }
        Ok(Self { m, n: 0, k, queries })
    }
}

/// The slow phase of U₀: φ₊ = arccos(1 − 1/M).
pub fn u0_phase_plus(m: usize) -> Result<f64> {
    if m < 3 {
        return Err(Error::InvalidParameter(format!(
            "phase selection needs M ≥ 3, got {m}"
        )));
    }
    Ok((1.0 - 1.0 / m as f64).acos())
}

/// Resonant steps per query: k = round((2n+1)π/φ₊), at least 1.
pub fn choose_k(m: usize, n: u32) -> Result<u64> {
    let phi = u0_phase_plus(m)?;
    let k = ((2.0 * f64::from(n) + 1.0) * std::f64::consts::PI / phi).round();
    Ok((k as u64).max(1))
}

/// A full multistep trace together with its query/step accounting.
#[derive(Clone, Debug)]
pub struct MultistepRun {
    pub record: RunRecord,
    pub ledger: QueryLedger,
}

/// Success probability after t = 0..=queries applications of U₀ᵏ R_w.
pub fn run_multistep(params: MultistepParams) -> Result<MultistepRun> {
    let u0 = build_u0(params.m)?;
    let op = matrix_power(&u0, params.k)?.mul(&r_w())?;
    let mut state = initial_state(params.m)?.amplitudes().to_vec();
    let mut record = RunRecord::new("multistep");
    record.push_meta("m", params.m);
    record.push_meta("n", params.n);
    record.push_meta("k", params.k);
    record.push_meta("queries", params.queries);
    record.push_meta("steps_per_query", params.k);
    for t in 0..=params.queries {
        if t > 0 {
            state = op.apply(&state)?;
        }
        record.push_row(RunRow {
            index: t as f64,
            success_probability: success_probability(&state),
            walk_steps: params.k * t,
            oracle_queries: t as f64,
        });
    }
    let ledger = QueryLedger::new(params.queries, params.k);
    Ok(MultistepRun { record, ledger })
}

fn basis6(index: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); 6];
    v[index] = Complex64::new(1.0, 0.0);
    v
}

fn basis6_pair(i: usize, ci: Complex64, j: usize, cj: Complex64) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); 6];
    v[i] = ci;
    v[j] = cj;
    v
}

/// What perturbation theory predicts for U₀ᵏ R_w at resonance.
#[derive(Clone, Debug)]
pub struct SigmaPredictions {
    /// The slow conjugate pair, plus the flat |ab⟩ mode when k is odd.
    /// The pair's vectors (∓|aa⟩ + |cc⟩)/√2 are real sections of the
    /// invariant plane spanned by the numerical conjugate eigenvectors,
    /// so they should be checked against that span, not one-to-one.
    pub eigenpairs: Vec<SpectralPrediction>,
    /// sinσ = 2/√M.
    pub sin_sigma: f64,
    /// σ itself (clamped to π/2 for tiny M where 2/√M > 1).
    pub sigma: f64,
    /// π√M/4 ≈ π/(2σ), the query count of the first success peak.
    pub predicted_queries: f64,
    /// The effective degenerate-block matrix: 2×2 over (α_a, α_c) for even
    /// k, 3×3 over (α_a, α_b, α_c) for odd k.
    pub effective: ComplexMatrix,
}

/// Predictions for the composed operator's slow modes at resonance.
pub fn predicted_sigma_eigenpairs(m: usize, k: u64) -> Result<SigmaPredictions> {
    if m < 3 {
        return Err(Error::InvalidParameter(format!(
            "sigma analysis needs M ≥ 3, got {m}"
        )));
    }
    let mf = m as f64;
    let sin_sigma = 2.0 / mf.sqrt();
    let sigma = sin_sigma.min(1.0).asin();
    let lam = |sign: f64| {
        if sin_sigma <= 1.0 {
            Complex64::from_polar(1.0, sign * sigma)
        } else {
            Complex64::new(1.0, sign * sin_sigma)
        }
    };
    let inv_sqrt2 = Complex64::new(1.0 / 2.0f64.sqrt(), 0.0);
    let mut eigenpairs = vec![
        SpectralPrediction::new(
            "|+σ⟩ = (−|aa⟩+|cc⟩)/√2",
            lam(1.0),
            basis6_pair(AA, -inv_sqrt2, CC, inv_sqrt2),
            Regime::LargeM,
        ),
        SpectralPrediction::new(
            "|−σ⟩ = (|aa⟩+|cc⟩)/√2",
            lam(-1.0),
            basis6_pair(AA, inv_sqrt2, CC, inv_sqrt2),
            Regime::LargeM,
        ),
    ];
    let s = 2.0 / mf.sqrt();
    let effective = if k % 2 == 0 {
        ComplexMatrix::from_real(2, &[1.0, s, -s, 1.0])?
            .with_label(format!("(U0^k R_w)_eff even k (M={m})"))
    } else {
        eigenpairs.push(SpectralPrediction::new(
            "|ab⟩ flat mode (odd k)",
            Complex64::new(1.0, 0.0),
            basis6(AB),
            Regime::LargeM,
        ));
        ComplexMatrix::from_real(
            3,
            &[
                1.0, 0.0, s,
                0.0, 1.0, 0.0,
                -s, 0.0, 1.0,
            ],
        )?
        .with_label(format!("(U0^k R_w)_eff odd k (M={m})"))
    };
    Ok(SigmaPredictions {
        eigenpairs,
        sin_sigma,
        sigma,
        predicted_queries: std::f64::consts::PI * mf.sqrt() / 4.0,
        effective,
    })
}

/// Leading-order eigenpairs of U₀ᵏ R_w before the degenerate blocks are
/// split, for the parity of the supplied k.
pub fn leading_order_eigenpairs(m: usize, k: u64) -> Result<Vec<SpectralPrediction>> {
    if m < 3 {
        return Err(Error::InvalidParameter(format!(
            "leading-order analysis needs M ≥ 3, got {m}"
        )));
    }
    let (ct, _) = crate::dtqw::cos_sin_theta(m);
    let phi_minus = ((-1.0 + ct) / 2.0).acos();
    let rot = Complex64::from_polar(1.0, k as f64 * phi_minus);
    let i = Complex64::new(0.0, 1.0);
    let inv_sqrt2 = Complex64::new(1.0 / 2.0f64.sqrt(), 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut list = Vec::new();
    if k % 2 == 0 {
        list.push(SpectralPrediction::new(
            "(−i|ab⟩+|ba⟩)/√2",
            i,
            basis6_pair(AB, -i * inv_sqrt2, BA, inv_sqrt2),
            Regime::LargeM,
        ));
        list.push(SpectralPrediction::new(
            "(i|ab⟩+|ba⟩)/√2",
            -i,
            basis6_pair(AB, i * inv_sqrt2, BA, inv_sqrt2),
            Regime::LargeM,
        ));
        list.push(SpectralPrediction::new("|aa⟩", one, basis6(AA), Regime::LargeM));
        list.push(SpectralPrediction::new("|cc⟩", one, basis6(CC), Regime::LargeM));
    } else {
        list.push(SpectralPrediction::new("|ba⟩", -one, basis6(BA), Regime::LargeM));
        list.push(SpectralPrediction::new("|aa⟩", one, basis6(AA), Regime::LargeM));
        list.push(SpectralPrediction::new("|ab⟩", one, basis6(AB), Regime::LargeM));
        list.push(SpectralPrediction::new("|cc⟩", one, basis6(CC), Regime::LargeM));
    }
    list.push(SpectralPrediction::new(
        "(−i|bc⟩+|cb⟩)/√2",
        rot.conj(),
        basis6_pair(BC, -i * inv_sqrt2, CB, inv_sqrt2),
        Regime::LargeM,
    ));
    list.push(SpectralPrediction::new(
        "(i|bc⟩+|cb⟩)/√2",
        rot,
        basis6_pair(BC, i * inv_sqrt2, CB, inv_sqrt2),
        Regime::LargeM,
    ));
    Ok(list)
}

/// Closed-form eigenvector of U₀ for eigenvalue `l`, |aa⟩ component 1.
fn u0_eigenvector(l: Complex64, ct: f64, st: f64) -> Vec<Complex64> {
    let a = Complex64::new(1.0, 0.0);
    let b = (l - ct) / st * a;
    let c = (1.0 - l * ct) / (l * st) * a;
    let d = (l * l * l - l * l * ct - l * ct * ct + ct) / (l * st * st) * a;
    let e = (l * l * l * ct - l * l * ct * ct - l * ct + 1.0) / (l * l * st * st) * a;
    let f = e * st / (l - ct);
    vec![a, b, c, d, e, f]
}

/// The six exact eigenpairs of U₀ with the large-M statement that |aa⟩ is
/// (approximately) carried by the ±φ₊ pair.
pub fn u0_spectrum_closed_form(m: usize) -> Result<SpectrumPredictions> {
    if m < 3 {
        return Err(Error::InvalidParameter(format!(
            "spectrum closed form needs M ≥ 3, got {m}"
        )));
    }
    let (ct, st) = crate::dtqw::cos_sin_theta(m);
    let mut out = SpectrumPredictions::default();
    for (l, label) in [
        (Complex64::new(1.0, 0.0), "U0 λ=1".to_string()),
        (Complex64::new(-1.0, 0.0), "U0 λ=-1".to_string()),
    ] {
        out.eigenpairs.push(SpectralPrediction::new(
            label,
            l,
            u0_eigenvector(l, ct, st),
            Regime::Exact,
        ));
    }
    // cosφ± = (±1 + cosθ)/2, sinφ± = √((1∓cosθ)(3±cosθ))/2
    for (branch, name) in [(1.0, "φ+"), (-1.0, "φ-")] {
        let cos_phi = (branch + ct) / 2.0;
        let sin_phi = ((1.0 - branch * ct) * (3.0 + branch * ct)).sqrt() / 2.0;
        for sign in [1.0, -1.0] {
            let l = Complex64::new(cos_phi, sign * sin_phi);
            out.eigenpairs.push(SpectralPrediction::new(
                format!("U0 λ=e^{{{}i{name}}}", if sign > 0.0 { "+" } else { "-" }),
                l,
                u0_eigenvector(l, ct, st),
                Regime::Exact,
            ));
        }
    }
    // |aa⟩ ≈ (|φ+⟩ + |−φ+⟩)/√2 once each side is normalized
    let cos_p = (1.0 + ct) / 2.0;
    let sin_p = ((1.0 - ct) * (3.0 + ct)).sqrt() / 2.0;
    let plus = crate::numerics::normalized(&u0_eigenvector(
        Complex64::new(cos_p, sin_p),
        ct,
        st,
    ));
    let minus = crate::numerics::normalized(&u0_eigenvector(
        Complex64::new(cos_p, -sin_p),
        ct,
        st,
    ));
    let combo: Vec<Complex64> = plus.iter().zip(&minus).map(|(p, q)| p + q).collect();
    out.overlap_claims.push(OverlapClaim::new(
        "|aa⟩ ≈ (|φ+⟩+|−φ+⟩)/√2",
        combo,
        basis6(AA),
        0.99,
        Regime::LargeM,
    ));
    Ok(out)
}
