//! Full-Hilbert-space simulators used to validate the reduced models.
//!
//! The coined walk lives on arcs (vertex, direction) — N·M amplitudes — and
//! one step is a per-vertex coin followed by the flip-flop shift that swaps
//! each arc with its reversal. The continuous-time walk lives on the N
//! vertices. Neither simulator builds a matrix: the coin acts block-by-block,
//! the shift is an arithmetic permutation, and the Hamiltonian action reuses
//! the structural adjacency product.
//!
//! Projecting a full state onto the six arc classes (aa, ab, ba, bc, cb, cc)
//! or the three vertex classes (a, b, c) recovers the small models exactly
//! when the state never left the symmetric subspace; the reported residual is
//! computed directly as ‖state − reconstruction‖₂ so it is trustworthy down
//! to machine precision.
//!
//! All parallel code paths partition elementwise-independent work, so results
//! are bitwise identical with and without the `parallel` feature.

mod chebyshev;

use num_complex::Complex64;

use crate::dtqw::{CoinChoice, AA, AB, BA, BC, CB, CC};
use crate::error::{Error, Result};
use crate::numerics::norm2;
use crate::simplex::{SimplexParams, VertexClass, VertexId};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

const NORM_TOLERANCE: f64 = 1e-9;

/// What the oracle does inside one step of the coined walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMode {
    /// No oracle: the plain walk step (coin argument must be `None`).
    None,
    /// Marked vertices use the coin named by the `coin` argument (required).
    MarkedCoin,
    /// Standalone query: negate amplitudes on marked-vertex arcs, no coin,
    /// no shift (coin argument must be `None`).
    PhaseFlip,
}

/// State of the coined walk: one complex amplitude per arc, indexed
/// `vertex_index · M + direction`.
#[derive(Clone, Debug)]
pub struct FullCoinedState {
    params: SimplexParams,
    amplitudes: Vec<Complex64>,
}

/// State of the continuous-time walk: one complex amplitude per vertex.
#[derive(Clone, Debug)]
pub struct FullVertexState {
    params: SimplexParams,
    amplitudes: Vec<Complex64>,
}

/// Dense arc index of (vertex, direction).
pub fn arc_index(params: &SimplexParams, vertex: VertexId, direction: usize) -> Result<usize> {
    params.validate(vertex)?;
    if direction >= params.m() {
        return Err(Error::InvalidParameter(format!(
            "direction {direction} out of range 0..{}",
            params.m()
        )));
    }
    Ok(params.vertex_index(vertex) * params.m() + direction)
}

/// The reversal of an arc: (v, d) ↦ (u, e) where u is the d-th neighbor of v
/// and e points back at v. An involution without fixed points.
pub fn partner_arc(params: &SimplexParams, arc: usize) -> Result<usize> {
    if arc >= params.n() * params.m() {
        return Err(Error::InvalidParameter(format!(
            "arc index {arc} out of range 0..{}",
            params.n() * params.m()
        )));
    }
    Ok(partner_arc_unchecked(params, arc))
}

fn partner_arc_unchecked(params: &SimplexParams, arc: usize) -> usize {
    let m = params.m();
    let v = params.vertex_from_index(arc / m);
    let u = params
        .neighbor_by_direction(v, arc % m)
        .expect("arc index is in range by construction");
    let back = params
        .direction_to(u, v)
        .expect("graph edges are symmetric");
    params.vertex_index(u) * m + back
}

/// Class of an arc by (source class, target class); indices match the
/// six-dimensional basis order aa, ab, ba, bc, cb, cc. Every c→c arc —
/// intra-clique or external — belongs to cc.
pub fn arc_class(params: &SimplexParams, arc: usize) -> Result<usize> {
    if arc >= params.n() * params.m() {
        return Err(Error::InvalidParameter(format!(
            "arc index {arc} out of range 0..{}",
            params.n() * params.m()
        )));
    }
    Ok(arc_class_unchecked(params, arc))
}

fn arc_class_unchecked(params: &SimplexParams, arc: usize) -> usize {
    let m = params.m();
    let v = params.vertex_from_index(arc / m);
    let u = params
        .neighbor_by_direction(v, arc % m)
        .expect("arc index is in range by construction");
    match (params.classify(v), params.classify(u)) {
        (VertexClass::A, VertexClass::A) => AA,
        (VertexClass::A, VertexClass::B) => AB,
        (VertexClass::B, VertexClass::A) => BA,
        (VertexClass::B, VertexClass::C) => BC,
        (VertexClass::C, VertexClass::B) => CB,
        (VertexClass::C, VertexClass::C) => CC,
        (from, to) => unreachable!("no {from:?}→{to:?} arcs exist on this graph"),
    }
}

/// Arc counts per class: (M(M−1), M, M, M(M−1), M(M−1), M(M−1)²).
pub fn arc_class_sizes(params: &SimplexParams) -> [usize; 6] {
    let m = params.m();
    [
        m * (m - 1),
        m,
        m,
        m * (m - 1),
        m * (m - 1),
        m * (m - 1) * (m - 1),
    ]
}

impl FullCoinedState {
    /// The uniform superposition over all N·M arcs.
    pub fn uniform(params: &SimplexParams) -> Self {
        let len = params.n() * params.m();
        let amp = Complex64::new(1.0 / (len as f64).sqrt(), 0.0);
        Self {
            params: *params,
            amplitudes: vec![amp; len],
        }
    }

    /// Wrap an explicit amplitude vector; must have length N·M and unit norm
    /// to within 1e−9.
    pub fn from_amplitudes(params: &SimplexParams, amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = params.n() * params.m();
        if amplitudes.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "expected {len} arc amplitudes, got {}",
                amplitudes.len()
            )));
        }
        let norm = norm2(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "arc state norm {norm} differs from 1 by more than {NORM_TOLERANCE:e}"
            )));
        }
        Ok(Self {
            params: *params,
            amplitudes,
        })
    }

    /// The basis state concentrated on a single arc.
    pub fn basis_arc(params: &SimplexParams, vertex: VertexId, direction: usize) -> Result<Self> {
        let idx = arc_index(params, vertex, direction)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); params.n() * params.m()];
        amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(Self {
            params: *params,
            amplitudes,
        })
    }

    pub fn params(&self) -> &SimplexParams {
        &self.params
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.amplitudes)
    }

    /// Probability of measuring any marked vertex: the marked clique owns the
    /// first M² arcs in index order.
    pub fn success_probability(&self) -> f64 {
        let marked_arcs = self.params.m() * self.params.m();
        self.amplitudes[..marked_arcs]
            .iter()
            .map(|a| a.norm_sqr())
            .sum()
    }
}

impl FullVertexState {
    /// The uniform superposition over all N vertices.
    pub fn uniform(params: &SimplexParams) -> Self {
        let len = params.n();
        let amp = Complex64::new(1.0 / (len as f64).sqrt(), 0.0);
        Self {
            params: *params,
            amplitudes: vec![amp; len],
        }
    }

    /// Wrap an explicit amplitude vector; must have length N and unit norm
    /// to within 1e−9.
    pub fn from_amplitudes(params: &SimplexParams, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != params.n() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} vertex amplitudes, got {}",
                params.n(),
                amplitudes.len()
            )));
        }
        let norm = norm2(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "vertex state norm {norm} differs from 1 by more than {NORM_TOLERANCE:e}"
            )));
        }
        Ok(Self {
            params: *params,
            amplitudes,
        })
    }

    pub fn params(&self) -> &SimplexParams {
        &self.params
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.amplitudes)
    }

    /// Probability of measuring any marked vertex (the first M indices).
    pub fn success_probability(&self) -> f64 {
        self.amplitudes[..self.params.m()]
            .iter()
            .map(|a| a.norm_sqr())
            .sum()
    }
}

/// What the coin does to one vertex block.
#[derive(Clone, Copy)]
enum BlockOp {
    /// new_d = (2/M)·Σ − old_d.
    Grover,
    /// new_d = old_d − (2/M)·Σ (oracle phase composed with the mixing coin).
    NegatedGrover,
    /// new_d = −old_d.
    Negate,
    Identity,
}

fn block_op(marked: bool, coin: Option<CoinChoice>, oracle: OracleMode) -> BlockOp {
    match oracle {
        OracleMode::None => BlockOp::Grover,
        OracleMode::MarkedCoin => {
            if !marked {
                BlockOp::Grover
            } else {
                match coin.expect("validated by step_full_dtqw") {
                    CoinChoice::Flip => BlockOp::NegatedGrover,
                    CoinChoice::Skw => BlockOp::Negate,
                }
            }
        }
        OracleMode::PhaseFlip => {
            if marked {
                BlockOp::Negate
            } else {
                BlockOp::Identity
            }
        }
    }
}

fn apply_block(op: BlockOp, m: usize, block: &mut [Complex64]) {
    match op {
        BlockOp::Identity => {}
        BlockOp::Negate => {
            for a in block.iter_mut() {
                *a = -*a;
            }
        }
        BlockOp::Grover | BlockOp::NegatedGrover => {
            let mean2: Complex64 =
                block.iter().sum::<Complex64>() * Complex64::new(2.0 / m as f64, 0.0);
            if matches!(op, BlockOp::Grover) {
                for a in block.iter_mut() {
                    *a = mean2 - *a;
                }
            } else {
                for a in block.iter_mut() {
                    *a -= mean2;
                }
            }
        }
    }
}

/// Coin stage: every vertex block is transformed independently.
fn apply_coin(
    params: &SimplexParams,
    coin: Option<CoinChoice>,
    oracle: OracleMode,
    amplitudes: &[Complex64],
) -> Vec<Complex64> {
    let m = params.m();
    let mut out = amplitudes.to_vec();
    let marked_blocks = m; // clique 0 owns vertex indices 0..M

    let transform = |(block_idx, block): (usize, &mut [Complex64])| {
        let op = block_op(block_idx < marked_blocks, coin, oracle);
        apply_block(op, m, block);
    };

    #[cfg(feature = "parallel")]
    out.par_chunks_mut(m).enumerate().for_each(transform);
    #[cfg(not(feature = "parallel"))]
    out.chunks_mut(m).enumerate().for_each(transform);

    out
}

/// Flip-flop shift: out[arc] = in[reversal of arc]. A permutation, hence
/// exactly norm-preserving.
fn shift(params: &SimplexParams, amplitudes: &[Complex64]) -> Vec<Complex64> {
    let fill = |(arc, out): (usize, &mut Complex64)| {
        *out = amplitudes[partner_arc_unchecked(params, arc)];
    };
    let mut out = vec![Complex64::new(0.0, 0.0); amplitudes.len()];

    #[cfg(feature = "parallel")]
    out.par_iter_mut().enumerate().for_each(|(i, o)| fill((i, o)));
    #[cfg(not(feature = "parallel"))]
    out.iter_mut().enumerate().for_each(|(i, o)| fill((i, o)));

    out
}

/// One step of the coined walk. `OracleMode::None` demands `coin == None`
/// (the plain mixing step), `MarkedCoin` demands a coin choice, and
/// `PhaseFlip` is the standalone query — it negates marked-vertex arcs and
/// skips both coin and shift.
pub fn step_full_dtqw(
    state: &FullCoinedState,
    coin: Option<CoinChoice>,
    oracle: OracleMode,
) -> Result<FullCoinedState> {
    match (coin, oracle) {
        (None, OracleMode::None) | (Some(_), OracleMode::MarkedCoin) | (None, OracleMode::PhaseFlip) => {}
        (Some(c), OracleMode::None) => {
            return Err(Error::InvalidParameter(format!(
                "oracle mode None ignores the marked coin; got coin {c}"
            )));
        }
        (None, OracleMode::MarkedCoin) => {
            return Err(Error::InvalidParameter(
                "oracle mode MarkedCoin requires a coin choice".into(),
            ));
        }
        (Some(c), OracleMode::PhaseFlip) => {
            return Err(Error::InvalidParameter(format!(
                "oracle mode PhaseFlip applies no coin; got coin {c}"
            )));
        }
    }
    let after_coin = apply_coin(&state.params, coin, oracle, &state.amplitudes);
    let amplitudes = if oracle == OracleMode::PhaseFlip {
        after_coin
    } else {
        shift(&state.params, &after_coin)
    };
    Ok(FullCoinedState {
        params: state.params,
        amplitudes,
    })
}

/// Project onto the six arc classes. Returns the coefficients in basis order
/// (aa, ab, ba, bc, cb, cc) and the residual norm ‖state − reconstruction‖₂,
/// computed elementwise rather than by subtracting squared norms.
pub fn project_to_subspace_6d(state: &FullCoinedState) -> (Vec<Complex64>, f64) {
    let params = &state.params;
    let sizes = arc_class_sizes(params);
    let mut sums = [Complex64::new(0.0, 0.0); 6];
    let classes: Vec<u8> = (0..state.amplitudes.len())
        .map(|arc| arc_class_unchecked(params, arc) as u8)
        .collect();
    for (amp, &class) in state.amplitudes.iter().zip(&classes) {
        sums[class as usize] += amp;
    }
    let coefficients: Vec<Complex64> = (0..6)
        .map(|i| sums[i] / (sizes[i] as f64).sqrt())
        .collect();
    let per_arc: [Complex64; 6] =
        std::array::from_fn(|i| coefficients[i] / (sizes[i] as f64).sqrt());
    let residual_sq: f64 = state
        .amplitudes
        .iter()
        .zip(&classes)
        .map(|(amp, &class)| (amp - per_arc[class as usize]).norm_sqr())
        .sum();
    (coefficients, residual_sq.sqrt())
}

/// Project onto the three vertex classes (a, b, c); same contract as the
/// six-dimensional projection.
pub fn project_to_subspace_3d(state: &FullVertexState) -> (Vec<Complex64>, f64) {
    let params = &state.params;
    let (na, nb, nc) = params.class_counts();
    let sizes = [na, nb, nc];
    let classes: Vec<u8> = (0..params.n())
        .map(|idx| match params.classify(params.vertex_from_index(idx)) {
            VertexClass::A => 0,
            VertexClass::B => 1,
            VertexClass::C => 2,
        })
        .collect();
    let mut sums = [Complex64::new(0.0, 0.0); 3];
    for (amp, &class) in state.amplitudes.iter().zip(&classes) {
        sums[class as usize] += amp;
    }
    let coefficients: Vec<Complex64> = (0..3)
        .map(|i| sums[i] / (sizes[i] as f64).sqrt())
        .collect();
    let per_vertex: [Complex64; 3] =
        std::array::from_fn(|i| coefficients[i] / (sizes[i] as f64).sqrt());
    let residual_sq: f64 = state
        .amplitudes
        .iter()
        .zip(&classes)
        .map(|(amp, &class)| (amp - per_vertex[class as usize]).norm_sqr())
        .sum();
    (coefficients, residual_sq.sqrt())
}

/// H·x = −γ(A·x) − x restricted to marked vertices, computed structurally.
pub fn apply_hamiltonian(
    params: &SimplexParams,
    gamma: f64,
    x: &[Complex64],
) -> Result<Vec<Complex64>> {
    if x.len() != params.n() {
        return Err(Error::DimensionMismatch(format!(
            "state length {} vs vertex count {}",
            x.len(),
            params.n()
        )));
    }
    let m = params.m();
    let mut out = params.adjacency_action(x)?;
    for (i, o) in out.iter_mut().enumerate() {
        *o = -gamma * *o;
        if i < m {
            *o -= x[i];
        }
    }
    Ok(out)
}

/// Evolve the uniform vertex state under the continuous-time search
/// Hamiltonian for time `t`, with a certified truncation budget `tol`.
pub fn evolve_full_ctqw(m: usize, gamma: f64, t: f64, tol: f64) -> Result<FullVertexState> {
    let params = SimplexParams::new(m)?;
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gamma must be finite and non-negative, got {gamma}"
        )));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "time must be finite and non-negative, got {t}"
        )));
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let initial = FullVertexState::uniform(&params);
    let amplitudes = chebyshev::evolve(&params, gamma, t, tol, initial.amplitudes())?;
    Ok(FullVertexState { params, amplitudes })
}
