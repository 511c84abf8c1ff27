//! The simplex of complete graphs: M+1 cliques of M vertices each, arranged
//! so every vertex owns exactly one external edge and every pair of cliques
//! is joined by exactly one edge.
//!
//! A vertex is addressed as (clique, slot) where the slot names the clique
//! its external edge reaches, so clique `i` hosts slots {0..=M} \ {i} and the
//! external partner of (i, j) is (j, i). One clique is fully marked; vertices
//! fall into three classes: `a` (marked), `b` (external edge into the marked
//! clique), `c` (everything else, two hops from the marked clique).

use num_complex::Complex64;

use crate::error::{Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Vertex address: `clique` it lives in, `slot` = clique its external edge
/// reaches. Both range over 0..=M with `slot != clique`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId {
    pub clique: usize,
    pub slot: usize,
}

impl VertexId {
    pub fn new(clique: usize, slot: usize) -> Self {
        Self { clique, slot }
    }

    /// The other endpoint of this vertex's external edge.
    pub fn external_neighbor(self) -> Self {
        Self { clique: self.slot, slot: self.clique }
    }
}

impl std::fmt::Display for VertexId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.clique, self.slot)
    }
}

/// Distance-from-marked classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexClass {
    /// In the marked clique.
    A,
    /// External edge reaches the marked clique.
    B,
    /// Two hops from the marked clique.
    C,
}

/// Graph instance: clique size M, N = M(M+1) vertices, one marked clique.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimplexParams {
    m: usize,
    marked_clique: usize,
}

impl SimplexParams {
    /// Simplex with clique size `m` (≥ 2) and clique 0 marked.
    pub fn new(m: usize) -> Result<Self> {
        Self::with_marked_clique(m, 0)
    }

    pub fn with_marked_clique(m: usize, marked_clique: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter(format!(
                "clique size M must be ≥ 2, got {m}"
            )));
        }
        if marked_clique > m {
            return Err(Error::InvalidParameter(format!(
                "marked clique {marked_clique} out of range 0..={m}"
            )));
        }
        Ok(Self { m, marked_clique })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Total vertices, M(M+1).
    pub fn n(&self) -> usize {
        self.m * (self.m + 1)
    }

    pub fn clique_count(&self) -> usize {
        self.m + 1
    }

    /// Every vertex has degree M: M−1 intra-clique edges plus one external.
    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn marked_clique(&self) -> usize {
        self.marked_clique
    }

    pub fn validate(&self, v: VertexId) -> Result<()> {
        if v.clique > self.m || v.slot > self.m || v.slot == v.clique {
            return Err(Error::InvalidVertex(v.to_string(), self.m));
        }
        Ok(())
    }

    /// Dense index in clique-major order; slots ascend within a clique.
    pub fn vertex_index(&self, v: VertexId) -> usize {
        let rank = if v.slot < v.clique { v.slot } else { v.slot - 1 };
        v.clique * self.m + rank
    }

    pub fn vertex_from_index(&self, index: usize) -> VertexId {
        let clique = index / self.m;
        let rank = index % self.m;
        let slot = if rank < clique { rank } else { rank + 1 };
        VertexId { clique, slot }
    }

    /// All vertices in index order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.n()).map(|i| self.vertex_from_index(i))
    }

    /// The `direction`-th neighbor of `v` without allocating: directions
    /// 0..M−1 are the intra-clique neighbors in ascending slot order,
    /// direction M−1 is the external neighbor. This fixed ordering defines
    /// the coin index for the full-space walk.
    pub fn neighbor_by_direction(&self, v: VertexId, direction: usize) -> Result<VertexId> {
        self.validate(v)?;
        if direction >= self.m {
            return Err(Error::InvalidParameter(format!(
                "direction {direction} out of range 0..{}",
                self.m
            )));
        }
        if direction == self.m - 1 {
            return Ok(v.external_neighbor());
        }
        // direction-th slot in {0..=M} \ {clique, slot}
        let lo = v.clique.min(v.slot);
        let hi = v.clique.max(v.slot);
        let mut slot = direction;
        if slot >= lo {
            slot += 1;
        }
        if slot >= hi {
            slot += 1;
        }
        Ok(VertexId { clique: v.clique, slot })
    }

    /// All M neighbors of `v` in direction order.
    pub fn neighbors(&self, v: VertexId) -> Result<Vec<VertexId>> {
        (0..self.m).map(|d| self.neighbor_by_direction(v, d)).collect()
    }

    /// Inverse of `neighbor_by_direction`: the direction index `d` with
    /// `neighbor_by_direction(from, d) == to`, or an error if the vertices
    /// are not adjacent.
    pub fn direction_to(&self, from: VertexId, to: VertexId) -> Result<usize> {
        self.validate(from)?;
        self.validate(to)?;
        if to == from.external_neighbor() {
            return Ok(self.m - 1);
        }
        if to.clique != from.clique || to.slot == from.slot {
            return Err(Error::InvalidParameter(format!(
                "{to} is not adjacent to {from}"
            )));
        }
        // Undo the two skips over `from`'s own clique and slot labels.
        let mut d = to.slot;
        if from.clique < to.slot {
            d -= 1;
        }
        if from.slot < to.slot {
            d -= 1;
        }
        Ok(d)
    }

    pub fn classify(&self, v: VertexId) -> VertexClass {
        if v.clique == self.marked_clique {
            VertexClass::A
        } else if v.slot == self.marked_clique {
            VertexClass::B
        } else {
            VertexClass::C
        }
    }

    pub fn is_marked(&self, v: VertexId) -> bool {
        v.clique == self.marked_clique
    }

    /// (|a|, |b|, |c|) = (M, M, M(M−1)).
    pub fn class_counts(&self) -> (usize, usize, usize) {
        (self.m, self.m, self.m * (self.m - 1))
    }

    /// A·x for the graph adjacency matrix, computed structurally in O(N·M)
    /// flops worth of work but O(N) memory traffic: the intra-clique part of
    /// each row is (clique sum − own amplitude) and the external part is the
    /// partner amplitude.
    pub fn adjacency_action(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        #[cfg(feature = "parallel")]
        {
            self.adjacency_action_par(x)
        }
        #[cfg(not(feature = "parallel"))]
        {
            self.adjacency_action_seq(x)
        }
    }

    /// Single-threaded [`Self::adjacency_action`]; kept callable for
    /// benchmarking against the parallel path.
    pub fn adjacency_action_seq(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let sums = self.clique_sums(x)?;
        let mut out = vec![Complex64::new(0.0, 0.0); x.len()];
        for (idx, o) in out.iter_mut().enumerate() {
            *o = self.adjacency_row(x, &sums, idx);
        }
        Ok(out)
    }

    #[cfg(feature = "parallel")]
    pub fn adjacency_action_par(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let sums = self.clique_sums(x)?;
        let mut out = vec![Complex64::new(0.0, 0.0); x.len()];
        // chunk by clique: each output element is an independent expression,
        // so the result is identical under any partitioning
        out.par_chunks_mut(self.m).enumerate().for_each(|(clique, chunk)| {
            for (rank, o) in chunk.iter_mut().enumerate() {
                *o = self.adjacency_row(x, &sums, clique * self.m + rank);
            }
        });
        Ok(out)
    }

    fn clique_sums(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "vertex vector length {} but N = {}",
                x.len(),
                self.n()
            )));
        }
        // fixed slot-order summation keeps results bit-identical everywhere
        Ok(x.chunks(self.m).map(|c| c.iter().sum()).collect())
    }

    fn adjacency_row(&self, x: &[Complex64], sums: &[Complex64], idx: usize) -> Complex64 {
        let v = self.vertex_from_index(idx);
        let partner = self.vertex_index(v.external_neighbor());
        sums[v.clique] - x[idx] + x[partner]
    }
}
