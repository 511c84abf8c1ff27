//! Simulation and verification toolkit for quantum search on the simplex of
//! complete graphs: M+1 fully connected cliques of M vertices each, with one
//! marked vertex hiding in one clique.
//!
//! The crate covers four ways of attacking the same search problem —
//! discrete-time coined walks in their six-dimensional collapsed subspace,
//! continuous-time walks in a three-dimensional one, a multi-step discrete
//! walk that trades walk steps for oracle queries, and classical random-walk
//! baselines — plus a full-Hilbert-space simulator used to cross-check every
//! reduced model, and spectral predictions for all of them.

pub mod classical;
pub mod ctqw;
pub mod dtqw;
pub mod error;
pub mod fullspace;
pub mod multistep;
pub mod numerics;
pub mod record;
pub mod simplex;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
