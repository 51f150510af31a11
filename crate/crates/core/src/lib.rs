//! Simulation and verification of fault-tolerant decoding interfaces for
//! quantum LDPC codes.
//!
//! The crate is layered bottom up: [`gf2`] linear algebra, [`pauli`]
//! operators, [`css`] codes and families, [`circuit`] intermediate
//! representation with tableau and Pauli-frame backends, [`noise`] samplers,
//! then the [`interface`] circuits, the [`scheduler`] that stages them with
//! exact qubit accounting, and the [`blocktree`] failure-process analysis.

pub mod blocktree;
pub mod circuit;
pub mod css;
pub mod gf2;
pub mod interface;
pub mod noise;
pub mod pauli;
pub mod scheduler;
pub mod stats;
