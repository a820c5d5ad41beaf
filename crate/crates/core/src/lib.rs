//! Exact computation with kernels by H-walks in arc-coloured digraphs.
//!
//! A pattern H is a digraph whose vertices colour the arcs of instance
//! digraphs; a walk in an instance is an H-walk when its colour sequence is
//! a walk in H, and an H-kernel is a vertex set that is independent and
//! absorbent under H-walks. This crate decides which patterns are
//! panchromatic (every instance under every colouring has an H-kernel),
//! computes kernels and reachability exactly, rewrites instances to
//! simulate an extra pattern arc, and hunts counterexamples by exhaustive
//! search at small orders.

mod bits;

pub mod canon;
pub mod cli;
pub mod digraph;
pub mod format;
pub mod hwalk;
pub mod kernel;
pub mod recognizer;
pub mod reductions;
pub mod search;

pub use digraph::{ColouredInstance, Digraph, Pattern, VertexPartition};
pub use hwalk::{h_reach, ReachRelation};
pub use kernel::{check_kernel, enumerate_h_kernels, find_h_kernel};
pub use recognizer::{recognize, Verdict};
pub use search::{classify_order, falsify, SearchBounds};
