//! Canonical forms for small digraphs by exhaustive permutation search.
//!
//! A digraph on `n <= 8` vertices packs into a 64-bit code (bit `u*n + v`
//! set iff `(u, v)` is an arc); the canonical form is the smallest code over
//! all vertex relabellings, so two digraphs have equal canonical forms
//! exactly when they are isomorphic.

use std::fmt;

use thiserror::Error;

use crate::bits;
use crate::digraph::Digraph;

pub const CANON_VERTEX_LIMIT: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CanonError {
    #[error("canonicalisation is exhaustive over n! relabellings and refuses n = {n} > {limit}")]
    TooManyVertices { n: usize, limit: usize },
}

#[derive(Clone, Debug)]
pub struct CanonicalForm {
    n: usize,
    code: u64,
    witness: Vec<usize>,
}

// Identity is the canonical code alone; the witness depends on the
// labelling of the input.
impl PartialEq for CanonicalForm {
    fn eq(&self, other: &Self) -> bool {
        (self.n, self.code) == (other.n, other.code)
    }
}

impl Eq for CanonicalForm {}

impl std::hash::Hash for CanonicalForm {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.n, self.code).hash(state);
    }
}

impl PartialOrd for CanonicalForm {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CanonicalForm {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.n, self.code).cmp(&(other.n, other.code))
    }
}

impl CanonicalForm {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn code(&self) -> u64 {
        self.code
    }

    /// The relabelling that carries the input digraph onto the canonical one.
    pub fn witness(&self) -> &[usize] {
        &self.witness
    }

    pub fn arcs(&self) -> Vec<(usize, usize)> {
        decode_arcs(self.code, self.n)
    }

    pub fn to_digraph(&self) -> Digraph {
        Digraph::from_arcs(self.n, &self.arcs()).expect("canonical codes are valid arc sets")
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arcs = self.arcs();
        if arcs.is_empty() {
            return write!(f, "-");
        }
        let mut first = true;
        for (u, v) in arcs {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{u}>{v}")?;
            first = false;
        }
        Ok(())
    }
}

pub(crate) fn encode(d: &Digraph) -> u64 {
    debug_assert!(d.n() <= CANON_VERTEX_LIMIT);
    let n = d.n();
    let mut code = 0u64;
    for (u, v) in d.arcs() {
        code |= 1 << (u * n + v);
    }
    code
}

pub(crate) fn decode_arcs(code: u64, n: usize) -> Vec<(usize, usize)> {
    let mut arcs = Vec::with_capacity(code.count_ones() as usize);
    let mut rest = code;
    while rest != 0 {
        let bit = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        arcs.push((bit / n, bit % n));
    }
    arcs
}

pub(crate) fn apply_perm(code: u64, n: usize, perm: &[usize]) -> u64 {
    let mut out = 0u64;
    let mut rest = code;
    while rest != 0 {
        let bit = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        out |= 1 << (perm[bit / n] * n + perm[bit % n]);
    }
    out
}

/// Canonicalises with the default vertex limit of 8.
pub fn canonicalize(d: &Digraph) -> Result<CanonicalForm, CanonError> {
    canonicalize_with_limit(d, CANON_VERTEX_LIMIT)
}

/// Canonicalises, refusing digraphs above `limit` vertices. Limits above 8
/// are clamped: the packed code only covers 64 arc positions.
pub fn canonicalize_with_limit(d: &Digraph, limit: usize) -> Result<CanonicalForm, CanonError> {
    let limit = limit.min(CANON_VERTEX_LIMIT);
    let n = d.n();
    if n > limit {
        return Err(CanonError::TooManyVertices { n, limit });
    }
    let code = encode(d);
    let mut best = code;
    let mut witness: Vec<usize> = (0..n).collect();
    for perm in bits::permutations(n).iter().skip(1) {
        let mapped = apply_perm(code, n, perm);
        if mapped < best {
            best = mapped;
            witness = perm.clone();
        }
    }
    Ok(CanonicalForm { n, code: best, witness })
}
