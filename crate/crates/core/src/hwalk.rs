//! H-walk semantics. A walk in a coloured instance is an H-walk when its
//! arc-colour sequence is itself a walk in the pattern H; walks have length
//! at least one. The implementation pairs each instance vertex with the
//! colour of the last arc used, so H-walk reachability becomes plain
//! reachability in a product digraph.

use std::collections::VecDeque;

use thiserror::Error;

use crate::bits;
use crate::digraph::{ColouredInstance, Digraph, Pattern};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HwalkError {
    #[error("instance uses {inst} colours but the pattern has {pattern} vertices")]
    ColourCountMismatch { inst: usize, pattern: usize },
}

/// An instance vertex paired with the colour of the last arc traversed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProductState {
    pub v: usize,
    pub c: usize,
}

/// The product digraph over all `n * k` states `(v, c)`; there is an arc
/// `(v, c) -> (w, c')` exactly when `(v, w)` is an arc coloured `c'` and
/// `(c, c')` is an arc of H.
#[derive(Debug)]
pub struct ProductGraph {
    graph: Digraph,
    n: usize,
    k: usize,
}

impl ProductGraph {
    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn state_index(&self, v: usize, c: usize) -> usize {
        debug_assert!(v < self.n && c < self.k);
        v * self.k + c
    }

    pub fn state(&self, index: usize) -> ProductState {
        ProductState { v: index / self.k, c: index % self.k }
    }

    pub fn state_count(&self) -> usize {
        self.n * self.k
    }
}

fn check_sizes(inst: &ColouredInstance, h: &Pattern) -> Result<(), HwalkError> {
    if inst.h_size() != h.n() {
        return Err(HwalkError::ColourCountMismatch { inst: inst.h_size(), pattern: h.n() });
    }
    Ok(())
}

pub fn build_product(inst: &ColouredInstance, h: &Pattern) -> Result<ProductGraph, HwalkError> {
    check_sizes(inst, h)?;
    let n = inst.d().n();
    let k = h.n();
    let mut graph = Digraph::new(n * k).expect("n, k >= 1");
    for (v, w) in inst.d().arcs() {
        let c_next = inst.colour(v, w);
        for c in 0..k {
            if h.has_arc(c, c_next) {
                graph.insert_arc(v * k + c, w * k + c_next);
            }
        }
    }
    Ok(ProductGraph { graph, n, k })
}

/// Boolean relation: `reaches(u, v)` holds when some H-walk of length >= 1
/// runs from `u` to `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachRelation {
    n: usize,
    wpr: usize,
    rows: Vec<u64>,
}

impl ReachRelation {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn reaches(&self, u: usize, v: usize) -> bool {
        assert!(u < self.n && v < self.n);
        bits::test_bit(self.row(u), v)
    }

    pub(crate) fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.wpr..(u + 1) * self.wpr]
    }

    /// Vertices reachable from `u`, ascending.
    pub fn reachable_from(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        bits::iter_ones(self.row(u))
    }

    /// Transposed rows: `column(v)` holds the vertices that reach `v`.
    pub(crate) fn transpose_rows(&self) -> Vec<u64> {
        let mut cols = vec![0u64; self.n * self.wpr];
        for u in 0..self.n {
            for v in bits::iter_ones(self.row(u)) {
                bits::set_bit(&mut cols[v * self.wpr..(v + 1) * self.wpr], u);
            }
        }
        cols
    }
}

/// Start states for walks leaving `u`: one per out-arc of `u`, already one
/// arc into the walk.
fn start_states(inst: &ColouredInstance, k: usize, u: usize) -> Vec<usize> {
    inst.d().out_neighbors(u).map(|w| w * k + inst.colour(u, w)).collect()
}

pub fn h_reach(inst: &ColouredInstance, h: &Pattern) -> Result<ReachRelation, HwalkError> {
    let product = build_product(inst, h)?;
    let n = inst.d().n();
    let k = h.n();
    let wpr = bits::words_for(n);
    let mut rows = vec![0u64; n * wpr];
    for u in 0..n {
        let starts = start_states(inst, k, u);
        if starts.is_empty() {
            continue;
        }
        let mut state_set = product.graph.reach_words_from(starts.iter().copied());
        for &s in &starts {
            bits::set_bit(&mut state_set, s);
        }
        let row = &mut rows[u * wpr..(u + 1) * wpr];
        for s in bits::iter_ones(&state_set) {
            bits::set_bit(row, s / k);
        }
    }
    Ok(ReachRelation { n, wpr, rows })
}

/// An H-walk as a vertex sequence with its arc-colour sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HWalk {
    pub vertices: Vec<usize>,
    pub colours: Vec<usize>,
}

impl HWalk {
    /// Re-checks the walk arc by arc against the instance and the pattern.
    pub fn is_valid(&self, inst: &ColouredInstance, h: &Pattern) -> bool {
        if self.vertices.len() < 2 || self.colours.len() != self.vertices.len() - 1 {
            return false;
        }
        for (i, pair) in self.vertices.windows(2).enumerate() {
            if !inst.d().has_arc(pair[0], pair[1]) || inst.colour(pair[0], pair[1]) != self.colours[i] {
                return false;
            }
        }
        self.colours.windows(2).all(|p| h.has_arc(p[0], p[1]))
    }
}

/// A shortest H-walk from `u` to `v`, or None. Breadth-first over the
/// product with start states seeded in ascending order and successors
/// expanded ascending, so the returned walk is deterministic.
pub fn witness_walk(
    inst: &ColouredInstance,
    h: &Pattern,
    u: usize,
    v: usize,
) -> Result<Option<HWalk>, HwalkError> {
    let product = build_product(inst, h)?;
    let n = inst.d().n();
    let k = h.n();
    assert!(u < n && v < n);
    let starts = start_states(inst, k, u);
    let mut parent: Vec<Option<usize>> = vec![None; product.state_count()];
    let mut seen = vec![false; product.state_count()];
    let mut queue = VecDeque::new();
    let mut goal = None;
    'search: {
        for &s in &starts {
            if !seen[s] {
                seen[s] = true;
                queue.push_back(s);
                if s / k == v {
                    goal = Some(s);
                    break 'search;
                }
            }
        }
        while let Some(s) = queue.pop_front() {
            for t in product.graph.out_neighbors(s) {
                if !seen[t] {
                    seen[t] = true;
                    parent[t] = Some(s);
                    if t / k == v {
                        goal = Some(t);
                        break 'search;
                    }
                    queue.push_back(t);
                }
            }
        }
    }
    let Some(goal) = goal else {
        return Ok(None);
    };
    let mut states = vec![goal];
    while let Some(p) = parent[*states.last().unwrap()] {
        states.push(p);
    }
    states.reverse();
    let mut vertices = vec![u];
    let mut colours = Vec::with_capacity(states.len());
    for s in states {
        vertices.push(s / k);
        colours.push(s % k);
    }
    let walk = HWalk { vertices, colours };
    debug_assert!(walk.is_valid(inst, h));
    if walk.is_valid(inst, h) {
        Ok(Some(walk))
    } else {
        Ok(None)
    }
}
