//! Fundamental digraph types: plain digraphs, patterns (digraphs whose
//! vertices act as arc colours), coloured instances, and vertex partitions,
//! together with the complement, contraction and expansion operations.

use std::fmt;

use thiserror::Error;

use crate::bits;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("a digraph needs at least one vertex")]
    EmptyVertexSet,
    #[error("vertex {vertex} out of range for a digraph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("duplicate arc ({u}, {v})")]
    DuplicateArc { u: usize, v: usize },
    #[error("colour {colour} out of range, expected < {h_size}")]
    ColourOutOfRange { colour: usize, h_size: usize },
    #[error("arc ({u}, {v}) has no colour assigned")]
    UncolouredArc { u: usize, v: usize },
    #[error("pair ({u}, {v}) is not an arc")]
    NotAnArc { u: usize, v: usize },
    #[error("expected {expected} arc colours, got {got}")]
    WrongColourCount { got: usize, expected: usize },
}

/// A finite digraph on vertices `0..n`. Arcs are an unordered *set* of
/// ordered pairs; loops are permitted. Stored as word-packed adjacency rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    n: usize,
    wpr: usize,
    rows: Vec<u64>,
}

impl Digraph {
    pub fn new(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyVertexSet);
        }
        let wpr = bits::words_for(n);
        Ok(Digraph { n, wpr, rows: vec![0; n * wpr] })
    }

    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut d = Digraph::new(n)?;
        for &(u, v) in arcs {
            d.check_vertex(u)?;
            d.check_vertex(v)?;
            if !d.insert_arc(u, v) {
                return Err(GraphError::DuplicateArc { u, v });
            }
        }
        Ok(d)
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.n {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Inserts an arc, returning false when it was already present.
    pub fn insert_arc(&mut self, u: usize, v: usize) -> bool {
        assert!(u < self.n && v < self.n);
        let row = &mut self.rows[u * self.wpr..(u + 1) * self.wpr];
        if bits::test_bit(row, v) {
            false
        } else {
            bits::set_bit(row, v);
            true
        }
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        assert!(u < self.n && v < self.n);
        bits::test_bit(self.row(u), v)
    }

    pub(crate) fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.wpr..(u + 1) * self.wpr]
    }

    pub fn arc_count(&self) -> usize {
        bits::count_ones(&self.rows)
    }

    /// Arcs in ascending `(u, v)` order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| bits::iter_ones(self.row(u)).map(move |v| (u, v)))
    }

    pub fn out_neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        assert!(u < self.n);
        bits::iter_ones(self.row(u))
    }

    pub fn out_degree(&self, u: usize) -> usize {
        bits::count_ones(self.row(u))
    }

    pub fn in_degree(&self, v: usize) -> usize {
        assert!(v < self.n);
        (0..self.n).filter(|&u| self.has_arc(u, v)).count()
    }

    pub fn has_loop(&self, v: usize) -> bool {
        self.has_arc(v, v)
    }

    pub fn is_fully_looped(&self) -> bool {
        (0..self.n).all(|v| self.has_loop(v))
    }

    /// Vertex set reachable from `starts` by walks of length >= 1,
    /// word-packed. The start vertices themselves are included only when
    /// some walk re-enters them.
    pub(crate) fn reach_words_from(&self, starts: impl Iterator<Item = usize>) -> Vec<u64> {
        let mut reached = vec![0u64; self.wpr];
        let mut frontier = vec![0u64; self.wpr];
        for s in starts {
            for (f, r) in frontier.iter_mut().zip(self.row(s)) {
                *f |= r;
            }
        }
        let mut next = vec![0u64; self.wpr];
        loop {
            let mut new_any = false;
            for w in 0..self.wpr {
                let fresh = frontier[w] & !reached[w];
                frontier[w] = fresh;
                reached[w] |= fresh;
                new_any |= fresh != 0;
            }
            if !new_any {
                return reached;
            }
            next.iter_mut().for_each(|w| *w = 0);
            for u in bits::iter_ones(&frontier.clone()) {
                for (nw, r) in next.iter_mut().zip(self.row(u)) {
                    *nw |= r;
                }
            }
            std::mem::swap(&mut frontier, &mut next);
        }
    }
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digraph(n={}, arcs={:?})", self.n, self.arcs().collect::<Vec<_>>())
    }
}

/// A digraph whose vertices are read as colours for the arcs of instances.
/// Loops are significant but not required at construction; the recognizer
/// reports unlooped vertices instead of rejecting them.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Pattern {
    g: Digraph,
}

impl Pattern {
    pub fn new(g: Digraph) -> Self {
        Pattern { g }
    }

    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self, GraphError> {
        Ok(Pattern::new(Digraph::from_arcs(n, arcs)?))
    }

    /// Complete digraph with all loops on `n` vertices.
    pub fn complete_looped(n: usize) -> Self {
        let mut g = Digraph::new(n).expect("n >= 1");
        for u in 0..n {
            for v in 0..n {
                g.insert_arc(u, v);
            }
        }
        Pattern::new(g)
    }

    /// Two looped vertices and nothing else.
    pub fn two_k1() -> Self {
        Pattern::from_arcs(2, &[(0, 0), (1, 1)]).unwrap()
    }

    pub fn digraph(&self) -> &Digraph {
        &self.g
    }

    /// The complement on pairs of distinct vertices. Loops are never
    /// emitted: the structural checks downstream are all loopless.
    pub fn complement(&self) -> Digraph {
        let n = self.g.n();
        let mut c = Digraph::new(n).expect("n >= 1");
        for u in 0..n {
            for v in 0..n {
                if u != v && !self.g.has_arc(u, v) {
                    c.insert_arc(u, v);
                }
            }
        }
        c
    }

    /// Quotient by a partition satisfying the contraction conditions:
    /// every part induces a complete digraph among its distinct vertices;
    /// a cross arc between two parts forces all of them; a loop anywhere in
    /// a part forces the full square of the part. The quotient has one
    /// vertex per part, a cross arc wherever the parts see each other, and
    /// a loop exactly where a part contains a looped vertex.
    pub fn contract(&self, partition: &VertexPartition) -> Result<Pattern, ContractionError> {
        let n = self.g.n();
        if partition.n() != n {
            return Err(ContractionError::WrongVertexCount { partition_n: partition.n(), n });
        }
        let parts = partition.parts();
        for (i, part) in parts.iter().enumerate() {
            let any_loop = part.iter().any(|&x| self.g.has_loop(x));
            for &x in part {
                for &y in part {
                    if x != y && !self.g.has_arc(x, y) {
                        return Err(ContractionError::PartIncomplete { part: i, pair: (x, y) });
                    }
                    if x == y && any_loop && !self.g.has_arc(x, x) {
                        return Err(ContractionError::PartNotReflexive { part: i, vertex: x });
                    }
                }
            }
        }
        for (i, pi) in parts.iter().enumerate() {
            for (j, pj) in parts.iter().enumerate() {
                if i == j {
                    continue;
                }
                let any = pi.iter().any(|&x| pj.iter().any(|&y| self.g.has_arc(x, y)));
                if any {
                    for &x in pi {
                        for &y in pj {
                            if !self.g.has_arc(x, y) {
                                return Err(ContractionError::CrossNotFull {
                                    from_part: i,
                                    to_part: j,
                                    pair: (x, y),
                                });
                            }
                        }
                    }
                }
            }
        }
        let m = parts.len();
        let mut q = Digraph::new(m).expect("non-empty partition");
        for (i, pi) in parts.iter().enumerate() {
            if pi.iter().any(|&x| self.g.has_loop(x)) {
                q.insert_arc(i, i);
            }
            for (j, pj) in parts.iter().enumerate() {
                if i != j && self.g.has_arc(pi[0], pj[0]) {
                    q.insert_arc(i, j);
                }
            }
        }
        Ok(Pattern::new(q))
    }

    /// Inverse of contraction: vertex `i` becomes a complete block of
    /// `sizes[i]` vertices (reflexive exactly when `i` is looped), and each
    /// arc becomes all cross arcs between the blocks. Block vertices are
    /// numbered consecutively in source-vertex order, so contracting the
    /// expansion by its block partition returns the original pattern.
    pub fn expand(&self, sizes: &[usize]) -> Result<Pattern, ExpansionError> {
        let n = self.g.n();
        if sizes.len() != n {
            return Err(ExpansionError::WrongSizeCount { got: sizes.len(), n });
        }
        if let Some(i) = sizes.iter().position(|&s| s == 0) {
            return Err(ExpansionError::ZeroSize { vertex: i });
        }
        let mut offset = vec![0usize; n + 1];
        for i in 0..n {
            offset[i + 1] = offset[i] + sizes[i];
        }
        let total = offset[n];
        let mut g = Digraph::new(total).expect("sizes positive");
        for i in 0..n {
            let looped = self.g.has_loop(i);
            for a in offset[i]..offset[i + 1] {
                for b in offset[i]..offset[i + 1] {
                    if a != b || looped {
                        g.insert_arc(a, b);
                    }
                }
            }
        }
        for (u, v) in self.g.arcs() {
            if u != v {
                for a in offset[u]..offset[u + 1] {
                    for b in offset[v]..offset[v + 1] {
                        g.insert_arc(a, b);
                    }
                }
            }
        }
        Ok(Pattern::new(g))
    }

    /// The block partition matching `expand(self, sizes)`.
    pub fn block_partition(sizes: &[usize]) -> Result<VertexPartition, PartitionError> {
        let total: usize = sizes.iter().sum();
        let mut parts = Vec::with_capacity(sizes.len());
        let mut next = 0;
        for &s in sizes {
            parts.push((next..next + s).collect());
            next += s;
        }
        VertexPartition::new(total, parts)
    }
}

impl std::ops::Deref for Pattern {
    type Target = Digraph;
    fn deref(&self) -> &Digraph {
        &self.g
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContractionError {
    #[error("partition covers {partition_n} vertices but the pattern has {n}")]
    WrongVertexCount { partition_n: usize, n: usize },
    #[error("condition 2 fails: part {part} misses inner arc ({}, {})", pair.0, pair.1)]
    PartIncomplete { part: usize, pair: (usize, usize) },
    #[error("condition 3 fails: part {part} contains a loop but vertex {vertex} is unlooped")]
    PartNotReflexive { part: usize, vertex: usize },
    #[error("condition 3 fails: parts {from_part} -> {to_part} have an arc but miss ({}, {})", pair.0, pair.1)]
    CrossNotFull { from_part: usize, to_part: usize, pair: (usize, usize) },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExpansionError {
    #[error("expected one size per vertex ({n}), got {got}")]
    WrongSizeCount { got: usize, n: usize },
    #[error("size for vertex {vertex} must be at least 1")]
    ZeroSize { vertex: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("part {part} is empty")]
    EmptyPart { part: usize },
    #[error("vertex {vertex} appears in more than one part")]
    Overlap { vertex: usize },
    #[error("vertex {vertex} is missing from the partition")]
    Uncovered { vertex: usize },
    #[error("vertex {vertex} out of range for {n} vertices")]
    OutOfRange { vertex: usize, n: usize },
}

/// An ordered list of disjoint non-empty vertex sets covering `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexPartition {
    n: usize,
    parts: Vec<Vec<usize>>,
}

impl VertexPartition {
    pub fn new(n: usize, parts: Vec<Vec<usize>>) -> Result<Self, PartitionError> {
        let mut seen = vec![false; n];
        for (i, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(PartitionError::EmptyPart { part: i });
            }
            for &v in part {
                if v >= n {
                    return Err(PartitionError::OutOfRange { vertex: v, n });
                }
                if seen[v] {
                    return Err(PartitionError::Overlap { vertex: v });
                }
                seen[v] = true;
            }
        }
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(PartitionError::Uncovered { vertex: v });
        }
        let mut parts = parts;
        for part in &mut parts {
            part.sort_unstable();
        }
        Ok(VertexPartition { n, parts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }
}

/// A digraph together with a total colouring of its arcs by the vertices
/// of some pattern (`0..h_size`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ColouredInstance {
    d: Digraph,
    h_size: usize,
    colour: Vec<u16>,
}

impl ColouredInstance {
    pub fn new(
        d: Digraph,
        h_size: usize,
        colours: &[((usize, usize), usize)],
    ) -> Result<Self, GraphError> {
        let n = d.n();
        let mut map = vec![u16::MAX; n * n];
        let mut assigned = 0usize;
        for &((u, v), c) in colours {
            if u >= n || v >= n {
                let vertex = if u >= n { u } else { v };
                return Err(GraphError::VertexOutOfRange { vertex, n });
            }
            if !d.has_arc(u, v) {
                return Err(GraphError::NotAnArc { u, v });
            }
            if c >= h_size {
                return Err(GraphError::ColourOutOfRange { colour: c, h_size });
            }
            if map[u * n + v] != u16::MAX {
                return Err(GraphError::DuplicateArc { u, v });
            }
            map[u * n + v] = c as u16;
            assigned += 1;
        }
        if assigned != d.arc_count() {
            let (u, v) = d.arcs().find(|&(u, v)| map[u * n + v] == u16::MAX).unwrap();
            return Err(GraphError::UncolouredArc { u, v });
        }
        Ok(ColouredInstance { d, h_size, colour: map })
    }

    /// Builds from one colour per arc in ascending `(u, v)` arc order.
    pub fn from_arc_colour_vec(d: Digraph, h_size: usize, per_arc: &[u16]) -> Result<Self, GraphError> {
        let n = d.n();
        if per_arc.len() != d.arc_count() {
            return Err(GraphError::WrongColourCount { got: per_arc.len(), expected: d.arc_count() });
        }
        let mut map = vec![u16::MAX; n * n];
        for ((u, v), &c) in d.arcs().zip(per_arc) {
            if (c as usize) >= h_size {
                return Err(GraphError::ColourOutOfRange { colour: c as usize, h_size });
            }
            map[u * n + v] = c;
        }
        Ok(ColouredInstance { d, h_size, colour: map })
    }

    pub fn d(&self) -> &Digraph {
        &self.d
    }

    pub fn h_size(&self) -> usize {
        self.h_size
    }

    /// Colour of an arc; panics when `(u, v)` is not an arc.
    pub fn colour(&self, u: usize, v: usize) -> usize {
        assert!(self.d.has_arc(u, v), "({u}, {v}) is not an arc");
        self.colour[u * self.d.n() + v] as usize
    }
}
