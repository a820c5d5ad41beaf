//! Instance transform simulating one extra pattern arc. Given a fully
//! looped pattern H, a missing arc (u, v) and a midpoint z with
//! (u, z), (z, v) in A(H), an instance coloured over H-with-(u,v) is
//! rewritten over plain H: every vertex y with an incoming u-coloured arc
//! and an outgoing v-coloured arc gets a twin y-hat joined to y by a
//! symmetric pair of z-coloured arcs, so the colour step u, v can detour
//! as u, z, z, v.

use std::fmt::Write as _;

use thiserror::Error;

use crate::digraph::{ColouredInstance, Digraph, GraphError, Pattern};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("vertex {0} of the pattern is unlooped")]
    UnloopedVertex(usize),
    #[error("pattern vertex {vertex} out of range for {n} vertices")]
    PatternVertexOutOfRange { vertex: usize, n: usize },
    #[error("arc ({u}, {v}) is already in the pattern")]
    ArcAlreadyPresent { u: usize, v: usize },
    #[error("midpoint {z} is not on a path: requires ({u}, {z}) and ({z}, {v}) in the pattern")]
    InvalidMidpoint { u: usize, z: usize, v: usize },
    #[error("no midpoint z with ({u}, z) and (z, {v}) exists")]
    NoMidpoint { u: usize, v: usize },
    #[error("instance uses {inst} colours but the pattern has {pattern} vertices")]
    ColourCountMismatch { inst: usize, pattern: usize },
    #[error("vertex {vertex} out of range for the transformed instance on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
}

#[derive(Clone, Debug)]
pub struct P2Transform {
    original: ColouredInstance,
    transformed: ColouredInstance,
    u: usize,
    v: usize,
    z: usize,
    /// Pairs (y, y-hat) in ascending y order; twins are numbered after the
    /// original vertices.
    twins: Vec<(usize, usize)>,
}

impl P2Transform {
    pub fn original(&self) -> &ColouredInstance {
        &self.original
    }

    pub fn transformed(&self) -> &ColouredInstance {
        &self.transformed
    }

    pub fn simulated_arc(&self) -> (usize, usize) {
        (self.u, self.v)
    }

    pub fn midpoint(&self) -> usize {
        self.z
    }

    pub fn twins(&self) -> &[(usize, usize)] {
        &self.twins
    }

    /// Instance file text with a comment header recording the simulated
    /// arc, the midpoint, and the twin mapping.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# p2 transform: u={} v={} z={}", self.u, self.v, self.z).unwrap();
        if self.twins.is_empty() {
            writeln!(out, "# twins: none").unwrap();
        } else {
            let pairs: Vec<String> =
                self.twins.iter().map(|&(y, yh)| format!("{y}<->{yh}")).collect();
            writeln!(out, "# twins: {}", pairs.join(" ")).unwrap();
        }
        out.push_str(&crate::format::instance_to_string(&self.transformed));
        out
    }
}

/// The smallest valid midpoint for (u, v), if any.
pub fn smallest_midpoint(h: &Pattern, u: usize, v: usize) -> Option<usize> {
    (0..h.n()).find(|&z| h.has_arc(u, z) && h.has_arc(z, v))
}

pub fn p2_transform(
    inst: &ColouredInstance,
    h: &Pattern,
    u: usize,
    v: usize,
    z: usize,
) -> Result<P2Transform, TransformError> {
    let k = h.n();
    for w in [u, v, z] {
        if w >= k {
            return Err(TransformError::PatternVertexOutOfRange { vertex: w, n: k });
        }
    }
    if let Some(w) = (0..k).find(|&w| !h.has_loop(w)) {
        return Err(TransformError::UnloopedVertex(w));
    }
    if h.has_arc(u, v) {
        return Err(TransformError::ArcAlreadyPresent { u, v });
    }
    if !h.has_arc(u, z) || !h.has_arc(z, v) {
        return Err(TransformError::InvalidMidpoint { u, z, v });
    }
    if inst.h_size() != k {
        return Err(TransformError::ColourCountMismatch { inst: inst.h_size(), pattern: k });
    }

    let d = inst.d();
    let n = d.n();
    let qualifying: Vec<usize> = (0..n)
        .filter(|&y| {
            let has_in_u = (0..n).any(|x| d.has_arc(x, y) && inst.colour(x, y) == u);
            let has_out_v = d.out_neighbors(y).any(|w| inst.colour(y, w) == v);
            has_in_u && has_out_v
        })
        .collect();

    let twins: Vec<(usize, usize)> =
        qualifying.iter().enumerate().map(|(i, &y)| (y, n + i)).collect();
    let mut d_prime = Digraph::new(n + twins.len()).expect("n >= 1");
    let mut colours: Vec<((usize, usize), usize)> = Vec::with_capacity(d.arc_count() + 2 * twins.len());
    for (a, b) in d.arcs() {
        d_prime.insert_arc(a, b);
        colours.push(((a, b), inst.colour(a, b)));
    }
    for &(y, y_hat) in &twins {
        d_prime.insert_arc(y, y_hat);
        d_prime.insert_arc(y_hat, y);
        colours.push(((y, y_hat), z));
        colours.push(((y_hat, y), z));
    }
    let transformed = ColouredInstance::new(d_prime, k, &colours)
        .expect("transformed instance is well-coloured by construction");
    Ok(P2Transform { original: inst.clone(), transformed, u, v, z, twins })
}

/// Pulls a kernel of the transformed instance back to the original vertex
/// set: K = (K' ∪ {y : y-hat ∈ K'}) minus the twins.
pub fn pullback_kernel(t: &P2Transform, k_prime: &[usize]) -> Result<Vec<usize>, TransformError> {
    let n_prime = t.transformed.d().n();
    let n = t.original.d().n();
    let mut included = vec![false; n];
    for &w in k_prime {
        if w >= n_prime {
            return Err(TransformError::VertexOutOfRange { vertex: w, n: n_prime });
        }
        if w < n {
            included[w] = true;
        } else {
            let (y, _) = t.twins[w - n];
            included[y] = true;
        }
    }
    Ok((0..n).filter(|&y| included[y]).collect())
}

impl From<GraphError> for TransformError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::VertexOutOfRange { vertex, n } => TransformError::VertexOutOfRange { vertex, n },
            other => panic!("unexpected graph error during transform: {other}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hwalk::h_reach;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn inst(n: usize, k: usize, arcs: &[(usize, usize, usize)]) -> ColouredInstance {
        let d = Digraph::from_arcs(n, &arcs.iter().map(|&(u, v, _)| (u, v)).collect::<Vec<_>>()).unwrap();
        let colours: Vec<((usize, usize), usize)> =
            arcs.iter().map(|&(u, v, c)| ((u, v), c)).collect();
        ColouredInstance::new(d, k, &colours).unwrap()
    }

    /// Loops on three colours plus the path 0 -> 1 -> 2; (0, 2) is missing
    /// with midpoint 1.
    fn path_pattern() -> Pattern {
        Pattern::from_arcs(3, &[(0, 0), (1, 1), (2, 2), (0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn no_qualifying_vertex_leaves_instance_unchanged() {
        let i = inst(2, 3, &[(0, 1, 1)]);
        let t = p2_transform(&i, &path_pattern(), 0, 2, 1).unwrap();
        assert_eq!(t.twins(), &[]);
        assert_eq!(t.transformed(), &i);
    }

    #[test]
    fn path_coloured_u_v_gets_one_twin() {
        let i = inst(3, 3, &[(0, 1, 0), (1, 2, 2)]);
        let t = p2_transform(&i, &path_pattern(), 0, 2, 1).unwrap();
        assert_eq!(t.twins(), &[(1, 3)]);
        let d = t.transformed().d();
        assert_eq!(d.n(), 4);
        assert!(d.has_arc(1, 3) && d.has_arc(3, 1));
        assert_eq!(t.transformed().colour(1, 3), 1);
        assert_eq!(t.transformed().colour(3, 1), 1);
        // Restriction to the original vertices is untouched.
        assert!(d.has_arc(0, 1) && d.has_arc(1, 2));
        assert_eq!(t.transformed().colour(0, 1), 0);
        assert_eq!(t.transformed().colour(1, 2), 2);
    }

    #[test]
    fn every_vertex_qualifying_doubles_the_instance() {
        // Forward 3-cycle coloured v, backward 3-cycle coloured u: every
        // vertex has a u-coloured in-arc and a v-coloured out-arc.
        let i = inst(
            3,
            3,
            &[(0, 1, 2), (1, 2, 2), (2, 0, 2), (1, 0, 0), (2, 1, 0), (0, 2, 0)],
        );
        let t = p2_transform(&i, &path_pattern(), 0, 2, 1).unwrap();
        assert_eq!(t.twins().len(), 3);
        assert_eq!(t.transformed().d().n(), 6);
        assert_eq!(t.transformed().d().arc_count(), i.d().arc_count() + 6);
    }

    #[test]
    fn preconditions_are_reported_individually() {
        let i = inst(2, 3, &[(0, 1, 0)]);
        let h = path_pattern();
        assert_eq!(
            p2_transform(&i, &h, 0, 1, 1).unwrap_err(),
            TransformError::ArcAlreadyPresent { u: 0, v: 1 }
        );
        assert_eq!(
            p2_transform(&i, &h, 0, 2, 2).unwrap_err(),
            TransformError::InvalidMidpoint { u: 0, z: 2, v: 2 }
        );
        let unlooped = Pattern::from_arcs(3, &[(0, 0), (1, 1), (0, 1), (1, 2)]).unwrap();
        assert_eq!(
            p2_transform(&i, &unlooped, 0, 2, 1).unwrap_err(),
            TransformError::UnloopedVertex(2)
        );
        let small = inst(2, 2, &[(0, 1, 0)]);
        assert_eq!(
            p2_transform(&small, &h, 0, 2, 1).unwrap_err(),
            TransformError::ColourCountMismatch { inst: 2, pattern: 3 }
        );
    }

    #[test]
    fn smallest_midpoint_picks_least_index() {
        let h = Pattern::from_arcs(
            4,
            &[(0, 0), (1, 1), (2, 2), (3, 3), (0, 2), (2, 1), (0, 3), (3, 1)],
        )
        .unwrap();
        assert_eq!(smallest_midpoint(&h, 0, 1), Some(2));
        assert_eq!(smallest_midpoint(&h, 1, 0), None);
    }

    #[test]
    fn pullback_formula() {
        let i = inst(3, 3, &[(0, 1, 0), (1, 2, 2)]);
        let t = p2_transform(&i, &path_pattern(), 0, 2, 1).unwrap();
        // Twin of 1 is 3.
        assert_eq!(pullback_kernel(&t, &[0]).unwrap(), vec![0]);
        assert_eq!(pullback_kernel(&t, &[3]).unwrap(), vec![1]);
        assert_eq!(pullback_kernel(&t, &[1, 3]).unwrap(), vec![1]);
        assert_eq!(
            pullback_kernel(&t, &[9]).unwrap_err(),
            TransformError::VertexOutOfRange { vertex: 9, n: 4 }
        );
    }

    #[test]
    fn transform_file_round_trips() {
        let i = inst(3, 3, &[(0, 1, 0), (1, 2, 2)]);
        let t = p2_transform(&i, &path_pattern(), 0, 2, 1).unwrap();
        let text = t.to_file_string();
        let parsed = crate::format::parse_instance(&text).unwrap();
        assert_eq!(&parsed, t.transformed());
    }

    fn random_fixture(rng: &mut ChaCha8Rng) -> Option<(ColouredInstance, Pattern, usize, usize, usize)> {
        let k = rng.random_range(2..=4);
        let mut g = Digraph::new(k).unwrap();
        for c in 0..k {
            g.insert_arc(c, c);
        }
        for a in 0..k {
            for b in 0..k {
                if a != b && rng.random_bool(0.4) {
                    g.insert_arc(a, b);
                }
            }
        }
        let h = Pattern::new(g);
        let mut candidates = Vec::new();
        for u in 0..k {
            for v in 0..k {
                if u != v && !h.has_arc(u, v) {
                    if let Some(z) = smallest_midpoint(&h, u, v) {
                        candidates.push((u, v, z));
                    }
                }
            }
        }
        let &(u, v, z) = candidates.first()?;
        let n = rng.random_range(1..=4);
        let mut d = Digraph::new(n).unwrap();
        let mut colours = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if rng.random_bool(0.5) {
                    d.insert_arc(a, b);
                    colours.push(((a, b), rng.random_range(0..k)));
                }
            }
        }
        Some((ColouredInstance::new(d, k, &colours).unwrap(), h, u, v, z))
    }

    /// Walks over the extended pattern in the original instance always
    /// survive the rewrite: the reach relation of the transformed instance
    /// restricted to the original vertices contains the original one.
    #[test]
    fn transform_preserves_extended_walks() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut checked = 0;
        while checked < 200 {
            let Some((i, h, u, v, z)) = random_fixture(&mut rng) else { continue };
            let mut extended = h.digraph().clone();
            extended.insert_arc(u, v);
            let h_ext = Pattern::new(extended);
            let t = p2_transform(&i, &h, u, v, z).unwrap();
            let before = h_reach(&i, &h_ext).unwrap();
            let after = h_reach(t.transformed(), &h).unwrap();
            let n = i.d().n();
            for a in 0..n {
                for b in 0..n {
                    if before.reaches(a, b) {
                        assert!(after.reaches(a, b), "walk {a}->{b} lost by the transform");
                    }
                }
            }
            checked += 1;
        }
    }
}
