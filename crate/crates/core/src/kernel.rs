//! Exact H-kernel decision and enumeration. A kernel is a vertex set with
//! no H-walks between distinct members (independence) such that every
//! outside vertex has an H-walk into the set (absorbency). Closed walks
//! back to the same vertex never count against independence.
//!
//! The solver consumes a precomputed reach relation and backtracks over
//! vertices in index order, so the first kernel found is the least one
//! under lexicographic comparison of sorted vertex lists.

use thiserror::Error;

use crate::bits;
use crate::digraph::{ColouredInstance, Pattern};
use crate::hwalk::{h_reach, HwalkError, ReachRelation};

pub const ENUMERATION_VERTEX_LIMIT: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error(transparent)]
    Hwalk(#[from] HwalkError),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("kernel enumeration is exhaustive and refuses n = {n} > {limit}")]
    TooManyVertices { n: usize, limit: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelCheck {
    Valid,
    /// Two distinct members joined by an H-walk.
    IndependenceViolation { from: usize, to: usize },
    /// An outside vertex with no H-walk into the set.
    AbsorbencyViolation { vertex: usize },
}

pub fn check_kernel(
    inst: &ColouredInstance,
    h: &Pattern,
    kernel: &[usize],
) -> Result<KernelCheck, KernelError> {
    let rel = h_reach(inst, h)?;
    check_kernel_in(&rel, kernel)
}

pub fn check_kernel_in(rel: &ReachRelation, kernel: &[usize]) -> Result<KernelCheck, KernelError> {
    let n = rel.n();
    let wpr = bits::words_for(n);
    let mut k_words = vec![0u64; wpr];
    for &v in kernel {
        if v >= n {
            return Err(KernelError::VertexOutOfRange { vertex: v, n });
        }
        bits::set_bit(&mut k_words, v);
    }
    for u in bits::iter_ones(&k_words) {
        for v in rel.reachable_from(u) {
            if v != u && bits::test_bit(&k_words, v) {
                return Ok(KernelCheck::IndependenceViolation { from: u, to: v });
            }
        }
    }
    for w in 0..n {
        if bits::test_bit(&k_words, w) {
            continue;
        }
        let absorbed = rel.row(w).iter().zip(&k_words).any(|(r, k)| r & k != 0);
        if !absorbed {
            return Ok(KernelCheck::AbsorbencyViolation { vertex: w });
        }
    }
    Ok(KernelCheck::Valid)
}

struct KernelSearch<'a> {
    n: usize,
    wpr: usize,
    rel: &'a ReachRelation,
    /// Out- and in-rows with the diagonal cleared: independence ignores
    /// closed walks.
    out_nodiag: Vec<u64>,
    in_nodiag: Vec<u64>,
    /// suffix[i] = bit set of vertices >= i.
    suffix: Vec<u64>,
    members_words: Vec<u64>,
    members: Vec<usize>,
}

impl<'a> KernelSearch<'a> {
    fn new(rel: &'a ReachRelation) -> Self {
        let n = rel.n();
        let wpr = bits::words_for(n);
        let mut out_nodiag = vec![0u64; n * wpr];
        for u in 0..n {
            out_nodiag[u * wpr..(u + 1) * wpr].copy_from_slice(rel.row(u));
            bits::clear_bit(&mut out_nodiag[u * wpr..(u + 1) * wpr], u);
        }
        let mut in_nodiag = rel.transpose_rows();
        for u in 0..n {
            bits::clear_bit(&mut in_nodiag[u * wpr..(u + 1) * wpr], u);
        }
        let mut suffix = vec![0u64; (n + 1) * wpr];
        for i in (0..n).rev() {
            let (head, tail) = suffix.split_at_mut((i + 1) * wpr);
            head[i * wpr..].copy_from_slice(&tail[..wpr]);
            bits::set_bit(&mut head[i * wpr..], i);
        }
        KernelSearch {
            n,
            wpr,
            rel,
            out_nodiag,
            in_nodiag,
            suffix,
            members_words: vec![0u64; wpr],
            members: Vec::new(),
        }
    }

    fn compatible(&self, v: usize) -> bool {
        let out = &self.out_nodiag[v * self.wpr..(v + 1) * self.wpr];
        let inn = &self.in_nodiag[v * self.wpr..(v + 1) * self.wpr];
        self.members_words
            .iter()
            .zip(out.iter().zip(inn))
            .all(|(k, (o, i))| k & o == 0 && k & i == 0)
    }

    fn is_absorbent(&self) -> bool {
        (0..self.n).all(|w| {
            bits::test_bit(&self.members_words, w)
                || self.rel.row(w).iter().zip(&self.members_words).any(|(r, k)| r & k != 0)
        })
    }

    /// Excluded vertices below `start` must still be absorbable by the
    /// members plus any vertex we could yet add.
    fn extensions_feasible(&self, start: usize) -> bool {
        let future = &self.suffix[start * self.wpr..(start + 1) * self.wpr];
        (0..start).all(|w| {
            bits::test_bit(&self.members_words, w)
                || self
                    .rel
                    .row(w)
                    .iter()
                    .zip(self.members_words.iter().zip(future))
                    .any(|(r, (k, f))| r & (k | f) != 0)
        })
    }

    /// Visits candidate sets in lexicographic order of their sorted vertex
    /// lists; `visit` returns true to stop the search.
    fn run(&mut self, start: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if !self.members.is_empty() && self.is_absorbent() && visit(&self.members) {
            return true;
        }
        if !self.extensions_feasible(start) {
            return false;
        }
        for next in start..self.n {
            if self.compatible(next) {
                bits::set_bit(&mut self.members_words, next);
                self.members.push(next);
                let stop = self.run(next + 1, visit);
                self.members.pop();
                bits::clear_bit(&mut self.members_words, next);
                if stop {
                    return true;
                }
            }
        }
        false
    }
}

/// Some H-kernel, or None. Deterministic: the lexicographically least
/// kernel under subset ordering by sorted vertex list.
pub fn find_h_kernel(inst: &ColouredInstance, h: &Pattern) -> Result<Option<Vec<usize>>, KernelError> {
    Ok(find_h_kernel_in(&h_reach(inst, h)?))
}

pub fn find_h_kernel_in(rel: &ReachRelation) -> Option<Vec<usize>> {
    let mut search = KernelSearch::new(rel);
    let mut found = None;
    search.run(0, &mut |k| {
        found = Some(k.to_vec());
        true
    });
    found
}

/// All H-kernels in lexicographic order.
pub fn enumerate_h_kernels(
    inst: &ColouredInstance,
    h: &Pattern,
) -> Result<Vec<Vec<usize>>, KernelError> {
    enumerate_h_kernels_in(&h_reach(inst, h)?)
}

pub fn enumerate_h_kernels_in(rel: &ReachRelation) -> Result<Vec<Vec<usize>>, KernelError> {
    if rel.n() > ENUMERATION_VERTEX_LIMIT {
        return Err(KernelError::TooManyVertices { n: rel.n(), limit: ENUMERATION_VERTEX_LIMIT });
    }
    let mut search = KernelSearch::new(rel);
    let mut all = Vec::new();
    search.run(0, &mut |k| {
        all.push(k.to_vec());
        false
    });
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::Digraph;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn inst(n: usize, k: usize, arcs: &[(usize, usize, usize)]) -> ColouredInstance {
        let d = Digraph::from_arcs(n, &arcs.iter().map(|&(u, v, _)| (u, v)).collect::<Vec<_>>()).unwrap();
        let colours: Vec<((usize, usize), usize)> =
            arcs.iter().map(|&(u, v, c)| ((u, v), c)).collect();
        ColouredInstance::new(d, k, &colours).unwrap()
    }

    fn looped(k: usize) -> Pattern {
        Pattern::from_arcs(k, &(0..k).map(|i| (i, i)).collect::<Vec<_>>()).unwrap()
    }

    fn unlooped(k: usize) -> Pattern {
        Pattern::new(Digraph::new(k).unwrap())
    }

    #[test]
    fn check_single_vertex_no_arcs() {
        let i = inst(1, 1, &[]);
        assert_eq!(check_kernel(&i, &looped(1), &[0]).unwrap(), KernelCheck::Valid);
    }

    #[test]
    fn check_single_arc_pair_violates_independence() {
        let i = inst(2, 1, &[(0, 1, 0)]);
        assert_eq!(
            check_kernel(&i, &looped(1), &[0, 1]).unwrap(),
            KernelCheck::IndependenceViolation { from: 0, to: 1 }
        );
        assert_eq!(check_kernel(&i, &looped(1), &[1]).unwrap(), KernelCheck::Valid);
        assert_eq!(
            check_kernel(&i, &looped(1), &[0]).unwrap(),
            KernelCheck::AbsorbencyViolation { vertex: 1 }
        );
    }

    #[test]
    fn check_rejects_out_of_range() {
        let i = inst(1, 1, &[]);
        assert_eq!(
            check_kernel(&i, &looped(1), &[3]).unwrap_err(),
            KernelError::VertexOutOfRange { vertex: 3, n: 1 }
        );
    }

    fn mono_triangle() -> ColouredInstance {
        inst(3, 1, &[(0, 1, 0), (1, 2, 0), (2, 0, 0)])
    }

    /// Subset-loop oracle, independent of the backtracking search.
    fn oracle_kernels(rel: &ReachRelation) -> Vec<Vec<usize>> {
        let n = rel.n();
        let mut found = Vec::new();
        for mask in 1u64..1 << n {
            let members: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let independent = members.iter().all(|&u| {
                members.iter().all(|&v| u == v || !rel.reaches(u, v))
            });
            let absorbent = (0..n)
                .filter(|i| mask >> i & 1 == 0)
                .all(|w| members.iter().any(|&x| rel.reaches(w, x)));
            if independent && absorbent {
                found.push(members);
            }
        }
        found.sort();
        found
    }

    #[test]
    fn triangle_with_unlooped_colour_has_no_kernel() {
        let i = mono_triangle();
        let h = unlooped(1);
        let rel = h_reach(&i, &h).unwrap();
        // All 7 non-empty subsets fail one of the two conditions.
        assert_eq!(oracle_kernels(&rel), Vec::<Vec<usize>>::new());
        assert_eq!(find_h_kernel(&i, &h).unwrap(), None);
        assert_eq!(enumerate_h_kernels(&i, &h).unwrap(), Vec::<Vec<usize>>::new());
    }

    #[test]
    fn triangle_with_looped_colour_has_singleton_kernel() {
        let i = mono_triangle();
        let h = looped(1);
        let rel = h_reach(&i, &h).unwrap();
        assert_eq!(oracle_kernels(&rel), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(find_h_kernel(&i, &h).unwrap(), Some(vec![0]));
    }

    #[test]
    fn isolated_vertices_need_everything() {
        let i = inst(2, 1, &[]);
        assert_eq!(find_h_kernel(&i, &looped(1)).unwrap(), Some(vec![0, 1]));
    }

    #[test]
    fn two_cycle_kernels_in_lexicographic_order() {
        let i = inst(2, 1, &[(0, 1, 0), (1, 0, 0)]);
        let h = looped(1);
        let rel = h_reach(&i, &h).unwrap();
        assert!(rel.reaches(0, 1) && rel.reaches(1, 0));
        assert_eq!(enumerate_h_kernels(&i, &h).unwrap(), vec![vec![0], vec![1]]);
    }

    #[test]
    fn single_vertex_kernel() {
        let i = inst(1, 1, &[]);
        assert_eq!(enumerate_h_kernels(&i, &looped(1)).unwrap(), vec![vec![0]]);
    }

    #[test]
    fn enumeration_size_guard() {
        let i = inst(21, 1, &[]);
        assert!(matches!(
            enumerate_h_kernels(&i, &looped(1)),
            Err(KernelError::TooManyVertices { n: 21, .. })
        ));
    }

    fn random_instance(rng: &mut ChaCha8Rng, max_n: usize, k: usize) -> ColouredInstance {
        let n = rng.random_range(1..=max_n);
        let mut d = Digraph::new(n).unwrap();
        let mut colours = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.random_bool(0.45) {
                    d.insert_arc(u, v);
                    colours.push(((u, v), rng.random_range(0..k)));
                }
            }
        }
        ColouredInstance::new(d, k, &colours).unwrap()
    }

    fn random_pattern(rng: &mut ChaCha8Rng, k: usize) -> Pattern {
        let mut g = Digraph::new(k).unwrap();
        for u in 0..k {
            for v in 0..k {
                if rng.random_bool(0.5) {
                    g.insert_arc(u, v);
                }
            }
        }
        Pattern::new(g)
    }

    #[test]
    fn solver_agrees_with_subset_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..400 {
            let k = rng.random_range(1..=3);
            let i = random_instance(&mut rng, 6, k);
            let h = random_pattern(&mut rng, k);
            let rel = h_reach(&i, &h).unwrap();
            let expected = oracle_kernels(&rel);
            let all = enumerate_h_kernels_in(&rel).unwrap();
            assert_eq!(all, expected);
            assert_eq!(find_h_kernel_in(&rel), expected.first().cloned());
            for kernel in &all {
                assert_eq!(check_kernel_in(&rel, kernel).unwrap(), KernelCheck::Valid);
            }
        }
    }

    #[test]
    fn kernels_are_antichains_off_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let k = rng.random_range(1..=3);
            let i = random_instance(&mut rng, 6, k);
            let h = random_pattern(&mut rng, k);
            let rel = h_reach(&i, &h).unwrap();
            for kernel in enumerate_h_kernels_in(&rel).unwrap() {
                for &a in &kernel {
                    for &b in &kernel {
                        if a != b {
                            assert!(!rel.reaches(a, b));
                        }
                    }
                }
            }
        }
    }
}
