//! Exhaustive search machinery: streaming small digraphs one per
//! isomorphism class, streaming colourings, hunting counterexample
//! instances that admit no H-kernel, and sweeping all looped patterns of a
//! given order to cross-check the recognizer against brute force.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::bits;
use crate::canon::{self, CanonicalForm, CANON_VERTEX_LIMIT};
use crate::digraph::{ColouredInstance, Digraph, Pattern};
use crate::hwalk::h_reach;
use crate::kernel::{enumerate_h_kernels, find_h_kernel, find_h_kernel_in};
use crate::recognizer::{recognize, Verdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("exhaustive enumeration refuses n = {n} > {limit} vertices")]
    TooManyVertices { n: usize, limit: usize },
}

/// Limits for a falsification run.
#[derive(Clone, Debug)]
pub struct SearchBounds {
    /// Instances are searched over 1..=max_vertices vertices, ascending.
    pub max_vertices: usize,
    /// Loops in the instance digraphs (off by default; loops in patterns
    /// are unrelated).
    pub allow_loops_in_d: bool,
    /// Cap on the arc count of candidate digraphs.
    pub max_arcs: Option<usize>,
    /// Skip a digraph when it has more colourings than this.
    pub colouring_cap: Option<u64>,
    /// Wall-clock budget; exceeding it ends the run with a partial report.
    pub time_budget: Option<Duration>,
    /// Quotient the colouring stream by colour permutations that are
    /// automorphisms of the pattern.
    pub prune_colour_symmetries: bool,
}

impl SearchBounds {
    pub fn new(max_vertices: usize) -> Self {
        assert!(max_vertices >= 1);
        SearchBounds {
            max_vertices,
            allow_loops_in_d: false,
            max_arcs: None,
            colouring_cap: None,
            time_budget: None,
            prune_colour_symmetries: true,
        }
    }
}

/// Packed-code enumerator over one isomorphism class representative per
/// labeling orbit, ascending by canonical code.
struct ClassEnumerator {
    n: usize,
    positions: Vec<usize>,
    perm_tables: Vec<Vec<usize>>,
    base_code: u64,
    max_arcs: Option<usize>,
    mask: u64,
    end: u64,
}

impl ClassEnumerator {
    fn new(n: usize, with_loops_free: bool, all_loops: bool, max_arcs: Option<usize>) -> Self {
        debug_assert!(n <= CANON_VERTEX_LIMIT);
        let positions: Vec<usize> = (0..n)
            .flat_map(|u| (0..n).filter(move |&v| with_loops_free || v != u).map(move |v| u * n + v))
            .collect();
        let perm_tables: Vec<Vec<usize>> = bits::permutations(n)
            .into_iter()
            .skip(1)
            .map(|p| (0..n * n).map(|pos| p[pos / n] * n + p[pos % n]).collect())
            .collect();
        let base_code = if all_loops { (0..n).fold(0u64, |acc, v| acc | 1 << (v * n + v)) } else { 0 };
        let end = 1u64 << positions.len();
        ClassEnumerator { n, positions, perm_tables, base_code, max_arcs, mask: 0, end }
    }

    fn expand(&self, mask: u64) -> u64 {
        let mut code = self.base_code;
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            code |= 1 << self.positions[i];
        }
        code
    }

    fn is_canonical(&self, code: u64) -> bool {
        self.perm_tables.iter().all(|table| {
            let mut mapped = 0u64;
            let mut rest = code;
            while rest != 0 {
                let pos = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                mapped |= 1 << table[pos];
            }
            mapped >= code
        })
    }
}

impl Iterator for ClassEnumerator {
    type Item = Digraph;

    fn next(&mut self) -> Option<Digraph> {
        while self.mask < self.end {
            let code = self.expand(self.mask);
            self.mask += 1;
            if let Some(cap) = self.max_arcs {
                if code.count_ones() as usize > cap {
                    continue;
                }
            }
            if self.is_canonical(code) {
                let arcs = canon::decode_arcs(code, self.n);
                return Some(Digraph::from_arcs(self.n, &arcs).expect("decoded codes are valid"));
            }
        }
        None
    }
}

/// Every isomorphism class of digraphs on `n` vertices exactly once, in
/// ascending canonical-code order. Loopless unless the bounds allow loops.
pub fn enumerate_digraphs(
    n: usize,
    bounds: &SearchBounds,
) -> Result<impl Iterator<Item = Digraph>, SearchError> {
    if n > CANON_VERTEX_LIMIT {
        return Err(SearchError::TooManyVertices { n, limit: CANON_VERTEX_LIMIT });
    }
    Ok(ClassEnumerator::new(n, bounds.allow_loops_in_d, false, bounds.max_arcs))
}

/// Every isomorphism class of fully looped patterns on `n` vertices, in
/// ascending canonical-code order.
pub fn enumerate_looped_patterns(n: usize) -> Result<impl Iterator<Item = Pattern>, SearchError> {
    if n > CANON_VERTEX_LIMIT {
        return Err(SearchError::TooManyVertices { n, limit: CANON_VERTEX_LIMIT });
    }
    Ok(ClassEnumerator::new(n, false, true, None).map(Pattern::new))
}

/// Colour permutations preserving the pattern's arcs. Falls back to the
/// identity alone above the exhaustive limit.
pub fn pattern_automorphisms(h: &Pattern) -> Vec<Vec<usize>> {
    let k = h.n();
    if k > CANON_VERTEX_LIMIT {
        return vec![(0..k).collect()];
    }
    bits::permutations(k)
        .into_iter()
        .filter(|p| {
            h.arcs().all(|(a, b)| h.has_arc(p[a], p[b]))
        })
        .collect()
}

/// Iterator over all `k^m` total colourings of a digraph's arcs in
/// lexicographic order (first arc most significant), optionally quotiented
/// by colour symmetries: only the least colouring of each orbit is kept.
pub struct Colourings {
    d: Digraph,
    k: usize,
    digits: Vec<u16>,
    started: bool,
    done: bool,
    symmetries: Vec<Vec<usize>>,
}

impl Colourings {
    fn new(d: Digraph, k: usize) -> Self {
        let m = d.arc_count();
        let done = k == 0 && m > 0;
        Colourings { d, k, digits: vec![0; m], started: false, done, symmetries: Vec::new() }
    }

    /// Enables orbit pruning under the given colour permutations.
    pub fn with_colour_symmetries(mut self, symmetries: &[Vec<usize>]) -> Self {
        self.symmetries = symmetries
            .iter()
            .filter(|p| !p.iter().enumerate().all(|(i, &v)| i == v))
            .cloned()
            .collect();
        self
    }

    /// `k^m`, or None on overflow.
    pub fn total_count(&self) -> Option<u64> {
        let m = self.digits.len() as u32;
        if m == 0 {
            return Some(1);
        }
        (self.k as u64).checked_pow(m)
    }

    fn advance(&mut self) {
        for digit in self.digits.iter_mut().rev() {
            if (*digit as usize) + 1 < self.k {
                *digit += 1;
                return;
            }
            *digit = 0;
        }
        self.done = true;
    }

    fn orbit_minimal(&self) -> bool {
        self.symmetries.iter().all(|p| {
            // Lexicographic compare of the recoloured digits with the
            // current ones; skip the colouring when the image is smaller.
            for &d in &self.digits {
                let mapped = p[d as usize] as u16;
                match mapped.cmp(&d) {
                    std::cmp::Ordering::Less => return false,
                    std::cmp::Ordering::Greater => return true,
                    std::cmp::Ordering::Equal => {}
                }
            }
            true
        })
    }
}

impl Iterator for Colourings {
    type Item = ColouredInstance;

    fn next(&mut self) -> Option<ColouredInstance> {
        loop {
            if self.done {
                return None;
            }
            if self.started {
                self.advance();
                if self.done {
                    return None;
                }
            } else {
                self.started = true;
                if self.digits.is_empty() {
                    self.done = true;
                    return Some(
                        ColouredInstance::from_arc_colour_vec(self.d.clone(), self.k, &[])
                            .expect("no arcs to colour"),
                    );
                }
            }
            if self.orbit_minimal() {
                return Some(
                    ColouredInstance::from_arc_colour_vec(self.d.clone(), self.k, &self.digits)
                        .expect("digits are valid colours"),
                );
            }
        }
    }
}

pub fn enumerate_colourings(d: &Digraph, k: usize) -> Colourings {
    Colourings::new(d.clone(), k)
}

fn arc_list(d: &Digraph) -> String {
    let parts: Vec<String> = d.arcs().map(|(u, v)| format!("{u}>{v}")).collect();
    if parts.is_empty() {
        "-".to_string()
    } else {
        parts.join(" ")
    }
}

/// An instance and colouring that admits no H-kernel.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub instance: ColouredInstance,
    /// Arc list of the pattern the search ran against.
    pub pattern_id: String,
    /// (vertex count, class index within that size, colouring index) in
    /// canonical enumeration order.
    pub position: (usize, u64, u64),
    /// Kernel count re-established by full enumeration at emission time.
    pub kernels_found: usize,
}

impl Counterexample {
    /// Re-runs the solver; a genuine counterexample yields None.
    pub fn verify(&self, h: &Pattern) -> bool {
        matches!(find_h_kernel(&self.instance, h), Ok(None))
    }
}

#[derive(Clone, Debug)]
pub struct ExhaustionReport {
    pub max_vertices: usize,
    /// False when the time budget ended the run early.
    pub complete: bool,
    pub digraphs_checked: u64,
    pub colourings_checked: u64,
    /// Digraphs skipped because their colouring count exceeded the cap.
    pub digraphs_skipped: u64,
}

#[derive(Clone, Debug)]
pub enum FalsifyOutcome {
    Counterexample(Counterexample),
    Exhausted(ExhaustionReport),
}

struct ScanContext<'a> {
    h: &'a Pattern,
    symmetries: Vec<Vec<usize>>,
    prune: bool,
    colouring_cap: Option<u64>,
    deadline: Option<Instant>,
    aborted: AtomicBool,
    digraphs: AtomicU64,
    colourings: AtomicU64,
    skipped: AtomicU64,
}

impl ScanContext<'_> {
    fn out_of_time(&self) -> bool {
        if self.aborted.load(Ordering::Relaxed) {
            return true;
        }
        match self.deadline {
            Some(deadline) if Instant::now() >= deadline => {
                self.aborted.store(true, Ordering::Relaxed);
                true
            }
            _ => false,
        }
    }

    /// Scans one digraph class; Some((colouring index, instance)) on a hit.
    fn scan_class(&self, d: &Digraph) -> Option<(u64, ColouredInstance)> {
        if self.out_of_time() {
            return None;
        }
        let k = self.h.n();
        let mut stream = enumerate_colourings(d, k);
        if self.prune {
            stream = stream.with_colour_symmetries(&self.symmetries);
        }
        if let Some(cap) = self.colouring_cap {
            if stream.total_count().is_none_or(|total| total > cap) {
                self.skipped.fetch_add(1, Ordering::Relaxed);
                return None;
            }
        }
        self.digraphs.fetch_add(1, Ordering::Relaxed);
        let mut index = 0u64;
        for inst in stream {
            if index % 64 == 0 && self.out_of_time() {
                return None;
            }
            self.colourings.fetch_add(1, Ordering::Relaxed);
            let rel = h_reach(&inst, self.h).expect("colour counts match by construction");
            if find_h_kernel_in(&rel).is_none() {
                return Some((index, inst));
            }
            index += 1;
        }
        None
    }
}

/// Searches instances in canonical order (sizes ascending, classes by
/// canonical code, colourings lexicographic) for one with no H-kernel.
/// Deterministic: the first candidate in that order is returned even when
/// classes are scanned in parallel.
pub fn falsify(h: &Pattern, bounds: &SearchBounds) -> Result<FalsifyOutcome, SearchError> {
    let ctx = ScanContext {
        h,
        symmetries: if bounds.prune_colour_symmetries { pattern_automorphisms(h) } else { Vec::new() },
        prune: bounds.prune_colour_symmetries,
        colouring_cap: bounds.colouring_cap,
        deadline: bounds.time_budget.map(|b| Instant::now() + b),
        aborted: AtomicBool::new(false),
        digraphs: AtomicU64::new(0),
        colourings: AtomicU64::new(0),
        skipped: AtomicU64::new(0),
    };
    for size in 1..=bounds.max_vertices {
        let classes: Vec<Digraph> = enumerate_digraphs(size, bounds)?.collect();
        let hit = classes
            .par_iter()
            .enumerate()
            .find_map_first(|(class_idx, d)| {
                ctx.scan_class(d).map(|(col_idx, inst)| (class_idx as u64, col_idx, inst))
            });
        if let Some((class_idx, col_idx, instance)) = hit {
            let kernels = enumerate_h_kernels(&instance, h)
                .expect("counterexample sizes are far below the enumeration limit");
            assert!(kernels.is_empty(), "falsifier hit failed re-validation");
            return Ok(FalsifyOutcome::Counterexample(Counterexample {
                instance,
                pattern_id: arc_list(h.digraph()),
                position: (size, class_idx, col_idx),
                kernels_found: kernels.len(),
            }));
        }
        if ctx.aborted.load(Ordering::Relaxed) {
            return Ok(FalsifyOutcome::Exhausted(ExhaustionReport {
                max_vertices: size,
                complete: false,
                digraphs_checked: ctx.digraphs.load(Ordering::Relaxed),
                colourings_checked: ctx.colourings.load(Ordering::Relaxed),
                digraphs_skipped: ctx.skipped.load(Ordering::Relaxed),
            }));
        }
    }
    Ok(FalsifyOutcome::Exhausted(ExhaustionReport {
        max_vertices: bounds.max_vertices,
        complete: true,
        digraphs_checked: ctx.digraphs.load(Ordering::Relaxed),
        colourings_checked: ctx.colourings.load(Ordering::Relaxed),
        digraphs_skipped: ctx.skipped.load(Ordering::Relaxed),
    }))
}

#[derive(Clone, Debug)]
pub enum RowOutcome {
    /// Panchromatic verdict with the falsifier exhausted at the given bound.
    ConfirmedExhausted { max_vertices: usize },
    /// Negative verdict witnessed by a concrete counterexample.
    Witnessed { counterexample: Counterexample },
    /// Negative verdict with no counterexample inside the bounds; reported
    /// honestly, never as membership.
    Unwitnessed { max_vertices: usize },
    /// The time budget ran out before the row was settled.
    BudgetExceeded { max_vertices: usize },
    /// Panchromatic verdict *and* a counterexample: an implementation bug.
    Fatal { counterexample: Counterexample },
}

#[derive(Clone, Debug)]
pub struct ClassificationRow {
    pub pattern: Pattern,
    pub canonical: CanonicalForm,
    pub verdict: Verdict,
    pub outcome: RowOutcome,
}

impl ClassificationRow {
    /// Tab-separated row: canonical arc list, verdict, certificate or
    /// counterexample file, bounds reached.
    pub fn to_tsv(&self, witness_file: Option<&str>) -> String {
        let (verdict, witness): (&str, String) = match (&self.verdict, &self.outcome) {
            (_, RowOutcome::Fatal { .. }) => {
                ("FATAL", witness_file.unwrap_or("counterexample-for-panchromatic").to_string())
            }
            (Verdict::Panchromatic(cert), _) => ("PANCHROMATIC", cert.to_string()),
            (Verdict::NotPanchromatic(_), RowOutcome::Witnessed { .. }) => {
                ("NOT-PANCHROMATIC", witness_file.unwrap_or("counterexample").to_string())
            }
            (Verdict::NotPanchromatic(_), _) => ("NOT-PANCHROMATIC", "none-found".to_string()),
        };
        let bounds = match &self.outcome {
            RowOutcome::ConfirmedExhausted { max_vertices } => format!("exhausted@{max_vertices}"),
            RowOutcome::Witnessed { counterexample } | RowOutcome::Fatal { counterexample } => {
                format!("found@{}", counterexample.instance.d().n())
            }
            RowOutcome::Unwitnessed { max_vertices } => format!("exhausted@{max_vertices}"),
            RowOutcome::BudgetExceeded { max_vertices } => format!("budget@{max_vertices}"),
        };
        format!("{}\t{verdict}\t{witness}\t{bounds}", self.canonical)
    }
}

/// Sweeps every isomorphism class of fully looped patterns of order `n`:
/// the recognizer decides each one, panchromatic verdicts are spot-checked
/// by an exhausted falsifier run, and negative verdicts are hunted down to
/// a concrete counterexample within the bounds.
pub fn classify_order(n: usize, bounds: &SearchBounds) -> Result<Vec<ClassificationRow>, SearchError> {
    let patterns: Vec<Pattern> = enumerate_looped_patterns(n)?.collect();
    let mut rows = Vec::with_capacity(patterns.len());
    for pattern in patterns {
        let canonical = canon::canonicalize(pattern.digraph()).expect("sweep orders are small");
        let verdict = recognize(&pattern);
        let outcome = if verdict.is_panchromatic() {
            let check_bounds =
                SearchBounds { max_vertices: bounds.max_vertices.min(3), ..bounds.clone() };
            match falsify(&pattern, &check_bounds)? {
                FalsifyOutcome::Counterexample(cx) => RowOutcome::Fatal { counterexample: cx },
                FalsifyOutcome::Exhausted(rep) if rep.complete => {
                    RowOutcome::ConfirmedExhausted { max_vertices: rep.max_vertices }
                }
                FalsifyOutcome::Exhausted(rep) => {
                    RowOutcome::BudgetExceeded { max_vertices: rep.max_vertices }
                }
            }
        } else {
            match falsify(&pattern, bounds)? {
                FalsifyOutcome::Counterexample(cx) => RowOutcome::Witnessed { counterexample: cx },
                FalsifyOutcome::Exhausted(rep) if rep.complete => {
                    RowOutcome::Unwitnessed { max_vertices: rep.max_vertices }
                }
                FalsifyOutcome::Exhausted(rep) => {
                    RowOutcome::BudgetExceeded { max_vertices: rep.max_vertices }
                }
            }
        };
        rows.push(ClassificationRow { pattern, canonical, verdict, outcome });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_counts_small() {
        let b = SearchBounds::new(3);
        assert_eq!(enumerate_digraphs(1, &b).unwrap().count(), 1);
        assert_eq!(enumerate_digraphs(2, &b).unwrap().count(), 3);
        assert_eq!(enumerate_digraphs(3, &b).unwrap().count(), 16);
    }

    #[test]
    fn two_vertex_classes_are_empty_arc_and_cycle() {
        let b = SearchBounds::new(2);
        let classes: Vec<Vec<(usize, usize)>> =
            enumerate_digraphs(2, &b).unwrap().map(|d| d.arcs().collect()).collect();
        assert_eq!(classes, vec![vec![], vec![(0, 1)], vec![(0, 1), (1, 0)]]);
    }

    #[test]
    fn enumeration_refuses_large_n() {
        let b = SearchBounds::new(9);
        assert!(enumerate_digraphs(9, &b).is_err());
    }

    #[test]
    fn looped_pattern_counts() {
        assert_eq!(enumerate_looped_patterns(1).unwrap().count(), 1);
        assert_eq!(enumerate_looped_patterns(2).unwrap().count(), 3);
        assert_eq!(enumerate_looped_patterns(3).unwrap().count(), 16);
    }

    #[test]
    fn colouring_counts() {
        let single = Digraph::from_arcs(2, &[(0, 1)]).unwrap();
        assert_eq!(enumerate_colourings(&single, 3).count(), 3);
        let two = Digraph::from_arcs(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(enumerate_colourings(&two, 2).count(), 4);
        let none = Digraph::new(2).unwrap();
        assert_eq!(enumerate_colourings(&none, 5).count(), 1);
    }

    #[test]
    fn colourings_are_lexicographic() {
        let two = Digraph::from_arcs(3, &[(0, 1), (1, 2)]).unwrap();
        let seen: Vec<(usize, usize)> = enumerate_colourings(&two, 2)
            .map(|i| (i.colour(0, 1), i.colour(1, 2)))
            .collect();
        assert_eq!(seen, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
    }

    /// Orbit pruning over the full symmetric group: counts match a direct
    /// orbit enumeration of the group action.
    #[test]
    fn triangle_colouring_orbits_under_full_symmetry() {
        let triangle = Digraph::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let auts = pattern_automorphisms(&Pattern::complete_looped(3));
        assert_eq!(auts.len(), 6);

        // Direct group-action orbit count over all 27 colourings.
        let mut orbits: Vec<Vec<[usize; 3]>> = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let col = [a, b, c];
                    if orbits.iter().any(|o| o.contains(&col)) {
                        continue;
                    }
                    let orbit: Vec<[usize; 3]> =
                        auts.iter().map(|p| [p[a], p[b], p[c]]).collect();
                    orbits.push(orbit);
                }
            }
        }
        let expected = orbits.len();
        assert_eq!(expected, 5);

        let pruned =
            enumerate_colourings(&triangle, 3).with_colour_symmetries(&auts).count();
        assert_eq!(pruned, expected);
    }

    #[test]
    fn automorphisms_of_two_k1() {
        let auts = pattern_automorphisms(&Pattern::two_k1());
        assert_eq!(auts, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn falsify_two_k1_is_exhausted() {
        let out = falsify(&Pattern::two_k1(), &SearchBounds::new(3)).unwrap();
        let FalsifyOutcome::Exhausted(rep) = out else { panic!("2K1 must survive falsification") };
        assert!(rep.complete);
        assert_eq!(rep.max_vertices, 3);
        assert_eq!(rep.digraphs_skipped, 0);
    }

    #[test]
    fn falsify_unlooped_colour_finds_monochromatic_triangle() {
        let h = Pattern::new(Digraph::new(1).unwrap());
        let out = falsify(&h, &SearchBounds::new(3)).unwrap();
        let FalsifyOutcome::Counterexample(cx) = out else { panic!("expected a counterexample") };
        assert_eq!(cx.instance.d().n(), 3);
        assert_eq!(cx.instance.d().arcs().collect::<Vec<_>>(), vec![(0, 1), (1, 2), (2, 0)]);
        assert_eq!(cx.kernels_found, 0);
        assert!(cx.verify(&h));
    }

    #[test]
    fn falsify_is_deterministic() {
        let h = crate::recognizer::looped_path_pattern();
        let b = SearchBounds::new(3);
        let first = falsify(&h, &b).unwrap();
        let second = falsify(&h, &b).unwrap();
        match (first, second) {
            (FalsifyOutcome::Counterexample(a), FalsifyOutcome::Counterexample(b)) => {
                assert_eq!(a.instance, b.instance);
                assert_eq!(a.position, b.position);
            }
            (FalsifyOutcome::Exhausted(a), FalsifyOutcome::Exhausted(b)) => {
                assert_eq!(a.digraphs_checked, b.digraphs_checked);
                assert_eq!(a.colourings_checked, b.colourings_checked);
            }
            _ => panic!("outcomes differ between identical runs"),
        }
    }

    #[test]
    fn time_budget_reports_partial() {
        let h = Pattern::two_k1();
        let mut b = SearchBounds::new(6);
        b.time_budget = Some(Duration::ZERO);
        let out = falsify(&h, &b).unwrap();
        let FalsifyOutcome::Exhausted(rep) = out else { panic!() };
        assert!(!rep.complete);
    }

    #[test]
    fn classify_order_one() {
        let rows = classify_order(1, &SearchBounds::new(3)).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].verdict.is_panchromatic());
        assert!(matches!(rows[0].outcome, RowOutcome::ConfirmedExhausted { .. }));
    }

    #[test]
    fn classify_order_two() {
        let rows = classify_order(2, &SearchBounds::new(3)).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.verdict.is_panchromatic()));
    }
}
