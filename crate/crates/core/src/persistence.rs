//! Persistent homology over the two-element field by boundary-matrix
//! column reduction, and the bottleneck distance between diagrams.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::filtration::FilteredComplex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PersistenceError {
    #[error("NonMonotoneComplex: face of {simplex:?} enters later than the simplex itself")]
    NonMonotoneComplex { simplex: Vec<usize> },
    #[error("MissingFace: {face:?} of {simplex:?} is not in the complex")]
    MissingFace { face: Vec<usize>, simplex: Vec<usize> },
}

/// A birth/death pair; `death` is `f64::INFINITY` for essential classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub birth: f64,
    pub death: f64,
}

impl Interval {
    pub fn new(birth: f64, death: f64) -> Self {
        Interval { birth, death }
    }

    pub fn is_infinite(&self) -> bool {
        self.death.is_infinite()
    }

    pub fn length(&self) -> f64 {
        self.death - self.birth
    }

    /// Cost of deleting this interval to the diagonal.
    pub fn deletion_cost(&self) -> f64 {
        if self.is_infinite() {
            f64::INFINITY
        } else {
            (self.death - self.birth) / 2.0
        }
    }
}

/// Matching cost between two intervals under the sup norm, with infinite
/// deaths compared by birth only (they can only match each other).
fn match_cost(a: &Interval, b: &Interval) -> f64 {
    match (a.is_infinite(), b.is_infinite()) {
        (true, true) => (a.birth - b.birth).abs(),
        (false, false) => (a.birth - b.birth).abs().max((a.death - b.death).abs()),
        _ => f64::INFINITY,
    }
}

/// Multiset of intervals per homology degree. Intervals are kept sorted by
/// (birth, death) so exports are canonical.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PersistenceDiagram {
    degrees: BTreeMap<usize, Vec<Interval>>,
}

impl PersistenceDiagram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, degree: usize, interval: Interval) {
        self.degrees.entry(degree).or_default().push(interval);
    }

    pub fn finish(&mut self) {
        for intervals in self.degrees.values_mut() {
            intervals.sort_by(|a, b| {
                a.birth
                    .partial_cmp(&b.birth)
                    .unwrap()
                    .then(a.death.partial_cmp(&b.death).unwrap())
            });
        }
        self.degrees.retain(|_, v| !v.is_empty());
    }

    pub fn intervals(&self, degree: usize) -> &[Interval] {
        self.degrees.get(&degree).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn degrees(&self) -> impl Iterator<Item = (usize, &[Interval])> {
        self.degrees.iter().map(|(&k, v)| (k, v.as_slice()))
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.degrees.keys().next_back().copied()
    }

    /// Number of intervals alive at the parameter: born at or before it and
    /// dead strictly after.
    pub fn betti_at(&self, degree: usize, r: f64) -> usize {
        self.intervals(degree)
            .iter()
            .filter(|iv| iv.birth <= r && iv.death > r)
            .count()
    }

    /// Multiset equality within an endpoint tolerance, degree by degree.
    pub fn approx_eq(&self, other: &PersistenceDiagram, tol: f64) -> bool {
        let degrees: std::collections::BTreeSet<usize> = self
            .degrees
            .keys()
            .chain(other.degrees.keys())
            .copied()
            .collect();
        for k in degrees {
            let a = self.intervals(k);
            let b = other.intervals(k);
            if a.len() != b.len() {
                return false;
            }
            // Both sides are sorted, so pairing in order decides equality.
            for (x, y) in a.iter().zip(b) {
                if (x.birth - y.birth).abs() > tol {
                    return false;
                }
                match (x.is_infinite(), y.is_infinite()) {
                    (true, true) => {}
                    (false, false) => {
                        if (x.death - y.death).abs() > tol {
                            return false;
                        }
                    }
                    _ => return false,
                }
            }
        }
        true
    }
}

/// Standard persistence pairing of a monotone filtered complex over Z/2.
///
/// Columns are reduced in (value, dimension, lexicographic) order;
/// zero-length intervals are dropped (undecorated diagrams do not see
/// them), essential classes get an infinite death.
pub fn compute_diagram(fc: &FilteredComplex) -> Result<PersistenceDiagram, PersistenceError> {
    let entries = fc.entries();
    let m = entries.len();
    let mut index_of: HashMap<&[usize], usize> = HashMap::with_capacity(m);
    for (pos, (simplex, _)) in entries.iter().enumerate() {
        index_of.insert(simplex.vertices(), pos);
    }

    // Boundary columns as sorted position lists.
    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(m);
    for (simplex, value) in entries {
        let mut column = Vec::with_capacity(simplex.vertices().len());
        for facet in simplex.facets() {
            let &pos = index_of.get(facet.vertices()).ok_or_else(|| {
                PersistenceError::MissingFace {
                    face: facet.vertices().to_vec(),
                    simplex: simplex.vertices().to_vec(),
                }
            })?;
            if entries[pos].1 > *value {
                return Err(PersistenceError::NonMonotoneComplex {
                    simplex: simplex.vertices().to_vec(),
                });
            }
            column.push(pos);
        }
        column.sort_unstable();
        columns.push(column);
    }

    let mut pivot_owner: Vec<Option<usize>> = vec![None; m];
    let mut killed_by: Vec<Option<usize>> = vec![None; m];
    for j in 0..m {
        let mut column = std::mem::take(&mut columns[j]);
        while let Some(&low) = column.last() {
            match pivot_owner[low] {
                Some(owner) => column = add_z2(&column, &columns[owner]),
                None => break,
            }
        }
        if let Some(&low) = column.last() {
            pivot_owner[low] = Some(j);
            killed_by[low] = Some(j);
        }
        columns[j] = column;
    }

    // Zero-length intervals are invisible to undecorated diagrams; the
    // threshold is relative so float-level ties from the optimizers are
    // discarded with them.
    let scale = entries.iter().map(|&(_, v)| v.abs()).fold(0.0f64, f64::max);
    let zero_length = 1e-12 * scale;

    let mut diagram = PersistenceDiagram::new();
    for (i, (simplex, birth)) in entries.iter().enumerate() {
        if !columns[i].is_empty() {
            continue; // not a creator
        }
        let degree = simplex.dim();
        match killed_by[i] {
            Some(j) => {
                let death = entries[j].1;
                if death - *birth > zero_length {
                    diagram.push(degree, Interval::new(*birth, death));
                }
            }
            None => diagram.push(degree, Interval::new(*birth, f64::INFINITY)),
        }
    }
    diagram.finish();
    Ok(diagram)
}

/// Symmetric difference of two sorted index lists (Z/2 column addition).
fn add_z2(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// A partial matching realizing a bottleneck value.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Matching {
    pub pairs: Vec<(Interval, Interval)>,
    pub unmatched_left: Vec<Interval>,
    pub unmatched_right: Vec<Interval>,
}

/// Exact bottleneck distance between the given degree of two diagrams,
/// with a realizing partial matching.
///
/// The optimum is found on the finite candidate set of matching costs and
/// half-lengths, by bisection with a bipartite-matching feasibility test.
/// Infinite intervals may only match infinite intervals; when the two
/// sides have different numbers of them the distance is infinite.
pub fn bottleneck(
    d1: &PersistenceDiagram,
    d2: &PersistenceDiagram,
    degree: usize,
) -> (f64, Matching) {
    let left = d1.intervals(degree);
    let right = d2.intervals(degree);

    let (inf_left, fin_left): (Vec<&Interval>, Vec<&Interval>) =
        left.iter().partition(|iv| iv.is_infinite());
    let (inf_right, fin_right): (Vec<&Interval>, Vec<&Interval>) =
        right.iter().partition(|iv| iv.is_infinite());

    if inf_left.len() != inf_right.len() {
        let matching = Matching {
            pairs: Vec::new(),
            unmatched_left: left.to_vec(),
            unmatched_right: right.to_vec(),
        };
        return (f64::INFINITY, matching);
    }

    // Infinite bars pair by sorted births: for min-max matching on the
    // line the sorted pairing is optimal.
    let mut inf_pairs: Vec<(Interval, Interval)> = Vec::with_capacity(inf_left.len());
    let mut essential_cost = 0.0f64;
    {
        let mut l: Vec<Interval> = inf_left.iter().map(|iv| **iv).collect();
        let mut r: Vec<Interval> = inf_right.iter().map(|iv| **iv).collect();
        l.sort_by(|a, b| a.birth.partial_cmp(&b.birth).unwrap());
        r.sort_by(|a, b| a.birth.partial_cmp(&b.birth).unwrap());
        for (a, b) in l.into_iter().zip(r) {
            essential_cost = essential_cost.max((a.birth - b.birth).abs());
            inf_pairs.push((a, b));
        }
    }

    let fin_left: Vec<Interval> = fin_left.into_iter().copied().collect();
    let fin_right: Vec<Interval> = fin_right.into_iter().copied().collect();

    let mut candidates: Vec<f64> = Vec::new();
    candidates.push(0.0);
    for a in &fin_left {
        candidates.push(a.deletion_cost());
        for b in &fin_right {
            candidates.push(match_cost(a, b));
        }
    }
    for b in &fin_right {
        candidates.push(b.deletion_cost());
    }
    candidates.retain(|c| c.is_finite() && *c >= essential_cost);
    candidates.push(essential_cost);
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    candidates.dedup();

    let mut lo = 0usize;
    let mut hi = candidates.len() - 1;
    debug_assert!(feasible(&fin_left, &fin_right, candidates[hi]).is_some());
    if let Some(pairing) = feasible(&fin_left, &fin_right, candidates[lo]) {
        let value = candidates[lo].max(essential_cost);
        return (value, assemble(pairing, &fin_left, &fin_right, inf_pairs));
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if feasible(&fin_left, &fin_right, candidates[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let value = candidates[hi].max(essential_cost);
    let pairing = feasible(&fin_left, &fin_right, candidates[hi]).expect("feasible at optimum");
    (value, assemble(pairing, &fin_left, &fin_right, inf_pairs))
}

/// Decides whether every interval can be matched or deleted at cost <= t.
/// Returns, for each left interval, its partner on the right (or None for
/// a diagonal deletion) when feasible.
///
/// Reduction to perfect bipartite matching: each side is augmented with
/// one diagonal slot per opposite interval; a diagonal slot accepts its
/// own interval only if the half-length is within t, and diagonal slots
/// match each other freely.
fn feasible(left: &[Interval], right: &[Interval], t: f64) -> Option<Vec<Option<usize>>> {
    let nl = left.len();
    let nr = right.len();
    let size = nl + nr; // each side of the augmented bipartite graph
    let tol = t + 1e-12;

    // Left side: 0..nl are real, nl..nl+nr are diagonal slots for right.
    // Right side: 0..nr are real, nr..nr+nl diagonal slots for left.
    let neighbors = |u: usize| -> Vec<usize> {
        let mut out = Vec::new();
        if u < nl {
            for (v, b) in right.iter().enumerate() {
                if match_cost(&left[u], b) <= tol {
                    out.push(v);
                }
            }
            if left[u].deletion_cost() <= tol {
                out.push(nr + u);
            }
        } else {
            let b = u - nl;
            if right[b].deletion_cost() <= tol {
                out.push(b);
            }
            out.extend(nr..nr + nl);
        }
        out
    };

    let mut match_left: Vec<Option<usize>> = vec![None; size];
    let mut match_right: Vec<Option<usize>> = vec![None; size];

    fn augment(
        u: usize,
        neighbors: &dyn Fn(usize) -> Vec<usize>,
        match_left: &mut [Option<usize>],
        match_right: &mut [Option<usize>],
        visited: &mut [bool],
    ) -> bool {
        for v in neighbors(u) {
            if visited[v] {
                continue;
            }
            visited[v] = true;
            if match_right[v].is_none()
                || augment(match_right[v].unwrap(), neighbors, match_left, match_right, visited)
            {
                match_left[u] = Some(v);
                match_right[v] = Some(u);
                return true;
            }
        }
        false
    }

    let neighbors_fn: &dyn Fn(usize) -> Vec<usize> = &neighbors;
    let mut matched = 0;
    for u in 0..size {
        let mut visited = vec![false; size];
        if augment(u, neighbors_fn, &mut match_left, &mut match_right, &mut visited) {
            matched += 1;
        }
    }
    if matched < size {
        return None;
    }
    Some(
        (0..nl)
            .map(|u| match match_left[u] {
                Some(v) if v < nr => Some(v),
                _ => None,
            })
            .collect(),
    )
}

fn assemble(
    pairing: Vec<Option<usize>>,
    fin_left: &[Interval],
    fin_right: &[Interval],
    inf_pairs: Vec<(Interval, Interval)>,
) -> Matching {
    let mut matching = Matching::default();
    let mut right_used = vec![false; fin_right.len()];
    for (u, partner) in pairing.iter().enumerate() {
        match partner {
            Some(v) => {
                matching.pairs.push((fin_left[u], fin_right[*v]));
                right_used[*v] = true;
            }
            None => matching.unmatched_left.push(fin_left[u]),
        }
    }
    for (v, used) in right_used.iter().enumerate() {
        if !used {
            matching.unmatched_right.push(fin_right[v]);
        }
    }
    matching.pairs.extend(inf_pairs);
    matching
}
