//! Open-cover topological entropy for non-autonomous systems:
//! `H_k = H(𝒰 ∨ ω_1⁻¹𝒰 ∨ … ∨ ω_{k-1}⁻¹𝒰)` with `H = log N`, `N` the
//! exact minimal-subcover cardinality, plus a separated-set metric
//! estimator and the base-vs-hyperspace comparison.
//!
//! Minimal subcovers are found by exact branch-and-bound; subcover sizes
//! are certified integers, so all comparative claims (monotonicity,
//! dominance) are integer comparisons. Logarithms are natural; a finite
//! `k_max` cannot certify a limsup, so the estimate is always reported
//! together with its trailing window.

use std::collections::HashSet;

use num_traits::Zero;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::Error;
use crate::family::System;
use crate::hyperspace::as_hyper_system;
use crate::pointset::PointSet;
use crate::rat::Rat;

/// A finite open cover of a space: nonempty sets whose union is the space.
#[derive(Clone, Debug)]
pub struct OpenCover {
    pub sets: Vec<PointSet>,
}

impl OpenCover {
    pub fn new(n: usize, sets: Vec<PointSet>) -> Result<Self, Error> {
        let mut union = PointSet::empty(n);
        for s in &sets {
            if s.is_empty() {
                return Err(Error::input("cover contains an empty set"));
            }
            union.union_with(s);
        }
        if union.len() != n {
            return Err(Error::input("sets do not cover the space"));
        }
        Ok(OpenCover { sets })
    }

    /// Cover consisting of the space's declared open base.
    pub fn from_open_base(system: &System) -> Result<Self, Error> {
        OpenCover::new(
            system.n_points(),
            system.space.open_base.iter().map(|o| o.set.clone()).collect(),
        )
    }

    fn canonicalize(mut sets: Vec<PointSet>) -> Vec<PointSet> {
        let mut seen = HashSet::new();
        sets.retain(|s| !s.is_empty() && seen.insert(s.clone()));
        sets
    }

    /// α ≺ β: every β-set is contained in some α-set.
    pub fn refines(coarse: &OpenCover, fine: &OpenCover) -> bool {
        fine.sets
            .iter()
            .all(|b| coarse.sets.iter().any(|a| b.is_subset(a)))
    }
}

/// Exact minimum number of cover sets whose union is the space.
pub fn min_subcover_size(universe_len: usize, cover: &OpenCover) -> Result<u64, Error> {
    let sets = OpenCover::canonicalize(cover.sets.clone());
    let mut union = PointSet::empty(universe_len);
    for s in &sets {
        union.union_with(s);
    }
    if union.len() != universe_len {
        return Err(Error::input("not a cover"));
    }

    // greedy upper bound
    let greedy = {
        let mut uncovered = PointSet::full(universe_len);
        let mut count = 0u64;
        while !uncovered.is_empty() {
            let best = sets
                .iter()
                .max_by_key(|s| s.intersection(&uncovered).len())
                .unwrap();
            let gain = best.intersection(&uncovered).len();
            debug_assert!(gain > 0);
            let mask = best.clone();
            uncovered = uncovered
                .iter()
                .filter(|&x| !mask.contains(x))
                .fold(PointSet::empty(universe_len), |mut acc, x| {
                    acc.insert(x);
                    acc
                });
            count += 1;
        }
        count
    };

    let mut best = greedy;
    let full = PointSet::full(universe_len);
    branch(&sets, &full, 0, &mut best);
    Ok(best)
}

fn branch(sets: &[PointSet], uncovered: &PointSet, chosen: u64, best: &mut u64) {
    if uncovered.is_empty() {
        *best = (*best).min(chosen);
        return;
    }
    if chosen + 1 >= *best {
        return;
    }
    // bound: even the largest set covers at most `max_gain` points per pick
    let max_gain = sets
        .iter()
        .map(|s| s.intersection(uncovered).len())
        .max()
        .unwrap_or(0);
    if max_gain == 0 {
        return; // cannot finish on this branch
    }
    let lower = (uncovered.len() as u64).div_ceil(max_gain as u64);
    if chosen + lower >= *best {
        return;
    }
    // branch on the uncovered element with the fewest candidate sets
    let elem = uncovered
        .iter()
        .min_by_key(|&x| sets.iter().filter(|s| s.contains(x)).count())
        .unwrap();
    let mut candidates: Vec<&PointSet> = sets.iter().filter(|s| s.contains(elem)).collect();
    candidates.sort_by_key(|s| std::cmp::Reverse(s.intersection(uncovered).len()));
    for s in candidates {
        let mut rest = PointSet::empty(uncovered.universe_len());
        for x in uncovered.iter() {
            if !s.contains(x) {
                rest.insert(x);
            }
        }
        branch(sets, &rest, chosen + 1, best);
    }
}

/// `𝒰 ∨ 𝒱`: pairwise intersections, empties dropped, duplicates merged.
pub fn join_covers(a: &OpenCover, b: &OpenCover) -> OpenCover {
    let mut sets = Vec::with_capacity(a.sets.len() * b.sets.len());
    for u in &a.sets {
        for v in &b.sets {
            sets.push(u.intersection(v));
        }
    }
    OpenCover {
        sets: OpenCover::canonicalize(sets),
    }
}

/// `ω_k⁻¹(𝒰)` from the ω_k table (`k = 0` is the identity). Empty
/// preimages are dropped; preimages of a cover under a total map still
/// cover.
pub fn preimage_cover(system: &System, k: usize, cover: &OpenCover) -> Result<OpenCover, Error> {
    let n = system.n_points();
    if k == 0 {
        return Ok(OpenCover {
            sets: OpenCover::canonicalize(cover.sets.clone()),
        });
    }
    let tab = system.trace()?.table(k).clone();
    let sets = cover
        .sets
        .iter()
        .map(|u| {
            let mut pre = PointSet::empty(n);
            for x in 0..n {
                if u.contains(tab[x]) {
                    pre.insert(x);
                }
            }
            pre
        })
        .collect();
    Ok(OpenCover {
        sets: OpenCover::canonicalize(sets),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyTerm {
    pub k: u64,
    /// Certified minimal subcover cardinality of the k-th join (or the
    /// separated-set count for the metric estimator).
    pub count: u64,
    pub h: f64,
    pub h_over_k: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropySeries {
    pub terms: Vec<EntropyTerm>,
    /// Max of `h/k` over the trailing window — an estimate, never a
    /// certified limsup.
    pub limsup_estimate: f64,
    pub window: u64,
}

impl EntropySeries {
    fn from_counts(counts: Vec<u64>) -> Self {
        let terms: Vec<EntropyTerm> = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let k = (i + 1) as u64;
                let h = (c as f64).ln();
                EntropyTerm {
                    k,
                    count: c,
                    h,
                    h_over_k: h / k as f64,
                }
            })
            .collect();
        let window = (terms.len() as u64).div_ceil(3).max(1);
        let limsup_estimate = terms
            .iter()
            .rev()
            .take(window as usize)
            .map(|t| t.h_over_k)
            .fold(f64::NEG_INFINITY, f64::max);
        EntropySeries {
            terms,
            limsup_estimate,
            window,
        }
    }
}

/// `H_k/k` for `k = 1..k_max` with `H_k` certified by exact set cover.
pub fn entropy_series(
    system: &System,
    cover: &OpenCover,
    k_max: usize,
    budget: &Budget,
) -> Result<EntropySeries, Error> {
    if k_max == 0 {
        return Err(Error::input("k_max must be ≥ 1"));
    }
    let n = system.n_points();
    OpenCover::new(n, cover.sets.clone())?; // validate
    let mut join = OpenCover {
        sets: OpenCover::canonicalize(cover.sets.clone()),
    };
    let mut counts = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        if k > 1 {
            let pre = preimage_cover(system, k - 1, cover)?;
            let candidate = (join.sets.len() as u64) * (pre.sets.len() as u64);
            if candidate > budget.max_join_sets {
                return Err(Error::resource("cover join sets", candidate, budget.max_join_sets));
            }
            join = join_covers(&join, &pre);
        }
        counts.push(min_subcover_size(n, &join)?);
    }
    Ok(EntropySeries::from_counts(counts))
}

/// Separated-set estimator: `S_n` is the exact maximum cardinality of a
/// set pairwise separated by > ε under `max_{0≤j<n} d(ω_j·, ω_j·)`,
/// found by branch-and-bound max clique.
pub fn separated_entropy(
    system: &System,
    epsilon: &Rat,
    n_max: usize,
) -> Result<EntropySeries, Error> {
    if epsilon <= &Rat::zero() {
        return Err(Error::input("epsilon must be positive"));
    }
    if n_max == 0 {
        return Err(Error::input("n_max must be ≥ 1"));
    }
    let n = system.n_points();
    let trace = system.trace()?;
    // adjacency grows monotonically with the time window
    let mut adj: Vec<PointSet> = vec![PointSet::empty(n); n];
    let mut counts = Vec::with_capacity(n_max);
    for steps in 1..=n_max {
        let j = steps - 1; // newly included time
        for x in 0..n {
            for y in (x + 1)..n {
                if adj[x].contains(y) {
                    continue;
                }
                let d = if j == 0 {
                    system.space.dist(x, y)
                } else {
                    let t = trace.table(j);
                    system.space.dist(t[x], t[y])
                };
                if &d > epsilon {
                    adj[x].insert(y);
                    adj[y].insert(x);
                }
            }
        }
        counts.push(max_clique(&adj) as u64);
    }
    Ok(EntropySeries::from_counts(counts))
}

/// Exact maximum clique with greedy-coloring bound.
fn max_clique(adj: &[PointSet]) -> usize {
    let n = adj.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(adj[v].len()));
    let mut best = 0usize;
    let all = PointSet::from_iter(n, 0..n);
    clique_branch(adj, &all, 0, &mut best);
    best
}

fn clique_branch(adj: &[PointSet], candidates: &PointSet, size: usize, best: &mut usize) {
    if candidates.is_empty() {
        *best = (*best).max(size);
        return;
    }
    // greedy coloring bound on the candidate set
    let cand: Vec<usize> = candidates.to_vec();
    let mut color_classes: Vec<PointSet> = Vec::new();
    let mut color_of = vec![0usize; cand.len()];
    for (i, &v) in cand.iter().enumerate() {
        let mut c = 0;
        loop {
            if c == color_classes.len() {
                color_classes.push(PointSet::empty(adj.len()));
            }
            if !color_classes[c].intersects(&adj[v]) {
                color_classes[c].insert(v);
                color_of[i] = c;
                break;
            }
            c += 1;
        }
    }
    if size + color_classes.len() <= *best {
        return;
    }
    // branch in decreasing color order
    let mut idx: Vec<usize> = (0..cand.len()).collect();
    idx.sort_by_key(|&i| std::cmp::Reverse(color_of[i]));
    let mut remaining = candidates.clone();
    for i in idx {
        let v = cand[i];
        if !remaining.contains(v) {
            continue;
        }
        if size + color_of[i] + 1 <= *best {
            break;
        }
        clique_branch(adj, &remaining.intersection(&adj[v]), size + 1, best);
        // drop v from further branches
        remaining = {
            let mut r = PointSet::empty(adj.len());
            for x in remaining.iter() {
                if x != v {
                    r.insert(x);
                }
            }
            r
        };
    }
    *best = (*best).max(size); // covers the all-dropped path
}

#[derive(Clone, Debug, Serialize)]
pub struct HyperEntropyComparison {
    pub base: EntropySeries,
    pub lifted: EntropySeries,
    /// True iff every lifted subcover count ≥ the base count at the same k.
    pub dominance: bool,
}

/// Lifted cover on the hyperspace generated from a base cover: one
/// member set per Vietoris basic `⟨S⟩`, S a subset of the base cover of
/// size ≤ m. Every A of cardinality ≤ m lies in the basic of the cover
/// sets it meets, so these member sets cover the hyperspace.
pub fn lifted_cover(
    hyper: &System,
    base_cover: &OpenCover,
    max_cardinality: usize,
) -> Result<OpenCover, Error> {
    let sets = match &hyper.space.metric {
        crate::space::Metric::Hausdorff { sets, .. } => sets.clone(),
        _ => return Err(Error::input("lifted_cover expects a hyperspace system")),
    };
    let total = hyper.n_points();
    let k = base_cover.sets.len();
    let mut out: Vec<PointSet> = Vec::new();
    let mut choice = Vec::new();
    fn rec(
        k: usize,
        m: usize,
        start: usize,
        choice: &mut Vec<usize>,
        base_cover: &OpenCover,
        sets: &[crate::hyperspace::HyperPoint],
        total: usize,
        out: &mut Vec<PointSet>,
    ) {
        if !choice.is_empty() {
            let hit: Vec<&PointSet> = choice.iter().map(|&i| &base_cover.sets[i]).collect();
            let mut union = hit[0].clone();
            for u in &hit[1..] {
                union.union_with(u);
            }
            let mut members = PointSet::empty(total);
            for (pi, p) in sets.iter().enumerate() {
                if p.is_subset_of(&union) && hit.iter().all(|u| p.hits(u)) {
                    members.insert(pi);
                }
            }
            if !members.is_empty() {
                out.push(members);
            }
        }
        if choice.len() == m {
            return;
        }
        for i in start..k {
            choice.push(i);
            rec(k, m, i + 1, choice, base_cover, sets, total, out);
            choice.pop();
        }
    }
    rec(k, max_cardinality, 0, &mut choice, base_cover, &sets, total, &mut out);
    OpenCover::new(total, OpenCover::canonicalize(out))
}

/// Base and lifted entropy series on the same cover, with termwise
/// dominance (the singleton embedding maps base joins injectively into
/// lifted joins, so the lifted counts can never be smaller).
pub fn hyper_entropy_compare(
    system: &System,
    max_cardinality: usize,
    cover: &OpenCover,
    k_max: usize,
    budget: &Budget,
) -> Result<HyperEntropyComparison, Error> {
    let base = entropy_series(system, cover, k_max, budget)?;
    let hyper = as_hyper_system(system, max_cardinality)?;
    let lifted_cover = lifted_cover(&hyper, cover, max_cardinality)?;
    let lifted = entropy_series(&hyper, &lifted_cover, k_max, budget)?;
    let dominance = base
        .terms
        .iter()
        .zip(&lifted.terms)
        .all(|(b, l)| l.count >= b.count);
    Ok(HyperEntropyComparison {
        base,
        lifted,
        dominance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::MapFamily;
    use crate::rat::rat;
    use crate::space::{Metric, SpaceModel};
    use std::sync::Arc;

    fn sys3() -> System {
        let m: Vec<Vec<Rat>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j: usize| if i == j { rat(0, 1) } else { rat(1, 1) })
                    .collect()
            })
            .collect();
        let sp = SpaceModel::discrete(
            vec!["a".into(), "b".into(), "c".into()],
            Metric::Table(Arc::new(m)),
        );
        System::new(sp, MapFamily::identity(3)).unwrap()
    }

    fn cover(n: usize, sets: &[&[usize]]) -> OpenCover {
        OpenCover::new(
            n,
            sets.iter()
                .map(|s| PointSet::from_iter(n, s.iter().copied()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn min_subcover_trivial_cases() {
        assert_eq!(min_subcover_size(3, &cover(3, &[&[0, 1, 2]])).unwrap(), 1);
        assert_eq!(
            min_subcover_size(3, &cover(3, &[&[0], &[1], &[2]])).unwrap(),
            3
        );
    }

    #[test]
    fn min_subcover_needs_search() {
        // {{a,b},{b,c},{a,c}} on {a,b,c} → 2, by exhaustive set cover
        let c = cover(3, &[&[0, 1], &[1, 2], &[0, 2]]);
        assert_eq!(min_subcover_size(3, &c).unwrap(), 2);
    }

    #[test]
    fn min_subcover_matches_exhaustive_oracle() {
        // brute-force oracle over all subsets, on small random-ish covers
        let instances: Vec<OpenCover> = vec![
            cover(5, &[&[0, 1], &[1, 2], &[2, 3], &[3, 4], &[0, 4], &[1, 3]]),
            cover(6, &[&[0, 1, 2], &[2, 3], &[3, 4, 5], &[0, 5], &[1, 4]]),
            cover(4, &[&[0], &[0, 1], &[1, 2, 3], &[2], &[3]]),
        ];
        for c in instances {
            let n = c.sets[0].universe_len();
            let mut oracle = c.sets.len() as u64;
            for mask in 1u32..(1 << c.sets.len()) {
                let mut u = PointSet::empty(n);
                for (i, s) in c.sets.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        u.union_with(s);
                    }
                }
                if u.len() == n {
                    oracle = oracle.min(mask.count_ones() as u64);
                }
            }
            assert_eq!(min_subcover_size(n, &c).unwrap(), oracle);
        }
    }

    #[test]
    fn join_examples() {
        // join({{a,b},{c}}, {{a},{b,c}}) = {{a},{b},{c}}
        let a = cover(3, &[&[0, 1], &[2]]);
        let b = cover(3, &[&[0], &[1, 2]]);
        let j = join_covers(&a, &b);
        let mut got: Vec<Vec<usize>> = j.sets.iter().map(|s| s.to_vec()).collect();
        got.sort();
        assert_eq!(got, vec![vec![0], vec![1], vec![2]]);
        // join(α, {X}) = α; join(α, α) = α up to dedup
        let whole = cover(3, &[&[0, 1, 2]]);
        assert_eq!(join_covers(&a, &whole).sets.len(), a.sets.len());
        assert_eq!(join_covers(&a, &a).sets.len(), a.sets.len());
    }

    #[test]
    fn join_refines_both() {
        let a = cover(4, &[&[0, 1], &[2, 3]]);
        let b = cover(4, &[&[0, 2], &[1, 3]]);
        let j = join_covers(&a, &b);
        assert!(OpenCover::refines(&a, &j));
        assert!(OpenCover::refines(&b, &j));
    }

    #[test]
    fn preimage_of_constant_map_is_whole_space() {
        let sp = sys3().space.as_ref().clone();
        let sys = System::new(sp, MapFamily::new(vec![vec![2, 2, 2]])).unwrap();
        let c = cover(3, &[&[0, 1], &[2]]);
        let pre = preimage_cover(&sys, 1, &c).unwrap();
        assert_eq!(pre.sets.len(), 1);
        assert_eq!(pre.sets[0].len(), 3);
    }

    #[test]
    fn identity_entropy_series_decays() {
        let sys = sys3();
        let c = cover(3, &[&[0], &[1], &[2]]);
        let s = entropy_series(&sys, &c, 5, &Budget::default()).unwrap();
        for t in &s.terms {
            assert_eq!(t.count, 3); // H_k = H_1 for all k
        }
        assert!(s.terms.last().unwrap().h_over_k < s.terms[0].h_over_k);
    }

    #[test]
    fn separated_entropy_identity_constant() {
        let sys = sys3();
        let s = separated_entropy(&sys, &rat(1, 2), 4).unwrap();
        for t in &s.terms {
            assert_eq!(t.count, 3);
        }
    }

    #[test]
    fn max_clique_on_multipartite() {
        // complement of two disjoint triangles: clique number 2... build directly:
        // two groups {0,1,2}, {3,4,5}; edges across groups only → max clique 2
        let n = 6;
        let mut adj = vec![PointSet::empty(n); n];
        for x in 0..3 {
            for y in 3..6 {
                adj[x].insert(y);
                adj[y].insert(x);
            }
        }
        assert_eq!(max_clique(&adj), 2);
        // complete graph on 5
        let mut adj = vec![PointSet::empty(5); 5];
        for x in 0..5 {
            for y in 0..5 {
                if x != y {
                    adj[x].insert(y);
                }
            }
        }
        assert_eq!(max_clique(&adj), 5);
    }
}
