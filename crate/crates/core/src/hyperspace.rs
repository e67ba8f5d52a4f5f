//! The hyperspace of nonempty finite subsets under the Hausdorff metric,
//! Vietoris basic open sets, and the lift of a map family to set-valued
//! dynamics. The lifted system is a full [`SpaceModel`] + [`MapFamily`],
//! so every detector and entropy operation applies to it unchanged.

use std::collections::HashMap;
use std::sync::Arc;


use crate::error::Error;
use crate::family::{MapFamily, OrbitRho, System};
use crate::pointset::PointSet;
use crate::rat::Rat;
use crate::space::{Metric, NamedSet, SpaceModel};

/// A canonical nonempty finite subset of a base space: sorted point ids,
/// no duplicates, so value equality is set equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct HyperPoint {
    elements: Vec<usize>,
}

impl HyperPoint {
    pub fn new(mut elements: Vec<usize>) -> Result<Self, Error> {
        if elements.is_empty() {
            return Err(Error::input("hyperpoint must be nonempty"));
        }
        elements.sort_unstable();
        elements.dedup();
        Ok(HyperPoint { elements })
    }

    pub fn singleton(x: usize) -> Self {
        HyperPoint { elements: vec![x] }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn is_subset_of(&self, set: &PointSet) -> bool {
        self.elements.iter().all(|&x| set.contains(x))
    }

    pub fn hits(&self, set: &PointSet) -> bool {
        self.elements.iter().any(|&x| set.contains(x))
    }

    pub fn label(&self, base: &SpaceModel) -> String {
        let parts: Vec<&str> = self
            .elements
            .iter()
            .map(|&i| base.labels[i].as_str())
            .collect();
        format!("{{{}}}", parts.join(","))
    }
}

/// `d_H(A, B) = max(max_a min_b d(a,b), max_b min_a d(a,b))` — the
/// computable form of the inf-over-ε definition on finite sets.
pub fn hausdorff_distance_raw(base: &SpaceModel, a: &HyperPoint, b: &HyperPoint) -> Rat {
    let one_sided = |from: &HyperPoint, to: &HyperPoint| -> Rat {
        from.elements
            .iter()
            .map(|&x| {
                to.elements
                    .iter()
                    .map(|&y| base.dist(x, y))
                    .min()
                    .expect("hyperpoint nonempty")
            })
            .max()
            .expect("hyperpoint nonempty")
    };
    one_sided(a, b).max(one_sided(b, a))
}

/// Checked variant: errors when the hyperpoints reference ids outside the
/// base space.
pub fn hausdorff_distance(base: &SpaceModel, a: &HyperPoint, b: &HyperPoint) -> Result<Rat, Error> {
    let n = base.n_points();
    for p in a.elements().iter().chain(b.elements()) {
        if *p >= n {
            return Err(Error::input(format!(
                "hyperpoint references unknown point id {p}"
            )));
        }
    }
    Ok(hausdorff_distance_raw(base, a, b))
}

/// `{ ω_n(a) : a ∈ A }`, canonicalized. Cardinality may shrink, never grow.
pub fn lift_image(system: &System, n: usize, a: &HyperPoint) -> Result<HyperPoint, Error> {
    let mut out = Vec::with_capacity(a.len());
    for &x in a.elements() {
        out.push(system.omega_eval(n, x)?);
    }
    HyperPoint::new(out)
}

/// A Vietoris basic open set `⟨U_1 .. U_k⟩`.
#[derive(Clone, Debug)]
pub struct VietorisBasic {
    pub hit_sets: Vec<PointSet>,
}

impl VietorisBasic {
    pub fn new(hit_sets: Vec<PointSet>) -> Result<Self, Error> {
        if hit_sets.is_empty() {
            return Err(Error::input("Vietoris basic needs at least one hit set"));
        }
        if hit_sets.iter().any(|s| s.is_empty()) {
            return Err(Error::input("Vietoris hit sets must be nonempty"));
        }
        Ok(VietorisBasic { hit_sets })
    }

    /// `A ∈ ⟨U_1..U_k⟩` iff `A ⊆ ∪ U_i` and `A ∩ U_i ≠ ∅` for every i.
    pub fn contains(&self, a: &HyperPoint) -> bool {
        let mut union = self.hit_sets[0].clone();
        for u in &self.hit_sets[1..] {
            union.union_with(u);
        }
        a.is_subset_of(&union) && self.hit_sets.iter().all(|u| a.hits(u))
    }
}

pub fn vietoris_contains(basic: &VietorisBasic, a: &HyperPoint) -> bool {
    basic.contains(a)
}

/// Upper-Vietoris membership `A ∈ U⁺ ⟺ A ⊆ U` (containment only).
pub fn upper_vietoris_contains(u: &PointSet, a: &HyperPoint) -> bool {
    a.is_subset_of(u)
}

/// All hyperpoints of cardinality ≤ m over an n-point base, in
/// (cardinality, lexicographic) order.
pub fn enumerate_hyperpoints(n: usize, max_cardinality: usize) -> Vec<HyperPoint> {
    let m = max_cardinality.min(n);
    let mut out = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    for size in 1..=m {
        subsets_of_size(n, size, 0, &mut current, &mut out);
    }
    out
}

fn subsets_of_size(
    n: usize,
    size: usize,
    start: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<HyperPoint>,
) {
    if current.len() == size {
        out.push(HyperPoint {
            elements: current.clone(),
        });
        return;
    }
    let needed = size - current.len();
    for i in start..=(n - needed) {
        current.push(i);
        subsets_of_size(n, size, i + 1, current, out);
        current.pop();
    }
}

/// The induced system on the finite-set hyperspace of cardinality ≤ m.
///
/// The result is a full `System`: points are the hyperpoints, the metric
/// is `d_H`, the open base is every nonempty-membered Vietoris basic
/// generated from at most m base basic opens (deduplicated by member
/// set), and the family acts by elementwise image.
pub fn as_hyper_system(system: &System, max_cardinality: usize) -> Result<System, Error> {
    let base = system.space.clone();
    let n = base.n_points();
    let m = max_cardinality.min(n);
    if m == 0 {
        return Err(Error::input("max cardinality must be ≥ 1"));
    }
    let count: u64 = {
        // Σ_{j=1..m} C(n, j), saturating
        let mut total: u64 = 0;
        let mut binom: u128 = 1;
        for j in 1..=m {
            binom = binom * (n - j + 1) as u128 / j as u128;
            total = total.saturating_add(binom.min(u64::MAX as u128) as u64);
        }
        total
    };
    if count > system.budget.max_space_points {
        return Err(Error::resource(
            "hyperspace points",
            count,
            system.budget.max_space_points,
        ));
    }

    let points = enumerate_hyperpoints(n, m);
    let total = points.len();
    let index: HashMap<&HyperPoint, usize> =
        points.iter().enumerate().map(|(i, p)| (p, i)).collect();

    let labels = points.iter().map(|p| p.label(&base)).collect();

    // Open base: Vietoris basics over subsets of the base open base of
    // size ≤ m, realized as membership sets and deduplicated.
    let base_opens = &base.open_base;
    let mut open_base: Vec<NamedSet> = Vec::new();
    let mut seen_members: HashMap<PointSet, ()> = HashMap::new();
    let mut choice: Vec<usize> = Vec::new();
    enumerate_subsets(base_opens.len(), m, 0, &mut choice, &mut |sel| {
        let hit_sets: Vec<PointSet> = sel.iter().map(|&i| base_opens[i].set.clone()).collect();
        let basic = VietorisBasic { hit_sets };
        let mut members = PointSet::empty(total);
        for (pi, p) in points.iter().enumerate() {
            if basic.contains(p) {
                members.insert(pi);
            }
        }
        if members.is_empty() || seen_members.contains_key(&members) {
            return;
        }
        seen_members.insert(members.clone(), ());
        let name = format!(
            "<{}>",
            sel.iter()
                .map(|&i| base_opens[i].name.as_str())
                .collect::<Vec<_>>()
                .join(",")
        );
        open_base.push(NamedSet { name, set: members });
    });
    if open_base.is_empty() {
        return Err(Error::input("hyperspace open base came out empty"));
    }

    let maps = system
        .family
        .maps
        .iter()
        .map(|tab| {
            points
                .iter()
                .map(|p| {
                    let img =
                        HyperPoint::new(p.elements().iter().map(|&x| tab[x]).collect()).unwrap();
                    index[&img]
                })
                .collect()
        })
        .collect();

    let space = SpaceModel {
        labels,
        metric: Metric::Hausdorff {
            base,
            sets: Arc::new(points),
        },
        open_base,
    };
    System::with_budget(space, MapFamily::new(maps), system.budget)
}

fn enumerate_subsets(
    n: usize,
    max_size: usize,
    start: usize,
    current: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if !current.is_empty() {
        f(current);
    }
    if current.len() == max_size {
        return;
    }
    for i in start..n {
        current.push(i);
        enumerate_subsets(n, max_size, i + 1, current, f);
        current.pop();
    }
}

/// Minimal `n` with `ω̄_{nk}(A) = A` for all `k ≥ 1`, computed on the
/// set-orbit directly (no hyperspace enumeration), or `None`.
pub fn hyper_point_period(system: &System, a: &HyperPoint) -> Result<Option<usize>, Error> {
    let p = system.family.period();
    let rho = OrbitRho::compute(
        p,
        a.clone(),
        |m, s: &HyperPoint| {
            let tab = system.family.map_for(m);
            HyperPoint::new(s.elements().iter().map(|&x| tab[x]).collect()).unwrap()
        },
        system.budget.max_trace_steps,
    )?;
    Ok(rho.minimal_return_period())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn line3() -> SpaceModel {
        let mids = Arc::new(vec![rat(0, 1), rat(1, 2), rat(1, 1)]);
        SpaceModel::discrete(
            vec!["0".into(), "1/2".into(), "1".into()],
            Metric::Midpoint { mids },
        )
    }

    #[test]
    fn hausdorff_of_equal_sets_is_zero() {
        let sp = line3();
        let a = HyperPoint::new(vec![0, 2]).unwrap();
        assert_eq!(hausdorff_distance(&sp, &a, &a).unwrap(), rat(0, 1));
    }

    #[test]
    fn hausdorff_singletons_preserve_metric() {
        let sp = line3();
        for i in 0..3 {
            for j in 0..3 {
                let d = hausdorff_distance(
                    &sp,
                    &HyperPoint::singleton(i),
                    &HyperPoint::singleton(j),
                )
                .unwrap();
                assert_eq!(d, sp.dist(i, j));
            }
        }
    }

    #[test]
    fn hausdorff_forced_by_max_min() {
        // base {0, 1/2, 1}: d_H({0}, {0,1}) = 1
        let sp = line3();
        let a = HyperPoint::singleton(0);
        let b = HyperPoint::new(vec![0, 2]).unwrap();
        assert_eq!(hausdorff_distance(&sp, &a, &b).unwrap(), rat(1, 1));
    }

    #[test]
    fn vietoris_membership() {
        let n = 3;
        let whole = VietorisBasic::new(vec![PointSet::full(n)]).unwrap();
        let ab = VietorisBasic::new(vec![
            PointSet::from_iter(n, [0]),
            PointSet::from_iter(n, [1]),
        ])
        .unwrap();
        let a = HyperPoint::singleton(0);
        let both = HyperPoint::new(vec![0, 1]).unwrap();
        assert!(whole.contains(&a));
        assert!(whole.contains(&both));
        assert!(!ab.contains(&a)); // misses {b}
        assert!(ab.contains(&both));
        assert!(VietorisBasic::new(vec![]).is_err());
    }

    #[test]
    fn upper_vietoris_is_containment() {
        let u = PointSet::from_iter(3, [0, 1]);
        assert!(upper_vietoris_contains(&u, &HyperPoint::new(vec![0, 1]).unwrap()));
        assert!(!upper_vietoris_contains(&u, &HyperPoint::new(vec![0, 2]).unwrap()));
    }

    #[test]
    fn enumeration_counts() {
        // C(2,1)+C(2,2) = 3
        assert_eq!(enumerate_hyperpoints(2, 2).len(), 3);
        // C(6,1)+C(6,2)+C(6,3) = 6+15+20 = 41
        assert_eq!(enumerate_hyperpoints(6, 3).len(), 41);
    }

    #[test]
    fn swap_lift_fixes_full_set() {
        let sp = line3();
        // swap points 0 and 2, fix 1
        let sys = System::new(sp, MapFamily::new(vec![vec![2, 1, 0]])).unwrap();
        let hyper = as_hyper_system(&sys, 3).unwrap();
        let full = HyperPoint::new(vec![0, 1, 2]).unwrap();
        let idx = hyper
            .space
            .labels
            .iter()
            .position(|l| l == &full.label(&sys.space))
            .unwrap();
        assert_eq!(hyper.omega_eval(1, idx).unwrap(), idx);
    }

    #[test]
    fn singleton_subdynamics_conjugate_to_base() {
        let sp = line3();
        let sys = System::new(sp, MapFamily::new(vec![vec![1, 2, 0]])).unwrap();
        let hyper = as_hyper_system(&sys, 2).unwrap();
        // singletons come first in enumeration order, so index i ↦ {x_i}
        for n in 1..=5 {
            for x in 0..3 {
                let hx = hyper.omega_eval(n, x).unwrap();
                let bx = sys.omega_eval(n, x).unwrap();
                assert_eq!(hx, bx);
            }
        }
    }

    #[test]
    fn lift_image_equivariance_and_monotonicity() {
        let sp = line3();
        let sys = System::new(sp, MapFamily::new(vec![vec![1, 2, 0], vec![0, 0, 2]])).unwrap();
        for n in 1..=6 {
            for x in 0..3 {
                let lifted = lift_image(&sys, n, &HyperPoint::singleton(x)).unwrap();
                assert_eq!(lifted, HyperPoint::singleton(sys.omega_eval(n, x).unwrap()));
            }
            let a = HyperPoint::new(vec![0, 1]).unwrap();
            let b = HyperPoint::new(vec![0, 1, 2]).unwrap();
            let ia = lift_image(&sys, n, &a).unwrap();
            let ib = lift_image(&sys, n, &b).unwrap();
            assert!(ia.elements().iter().all(|x| ib.contains(*x)));
        }
    }
}
