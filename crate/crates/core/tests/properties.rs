//! Randomized property tests: metric laws of the Hausdorff lift and
//! exactness of the minimal-subcover solver against a brute-force
//! oracle, over generated instances.

use proptest::prelude::*;

use hyperdyn::entropy::{min_subcover_size, OpenCover};
use hyperdyn::hyperspace::{hausdorff_distance_raw, HyperPoint};
use hyperdyn::pointset::PointSet;
use hyperdyn::rat::zero;
use hyperdyn::zoo::make_random_finite;

fn hyperpoint(n: usize) -> impl Strategy<Value = HyperPoint> {
    proptest::collection::btree_set(0..n, 1..=n)
        .prop_map(|s| HyperPoint::new(s.into_iter().collect()).expect("nonempty"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hausdorff_metric_laws(
        seed in 0u64..1000,
        sets in proptest::collection::vec(hyperpoint(5), 3),
    ) {
        let sys = make_random_finite(5, 1, seed).expect("system");
        let space = &sys.space;
        let (a, b, c) = (&sets[0], &sets[1], &sets[2]);
        let dab = hausdorff_distance_raw(space, a, b);
        let dba = hausdorff_distance_raw(space, b, a);
        let dac = hausdorff_distance_raw(space, a, c);
        let dcb = hausdorff_distance_raw(space, c, b);
        prop_assert_eq!(dab, dba);
        prop_assert_eq!(dab == zero(), a == b);
        prop_assert!(dab <= dac + dcb);
    }

    #[test]
    fn min_subcover_matches_brute_force(
        masks in proptest::collection::vec(1u32..(1 << 7), 1..=6),
    ) {
        let n = 7usize;
        // pad with the full set so the family always covers
        let mut sets: Vec<PointSet> = masks
            .iter()
            .map(|&m| PointSet::from_iter(n, (0..n).filter(|i| m & (1 << i) != 0)))
            .collect();
        sets.push(PointSet::full(n));
        let cover = OpenCover::new(n, sets.clone()).expect("covers by construction");
        let got = min_subcover_size(n, &cover)?;

        // brute force over all subfamilies of the canonical set list
        let k = cover_sets_len(&cover);
        let mut best = u32::MAX;
        for mask in 1u32..(1 << k) {
            let mut union = PointSet::empty(n);
            for (i, s) in cover_sets(&cover).iter().enumerate() {
                if mask & (1 << i) != 0 {
                    union.union_with(s);
                }
            }
            if union.len() == n {
                best = best.min(mask.count_ones());
            }
        }
        prop_assert_eq!(got, best as u64);
    }
}

fn cover_sets(cover: &OpenCover) -> &[PointSet] {
    &cover.sets
}

fn cover_sets_len(cover: &OpenCover) -> usize {
    cover.sets.len()
}
