//! Constructors for the standard test systems (shift truncations, the
//! odometer, interval-map grids, rotations, seeded random systems) and
//! the combinators the proposition suites need.
//!
//! Shift and odometer spaces are finite truncations of the sequence
//! space: claims about the infinite space are restated as growth-in-K
//! statements on the truncations. The truncated shift is made total by
//! appending a fixed fill symbol; this erases information at the word
//! boundary, so suites that use shift truncations keep their time ranges
//! inside `n ≤ L - k` margins.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::family::{block_family, product_system, MapFamily, System};
use crate::pointset::PointSet;
use crate::rat::{parse_rat, rat, Rat};
use crate::space::{Metric, NamedSet, SpaceModel};

fn word_labels(alphabet: usize, len: usize) -> Vec<Vec<u8>> {
    let total = alphabet.pow(len as u32);
    (0..total)
        .map(|mut idx| {
            let mut w = vec![0u8; len];
            for pos in (0..len).rev() {
                w[pos] = (idx % alphabet) as u8;
                idx /= alphabet;
            }
            w
        })
        .collect()
}

fn word_index(alphabet: usize, w: &[u8]) -> usize {
    w.iter().fold(0, |acc, &d| acc * alphabet + d as usize)
}

fn cylinder_open_base(alphabet: usize, len: usize, max_prefix: usize) -> Vec<NamedSet> {
    let total = alphabet.pow(len as u32);
    let mut out = Vec::new();
    for plen in 0..=max_prefix.min(len) {
        for prefix in word_labels(alphabet, plen) {
            let lo = word_index(alphabet, &prefix) * alphabet.pow((len - plen) as u32);
            let hi = lo + alphabet.pow((len - plen) as u32);
            let name = if plen == 0 {
                "[]".to_string()
            } else {
                format!(
                    "[{}]",
                    prefix.iter().map(|d| d.to_string()).collect::<String>()
                )
            };
            out.push(NamedSet {
                name,
                set: PointSet::from_iter(total, lo..hi),
            });
        }
    }
    out
}

/// Set of a cylinder `[w]` in a word space, for use as a hyperpoint or
/// open set.
pub fn cylinder_points(alphabet: usize, len: usize, prefix: &[u8]) -> Vec<usize> {
    let lo = word_index(alphabet, prefix) * alphabet.pow((len - prefix.len()) as u32);
    let hi = lo + alphabet.pow((len - prefix.len()) as u32);
    (lo..hi).collect()
}

/// Truncated full shift: all words of length L, metric
/// `d(x,y) = 2^{-(first difference - 1)}`, cylinder opens for prefixes of
/// length ≤ `max_prefix`, and σ as drop-first-append-fill.
pub fn make_full_shift(alphabet: usize, trunc: usize) -> Result<System, Error> {
    make_full_shift_with(alphabet, trunc, 0, trunc / 2)
}

pub fn make_full_shift_with(
    alphabet: usize,
    trunc: usize,
    fill: u8,
    max_prefix: usize,
) -> Result<System, Error> {
    if alphabet < 2 || trunc < 1 {
        return Err(Error::input("full shift needs alphabet ≥ 2 and L ≥ 1"));
    }
    if (fill as usize) >= alphabet {
        return Err(Error::input("fill symbol outside alphabet"));
    }
    let words = word_labels(alphabet, trunc);
    let sigma: Vec<usize> = words
        .iter()
        .map(|w| {
            let mut shifted: Vec<u8> = w[1..].to_vec();
            shifted.push(fill);
            word_index(alphabet, &shifted)
        })
        .collect();
    let labels = words
        .iter()
        .map(|w| w.iter().map(|d| d.to_string()).collect::<String>())
        .collect();
    let space = SpaceModel {
        labels,
        metric: Metric::FirstDiff {
            words: Arc::new(words),
        },
        open_base: cylinder_open_base(alphabet, trunc, max_prefix.max(1)),
    };
    System::new(space, MapFamily::new(vec![sigma]))
}

/// Odometer truncation: binary words of length K (least-significant bit
/// first) with φ = add `100…` with carry propagating to the right,
/// wrapping at the K-th bit.
pub fn make_odometer(trunc: usize) -> Result<System, Error> {
    make_odometer_with(trunc, 2.min(trunc))
}

pub fn make_odometer_with(trunc: usize, max_prefix: usize) -> Result<System, Error> {
    if trunc < 1 {
        return Err(Error::input("odometer needs K ≥ 1"));
    }
    let words = word_labels(2, trunc);
    let phi: Vec<usize> = words
        .iter()
        .map(|w| {
            let mut out = w.clone();
            for bit in out.iter_mut() {
                if *bit == 0 {
                    *bit = 1;
                    break;
                }
                *bit = 0; // carry continues rightward
            }
            word_index(2, &out)
        })
        .collect();
    let labels = words
        .iter()
        .map(|w| w.iter().map(|d| d.to_string()).collect::<String>())
        .collect();
    let space = SpaceModel {
        labels,
        metric: Metric::FirstDiff {
            words: Arc::new(words),
        },
        open_base: cylinder_open_base(2, trunc, max_prefix.max(1)),
    };
    System::new(space, MapFamily::new(vec![phi]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityPosition {
    First,
    Second,
}

/// Alternate the family's maps with the identity:
/// identity-first gives `ω_{2k} = ω_{2k+1} = (input ω_k)`,
/// identity-second gives `ω_{2k-1} = ω_{2k} = (input ω_k)`.
pub fn interleave_identity(family: &MapFamily, position: IdentityPosition) -> MapFamily {
    let n = family.maps[0].len();
    let identity: Vec<usize> = (0..n).collect();
    let mut maps = Vec::with_capacity(family.maps.len() * 2);
    for m in &family.maps {
        match position {
            IdentityPosition::First => {
                maps.push(identity.clone());
                maps.push(m.as_ref().clone());
            }
            IdentityPosition::Second => {
                maps.push(m.as_ref().clone());
                maps.push(identity.clone());
            }
        }
    }
    MapFamily::new(maps)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapExpr {
    Tent,
    /// logistic map `r·x·(1-x)`, r given as an exact rational in [0, 4]
    Logistic(String),
    /// rotation `x + α mod 1`
    Rotation(String),
}

fn eval_map_expr(expr: &MapExpr, x: &Rat) -> Result<Rat, Error> {
    Ok(match expr {
        MapExpr::Tent => {
            if *x < rat(1, 2) {
                rat(2, 1) * *x
            } else {
                rat(2, 1) - rat(2, 1) * *x
            }
        }
        MapExpr::Logistic(r) => {
            let r = parse_rat(r)?;
            if r < Rat::zero() || r > rat(4, 1) {
                return Err(Error::input("logistic parameter must lie in [0, 4]"));
            }
            r * *x * (Rat::one() - *x)
        }
        MapExpr::Rotation(alpha) => {
            let a = parse_rat(alpha)?;
            let mut v = *x + a;
            while v >= Rat::one() {
                v -= Rat::one();
            }
            while v < Rat::zero() {
                v += Rat::one();
            }
            v
        }
    })
}

/// Midpoint discretization of an interval map on N cells of [0,1].
///
/// Points are cells with midpoint representatives, the metric is the
/// exact midpoint difference, and the open base is all unions of 2 or 3
/// adjacent cells. Single cells are excluded: a one-point open set has
/// image diameter 0 forever, which would make sensitivity vacuously fail
/// at any resolution; verdicts are statements about the discretized
/// system only.
pub fn make_interval_grid(expr: &MapExpr, cells: usize) -> Result<System, Error> {
    if cells < 2 {
        return Err(Error::input("interval grid needs N ≥ 2"));
    }
    let mids: Vec<Rat> = (0..cells)
        .map(|i| rat(2 * i as i64 + 1, 2 * cells as i64))
        .collect();
    let cell_of = |v: &Rat| -> usize {
        if *v >= Rat::one() {
            return cells - 1;
        }
        if *v <= Rat::zero() {
            return 0;
        }
        let scaled = *v * rat(cells as i64, 1);
        (scaled.floor().to_integer() as usize).min(cells - 1)
    };
    let table: Vec<usize> = mids
        .iter()
        .map(|m| eval_map_expr(expr, m).map(|v| cell_of(&v)))
        .collect::<Result<_, _>>()?;
    let labels = (0..cells).map(|i| format!("c{i}")).collect();
    let mut open_base = Vec::new();
    for run in 2..=3usize {
        if cells < run {
            continue;
        }
        for start in 0..=(cells - run) {
            open_base.push(NamedSet {
                name: format!("cells[{}..{}]", start, start + run - 1),
                set: PointSet::from_iter(cells, start..start + run),
            });
        }
    }
    let space = SpaceModel {
        labels,
        metric: Metric::Midpoint {
            mids: Arc::new(mids),
        },
        open_base,
    };
    System::new(space, MapFamily::new(vec![table]))
}

/// Cyclic rotation by one step on n points with the rotation-invariant
/// circular metric `min(|i-j|, n-|i-j|)/n`; an isometric system.
pub fn make_rotation(n: usize) -> Result<System, Error> {
    if n < 2 {
        return Err(Error::input("rotation needs ≥ 2 points"));
    }
    let metric: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let d = (i as i64 - j as i64).abs();
                    rat(d.min(n as i64 - d), n as i64)
                })
                .collect()
        })
        .collect();
    let space = SpaceModel::discrete(
        (0..n).map(|i| format!("r{i}")).collect(),
        Metric::Table(Arc::new(metric)),
    );
    let table: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    System::new(space, MapFamily::new(vec![table]))
}

/// Seeded random system: uniform self-map tables over n points and a
/// random rational metric repaired to the shortest-path metric so the
/// triangle inequality holds exactly. Deterministic in the seed.
pub fn make_random_finite(n_points: usize, p_period: usize, seed: u64) -> Result<System, Error> {
    if n_points < 1 || p_period < 1 {
        return Err(Error::input("random system needs n ≥ 1 and period ≥ 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = n_points;
    // sample, then shortest-path repair
    let mut d: Vec<Vec<Rat>> = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rat(rng.gen_range(1..=16), 16);
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    let maps: Vec<Vec<usize>> = (0..p_period)
        .map(|_| (0..n).map(|_| rng.gen_range(0..n)).collect())
        .collect();
    let space = SpaceModel::discrete(
        (0..n).map(|i| format!("p{i}")).collect(),
        Metric::Table(Arc::new(d)),
    );
    System::new(space, MapFamily::new(maps))
}

/// A deterministic recipe for a constructed system, optionally followed
/// by a combinator chain.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemRecipe {
    FullShift {
        alphabet: usize,
        trunc: usize,
        #[serde(default)]
        fill: u8,
        #[serde(default)]
        max_prefix: Option<usize>,
    },
    Odometer {
        trunc: usize,
        #[serde(default)]
        max_prefix: Option<usize>,
    },
    IntervalGrid {
        map: MapExpr,
        cells: usize,
    },
    Permutation {
        size: usize,
    },
    RandomFinite {
        points: usize,
        period: usize,
        seed: u64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum FamilyPost {
    InterleaveIdentity { position: IdentityPosition },
    Block { n: usize },
    Product { k: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Recipe {
    #[serde(flatten)]
    pub system: SystemRecipe,
    #[serde(default)]
    pub family_post: Vec<FamilyPost>,
}

pub fn build_recipe(recipe: &Recipe) -> Result<System, Error> {
    let mut sys = match &recipe.system {
        SystemRecipe::FullShift {
            alphabet,
            trunc,
            fill,
            max_prefix,
        } => make_full_shift_with(*alphabet, *trunc, *fill, max_prefix.unwrap_or(trunc / 2))?,
        SystemRecipe::Odometer { trunc, max_prefix } => {
            make_odometer_with(*trunc, max_prefix.unwrap_or(2.min(*trunc)))?
        }
        SystemRecipe::IntervalGrid { map, cells } => make_interval_grid(map, *cells)?,
        SystemRecipe::Permutation { size } => make_rotation(*size)?,
        SystemRecipe::RandomFinite {
            points,
            period,
            seed,
        } => make_random_finite(*points, *period, *seed)?,
    };
    for post in &recipe.family_post {
        sys = match post {
            FamilyPost::InterleaveIdentity { position } => System::with_budget(
                (*sys.space).clone(),
                interleave_identity(&sys.family, *position),
                sys.budget,
            )?,
            FamilyPost::Block { n } => System::with_budget(
                (*sys.space).clone(),
                block_family(&sys.family, *n)?,
                sys.budget,
            )?,
            FamilyPost::Product { k } => product_system(&sys, *k)?,
        };
    }
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn label_of(sys: &System, idx: usize) -> &str {
        &sys.space.labels[idx]
    }

    #[test]
    fn shift_drop_and_append() {
        let sys = make_full_shift(2, 3).unwrap();
        assert_eq!(sys.n_points(), 8);
        let from = sys.space.point_by_label("101").unwrap();
        let to = sys.family.maps[0][from];
        assert_eq!(label_of(&sys, to), "010"); // drop first, append fill 0
    }

    #[test]
    fn shift_metric_values() {
        let sys = make_full_shift(2, 3).unwrap();
        let d = |a: &str, b: &str| {
            sys.space.dist(
                sys.space.point_by_label(a).unwrap(),
                sys.space.point_by_label(b).unwrap(),
            )
        };
        assert_eq!(d("000", "100"), rat(1, 1));
        assert_eq!(d("010", "011"), rat(1, 4));
    }

    #[test]
    fn shift_l1_is_constant_append() {
        let sys = make_full_shift(2, 1).unwrap();
        assert_eq!(sys.n_points(), 2);
        // σ drops the only symbol and appends fill: constant map to "0"
        assert_eq!(sys.family.maps[0], vec![Arc::new(vec![0, 0])][0]);
    }

    #[test]
    fn odometer_carry_examples() {
        let sys = make_odometer(3).unwrap();
        let step = |w: &str| {
            let i = sys.space.point_by_label(w).unwrap();
            label_of(&sys, sys.family.maps[0][i]).to_string()
        };
        assert_eq!(step("000"), "100");
        assert_eq!(step("110"), "001"); // carry through two 1s
        assert_eq!(step("111"), "000"); // full wrap
    }

    #[test]
    fn odometer_order_is_two_to_k() {
        for k in 1..=5usize {
            let sys = make_odometer(k).unwrap();
            let phi = &sys.family.maps[0];
            let mut power: Vec<usize> = (0..sys.n_points()).collect();
            let mut order = 0usize;
            loop {
                power = power.iter().map(|&x| phi[x]).collect();
                order += 1;
                if power.iter().enumerate().all(|(i, &y)| i == y) {
                    break;
                }
            }
            assert_eq!(order, 1 << k);
        }
    }

    #[test]
    fn odometer_omega_eval_example() {
        // truncation K=3, family [φ], n=1, x=000 → 100
        let sys = make_odometer(3).unwrap();
        let x = sys.space.point_by_label("000").unwrap();
        let y = sys.omega_eval(1, x).unwrap();
        assert_eq!(label_of(&sys, y), "100");
    }

    #[test]
    fn interleave_identity_algebra() {
        let sys = make_odometer(2).unwrap();
        let inter = interleave_identity(&sys.family, IdentityPosition::Second);
        let isys = System::new((*sys.space).clone(), inter.clone()).unwrap();
        // identity second: ω_3 = φ²
        for x in 0..sys.n_points() {
            assert_eq!(
                isys.omega_eval_fold(3, x).unwrap(),
                sys.omega_eval_fold(2, x).unwrap()
            );
        }
        // identity first: ω_5 = φ²
        let ifirst = interleave_identity(&sys.family, IdentityPosition::First);
        let fsys = System::new((*sys.space).clone(), ifirst).unwrap();
        for x in 0..sys.n_points() {
            assert_eq!(
                fsys.omega_eval_fold(5, x).unwrap(),
                sys.omega_eval_fold(2, x).unwrap()
            );
        }
        // block_family(interleave([f]), 2) equals [f] as tables
        let blocked = block_family(&inter, 2).unwrap();
        assert_eq!(blocked.maps, sys.family.maps);
    }

    #[test]
    fn interleaving_identity_family_is_identity() {
        let fam = MapFamily::identity(3);
        let inter = interleave_identity(&fam, IdentityPosition::First);
        assert!(inter.maps.iter().all(|m| m.as_ref() == &vec![0, 1, 2]));
    }

    #[test]
    fn tent_grid_cells() {
        // tent, N=2: cell 0 midpoint 1/4 → tent = 1/2 → cell 1
        let sys = make_interval_grid(&MapExpr::Tent, 2).unwrap();
        assert_eq!(sys.family.maps[0][0], 1);
        // rotation(0) = identity table
        let rot = make_interval_grid(&MapExpr::Rotation("0".into()), 4).unwrap();
        assert_eq!(rot.family.maps[0].as_ref(), &vec![0, 1, 2, 3]);
        // logistic(4), N=4: cell index 1 (0-based) midpoint 3/8 → 4·(3/8)·(5/8) = 15/16 → last cell
        let log = make_interval_grid(&MapExpr::Logistic("4".into()), 4).unwrap();
        assert_eq!(log.family.maps[0][1], 3);
        assert!(make_interval_grid(&MapExpr::Logistic("9/2".into()), 4).is_err());
        assert!(make_interval_grid(&MapExpr::Tent, 1).is_err());
    }

    #[test]
    fn random_finite_is_deterministic_and_metric_exact() {
        let a = make_random_finite(6, 2, 42).unwrap();
        let b = make_random_finite(6, 2, 42).unwrap();
        assert_eq!(a.family.maps, b.family.maps);
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(a.space.dist(i, j), b.space.dist(i, j));
            }
        }
        a.space.validate().unwrap(); // exhaustive triple audit post-repair
    }

    #[test]
    fn recipe_round_trip_and_build() {
        let json = r#"{"kind":"odometer","trunc":3,"family_post":[{"op":"interleave_identity","position":"first"}]}"#;
        let recipe: Recipe = serde_json::from_str(json).unwrap();
        let sys = build_recipe(&recipe).unwrap();
        assert_eq!(sys.family.period(), 2);
        let back = serde_json::to_string(&recipe).unwrap();
        let again: Recipe = serde_json::from_str(&back).unwrap();
        let sys2 = build_recipe(&again).unwrap();
        assert_eq!(sys.family.maps, sys2.family.maps);
    }
}
