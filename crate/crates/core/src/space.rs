//! The state space: labeled points, an exact rational metric and a
//! declared base of open sets. The open base makes the "for every
//! non-empty open set" quantifiers of the dynamical properties finite.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::Error;
use crate::hyperspace::HyperPoint;
use crate::pointset::PointSet;
use crate::rat::Rat;

/// A named basic open set.
#[derive(Clone, Debug)]
pub struct NamedSet {
    pub name: String,
    pub set: PointSet,
}

/// The metric, stored either as an explicit matrix or in a structured
/// form evaluated on demand. Structured forms keep large spaces (shift
/// truncations, hyperspaces) representable without materializing an
/// `n × n` table.
#[derive(Clone)]
pub enum Metric {
    /// Explicit symmetric matrix.
    Table(Arc<Vec<Vec<Rat>>>),
    /// `d(x, y) = 2^{-(j-1)}` where `j` is the 1-based first position at
    /// which the words differ; 0 when equal.
    FirstDiff { words: Arc<Vec<Vec<u8>>> },
    /// `|m_i - m_j|` over per-point representatives (interval grids).
    Midpoint { mids: Arc<Vec<Rat>> },
    /// Hausdorff distance between finite subsets of a base space.
    Hausdorff {
        base: Arc<SpaceModel>,
        sets: Arc<Vec<HyperPoint>>,
    },
    /// Max metric over coordinate tuples of a base space.
    MaxTuple {
        base: Arc<SpaceModel>,
        tuples: Arc<Vec<Vec<usize>>>,
    },
}

impl Metric {
    pub fn dist(&self, i: usize, j: usize) -> Rat {
        match self {
            Metric::Table(m) => m[i][j],
            Metric::FirstDiff { words } => first_diff_dist(&words[i], &words[j]),
            Metric::Midpoint { mids } => {
                let d = mids[i] - mids[j];
                if d < Rat::zero() {
                    -d
                } else {
                    d
                }
            }
            Metric::Hausdorff { base, sets } => {
                crate::hyperspace::hausdorff_distance_raw(base, &sets[i], &sets[j])
            }
            Metric::MaxTuple { base, tuples } => tuples[i]
                .iter()
                .zip(&tuples[j])
                .map(|(&a, &b)| base.dist(a, b))
                .max()
                .unwrap_or_else(Rat::zero),
        }
    }
}

pub fn first_diff_dist(a: &[u8], b: &[u8]) -> Rat {
    match a.iter().zip(b).position(|(x, y)| x != y) {
        Some(j) => Rat::new(1, 1 << j.min(62)),
        None => Rat::zero(),
    }
}

/// A finite metric space with labeled points and a declared open base.
#[derive(Clone)]
pub struct SpaceModel {
    pub labels: Vec<String>,
    pub metric: Metric,
    pub open_base: Vec<NamedSet>,
}

impl SpaceModel {
    /// Space with the discrete default open base (all singletons).
    pub fn discrete(labels: Vec<String>, metric: Metric) -> Self {
        let n = labels.len();
        let open_base = (0..n)
            .map(|i| NamedSet {
                name: labels[i].clone(),
                set: PointSet::from_iter(n, [i]),
            })
            .collect();
        SpaceModel {
            labels,
            metric,
            open_base,
        }
    }

    pub fn n_points(&self) -> usize {
        self.labels.len()
    }

    pub fn dist(&self, i: usize, j: usize) -> Rat {
        self.metric.dist(i, j)
    }

    pub fn point_by_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// All distinct metric values over ordered pairs, sorted ascending.
    /// Quadratic; intended for desk-scale spaces.
    pub fn realized_values(&self) -> Vec<Rat> {
        let n = self.n_points();
        let mut vals = BTreeSet::new();
        for i in 0..n {
            for j in i..n {
                vals.insert(self.dist(i, j));
            }
        }
        vals.into_iter().collect()
    }

    /// Smallest positive realized distance, if the space has ≥ 2 points.
    pub fn min_positive_distance(&self) -> Option<Rat> {
        self.realized_values()
            .into_iter()
            .find(|v| *v > Rat::zero())
    }

    pub fn diameter(&self) -> Rat {
        self.realized_values()
            .into_iter()
            .last()
            .unwrap_or_else(Rat::zero)
    }

    /// Exhaustive check of the metric axioms (exact rational arithmetic,
    /// no tolerance) and of the open-base invariants.
    pub fn validate(&self) -> Result<(), Error> {
        let n = self.n_points();
        if n == 0 {
            return Err(Error::input("space has no points"));
        }
        for i in 0..n {
            if self.dist(i, i) != Rat::zero() {
                return Err(Error::input(format!("d({i},{i}) != 0")));
            }
            for j in 0..n {
                let d = self.dist(i, j);
                if i != j && d <= Rat::zero() {
                    return Err(Error::input(format!("d({i},{j}) not positive")));
                }
                if d != self.dist(j, i) {
                    return Err(Error::input(format!("d({i},{j}) not symmetric")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.dist(i, k) > self.dist(i, j) + self.dist(j, k) {
                        return Err(Error::input(format!(
                            "triangle inequality fails at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        self.validate_open_base()
    }

    pub fn validate_open_base(&self) -> Result<(), Error> {
        let n = self.n_points();
        if self.open_base.is_empty() {
            return Err(Error::input("open base is empty"));
        }
        let mut union = PointSet::empty(n);
        for s in &self.open_base {
            if s.set.is_empty() {
                return Err(Error::input(format!("open base set {:?} is empty", s.name)));
            }
            union.union_with(&s.set);
        }
        if union.len() != n {
            return Err(Error::input("open base does not cover the space"));
        }
        Ok(())
    }
}

impl std::fmt::Debug for SpaceModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpaceModel")
            .field("n_points", &self.n_points())
            .field("open_base", &self.open_base.len())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn line3() -> SpaceModel {
        // {0, 1/2, 1} with the euclidean metric
        let mids = Arc::new(vec![rat(0, 1), rat(1, 2), rat(1, 1)]);
        SpaceModel::discrete(
            vec!["0".into(), "1/2".into(), "1".into()],
            Metric::Midpoint { mids },
        )
    }

    #[test]
    fn metric_axioms_hold() {
        line3().validate().unwrap();
    }

    #[test]
    fn bad_metric_rejected() {
        let m = vec![
            vec![rat(0, 1), rat(1, 1)],
            vec![rat(2, 1), rat(0, 1)], // asymmetric
        ];
        let sp = SpaceModel::discrete(
            vec!["a".into(), "b".into()],
            Metric::Table(Arc::new(m)),
        );
        assert!(sp.validate().is_err());
    }

    #[test]
    fn realized_values_sorted() {
        let v = line3().realized_values();
        assert_eq!(v, vec![rat(0, 1), rat(1, 2), rat(1, 1)]);
        assert_eq!(line3().min_positive_distance(), Some(rat(1, 2)));
        assert_eq!(line3().diameter(), rat(1, 1));
    }

    #[test]
    fn first_diff_metric() {
        let words = Arc::new(vec![vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![0, 1, 1]]);
        let m = Metric::FirstDiff { words };
        assert_eq!(m.dist(0, 1), rat(1, 1));
        assert_eq!(m.dist(2, 3), rat(1, 4));
        assert_eq!(m.dist(0, 0), rat(0, 1));
    }
}
