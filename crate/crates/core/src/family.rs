//! The non-autonomous rule: a finite list of self-map tables cycled
//! periodically, the time-ordered compositions `ω_n = f_n ∘ … ∘ f_1`,
//! and their exact eventual-periodicity structure.
//!
//! On a finite space with a periodic family the sequence of pairs
//! `(n mod p, table of ω_n)` must repeat; the first repeat gives a
//! preperiod `τ` and cycle `c` with `ω_{n+c} = ω_n` for all `n ≥ τ`.
//! Every detector in this crate reduces its unbounded time quantifier to
//! the finitely many tables `ω_1, …, ω_{τ+c-1}`.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::Arc;

use num_integer::Integer;
use once_cell::sync::OnceCell;

use crate::budget::Budget;
use crate::error::Error;
use crate::pointset::PointSet;
use crate::space::{Metric, NamedSet, SpaceModel};

pub type MapTable = Arc<Vec<usize>>;

/// The family 𝔽 = (f_n), specified as `maps = [f_1 .. f_p]` with
/// `f_n = maps[(n-1) mod p]` for all `n ≥ 1`.
#[derive(Clone)]
pub struct MapFamily {
    pub maps: Vec<MapTable>,
}

impl MapFamily {
    pub fn new(maps: Vec<Vec<usize>>) -> Self {
        MapFamily {
            maps: maps.into_iter().map(Arc::new).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        MapFamily::new(vec![(0..n).collect()])
    }

    pub fn period(&self) -> usize {
        self.maps.len()
    }

    /// `f_n` for `n ≥ 1`.
    pub fn map_for(&self, n: usize) -> &MapTable {
        &self.maps[(n - 1) % self.maps.len()]
    }

    pub fn validate(&self, space: &SpaceModel) -> Result<(), Error> {
        if self.maps.is_empty() {
            return Err(Error::input("map family is empty"));
        }
        let n = space.n_points();
        for (k, m) in self.maps.iter().enumerate() {
            if m.len() != n {
                return Err(Error::input(format!(
                    "map {} has {} entries, space has {} points",
                    k + 1,
                    m.len(),
                    n
                )));
            }
            if let Some(&bad) = m.iter().find(|&&y| y >= n) {
                return Err(Error::input(format!(
                    "map {} sends a point to unknown id {bad}",
                    k + 1
                )));
            }
        }
        Ok(())
    }

    /// Verify `f_i ∘ f_j = f_j ∘ f_i` as tables for all i, j.
    pub fn is_commutative(&self) -> bool {
        let n = self.maps.first().map(|m| m.len()).unwrap_or(0);
        for a in &self.maps {
            for b in &self.maps {
                if (0..n).any(|x| a[b[x]] != b[a[x]]) {
                    return false;
                }
            }
        }
        true
    }
}

/// Cached tables `ω_1 .. ω_{τ+c-1}` plus the minimal preperiod/cycle pair;
/// all later `ω_n` are recovered by index arithmetic.
#[derive(Clone)]
pub struct CompositionTrace {
    tables: Vec<MapTable>, // tables[k] = ω_{k+1}
    pub preperiod: usize,  // τ ≥ 1
    pub cycle: usize,      // c ≥ 1
}

impl CompositionTrace {
    /// Table of `ω_n` for `n ≥ 1`.
    pub fn table(&self, n: usize) -> &MapTable {
        debug_assert!(n >= 1);
        let idx = if n < self.preperiod + self.cycle {
            n
        } else {
            self.preperiod + (n - self.preperiod) % self.cycle
        };
        &self.tables[idx - 1]
    }

    /// Largest `n` such that `ω_1 .. ω_n` lists every distinct table once:
    /// searching `n ≤ exact_horizon()` covers all time behavior.
    pub fn exact_horizon(&self) -> usize {
        self.preperiod + self.cycle - 1
    }

    /// Indices of the cyclic part, `τ ..= τ+c-1`.
    pub fn cyclic_range(&self) -> std::ops::RangeInclusive<usize> {
        self.preperiod..=self.preperiod + self.cycle - 1
    }
}

/// A space together with a family acting on it. The composition trace is
/// computed once on demand and shared.
#[derive(Clone)]
pub struct System {
    pub space: Arc<SpaceModel>,
    pub family: MapFamily,
    pub budget: Budget,
    trace: OnceCell<CompositionTrace>,
}

impl System {
    pub fn new(space: SpaceModel, family: MapFamily) -> Result<Self, Error> {
        Self::with_budget(space, family, Budget::default())
    }

    pub fn with_budget(
        space: SpaceModel,
        family: MapFamily,
        budget: Budget,
    ) -> Result<Self, Error> {
        family.validate(&space)?;
        space.validate_open_base()?;
        Ok(System {
            space: Arc::new(space),
            family,
            budget,
            trace: OnceCell::new(),
        })
    }

    pub fn n_points(&self) -> usize {
        self.space.n_points()
    }

    pub fn trace(&self) -> Result<&CompositionTrace, Error> {
        if let Some(t) = self.trace.get() {
            return Ok(t);
        }
        let t = build_trace(&self.family, self.n_points(), &self.budget)?;
        Ok(self.trace.get_or_init(|| t))
    }

    /// `ω_n(x)`, consistent with the cached trace.
    pub fn omega_eval(&self, n: usize, x: usize) -> Result<usize, Error> {
        if x >= self.n_points() {
            return Err(Error::input(format!("unknown point id {x}")));
        }
        if n == 0 {
            return Ok(x);
        }
        Ok(self.trace()?.table(n)[x])
    }

    /// Direct left-to-right fold of the map list, bypassing the trace.
    /// Kept as the independent route for cross-checking.
    pub fn omega_eval_fold(&self, n: usize, x: usize) -> Result<usize, Error> {
        if x >= self.n_points() {
            return Err(Error::input(format!("unknown point id {x}")));
        }
        let mut y = x;
        for m in 1..=n {
            y = self.family.map_for(m)[y];
        }
        Ok(y)
    }

    /// Forward image `ω_n(U)` as a set.
    pub fn image_set(&self, n: usize, set: &PointSet) -> Result<PointSet, Error> {
        let t = self.trace()?;
        let mut out = PointSet::empty(self.n_points());
        if n == 0 {
            return Ok(set.clone());
        }
        let tab = t.table(n);
        for x in set.iter() {
            out.insert(tab[x]);
        }
        Ok(out)
    }
}

impl std::fmt::Debug for System {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("System")
            .field("points", &self.n_points())
            .field("period", &self.family.period())
            .finish()
    }
}

fn compose(outer: &[usize], inner: &[usize]) -> Vec<usize> {
    inner.iter().map(|&x| outer[x]).collect()
}

fn build_trace(family: &MapFamily, n: usize, budget: &Budget) -> Result<CompositionTrace, Error> {
    let p = family.period();
    let mut tables: Vec<MapTable> = Vec::new();
    let mut seen: HashMap<(usize, MapTable), usize> = HashMap::new();
    let mut current: Vec<usize> = (0..n).collect();
    let mut step = 1usize;
    loop {
        if step as u64 > budget.max_trace_steps {
            return Err(Error::resource(
                "composition trace steps",
                step as u64,
                budget.max_trace_steps,
            ));
        }
        current = compose(family.map_for(step), &current);
        let tab: MapTable = Arc::new(current.clone());
        let key = (step % p, tab.clone());
        if let Some(&first) = seen.get(&key) {
            let preperiod = first;
            let cycle = step - first;
            tables.truncate(preperiod + cycle - 1);
            return Ok(CompositionTrace {
                tables,
                preperiod,
                cycle,
            });
        }
        seen.insert(key, step);
        tables.push(tab);
        step += 1;
    }
}

/// Eventually periodic orbit of states under a phase-indexed step
/// function: records `s_0, s_1, …` until the pair `(m mod p, s_m)`
/// repeats, returning the recorded states and the minimal `(τ, c)` of the
/// state sequence.
pub struct OrbitRho<S> {
    pub states: Vec<S>, // states[m] = s_m, m = 0 .. τ+c-1
    pub preperiod: usize,
    pub cycle: usize,
}

impl<S: Clone + Eq + Hash> OrbitRho<S> {
    pub fn compute(
        period: usize,
        s0: S,
        mut step: impl FnMut(usize, &S) -> S,
        max_steps: u64,
    ) -> Result<Self, Error> {
        let mut states = vec![s0.clone()];
        let mut seen: HashMap<(usize, S), usize> = HashMap::new();
        seen.insert((0, s0), 0);
        let mut m = 0usize;
        loop {
            if m as u64 > max_steps {
                return Err(Error::resource("orbit steps", m as u64, max_steps));
            }
            let next = step(m + 1, &states[m]);
            m += 1;
            let key = (m % period, next.clone());
            if let Some(&first) = seen.get(&key) {
                states.truncate(m);
                return Ok(OrbitRho {
                    states,
                    preperiod: first,
                    cycle: m - first,
                });
            }
            seen.insert(key, m);
            states.push(next);
        }
    }

    pub fn state_at(&self, m: usize) -> &S {
        let idx = if m < self.preperiod + self.cycle {
            m
        } else {
            self.preperiod + (m - self.preperiod) % self.cycle
        };
        &self.states[idx]
    }

    /// Minimal `n ≥ 1` with `s_{nk} = s_0` for all `k ≥ 1`, or `None`.
    ///
    /// If any such `n` exists, one exists with `n ≤ τ + c`: for `n ≥ τ`
    /// validity depends only on the residues `nk mod c`, which shrink (and
    /// so weaken the condition) as `gcd(n, c)` grows.
    pub fn minimal_return_period(&self) -> Option<usize> {
        let tau = self.preperiod;
        let c = self.cycle;
        'outer: for n in 1..=(tau + c) {
            let k_max = tau / n + c + 1;
            for k in 1..=k_max {
                if self.state_at(n * k) != &self.states[0] {
                    continue 'outer;
                }
            }
            return Some(n);
        }
        None
    }
}

/// Minimal non-autonomous period of point `x`: the least `n` with
/// `ω_{nk}(x) = x` for every `k ≥ 1`. `None` when `x` is not periodic.
pub fn point_period(system: &System, x: usize) -> Result<Option<usize>, Error> {
    if x >= system.n_points() {
        return Err(Error::input(format!("unknown point id {x}")));
    }
    let p = system.family.period();
    let rho = OrbitRho::compute(
        p,
        x,
        |m, &s| system.family.map_for(m)[s],
        system.budget.max_trace_steps,
    )?;
    Ok(rho.minimal_return_period())
}

/// The block family 𝔽_n: its j-th map is the composition of the j-th
/// block of `n` consecutive maps, `f_{(j-1)n+1}, …, f_{jn}` applied in
/// order. The output period is `p / gcd(p, n)` blocks.
pub fn block_family(family: &MapFamily, n: usize) -> Result<MapFamily, Error> {
    if n == 0 {
        return Err(Error::input("block size must be positive"));
    }
    let p = family.period();
    let blocks = p / p.gcd(&n);
    let size = family.maps[0].len();
    let mut out = Vec::with_capacity(blocks);
    for j in 0..blocks {
        let mut tab: Vec<usize> = (0..size).collect();
        for m in (j * n + 1)..=(j + 1) * n {
            tab = compose(family.map_for(m), &tab);
        }
        out.push(tab);
    }
    Ok(MapFamily::new(out))
}

/// The k-fold product system: points are k-tuples under the max metric,
/// the open base is all products of base basic opens, and the family acts
/// coordinatewise.
pub fn product_system(system: &System, arity: usize) -> Result<System, Error> {
    if arity < 1 {
        return Err(Error::input("product arity must be ≥ 1"));
    }
    if arity == 1 {
        return Ok(system.clone());
    }
    let n = system.n_points();
    let total = (n as u64).checked_pow(arity as u32).unwrap_or(u64::MAX);
    if total > system.budget.max_space_points {
        return Err(Error::resource(
            "product space points",
            total,
            system.budget.max_space_points,
        ));
    }
    let total = total as usize;

    // tuples in lexicographic order; index arithmetic base n
    let mut tuples = Vec::with_capacity(total);
    for mut idx in 0..total {
        let mut t = vec![0usize; arity];
        for slot in (0..arity).rev() {
            t[slot] = idx % n;
            idx /= n;
        }
        tuples.push(t);
    }
    let tuple_index = |t: &[usize]| -> usize { t.iter().fold(0, |acc, &x| acc * n + x) };

    let labels = tuples
        .iter()
        .map(|t| {
            let parts: Vec<&str> = t.iter().map(|&i| system.space.labels[i].as_str()).collect();
            format!("({})", parts.join(","))
        })
        .collect();

    // open base: products of base basic opens
    let base_opens = &system.space.open_base;
    let n_opens = base_opens.len();
    let open_count = (n_opens as u64).checked_pow(arity as u32).unwrap_or(u64::MAX);
    if open_count > system.budget.max_space_points {
        return Err(Error::resource(
            "product open base",
            open_count,
            system.budget.max_space_points,
        ));
    }
    let mut open_base = Vec::with_capacity(open_count as usize);
    for mut idx in 0..open_count as usize {
        let mut choice = vec![0usize; arity];
        for slot in (0..arity).rev() {
            choice[slot] = idx % n_opens;
            idx /= n_opens;
        }
        let mut set = PointSet::empty(total);
        for (ti, t) in tuples.iter().enumerate() {
            if t.iter()
                .zip(&choice)
                .all(|(&x, &o)| base_opens[o].set.contains(x))
            {
                set.insert(ti);
            }
        }
        let name = format!(
            "({})",
            choice
                .iter()
                .map(|&o| base_opens[o].name.as_str())
                .collect::<Vec<_>>()
                .join("×")
        );
        open_base.push(NamedSet { name, set });
    }

    let maps = system
        .family
        .maps
        .iter()
        .map(|m| {
            tuples
                .iter()
                .map(|t| {
                    let image: Vec<usize> = t.iter().map(|&x| m[x]).collect();
                    tuple_index(&image)
                })
                .collect()
        })
        .collect();

    let space = SpaceModel {
        labels,
        metric: Metric::MaxTuple {
            base: system.space.clone(),
            tuples: Arc::new(tuples),
        },
        open_base,
    };
    System::with_budget(space, MapFamily::new(maps), system.budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn discrete_space(n: usize) -> SpaceModel {
        let m: Vec<Vec<crate::rat::Rat>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { rat(0, 1) } else { rat(1, 1) }).collect())
            .collect();
        SpaceModel::discrete(
            (0..n).map(|i| format!("p{i}")).collect(),
            Metric::Table(Arc::new(m)),
        )
    }

    fn swap_system() -> System {
        // f swaps a <-> b
        System::new(discrete_space(2), MapFamily::new(vec![vec![1, 0]])).unwrap()
    }

    #[test]
    fn identity_trace_is_trivial() {
        let sys = System::new(discrete_space(3), MapFamily::identity(3)).unwrap();
        let t = sys.trace().unwrap();
        assert_eq!((t.preperiod, t.cycle), (1, 1));
        assert_eq!(sys.omega_eval(7, 0).unwrap(), 0);
    }

    #[test]
    fn swap_trace_alternates() {
        let sys = swap_system();
        let t = sys.trace().unwrap();
        assert_eq!((t.preperiod, t.cycle), (1, 2));
        assert_eq!(sys.omega_eval(1, 0).unwrap(), 1);
        assert_eq!(sys.omega_eval(2, 0).unwrap(), 0);
    }

    #[test]
    fn swap_then_identity_family() {
        // family [f, I] with f the 2-point swap: ω_1 = f, ω_2 = I∘f = f,
        // ω_3 = f∘I∘f = I, ω_4 = I∘ω_3 = I, then the pattern repeats
        let sys = System::new(
            discrete_space(2),
            MapFamily::new(vec![vec![1, 0], vec![0, 1]]),
        )
        .unwrap();
        assert_eq!(sys.omega_eval(2, 0).unwrap(), 1);
        assert_eq!(sys.omega_eval(3, 0).unwrap(), 0);
        assert_eq!(sys.omega_eval(5, 0).unwrap(), 1);
        // trace agrees with the direct fold everywhere in reach
        let t = sys.trace().unwrap();
        for n in 1..=(t.preperiod + 2 * t.cycle) {
            for x in 0..2 {
                assert_eq!(sys.omega_eval(n, x).unwrap(), sys.omega_eval_fold(n, x).unwrap());
            }
        }
    }

    #[test]
    fn phase_cycle_soundness() {
        let sys = swap_system();
        let t = sys.trace().unwrap();
        for n in t.preperiod..(t.preperiod + 3 * t.cycle) {
            assert_eq!(t.table(n), t.table(n + t.cycle));
        }
    }

    #[test]
    fn block_family_consistency() {
        // ω'_k of block_family(F, n) equals ω_{kn} of F as tables
        let fam = MapFamily::new(vec![vec![1, 0], vec![0, 1], vec![1, 0]]);
        let sys = System::new(discrete_space(2), fam.clone()).unwrap();
        for n in 1..=4 {
            let blocked = block_family(&fam, n).unwrap();
            let bsys = System::new(discrete_space(2), blocked).unwrap();
            for k in 1..=(3 * fam.period()) {
                for x in 0..2 {
                    assert_eq!(
                        bsys.omega_eval_fold(k, x).unwrap(),
                        sys.omega_eval_fold(k * n, x).unwrap(),
                        "n={n} k={k} x={x}"
                    );
                }
            }
        }
    }

    #[test]
    fn block_of_one_is_same_family() {
        let fam = MapFamily::new(vec![vec![1, 0], vec![0, 1]]);
        let b = block_family(&fam, 1).unwrap();
        assert_eq!(fam.maps, b.maps);
    }

    #[test]
    fn product_of_identity_is_identity() {
        let sys = System::new(discrete_space(2), MapFamily::identity(2)).unwrap();
        let prod = product_system(&sys, 2).unwrap();
        assert_eq!(prod.n_points(), 4);
        for x in 0..4 {
            assert_eq!(prod.omega_eval(5, x).unwrap(), x);
        }
    }

    #[test]
    fn swap_point_period_is_two() {
        let sys = swap_system();
        assert_eq!(point_period(&sys, 0).unwrap(), Some(2));
    }

    #[test]
    fn commutativity_verified() {
        assert!(MapFamily::new(vec![vec![1, 0], vec![0, 1]]).is_commutative());
        // on 3 points: a 3-cycle and a transposition do not commute
        assert!(!MapFamily::new(vec![vec![1, 2, 0], vec![1, 0, 2]]).is_commutative());
    }
}
