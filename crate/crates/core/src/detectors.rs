//! Certified decision procedures for the dynamical-property hierarchy.
//!
//! On a finite space with a periodic family every property here is
//! decidable: the composition trace lists all distinct `ω_n` tables, and
//! cofinal quantifiers ("for all sufficiently large n") reduce to the
//! cyclic part of the trace. Verdicts are three-valued; `exact = true`
//! means the verdict is a proof for the finite periodic system, while a
//! user-capped horizon that exhausts before the trace does yields
//! `Inconclusive`, never a guess.
//!
//! Quantifiers over "open sets" range over the declared finite open base;
//! for the properties implemented here the standard reductions to basic
//! sets apply.
//!
//! Equicontinuity on a finite space needs one convention: with δ allowed
//! below the minimum positive realized distance every finite system is
//! vacuously equicontinuous. The detectors therefore require δ to be
//! non-vacuous (some pair with `0 < d < δ` exists) and let ε range over
//! realized values above the resolution scale. Concretely, uniform
//! equicontinuity holds iff every pair at the minimum positive distance
//! keeps all its orbit distances below the next realized value.

use serde::Serialize;
use serde_json::{json, Value};

use num_traits::Zero;

use crate::error::Error;
use crate::family::{block_family, point_period, product_system, System};
use crate::pointset::PointSet;
use crate::rat::{format_rat, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Status::Holds => "Holds",
            Status::Fails => "Fails",
            Status::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

/// Three-valued detector outcome with a replayable witness.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub property: String,
    pub status: Status,
    /// True when the eventual-periodicity argument makes the verdict a
    /// proof for the finite periodic-family system.
    pub exact: bool,
    /// The n-range examined.
    pub horizon: u64,
    pub witness: Value,
}

impl Verdict {
    fn new(property: &str, status: Status, exact: bool, horizon: usize, witness: Value) -> Self {
        Verdict {
            property: property.to_string(),
            status,
            exact,
            horizon: horizon as u64,
            witness,
        }
    }

    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }
}

fn open_names(system: &System) -> Vec<&str> {
    system
        .space
        .open_base
        .iter()
        .map(|o| o.name.as_str())
        .collect()
}

/// Minimal non-autonomous period of every point, `None` if aperiodic.
pub fn periodic_points(system: &System) -> Result<Vec<Option<usize>>, Error> {
    (0..system.n_points())
        .map(|x| point_period(system, x))
        .collect()
}

/// Dense periodicity: every basic open set contains a point `x` with some
/// `n ≥ 1` such that `ω_{nk}(x) = x` for all `k`. Decided exactly via
/// cycle arithmetic on each point's orbit.
pub fn check_dense_periodic(system: &System) -> Result<Verdict, Error> {
    let periods = periodic_points(system)?;
    let names = open_names(system);
    let mut witnesses = Vec::new();
    for (oi, open) in system.space.open_base.iter().enumerate() {
        // lexicographically smallest (n, x)
        let best = open
            .set
            .iter()
            .filter_map(|x| periods[x].map(|n| (n, x)))
            .min();
        match best {
            Some((n, x)) => witnesses.push(json!({
                "open": names[oi],
                "point": system.space.labels[x],
                "period": n,
            })),
            None => {
                return Ok(Verdict::new(
                    "dense_periodic",
                    Status::Fails,
                    true,
                    0,
                    json!({ "open_without_periodic_point": names[oi] }),
                ));
            }
        }
    }
    Ok(Verdict::new(
        "dense_periodic",
        Status::Holds,
        true,
        0,
        json!({ "per_open": witnesses }),
    ))
}

/// Per-open witness periods of a `Holds` dense-periodicity verdict.
pub fn dense_periodic_witness_periods(verdict: &Verdict) -> Vec<u64> {
    verdict.witness["per_open"]
        .as_array()
        .map(|a| {
            a.iter()
                .filter_map(|w| w["period"].as_u64())
                .collect::<Vec<_>>()
        })
        .unwrap_or_default()
}

/// Transitivity: for every ordered pair `(U, V)` of basic opens there is
/// `n ≥ 1` with `ω_n(U) ∩ V ≠ ∅`.
pub fn check_transitive(system: &System, horizon: usize) -> Result<Verdict, Error> {
    let trace = system.trace()?;
    let exact_h = trace.exact_horizon();
    let bound = horizon.min(exact_h);
    let opens = &system.space.open_base;
    let names = open_names(system);
    let k = opens.len();

    let mut found: Vec<Option<usize>> = vec![None; k * k];
    let mut remaining = k * k;
    for n in 1..=bound {
        if remaining == 0 {
            break;
        }
        let images: Vec<PointSet> = opens
            .iter()
            .map(|o| system.image_set(n, &o.set))
            .collect::<Result<_, _>>()?;
        for u in 0..k {
            for v in 0..k {
                if found[u * k + v].is_none() && images[u].intersects(&opens[v].set) {
                    found[u * k + v] = Some(n);
                    remaining -= 1;
                }
            }
        }
    }

    if remaining == 0 {
        let per_pair: Vec<Value> = (0..k)
            .flat_map(|u| (0..k).map(move |v| (u, v)))
            .map(|(u, v)| json!({ "u": names[u], "v": names[v], "n": found[u * k + v] }))
            .collect();
        return Ok(Verdict::new(
            "transitive",
            Status::Holds,
            true,
            bound,
            json!({ "per_pair": per_pair }),
        ));
    }
    if bound >= exact_h {
        // report the first failing pair with its full reachable set
        let (u, v) = (0..k)
            .flat_map(|u| (0..k).map(move |v| (u, v)))
            .find(|&(u, v)| found[u * k + v].is_none())
            .unwrap();
        let mut reachable = PointSet::empty(system.n_points());
        for n in 1..=bound {
            reachable.union_with(&system.image_set(n, &opens[u].set)?);
        }
        let reach_labels: Vec<&str> = reachable
            .iter()
            .map(|x| system.space.labels[x].as_str())
            .collect();
        return Ok(Verdict::new(
            "transitive",
            Status::Fails,
            true,
            bound,
            json!({ "u": names[u], "v": names[v], "reachable_from_u": reach_labels }),
        ));
    }
    Ok(Verdict::new(
        "transitive",
        Status::Inconclusive,
        false,
        bound,
        json!({ "unresolved_pairs": remaining }),
    ))
}

/// Total transitivity up to `max_n`: transitivity of every block family
/// 𝔽_n, n ≤ max_n.
pub fn check_total_transitive(
    system: &System,
    max_n: usize,
    horizon: usize,
) -> Result<Verdict, Error> {
    let mut examined = 0usize;
    for n in 1..=max_n {
        let blocked = block_family(&system.family, n)?;
        let bsys = System::with_budget((*system.space).clone(), blocked, system.budget)?;
        let inner = check_transitive(&bsys, horizon)?;
        examined = examined.max(inner.horizon as usize);
        match inner.status {
            Status::Holds => {}
            Status::Fails => {
                return Ok(Verdict::new(
                    "total_transitive",
                    Status::Fails,
                    inner.exact,
                    examined,
                    json!({ "failing_n": n, "inner": inner.witness }),
                ));
            }
            Status::Inconclusive => {
                return Ok(Verdict::new(
                    "total_transitive",
                    Status::Inconclusive,
                    false,
                    examined,
                    json!({ "undecided_n": n }),
                ));
            }
        }
    }
    Ok(Verdict::new(
        "total_transitive",
        Status::Holds,
        true,
        examined,
        json!({ "checked_n": max_n }),
    ))
}

/// Weak mixing of order k: one common time works for all k pairs of
/// opens simultaneously; decided as transitivity of the k-fold product
/// system. Order 1 coincides with transitivity.
pub fn check_weak_mixing_order(
    system: &System,
    k: usize,
    horizon: usize,
) -> Result<Verdict, Error> {
    if k == 0 {
        return Err(Error::input("weak mixing order must be ≥ 1"));
    }
    let inner = if k == 1 {
        check_transitive(system, horizon)?
    } else {
        let prod = product_system(system, k)?;
        check_transitive(&prod, horizon)?
    };
    Ok(Verdict::new(
        &format!("weak_mixing_order_{k}"),
        inner.status,
        inner.exact,
        inner.horizon as usize,
        inner.witness,
    ))
}

/// Topological mixing: every pair `(U, V)` interacts for all sufficiently
/// large n. Exact when the horizon covers the trace: the cofinal
/// condition is checked on the cyclic part. With a shorter horizon a
/// clean tail `[K, horizon]` yields a bounded (non-exact) `Holds`.
pub fn check_topological_mixing(system: &System, horizon: usize) -> Result<Verdict, Error> {
    let trace = system.trace()?;
    let exact_h = trace.exact_horizon();
    let opens = &system.space.open_base;
    let names = open_names(system);
    let k = opens.len();
    let exact = horizon >= exact_h;
    let bound = horizon.min(exact_h);

    // last n ≤ bound at which each ordered pair fails to interact
    let mut last_fail: Vec<Option<usize>> = vec![None; k * k];
    let mut cyclic_fail: Option<(usize, usize, usize)> = None;
    for n in 1..=bound {
        let images: Vec<PointSet> = opens
            .iter()
            .map(|o| system.image_set(n, &o.set))
            .collect::<Result<_, _>>()?;
        for u in 0..k {
            for v in 0..k {
                if !images[u].intersects(&opens[v].set) {
                    last_fail[u * k + v] = Some(n);
                    if exact && trace.cyclic_range().contains(&n) && cyclic_fail.is_none() {
                        cyclic_fail = Some((u, v, n));
                    }
                }
            }
        }
    }

    if exact {
        if let Some((u, v, n)) = cyclic_fail {
            return Ok(Verdict::new(
                "topological_mixing",
                Status::Fails,
                true,
                bound,
                json!({ "u": names[u], "v": names[v], "recurring_miss_at_n": n }),
            ));
        }
        let max_k = last_fail.iter().flatten().max().map(|n| n + 1).unwrap_or(1);
        return Ok(Verdict::new(
            "topological_mixing",
            Status::Holds,
            true,
            bound,
            json!({ "max_k": max_k }),
        ));
    }

    // bounded: each pair needs a clean tail within the horizon
    if last_fail.iter().all(|lf| lf.map_or(true, |n| n < bound)) {
        let max_k = last_fail.iter().flatten().max().map(|n| n + 1).unwrap_or(1);
        Ok(Verdict::new(
            "topological_mixing",
            Status::Holds,
            false,
            bound,
            json!({ "max_k": max_k, "note": "bounded horizon, not a proof" }),
        ))
    } else {
        Ok(Verdict::new(
            "topological_mixing",
            Status::Inconclusive,
            false,
            bound,
            json!({ "pairs_failing_at_horizon": last_fail.iter().filter(|lf| **lf == Some(bound)).count() }),
        ))
    }
}

/// First pair of `set` at distance > δ, if any.
fn diam_exceeds(system: &System, set: &PointSet, delta: &Rat) -> Option<(usize, usize, Rat)> {
    let pts = set.to_vec();
    for (i, &a) in pts.iter().enumerate() {
        for &b in &pts[i + 1..] {
            let d = system.space.dist(a, b);
            if &d > delta {
                return Some((a, b, d));
            }
        }
    }
    None
}

/// Sensitivity: every basic open's image diameter exceeds δ at some time.
pub fn check_sensitive(system: &System, delta: &Rat, horizon: usize) -> Result<Verdict, Error> {
    if delta <= &Rat::zero() {
        return Err(Error::input("delta must be positive"));
    }
    let trace = system.trace()?;
    let exact_h = trace.exact_horizon();
    let bound = horizon.min(exact_h);
    let names = open_names(system);

    let mut per_open = Vec::new();
    for (oi, open) in system.space.open_base.iter().enumerate() {
        let mut hit = None;
        for n in 1..=bound {
            let img = system.image_set(n, &open.set)?;
            if let Some((a, b, d)) = diam_exceeds(system, &img, delta) {
                hit = Some(json!({
                    "open": names[oi],
                    "n": n,
                    "pair": [system.space.labels[a], system.space.labels[b]],
                    "distance": format_rat(&d),
                }));
                break;
            }
        }
        match hit {
            Some(w) => per_open.push(w),
            None if bound >= exact_h => {
                return Ok(Verdict::new(
                    "sensitive",
                    Status::Fails,
                    true,
                    bound,
                    json!({ "open_never_exceeding_delta": names[oi], "delta": format_rat(delta) }),
                ));
            }
            None => {
                return Ok(Verdict::new(
                    "sensitive",
                    Status::Inconclusive,
                    false,
                    bound,
                    json!({ "undecided_open": names[oi] }),
                ));
            }
        }
    }
    Ok(Verdict::new(
        "sensitive",
        Status::Holds,
        true,
        bound,
        json!({ "delta": format_rat(delta), "per_open": per_open }),
    ))
}

/// Cofinite (strong) sensitivity: per basic open U there is K_U with
/// `diam(ω_n(U)) > δ` for all `n ≥ K_U`. Decidable only with full trace
/// coverage; a shorter horizon is honest `Inconclusive`.
pub fn check_cofinitely_sensitive(
    system: &System,
    delta: &Rat,
    horizon: usize,
) -> Result<Verdict, Error> {
    if delta <= &Rat::zero() {
        return Err(Error::input("delta must be positive"));
    }
    let trace = system.trace()?;
    let exact_h = trace.exact_horizon();
    if horizon < exact_h {
        return Ok(Verdict::new(
            "cofinitely_sensitive",
            Status::Inconclusive,
            false,
            horizon,
            json!({ "needed_horizon": exact_h }),
        ));
    }
    let names = open_names(system);
    let mut max_k = 1usize;
    for (oi, open) in system.space.open_base.iter().enumerate() {
        // the cyclic part decides the cofinal condition
        for n in trace.cyclic_range() {
            let img = system.image_set(n, &open.set)?;
            if diam_exceeds(system, &img, delta).is_none() {
                return Ok(Verdict::new(
                    "cofinitely_sensitive",
                    Status::Fails,
                    true,
                    exact_h,
                    json!({ "open": names[oi], "recurring_small_diameter_at_n": n, "delta": format_rat(delta) }),
                ));
            }
        }
        // minimal K_U: one past the last failing pre-periodic time
        let mut k_u = 1usize;
        for n in 1..trace.preperiod {
            let img = system.image_set(n, &open.set)?;
            if diam_exceeds(system, &img, delta).is_none() {
                k_u = n + 1;
            }
        }
        max_k = max_k.max(k_u);
    }
    Ok(Verdict::new(
        "cofinitely_sensitive",
        Status::Holds,
        true,
        exact_h,
        json!({ "max_k": max_k, "delta": format_rat(delta) }),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquiMode {
    Pointwise,
    Uniform,
}

/// Max orbit distance of a pair over all distinct `ω_n` tables.
fn max_orbit_distance(system: &System, x: usize, y: usize) -> Result<Rat, Error> {
    let trace = system.trace()?;
    let mut best = Rat::zero();
    for n in 1..=trace.exact_horizon() {
        let t = trace.table(n);
        let d = system.space.dist(t[x], t[y]);
        if d > best {
            best = d;
        }
    }
    Ok(best)
}

/// Equicontinuity at resolution scale (see module docs for the finite
/// convention).
pub fn check_equicontinuous(system: &System, mode: EquiMode) -> Result<Verdict, Error> {
    let name = match mode {
        EquiMode::Uniform => "uniformly_equicontinuous",
        EquiMode::Pointwise => "equicontinuous",
    };
    let n = system.n_points();
    let values = system.space.realized_values();
    let positives: Vec<Rat> = values.iter().cloned().filter(|v| *v > Rat::zero()).collect();
    let horizon = system.trace()?.exact_horizon();
    if positives.len() < 2 {
        // no ε above the resolution scale: nothing to violate
        return Ok(Verdict::new(
            name,
            Status::Holds,
            true,
            horizon,
            json!({ "note": "no realized value above resolution scale" }),
        ));
    }

    match mode {
        EquiMode::Uniform => {
            let dmin = &positives[0];
            let eps = &positives[1];
            for x in 0..n {
                for y in (x + 1)..n {
                    if &system.space.dist(x, y) == dmin {
                        let m = max_orbit_distance(system, x, y)?;
                        if &m >= eps {
                            return Ok(Verdict::new(
                                name,
                                Status::Fails,
                                true,
                                horizon,
                                json!({
                                    "epsilon": format_rat(eps),
                                    "pair": [system.space.labels[x], system.space.labels[y]],
                                    "pair_distance": format_rat(dmin),
                                    "max_orbit_distance": format_rat(&m),
                                }),
                            ));
                        }
                    }
                }
            }
            Ok(Verdict::new(
                name,
                Status::Holds,
                true,
                horizon,
                json!({ "delta_for_every_epsilon": format_rat(eps) }),
            ))
        }
        EquiMode::Pointwise => {
            for x in 0..n {
                let r_x = (0..n)
                    .filter(|&y| y != x)
                    .map(|y| system.space.dist(x, y))
                    .min();
                let Some(r_x) = r_x else { continue };
                let Some(eps) = positives.iter().find(|v| **v > r_x) else {
                    continue;
                };
                for y in 0..n {
                    if y != x && system.space.dist(x, y) == r_x {
                        let m = max_orbit_distance(system, x, y)?;
                        if &m >= eps {
                            return Ok(Verdict::new(
                                name,
                                Status::Fails,
                                true,
                                horizon,
                                json!({
                                    "point": system.space.labels[x],
                                    "epsilon": format_rat(eps),
                                    "partner": system.space.labels[y],
                                    "max_orbit_distance": format_rat(&m),
                                }),
                            ));
                        }
                    }
                }
            }
            Ok(Verdict::new(name, Status::Holds, true, horizon, json!({})))
        }
    }
}

/// Exact limsup/liminf of `n ↦ d(ω_n x, ω_n y)`: max/min over the cyclic
/// part of the trace.
pub fn orbit_limsup_liminf(system: &System, x: usize, y: usize) -> Result<(Rat, Rat), Error> {
    let trace = system.trace()?;
    let mut hi: Option<Rat> = None;
    let mut lo: Option<Rat> = None;
    for n in trace.cyclic_range() {
        let t = trace.table(n);
        let d = system.space.dist(t[x], t[y]);
        hi = Some(hi.map_or(d, |h| h.max(d)));
        lo = Some(lo.map_or(d, |l| l.min(d)));
    }
    Ok((hi.unwrap(), lo.unwrap()))
}

#[derive(Clone, Debug, Serialize)]
pub struct ScrambledPair {
    pub x: usize,
    pub y: usize,
    pub limsup: String,
    pub liminf: String,
}

/// All δ-scrambled pairs (`limsup > δ`, `liminf = 0`) plus the Li-Yorke
/// sensitivity verdict: ∀x, ∀ basic neighborhood U of x, some y ∈ U is
/// scrambled with x.
///
/// On a finite deterministic system `liminf = 0` forces the orbits to
/// meet in the cyclic part and therefore stay together, so the list is
/// provably empty; the computation is kept honest rather than special-
/// cased.
pub fn find_scrambled_pairs(
    system: &System,
    delta: &Rat,
    horizon: usize,
    window: usize,
) -> Result<(Vec<ScrambledPair>, Verdict), Error> {
    if delta <= &Rat::zero() {
        return Err(Error::input("delta must be positive"));
    }
    let n = system.n_points();
    let mut pairs = Vec::new();
    let mut scrambled = vec![false; n * n];
    for x in 0..n {
        for y in (x + 1)..n {
            let (hi, lo) = orbit_limsup_liminf(system, x, y)?;
            if &hi > delta && lo == Rat::zero() {
                scrambled[x * n + y] = true;
                scrambled[y * n + x] = true;
                pairs.push(ScrambledPair {
                    x,
                    y,
                    limsup: format_rat(&hi),
                    liminf: format_rat(&lo),
                });
            }
        }
    }

    let mut verdict_witness = json!({ "pairs_found": pairs.len(), "window": window });
    let mut status = Status::Holds;
    'outer: for x in 0..n {
        for open in &system.space.open_base {
            if open.set.contains(x) && !open.set.iter().any(|y| y != x && scrambled[x * n + y]) {
                status = Status::Fails;
                verdict_witness = json!({
                    "point": system.space.labels[x],
                    "neighborhood": open.name,
                    "pairs_found": pairs.len(),
                });
                break 'outer;
            }
        }
    }
    let verdict = Verdict::new(
        "li_yorke_sensitive",
        status,
        true,
        horizon.min(system.trace()?.exact_horizon()),
        verdict_witness,
    );
    Ok((pairs, verdict))
}

/// δ-expansivity: every distinct pair separates beyond δ at some time
/// `k ≥ 0` (time 0 counts: `ω_0` is the identity, so pairs already
/// separated at distance > δ need no iteration).
pub fn check_expansive(system: &System, delta: &Rat) -> Result<Verdict, Error> {
    if delta <= &Rat::zero() {
        return Err(Error::input("delta must be positive"));
    }
    let trace = system.trace()?;
    let exact_h = trace.exact_horizon();
    let n = system.n_points();
    let mut max_time = 0usize;
    for x in 0..n {
        for y in (x + 1)..n {
            let mut sep = None;
            for k in 0..=exact_h {
                let d = if k == 0 {
                    system.space.dist(x, y)
                } else {
                    let t = trace.table(k);
                    system.space.dist(t[x], t[y])
                };
                if &d > delta {
                    sep = Some(k);
                    break;
                }
            }
            match sep {
                Some(k) => max_time = max_time.max(k),
                None => {
                    return Ok(Verdict::new(
                        "expansive",
                        Status::Fails,
                        true,
                        exact_h,
                        json!({
                            "pair": [system.space.labels[x], system.space.labels[y]],
                            "delta": format_rat(delta),
                        }),
                    ));
                }
            }
        }
    }
    Ok(Verdict::new(
        "expansive",
        Status::Holds,
        true,
        exact_h,
        json!({ "max_separation_time": max_time, "delta": format_rat(delta) }),
    ))
}

/// Chaotic dependence on initial conditions: ∀x and basic neighborhood U,
/// some y ∈ U has `limsup > 0` and `liminf = 0` against x. Like the
/// scrambled-pair search this is provably `Fails` on finite deterministic
/// systems; computed honestly.
pub fn check_chaotic_dependence(system: &System, horizon: usize) -> Result<Verdict, Error> {
    let n = system.n_points();
    let exact_h = system.trace()?.exact_horizon();
    for x in 0..n {
        for open in &system.space.open_base {
            if !open.set.contains(x) {
                continue;
            }
            let mut found = false;
            for y in open.set.iter() {
                if y == x {
                    continue;
                }
                let (hi, lo) = orbit_limsup_liminf(system, x, y)?;
                if hi > Rat::zero() && lo == Rat::zero() {
                    found = true;
                    break;
                }
            }
            if !found {
                return Ok(Verdict::new(
                    "chaotic_dependence",
                    Status::Fails,
                    true,
                    horizon.min(exact_h),
                    json!({ "point": system.space.labels[x], "neighborhood": open.name }),
                ));
            }
        }
    }
    Ok(Verdict::new(
        "chaotic_dependence",
        Status::Holds,
        true,
        horizon.min(exact_h),
        json!({}),
    ))
}
