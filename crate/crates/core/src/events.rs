//! Random point-set models and exact detectors for the incidence events.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`), seeded with
//! `seed_from_u64(base_seed)` and switched to stream `stream_index`. Point p
//! takes the p-th 64-bit output of that stream; in the bipartite model flat j
//! takes output q^n + j. A 64-bit output x maps to the uniform
//! u = ((x >> 11) + 1) / 2^53 in (0, 1], and p is selected iff u <= θ, so a
//! fixed seed realizes X(θ) for every θ at once.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::geometry::{affine_span, span_dim, Flat, FlatEnumerator, FlatTable, PointId, PointSet, Space, DEFAULT_FLAT_BUDGET};
use crate::gf::{prime_power, FieldElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum EventKind {
    /// Some line holds at least ℓ points of X.
    RichLine { ell: u64 },
    /// Some m-flat holds at least ℓ points of X.
    RichMFlat { m: u64, ell: u64 },
    /// Some m-flat holds ℓ points of X of which no (m-1)-flat holds more than m.
    RichMFlatGeneralPosition { m: u64, ell: u64 },
    /// Some m-flat lies entirely inside X.
    ContainedMFlat { m: u64 },
    /// X meets every m-flat.
    BlockingSet { m: u64 },
    /// A selected point lies on a selected m-flat.
    Incidence { m: u64 },
    /// ℓ uniform points of F_q^m have m+1 points on a common (m-1)-flat.
    UniformCollapse { m: u64, ell: u64 },
}

impl EventKind {
    pub const NAMES: [&'static str; 7] = [
        "rich-line",
        "rich-flat",
        "rich-flat-gp",
        "contained",
        "blocking",
        "incidence",
        "uniform-collapse",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            EventKind::RichLine { .. } => "rich-line",
            EventKind::RichMFlat { .. } => "rich-flat",
            EventKind::RichMFlatGeneralPosition { .. } => "rich-flat-gp",
            EventKind::ContainedMFlat { .. } => "contained",
            EventKind::BlockingSet { .. } => "blocking",
            EventKind::Incidence { .. } => "incidence",
            EventKind::UniformCollapse { .. } => "uniform-collapse",
        }
    }

    /// Builds an event from its name; `m` and `ell` are required where the event uses them.
    pub fn from_parts(name: &str, m: Option<u64>, ell: Option<u64>) -> Result<Self> {
        let need_m = || m.ok_or_else(|| invalid(format!("event {name} needs m")));
        let need_ell = || ell.ok_or_else(|| invalid(format!("event {name} needs ell")));
        Ok(match name {
            "rich-line" => {
                if m.is_some_and(|m| m != 1) {
                    return Err(invalid("rich-line has m = 1"));
                }
                EventKind::RichLine { ell: need_ell()? }
            }
            "rich-flat" => EventKind::RichMFlat { m: need_m()?, ell: need_ell()? },
            "rich-flat-gp" => EventKind::RichMFlatGeneralPosition { m: need_m()?, ell: need_ell()? },
            "contained" => EventKind::ContainedMFlat { m: need_m()? },
            "blocking" => EventKind::BlockingSet { m: need_m()? },
            "incidence" => EventKind::Incidence { m: need_m()? },
            "uniform-collapse" => EventKind::UniformCollapse { m: need_m()?, ell: need_ell()? },
            other => {
                return Err(invalid(format!(
                    "unknown event '{other}' (expected one of {})",
                    EventKind::NAMES.join(", ")
                )))
            }
        })
    }

    pub fn m(&self) -> u64 {
        match *self {
            EventKind::RichLine { .. } => 1,
            EventKind::RichMFlat { m, .. }
            | EventKind::RichMFlatGeneralPosition { m, .. }
            | EventKind::ContainedMFlat { m }
            | EventKind::BlockingSet { m }
            | EventKind::Incidence { m }
            | EventKind::UniformCollapse { m, .. } => m,
        }
    }

    pub fn ell(&self) -> Option<u64> {
        match *self {
            EventKind::RichLine { ell }
            | EventKind::RichMFlat { ell, .. }
            | EventKind::RichMFlatGeneralPosition { ell, .. }
            | EventKind::UniformCollapse { ell, .. } => Some(ell),
            _ => None,
        }
    }

    pub fn is_monotone(&self) -> bool {
        !matches!(self, EventKind::UniformCollapse { .. })
    }

    /// Checks the parameter ranges against F_q^n.
    pub fn validate(&self, q: u64, n: u64) -> Result<()> {
        if prime_power(q).is_none() {
            return Err(Error::NotPrimePower(q));
        }
        let m = self.m();
        let collapse = matches!(self, EventKind::UniformCollapse { .. });
        if m < 1 || m > n || (m == n && !collapse) {
            return Err(invalid(format!("need 1 <= m < n (got m={m}, n={n})")));
        }
        let qm = q.checked_pow(m as u32).unwrap_or(u64::MAX);
        if let Some(ell) = self.ell() {
            let lo = if collapse { m + 2 } else { 1 };
            if ell < lo || ell > qm {
                return Err(invalid(format!(
                    "need {lo} <= ell <= q^m = {qm} (got ell={ell})"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Identifies one sample: `base_seed` fixes the experiment, `stream_index` the trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SampleSeed {
    pub base_seed: u64,
    pub stream_index: u64,
}

impl SampleSeed {
    pub fn new(base_seed: u64, stream_index: u64) -> Self {
        SampleSeed { base_seed, stream_index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.base_seed);
        rng.set_stream(self.stream_index);
        rng
    }

    /// The generator positioned at 64-bit output `offset`.
    pub fn rng_at(&self, offset: u64) -> ChaCha8Rng {
        let mut rng = self.rng();
        rng.set_word_pos(2 * offset as u128);
        rng
    }
}

#[inline]
pub fn unit_from_bits(x: u64) -> f64 {
    ((x >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn check_theta(theta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&theta) {
        Ok(())
    } else {
        Err(Error::InvalidTheta(theta))
    }
}

fn threshold_draws(rng: &mut ChaCha8Rng, count: u32, theta: f64, out: &mut PointSet) {
    for code in 0..count {
        if unit_from_bits(rng.next_u64()) <= theta {
            out.insert(PointId(code));
        }
    }
}

/// The per-point uniforms of a sample, in point order.
pub fn point_uniforms(space: &Space, seed: SampleSeed) -> Vec<f64> {
    let mut rng = seed.rng();
    (0..space.num_points()).map(|_| unit_from_bits(rng.next_u64())).collect()
}

/// Each point independently with probability θ, by the coupled construction.
pub fn sample_points(space: &Space, theta: f64, seed: SampleSeed) -> Result<PointSet> {
    check_theta(theta)?;
    let mut x = PointSet::empty(space.num_points());
    threshold_draws(&mut seed.rng(), space.num_points(), theta, &mut x);
    Ok(x)
}

/// Selected points and selected m-flats (by stream position) of the bipartite model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteSample {
    pub m: usize,
    pub points: PointSet,
    /// Bitset over flat stream positions.
    pub flats: PointSet,
}

impl BipartiteSample {
    pub fn selected_flats(&self) -> impl Iterator<Item = u64> + '_ {
        self.flats.iter().map(|p| p.0 as u64)
    }
}

fn flat_universe(space: &Space, m: usize) -> Result<FlatEnumerator> {
    let e = FlatEnumerator::new(space, m, DEFAULT_FLAT_BUDGET)?;
    if e.len() >= u32::MAX as u64 {
        return Err(Error::TooLarge(format!("{} flats", e.len())));
    }
    Ok(e)
}

pub fn sample_bipartite(space: &Space, m: usize, theta: f64, seed: SampleSeed) -> Result<BipartiteSample> {
    check_theta(theta)?;
    let flats = flat_universe(space, m)?;
    Ok(sample_bipartite_sized(space, m, flats.len() as u32, theta, seed))
}

fn sample_bipartite_sized(space: &Space, m: usize, num_flats: u32, theta: f64, seed: SampleSeed) -> BipartiteSample {
    let mut rng = seed.rng();
    let mut points = PointSet::empty(space.num_points());
    threshold_draws(&mut rng, space.num_points(), theta, &mut points);
    let mut flats = PointSet::empty(num_flats);
    threshold_draws(&mut rng, num_flats, theta, &mut flats);
    BipartiteSample { m, points, flats }
}

fn check_dims(space: &Space, m: usize) -> Result<()> {
    if m < 1 || m >= space.n() {
        return Err(invalid(format!("need 1 <= m < n (got m={m}, n={})", space.n())));
    }
    Ok(())
}

/// Index of the first flat in `table` holding at least `ell` points of `x`.
fn rich_in_table(table: &FlatTable, x: &PointSet, ell: usize) -> Option<usize> {
    let per = table.points_per_flat();
    table.iter().position(|pts| {
        let mut hits = 0;
        for (i, &p) in pts.iter().enumerate() {
            hits += x.contains_code(p) as usize;
            if hits >= ell {
                return true;
            }
            if hits + (per - i - 1) < ell {
                return false;
            }
        }
        false
    })
}

fn contained_in_table(table: &FlatTable, x: &PointSet) -> Option<usize> {
    table.iter().position(|pts| pts.iter().all(|&p| x.contains_code(p)))
}

/// Line richness by bucketing, for each a in X, the directions to the later points of X.
/// Returns the first point and direction of a line with at least `ell` points.
fn rich_line_by_pairs(space: &Space, x: &PointSet, ell: usize) -> Option<(PointId, Vec<FieldElement>)> {
    let field = space.field();
    let pts: Vec<Vec<FieldElement>> = x.iter().map(|p| space.decode(p)).collect();
    let codes: Vec<PointId> = x.iter().collect();
    let mut counts = vec![0u32; space.num_points() as usize];
    let mut touched = Vec::new();
    let mut dir = vec![FieldElement::ZERO; space.n()];
    for (i, a) in pts.iter().enumerate() {
        if pts.len() - i < ell {
            break;
        }
        for b in &pts[i + 1..] {
            for ((d, &u), &v) in dir.iter_mut().zip(b).zip(a) {
                *d = field.sub(u, v);
            }
            let lead = *dir.iter().find(|d| !d.is_zero()).expect("distinct points");
            let inv = field.inv(lead).expect("nonzero");
            for d in dir.iter_mut() {
                *d = field.mul(*d, inv);
            }
            let key = space.encode_unchecked(&dir).0 as usize;
            if counts[key] == 0 {
                touched.push(key);
            }
            counts[key] += 1;
            if counts[key] as usize + 1 >= ell {
                return Some((codes[i], dir));
            }
        }
        for &k in &touched {
            counts[k] = 0;
        }
        touched.clear();
    }
    None
}

/// Some m-flat through the given points (which span at most m dimensions).
fn extend_to_flat(space: &Space, points: &[PointId], m: usize) -> Flat {
    let field = space.field();
    let span = affine_span(space, points).expect("nonempty");
    let mut dirs = span.basis().to_vec();
    for c in 0..space.n() {
        if dirs.len() == m {
            break;
        }
        if span.pivots().contains(&c) {
            continue;
        }
        let mut e = vec![FieldElement::ZERO; space.n()];
        e[c] = FieldElement::ONE;
        let mut trial = dirs.clone();
        trial.push(e.clone());
        if crate::geometry::rank(field, &trial) == trial.len() {
            dirs.push(e);
        }
    }
    Flat::from_point_and_directions(space, points[0], dirs)
}

/// Cost estimates deciding between pair bucketing and a full line scan.
fn prefer_pairs(space: &Space, x: &PointSet, lines: Option<&FlatTable>) -> bool {
    match lines {
        None => true,
        Some(t) => {
            let k = x.len() as f64;
            k * k / 2.0 * space.n() as f64 <= (t.len() * t.points_per_flat()) as f64
        }
    }
}

/// An m-flat with at least ℓ points of X, if one exists.
pub fn detect_rich_flat(space: &Space, x: &PointSet, m: usize, ell: usize) -> Result<Option<Flat>> {
    check_dims(space, m)?;
    let qm = (space.q() as u64).pow(m as u32) as usize;
    if ell < 1 || ell > qm {
        return Err(invalid(format!("need 1 <= ell <= q^m = {qm} (got {ell})")));
    }
    let table = if ell <= m + 1 {
        None
    } else if m >= 2 || ell == qm {
        Some(FlatTable::build(space, m)?)
    } else {
        FlatTable::build(space, m).ok()
    };
    Ok(rich_flat_impl(space, x, m, ell, table.as_ref()))
}

fn rich_flat_impl(space: &Space, x: &PointSet, m: usize, ell: usize, table: Option<&FlatTable>) -> Option<Flat> {
    if (x.len() as usize) < ell {
        return None;
    }
    if ell <= m + 1 {
        // Any ℓ <= m+1 points lie in a common m-flat.
        let pts: Vec<PointId> = x.iter().take(ell).collect();
        return Some(extend_to_flat(space, &pts, m));
    }
    let qm = (space.q() as u64).pow(m as u32) as usize;
    if ell == qm {
        let t = table.expect("flat table");
        return contained_in_table(t, x).map(|i| t.enumerator().flat_at(i as u64));
    }
    if m == 1 && prefer_pairs(space, x, table) {
        return rich_line_by_pairs(space, x, ell)
            .map(|(a, d)| Flat::from_point_and_directions(space, a, vec![d]));
    }
    let t = table.expect("flat table");
    rich_in_table(t, x, ell).map(|i| t.enumerator().flat_at(i as u64))
}

/// An m-flat contained in X, if one exists.
pub fn detect_contained_flat(space: &Space, x: &PointSet, m: usize) -> Result<Option<Flat>> {
    check_dims(space, m)?;
    let table = FlatTable::build(space, m)?;
    Ok(contained_in_table(&table, x).map(|i| table.enumerator().flat_at(i as u64)))
}

/// True iff X meets every m-flat.
pub fn is_blocking(space: &Space, x: &PointSet, m: usize) -> Result<bool> {
    Ok(detect_contained_flat(space, &x.complement(), m)?.is_none())
}

/// True iff some selected flat holds some selected point.
pub fn detect_incidence(space: &Space, sample: &BipartiteSample) -> Result<bool> {
    check_dims(space, sample.m)?;
    let e = flat_universe(space, sample.m)?;
    if sample.flats.universe() as u64 != e.len() || sample.points.universe() != space.num_points() {
        return Err(invalid("bipartite sample does not match the space"));
    }
    Ok(sample
        .selected_flats()
        .any(|j| e.flat_at(j).points(space).iter().any(|&p| sample.points.contains(p))))
}

fn incidence_in_table(table: &FlatTable, sample: &BipartiteSample) -> bool {
    sample
        .selected_flats()
        .any(|j| table.flat_points(j as usize).iter().any(|&p| sample.points.contains_code(p)))
}

fn combinations(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if k > n {
        return false;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if f(&idx) {
            return true;
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return false;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// True iff no (m-1)-flat holds more than m of the points, i.e. every
/// (m+1)-subset spans an m-flat.
pub fn is_general_position(space: &Space, points: &[PointId], m: usize) -> Result<bool> {
    if m < 1 {
        return Err(invalid("m must be at least 1"));
    }
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DuplicatePoints);
    }
    let mut buf = Vec::with_capacity(m + 1);
    let bad = combinations(points.len(), m + 1, |idx| {
        buf.clear();
        buf.extend(idx.iter().map(|&i| points[i]));
        span_dim(space, &buf) < m
    });
    Ok(!bad)
}

/// Whether `cands` has an ℓ-subset in general position, by backtracking.
fn has_general_subset(space: &Space, cands: &[PointId], m: usize, ell: usize) -> bool {
    fn extend(space: &Space, cands: &[PointId], start: usize, m: usize, ell: usize, chosen: &mut Vec<PointId>) -> bool {
        if chosen.len() == ell {
            return true;
        }
        for i in start..cands.len() {
            if cands.len() - i < ell - chosen.len() {
                return false;
            }
            let p = cands[i];
            let mut buf = Vec::with_capacity(m + 1);
            let breaks = chosen.len() >= m
                && combinations(chosen.len(), m, |idx| {
                    buf.clear();
                    buf.extend(idx.iter().map(|&j| chosen[j]));
                    buf.push(p);
                    span_dim(space, &buf) < m
                });
            if breaks {
                continue;
            }
            chosen.push(p);
            if extend(space, cands, i + 1, m, ell, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    extend(space, cands, 0, m, ell, &mut Vec::with_capacity(ell))
}

fn rich_general_in_table(space: &Space, table: &FlatTable, x: &PointSet, m: usize, ell: usize) -> Option<usize> {
    let mut cands = Vec::new();
    (0..table.len()).find(|&i| {
        cands.clear();
        cands.extend(
            table
                .flat_points(i)
                .iter()
                .filter(|&&p| x.contains_code(p))
                .map(|&p| PointId(p)),
        );
        cands.len() >= ell && has_general_subset(space, &cands, m, ell)
    })
}

/// An m-flat holding ℓ points of X in general position, if one exists.
pub fn detect_rich_general_flat(space: &Space, x: &PointSet, m: usize, ell: usize) -> Result<Option<Flat>> {
    check_dims(space, m)?;
    if m == 1 {
        return detect_rich_flat(space, x, m, ell);
    }
    let table = FlatTable::build(space, m)?;
    Ok(rich_general_in_table(space, &table, x, m, ell).map(|i| table.enumerator().flat_at(i as u64)))
}

/// A uniformly random ℓ-subset of the points, by partial Fisher–Yates.
pub fn sample_uniform_lset(space: &Space, ell: u64, seed: SampleSeed) -> Result<Vec<PointId>> {
    let total = space.num_points() as u64;
    if ell > total {
        return Err(invalid(format!("ell={ell} exceeds q^n={total}")));
    }
    let mut rng = seed.rng();
    let mut swapped: HashMap<u64, u64> = HashMap::new();
    let mut out = Vec::with_capacity(ell as usize);
    for i in 0..ell {
        let j = rng.random_range(i..total);
        let vj = *swapped.get(&j).unwrap_or(&j);
        let vi = *swapped.get(&i).unwrap_or(&i);
        swapped.insert(j, vi);
        out.push(PointId(vj as u32));
    }
    Ok(out)
}

/// Evaluates one event on samples of a fixed space, caching the flat table.
#[derive(Debug, Clone)]
pub struct TrialRunner {
    event: EventKind,
    space: Space,
    table: Option<Arc<FlatTable>>,
    /// F_q^m for the uniform-collapse event.
    intrinsic: Option<Space>,
}

impl TrialRunner {
    pub fn new(event: EventKind, space: &Space) -> Result<Self> {
        event.validate(space.q() as u64, space.n() as u64)?;
        let m = event.m() as usize;
        let qm = (space.q() as u64).pow(m as u32);
        let table = match event {
            EventKind::RichLine { ell } | EventKind::RichMFlat { ell, .. } | EventKind::RichMFlatGeneralPosition { ell, .. } => {
                if ell <= m as u64 + 1 {
                    None
                } else if m == 1 && ell < qm {
                    FlatTable::build(space, m).ok()
                } else {
                    Some(FlatTable::build(space, m)?)
                }
            }
            EventKind::ContainedMFlat { .. } | EventKind::BlockingSet { .. } | EventKind::Incidence { .. } => {
                Some(FlatTable::build(space, m)?)
            }
            EventKind::UniformCollapse { .. } => None,
        };
        let intrinsic = match event {
            EventKind::UniformCollapse { m, .. } => Some(space.with_dimension(m as usize)?),
            _ => None,
        };
        Ok(TrialRunner {
            event,
            space: space.clone(),
            table: table.map(Arc::new),
            intrinsic,
        })
    }

    pub fn event(&self) -> EventKind {
        self.event
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    /// The event indicator on the sample determined by `seed` at density θ.
    pub fn run(&self, theta: f64, seed: SampleSeed) -> Result<bool> {
        check_theta(theta)?;
        let m = self.event.m() as usize;
        let table = self.table.as_deref();
        Ok(match self.event {
            EventKind::RichLine { ell } | EventKind::RichMFlat { ell, .. } => {
                let x = sample_points(&self.space, theta, seed)?;
                rich_flat_impl(&self.space, &x, m, ell as usize, table).is_some()
            }
            EventKind::RichMFlatGeneralPosition { ell, .. } => {
                let x = sample_points(&self.space, theta, seed)?;
                if m == 1 {
                    rich_flat_impl(&self.space, &x, m, ell as usize, table).is_some()
                } else if (x.len() as u64) < ell {
                    false
                } else {
                    rich_general_in_table(&self.space, table.expect("table"), &x, m, ell as usize).is_some()
                }
            }
            EventKind::ContainedMFlat { .. } => {
                let x = sample_points(&self.space, theta, seed)?;
                contained_in_table(table.expect("table"), &x).is_some()
            }
            EventKind::BlockingSet { .. } => {
                let x = sample_points(&self.space, theta, seed)?;
                contained_in_table(table.expect("table"), &x.complement()).is_none()
            }
            EventKind::Incidence { .. } => {
                let t = table.expect("table");
                let s = sample_bipartite_sized(&self.space, m, t.len() as u32, theta, seed);
                incidence_in_table(t, &s)
            }
            EventKind::UniformCollapse { ell, .. } => {
                let sp = self.intrinsic.as_ref().expect("intrinsic space");
                let s = sample_uniform_lset(sp, ell, seed)?;
                !is_general_position(sp, &s, m)?
            }
        })
    }

    /// Indicators at several densities on one coupled sample.
    pub fn run_coupled(&self, thetas: &[f64], seed: SampleSeed) -> Result<Vec<bool>> {
        thetas.iter().map(|&t| self.run(t, seed)).collect()
    }
}

pub fn run_trial(event: EventKind, space: &Space, theta: f64, seed: SampleSeed) -> Result<bool> {
    TrialRunner::new(event, space)?.run(theta, seed)
}
