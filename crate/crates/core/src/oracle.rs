//! Brute-force ground truth on tiny spaces: exact event probabilities as
//! rationals, and families with their intersection profiles materialized.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::counting::{FamilyKind, FamilySpec, IntersectionProfile};
use crate::error::{invalid, Error, Result};
use crate::events::{is_general_position, EventKind};
use crate::geometry::{FlatTable, PointId, Space};
use crate::logspace::binomial;

/// Largest q^n for which all 2^{q^n} subsets are enumerated.
pub const MAX_ORACLE_POINTS: u32 = 20;
/// Largest family whose pairwise profile is computed.
pub const MAX_BRUTE_FAMILY: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactResult {
    pub value: BigRational,
    /// Number of configurations enumerated.
    pub instance_size: u64,
}

impl ExactResult {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }
}

fn check_size(space: &Space) -> Result<u32> {
    let n = space.num_points();
    if n > MAX_ORACLE_POINTS {
        return Err(Error::TooLarge(format!(
            "oracle enumerates 2^{n} subsets; at most 2^{MAX_ORACLE_POINTS} allowed"
        )));
    }
    Ok(n)
}

fn check_rational_theta(theta: &BigRational) -> Result<()> {
    if theta < &BigRational::zero() || theta > &BigRational::one() {
        return Err(Error::InvalidTheta(theta.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

fn powers(x: &BigRational, up_to: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(up_to + 1);
    let mut acc = BigRational::one();
    for _ in 0..=up_to {
        out.push(acc.clone());
        acc *= x;
    }
    out
}

/// Per-point lists of the flats through each point, and per-flat hit counts,
/// maintained while a Gray code walks every subset.
struct GrayWalk {
    through: Vec<Vec<u32>>,
    hits: Vec<u32>,
    per_flat: u32,
}

impl GrayWalk {
    fn new(table: &FlatTable, points: u32) -> Self {
        let mut through = vec![Vec::new(); points as usize];
        for (j, pts) in table.iter().enumerate() {
            for &p in pts {
                through[p as usize].push(j as u32);
            }
        }
        GrayWalk {
            through,
            hits: vec![0; table.len()],
            per_flat: table.points_per_flat() as u32,
        }
    }
}

/// For each size s, the number of s-subsets of the points on which `event` holds.
pub fn event_counts_by_size(event: &EventKind, space: &Space) -> Result<Vec<BigUint>> {
    event.validate(space.q() as u64, space.n() as u64)?;
    let npts = check_size(space)?;
    let m = event.m() as usize;
    if matches!(event, EventKind::Incidence { .. } | EventKind::UniformCollapse { .. }) {
        return Err(Error::Unsupported(format!(
            "{} is not a point-subset event; use its dedicated oracle",
            event.name()
        )));
    }
    let table = FlatTable::build(space, m)?;
    let mut walk = GrayWalk::new(&table, npts);
    let qm = walk.per_flat;
    // Threshold on per-flat hits that makes a flat "good" for the event.
    let need = match *event {
        EventKind::RichLine { ell } | EventKind::RichMFlat { ell, .. } | EventKind::RichMFlatGeneralPosition { ell, .. } => ell as u32,
        EventKind::ContainedMFlat { .. } => qm,
        EventKind::BlockingSet { .. } => qm,
        _ => unreachable!(),
    };
    let blocking = matches!(event, EventKind::BlockingSet { .. });
    let general = matches!(event, EventKind::RichMFlatGeneralPosition { m, .. } if *m >= 2);
    // For blocking sets the walk runs over complements: X blocks iff its
    // complement holds no full flat.
    let mut counts = vec![0u64; npts as usize + 1];
    let mut good = 0usize;
    let mut mask: u32 = 0;
    let holds = |mask: u32, good: usize, hits: &[u32]| -> bool {
        if blocking {
            return good == 0;
        }
        if good == 0 {
            return false;
        }
        if !general {
            return true;
        }
        table.iter().enumerate().any(|(j, pts)| {
            hits[j] >= need && {
                let inside: Vec<PointId> = pts.iter().filter(|&&p| mask >> p & 1 == 1).map(|&p| PointId(p)).collect();
                general_subset_exists(space, &inside, m, need as usize)
            }
        })
    };
    let size_of = |mask: u32| if blocking { npts - mask.count_ones() } else { mask.count_ones() };
    if holds(mask, good, &walk.hits) {
        counts[size_of(mask) as usize] += 1;
    }
    for i in 1u64..(1u64 << npts) {
        let bit = i.trailing_zeros();
        mask ^= 1 << bit;
        let added = mask >> bit & 1 == 1;
        for &j in &walk.through[bit as usize] {
            let h = &mut walk.hits[j as usize];
            if added {
                *h += 1;
                if *h == need {
                    good += 1;
                }
            } else {
                if *h == need {
                    good -= 1;
                }
                *h -= 1;
            }
        }
        if holds(mask, good, &walk.hits) {
            counts[size_of(mask) as usize] += 1;
        }
    }
    Ok(counts.into_iter().map(BigUint::from).collect())
}

fn general_subset_exists(space: &Space, cands: &[PointId], m: usize, ell: usize) -> bool {
    let mut found = false;
    let k = cands.len();
    if k < ell {
        return false;
    }
    let mut idx: Vec<usize> = (0..ell).collect();
    loop {
        let s: Vec<PointId> = idx.iter().map(|&i| cands[i]).collect();
        if is_general_position(space, &s, m).unwrap_or(false) {
            found = true;
            break;
        }
        let Some(i) = (0..ell).rev().find(|&i| idx[i] != i + k - ell) else {
            break;
        };
        idx[i] += 1;
        for j in i + 1..ell {
            idx[j] = idx[j - 1] + 1;
        }
    }
    found
}

/// Σ_s counts[s] θ^s (1-θ)^{N-s}.
pub fn probability_from_counts(counts: &[BigUint], theta: &BigRational) -> Result<BigRational> {
    check_rational_theta(theta)?;
    let n = counts.len() - 1;
    let up = powers(theta, n);
    let down = powers(&(BigRational::one() - theta), n);
    let mut total = BigRational::zero();
    for (s, c) in counts.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        total += BigRational::from_integer(BigInt::from(c.clone())) * &up[s] * &down[n - s];
    }
    Ok(total)
}

/// Exact Pr[event] for X of density θ; the uniform-collapse event ignores θ
/// and averages over all ℓ-subsets of F_q^m.
pub fn exact_event_probability(event: &EventKind, space: &Space, theta: &BigRational) -> Result<ExactResult> {
    check_rational_theta(theta)?;
    match *event {
        EventKind::Incidence { m } => exact_incidence_probability(space, m as usize, theta),
        EventKind::UniformCollapse { m, ell } => exact_collapse_probability(space, m as usize, ell),
        _ => {
            let counts = event_counts_by_size(event, space)?;
            Ok(ExactResult {
                value: probability_from_counts(&counts, theta)?,
                instance_size: 1u64 << space.num_points(),
            })
        }
    }
}

fn exact_collapse_probability(space: &Space, m: usize, ell: u64) -> Result<ExactResult> {
    EventKind::UniformCollapse { m: m as u64, ell }.validate(space.q() as u64, space.n() as u64)?;
    let sp = space.with_dimension(m)?;
    let n = sp.num_points() as u64;
    let total = binomial(n, ell);
    if total > BigUint::from(50_000_000u64) {
        return Err(Error::TooLarge(format!("C({n}, {ell}) subsets")));
    }
    let ell = ell as usize;
    let mut idx: Vec<usize> = (0..ell).collect();
    let mut hits = 0u64;
    let mut seen = 0u64;
    loop {
        let s: Vec<PointId> = idx.iter().map(|&i| PointId(i as u32)).collect();
        seen += 1;
        if !is_general_position(&sp, &s, m)? {
            hits += 1;
        }
        let Some(i) = (0..ell).rev().find(|&i| idx[i] != i + n as usize - ell) else {
            break;
        };
        idx[i] += 1;
        for j in i + 1..ell {
            idx[j] = idx[j - 1] + 1;
        }
    }
    Ok(ExactResult {
        value: BigRational::new(BigInt::from(hits), BigInt::from(seen)),
        instance_size: seen,
    })
}

/// Counts of point subsets by (size, number of m-flats they meet).
pub fn incidence_counts(space: &Space, m: usize) -> Result<HashMap<(u32, u32), u64>> {
    EventKind::Incidence { m: m as u64 }.validate(space.q() as u64, space.n() as u64)?;
    let npts = check_size(space)?;
    let table = FlatTable::build(space, m)?;
    let mut walk = GrayWalk::new(&table, npts);
    let mut met = 0u32;
    let mut mask = 0u32;
    let mut out: HashMap<(u32, u32), u64> = HashMap::new();
    *out.entry((0, 0)).or_default() += 1;
    for i in 1u64..(1u64 << npts) {
        let bit = i.trailing_zeros();
        mask ^= 1 << bit;
        let added = mask >> bit & 1 == 1;
        for &j in &walk.through[bit as usize] {
            let h = &mut walk.hits[j as usize];
            if added {
                met += (*h == 0) as u32;
                *h += 1;
            } else {
                *h -= 1;
                met -= (*h == 0) as u32;
            }
        }
        *out.entry((mask.count_ones(), met)).or_default() += 1;
    }
    Ok(out)
}

/// Exact Pr[some selected point lies on some selected m-flat] when points
/// and m-flats are each selected independently with probability θ.
pub fn exact_incidence_probability(space: &Space, m: usize, theta: &BigRational) -> Result<ExactResult> {
    check_rational_theta(theta)?;
    let counts = incidence_counts(space, m)?;
    let npts = space.num_points() as usize;
    let flats = FlatTable::build(space, m)?.len();
    let up = powers(theta, npts);
    let down = powers(&(BigRational::one() - theta), npts + flats);
    let mut none = BigRational::zero();
    for (&(s, met), &c) in &counts {
        let s = s as usize;
        none += BigRational::from_integer(BigInt::from(c)) * &up[s] * &down[npts - s] * &down[met as usize];
    }
    Ok(ExactResult {
        value: BigRational::one() - none,
        instance_size: 1u64 << npts,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteFamily {
    pub size: BigUint,
    pub profile: IntersectionProfile,
}

enum Members {
    Sets(Vec<Vec<u64>>),
    Pairs(Vec<(u32, u32)>),
}

fn bitset(universe: u32, pts: impl IntoIterator<Item = u32>) -> Vec<u64> {
    let mut w = vec![0u64; (universe as usize).div_ceil(64)];
    for p in pts {
        w[(p >> 6) as usize] |= 1 << (p & 63);
    }
    w
}

fn materialize(spec: &FamilySpec) -> Result<(Space, Members, u64)> {
    let space = Space::with_order(spec.q, spec.n as usize)?;
    let u = space.num_points();
    let m = spec.m() as usize;
    let table = FlatTable::build(&space, m)?;
    let too_big = |count: usize| {
        Error::TooLarge(format!("family of {count} elements exceeds {MAX_BRUTE_FAMILY}"))
    };
    match spec.kind {
        FamilyKind::RichLine { ell } | FamilyKind::RichMFlat { ell, .. } => {
            let ell = ell as usize;
            let per = table.points_per_flat();
            let per_flat = binomial(per as u64, ell as u64).to_usize().unwrap_or(usize::MAX);
            if per_flat.saturating_mul(table.len()) > 50 * MAX_BRUTE_FAMILY {
                return Err(too_big(per_flat.saturating_mul(table.len())));
            }
            let mut set: BTreeSet<Vec<u64>> = BTreeSet::new();
            for pts in table.iter() {
                let mut idx: Vec<usize> = (0..ell).collect();
                loop {
                    set.insert(bitset(u, idx.iter().map(|&i| pts[i])));
                    let Some(i) = (0..ell).rev().find(|&i| idx[i] != i + per - ell) else {
                        break;
                    };
                    idx[i] += 1;
                    for j in i + 1..ell {
                        idx[j] = idx[j - 1] + 1;
                    }
                }
                if set.len() > MAX_BRUTE_FAMILY {
                    return Err(too_big(set.len()));
                }
            }
            Ok((space, Members::Sets(set.into_iter().collect()), ell as u64))
        }
        FamilyKind::ContainedMFlat { .. } => {
            if table.len() > MAX_BRUTE_FAMILY {
                return Err(too_big(table.len()));
            }
            let per = table.points_per_flat() as u64;
            let sets = table.iter().map(|pts| bitset(u, pts.iter().copied())).collect();
            Ok((space, Members::Sets(sets), per))
        }
        FamilyKind::IncidencePairs { .. } => {
            let pairs: Vec<(u32, u32)> = table
                .iter()
                .enumerate()
                .flat_map(|(j, pts)| pts.iter().map(move |&p| (p, j as u32)))
                .collect();
            if pairs.len() > MAX_BRUTE_FAMILY {
                return Err(too_big(pairs.len()));
            }
            Ok((space, Members::Pairs(pairs), 2))
        }
    }
}

/// Every family element materialized, and all ordered pairs bucketed by intersection size.
/// Incidence pairs intersect in the number of agreeing components (point, flat).
pub fn brute_family(spec: &FamilySpec) -> Result<BruteFamily> {
    let (_space, members, ell) = materialize(spec)?;
    let mut buckets = vec![0u64; ell as usize + 1];
    let size = match &members {
        Members::Sets(sets) => {
            for a in sets {
                for b in sets {
                    let k: u32 = a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum();
                    buckets[k as usize] += 1;
                }
            }
            sets.len()
        }
        Members::Pairs(pairs) => {
            for a in pairs {
                for b in pairs {
                    buckets[(a.0 == b.0) as usize + (a.1 == b.1) as usize] += 1;
                }
            }
            pairs.len()
        }
    };
    let mut profile = IntersectionProfile::new(ell);
    for (k, &v) in buckets.iter().enumerate() {
        profile.set(k as u64, BigUint::from(v), true);
    }
    Ok(BruteFamily {
        size: BigUint::from(size),
        profile,
    })
}

/// Parses `a/b`, an integer, or a finite decimal such as `0.25` as an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || invalid(format!("cannot read '{s}' as a rational number"));
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.chars().any(|c| !c.is_ascii_digit()) || (int.is_empty() && frac.is_empty()) {
        return Err(bad());
    }
    let digits = format!("{}{frac}", if int.is_empty() { "0" } else { int });
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let den = BigInt::from(10u32).pow(frac.len() as u32);
    Ok(BigRational::new(num, den))
}

/// One pinned exact probability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixture {
    pub event: EventKind,
    pub q: u64,
    pub n: u64,
    pub theta: BigRational,
    pub probability: BigRational,
}

impl Fixture {
    pub fn compute(event: EventKind, q: u64, n: u64, theta: BigRational) -> Result<Self> {
        let space = Space::with_order(q, n as usize)?;
        let probability = exact_event_probability(&event, &space, &theta)?.value;
        Ok(Fixture {
            event,
            q,
            n,
            theta,
            probability,
        })
    }
}

pub const FIXTURE_HEADER: &str = "event,q,n,m,ell,theta_num,theta_den,prob_num,prob_den";

/// `event,q,n,m,ell,theta_num,theta_den,prob_num,prob_den`, with `-` for an unused ℓ.
pub fn format_fixture(f: &Fixture) -> String {
    let mut s = String::new();
    let ell = f.event.ell().map_or("-".to_string(), |l| l.to_string());
    write!(
        s,
        "{},{},{},{},{},{},{},{},{}",
        f.event.name(),
        f.q,
        f.n,
        f.event.m(),
        ell,
        f.theta.numer(),
        f.theta.denom(),
        f.probability.numer(),
        f.probability.denom()
    )
    .expect("write to string");
    s
}

/// Parses fixture lines; blank lines, `#` comments and the header are skipped.
pub fn parse_fixtures(text: &str) -> Result<Vec<Fixture>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line == FIXTURE_HEADER {
            continue;
        }
        let bad = |what: &str| invalid(format!("fixture line {}: {what}", lineno + 1));
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 9 {
            return Err(bad("expected 9 comma-separated fields"));
        }
        let int = |s: &str| s.parse::<u64>().map_err(|_| bad(&format!("bad integer '{s}'")));
        let big = |s: &str| s.parse::<BigInt>().map_err(|_| bad(&format!("bad integer '{s}'")));
        let ell = if f[4] == "-" { None } else { Some(int(f[4])?) };
        let m = int(f[3])?;
        let m_opt = if f[0] == "rich-line" { None } else { Some(m) };
        let event = EventKind::from_parts(f[0], m_opt, ell)?;
        let ratio = |a: &str, b: &str| -> Result<BigRational> {
            let d = big(b)?;
            if d.is_zero() {
                return Err(bad("zero denominator"));
            }
            Ok(BigRational::new(big(a)?, d))
        };
        out.push(Fixture {
            event,
            q: int(f[1])?,
            n: int(f[2])?,
            theta: ratio(f[5], f[6])?,
            probability: ratio(f[7], f[8])?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{family_size, intersection_profile};

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn contained_lines_of_f2_squared() {
        let space = Space::with_order(2, 2).unwrap();
        let e = EventKind::ContainedMFlat { m: 1 };
        let p = exact_event_probability(&e, &space, &r(1, 2)).unwrap();
        assert_eq!(p.value, r(11, 16));
        assert_eq!(p.instance_size, 16);
        assert_eq!(exact_event_probability(&e, &space, &r(0, 1)).unwrap().value, r(0, 1));
        assert_eq!(exact_event_probability(&e, &space, &r(1, 1)).unwrap().value, r(1, 1));
    }

    #[test]
    fn blocking_extremes() {
        let space = Space::with_order(2, 2).unwrap();
        let e = EventKind::BlockingSet { m: 1 };
        assert_eq!(exact_event_probability(&e, &space, &r(0, 1)).unwrap().value, r(0, 1));
        assert_eq!(exact_event_probability(&e, &space, &r(1, 1)).unwrap().value, r(1, 1));
        // X blocks every 2-point line of F_2^2 iff it misses at most one point.
        let counts = event_counts_by_size(&e, &space).unwrap();
        let c: Vec<u64> = counts.iter().map(|c| c.to_u64().unwrap()).collect();
        assert_eq!(c, vec![0, 0, 0, 4, 1]);
    }

    #[test]
    fn incidence_extremes_and_small_case() {
        let space = Space::with_order(2, 2).unwrap();
        assert_eq!(exact_incidence_probability(&space, 1, &r(1, 1)).unwrap().value, r(1, 1));
        assert_eq!(exact_incidence_probability(&space, 1, &r(0, 1)).unwrap().value, r(0, 1));
        // Independent cross-check: sum over subsets of the 4 points and 6 lines directly.
        let table = FlatTable::build(&space, 1).unwrap();
        let mut none = BigRational::zero();
        let half = r(1, 2);
        for xm in 0u32..16 {
            for ym in 0u32..64 {
                let hit = (0..6).any(|j| ym >> j & 1 == 1 && table.flat_points(j).iter().any(|&p| xm >> p & 1 == 1));
                if !hit {
                    none += half.clone().pow(10);
                }
            }
        }
        assert_eq!(exact_incidence_probability(&space, 1, &half).unwrap().value, BigRational::one() - none);
    }

    #[test]
    fn rich_line_probability_is_monotone() {
        let space = Space::with_order(3, 2).unwrap();
        let e = EventKind::RichLine { ell: 3 };
        let counts = event_counts_by_size(&e, &space).unwrap();
        let mut last = BigRational::zero();
        for i in 0..=8 {
            let p = probability_from_counts(&counts, &r(i, 8)).unwrap();
            assert!(p >= last);
            last = p;
        }
        assert_eq!(last, BigRational::one());
        // Subsets of size <= 2 hold no rich line; every 3-subset that is a line does.
        assert_eq!(counts[3], BigUint::from(12u32));
        assert!(counts[..3].iter().all(|c| c.is_zero()));
        assert_eq!(counts[7], BigUint::from(36u32));
    }

    #[test]
    fn brute_matches_closed_forms() {
        for (kind, q, n) in [
            (FamilyKind::RichLine { ell: 3 }, 3, 2),
            (FamilyKind::RichLine { ell: 3 }, 4, 2),
            (FamilyKind::ContainedMFlat { m: 1 }, 2, 3),
            (FamilyKind::IncidencePairs { m: 1 }, 3, 2),
        ] {
            let spec = FamilySpec::new(kind, q, n).unwrap();
            let brute = brute_family(&spec).unwrap();
            assert_eq!(brute.size, family_size(&spec).unwrap().size);
            assert_eq!(brute.profile.sparse(), intersection_profile(&spec).unwrap().sparse());
            assert_eq!(brute.profile.total(), &brute.size * &brute.size);
        }
    }

    #[test]
    fn rich_plane_family_dedup() {
        let spec = FamilySpec::new(FamilyKind::RichMFlat { m: 2, ell: 3 }, 2, 3).unwrap();
        let brute = brute_family(&spec).unwrap();
        // In F_2^3 every 3 points are affinely independent and span a plane.
        assert_eq!(brute.size, BigUint::from(56u32));
        let spec = FamilySpec::new(FamilyKind::RichMFlat { m: 2, ell: 3 }, 3, 3).unwrap();
        let brute = brute_family(&spec).unwrap();
        // 3-subsets of F_3^3 lying in a plane: all C(27,3) = 2925 of them.
        assert_eq!(brute.size, BigUint::from(2925u32));
    }

    #[test]
    fn collapse_exact_small() {
        let space = Space::with_order(3, 2).unwrap();
        let p = exact_event_probability(&EventKind::UniformCollapse { m: 2, ell: 4 }, &space, &r(1, 2)).unwrap();
        // 4-subsets of F_3^2 with no 3 collinear: 54 of C(9,4) = 126.
        assert_eq!(p.value, r(126 - 54, 126));
    }

    #[test]
    fn too_large_rejected() {
        let space = Space::with_order(5, 2).unwrap();
        assert!(matches!(
            exact_event_probability(&EventKind::RichLine { ell: 3 }, &space, &r(1, 2)),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/2").unwrap(), r(1, 2));
        assert_eq!(parse_rational("0.25").unwrap(), r(1, 4));
        assert_eq!(parse_rational("1").unwrap(), r(1, 1));
        assert_eq!(parse_rational(".5").unwrap(), r(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("0.5e3").is_err());
    }

    #[test]
    fn fixture_round_trip() {
        let f = Fixture::compute(EventKind::ContainedMFlat { m: 1 }, 2, 2, r(1, 2)).unwrap();
        let line = format_fixture(&f);
        assert_eq!(line, "contained,2,2,1,-,1,2,11,16");
        let text = format!("# pinned\n{FIXTURE_HEADER}\n{line}\n\nrich-line,3,2,1,3,1,2,5,7\n");
        let parsed = parse_fixtures(&text).unwrap();
        assert_eq!(parsed[0], f);
        assert_eq!(parsed[1].event, EventKind::RichLine { ell: 3 });
        assert!(parse_fixtures("contained,2,2,1,-,1,0,1,1").is_err());
        assert!(parse_fixtures("contained,2,2").is_err());
    }
}
