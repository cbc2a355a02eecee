//! Points and affine flats of F_q^n.
//!
//! A point is encoded as the integer whose i-th base-q digit is coordinate i.
//! A flat is kept in canonical form: its direction space as a reduced
//! row-echelon basis, and a translate whose coordinates vanish at every
//! pivot column. Two flats are equal iff they have the same point set.

use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::gf::{Field, FieldElement};

/// Default cap on the number of flats an enumeration may produce.
pub const DEFAULT_FLAT_BUDGET: u64 = 100_000_000;

/// Largest number of points a space may have.
pub const MAX_POINTS: u64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointId(pub u32);

impl PointId {
    #[inline]
    pub fn code(self) -> u32 {
        self.0
    }
}

/// The affine space F_q^n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Space {
    field: Arc<Field>,
    n: usize,
    num_points: u32,
}

impl Space {
    pub fn new(field: Arc<Field>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("dimension n must be at least 1"));
        }
        let num_points = (field.q() as u64)
            .checked_pow(n as u32)
            .filter(|&v| v <= MAX_POINTS)
            .ok_or_else(|| {
                Error::TooLarge(format!("q^n = {}^{} exceeds 2^31 points", field.q(), n))
            })?;
        // 2^31 itself would not fit the u32 bitset index arithmetic used below.
        if num_points == MAX_POINTS {
            return Err(Error::TooLarge("q^n = 2^31 points".into()));
        }
        Ok(Space {
            field,
            n,
            num_points: num_points as u32,
        })
    }

    pub fn with_order(q: u64, n: usize) -> Result<Self> {
        Space::new(Arc::new(Field::new(q)?), n)
    }

    #[inline]
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn field_arc(&self) -> Arc<Field> {
        Arc::clone(&self.field)
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.field.q()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn num_points(&self) -> u32 {
        self.num_points
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> {
        (0..self.num_points).map(PointId)
    }

    pub fn decode(&self, p: PointId) -> Vec<FieldElement> {
        let q = self.q();
        let mut code = p.0;
        (0..self.n)
            .map(|_| {
                let d = code % q;
                code /= q;
                FieldElement::from_raw(d)
            })
            .collect()
    }

    pub fn encode(&self, coords: &[FieldElement]) -> Result<PointId> {
        if coords.len() != self.n {
            return Err(invalid(format!(
                "expected {} coordinates, got {}",
                self.n,
                coords.len()
            )));
        }
        let q = self.q();
        let mut code = 0u32;
        for c in coords.iter().rev() {
            if c.value() >= q {
                return Err(invalid(format!("coordinate {} outside GF({q})", c.value())));
            }
            code = code * q + c.value();
        }
        Ok(PointId(code))
    }

    pub(crate) fn encode_unchecked(&self, coords: &[FieldElement]) -> PointId {
        let q = self.q();
        PointId(coords.iter().rev().fold(0, |acc, c| acc * q + c.value()))
    }

    pub fn point(&self, code: u32) -> Result<PointId> {
        if code < self.num_points {
            Ok(PointId(code))
        } else {
            Err(invalid(format!("point code {code} outside [0, {})", self.num_points)))
        }
    }

    /// The same field in dimension `n`.
    pub fn with_dimension(&self, n: usize) -> Result<Space> {
        Space::new(self.field_arc(), n)
    }
}

type Row = Vec<FieldElement>;

/// Row-reduces `rows` in place to reduced row-echelon form and drops zero rows.
/// Returns the pivot column of each remaining row.
pub(crate) fn rref(field: &Field, rows: &mut Vec<Row>) -> Vec<usize> {
    let width = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..width {
        let Some(found) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, found);
        let inv = field.inv(rows[rank][col]).expect("pivot is nonzero");
        for x in rows[rank].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col];
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                *x = field.sub(*x, field.mul(factor, y));
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    pivots
}

/// Dimension of the span of `rows`.
pub(crate) fn rank(field: &Field, rows: &[Row]) -> usize {
    let mut copy = rows.to_vec();
    rref(field, &mut copy).len()
}

/// Canonical affine m-flat.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flat {
    basis: Vec<Row>,
    pivots: Vec<usize>,
    translate: PointId,
}

impl Flat {
    /// Canonical flat `point + span(directions)`. `directions` may be dependent.
    pub fn from_point_and_directions(
        space: &Space,
        point: PointId,
        directions: Vec<Row>,
    ) -> Flat {
        let field = space.field();
        let mut basis = directions;
        let pivots = rref(field, &mut basis);
        let mut t = space.decode(point);
        for (row, &c) in basis.iter().zip(&pivots) {
            let coef = t[c];
            if coef.is_zero() {
                continue;
            }
            for (x, &y) in t.iter_mut().zip(row) {
                *x = field.sub(*x, field.mul(coef, y));
            }
        }
        Flat {
            basis,
            pivots,
            translate: space.encode_unchecked(&t),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Row] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn translate(&self) -> PointId {
        self.translate
    }

    /// Number of points, q^m.
    pub fn point_count(&self, space: &Space) -> u64 {
        (space.q() as u64).pow(self.dim() as u32)
    }

    /// All q^m points `translate + Σ c_i basis_i`, with coefficient vector c
    /// running in base-q counter order (c_0 fastest).
    pub fn points(&self, space: &Space) -> Vec<PointId> {
        let field = space.field();
        let q = space.q();
        let n = space.n();
        let mut coords: Vec<Row> = vec![space.decode(self.translate)];
        for row in &self.basis {
            let mut next = Vec::with_capacity(coords.len() * q as usize);
            for c in field.elements() {
                let scaled: Row = row.iter().map(|&y| field.mul(c, y)).collect();
                for base in &coords {
                    let mut v = Vec::with_capacity(n);
                    v.extend(base.iter().zip(&scaled).map(|(&a, &b)| field.add(a, b)));
                    next.push(v);
                }
            }
            coords = next;
        }
        coords.iter().map(|v| space.encode_unchecked(v)).collect()
    }

    /// True iff `p - translate` lies in the row space of the basis.
    pub fn contains(&self, space: &Space, p: PointId) -> bool {
        let field = space.field();
        let t = space.decode(self.translate);
        let mut v: Row = space
            .decode(p)
            .into_iter()
            .zip(t)
            .map(|(a, b)| field.sub(a, b))
            .collect();
        for (row, &c) in self.basis.iter().zip(&self.pivots) {
            let coef = v[c];
            if coef.is_zero() {
                continue;
            }
            for (x, &y) in v.iter_mut().zip(row) {
                *x = field.sub(*x, field.mul(coef, y));
            }
        }
        v.iter().all(|x| x.is_zero())
    }
}

pub fn flat_points(space: &Space, f: &Flat) -> Vec<PointId> {
    f.points(space)
}

pub fn flat_contains(space: &Space, f: &Flat, p: PointId) -> bool {
    f.contains(space, p)
}

/// Smallest flat containing every point of `points`.
pub fn affine_span(space: &Space, points: &[PointId]) -> Result<Flat> {
    let (&first, rest) = points.split_first().ok_or(Error::EmptyInput)?;
    let field = space.field();
    let origin = space.decode(first);
    let diffs: Vec<Row> = rest
        .iter()
        .map(|&p| {
            space
                .decode(p)
                .into_iter()
                .zip(&origin)
                .map(|(a, &b)| field.sub(a, b))
                .collect()
        })
        .collect();
    Ok(Flat::from_point_and_directions(space, first, diffs))
}

/// Affine dimension of the span of `points` (which must be nonempty).
pub(crate) fn span_dim(space: &Space, points: &[PointId]) -> usize {
    let field = space.field();
    let origin = space.decode(points[0]);
    let diffs: Vec<Row> = points[1..]
        .iter()
        .map(|&p| {
            space
                .decode(p)
                .into_iter()
                .zip(&origin)
                .map(|(a, &b)| field.sub(a, b))
                .collect()
        })
        .collect();
    rank(field, &diffs)
}

fn checked_pow(base: u64, exp: usize) -> Option<u64> {
    base.checked_pow(exp as u32)
}

/// One pivot pattern of m-dimensional subspaces of F_q^width in RREF.
#[derive(Debug, Clone)]
struct PivotBlock {
    pivots: Vec<usize>,
    /// (row, column) of each free entry; the first entry is the least significant digit.
    free: Vec<(usize, usize)>,
    start: u64,
}

/// Index-addressable enumeration of the m-dimensional linear subspaces of
/// F_q^width, ordered by pivot columns (lexicographic), then the free
/// entries as a base-q counter.
#[derive(Debug, Clone)]
struct SubspaceEnumerator {
    width: usize,
    m: usize,
    blocks: Vec<PivotBlock>,
    total: u64,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] != i + n - k) else {
            break;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
    out
}

impl SubspaceEnumerator {
    fn new(q: u64, width: usize, m: usize, cap: u64) -> Result<Self> {
        let mut blocks = Vec::new();
        let mut total: u64 = 0;
        for pivots in combinations(width, m) {
            let free: Vec<(usize, usize)> = pivots
                .iter()
                .enumerate()
                .flat_map(|(r, &pc)| {
                    let pivots = &pivots;
                    (pc + 1..width)
                        .filter(move |c| !pivots.contains(c))
                        .map(move |c| (r, c))
                })
                .collect();
            let count = checked_pow(q, free.len()).filter(|&c| c <= cap).ok_or_else(|| {
                Error::BudgetExceeded {
                    needed: format!("more than {cap}"),
                    cap,
                }
            })?;
            blocks.push(PivotBlock {
                pivots,
                free,
                start: total,
            });
            total = total
                .checked_add(count)
                .filter(|&t| t <= cap)
                .ok_or_else(|| Error::BudgetExceeded {
                    needed: format!("more than {cap}"),
                    cap,
                })?;
        }
        Ok(SubspaceEnumerator {
            width,
            m,
            blocks,
            total,
        })
    }

    fn rows_at(&self, field: &Field, idx: u64) -> Vec<Row> {
        let q = field.q() as u64;
        let b = match self.blocks.binary_search_by(|blk| blk.start.cmp(&idx)) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let block = &self.blocks[b];
        let mut rows = vec![vec![FieldElement::ZERO; self.width]; self.m];
        for (r, &pc) in block.pivots.iter().enumerate() {
            rows[r][pc] = FieldElement::ONE;
        }
        let mut local = idx - block.start;
        for &(r, c) in &block.free {
            rows[r][c] = FieldElement::from_raw((local % q) as u32);
            local /= q;
        }
        rows
    }
}

/// Deterministic, index-addressable stream of the m-flats of a space.
///
/// Order: pivot columns, then free basis entries, then the translate's
/// non-pivot coordinates (each counter with its first digit least significant).
#[derive(Debug, Clone)]
pub struct FlatEnumerator {
    space: Space,
    subspaces: SubspaceEnumerator,
    translates: u64,
    total: u64,
}

impl FlatEnumerator {
    pub fn new(space: &Space, m: usize, cap: u64) -> Result<Self> {
        let n = space.n();
        if m > n {
            return Err(invalid(format!("flat dimension m={m} exceeds n={n}")));
        }
        let q = space.q() as u64;
        let subspaces = SubspaceEnumerator::new(q, n, m, cap)?;
        let translates = q.pow((n - m) as u32);
        let total = subspaces
            .total
            .checked_mul(translates)
            .filter(|&t| t <= cap)
            .ok_or_else(|| Error::BudgetExceeded {
                needed: format!("{} x {}", subspaces.total, translates),
                cap,
            })?;
        Ok(FlatEnumerator {
            space: space.clone(),
            subspaces,
            translates,
            total,
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn m(&self) -> usize {
        self.subspaces.m
    }

    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// The flat at position `idx` of the stream.
    pub fn flat_at(&self, idx: u64) -> Flat {
        assert!(idx < self.total, "flat index {idx} out of range");
        let field = self.space.field();
        let q = field.q();
        let sub = idx / self.translates;
        let mut tr = idx % self.translates;
        let basis = self.subspaces.rows_at(field, sub);
        let pivots: Vec<usize> = basis
            .iter()
            .map(|r| r.iter().position(|x| !x.is_zero()).unwrap())
            .collect();
        let mut t = vec![FieldElement::ZERO; self.space.n()];
        for (c, slot) in t.iter_mut().enumerate() {
            if pivots.contains(&c) {
                continue;
            }
            *slot = FieldElement::from_raw((tr % q as u64) as u32);
            tr /= q as u64;
        }
        Flat {
            basis,
            pivots,
            translate: self.space.encode_unchecked(&t),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Flat> + '_ {
        self.range(0, self.total)
    }

    /// Flats with stream positions in `[start, end)`, for partitioned enumeration.
    pub fn range(&self, start: u64, end: u64) -> impl Iterator<Item = Flat> + '_ {
        (start..end.min(self.total)).map(move |i| self.flat_at(i))
    }
}

/// Every m-flat of `space`, each exactly once and in canonical form.
pub fn enumerate_flats(space: &Space, m: usize, cap: u64) -> Result<FlatEnumerator> {
    FlatEnumerator::new(space, m, cap)
}

/// Every m-flat containing `d_flat`.
pub fn flats_through(space: &Space, d_flat: &Flat, m: usize, cap: u64) -> Result<Vec<Flat>> {
    let n = space.n();
    let d = d_flat.dim();
    if m < d || m > n {
        return Err(invalid(format!("need d={d} <= m={m} <= n={n}")));
    }
    let field = space.field();
    let free_cols: Vec<usize> = (0..n).filter(|c| !d_flat.pivots.contains(c)).collect();
    let quotient = SubspaceEnumerator::new(field.q() as u64, n - d, m - d, cap)?;
    let mut out = Vec::with_capacity(quotient.total as usize);
    for idx in 0..quotient.total {
        let mut directions = d_flat.basis.clone();
        for w in quotient.rows_at(field, idx) {
            let mut row = vec![FieldElement::ZERO; n];
            for (&c, &x) in free_cols.iter().zip(&w) {
                row[c] = x;
            }
            directions.push(row);
        }
        out.push(Flat::from_point_and_directions(
            space,
            d_flat.translate,
            directions,
        ));
    }
    Ok(out)
}

/// A subset of the points of a space as a bitset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    words: Vec<u64>,
    len: u32,
    cardinality: u32,
}

impl PointSet {
    pub fn empty(universe: u32) -> Self {
        PointSet {
            words: vec![0; (universe as usize).div_ceil(64)],
            len: universe,
            cardinality: 0,
        }
    }

    pub fn full(universe: u32) -> Self {
        let mut s = PointSet::empty(universe);
        for w in s.words.iter_mut() {
            *w = u64::MAX;
        }
        s.clear_tail();
        s.cardinality = universe;
        s
    }

    pub fn from_points(universe: u32, points: impl IntoIterator<Item = PointId>) -> Self {
        let mut s = PointSet::empty(universe);
        for p in points {
            s.insert(p);
        }
        s
    }

    fn clear_tail(&mut self) {
        let extra = self.words.len() * 64 - self.len as usize;
        if extra > 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= u64::MAX >> extra;
            }
        }
    }

    /// Size of the universe (q^n).
    pub fn universe(&self) -> u32 {
        self.len
    }

    #[inline]
    pub fn len(&self) -> u32 {
        self.cardinality
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.cardinality == 0
    }

    #[inline]
    pub fn contains(&self, p: PointId) -> bool {
        self.contains_code(p.0)
    }

    #[inline]
    pub fn contains_code(&self, code: u32) -> bool {
        (self.words[(code >> 6) as usize] >> (code & 63)) & 1 == 1
    }

    pub fn insert(&mut self, p: PointId) -> bool {
        assert!(p.0 < self.len, "point outside universe");
        let (w, b) = ((p.0 >> 6) as usize, p.0 & 63);
        let fresh = (self.words[w] >> b) & 1 == 0;
        self.words[w] |= 1 << b;
        self.cardinality += fresh as u32;
        fresh
    }

    pub fn remove(&mut self, p: PointId) -> bool {
        let (w, b) = ((p.0 >> 6) as usize, p.0 & 63);
        let present = (self.words[w] >> b) & 1 == 1;
        self.words[w] &= !(1 << b);
        self.cardinality -= present as u32;
        present
    }

    pub fn complement(&self) -> PointSet {
        let mut s = PointSet {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
            cardinality: self.len - self.cardinality,
        };
        s.clear_tail();
        s
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = PointId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros();
                bits &= bits - 1;
                Some(PointId((i as u32) * 64 + b))
            })
        })
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

/// Point lists of every m-flat, materialized once in stream order.
#[derive(Debug, Clone)]
pub struct FlatTable {
    enumerator: FlatEnumerator,
    per_flat: usize,
    points: Vec<u32>,
}

/// Cap on the number of stored point codes in a [`FlatTable`].
pub const FLAT_TABLE_BUDGET: u64 = 64_000_000;

impl FlatTable {
    pub fn build(space: &Space, m: usize) -> Result<Self> {
        let enumerator = FlatEnumerator::new(space, m, DEFAULT_FLAT_BUDGET)?;
        let per_flat = (space.q() as u64).pow(m as u32);
        let entries = enumerator.len().saturating_mul(per_flat);
        if entries > FLAT_TABLE_BUDGET {
            return Err(Error::BudgetExceeded {
                needed: entries.to_string(),
                cap: FLAT_TABLE_BUDGET,
            });
        }
        let mut points = Vec::with_capacity(entries as usize);
        let q = space.q() as usize;
        let n = space.n();
        let field = space.field();
        let powers: Vec<u32> = (0..n).map(|i| (q as u32).pow(i as u32)).collect();
        let code_of = |v: &[FieldElement]| -> u32 {
            v.iter().zip(&powers).map(|(x, p)| x.value() * p).sum()
        };
        for flat in enumerator.iter() {
            let mut layer: Vec<Row> = vec![space.decode(flat.translate)];
            for row in &flat.basis {
                let mut next = Vec::with_capacity(layer.len() * q);
                for c in field.elements() {
                    for base in &layer {
                        next.push(
                            base.iter()
                                .zip(row)
                                .map(|(&a, &b)| field.add(a, field.mul(c, b)))
                                .collect(),
                        );
                    }
                }
                layer = next;
            }
            points.extend(layer.iter().map(|v| code_of(v)));
        }
        Ok(FlatTable {
            enumerator,
            per_flat: per_flat as usize,
            points,
        })
    }

    pub fn enumerator(&self) -> &FlatEnumerator {
        &self.enumerator
    }

    pub fn len(&self) -> usize {
        self.enumerator.len() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points_per_flat(&self) -> usize {
        self.per_flat
    }

    #[inline]
    pub fn flat_points(&self, idx: usize) -> &[u32] {
        &self.points[idx * self.per_flat..(idx + 1) * self.per_flat]
    }

    pub fn iter(&self) -> std::slice::Chunks<'_, u32> {
        self.points.chunks(self.per_flat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn sp(q: u64, n: usize) -> Space {
        Space::with_order(q, n).unwrap()
    }

    fn pt(space: &Space, coords: &[u32]) -> PointId {
        let c: Vec<FieldElement> = coords.iter().map(|&x| space.field().elem(x).unwrap()).collect();
        space.encode(&c).unwrap()
    }

    #[test]
    fn encode_decode_roundtrip() {
        let s = sp(5, 3);
        for p in s.points() {
            assert_eq!(s.encode(&s.decode(p)).unwrap(), p);
        }
        assert_eq!(pt(&s, &[1, 2, 3]).code(), 1 + 2 * 5 + 3 * 25);
    }

    #[test]
    fn dimension_and_size_limits() {
        assert!(Space::with_order(2, 0).is_err());
        assert!(matches!(Space::with_order(2, 31), Err(Error::TooLarge(_))));
        assert!(Space::with_order(2, 30).is_ok());
    }

    #[test]
    fn flat_counts_small() {
        assert_eq!(enumerate_flats(&sp(2, 3), 1, DEFAULT_FLAT_BUDGET).unwrap().len(), 28);
        assert_eq!(enumerate_flats(&sp(3, 2), 1, DEFAULT_FLAT_BUDGET).unwrap().len(), 12);
        assert_eq!(enumerate_flats(&sp(2, 4), 2, DEFAULT_FLAT_BUDGET).unwrap().len(), 140);
    }

    #[test]
    fn budget_is_enforced() {
        let err = enumerate_flats(&sp(2, 4), 2, 100).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
        assert!(enumerate_flats(&sp(2, 4), 5, 100).is_err());
    }

    #[test]
    fn planes_of_f2_4_by_independent_construction() {
        // Oracle: all {a + span(u, v)} for independent u, v, deduplicated by point set.
        let s = sp(2, 4);
        let mut sets = HashSet::new();
        for a in s.points() {
            for u in 1..16u32 {
                for v in 1..16u32 {
                    if u == v {
                        continue;
                    }
                    let w = u ^ v;
                    let mut pts = vec![a.0, a.0 ^ u, a.0 ^ v, a.0 ^ w];
                    pts.sort();
                    sets.insert(pts);
                }
            }
        }
        assert_eq!(sets.len(), 140);
        let en = enumerate_flats(&s, 2, DEFAULT_FLAT_BUDGET).unwrap();
        let ours: HashSet<Vec<u32>> = en
            .iter()
            .map(|fl| {
                let mut v: Vec<u32> = fl.points(&s).iter().map(|p| p.0).collect();
                v.sort();
                v
            })
            .collect();
        assert_eq!(ours, sets);
    }

    #[test]
    fn zero_flat_and_axis_line() {
        let s = sp(3, 2);
        let p = pt(&s, &[2, 1]);
        let zero = affine_span(&s, &[p]).unwrap();
        assert_eq!(zero.dim(), 0);
        assert_eq!(zero.points(&s), vec![p]);
        let line = affine_span(&s, &[pt(&s, &[0, 0]), pt(&s, &[1, 0])]).unwrap();
        let mut pts = line.points(&s);
        pts.sort();
        assert_eq!(pts, vec![pt(&s, &[0, 0]), pt(&s, &[1, 0]), pt(&s, &[2, 0])]);
        assert!(line.contains(&s, line.translate()));
        assert!(line.contains(&s, pt(&s, &[2, 0])));
        assert!(!line.contains(&s, pt(&s, &[0, 1])));
    }

    #[test]
    fn span_examples() {
        let s = sp(2, 2);
        let plane = affine_span(&s, &[pt(&s, &[0, 0]), pt(&s, &[1, 0]), pt(&s, &[0, 1])]).unwrap();
        assert_eq!(plane.dim(), 2);
        assert_eq!(affine_span(&s, &[]).unwrap_err(), Error::EmptyInput);
        let s3 = sp(3, 3);
        let line = affine_span(&s3, &[pt(&s3, &[1, 2, 0]), pt(&s3, &[0, 1, 1])]).unwrap();
        assert_eq!(line.dim(), 1);
    }

    #[test]
    fn canonical_rederivation() {
        for (q, n) in [(2u64, 2usize), (2, 3), (2, 4), (3, 2), (3, 3), (4, 2), (4, 3), (5, 2), (7, 2), (8, 2), (9, 2), (16, 2), (2, 8)] {
            let s = sp(q, n);
            for m in 0..=n {
                let Ok(en) = enumerate_flats(&s, m, 200_000) else { continue };
                let mut seen = HashSet::new();
                for f in en.iter() {
                    let pts = f.points(&s);
                    assert_eq!(pts.len() as u64, f.point_count(&s));
                    assert_eq!(pts.iter().collect::<HashSet<_>>().len(), pts.len());
                    assert_eq!(affine_span(&s, &pts).unwrap(), f, "q={q} n={n} m={m}");
                    for &b in f.pivots() {
                        assert!(s.decode(f.translate())[b].is_zero());
                    }
                    assert!(seen.insert(f));
                }
            }
        }
    }

    #[test]
    fn unique_line_through_two_points() {
        for (q, n) in [(3u64, 2usize), (2, 4), (4, 2), (3, 4), (9, 2)] {
            let s = sp(q, n);
            let lines: Vec<Flat> = enumerate_flats(&s, 1, DEFAULT_FLAT_BUDGET).unwrap().iter().collect();
            let mut through = vec![0u32; (s.num_points() as usize).pow(2)];
            for l in &lines {
                let pts = l.points(&s);
                for &a in &pts {
                    for &b in &pts {
                        if a != b {
                            through[a.0 as usize * s.num_points() as usize + b.0 as usize] += 1;
                        }
                    }
                }
            }
            for a in 0..s.num_points() {
                for b in 0..s.num_points() {
                    let c = through[(a * s.num_points() + b) as usize];
                    assert_eq!(c, (a != b) as u32);
                }
            }
        }
    }

    #[test]
    fn flats_through_counts() {
        let s = sp(2, 3);
        let p = affine_span(&s, &[PointId(5)]).unwrap();
        let lines = flats_through(&s, &p, 1, DEFAULT_FLAT_BUDGET).unwrap();
        assert_eq!(lines.len(), 7);
        assert!(lines.iter().all(|l| l.contains(&s, PointId(5)) && l.dim() == 1));

        let s3 = sp(3, 3);
        let line = affine_span(&s3, &[PointId(1), PointId(13)]).unwrap();
        let planes = flats_through(&s3, &line, 2, DEFAULT_FLAT_BUDGET).unwrap();
        assert_eq!(planes.len(), 4);
        assert_eq!(planes.iter().collect::<HashSet<_>>().len(), 4);

        // Oracle: filter the full plane enumeration by membership.
        let s4 = sp(2, 4);
        let origin = affine_span(&s4, &[PointId(6)]).unwrap();
        let through = flats_through(&s4, &origin, 2, DEFAULT_FLAT_BUDGET).unwrap();
        let filtered: HashSet<Flat> = enumerate_flats(&s4, 2, DEFAULT_FLAT_BUDGET)
            .unwrap()
            .iter()
            .filter(|f| f.contains(&s4, PointId(6)))
            .collect();
        assert_eq!(filtered.len(), 35);
        assert_eq!(through.into_iter().collect::<HashSet<_>>(), filtered);
    }

    #[test]
    fn point_set_ops() {
        let mut s = PointSet::empty(70);
        assert!(s.insert(PointId(3)));
        assert!(!s.insert(PointId(3)));
        s.insert(PointId(69));
        assert_eq!(s.len(), 2);
        let c = s.complement();
        assert_eq!(c.len(), 68);
        assert!(!c.contains(PointId(69)));
        assert_eq!(c.iter().count(), 68);
        assert!(s.remove(PointId(3)));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![PointId(69)]);
        assert_eq!(PointSet::full(70).len(), 70);
        assert_eq!(PointSet::full(70).complement().len(), 0);
    }

    #[test]
    fn flat_table_matches_flat_points() {
        let s = sp(4, 3);
        let table = FlatTable::build(&s, 2).unwrap();
        for (i, chunk) in table.iter().enumerate() {
            let f = table.enumerator().flat_at(i as u64);
            let pts: Vec<u32> = f.points(&s).iter().map(|p| p.0).collect();
            assert_eq!(chunk, &pts[..]);
        }
    }
}
