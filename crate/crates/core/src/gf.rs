//! Arithmetic in the finite field F_q for prime powers q ≤ 65536.
//!
//! Elements are stored as integers in `[0, q)`. For q = p^e with e > 1 the
//! base-p digits of the integer are the coefficients of a polynomial over
//! F_p (digit i is the coefficient of x^i), reduced modulo the monic
//! irreducible polynomial of degree e whose coefficient vector, read as a
//! base-p integer, is smallest. Multiplication goes through exp/log tables
//! built from a generator of the multiplicative group.

use std::fmt;

use crate::error::{Error, Result};

pub const MAX_ORDER: u64 = 65536;

/// Largest order for which an explicit addition table is kept.
const ADD_TABLE_MAX: u32 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub(crate) fn from_raw(v: u32) -> Self {
        FieldElement(v)
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A fully tabulated finite field. Immutable once built.
#[derive(Clone)]
pub struct Field {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    exp_table: Vec<u32>,
    log_table: Vec<u32>,
    add_table: Vec<u16>,
    neg_table: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.modulus == other.modulus
    }
}

impl Eq for Field {}

/// Splits `q` into `(p, e)` with `q = p^e`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            break;
        }
        p += 1;
    }
    if p * p > q {
        return Some((q, 1));
    }
    let mut rest = q;
    let mut e = 0;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Polynomials over F_p as little-endian coefficient vectors without trailing zeros.

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (p as i64, a as i64);
    while new_r != 0 {
        let quot = r / new_r;
        (t, new_t) = (new_t, t - quot * new_t);
        (r, new_r) = (new_r, r - quot * new_r);
    }
    debug_assert_eq!(r, 1);
    t.rem_euclid(p as i64) as u32
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let j = i + shift;
                r[j] = ((r[j] as u64 + (p - lead) as u64 * c as u64) % p as u64) as u32;
            }
        }
        r.pop();
    }
    trim(r)
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let e = f.len() - 1;
    for d in 1..=e / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut g = digits(low, p as u64, d);
            g.push(1);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn digits(mut v: u64, base: u64, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((v % base) as u32);
        v /= base;
    }
    out
}

impl Field {
    /// Builds GF(q). Fails for non prime powers and for q above 65536.
    pub fn new(q: u64) -> Result<Self> {
        if q > MAX_ORDER {
            return Err(Error::TooLarge(format!("field order {q} exceeds {MAX_ORDER}")));
        }
        let (p, e) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        let (p, q) = (p as u32, q as u32);
        let mut field = Field {
            p,
            e,
            q,
            modulus: Vec::new(),
            exp_table: Vec::new(),
            log_table: Vec::new(),
            add_table: Vec::new(),
            neg_table: Vec::new(),
        };
        if e > 1 {
            field.modulus = Self::first_irreducible(p, e as usize);
            field.build_log_tables();
            if q <= ADD_TABLE_MAX {
                let mut t = vec![0u16; (q * q) as usize];
                for a in 0..q {
                    for b in 0..q {
                        t[(a * q + b) as usize] = field.add_digits(a, b) as u16;
                    }
                }
                field.add_table = t;
            }
        }
        field.neg_table = (0..q).map(|a| field.neg_digits(a)).collect();
        Ok(field)
    }

    fn first_irreducible(p: u32, e: usize) -> Vec<u32> {
        let count = (p as u64).pow(e as u32);
        for low in 0..count {
            let mut f = digits(low, p as u64, e);
            f.push(1);
            if is_irreducible(&f, p) {
                return f;
            }
        }
        unreachable!("an irreducible polynomial of every degree exists over F_p")
    }

    fn build_log_tables(&mut self) {
        let order = (self.q - 1) as u64;
        let factors = distinct_prime_factors(order);
        let generator = (2..self.q)
            .chain(std::iter::once(1))
            .find(|&g| {
                factors
                    .iter()
                    .all(|&r| self.pow_by_reduction(g, order / r) != 1)
            })
            .expect("multiplicative group of a finite field is cyclic");
        let n = order as usize;
        let mut exp_table = vec![0u32; 2 * n];
        let mut log_table = vec![0u32; self.q as usize];
        let mut x = 1u32;
        for i in 0..n {
            exp_table[i] = x;
            exp_table[i + n] = x;
            log_table[x as usize] = i as u32;
            x = self.mul_by_reduction(FieldElement(x), FieldElement(generator)).0;
        }
        debug_assert_eq!(x, 1);
        self.exp_table = exp_table;
        self.log_table = log_table;
    }

    fn pow_by_reduction(&self, g: u32, mut k: u64) -> u32 {
        let mut base = FieldElement(g);
        let mut acc = FieldElement::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul_by_reduction(acc, base);
            }
            base = self.mul_by_reduction(base, base);
            k >>= 1;
        }
        acc.0
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn e(&self) -> u32 {
        self.e
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Coefficients of the reduction polynomial, lowest degree first. Empty for prime fields.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Generator powers g^0, g^1, ... repeated twice (length 2(q-1)); empty for prime fields.
    pub fn exp_table(&self) -> &[u32] {
        &self.exp_table
    }

    pub fn log_table(&self) -> &[u32] {
        &self.log_table
    }

    pub fn elem(&self, value: u32) -> Result<FieldElement> {
        if value < self.q {
            Ok(FieldElement(value))
        } else {
            Err(Error::InvalidParams(format!(
                "{value} is not an element of GF({})",
                self.q
            )))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    fn add_digits(&self, mut a: u32, mut b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut out, mut place) = (0, 1);
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    fn neg_digits(&self, mut a: u32) -> u32 {
        let (mut out, mut place) = (0, 1);
        while a > 0 {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.e == 1 {
            let s = a.0 + b.0;
            FieldElement(if s >= self.q { s - self.q } else { s })
        } else if !self.add_table.is_empty() {
            FieldElement(self.add_table[(a.0 * self.q + b.0) as usize] as u32)
        } else {
            FieldElement(self.add_digits(a.0, b.0))
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.neg_table[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        if self.e == 1 {
            return FieldElement(((a.0 as u64 * b.0 as u64) % self.q as u64) as u32);
        }
        let i = self.log_table[a.0 as usize] + self.log_table[b.0 as usize];
        FieldElement(self.exp_table[i as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        if self.e == 1 {
            return Ok(FieldElement(inv_mod(a.0, self.p)));
        }
        let n = self.q - 1;
        let l = self.log_table[a.0 as usize];
        Ok(FieldElement(self.exp_table[((n - l) % n) as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, mut k: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// Schoolbook polynomial product reduced by the modulus, without tables.
    pub fn mul_by_reduction(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.e == 1 {
            return FieldElement(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32);
        }
        let e = self.e as usize;
        let (da, db) = (digits(a.0 as u64, self.p as u64, e), digits(b.0 as u64, self.p as u64, e));
        let mut prod = vec![0u32; 2 * e - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % self.p as u64) as u32;
            }
        }
        let r = poly_rem(&trim(prod), &self.modulus, self.p);
        FieldElement(r.iter().rev().fold(0, |acc, &c| acc * self.p + c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_has_no_modulus() {
        let f = Field::new(7).unwrap();
        assert_eq!((f.p(), f.e(), f.q()), (7, 1, 7));
        assert!(f.modulus().is_empty());
        assert!(f.exp_table().is_empty());
    }

    #[test]
    fn gf4_modulus_is_x2_x_1() {
        // Monic degree-2 polynomials over F_2 in base-2 order: x^2, x^2+1, x^2+x, x^2+x+1.
        // Only the last has no root in F_2.
        let f = Field::new(4).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
    }

    #[test]
    fn rejects_bad_orders() {
        assert_eq!(Field::new(6).unwrap_err(), Error::NotPrimePower(6));
        assert_eq!(Field::new(1).unwrap_err(), Error::NotPrimePower(1));
        assert_eq!(Field::new(0).unwrap_err(), Error::NotPrimePower(0));
        assert!(matches!(Field::new(65537 * 2), Err(Error::TooLarge(_))));
        assert!(matches!(Field::new(131072), Err(Error::TooLarge(_))));
        assert!(Field::new(65536).is_ok());
    }

    #[test]
    fn small_examples() {
        let g2 = Field::new(2).unwrap();
        let g4 = Field::new(4).unwrap();
        let g5 = Field::new(5).unwrap();
        let g7 = Field::new(7).unwrap();
        let el = FieldElement;
        assert_eq!(g2.add(el(1), el(1)), el(0));
        assert_eq!(g5.add(el(3), el(4)), el(2));
        assert_eq!(g4.add(el(2), el(3)), el(1));
        assert_eq!(g7.mul(el(3), el(4)), el(5));
        assert_eq!(g7.inv(el(3)).unwrap(), el(5));
        assert_eq!(g4.mul(el(2), el(2)), el(3));
        assert_eq!(g2.inv(el(1)).unwrap(), el(1));
        assert_eq!(g7.inv(el(0)), Err(Error::DivisionByZero));
        assert_eq!(g4.inv(el(0)), Err(Error::DivisionByZero));
    }

    #[test]
    fn sub_and_neg() {
        for q in [5u64, 9, 25, 27] {
            let f = Field::new(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
                for b in f.elements() {
                    assert_eq!(f.add(f.sub(a, b), b), a);
                }
            }
        }
    }

    #[test]
    fn fermat_little_exhaustive() {
        for q in (2..=64).filter(|&q| prime_power(q).is_some()) {
            let f = Field::new(q).unwrap();
            for a in f.elements().skip(1) {
                assert_eq!(f.pow(a, q - 1), FieldElement::ONE, "q={q} a={a}");
                assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
            }
        }
    }

    #[test]
    fn multiplicative_group_closed() {
        for q in [8u64, 16, 49] {
            let f = Field::new(q).unwrap();
            for a in f.elements().skip(1) {
                for b in f.elements().skip(1) {
                    assert!(!f.mul(a, b).is_zero());
                }
            }
        }
    }

    #[test]
    fn log_tables_are_inverse_bijections() {
        for q in [4u64, 8, 9, 27, 128, 243, 1024] {
            let f = Field::new(q).unwrap();
            let n = (q - 1) as usize;
            let mut seen = vec![false; q as usize];
            for i in 0..n {
                let x = f.exp_table()[i];
                assert!(x != 0 && !seen[x as usize]);
                seen[x as usize] = true;
                assert_eq!(f.log_table()[x as usize] as usize, i);
            }
        }
    }

    #[test]
    fn distributive_exhaustive_small() {
        for q in (2..=16).filter(|&q| prime_power(q).is_some()) {
            let f = Field::new(q).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    for c in f.elements() {
                        assert_eq!(
                            f.mul(a, f.add(b, c)),
                            f.add(f.mul(a, b), f.mul(a, c))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn table_mul_matches_reduction() {
        for q in [4u64, 8, 9, 16, 25, 27] {
            let f = Field::new(q).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), f.mul_by_reduction(a, b), "q={q}");
                }
            }
        }
    }

    #[test]
    fn modulus_is_irreducible_and_first() {
        for q in [8u64, 9, 16, 25, 27, 32, 49, 64, 81, 125, 128] {
            let f = Field::new(q).unwrap();
            let (p, e) = (f.p(), f.e() as usize);
            assert!(is_irreducible(f.modulus(), p));
            let value: u64 = f.modulus()[..e]
                .iter()
                .rev()
                .fold(0, |acc, &c| acc * p as u64 + c as u64);
            for smaller in 0..value {
                let mut g = digits(smaller, p as u64, e);
                g.push(1);
                assert!(!is_irreducible(&g, p));
            }
        }
    }

    #[test]
    fn large_field_builds() {
        let f = Field::new(65536).unwrap();
        assert_eq!(f.e(), 16);
        let a = f.elem(12345).unwrap();
        assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
        assert!(f.elem(65536).is_err());
    }
}
