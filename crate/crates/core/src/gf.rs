//! Arithmetic in GF(q), q = p^n.
//!
//! Elements are encoded as integers in `[0, q)` whose base-p digits are the
//! coefficients of the polynomial-basis representation (constant term is the
//! least significant digit). Multiplication and inversion go through
//! log/antilog tables built once per field.

use std::fmt;

use crate::error::{Error, Result};

/// Largest field order accepted by [`FieldSpec::new`].
pub const DEFAULT_ORDER_LIMIT: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn value(self) -> u16 {
        self.0
    }

    #[inline]
    pub(crate) fn from_index(i: usize) -> FieldElement {
        debug_assert!(i <= u16::MAX as usize);
        FieldElement(i as u16)
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

/// A finite field GF(p^n) together with its precomputed tables.
#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    n: u32,
    q: u32,
    /// Monic modulus, coefficients from x^0 up to x^n.
    modulus: Vec<u32>,
    /// exp[i] = g^i for i in [0, 2(q-1)), so log sums never need a reduction.
    exp: Vec<u16>,
    /// log[a] for a != 0; log[0] is unused.
    log: Vec<u32>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("n", &self.n)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` into `(p, n)` with `q = p^n`, if `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        // q itself is prime
        p = q;
    }
    let mut rest = q;
    let mut n = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        n += 1;
    }
    (rest == 1).then_some((p as u32, n))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
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

/// Remainder of `a` modulo the monic polynomial `m` over GF(p). Coefficients low to high.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p - lead) * c) % p;
            }
        }
        r.pop();
    }
    r
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    out
}

fn digits(mut v: u64, p: u32, len: usize) -> Vec<u32> {
    let mut d = Vec::with_capacity(len);
    for _ in 0..len {
        d.push((v % p as u64) as u32);
        v /= p as u64;
    }
    d
}

fn undigits(d: &[u32], p: u32) -> u64 {
    d.iter().rev().fold(0u64, |acc, &c| acc * p as u64 + c as u64)
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let n = f.len() - 1;
    for deg in 1..=n / 2 {
        let count = (p as u64).pow(deg as u32);
        for low in 0..count {
            let mut g = digits(low, p, deg);
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Lexicographically least monic irreducible of degree `n` over GF(p),
/// comparing the non-leading coefficients as a base-p number (x^0 least significant).
fn least_irreducible(p: u32, n: u32) -> Vec<u32> {
    if n == 1 {
        return vec![0, 1];
    }
    let count = (p as u64).pow(n);
    for low in 0..count {
        let mut f = digits(low, p, n as usize);
        f.push(1);
        if f[0] != 0 && is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldSpec {
    pub fn new(p: u32, n: u32) -> Result<Self> {
        Self::with_limit(p, n, DEFAULT_ORDER_LIMIT)
    }

    pub fn with_limit(p: u32, n: u32, limit: u64) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::ZeroDegree);
        }
        let q = (p as u64)
            .checked_pow(n)
            .filter(|&q| q <= limit && q <= DEFAULT_ORDER_LIMIT)
            .ok_or(Error::FieldTooLarge { p, n, limit })?;
        let modulus = least_irreducible(p, n);
        let mut field = FieldSpec {
            p,
            n,
            q: q as u32,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
        };
        field.build_tables();
        Ok(field)
    }

    /// GF(q) for a prime power `q`.
    pub fn from_order(q: u64) -> Result<Self> {
        let (p, n) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Self::new(p, n)
    }

    fn poly_mul_mod(&self, a: u64, b: u64) -> u64 {
        let len = self.n as usize;
        let prod = poly_mul(&digits(a, self.p, len), &digits(b, self.p, len), self.p);
        let r = if self.n == 1 {
            // modulus x is nominal for prime fields; reduce the constant term mod p
            vec![prod[0]]
        } else {
            poly_rem(&prod, &self.modulus, self.p)
        };
        undigits(&r, self.p)
    }

    fn poly_pow(&self, base: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.poly_mul_mod(acc, b);
            }
            b = self.poly_mul_mod(b, b);
            e >>= 1;
        }
        acc
    }

    fn build_tables(&mut self) {
        let q = self.q as u64;
        let group = q - 1;
        let factors = prime_factors(group);
        let generator = (1..q)
            .find(|&g| factors.iter().all(|&r| self.poly_pow(g, group / r) != 1))
            .expect("multiplicative group is cyclic");
        let mut exp = vec![0u16; 2 * group as usize];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u64;
        for i in 0..group {
            exp[i as usize] = x as u16;
            exp[(i + group) as usize] = x as u16;
            log[x as usize] = i as u32;
            x = self.poly_mul_mod(x, generator);
        }
        self.exp = exp;
        self.log = log;
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn element(&self, value: u32) -> Option<FieldElement> {
        (value < self.q).then_some(FieldElement(value as u16))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(|v| FieldElement(v as u16))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.q).map(|v| FieldElement(v as u16))
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        if self.n == 1 {
            return FieldElement(((a.0 as u32 + b.0 as u32) % self.p) as u16);
        }
        let (mut x, mut y) = (a.0 as u32, b.0 as u32);
        let (mut out, mut place) = (0u32, 1u32);
        while x > 0 || y > 0 {
            out += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        FieldElement(out as u16)
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.p == 2 {
            return a;
        }
        let mut x = a.0 as u32;
        let (mut out, mut place) = (0u32, 1u32);
        while x > 0 {
            out += ((self.p - x % self.p) % self.p) * place;
            x /= self.p;
            place *= self.p;
        }
        FieldElement(out as u16)
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
        FieldElement(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        let group = self.q - 1;
        let l = self.log[a.0 as usize];
        Ok(FieldElement(self.exp[((group - l) % group) as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        let group = (self.q - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        FieldElement(self.exp[((l * (e % group)) % group) as usize])
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, a: FieldElement) -> Result<u64> {
        if a.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        let mut x = a;
        let mut order = 1;
        while x != FieldElement::ONE {
            x = self.mul(x, a);
            order += 1;
        }
        Ok(order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: u16) -> FieldElement {
        FieldElement(v)
    }

    #[test]
    fn gf2_modulus_is_x() {
        let f = FieldSpec::new(2, 1).unwrap();
        assert_eq!(f.order(), 2);
        assert_eq!(f.modulus(), &[0, 1]);
    }

    #[test]
    fn gf4_modulus() {
        let f = FieldSpec::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
    }

    #[test]
    fn gf8_takes_least_irreducible() {
        // x^3 + x + 1 precedes x^3 + x^2 + 1
        let f = FieldSpec::new(2, 3).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 0, 1]);
    }

    #[test]
    fn gf9_modulus() {
        // over GF(3): x^2+1 is irreducible and comes first
        let f = FieldSpec::new(3, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
    }

    #[test]
    fn small_products() {
        let f3 = FieldSpec::new(3, 1).unwrap();
        assert_eq!(f3.mul(e(2), e(2)), e(1));
        let f4 = FieldSpec::new(2, 2).unwrap();
        // x * x = x + 1
        assert_eq!(f4.mul(e(2), e(2)), e(3));
        let f5 = FieldSpec::new(5, 1).unwrap();
        assert_eq!(f5.inv(e(2)).unwrap(), e(3));
    }

    #[test]
    fn inverse_of_zero_fails() {
        let f = FieldSpec::new(5, 1).unwrap();
        assert!(matches!(f.inv(FieldElement::ZERO), Err(Error::ZeroInverse)));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(FieldSpec::new(4, 1), Err(Error::NotPrime(4))));
        assert!(matches!(FieldSpec::new(2, 0), Err(Error::ZeroDegree)));
        assert!(matches!(
            FieldSpec::new(2, 17),
            Err(Error::FieldTooLarge { .. })
        ));
        assert!(matches!(
            FieldSpec::with_limit(3, 3, 20),
            Err(Error::FieldTooLarge { .. })
        ));
        assert!(FieldSpec::from_order(6).is_err());
    }

    #[test]
    fn prime_power_split() {
        assert_eq!(prime_power(2), Some((2, 1)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(64), Some((2, 6)));
        assert_eq!(prime_power(73), Some((73, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }

    fn all_small_fields() -> Vec<FieldSpec> {
        (2..=64u64)
            .filter_map(prime_power)
            .map(|(p, n)| FieldSpec::new(p, n).unwrap())
            .collect()
    }

    #[test]
    fn field_axioms_exhaustive_up_to_64() {
        for f in all_small_fields() {
            let els: Vec<_> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, FieldElement::ZERO), a);
                assert_eq!(f.mul(a, FieldElement::ONE), a);
                assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert!(f.add(a, b).value() < f.order() as u16);
                    for &c in &els {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn multiplicative_group_is_cyclic_of_order_q_minus_1() {
        for f in all_small_fields() {
            let q = f.order() as u64;
            let max = f
                .nonzero_elements()
                .map(|a| f.multiplicative_order(a).unwrap())
                .max()
                .unwrap();
            assert_eq!(max, q - 1, "GF({q})");
            for a in f.nonzero_elements() {
                assert_eq!((q - 1) % f.multiplicative_order(a).unwrap(), 0);
            }
        }
    }

    #[test]
    fn table_product_matches_polynomial_product() {
        for f in all_small_fields() {
            for a in f.elements() {
                for b in f.elements() {
                    let direct = f.poly_mul_mod(a.value() as u64, b.value() as u64);
                    assert_eq!(f.mul(a, b).value() as u64, direct);
                }
            }
        }
    }
}
