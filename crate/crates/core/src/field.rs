//! Prime-field arithmetic, factorization helpers and multiplicative subgroups.
//!
//! Everything here is deterministic: primality and factorization use trial
//! division, and every field carries its *smallest* primitive root so that the
//! generator of each subgroup (and therefore every element order downstream)
//! is reproducible.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fpset::FpSet;

/// Default upper bound on the modulus accepted by [`PrimeField::new`].
pub const DEFAULT_MODULUS_LIMIT: u64 = 1 << 20;

/// Hard ceiling: elements are stored as `u32` and sets as dense bit-vectors.
pub const MAX_MODULUS_LIMIT: u64 = 1 << 31;

/// Deterministic primality test by trial division.
pub fn is_prime(n: u64) -> Result<bool> {
    if n < 2 {
        return Err(Error::OutOfRange(n));
    }
    if n < 4 {
        return Ok(true);
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return Ok(false);
    }
    // 6k +- 1 wheel
    let mut f: u64 = 5;
    while f.checked_mul(f).is_some_and(|sq| sq <= n) {
        if n.is_multiple_of(f) || n.is_multiple_of(f + 2) {
            return Ok(false);
        }
        f += 6;
    }
    Ok(true)
}

/// Prime factorization as `(prime, exponent)` pairs with strictly increasing primes.
pub fn factorize(n: u64) -> Result<Vec<(u64, u32)>> {
    if n == 0 {
        return Err(Error::OutOfRange(0));
    }
    let mut out = Vec::new();
    let mut rest = n;
    let mut push = |rest: &mut u64, f: u64| {
        let mut e = 0;
        while (*rest).is_multiple_of(f) {
            *rest /= f;
            e += 1;
        }
        if e > 0 {
            out.push((f, e));
        }
    };
    push(&mut rest, 2);
    push(&mut rest, 3);
    let mut f: u64 = 5;
    while f.checked_mul(f).is_some_and(|sq| sq <= rest) {
        push(&mut rest, f);
        push(&mut rest, f + 2);
        f += 6;
    }
    if rest > 1 {
        out.push((rest, 1));
    }
    Ok(out)
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    let mut divs = vec![1u64];
    for (q, e) in factorize(n)? {
        let len = divs.len();
        let mut pow = 1u64;
        for _ in 0..e {
            pow *= q;
            for i in 0..len {
                divs.push(divs[i] * pow);
            }
        }
    }
    divs.sort_unstable();
    Ok(divs)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Smallest primitive root modulo the prime `p`.
pub fn primitive_root(p: u64) -> Result<u64> {
    if !is_prime(p)? {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Ok(1);
    }
    let order = p - 1;
    let cofactors: Vec<u64> = factorize(order)?
        .into_iter()
        .map(|(q, _)| order / q)
        .collect();
    (2..p)
        .find(|&g| cofactors.iter().all(|&c| pow_mod(g, c, p) != 1))
        .ok_or(Error::NotPrime(p))
}

/// The prime field `F_p` together with its smallest primitive root.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeField {
    p: u32,
    g: u32,
}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        Self::with_limit(p, DEFAULT_MODULUS_LIMIT)
    }

    pub fn with_limit(p: u64, limit: u64) -> Result<Self> {
        let limit = limit.min(MAX_MODULUS_LIMIT);
        if p > limit {
            return Err(Error::ModulusTooLarge { p, limit });
        }
        let g = primitive_root(p)?;
        Ok(Self {
            p: p as u32,
            g: g as u32,
        })
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.p
    }

    /// The smallest primitive root.
    #[inline]
    pub fn generator(&self) -> u32 {
        self.g
    }

    /// Order of the multiplicative group, `p - 1`.
    #[inline]
    pub fn group_order(&self) -> u32 {
        self.p - 1
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u32 {
        (x % self.p as u64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        if s >= self.p as u64 {
            (s - self.p as u64) as u32
        } else {
            s as u32
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (a as u64 + self.p as u64 - b as u64) as u32
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, a: u32, exp: u64) -> u32 {
        pow_mod(a as u64, exp, self.p as u64) as u32
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a.is_multiple_of(self.p) {
            None
        } else {
            Some(self.pow(a, self.p as u64 - 2))
        }
    }

    pub fn div(&self, a: u32, b: u32) -> Option<u32> {
        self.inv(b).map(|ib| self.mul(a, ib))
    }

    /// Table of inverses indexed by residue; entry 0 is 0.
    pub fn inverse_table(&self) -> Vec<u32> {
        let p = self.p as usize;
        let mut inv = vec![0u32; p];
        if p > 1 {
            inv[1] = 1;
        }
        for i in 2..p {
            // inv[i] = -(p / i) * inv[p mod i]
            let q = (p / i) as u32;
            let r = inv[p % i];
            inv[i] = self.neg(self.mul(q, r));
        }
        inv
    }

    /// Multiplicative order of a nonzero element.
    pub fn order_of(&self, a: u32) -> Option<u32> {
        if a.is_multiple_of(self.p) {
            return None;
        }
        let n = self.group_order() as u64;
        let mut ord = n;
        for (q, _) in factorize(n).expect("p - 1 >= 1") {
            while ord.is_multiple_of(q) && self.pow(a, ord / q) == 1 {
                ord /= q;
            }
        }
        Some(ord as u32)
    }

    /// Every divisor `d` of `p - 1`, i.e. every possible subgroup order.
    pub fn subgroup_orders(&self) -> Vec<u32> {
        divisors(self.group_order() as u64)
            .expect("p - 1 >= 1")
            .into_iter()
            .map(|d| d as u32)
            .collect()
    }

    pub fn subgroup(&self, d: u64) -> Result<Subgroup> {
        Subgroup::new(*self, d)
    }
}

/// The unique multiplicative subgroup of a given order.
#[derive(Clone, PartialEq, Eq)]
pub struct Subgroup {
    field: PrimeField,
    order: u32,
    generator: u32,
    elements: FpSet,
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup(order {}, {})", self.order, self.elements)
    }
}

impl Subgroup {
    pub fn new(field: PrimeField, d: u64) -> Result<Self> {
        let n = field.group_order() as u64;
        if d == 0 || !n.is_multiple_of(d) {
            return Err(Error::NotDivisor { d, order: n });
        }
        let generator = field.pow(field.generator(), n / d);
        let mut elements = FpSet::empty(field);
        let mut x = 1u32;
        for _ in 0..d {
            elements.insert(x);
            x = field.mul(x, generator);
        }
        debug_assert_eq!(elements.len() as u64, d);
        Ok(Self {
            field,
            order: d as u32,
            generator,
            elements,
        })
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.order
    }

    #[inline]
    pub fn generator(&self) -> u32 {
        self.generator
    }

    #[inline]
    pub fn elements(&self) -> &FpSet {
        &self.elements
    }

    #[inline]
    pub fn contains(&self, x: u32) -> bool {
        self.elements.contains(x)
    }

    /// Elements in generator-power order `1, h, h^2, ...`.
    pub fn powers(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.order as usize);
        let mut x = 1u32;
        for _ in 0..self.order {
            out.push(x);
            x = self.field.mul(x, self.generator);
        }
        out
    }

    /// The coset `xi * Gamma`.
    pub fn coset(&self, xi: u32) -> Result<FpSet> {
        let xi = xi % self.field.modulus();
        if xi == 0 {
            return Err(Error::ZeroElement("coset representative"));
        }
        Ok(FpSet::from_iter_unchecked(
            self.field,
            self.elements.iter().map(|g| self.field.mul(xi, g)),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime(13).unwrap());
        assert!(!is_prime(15).unwrap());
        assert!(is_prime(1_000_003).unwrap());
        assert!(is_prime(2).unwrap());
        assert!(matches!(is_prime(1), Err(Error::OutOfRange(1))));
        for n in 2..5000 {
            assert_eq!(is_prime(n).unwrap(), trial_division(n), "n = {n}");
        }
    }

    #[test]
    fn factorization_examples() {
        assert_eq!(factorize(12).unwrap(), vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(1).unwrap(), vec![]);
        assert_eq!(
            factorize(96577).unwrap(),
            vec![(13, 1), (17, 1), (19, 1), (23, 1)]
        );
        for n in 1..3000u64 {
            let f = factorize(n).unwrap();
            assert_eq!(f.iter().map(|&(q, e)| q.pow(e)).product::<u64>(), n);
            assert!(f.windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.iter().all(|&(q, _)| trial_division(q)));
        }
        assert!(factorize(0).is_err());
    }

    #[test]
    fn primitive_root_examples() {
        assert_eq!(primitive_root(13).unwrap(), 2);
        assert_eq!(primitive_root(7).unwrap(), 3);
        assert_eq!(primitive_root(3).unwrap(), 2);
        assert!(primitive_root(15).is_err());
        // oracle: enumerate powers
        for p in (3..400u64).filter(|&p| trial_division(p)) {
            let g = primitive_root(p).unwrap();
            let mut seen = std::collections::HashSet::new();
            let mut x = 1;
            for _ in 0..p - 1 {
                seen.insert(x);
                x = x * g % p;
            }
            assert_eq!(seen.len() as u64, p - 1);
            for smaller in 2..g {
                let mut x = smaller;
                let mut ord = 1;
                while x != 1 {
                    x = x * smaller % p;
                    ord += 1;
                }
                assert!(ord < p - 1, "{smaller} would be a smaller root mod {p}");
            }
        }
    }

    #[test]
    fn subgroup_examples() {
        let f = PrimeField::new(13).unwrap();
        assert_eq!(
            f.subgroup(6).unwrap().elements().to_vec(),
            vec![1, 3, 4, 9, 10, 12]
        );
        assert_eq!(f.subgroup(1).unwrap().elements().to_vec(), vec![1]);
        assert_eq!(
            f.subgroup(4).unwrap().elements().to_vec(),
            vec![1, 5, 8, 12]
        );
        assert!(matches!(f.subgroup(5), Err(Error::NotDivisor { .. })));
    }

    #[test]
    fn coset_examples() {
        let f = PrimeField::new(13).unwrap();
        let g6 = f.subgroup(6).unwrap();
        assert_eq!(g6.coset(2).unwrap().to_vec(), vec![2, 5, 6, 7, 8, 11]);
        assert_eq!(&g6.coset(1).unwrap(), g6.elements());
        let g2 = f.subgroup(2).unwrap();
        assert_eq!(g2.coset(5).unwrap().to_vec(), vec![5, 8]);
        assert!(matches!(g6.coset(0), Err(Error::ZeroElement(_))));
    }

    #[test]
    fn subgroup_grid_invariants() {
        for p in (3..120u64).filter(|&p| trial_division(p)) {
            let f = PrimeField::new(p).unwrap();
            for d in f.subgroup_orders() {
                let g = f.subgroup(d as u64).unwrap();
                let el = g.elements();
                assert_eq!(el.len() as u32, d);
                assert!(el.contains(1) && !el.contains(0));
                for x in el.iter() {
                    assert!(el.contains(f.inv(x).unwrap()));
                    for y in el.iter() {
                        assert!(el.contains(f.mul(x, y)));
                    }
                }
                assert_eq!(el.contains(f.neg(1)), d % 2 == 0, "p={p} d={d}");
                assert_eq!(f.order_of(g.generator()), Some(d));
                // cosets partition F_p^*
                for xi in 1..p as u32 {
                    let a = g.coset(xi).unwrap();
                    for eta in 1..p as u32 {
                        let b = g.coset(eta).unwrap();
                        assert!(a == b || a.intersection(&b).unwrap().is_empty());
                    }
                }
            }
        }
    }

    #[test]
    fn inverse_table_matches_pow() {
        let f = PrimeField::new(101).unwrap();
        let t = f.inverse_table();
        for x in 1..101 {
            assert_eq!(Some(t[x as usize]), f.inv(x));
        }
    }

    #[test]
    fn modulus_limit() {
        assert!(matches!(
            PrimeField::new(1_048_583),
            Err(Error::ModulusTooLarge { .. })
        ));
        assert!(PrimeField::with_limit(1_048_583, 1 << 21).is_ok());
        assert!(matches!(PrimeField::new(21), Err(Error::NotPrime(21))));
    }
}
