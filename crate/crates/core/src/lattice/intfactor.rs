//! Integer factorization: trial division, then Pollard rho with
//! Miller-Rabin certification.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

const TRIAL_BOUND: u64 = 10_000;

/// Sorted list of `(prime, exponent)` pairs whose product reconstructs the
/// input. The empty list represents 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeFactorization {
    factors: Vec<(BigInt, u32)>,
}

impl PrimeFactorization {
    pub fn one() -> Self {
        PrimeFactorization { factors: vec![] }
    }

    /// Builds a factorization from `(prime, exponent)` pairs; the primes
    /// must be certified and strictly increasing.
    pub fn from_prime_powers(pairs: &[(u64, u32)]) -> Self {
        let mut factors = Vec::with_capacity(pairs.len());
        for &(p, e) in pairs {
            assert!(is_prime(&BigInt::from(p)), "{p} is not prime");
            if e == 0 {
                continue;
            }
            if let Some((last, _)) = factors.last() {
                assert!(*last < BigInt::from(p), "primes must be increasing");
            }
            factors.push((BigInt::from(p), e));
        }
        PrimeFactorization { factors }
    }

    pub fn factors(&self) -> &[(BigInt, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn value(&self) -> BigInt {
        let mut v = BigInt::one();
        for (p, e) in &self.factors {
            for _ in 0..*e {
                v *= p;
            }
        }
        v
    }

    pub fn exponent_of(&self, p: &BigInt) -> u32 {
        self.factors
            .iter()
            .find(|(q, _)| q == p)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }
}

impl fmt::Display for PrimeFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

fn mulmod(a: u128, b: u128, m: u128) -> u128 {
    // m < 2^64 here, so widen through BigInt only when it would overflow
    if let (Some(_), true) = (a.checked_mul(b), m <= u64::MAX as u128) {
        a * b % m
    } else {
        let prod = BigInt::from(a) * BigInt::from(b) % BigInt::from(m);
        prod.to_u128().unwrap()
    }
}

fn powmod(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc = 1u128 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn miller_rabin_u128(n: u128, bases: &[u128]) -> bool {
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'bases: for &a in bases {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Primality test: deterministic Miller-Rabin below 3.3e24, with extra
/// fixed pseudo-random bases above (inputs in this crate stay far below).
pub fn is_prime(n: &BigInt) -> bool {
    if n <= &BigInt::one() {
        return false;
    }
    let small = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &small {
        let p = BigInt::from(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    if let Some(v) = n.to_u128() {
        let bases: Vec<u128> = small.iter().map(|&p| p as u128).collect();
        return miller_rabin_u128(v, &bases);
    }
    // BigInt fallback for very large inputs
    let n_minus_1: BigInt = n - 1;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d: BigInt = &n_minus_1 >> s;
    let mut bases: Vec<BigInt> = small.iter().map(|&p| BigInt::from(p)).collect();
    let mut x = BigInt::from(0x5DEECE66Du64);
    for _ in 0..20 {
        x = (&x * BigInt::from(6364136223846793005u64) + 1442695040888963407u64) % n;
        if x > BigInt::one() {
            bases.push(x.clone());
        }
    }
    'bases: for a in bases {
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigInt::from(2u8), n);
            if x == n_minus_1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Pollard rho (Brent cycle detection) returning a nontrivial factor of a
/// composite `n`. Deterministic: seeds are tried in a fixed order.
fn pollard_rho(n: &BigInt) -> BigInt {
    let two = BigInt::from(2u8);
    if (n % &two).is_zero() {
        return two;
    }
    for c in 1u64.. {
        let c = BigInt::from(c);
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut x = BigInt::from(2u8);
        let mut y = x.clone();
        let mut d = BigInt::one();
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            d = (&x - &y).abs().gcd(n);
        }
        if &d != n {
            return d;
        }
    }
    unreachable!()
}

fn factor_into(n: BigInt, out: &mut Vec<BigInt>) {
    if n.is_one() {
        return;
    }
    if is_prime(&n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(&n);
    let q = &n / &d;
    factor_into(d, out);
    factor_into(q, out);
}

/// Exact factorization of `n >= 1`. Trial division up to 10^4, Pollard rho
/// beyond, every reported prime certified by `is_prime`.
pub fn factor_integer(n: &BigInt) -> PrimeFactorization {
    assert!(n >= &BigInt::one(), "factor_integer requires n >= 1");
    let mut rest = n.clone();
    let mut primes: Vec<BigInt> = Vec::new();
    let mut p = 2u64;
    while p < TRIAL_BOUND {
        let bp = BigInt::from(p);
        if &bp * &bp > rest {
            break;
        }
        while (&rest % &bp).is_zero() {
            primes.push(bp.clone());
            rest /= &bp;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !rest.is_one() {
        factor_into(rest, &mut primes);
    }
    primes.sort();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    for q in primes {
        match factors.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => factors.push((q, 1)),
        }
    }
    PrimeFactorization { factors }
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: &BigInt) -> u32 {
    assert!(!n.is_zero(), "valuation of zero is infinite");
    let mut v = 0;
    let mut n = n.abs();
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        v += 1;
        n = q;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fac(n: u64) -> Vec<(u64, u32)> {
        factor_integer(&BigInt::from(n))
            .factors()
            .iter()
            .map(|(p, e)| (p.to_u64().unwrap(), *e))
            .collect()
    }

    #[test]
    fn factor_small() {
        assert_eq!(fac(60), vec![(2, 2), (3, 1), (5, 1)]);
        assert_eq!(fac(30), vec![(2, 1), (3, 1), (5, 1)]);
        assert_eq!(fac(1), vec![]);
        assert_eq!(fac(2), vec![(2, 1)]);
        assert_eq!(fac(1024), vec![(2, 10)]);
    }

    #[test]
    fn factor_roundtrip_and_certification() {
        for n in [1u64, 2, 97, 1009 * 1013, 600851475143, 2u64.pow(61) - 1] {
            let f = factor_integer(&BigInt::from(n));
            assert_eq!(f.value(), BigInt::from(n));
            for (p, _) in f.factors() {
                assert!(is_prime(p), "{p} reported but not prime");
            }
        }
    }

    #[test]
    fn factor_large_power() {
        // 60^20 must factor exactly despite overflowing every fixed width
        let n = BigInt::from(60u8).pow(20);
        let f = factor_integer(&n);
        assert_eq!(f.value(), n);
        assert_eq!(f.exponent_of(&BigInt::from(2)), 40);
        assert_eq!(f.exponent_of(&BigInt::from(3)), 20);
        assert_eq!(f.exponent_of(&BigInt::from(5)), 20);
    }

    #[test]
    fn primality() {
        assert!(is_prime(&BigInt::from(2)));
        assert!(is_prime(&BigInt::from(3)));
        assert!(!is_prime(&BigInt::from(1)));
        assert!(!is_prime(&BigInt::from(561))); // Carmichael
        assert!(is_prime(&(BigInt::from(2u64).pow(61) - 1)));
        assert!(!is_prime(&(BigInt::from(2u64).pow(61) + 1)));
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(&BigInt::from(60), &BigInt::from(2)), 2);
        assert_eq!(valuation(&BigInt::from(60), &BigInt::from(7)), 0);
        assert_eq!(valuation(&BigInt::from(-8), &BigInt::from(2)), 3);
    }

    #[test]
    fn display_form() {
        assert_eq!(factor_integer(&BigInt::from(60)).to_string(), "2^2*3*5");
        assert_eq!(factor_integer(&BigInt::from(1u8)).to_string(), "1");
    }
}
