//! Factorization of monic integer polynomials up to degree 8: reduce modulo
//! a small odd prime, Hensel-lift the modular factors past the coefficient
//! bound, then recombine subsets and test exact division.

use super::modp::{self, ModPoly};
use super::poly::IntPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Factorization is only attempted up to this degree; above it the unit
/// test reports `Unknown` rather than guessing.
pub const MAX_FACTOR_DEGREE: usize = 8;

const SPLIT_SEED: u64 = 0x0DD0_3E7E;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitFactorStatus {
    /// Some irreducible factor has constant term +-1.
    HasUnitFactor,
    /// No irreducible factor has constant term +-1.
    NoUnitFactor,
    /// Degree above the supported bound; no certificate.
    Unknown,
}

fn to_mod(f: &IntPoly, p: u64) -> ModPoly {
    let bp = BigInt::from(p);
    modp::trim(
        f.coeffs()
            .iter()
            .map(|c| {
                let r = c.mod_floor(&bp);
                r.to_string().parse::<u64>().unwrap()
            })
            .collect(),
    )
}

fn symmetric(c: &BigInt, m: &BigInt) -> BigInt {
    let r = c.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

fn symmetric_poly(f: &[BigInt], m: &BigInt) -> IntPoly {
    IntPoly::new(f.iter().map(|c| symmetric(c, m)).collect())
}

/// Landau-Mignotte style bound: coefficients of any monic factor of f are
/// bounded by 2^deg(f) * (|f|_2 + 1).
fn coefficient_bound(f: &IntPoly) -> BigInt {
    let norm_sq: BigInt = f.coeffs().iter().map(|c| c * c).sum();
    let norm = norm_sq.sqrt() + 1;
    norm << f.degree()
}

/// Extended Euclid over F_p[x]: returns the inverse of `a` modulo `g`.
fn inv_mod_poly(a: &ModPoly, g: &ModPoly, p: u64) -> ModPoly {
    let (mut r0, mut r1) = (g.clone(), modp::rem(a, g, p));
    let (mut t0, mut t1): (ModPoly, ModPoly) = (vec![0], vec![1]);
    while !modp::is_zero(&r1) {
        let (q, r) = modp::divrem(&r0, &r1, p);
        let t = modp::sub(&t0, &modp::mul(&q, &t1, p), p);
        r0 = r1;
        r1 = r;
        t0 = t1;
        t1 = t;
    }
    assert_eq!(modp::deg(&r0), 0, "factors must be coprime mod p");
    let lead_inv = inv_scalar(r0[0], p);
    modp::trim(t0.iter().map(|&c| (c as u128 * lead_inv as u128 % p as u128) as u64).collect())
}

fn inv_scalar(a: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * base as u128 % p as u128) as u64;
        }
        base = (base as u128 * base as u128 % p as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Linear multifactor Hensel lifting: given f = prod g_i (mod p) with the
/// g_i monic and pairwise coprime, lifts them to monic G_i with
/// f = prod G_i (mod p^k) and p^k > bound.
fn hensel_lift(f: &IntPoly, factors_p: &[ModPoly], p: u64, bound: &BigInt) -> (Vec<IntPoly>, BigInt) {
    let r = factors_p.len();
    let bp = BigInt::from(p);

    // Bezout basis mod p: l_i = (prod_{j != i} g_j)^-1 mod g_i
    let mut ells = Vec::with_capacity(r);
    for i in 0..r {
        let mut h = vec![1u64];
        for (j, g) in factors_p.iter().enumerate() {
            if j != i {
                h = modp::mul(&h, g, p);
            }
        }
        ells.push(inv_mod_poly(&h, &factors_p[i], p));
    }

    let mut lifted: Vec<IntPoly> = factors_p
        .iter()
        .map(|g| IntPoly::new(g.iter().map(|&c| BigInt::from(c)).collect()))
        .collect();
    let mut modulus = bp.clone();

    while modulus <= bound * 2 {
        let prod = lifted.iter().fold(IntPoly::one(), |acc, g| acc.mul(g));
        let err = f.sub(&prod);
        // err is divisible by the current modulus
        let e_over_m: Vec<BigInt> = err
            .coeffs()
            .iter()
            .map(|c| {
                let (q, rem) = c.div_rem(&modulus);
                debug_assert!(rem.is_zero(), "Hensel error must be divisible by modulus");
                q
            })
            .collect();
        let e_mod_p = modp::trim(
            e_over_m
                .iter()
                .map(|c| c.mod_floor(&bp).to_string().parse::<u64>().unwrap())
                .collect(),
        );
        for i in 0..r {
            let delta = modp::rem(&modp::mul(&e_mod_p, &ells[i], p), &factors_p[i], p);
            let mut coeffs = lifted[i].coeffs().to_vec();
            coeffs.resize(coeffs.len().max(delta.len()), BigInt::zero());
            for (k, &dc) in delta.iter().enumerate() {
                coeffs[k] += symmetric(&BigInt::from(dc), &bp) * &modulus;
            }
            lifted[i] = IntPoly::new(coeffs);
        }
        modulus *= &bp;
    }
    (lifted, modulus)
}

/// Subset recombination: multiply subsets of lifted factors mod p^k, map to
/// symmetric range, and keep those dividing exactly over the integers.
fn recombine(f: &IntPoly, lifted: Vec<IntPoly>, modulus: &BigInt) -> Vec<IntPoly> {
    let mut pool = lifted;
    let mut remaining = f.clone();
    let mut out = Vec::new();
    let mut size = 1usize;
    'outer: while 2 * size <= pool.len() {
        let indices: Vec<usize> = (0..pool.len()).collect();
        for mask in 1u32..(1u32 << pool.len()) {
            if mask.count_ones() as usize != size {
                continue;
            }
            let mut cand = IntPoly::one();
            for &i in &indices {
                if mask & (1 << i) != 0 {
                    cand = cand.mul(&pool[i]);
                    cand = symmetric_poly(
                        &cand
                            .coeffs()
                            .iter()
                            .map(|c| c.mod_floor(modulus))
                            .collect::<Vec<_>>(),
                        modulus,
                    );
                }
            }
            if let Some(q) = remaining.div_exact(&cand) {
                out.push(cand);
                remaining = q;
                pool = indices
                    .iter()
                    .filter(|&&i| mask & (1 << i) == 0)
                    .map(|&i| pool[i].clone())
                    .collect();
                continue 'outer;
            }
        }
        size += 1;
    }
    if remaining.degree() >= 1 {
        out.push(remaining);
    }
    out.sort_by(|a, b| (a.degree(), a.coeffs()).cmp(&(b.degree(), b.coeffs())));
    out
}

/// Irreducible factorization of a monic integer polynomial with
/// multiplicities. Returns `None` above `MAX_FACTOR_DEGREE`.
pub fn factor_monic(f: &IntPoly) -> Option<Vec<(IntPoly, u32)>> {
    assert!(f.is_monic(), "factor_monic requires a monic polynomial");
    if f.degree() > MAX_FACTOR_DEGREE {
        return None;
    }
    if f.degree() == 0 {
        return Some(vec![]);
    }

    // split off the power of x
    let mut work = f.clone();
    let mut out: Vec<(IntPoly, u32)> = Vec::new();
    let x_mult = work.coeffs().iter().take_while(|c| c.is_zero()).count() as u32;
    if x_mult > 0 {
        out.push((IntPoly::x(), x_mult));
        let coeffs = work.coeffs()[x_mult as usize..].to_vec();
        work = IntPoly::new(coeffs);
    }
    if work.degree() == 0 {
        return Some(out);
    }

    let sf = work.squarefree_part();
    // first odd prime keeping the squarefree part squarefree mod p
    let mut prime = 0u64;
    for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73] {
        let fp = to_mod(&sf, p);
        if modp::deg(&fp) == sf.degree() && modp::is_squarefree(&fp, p) {
            prime = p;
            break;
        }
    }
    assert!(prime != 0, "no suitable factorization prime below 73");

    let fp = to_mod(&sf, prime);
    let modular = modp::factor_squarefree(&fp, prime, SPLIT_SEED);
    let irreducibles = if modular.len() == 1 {
        vec![sf.clone()]
    } else {
        let bound = coefficient_bound(&sf);
        let (lifted, modulus) = hensel_lift(&sf, &modular, prime, &bound);
        recombine(&sf, lifted, &modulus)
    };

    for g in irreducibles {
        let mut mult = 0u32;
        let mut rest = work.clone();
        while let Some(q) = rest.div_exact(&g) {
            mult += 1;
            rest = q;
        }
        debug_assert!(mult >= 1);
        out.push((g, mult));
    }
    out.sort_by(|a, b| (a.0.degree(), a.0.coeffs()).cmp(&(b.0.degree(), b.0.coeffs())));
    Some(out)
}

/// Does some irreducible factor of the given monic polynomial have constant
/// term +-1? Sound up to degree 8; `Unknown` above.
pub fn unit_factor_test(f: &IntPoly) -> UnitFactorStatus {
    assert!(f.is_monic(), "unit_factor_test requires a monic polynomial");
    match factor_monic(f) {
        None => UnitFactorStatus::Unknown,
        Some(factors) => {
            let unit = factors
                .iter()
                .any(|(g, _)| g.constant_term().abs().is_one());
            if unit {
                UnitFactorStatus::HasUnitFactor
            } else {
                UnitFactorStatus::NoUnitFactor
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    fn check_factorization(f: &IntPoly) {
        let factors = factor_monic(f).expect("within degree bound");
        let mut prod = IntPoly::one();
        for (g, e) in &factors {
            assert!(g.is_monic(), "factor {g} not monic");
            for _ in 0..*e {
                prod = prod.mul(g);
            }
        }
        assert_eq!(&prod, f, "factorization of {f} does not multiply back");
    }

    #[test]
    fn factor_split_quadratic() {
        // x^2 - 17x + 30 = (x-2)(x-15)
        let f = poly(&[30, -17, 1]);
        let factors = factor_monic(&f).unwrap();
        assert_eq!(
            factors,
            vec![(poly(&[-15, 1]), 1), (poly(&[-2, 1]), 1)]
        );
    }

    #[test]
    fn factor_irreducible_quadratic() {
        let f = poly(&[1, -3, 1]); // x^2 - 3x + 1, golden-ratio-like unit
        let factors = factor_monic(&f).unwrap();
        assert_eq!(factors, vec![(f.clone(), 1)]);
    }

    #[test]
    fn factor_with_multiplicity() {
        // (x-2)^2
        let f = poly(&[4, -4, 1]);
        assert_eq!(factor_monic(&f).unwrap(), vec![(poly(&[-2, 1]), 2)]);
        check_factorization(&f);
    }

    #[test]
    fn factor_with_x_power() {
        // x^3 (x^2 + 3)
        let f = poly(&[0, 0, 0, 3, 0, 1]);
        let factors = factor_monic(&f).unwrap();
        assert_eq!(factors, vec![(poly(&[0, 1]), 3), (poly(&[3, 0, 1]), 1)]);
    }

    #[test]
    fn factor_degree_eight_products() {
        // (x^2+x+1)(x^2-2)(x^4+x+1): needs lifting and recombination
        let f = poly(&[1, 1, 1]).mul(&poly(&[-2, 0, 1])).mul(&poly(&[1, 1, 0, 0, 1]));
        assert_eq!(f.degree(), 8);
        check_factorization(&f);
        let factors = factor_monic(&f).unwrap();
        assert_eq!(factors.len(), 3);
    }

    #[test]
    fn factor_cyclotomic_like() {
        // x^4 - 1 = (x-1)(x+1)(x^2+1)
        let f = poly(&[-1, 0, 0, 0, 1]);
        let factors = factor_monic(&f).unwrap();
        assert_eq!(factors.len(), 3);
        check_factorization(&f);
    }

    #[test]
    fn degree_cap() {
        let mut c = vec![0i64; 10];
        c[9] = 1;
        c[0] = 2;
        assert!(factor_monic(&poly(&c)).is_none());
        assert_eq!(unit_factor_test(&poly(&c)), UnitFactorStatus::Unknown);
    }

    #[test]
    fn unit_factor_examples() {
        assert_eq!(unit_factor_test(&poly(&[30, -17, 1])), UnitFactorStatus::NoUnitFactor);
        assert_eq!(unit_factor_test(&poly(&[1, -3, 1])), UnitFactorStatus::HasUnitFactor);
        assert_eq!(unit_factor_test(&poly(&[-1, 1])), UnitFactorStatus::HasUnitFactor);
        // x^2 - 4x + 4 = (x-2)^2: constant 2, no unit
        assert_eq!(unit_factor_test(&poly(&[4, -4, 1])), UnitFactorStatus::NoUnitFactor);
        // x(x-2): factor x has constant 0, factor (x-2) has constant 2
        assert_eq!(unit_factor_test(&poly(&[0, -2, 1])), UnitFactorStatus::NoUnitFactor);
        // x^2 - 2x + 1 = (x-1)^2: unit root 1
        assert_eq!(unit_factor_test(&poly(&[1, -2, 1])), UnitFactorStatus::HasUnitFactor);
    }
}
