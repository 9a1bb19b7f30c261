//! Univariate polynomial arithmetic and factorization over F_p for small
//! odd primes p. Used by the Zassenhaus lift-and-recombine factorizer.

pub type ModPoly = Vec<u64>; // ascending, trimmed, coefficients in [0, p)

pub fn trim(mut f: ModPoly) -> ModPoly {
    while f.len() > 1 && *f.last().unwrap() == 0 {
        f.pop();
    }
    if f.is_empty() {
        f.push(0);
    }
    f
}

pub fn is_zero(f: &ModPoly) -> bool {
    f.len() == 1 && f[0] == 0
}

pub fn deg(f: &ModPoly) -> usize {
    f.len() - 1
}

fn addm(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

fn subm(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn invm(a: u64, p: u64) -> u64 {
    // Fermat: p prime
    powm(a, p - 2, p)
}

fn powm(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulm(acc, a, p);
        }
        a = mulm(a, a, p);
        e >>= 1;
    }
    acc
}

pub fn sub(f: &ModPoly, g: &ModPoly, p: u64) -> ModPoly {
    let n = f.len().max(g.len());
    let mut out = vec![0u64; n];
    for (i, &c) in f.iter().enumerate() {
        out[i] = addm(out[i], c, p);
    }
    for (i, &c) in g.iter().enumerate() {
        out[i] = subm(out[i], c, p);
    }
    trim(out)
}

pub fn mul(f: &ModPoly, g: &ModPoly, p: u64) -> ModPoly {
    if is_zero(f) || is_zero(g) {
        return vec![0];
    }
    let mut out = vec![0u64; f.len() + g.len() - 1];
    for (i, &a) in f.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in g.iter().enumerate() {
            out[i + j] = addm(out[i + j], mulm(a, b, p), p);
        }
    }
    trim(out)
}

pub fn divrem(f: &ModPoly, g: &ModPoly, p: u64) -> (ModPoly, ModPoly) {
    assert!(!is_zero(g), "division by zero polynomial");
    if deg(f) < deg(g) && !is_zero(f) {
        return (vec![0], f.clone());
    }
    let mut rem = f.clone();
    let dg = deg(g);
    let inv_lead = invm(*g.last().unwrap(), p);
    let mut quot = vec![0u64; deg(f).saturating_sub(dg) + 1];
    while !is_zero(&rem) && deg(&rem) >= dg {
        let shift = deg(&rem) - dg;
        let q = mulm(*rem.last().unwrap(), inv_lead, p);
        quot[shift] = q;
        for (j, &c) in g.iter().enumerate() {
            rem[shift + j] = subm(rem[shift + j], mulm(q, c, p), p);
        }
        rem = trim(rem);
    }
    (trim(quot), rem)
}

pub fn rem(f: &ModPoly, g: &ModPoly, p: u64) -> ModPoly {
    divrem(f, g, p).1
}

pub fn monic(f: &ModPoly, p: u64) -> ModPoly {
    let lead = *f.last().unwrap();
    if lead == 1 || is_zero(f) {
        return f.clone();
    }
    let inv = invm(lead, p);
    trim(f.iter().map(|&c| mulm(c, inv, p)).collect())
}

pub fn gcd(f: &ModPoly, g: &ModPoly, p: u64) -> ModPoly {
    let mut a = f.clone();
    let mut b = g.clone();
    while !is_zero(&b) {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    if is_zero(&a) {
        a
    } else {
        monic(&a, p)
    }
}

pub fn derivative(f: &ModPoly, p: u64) -> ModPoly {
    if f.len() == 1 {
        return vec![0];
    }
    trim(
        f.iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| mulm(c, (k as u64) % p, p))
            .collect(),
    )
}

/// base^e mod (f, p) where e may be as large as p^8.
pub fn powmod(base: &ModPoly, mut e: u128, f: &ModPoly, p: u64) -> ModPoly {
    let mut acc = vec![1u64];
    let mut b = rem(base, f, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = rem(&mul(&acc, &b, p), f, p);
        }
        b = rem(&mul(&b, &b, p), f, p);
        e >>= 1;
    }
    acc
}

pub fn is_squarefree(f: &ModPoly, p: u64) -> bool {
    let g = gcd(f, &derivative(f, p), p);
    deg(&g) == 0
}

/// Tiny deterministic generator for the Cantor-Zassenhaus splitting.
pub struct SplitRng(u64);

impl SplitRng {
    pub fn new(seed: u64) -> Self {
        SplitRng(seed | 1)
    }
    fn next(&mut self) -> u64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }
    fn poly(&mut self, max_deg: usize, p: u64) -> ModPoly {
        let mut f: ModPoly = (0..=max_deg).map(|_| self.next() % p).collect();
        f = trim(f);
        f
    }
}

/// Distinct-degree factorization of a squarefree monic f: returns pairs
/// (product of all irreducible factors of degree d, d).
fn distinct_degree(f: &ModPoly, p: u64) -> Vec<(ModPoly, usize)> {
    let mut out = Vec::new();
    let mut f = monic(f, p);
    let mut h: ModPoly = vec![0, 1]; // x
    let mut d = 0usize;
    while deg(&f) >= 1 {
        d += 1;
        if 2 * d > deg(&f) {
            out.push((f.clone(), deg(&f)));
            break;
        }
        h = powmod(&h, p as u128, &f, p); // h = x^(p^d) mod f
        let diff = sub(&h, &vec![0, 1], p);
        let g = gcd(&f, &diff, p);
        if deg(&g) > 0 {
            out.push((g.clone(), d));
            f = divrem(&f, &g, p).0;
            h = rem(&h, &f, p);
        }
    }
    out
}

/// Cantor-Zassenhaus equal-degree splitting (p odd).
fn equal_degree(f: &ModPoly, d: usize, p: u64, rng: &mut SplitRng, out: &mut Vec<ModPoly>) {
    if deg(f) == d {
        out.push(monic(f, p));
        return;
    }
    let e = (p as u128).pow(d as u32) / 2; // (p^d - 1) / 2 for odd p
    loop {
        let r = rng.poly(deg(f) - 1, p);
        if deg(&r) == 0 && r[0] == 0 {
            continue;
        }
        let s = powmod(&r, e, f, p);
        let cand = sub(&s, &vec![1], p);
        let g = gcd(f, &cand, p);
        if deg(&g) > 0 && deg(&g) < deg(f) {
            let q = divrem(f, &g, p).0;
            equal_degree(&g, d, p, rng, out);
            equal_degree(&q, d, p, rng, out);
            return;
        }
    }
}

/// Monic irreducible factors of a squarefree monic polynomial over F_p.
/// Deterministic for a fixed seed. Output sorted for reproducibility.
pub fn factor_squarefree(f: &ModPoly, p: u64, seed: u64) -> Vec<ModPoly> {
    assert!(p >= 3 && p % 2 == 1, "factorization requires an odd prime");
    let mut rng = SplitRng::new(seed);
    let mut out = Vec::new();
    for (g, d) in distinct_degree(f, p) {
        equal_degree(&g, d, p, &mut rng, &mut out);
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divrem_roundtrip() {
        let p = 7;
        let f = vec![3, 0, 1, 5, 2];
        let g = vec![1, 4, 1];
        let (q, r) = divrem(&f, &g, p);
        // f - q*g = r
        assert_eq!(sub(&f, &mul(&q, &g, p), p), r);
    }

    #[test]
    fn factor_x2_minus_1_mod_5() {
        // x^2 - 1 = (x-1)(x+1) mod 5
        let f = vec![4, 0, 1];
        let factors = factor_squarefree(&f, 5, 42);
        assert_eq!(factors.len(), 2);
        let prod = factors.iter().fold(vec![1u64], |acc, g| mul(&acc, g, 5));
        assert_eq!(prod, trim(f));
    }

    #[test]
    fn factor_irreducible() {
        // x^2 + 1 irreducible mod 7 (since -1 is not a QR mod 7)
        let f = vec![1, 0, 1];
        let factors = factor_squarefree(&f, 7, 42);
        assert_eq!(factors, vec![vec![1, 0, 1]]);
    }

    #[test]
    fn factor_degree8() {
        // (x^2+1)(x^2+x+2)(x^4+x+1)-ish product mod 11, rebuilt from factors
        let p = 11;
        let a = vec![1, 0, 1];
        let b = vec![2, 1, 1];
        let c = vec![1, 1, 0, 0, 1];
        let f = mul(&mul(&a, &b, p), &c, p);
        assert!(is_squarefree(&f, p));
        let factors = factor_squarefree(&f, p, 7);
        let prod = factors.iter().fold(vec![1u64], |acc, g| mul(&acc, g, p));
        assert_eq!(prod, f);
        for g in &factors {
            assert_eq!(*g.last().unwrap(), 1, "factors must be monic");
        }
    }
}
