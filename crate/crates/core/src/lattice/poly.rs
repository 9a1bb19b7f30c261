//! Dense univariate integer polynomials, ascending coefficient order.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>, // coeffs[k] multiplies x^k; no trailing zeros
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly::new(vec![])
    }

    pub fn one() -> Self {
        IntPoly::new(vec![BigInt::one()])
    }

    pub fn x() -> Self {
        IntPoly::from_i64(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().unwrap()
    }

    pub fn constant_term(&self) -> &BigInt {
        &self.coeffs[0]
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        IntPoly::new(out)
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] -= c;
        }
        IntPoly::new(out)
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn derivative(&self) -> IntPoly {
        if self.degree() == 0 {
            return IntPoly::zero();
        }
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * BigInt::from(k))
            .collect();
        IntPoly::new(out)
    }

    /// Exact division; returns `None` when `other` does not divide `self`
    /// over the integers.
    pub fn div_exact(&self, other: &IntPoly) -> Option<IntPoly> {
        assert!(!other.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        if self.degree() < other.degree() {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let n = other.coeffs.len();
        let lead = other.leading();
        let mut quot = vec![BigInt::zero(); rem.len() - n + 1];
        for k in (0..quot.len()).rev() {
            let top = rem[k + n - 1].clone();
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(lead);
            if !r.is_zero() {
                return None;
            }
            quot[k] = q.clone();
            for (j, c) in other.coeffs.iter().enumerate() {
                rem[k + j] -= &q * c;
            }
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(IntPoly::new(quot))
    }

    /// gcd of the coefficients (nonnegative).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        g
    }

    pub fn primitive_part(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        IntPoly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Primitive gcd via the subresultant remainder sequence.
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() {
            return other.primitive_part();
        }
        if other.is_zero() {
            return self.primitive_part();
        }
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = pseudo_rem(&a, &b);
            a = b;
            b = r.primitive_part();
        }
        a.primitive_part()
    }

    /// Product of the distinct irreducible factors: `self / gcd(self, self')`.
    pub fn squarefree_part(&self) -> IntPoly {
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            return self.primitive_part();
        }
        self.primitive_part()
            .div_exact(&g)
            .expect("gcd divides its argument")
    }
}

/// Pseudo-remainder: rem of `lc(b)^(deg a - deg b + 1) * a` by `b`.
fn pseudo_rem(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut rem = a.clone();
    let db = b.degree();
    let lead = b.leading().clone();
    while !rem.is_zero() && rem.degree() >= db {
        let shift = rem.degree() - db;
        let coef = rem.leading().clone();
        let mut scaled = rem.coeffs().iter().map(|c| c * &lead).collect::<Vec<_>>();
        for (j, c) in b.coeffs().iter().enumerate() {
            scaled[shift + j] -= &coef * c;
        }
        rem = IntPoly::new(scaled);
    }
    rem
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() && !(first && k == 0 && self.is_zero()) {
                continue;
            }
            if first {
                first = false;
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if k == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{k}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let a = IntPoly::from_i64(&[1, 2, 1]); // (x+1)^2
        let b = IntPoly::from_i64(&[1, 1]);
        assert_eq!(a.div_exact(&b).unwrap(), b);
        assert_eq!(b.mul(&b), a);
        assert_eq!(a.sub(&a), IntPoly::zero());
        assert_eq!(a.eval(&BigInt::from(2)), BigInt::from(9));
    }

    #[test]
    fn div_exact_rejects_nondivisor() {
        let a = IntPoly::from_i64(&[1, 0, 1]);
        let b = IntPoly::from_i64(&[1, 1]);
        assert!(a.div_exact(&b).is_none());
        let c = IntPoly::from_i64(&[2, 2]);
        assert!(IntPoly::from_i64(&[1, 1]).div_exact(&c).is_none());
    }

    #[test]
    fn gcd_and_squarefree() {
        // f = (x-1)^2 (x+2)
        let f = IntPoly::from_i64(&[2, -3, 0, 1]);
        let g = f.gcd(&f.derivative());
        assert_eq!(g, IntPoly::from_i64(&[-1, 1]));
        assert_eq!(f.squarefree_part(), IntPoly::from_i64(&[-2, 1, 1]));
        // coprime case
        let a = IntPoly::from_i64(&[-1, 1]);
        let b = IntPoly::from_i64(&[1, 1]);
        assert_eq!(a.gcd(&b), IntPoly::one());
    }

    #[test]
    fn display() {
        assert_eq!(IntPoly::from_i64(&[30, -17, 1]).to_string(), "x^2 - 17*x + 30");
        assert_eq!(IntPoly::from_i64(&[0]).to_string(), "0");
        assert_eq!(IntPoly::from_i64(&[-1, 0, 2]).to_string(), "2*x^2 - 1");
    }
}
