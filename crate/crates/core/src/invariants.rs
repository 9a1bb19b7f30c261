//! Classification invariants of a scale: the supernatural number of its
//! index sequence and the per-prime profinite type of the associated
//! odometer as a topological group.

use crate::lattice::{charpoly, factor_integer, snf, valuation as intfactor_valuation};
use crate::scale::{ScaleError, ScaleKind, ZdScale};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use std::collections::BTreeSet;
use std::fmt;

/// Levels explored before giving up on exponent stabilization.
pub const DEFAULT_LEVEL_BUDGET: usize = 48;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error("scale error: {0}")]
    Scale(#[from] ScaleError),
    #[error("prime factor does not fit the supported word size")]
    PrimeTooLarge,
    #[error("exponents at prime {prime} did not stabilize within {budget} levels")]
    NotStabilized { prime: u64, budget: usize },
}

/// An exponent in `N + {infinity}`, with an honest lower-bound variant for
/// chains that carry finite information only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(u32),
    AtLeast(u32),
    Infinite,
}

impl Exponent {
    pub fn is_zero(&self) -> bool {
        matches!(self, Exponent::Finite(0))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    pub fn is_at_least(&self) -> bool {
        matches!(self, Exponent::AtLeast(_))
    }

    fn sort_key(&self) -> (u8, u32) {
        match self {
            Exponent::Finite(k) => (0, *k),
            Exponent::AtLeast(k) => (1, *k),
            Exponent::Infinite => (2, 0),
        }
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(k) => write!(f, "{k}"),
            Exponent::AtLeast(k) => write!(f, ">={k}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

/// Pairwise comparison verdict; `Inconclusive` whenever a lower-bound
/// exponent blocks the decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    Equal,
    NotEqual,
    Inconclusive,
}

fn exponents_comparable(a: Exponent, b: Exponent) -> Comparison {
    use Exponent::*;
    match (a, b) {
        (Finite(x), Finite(y)) => {
            if x == y {
                Comparison::Equal
            } else {
                Comparison::NotEqual
            }
        }
        (Infinite, Infinite) => Comparison::Equal,
        (Finite(_), Infinite) | (Infinite, Finite(_)) => Comparison::NotEqual,
        (AtLeast(k), Finite(x)) | (Finite(x), AtLeast(k)) => {
            if x < k {
                Comparison::NotEqual
            } else {
                Comparison::Inconclusive
            }
        }
        _ => Comparison::Inconclusive,
    }
}

/// Formal product `prod p^{e_p}` encoding the subgroup of the rationals
/// generated by the reciprocals of the indices. Primes with exponent zero
/// are not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupernaturalNumber {
    factors: Vec<(u64, Exponent)>,
}

impl SupernaturalNumber {
    pub fn factors(&self) -> &[(u64, Exponent)] {
        &self.factors
    }

    pub fn exponent_at(&self, p: u64) -> Exponent {
        self.factors
            .iter()
            .find(|(q, _)| *q == p)
            .map(|(_, e)| *e)
            .unwrap_or(Exponent::Finite(0))
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|(p, _)| *p)
    }

    pub fn has_at_least(&self) -> bool {
        self.factors.iter().any(|(_, e)| e.is_at_least())
    }
}

impl fmt::Display for SupernaturalNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            match e {
                Exponent::Finite(1) => write!(f, "{p}")?,
                Exponent::Finite(k) => write!(f, "{p}^{k}")?,
                Exponent::AtLeast(k) => write!(f, "{p}^>={k}")?,
                Exponent::Infinite => write!(f, "{p}^inf")?,
            }
        }
        Ok(())
    }
}

/// Per-prime exponent tuples presenting the odometer as a product of
/// pro-p cyclic groups: entry `Finite(k)` is `Z/p^k`, `Infinite` is the
/// pro-p line `Z_p`. Tuples are sorted ascending; absent primes mean the
/// all-zero tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfiniteType {
    dim: usize,
    primes: Vec<(u64, Vec<Exponent>)>,
}

impl ProfiniteType {
    pub fn new(dim: usize, mut primes: Vec<(u64, Vec<Exponent>)>) -> Self {
        primes.retain(|(_, tuple)| tuple.iter().any(|e| !e.is_zero()));
        for (_, tuple) in &mut primes {
            assert_eq!(tuple.len(), dim, "tuple length must equal the dimension");
            tuple.sort();
        }
        primes.sort_by_key(|(p, _)| *p);
        ProfiniteType { dim, primes }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().map(|(p, _)| *p)
    }

    pub fn entries(&self) -> &[(u64, Vec<Exponent>)] {
        &self.primes
    }

    /// Exponent tuple at `p`, padded with zeros to the requested length.
    pub fn exponents_at(&self, p: u64, len: usize) -> Vec<Exponent> {
        let mut tuple = self
            .primes
            .iter()
            .find(|(q, _)| *q == p)
            .map(|(_, t)| t.clone())
            .unwrap_or_default();
        while tuple.len() < len {
            tuple.insert(0, Exponent::Finite(0));
        }
        tuple
    }

    /// Free pro-p rank: number of infinite entries at `p`.
    pub fn rank(&self, p: u64) -> usize {
        self.exponents_at(p, 0)
            .iter()
            .filter(|e| e.is_infinite())
            .count()
    }

    /// Nonzero finite exponents at `p` in descending order.
    pub fn torsion_exponents(&self, p: u64) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .exponents_at(p, 0)
            .iter()
            .filter_map(|e| match e {
                Exponent::Finite(k) if *k > 0 => Some(*k),
                _ => None,
            })
            .collect();
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    /// log_p of the torsion order at `p`.
    pub fn torsion_order_exponent(&self, p: u64) -> u32 {
        self.torsion_exponents(p).iter().sum()
    }

    pub fn has_at_least(&self) -> bool {
        self.primes
            .iter()
            .any(|(_, t)| t.iter().any(Exponent::is_at_least))
    }

    /// Rendering as a product of pro-p cyclic groups, infinite entries as
    /// `Z_p` and finite ones as `Z/p^k`.
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (p, tuple) in &self.primes {
            for e in tuple {
                match e {
                    Exponent::Finite(0) => {}
                    Exponent::Finite(1) => parts.push(format!("Z/{p}")),
                    Exponent::Finite(k) => parts.push(format!("Z/{p}^{k}")),
                    Exponent::AtLeast(k) => parts.push(format!("Z/{p}^>={k}")),
                    Exponent::Infinite => parts.push(format!("Z_{p}")),
                }
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" x ")
        }
    }
}

impl fmt::Display for ProfiniteType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

fn prime_u64(p: &BigInt) -> Result<u64, InvariantError> {
    p.to_u64().ok_or(InvariantError::PrimeTooLarge)
}

fn relevant_primes(scale: &ZdScale) -> Result<BTreeSet<u64>, InvariantError> {
    let mut primes = BTreeSet::new();
    match scale.kind() {
        ScaleKind::Geometric { prefix, base } => {
            for m in [prefix, base] {
                for (p, _) in factor_integer(&m.det().abs()).factors() {
                    primes.insert(prime_u64(p)?);
                }
            }
        }
        ScaleKind::Explicit { .. } => {
            let depth = scale.max_depth().expect("explicit scales have a depth");
            let idx = scale.index(depth)?;
            for (p, _) in factor_integer(&idx).factors() {
                primes.insert(prime_u64(p)?);
            }
        }
    }
    Ok(primes)
}

/// Supernatural number of the index sequence: the exponent at `p` is the
/// limit of `v_p([Z^d : Gamma_n])`. Geometric chains decide every exponent
/// (`Infinite` iff `p` divides `det M`); explicit chains report `Finite`
/// only when the valuation is constant over the whole represented range,
/// and an `AtLeast` lower bound otherwise.
pub fn supernatural(scale: &ZdScale) -> Result<SupernaturalNumber, InvariantError> {
    let mut factors = Vec::new();
    match scale.kind() {
        ScaleKind::Geometric { prefix, base } => {
            let det_a = prefix.det().abs();
            let det_m = base.det().abs();
            for p in relevant_primes(scale)? {
                let bp = BigInt::from(p);
                let slope = intfactor_valuation(&det_m, &bp);
                let offset = intfactor_valuation(&det_a, &bp);
                let e = if slope > 0 {
                    Exponent::Infinite
                } else {
                    Exponent::Finite(offset)
                };
                if !e.is_zero() {
                    factors.push((p, e));
                }
            }
        }
        ScaleKind::Explicit { .. } => {
            let depth = scale.max_depth().expect("explicit scales have a depth");
            let indices: Vec<BigInt> = (1..=depth)
                .map(|n| scale.index(n))
                .collect::<Result<_, _>>()?;
            for p in relevant_primes(scale)? {
                let bp = BigInt::from(p);
                let vals: Vec<u32> = indices.iter().map(|i| intfactor_valuation(i, &bp)).collect();
                let last = *vals.last().unwrap();
                let e = if vals.iter().all(|&v| v == last) {
                    Exponent::Finite(last)
                } else {
                    Exponent::AtLeast(last)
                };
                if !e.is_zero() {
                    factors.push((p, e));
                }
            }
        }
    }
    Ok(SupernaturalNumber { factors })
}

pub fn profinite_type(scale: &ZdScale) -> Result<ProfiniteType, InvariantError> {
    profinite_type_with_budget(scale, DEFAULT_LEVEL_BUDGET)
}

/// Profinite type of the odometer.
///
/// For geometric chains the free pro-p rank is computed algebraically as
/// the multiplicity of the root 0 of the characteristic polynomial of the
/// base modulo p; the finite exponents are read off the p-adic valuations
/// of the elementary divisors of `A M^n` once they are constant over a
/// window of `dim` consecutive levels whose divergent complement accounts
/// for the exact linear growth of `v_p(index)`. Explicit chains yield
/// evidence-only types with `AtLeast` entries taken at the deepest level.
pub fn profinite_type_with_budget(
    scale: &ZdScale,
    budget: usize,
) -> Result<ProfiniteType, InvariantError> {
    let dim = scale.dim();
    match scale.kind() {
        ScaleKind::Geometric { prefix, base } => {
            let mut out = Vec::new();
            let cp = charpoly(base);
            let det_a = prefix.det().abs();
            let det_m = base.det().abs();
            for p in relevant_primes(scale)? {
                let bp = BigInt::from(p);
                let rank = cp
                    .coeffs()
                    .iter()
                    .take_while(|c| intfactor_valuation2(c, &bp) >= 1)
                    .count();
                debug_assert!(rank <= dim);
                if rank == dim {
                    out.push((p, vec![Exponent::Infinite; dim]));
                    continue;
                }
                let offset = intfactor_valuation(&det_a, &bp);
                let slope = intfactor_valuation(&det_m, &bp);
                let finite_count = dim - rank;
                let mut history: Vec<Vec<u32>> = Vec::new();
                let mut power = prefix.clone();
                let mut accepted: Option<Vec<u32>> = None;
                for n in 1..=budget {
                    power = power.mul(base);
                    let exps: Vec<u32> = snf(&power)
                        .map_err(ScaleError::from)?
                        .elementary_divisors()
                        .iter()
                        .map(|d| intfactor_valuation(d, &bp))
                        .collect();
                    debug_assert!(exps.windows(2).all(|w| w[0] <= w[1]));
                    let total: u32 = exps.iter().sum();
                    if total != offset + (n as u32) * slope {
                        return Err(InvariantError::NotStabilized { prime: p, budget });
                    }
                    history.push(exps);
                    if history.len() >= dim {
                        let window = &history[history.len() - dim..];
                        let bottom = &window[0][..finite_count];
                        if window.iter().all(|w| &w[..finite_count] == bottom) {
                            accepted = Some(bottom.to_vec());
                            break;
                        }
                    }
                }
                let bottom = accepted.ok_or(InvariantError::NotStabilized { prime: p, budget })?;
                let mut tuple: Vec<Exponent> =
                    bottom.into_iter().map(Exponent::Finite).collect();
                tuple.extend(std::iter::repeat_n(Exponent::Infinite, rank));
                out.push((p, tuple));
            }
            Ok(ProfiniteType::new(dim, out))
        }
        ScaleKind::Explicit { .. } => {
            let depth = scale.max_depth().expect("explicit scales have a depth");
            let gamma = scale.gamma(depth)?;
            let divisors = snf(&gamma).map_err(ScaleError::from)?.elementary_divisors();
            let mut out = Vec::new();
            for p in relevant_primes(scale)? {
                let bp = BigInt::from(p);
                let tuple: Vec<Exponent> = divisors
                    .iter()
                    .map(|d| match intfactor_valuation(d, &bp) {
                        0 => Exponent::Finite(0),
                        v => Exponent::AtLeast(v),
                    })
                    .collect();
                out.push((p, tuple));
            }
            Ok(ProfiniteType::new(dim, out))
        }
    }
}

fn intfactor_valuation2(c: &BigInt, p: &BigInt) -> u32 {
    use num_traits::Zero;
    if c.is_zero() {
        u32::MAX
    } else {
        intfactor_valuation(c, p)
    }
}

/// Minimal number of topological generators: the maximum over primes of
/// the count of nonzero entries. `None` when lower-bound exponents make
/// the count unknown.
pub fn min_generators(t: &ProfiniteType) -> Option<u32> {
    if t.has_at_least() {
        return None;
    }
    t.entries()
        .iter()
        .map(|(_, tuple)| tuple.iter().filter(|e| !e.is_zero()).count() as u32)
        .max()
        .or(Some(0))
}

pub fn supernatural_equal(a: &SupernaturalNumber, b: &SupernaturalNumber) -> Comparison {
    match supernatural_first_difference(a, b) {
        None => Comparison::Equal,
        Some((_, _, _, c)) => c,
    }
}

/// First prime (if any) where the comparison is not `Equal`, with both
/// exponents and the verdict there. `NotEqual` wins over `Inconclusive`.
pub fn supernatural_first_difference(
    a: &SupernaturalNumber,
    b: &SupernaturalNumber,
) -> Option<(u64, Exponent, Exponent, Comparison)> {
    let primes: BTreeSet<u64> = a.primes().chain(b.primes()).collect();
    let mut blocking = None;
    for p in primes {
        let (ea, eb) = (a.exponent_at(p), b.exponent_at(p));
        match exponents_comparable(ea, eb) {
            Comparison::Equal => {}
            Comparison::NotEqual => return Some((p, ea, eb, Comparison::NotEqual)),
            Comparison::Inconclusive => {
                blocking.get_or_insert((p, ea, eb, Comparison::Inconclusive));
            }
        }
    }
    blocking
}

/// Equality of profinite types. Tuples are zero-padded to a common length,
/// so different ambient dimensions compare correctly. With lower-bound
/// entries present, only a provable rank-range separation yields
/// `NotEqual`; otherwise the comparison is `Inconclusive`.
pub fn type_equal(a: &ProfiniteType, b: &ProfiniteType) -> Comparison {
    let len = a.dim().max(b.dim());
    let primes: BTreeSet<u64> = a.primes().chain(b.primes()).collect();
    if !a.has_at_least() && !b.has_at_least() {
        for p in primes {
            if a.exponents_at(p, len) != b.exponents_at(p, len) {
                return Comparison::NotEqual;
            }
        }
        return Comparison::Equal;
    }
    for p in primes {
        let range = |t: &ProfiniteType| {
            let tuple = t.exponents_at(p, len);
            let inf = tuple.iter().filter(|e| e.is_infinite()).count();
            let at_least = tuple.iter().filter(|e| e.is_at_least()).count();
            (inf, inf + at_least)
        };
        let (lo_a, hi_a) = range(a);
        let (lo_b, hi_b) = range(b);
        if hi_a < lo_b || hi_b < lo_a {
            return Comparison::NotEqual;
        }
    }
    Comparison::Inconclusive
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::IntMatrix;
    use crate::scale::ZdScale;

    fn diag(name: &str, d: &[i64]) -> ZdScale {
        ZdScale::diagonal(name, d).unwrap()
    }

    #[test]
    fn supernatural_of_2_15() {
        let s = supernatural(&diag("s", &[2, 15])).unwrap();
        assert_eq!(s.to_string(), "2^inf*3^inf*5^inf");
        assert_eq!(s.exponent_at(7), Exponent::Finite(0));
    }

    #[test]
    fn supernatural_10_3_equals_2_15() {
        let a = supernatural(&diag("a", &[2, 15])).unwrap();
        let b = supernatural(&diag("b", &[10, 3])).unwrap();
        assert_eq!(supernatural_equal(&a, &b), Comparison::Equal);
    }

    #[test]
    fn supernatural_explicit_vs_geometric_encoding() {
        let explicit = ZdScale::explicit(
            "e",
            vec![
                IntMatrix::diagonal(&[6]),
                IntMatrix::diagonal(&[12]),
                IntMatrix::diagonal(&[24]),
            ],
        )
        .unwrap();
        let s = supernatural(&explicit).unwrap();
        assert_eq!(s.exponent_at(2), Exponent::AtLeast(3));
        assert_eq!(s.exponent_at(3), Exponent::Finite(1));
        assert!(s.has_at_least());

        let geometric = ZdScale::geometric(
            "g",
            IntMatrix::diagonal(&[3]),
            IntMatrix::diagonal(&[2]),
        )
        .unwrap();
        let s = supernatural(&geometric).unwrap();
        assert_eq!(s.exponent_at(2), Exponent::Infinite);
        assert_eq!(s.exponent_at(3), Exponent::Finite(1));
        assert_eq!(s.to_string(), "2^inf*3");
    }

    #[test]
    fn type_of_2_15() {
        let t = profinite_type(&diag("s", &[2, 15])).unwrap();
        assert_eq!(t.render(), "Z_2 x Z_3 x Z_5");
        for p in [2u64, 3, 5] {
            assert_eq!(t.rank(p), 1);
            assert_eq!(t.exponents_at(p, 2), vec![Exponent::Finite(0), Exponent::Infinite]);
        }
    }

    #[test]
    fn type_of_6_10() {
        let t = profinite_type(&diag("s", &[6, 10])).unwrap();
        assert_eq!(t.rank(2), 2);
        assert_eq!(t.rank(3), 1);
        assert_eq!(t.rank(5), 1);
        assert_eq!(t.render(), "Z_2 x Z_2 x Z_3 x Z_5");
    }

    #[test]
    fn type_of_shear() {
        let s = ZdScale::geometric(
            "s",
            IntMatrix::identity(2),
            IntMatrix::from_rows(&[vec![2, 1], vec![0, 2]]).unwrap(),
        )
        .unwrap();
        let t = profinite_type(&s).unwrap();
        assert_eq!(t.rank(2), 2);
        assert_eq!(t.torsion_exponents(2), Vec::<u32>::new());
        assert_eq!(t.render(), "Z_2 x Z_2");
    }

    #[test]
    fn type_with_torsion_at_rank_positive_prime() {
        let s = ZdScale::geometric(
            "s",
            IntMatrix::diagonal(&[1, 2]),
            IntMatrix::diagonal(&[2, 5]),
        )
        .unwrap();
        let t = profinite_type(&s).unwrap();
        assert_eq!(
            t.exponents_at(2, 2),
            vec![Exponent::Finite(1), Exponent::Infinite]
        );
        assert_eq!(
            t.exponents_at(5, 2),
            vec![Exponent::Finite(0), Exponent::Infinite]
        );
        assert_eq!(t.render(), "Z/2 x Z_2 x Z_5");
    }

    #[test]
    fn min_generator_counts() {
        assert_eq!(min_generators(&profinite_type(&diag("x", &[6, 10])).unwrap()), Some(2));
        assert_eq!(min_generators(&profinite_type(&diag("y", &[6, 5])).unwrap()), Some(1));
        assert_eq!(min_generators(&profinite_type(&diag("z", &[2, 15])).unwrap()), Some(1));
        let e = ZdScale::explicit("e", vec![IntMatrix::diagonal(&[6])]).unwrap();
        assert_eq!(min_generators(&profinite_type(&e).unwrap()), None);
    }

    #[test]
    fn type_comparisons() {
        let a = profinite_type(&diag("a", &[2, 15])).unwrap();
        let b = profinite_type(&diag("b", &[10, 3])).unwrap();
        assert_eq!(type_equal(&a, &b), Comparison::Equal);
        let x = profinite_type(&diag("x", &[6, 10])).unwrap();
        let y = profinite_type(&diag("y", &[6, 5])).unwrap();
        assert_eq!(type_equal(&x, &y), Comparison::NotEqual);
        // supernaturals of the same pair agree
        assert_eq!(
            supernatural_equal(
                &supernatural(&diag("x", &[6, 10])).unwrap(),
                &supernatural(&diag("y", &[6, 5])).unwrap()
            ),
            Comparison::Equal
        );
    }

    #[test]
    fn cross_dimension_comparison_pads_with_zeros() {
        // 2-adic line as a 1-dim scale vs as a 2-dim scale with inert factor
        let a = profinite_type(&diag("a", &[2])).unwrap();
        let b = profinite_type(&diag("b", &[4])).unwrap();
        assert_eq!(type_equal(&a, &b), Comparison::Equal);
        let c = profinite_type(&diag("c", &[2, 2])).unwrap();
        assert_eq!(type_equal(&a, &c), Comparison::NotEqual);
    }

    #[test]
    fn inconclusive_with_at_least() {
        let e = ZdScale::explicit(
            "e",
            vec![IntMatrix::diagonal(&[2]), IntMatrix::diagonal(&[4])],
        )
        .unwrap();
        let et = profinite_type(&e).unwrap();
        let g = profinite_type(&diag("g", &[2])).unwrap();
        assert_eq!(type_equal(&et, &g), Comparison::Inconclusive);
        let se = supernatural(&e).unwrap();
        let sg = supernatural(&diag("g", &[2])).unwrap();
        assert_eq!(supernatural_equal(&se, &sg), Comparison::Inconclusive);
        // but a finite-vs-lower-bound clash is decisive
        let s3 = supernatural(&diag("h", &[3])).unwrap();
        assert_eq!(supernatural_equal(&se, &s3), Comparison::NotEqual);
    }

    #[test]
    fn supernatural_consistent_with_type() {
        // the supernatural exponent at p is the sum of the type exponents,
        // with infinity absorbing
        let corpus = [
            diag("a", &[2, 15]),
            diag("b", &[6, 10]),
            diag("c", &[6, 5]),
            diag("d", &[10, 3]),
            ZdScale::geometric("e", IntMatrix::diagonal(&[1, 2]), IntMatrix::diagonal(&[2, 5])).unwrap(),
            ZdScale::geometric(
                "f",
                IntMatrix::identity(2),
                IntMatrix::from_rows(&[vec![2, 1], vec![0, 2]]).unwrap(),
            )
            .unwrap(),
            diag("g", &[3]),
        ];
        for s in &corpus {
            let sn = supernatural(s).unwrap();
            let t = profinite_type(s).unwrap();
            let primes: BTreeSet<u64> = sn.primes().chain(t.primes()).collect();
            for p in primes {
                let tuple = t.exponents_at(p, s.dim());
                let expected = if tuple.iter().any(Exponent::is_infinite) {
                    Exponent::Infinite
                } else {
                    Exponent::Finite(
                        tuple
                            .iter()
                            .map(|e| match e {
                                Exponent::Finite(k) => *k,
                                _ => unreachable!(),
                            })
                            .sum(),
                    )
                };
                assert_eq!(sn.exponent_at(p), expected, "{} at {p}", s.name());
            }
        }
    }

    #[test]
    fn rank_matches_divergence_over_extra_levels() {
        // the algebraic rank agrees with the count of elementary-divisor
        // exponents that keep growing well past the stabilization window
        let corpus = [
            diag("a", &[2, 15]),
            diag("b", &[6, 10]),
            diag("c", &[6, 5]),
            ZdScale::geometric("e", IntMatrix::diagonal(&[1, 2]), IntMatrix::diagonal(&[2, 5])).unwrap(),
            ZdScale::geometric(
                "f",
                IntMatrix::identity(2),
                IntMatrix::from_rows(&[vec![2, 1], vec![0, 2]]).unwrap(),
            )
            .unwrap(),
        ];
        for s in &corpus {
            let t = profinite_type(s).unwrap();
            let d = s.dim();
            let (n1, n2) = (12, 12 + 2 * d);
            for p in t.primes() {
                let bp = BigInt::from(p);
                let exps = |n: usize| -> Vec<u32> {
                    snf(&s.gamma(n).unwrap())
                        .unwrap()
                        .elementary_divisors()
                        .iter()
                        .map(|v| crate::lattice::valuation(v, &bp))
                        .collect()
                };
                let (e1, e2) = (exps(n1), exps(n2));
                let grown = e1.iter().zip(&e2).filter(|(a, b)| b > a).count();
                assert_eq!(grown, t.rank(p), "{} at {p}", s.name());
                // the stable bottom agrees with the reported torsion
                let finite = d - t.rank(p);
                let mut reported: Vec<u32> = t
                    .exponents_at(p, d)
                    .iter()
                    .filter_map(|e| match e {
                        Exponent::Finite(k) => Some(*k),
                        _ => None,
                    })
                    .collect();
                reported.sort_unstable();
                assert_eq!(&e1[..finite], &reported[..], "{} at {p}", s.name());
            }
        }
    }

    #[test]
    fn not_stabilized_is_reported_not_guessed() {
        // huge finite 2-torsion from the prefix: the divergent exponent
        // only overtakes it at level 50, past a short budget
        let s = ZdScale::geometric(
            "slow",
            IntMatrix::diagonal(&[1, 1 << 50]),
            IntMatrix::diagonal(&[2, 3]),
        )
        .unwrap();
        match profinite_type_with_budget(&s, 20) {
            Err(InvariantError::NotStabilized { prime: 2, budget: 20 }) => {}
            other => panic!("expected NotStabilized, got {other:?}"),
        }
        let t = profinite_type_with_budget(&s, 60).unwrap();
        assert_eq!(
            t.exponents_at(2, 2),
            vec![Exponent::Finite(50), Exponent::Infinite]
        );
    }

    #[test]
    fn min_generators_monotone_under_cylinder_subgroup() {
        // the cylinder subgroup of a geometric chain has the type of the
        // prefix-free chain; ranks agree and the generator count cannot grow
        let corpus = [
            (IntMatrix::diagonal(&[1, 2]), IntMatrix::diagonal(&[2, 5])),
            (IntMatrix::diagonal(&[3]), IntMatrix::diagonal(&[2])),
            (IntMatrix::identity(2), IntMatrix::diagonal(&[6, 10])),
        ];
        for (prefix, base) in corpus {
            let whole = ZdScale::geometric("w", prefix, base.clone()).unwrap();
            let cylinder = ZdScale::geometric("c", IntMatrix::identity(base.dim()), base).unwrap();
            let tw = profinite_type(&whole).unwrap();
            let tc = profinite_type(&cylinder).unwrap();
            let primes: BTreeSet<u64> = tw.primes().chain(tc.primes()).collect();
            for p in primes {
                assert_eq!(tw.rank(p), tc.rank(p), "ranks are clopen invariants");
            }
            assert!(min_generators(&tc).unwrap() <= min_generators(&tw).unwrap());
        }
    }
}
