//! Finite quotient towers: the computable shadow of an odometer.
//!
//! A [`QuotientTower`] holds the quotients `Z^d / Gamma_n` of a scale up to
//! a fixed depth, with coset arithmetic in canonical-residue form, the
//! projections between levels, representative sections and the uniform
//! measure. [`FiniteGroupTower`] is the analogous structure for arbitrary
//! finite groups given by multiplication tables; it exists for the
//! brute-force oracle and carries the non-abelian examples.

use crate::lattice::{column_hnf, snf, ColumnHnf, IntMatrix, SnfData};
use crate::scale::{ScaleError, ZdScale};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::sync::Arc;

pub const DEFAULT_ENUMERATION_BOUND: u64 = 20_000;
const TABLE_BOUND: usize = 4096;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum TowerError {
    #[error("scale error: {0}")]
    Scale(#[from] ScaleError),
    #[error("depth {requested} exceeds represented depth {depth}")]
    DepthExceeded { requested: usize, depth: usize },
    #[error("level mismatch: {left} vs {right}")]
    LevelMismatch { left: usize, right: usize },
    #[error("size guard: needed {needed} elements, bound is {bound}")]
    SizeGuard { needed: BigInt, bound: u64 },
    #[error("connecting map at level {level} is not a homomorphism")]
    NotAHomomorphism { level: usize },
    #[error("connecting map at level {level} is not surjective")]
    NotSurjective { level: usize },
    #[error("invalid group table: {0}")]
    InvalidTable(String),
}

/// A level-`n` coset of `Gamma_n` in canonical-residue form: the residue is
/// the unique representative inside the fundamental box of the column
/// Hermite form of `Gamma_n`. Equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coset {
    level: usize,
    residue: Vec<BigInt>,
}

impl Coset {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn residue(&self) -> &[BigInt] {
        &self.residue
    }

    pub fn is_identity(&self) -> bool {
        self.residue.iter().all(Zero::is_zero)
    }
}

struct LevelData {
    gamma: IntMatrix,
    hnf: ColumnHnf,
    snf: SnfData,
    cardinality: BigInt,
}

/// Quotients `Z^d / Gamma_n` for `0 <= n <= depth`, with coset arithmetic.
pub struct QuotientTower {
    scale: ZdScale,
    depth: usize,
    levels: Vec<LevelData>,
    enumeration_bound: u64,
}

impl QuotientTower {
    pub fn build(scale: &ZdScale, depth: usize) -> Result<Arc<Self>, TowerError> {
        Self::build_with_bound(scale, depth, DEFAULT_ENUMERATION_BOUND)
    }

    pub fn build_with_bound(
        scale: &ZdScale,
        depth: usize,
        enumeration_bound: u64,
    ) -> Result<Arc<Self>, TowerError> {
        if let Some(max) = scale.max_depth() {
            if depth > max {
                return Err(TowerError::DepthExceeded {
                    requested: depth,
                    depth: max,
                });
            }
        }
        let mut levels = Vec::with_capacity(depth + 1);
        for n in 0..=depth {
            let gamma = scale.gamma(n)?;
            let hnf = column_hnf(&gamma).map_err(ScaleError::from)?;
            let snf = snf(&gamma).map_err(ScaleError::from)?;
            let cardinality = scale.index(n)?;
            levels.push(LevelData {
                gamma,
                hnf,
                snf,
                cardinality,
            });
        }
        Ok(Arc::new(QuotientTower {
            scale: scale.clone(),
            depth,
            levels,
            enumeration_bound,
        }))
    }

    pub fn scale(&self) -> &ZdScale {
        &self.scale
    }

    pub fn dim(&self) -> usize {
        self.scale.dim()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn enumeration_bound(&self) -> u64 {
        self.enumeration_bound
    }

    /// Two towers are compatible when they shadow the same scale to the
    /// same depth.
    pub fn same_tower(&self, other: &QuotientTower) -> bool {
        self.scale == other.scale && self.depth == other.depth
    }

    fn level_data(&self, n: usize) -> Result<&LevelData, TowerError> {
        self.levels.get(n).ok_or(TowerError::DepthExceeded {
            requested: n,
            depth: self.depth,
        })
    }

    pub fn gamma(&self, n: usize) -> Result<&IntMatrix, TowerError> {
        Ok(&self.level_data(n)?.gamma)
    }

    pub fn cardinality(&self, n: usize) -> Result<&BigInt, TowerError> {
        Ok(&self.level_data(n)?.cardinality)
    }

    /// Elementary divisors of `Gamma_n`, presenting the quotient as a
    /// direct sum of cyclic groups.
    pub fn elementary_divisors(&self, n: usize) -> Result<Vec<BigInt>, TowerError> {
        Ok(self.level_data(n)?.snf.elementary_divisors())
    }

    /// Canonical coset of an arbitrary integer vector at the given level.
    pub fn coset(&self, level: usize, v: &[BigInt]) -> Result<Coset, TowerError> {
        let data = self.level_data(level)?;
        Ok(Coset {
            level,
            residue: data.hnf.reduce(v),
        })
    }

    pub fn coset_i64(&self, level: usize, v: &[i64]) -> Result<Coset, TowerError> {
        let big: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        self.coset(level, &big)
    }

    pub fn identity(&self, level: usize) -> Result<Coset, TowerError> {
        self.coset(level, &vec![BigInt::zero(); self.dim()])
    }

    pub fn add(&self, a: &Coset, b: &Coset) -> Result<Coset, TowerError> {
        if a.level != b.level {
            return Err(TowerError::LevelMismatch {
                left: a.level,
                right: b.level,
            });
        }
        let sum: Vec<BigInt> = a.residue.iter().zip(&b.residue).map(|(x, y)| x + y).collect();
        self.coset(a.level, &sum)
    }

    pub fn neg(&self, a: &Coset) -> Result<Coset, TowerError> {
        let neg: Vec<BigInt> = a.residue.iter().map(|x| -x).collect();
        self.coset(a.level, &neg)
    }

    pub fn sub(&self, a: &Coset, b: &Coset) -> Result<Coset, TowerError> {
        self.add(a, &self.neg(b)?)
    }

    /// Projection to a coarser level `m <= level(a)`.
    pub fn project(&self, a: &Coset, m: usize) -> Result<Coset, TowerError> {
        if m > a.level {
            return Err(TowerError::LevelMismatch {
                left: a.level,
                right: m,
            });
        }
        self.coset(m, &a.residue)
    }

    /// Coordinates of a coset in the elementary-divisor presentation
    /// `Z/d_1 + ... + Z/d_k` (a derived view; residues stay canonical).
    pub fn snf_coordinates(&self, a: &Coset) -> Result<Vec<BigInt>, TowerError> {
        let data = self.level_data(a.level)?;
        let w = data.snf.u.mul_vec(&a.residue);
        Ok(w
            .iter()
            .zip(data.snf.elementary_divisors())
            .map(|(x, d)| {
                use num_integer::Integer;
                x.mod_floor(&d)
            })
            .collect())
    }

    fn box_sizes_u64(&self, level: usize) -> Result<Vec<u64>, TowerError> {
        let data = self.level_data(level)?;
        if data.cardinality > BigInt::from(self.enumeration_bound) {
            return Err(TowerError::SizeGuard {
                needed: data.cardinality.clone(),
                bound: self.enumeration_bound,
            });
        }
        Ok(data
            .hnf
            .box_sizes()
            .iter()
            .map(|b| b.to_u64().expect("box size fits u64 under the guard"))
            .collect())
    }

    /// Number of cosets at an enumerable level, as usize.
    pub fn card_usize(&self, level: usize) -> Result<usize, TowerError> {
        let sizes = self.box_sizes_u64(level)?;
        Ok(sizes.iter().product::<u64>() as usize)
    }

    /// All cosets of an enumerable level in lexicographic residue order
    /// (the identity first).
    pub fn enumerate(&self, level: usize) -> Result<Vec<Coset>, TowerError> {
        let sizes = self.box_sizes_u64(level)?;
        let total: u64 = sizes.iter().product();
        let mut out = Vec::with_capacity(total as usize);
        let mut digits = vec![0u64; sizes.len()];
        loop {
            out.push(Coset {
                level,
                residue: digits.iter().map(|&d| BigInt::from(d)).collect(),
            });
            let mut k = sizes.len();
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                digits[k] += 1;
                if digits[k] < sizes[k] {
                    break;
                }
                digits[k] = 0;
                if k == 0 {
                    return Ok(out);
                }
            }
        }
    }

    /// Lexicographic rank of a coset within its level.
    pub fn rank(&self, a: &Coset) -> Result<usize, TowerError> {
        let sizes = self.box_sizes_u64(a.level)?;
        let mut rank = 0u64;
        for (digit, size) in a.residue.iter().zip(&sizes) {
            let d = digit.to_u64().expect("canonical residue fits its box");
            rank = rank * size + d;
        }
        Ok(rank as usize)
    }

    pub fn coset_by_rank(&self, level: usize, rank: usize) -> Result<Coset, TowerError> {
        let sizes = self.box_sizes_u64(level)?;
        let mut rank = rank as u64;
        let mut residue = vec![BigInt::zero(); sizes.len()];
        for k in (0..sizes.len()).rev() {
            residue[k] = BigInt::from(rank % sizes[k]);
            rank /= sizes[k];
        }
        Ok(Coset { level, residue })
    }

    /// Representative section: one level-`upper` coset per level-`lower`
    /// coset, indexed by the rank of the latter. Contains the identity and
    /// is deterministic (canonical residues in lexicographic order).
    pub fn section(&self, lower: usize, upper: usize) -> Result<Section, TowerError> {
        if lower > upper {
            return Err(TowerError::LevelMismatch {
                left: lower,
                right: upper,
            });
        }
        let reps = self
            .enumerate(lower)?
            .into_iter()
            .map(|c| self.coset(upper, &c.residue))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Section {
            lower,
            upper,
            reps,
        })
    }

    /// The subgroup `Gamma_lower / Gamma_upper` inside the level-`upper`
    /// quotient, in a deterministic order with the identity first.
    pub fn kernel_cosets(&self, lower: usize, upper: usize) -> Result<Vec<Coset>, TowerError> {
        if lower > upper {
            return Err(TowerError::LevelMismatch {
                left: lower,
                right: upper,
            });
        }
        let g_low = &self.level_data(lower)?.gamma;
        let g_up = &self.level_data(upper)?.gamma;
        let ratio = (&self.level_data(upper)?.cardinality / &self.level_data(lower)?.cardinality)
            .to_u64()
            .filter(|&r| r <= self.enumeration_bound)
            .ok_or_else(|| TowerError::SizeGuard {
                needed: self.level_data(upper).unwrap().cardinality.clone(),
                bound: self.enumeration_bound,
            })?;
        // Gamma_lower / Gamma_upper = g_low * (Z^d / C Z^d) with C = g_low^-1 g_up
        let quotient_matrix = {
            let mut c = IntMatrix::zero(self.dim());
            for col in 0..self.dim() {
                let v: Vec<BigInt> = (0..self.dim()).map(|row| g_up[(row, col)].clone()).collect();
                let x = crate::lattice::solve_integral(g_low, &v)
                    .map_err(ScaleError::from)?
                    .expect("nesting guarantees integral solution");
                for row in 0..self.dim() {
                    c[(row, col)] = x[row].clone();
                }
            }
            c
        };
        let hnf = column_hnf(&quotient_matrix).map_err(ScaleError::from)?;
        let sizes: Vec<u64> = hnf
            .box_sizes()
            .iter()
            .map(|b| b.to_u64().expect("kernel box fits u64 under the guard"))
            .collect();
        let mut out = Vec::with_capacity(ratio as usize);
        let mut digits = vec![0u64; sizes.len()];
        'outer: loop {
            let x: Vec<BigInt> = digits.iter().map(|&d| BigInt::from(d)).collect();
            out.push(self.coset(upper, &g_low.mul_vec(&x))?);
            let mut k = sizes.len();
            loop {
                if k == 0 {
                    break 'outer;
                }
                k -= 1;
                digits[k] += 1;
                if digits[k] < sizes[k] {
                    break;
                }
                digits[k] = 0;
                if k == 0 {
                    break 'outer;
                }
            }
        }
        debug_assert_eq!(out.len() as u64, ratio);
        out.sort();
        out.dedup();
        debug_assert_eq!(out.len() as u64, ratio, "kernel enumeration must not collide");
        Ok(out)
    }

    /// Haar measure of a level-`n` cylinder: exactly `1 / [Z^d : Gamma_n]`.
    pub fn uniform_measure(&self, a: &Coset) -> Result<BigRational, TowerError> {
        let card = self.cardinality(a.level)?;
        Ok(BigRational::new(BigInt::one(), card.clone()))
    }
}

/// Representatives of the level-`lower` cosets at level `upper`.
#[derive(Clone, Debug)]
pub struct Section {
    lower: usize,
    upper: usize,
    reps: Vec<Coset>,
}

impl Section {
    pub fn lower(&self) -> usize {
        self.lower
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    pub fn reps(&self) -> &[Coset] {
        &self.reps
    }

    pub fn rep(&self, rank: usize) -> &Coset {
        &self.reps[rank]
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// A finite group given by its multiplication table.
#[derive(Clone)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    identity: u32,
    abelian: bool,
}

impl FiniteGroup {
    pub fn from_mul_table(name: &str, table: Vec<Vec<u32>>) -> Result<Self, TowerError> {
        let order = table.len();
        if order == 0 || table.iter().any(|r| r.len() != order) {
            return Err(TowerError::InvalidTable("table must be square".into()));
        }
        let mut flat = Vec::with_capacity(order * order);
        for row in &table {
            for &x in row {
                if x as usize >= order {
                    return Err(TowerError::InvalidTable("entry out of range".into()));
                }
                flat.push(x);
            }
        }
        // locate the two-sided identity
        let identity = (0..order as u32)
            .find(|&e| {
                (0..order as u32)
                    .all(|x| flat[(e as usize) * order + x as usize] == x && flat[(x as usize) * order + e as usize] == x)
            })
            .ok_or_else(|| TowerError::InvalidTable("no identity element".into()))?;
        let mut inv = vec![u32::MAX; order];
        for a in 0..order {
            match (0..order).find(|&b| flat[a * order + b] == identity && flat[b * order + a] == identity) {
                Some(b) => inv[a] = b as u32,
                None => return Err(TowerError::InvalidTable(format!("element {a} has no inverse"))),
            }
        }
        if order <= 128 {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        let ab_c = flat[flat[a * order + b] as usize * order + c];
                        let a_bc = flat[a * order + flat[b * order + c] as usize];
                        if ab_c != a_bc {
                            return Err(TowerError::InvalidTable(format!(
                                "associativity fails at ({a},{b},{c})"
                            )));
                        }
                    }
                }
            }
        }
        let abelian =
            (0..order).all(|a| (0..order).all(|b| flat[a * order + b] == flat[b * order + a]));
        Ok(FiniteGroup {
            name: name.to_string(),
            order,
            mul: flat,
            inv,
            identity,
            abelian,
        })
    }

    pub fn cyclic(n: usize) -> Self {
        let table: Vec<Vec<u32>> = (0..n)
            .map(|a| (0..n).map(|b| ((a + b) % n) as u32).collect())
            .collect();
        FiniteGroup::from_mul_table(&format!("Z/{n}"), table).expect("cyclic table is a group")
    }

    /// Symmetric group on `n` letters (small n), elements ordered by the
    /// lexicographic order of their one-line notation.
    pub fn symmetric(n: usize) -> Self {
        assert!(n <= 5, "symmetric-group tables are built for n <= 5 only");
        let mut perms: Vec<Vec<u8>> = vec![vec![]];
        for _ in 0..n {
            perms = perms
                .into_iter()
                .flat_map(|p| {
                    (0..n as u8).filter_map(move |x| {
                        if p.contains(&x) {
                            None
                        } else {
                            let mut q = p.clone();
                            q.push(x);
                            Some(q)
                        }
                    })
                })
                .collect();
        }
        perms.sort();
        let index = |p: &Vec<u8>| perms.binary_search(p).unwrap() as u32;
        let table: Vec<Vec<u32>> = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| {
                        // (a*b)(x) = a(b(x))
                        let prod: Vec<u8> = (0..n).map(|x| a[b[x] as usize]).collect();
                        index(&prod)
                    })
                    .collect()
            })
            .collect();
        FiniteGroup::from_mul_table(&format!("Sym({n})"), table).expect("symmetric table is a group")
    }

    /// Heisenberg group over `Z/q`: triples `(a,b,c)` with
    /// `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+a*b')`.
    pub fn heisenberg(q: u64) -> Result<Self, TowerError> {
        let order = (q * q * q) as usize;
        if order > TABLE_BOUND {
            return Err(TowerError::SizeGuard {
                needed: BigInt::from(order),
                bound: TABLE_BOUND as u64,
            });
        }
        let code = |a: u64, b: u64, c: u64| (a * q * q + b * q + c) as u32;
        let mut table = vec![vec![0u32; order]; order];
        for a in 0..q {
            for b in 0..q {
                for c in 0..q {
                    let x = code(a, b, c) as usize;
                    for a2 in 0..q {
                        for b2 in 0..q {
                            for c2 in 0..q {
                                let y = code(a2, b2, c2) as usize;
                                table[x][y] =
                                    code((a + a2) % q, (b + b2) % q, (c + c2 + a * b2) % q);
                            }
                        }
                    }
                }
            }
        }
        FiniteGroup::from_mul_table(&format!("H3(Z/{q})"), table)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.order + b as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    pub fn center(&self) -> Vec<u32> {
        (0..self.order as u32)
            .filter(|&z| (0..self.order as u32).all(|x| self.mul(z, x) == self.mul(x, z)))
            .collect()
    }
}

/// A chain `Q_1 <- Q_2 <- ... <- Q_m` of finite groups with verified
/// surjective connecting homomorphisms. Levels are one-based.
pub struct FiniteGroupTower {
    groups: Vec<FiniteGroup>,
    maps: Vec<Vec<u32>>, // maps[i]: groups[i+1] -> groups[i]
    kernels: Vec<Vec<u32>>,
    abelian: bool,
}

impl FiniteGroupTower {
    pub fn new(groups: Vec<FiniteGroup>, maps: Vec<Vec<u32>>) -> Result<Self, TowerError> {
        assert_eq!(maps.len() + 1, groups.len(), "one map per adjacent pair");
        let mut kernels = Vec::with_capacity(maps.len());
        for (i, map) in maps.iter().enumerate() {
            let src = &groups[i + 1];
            let dst = &groups[i];
            if map.len() != src.order() {
                return Err(TowerError::InvalidTable(format!(
                    "connecting map at level {} has wrong domain",
                    i + 1
                )));
            }
            for a in 0..src.order() as u32 {
                for b in 0..src.order() as u32 {
                    if map[src.mul(a, b) as usize] != dst.mul(map[a as usize], map[b as usize]) {
                        return Err(TowerError::NotAHomomorphism { level: i + 1 });
                    }
                }
            }
            let mut hit = vec![false; dst.order()];
            for &y in map {
                hit[y as usize] = true;
            }
            if hit.iter().any(|h| !h) {
                return Err(TowerError::NotSurjective { level: i + 1 });
            }
            kernels.push(
                (0..src.order() as u32)
                    .filter(|&x| map[x as usize] == dst.identity())
                    .collect(),
            );
        }
        let abelian = groups.iter().all(FiniteGroup::is_abelian);
        Ok(FiniteGroupTower {
            groups,
            maps,
            kernels,
            abelian,
        })
    }

    /// Heisenberg tower `H3(Z/p) <- H3(Z/p^2) <- ... <- H3(Z/p^m)`.
    pub fn heisenberg(p: u64, m: usize) -> Result<Self, TowerError> {
        assert!(m >= 1);
        let mut groups = Vec::with_capacity(m);
        let mut qs = Vec::with_capacity(m);
        let mut q = 1u64;
        for _ in 0..m {
            q *= p;
            qs.push(q);
            groups.push(FiniteGroup::heisenberg(q)?);
        }
        let mut maps = Vec::with_capacity(m.saturating_sub(1));
        for k in 0..m - 1 {
            let (q_small, q_big) = (qs[k], qs[k + 1]);
            let mut map = Vec::with_capacity((q_big * q_big * q_big) as usize);
            for a in 0..q_big {
                for b in 0..q_big {
                    for c in 0..q_big {
                        map.push(
                            ((a % q_small) * q_small * q_small
                                + (b % q_small) * q_small
                                + (c % q_small)) as u32,
                        );
                    }
                }
            }
            maps.push(map);
        }
        FiniteGroupTower::new(groups, maps)
    }

    /// Abelian tower built from the quotients of a `Z^d` scale, for use as
    /// an independent finite model in the oracle.
    pub fn from_zd_scale(scale: &ZdScale, depth: usize, bound: u64) -> Result<Self, TowerError> {
        assert!(depth >= 1);
        let tower = QuotientTower::build_with_bound(scale, depth, bound)?;
        let mut groups = Vec::with_capacity(depth);
        let mut maps = Vec::with_capacity(depth - 1);
        for n in 1..=depth {
            let cosets = tower.enumerate(n)?;
            if cosets.len() > TABLE_BOUND {
                return Err(TowerError::SizeGuard {
                    needed: BigInt::from(cosets.len()),
                    bound: TABLE_BOUND as u64,
                });
            }
            let table: Vec<Vec<u32>> = cosets
                .iter()
                .map(|a| {
                    cosets
                        .iter()
                        .map(|b| tower.rank(&tower.add(a, b).unwrap()).unwrap() as u32)
                        .collect()
                })
                .collect();
            groups.push(FiniteGroup::from_mul_table(
                &format!("{}/{n}", scale.name()),
                table,
            )?);
            if n > 1 {
                let map = cosets
                    .iter()
                    .map(|c| tower.rank(&tower.project(c, n - 1).unwrap()).unwrap() as u32)
                    .collect();
                maps.push(map);
            }
        }
        FiniteGroupTower::new(groups, maps)
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    /// One-based level access.
    pub fn group(&self, level: usize) -> &FiniteGroup {
        &self.groups[level - 1]
    }

    /// Kernel of the connecting map into level `level` from level `level+1`.
    pub fn kernel(&self, level: usize) -> &[u32] {
        &self.kernels[level - 1]
    }

    /// Composition of connecting maps from `upper` down to `lower`.
    pub fn composed_map(&self, lower: usize, upper: usize) -> Vec<u32> {
        assert!(1 <= lower && lower <= upper && upper <= self.groups.len());
        let mut map: Vec<u32> = (0..self.group(upper).order() as u32).collect();
        for level in (lower..upper).rev() {
            let step = &self.maps[level - 1];
            map = map.into_iter().map(|x| step[x as usize]).collect();
        }
        map
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scale::ZdScale;

    fn two_adic(depth: usize) -> Arc<QuotientTower> {
        let s = ZdScale::diagonal("2-adic", &[2]).unwrap();
        QuotientTower::build(&s, depth).unwrap()
    }

    #[test]
    fn build_cardinalities() {
        let s = ZdScale::diagonal("s", &[2, 15]).unwrap();
        let t = QuotientTower::build(&s, 2).unwrap();
        assert_eq!(t.cardinality(1).unwrap(), &BigInt::from(30));
        assert_eq!(t.cardinality(2).unwrap(), &BigInt::from(900));
        let t = two_adic(3);
        let cards: Vec<u64> = (1..=3)
            .map(|n| t.cardinality(n).unwrap().to_u64().unwrap())
            .collect();
        assert_eq!(cards, vec![2, 4, 8]);
    }

    #[test]
    fn level_one_of_6_10_is_z2_x_z30() {
        let s = ZdScale::diagonal("s", &[6, 10]).unwrap();
        let t = QuotientTower::build(&s, 1).unwrap();
        let divisors: Vec<u64> = t
            .elementary_divisors(1)
            .unwrap()
            .iter()
            .map(|d| d.to_u64().unwrap())
            .collect();
        assert_eq!(divisors, vec![2, 30]);
    }

    #[test]
    fn coset_arithmetic_mod_2_30() {
        // level-1 tower of diag(2,30): componentwise arithmetic
        let s = ZdScale::diagonal("s", &[2, 30]).unwrap();
        let t = QuotientTower::build(&s, 1).unwrap();
        let a = t.coset_i64(1, &[1, 29]).unwrap();
        let b = t.coset_i64(1, &[1, 1]).unwrap();
        assert!(t.add(&a, &b).unwrap().is_identity());
        let c = t.coset_i64(1, &[1, 1]).unwrap();
        assert_eq!(t.neg(&c).unwrap(), t.coset_i64(1, &[1, 29]).unwrap());
    }

    #[test]
    fn projection_is_homomorphism() {
        let s = ZdScale::diagonal("s", &[2, 30]).unwrap();
        let t = QuotientTower::build(&s, 2).unwrap();
        let a = t.coset_i64(2, &[1, 17]).unwrap();
        let b = t.coset_i64(2, &[0, 1]).unwrap();
        let lhs = t.add(&t.project(&a, 1).unwrap(), &t.project(&b, 1).unwrap()).unwrap();
        let rhs = t.project(&t.add(&a, &b).unwrap(), 1).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn coset_laws_random() {
        let s = ZdScale::geometric(
            "s",
            IntMatrix::identity(2),
            IntMatrix::from_rows(&[vec![2, 1], vec![0, 2]]).unwrap(),
        )
        .unwrap();
        let t = QuotientTower::build(&s, 2).unwrap();
        let cosets = t.enumerate(2).unwrap();
        for (i, a) in cosets.iter().enumerate().step_by(3) {
            for (j, b) in cosets.iter().enumerate().step_by(4) {
                let ab = t.add(a, b).unwrap();
                let ba = t.add(b, a).unwrap();
                assert_eq!(ab, ba, "commutativity at ({i},{j})");
                for c in cosets.iter().step_by(5) {
                    let l = t.add(&ab, c).unwrap();
                    let r = t.add(a, &t.add(b, c).unwrap()).unwrap();
                    assert_eq!(l, r, "associativity");
                }
                assert!(t.add(a, &t.neg(a).unwrap()).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn section_two_adic() {
        let t = two_adic(2);
        let sec = t.section(1, 2).unwrap();
        let reps: Vec<i64> = sec
            .reps()
            .iter()
            .map(|c| c.residue()[0].to_i64().unwrap())
            .collect();
        assert_eq!(reps, vec![0, 1]);
    }

    #[test]
    fn section_n_equals_depth() {
        let s = ZdScale::diagonal("s", &[6, 10]).unwrap();
        let t = QuotientTower::build(&s, 1).unwrap();
        let sec = t.section(1, 1).unwrap();
        assert_eq!(sec.len(), 60);
        assert!(sec.rep(0).is_identity(), "identity first");
    }

    #[test]
    fn section_explicit_chain() {
        let s = ZdScale::explicit(
            "s",
            vec![
                IntMatrix::diagonal(&[6]),
                IntMatrix::diagonal(&[12]),
                IntMatrix::diagonal(&[24]),
            ],
        )
        .unwrap();
        let t = QuotientTower::build(&s, 3).unwrap();
        let sec = t.section(1, 3).unwrap();
        assert_eq!(sec.len(), 6);
        let mut mods: Vec<i64> = sec
            .reps()
            .iter()
            .map(|c| c.residue()[0].to_i64().unwrap() % 6)
            .collect();
        mods.sort();
        assert_eq!(mods, vec![0, 1, 2, 3, 4, 5], "distinct mod-6 residues");
        // projections exhaust level 1
        let mut projected: Vec<usize> = sec
            .reps()
            .iter()
            .map(|c| t.rank(&t.project(c, 1).unwrap()).unwrap())
            .collect();
        projected.sort();
        assert_eq!(projected, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn fiber_sizes_match_index_ratio() {
        let s = ZdScale::diagonal("s", &[2, 3]).unwrap();
        let t = QuotientTower::build(&s, 2).unwrap();
        let upper = t.enumerate(2).unwrap();
        let mut fiber_counts = vec![0usize; t.card_usize(1).unwrap()];
        for c in &upper {
            fiber_counts[t.rank(&t.project(c, 1).unwrap()).unwrap()] += 1;
        }
        assert!(fiber_counts.iter().all(|&f| f == 6), "all fibers have size [G1:G2]");
    }

    #[test]
    fn measures() {
        let s = ZdScale::diagonal("s", &[2, 15]).unwrap();
        let t = QuotientTower::build(&s, 1).unwrap();
        let a = t.identity(1).unwrap();
        assert_eq!(
            t.uniform_measure(&a).unwrap(),
            BigRational::new(BigInt::one(), BigInt::from(30))
        );
        let whole = t.identity(0).unwrap();
        assert_eq!(t.uniform_measure(&whole).unwrap(), BigRational::one());
        // sums to 1 over a level, and translation-invariant
        let cosets = t.enumerate(1).unwrap();
        let total: BigRational = cosets
            .iter()
            .map(|c| t.uniform_measure(c).unwrap())
            .sum();
        assert_eq!(total, BigRational::one());
        let shift = t.coset_i64(1, &[1, 7]).unwrap();
        for c in cosets.iter().step_by(7) {
            let shifted = t.add(c, &shift).unwrap();
            assert_eq!(t.uniform_measure(c).unwrap(), t.uniform_measure(&shifted).unwrap());
        }
    }

    #[test]
    fn measure_level_one_of_6_10() {
        let s = ZdScale::diagonal("s", &[6, 10]).unwrap();
        let t = QuotientTower::build(&s, 1).unwrap();
        assert_eq!(
            t.uniform_measure(&t.identity(1).unwrap()).unwrap(),
            BigRational::new(BigInt::one(), BigInt::from(60))
        );
    }

    #[test]
    fn kernel_cosets_two_adic() {
        let t = two_adic(3);
        let k = t.kernel_cosets(1, 3).unwrap();
        let vals: Vec<i64> = k.iter().map(|c| c.residue()[0].to_i64().unwrap()).collect();
        assert_eq!(vals, vec![0, 2, 4, 6]);
        for c in &k {
            assert!(t.project(c, 1).unwrap().is_identity());
        }
    }

    #[test]
    fn snf_coordinates_view() {
        let s = ZdScale::diagonal("s", &[6, 10]).unwrap();
        let t = QuotientTower::build(&s, 1).unwrap();
        // the coordinate map must be additive and hit the divisor moduli
        let a = t.coset_i64(1, &[1, 3]).unwrap();
        let b = t.coset_i64(1, &[4, 2]).unwrap();
        let ca = t.snf_coordinates(&a).unwrap();
        let cb = t.snf_coordinates(&b).unwrap();
        let cab = t.snf_coordinates(&t.add(&a, &b).unwrap()).unwrap();
        let divisors = t.elementary_divisors(1).unwrap();
        for i in 0..2 {
            use num_integer::Integer;
            assert_eq!((&ca[i] + &cb[i]).mod_floor(&divisors[i]), cab[i]);
        }
    }

    #[test]
    fn size_guard_fires() {
        let s = ZdScale::diagonal("s", &[100, 300]).unwrap();
        let t = QuotientTower::build(&s, 2).unwrap();
        assert!(matches!(
            t.enumerate(2).unwrap_err(),
            TowerError::SizeGuard { .. }
        ));
    }

    #[test]
    fn heisenberg_basics() {
        let g = FiniteGroup::heisenberg(2).unwrap();
        assert_eq!(g.order(), 8);
        assert!(!g.is_abelian());
        // (1,0,0)(0,1,0) != (0,1,0)(1,0,0)
        let x = 4u32; // (1,0,0)
        let y = 2u32; // (0,1,0)
        assert_ne!(g.mul(x, y), g.mul(y, x));
        assert_eq!(g.center().len(), 2);
    }

    #[test]
    fn heisenberg_tower_maps() {
        let t = FiniteGroupTower::heisenberg(2, 2).unwrap();
        assert_eq!(t.group(1).order(), 8);
        assert_eq!(t.group(2).order(), 64);
        assert_eq!(t.kernel(1).len(), 8);
        assert!(!t.is_abelian());
        let map = t.composed_map(1, 2);
        let mut hit = [false; 8];
        for &y in &map {
            hit[y as usize] = true;
        }
        assert!(hit.iter().all(|&h| h));
    }

    #[test]
    fn abelian_tower_from_scale() {
        let s = ZdScale::diagonal("s", &[2, 3]).unwrap();
        let t = FiniteGroupTower::from_zd_scale(&s, 2, 20_000).unwrap();
        assert!(t.is_abelian());
        assert_eq!(t.group(1).order(), 6);
        assert_eq!(t.group(2).order(), 36);
        assert_eq!(t.kernel(1).len(), 6);
    }

    #[test]
    fn symmetric_group_table() {
        let s3 = FiniteGroup::symmetric(3);
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
        assert_eq!(s3.center().len(), 1);
    }
}
