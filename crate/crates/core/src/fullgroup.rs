//! Depth-truncated elements of the topological full group of a `Z^d`
//! odometer: piecewise translations constant on level-`n` cylinders with
//! translation data at depth `N`, their composition and inversion, and the
//! canonical factorization into a cell-preserving part and a permutation
//! part exhibiting the semidirect product structure.

use crate::tower::{Coset, QuotientTower, Section, TowerError};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum FullGroupError {
    #[error("tower error: {0}")]
    Tower(#[from] TowerError),
    #[error("elements belong to different towers")]
    TowerMismatch,
    #[error("table is not bijective: cells {cell_a:?} and {cell_b:?} both map onto cell {image:?}")]
    NotBijective {
        cell_a: Vec<BigInt>,
        cell_b: Vec<BigInt>,
        image: Vec<BigInt>,
    },
    #[error("table incomplete: no translation for cell {cell:?}")]
    IncompleteTable { cell: Vec<BigInt> },
    #[error("table lists cell {cell:?} twice")]
    DuplicateCell { cell: Vec<BigInt> },
    #[error("level {level} exceeds depth {depth}")]
    DepthExceeded { level: usize, depth: usize },
    #[error("level mismatch: {left} vs {right}")]
    LevelMismatch { left: usize, right: usize },
    #[error("element document invalid: {0}")]
    Document(String),
}

/// A permutation of `0..n` in one-line notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Self {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            assert!(i < images.len() && !seen[i], "not a permutation");
            seen[i] = true;
        }
        Perm(images)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// `self` after `other`: `(self * other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.len(), other.len());
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn invert(&self) -> Perm {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }
}

/// A level-`n`, depth-`N` piecewise translation: for every level-`n` cell
/// (indexed by rank) a translation given as a level-`N` coset. The induced
/// map on level-`n` cells must be a permutation.
#[derive(Clone)]
pub struct FullGroupElement {
    tower: Arc<QuotientTower>,
    level: usize,
    depth: usize,
    table: Vec<Coset>,
}

impl PartialEq for FullGroupElement {
    fn eq(&self, other: &Self) -> bool {
        self.tower.same_tower(&other.tower)
            && self.level == other.level
            && self.depth == other.depth
            && self.table == other.table
    }
}

impl Eq for FullGroupElement {}

impl std::fmt::Debug for FullGroupElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FullGroupElement")
            .field("level", &self.level)
            .field("depth", &self.depth)
            .field("table", &self.table)
            .finish()
    }
}

impl FullGroupElement {
    /// The single global translation by `xi`, as a level-0 element.
    pub fn translation(tower: &Arc<QuotientTower>, xi: &Coset) -> Result<Self, FullGroupError> {
        if xi.level() != tower.depth() {
            return Err(FullGroupError::LevelMismatch {
                left: xi.level(),
                right: tower.depth(),
            });
        }
        Ok(FullGroupElement {
            tower: tower.clone(),
            level: 0,
            depth: tower.depth(),
            table: vec![xi.clone()],
        })
    }

    pub fn identity(tower: &Arc<QuotientTower>, level: usize, depth: usize) -> Result<Self, FullGroupError> {
        let cells = tower.card_usize(level).map_err(FullGroupError::from)?;
        let zero = tower.identity(depth)?;
        check_levels(level, depth, tower)?;
        Ok(FullGroupElement {
            tower: tower.clone(),
            level,
            depth,
            table: vec![zero; cells],
        })
    }

    /// Builds an element from `(cell, translation)` pairs. The pairs must
    /// cover every level-`level` cell exactly once, and the induced cell
    /// map must be a permutation.
    pub fn from_table(
        tower: &Arc<QuotientTower>,
        level: usize,
        depth: usize,
        pairs: &[(Coset, Coset)],
    ) -> Result<Self, FullGroupError> {
        check_levels(level, depth, tower)?;
        let cells = tower.card_usize(level)?;
        let mut table: Vec<Option<Coset>> = vec![None; cells];
        for (cell, translation) in pairs {
            let cell = tower.coset(level, cell.residue())?;
            let rank = tower.rank(&cell)?;
            if table[rank].is_some() {
                return Err(FullGroupError::DuplicateCell {
                    cell: cell.residue().to_vec(),
                });
            }
            let t = tower.coset(depth, translation.residue())?;
            table[rank] = Some(t);
        }
        if let Some(missing) = table.iter().position(Option::is_none) {
            let cell = tower.coset_by_rank(level, missing)?;
            return Err(FullGroupError::IncompleteTable {
                cell: cell.residue().to_vec(),
            });
        }
        let table: Vec<Coset> = table.into_iter().map(Option::unwrap).collect();
        let elem = FullGroupElement {
            tower: tower.clone(),
            level,
            depth,
            table,
        };
        elem.check_bijective()?;
        Ok(elem)
    }

    fn check_bijective(&self) -> Result<(), FullGroupError> {
        let cells = self.table.len();
        let mut seen: Vec<Option<usize>> = vec![None; cells];
        for rank in 0..cells {
            let image = self.sigma_image(rank)?;
            if let Some(previous) = seen[image] {
                let cell_a = self.tower.coset_by_rank(self.level, previous)?;
                let cell_b = self.tower.coset_by_rank(self.level, rank)?;
                let image = self.tower.coset_by_rank(self.level, image)?;
                return Err(FullGroupError::NotBijective {
                    cell_a: cell_a.residue().to_vec(),
                    cell_b: cell_b.residue().to_vec(),
                    image: image.residue().to_vec(),
                });
            }
            seen[image] = Some(rank);
        }
        Ok(())
    }

    fn sigma_image(&self, rank: usize) -> Result<usize, FullGroupError> {
        let cell = self.tower.coset_by_rank(self.level, rank)?;
        let shift = self.tower.project(&self.table[rank], self.level)?;
        let image = self.tower.add(&cell, &shift)?;
        Ok(self.tower.rank(&image)?)
    }

    pub fn tower(&self) -> &Arc<QuotientTower> {
        &self.tower
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn translations(&self) -> &[Coset] {
        &self.table
    }

    /// The induced permutation of level-`level` cells.
    pub fn sigma(&self) -> Perm {
        let images = (0..self.table.len())
            .map(|rank| self.sigma_image(rank).expect("validated element"))
            .collect();
        Perm::from_images(images)
    }

    /// Image of a level-`depth` coset: `x + t_{cell(x)}`.
    pub fn apply(&self, x: &Coset) -> Result<Coset, FullGroupError> {
        if x.level() != self.depth {
            return Err(FullGroupError::LevelMismatch {
                left: x.level(),
                right: self.depth,
            });
        }
        let cell = self.tower.project(x, self.level)?;
        let rank = self.tower.rank(&cell)?;
        Ok(self.tower.add(x, &self.table[rank])?)
    }

    /// Same map, table refined to a finer level `new_level <= depth`.
    pub fn refine_to_level(&self, new_level: usize) -> Result<Self, FullGroupError> {
        if new_level < self.level {
            return Err(FullGroupError::LevelMismatch {
                left: new_level,
                right: self.level,
            });
        }
        if new_level > self.depth {
            return Err(FullGroupError::DepthExceeded {
                level: new_level,
                depth: self.depth,
            });
        }
        if new_level == self.level {
            return Ok(self.clone());
        }
        let cells = self.tower.card_usize(new_level)?;
        let mut table = Vec::with_capacity(cells);
        for rank in 0..cells {
            let cell = self.tower.coset_by_rank(new_level, rank)?;
            let coarse = self.tower.project(&cell, self.level)?;
            table.push(self.table[self.tower.rank(&coarse)?].clone());
        }
        Ok(FullGroupElement {
            tower: self.tower.clone(),
            level: new_level,
            depth: self.depth,
            table,
        })
    }

    /// One-step refinement along the direct limit.
    pub fn embed(&self) -> Result<Self, FullGroupError> {
        self.refine_to_level(self.level + 1)
    }

    /// Projects all translation data to a shallower depth.
    pub fn truncate_depth(&self, new_depth: usize) -> Result<Self, FullGroupError> {
        if new_depth > self.depth {
            return Err(FullGroupError::DepthExceeded {
                level: new_depth,
                depth: self.depth,
            });
        }
        if new_depth < self.level {
            return Err(FullGroupError::LevelMismatch {
                left: self.level,
                right: new_depth,
            });
        }
        if new_depth == self.depth {
            return Ok(self.clone());
        }
        let table = self
            .table
            .iter()
            .map(|t| self.tower.project(t, new_depth))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FullGroupElement {
            tower: self.tower.clone(),
            level: self.level,
            depth: new_depth,
            table,
        })
    }

    /// True for every valid element: the induced map on level-`depth`
    /// cosets is a bijection, so the uniform measure pushes forward to
    /// itself. Exposed as a runtime assertion for the test suites.
    pub fn is_measure_preserving(&self) -> Result<bool, FullGroupError> {
        let total = self.tower.card_usize(self.depth)?;
        let mut seen = vec![false; total];
        for rank in 0..total {
            let x = self.tower.coset_by_rank(self.depth, rank)?;
            let y = self.apply(&x)?;
            let yr = self.tower.rank(&y)?;
            if seen[yr] {
                return Ok(false);
            }
            seen[yr] = true;
        }
        Ok(true)
    }

    pub fn to_json(&self) -> String {
        let doc = ElementDoc {
            level: self.level,
            depth: self.depth,
            table: (0..self.table.len())
                .map(|rank| {
                    let cell = self.tower.coset_by_rank(self.level, rank).expect("in range");
                    EntryDoc {
                        cell: residue_i64(cell.residue()),
                        translation: residue_i64(self.table[rank].residue()),
                    }
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("element serialization")
    }

    pub fn from_json(tower: &Arc<QuotientTower>, text: &str) -> Result<Self, FullGroupError> {
        let doc: ElementDoc =
            serde_json::from_str(text).map_err(|e| FullGroupError::Document(e.to_string()))?;
        let pairs = doc
            .table
            .iter()
            .map(|e| {
                let cell = tower.coset_i64(doc.level, &e.cell)?;
                let translation = tower.coset_i64(doc.depth, &e.translation)?;
                Ok::<_, TowerError>((cell, translation))
            })
            .collect::<Result<Vec<_>, _>>()?;
        FullGroupElement::from_table(tower, doc.level, doc.depth, &pairs)
    }
}

fn residue_i64(residue: &[BigInt]) -> Vec<i64> {
    residue
        .iter()
        .map(|c| c.to_i64().expect("canonical residues fit i64"))
        .collect()
}

fn check_levels(level: usize, depth: usize, tower: &QuotientTower) -> Result<(), FullGroupError> {
    if depth > tower.depth() {
        return Err(FullGroupError::DepthExceeded {
            level: depth,
            depth: tower.depth(),
        });
    }
    if level > depth {
        return Err(FullGroupError::DepthExceeded { level, depth });
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementDoc {
    level: usize,
    depth: usize,
    table: Vec<EntryDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryDoc {
    cell: Vec<i64>,
    translation: Vec<i64>,
}

/// `g` after `f`. Levels and depths are harmonized: the result lives at
/// level `max(levels)` and depth `min(depths)`.
pub fn compose(
    g: &FullGroupElement,
    f: &FullGroupElement,
) -> Result<FullGroupElement, FullGroupError> {
    if !g.tower.same_tower(&f.tower) {
        return Err(FullGroupError::TowerMismatch);
    }
    let level = g.level.max(f.level);
    let depth = g.depth.min(f.depth);
    let g = g.refine_to_level(level)?.truncate_depth(depth)?;
    let f = f.refine_to_level(level)?.truncate_depth(depth)?;
    let tower = &g.tower;
    let sigma_f = f.sigma();
    let table = (0..f.table.len())
        .map(|rank| tower.add(&f.table[rank], &g.table[sigma_f.apply(rank)]))
        .collect::<Result<Vec<_>, _>>()?;
    let out = FullGroupElement {
        tower: tower.clone(),
        level,
        depth,
        table,
    };
    debug_assert!(out.check_bijective().is_ok());
    Ok(out)
}

/// Inverse element: at cell `sigma(a)` the translation is `-t_a`.
pub fn invert(f: &FullGroupElement) -> Result<FullGroupElement, FullGroupError> {
    let sigma = f.sigma();
    let mut table = vec![None; f.table.len()];
    for rank in 0..f.table.len() {
        table[sigma.apply(rank)] = Some(f.tower.neg(&f.table[rank])?);
    }
    Ok(FullGroupElement {
        tower: f.tower.clone(),
        level: f.level,
        depth: f.depth,
        table: table.into_iter().map(Option::unwrap).collect(),
    })
}

/// The `(phi, sigma)` factorization of an element with respect to a
/// representative section: `sigma` permutes the cells and `phi` stores, per
/// source cell `a`, the kernel part `w_a = rep(a) + t_a - rep(sigma(a))`,
/// which projects to the identity at the cell level.
#[derive(Clone)]
pub struct Decomposition {
    tower: Arc<QuotientTower>,
    level: usize,
    depth: usize,
    sigma: Perm,
    phi: Vec<Coset>,
}

impl PartialEq for Decomposition {
    fn eq(&self, other: &Self) -> bool {
        self.tower.same_tower(&other.tower)
            && self.level == other.level
            && self.depth == other.depth
            && self.sigma == other.sigma
            && self.phi == other.phi
    }
}

impl Eq for Decomposition {}

impl std::fmt::Debug for Decomposition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Decomposition")
            .field("level", &self.level)
            .field("depth", &self.depth)
            .field("sigma", &self.sigma)
            .field("phi", &self.phi)
            .finish()
    }
}

impl Decomposition {
    pub fn sigma(&self) -> &Perm {
        &self.sigma
    }

    pub fn phi(&self) -> &[Coset] {
        &self.phi
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn depth(&self) -> usize {
        self.depth
    }
}

pub fn decompose(
    f: &FullGroupElement,
    reps: &Section,
) -> Result<Decomposition, FullGroupError> {
    if reps.lower() != f.level || reps.upper() != f.depth {
        return Err(FullGroupError::LevelMismatch {
            left: reps.lower(),
            right: f.level,
        });
    }
    let tower = &f.tower;
    let sigma = f.sigma();
    let mut phi = Vec::with_capacity(f.table.len());
    for rank in 0..f.table.len() {
        let w = tower.sub(
            &tower.add(reps.rep(rank), &f.table[rank])?,
            reps.rep(sigma.apply(rank)),
        )?;
        debug_assert!(
            tower.project(&w, f.level).expect("level in range").is_identity(),
            "kernel part must project to the identity"
        );
        phi.push(w);
    }
    Ok(Decomposition {
        tower: tower.clone(),
        level: f.level,
        depth: f.depth,
        sigma,
        phi,
    })
}

pub fn recompose(
    dec: &Decomposition,
    reps: &Section,
) -> Result<FullGroupElement, FullGroupError> {
    if reps.lower() != dec.level || reps.upper() != dec.depth {
        return Err(FullGroupError::LevelMismatch {
            left: reps.lower(),
            right: dec.level,
        });
    }
    let tower = &dec.tower;
    let table = (0..dec.phi.len())
        .map(|rank| {
            tower.sub(
                &tower.add(&dec.phi[rank], reps.rep(dec.sigma.apply(rank)))?,
                reps.rep(rank),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let out = FullGroupElement {
        tower: tower.clone(),
        level: dec.level,
        depth: dec.depth,
        table,
    };
    debug_assert!(out.check_bijective().is_ok());
    Ok(out)
}

/// Product in `(phi, sigma)` coordinates. Matches
/// `decompose(compose(g, f))`: the permutation parts compose and the
/// kernel part of the product at cell `a` is `w^f_a + w^g_{sigma_f(a)}`
/// (the twisting action is a pure coordinate permutation here).
pub fn semidirect_mul(
    g: &Decomposition,
    f: &Decomposition,
) -> Result<Decomposition, FullGroupError> {
    if !g.tower.same_tower(&f.tower) {
        return Err(FullGroupError::TowerMismatch);
    }
    if g.level != f.level || g.depth != f.depth {
        return Err(FullGroupError::LevelMismatch {
            left: g.level,
            right: f.level,
        });
    }
    let tower = &g.tower;
    let sigma = g.sigma.compose(&f.sigma);
    let phi = (0..f.phi.len())
        .map(|rank| tower.add(&f.phi[rank], &g.phi[f.sigma.apply(rank)]))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Decomposition {
        tower: tower.clone(),
        level: g.level,
        depth: g.depth,
        sigma,
        phi,
    })
}

/// Number of level-`level`, depth-`depth` elements:
/// `|Gamma_level / Gamma_depth| ^ cells * cells!`.
pub fn element_count(
    tower: &QuotientTower,
    level: usize,
    depth: usize,
) -> Result<BigInt, TowerError> {
    let cells = tower.cardinality(level)?.clone();
    let kernel = tower.cardinality(depth)? / &cells;
    let c = cells.to_u64().ok_or_else(|| TowerError::SizeGuard {
        needed: cells.clone(),
        bound: tower.enumeration_bound(),
    })?;
    let mut count = BigInt::from(1u8);
    for _ in 0..c {
        count *= &kernel;
    }
    for k in 2..=c {
        count *= BigInt::from(k);
    }
    Ok(count)
}

/// Exhaustive enumeration of all level/depth elements, deterministic order.
/// Guarded by the tower's enumeration bound.
pub fn enumerate_elements(
    tower: &Arc<QuotientTower>,
    level: usize,
    depth: usize,
) -> Result<Vec<FullGroupElement>, FullGroupError> {
    let count = element_count(tower, level, depth)?;
    if count > BigInt::from(tower.enumeration_bound()) {
        return Err(FullGroupError::Tower(TowerError::SizeGuard {
            needed: count,
            bound: tower.enumeration_bound(),
        }));
    }
    let cells = tower.enumerate(level)?;
    let kernel = tower.kernel_cosets(level, depth)?;
    let c = cells.len();
    let mut out = Vec::with_capacity(count.to_usize().unwrap());
    for sigma in permutations(c) {
        // base translation moving cell a onto cell sigma(a)
        let base: Vec<Coset> = (0..c)
            .map(|a| {
                let diff: Vec<BigInt> = cells[sigma[a]]
                    .residue()
                    .iter()
                    .zip(cells[a].residue())
                    .map(|(s, a)| s - a)
                    .collect();
                tower.coset(depth, &diff)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut digits = vec![0usize; c];
        loop {
            let table = (0..c)
                .map(|a| tower.add(&base[a], &kernel[digits[a]]))
                .collect::<Result<Vec<_>, _>>()?;
            out.push(FullGroupElement {
                tower: tower.clone(),
                level,
                depth,
                table,
            });
            let mut k = c;
            let mut done = false;
            loop {
                if k == 0 {
                    done = true;
                    break;
                }
                k -= 1;
                digits[k] += 1;
                if digits[k] < kernel.len() {
                    break;
                }
                digits[k] = 0;
                if k == 0 {
                    done = true;
                    break;
                }
            }
            if done {
                break;
            }
        }
    }
    debug_assert_eq!(BigInt::from(out.len()), count);
    Ok(out)
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // next_permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
    }
}
