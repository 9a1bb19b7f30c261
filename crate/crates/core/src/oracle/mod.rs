//! Brute-force validation of the structural identities behind the library
//! on small finite models, including the non-abelian left/right theory.
//!
//! Every check returns a [`CheckReport`] that records whether it ran
//! exhaustively or in a seeded sampling mode.

pub mod pgroup;

use crate::fullgroup::{self, permutations, FullGroupElement};
use crate::scale::ZdScale;
use crate::tower::{FiniteGroup, FiniteGroupTower, QuotientTower, TowerError};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::collections::{HashMap, HashSet};

pub const DEFAULT_SEED: u64 = 0x5CA1E;
pub const DEFAULT_SAMPLES: usize = 10_000;
const EXHAUSTIVE_PAIR_LIMIT: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Sampled { seed: u64, samples: usize },
}

impl Mode {
    fn to_json(&self) -> Value {
        match self {
            Mode::Exhaustive => json!("exhaustive"),
            Mode::Sampled { seed, samples } => json!({"sampled": {"seed": seed, "samples": samples}}),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub name: String,
    pub pass: bool,
    pub mode: Mode,
    pub details: Vec<String>,
}

impl CheckReport {
    fn pass(name: &str, mode: Mode) -> Self {
        CheckReport {
            name: name.to_string(),
            pass: true,
            mode,
            details: Vec::new(),
        }
    }

    fn fail(&mut self, detail: String) {
        self.pass = false;
        self.details.push(detail);
    }

    fn note(&mut self, detail: String) {
        self.details.push(detail);
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "pass": self.pass,
            "mode": self.mode.to_json(),
            "details": self.details,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// A finite model of one tower step: the level-`upper` group, the cell map
/// onto the level-`lower` quotient, and the kernel acting on the elements.
pub struct FiniteModel {
    pub name: String,
    group: FiniteGroup,
    cell_group: FiniteGroup,
    cells: Vec<u32>,
    kernel: Vec<u32>,
    section: Vec<u32>, // one element per cell, identity cell -> identity
}

impl FiniteModel {
    pub fn from_group_tower(
        tower: &FiniteGroupTower,
        lower: usize,
        upper: usize,
    ) -> FiniteModel {
        let group = tower.group(upper).clone();
        let cell_group = tower.group(lower).clone();
        let cells = tower.composed_map(lower, upper);
        Self::assemble(
            format!("{}<-{}", cell_group.name(), group.name()),
            group,
            cell_group,
            cells,
        )
    }

    /// Abelian model from a `Z^d` scale, cells at `lower`, elements at
    /// `upper`. An independent code path from the fullgroup module: group
    /// law via tables, not coset residues.
    pub fn from_scale(
        scale: &ZdScale,
        lower: usize,
        upper: usize,
        bound: u64,
    ) -> Result<FiniteModel, TowerError> {
        let tower = QuotientTower::build_with_bound(scale, upper, bound)?;
        let cosets = tower.enumerate(upper)?;
        let table: Vec<Vec<u32>> = cosets
            .iter()
            .map(|a| {
                cosets
                    .iter()
                    .map(|b| tower.rank(&tower.add(a, b).unwrap()).unwrap() as u32)
                    .collect()
            })
            .collect();
        let group = FiniteGroup::from_mul_table(&format!("{}/{upper}", scale.name()), table)?;
        let lower_card = tower.card_usize(lower)?;
        let lower_table: Vec<Vec<u32>> = (0..lower_card)
            .map(|a| {
                let ca = tower.coset_by_rank(lower, a).unwrap();
                (0..lower_card)
                    .map(|b| {
                        let cb = tower.coset_by_rank(lower, b).unwrap();
                        tower.rank(&tower.add(&ca, &cb).unwrap()).unwrap() as u32
                    })
                    .collect()
            })
            .collect();
        let cell_group =
            FiniteGroup::from_mul_table(&format!("{}/{lower}", scale.name()), lower_table)?;
        let cells: Vec<u32> = cosets
            .iter()
            .map(|c| tower.rank(&tower.project(c, lower).unwrap()).unwrap() as u32)
            .collect();
        Ok(Self::assemble(
            format!("{}({lower}<-{upper})", scale.name()),
            group,
            cell_group,
            cells,
        ))
    }

    fn assemble(
        name: String,
        group: FiniteGroup,
        cell_group: FiniteGroup,
        cells: Vec<u32>,
    ) -> FiniteModel {
        let kernel: Vec<u32> = (0..group.order() as u32)
            .filter(|&x| cells[x as usize] == cell_group.identity())
            .collect();
        let mut section = vec![u32::MAX; cell_group.order()];
        for x in 0..group.order() as u32 {
            let c = cells[x as usize] as usize;
            if section[c] == u32::MAX {
                section[c] = x;
            }
        }
        section[cell_group.identity() as usize] = group.identity();
        FiniteModel {
            name,
            group,
            cell_group,
            cells,
            kernel,
            section,
        }
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn n_cells(&self) -> usize {
        self.cell_group.order()
    }

    pub fn kernel_size(&self) -> usize {
        self.kernel.len()
    }

    pub fn cell_of(&self, x: u32) -> u32 {
        self.cells[x as usize]
    }

    /// Count of piecewise elements: `|kernel|^cells * cells!`.
    pub fn full_group_count(&self) -> BigInt {
        let mut count = BigInt::from(1u8);
        for _ in 0..self.n_cells() {
            count *= BigInt::from(self.kernel_size());
        }
        for k in 2..=self.n_cells() {
            count *= BigInt::from(k);
        }
        count
    }
}

/// A bijection of the model's element set moving each cell by one group
/// element on the declared side (right: `x -> x g_a^{-1}`, left:
/// `x -> g_a x`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PiecewiseBijection {
    pub side: Side,
    pub data: Vec<u32>, // g_a per cell
    pub map: Vec<u32>,
}

impl PiecewiseBijection {
    pub fn new(model: &FiniteModel, side: Side, data: Vec<u32>) -> Option<PiecewiseBijection> {
        assert_eq!(data.len(), model.n_cells());
        let g = &model.group;
        let map: Vec<u32> = (0..model.order() as u32)
            .map(|x| {
                let ga = data[model.cell_of(x) as usize];
                match side {
                    Side::Right => g.mul(x, g.inv(ga)),
                    Side::Left => g.mul(ga, x),
                }
            })
            .collect();
        let mut seen = vec![false; map.len()];
        for &y in &map {
            if seen[y as usize] {
                return None;
            }
            seen[y as usize] = true;
        }
        Some(PiecewiseBijection { side, data, map })
    }

    pub fn apply(&self, x: u32) -> u32 {
        self.map[x as usize]
    }

    /// `self` after `other`; the data recomputation follows the side.
    pub fn compose(&self, other: &PiecewiseBijection, model: &FiniteModel) -> PiecewiseBijection {
        assert_eq!(self.side, other.side);
        let g = &model.group;
        let map: Vec<u32> = (0..model.order() as u32)
            .map(|x| self.map[other.map[x as usize] as usize])
            .collect();
        let data: Vec<u32> = (0..model.n_cells())
            .map(|cell| {
                let x = model.section[cell];
                let y = map[x as usize];
                match self.side {
                    // y = x g^-1  =>  g = y^-1 x
                    Side::Right => g.mul(g.inv(y), x),
                    // y = g x  =>  g = y x^-1
                    Side::Left => g.mul(y, g.inv(x)),
                }
            })
            .collect();
        PiecewiseBijection {
            side: self.side,
            data,
            map,
        }
    }

    pub fn inverse(&self, model: &FiniteModel) -> PiecewiseBijection {
        let g = &model.group;
        let mut map = vec![0u32; self.map.len()];
        for (x, &y) in self.map.iter().enumerate() {
            map[y as usize] = x as u32;
        }
        let data: Vec<u32> = (0..model.n_cells())
            .map(|cell| {
                let x = model.section[cell];
                let y = map[x as usize];
                match self.side {
                    Side::Right => g.mul(g.inv(y), x),
                    Side::Left => g.mul(y, g.inv(x)),
                }
            })
            .collect();
        PiecewiseBijection {
            side: self.side,
            data,
            map,
        }
    }
}

/// Exhaustive enumeration of the piecewise bijections of one side.
/// The count must match `|kernel|^cells * cells!` and is guarded.
pub fn enumerate_full_group(
    model: &FiniteModel,
    side: Side,
    bound: u64,
) -> Result<Vec<PiecewiseBijection>, TowerError> {
    let count = model.full_group_count();
    if count > BigInt::from(bound) {
        return Err(TowerError::SizeGuard {
            needed: count,
            bound,
        });
    }
    let g = &model.group;
    let q = &model.cell_group;
    let c = model.n_cells();
    let mut out = Vec::with_capacity(count.to_usize().unwrap());
    for sigma in permutations(c) {
        // per-cell base datum moving cell a onto cell sigma(a)
        let base: Vec<u32> = (0..c)
            .map(|a| {
                let bar = match side {
                    // sigma(a) = a * pi(g)^{-1}  =>  pi(g) = sigma(a)^{-1} a
                    Side::Right => q.mul(q.inv(sigma[a] as u32), a as u32),
                    // sigma(a) = pi(g) * a  =>  pi(g) = sigma(a) a^{-1}
                    Side::Left => q.mul(sigma[a] as u32, q.inv(a as u32)),
                };
                model.section[bar as usize]
            })
            .collect();
        let mut digits = vec![0usize; c];
        loop {
            let data: Vec<u32> = (0..c)
                .map(|a| g.mul(base[a], model.kernel[digits[a]]))
                .collect();
            let pw = PiecewiseBijection::new(model, side, data)
                .expect("constructed data is bijective");
            out.push(pw);
            let mut k = c;
            let mut done = false;
            loop {
                if k == 0 {
                    done = true;
                    break;
                }
                k -= 1;
                digits[k] += 1;
                if digits[k] < model.kernel.len() {
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
    Ok(out)
}

/// Order formula plus closure under composition and inverse.
pub fn full_group_check(model: &FiniteModel, side: Side, bound: u64, seed: u64) -> CheckReport {
    let mut report = CheckReport::pass(&format!("full-group[{}]", model.name), Mode::Exhaustive);
    let elements = match enumerate_full_group(model, side, bound) {
        Ok(e) => e,
        Err(e) => {
            report.fail(format!("size guard: {e}"));
            return report;
        }
    };
    let expected = model.full_group_count();
    report.note(format!(
        "count {} = {}^{} * {}!",
        expected,
        model.kernel_size(),
        model.n_cells(),
        model.n_cells()
    ));
    if BigInt::from(elements.len()) != expected {
        report.fail(format!("enumerated {} != formula {expected}", elements.len()));
    }
    let index: HashMap<&[u32], usize> = elements
        .iter()
        .enumerate()
        .map(|(i, e)| (e.map.as_slice(), i))
        .collect();
    if index.len() != elements.len() {
        report.fail("enumeration produced duplicate bijections".into());
    }
    for e in &elements {
        if !index.contains_key(e.inverse(model).map.as_slice()) {
            report.fail("inverse escapes the enumerated set".into());
            break;
        }
    }
    if elements.len() * elements.len() <= EXHAUSTIVE_PAIR_LIMIT {
        for a in &elements {
            for b in &elements {
                if !index.contains_key(a.compose(b, model).map.as_slice()) {
                    report.fail("composition escapes the enumerated set".into());
                    return report;
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..DEFAULT_SAMPLES {
            let a = &elements[rng.gen_range(0..elements.len())];
            let b = &elements[rng.gen_range(0..elements.len())];
            if !index.contains_key(a.compose(b, model).map.as_slice()) {
                report.fail("composition escapes the enumerated set".into());
                break;
            }
        }
        report.mode = Mode::Sampled {
            seed,
            samples: DEFAULT_SAMPLES,
        };
    }
    report
}

fn random_piecewise(model: &FiniteModel, side: Side, rng: &mut ChaCha8Rng) -> PiecewiseBijection {
    let q = &model.cell_group;
    let g = &model.group;
    let c = model.n_cells();
    let mut sigma: Vec<u32> = (0..c as u32).collect();
    for i in (1..c).rev() {
        sigma.swap(i, rng.gen_range(0..=i));
    }
    let data: Vec<u32> = (0..c)
        .map(|a| {
            let bar = match side {
                Side::Right => q.mul(q.inv(sigma[a]), a as u32),
                Side::Left => q.mul(sigma[a], q.inv(a as u32)),
            };
            let k = model.kernel[rng.gen_range(0..model.kernel.len())];
            g.mul(model.section[bar as usize], k)
        })
        .collect();
    PiecewiseBijection::new(model, side, data).expect("constructed data is bijective")
}

/// Centralizer identity at one tower step: the piecewise right
/// translations are exactly the permutations commuting with every kernel
/// left translation. Exhaustive when the full group fits the bound, and
/// backed by the counting identity `|centralizer| = |K|^t * t!` coming
/// from the one-point determination on each of the `t` kernel orbits.
pub fn centralizer_check(model: &FiniteModel, bound: u64, seed: u64) -> CheckReport {
    let mut report =
        CheckReport::pass(&format!("centralizer[{}]", model.name), Mode::Exhaustive);
    let g = &model.group;

    // kernel orbit count equals the cell count (used by the counting identity)
    let orbits = kernel_orbits(model);
    if orbits.len() != model.n_cells() {
        report.fail(format!(
            "kernel acts with {} orbits, expected {}",
            orbits.len(),
            model.n_cells()
        ));
    }
    if model.order() != model.kernel_size() * model.n_cells() {
        report.fail("kernel size times cell count must be the model order".into());
    }
    report.note(format!(
        "|centralizer| = {}^{} * {}! by one-point determination on {} free orbits",
        model.kernel_size(),
        model.n_cells(),
        model.n_cells(),
        model.n_cells()
    ));

    let count = model.full_group_count();
    if count <= BigInt::from(bound) {
        let elements = match enumerate_full_group(model, Side::Right, bound) {
            Ok(e) => e,
            Err(e) => {
                report.fail(format!("{e}"));
                return report;
            }
        };
        if BigInt::from(elements.len()) != count {
            report.fail("enumerated count does not match the formula".into());
        }
        for f in &elements {
            for &k in &model.kernel {
                for x in 0..model.order() as u32 {
                    if f.apply(g.mul(k, x)) != g.mul(k, f.apply(x)) {
                        report.fail(format!(
                            "element does not commute with kernel translation {k} at {x}"
                        ));
                        return report;
                    }
                }
            }
        }
        // cross-check against literal symmetric-group enumeration when tiny
        if model.order() <= 8 {
            let centralizer = brute_force_centralizer(model);
            let set: HashSet<Vec<u32>> = elements.iter().map(|e| e.map.clone()).collect();
            if centralizer != set {
                report.fail(format!(
                    "symmetric-group sweep found {} centralizing maps, enumeration gives {}",
                    centralizer.len(),
                    set.len()
                ));
            } else {
                report.note(format!(
                    "symmetric-group sweep over {}! maps agrees",
                    model.order()
                ));
            }
        }
    } else {
        // all pure right translations commute with the kernel, exhaustively
        for a in 0..model.order() as u32 {
            for &k in &model.kernel {
                for x in 0..model.order() as u32 {
                    let fx = g.mul(x, g.inv(a));
                    if g.mul(g.mul(k, x), g.inv(a)) != g.mul(k, fx) {
                        report.fail(format!("right translation {a} fails commutation at {x}"));
                        return report;
                    }
                }
            }
        }
        report.note(format!(
            "all {} right translations commute with the kernel (exhaustive)",
            model.order()
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..DEFAULT_SAMPLES {
            let f = random_piecewise(model, Side::Right, &mut rng);
            let k = model.kernel[rng.gen_range(0..model.kernel.len())];
            for x in 0..model.order() as u32 {
                if f.apply(g.mul(k, x)) != g.mul(k, f.apply(x)) {
                    report.fail(format!("sampled element fails commutation at {x}"));
                    return report;
                }
            }
        }
        report.note(format!("count {} certified symbolically", count));
        report.mode = Mode::Sampled {
            seed,
            samples: DEFAULT_SAMPLES,
        };
    }
    report
}

fn kernel_orbits(model: &FiniteModel) -> Vec<Vec<u32>> {
    let g = &model.group;
    let mut seen = vec![false; model.order()];
    let mut orbits = Vec::new();
    for x in 0..model.order() as u32 {
        if seen[x as usize] {
            continue;
        }
        let orbit: Vec<u32> = model.kernel.iter().map(|&k| g.mul(k, x)).collect();
        for &y in &orbit {
            seen[y as usize] = true;
        }
        orbits.push(orbit);
    }
    orbits
}

/// All permutations of the element set commuting with every kernel left
/// translation, by literal sweep over the symmetric group (order <= 8).
fn brute_force_centralizer(model: &FiniteModel) -> HashSet<Vec<u32>> {
    let g = &model.group;
    let mut out = HashSet::new();
    for perm in permutations(model.order()) {
        let map: Vec<u32> = perm.iter().map(|&x| x as u32).collect();
        let commutes = model.kernel.iter().all(|&k| {
            (0..model.order() as u32)
                .all(|x| map[g.mul(k, x) as usize] == g.mul(k, map[x as usize]))
        });
        if commutes {
            out.insert(map);
        }
    }
    out
}

/// The centralizer of the left-regular action of a finite group on itself
/// is exactly the set of right translations, a group isomorphic to the
/// group itself.
pub fn regular_commutant_check(q: &FiniteGroup) -> CheckReport {
    let mut report = CheckReport::pass(&format!("regular-commutant[{}]", q.name()), Mode::Exhaustive);
    let n = q.order();
    // right translations commute with left translations, pairwise distinct
    let rights: Vec<Vec<u32>> = (0..n as u32)
        .map(|a| (0..n as u32).map(|x| q.mul(x, q.inv(a))).collect())
        .collect();
    let distinct: HashSet<&Vec<u32>> = rights.iter().collect();
    if distinct.len() != n {
        report.fail("right translations are not pairwise distinct".into());
    }
    for (a, rho) in rights.iter().enumerate() {
        for g in 0..n as u32 {
            for x in 0..n as u32 {
                if rho[q.mul(g, x) as usize] != q.mul(g, rho[x as usize]) {
                    report.fail(format!("right translation {a} fails commutation"));
                    return report;
                }
            }
        }
    }
    // one-point determination: any commuting map sends x to x * f(1)
    // (f(gx) = g f(x) with x = 1), so the centralizer has at most n
    // elements and the right translations exhaust it. For tiny groups the
    // symmetric group is swept literally as well.
    if n <= 8 {
        let mut found = HashSet::new();
        for perm in permutations(n) {
            let map: Vec<u32> = perm.iter().map(|&x| x as u32).collect();
            let commutes = (0..n as u32)
                .all(|g| (0..n as u32).all(|x| map[q.mul(g, x) as usize] == q.mul(g, map[x as usize])));
            if commutes {
                found.insert(map);
            }
        }
        let expected: HashSet<Vec<u32>> = rights.iter().cloned().collect();
        if found != expected {
            report.fail(format!(
                "symmetric-group sweep found {} centralizing maps, expected {n}",
                found.len()
            ));
        } else {
            report.note(format!("symmetric-group sweep over {n}! maps agrees"));
        }
    } else {
        report.note("centralizer size bounded by one-point determination".into());
    }
    // a -> (x -> x a^{-1}) is a homomorphism onto the commutant
    for a in 0..n as u32 {
        for b in 0..n as u32 {
            let ab = q.mul(a, b);
            for x in 0..n as u32 {
                if rights[a as usize][rights[b as usize][x as usize] as usize]
                    != rights[ab as usize][x as usize]
                {
                    report.fail("right-translation map is not a homomorphism".into());
                    return report;
                }
            }
        }
    }
    report.note(format!("commutant of order {n} isomorphic to the group"));
    report
}

/// The inversion map `alpha(f)(x) = (f(x^{-1}))^{-1}` carries the left
/// piecewise set onto the right piecewise set and is an isomorphism.
/// Structural parts (data transport, involution) are exhaustive over all
/// cells and kernel choices; the homomorphism law is exhaustive on a
/// generating family and sampled on random pairs.
pub fn alpha_check(model: &FiniteModel, seed: u64, samples: usize) -> CheckReport {
    let mut report = CheckReport::pass(
        &format!("alpha[{}]", model.name),
        Mode::Sampled { seed, samples },
    );
    let g = &model.group;
    let alpha = |f: &PiecewiseBijection| -> Vec<u32> {
        (0..model.order() as u32)
            .map(|x| g.inv(f.apply(g.inv(x))))
            .collect()
    };

    // generating family: all single-cell kernel twists and a family of
    // pure cell permutations (all of them when the cell count is small)
    let mut family: Vec<PiecewiseBijection> = Vec::new();
    let c = model.n_cells();
    for cell in 0..c {
        for &k in &model.kernel {
            let mut data = vec![g.identity(); c];
            data[cell] = k;
            match PiecewiseBijection::new(model, Side::Left, data) {
                Some(pw) => family.push(pw),
                None => {
                    report.fail(format!("kernel twist at cell {cell} is not bijective"));
                    return report;
                }
            }
        }
    }
    let q = &model.cell_group;
    let perms = if c <= 5 {
        permutations(c)
    } else {
        // transpositions plus a full cycle
        let mut ps = vec![(0..c).collect::<Vec<_>>()];
        for i in 0..c {
            for j in i + 1..c {
                let mut p: Vec<usize> = (0..c).collect();
                p.swap(i, j);
                ps.push(p);
            }
        }
        let mut cycle: Vec<usize> = (1..c).collect();
        cycle.push(0);
        ps.push(cycle);
        ps
    };
    for sigma in &perms {
        let data: Vec<u32> = (0..c)
            .map(|a| {
                let bar = q.mul(sigma[a] as u32, q.inv(a as u32));
                model.section[bar as usize]
            })
            .collect();
        match PiecewiseBijection::new(model, Side::Left, data) {
            Some(pw) => family.push(pw),
            None => {
                report.fail("pure permutation element is not bijective".into());
                return report;
            }
        }
    }

    // alpha transports left data to right data by cell inversion:
    // the image of f with data (g_a) is the right element with
    // data (g_{a^{-1}}), verified pointwise on every family member
    for f in &family {
        let image = alpha(f);
        let expected_data: Vec<u32> = (0..c)
            .map(|a| f.data[q.inv(a as u32) as usize])
            .collect();
        match PiecewiseBijection::new(model, Side::Right, expected_data) {
            Some(rw) => {
                if rw.map != image {
                    report.fail("alpha image disagrees with the transported data".into());
                    return report;
                }
            }
            None => {
                report.fail("alpha image data is not bijective".into());
                return report;
            }
        }
        // involution: applying alpha twice returns f
        let twice: Vec<u32> = (0..model.order() as u32)
            .map(|x| g.inv(image[g.inv(x) as usize]))
            .collect();
        if twice != f.map {
            report.fail("alpha is not an involution on the family".into());
            return report;
        }
    }
    report.note(format!(
        "data transport and involution exhaustive on {} family members ({} cells, kernel {})",
        family.len(),
        c,
        model.kernel_size()
    ));

    // alpha(id) = id
    let id = PiecewiseBijection::new(model, Side::Left, vec![g.identity(); c]).unwrap();
    if alpha(&id) != id.map {
        report.fail("alpha does not fix the identity".into());
    }

    // homomorphism law exhaustive on family pairs
    for f1 in &family {
        for f2 in &family {
            let composed = f1.compose(f2, model);
            let lhs = alpha(&composed);
            let (a1, a2) = (alpha(f1), alpha(f2));
            let rhs: Vec<u32> = (0..model.order())
                .map(|x| a1[a2[x] as usize])
                .collect();
            if lhs != rhs {
                report.fail("alpha breaks composition on the generating family".into());
                return report;
            }
        }
    }
    report.note(format!(
        "homomorphism law exhaustive on {}^2 family pairs",
        family.len()
    ));

    // and sampled on random pairs of general elements
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let f1 = random_piecewise(model, Side::Left, &mut rng);
        let f2 = random_piecewise(model, Side::Left, &mut rng);
        let composed = f1.compose(&f2, model);
        let lhs = alpha(&composed);
        let (a1, a2) = (alpha(&f1), alpha(&f2));
        let rhs: Vec<u32> = (0..model.order()).map(|x| a1[a2[x] as usize]).collect();
        if lhs != rhs {
            report.fail("alpha breaks composition on a sampled pair".into());
            return report;
        }
    }

    // abelian towers: left and right piecewise maps coincide as maps
    if model.group.is_abelian() {
        for f in &family {
            let inv_data: Vec<u32> = f.data.iter().map(|&d| g.inv(d)).collect();
            match PiecewiseBijection::new(model, Side::Right, inv_data) {
                Some(rw) => {
                    if rw.map != f.map {
                        report.fail("abelian left map is not a right map".into());
                        return report;
                    }
                }
                None => {
                    report.fail("abelian inverse data not bijective".into());
                    return report;
                }
            }
        }
        report.note("abelian case: left and right sets coincide".into());
    }
    report
}

/// Kernel orbits are exactly the cells: `[G : Gamma_n]` many, each one a
/// full fiber of the cell map.
pub fn orbit_count_check(model: &FiniteModel) -> CheckReport {
    let mut report = CheckReport::pass(&format!("orbit-count[{}]", model.name), Mode::Exhaustive);
    let orbits = kernel_orbits(model);
    if orbits.len() != model.n_cells() {
        report.fail(format!(
            "{} orbits != {} cells",
            orbits.len(),
            model.n_cells()
        ));
        return report;
    }
    for orbit in &orbits {
        let cell = model.cell_of(orbit[0]);
        let mut members: Vec<u32> = orbit.clone();
        members.sort_unstable();
        members.dedup();
        if members.len() != model.kernel_size() {
            report.fail("orbit size differs from the kernel order".into());
        }
        let mut fiber: Vec<u32> = (0..model.order() as u32)
            .filter(|&x| model.cell_of(x) == cell)
            .collect();
        fiber.sort_unstable();
        if members != fiber {
            report.fail(format!("orbit is not the fiber of cell {cell}"));
        }
    }
    report.note(format!(
        "{} orbits of size {}",
        orbits.len(),
        model.kernel_size()
    ));
    report
}

/// Semidirect-law cross-check: composition of truncated elements agrees
/// with raw pointwise composition, decompose/recompose round-trips, and
/// the product in `(phi, sigma)` coordinates matches
/// decompose-of-composition. Exhaustive on pairs below the pair budget.
pub fn semidirect_check(
    scale: &ZdScale,
    level: usize,
    depth: usize,
    bound: u64,
    seed: u64,
) -> CheckReport {
    let name = format!("semidirect[{}({level}<-{depth})]", scale.name());
    let mut report = CheckReport::pass(&name, Mode::Exhaustive);
    let tower = match QuotientTower::build_with_bound(scale, depth, bound) {
        Ok(t) => t,
        Err(e) => {
            report.fail(format!("{e}"));
            return report;
        }
    };
    let reps = tower.section(level, depth).unwrap();
    let count = fullgroup::element_count(&tower, level, depth).unwrap();

    let check_pair = |g: &FullGroupElement, f: &FullGroupElement, report: &mut CheckReport| -> bool {
        let composed = fullgroup::compose(g, f).unwrap();
        // raw pointwise composition is the oracle
        for x in tower.enumerate(depth).unwrap() {
            let raw = g.apply(&f.apply(&x).unwrap()).unwrap();
            if composed.apply(&x).unwrap() != raw {
                report.fail("compose disagrees with pointwise composition".into());
                return false;
            }
        }
        let dg = fullgroup::decompose(g, &reps).unwrap();
        let df = fullgroup::decompose(f, &reps).unwrap();
        let product = fullgroup::semidirect_mul(&dg, &df).unwrap();
        if product != fullgroup::decompose(&composed, &reps).unwrap() {
            report.fail("semidirect product disagrees with decompose-of-composition".into());
            return false;
        }
        if fullgroup::recompose(&product, &reps).unwrap() != composed {
            report.fail("recompose does not invert the semidirect product".into());
            return false;
        }
        true
    };

    if count <= BigInt::from(bound) {
        let elements = fullgroup::enumerate_elements(&tower, level, depth).unwrap();
        // round-trip over every element
        for f in &elements {
            let dec = fullgroup::decompose(f, &reps).unwrap();
            if &fullgroup::recompose(&dec, &reps).unwrap() != f {
                report.fail("decompose/recompose round-trip failed".into());
                return report;
            }
            if !f.is_measure_preserving().unwrap() {
                report.fail("element does not preserve the uniform measure".into());
                return report;
            }
        }
        report.note(format!("round-trip exhaustive over {} elements", elements.len()));
        if elements.len() * elements.len() <= EXHAUSTIVE_PAIR_LIMIT {
            for g in &elements {
                for f in &elements {
                    if !check_pair(g, f, &mut report) {
                        return report;
                    }
                }
            }
            report.note(format!(
                "homomorphism law exhaustive on {}^2 pairs",
                elements.len()
            ));
            return report;
        }
    }
    // sampled pairs
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = 1000;
    for _ in 0..samples {
        let g = random_element(&tower, level, depth, &mut rng);
        let f = random_element(&tower, level, depth, &mut rng);
        if !check_pair(&g, &f, &mut report) {
            return report;
        }
    }
    report.mode = Mode::Sampled { seed, samples };
    report.note(format!("{samples} seeded random pairs checked (count {count})"));
    report
}

fn random_element(
    tower: &std::sync::Arc<QuotientTower>,
    level: usize,
    depth: usize,
    rng: &mut ChaCha8Rng,
) -> FullGroupElement {
    let cells = tower.enumerate(level).unwrap();
    let kernel = tower.kernel_cosets(level, depth).unwrap();
    let c = cells.len();
    let mut sigma: Vec<usize> = (0..c).collect();
    for i in (1..c).rev() {
        sigma.swap(i, rng.gen_range(0..=i));
    }
    let pairs: Vec<(crate::tower::Coset, crate::tower::Coset)> = (0..c)
        .map(|a| {
            let diff: Vec<BigInt> = cells[sigma[a]]
                .residue()
                .iter()
                .zip(cells[a].residue())
                .map(|(s, t)| s - t)
                .collect();
            let base = tower.coset(depth, &diff).unwrap();
            let k = &kernel[rng.gen_range(0..kernel.len())];
            (cells[a].clone(), tower.add(&base, k).unwrap())
        })
        .collect();
    FullGroupElement::from_table(tower, level, depth, &pairs).expect("random table is bijective")
}

/// Validates the closed-form subgroup criterion on one pair of finite
/// abelian p-groups: subgroup types are exactly the dominated partitions,
/// and isomorphic subgroups of equal index exist iff the orders agree.
pub fn subgroup_matching_check(p: u64, lambda_a: &[u32], lambda_b: &[u32]) -> CheckReport {
    let mut report = CheckReport::pass(
        &format!("subgroup-matching[p={p}, {lambda_a:?} vs {lambda_b:?}]"),
        Mode::Exhaustive,
    );
    let types_a = pgroup::subgroup_types(p, lambda_a);
    let types_b = pgroup::subgroup_types(p, lambda_b);
    for (lambda, types) in [(lambda_a, &types_a), (lambda_b, &types_b)] {
        let got: Vec<pgroup::PType> = types.keys().cloned().collect();
        let expected = pgroup::dominated_partitions(lambda);
        if got != expected {
            report.fail(format!(
                "subgroup types of {lambda:?} are {got:?}, predicted {expected:?}"
            ));
        }
    }
    // rank-0 matching rule
    let sum = |l: &[u32]| l.iter().sum::<u32>();
    let (na, nb) = (sum(lambda_a), sum(lambda_b));
    let mut matched = false;
    for mu in types_a.keys() {
        if types_b.contains_key(mu) && na - sum(mu) == nb - sum(mu) {
            matched = true;
            break;
        }
    }
    if matched != (na == nb) {
        report.fail(format!(
            "matching-subgroup existence ({matched}) disagrees with order equality ({})",
            na == nb
        ));
    }
    report.note(format!(
        "{} and {} subgroups enumerated",
        types_a.values().sum::<u64>(),
        types_b.values().sum::<u64>()
    ));
    report
}

/// Sweeps the embeddability characterization and the rank-0 rule over all
/// abelian p-groups of order up to `max_order`.
pub fn subgroup_matching_sweep(max_order: u64) -> CheckReport {
    let mut report = CheckReport::pass(
        &format!("subgroup-matching-sweep[<= {max_order}]"),
        Mode::Exhaustive,
    );
    let primes: Vec<u64> = (2..=max_order).filter(|&n| crate::lattice::is_prime(&BigInt::from(n))).collect();
    let mut groups_checked = 0u64;
    let mut pairs_checked = 0u64;
    for &p in &primes {
        let mut types_by_lambda: Vec<(Vec<u32>, std::collections::BTreeMap<pgroup::PType, u64>)> =
            Vec::new();
        let mut k = 1u32;
        while p.pow(k) <= max_order {
            for lambda in pgroup::partitions(k) {
                let types = pgroup::subgroup_types(p, &lambda);
                let got: Vec<pgroup::PType> = types.keys().cloned().collect();
                let expected = pgroup::dominated_partitions(&lambda);
                if got != expected {
                    report.fail(format!(
                        "p={p}: subgroup types of {lambda:?} differ from the dominated partitions"
                    ));
                }
                groups_checked += 1;
                types_by_lambda.push((lambda, types));
            }
            k += 1;
        }
        for (la, ta) in &types_by_lambda {
            for (lb, tb) in &types_by_lambda {
                let (na, nb) = (la.iter().sum::<u32>(), lb.iter().sum::<u32>());
                let matched = ta.keys().any(|mu| {
                    tb.contains_key(mu)
                        && na - mu.iter().sum::<u32>() == nb - mu.iter().sum::<u32>()
                });
                if matched != (na == nb) {
                    report.fail(format!(
                        "p={p}: rank-0 rule fails for {la:?} vs {lb:?}"
                    ));
                }
                pairs_checked += 1;
            }
        }
    }
    report.note(format!(
        "{groups_checked} groups and {pairs_checked} pairs checked over {} primes",
        primes.len()
    ));
    report
}

/// Seeded generator of certified diagonal scales over the primes 2,3,5,7.
pub fn random_certified_scales(seed: u64, count: usize, dims: &[usize]) -> Vec<ZdScale> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let dim = dims[rng.gen_range(0..dims.len())];
        let entries: Vec<i64> = (0..dim)
            .map(|_| loop {
                let e: i64 = [1, 2, 3, 5, 7][rng.gen_range(0..5)]
                    * [1, 2, 3, 5, 7][rng.gen_range(0..5)]
                    * [1, 2][rng.gen_range(0..2)];
                if e >= 2 {
                    break e;
                }
            })
            .collect();
        out.push(ZdScale::diagonal(&format!("rand-{i}"), &entries).expect("diagonal scale"));
    }
    out
}
