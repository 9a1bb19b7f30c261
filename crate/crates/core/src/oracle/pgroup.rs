//! Exhaustive subgroup enumeration for finite abelian p-groups.
//!
//! Subgroups of `Z/p^{l_1} x ... x Z/p^{l_k}` are enumerated exactly once
//! by recursion over the cyclic factors: a subgroup of `A x C` is a triple
//! (subgroup B of A, image p^a C, a coset of B killed by p^{len(C)-a})
//! and every subgroup arises from exactly one triple. Each subgroup's
//! isomorphism type is read off the histogram of element orders.

use std::collections::BTreeMap;

/// A finite abelian p-group type: descending exponent partition.
pub type PType = Vec<u32>;

pub struct PGroup {
    p: u64,
    lambda: PType, // descending, no zeros
}

impl PGroup {
    pub fn new(p: u64, mut lambda: PType) -> Self {
        lambda.retain(|&k| k > 0);
        lambda.sort_unstable_by(|a, b| b.cmp(a));
        PGroup { p, lambda }
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.lambda.iter().sum::<u32>())
    }

    pub fn lambda(&self) -> &[u32] {
        &self.lambda
    }

    fn moduli(&self) -> Vec<u64> {
        self.lambda.iter().map(|&k| self.p.pow(k)).collect()
    }
}

struct LevelTables {
    size: usize,
    add: Vec<u32>,  // size*size
    pmul: Vec<u32>, // multiply by p
}

fn build_level_tables(p: u64, moduli: &[u64]) -> Vec<LevelTables> {
    let mut out = Vec::with_capacity(moduli.len() + 1);
    out.push(LevelTables {
        size: 1,
        add: vec![0],
        pmul: vec![0],
    });
    for k in 1..=moduli.len() {
        let radix: Vec<u64> = moduli[..k].to_vec();
        let size: u64 = radix.iter().product();
        let size = size as usize;
        let decode = |code: u32| -> Vec<u64> {
            let mut c = code as u64;
            let mut coords = vec![0u64; radix.len()];
            for i in (0..radix.len()).rev() {
                coords[i] = c % radix[i];
                c /= radix[i];
            }
            coords
        };
        let encode = |coords: &[u64]| -> u32 {
            let mut c = 0u64;
            for (i, &m) in radix.iter().enumerate() {
                c = c * m + coords[i] % m;
            }
            c as u32
        };
        let mut add = vec![0u32; size * size];
        for x in 0..size {
            let cx = decode(x as u32);
            for y in 0..size {
                let cy = decode(y as u32);
                let sum: Vec<u64> = cx
                    .iter()
                    .zip(&cy)
                    .zip(&radix)
                    .map(|((a, b), m)| (a + b) % m)
                    .collect();
                add[x * size + y] = encode(&sum);
            }
        }
        let mut pmul = vec![0u32; size];
        for x in 0..size {
            let cx = decode(x as u32);
            let px: Vec<u64> = cx.iter().zip(&radix).map(|(a, m)| (a * p) % m).collect();
            pmul[x] = encode(&px);
        }
        out.push(LevelTables { size, add, pmul });
    }
    out
}

/// Kill exponent of each element of the full group: the least `j` with
/// `p^j x = 0`.
fn kill_exponents(tables: &LevelTables) -> Vec<u32> {
    (0..tables.size)
        .map(|x| {
            let mut e = 0u32;
            let mut y = x as u32;
            while y != 0 {
                y = tables.pmul[y as usize];
                e += 1;
            }
            e
        })
        .collect()
}

/// Isomorphism type of a subgroup given as an element list, from the
/// cumulative histogram of kill exponents (its increments are the
/// conjugate partition).
fn type_of_elements(elements: &[u32], kexp: &[u32], p: u64) -> PType {
    let max_e = elements.iter().map(|&x| kexp[x as usize]).max().unwrap_or(0);
    let mut cumulative = vec![0u64; max_e as usize + 1];
    for &x in elements {
        cumulative[kexp[x as usize] as usize] += 1;
    }
    for j in 1..cumulative.len() {
        cumulative[j] += cumulative[j - 1];
    }
    // conjugate parts: mu'_j = log_p(c_j) - log_p(c_{j-1})
    let logp = |n: u64| -> u32 {
        let mut e = 0;
        let mut m = 1u64;
        while m < n {
            m *= p;
            e += 1;
        }
        assert_eq!(m, n, "subgroup orders must be powers of p");
        e
    };
    let conj: Vec<u32> = (1..cumulative.len())
        .map(|j| logp(cumulative[j]) - logp(cumulative[j - 1]))
        .collect();
    // conjugate back into the descending partition
    let mut mu: PType = Vec::new();
    for &parts in conj.iter() {
        for i in 0..parts as usize {
            if mu.len() <= i {
                mu.resize(i + 1, 0);
            }
            mu[i] += 1;
        }
    }
    mu.sort_unstable_by(|a, b| b.cmp(a));
    mu
}

/// Visits every subgroup of the group exactly once, passing its element
/// list (unsorted, identity first).
pub fn for_each_subgroup(group: &PGroup, mut visit: impl FnMut(&[u32])) {
    let moduli = group.moduli();
    let tables = build_level_tables(group.p, &moduli);
    let mut sub: Vec<u32> = vec![0];
    recurse(group.p, &group.lambda, &moduli, &tables, 0, &mut sub, &mut visit);
}

fn recurse(
    p: u64,
    lambda: &[u32],
    moduli: &[u64],
    tables: &[LevelTables],
    k: usize,
    sub: &mut Vec<u32>,
    visit: &mut impl FnMut(&[u32]),
) {
    if k == moduli.len() {
        visit(sub);
        return;
    }
    let level = &tables[k];
    let m = moduli[k];
    let cap = lambda[k];
    // membership of the current subgroup inside the prefix group
    let mut member = vec![false; level.size.max(1)];
    for &x in sub.iter() {
        member[x as usize] = true;
    }
    // coset representatives with the exponent of their order in A/B
    let mut visited = vec![false; level.size.max(1)];
    let mut reps: Vec<(u32, u32)> = Vec::new();
    for x in 0..level.size as u32 {
        if visited[x as usize] {
            continue;
        }
        for &b in sub.iter() {
            visited[level.add[x as usize * level.size + b as usize] as usize] = true;
        }
        let mut e = 0u32;
        let mut y = x;
        while !member[y as usize] {
            y = level.pmul[y as usize];
            e += 1;
        }
        reps.push((x, e));
    }
    for a in 0..=cap {
        let t_count = p.pow(cap - a) as usize;
        let gen_c = (p.pow(a) % m) as u32; // generator p^a of the image in C
        for &(x, e) in &reps {
            if e > cap - a {
                continue;
            }
            // child = { (b + t*x, t*p^a) : b in B, 0 <= t < p^(cap-a) }
            let mut child = Vec::with_capacity(sub.len() * t_count);
            let mut tx = 0u32; // t*x in the prefix group
            let mut tc = 0u64; // t*p^a in C
            for _ in 0..t_count {
                for &b in sub.iter() {
                    let prefix = level.add[b as usize * level.size + tx as usize];
                    child.push(prefix * m as u32 + tc as u32);
                }
                tx = level.add[tx as usize * level.size + x as usize];
                tc = (tc + gen_c as u64) % m;
            }
            recurse(p, lambda, moduli, tables, k + 1, &mut child, visit);
        }
    }
}

/// All isomorphism types of subgroups with their multiplicities.
pub fn subgroup_types(p: u64, lambda: &[u32]) -> BTreeMap<PType, u64> {
    let group = PGroup::new(p, lambda.to_vec());
    let moduli = group.moduli();
    let tables = build_level_tables(p, &moduli);
    let kexp = kill_exponents(tables.last().unwrap());
    let mut out: BTreeMap<PType, u64> = BTreeMap::new();
    for_each_subgroup(&group, |elements| {
        let ty = type_of_elements(elements, &kexp, p);
        *out.entry(ty).or_insert(0) += 1;
    });
    out
}

/// Does `mu` dominate-embed into `lambda`: descending tuples compare
/// componentwise after zero padding.
pub fn embeds(mu: &[u32], lambda: &[u32]) -> bool {
    if mu.len() > lambda.len() {
        return mu[lambda.len()..].iter().all(|&k| k == 0) && embeds(&mu[..lambda.len()], lambda);
    }
    mu.iter().zip(lambda).all(|(m, l)| m <= l)
}

/// All partitions dominated by `lambda` (the predicted subgroup types).
pub fn dominated_partitions(lambda: &[u32]) -> Vec<PType> {
    let mut out = Vec::new();
    let mut current: PType = Vec::new();
    fn rec(lambda: &[u32], i: usize, prev: u32, current: &mut PType, out: &mut Vec<PType>) {
        out.push(current.clone());
        if i >= lambda.len() {
            return;
        }
        for k in 1..=lambda[i].min(prev) {
            current.push(k);
            rec(lambda, i + 1, k, current, out);
            current.pop();
        }
    }
    rec(lambda, 0, u32::MAX, &mut current, &mut out);
    out.sort();
    out.dedup();
    out
}

/// Descending partitions of `n`.
pub fn partitions(n: u32) -> Vec<PType> {
    fn rec(n: u32, max: u32, current: &mut PType, out: &mut Vec<PType>) {
        if n == 0 {
            out.push(current.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            current.push(k);
            rec(n - k, k, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}
