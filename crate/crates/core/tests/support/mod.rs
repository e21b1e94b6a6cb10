//! Random instance generators and brute-force oracles shared by the
//! integration tests. Oracles work on `u64` point masks and enumerate
//! members explicitly, so they stay independent of the partition code.
#![allow(dead_code)]

use boolalg::amalgam::{embed_as_system, OverlapSystem, PairOverlap};
use boolalg::{Element, Subalgebra};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn mask(x: &Element) -> u64 {
    x.points().fold(0, |acc, p| acc | 1 << p)
}

pub fn element(ground: usize, mask: u64) -> Element {
    Element::from_fn(ground, |p| mask >> p & 1 == 1)
}

pub fn full(ground: usize) -> u64 {
    if ground == 64 {
        u64::MAX
    } else {
        (1u64 << ground) - 1
    }
}

// ---- generators ----

pub fn random_partition(rng: &mut ChaCha8Rng, m: usize) -> Subalgebra {
    let k = if m == 1 { 1 } else { rng.gen_range(2..=m) };
    let labels: Vec<usize> = (0..m).map(|_| rng.gen_range(0..k)).collect();
    Subalgebra::from_labels(&labels)
}

/// Partition of `0..m` by the values of the given masks.
pub fn generated_by(m: usize, gens: &[u64]) -> Subalgebra {
    let labels: Vec<Vec<bool>> = (0..m)
        .map(|p| gens.iter().map(|g| g >> p & 1 == 1).collect())
        .collect();
    Subalgebra::from_labels(&labels)
}

/// Points are a nonempty set of assignments to `k` variables; returns the
/// ground size and the variable masks.
fn assignment_ground(rng: &mut ChaCha8Rng, k: usize, keep_all: bool) -> (usize, Vec<u64>) {
    let mut pts: Vec<u64> = (0..1u64 << k).collect();
    if !keep_all {
        pts.retain(|_| rng.gen_bool(0.75));
        if pts.is_empty() {
            pts.push(0);
        }
    }
    let vars = (0..k)
        .map(|v| {
            pts.iter()
                .enumerate()
                .filter(|(_, &a)| a >> v & 1 == 1)
                .fold(0u64, |acc, (p, _)| acc | 1 << p)
        })
        .collect();
    (pts.len(), vars)
}

/// A random subset of `0..k`, nonempty when `k > 0`.
fn random_subset(rng: &mut ChaCha8Rng, k: usize) -> Vec<usize> {
    loop {
        let s: Vec<usize> = (0..k).filter(|_| rng.gen_bool(0.5)).collect();
        if !s.is_empty() || k == 0 {
            return s;
        }
    }
}

/// Subalgebras generated by random variable subsets of a free algebra on
/// `k` generators; these commute well.
pub fn free_family(rng: &mut ChaCha8Rng, k: usize, n: usize) -> Vec<Subalgebra> {
    let (m, vars) = assignment_ground(rng, k, true);
    (0..n)
        .map(|_| {
            let gens: Vec<u64> = random_subset(rng, k).iter().map(|&v| vars[v]).collect();
            generated_by(m, &gens)
        })
        .collect()
}

/// A family of `n` subalgebras over at most 8 points, mixing free,
/// related-generator, shared-pool and unstructured constructions.
pub fn random_family(rng: &mut ChaCha8Rng, n: usize) -> Vec<Subalgebra> {
    match rng.gen_range(0..20) {
        0..=2 => {
            let k = rng.gen_range(1..=3);
            free_family(rng, k, n)
        }
        3..=7 => {
            let k = rng.gen_range(2..=3);
            let (m, vars) = assignment_ground(rng, k, false);
            (0..n)
                .map(|_| {
                    let gens: Vec<u64> = random_subset(rng, k).iter().map(|&v| vars[v]).collect();
                    generated_by(m, &gens)
                })
                .collect()
        }
        8..=11 => {
            let m = rng.gen_range(2..=8);
            let pool: Vec<u64> = (0..rng.gen_range(1..=4))
                .map(|_| rng.gen::<u64>() & full(m))
                .collect();
            (0..n)
                .map(|_| {
                    let gens: Vec<u64> = random_subset(rng, pool.len()).iter().map(|&g| pool[g]).collect();
                    generated_by(m, &gens)
                })
                .collect()
        }
        _ => {
            let m = rng.gen_range(3..=8);
            (0..n).map(|_| random_partition(rng, m)).collect()
        }
    }
}

fn surjection(rng: &mut ChaCha8Rng, from: usize, onto: usize) -> Vec<usize> {
    let mut map: Vec<usize> = (0..from).map(|a| if a < onto { a } else { rng.gen_range(0..onto) }).collect();
    map.shuffle(rng);
    map
}

/// A valid overlap system with at most `max_space` atom tuples: either an
/// embedded family or arbitrary pairwise data.
pub fn random_system(rng: &mut ChaCha8Rng, max_space: usize) -> OverlapSystem {
    let n = if rng.gen_bool(0.1) { 1 } else { rng.gen_range(2..=4) };
    if rng.gen_bool(0.4) {
        let fam = random_family(rng, n);
        let s = embed_as_system(&fam).expect("common ground");
        if s.tuple_space() <= max_space as u128 {
            return s;
        }
    }
    loop {
        let counts: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=6)).collect();
        if counts.iter().product::<usize>() > max_space {
            continue;
        }
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let inter = rng.gen_range(1..=counts[i].min(counts[j]));
                pairs.push(PairOverlap {
                    i,
                    j,
                    inter_atoms: inter,
                    map_i: surjection(rng, counts[i], inter),
                    map_j: surjection(rng, counts[j], inter),
                });
            }
        }
        return OverlapSystem::new(counts, pairs).expect("generated system is valid");
    }
}

// ---- oracles ----

/// Atoms as point masks.
pub fn atoms(a: &Subalgebra) -> Vec<u64> {
    a.blocks().iter().map(mask).collect()
}

/// Every member, by choosing a subset of atoms.
pub fn members(atoms: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64];
    for &a in atoms {
        let more: Vec<u64> = out.iter().map(|x| x | a).collect();
        out.extend(more);
    }
    out
}

/// Members common to both algebras, sorted.
pub fn common_members(a: &Subalgebra, b: &Subalgebra) -> Vec<u64> {
    let mut ma = members(&atoms(a));
    let mb = members(&atoms(b));
    ma.retain(|x| mb.contains(x));
    ma.sort_unstable();
    ma
}

/// Members of the algebra generated by `gens`, by closing under complement
/// and intersection.
pub fn closure(ground: usize, gens: &[u64]) -> Vec<u64> {
    assert!(ground <= 16, "closure enumerates all 2^ground sets");
    let top = full(ground);
    let mut seen = vec![false; 1 << ground];
    let mut set: Vec<u64> = Vec::new();
    let mut frontier: Vec<u64> = vec![0, top];
    frontier.extend_from_slice(gens);
    while let Some(x) = frontier.pop() {
        if seen[x as usize] {
            continue;
        }
        seen[x as usize] = true;
        frontier.push(top & !x);
        for &y in &set {
            frontier.push(x & y);
            frontier.push(x | y);
        }
        set.push(x);
    }
    set.sort_unstable();
    set
}

/// The least member above `x` among `members`.
pub fn least_above(members: &[u64], x: u64) -> u64 {
    members
        .iter()
        .filter(|&&c| c & x == x)
        .fold(u64::MAX, |acc, &c| acc & c)
}

fn tuples(counts: Vec<usize>) -> impl Iterator<Item = Vec<usize>> {
    let total: usize = counts.iter().product();
    (0..total).map(move |mut idx| {
        let mut t = vec![0; counts.len()];
        for i in (0..counts.len()).rev() {
            t[i] = idx % counts[i];
            idx /= counts[i];
        }
        t
    })
}

/// Every tuple of atoms that projects to the same member of each pairwise
/// intersection meets.
pub fn oracle_commutes(family: &[Subalgebra]) -> bool {
    let n = family.len();
    let ats: Vec<Vec<u64>> = family.iter().map(atoms).collect();
    let inter: Vec<Vec<Vec<u64>>> = (0..n)
        .map(|i| (0..n).map(|j| common_members(&family[i], &family[j])).collect())
        .collect();
    let counts: Vec<usize> = ats.iter().map(|a| a.len()).collect();
    tuples(counts).all(|t| {
        let compatible = (0..n).all(|i| {
            (i + 1..n).all(|j| {
                least_above(&inter[i][j], ats[i][t[i]]) == least_above(&inter[i][j], ats[j][t[j]])
            })
        });
        let meet = t.iter().enumerate().fold(u64::MAX, |acc, (i, &a)| acc & ats[i][a]);
        !compatible || meet != 0
    })
}

/// For each atom tuple with empty meet, the least members above it of the
/// algebras generated by the pairwise overlaps also meet in 0.
pub fn oracle_weakly_commutes(family: &[Subalgebra]) -> bool {
    let n = family.len();
    if n == 0 {
        return true;
    }
    let ground = family[0].ground();
    let ats: Vec<Vec<u64>> = family.iter().map(atoms).collect();
    let d: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let gens: Vec<u64> = (0..n)
                .filter(|&j| j != i)
                .flat_map(|j| common_members(&family[i], &family[j]))
                .collect();
            closure(ground, &gens)
        })
        .collect();
    let counts: Vec<usize> = ats.iter().map(|a| a.len()).collect();
    tuples(counts).all(|t| {
        let x = t.iter().enumerate().fold(full(ground), |acc, (i, &a)| acc & ats[i][a]);
        let y = t
            .iter()
            .enumerate()
            .fold(full(ground), |acc, (i, &a)| acc & least_above(&d[i], ats[i][a]));
        x != 0 || y == 0
    })
}

/// For all members `x ∈ A`, `y ∈ B` with `x ≤ y` some member of `A ∩ B`
/// lies between them.
pub fn oracle_pair_interpolates(a: &Subalgebra, b: &Subalgebra) -> bool {
    let c = common_members(a, b);
    let mb = members(&atoms(b));
    members(&atoms(a)).iter().all(|&x| {
        let z = least_above(&c, x);
        mb.iter().all(|&y| x & !y != 0 || z & !y == 0)
    })
}

/// Compatible tuples of a system by testing all of them.
pub fn oracle_compatible_tuples(system: &OverlapSystem) -> Vec<Vec<usize>> {
    tuples(system.atom_counts().to_vec())
        .filter(|t| system.pairs().iter().all(|p| p.map_i[t[p.i]] == p.map_j[t[p.j]]))
        .collect()
}

/// Join of subalgebras as the algebra generated by all their members.
pub fn oracle_join(ground: usize, family: &[Subalgebra]) -> Vec<u64> {
    let gens: Vec<u64> = family.iter().flat_map(atoms).collect();
    closure(ground, &gens)
}

pub fn member_set(a: &Subalgebra) -> Vec<u64> {
    let mut v = members(&atoms(a));
    v.sort_unstable();
    v
}
