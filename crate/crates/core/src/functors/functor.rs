use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::cube::{FinCube, FinMap};
use super::size_cap;
use crate::algebra::{generate_subalgebra, Element, Subalgebra};
use crate::error::{Error, Result};

/// The hyperspace functor `Exp` (nonempty subsets, image maps) or the
/// symmetric power `SP^k` (size-`k` multisets), together with their
/// algebraic duals `exp` and `σ^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FunctorId {
    Exp,
    Sp(usize),
}

impl FunctorId {
    /// `|F(X)|` for `|X| = k`, saturating.
    pub fn space_size(self, k: usize) -> u128 {
        match self {
            FunctorId::Exp => {
                if k >= 127 {
                    u128::MAX
                } else {
                    (1u128 << k) - 1
                }
            }
            FunctorId::Sp(j) => multichoose(k, j),
        }
    }

    /// The points of `F(X)` for `|X| = k`, each as a sorted list of points
    /// of `X` (with repetition for multisets), in lexicographic order.
    pub fn points(self, k: usize) -> Result<Vec<Vec<usize>>> {
        let size = self.space_size(k);
        let cap = size_cap();
        if size > cap {
            return Err(Error::SizeCap { size, cap });
        }
        let mut out = Vec::with_capacity(size as usize);
        let mut cur = Vec::new();
        match self {
            FunctorId::Exp => subsets_lex(k, 0, &mut cur, &mut out),
            FunctorId::Sp(j) => multisets_lex(k, j, 0, &mut cur, &mut out),
        }
        Ok(out)
    }

    /// Canonical form of the image of a point under a map.
    pub fn normalize(self, mut image: Vec<usize>) -> Vec<usize> {
        image.sort_unstable();
        if self == FunctorId::Exp {
            image.dedup();
        }
        image
    }
}

fn multichoose(k: usize, j: usize) -> u128 {
    // C(k + j - 1, j)
    if k == 0 {
        return u128::from(j == 0);
    }
    let mut acc: u128 = 1;
    for i in 0..j as u128 {
        acc = match acc.checked_mul(k as u128 + i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

fn subsets_lex(k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    for x in start..k {
        cur.push(x);
        out.push(cur.clone());
        subsets_lex(k, x + 1, cur, out);
        cur.pop();
    }
}

fn multisets_lex(k: usize, j: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == j {
        out.push(cur.clone());
        return;
    }
    for x in start..k {
        cur.push(x);
        multisets_lex(k, j, x, cur, out);
        cur.pop();
    }
}

impl fmt::Display for FunctorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctorId::Exp => f.write_str("exp"),
            FunctorId::Sp(k) => write!(f, "sp{k}"),
        }
    }
}

impl FromStr for FunctorId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let lower = s.to_ascii_lowercase();
        if lower == "exp" {
            return Ok(FunctorId::Exp);
        }
        let k = lower
            .strip_prefix("sp")
            .and_then(|rest| rest.parse::<usize>().ok())
            .ok_or_else(|| format!("unknown functor {s:?} (expected exp, sp2, sp3, ...)"))?;
        if k < 2 {
            return Err(format!("symmetric power needs k >= 2, got {k}"));
        }
        Ok(FunctorId::Sp(k))
    }
}

impl Serialize for FunctorId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A finite set `F(X)` with an index of its points.
struct Space {
    points: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl Space {
    fn new(f: FunctorId, k: usize) -> Result<Self> {
        let points = f.points(k)?;
        let index = points.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        Ok(Space { points, index })
    }
}

fn lift_map(f: FunctorId, map: &FinMap, from: &Space, to: &Space) -> FinMap {
    let values = from
        .points
        .iter()
        .map(|p| to.index[&f.normalize(p.iter().map(|&x| map.apply(x)).collect())])
        .collect();
    FinMap::new(to.points.len(), values).expect("images are points of the target")
}

/// `F` applied to every space and map of the cube.
pub fn apply_functor(f: FunctorId, cube: &FinCube) -> Result<FinCube> {
    let n = cube.n();
    let spaces: Vec<Space> = cube
        .spaces()
        .iter()
        .map(|&k| Space::new(f, k))
        .collect::<Result<_>>()?;
    let mut maps = BTreeMap::new();
    for s in 0u32..1 << n {
        for i in (0..n).filter(|&i| s >> i & 1 == 0) {
            let t = s | 1 << i;
            let lifted = lift_map(f, cube.map(s, t), &spaces[s as usize], &spaces[t as usize]);
            maps.insert((s, t), lifted);
        }
    }
    let out = FinCube::new(n, spaces.iter().map(|sp| sp.points.len()).collect(), maps)?;
    if !out.is_functorial() {
        return Err(Error::CrossCheck(format!("{f} applied to a cube is not functorial")));
    }
    Ok(out)
}

/// The image of `F(A ≤ P(m))` inside `F(P(m))`, whose atoms are the points
/// of `F(m)`: two points are identified when `F` of the atom map of `A`
/// sends them to the same point.
pub fn functor_image(f: FunctorId, a: &Subalgebra, m: usize) -> Result<Subalgebra> {
    crate::error::check_ground(m, a.ground())?;
    let points = f.points(m)?;
    let labels: Vec<Vec<usize>> = points
        .iter()
        .map(|p| f.normalize(p.iter().map(|&x| a.block_of(x)).collect()))
        .collect();
    Ok(Subalgebra::from_labels(&labels))
}

/// Ground sizes up to which the generator-based constructions are run.
pub const GENERATOR_ORACLE_LIMIT: usize = 6;

/// `exp(A) = ⟨{[a] : a ∈ A}⟩` where the filters of `P(m)` are the principal
/// filters of nonempty sets `K` and `[a] = {K : K ⊆ a}`.
pub fn exp_image_by_generators(a: &Subalgebra) -> Result<Subalgebra> {
    let m = a.ground();
    if m > GENERATOR_ORACLE_LIMIT {
        return Err(Error::SizeCap {
            size: m as u128,
            cap: GENERATOR_ORACLE_LIMIT as u128,
        });
    }
    let filters = FunctorId::Exp.points(m)?;
    let gens: Vec<Element> = a
        .members()
        .map(|x| Element::from_fn(filters.len(), |k| filters[k].iter().all(|&p| x.contains(p))))
        .collect();
    generate_subalgebra(filters.len(), &gens)
}

/// `σ^k(A)` as the subalgebra of the `k`-fold free product `P(m^k)` fixed by
/// permuting coordinates, transported to `P(multisets)`: each orbit of the
/// product atoms of `A^{⊗k}` under adjacent transpositions gives one fixed
/// element, and the fixed elements generate the image.
pub fn sigma_image_by_fixed_points(k: usize, a: &Subalgebra) -> Result<Subalgebra> {
    let m = a.ground();
    if m > GENERATOR_ORACLE_LIMIT || k > 4 {
        return Err(Error::SizeCap {
            size: m.max(k) as u128,
            cap: GENERATOR_ORACLE_LIMIT as u128,
        });
    }
    let atoms = a.atom_count();
    let encode = |t: &[usize], base: usize| t.iter().fold(0usize, |acc, &x| acc * base + x);
    let decode = |mut v: usize, base: usize| {
        let mut t = vec![0; k];
        for c in (0..k).rev() {
            t[c] = v % base;
            v /= base;
        }
        t
    };
    // orbits of atom tuples under coordinate swaps
    let count = atoms.pow(k as u32);
    let mut orbit: Vec<usize> = (0..count).collect();
    fn root(orbit: &mut [usize], mut x: usize) -> usize {
        while orbit[x] != x {
            orbit[x] = orbit[orbit[x]];
            x = orbit[x];
        }
        x
    }
    for v in 0..count {
        let t = decode(v, atoms);
        for c in 0..k.saturating_sub(1) {
            let mut s = t.clone();
            s.swap(c, c + 1);
            let (ra, rb) = (root(&mut orbit, v), root(&mut orbit, encode(&s, atoms)));
            orbit[ra.max(rb)] = ra.min(rb);
        }
    }
    let multisets = FunctorId::Sp(k).points(m)?;
    let mut fixed: BTreeMap<usize, Element> = BTreeMap::new();
    for v in 0..count {
        let r = root(&mut orbit, v);
        fixed.entry(r).or_insert_with(|| Element::empty(multisets.len()));
    }
    // a product atom b_0 × .. × b_{k-1} contains the point tuple p iff p_c ∈ b_c
    for (idx, ms) in multisets.iter().enumerate() {
        let mut owners = Vec::new();
        for perm in permutations(ms) {
            let labels: Vec<usize> = perm.iter().map(|&p| a.block_of(p)).collect();
            owners.push(root(&mut orbit, encode(&labels, atoms)));
        }
        owners.dedup();
        if owners.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::CrossCheck(
                "orbit sum is not invariant under coordinate permutations".into(),
            ));
        }
        fixed.get_mut(&owners[0]).expect("orbit recorded").insert(idx);
    }
    let gens: Vec<Element> = fixed.into_values().collect();
    generate_subalgebra(multisets.len(), &gens)
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

/// The generator-based image for either functor.
pub fn functor_image_by_generators(f: FunctorId, a: &Subalgebra) -> Result<Subalgebra> {
    match f {
        FunctorId::Exp => exp_image_by_generators(a),
        FunctorId::Sp(k) => sigma_image_by_fixed_points(k, a),
    }
}
