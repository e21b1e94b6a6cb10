use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::size_cap;
use crate::algebra::Subalgebra;
use crate::error::{Error, Result};

/// A total map between finite sets `0..domain` and `0..codomain`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinMap {
    codomain: usize,
    values: Vec<usize>,
}

impl FinMap {
    pub fn new(codomain: usize, values: Vec<usize>) -> Result<Self> {
        if let Some(&v) = values.iter().find(|&&v| v >= codomain) {
            return Err(Error::InvalidCube(format!(
                "map value {v} outside codomain of size {codomain}"
            )));
        }
        Ok(FinMap { codomain, values })
    }

    pub fn identity(size: usize) -> Self {
        FinMap {
            codomain: size,
            values: (0..size).collect(),
        }
    }

    pub fn domain(&self) -> usize {
        self.values.len()
    }

    pub fn codomain(&self) -> usize {
        self.codomain
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply(&self, x: usize) -> usize {
        self.values[x]
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &FinMap) -> FinMap {
        FinMap {
            codomain: next.codomain,
            values: self.values.iter().map(|&v| next.values[v]).collect(),
        }
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.codomain];
        for &v in &self.values {
            hit[v] = true;
        }
        hit.iter().all(|&h| h)
    }
}

/// A commutative `n`-cube of finite sets: a set `X_s` for every subset `s`
/// of `{0, .., n-1}` (encoded as a bit mask) and a map `X_s → X_t` for every
/// `s ⊆ t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinCube {
    n: usize,
    spaces: Vec<usize>,
    /// Every pair `s ⊆ t`, identities included.
    maps: BTreeMap<(u32, u32), FinMap>,
}

/// Cubes above this dimension are rejected (subset keys use one digit per index).
pub const MAX_DIMENSION: usize = 10;

fn is_subset(s: u32, t: u32) -> bool {
    s & !t == 0
}

impl FinCube {
    /// Builds a cube from the given maps, filling in identities and any
    /// missing `s ⊆ t` by composing along single-index steps. Given maps are
    /// kept as they are; whether they compose correctly is what
    /// [`FinCube::is_functorial`] checks.
    pub fn new(n: usize, spaces: Vec<usize>, maps: BTreeMap<(u32, u32), FinMap>) -> Result<Self> {
        if n > MAX_DIMENSION {
            return Err(Error::InvalidCube(format!("dimension {n} above {MAX_DIMENSION}")));
        }
        if spaces.len() != 1 << n {
            return Err(Error::InvalidCube(format!(
                "{} spaces given for dimension {n}",
                spaces.len()
            )));
        }
        for (&(s, t), f) in &maps {
            if t >= 1 << n || !is_subset(s, t) {
                return Err(Error::InvalidCube(format!("no map {s:b} -> {t:b} in the cube")));
            }
            if f.domain() != spaces[s as usize] || f.codomain() != spaces[t as usize] {
                return Err(Error::InvalidCube(format!(
                    "map {} -> {} has shape {}→{}, expected {}→{}",
                    subset_key(n, s),
                    subset_key(n, t),
                    f.domain(),
                    f.codomain(),
                    spaces[s as usize],
                    spaces[t as usize]
                )));
            }
        }
        let mut cube = FinCube { n, spaces, maps };
        // fill by increasing |t - s| so every shorter map already exists
        let full = (1u32 << n) - 1;
        for gap in 0..=n as u32 {
            for s in 0..=full {
                for t in 0..=full {
                    if !is_subset(s, t) || (t & !s).count_ones() != gap {
                        continue;
                    }
                    if cube.maps.contains_key(&(s, t)) {
                        continue;
                    }
                    let f = if gap == 0 {
                        FinMap::identity(cube.spaces[s as usize])
                    } else {
                        let step = s | (1 << (t & !s).trailing_zeros());
                        let first = cube.maps.get(&(s, step)).ok_or_else(|| {
                            Error::InvalidCube(format!(
                                "missing map {} -> {}",
                                subset_key(n, s),
                                subset_key(n, step)
                            ))
                        })?;
                        first.then(&cube.maps[&(step, t)])
                    };
                    cube.maps.insert((s, t), f);
                }
            }
        }
        Ok(cube)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn space(&self, s: u32) -> usize {
        self.spaces[s as usize]
    }

    pub fn spaces(&self) -> &[usize] {
        &self.spaces
    }

    pub fn map(&self, s: u32, t: u32) -> &FinMap {
        &self.maps[&(s, t)]
    }

    /// Identity and composition laws for every `s ⊆ t ⊆ u`.
    pub fn is_functorial(&self) -> bool {
        let full = (1u32 << self.n) - 1;
        for s in 0..=full {
            if *self.map(s, s) != FinMap::identity(self.space(s)) {
                return false;
            }
            for t in (0..=full).filter(|&t| is_subset(s, t)) {
                for u in (0..=full).filter(|&u| is_subset(t, u)) {
                    if self.map(s, t).then(self.map(t, u)) != *self.map(s, u) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn require_functorial(&self) -> Result<()> {
        if self.is_functorial() {
            Ok(())
        } else {
            Err(Error::InvalidCube("the cube is not functorial".into()))
        }
    }

    /// The cube `s ↦ X_{φ(s)}` for a monotone `φ` from subsets of `k` to
    /// subsets of `n`.
    pub fn subcube(&self, k: usize, phi: impl Fn(u32) -> u32) -> Result<FinCube> {
        let full = (1u32 << k) - 1;
        let image: Vec<u32> = (0..=full).map(&phi).collect();
        let mut maps = BTreeMap::new();
        for s in 0..=full {
            for t in (0..=full).filter(|&t| is_subset(s, t)) {
                let (ps, pt) = (image[s as usize], image[t as usize]);
                if !is_subset(ps, pt) {
                    return Err(Error::InvalidCube("subcube index map is not monotone".into()));
                }
                maps.insert((s, t), self.map(ps, pt).clone());
            }
        }
        let spaces = image.iter().map(|&p| self.space(p)).collect();
        FinCube::new(k, spaces, maps)
    }

    /// The subalgebras of `P(X_∅)` dual to the maps `X_∅ → X_{{i}}`: points
    /// are grouped by their image.
    pub fn dual_subalgebras(&self) -> Vec<Subalgebra> {
        (0..self.n)
            .map(|i| Subalgebra::from_labels(self.map(0, 1 << i).values()))
            .collect()
    }
}

/// First pairwise-compatible tuple `p⃗ ∈ ∏ X_{{i}}` that no point of `X_∅`
/// maps onto, in lexicographic order.
pub fn n_commutative_counterexample(cube: &FinCube) -> Result<Option<Vec<usize>>> {
    cube.require_functorial()?;
    let n = cube.n();
    let lifts: HashSet<Vec<usize>> = (0..cube.space(0))
        .map(|q| (0..n).map(|i| cube.map(0, 1 << i).apply(q)).collect())
        .collect();
    let mut tuple = Vec::with_capacity(n);
    Ok(find_unlifted(cube, &lifts, &mut tuple).then_some(tuple))
}

fn find_unlifted(cube: &FinCube, lifts: &HashSet<Vec<usize>>, tuple: &mut Vec<usize>) -> bool {
    let k = tuple.len();
    if k == cube.n() {
        return !lifts.contains(tuple);
    }
    for p in 0..cube.space(1 << k) {
        let ok = tuple.iter().enumerate().all(|(i, &pi)| {
            let both = (1 << i) | (1 << k);
            cube.map(1 << i, both).apply(pi) == cube.map(1 << k, both).apply(p)
        });
        if ok {
            tuple.push(p);
            if find_unlifted(cube, lifts, tuple) {
                return true;
            }
            tuple.pop();
        }
    }
    false
}

/// Every pairwise-compatible tuple of corner points lifts to `X_∅`.
pub fn is_n_commutative(cube: &FinCube) -> Result<bool> {
    Ok(n_commutative_counterexample(cube)?.is_none())
}

/// `b(∅) = ⋃a⃗`, `b(s) = ⋂_{i∈s} a_i`, each sorted.
pub fn index_sets(a: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = a.len();
    let mut union: Vec<usize> = a.iter().flatten().copied().collect();
    union.sort_unstable();
    union.dedup();
    (0u32..1 << n)
        .map(|s| {
            union
                .iter()
                .copied()
                .filter(|x| (0..n).all(|i| s >> i & 1 == 0 || a[i].contains(x)))
                .collect()
        })
        .collect()
}

/// The cube of restriction maps `2^{b(s)} → 2^{b(t)}`. A point of `2^{b}` is
/// a 0/1 tuple indexed by the sorted `b`, numbered in lexicographic order
/// (the first coordinate is the most significant bit).
pub fn projection_cube(a: &[Vec<usize>]) -> Result<FinCube> {
    let n = a.len();
    if n > MAX_DIMENSION {
        return Err(Error::InvalidCube(format!("dimension {n} above {MAX_DIMENSION}")));
    }
    let b = index_sets(a);
    let width = b[0].len();
    if width >= 64 || (1u128 << width) > size_cap() {
        return Err(Error::SizeCap {
            size: 1u128.checked_shl(width as u32).unwrap_or(u128::MAX),
            cap: size_cap(),
        });
    }
    let spaces: Vec<usize> = b.iter().map(|bs| 1usize << bs.len()).collect();
    let mut maps = BTreeMap::new();
    for s in 0u32..1 << n {
        for i in (0..n).filter(|&i| s >> i & 1 == 0) {
            let t = s | 1 << i;
            let (from, to) = (&b[s as usize], &b[t as usize]);
            let positions: Vec<usize> = to
                .iter()
                .map(|x| from.iter().position(|y| y == x).expect("b(t) ⊆ b(s)"))
                .collect();
            let values = (0..spaces[s as usize])
                .map(|p| {
                    positions.iter().enumerate().fold(0usize, |acc, (k, &pos)| {
                        let bit = p >> (from.len() - 1 - pos) & 1;
                        acc | bit << (to.len() - 1 - k)
                    })
                })
                .collect();
            maps.insert((s, t), FinMap::new(spaces[t as usize], values)?);
        }
    }
    FinCube::new(n, spaces, maps)
}

/// Subset key used in cube JSON: the members as decimal digits, ascending.
pub fn subset_key(n: usize, s: u32) -> String {
    (0..n)
        .filter(|&i| s >> i & 1 == 1)
        .map(|i| char::from_digit(i as u32, 10).expect("dimension at most 10"))
        .collect()
}

fn parse_subset_key(n: usize, key: &str) -> Result<u32> {
    let mut s = 0u32;
    for c in key.chars() {
        let i = c
            .to_digit(10)
            .filter(|&d| (d as usize) < n)
            .ok_or_else(|| Error::InvalidCube(format!("bad subset key {key:?}")))?;
        if s >> i & 1 == 1 {
            return Err(Error::InvalidCube(format!("repeated index in subset key {key:?}")));
        }
        s |= 1 << i;
    }
    Ok(s)
}

#[derive(Serialize, Deserialize)]
struct CubeRepr {
    n: usize,
    spaces: BTreeMap<String, usize>,
    maps: BTreeMap<String, Vec<usize>>,
}

impl Serialize for FinCube {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.n;
        let spaces = (0u32..1 << n)
            .map(|s| (subset_key(n, s), self.space(s)))
            .collect();
        // single-index steps determine the rest
        let maps = self
            .maps
            .iter()
            .filter(|(&(s, t), _)| (t & !s).count_ones() == 1)
            .map(|(&(s, t), f)| {
                (format!("{}->{}", subset_key(n, s), subset_key(n, t)), f.values.clone())
            })
            .collect();
        CubeRepr { n, spaces, maps }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for FinCube {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = CubeRepr::deserialize(d)?;
        let n = repr.n;
        if n > MAX_DIMENSION {
            return Err(D::Error::custom(format!("dimension {n} above {MAX_DIMENSION}")));
        }
        let mut spaces = vec![None; 1 << n];
        for (key, size) in &repr.spaces {
            let s = parse_subset_key(n, key).map_err(D::Error::custom)?;
            spaces[s as usize] = Some(*size);
        }
        let spaces: Vec<usize> = spaces
            .into_iter()
            .enumerate()
            .map(|(s, v)| {
                v.ok_or_else(|| {
                    D::Error::custom(format!("missing space {:?}", subset_key(n, s as u32)))
                })
            })
            .collect::<std::result::Result<_, _>>()?;
        let mut maps = BTreeMap::new();
        for (key, values) in repr.maps {
            let (from, to) = key
                .split_once("->")
                .ok_or_else(|| D::Error::custom(format!("bad map key {key:?}")))?;
            let s = parse_subset_key(n, from).map_err(D::Error::custom)?;
            let t = parse_subset_key(n, to).map_err(D::Error::custom)?;
            let codomain = *spaces.get(t as usize).unwrap_or(&0);
            maps.insert((s, t), FinMap::new(codomain, values).map_err(D::Error::custom)?);
        }
        FinCube::new(n, spaces, maps).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(a: &[&[usize]]) -> Vec<Vec<usize>> {
        a.iter().map(|s| s.to_vec()).collect()
    }

    #[test]
    fn disjoint_supports() {
        let c = projection_cube(&sets(&[&[0], &[1], &[2]])).unwrap();
        assert_eq!(c.space(0), 8);
        for s in 1..8u32 {
            let expected = if s.count_ones() == 1 { 2 } else { 1 };
            assert_eq!(c.space(s), expected);
        }
        assert!(c.is_functorial());
        assert!(is_n_commutative(&c).unwrap());
    }

    #[test]
    fn triangle_supports() {
        let c = projection_cube(&sets(&[&[0, 1], &[1, 2], &[0, 2]])).unwrap();
        assert_eq!(c.space(0b011), 2);
        assert_eq!(c.space(0b111), 1);
        assert!(c.is_functorial());
        assert!(is_n_commutative(&c).unwrap());
    }

    #[test]
    fn points_are_lexicographic() {
        let c = projection_cube(&sets(&[&[0, 1], &[1]])).unwrap();
        // (x0, x1) = (0,1) is point 1 and restricts to x1 = 1
        assert_eq!(c.map(0, 0b10).values(), &[0, 1, 0, 1]);
        assert_eq!(c.map(0, 0b01).values(), &[0, 1, 2, 3]);
    }

    #[test]
    fn empty_start_with_compatible_tuples() {
        let mut maps = BTreeMap::new();
        maps.insert((0, 1), FinMap::new(1, vec![]).unwrap());
        let c = FinCube::new(1, vec![0, 1], maps).unwrap();
        assert!(!is_n_commutative(&c).unwrap());
    }

    #[test]
    fn square_is_fiber_product_surjectivity() {
        // X_∅ = {0,1} mapping diagonally into 2×2 over a point
        let mut maps = BTreeMap::new();
        maps.insert((0, 1), FinMap::new(2, vec![0, 1]).unwrap());
        maps.insert((0, 2), FinMap::new(2, vec![0, 1]).unwrap());
        maps.insert((1, 3), FinMap::new(1, vec![0, 0]).unwrap());
        maps.insert((2, 3), FinMap::new(1, vec![0, 0]).unwrap());
        let c = FinCube::new(2, vec![2, 2, 2, 1], maps).unwrap();
        assert_eq!(n_commutative_counterexample(&c).unwrap(), Some(vec![0, 1]));
    }

    #[test]
    fn non_functorial_cube_is_rejected() {
        let mut maps = BTreeMap::new();
        maps.insert((0, 1), FinMap::new(2, vec![0, 1]).unwrap());
        maps.insert((0, 2), FinMap::new(2, vec![0, 1]).unwrap());
        maps.insert((1, 3), FinMap::new(2, vec![0, 1]).unwrap());
        maps.insert((2, 3), FinMap::new(2, vec![1, 0]).unwrap());
        let c = FinCube::new(2, vec![2, 2, 2, 2], maps).unwrap();
        assert!(!c.is_functorial());
        assert!(matches!(is_n_commutative(&c), Err(Error::InvalidCube(_))));
    }

    #[test]
    fn json_round_trip() {
        let c = projection_cube(&sets(&[&[0, 1], &[1, 2], &[0, 2]])).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains(r#""->0""#));
        let back: FinCube = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<FinCube>(r#"{"n":1,"spaces":{"":2},"maps":{}}"#).is_err());
    }
}
