use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

/// A subset of a finite ground set `{0, .., ground-1}`, i.e. a member of the
/// ambient powerset algebra.
///
/// Stored as a dense bitset. Bits at or beyond `ground` are always clear.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    ground: usize,
    words: Vec<u64>,
}

fn word_count(ground: usize) -> usize {
    ground.div_ceil(WORD)
}

impl Element {
    pub fn empty(ground: usize) -> Self {
        Element {
            ground,
            words: vec![0; word_count(ground)],
        }
    }

    pub fn full(ground: usize) -> Self {
        let mut e = Element {
            ground,
            words: vec![u64::MAX; word_count(ground)],
        };
        e.trim();
        e
    }

    pub fn from_points<I: IntoIterator<Item = usize>>(ground: usize, points: I) -> Result<Self> {
        let mut e = Element::empty(ground);
        for p in points {
            if p >= ground {
                return Err(Error::PointOutOfRange { point: p, ground });
            }
            e.insert(p);
        }
        Ok(e)
    }

    pub fn singleton(ground: usize, point: usize) -> Result<Self> {
        Element::from_points(ground, [point])
    }

    /// Builds an element from a predicate over the ground set.
    pub fn from_fn(ground: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut e = Element::empty(ground);
        for p in 0..ground {
            if f(p) {
                e.insert(p);
            }
        }
        e
    }

    fn trim(&mut self) {
        let rem = self.ground % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub(crate) fn insert(&mut self, p: usize) {
        debug_assert!(p < self.ground);
        self.words[p / WORD] |= 1 << (p % WORD);
    }

    pub fn contains(&self, p: usize) -> bool {
        p < self.ground && self.words[p / WORD] >> (p % WORD) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.ground
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Least member, if any.
    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn points(&self) -> Points<'_> {
        Points {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    fn same_ground(&self, other: &Element) {
        assert_eq!(
            self.ground, other.ground,
            "Boolean operation across different grounds"
        );
    }

    pub fn meet(&self, other: &Element) -> Element {
        self.same_ground(other);
        Element {
            ground: self.ground,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn join(&self, other: &Element) -> Element {
        self.same_ground(other);
        Element {
            ground: self.ground,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn difference(&self, other: &Element) -> Element {
        self.same_ground(other);
        Element {
            ground: self.ground,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect(),
        }
    }

    pub fn complement(&self) -> Element {
        let mut e = Element {
            ground: self.ground,
            words: self.words.iter().map(|w| !w).collect(),
        };
        e.trim();
        e
    }

    pub fn meet_assign(&mut self, other: &Element) {
        self.same_ground(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn join_assign(&mut self, other: &Element) {
        self.same_ground(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// `self ≤ other` in the powerset order.
    pub fn is_subset(&self, other: &Element) -> bool {
        self.same_ground(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// `self ⊥ other`, i.e. the meet is zero.
    pub fn is_disjoint(&self, other: &Element) -> bool {
        self.same_ground(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn intersects(&self, other: &Element) -> bool {
        !self.is_disjoint(other)
    }

    /// Meet of a nonempty sequence of elements over the same ground.
    pub fn meet_all<'a, I: IntoIterator<Item = &'a Element>>(ground: usize, items: I) -> Element {
        let mut acc = Element::full(ground);
        for e in items {
            acc.meet_assign(e);
        }
        acc
    }
}

pub struct Points<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Points<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * WORD + bit);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.points().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}/{}", self.ground)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self.points().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", pts.join(","))
    }
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    ground: usize,
    bits: Vec<usize>,
}

impl Serialize for Element {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementRepr {
            ground: self.ground,
            bits: self.points().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ElementRepr::deserialize(d)?;
        Element::from_points(repr.ground, repr.bits).map_err(serde::de::Error::custom)
    }
}

/// A list of elements sharing one ground set, e.g. a generator list or a
/// tuple `x⃗` with one entry per subalgebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElementFamily {
    ground: usize,
    members: Vec<Element>,
}

impl ElementFamily {
    pub fn new(ground: usize, members: Vec<Element>) -> Result<Self> {
        for e in &members {
            crate::error::check_ground(ground, e.ground())?;
        }
        Ok(ElementFamily { ground, members })
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn members(&self) -> &[Element] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_stays_in_ground() {
        let e = Element::from_points(70, [0, 65]).unwrap();
        let c = e.complement();
        assert_eq!(c.len(), 68);
        assert!(!c.contains(65));
        assert!(!c.contains(70));
        assert_eq!(c.complement(), e);
    }

    #[test]
    fn points_iterate_in_order() {
        let e = Element::from_points(130, [129, 3, 64, 0]).unwrap();
        assert_eq!(e.points().collect::<Vec<_>>(), vec![0, 3, 64, 129]);
        assert_eq!(e.first(), Some(0));
        assert_eq!(Element::empty(0).first(), None);
    }

    #[test]
    fn out_of_range_point_is_rejected() {
        assert_eq!(
            Element::from_points(3, [3]),
            Err(Error::PointOutOfRange { point: 3, ground: 3 })
        );
    }

    #[test]
    fn json_form_is_sorted() {
        let e = Element::from_points(5, [4, 1]).unwrap();
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, r#"{"ground":5,"bits":[1,4]}"#);
        let back: Element = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
        assert!(serde_json::from_str::<Element>(r#"{"ground":2,"bits":[2]}"#).is_err());
    }

    #[test]
    fn order_relations() {
        let a = Element::from_points(4, [0, 1]).unwrap();
        let b = Element::from_points(4, [0, 1, 2]).unwrap();
        let c = Element::from_points(4, [3]).unwrap();
        assert!(a.is_subset(&b));
        assert!(!b.is_subset(&a));
        assert!(a.is_disjoint(&c));
        assert_eq!(a.join(&c).difference(&a), c);
        assert_eq!(b.meet(&a), a);
    }
}
