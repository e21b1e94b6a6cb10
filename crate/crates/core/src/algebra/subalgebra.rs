use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Element;
use crate::error::{check_ground, Error, Result};

/// A subalgebra of `P(ground)`, represented by its atoms: a partition of the
/// ground set into nonempty blocks.
///
/// Blocks are kept in canonical order (sorted by least member), so two
/// subalgebras are equal exactly when their partitions are. An element is a
/// member iff it is a union of blocks.
///
/// Ground size 0 is allowed and stands for the degenerate one-element
/// algebra (no atoms); it only arises from collapsed pushouts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subalgebra {
    ground: usize,
    /// `labels[p]` is the index of the block containing `p`, in
    /// restricted-growth form.
    labels: Vec<u32>,
    blocks: Vec<Element>,
}

impl Subalgebra {
    /// `{0, 1}` inside `P(ground)`.
    pub fn trivial(ground: usize) -> Self {
        Subalgebra::from_labels_unchecked(vec![0; ground])
    }

    /// The ambient powerset `P(ground)` itself.
    pub fn discrete(ground: usize) -> Self {
        Subalgebra::from_labels_unchecked((0..ground as u32).collect())
    }

    pub fn from_blocks(ground: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut labels = vec![u32::MAX; ground];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {b} is empty")));
            }
            for &p in block {
                if p >= ground {
                    return Err(Error::PointOutOfRange { point: p, ground });
                }
                if labels[p] != u32::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "point {p} occurs in more than one block"
                    )));
                }
                labels[p] = b as u32;
            }
        }
        if let Some(p) = labels.iter().position(|&l| l == u32::MAX) {
            return Err(Error::InvalidPartition(format!("point {p} is in no block")));
        }
        Ok(Subalgebra::from_dense_labels(&labels, blocks.len()))
    }

    /// Partition of `0..labels.len()` whose blocks are the level sets of
    /// `labels`; the label values themselves are irrelevant.
    pub fn from_labels<L: Eq + std::hash::Hash>(labels: &[L]) -> Self {
        let mut seen: HashMap<&L, u32> = HashMap::new();
        let canon = labels
            .iter()
            .map(|l| {
                let next = seen.len() as u32;
                *seen.entry(l).or_insert(next)
            })
            .collect();
        Subalgebra::from_labels_unchecked(canon)
    }

    /// Callers guarantee `labels` is in restricted-growth form.
    pub(crate) fn from_labels_unchecked(labels: Vec<u32>) -> Self {
        let ground = labels.len();
        let count = labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
        let mut blocks = vec![Element::empty(ground); count];
        for (p, &l) in labels.iter().enumerate() {
            blocks[l as usize].insert(p);
        }
        debug_assert!(labels
            .iter()
            .scan(0u32, |next, &l| {
                let ok = l <= *next;
                *next = (*next).max(l + 1);
                Some(ok)
            })
            .all(|ok| ok));
        Subalgebra {
            ground,
            labels,
            blocks,
        }
    }

    /// Canonicalizes arbitrary dense labels `0..count` into restricted-growth form.
    pub(crate) fn from_dense_labels(labels: &[u32], count: usize) -> Self {
        let mut remap = vec![u32::MAX; count];
        let mut next = 0u32;
        let canon = labels
            .iter()
            .map(|&l| {
                let slot = &mut remap[l as usize];
                if *slot == u32::MAX {
                    *slot = next;
                    next += 1;
                }
                *slot
            })
            .collect();
        Subalgebra::from_labels_unchecked(canon)
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    /// The atoms, in canonical order.
    pub fn blocks(&self) -> &[Element] {
        &self.blocks
    }

    pub fn atom_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Index of the atom containing `point`.
    pub fn block_of(&self, point: usize) -> usize {
        self.labels[point] as usize
    }

    pub fn is_trivial(&self) -> bool {
        self.blocks.len() <= 1
    }

    pub fn contains(&self, x: &Element) -> bool {
        x.ground() == self.ground && self.upper_projection_unchecked(x) == *x
    }

    /// `π₊`: the least member above `x`, i.e. the union of the atoms meeting `x`.
    pub fn upper_projection(&self, x: &Element) -> Result<Element> {
        check_ground(self.ground, x.ground())?;
        Ok(self.upper_projection_unchecked(x))
    }

    pub(crate) fn upper_projection_unchecked(&self, x: &Element) -> Element {
        let mut hit = vec![false; self.blocks.len()];
        let mut out = Element::empty(self.ground);
        for p in x.points() {
            let b = self.labels[p] as usize;
            if !hit[b] {
                hit[b] = true;
                out.join_assign(&self.blocks[b]);
            }
        }
        out
    }

    /// `π₋`: the greatest member below `x`.
    pub fn lower_projection(&self, x: &Element) -> Result<Element> {
        Ok(self.upper_projection(&x.complement())?.complement())
    }

    /// Join of the atoms with the given indices.
    pub fn member_from_atoms(&self, atoms: impl IntoIterator<Item = usize>) -> Element {
        let mut out = Element::empty(self.ground);
        for a in atoms {
            out.join_assign(&self.blocks[a]);
        }
        out
    }

    /// Enumerates all `2^k` members, `k` the number of atoms. Intended for
    /// brute-force checks on small algebras.
    pub fn members(&self) -> impl Iterator<Item = Element> + '_ {
        let k = self.blocks.len();
        assert!(k < 32, "refusing to enumerate 2^{k} members");
        (0u64..1 << k).map(move |mask| {
            self.member_from_atoms((0..k).filter(move |a| mask >> a & 1 == 1))
        })
    }

    /// `self ≤ other` as subalgebras of the same powerset: every atom of
    /// `self` is a member of `other`.
    pub fn is_subalgebra_of(&self, other: &Subalgebra) -> bool {
        self.ground == other.ground
            && self
                .labels
                .iter()
                .zip(&other.labels)
                .all(|(&mine, &theirs)| {
                    let rep = other.blocks[theirs as usize].first().unwrap();
                    self.labels[rep] == mine
                })
    }

    /// Atom index of `self` containing atom `b` of a finer algebra `finer`.
    pub(crate) fn coarse_label_of_block(&self, finer: &Subalgebra, b: usize) -> usize {
        self.block_of(finer.blocks[b].first().expect("blocks are nonempty"))
    }

    pub fn to_block_lists(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.points().collect()).collect()
    }
}

impl fmt::Debug for Subalgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}/{}", self.ground)
    }
}

impl fmt::Display for Subalgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
struct SubalgebraRepr {
    ground: usize,
    blocks: Vec<Vec<usize>>,
}

impl Serialize for Subalgebra {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubalgebraRepr {
            ground: self.ground,
            blocks: self.to_block_lists(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subalgebra {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SubalgebraRepr::deserialize(d)?;
        Subalgebra::from_blocks(repr.ground, &repr.blocks).map_err(serde::de::Error::custom)
    }
}
