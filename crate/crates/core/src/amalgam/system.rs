use serde::{Deserialize, Serialize};

use crate::algebra::{common_ground, intersect, Subalgebra};
use crate::error::{Error, Result};

/// Overlap data of one pair `i < j`: the atoms of `A_i` and of `A_j` mapped
/// onto the atoms of the shared subalgebra `A_i ∩ A_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PairOverlap {
    pub i: usize,
    pub j: usize,
    pub inter_atoms: usize,
    pub map_i: Vec<usize>,
    pub map_j: Vec<usize>,
}

/// `n` finite Boolean algebras given by atom counts, glued pairwise along
/// common subalgebras. Only pairwise data is stored; triple coherence is
/// checked by [`assemble`](super::assemble) when it matters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OverlapSystem {
    atom_counts: Vec<usize>,
    /// Sorted by `(i, j)`, one entry per pair.
    pairs: Vec<PairOverlap>,
}

impl OverlapSystem {
    pub fn new(atom_counts: Vec<usize>, pairs: Vec<PairOverlap>) -> Result<Self> {
        let n = atom_counts.len();
        if let Some(i) = atom_counts.iter().position(|&c| c == 0) {
            return Err(Error::InvalidSystem(format!("algebra {i} has no atoms")));
        }
        let mut slots: Vec<Option<PairOverlap>> = vec![None; n * n.saturating_sub(1) / 2];
        for mut p in pairs {
            if p.i > p.j {
                std::mem::swap(&mut p.i, &mut p.j);
                std::mem::swap(&mut p.map_i, &mut p.map_j);
            }
            if p.i == p.j || p.j >= n {
                return Err(Error::InvalidSystem(format!("bad pair ({}, {})", p.i, p.j)));
            }
            for (side, map) in [(p.i, &p.map_i), (p.j, &p.map_j)] {
                if map.len() != atom_counts[side] {
                    return Err(Error::InvalidSystem(format!(
                        "pair ({}, {}): map for algebra {side} has length {}, expected {}",
                        p.i,
                        p.j,
                        map.len(),
                        atom_counts[side]
                    )));
                }
                let mut hit = vec![false; p.inter_atoms];
                for &v in map {
                    if v >= p.inter_atoms {
                        return Err(Error::InvalidSystem(format!(
                            "pair ({}, {}): value {v} out of range 0..{}",
                            p.i, p.j, p.inter_atoms
                        )));
                    }
                    hit[v] = true;
                }
                if let Some(c) = hit.iter().position(|h| !h) {
                    return Err(Error::InvalidSystem(format!(
                        "pair ({}, {}): map for algebra {side} misses intersection atom {c}",
                        p.i, p.j
                    )));
                }
            }
            let slot = &mut slots[pair_slot(n, p.i, p.j)];
            if slot.is_some() {
                return Err(Error::InvalidSystem(format!("pair ({}, {}) given twice", p.i, p.j)));
            }
            *slot = Some(p);
        }
        let mut out = Vec::with_capacity(slots.len());
        for (k, s) in slots.into_iter().enumerate() {
            match s {
                Some(p) => out.push(p),
                None => {
                    let (i, j) = slot_pair(n, k);
                    return Err(Error::InvalidSystem(format!("pair ({i}, {j}) is missing")));
                }
            }
        }
        Ok(OverlapSystem {
            atom_counts,
            pairs: out,
        })
    }

    pub fn n(&self) -> usize {
        self.atom_counts.len()
    }

    pub fn atom_counts(&self) -> &[usize] {
        &self.atom_counts
    }

    pub fn pairs(&self) -> &[PairOverlap] {
        &self.pairs
    }

    pub fn pair(&self, i: usize, j: usize) -> &PairOverlap {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        &self.pairs[pair_slot(self.n(), lo, hi)]
    }

    /// The map `atoms(A_i) → atoms(A_i ∩ A_j)`.
    pub fn map_from(&self, i: usize, j: usize) -> &[usize] {
        let p = self.pair(i, j);
        if p.i == i {
            &p.map_i
        } else {
            &p.map_j
        }
    }

    pub fn inter_atoms(&self, i: usize, j: usize) -> usize {
        self.pair(i, j).inter_atoms
    }

    /// The system formed by the first `m` algebras.
    pub fn prefix(&self, m: usize) -> OverlapSystem {
        assert!(m <= self.n());
        OverlapSystem {
            atom_counts: self.atom_counts[..m].to_vec(),
            pairs: self
                .pairs
                .iter()
                .filter(|p| p.j < m)
                .cloned()
                .collect(),
        }
    }

    /// `∏ atomCounts`, saturating.
    pub fn tuple_space(&self) -> u128 {
        self.atom_counts
            .iter()
            .fold(1u128, |acc, &c| acc.saturating_mul(c as u128))
    }
}

fn pair_slot(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

fn slot_pair(n: usize, k: usize) -> (usize, usize) {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .nth(k)
        .expect("slot in range")
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct SystemRepr {
    atom_counts: Vec<usize>,
    #[serde(default)]
    pairs: Vec<PairOverlap>,
}

impl<'de> Deserialize<'de> for OverlapSystem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SystemRepr::deserialize(d)?;
        OverlapSystem::new(repr.atom_counts, repr.pairs).map_err(serde::de::Error::custom)
    }
}

/// The overlap data of a family of subalgebras of one powerset.
pub fn embed_as_system(family: &[Subalgebra]) -> Result<OverlapSystem> {
    common_ground(family)?;
    let n = family.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let c = intersect(&family[i], &family[j])?;
            let to_c = |a: &Subalgebra| -> Vec<usize> {
                a.blocks()
                    .iter()
                    .map(|b| c.block_of(b.first().expect("blocks are nonempty")))
                    .collect()
            };
            pairs.push(PairOverlap {
                i,
                j,
                inter_atoms: c.atom_count(),
                map_i: to_c(&family[i]),
                map_j: to_c(&family[j]),
            });
        }
    }
    OverlapSystem::new(family.iter().map(|a| a.atom_count()).collect(), pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slots_enumerate_pairs_in_order() {
        let n = 5;
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                assert_eq!(pair_slot(n, i, j), k);
                assert_eq!(slot_pair(n, k), (i, j));
                k += 1;
            }
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let text = r#"{"atomCounts":[2,2],"pairs":[{"i":0,"j":1,"interAtoms":1,"mapI":[0,0],"mapJ":[0,0]}]}"#;
        let s: OverlapSystem = serde_json::from_str(text).unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), text);
        let missing = r#"{"atomCounts":[2,2,2],"pairs":[{"i":0,"j":1,"interAtoms":1,"mapI":[0,0],"mapJ":[0,0]}]}"#;
        assert!(serde_json::from_str::<OverlapSystem>(missing).is_err());
        let not_onto = r#"{"atomCounts":[2,2],"pairs":[{"i":0,"j":1,"interAtoms":2,"mapI":[0,0],"mapJ":[0,1]}]}"#;
        let err = serde_json::from_str::<OverlapSystem>(not_onto).unwrap_err();
        assert!(err.to_string().contains("misses intersection atom 1"));
    }

    #[test]
    fn reversed_pairs_are_normalized() {
        let s = OverlapSystem::new(
            vec![2, 3],
            vec![PairOverlap {
                i: 1,
                j: 0,
                inter_atoms: 2,
                map_i: vec![0, 1, 1],
                map_j: vec![1, 0],
            }],
        )
        .unwrap();
        assert_eq!(s.map_from(0, 1), &[1, 0]);
        assert_eq!(s.map_from(1, 0), &[0, 1, 1]);
    }

    #[test]
    fn embedding_noncomm() {
        let fam = crate::fixtures::noncomm().family;
        let s = embed_as_system(&fam).unwrap();
        assert_eq!(s.atom_counts(), &[2, 2]);
        assert_eq!(s.inter_atoms(0, 1), 1);
        assert_eq!(s.map_from(0, 1), &[0, 0]);
        let single = embed_as_system(&fam[..1]).unwrap();
        assert_eq!(single.n(), 1);
        assert!(single.pairs().is_empty());
    }
}
