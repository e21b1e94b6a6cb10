//! Elements, subalgebras and the partition-lattice operations on them.
//!
//! Subalgebras of `P(m)` are ordered the opposite way to their partitions:
//! intersecting two subalgebras is the join of the partitions (merge blocks
//! that overlap) and the generated join is the meet of the partitions
//! (common refinement).

mod element;
mod subalgebra;

pub use element::{Element, ElementFamily, Points};
pub use subalgebra::Subalgebra;

use serde::{Deserialize, Serialize};

use crate::error::{check_ground, Result};

/// The smallest subalgebra of `P(m)` containing every generator: points are
/// grouped by which generators they belong to.
pub fn generate_subalgebra(m: usize, gens: &[Element]) -> Result<Subalgebra> {
    for g in gens {
        check_ground(m, g.ground())?;
    }
    let mut labels = vec![0u32; m];
    let mut count = usize::from(m > 0);
    for g in gens {
        let mut remap = vec![u32::MAX; 2 * count];
        let mut next = 0u32;
        for (p, label) in labels.iter_mut().enumerate() {
            let key = 2 * *label as usize + usize::from(g.contains(p));
            if remap[key] == u32::MAX {
                remap[key] = next;
                next += 1;
            }
            *label = remap[key];
        }
        count = next as usize;
    }
    Ok(Subalgebra::from_dense_labels(&labels, count))
}

/// Same as [`generate_subalgebra`] for an already validated family.
pub fn generate_from_family(family: &ElementFamily) -> Subalgebra {
    generate_subalgebra(family.ground(), family.members()).expect("family grounds agree")
}

/// `A ∩ B`: the members common to both. As partitions this is the finest
/// partition coarser than both, computed with union-find.
pub fn intersect(a: &Subalgebra, b: &Subalgebra) -> Result<Subalgebra> {
    check_ground(a.ground(), b.ground())?;
    let mut uf = UnionFind::new(a.ground());
    for alg in [a, b] {
        for block in alg.blocks() {
            let mut pts = block.points();
            if let Some(first) = pts.next() {
                for p in pts {
                    uf.union(first, p);
                }
            }
        }
    }
    let roots: Vec<u32> = (0..a.ground()).map(|p| uf.find(p) as u32).collect();
    Ok(Subalgebra::from_dense_labels(&roots, a.ground()))
}

/// Intersection of a nonempty family. The empty family has no ambient
/// ground to return, so it yields `None`.
pub fn intersect_all(family: &[Subalgebra]) -> Result<Option<Subalgebra>> {
    let Some((first, rest)) = family.split_first() else {
        return Ok(None);
    };
    let mut acc = first.clone();
    for s in rest {
        acc = intersect(&acc, s)?;
    }
    Ok(Some(acc))
}

/// `⟨A ∪ B⟩`: the common refinement of the two partitions.
pub fn join_subalgebras(a: &Subalgebra, b: &Subalgebra) -> Result<Subalgebra> {
    check_ground(a.ground(), b.ground())?;
    let (na, nb) = (a.atom_count(), b.atom_count());
    let pairs: Vec<(u32, u32)> = a.labels().iter().copied().zip(b.labels().iter().copied()).collect();
    if na.saturating_mul(nb) <= 1 << 22 {
        let dense: Vec<u32> = pairs.iter().map(|&(x, y)| x * nb as u32 + y).collect();
        Ok(Subalgebra::from_dense_labels(&dense, na * nb))
    } else {
        Ok(Subalgebra::from_labels(&pairs))
    }
}

/// `⟨⋃ family⟩` inside `P(ground)`; the empty join is the trivial algebra.
pub fn join_all(ground: usize, family: &[Subalgebra]) -> Result<Subalgebra> {
    let mut acc = Subalgebra::trivial(ground);
    for s in family {
        acc = join_subalgebras(&acc, s)?;
    }
    Ok(acc)
}

/// Checks that every member of `family` lives in `P(ground)`.
pub fn common_ground(family: &[Subalgebra]) -> Result<Option<usize>> {
    let Some(first) = family.first() else {
        return Ok(None);
    };
    for s in family {
        check_ground(first.ground(), s.ground())?;
    }
    Ok(Some(first.ground()))
}

/// A family of subalgebras of one powerset, as read from and written to JSON:
/// `{"ground": m, "subalgebras": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Family {
    pub ground: usize,
    pub subalgebras: Vec<Subalgebra>,
}

impl Family {
    pub fn new(ground: usize, subalgebras: Vec<Subalgebra>) -> Result<Self> {
        for s in &subalgebras {
            check_ground(ground, s.ground())?;
        }
        Ok(Family { ground, subalgebras })
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Repr {
            ground: usize,
            subalgebras: Vec<Subalgebra>,
        }
        let r = Repr::deserialize(d)?;
        Family::new(r.ground, r.subalgebras).map_err(serde::de::Error::custom)
    }
}

/// Independence: every tuple of atoms, one from each subalgebra, has a
/// nonempty meet. Equivalently the generated join has exactly
/// `∏ |atoms(A_i)|` atoms, which is what is counted here.
pub fn is_independent(family: &[Subalgebra]) -> Result<bool> {
    let Some(ground) = common_ground(family)? else {
        return Ok(true);
    };
    let mut expected: usize = 1;
    for s in family {
        match expected.checked_mul(s.atom_count()) {
            Some(e) if e <= ground.max(1) => expected = e,
            // more tuples than points: some tuple meets in the empty set
            _ => return Ok(ground == 0),
        }
    }
    Ok(join_all(ground, family)?.atom_count() == expected)
}

/// Partition of the atoms of `fine` induced by a coarser subalgebra, as a
/// subalgebra of `P(atoms(fine))`.
pub fn relative_partition(coarse: &Subalgebra, fine: &Subalgebra) -> Result<Subalgebra> {
    check_ground(coarse.ground(), fine.ground())?;
    let labels: Vec<u32> = (0..fine.atom_count())
        .map(|b| coarse.coarse_label_of_block(fine, b) as u32)
        .collect();
    Ok(Subalgebra::from_labels(&labels))
}

/// All set partitions of `{0, .., m-1}` as restricted-growth label strings,
/// in lexicographic order.
pub fn set_partitions(m: usize) -> Vec<Vec<u32>> {
    fn rec(labels: &mut Vec<u32>, m: usize, blocks: u32, out: &mut Vec<Vec<u32>>) {
        if labels.len() == m {
            out.push(labels.clone());
            return;
        }
        let top = if labels.is_empty() { 0 } else { blocks };
        for l in 0..=top {
            labels.push(l);
            rec(labels, m, blocks.max(l + 1), out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(m), m, 0, &mut out);
    out
}

/// Every subalgebra of `P(m)`, in the order of [`set_partitions`].
pub fn all_subalgebras(m: usize) -> Vec<Subalgebra> {
    set_partitions(m)
        .into_iter()
        .map(Subalgebra::from_labels_unchecked)
        .collect()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller index as root so labels stay stable
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn el(m: usize, pts: &[usize]) -> Element {
        Element::from_points(m, pts.iter().copied()).unwrap()
    }

    fn sub(m: usize, blocks: &[&[usize]]) -> Subalgebra {
        let blocks: Vec<Vec<usize>> = blocks.iter().map(|b| b.to_vec()).collect();
        Subalgebra::from_blocks(m, &blocks).unwrap()
    }

    #[test]
    fn partitions_are_counted_by_bell_numbers() {
        let bell = [1, 1, 2, 5, 15, 52, 203];
        for (m, &b) in bell.iter().enumerate() {
            assert_eq!(set_partitions(m).len(), b);
        }
        assert_eq!(set_partitions(3)[0], vec![0, 0, 0]);
        assert_eq!(set_partitions(3)[4], vec![0, 1, 2]);
    }

    #[test]
    fn generate_examples() {
        assert_eq!(generate_subalgebra(3, &[]).unwrap(), sub(3, &[&[0, 1, 2]]));
        assert_eq!(
            generate_subalgebra(3, &[el(3, &[0])]).unwrap(),
            sub(3, &[&[0], &[1, 2]])
        );
        assert_eq!(
            generate_subalgebra(4, &[el(4, &[0, 1]), el(4, &[1, 2])]).unwrap(),
            Subalgebra::discrete(4)
        );
        assert!(generate_subalgebra(4, &[el(3, &[0])]).is_err());
    }

    #[test]
    fn blocks_are_canonicalized() {
        let a = sub(4, &[&[3, 1], &[2], &[0]]);
        assert_eq!(a.to_block_lists(), vec![vec![0], vec![1, 3], vec![2]]);
        assert_eq!(a, sub(4, &[&[0], &[2], &[1, 3]]));
    }

    #[test]
    fn malformed_partitions_are_rejected() {
        let bad = |b: &[Vec<usize>]| Subalgebra::from_blocks(3, b).unwrap_err();
        assert!(matches!(bad(&[vec![0, 1], vec![1, 2]]), crate::Error::InvalidPartition(_)));
        assert!(matches!(bad(&[vec![0, 1]]), crate::Error::InvalidPartition(_)));
        assert!(matches!(bad(&[vec![0, 1, 2], vec![]]), crate::Error::InvalidPartition(_)));
        assert!(matches!(bad(&[vec![0, 1, 5]]), crate::Error::PointOutOfRange { .. }));
    }

    #[test]
    fn intersect_examples() {
        let a = sub(3, &[&[0], &[1, 2]]);
        let b = sub(3, &[&[1], &[0, 2]]);
        assert_eq!(intersect(&a, &b).unwrap(), Subalgebra::trivial(3));
        assert_eq!(intersect(&a, &a).unwrap(), a);
        let c = sub(4, &[&[0, 1], &[2, 3]]);
        let d = sub(4, &[&[0, 1], &[2], &[3]]);
        assert_eq!(intersect(&c, &d).unwrap(), c);
        assert!(intersect(&a, &c).is_err());
    }

    #[test]
    fn join_examples() {
        let a = sub(3, &[&[0], &[1, 2]]);
        let b = sub(3, &[&[1], &[0, 2]]);
        assert_eq!(join_subalgebras(&a, &b).unwrap(), Subalgebra::discrete(3));
        assert_eq!(join_subalgebras(&a, &Subalgebra::trivial(3)).unwrap(), a);
        let c = sub(4, &[&[0, 1], &[2, 3]]);
        let d = sub(4, &[&[0, 2], &[1, 3]]);
        assert_eq!(join_subalgebras(&c, &d).unwrap(), Subalgebra::discrete(4));
    }

    #[test]
    fn projection_examples() {
        let a = sub(3, &[&[0], &[1, 2]]);
        assert_eq!(a.upper_projection(&el(3, &[1])).unwrap(), el(3, &[1, 2]));
        assert_eq!(a.upper_projection(&el(3, &[0])).unwrap(), el(3, &[0]));
        assert_eq!(
            Subalgebra::trivial(5).upper_projection(&el(5, &[3])).unwrap(),
            Element::full(5)
        );
        assert_eq!(a.lower_projection(&el(3, &[0, 1])).unwrap(), el(3, &[0]));
        assert!(a.upper_projection(&el(4, &[0])).is_err());
    }

    #[test]
    fn independence_examples() {
        let a = generate_subalgebra(4, &[el(4, &[0, 1])]).unwrap();
        let b = generate_subalgebra(4, &[el(4, &[0, 2])]).unwrap();
        assert!(is_independent(&[a, b]).unwrap());
        let c = generate_subalgebra(2, &[el(2, &[0])]).unwrap();
        assert!(!is_independent(&[c.clone(), c]).unwrap());

        let fam = fixtures::low_coherent_not_high().family;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(is_independent(&[fam[i].clone(), fam[j].clone()]).unwrap());
                }
            }
        }
        assert!(!is_independent(&fam).unwrap());
    }

    /// Definitional independence: nonzero members always have nonzero meet.
    fn independent_by_members(family: &[Subalgebra]) -> bool {
        fn rec(family: &[Subalgebra], acc: Element) -> bool {
            match family.split_first() {
                None => !acc.is_empty(),
                Some((a, rest)) => a
                    .members()
                    .filter(|x| !x.is_empty())
                    .all(|x| rec(rest, acc.meet(&x))),
            }
        }
        let m = family[0].ground();
        rec(family, Element::full(m))
    }

    pub(crate) fn arb_subalgebra(m: usize) -> impl Strategy<Value = Subalgebra> {
        proptest::collection::vec(0..m as u32, m).prop_map(|l| Subalgebra::from_labels(&l))
    }

    fn arb_element(m: usize) -> impl Strategy<Value = Element> {
        proptest::collection::vec(any::<bool>(), m)
            .prop_map(move |bits| Element::from_fn(m, |p| bits[p]))
    }

    proptest! {
        #[test]
        fn generation_is_idempotent_and_contains_generators(
            gens in proptest::collection::vec(arb_element(7), 0..4)
        ) {
            let a = generate_subalgebra(7, &gens).unwrap();
            for g in &gens {
                prop_assert!(a.contains(g));
            }
            let again = generate_subalgebra(7, a.blocks()).unwrap();
            prop_assert_eq!(again, a.clone());
            // smallest: every member of `a` is a Boolean combination of the generators
            let members: Vec<Element> = a.members().collect();
            prop_assert_eq!(members.len(), 1 << a.atom_count());
        }

        #[test]
        fn upper_projection_is_least_member_above(a in arb_subalgebra(6), x in arb_element(6)) {
            let up = a.upper_projection(&x).unwrap();
            prop_assert!(a.contains(&up));
            prop_assert!(x.is_subset(&up));
            for y in a.members() {
                if x.is_subset(&y) {
                    prop_assert!(up.is_subset(&y));
                }
            }
            let low = a.lower_projection(&x).unwrap();
            prop_assert!(a.contains(&low) && low.is_subset(&x));
        }

        #[test]
        fn intersect_membership_is_conjunction(a in arb_subalgebra(6), b in arb_subalgebra(6)) {
            let c = intersect(&a, &b).unwrap();
            for mask in 0u32..64 {
                let x = Element::from_fn(6, |p| mask >> p & 1 == 1);
                prop_assert_eq!(c.contains(&x), a.contains(&x) && b.contains(&x));
            }
        }

        #[test]
        fn absorption(a in arb_subalgebra(7), b in arb_subalgebra(7)) {
            let j = join_subalgebras(&a, &b).unwrap();
            prop_assert_eq!(intersect(&a, &j).unwrap(), a.clone());
            prop_assert!(a.is_subalgebra_of(&j) && b.is_subalgebra_of(&j));
            let mut gens: Vec<Element> = a.blocks().to_vec();
            gens.extend(b.blocks().iter().cloned());
            prop_assert_eq!(generate_subalgebra(7, &gens).unwrap(), j);
        }

        #[test]
        fn independence_matches_definition(
            fam in proptest::collection::vec(arb_subalgebra(5), 1..4)
        ) {
            prop_assert_eq!(is_independent(&fam).unwrap(), independent_by_members(&fam));
        }
    }
}
