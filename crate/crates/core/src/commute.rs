//! Commutativity predicates for tuples of subalgebras of one ambient powerset.
//!
//! All tuple tests run over atoms: a tuple of members decomposes into tuples
//! of atoms by distributivity, so `∏ |atoms(A_i)|` tuples is the worst case.

use serde::Serialize;

use crate::algebra::{common_ground, intersect, join_all, Element, ElementFamily, Subalgebra};
use crate::amalgam;
use crate::error::{Error, Result};

/// Above this many atom tuples `commutes` skips the pushout cross-check.
pub const CROSS_CHECK_LIMIT: u128 = 1_000_000;

/// A weak incompatibility witness: `y_i` lies in the join of the pairwise
/// intersections `A_i ∩ A_j` (j ≠ i), dominates `x_i`, and the `y_i` meet in 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessTuple {
    pub elements: Vec<Element>,
}

/// Block label of each atom of `A_i` inside `A_i ∩ A_j`, indexed `[i][j][atom]`.
fn pair_labels(family: &[Subalgebra]) -> Result<Vec<Vec<Vec<u32>>>> {
    let n = family.len();
    let mut labels = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let c = intersect(&family[i], &family[j])?;
            for (k, other) in [(i, j), (j, i)] {
                labels[k][other] = family[k]
                    .blocks()
                    .iter()
                    .map(|b| c.block_of(b.first().expect("blocks are nonempty")) as u32)
                    .collect();
            }
        }
    }
    Ok(labels)
}

fn tuple_count(family: &[Subalgebra]) -> u128 {
    family
        .iter()
        .map(|a| a.atom_count() as u128)
        .fold(1u128, |acc, k| acc.saturating_mul(k))
}

/// `⊠ family`: every pairwise-compatible tuple of atoms has a nonempty meet.
///
/// When the tuple space is small enough the verdict is cross-checked against
/// injectivity of the mediating map out of the pushout; a disagreement is
/// reported as [`Error::CrossCheck`].
pub fn commutes(family: &[Subalgebra]) -> Result<bool> {
    let by_atoms = commutes_counterexample(family)?.is_none();
    if family.len() >= 2 && family[0].ground() > 0 && tuple_count(family) <= CROSS_CHECK_LIMIT {
        let by_pushout = amalgam::commutes_via_pushout(family)?;
        if by_pushout != by_atoms {
            return Err(Error::CrossCheck(format!(
                "commutes: atom tuples say {by_atoms}, pushout injectivity says {by_pushout}"
            )));
        }
    }
    Ok(by_atoms)
}

/// The atom-tuple route of [`commutes`] alone.
pub fn commutes_via_atoms(family: &[Subalgebra]) -> Result<bool> {
    Ok(commutes_counterexample(family)?.is_none())
}

/// Lexicographically first pairwise-compatible atom tuple with empty meet.
pub fn commutes_counterexample(family: &[Subalgebra]) -> Result<Option<Vec<usize>>> {
    let Some(ground) = common_ground(family)? else {
        return Ok(None);
    };
    if family.len() == 1 {
        return Ok(None);
    }
    let labels = pair_labels(family)?;
    let mut tuple = Vec::with_capacity(family.len());
    let mut meets = vec![Element::full(ground)];
    Ok(find_empty_compatible(family, &labels, &mut tuple, &mut meets).then_some(tuple))
}

fn find_empty_compatible(
    family: &[Subalgebra],
    labels: &[Vec<Vec<u32>>],
    tuple: &mut Vec<usize>,
    meets: &mut Vec<Element>,
) -> bool {
    let k = tuple.len();
    if k == family.len() {
        return meets[k].is_empty();
    }
    for (b, block) in family[k].blocks().iter().enumerate() {
        let compatible = tuple
            .iter()
            .enumerate()
            .all(|(i, &t)| labels[i][k][t] == labels[k][i][b]);
        if !compatible {
            continue;
        }
        let meet = meets[k].meet(block);
        tuple.push(b);
        meets.push(meet);
        if find_empty_compatible(family, labels, tuple, meets) {
            return true;
        }
        tuple.pop();
        meets.pop();
    }
    false
}

/// `D_i = ⟨⋃_{j≠i} (A_i ∩ A_j)⟩` for every `i`.
pub fn pairwise_trace_joins(family: &[Subalgebra]) -> Result<Vec<Subalgebra>> {
    let Some(ground) = common_ground(family)? else {
        return Ok(Vec::new());
    };
    let n = family.len();
    let mut inter = vec![vec![None; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let c = intersect(&family[i], &family[j])?;
            inter[i][j] = Some(c.clone());
            inter[j][i] = Some(c);
        }
    }
    inter
        .into_iter()
        .map(|row| {
            let traces: Vec<Subalgebra> = row.into_iter().flatten().collect();
            join_all(ground, &traces)
        })
        .collect()
}

/// `⊠° family`: every atom tuple with empty meet has a weak incompatibility
/// witness. The least candidate is the tuple of upper projections into the
/// `D_i`, so only that candidate is tested.
pub fn weakly_commutes(family: &[Subalgebra]) -> Result<bool> {
    Ok(weakly_commutes_counterexample(family)?.is_none())
}

/// Lexicographically first atom tuple with empty meet whose projections into
/// the `D_i` still meet.
pub fn weakly_commutes_counterexample(family: &[Subalgebra]) -> Result<Option<Vec<usize>>> {
    let Some(ground) = common_ground(family)? else {
        return Ok(None);
    };
    let d = pairwise_trace_joins(family)?;
    let ups: Vec<Vec<Element>> = family
        .iter()
        .zip(&d)
        .map(|(a, di)| a.blocks().iter().map(|b| di.upper_projection_unchecked(b)).collect())
        .collect();
    let mut tuple = Vec::with_capacity(family.len());
    let full = Element::full(ground);
    let found = find_unwitnessed(family, &ups, &mut tuple, full.clone(), full);
    Ok(found.then_some(tuple))
}

fn find_unwitnessed(
    family: &[Subalgebra],
    ups: &[Vec<Element>],
    tuple: &mut Vec<usize>,
    x_meet: Element,
    y_meet: Element,
) -> bool {
    let k = tuple.len();
    if k == family.len() {
        return x_meet.is_empty();
    }
    for (b, block) in family[k].blocks().iter().enumerate() {
        let y = y_meet.meet(&ups[k][b]);
        if y.is_empty() {
            // every extension of this prefix has a witness
            continue;
        }
        tuple.push(b);
        if find_unwitnessed(family, ups, tuple, x_meet.meet(block), y) {
            return true;
        }
        tuple.pop();
    }
    false
}

/// The least weak incompatibility witness for `x`, if there is one.
///
/// `x_i` must be a member of `A_i` and the `x_i` must meet in 0.
pub fn weak_witness(family: &[Subalgebra], x: &ElementFamily) -> Result<Option<WitnessTuple>> {
    let ground = common_ground(family)?.unwrap_or(x.ground());
    crate::error::check_ground(ground, x.ground())?;
    if x.len() != family.len() {
        return Err(Error::InvalidPartition(format!(
            "{} elements for {} subalgebras",
            x.len(),
            family.len()
        )));
    }
    for (index, (a, xi)) in family.iter().zip(x.members()).enumerate() {
        if !a.contains(xi) {
            return Err(Error::NotAMember { index });
        }
    }
    if !Element::meet_all(ground, x.members()).is_empty() {
        return Err(Error::MeetNotZero);
    }
    let d = pairwise_trace_joins(family)?;
    let elements: Vec<Element> = d
        .iter()
        .zip(x.members())
        .map(|(di, xi)| di.upper_projection_unchecked(xi))
        .collect();
    Ok(Element::meet_all(ground, &elements)
        .is_empty()
        .then_some(WitnessTuple { elements }))
}

/// `A ⫛_C B`: every disjoint atom pair `x ∈ A`, `y ∈ B` is separated by a
/// member of `C` above `x`.
pub fn commutes_over(a: &Subalgebra, b: &Subalgebra, c: &Subalgebra) -> Result<bool> {
    Ok(commutes_over_counterexample(a, b, c)?.is_none())
}

/// First atom pair `(x, y)` (as atom indices of `A` and `B`) not separated by `C`.
pub fn commutes_over_counterexample(
    a: &Subalgebra,
    b: &Subalgebra,
    c: &Subalgebra,
) -> Result<Option<(usize, usize)>> {
    common_ground(&[a.clone(), b.clone(), c.clone()])?;
    for (i, x) in a.blocks().iter().enumerate() {
        let up = c.upper_projection_unchecked(x);
        for (j, y) in b.blocks().iter().enumerate() {
            if x.is_disjoint(y) && up.intersects(y) {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

/// The member-level interpolation property of a pair: for all `A ∋ x ≤ y ∈ B`
/// some `z ∈ A ∩ B` has `x ≤ z ≤ y`. By additivity of `π₊` it suffices that
/// `π₊(A∩B, x) ≤ π₊(B, x)` for every atom `x` of `A`.
pub fn pair_interpolates(a: &Subalgebra, b: &Subalgebra) -> Result<bool> {
    let c = intersect(a, b)?;
    Ok(a.blocks().iter().all(|x| {
        c.upper_projection_unchecked(x)
            .is_subset(&b.upper_projection_unchecked(x))
    }))
}

/// Drops repeated subalgebras, keeping the index of each first occurrence.
fn dedupe(family: &[Subalgebra]) -> Vec<usize> {
    let mut keep: Vec<usize> = Vec::new();
    for (i, a) in family.iter().enumerate() {
        if !keep.iter().any(|&k| family[k] == *a) {
            keep.push(i);
        }
    }
    keep
}

/// Every subfamily of at most `max_arity` distinct members commutes
/// (`None` means no bound).
pub fn commutes_well(family: &[Subalgebra], max_arity: Option<usize>) -> Result<bool> {
    Ok(well_counterexample(family, max_arity, commutes)?.is_none())
}

/// Same as [`commutes_well`] with [`weakly_commutes`] as the predicate.
pub fn weakly_commutes_well(family: &[Subalgebra], max_arity: Option<usize>) -> Result<bool> {
    Ok(well_counterexample(family, max_arity, weakly_commutes)?.is_none())
}

/// First failing subfamily (indices into `family`), smallest arity first,
/// lexicographic within an arity.
pub fn well_counterexample(
    family: &[Subalgebra],
    max_arity: Option<usize>,
    pred: fn(&[Subalgebra]) -> Result<bool>,
) -> Result<Option<Vec<usize>>> {
    common_ground(family)?;
    let distinct = dedupe(family);
    let top = max_arity.unwrap_or(usize::MAX).min(distinct.len());
    for size in 2..=top {
        let mut chosen = Vec::with_capacity(size);
        if let Some(found) = first_failing_subset(family, &distinct, size, 0, &mut chosen, pred)? {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

fn first_failing_subset(
    family: &[Subalgebra],
    distinct: &[usize],
    size: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    pred: fn(&[Subalgebra]) -> Result<bool>,
) -> Result<Option<Vec<usize>>> {
    if chosen.len() == size {
        let sub: Vec<Subalgebra> = chosen.iter().map(|&i| family[i].clone()).collect();
        return Ok((!pred(&sub)?).then(|| chosen.clone()));
    }
    let remaining = size - chosen.len();
    for pos in start..=distinct.len() - remaining {
        chosen.push(distinct[pos]);
        if let Some(found) = first_failing_subset(family, distinct, size, pos + 1, chosen, pred)? {
            return Ok(Some(found));
        }
        chosen.pop();
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::generate_subalgebra;
    use crate::fixtures;

    fn el(m: usize, pts: &[usize]) -> Element {
        Element::from_points(m, pts.iter().copied()).unwrap()
    }

    fn gen(m: usize, gens: &[&[usize]]) -> Subalgebra {
        let gens: Vec<Element> = gens.iter().map(|g| el(m, g)).collect();
        generate_subalgebra(m, &gens).unwrap()
    }

    #[test]
    fn noncomm_pair() {
        let fam = fixtures::noncomm().family;
        assert!(!commutes(&fam).unwrap());
        assert!(!weakly_commutes(&fam).unwrap());
        assert_eq!(commutes_counterexample(&fam).unwrap(), Some(vec![0, 1]));
        let x = ElementFamily::new(3, vec![el(3, &[0]), el(3, &[1])]).unwrap();
        assert_eq!(weak_witness(&fam, &x).unwrap(), None);
    }

    #[test]
    fn trivial_families() {
        assert!(commutes(&[]).unwrap());
        assert!(weakly_commutes(&[]).unwrap());
        let a = gen(3, &[&[0]]);
        assert!(commutes(std::slice::from_ref(&a)).unwrap());
        assert!(weakly_commutes(std::slice::from_ref(&a)).unwrap());
        assert!(commutes_well(std::slice::from_ref(&a), None).unwrap());
        assert!(commutes(&[a.clone(), a]).unwrap());
    }

    #[test]
    fn ground_mismatch_is_an_error() {
        let r = commutes(&[Subalgebra::trivial(2), Subalgebra::trivial(3)]);
        assert!(matches!(r, Err(Error::GroundMismatch { .. })));
    }

    #[test]
    fn free_generator_subfamilies_commute() {
        // P(8) freely generated by three coordinates
        let g: Vec<Element> = (0..3)
            .map(|v| Element::from_fn(8, |p| p >> v & 1 == 1))
            .collect();
        let sub = |vs: &[usize]| {
            let gens: Vec<Element> = vs.iter().map(|&v| g[v].clone()).collect();
            generate_subalgebra(8, &gens).unwrap()
        };
        let fam = vec![sub(&[0, 1]), sub(&[1, 2]), sub(&[0, 2]), sub(&[2])];
        assert!(commutes_well(&fam, None).unwrap());
        assert!(weakly_commutes_well(&fam, None).unwrap());
    }

    #[test]
    fn highnotlow_pattern() {
        let fam = fixtures::high_not_low().family;
        assert!(commutes(&fam).unwrap());
        assert!(!commutes(&fam[..2]).unwrap());
        assert!(!commutes_well(&fam, Some(2)).unwrap());
        assert_eq!(well_counterexample(&fam, Some(3), commutes).unwrap(), Some(vec![0, 1]));
    }

    #[test]
    fn strictly_weak_pattern() {
        let fx = fixtures::strictly_weak_comm();
        let fam = &fx.family;
        assert!(weakly_commutes(fam).unwrap());
        assert!(!commutes(fam).unwrap());
        assert!(!weakly_commutes(&fam[..2]).unwrap());
    }

    #[test]
    fn weak_witness_invariants() {
        let fx = fixtures::strictly_weak_comm();
        let fam = &fx.family;
        let m = fam[0].ground();
        let d = pairwise_trace_joins(fam).unwrap();
        let x = fx.weak_query.clone();
        let w = weak_witness(fam, &x).unwrap().expect("witness exists");
        for ((di, xi), y) in d.iter().zip(x.members()).zip(&w.elements) {
            assert!(di.contains(y));
            assert!(xi.is_subset(y));
        }
        assert!(Element::meet_all(m, &w.elements).is_empty());
        // the least witness sits below the hand-made one
        for (y, g) in w.elements.iter().zip(&fx.hand_witness) {
            assert!(y.is_subset(g));
        }
    }

    #[test]
    fn weak_witness_with_zero_entry() {
        let a = gen(4, &[&[0, 1]]);
        let b = gen(4, &[&[0, 2]]);
        let x = ElementFamily::new(4, vec![Element::empty(4), el(4, &[0, 2])]).unwrap();
        let w = weak_witness(&[a.clone(), b.clone()], &x).unwrap().unwrap();
        assert!(w.elements[0].is_empty());
        assert!(w.elements[1].is_full());
        let bad = ElementFamily::new(4, vec![el(4, &[0]), el(4, &[0, 2])]).unwrap();
        assert_eq!(weak_witness(&[a.clone(), b.clone()], &bad), Err(Error::NotAMember { index: 0 }));
        let nonzero = ElementFamily::new(4, vec![el(4, &[0, 1]), el(4, &[0, 2])]).unwrap();
        assert_eq!(weak_witness(&[a, b], &nonzero), Err(Error::MeetNotZero));
    }

    #[test]
    fn commutes_over_examples() {
        let fam = fixtures::noncomm().family;
        let (a, b) = (&fam[0], &fam[1]);
        let c = intersect(a, b).unwrap();
        assert_eq!(commutes_over(a, b, &c).unwrap(), commutes(&fam).unwrap());
        assert!(commutes_over(a, b, &Subalgebra::discrete(3)).unwrap());
        assert!(!pair_interpolates(a, b).unwrap());
    }
}
