use serde::Serialize;

use super::system::{embed_as_system, OverlapSystem};
use crate::algebra::{join_all, Element, Subalgebra};
use crate::error::{Error, Result};

/// Above this many tuples the ideal-quotient oracle is not run.
pub const ORACLE_LIMIT: u128 = 4096;

/// Intersection algebras with more atoms than this contribute only their
/// atoms (not all their members) to the oracle's ideal generators.
const ORACLE_MEMBER_LIMIT: usize = 10;

/// All pairwise-compatible atom tuples in lexicographic order: `t` with
/// `map_from(i,j)[t_i] == map_from(j,i)[t_j]` for every pair.
pub fn compatible_tuples(system: &OverlapSystem) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut tuple = Vec::with_capacity(system.n());
    extend_compatible(system, &mut tuple, &mut out);
    out
}

fn extend_compatible(system: &OverlapSystem, tuple: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let k = tuple.len();
    if k == system.n() {
        out.push(tuple.clone());
        return;
    }
    for a in 0..system.atom_counts()[k] {
        let ok = tuple
            .iter()
            .enumerate()
            .all(|(i, &t)| system.map_from(i, k)[t] == system.map_from(k, i)[a]);
        if ok {
            tuple.push(a);
            extend_compatible(system, tuple, out);
            tuple.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Injectivity {
    pub injective: bool,
    /// An atom sent to 0, when not injective.
    pub offending_atom: Option<usize>,
}

/// The pushout `⊞A⃗` as the powerset of the compatible tuples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PushoutResult {
    pub tuples: Vec<Vec<usize>>,
    /// `coprojections[i][a]`: indices of the tuples with `t_i = a`.
    pub coprojections: Vec<Vec<Vec<usize>>>,
    pub injectivity: Vec<Injectivity>,
}

impl PushoutResult {
    pub fn atom_count(&self) -> usize {
        self.tuples.len()
    }

    pub fn all_injective(&self) -> bool {
        self.injectivity.iter().all(|r| r.injective)
    }

    /// Image of `A_i` as a partition of the tuple set.
    pub fn coprojected(&self, i: usize) -> Subalgebra {
        let labels: Vec<usize> = self.tuples.iter().map(|t| t[i]).collect();
        Subalgebra::from_labels(&labels)
    }

    /// Image of a member of `A_i` given by its atom indices.
    pub fn coproject(&self, i: usize, atoms: impl IntoIterator<Item = usize>) -> Element {
        let mut e = Element::empty(self.tuples.len());
        for a in atoms {
            for &t in &self.coprojections[i][a] {
                e.insert(t);
            }
        }
        e
    }
}

fn build_result(system: &OverlapSystem, tuples: Vec<Vec<usize>>) -> PushoutResult {
    let mut coprojections: Vec<Vec<Vec<usize>>> =
        system.atom_counts().iter().map(|&c| vec![Vec::new(); c]).collect();
    for (k, t) in tuples.iter().enumerate() {
        for (i, &a) in t.iter().enumerate() {
            coprojections[i][a].push(k);
        }
    }
    let injectivity = coprojections
        .iter()
        .map(|atoms| {
            let offending_atom = atoms.iter().position(|ts| ts.is_empty());
            Injectivity {
                injective: offending_atom.is_none(),
                offending_atom,
            }
        })
        .collect();
    PushoutResult {
        tuples,
        coprojections,
        injectivity,
    }
}

/// The pushout of the system. For small tuple spaces the result is checked
/// against the ideal-quotient construction.
pub fn pushout(system: &OverlapSystem) -> Result<PushoutResult> {
    let result = build_result(system, compatible_tuples(system));
    if system.tuple_space() <= ORACLE_LIMIT {
        let oracle = ideal_quotient_pushout(system)?;
        if oracle != result {
            return Err(Error::CrossCheck(
                "pushout: ideal quotient and compatible tuples disagree".into(),
            ));
        }
    }
    Ok(result)
}

/// The pushout built from its defining presentation: the free product is the
/// powerset of all atom tuples, and the ideal is generated by the terms
/// `f_i(c) − f_j(c)` for members `c` of each intersection. The quotient's
/// atoms are the tuples outside that ideal.
pub fn ideal_quotient_pushout(system: &OverlapSystem) -> Result<PushoutResult> {
    let space = system.tuple_space();
    if space > ORACLE_LIMIT {
        return Err(Error::SizeCap {
            size: space,
            cap: ORACLE_LIMIT,
        });
    }
    let counts = system.atom_counts();
    let n = counts.len();
    let total = space as usize;
    // mixed radix with coordinate 0 most significant, so index order is lex order
    let decode = |mut idx: usize| -> Vec<usize> {
        let mut t = vec![0; n];
        for i in (0..n).rev() {
            t[i] = idx % counts[i];
            idx /= counts[i];
        }
        t
    };
    let all: Vec<Vec<usize>> = (0..total).map(decode).collect();
    // free coprojection of a set of atoms of A_i
    let free = |i: usize, atoms: &[bool]| Element::from_fn(total, |k| atoms[all[k][i]]);

    let mut ideal = Element::empty(total);
    for p in system.pairs() {
        let k = p.inter_atoms;
        let members: Vec<Vec<usize>> = if k <= ORACLE_MEMBER_LIMIT {
            (0u32..1 << k)
                .map(|mask| (0..k).filter(|c| mask >> c & 1 == 1).collect())
                .collect()
        } else {
            (0..k).map(|c| vec![c]).collect()
        };
        for c in members {
            let in_c = |v: usize| c.contains(&v);
            let pre_i: Vec<bool> = p.map_i.iter().map(|&v| in_c(v)).collect();
            let pre_j: Vec<bool> = p.map_j.iter().map(|&v| in_c(v)).collect();
            let fi = free(p.i, &pre_i);
            let fj = free(p.j, &pre_j);
            ideal.join_assign(&fi.difference(&fj));
            ideal.join_assign(&fj.difference(&fi));
        }
    }
    let tuples: Vec<Vec<usize>> = ideal
        .complement()
        .points()
        .map(|k| all[k].clone())
        .collect();
    Ok(build_result(system, tuples))
}

/// Every atom of every `A_k` survives in the pushout, i.e. all coprojections
/// are injective.
pub fn has_common_extension(system: &OverlapSystem) -> bool {
    let n = system.n();
    let mut seen: Vec<Vec<bool>> = system.atom_counts().iter().map(|&c| vec![false; c]).collect();
    let mut missing: usize = system.atom_counts().iter().sum();
    let mut tuple = Vec::with_capacity(n);
    mark_atoms(system, &mut tuple, &mut seen, &mut missing);
    missing == 0
}

fn mark_atoms(
    system: &OverlapSystem,
    tuple: &mut Vec<usize>,
    seen: &mut [Vec<bool>],
    missing: &mut usize,
) -> bool {
    let k = tuple.len();
    if k == system.n() {
        for (i, &a) in tuple.iter().enumerate() {
            if !seen[i][a] {
                seen[i][a] = true;
                *missing -= 1;
            }
        }
        return *missing == 0;
    }
    for a in 0..system.atom_counts()[k] {
        let ok = tuple
            .iter()
            .enumerate()
            .all(|(i, &t)| system.map_from(i, k)[t] == system.map_from(k, i)[a]);
        if ok {
            tuple.push(a);
            let done = mark_atoms(system, tuple, seen, missing);
            tuple.pop();
            if done {
                return true;
            }
        }
    }
    false
}

/// The mediating map `⊞A⃗ → P(m)` sends each compatible tuple to the meet of
/// its atoms; its range is `⟨⋃A⃗⟩`, so it is injective exactly when there are
/// as many compatible tuples as atoms of that join.
pub fn commutes_via_pushout(family: &[Subalgebra]) -> Result<bool> {
    let Some(first) = family.first() else {
        return Ok(true);
    };
    let system = embed_as_system(family)?;
    let tuples = compatible_tuples(&system).len();
    let joined = join_all(first.ground(), family)?.atom_count();
    if tuples < joined {
        return Err(Error::CrossCheck(format!(
            "mediating map not onto the join: {tuples} tuples, {joined} atoms"
        )));
    }
    Ok(tuples == joined)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn noncomm_pushout_is_free_product() {
        let s = embed_as_system(&fixtures::noncomm().family).unwrap();
        let p = pushout(&s).unwrap();
        assert_eq!(p.atom_count(), 4);
        assert!(p.all_injective());
        assert!(has_common_extension(&s));
        assert!(!commutes_via_pushout(&fixtures::noncomm().family).unwrap());
    }

    #[test]
    fn badoverlap_collapses_first_atom() {
        let fx = fixtures::bad_overlap();
        let p = pushout(&fx.system).unwrap();
        assert_eq!(p.tuples, ideal_quotient_pushout(&fx.system).unwrap().tuples);
        assert!(!p.injectivity[0].injective);
        assert_eq!(p.injectivity[0].offending_atom, Some(0));
        assert!(!has_common_extension(&fx.system));
    }

    #[test]
    fn single_algebra_has_one_tuple_per_atom() {
        let s = OverlapSystem::new(vec![3], vec![]).unwrap();
        assert_eq!(compatible_tuples(&s), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn json_shape() {
        let s = embed_as_system(&fixtures::noncomm().family).unwrap();
        let v = serde_json::to_value(pushout(&s).unwrap()).unwrap();
        assert_eq!(v["tuples"].as_array().unwrap().len(), 4);
        assert_eq!(v["injectivity"][0]["injective"], true);
    }
}
