use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::pushout::compatible_tuples;
use super::reflect::{commutatively_reflects, ReflectionFailure};
use super::system::OverlapSystem;
use crate::algebra::{join_all, Subalgebra};
use crate::commute::commutes;
use crate::error::{Error, Result};

/// The hypothesis of the stage-wise amalgamation that failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Hypothesis {
    /// The traces `A_i ∩ A_m` (i < m) do not commute inside `A_m`.
    TraceFamilyNotCommuting,
    /// The traces coprojected into the previous stage do not commute.
    ReflectionInnerCommutation,
    /// A coprojected `A_i` meets the join of the coprojected traces in more
    /// than its own trace.
    ReflectionSmallOverlap,
    /// Some atom of the previous stage matches no atom of the trace join, so
    /// the map from the trace join into the previous stage is not defined.
    IncoherentIdentifications,
    /// The map from the trace join into the previous stage is not injective.
    MediatingMapNotInjective,
    /// The binary pushout of the stage does not embed both sides.
    PairPushoutNotEmbedding,
}

impl Hypothesis {
    pub fn name(self) -> &'static str {
        match self {
            Hypothesis::TraceFamilyNotCommuting => "trace-family-not-commuting",
            Hypothesis::ReflectionInnerCommutation => "reflection-inner-commutation",
            Hypothesis::ReflectionSmallOverlap => "reflection-small-overlap",
            Hypothesis::IncoherentIdentifications => "incoherent-identifications",
            Hypothesis::MediatingMapNotInjective => "mediating-map-not-injective",
            Hypothesis::PairPushoutNotEmbedding => "pair-pushout-not-embedding",
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `B_{m+1}`: the amalgam of `A_0, .., A_m`, as the powerset of its atoms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stage {
    /// Atoms, each a tuple of atoms of `A_0, .., A_m`, in lexicographic order.
    pub tuples: Vec<Vec<usize>>,
    /// `embeddings[i][a]`: atoms of this stage below the image of atom `a` of `A_i`.
    pub embeddings: Vec<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub stage: usize,
    pub check: &'static str,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssemblyChain {
    /// `stages[k]` amalgamates `A_0, .., A_k`.
    pub stages: Vec<Stage>,
    pub log: Vec<CheckRecord>,
}

impl AssemblyChain {
    pub fn last(&self) -> &Stage {
        self.stages.last().expect("chains are nonempty")
    }
}

struct Log(Vec<CheckRecord>);

impl Log {
    fn record(&mut self, stage: usize, check: &'static str, passed: bool) -> bool {
        self.0.push(CheckRecord {
            stage,
            check,
            passed,
        });
        passed
    }
}

fn fail(stage: usize, which: Hypothesis) -> Error {
    Error::HypothesisFailed { stage, which }
}

/// Amalgamates the algebras one at a time. Stage `m` glues `A_m` onto the
/// amalgam of `A_0, .., A_{m-1}` along the join `D` of the traces
/// `A_i ∩ A_m`, checking every hypothesis along the way and verifying the
/// resulting embeddings.
pub fn assemble(system: &OverlapSystem) -> Result<AssemblyChain> {
    let n = system.n();
    if n == 0 {
        return Err(Error::InvalidSystem("nothing to assemble".into()));
    }
    let mut log = Log(Vec::new());
    let first: Vec<Vec<usize>> = (0..system.atom_counts()[0]).map(|a| vec![a]).collect();
    let mut stages = vec![finish_stage(system, 0, first, &mut log)?];

    for m in 1..n {
        let am = system.atom_counts()[m];
        // A_i ∩ A_m as partitions of atoms(A_m)
        let traces: Vec<Subalgebra> = (0..m)
            .map(|i| Subalgebra::from_labels(system.map_from(m, i)))
            .collect();
        if !log.record(m, "trace family commutes", commutes(&traces)?) {
            return Err(fail(m, Hypothesis::TraceFamilyNotCommuting));
        }

        // the same traces seen from the A_i side
        let prefix = system.prefix(m);
        let inner: Vec<Subalgebra> = (0..m)
            .map(|i| Subalgebra::from_labels(system.map_from(i, m)))
            .collect();
        let report = commutatively_reflects(&prefix, &inner)?;
        match report.failure {
            None => {
                log.record(m, "traces reflect commutatively", true);
            }
            Some(ReflectionFailure::TracesDoNotCommute { .. }) => {
                log.record(m, "traces reflect commutatively", false);
                return Err(fail(m, Hypothesis::ReflectionInnerCommutation));
            }
            Some(ReflectionFailure::OverlapTooLarge { .. }) => {
                log.record(m, "traces reflect commutatively", false);
                return Err(fail(m, Hypothesis::ReflectionSmallOverlap));
            }
        }

        // D and the signature of each of its atoms
        let d = join_all(am, &traces)?;
        let mut by_signature: HashMap<Vec<usize>, usize> = HashMap::new();
        for (k, block) in d.blocks().iter().enumerate() {
            let a = block.first().expect("blocks are nonempty");
            let sig: Vec<usize> = (0..m).map(|i| system.map_from(m, i)[a]).collect();
            by_signature.insert(sig, k);
        }
        let prev = stages.last().expect("chains are nonempty");
        // dual of g: atoms of B_m to atoms of D
        let mut dual = Vec::with_capacity(prev.tuples.len());
        for t in &prev.tuples {
            let sig: Vec<usize> = (0..m).map(|i| system.map_from(i, m)[t[i]]).collect();
            match by_signature.get(&sig) {
                Some(&k) => dual.push(k),
                None => {
                    log.record(m, "mediating map is well defined", false);
                    return Err(fail(m, Hypothesis::IncoherentIdentifications));
                }
            }
        }
        log.record(m, "mediating map is well defined", true);
        let mut hit = vec![false; d.atom_count()];
        for &k in &dual {
            hit[k] = true;
        }
        if !log.record(m, "mediating map is injective", hit.iter().all(|&h| h)) {
            return Err(fail(m, Hypothesis::MediatingMapNotInjective));
        }

        // binary pushout of A_m <- D -> B_m
        let mut tuples = Vec::new();
        let mut left_hit = vec![false; prev.tuples.len()];
        let mut right_hit = vec![false; am];
        for (ti, t) in prev.tuples.iter().enumerate() {
            for (a, hit) in right_hit.iter_mut().enumerate() {
                if d.block_of(a) == dual[ti] {
                    left_hit[ti] = true;
                    *hit = true;
                    let mut next = t.clone();
                    next.push(a);
                    tuples.push(next);
                }
            }
        }
        let embeds = left_hit.iter().chain(&right_hit).all(|&h| h);
        if !log.record(m, "binary pushout embeds both sides", embeds) {
            return Err(fail(m, Hypothesis::PairPushoutNotEmbedding));
        }
        let stage = finish_stage(system, m, tuples, &mut log)?;
        stages.push(stage);
    }
    Ok(AssemblyChain { stages, log: log.0 })
}

/// Builds the embeddings of stage `m` and verifies them: each is an injective
/// homomorphism, the pairwise identifications are respected, and the atoms
/// agree with the compatible tuples of the prefix system.
fn finish_stage(
    system: &OverlapSystem,
    m: usize,
    tuples: Vec<Vec<usize>>,
    log: &mut Log,
) -> Result<Stage> {
    let counts = &system.atom_counts()[..=m];
    let mut embeddings: Vec<Vec<Vec<usize>>> = counts.iter().map(|&c| vec![Vec::new(); c]).collect();
    for (k, t) in tuples.iter().enumerate() {
        for (i, &a) in t.iter().enumerate() {
            embeddings[i][a].push(k);
        }
    }
    // atoms go to nonempty, pairwise disjoint sets covering the stage: an
    // injective homomorphism of powersets
    let injective = embeddings
        .iter()
        .all(|atoms| atoms.iter().all(|s| !s.is_empty()));
    let homomorphic = embeddings.iter().all(|atoms| {
        let mut seen = vec![false; tuples.len()];
        for &k in atoms.iter().flatten() {
            if std::mem::replace(&mut seen[k], true) {
                return false;
            }
        }
        seen.iter().all(|&s| s)
    });
    let mut respects = true;
    for i in 0..=m {
        for j in i + 1..=m {
            let (mi, mj) = (system.map_from(i, j), system.map_from(j, i));
            for c in 0..system.inter_atoms(i, j) {
                let image = |emb: &Vec<Vec<usize>>, map: &[usize]| {
                    let mut s: Vec<usize> = (0..map.len())
                        .filter(|&a| map[a] == c)
                        .flat_map(|a| emb[a].iter().copied())
                        .collect();
                    s.sort_unstable();
                    s
                };
                if image(&embeddings[i], mi) != image(&embeddings[j], mj) {
                    respects = false;
                }
            }
        }
    }
    let agrees = tuples == compatible_tuples(&system.prefix(m + 1));
    let ok = log.record(m, "embeddings are injective", injective)
        & log.record(m, "embeddings are homomorphisms", homomorphic)
        & log.record(m, "embeddings respect identifications", respects)
        & log.record(m, "atoms are the compatible tuples", agrees);
    if !ok {
        return Err(Error::CrossCheck(format!("stage {m}: embedding verification failed")));
    }
    Ok(Stage { tuples, embeddings })
}
