use serde::Serialize;

use super::pushout::pushout;
use super::system::OverlapSystem;
use crate::algebra::{intersect, join_all, Element, Subalgebra};
use crate::commute::{commutes, commutes_counterexample};
use crate::error::{Error, Result};

/// Which condition of commutative reflection failed, with evidence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", rename_all = "kebab-case")]
pub enum ReflectionFailure {
    /// The coprojected traces do not commute in the pushout; `tuple` is a
    /// compatible atom tuple of the traces with empty meet.
    TracesDoNotCommute { tuple: Vec<usize> },
    /// `coproj_i[A_i] ∩ ⟨⋃ coproj_j[trace_j]⟩` is larger than
    /// `coproj_i[trace_i]`; `certificate` lies in the former but not the latter.
    OverlapTooLarge { index: usize, certificate: Element },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReflectionReport {
    pub reflects: bool,
    pub failure: Option<ReflectionFailure>,
}

/// Checks commutative reflection of `traces` (one subalgebra of each `A_i`,
/// given as a partition of its atoms) inside the pushout of `system`:
/// the coprojected traces commute, and each coprojected `A_i` meets the join
/// of all coprojected traces exactly in its own coprojected trace.
pub fn commutatively_reflects(
    system: &OverlapSystem,
    traces: &[Subalgebra],
) -> Result<ReflectionReport> {
    if traces.len() != system.n() {
        return Err(Error::InvalidSystem(format!(
            "{} traces for {} algebras",
            traces.len(),
            system.n()
        )));
    }
    for (i, (t, &c)) in traces.iter().zip(system.atom_counts()).enumerate() {
        if t.ground() != c {
            return Err(Error::InvalidSystem(format!(
                "trace {i} partitions {} atoms, algebra has {c}",
                t.ground()
            )));
        }
    }
    let po = pushout(system)?;
    let ground = po.atom_count();
    let images: Vec<Subalgebra> = traces
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let labels: Vec<usize> = po.tuples.iter().map(|tu| t.block_of(tu[i])).collect();
            Subalgebra::from_labels(&labels)
        })
        .collect();

    if !commutes(&images)? {
        let tuple = commutes_counterexample(&images)?.expect("non-commuting family has a tuple");
        return Ok(ReflectionReport {
            reflects: false,
            failure: Some(ReflectionFailure::TracesDoNotCommute { tuple }),
        });
    }

    let joined = join_all(ground, &images)?;
    for (i, image) in images.iter().enumerate() {
        let lhs = intersect(&po.coprojected(i), &joined)?;
        if lhs != *image {
            let certificate = lhs
                .blocks()
                .iter()
                .find(|b| !image.contains(b))
                .expect("lhs refines the trace image and differs from it")
                .clone();
            return Ok(ReflectionReport {
                reflects: false,
                failure: Some(ReflectionFailure::OverlapTooLarge { index: i, certificate }),
            });
        }
    }
    Ok(ReflectionReport {
        reflects: true,
        failure: None,
    })
}
