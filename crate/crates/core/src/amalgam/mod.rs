//! Overlapping finite Boolean algebras given abstractly by pairwise atom
//! maps: their pushout, the common-extension test, commutative reflection,
//! and stage-wise amalgamation with verified embeddings.

mod assemble;
mod pushout;
mod reflect;
mod system;

pub use assemble::{assemble, AssemblyChain, CheckRecord, Hypothesis, Stage};
pub use pushout::{
    commutes_via_pushout, compatible_tuples, has_common_extension, ideal_quotient_pushout,
    pushout, Injectivity, PushoutResult, ORACLE_LIMIT,
};
pub use reflect::{commutatively_reflects, ReflectionFailure, ReflectionReport};
pub use system::{embed_as_system, OverlapSystem, PairOverlap};
