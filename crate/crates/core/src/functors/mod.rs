//! Commutative cubes of finite sets, the functors `Exp` and `SP^k` on them,
//! the dual functors `exp` and `σ^k` on subalgebras, and searches for
//! instances where a functor destroys ternary commutativity.

mod cube;
mod functor;
mod search;

pub use cube::{
    index_sets, is_n_commutative, n_commutative_counterexample, projection_cube, subset_key,
    FinCube, FinMap, MAX_DIMENSION,
};
pub use functor::{
    apply_functor, exp_image_by_generators, functor_image, functor_image_by_generators,
    sigma_image_by_fixed_points, FunctorId, GENERATOR_ORACLE_LIMIT,
};
pub use search::{
    search_algebra_counterexample, search_cube_counterexample, AlgebraWitness, CubeWitness,
    MAX_SEARCH_GROUND, MAX_SEARCH_UNIVERSE,
};

/// Environment variable overriding [`DEFAULT_SIZE_CAP`].
pub const SIZE_CAP_VAR: &str = "BOOLALG_SIZE_CAP";
/// Largest finite set a functor may produce.
pub const DEFAULT_SIZE_CAP: u128 = 1 << 20;

/// The active size cap.
pub fn size_cap() -> u128 {
    std::env::var(SIZE_CAP_VAR)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_SIZE_CAP)
}
