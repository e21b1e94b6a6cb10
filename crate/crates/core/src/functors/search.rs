use rayon::prelude::*;
use serde::Serialize;

use super::cube::{index_sets, n_commutative_counterexample, projection_cube};
use super::functor::{apply_functor, functor_image, functor_image_by_generators, FunctorId};
use crate::algebra::{all_subalgebras, Element, Subalgebra};
use crate::amalgam::commutes_via_pushout;
use crate::commute::{commutes, weakly_commutes, weakly_commutes_counterexample};
use crate::error::{Error, Result};

/// Largest ground for the algebra search.
pub const MAX_SEARCH_GROUND: usize = 6;
/// Largest universe for the cube search.
pub const MAX_SEARCH_UNIVERSE: usize = 6;

/// A triple of subalgebras of `P(ground)` that commutes well while the
/// functor images do not weakly commute.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlgebraWitness {
    pub functor: FunctorId,
    pub ground: usize,
    pub triple: Vec<Subalgebra>,
    /// Ground size of the images, `|F(ground)|`.
    pub image_ground: usize,
    pub images: Vec<Subalgebra>,
    /// Atom indices of the images: empty meet, yet the least weak witness
    /// candidate still meets.
    pub failing_atoms: Vec<usize>,
    pub transcript: Vec<String>,
}

/// Index sets whose projection cube is 3-commutative while `F` of it is not.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CubeWitness {
    pub functor: FunctorId,
    pub sets: Vec<Vec<usize>>,
    /// The compatible tuple of `F(2^{a_i})` points that does not lift; each
    /// point is listed by the points of `2^{a_i}` it contains.
    pub failing_tuple: Vec<Vec<usize>>,
    pub transcript: Vec<String>,
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::CrossCheck(format!("cannot start worker pool: {e}")))
}

/// Least (in enumeration order) item for which `check` gives `Some`, or the
/// first error before it.
fn first_hit<T: Send>(
    workers: usize,
    count: usize,
    check: impl Fn(usize) -> Result<Option<T>> + Sync,
) -> Result<Option<T>> {
    pool(workers)?.install(|| {
        (0..count)
            .into_par_iter()
            .find_map_first(|i| check(i).transpose())
            .transpose()
    })
}

/// Searches the ordered triples of subalgebras of `P(m)` (each coordinate
/// running through partitions in restricted-growth order) for the first that
/// commutes well while its functor images fail to weakly commute. `workers`
/// of 0 uses the default thread count; the result does not depend on it.
pub fn search_algebra_counterexample(
    f: FunctorId,
    m: usize,
    workers: usize,
) -> Result<Option<AlgebraWitness>> {
    if m > MAX_SEARCH_GROUND {
        return Err(Error::SizeCap {
            size: m as u128,
            cap: MAX_SEARCH_GROUND as u128,
        });
    }
    let subs = all_subalgebras(m);
    let images: Vec<Subalgebra> = subs
        .iter()
        .map(|a| functor_image(f, a, m))
        .collect::<Result<_>>()?;
    let k = subs.len();
    let pair_ok: Vec<bool> = (0..k * k)
        .map(|idx| commutes(&[subs[idx / k].clone(), subs[idx % k].clone()]))
        .collect::<Result<_>>()?;
    let found = first_hit(workers, k * k * k, |idx| {
        let (i, j, l) = (idx / (k * k), idx / k % k, idx % k);
        if !(pair_ok[i * k + j] && pair_ok[i * k + l] && pair_ok[j * k + l]) {
            return Ok(None);
        }
        let triple = [subs[i].clone(), subs[j].clone(), subs[l].clone()];
        if !commutes(&triple)? {
            return Ok(None);
        }
        let imgs = [images[i].clone(), images[j].clone(), images[l].clone()];
        Ok((!weakly_commutes(&imgs)?).then_some([i, j, l]))
    })?;
    let Some(idx) = found else {
        return Ok(None);
    };
    let triple: Vec<Subalgebra> = idx.iter().map(|&i| subs[i].clone()).collect();
    let imgs: Vec<Subalgebra> = idx.iter().map(|&i| images[i].clone()).collect();
    let transcript = verify_algebra_witness(f, &triple, &imgs)?;
    let failing_atoms = weakly_commutes_counterexample(&imgs)?.expect("verified above");
    Ok(Some(AlgebraWitness {
        functor: f,
        ground: m,
        image_ground: imgs[0].ground(),
        triple,
        images: imgs,
        failing_atoms,
        transcript,
    }))
}

/// Re-derives everything a reported algebra witness claims through the
/// generator-based functor images and the pushout route.
fn verify_algebra_witness(
    f: FunctorId,
    triple: &[Subalgebra],
    imgs: &[Subalgebra],
) -> Result<Vec<String>> {
    let mut log = Vec::new();
    let fail = |what: &str| Error::CrossCheck(format!("witness re-verification: {what}"));
    for (i, a) in triple.iter().enumerate() {
        if functor_image_by_generators(f, a)? != imgs[i] {
            return Err(fail("functor image differs from its generator construction"));
        }
    }
    log.push(format!("{f} images recomputed from generators: agree"));
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if !commutes_via_pushout(&[triple[i].clone(), triple[j].clone()])? {
            return Err(fail("a pair does not commute"));
        }
        log.push(format!("pair ({i},{j}) commutes (mediating map injective)"));
    }
    if !commutes_via_pushout(triple)? {
        return Err(fail("the triple does not commute"));
    }
    log.push("triple commutes (mediating map injective)".into());
    let Some(atoms) = weakly_commutes_counterexample(imgs)? else {
        return Err(fail("images weakly commute"));
    };
    let ground = imgs[0].ground();
    let xs: Vec<&Element> = atoms.iter().zip(imgs).map(|(&a, img)| &img.blocks()[a]).collect();
    if !Element::meet_all(ground, xs.iter().copied()).is_empty() {
        return Err(fail("failing atoms meet"));
    }
    let d = crate::commute::pairwise_trace_joins(imgs)?;
    let ys: Vec<Element> = xs.iter().zip(&d).map(|(x, di)| di.upper_projection_unchecked(x)).collect();
    if Element::meet_all(ground, &ys).is_empty() {
        return Err(fail("least witness candidate is a witness"));
    }
    log.push(format!(
        "image atoms {xs:?} meet in 0, but their least weak witness candidate {ys:?} does not"
    ));
    if commutes_via_pushout(imgs)? {
        return Err(fail("images commute"));
    }
    log.push("images do not commute (mediating map not injective)".into());
    Ok(log)
}

/// Index-set triples over universes `0..u`, `u = 0, 1, ..`, up to
/// `universe_bound`. Within one `u` only triples covering the whole universe
/// are tried, ordered by their bit masks.
pub fn search_cube_counterexample(
    f: FunctorId,
    universe_bound: usize,
    workers: usize,
) -> Result<Option<CubeWitness>> {
    if universe_bound > MAX_SEARCH_UNIVERSE {
        return Err(Error::SizeCap {
            size: universe_bound as u128,
            cap: MAX_SEARCH_UNIVERSE as u128,
        });
    }
    for u in 0..=universe_bound {
        let full = (1usize << u) - 1;
        let side = 1usize << u;
        let found = first_hit(workers, side * side * side, |idx| {
            let masks = [idx / (side * side), idx / side % side, idx % side];
            if masks[0] | masks[1] | masks[2] != full {
                return Ok(None);
            }
            let sets = masks_to_sets(&masks, u);
            let cube = projection_cube(&sets)?;
            if n_commutative_counterexample(&cube)?.is_some() {
                return Ok(None);
            }
            let fc = apply_functor(f, &cube)?;
            Ok(n_commutative_counterexample(&fc)?.map(|t| (sets, t)))
        })?;
        if let Some((sets, tuple)) = found {
            let transcript = verify_cube_witness(f, &sets)?;
            let failing_tuple = tuple
                .iter()
                .enumerate()
                .map(|(i, &p)| {
                    let k = 1usize << index_sets(&sets)[1 << i].len();
                    f.points(k).map(|pts| pts[p].clone())
                })
                .collect::<Result<_>>()?;
            return Ok(Some(CubeWitness {
                functor: f,
                sets,
                failing_tuple,
                transcript,
            }));
        }
    }
    Ok(None)
}

fn masks_to_sets(masks: &[usize], u: usize) -> Vec<Vec<usize>> {
    masks
        .iter()
        .map(|&mask| (0..u).filter(|&x| mask >> x & 1 == 1).collect())
        .collect()
}

/// Re-checks a cube witness on the algebra side: the subalgebras of
/// `P(2^{⋃a})` dual to the projections commute, and the images of those
/// subalgebras under the dual functor do not.
fn verify_cube_witness(f: FunctorId, sets: &[Vec<usize>]) -> Result<Vec<String>> {
    let fail = |what: &str| Error::CrossCheck(format!("cube witness re-verification: {what}"));
    let cube = projection_cube(sets)?;
    let duals = cube.dual_subalgebras();
    let m = cube.space(0);
    let mut log = vec![format!("projection cube over {sets:?}: top space has {m} points")];
    if !commutes(&duals)? {
        return Err(fail("dual subalgebras do not commute"));
    }
    log.push("dual coordinate subalgebras commute".into());
    let imgs: Vec<Subalgebra> = duals
        .iter()
        .map(|a| functor_image(f, a, m))
        .collect::<Result<_>>()?;
    if commutes(&imgs)? {
        return Err(fail("images of the dual subalgebras commute"));
    }
    log.push(format!("{f} images of the dual subalgebras do not commute"));
    Ok(log)
}
