//! Propositional formulas, their truth sets as elements of a free Boolean
//! algebra, and n-ary interpolation through upper projections.

mod formula;

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

pub use formula::{parse, Formula};

use crate::algebra::{generate_subalgebra, Element};
use crate::error::{Error, Result};

/// Largest number of variables a truth table may range over.
pub const MAX_VARIABLES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("variable {0:?} is not in the variable order")]
    UnknownVariable(String),

    #[error("{count} variables exceed the limit of {cap}")]
    TooManyVariables { count: usize, cap: usize },

    #[error("satisfiable input: {}", format_model(.model))]
    SatisfiableInput { model: Vec<(String, bool)> },
}

/// `p=1,q=0` style rendering of an assignment.
pub fn format_model(model: &[(String, bool)]) -> String {
    model
        .iter()
        .map(|(v, b)| format!("{v}={}", u8::from(*b)))
        .collect::<Vec<_>>()
        .join(",")
}

fn check_order(order: &[String]) -> Result<()> {
    if order.len() > MAX_VARIABLES {
        return Err(LogicError::TooManyVariables {
            count: order.len(),
            cap: MAX_VARIABLES,
        }
        .into());
    }
    Ok(())
}

/// `{p ∈ P(2^k) : bit v of p is set}`, the generator for `order[v]`.
pub fn variable_element(k: usize, v: usize) -> Element {
    Element::from_fn(1 << k, |p| p >> v & 1 == 1)
}

/// The satisfying assignments of `f` as a subset of `{0, .., 2^k - 1}`,
/// `k = |order|`, where bit `v` of a point is the value of `order[v]`.
pub fn formula_to_element(f: &Formula, order: &[String]) -> Result<Element> {
    check_order(order)?;
    let k = order.len();
    let eval = |g: &Formula| -> Result<Element> { formula_to_element(g, order) };
    Ok(match f {
        Formula::Var(name) => {
            let v = order
                .iter()
                .position(|o| o == name)
                .ok_or_else(|| LogicError::UnknownVariable(name.clone()))?;
            variable_element(k, v)
        }
        Formula::Const(true) => Element::full(1 << k),
        Formula::Const(false) => Element::empty(1 << k),
        Formula::Not(a) => eval(a)?.complement(),
        Formula::And(a, b) => eval(a)?.meet(&eval(b)?),
        Formula::Or(a, b) => eval(a)?.join(&eval(b)?),
        Formula::Implies(a, b) => eval(a)?.complement().join(&eval(b)?),
        Formula::Iff(a, b) => {
            let (x, y) = (eval(a)?, eval(b)?);
            x.meet(&y).join(&x.complement().meet(&y.complement()))
        }
    })
}

/// A conjunction of literals: variables in `mask` take the values in `bits`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Cube {
    mask: usize,
    bits: usize,
}

impl Cube {
    fn points(self, k: usize) -> impl Iterator<Item = usize> {
        let free = !self.mask & ((1usize << k) - 1);
        let mut sub = free;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let p = self.bits | sub;
            if sub == 0 {
                done = true;
            } else {
                sub = (sub - 1) & free;
            }
            Some(p)
        })
    }
}

/// A disjunctive normal form whose truth set is exactly `x`: each point of
/// `x` not yet covered grows into a cube by dropping variables (in order)
/// while the cube stays inside `x`, then cubes covered by the others are
/// discarded.
pub fn element_to_formula(x: &Element, order: &[String]) -> Result<Formula> {
    check_order(order)?;
    let k = order.len();
    crate::error::check_ground(1 << k, x.ground())?;
    let mut covered = Element::empty(x.ground());
    let mut cubes: Vec<Cube> = Vec::new();
    for p in x.points() {
        if covered.contains(p) {
            continue;
        }
        let mut cube = Cube {
            mask: (1 << k) - 1,
            bits: p,
        };
        for v in 0..k {
            let wider = Cube {
                mask: cube.mask & !(1 << v),
                bits: cube.bits & !(1 << v),
            };
            if wider.points(k).all(|q| x.contains(q)) {
                cube = wider;
            }
        }
        for q in cube.points(k) {
            covered.insert(q);
        }
        cubes.push(cube);
    }
    // drop cubes whose points the remaining cubes already cover
    let mut i = 0;
    while i < cubes.len() {
        let others_cover = cubes[i].points(k).all(|q| {
            cubes
                .iter()
                .enumerate()
                .any(|(j, c)| j != i && q & c.mask == c.bits)
        });
        if others_cover {
            cubes.remove(i);
        } else {
            i += 1;
        }
    }
    let term = |c: &Cube| {
        (0..k)
            .filter(|v| c.mask >> v & 1 == 1)
            .map(|v| {
                let lit = Formula::Var(order[v].clone());
                if c.bits >> v & 1 == 1 {
                    lit
                } else {
                    Formula::not(lit)
                }
            })
            .reduce(Formula::and)
            .unwrap_or(Formula::Const(true))
    };
    Ok(cubes
        .iter()
        .map(term)
        .reduce(Formula::or)
        .unwrap_or(Formula::Const(false)))
}

/// The n-ary interpolants of a jointly unsatisfiable tuple, with the data
/// they were computed from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interpolation {
    /// All variables, sorted; the free algebra's ground is `2^|order|`.
    pub order: Vec<String>,
    /// For each formula, the variables it shares with some other formula.
    pub shared: Vec<Vec<String>>,
    #[serde(serialize_with = "display_all")]
    pub interpolants: Vec<Formula>,
    /// Truth sets of the interpolants.
    pub elements: Vec<Element>,
}

fn display_all<S: serde::Serializer>(fs: &[Formula], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(fs.iter().map(|f| f.to_string()))
}

/// Interpolants `ψ_i` with `φ_i ⊨ ψ_i`, `vars(ψ_i)` inside the variables
/// `φ_i` shares with the other formulas, and `⋀ψ⃗` unsatisfiable.
///
/// `ψ_i` is the least member above `φ_i` of the subalgebra generated by the
/// shared variables of `φ_i`, so it is the strongest such formula.
pub fn interpolants(phis: &[Formula]) -> Result<Vec<Formula>> {
    Ok(interpolate(phis)?.interpolants)
}

/// [`interpolants`] together with the variable order and truth sets.
pub fn interpolate(phis: &[Formula]) -> Result<Interpolation> {
    let vars: Vec<BTreeSet<String>> = phis.iter().map(Formula::vars).collect();
    let order: Vec<String> = vars.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    check_order(&order)?;
    let k = order.len();
    let ground = 1usize << k;
    let xs: Vec<Element> = phis
        .iter()
        .map(|f| formula_to_element(f, &order))
        .collect::<Result<_>>()?;
    let meet = Element::meet_all(ground, &xs);
    if let Some(p) = meet.first() {
        let model = order
            .iter()
            .enumerate()
            .map(|(v, name)| (name.clone(), p >> v & 1 == 1))
            .collect();
        return Err(LogicError::SatisfiableInput { model }.into());
    }

    let mut shared = Vec::with_capacity(phis.len());
    let mut interpolants = Vec::with_capacity(phis.len());
    let mut elements = Vec::with_capacity(phis.len());
    for (i, x) in xs.iter().enumerate() {
        let others: BTreeSet<&String> = vars
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .flat_map(|(_, h)| h.iter())
            .collect();
        let common: Vec<String> = vars[i].iter().filter(|v| others.contains(v)).cloned().collect();
        let gens: Vec<Element> = common
            .iter()
            .map(|name| variable_element(k, order.iter().position(|o| o == name).expect("in order")))
            .collect();
        let d = generate_subalgebra(ground, &gens)?;
        let y = d.upper_projection(x)?;
        let psi = element_to_formula(&y, &order)?;

        if !x.is_subset(&y) {
            return Err(Error::CrossCheck(format!("interpolant {i} does not follow from its formula")));
        }
        if !psi.vars().iter().all(|v| common.contains(v)) {
            return Err(Error::CrossCheck(format!("interpolant {i} uses an unshared variable")));
        }
        if formula_to_element(&psi, &order)? != y {
            return Err(Error::CrossCheck(format!("interpolant {i} does not define its truth set")));
        }
        shared.push(common);
        interpolants.push(psi);
        elements.push(y);
    }
    if !Element::meet_all(ground, &elements).is_empty() {
        return Err(Error::CrossCheck("interpolants are jointly satisfiable".into()));
    }
    Ok(Interpolation {
        order,
        shared,
        interpolants,
        elements,
    })
}
