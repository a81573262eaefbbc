//! Taxonomic class and relation expressions.
//!
//! Relation expressions are kept flat: a base relation (primitive, goal or
//! comparison) optionally inverted and optionally closed under `*`. That is
//! exactly the set of relation forms reachable without using `*` or inverse
//! twice, with `(inv (star R))` normalized to `(star (inv R))`.

mod enumerate;
mod eval;
mod syntax;

use std::cmp::Ordering;

use thiserror::Error;

use crate::pstrips::PredId;

pub use enumerate::{conjoin, enumerate_intersection_free, CandidateSpace, CandidateSpaceParams, Node};
pub use eval::{eval_class, eval_rel, StateEval};
pub use syntax::{class_string, parse_class, parse_class_str, parse_rel, rel_string};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("depth is only defined for intersection-free expressions")]
    DepthOfIntersection,
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("predicate id {0} is not a {1}")]
    BadPredicate(u16, &'static str),
    #[error("{0}")]
    Syntax(String),
}

/// Base of a relation expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelBase {
    /// Binary world or goal predicate.
    Primitive(PredId),
    /// `cR = R ∩ gR` for a binary world predicate `R`.
    Comparison(PredId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelExpr {
    pub base: RelBase,
    pub inverse: bool,
    pub star: bool,
}

impl RelExpr {
    pub fn primitive(p: PredId) -> Self {
        RelExpr {
            base: RelBase::Primitive(p),
            inverse: false,
            star: false,
        }
    }

    pub fn comparison(p: PredId) -> Self {
        RelExpr {
            base: RelBase::Comparison(p),
            inverse: false,
            star: false,
        }
    }

    /// `R⁻¹`, or `None` if the expression already uses inverse.
    pub fn inverse(self) -> Option<Self> {
        (!self.inverse).then_some(RelExpr {
            inverse: true,
            ..self
        })
    }

    /// `R*`, or `None` if the expression already uses star.
    pub fn star(self) -> Option<Self> {
        (!self.star).then_some(RelExpr { star: true, ..self })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassExpr {
    AThing,
    /// Unary world or goal predicate.
    Primitive(PredId),
    /// `cP = P ∩ gP` for a unary world predicate `P`.
    Comparison(PredId),
    /// Registered derived class, by index into `DomainDef::derived`.
    Derived(u16),
    Not(Box<ClassExpr>),
    RelApp(RelExpr, Box<ClassExpr>),
    /// Top-level conjunction of intersection-free members.
    Intersect(Vec<ClassExpr>),
}

impl ClassExpr {
    /// `¬c`, rejecting double negation and negated intersections.
    pub fn not(c: ClassExpr) -> Option<ClassExpr> {
        match c {
            ClassExpr::Not(_) | ClassExpr::Intersect(_) => None,
            c => Some(ClassExpr::Not(Box::new(c))),
        }
    }

    pub fn rel_app(r: RelExpr, c: ClassExpr) -> Option<ClassExpr> {
        match c {
            ClassExpr::Intersect(_) => None,
            c => Some(ClassExpr::RelApp(r, Box::new(c))),
        }
    }

    pub fn is_intersection_free(&self) -> bool {
        !matches!(self, ClassExpr::Intersect(_))
    }

    /// Conjuncts of a (possibly trivial) intersection; `a-thing` has none.
    pub fn conjuncts(&self) -> &[ClassExpr] {
        match self {
            ClassExpr::Intersect(v) => v,
            ClassExpr::AThing => &[],
            c => std::slice::from_ref(c),
        }
    }

    /// Largest conjunct depth (1 for `a-thing`).
    pub fn max_depth(&self) -> usize {
        self.conjuncts()
            .iter()
            .map(|c| depth(c).expect("conjuncts are intersection-free"))
            .max()
            .unwrap_or(1)
    }
}

/// Depth of an intersection-free class expression.
pub fn depth(c: &ClassExpr) -> Result<usize, Error> {
    match c {
        ClassExpr::AThing
        | ClassExpr::Primitive(_)
        | ClassExpr::Comparison(_)
        | ClassExpr::Derived(_) => Ok(1),
        ClassExpr::Not(inner) | ClassExpr::RelApp(_, inner) => Ok(1 + depth(inner)?),
        ClassExpr::Intersect(_) => Err(Error::DepthOfIntersection),
    }
}

/// Canonical order of conjuncts: depth, then structure.
pub(crate) fn conjunct_cmp(a: &ClassExpr, b: &ClassExpr) -> Ordering {
    let da = depth(a).unwrap_or(usize::MAX);
    let db = depth(b).unwrap_or(usize::MAX);
    da.cmp(&db).then_with(|| a.cmp(b))
}

/// Builds a canonical conjunction: `a-thing` members dropped, sorted,
/// duplicate-free, unwrapped when a single member remains.
pub fn intersect(members: Vec<ClassExpr>) -> ClassExpr {
    let mut v: Vec<ClassExpr> = members
        .into_iter()
        .flat_map(|m| match m {
            ClassExpr::Intersect(inner) => inner,
            m => vec![m],
        })
        .filter(|m| *m != ClassExpr::AThing)
        .collect();
    v.sort_by(conjunct_cmp);
    v.dedup();
    match v.len() {
        0 => ClassExpr::AThing,
        1 => v.pop().unwrap(),
        _ => ClassExpr::Intersect(v),
    }
}

#[cfg(test)]
mod tests;
