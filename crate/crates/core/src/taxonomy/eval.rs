use std::collections::HashMap;

use super::{ClassExpr, Error, RelBase, RelExpr};
use crate::bitset::{ObjSet, Relation};
use crate::pstrips::{DomainDef, PredId, State};

/// Evaluates expressions against one state, memoizing subexpression
/// denotations.
pub struct StateEval<'a> {
    dom: &'a DomainDef,
    q: &'a State,
    n: usize,
    classes: HashMap<ClassExpr, ObjSet>,
    relations: HashMap<RelExpr, Relation>,
}

impl<'a> StateEval<'a> {
    pub fn new(dom: &'a DomainDef, q: &'a State) -> Self {
        StateEval {
            dom,
            q,
            n: q.num_objects(),
            classes: HashMap::new(),
            relations: HashMap::new(),
        }
    }

    pub fn state(&self) -> &State {
        self.q
    }

    fn checked(&self, p: PredId, arity: u8, what: &'static str) -> Result<PredId, Error> {
        match self.dom.predicates.get(p.0 as usize) {
            Some(d) if d.arity == arity => Ok(p),
            _ => Err(Error::BadPredicate(p.0, what)),
        }
    }

    fn unary(&self, p: PredId) -> Result<ObjSet, Error> {
        let p = self.checked(p, 1, "unary predicate")?;
        let facts = if p.0 >= self.dom.n_world {
            self.q.goal_facts(self.dom.world_of(p))
        } else {
            self.q.world_facts(p)
        };
        let mut s = ObjSet::empty(self.n);
        for a in facts {
            s.insert(a.args[0]);
        }
        Ok(s)
    }

    fn binary(&self, p: PredId) -> Result<Relation, Error> {
        let p = self.checked(p, 2, "binary predicate")?;
        let facts = if p.0 >= self.dom.n_world {
            self.q.goal_facts(self.dom.world_of(p))
        } else {
            self.q.world_facts(p)
        };
        let mut r = Relation::empty(self.n);
        for a in facts {
            r.insert(a.args[0], a.args[1]);
        }
        Ok(r)
    }

    fn world_pred(&self, p: PredId, arity: u8) -> Result<PredId, Error> {
        if p.0 >= self.dom.n_world {
            return Err(Error::BadPredicate(p.0, "world predicate"));
        }
        self.checked(p, arity, "world predicate")
    }

    pub fn rel(&mut self, r: &RelExpr) -> Result<Relation, Error> {
        if let Some(v) = self.relations.get(r) {
            return Ok(v.clone());
        }
        let v = if r.star {
            self.rel(&RelExpr { star: false, ..*r })?.star()
        } else if r.inverse {
            self.rel(&RelExpr {
                inverse: false,
                ..*r
            })?
            .transpose()
        } else {
            match r.base {
                RelBase::Primitive(p) => self.binary(p)?,
                RelBase::Comparison(p) => {
                    let p = self.world_pred(p, 2)?;
                    self.binary(p)?.intersect(&self.binary(self.dom.goal_twin(p))?)
                }
            }
        };
        self.relations.insert(*r, v.clone());
        Ok(v)
    }

    pub fn class(&mut self, c: &ClassExpr) -> Result<ObjSet, Error> {
        if let Some(v) = self.classes.get(c) {
            return Ok(v.clone());
        }
        let v = match c {
            ClassExpr::AThing => ObjSet::full(self.n),
            ClassExpr::Primitive(p) => self.unary(*p)?,
            ClassExpr::Comparison(p) => {
                let p = self.world_pred(*p, 1)?;
                let mut s = self.unary(p)?;
                s.intersect_with(&self.unary(self.dom.goal_twin(p))?);
                s
            }
            ClassExpr::Derived(i) => {
                let def = &self
                    .dom
                    .derived
                    .get(*i as usize)
                    .ok_or(Error::BadPredicate(*i, "derived predicate"))?
                    .definition;
                self.class(def)?
            }
            ClassExpr::Not(inner) => self.class(inner)?.complement(self.n),
            ClassExpr::RelApp(r, inner) => {
                let target = self.class(inner)?;
                self.rel(r)?.preimage(&target)
            }
            ClassExpr::Intersect(members) => {
                let mut s = ObjSet::full(self.n);
                for m in members {
                    s.intersect_with(&self.class(m)?);
                }
                s
            }
        };
        self.classes.insert(c.clone(), v.clone());
        Ok(v)
    }
}

/// Denotation of a class expression in `q`.
pub fn eval_class(c: &ClassExpr, q: &State, dom: &DomainDef) -> Result<ObjSet, Error> {
    StateEval::new(dom, q).class(c)
}

/// Denotation of a relation expression in `q`.
pub fn eval_rel(r: &RelExpr, q: &State, dom: &DomainDef) -> Result<Relation, Error> {
    StateEval::new(dom, q).rel(r)
}
