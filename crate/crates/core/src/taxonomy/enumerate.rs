use super::{class_string, conjunct_cmp, rel_string, ClassExpr, Error, RelExpr, StateEval};
use crate::bitset::ObjSet;
use crate::pstrips::{DomainDef, PredId, State};

/// Bounds of the restricted concept space: intersection-free depth `d` and
/// at most `w` conjuncts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CandidateSpaceParams {
    pub d: usize,
    pub w: usize,
}

/// How an enumerated expression is built from earlier entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Node {
    /// Depth-one expression, evaluated directly.
    Leaf,
    Not(usize),
    /// Relation index into [`CandidateSpace::relations`], child expression.
    RelApp(usize, usize),
}

/// All canonical intersection-free class expressions up to a depth, ordered
/// by depth then canonical string. Children always precede parents.
#[derive(Debug, Clone)]
pub struct CandidateSpace {
    pub exprs: Vec<ClassExpr>,
    pub nodes: Vec<Node>,
    pub depths: Vec<usize>,
    pub relations: Vec<RelExpr>,
}

fn world_preds_of_arity(dom: &DomainDef, arity: u8) -> Vec<PredId> {
    dom.world_predicates()
        .filter(|&p| dom.pred(p).arity == arity)
        .collect()
}

/// Every relation form: `R`, `R⁻¹`, `R*`, `(R⁻¹)*` for each binary world,
/// goal and comparison base.
pub fn relation_forms(dom: &DomainDef) -> Vec<RelExpr> {
    let mut out = Vec::new();
    for p in world_preds_of_arity(dom, 2) {
        for base in [
            RelExpr::primitive(p),
            RelExpr::primitive(dom.goal_twin(p)),
            RelExpr::comparison(p),
        ] {
            let inv = base.inverse().unwrap();
            out.extend([base, inv, base.star().unwrap(), inv.star().unwrap()]);
        }
    }
    out.sort_by_key(|r| rel_string(r, dom));
    out
}

impl CandidateSpace {
    pub fn build(dom: &DomainDef, d: usize) -> CandidateSpace {
        let relations = relation_forms(dom);
        let mut level: Vec<(String, ClassExpr, Node)> = Vec::new();
        level.push(("a-thing".into(), ClassExpr::AThing, Node::Leaf));
        for p in world_preds_of_arity(dom, 1) {
            for c in [
                ClassExpr::Primitive(p),
                ClassExpr::Primitive(dom.goal_twin(p)),
                ClassExpr::Comparison(p),
            ] {
                level.push((class_string(&c, dom), c, Node::Leaf));
            }
        }
        for i in 0..dom.derived.len() {
            let c = ClassExpr::Derived(i as u16);
            level.push((class_string(&c, dom), c, Node::Leaf));
        }

        let mut space = CandidateSpace {
            exprs: Vec::new(),
            nodes: Vec::new(),
            depths: Vec::new(),
            relations,
        };
        for depth in 1..=d.max(1) {
            if depth > 1 {
                let prev = space
                    .depths
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k == depth - 1)
                    .map(|(i, _)| i)
                    .collect::<Vec<_>>();
                for &ci in &prev {
                    let child = &space.exprs[ci];
                    if let Some(n) = ClassExpr::not(child.clone()) {
                        level.push((class_string(&n, dom), n, Node::Not(ci)));
                    }
                    for (ri, r) in space.relations.iter().enumerate() {
                        let e = ClassExpr::rel_app(*r, child.clone()).expect("child is intersection-free");
                        level.push((class_string(&e, dom), e, Node::RelApp(ri, ci)));
                    }
                }
            }
            level.sort_by(|a, b| a.0.cmp(&b.0));
            for (_, e, n) in level.drain(..) {
                space.exprs.push(e);
                space.nodes.push(n);
                space.depths.push(depth);
            }
        }
        space
    }

    pub fn len(&self) -> usize {
        self.exprs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exprs.is_empty()
    }

    /// Denotations of every expression in `q`, in space order.
    pub fn eval_all(&self, dom: &DomainDef, q: &State) -> Result<Vec<ObjSet>, Error> {
        let mut ev = StateEval::new(dom, q);
        let rels = self
            .relations
            .iter()
            .map(|r| ev.rel(r))
            .collect::<Result<Vec<_>, _>>()?;
        let n = q.num_objects();
        let mut out: Vec<ObjSet> = Vec::with_capacity(self.len());
        for (e, node) in self.exprs.iter().zip(&self.nodes) {
            let s = match *node {
                Node::Leaf => ev.class(e)?,
                Node::Not(c) => out[c].complement(n),
                Node::RelApp(r, c) => rels[r].preimage(&out[c]),
            };
            out.push(s);
        }
        Ok(out)
    }
}

/// Canonical intersection-free expressions of depth at most `d`.
pub fn enumerate_intersection_free(dom: &DomainDef, d: usize) -> Vec<ClassExpr> {
    CandidateSpace::build(dom, d).exprs
}

/// `c ∩ c′` in canonical form, or `None` when `c′` is already a conjunct, is
/// not intersection-free, or the result would exceed `w` conjuncts.
pub fn conjoin(c: &ClassExpr, extra: &ClassExpr, params: CandidateSpaceParams) -> Option<ClassExpr> {
    if !extra.is_intersection_free() || *extra == ClassExpr::AThing {
        return None;
    }
    let current = c.conjuncts();
    if current.contains(extra) || current.len() + 1 > params.w {
        return None;
    }
    let mut members = current.to_vec();
    let at = members
        .binary_search_by(|m| conjunct_cmp(m, extra))
        .unwrap_err();
    members.insert(at, extra.clone());
    Some(if members.len() == 1 {
        members.pop().unwrap()
    } else {
        ClassExpr::Intersect(members)
    })
}
