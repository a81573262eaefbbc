//! Decision-list policies over taxonomic rules and bagged ensembles.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::pstrips::{legal_actions, ActionTypeId, DomainDef, GroundAction, State};
use crate::sexpr::{self, Sexpr};
use crate::taxonomy::{self, class_string, parse_class, ClassExpr, StateEval};

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Syntax(String),
    #[error(transparent)]
    Concept(#[from] taxonomy::Error),
    #[error("unknown action type `{0}`")]
    UnknownAction(String),
    #[error("action type `{0}` does not take exactly one argument")]
    NotUnary(String),
    #[error("an ensemble needs at least one member")]
    EmptyEnsemble,
}

/// `concept : action`: applies the action type to objects in the concept.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub concept: ClassExpr,
    pub action: ActionTypeId,
}

impl Rule {
    pub fn new(dom: &DomainDef, concept: ClassExpr, action: ActionTypeId) -> Result<Rule, Error> {
        let ty = dom
            .action_types
            .get(action.0 as usize)
            .ok_or_else(|| Error::UnknownAction(format!("#{}", action.0)))?;
        if ty.arity != 1 {
            return Err(Error::NotUnary(ty.name.clone()));
        }
        Ok(Rule { concept, action })
    }

    pub fn to_string(&self, dom: &DomainDef) -> String {
        format!(
            "(rule {} {})",
            class_string(&self.concept, dom),
            dom.action_type(self.action).name
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct DecisionList {
    pub rules: Vec<Rule>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ensemble {
    pub members: Vec<DecisionList>,
}

impl Ensemble {
    pub fn new(members: Vec<DecisionList>) -> Result<Ensemble, Error> {
        if members.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        Ok(Ensemble { members })
    }
}

/// A state paired with its set of optimal actions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingInstance {
    pub state: State,
    /// Sorted, duplicate-free.
    pub optimal: Vec<GroundAction>,
}

impl TrainingInstance {
    pub fn new(state: State, mut optimal: Vec<GroundAction>) -> Self {
        optimal.sort();
        optimal.dedup();
        TrainingInstance { state, optimal }
    }
}

/// Per-state context shared by every rule evaluated in that state.
pub struct Ctx<'a> {
    eval: StateEval<'a>,
    legal: Vec<GroundAction>,
}

impl<'a> Ctx<'a> {
    pub fn new(dom: &'a DomainDef, q: &'a State) -> Self {
        Ctx {
            eval: StateEval::new(dom, q),
            legal: legal_actions(q, dom),
        }
    }

    pub fn legal(&self) -> &[GroundAction] {
        &self.legal
    }

    pub fn suggest(&mut self, r: &Rule) -> Vec<GroundAction> {
        let lo = self.legal.partition_point(|a| a.action < r.action);
        let hi = self.legal.partition_point(|a| a.action <= r.action);
        if lo == hi {
            return Vec::new();
        }
        // Concepts in a validated policy only name declared predicates.
        let set = self
            .eval
            .class(&r.concept)
            .expect("rule concept evaluates in its domain");
        self.legal[lo..hi]
            .iter()
            .filter(|a| set.contains(a.object()))
            .cloned()
            .collect()
    }

    pub fn dl_suggest(&mut self, l: &DecisionList) -> (Vec<GroundAction>, Option<usize>) {
        for (i, r) in l.rules.iter().enumerate() {
            let s = self.suggest(r);
            if !s.is_empty() {
                return (s, Some(i));
            }
        }
        (Vec::new(), None)
    }
}

/// Legal actions `a(o)` of the rule's type with `o` in the concept.
pub fn suggest(r: &Rule, q: &State, dom: &DomainDef) -> Vec<GroundAction> {
    Ctx::new(dom, q).suggest(r)
}

/// Suggestions of the first rule that suggests anything, and its index.
pub fn dl_suggest(l: &DecisionList, q: &State, dom: &DomainDef) -> (Vec<GroundAction>, Option<usize>) {
    Ctx::new(dom, q).dl_suggest(l)
}

/// Least suggested action, else the least legal action; `None` at dead ends.
pub fn dl_act(l: &DecisionList, q: &State, dom: &DomainDef) -> Option<GroundAction> {
    let mut ctx = Ctx::new(dom, q);
    let (s, _) = ctx.dl_suggest(l);
    s.into_iter().next().or_else(|| ctx.legal.first().cloned())
}

/// Vote among members: one vote per suggested action per member; the most
/// voted action wins, ties going to the least action.
pub fn ensemble_act(e: &Ensemble, q: &State, dom: &DomainDef) -> Option<GroundAction> {
    let mut ctx = Ctx::new(dom, q);
    let mut votes: BTreeMap<GroundAction, usize> = BTreeMap::new();
    for m in &e.members {
        for a in ctx.dl_suggest(m).0 {
            *votes.entry(a).or_default() += 1;
        }
    }
    let mut best: Option<(GroundAction, usize)> = None;
    for (a, v) in votes {
        if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
            best = Some((a, v));
        }
    }
    best.map(|(a, _)| a).or_else(|| ctx.legal.first().cloned())
}

/// The list suggests some action for the instance's state.
pub fn covers(l: &DecisionList, f: &TrainingInstance, dom: &DomainDef) -> bool {
    !dl_suggest(l, &f.state, dom).0.is_empty()
}

/// The list covers the instance and every suggestion is optimal.
pub fn correctly_covers(l: &DecisionList, f: &TrainingInstance, dom: &DomainDef) -> bool {
    let (s, _) = dl_suggest(l, &f.state, dom);
    !s.is_empty() && s.iter().all(|a| f.optimal.binary_search(a).is_ok())
}

/// A single list or an ensemble.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Policy {
    List(DecisionList),
    Ensemble(Ensemble),
}

impl Policy {
    pub fn act(&self, q: &State, dom: &DomainDef) -> Option<GroundAction> {
        match self {
            Policy::List(l) => dl_act(l, q, dom),
            Policy::Ensemble(e) => ensemble_act(e, q, dom),
        }
    }

    pub fn to_string(&self, dom: &DomainDef) -> String {
        let mut s = String::new();
        match self {
            Policy::List(l) => write_list(&mut s, l, dom, ""),
            Policy::Ensemble(e) => {
                s.push_str("(ensemble");
                for m in &e.members {
                    s.push('\n');
                    write_list(&mut s, m, dom, "  ");
                }
                s.push(')');
            }
        }
        s.push('\n');
        s
    }
}

fn write_list(s: &mut String, l: &DecisionList, dom: &DomainDef, indent: &str) {
    let _ = write!(s, "{indent}(policy");
    for r in &l.rules {
        let _ = write!(s, "\n{indent}  {}", r.to_string(dom));
    }
    s.push(')');
}

fn err(e: &Sexpr, msg: &str) -> Error {
    Error::Syntax(format!("{}: {msg}", e.pos()))
}

fn parse_list(e: &Sexpr, dom: &DomainDef) -> Result<DecisionList, Error> {
    let items = e
        .tagged("policy")
        .ok_or_else(|| err(e, "expected `(policy (rule C A)...)`"))?;
    let mut rules = Vec::new();
    for r in items {
        let parts = r
            .tagged("rule")
            .filter(|p| p.len() == 2)
            .ok_or_else(|| err(r, "expected `(rule CONCEPT ACTION)`"))?;
        let concept = parse_class(&parts[0], dom)?;
        let name = parts[1]
            .as_atom()
            .ok_or_else(|| err(&parts[1], "expected an action-type name"))?;
        let action = dom
            .action_by_name(name)
            .ok_or_else(|| Error::UnknownAction(name.to_string()))?;
        rules.push(Rule::new(dom, concept, action)?);
    }
    Ok(DecisionList { rules })
}

/// Parses `(policy ...)` or `(ensemble (policy ...)...)`.
pub fn parse_policy(text: &str, dom: &DomainDef) -> Result<Policy, Error> {
    let e = sexpr::parse_one(text).map_err(|e| Error::Syntax(e.to_string()))?;
    match e.head() {
        Some("ensemble") => {
            let members = e
                .tagged("ensemble")
                .unwrap()
                .iter()
                .map(|m| parse_list(m, dom))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Policy::Ensemble(Ensemble::new(members)?))
        }
        _ => Ok(Policy::List(parse_list(&e, dom)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::builtin_domain;
    use crate::pstrips::parse_state;
    use crate::taxonomy::parse_class_str;

    fn rule(dom: &DomainDef, c: &str, a: &str) -> Rule {
        Rule::new(dom, parse_class_str(c, dom).unwrap(), dom.action_by_name(a).unwrap()).unwrap()
    }

    fn shown(dom: &DomainDef, q: &State, v: &[GroundAction]) -> Vec<String> {
        v.iter().map(|a| a.display(dom, q.objects()).to_string()).collect()
    }

    const Q1: &str = "(state (objects a b) (facts (on b a) (on-table a) (clear b) (arm-empty) (gclear a)))";

    #[test]
    fn suggest_examples() {
        let d = builtin_domain("bw1").unwrap();
        let q = parse_state(&d, Q1).unwrap();
        assert_eq!(shown(&d, &q, &suggest(&rule(&d, "(on gclear)", "unstack"), &q, &d)), ["unstack(b)"]);
        assert!(suggest(&rule(&d, "gclear", "unstack"), &q, &d).is_empty());
        assert!(suggest(&rule(&d, "a-thing", "put-down"), &q, &d).is_empty());
    }

    #[test]
    fn decision_list_examples() {
        let d = builtin_domain("bw1").unwrap();
        let q = parse_state(&d, Q1).unwrap();
        let l = DecisionList {
            rules: vec![rule(&d, "gclear", "unstack"), rule(&d, "(on gclear)", "unstack")],
        };
        let (s, i) = dl_suggest(&l, &q, &d);
        assert_eq!(shown(&d, &q, &s), ["unstack(b)"]);
        assert_eq!(i, Some(1));
        assert_eq!(dl_suggest(&DecisionList::default(), &q, &d), (vec![], None));
        assert_eq!(shown(&d, &q, &[dl_act(&l, &q, &d).unwrap()]), ["unstack(b)"]);
        assert_eq!(
            shown(&d, &q, &[dl_act(&DecisionList::default(), &q, &d).unwrap()]),
            ["unstack(b)"]
        );
    }

    #[test]
    fn first_rule_with_two_suggestions() {
        let d = builtin_domain("bw1").unwrap();
        let q = parse_state(
            &d,
            "(state (objects a b c e) (facts (on b a) (on-table a) (clear b) (on e c) (on-table c) (clear e) (arm-empty) (gclear a) (gclear c)))",
        )
        .unwrap();
        let l = DecisionList {
            rules: vec![rule(&d, "(on gclear)", "unstack"), rule(&d, "a-thing", "unstack")],
        };
        let (s, i) = dl_suggest(&l, &q, &d);
        assert_eq!(shown(&d, &q, &s), ["unstack(b)", "unstack(e)"]);
        assert_eq!(i, Some(0));
    }

    #[test]
    fn dead_end_has_no_action() {
        let d = builtin_domain("bw1").unwrap();
        let q = parse_state(&d, "(state (objects a) (facts (on-table a)))").unwrap();
        assert_eq!(dl_act(&DecisionList::default(), &q, &d), None);
        let e = Ensemble::new(vec![DecisionList::default()]).unwrap();
        assert_eq!(ensemble_act(&e, &q, &d), None);
    }

    #[test]
    fn voting() {
        let d = builtin_domain("bw1").unwrap();
        let q = parse_state(
            &d,
            "(state (objects x y) (facts (on-table x) (clear x) (on-table y) (clear y) (arm-empty) (gon x y)))",
        )
        .unwrap();
        let px = DecisionList { rules: vec![rule(&d, "(gon a-thing)", "pick-up")] };
        let py = DecisionList { rules: vec![rule(&d, "(not (gon a-thing))", "pick-up")] };
        let none = DecisionList { rules: vec![rule(&d, "holding", "pick-up")] };
        let act = |m: Vec<DecisionList>| {
            let e = Ensemble::new(m).unwrap();
            ensemble_act(&e, &q, &d).map(|a| a.display(&d, q.objects()).to_string())
        };
        assert_eq!(act(vec![py.clone(), py.clone(), px.clone()]).unwrap(), "pick-up(y)");
        assert_eq!(act(vec![py.clone(), px.clone()]).unwrap(), "pick-up(x)");
        assert_eq!(act(vec![px.clone(), py.clone()]).unwrap(), "pick-up(x)");
        assert_eq!(act(vec![none.clone(), none]).unwrap(), "faststack(x)");
        assert!(Ensemble::new(vec![]).is_err());
    }

    #[test]
    fn coverage_predicates() {
        let d = builtin_domain("bw1").unwrap();
        let q = parse_state(&d, Q1).unwrap();
        let opt = suggest(&rule(&d, "(on gclear)", "unstack"), &q, &d);
        let f = TrainingInstance::new(q.clone(), opt);
        let good = DecisionList { rules: vec![rule(&d, "(on gclear)", "unstack")] };
        let bad = DecisionList { rules: vec![rule(&d, "gclear", "unstack")] };
        assert!(covers(&good, &f, &d) && correctly_covers(&good, &f, &d));
        assert!(!covers(&bad, &f, &d) && !correctly_covers(&bad, &f, &d));
    }

    #[test]
    fn text_round_trip() {
        let d = builtin_domain("bw1").unwrap();
        let l = DecisionList {
            rules: vec![
                rule(&d, "(and clear ((star on) (on gclear)))", "unstack"),
                rule(&d, "((inv gon) holding)", "stack"),
            ],
        };
        for p in [
            Policy::List(l.clone()),
            Policy::List(DecisionList::default()),
            Policy::Ensemble(Ensemble::new(vec![l.clone(), DecisionList::default()]).unwrap()),
        ] {
            let text = p.to_string(&d);
            let back = parse_policy(&text, &d).unwrap();
            assert_eq!(back, p);
            assert_eq!(back.to_string(&d), text);
        }
        assert!(parse_policy("(policy (rule clear nosuch))", &d).is_err());
        assert!(parse_policy("(policy (rule frob stack))", &d).is_err());
        assert!(parse_policy("(policy (rule clear))", &d).is_err());
        assert!(parse_policy("(ensemble)", &d).is_err());
        assert!(parse_policy("(policy", &d).is_err());
    }
}
