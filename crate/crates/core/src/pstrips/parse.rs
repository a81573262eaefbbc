//! Domain and state file syntax.
//!
//! ```text
//! (domain NAME
//!   (predicates (NAME ARITY)...)
//!   (action NAME (params X...) (aux Y...) (pre LITERAL...)
//!     (case (guard LITERAL...) (outcome PROB (add ATOM...) (del ATOM...))...)...)
//!   (derived NAME CONCEPT)...)
//!
//! (state (objects o...) (facts ATOM...))
//! ```

use std::fmt;
use std::sync::Arc;

use super::{
    ActionSchema, ActionType, ActionTypeId, Atom, Case, DerivedPredicate, DomainDef, Error,
    Literal, ObjectTable, Obj, Outcome, PredId, PredRole, PredicateDecl, SchemaAtom, State,
    VarId,
};
use crate::sexpr::{self, Pos, Sexpr, SyntaxError};
use crate::taxonomy;

const PROB_TOLERANCE: f64 = 1e-9;

fn syntax(pos: Pos, msg: impl Into<String>) -> Error {
    Error::Syntax(SyntaxError::new(pos, msg))
}

/// Parses and validates a domain file.
pub fn parse_domain(text: &str) -> Result<DomainDef, Error> {
    let top = sexpr::parse_one(text)?;
    let body = top
        .tagged("domain")
        .ok_or_else(|| syntax(top.pos(), "expected `(domain NAME ...)`"))?;
    let name = body
        .first()
        .ok_or_else(|| syntax(top.pos(), "missing domain name"))?
        .expect_atom("domain name")?
        .to_string();

    let mut pred_sections = Vec::new();
    let mut actions = Vec::new();
    let mut derived = Vec::new();
    for section in &body[1..] {
        match section.head() {
            Some("predicates") => pred_sections.push(section),
            Some("action") => actions.push(section),
            Some("derived") => derived.push(section),
            _ => {
                return Err(syntax(
                    section.pos(),
                    format!("unexpected domain section `{section}`"),
                ))
            }
        }
    }

    let predicates = parse_predicates(&pred_sections)?;
    let n_world = predicates
        .iter()
        .filter(|p| p.role == PredRole::World)
        .count() as u16;
    let mut dom = DomainDef {
        name,
        predicates,
        n_world,
        action_types: Vec::new(),
        schemas: Vec::new(),
        derived: Vec::new(),
    };

    let mut parsed = Vec::new();
    for a in actions {
        parsed.push(parse_action(&dom, a)?);
    }
    let mut names: Vec<&str> = parsed.iter().map(|(n, _, _)| n.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    dom.action_types = names
        .iter()
        .map(|n| ActionType {
            name: n.to_string(),
            arity: 0,
            variants: Vec::new(),
        })
        .collect();
    for (i, (n, pos, mut schema)) in parsed.into_iter().enumerate() {
        let t = dom.action_by_name(&n).expect("collected above");
        let ty = &mut dom.action_types[t.0 as usize];
        if !ty.variants.is_empty() && ty.arity != schema.params.len() {
            return Err(Error::invalid(
                pos,
                format!("variants of `{n}` disagree on arity"),
            ));
        }
        ty.arity = schema.params.len();
        ty.variants.push(i);
        schema.action = t;
        dom.schemas.push(schema);
    }

    for d in derived {
        let items = d.tagged("derived").expect("dispatched on head");
        if items.len() != 2 {
            return Err(syntax(d.pos(), "expected `(derived NAME CONCEPT)`"));
        }
        let dname = items[0].expect_atom("derived predicate name")?;
        let def = taxonomy::parse_class(&items[1], &dom)
            .map_err(|e| Error::invalid(items[1].pos(), e.to_string()))?;
        if dom.pred_by_name(dname).is_some() || dom.derived_by_name(dname).is_some() {
            return Err(Error::invalid(
                items[0].pos(),
                format!("`{dname}` is already defined"),
            ));
        }
        dom.derived.push(DerivedPredicate {
            name: dname.to_string(),
            definition: def,
        });
    }
    Ok(dom)
}

fn parse_predicates(sections: &[&Sexpr]) -> Result<Vec<PredicateDecl>, Error> {
    let mut decls: Vec<(String, u8, Pos)> = Vec::new();
    for s in sections {
        for item in &s.as_list().expect("tagged list")[1..] {
            let parts = item.expect_list("`(NAME ARITY)`")?;
            if parts.len() != 2 {
                return Err(syntax(item.pos(), "expected `(NAME ARITY)`"));
            }
            let name = parts[0].expect_atom("predicate name")?;
            let arity_s = parts[1].expect_atom("arity")?;
            let arity: u8 = match arity_s.parse() {
                Ok(a @ 0..=2) => a,
                _ => {
                    return Err(syntax(
                        parts[1].pos(),
                        format!("arity must be 0, 1 or 2, found `{arity_s}`"),
                    ))
                }
            };
            if decls.iter().any(|(n, _, _)| n == name) {
                return Err(Error::invalid(
                    item.pos(),
                    format!("predicate `{name}` declared twice"),
                ));
            }
            decls.push((name.to_string(), arity, item.pos()));
        }
    }
    // `gX` is an explicit goal twin when `X` is also declared.
    let is_twin = |n: &str| {
        n.strip_prefix('g')
            .is_some_and(|w| decls.iter().any(|(m, _, _)| m == w))
    };
    let mut world: Vec<PredicateDecl> = Vec::new();
    for (n, a, _) in &decls {
        if !is_twin(n) {
            world.push(PredicateDecl {
                name: n.clone(),
                arity: *a,
                role: PredRole::World,
            });
        }
    }
    for (n, a, pos) in &decls {
        if is_twin(n) {
            let w = world.iter().find(|p| p.name == n[1..]).ok_or_else(|| {
                Error::invalid(*pos, format!("`{n}` names the goal twin of a goal predicate"))
            })?;
            if w.arity != *a {
                return Err(Error::ArityMismatch {
                    pos: *pos,
                    name: n.clone(),
                    expected: w.arity as usize,
                    found: *a as usize,
                });
            }
        }
    }
    let goals: Vec<PredicateDecl> = world
        .iter()
        .map(|p| PredicateDecl {
            name: format!("g{}", p.name),
            arity: p.arity,
            role: PredRole::Goal,
        })
        .collect();
    world.extend(goals);
    Ok(world)
}

struct VarScope<'a> {
    names: Vec<&'a str>,
}

impl VarScope<'_> {
    fn get(&self, e: &Sexpr) -> Result<VarId, Error> {
        let name = e.expect_atom("variable")?;
        self.names
            .iter()
            .position(|n| *n == name)
            .map(|i| i as VarId)
            .ok_or_else(|| Error::UnknownVariable {
                pos: e.pos(),
                name: name.to_string(),
            })
    }
}

fn resolve_pred(dom: &DomainDef, e: &Sexpr, name: &str, nargs: usize) -> Result<PredId, Error> {
    let p = dom.pred_by_name(name).ok_or_else(|| Error::UnknownPredicate {
        pos: e.pos(),
        name: name.to_string(),
    })?;
    let arity = dom.pred(p).arity as usize;
    if arity != nargs {
        return Err(Error::ArityMismatch {
            pos: e.pos(),
            name: name.to_string(),
            expected: arity,
            found: nargs,
        });
    }
    Ok(p)
}

fn parse_schema_atom(dom: &DomainDef, vars: &VarScope, e: &Sexpr) -> Result<SchemaAtom, Error> {
    let items = e.expect_list("atom")?;
    let head = items
        .first()
        .ok_or_else(|| syntax(e.pos(), "empty atom"))?
        .expect_atom("predicate name")?;
    let pred = resolve_pred(dom, e, head, items.len() - 1)?;
    let mut args = [super::NO_VAR; 2];
    for (k, v) in items[1..].iter().enumerate() {
        args[k] = vars.get(v)?;
    }
    Ok(SchemaAtom { pred, args })
}

fn parse_literal(dom: &DomainDef, vars: &VarScope, e: &Sexpr) -> Result<Literal, Error> {
    if let Some(rest) = e.tagged("not") {
        if rest.len() != 1 {
            return Err(syntax(e.pos(), "expected `(not ATOM)`"));
        }
        Ok(Literal {
            atom: parse_schema_atom(dom, vars, &rest[0])?,
            positive: false,
        })
    } else {
        Ok(Literal {
            atom: parse_schema_atom(dom, vars, e)?,
            positive: true,
        })
    }
}

fn var_names<'a>(e: &'a Sexpr, head: &str) -> Result<Vec<&'a str>, Error> {
    let items = e.tagged(head).expect("dispatched on head");
    items.iter().map(|v| Ok(v.expect_atom("variable")?)).collect()
}

fn parse_effect_list(
    dom: &DomainDef,
    vars: &VarScope,
    e: &Sexpr,
    head: &str,
) -> Result<Vec<SchemaAtom>, Error> {
    let items = e
        .tagged(head)
        .ok_or_else(|| syntax(e.pos(), format!("expected `({head} ATOM...)`")))?;
    let mut out = Vec::new();
    for it in items {
        let a = parse_schema_atom(dom, vars, it)?;
        if dom.pred(a.pred).role != PredRole::World {
            return Err(Error::invalid(
                it.pos(),
                "action effects may only mention world predicates",
            ));
        }
        out.push(a);
    }
    Ok(out)
}

fn parse_action(dom: &DomainDef, e: &Sexpr) -> Result<(String, Pos, ActionSchema), Error> {
    let items = e.tagged("action").expect("dispatched on head");
    let name = items
        .first()
        .ok_or_else(|| syntax(e.pos(), "missing action name"))?
        .expect_atom("action name")?
        .to_string();
    let mut params = Vec::new();
    let mut aux = Vec::new();
    let mut pre_e = Vec::new();
    let mut case_e = Vec::new();
    for part in &items[1..] {
        match part.head() {
            Some("params") => params = var_names(part, "params")?,
            Some("aux") => aux = var_names(part, "aux")?,
            Some("pre") => pre_e.extend(part.tagged("pre").unwrap().iter()),
            Some("case") => case_e.push(part),
            _ => {
                return Err(syntax(
                    part.pos(),
                    format!("unexpected action section `{part}`"),
                ))
            }
        }
    }
    let mut all: Vec<&str> = params.clone();
    all.extend(aux.iter().copied());
    for (i, v) in all.iter().enumerate() {
        if all[..i].contains(v) {
            return Err(Error::invalid(e.pos(), format!("variable `{v}` bound twice in `{name}`")));
        }
    }
    if all.len() > VarId::MAX as usize {
        return Err(Error::invalid(e.pos(), "too many variables"));
    }
    let vars = VarScope { names: all };
    let precondition = pre_e
        .iter()
        .map(|l| parse_literal(dom, &vars, l))
        .collect::<Result<Vec<_>, _>>()?;
    for (k, v) in aux.iter().enumerate() {
        let id = (params.len() + k) as VarId;
        let bound = precondition.iter().any(|l| {
            l.positive && l.atom.args[..dom.pred(l.atom.pred).arity as usize].contains(&id)
        });
        if !bound {
            return Err(Error::invalid(
                e.pos(),
                format!("aux variable `{v}` of `{name}` occurs in no positive precondition atom"),
            ));
        }
    }
    if case_e.is_empty() {
        return Err(Error::invalid(e.pos(), format!("action `{name}` has no outcome case")));
    }
    let mut cases = Vec::new();
    for c in case_e {
        cases.push(parse_case(dom, &vars, &name, c)?);
    }
    Ok((
        name,
        e.pos(),
        ActionSchema {
            action: ActionTypeId(0),
            params: params.iter().map(|s| s.to_string()).collect(),
            aux: aux.iter().map(|s| s.to_string()).collect(),
            precondition,
            cases,
        },
    ))
}

fn parse_case(dom: &DomainDef, vars: &VarScope, action: &str, c: &Sexpr) -> Result<Case, Error> {
    let mut guard = Vec::new();
    let mut outcomes = Vec::new();
    for part in c.tagged("case").unwrap() {
        match part.head() {
            Some("guard") => {
                for l in part.tagged("guard").unwrap() {
                    guard.push(parse_literal(dom, vars, l)?);
                }
            }
            Some("outcome") => {
                let items = part.tagged("outcome").unwrap();
                if items.is_empty() || items.len() > 3 {
                    return Err(syntax(
                        part.pos(),
                        "expected `(outcome PROB (add ATOM...) (del ATOM...))`",
                    ));
                }
                let ps = items[0].expect_atom("probability")?;
                let probability: f64 = ps
                    .parse()
                    .ok()
                    .filter(|p: &f64| (0.0..=1.0).contains(p))
                    .ok_or_else(|| {
                        syntax(items[0].pos(), format!("bad probability `{ps}`"))
                    })?;
                let mut add = Vec::new();
                let mut delete = Vec::new();
                for eff in &items[1..] {
                    match eff.head() {
                        Some("add") => add = parse_effect_list(dom, vars, eff, "add")?,
                        Some("del") => delete = parse_effect_list(dom, vars, eff, "del")?,
                        _ => return Err(syntax(eff.pos(), "expected `(add ...)` or `(del ...)`")),
                    }
                }
                outcomes.push(Outcome {
                    probability,
                    add,
                    delete,
                });
            }
            _ => return Err(syntax(part.pos(), format!("unexpected case section `{part}`"))),
        }
    }
    let sum: f64 = outcomes.iter().map(|o| o.probability).sum();
    if (sum - 1.0).abs() > PROB_TOLERANCE {
        return Err(Error::ProbabilitySum {
            pos: c.pos(),
            action: action.to_string(),
            sum,
        });
    }
    Ok(Case { guard, outcomes })
}

/// Parses a ground atom `(pred obj...)` against a domain and object table.
/// Goal predicates come back as the world atom they require, flagged `true`.
pub(crate) fn parse_ground_atom(
    dom: &DomainDef,
    objects: &ObjectTable,
    e: &Sexpr,
) -> Result<(Atom, bool), Error> {
    let items = e.expect_list("ground atom")?;
    let head = items
        .first()
        .ok_or_else(|| syntax(e.pos(), "empty atom"))?
        .expect_atom("predicate name")?;
    let mut args = Vec::with_capacity(2);
    for a in &items[1..] {
        let n = a.expect_atom("object")?;
        args.push(objects.lookup(n).ok_or_else(|| Error::UnknownObject {
            pos: a.pos(),
            name: n.to_string(),
        })?);
    }
    ground_atom(dom, e.pos(), head, &args)
}

pub(crate) fn ground_atom(
    dom: &DomainDef,
    pos: Pos,
    pred: &str,
    args: &[Obj],
) -> Result<(Atom, bool), Error> {
    let p = dom.pred_by_name(pred).ok_or_else(|| Error::UnknownPredicate {
        pos,
        name: pred.to_string(),
    })?;
    let arity = dom.pred(p).arity as usize;
    if arity != args.len() {
        return Err(Error::ArityMismatch {
            pos,
            name: pred.to_string(),
            expected: arity,
            found: args.len(),
        });
    }
    let is_goal = dom.pred(p).role == PredRole::Goal;
    Ok((Atom::new(dom.world_of(p), args), is_goal))
}

/// Parses `(state (objects o...) (facts ATOM...))`.
pub fn parse_state(dom: &DomainDef, text: &str) -> Result<State, Error> {
    let e = sexpr::parse_one(text)?;
    state_from_sexpr(dom, &e)
}

pub fn state_from_sexpr(dom: &DomainDef, e: &Sexpr) -> Result<State, Error> {
    let body = e
        .tagged("state")
        .ok_or_else(|| syntax(e.pos(), "expected `(state (objects ...) (facts ...))`"))?;
    let mut names: Vec<String> = Vec::new();
    let mut fact_e: Vec<&Sexpr> = Vec::new();
    for part in body {
        match part.head() {
            Some("objects") => {
                for o in part.tagged("objects").unwrap() {
                    let n = o.expect_atom("object name")?;
                    if names.iter().any(|m| m == n) {
                        return Err(Error::invalid(o.pos(), format!("object `{n}` listed twice")));
                    }
                    names.push(n.to_string());
                }
            }
            Some("facts") => fact_e.extend(part.tagged("facts").unwrap().iter()),
            _ => return Err(syntax(part.pos(), format!("unexpected state section `{part}`"))),
        }
    }
    let objects = ObjectTable::new(names);
    let mut world = Vec::new();
    let mut goal = Vec::new();
    for f in fact_e {
        let (a, g) = parse_ground_atom(dom, &objects, f)?;
        if g {
            goal.push(a);
        } else {
            world.push(a);
        }
    }
    State::new(dom, Arc::new(objects), world, goal)
}

/// Writes an atom as `name(o1,o2)` (or bare `name` for arity 0).
pub fn atom_string(dom: &DomainDef, objects: &ObjectTable, a: &Atom) -> String {
    let decl = dom.pred(a.pred);
    let mut s = decl.name.clone();
    if decl.arity > 0 {
        s.push('(');
        for k in 0..decl.arity as usize {
            if k > 0 {
                s.push(',');
            }
            s.push_str(objects.name(a.args[k]));
        }
        s.push(')');
    }
    s
}

/// Parses the `name(o1,o2)` / `name` form produced by [`atom_string`].
pub fn parse_atom_string(
    dom: &DomainDef,
    objects: &ObjectTable,
    s: &str,
) -> Result<(Atom, bool), Error> {
    let (name, args) = split_call(s)
        .ok_or_else(|| syntax(Pos::default(), format!("malformed atom `{s}`")))?;
    let mut ids = Vec::new();
    for a in args {
        ids.push(objects.lookup(a).ok_or_else(|| Error::UnknownObject {
            pos: Pos::default(),
            name: a.to_string(),
        })?);
    }
    ground_atom(dom, Pos::default(), name, &ids)
}

/// Splits `name(a,b)` into `("name", ["a", "b"])`; a bare `name` has no args.
pub fn split_call(s: &str) -> Option<(&str, Vec<&str>)> {
    let s = s.trim();
    match s.find('(') {
        None => (!s.is_empty() && !s.contains(')')).then(|| (s, Vec::new())),
        Some(i) => {
            let inner = s[i + 1..].strip_suffix(')')?;
            let name = &s[..i];
            if name.is_empty() {
                return None;
            }
            let args: Vec<&str> = if inner.trim().is_empty() {
                Vec::new()
            } else {
                inner.split(',').map(str::trim).collect()
            };
            if args.iter().any(|a| a.is_empty()) {
                return None;
            }
            Some((name, args))
        }
    }
}

struct Vars<'a>(&'a ActionSchema);

impl Vars<'_> {
    fn name(&self, v: VarId) -> &str {
        let v = v as usize;
        let p = self.0.params.len();
        if v < p {
            &self.0.params[v]
        } else {
            &self.0.aux[v - p]
        }
    }
}

fn write_schema_atom(
    f: &mut fmt::Formatter<'_>,
    dom: &DomainDef,
    vars: &Vars,
    a: &SchemaAtom,
) -> fmt::Result {
    let decl = dom.pred(a.pred);
    write!(f, "({}", decl.name)?;
    for k in 0..decl.arity as usize {
        write!(f, " {}", vars.name(a.args[k]))?;
    }
    f.write_str(")")
}

fn write_literals(
    f: &mut fmt::Formatter<'_>,
    dom: &DomainDef,
    vars: &Vars,
    lits: &[Literal],
) -> fmt::Result {
    for l in lits {
        f.write_str(" ")?;
        if l.positive {
            write_schema_atom(f, dom, vars, &l.atom)?;
        } else {
            f.write_str("(not ")?;
            write_schema_atom(f, dom, vars, &l.atom)?;
            f.write_str(")")?;
        }
    }
    Ok(())
}

impl fmt::Display for DomainDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(domain {}", self.name)?;
        f.write_str("  (predicates")?;
        for p in self.predicates.iter().filter(|p| p.role == PredRole::World) {
            write!(f, " ({} {})", p.name, p.arity)?;
        }
        f.write_str(")")?;
        for s in &self.schemas {
            let vars = Vars(s);
            write!(f, "\n  (action {}\n    (params", self.action_type(s.action).name)?;
            for p in &s.params {
                write!(f, " {p}")?;
            }
            f.write_str(")\n    (aux")?;
            for a in &s.aux {
                write!(f, " {a}")?;
            }
            f.write_str(")\n    (pre")?;
            write_literals(f, self, &vars, &s.precondition)?;
            f.write_str(")")?;
            for c in &s.cases {
                f.write_str("\n    (case (guard")?;
                write_literals(f, self, &vars, &c.guard)?;
                f.write_str(")")?;
                for o in &c.outcomes {
                    write!(f, "\n      (outcome {} (add", o.probability)?;
                    for a in &o.add {
                        f.write_str(" ")?;
                        write_schema_atom(f, self, &vars, a)?;
                    }
                    f.write_str(") (del")?;
                    for a in &o.delete {
                        f.write_str(" ")?;
                        write_schema_atom(f, self, &vars, a)?;
                    }
                    f.write_str("))")?;
                }
                f.write_str(")")?;
            }
            f.write_str(")")?;
        }
        for d in &self.derived {
            write!(
                f,
                "\n  (derived {} {})",
                d.name,
                taxonomy::class_string(&d.definition, self)
            )?;
        }
        writeln!(f, ")")
    }
}

/// Renders a state in the `(state ...)` file syntax.
pub fn state_string(dom: &DomainDef, q: &State) -> String {
    let mut s = String::from("(state (objects");
    for n in q.objects().names() {
        s.push(' ');
        s.push_str(n);
    }
    s.push_str(") (facts");
    for a in q.facts(dom) {
        let decl = dom.pred(a.pred);
        s.push_str(" (");
        s.push_str(&decl.name);
        for k in 0..decl.arity as usize {
            s.push(' ');
            s.push_str(q.objects().name(a.args[k]));
        }
        s.push(')');
    }
    s.push_str("))");
    s
}
