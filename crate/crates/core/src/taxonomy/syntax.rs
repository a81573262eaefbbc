//! Prefix surface syntax: `a-thing`, `NAME`, `gNAME`, `cNAME`, `(not C)`,
//! `(R C)`, `(and C C...)`; relations `NAME`, `gNAME`, `cNAME`, `(inv R)`,
//! `(star R)`.

use super::{intersect, ClassExpr, Error, RelBase, RelExpr};
use crate::pstrips::{DomainDef, PredRole};
use crate::sexpr::{self, Sexpr};

fn err(e: &Sexpr, msg: impl Into<String>) -> Error {
    Error::Syntax(format!("{}: {}", e.pos(), msg.into()))
}

pub fn parse_class_str(text: &str, dom: &DomainDef) -> Result<ClassExpr, Error> {
    let e = sexpr::parse_one(text).map_err(|e| Error::Syntax(e.to_string()))?;
    parse_class(&e, dom)
}

pub fn parse_class(e: &Sexpr, dom: &DomainDef) -> Result<ClassExpr, Error> {
    match e {
        Sexpr::Atom(name, _) => class_atom(name, dom),
        Sexpr::List(items, _) => match items.first().and_then(Sexpr::as_atom) {
            Some("not") => {
                if items.len() != 2 {
                    return Err(err(e, "expected `(not C)`"));
                }
                let inner = parse_class(&items[1], dom)?;
                ClassExpr::not(inner)
                    .ok_or_else(|| err(e, "negation of a negation or of an intersection"))
            }
            Some("and") => {
                if items.len() < 2 {
                    return Err(err(e, "expected `(and C C...)`"));
                }
                let mut members = Vec::new();
                for m in &items[1..] {
                    let c = parse_class(m, dom)?;
                    if !c.is_intersection_free() {
                        return Err(err(m, "nested intersection"));
                    }
                    members.push(c);
                }
                Ok(intersect(members))
            }
            _ => {
                if items.len() != 2 {
                    return Err(err(e, "expected `(R C)`"));
                }
                let r = parse_rel(&items[0], dom)?;
                let c = parse_class(&items[1], dom)?;
                ClassExpr::rel_app(r, c)
                    .ok_or_else(|| err(e, "relation applied to an intersection"))
            }
        },
    }
}

fn class_atom(name: &str, dom: &DomainDef) -> Result<ClassExpr, Error> {
    if name == "a-thing" {
        return Ok(ClassExpr::AThing);
    }
    if let Some(p) = dom.pred_by_name(name) {
        if dom.pred(p).arity == 1 {
            return Ok(ClassExpr::Primitive(p));
        }
    }
    if let Some(i) = dom.derived_by_name(name) {
        return Ok(ClassExpr::Derived(i as u16));
    }
    if let Some(p) = name.strip_prefix('c').and_then(|w| dom.pred_by_name(w)) {
        let d = dom.pred(p);
        if d.arity == 1 && d.role == PredRole::World {
            return Ok(ClassExpr::Comparison(p));
        }
    }
    Err(Error::UnknownPredicate(name.to_string()))
}

pub fn parse_rel(e: &Sexpr, dom: &DomainDef) -> Result<RelExpr, Error> {
    match e {
        Sexpr::Atom(name, _) => {
            if let Some(p) = dom.pred_by_name(name) {
                if dom.pred(p).arity == 2 {
                    return Ok(RelExpr::primitive(p));
                }
            }
            if let Some(p) = name.strip_prefix('c').and_then(|w| dom.pred_by_name(w)) {
                let d = dom.pred(p);
                if d.arity == 2 && d.role == PredRole::World {
                    return Ok(RelExpr::comparison(p));
                }
            }
            Err(Error::UnknownPredicate(name.to_string()))
        }
        Sexpr::List(items, _) => {
            let head = items.first().and_then(Sexpr::as_atom);
            if items.len() != 2 || !matches!(head, Some("inv") | Some("star")) {
                return Err(err(e, "expected `(inv R)` or `(star R)`"));
            }
            let inner = parse_rel(&items[1], dom)?;
            let out = if head == Some("inv") {
                inner.inverse()
            } else {
                inner.star()
            };
            out.ok_or_else(|| err(e, "relation uses star or inverse twice"))
        }
    }
}

fn base_name(b: RelBase, dom: &DomainDef) -> String {
    match b {
        RelBase::Primitive(p) => dom.pred(p).name.clone(),
        RelBase::Comparison(p) => format!("c{}", dom.pred(p).name),
    }
}

pub fn rel_string(r: &RelExpr, dom: &DomainDef) -> String {
    let mut s = base_name(r.base, dom);
    if r.inverse {
        s = format!("(inv {s})");
    }
    if r.star {
        s = format!("(star {s})");
    }
    s
}

pub fn class_string(c: &ClassExpr, dom: &DomainDef) -> String {
    let mut s = String::new();
    write_class(&mut s, c, dom);
    s
}

fn write_class(s: &mut String, c: &ClassExpr, dom: &DomainDef) {
    match c {
        ClassExpr::AThing => s.push_str("a-thing"),
        ClassExpr::Primitive(p) => s.push_str(&dom.pred(*p).name),
        ClassExpr::Comparison(p) => {
            s.push('c');
            s.push_str(&dom.pred(*p).name);
        }
        ClassExpr::Derived(i) => s.push_str(&dom.derived[*i as usize].name),
        ClassExpr::Not(inner) => {
            s.push_str("(not ");
            write_class(s, inner, dom);
            s.push(')');
        }
        ClassExpr::RelApp(r, inner) => {
            s.push('(');
            s.push_str(&rel_string(r, dom));
            s.push(' ');
            write_class(s, inner, dom);
            s.push(')');
        }
        ClassExpr::Intersect(members) => {
            s.push_str("(and");
            for m in members {
                s.push(' ');
                write_class(s, m, dom);
            }
            s.push(')');
        }
    }
}
