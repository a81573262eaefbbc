use super::*;
use crate::domains::builtin_domain;
use crate::pstrips::{parse_state, DomainDef, State};
use proptest::prelude::*;

fn bw1() -> DomainDef {
    builtin_domain("bw1").unwrap()
}

fn st(dom: &DomainDef, text: &str) -> State {
    parse_state(dom, text).unwrap()
}

fn c(dom: &DomainDef, text: &str) -> ClassExpr {
    parse_class_str(text, dom).unwrap()
}

fn names(q: &State, s: &crate::bitset::ObjSet) -> Vec<String> {
    s.iter().map(|o| q.objects().name(o).to_string()).collect()
}

#[test]
fn depth_examples() {
    let d = bw1();
    assert_eq!(depth(&c(&d, "cclear")), Ok(1));
    assert_eq!(depth(&c(&d, "((star con) con-table)")), Ok(2));
    assert_eq!(depth(&c(&d, "(gon ((star con) con-table))")), Ok(3));
    assert_eq!(depth(&c(&d, "(and clear holding)")), Err(Error::DepthOfIntersection));
}

#[test]
fn wanted_under_held_block() {
    let d = bw1();
    let q = st(&d, "(state (objects a b) (facts (holding b) (on-table a) (clear a) (gon b a)))");
    let s = eval_class(&c(&d, "((inv gon) holding)"), &q, &d).unwrap();
    assert_eq!(names(&q, &s), ["a"]);
}

#[test]
fn clear_blocks_above_blocks_to_clear() {
    let d = bw1();
    let q = st(
        &d,
        "(state (objects a b c) (facts (on-table a) (on b a) (clear b) (on-table c) (clear c) (gclear a)))",
    );
    let s = eval_class(&c(&d, "(and clear ((star on) (on gclear)))"), &q, &d).unwrap();
    assert_eq!(names(&q, &s), ["b"]);
}

#[test]
fn complement_of_everything_is_empty() {
    let d = bw1();
    let q = st(&d, "(state (objects a b) (facts (on b a)))");
    assert!(eval_class(&c(&d, "(not a-thing)"), &q, &d).unwrap().is_empty());
}

#[test]
fn relation_examples() {
    let d = bw1();
    let q = st(&d, "(state (objects a b c) (facts (on b a) (gon b a)))");
    let pairs = |r: &str| -> Vec<(String, String)> {
        let e = crate::sexpr::parse_one(r).unwrap();
        let rel = parse_rel(&e, &d).unwrap();
        let mut v: Vec<_> = eval_rel(&rel, &q, &d)
            .unwrap()
            .pairs()
            .map(|(x, y)| (q.objects().name(x).to_string(), q.objects().name(y).to_string()))
            .collect();
        v.sort();
        v
    };
    let p = |x: &str, y: &str| (x.to_string(), y.to_string());
    assert_eq!(
        pairs("(star on)"),
        [p("a", "a"), p("b", "a"), p("b", "b"), p("c", "c")]
    );
    assert_eq!(pairs("(inv on)"), [p("a", "b")]);
    assert_eq!(pairs("con"), [p("b", "a")]);
    let q2 = st(&d, "(state (objects a b c) (facts (on b a) (gon b c)))");
    let con = parse_rel(&crate::sexpr::parse_one("con").unwrap(), &d).unwrap();
    assert_eq!(eval_rel(&con, &q2, &d).unwrap().pairs().count(), 0);
}

#[test]
fn inverse_of_star_normalizes() {
    let d = bw1();
    let a = c(&d, "((inv (star on)) clear)");
    let b = c(&d, "((star (inv on)) clear)");
    assert_eq!(a, b);
    assert_eq!(class_string(&a, &d), "((star (inv on)) clear)");
    assert!(parse_class_str("((star (star on)) clear)", &d).is_err());
    assert!(parse_class_str("((inv (inv on)) clear)", &d).is_err());
    assert!(parse_class_str("(not (not clear))", &d).is_err());
    assert!(parse_class_str("(not (and clear holding))", &d).is_err());
    assert!(matches!(
        parse_class_str("frob", &d),
        Err(Error::UnknownPredicate(_))
    ));
}

#[test]
fn bw1_enumeration_counts() {
    let d = bw1();
    let space = CandidateSpace::build(&d, 3);
    let at = |k| space.depths.iter().filter(|&&x| x == k).count();
    assert_eq!(at(1), 10);
    assert_eq!(at(2), 130);
    assert_eq!(at(3), 1680);
    for (e, &k) in space.exprs.iter().zip(&space.depths) {
        assert_eq!(depth(e), Ok(k));
    }
    let mut sorted = space.exprs.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), space.len());
}

#[test]
fn enumeration_without_unary_predicates() {
    let d = crate::pstrips::parse_domain("(domain d (predicates (r 2)))").unwrap();
    assert_eq!(enumerate_intersection_free(&d, 1), vec![ClassExpr::AThing]);
}

#[test]
fn enumeration_is_deterministic() {
    let d = bw1();
    assert_eq!(enumerate_intersection_free(&d, 2), enumerate_intersection_free(&d, 2));
    let first: Vec<String> = enumerate_intersection_free(&d, 1)
        .iter()
        .map(|e| class_string(e, &d))
        .collect();
    let mut sorted = first.clone();
    sorted.sort();
    assert_eq!(first, sorted);
}

#[test]
fn conjoin_examples() {
    let d = bw1();
    let p = CandidateSpaceParams { d: 2, w: 2 };
    let clear = c(&d, "clear");
    let oc = c(&d, "(on gclear)");
    let both = conjoin(&clear, &oc, p).unwrap();
    assert_eq!(both, ClassExpr::Intersect(vec![clear.clone(), oc.clone()]));
    assert_eq!(class_string(&both, &d), "(and clear (on gclear))");
    assert_eq!(conjoin(&oc, &clear, p).unwrap(), both);
    assert!(conjoin(&clear, &clear, p).is_none());
    assert!(conjoin(&both, &c(&d, "holding"), p).is_none());
    assert_eq!(conjoin(&ClassExpr::AThing, &clear, p), Some(clear));
}

#[test]
fn surface_syntax_round_trip() {
    let d = bw1();
    for e in enumerate_intersection_free(&d, 2) {
        let s = class_string(&e, &d);
        assert_eq!(parse_class_str(&s, &d).unwrap(), e, "{s}");
    }
}

#[test]
fn derived_predicate_is_depth_one() {
    let mut d = bw1();
    let def = c(&d, "(and clear (on gclear))");
    d.add_derived("topbad", def).unwrap();
    let e = c(&d, "topbad");
    assert_eq!(depth(&e), Ok(1));
    assert!(enumerate_intersection_free(&d, 1).contains(&e));
    let q = st(
        &d,
        "(state (objects a b) (facts (on-table a) (on b a) (clear b) (gclear a)))",
    );
    assert_eq!(names(&q, &eval_class(&e, &q, &d).unwrap()), ["b"]);
}

fn random_state(n: usize, bits: &[bool]) -> (DomainDef, State) {
    let d = bw1();
    let mut facts = String::new();
    let mut k = 0;
    let mut next = || {
        k += 1;
        bits[(k - 1) % bits.len()]
    };
    let names: Vec<String> = (0..n).map(|i| format!("o{i}")).collect();
    for x in &names {
        for p in ["on-table", "clear", "holding", "gon-table", "gclear", "gholding"] {
            if next() {
                facts.push_str(&format!(" ({p} {x})"));
            }
        }
        for y in &names {
            for p in ["on", "gon"] {
                if next() && next() {
                    facts.push_str(&format!(" ({p} {x} {y})"));
                }
            }
        }
    }
    let text = format!("(state (objects {}) (facts{facts}))", names.join(" "));
    let q = parse_state(&d, &text).unwrap();
    (d, q)
}

proptest! {
    #[test]
    fn comparison_is_intersection(n in 1usize..6, bits in prop::collection::vec(any::<bool>(), 64)) {
        let (d, q) = random_state(n, &bits);
        for p in ["on-table", "clear", "holding"] {
            let cp = eval_class(&c(&d, &format!("c{p}")), &q, &d).unwrap();
            let mut both = eval_class(&c(&d, p), &q, &d).unwrap();
            both.intersect_with(&eval_class(&c(&d, &format!("g{p}")), &q, &d).unwrap());
            prop_assert_eq!(cp, both);
        }
        let rel = |s: &str| eval_rel(&parse_rel(&crate::sexpr::parse_one(s).unwrap(), &d).unwrap(), &q, &d).unwrap();
        prop_assert_eq!(rel("con"), rel("on").intersect(&rel("gon")));
    }

    #[test]
    fn star_laws(n in 1usize..6, bits in prop::collection::vec(any::<bool>(), 64), ci in 0usize..10) {
        let (d, q) = random_state(n, &bits);
        let base = enumerate_intersection_free(&d, 1)[ci].clone();
        let r = RelExpr::primitive(d.pred_by_name("on").unwrap()).star().unwrap();
        let c0 = eval_class(&base, &q, &d).unwrap();
        let once = ClassExpr::rel_app(r, base).unwrap();
        let c1 = eval_class(&once, &q, &d).unwrap();
        let c2 = eval_class(&ClassExpr::rel_app(r, once).unwrap(), &q, &d).unwrap();
        prop_assert!(c0.is_subset(&c1));
        prop_assert_eq!(c1, c2);
    }

    #[test]
    fn rel_app_is_monotone(n in 1usize..6, bits in prop::collection::vec(any::<bool>(), 64), ri in 0usize..12) {
        let (d, q) = random_state(n, &bits);
        let r = enumerate::relation_forms(&d)[ri];
        let small = c(&d, "(and clear holding)");
        let large = c(&d, "clear");
        let s_small = eval_class(&small, &q, &d).unwrap();
        let s_large = eval_class(&large, &q, &d).unwrap();
        prop_assert!(s_small.is_subset(&s_large));
        let ev = |s: &crate::bitset::ObjSet| eval_rel(&r, &q, &d).unwrap().preimage(s);
        prop_assert!(ev(&s_small).is_subset(&ev(&s_large)));
    }

    #[test]
    fn bulk_evaluation_matches_single(n in 1usize..6, bits in prop::collection::vec(any::<bool>(), 64)) {
        let (d, q) = random_state(n, &bits);
        let space = CandidateSpace::build(&d, 2);
        let all = space.eval_all(&d, &q).unwrap();
        for (e, s) in space.exprs.iter().zip(&all) {
            prop_assert_eq!(&eval_class(e, &q, &d).unwrap(), s);
        }
    }
}
