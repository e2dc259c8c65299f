use super::checks::{boolean_nnf_violation, struct_canonical_violation};
use super::*;
use crate::corpus;
use crate::gom_parser::parse_module;

fn boolean() -> Factory {
    corpus::factory("boolean").unwrap()
}

fn structs() -> Factory {
    corpus::factory("struct").unwrap()
}

fn norm(f: &Factory, text: &str) -> String {
    let n = f.build_text(text).unwrap();
    f.print(n)
}

#[test]
fn double_negation() {
    let f = boolean();
    assert_eq!(norm(&f, "not(not(True))"), "True");
    assert_eq!(norm(&f, "not(not(not(False)))"), "not(False)");
}

#[test]
fn de_morgan() {
    let f = boolean();
    assert_eq!(norm(&f, "not(and(True,False))"), "or(not(True),not(False))");
    assert_eq!(
        norm(&f, "not(or(and(True,False),not(True)))"),
        "and(or(not(True),not(False)),True)"
    );
}

#[test]
fn negated_atoms_are_raw() {
    let f = boolean();
    let n = f.build_text("not(True)").unwrap();
    assert_eq!(f.store().op_name_of(n), "not");
    assert_eq!(f.print(n), "not(True)");
}

#[test]
fn hooks_apply_to_direct_builds() {
    let f = boolean();
    let t = f.build(f.op("True").unwrap(), &[]).unwrap();
    let not = f.op("not").unwrap();
    let nt = f.build(not, &[t]).unwrap();
    assert_eq!(f.build(not, &[nt]).unwrap(), t);
}

#[test]
fn build_checks_sorts_and_arity() {
    let f = boolean();
    let t = f.build_text("True").unwrap();
    let e = f.build(f.op("and").unwrap(), &[t]).unwrap_err();
    assert!(e.is_arity_mismatch());
    let s = structs();
    let a = s.build_text("a").unwrap();
    let e = s.build(s.op("par").unwrap(), &[a]).unwrap_err();
    assert!(e.is_sort_mismatch());
}

#[test]
fn foreign_nodes_are_rejected() {
    let f = boolean();
    let g = boolean();
    let t = g.build_text("True").unwrap();
    let e = f.build(f.op("not").unwrap(), &[t]).unwrap_err();
    assert!(matches!(e, BuildError::Store(StoreError::StoreMismatch)));
}

#[test]
fn struct_units_and_singletons() {
    let f = structs();
    assert_eq!(norm(&f, "par(concPar(a))"), "a");
    assert_eq!(norm(&f, "par(concPar())"), "o");
    assert_eq!(norm(&f, "seq(concSeq(o,a,o))"), "a");
    assert_eq!(norm(&f, "cop(concCop(o,o))"), "o");
}

#[test]
fn struct_flattening() {
    let f = structs();
    assert_eq!(norm(&f, "par(concPar(a,par(concPar(b,c))))"), "par(concPar(a,b,c))");
    assert_eq!(norm(&f, "seq(concSeq(a,seq(concSeq(b,c)),d))"), "seq(concSeq(a,b,c,d))");
    // flattening only merges the same connective
    assert_eq!(
        norm(&f, "par(concPar(a,cop(concCop(b,c))))"),
        "par(concPar(a,cop(concCop(b,c))))"
    );
}

#[test]
fn struct_sorting() {
    let f = structs();
    assert_eq!(norm(&f, "par(concPar(c,a,b))"), "par(concPar(a,b,c))");
    assert_eq!(norm(&f, "cop(concCop(neg(a),d,a))"), "cop(concCop(a,d,neg(a)))");
    // seq is not commutative
    assert_eq!(norm(&f, "seq(concSeq(c,a))"), "seq(concSeq(c,a))");
}

#[test]
fn insert_and_build_variadic() {
    let f = structs();
    let cpar = f.op("concPar").unwrap();
    let [a, b, c, o] = ["a", "b", "c", "o"].map(|t| f.build_text(t).unwrap());
    let empty = f.build_variadic(cpar, &[]).unwrap();
    assert_eq!(f.print(empty), "concPar()");
    assert_eq!(f.insert(cpar, o, empty).unwrap(), empty);
    let l = f.build_variadic(cpar, &[c, a, b]).unwrap();
    assert_eq!(f.print(l), "concPar(a,b,c)");
    assert_eq!(f.build_variadic(cpar, &[b, o, c, a]).unwrap(), l);
    let bc = f.build_variadic(cpar, &[b, c]).unwrap();
    assert_eq!(f.insert(cpar, a, bc).unwrap(), l);
    assert_eq!(f.insert(cpar, c, f.build_variadic(cpar, &[a, b]).unwrap()).unwrap(), l);
    // inserting a par structure splices its elements
    let par_bc = f.build(f.op("par").unwrap(), &[bc]).unwrap();
    let single_a = f.build_variadic(cpar, &[a]).unwrap();
    assert_eq!(f.insert(cpar, par_bc, single_a).unwrap(), l);
}

#[test]
fn insert_requires_a_list() {
    let f = structs();
    let a = f.build_text("a").unwrap();
    let e = f.insert(f.op("concPar").unwrap(), a, a).unwrap_err();
    assert!(matches!(e, BuildError::NotAList { .. }));
    let e = f.insert(f.op("par").unwrap(), a, a).unwrap_err();
    assert!(matches!(e, BuildError::NotVariadic(_)));
}

#[test]
fn outputs_are_fixpoints() {
    let f = structs();
    for text in [
        "par(concPar(c,seq(concSeq(b,o,a)),cop(concCop(d,par(concPar(a))))))",
        "seq(concSeq(par(concPar(a,neg(a))),par(concPar(b,neg(b)))))",
        "cop(concCop(cop(concCop(b,a)),par(concPar(o)),c))",
    ] {
        let n = f.build_text(text).unwrap();
        assert_eq!(struct_canonical_violation(&f, n), None, "{}", f.print(n));
        let again = f.build_text(&f.print(n)).unwrap();
        assert_eq!(again, n);
    }
    let b = boolean();
    let n = b.build_text("not(and(or(True,not(False)),not(not(True))))").unwrap();
    assert_eq!(boolean_nnf_violation(&b, n), None);
    assert_eq!(b.build_text(&b.print(n)).unwrap(), n);
}

fn with_hooks(base: &str, hooks: &str) -> SignatureModule {
    parse_module(&format!("{base}\n{hooks}")).unwrap()
}

const TOY: &str = "module Toy sorts E L abstract syntax
    z -> E
    s(p:E) -> E
    f(x:E) -> E
    g(x:E,y:E) -> E
    l(E*) -> L";

#[test]
fn looping_hook_hits_the_budget() {
    let m = with_hooks(TOY, "f:make(x) { y -> f(s(y)); }");
    let f = Factory::new(&m).unwrap().with_recursion_budget(200);
    let e = f.build_text("f(z)").unwrap_err();
    assert!(matches!(
        e,
        TextBuildError::Build(BuildError::RecursionBudgetExceeded { budget: 200 })
    ));
}

#[test]
fn deep_but_finite_recursion_fits_the_default_budget() {
    let m = parse_module(corpus::NAT).unwrap();
    let f = Factory::new(&m).unwrap();
    let mut n = String::from("zero");
    for _ in 0..2000 {
        n = format!("suc({n})");
    }
    let t = f.build_text(&format!("plus({n},{n})")).unwrap();
    let mut depth = 0;
    let mut cur = t;
    while f.store().op_name_of(cur) == "suc" {
        depth += 1;
        cur = f.store().children(cur)[0];
    }
    assert_eq!(depth, 4000);
}

#[test]
fn make_before_rewrites_arguments() {
    let m = with_hooks(TOY, "g:make_before(x,y) { a, b where gt(a,b) -> (b,a); }");
    let f = Factory::new(&m).unwrap();
    // printed forms order s(z) before z
    assert_eq!(norm(&f, "g(z,s(z))"), "g(s(z),z)");
    assert_eq!(norm(&f, "g(s(z),z)"), "g(s(z),z)");
}

#[test]
fn make_after_sees_the_built_node() {
    let m = with_hooks(
        TOY,
        "f:make(x) { s(y) -> y; }
         f:make_after(x) { z -> s(z); }",
    );
    let f = Factory::new(&m).unwrap();
    // make rewrote away from f: the after hook does not run
    assert_eq!(norm(&f, "f(s(s(z)))"), "s(z)");
    // make fell through to f(z): the after hook replaces it
    assert_eq!(norm(&f, "f(z)"), "s(z)");
    assert_eq!(norm(&f, "f(f(s(z)))"), "s(z)");
}

#[test]
fn insert_hooks_of_every_kind() {
    let m = with_hooks(
        TOY,
        "l:make_before_insert(e,r) { s(x), r -> (x,r); }
         l:make_insert(e,r) { z, l(z,rest*) -> r; }
         l:make_after_insert(e,r) { f(x), l(f(y),rest*) -> raw(l(x,rest*)); }",
    );
    let f = Factory::new(&m).unwrap();
    // one successor is stripped on the way in, f(z) is unwrapped after
    assert_eq!(norm(&f, "l(s(s(z)),f(z))"), "l(s(z),z)");
    // z is not repeated at the head
    assert_eq!(norm(&f, "l(z,z,z)"), "l(z)");
    // an f at the head is unwrapped after insertion
    assert_eq!(norm(&f, "l(f(g(z,z)))"), "l(g(z,z))");
}

#[test]
fn hook_results_keep_the_operator_sort() {
    let m = with_hooks(TOY, "f:make(x) { s(y) -> y; }");
    assert!(Factory::new(&m).is_ok());
    let bad = parse_module(
        "module Bad sorts E L abstract syntax z -> E f(x:E) -> E l(E*) -> L
         f:make(x) { y -> l(y); }",
    )
    .unwrap();
    // validation rejects it statically
    assert!(Factory::new(&bad).is_err());
}

#[test]
fn invalid_modules_are_rejected() {
    let m = parse_module("module M sorts A abstract syntax f(x:B) -> A").unwrap();
    match Factory::new(&m).unwrap_err() {
        FactoryError::Invalid { report, .. } => assert_eq!(report.codes(), ["UnknownSort"]),
        other => panic!("{other}"),
    }
}

#[test]
fn translate_between_factories() {
    let hooked = boolean();
    let mut plain_module = corpus::load("boolean").unwrap();
    plain_module.hooks.clear();
    let plain = Factory::new(&plain_module).unwrap();
    let t = plain.build_text("not(not(and(True,False)))").unwrap();
    assert_eq!(plain.print(t), "not(not(and(True,False)))");
    let n = hooked.translate(&plain, t).unwrap();
    assert_eq!(hooked.print(n), "and(True,False)");
}

#[test]
fn concurrent_builds_share_nodes() {
    let f = structs();
    let texts = ["par(concPar(c,a,b))", "par(concPar(b,c,a))", "par(concPar(a,par(concPar(c,b))))"];
    let nodes: Vec<NodeRef> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..8)
            .map(|i| {
                let f = &f;
                s.spawn(move || f.build_text(texts[i % texts.len()]).unwrap())
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert!(nodes.windows(2).all(|w| w[0] == w[1]));
}
