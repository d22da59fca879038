// SPDX-License-Identifier: Apache-2.0

//! Sanity checks on the test oracles themselves.

mod common;

use std::rc::Rc;

use common::db::{Corpus, Db};
use common::lambda::{self, Lam};
use common::oracle::{entry_output, targets, Oracle, Output, Vector};

fn skip_out() -> Output {
    entry_output(0)
}

#[test]
fn corpus_counts() {
    let mut c = Corpus::default();
    // leaves: two jumps; then pops over three leaves and loops over two
    assert_eq!(c.terms(1, 0).len(), 2);
    assert_eq!(c.terms(2, 0).len(), 3 + 2 * 2);
    let all = c.closed_up_to(4);
    assert!(all.iter().all(|t| t.to_term().is_closed()));
}

#[test]
fn lambda_counts() {
    let n: Vec<usize> = (1..=5).map(|k| lambda::terms(k, 0).len()).collect();
    // \x.x; \x\y.x, \x\y.y; three abstractions deep plus \x.x x
    assert_eq!(&n[..4], &[0, 1, 2, 4]);
    assert!(lambda::closed_up_to(5).iter().all(|t| lambda::to_lambda(t).size() <= 5));
}

#[test]
fn lambda_eval() {
    let id = Rc::new(Lam::Abs(Rc::new(Lam::Var(0))));
    let k = Rc::new(Lam::Abs(Rc::new(Lam::Abs(Rc::new(Lam::Var(1))))));
    let t = Rc::new(Lam::App(k.clone(), id.clone()));
    let v = lambda::eval(&t, &mut 10).unwrap();
    assert_eq!(*v, Lam::Abs(id.clone()));
    // (\x. x x) (\x. x x) never finishes
    let w = Rc::new(Lam::Abs(Rc::new(Lam::App(Rc::new(Lam::Var(0)), Rc::new(Lam::Var(0))))));
    assert!(lambda::eval(&Rc::new(Lam::App(w.clone(), w)), &mut 1000).is_none());
}

#[test]
fn oracle_examples() {
    let mut o = Oracle::new(2);
    let skip = Db::Jump(0);
    let a = Db::Jump(1);
    let e = Vector::EMPTY;
    assert!(o.derivable(&skip, e, &skip_out()));
    assert!(!o.derivable(&a, e, &skip_out()));
    // sum expansion
    assert!(o.derivable(&skip, e, &entry_output(2)));
    // stack expansion: the input passes through
    let one = Vector::from_slice(&[1]);
    assert!(o.derivable(&skip, one, &[Some(one), None]));
    assert!(!o.derivable(&skip, one, &[Some(e), None]));
    // <x>.x pops a skip and runs it
    let pop = Db::Pop(Rc::new(Db::Var(0)));
    assert!(o.derivable(&pop, Vector::from_slice(&[0]), &skip_out()));
    assert!(!o.derivable(&pop, Vector::from_slice(&[1]), &skip_out()));
    // * ^ * never exits, so every type fits
    let spin = Db::Loop(Rc::new(Db::Jump(0)), 0);
    assert!(o.derivable(&spin, e, &[None, Some(e)]));
    assert!(o.derivable(&spin, one, &skip_out()));
    // <x>.* ^ * pops on every round, which an input of one entry cannot feed
    let popping = Db::Loop(Rc::new(Db::Pop(Rc::new(Db::Jump(0)))), 0);
    assert!(!o.derivable(&popping, one, &skip_out()));
}

#[test]
fn ninety_six_targets() {
    let t = targets();
    assert_eq!(t.len(), 96);
    assert!(t.iter().all(|(i, o)| i.len() <= 1 && o.iter().any(Option::is_some)));
}

#[test]
fn checker_agrees_on_small_terms() {
    use common::oracle::to_value_type;
    use fmc::types::{derivable, Context, TypeErrorKind};
    let mut corpus = Corpus::default();
    let mut o = Oracle::new(2);
    let mut compared = 0;
    for t in corpus.closed_up_to(5) {
        let term = t.to_term();
        o.reset();
        for (input, out) in targets() {
            let ty = to_value_type(input, &out);
            let verdict = match derivable(&Context::new(), &term, &ty) {
                Err(e) if matches!(e.kind, TypeErrorKind::AnnotationRequired(_)) => continue,
                r => r.is_ok(),
            };
            assert_eq!(verdict, o.derivable(&t, input, &out), "{term} : {ty}");
            compared += 1;
        }
    }
    assert!(compared > 50_000, "{compared}");
}
