// SPDX-License-Identifier: Apache-2.0

//! Closed pure lambda terms by exhaustive enumeration, and a reference
//! call-by-value evaluator over de Bruijn trees.

use std::rc::Rc;

use fmc::encode::LambdaTerm;

#[derive(Debug, PartialEq, Eq)]
pub enum Lam {
    /// Index 0 is the innermost binder.
    Var(usize),
    Abs(Rc<Lam>),
    App(Rc<Lam>, Rc<Lam>),
}

/// Terms of exactly `size` nodes with `scope` binders in scope.
pub fn terms(size: usize, scope: usize) -> Vec<Rc<Lam>> {
    let mut out = Vec::new();
    if size == 1 {
        out.extend((0..scope).map(|i| Rc::new(Lam::Var(i))));
    } else if size > 1 {
        for b in terms(size - 1, scope + 1) {
            out.push(Rc::new(Lam::Abs(b)));
        }
        for left in 1..size - 1 {
            let rs = terms(size - 1 - left, scope);
            for a in terms(left, scope) {
                for b in &rs {
                    out.push(Rc::new(Lam::App(a.clone(), b.clone())));
                }
            }
        }
    }
    out
}

pub fn closed_up_to(max: usize) -> Vec<Rc<Lam>> {
    (1..=max).flat_map(|n| terms(n, 0)).collect()
}

/// Binder `d` levels deep is named `x{d}`.
pub fn to_lambda(t: &Lam) -> LambdaTerm {
    fn go(t: &Lam, depth: usize) -> LambdaTerm {
        match t {
            Lam::Var(i) => LambdaTerm::var(&format!("x{}", depth - 1 - i)),
            Lam::Abs(b) => LambdaTerm::lam(&format!("x{depth}"), go(b, depth + 1)),
            Lam::App(a, b) => LambdaTerm::app(go(a, depth), go(b, depth)),
        }
    }
    go(t, 0)
}

// the value is closed, so nothing below it shifts
fn subst(t: &Rc<Lam>, depth: usize, v: &Rc<Lam>) -> Rc<Lam> {
    match &**t {
        Lam::Var(i) if *i == depth => v.clone(),
        Lam::Var(_) => t.clone(),
        Lam::Abs(b) => Rc::new(Lam::Abs(subst(b, depth + 1, v))),
        Lam::App(a, b) => Rc::new(Lam::App(subst(a, depth, v), subst(b, depth, v))),
    }
}

/// The value of a closed term, or `None` once `fuel` beta steps are spent.
pub fn eval(t: &Rc<Lam>, fuel: &mut usize) -> Option<Rc<Lam>> {
    match &**t {
        Lam::Var(_) => panic!("open term"),
        Lam::Abs(_) => Some(t.clone()),
        Lam::App(f, a) => {
            let f = eval(f, fuel)?;
            let a = eval(a, fuel)?;
            if *fuel == 0 {
                return None;
            }
            *fuel -= 1;
            match &*f {
                Lam::Abs(body) => eval(&subst(body, 0, &a), fuel),
                _ => unreachable!("closed values are abstractions"),
            }
        }
    }
}
