// SPDX-License-Identifier: Apache-2.0

//! Terms of the calculus: variables, push and pop actions, jumps, joins and
//! loops, together with free variables, capture-avoiding substitution and
//! alpha-equivalence.

mod parse;
mod print;

pub use parse::{parse_term, parse_type, ParseError};
pub(crate) use parse::{Parser, Tok};

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::types::ValueType;

/// A term variable. Lexically `[a-z][A-Za-z0-9_]*`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: impl Into<String>) -> Var {
        Var(name.into().into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_valid_name(name: &str) -> bool {
        let mut chars = name.chars();
        matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A jump: either the distinguished skip `*` or a named jump `#name`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Jump {
    Skip,
    Named(Arc<str>),
}

impl Jump {
    /// Builds a named jump; the name is given without the leading `#`.
    pub fn named(name: impl Into<String>) -> Jump {
        Jump::Named(name.into().into())
    }

    pub fn is_skip(&self) -> bool {
        matches!(self, Jump::Skip)
    }
}

impl fmt::Debug for Jump {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Jump {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Jump::Skip => f.write_str("*"),
            Jump::Named(n) => write!(f, "#{n}"),
        }
    }
}

/// Terms past this many nodes count as exhausting fuel: substitution can
/// double a term at every step.
pub const SIZE_LIMIT: usize = 1 << 16;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    /// `[arg].body`
    Push(Box<Term>, Box<Term>),
    /// `<x>.body`, optionally `<x : T>.body`
    Pop(Var, Option<ValueType>, Box<Term>),
    Jump(Jump),
    /// `scrutinee ; j -> handler`
    Join(Box<Term>, Jump, Box<Term>),
    /// `body ^ j`
    Loop(Box<Term>, Jump),
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// Smart constructors.
impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::new(name))
    }

    pub fn skip() -> Term {
        Term::Jump(Jump::Skip)
    }

    pub fn jump(j: Jump) -> Term {
        Term::Jump(j)
    }

    pub fn push(arg: Term, body: Term) -> Term {
        Term::Push(Box::new(arg), Box::new(body))
    }

    pub fn pop(x: Var, body: Term) -> Term {
        Term::Pop(x, None, Box::new(body))
    }

    pub fn pop_typed(x: Var, ty: ValueType, body: Term) -> Term {
        Term::Pop(x, Some(ty), Box::new(body))
    }

    pub fn join(scrutinee: Term, j: Jump, handler: Term) -> Term {
        Term::Join(Box::new(scrutinee), j, Box::new(handler))
    }

    /// `first ; second`, sugar for a join on skip.
    pub fn seq(first: Term, second: Term) -> Term {
        Term::join(first, Jump::Skip, second)
    }

    pub fn looped(body: Term, j: Jump) -> Term {
        Term::Loop(Box::new(body), j)
    }
}

impl Term {
    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Jump(_) => 1,
            Term::Pop(_, _, b) | Term::Loop(b, _) => 1 + b.size(),
            Term::Push(a, b) | Term::Join(a, _, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn contains_loop(&self) -> bool {
        match self {
            Term::Var(_) | Term::Jump(_) => false,
            Term::Loop(..) => true,
            Term::Pop(_, _, b) => b.contains_loop(),
            Term::Push(a, b) | Term::Join(a, _, b) => a.contains_loop() || b.contains_loop(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        collect_free(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn has_free(&self, x: &Var) -> bool {
        match self {
            Term::Var(y) => y == x,
            Term::Jump(_) => false,
            Term::Pop(y, _, b) => y != x && b.has_free(x),
            Term::Loop(b, _) => b.has_free(x),
            Term::Push(a, b) | Term::Join(a, _, b) => a.has_free(x) || b.has_free(x),
        }
    }

    /// Immediate subterms in position order.
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Var(_) | Term::Jump(_) => vec![],
            Term::Pop(_, _, b) | Term::Loop(b, _) => vec![b],
            Term::Push(a, b) | Term::Join(a, _, b) => vec![a, b],
        }
    }

    pub fn subterm(&self, path: &[usize]) -> Option<&Term> {
        let Some((&i, rest)) = path.split_first() else {
            return Some(self);
        };
        self.children().get(i).and_then(|c| c.subterm(rest))
    }

    /// Replaces the subterm at `path`, returning the rebuilt term.
    pub fn replace_at(&self, path: &[usize], with: Term) -> Term {
        let Some((&i, rest)) = path.split_first() else {
            return with;
        };
        match (self, i) {
            (Term::Push(a, b), 0) => Term::Push(Box::new(a.replace_at(rest, with)), b.clone()),
            (Term::Push(a, b), 1) => Term::Push(a.clone(), Box::new(b.replace_at(rest, with))),
            (Term::Pop(x, t, b), 0) => Term::Pop(x.clone(), t.clone(), Box::new(b.replace_at(rest, with))),
            (Term::Join(a, j, b), 0) => {
                Term::Join(Box::new(a.replace_at(rest, with)), j.clone(), b.clone())
            }
            (Term::Join(a, j, b), 1) => {
                Term::Join(a.clone(), j.clone(), Box::new(b.replace_at(rest, with)))
            }
            (Term::Loop(b, j), 0) => Term::Loop(Box::new(b.replace_at(rest, with)), j.clone()),
            _ => panic!("invalid path index {i} into {self}"),
        }
    }

    /// A string that is equal for two terms exactly when they are
    /// alpha-equivalent. Bound variables are printed as de Bruijn indices.
    pub fn alpha_key(&self) -> String {
        let mut out = String::new();
        write_key(self, &mut Vec::new(), &mut out);
        out
    }
}

fn collect_free<'a>(t: &'a Term, bound: &mut Vec<&'a Var>, out: &mut BTreeSet<Var>) {
    match t {
        Term::Var(x) => {
            if !bound.contains(&x) {
                out.insert(x.clone());
            }
        }
        Term::Jump(_) => {}
        Term::Pop(x, _, b) => {
            bound.push(x);
            collect_free(b, bound, out);
            bound.pop();
        }
        Term::Loop(b, _) => collect_free(b, bound, out),
        Term::Push(a, b) | Term::Join(a, _, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
    }
}

fn write_key<'a>(t: &'a Term, bound: &mut Vec<&'a Var>, out: &mut String) {
    use std::fmt::Write;
    match t {
        Term::Var(x) => match bound.iter().rev().position(|b| *b == x) {
            Some(i) => write!(out, "%{i}").unwrap(),
            None => write!(out, "{x}").unwrap(),
        },
        Term::Jump(j) => write!(out, "{j}").unwrap(),
        Term::Push(a, b) => {
            out.push('[');
            write_key(a, bound, out);
            out.push_str("].");
            write_key(b, bound, out);
        }
        Term::Pop(x, ann, b) => {
            match ann {
                Some(ty) => write!(out, "<:{ty}>.").unwrap(),
                None => out.push_str("<>."),
            }
            bound.push(x);
            write_key(b, bound, out);
            bound.pop();
        }
        Term::Join(a, j, b) => {
            out.push('(');
            write_key(a, bound, out);
            write!(out, ";{j}->").unwrap();
            write_key(b, bound, out);
            out.push(')');
        }
        Term::Loop(b, j) => {
            out.push('(');
            write_key(b, bound, out);
            write!(out, ")^{j}").unwrap();
        }
    }
}

/// True iff `a` and `b` differ only in the names of bound variables.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    fn go<'a>(a: &'a Term, b: &'a Term, env: &mut Vec<(&'a Var, &'a Var)>) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                let ix = env.iter().rev().position(|(l, _)| *l == x);
                let iy = env.iter().rev().position(|(_, r)| *r == y);
                match (ix, iy) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Term::Jump(i), Term::Jump(j)) => i == j,
            (Term::Push(a1, b1), Term::Push(a2, b2)) => go(a1, a2, env) && go(b1, b2, env),
            (Term::Pop(x, t1, b1), Term::Pop(y, t2, b2)) => {
                if t1 != t2 {
                    return false;
                }
                env.push((x, y));
                let r = go(b1, b2, env);
                env.pop();
                r
            }
            (Term::Join(a1, i, b1), Term::Join(a2, j, b2)) => {
                i == j && go(a1, a2, env) && go(b1, b2, env)
            }
            (Term::Loop(b1, i), Term::Loop(b2, j)) => i == j && go(b1, b2, env),
            _ => false,
        }
    }
    go(a, b, &mut Vec::new())
}

/// Entrywise alpha-equivalence of two stacks.
pub fn alpha_eq_all(a: &[Term], b: &[Term]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| alpha_eq(x, y))
}

/// A variable named after `base` that does not occur in `avoid`. The
/// choice depends only on its arguments: trailing digits of `base` are
/// stripped and the smallest numeric suffix not in `avoid` is appended.
pub fn fresh_var(base: &Var, avoid: &BTreeSet<Var>) -> Var {
    let stem = base.as_str().trim_end_matches(|c: char| c.is_ascii_digit());
    (1..)
        .map(|n| Var::new(format!("{stem}{n}")))
        .find(|v| !avoid.contains(v))
        .unwrap()
}

/// Capture-avoiding substitution of `replacement` for `x` in `target`.
pub fn substitute(replacement: &Term, x: &Var, target: &Term) -> Term {
    let fv = replacement.free_vars();
    subst(replacement, &fv, x, target)
}

fn subst(n: &Term, fv_n: &BTreeSet<Var>, x: &Var, m: &Term) -> Term {
    match m {
        Term::Var(y) if y == x => n.clone(),
        Term::Var(_) | Term::Jump(_) => m.clone(),
        Term::Push(a, b) => Term::push(subst(n, fv_n, x, a), subst(n, fv_n, x, b)),
        Term::Join(a, j, b) => Term::join(subst(n, fv_n, x, a), j.clone(), subst(n, fv_n, x, b)),
        Term::Loop(b, j) => Term::looped(subst(n, fv_n, x, b), j.clone()),
        Term::Pop(y, ann, b) => {
            if y == x || !b.has_free(x) {
                return m.clone();
            }
            if fv_n.contains(y) {
                let mut avoid = fv_n.clone();
                avoid.extend(b.free_vars());
                avoid.insert(x.clone());
                let z = fresh_var(y, &avoid);
                let renamed = rename(b, y, &z);
                Term::Pop(z, ann.clone(), Box::new(subst(n, fv_n, x, &renamed)))
            } else {
                Term::Pop(y.clone(), ann.clone(), Box::new(subst(n, fv_n, x, b)))
            }
        }
    }
}

/// Renames free occurrences of `from` to `to`; inner binders named `to`
/// are renamed out of the way.
fn rename(t: &Term, from: &Var, to: &Var) -> Term {
    let to = Term::Var(to.clone());
    subst(&to, &to.free_vars(), from, t)
}

/// Alpha-renames the binder of a pop so that it avoids `avoid`, returning
/// the new binder and body. Unchanged when there is no clash.
pub(crate) fn freshen_binder(x: &Var, body: &Term, avoid: &BTreeSet<Var>) -> (Var, Term) {
    if !avoid.contains(x) {
        return (x.clone(), body.clone());
    }
    let mut all = avoid.clone();
    all.extend(body.free_vars());
    all.insert(x.clone());
    let z = fresh_var(x, &all);
    let b = rename(body, x, &z);
    (z, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn vars(names: &[&str]) -> BTreeSet<Var> {
        names.iter().map(|n| Var::new(*n)).collect()
    }

    #[test]
    fn free_variables() {
        assert_eq!(p("x").free_vars(), vars(&["x"]));
        assert_eq!(p("<x>.x").free_vars(), vars(&[]));
        assert_eq!(p("[y].(<x>.x) ; #e -> z").free_vars(), vars(&["y", "z"]));
    }

    #[test]
    fn substitution_base_cases() {
        let n = p("[a].#k");
        assert_eq!(substitute(&n, &Var::new("x"), &p("x")), n);
        assert_eq!(substitute(&n, &Var::new("x"), &p("y")), p("y"));
    }

    #[test]
    fn substitution_renames_capturing_binder() {
        let got = substitute(&p("y"), &Var::new("x"), &p("<y>.[x].y"));
        assert!(alpha_eq(&got, &p("<z>.[y].z")), "{got}");
        assert_eq!(got.to_string(), "<y1>.[y].y1");
    }

    #[test]
    fn substitution_stops_at_shadowing_binder() {
        let t = p("<x>.x");
        assert_eq!(substitute(&p("*"), &Var::new("x"), &t), t);
    }

    #[test]
    fn alpha_equivalence() {
        assert!(alpha_eq(&p("<x>.x"), &p("<y>.y")));
        assert!(!alpha_eq(&p("x"), &p("y")));
        assert!(alpha_eq(&p("<x>.(x ; #j -> <x>.x)"), &p("<a>.(a ; #j -> <b>.b)")));
        assert!(!alpha_eq(&p("<x>.<y>.x"), &p("<x>.<y>.y")));
        assert!(!alpha_eq(&p("<x>.y"), &p("<y>.y")));
        assert!(!alpha_eq(&p("<x : 1 => 1.*>.x"), &p("<x>.x")));
    }

    #[test]
    fn alpha_key_matches_alpha_eq() {
        let a = p("<x>.(x ; #j -> <x>.[y].x)");
        let b = p("<q>.(q ; #j -> <r>.[y].r)");
        let c = p("<q>.(q ; #j -> <r>.[y].q)");
        assert_eq!(a.alpha_key(), b.alpha_key());
        assert_ne!(a.alpha_key(), c.alpha_key());
    }

    #[test]
    fn renaming_avoids_inner_binders() {
        let (z, b) = freshen_binder(&Var::new("y"), &p("(<y1>.y) ; y1"), &vars(&["y"]));
        assert_eq!(z, Var::new("y2"));
        assert!(alpha_eq(&Term::pop(z, b), &p("<y>.(<q>.y) ; y1")));
    }

    #[test]
    fn fresh_names_are_deterministic() {
        let avoid = vars(&["y", "y1", "y2"]);
        assert_eq!(fresh_var(&Var::new("y"), &avoid), Var::new("y3"));
        assert_eq!(fresh_var(&Var::new("y2"), &avoid), Var::new("y3"));
    }

    #[test]
    fn paths() {
        let t = p("[a].(b ; #j -> c)");
        assert_eq!(t.subterm(&[1, 1]), Some(&p("c")));
        assert_eq!(t.replace_at(&[1, 0], p("*")), p("[a].(* ; #j -> c)"));
        assert_eq!(t.subterm(&[2]), None);
    }
}
