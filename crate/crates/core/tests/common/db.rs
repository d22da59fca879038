// SPDX-License-Identifier: Apache-2.0

//! Exhaustive enumeration of closed terms up to alpha-equivalence, as
//! de Bruijn trees over the jumps `*` and `#a`, with unannotated binders.

use std::collections::HashMap;
use std::rc::Rc;

use fmc::syntax::{Jump, Term, Var};

pub const JUMPS: usize = 2;

pub fn jump(j: u8) -> Jump {
    if j == 0 {
        Jump::Skip
    } else {
        Jump::named("a")
    }
}

#[derive(Debug)]
pub enum Db {
    /// Index 0 is the innermost binder.
    Var(usize),
    Jump(u8),
    Pop(Rc<Db>),
    Push(Rc<Db>, Rc<Db>),
    Join(Rc<Db>, u8, Rc<Db>),
    Loop(Rc<Db>, u8),
}

impl Db {
    /// Binder `d` levels deep is named `x{d}`.
    pub fn to_term(&self) -> Term {
        fn go(t: &Db, depth: usize) -> Term {
            match t {
                Db::Var(i) => Term::Var(Var::new(format!("x{}", depth - 1 - i))),
                Db::Jump(j) => Term::jump(jump(*j)),
                Db::Pop(b) => Term::pop(Var::new(format!("x{depth}")), go(b, depth + 1)),
                Db::Push(a, b) => Term::push(go(a, depth), go(b, depth)),
                Db::Join(a, j, b) => Term::join(go(a, depth), jump(*j), go(b, depth)),
                Db::Loop(b, j) => Term::looped(go(b, depth), jump(*j)),
            }
        }
        go(self, 0)
    }
}

/// Terms by (size, binders in scope), built once and shared.
#[derive(Default)]
pub struct Corpus {
    memo: HashMap<(usize, usize), Rc<Vec<Rc<Db>>>>,
}

impl Corpus {
    pub fn terms(&mut self, size: usize, scope: usize) -> Rc<Vec<Rc<Db>>> {
        if let Some(v) = self.memo.get(&(size, scope)) {
            return v.clone();
        }
        let mut out = Vec::new();
        if size == 1 {
            out.extend((0..scope).map(|i| Rc::new(Db::Var(i))));
            out.extend((0..JUMPS as u8).map(|j| Rc::new(Db::Jump(j))));
        } else if size > 1 {
            for b in self.terms(size - 1, scope + 1).iter() {
                out.push(Rc::new(Db::Pop(b.clone())));
            }
            for b in self.terms(size - 1, scope).iter() {
                for j in 0..JUMPS as u8 {
                    out.push(Rc::new(Db::Loop(b.clone(), j)));
                }
            }
            for left in 1..size - 1 {
                let ls = self.terms(left, scope);
                let rs = self.terms(size - 1 - left, scope);
                for a in ls.iter() {
                    for b in rs.iter() {
                        out.push(Rc::new(Db::Push(a.clone(), b.clone())));
                        for j in 0..JUMPS as u8 {
                            out.push(Rc::new(Db::Join(a.clone(), j, b.clone())));
                        }
                    }
                }
            }
        }
        let v = Rc::new(out);
        self.memo.insert((size, scope), v.clone());
        v
    }

    /// Closed terms of size `1..=max`, smallest first.
    pub fn closed_up_to(&mut self, max: usize) -> Vec<Rc<Db>> {
        (1..=max).flat_map(|n| self.terms(n, 0).iter().cloned().collect::<Vec<_>>()).collect()
    }
}
