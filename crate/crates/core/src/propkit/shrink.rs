// SPDX-License-Identifier: Apache-2.0

use super::Case;
use crate::syntax::Term;

/// Rounds of greedy shrinking before giving up on further progress.
const ROUNDS: usize = 200;

fn paths(t: &Term, here: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(here.clone());
    for (i, c) in t.children().into_iter().enumerate() {
        here.push(i);
        paths(c, here, out);
        here.pop();
    }
}

/// Terms obtained by replacing one subterm with one of its children or
/// with skip, outermost first.
fn smaller(t: &Term) -> Vec<Term> {
    let mut ps = Vec::new();
    paths(t, &mut Vec::new(), &mut ps);
    let mut out = Vec::new();
    for p in ps {
        let sub = t.subterm(&p).unwrap();
        for c in sub.children() {
            out.push(t.replace_at(&p, c.clone()));
        }
        if sub.size() > 1 {
            out.push(t.replace_at(&p, Term::skip()));
        }
    }
    out
}

fn candidates(c: &Case) -> Vec<Case> {
    let mut out = Vec::new();
    for i in 0..c.stack.len() {
        let mut stack = c.stack.clone();
        stack.remove(i);
        out.push(Case { stack, ..c.clone() });
    }
    for t in smaller(&c.term) {
        out.push(Case { term: t, ..c.clone() });
    }
    for (i, entry) in c.stack.iter().enumerate() {
        for t in smaller(entry) {
            let mut stack = c.stack.clone();
            stack[i] = t;
            out.push(Case { stack, ..c.clone() });
        }
    }
    out
}

/// Greedily replaces `case` by strictly smaller cases on which `keeps`
/// still holds. `keeps` should include the property's precondition.
pub fn shrink(case: &Case, keeps: impl Fn(&Case) -> bool) -> Case {
    let mut cur = case.clone();
    for _ in 0..ROUNDS {
        let size = cur.size();
        match candidates(&cur).into_iter().find(|c| c.size() < size && keeps(c)) {
            Some(next) => cur = next,
            None => break,
        }
    }
    cur
}
