// SPDX-License-Identifier: Apache-2.0

//! Type schemes and their unification.
//!
//! Expansion steps can be moved to the leaves of a derivation, so a term
//! whose binders are annotated has a scheme standing for every type it
//! derives. A stack expansion at a leaf shows up as a row variable at the
//! bottom of its vectors. A pushed value may also be sum expanded, so the
//! output of a value entry is an open record of summands. At term level the
//! output lists the summands the term may exit with; any other summand can
//! be added by sum expansion.

use std::collections::BTreeMap;

use super::{ChoiceType, StackType, ValueType};
use crate::syntax::Jump;

#[derive(Debug, Clone)]
pub(crate) struct Fun {
    pub input: Vct,
    pub output: Rec,
}

/// `base ++ items`, bottom to top; no base means nothing below.
#[derive(Debug, Clone)]
pub(crate) struct Vct {
    pub base: Option<u32>,
    pub items: Vec<Fun>,
}

/// Summands, plus a row variable for summands not yet known.
#[derive(Debug, Clone)]
pub(crate) struct Rec {
    pub fields: BTreeMap<Jump, Vct>,
    pub rest: Option<u32>,
}

/// The scheme of a term: input, and the summands it may exit with.
#[derive(Debug, Clone)]
pub(crate) struct Sch {
    pub input: Vct,
    pub output: BTreeMap<Jump, Vct>,
}

enum Slot {
    Row(u32),
    Rec(u32),
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Mark {
    trail: usize,
    rows: usize,
    recs: usize,
}

#[derive(Default)]
pub(crate) struct Subst {
    rows: Vec<Option<Vct>>,
    recs: Vec<Option<Rec>>,
    trail: Vec<Slot>,
}

impl Vct {
    pub fn row(r: u32) -> Vct {
        Vct { base: Some(r), items: Vec::new() }
    }
}

pub(crate) fn closed_vct(v: &StackType) -> Vct {
    Vct { base: None, items: v.0.iter().map(closed_fun).collect() }
}

pub(crate) fn closed_fun(t: &ValueType) -> Fun {
    Fun {
        input: closed_vct(&t.input),
        output: Rec { fields: t.output.0.iter().map(|(j, v)| (j.clone(), closed_vct(v))).collect(), rest: None },
    }
}

impl Subst {
    pub fn fresh_row(&mut self) -> u32 {
        self.rows.push(None);
        (self.rows.len() - 1) as u32
    }

    pub fn fresh_rec(&mut self) -> u32 {
        self.recs.push(None);
        (self.recs.len() - 1) as u32
    }

    pub fn mark(&self) -> Mark {
        Mark { trail: self.trail.len(), rows: self.rows.len(), recs: self.recs.len() }
    }

    pub fn undo(&mut self, m: Mark) {
        while self.trail.len() > m.trail {
            match self.trail.pop() {
                Some(Slot::Row(r)) => self.rows[r as usize] = None,
                Some(Slot::Rec(r)) => self.recs[r as usize] = None,
                None => {}
            }
        }
        self.rows.truncate(m.rows);
        self.recs.truncate(m.recs);
    }

    fn norm_vct(&self, v: &Vct) -> Vct {
        let mut out = v.clone();
        self.norm_in_place(&mut out);
        out
    }

    fn norm_in_place(&self, v: &mut Vct) {
        while let Some(r) = v.base {
            let Some(b) = &self.rows[r as usize] else { break };
            let mut items = b.items.clone();
            items.append(&mut v.items);
            *v = Vct { base: b.base, items };
        }
    }

    /// The row a vector ends in once bound rows are followed.
    fn last_row(&self, v: &Vct) -> Option<u32> {
        let mut base = v.base;
        while let Some(r) = base {
            match &self.rows[r as usize] {
                Some(b) => base = b.base,
                None => break,
            }
        }
        base
    }

    fn norm_rec(&self, x: &Rec) -> Rec {
        let mut out = x.clone();
        while let Some(r) = out.rest {
            let Some(b) = &self.recs[r as usize] else { break };
            for (k, v) in &b.fields {
                out.fields.insert(k.clone(), v.clone());
            }
            out.rest = b.rest;
        }
        out
    }

    fn occurs_row_vct(&self, r: u32, v: &Vct) -> bool {
        self.last_row(v) == Some(r) || self.any_item(v, &mut |f| self.occurs_row_fun(r, f))
    }

    /// Tests the items of `v` and of every bound row below it.
    fn any_item(&self, v: &Vct, p: &mut dyn FnMut(&Fun) -> bool) -> bool {
        if v.items.iter().any(&mut *p) {
            return true;
        }
        match v.base.and_then(|r| self.rows[r as usize].as_ref()) {
            Some(b) => self.any_item(b, p),
            None => false,
        }
    }

    fn occurs_row_fun(&self, r: u32, f: &Fun) -> bool {
        self.occurs_row_vct(r, &f.input) || self.norm_rec(&f.output).fields.values().any(|v| self.occurs_row_vct(r, v))
    }

    fn occurs_rec_vct(&self, r: u32, v: &Vct) -> bool {
        self.any_item(v, &mut |f| self.occurs_rec_fun(r, f))
    }

    fn occurs_rec_fun(&self, r: u32, f: &Fun) -> bool {
        let out = self.norm_rec(&f.output);
        out.rest == Some(r) || self.occurs_rec_vct(r, &f.input) || out.fields.values().any(|v| self.occurs_rec_vct(r, v))
    }

    fn bind_row(&mut self, r: u32, v: Vct) -> bool {
        if self.occurs_row_vct(r, &v) {
            return false;
        }
        self.rows[r as usize] = Some(v);
        self.trail.push(Slot::Row(r));
        true
    }

    fn bind_rec(&mut self, r: u32, x: Rec) -> bool {
        if x.fields.values().any(|v| self.occurs_rec_vct(r, v)) {
            return false;
        }
        self.recs[r as usize] = Some(x);
        self.trail.push(Slot::Rec(r));
        true
    }

    pub fn unify_fun(&mut self, a: &Fun, b: &Fun) -> bool {
        self.unify_vct(&a.input, &b.input) && self.unify_rec(&a.output, &b.output)
    }

    /// Vectors are matched from the top; the shorter side's base row takes
    /// whatever is left below on the other side.
    pub fn unify_vct(&mut self, a: &Vct, b: &Vct) -> bool {
        let mut a = self.norm_vct(a);
        let mut b = self.norm_vct(b);
        loop {
            match (a.items.pop(), b.items.pop()) {
                (Some(x), Some(y)) => {
                    if !self.unify_fun(&x, &y) {
                        return false;
                    }
                    self.norm_in_place(&mut a);
                    self.norm_in_place(&mut b);
                }
                (Some(x), None) => {
                    a.items.push(x);
                    return b.base.is_some_and(|r| self.bind_row(r, a));
                }
                (None, Some(y)) => {
                    b.items.push(y);
                    return a.base.is_some_and(|r| self.bind_row(r, b));
                }
                (None, None) => {
                    return match (a.base, b.base) {
                        (None, None) => true,
                        (Some(r), None) | (None, Some(r)) => self.bind_row(r, Vct { base: None, items: vec![] }),
                        (Some(r), Some(s)) => r == s || self.bind_row(r, Vct::row(s)),
                    };
                }
            }
        }
    }

    pub fn unify_rec(&mut self, a: &Rec, b: &Rec) -> bool {
        let a0 = self.norm_rec(a);
        let b0 = self.norm_rec(b);
        for (k, v) in &a0.fields {
            if let Some(w) = b0.fields.get(k) {
                if !self.unify_vct(v, w) {
                    return false;
                }
            }
        }
        let a = self.norm_rec(&a0);
        let b = self.norm_rec(&b0);
        if a.fields.len() != a0.fields.len() || b.fields.len() != b0.fields.len() {
            return self.unify_rec(&a, &b);
        }
        let only = |x: &Rec, y: &Rec| -> BTreeMap<Jump, Vct> {
            x.fields.iter().filter(|(k, _)| !y.fields.contains_key(*k)).map(|(k, v)| (k.clone(), v.clone())).collect()
        };
        let (only_a, only_b) = (only(&a, &b), only(&b, &a));
        match (a.rest, b.rest) {
            (None, None) => only_a.is_empty() && only_b.is_empty(),
            (None, Some(s)) => only_b.is_empty() && self.bind_rec(s, Rec { fields: only_a, rest: None }),
            (Some(r), None) => only_a.is_empty() && self.bind_rec(r, Rec { fields: only_b, rest: None }),
            (Some(r), Some(s)) if r == s => only_a.is_empty() && only_b.is_empty(),
            (Some(r), Some(s)) => {
                let t = self.fresh_rec();
                self.bind_rec(r, Rec { fields: only_b, rest: Some(t) })
                    && self.bind_rec(s, Rec { fields: only_a, rest: Some(t) })
            }
        }
    }

    /// The least instance: unbound rows are empty and open records closed.
    pub fn resolve_vct(&self, v: &Vct) -> StackType {
        StackType(self.norm_vct(v).items.iter().map(|f| self.resolve_fun(f)).collect())
    }

    pub fn resolve_fun(&self, f: &Fun) -> ValueType {
        let out = self.norm_rec(&f.output);
        ValueType::new(
            self.resolve_vct(&f.input),
            ChoiceType(out.fields.iter().map(|(j, v)| (j.clone(), self.resolve_vct(v))).collect()),
        )
    }

    pub fn resolve_sch(&self, s: &Sch) -> ValueType {
        ValueType::new(
            self.resolve_vct(&s.input),
            ChoiceType(s.output.iter().map(|(j, v)| (j.clone(), self.resolve_vct(v))).collect()),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_type;

    fn ty(s: &str) -> ValueType {
        parse_type(s).unwrap()
    }

    #[test]
    fn row_takes_the_rest_below() {
        let mut s = Subst::default();
        let r = s.fresh_row();
        let a = Vct { base: Some(r), items: vec![closed_fun(&ty("1 => 1.*"))] };
        let b = closed_vct(&StackType(vec![ty("1 => 1.#a"), ty("1 => 1.*")]));
        assert!(s.unify_vct(&a, &b));
        assert_eq!(s.resolve_vct(&a), StackType(vec![ty("1 => 1.#a"), ty("1 => 1.*")]));
    }

    #[test]
    fn open_record_gains_summands() {
        let mut s = Subst::default();
        let (r, x) = (s.fresh_row(), s.fresh_rec());
        let skip = Fun {
            input: Vct::row(r),
            output: Rec { fields: BTreeMap::from([(Jump::Skip, Vct::row(r))]), rest: Some(x) },
        };
        let m = s.mark();
        assert!(s.unify_fun(&skip, &closed_fun(&ty("1 => 1.* + 1.#a"))));
        assert_eq!(s.resolve_fun(&skip), ty("1 => 1.* + 1.#a"));
        s.undo(m);
        assert_eq!(s.resolve_fun(&skip), ty("1 => 1.*"));
        assert!(!s.unify_fun(&skip, &closed_fun(&ty("1 => 1.#a"))));
    }

    #[test]
    fn occurs_check() {
        let mut s = Subst::default();
        let r = s.fresh_row();
        let inner = Fun { input: Vct::row(r), output: Rec { fields: BTreeMap::new(), rest: None } };
        let a = Vct::row(r);
        let b = Vct { base: None, items: vec![inner] };
        assert!(!s.unify_vct(&a, &b));
    }
}
