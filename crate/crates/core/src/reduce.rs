// SPDX-License-Identifier: Apache-2.0

//! The six reduction rules, closed under all contexts, and fuel-bounded
//! normalization.
//!
//! Positions are paths of child indices: push `[0].1`, pop `<x>.0`, join
//! `0 ; j -> 1`, loop `0 ^ j`.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;

use crate::syntax::{freshen_binder, substitute, Term, SIZE_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleName {
    Beta,
    Select,
    Skip,
    Unroll,
    PrefixPop,
    PrefixPush,
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Redex {
    pub position: Vec<usize>,
    pub rule: RuleName,
    /// The whole term after contracting at `position`.
    pub result: Term,
}

/// Renders a position as `/0/1`, the root as `/`.
pub fn format_position(p: &[usize]) -> String {
    if p.is_empty() {
        return "/".into();
    }
    p.iter().map(|i| format!("/{i}")).collect()
}

/// The rule whose left-hand side matches `t` at the root, if any. At most
/// one rule matches any term.
pub fn root_rule(t: &Term) -> Option<RuleName> {
    match t {
        Term::Push(_, body) if matches!(**body, Term::Pop(..)) => Some(RuleName::Beta),
        Term::Join(scrutinee, j, _) => match &**scrutinee {
            Term::Jump(i) if i == j => Some(RuleName::Select),
            Term::Jump(_) => Some(RuleName::Skip),
            Term::Push(..) => Some(RuleName::PrefixPush),
            Term::Pop(..) => Some(RuleName::PrefixPop),
            _ => None,
        },
        Term::Loop(..) => Some(RuleName::Unroll),
        _ => None,
    }
}

/// Contracts a root redex. The binder of a prefix-pop step is renamed
/// first when it would capture a free variable of the handler.
pub fn contract_root(t: &Term) -> Option<(RuleName, Term)> {
    let rule = root_rule(t)?;
    let result = match (rule, t) {
        (RuleName::Beta, Term::Push(arg, body)) => {
            let Term::Pop(x, _, m) = &**body else { unreachable!() };
            substitute(arg, x, m)
        }
        (RuleName::Select, Term::Join(_, _, m)) => (**m).clone(),
        (RuleName::Skip, Term::Join(i, _, _)) => (**i).clone(),
        (RuleName::Unroll, Term::Loop(m, j)) => Term::join((**m).clone(), j.clone(), t.clone()),
        (RuleName::PrefixPush, Term::Join(scrutinee, j, m)) => {
            let Term::Push(p, n) = &**scrutinee else { unreachable!() };
            Term::Push(p.clone(), Box::new(Term::Join(n.clone(), j.clone(), m.clone())))
        }
        (RuleName::PrefixPop, Term::Join(scrutinee, j, m)) => {
            let Term::Pop(x, ann, n) = &**scrutinee else { unreachable!() };
            let (x, n) = freshen_binder(x, n, &m.free_vars());
            Term::Pop(x, ann.clone(), Box::new(Term::join(n, j.clone(), (**m).clone())))
        }
        _ => unreachable!(),
    };
    Some((rule, result))
}

/// Every redex position in `t`, outermost-leftmost first.
pub fn redex_positions(t: &Term) -> Vec<(Vec<usize>, RuleName)> {
    fn go(t: &Term, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, RuleName)>) {
        if let Some(r) = root_rule(t) {
            out.push((path.clone(), r));
        }
        for (i, c) in t.children().into_iter().enumerate() {
            path.push(i);
            go(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// Contracts the redex at `position`; `None` when there is none there.
pub fn contract_at(t: &Term, position: &[usize]) -> Option<(RuleName, Term)> {
    let (rule, r) = contract_root(t.subterm(position)?)?;
    Some((rule, t.replace_at(position, r)))
}

/// All one-step reducts, outermost-leftmost first.
pub fn reducts(t: &Term) -> Vec<Redex> {
    redex_positions(t)
        .into_iter()
        .map(|(position, _)| {
            let (rule, result) = contract_at(t, &position).expect("position holds a redex");
            Redex { position, rule, result }
        })
        .collect()
}

/// Recognises the normal-form grammar
///
/// ```text
/// N0 := <x>.N0 | N1
/// N1 := [N0].N1 | N2 | j
/// N2 := N2 ; j -> N0 | x
/// ```
pub fn is_normal(t: &Term) -> bool {
    fn n0(t: &Term) -> bool {
        match t {
            Term::Pop(_, _, b) => n0(b),
            _ => n1(t),
        }
    }
    fn n1(t: &Term) -> bool {
        match t {
            Term::Push(a, b) => n0(a) && n1(b),
            Term::Jump(_) => true,
            _ => n2(t),
        }
    }
    fn n2(t: &Term) -> bool {
        match t {
            Term::Join(a, _, b) => n2(a) && n0(b),
            Term::Var(_) => true,
            _ => false,
        }
    }
    n0(t)
}

/// One reduction step on a stack: the entry index and the redex within it.
pub fn reduce_stack(stack: &[Term]) -> Vec<(usize, Redex)> {
    stack
        .iter()
        .enumerate()
        .flat_map(|(i, t)| reducts(t).into_iter().map(move |r| (i, r)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalizeResult {
    Normal { term: Term, steps: usize },
    /// The step budget ran out.
    FuelExhausted { term: Term, steps: usize },
    /// Only unroll redexes whose budget is spent remain.
    UnrollLimit { term: Term, steps: usize },
}

impl NormalizeResult {
    pub fn term(&self) -> &Term {
        match self {
            NormalizeResult::Normal { term, .. }
            | NormalizeResult::FuelExhausted { term, .. }
            | NormalizeResult::UnrollLimit { term, .. } => term,
        }
    }

    pub fn steps(&self) -> usize {
        match self {
            NormalizeResult::Normal { steps, .. }
            | NormalizeResult::FuelExhausted { steps, .. }
            | NormalizeResult::UnrollLimit { steps, .. } => *steps,
        }
    }

    pub fn normal_form(&self) -> Option<&Term> {
        match self {
            NormalizeResult::Normal { term, .. } => Some(term),
            _ => None,
        }
    }
}

/// Outermost-leftmost normalization with at most `fuel` steps. An unroll
/// redex is taken at most `unroll_depth` times per loop, where loops are
/// identified up to alpha-equivalence; beyond that it is skipped over.
pub fn normalize(t: &Term, fuel: usize, unroll_depth: usize) -> NormalizeResult {
    normalize_traced(t, fuel, unroll_depth, |_, _, _| {})
}

/// As [`normalize`], calling `on_step(rule, position, result)` after each
/// step.
pub fn normalize_traced(
    t: &Term,
    fuel: usize,
    unroll_depth: usize,
    mut on_step: impl FnMut(RuleName, &[usize], &Term),
) -> NormalizeResult {
    let mut unrolled: HashMap<String, usize> = HashMap::new();
    let mut cur = t.clone();
    let mut steps = 0;
    loop {
        let positions = redex_positions(&cur);
        if positions.is_empty() {
            return NormalizeResult::Normal { term: cur, steps };
        }
        let mut chosen = None;
        for (pos, rule) in positions {
            if rule != RuleName::Unroll {
                chosen = Some((pos, None));
                break;
            }
            let key = cur.subterm(&pos).unwrap().alpha_key();
            if unrolled.get(&key).copied().unwrap_or(0) < unroll_depth {
                chosen = Some((pos, Some(key)));
                break;
            }
        }
        let Some((pos, key)) = chosen else {
            return NormalizeResult::UnrollLimit { term: cur, steps };
        };
        if steps >= fuel {
            return NormalizeResult::FuelExhausted { term: cur, steps };
        }
        if let Some(k) = key {
            *unrolled.entry(k).or_default() += 1;
        }
        let (rule, next) = contract_at(&cur, &pos).unwrap();
        steps += 1;
        on_step(rule, &pos, &next);
        cur = next;
        if rule == RuleName::Beta && cur.size() > SIZE_LIMIT {
            return NormalizeResult::FuelExhausted { term: cur, steps };
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Joinability {
    Joined,
    /// Both reduct sets were enumerated in full and share no term.
    Disjoint,
    Unknown,
}

/// Best-first exploration of the reducts of a term, smallest terms first;
/// fewest steps first when the rules are restricted.
struct Frontier<'r> {
    /// Only steps by these rules, when given.
    rules: Option<&'r [RuleName]>,
    seen: HashMap<String, Term>,
    /// Priority, steps from the start, insertion order, key.
    queue: BinaryHeap<Reverse<(usize, usize, usize, String)>>,
    /// Stopped at the limit with reducts left unvisited.
    truncated: bool,
}

impl<'r> Frontier<'r> {
    fn new(t: &Term, rules: Option<&'r [RuleName]>) -> Frontier<'r> {
        let key = t.alpha_key();
        let mut f = Frontier { rules, seen: HashMap::new(), queue: BinaryHeap::new(), truncated: false };
        f.queue.push(Reverse((f.priority(t, 0), 0, 0, key.clone())));
        f.seen.insert(key, t.clone());
        f
    }

    fn priority(&self, t: &Term, steps: usize) -> usize {
        if self.rules.is_some() {
            steps
        } else {
            t.size()
        }
    }

    /// Expands the first unexpanded term; returns the keys it added, or
    /// `None` once nothing is left.
    fn expand(&mut self, limit: usize) -> Option<Vec<String>> {
        let Reverse((_, steps, _, key)) = self.queue.pop()?;
        let cur = self.seen[&key].clone();
        let mut added = Vec::new();
        for r in reducts(&cur) {
            if self.rules.is_some_and(|rs| !rs.contains(&r.rule)) {
                continue;
            }
            let key = r.result.alpha_key();
            if self.seen.contains_key(&key) {
                continue;
            }
            if self.seen.len() >= limit {
                self.truncated = true;
                self.queue.clear();
                return Some(added);
            }
            let prio = self.priority(&r.result, steps + 1);
            self.queue.push(Reverse((prio, steps + 1, self.seen.len(), key.clone())));
            self.seen.insert(key.clone(), r.result);
            added.push(key);
        }
        Some(added)
    }
}

/// Terms reachable from `t`, smallest first, up to alpha-equivalence, keyed
/// by their alpha key. `complete` is set when the set is exhausted before
/// reaching `limit` terms.
pub fn reachable(t: &Term, limit: usize) -> (HashMap<String, Term>, bool) {
    let mut f = Frontier::new(t, None);
    while f.expand(limit).is_some() {}
    let complete = !f.truncated;
    (f.seen, complete)
}

/// Searches for a common reduct of `a` and `b`, visiting at most `limit`
/// terms from each. Both searches go smallest term first, in turns.
pub fn joinable_within(a: &Term, b: &Term, limit: usize) -> Joinability {
    join_search(a, b, None, limit)
}

/// As [`joinable_within`], stepping only by `rules`. Closing a peak by the
/// residuals of its two redexes takes steps of their rules, so this finds
/// such joins long before the full search does. Exhausting the restricted
/// reducts proves nothing, so the answer is never `Disjoint`.
pub fn joinable_by_rules(a: &Term, b: &Term, rules: &[RuleName], limit: usize) -> Joinability {
    match join_search(a, b, Some(rules), limit) {
        Joinability::Joined => Joinability::Joined,
        _ => Joinability::Unknown,
    }
}

fn join_search(a: &Term, b: &Term, rules: Option<&[RuleName]>, limit: usize) -> Joinability {
    let mut sides = [Frontier::new(a, rules), Frontier::new(b, rules)];
    if sides[0].seen.keys().any(|k| sides[1].seen.contains_key(k)) {
        return Joinability::Joined;
    }
    loop {
        let mut moved = false;
        for i in 0..2 {
            if let Some(added) = sides[i].expand(limit) {
                moved = true;
                if added.iter().any(|k| sides[1 - i].seen.contains_key(k)) {
                    return Joinability::Joined;
                }
            }
        }
        if !moved {
            break;
        }
    }
    if sides.iter().any(|f| f.truncated) {
        Joinability::Unknown
    } else {
        Joinability::Disjoint
    }
}
