// SPDX-License-Identifier: Apache-2.0

//! Random terms, raw or directed by a target type, and random types.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{GenConfig, GenError};
use crate::syntax::{Jump, Term, Var};
use crate::types::{check, expands_to, ChoiceType, Context, StackType, ValueType};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    VarLeaf,
    Push,
    Pop,
    Join,
    JumpLeaf,
    Loop,
}

/// Percent weights; the loop share goes to zero in loop-free corpora.
pub const WEIGHTS: [(&str, u32); 6] =
    [("leaf", 40), ("push", 20), ("pop", 20), ("join", 12), ("jump", 4), ("loop", 4)];

const NODES: [Node; 6] = [Node::VarLeaf, Node::Push, Node::Pop, Node::Join, Node::JumpLeaf, Node::Loop];

fn weight(n: Node, loop_free: bool) -> u32 {
    match n {
        Node::Loop if loop_free => 0,
        _ => WEIGHTS[NODES.iter().position(|m| *m == n).unwrap()].1,
    }
}

fn pick<'a, T, R: Rng>(rng: &mut R, xs: &'a [T]) -> &'a T {
    &xs[rng.gen_range(0..xs.len())]
}

struct Raw<'a, R: Rng> {
    rng: &'a mut R,
    cfg: &'a GenConfig,
}

impl<R: Rng> Raw<'_, R> {
    /// A node kind that can head a term of exactly `size` nodes.
    fn node(&mut self, size: usize) -> Node {
        let allowed: Vec<Node> = NODES
            .iter()
            .copied()
            .filter(|n| match n {
                Node::VarLeaf | Node::JumpLeaf => size == 1,
                Node::Pop | Node::Loop => size >= 2,
                Node::Push | Node::Join => size >= 3,
            })
            .collect();
        let loop_free = self.cfg.loop_free;
        *allowed.choose_weighted(self.rng, |n| weight(*n, loop_free)).unwrap()
    }

    fn split(&mut self, size: usize) -> (usize, usize) {
        let left = self.rng.gen_range(1..=size - 2);
        (left, size - 1 - left)
    }

    fn term(&mut self, size: usize, bound: &mut Vec<Var>) -> Term {
        match self.node(size) {
            Node::VarLeaf if !self.cfg.closed => Term::Var(pick(self.rng, &self.cfg.vars).clone()),
            Node::VarLeaf if !bound.is_empty() => Term::Var(pick(self.rng, bound).clone()),
            Node::VarLeaf | Node::JumpLeaf => Term::Jump(pick(self.rng, &self.cfg.jumps).clone()),
            Node::Pop => {
                let x = pick(self.rng, &self.cfg.vars).clone();
                bound.push(x.clone());
                let body = self.term(size - 1, bound);
                bound.pop();
                Term::pop(x, body)
            }
            Node::Loop => {
                let body = self.term(size - 1, bound);
                Term::looped(body, pick(self.rng, &self.cfg.jumps).clone())
            }
            Node::Push => {
                let (a, b) = self.split(size);
                let arg = self.term(a, bound);
                Term::push(arg, self.term(b, bound))
            }
            Node::Join => {
                let (a, b) = self.split(size);
                let scrutinee = self.term(a, bound);
                let j = pick(self.rng, &self.cfg.jumps).clone();
                Term::join(scrutinee, j, self.term(b, bound))
            }
        }
    }
}

/// A raw term, ignoring `cfg.typed`. Its size is drawn uniformly from
/// `1..=cfg.max_size`.
pub fn gen_raw<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Term {
    let size = rng.gen_range(1..=cfg.max_size);
    Raw { rng, cfg }.term(size, &mut Vec::new())
}

/// A random value type of nesting depth at most `depth`, with at most one
/// entry per vector and at most two summands.
pub fn gen_value_type<R: Rng>(rng: &mut R, jumps: &[Jump], depth: usize) -> ValueType {
    let vector = |rng: &mut R| {
        if depth > 1 && rng.gen_bool(0.4) {
            StackType(vec![gen_value_type(rng, jumps, depth - 1)])
        } else {
            StackType::empty()
        }
    };
    let input = vector(rng);
    let mut output = ChoiceType::single(pick(rng, jumps).clone(), vector(rng));
    if rng.gen_bool(0.3) {
        let j = pick(rng, jumps).clone();
        if output.get(&j).is_none() {
            output = output.with(j, vector(rng));
        }
    }
    ValueType::new(input, output)
}

/// Size of the canonical term of type `ty`: pop every input, push a
/// canonical value for each entry of the cheapest summand, then jump.
pub fn canonical_size(ty: &ValueType) -> usize {
    let cheapest = ty
        .output
        .0
        .values()
        .map(|v| v.0.iter().map(|r| 1 + canonical_size(r)).sum::<usize>())
        .min()
        .unwrap_or(0);
    ty.input.len() + cheapest + 1
}

/// The term measured by [`canonical_size`], closed, with annotated pops.
fn canonical(ty: &ValueType, vars: &[Var]) -> Term {
    let (j, v) = ty
        .output
        .0
        .iter()
        .min_by_key(|(_, v)| v.0.iter().map(|r| canonical_size(r)).sum::<usize>())
        .expect("nonempty choice type");
    let mut t = Term::jump(j.clone());
    for r in v.0.iter().rev() {
        t = Term::push(canonical(r, vars), t);
    }
    // innermost pop takes the deepest entry
    for r in ty.input.0.iter() {
        t = Term::pop_typed(vars[0].clone(), r.clone(), t);
    }
    t
}

/// Whole-term retries when a generated term fails to check.
const RETRIES: usize = 8;

struct Typed<'a, R: Rng> {
    rng: &'a mut R,
    cfg: &'a GenConfig,
}

impl<R: Rng> Typed<'_, R> {
    fn stack(&mut self, ty: &ValueType) -> StackType {
        if self.rng.gen_bool(0.5) {
            ty.input.clone()
        } else if self.rng.gen_bool(0.5) {
            StackType::empty()
        } else {
            StackType(vec![self.value_type()])
        }
    }

    fn value_type(&mut self) -> ValueType {
        gen_value_type(self.rng, &self.cfg.jumps, 2)
    }

    /// Requires `budget >= canonical_size(ty)` and keeps that invariant for
    /// every subterm, so it never fails.
    fn term(&mut self, ctx: &Context, ty: &ValueType, budget: usize) -> Term {
        let loop_free = self.cfg.loop_free;
        let mut order: Vec<Node> = NODES.iter().copied().filter(|n| weight(*n, loop_free) > 0).collect();
        while !order.is_empty() {
            let &n = order.choose_weighted(self.rng, |n| weight(*n, loop_free)).unwrap();
            order.retain(|m| *m != n);
            if let Some(t) = self.attempt(n, ctx, ty, budget) {
                return t;
            }
        }
        canonical(ty, &self.cfg.vars)
    }

    fn split(&mut self, budget: usize, left_min: usize, right_min: usize) -> Option<(usize, usize)> {
        let room = budget.checked_sub(1 + left_min + right_min)?;
        let extra = self.rng.gen_range(0..=room);
        Some((left_min + extra, budget - 1 - left_min - extra))
    }

    fn attempt(&mut self, node: Node, ctx: &Context, ty: &ValueType, budget: usize) -> Option<Term> {
        match node {
            Node::VarLeaf => {
                let fits: Vec<&Var> = ctx.iter().filter(|(_, t)| expands_to(t, ty)).map(|(x, _)| x).collect();
                (!fits.is_empty()).then(|| Term::Var((*pick(self.rng, &fits)).clone()))
            }
            Node::JumpLeaf => {
                let fits: Vec<&Jump> = ty.output.0.iter().filter(|(_, v)| **v == ty.input).map(|(j, _)| j).collect();
                (!fits.is_empty()).then(|| Term::Jump((*pick(self.rng, &fits)).clone()))
            }
            Node::Pop => {
                let top = ty.input.top()?.clone();
                let x = pick(self.rng, &self.cfg.vars).clone();
                let rest = StackType(ty.input.0[..ty.input.len() - 1].to_vec());
                let mut inner = ctx.clone();
                inner.insert(x.clone(), top.clone());
                let body = self.term(&inner, &ValueType::new(rest, ty.output.clone()), budget - 1);
                Some(Term::pop_typed(x, top, body))
            }
            Node::Push => {
                // an entry some summand wants on top is a likelier fit
                let wanted: Vec<&ValueType> = ty.output.0.values().filter_map(|v| v.top()).collect();
                let r = if !wanted.is_empty() && self.rng.gen_bool(0.5) {
                    (*pick(self.rng, &wanted)).clone()
                } else {
                    self.value_type()
                };
                let body_ty = ValueType::new(ty.input.pushed(r.clone()), ty.output.clone());
                let (a, b) = self.split(budget, canonical_size(&r), canonical_size(&body_ty))?;
                let body = self.term(ctx, &body_ty, b);
                let arg = self.term(ctx, &r, a);
                Some(Term::push(arg, body))
            }
            Node::Join => {
                let j = pick(self.rng, &self.cfg.jumps).clone();
                let s = self.stack(ty);
                let m_ty = ValueType::new(ty.input.clone(), ty.output.without(&j).with(j.clone(), s.clone()));
                let n_ty = ValueType::new(s, ty.output.clone());
                let (a, b) = self.split(budget, canonical_size(&m_ty), canonical_size(&n_ty))?;
                let m = self.term(ctx, &m_ty, a);
                let n = self.term(ctx, &n_ty, b);
                Some(Term::join(m, j, n))
            }
            Node::Loop => {
                let j = pick(self.rng, &self.cfg.jumps).clone();
                if ty.output.without(&j).is_empty() {
                    return None;
                }
                let body_ty = ValueType::new(ty.input.clone(), ty.output.without(&j).with(j.clone(), ty.input.clone()));
                if budget < 1 + canonical_size(&body_ty) {
                    return None;
                }
                let body = self.term(ctx, &body_ty, budget - 1);
                Some(Term::looped(body, j))
            }
        }
    }
}

#[doc(hidden)]
pub fn gen_typed_once(rng: &mut ChaCha8Rng, cfg: &GenConfig, ctx: &Context, ty: &ValueType) -> Term {
    Typed { rng, cfg }.term(ctx, ty, cfg.max_size)
}

/// A term checking at `ty` under `ctx`, built by inverting the typing
/// rules. Every pop carries its type annotation.
pub fn gen_typed(rng: &mut ChaCha8Rng, cfg: &GenConfig, ctx: &Context, ty: &ValueType) -> Result<Term, GenError> {
    if cfg.max_size < canonical_size(ty) {
        return Err(GenError::GenerationExhausted(ty.clone()));
    }
    for _ in 0..RETRIES {
        let t = Typed { rng: &mut *rng, cfg }.term(ctx, ty, cfg.max_size);
        if check(ctx, &t, ty).is_ok() {
            return Ok(t);
        }
    }
    Err(GenError::GenerationExhausted(ty.clone()))
}
