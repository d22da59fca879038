// SPDX-License-Identifier: Apache-2.0

//! Bounded derivation search for closed de Bruijn terms, written directly
//! from the typing rules with an expansion allowed below every rule.
//!
//! Every vector entry is one of the four depth-one types over `*` and
//! `#a`, so all types stay within depth two. A goal fixes both input and
//! output; the one unknown vector, the handler input of a join, is drawn
//! from all vectors up to the bound.

use fmc::types::{ChoiceType, StackType, ValueType};
use rustc_hash::FxHashMap;

use super::db::{jump, Db, JUMPS};

/// 0 is `1 => 1.*`, 1 is `1 => 1.#a`, 2 is `1 => 1.* + 1.#a`, 3 is the
/// empty choice `1 => 0`, which only occurs inside a derivation.
pub const ENTRIES: u8 = 4;

/// Entries allowed in targets.
const TARGET_ENTRIES: u8 = 3;

/// A vector packed two bits per entry, bottom first, length in the top
/// nibble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vector(u32);

impl Vector {
    pub const EMPTY: Vector = Vector(0);
    const MAX: usize = 14;

    pub fn from_slice(xs: &[u8]) -> Vector {
        xs.iter().fold(Vector::EMPTY, |v, a| v.pushed(*a))
    }

    pub fn len(self) -> usize {
        (self.0 >> 28) as usize
    }

    fn bits(self) -> u32 {
        self.0 & 0x0fff_ffff
    }

    fn make(bits: u32, len: usize) -> Vector {
        Vector(bits | (len as u32) << 28)
    }

    pub fn get(self, i: usize) -> u8 {
        (self.bits() >> (2 * i) & 3) as u8
    }

    pub fn pushed(self, a: u8) -> Vector {
        assert!(self.len() < Vector::MAX, "vector too long");
        Vector::make(self.bits() | (a as u32) << (2 * self.len()), self.len() + 1)
    }

    pub fn split_top(self) -> Option<(u8, Vector)> {
        let n = self.len();
        (n > 0).then(|| (self.get(n - 1), self.prefix(n - 1)))
    }

    pub fn prefix(self, k: usize) -> Vector {
        Vector::make(self.bits() & ((1u32 << (2 * k)) - 1), k)
    }

    pub fn drop_prefix(self, k: usize) -> Vector {
        Vector::make(self.bits() >> (2 * k), self.len() - k)
    }

    /// `self` placed below `top`.
    pub fn under(self, top: Vector) -> Vector {
        assert!(self.len() + top.len() <= Vector::MAX, "vector too long");
        Vector::make(self.bits() | top.bits() << (2 * self.len()), self.len() + top.len())
    }

    pub fn ends_with(self, v: Vector) -> bool {
        self.len() >= v.len() && self.drop_prefix(self.len() - v.len()) == v
    }

    pub fn entries(self) -> Vec<u8> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }
}

pub type Output = [Option<Vector>; JUMPS];

fn pack(o: &Output) -> u64 {
    let half = |v: Option<Vector>| v.map_or(u32::MAX, |v| v.0) as u64;
    half(o[0]) | half(o[1]) << 32
}

pub fn entry_output(a: u8) -> Output {
    match a {
        0 => [Some(Vector::EMPTY), None],
        1 => [None, Some(Vector::EMPTY)],
        2 => [Some(Vector::EMPTY), Some(Vector::EMPTY)],
        _ => [None, None],
    }
}

fn entry_type(a: u8) -> ValueType {
    to_value_type(Vector::EMPTY, &entry_output(a))
}

pub fn to_value_type(input: Vector, output: &Output) -> ValueType {
    let stack = |v: Vector| StackType(v.entries().into_iter().map(entry_type).collect());
    let mut c = ChoiceType(Default::default());
    for (j, v) in output.iter().enumerate() {
        if let Some(v) = v {
            c = c.with(jump(j as u8), stack(*v));
        }
    }
    ValueType::new(stack(input), c)
}

/// All vectors of length at most `n`.
pub fn vectors(n: usize) -> Vec<Vector> {
    vectors_over(n, ENTRIES)
}

fn vectors_over(n: usize, entries: u8) -> Vec<Vector> {
    let mut out = vec![Vector::EMPTY];
    let mut layer = vec![Vector::EMPTY];
    for _ in 0..n {
        let next: Vec<Vector> = layer.iter().flat_map(|v| (0..entries).map(move |a| v.pushed(a))).collect();
        out.extend(next.iter().copied());
        layer = next;
    }
    out
}

pub struct Oracle {
    guesses: Vec<Vector>,
    memo: FxHashMap<(usize, Vector, Vector, u64), bool>,
}

impl Oracle {
    /// Handler inputs of a join are drawn from vectors up to `bound`.
    pub fn new(bound: usize) -> Oracle {
        Oracle { guesses: vectors(bound), memo: FxHashMap::default() }
    }

    /// Goals are keyed by node address; clear before the nodes are freed.
    pub fn reset(&mut self) {
        self.memo.clear();
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn derivable(&mut self, t: &Db, input: Vector, output: &Output) -> bool {
        self.goal(t, Vector::EMPTY, input, output)
    }

    /// `ctx ⊢ t : input => out`, the last rule possibly an expansion. The
    /// context lists binder types, innermost on top.
    fn goal(&mut self, t: &Db, ctx: Vector, input: Vector, out: &Output) -> bool {
        let key = (t as *const Db as usize, ctx, input, pack(out));
        if let Some(r) = self.memo.get(&key) {
            return *r;
        }
        let r = self.contractions(t, ctx, input, out);
        self.memo.insert(key, r);
        r
    }

    // keep a subset of the summands, strip a common bottom prefix
    fn contractions(&mut self, t: &Db, ctx: Vector, input: Vector, out: &Output) -> bool {
        for mask in 0..(1usize << JUMPS) {
            let kept = |j: usize| mask >> j & 1 == 1;
            if (0..JUMPS).any(|j| kept(j) && out[j].is_none()) {
                continue;
            }
            let mut shortest = input.len();
            for j in (0..JUMPS).filter(|j| kept(*j)) {
                shortest = shortest.min(out[j].unwrap().len());
            }
            for k in 0..=shortest {
                let r = input.prefix(k);
                if (0..JUMPS).any(|j| kept(j) && out[j].unwrap().prefix(k) != r) {
                    break;
                }
                let mut inner: Output = [None, None];
                for j in (0..JUMPS).filter(|j| kept(*j)) {
                    inner[j] = Some(out[j].unwrap().drop_prefix(k));
                }
                if self.rule(t, ctx, input.drop_prefix(k), &inner) {
                    return true;
                }
            }
        }
        false
    }

    /// The rule of the root node concludes exactly `input => out`.
    fn rule(&mut self, t: &Db, ctx: Vector, input: Vector, out: &Output) -> bool {
        match t {
            Db::Var(i) => input.len() == 0 && entry_output(ctx.get(ctx.len() - 1 - i)) == *out,
            Db::Jump(j) => {
                let mut single: Output = [None, None];
                single[*j as usize] = Some(Vector::EMPTY);
                input.len() == 0 && single == *out
            }
            Db::Pop(body) => match input.split_top() {
                Some((a, rest)) => self.goal(body, ctx.pushed(a), rest, out),
                None => false,
            },
            Db::Push(arg, body) => (0..ENTRIES).any(|a| {
                self.goal(arg, ctx, Vector::EMPTY, &entry_output(a)) && self.goal(body, ctx, input.pushed(a), out)
            }),
            Db::Join(scrutinee, j, handler) => {
                let j = *j as usize;
                (0..self.guesses.len()).any(|g| {
                    let s = self.guesses[g];
                    let mut sc = *out;
                    sc[j] = Some(s);
                    self.goal(scrutinee, ctx, input, &sc) && self.goal(handler, ctx, s, out)
                })
            }
            Db::Loop(body, j) => {
                let j = *j as usize;
                if out[j].is_some() {
                    return false;
                }
                let mut premise = *out;
                premise[j] = Some(input);
                self.goal(body, ctx, input, &premise)
            }
        }
    }
}

/// The 96 targets: input and every summand of length at most one.
pub fn targets() -> Vec<(Vector, Output)> {
    let short = vectors_over(1, TARGET_ENTRIES);
    let options: Vec<Option<Vector>> = std::iter::once(None).chain(short.iter().copied().map(Some)).collect();
    let mut out = Vec::new();
    for input in &short {
        for a in &options {
            for b in &options {
                if a.is_some() || b.is_some() {
                    out.push((*input, [*a, *b]));
                }
            }
        }
    }
    out
}
