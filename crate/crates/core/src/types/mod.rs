// SPDX-License-Identifier: Apache-2.0

//! Types: stack vectors, jump-indexed choice types, and arrow types between
//! them. All vectors are stored bottom to top. When printed, an input vector
//! is written in pop order (top first) and output vectors bottom to top.

mod check;
mod scheme;

pub use check::{check, check_stack, derivable, check_subject_reduction, infer, Derivation, SubjectReductionReport, TypeError, TypeErrorKind};

use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::{Jump, Var};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct StackType(pub Vec<ValueType>);

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChoiceType(pub BTreeMap<Jump, StackType>);

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValueType {
    pub input: StackType,
    pub output: ChoiceType,
}

pub type Context = BTreeMap<Var, ValueType>;

impl StackType {
    pub fn empty() -> StackType {
        StackType(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn top(&self) -> Option<&ValueType> {
        self.0.last()
    }

    /// `below` placed underneath `self`.
    pub fn under(&self, below: &[ValueType]) -> StackType {
        let mut v = below.to_vec();
        v.extend(self.0.iter().cloned());
        StackType(v)
    }

    pub fn pushed(&self, ty: ValueType) -> StackType {
        let mut v = self.0.clone();
        v.push(ty);
        StackType(v)
    }

    /// If `self` ends with `suffix`, the part of `self` below it.
    pub fn strip_suffix(&self, suffix: &StackType) -> Option<&[ValueType]> {
        let n = self.0.len().checked_sub(suffix.0.len())?;
        (self.0[n..] == suffix.0[..]).then(|| &self.0[..n])
    }

    pub fn depth(&self) -> usize {
        self.0.iter().map(ValueType::depth).max().unwrap_or(0)
    }
}

impl ChoiceType {
    pub fn single(j: Jump, v: StackType) -> ChoiceType {
        ChoiceType(BTreeMap::from([(j, v)]))
    }

    pub fn get(&self, j: &Jump) -> Option<&StackType> {
        self.0.get(j)
    }

    pub fn jumps(&self) -> impl Iterator<Item = &Jump> {
        self.0.keys()
    }

    pub fn without(&self, j: &Jump) -> ChoiceType {
        let mut m = self.0.clone();
        m.remove(j);
        ChoiceType(m)
    }

    pub fn with(&self, j: Jump, v: StackType) -> ChoiceType {
        let mut m = self.0.clone();
        m.insert(j, v);
        ChoiceType(m)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl ValueType {
    pub fn new(input: StackType, output: ChoiceType) -> ValueType {
        ValueType { input, output }
    }

    /// `1 => 1.j`
    pub fn of_jump(j: Jump) -> ValueType {
        ValueType::new(StackType::empty(), ChoiceType::single(j, StackType::empty()))
    }

    /// `1 => 1.*`, the type of skip.
    pub fn unit() -> ValueType {
        ValueType::of_jump(Jump::Skip)
    }

    /// Nesting depth: 1 for types whose vectors are all empty.
    pub fn depth(&self) -> usize {
        let inner = self
            .output
            .0
            .values()
            .map(StackType::depth)
            .chain(std::iter::once(self.input.depth()))
            .max()
            .unwrap_or(0);
        1 + inner
    }

    /// Stack expansion by `below` (placed under the input and every
    /// summand).
    pub fn stack_expand(&self, below: &[ValueType]) -> ValueType {
        ValueType {
            input: self.input.under(below),
            output: ChoiceType(self.output.0.iter().map(|(j, v)| (j.clone(), v.under(below))).collect()),
        }
    }
}

/// Decides whether `b` is obtained from `a` by stack and sum expansions:
/// some vector is placed below `a`'s input and below every summand of
/// `a`, and `b` may carry further summands.
pub fn expands_to(a: &ValueType, b: &ValueType) -> bool {
    let Some(below) = b.input.strip_suffix(&a.input) else {
        return false;
    };
    a.output.0.iter().all(|(j, v)| {
        b.output
            .get(j)
            .and_then(|w| w.strip_suffix(v))
            .is_some_and(|rest| rest == below)
    })
}

fn write_vector<'a>(f: &mut fmt::Formatter<'_>, v: impl Iterator<Item = &'a ValueType>) -> fmt::Result {
    let mut first = true;
    for t in v {
        if !first {
            f.write_str(" ")?;
        }
        first = false;
        write!(f, "({t})")?;
    }
    if first {
        f.write_str("1")?;
    }
    Ok(())
}

impl fmt::Display for StackType {
    /// Bottom to top.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_vector(f, self.0.iter())
    }
}

impl fmt::Display for ChoiceType {
    /// The empty choice, which only shows up inside derivations, is `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (i, (j, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{v}.{j}")?;
        }
        Ok(())
    }
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_vector(f, self.input.0.iter().rev())?;
        write!(f, " => {}", self.output)
    }
}

impl fmt::Debug for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Debug for StackType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Debug for ChoiceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
