// SPDX-License-Identifier: Apache-2.0

//! The abstract machine over (argument stack, term, continuation stack),
//! the big-step evaluation relation, and checks relating them to each other
//! and to reduction.

use std::fmt;

use rand::Rng;

use crate::reduce::{joinable_within, normalize, reduce_stack, reducts, Joinability};
use crate::syntax::{alpha_eq, alpha_eq_all, substitute, Jump, Term, SIZE_LIMIT};

/// A conditional continuation `j -> term`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContEntry {
    pub jump: Jump,
    pub continuation: Term,
}

/// Both stacks are stored bottom to top, so the top is the last entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineState {
    pub args: Vec<Term>,
    pub term: Term,
    pub conts: Vec<ContEntry>,
}

impl MachineState {
    /// `(ε, t, ε)`
    pub fn initial(term: Term) -> MachineState {
        MachineState { args: vec![], term, conts: vec![] }
    }

    pub fn with_args(args: Vec<Term>, term: Term) -> MachineState {
        MachineState { args, term, conts: vec![] }
    }
}

/// `⟨args⟩ ⊢ term ⊢ ⟨conts⟩`, both stacks bottom to top, left to right.
impl fmt::Display for MachineState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.args.iter().map(|t| t.to_string()).collect();
        let conts: Vec<String> =
            self.conts.iter().map(|c| format!("{} -> {}", c.jump, c.continuation)).collect();
        write!(f, "⟨{}⟩ ⊢ {} ⊢ ⟨{}⟩", args.join(", "), self.term, conts.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StuckReason {
    FreeVariable,
    EmptyStack,
}

impl fmt::Display for StuckReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StuckReason::FreeVariable => f.write_str("variable at head position"),
            StuckReason::EmptyStack => f.write_str("pop on an empty argument stack"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Complete { args: Vec<Term>, jump: Jump },
    Stuck { state: MachineState, reason: StuckReason },
    OutOfFuel { state: MachineState },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub outcome: Outcome,
    pub steps: usize,
    /// Every state visited, initial state first, when requested.
    pub trace: Option<Vec<MachineState>>,
}

impl RunResult {
    pub fn completed(&self) -> Option<(&[Term], &Jump)> {
        match &self.outcome {
            Outcome::Complete { args, jump } => Some((args, jump)),
            _ => None,
        }
    }
}

enum Halt {
    Complete,
    Stuck(StuckReason),
}

fn step_in_place(s: &mut MachineState) -> Result<(), Halt> {
    let term = std::mem::replace(&mut s.term, Term::skip());
    let next = match term {
        Term::Push(arg, body) => {
            s.args.push(*arg);
            *body
        }
        Term::Pop(x, ann, body) => match s.args.pop() {
            Some(n) => substitute(&n, &x, &body),
            None => {
                s.term = Term::Pop(x, ann, body);
                return Err(Halt::Stuck(StuckReason::EmptyStack));
            }
        },
        Term::Join(scrutinee, jump, handler) => {
            s.conts.push(ContEntry { jump, continuation: *handler });
            *scrutinee
        }
        Term::Loop(body, jump) => {
            let again = Term::Loop(body.clone(), jump.clone());
            s.conts.push(ContEntry { jump, continuation: again });
            *body
        }
        Term::Jump(j) => match s.conts.pop() {
            Some(c) if c.jump == j => c.continuation,
            Some(_) => Term::Jump(j),
            None => {
                s.term = Term::Jump(j);
                return Err(Halt::Complete);
            }
        },
        Term::Var(x) => {
            s.term = Term::Var(x);
            return Err(Halt::Stuck(StuckReason::FreeVariable));
        }
    };
    s.term = next;
    Ok(())
}

/// The unique transition from `s`, if any.
pub fn step(s: &MachineState) -> Option<MachineState> {
    let mut next = s.clone();
    step_in_place(&mut next).ok().map(|_| next)
}

/// Steps from `s` until the machine halts or `fuel` steps have been taken.
pub fn run(s: MachineState, fuel: usize, trace: bool) -> RunResult {
    let mut state = s;
    let mut visited = trace.then(|| vec![state.clone()]);
    let mut steps = 0;
    loop {
        if steps >= fuel {
            // a halted state is reported as such even on the last unit of fuel
            if let Some(halt) = halted(&state) {
                return finish(state, halt, steps, visited);
            }
            return RunResult { outcome: Outcome::OutOfFuel { state }, steps, trace: visited };
        }
        let substitutes = matches!(state.term, Term::Pop(..));
        match step_in_place(&mut state) {
            Ok(()) if substitutes && state.term.size() > SIZE_LIMIT => {
                steps += 1;
                return RunResult { outcome: Outcome::OutOfFuel { state }, steps, trace: visited };
            }
            Ok(()) => {
                steps += 1;
                if let Some(v) = visited.as_mut() {
                    v.push(state.clone());
                }
            }
            Err(halt) => return finish(state, halt, steps, visited),
        }
    }
}

fn halted(s: &MachineState) -> Option<Halt> {
    match &s.term {
        Term::Var(_) => Some(Halt::Stuck(StuckReason::FreeVariable)),
        Term::Pop(..) if s.args.is_empty() => Some(Halt::Stuck(StuckReason::EmptyStack)),
        Term::Jump(_) if s.conts.is_empty() => Some(Halt::Complete),
        _ => None,
    }
}

fn finish(state: MachineState, halt: Halt, steps: usize, trace: Option<Vec<MachineState>>) -> RunResult {
    let outcome = match halt {
        Halt::Complete => {
            let Term::Jump(jump) = state.term else { unreachable!() };
            Outcome::Complete { args: state.args, jump }
        }
        Halt::Stuck(reason) => Outcome::Stuck { state, reason },
    };
    RunResult { outcome, steps, trace }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BigStep {
    Done { args: Vec<Term>, jump: Jump },
    /// No derivation exists: a free variable or a pop on an empty stack.
    Undefined,
    /// The rule budget ran out before a derivation was found.
    OutOfFuel,
}

impl BigStep {
    pub fn done(&self) -> Option<(&[Term], &Jump)> {
        match self {
            BigStep::Done { args, jump } => Some((args, jump)),
            _ => None,
        }
    }
}

/// The evaluation relation `S, t ⇓ T, j`, by recursion on its inference
/// rules. Each rule application costs one unit of fuel.
pub fn eval_big(args: Vec<Term>, t: &Term, fuel: usize) -> BigStep {
    let mut budget = fuel;
    match eval_rec(args, t.clone(), &mut budget) {
        Ok((args, jump)) => BigStep::Done { args, jump },
        Err(e) => e,
    }
}

fn eval_rec(mut stack: Vec<Term>, mut t: Term, fuel: &mut usize) -> Result<(Vec<Term>, Jump), BigStep> {
    loop {
        if *fuel == 0 {
            return Err(BigStep::OutOfFuel);
        }
        *fuel -= 1;
        t = match t {
            Term::Jump(j) => return Ok((stack, j)),
            Term::Var(_) => return Err(BigStep::Undefined),
            Term::Push(n, m) => {
                stack.push(*n);
                *m
            }
            Term::Pop(x, _, m) => {
                let n = stack.pop().ok_or(BigStep::Undefined)?;
                let r = substitute(&n, &x, &m);
                if r.size() > SIZE_LIMIT {
                    return Err(BigStep::OutOfFuel);
                }
                r
            }
            Term::Join(m, i, n) => {
                let (r, k) = eval_rec(stack, *m, fuel)?;
                if k != i {
                    return Ok((r, k));
                }
                stack = r;
                *n
            }
            Term::Loop(m, i) => {
                let (r, k) = eval_rec(stack, (*m).clone(), fuel)?;
                if k != i {
                    return Ok((r, k));
                }
                stack = r;
                Term::Loop(m, i)
            }
        };
    }
}

/// Retry factor applied to a budget before a one-sided result is believed.
const RETRY_FACTOR: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Agreement {
    Agree { args: Vec<Term>, jump: Jump },
    NeitherCompletes,
    /// One side completed and the other still ran out of fuel after a retry
    /// with a larger budget.
    Inconclusive(String),
    Disagree(String),
}

/// Runs both semantics from `(ε, t, ε)` and compares the results.
pub fn check_agreement(t: &Term, fuel: usize) -> Agreement {
    check_agreement_on(vec![], t, fuel)
}

pub fn check_agreement_on(args: Vec<Term>, t: &Term, fuel: usize) -> Agreement {
    let small = |f| run(MachineState::with_args(args.clone(), t.clone()), f, false).outcome;
    let big = |f| eval_big(args.clone(), t, f);
    let mut s = small(fuel);
    let mut b = big(fuel);
    if matches!(s, Outcome::Complete { .. }) && b == BigStep::OutOfFuel {
        b = big(fuel * RETRY_FACTOR);
    }
    if b.done().is_some() && matches!(s, Outcome::OutOfFuel { .. }) {
        s = small(fuel * RETRY_FACTOR);
    }
    match (s, b) {
        (Outcome::Complete { args: sa, jump: sj }, BigStep::Done { args: ba, jump: bj }) => {
            if sj == bj && alpha_eq_all(&sa, &ba) {
                Agreement::Agree { args: sa, jump: sj }
            } else {
                Agreement::Disagree(format!(
                    "machine completes with {} on [{}], evaluation with {} on [{}]",
                    sj,
                    join(&sa),
                    bj,
                    join(&ba)
                ))
            }
        }
        (Outcome::Complete { jump, .. }, BigStep::OutOfFuel) => {
            Agreement::Inconclusive(format!("machine completes with {jump}, evaluation out of fuel"))
        }
        (Outcome::Complete { jump, .. }, BigStep::Undefined) => {
            Agreement::Disagree(format!("machine completes with {jump}, evaluation undefined"))
        }
        (Outcome::OutOfFuel { .. }, BigStep::Done { jump, .. }) => {
            Agreement::Inconclusive(format!("evaluation completes with {jump}, machine out of fuel"))
        }
        (Outcome::Stuck { reason, .. }, BigStep::Done { jump, .. }) => {
            Agreement::Disagree(format!("evaluation completes with {jump}, machine stuck: {reason}"))
        }
        _ => Agreement::NeitherCompletes,
    }
}

fn join(ts: &[Term]) -> String {
    ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Commutation {
    /// Both pairs evaluate with the same jump to stacks with a common
    /// reduct.
    Holds,
    /// The original pair does not evaluate, so nothing is claimed.
    Vacuous,
    Inconclusive(String),
    Violation(String),
}

/// Steps and unroll budget used to join result stacks.
const JOIN_FUEL: usize = 200;
const JOIN_UNROLL: usize = 2;
const JOIN_SEARCH: usize = 400;

/// Given `args →* reduced_args` and `t →* reduced_t`, checks that when
/// `args, t ⇓ T, j` also `reduced_args, reduced_t ⇓ U, j` with `T` and `U`
/// joinable. Joinability of stacks is decided entrywise by normalization,
/// falling back to a bounded search for a common reduct.
pub fn check_commutation_with(
    args: &[Term],
    t: &Term,
    reduced_args: &[Term],
    reduced_t: &Term,
    fuel: usize,
) -> Commutation {
    let BigStep::Done { args: before, jump } = eval_big(args.to_vec(), t, fuel) else {
        return Commutation::Vacuous;
    };
    let mut after = eval_big(reduced_args.to_vec(), reduced_t, fuel);
    if after == BigStep::OutOfFuel {
        after = eval_big(reduced_args.to_vec(), reduced_t, fuel * RETRY_FACTOR);
    }
    let (after, jump2) = match after {
        BigStep::Done { args, jump } => (args, jump),
        BigStep::OutOfFuel => return Commutation::Inconclusive("reduced pair out of fuel".into()),
        BigStep::Undefined => return Commutation::Violation("reduced pair has no evaluation".into()),
    };
    if jump != jump2 {
        return Commutation::Violation(format!("jump {jump} becomes {jump2}"));
    }
    if before.len() != after.len() {
        return Commutation::Violation(format!(
            "result stacks differ in length: [{}] vs [{}]",
            join(&before),
            join(&after)
        ));
    }
    for (x, y) in before.iter().zip(&after) {
        if alpha_eq(x, y) {
            continue;
        }
        let (nx, ny) = (normalize(x, JOIN_FUEL, JOIN_UNROLL), normalize(y, JOIN_FUEL, JOIN_UNROLL));
        if let (Some(a), Some(b)) = (nx.normal_form(), ny.normal_form()) {
            if alpha_eq(a, b) {
                continue;
            }
            return Commutation::Violation(format!("result entries {x} and {y} have distinct normal forms {a} and {b}"));
        }
        match joinable_within(x, y, JOIN_SEARCH) {
            Joinability::Joined => {}
            Joinability::Disjoint => {
                return Commutation::Violation(format!("result entries {x} and {y} have no common reduct"))
            }
            Joinability::Unknown => {
                return Commutation::Inconclusive(format!("could not join {x} and {y}"));
            }
        }
    }
    Commutation::Holds
}

/// Picks random reduction sequences of at most `max_steps` steps for the
/// stack and the term, then checks as [`check_commutation_with`].
pub fn check_commutation<R: Rng>(args: &[Term], t: &Term, fuel: usize, max_steps: usize, rng: &mut R) -> Commutation {
    let mut reduced_args = args.to_vec();
    for _ in 0..rng.gen_range(0..=max_steps) {
        let options = reduce_stack(&reduced_args);
        if options.is_empty() {
            break;
        }
        let (i, r) = options[rng.gen_range(0..options.len())].clone();
        reduced_args[i] = r.result;
    }
    let mut reduced_t = t.clone();
    for _ in 0..rng.gen_range(0..=max_steps) {
        let mut options = reducts(&reduced_t);
        if options.is_empty() {
            break;
        }
        let k = rng.gen_range(0..options.len());
        reduced_t = options.swap_remove(k).result;
    }
    check_commutation_with(args, t, &reduced_args, &reduced_t, fuel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn p(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn single_steps() {
        let s = step(&MachineState::initial(p("[*].<x>.x"))).unwrap();
        assert_eq!(s, MachineState::with_args(vec![p("*")], p("<x>.x")));

        let s = step(&MachineState::initial(p("m ^ #j"))).unwrap();
        assert_eq!(s.term, p("m"));
        assert_eq!(s.conts, vec![ContEntry { jump: Jump::named("j"), continuation: p("m ^ #j") }]);

        let start = MachineState {
            args: vec![],
            term: p("#e"),
            conts: vec![ContEntry { jump: Jump::Skip, continuation: p("n") }],
        };
        assert_eq!(step(&start).unwrap(), MachineState::initial(p("#e")));

        assert_eq!(step(&MachineState::initial(p("x"))), None);
        assert_eq!(step(&MachineState::initial(p("<x>.x"))), None);
        assert_eq!(step(&MachineState::initial(p("#j"))), None);
    }

    #[test]
    fn runs() {
        let r = run(MachineState::initial(p("#tt ; #tt -> * ; #ff -> #k")), 10, true);
        assert_eq!(r.outcome, Outcome::Complete { args: vec![], jump: Jump::Skip });
        assert_eq!(r.steps, 4);
        assert_eq!(r.trace.as_ref().unwrap().len(), 5);

        let r = run(MachineState::initial(p("x")), 10, false);
        assert!(matches!(r.outcome, Outcome::Stuck { reason: StuckReason::FreeVariable, .. }));

        let r = run(MachineState::initial(p("(*) ^ *")), 100, false);
        assert!(matches!(r.outcome, Outcome::OutOfFuel { .. }));
        assert_eq!(r.steps, 100);

        let r = run(MachineState::with_args(vec![p("*")], p("<x>.x")), 10, false);
        assert_eq!(r.completed(), Some((&[][..], &Jump::Skip)));
    }

    #[test]
    fn halting_state_on_exact_fuel() {
        let r = run(MachineState::initial(p("[*].<x>.x")), 2, false);
        assert_eq!(r.outcome, Outcome::Complete { args: vec![], jump: Jump::Skip });
    }

    #[test]
    fn trace_rendering() {
        let s = MachineState {
            args: vec![p("a"), p("[b].c")],
            term: p("#e"),
            conts: vec![
                ContEntry { jump: Jump::Skip, continuation: p("x") },
                ContEntry { jump: Jump::named("e"), continuation: p("<y>.y") },
            ],
        };
        assert_eq!(s.to_string(), "⟨a, [b].c⟩ ⊢ #e ⊢ ⟨* -> x, #e -> <y>.y⟩");
        assert_eq!(MachineState::initial(p("*")).to_string(), "⟨⟩ ⊢ * ⊢ ⟨⟩");
    }

    #[test]
    fn big_step() {
        let s = vec![p("a")];
        assert_eq!(eval_big(s.clone(), &p("#j"), 10), BigStep::Done { args: s, jump: Jump::named("j") });
        assert_eq!(eval_big(vec![], &p("[*].<x>.x"), 10), BigStep::Done { args: vec![], jump: Jump::Skip });
        assert_eq!(eval_big(vec![], &p("x"), 10), BigStep::Undefined);
        assert_eq!(eval_big(vec![], &p("* ^ *"), 50), BigStep::OutOfFuel);
    }

    #[test]
    fn agreement() {
        assert_eq!(check_agreement(&p("*"), 100), Agreement::Agree { args: vec![], jump: Jump::Skip });
        assert_eq!(
            check_agreement(&p("#tt ; #tt -> * ; #ff -> #k"), 100),
            Agreement::Agree { args: vec![], jump: Jump::Skip }
        );
        assert_eq!(check_agreement(&p("x"), 100), Agreement::NeitherCompletes);
        assert_eq!(check_agreement(&p("* ^ *"), 100), Agreement::NeitherCompletes);
    }

    #[test]
    fn commutation_examples() {
        let t = p("[*].<x>.x");
        assert_eq!(check_commutation_with(&[], &t, &[], &p("*"), 100), Commutation::Holds);

        let s = [p("[*].<y>.y")];
        assert_eq!(check_commutation_with(&s, &p("<x>.x"), &[p("*")], &p("<x>.x"), 100), Commutation::Holds);

        let t = p("[* ; * -> #j].<x>.x");
        assert_eq!(check_commutation_with(&[], &t, &[], &p("[#j].<x>.x"), 100), Commutation::Holds);

        // result stacks that only join after reduction
        let t = p("[* ; * -> #j].*");
        assert_eq!(check_commutation_with(&[], &t, &[], &p("[#j].*"), 100), Commutation::Holds);

        assert_eq!(check_commutation_with(&[], &p("x"), &[], &p("x"), 100), Commutation::Vacuous);
    }
}
