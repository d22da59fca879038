// SPDX-License-Identifier: Apache-2.0

//! Algorithmic type checking.
//!
//! Pops and loops are checked by inverting their rule against the target.
//! Everything else goes through a type scheme: expansions are placed at the
//! variable and jump leaves as row variables, the push, join and loop rules
//! become unification problems at their premise boundaries, and the result
//! is instantiated at the target. For terms whose pops are annotated this
//! decides derivability.
//!
//! Joins follow the codiagonal reading: the handler's return type is the
//! join's return type, and the scrutinee's summands other than the join
//! jump must coincide with the handler's. A conclusion with no summand may
//! appear inside a derivation, for a loop that only exits by repeating; it
//! is always followed by a sum expansion.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashSet};
use std::fmt;

use thiserror::Error;

use super::scheme::{closed_fun, closed_vct, Fun, Rec, Sch, Subst, Vct};
use super::{ChoiceType, Context, StackType, ValueType};
use crate::reduce::{reducts, RuleName};
use crate::syntax::{Jump, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeErrorKind {
    UnboundVariable(Var),
    /// A pop met an input vector with nothing left to pop.
    ArityMismatch,
    /// The term may exit with a jump the target does not provide.
    MissingSummand(Jump),
    AnnotationRequired(Var),
    AnnotationMismatch { annotation: ValueType, expected: ValueType },
    /// The least type does not expand to the target.
    Mismatch { found: ValueType, expected: ValueType },
    /// No expansion of the argument fits what the body pops.
    ArgumentMismatch { argument: ValueType, body: ValueType },
    /// Scrutinee and handler of a join disagree on stack contents.
    JoinMismatch(Jump),
    /// The looping summand does not match the input.
    LoopMismatch(Jump),
    /// Every exit of the term is consumed, leaving no summand.
    EmptyChoice,
    LengthMismatch { expected: usize, found: usize },
}

impl fmt::Display for TypeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeErrorKind::UnboundVariable(x) => write!(f, "unbound variable `{x}`"),
            TypeErrorKind::ArityMismatch => f.write_str("pop on an empty input vector"),
            TypeErrorKind::MissingSummand(j) => write!(f, "target has no summand for jump {j}"),
            TypeErrorKind::AnnotationRequired(x) => write!(f, "binder `{x}` needs a type annotation"),
            TypeErrorKind::AnnotationMismatch { annotation, expected } => {
                write!(f, "annotation `{annotation}` differs from expected `{expected}`")
            }
            TypeErrorKind::Mismatch { found, expected } => {
                write!(f, "type `{found}` does not expand to `{expected}`")
            }
            TypeErrorKind::ArgumentMismatch { argument, body } => {
                write!(f, "argument of type `{argument}` does not fit body of type `{body}`")
            }
            TypeErrorKind::JoinMismatch(j) => write!(f, "join on {j}: scrutinee and handler stacks disagree"),
            TypeErrorKind::LoopMismatch(j) => write!(f, "loop on {j}: looping summand differs from input"),
            TypeErrorKind::EmptyChoice => f.write_str("empty choice type"),
            TypeErrorKind::LengthMismatch { expected, found } => {
                write!(f, "stack of length {found} checked against vector of length {expected}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at `{at}`")]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub at: Term,
}

impl TypeError {
    fn new(kind: TypeErrorKind, at: &Term) -> TypeError {
        TypeError { kind, at: at.clone() }
    }

    fn needs_annotation(&self) -> bool {
        matches!(self.kind, TypeErrorKind::AnnotationRequired(_))
    }
}

type Result<T> = std::result::Result<T, TypeError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Variable,
    Application,
    Abstraction,
    Jump,
    Join,
    Loop,
    /// Stack and sum expansions collapsed into one step.
    Expansion,
}

/// A derivation sketch: the rule at each node, its conclusion type, and the
/// premises in term order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    pub ty: ValueType,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    fn leaf(rule: Rule, ty: ValueType) -> Derivation {
        Derivation { rule, ty, premises: vec![] }
    }

    fn node(rule: Rule, ty: ValueType, premises: Vec<Derivation>) -> Derivation {
        Derivation { rule, ty, premises }
    }

    /// Wraps in an expansion step unless the type is already `ty`.
    fn expanded(self, ty: &ValueType) -> Derivation {
        if self.ty == *ty {
            self
        } else {
            Derivation::node(Rule::Expansion, ty.clone(), vec![self])
        }
    }

    /// One line per rule, premises indented below their conclusion.
    pub fn outline(&self) -> String {
        fn go(d: &Derivation, depth: usize, out: &mut String) {
            out.push_str(&format!("{}{:?} : {}\n", "  ".repeat(depth), d.rule, d.ty));
            for p in &d.premises {
                go(p, depth + 1, out);
            }
        }
        let mut s = String::new();
        go(self, 0, &mut s);
        s
    }
}

/// Decides `ctx ⊢ t : ty` and returns a derivation sketch.
pub fn check(ctx: &Context, t: &Term, ty: &ValueType) -> Result<Derivation> {
    run(ctx, t, ty, true).map(|d| d.expect("sketch requested"))
}

/// Decides `ctx ⊢ t : ty` without building the sketch.
pub fn derivable(ctx: &Context, t: &Term, ty: &ValueType) -> Result<()> {
    run(ctx, t, ty, false).map(|_| ())
}

fn run(ctx: &Context, t: &Term, ty: &ValueType, sketch: bool) -> Result<Option<Derivation>> {
    if ty.output.is_empty() {
        return Err(TypeError::new(TypeErrorKind::EmptyChoice, t));
    }
    match t {
        Term::Pop(x, ann, body) => {
            let Some(r) = ty.input.top() else {
                return Err(TypeError::new(TypeErrorKind::ArityMismatch, t));
            };
            if let Some(a) = ann {
                if a != r {
                    let kind = TypeErrorKind::AnnotationMismatch { annotation: a.clone(), expected: r.clone() };
                    return Err(TypeError::new(kind, t));
                }
            }
            let mut inner = ctx.clone();
            inner.insert(x.clone(), r.clone());
            let rest = ValueType::new(StackType(ty.input.0[..ty.input.len() - 1].to_vec()), ty.output.clone());
            let d = run(&inner, body, &rest, sketch)?;
            Ok(d.map(|d| Derivation::node(Rule::Abstraction, ty.clone(), vec![d])))
        }
        Term::Loop(body, j) => {
            let rest = ty.output.without(j);
            let premise = ValueType::new(ty.input.clone(), rest.with(j.clone(), ty.input.clone()));
            let d = run(ctx, body, &premise, sketch)?;
            let concl = ValueType::new(ty.input.clone(), rest);
            Ok(d.map(|d| Derivation::node(Rule::Loop, concl, vec![d]).expanded(ty)))
        }
        _ => {
            let mut s = Subst::default();
            match scheme(&mut s, ctx, t, sketch) {
                Ok(n) => {
                    fit(&mut s, &n.sch, ty, t)?;
                    Ok(sketch.then(|| build(&s, &n).expanded(ty)))
                }
                // a failed guess decides nothing
                Err(e) if e.needs_annotation() => fallback(ctx, t, ty, sketch).map_err(|_| e),
                Err(e) => Err(e),
            }
        }
    }
}

/// Instantiates a term scheme at `ty`.
fn fit(s: &mut Subst, sch: &Sch, ty: &ValueType, t: &Term) -> Result<()> {
    if let Some(k) = sch.output.keys().find(|k| ty.output.get(k).is_none()) {
        return Err(TypeError::new(TypeErrorKind::MissingSummand(k.clone()), t));
    }
    let m = s.mark();
    let fits = s.unify_vct(&sch.input, &closed_vct(&ty.input))
        && sch.output.iter().all(|(k, v)| s.unify_vct(v, &closed_vct(&ty.output.0[k])));
    if !fits {
        s.undo(m);
        let kind = TypeErrorKind::Mismatch { found: s.resolve_sch(sch), expected: ty.clone() };
        return Err(TypeError::new(kind, t));
    }
    Ok(())
}

/// Where a subterm needs an annotation, the least type of its sibling
/// fixes the missing vector. Sound, but it may miss a derivation that
/// needs an expansion of that least type, so its failures are reported as
/// the missing annotation.
fn fallback(ctx: &Context, t: &Term, ty: &ValueType, sketch: bool) -> Result<Option<Derivation>> {
    let mut s = Subst::default();
    match t {
        Term::Push(arg, body) => {
            let r = match scheme(&mut s, ctx, arg, false) {
                Ok(n) => s.resolve_sch(&n.sch),
                Err(e) if e.needs_annotation() => {
                    let n = scheme(&mut s, ctx, body, false)?;
                    fit_output(&mut s, &n.sch.output, &ty.output, body)?;
                    let input = s.resolve_vct(&n.sch.input);
                    match input.top() {
                        Some(r) => r.clone(),
                        None => return Err(e),
                    }
                }
                Err(e) => return Err(e),
            };
            let a = run(ctx, arg, &r, sketch)?;
            let b = run(ctx, body, &ValueType::new(ty.input.pushed(r), ty.output.clone()), sketch)?;
            Ok(a.zip(b).map(|(a, b)| Derivation::node(Rule::Application, ty.clone(), vec![a, b])))
        }
        Term::Join(n, j, m) => {
            let others = ty.output.without(j);
            let stack = match scheme(&mut s, ctx, n, false) {
                Ok(nn) => {
                    let sigma = Vct::row(s.fresh_row());
                    let target = closed_choice(&others);
                    let mut fits = s.unify_vct(&nn.sch.input, &closed_vct(&ty.input));
                    for (k, v) in &nn.sch.output {
                        fits = fits
                            && match target.get(k) {
                                _ if k == j => s.unify_vct(v, &sigma),
                                Some(w) => s.unify_vct(v, w),
                                None => return Err(TypeError::new(TypeErrorKind::MissingSummand(k.clone()), n)),
                            };
                    }
                    if !fits {
                        return Err(TypeError::new(TypeErrorKind::JoinMismatch(j.clone()), t));
                    }
                    s.resolve_vct(&sigma)
                }
                Err(e) if e.needs_annotation() => {
                    let mm = scheme(&mut s, ctx, m, false)?;
                    fit_output(&mut s, &mm.sch.output, &ty.output, m)?;
                    s.resolve_vct(&mm.sch.input)
                }
                Err(e) => return Err(e),
            };
            let a = run(ctx, n, &ValueType::new(ty.input.clone(), others.with(j.clone(), stack.clone())), sketch)?;
            let b = run(ctx, m, &ValueType::new(stack, ty.output.clone()), sketch)?;
            Ok(a.zip(b).map(|(a, b)| Derivation::node(Rule::Join, ty.clone(), vec![a, b])))
        }
        _ => unreachable!("only pushes and joins defer to a sibling"),
    }
}

fn closed_choice(c: &ChoiceType) -> BTreeMap<Jump, Vct> {
    c.0.iter().map(|(k, v)| (k.clone(), closed_vct(v))).collect()
}

fn fit_output(s: &mut Subst, out: &BTreeMap<Jump, Vct>, target: &ChoiceType, t: &Term) -> Result<()> {
    for (k, v) in out {
        let Some(w) = target.get(k) else {
            return Err(TypeError::new(TypeErrorKind::MissingSummand(k.clone()), t));
        };
        if !s.unify_vct(v, &closed_vct(w)) {
            let kind = TypeErrorKind::Mismatch { found: s.resolve_sch(&Sch { input: Vct { base: None, items: vec![] }, output: out.clone() }), expected: ValueType::new(StackType::empty(), target.clone()) };
            return Err(TypeError::new(kind, t));
        }
    }
    Ok(())
}

/// A node of a scheme derivation, kept so the sketch can be read off once
/// the instance is fixed.
struct Node {
    rule: Rule,
    sch: Sch,
    /// The jump of a join or loop.
    jump: Option<Jump>,
    /// The rule's own type at a leaf.
    leaf: Option<ValueType>,
    /// The argument's type as pushed.
    arg: Option<Fun>,
    kids: Vec<Node>,
}

impl Node {
    fn new(rule: Rule, sch: Sch) -> Node {
        Node { rule, sch, jump: None, leaf: None, arg: None, kids: vec![] }
    }
}

/// Children are kept only when `keep` is set, for reading off a sketch.
fn scheme(s: &mut Subst, ctx: &Context, t: &Term, keep: bool) -> Result<Node> {
    let mut kids = Vec::new();
    let mut part = |n: Node| -> Sch {
        if keep {
            let sch = n.sch.clone();
            kids.push(n);
            sch
        } else {
            n.sch
        }
    };
    match t {
        Term::Var(x) => {
            let Some(ty) = ctx.get(x) else {
                return Err(TypeError::new(TypeErrorKind::UnboundVariable(x.clone()), t));
            };
            let r = s.fresh_row();
            let under = |v: &StackType| Vct { base: Some(r), items: closed_vct(v).items };
            let sch = Sch { input: under(&ty.input), output: ty.output.0.iter().map(|(k, v)| (k.clone(), under(v))).collect() };
            Ok(Node { leaf: keep.then(|| ty.clone()), ..Node::new(Rule::Variable, sch) })
        }
        Term::Jump(j) => {
            let r = s.fresh_row();
            let sch = Sch { input: Vct::row(r), output: BTreeMap::from([(j.clone(), Vct::row(r))]) };
            Ok(Node { leaf: keep.then(|| ValueType::of_jump(j.clone())), ..Node::new(Rule::Jump, sch) })
        }
        Term::Pop(x, ann, body) => {
            let Some(a) = ann else {
                return Err(TypeError::new(TypeErrorKind::AnnotationRequired(x.clone()), t));
            };
            let mut inner = ctx.clone();
            inner.insert(x.clone(), a.clone());
            let Sch { mut input, output } = part(scheme(s, &inner, body, keep)?);
            input.items.push(closed_fun(a));
            Ok(Node { kids, ..Node::new(Rule::Abstraction, Sch { input, output }) })
        }
        Term::Push(arg, body) => {
            let n = part(scheme(s, ctx, arg, keep)?);
            let m = part(scheme(s, ctx, body, keep)?);
            let rest = s.fresh_rec();
            let value = Fun { input: n.input, output: Rec { fields: n.output, rest: Some(rest) } };
            let below = s.fresh_row();
            let mark = s.mark();
            if !s.unify_vct(&m.input, &Vct { base: Some(below), items: vec![value.clone()] }) {
                s.undo(mark);
                let kind = TypeErrorKind::ArgumentMismatch { argument: s.resolve_fun(&value), body: s.resolve_sch(&m) };
                return Err(TypeError::new(kind, t));
            }
            let sch = Sch { input: Vct::row(below), output: m.output };
            Ok(Node { arg: keep.then_some(value), kids, ..Node::new(Rule::Application, sch) })
        }
        Term::Join(scrutinee, j, handler) => {
            let n = part(scheme(s, ctx, scrutinee, keep)?);
            let m = part(scheme(s, ctx, handler, keep)?);
            let mut fits = true;
            let mut output = m.output;
            for (k, v) in n.output {
                if k == *j {
                    fits = fits && s.unify_vct(&v, &m.input);
                } else if let Some(w) = output.get(&k) {
                    let w = w.clone();
                    fits = fits && s.unify_vct(&v, &w);
                } else {
                    output.insert(k, v);
                }
            }
            if !fits {
                return Err(TypeError::new(TypeErrorKind::JoinMismatch(j.clone()), t));
            }
            let sch = Sch { input: n.input, output };
            Ok(Node { jump: Some(j.clone()), kids, ..Node::new(Rule::Join, sch) })
        }
        Term::Loop(body, j) => {
            let Sch { input, mut output } = part(scheme(s, ctx, body, keep)?);
            if let Some(v) = output.remove(j) {
                if !s.unify_vct(&v, &input) {
                    return Err(TypeError::new(TypeErrorKind::LoopMismatch(j.clone()), t));
                }
            }
            Ok(Node { jump: Some(j.clone()), kids, ..Node::new(Rule::Loop, Sch { input, output }) })
        }
    }
}

/// Reads the derivation off a solved scheme; expansions sit at the leaves
/// and wherever a premise is used at a larger type.
fn build(s: &Subst, n: &Node) -> Derivation {
    let ty = s.resolve_sch(&n.sch);
    match n.rule {
        Rule::Variable | Rule::Jump => Derivation::leaf(n.rule, n.leaf.clone().expect("leaf type")).expanded(&ty),
        Rule::Abstraction => Derivation::node(n.rule, ty, vec![build(s, &n.kids[0])]),
        Rule::Application => {
            let a = s.resolve_fun(n.arg.as_ref().expect("argument type"));
            let premises = vec![build(s, &n.kids[0]).expanded(&a), build(s, &n.kids[1])];
            Derivation::node(n.rule, ty, premises)
        }
        Rule::Join => {
            let j = n.jump.clone().expect("join jump");
            let handler = build(s, &n.kids[1]);
            let stack = handler.ty.input.clone();
            let handler = handler.expanded(&ValueType::new(stack.clone(), ty.output.clone()));
            let scrutinee_ty = ValueType::new(ty.input.clone(), ty.output.without(&j).with(j, stack));
            let scrutinee = build(s, &n.kids[0]).expanded(&scrutinee_ty);
            Derivation::node(n.rule, ty, vec![scrutinee, handler])
        }
        Rule::Loop | Rule::Expansion => {
            let j = n.jump.clone().expect("loop jump");
            let premise = ValueType::new(ty.input.clone(), ty.output.with(j, ty.input.clone()));
            Derivation::node(Rule::Loop, ty, vec![build(s, &n.kids[0]).expanded(&premise)])
        }
    }
}

/// A least type of `t`: every type `t` checks at is an expansion of the
/// scheme it is read from. Requires every pop in `t` to carry an
/// annotation, and fails with `EmptyChoice` when `t` cannot exit.
pub fn infer(ctx: &Context, t: &Term) -> Result<ValueType> {
    let mut s = Subst::default();
    let n = scheme(&mut s, ctx, t, false)?;
    let ty = s.resolve_sch(&n.sch);
    if ty.output.is_empty() {
        return Err(TypeError::new(TypeErrorKind::EmptyChoice, t));
    }
    Ok(ty)
}

/// Checks each stack entry against the corresponding vector entry, both
/// bottom to top.
pub fn check_stack(ctx: &Context, stack: &[Term], st: &StackType) -> Result<Vec<Derivation>> {
    if stack.len() != st.len() {
        let kind = TypeErrorKind::LengthMismatch { expected: st.len(), found: stack.len() };
        let at = stack.last().cloned().unwrap_or_else(Term::skip);
        return Err(TypeError { kind, at });
    }
    stack.iter().zip(&st.0).map(|(t, ty)| check(ctx, t, ty)).collect()
}

#[derive(Debug, Clone, Default)]
pub struct SubjectReductionReport {
    /// Reducts that were rechecked.
    pub checked: usize,
    /// `(rule, position, reduct, error)` for every reduct that failed.
    pub violations: Vec<(RuleName, Vec<usize>, Term, TypeError)>,
    /// Exploration stopped at the budget with reducts left unexplored.
    pub truncated: bool,
}

/// Rechecks every reduct reachable from `t` at `ty`, breadth first, up to
/// `fuel` reducts.
pub fn check_subject_reduction(ctx: &Context, t: &Term, ty: &ValueType, fuel: usize) -> SubjectReductionReport {
    let mut report = SubjectReductionReport::default();
    let mut seen = HashSet::from([t.alpha_key()]);
    // smallest first, so loop unrolling does not crowd out the rest
    let mut terms = vec![Some(t.clone())];
    let mut queue = BinaryHeap::from([Reverse((t.size(), 0))]);
    while let Some(Reverse((_, i))) = queue.pop() {
        let cur = terms[i].take().unwrap();
        for r in reducts(&cur) {
            if !seen.insert(r.result.alpha_key()) {
                continue;
            }
            if report.checked >= fuel {
                report.truncated = true;
                return report;
            }
            report.checked += 1;
            match derivable(ctx, &r.result, ty) {
                Ok(_) => {
                    queue.push(Reverse((r.result.size(), terms.len())));
                    terms.push(Some(r.result));
                }
                Err(e) => report.violations.push((r.rule, r.position, r.result, e)),
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, parse_type};

    fn ty(s: &str) -> ValueType {
        parse_type(s).unwrap()
    }

    fn term(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn ctx(entries: &[(&str, &str)]) -> Context {
        entries.iter().map(|(x, t)| (Var::new(*x), ty(t))).collect()
    }

    fn ok(c: &Context, t: &str, target: &str) -> bool {
        check(c, &term(t), &ty(target)).is_ok()
    }

    #[test]
    fn jumps() {
        let e = Context::new();
        assert!(ok(&e, "*", "1 => 1.*"));
        assert!(ok(&e, "#tt", "1 => 1.#tt + 1.#ff"));
        let err = check(&e, &term("*"), &ty("1 => 1.#e")).unwrap_err();
        assert_eq!(err.kind, TypeErrorKind::MissingSummand(Jump::Skip));
    }

    #[test]
    fn conditional_codiagonal() {
        let t = "(1 => 1.#a)";
        let c = ctx(&[("b", "1 => 1.#tt + 1.#ff"), ("m", &format!("1 => {t}.*")), ("n", &format!("1 => {t}.*"))]);
        assert!(ok(&c, "b ; #tt -> m ; #ff -> n", &format!("1 => {t}.*")));
        assert!(ok(&c, "b ; #tt -> m", &format!("1 => {t}.* + 1.#ff")));
        assert!(!ok(&c, "b ; #tt -> m", &format!("1 => {t}.*")));
    }

    #[test]
    fn do_while_loop() {
        let t = "(1 => 1.#a)";
        let c = ctx(&[("m", &format!("{t} => {t}.*")), ("b", "1 => 1.#tt + 1.#ff")]);
        assert!(ok(&c, "m ; b", &format!("{t} => {t}.#tt + {t}.#ff")));
        assert!(ok(&c, "(m ; b) ^ #tt", &format!("{t} => {t}.#ff")));
        assert_eq!(infer(&c, &term("(m ; b) ^ #tt")).unwrap(), ty(&format!("{t} => {t}.#ff")));
    }

    #[test]
    fn inference() {
        let e = Context::new();
        assert_eq!(infer(&e, &term("#e")).unwrap(), ty("1 => 1.#e"));
        let (s, t) = ("(1 => 1.#s)", "(1 => 1.#t)");
        let swap = format!("<x : {}>.<y : {}>.[y].[x].*", &s[1..s.len() - 1], &t[1..t.len() - 1]);
        assert_eq!(infer(&e, &term(&swap)).unwrap(), ty(&format!("{s} {t} => {t} {s}.*")));
        assert_eq!(
            infer(&e, &term("<x : 1 => 1.*>.x")).unwrap(),
            ty("(1 => 1.*) => 1.*")
        );
        let err = infer(&e, &term("<x>.x")).unwrap_err();
        assert_eq!(err.kind, TypeErrorKind::AnnotationRequired(Var::new("x")));
    }

    #[test]
    fn unannotated_pops_check_against_a_target() {
        let e = Context::new();
        assert!(ok(&e, "<x>.x", "(1 => 1.*) => 1.*"));
        assert!(ok(&e, "<x>.<y>.[y].[x].*", "(1 => 1.#s) (1 => 1.#t) => (1 => 1.#t) (1 => 1.#s).*"));
        assert!(!ok(&e, "<x>.<y>.[x].[y].*", "(1 => 1.#s) (1 => 1.#t) => (1 => 1.#t) (1 => 1.#s).*"));
        assert!(ok(&e, "[*].<x>.x", "1 => 1.*"));
        let err = check(&e, &term("<x>.x"), &ty("1 => 1.*")).unwrap_err();
        assert_eq!(err.kind, TypeErrorKind::ArityMismatch);
    }

    #[test]
    fn sequencing_where_the_handler_exits_with_skip() {
        let e = Context::new();
        let o = "(1 => 1.*)";
        // call-by-value application shape
        let t = format!("[<a : 1 => 1.*>.[a].*].* ; <f : {o} => {o}.*>.([*].* ; f)");
        assert_eq!(infer(&e, &term(&t)).unwrap(), ty(&format!("1 => {o}.*")));
        assert!(ok(&e, "* ; *", "1 => 1.*"));
    }

    #[test]
    fn push_needs_argument_expanding_to_binder() {
        let e = Context::new();
        let t = "[*].<f : (1 => 1.#a) => (1 => 1.#a).*>.[#a].f";
        assert_eq!(infer(&e, &term(t)).unwrap(), ty("1 => (1 => 1.#a).*"));
        assert!(check(&e, &term("[#e].<f : 1 => 1.*>.f"), &ty("1 => 1.*")).is_err());
    }

    #[test]
    fn stacks() {
        let e = Context::new();
        assert!(check_stack(&e, &[], &StackType::empty()).is_ok());
        assert!(check_stack(&e, &[term("*")], &StackType(vec![ty("1 => 1.*")])).is_ok());
        let err = check_stack(&e, &[term("*")], &StackType::empty()).unwrap_err();
        assert_eq!(err.kind, TypeErrorKind::LengthMismatch { expected: 0, found: 1 });
    }

    #[test]
    fn subject_reduction_examples() {
        let e = Context::new();
        let r = check_subject_reduction(&e, &term("[*].<x : 1 => 1.*>.x"), &ty("1 => 1.*"), 100);
        assert_eq!((r.checked, r.violations.len()), (1, 0));
        let c = ctx(&[("m", "1 => (1 => 1.*).*")]);
        let r = check_subject_reduction(&c, &term("#tt ; #tt -> m"), &ty("1 => (1 => 1.*).*"), 100);
        assert_eq!((r.checked, r.violations.len()), (1, 0));
        let c = ctx(&[("n", "1 => 1.*")]);
        let target = ty("1 => 1.#e + 1.*");
        assert!(check(&c, &term("#e ; * -> n"), &target).is_ok());
        let r = check_subject_reduction(&c, &term("#e ; * -> n"), &target, 100);
        assert_eq!((r.checked, r.violations.len()), (1, 0));
    }

    #[test]
    fn outline_lists_rules() {
        let d = check(&Context::new(), &term("#tt"), &ty("1 => 1.#tt + 1.#ff")).unwrap();
        let text = d.outline();
        assert!(text.starts_with("Expansion : 1 => 1.#ff + 1.#tt\n  Jump : 1 => 1.#tt"), "{text}");
    }
}
