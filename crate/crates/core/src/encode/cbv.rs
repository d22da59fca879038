// SPDX-License-Identifier: Apache-2.0

//! Lambda terms with exceptions, their surface syntax, a simple
//! call-by-value type system, and the translation into the calculus.
//!
//! ```text
//! expr  := "\" var [ ":" ltype ] "." expr
//!        | app [ "handle" jump var "=>" expr ]
//! app   := operand { operand }
//! operand := var | "(" expr ")" | "\" ... | "raise" jump app
//! ltype := "o" [ "->" ltype ] | "(" ltype ")" [ "->" ltype ]
//! ```

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::reduce::reducts;
use crate::syntax::{alpha_eq, parse_term, parse_type, Jump, ParseError, Parser, Term, Tok, Var};
use crate::types::{check, ChoiceType, Context, StackType, ValueType};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LambdaType {
    Base,
    Arrow(Box<LambdaType>, Box<LambdaType>),
}

impl LambdaType {
    pub fn arrow(a: LambdaType, b: LambdaType) -> LambdaType {
        LambdaType::Arrow(Box::new(a), Box::new(b))
    }
}

impl fmt::Display for LambdaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaType::Base => f.write_str("o"),
            LambdaType::Arrow(a, b) => match **a {
                LambdaType::Base => write!(f, "o -> {b}"),
                _ => write!(f, "({a}) -> {b}"),
            },
        }
    }
}

impl fmt::Debug for LambdaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum LambdaTerm {
    Var(String),
    Lam(String, Option<LambdaType>, Box<LambdaTerm>),
    App(Box<LambdaTerm>, Box<LambdaTerm>),
    Raise(Jump, Box<LambdaTerm>),
    Handle(Box<LambdaTerm>, Jump, String, Box<LambdaTerm>),
}

impl LambdaTerm {
    pub fn var(x: &str) -> LambdaTerm {
        LambdaTerm::Var(x.to_string())
    }

    pub fn lam(x: &str, body: LambdaTerm) -> LambdaTerm {
        LambdaTerm::Lam(x.to_string(), None, Box::new(body))
    }

    pub fn lam_typed(x: &str, ty: LambdaType, body: LambdaTerm) -> LambdaTerm {
        LambdaTerm::Lam(x.to_string(), Some(ty), Box::new(body))
    }

    pub fn app(f: LambdaTerm, a: LambdaTerm) -> LambdaTerm {
        LambdaTerm::App(Box::new(f), Box::new(a))
    }

    pub fn raise(e: Jump, payload: LambdaTerm) -> LambdaTerm {
        LambdaTerm::Raise(e, Box::new(payload))
    }

    pub fn handle(body: LambdaTerm, e: Jump, x: &str, handler: LambdaTerm) -> LambdaTerm {
        LambdaTerm::Handle(Box::new(body), e, x.to_string(), Box::new(handler))
    }

    pub fn is_value(&self) -> bool {
        matches!(self, LambdaTerm::Var(_) | LambdaTerm::Lam(..))
    }

    pub fn size(&self) -> usize {
        match self {
            LambdaTerm::Var(_) => 1,
            LambdaTerm::Lam(_, _, b) | LambdaTerm::Raise(_, b) => 1 + b.size(),
            LambdaTerm::App(a, b) | LambdaTerm::Handle(a, _, _, b) => 1 + a.size() + b.size(),
        }
    }

    /// Every variable name occurring in the term, bound or free.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            LambdaTerm::Var(x) => {
                out.insert(x.clone());
            }
            LambdaTerm::Lam(x, _, b) => {
                out.insert(x.clone());
                b.collect_names(out);
            }
            LambdaTerm::App(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            LambdaTerm::Raise(_, b) => b.collect_names(out),
            LambdaTerm::Handle(a, _, x, b) => {
                out.insert(x.clone());
                a.collect_names(out);
                b.collect_names(out);
            }
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, tail: bool) -> fmt::Result {
        let open = |f: &mut fmt::Formatter<'_>| if tail { Ok(()) } else { f.write_str("(") };
        let close = |f: &mut fmt::Formatter<'_>| if tail { Ok(()) } else { f.write_str(")") };
        match self {
            LambdaTerm::Var(x) => f.write_str(x),
            LambdaTerm::Lam(x, ty, body) => {
                open(f)?;
                match ty {
                    Some(ty) => write!(f, "\\{x} : {ty}. ")?,
                    None => write!(f, "\\{x}. ")?,
                }
                body.write(f, true)?;
                close(f)
            }
            LambdaTerm::App(fun, arg) => {
                open(f)?;
                match **fun {
                    LambdaTerm::Var(_) | LambdaTerm::App(..) => fun.write(f, true)?,
                    _ => fun.write(f, false)?,
                }
                f.write_str(" ")?;
                match **arg {
                    LambdaTerm::Var(_) => arg.write(f, true)?,
                    _ => arg.write(f, false)?,
                }
                close(f)
            }
            LambdaTerm::Raise(e, payload) => {
                open(f)?;
                write!(f, "raise {e} ")?;
                match **payload {
                    LambdaTerm::Var(_) | LambdaTerm::App(..) => payload.write(f, true)?,
                    _ => payload.write(f, false)?,
                }
                close(f)
            }
            LambdaTerm::Handle(body, e, x, handler) => {
                open(f)?;
                match **body {
                    LambdaTerm::Var(_) | LambdaTerm::App(..) | LambdaTerm::Raise(..) => body.write(f, true)?,
                    _ => body.write(f, false)?,
                }
                write!(f, " handle {e} {x} => ")?;
                handler.write(f, true)?;
                close(f)
            }
        }
    }
}

/// In the surface syntax accepted by [`parse_lambda`].
impl fmt::Display for LambdaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, true)
    }
}

impl fmt::Debug for LambdaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

const KEYWORDS: [&str; 2] = ["raise", "handle"];

fn is_keyword(p: &Parser, kw: &str) -> bool {
    matches!(p.peek(), Tok::Ident(s) if s == kw)
}

fn lambda_var(p: &mut Parser) -> Result<String, ParseError> {
    match p.peek() {
        Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => Ok(p.var()?.as_str().to_string()),
        _ => Err(p.error(&["variable"])),
    }
}

fn exception(p: &mut Parser) -> Result<Jump, ParseError> {
    match p.peek() {
        Tok::Jump(Jump::Named(_)) => p.jump(),
        _ => Err(p.error(&["exception name"])),
    }
}

fn expr(p: &mut Parser) -> Result<LambdaTerm, ParseError> {
    if *p.peek() == Tok::Backslash {
        return lambda(p);
    }
    let body = app(p)?;
    if is_keyword(p, "handle") {
        p.bump();
        let e = exception(p)?;
        let x = lambda_var(p)?;
        p.expect(Tok::FatArrow)?;
        let handler = expr(p)?;
        return Ok(LambdaTerm::handle(body, e, &x, handler));
    }
    Ok(body)
}

fn lambda(p: &mut Parser) -> Result<LambdaTerm, ParseError> {
    p.expect(Tok::Backslash)?;
    let x = lambda_var(p)?;
    let ty = if *p.peek() == Tok::Colon {
        p.bump();
        Some(ltype(p)?)
    } else {
        None
    };
    p.expect(Tok::Dot)?;
    Ok(LambdaTerm::Lam(x, ty, Box::new(expr(p)?)))
}

fn app(p: &mut Parser) -> Result<LambdaTerm, ParseError> {
    let mut items = Vec::new();
    loop {
        let item = match p.peek() {
            Tok::Ident(s) if s == "raise" => {
                p.bump();
                let e = exception(p)?;
                items.push(LambdaTerm::raise(e, app(p)?));
                break;
            }
            Tok::Ident(s) if s == "handle" => break,
            Tok::Ident(_) => LambdaTerm::Var(lambda_var(p)?),
            Tok::LParen => {
                p.bump();
                let t = expr(p)?;
                p.expect(Tok::RParen)?;
                t
            }
            Tok::Backslash => {
                items.push(lambda(p)?);
                break;
            }
            _ => break,
        };
        items.push(item);
    }
    let mut items = items.into_iter();
    let Some(first) = items.next() else {
        return Err(p.error(&["variable", "`(`", "`\\`", "`raise`"]));
    };
    Ok(items.fold(first, LambdaTerm::app))
}

fn ltype(p: &mut Parser) -> Result<LambdaType, ParseError> {
    let left = match p.peek() {
        Tok::Ident(s) if s == "o" => {
            p.bump();
            LambdaType::Base
        }
        Tok::LParen => {
            p.bump();
            let t = ltype(p)?;
            p.expect(Tok::RParen)?;
            t
        }
        _ => return Err(p.error(&["`o`", "`(`"])),
    };
    if *p.peek() == Tok::Arrow {
        p.bump();
        return Ok(LambdaType::arrow(left, ltype(p)?));
    }
    Ok(left)
}

pub fn parse_lambda(src: &str) -> Result<LambdaTerm, ParseError> {
    let mut p = Parser::new(src)?;
    let t = expr(&mut p)?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_lambda_type(src: &str) -> Result<LambdaType, ParseError> {
    let mut p = Parser::new(src)?;
    let t = ltype(&mut p)?;
    p.expect_eof()?;
    Ok(t)
}

/// `o` is `1 => 1.*` and `A -> B` is `A => B.*`.
pub fn encode_cbv_type(a: &LambdaType) -> ValueType {
    match a {
        LambdaType::Base => ValueType::unit(),
        LambdaType::Arrow(a, b) => ValueType::new(
            StackType(vec![encode_cbv_type(a)]),
            ChoiceType::single(Jump::Skip, StackType(vec![encode_cbv_type(b)])),
        ),
    }
}

/// `1 => A.*`, with a summand `B.e` for each exception `e` carrying `B`.
pub fn encode_cbv_term_type(a: &LambdaType, exceptions: &BTreeMap<Jump, LambdaType>) -> ValueType {
    let mut out = ChoiceType::single(Jump::Skip, StackType(vec![encode_cbv_type(a)]));
    for (e, b) in exceptions {
        out = out.with(e.clone(), StackType(vec![encode_cbv_type(b)]));
    }
    ValueType::new(StackType::empty(), out)
}

struct Encoder {
    avoid: BTreeSet<String>,
    next: usize,
}

impl Encoder {
    fn new(t: &LambdaTerm) -> Encoder {
        Encoder { avoid: t.names(), next: 0 }
    }

    fn fresh(&mut self) -> Var {
        loop {
            let name = format!("v{}", self.next);
            self.next += 1;
            if !self.avoid.contains(&name) {
                return Var::new(name);
            }
        }
    }

    fn binder(x: &str, ty: Option<&LambdaType>, body: Term) -> Term {
        match ty {
            Some(ty) => Term::pop_typed(Var::new(x), encode_cbv_type(ty), body),
            None => Term::pop(Var::new(x), body),
        }
    }

    fn raise(e: &Jump, payload: &LambdaTerm, encoded: Term) -> Term {
        match (payload.is_value(), encoded) {
            (true, Term::Push(v, _)) => Term::push(*v, Term::jump(e.clone())),
            (_, encoded) => Term::seq(encoded, Term::jump(e.clone())),
        }
    }

    fn value(&mut self, t: &LambdaTerm) -> Term {
        match t {
            LambdaTerm::Var(x) => Term::var(x),
            LambdaTerm::Lam(x, ty, body) => {
                let body = self.term(body);
                Encoder::binder(x, ty.as_ref(), body)
            }
            _ => unreachable!("not a value"),
        }
    }

    fn term(&mut self, t: &LambdaTerm) -> Term {
        match t {
            LambdaTerm::Var(_) | LambdaTerm::Lam(..) => Term::push(self.value(t), Term::skip()),
            LambdaTerm::App(fun, arg) => {
                let v = self.fresh();
                let fun = self.term(fun);
                let arg = self.term(arg);
                Term::seq(fun, Term::pop(v.clone(), Term::seq(arg, Term::Var(v))))
            }
            LambdaTerm::Raise(e, payload) => {
                let encoded = self.term(payload);
                Encoder::raise(e, payload, encoded)
            }
            LambdaTerm::Handle(body, e, x, handler) => {
                let body = self.term(body);
                let handler = self.term(handler);
                Term::join(body, e.clone(), Term::pop(Var::new(x), handler))
            }
        }
    }
}

/// The call-by-value translation. Fresh binders `v0`, `v1`, ... skip any
/// name used in `t`.
pub fn encode_cbv(t: &LambdaTerm) -> Term {
    Encoder::new(t).term(t)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LambdaTypeError {
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("abstraction over {0} needs a type annotation")]
    MissingAnnotation(String),
    #[error("{0} is not a function")]
    NotAFunction(String),
    #[error("expected {expected}, found {found} in {at}")]
    Mismatch { expected: LambdaType, found: LambdaType, at: String },
    #[error("exception {0} is not declared")]
    UnknownException(Jump),
    #[error("body of abstraction over {0} may raise an exception")]
    LatentException(String),
}

type Effects = BTreeMap<Jump, LambdaType>;

struct Typing<'a> {
    sig: &'a BTreeMap<Jump, LambdaType>,
    enc: Encoder,
}

/// `None` stands for the unconstrained type of a raise.
type Synth = (Term, Option<LambdaType>, Effects);

fn meet(a: Option<LambdaType>, b: Option<LambdaType>, at: &LambdaTerm) -> Result<Option<LambdaType>, LambdaTypeError> {
    match (a, b) {
        (Some(a), Some(b)) if a != b => Err(LambdaTypeError::Mismatch { expected: a, found: b, at: at.to_string() }),
        (Some(a), _) => Ok(Some(a)),
        (None, b) => Ok(b),
    }
}

impl Typing<'_> {
    fn term(&mut self, ctx: &BTreeMap<String, LambdaType>, t: &LambdaTerm) -> Result<Synth, LambdaTypeError> {
        match t {
            LambdaTerm::Var(x) => {
                let ty = ctx.get(x).ok_or_else(|| LambdaTypeError::Unbound(x.clone()))?;
                Ok((Term::push(Term::var(x), Term::skip()), Some(ty.clone()), Effects::new()))
            }
            LambdaTerm::Lam(x, ann, body) => {
                let a = ann.clone().ok_or_else(|| LambdaTypeError::MissingAnnotation(x.clone()))?;
                let mut inner = ctx.clone();
                inner.insert(x.clone(), a.clone());
                let (b_tm, b_ty, b_eff) = self.term(&inner, body)?;
                if !b_eff.is_empty() {
                    return Err(LambdaTypeError::LatentException(x.clone()));
                }
                let b_ty = b_ty.ok_or_else(|| LambdaTypeError::LatentException(x.clone()))?;
                let value = Encoder::binder(x, Some(&a), b_tm);
                Ok((Term::push(value, Term::skip()), Some(LambdaType::arrow(a, b_ty)), Effects::new()))
            }
            LambdaTerm::App(fun, arg) => {
                let v = self.enc.fresh();
                let (f_tm, f_ty, mut eff) = self.term(ctx, fun)?;
                let (a_tm, a_ty, a_eff) = self.term(ctx, arg)?;
                eff.extend(a_eff);
                let result = match &f_ty {
                    Some(LambdaType::Arrow(dom, cod)) => {
                        meet(Some((**dom).clone()), a_ty, arg)?;
                        Some((**cod).clone())
                    }
                    Some(_) => return Err(LambdaTypeError::NotAFunction(fun.to_string())),
                    None => None,
                };
                let rest = Term::seq(a_tm, Term::Var(v.clone()));
                let tm = Term::seq(f_tm, Encoder::binder(v.as_str(), f_ty.as_ref(), rest));
                Ok((tm, result, eff))
            }
            LambdaTerm::Raise(e, payload) => {
                let b = self.sig.get(e).ok_or_else(|| LambdaTypeError::UnknownException(e.clone()))?;
                let (p_tm, p_ty, mut eff) = self.term(ctx, payload)?;
                meet(Some(b.clone()), p_ty, payload)?;
                eff.insert(e.clone(), b.clone());
                Ok((Encoder::raise(e, payload, p_tm), None, eff))
            }
            LambdaTerm::Handle(body, e, x, handler) => {
                let b = self.sig.get(e).ok_or_else(|| LambdaTypeError::UnknownException(e.clone()))?;
                let (m_tm, m_ty, mut eff) = self.term(ctx, body)?;
                eff.remove(e);
                let mut inner = ctx.clone();
                inner.insert(x.clone(), b.clone());
                let (n_tm, n_ty, n_eff) = self.term(&inner, handler)?;
                eff.extend(n_eff);
                let ty = meet(m_ty, n_ty, t)?;
                let tm = Term::join(m_tm, e.clone(), Encoder::binder(x, Some(b), n_tm));
                Ok((tm, ty, eff))
            }
        }
    }
}

/// Types `t` under `ctx`, with `sig` giving the payload type of each
/// exception, and returns the translation with every binder annotated,
/// the source type (base when unconstrained), and the exceptions it may
/// raise.
pub fn type_cbv(
    ctx: &BTreeMap<String, LambdaType>,
    t: &LambdaTerm,
    sig: &BTreeMap<Jump, LambdaType>,
) -> Result<(Term, LambdaType, BTreeMap<Jump, LambdaType>), LambdaTypeError> {
    let mut typing = Typing { sig, enc: Encoder::new(t) };
    let (tm, ty, eff) = typing.term(ctx, t)?;
    Ok((tm, ty.unwrap_or(LambdaType::Base), eff))
}

/// The annotated translation of a closed term together with the type it
/// should check at: `A_tm`, expanded by a summand per exception raised.
pub fn encode_cbv_typed(
    t: &LambdaTerm,
    sig: &BTreeMap<Jump, LambdaType>,
) -> Result<(Term, ValueType), LambdaTypeError> {
    let (tm, ty, eff) = type_cbv(&BTreeMap::new(), t, sig)?;
    Ok((tm, encode_cbv_term_type(&ty, &eff)))
}

#[derive(Debug, Clone)]
pub struct SimulationRow {
    pub rule: &'static str,
    pub left: Term,
    pub right: Term,
    /// Steps of the shortest reduction found from left to right.
    pub steps: Option<usize>,
    pub ty: ValueType,
    pub left_checks: bool,
    pub right_checks: bool,
}

impl SimulationRow {
    pub fn passes(&self) -> bool {
        self.steps.is_some() && (!self.left_checks || self.right_checks)
    }
}

const SIMULATION_FUEL: usize = 20;

fn shortest_reduction(from: &Term, to: &Term, max: usize) -> Option<usize> {
    let mut seen = HashSet::from([from.alpha_key()]);
    let mut queue = VecDeque::from([(from.clone(), 0)]);
    while let Some((t, d)) = queue.pop_front() {
        if alpha_eq(&t, to) {
            return Some(d);
        }
        if d == max {
            continue;
        }
        for r in reducts(&t) {
            if seen.insert(r.result.alpha_key()) {
                queue.push_back((r.result, d + 1));
            }
        }
    }
    None
}

/// The four exception rules of the source language, instantiated with
/// values `v : o -> o` and `w : o` and a handler body `n`, checked for
/// reduction to the translated right-hand side within 20 steps and for
/// preservation of the type.
pub fn check_ml_simulation() -> Vec<SimulationRow> {
    let o = "1 => 1.*";
    let oo = format!("({o}) => ({o}).*");
    let ctx: Context = [
        (Var::new("v"), parse_type(&oo).unwrap()),
        (Var::new("w"), parse_type(o).unwrap()),
        (Var::new("n"), parse_type(&format!("1 => ({oo}).*")).unwrap()),
    ]
    .into_iter()
    .collect();
    let rows = [
        ("V (raise (e W)) -> raise (e W)", "([v].*) ; <x>.([w].#e) ; x", "[w].#e", format!("1 => ({o}).* + ({o}).#e")),
        (
            "(raise (e V)) W -> raise (e V)",
            &format!("([v].#e) ; <x : ({o}) => ({o}).*>.([w].*) ; x"),
            "[v].#e",
            format!("1 => ({o}).* + ({oo}).#e"),
        ),
        ("V handle (e x) => N -> V", &format!("([v].*) ; #e -> <x : {o}>.n"), "[v].*", format!("1 => ({oo}).*")),
        ("raise (e V) handle (e x) => N -> {V/x}N", "([w].#e) ; #e -> <x>.[x].*", "[w].*", format!("1 => ({o}).*")),
    ];
    rows.iter()
        .map(|(rule, left, right, ty)| {
            let (left, right, ty) = (parse_term(left).unwrap(), parse_term(right).unwrap(), parse_type(ty).unwrap());
            SimulationRow {
                rule,
                steps: shortest_reduction(&left, &right, SIMULATION_FUEL),
                left_checks: check(&ctx, &left, &ty).is_ok(),
                right_checks: check(&ctx, &right, &ty).is_ok(),
                left,
                right,
                ty,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduce::normalize;
    use crate::types::check;

    fn l(s: &str) -> LambdaTerm {
        parse_lambda(s).unwrap()
    }

    fn p(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn parse_and_print() {
        for s in [
            "x",
            "\\x. x",
            "f x y",
            "f (g x)",
            "(\\x. x) (\\y. y)",
            "raise #e x",
            "m handle #e x => n",
            "raise #e f x handle #e y => y",
            "(raise #e x) y",
            "f (raise #e (\\x. x))",
            "\\x : o -> o. x",
            "\\x : (o -> o) -> o. x",
        ] {
            let t = l(s);
            assert_eq!(t.to_string(), s);
        }
        assert_eq!(l("f \\x. x"), LambdaTerm::app(LambdaTerm::var("f"), LambdaTerm::lam("x", LambdaTerm::var("x"))));
        assert!(parse_lambda("").is_err());
        assert!(parse_lambda("raise * x").is_err());
        assert!(parse_lambda("\\raise. x").is_err());
    }

    #[test]
    fn printed_terms_reparse() {
        let t = LambdaTerm::app(
            LambdaTerm::raise(Jump::named("e"), LambdaTerm::lam("x", LambdaTerm::var("x"))),
            LambdaTerm::handle(LambdaTerm::var("a"), Jump::named("e"), "y", LambdaTerm::var("y")),
        );
        assert_eq!(l(&t.to_string()), t);
    }

    #[test]
    fn type_translation() {
        let base = LambdaType::Base;
        assert_eq!(encode_cbv_type(&base).to_string(), "1 => 1.*");
        let arrow = LambdaType::arrow(base.clone(), base.clone());
        assert_eq!(encode_cbv_type(&arrow), parse_type("(1=>1.*) => (1=>1.*).*").unwrap());
        assert_eq!(encode_cbv_term_type(&base, &BTreeMap::new()), parse_type("1 => (1=>1.*).*").unwrap());
    }

    #[test]
    fn translations() {
        assert_eq!(encode_cbv(&l("x")), p("[x].*"));
        assert_eq!(encode_cbv(&l("\\x. x")), p("[<x>.[x].*].*"));
        let t = encode_cbv(&l("(\\x. x) (\\y. y)"));
        assert!(alpha_eq(&t, &p("([<x>.[x].*].*) ; <v0>.([<y>.[y].*].*) ; v0")));
        assert!(alpha_eq(normalize(&t, 100, 0).term(), &p("[<y>.[y].*].*")));

        let t = encode_cbv(&l("raise #e w handle #e x => x"));
        assert_eq!(t, p("([w].#e) ; #e -> <x>.[x].*"));
        assert_eq!(normalize(&t, 100, 0).normal_form(), Some(&p("[w].*")));

        assert_eq!(encode_cbv(&l("raise #e (f w)")), p("(([f].*) ; <v0>.([w].*) ; v0) ; #e"));
    }

    #[test]
    fn fresh_names_avoid_source_names() {
        let t = encode_cbv(&l("v0 v1"));
        assert_eq!(t, p("([v0].*) ; <v2>.([v1].*) ; v2"));
    }

    #[test]
    fn typed_translation_checks() {
        let oo = LambdaType::arrow(LambdaType::Base, LambdaType::Base);
        let sig: BTreeMap<Jump, LambdaType> = [(Jump::named("e"), oo)].into_iter().collect();
        for s in [
            "\\x : o. x",
            "(\\x : o -> o. x) (\\y : o. y)",
            "\\f : o -> o. \\x : o. f x",
            "(\\x : o -> o. x) ((\\y : o -> o. y) (\\z : o. z))",
            "(\\x : o -> o. x) (raise #e (\\y : o. y))",
            "(\\y : o. y) handle #e x => x",
            "raise #e (\\y : o. y) handle #e x => (\\z : o. z)",
        ] {
            let (tm, ty) = encode_cbv_typed(&l(s), &sig).unwrap();
            if let Err(e) = check(&Context::new(), &tm, &ty) {
                panic!("{s} encoded as {tm} does not check at {ty}: {e}");
            }
        }
        let (_, ty) = encode_cbv_typed(&l("raise #e (\\y : o. y)"), &sig).unwrap();
        assert_eq!(ty, parse_type("1 => (1 => 1.*).* + ((1 => 1.*) => (1 => 1.*).*).#e").unwrap());
        assert!(matches!(
            encode_cbv_typed(&l("(\\y : o. y) (\\z : o -> o. z)"), &sig),
            Err(LambdaTypeError::Mismatch { .. })
        ));
        assert!(matches!(encode_cbv_typed(&l("\\x. x"), &sig), Err(LambdaTypeError::MissingAnnotation(_))));
    }

    #[test]
    fn simulation_table() {
        let rows = check_ml_simulation();
        assert_eq!(rows.len(), 4);
        for r in &rows {
            assert!(r.steps.is_some(), "{}: {} does not reach {}", r.rule, r.left, r.right);
            assert!(r.left_checks && r.right_checks, "{}: types", r.rule);
            assert!(r.passes());
        }
    }
}
