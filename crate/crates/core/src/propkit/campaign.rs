// SPDX-License-Identifier: Apache-2.0

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::gen::{gen_raw, gen_typed, gen_value_type};
use super::{case_seed, shrink, CampaignError, Counterexample, GenConfig, GenError, PropertyReport};
use crate::machine::{check_agreement, check_commutation, run, Agreement, Commutation, MachineState, Outcome};
use crate::reduce::{is_normal, joinable_by_rules, joinable_within, normalize, reducts, Joinability, NormalizeResult};
use crate::syntax::{alpha_eq, parse_term, Term};
use crate::types::{check, check_stack, check_subject_reduction, Context, ValueType};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Property {
    NormalForms,
    Roundtrip,
    Confluence,
    Agreement,
    Commutation,
    SubjectReduction,
    Termination,
    SnLoopFree,
}

const PROPERTIES: [(&str, Property); 8] = [
    ("normal-forms", Property::NormalForms),
    ("roundtrip", Property::Roundtrip),
    ("confluence", Property::Confluence),
    ("agreement", Property::Agreement),
    ("commutation", Property::Commutation),
    ("subject-reduction", Property::SubjectReduction),
    ("termination", Property::Termination),
    ("sn-loop-free", Property::SnLoopFree),
];

pub fn property_names() -> Vec<&'static str> {
    PROPERTIES.iter().map(|(n, _)| *n).collect()
}

fn property(name: &str) -> Result<Property, CampaignError> {
    PROPERTIES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, p)| *p)
        .ok_or_else(|| CampaignError::UnknownProperty(name.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    /// Falls back to serial without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Execution {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Serial
        }
    }
}

/// One generated input: a term, an initial stack (empty for most
/// properties), and the typing it was generated at, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub stack: Vec<Term>,
    pub term: Term,
    pub ctx: Context,
    pub ty: Option<ValueType>,
    pub seed: u64,
}

impl Case {
    pub fn size(&self) -> usize {
        self.term.size() + self.stack.iter().map(Term::size).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Inconclusive(String),
    Fail(String),
}

/// Stack entries in commutation cases are kept small.
const STACK_ENTRY_SIZE: usize = 8;
/// Pre-reduction steps in commutation cases.
const PRE_STEPS: usize = 3;
/// Unroll budget and search limit when joining a peak.
const PEAK_UNROLL: usize = 2;
const PEAK_SEARCH: usize = 400;
/// Steps by the peak's own rules only branch less, so they go further.
const RESIDUAL_SEARCH: usize = 5000;
/// Random targets tried before a typed case is given up.
const TARGET_TRIES: usize = 10;

fn typed_case(cfg: &GenConfig, rng: &mut ChaCha8Rng, seed: u64, closed_input: bool) -> Result<Case, GenError> {
    let mut last = None;
    for _ in 0..TARGET_TRIES {
        let (ctx, ty) = match &cfg.typed {
            Some((ctx, ty)) => (ctx.clone(), ty.clone()),
            None => (Context::new(), gen_value_type(rng, &cfg.jumps, 2)),
        };
        let attempt = (|| {
            let term = gen_typed(rng, cfg, &ctx, &ty)?;
            let mut stack = Vec::new();
            if closed_input {
                let entry_cfg = GenConfig { max_size: cfg.max_size.min(STACK_ENTRY_SIZE), ..cfg.clone() };
                for r in &ty.input.0 {
                    stack.push(gen_typed(rng, &entry_cfg, &ctx, r)?);
                }
            }
            Ok(Case { stack, term, ctx: ctx.clone(), ty: Some(ty.clone()), seed })
        })();
        match attempt {
            Ok(c) => return Ok(c),
            Err(e) if cfg.typed.is_none() => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

fn generate(p: Property, cfg: &GenConfig, seed: u64) -> Result<Case, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = |cfg: &GenConfig, rng: &mut ChaCha8Rng| Case {
        stack: vec![],
        term: gen_raw(rng, cfg),
        ctx: Context::new(),
        ty: None,
        seed,
    };
    match p {
        Property::NormalForms | Property::Roundtrip | Property::Confluence => Ok(raw(cfg, &mut rng)),
        Property::Agreement => Ok(raw(&GenConfig { closed: true, ..cfg.clone() }, &mut rng)),
        Property::Commutation => {
            let closed = GenConfig { closed: true, ..cfg.clone() };
            let mut case = raw(&closed, &mut rng);
            let entry_cfg = GenConfig { max_size: cfg.max_size.min(STACK_ENTRY_SIZE), ..closed };
            for _ in 0..rng.gen_range(0..=2) {
                case.stack.push(gen_raw(&mut rng, &entry_cfg));
            }
            Ok(case)
        }
        Property::SubjectReduction => typed_case(cfg, &mut rng, seed, false),
        Property::Termination | Property::SnLoopFree => {
            typed_case(&GenConfig { loop_free: true, ..cfg.clone() }, &mut rng, seed, true)
        }
    }
}

fn precondition(p: Property, c: &Case) -> bool {
    let closed = || c.term.is_closed() && c.stack.iter().all(Term::is_closed);
    let typed = || match &c.ty {
        Some(ty) => check(&c.ctx, &c.term, ty).is_ok(),
        None => false,
    };
    match p {
        Property::NormalForms | Property::Roundtrip | Property::Confluence => true,
        Property::Agreement | Property::Commutation => closed(),
        Property::SubjectReduction => typed(),
        Property::Termination | Property::SnLoopFree => {
            let ty = c.ty.as_ref().unwrap();
            typed()
                && !c.term.contains_loop()
                && check_stack(&c.ctx, &c.stack, &ty.input).is_ok()
        }
    }
}

fn confluence(t: &Term, fuel: usize) -> Verdict {
    let rs = reducts(t);
    if rs.len() < 2 {
        return Verdict::Pass;
    }
    let ends: Vec<NormalizeResult> = rs.iter().map(|r| normalize(&r.result, fuel, PEAK_UNROLL)).collect();
    let mut inconclusive = None;
    for i in 0..rs.len() {
        for k in i + 1..rs.len() {
            if alpha_eq(ends[i].term(), ends[k].term()) {
                continue;
            }
            let (a, b) = (&rs[i], &rs[k]);
            if let (Some(x), Some(y)) = (ends[i].normal_form(), ends[k].normal_form()) {
                return Verdict::Fail(format!(
                    "peak {} at {:?} / {} at {:?} reaches distinct normal forms {x} and {y}",
                    a.rule, a.position, b.rule, b.position
                ));
            }
            if joinable_by_rules(&a.result, &b.result, &[a.rule, b.rule], RESIDUAL_SEARCH) == Joinability::Joined {
                continue;
            }
            match joinable_within(&a.result, &b.result, PEAK_SEARCH) {
                Joinability::Joined => {}
                Joinability::Disjoint => {
                    return Verdict::Fail(format!(
                        "peak {} at {:?} / {} at {:?} has no common reduct",
                        a.rule, a.position, b.rule, b.position
                    ))
                }
                Joinability::Unknown => {
                    inconclusive = Some(format!("peak {} / {} not joined within the search bound", a.rule, b.rule))
                }
            }
        }
    }
    inconclusive.map_or(Verdict::Pass, Verdict::Inconclusive)
}

fn termination(c: &Case, fuel: usize) -> Verdict {
    let ty = c.ty.as_ref().unwrap();
    let r = run(MachineState::with_args(c.stack.clone(), c.term.clone()), fuel, false);
    match r.outcome {
        Outcome::Complete { args, jump } => match ty.output.get(&jump) {
            None => Verdict::Fail(format!("completes with {jump}, outside the output summands of {ty}")),
            Some(v) => match check_stack(&c.ctx, &args, v) {
                Ok(_) => Verdict::Pass,
                Err(e) => Verdict::Fail(format!("result stack does not check at {v}: {e}")),
            },
        },
        Outcome::Stuck { reason, .. } => Verdict::Fail(format!("machine stuck: {reason}")),
        Outcome::OutOfFuel { .. } => Verdict::Inconclusive(format!("machine out of fuel after {fuel} steps")),
    }
}

fn strong_normalization(c: &Case, fuel: usize, rng: &mut ChaCha8Rng) -> Verdict {
    match normalize(&c.term, fuel, 0) {
        NormalizeResult::Normal { .. } => {}
        _ => return Verdict::Inconclusive(format!("normalization out of fuel after {fuel} steps")),
    }
    // one random reduction path as well
    let mut t = c.term.clone();
    for _ in 0..fuel {
        let mut rs = reducts(&t);
        if rs.is_empty() {
            return Verdict::Pass;
        }
        let k = rng.gen_range(0..rs.len());
        t = rs.swap_remove(k).result;
    }
    Verdict::Inconclusive(format!("random reduction path longer than {fuel} steps"))
}

fn check_case(p: Property, c: &Case, fuel: usize) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed ^ 0x5EED);
    match p {
        Property::NormalForms => {
            let normal = is_normal(&c.term);
            let irreducible = reducts(&c.term).is_empty();
            if normal == irreducible {
                Verdict::Pass
            } else {
                Verdict::Fail(format!("grammar says normal={normal}, reducts say irreducible={irreducible}"))
            }
        }
        Property::Roundtrip => {
            let printed = c.term.to_string();
            match parse_term(&printed) {
                Ok(back) if alpha_eq(&back, &c.term) => Verdict::Pass,
                Ok(back) => Verdict::Fail(format!("printed as {printed}, read back as {back:?}")),
                Err(e) => Verdict::Fail(format!("printed as {printed}, which does not parse: {e}")),
            }
        }
        Property::Confluence => confluence(&c.term, fuel),
        Property::Agreement => match check_agreement(&c.term, fuel) {
            Agreement::Agree { .. } | Agreement::NeitherCompletes => Verdict::Pass,
            Agreement::Inconclusive(d) => Verdict::Inconclusive(d),
            Agreement::Disagree(d) => Verdict::Fail(d),
        },
        Property::Commutation => match check_commutation(&c.stack, &c.term, fuel, PRE_STEPS, &mut rng) {
            Commutation::Holds | Commutation::Vacuous => Verdict::Pass,
            Commutation::Inconclusive(d) => Verdict::Inconclusive(d),
            Commutation::Violation(d) => Verdict::Fail(d),
        },
        Property::SubjectReduction => {
            let report = check_subject_reduction(&c.ctx, &c.term, c.ty.as_ref().unwrap(), fuel);
            match report.violations.first() {
                None => Verdict::Pass,
                Some((rule, pos, reduct, e)) => {
                    Verdict::Fail(format!("{rule} at {pos:?} gives {reduct}, which does not check: {e}"))
                }
            }
        }
        Property::Termination => termination(c, fuel),
        Property::SnLoopFree => strong_normalization(c, fuel, &mut rng),
    }
}

/// Regenerates case `index` of a campaign and checks it.
pub fn run_case(property: &str, cfg: &GenConfig, index: usize, fuel: usize) -> Result<(Case, Verdict), CampaignError> {
    let p = property_of(property, cfg)?;
    let seed = case_seed(cfg.seed, index as u64);
    let case = generate(p, cfg, seed)?;
    let v = deep_stack(|| check_case(p, &case, fuel));
    Ok((case, v))
}

fn property_of(name: &str, cfg: &GenConfig) -> Result<Property, CampaignError> {
    let p = property(name)?;
    cfg.validate()?;
    Ok(p)
}

enum Outcome1 {
    Pass,
    Inconclusive,
    Fail(Box<Counterexample>),
}

fn one(p: Property, cfg: &GenConfig, index: usize, fuel: usize) -> Outcome1 {
    let seed = case_seed(cfg.seed, index as u64);
    let case = match generate(p, cfg, seed) {
        Ok(c) => c,
        Err(_) => return Outcome1::Inconclusive,
    };
    match check_case(p, &case, fuel) {
        Verdict::Pass => Outcome1::Pass,
        Verdict::Inconclusive(_) => Outcome1::Inconclusive,
        Verdict::Fail(detail) => {
            let fails = |c: &Case| matches!(check_case(p, c, fuel), Verdict::Fail(_));
            let small = shrink(&case, |c| precondition(p, c) && fails(c));
            Outcome1::Fail(Box::new(Counterexample {
                case: index,
                seed,
                stack: case.stack,
                term: case.term,
                shrunk_stack: small.stack,
                shrunk: small.term,
                detail,
            }))
        }
    }
}

/// Terms up to the size limit are this deep at worst, and every pass over
/// them recurses.
const CASE_STACK: usize = 256 << 20;

fn deep_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| {
        std::thread::Builder::new().stack_size(CASE_STACK).spawn_scoped(s, f).expect("thread").join().unwrap()
    })
}

pub fn run_campaign(property: &str, cfg: &GenConfig, cases: usize, fuel: usize) -> Result<PropertyReport, CampaignError> {
    run_campaign_with(property, cfg, cases, fuel, Execution::default())
}

pub fn run_campaign_with(
    property: &str,
    cfg: &GenConfig,
    cases: usize,
    fuel: usize,
    exec: Execution,
) -> Result<PropertyReport, CampaignError> {
    let p = property_of(property, cfg)?;
    let outcomes: Vec<Outcome1> = match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => rayon::ThreadPoolBuilder::new()
            .stack_size(CASE_STACK)
            .build()
            .expect("thread pool")
            .install(|| (0..cases).into_par_iter().map(|i| one(p, cfg, i, fuel)).collect()),
        _ => deep_stack(|| (0..cases).map(|i| one(p, cfg, i, fuel)).collect()),
    };
    let mut report = PropertyReport {
        property: property.to_string(),
        header: cfg.header(),
        cases,
        passes: 0,
        inconclusive: 0,
        counterexamples: vec![],
    };
    for o in outcomes {
        match o {
            Outcome1::Pass => report.passes += 1,
            Outcome1::Inconclusive => report.inconclusive += 1,
            Outcome1::Fail(c) => report.counterexamples.push(*c),
        }
    }
    report.counterexamples.sort_by_key(|c| c.case);
    Ok(report)
}
