// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fmc::encode::{encode_cbv, encode_cbv_typed, parse_lambda, parse_lambda_type};
use fmc::machine::{run, MachineState, Outcome};
use fmc::propkit::{run_campaign_with, Execution, GenConfig};
use fmc::reduce::{format_position, normalize_traced, NormalizeResult};
use fmc::syntax::{parse_term, parse_type, Jump, Term, Var};
use fmc::types::{check, infer, Context};

const GRAMMARS: &str = "\
INPUT is the source text itself, `-` to read standard input, or `@path` to read a file.

Terms:
  term    := join
  join    := unit { \";\" ( jump \"->\" unit | unit ) }      M ; N abbreviates M ; * -> N
  unit    := \"[\" term \"]\" \".\" term                      push
           | \"<\" var [ \":\" vtype ] \">\" \".\" term         pop, optionally annotated
           | postfix
  postfix := atom { \"^\" jump }                          loop
  atom    := var | jump | \"(\" term \")\"
  jump    := \"*\" | \"#\" ident
  var     := [a-z][A-Za-z0-9_]*
  `^` binds tightest, prefix bodies extend as far right as possible, `;` is left-associative.

Types:
  vtype   := vector \"=>\" choice
  choice  := vector \".\" jump { \"+\" vector \".\" jump }
  vector  := \"1\" | ( \"(\" vtype \")\" )+
  Input vectors are written top of stack first, output vectors bottom first.

Lambda terms (encode --from cbv):
  expr    := \"\\\" var [ \":\" ltype ] \".\" expr | app [ \"handle\" jump var \"=>\" expr ]
  app     := operand { operand }
  operand := var | \"(\" expr \")\" | \"raise\" jump app
  ltype   := \"o\" [ \"->\" ltype ] | \"(\" ltype \")\" [ \"->\" ltype ]

Lists:
  --stack    \"T1,T2,...\" argument stack entries, bottom first
  --context  \"x:T,y:U\" variable types
  --exception \"#e:ltype\" payload type of an exception, repeatable

Exit codes:
  0 success, 1 property violation, failed check or stuck machine, 2 usage or parse error,
  3 fuel or unroll budget exhausted";

#[derive(Parser)]
#[command(name = "fmc", version, about = "Terms, reduction, machine, types and encodings of the functional machine calculus with choice", after_long_help = GRAMMARS)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Normalize a term, outermost-leftmost.
    #[command(after_long_help = GRAMMARS)]
    Reduce {
        input: String,
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
        /// Times each loop may be unrolled.
        #[arg(long, default_value_t = 8)]
        unroll: usize,
        /// Print every step with its rule and position.
        #[arg(long)]
        trace: bool,
    },
    /// Run a term on the abstract machine.
    #[command(after_long_help = GRAMMARS)]
    Run {
        input: String,
        /// Initial argument stack, comma separated, bottom first.
        #[arg(long)]
        stack: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
        /// Print every machine state.
        #[arg(long)]
        trace: bool,
    },
    /// Check a term at a type, or infer its least type.
    #[command(after_long_help = GRAMMARS)]
    Check {
        input: String,
        #[arg(long = "type")]
        ty: Option<String>,
        /// Variable types, `x:T` comma separated.
        #[arg(long)]
        context: Option<String>,
    },
    /// Translate a lambda term with exceptions.
    #[command(after_long_help = GRAMMARS)]
    Encode {
        input: String,
        #[arg(long, value_enum, default_value_t = Source::Cbv)]
        from: Source,
        /// Type the source and print the annotated translation and its type.
        #[arg(long)]
        types: bool,
        /// `#e:ltype`, the payload type of an exception.
        #[arg(long = "exception")]
        exceptions: Vec<String>,
    },
    /// Run a property campaign.
    Fuzz {
        property: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
        #[arg(long, default_value_t = 30)]
        size: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Check cases one after another.
        #[arg(long)]
        serial: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    Cbv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Summary,
}

const OK: u8 = 0;
const FAIL: u8 = 1;
const USAGE: u8 = 2;
const FUEL: u8 = 3;

struct Failure(u8, String);

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure(USAGE, e.to_string())
}

fn source(input: &str) -> Result<String, Failure> {
    if input == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(usage)?;
        Ok(s)
    } else if let Some(path) = input.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))
    } else {
        Ok(input.to_string())
    }
}

fn term(input: &str) -> Result<Term, Failure> {
    parse_term(&source(input)?).map_err(usage)
}

fn entries(list: &str) -> impl Iterator<Item = &str> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn context(list: Option<&str>) -> Result<Context, Failure> {
    let mut ctx = Context::new();
    for entry in entries(list.unwrap_or("")) {
        let (x, ty) = entry.split_once(':').ok_or_else(|| usage(format!("context entry `{entry}` is not `x:T`")))?;
        let x = x.trim();
        if !Var::is_valid_name(x) {
            return Err(usage(format!("`{x}` is not a variable name")));
        }
        ctx.insert(Var::new(x), parse_type(ty).map_err(usage)?);
    }
    Ok(ctx)
}

fn exceptions(list: &[String]) -> Result<BTreeMap<Jump, fmc::encode::LambdaType>, Failure> {
    let mut sig = BTreeMap::new();
    for entry in list {
        let (j, ty) = entry.split_once(':').ok_or_else(|| usage(format!("exception `{entry}` is not `#e:ltype`")))?;
        let Term::Jump(j) = parse_term(j).map_err(usage)? else {
            return Err(usage(format!("`{j}` is not a jump")));
        };
        sig.insert(j, parse_lambda_type(ty).map_err(usage)?);
    }
    Ok(sig)
}

fn stack_text(args: &[Term]) -> String {
    args.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")
}

fn reduce(input: &str, fuel: usize, unroll: usize, trace: bool) -> Result<u8, Failure> {
    let t = term(input)?;
    let mut n = 0;
    let r = normalize_traced(&t, fuel, unroll, |rule, pos, next| {
        if trace {
            n += 1;
            println!("{n}: {rule} at {}: {next}", format_position(pos));
        }
    });
    println!("{}", r.term());
    match r {
        NormalizeResult::Normal { .. } => Ok(OK),
        NormalizeResult::FuelExhausted { steps, .. } => {
            Err(Failure(FUEL, format!("fuel exhausted after {steps} steps; the last term is printed")))
        }
        NormalizeResult::UnrollLimit { steps, .. } => Err(Failure(
            FUEL,
            format!("unroll budget spent after {steps} steps; only loops remain to unroll"),
        )),
    }
}

fn run_machine(input: &str, stack: Option<&str>, fuel: usize, trace: bool) -> Result<u8, Failure> {
    let t = term(input)?;
    let args = entries(stack.unwrap_or("")).map(|s| parse_term(s).map_err(usage)).collect::<Result<Vec<_>, _>>()?;
    let r = run(MachineState::with_args(args, t), fuel, trace);
    for (i, s) in r.trace.iter().flatten().enumerate() {
        println!("{i}: {s}");
    }
    match r.outcome {
        Outcome::Complete { args, jump } => {
            println!("jump: {jump}");
            println!("stack: {}", stack_text(&args));
            Ok(OK)
        }
        Outcome::Stuck { state, reason } => {
            println!("stuck: {reason}");
            println!("state: {state}");
            Ok(FAIL)
        }
        Outcome::OutOfFuel { state } => {
            println!("state: {state}");
            Err(Failure(FUEL, format!("out of fuel after {} steps", r.steps)))
        }
    }
}

fn check_cmd(input: &str, ty: Option<&str>, ctx: Option<&str>) -> Result<u8, Failure> {
    let t = term(input)?;
    let ctx = context(ctx)?;
    match ty {
        Some(ty) => {
            let ty = parse_type(ty).map_err(usage)?;
            match check(&ctx, &t, &ty) {
                Ok(d) => {
                    print!("{}", d.outline());
                    Ok(OK)
                }
                Err(e) => Err(Failure(FAIL, e.to_string())),
            }
        }
        None => match infer(&ctx, &t) {
            Ok(ty) => {
                println!("{ty}");
                Ok(OK)
            }
            Err(e) => Err(Failure(FAIL, e.to_string())),
        },
    }
}

fn encode(input: &str, types: bool, sig: &[String]) -> Result<u8, Failure> {
    let src = parse_lambda(&source(input)?).map_err(usage)?;
    if types {
        let (tm, ty) = encode_cbv_typed(&src, &exceptions(sig)?).map_err(|e| Failure(FAIL, e.to_string()))?;
        println!("{tm}");
        println!("type: {ty}");
    } else {
        println!("{}", encode_cbv(&src));
    }
    Ok(OK)
}

fn fuzz(property: &str, seed: u64, cases: usize, fuel: usize, size: usize, format: Format, serial: bool) -> Result<u8, Failure> {
    let cfg = GenConfig { seed, max_size: size, ..GenConfig::default() };
    let exec = if serial { Execution::Serial } else { Execution::default() };
    let report = run_campaign_with(property, &cfg, cases, fuel, exec).map_err(usage)?;
    match format {
        Format::Text => print!("{report}"),
        Format::Summary => println!("{}", report.summary()),
    }
    Ok(if report.counterexamples.is_empty() { OK } else { FAIL })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match &cli.cmd {
        Cmd::Reduce { input, fuel, unroll, trace } => reduce(input, *fuel, *unroll, *trace),
        Cmd::Run { input, stack, fuel, trace } => run_machine(input, stack.as_deref(), *fuel, *trace),
        Cmd::Check { input, ty, context } => check_cmd(input, ty.as_deref(), context.as_deref()),
        Cmd::Encode { input, from: Source::Cbv, types, exceptions } => encode(input, *types, exceptions),
        Cmd::Fuzz { property, seed, cases, fuel, size, format, serial } => {
            fuzz(property, *seed, *cases, *fuel, *size, *format, *serial)
        }
    };
    match r {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
