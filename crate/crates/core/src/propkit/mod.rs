// SPDX-License-Identifier: Apache-2.0

//! Seeded term generation and the property campaigns run over it.

mod campaign;
mod gen;
mod shrink;

pub use campaign::{property_names, run_campaign, run_campaign_with, run_case, Case, Execution, Verdict};
pub use gen::{canonical_size, gen_raw, gen_typed, gen_typed_once, gen_value_type, WEIGHTS};
pub use shrink::shrink;

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::syntax::{Jump, Term, Var};
use crate::types::{Context, ValueType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("no term of type {0} found within the size budget")]
    GenerationExhausted(ValueType),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CampaignError {
    #[error("unknown property `{0}`; known: {list}", list = property_names().join(", "))]
    UnknownProperty(String),
    #[error(transparent)]
    Gen(#[from] GenError),
}

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub seed: u64,
    pub max_size: usize,
    pub closed: bool,
    pub loop_free: bool,
    pub jumps: Vec<Jump>,
    pub vars: Vec<Var>,
    /// Type-directed mode: generated terms check at the type under the
    /// context.
    pub typed: Option<(Context, ValueType)>,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            seed: 0,
            max_size: 30,
            closed: false,
            loop_free: false,
            jumps: vec![Jump::Skip, Jump::named("a"), Jump::named("b")],
            vars: ["x", "y", "z"].into_iter().map(Var::new).collect(),
            typed: None,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.max_size == 0 {
            return Err(GenError::InvalidConfig("max size must be at least 1"));
        }
        if self.jumps.is_empty() || self.vars.is_empty() {
            return Err(GenError::InvalidConfig("alphabets must be nonempty"));
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> GenConfig {
        GenConfig { seed, ..self.clone() }
    }

    /// One-line description, including the node weights.
    pub fn header(&self) -> String {
        let jumps: Vec<String> = self.jumps.iter().map(|j| j.to_string()).collect();
        let vars: Vec<&str> = self.vars.iter().map(|v| v.as_str()).collect();
        let weights: Vec<String> = WEIGHTS
            .iter()
            .map(|(n, w)| format!("{n}:{}", if *n == "loop" && self.loop_free { 0 } else { *w }))
            .collect();
        let typed = match &self.typed {
            Some((_, ty)) => format!(" target={ty}"),
            None => String::new(),
        };
        format!(
            "seed={} size={} closed={} loop_free={} jumps={} vars={} weights={}{typed}",
            self.seed,
            self.max_size,
            self.closed,
            self.loop_free,
            jumps.join(","),
            vars.join(","),
            weights.join(",")
        )
    }
}

/// Deterministic in `cfg.seed`. In typed mode the term checks at the
/// target; otherwise it respects the closed and loop-free flags.
pub fn gen_term(cfg: &GenConfig) -> Result<Term, GenError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match &cfg.typed {
        Some((ctx, ty)) => gen_typed(&mut rng, cfg, ctx, ty),
        None => Ok(gen_raw(&mut rng, cfg)),
    }
}

/// The seed of case `index` of a campaign seeded with `seed`.
pub fn case_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 over the pair
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub case: usize,
    /// Regenerates the case with [`run_case`].
    pub seed: u64,
    pub stack: Vec<Term>,
    pub term: Term,
    pub shrunk_stack: Vec<Term>,
    pub shrunk: Term,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyReport {
    pub property: String,
    pub header: String,
    pub cases: usize,
    pub passes: usize,
    pub inconclusive: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl PropertyReport {
    pub fn inconclusive_rate(&self) -> f64 {
        if self.cases == 0 {
            0.0
        } else {
            self.inconclusive as f64 / self.cases as f64
        }
    }

    /// A single line of space-separated `key=value` pairs: `property`,
    /// `cases`, `passes`, `inconclusive`, `counterexamples` and
    /// `inconclusive_rate` (four decimals).
    pub fn summary(&self) -> String {
        format!(
            "property={} cases={} passes={} inconclusive={} counterexamples={} inconclusive_rate={:.4}",
            self.property,
            self.cases,
            self.passes,
            self.inconclusive,
            self.counterexamples.len(),
            self.inconclusive_rate()
        )
    }
}

fn stack_text(s: &[Term]) -> String {
    s.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "property: {}", self.property)?;
        writeln!(f, "generator: {}", self.header)?;
        writeln!(f, "cases: {}", self.cases)?;
        writeln!(f, "passes: {}", self.passes)?;
        writeln!(f, "inconclusive: {}", self.inconclusive)?;
        writeln!(f, "counterexamples: {}", self.counterexamples.len())?;
        for c in &self.counterexamples {
            writeln!(f, "counterexample case={} seed={}", c.case, c.seed)?;
            if !c.stack.is_empty() {
                writeln!(f, "  stack: {}", stack_text(&c.stack))?;
            }
            writeln!(f, "  term: {}", c.term)?;
            if !c.shrunk_stack.is_empty() {
                writeln!(f, "  shrunk stack: {}", stack_text(&c.shrunk_stack))?;
            }
            writeln!(f, "  shrunk: {}", c.shrunk)?;
            writeln!(f, "  detail: {}", c.detail)?;
        }
        Ok(())
    }
}
