// SPDX-License-Identifier: Apache-2.0

//! Control structures as term builders, and the call-by-value translation
//! of lambda terms with exceptions.

mod cbv;

pub use cbv::{
    check_ml_simulation, encode_cbv, encode_cbv_term_type, encode_cbv_type, encode_cbv_typed, parse_lambda,
    parse_lambda_type, type_cbv, LambdaTerm, LambdaType, LambdaTypeError, SimulationRow,
};

use thiserror::Error;

use crate::syntax::{Jump, Term};

/// Booleans are the jumps `#tt` and `#ff`.
pub fn tt() -> Jump {
    Jump::named("tt")
}

pub fn ff() -> Jump {
    Jump::named("ff")
}

/// `b ; #tt -> m ; #ff -> n`
pub fn encode_if(b: Term, m: Term, n: Term) -> Term {
    Term::join(Term::join(b, tt(), m), ff(), n)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("case {0} appears more than once")]
    DuplicateCase(Jump),
}

/// `m ; j1 -> n1 ... ; jk -> nk`, nested to the left.
pub fn encode_switch(scrutinee: Term, cases: Vec<(Jump, Term)>) -> Result<Term, EncodeError> {
    let mut seen = std::collections::BTreeSet::new();
    let mut t = scrutinee;
    for (j, body) in cases {
        if !seen.insert(j.clone()) {
            return Err(EncodeError::DuplicateCase(j));
        }
        t = Term::join(t, j, body);
    }
    Ok(t)
}

/// `(body ; cond) ^ #tt ; #ff -> *`
pub fn encode_do_while(body: Term, cond: Term) -> Term {
    Term::join(Term::looped(Term::seq(body, cond), tt()), ff(), Term::skip())
}
