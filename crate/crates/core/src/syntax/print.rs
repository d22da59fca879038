// SPDX-License-Identifier: Apache-2.0

use std::fmt::{self, Write};

use super::Term;

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_term(self, true, &mut s);
        f.write_str(&s)
    }
}

/// `tail` is set when nothing follows the term within its enclosing
/// bracket, so a prefix action may extend to the end without parentheses.
fn write_term(t: &Term, tail: bool, out: &mut String) {
    match t {
        Term::Var(x) => out.push_str(x.as_str()),
        Term::Jump(j) => write!(out, "{j}").unwrap(),
        Term::Loop(body, j) => {
            match **body {
                Term::Var(_) | Term::Jump(_) | Term::Loop(..) => write_term(body, false, out),
                _ => {
                    out.push('(');
                    write_term(body, true, out);
                    out.push(')');
                }
            }
            write!(out, " ^ {j}").unwrap();
        }
        Term::Push(..) | Term::Pop(..) if !tail => {
            out.push('(');
            write_term(t, true, out);
            out.push(')');
        }
        Term::Push(arg, body) => {
            out.push('[');
            write_term(arg, true, out);
            out.push_str("].");
            write_term(body, true, out);
        }
        Term::Pop(x, ann, body) => {
            match ann {
                Some(ty) => write!(out, "<{x} : {ty}>.").unwrap(),
                None => write!(out, "<{x}>.").unwrap(),
            }
            write_term(body, true, out);
        }
        Term::Join(scrutinee, j, handler) => {
            write_term(scrutinee, false, out);
            if j.is_skip() {
                out.push_str(" ; ");
            } else {
                write!(out, " ; {j} -> ").unwrap();
            }
            if let Term::Join(..) = **handler {
                out.push('(');
                write_term(handler, true, out);
                out.push(')');
            } else {
                write_term(handler, tail, out);
            }
        }
    }
}
