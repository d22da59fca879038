// SPDX-License-Identifier: Apache-2.0

//! Syntax and rewriting invariants over terms drawn by proptest's own
//! recursive strategy, independent of the propkit generator.

use fmc::reduce::{contract_at, is_normal, redex_positions, reducts};
use fmc::syntax::{alpha_eq, parse_term, substitute, Jump, Term, Var};
use proptest::prelude::*;

fn jump() -> impl Strategy<Value = Jump> {
    prop_oneof![Just(Jump::Skip), Just(Jump::named("a")), Just(Jump::named("b"))]
}

fn var() -> impl Strategy<Value = Var> {
    prop_oneof![Just(Var::new("x")), Just(Var::new("y")), Just(Var::new("z"))]
}

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![var().prop_map(|x| Term::var(x.as_str())), jump().prop_map(Term::jump)];
    leaf.prop_recursive(6, 40, 2, |t| {
        prop_oneof![
            (t.clone(), t.clone()).prop_map(|(a, b)| Term::push(a, b)),
            (var(), t.clone()).prop_map(|(x, b)| Term::pop(x, b)),
            (t.clone(), jump(), t.clone()).prop_map(|(m, j, n)| Term::join(m, j, n)),
            (t.clone(), jump()).prop_map(|(m, j)| Term::looped(m, j)),
        ]
    })
}

proptest! {
    #[test]
    fn print_then_parse(t in term()) {
        let back = parse_term(&t.to_string()).unwrap();
        prop_assert!(alpha_eq(&back, &t));
        prop_assert_eq!(back.to_string(), t.to_string());
    }

    #[test]
    fn normal_iff_no_reducts(t in term()) {
        prop_assert_eq!(is_normal(&t), reducts(&t).is_empty());
    }

    #[test]
    fn every_position_contracts(t in term()) {
        let positions = redex_positions(&t);
        prop_assert_eq!(positions.len(), reducts(&t).len());
        for (p, rule) in positions {
            let (r, _) = contract_at(&t, &p).unwrap();
            prop_assert_eq!(r, rule);
        }
    }

    #[test]
    fn alpha_key_matches_alpha_eq(a in term(), b in term()) {
        prop_assert_eq!(alpha_eq(&a, &b), a.alpha_key() == b.alpha_key());
        prop_assert!(alpha_eq(&a, &a.clone()));
    }

    #[test]
    fn substitution_removes_the_variable(t in term(), x in var()) {
        let r = substitute(&Term::skip(), &x, &t);
        prop_assert!(!r.has_free(&x));
        prop_assert!(r.free_vars().is_subset(&t.free_vars()));
    }
}
