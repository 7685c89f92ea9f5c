//! Constraint generation: a structural pass over typing derivations that
//! emits the wanted constraint a declaration must discharge.

use crate::ast::CList;
use crate::constraint::{Mult, Simple};
use crate::solver;
use crate::typing::{atom_of_catom, DNode, Derivation};
use crate::wanted::Wanted;

/// The simple constraint denoted by a resolved surface constraint list.
pub fn clist_to_simple(cs: &CList) -> Simple {
    Simple::from_atoms(cs.iter().map(atom_of_catom))
}

/// Generate the wanted constraint of a derivation.
pub fn generate(d: &Derivation) -> Wanted {
    match &d.node {
        DNode::Var { constraint, .. } => {
            Wanted::Simple(clist_to_simple(constraint), d.span.clone())
        }
        DNode::CtorRef { .. } | DNode::IntLit(_) | DNode::StrLit(_) => {
            Wanted::Simple(Simple::empty(), d.span.clone())
        }
        DNode::Lambda { body, .. } => generate(body),
        DNode::App { mult, func, arg } => {
            Wanted::tensor(generate(func), generate(arg).scale(*mult))
        }
        DNode::Pack { constraint, payload } => Wanted::tensor(
            generate(payload),
            Wanted::Simple(clist_to_simple(constraint), d.span.clone()),
        ),
        DNode::Unpack { given, rhs, body, .. } => Wanted::tensor(
            generate(rhs),
            Wanted::Impl {
                mult: Mult::One,
                given: clist_to_simple(given),
                body: Box::new(generate(body)),
                span: d.span.clone(),
            },
        ),
        DNode::Case { mult, scrut, alts } => {
            let mut branches = alts.iter().rev().map(|a| generate(&a.body));
            let last = branches.next().expect("case has at least one branch");
            let folded = branches.fold(last, |acc, c| Wanted::with(c, acc));
            Wanted::tensor(generate(scrut).scale(*mult), folded)
        }
        DNode::Let { mult, given, rhs, body, .. } => {
            if given.is_empty() {
                Wanted::tensor(generate(rhs).scale(*mult), generate(body))
            } else {
                Wanted::tensor(
                    generate(body),
                    Wanted::Impl {
                        mult: *mult,
                        given: clist_to_simple(given),
                        body: Box::new(generate(rhs)),
                        span: d.span.clone(),
                    }
                    .scale(Mult::One),
                )
            }
        }
        DNode::QualAbs { given, body } => Wanted::Impl {
            mult: Mult::One,
            given: clist_to_simple(given),
            body: Box::new(generate(body)),
            span: d.span.clone(),
        },
    }
}

/// The demand a derivation places on its environment: its generated
/// constraint, solved. Accepted programs never fail here.
pub fn demand(
    d: &Derivation,
    duplicable: &crate::constraint::DuplicableSet,
) -> Result<Simple, solver::Failure> {
    match solver::solve(&generate(d), duplicable) {
        solver::Outcome::Solved(q) => Ok(q),
        solver::Outcome::Failed(f) => Err(f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::Program;
    use crate::constraint::{Atom, DuplicableSet};
    use crate::parser::parse_program;
    use crate::solver::{check_top_level, solve, Outcome};
    use crate::typing::{check_program, GlobalEnv};

    const ARRAY_SIG: &str = "class Read n\nclass Write n\n\
        constraint RW n = (Read n, Write n)\n\
        free :: forall a n. RW n =o UArray a n -> ()\n\
        konst :: forall a b. a -o b -> a\n";

    fn gen_for(src: &str, name: &str) -> (Wanted, Simple, DuplicableSet) {
        let full = format!("{ARRAY_SIG}{src}");
        let prog = parse_program("t.lq", &full).expect("parse");
        let empty = Program::default();
        let env = GlobalEnv::build(&empty, &prog).expect("env");
        let derivs = check_program(&env, &prog).expect("typecheck");
        let (_, deriv) = derivs.iter().find(|(n, _)| n == name).expect("decl");
        let decl = prog.values.iter().find(|v| v.name == name).unwrap();
        let scheme = env.resolve_scheme(&decl.scheme, &decl.span).unwrap();
        let given = clist_to_simple(&scheme.constraint);
        (generate(deriv), given, env.duplicable.clone())
    }

    fn rw(n: &str) -> Simple {
        Simple::from_atoms([
            (Mult::One, Atom::rigid1("Read", n)),
            (Mult::One, Atom::rigid1("Write", n)),
        ])
    }

    #[test]
    fn identity_generates_nothing() {
        let (w, _, d) = gen_for("id :: forall a. a -o a\nid = \\x -> x\n", "id");
        assert_eq!(solve(&w, &d), Outcome::Solved(Simple::empty()));
    }

    #[test]
    fn free_generates_read_write() {
        let (w, given, d) = gen_for(
            "noJoy :: forall a n. RW n =o UArray a n -> ()\nnoJoy arr = free arr\n",
            "noJoy",
        );
        assert_eq!(solve(&w, &d), Outcome::Solved(rw("n")));
        assert_eq!(given, rw("n"));
        check_top_level(&given, &w, &d, &crate::span::Span::synthetic()).unwrap();
    }

    #[test]
    fn dithering_is_rejected() {
        // One branch frees, the other does not: the branches' meet leaves
        // the capability unrestricted, which the linear given cannot supply.
        let (w, given, d) = gen_for(
            "dithering :: forall a n. RW n =o UArray a n -> Bool -> ()\n\
             dithering arr x = if x then free arr else ()\n",
            "dithering",
        );
        // The generated constraint contains a with-node for the branches.
        assert!(matches!(&w, Wanted::Tensor(_, b) if matches!(**b, Wanted::With(..))));
        let err = check_top_level(&given, &w, &d, &crate::span::Span::synthetic()).unwrap_err();
        assert_eq!(err.kind, crate::constraint::FailureKind::Multiplicity);
    }

    #[test]
    fn neglecting_and_not_neglecting() {
        // free in an unrestricted argument position scales to w.
        let (w, given, d) = gen_for(
            "neglecting :: forall a n. RW n =o UArray a n -> ()\n\
             neglecting arr = konst () (free arr)\n",
            "neglecting",
        );
        let err = check_top_level(&given, &w, &d, &crate::span::Span::synthetic()).unwrap_err();
        assert_eq!(err.kind, crate::constraint::FailureKind::Multiplicity);

        let (w, given, d) = gen_for(
            "notNeglecting :: forall a n. RW n =o UArray a n -> ()\n\
             notNeglecting arr = konst (free arr) ()\n",
            "notNeglecting",
        );
        check_top_level(&given, &w, &d, &crate::span::Span::synthetic()).unwrap();
    }

    #[test]
    fn indulging_uses_rw_twice() {
        let (w, given, d) = gen_for(
            "indulging :: forall a n. RW n =o UArray a n -> ((), ())\n\
             indulging arr = (free arr, free arr)\n",
            "indulging",
        );
        let err = check_top_level(&given, &w, &d, &crate::span::Span::synthetic()).unwrap_err();
        assert_eq!(err.kind, crate::constraint::FailureKind::Multiplicity);
        // Blame points at the second free, not the declaration.
        assert_eq!(err.blame.line, 7);
    }

    #[test]
    fn case_with_one_branch_has_no_with_node() {
        let (w, _, d) = gen_for(
            "one :: () -o ()\n\
             one u = case @1 u of { () -> () }\n",
            "one",
        );
        assert_eq!(solve(&w, &d), Outcome::Solved(Simple::empty()));
        fn has_with(w: &Wanted) -> bool {
            match w {
                Wanted::With(..) => true,
                Wanted::Tensor(a, b) => has_with(a) || has_with(b),
                Wanted::Impl { body, .. } => has_with(body),
                Wanted::Simple(..) => false,
            }
        }
        assert!(!has_with(&w));
    }
}
