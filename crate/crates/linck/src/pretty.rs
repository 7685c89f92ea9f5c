//! Printer for surface programs. `parse(print(p))` is structurally equal
//! to `p`; declarations print on one line each so the column-1 rule stays
//! intact.

use std::fmt::Write;

use crate::ast::*;
use crate::constraint::Mult;

pub fn program_to_string(p: &Program) -> String {
    let mut out = String::new();
    for c in &p.classes {
        if c.duplicable {
            out.push_str("dup ");
        }
        out.push_str("class ");
        out.push_str(&c.name);
        for v in &c.params {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    for s in &p.synonyms {
        let _ = write!(out, "constraint {}", s.name);
        for v in &s.params {
            let _ = write!(out, " {v}");
        }
        let _ = write!(out, " = {}", clist_to_string(&s.expansion, true));
        out.push('\n');
    }
    for d in &p.datas {
        let _ = write!(out, "data {}", d.name);
        for v in &d.params {
            let _ = write!(out, " {v}");
        }
        out.push_str(" = ");
        let ctors: Vec<String> = d
            .ctors
            .iter()
            .map(|c| {
                let mut s = c.name.clone();
                for (m, t) in &c.fields {
                    if *m == Mult::Many {
                        s.push_str(" @w");
                    }
                    let _ = write!(s, " {}", print_type(t, Prec::Atom));
                }
                s
            })
            .collect();
        out.push_str(&ctors.join(" | "));
        out.push('\n');
    }
    for v in &p.values {
        let name = if v.name.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_') {
            v.name.clone()
        } else {
            format!("({})", v.name)
        };
        let _ = writeln!(out, "{name} :: {}", scheme_to_string(&v.scheme));
        if let Some(body) = &v.body {
            let _ = writeln!(out, "{name} = {}", print_expr(body, Prec::Top));
        }
    }
    out
}

pub fn scheme_to_string(s: &Scheme) -> String {
    let mut out = String::new();
    if !s.vars.is_empty() {
        out.push_str("forall");
        for v in &s.vars {
            let _ = write!(out, " {v}");
        }
        out.push_str(". ");
    }
    if !s.constraint.is_empty() {
        let all_many = s.constraint.iter().all(|a| a.mult == Mult::Many);
        if all_many {
            let _ = write!(out, "{} => ", clist_to_string(&s.constraint, false));
        } else {
            let _ = write!(out, "{} =o ", clist_to_string(&s.constraint, true));
        }
    }
    out.push_str(&print_type(&s.ty, Prec::Top));
    out
}

/// Print a constraint list. With `show_mults`, unrestricted atoms carry a
/// `w.` prefix (the `=o` reading); otherwise multiplicities are implied by
/// the surrounding arrow.
pub fn clist_to_string(cs: &CList, show_mults: bool) -> String {
    let atom = |a: &CAtom| {
        let mut s = String::new();
        if show_mults && a.mult == Mult::Many {
            s.push_str("w.");
        }
        s.push_str(&a.class);
        for t in &a.args {
            let _ = write!(s, " {}", print_type(t, Prec::Atom));
        }
        s
    };
    // A lone atom with variable arguments may print bare; anything else
    // needs the parenthesized list form to reparse.
    if cs.len() == 1 && cs[0].args.iter().all(|t| matches!(t, Type::Var(_))) {
        return atom(&cs[0]);
    }
    let items: Vec<String> = cs.iter().map(atom).collect();
    format!("({})", items.join(", "))
}

#[derive(Clone, Copy, PartialEq)]
pub enum Prec {
    Top,
    App,
    Atom,
}

pub fn type_to_string(t: &Type) -> String {
    print_type(t, Prec::Top)
}

fn print_type(t: &Type, prec: Prec) -> String {
    match t {
        Type::Var(v) => v.clone(),
        Type::Uvar(n) => format!("_u{n}"),
        Type::Skolem(n) => format!("s{n}"),
        Type::Con(name, args) => match (name.as_str(), args.as_slice()) {
            ("Unit", []) => "()".into(),
            ("Pair", [a, b]) => {
                format!("({}, {})", print_type(a, Prec::Top), print_type(b, Prec::Top))
            }
            (_, []) => name.clone(),
            _ => {
                let mut s = name.clone();
                for a in args {
                    let _ = write!(s, " {}", print_type(a, Prec::Atom));
                }
                parens_if(prec == Prec::Atom, s)
            }
        },
        Type::Arrow(m, a, b) => {
            let arrow = match m {
                Mult::One => "-o",
                Mult::Many => "->",
            };
            let s = format!("{} {arrow} {}", print_type(a, Prec::App), print_type(b, Prec::Top));
            parens_if(prec != Prec::Top, s)
        }
        Type::Exists { vars, body, constraint } => {
            let mut s = String::new();
            if !vars.is_empty() {
                s.push_str("exists");
                for v in vars {
                    let _ = write!(s, " {v}");
                }
                s.push_str(". ");
            }
            s.push_str(&print_type(body, Prec::App));
            if !constraint.is_empty() {
                let _ = write!(s, " * {}", clist_to_string(constraint, true));
            }
            parens_if(prec != Prec::Top, s)
        }
        Type::Qual { constraint, body } => {
            let s = format!(
                "{} =o {}",
                clist_to_string(constraint, true),
                print_type(body, Prec::Top)
            );
            parens_if(prec != Prec::Top, s)
        }
    }
}

fn parens_if(cond: bool, s: String) -> String {
    if cond {
        format!("({s})")
    } else {
        s
    }
}

pub fn expr_to_string(e: &Expr) -> String {
    print_expr(e, Prec::Top)
}

fn is_operator(name: &str) -> bool {
    matches!(name, "+" | "-" | "*" | "div" | "mod" | "<" | "<=" | ">" | ">=" | "==" | "/=" | "$")
}

fn print_expr(e: &Expr, prec: Prec) -> String {
    // Pair and operator applications print in their surface forms.
    if let Expr::App(f, second, _) = e {
        if let Expr::App(g, first, _) = f.as_ref() {
            match g.as_ref() {
                Expr::Ctor(name, _) if name == "Pair" => {
                    return format!(
                        "({}, {})",
                        print_expr(first, Prec::Top),
                        print_expr(second, Prec::Top)
                    );
                }
                Expr::Var(op, _) if is_operator(op) => {
                    return format!(
                        "({} {op} {})",
                        print_expr(first, Prec::App),
                        print_expr(second, Prec::App)
                    );
                }
                _ => {}
            }
        }
    }
    match e {
        Expr::Var(v, _) => v.clone(),
        Expr::Ctor(c, _) => {
            if c == "Unit" {
                "()".into()
            } else {
                c.clone()
            }
        }
        Expr::Int(n, _) => {
            if *n < 0 {
                format!("(0 - {})", -n)
            } else {
                n.to_string()
            }
        }
        Expr::Str(s, _) => format!("{s:?}"),
        Expr::App(f, a, _) => {
            let s = format!("{} {}", print_expr(f, Prec::App), print_expr(a, Prec::Atom));
            parens_if(prec == Prec::Atom, s)
        }
        Expr::Pack(inner, _) => {
            let s = format!("pack {}", print_expr(inner, Prec::Atom));
            parens_if(prec == Prec::Atom, s)
        }
        Expr::Lambda(x, body, _) => {
            let s = format!("\\{x} -> {}", print_expr(body, Prec::Top));
            parens_if(prec != Prec::Top, s)
        }
        Expr::Unpack { binder, rhs, body, .. } => {
            let s = format!(
                "let pack {binder} = {} in {}",
                print_expr(rhs, Prec::Top),
                print_expr(body, Prec::Top)
            );
            parens_if(prec != Prec::Top, s)
        }
        Expr::Let { mult, binder, scheme, rhs, body, .. } => {
            let ann = match scheme {
                Some(s) => format!(" :: {}", scheme_to_string(s)),
                None => String::new(),
            };
            let m = match mult {
                Mult::One => "@1",
                Mult::Many => "@w",
            };
            let s = format!(
                "let {m} {binder}{ann} = {} in {}",
                print_expr(rhs, Prec::Top),
                print_expr(body, Prec::Top)
            );
            parens_if(prec != Prec::Top, s)
        }
        Expr::Case { mult, scrutinee, alts, .. } => {
            let m = match mult {
                Mult::One => "@1",
                Mult::Many => "@w",
            };
            let arms: Vec<String> = alts
                .iter()
                .map(|a| {
                    let mut s = if a.ctor == "Pair" && a.binders.len() == 2 {
                        format!("({}, {})", a.binders[0], a.binders[1])
                    } else if a.ctor == "Unit" {
                        "()".to_string()
                    } else {
                        let mut s = a.ctor.clone();
                        for b in &a.binders {
                            let _ = write!(s, " {b}");
                        }
                        s
                    };
                    let _ = write!(s, " -> {}", print_expr(&a.body, Prec::Top));
                    s
                })
                .collect();
            let s = format!(
                "case {m} {} of {{ {} }}",
                print_expr(scrutinee, Prec::Top),
                arms.join("; ")
            );
            parens_if(prec != Prec::Top, s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_expr, parse_program};

    fn round_trip_program(src: &str) {
        let p1 = parse_program("t.lq", src).unwrap_or_else(|e| {
            panic!("parse failed: {} at {}", e.message, e.span);
        });
        let printed = program_to_string(&p1);
        let p2 = parse_program("t.lq", &printed).unwrap_or_else(|e| {
            panic!("reparse failed: {} at {} in\n{}", e.message, e.span, printed)
        });
        assert!(
            program_same_shape(&p1, &p2),
            "round trip changed the program:\n{printed}"
        );
    }

    #[test]
    fn round_trip_simple_decls() {
        round_trip_program(
            "id :: forall a. a -o a\nid = \\x -> x\n\
             konst :: forall a b. a -o b -> a\nkonst x y = x\n",
        );
    }

    #[test]
    fn parses_linear_constraint_scheme() {
        // The mutable-array interface style: a linear constraint arrow.
        let p = parse_program(
            "t.lq",
            "free :: forall a n. RW n =o UArray a n -> ()\n",
        )
        .unwrap();
        let s = &p.values[0].scheme;
        assert_eq!(s.vars, vec!["a".to_string(), "n".to_string()]);
        assert_eq!(s.constraint.len(), 1);
        assert_eq!(s.constraint[0].class, "RW");
        assert_eq!(s.constraint[0].mult, Mult::One);
        assert!(matches!(s.ty, Type::Arrow(Mult::Many, _, _)));
        round_trip_program("free :: forall a n. RW n =o UArray a n -> ()\n");
    }

    #[test]
    fn let_and_case_forms() {
        let e = parse_expr("let @1 x = f y in x").unwrap();
        match &e {
            Expr::Let { mult, binder, scheme, .. } => {
                assert_eq!(*mult, Mult::One);
                assert_eq!(binder, "x");
                assert!(scheme.is_none());
            }
            other => panic!("expected let, got {other:?}"),
        }
        assert!(parse_expr("case @2 e of { True -> 1 }").is_err());
    }

    #[test]
    fn do_block_translation() {
        // `do { Linearly.return e }` is a pack.
        let e = parse_expr("Linearly.do { Linearly.return e }").unwrap();
        assert!(e.same_shape(&parse_expr("pack e").unwrap()));
        // `do { x <- u; Linearly.return x }` unpacks and packs.
        let e = parse_expr("Linearly.do { x <- u; Linearly.return x }").unwrap();
        assert!(e.same_shape(&parse_expr("let pack x = u in pack x").unwrap()));
        // `do { u; Linearly.return () }` sequences through a unit match.
        let e = parse_expr("Linearly.do { u; Linearly.return () }").unwrap();
        assert!(e.same_shape(
            &parse_expr("let pack _s0 = u in case @1 _s0 of { () -> pack () }").unwrap()
        ));
    }

    #[test]
    fn do_block_must_end_in_expression() {
        assert!(parse_expr("Linearly.do { x <- u }").is_err());
    }

    #[test]
    fn round_trip_do_and_patterns() {
        round_trip_program(
            "swap :: forall a n. RW n =o UArray a n -> Int -> Int -> () * RW n\n\
             swap arr i j = Linearly.do { Ur x <- read arr i; Ur y <- read arr j; \
             write arr i y; write arr j x; Linearly.return () }\n",
        );
    }

    #[test]
    fn round_trip_types() {
        round_trip_program(
            "new :: forall a. Linearly =o Int -> exists n. Ur (UArray a n) * RW n\n\
             slice :: forall a n. RW n =o UArray a n -> Int -> exists p q. (Ur (UArray a p, UArray a q), ((RW p, RW q) =o () * RW n)) * (RW p, RW q)\n\
             when2 :: forall p q. (RW p, RW q) =o Bool -> ((RW p, RW q) =o () * (RW p, RW q)) -> () * (RW p, RW q)\n",
        );
    }

    #[test]
    fn round_trip_data_and_classes() {
        round_trip_program(
            "dup class Token\nclass Read n\nconstraint RW n = (Read n, Write n)\n\
             data Box a = MkBox @w a | NoBox\n",
        );
    }

    #[test]
    fn unicode_aliases() {
        let a = parse_program("t.lq", "f :: forall a n. RW n =o UArray a n -> ()\n").unwrap();
        let b = parse_program("t.lq", "f :: ∀ a n. RW n =∘ UArray a n → ()\n").unwrap();
        assert!(program_same_shape(&a, &b));
    }

    #[test]
    fn operators_round_trip() {
        round_trip_program(
            "f :: Int -> Int\nf x = if (x + 1) * 2 <= 10 && x /= 0 then x else 0 - x\n",
        );
    }
}
