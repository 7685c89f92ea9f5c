//! The built-in prelude: signature registration and the primitive table.
//!
//! The prelude ships as an `.lq` signature file, parsed at startup and
//! checked against the registered runtime arities. Declarations without
//! bodies are primitives; the rest (`restrict`, the `when` variants) are
//! ordinary source definitions compiled with user code.

use std::collections::BTreeMap;

use crate::ast::Program;
use crate::eval::{Effect, PrimInfo};
use crate::parser::parse_program;
use crate::typing::{GlobalEnv, TypeError, TypeErrorKind};

pub const PRELUDE_SOURCE: &str = include_str!("../prelude.lq");
pub const PRELUDE_FILE: &str = "<prelude>";

/// Parse the prelude source (the embedded one unless overridden).
pub fn parse_prelude(source: Option<&str>) -> Result<Program, crate::parser::ParseError> {
    parse_program(PRELUDE_FILE, source.unwrap_or(PRELUDE_SOURCE))
}

/// The registered primitives with their runtime arities (the evidence
/// argument counts) and store effects.
pub fn prim_table() -> BTreeMap<String, PrimInfo> {
    let prim = |arity, effect| PrimInfo { arity, effect };
    let mut t = BTreeMap::new();
    t.insert("new".into(), prim(2, Effect::Allocates));
    t.insert("read".into(), prim(3, Effect::Reads));
    t.insert("write".into(), prim(4, Effect::Writes));
    t.insert("free".into(), prim(2, Effect::Frees));
    t.insert("length".into(), prim(2, Effect::None));
    t.insert("slice".into(), prim(3, Effect::Allocates));
    // `release` values are manufactured by `slice`: three window ids plus
    // the capability pair.
    t.insert("release".into(), prim(4, Effect::Writes));
    t.insert("linearly".into(), prim(2, Effect::None));
    t.insert("dup".into(), prim(1, Effect::None));
    t.insert("dis".into(), prim(1, Effect::None));
    for op in ["+", "-", "*", "div", "mod", "<", "<=", ">", ">=", "==", "/="] {
        t.insert(op.into(), prim(3, Effect::None));
    }
    t
}

/// The evidence duplication and discard primitives of each duplicable
/// class. Entailment evidence may only duplicate atoms registered here.
pub fn dup_dis_prims(class: &str) -> Option<(&'static str, &'static str)> {
    match class {
        "Linearly" => Some(("dup", "dis")),
        _ => None,
    }
}

/// Names of declarations that are primitives (no body) in a program.
pub fn prim_names(prog: &Program) -> Vec<String> {
    prog.values.iter().filter(|v| v.body.is_none()).map(|v| v.name.clone()).collect()
}

/// Check that every bodyless prelude declaration has a registered
/// runtime arity that matches its scheme's curried arity.
pub fn validate_prelude(prelude: &Program, env: &GlobalEnv) -> Result<(), TypeError> {
    let prims = prim_table();
    for v in &prelude.values {
        if v.body.is_some() {
            continue;
        }
        let Some(info) = prims.get(&v.name) else {
            return Err(TypeError::new(
                TypeErrorKind::BadDeclaration,
                format!("prelude primitive `{}` has no runtime implementation", v.name),
                &v.span,
            ));
        };
        let scheme = env.resolve_scheme(&v.scheme, &v.span)?;
        let expected = curried_arity(&scheme);
        if info.arity != expected {
            return Err(TypeError::new(
                TypeErrorKind::BadDeclaration,
                format!(
                    "prelude primitive `{}`: runtime arity {} does not match scheme arity {}",
                    v.name, info.arity, expected
                ),
                &v.span,
            ));
        }
    }
    Ok(())
}

/// The curried arity of a translated scheme: one evidence argument plus
/// one per value arrow.
fn curried_arity(scheme: &crate::ast::Scheme) -> usize {
    let mut n = 1; // the evidence argument (unit evidence when Q is empty)
    let mut ty = &scheme.ty;
    while let crate::ast::Type::Arrow(_, _, cod) = ty {
        n += 1;
        ty = cod;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typing::check_program;

    #[test]
    fn prelude_parses_and_checks() {
        let prelude = parse_prelude(None).expect("prelude parses");
        let empty = Program::default();
        let env = GlobalEnv::build(&prelude, &empty).expect("prelude env");
        validate_prelude(&prelude, &env).expect("prim arities line up");
        // The source-level definitions typecheck.
        let derivs = check_program(&env, &prelude).expect("prelude typechecks");
        let names: Vec<&str> = derivs.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["restrict", "whenRW", "whenRW2"]);
    }

    #[test]
    fn prelude_signatures() {
        let prelude = parse_prelude(None).unwrap();
        let lookup = |name: &str| {
            prelude
                .values
                .iter()
                .find(|v| v.name == name)
                .unwrap_or_else(|| panic!("no `{name}` in prelude"))
        };
        // free :: RW n =o UArray a n -> ()
        let free = lookup("free");
        assert_eq!(free.scheme.constraint[0].class, "RW");
        // dup :: Linearly =o () * (Linearly, Linearly)
        let dup = lookup("dup");
        assert_eq!(dup.scheme.constraint[0].class, "Linearly");
        // slice returns two fresh regions and a joint release operator.
        let slice = lookup("slice");
        match &slice.scheme.ty {
            crate::ast::Type::Arrow(_, _, cod) => match cod.as_ref() {
                crate::ast::Type::Arrow(_, _, cod) => match cod.as_ref() {
                    crate::ast::Type::Exists { vars, constraint, .. } => {
                        assert_eq!(vars, &["p".to_string(), "q".to_string()]);
                        assert_eq!(constraint.len(), 2);
                    }
                    other => panic!("unexpected slice result {other:?}"),
                },
                other => panic!("unexpected slice type {other:?}"),
            },
            other => panic!("unexpected slice type {other:?}"),
        }
    }

    #[test]
    fn round_trips_through_the_parser() {
        let prelude = parse_prelude(None).unwrap();
        let printed = crate::pretty::program_to_string(&prelude);
        let reparsed = parse_program(PRELUDE_FILE, &printed).expect("prelude reparses");
        assert!(crate::ast::program_same_shape(&prelude, &reparsed));
    }
}
