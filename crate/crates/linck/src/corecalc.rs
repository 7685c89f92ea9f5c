//! The core calculus: an explicitly evidence-passing linear lambda
//! calculus with existential pairs, plus its multiplicity-checked linter.
//!
//! Terms carry instantiation hints (the witness types of packs and the
//! type arguments of polymorphic heads), which keeps the linter a
//! unification-free checker.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use crate::constraint::{Atom, Mult};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoreType {
    Var(String),
    Con(String, Vec<CoreType>),
    Arrow(Mult, Box<CoreType>, Box<CoreType>),
    Exists { vars: Vec<String>, payload: Box<CoreType>, evidence: Box<CoreType> },
    /// The evidence type of an atomic constraint.
    Ev(Atom),
}

impl CoreType {
    pub fn unit() -> CoreType {
        CoreType::Con("Unit".into(), vec![])
    }

    pub fn pair(a: CoreType, b: CoreType) -> CoreType {
        CoreType::Con("Pair".into(), vec![a, b])
    }

    pub fn ur(a: CoreType) -> CoreType {
        CoreType::Con("Ur".into(), vec![a])
    }

    pub fn arrow(m: Mult, a: CoreType, b: CoreType) -> CoreType {
        CoreType::Arrow(m, Box::new(a), Box::new(b))
    }

    pub fn substitute(&self, subst: &BTreeMap<String, CoreType>) -> CoreType {
        match self {
            CoreType::Var(v) => subst.get(v).cloned().unwrap_or_else(|| self.clone()),
            CoreType::Con(n, args) => {
                CoreType::Con(n.clone(), args.iter().map(|a| a.substitute(subst)).collect())
            }
            CoreType::Arrow(m, a, b) => {
                CoreType::arrow(*m, a.substitute(subst), b.substitute(subst))
            }
            CoreType::Exists { vars, payload, evidence } => {
                let mut inner = subst.clone();
                for v in vars {
                    inner.remove(v);
                }
                CoreType::Exists {
                    vars: vars.clone(),
                    payload: Box::new(payload.substitute(&inner)),
                    evidence: Box::new(evidence.substitute(&inner)),
                }
            }
            CoreType::Ev(atom) => {
                // Evidence atoms keep their arguments as printed names;
                // substitution replaces whole names.
                let args = atom
                    .args
                    .iter()
                    .map(|arg| match subst.get(arg.name()) {
                        Some(t) => crate::constraint::Arg::Rigid(core_type_name(t)),
                        None => arg.clone(),
                    })
                    .collect();
                CoreType::Ev(Atom::new(&atom.class, args))
            }
        }
    }
}

/// The printed name a type takes when it appears as an evidence-atom
/// argument. Kept in sync with the surface printer so that demand atoms
/// and core evidence types agree.
pub fn core_type_name(t: &CoreType) -> String {
    match t {
        CoreType::Var(v) => v.clone(),
        CoreType::Con(n, args) if args.is_empty() => n.clone(),
        other => other.to_string(),
    }
}

impl fmt::Display for CoreType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreType::Var(v) => write!(f, "{v}"),
            CoreType::Con(n, args) if args.is_empty() => write!(f, "{n}"),
            CoreType::Con(n, args) => {
                write!(f, "({n}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
            CoreType::Arrow(m, a, b) => write!(f, "(-{m}> {a} {b})"),
            CoreType::Exists { vars, payload, evidence } => {
                write!(f, "(exists ({}) {payload} {evidence})", vars.join(" "))
            }
            CoreType::Ev(atom) => write!(f, "(ev {atom})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreScheme {
    pub vars: Vec<String>,
    pub ty: CoreType,
}

impl CoreScheme {
    pub fn mono(ty: CoreType) -> CoreScheme {
        CoreScheme { vars: vec![], ty }
    }

    pub fn instantiate(&self, args: &[CoreType]) -> CoreType {
        assert_eq!(self.vars.len(), args.len(), "scheme instantiation arity");
        let subst: BTreeMap<String, CoreType> =
            self.vars.iter().cloned().zip(args.iter().cloned()).collect();
        self.ty.substitute(&subst)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CorePat {
    Var(String),
    Ctor(String, Vec<CorePat>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreAlt {
    pub ctor: String,
    pub pats: Vec<CorePat>,
    pub body: CoreTerm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoreTerm {
    /// A variable with the instantiation of its scheme (empty when the
    /// binding is monomorphic).
    Var(String, Vec<CoreType>),
    /// A saturating reference to a data constructor.
    Ctor(String, Vec<CoreType>),
    /// A reference to a registered primitive, possibly pre-applied.
    Prim(String, Vec<CoreType>),
    IntLit(i64),
    StrLit(String),
    Lambda(String, Box<CoreTerm>),
    App(Box<CoreTerm>, Box<CoreTerm>),
    /// `pack (evidence, payload)` at the recorded existential type with
    /// the recorded witness types.
    Pack {
        ex_ty: CoreType,
        witness: Vec<CoreType>,
        evidence: Box<CoreTerm>,
        payload: Box<CoreTerm>,
    },
    /// `let pack (ev, x) = rhs in body`: evidence binder first.
    Unpack {
        ev_binder: String,
        binder: String,
        rhs: Box<CoreTerm>,
        body: Box<CoreTerm>,
    },
    Case {
        mult: Mult,
        scrut: Box<CoreTerm>,
        alts: Vec<CoreAlt>,
    },
    Let {
        mult: Mult,
        binder: String,
        ann: Option<CoreScheme>,
        rhs: Box<CoreTerm>,
        body: Box<CoreTerm>,
    },
}

impl CoreTerm {
    pub fn var(name: &str) -> CoreTerm {
        CoreTerm::Var(name.to_string(), vec![])
    }

    pub fn app(f: CoreTerm, a: CoreTerm) -> CoreTerm {
        CoreTerm::App(Box::new(f), Box::new(a))
    }

    pub fn apps(f: CoreTerm, args: impl IntoIterator<Item = CoreTerm>) -> CoreTerm {
        args.into_iter().fold(f, CoreTerm::app)
    }

    pub fn lam(binder: &str, body: CoreTerm) -> CoreTerm {
        CoreTerm::Lambda(binder.to_string(), Box::new(body))
    }

    pub fn let1(binder: &str, rhs: CoreTerm, body: CoreTerm) -> CoreTerm {
        CoreTerm::Let {
            mult: Mult::One,
            binder: binder.to_string(),
            ann: None,
            rhs: Box::new(rhs),
            body: Box::new(body),
        }
    }

    pub fn unit() -> CoreTerm {
        CoreTerm::Ctor("Unit".into(), vec![])
    }
}

/// Stable s-expression form, used by the CLI `core` command and golden
/// tests.
pub fn core_to_string(t: &CoreTerm) -> String {
    let mut s = String::new();
    write_term(&mut s, t);
    s
}

fn write_term(out: &mut String, t: &CoreTerm) {
    match t {
        CoreTerm::Var(n, inst) => {
            if inst.is_empty() {
                out.push_str(n);
            } else {
                let _ = write!(out, "({n}");
                for i in inst {
                    let _ = write!(out, " @{i}");
                }
                out.push(')');
            }
        }
        CoreTerm::Ctor(n, _) => {
            let _ = write!(out, "{n}");
        }
        CoreTerm::Prim(n, _) => {
            let _ = write!(out, "#{n}");
        }
        CoreTerm::IntLit(n) => {
            let _ = write!(out, "{n}");
        }
        CoreTerm::StrLit(s) => {
            let _ = write!(out, "{s:?}");
        }
        CoreTerm::Lambda(x, body) => {
            let _ = write!(out, "(lam {x} ");
            write_term(out, body);
            out.push(')');
        }
        CoreTerm::App(f, a) => {
            out.push_str("(app ");
            write_term(out, f);
            out.push(' ');
            write_term(out, a);
            out.push(')');
        }
        CoreTerm::Pack { evidence, payload, .. } => {
            out.push_str("(pack ");
            write_term(out, evidence);
            out.push(' ');
            write_term(out, payload);
            out.push(')');
        }
        CoreTerm::Unpack { ev_binder, binder, rhs, body } => {
            let _ = write!(out, "(unpack ({ev_binder} {binder}) ");
            write_term(out, rhs);
            out.push(' ');
            write_term(out, body);
            out.push(')');
        }
        CoreTerm::Case { mult, scrut, alts } => {
            let _ = write!(out, "(case{mult} ");
            write_term(out, scrut);
            for alt in alts {
                out.push_str(" (");
                out.push_str(&alt.ctor);
                for p in &alt.pats {
                    out.push(' ');
                    write_pat(out, p);
                }
                out.push_str(" -> ");
                write_term(out, &alt.body);
                out.push(')');
            }
            out.push(')');
        }
        CoreTerm::Let { mult, binder, ann, rhs, body } => {
            let _ = write!(out, "(let{mult} {binder}");
            if let Some(sch) = ann {
                let _ = write!(out, " : {}", sch.ty);
            }
            out.push(' ');
            write_term(out, rhs);
            out.push(' ');
            write_term(out, body);
            out.push(')');
        }
    }
}

fn write_pat(out: &mut String, p: &CorePat) {
    match p {
        CorePat::Var(v) => out.push_str(v),
        CorePat::Ctor(n, subs) if subs.is_empty() => out.push_str(n),
        CorePat::Ctor(n, subs) => {
            let _ = write!(out, "({n}");
            for s in subs {
                out.push(' ');
                write_pat(out, s);
            }
            out.push(')');
        }
    }
}

// ---------------------------------------------------------------------------
// nested pattern compilation
// ---------------------------------------------------------------------------

/// Compile nested case patterns into cascades of single-constructor
/// cases. The inner case multiplicity is the binding multiplicity of the
/// destructured field, so linting is preserved.
pub fn flatten_patterns(t: CoreTerm, sigs: &CtorTable, fresh: &mut u32) -> CoreTerm {
    match t {
        CoreTerm::Case { mult, scrut, alts } => {
            let scrut = Box::new(flatten_patterns(*scrut, sigs, fresh));
            let alts = alts
                .into_iter()
                .map(|alt| {
                    let field_mults = sigs.field_mults(&alt.ctor);
                    let mut binders = Vec::new();
                    let mut pending: Vec<(String, CorePat, Mult)> = Vec::new();
                    for (i, pat) in alt.pats.into_iter().enumerate() {
                        let fmult = field_mults.get(i).copied().unwrap_or(Mult::One);
                        match pat {
                            CorePat::Var(v) => binders.push(CorePat::Var(v)),
                            nested => {
                                let tmp = format!("%f{}", *fresh);
                                *fresh += 1;
                                binders.push(CorePat::Var(tmp.clone()));
                                pending.push((tmp, nested, mult.mul(fmult)));
                            }
                        }
                    }
                    let mut body = flatten_patterns(alt.body, sigs, fresh);
                    for (tmp, nested, m) in pending.into_iter().rev() {
                        body = CoreTerm::Case {
                            mult: m,
                            scrut: Box::new(CoreTerm::var(&tmp)),
                            alts: vec![CoreAlt {
                                ctor: match &nested {
                                    CorePat::Ctor(n, _) => n.clone(),
                                    CorePat::Var(_) => unreachable!("nested pattern is a ctor"),
                                },
                                pats: match nested {
                                    CorePat::Ctor(_, subs) => subs,
                                    CorePat::Var(_) => unreachable!(),
                                },
                                body,
                            }],
                        };
                        body = flatten_patterns(body, sigs, fresh);
                    }
                    CoreAlt { ctor: alt.ctor, pats: binders, body }
                })
                .collect();
            CoreTerm::Case { mult, scrut, alts }
        }
        CoreTerm::Lambda(x, b) => CoreTerm::Lambda(x, Box::new(flatten_patterns(*b, sigs, fresh))),
        CoreTerm::App(f, a) => CoreTerm::App(
            Box::new(flatten_patterns(*f, sigs, fresh)),
            Box::new(flatten_patterns(*a, sigs, fresh)),
        ),
        CoreTerm::Pack { ex_ty, witness, evidence, payload } => CoreTerm::Pack {
            ex_ty,
            witness,
            evidence: Box::new(flatten_patterns(*evidence, sigs, fresh)),
            payload: Box::new(flatten_patterns(*payload, sigs, fresh)),
        },
        CoreTerm::Unpack { ev_binder, binder, rhs, body } => CoreTerm::Unpack {
            ev_binder,
            binder,
            rhs: Box::new(flatten_patterns(*rhs, sigs, fresh)),
            body: Box::new(flatten_patterns(*body, sigs, fresh)),
        },
        CoreTerm::Let { mult, binder, ann, rhs, body } => CoreTerm::Let {
            mult,
            binder,
            ann,
            rhs: Box::new(flatten_patterns(*rhs, sigs, fresh)),
            body: Box::new(flatten_patterns(*body, sigs, fresh)),
        },
        leaf => leaf,
    }
}

/// Does a term contain any nested (non-variable) case pattern?
pub fn has_nested_patterns(t: &CoreTerm) -> bool {
    match t {
        CoreTerm::Case { scrut, alts, .. } => {
            has_nested_patterns(scrut)
                || alts.iter().any(|a| {
                    a.pats.iter().any(|p| matches!(p, CorePat::Ctor(..)))
                        || has_nested_patterns(&a.body)
                })
        }
        CoreTerm::Lambda(_, b) => has_nested_patterns(b),
        CoreTerm::App(f, a) => has_nested_patterns(f) || has_nested_patterns(a),
        CoreTerm::Pack { evidence, payload, .. } => {
            has_nested_patterns(evidence) || has_nested_patterns(payload)
        }
        CoreTerm::Unpack { rhs, body, .. } => has_nested_patterns(rhs) || has_nested_patterns(body),
        CoreTerm::Let { rhs, body, .. } => has_nested_patterns(rhs) || has_nested_patterns(body),
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// constructor signatures and contexts
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct CoreCtorSig {
    pub data: String,
    pub vars: Vec<String>,
    pub fields: Vec<(Mult, CoreType)>,
}

#[derive(Clone, Debug, Default)]
pub struct CtorTable {
    pub sigs: BTreeMap<String, CoreCtorSig>,
    pub by_data: BTreeMap<String, Vec<String>>,
}

impl CtorTable {
    pub fn insert(&mut self, name: &str, sig: CoreCtorSig) {
        self.by_data.entry(sig.data.clone()).or_default().push(name.to_string());
        self.sigs.insert(name.to_string(), sig);
    }

    pub fn field_mults(&self, ctor: &str) -> Vec<Mult> {
        self.sigs
            .get(ctor)
            .map(|s| s.fields.iter().map(|(m, _)| *m).collect())
            .unwrap_or_default()
    }

    pub fn builtin() -> CtorTable {
        let mut t = CtorTable::default();
        let a = || CoreType::Var("a".into());
        let b = || CoreType::Var("b".into());
        t.insert("Unit", CoreCtorSig { data: "Unit".into(), vars: vec![], fields: vec![] });
        t.insert("True", CoreCtorSig { data: "Bool".into(), vars: vec![], fields: vec![] });
        t.insert("False", CoreCtorSig { data: "Bool".into(), vars: vec![], fields: vec![] });
        t.insert(
            "Ur",
            CoreCtorSig { data: "Ur".into(), vars: vec!["a".into()], fields: vec![(Mult::Many, a())] },
        );
        t.insert(
            "Pair",
            CoreCtorSig {
                data: "Pair".into(),
                vars: vec!["a".into(), "b".into()],
                fields: vec![(Mult::One, a()), (Mult::One, b())],
            },
        );
        t
    }
}

/// A typing context for the core linter.
pub type CoreContext = BTreeMap<String, (Mult, CoreScheme)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextClashError {
    pub name: String,
}

impl fmt::Display for ContextClashError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "context addition clashes on `{}`", self.name)
    }
}

/// Addition of contexts: shared names must carry identical schemes and
/// their multiplicities add. Partial, like the paper's definition.
pub fn context_add(g1: &CoreContext, g2: &CoreContext) -> Result<CoreContext, ContextClashError> {
    let mut out = g1.clone();
    for (name, (m2, s2)) in g2 {
        match out.get_mut(name) {
            None => {
                out.insert(name.clone(), (*m2, s2.clone()));
            }
            Some((m1, s1)) => {
                if s1 != s2 {
                    return Err(ContextClashError { name: name.clone() });
                }
                *m1 = m1.add(*m2);
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// the linter
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct CoreLintError {
    pub rule: &'static str,
    pub message: String,
}

impl fmt::Display for CoreLintError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "core lint ({}): {}", self.rule, self.message)
    }
}

fn lint_err<T>(rule: &'static str, message: impl Into<String>) -> Result<T, CoreLintError> {
    Err(CoreLintError { rule, message: message.into() })
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Usage {
    Zero,
    Once,
    Many,
}

impl Usage {
    fn add(self, o: Usage) -> Usage {
        match (self, o) {
            (Usage::Zero, u) | (u, Usage::Zero) => u,
            _ => Usage::Many,
        }
    }

    fn scale(self, m: Mult) -> Usage {
        match (m, self) {
            (_, Usage::Zero) => Usage::Zero,
            (Mult::One, u) => u,
            (Mult::Many, _) => Usage::Many,
        }
    }
}

type UsageMap = BTreeMap<String, Usage>;

pub struct Linter<'a> {
    pub ctors: &'a CtorTable,
    /// Global bindings: top-level declarations and primitives, all
    /// unrestricted.
    pub globals: &'a CoreContext,
    locals: Vec<(String, Mult, CoreType)>,
}

impl<'a> Linter<'a> {
    pub fn new(ctors: &'a CtorTable, globals: &'a CoreContext) -> Linter<'a> {
        Linter { ctors, globals, locals: Vec::new() }
    }

    /// Check a closed term against a type (the usual entry point).
    pub fn check_closed(&mut self, t: &CoreTerm, ty: &CoreType) -> Result<(), CoreLintError> {
        let usage = self.check(t, ty)?;
        debug_assert!(self.locals.is_empty());
        let _ = usage;
        Ok(())
    }

    fn lookup_local(&self, name: &str) -> Option<(Mult, CoreType)> {
        self.locals
            .iter()
            .rev()
            .find(|(n, _, _)| n == name)
            .map(|(_, m, t)| (*m, t.clone()))
    }

    fn retire(
        &self,
        usage: &mut UsageMap,
        name: &str,
        mult: Mult,
        rule: &'static str,
    ) -> Result<(), CoreLintError> {
        let u = usage.remove(name).unwrap_or(Usage::Zero);
        if mult == Mult::One && u != Usage::Once {
            return lint_err(
                rule,
                format!(
                    "linear binder `{name}` used {}",
                    match u {
                        Usage::Zero => "zero times",
                        Usage::Once => unreachable!(),
                        Usage::Many => "unrestrictedly",
                    }
                ),
            );
        }
        Ok(())
    }

    fn infer(&mut self, t: &CoreTerm) -> Result<(CoreType, UsageMap), CoreLintError> {
        match t {
            CoreTerm::Var(name, inst) => {
                if let Some((_, ty)) = self.lookup_local(name) {
                    if !inst.is_empty() {
                        return lint_err("L-VAR", format!("local `{name}` is monomorphic"));
                    }
                    return Ok((ty, [(name.clone(), Usage::Once)].into()));
                }
                match self.globals.get(name) {
                    Some((_, scheme)) => {
                        if scheme.vars.len() != inst.len() {
                            return lint_err(
                                "L-VAR",
                                format!(
                                    "`{name}` expects {} type arguments, got {}",
                                    scheme.vars.len(),
                                    inst.len()
                                ),
                            );
                        }
                        Ok((scheme.instantiate(inst), UsageMap::new()))
                    }
                    None => lint_err("L-VAR", format!("unbound variable `{name}`")),
                }
            }
            CoreTerm::Prim(name, inst) => match self.globals.get(&format!("#{name}")) {
                Some((_, scheme)) => {
                    if scheme.vars.len() != inst.len() {
                        return lint_err(
                            "L-VAR",
                            format!("primitive `{name}` instantiation arity mismatch"),
                        );
                    }
                    Ok((scheme.instantiate(inst), UsageMap::new()))
                }
                None => lint_err("L-VAR", format!("unknown primitive `{name}`")),
            },
            CoreTerm::Ctor(name, inst) => match self.ctors.sigs.get(name) {
                Some(sig) => {
                    if sig.vars.len() != inst.len() {
                        return lint_err(
                            "L-VAR",
                            format!("constructor `{name}` instantiation arity mismatch"),
                        );
                    }
                    let subst: BTreeMap<String, CoreType> =
                        sig.vars.iter().cloned().zip(inst.iter().cloned()).collect();
                    let mut ty = CoreType::Con(sig.data.clone(), inst.clone());
                    for (m, field) in sig.fields.iter().rev() {
                        ty = CoreType::arrow(*m, field.substitute(&subst), ty);
                    }
                    Ok((ty, UsageMap::new()))
                }
                None => lint_err("L-VAR", format!("unknown constructor `{name}`")),
            },
            CoreTerm::IntLit(_) => Ok((CoreType::Con("Int".into(), vec![]), UsageMap::new())),
            CoreTerm::StrLit(_) => Ok((CoreType::Con("Str".into(), vec![]), UsageMap::new())),
            CoreTerm::App(f, a) => {
                let (fty, fu) = self.infer(f)?;
                let CoreType::Arrow(m, dom, cod) = fty else {
                    return lint_err("L-APP", format!("applying a non-function of type {fty}"));
                };
                let au = self.check(a, &dom)?;
                let mut usage = fu;
                for (k, v) in au {
                    let u = usage.entry(k).or_insert(Usage::Zero);
                    *u = u.add(v.scale(m));
                }
                Ok((*cod, usage))
            }
            CoreTerm::Pack { ex_ty, .. } => {
                let ty = ex_ty.clone();
                let usage = self.check(t, &ty)?;
                Ok((ty, usage))
            }
            CoreTerm::Unpack { .. } | CoreTerm::Case { .. } | CoreTerm::Let { .. } => {
                self.infer_flow(t)
            }
            CoreTerm::Lambda(..) => {
                lint_err("L-ABS", "cannot infer the type of a bare lambda".to_string())
            }
        }
    }

    /// Unpack/case/let in inference position.
    fn infer_flow(&mut self, t: &CoreTerm) -> Result<(CoreType, UsageMap), CoreLintError> {
        match t {
            CoreTerm::Unpack { ev_binder, binder, rhs, body } => {
                let (rty, ru) = self.infer(rhs)?;
                let CoreType::Exists { vars, payload, evidence } = rty else {
                    return lint_err("L-UNPACK", format!("unpacking a non-package of type {rty}"));
                };
                // Fresh skolems stand in for the bound variables.
                let skolems: Vec<CoreType> = vars
                    .iter()
                    .enumerate()
                    .map(|(i, v)| CoreType::Var(format!("{v}%{i}")))
                    .collect();
                let subst: BTreeMap<String, CoreType> = vars.into_iter().zip(skolems).collect();
                self.locals.push((ev_binder.clone(), Mult::One, evidence.substitute(&subst)));
                self.locals.push((binder.clone(), Mult::One, payload.substitute(&subst)));
                let res = self.infer(body);
                self.locals.pop();
                self.locals.pop();
                let (bty, mut bu) = res?;
                self.retire(&mut bu, binder, Mult::One, "L-UNPACK")?;
                self.retire(&mut bu, ev_binder, Mult::One, "L-UNPACK")?;
                let mut usage = ru;
                for (k, v) in bu {
                    let u = usage.entry(k).or_insert(Usage::Zero);
                    *u = u.add(v);
                }
                Ok((bty, usage))
            }
            CoreTerm::Case { mult, scrut, alts } => {
                let (result, usage) = self.case_common(*mult, scrut, alts, None)?;
                Ok((result.expect("case with no expected type infers a branch"), usage))
            }
            CoreTerm::Let { mult, binder, ann, rhs, body } => {
                let (rty, ru) = match ann {
                    Some(sch) => {
                        if !sch.vars.is_empty() {
                            return lint_err("L-LET", "polymorphic local lets are not produced");
                        }
                        (sch.ty.clone(), self.check(rhs, &sch.ty)?)
                    }
                    None => self.infer(rhs)?,
                };
                self.locals.push((binder.clone(), *mult, rty));
                let res = self.infer(body);
                self.locals.pop();
                let (bty, mut bu) = res?;
                self.retire(&mut bu, binder, *mult, "L-LET")?;
                let mut usage = bu;
                for (k, v) in ru {
                    let u = usage.entry(k).or_insert(Usage::Zero);
                    *u = u.add(v.scale(*mult));
                }
                Ok((bty, usage))
            }
            _ => unreachable!(),
        }
    }

    fn check(&mut self, t: &CoreTerm, expected: &CoreType) -> Result<UsageMap, CoreLintError> {
        match (t, expected) {
            (CoreTerm::Lambda(x, body), CoreType::Arrow(m, dom, cod)) => {
                self.locals.push((x.clone(), *m, (**dom).clone()));
                let res = self.check(body, cod);
                self.locals.pop();
                let mut usage = res?;
                self.retire(&mut usage, x, *m, "L-ABS")?;
                Ok(usage)
            }
            (CoreTerm::Lambda(..), other) => {
                lint_err("L-ABS", format!("lambda checked against non-arrow {other}"))
            }
            (CoreTerm::Pack { ex_ty, witness, evidence, payload }, _) => {
                if ex_ty != expected {
                    return lint_err(
                        "L-PACK",
                        format!("pack annotation {ex_ty} does not match expected {expected}"),
                    );
                }
                let CoreType::Exists { vars, payload: pty, evidence: ety } = expected else {
                    return lint_err("L-PACK", format!("pack at non-existential type {expected}"));
                };
                if vars.len() != witness.len() {
                    return lint_err("L-PACK", "wrong number of witness types".to_string());
                }
                let subst: BTreeMap<String, CoreType> =
                    vars.iter().cloned().zip(witness.iter().cloned()).collect();
                let eu = self.check(evidence, &ety.substitute(&subst))?;
                let pu = self.check(payload, &pty.substitute(&subst))?;
                let mut usage = eu;
                for (k, v) in pu {
                    let u = usage.entry(k).or_insert(Usage::Zero);
                    *u = u.add(v);
                }
                Ok(usage)
            }
            (CoreTerm::Unpack { ev_binder, binder, rhs, body }, _) => {
                let (rty, ru) = self.infer(rhs)?;
                let CoreType::Exists { vars, payload, evidence } = rty else {
                    return lint_err("L-UNPACK", format!("unpacking a non-package of type {rty}"));
                };
                let skolems: Vec<CoreType> = vars
                    .iter()
                    .enumerate()
                    .map(|(i, v)| CoreType::Var(format!("{v}%{i}")))
                    .collect();
                let subst: BTreeMap<String, CoreType> = vars.into_iter().zip(skolems).collect();
                self.locals.push((ev_binder.clone(), Mult::One, evidence.substitute(&subst)));
                self.locals.push((binder.clone(), Mult::One, payload.substitute(&subst)));
                let res = self.check(body, expected);
                self.locals.pop();
                self.locals.pop();
                let mut bu = res?;
                self.retire(&mut bu, binder, Mult::One, "L-UNPACK")?;
                self.retire(&mut bu, ev_binder, Mult::One, "L-UNPACK")?;
                let mut usage = ru;
                for (k, v) in bu {
                    let u = usage.entry(k).or_insert(Usage::Zero);
                    *u = u.add(v);
                }
                Ok(usage)
            }
            (CoreTerm::Case { mult, scrut, alts }, _) => {
                let (_, usage) = self.case_common(*mult, scrut, alts, Some(expected))?;
                Ok(usage)
            }
            (CoreTerm::Let { mult, binder, ann, rhs, body }, _) => {
                let (rty, ru) = match ann {
                    Some(sch) => {
                        if !sch.vars.is_empty() {
                            return lint_err("L-LET", "polymorphic local lets are not produced");
                        }
                        (sch.ty.clone(), self.check(rhs, &sch.ty)?)
                    }
                    None => self.infer(rhs)?,
                };
                self.locals.push((binder.clone(), *mult, rty));
                let res = self.check(body, expected);
                self.locals.pop();
                let mut bu = res?;
                self.retire(&mut bu, binder, *mult, "L-LET")?;
                let mut usage = bu;
                for (k, v) in ru {
                    let u = usage.entry(k).or_insert(Usage::Zero);
                    *u = u.add(v.scale(*mult));
                }
                Ok(usage)
            }
            _ => {
                let (ty, usage) = self.infer(t)?;
                if !types_equal(&ty, expected) {
                    return lint_err(
                        "L-VAR",
                        format!("type mismatch: inferred {ty}, expected {expected}"),
                    );
                }
                Ok(usage)
            }
        }
    }

    fn case_common(
        &mut self,
        mult: Mult,
        scrut: &CoreTerm,
        alts: &[CoreAlt],
        expected: Option<&CoreType>,
    ) -> Result<(Option<CoreType>, UsageMap), CoreLintError> {
        let (sty, su) = self.infer(scrut)?;
        let CoreType::Con(data, ty_args) = &sty else {
            return lint_err("L-CASE", format!("case on a non-datatype of type {sty}"));
        };
        let all = self
            .ctors
            .by_data
            .get(data)
            .cloned()
            .unwrap_or_default();
        for c in &all {
            if !alts.iter().any(|a| &a.ctor == c) {
                return lint_err("L-CASE", format!("missing alternative for `{c}`"));
            }
        }
        let mut result: Option<CoreType> = expected.cloned();
        let mut branch_usages: Vec<UsageMap> = Vec::new();
        for alt in alts {
            let Some(sig) = self.ctors.sigs.get(&alt.ctor).cloned() else {
                return lint_err("L-CASE", format!("unknown constructor `{}`", alt.ctor));
            };
            if &sig.data != data {
                return lint_err("L-CASE", format!("`{}` is not a constructor of {data}", alt.ctor));
            }
            if sig.fields.len() != alt.pats.len() {
                return lint_err("L-CASE", format!("arity mismatch in `{}` pattern", alt.ctor));
            }
            let subst: BTreeMap<String, CoreType> =
                sig.vars.iter().cloned().zip(ty_args.iter().cloned()).collect();
            let mut binders = Vec::new();
            for (pat, (fm, fty)) in alt.pats.iter().zip(&sig.fields) {
                let CorePat::Var(v) = pat else {
                    return lint_err(
                        "L-CASE",
                        "nested patterns must be flattened before linting".to_string(),
                    );
                };
                let bound = mult.mul(*fm);
                self.locals.push((v.clone(), bound, fty.substitute(&subst)));
                binders.push((v.clone(), bound));
            }
            let res = match &result {
                Some(t) => {
                    let t = t.clone();
                    self.check(&alt.body, &t)
                }
                None => self.infer(&alt.body).map(|(ty, u)| {
                    result = Some(ty);
                    u
                }),
            };
            for _ in &binders {
                self.locals.pop();
            }
            let mut bu = res?;
            for (v, m) in binders.iter().rev() {
                self.retire(&mut bu, v, *m, "L-CASE")?;
            }
            branch_usages.push(bu);
        }
        // Branches must agree on linear usage.
        let mut names: Vec<String> = Vec::new();
        for u in &branch_usages {
            for k in u.keys() {
                if !names.contains(k) {
                    names.push(k.clone());
                }
            }
        }
        let mut joined = UsageMap::new();
        for name in names {
            let us: Vec<Usage> = branch_usages
                .iter()
                .map(|u| u.get(&name).copied().unwrap_or(Usage::Zero))
                .collect();
            let first = us[0];
            let agree = us.iter().all(|u| *u == first);
            let linear = self
                .lookup_local(&name)
                .map(|(m, _)| m == Mult::One)
                .unwrap_or(false);
            if linear && !agree {
                return lint_err(
                    "L-CASE",
                    format!("branches disagree on linear binder `{name}`"),
                );
            }
            let u = if agree { first } else { Usage::Many };
            if u != Usage::Zero {
                joined.insert(name, u);
            }
        }
        let mut usage = joined;
        for (k, v) in su {
            let u = usage.entry(k).or_insert(Usage::Zero);
            *u = u.add(v.scale(mult));
        }
        Ok((result, usage))
    }
}

/// Structural equality with alpha-equivalence of existential binders.
pub fn types_equal(a: &CoreType, b: &CoreType) -> bool {
    match (a, b) {
        (CoreType::Var(x), CoreType::Var(y)) => x == y,
        (CoreType::Ev(x), CoreType::Ev(y)) => x == y,
        (CoreType::Con(n, xs), CoreType::Con(m, ys)) => {
            n == m && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| types_equal(x, y))
        }
        (CoreType::Arrow(m1, d1, c1), CoreType::Arrow(m2, d2, c2)) => {
            m1 == m2 && types_equal(d1, d2) && types_equal(c1, c2)
        }
        (
            CoreType::Exists { vars: v1, payload: p1, evidence: e1 },
            CoreType::Exists { vars: v2, payload: p2, evidence: e2 },
        ) => {
            if v1.len() != v2.len() {
                return false;
            }
            let fresh: Vec<CoreType> = (0..v1.len()).map(|i| CoreType::Var(format!("%eq{i}"))).collect();
            let s1: BTreeMap<String, CoreType> = v1.iter().cloned().zip(fresh.clone()).collect();
            let s2: BTreeMap<String, CoreType> = v2.iter().cloned().zip(fresh).collect();
            types_equal(&p1.substitute(&s1), &p2.substitute(&s2))
                && types_equal(&e1.substitute(&s1), &e2.substitute(&s2))
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lint(term: &CoreTerm, ty: &CoreType) -> Result<(), CoreLintError> {
        let ctors = CtorTable::builtin();
        let globals = CoreContext::new();
        Linter::new(&ctors, &globals).check_closed(term, ty)
    }

    #[test]
    fn context_add_examples() {
        let tau = CoreScheme::mono(CoreType::Var("t".into()));
        let nu = CoreScheme::mono(CoreType::Var("v".into()));
        let one: CoreContext = [("x".to_string(), (Mult::One, tau.clone()))].into();
        // Adding a binding to itself makes it unrestricted.
        let sum = context_add(&one, &one).unwrap();
        assert_eq!(sum["x"].0, Mult::Many);
        // Adding the empty context is neutral.
        assert_eq!(context_add(&one, &CoreContext::new()).unwrap(), one);
        // Different schemes clash.
        let other: CoreContext = [("x".to_string(), (Mult::One, nu))].into();
        assert!(context_add(&one, &other).is_err());
    }

    #[test]
    fn pair_duplication_fails_lint() {
        // \x -> (x, x) against a -1> (a * a)
        let a = CoreType::Var("a".into());
        let body = CoreTerm::apps(
            CoreTerm::Ctor("Pair".into(), vec![a.clone(), a.clone()]),
            [CoreTerm::var("x"), CoreTerm::var("x")],
        );
        let term = CoreTerm::lam("x", body);
        let ty = CoreType::arrow(Mult::One, a.clone(), CoreType::pair(a.clone(), a.clone()));
        let err = lint(&term, &ty).unwrap_err();
        assert!(err.message.contains('x'), "{err}");
    }

    #[test]
    fn ur_is_unrestricted() {
        // \x -> Ur x against a -w> Ur a
        let a = CoreType::Var("a".into());
        let term = CoreTerm::lam(
            "x",
            CoreTerm::app(CoreTerm::Ctor("Ur".into(), vec![a.clone()]), CoreTerm::var("x")),
        );
        let ty = CoreType::arrow(Mult::Many, a.clone(), CoreType::ur(a.clone()));
        lint(&term, &ty).unwrap();
    }

    #[test]
    fn unpack_binds_both_linearly() {
        // let pack (z, x) = p in (z, x): evidence first, payload second.
        let tau = CoreType::Var("t".into());
        let nu = CoreType::Var("v".into());
        let pkg = CoreType::Exists {
            vars: vec![],
            payload: Box::new(tau.clone()),
            evidence: Box::new(nu.clone()),
        };
        let term = CoreTerm::lam(
            "p",
            CoreTerm::Unpack {
                ev_binder: "z".into(),
                binder: "x".into(),
                rhs: Box::new(CoreTerm::var("p")),
                body: Box::new(CoreTerm::apps(
                    CoreTerm::Ctor("Pair".into(), vec![nu.clone(), tau.clone()]),
                    [CoreTerm::var("z"), CoreTerm::var("x")],
                )),
            },
        );
        let ty = CoreType::arrow(Mult::One, pkg, CoreType::pair(nu.clone(), tau.clone()));
        lint(&term, &ty).unwrap();
    }

    #[test]
    fn flatten_produces_flat_patterns() {
        // case1 s of { (Ur x, y) -> y }
        let nested = CoreTerm::Case {
            mult: Mult::One,
            scrut: Box::new(CoreTerm::var("s")),
            alts: vec![CoreAlt {
                ctor: "Pair".into(),
                pats: vec![
                    CorePat::Ctor("Ur".into(), vec![CorePat::Var("x".into())]),
                    CorePat::Var("y".into()),
                ],
                body: CoreTerm::var("y"),
            }],
        };
        assert!(has_nested_patterns(&nested));
        let mut fresh = 0;
        let flat = flatten_patterns(nested, &CtorTable::builtin(), &mut fresh);
        assert!(!has_nested_patterns(&flat));
        // The unrestricted binder x may be dropped in the flattened form.
        let int = CoreType::Con("Int".into(), vec![]);
        let scrut_ty = CoreType::pair(CoreType::ur(int.clone()), int.clone());
        let term = CoreTerm::lam("s", flat);
        lint(&term, &CoreType::arrow(Mult::One, scrut_ty, int)).unwrap();
    }

    #[test]
    fn core_prints_stably() {
        let t = CoreTerm::lam(
            "z",
            CoreTerm::Case {
                mult: Mult::One,
                scrut: Box::new(CoreTerm::var("z")),
                alts: vec![CoreAlt {
                    ctor: "Unit".into(),
                    pats: vec![],
                    body: CoreTerm::unit(),
                }],
            },
        );
        assert_eq!(core_to_string(&t), "(lam z (case1 z (Unit -> Unit)))");
    }
}
