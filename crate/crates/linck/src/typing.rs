//! The type checker: a usage-counting bidirectional oracle.
//!
//! Types and multiplicities are checked here, ignoring constraints; the
//! output is a typing derivation that constraint generation and
//! elaboration walk afterwards. Instantiations are solved by first-order
//! unification of rigid types, and usage maps are computed bottom-up and
//! validated against binder multiplicities.

use std::collections::BTreeMap;
use std::fmt;

use crate::ast::{CAtom, CList, Expr, Program, Scheme, Type, ValueDecl};
use crate::constraint::{Arg, Atom, DuplicableSet, Mult};
use crate::span::Span;

// ---------------------------------------------------------------------------
// global environment
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct CtorSig {
    pub data: String,
    pub vars: Vec<String>,
    pub fields: Vec<(Mult, Type)>,
}

#[derive(Clone, Debug)]
pub struct GlobalEnv {
    pub classes: BTreeMap<String, usize>,
    pub synonyms: BTreeMap<String, (Vec<String>, CList)>,
    pub tycons: BTreeMap<String, usize>,
    pub ctors: BTreeMap<String, CtorSig>,
    pub data_ctors: BTreeMap<String, Vec<String>>,
    pub values: BTreeMap<String, Scheme>,
    pub duplicable: DuplicableSet,
}

#[derive(Clone, Debug)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub message: String,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypeErrorKind {
    Mismatch,
    UnknownName,
    Arity,
    Linearity,
    AnnotationRequired,
    Unresolved,
    BadDeclaration,
}

impl TypeError {
    pub fn new(kind: TypeErrorKind, message: impl Into<String>, span: &Span) -> TypeError {
        TypeError { kind, message: message.into(), span: span.clone() }
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl GlobalEnv {
    /// Build the environment for a program, layered on top of the prelude
    /// declarations. User declarations shadow prelude values.
    pub fn build(prelude: &Program, user: &Program) -> Result<GlobalEnv, TypeError> {
        let mut env = GlobalEnv {
            classes: BTreeMap::new(),
            synonyms: BTreeMap::new(),
            tycons: BTreeMap::new(),
            ctors: BTreeMap::new(),
            data_ctors: BTreeMap::new(),
            values: BTreeMap::new(),
            duplicable: DuplicableSet::new(),
        };
        for (name, arity) in
            [("Int", 0), ("Bool", 0), ("Unit", 0), ("Str", 0), ("Ur", 1), ("Pair", 2), ("UArray", 2)]
        {
            env.tycons.insert(name.into(), arity);
        }
        let a = || Type::Var("a".into());
        let b = || Type::Var("b".into());
        env.register_ctor("Unit", CtorSig { data: "Unit".into(), vars: vec![], fields: vec![] });
        env.register_ctor("True", CtorSig { data: "Bool".into(), vars: vec![], fields: vec![] });
        env.register_ctor("False", CtorSig { data: "Bool".into(), vars: vec![], fields: vec![] });
        env.register_ctor(
            "Ur",
            CtorSig { data: "Ur".into(), vars: vec!["a".into()], fields: vec![(Mult::Many, a())] },
        );
        env.register_ctor(
            "Pair",
            CtorSig {
                data: "Pair".into(),
                vars: vec!["a".into(), "b".into()],
                fields: vec![(Mult::One, a()), (Mult::One, b())],
            },
        );
        env.duplicable = DuplicableSet::new();
        for prog in [prelude, user] {
            for c in &prog.classes {
                env.classes.insert(c.name.clone(), c.params.len());
                if c.duplicable {
                    env.duplicable.insert(&c.name);
                }
            }
            for s in &prog.synonyms {
                env.synonyms.insert(s.name.clone(), (s.params.clone(), s.expansion.clone()));
            }
            for d in &prog.datas {
                if env.tycons.contains_key(&d.name) {
                    return Err(TypeError::new(
                        TypeErrorKind::BadDeclaration,
                        format!("datatype `{}` is already defined", d.name),
                        &d.span,
                    ));
                }
                env.tycons.insert(d.name.clone(), d.params.len());
                let mut names = Vec::new();
                for c in &d.ctors {
                    env.register_ctor(
                        &c.name,
                        CtorSig {
                            data: d.name.clone(),
                            vars: d.params.clone(),
                            fields: c.fields.clone(),
                        },
                    );
                    names.push(c.name.clone());
                }
                env.data_ctors.insert(d.name.clone(), names);
            }
        }
        // Resolve value schemes (synonym expansion + well-formedness).
        for prog in [prelude, user] {
            for v in &prog.values {
                let scheme = env.resolve_scheme(&v.scheme, &v.span)?;
                env.values.insert(v.name.clone(), scheme);
            }
        }
        Ok(env)
    }

    fn register_ctor(&mut self, name: &str, sig: CtorSig) {
        self.data_ctors.entry(sig.data.clone()).or_default().push(name.to_string());
        self.ctors.insert(name.to_string(), sig);
    }

    /// Expand constraint synonyms and validate names, arities and scoping.
    pub fn resolve_scheme(&self, s: &Scheme, span: &Span) -> Result<Scheme, TypeError> {
        let mut scope: Vec<String> = s.vars.clone();
        let constraint = self.resolve_clist(&s.constraint, &scope, span)?;
        let ty = self.resolve_type(&s.ty, &mut scope, span)?;
        Ok(Scheme { vars: s.vars.clone(), constraint, ty })
    }

    pub fn resolve_clist(
        &self,
        cs: &CList,
        scope: &[String],
        span: &Span,
    ) -> Result<CList, TypeError> {
        let mut out = Vec::new();
        self.expand_clist(cs, scope, span, 0, &mut out)?;
        Ok(out)
    }

    fn expand_clist(
        &self,
        cs: &CList,
        scope: &[String],
        span: &Span,
        depth: usize,
        out: &mut CList,
    ) -> Result<(), TypeError> {
        if depth > 8 {
            return Err(TypeError::new(
                TypeErrorKind::BadDeclaration,
                "constraint synonyms nest too deeply (is there a cycle?)",
                span,
            ));
        }
        for atom in cs {
            if let Some((params, expansion)) = self.synonyms.get(&atom.class) {
                if params.len() != atom.args.len() {
                    return Err(TypeError::new(
                        TypeErrorKind::Arity,
                        format!(
                            "constraint synonym `{}` expects {} arguments, got {}",
                            atom.class,
                            params.len(),
                            atom.args.len()
                        ),
                        &atom.span,
                    ));
                }
                let subst: BTreeMap<String, Type> =
                    params.iter().cloned().zip(atom.args.iter().cloned()).collect();
                let instantiated: CList = expansion
                    .iter()
                    .map(|e| CAtom {
                        mult: atom.mult.mul(e.mult),
                        class: e.class.clone(),
                        args: e.args.iter().map(|t| subst_type_vars(t, &subst)).collect(),
                        span: atom.span.clone(),
                    })
                    .collect();
                self.expand_clist(&instantiated, scope, span, depth + 1, out)?;
            } else {
                match self.classes.get(&atom.class) {
                    None => {
                        return Err(TypeError::new(
                            TypeErrorKind::UnknownName,
                            format!("unknown constraint class `{}`", atom.class),
                            &atom.span,
                        ))
                    }
                    Some(&arity) if arity != atom.args.len() => {
                        return Err(TypeError::new(
                            TypeErrorKind::Arity,
                            format!(
                                "class `{}` expects {} arguments, got {}",
                                atom.class,
                                arity,
                                atom.args.len()
                            ),
                            &atom.span,
                        ))
                    }
                    Some(_) => {}
                }
                let mut resolved = atom.clone();
                let mut scope_tmp = scope.to_vec();
                resolved.args = atom
                    .args
                    .iter()
                    .map(|t| self.resolve_type(t, &mut scope_tmp, span))
                    .collect::<Result<_, _>>()?;
                out.push(resolved);
            }
        }
        Ok(())
    }

    fn resolve_type(
        &self,
        t: &Type,
        scope: &mut Vec<String>,
        span: &Span,
    ) -> Result<Type, TypeError> {
        match t {
            Type::Var(v) => {
                if scope.contains(v) {
                    Ok(t.clone())
                } else {
                    Err(TypeError::new(
                        TypeErrorKind::UnknownName,
                        format!("type variable `{v}` is not in scope"),
                        span,
                    ))
                }
            }
            Type::Uvar(_) | Type::Skolem(_) => Ok(t.clone()),
            Type::Con(name, args) => {
                match self.tycons.get(name) {
                    None => {
                        return Err(TypeError::new(
                            TypeErrorKind::UnknownName,
                            format!("unknown type constructor `{name}`"),
                            span,
                        ))
                    }
                    Some(&arity) if arity != args.len() => {
                        return Err(TypeError::new(
                            TypeErrorKind::Arity,
                            format!(
                                "type constructor `{name}` expects {arity} arguments, got {}",
                                args.len()
                            ),
                            span,
                        ))
                    }
                    Some(_) => {}
                }
                let args =
                    args.iter().map(|a| self.resolve_type(a, scope, span)).collect::<Result<_, _>>()?;
                Ok(Type::Con(name.clone(), args))
            }
            Type::Arrow(m, a, b) => Ok(Type::Arrow(
                *m,
                Box::new(self.resolve_type(a, scope, span)?),
                Box::new(self.resolve_type(b, scope, span)?),
            )),
            Type::Exists { vars, body, constraint } => {
                let depth = scope.len();
                scope.extend(vars.iter().cloned());
                let body = self.resolve_type(body, scope, span)?;
                let constraint = self.resolve_clist(constraint, scope, span)?;
                scope.truncate(depth);
                Ok(Type::Exists { vars: vars.clone(), body: Box::new(body), constraint })
            }
            Type::Qual { constraint, body } => {
                let constraint = self.resolve_clist(constraint, scope, span)?;
                let body = self.resolve_type(body, scope, span)?;
                Ok(Type::Qual { constraint, body: Box::new(body) })
            }
        }
    }
}

pub fn subst_type_vars(t: &Type, subst: &BTreeMap<String, Type>) -> Type {
    match t {
        Type::Var(v) => subst.get(v).cloned().unwrap_or_else(|| t.clone()),
        Type::Uvar(_) | Type::Skolem(_) => t.clone(),
        Type::Con(n, args) => {
            Type::Con(n.clone(), args.iter().map(|a| subst_type_vars(a, subst)).collect())
        }
        Type::Arrow(m, a, b) => Type::Arrow(
            *m,
            Box::new(subst_type_vars(a, subst)),
            Box::new(subst_type_vars(b, subst)),
        ),
        Type::Exists { vars, body, constraint } => {
            // Bound variables shadow.
            let mut inner = subst.clone();
            for v in vars {
                inner.remove(v);
            }
            Type::Exists {
                vars: vars.clone(),
                body: Box::new(subst_type_vars(body, &inner)),
                constraint: subst_clist(constraint, &inner),
            }
        }
        Type::Qual { constraint, body } => Type::Qual {
            constraint: subst_clist(constraint, subst),
            body: Box::new(subst_type_vars(body, subst)),
        },
    }
}

pub fn subst_clist(cs: &CList, subst: &BTreeMap<String, Type>) -> CList {
    cs.iter()
        .map(|a| CAtom {
            mult: a.mult,
            class: a.class.clone(),
            args: a.args.iter().map(|t| subst_type_vars(t, subst)).collect(),
            span: a.span.clone(),
        })
        .collect()
}

// ---------------------------------------------------------------------------
// usage maps
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Usage {
    Zero,
    Once,
    Many,
}

impl Usage {
    fn add(self, other: Usage) -> Usage {
        match (self, other) {
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

pub type UsageMap = BTreeMap<String, Usage>;

fn usage_add(a: UsageMap, b: &UsageMap) -> UsageMap {
    let mut out = a;
    for (k, v) in b {
        let u = out.entry(k.clone()).or_insert(Usage::Zero);
        *u = u.add(*v);
    }
    out
}

fn usage_scale(mut a: UsageMap, m: Mult) -> UsageMap {
    for v in a.values_mut() {
        *v = v.scale(m);
    }
    a
}

// ---------------------------------------------------------------------------
// derivations
// ---------------------------------------------------------------------------

pub type NodeId = u32;

/// A typing derivation node. Types are fully resolved after checking.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub id: NodeId,
    pub ty: Type,
    pub span: Span,
    pub usage: UsageMap,
    pub node: DNode,
}

#[derive(Clone, Debug)]
pub enum DNode {
    Var {
        name: String,
        /// Instantiated constraint in declared order; empty for plain
        /// binders without an evidence interface.
        constraint: CList,
        /// The types instantiating the binding's quantified variables.
        inst: Vec<Type>,
        /// Whether the variable's core translation takes an evidence
        /// argument (scheme- or qualified-type-bound).
        evidence: bool,
    },
    CtorRef {
        name: String,
        inst: Vec<Type>,
    },
    IntLit(i64),
    StrLit(String),
    Lambda {
        binder: String,
        mult: Mult,
        binder_ty: Type,
        body: Box<Derivation>,
    },
    App {
        /// Multiplicity of the applied arrow.
        mult: Mult,
        func: Box<Derivation>,
        arg: Box<Derivation>,
    },
    Pack {
        /// Constraint packaged with the payload, declared order,
        /// fully instantiated. Empty for the degenerate package.
        constraint: CList,
        payload: Box<Derivation>,
    },
    Unpack {
        binder: String,
        /// Given constraint brought into scope (instantiated at skolems);
        /// empty for the degenerate unpack of a bare value.
        given: CList,
        rhs: Box<Derivation>,
        body: Box<Derivation>,
    },
    Case {
        mult: Mult,
        scrut: Box<Derivation>,
        alts: Vec<DAlt>,
    },
    Let {
        mult: Mult,
        binder: String,
        /// Local assumption from an annotated let; empty otherwise.
        given: CList,
        rhs: Box<Derivation>,
        body: Box<Derivation>,
    },
    /// Checking an expression against a qualified type `Q =o t`:
    /// the constraint becomes a local given around the body.
    QualAbs {
        given: CList,
        body: Box<Derivation>,
    },
}

// ---------------------------------------------------------------------------
// the checker
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
struct Binding {
    mult: Mult,
    vars: Vec<String>,
    constraint: CList,
    ty: Type,
    /// True when uses translate to an evidence application.
    evidence: bool,
}

struct Checker<'e> {
    env: &'e GlobalEnv,
    subst: BTreeMap<u32, Type>,
    next_uvar: u32,
    next_skolem: u32,
    next_node: NodeId,
    locals: Vec<(String, Binding)>,
}

/// Check every declaration of a program; returns derivations in source
/// order for declarations that have bodies.
pub fn check_program(
    env: &GlobalEnv,
    prog: &Program,
) -> Result<Vec<(String, Derivation)>, TypeError> {
    let mut out = Vec::new();
    for v in &prog.values {
        if v.body.is_some() {
            out.push((v.name.clone(), check_decl(env, v)?));
        }
    }
    Ok(out)
}

pub fn check_decl(env: &GlobalEnv, decl: &ValueDecl) -> Result<Derivation, TypeError> {
    let body = decl
        .body
        .as_ref()
        .expect("check_decl needs a declaration body");
    let scheme = env.resolve_scheme(&decl.scheme, &decl.span)?;
    let mut ck = Checker {
        env,
        subst: BTreeMap::new(),
        next_uvar: 0,
        next_skolem: 0,
        next_node: 0,
        locals: Vec::new(),
    };
    let (deriv, _usage) = ck.check(body, &scheme.ty)?;
    ck.zonk_derivation(deriv)
}

/// Instantiate a scheme: fresh unification variables (or the supplied
/// types) replace the quantified variables in both the type and the
/// constraint.
pub fn instantiate_scheme(
    scheme: &Scheme,
    args: Option<Vec<Type>>,
    fresh: &mut impl FnMut() -> Type,
    span: &Span,
) -> Result<(Type, CList, BTreeMap<String, Type>), TypeError> {
    let chosen: Vec<Type> = match args {
        Some(tys) => {
            if tys.len() != scheme.vars.len() {
                return Err(TypeError::new(
                    TypeErrorKind::Arity,
                    format!(
                        "scheme expects {} type arguments, got {}",
                        scheme.vars.len(),
                        tys.len()
                    ),
                    span,
                ));
            }
            tys
        }
        None => scheme.vars.iter().map(|_| fresh()).collect(),
    };
    let subst: BTreeMap<String, Type> =
        scheme.vars.iter().cloned().zip(chosen).collect();
    Ok((
        subst_type_vars(&scheme.ty, &subst),
        subst_clist(&scheme.constraint, &subst),
        subst,
    ))
}

impl<'e> Checker<'e> {
    fn fresh_uvar(&mut self) -> Type {
        let n = self.next_uvar;
        self.next_uvar += 1;
        Type::Uvar(n)
    }

    fn fresh_skolem(&mut self) -> Type {
        let n = self.next_skolem;
        self.next_skolem += 1;
        Type::Skolem(n)
    }

    fn node_id(&mut self) -> NodeId {
        let n = self.next_node;
        self.next_node += 1;
        n
    }

    fn lookup(&self, name: &str) -> Option<Binding> {
        for (n, b) in self.locals.iter().rev() {
            if n == name {
                return Some(b.clone());
            }
        }
        self.env.values.get(name).map(|s| Binding {
            mult: Mult::Many,
            vars: s.vars.clone(),
            constraint: s.constraint.clone(),
            ty: s.ty.clone(),
            evidence: true,
        })
    }

    /// Bind a local variable; qualified types carry their constraint as
    /// an evidence interface.
    fn push_local(&mut self, name: &str, mult: Mult, ty: Type) {
        let binding = match self.resolve(&ty) {
            Type::Qual { constraint, body } => Binding {
                mult,
                vars: vec![],
                constraint,
                ty: *body,
                evidence: true,
            },
            other => Binding { mult, vars: vec![], constraint: vec![], ty: other, evidence: false },
        };
        self.locals.push((name.to_string(), binding));
    }

    fn pop_local(&mut self) {
        self.locals.pop();
    }

    /// Validate a binder's usage against its multiplicity and drop it
    /// from the map.
    fn retire_binder(
        &self,
        usage: &mut UsageMap,
        name: &str,
        mult: Mult,
        span: &Span,
    ) -> Result<(), TypeError> {
        let u = usage.remove(name).unwrap_or(Usage::Zero);
        if mult == Mult::One && u != Usage::Once {
            let how = match u {
                Usage::Zero => "never used",
                Usage::Once => unreachable!(),
                Usage::Many => "used more than once",
            };
            return Err(TypeError::new(
                TypeErrorKind::Linearity,
                format!("linear binder `{name}` is {how}"),
                span,
            ));
        }
        Ok(())
    }

    // ----- unification ---------------------------------------------------

    fn resolve(&self, t: &Type) -> Type {
        match t {
            Type::Uvar(n) => match self.subst.get(n) {
                Some(bound) => self.resolve(&bound.clone()),
                None => t.clone(),
            },
            Type::Con(name, args) => {
                Type::Con(name.clone(), args.iter().map(|a| self.resolve(a)).collect())
            }
            Type::Arrow(m, a, b) => {
                Type::Arrow(*m, Box::new(self.resolve(a)), Box::new(self.resolve(b)))
            }
            Type::Exists { vars, body, constraint } => Type::Exists {
                vars: vars.clone(),
                body: Box::new(self.resolve(body)),
                constraint: self.resolve_clist_types(constraint),
            },
            Type::Qual { constraint, body } => Type::Qual {
                constraint: self.resolve_clist_types(constraint),
                body: Box::new(self.resolve(body)),
            },
            _ => t.clone(),
        }
    }

    fn resolve_clist_types(&self, cs: &CList) -> CList {
        cs.iter()
            .map(|a| CAtom {
                mult: a.mult,
                class: a.class.clone(),
                args: a.args.iter().map(|t| self.resolve(t)).collect(),
                span: a.span.clone(),
            })
            .collect()
    }

    fn occurs(&self, n: u32, t: &Type) -> bool {
        match t {
            Type::Uvar(m) => {
                if *m == n {
                    return true;
                }
                match self.subst.get(m) {
                    Some(bound) => self.occurs(n, &bound.clone()),
                    None => false,
                }
            }
            Type::Con(_, args) => args.iter().any(|a| self.occurs(n, a)),
            Type::Arrow(_, a, b) => self.occurs(n, a) || self.occurs(n, b),
            Type::Exists { body, constraint, .. } => {
                self.occurs(n, body)
                    || constraint.iter().any(|c| c.args.iter().any(|a| self.occurs(n, a)))
            }
            Type::Qual { constraint, body } => {
                self.occurs(n, body)
                    || constraint.iter().any(|c| c.args.iter().any(|a| self.occurs(n, a)))
            }
            _ => false,
        }
    }

    fn unify(&mut self, a: &Type, b: &Type, span: &Span) -> Result<(), TypeError> {
        let a = self.resolve(a);
        let b = self.resolve(b);
        match (&a, &b) {
            (Type::Uvar(n), Type::Uvar(m)) if n == m => Ok(()),
            (Type::Uvar(n), other) | (other, Type::Uvar(n)) => {
                if self.occurs(*n, other) {
                    return Err(TypeError::new(
                        TypeErrorKind::Mismatch,
                        format!("cannot construct the infinite type _u{n} = {other}"),
                        span,
                    ));
                }
                self.subst.insert(*n, other.clone());
                Ok(())
            }
            (Type::Var(x), Type::Var(y)) if x == y => Ok(()),
            (Type::Skolem(x), Type::Skolem(y)) if x == y => Ok(()),
            (Type::Con(n1, a1), Type::Con(n2, a2)) if n1 == n2 && a1.len() == a2.len() => {
                for (x, y) in a1.iter().zip(a2) {
                    self.unify(x, y, span)?;
                }
                Ok(())
            }
            (Type::Arrow(m1, d1, c1), Type::Arrow(m2, d2, c2)) if m1 == m2 => {
                self.unify(d1, d2, span)?;
                self.unify(c1, c2, span)
            }
            (
                Type::Exists { vars: v1, body: b1, constraint: c1 },
                Type::Exists { vars: v2, body: b2, constraint: c2 },
            ) if v1.len() == v2.len() => {
                // Alpha-rename both sides to shared skolems.
                let fresh: Vec<Type> = v1.iter().map(|_| self.fresh_skolem()).collect();
                let s1: BTreeMap<String, Type> = v1.iter().cloned().zip(fresh.clone()).collect();
                let s2: BTreeMap<String, Type> = v2.iter().cloned().zip(fresh).collect();
                self.unify(&subst_type_vars(b1, &s1), &subst_type_vars(b2, &s2), span)?;
                self.unify_clist(&subst_clist(c1, &s1), &subst_clist(c2, &s2), span)
            }
            (
                Type::Qual { constraint: c1, body: b1 },
                Type::Qual { constraint: c2, body: b2 },
            ) => {
                self.unify_clist(c1, c2, span)?;
                self.unify(b1, b2, span)
            }
            _ => Err(TypeError::new(
                TypeErrorKind::Mismatch,
                format!("type mismatch: expected {b}, found {a}"),
                span,
            )),
        }
    }

    fn unify_clist(&mut self, a: &CList, b: &CList, span: &Span) -> Result<(), TypeError> {
        if a.len() != b.len() {
            return Err(TypeError::new(
                TypeErrorKind::Mismatch,
                "constraints have different shapes",
                span,
            ));
        }
        for (x, y) in a.iter().zip(b) {
            if x.class != y.class || x.mult != y.mult || x.args.len() != y.args.len() {
                return Err(TypeError::new(
                    TypeErrorKind::Mismatch,
                    format!("constraint mismatch: `{}` vs `{}`", x.class, y.class),
                    span,
                ));
            }
            for (s, t) in x.args.iter().zip(&y.args) {
                self.unify(s, t, span)?;
            }
        }
        Ok(())
    }

    // ----- checking --------------------------------------------------------

    fn check(&mut self, e: &Expr, expected: &Type) -> Result<(Derivation, UsageMap), TypeError> {
        let expected = self.resolve(expected);
        match (&expected, e) {
            // An expected qualified type turns into a local assumption.
            (Type::Qual { constraint, body }, _) => {
                let constraint = constraint.clone();
                let body_ty = (**body).clone();
                let (inner, usage) = self.check(e, &body_ty)?;
                let id = self.node_id();
                Ok((
                    Derivation {
                        id,
                        ty: expected.clone(),
                        span: e.span().clone(),
                        usage: usage.clone(),
                        node: DNode::QualAbs { given: constraint, body: Box::new(inner) },
                    },
                    usage,
                ))
            }
            (Type::Arrow(m, dom, cod), Expr::Lambda(binder, body, span)) => {
                let (m, dom, cod) = (*m, (**dom).clone(), (**cod).clone());
                self.push_local(binder, m, dom.clone());
                let res = self.check(body, &cod);
                self.pop_local();
                let (body_deriv, mut usage) = res?;
                self.retire_binder(&mut usage, binder, m, span)?;
                let id = self.node_id();
                Ok((
                    Derivation {
                        id,
                        ty: expected.clone(),
                        span: span.clone(),
                        usage: usage.clone(),
                        node: DNode::Lambda {
                            binder: binder.clone(),
                            mult: m,
                            binder_ty: dom,
                            body: Box::new(body_deriv),
                        },
                    },
                    usage,
                ))
            }
            (_, Expr::Lambda(_, _, span)) => Err(TypeError::new(
                TypeErrorKind::Mismatch,
                format!("a lambda cannot have type {expected}"),
                span,
            )),
            (Type::Exists { vars, body, constraint }, Expr::Pack(payload, span)) => {
                let (vars, body_ty, constraint) =
                    (vars.clone(), (**body).clone(), constraint.clone());
                let witnesses: Vec<Type> = vars.iter().map(|_| self.fresh_uvar()).collect();
                let subst: BTreeMap<String, Type> =
                    vars.iter().cloned().zip(witnesses).collect();
                let (payload_deriv, usage) =
                    self.check(payload, &subst_type_vars(&body_ty, &subst))?;
                let pkg = subst_clist(&constraint, &subst);
                let id = self.node_id();
                Ok((
                    Derivation {
                        id,
                        ty: expected.clone(),
                        span: span.clone(),
                        usage: usage.clone(),
                        node: DNode::Pack { constraint: pkg, payload: Box::new(payload_deriv) },
                    },
                    usage,
                ))
            }
            (_, Expr::Pack(payload, span)) => {
                // The degenerate package `exists . t * ()` is just `t`.
                let (payload_deriv, usage) = self.check(payload, &expected)?;
                let id = self.node_id();
                Ok((
                    Derivation {
                        id,
                        ty: expected.clone(),
                        span: span.clone(),
                        usage: usage.clone(),
                        node: DNode::Pack {
                            constraint: vec![],
                            payload: Box::new(payload_deriv),
                        },
                    },
                    usage,
                ))
            }
            (_, Expr::Unpack { .. }) => self.check_unpack(e, Some(&expected)),
            (_, Expr::Case { .. }) => self.check_case(e, Some(&expected)),
            (_, Expr::Let { .. }) => self.check_let(e, Some(&expected)),
            _ => {
                if let Some((name, args)) = ctor_spine(e) {
                    return self.check_ctor_spine(e, &name, &args, &expected);
                }
                let (deriv, usage, found) = self.infer(e)?;
                self.unify(&found, &expected, e.span())?;
                Ok((deriv, usage))
            }
        }
    }

    /// Checking a constructor application against a known type: the
    /// result type fixes the instantiation, which then flows into the
    /// argument checks.
    fn check_ctor_spine(
        &mut self,
        whole: &Expr,
        name: &str,
        args: &[&Expr],
        expected: &Type,
    ) -> Result<(Derivation, UsageMap), TypeError> {
        let span = whole.span().clone();
        let sig = self.env.ctors.get(name).cloned().ok_or_else(|| {
            TypeError::new(TypeErrorKind::UnknownName, format!("unknown constructor `{name}`"), &span)
        })?;
        if args.len() > sig.fields.len() {
            return Err(TypeError::new(
                TypeErrorKind::Arity,
                format!("constructor `{name}` applied to too many arguments"),
                &span,
            ));
        }
        let inst: Vec<Type> = sig.vars.iter().map(|_| self.fresh_uvar()).collect();
        let subst: BTreeMap<String, Type> =
            sig.vars.iter().cloned().zip(inst.clone()).collect();
        // Type remaining after the supplied arguments, unified with the
        // expectation up front.
        let mut remaining = Type::Con(sig.data.clone(), inst.clone());
        for (m, field) in sig.fields.iter().skip(args.len()).rev() {
            remaining =
                Type::Arrow(*m, Box::new(subst_type_vars(field, &subst)), Box::new(remaining));
        }
        self.unify(&remaining, expected, &span)?;
        let head_id = self.node_id();
        let mut cur_ty = {
            let mut t = Type::Con(sig.data.clone(), inst.clone());
            for (m, field) in sig.fields.iter().rev() {
                t = Type::Arrow(*m, Box::new(subst_type_vars(field, &subst)), Box::new(t));
            }
            t
        };
        let mut deriv = Derivation {
            id: head_id,
            ty: cur_ty.clone(),
            span: span.clone(),
            usage: UsageMap::new(),
            node: DNode::CtorRef { name: name.to_string(), inst },
        };
        let mut usage = UsageMap::new();
        for arg in args {
            let Type::Arrow(m, dom, cod) = self.resolve(&cur_ty) else { unreachable!() };
            let (arg_deriv, arg_usage) = self.check(arg, &dom)?;
            usage = usage_add(usage, &usage_scale(arg_usage, m));
            let id = self.node_id();
            deriv = Derivation {
                id,
                ty: (*cod).clone(),
                span: span.clone(),
                usage: usage.clone(),
                node: DNode::App { mult: m, func: Box::new(deriv), arg: Box::new(arg_deriv) },
            };
            cur_ty = *cod;
        }
        Ok((deriv, usage))
    }

    fn infer(&mut self, e: &Expr) -> Result<(Derivation, UsageMap, Type), TypeError> {
        match e {
            Expr::Var(name, span) => {
                let binding = self.lookup(name).ok_or_else(|| {
                    TypeError::new(
                        TypeErrorKind::UnknownName,
                        format!("unknown name `{name}`"),
                        span,
                    )
                })?;
                let scheme = Scheme {
                    vars: binding.vars.clone(),
                    constraint: binding.constraint.clone(),
                    ty: binding.ty.clone(),
                };
                let mut fresh = {
                    let next = &mut self.next_uvar;
                    move || {
                        let n = *next;
                        *next += 1;
                        Type::Uvar(n)
                    }
                };
                let (ty, constraint, subst) =
                    instantiate_scheme(&scheme, None, &mut fresh, span)?;
                let inst: Vec<Type> =
                    binding.vars.iter().map(|v| subst[v].clone()).collect();
                let usage: UsageMap = [(name.clone(), Usage::Once)].into();
                let id = self.node_id();
                Ok((
                    Derivation {
                        id,
                        ty: ty.clone(),
                        span: span.clone(),
                        usage: usage.clone(),
                        node: DNode::Var {
                            name: name.clone(),
                            constraint,
                            inst,
                            evidence: binding.evidence,
                        },
                    },
                    usage,
                    ty,
                ))
            }
            Expr::Ctor(name, span) => {
                let sig = self.env.ctors.get(name).cloned().ok_or_else(|| {
                    TypeError::new(
                        TypeErrorKind::UnknownName,
                        format!("unknown constructor `{name}`"),
                        span,
                    )
                })?;
                let inst: Vec<Type> = sig.vars.iter().map(|_| self.fresh_uvar()).collect();
                let subst: BTreeMap<String, Type> =
                    sig.vars.iter().cloned().zip(inst.clone()).collect();
                let result = Type::Con(sig.data.clone(), inst.clone());
                let mut ty = result;
                for (m, field) in sig.fields.iter().rev() {
                    ty = Type::Arrow(*m, Box::new(subst_type_vars(field, &subst)), Box::new(ty));
                }
                let id = self.node_id();
                Ok((
                    Derivation {
                        id,
                        ty: ty.clone(),
                        span: span.clone(),
                        usage: UsageMap::new(),
                        node: DNode::CtorRef { name: name.clone(), inst },
                    },
                    UsageMap::new(),
                    ty,
                ))
            }
            Expr::Int(n, span) => {
                let id = self.node_id();
                let ty = Type::int();
                Ok((
                    Derivation {
                        id,
                        ty: ty.clone(),
                        span: span.clone(),
                        usage: UsageMap::new(),
                        node: DNode::IntLit(*n),
                    },
                    UsageMap::new(),
                    ty,
                ))
            }
            Expr::Str(s, span) => {
                let id = self.node_id();
                let ty = Type::Con("Str".into(), vec![]);
                Ok((
                    Derivation {
                        id,
                        ty: ty.clone(),
                        span: span.clone(),
                        usage: UsageMap::new(),
                        node: DNode::StrLit(s.clone()),
                    },
                    UsageMap::new(),
                    ty,
                ))
            }
            Expr::App(f, a, span) => {
                let (f_deriv, f_usage, f_ty) = self.infer(f)?;
                let (mult, dom, cod) = match self.resolve(&f_ty) {
                    Type::Arrow(m, dom, cod) => (m, *dom, *cod),
                    other => {
                        return Err(TypeError::new(
                            TypeErrorKind::Mismatch,
                            format!("cannot apply a value of type {other}"),
                            f.span(),
                        ))
                    }
                };
                let (a_deriv, a_usage) = self.check(a, &dom)?;
                let usage = usage_add(f_usage, &usage_scale(a_usage, mult));
                let id = self.node_id();
                Ok((
                    Derivation {
                        id,
                        ty: cod.clone(),
                        span: span.clone(),
                        usage: usage.clone(),
                        node: DNode::App {
                            mult,
                            func: Box::new(f_deriv),
                            arg: Box::new(a_deriv),
                        },
                    },
                    usage,
                    cod,
                ))
            }
            Expr::Pack(payload, span) => {
                // In inference position a pack is the degenerate package.
                let (payload_deriv, usage, ty) = self.infer(payload)?;
                let id = self.node_id();
                Ok((
                    Derivation {
                        id,
                        ty: ty.clone(),
                        span: span.clone(),
                        usage: usage.clone(),
                        node: DNode::Pack { constraint: vec![], payload: Box::new(payload_deriv) },
                    },
                    usage,
                    ty,
                ))
            }
            Expr::Lambda(_, _, span) => Err(TypeError::new(
                TypeErrorKind::AnnotationRequired,
                "cannot infer the type of a lambda; add an annotation",
                span,
            )),
            Expr::Unpack { .. } => {
                let (d, u) = self.check_unpack(e, None)?;
                let ty = d.ty.clone();
                Ok((d, u, ty))
            }
            Expr::Case { .. } => {
                let (d, u) = self.check_case(e, None)?;
                let ty = d.ty.clone();
                Ok((d, u, ty))
            }
            Expr::Let { .. } => {
                let (d, u) = self.check_let(e, None)?;
                let ty = d.ty.clone();
                Ok((d, u, ty))
            }
        }
    }

    fn check_unpack(
        &mut self,
        e: &Expr,
        expected: Option<&Type>,
    ) -> Result<(Derivation, UsageMap), TypeError> {
        let Expr::Unpack { binder, rhs, body, span } = e else { unreachable!() };
        let (rhs_deriv, rhs_usage, rhs_ty) = self.infer(rhs)?;
        let (payload_ty, given) = match self.resolve(&rhs_ty) {
            Type::Exists { vars, body, constraint } => {
                let skolems: Vec<Type> = vars.iter().map(|_| self.fresh_skolem()).collect();
                let subst: BTreeMap<String, Type> = vars.into_iter().zip(skolems).collect();
                (subst_type_vars(&body, &subst), subst_clist(&constraint, &subst))
            }
            // Unpacking a bare value: the degenerate package.
            other => (other, vec![]),
        };
        self.push_local(binder, Mult::One, payload_ty);
        let res = match expected {
            Some(t) => self.check(body, t),
            None => self.infer(body).map(|(d, u, _)| (d, u)),
        };
        self.pop_local();
        let (body_deriv, mut body_usage) = res?;
        self.retire_binder(&mut body_usage, binder, Mult::One, span)?;
        let usage = usage_add(rhs_usage, &body_usage);
        let ty = body_deriv.ty.clone();
        let id = self.node_id();
        Ok((
            Derivation {
                id,
                ty,
                span: span.clone(),
                usage: usage.clone(),
                node: DNode::Unpack {
                    binder: binder.clone(),
                    given,
                    rhs: Box::new(rhs_deriv),
                    body: Box::new(body_deriv),
                },
            },
            usage,
        ))
    }

    fn check_case(
        &mut self,
        e: &Expr,
        expected: Option<&Type>,
    ) -> Result<(Derivation, UsageMap), TypeError> {
        let Expr::Case { mult, scrutinee, alts, span } = e else { unreachable!() };
        let (scrut_deriv, scrut_usage, scrut_ty) = self.infer(scrutinee)?;
        let (data_name, ty_args) = match self.resolve(&scrut_ty) {
            Type::Con(name, args) if self.env.data_ctors.contains_key(&name) => (name, args),
            other => {
                return Err(TypeError::new(
                    TypeErrorKind::Mismatch,
                    format!("cannot case on a value of type {other}"),
                    scrutinee.span(),
                ))
            }
        };
        // Exhaustiveness: the alternatives must cover the constructors.
        let all = self.env.data_ctors[&data_name].clone();
        let covered: Vec<&str> = alts.iter().map(|a| a.ctor.as_str()).collect();
        for c in &all {
            if !covered.contains(&c.as_str()) {
                return Err(TypeError::new(
                    TypeErrorKind::Mismatch,
                    format!("case is missing an alternative for constructor `{c}`"),
                    span,
                ));
            }
        }
        let mut result_ty: Option<Type> = expected.cloned();
        let mut branch_results: Vec<(crate::ast::Alt, Derivation, UsageMap)> = Vec::new();
        for alt in alts {
            let sig = self.env.ctors.get(&alt.ctor).cloned().ok_or_else(|| {
                TypeError::new(
                    TypeErrorKind::UnknownName,
                    format!("unknown constructor `{}`", alt.ctor),
                    &alt.span,
                )
            })?;
            if sig.data != data_name {
                return Err(TypeError::new(
                    TypeErrorKind::Mismatch,
                    format!("constructor `{}` does not belong to `{data_name}`", alt.ctor),
                    &alt.span,
                ));
            }
            if sig.fields.len() != alt.binders.len() {
                return Err(TypeError::new(
                    TypeErrorKind::Arity,
                    format!(
                        "constructor `{}` has {} fields, pattern binds {}",
                        alt.ctor,
                        sig.fields.len(),
                        alt.binders.len()
                    ),
                    &alt.span,
                ));
            }
            let subst: BTreeMap<String, Type> =
                sig.vars.iter().cloned().zip(ty_args.iter().cloned()).collect();
            let mut field_info = Vec::new();
            for (binder, (fmult, fty)) in alt.binders.iter().zip(&sig.fields) {
                let bound_mult = mult.mul(*fmult);
                let fty = subst_type_vars(fty, &subst);
                self.push_local(binder, bound_mult, fty);
                field_info.push((binder.clone(), bound_mult));
            }
            let res = match &result_ty {
                Some(t) => {
                    let t = t.clone();
                    self.check(&alt.body, &t)
                }
                None => self.infer(&alt.body).map(|(d, u, ty)| {
                    result_ty = Some(ty);
                    (d, u)
                }),
            };
            for _ in &field_info {
                self.pop_local();
            }
            let (body_deriv, mut body_usage) = res?;
            for (binder, bmult) in field_info.iter().rev() {
                self.retire_binder(&mut body_usage, binder, *bmult, &alt.span)?;
            }
            branch_results.push((alt.clone(), body_deriv, body_usage));
        }
        // Branches must agree on the usage of linear variables.
        let branch_usage = self.join_branches(&branch_results, span)?;
        let usage = usage_add(usage_scale(scrut_usage, *mult), &branch_usage);
        let ty = result_ty.expect("case has at least one branch");
        let dalts: Vec<DAlt> = branch_results
            .into_iter()
            .map(|(alt, deriv, _)| DAlt {
                ctor: alt.ctor,
                binders: alt.binders,
                span: alt.span,
                body: deriv,
            })
            .collect();
        let id = self.node_id();
        Ok((
            Derivation {
                id,
                ty: ty.clone(),
                span: span.clone(),
                usage: usage.clone(),
                node: DNode::Case { mult: *mult, scrut: Box::new(scrut_deriv), alts: dalts },
            },
            usage,
        ))
    }

    fn join_branches(
        &self,
        branches: &[(crate::ast::Alt, Derivation, UsageMap)],
        span: &Span,
    ) -> Result<UsageMap, TypeError> {
        let mut names: Vec<String> = Vec::new();
        for (_, _, u) in branches {
            for k in u.keys() {
                if !names.contains(k) {
                    names.push(k.clone());
                }
            }
        }
        let mut out = UsageMap::new();
        for name in names {
            let usages: Vec<Usage> = branches
                .iter()
                .map(|(_, _, u)| u.get(&name).copied().unwrap_or(Usage::Zero))
                .collect();
            let first = usages[0];
            let agree = usages.iter().all(|u| *u == first);
            let linear = self
                .locals
                .iter()
                .rev()
                .find(|(n, _)| *n == name)
                .map(|(_, b)| b.mult == Mult::One)
                .unwrap_or(false);
            if linear && !agree {
                return Err(TypeError::new(
                    TypeErrorKind::Linearity,
                    format!("case branches disagree on the use of linear binder `{name}`"),
                    span,
                ));
            }
            let joined = if agree { first } else { Usage::Many };
            if joined != Usage::Zero {
                out.insert(name, joined);
            }
        }
        Ok(out)
    }

    fn check_let(
        &mut self,
        e: &Expr,
        expected: Option<&Type>,
    ) -> Result<(Derivation, UsageMap), TypeError> {
        let Expr::Let { mult, binder, scheme, rhs, body, span } = e else { unreachable!() };
        let (rhs_deriv, rhs_usage, given, binding) = match scheme {
            None => {
                let (d, u, ty) = self.infer(rhs)?;
                let binding = Binding {
                    mult: *mult,
                    vars: vec![],
                    constraint: vec![],
                    ty,
                    evidence: true,
                };
                (d, u, vec![], binding)
            }
            Some(s) => {
                let s = self.env.resolve_scheme(s, span)?;
                // Check the right-hand side at a skolemized instance.
                let skolems: Vec<Type> = s.vars.iter().map(|_| self.fresh_skolem()).collect();
                let subst: BTreeMap<String, Type> =
                    s.vars.iter().cloned().zip(skolems).collect();
                let rhs_ty = subst_type_vars(&s.ty, &subst);
                let given = subst_clist(&s.constraint, &subst);
                let (d, u) = self.check(rhs, &rhs_ty)?;
                let binding = Binding {
                    mult: *mult,
                    vars: s.vars.clone(),
                    constraint: s.constraint.clone(),
                    ty: s.ty.clone(),
                    evidence: true,
                };
                (d, u, given, binding)
            }
        };
        self.locals.push((binder.clone(), binding));
        let res = match expected {
            Some(t) => self.check(body, t),
            None => self.infer(body).map(|(d, u, _)| (d, u)),
        };
        self.pop_local();
        let (body_deriv, mut body_usage) = res?;
        self.retire_binder(&mut body_usage, binder, *mult, span)?;
        let usage = usage_add(usage_scale(rhs_usage, *mult), &body_usage);
        let ty = body_deriv.ty.clone();
        let id = self.node_id();
        Ok((
            Derivation {
                id,
                ty,
                span: span.clone(),
                usage: usage.clone(),
                node: DNode::Let {
                    mult: *mult,
                    binder: binder.clone(),
                    given,
                    rhs: Box::new(rhs_deriv),
                    body: Box::new(body_deriv),
                },
            },
            usage,
        ))
    }

    // ----- zonking ---------------------------------------------------------

    fn zonk_derivation(&self, d: Derivation) -> Result<Derivation, TypeError> {
        let ty = self.zonk_type(&d.ty, &d.span)?;
        let node = match d.node {
            DNode::Var { name, constraint, inst, evidence } => DNode::Var {
                name,
                constraint: self.zonk_clist(&constraint, &d.span)?,
                inst: inst
                    .iter()
                    .map(|t| self.zonk_type(t, &d.span))
                    .collect::<Result<_, _>>()?,
                evidence,
            },
            DNode::CtorRef { name, inst } => DNode::CtorRef {
                name,
                inst: inst
                    .iter()
                    .map(|t| self.zonk_type(t, &d.span))
                    .collect::<Result<_, _>>()?,
            },
            DNode::IntLit(n) => DNode::IntLit(n),
            DNode::StrLit(s) => DNode::StrLit(s),
            DNode::Lambda { binder, mult, binder_ty, body } => DNode::Lambda {
                binder,
                mult,
                binder_ty: self.zonk_type(&binder_ty, &d.span)?,
                body: Box::new(self.zonk_derivation(*body)?),
            },
            DNode::App { mult, func, arg } => DNode::App {
                mult,
                func: Box::new(self.zonk_derivation(*func)?),
                arg: Box::new(self.zonk_derivation(*arg)?),
            },
            DNode::Pack { constraint, payload } => DNode::Pack {
                constraint: self.zonk_clist(&constraint, &d.span)?,
                payload: Box::new(self.zonk_derivation(*payload)?),
            },
            DNode::Unpack { binder, given, rhs, body } => DNode::Unpack {
                binder,
                given: self.zonk_clist(&given, &d.span)?,
                rhs: Box::new(self.zonk_derivation(*rhs)?),
                body: Box::new(self.zonk_derivation(*body)?),
            },
            DNode::Case { mult, scrut, alts } => DNode::Case {
                mult,
                scrut: Box::new(self.zonk_derivation(*scrut)?),
                alts: alts
                    .into_iter()
                    .map(|a| {
                        Ok(DAlt {
                            ctor: a.ctor,
                            binders: a.binders,
                            span: a.span,
                            body: self.zonk_derivation(a.body)?,
                        })
                    })
                    .collect::<Result<_, TypeError>>()?,
            },
            DNode::Let { mult, binder, given, rhs, body } => DNode::Let {
                mult,
                binder,
                given: self.zonk_clist(&given, &d.span)?,
                rhs: Box::new(self.zonk_derivation(*rhs)?),
                body: Box::new(self.zonk_derivation(*body)?),
            },
            DNode::QualAbs { given, body } => DNode::QualAbs {
                given: self.zonk_clist(&given, &d.span)?,
                body: Box::new(self.zonk_derivation(*body)?),
            },
        };
        Ok(Derivation { id: d.id, ty, span: d.span, usage: d.usage, node })
    }

    fn zonk_type(&self, t: &Type, span: &Span) -> Result<Type, TypeError> {
        let t = self.resolve(t);
        if let Some(u) = first_uvar(&t) {
            return Err(TypeError::new(
                TypeErrorKind::Unresolved,
                format!("could not determine an instantiation (_u{u} in {t})"),
                span,
            ));
        }
        Ok(t)
    }

    fn zonk_clist(&self, cs: &CList, span: &Span) -> Result<CList, TypeError> {
        let cs = self.resolve_clist_types(cs);
        for a in &cs {
            for t in &a.args {
                if let Some(u) = first_uvar(t) {
                    return Err(TypeError::new(
                        TypeErrorKind::Unresolved,
                        format!("could not determine a constraint instantiation (_u{u})"),
                        span,
                    ));
                }
            }
        }
        Ok(cs)
    }
}

/// Decompose `K e1 .. ek` into its constructor head and arguments.
fn ctor_spine<'a>(e: &'a Expr) -> Option<(String, Vec<&'a Expr>)> {
    let mut args = Vec::new();
    let mut cur = e;
    loop {
        match cur {
            Expr::App(f, a, _) => {
                args.push(a.as_ref());
                cur = f;
            }
            Expr::Ctor(name, _) => {
                args.reverse();
                return Some((name.clone(), args));
            }
            _ => return None,
        }
    }
}

fn first_uvar(t: &Type) -> Option<u32> {
    match t {
        Type::Uvar(n) => Some(*n),
        Type::Con(_, args) => args.iter().find_map(first_uvar),
        Type::Arrow(_, a, b) => first_uvar(a).or_else(|| first_uvar(b)),
        Type::Exists { body, constraint, .. } | Type::Qual { constraint, body } => {
            first_uvar(body).or_else(|| constraint.iter().find_map(|c| c.args.iter().find_map(first_uvar)))
        }
        _ => None,
    }
}

#[derive(Clone, Debug)]
pub struct DAlt {
    pub ctor: String,
    pub binders: Vec<String>,
    pub span: Span,
    pub body: Derivation,
}

/// Turn a resolved constraint atom into an algebra atom. Type arguments
/// must be fully resolved; variables of the ambient declaration and
/// skolems both print as rigid names.
pub fn atom_of_catom(a: &CAtom) -> (Mult, Atom) {
    let args = a
        .args
        .iter()
        .map(|t| Arg::Rigid(crate::pretty::type_to_string(t)))
        .collect();
    (a.mult, Atom::new(&a.class, args))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    fn check_src(src: &str) -> Result<Vec<(String, Derivation)>, TypeError> {
        let empty = Program::default();
        let prog = parse_program("t.lq", src).expect("parse");
        let env = GlobalEnv::build(&empty, &prog)?;
        check_program(&env, &prog)
    }

    #[test]
    fn identity_is_linear() {
        let out = check_src("id :: forall a. a -o a\nid = \\x -> x\n").unwrap();
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn duplicating_a_linear_binder_fails() {
        let err = check_src(
            "dup2 :: forall a. a -o (a, a)\ndup2 = \\x -> (x, x)\n",
        )
        .unwrap_err();
        assert_eq!(err.kind, TypeErrorKind::Linearity);
        assert!(err.message.contains('x'));
    }

    #[test]
    fn discarding_a_linear_binder_fails() {
        let err = check_src("drop2 :: forall a b. a -o b -> b\ndrop2 = \\x -> \\y -> y\n")
            .unwrap_err();
        assert_eq!(err.kind, TypeErrorKind::Linearity);
    }

    #[test]
    fn unrestricted_binder_is_flexible() {
        check_src("both :: forall a. a -> (a, a)\nboth = \\x -> (x, x)\n").unwrap();
        check_src("none :: forall a b. a -> b -o b\nnone = \\x -> \\y -> y\n").unwrap();
    }

    #[test]
    fn case_branches_must_agree_on_linear_use() {
        let err = check_src(
            "pick :: forall a. Bool -> a -o a\n\
             pick b x = case @w b of { True -> x; False -> x }\n",
        );
        assert!(err.is_ok(), "{err:?}");
        let err = check_src(
            "data Opt = None | Some\n\
             bad :: forall a. Opt -> a -o ()\n\
             bad o x = case @w o of { None -> (); Some -> () }\n",
        )
        .unwrap_err();
        // x is unused in both branches (agreeing), so the error is the
        // lambda's linearity, not branch disagreement.
        assert_eq!(err.kind, TypeErrorKind::Linearity);
    }

    #[test]
    fn instantiation_is_solved_by_unification() {
        check_src(
            "konst :: forall a b. a -o b -> a\nkonst x y = x\n\
             use :: Int -o Int\nuse n = konst n ()\n",
        )
        .unwrap();
    }

    #[test]
    fn case_must_be_exhaustive() {
        let err = check_src(
            "f :: Bool -> Bool\nf b = case @w b of { True -> False }\n",
        )
        .unwrap_err();
        assert!(err.message.contains("missing an alternative"));
    }

    #[test]
    fn unpack_introduces_skolems() {
        check_src(
            "class Cap n\n\
             acquire :: exists n. Ur (UArray Int n) * Cap n\n\
             releaseCap :: forall n. Cap n =o UArray Int n -> Int\n\
             use :: Int\n\
             use = let pack x = acquire in case @1 x of { Ur arr -> releaseCap arr }\n",
        )
        .unwrap();
    }

    #[test]
    fn phantom_witness_is_ambiguous() {
        // A witness variable that appears only in the constraint cannot
        // be determined by rigid unification.
        let err = check_src(
            "class Cap n\n\
             make :: forall a. a -o exists n. a * Cap n\nmake = \\x -> pack x\n",
        )
        .unwrap_err();
        assert_eq!(err.kind, TypeErrorKind::Unresolved);
    }

    #[test]
    fn lambda_in_inference_position_needs_annotation() {
        let err =
            check_src("f :: Int -> Int\nf x = let @w g = \\y -> y in x\n").unwrap_err();
        assert_eq!(err.kind, TypeErrorKind::AnnotationRequired);
    }
}
