//! Surface abstract syntax.
//!
//! The parser produces this tree with do-notation, `if`, `$` and nested
//! patterns already expanded, so everything downstream sees only the
//! kernel grammar: variables, constructors, lambdas, applications,
//! pack/unpack, case and let.

use std::fmt;

use crate::constraint::Mult;
use crate::span::Span;

#[derive(Clone, Debug, Default)]
pub struct Program {
    pub classes: Vec<ClassDecl>,
    pub synonyms: Vec<SynonymDecl>,
    pub datas: Vec<DataDecl>,
    pub values: Vec<ValueDecl>,
}

/// `class C a1 .. ak`, optionally `dup class` for duplicable classes.
#[derive(Clone, Debug)]
pub struct ClassDecl {
    pub name: String,
    pub params: Vec<String>,
    pub duplicable: bool,
    pub span: Span,
}

/// `constraint RW n = (Read n, Write n)`.
#[derive(Clone, Debug)]
pub struct SynonymDecl {
    pub name: String,
    pub params: Vec<String>,
    pub expansion: Vec<CAtom>,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct DataDecl {
    pub name: String,
    pub params: Vec<String>,
    pub ctors: Vec<CtorDecl>,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct CtorDecl {
    pub name: String,
    pub fields: Vec<(Mult, Type)>,
    pub span: Span,
}

/// A top-level value: a signature plus an optional body. A signature
/// without a body declares a primitive or a postulate.
#[derive(Clone, Debug)]
pub struct ValueDecl {
    pub name: String,
    pub scheme: Scheme,
    pub body: Option<Expr>,
    pub span: Span,
}

/// One atom of a surface constraint, before synonym expansion.
#[derive(Clone, Debug)]
pub struct CAtom {
    pub mult: Mult,
    pub class: String,
    pub args: Vec<Type>,
    pub span: Span,
}

/// Equality on constraint atoms is structural; spans don't count.
impl PartialEq for CAtom {
    fn eq(&self, other: &CAtom) -> bool {
        self.mult == other.mult && self.class == other.class && self.args == other.args
    }
}

/// An ordered surface constraint (the order fixes evidence shapes).
pub type CList = Vec<CAtom>;

#[derive(Clone, Debug, PartialEq)]
pub struct Scheme {
    pub vars: Vec<String>,
    pub constraint: CList,
    pub ty: Type,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Type {
    /// A quantified or existentially bound type variable.
    Var(String),
    /// Type constructor application, fully saturated.
    Con(String, Vec<Type>),
    Arrow(Mult, Box<Type>, Box<Type>),
    /// `exists as. body * Q`; the degenerate `exists . t * ()` never
    /// exists, it normalizes to `t` at construction.
    Exists { vars: Vec<String>, body: Box<Type>, constraint: CList },
    /// A monomorphic qualified type `Q =o t`, used for values such as
    /// release operators that carry constraints first-class.
    Qual { constraint: CList, body: Box<Type> },
    /// Checker-internal: a unification variable.
    Uvar(u32),
    /// Checker-internal: a rigid skolem introduced by unpack.
    Skolem(u32),
}

impl Type {
    pub fn unit() -> Type {
        Type::Con("Unit".into(), vec![])
    }

    pub fn int() -> Type {
        Type::Con("Int".into(), vec![])
    }

    pub fn bool() -> Type {
        Type::Con("Bool".into(), vec![])
    }

    pub fn pair(a: Type, b: Type) -> Type {
        Type::Con("Pair".into(), vec![a, b])
    }

    pub fn ur(a: Type) -> Type {
        Type::Con("Ur".into(), vec![a])
    }

    /// Normalizing constructor: an existential with no binders and no
    /// constraint is just its body.
    pub fn exists(vars: Vec<String>, body: Type, constraint: CList) -> Type {
        if vars.is_empty() && constraint.is_empty() {
            body
        } else {
            Type::Exists { vars, body: Box::new(body), constraint }
        }
    }
}

#[derive(Clone, Debug)]
pub enum Expr {
    Var(String, Span),
    Ctor(String, Span),
    Int(i64, Span),
    Str(String, Span),
    Lambda(String, Box<Expr>, Span),
    App(Box<Expr>, Box<Expr>, Span),
    /// `pack e` (also produced for `Linearly.return e`).
    Pack(Box<Expr>, Span),
    /// `let pack x = e1 in e2`.
    Unpack { binder: String, rhs: Box<Expr>, body: Box<Expr>, span: Span },
    Case { mult: Mult, scrutinee: Box<Expr>, alts: Vec<Alt>, span: Span },
    Let {
        mult: Mult,
        binder: String,
        scheme: Option<Scheme>,
        rhs: Box<Expr>,
        body: Box<Expr>,
        span: Span,
    },
}

#[derive(Clone, Debug)]
pub struct Alt {
    pub ctor: String,
    pub binders: Vec<String>,
    pub body: Expr,
    pub span: Span,
}

impl Expr {
    pub fn span(&self) -> &Span {
        match self {
            Expr::Var(_, s)
            | Expr::Ctor(_, s)
            | Expr::Int(_, s)
            | Expr::Str(_, s)
            | Expr::Lambda(_, _, s)
            | Expr::App(_, _, s)
            | Expr::Pack(_, s)
            | Expr::Unpack { span: s, .. }
            | Expr::Case { span: s, .. }
            | Expr::Let { span: s, .. } => s,
        }
    }

    pub fn app(f: Expr, arg: Expr) -> Expr {
        let span = f.span().to(arg.span());
        Expr::App(Box::new(f), Box::new(arg), span)
    }

    /// Structural equality ignoring spans; the parse/print round trip is
    /// checked with this.
    pub fn same_shape(&self, other: &Expr) -> bool {
        use Expr::*;
        match (self, other) {
            (Var(a, _), Var(b, _)) | (Ctor(a, _), Ctor(b, _)) | (Str(a, _), Str(b, _)) => a == b,
            (Int(a, _), Int(b, _)) => a == b,
            (Lambda(x, e, _), Lambda(y, f, _)) => x == y && e.same_shape(f),
            (App(f, a, _), App(g, b, _)) => f.same_shape(g) && a.same_shape(b),
            (Pack(a, _), Pack(b, _)) => a.same_shape(b),
            (
                Unpack { binder: x, rhs: r1, body: b1, .. },
                Unpack { binder: y, rhs: r2, body: b2, .. },
            ) => x == y && r1.same_shape(r2) && b1.same_shape(b2),
            (
                Case { mult: m1, scrutinee: s1, alts: a1, .. },
                Case { mult: m2, scrutinee: s2, alts: a2, .. },
            ) => {
                m1 == m2
                    && s1.same_shape(s2)
                    && a1.len() == a2.len()
                    && a1.iter().zip(a2).all(|(x, y)| {
                        x.ctor == y.ctor && x.binders == y.binders && x.body.same_shape(&y.body)
                    })
            }
            (
                Let { mult: m1, binder: x, scheme: s1, rhs: r1, body: b1, .. },
                Let { mult: m2, binder: y, scheme: s2, rhs: r2, body: b2, .. },
            ) => {
                m1 == m2
                    && x == y
                    && scheme_eq(s1, s2)
                    && r1.same_shape(r2)
                    && b1.same_shape(b2)
            }
            _ => false,
        }
    }
}

fn scheme_eq(a: &Option<Scheme>, b: &Option<Scheme>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(a), Some(b)) => {
            a.vars == b.vars && a.ty == b.ty && clist_eq(&a.constraint, &b.constraint)
        }
        _ => false,
    }
}

pub fn clist_eq(a: &CList, b: &CList) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| x.mult == y.mult && x.class == y.class && x.args == y.args)
}

pub fn program_same_shape(a: &Program, b: &Program) -> bool {
    let classes = a.classes.len() == b.classes.len()
        && a.classes.iter().zip(&b.classes).all(|(x, y)| {
            x.name == y.name && x.params == y.params && x.duplicable == y.duplicable
        });
    let syns = a.synonyms.len() == b.synonyms.len()
        && a.synonyms.iter().zip(&b.synonyms).all(|(x, y)| {
            x.name == y.name && x.params == y.params && clist_eq(&x.expansion, &y.expansion)
        });
    let datas = a.datas.len() == b.datas.len()
        && a.datas.iter().zip(&b.datas).all(|(x, y)| {
            x.name == y.name
                && x.params == y.params
                && x.ctors.len() == y.ctors.len()
                && x.ctors.iter().zip(&y.ctors).all(|(c, d)| {
                    c.name == d.name
                        && c.fields.len() == d.fields.len()
                        && c.fields.iter().zip(&d.fields).all(|(f, g)| f == g)
                })
        });
    let values = a.values.len() == b.values.len()
        && a.values.iter().zip(&b.values).all(|(x, y)| {
            x.name == y.name
                && x.scheme.vars == y.scheme.vars
                && clist_eq(&x.scheme.constraint, &y.scheme.constraint)
                && x.scheme.ty == y.scheme.ty
                && match (&x.body, &y.body) {
                    (None, None) => true,
                    (Some(e), Some(f)) => e.same_shape(f),
                    _ => false,
                }
        });
    classes && syns && datas && values
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::pretty::type_to_string(self))
    }
}
