//! Recursive-descent parser for `.lq` source.
//!
//! Do-notation, `if`/`&&`/`||`, `$` and nested patterns are expanded here,
//! so the resulting [`Program`] contains only kernel expressions.
//!
//! Statements of a `Linearly.do` block follow the standard translation:
//! a variable bind unpacks the package directly, a pattern bind unpacks
//! and then matches strictly, and a bare statement sequences through a
//! unit match. Case expressions written inside a do block default to
//! multiplicity `@1`, elsewhere to `@w`.

use crate::ast::*;
use crate::constraint::Mult;
use crate::lexer::{lex, LexError, Tok, Token};
use crate::span::Span;

#[derive(Clone, Debug)]
pub struct ParseError {
    pub message: String,
    pub span: Span,
    pub expected: Vec<String>,
}

impl ParseError {
    fn new(message: impl Into<String>, span: Span) -> ParseError {
        ParseError { message: message.into(), span, expected: Vec::new() }
    }
}

impl From<LexError> for ParseError {
    fn from(e: LexError) -> ParseError {
        ParseError::new(e.message, e.span)
    }
}

pub fn parse_program(file: &str, src: &str) -> Result<Program, ParseError> {
    let toks = lex(file, src)?;
    let mut p = Parser { toks, pos: 0, fresh: 0, do_depth: 0, file: file.to_string() };
    p.program()
}

/// Parse a single expression; used by tests.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let toks = lex("<expr>", src)?;
    let mut p = Parser { toks, pos: 0, fresh: 0, do_depth: 0, file: "<expr>".into() };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(ParseError::new("trailing input after expression", p.here()));
    }
    Ok(e)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    fresh: u32,
    do_depth: usize,
    file: String,
}

/// Patterns as written; compiled away during parsing.
#[derive(Clone, Debug)]
enum Pat {
    Var(String, Span),
    Wild(Span),
    Ctor(String, Vec<Pat>, Span),
}

impl Pat {
    fn span(&self) -> &Span {
        match self {
            Pat::Var(_, s) | Pat::Wild(s) | Pat::Ctor(_, _, s) => s,
        }
    }
}

impl Parser {
    fn here(&self) -> Span {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|t| t.span.clone())
            .unwrap_or_else(|| {
                Span::new(std::sync::Arc::from(self.file.as_str()), 1, 1, 1, 1)
            })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, off: usize) -> Option<&Tok> {
        self.toks.get(self.pos + off).map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok, what: &str) -> Result<Span, ParseError> {
        match self.toks.get(self.pos) {
            Some(t) if &t.tok == tok => {
                self.pos += 1;
                Ok(t.span.clone())
            }
            _ => {
                let mut err = ParseError::new(format!("expected {what}"), self.here());
                err.expected.push(what.to_string());
                Err(err)
            }
        }
    }

    fn try_eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn fresh_name(&mut self, prefix: &str) -> String {
        let n = self.fresh;
        self.fresh += 1;
        format!("_{prefix}{n}")
    }

    /// True when the current token begins a new top-level declaration.
    fn at_decl_boundary(&self) -> bool {
        self.toks.get(self.pos).map(|t| t.decl_start).unwrap_or(true)
    }

    fn lower(&mut self, what: &str) -> Result<(String, Span), ParseError> {
        match self.next() {
            Some(Token { tok: Tok::Lower(s), span, .. }) => Ok((s, span)),
            t => Err(ParseError::new(
                format!("expected {what}"),
                t.map(|t| t.span).unwrap_or_else(|| self.here()),
            )),
        }
    }

    fn upper(&mut self, what: &str) -> Result<(String, Span), ParseError> {
        match self.next() {
            Some(Token { tok: Tok::Upper(s), span, .. }) => Ok((s, span)),
            t => Err(ParseError::new(
                format!("expected {what}"),
                t.map(|t| t.span).unwrap_or_else(|| self.here()),
            )),
        }
    }

    // ----- programs ------------------------------------------------------

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut prog = Program::default();
        while self.pos < self.toks.len() {
            match self.peek() {
                Some(Tok::Class) => {
                    let d = self.class_decl(false)?;
                    prog.classes.push(d);
                }
                Some(Tok::Dup) if self.peek_at(1) == Some(&Tok::Class) => {
                    self.next();
                    let d = self.class_decl(true)?;
                    prog.classes.push(d);
                }
                // `dup`, `div` and `mod` double as prelude value names.
                Some(Tok::Dup) => {
                    let d = self.value_decl()?;
                    prog.values.push(d);
                }
                Some(Tok::Op(op)) if matches!(op.as_str(), "div" | "mod") => {
                    let d = self.value_decl()?;
                    prog.values.push(d);
                }
                Some(Tok::Data) => {
                    let d = self.data_decl()?;
                    prog.datas.push(d);
                }
                Some(Tok::Constraint) => {
                    let d = self.synonym_decl()?;
                    prog.synonyms.push(d);
                }
                Some(Tok::Lower(_)) | Some(Tok::LParen) => {
                    let d = self.value_decl()?;
                    prog.values.push(d);
                }
                _ => {
                    return Err(ParseError::new(
                        "expected a declaration (class, data, constraint, or a value)",
                        self.here(),
                    ))
                }
            }
        }
        Ok(prog)
    }

    fn class_decl(&mut self, duplicable: bool) -> Result<ClassDecl, ParseError> {
        let start = self.eat(&Tok::Class, "`class`")?;
        let (name, _) = self.upper("class name")?;
        let mut params = Vec::new();
        while let Some(Tok::Lower(_)) = self.peek() {
            if self.at_decl_boundary() {
                break;
            }
            params.push(self.lower("class parameter")?.0);
        }
        Ok(ClassDecl { name, params, duplicable, span: start })
    }

    fn synonym_decl(&mut self) -> Result<SynonymDecl, ParseError> {
        let start = self.eat(&Tok::Constraint, "`constraint`")?;
        let (name, _) = self.upper("constraint synonym name")?;
        let mut params = Vec::new();
        while let Some(Tok::Lower(_)) = self.peek() {
            params.push(self.lower("synonym parameter")?.0);
        }
        self.eat(&Tok::Equals, "`=`")?;
        let expansion = self.constraint_group()?;
        Ok(SynonymDecl { name, params, expansion, span: start })
    }

    fn data_decl(&mut self) -> Result<DataDecl, ParseError> {
        let start = self.eat(&Tok::Data, "`data`")?;
        let (name, _) = self.upper("datatype name")?;
        let mut params = Vec::new();
        while let Some(Tok::Lower(_)) = self.peek() {
            params.push(self.lower("type parameter")?.0);
        }
        self.eat(&Tok::Equals, "`=`")?;
        let mut ctors = Vec::new();
        loop {
            let (cname, cspan) = self.upper("constructor name")?;
            let mut fields = Vec::new();
            loop {
                let mult = match self.peek() {
                    Some(Tok::MultAnn(m)) => {
                        let m = *m;
                        self.next();
                        m
                    }
                    _ => Mult::One,
                };
                if self.starts_atype() && !self.at_decl_boundary() {
                    let ty = self.atype()?;
                    fields.push((mult, ty));
                } else {
                    break;
                }
            }
            ctors.push(CtorDecl { name: cname, fields, span: cspan });
            if !self.try_eat(&Tok::Pipe) {
                break;
            }
        }
        Ok(DataDecl { name, params, ctors, span: start })
    }

    fn decl_name(&mut self) -> Result<(String, Span), ParseError> {
        // Either a plain identifier or a parenthesized operator name.
        if self.peek() == Some(&Tok::Dup) {
            let span = self.next().unwrap().span;
            return Ok(("dup".into(), span));
        }
        if let Some(Tok::Op(op)) = self.peek() {
            if matches!(op.as_str(), "div" | "mod") {
                let op = op.clone();
                let span = self.next().unwrap().span;
                return Ok((op, span));
            }
        }
        if self.peek() == Some(&Tok::LParen) {
            let start = self.eat(&Tok::LParen, "`(`")?;
            let name = match self.next() {
                Some(Token { tok: Tok::Op(op), .. }) => op,
                Some(Token { tok: Tok::Star, .. }) => "*".to_string(),
                t => {
                    return Err(ParseError::new(
                        "expected an operator name",
                        t.map(|t| t.span).unwrap_or_else(|| self.here()),
                    ))
                }
            };
            self.eat(&Tok::RParen, "`)`")?;
            Ok((name, start))
        } else {
            self.lower("value name")
        }
    }

    fn value_decl(&mut self) -> Result<ValueDecl, ParseError> {
        let (name, span) = self.decl_name()?;
        self.eat(&Tok::DoubleColon, "`::`")?;
        let scheme = self.scheme()?;
        // An immediately following definition of the same name is the body.
        let body = if self.at_decl_boundary() && self.defines(&name) {
            let _ = self.decl_name()?;
            let mut params = Vec::new();
            while let Some(Tok::Lower(_)) = self.peek() {
                params.push(self.lower("parameter")?.clone());
            }
            self.eat(&Tok::Equals, "`=`")?;
            let mut body = self.expr()?;
            for (p, pspan) in params.into_iter().rev() {
                let span = pspan.to(body.span());
                body = Expr::Lambda(p, Box::new(body), span);
            }
            Some(body)
        } else {
            None
        };
        Ok(ValueDecl { name, scheme, body, span })
    }

    fn defines(&self, name: &str) -> bool {
        match self.peek() {
            Some(Tok::Dup) => name == "dup",
            Some(Tok::Op(op)) if matches!(op.as_str(), "div" | "mod") => op == name,
            Some(Tok::Lower(s)) => s == name,
            Some(Tok::LParen) => matches!(
                (self.peek_at(1), self.peek_at(2)),
                (Some(Tok::Op(op)), Some(Tok::RParen)) if op == name
            ) || matches!(
                (self.peek_at(1), self.peek_at(2)),
                (Some(Tok::Star), Some(Tok::RParen)) if name == "*"
            ),
            _ => false,
        }
    }

    // ----- types and schemes ---------------------------------------------

    fn scheme(&mut self) -> Result<Scheme, ParseError> {
        let mut vars = Vec::new();
        if self.try_eat(&Tok::Forall) {
            while let Some(Tok::Lower(_)) = self.peek() {
                vars.push(self.lower("type variable")?.0);
            }
            self.eat(&Tok::Dot, "`.` after forall binders")?;
        }
        let (constraint, ty) = self.qualified_type()?;
        Ok(Scheme { vars, constraint, ty })
    }

    /// `[Q (=o|=>)] type`, with backtracking over the constraint prefix.
    fn qualified_type(&mut self) -> Result<(CList, Type), ParseError> {
        if let Some(clist) = self.try_constraint_prefix()? {
            let ty = self.type_()?;
            return Ok((clist, ty));
        }
        Ok((Vec::new(), self.type_()?))
    }

    fn try_constraint_prefix(&mut self) -> Result<Option<CList>, ParseError> {
        let save = self.pos;
        let group = match self.constraint_group() {
            Ok(g) => g,
            Err(_) => {
                self.pos = save;
                return Ok(None);
            }
        };
        match self.peek() {
            Some(Tok::LollyArrow) => {
                self.next();
                Ok(Some(group))
            }
            Some(Tok::FatArrow) => {
                self.next();
                // An unrestricted constraint arrow makes every atom `w`.
                Ok(Some(
                    group.into_iter().map(|mut a| {
                        a.mult = Mult::Many;
                        a
                    }).collect(),
                ))
            }
            _ => {
                self.pos = save;
                Ok(None)
            }
        }
    }

    /// A constraint: one atom, or a parenthesized comma-separated list.
    /// Atoms default to linear; a `w.` prefix makes one unrestricted.
    fn constraint_group(&mut self) -> Result<CList, ParseError> {
        if self.try_eat(&Tok::LParen) {
            if self.try_eat(&Tok::RParen) {
                return Ok(Vec::new());
            }
            let mut atoms = vec![self.constraint_atom(true)?];
            while self.try_eat(&Tok::Comma) {
                atoms.push(self.constraint_atom(true)?);
            }
            self.eat(&Tok::RParen, "`)` after constraint")?;
            Ok(atoms)
        } else {
            Ok(vec![self.constraint_atom(false)?])
        }
    }

    fn constraint_atom(&mut self, in_parens: bool) -> Result<CAtom, ParseError> {
        let mult = if self.peek() == Some(&Tok::Lower("w".into()))
            && self.peek_at(1) == Some(&Tok::Dot)
        {
            self.next();
            self.next();
            Mult::Many
        } else {
            Mult::One
        };
        let (class, span) = self.upper("constraint class")?;
        let mut args = Vec::new();
        loop {
            // Outside parentheses only variable arguments are collected,
            // so that `Linearly =o Int -> ..` keeps `Int` in the type.
            let take = if in_parens {
                self.starts_atype()
            } else {
                matches!(self.peek(), Some(Tok::Lower(_))) && !self.at_decl_boundary()
            };
            if !take {
                break;
            }
            args.push(self.atype()?);
        }
        Ok(CAtom { mult, class, args, span })
    }

    fn type_(&mut self) -> Result<Type, ParseError> {
        // A qualified type may appear wherever a type does.
        if let Some(clist) = self.try_constraint_prefix()? {
            let body = self.type_()?;
            return Ok(Type::Qual { constraint: clist, body: Box::new(body) });
        }
        let lhs = self.tensor_type()?;
        match self.peek() {
            Some(Tok::ArrowMany) => {
                self.next();
                Ok(Type::Arrow(Mult::Many, Box::new(lhs), Box::new(self.type_()?)))
            }
            Some(Tok::ArrowOne) => {
                self.next();
                Ok(Type::Arrow(Mult::One, Box::new(lhs), Box::new(self.type_()?)))
            }
            _ => Ok(lhs),
        }
    }

    fn tensor_type(&mut self) -> Result<Type, ParseError> {
        if self.try_eat(&Tok::Exists) {
            let mut vars = Vec::new();
            while let Some(Tok::Lower(_)) = self.peek() {
                vars.push(self.lower("existential variable")?.0);
            }
            self.eat(&Tok::Dot, "`.` after exists binders")?;
            let body = self.app_type()?;
            let constraint =
                if self.try_eat(&Tok::Star) { self.constraint_group()? } else { Vec::new() };
            return Ok(Type::exists(vars, body, constraint));
        }
        let body = self.app_type()?;
        if self.try_eat(&Tok::Star) {
            let constraint = self.constraint_group()?;
            return Ok(Type::exists(Vec::new(), body, constraint));
        }
        Ok(body)
    }

    fn app_type(&mut self) -> Result<Type, ParseError> {
        // Only a bare constructor name heads an application.
        if let Some(Tok::Upper(_)) = self.peek() {
            let (name, _) = self.upper("type constructor")?;
            let mut args = Vec::new();
            while self.starts_atype() && !self.at_decl_boundary() {
                args.push(self.atype()?);
            }
            return Ok(Type::Con(name, args));
        }
        self.atype()
    }

    fn starts_atype(&self) -> bool {
        matches!(self.peek(), Some(Tok::Upper(_)) | Some(Tok::Lower(_)) | Some(Tok::LParen))
    }

    fn atype(&mut self) -> Result<Type, ParseError> {
        match self.next() {
            Some(Token { tok: Tok::Upper(name), .. }) => Ok(Type::Con(name, vec![])),
            Some(Token { tok: Tok::Lower(name), .. }) => Ok(Type::Var(name)),
            Some(Token { tok: Tok::LParen, .. }) => {
                if self.try_eat(&Tok::RParen) {
                    return Ok(Type::unit());
                }
                let first = self.type_()?;
                if self.try_eat(&Tok::Comma) {
                    let second = self.type_()?;
                    self.eat(&Tok::RParen, "`)` after pair type")?;
                    return Ok(Type::pair(first, second));
                }
                self.eat(&Tok::RParen, "`)`")?;
                Ok(first)
            }
            t => Err(ParseError::new(
                "expected a type",
                t.map(|t| t.span).unwrap_or_else(|| self.here()),
            )),
        }
    }

    // ----- expressions -----------------------------------------------------

    fn default_case_mult(&self) -> Mult {
        if self.do_depth > 0 {
            Mult::One
        } else {
            Mult::Many
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.dollar_expr()
    }

    fn dollar_expr(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.or_expr()?;
        if self.peek() == Some(&Tok::Op("$".into())) {
            self.next();
            let rhs = self.dollar_expr()?;
            return Ok(Expr::app(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or_expr(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.and_expr()?;
        if self.peek() == Some(&Tok::Op("||".into())) {
            self.next();
            let rhs = self.or_expr()?;
            let span = lhs.span().to(rhs.span());
            return Ok(self.bool_case(lhs, Expr::Ctor("True".into(), span.clone()), rhs, span));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.cmp_expr()?;
        if self.peek() == Some(&Tok::Op("&&".into())) {
            self.next();
            let rhs = self.and_expr()?;
            let span = lhs.span().to(rhs.span());
            return Ok(self.bool_case(lhs, rhs, Expr::Ctor("False".into(), span.clone()), span));
        }
        Ok(lhs)
    }

    fn bool_case(&mut self, cond: Expr, then: Expr, els: Expr, span: Span) -> Expr {
        Expr::Case {
            mult: self.default_case_mult(),
            scrutinee: Box::new(cond),
            alts: vec![
                Alt { ctor: "True".into(), binders: vec![], span: then.span().clone(), body: then },
                Alt { ctor: "False".into(), binders: vec![], span: els.span().clone(), body: els },
            ],
            span,
        }
    }

    fn cmp_expr(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.add_expr()?;
        if let Some(Tok::Op(op)) = self.peek() {
            if matches!(op.as_str(), "<" | "<=" | ">" | ">=" | "==" | "/=") {
                let op = op.clone();
                let opspan = self.next().unwrap().span;
                let rhs = self.add_expr()?;
                return Ok(Expr::app(Expr::app(Expr::Var(op, opspan), lhs), rhs));
            }
        }
        Ok(lhs)
    }

    fn add_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.mul_expr()?;
        loop {
            match self.peek() {
                Some(Tok::Op(op)) if matches!(op.as_str(), "+" | "-") => {
                    let op = op.clone();
                    let opspan = self.next().unwrap().span;
                    let rhs = self.mul_expr()?;
                    lhs = Expr::app(Expr::app(Expr::Var(op, opspan), lhs), rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn mul_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.app_expr()?;
        loop {
            match self.peek() {
                Some(Tok::Op(op)) if matches!(op.as_str(), "div" | "mod") => {
                    let op = op.clone();
                    let opspan = self.next().unwrap().span;
                    let rhs = self.app_expr()?;
                    lhs = Expr::app(Expr::app(Expr::Var(op, opspan), lhs), rhs);
                }
                Some(Tok::Star) => {
                    let opspan = self.next().unwrap().span;
                    let rhs = self.app_expr()?;
                    lhs = Expr::app(Expr::app(Expr::Var("*".into(), opspan), lhs), rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn app_expr(&mut self) -> Result<Expr, ParseError> {
        let mut head = self.atom_expr()?;
        while self.starts_atom_expr() && !self.at_decl_boundary() {
            let arg = self.atom_expr()?;
            head = Expr::app(head, arg);
        }
        Ok(head)
    }

    fn starts_atom_expr(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Lower(_))
                | Some(Tok::Upper(_))
                | Some(Tok::Int(_))
                | Some(Tok::Str(_))
                | Some(Tok::LParen)
        )
    }

    fn atom_expr(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Lower(_)) => {
                let (name, span) = self.lower("variable")?;
                Ok(Expr::Var(name, span))
            }
            Some(Tok::Dup) => {
                let span = self.next().unwrap().span;
                Ok(Expr::Var("dup".into(), span))
            }
            Some(Tok::Upper(_)) => {
                let (name, span) = self.upper("constructor")?;
                Ok(Expr::Ctor(name, span))
            }
            Some(Tok::Int(n)) => {
                let span = self.next().unwrap().span;
                Ok(Expr::Int(n, span))
            }
            Some(Tok::Str(s)) => {
                let span = self.next().unwrap().span;
                Ok(Expr::Str(s, span))
            }
            Some(Tok::LParen) => {
                let start = self.eat(&Tok::LParen, "`(`")?;
                if let Some(Tok::RParen) = self.peek() {
                    let end = self.next().unwrap().span;
                    return Ok(Expr::Ctor("Unit".into(), start.to(&end)));
                }
                let first = self.expr()?;
                if self.try_eat(&Tok::Comma) {
                    let second = self.expr()?;
                    let end = self.eat(&Tok::RParen, "`)` after pair")?;
                    let span = start.to(&end);
                    let pair = Expr::Ctor("Pair".into(), span.clone());
                    return Ok(Expr::app(Expr::app(pair, first), second));
                }
                self.eat(&Tok::RParen, "`)`")?;
                Ok(first)
            }
            Some(Tok::Lambda) => {
                let start = self.eat(&Tok::Lambda, "`\\`")?;
                let mut params = Vec::new();
                while let Some(Tok::Lower(_)) = self.peek() {
                    params.push(self.lower("lambda parameter")?);
                }
                if params.is_empty() {
                    return Err(ParseError::new("lambda needs at least one parameter", start));
                }
                self.eat(&Tok::ArrowMany, "`->` after lambda parameters")?;
                let mut body = self.expr()?;
                for (p, _) in params.into_iter().rev() {
                    let span = start.to(body.span());
                    body = Expr::Lambda(p, Box::new(body), span);
                }
                Ok(body)
            }
            Some(Tok::Let) => self.let_expr(),
            Some(Tok::Case) => self.case_expr(),
            Some(Tok::If) => self.if_expr(),
            Some(Tok::Pack) => {
                let start = self.eat(&Tok::Pack, "`pack`")?;
                let e = self.atom_expr()?;
                let span = start.to(e.span());
                Ok(Expr::Pack(Box::new(e), span))
            }
            Some(Tok::LinearlyReturn) => {
                let start = self.next().unwrap().span;
                let e = self.atom_expr()?;
                let span = start.to(e.span());
                Ok(Expr::Pack(Box::new(e), span))
            }
            Some(Tok::LinearlyDo) => self.do_block(),
            _ => Err(ParseError::new("expected an expression", self.here())),
        }
    }

    fn let_expr(&mut self) -> Result<Expr, ParseError> {
        let start = self.eat(&Tok::Let, "`let`")?;
        if self.try_eat(&Tok::Pack) {
            let (binder, _) = self.lower("binder")?;
            self.eat(&Tok::Equals, "`=`")?;
            let rhs = self.expr()?;
            self.eat(&Tok::In, "`in`")?;
            let body = self.expr()?;
            let span = start.to(body.span());
            return Ok(Expr::Unpack { binder, rhs: Box::new(rhs), body: Box::new(body), span });
        }
        let mult = match self.peek() {
            Some(Tok::MultAnn(m)) => {
                let m = *m;
                self.next();
                m
            }
            _ => {
                if self.do_depth > 0 {
                    Mult::One
                } else {
                    Mult::Many
                }
            }
        };
        let (binder, _) = self.lower("binder")?;
        let scheme = if self.try_eat(&Tok::DoubleColon) { Some(self.scheme()?) } else { None };
        self.eat(&Tok::Equals, "`=`")?;
        let rhs = self.expr()?;
        self.eat(&Tok::In, "`in`")?;
        let body = self.expr()?;
        let span = start.to(body.span());
        Ok(Expr::Let { mult, binder, scheme, rhs: Box::new(rhs), body: Box::new(body), span })
    }

    fn case_expr(&mut self) -> Result<Expr, ParseError> {
        let start = self.eat(&Tok::Case, "`case`")?;
        let mult = match self.peek() {
            Some(Tok::MultAnn(m)) => {
                let m = *m;
                self.next();
                m
            }
            _ => self.default_case_mult(),
        };
        let scrutinee = self.expr()?;
        self.eat(&Tok::Of, "`of`")?;
        self.eat(&Tok::LBrace, "`{` (case alternatives need braces)")?;
        let mut arms = Vec::new();
        loop {
            let pat = self.pattern()?;
            self.eat(&Tok::ArrowMany, "`->` in case alternative")?;
            let body = self.expr()?;
            arms.push((pat, body));
            if !self.try_eat(&Tok::Semi) {
                break;
            }
        }
        let end = self.eat(&Tok::RBrace, "`}` after case alternatives")?;
        let span = start.to(&end);
        let alts = self.compile_alts(arms, mult)?;
        Ok(Expr::Case { mult, scrutinee: Box::new(scrutinee), alts, span })
    }

    fn if_expr(&mut self) -> Result<Expr, ParseError> {
        let start = self.eat(&Tok::If, "`if`")?;
        let cond = self.expr()?;
        self.eat(&Tok::Then, "`then`")?;
        let then = self.expr()?;
        self.eat(&Tok::Else, "`else`")?;
        let els = self.expr()?;
        let span = start.to(els.span());
        Ok(self.bool_case(cond, then, els, span))
    }

    // ----- patterns --------------------------------------------------------

    fn pattern(&mut self) -> Result<Pat, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Underscore) => {
                let span = self.next().unwrap().span;
                Ok(Pat::Wild(span))
            }
            Some(Tok::Lower(_)) => {
                let (name, span) = self.lower("pattern variable")?;
                Ok(Pat::Var(name, span))
            }
            Some(Tok::Upper(_)) => {
                let (name, span) = self.upper("constructor pattern")?;
                let mut subs = Vec::new();
                while self.starts_pattern_atom() {
                    subs.push(self.pattern_atom()?);
                }
                Ok(Pat::Ctor(name, subs, span))
            }
            Some(Tok::LParen) => self.pattern_atom(),
            _ => Err(ParseError::new("expected a pattern", self.here())),
        }
    }

    fn starts_pattern_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Lower(_)) | Some(Tok::Upper(_)) | Some(Tok::LParen) | Some(Tok::Underscore)
        )
    }

    fn pattern_atom(&mut self) -> Result<Pat, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Underscore) => {
                let span = self.next().unwrap().span;
                Ok(Pat::Wild(span))
            }
            Some(Tok::Lower(_)) => {
                let (name, span) = self.lower("pattern variable")?;
                Ok(Pat::Var(name, span))
            }
            Some(Tok::Upper(_)) => {
                let (name, span) = self.upper("constructor pattern")?;
                Ok(Pat::Ctor(name, vec![], span))
            }
            Some(Tok::LParen) => {
                let start = self.eat(&Tok::LParen, "`(`")?;
                if let Some(Tok::RParen) = self.peek() {
                    let end = self.next().unwrap().span;
                    return Ok(Pat::Ctor("Unit".into(), vec![], start.to(&end)));
                }
                let first = self.pattern()?;
                if self.try_eat(&Tok::Comma) {
                    let second = self.pattern()?;
                    let end = self.eat(&Tok::RParen, "`)` after pair pattern")?;
                    return Ok(Pat::Ctor("Pair".into(), vec![first, second], start.to(&end)));
                }
                self.eat(&Tok::RParen, "`)`")?;
                Ok(first)
            }
            _ => Err(ParseError::new("expected a pattern", self.here())),
        }
    }

    /// Compile alternatives with possibly nested patterns into flat
    /// constructor alternatives; nested fields match in cascaded cases.
    /// Matching below an `Ur` pattern switches to multiplicity `@w`,
    /// since the payload of `Ur` is unrestricted.
    fn compile_alts(&mut self, arms: Vec<(Pat, Expr)>, mult: Mult) -> Result<Vec<Alt>, ParseError> {
        let mut alts = Vec::new();
        for (pat, body) in arms {
            match pat {
                Pat::Ctor(name, subs, span) => {
                    let mut binders = Vec::new();
                    let mut pending: Vec<(String, Pat, Mult)> = Vec::new();
                    let inner_mult = if name == "Ur" { Mult::Many } else { mult };
                    for sub in subs {
                        match sub {
                            Pat::Var(v, _) => binders.push(v),
                            Pat::Wild(_) => binders.push(self.fresh_name("w")),
                            nested => {
                                let tmp = self.fresh_name("p");
                                binders.push(tmp.clone());
                                pending.push((tmp, nested, inner_mult));
                            }
                        }
                    }
                    let mut body = body;
                    for (tmp, nested, m) in pending.into_iter().rev() {
                        body = self.match_one(
                            Expr::Var(tmp, nested.span().clone()),
                            nested,
                            body,
                            m,
                        )?;
                    }
                    alts.push(Alt { ctor: name, binders, body, span });
                }
                Pat::Var(_, span) | Pat::Wild(span) => {
                    return Err(ParseError::new(
                        "case alternatives must match a constructor",
                        span,
                    ))
                }
            }
        }
        Ok(alts)
    }

    /// `case_m scrut of { pat -> body }` for one pattern.
    fn match_one(
        &mut self,
        scrut: Expr,
        pat: Pat,
        body: Expr,
        mult: Mult,
    ) -> Result<Expr, ParseError> {
        let span = scrut.span().to(body.span());
        match pat {
            Pat::Var(name, _) => Ok(Expr::Let {
                mult,
                binder: name,
                scheme: None,
                rhs: Box::new(scrut),
                body: Box::new(body),
                span,
            }),
            Pat::Wild(wspan) => {
                let name = self.fresh_name("w");
                Ok(Expr::Let {
                    mult,
                    binder: name,
                    scheme: None,
                    rhs: Box::new(scrut),
                    body: Box::new(body),
                    span: wspan.to(&span),
                })
            }
            pat @ Pat::Ctor(..) => {
                let alts = self.compile_alts(vec![(pat, body)], mult)?;
                Ok(Expr::Case { mult, scrutinee: Box::new(scrut), alts, span })
            }
        }
    }

    // ----- do notation -----------------------------------------------------

    fn do_block(&mut self) -> Result<Expr, ParseError> {
        let start = self.eat(&Tok::LinearlyDo, "`Linearly.do`")?;
        self.eat(&Tok::LBrace, "`{` (do blocks need braces)")?;
        self.do_depth += 1;
        let stmts = self.do_stmts();
        self.do_depth -= 1;
        let stmts = stmts?;
        let end = self.eat(&Tok::RBrace, "`}` after do block")?;
        self.desugar_do(stmts, start.to(&end))
    }

    fn do_stmts(&mut self) -> Result<Vec<DoStmt>, ParseError> {
        let mut stmts = Vec::new();
        loop {
            let stmt = self.do_stmt()?;
            stmts.push(stmt);
            if !self.try_eat(&Tok::Semi) {
                return Ok(stmts);
            }
            if self.peek() == Some(&Tok::RBrace) {
                // tolerate a trailing semicolon
                return Ok(stmts);
            }
        }
    }

    fn do_stmt(&mut self) -> Result<DoStmt, ParseError> {
        // let-statement
        if self.peek() == Some(&Tok::Let) && self.peek_at(1) != Some(&Tok::Pack) {
            let span = self.eat(&Tok::Let, "`let`")?;
            let mult = match self.peek() {
                Some(Tok::MultAnn(m)) => {
                    let m = *m;
                    self.next();
                    m
                }
                _ => Mult::One,
            };
            let (binder, _) = self.lower("binder")?;
            let scheme =
                if self.try_eat(&Tok::DoubleColon) { Some(self.scheme()?) } else { None };
            self.eat(&Tok::Equals, "`=`")?;
            let rhs = self.expr()?;
            return Ok(DoStmt::Let { mult, binder, scheme, rhs, span });
        }
        // pattern bind: requires lookahead for `<-`
        let save = self.pos;
        if let Ok(pat) = self.pattern() {
            if self.try_eat(&Tok::Bind) {
                let rhs = self.expr()?;
                return Ok(DoStmt::Bind { pat, rhs });
            }
        }
        self.pos = save;
        let e = self.expr()?;
        Ok(DoStmt::Expr(e))
    }

    fn desugar_do(&mut self, stmts: Vec<DoStmt>, span: Span) -> Result<Expr, ParseError> {
        let mut iter = stmts.into_iter().rev();
        let last = match iter.next() {
            Some(DoStmt::Expr(e)) => e,
            Some(DoStmt::Bind { pat, .. }) => {
                return Err(ParseError::new(
                    "a do block must end in an expression, not a binder",
                    pat.span().clone(),
                ))
            }
            Some(DoStmt::Let { span, .. }) => {
                return Err(ParseError::new(
                    "a do block must end in an expression, not a let",
                    span,
                ))
            }
            None => return Err(ParseError::new("empty do block", span)),
        };
        let mut acc = last;
        for stmt in iter {
            acc = match stmt {
                DoStmt::Expr(e) => {
                    // `u; stmts`: unpack, then strictly match the unit.
                    let tmp = self.fresh_name("s");
                    let espan = e.span().clone();
                    let unit_alt = Alt {
                        ctor: "Unit".into(),
                        binders: vec![],
                        span: espan.clone(),
                        body: acc,
                    };
                    let case = Expr::Case {
                        mult: Mult::One,
                        scrutinee: Box::new(Expr::Var(tmp.clone(), espan.clone())),
                        alts: vec![unit_alt],
                        span: espan.clone(),
                    };
                    Expr::Unpack {
                        binder: tmp,
                        rhs: Box::new(e),
                        body: Box::new(case),
                        span: espan,
                    }
                }
                DoStmt::Bind { pat, rhs } => {
                    let espan = rhs.span().clone();
                    match pat {
                        Pat::Var(name, _) => Expr::Unpack {
                            binder: name,
                            rhs: Box::new(rhs),
                            body: Box::new(acc),
                            span: espan,
                        },
                        pat => {
                            // non-variable patterns bind through a strict match
                            let tmp = self.fresh_name("b");
                            let matched = self.match_one(
                                Expr::Var(tmp.clone(), pat.span().clone()),
                                pat,
                                acc,
                                Mult::One,
                            )?;
                            Expr::Unpack {
                                binder: tmp,
                                rhs: Box::new(rhs),
                                body: Box::new(matched),
                                span: espan,
                            }
                        }
                    }
                }
                DoStmt::Let { mult, binder, scheme, rhs, span } => Expr::Let {
                    mult,
                    binder,
                    scheme,
                    rhs: Box::new(rhs),
                    body: Box::new(acc),
                    span,
                },
            };
        }
        Ok(acc)
    }
}

enum DoStmt {
    Bind { pat: Pat, rhs: Expr },
    Let { mult: Mult, binder: String, scheme: Option<Scheme>, rhs: Expr, span: Span },
    Expr(Expr),
}
