//! Wanted constraints: the goal language of the solver.
//!
//! `C ::= Q | C1 * C2 | C1 & C2 | pi.(Q =o C)`

use std::collections::BTreeMap;
use std::fmt;

use crate::constraint::{Arg, Mult, Simple, UnboundTypeVariable};
use crate::span::Span;

/// A wanted constraint. `Simple` and `Impl` nodes carry the span of the
/// construct that emitted them, for blame assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Wanted {
    Simple(Simple, Span),
    Tensor(Box<Wanted>, Box<Wanted>),
    With(Box<Wanted>, Box<Wanted>),
    Impl {
        mult: Mult,
        given: Simple,
        body: Box<Wanted>,
        span: Span,
    },
}

impl Wanted {
    pub fn simple(q: Simple) -> Wanted {
        Wanted::Simple(q, Span::synthetic())
    }

    pub fn empty() -> Wanted {
        Wanted::simple(Simple::empty())
    }

    pub fn tensor(a: Wanted, b: Wanted) -> Wanted {
        Wanted::Tensor(Box::new(a), Box::new(b))
    }

    pub fn with(a: Wanted, b: Wanted) -> Wanted {
        Wanted::With(Box::new(a), Box::new(b))
    }

    pub fn impl_(mult: Mult, given: Simple, body: Wanted) -> Wanted {
        Wanted::Impl { mult, given, body: Box::new(body), span: Span::synthetic() }
    }

    /// Structural scaling. `With` survives scaling by `One` but becomes a
    /// tensor of the scaled branches under `Many`; implications multiply
    /// their multiplicity.
    pub fn scale(&self, mult: Mult) -> Wanted {
        if mult == Mult::One {
            return self.clone();
        }
        match self {
            Wanted::Simple(q, sp) => Wanted::Simple(q.scale(mult), sp.clone()),
            Wanted::Tensor(a, b) => Wanted::tensor(a.scale(mult), b.scale(mult)),
            Wanted::With(a, b) => Wanted::tensor(a.scale(mult), b.scale(mult)),
            Wanted::Impl { mult: m, given, body, span } => Wanted::Impl {
                mult: mult.mul(*m),
                given: given.clone(),
                body: body.clone(),
                span: span.clone(),
            },
        }
    }

    /// Map a substitution over every simple constraint in the tree,
    /// including implication givens.
    pub fn substitute(&self, subst: &BTreeMap<String, Arg>) -> Result<Wanted, UnboundTypeVariable> {
        Ok(match self {
            Wanted::Simple(q, sp) => Wanted::Simple(q.substitute(subst)?, sp.clone()),
            Wanted::Tensor(a, b) => Wanted::tensor(a.substitute(subst)?, b.substitute(subst)?),
            Wanted::With(a, b) => Wanted::with(a.substitute(subst)?, b.substitute(subst)?),
            Wanted::Impl { mult, given, body, span } => Wanted::Impl {
                mult: *mult,
                given: given.substitute(subst)?,
                body: Box::new(body.substitute(subst)?),
                span: span.clone(),
            },
        })
    }

    pub fn depth(&self) -> usize {
        match self {
            Wanted::Simple(..) => 1,
            Wanted::Tensor(a, b) | Wanted::With(a, b) => 1 + a.depth().max(b.depth()),
            Wanted::Impl { body, .. } => 1 + body.depth(),
        }
    }
}

impl fmt::Display for Wanted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Wanted::Simple(q, _) => write!(f, "{q}"),
            Wanted::Tensor(a, b) => write!(f, "({a} * {b})"),
            Wanted::With(a, b) => write!(f, "({a} & {b})"),
            Wanted::Impl { mult, given, body, .. } => write!(f, "{mult}.({given} =o {body})"),
        }
    }
}

/// Parse the textual wanted-constraint form printed by `Display`:
/// `eps`, `1.q`, `w.Read n`, `C1 * C2`, `C1 & C2`, `pi.(Q =o C)`.
/// Used by the property-test corpus (one constraint per line).
pub fn parse_wanted(text: &str) -> Result<Wanted, String> {
    let mut p = TextParser { chars: text.chars().collect(), pos: 0 };
    let w = p.wanted()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(format!("trailing input at offset {}", p.pos));
    }
    Ok(w)
}

struct TextParser {
    chars: Vec<char>,
    pos: usize,
}

impl TextParser {
    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> Result<(), String> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(format!("expected `{c}` at offset {}", self.pos))
        }
    }

    fn word(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_' || c == '\'') {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn wanted(&mut self) -> Result<Wanted, String> {
        // `&` binds loosest, then `*`.
        let mut left = self.tensor()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('&') {
                self.pos += 1;
                let right = self.tensor()?;
                left = Wanted::with(left, right);
            } else {
                return Ok(left);
            }
        }
    }

    fn tensor(&mut self) -> Result<Wanted, String> {
        let mut left = self.atom_or_group()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('*') {
                self.pos += 1;
                let right = self.atom_or_group()?;
                left = match (left, right) {
                    // Adjacent simple constraints merge into one node.
                    (Wanted::Simple(a, sp), Wanted::Simple(b, _)) => {
                        Wanted::Simple(a.tensor(&b), sp)
                    }
                    (l, r) => Wanted::tensor(l, r),
                };
            } else {
                return Ok(left);
            }
        }
    }

    fn atom_or_group(&mut self) -> Result<Wanted, String> {
        self.skip_ws();
        if self.peek() == Some('(') {
            self.pos += 1;
            let inner = self.wanted()?;
            self.eat(')')?;
            return Ok(inner);
        }
        let head = self.word();
        if head == "eps" {
            return Ok(Wanted::empty());
        }
        let mult = match head.as_str() {
            "1" => Mult::One,
            "w" => Mult::Many,
            other => return Err(format!("expected multiplicity, found `{other}`")),
        };
        self.eat('.')?;
        self.skip_ws();
        if self.peek() == Some('(') {
            // pi.(Q =o C)
            self.pos += 1;
            let given = self.simple_until_arrow()?;
            let body = self.wanted()?;
            self.eat(')')?;
            return Ok(Wanted::impl_(mult, given, body));
        }
        let atom = self.scaled_atom_name()?;
        Ok(Wanted::simple(Simple::atom(mult, atom)))
    }

    fn scaled_atom_name(&mut self) -> Result<crate::constraint::Atom, String> {
        let class = self.word();
        if class.is_empty() {
            return Err(format!("expected atom at offset {}", self.pos));
        }
        let mut args = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(c) if c.is_alphanumeric() || c == '_' => {
                    let w = self.word();
                    args.push(Arg::Rigid(w));
                }
                _ => break,
            }
        }
        Ok(crate::constraint::Atom::new(&class, args))
    }

    fn simple_until_arrow(&mut self) -> Result<Simple, String> {
        // A tensor of scaled atoms (or eps, possibly parenthesized),
        // terminated by `=o`.
        let mut q = Simple::empty();
        loop {
            let item = self.simple_item()?;
            q = q.tensor(&item);
            self.skip_ws();
            if self.peek() == Some('*') {
                self.pos += 1;
                continue;
            }
            if self.peek() == Some('=') {
                self.pos += 1;
                self.eat('o')?;
                return Ok(q);
            }
            return Err(format!("expected `*` or `=o` at offset {}", self.pos));
        }
    }

    fn simple_item(&mut self) -> Result<Simple, String> {
        self.skip_ws();
        if self.peek() == Some('(') {
            self.pos += 1;
            let mut q = self.simple_item()?;
            loop {
                self.skip_ws();
                if self.peek() == Some('*') {
                    self.pos += 1;
                    q = q.tensor(&self.simple_item()?);
                } else {
                    break;
                }
            }
            self.eat(')')?;
            return Ok(q);
        }
        let head = self.word();
        if head == "eps" {
            return Ok(Simple::empty());
        }
        let mult = match head.as_str() {
            "1" => Mult::One,
            "w" => Mult::Many,
            other => return Err(format!("expected multiplicity, found `{other}`")),
        };
        self.eat('.')?;
        Ok(Simple::atom(mult, self.scaled_atom_name()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::Atom;

    fn lin(name: &str) -> Simple {
        Simple::linear(Atom::nullary(name))
    }

    fn ur(name: &str) -> Simple {
        Simple::unrestricted(Atom::nullary(name))
    }

    #[test]
    fn scale_unit() {
        let c = Wanted::with(Wanted::simple(lin("p")), Wanted::simple(lin("q")));
        assert_eq!(c.scale(Mult::One), c);
    }

    #[test]
    fn scale_with_becomes_tensor() {
        // w.(C1 & C2) = w.C1 * w.C2
        let c = Wanted::with(Wanted::simple(lin("p")), Wanted::simple(lin("q")));
        let expected = Wanted::tensor(Wanted::simple(ur("p")), Wanted::simple(ur("q")));
        assert_eq!(c.scale(Mult::Many), expected);
    }

    #[test]
    fn scale_impl_multiplies() {
        // pi.(rho.(Q =o C)) = (pi.rho).(Q =o C)
        let c = Wanted::impl_(Mult::One, lin("q"), Wanted::simple(lin("q")));
        match c.scale(Mult::Many) {
            Wanted::Impl { mult, given, .. } => {
                assert_eq!(mult, Mult::Many);
                assert_eq!(given, lin("q"));
            }
            other => panic!("expected Impl, got {other}"),
        }
    }

    #[test]
    fn substitute_maps_given_and_body() {
        let n = || Atom::new("Read", vec![Arg::Var("n".into())]);
        let p = || Atom::rigid1("Read", "p");
        let subst: BTreeMap<String, Arg> = [("n".to_string(), Arg::Rigid("p".into()))].into();
        let c = Wanted::impl_(
            Mult::One,
            Simple::linear(n()),
            Wanted::simple(Simple::linear(n())),
        );
        let expected = Wanted::impl_(
            Mult::One,
            Simple::linear(p()),
            Wanted::simple(Simple::linear(p())),
        );
        assert_eq!(c.substitute(&subst).unwrap(), expected);

        let rw = Wanted::simple(Simple::linear(Atom::new("RW", vec![Arg::Var("n".into())])));
        assert_eq!(
            rw.substitute(&subst).unwrap(),
            Wanted::simple(Simple::linear(Atom::rigid1("RW", "p")))
        );
        let t = Wanted::tensor(Wanted::empty(), Wanted::empty());
        assert_eq!(t.substitute(&subst).unwrap(), t);
    }

    #[test]
    fn parse_round_trip() {
        for text in [
            "eps",
            "1.q",
            "w.Read n * 1.Write n",
            "(1.p & 1.q)",
            "1.(1.q =o (1.q * 1.q))",
            "1.(w.q =o 1.(1.q =o 1.q))",
        ] {
            let parsed = parse_wanted(text).unwrap();
            let printed = parsed.to_string();
            assert_eq!(parse_wanted(&printed).unwrap(), parsed, "{text} -> {printed}");
        }
    }
}
