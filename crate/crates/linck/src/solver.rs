//! The guess-free constraint solver.
//!
//! The solver never takes a context as input; it outputs the simple
//! constraint (the demand) that would discharge its goal, and rejects
//! goals whose demand cannot be reconciled with the multiplicities of
//! the givens. A state-style variant that threads leftover givens is
//! provided for differential testing only.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::constraint::{
    diff, meet, Atom, DuplicableSet, FailureKind, Mult, Removal, Simple, SolverFailure,
};
use crate::span::Span;
use crate::wanted::Wanted;

/// Result of solving a wanted constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Solved(Simple),
    Failed(Failure),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub kind: FailureKind,
    pub atom: Atom,
    pub blame: Span,
}

impl Outcome {
    pub fn solved(&self) -> Option<&Simple> {
        match self {
            Outcome::Solved(q) => Some(q),
            Outcome::Failed(_) => None,
        }
    }
}

/// Spans of the occurrences backing each atom of a demand, separated by
/// multiplicity. Linear spans are kept in source order so that blame can
/// point at a specific occurrence.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Provenance {
    lin: BTreeMap<Atom, Vec<Span>>,
    ur: BTreeMap<Atom, Vec<Span>>,
}

impl Provenance {
    fn of_simple(q: &Simple, span: &Span) -> Provenance {
        let mut p = Provenance::default();
        for (atom, n) in q.linear_counts() {
            p.lin.insert(atom.clone(), vec![span.clone(); n as usize]);
        }
        for atom in q.unrestricted_atoms() {
            p.ur.insert(atom.clone(), vec![span.clone()]);
        }
        p
    }

    fn merge(mut self, other: Provenance) -> Provenance {
        for (a, spans) in other.lin {
            let entry = self.lin.entry(a).or_default();
            entry.extend(spans);
            entry.sort();
        }
        for (a, spans) in other.ur {
            let entry = self.ur.entry(a).or_default();
            entry.extend(spans);
            entry.sort();
        }
        self
    }

    fn scale(self, mult: Mult) -> Provenance {
        match mult {
            Mult::One => self,
            Mult::Many => {
                let mut ur = self.ur;
                for (a, spans) in self.lin {
                    let entry = ur.entry(a).or_default();
                    entry.extend(spans);
                    entry.sort();
                }
                Provenance { lin: BTreeMap::new(), ur }
            }
        }
    }

    fn apply_removals(&mut self, removals: &[Removal]) {
        for r in removals {
            match r {
                Removal::Linear(a) | Removal::Dup(a, _) => {
                    self.lin.remove(a);
                }
                Removal::Unrestricted(a, _, _) => {
                    self.lin.remove(a);
                    self.ur.remove(a);
                }
            }
        }
    }

    /// Spans of the occurrences of `atom`, linear first, source order.
    fn spans_of(&self, atom: &Atom) -> Vec<Span> {
        let mut spans = self.lin.get(atom).cloned().unwrap_or_default();
        spans.extend(self.ur.get(atom).cloned().unwrap_or_default());
        spans
    }
}

/// Collects one line per rule application when tracing is enabled.
#[derive(Debug, Default)]
pub struct Trace {
    pub lines: Vec<String>,
    enabled: bool,
}

impl Trace {
    pub fn enabled() -> Trace {
        Trace { lines: Vec::new(), enabled: true }
    }

    fn log(&mut self, rule: &str, input: &dyn std::fmt::Display, output: &dyn std::fmt::Display) {
        if self.enabled {
            let mut line = String::new();
            let _ = write!(line, "{rule}: {input} ~> {output}");
            self.lines.push(line);
        }
    }
}

/// Solve a wanted constraint, returning the full demand it places on its
/// environment.
pub fn solve(c: &Wanted, d: &DuplicableSet) -> Outcome {
    solve_traced(c, d, &mut Trace::default())
}

pub fn solve_traced(c: &Wanted, d: &DuplicableSet, trace: &mut Trace) -> Outcome {
    match solve_inner(c, d, trace) {
        Ok((q, _)) => Outcome::Solved(q),
        Err(f) => Outcome::Failed(f),
    }
}

fn solve_inner(
    c: &Wanted,
    d: &DuplicableSet,
    trace: &mut Trace,
) -> Result<(Simple, Provenance), Failure> {
    match c {
        Wanted::Simple(q, span) => {
            // S-ATOM, applied to each scaled atom of the node.
            trace.log("S-ATOM", q, q);
            Ok((q.clone(), Provenance::of_simple(q, span)))
        }
        Wanted::Tensor(c1, c2) => {
            // Both children are solved regardless; when both fail the
            // canonically least (atom, kind) is reported so that tensor
            // stays symmetric.
            let left = solve_inner(c1, d, trace);
            let right = solve_inner(c2, d, trace);
            match (left, right) {
                (Ok((q1, p1)), Ok((q2, p2))) => {
                    let out = q1.tensor(&q2);
                    trace.log("S-TENSOR", c, &out);
                    Ok((out, p1.merge(p2)))
                }
                (Err(f), Ok(_)) | (Ok(_), Err(f)) => Err(f),
                (Err(f1), Err(f2)) => Err(least_failure(f1, f2)),
            }
        }
        Wanted::With(c1, c2) => {
            let left = solve_inner(c1, d, trace);
            let right = solve_inner(c2, d, trace);
            match (left, right) {
                (Ok((q1, p1)), Ok((q2, p2))) => {
                    let out = meet(&q1, &q2, d);
                    trace.log("S-WITH", c, &out);
                    Ok((out, p1.merge(p2)))
                }
                (Err(f), Ok(_)) | (Ok(_), Err(f)) => Err(f),
                (Err(f1), Err(f2)) => Err(least_failure(f1, f2)),
            }
        }
        Wanted::Impl { mult, given, body, span } => {
            let (qi, mut prov) = solve_inner(body, d, trace)?;
            match diff(&qi, given, d) {
                Ok(out) => {
                    prov.apply_removals(&out.removals);
                    let scaled = out.remainder.scale(*mult);
                    trace.log("S-IMPL", c, &scaled);
                    Ok((scaled, prov.scale(*mult)))
                }
                Err(SolverFailure { kind, atom }) => {
                    // A linear given used several times blames the second
                    // occurrence; everything else blames the implication.
                    let blame = match kind {
                        FailureKind::Multiplicity => {
                            let spans = prov.spans_of(&atom);
                            if spans.len() >= 2 {
                                spans[1].clone()
                            } else {
                                span.clone()
                            }
                        }
                        _ => span.clone(),
                    };
                    Err(Failure { kind, atom, blame })
                }
            }
        }
    }
}

fn least_failure(f1: Failure, f2: Failure) -> Failure {
    if (&f1.atom, f1.kind) <= (&f2.atom, f2.kind) {
        f1
    } else {
        f2
    }
}

/// Top-level acceptance: `Qg` discharges `C` exactly when solving
/// `1.(Qg =o C)` leaves nothing over. A non-empty remainder is reported
/// as an undischarged atom (the canonically least one).
pub fn check_top_level(
    qg: &Simple,
    c: &Wanted,
    d: &DuplicableSet,
    decl_span: &Span,
) -> Result<(), Failure> {
    check_top_level_traced(qg, c, d, decl_span, &mut Trace::default())
}

pub fn check_top_level_traced(
    qg: &Simple,
    c: &Wanted,
    d: &DuplicableSet,
    decl_span: &Span,
    trace: &mut Trace,
) -> Result<(), Failure> {
    let goal = Wanted::Impl {
        mult: Mult::One,
        given: qg.clone(),
        body: Box::new(c.clone()),
        span: decl_span.clone(),
    };
    match solve_inner(&goal, d, trace) {
        Err(f) => Err(f),
        Ok((q, prov)) => {
            if q.is_empty() {
                Ok(())
            } else {
                let atom = q
                    .occurrences()
                    .first()
                    .map(|(_, a)| a.clone())
                    .expect("non-empty constraint has an occurrence");
                let blame = prov.spans_of(&atom).first().cloned().unwrap_or_else(|| decl_span.clone());
                Err(Failure { kind: FailureKind::UnsolvedAtom, atom, blame })
            }
        }
    }
}

/// Human-readable report for a failed outcome; the wording is stable and
/// relied on by golden tests.
pub fn explain_failure(f: &Failure) -> String {
    match f.kind {
        FailureKind::Multiplicity => format!(
            "multiplicity error: the linear constraint `{}` is used more than once or never consumed",
            f.atom
        ),
        FailureKind::Ambiguity => format!(
            "ambiguity error: there are two different `{}` to choose from",
            f.atom
        ),
        FailureKind::UnsolvedAtom => {
            format!("the constraint `{}` could not be discharged", f.atom)
        }
    }
}

/// The state-style solver sketched alongside the writer-style one:
/// unrestricted givens `U` and an innermost-first list of linear givens
/// `L` are threaded through the goal, leaving leftovers. Built only for
/// differential testing; succeeds when a closed goal consumes every
/// linear given.
pub fn solve_state_style(c: &Wanted, d: &DuplicableSet) -> Result<(), Failure> {
    let mut st = StateSolver { d };
    let leftovers = st.go(c, &Simple::empty(), Vec::new())?;
    if let Some(atom) = leftovers.first() {
        return Err(Failure {
            kind: FailureKind::UnsolvedAtom,
            atom: atom.clone(),
            blame: Span::synthetic(),
        });
    }
    Ok(())
}

struct StateSolver<'a> {
    d: &'a DuplicableSet,
}

impl StateSolver<'_> {
    /// Unconsumed givens of an implication must be duplicable.
    fn require_discardable(&self, rem: Vec<Atom>, span: &Span) -> Result<(), Failure> {
        for a in rem {
            if !self.d.contains(&a) {
                return Err(Failure {
                    kind: FailureKind::Multiplicity,
                    atom: a,
                    blame: span.clone(),
                });
            }
        }
        Ok(())
    }

    /// `U; Li |- C ~> Lr`. The linear context is innermost-first.
    fn go(&mut self, c: &Wanted, u: &Simple, li: Vec<Atom>) -> Result<Vec<Atom>, Failure> {
        match c {
            Wanted::Simple(q, span) => {
                let mut left = li;
                for (mult, atom) in q.occurrences() {
                    match mult {
                        Mult::One => {
                            if let Some(pos) = left.iter().position(|a| *a == atom) {
                                left.remove(pos); // selects the innermost given
                            } else if !u.has_unrestricted(&atom) {
                                return Err(Failure {
                                    kind: FailureKind::Multiplicity,
                                    atom,
                                    blame: span.clone(),
                                });
                            }
                        }
                        Mult::Many => {
                            if !u.has_unrestricted(&atom) {
                                return Err(Failure {
                                    kind: FailureKind::Multiplicity,
                                    atom,
                                    blame: span.clone(),
                                });
                            }
                        }
                    }
                }
                Ok(left)
            }
            Wanted::Tensor(c1, c2) => {
                // Leftovers of the first conjunct feed the second.
                let mid = self.go(c1, u, li)?;
                self.go(c2, u, mid)
            }
            Wanted::With(c1, c2) => {
                let l1 = self.go(c1, u, li.clone())?;
                let l2 = self.go(c2, u, li)?;
                if l1 != l2 {
                    let atom = l1
                        .iter()
                        .find(|a| !l2.contains(a))
                        .or_else(|| l2.iter().find(|a| !l1.contains(a)))
                        .cloned()
                        .expect("unequal leftover lists differ somewhere");
                    return Err(Failure {
                        kind: FailureKind::Ambiguity,
                        atom,
                        blame: Span::synthetic(),
                    });
                }
                Ok(l1)
            }
            Wanted::Impl { mult, given, body, span } => {
                // The concession that keeps resolution order-independent:
                // an atom given both linearly and unrestricted is ambiguous.
                for (m, atom) in given.occurrences() {
                    let clash = match m {
                        Mult::One => u.has_unrestricted(&atom),
                        Mult::Many => li.contains(&atom),
                    };
                    if clash {
                        return Err(Failure {
                            kind: FailureKind::Ambiguity,
                            atom,
                            blame: span.clone(),
                        });
                    }
                }
                let mut u_scope = u.clone();
                for a in given.unrestricted_atoms() {
                    u_scope.push(Mult::Many, a.clone());
                }
                let mut pushed: Vec<Atom> = Vec::new();
                for (atom, n) in given.linear_counts() {
                    for _ in 0..n {
                        pushed.push(atom.clone());
                    }
                }
                // Givens stack innermost-first; the body of an unrestricted
                // implication may not touch outer linear givens at all.
                let inner_li = match mult {
                    Mult::One => {
                        let mut l = pushed;
                        l.extend(li.iter().cloned());
                        l
                    }
                    Mult::Many => pushed,
                };
                let mut rem = self.go(body, &u_scope, inner_li)?;
                match mult {
                    Mult::One => {
                        // Inner givens are consumed first, so surviving
                        // occurrences are attributed to the outer context.
                        let mut out = Vec::new();
                        for a in &li {
                            if let Some(pos) = rem.iter().position(|x| x == a) {
                                rem.remove(pos);
                                out.push(a.clone());
                            }
                        }
                        self.require_discardable(rem, span)?;
                        Ok(out)
                    }
                    Mult::Many => {
                        self.require_discardable(rem, span)?;
                        Ok(li)
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wanted::parse_wanted;

    fn lin(name: &str) -> Simple {
        Simple::linear(Atom::nullary(name))
    }

    #[test]
    fn atom_rule() {
        let d = DuplicableSet::empty_for_tests();
        let c = Wanted::simple(lin("q"));
        assert_eq!(solve(&c, &d), Outcome::Solved(lin("q")));
    }

    #[test]
    fn impl_discharges() {
        let d = DuplicableSet::empty_for_tests();
        let c = Wanted::impl_(Mult::One, lin("q"), Wanted::simple(lin("q")));
        assert_eq!(solve(&c, &d), Outcome::Solved(Simple::empty()));
    }

    #[test]
    fn counting_shape_fails_multiplicity() {
        // 1.(1.q =o 1.(1.q =o 1.q * 1.q)) fails: only the innermost given
        // can be used, and it would be used twice.
        let d = DuplicableSet::empty_for_tests();
        let c = parse_wanted("1.(1.q =o 1.(1.q =o (1.q * 1.q)))").unwrap();
        match solve(&c, &d) {
            Outcome::Failed(f) => {
                assert_eq!(f.kind, FailureKind::Multiplicity);
                assert_eq!(f.atom, Atom::nullary("q"));
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn writer_solves_mixed_multiplicity_givens() {
        // 1.(w.q =o 1.(1.q =o 1.q)) solves: the unrestricted given is
        // simply never needed.
        let d = DuplicableSet::empty_for_tests();
        let c = parse_wanted("1.(w.q =o 1.(1.q =o 1.q))").unwrap();
        assert_eq!(solve(&c, &d), Outcome::Solved(Simple::empty()));
    }

    #[test]
    fn repeating_shape_is_ambiguous() {
        let d = DuplicableSet::empty_for_tests();
        let c = parse_wanted("1.((1.q * 1.q) =o 1.q)").unwrap();
        match solve(&c, &d) {
            Outcome::Failed(f) => assert_eq!(f.kind, FailureKind::Ambiguity),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn top_level_reports_unsolved() {
        let d = DuplicableSet::empty_for_tests();
        let err = check_top_level(
            &Simple::empty(),
            &Wanted::simple(lin("q")),
            &d,
            &Span::synthetic(),
        )
        .unwrap_err();
        assert_eq!(err.kind, FailureKind::UnsolvedAtom);
        assert!(explain_failure(&err).contains("could not be discharged"));
    }

    #[test]
    fn state_style_differs_on_witnesses() {
        let d = DuplicableSet::empty_for_tests();
        // The state-style solver coordinates the two tensor branches.
        let counting = parse_wanted("1.(1.q =o 1.(1.q =o (1.q * 1.q)))").unwrap();
        assert!(solve_state_style(&counting, &d).is_ok());
        assert!(solve(&counting, &d).solved().is_none());
        // ...but treats a mixed-multiplicity given as ambiguous.
        let mixed = parse_wanted("1.(w.q =o 1.(1.q =o 1.q))").unwrap();
        let err = solve_state_style(&mixed, &d).unwrap_err();
        assert_eq!(err.kind, FailureKind::Ambiguity);
        assert!(solve(&mixed, &d).solved().is_some());
    }

    #[test]
    fn tensor_is_symmetric() {
        let d = DuplicableSet::empty_for_tests();
        let a = Wanted::simple(lin("p"));
        let b = Wanted::simple(Simple::unrestricted(Atom::nullary("q")));
        let ab = solve(&Wanted::tensor(a.clone(), b.clone()), &d);
        let ba = solve(&Wanted::tensor(b, a), &d);
        assert_eq!(ab, ba);
    }
}
