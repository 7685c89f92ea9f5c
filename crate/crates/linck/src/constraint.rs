//! The algebra of multiplicities, atomic constraints and simple constraints.
//!
//! A simple constraint is a pair `(U, L)` of a *set* of unrestricted atoms
//! and a *multiset* of linear atoms. Entailment between simple constraints,
//! the meet, and the diff judgement used by the solver all live here; they
//! are pure functions over immutable values.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Usage multiplicity: linear (`1`) or unrestricted (`w`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mult {
    One,
    Many,
}

impl Mult {
    /// Addition is saturating: any sum of usages is unrestricted.
    pub fn add(self, _other: Mult) -> Mult {
        Mult::Many
    }

    /// `One` is the multiplicative unit, `Many` is absorbing.
    pub fn mul(self, other: Mult) -> Mult {
        match (self, other) {
            (Mult::One, m) | (m, Mult::One) => m,
            _ => Mult::Many,
        }
    }
}

impl fmt::Display for Mult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mult::One => write!(f, "1"),
            Mult::Many => write!(f, "w"),
        }
    }
}

/// A type argument of an atomic constraint, after type resolution.
///
/// `Var` arguments are still open type variables (substitutable);
/// `Rigid` arguments are skolems or fully concrete types and compare
/// purely by name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Arg {
    Var(String),
    Rigid(String),
}

impl Arg {
    pub fn name(&self) -> &str {
        match self {
            Arg::Var(s) | Arg::Rigid(s) => s,
        }
    }
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// An atomic constraint: a class name applied to resolved type arguments.
/// Equality is syntactic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub class: String,
    pub args: Vec<Arg>,
}

impl Atom {
    pub fn new(class: &str, args: Vec<Arg>) -> Atom {
        Atom { class: class.to_string(), args }
    }

    /// Nullary atom, handy in tests.
    pub fn nullary(class: &str) -> Atom {
        Atom { class: class.to_string(), args: Vec::new() }
    }

    pub fn rigid1(class: &str, arg: &str) -> Atom {
        Atom { class: class.to_string(), args: vec![Arg::Rigid(arg.to_string())] }
    }

    pub fn substitute(&self, subst: &BTreeMap<String, Arg>) -> Result<Atom, UnboundTypeVariable> {
        let mut args = Vec::with_capacity(self.args.len());
        for a in &self.args {
            match a {
                Arg::Rigid(_) => args.push(a.clone()),
                Arg::Var(v) => match subst.get(v) {
                    Some(r) => args.push(r.clone()),
                    None => return Err(UnboundTypeVariable(v.clone())),
                },
            }
        }
        Ok(Atom { class: self.class.clone(), args })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.class)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        Ok(())
    }
}

/// A free type variable of a constraint was not covered by a substitution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnboundTypeVariable(pub String);

impl fmt::Display for UnboundTypeVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unbound type variable `{}`", self.0)
    }
}

/// The set of duplicable constraint classes. `Linearly` is always a member.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DuplicableSet {
    classes: BTreeSet<String>,
}

pub const LINEARLY: &str = "Linearly";

impl DuplicableSet {
    pub fn new() -> DuplicableSet {
        let mut classes = BTreeSet::new();
        classes.insert(LINEARLY.to_string());
        DuplicableSet { classes }
    }

    /// An empty set without even `Linearly`; only for algebra tests.
    pub fn empty_for_tests() -> DuplicableSet {
        DuplicableSet { classes: BTreeSet::new() }
    }

    pub fn insert(&mut self, class: &str) {
        self.classes.insert(class.to_string());
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.classes.contains(&atom.class)
    }

    pub fn contains_class(&self, class: &str) -> bool {
        self.classes.contains(class)
    }
}

/// A simple constraint `(U, L)`: a set of unrestricted atoms plus a
/// multiset of linear atoms (kept as an atom -> count map).
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Simple {
    unres: BTreeSet<Atom>,
    lin: BTreeMap<Atom, u32>,
}

impl Simple {
    /// The empty constraint, written `eps`.
    pub fn empty() -> Simple {
        Simple::default()
    }

    /// The scaled atom `pi.q` as a simple constraint.
    pub fn atom(mult: Mult, atom: Atom) -> Simple {
        let mut q = Simple::empty();
        q.push(mult, atom);
        q
    }

    pub fn linear(atom: Atom) -> Simple {
        Simple::atom(Mult::One, atom)
    }

    pub fn unrestricted(atom: Atom) -> Simple {
        Simple::atom(Mult::Many, atom)
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = (Mult, Atom)>) -> Simple {
        let mut q = Simple::empty();
        for (m, a) in atoms {
            q.push(m, a);
        }
        q
    }

    pub fn push(&mut self, mult: Mult, atom: Atom) {
        match mult {
            Mult::One => *self.lin.entry(atom).or_insert(0) += 1,
            Mult::Many => {
                self.unres.insert(atom);
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.unres.is_empty() && self.lin.is_empty()
    }

    pub fn unrestricted_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.unres.iter()
    }

    /// Linear atoms with their occurrence counts, in canonical order.
    pub fn linear_counts(&self) -> impl Iterator<Item = (&Atom, u32)> {
        self.lin.iter().map(|(a, &n)| (a, n))
    }

    pub fn linear_count(&self, atom: &Atom) -> u32 {
        self.lin.get(atom).copied().unwrap_or(0)
    }

    pub fn has_unrestricted(&self, atom: &Atom) -> bool {
        self.unres.contains(atom)
    }

    pub fn contains_atom(&self, atom: &Atom) -> bool {
        self.unres.contains(atom) || self.lin.contains_key(atom)
    }

    /// All distinct atoms mentioned anywhere, in canonical order.
    pub fn distinct_atoms(&self) -> BTreeSet<Atom> {
        self.unres.iter().chain(self.lin.keys()).cloned().collect()
    }

    /// Occurrences in canonical order: for each distinct atom, the
    /// unrestricted copy (if any) first, then the linear copies.
    pub fn occurrences(&self) -> Vec<(Mult, Atom)> {
        let mut out = Vec::new();
        for a in self.distinct_atoms() {
            if self.unres.contains(&a) {
                out.push((Mult::Many, a.clone()));
            }
            for _ in 0..self.linear_count(&a) {
                out.push((Mult::One, a.clone()));
            }
        }
        out
    }

    /// Total number of occurrences (unrestricted atoms count once).
    pub fn occurrence_len(&self) -> usize {
        self.unres.len() + self.lin.values().map(|&n| n as usize).sum::<usize>()
    }

    /// Multiplicative conjunction: union of `U`, multiset sum of `L`.
    pub fn tensor(&self, other: &Simple) -> Simple {
        let mut out = self.clone();
        for a in &other.unres {
            out.unres.insert(a.clone());
        }
        for (a, n) in &other.lin {
            *out.lin.entry(a.clone()).or_insert(0) += n;
        }
        out
    }

    /// Scaling: `One` is the identity, `Many` moves all linear atoms into
    /// the unrestricted set (collapsing duplicates).
    pub fn scale(&self, mult: Mult) -> Simple {
        match mult {
            Mult::One => self.clone(),
            Mult::Many => {
                let mut unres = self.unres.clone();
                unres.extend(self.lin.keys().cloned());
                Simple { unres, lin: BTreeMap::new() }
            }
        }
    }

    pub fn substitute(&self, subst: &BTreeMap<String, Arg>) -> Result<Simple, UnboundTypeVariable> {
        let mut out = Simple::empty();
        for a in &self.unres {
            out.push(Mult::Many, a.substitute(subst)?);
        }
        for (a, n) in &self.lin {
            let a = a.substitute(subst)?;
            for _ in 0..*n {
                out.push(Mult::One, a.clone());
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Simple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "eps");
        }
        let mut first = true;
        for (m, a) in self.occurrences() {
            if !first {
                write!(f, " * ")?;
            }
            first = false;
            write!(f, "{m}.{a}")?;
        }
        Ok(())
    }
}

/// Why a diff (or an entailment compilation) failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FailureKind {
    /// A linear constraint was used the wrong number of times.
    Multiplicity,
    /// Several indistinguishable constraints to choose from.
    Ambiguity,
    /// A leftover constraint could not be discharged.
    UnsolvedAtom,
}

/// A failed diff: the offending atom plus the failure kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverFailure {
    pub kind: FailureKind,
    pub atom: Atom,
}

impl SolverFailure {
    fn new(kind: FailureKind, atom: &Atom) -> SolverFailure {
        SolverFailure { kind, atom: atom.clone() }
    }
}

/// How `diff` disposed of one bound atom; lets callers mirror the
/// removals on side structures (provenance spans, evidence routing).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Removal {
    /// Exactly one linear occurrence was removed.
    Linear(Atom),
    /// All (`n`) linear occurrences of a duplicable atom were removed.
    Dup(Atom, u32),
    /// Every occurrence was removed: the unrestricted copy (if present)
    /// and `n` linear copies.
    Unrestricted(Atom, bool, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOutcome {
    pub remainder: Simple,
    pub removals: Vec<Removal>,
}

/// The diff judgement `Qi \ Qb ~> Qo`: discharge the bound constraint
/// `Qb` against the demand `Qi`, leaving the remainder.
///
/// For each linear non-duplicable atom in `Qb` there must be exactly one
/// linear copy in `Qi`; a linear duplicable atom removes every linear
/// copy; an unrestricted atom removes every occurrence. Bound atoms may
/// not recur in the rest of `Qb` nor survive into the remainder.
pub fn diff(qi: &Simple, qb: &Simple, d: &DuplicableSet) -> Result<DiffOutcome, SolverFailure> {
    // "q not in Lb" side condition: a repeated linear bound atom is ambiguous.
    for (a, n) in qb.linear_counts() {
        if n > 1 || qb.has_unrestricted(a) {
            return Err(SolverFailure::new(FailureKind::Ambiguity, a));
        }
    }
    let mut out = qi.clone();
    let mut removals = Vec::new();
    for (a, _) in qb.linear_counts() {
        if d.contains(a) {
            // D-DUP: drop all linear copies; an unrestricted copy would
            // survive into the remainder, which the side condition forbids.
            if out.has_unrestricted(a) {
                return Err(SolverFailure::new(FailureKind::Multiplicity, a));
            }
            let n = out.linear_count(a);
            out.lin.remove(a);
            removals.push(Removal::Dup(a.clone(), n));
        } else {
            // D-LINEAR: exactly one linear copy and no unrestricted copy.
            if out.has_unrestricted(a) || out.linear_count(a) != 1 {
                return Err(SolverFailure::new(FailureKind::Multiplicity, a));
            }
            out.lin.remove(a);
            removals.push(Removal::Linear(a.clone()));
        }
    }
    for a in qb.unrestricted_atoms() {
        // D-UR: remove every occurrence at any multiplicity.
        let had_ur = out.unres.remove(a);
        let n = out.linear_count(a);
        out.lin.remove(a);
        removals.push(Removal::Unrestricted(a.clone(), had_ur, n));
    }
    Ok(DiffOutcome { remainder: out, removals })
}

/// The meet `Q1 /\ Q2`: a context compatible with both operands
/// (`meet(Q1,Q2)` entails each of them). Total, and independent of atom
/// processing order.
pub fn meet(q1: &Simple, q2: &Simple, d: &DuplicableSet) -> Simple {
    let mut out = Simple::empty();
    // INF-UR: unrestricted parts always join by union.
    for a in q1.unrestricted_atoms().chain(q2.unrestricted_atoms()) {
        out.push(Mult::Many, a.clone());
    }
    let atoms: BTreeSet<&Atom> = q1.lin.keys().chain(q2.lin.keys()).collect();
    for a in atoms {
        let (n1, n2) = (q1.linear_count(a), q2.linear_count(a));
        let matched = n1.min(n2);
        for _ in 0..matched {
            out.push(Mult::One, a.clone()); // INF-MATCH
        }
        let excess = n1.max(n2) - matched;
        if excess > 0 {
            if d.contains(a) {
                // INF-DIFFDL/R: a duplicable copy missing on one side can
                // be discarded there, so the meet keeps it linear.
                for _ in 0..excess {
                    out.push(Mult::One, a.clone());
                }
            } else {
                // INF-DIFFL/R: only an unrestricted copy entails both
                // "one copy" and "no copy".
                out.push(Mult::Many, a.clone());
            }
        }
    }
    out
}

/// One step of the entailment plan for a single atom: how the givens of
/// `Q1` supply the wants of `Q2`. Consumed both by the boolean decision
/// procedure and by the evidence compiler.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomPlan {
    pub atom: Atom,
    /// Linear givens available / linear wants demanded.
    pub give_lin: u32,
    pub want_lin: u32,
    /// Unrestricted given present / wanted.
    pub give_ur: bool,
    pub want_ur: bool,
    pub duplicable: bool,
}

impl AtomPlan {
    /// Linear wants served by exact linear givens.
    pub fn exact(&self) -> u32 {
        self.give_lin.min(self.want_lin)
    }

    /// Linear wants minted from the unrestricted given or by duplication.
    pub fn minted(&self) -> u32 {
        self.want_lin - self.exact()
    }

    /// Leftover linear givens that must be discarded (duplicable only).
    pub fn discarded(&self) -> u32 {
        self.give_lin - self.exact()
    }

    fn feasible(&self) -> bool {
        if self.want_ur && !self.give_ur {
            return false;
        }
        if self.minted() > 0 && !self.give_ur && !(self.duplicable && self.give_lin > 0) {
            return false;
        }
        if self.discarded() > 0 && !self.duplicable {
            return false;
        }
        true
    }
}

/// Decide `Q1 |- Q2` and, on success, return the per-atom routing plan
/// that witnesses the derivation.
pub fn entailment_plan(q1: &Simple, q2: &Simple, d: &DuplicableSet) -> Option<Vec<AtomPlan>> {
    let mut atoms = q1.distinct_atoms();
    atoms.extend(q2.distinct_atoms());
    let mut plan = Vec::new();
    for atom in atoms {
        let step = AtomPlan {
            give_lin: q1.linear_count(&atom),
            want_lin: q2.linear_count(&atom),
            give_ur: q1.has_unrestricted(&atom),
            want_ur: q2.has_unrestricted(&atom),
            duplicable: d.contains(&atom),
            atom,
        };
        if !step.feasible() {
            return None;
        }
        plan.push(step);
    }
    Some(plan)
}

/// Concrete entailment `Q1 |- Q2`: a total decision procedure satisfying
/// the reflexivity, transitivity, congruence, dereliction, weakening,
/// duplication and discard laws.
pub fn entails(q1: &Simple, q2: &Simple, d: &DuplicableSet) -> bool {
    entailment_plan(q1, q2, d).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(name: &str) -> Atom {
        Atom::nullary(name)
    }

    #[test]
    fn multiplicity_tables() {
        use Mult::*;
        // Addition always saturates.
        assert_eq!(One.add(One), Many);
        assert_eq!(One.add(Many), Many);
        assert_eq!(Many.add(Many), Many);
        // One is the unit of multiplication, Many absorbs.
        assert_eq!(One.mul(One), One);
        assert_eq!(Many.mul(One), Many);
        assert_eq!(One.mul(Many), Many);
        assert_eq!(Many.mul(Many), Many);
    }

    #[test]
    fn semiring_laws_exhaustive() {
        use Mult::*;
        for a in [One, Many] {
            for b in [One, Many] {
                assert_eq!(a.add(b), b.add(a));
                assert_eq!(a.mul(b), b.mul(a));
                for c in [One, Many] {
                    assert_eq!(a.add(b).add(c), a.add(b.add(c)));
                    assert_eq!(a.mul(b).mul(c), a.mul(b.mul(c)));
                    assert_eq!(a.mul(b.add(c)), a.mul(b).add(a.mul(c)));
                }
            }
        }
    }

    #[test]
    fn scale_examples() {
        let p = q("p");
        let qq = q("q");
        // 1 . ({p}, {q}) leaves the constraint unchanged.
        let c = Simple::from_atoms([(Mult::Many, p.clone()), (Mult::One, qq.clone())]);
        assert_eq!(c.scale(Mult::One), c);
        // w . (0, {q}) = ({q}, 0)
        assert_eq!(Simple::linear(qq.clone()).scale(Mult::Many), Simple::unrestricted(qq.clone()));
        // w . ({p}, {q, q}) = ({p, q}, 0): duplicates collapse in the set.
        let c = Simple::from_atoms([
            (Mult::Many, p.clone()),
            (Mult::One, qq.clone()),
            (Mult::One, qq.clone()),
        ]);
        let expected = Simple::from_atoms([(Mult::Many, p), (Mult::Many, qq)]);
        assert_eq!(c.scale(Mult::Many), expected);
    }

    #[test]
    fn tensor_examples() {
        let qq = q("q");
        let one_q = Simple::linear(qq.clone());
        let w_q = Simple::unrestricted(qq.clone());
        // eps is neutral.
        assert_eq!(Simple::empty().tensor(&one_q), one_q);
        // 1.q * 1.q = (0, {q, q})
        let two = one_q.tensor(&one_q);
        assert_eq!(two.linear_count(&qq), 2);
        // w.q * w.q = w.q
        assert_eq!(w_q.tensor(&w_q), w_q);
    }

    #[test]
    fn substitute_examples() {
        let subst: BTreeMap<String, Arg> =
            [("n".to_string(), Arg::Rigid("s7".to_string()))].into();
        let rw_n = Simple::linear(Atom::new("RW", vec![Arg::Var("n".into())]));
        assert_eq!(
            rw_n.substitute(&subst).unwrap(),
            Simple::linear(Atom::rigid1("RW", "s7"))
        );
        assert_eq!(Simple::empty().substitute(&subst).unwrap(), Simple::empty());

        let subst: BTreeMap<String, Arg> = [("n".to_string(), Arg::Rigid("p".to_string()))].into();
        let c = Simple::from_atoms([
            (Mult::Many, Atom::new("Read", vec![Arg::Var("n".into())])),
            (Mult::One, Atom::new("Write", vec![Arg::Var("n".into())])),
        ]);
        let expected = Simple::from_atoms([
            (Mult::Many, Atom::rigid1("Read", "p")),
            (Mult::One, Atom::rigid1("Write", "p")),
        ]);
        assert_eq!(c.substitute(&subst).unwrap(), expected);

        let free = Simple::linear(Atom::new("Read", vec![Arg::Var("m".into())]));
        assert_eq!(
            free.substitute(&subst),
            Err(UnboundTypeVariable("m".to_string()))
        );
    }

    #[test]
    fn entails_examples() {
        let d0 = DuplicableSet::empty_for_tests();
        let mut d1 = DuplicableSet::empty_for_tests();
        d1.insert("q");
        let one_q = Simple::linear(q("q"));
        // Reflexivity.
        assert!(entails(&one_q, &one_q, &d0));
        // Duplication needs q in D.
        let two_q = one_q.tensor(&one_q);
        assert!(entails(&one_q, &two_q, &d1));
        assert!(!entails(&one_q, &two_q, &d0));
        // A leftover linear atom is never discardable outside D.
        assert!(!entails(&one_q, &Simple::empty(), &d0));
        assert!(entails(&one_q, &Simple::empty(), &d1));
    }

    #[test]
    fn entails_unrestricted_rules() {
        let d0 = DuplicableSet::empty_for_tests();
        let w_q = Simple::unrestricted(q("q"));
        let one_q = Simple::linear(q("q"));
        // Dereliction: w.q |- 1.q, and it serves any number of copies.
        assert!(entails(&w_q, &one_q, &d0));
        assert!(entails(&w_q, &one_q.tensor(&one_q), &d0));
        // Weakening: w.q |- eps.
        assert!(entails(&w_q, &Simple::empty(), &d0));
        // Unrestricted givens may be over-supplied, not under-supplied.
        let w_pq = w_q.tensor(&Simple::unrestricted(q("p")));
        assert!(entails(&w_pq, &w_q, &d0));
        assert!(!entails(&w_q, &w_pq, &d0));
        // 1.q does not entail w.q, even for duplicable q.
        let mut d1 = DuplicableSet::empty_for_tests();
        d1.insert("q");
        assert!(!entails(&one_q, &w_q, &d1));
    }

    #[test]
    fn meet_examples() {
        let d0 = DuplicableSet::empty_for_tests();
        let mut d1 = DuplicableSet::empty_for_tests();
        d1.insert("q");
        let one_q = Simple::linear(q("q"));
        // INF-MATCH.
        assert_eq!(meet(&one_q, &one_q, &d0), one_q);
        // INF-UR.
        let w_p = Simple::unrestricted(q("p"));
        let w_q = Simple::unrestricted(q("q"));
        assert_eq!(meet(&w_p, &w_q, &d0), w_p.tensor(&w_q));
        // INF-DIFFL vs INF-DIFFDL.
        assert_eq!(meet(&one_q, &Simple::empty(), &d0), w_q);
        assert_eq!(meet(&one_q, &Simple::empty(), &d1), one_q);
    }

    #[test]
    fn diff_examples() {
        let d0 = DuplicableSet::empty_for_tests();
        let one_q = Simple::linear(q("q"));
        // D-LINEAR with empty remainder.
        let out = diff(&one_q, &one_q, &d0).unwrap();
        assert!(out.remainder.is_empty());
        // Two linear copies of a non-duplicable atom cannot be bound once.
        let two_q = one_q.tensor(&one_q);
        let err = diff(&two_q, &one_q, &d0).unwrap_err();
        assert_eq!(err.kind, FailureKind::Multiplicity);
        assert_eq!(err.atom, q("q"));
        // D-UR removes all occurrences.
        let mixed = one_q.tensor(&Simple::unrestricted(q("q")));
        let out = diff(&mixed, &Simple::unrestricted(q("q")), &d0).unwrap();
        assert!(out.remainder.is_empty());
        // A repeated linear bound atom is ambiguous.
        let err = diff(&two_q, &two_q, &d0).unwrap_err();
        assert_eq!(err.kind, FailureKind::Ambiguity);
    }

    #[test]
    fn diff_duplicable() {
        let mut d = DuplicableSet::empty_for_tests();
        d.insert("q");
        let one_q = Simple::linear(q("q"));
        let two_q = one_q.tensor(&one_q);
        // D-DUP removes all linear copies, including none at all.
        assert!(diff(&two_q, &one_q, &d).unwrap().remainder.is_empty());
        assert!(diff(&Simple::empty(), &one_q, &d).unwrap().remainder.is_empty());
        // ...but an unrestricted copy would survive into the remainder.
        let w_q = Simple::unrestricted(q("q"));
        let err = diff(&w_q, &one_q, &d).unwrap_err();
        assert_eq!(err.kind, FailureKind::Multiplicity);
    }

    #[test]
    fn display_forms() {
        let c = Simple::from_atoms([
            (Mult::One, q("q")),
            (Mult::Many, Atom::rigid1("Read", "s7")),
        ]);
        assert_eq!(c.to_string(), "w.Read s7 * 1.q");
        assert_eq!(Simple::empty().to_string(), "eps");
    }
}
