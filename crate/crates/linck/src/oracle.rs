//! A bounded decision procedure for declarative wanted-constraint
//! entailment `Q |- C`.
//!
//! This is a brute-force search over the rules C-DOM, C-ID, C-TENSOR,
//! C-WITH and C-IMPL. Candidate intermediate constraints are enumerated
//! from the finite closure of the assumption's atoms with per-atom linear
//! counts at most `depth_bound`. A `true` answer is always sound; a
//! `false` answer may be an artifact of the bound. The compilation
//! pipeline never calls this module: it exists so property tests can audit
//! the solver against the declarative relation.

use std::collections::BTreeMap;

use crate::constraint::{entails, Atom, DuplicableSet, Mult, Simple};
use crate::wanted::Wanted;

pub fn oracle_entails(q: &Simple, c: &Wanted, d: &DuplicableSet, depth_bound: u32) -> bool {
    assert!(depth_bound >= 1, "depth bound must be at least 1");
    let mut search = Search { d, bound: depth_bound, memo: BTreeMap::new() };
    search.prove(q, c, depth_bound)
}

struct Search<'a> {
    d: &'a DuplicableSet,
    bound: u32,
    memo: BTreeMap<(Simple, usize, u32), bool>,
}

impl Search<'_> {
    fn prove(&mut self, q: &Simple, c: &Wanted, fuel: u32) -> bool {
        let key = (q.clone(), c as *const Wanted as usize, fuel);
        if let Some(&hit) = self.memo.get(&key) {
            return hit;
        }
        // Pre-insert false to cut cycles through C-DOM.
        self.memo.insert(key.clone(), false);
        let result = self.prove_uncached(q, c, fuel);
        self.memo.insert(key, result);
        result
    }

    fn prove_uncached(&mut self, q: &Simple, c: &Wanted, fuel: u32) -> bool {
        match c {
            // C-ID composed with C-DOM: a simple goal holds exactly when
            // the concrete entailment can reach it.
            Wanted::Simple(goal, _) => entails(q, goal, self.d),
            // By the inversion lemma, C-WITH needs no strengthening step.
            Wanted::With(c1, c2) => self.prove(q, c1, fuel) && self.prove(q, c2, fuel),
            Wanted::Tensor(c1, c2) => {
                if fuel == 0 {
                    return false;
                }
                // C-DOM then C-TENSOR: find Q' with Q |- Q' and a split
                // Q' = Q1 * Q2 proving each side.
                for q2 in self.entailed_candidates(q) {
                    for (l, r) in splits(&q2) {
                        if self.prove(&l, c1, fuel - 1) && self.prove(&r, c2, fuel - 1) {
                            return true;
                        }
                    }
                }
                false
            }
            Wanted::Impl { mult, given, body, .. } => {
                if fuel == 0 {
                    return false;
                }
                // C-DOM then C-IMPL: find Q0 with Q |- pi.Q0 and
                // Q0 * given |- body.
                match mult {
                    Mult::One => {
                        for q0 in self.entailed_candidates(q) {
                            if self.prove(&q0.tensor(given), body, fuel - 1) {
                                return true;
                            }
                        }
                    }
                    Mult::Many => {
                        for q0 in self.all_candidates(q) {
                            if entails(q, &q0.scale(Mult::Many), self.d)
                                && self.prove(&q0.tensor(given), body, fuel - 1)
                            {
                                return true;
                            }
                        }
                    }
                }
                false
            }
        }
    }

    /// All Q' over the assumption's atoms with Q |- Q'.
    fn entailed_candidates(&self, q: &Simple) -> Vec<Simple> {
        self.all_candidates(q)
            .into_iter()
            .filter(|cand| entails(q, cand, self.d))
            .collect()
    }

    /// The finite closure: every constraint over `atoms(q)` whose per-atom
    /// linear count is at most the bound.
    fn all_candidates(&self, q: &Simple) -> Vec<Simple> {
        let atoms: Vec<Atom> = q.distinct_atoms().into_iter().collect();
        let mut out = vec![Simple::empty()];
        for atom in &atoms {
            let max_lin = self.bound;
            let mut next = Vec::new();
            for base in &out {
                for ur in [false, true] {
                    for lin in 0..=max_lin {
                        let mut cand = base.clone();
                        if ur {
                            cand.push(Mult::Many, atom.clone());
                        }
                        for _ in 0..lin {
                            cand.push(Mult::One, atom.clone());
                        }
                        next.push(cand);
                    }
                }
            }
            out = next;
        }
        out
    }
}

/// Every decomposition `q = l * r`: linear counts are partitioned,
/// unrestricted atoms go left, right, or both.
fn splits(q: &Simple) -> Vec<(Simple, Simple)> {
    let mut out = vec![(Simple::empty(), Simple::empty())];
    for atom in q.unrestricted_atoms() {
        let mut next = Vec::with_capacity(out.len() * 3);
        for (l, r) in &out {
            for (to_l, to_r) in [(true, false), (false, true), (true, true)] {
                let mut l = l.clone();
                let mut r = r.clone();
                if to_l {
                    l.push(Mult::Many, atom.clone());
                }
                if to_r {
                    r.push(Mult::Many, atom.clone());
                }
                next.push((l, r));
            }
        }
        out = next;
    }
    for (atom, n) in q.linear_counts() {
        let mut next = Vec::with_capacity(out.len() * (n as usize + 1));
        for (l, r) in &out {
            for k in 0..=n {
                let mut l = l.clone();
                let mut r = r.clone();
                for _ in 0..k {
                    l.push(Mult::One, atom.clone());
                }
                for _ in 0..(n - k) {
                    r.push(Mult::One, atom.clone());
                }
                next.push((l, r));
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin(name: &str) -> Simple {
        Simple::linear(Atom::nullary(name))
    }

    #[test]
    fn identity() {
        let d = DuplicableSet::empty_for_tests();
        assert!(oracle_entails(&lin("q"), &Wanted::simple(lin("q")), &d, 2));
    }

    #[test]
    fn with_reuses_assumptions() {
        let d = DuplicableSet::empty_for_tests();
        let c = Wanted::with(Wanted::simple(lin("q")), Wanted::simple(lin("q")));
        assert!(oracle_entails(&lin("q"), &c, &d, 2));
    }

    #[test]
    fn tensor_duplicates_only_in_d() {
        let d0 = DuplicableSet::empty_for_tests();
        let mut d1 = DuplicableSet::empty_for_tests();
        d1.insert("q");
        let c = Wanted::tensor(Wanted::simple(lin("q")), Wanted::simple(lin("q")));
        assert!(!oracle_entails(&lin("q"), &c, &d0, 3));
        assert!(oracle_entails(&lin("q"), &c, &d1, 3));
    }

    #[test]
    fn impl_consumes_given() {
        let d = DuplicableSet::empty_for_tests();
        // eps |- 1.(1.q =o 1.q)
        let c = Wanted::impl_(Mult::One, lin("q"), Wanted::simple(lin("q")));
        assert!(oracle_entails(&Simple::empty(), &c, &d, 3));
        // 1.q |/- 1.(1.q =o 1.q): the outer q would be left over.
        assert!(!oracle_entails(&lin("q"), &c, &d, 3));
    }

    #[test]
    fn scaled_impl() {
        let d = DuplicableSet::empty_for_tests();
        // w.q |- w.(eps =o 1.q)
        let c = Wanted::impl_(Mult::Many, Simple::empty(), Wanted::simple(lin("q")));
        let wq = Simple::unrestricted(Atom::nullary("q"));
        assert!(oracle_entails(&wq, &c, &d, 3));
        assert!(!oracle_entails(&lin("q"), &c, &d, 3));
    }
}
