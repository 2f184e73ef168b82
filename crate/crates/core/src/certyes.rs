//! Positive certificates: extraction, verification, and expansion of walk
//! schemes.
//!
//! A walk scheme is a straight-line grammar over vertex pairs generating a
//! single valid walk from the source to the target. Extraction reads each
//! nonterminal's production off the witness recorded by the solver, so the
//! result is acyclic by witness timestamps and has at most `n^2` productions.
//! The verifier trusts nothing: it re-checks every condition from scratch in
//! `O(n^2)` elementary steps.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use num_bigint::BigUint;
use thiserror::Error;

use crate::model::{BracketLabel, Instance, Production, Walk, WalkScheme};
use crate::solver::{Rel, SRelation, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("not a yes-instance: no valid walk from source to target")]
    NotAYesInstance,
}

/// Extracts a walk scheme for a yes-instance from the solver's witnesses.
/// Only nonterminals reachable from the axiom are emitted.
pub fn extract_walk_scheme(
    instance: &Instance,
    closure: &SRelation,
) -> Result<WalkScheme, ExtractError> {
    let axiom = (instance.source(), instance.target());
    if !closure.s(axiom.0, axiom.1) {
        return Err(ExtractError::NotAYesInstance);
    }
    let mut productions: BTreeMap<(u32, u32), Production> = BTreeMap::new();
    let mut queue = VecDeque::new();
    queue.push_back(axiom);
    while let Some((u, v)) = queue.pop_front() {
        if productions.contains_key(&(u, v)) {
            continue;
        }
        let witness = closure
            .witness(Rel::S, u, v)
            .expect("reachable nonterminal has a derived S fact");
        let production = match *witness {
            Witness::EpsRule { .. } => Production::Eps,
            Witness::ConcatRule { u: cu, w, v: cv } => {
                debug_assert_eq!((cu, cv), (u, v));
                queue.push_back((u, w));
                queue.push_back((w, v));
                Production::Concat(w)
            }
            Witness::CloseRule { open, u: cu, y, v: cv } => {
                debug_assert_eq!((cu, cv), (u, v));
                let rel = if open == BracketLabel::Open1 { Rel::P } else { Rel::Q };
                let pair_witness = closure
                    .witness(rel, u, y)
                    .expect("close rule references a derived P/Q fact");
                match *pair_witness {
                    Witness::OpenRule { open: o2, x, .. } => {
                        debug_assert_eq!(o2, open);
                        queue.push_back((x, y));
                        Production::Wrap { x, y, open }
                    }
                    _ => unreachable!("P/Q facts are only derived by the open rule"),
                }
            }
            Witness::OpenRule { .. } => unreachable!("S facts are never derived by the open rule"),
        };
        productions.insert((u, v), production);
    }
    Ok(WalkScheme::new(axiom, productions)
        .expect("witness-extracted schemes satisfy the walk-scheme invariants"))
}

/// Why a scheme was rejected; carries the first violated condition and the
/// offending nonterminal.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RejectReason {
    #[error("axiom is <{found_u}, {found_v}>, expected <{want_u}, {want_v}>")]
    WrongAxiom { found_u: u32, found_v: u32, want_u: u32, want_v: u32 },
    #[error("nonterminal <{u}, {v}> out of range")]
    OutOfRange { u: u32, v: u32 },
    #[error("eps production on off-diagonal pair <{u}, {v}>")]
    EpsOffDiagonal { u: u32, v: u32 },
    #[error("nonterminal <{u}, {v}> referenced by <{from_u}, {from_v}> has no production")]
    MissingProduction { u: u32, v: u32, from_u: u32, from_v: u32 },
    #[error("edge ({from}, {to}, {label}) absent (required by <{u}, {v}>)")]
    EdgeAbsent { from: u32, to: u32, label: BracketLabel, u: u32, v: u32 },
    #[error("dependency cycle through <{u}, {v}>")]
    DependencyCycle { u: u32, v: u32 },
}

use crate::Verdict;

/// Decides whether `ws` is a walk scheme for the instance, re-checking every
/// condition of the definition. Runs in `O(n^2)` elementary steps.
pub fn verify_walk_scheme(instance: &Instance, ws: &WalkScheme) -> Verdict<RejectReason> {
    verify_walk_scheme_counted(instance, ws).0
}

/// As `verify_walk_scheme`, also returning the number of elementary checks
/// performed; tests pin this against a quadratic budget.
pub fn verify_walk_scheme_counted(
    instance: &Instance,
    ws: &WalkScheme,
) -> (Verdict<RejectReason>, u64) {
    let mut steps: u64 = 0;
    let n = instance.n();
    let (s, t) = (instance.source(), instance.target());
    steps += 1;
    if ws.axiom() != (s, t) {
        let (fu, fv) = ws.axiom();
        return (
            Verdict::Reject(RejectReason::WrongAxiom { found_u: fu, found_v: fv, want_u: s, want_v: t }),
            steps,
        );
    }
    // The axiom always has a production (a structural walk-scheme property).
    let productions = ws.productions();
    for (&(u, v), &p) in productions {
        steps += 1;
        if u == 0 || u > n || v == 0 || v > n {
            return (Verdict::Reject(RejectReason::OutOfRange { u, v }), steps);
        }
        match p {
            Production::Eps => {
                steps += 1;
                if u != v {
                    return (Verdict::Reject(RejectReason::EpsOffDiagonal { u, v }), steps);
                }
            }
            Production::Concat(w) => {
                steps += 1;
                if w == 0 || w > n {
                    return (Verdict::Reject(RejectReason::OutOfRange { u: w, v: w }), steps);
                }
                for nt in [(u, w), (w, v)] {
                    steps += 1;
                    if !productions.contains_key(&nt) {
                        return (
                            Verdict::Reject(RejectReason::MissingProduction {
                                u: nt.0,
                                v: nt.1,
                                from_u: u,
                                from_v: v,
                            }),
                            steps,
                        );
                    }
                }
            }
            Production::Wrap { x, y, open } => {
                steps += 1;
                if x == 0 || x > n || y == 0 || y > n {
                    return (Verdict::Reject(RejectReason::OutOfRange { u: x, v: y }), steps);
                }
                let close = open.matching();
                steps += 2;
                if !instance.has_edge(u, x, open) {
                    return (
                        Verdict::Reject(RejectReason::EdgeAbsent { from: u, to: x, label: open, u, v }),
                        steps,
                    );
                }
                if !instance.has_edge(y, v, close) {
                    return (
                        Verdict::Reject(RejectReason::EdgeAbsent { from: y, to: v, label: close, u, v }),
                        steps,
                    );
                }
                steps += 1;
                if !productions.contains_key(&(x, y)) {
                    return (
                        Verdict::Reject(RejectReason::MissingProduction {
                            u: x,
                            v: y,
                            from_u: u,
                            from_v: v,
                        }),
                        steps,
                    );
                }
            }
        }
    }
    // Acyclicity of the dependency graph by Kahn's algorithm; every
    // reference is known to resolve at this point.
    let mut indegree: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    for (&nt, &p) in productions {
        indegree.entry(nt).or_insert(0);
        for child in WalkScheme::references(nt, p) {
            steps += 1;
            *indegree.entry(child).or_insert(0) += 1;
        }
    }
    let mut ready: VecDeque<(u32, u32)> =
        indegree.iter().filter(|(_, &d)| d == 0).map(|(&nt, _)| nt).collect();
    let mut seen = 0usize;
    while let Some(nt) = ready.pop_front() {
        seen += 1;
        steps += 1;
        for child in WalkScheme::references(nt, productions[&nt]) {
            let d = indegree.get_mut(&child).expect("reference resolved above");
            *d -= 1;
            if *d == 0 {
                ready.push_back(child);
            }
        }
    }
    if seen != productions.len() {
        let (&(u, v), _) = indegree
            .iter()
            .find(|(nt, &d)| d > 0 && productions.contains_key(nt))
            .expect("some nonterminal stays blocked on a cycle");
        return (Verdict::Reject(RejectReason::DependencyCycle { u, v }), steps);
    }
    (Verdict::Accept, steps)
}

/// Number of terminal edges of the word generated by an accepted scheme,
/// computed bottom-up without expanding the word.
pub fn expand_length(ws: &WalkScheme) -> BigUint {
    let lengths = all_lengths(ws);
    lengths[&ws.axiom()].clone()
}

fn all_lengths(ws: &WalkScheme) -> BTreeMap<(u32, u32), BigUint> {
    // Reverse topological evaluation: repeatedly settle nonterminals whose
    // references are settled. The scheme is acyclic, so this terminates.
    let productions = ws.productions();
    let mut remaining: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    let mut dependents: BTreeMap<(u32, u32), Vec<(u32, u32)>> = BTreeMap::new();
    let mut ready: VecDeque<(u32, u32)> = VecDeque::new();
    for (&nt, &p) in productions {
        let refs = WalkScheme::references(nt, p);
        remaining.insert(nt, refs.len() as u32);
        if refs.is_empty() {
            ready.push_back(nt);
        }
        for r in refs {
            dependents.entry(r).or_default().push(nt);
        }
    }
    let mut lengths: BTreeMap<(u32, u32), BigUint> = BTreeMap::new();
    while let Some(nt) = ready.pop_front() {
        let len = match productions[&nt] {
            Production::Eps => BigUint::from(0u32),
            Production::Concat(w) => {
                let (u, v) = nt;
                lengths[&(u, w)].clone() + lengths[&(w, v)].clone()
            }
            Production::Wrap { x, y, .. } => BigUint::from(2u32) + lengths[&(x, y)].clone(),
        };
        lengths.insert(nt, len);
        for dep in dependents.get(&nt).cloned().unwrap_or_default() {
            let r = remaining.get_mut(&dep).unwrap();
            *r -= 1;
            if *r == 0 {
                ready.push_back(dep);
            }
        }
    }
    lengths
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpandError {
    #[error("generated walk is longer than the requested bound")]
    TooLong,
}

/// Expands the unique generated walk, refusing to produce any output when
/// its length exceeds `max_len`.
pub fn expand_walk(ws: &WalkScheme, max_len: u64) -> Result<Walk, ExpandError> {
    if expand_length(ws) > BigUint::from(max_len) {
        return Err(ExpandError::TooLong);
    }
    enum Item {
        Expand(u32, u32),
        Step(u32, BracketLabel),
    }
    let mut walk = Walk::empty(ws.axiom().0);
    let mut stack = vec![Item::Expand(ws.axiom().0, ws.axiom().1)];
    while let Some(item) = stack.pop() {
        match item {
            Item::Step(to, label) => walk.steps.push((to, label)),
            Item::Expand(u, v) => match ws.production((u, v)).expect("scheme is closed") {
                Production::Eps => {}
                Production::Concat(w) => {
                    stack.push(Item::Expand(w, v));
                    stack.push(Item::Expand(u, w));
                }
                Production::Wrap { x, y, open } => {
                    stack.push(Item::Step(v, open.matching()));
                    stack.push(Item::Expand(x, y));
                    stack.push(Item::Step(x, open));
                }
            },
        }
    }
    Ok(walk)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Edge;
    use crate::oracle::{bounded_walk_search, dyck2_word_check};
    use crate::solver::close;
    use BracketLabel::*;

    fn three_vertex() -> Instance {
        Instance::new(3, 1, 3, vec![Edge::new(1, 2, Open1), Edge::new(2, 3, Close1)]).unwrap()
    }

    #[test]
    fn extract_single_vertex() {
        let i = Instance::new(1, 1, 1, vec![]).unwrap();
        let ws = extract_walk_scheme(&i, &close(&i)).unwrap();
        assert_eq!(ws.axiom(), (1, 1));
        assert_eq!(ws.productions().len(), 1);
        assert_eq!(ws.production((1, 1)), Some(Production::Eps));
    }

    #[test]
    fn extract_three_vertex_matches_oracle_walk() {
        let i = three_vertex();
        let ws = extract_walk_scheme(&i, &close(&i)).unwrap();
        assert_eq!(ws.axiom(), (1, 3));
        assert_eq!(ws.production((1, 3)), Some(Production::Wrap { x: 2, y: 2, open: Open1 }));
        assert_eq!(ws.production((2, 2)), Some(Production::Eps));
        assert_eq!(ws.productions().len(), 2);
        // The expanded walk is the unique walk the oracle finds.
        let expanded = expand_walk(&ws, 10).unwrap();
        let oracle = bounded_walk_search(&i, 4).unwrap();
        assert_eq!(expanded, oracle);
    }

    #[test]
    fn extract_rejects_no_instance() {
        let i =
            Instance::new(2, 1, 2, vec![Edge::new(1, 2, Open1), Edge::new(2, 1, Close1)]).unwrap();
        assert_eq!(extract_walk_scheme(&i, &close(&i)), Err(ExtractError::NotAYesInstance));
    }

    #[test]
    fn verify_accepts_extraction() {
        let i = three_vertex();
        let ws = extract_walk_scheme(&i, &close(&i)).unwrap();
        assert!(verify_walk_scheme(&i, &ws).is_accept());
    }

    #[test]
    fn verify_rejects_absent_edge() {
        let i = three_vertex();
        let mut prods = BTreeMap::new();
        prods.insert((1, 3), Production::Wrap { x: 2, y: 2, open: Open2 });
        prods.insert((2, 2), Production::Eps);
        let ws = WalkScheme::new_unchecked((1, 3), prods);
        match verify_walk_scheme(&i, &ws) {
            Verdict::Reject(RejectReason::EdgeAbsent { from: 1, to: 2, label: Open2, .. }) => {}
            other => panic!("expected absent-edge rejection, got {other:?}"),
        }
    }

    #[test]
    fn verify_rejects_dependency_cycle() {
        let i = Instance::new(1, 1, 1, vec![]).unwrap();
        let mut prods = BTreeMap::new();
        prods.insert((1, 1), Production::Concat(1));
        let ws = WalkScheme::new_unchecked((1, 1), prods);
        match verify_walk_scheme(&i, &ws) {
            Verdict::Reject(RejectReason::DependencyCycle { u: 1, v: 1 }) => {}
            other => panic!("expected cycle rejection, got {other:?}"),
        }
    }

    #[test]
    fn verify_rejects_wrong_axiom_and_missing_reference() {
        let i = three_vertex();
        let mut prods = BTreeMap::new();
        prods.insert((1, 1), Production::Eps);
        let ws = WalkScheme::new_unchecked((1, 1), prods);
        assert!(matches!(
            verify_walk_scheme(&i, &ws),
            Verdict::Reject(RejectReason::WrongAxiom { .. })
        ));
        let mut prods = BTreeMap::new();
        prods.insert((1, 3), Production::Concat(2));
        let ws = WalkScheme::new_unchecked((1, 3), prods);
        assert!(matches!(
            verify_walk_scheme(&i, &ws),
            Verdict::Reject(RejectReason::MissingProduction { u: 1, v: 2, .. })
        ));
    }

    #[test]
    fn expand_length_examples() {
        let i = Instance::new(1, 1, 1, vec![]).unwrap();
        let ws = extract_walk_scheme(&i, &close(&i)).unwrap();
        assert_eq!(expand_length(&ws), BigUint::from(0u32));
        let i = three_vertex();
        let ws = extract_walk_scheme(&i, &close(&i)).unwrap();
        assert_eq!(expand_length(&ws), BigUint::from(2u32));
    }

    #[test]
    fn expand_walk_examples() {
        let i = three_vertex();
        let ws = extract_walk_scheme(&i, &close(&i)).unwrap();
        let w = expand_walk(&ws, 10).unwrap();
        assert_eq!(w.start, 1);
        assert_eq!(w.steps, vec![(2, Open1), (3, Close1)]);
        assert!(dyck2_word_check(&w.label_word()));
        assert_eq!(expand_walk(&ws, 1), Err(ExpandError::TooLong));

        let i = Instance::new(1, 1, 1, vec![]).unwrap();
        let ws = extract_walk_scheme(&i, &close(&i)).unwrap();
        let w = expand_walk(&ws, 10).unwrap();
        assert_eq!(w, Walk::empty(1));
    }
}
