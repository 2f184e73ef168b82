//! Pushdown reachability: backward saturation, matrix-based non-reachability
//! certificates, and PDA emptiness with certificates.
//!
//! Saturation adds a transition `p --A--> s` to the P-automaton whenever the
//! system has a rule `(p, A) -> (q, w)` and the automaton already walks from
//! `q` to `s` reading `w`. The saturated automaton overapproximates the set
//! of configurations from which the target set is reachable, and its
//! transition matrices, together with the per-rule constant matrices, form a
//! checkable inductive invariant.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::certno::ExtractError as SepExtractError;
use crate::certyes::ExtractError as WsExtractError;
use crate::freivalds::check_product;
use crate::model::{
    Instance, NatMatrix, PAutomaton, Pda, PdsCertificate, PdsRule, PushdownSystem,
    SeparatorBundle, WalkScheme,
};
use crate::reductions::{pda_normalize, pda_to_dyck2};
use crate::solver::close;
use crate::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PushdownError {
    #[error("convention violation: {0}")]
    ConventionViolation(String),
}

fn check_pair(pds: &PushdownSystem, aut: &PAutomaton) -> Result<(), PushdownError> {
    aut.check_against(pds).map_err(|e| PushdownError::ConventionViolation(e.reason))?;
    for (_, _, to) in aut.transitions() {
        if pds.states().contains(to) {
            return Err(PushdownError::ConventionViolation(format!(
                "initial automaton has a transition into control state '{to}'"
            )));
        }
    }
    Ok(())
}

/// Least saturated superset of the automaton's transitions. The fixpoint is
/// reached when applying the saturation rule changes nothing.
pub fn prestar(pds: &PushdownSystem, aut: &PAutomaton) -> Result<PAutomaton, PushdownError> {
    check_pair(pds, aut)?;
    let mut trans: BTreeSet<(String, String, String)> = aut.transitions().clone();
    loop {
        let mut additions: Vec<(String, String, String)> = Vec::new();
        for rule in pds.rules() {
            match rule.push.as_slice() {
                [] => {
                    additions.push((rule.from_state.clone(), rule.pop.clone(), rule.to_state.clone()));
                }
                [b] => {
                    for (f, l, s) in &trans {
                        if *f == rule.to_state && l == b {
                            additions.push((rule.from_state.clone(), rule.pop.clone(), s.clone()));
                        }
                    }
                }
                [b, c] => {
                    for (f, l, mid) in &trans {
                        if *f != rule.to_state || l != b {
                            continue;
                        }
                        for (f2, l2, s) in &trans {
                            if f2 == mid && l2 == c {
                                additions.push((
                                    rule.from_state.clone(),
                                    rule.pop.clone(),
                                    s.clone(),
                                ));
                            }
                        }
                    }
                }
                _ => unreachable!("rules push at most two symbols"),
            }
        }
        let before = trans.len();
        trans.extend(additions);
        if trans.len() == before {
            break;
        }
    }
    PAutomaton::new(aut.states().clone(), trans, aut.finals().clone())
        .map_err(|e| PushdownError::ConventionViolation(e.reason))
}

/// Yes iff the saturated automaton accepts the configuration `(q0, gamma0)`.
pub fn decide_pushdown_reach(
    pds: &PushdownSystem,
    q0: &str,
    gamma0: &str,
    aut: &PAutomaton,
) -> Result<bool, PushdownError> {
    if !pds.states().contains(q0) {
        return Err(PushdownError::ConventionViolation(format!("unknown control state '{q0}'")));
    }
    if !pds.stack_alphabet().contains(gamma0) {
        return Err(PushdownError::ConventionViolation(format!("unknown stack symbol '{gamma0}'")));
    }
    let saturated = prestar(pds, aut)?;
    Ok(saturated.accepts(q0, &[gamma0.to_string()]))
}

/// Constant matrices of an instance: the sorted state order, the original
/// automaton's per-symbol transition matrices `P^A`, and the rule matrices
/// `T^{A,w}`. Recomputed from the inputs on every use; never taken from a
/// certificate file.
pub struct PdsMatrices {
    states: Vec<String>,
    dim: usize,
    p: BTreeMap<String, NatMatrix>,
    t: BTreeMap<(String, Vec<String>), NatMatrix>,
}

impl PdsMatrices {
    pub fn new(pds: &PushdownSystem, aut: &PAutomaton) -> Self {
        let states: Vec<String> = aut.states().iter().cloned().collect();
        let index: BTreeMap<&String, usize> =
            states.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let dim = states.len();
        let mut p: BTreeMap<String, NatMatrix> = pds
            .stack_alphabet()
            .iter()
            .map(|a| (a.clone(), NatMatrix::zeros(dim)))
            .collect();
        for (from, label, to) in aut.transitions() {
            if let Some(m) = p.get_mut(label) {
                m.set(index[from], index[to], 1);
            }
        }
        let mut t: BTreeMap<(String, Vec<String>), NatMatrix> = BTreeMap::new();
        for rule in pds.rules() {
            let key = (rule.pop.clone(), rule.push.clone());
            let m = t.entry(key).or_insert_with(|| NatMatrix::zeros(dim));
            m.set(index[&rule.from_state], index[&rule.to_state], 1);
        }
        PdsMatrices { states, dim, p, t }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn p_matrix(&self, a: &str) -> &NatMatrix {
        &self.p[a]
    }

    pub fn t_matrix(&self, a: &str, w: &[String]) -> NatMatrix {
        self.t
            .get(&(a.to_string(), w.to_vec()))
            .cloned()
            .unwrap_or_else(|| NatMatrix::zeros(self.dim))
    }
}

/// Extracts the Eq.-style certificate from the saturated automaton: `M^A` is
/// the saturated transition matrix and the auxiliary matrices are the exact
/// products required by the conditions.
pub fn extract_pds_certificate(
    pds: &PushdownSystem,
    aut: &PAutomaton,
) -> Result<PdsCertificate, PushdownError> {
    let saturated = prestar(pds, aut)?;
    let consts = PdsMatrices::new(pds, aut);
    let sat_consts = PdsMatrices::new(pds, &saturated);
    let symbols: Vec<String> = pds.stack_alphabet().iter().cloned().collect();
    let mut m = BTreeMap::new();
    for a in &symbols {
        m.insert(a.clone(), sat_consts.p_matrix(a).clone());
    }
    let mut mab = BTreeMap::new();
    for a in &symbols {
        for b in &symbols {
            let t = consts.t_matrix(a, std::slice::from_ref(b));
            mab.insert((a.clone(), b.clone()), t.mul(&m[b]));
        }
    }
    let mut m1 = BTreeMap::new();
    let mut m2 = BTreeMap::new();
    for a in &symbols {
        for b in &symbols {
            for c in &symbols {
                let t = consts.t_matrix(a, &[b.clone(), c.clone()]);
                let first = t.mul(&m[b]);
                let second = first.mul(&m[c]);
                m1.insert((a.clone(), b.clone(), c.clone()), first);
                m2.insert((a.clone(), b.clone(), c.clone()), second);
            }
        }
    }
    Ok(PdsCertificate { dim: consts.dim(), symbols, m, mab, m1, m2 })
}

/// First violated certificate condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PdsReject {
    Shape(String),
    /// One of the inequality conditions `lhs <= rhs` fails at `(i, j)`
    /// (1-based state indices in sorted order).
    NotLeq { lhs: String, rhs: String, i: u32, j: u32 },
    /// A product equality fails at an entry (deterministic mode).
    ProductMismatch { name: String, i: u32, j: u32 },
    /// A product equality fails a Freivalds probe (randomized mode).
    ProductProbe { name: String, row: u32 },
    /// `(M^{gamma0})[q0, f] != 0` for a final state `f`.
    TargetEntry { final_state: String },
}

impl fmt::Display for PdsReject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PdsReject::Shape(what) => write!(f, "malformed certificate: {what}"),
            PdsReject::NotLeq { lhs, rhs, i, j } => write!(f, "{lhs} !<= {rhs} at ({i}, {j})"),
            PdsReject::ProductMismatch { name, i, j } => {
                write!(f, "product {name} fails at ({i}, {j})")
            }
            PdsReject::ProductProbe { name, row } => {
                write!(f, "product {name} fails a probe at row {row}")
            }
            PdsReject::TargetEntry { final_state } => {
                write!(f, "(M^gamma0)[q0, {final_state}] != 0")
            }
        }
    }
}

/// Checker mode: exact products or Freivalds probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    Det,
    Rand { seed: u64, reps: u32 },
}

/// Checks all conditions of the certificate system for the query
/// `(q0, gamma0)`. The constant matrices are recomputed from the pushdown
/// system and the original automaton; the certificate is untrusted.
pub fn check_pds_certificate(
    pds: &PushdownSystem,
    aut: &PAutomaton,
    q0: &str,
    gamma0: &str,
    cert: &PdsCertificate,
    mode: CheckMode,
) -> Result<Verdict<PdsReject>, PushdownError> {
    check_pair(pds, aut)?;
    if !pds.states().contains(q0) {
        return Err(PushdownError::ConventionViolation(format!("unknown control state '{q0}'")));
    }
    if !pds.stack_alphabet().contains(gamma0) {
        return Err(PushdownError::ConventionViolation(format!("unknown stack symbol '{gamma0}'")));
    }
    let consts = PdsMatrices::new(pds, aut);
    let dim = consts.dim();
    let symbols: Vec<String> = pds.stack_alphabet().iter().cloned().collect();

    // Shape of the claimed certificate.
    if cert.dim != dim || cert.symbols != symbols {
        return Ok(Verdict::Reject(PdsReject::Shape(
            "certificate dimensions or alphabet do not match the instance".into(),
        )));
    }
    let bound = (dim as u64) * (dim as u64);
    for (name, matrices) in [("M", &cert.m)] {
        for (a, mat) in matrices.iter() {
            if mat.dim() != dim || !mat.is_boolean() {
                return Ok(Verdict::Reject(PdsReject::Shape(format!(
                    "matrix {name}:{a} must be a 0-1 matrix of dimension {dim}"
                ))));
            }
        }
    }
    for a in &symbols {
        if !cert.m.contains_key(a) {
            return Ok(Verdict::Reject(PdsReject::Shape(format!("missing matrix M:{a}"))));
        }
        for b in &symbols {
            if !cert.mab.contains_key(&(a.clone(), b.clone())) {
                return Ok(Verdict::Reject(PdsReject::Shape(format!("missing matrix MAB:{a}:{b}"))));
            }
            for c in &symbols {
                let key = (a.clone(), b.clone(), c.clone());
                if !cert.m1.contains_key(&key) || !cert.m2.contains_key(&key) {
                    return Ok(Verdict::Reject(PdsReject::Shape(format!(
                        "missing matrices M1/M2:{a}:{b}:{c}"
                    ))));
                }
            }
        }
    }
    for (mat, what) in cert
        .mab
        .values()
        .map(|m| (m, "MAB"))
        .chain(cert.m1.values().map(|m| (m, "M1")))
        .chain(cert.m2.values().map(|m| (m, "M2")))
    {
        if mat.dim() != dim {
            return Ok(Verdict::Reject(PdsReject::Shape(format!(
                "matrix {what} has mismatched dimension"
            ))));
        }
        if mat.max_entry() > bound {
            return Ok(Verdict::Reject(PdsReject::Shape(format!(
                "matrix {what} has an entry above |S|^2"
            ))));
        }
    }

    // Inequality conditions on the original automaton and the epsilon rules.
    for a in &symbols {
        if let Some((i, j)) = consts.p_matrix(a).leq_violation(&cert.m[a]) {
            return Ok(Verdict::Reject(PdsReject::NotLeq {
                lhs: format!("P[{a}]"),
                rhs: format!("M[{a}]"),
                i: i as u32 + 1,
                j: j as u32 + 1,
            }));
        }
        if let Some((i, j)) = consts.t_matrix(a, &[]).leq_violation(&cert.m[a]) {
            return Ok(Verdict::Reject(PdsReject::NotLeq {
                lhs: format!("T[{a},eps]"),
                rhs: format!("M[{a}]"),
                i: i as u32 + 1,
                j: j as u32 + 1,
            }));
        }
    }

    // Product equalities. In randomized mode every product is probed `reps`
    // times regardless of earlier failures; the first failure in condition
    // order is reported.
    let mut product_index: u64 = 0;
    let mut probes: u64 = 0;
    let mut first_product_failure: Option<PdsReject> = None;
    let mut check_eq = |left: &NatMatrix, right: &NatMatrix, claimed: &NatMatrix, name: String| {
        let failure = match mode {
            CheckMode::Det => left
                .mul(right)
                .neq_witness(claimed)
                .map(|(i, j)| PdsReject::ProductMismatch { name, i: i as u32 + 1, j: j as u32 + 1 }),
            CheckMode::Rand { seed, reps } => {
                check_product(left, right, claimed, seed, product_index, reps, &mut probes)
                    .map(|row| PdsReject::ProductProbe { name, row: row as u32 + 1 })
            }
        };
        product_index += 1;
        if first_product_failure.is_none() {
            first_product_failure = failure;
        }
    };
    for a in &symbols {
        for b in &symbols {
            let t = consts.t_matrix(a, std::slice::from_ref(b));
            check_eq(&t, &cert.m[b], &cert.mab[&(a.clone(), b.clone())], format!("T[{a},{b}]*M[{b}]=MAB[{a},{b}]"));
        }
    }
    for a in &symbols {
        for b in &symbols {
            for c in &symbols {
                let key = (a.clone(), b.clone(), c.clone());
                let t = consts.t_matrix(a, &[b.clone(), c.clone()]);
                check_eq(&t, &cert.m[b], &cert.m1[&key], format!("T[{a},{b}{c}]*M[{b}]=M1[{a},{b},{c}]"));
                check_eq(&cert.m1[&key], &cert.m[c], &cert.m2[&key], format!(
                    "M1[{a},{b},{c}]*M[{c}]=M2[{a},{b},{c}]"
                ));
            }
        }
    }
    if let Some(r) = first_product_failure {
        return Ok(Verdict::Reject(r));
    }

    // Boolean domination conditions.
    for a in &symbols {
        for b in &symbols {
            if let Some((i, j)) =
                cert.mab[&(a.clone(), b.clone())].to_bool().leq_violation(&cert.m[a])
            {
                return Ok(Verdict::Reject(PdsReject::NotLeq {
                    lhs: format!("bool(MAB[{a},{b}])"),
                    rhs: format!("M[{a}]"),
                    i: i as u32 + 1,
                    j: j as u32 + 1,
                }));
            }
            for c in &symbols {
                let key = (a.clone(), b.clone(), c.clone());
                if let Some((i, j)) = cert.m2[&key].to_bool().leq_violation(&cert.m[a]) {
                    return Ok(Verdict::Reject(PdsReject::NotLeq {
                        lhs: format!("bool(M2[{a},{b},{c}])"),
                        rhs: format!("M[{a}]"),
                        i: i as u32 + 1,
                        j: j as u32 + 1,
                    }));
                }
            }
        }
    }

    // The queried configuration must stay outside the invariant.
    let q0_index = consts.state_index(q0).expect("control states are automaton states");
    for f in aut.finals() {
        let f_index = consts.state_index(f).expect("final states are automaton states");
        if cert.m[gamma0].get(q0_index, f_index) != 0 {
            return Ok(Verdict::Reject(PdsReject::TargetEntry { final_state: f.clone() }));
        }
    }
    Ok(Verdict::Accept)
}

/// Result of PDA emptiness with its certificate: the Dyck-2 reduction image
/// together with a walk scheme (nonempty) or a separator (empty) for it.
#[derive(Debug, Clone)]
pub enum PdaEmptiness {
    Nonempty { image: Instance, certificate: WalkScheme },
    Empty { image: Instance, certificate: SeparatorBundle },
}

impl PdaEmptiness {
    pub fn is_empty(&self) -> bool {
        matches!(self, PdaEmptiness::Empty { .. })
    }

    pub fn image(&self) -> &Instance {
        match self {
            PdaEmptiness::Nonempty { image, .. } | PdaEmptiness::Empty { image, .. } => image,
        }
    }
}

/// Decides language emptiness by reducing to Dyck-2 reachability and solving;
/// the certificate is the image instance's walk scheme or separator.
pub fn pda_emptiness(pda: &Pda) -> PdaEmptiness {
    let image = pda_to_dyck2(pda);
    let closure = close(&image);
    if closure.s(image.source(), image.target()) {
        let certificate = crate::certyes::extract_walk_scheme(&image, &closure)
            .unwrap_or_else(|e: WsExtractError| unreachable!("decided yes: {e}"));
        PdaEmptiness::Nonempty { image, certificate }
    } else {
        let certificate = crate::certno::extract_separator(&image, &closure)
            .unwrap_or_else(|e: SepExtractError| unreachable!("decided no: {e}"));
        PdaEmptiness::Empty { image, certificate }
    }
}

/// Independent emptiness route: view the PDA as a pushdown system by
/// dropping input letters and ask whether an accepting configuration (a
/// final state over the bare bottom symbol) is backward-reachable.
pub fn pda_emptiness_via_prestar(pda: &Pda) -> Result<bool, PushdownError> {
    let norm = pda_normalize(pda);
    let rules: Vec<PdsRule> = norm
        .transitions
        .iter()
        .map(|t| PdsRule {
            from_state: t.from_state.clone(),
            pop: t.pop.clone(),
            to_state: t.to_state.clone(),
            push: t.push.clone(),
        })
        .collect();
    let pds = PushdownSystem::new(norm.states.clone(), norm.stack_alphabet.clone(), rules)
        .map_err(|e| PushdownError::ConventionViolation(e.reason))?;
    let mut fin = "acc#".to_string();
    while norm.states.contains(&fin) {
        fin.push('#');
    }
    let mut states = norm.states.clone();
    states.insert(fin.clone());
    let transitions: BTreeSet<(String, String, String)> = norm
        .finals
        .iter()
        .map(|q| (q.clone(), norm.bottom.clone(), fin.clone()))
        .collect();
    let aut = PAutomaton::new(states, transitions, [fin].into_iter().collect())
        .map_err(|e| PushdownError::ConventionViolation(e.reason))?;
    let nonempty = decide_pushdown_reach(&pds, &norm.initial_state, &norm.bottom, &aut)?;
    Ok(nonempty)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::bounded_pds_reaching;

    fn set(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn rule(from: &str, pop: &str, to: &str, push: &[&str]) -> PdsRule {
        PdsRule {
            from_state: from.into(),
            pop: pop.into(),
            to_state: to.into(),
            push: push.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn pauto(
        states: &[&str],
        finals: &[&str],
        trans: &[(&str, &str, &str)],
    ) -> PAutomaton {
        PAutomaton::new(
            set(states),
            trans.iter().map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string())).collect(),
            set(finals),
        )
        .unwrap()
    }

    #[test]
    fn prestar_pop_rule_adds_epsilon_walk_transition() {
        let pds =
            PushdownSystem::new(set(&["p", "q"]), set(&["A"]), vec![rule("p", "A", "q", &[])]).unwrap();
        let aut = pauto(&["p", "q"], &[], &[]);
        let sat = prestar(&pds, &aut).unwrap();
        assert!(sat.transitions().contains(&("p".into(), "A".into(), "q".into())));
        assert_eq!(sat.transitions().len(), 1);
    }

    #[test]
    fn prestar_single_symbol_rule_follows_transition() {
        let pds =
            PushdownSystem::new(set(&["p", "q"]), set(&["A", "B"]), vec![rule("p", "A", "q", &["B"])])
                .unwrap();
        let aut = pauto(&["f", "p", "q"], &["f"], &[("q", "B", "f")]);
        let sat = prestar(&pds, &aut).unwrap();
        assert!(sat.transitions().contains(&("p".into(), "A".into(), "f".into())));
    }

    #[test]
    fn prestar_no_rules_is_identity() {
        let pds = PushdownSystem::new(set(&["p"]), set(&["A"]), vec![]).unwrap();
        let aut = pauto(&["f", "p"], &["f"], &[("p", "A", "f")]);
        let sat = prestar(&pds, &aut).unwrap();
        assert_eq!(sat.transitions(), aut.transitions());
    }

    #[test]
    fn prestar_rejects_transitions_into_control_states() {
        let pds = PushdownSystem::new(set(&["p"]), set(&["A"]), vec![]).unwrap();
        let aut = pauto(&["f", "p"], &["f"], &[("f", "A", "p")]);
        assert!(matches!(prestar(&pds, &aut), Err(PushdownError::ConventionViolation(_))));
    }

    #[test]
    fn decide_direct_acceptance() {
        let pds = PushdownSystem::new(set(&["p"]), set(&["A"]), vec![]).unwrap();
        let aut = pauto(&["f", "p"], &["f"], &[("p", "A", "f")]);
        assert_eq!(decide_pushdown_reach(&pds, "p", "A", &aut), Ok(true));
    }

    #[test]
    fn decide_one_step_rule() {
        // Rule (p, B) -> (q, B) with target set {(q, B)}: the saturated
        // automaton accepts (p, B) after one simulation step.
        let pds =
            PushdownSystem::new(set(&["p", "q"]), set(&["B"]), vec![rule("p", "B", "q", &["B"])])
                .unwrap();
        let aut = pauto(&["f", "p", "q"], &["f"], &[("q", "B", "f")]);
        assert_eq!(decide_pushdown_reach(&pds, "p", "B", &aut), Ok(true));
        // Cross-check against the bounded forward search.
        let accepts = |q: &str, st: &[String]| aut.accepts(q, st);
        let reaching = bounded_pds_reaching(&pds, &accepts, 6, 8);
        assert!(reaching.contains(&("p".to_string(), vec!["B".to_string()])));
    }

    #[test]
    fn decide_no_rules_unreachable() {
        let pds = PushdownSystem::new(set(&["p", "q"]), set(&["A", "B"]), vec![]).unwrap();
        let aut = pauto(&["f", "p", "q"], &["f"], &[("q", "B", "f")]);
        assert_eq!(decide_pushdown_reach(&pds, "p", "A", &aut), Ok(false));
    }

    #[test]
    fn certificate_no_rules_equals_original_matrices() {
        let pds = PushdownSystem::new(set(&["p"]), set(&["A", "B"]), vec![]).unwrap();
        let aut = pauto(&["f", "p"], &["f"], &[("p", "A", "f")]);
        let cert = extract_pds_certificate(&pds, &aut).unwrap();
        let consts = PdsMatrices::new(&pds, &aut);
        for a in ["A", "B"] {
            assert_eq!(&cert.m[a], consts.p_matrix(a));
        }
        assert!(cert.mab.values().all(|m| m.max_entry() == 0));
        assert!(cert.m2.values().all(|m| m.max_entry() == 0));
        // (p, B) is unreachable: certificate accepted for that query.
        let v = check_pds_certificate(&pds, &aut, "p", "B", &cert, CheckMode::Det).unwrap();
        assert!(v.is_accept());
        // (p, A) is reachable: the target-entry condition fails.
        let v = check_pds_certificate(&pds, &aut, "p", "A", &cert, CheckMode::Det).unwrap();
        assert_eq!(v, Verdict::Reject(PdsReject::TargetEntry { final_state: "f".into() }));
    }

    fn push_pop_example() -> (PushdownSystem, PAutomaton) {
        // p pushes B over A and moves to q; q pops B back. Target set
        // {(r, A)}: reachable from (q, BA) and (p, A), not from (r, B).
        let pds = PushdownSystem::new(
            set(&["p", "q", "r"]),
            set(&["A", "B"]),
            vec![rule("p", "A", "q", &["B", "A"]), rule("q", "B", "r", &[])],
        )
        .unwrap();
        let aut = pauto(&["f", "p", "q", "r"], &["f"], &[("r", "A", "f")]);
        (pds, aut)
    }

    #[test]
    fn certificate_dichotomy_on_push_pop_example() {
        let (pds, aut) = push_pop_example();
        let cert = extract_pds_certificate(&pds, &aut).unwrap();
        for (q, a) in [("p", "A"), ("q", "B"), ("r", "A"), ("r", "B"), ("q", "A"), ("p", "B")] {
            let reach = decide_pushdown_reach(&pds, q, a, &aut).unwrap();
            let det = check_pds_certificate(&pds, &aut, q, a, &cert, CheckMode::Det).unwrap();
            let rand = check_pds_certificate(
                &pds,
                &aut,
                q,
                a,
                &cert,
                CheckMode::Rand { seed: 11, reps: 4 },
            )
            .unwrap();
            assert_eq!(det.is_accept(), !reach, "det dichotomy at ({q}, {a})");
            assert_eq!(rand.is_accept(), !reach, "rand dichotomy at ({q}, {a})");
        }
    }

    #[test]
    fn tampered_certificates_are_rejected() {
        let (pds, aut) = push_pop_example();
        let cert = extract_pds_certificate(&pds, &aut).unwrap();
        let consts = PdsMatrices::new(&pds, &aut);

        // Drop a transition of the original automaton from M^A.
        let mut dropped = cert.clone();
        let (i, j) = (consts.state_index("r").unwrap(), consts.state_index("f").unwrap());
        dropped.m.get_mut("A").unwrap().set(i, j, 0);
        let v = check_pds_certificate(&pds, &aut, "r", "B", &dropped, CheckMode::Det).unwrap();
        assert!(matches!(v, Verdict::Reject(PdsReject::NotLeq { .. })), "{v:?}");

        // Break a product equality.
        let mut broken = cert.clone();
        let key = ("A".to_string(), "B".to_string());
        let m = broken.mab.get_mut(&key).unwrap();
        m.set(0, 0, m.get(0, 0) + 1);
        let v = check_pds_certificate(&pds, &aut, "r", "B", &broken, CheckMode::Det).unwrap();
        assert!(matches!(v, Verdict::Reject(PdsReject::ProductMismatch { .. })), "{v:?}");
        let rejected = (0..200)
            .filter(|&seed| {
                !check_pds_certificate(
                    &pds,
                    &aut,
                    "r",
                    "B",
                    &broken,
                    CheckMode::Rand { seed, reps: 4 },
                )
                .unwrap()
                .is_accept()
            })
            .count();
        assert!(rejected >= 90, "probes caught only {rejected} of 200");

        // Force the queried entry to 1.
        let mut forced = cert.clone();
        let (qi, fi) = (consts.state_index("r").unwrap(), consts.state_index("f").unwrap());
        forced.m.get_mut("B").unwrap().set(qi, fi, 1);
        let v = check_pds_certificate(&pds, &aut, "r", "B", &forced, CheckMode::Det).unwrap();
        assert_eq!(v, Verdict::Reject(PdsReject::TargetEntry { final_state: "f".into() }));
    }

    #[test]
    fn emptiness_routes_agree_on_small_machines() {
        use crate::model::PdaTransition;
        let trans = |from: &str, pop: &str, to: &str, push: &[&str]| PdaTransition {
            from_state: from.into(),
            letter: "a".into(),
            pop: pop.into(),
            to_state: to.into(),
            push: push.iter().map(|s| s.to_string()).collect(),
            head: 0,
        };
        // Push-then-pop machine: nonempty.
        let pda = Pda::new(
            set(&["q0", "q1", "q2"]),
            set(&["a"]),
            set(&["A", "Z0"]),
            "q0".into(),
            "Z0".into(),
            set(&["q2"]),
            vec![trans("q0", "Z0", "q1", &["A", "Z0"]), trans("q1", "A", "q2", &[])],
        )
        .unwrap();
        assert!(pda_emptiness_via_prestar(&pda).unwrap());
        let result = pda_emptiness(&pda);
        assert!(!result.is_empty());
        match result {
            PdaEmptiness::Nonempty { ref image, ref certificate } => {
                assert!(crate::certyes::verify_walk_scheme(image, certificate).is_accept());
            }
            _ => unreachable!(),
        }

        // Final state never reached with bare bottom: empty.
        let pda = Pda::new(
            set(&["q0", "q1"]),
            set(&["a"]),
            set(&["A", "Z0"]),
            "q0".into(),
            "Z0".into(),
            set(&["q1"]),
            vec![trans("q0", "Z0", "q1", &["A", "Z0"])],
        )
        .unwrap();
        assert!(!pda_emptiness_via_prestar(&pda).unwrap());
        let result = pda_emptiness(&pda);
        assert!(result.is_empty());
        match result {
            PdaEmptiness::Empty { ref image, ref certificate } => {
                assert!(crate::certno::check_separator_det(image, certificate).is_accept());
            }
            _ => unreachable!(),
        }

        // q0 final, no transitions: accepts the empty word.
        let pda = Pda::new(
            set(&["q0"]),
            set(&["a"]),
            set(&["Z0"]),
            "q0".into(),
            "Z0".into(),
            set(&["q0"]),
            vec![],
        )
        .unwrap();
        assert!(pda_emptiness_via_prestar(&pda).unwrap());
        assert!(!pda_emptiness(&pda).is_empty());

        // No final states at all: empty.
        let pda = Pda::new(
            set(&["q0"]),
            set(&["a"]),
            set(&["Z0"]),
            "q0".into(),
            "Z0".into(),
            BTreeSet::new(),
            vec![],
        )
        .unwrap();
        assert!(!pda_emptiness_via_prestar(&pda).unwrap());
        assert!(pda_emptiness(&pda).is_empty());
    }
}
