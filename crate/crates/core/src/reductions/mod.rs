//! The reduction cycle: 2NPDA recognition -> PDA emptiness -> Dyck-2
//! reachability -> hardest-word encoding, plus the reduction from CFL
//! reachability over an arbitrary fixed language to Dyck-2 reachability.

mod hardest;

pub use hardest::{decode_hardest_word, dyck2_to_hardest_word, hardest_membership, EncodeError};

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{
    BracketLabel, Edge, Instance, LabeledGraph, Pda, PdaTransition, TwoNpda, LEFT_MARKER,
    RIGHT_MARKER,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("transition would move the head off the tape")]
    HeadEscape,
    #[error("word letter '{0}' is not in the machine's non-endmarker alphabet")]
    BadWordLetter(String),
}

// ---------------------------------------------------------------------------
// PDA normal form

fn is_normal(t: &PdaTransition) -> bool {
    match t.push.len() {
        0 => true,                      // pop
        1 => t.push[0] == t.pop,        // unchanged
        2 => t.push[1] == t.pop,        // push
        _ => false,
    }
}

struct Namer {
    taken: BTreeSet<String>,
    next: usize,
}

impl Namer {
    fn new(taken: &BTreeSet<String>) -> Self {
        Namer { taken: taken.clone(), next: 0 }
    }

    fn fresh(&mut self, prefix: &str) -> String {
        loop {
            let name = format!("{prefix}{}", self.next);
            self.next += 1;
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }
}

/// Rewrites every transition into a push (`gamma = Z' Z`), a pop
/// (`gamma = eps`), or an unchanged (`gamma = Z`), preserving the language.
/// Already-normal machines come back structurally equal.
///
/// A transition that does not keep the popped symbol at the bottom of its
/// push word is split into a pop followed by a chain of pushes; the first
/// push lands on an unknown stack top, so it fans out over the whole stack
/// alphabet.
pub fn pda_normalize(pda: &Pda) -> Pda {
    if pda.transitions.iter().all(is_normal) {
        return pda.clone();
    }
    let mut namer = Namer::new(&pda.states);
    let mut states = pda.states.clone();
    let mut out: Vec<PdaTransition> = Vec::new();
    let symbols: Vec<&String> = pda.stack_alphabet.iter().collect();
    for t in &pda.transitions {
        if is_normal(t) {
            out.push(t.clone());
            continue;
        }
        // Push the word bottom-up. When the word keeps the popped symbol at
        // the bottom the chain starts from the current (known) top;
        // otherwise the popped symbol is removed first and the first push
        // fans out over every possible top.
        let gamma = &t.push;
        let keeps_base = gamma.last() == Some(&t.pop);
        // Symbols still to push, bottom-most first, on top of a known top.
        let mut pending: Vec<&String>;
        let mut state;
        let mut top: String;
        if keeps_base {
            pending = gamma[..gamma.len() - 1].iter().rev().collect();
            state = t.from_state.clone();
            top = t.pop.clone();
        } else {
            // Pop, then push the bottom-most symbol onto any top.
            let after_pop = namer.fresh("n#");
            states.insert(after_pop.clone());
            out.push(PdaTransition {
                from_state: t.from_state.clone(),
                letter: t.letter.clone(),
                pop: t.pop.clone(),
                to_state: after_pop.clone(),
                push: vec![],
                head: 0,
            });
            let base = gamma.last().expect("empty push words are pops, which are normal");
            let rest_empty = gamma.len() == 1;
            let landed = if rest_empty { t.to_state.clone() } else { namer.fresh("n#") };
            states.insert(landed.clone());
            for w in &symbols {
                out.push(PdaTransition {
                    from_state: after_pop.clone(),
                    letter: t.letter.clone(),
                    pop: (*w).clone(),
                    to_state: landed.clone(),
                    push: vec![base.clone(), (*w).clone()],
                    head: if rest_empty { t.head } else { 0 },
                });
            }
            pending = gamma[..gamma.len() - 1].iter().rev().collect();
            state = landed;
            top = base.clone();
        }
        while let Some(sym) = pending.first().copied() {
            pending.remove(0);
            let last = pending.is_empty();
            let next_state = if last { t.to_state.clone() } else { namer.fresh("n#") };
            states.insert(next_state.clone());
            out.push(PdaTransition {
                from_state: state,
                letter: t.letter.clone(),
                pop: top.clone(),
                to_state: next_state.clone(),
                push: vec![sym.clone(), top.clone()],
                head: if last { t.head } else { 0 },
            });
            state = next_state;
            top = sym.clone();
        }
    }
    Pda::new(
        states,
        pda.input_alphabet.clone(),
        pda.stack_alphabet.clone(),
        pda.initial_state.clone(),
        pda.bottom.clone(),
        pda.finals.clone(),
        out,
    )
    .expect("normalization preserves machine well-formedness")
}

// ---------------------------------------------------------------------------
// Bracket encodings of stack alphabets

/// Binary bracket encoding of a stack alphabet: the i-th symbol in sorted
/// order maps to the length-`ell` word spelling i in binary with `o1` for 0
/// and `o2` for 1. `ell = max(1, ceil(log2 |Gamma|))`.
pub struct BracketCode {
    ell: usize,
    phi: BTreeMap<String, Vec<BracketLabel>>,
}

impl BracketCode {
    pub fn new(symbols: &BTreeSet<String>) -> Self {
        let count = symbols.len().max(1);
        let mut ell = 1;
        while (1usize << ell) < count {
            ell += 1;
        }
        let mut phi = BTreeMap::new();
        for (i, z) in symbols.iter().enumerate() {
            let word: Vec<BracketLabel> = (0..ell)
                .map(|bit| {
                    if (i >> (ell - 1 - bit)) & 1 == 0 {
                        BracketLabel::Open1
                    } else {
                        BracketLabel::Open2
                    }
                })
                .collect();
            phi.insert(z.clone(), word);
        }
        BracketCode { ell, phi }
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// Opening word for one symbol.
    pub fn phi(&self, z: &str) -> &[BracketLabel] {
        &self.phi[z]
    }

    /// Closing word: the opening word with brackets closed, reversed.
    pub fn psi(&self, z: &str) -> Vec<BracketLabel> {
        self.phi[z].iter().rev().map(|l| l.matching()).collect()
    }

    /// Opening word for a stack word written top-first: symbols are opened
    /// bottom-up, so the word is encoded in reverse.
    pub fn phi_word(&self, gamma: &[String]) -> Vec<BracketLabel> {
        gamma.iter().rev().flat_map(|z| self.phi(z).iter().copied()).collect()
    }
}

/// Allocates interior vertices for a deduplicated set of labelled paths and
/// emits their edges. Path endpoints must already be numbered.
struct PathBuilder {
    next_vertex: u32,
    edges: Vec<Edge>,
}

impl PathBuilder {
    fn new(first_free: u32) -> Self {
        PathBuilder { next_vertex: first_free, edges: Vec::new() }
    }

    fn add_path(&mut self, from: u32, to: u32, word: &[BracketLabel]) {
        assert!(!word.is_empty());
        let mut at = from;
        for (i, &label) in word.iter().enumerate() {
            let next = if i + 1 == word.len() {
                to
            } else {
                let v = self.next_vertex;
                self.next_vertex += 1;
                v
            };
            self.edges.push(Edge::new(at, next, label));
            at = next;
        }
    }
}

// ---------------------------------------------------------------------------
// CFL reachability -> Dyck-2 reachability

/// Product construction for `L`-reachability with the language given by a
/// (normalized) PDA. Push transitions become opening-word paths, pops become
/// closing-word paths, and unchanged transitions become balanced two-edge
/// detours standing in for unlabeled edges. Head-movement components of the
/// language PDA are ignored: every transition consumes one graph edge.
pub fn cfl_to_dyck2(graph: &LabeledGraph, lpda: &Pda) -> Instance {
    let lpda = pda_normalize(lpda);
    let code = BracketCode::new(&lpda.stack_alphabet);
    let states: Vec<&String> = lpda.states.iter().collect();
    let state_index: BTreeMap<&String, usize> =
        states.iter().enumerate().map(|(i, q)| (*q, i)).collect();
    let nv = graph.n() as usize;
    let nq = states.len();
    // Vertex layout: the |V| x |Q| product pairs, then path interiors, then
    // the fresh sink last.
    let pair_id = |v: u32, q: &String| -> u32 { (v - 1) * nq as u32 + state_index[q] as u32 + 1 };
    let first_interior = (nv * nq) as u32 + 1;

    // Deduplicated path requests keyed by endpoints and label word; distinct
    // transitions inducing the same path share it.
    let mut requests: BTreeSet<(u32, u32, Vec<BracketLabel>)> = BTreeSet::new();
    let detour = vec![BracketLabel::Open1, BracketLabel::Close1];
    for (u, v, letter) in graph.edges() {
        for t in &lpda.transitions {
            if t.letter != *letter {
                continue;
            }
            let from = pair_id(*u, &t.from_state);
            let to = pair_id(*v, &t.to_state);
            let word = match t.push.len() {
                0 => code.psi(&t.pop),
                1 => detour.clone(),
                _ => code.phi(&t.push[0]).to_vec(),
            };
            requests.insert((from, to, word));
        }
    }
    // Acceptance edges: unlabeled edges from (target, q in F) to the sink.
    let mut sink_requests: BTreeSet<u32> = BTreeSet::new();
    for f in &lpda.finals {
        sink_requests.insert(pair_id(graph.target(), f));
    }

    // Interior count is known only after walking the requests, so lay the
    // sink after a first pass.
    let interior_count: usize = requests.iter().map(|(_, _, w)| w.len() - 1).sum::<usize>()
        + sink_requests.len().saturating_mul(detour.len() - 1);
    let sink = first_interior + interior_count as u32;
    let n = sink;

    let mut builder = PathBuilder::new(first_interior);
    for (from, to, word) in &requests {
        builder.add_path(*from, *to, word);
    }
    for from in &sink_requests {
        builder.add_path(*from, sink, &detour);
    }
    debug_assert_eq!(builder.next_vertex, sink);
    let source = pair_id(graph.source(), &lpda.initial_state);
    Instance::new(n, source, sink, builder.edges).expect("product construction stays in range")
}

// ---------------------------------------------------------------------------
// PDA emptiness -> Dyck-2 reachability

/// Graph mimicking the transition diagram of a PDA: each transition becomes
/// a path closing the popped symbol's word and opening the words of the
/// pushed symbols, so valid walks correspond to runs between configurations
/// with stack exactly the bottom symbol. The instance is a yes-instance iff
/// the PDA's language is nonempty.
pub fn pda_to_dyck2(pda: &Pda) -> Instance {
    let pda = pda_normalize(pda);
    let code = BracketCode::new(&pda.stack_alphabet);
    let ell = code.ell();
    let states: Vec<&String> = pda.states.iter().collect();
    let state_index: BTreeMap<&String, usize> =
        states.iter().enumerate().map(|(i, q)| (*q, i)).collect();
    // Vertex layout: source, control states in sorted order, path interiors,
    // shared exit tail, target last.
    let source: u32 = 1;
    let control_id = |q: &String| -> u32 { state_index[q] as u32 + 2 };
    let first_interior = states.len() as u32 + 2;

    let mut requests: BTreeSet<(u32, u32, Vec<BracketLabel>)> = BTreeSet::new();
    for t in &pda.transitions {
        let mut word = code.psi(&t.pop);
        word.extend(code.phi_word(&t.push));
        requests.insert((control_id(&t.from_state), control_id(&t.to_state), word));
    }
    let entry_word = code.phi(&pda.bottom).to_vec();
    let exit_word = code.psi(&pda.bottom);

    let interior_count: usize = requests.iter().map(|(_, _, w)| w.len() - 1).sum::<usize>()
        + (ell - 1) // entry path
        + if pda.finals.is_empty() { 0 } else { ell - 1 }; // shared exit tail
    let target = first_interior + interior_count as u32;
    let n = target;

    let mut builder = PathBuilder::new(first_interior);
    builder.add_path(source, control_id(&pda.initial_state), &entry_word);
    for (from, to, word) in &requests {
        builder.add_path(*from, *to, word);
    }
    // Exit paths share their last ell - 1 edges: each final state takes one
    // private first edge onto the shared tail.
    if !pda.finals.is_empty() {
        let tail_head = if ell == 1 {
            target
        } else {
            let v = builder.next_vertex;
            builder.next_vertex += 1;
            v
        };
        for f in &pda.finals {
            builder.edges.push(Edge::new(control_id(f), tail_head, exit_word[0]));
        }
        if ell > 1 {
            builder.add_path(tail_head, target, &exit_word[1..]);
        }
    }
    debug_assert_eq!(builder.next_vertex, target);
    Instance::new(n, source, target, builder.edges).expect("reduction image stays in range")
}

// ---------------------------------------------------------------------------
// 2NPDA recognition -> PDA emptiness

fn product_state(pos: usize, state: &str) -> String {
    format!("h{pos}:{state}")
}

/// Product of a 2NPDA with a fixed input word: control states are
/// `(head position, machine state)` pairs, the stack is copied unchanged,
/// and the product reads no input of its own (a single dummy letter; only
/// the final acceptance step moves the head). Its language is nonempty iff
/// the machine accepts the word.
pub fn twonpda_word_to_pda(m: &TwoNpda, word: &[String]) -> Result<Pda, ReduceError> {
    for letter in word {
        if letter == LEFT_MARKER || letter == RIGHT_MARKER || !m.input_alphabet.contains(letter) {
            return Err(ReduceError::BadWordLetter(letter.clone()));
        }
    }
    // The type constructor rejects endmarker escapes, but machines can also
    // be built field-by-field; re-check before trusting head arithmetic.
    for t in &m.transitions {
        if (t.letter == LEFT_MARKER && t.head == -1) || (t.letter == RIGHT_MARKER && t.head == 1) {
            return Err(ReduceError::HeadEscape);
        }
    }
    let len = word.len();
    let letter_at = |pos: usize| -> &str {
        if pos == 0 {
            LEFT_MARKER
        } else if pos == len + 1 {
            RIGHT_MARKER
        } else {
            &word[pos - 1]
        }
    };
    let dummy = "_".to_string();
    let mut states = BTreeSet::new();
    for pos in 0..=len + 1 {
        for q in &m.states {
            states.insert(product_state(pos, q));
        }
    }
    let accept = "acc".to_string();
    states.insert(accept.clone());
    let mut transitions = Vec::new();
    for t in &m.transitions {
        for pos in 0..=len + 1 {
            if letter_at(pos) != t.letter {
                continue;
            }
            let next = pos as isize + t.head as isize;
            if next < 0 || next > len as isize + 1 {
                continue;
            }
            transitions.push(PdaTransition {
                from_state: product_state(pos, &t.from_state),
                letter: dummy.clone(),
                pop: t.pop.clone(),
                to_state: product_state(next as usize, &t.to_state),
                push: t.push.clone(),
                head: 0,
            });
        }
    }
    // Acceptance: a final machine state scanning the right endmarker with
    // stack exactly the bottom symbol steps into the accepting sink.
    for f in &m.finals {
        transitions.push(PdaTransition {
            from_state: product_state(len + 1, f),
            letter: dummy.clone(),
            pop: m.bottom.clone(),
            to_state: accept.clone(),
            push: vec![m.bottom.clone()],
            head: 1,
        });
    }
    let input: BTreeSet<String> = [dummy].into_iter().collect();
    Pda::new(
        states,
        input,
        m.stack_alphabet.clone(),
        product_state(0, &m.initial_state),
        m.bottom.clone(),
        [accept].into_iter().collect(),
        transitions,
    )
    .map_err(|_| ReduceError::HeadEscape)
}

/// The full reduction cycle: word recognition through PDA emptiness and
/// Dyck-2 reachability.
pub fn twonpda_recognize(m: &TwoNpda, word: &[String]) -> Result<bool, ReduceError> {
    let pda = twonpda_word_to_pda(m, word)?;
    let image = pda_to_dyck2(&pda);
    Ok(crate::solver::decide(&image))
}
