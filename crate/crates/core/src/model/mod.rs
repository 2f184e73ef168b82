//! Shared data types and bit-exact text formats for every object exchanged
//! between modules and the CLI.
//!
//! All values are immutable after construction and all operations here are
//! pure functions, so everything is safe to share across threads.

mod matrix;
mod text;

pub use matrix::{NatMatrix, MAX_DIM};
pub use text::{parse_document, serialize_document, Document, Format};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// Error raised when a parsed or constructed value violates a type invariant.
/// `line` is 1-based when the error comes from a text document and 0 when the
/// value was built programmatically.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct FormatError {
    pub line: usize,
    pub reason: String,
}

impl FormatError {
    pub fn new(line: usize, reason: impl Into<String>) -> Self {
        FormatError { line, reason: reason.into() }
    }

    pub fn value(reason: impl Into<String>) -> Self {
        FormatError { line: 0, reason: reason.into() }
    }

    pub(crate) fn at_line(mut self, line: usize) -> Self {
        if self.line == 0 {
            self.line = line;
        }
        self
    }
}

/// One of the four bracket symbols labelling instance edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BracketLabel {
    Open1,
    Close1,
    Open2,
    Close2,
}

impl BracketLabel {
    pub const ALL: [BracketLabel; 4] =
        [BracketLabel::Open1, BracketLabel::Close1, BracketLabel::Open2, BracketLabel::Close2];

    /// The unique label forming a matching pair with `self`.
    pub fn matching(self) -> BracketLabel {
        match self {
            BracketLabel::Open1 => BracketLabel::Close1,
            BracketLabel::Close1 => BracketLabel::Open1,
            BracketLabel::Open2 => BracketLabel::Close2,
            BracketLabel::Close2 => BracketLabel::Open2,
        }
    }

    pub fn is_open(self) -> bool {
        matches!(self, BracketLabel::Open1 | BracketLabel::Open2)
    }

    pub fn token(self) -> &'static str {
        match self {
            BracketLabel::Open1 => "o1",
            BracketLabel::Close1 => "c1",
            BracketLabel::Open2 => "o2",
            BracketLabel::Close2 => "c2",
        }
    }

    pub fn from_token(tok: &str) -> Option<BracketLabel> {
        match tok {
            "o1" => Some(BracketLabel::Open1),
            "c1" => Some(BracketLabel::Close1),
            "o2" => Some(BracketLabel::Open2),
            "c2" => Some(BracketLabel::Close2),
            _ => None,
        }
    }
}

impl fmt::Display for BracketLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// A labelled edge of an instance graph. Vertices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: u32,
    pub to: u32,
    pub label: BracketLabel,
}

impl Edge {
    pub fn new(from: u32, to: u32, label: BracketLabel) -> Self {
        Edge { from, to, label }
    }
}

/// A Dyck-2 reachability instance: a directed multigraph over the bracket
/// alphabet with a source and a target vertex. Vertices are `1..=n`; parallel
/// edges with identical `(from, to, label)` are collapsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n: u32,
    source: u32,
    target: u32,
    edges: Vec<Edge>, // sorted, deduplicated
}

impl Instance {
    pub fn new(
        n: u32,
        source: u32,
        target: u32,
        mut edges: Vec<Edge>,
    ) -> Result<Self, FormatError> {
        if n == 0 {
            return Err(FormatError::value("vertex count must be at least 1"));
        }
        if source == 0 || source > n {
            return Err(FormatError::value(format!("out-of-range vertex {source} (source)")));
        }
        if target == 0 || target > n {
            return Err(FormatError::value(format!("out-of-range vertex {target} (target)")));
        }
        for e in &edges {
            if e.from == 0 || e.from > n || e.to == 0 || e.to > n {
                return Err(FormatError::value(format!(
                    "out-of-range vertex in edge ({}, {}, {})",
                    e.from, e.to, e.label
                )));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Instance { n, source, target, edges })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn source(&self) -> u32 {
        self.source
    }

    pub fn target(&self) -> u32 {
        self.target
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_edge(&self, from: u32, to: u32, label: BracketLabel) -> bool {
        self.edges.binary_search(&Edge { from, to, label }).is_ok()
    }
}

/// A walk through an instance graph. Steps record only the arrival vertex and
/// the edge label, so consecutive steps chain by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    pub start: u32,
    pub steps: Vec<(u32, BracketLabel)>,
}

impl Walk {
    pub fn empty(at: u32) -> Self {
        Walk { start: at, steps: Vec::new() }
    }

    pub fn end(&self) -> u32 {
        self.steps.last().map_or(self.start, |&(v, _)| v)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn label_word(&self) -> Vec<BracketLabel> {
        self.steps.iter().map(|&(_, l)| l).collect()
    }

    /// True when every step of the walk traverses an edge of the instance.
    pub fn respects(&self, instance: &Instance) -> bool {
        let mut at = self.start;
        for &(to, label) in &self.steps {
            if !instance.has_edge(at, to, label) {
                return false;
            }
            at = to;
        }
        true
    }
}

/// Right-hand side of the unique production of a walk-scheme nonterminal
/// `<u, v>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Production {
    /// `<u,v> -> <u,w> <w,v>`.
    Concat(u32),
    /// `<u,v> -> e <x,y> f` where `e = (u, x, open)` and
    /// `f = (y, v, matching(open))`; only `x`, `y` and the opening label are
    /// stored, the two edges are reconstructed from them.
    Wrap { x: u32, y: u32, open: BracketLabel },
    /// `<u,u> -> eps`.
    Eps,
}

/// A straight-line grammar over vertex pairs certifying a yes-instance.
/// Holds exactly one production per nonterminal, the axiom is present, `Eps`
/// appears only on diagonal pairs, and the production dependency graph is
/// acyclic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkScheme {
    axiom: (u32, u32),
    productions: BTreeMap<(u32, u32), Production>,
}

impl WalkScheme {
    pub fn new(
        axiom: (u32, u32),
        productions: BTreeMap<(u32, u32), Production>,
    ) -> Result<Self, FormatError> {
        if !productions.contains_key(&axiom) {
            return Err(FormatError::value(format!(
                "axiom <{}, {}> has no production",
                axiom.0, axiom.1
            )));
        }
        for (&(u, v), &p) in &productions {
            if u == 0 || v == 0 {
                return Err(FormatError::value("out-of-range vertex 0 in nonterminal"));
            }
            if matches!(p, Production::Eps) && u != v {
                return Err(FormatError::value(format!(
                    "eps production on off-diagonal pair <{u}, {v}>"
                )));
            }
        }
        let ws = WalkScheme { axiom, productions };
        if let Some((u, v)) = ws.find_cycle() {
            return Err(FormatError::value(format!("dependency cycle at <{u}, {v}>")));
        }
        Ok(ws)
    }

    /// Builds a scheme without checking any invariant. Certificate checkers
    /// re-check every condition from scratch, so tests use this to hand them
    /// adversarial data.
    pub fn new_unchecked(
        axiom: (u32, u32),
        productions: BTreeMap<(u32, u32), Production>,
    ) -> Self {
        WalkScheme { axiom, productions }
    }

    pub fn axiom(&self) -> (u32, u32) {
        self.axiom
    }

    pub fn productions(&self) -> &BTreeMap<(u32, u32), Production> {
        &self.productions
    }

    pub fn production(&self, nt: (u32, u32)) -> Option<Production> {
        self.productions.get(&nt).copied()
    }

    /// Nonterminals referenced by the production of `nt`, in left-to-right
    /// order of the right-hand side.
    pub fn references(nt: (u32, u32), p: Production) -> Vec<(u32, u32)> {
        let (u, v) = nt;
        match p {
            Production::Concat(w) => vec![(u, w), (w, v)],
            Production::Wrap { x, y, .. } => vec![(x, y)],
            Production::Eps => vec![],
        }
    }

    /// Looks for a cycle in the dependency graph of Eq.-style references.
    /// Returns a nonterminal on a cycle, or `None` when the graph is acyclic.
    /// Missing references are ignored here; the walk-scheme verifier reports
    /// them separately.
    fn find_cycle(&self) -> Option<(u32, u32)> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            White,
            Grey,
            Black,
        }
        let mut marks: BTreeMap<(u32, u32), Mark> =
            self.productions.keys().map(|&k| (k, Mark::White)).collect();
        for &start in self.productions.keys() {
            if marks[&start] != Mark::White {
                continue;
            }
            // Iterative DFS; schemes can be deep.
            let mut stack = vec![(start, 0usize)];
            while let Some(&mut (nt, ref mut next)) = stack.last_mut() {
                if *next == 0 {
                    marks.insert(nt, Mark::Grey);
                }
                let refs = Self::references(nt, self.productions[&nt]);
                if *next < refs.len() {
                    let child = refs[*next];
                    *next += 1;
                    match marks.get(&child) {
                        Some(Mark::Grey) => return Some(child),
                        Some(Mark::White) => stack.push((child, 0)),
                        _ => {}
                    }
                } else {
                    marks.insert(nt, Mark::Black);
                    stack.pop();
                }
            }
        }
        None
    }
}

/// Six matrices over `{0, ..., n^2}` certifying a no-instance; `m_s` is 0-1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatorBundle {
    pub m_s: NatMatrix,
    pub m_ss: NatMatrix,
    pub m_o1s: NatMatrix,
    pub m_o2s: NatMatrix,
    pub m_o1sc1: NatMatrix,
    pub m_o2sc2: NatMatrix,
}

impl SeparatorBundle {
    /// The six matrices paired with their format block names, in file order.
    pub fn blocks(&self) -> [(&'static str, &NatMatrix); 6] {
        [
            ("MS", &self.m_s),
            ("MSS", &self.m_ss),
            ("Mo1S", &self.m_o1s),
            ("Mo2S", &self.m_o2s),
            ("Mo1Sc1", &self.m_o1sc1),
            ("Mo2Sc2", &self.m_o2sc2),
        ]
    }

    pub fn validate(&self) -> Result<(), FormatError> {
        let n = self.m_s.dim();
        let bound = (n as u64) * (n as u64);
        if !self.m_s.is_boolean() {
            return Err(FormatError::value("matrix MS has an entry outside {0, 1}"));
        }
        for (name, m) in self.blocks() {
            if m.dim() != n {
                return Err(FormatError::value(format!("matrix {name} has mismatched dimension")));
            }
            if m.max_entry() > bound {
                return Err(FormatError::value(format!("matrix {name}: entry exceeds n^2")));
            }
        }
        Ok(())
    }
}

/// Contents of a `.sep` file: either a full six-matrix bundle or just the
/// `MS` block, to be completed by the checker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeparatorDoc {
    Full(SeparatorBundle),
    MsOnly(NatMatrix),
}

/// Stack symbols appear inside compound tokens of the pda and certificate
/// formats, so a few characters are reserved.
pub(crate) fn check_stack_symbol(name: &str) -> Result<(), FormatError> {
    if name == "_" || name.contains('.') || name.contains(':') {
        return Err(FormatError::value(format!(
            "stack symbol name '{name}' is reserved or contains '.' or ':'"
        )));
    }
    Ok(())
}

/// A pushdown rule `(p, A) -> (q, w)` with `|w| <= 2`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PdsRule {
    pub from_state: String,
    pub pop: String,
    pub to_state: String,
    pub push: Vec<String>,
}

/// A pushdown system: control states, stack alphabet, and rules rewriting the
/// top of the stack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushdownSystem {
    states: BTreeSet<String>,
    stack_alphabet: BTreeSet<String>,
    rules: Vec<PdsRule>, // sorted, deduplicated
}

impl PushdownSystem {
    pub fn new(
        states: BTreeSet<String>,
        stack_alphabet: BTreeSet<String>,
        mut rules: Vec<PdsRule>,
    ) -> Result<Self, FormatError> {
        for s in &stack_alphabet {
            check_stack_symbol(s)?;
        }
        for r in &rules {
            if !states.contains(&r.from_state) || !states.contains(&r.to_state) {
                return Err(FormatError::value(format!(
                    "rule endpoint '{}' or '{}' not a declared state",
                    r.from_state, r.to_state
                )));
            }
            if !stack_alphabet.contains(&r.pop) {
                return Err(FormatError::value(format!(
                    "rule pops undeclared stack symbol '{}'",
                    r.pop
                )));
            }
            if r.push.len() > 2 {
                return Err(FormatError::value("rule pushes a word longer than 2"));
            }
            for s in &r.push {
                if !stack_alphabet.contains(s) {
                    return Err(FormatError::value(format!(
                        "rule pushes undeclared stack symbol '{s}'"
                    )));
                }
            }
        }
        rules.sort();
        rules.dedup();
        Ok(PushdownSystem { states, stack_alphabet, rules })
    }

    pub fn states(&self) -> &BTreeSet<String> {
        &self.states
    }

    pub fn stack_alphabet(&self) -> &BTreeSet<String> {
        &self.stack_alphabet
    }

    pub fn rules(&self) -> &[PdsRule] {
        &self.rules
    }
}

/// An NFA over stack symbols accepting regular sets of pushdown
/// configurations. Its state set extends the control states of the paired
/// pushdown system; final states must stay disjoint from them, which is
/// checked when the pair is brought together.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAutomaton {
    states: BTreeSet<String>,
    transitions: BTreeSet<(String, String, String)>,
    finals: BTreeSet<String>,
}

impl PAutomaton {
    pub fn new(
        states: BTreeSet<String>,
        transitions: BTreeSet<(String, String, String)>,
        finals: BTreeSet<String>,
    ) -> Result<Self, FormatError> {
        for f in &finals {
            if !states.contains(f) {
                return Err(FormatError::value(format!("final state '{f}' not declared")));
            }
        }
        for (from, _, to) in &transitions {
            if !states.contains(from) || !states.contains(to) {
                return Err(FormatError::value(format!(
                    "transition endpoint '{from}' or '{to}' not a declared state"
                )));
            }
        }
        Ok(PAutomaton { states, transitions, finals })
    }

    pub fn states(&self) -> &BTreeSet<String> {
        &self.states
    }

    pub fn transitions(&self) -> &BTreeSet<(String, String, String)> {
        &self.transitions
    }

    pub fn finals(&self) -> &BTreeSet<String> {
        &self.finals
    }

    /// Accepts configuration `(from, word)`: some walk labelled by `word`
    /// runs from `from` to a final state.
    pub fn accepts(&self, from: &str, word: &[String]) -> bool {
        let mut current: BTreeSet<&str> = BTreeSet::new();
        if self.states.contains(from) {
            current.insert(from);
        }
        for symbol in word {
            let mut next = BTreeSet::new();
            for (f, l, t) in &self.transitions {
                if l == symbol && current.contains(f.as_str()) {
                    next.insert(t.as_str());
                }
            }
            current = next;
        }
        current.iter().any(|s| self.finals.contains(*s))
    }

    /// Format-level pairing rule: the automaton must cover the control
    /// states of the pushdown system, and no final state may be a control
    /// state.
    pub fn check_against(&self, pds: &PushdownSystem) -> Result<(), FormatError> {
        for q in pds.states() {
            if !self.states.contains(q) {
                return Err(FormatError::value(format!(
                    "automaton states do not contain control state '{q}'"
                )));
            }
        }
        if let Some(f) = self.finals.iter().find(|f| pds.states().contains(*f)) {
            return Err(FormatError::value(format!("non-disjoint F: final state '{f}'")));
        }
        for (_, label, _) in &self.transitions {
            if !pds.stack_alphabet().contains(label) {
                return Err(FormatError::value(format!(
                    "automaton transition over undeclared stack symbol '{label}'"
                )));
            }
        }
        Ok(())
    }
}

/// Head movement of an input-reading automaton transition.
pub type HeadMove = i8;

/// A transition `(q, a, Z) -> (q', gamma, d)` shared by the PDA and 2NPDA
/// types; `d` ranges over `{0, +1}` for PDAs and `{-1, 0, +1}` for 2NPDAs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PdaTransition {
    pub from_state: String,
    pub letter: String,
    pub pop: String,
    pub to_state: String,
    pub push: Vec<String>,
    pub head: HeadMove,
}

/// Left input endmarker token.
pub const LEFT_MARKER: &str = "<";
/// Right input endmarker token.
pub const RIGHT_MARKER: &str = ">";

fn check_machine_common(
    states: &BTreeSet<String>,
    input_alphabet: &BTreeSet<String>,
    stack_alphabet: &BTreeSet<String>,
    initial_state: &str,
    bottom: &str,
    finals: &BTreeSet<String>,
    transitions: &[PdaTransition],
    allowed_moves: &[HeadMove],
) -> Result<(), FormatError> {
    if !states.contains(initial_state) {
        return Err(FormatError::value(format!("initial state '{initial_state}' not declared")));
    }
    for s in stack_alphabet {
        check_stack_symbol(s)?;
    }
    if !stack_alphabet.contains(bottom) {
        return Err(FormatError::value(format!("bottom symbol '{bottom}' not declared")));
    }
    for f in finals {
        if !states.contains(f) {
            return Err(FormatError::value(format!("final state '{f}' not declared")));
        }
    }
    for t in transitions {
        if !states.contains(&t.from_state) || !states.contains(&t.to_state) {
            return Err(FormatError::value(format!(
                "transition endpoint '{}' or '{}' not a declared state",
                t.from_state, t.to_state
            )));
        }
        if !input_alphabet.contains(&t.letter) {
            return Err(FormatError::value(format!("undeclared input letter '{}'", t.letter)));
        }
        if !stack_alphabet.contains(&t.pop) {
            return Err(FormatError::value(format!("undeclared stack symbol '{}'", t.pop)));
        }
        for s in &t.push {
            if !stack_alphabet.contains(s) {
                return Err(FormatError::value(format!("undeclared stack symbol '{s}'")));
            }
        }
        if !allowed_moves.contains(&t.head) {
            return Err(FormatError::value(format!("head move {} not allowed", t.head)));
        }
        // Bottom-of-stack discipline: transitions reading the bottom symbol
        // keep it at the bottom, and it never appears anywhere else.
        let on_bottom = t.pop == bottom;
        if on_bottom {
            if t.push.last().map(String::as_str) != Some(bottom) {
                return Err(FormatError::value(format!(
                    "transition replaces bottom symbol '{bottom}'"
                )));
            }
            if t.push[..t.push.len() - 1].iter().any(|s| s == bottom) {
                return Err(FormatError::value(format!(
                    "transition pushes bottom symbol '{bottom}' above itself"
                )));
            }
        } else if t.push.iter().any(|s| s == bottom) {
            return Err(FormatError::value(format!(
                "transition pushes bottom symbol '{bottom}' above itself"
            )));
        }
    }
    Ok(())
}

/// A one-way nondeterministic pushdown automaton. The input alphabet carries
/// no endmarkers and the head moves right or stays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pda {
    pub states: BTreeSet<String>,
    pub input_alphabet: BTreeSet<String>,
    pub stack_alphabet: BTreeSet<String>,
    pub initial_state: String,
    pub bottom: String,
    pub finals: BTreeSet<String>,
    pub transitions: Vec<PdaTransition>, // sorted, deduplicated
}

impl Pda {
    pub fn new(
        states: BTreeSet<String>,
        input_alphabet: BTreeSet<String>,
        stack_alphabet: BTreeSet<String>,
        initial_state: String,
        bottom: String,
        finals: BTreeSet<String>,
        mut transitions: Vec<PdaTransition>,
    ) -> Result<Self, FormatError> {
        check_machine_common(
            &states,
            &input_alphabet,
            &stack_alphabet,
            &initial_state,
            &bottom,
            &finals,
            &transitions,
            &[0, 1],
        )?;
        transitions.sort();
        transitions.dedup();
        Ok(Pda { states, input_alphabet, stack_alphabet, initial_state, bottom, finals, transitions })
    }
}

/// A two-way nondeterministic pushdown automaton. The input alphabet contains
/// the endmarkers and transitions may move the head in either direction, but
/// never off the tape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoNpda {
    pub states: BTreeSet<String>,
    pub input_alphabet: BTreeSet<String>,
    pub stack_alphabet: BTreeSet<String>,
    pub initial_state: String,
    pub bottom: String,
    pub finals: BTreeSet<String>,
    pub transitions: Vec<PdaTransition>, // sorted, deduplicated
}

impl TwoNpda {
    pub fn new(
        states: BTreeSet<String>,
        input_alphabet: BTreeSet<String>,
        stack_alphabet: BTreeSet<String>,
        initial_state: String,
        bottom: String,
        finals: BTreeSet<String>,
        mut transitions: Vec<PdaTransition>,
    ) -> Result<Self, FormatError> {
        if !input_alphabet.contains(LEFT_MARKER) || !input_alphabet.contains(RIGHT_MARKER) {
            return Err(FormatError::value(format!(
                "input alphabet must contain the endmarkers '{LEFT_MARKER}' and '{RIGHT_MARKER}'"
            )));
        }
        check_machine_common(
            &states,
            &input_alphabet,
            &stack_alphabet,
            &initial_state,
            &bottom,
            &finals,
            &transitions,
            &[-1, 0, 1],
        )?;
        for t in &transitions {
            if t.letter == LEFT_MARKER && t.head == -1 {
                return Err(FormatError::value("transition moves the head left of the left endmarker"));
            }
            if t.letter == RIGHT_MARKER && t.head == 1 {
                return Err(FormatError::value("transition moves the head right of the right endmarker"));
            }
        }
        transitions.sort();
        transitions.dedup();
        Ok(TwoNpda { states, input_alphabet, stack_alphabet, initial_state, bottom, finals, transitions })
    }
}

/// A directed graph over an arbitrary letter alphabet, the input side of the
/// CFL-reachability reduction. Shaped like `Instance` but with free-form edge
/// labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    n: u32,
    source: u32,
    target: u32,
    edges: Vec<(u32, u32, String)>, // sorted, deduplicated
}

impl LabeledGraph {
    pub fn new(
        n: u32,
        source: u32,
        target: u32,
        mut edges: Vec<(u32, u32, String)>,
    ) -> Result<Self, FormatError> {
        if n == 0 {
            return Err(FormatError::value("vertex count must be at least 1"));
        }
        for &v in &[source, target] {
            if v == 0 || v > n {
                return Err(FormatError::value(format!("out-of-range vertex {v}")));
            }
        }
        for (u, v, _) in &edges {
            if *u == 0 || *u > n || *v == 0 || *v > n {
                return Err(FormatError::value(format!("out-of-range vertex in edge ({u}, {v})")));
            }
        }
        edges.sort();
        edges.dedup();
        Ok(LabeledGraph { n, source, target, edges })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn source(&self) -> u32 {
        self.source
    }

    pub fn target(&self) -> u32 {
        self.target
    }

    pub fn edges(&self) -> &[(u32, u32, String)] {
        &self.edges
    }
}

/// Matrix family certifying pushdown non-reachability. For every stack
/// symbol `A` there is a 0-1 matrix `M^A`, and for every pair and triple of
/// symbols the auxiliary product matrices `M^{A,B}`, `M1^{A,B,C}`,
/// `M2^{A,B,C}`. All matrices are `|S| x |S|` where `S` is the state set of
/// the paired P-automaton; entries are bounded by `|S|^2` at the format
/// level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdsCertificate {
    /// `|S|`, the dimension of every matrix.
    pub dim: usize,
    /// Stack alphabet in sorted order.
    pub symbols: Vec<String>,
    pub m: BTreeMap<String, NatMatrix>,
    pub mab: BTreeMap<(String, String), NatMatrix>,
    pub m1: BTreeMap<(String, String, String), NatMatrix>,
    pub m2: BTreeMap<(String, String, String), NatMatrix>,
}

impl PdsCertificate {
    /// Total number of stored matrix entries.
    pub fn entry_count(&self) -> usize {
        (self.m.len() + self.mab.len() + self.m1.len() + self.m2.len()) * self.dim * self.dim
    }
}

/// Token of the hardest-language alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum HwToken {
    Bracket(BracketLabel),
    VertexMarker,
    One,
    Minus,
    EdgeSep,
}

impl HwToken {
    pub fn token(self) -> &'static str {
        match self {
            HwToken::Bracket(b) => b.token(),
            HwToken::VertexMarker => "V",
            HwToken::One => "1",
            HwToken::Minus => "-",
            HwToken::EdgeSep => "E",
        }
    }

    pub fn from_token(tok: &str) -> Option<HwToken> {
        match tok {
            "V" => Some(HwToken::VertexMarker),
            "1" => Some(HwToken::One),
            "-" => Some(HwToken::Minus),
            "E" => Some(HwToken::EdgeSep),
            _ => BracketLabel::from_token(tok).map(HwToken::Bracket),
        }
    }
}

/// One `label offset` entry of a hardest-word block. The offset is the signed
/// count of unit steps from the block's vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HwEntry {
    pub label: BracketLabel,
    pub offset: i64,
}

/// A word over the hardest-language alphabet matching the block shape:
/// it starts with the vertex marker, blocks are marker-separated, and each
/// block is a (possibly empty) edge-separated list of `label offset` entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardestWord {
    tokens: Vec<HwToken>,
    blocks: Vec<Vec<HwEntry>>,
}

impl HardestWord {
    /// Validates the Eq.-(5) shape of a raw token stream.
    pub fn from_tokens(tokens: Vec<HwToken>) -> Result<Self, FormatError> {
        let blocks = Self::parse_blocks(&tokens)?;
        Ok(HardestWord { tokens, blocks })
    }

    fn parse_blocks(tokens: &[HwToken]) -> Result<Vec<Vec<HwEntry>>, FormatError> {
        let err = |pos: usize, what: &str| {
            FormatError::value(format!("malformed shape at token {}: {what}", pos + 1))
        };
        if tokens.is_empty() {
            return Err(FormatError::value("malformed shape: empty token stream"));
        }
        if tokens[0] != HwToken::VertexMarker {
            return Err(err(0, "word must start with the vertex marker"));
        }
        let mut blocks: Vec<Vec<HwEntry>> = Vec::new();
        let mut pos = 0;
        while pos < tokens.len() {
            debug_assert_eq!(tokens[pos], HwToken::VertexMarker);
            pos += 1;
            let mut entries: Vec<HwEntry> = Vec::new();
            // A block is empty when the next token starts another block or
            // the stream ends.
            while pos < tokens.len() && tokens[pos] != HwToken::VertexMarker {
                if !entries.is_empty() {
                    if tokens[pos] != HwToken::EdgeSep {
                        return Err(err(pos, "expected edge separator between entries"));
                    }
                    pos += 1;
                }
                let label = match tokens.get(pos) {
                    Some(&HwToken::Bracket(b)) => b,
                    _ => return Err(err(pos, "expected bracket token starting an entry")),
                };
                pos += 1;
                let negative = if tokens.get(pos) == Some(&HwToken::Minus) {
                    pos += 1;
                    true
                } else {
                    false
                };
                let mut ones: i64 = 0;
                while tokens.get(pos) == Some(&HwToken::One) {
                    ones += 1;
                    pos += 1;
                }
                if negative && ones == 0 {
                    return Err(err(pos, "minus sign must be followed by a unary run"));
                }
                entries.push(HwEntry { label, offset: if negative { -ones } else { ones } });
            }
            blocks.push(entries);
        }
        Ok(blocks)
    }

    pub fn tokens(&self) -> &[HwToken] {
        &self.tokens
    }

    pub fn blocks(&self) -> &[Vec<HwEntry>] {
        &self.blocks
    }

    /// Rebuilds the canonical token stream for a block structure.
    pub fn from_blocks(blocks: Vec<Vec<HwEntry>>) -> Self {
        let mut tokens = Vec::new();
        for entries in &blocks {
            tokens.push(HwToken::VertexMarker);
            for (i, e) in entries.iter().enumerate() {
                if i > 0 {
                    tokens.push(HwToken::EdgeSep);
                }
                tokens.push(HwToken::Bracket(e.label));
                if e.offset < 0 {
                    tokens.push(HwToken::Minus);
                }
                for _ in 0..e.offset.abs() {
                    tokens.push(HwToken::One);
                }
            }
        }
        HardestWord { tokens, blocks }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_matching_pairs() {
        assert_eq!(BracketLabel::Open1.matching(), BracketLabel::Close1);
        assert_eq!(BracketLabel::Open2.matching(), BracketLabel::Close2);
        assert_eq!(BracketLabel::Close1.matching(), BracketLabel::Open1);
        for l in BracketLabel::ALL {
            assert_eq!(l.matching().matching(), l);
            assert_ne!(l.matching(), l);
        }
    }

    #[test]
    fn instance_rejects_out_of_range() {
        assert!(Instance::new(2, 3, 1, vec![]).is_err());
        assert!(Instance::new(2, 1, 1, vec![Edge::new(1, 3, BracketLabel::Open1)]).is_err());
        assert!(Instance::new(0, 1, 1, vec![]).is_err());
    }

    #[test]
    fn instance_collapses_parallel_edges() {
        let e = Edge::new(1, 2, BracketLabel::Open1);
        let i = Instance::new(2, 1, 2, vec![e, e, e]).unwrap();
        assert_eq!(i.edges().len(), 1);
    }

    #[test]
    fn walk_scheme_rejects_off_diagonal_eps() {
        let mut prods = BTreeMap::new();
        prods.insert((1, 2), Production::Eps);
        assert!(WalkScheme::new((1, 2), prods).is_err());
    }

    #[test]
    fn walk_scheme_rejects_self_cycle() {
        let mut prods = BTreeMap::new();
        prods.insert((1, 1), Production::Concat(1));
        let err = WalkScheme::new((1, 1), prods).unwrap_err();
        assert!(err.reason.contains("dependency cycle"));
    }

    #[test]
    fn walk_scheme_requires_axiom() {
        let mut prods = BTreeMap::new();
        prods.insert((1, 1), Production::Eps);
        assert!(WalkScheme::new((2, 2), prods).is_err());
    }

    #[test]
    fn hardest_word_shapes() {
        use HwToken::*;
        // "V o1 1 V c1 - 1" is the two-vertex cycle word.
        let toks = vec![
            VertexMarker,
            Bracket(BracketLabel::Open1),
            One,
            VertexMarker,
            Bracket(BracketLabel::Close1),
            Minus,
            One,
        ];
        let w = HardestWord::from_tokens(toks).unwrap();
        assert_eq!(w.blocks().len(), 2);
        assert_eq!(w.blocks()[0], vec![HwEntry { label: BracketLabel::Open1, offset: 1 }]);
        assert_eq!(w.blocks()[1], vec![HwEntry { label: BracketLabel::Close1, offset: -1 }]);

        // Single marker: one empty block.
        let w = HardestWord::from_tokens(vec![VertexMarker]).unwrap();
        assert_eq!(w.blocks(), &[vec![]]);

        // Must start with the marker.
        assert!(HardestWord::from_tokens(vec![One]).is_err());
        // Bare minus is malformed.
        assert!(HardestWord::from_tokens(vec![
            VertexMarker,
            Bracket(BracketLabel::Open1),
            Minus
        ])
        .is_err());
        // Entries need a separator.
        assert!(HardestWord::from_tokens(vec![
            VertexMarker,
            Bracket(BracketLabel::Open1),
            Bracket(BracketLabel::Open2),
        ])
        .is_err());
    }

    #[test]
    fn pda_bottom_discipline() {
        let states: BTreeSet<_> = ["q"].iter().map(|s| s.to_string()).collect();
        let input: BTreeSet<_> = ["a"].iter().map(|s| s.to_string()).collect();
        let stack: BTreeSet<_> = ["Z0", "A"].iter().map(|s| s.to_string()).collect();
        let t = |push: &[&str], pop: &str| PdaTransition {
            from_state: "q".into(),
            letter: "a".into(),
            pop: pop.into(),
            to_state: "q".into(),
            push: push.iter().map(|s| s.to_string()).collect(),
            head: 0,
        };
        // Replacing the bottom is rejected.
        assert!(Pda::new(
            states.clone(),
            input.clone(),
            stack.clone(),
            "q".into(),
            "Z0".into(),
            BTreeSet::new(),
            vec![t(&["A"], "Z0")],
        )
        .is_err());
        // Pushing the bottom above itself is rejected.
        assert!(Pda::new(
            states.clone(),
            input.clone(),
            stack.clone(),
            "q".into(),
            "Z0".into(),
            BTreeSet::new(),
            vec![t(&["Z0", "A"], "A")],
        )
        .is_err());
        // A well-formed push on the bottom is fine.
        assert!(Pda::new(
            states,
            input,
            stack,
            "q".into(),
            "Z0".into(),
            BTreeSet::new(),
            vec![t(&["A", "Z0"], "Z0")],
        )
        .is_ok());
    }

    #[test]
    fn two_npda_endmarker_moves() {
        let states: BTreeSet<_> = ["q"].iter().map(|s| s.to_string()).collect();
        let input: BTreeSet<_> = ["a", "<", ">"].iter().map(|s| s.to_string()).collect();
        let stack: BTreeSet<_> = ["Z0"].iter().map(|s| s.to_string()).collect();
        let t = |letter: &str, head: i8| PdaTransition {
            from_state: "q".into(),
            letter: letter.into(),
            pop: "Z0".into(),
            to_state: "q".into(),
            push: vec!["Z0".into()],
            head,
        };
        let mk = |ts: Vec<PdaTransition>| {
            TwoNpda::new(
                states.clone(),
                input.clone(),
                stack.clone(),
                "q".into(),
                "Z0".into(),
                BTreeSet::new(),
                ts,
            )
        };
        assert!(mk(vec![t("<", -1)]).is_err());
        assert!(mk(vec![t(">", 1)]).is_err());
        assert!(mk(vec![t("<", 1), t(">", -1), t("a", 0)]).is_ok());
    }
}
