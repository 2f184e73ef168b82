//! Bit-exact text formats.
//!
//! Every format is a whitespace-delimited token stream with a one-line
//! header `<tag> 1` (format tag and version). Serialization is canonical:
//! containers are emitted in sorted order with single spaces and a trailing
//! newline, so equal values produce identical bytes and
//! `parse . serialize = identity`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::{
    BracketLabel, Edge, FormatError, HardestWord, HwToken, Instance, LabeledGraph, NatMatrix,
    PAutomaton, Pda, PdaTransition, PdsCertificate, PdsRule, Production, PushdownSystem,
    SeparatorBundle, SeparatorDoc, TwoNpda, WalkScheme,
};

/// Document format selector, named by file extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    D2r,
    Wsc,
    Sep,
    Pds,
    Pauto,
    Pda,
    Npda2,
    Hw,
    Lgr,
    PdsCert,
}

impl Format {
    pub fn tag(self) -> &'static str {
        match self {
            Format::D2r => "d2r",
            Format::Wsc => "wsc",
            Format::Sep => "sep",
            Format::Pds => "pds",
            Format::Pauto => "pauto",
            Format::Pda => "pda",
            Format::Npda2 => "npda2",
            Format::Hw => "hw",
            Format::Lgr => "lgr",
            Format::PdsCert => "pdscert",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Format> {
        match tag {
            "d2r" => Some(Format::D2r),
            "wsc" => Some(Format::Wsc),
            "sep" => Some(Format::Sep),
            "pds" => Some(Format::Pds),
            "pauto" => Some(Format::Pauto),
            "pda" => Some(Format::Pda),
            "npda2" => Some(Format::Npda2),
            "hw" => Some(Format::Hw),
            "lgr" => Some(Format::Lgr),
            "pdscert" => Some(Format::PdsCert),
            _ => None,
        }
    }
}

/// A parsed document of any supported format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Instance(Instance),
    WalkScheme(WalkScheme),
    Separator(SeparatorDoc),
    Pds(PushdownSystem),
    PAutomaton(PAutomaton),
    Pda(Pda),
    TwoNpda(TwoNpda),
    HardestWord(HardestWord),
    LabeledGraph(LabeledGraph),
    PdsCertificate(PdsCertificate),
}

/// Parses a document of the given format, checking all type invariants and
/// rejecting trailing garbage.
pub fn parse_document(format: Format, text: &str) -> Result<Document, FormatError> {
    match format {
        Format::D2r => parse_instance(text).map(Document::Instance),
        Format::Wsc => parse_walk_scheme(text).map(Document::WalkScheme),
        Format::Sep => parse_separator(text).map(Document::Separator),
        Format::Pds => parse_pds(text).map(Document::Pds),
        Format::Pauto => parse_pauto(text).map(Document::PAutomaton),
        Format::Pda => parse_pda(text).map(Document::Pda),
        Format::Npda2 => parse_two_npda(text).map(Document::TwoNpda),
        Format::Hw => parse_hardest_word(text).map(Document::HardestWord),
        Format::Lgr => parse_labeled_graph(text).map(Document::LabeledGraph),
        Format::PdsCert => parse_pds_certificate(text).map(Document::PdsCertificate),
    }
}

/// Canonical serialization of a document.
pub fn serialize_document(doc: &Document) -> String {
    match doc {
        Document::Instance(x) => serialize_instance(x),
        Document::WalkScheme(x) => serialize_walk_scheme(x),
        Document::Separator(x) => serialize_separator(x),
        Document::Pds(x) => serialize_pds(x),
        Document::PAutomaton(x) => serialize_pauto(x),
        Document::Pda(x) => serialize_pda(x),
        Document::TwoNpda(x) => serialize_two_npda(x),
        Document::HardestWord(x) => serialize_hardest_word(x),
        Document::LabeledGraph(x) => serialize_labeled_graph(x),
        Document::PdsCertificate(x) => serialize_pds_certificate(x),
    }
}

// ---------------------------------------------------------------------------
// Tokenized line reader

struct Reader<'a> {
    lines: Vec<(usize, Vec<&'a str>)>,
    idx: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str, tag: &str) -> Result<Self, FormatError> {
        let mut lines = Vec::new();
        for (i, raw) in text.split('\n').enumerate() {
            let toks: Vec<&str> = raw.split_whitespace().collect();
            if toks.is_empty() {
                // Only the final newline may produce an empty fragment.
                if i + 1 != text.split('\n').count() {
                    return Err(FormatError::new(i + 1, "blank line"));
                }
                continue;
            }
            lines.push((i + 1, toks));
        }
        let mut r = Reader { lines, idx: 0 };
        let (line, toks) = r.next_line()?;
        if toks.len() != 2 || toks[0] != tag || toks[1] != "1" {
            return Err(FormatError::new(line, format!("expected header '{tag} 1'")));
        }
        Ok(r)
    }

    /// As `new`, but accepts any of the given header tags; returns which one
    /// matched.
    fn new_multi(text: &'a str, tags: &[&'static str]) -> Result<(Self, &'static str), FormatError> {
        let mut lines = Vec::new();
        for (i, raw) in text.split('\n').enumerate() {
            let toks: Vec<&str> = raw.split_whitespace().collect();
            if toks.is_empty() {
                if i + 1 != text.split('\n').count() {
                    return Err(FormatError::new(i + 1, "blank line"));
                }
                continue;
            }
            lines.push((i + 1, toks));
        }
        let mut r = Reader { lines, idx: 0 };
        let (line, toks) = r.next_line()?;
        if toks.len() == 2 && toks[1] == "1" {
            if let Some(tag) = tags.iter().find(|t| **t == toks[0]) {
                return Ok((r, tag));
            }
        }
        Err(FormatError::new(line, format!("expected header '{} 1'", tags.join(" 1' or '"))))
    }

    fn next_line(&mut self) -> Result<(usize, Vec<&'a str>), FormatError> {
        if self.idx >= self.lines.len() {
            let last = self.lines.last().map_or(1, |(l, _)| *l);
            return Err(FormatError::new(last, "unexpected end of document"));
        }
        let (line, toks) = self.lines[self.idx].clone();
        self.idx += 1;
        Ok((line, toks))
    }

    fn peek(&self) -> Option<&(usize, Vec<&'a str>)> {
        self.lines.get(self.idx)
    }

    fn finish(&self) -> Result<(), FormatError> {
        if let Some((line, toks)) = self.peek() {
            return Err(FormatError::new(*line, format!("trailing garbage '{}'", toks[0])));
        }
        Ok(())
    }

    /// Consumes a line of the form `<keyword> <tokens...>` and returns the
    /// tokens after the keyword.
    fn keyword_line(&mut self, keyword: &str) -> Result<(usize, Vec<&'a str>), FormatError> {
        let (line, toks) = self.next_line()?;
        if toks[0] != keyword {
            return Err(FormatError::new(line, format!("expected '{keyword}', found '{}'", toks[0])));
        }
        Ok((line, toks[1..].to_vec()))
    }
}

fn parse_u32(tok: &str, line: usize) -> Result<u32, FormatError> {
    tok.parse::<u32>().map_err(|_| FormatError::new(line, format!("unknown token '{tok}'")))
}

fn parse_u64(tok: &str, line: usize) -> Result<u64, FormatError> {
    tok.parse::<u64>().map_err(|_| FormatError::new(line, format!("unknown token '{tok}'")))
}

fn parse_label(tok: &str, line: usize) -> Result<BracketLabel, FormatError> {
    BracketLabel::from_token(tok)
        .ok_or_else(|| FormatError::new(line, format!("unknown token '{tok}'")))
}

fn fixed_arity<'a>(
    toks: &[&'a str],
    arity: usize,
    line: usize,
    what: &str,
) -> Result<(), FormatError> {
    if toks.len() != arity {
        return Err(FormatError::new(line, format!("malformed {what} line")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Instances (.d2r) and labeled graphs (.lgr)

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let mut r = Reader::new(text, "d2r")?;
    let (line, toks) = r.keyword_line("vertices")?;
    fixed_arity(&toks, 1, line, "vertices")?;
    let n = parse_u32(toks[0], line)?;
    let (line, toks) = r.keyword_line("source")?;
    fixed_arity(&toks, 1, line, "source")?;
    let s = parse_u32(toks[0], line)?;
    let (line, toks) = r.keyword_line("target")?;
    fixed_arity(&toks, 1, line, "target")?;
    let t = parse_u32(toks[0], line)?;
    let (line, toks) = r.keyword_line("edges")?;
    fixed_arity(&toks, 1, line, "edges")?;
    let m = parse_u64(toks[0], line)?;
    let mut edges = Vec::new();
    let mut last_line = line;
    for _ in 0..m {
        let (line, toks) = r.keyword_line("edge")?;
        fixed_arity(&toks, 3, line, "edge")?;
        let from = parse_u32(toks[0], line)?;
        let to = parse_u32(toks[1], line)?;
        let label = parse_label(toks[2], line)?;
        edges.push(Edge { from, to, label });
        last_line = line;
    }
    r.finish()?;
    Instance::new(n, s, t, edges).map_err(|e| e.at_line(last_line))
}

pub fn serialize_instance(instance: &Instance) -> String {
    let mut out = String::new();
    out.push_str("d2r 1\n");
    let _ = writeln!(out, "vertices {}", instance.n());
    let _ = writeln!(out, "source {}", instance.source());
    let _ = writeln!(out, "target {}", instance.target());
    let _ = writeln!(out, "edges {}", instance.edges().len());
    for e in instance.edges() {
        let _ = writeln!(out, "edge {} {} {}", e.from, e.to, e.label);
    }
    out
}

pub fn parse_labeled_graph(text: &str) -> Result<LabeledGraph, FormatError> {
    let mut r = Reader::new(text, "lgr")?;
    let (line, toks) = r.keyword_line("vertices")?;
    fixed_arity(&toks, 1, line, "vertices")?;
    let n = parse_u32(toks[0], line)?;
    let (line, toks) = r.keyword_line("source")?;
    fixed_arity(&toks, 1, line, "source")?;
    let s = parse_u32(toks[0], line)?;
    let (line, toks) = r.keyword_line("target")?;
    fixed_arity(&toks, 1, line, "target")?;
    let t = parse_u32(toks[0], line)?;
    let (line, toks) = r.keyword_line("edges")?;
    fixed_arity(&toks, 1, line, "edges")?;
    let m = parse_u64(toks[0], line)?;
    let mut edges = Vec::new();
    let mut last_line = line;
    for _ in 0..m {
        let (line, toks) = r.keyword_line("edge")?;
        fixed_arity(&toks, 3, line, "edge")?;
        let from = parse_u32(toks[0], line)?;
        let to = parse_u32(toks[1], line)?;
        edges.push((from, to, toks[2].to_string()));
        last_line = line;
    }
    r.finish()?;
    LabeledGraph::new(n, s, t, edges).map_err(|e| e.at_line(last_line))
}

pub fn serialize_labeled_graph(g: &LabeledGraph) -> String {
    let mut out = String::new();
    out.push_str("lgr 1\n");
    let _ = writeln!(out, "vertices {}", g.n());
    let _ = writeln!(out, "source {}", g.source());
    let _ = writeln!(out, "target {}", g.target());
    let _ = writeln!(out, "edges {}", g.edges().len());
    for (u, v, a) in g.edges() {
        let _ = writeln!(out, "edge {u} {v} {a}");
    }
    out
}

// ---------------------------------------------------------------------------
// Walk schemes (.wsc)

pub fn parse_walk_scheme(text: &str) -> Result<WalkScheme, FormatError> {
    let mut r = Reader::new(text, "wsc")?;
    let (line, toks) = r.keyword_line("axiom")?;
    fixed_arity(&toks, 2, line, "axiom")?;
    let axiom = (parse_u32(toks[0], line)?, parse_u32(toks[1], line)?);
    let mut productions = BTreeMap::new();
    let mut last_line = line;
    while r.peek().is_some() {
        let (line, toks) = r.keyword_line("prod")?;
        last_line = line;
        if toks.len() < 3 {
            return Err(FormatError::new(line, "malformed prod line"));
        }
        let u = parse_u32(toks[0], line)?;
        let v = parse_u32(toks[1], line)?;
        let p = match toks[2] {
            "concat" => {
                fixed_arity(&toks, 4, line, "prod")?;
                Production::Concat(parse_u32(toks[3], line)?)
            }
            "wrap" => {
                fixed_arity(&toks, 6, line, "prod")?;
                let x = parse_u32(toks[3], line)?;
                let y = parse_u32(toks[4], line)?;
                let open = parse_label(toks[5], line)?;
                if !open.is_open() {
                    return Err(FormatError::new(line, format!("'{open}' is not an opening label")));
                }
                Production::Wrap { x, y, open }
            }
            "eps" => {
                fixed_arity(&toks, 3, line, "prod")?;
                Production::Eps
            }
            other => return Err(FormatError::new(line, format!("unknown token '{other}'"))),
        };
        if productions.insert((u, v), p).is_some() {
            return Err(FormatError::new(line, format!("duplicate production for <{u}, {v}>")));
        }
    }
    r.finish()?;
    WalkScheme::new(axiom, productions).map_err(|e| e.at_line(last_line))
}

pub fn serialize_walk_scheme(ws: &WalkScheme) -> String {
    let mut out = String::new();
    out.push_str("wsc 1\n");
    let _ = writeln!(out, "axiom {} {}", ws.axiom().0, ws.axiom().1);
    for (&(u, v), &p) in ws.productions() {
        match p {
            Production::Concat(w) => {
                let _ = writeln!(out, "prod {u} {v} concat {w}");
            }
            Production::Wrap { x, y, open } => {
                let _ = writeln!(out, "prod {u} {v} wrap {x} {y} {open}");
            }
            Production::Eps => {
                let _ = writeln!(out, "prod {u} {v} eps");
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Separators (.sep)

fn parse_matrix_block(
    r: &mut Reader,
    name: &str,
    n: usize,
    bound: u64,
) -> Result<NatMatrix, FormatError> {
    let (line, toks) = r.keyword_line("matrix")?;
    fixed_arity(&toks, 1, line, "matrix")?;
    if toks[0] != name {
        return Err(FormatError::new(line, format!("expected matrix {name}, found {}", toks[0])));
    }
    let mut data = Vec::with_capacity(n * n);
    for _ in 0..n {
        let (line, toks) = r.next_line()?;
        if toks.len() != n {
            return Err(FormatError::new(line, format!("matrix {name}: expected {n} entries per row")));
        }
        for tok in toks {
            let x = parse_u64(tok, line)?;
            if x > bound {
                return Err(FormatError::new(line, format!("matrix {name}: entry exceeds n^2")));
            }
            data.push(x);
        }
    }
    Ok(NatMatrix::from_rows(n, data))
}

pub fn parse_separator(text: &str) -> Result<SeparatorDoc, FormatError> {
    let (mut r, tag) = Reader::new_multi(text, &["sep", "sep-ms"])?;
    let (line, toks) = r.keyword_line("n")?;
    fixed_arity(&toks, 1, line, "n")?;
    let n = parse_u32(toks[0], line)? as usize;
    if n == 0 {
        return Err(FormatError::new(line, "dimension must be at least 1"));
    }
    if n > super::MAX_DIM {
        return Err(FormatError::new(line, format!("dimension exceeds {}", super::MAX_DIM)));
    }
    let bound = (n as u64) * (n as u64);
    let m_s = parse_matrix_block(&mut r, "MS", n, 1)?;
    if tag == "sep-ms" {
        r.finish()?;
        return Ok(SeparatorDoc::MsOnly(m_s));
    }
    let m_ss = parse_matrix_block(&mut r, "MSS", n, bound)?;
    let m_o1s = parse_matrix_block(&mut r, "Mo1S", n, bound)?;
    let m_o2s = parse_matrix_block(&mut r, "Mo2S", n, bound)?;
    let m_o1sc1 = parse_matrix_block(&mut r, "Mo1Sc1", n, bound)?;
    let m_o2sc2 = parse_matrix_block(&mut r, "Mo2Sc2", n, bound)?;
    r.finish()?;
    let bundle = SeparatorBundle { m_s, m_ss, m_o1s, m_o2s, m_o1sc1, m_o2sc2 };
    bundle.validate()?;
    Ok(SeparatorDoc::Full(bundle))
}

fn write_matrix(out: &mut String, name: &str, m: &NatMatrix) {
    let _ = writeln!(out, "matrix {name}");
    let n = m.dim();
    for i in 0..n {
        for j in 0..n {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}", m.get(i, j));
        }
        out.push('\n');
    }
}

pub fn serialize_separator(doc: &SeparatorDoc) -> String {
    let mut out = String::new();
    match doc {
        SeparatorDoc::Full(b) => {
            out.push_str("sep 1\n");
            let _ = writeln!(out, "n {}", b.m_s.dim());
            for (name, m) in b.blocks() {
                write_matrix(&mut out, name, m);
            }
        }
        SeparatorDoc::MsOnly(m_s) => {
            out.push_str("sep-ms 1\n");
            let _ = writeln!(out, "n {}", m_s.dim());
            write_matrix(&mut out, "MS", m_s);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Pushdown systems (.pds) and P-automata (.pauto)

fn check_symbol_name(name: &str, line: usize) -> Result<(), FormatError> {
    super::check_stack_symbol(name).map_err(|e| e.at_line(line))
}

pub fn parse_pds(text: &str) -> Result<PushdownSystem, FormatError> {
    let mut r = Reader::new(text, "pds")?;
    let (_, toks) = r.keyword_line("states")?;
    let states: BTreeSet<String> = toks.iter().map(|s| s.to_string()).collect();
    let (line, toks) = r.keyword_line("stack")?;
    for t in &toks {
        check_symbol_name(t, line)?;
    }
    let stack: BTreeSet<String> = toks.iter().map(|s| s.to_string()).collect();
    let mut rules = Vec::new();
    let mut last_line = line;
    while r.peek().is_some() {
        let (line, toks) = r.keyword_line("rule")?;
        last_line = line;
        if toks.len() < 4 || toks.len() > 6 || toks[2] != "->" {
            return Err(FormatError::new(line, "malformed rule line"));
        }
        rules.push(PdsRule {
            from_state: toks[0].to_string(),
            pop: toks[1].to_string(),
            to_state: toks[3].to_string(),
            push: toks[4..].iter().map(|s| s.to_string()).collect(),
        });
    }
    r.finish()?;
    PushdownSystem::new(states, stack, rules).map_err(|e| e.at_line(last_line))
}

pub fn serialize_pds(pds: &PushdownSystem) -> String {
    let mut out = String::new();
    out.push_str("pds 1\n");
    out.push_str("states");
    for q in pds.states() {
        let _ = write!(out, " {q}");
    }
    out.push('\n');
    out.push_str("stack");
    for a in pds.stack_alphabet() {
        let _ = write!(out, " {a}");
    }
    out.push('\n');
    for rule in pds.rules() {
        let _ = write!(out, "rule {} {} -> {}", rule.from_state, rule.pop, rule.to_state);
        for s in &rule.push {
            let _ = write!(out, " {s}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_pauto(text: &str) -> Result<PAutomaton, FormatError> {
    let mut r = Reader::new(text, "pauto")?;
    let (_, toks) = r.keyword_line("states")?;
    let states: BTreeSet<String> = toks.iter().map(|s| s.to_string()).collect();
    let (line, toks) = r.keyword_line("final")?;
    let finals: BTreeSet<String> = toks.iter().map(|s| s.to_string()).collect();
    let mut transitions = BTreeSet::new();
    let mut last_line = line;
    while r.peek().is_some() {
        let (line, toks) = r.keyword_line("trans")?;
        fixed_arity(&toks, 3, line, "trans")?;
        transitions.insert((toks[0].to_string(), toks[1].to_string(), toks[2].to_string()));
        last_line = line;
    }
    r.finish()?;
    PAutomaton::new(states, transitions, finals).map_err(|e| e.at_line(last_line))
}

pub fn serialize_pauto(aut: &PAutomaton) -> String {
    let mut out = String::new();
    out.push_str("pauto 1\n");
    out.push_str("states");
    for s in aut.states() {
        let _ = write!(out, " {s}");
    }
    out.push('\n');
    out.push_str("final");
    for f in aut.finals() {
        let _ = write!(out, " {f}");
    }
    out.push('\n');
    for (from, label, to) in aut.transitions() {
        let _ = writeln!(out, "trans {from} {label} {to}");
    }
    out
}

// ---------------------------------------------------------------------------
// PDAs (.pda) and 2NPDAs (.npda2)

fn gamma_token(push: &[String]) -> String {
    if push.is_empty() {
        "_".to_string()
    } else {
        push.join(".")
    }
}

fn parse_gamma(tok: &str, line: usize) -> Result<Vec<String>, FormatError> {
    if tok == "_" {
        return Ok(Vec::new());
    }
    let parts: Vec<String> = tok.split('.').map(|s| s.to_string()).collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(FormatError::new(line, format!("unknown token '{tok}'")));
    }
    Ok(parts)
}

fn parse_head(tok: &str, line: usize) -> Result<i8, FormatError> {
    match tok {
        "-1" => Ok(-1),
        "0" => Ok(0),
        "+1" => Ok(1),
        _ => Err(FormatError::new(line, format!("unknown token '{tok}'"))),
    }
}

fn head_token(d: i8) -> &'static str {
    match d {
        -1 => "-1",
        0 => "0",
        _ => "+1",
    }
}

struct MachineParts {
    states: BTreeSet<String>,
    input: BTreeSet<String>,
    stack: BTreeSet<String>,
    initial: String,
    bottom: String,
    finals: BTreeSet<String>,
    transitions: Vec<PdaTransition>,
    last_line: usize,
}

fn parse_machine(r: &mut Reader) -> Result<MachineParts, FormatError> {
    let (_, toks) = r.keyword_line("states")?;
    let states: BTreeSet<String> = toks.iter().map(|s| s.to_string()).collect();
    let (_, toks) = r.keyword_line("input")?;
    let input: BTreeSet<String> = toks.iter().map(|s| s.to_string()).collect();
    let (line, toks) = r.keyword_line("stack")?;
    for t in &toks {
        check_symbol_name(t, line)?;
    }
    let stack: BTreeSet<String> = toks.iter().map(|s| s.to_string()).collect();
    let (line, toks) = r.keyword_line("init")?;
    fixed_arity(&toks, 2, line, "init")?;
    let initial = toks[0].to_string();
    let bottom = toks[1].to_string();
    let (line, toks) = r.keyword_line("final")?;
    let finals: BTreeSet<String> = toks.iter().map(|s| s.to_string()).collect();
    let mut transitions = Vec::new();
    let mut last_line = line;
    while r.peek().is_some() {
        let (line, toks) = r.keyword_line("trans")?;
        fixed_arity(&toks, 7, line, "trans")?;
        if toks[3] != "->" {
            return Err(FormatError::new(line, "malformed trans line"));
        }
        transitions.push(PdaTransition {
            from_state: toks[0].to_string(),
            letter: toks[1].to_string(),
            pop: toks[2].to_string(),
            to_state: toks[4].to_string(),
            push: parse_gamma(toks[5], line)?,
            head: parse_head(toks[6], line)?,
        });
        last_line = line;
    }
    r.finish()?;
    Ok(MachineParts { states, input, stack, initial, bottom, finals, transitions, last_line })
}

pub fn parse_pda(text: &str) -> Result<Pda, FormatError> {
    let mut r = Reader::new(text, "pda")?;
    let p = parse_machine(&mut r)?;
    Pda::new(p.states, p.input, p.stack, p.initial, p.bottom, p.finals, p.transitions)
        .map_err(|e| e.at_line(p.last_line))
}

pub fn parse_two_npda(text: &str) -> Result<TwoNpda, FormatError> {
    let mut r = Reader::new(text, "npda2")?;
    let p = parse_machine(&mut r)?;
    TwoNpda::new(p.states, p.input, p.stack, p.initial, p.bottom, p.finals, p.transitions)
        .map_err(|e| e.at_line(p.last_line))
}

fn serialize_machine(
    out: &mut String,
    states: &BTreeSet<String>,
    input: &BTreeSet<String>,
    stack: &BTreeSet<String>,
    initial: &str,
    bottom: &str,
    finals: &BTreeSet<String>,
    transitions: &[PdaTransition],
) {
    out.push_str("states");
    for q in states {
        let _ = write!(out, " {q}");
    }
    out.push('\n');
    out.push_str("input");
    for a in input {
        let _ = write!(out, " {a}");
    }
    out.push('\n');
    out.push_str("stack");
    for z in stack {
        let _ = write!(out, " {z}");
    }
    out.push('\n');
    let _ = writeln!(out, "init {initial} {bottom}");
    out.push_str("final");
    for f in finals {
        let _ = write!(out, " {f}");
    }
    out.push('\n');
    for t in transitions {
        let _ = writeln!(
            out,
            "trans {} {} {} -> {} {} {}",
            t.from_state,
            t.letter,
            t.pop,
            t.to_state,
            gamma_token(&t.push),
            head_token(t.head)
        );
    }
}

pub fn serialize_pda(pda: &Pda) -> String {
    let mut out = String::new();
    out.push_str("pda 1\n");
    serialize_machine(
        &mut out,
        &pda.states,
        &pda.input_alphabet,
        &pda.stack_alphabet,
        &pda.initial_state,
        &pda.bottom,
        &pda.finals,
        &pda.transitions,
    );
    out
}

pub fn serialize_two_npda(m: &TwoNpda) -> String {
    let mut out = String::new();
    out.push_str("npda2 1\n");
    serialize_machine(
        &mut out,
        &m.states,
        &m.input_alphabet,
        &m.stack_alphabet,
        &m.initial_state,
        &m.bottom,
        &m.finals,
        &m.transitions,
    );
    out
}

// ---------------------------------------------------------------------------
// Hardest words (.hw)

/// Lenient token-level parse: checks the header and token alphabet but not
/// the block shape. Words that fail the shape test are simply non-members of
/// the hardest language.
pub fn parse_hw_tokens(text: &str) -> Result<Vec<HwToken>, FormatError> {
    let mut r = Reader::new(text, "hw")?;
    let mut tokens = Vec::new();
    while r.peek().is_some() {
        let (line, toks) = r.next_line()?;
        for tok in toks {
            let t = HwToken::from_token(tok)
                .ok_or_else(|| FormatError::new(line, format!("unknown token '{tok}'")))?;
            tokens.push(t);
        }
    }
    Ok(tokens)
}

pub fn parse_hardest_word(text: &str) -> Result<HardestWord, FormatError> {
    let tokens = parse_hw_tokens(text)?;
    HardestWord::from_tokens(tokens).map_err(|e| e.at_line(2))
}

pub fn serialize_hardest_word(w: &HardestWord) -> String {
    let mut out = String::new();
    out.push_str("hw 1\n");
    for (i, t) in w.tokens().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(t.token());
    }
    out.push('\n');
    out
}

// ---------------------------------------------------------------------------
// Pushdown certificates (.pdscert)

pub fn parse_pds_certificate(text: &str) -> Result<PdsCertificate, FormatError> {
    let mut r = Reader::new(text, "pdscert")?;
    let (line, toks) = r.keyword_line("n")?;
    fixed_arity(&toks, 1, line, "n")?;
    let n = parse_u32(toks[0], line)? as usize;
    if n == 0 || n > super::MAX_DIM {
        return Err(FormatError::new(line, "dimension out of range"));
    }
    let (line, toks) = r.keyword_line("stack")?;
    for t in &toks {
        check_symbol_name(t, line)?;
    }
    let symbols: Vec<String> = toks.iter().map(|s| s.to_string()).collect();
    let sorted: BTreeSet<&String> = symbols.iter().collect();
    if sorted.len() != symbols.len() || !symbols.windows(2).all(|w| w[0] < w[1]) {
        return Err(FormatError::new(line, "stack symbols must be sorted and distinct"));
    }
    let bound = (n as u64) * (n as u64);
    let mut m = BTreeMap::new();
    let mut mab = BTreeMap::new();
    let mut m1 = BTreeMap::new();
    let mut m2 = BTreeMap::new();
    for a in &symbols {
        m.insert(a.clone(), parse_matrix_block(&mut r, &format!("M:{a}"), n, 1)?);
    }
    for a in &symbols {
        for b in &symbols {
            mab.insert(
                (a.clone(), b.clone()),
                parse_matrix_block(&mut r, &format!("MAB:{a}:{b}"), n, bound)?,
            );
        }
    }
    for a in &symbols {
        for b in &symbols {
            for c in &symbols {
                m1.insert(
                    (a.clone(), b.clone(), c.clone()),
                    parse_matrix_block(&mut r, &format!("M1:{a}:{b}:{c}"), n, bound)?,
                );
            }
        }
    }
    for a in &symbols {
        for b in &symbols {
            for c in &symbols {
                m2.insert(
                    (a.clone(), b.clone(), c.clone()),
                    parse_matrix_block(&mut r, &format!("M2:{a}:{b}:{c}"), n, bound)?,
                );
            }
        }
    }
    r.finish()?;
    Ok(PdsCertificate { dim: n, symbols, m, mab, m1, m2 })
}

pub fn serialize_pds_certificate(c: &PdsCertificate) -> String {
    let mut out = String::new();
    out.push_str("pdscert 1\n");
    let _ = writeln!(out, "n {}", c.dim);
    out.push_str("stack");
    for a in &c.symbols {
        let _ = write!(out, " {a}");
    }
    out.push('\n');
    for a in &c.symbols {
        write_matrix(&mut out, &format!("M:{a}"), &c.m[a]);
    }
    for a in &c.symbols {
        for b in &c.symbols {
            write_matrix(&mut out, &format!("MAB:{a}:{b}"), &c.mab[&(a.clone(), b.clone())]);
        }
    }
    for a in &c.symbols {
        for b in &c.symbols {
            for cc in &c.symbols {
                write_matrix(
                    &mut out,
                    &format!("M1:{a}:{b}:{cc}"),
                    &c.m1[&(a.clone(), b.clone(), cc.clone())],
                );
            }
        }
    }
    for a in &c.symbols {
        for b in &c.symbols {
            for cc in &c.symbols {
                write_matrix(
                    &mut out,
                    &format!("M2:{a}:{b}:{cc}"),
                    &c.m2[&(a.clone(), b.clone(), cc.clone())],
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_instance_round_trip() {
        let text = "d2r 1\nvertices 1\nsource 1\ntarget 1\nedges 0\n";
        let i = parse_instance(text).unwrap();
        assert_eq!(i.n(), 1);
        assert_eq!(i.source(), 1);
        assert_eq!(i.target(), 1);
        assert!(i.edges().is_empty());
        assert_eq!(serialize_instance(&i), text);
    }

    #[test]
    fn instance_rejects_trailing_garbage() {
        let text = "d2r 1\nvertices 1\nsource 1\ntarget 1\nedges 0\nedge 1 1 o1\n";
        let err = parse_instance(text).unwrap_err();
        assert!(err.reason.contains("trailing garbage"), "{err}");
    }

    #[test]
    fn instance_rejects_truncation() {
        let err = parse_instance("d2r 1\nvertices 1\nsource 1\n").unwrap_err();
        assert!(err.reason.contains("unexpected end"), "{err}");
    }

    #[test]
    fn duplicate_production_rejected() {
        let text = "wsc 1\naxiom 1 1\nprod 1 1 eps\nprod 1 1 eps\n";
        let err = parse_walk_scheme(text).unwrap_err();
        assert!(err.reason.contains("duplicate production"), "{err}");
        assert_eq!(err.line, 4);
    }

    #[test]
    fn separator_entry_bound() {
        // n = 1, so any entry above 1 exceeds n^2.
        let text = "sep 1\nn 1\nmatrix MS\n1\nmatrix MSS\n2\nmatrix Mo1S\n0\nmatrix Mo2S\n0\nmatrix Mo1Sc1\n0\nmatrix Mo2Sc2\n0\n";
        let err = parse_separator(text).unwrap_err();
        assert!(err.reason.contains("entry exceeds n^2"), "{err}");
    }

    #[test]
    fn separator_ms_only() {
        let text = "sep-ms 1\nn 2\nmatrix MS\n1 0\n0 1\n";
        match parse_separator(text).unwrap() {
            SeparatorDoc::MsOnly(m) => assert_eq!(m, NatMatrix::identity(2)),
            _ => panic!("expected ms-only document"),
        }
        let doc = parse_separator(text).unwrap();
        assert_eq!(serialize_separator(&doc), text);
    }

    #[test]
    fn pds_and_pauto_round_trip() {
        let text = "pds 1\nstates p q\nstack A B\nrule p A -> q\nrule p A -> q B\nrule q B -> p A B\n";
        let pds = parse_pds(text).unwrap();
        assert_eq!(serialize_pds(&pds), text);
        let text = "pauto 1\nstates f p q\nfinal f\ntrans p A f\ntrans q B f\n";
        let aut = parse_pauto(text).unwrap();
        assert_eq!(serialize_pauto(&aut), text);
    }

    #[test]
    fn pauto_pairing_checks() {
        let pds = parse_pds("pds 1\nstates p q\nstack A\n").unwrap();
        let aut = parse_pauto("pauto 1\nstates p q\nfinal q\n").unwrap();
        let err = aut.check_against(&pds).unwrap_err();
        assert!(err.reason.contains("non-disjoint F"), "{err}");
        let aut = parse_pauto("pauto 1\nstates p\nfinal\n").unwrap();
        assert!(aut.check_against(&pds).is_err());
    }

    #[test]
    fn pda_round_trip() {
        let text = "pda 1\nstates q0 q1\ninput a\nstack A Z0\ninit q0 Z0\nfinal q1\ntrans q0 a Z0 -> q1 A.Z0 +1\ntrans q1 a A -> q1 _ 0\n";
        let pda = parse_pda(text).unwrap();
        assert_eq!(serialize_pda(&pda), text);
    }

    #[test]
    fn npda2_round_trip() {
        let text = "npda2 1\nstates q\ninput < > a\nstack Z0\ninit q Z0\nfinal q\ntrans q < Z0 -> q Z0 +1\ntrans q a Z0 -> q Z0 +1\n";
        let m = parse_two_npda(text).unwrap();
        assert_eq!(serialize_two_npda(&m), text);
    }

    #[test]
    fn hw_round_trip_and_shape_error() {
        let text = "hw 1\nV o1 1 V c1 - 1\n";
        let w = parse_hardest_word(text).unwrap();
        assert_eq!(serialize_hardest_word(&w), text);
        // Token-valid but shape-invalid: lenient parse succeeds, full parse fails.
        let bad = "hw 1\n1 V\n";
        assert!(parse_hw_tokens(bad).is_ok());
        let err = parse_hardest_word(bad).unwrap_err();
        assert!(err.reason.contains("malformed shape"), "{err}");
        // Unknown token fails both.
        assert!(parse_hw_tokens("hw 1\nV x\n").is_err());
    }

    #[test]
    fn bad_header_rejected() {
        assert!(parse_instance("wsc 1\n").is_err());
        assert!(parse_instance("d2r 2\nvertices 1\nsource 1\ntarget 1\nedges 0\n").is_err());
    }
}
