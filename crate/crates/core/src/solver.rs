//! Worklist fixpoint for Dyck-2 reachability.
//!
//! The closure is computed for the fixed grammar
//! `S -> SS | P c1 | Q c2 | eps`, `P -> o1 S`, `Q -> o2 S`, shared with the
//! walk-scheme extractor and the separator constraints. Facts are derived in
//! a deterministic FIFO order, and only the first derivation of a fact is
//! recorded as its witness, which keeps witness references acyclic without a
//! pruning pass.

use std::collections::HashMap;
use std::collections::VecDeque;

use crate::model::{BracketLabel, Instance, NatMatrix};

/// The three relations of the closure grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    /// Balanced walks.
    S,
    /// Walks labelled `o1 . w` with `w` balanced.
    P,
    /// Walks labelled `o2 . w` with `w` balanced.
    Q,
}

/// Justification recorded for the first derivation of a fact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Witness {
    /// `S(u, u)` from the empty walk at `u`.
    EpsRule { u: u32 },
    /// `S(u, v)` from `S(u, w)` and `S(w, v)`.
    ConcatRule { u: u32, w: u32, v: u32 },
    /// `P(u, v)` (kind 1) or `Q(u, v)` (kind 2) from the opening edge
    /// `(u, x, open)` and the pair `S(x, v)`.
    OpenRule { open: BracketLabel, u: u32, x: u32, v: u32 },
    /// `S(u, v)` from the pair `P(u, y)` / `Q(u, y)` and the closing edge
    /// `(y, v, matching(open))`.
    CloseRule { open: BracketLabel, u: u32, y: u32, v: u32 },
}

impl Witness {
    /// Facts referenced by this witness, in rule order.
    pub fn references(&self) -> Vec<(Rel, u32, u32)> {
        match *self {
            Witness::EpsRule { .. } => vec![],
            Witness::ConcatRule { u, w, v } => vec![(Rel::S, u, w), (Rel::S, w, v)],
            Witness::OpenRule { x, v, .. } => vec![(Rel::S, x, v)],
            Witness::CloseRule { open, u, y, .. } => {
                let rel = if open == BracketLabel::Open1 { Rel::P } else { Rel::Q };
                vec![(rel, u, y)]
            }
        }
    }
}

/// A derived fact together with its witness; the position of the record in
/// the discovery log is the fact's timestamp.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactRecord {
    pub rel: Rel,
    pub from: u32,
    pub to: u32,
    pub witness: Witness,
}

/// Least fixpoint of the closure grammar over an instance, with per-fact
/// witnesses and discovery timestamps.
#[derive(Debug, Clone)]
pub struct SRelation {
    n: usize,
    s_bits: Vec<bool>,
    p_bits: Vec<bool>,
    q_bits: Vec<bool>,
    log: Vec<FactRecord>,
    index: HashMap<(Rel, u32, u32), u32>,
}

impl SRelation {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn bit(&self, rel: Rel, u: u32, v: u32) -> bool {
        let bits = match rel {
            Rel::S => &self.s_bits,
            Rel::P => &self.p_bits,
            Rel::Q => &self.q_bits,
        };
        bits[(u as usize - 1) * self.n + (v as usize - 1)]
    }

    /// `S(u, v)`: some balanced walk runs from `u` to `v`.
    pub fn s(&self, u: u32, v: u32) -> bool {
        self.bit(Rel::S, u, v)
    }

    pub fn p(&self, u: u32, v: u32) -> bool {
        self.bit(Rel::P, u, v)
    }

    pub fn q(&self, u: u32, v: u32) -> bool {
        self.bit(Rel::Q, u, v)
    }

    pub fn holds(&self, rel: Rel, u: u32, v: u32) -> bool {
        self.bit(rel, u, v)
    }

    /// Witness of the first derivation of a fact.
    pub fn witness(&self, rel: Rel, u: u32, v: u32) -> Option<&Witness> {
        self.index.get(&(rel, u, v)).map(|&i| &self.log[i as usize].witness)
    }

    /// Discovery timestamp of a fact: its position in the derivation log.
    pub fn timestamp(&self, rel: Rel, u: u32, v: u32) -> Option<u32> {
        self.index.get(&(rel, u, v)).copied()
    }

    /// The full derivation log in discovery order.
    pub fn log(&self) -> &[FactRecord] {
        &self.log
    }

    /// The relation as a 0-1 matrix.
    pub fn to_matrix(&self, rel: Rel) -> NatMatrix {
        let bits = match rel {
            Rel::S => &self.s_bits,
            Rel::P => &self.p_bits,
            Rel::Q => &self.q_bits,
        };
        let mut m = NatMatrix::zeros(self.n);
        for u in 0..self.n {
            for v in 0..self.n {
                if bits[u * self.n + v] {
                    m.set(u, v, 1);
                }
            }
        }
        m
    }
}

struct Closure {
    rel: SRelation,
    worklist: VecDeque<(Rel, u32, u32)>,
    // Join lists in discovery order.
    out_s: Vec<Vec<u32>>,
    in_s: Vec<Vec<u32>>,
    // Static edge indexes.
    open_in: [Vec<Vec<u32>>; 2],
    close_out: [Vec<Vec<u32>>; 2],
}

impl Closure {
    fn derive(&mut self, rel: Rel, u: u32, v: u32, witness: Witness) {
        let n = self.rel.n;
        let idx = (u as usize - 1) * n + (v as usize - 1);
        let bits = match rel {
            Rel::S => &mut self.rel.s_bits,
            Rel::P => &mut self.rel.p_bits,
            Rel::Q => &mut self.rel.q_bits,
        };
        if bits[idx] {
            return;
        }
        bits[idx] = true;
        let ts = self.rel.log.len() as u32;
        self.rel.log.push(FactRecord { rel, from: u, to: v, witness });
        self.rel.index.insert((rel, u, v), ts);
        if rel == Rel::S {
            self.out_s[u as usize - 1].push(v);
            self.in_s[v as usize - 1].push(u);
        }
        self.worklist.push_back((rel, u, v));
    }
}

/// Computes the least fixpoint with witnesses. Deterministic for a given
/// instance: the worklist is FIFO and facts are enqueued in canonical
/// edge/vertex order.
pub fn close(instance: &Instance) -> SRelation {
    let n = instance.n() as usize;
    let empty = SRelation {
        n,
        s_bits: vec![false; n * n],
        p_bits: vec![false; n * n],
        q_bits: vec![false; n * n],
        log: Vec::new(),
        index: HashMap::new(),
    };
    let mut open_in: [Vec<Vec<u32>>; 2] = [vec![Vec::new(); n], vec![Vec::new(); n]];
    let mut close_out: [Vec<Vec<u32>>; 2] = [vec![Vec::new(); n], vec![Vec::new(); n]];
    for e in instance.edges() {
        match e.label {
            BracketLabel::Open1 => open_in[0][e.to as usize - 1].push(e.from),
            BracketLabel::Open2 => open_in[1][e.to as usize - 1].push(e.from),
            BracketLabel::Close1 => close_out[0][e.from as usize - 1].push(e.to),
            BracketLabel::Close2 => close_out[1][e.from as usize - 1].push(e.to),
        }
    }
    let mut c = Closure {
        rel: empty,
        worklist: VecDeque::new(),
        out_s: vec![Vec::new(); n],
        in_s: vec![Vec::new(); n],
        open_in,
        close_out,
    };
    for u in 1..=n as u32 {
        c.derive(Rel::S, u, u, Witness::EpsRule { u });
    }
    while let Some((rel, u, v)) = c.worklist.pop_front() {
        match rel {
            Rel::S => {
                // Extend to the right: S(u, v) . S(v, w).
                let rights = c.out_s[v as usize - 1].clone();
                for w in rights {
                    c.derive(Rel::S, u, w, Witness::ConcatRule { u, w: v, v: w });
                }
                // Extend to the left: S(t, u) . S(u, v).
                let lefts = c.in_s[u as usize - 1].clone();
                for t in lefts {
                    c.derive(Rel::S, t, v, Witness::ConcatRule { u: t, w: u, v });
                }
                // Opening edges into u start a P or Q pair ending at v.
                for (k, rel_out, open) in
                    [(0usize, Rel::P, BracketLabel::Open1), (1, Rel::Q, BracketLabel::Open2)]
                {
                    let froms = c.open_in[k][u as usize - 1].clone();
                    for f in froms {
                        c.derive(rel_out, f, v, Witness::OpenRule { open, u: f, x: u, v });
                    }
                }
            }
            Rel::P | Rel::Q => {
                let (k, open) = if rel == Rel::P {
                    (0usize, BracketLabel::Open1)
                } else {
                    (1, BracketLabel::Open2)
                };
                let outs = c.close_out[k][v as usize - 1].clone();
                for w in outs {
                    c.derive(Rel::S, u, w, Witness::CloseRule { open, u, y: v, v: w });
                }
            }
        }
    }
    c.rel
}

/// Yes iff some balanced walk runs from the source to the target.
pub fn decide(instance: &Instance) -> bool {
    close(instance).s(instance.source(), instance.target())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Edge;
    use crate::oracle::bounded_walk_search;
    use BracketLabel::*;

    fn three_vertex() -> Instance {
        Instance::new(3, 1, 3, vec![Edge::new(1, 2, Open1), Edge::new(2, 3, Close1)]).unwrap()
    }

    #[test]
    fn empty_word_on_single_vertex() {
        let i = Instance::new(1, 1, 1, vec![]).unwrap();
        let r = close(&i);
        assert!(r.s(1, 1));
        assert!(!r.p(1, 1));
        assert!(!r.q(1, 1));
        assert!(decide(&i));
    }

    #[test]
    fn three_vertex_closure_matches_oracle() {
        let i = three_vertex();
        // Independent oracle: bounded search finds the length-2 walk.
        let walk = bounded_walk_search(&i, 4).expect("oracle finds a walk");
        assert_eq!(walk.steps, vec![(2, Open1), (3, Close1)]);
        let r = close(&i);
        assert!(r.s(1, 3));
        assert!(r.p(1, 2));
        for u in 1..=3 {
            assert!(r.s(u, u));
        }
        assert!(!r.s(3, 1));
        assert!(decide(&i));
    }

    #[test]
    fn alternating_cycle_is_a_no_instance() {
        let i =
            Instance::new(2, 1, 2, vec![Edge::new(1, 2, Open1), Edge::new(2, 1, Close1)]).unwrap();
        let r = close(&i);
        assert!(r.s(1, 1));
        assert!(!r.s(1, 2));
        assert!(!decide(&i));
    }

    #[test]
    fn source_equals_target_is_always_yes() {
        let i = Instance::new(4, 2, 2, vec![Edge::new(1, 2, Open2)]).unwrap();
        assert!(decide(&i));
    }

    #[test]
    fn concat_transitivity_on_a_small_instance() {
        // Two balanced hops 1 -> 2 -> 3 force S(1, 3) through the concat rule.
        let i = Instance::new(
            5,
            1,
            3,
            vec![
                Edge::new(1, 4, Open1),
                Edge::new(4, 2, Close1),
                Edge::new(2, 5, Open2),
                Edge::new(5, 3, Close2),
            ],
        )
        .unwrap();
        let r = close(&i);
        assert!(r.s(1, 2) && r.s(2, 3) && r.s(1, 3));
        // Transitive closure under concat holds everywhere.
        let n = r.n() as u32;
        for u in 1..=n {
            for w in 1..=n {
                for v in 1..=n {
                    if r.s(u, w) && r.s(w, v) {
                        assert!(r.s(u, v), "concat rule violated at ({u}, {w}, {v})");
                    }
                }
            }
        }
    }

    #[test]
    fn witnesses_reference_strictly_earlier_facts() {
        let i = Instance::new(
            4,
            1,
            4,
            vec![
                Edge::new(1, 2, Open1),
                Edge::new(2, 3, Open2),
                Edge::new(3, 3, Close2),
                Edge::new(3, 4, Close1),
                Edge::new(4, 1, Open1),
            ],
        )
        .unwrap();
        let r = close(&i);
        for (ts, rec) in r.log().iter().enumerate() {
            assert_eq!(r.timestamp(rec.rel, rec.from, rec.to), Some(ts as u32));
            for (rel, u, v) in rec.witness.references() {
                let ref_ts = r.timestamp(rel, u, v).expect("witness references a derived fact");
                assert!(ref_ts < ts as u32, "witness of {rec:?} references a later fact");
            }
        }
    }

    #[test]
    fn closure_is_deterministic() {
        let i = three_vertex();
        let a = close(&i);
        let b = close(&i);
        assert_eq!(a.log(), b.log());
    }
}
