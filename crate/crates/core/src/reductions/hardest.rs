//! Encoding of reachability instances as words of the hardest language.
//!
//! A word is a sequence of vertex-marked blocks, one per vertex in order;
//! each block lists the vertex's outgoing edges as `label offset` entries
//! with the offset in signed unary. The source is the first block and the
//! target the last. Decoding walks offsets over the vertex sequence with one
//! virtual vertex at each end: stepping onto a virtual endmarker consumes
//! one step and reverses direction.

use thiserror::Error;

use crate::model::{Edge, HardestWord, HwEntry, HwToken, Instance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("source equals target: the word format needs distinct first and last blocks")]
    SourceEqualsTarget,
}

/// Relabels the instance so the source is vertex 1 and the target vertex n
/// (swap `s` with 1, then the image of `t` with `n`), then emits one block
/// per vertex. Offsets are emitted directly; the decoder's reflection rule is
/// never needed for encoder output.
pub fn dyck2_to_hardest_word(instance: &Instance) -> Result<HardestWord, EncodeError> {
    if instance.source() == instance.target() {
        return Err(EncodeError::SourceEqualsTarget);
    }
    let n = instance.n();
    let s = instance.source();
    let t = instance.target();
    let swap1 = |v: u32| {
        if v == s {
            1
        } else if v == 1 {
            s
        } else {
            v
        }
    };
    let t1 = swap1(t);
    let relabel = move |v: u32| {
        let v = swap1(v);
        if v == t1 {
            n
        } else if v == n {
            t1
        } else {
            v
        }
    };
    let mut edges: Vec<Edge> = instance
        .edges()
        .iter()
        .map(|e| Edge::new(relabel(e.from), relabel(e.to), e.label))
        .collect();
    edges.sort_unstable();
    let mut blocks: Vec<Vec<HwEntry>> = vec![Vec::new(); n as usize];
    for e in &edges {
        blocks[e.from as usize - 1]
            .push(HwEntry { label: e.label, offset: e.to as i64 - e.from as i64 });
    }
    Ok(HardestWord::from_blocks(blocks))
}

/// Walks `offset` unit steps from vertex `at` over the sequence
/// `virtual-left, 1, ..., n, virtual-right`, reflecting off the virtual
/// endmarkers. A walk that stops exactly on an endmarker resolves to the
/// adjacent real vertex, so the result is always a real vertex.
fn fold_offset(at: u32, offset: i64, n: u32) -> u32 {
    let mut pos = at as i64;
    let mut dir: i64 = if offset >= 0 { 1 } else { -1 };
    for _ in 0..offset.abs() {
        pos += dir;
        if pos == 0 || pos == n as i64 + 1 {
            dir = -dir;
        }
    }
    if pos == 0 {
        1
    } else if pos == n as i64 + 1 {
        n
    } else {
        pos as u32
    }
}

/// Decodes a well-formed word back into an instance with source 1 and target
/// n. Offsets resolve through the reflection rule, so every entry yields an
/// edge.
pub fn decode_hardest_word(word: &HardestWord) -> Instance {
    let n = word.blocks().len() as u32;
    let mut edges = Vec::new();
    for (i, entries) in word.blocks().iter().enumerate() {
        let from = i as u32 + 1;
        for e in entries {
            edges.push(Edge::new(from, fold_offset(from, e.offset, n), e.label));
        }
    }
    Instance::new(n, 1, n, edges).expect("decoded vertices are always in range")
}

/// Membership in the hardest language: the language contains only words of
/// the block shape, and a well-formed word belongs iff its decoded instance
/// is a yes-instance.
pub fn hardest_membership(tokens: &[HwToken]) -> bool {
    match HardestWord::from_tokens(tokens.to_vec()) {
        Ok(word) => crate::solver::decide(&decode_hardest_word(&word)),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BracketLabel::*;

    #[test]
    fn two_vertex_cycle_encodes_to_expected_tokens() {
        let i =
            Instance::new(2, 1, 2, vec![Edge::new(1, 2, Open1), Edge::new(2, 1, Close1)]).unwrap();
        let w = dyck2_to_hardest_word(&i).unwrap();
        let tokens: Vec<&str> = w.tokens().iter().map(|t| t.token()).collect();
        assert_eq!(tokens, ["V", "o1", "1", "V", "c1", "-", "1"]);
        assert_eq!(decode_hardest_word(&w), i);
        // The word decodes to a no-instance (the alternating cycle).
        assert!(!hardest_membership(w.tokens()));
    }

    #[test]
    fn swapped_endpoints_encode_to_the_same_word() {
        let i =
            Instance::new(2, 1, 2, vec![Edge::new(1, 2, Open1), Edge::new(2, 1, Close1)]).unwrap();
        let swapped =
            Instance::new(2, 2, 1, vec![Edge::new(2, 1, Open1), Edge::new(1, 2, Close1)]).unwrap();
        let w1 = dyck2_to_hardest_word(&i).unwrap();
        let w2 = dyck2_to_hardest_word(&swapped).unwrap();
        assert_eq!(w1, w2);
        assert_eq!(
            crate::solver::decide(&i),
            crate::solver::decide(&decode_hardest_word(&w2))
        );
    }

    #[test]
    fn source_equals_target_is_refused() {
        let i = Instance::new(1, 1, 1, vec![]).unwrap();
        assert_eq!(dyck2_to_hardest_word(&i), Err(EncodeError::SourceEqualsTarget));
        let i = Instance::new(3, 2, 2, vec![]).unwrap();
        assert_eq!(dyck2_to_hardest_word(&i), Err(EncodeError::SourceEqualsTarget));
    }

    #[test]
    fn empty_blocks_are_legal() {
        let i = Instance::new(3, 1, 3, vec![Edge::new(1, 3, Open1)]).unwrap();
        let w = dyck2_to_hardest_word(&i).unwrap();
        assert_eq!(w.blocks()[1], vec![]);
        assert_eq!(w.blocks()[2], vec![]);
        assert_eq!(decode_hardest_word(&w), i);
    }

    #[test]
    fn single_marker_word_is_a_member() {
        let w = HardestWord::from_tokens(vec![HwToken::VertexMarker]).unwrap();
        let i = decode_hardest_word(&w);
        assert_eq!(i, Instance::new(1, 1, 1, vec![]).unwrap());
        assert!(hardest_membership(w.tokens()));
    }

    #[test]
    fn reflection_bounces_off_the_right_endmarker() {
        // Two blocks; block 2 carries "o1 11": two steps right from vertex 2
        // reach the virtual right endmarker and bounce back to 2.
        let toks = vec![
            HwToken::VertexMarker,
            HwToken::VertexMarker,
            HwToken::Bracket(Open1),
            HwToken::One,
            HwToken::One,
        ];
        let w = HardestWord::from_tokens(toks).unwrap();
        let i = decode_hardest_word(&w);
        assert_eq!(i.edges(), &[Edge::new(2, 2, Open1)]);
    }

    #[test]
    fn reflection_bounces_off_the_left_endmarker() {
        // Block 1 carries "c1 -11": two steps left bounce off the left
        // endmarker back to vertex 1.
        let toks = vec![
            HwToken::VertexMarker,
            HwToken::Bracket(Close1),
            HwToken::Minus,
            HwToken::One,
            HwToken::One,
            HwToken::VertexMarker,
        ];
        let w = HardestWord::from_tokens(toks).unwrap();
        let i = decode_hardest_word(&w);
        assert_eq!(i.edges(), &[Edge::new(1, 1, Close1)]);
    }

    #[test]
    fn walk_ending_on_an_endmarker_resolves_to_its_neighbor() {
        // One vertex; offset 3 rightward: 1 -> right marker (reverse) -> 1 ->
        // left marker, resolving to vertex 1.
        assert_eq!(fold_offset(1, 3, 1), 1);
        // One step right from the last vertex stops on the right marker and
        // resolves to that vertex itself.
        assert_eq!(fold_offset(2, 1, 2), 2);
        assert_eq!(fold_offset(1, -1, 2), 1);
        // Plain offsets resolve directly.
        assert_eq!(fold_offset(1, 2, 3), 3);
        assert_eq!(fold_offset(3, -2, 3), 1);
    }

    #[test]
    fn offset_zero_is_a_self_loop() {
        let toks = vec![HwToken::VertexMarker, HwToken::Bracket(Open2)];
        let w = HardestWord::from_tokens(toks).unwrap();
        assert_eq!(decode_hardest_word(&w).edges(), &[Edge::new(1, 1, Open2)]);
    }

    #[test]
    fn malformed_streams_are_non_members() {
        assert!(!hardest_membership(&[HwToken::One]));
        assert!(!hardest_membership(&[]));
        assert!(!hardest_membership(&[
            HwToken::VertexMarker,
            HwToken::Bracket(Open1),
            HwToken::Minus
        ]));
    }
}
