//! Independent brute-force ground truth, used only by tests, the acceptance
//! suite, and the CLI's `oracle` subcommand.
//!
//! These procedures are deliberately naive and structurally unrelated to the
//! solver's fixpoint, so that agreement between the two is evidence rather
//! than tautology.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use crate::model::{BracketLabel, Instance, Pda, PushdownSystem, TwoNpda, Walk};

/// Single left-to-right stack scan for Dyck-2 membership.
pub fn dyck2_word_check(word: &[BracketLabel]) -> bool {
    let mut stack: Vec<BracketLabel> = Vec::new();
    for &l in word {
        if l.is_open() {
            stack.push(l);
        } else {
            match stack.pop() {
                Some(open) if open.matching() == l => {}
                _ => return false,
            }
        }
    }
    stack.is_empty()
}

/// Breadth-first search over `(vertex, bracket stack)` configurations;
/// returns a shortest valid walk from source to target of length at most
/// `max_len` if one exists. A `None` result is *not* a proof of
/// non-reachability.
pub fn bounded_walk_search(instance: &Instance, max_len: usize) -> Option<Walk> {
    // Parent pointers for walk reconstruction.
    type Config = (u32, Vec<BracketLabel>);
    let mut parent: HashMap<Config, Option<(Config, BracketLabel)>> = HashMap::new();
    let start: Config = (instance.source(), Vec::new());
    parent.insert(start.clone(), None);
    let mut frontier = VecDeque::new();
    frontier.push_back((start, 0usize));
    let mut out: HashMap<u32, Vec<(u32, BracketLabel)>> = HashMap::new();
    for e in instance.edges() {
        out.entry(e.from).or_default().push((e.to, e.label));
    }
    let goal: Config = (instance.target(), Vec::new());
    while let Some((config, len)) = frontier.pop_front() {
        if config == goal {
            let mut steps = Vec::new();
            let mut cur = config;
            while let Some(Some((prev, label))) = parent.get(&cur).cloned() {
                steps.push((cur.0, label));
                cur = prev;
            }
            steps.reverse();
            let walk = Walk { start: instance.source(), steps };
            debug_assert!(walk.respects(instance));
            debug_assert!(dyck2_word_check(&walk.label_word()));
            debug_assert_eq!(walk.end(), instance.target());
            return Some(walk);
        }
        if len == max_len {
            continue;
        }
        let (at, ref stack) = config;
        for &(to, label) in out.get(&at).into_iter().flatten() {
            let mut next_stack = stack.clone();
            if label.is_open() {
                next_stack.push(label);
            } else {
                match next_stack.pop() {
                    Some(open) if open.matching() == label => {}
                    _ => continue,
                }
            }
            // An open bracket needs one later step to close.
            if len + 1 + next_stack.len() > max_len {
                continue;
            }
            let next = (to, next_stack);
            if let Entry::Vacant(e) = parent.entry(next.clone()) {
                e.insert(Some((config.clone(), label)));
                frontier.push_back((next, len + 1));
            }
        }
    }
    None
}

/// Verdict of a bounded two-way search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchOutcome {
    Accepts,
    RejectsWithinBounds,
    Inconclusive,
}

/// Breadth-first search over 2NPDA configurations `(state, head, stack)` with
/// the stack capped at `stack_cap` and exploration capped at `config_cap`
/// configurations. `Accepts` means an accepting configuration (a final state
/// scanning the right endmarker with stack exactly the bottom symbol) was
/// reached; `RejectsWithinBounds` means the entire bounded configuration
/// graph was exhausted without truncation.
pub fn bounded_2npda_search(
    m: &TwoNpda,
    word: &[String],
    stack_cap: usize,
    config_cap: usize,
) -> SearchOutcome {
    type Config = (String, usize, Vec<String>);
    // Tape positions 0 and word.len()+1 hold the endmarkers.
    let letter_at = |pos: usize| -> &str {
        if pos == 0 {
            crate::model::LEFT_MARKER
        } else if pos == word.len() + 1 {
            crate::model::RIGHT_MARKER
        } else {
            &word[pos - 1]
        }
    };
    let start: Config = (m.initial_state.clone(), 0, vec![m.bottom.clone()]);
    let mut seen: HashMap<Config, Option<Config>> = HashMap::new();
    seen.insert(start.clone(), None);
    let mut frontier = VecDeque::new();
    frontier.push_back(start);
    let mut truncated = false;
    while let Some(config) = frontier.pop_front() {
        let (ref state, pos, ref stack) = config;
        if m.finals.contains(state) && pos == word.len() + 1 && stack.as_slice() == [m.bottom.clone()] {
            debug_assert!(replay_accepts(m, word, &seen, &config));
            return SearchOutcome::Accepts;
        }
        let letter = letter_at(pos);
        let top = stack.last().expect("stack never empties below the bottom symbol");
        for t in &m.transitions {
            if t.from_state != *state || t.letter != letter || t.pop != *top {
                continue;
            }
            let next_pos = match t.head {
                -1 => {
                    if pos == 0 {
                        continue;
                    }
                    pos - 1
                }
                0 => pos,
                _ => {
                    if pos == word.len() + 1 {
                        continue;
                    }
                    pos + 1
                }
            };
            let mut next_stack = stack.clone();
            next_stack.pop();
            // Push words are written top-first.
            for s in t.push.iter().rev() {
                next_stack.push(s.clone());
            }
            if next_stack.is_empty() {
                continue;
            }
            if next_stack.len() > stack_cap {
                truncated = true;
                continue;
            }
            let next: Config = (t.to_state.clone(), next_pos, next_stack);
            if seen.contains_key(&next) {
                continue;
            }
            if seen.len() >= config_cap {
                truncated = true;
                continue;
            }
            seen.insert(next.clone(), Some(config.clone()));
            frontier.push_back(next);
        }
    }
    if truncated {
        SearchOutcome::Inconclusive
    } else {
        SearchOutcome::RejectsWithinBounds
    }
}

/// Replays the parent chain of an accepting configuration, re-checking every
/// step against the transition relation.
fn replay_accepts(
    m: &TwoNpda,
    word: &[String],
    seen: &HashMap<(String, usize, Vec<String>), Option<(String, usize, Vec<String>)>>,
    accepting: &(String, usize, Vec<String>),
) -> bool {
    let mut chain = vec![accepting.clone()];
    let mut cur = accepting.clone();
    while let Some(Some(prev)) = seen.get(&cur) {
        chain.push(prev.clone());
        cur = prev.clone();
    }
    chain.reverse();
    if chain[0] != (m.initial_state.clone(), 0, vec![m.bottom.clone()]) {
        return false;
    }
    let letter_at = |pos: usize| -> &str {
        if pos == 0 {
            crate::model::LEFT_MARKER
        } else if pos == word.len() + 1 {
            crate::model::RIGHT_MARKER
        } else {
            &word[pos - 1]
        }
    };
    for w in chain.windows(2) {
        let (ref q1, p1, ref s1) = w[0];
        let (ref q2, p2, ref s2) = w[1];
        let ok = m.transitions.iter().any(|t| {
            if t.from_state != *q1 || t.to_state != *q2 || t.letter != letter_at(p1) {
                return false;
            }
            if p2 as isize - p1 as isize != t.head as isize {
                return false;
            }
            if s1.last() != Some(&t.pop) {
                return false;
            }
            let mut expect = s1.clone();
            expect.pop();
            for s in t.push.iter().rev() {
                expect.push(s.clone());
            }
            expect == *s2
        });
        if !ok {
            return false;
        }
    }
    true
}

/// The full set of PDA configurations `(state, stack)` reachable from the
/// initial configuration with stacks capped at `stack_cap`, ignoring input
/// letters. `None` when a cap was hit, i.e. the set is not exhaustive.
/// Stacks are written top-first.
pub fn bounded_pda_configs(
    pda: &Pda,
    stack_cap: usize,
    config_cap: usize,
) -> Option<std::collections::BTreeSet<(String, Vec<String>)>> {
    let start = (pda.initial_state.clone(), vec![pda.bottom.clone()]);
    let mut seen: std::collections::BTreeSet<(String, Vec<String>)> = [start.clone()].into();
    let mut frontier = VecDeque::new();
    frontier.push_back(start);
    while let Some((state, stack)) = frontier.pop_front() {
        let top = stack.last().expect("stack never empties below the bottom symbol");
        for t in &pda.transitions {
            if t.from_state != state || t.pop != *top {
                continue;
            }
            let mut next_stack = stack.clone();
            next_stack.pop();
            for s in t.push.iter().rev() {
                next_stack.push(s.clone());
            }
            if next_stack.is_empty() {
                continue;
            }
            if next_stack.len() > stack_cap {
                return None;
            }
            let next = (t.to_state.clone(), next_stack);
            if seen.insert(next.clone()) {
                if seen.len() > config_cap {
                    return None;
                }
                frontier.push_back(next);
            }
        }
    }
    Some(seen)
}

/// Bounded search over PDA configurations `(state, stack)`, ignoring input
/// letters; this is the run semantics under which PDA emptiness is decided.
/// Returns whether a final state with stack exactly the bottom symbol is
/// reachable, or `None` when a cap was hit before the answer was settled.
pub fn bounded_pda_search(pda: &Pda, stack_cap: usize, config_cap: usize) -> Option<bool> {
    type Config = (String, Vec<String>);
    let start: Config = (pda.initial_state.clone(), vec![pda.bottom.clone()]);
    let mut seen: HashMap<Config, ()> = HashMap::new();
    seen.insert(start.clone(), ());
    let mut frontier = VecDeque::new();
    frontier.push_back(start);
    let mut truncated = false;
    while let Some((state, stack)) = frontier.pop_front() {
        if pda.finals.contains(&state) && stack.as_slice() == [pda.bottom.clone()] {
            return Some(true);
        }
        let top = stack.last().expect("stack never empties below the bottom symbol");
        for t in &pda.transitions {
            if t.from_state != state || t.pop != *top {
                continue;
            }
            let mut next_stack = stack.clone();
            next_stack.pop();
            for s in t.push.iter().rev() {
                next_stack.push(s.clone());
            }
            if next_stack.is_empty() {
                continue;
            }
            if next_stack.len() > stack_cap {
                truncated = true;
                continue;
            }
            let next: Config = (t.to_state.clone(), next_stack);
            if seen.contains_key(&next) {
                continue;
            }
            if seen.len() >= config_cap {
                truncated = true;
                continue;
            }
            seen.insert(next.clone(), ());
            frontier.push_back(next);
        }
    }
    if truncated {
        None
    } else {
        Some(false)
    }
}

/// All configurations `(state, stack)` with `|stack| <= depth` from which the
/// bounded configuration graph (stacks capped at `stack_cap`) can reach a
/// configuration accepted by `accepts`. Computed as a backward fixpoint over
/// the explicitly enumerated bounded graph.
pub fn bounded_pds_reaching(
    pds: &PushdownSystem,
    accepts: &dyn Fn(&str, &[String]) -> bool,
    depth: usize,
    stack_cap: usize,
) -> Vec<(String, Vec<String>)> {
    // Enumerate all configurations with stack length <= cap.
    let symbols: Vec<&String> = pds.stack_alphabet().iter().collect();
    let mut stacks: Vec<Vec<String>> = vec![Vec::new()];
    let mut by_len: Vec<Vec<Vec<String>>> = vec![vec![Vec::new()]];
    for len in 1..=stack_cap {
        let mut next = Vec::new();
        for st in &by_len[len - 1] {
            for s in &symbols {
                let mut x = st.clone();
                x.push((*s).clone());
                next.push(x);
            }
        }
        stacks.extend(next.iter().cloned());
        by_len.push(next);
    }
    let mut reaching: HashMap<(String, Vec<String>), bool> = HashMap::new();
    let mut worklist = VecDeque::new();
    for q in pds.states() {
        for st in &stacks {
            if accepts(q, st) {
                reaching.insert((q.clone(), st.clone()), true);
                worklist.push_back((q.clone(), st.clone()));
            }
        }
    }
    // Configurations are written top-first: (q, [A, B]) has A on top.
    while let Some((q, st)) = worklist.pop_front() {
        for rule in pds.rules() {
            if rule.to_state != q {
                continue;
            }
            // Predecessor via this rule: stack must start with the pushed word.
            if st.len() < rule.push.len() || st[..rule.push.len()] != rule.push[..] {
                continue;
            }
            let mut pred_stack = vec![rule.pop.clone()];
            pred_stack.extend_from_slice(&st[rule.push.len()..]);
            if pred_stack.len() > stack_cap {
                continue;
            }
            let pred = (rule.from_state.clone(), pred_stack);
            if reaching.insert(pred.clone(), true) != Some(true) {
                worklist.push_back(pred);
            }
        }
    }
    let mut out: Vec<(String, Vec<String>)> = reaching
        .into_keys()
        .filter(|(_, st)| st.len() <= depth && !st.is_empty())
        .collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Edge;
    use BracketLabel::*;

    #[test]
    fn word_check_basics() {
        assert!(dyck2_word_check(&[]));
        assert!(dyck2_word_check(&[Open1, Open2, Close2, Close1]));
        assert!(!dyck2_word_check(&[Open1, Close2]));
        assert!(!dyck2_word_check(&[Open1]));
        assert!(!dyck2_word_check(&[Close1, Open1]));
    }

    /// Dyck-2 membership derived from the grammar `S -> SS | o1 S c1 | o2 S c2 | eps`
    /// by CYK-style interval filling, exhaustively compared on all short words.
    #[test]
    fn word_check_agrees_with_grammar_on_short_words() {
        fn grammar_accepts(word: &[BracketLabel]) -> bool {
            let n = word.len();
            if n == 0 {
                return true;
            }
            // s[i][j] = S derives word[i..j].
            let mut s = vec![vec![false; n + 1]; n + 1];
            for i in 0..=n {
                s[i][i] = true;
            }
            // Interval DP over increasing lengths.
            for len in 2..=n {
                for i in 0..=n - len {
                    let j = i + len;
                    let wrapped = word[i].is_open()
                        && word[j - 1] == word[i].matching()
                        && s[i + 1][j - 1];
                    let split = (i + 1..j).any(|k| s[i][k] && s[k][j]);
                    s[i][j] = wrapped || split;
                }
            }
            s[0][n]
        }
        // All words of length <= 6 (4^6 = 4096 at the top size).
        for len in 0..=6usize {
            for code in 0..4usize.pow(len as u32) {
                let mut word = Vec::with_capacity(len);
                let mut c = code;
                for _ in 0..len {
                    word.push(BracketLabel::ALL[c % 4]);
                    c /= 4;
                }
                assert_eq!(dyck2_word_check(&word), grammar_accepts(&word), "{word:?}");
            }
        }
    }

    #[test]
    fn walk_search_finds_shortest() {
        let i = Instance::new(
            3,
            1,
            3,
            vec![Edge::new(1, 2, Open1), Edge::new(2, 3, Close1)],
        )
        .unwrap();
        let w = bounded_walk_search(&i, 4).unwrap();
        assert_eq!(w.start, 1);
        assert_eq!(w.steps, vec![(2, Open1), (3, Close1)]);
    }

    #[test]
    fn walk_search_trivial_and_negative() {
        let i = Instance::new(2, 1, 1, vec![]).unwrap();
        let w = bounded_walk_search(&i, 0).unwrap();
        assert!(w.is_empty());
        // Alternating two-cycle: every 1 -> 2 walk has odd length, hence unbalanced.
        let i = Instance::new(
            2,
            1,
            2,
            vec![Edge::new(1, 2, Open1), Edge::new(2, 1, Close1)],
        )
        .unwrap();
        assert!(bounded_walk_search(&i, 10).is_none());
    }

    fn right_mover() -> TwoNpda {
        use std::collections::BTreeSet;
        let states: BTreeSet<String> = ["q"].iter().map(|s| s.to_string()).collect();
        let input: BTreeSet<String> = ["<", ">", "a", "b"].iter().map(|s| s.to_string()).collect();
        let stack: BTreeSet<String> = ["Z0"].iter().map(|s| s.to_string()).collect();
        let t = |letter: &str| crate::model::PdaTransition {
            from_state: "q".into(),
            letter: letter.into(),
            pop: "Z0".into(),
            to_state: "q".into(),
            push: vec!["Z0".into()],
            head: 1,
        };
        TwoNpda::new(
            states.clone(),
            input,
            stack,
            "q".into(),
            "Z0".into(),
            states,
            vec![t("<"), t("a"), t("b")],
        )
        .unwrap()
    }

    #[test]
    fn npda_search_accepts_right_mover() {
        let m = right_mover();
        let w: Vec<String> = vec!["a".into(), "b".into()];
        assert_eq!(bounded_2npda_search(&m, &w, 8, 100_000), SearchOutcome::Accepts);
    }

    #[test]
    fn npda_search_rejects_transitionless() {
        let mut m = right_mover();
        m.transitions.clear();
        m.finals.clear();
        let w: Vec<String> = vec!["a".into()];
        assert_eq!(bounded_2npda_search(&m, &w, 8, 100_000), SearchOutcome::RejectsWithinBounds);
    }

    #[test]
    fn npda_search_inconclusive_on_stack_hungry_machine() {
        use std::collections::BTreeSet;
        let states: BTreeSet<String> = ["q"].iter().map(|s| s.to_string()).collect();
        let input: BTreeSet<String> = ["<", ">", "a"].iter().map(|s| s.to_string()).collect();
        let stack: BTreeSet<String> = ["Z0", "A"].iter().map(|s| s.to_string()).collect();
        let push_on = |pop: &str, push: Vec<&str>| crate::model::PdaTransition {
            from_state: "q".into(),
            letter: "<".into(),
            pop: pop.into(),
            to_state: "q".into(),
            push: push.into_iter().map(String::from).collect(),
            head: 0,
        };
        let m = TwoNpda::new(
            states,
            input,
            stack,
            "q".into(),
            "Z0".into(),
            BTreeSet::new(),
            vec![push_on("Z0", vec!["A", "Z0"]), push_on("A", vec!["A", "A"])],
        )
        .unwrap();
        let w: Vec<String> = vec!["a".into()];
        assert_eq!(bounded_2npda_search(&m, &w, 2, 100_000), SearchOutcome::Inconclusive);
    }
}
