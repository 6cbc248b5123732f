//! Path decompositions: the traversal-stack decomposition of a tree, the
//! nicifying transducer, a validator, and a solver over nice decompositions.

use std::fmt::Write as _;

use crate::meter::WorkspaceMeter;
use crate::tree::RootedTree;
use crate::{bits_for_range, log_bits, Error, Graph, Instance, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Event {
    Introduce(usize),
    Forget(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathDecomposition {
    pub bags: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NicePathDecomposition {
    pub events: Vec<Event>,
}

impl NicePathDecomposition {
    /// The bag after every event.
    pub fn bags(&self) -> Vec<Vec<usize>> {
        let mut bag: Vec<usize> = Vec::new();
        let mut out = Vec::with_capacity(self.events.len());
        for e in &self.events {
            match *e {
                Event::Introduce(v) => bag.push(v),
                Event::Forget(v) => bag.retain(|&u| u != v),
            }
            out.push(bag.clone());
        }
        out
    }

    pub fn max_bag_size(&self) -> usize {
        let mut size = 0usize;
        let mut best = 0;
        for e in &self.events {
            match e {
                Event::Introduce(_) => {
                    size += 1;
                    best = best.max(size);
                }
                Event::Forget(_) => size = size.saturating_sub(1),
            }
        }
        best
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            let _ = match e {
                Event::Introduce(v) => writeln!(out, "I {}", v + 1),
                Event::Forget(v) => writeln!(out, "F {}", v + 1),
            };
        }
        out
    }
}

/// Pull-based event stream: unfinished ancestors plus the current vertex
/// form the bag; light children in natural order, the heavy child last.
pub struct PdEvents<'a> {
    tree: &'a RootedTree,
    /// `(vertex, index of the next child to enter)`.
    stack: Vec<(usize, usize)>,
    pending: Option<Event>,
    started: bool,
}

impl<'a> PdEvents<'a> {
    /// `i`-th child of `v` with the heavy child moved to the end.
    fn ordered_child(&self, v: usize, i: usize) -> usize {
        let kids = self.tree.children(v);
        let h = self.tree.heavy_child(v).expect("inner vertex");
        let hr = self.tree.child_rank(h);
        if i + 1 == kids.len() {
            h
        } else if i < hr {
            kids[i]
        } else {
            kids[i + 1]
        }
    }
}

impl Iterator for PdEvents<'_> {
    type Item = Event;

    fn next(&mut self) -> Option<Event> {
        if let Some(e) = self.pending.take() {
            return Some(e);
        }
        if !self.started {
            self.started = true;
            if self.tree.n() == 0 {
                return None;
            }
            self.stack.push((self.tree.root(), 0));
            return Some(Event::Introduce(self.tree.root()));
        }
        let &(v, i) = self.stack.last()?;
        let deg = self.tree.children(v).len();
        if deg == 0 {
            self.stack.pop();
            return Some(Event::Forget(v));
        }
        let c = self.ordered_child(v, i);
        if i + 1 < deg {
            self.stack.last_mut().expect("nonempty").1 += 1;
        } else {
            self.stack.pop();
            self.pending = Some(Event::Forget(v));
        }
        self.stack.push((c, 0));
        Some(Event::Introduce(c))
    }
}

pub fn build_path_decomposition(tree: &RootedTree) -> PdEvents<'_> {
    PdEvents {
        tree,
        stack: Vec::new(),
        pending: None,
        started: false,
    }
}

pub fn tree_decomposition(tree: &RootedTree) -> NicePathDecomposition {
    NicePathDecomposition {
        events: build_path_decomposition(tree).collect(),
    }
}

/// Forget-then-introduce between consecutive bags, leading introduces,
/// trailing forgets.
pub fn nicify(pd: &PathDecomposition, n: usize) -> Result<NicePathDecomposition> {
    check_runs(pd, n)?;
    let mut events = Vec::new();
    let empty = Vec::new();
    let mut prev: &Vec<usize> = &empty;
    for bag in pd.bags.iter().chain(std::iter::once(&empty)) {
        for &v in prev {
            if !bag.contains(&v) {
                events.push(Event::Forget(v));
            }
        }
        for &v in bag {
            if !prev.contains(&v) {
                events.push(Event::Introduce(v));
            }
        }
        prev = bag;
    }
    Ok(NicePathDecomposition { events })
}

fn check_runs(pd: &PathDecomposition, n: usize) -> Result<()> {
    let mut first = vec![usize::MAX; n];
    let mut last = vec![0; n];
    let mut count = vec![0usize; n];
    for (i, bag) in pd.bags.iter().enumerate() {
        for &v in bag {
            if v >= n {
                return Err(Error::Decomposition(format!("bag {} holds vertex {} > {n}", i + 1, v + 1)));
            }
            if first[v] == usize::MAX {
                first[v] = i;
            }
            last[v] = i;
            count[v] += 1;
        }
    }
    for v in 0..n {
        if first[v] == usize::MAX {
            return Err(Error::Decomposition(format!("vertex {} in no bag", v + 1)));
        }
        if last[v] - first[v] + 1 != count[v] {
            return Err(Error::Decomposition(format!("bags of vertex {} are not contiguous", v + 1)));
        }
    }
    Ok(())
}

/// Checks edge coverage and contiguity of a plain path decomposition;
/// returns its width.
pub fn validate_path_decomposition(graph: &Graph, pd: &PathDecomposition) -> Result<usize> {
    check_runs(pd, graph.n())?;
    for &(u, v) in graph.edges() {
        if !pd.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
            return Err(Error::Decomposition(format!("edge {} {} in no bag", u + 1, v + 1)));
        }
    }
    Ok(pd.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1))
}

/// Checks that every vertex is introduced once and later forgotten once,
/// that the stream ends empty, and that every edge sits in some bag.
/// Returns the maximum bag size.
pub fn validate_nice(graph: &Graph, npd: &NicePathDecomposition) -> Result<usize> {
    let n = graph.n();
    let mut state = vec![0u8; n]; // 0 new, 1 in bag, 2 forgotten
    let mut covered = vec![false; graph.edges().len()];
    let mut edge_index = std::collections::HashMap::with_capacity(graph.edges().len());
    for (i, &(u, v)) in graph.edges().iter().enumerate() {
        edge_index.insert((u.min(v), u.max(v)), i);
    }
    let mut size = 0usize;
    let mut best = 0usize;
    for e in &npd.events {
        match *e {
            Event::Introduce(v) => {
                if v >= n || state[v] != 0 {
                    return Err(Error::Decomposition(format!("vertex {} introduced twice or out of range", v + 1)));
                }
                state[v] = 1;
                size += 1;
                best = best.max(size);
                for &u in graph.neighbours(v) {
                    if state[u] == 1 {
                        covered[edge_index[&(u.min(v), u.max(v))]] = true;
                    }
                }
            }
            Event::Forget(v) => {
                if v >= n || state[v] != 1 {
                    return Err(Error::Decomposition(format!("vertex {} forgotten while not in the bag", v + 1)));
                }
                state[v] = 2;
                size -= 1;
            }
        }
    }
    if let Some(v) = state.iter().position(|&s| s != 2) {
        return Err(Error::Decomposition(format!("vertex {} not introduced and forgotten", v + 1)));
    }
    if let Some(i) = covered.iter().position(|&c| !c) {
        let (u, v) = graph.edges()[i];
        return Err(Error::Decomposition(format!("edge {} {} in no bag", u + 1, v + 1)));
    }
    Ok(best)
}

pub fn parse_events(text: &str) -> Result<NicePathDecomposition> {
    let mut events = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let kind = parts.next().unwrap_or("");
        let v: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .filter(|&v: &usize| v >= 1)
            .ok_or_else(|| Error::Syntax { line: i + 1, msg: format!("bad event {line:?}") })?;
        events.push(match kind {
            "I" => Event::Introduce(v - 1),
            "F" => Event::Forget(v - 1),
            _ => return Err(Error::Syntax { line: i + 1, msg: format!("bad event {line:?}") }),
        });
    }
    Ok(NicePathDecomposition { events })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathwidthOutcome {
    pub answer: bool,
    /// Bits of the slot registers plus the bag pointer.
    pub register_bits: u64,
    /// Peak of the backtracking choice stack (determinization overhead).
    pub choice_stack_peak: u64,
    pub max_bag: usize,
}

/// Solves by depth-first backtracking over per-slot list positions
/// `1..=min(Δ+1, |L(v)|)`, chosen at Introduce and checked against the
/// bag at Introduce and Forget.
pub fn solve_via_pathdecomp(
    inst: &Instance,
    npd: &NicePathDecomposition,
    meter: &mut WorkspaceMeter,
) -> Result<PathwidthOutcome> {
    let max_bag = validate_nice(&inst.graph, npd)?;
    let n = inst.n();
    let delta = inst.graph.max_degree() as u64;
    let slot_bits = bits_for_range(delta + 2);
    let register_bits = max_bag as u64 * slot_bits + log_bits(npd.events.len() as u64);
    let regs = meter.push_frame("slots+pointer", register_bits);
    meter.enter_call();
    // neighbour scan, position lookup
    let scratch = 3 * log_bits(n as u64);
    meter.charge_scratch(scratch);

    let mut choices = WorkspaceMeter::new(n);
    let mut choice_frames = Vec::new();
    let cap = |v: usize| (delta + 1).min(inst.lists.len_of(v) as u64);
    // position held by every vertex currently in the bag (0 = empty slot)
    let mut pos = vec![0u64; n];
    let mut in_bag = vec![false; n];
    let colour = |v: usize, p: u64| inst.lists.at(v, p).expect("position within list");
    let conflicts = |v: usize, p: u64, pos: &[u64], in_bag: &[bool]| {
        let c = colour(v, p);
        inst.graph
            .neighbours(v)
            .iter()
            .any(|&u| in_bag[u] && pos[u] != 0 && colour(u, pos[u]) == c)
    };
    let events = &npd.events;
    let mut i = 0usize;
    // next position to try when (re)entering an Introduce
    let mut resume = 1u64;
    let answer = loop {
        if i == events.len() {
            break true;
        }
        let advanced = match events[i] {
            Event::Introduce(v) => {
                let mut p = resume;
                while p <= cap(v) && conflicts(v, p, &pos, &in_bag) {
                    p += 1;
                }
                if p <= cap(v) {
                    pos[v] = p;
                    in_bag[v] = true;
                    choice_frames.push(choices.push_frame("choice", slot_bits));
                    true
                } else {
                    false
                }
            }
            Event::Forget(v) => {
                if conflicts(v, pos[v], &pos, &in_bag) {
                    false
                } else {
                    in_bag[v] = false;
                    true
                }
            }
        };
        if advanced {
            i += 1;
            resume = 1;
            continue;
        }
        // back up to the latest Introduce and try its next position
        let mut found = false;
        while i > 0 {
            i -= 1;
            match events[i] {
                Event::Forget(u) => in_bag[u] = true,
                Event::Introduce(u) => {
                    in_bag[u] = false;
                    resume = pos[u] + 1;
                    pos[u] = 0;
                    choices.pop_frame(choice_frames.pop().expect("one frame per introduce"));
                    found = true;
                    break;
                }
            }
        }
        if !found {
            break false;
        }
    };
    while let Some(f) = choice_frames.pop() {
        choices.pop_frame(f);
    }
    meter.release_scratch(scratch);
    meter.exit_call();
    meter.pop_frame(regs);
    Ok(PathwidthOutcome {
        answer,
        register_bits,
        choice_stack_peak: choices.peak_report().peak_persistent,
        max_bag,
    })
}

/// Builds the tree decomposition and solves over it.
pub fn solve_pathwidth(inst: &Instance, meter: &mut WorkspaceMeter) -> Result<PathwidthOutcome> {
    inst.require_tree()?;
    let tree = RootedTree::new(&inst.graph)?;
    solve_via_pathdecomp(inst, &tree_decomposition(&tree), meter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{parse_instance, random_instance};
    use crate::oracle::{brute_force_solve, BruteConfig};

    fn tree_of(n: usize, edges: Vec<(usize, usize)>) -> (Graph, RootedTree) {
        let g = Graph::new(n, edges).unwrap();
        let t = RootedTree::new(&g).unwrap();
        (g, t)
    }

    #[test]
    fn p3_bags() {
        let (g, t) = tree_of(3, vec![(0, 1), (1, 2)]);
        let npd = tree_decomposition(&t);
        assert_eq!(validate_nice(&g, &npd).unwrap(), 2);
        let bags = npd.bags();
        assert_eq!(bags[0], vec![0]);
        assert_eq!(bags[1], vec![0, 1]);
        assert!(bags.contains(&vec![1, 2]));
    }

    #[test]
    fn complete_binary_and_star() {
        let (g, t) = tree_of(7, (1..7).map(|i| ((i - 1) / 2, i)).collect());
        assert!(validate_nice(&g, &tree_decomposition(&t)).unwrap() <= 3);
        let (g, t) = tree_of(10, (1..10).map(|i| (0, i)).collect());
        assert_eq!(validate_nice(&g, &tree_decomposition(&t)).unwrap(), 2);
    }

    #[test]
    fn nicify_transcription() {
        let pd = PathDecomposition { bags: vec![vec![0, 1], vec![1, 2]] };
        let npd = nicify(&pd, 3).unwrap();
        use Event::*;
        assert_eq!(
            npd.events,
            vec![Introduce(0), Introduce(1), Forget(0), Introduce(2), Forget(1), Forget(2)]
        );
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(validate_path_decomposition(&g, &pd).unwrap(), 1);
        assert_eq!(validate_nice(&g, &npd).unwrap(), 2);
        let bad = PathDecomposition { bags: vec![vec![0], vec![1], vec![0, 2]] };
        assert!(nicify(&bad, 3).is_err());
    }

    #[test]
    fn nicify_of_nice_bags_is_equivalent() {
        for seed in 0..100 {
            let inst = random_instance(1 + seed as usize % 40, 0, seed);
            let t = RootedTree::new(&inst.graph).unwrap();
            let npd = tree_decomposition(&t);
            let pd = PathDecomposition {
                bags: npd.bags().into_iter().filter(|b| !b.is_empty()).collect(),
            };
            let again = nicify(&pd, inst.n()).unwrap();
            assert_eq!(validate_nice(&inst.graph, &again).unwrap(), npd.max_bag_size());
            assert_eq!(again.bags().into_iter().filter(|b| !b.is_empty()).collect::<Vec<_>>(), pd.bags);
        }
    }

    #[test]
    fn event_text_roundtrip() {
        let (_, t) = tree_of(4, vec![(0, 1), (1, 2), (1, 3)]);
        let npd = tree_decomposition(&t);
        assert_eq!(parse_events(&npd.to_text()).unwrap(), npd);
    }

    #[test]
    fn p2_rejects() {
        let inst = parse_instance("2 1\n1 2\n1 1\n1 1\n").unwrap();
        let mut m = WorkspaceMeter::new(2);
        assert!(!solve_pathwidth(&inst, &mut m).unwrap().answer);
        assert_eq!(m.current_persistent(), 0);
    }

    #[test]
    fn agrees_with_brute() {
        for seed in 0..2000u64 {
            let inst = random_instance(1 + (seed as usize % 9), 1 + (seed as usize % 4), seed);
            let mut m = WorkspaceMeter::new(inst.n());
            let out = solve_pathwidth(&inst, &mut m).unwrap();
            let expect = brute_force_solve(&inst, BruteConfig::default()).unwrap().is_some();
            assert_eq!(out.answer, expect, "seed {seed}");
            let delta = inst.graph.max_degree() as u64;
            assert!(out.register_bits <= out.max_bag as u64 * bits_for_range(delta + 2) + log_bits(2 * inst.n() as u64));
        }
    }

    #[test]
    fn mismatched_decomposition_rejected() {
        let inst = parse_instance("3 2\n1 2\n2 3\n1 1\n1 2\n1 1\n").unwrap();
        let npd = NicePathDecomposition {
            events: vec![Event::Introduce(0), Event::Forget(0)],
        };
        let mut m = WorkspaceMeter::new(3);
        assert!(matches!(solve_via_pathdecomp(&inst, &npd, &mut m), Err(Error::Decomposition(_))));
    }
}
