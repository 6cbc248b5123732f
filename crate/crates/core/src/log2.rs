//! The O(log² n)-space solver: criticality checks over light children,
//! largest child last, with the heavy descent as a tail call.

use crate::meter::WorkspaceMeter;
use crate::tree::RootedTree;
use crate::{bits_for_range, log_bits, Colour, Instance, Result};

/// Counters collected during one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Log2Stats {
    /// Deepest nesting of light-child recursions.
    pub max_depth: usize,
    pub heavy_descents: u64,
    /// Largest change in persistent bits across a heavy descent; 0 when the
    /// tail-call discipline holds.
    pub tail_growth: u64,
    pub calls: u64,
}

pub fn solve_log2(inst: &Instance, meter: &mut WorkspaceMeter) -> Result<bool> {
    solve_log2_stats(inst, meter).map(|(b, _)| b)
}

pub fn solve_log2_stats(inst: &Instance, meter: &mut WorkspaceMeter) -> Result<(bool, Log2Stats)> {
    inst.require_tree()?;
    let tree = RootedTree::new(&inst.graph)?;
    let mut s = Log2Solver::new(inst, &tree, meter);
    let answer = s.solve(tree.root(), 0);
    Ok((answer, s.stats))
}

/// Can `T_v` be list-coloured with `v` avoiding the colour at position `p`
/// of `L(v)`? Position 0 means no constraint.
pub fn solve_subtree(
    inst: &Instance,
    tree: &RootedTree,
    v: usize,
    p: u64,
    meter: &mut WorkspaceMeter,
) -> bool {
    Log2Solver::new(inst, tree, meter).solve(v, p)
}

struct Log2Solver<'a> {
    inst: &'a Instance,
    tree: &'a RootedTree,
    meter: &'a mut WorkspaceMeter,
    vertex_bits: u64,
    pos_bits: u64,
    depth: usize,
    stats: Log2Stats,
}

impl<'a> Log2Solver<'a> {
    fn new(inst: &'a Instance, tree: &'a RootedTree, meter: &'a mut WorkspaceMeter) -> Self {
        let n = inst.n() as u64;
        Log2Solver {
            inst,
            tree,
            meter,
            vertex_bits: bits_for_range(n),
            pos_bits: log_bits(n),
            depth: 0,
            stats: Log2Stats::default(),
        }
    }

    /// Next light child of `v` after `prev` in (subtree size, index) order.
    fn next_light(&self, v: usize, prev: Option<usize>) -> Option<usize> {
        let key = |c: usize| (self.tree.size(c), c);
        self.tree
            .light_children(v)
            .filter(|&c| prev.is_none_or(|p| key(c) > key(p)))
            .min_by_key(|&c| key(c))
    }

    /// Light recursion: saves `(a, u, c')` and one unary depth bit.
    fn recurse(&mut self, u: usize, q: u64) -> bool {
        let saved = self.meter.push_frame("saved(a,u,c')", 2 * self.pos_bits + self.vertex_bits + 1);
        self.depth += 1;
        self.stats.max_depth = self.stats.max_depth.max(self.depth);
        let ok = self.solve(u, q);
        self.depth -= 1;
        self.meter.pop_frame(saved);
        ok
    }

    fn solve(&mut self, v: usize, p: u64) -> bool {
        let call = self.meter.push_frame("call(v,p)", self.vertex_bits + self.pos_bits);
        self.meter.enter_call();
        // child cursor, list cursor, position lookup
        let scratch = 3 * log_bits(self.inst.n() as u64);
        self.meter.charge_scratch(scratch);
        let answer = self.solve_loop(v, p);
        self.meter.release_scratch(scratch);
        self.meter.exit_call();
        self.meter.pop_frame(call);
        answer
    }

    fn solve_loop(&mut self, mut v: usize, mut p: u64) -> bool {
        loop {
            self.stats.calls += 1;
            let before = self.meter.current_persistent();
            let lists = &self.inst.lists;
            let c: Option<Colour> = lists.at(v, p);
            let usable = lists.len_of(v) - usize::from(c.is_some());
            let heavy = self.tree.heavy_child(v);
            let mut u = None;
            while let Some(w) = self.next_light(v, u) {
                if !self.recurse(w, 0) {
                    return false;
                }
                u = Some(w);
            }
            let next_p;
            if usable > self.tree.children(v).len() {
                next_p = 0;
            } else {
                let mut first: Option<Colour> = None;
                let mut second = false;
                for idx in 0..lists.len_of(v) {
                    let a = lists.get(v)[idx];
                    if Some(a) == c {
                        continue;
                    }
                    let mut works = true;
                    let mut u = None;
                    while let Some(w) = self.next_light(v, u) {
                        if !self.recurse(w, lists.position(w, a)) {
                            works = false;
                            break;
                        }
                        u = Some(w);
                    }
                    if !works {
                        continue;
                    }
                    if first.is_none() {
                        first = Some(a);
                    } else {
                        second = true;
                        break;
                    }
                }
                match (first, second) {
                    (None, _) => return false,
                    (Some(_), true) => next_p = 0,
                    (Some(a), false) => match heavy {
                        Some(h) => next_p = lists.position(h, a),
                        None => return true,
                    },
                }
            }
            let Some(h) = heavy else {
                return true;
            };
            // free everything but the call register and descend
            let growth = self.meter.current_persistent().abs_diff(before);
            self.stats.tail_growth = self.stats.tail_growth.max(growth);
            self.stats.heavy_descents += 1;
            v = h;
            p = next_p;
        }
    }
}
