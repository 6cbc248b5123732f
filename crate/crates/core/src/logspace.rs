//! The O(log n)-space solver.
//!
//! A colour of `v` is never stored as a colour. It is a position `p_j` in
//! an implicit list `L_j(v)`: `L_M(v) = L(v)`, and `L_j(v)` for `j < M`
//! keeps the colours of `L(v)` that every light subtree of `v` in brackets
//! `j+1..=M` can avoid at its root. Moving from `p_j` to `p_{j+1}` re-probes
//! the bracket-`(j+1)` subtrees, so a position in a low list needs few bits.
//!
//! Each call to `process` owns a register block `(pos, p)`; before every
//! recursive or same-depth call the caller's counters are pushed as a saved
//! tuple. Host recursion carries control flow only: every value that must
//! survive a call is charged to the meter with its declared width.

use crate::meter::WorkspaceMeter;
use crate::tree::{BracketParams, RootedTree};
use crate::{bits_for_range, log_bits, Instance, Result};

/// A colour restriction handed to a vertex: avoid the colour at position
/// `pos` of `L_level(parent)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    None,
    At { level: usize, pos: u64 },
}

/// Outcome of one step of `process` at an inner vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transition {
    Rej,
    /// Two usable colours: descend with no constraint.
    Nc,
    /// One usable colour, at position `p0` of `L_0(v)`: descend with `(0, p0)`.
    Cr(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepResult {
    Leaf(bool),
    Inner(Transition),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Adv {
    Pos(u64),
    Exhausted,
    NonCritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CallKind {
    Recursive,
    SameDepth,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LogStats {
    /// Largest recursion depth `r` reached (the root call is depth 0).
    pub max_r: usize,
    /// Largest `aux_r` segment seen when a call starts on a light child.
    pub max_aux_bits: u64,
    /// `max aux_r / 2^(j'+1)` over calls on bracket-`j'` children.
    pub aux_ratio: f64,
    /// Longest run of nested same-depth calls.
    pub max_same_depth_run: usize,
    /// `max level bits / log₂(n_w / n_u)` over recursive calls from a level
    /// rooted at `w` into a subtree `T_u`.
    pub overhead_ratio: f64,
    pub process_calls: u64,
    pub transitions: u64,
}

pub fn solve_log(inst: &Instance, meter: &mut WorkspaceMeter) -> Result<bool> {
    solve_log_stats(inst, meter).map(|(b, _)| b)
}

pub fn solve_log_stats(inst: &Instance, meter: &mut WorkspaceMeter) -> Result<(bool, LogStats)> {
    inst.require_tree()?;
    let tree = RootedTree::new(&inst.graph)?;
    let mut s = LogSolver::new(inst, &tree, meter);
    let answer = s.process(tree.root(), Constraint::None, CallKind::Recursive, 0);
    Ok((answer, s.stats))
}

/// Runs steps 0-3 once at `v` under `constraint` and reports the transition.
/// A constraint `At { level, pos }` refers to `L_level` of `v`'s parent.
pub fn classify(
    inst: &Instance,
    tree: &RootedTree,
    v: usize,
    constraint: Constraint,
    meter: &mut WorkspaceMeter,
) -> StepResult {
    let mut s = LogSolver::new(inst, tree, meter);
    s.r = 0;
    s.aux = vec![0];
    s.level_base = vec![0];
    let code_len = s.pos_len(v, v);
    let ctx = Ctx {
        code_len,
        prev_code_len: code_len,
        anchor_len: 0,
        regs_bits: 0,
    };
    s.step(v, constraint, &ctx)
}

/// Position of the `pos`-th colour of `L_level(v)` in `L(v)`, by chaining;
/// `None` when that position does not exist.
pub fn implicit_position(
    inst: &Instance,
    tree: &RootedTree,
    v: usize,
    level: usize,
    pos: u64,
    meter: &mut WorkspaceMeter,
) -> Option<u64> {
    let mut s = LogSolver::new(inst, tree, meter);
    s.aux = vec![0];
    s.level_base = vec![0];
    let code_len = s.pos_len(v, v);
    let opts = ChainOpts {
        trigger: false,
        kind: CallKind::Recursive,
        anchor_len: code_len,
        extra_bits: 0,
        regs_bits: 0,
    };
    let m = tree.bracket_params(v).m;
    match s.chain(v, level.min(m), m, pos, opts) {
        Adv::Pos(p) if p as usize <= inst.lists.len_of(v) => Some(p),
        _ => None,
    }
}

/// Per-invocation addressing state, used only to size registers.
struct Ctx {
    code_len: u64,
    prev_code_len: u64,
    /// Code length of the parent of `w` within its own level.
    anchor_len: u64,
    regs_bits: u64,
}

#[derive(Clone, Copy)]
struct ChainOpts {
    trigger: bool,
    kind: CallKind,
    anchor_len: u64,
    /// Bits of other live counters saved alongside each probe.
    extra_bits: u64,
    /// Register block of the current invocation (moved to aux on a
    /// same-depth call).
    regs_bits: u64,
}

const TAG_BITS: u64 = 2;

struct LogSolver<'a> {
    inst: &'a Instance,
    tree: &'a RootedTree,
    meter: &'a mut WorkspaceMeter,
    r: usize,
    /// Bits in `aux_r` for every open level.
    aux: Vec<u64>,
    same_depth_run: usize,
    /// Persistent bits at the start of each level.
    level_base: Vec<u64>,
    stats: LogStats,
    scratch_bits: u64,
}

fn pow2_pow2_sat(j: usize) -> u128 {
    if j >= 7 {
        u128::MAX
    } else {
        1u128 << (1u32 << j)
    }
}

impl<'a> LogSolver<'a> {
    fn new(inst: &'a Instance, tree: &'a RootedTree, meter: &'a mut WorkspaceMeter) -> Self {
        // heavy-child search, bracket tests, decoding pos, list lookups
        let scratch_bits = 8 * log_bits(inst.n() as u64);
        LogSolver {
            inst,
            tree,
            meter,
            r: 0,
            aux: Vec::new(),
            same_depth_run: 0,
            level_base: Vec::new(),
            stats: LogStats::default(),
            scratch_bits,
        }
    }

    fn m_of(&self, v: usize) -> usize {
        self.tree.bracket_params(v).m
    }

    /// Width of a position register into `L_level(v)` holding `value`.
    fn pos_bits(&self, v: usize, level: usize, value: u64) -> u64 {
        let m = self.m_of(v);
        let declared = if level < m {
            let range = pow2_pow2_sat(level).saturating_add(4);
            bits_for_range(range.min(u64::MAX as u128) as u64)
        } else {
            bits_for_range(self.inst.lists.len_of(v) as u64 + 2)
        };
        declared.max(log_bits(value))
    }

    fn constraint_bits(&self, v: usize, c: Constraint) -> u64 {
        match (c, self.tree.parent(v)) {
            (Constraint::At { level, pos }, Some(p)) => 1 + (level as u64 + 1) + self.pos_bits(p, level, pos),
            _ => 1,
        }
    }

    /// Length of `pos(w, i)` for the heavy-path vertex `u = h(w, i)`.
    fn pos_len(&self, w: usize, u: usize) -> u64 {
        let bp = self.tree.bracket_params(w);
        let class = match self.tree.largest_light(u) {
            0 => bp.m + 1,
            t => bp.bracket_index(t).expect("light subtree below half"),
        };
        class as u64 + 1 + (1u64 << class.min(63))
    }

    /// Bits of the `(j, ℓ)` suffix addressing light child `u` of its parent.
    fn child_addr_bits(&self, u: usize) -> u64 {
        let Some(p) = self.tree.parent(u) else {
            return 0;
        };
        let b = self.tree.child_bracket(p, u);
        let count = self.tree.light_children_in_bracket(p, b).count() as u64;
        b as u64 + 1 + bits_for_range(count + 1)
    }

    fn bracket_children(&self, v: usize, j: usize) -> Vec<usize> {
        self.tree.light_children_in_bracket(v, j).collect()
    }

    fn process(&mut self, v0: usize, mut con: Constraint, kind: CallKind, anchor_len: u64) -> bool {
        self.stats.process_calls += 1;
        if kind == CallKind::Recursive {
            if !self.aux.is_empty() {
                self.r += 1;
            }
            self.aux.push(0);
            self.level_base.push(self.meter.current_persistent());
            self.stats.max_r = self.stats.max_r.max(self.r);
            self.same_depth_run = 0;
        } else {
            self.same_depth_run += 1;
            self.stats.max_same_depth_run = self.stats.max_same_depth_run.max(self.same_depth_run);
        }
        let saved_run = self.same_depth_run;
        if let Some(p) = self.tree.parent(v0) {
            if self.tree.is_light_child(v0) {
                let b = self.tree.child_bracket(p, v0);
                let aux = self.aux[self.aux.len() - 1];
                self.stats.max_aux_bits = self.stats.max_aux_bits.max(aux);
                let ratio = aux as f64 / (1u64 << (b + 1).min(63)) as f64;
                if ratio > self.stats.aux_ratio {
                    self.stats.aux_ratio = ratio;
                }
            }
        }
        self.meter.enter_call();
        self.meter.charge_scratch(self.scratch_bits);

        let prefix = if self.tree.parent(v0).is_some() {
            anchor_len + self.child_addr_bits(v0)
        } else {
            0
        };
        let r_bit = u64::from(kind == CallKind::Recursive && self.r > 0);
        let mut v = v0;
        let mut code_len = self.pos_len(v0, v0);
        let mut prev_code_len = code_len;
        let mut regs_bits = prefix + code_len + self.constraint_bits(v, con) + r_bit;
        let mut regs = self.meter.push_frame("regs(pos,p)", regs_bits);
        let answer = loop {
            let ctx = Ctx {
                code_len,
                prev_code_len,
                anchor_len,
                regs_bits,
            };
            let t = match self.step(v, con, &ctx) {
                StepResult::Leaf(b) => break b,
                StepResult::Inner(t) => t,
            };
            self.stats.transitions += 1;
            if self.meter.tracing() {
                let line = format!("v {} {:?}", v + 1, t);
                self.meter.trace_with(|| line);
            }
            con = match t {
                Transition::Rej => break false,
                Transition::Nc => Constraint::None,
                Transition::Cr(p0) => Constraint::At { level: 0, pos: p0 },
            };
            let h = self.tree.heavy_child(v).expect("inner vertex has a heavy child");
            prev_code_len = code_len;
            code_len = self.pos_len(v0, h);
            v = h;
            self.meter.pop_frame(regs);
            regs_bits = prefix + code_len + self.constraint_bits(v, con) + r_bit;
            regs = self.meter.push_frame("regs(pos,p)", regs_bits);
        };
        self.meter.pop_frame(regs);
        self.meter.release_scratch(self.scratch_bits);
        self.meter.exit_call();
        if kind == CallKind::Recursive {
            self.aux.pop();
            self.level_base.pop();
            if !self.aux.is_empty() {
                self.r -= 1;
            }
        }
        self.same_depth_run = saved_run.saturating_sub(1);
        answer
    }

    /// Calls `process` on `u` with the caller's counters saved as a tuple.
    fn probe(&mut self, u: usize, con: Constraint, kind: CallKind, anchor_len: u64, tuple_bits: u64, regs_bits: u64) -> bool {
        let level = self.aux.len() - 1;
        let moved = tuple_bits + if kind == CallKind::SameDepth { regs_bits } else { 0 };
        self.aux[level] += moved;
        if kind == CallKind::Recursive {
            let level_bits = self.meter.current_persistent() + tuple_bits - self.level_base[level];
            let n_w = self.level_root_size(u);
            let shrink = (n_w as f64 / self.tree.size(u) as f64).log2().max(1.0);
            let ratio = level_bits as f64 / shrink;
            if ratio > self.stats.overhead_ratio {
                self.stats.overhead_ratio = ratio;
            }
        }
        let saved = self.meter.push_frame("aux(tuple)", tuple_bits);
        let ok = self.process(u, con, kind, anchor_len);
        self.meter.pop_frame(saved);
        self.aux[level] -= moved;
        ok
    }

    /// Size of the subtree the current level started from; approximated by
    /// the parent of the probed child, which lies on that level's heavy path.
    fn level_root_size(&self, u: usize) -> usize {
        self.tree.parent(u).map_or(self.tree.n(), |p| self.tree.size(p))
    }

    fn step(&mut self, v: usize, con: Constraint, ctx: &Ctx) -> StepResult {
        let lists = &self.inst.lists;
        let len = lists.len_of(v);
        if self.tree.is_leaf(v) {
            return StepResult::Leaf(match (len, con) {
                (0, _) => false,
                (1, Constraint::At { level, pos }) => {
                    let parent = self.tree.parent(v).expect("constrained vertex has a parent");
                    let (kind, anchor) = self.parent_mode(v, ctx);
                    let opts = ChainOpts {
                        trigger: false,
                        kind,
                        anchor_len: anchor,
                        extra_bits: 0,
                        regs_bits: ctx.regs_bits,
                    };
                    let m_p = self.m_of(parent);
                    match self.chain(parent, level.min(m_p), m_p, pos, opts) {
                        Adv::Pos(pm) if pm as usize <= lists.len_of(parent) => {
                            lists.at(parent, pm) != lists.at(v, 1)
                        }
                        _ => false,
                    }
                }
                _ => true,
            });
        }
        let m = self.m_of(v);
        let own = ChainOpts {
            trigger: true,
            kind: CallKind::Recursive,
            anchor_len: ctx.code_len,
            extra_bits: 0,
            regs_bits: ctx.regs_bits,
        };

        // 1: every light subtree must be colourable on its own
        for j in (1..=m).rev() {
            let kids = self.bracket_children(v, j);
            let count = kids.len() as u64;
            let tuple = TAG_BITS + 2 * bits_for_range(count + 1) + j as u64 + 1;
            for &u in &kids {
                if !self.probe(u, Constraint::None, CallKind::Recursive, ctx.code_len, tuple, ctx.regs_bits) {
                    return StepResult::Inner(Transition::Rej);
                }
            }
        }
        if len > self.tree.children(v).len() + usize::from(self.tree.parent(v).is_some()) + 2 {
            return StepResult::Inner(Transition::Nc);
        }

        // 2: L_0(v) is nonempty
        match self.chain(v, 0, m, 1, own) {
            Adv::Exhausted => return StepResult::Inner(Transition::Rej),
            Adv::NonCritical => return StepResult::Inner(Transition::Nc),
            Adv::Pos(pm) if pm as usize > len => return StepResult::Inner(Transition::Rej),
            Adv::Pos(_) => {}
        }

        // 3: |L_0(v)| capped at 3
        let mut alpha = 1u64;
        for p0 in 2..=3 {
            let opts = ChainOpts { extra_bits: 2, ..own };
            match self.chain(v, 0, m, p0, opts) {
                Adv::NonCritical => return StepResult::Inner(Transition::Nc),
                Adv::Pos(pm) if pm as usize <= len => alpha = p0,
                _ => break,
            }
        }
        if alpha >= 3 {
            return StepResult::Inner(Transition::Nc);
        }
        let (j_par, p_par) = match con {
            Constraint::None => {
                return StepResult::Inner(if alpha == 2 { Transition::Nc } else { Transition::Cr(1) });
            }
            Constraint::At { level, pos } => (level, pos),
        };
        for p0 in 1..=alpha {
            let Some(eq) = self.colours_equal(v, p0, alpha, j_par, p_par, ctx) else {
                return StepResult::Inner(Transition::Rej);
            };
            let t = match (alpha, p0, eq) {
                (1, _, true) => Transition::Rej,
                (1, _, false) => Transition::Cr(1),
                (_, 1, true) => Transition::Cr(2),
                (_, 1, false) => continue,
                (_, _, true) => Transition::Cr(1),
                (_, _, false) => Transition::Nc,
            };
            return StepResult::Inner(t);
        }
        unreachable!("alpha is 1 or 2 here")
    }

    /// How to probe the parent's light children: same-depth when `v` is a
    /// light child (a sibling call), recursive when `v` is a heavy child.
    fn parent_mode(&self, v: usize, ctx: &Ctx) -> (CallKind, u64) {
        if self.tree.is_light_child(v) {
            (CallKind::SameDepth, ctx.anchor_len)
        } else {
            (CallKind::Recursive, ctx.prev_code_len)
        }
    }

    /// Whether colour `p0` of `L_0(v)` equals the parent's forbidden colour.
    /// `None` when the parent's position does not exist.
    fn colours_equal(&mut self, v: usize, p0: u64, alpha: u64, j_par: usize, p_par: u64, ctx: &Ctx) -> Option<bool> {
        let parent = self.tree.parent(v).expect("constrained vertex has a parent");
        let m = self.m_of(v);
        let m_par = self.m_of(parent);
        let j_par = j_par.min(m_par);
        let small = bits_for_range(alpha + 1) + 2;
        let (par_kind, par_anchor) = self.parent_mode(v, ctx);
        let own_opts = |extra| ChainOpts {
            trigger: false,
            kind: CallKind::Recursive,
            anchor_len: ctx.code_len,
            extra_bits: small + extra,
            regs_bits: ctx.regs_bits,
        };
        let par_opts = |extra| ChainOpts {
            trigger: false,
            kind: par_kind,
            anchor_len: par_anchor,
            extra_bits: small + extra,
            regs_bits: ctx.regs_bits,
        };
        let mut own = p0;
        let own_top = j_par.min(m);
        let held = self.pos_bits(parent, j_par, p_par);
        match self.chain(v, 0, own_top, own, own_opts(held)) {
            Adv::Pos(p) => own = p,
            _ => unreachable!("existing positions chain through"),
        }
        let mut par = p_par;
        for x in j_par..m.max(m_par) {
            if x < m {
                let held = self.pos_bits(parent, x, par);
                match self.advance(v, x, own, own_opts(held)) {
                    Adv::Pos(p) => own = p,
                    _ => unreachable!("existing positions chain through"),
                }
            }
            if x < m_par {
                let held = self.pos_bits(v, (x + 1).min(m), own);
                match self.advance(parent, x, par, par_opts(held)) {
                    Adv::Pos(p) => par = p,
                    _ => return None,
                }
            }
        }
        if par as usize > self.inst.lists.len_of(parent) {
            return None;
        }
        Some(self.inst.lists.at(v, own) == self.inst.lists.at(parent, par))
    }

    fn chain(&mut self, w: usize, from: usize, to: usize, mut p: u64, opts: ChainOpts) -> Adv {
        for x in from..to {
            match self.advance(w, x, p, opts) {
                Adv::Pos(q) => p = q,
                other => return other,
            }
        }
        Adv::Pos(p)
    }

    /// `p_x` in `L_x(w)` to `p_{x+1}` in `L_{x+1}(w)`, probing the
    /// bracket-`(x+1)` children with `(x+1, prev)`.
    fn advance(&mut self, w: usize, x: usize, p: u64, opts: ChainOpts) -> Adv {
        let kids = self.bracket_children(w, x + 1);
        if kids.is_empty() {
            return Adv::Pos(p);
        }
        let f = kids.len() as u64;
        let m = self.m_of(w);
        let threshold = if opts.trigger && x + 1 < m {
            pow2_pow2_sat(x + 1).saturating_add(3).min(u64::MAX as u128) as u64
        } else {
            u64::MAX
        };
        let (mut curr, mut prev) = (1u64, 1u64);
        loop {
            let tuple = TAG_BITS
                + opts.extra_bits
                + self.pos_bits(w, x, p)
                + self.pos_bits(w, x, curr)
                + self.pos_bits(w, x + 1, prev)
                + 2 * bits_for_range(f + 1)
                + x as u64
                + 1;
            let mut ok = true;
            for &u in &kids {
                let con = Constraint::At { level: x + 1, pos: prev };
                if !self.probe(u, con, opts.kind, opts.anchor_len, tuple, opts.regs_bits) {
                    ok = false;
                    break;
                }
            }
            if ok {
                if curr == p {
                    return Adv::Pos(prev);
                }
                curr += 1;
                prev += 1;
            } else {
                prev += 1;
                if prev - curr > f {
                    return Adv::Exhausted;
                }
                if prev == threshold && self.exists_at(w, x + 1, threshold, opts) {
                    return Adv::NonCritical;
                }
            }
        }
    }

    /// Whether position `p` of `L_level(w)` exists.
    fn exists_at(&mut self, w: usize, level: usize, p: u64, opts: ChainOpts) -> bool {
        let m = self.m_of(w);
        let opts = ChainOpts {
            trigger: false,
            extra_bits: opts.extra_bits + self.pos_bits(w, level, p),
            ..opts
        };
        matches!(self.chain(w, level, m, p, opts), Adv::Pos(pm) if pm as usize <= self.inst.lists.len_of(w))
    }
}

/// `M` for a subtree of the given size.
pub fn bracket_count(n_v: usize) -> usize {
    BracketParams::new(n_v).m
}
