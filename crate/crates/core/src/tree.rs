//! Rooted trees, the down/next/up traversal, heavy children, brackets and
//! heavy-path position codes.
//!
//! The structural tables here (parent, children, sizes, heavy child) are a
//! function of the read-only input. Solvers may consult them freely; a
//! logspace machine would recompute each entry with a traversal, which is
//! what [`RootedTree::subtree_size_by_traversal`] does under the meter.

use crate::meter::WorkspaceMeter;
use crate::{log_bits, Error, Graph, Result};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct RootedTree {
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
    rank_in_parent: Vec<usize>,
    size: Vec<usize>,
    heavy: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Down,
    Next,
    Up,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraversalState {
    pub current: usize,
    pub mode: Mode,
}

impl RootedTree {
    /// Roots the tree at vertex 0 (vertex 1 in file numbering).
    pub fn new(graph: &Graph) -> Result<Self> {
        if !graph.is_tree() {
            return Err(Error::NotATree(format!(
                "{} vertices, {} edges",
                graph.n(),
                graph.edges().len()
            )));
        }
        let n = graph.n();
        let mut parent = vec![NONE; n];
        let mut children = vec![Vec::new(); n];
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![0];
        let mut seen = vec![false; n];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &u in graph.neighbours(v) {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = v;
                    children[v].push(u);
                    stack.push(u);
                }
            }
        }
        let mut rank_in_parent = vec![0; n];
        for kids in &children {
            for (i, &c) in kids.iter().enumerate() {
                rank_in_parent[c] = i;
            }
        }
        let mut size = vec![1; n];
        for &v in order.iter().rev() {
            if parent[v] != NONE {
                size[parent[v]] += size[v];
            }
        }
        let heavy = children
            .iter()
            .map(|kids| {
                let mut best = NONE;
                for &c in kids {
                    if best == NONE || size[c] > size[best] {
                        best = c;
                    }
                }
                best
            })
            .collect();
        Ok(RootedTree {
            parent,
            children,
            rank_in_parent,
            size,
            heavy,
        })
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        (self.parent[v] != NONE).then_some(self.parent[v])
    }

    /// Children in natural vertex order.
    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.children[v].is_empty()
    }

    pub fn size(&self, v: usize) -> usize {
        self.size[v]
    }

    /// Minimum-index child among those of maximum subtree size.
    pub fn heavy_child(&self, v: usize) -> Option<usize> {
        (self.heavy[v] != NONE).then_some(self.heavy[v])
    }

    pub fn light_children(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let h = self.heavy[v];
        self.children[v].iter().copied().filter(move |&c| c != h)
    }

    pub fn is_light_child(&self, u: usize) -> bool {
        match self.parent(u) {
            Some(p) => self.heavy[p] != u,
            None => false,
        }
    }

    /// Index of `v` among its parent's children.
    pub fn child_rank(&self, v: usize) -> usize {
        self.rank_in_parent[v]
    }

    pub fn next_sibling(&self, v: usize) -> Option<usize> {
        let p = self.parent(v)?;
        self.children[p].get(self.rank_in_parent[v] + 1).copied()
    }

    pub fn bracket_params(&self, v: usize) -> BracketParams {
        BracketParams::new(self.size[v])
    }

    /// Bracket of light child `c` of `v`, relative to `|T_v|`.
    pub fn child_bracket(&self, v: usize, c: usize) -> usize {
        self.bracket_params(v)
            .bracket_index(self.size[c])
            .expect("light child is at most half the parent subtree")
    }

    /// Light children of `v` in bracket `j`, natural order.
    pub fn light_children_in_bracket(&self, v: usize, j: usize) -> impl Iterator<Item = usize> + '_ {
        let bp = self.bracket_params(v);
        self.light_children(v)
            .filter(move |&c| bp.bracket_index(self.size[c]) == Ok(j))
    }

    /// Largest light-child subtree size at `v`, 0 when there is none.
    pub fn largest_light(&self, v: usize) -> usize {
        self.light_children(v).map(|c| self.size[c]).max().unwrap_or(0)
    }

    /// The heavy path from `v`: `h(v,1) = v`, `h(v,i+1)` the heavy child of
    /// `h(v,i)`.
    pub fn heavy_path(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        std::iter::successors(Some(v), move |&u| self.heavy_child(u))
    }

    /// One step of the down/next/up automaton restricted to `T_top`.
    /// Returns `None` after `(top, Up)`.
    pub fn traversal_step_within(&self, top: usize, s: TraversalState) -> Option<TraversalState> {
        let v = s.current;
        let next = match s.mode {
            Mode::Down => match self.children[v].first() {
                Some(&c) => TraversalState { current: c, mode: Mode::Down },
                None => TraversalState { current: v, mode: Mode::Next },
            },
            Mode::Next => {
                if v == top {
                    TraversalState { current: v, mode: Mode::Up }
                } else if let Some(s) = self.next_sibling(v) {
                    TraversalState { current: s, mode: Mode::Down }
                } else {
                    TraversalState { current: self.parent[v], mode: Mode::Up }
                }
            }
            Mode::Up => {
                if v == top {
                    return None;
                }
                TraversalState { current: v, mode: Mode::Next }
            }
        };
        Some(next)
    }

    pub fn traversal_step(&self, s: TraversalState) -> Option<TraversalState> {
        self.traversal_step_within(self.root(), s)
    }

    /// `|T_v|` by walking the subtree with a position and a counter only.
    pub fn subtree_size_by_traversal(&self, v: usize, meter: &mut WorkspaceMeter) -> usize {
        let n = self.n() as u64;
        // current vertex, mode (2 bits), counter
        let bits = 2 * log_bits(n) + 2;
        meter.enter_call();
        meter.charge_scratch(bits);
        let mut state = TraversalState { current: v, mode: Mode::Down };
        let mut count = 1;
        while let Some(s) = self.traversal_step_within(v, state) {
            if s.mode == Mode::Down {
                count += 1;
            }
            state = s;
        }
        meter.release_scratch(bits);
        meter.exit_call();
        count
    }

    /// Encodes `h(v,i)` (1-based `i`) relative to the heavy path from `v`.
    pub fn encode_pos(&self, v: usize, i: usize) -> Result<PosCode> {
        if i == 0 {
            return Err(Error::Invalid("heavy-path index starts at 1".into()));
        }
        let target = self
            .heavy_path(v)
            .nth(i - 1)
            .ok_or_else(|| Error::Invalid(format!("heavy path from {} is shorter than {i}", v + 1)))?;
        let bp = self.bracket_params(v);
        let j = self.pos_class(&bp, target);
        let rank = self
            .heavy_path(v)
            .take(i)
            .filter(|&u| self.pos_class(&bp, u) == j)
            .count() as u64;
        Ok(PosCode { j, rank: rank - 1 })
    }

    pub fn decode_pos(&self, v: usize, code: &PosCode) -> Result<usize> {
        let bp = self.bracket_params(v);
        self.heavy_path(v)
            .filter(|&u| self.pos_class(&bp, u) == code.j)
            .nth(code.rank as usize)
            .ok_or_else(|| Error::Invalid(format!("position code {code:?} addresses nothing")))
    }

    /// Bracket of the largest light subtree at `u` relative to the path
    /// start; vertices without light children form class `M+1`.
    fn pos_class(&self, bp: &BracketParams, u: usize) -> usize {
        match self.largest_light(u) {
            0 => bp.m + 1,
            t => bp.bracket_index(t).expect("light subtree below half"),
        }
    }
}

/// `x · 2^e ≥ n`, exactly.
fn scaled_ge(x: usize, e: u32, n: usize) -> bool {
    if x == 0 {
        return n == 0;
    }
    if e >= 64 {
        return true;
    }
    ((x as u128) << e) >= n as u128
}

fn pow2_pow2(j: usize) -> u32 {
    // 2^j, saturating well above any exponent that matters for usize
    if j >= 7 {
        128
    } else {
        1 << j
    }
}

/// Bracket structure of a subtree of size `n_v`: `M = ⌈log₂log₂(n_v/2)⌉`,
/// clamped to at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BracketParams {
    pub n_v: usize,
    pub m: usize,
}

impl BracketParams {
    pub fn new(n_v: usize) -> Self {
        // smallest m with 2^(2^m + 1) >= n_v
        let mut m = 1;
        while !scaled_ge(2, pow2_pow2(m), n_v) {
            m += 1;
        }
        BracketParams { n_v, m }
    }

    /// Bracket `j ∈ 1..=M` of a light subtree of the given size.
    pub fn bracket_index(&self, size: usize) -> Result<usize> {
        if size == 0 || 2 * size > self.n_v.saturating_sub(1) {
            return Err(Error::Invalid(format!(
                "size {size} outside 1..={} for subtree of {}",
                self.n_v.saturating_sub(1) / 2,
                self.n_v
            )));
        }
        Ok((1..self.m)
            .find(|&j| scaled_ge(size, pow2_pow2(j), self.n_v))
            .unwrap_or(self.m))
    }

    /// Half-open size interval of bracket `j`, rounded up to integers.
    pub fn interval(&self, j: usize) -> (usize, usize) {
        let lo = if j >= self.m {
            1
        } else {
            ceil_shr(self.n_v, pow2_pow2(j))
        };
        (lo, ceil_shr(self.n_v, pow2_pow2(j - 1)))
    }
}

/// Smallest `s ≥ 1` with `s · 2^e ≥ n`.
fn ceil_shr(n: usize, e: u32) -> usize {
    if e >= 64 {
        return 1;
    }
    let d = 1u128 << e;
    ((n as u128).div_ceil(d) as usize).max(1)
}

/// `j` zeros, a one, then `x-1` in `2^j` bits, most significant first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PosCode {
    pub j: usize,
    /// `x - 1`.
    pub rank: u64,
}

impl PosCode {
    pub fn len(&self) -> usize {
        self.j + 1 + (1usize << self.j)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn to_bits(&self) -> Vec<bool> {
        let width = 1usize << self.j;
        let mut bits = vec![false; self.j];
        bits.push(true);
        bits.extend((0..width).rev().map(|b| b < 64 && (self.rank >> b) & 1 == 1));
        bits
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let j = bits
            .iter()
            .position(|&b| b)
            .ok_or_else(|| Error::Invalid("position code has no marker bit".into()))?;
        let width = 1usize << j;
        let field = &bits[j + 1..];
        if field.len() != width {
            return Err(Error::Invalid(format!(
                "position code field has {} bits, expected {width}",
                field.len()
            )));
        }
        let mut rank = 0u64;
        for (i, &b) in field.iter().enumerate() {
            if b {
                let shift = width - 1 - i;
                if shift >= 64 {
                    return Err(Error::Invalid("position rank overflows".into()));
                }
                rank |= 1 << shift;
            }
        }
        Ok(PosCode { j, rank })
    }
}
