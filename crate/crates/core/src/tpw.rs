//! List colouring over a given tree-partition of width `k`.
//!
//! The heavy-path recursion of the tree solver, lifted to bags: a bag's
//! colouring is a tuple of list positions, light child bags are probed with
//! the tuple they must respect, and the heavy child inherits a one-bit-per-
//! tuple table over the bag's critical vertices only.
//!
//! A vertex with more colours than neighbours can always be coloured last,
//! so such vertices never enter a tuple.

use crate::meter::WorkspaceMeter;
use crate::tree::RootedTree;
use crate::{bits_for_range, log_bits, Error, Instance, Result, TreePartition};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TpwConfig {
    /// Refuse partitions wider than this.
    pub max_width: usize,
    /// Refuse bags whose tuple table would exceed this many bits.
    pub table_budget_bits: u64,
}

impl Default for TpwConfig {
    fn default() -> Self {
        TpwConfig {
            max_width: 4,
            table_budget_bits: 1 << 16,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TpwOutcome {
    pub answer: bool,
    pub width: usize,
    pub max_r: usize,
    pub max_table_bits: u64,
    pub process_calls: u64,
}

/// Checks partition, edge locality and nonempty bags; returns the width.
pub fn validate_tree_partition(graph: &crate::Graph, tp: &TreePartition) -> Result<usize> {
    tp.validate(graph)
}

pub fn solve_tpw(inst: &Instance, tp: &TreePartition, meter: &mut WorkspaceMeter) -> Result<bool> {
    solve_tpw_with(inst, tp, TpwConfig::default(), meter).map(|o| o.answer)
}

pub fn solve_tpw_with(
    inst: &Instance,
    tp: &TreePartition,
    cfg: TpwConfig,
    meter: &mut WorkspaceMeter,
) -> Result<TpwOutcome> {
    let width = tp.validate(&inst.graph)?;
    if width > cfg.max_width {
        return Err(Error::Refused(format!(
            "width {width} exceeds the configured maximum {}",
            cfg.max_width
        )));
    }
    let shape = crate::Graph::new(tp.bags.len(), tp.shape.clone())?;
    let tree = RootedTree::new(&shape)?;
    let n = inst.n();
    let active: Vec<bool> = (0..n)
        .map(|v| inst.lists.len_of(v) <= inst.graph.degree(v))
        .collect();
    let bags: Vec<Vec<usize>> = tp
        .bags
        .iter()
        .map(|b| {
            let mut b: Vec<usize> = b.iter().copied().filter(|&v| active[v]).collect();
            b.sort_unstable();
            b
        })
        .collect();
    let owner = tp.bag_of(n);
    let mut s = TpwSolver {
        inst,
        tree: &tree,
        bags,
        owner,
        width,
        cfg,
        meter,
        r: 0,
        out: TpwOutcome { width, ..TpwOutcome::default() },
    };
    let answer = s.process(tree.root(), Con::None, false)?;
    s.out.answer = answer;
    Ok(s.out)
}

/// Restriction a bag receives from its parent bag.
#[derive(Debug, Clone)]
enum Con {
    None,
    /// The parent bag's tuple.
    Single(Vec<u64>),
    /// Allowed position tuples over the parent's critical vertices.
    Table(Table),
}

#[derive(Debug, Clone)]
struct Table {
    crit: Vec<usize>,
    radix: Vec<u64>,
    bits: Vec<bool>,
}

impl Table {
    fn decode(&self, mut idx: usize, out: &mut Vec<u64>) {
        out.clear();
        out.resize(self.crit.len(), 0);
        for i in (0..self.crit.len()).rev() {
            let r = self.radix[i] as usize;
            out[i] = (idx % r) as u64 + 1;
            idx /= r;
        }
    }
}

struct TpwSolver<'a> {
    inst: &'a Instance,
    tree: &'a RootedTree,
    /// Active vertices of every bag, natural order.
    bags: Vec<Vec<usize>>,
    owner: Vec<usize>,
    width: usize,
    cfg: TpwConfig,
    meter: &'a mut WorkspaceMeter,
    r: usize,
    out: TpwOutcome,
}

impl TpwSolver<'_> {
    fn colour(&self, v: usize, p: u64) -> crate::Colour {
        self.inst.lists.at(v, p).expect("position within list")
    }

    fn tuple_bits(&self, bag: usize) -> u64 {
        self.bags[bag]
            .iter()
            .map(|&v| bits_for_range(self.inst.lists.len_of(v) as u64 + 1))
            .sum()
    }

    fn con_bits(&self, parent: Option<usize>, con: &Con) -> u64 {
        match (con, parent) {
            (Con::None, _) | (_, None) => 1,
            (Con::Single(_), Some(p)) => 1 + self.tuple_bits(p),
            (Con::Table(t), _) => 1 + self.width as u64 + t.bits.len() as u64,
        }
    }

    fn product(&self, bag: usize) -> Result<u64> {
        let mut prod: u64 = 1;
        for &v in &self.bags[bag] {
            prod = prod.saturating_mul(self.inst.lists.len_of(v) as u64);
        }
        if prod > self.cfg.table_budget_bits {
            return Err(Error::Refused(format!(
                "bag {} needs a {prod}-bit tuple table, budget {}",
                bag + 1,
                self.cfg.table_budget_bits
            )));
        }
        Ok(prod)
    }

    /// Tuple index (mixed radix, first vertex most significant) to positions.
    fn decode(&self, bag: usize, mut idx: u64, out: &mut [u64]) {
        for (i, &v) in self.bags[bag].iter().enumerate().rev() {
            let r = self.inst.lists.len_of(v) as u64;
            out[i] = idx % r + 1;
            idx /= r;
        }
    }

    fn proper_inside(&self, bag: usize, sigma: &[u64]) -> bool {
        let verts = &self.bags[bag];
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate().skip(i + 1) {
                if self.inst.graph.has_edge(u, v) && self.colour(u, sigma[i]) == self.colour(v, sigma[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// No edge between `bag` (coloured by `sigma`) and the listed vertices
    /// (coloured by `other`) is monochromatic.
    fn compatible_with(&self, bag: usize, sigma: &[u64], verts: &[usize], other: &[u64]) -> bool {
        for (i, &v) in self.bags[bag].iter().enumerate() {
            let c = self.colour(v, sigma[i]);
            for (j, &u) in verts.iter().enumerate() {
                if self.inst.graph.has_edge(u, v) && self.colour(u, other[j]) == c {
                    return false;
                }
            }
        }
        true
    }

    fn allowed(&self, bag: usize, sigma: &[u64], con: &Con, scratch: &mut Vec<u64>) -> bool {
        match con {
            Con::None => true,
            Con::Single(parent_sigma) => {
                let p = self.tree.parent(bag).expect("constrained bag has a parent");
                self.compatible_with(bag, sigma, &self.bags[p], parent_sigma)
            }
            Con::Table(t) => (0..t.bits.len()).any(|idx| {
                t.bits[idx] && {
                    t.decode(idx, scratch);
                    self.compatible_with(bag, sigma, &t.crit, scratch)
                }
            }),
        }
    }

    fn probe(&mut self, child: usize, con: Con, saved_bits: u64) -> Result<bool> {
        let frame = self.meter.push_frame("aux(tuple,child)", saved_bits + 1);
        self.r += 1;
        self.out.max_r = self.out.max_r.max(self.r);
        let ok = self.process(child, con, true);
        self.r -= 1;
        self.meter.pop_frame(frame);
        ok
    }

    /// Light children of `t`, smallest bracket last.
    fn light_order(&self, t: usize) -> Vec<usize> {
        let m = self.tree.bracket_params(t).m;
        (1..=m)
            .rev()
            .flat_map(|j| self.tree.light_children_in_bracket(t, j).collect::<Vec<_>>())
            .collect()
    }

    fn process(&mut self, mut t: usize, mut con: Con, recursive: bool) -> Result<bool> {
        self.out.process_calls += 1;
        self.meter.enter_call();
        let scratch = 4 * log_bits(self.inst.n() as u64) + self.width as u64 * 8;
        self.meter.charge_scratch(scratch);
        let ptr_bits = log_bits(self.tree.n() as u64) + u64::from(recursive);
        let result = loop {
            let regs = self.meter.push_frame("regs(pos,p)", ptr_bits + self.con_bits(self.tree.parent(t), &con));
            let step = self.step(t, &con);
            self.meter.pop_frame(regs);
            match step {
                Err(e) => break Err(e),
                Ok(Step::Done(b)) => break Ok(b),
                Ok(Step::Descend(h, table)) => {
                    t = h;
                    con = Con::Table(table);
                }
            }
        };
        self.meter.release_scratch(scratch);
        self.meter.exit_call();
        result
    }

    fn step(&mut self, t: usize, con: &Con) -> Result<Step> {
        let lights = self.light_order(t);
        let child_bits = bits_for_range(lights.len() as u64 + 1) + self.tree.bracket_params(t).m as u64;
        for &s in &lights {
            if !self.probe(s, Con::None, child_bits)? {
                return Ok(Step::Done(false));
            }
        }
        let prod = self.product(t)?;
        let k = self.bags[t].len();
        let good_frame = self.meter.push_frame("good-table", prod + self.width as u64);
        self.out.max_table_bits = self.out.max_table_bits.max(prod);
        let saved = self.tuple_bits(t) + child_bits + log_bits(prod);
        let mut good = vec![false; prod as usize];
        let mut sigma = vec![0u64; k];
        let mut scratch = Vec::new();
        for idx in 0..prod {
            self.decode(t, idx, &mut sigma);
            if !self.proper_inside(t, &sigma) || !self.allowed(t, &sigma, con, &mut scratch) {
                continue;
            }
            let mut ok = true;
            for &s in &lights {
                match self.probe(s, Con::Single(sigma.clone()), saved) {
                    Ok(true) => {}
                    Ok(false) => {
                        ok = false;
                        break;
                    }
                    Err(e) => {
                        self.meter.pop_frame(good_frame);
                        return Err(e);
                    }
                }
            }
            good[idx as usize] = ok;
        }
        let step = match self.tree.heavy_child(t) {
            None => Step::Done(good.iter().any(|&g| g)),
            Some(_) if !good.iter().any(|&g| g) => Step::Done(false),
            Some(h) => Step::Descend(h, self.critical_table(t, h, &good)),
        };
        self.meter.pop_frame(good_frame);
        Ok(step)
    }

    /// Table over the vertices of `t` that cannot always dodge the heavy
    /// child: `v` is free when every good tuple has at least
    /// `|N(v) ∩ X_h| + 1` good variants differing only at `v`.
    fn critical_table(&self, t: usize, h: usize, good: &[bool]) -> Table {
        let verts = &self.bags[t];
        let k = verts.len();
        let radix: Vec<u64> = verts.iter().map(|&v| self.inst.lists.len_of(v) as u64).collect();
        // stride of coordinate i in the mixed-radix index
        let mut stride = vec![1u64; k];
        for i in (0..k.saturating_sub(1)).rev() {
            stride[i] = stride[i + 1] * radix[i + 1];
        }
        let mut crit = Vec::new();
        let mut crit_idx = Vec::new();
        for (i, &v) in verts.iter().enumerate() {
            let need = self
                .inst
                .graph
                .neighbours(v)
                .iter()
                .filter(|&&u| self.owner[u] == h && self.bags[h].binary_search(&u).is_ok())
                .count() as u64
                + 1;
            if need == 1 {
                continue;
            }
            let free = (0..good.len() as u64).filter(|&idx| good[idx as usize]).all(|idx| {
                let own = (idx / stride[i]) % radix[i];
                let base = idx - own * stride[i];
                let variants = (0..radix[i]).filter(|&a| good[(base + a * stride[i]) as usize]).count() as u64;
                variants >= need
            });
            if !free {
                crit.push(v);
                crit_idx.push(i);
            }
        }
        let crit_radix: Vec<u64> = crit_idx.iter().map(|&i| radix[i]).collect();
        let size: u64 = crit_radix.iter().product();
        let mut bits = vec![false; size as usize];
        for idx in 0..good.len() as u64 {
            if !good[idx as usize] {
                continue;
            }
            let mut proj = 0u64;
            for (&i, &r) in crit_idx.iter().zip(&crit_radix) {
                proj = proj * r + (idx / stride[i]) % radix[i];
            }
            bits[proj as usize] = true;
        }
        Table {
            crit,
            radix: crit_radix,
            bits,
        }
    }
}

enum Step {
    Done(bool),
    Descend(usize, Table),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{random_instance, random_partitioned_instance, reduce_multicoloured_clique, MulticolouredCliqueInstance};
    use crate::logspace::solve_log;
    use crate::oracle::{brute_force_solve, dp_solve, BruteConfig};

    #[test]
    fn width_one_matches_log_solver() {
        for seed in 0..1000u64 {
            let inst = random_instance(1 + (seed as usize % 40), 1 + (seed as usize % 4), seed);
            let tp = TreePartition::trivial(&inst.graph);
            let mut m = WorkspaceMeter::new(inst.n());
            let got = solve_tpw(&inst, &tp, &mut m).unwrap();
            let mut m2 = WorkspaceMeter::new(inst.n());
            assert_eq!(got, solve_log(&inst, &mut m2).unwrap(), "seed {seed}");
            assert_eq!(got, dp_solve(&inst).unwrap().is_some(), "seed {seed}");
            assert_eq!(m.current_persistent(), 0);
        }
    }

    #[test]
    fn single_bag_matches_brute() {
        for seed in 0..300u64 {
            let inst = random_instance(1 + (seed as usize % 7), 1 + (seed as usize % 3), seed);
            let tp = TreePartition::single_bag(inst.n());
            let cfg = TpwConfig { max_width: 8, table_budget_bits: 1 << 20 };
            let mut m = WorkspaceMeter::new(inst.n());
            let got = solve_tpw_with(&inst, &tp, cfg, &mut m).unwrap().answer;
            let expect = brute_force_solve(&inst, BruteConfig::default()).unwrap().is_some();
            assert_eq!(got, expect, "seed {seed}");
        }
    }

    #[test]
    fn partitioned_matches_brute() {
        for k in 1..=3 {
            for seed in 0..150u64 {
                let (inst, tp) = random_partitioned_instance(2 + seed as usize % 6, k, 3, 4, 0.5, seed);
                let mut m = WorkspaceMeter::new(inst.n());
                let got = solve_tpw(&inst, &tp, &mut m).unwrap();
                let expect = brute_force_solve(&inst, BruteConfig::default()).unwrap().is_some();
                assert_eq!(got, expect, "k {k} seed {seed}");
            }
        }
    }

    #[test]
    fn clique_reduction_matches_search() {
        for seed in 0..200u64 {
            let k = 2 + seed as usize % 2;
            let mc = MulticolouredCliqueInstance::random(k, 1 + seed as usize % 3, 0.6, seed);
            let (h, tp) = reduce_multicoloured_clique(&mc).unwrap();
            let mut m = WorkspaceMeter::new(h.n());
            assert_eq!(solve_tpw(&h, &tp, &mut m).unwrap(), mc.find_clique().is_some(), "seed {seed}");
        }
    }

    #[test]
    fn refuses_wide_partitions() {
        let inst = random_instance(6, 2, 1);
        let tp = TreePartition::single_bag(6);
        let mut m = WorkspaceMeter::new(6);
        assert!(matches!(solve_tpw(&inst, &tp, &mut m), Err(Error::Refused(_))));
    }
}
