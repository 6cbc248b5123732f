//! Ground-truth solvers: exhaustive backtracking and the bottom-up tree DP.

use crate::tree::RootedTree;
use crate::{Colour, Error, Graph, Instance, Result};

pub const DEFAULT_BRUTE_BUDGET: u128 = 10_000_000;

/// A total assignment `vertex -> colour`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Colouring(pub Vec<Colour>);

impl Colouring {
    /// Checks totality, list membership and properness.
    pub fn validate(&self, inst: &Instance) -> Result<()> {
        if self.0.len() != inst.n() {
            return Err(Error::Invalid(format!(
                "colouring has {} entries for {} vertices",
                self.0.len(),
                inst.n()
            )));
        }
        for (v, &c) in self.0.iter().enumerate() {
            if !inst.lists.get(v).contains(&c) {
                return Err(Error::Invalid(format!(
                    "vertex {} coloured {c} outside its list",
                    v + 1
                )));
            }
        }
        for &(u, v) in inst.graph.edges() {
            if self.0[u] == self.0[v] {
                return Err(Error::Invalid(format!(
                    "edge {} {} is monochromatic",
                    u + 1,
                    v + 1
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteConfig {
    /// Maximum product of list sizes; `None` disables the check.
    pub budget: Option<u128>,
}

impl Default for BruteConfig {
    fn default() -> Self {
        BruteConfig {
            budget: Some(DEFAULT_BRUTE_BUDGET),
        }
    }
}

impl BruteConfig {
    pub fn unlimited() -> Self {
        BruteConfig { budget: None }
    }
}

pub fn list_product(inst: &Instance) -> u128 {
    (0..inst.n()).fold(1u128, |acc, v| acc.saturating_mul(inst.lists.len_of(v) as u128))
}

/// Exhaustive search in vertex order, list order within a vertex; returns
/// the lexicographically first colouring.
pub fn brute_force_solve(inst: &Instance, cfg: BruteConfig) -> Result<Option<Colouring>> {
    if let Some(budget) = cfg.budget {
        let product = list_product(inst);
        if product > budget {
            return Err(Error::OracleBudget { product, budget });
        }
    }
    let order: Vec<usize> = (0..inst.n()).collect();
    let lists: Vec<&[Colour]> = (0..inst.n()).map(|v| inst.lists.get(v)).collect();
    Ok(backtrack(&inst.graph, &order, &lists).map(Colouring))
}

/// Backtracking restricted to `order`; vertices outside it are ignored.
/// Returns colours indexed by vertex (0 for vertices not in `order`).
pub fn backtrack(graph: &Graph, order: &[usize], lists: &[&[Colour]]) -> Option<Vec<Colour>> {
    let n = graph.n();
    let mut colour = vec![0 as Colour; n];
    let mut active = vec![false; n];
    for &v in order {
        active[v] = true;
    }
    if order.iter().any(|&v| lists[v].is_empty()) {
        return None;
    }
    // choice[i] is the next list index to try for order[i]
    let mut choice = vec![0usize; order.len()];
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        colour[v] = 0;
        let mut placed = false;
        while choice[i] < lists[v].len() {
            let c = lists[v][choice[i]];
            choice[i] += 1;
            if graph.neighbours(v).iter().any(|&u| colour[u] == c) {
                continue;
            }
            colour[v] = c;
            if forward_ok(graph, v, &colour, &active, lists) {
                placed = true;
                break;
            }
            colour[v] = 0;
        }
        if placed {
            i += 1;
        } else {
            choice[i] = 0;
            if i == 0 {
                return None;
            }
            i -= 1;
        }
    }
    Some(colour)
}

/// Every uncoloured active neighbour of `v` still has an available colour.
fn forward_ok(graph: &Graph, v: usize, colour: &[Colour], active: &[bool], lists: &[&[Colour]]) -> bool {
    graph.neighbours(v).iter().all(|&u| {
        !active[u]
            || colour[u] != 0
            || lists[u]
                .iter()
                .any(|&c| graph.neighbours(u).iter().all(|&w| colour[w] != c))
    })
}

/// Can `T_v` be coloured with `v` avoiding `avoid`? Exhaustive over `T_v`.
pub fn brute_subtree(inst: &Instance, tree: &RootedTree, v: usize, avoid: Option<Colour>) -> bool {
    let order = subtree_vertices(tree, v);
    let restricted: Vec<Colour> = inst
        .lists
        .get(v)
        .iter()
        .copied()
        .filter(|&c| Some(c) != avoid)
        .collect();
    let lists: Vec<&[Colour]> = (0..inst.n())
        .map(|u| if u == v { restricted.as_slice() } else { inst.lists.get(u) })
        .collect();
    backtrack(&inst.graph, &order, &lists).is_some()
}

/// Colours `c ∈ L(v)` for which `T_v` has a colouring with `v ↦ c`,
/// by exhaustive search over `T_v`.
pub fn brute_subtree_colours(inst: &Instance, tree: &RootedTree, v: usize) -> Vec<Colour> {
    let order = subtree_vertices(tree, v);
    inst.lists
        .get(v)
        .iter()
        .copied()
        .filter(|&c| {
            let single = [c];
            let lists: Vec<&[Colour]> = (0..inst.n())
                .map(|u| if u == v { &single[..] } else { inst.lists.get(u) })
                .collect();
            backtrack(&inst.graph, &order, &lists).is_some()
        })
        .collect()
}

/// `T_v` in preorder.
pub fn subtree_vertices(tree: &RootedTree, v: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(tree.size(v));
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        out.push(u);
        stack.extend(tree.children(u).iter().rev());
    }
    out
}

/// For every vertex, the colours of `L(v)` (in list order) that extend to a
/// colouring of `T_v`.
pub fn feasible_colours(inst: &Instance, tree: &RootedTree) -> Vec<Vec<Colour>> {
    let n = inst.n();
    let mut feasible: Vec<Vec<Colour>> = vec![Vec::new(); n];
    let order = subtree_vertices(tree, tree.root());
    for &v in order.iter().rev() {
        let kids = tree.children(v);
        if kids.iter().any(|&c| feasible[c].is_empty()) {
            continue;
        }
        feasible[v] = inst
            .lists
            .get(v)
            .iter()
            .copied()
            .filter(|&a| kids.iter().all(|&c| feasible[c].len() >= 2 || feasible[c][0] != a))
            .collect();
    }
    feasible
}

/// Linear-time DP over feasible list positions, with a top-down witness.
pub fn dp_solve(inst: &Instance) -> Result<Option<Colouring>> {
    inst.require_tree()?;
    let tree = RootedTree::new(&inst.graph)?;
    let feasible = feasible_colours(inst, &tree);
    let root = tree.root();
    let Some(&first) = feasible[root].first() else {
        return Ok(None);
    };
    let mut colour = vec![0 as Colour; inst.n()];
    colour[root] = first;
    for v in subtree_vertices(&tree, root) {
        for &c in tree.children(v) {
            colour[c] = *feasible[c]
                .iter()
                .find(|&&a| a != colour[v])
                .expect("parent colour was chosen to leave a child colour");
        }
    }
    Ok(Some(Colouring(colour)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{parse_instance, random_instance};

    fn p(text: &str) -> Instance {
        parse_instance(text).unwrap()
    }

    #[test]
    fn brute_examples() {
        let cfg = BruteConfig::default();
        assert_eq!(brute_force_solve(&p("2 1\n1 2\n1 1\n1 1\n"), cfg).unwrap(), None);
        assert_eq!(
            brute_force_solve(&p("2 1\n1 2\n1 1\n2 1 2\n"), cfg).unwrap(),
            Some(Colouring(vec![1, 2]))
        );
        assert_eq!(brute_force_solve(&p("1 0\n0\n"), cfg).unwrap(), None);
    }

    #[test]
    fn brute_budget() {
        let inst = random_instance(40, 8, 1);
        let cfg = BruteConfig { budget: Some(10) };
        let nonempty = (0..40).all(|v| inst.lists.len_of(v) > 0);
        if nonempty {
            assert!(matches!(brute_force_solve(&inst, cfg), Err(Error::OracleBudget { .. })));
        }
        let err = Error::OracleBudget { product: 11, budget: 10 };
        assert!(err.to_string().contains("too large for oracle"));
    }

    #[test]
    fn dp_examples() {
        let inst = p("3 2\n1 2\n2 3\n1 1\n2 1 2\n1 1\n");
        let w = dp_solve(&inst).unwrap().unwrap();
        assert_eq!(w, Colouring(vec![1, 2, 1]));
        assert_eq!(brute_force_solve(&inst, BruteConfig::default()).unwrap(), Some(w));
        let star = p("4 3\n1 2\n1 3\n1 4\n1 1\n1 1\n1 1\n1 1\n");
        assert_eq!(dp_solve(&star).unwrap(), None);
    }

    #[test]
    fn dp_rejects_non_tree() {
        let tri = p("3 3\n1 2\n2 3\n1 3\n1 1\n1 2\n1 3\n");
        assert!(matches!(dp_solve(&tri), Err(Error::NotATree(_))));
    }

    #[test]
    fn dp_agrees_with_brute() {
        for seed in 0..2000u64 {
            let inst = random_instance(1 + (seed as usize % 9), 1 + (seed as usize % 4), seed);
            let b = brute_force_solve(&inst, BruteConfig::default()).unwrap();
            let d = dp_solve(&inst).unwrap();
            assert_eq!(b.is_some(), d.is_some(), "seed {seed}");
            if let Some(w) = d {
                w.validate(&inst).unwrap();
            }
            if let Some(w) = b {
                w.validate(&inst).unwrap();
            }
        }
    }

    #[test]
    fn subtree_oracles_agree() {
        for seed in 0..200u64 {
            let inst = random_instance(8, 3, seed);
            let tree = RootedTree::new(&inst.graph).unwrap();
            let feas = feasible_colours(&inst, &tree);
            for (v, f) in feas.iter().enumerate() {
                assert_eq!(&brute_subtree_colours(&inst, &tree, v), f);
                assert_eq!(brute_subtree(&inst, &tree, v, None), !f.is_empty());
            }
        }
    }
}
